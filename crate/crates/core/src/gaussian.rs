//! Gaussian-class functions `f(x)·e_{q²}(-x²)` in monomial or discrete
//! q-Hermite II coordinates, the g_m and G_k families, the unit u_γ, growth
//! type estimates and reconstruction from moments.

use crate::error::{QError, Result};
use crate::lattice::{q_integral, LatticeFunction};
use crate::qcore::{big_e_q, poch_inf_real, poch_real, q_factorial, qpow, Accumulator, QContext, C64};
use crate::series::{generating_series, MomentSeries, PowerSeries};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    Hermite2,
}

/// `Σ c_l b_l(x) · e_{q²}(-x²)` with `b_l = x^l` or `b_l = h̃_l(x;q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSeries {
    pub basis: Basis,
    pub coeffs: Vec<C64>,
    pub gamma_hint: Option<f64>,
}

/// Coefficient of `x^{n-2j}` in `h̃_n(x;q)`.
pub fn hermite2_coeff(n: usize, j: usize, q: f64) -> f64 {
    let (nn, jj) = (n as i64, j as i64);
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    sign * poch_real(q, q, n) * qpow(q, -2 * jj * nn + 2 * jj * jj + jj)
        / (poch_real(q * q, q * q, j) * poch_real(q, q, n - 2 * j))
}

/// `h̃_l(x;q)` by its explicit finite sum.
pub fn hermite2_poly(l: usize, x: C64, q: f64) -> C64 {
    let mut acc = Accumulator::new();
    for j in 0..=l / 2 {
        acc.add(x.powi((l - 2 * j) as i32) * hermite2_coeff(l, j, q));
    }
    acc.value()
}

/// `h̃_l(x;q)` by `x h̃_n = h̃_{n+1} + q^{1-2n}(1-q^n) h̃_{n-1}`.
pub fn hermite2_recurrence(l: usize, x: C64, q: f64) -> C64 {
    let mut prev = C64::new(1.0, 0.0);
    if l == 0 {
        return prev;
    }
    let mut cur = x;
    for n in 1..l {
        let next = x * cur - prev * (qpow(q, 1 - 2 * n as i64) * (1.0 - qpow(q, n as i64)));
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln e_{q²}(-x²) = -Σ_j ln(1 + x² q^{2j})`.
pub fn ln_gaussian(x: C64, ctx: &QContext) -> Result<C64> {
    let q2 = ctx.q() * ctx.q();
    let x2 = x * x;
    let mut acc = Accumulator::new();
    for j in 0..ctx.max_terms() {
        let z = x2 * qpow(q2, j as i64);
        let f = C64::new(1.0, 0.0) + z;
        if f.norm() < ctx.rel_tol() {
            return Err(QError::Pole(format!("e_q2(-x^2) has a pole near x = {x}")));
        }
        acc.add(-f.ln());
        if z.norm() < 1e-18 {
            return Ok(acc.value());
        }
    }
    Err(QError::Truncation(format!("e_q2(-x^2) at x = {x} did not settle")))
}

/// `e_{q²}(-x²)`.
pub fn gaussian(x: C64, ctx: &QContext) -> Result<C64> {
    Ok(ln_gaussian(x, ctx)?.exp())
}

fn safe_ln(z: C64) -> Option<C64> {
    if z.norm() == 0.0 {
        None
    } else {
        Some(z.ln())
    }
}

impl GaussianSeries {
    pub fn new(basis: Basis, coeffs: Vec<C64>) -> Self {
        GaussianSeries { basis, coeffs, gamma_hint: None }
    }

    pub fn hermite(coeffs: Vec<C64>) -> Self {
        Self::new(Basis::Hermite2, coeffs)
    }

    pub fn monomial(coeffs: Vec<C64>) -> Self {
        Self::new(Basis::Monomial, coeffs)
    }

    pub fn from_real(basis: Basis, coeffs: &[f64]) -> Self {
        Self::new(basis, coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `h̃_l · e_{q²}(-x²)`.
    pub fn hermite_unit(l: usize) -> Self {
        let mut c = vec![ZERO; l + 1];
        c[l] = C64::new(1.0, 0.0);
        Self::hermite(c)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma_hint = Some(gamma);
        self
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// Change of basis by back-substitution on the triangular Hermite table.
    pub fn to_basis(&self, target: Basis, q: f64) -> GaussianSeries {
        if target == self.basis {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = vec![ZERO; n];
        match target {
            Basis::Monomial => {
                for (m, slot) in out.iter_mut().enumerate() {
                    let mut acc = Accumulator::new();
                    for k in (m..n).step_by(2) {
                        acc.add(self.coeffs[k] * hermite2_coeff(k, (k - m) / 2, q));
                    }
                    *slot = acc.value();
                }
            }
            Basis::Hermite2 => {
                for m in (0..n).rev() {
                    let mut acc = Accumulator::new();
                    acc.add(self.coeffs[m]);
                    for k in (m + 2..n).step_by(2) {
                        acc.add(-out[k] * hermite2_coeff(k, (k - m) / 2, q));
                    }
                    out[m] = acc.value();
                }
            }
        }
        GaussianSeries { basis: target, coeffs: out, gamma_hint: self.gamma_hint }
    }

    pub fn to_hermite(&self, q: f64) -> GaussianSeries {
        self.to_basis(Basis::Hermite2, q)
    }

    /// Value at `x`. Each term is combined in log space so that huge
    /// polynomial parts and tiny Gaussian factors never meet in floating point.
    pub fn eval(&self, x: C64, ctx: &QContext) -> Result<C64> {
        let lg = ln_gaussian(x, ctx)?;
        let q = ctx.q();
        let lnq = q.ln();
        let mut acc = Accumulator::new();
        if x.norm() == 0.0 {
            let c0 = match self.basis {
                Basis::Monomial => self.coeff(0),
                Basis::Hermite2 => {
                    let mut a = Accumulator::new();
                    for (l, &c) in self.coeffs.iter().enumerate().step_by(2) {
                        a.add(c * hermite2_coeff(l, l / 2, q));
                    }
                    a.value()
                }
            };
            return Ok(c0 * lg.exp());
        }
        match self.basis {
            Basis::Monomial => {
                let lx = x.ln();
                for (n, &c) in self.coeffs.iter().enumerate() {
                    if let Some(lc) = safe_ln(c) {
                        acc.add((lc + lx * n as f64 + lg).exp());
                    }
                }
            }
            Basis::Hermite2 => {
                // H_n = h̃_n q^{n²/2}, rescaled on the fly by exp(log_s)
                let mut prev = C64::new(1.0, 0.0);
                let mut cur = x * q.sqrt();
                let mut log_s = 0.0f64;
                for (n, &c) in self.coeffs.iter().enumerate() {
                    let h = match n {
                        0 => C64::new(1.0, 0.0),
                        1 => cur,
                        _ => {
                            let m = (n - 1) as f64;
                            let next = x * qpow(q, n as i64 - 1) * q.sqrt() * cur
                                - prev * ((1.0 - q.powf(m)) * q);
                            prev = cur;
                            cur = next;
                            let mag = cur.norm().max(prev.norm());
                            if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
                                cur /= mag;
                                prev /= mag;
                                log_s += mag.ln();
                            }
                            cur
                        }
                    };
                    if let (Some(lc), Some(lh)) = (safe_ln(c), safe_ln(h)) {
                        let a = lc + lh + log_s - 0.5 * (n * n) as f64 * lnq + lg;
                        acc.add(a.exp());
                    }
                }
            }
        }
        Ok(acc.value())
    }

    /// The function as a closure on L(γ).
    pub fn to_lattice_function(&self, gamma: f64, ctx: &QContext) -> LatticeFunction {
        let s = self.clone();
        let c = *ctx;
        LatticeFunction::from_fn(gamma, Some("gaussian_series"), move |x| s.eval(x, &c).unwrap_or(C64::new(f64::NAN, 0.0)))
    }

    pub fn scale(&self, s: C64) -> GaussianSeries {
        GaussianSeries { coeffs: self.coeffs.iter().map(|&c| c * s).collect(), ..self.clone() }
    }

    /// Sum in the basis of `self` (the other operand is converted).
    pub fn add(&self, other: &GaussianSeries, q: f64) -> GaussianSeries {
        let o = other.to_basis(self.basis, q);
        let n = self.len().max(o.len());
        GaussianSeries {
            coeffs: (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &GaussianSeries, q: f64) -> GaussianSeries {
        self.add(&other.scale(C64::new(-1.0, 0.0)), q)
    }

    pub fn truncate(&self, len: usize) -> GaussianSeries {
        let mut c = self.coeffs.clone();
        c.resize(len, ZERO);
        GaussianSeries { coeffs: c, ..self.clone() }
    }

    /// Largest coefficient difference in Hermite coordinates.
    pub fn max_coeff_diff(&self, other: &GaussianSeries, q: f64) -> f64 {
        let a = self.to_hermite(q);
        let b = other.to_hermite(q);
        (0..a.len().max(b.len())).map(|i| (a.coeff(i) - b.coeff(i)).norm()).fold(0.0, f64::max)
    }

    /// `∂^t` in Hermite coordinates: `h̃_l e ↦ (-1)^t q^{lt+(t²-t)/2}(1-q)^{-t} h̃_{l+t} e`.
    pub fn derivative(&self, t: usize, q: f64) -> GaussianSeries {
        let h = self.to_hermite(q);
        let mut out = vec![ZERO; h.len() + t];
        let tt = t as i64;
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        let scale = (1.0 - q).powi(-(t as i32));
        for (l, &c) in h.coeffs.iter().enumerate() {
            out[l + t] = c * (sign * scale * qpow(q, l as i64 * tt + (tt * tt - tt) / 2));
        }
        GaussianSeries { basis: Basis::Hermite2, coeffs: out, gamma_hint: self.gamma_hint }
    }

    /// Antiderivative inside the class, inverting `∂` on Hermite indices ≥ 1.
    pub fn antiderivative(&self, q: f64, tol: f64) -> Result<GaussianSeries> {
        let h = self.to_hermite(q);
        let scale = h.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if h.coeff(0).norm() > tol * scale.max(1e-300) {
            return Err(QError::Domain(
                "the h̃_0 component has no antiderivative of Gaussian type".into(),
            ));
        }
        let n = h.len().max(2);
        let mut out = vec![ZERO; n - 1];
        for m in 1..h.len() {
            out[m - 1] = -h.coeffs[m] * ((1.0 - q) * qpow(q, 1 - m as i64));
        }
        Ok(GaussianSeries { basis: Basis::Hermite2, coeffs: out, gamma_hint: self.gamma_hint })
    }

    /// Multiplication by `x`, which stays in the class.
    pub fn times_x(&self, q: f64) -> GaussianSeries {
        let h = self.to_hermite(q);
        let n = h.len();
        let mut out = vec![ZERO; n + 1];
        for (k, &c) in h.coeffs.iter().enumerate() {
            out[k + 1] += c;
            if k >= 1 {
                out[k - 1] += c * (qpow(q, 1 - 2 * k as i64) * (1.0 - qpow(q, k as i64)));
            }
        }
        GaussianSeries { basis: Basis::Hermite2, coeffs: out, gamma_hint: self.gamma_hint }
    }

    /// Taylor coefficients at 0 through `order`, from
    /// `e_{q²}(-x²) = Σ (-1)^n x^{2n}/(q²;q²)_n`. The series has radius 1.
    pub fn taylor(&self, order: usize, q: f64) -> PowerSeries {
        let m = self.to_basis(Basis::Monomial, q);
        let mut out = vec![ZERO; order + 1];
        for n in 0..=order / 2 {
            let w = if n % 2 == 0 { 1.0 } else { -1.0 } / poch_real(q * q, q * q, n);
            for (l, &c) in m.coeffs.iter().enumerate() {
                if 2 * n + l <= order {
                    out[2 * n + l] += c * w;
                }
            }
        }
        PowerSeries::new(out, order)
    }
}

/// Closed-form moments of a Hermite-coordinate series:
/// `∫_γ e x^p h̃_r = c_q(γ)(q;q)_{r+2k} q^{-2rk-k²-r²}/(q²;q²)_k` for `p = r+2k`.
pub fn gaussian_moments(g: &GaussianSeries, gamma: f64, c_q: f64, up_to: usize, q: f64) -> MomentSeries {
    let h = g.to_hermite(q);
    let lnq = q.ln();
    let mut out = Vec::with_capacity(up_to + 1);
    for p in 0..=up_to {
        let mut acc = Accumulator::new();
        let pp = p as i64;
        for r in (p % 2..=p.min(h.len().saturating_sub(1))).step_by(2) {
            let Some(lc) = safe_ln(h.coeffs[r]) else { continue };
            let k = (p - r) / 2;
            let (rr, kk) = (r as i64, k as i64);
            let expo = (pp * pp + pp) / 2 - 2 * rr * kk - kk * kk - rr * rr;
            let mag = (c_q * poch_real(q, q, p) / poch_real(q * q, q * q, k)).ln() + expo as f64 * lnq;
            acc.add((lc + mag).exp());
        }
        out.push(acc.value());
    }
    MomentSeries::new(gamma, out)
}

/// Growth estimate for `|a_l| ≤ C s^l q^{l²/2}` in monomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthType {
    /// Zero when every coefficient in the window vanishes.
    pub s_estimate: f64,
    pub confidence_window: (usize, usize),
}

/// `max_l (|a_l| q^{-l²/2})^{1/l}` over the upper half of the stored indices.
pub fn estimate_growth_type(g: &GaussianSeries, q: f64) -> Result<GrowthType> {
    let m = g.to_basis(Basis::Monomial, q);
    let nonzero = m.coeffs.iter().filter(|c| c.norm() > 0.0).count();
    if nonzero < 8 {
        return Err(QError::InsufficientData(format!(
            "growth type needs at least 8 nonzero coefficients, got {nonzero}"
        )));
    }
    let hi = m.len() - 1;
    let lo = (hi / 2).max(1);
    estimate_growth_type_in(&m, lo, hi, q)
}

/// Growth estimate over an explicit index window `[lo, hi]`.
pub fn estimate_growth_type_in(g: &GaussianSeries, lo: usize, hi: usize, q: f64) -> Result<GrowthType> {
    let m = g.to_basis(Basis::Monomial, q);
    if lo == 0 || lo > hi {
        return Err(QError::Domain(format!("invalid growth window [{lo}, {hi}]")));
    }
    let lnq = q.ln();
    let mut s = 0.0f64;
    for l in lo..=hi {
        let a = m.coeff(l).norm();
        if a > 0.0 {
            let v = ((a.ln() - 0.5 * (l * l) as f64 * lnq) / l as f64).exp();
            s = s.max(v);
        }
    }
    Ok(GrowthType { s_estimate: s, confidence_window: (lo, hi) })
}

/// Constants and special functions for a fixed `(q, γ)`.
///
/// `c_q(γ) = ∫_γ e_{q²}(-x²)` and `b_q = ∫_1 E_{q²}(-q²x²)` are computed once by
/// direct Jackson summation when the family is built.
#[derive(Debug, Clone, Copy)]
pub struct GaussianFamily {
    ctx: QContext,
    gamma: f64,
    c_q: f64,
    b_q: f64,
}

impl GaussianFamily {
    pub fn new(ctx: QContext, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(QError::Domain(format!("gamma must be positive, got {gamma}")));
        }
        let c = ctx;
        let e = LatticeFunction::from_fn(gamma, Some("eq2_gaussian"), move |x| {
            gaussian(x, &c).unwrap_or(C64::new(f64::NAN, 0.0))
        });
        let c_q = q_integral(&e, &ctx)?.re;
        let b_q = q_integral(&Self::big_gaussian_fn(&ctx, 1.0), &ctx)?.re;
        Ok(GaussianFamily { ctx, gamma, c_q, b_q })
    }

    /// `E_{q²}(-q²x²)` on L(γ).
    pub fn big_gaussian_fn(ctx: &QContext, gamma: f64) -> LatticeFunction {
        let c = *ctx;
        let q = ctx.q();
        LatticeFunction::from_fn(gamma, Some("Eq2_gaussian"), move |x| {
            big_e_q(-(x * x) * (q * q), q * q, &c).unwrap_or(C64::new(f64::NAN, 0.0))
        })
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }
    pub fn q(&self) -> f64 {
        self.ctx.q()
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c_q(&self) -> f64 {
        self.c_q
    }
    pub fn b_q(&self) -> f64 {
        self.b_q
    }

    /// `e_{q²}(-x²)` itself.
    pub fn gaussian(&self) -> GaussianSeries {
        GaussianSeries::hermite_unit(0).with_gamma(self.gamma)
    }

    pub fn moments(&self, g: &GaussianSeries, up_to: usize) -> MomentSeries {
        gaussian_moments(g, self.gamma, self.c_q, up_to, self.q())
    }

    /// `g_m` in monomial coordinates through index `order`:
    /// `a_{2r} = (-1)^r q^{2r²-r+2mr} / ((q^{1+2m};q²)_r (q²;q²)_r)`.
    pub fn g_m(&self, m: usize, order: usize) -> GaussianSeries {
        let q = self.q();
        let q2 = q * q;
        let mut c = vec![ZERO; order + 1];
        for r in 0..=order / 2 {
            let (rr, mm) = (r as i64, m as i64);
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let v = sign * qpow(q, 2 * rr * rr - rr + 2 * mm * rr)
                / (poch_real(qpow(q, 1 + 2 * mm), q2, r) * poch_real(q2, q2, r));
            c[2 * r] = C64::new(v, 0.0);
        }
        GaussianSeries::monomial(c).with_gamma(self.gamma)
    }

    /// `g_m`, `m ≥ 1`, from its Hermite expansion
    /// `(q^{2m};q²)_∞/(q^{1+2m};q²)_∞ Σ_k (-1)^k q^{2mk+2k²-k} h̃_{2k}/(q²;q²)_k`.
    pub fn g_m_hermite(&self, m: usize, order: usize) -> Result<GaussianSeries> {
        if m == 0 {
            return Err(QError::Domain("the Hermite expansion of g_m needs m >= 1".into()));
        }
        let q = self.q();
        let q2 = q * q;
        let mm = m as i64;
        let pref = poch_inf_real(qpow(q, 2 * mm), q2, &self.ctx)? / poch_inf_real(qpow(q, 1 + 2 * mm), q2, &self.ctx)?;
        let mut c = vec![ZERO; order + 1];
        for k in 0..=order / 2 {
            let kk = k as i64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[2 * k] = C64::new(pref * sign * qpow(q, 2 * mm * kk + 2 * kk * kk - kk) / poch_real(q2, q2, k), 0.0);
        }
        Ok(GaussianSeries::hermite(c).with_gamma(self.gamma))
    }

    /// Closed form `μ_{2k}(g_m) = c_q q^{k²+k}(q;q²)_k (q^{2m-2k};q²)_∞/(q^{1+2m};q²)_∞`.
    pub fn g_m_moment(&self, m: usize, k: usize) -> Result<f64> {
        let q = self.q();
        let q2 = q * q;
        let (mm, kk) = (m as i64, k as i64);
        Ok(self.c_q * qpow(q, kk * kk + kk) * poch_real(q, q2, k)
            * poch_inf_real(qpow(q, 2 * mm - 2 * kk), q2, &self.ctx)?
            / poch_inf_real(qpow(q, 1 + 2 * mm), q2, &self.ctx)?)
    }

    /// `J^{(1)}_{m-1/2}(2x; q²)` read off from `g_m`, for `x > 0`.
    pub fn q_bessel_j1(&self, m: usize, x: f64, order: usize) -> Result<f64> {
        if !(x > 0.0) {
            return Err(QError::Domain("the q-Bessel accessor needs x > 0".into()));
        }
        let q = self.q();
        let q2 = q * q;
        let g = self.g_m(m, order).eval(C64::new(x, 0.0), &self.ctx)?.re;
        let ratio = poch_inf_real(qpow(q, 2 * m as i64 + 1), q2, &self.ctx)? / poch_inf_real(q2, q2, &self.ctx)?;
        Ok(g * ratio * x.powf(m as f64 - 0.5))
    }

    /// `∫_γ g_1`, by direct Jackson summation.
    pub fn g1_integral(&self) -> Result<f64> {
        let g1 = self.g_m_hermite(1, 48)?;
        Ok(q_integral(&g1.to_lattice_function(self.gamma, &self.ctx), &self.ctx)?.re)
    }

    /// The unit `u_γ = g_1 / ∫_γ g_1` in Hermite coordinates.
    pub fn unit_u(&self, order: usize) -> Result<GaussianSeries> {
        let g1 = self.g_m_hermite(1, order)?;
        Ok(g1.scale(C64::new(1.0 / self.g1_integral()?, 0.0)))
    }

    /// `G_{l,γ}` from the expansion
    /// `e/(c_q (q;q)_l) Σ_k (-1)^k q^{(2k+l)²/2+(2k-l)/2} h̃_{2k+l}/(q²;q²)_k`.
    pub fn g_k(&self, l: usize, order: usize) -> GaussianSeries {
        let q = self.q();
        let q2 = q * q;
        let mut c = vec![ZERO; order + 1];
        let base = 1.0 / (self.c_q * poch_real(q, q, l));
        let lnq = q.ln();
        let mut k = 0;
        while 2 * k + l <= order {
            let p = (2 * k + l) as f64;
            let expo = p * p / 2.0 + (2.0 * k as f64 - l as f64) / 2.0;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[2 * k + l] = C64::new(sign * base * (expo * lnq).exp() / poch_real(q2, q2, k), 0.0);
            k += 1;
        }
        GaussianSeries::hermite(c).with_gamma(self.gamma)
    }

    /// `G_{k,γ} = (-1)^k ∂^k u_γ / [k]_q!`, by Hermite differentiation of `u_γ`.
    pub fn g_k_by_derivative(&self, k: usize, order: usize) -> Result<GaussianSeries> {
        let q = self.q();
        let u = self.unit_u(order)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(u.derivative(k, q).scale(C64::new(sign / q_factorial(k, q), 0.0)).truncate(order + 1))
    }

    /// `Σ_k μ_k G_{k,γ}` in Hermite coordinates through index `min(order, N)`.
    pub fn reconstruct_from_moments(&self, m: &MomentSeries, order: usize) -> Result<GaussianSeries> {
        let q = self.q();
        let radius = generating_series(m, q).radius_estimate(self.ctx.rel_tol());
        if radius <= 1.0 / (1.0 - q) {
            return Err(QError::Radius(format!(
                "moment generating series radius ≈ {radius:.4} does not exceed (1-q)^-1 = {:.4}",
                1.0 / (1.0 - q)
            )));
        }
        Ok(self.assemble_g_expansion(m, order.min(m.order())))
    }

    /// Hermite coefficients `0..=order` of `Σ μ_k G_k`, unstored moments taken
    /// as zero: `q^{(p²-p)/2}/c_q Σ_j (-1)^j q^{2j} μ_{p-2j} / ((q²;q²)_j (q;q)_{p-2j})`.
    pub(crate) fn assemble_g_expansion(&self, m: &MomentSeries, order: usize) -> GaussianSeries {
        let q = self.q();
        let q2 = q * q;
        let lnq = q.ln();
        let mut c = vec![ZERO; order + 1];
        for (p, slot) in c.iter_mut().enumerate() {
            let mut acc = Accumulator::new();
            for j in 0..=p / 2 {
                let mu = m.get(p - 2 * j);
                if mu.norm() == 0.0 {
                    continue;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc.add(mu * (sign * qpow(q, 2 * j as i64) / (poch_real(q2, q2, j) * poch_real(q, q, p - 2 * j))));
            }
            let pf = (p * p) as f64 / 2.0 - p as f64 / 2.0;
            *slot = acc.value() * ((pf * lnq).exp() / self.c_q);
        }
        GaussianSeries::hermite(c).with_gamma(self.gamma)
    }
}

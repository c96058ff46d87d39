//! Truncated power series, moment sequences and their generating series, the
//! antipode and counit, and the twisted product m∘Ψ⁻¹.

use crate::error::{QError, Result};
use crate::lattice::{bilateral_sum, LatticeFunction};
use crate::qcore::{q_factorial, q_number, qpow, Accumulator, QContext, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Complex power series. `order` is the last trusted index; `None` marks an
/// exact polynomial whose missing coefficients are genuinely zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<C64>,
    order: Option<usize>,
}

fn min_order(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl PowerSeries {
    /// Series known through index `order`; absent coefficients up to `order`
    /// are zero, later ones unknown.
    pub fn new(mut coeffs: Vec<C64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        PowerSeries { coeffs, order: Some(order) }
    }

    pub fn polynomial(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        PowerSeries { coeffs, order: None }
    }

    pub fn from_real(coeffs: &[f64], order: Option<usize>) -> Self {
        let c = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
        match order {
            Some(n) => Self::new(c, n),
            None => Self::polynomial(c),
        }
    }

    pub fn one() -> Self {
        Self::polynomial(vec![C64::new(1.0, 0.0)])
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// Last stored index.
    pub fn top(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of coefficients to use when combining with `other`.
    fn joint_len(&self, other: &PowerSeries) -> (usize, Option<usize>) {
        let order = min_order(self.order, other.order);
        let len = match order {
            Some(n) => n + 1,
            None => self.coeffs.len().max(other.coeffs.len()),
        };
        (len, order)
    }

    fn build(coeffs: Vec<C64>, order: Option<usize>) -> Self {
        match order {
            Some(n) => Self::new(coeffs, n),
            None => Self::polynomial(coeffs),
        }
    }

    pub fn truncate(&self, n: usize) -> Self {
        let n = self.order.map_or(n, |o| o.min(n));
        Self::new(self.coeffs.iter().copied().take(n + 1).collect(), n)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * t + c)
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let (len, order) = self.joint_len(other);
        let c = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::build(c, order)
    }

    pub fn sub(&self, other: &PowerSeries) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::build(self.coeffs.iter().map(|&c| c * s).collect(), self.order)
    }

    pub fn mul(&self, other: &PowerSeries) -> Self {
        let order = min_order(self.order, other.order);
        let len = match order {
            Some(n) => n + 1,
            None => self.coeffs.len() + other.coeffs.len() - 1,
        };
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = Accumulator::new();
            for i in 0..=k.min(self.coeffs.len() - 1) {
                let j = k - i;
                if j < other.coeffs.len() {
                    acc.add(self.coeffs[i] * other.coeffs[j]);
                }
            }
            out.push(acc.value());
        }
        Self::build(out, order)
    }

    /// `1/f` through index `min(order, n)`.
    pub fn reciprocal(&self, n: usize, ctx: &QContext) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() <= ctx.rel_tol() {
            return Err(QError::NotInvertible(format!("constant term {a0} is numerically zero")));
        }
        let n = self.order.map_or(n, |o| o.min(n));
        let mut b = vec![ZERO; n + 1];
        b[0] = a0.inv();
        for k in 1..=n {
            let mut acc = Accumulator::new();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc.add(self.coeffs[i] * b[k - i]);
            }
            b[k] = -acc.value() / a0;
        }
        Ok(Self::new(b, n))
    }

    /// Coefficient-wise q-derivative: `∂ Σ a_n x^n = Σ [n+1]_q a_{n+1} x^n`.
    pub fn q_derivative(&self, q: f64) -> Self {
        if self.coeffs.len() <= 1 {
            return match self.order {
                Some(0) => Self::new(vec![], 0),
                _ => Self::polynomial(vec![ZERO]),
            };
        }
        let c = (1..self.coeffs.len()).map(|n| self.coeffs[n] * q_number(n as i64, q)).collect();
        Self::build(c, self.order.map(|o| o.saturating_sub(1)))
    }

    /// `Σ a_n x^n ↦ c + Σ a_n x^{n+1}/[n+1]_q`, the indefinite Jackson integral from 0.
    pub fn q_antiderivative(&self, q: f64, constant: C64) -> Self {
        let mut c = vec![constant];
        c.extend(self.coeffs.iter().enumerate().map(|(n, &a)| a / q_number(n as i64 + 1, q)));
        Self::build(c, self.order.map(|o| o + 1))
    }

    /// Antipode: `a_r ↦ (-1)^r q^{r(r-1)/2} a_r`.
    pub fn antipode(&self, q: f64) -> Self {
        self.map_indexed(|r, a| a * (sign(r) * qpow(q, (r * r.saturating_sub(1) / 2) as i64)))
    }

    /// Inverse antipode: `a_r ↦ (-1)^r q^{-r(r-1)/2} a_r`.
    pub fn antipode_inv(&self, q: f64) -> Self {
        self.map_indexed(|r, a| a * (sign(r) * qpow(q, -((r * r.saturating_sub(1) / 2) as i64))))
    }

    /// Counit: evaluation at 0.
    pub fn counit(&self) -> C64 {
        self.coeffs[0]
    }

    /// `(Q^p f)(x) = f(q^p x)`: `a_r ↦ q^{pr} a_r`.
    pub fn q_shift(&self, p: i64, q: f64) -> Self {
        self.map_indexed(|r, a| a * qpow(q, p * r as i64))
    }

    /// `f(c x)`.
    pub fn scale_arg(&self, c: C64) -> Self {
        let mut pw = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            out.push(a * pw);
            pw *= c;
        }
        Self::build(out, self.order)
    }

    fn map_indexed<F: Fn(usize, C64) -> C64>(&self, f: F) -> Self {
        Self::build(self.coeffs.iter().enumerate().map(|(r, &a)| f(r, a)).collect(), self.order)
    }

    /// True if the series is an exact polynomial or its stored tail vanishes.
    pub fn is_polynomial_like(&self, tol: f64) -> bool {
        if self.is_exact() {
            return true;
        }
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let n = self.coeffs.len();
        let tail = (n / 2).max(1);
        self.coeffs[n - tail..].iter().all(|c| c.norm() <= tol * scale)
    }

    /// Radius of convergence estimated from the upper half of the stored
    /// coefficients by a least-squares fit of `ln|a_k|` against `k`.
    /// Polynomial-like series report infinity.
    pub fn radius_estimate(&self, tol: f64) -> f64 {
        if self.is_polynomial_like(tol) {
            return f64::INFINITY;
        }
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let pts: Vec<(f64, f64)> = (n / 2..n)
            .filter(|&k| k > 0 && self.coeffs[k].norm() > tol * scale && self.coeffs[k].norm() > 0.0)
            .map(|k| (k as f64, self.coeffs[k].norm().ln()))
            .collect();
        if pts.len() < 2 {
            return f64::INFINITY;
        }
        (-least_squares_slope(&pts)).exp()
    }
}

fn sign(r: usize) -> f64 {
    if r % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Roots of `Σ c_k t^k` by Aberth–Ehrlich iteration, polished with Newton steps.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.len() > 1 && c.last().map_or(false, |z| z.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return vec![];
    }
    // factor out roots at zero
    let lead_zeros = c.iter().take_while(|z| z.norm() == 0.0).count();
    if lead_zeros > 0 {
        let mut r = vec![ZERO; lead_zeros];
        r.extend(polynomial_roots(&c[lead_zeros..]));
        return r;
    }
    let lead = c[deg];
    let monic: Vec<C64> = c.iter().map(|&z| z / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &a in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let bound = 1.0 + monic[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let r0 = monic[0].norm().powf(1.0 / deg as f64).min(bound).max(1e-3);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = ZERO;
            for j in 0..deg {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    z
}

/// Smallest root modulus of a polynomial; infinity when there are no roots.
pub fn min_root_modulus(coeffs: &[C64]) -> f64 {
    polynomial_roots(coeffs).iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// The moment sequence `μ_{k,γ}` and, optionally, the strict moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries {
    pub gamma: f64,
    pub moments: Vec<C64>,
    pub strict: Option<Vec<f64>>,
}

impl MomentSeries {
    pub fn new(gamma: f64, moments: Vec<C64>) -> Self {
        MomentSeries { gamma, moments, strict: None }
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn get(&self, k: usize) -> C64 {
        self.moments.get(k).copied().unwrap_or(ZERO)
    }

    pub fn scale(&self, s: C64) -> Self {
        MomentSeries::new(self.gamma, self.moments.iter().map(|&m| m * s).collect())
    }

    pub fn sub(&self, other: &MomentSeries) -> Self {
        let n = self.len().min(other.len());
        MomentSeries::new(self.gamma, (0..n).map(|k| self.get(k) - other.get(k)).collect())
    }

    /// Largest stored index.
    pub fn order(&self) -> usize {
        self.moments.len().saturating_sub(1)
    }
}

/// Moments `μ_e = q^{(e²+e)/2} ∫_γ f x^e` for `e ≤ up_to`, computed by direct
/// Jackson summation. `strict` also fills `q^{(e²+e)/2} ∫_γ |f x^e|`.
pub fn moments_of(f: &LatticeFunction, up_to: usize, strict: bool, ctx: &QContext) -> Result<MomentSeries> {
    let q = ctx.q();
    let g = f.gamma();
    let mut moments = Vec::with_capacity(up_to + 1);
    let mut strict_m = Vec::new();
    let weight = |sign: i8, k: i64, e: usize| -> f64 {
        let ee = e as i64;
        let s = if sign < 0 && e % 2 == 1 { -1.0 } else { 1.0 };
        s * (1.0 - q) * g.powi(e as i32 + 1) * qpow(q, k * (ee + 1) + (ee * ee + ee) / 2)
    };
    if let Some(entries) = f.table_entries() {
        for e in 0..=up_to {
            let mut acc = Accumulator::new();
            let mut abs = 0.0;
            for &(s, k, v) in &entries {
                let t = v * weight(s, k, e);
                abs += t.norm();
                acc.add(t);
            }
            moments.push(acc.value());
            strict_m.push(abs);
        }
    } else {
        // cache values: every moment reuses the same lattice samples
        let mut cache = std::collections::HashMap::new();
        for e in 0..=up_to {
            let mut val = |s: i8, k: i64| -> C64 { *cache.entry((s, k)).or_insert_with(|| f.at(s, k, q)) };
            let m = bilateral_sum(ctx, |s, k| val(s, k) * weight(s, k, e))?;
            moments.push(m);
            if strict {
                let a = bilateral_sum(ctx, |s, k| C64::new((val(s, k) * weight(s, k, e)).norm(), 0.0))?;
                strict_m.push(a.re);
            }
        }
    }
    Ok(MomentSeries { gamma: g, moments, strict: if strict { Some(strict_m) } else { None } })
}

/// `μ_γ(f)(t) = Σ μ_k t^k/[k]_q!`.
pub fn generating_series(m: &MomentSeries, q: f64) -> PowerSeries {
    let c = m.moments.iter().enumerate().map(|(k, &mu)| mu / q_factorial(k, q)).collect();
    PowerSeries::new(c, m.order())
}

/// Inverse of [`generating_series`]: `μ_k = [k]_q! · a_k`.
pub fn moments_from_generating(s: &PowerSeries, gamma: f64, q: f64) -> MomentSeries {
    let top = s.order().unwrap_or(s.top());
    MomentSeries::new(gamma, (0..=top).map(|k| s.coeff(k) * q_factorial(k, q)).collect())
}

pub fn antipode_s(f: &PowerSeries, q: f64) -> PowerSeries {
    f.antipode(q)
}

pub fn counit_eps(f: &PowerSeries) -> C64 {
    f.counit()
}

pub fn reciprocal(f: &PowerSeries, n: usize, ctx: &QContext) -> Result<PowerSeries> {
    f.reciprocal(n, ctx)
}

/// First index with `|μ_k| > rel_tol · max(1, max|μ|)`.
pub fn moment_valuation(m: &MomentSeries, ctx: &QContext) -> Option<usize> {
    let scale = m.moments.iter().map(|z| z.norm()).fold(1.0, f64::max);
    m.moments.iter().position(|z| z.norm() > ctx.rel_tol() * scale)
}

/// `d(f,g) = e^{-m(f-g)}`; zero when no stored moment of `f-g` is nonzero.
pub fn moment_metric(a: &MomentSeries, b: &MomentSeries, ctx: &QContext) -> f64 {
    match moment_valuation(&a.sub(b), ctx) {
        Some(k) => (-(k as f64)).exp(),
        None => 0.0,
    }
}

/// Coefficients `a_{nm}` of `Σ a_{nm} x^n y^m`, rectangular truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    coeffs: Vec<Vec<C64>>,
    orders: (usize, usize),
}

impl BivariateSeries {
    pub fn tensor(f: &PowerSeries, g: &PowerSeries) -> Self {
        let nx = f.order().unwrap_or(f.top());
        let ny = g.order().unwrap_or(g.top());
        let coeffs = (0..=nx).map(|n| (0..=ny).map(|m| f.coeff(n) * g.coeff(m)).collect()).collect();
        BivariateSeries { coeffs, orders: (nx, ny) }
    }

    pub fn orders(&self) -> (usize, usize) {
        self.orders
    }

    pub fn coeff(&self, n: usize, m: usize) -> C64 {
        self.coeffs.get(n).and_then(|r| r.get(m)).copied().unwrap_or(ZERO)
    }

    /// `m∘Ψ⁻¹`: the diagonal sum `Σ_t x^t Σ_{n+m=t} a_{nm} q^{-nm}`, kept up
    /// to the smaller of the two truncation orders.
    pub fn twisted_diagonal(&self, q: f64) -> PowerSeries {
        let top = self.orders.0.min(self.orders.1);
        let mut out = Vec::with_capacity(top + 1);
        for t in 0..=top {
            let mut acc = Accumulator::new();
            for n in 0..=t {
                let m = t - n;
                acc.add(self.coeff(n, m) * qpow(q, -((n * m) as i64)));
            }
            out.push(acc.value());
        }
        PowerSeries::new(out, top)
    }
}

/// `m∘Ψ⁻¹(F ⊗ G)`: coefficient of `x^t` is `Σ_{m+n=t} a_m b_n q^{-nm}`.
/// Exact polynomials contribute no truncation of their own.
pub fn psi_inverse_product(f: &PowerSeries, g: &PowerSeries, ctx: &QContext) -> PowerSeries {
    let q = ctx.q();
    let top = match (f.order(), g.order()) {
        (None, None) => f.top() + g.top(),
        (a, b) => a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX)),
    };
    let mut out = Vec::with_capacity(top + 1);
    for t in 0..=top {
        let mut acc = Accumulator::new();
        for n in 0..=t.min(f.top()) {
            let m = t - n;
            if m > g.top() {
                continue;
            }
            acc.add(f.coeff(n) * g.coeff(m) * qpow(q, -((n * m) as i64)));
        }
        out.push(acc.value());
    }
    PowerSeries::build(out, if f.is_exact() && g.is_exact() { None } else { Some(top) })
}

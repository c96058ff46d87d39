//! Functions on the lattice L(γ) = {±q^k γ}: Jackson integrals, q-derivatives
//! (single step and Ryde's closed form), q-shifts and discrete deltas.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{QError, Result};
use crate::qcore::{poch_inf, q_binomial, qpow, Accumulator, QContext, TailMonitor, C64};

/// The point `sign · q^k · γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub sign: i8,
    pub k: i64,
    pub gamma: f64,
}

impl LatticePoint {
    pub fn new(sign: i8, k: i64, gamma: f64) -> Result<Self> {
        check_sign(sign)?;
        check_gamma(gamma)?;
        Ok(LatticePoint { sign, k, gamma })
    }

    pub fn value(&self, q: f64) -> f64 {
        self.sign as f64 * qpow(q, self.k) * self.gamma
    }

    /// The point `q^j` times this one.
    pub fn scaled(&self, j: i64) -> Self {
        LatticePoint { k: self.k + j, ..*self }
    }
}

/// All points `±q^k γ` with `k` in `ks`, positive sign first.
pub fn lattice_window(gamma: f64, ks: std::ops::RangeInclusive<i64>) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        for k in ks.clone() {
            out.push(LatticePoint { sign, k, gamma });
        }
    }
    out
}

fn check_sign(sign: i8) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(QError::Domain(format!("lattice sign must be +1 or -1, got {sign}")))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(QError::Domain(format!("gamma must be positive, got {gamma}")))
    }
}

pub(crate) fn same_gamma(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

pub type Evaluator = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

#[derive(Clone)]
enum Rule {
    Closure(Evaluator),
    Table(BTreeMap<(i8, i64), C64>),
}

/// A function on L(γ), given by a closed form or by a finite table that is
/// zero off its entries.
#[derive(Clone)]
pub struct LatticeFunction {
    gamma: f64,
    rule: Rule,
    label: Option<String>,
}

impl fmt::Debug for LatticeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("LatticeFunction");
        d.field("gamma", &self.gamma).field("label", &self.label);
        if let Rule::Table(t) = &self.rule {
            d.field("table", t);
        }
        d.finish()
    }
}

impl LatticeFunction {
    pub fn from_fn<F>(gamma: f64, label: Option<&str>, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        LatticeFunction { gamma, rule: Rule::Closure(Arc::new(f)), label: label.map(String::from) }
    }

    /// Table-backed function; repeated points are summed.
    pub fn from_table<I>(gamma: f64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i8, i64, C64)>,
    {
        check_gamma(gamma)?;
        let mut table = BTreeMap::new();
        for (sign, k, v) in entries {
            check_sign(sign)?;
            *table.entry((sign, k)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        Ok(LatticeFunction { gamma, rule: Rule::Table(table), label: None })
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Nonzero table entries as `(sign, k, value)`, or `None` for closures.
    pub fn table_entries(&self) -> Option<Vec<(i8, i64, C64)>> {
        match &self.rule {
            Rule::Table(t) => Some(t.iter().map(|(&(s, k), &v)| (s, k, v)).collect()),
            Rule::Closure(_) => None,
        }
    }

    /// Value at the lattice point `sign · q^k · γ`.
    pub fn at(&self, sign: i8, k: i64, q: f64) -> C64 {
        match &self.rule {
            Rule::Closure(f) => f(C64::new(sign as f64 * qpow(q, k) * self.gamma, 0.0)),
            Rule::Table(t) => t.get(&(sign, k)).copied().unwrap_or(C64::new(0.0, 0.0)),
        }
    }

    /// Value at an arbitrary point. Tables only accept lattice points.
    pub fn eval(&self, x: C64, q: f64) -> Result<C64> {
        match &self.rule {
            Rule::Closure(f) => Ok(f(x)),
            Rule::Table(_) => {
                let p = locate(x, self.gamma, q).ok_or_else(|| {
                    QError::Domain(format!("{x} is not a point of L({})", self.gamma))
                })?;
                Ok(self.at(p.sign, p.k, q))
            }
        }
    }

    /// `(Q^p f)(x) = f(q^p x)`. Tables move their indices down by `p`.
    pub fn shift(&self, p: i64, q: f64) -> LatticeFunction {
        match &self.rule {
            Rule::Closure(f) => {
                let f = f.clone();
                let s = qpow(q, p);
                LatticeFunction {
                    gamma: self.gamma,
                    rule: Rule::Closure(Arc::new(move |x| f(x * s))),
                    label: self.label.clone(),
                }
            }
            Rule::Table(t) => LatticeFunction {
                gamma: self.gamma,
                rule: Rule::Table(t.iter().map(|(&(s, k), &v)| ((s, k - p), v)).collect()),
                label: self.label.clone(),
            },
        }
    }

    pub fn scale(&self, c: C64) -> LatticeFunction {
        match &self.rule {
            Rule::Closure(f) => {
                let f = f.clone();
                LatticeFunction {
                    gamma: self.gamma,
                    rule: Rule::Closure(Arc::new(move |x| c * f(x))),
                    label: self.label.clone(),
                }
            }
            Rule::Table(t) => LatticeFunction {
                gamma: self.gamma,
                rule: Rule::Table(t.iter().map(|(&key, &v)| (key, c * v)).collect()),
                label: self.label.clone(),
            },
        }
    }
}

/// Lattice coordinates of `x` on L(γ), if it is (to rounding) a lattice point.
pub fn locate(x: C64, gamma: f64, q: f64) -> Option<LatticePoint> {
    if x.im.abs() > 1e-12 * x.norm() || x.re == 0.0 {
        return None;
    }
    let sign = if x.re > 0.0 { 1 } else { -1 };
    let kf = (x.re.abs() / gamma).ln() / q.ln();
    let k = kf.round();
    let back = qpow(q, k as i64) * gamma;
    if (back - x.re.abs()).abs() <= 1e-10 * back {
        Some(LatticePoint { sign, k: k as i64, gamma })
    } else {
        None
    }
}

/// Bilateral sum over `k ∈ Z`, `ε = ±1` of `term(ε, k)`.
///
/// Each direction in `k` is extended until `tail_window` consecutive levels
/// are below `rel_tol` times the running sum of magnitudes.
pub fn bilateral_sum<F>(ctx: &QContext, mut term: F) -> Result<C64>
where
    F: FnMut(i8, i64) -> C64,
{
    let mut acc = Accumulator::new();
    for dir in [1i64, -1] {
        let start = if dir == 1 { 0 } else { -1 };
        let mut mon = TailMonitor::new(ctx);
        let mut done = false;
        for step in 0..ctx.max_terms() as i64 {
            let k = start + dir * step;
            let a = term(1, k);
            let b = term(-1, k);
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                return Err(QError::Truncation(format!("non-finite integrand at lattice index {k}")));
            }
            acc.add(a);
            acc.add(b);
            let level = a.norm() + b.norm();
            if mon.push(level <= ctx.rel_tol() * acc.abs_sum()) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(QError::Truncation(format!(
                "lattice sum did not settle toward k = {}∞ within {} terms",
                if dir == 1 { "+" } else { "-" },
                ctx.max_terms()
            )));
        }
    }
    Ok(acc.value())
}

/// One-sided sum over `k ≥ 0`, `ε = ±1`.
pub fn unilateral_sum<F>(ctx: &QContext, mut term: F) -> Result<C64>
where
    F: FnMut(i8, i64) -> C64,
{
    let mut acc = Accumulator::new();
    let mut mon = TailMonitor::new(ctx);
    for k in 0..ctx.max_terms() as i64 {
        let a = term(1, k);
        let b = term(-1, k);
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(QError::Truncation(format!("non-finite integrand at lattice index {k}")));
        }
        acc.add(a);
        acc.add(b);
        if mon.push(a.norm() + b.norm() <= ctx.rel_tol() * acc.abs_sum()) {
            return Ok(acc.value());
        }
    }
    Err(QError::Truncation(format!("interval sum did not settle within {} terms", ctx.max_terms())))
}

/// Jackson integral `(1-q) Σ_{k,ε} q^k γ f(ε q^k γ)` over L(γ).
pub fn q_integral(f: &LatticeFunction, ctx: &QContext) -> Result<C64> {
    let q = ctx.q();
    let g = f.gamma;
    if let Some(entries) = f.table_entries() {
        let mut acc = Accumulator::new();
        for (_, k, v) in entries {
            acc.add(v * ((1.0 - q) * qpow(q, k) * g));
        }
        return Ok(acc.value());
    }
    // Sum over the representative γ₀ ∈ (q, 1] so that every γ of the same
    // lattice visits the same points in the same order.
    let j = (g.ln() / q.ln()).floor() as i64;
    let g0 = g * qpow(q, -j);
    let g0 = if g0 > 1.0 { g0 * q } else if g0 <= q { g0 / q } else { g0 };
    let f0 = LatticeFunction { gamma: g0, rule: f.rule.clone(), label: None };
    bilateral_sum(ctx, |s, k| f0.at(s, k, q) * ((1.0 - q) * qpow(q, k) * g0))
}

/// Jackson integral over (-1, 1): `(1-q) Σ_{k≥0,ε} q^k f(ε q^k)`.
pub fn q_integral_unit<F>(f: F, ctx: &QContext) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let q = ctx.q();
    unilateral_sum(ctx, |s, k| {
        let w = qpow(q, k);
        f(s as f64 * w) * ((1.0 - q) * w)
    })
}

/// Single-step q-derivative `(f(x) - f(qx)) / ((1-q) x)`.
pub fn q_derivative<F>(f: F, x: C64, ctx: &QContext) -> Result<C64>
where
    F: Fn(C64) -> C64,
{
    if x.norm() == 0.0 {
        return Err(QError::Domain("lattice q-derivative is undefined at x = 0".into()));
    }
    let q = ctx.q();
    Ok((f(x) - f(x * q)) / (x * (1.0 - q)))
}

/// Coefficients of Ryde's formula: `∂^n f(x) = Σ_j w_j f(q^j x)`.
pub fn ryde_weights(n: usize, x: C64, q: f64) -> Result<Vec<C64>> {
    if x.norm() == 0.0 {
        return Err(QError::Domain("Ryde's formula is undefined at x = 0".into()));
    }
    let pre = (x * (1.0 - q)).powi(-(n as i32));
    let mut w = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let jj = j as i64;
        let nn = n as i64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let expo = -jj * (nn - jj) - jj * (jj - 1) / 2;
        w.push(pre * (sign * q_binomial(n, j, q)? * qpow(q, expo)));
    }
    Ok(w)
}

/// `∂^n f(x)` by Ryde's formula.
pub fn q_derivative_n<F>(f: F, x: C64, n: usize, ctx: &QContext) -> Result<C64>
where
    F: Fn(C64) -> C64,
{
    if n == 0 {
        return Ok(f(x));
    }
    let q = ctx.q();
    let w = ryde_weights(n, x, q)?;
    let mut acc = Accumulator::new();
    for (j, wj) in w.into_iter().enumerate() {
        let v = f(x * qpow(q, j as i64));
        if v != C64::new(0.0, 0.0) {
            acc.add(wj * v);
        }
    }
    Ok(acc.value())
}

/// `∂^n f` at a lattice point, reading `f` on the lattice only.
pub fn q_derivative_n_at(f: &LatticeFunction, p: LatticePoint, n: usize, ctx: &QContext) -> Result<C64> {
    if !same_gamma(f.gamma, p.gamma) {
        return Err(QError::Mismatch(format!("point on L({}) but function on L({})", p.gamma, f.gamma)));
    }
    let q = ctx.q();
    let x = C64::new(p.value(q), 0.0);
    let w = ryde_weights(n, x, q)?;
    let mut acc = Accumulator::new();
    for (j, wj) in w.into_iter().enumerate() {
        let v = f.at(p.sign, p.k + j as i64, q);
        if v != C64::new(0.0, 0.0) {
            acc.add(wj * v);
        }
    }
    Ok(acc.value())
}

/// `(Q^p f)(x) = f(q^p x)`.
pub fn q_shift(f: &LatticeFunction, p: i64, ctx: &QContext) -> LatticeFunction {
    f.shift(p, ctx.q())
}

/// The discrete delta `δ_{sign·γ q^p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteDelta {
    pub sign: i8,
    pub p: i64,
    pub gamma: f64,
}

impl DiscreteDelta {
    pub fn new(sign: i8, p: i64, gamma: f64) -> Result<Self> {
        check_sign(sign)?;
        check_gamma(gamma)?;
        Ok(DiscreteDelta { sign, p, gamma })
    }

    pub fn support(&self) -> LatticePoint {
        LatticePoint { sign: self.sign, k: self.p, gamma: self.gamma }
    }

    pub fn to_lattice_function(&self) -> LatticeFunction {
        LatticeFunction::from_table(self.gamma, [(self.sign, self.p, C64::new(1.0, 0.0))])
            .expect("validated delta")
            .with_label("delta")
    }

    /// `Q^j δ_{ηγq^t} = δ_{ηγq^{t-j}}`.
    pub fn shift(&self, j: i64) -> DiscreteDelta {
        DiscreteDelta { p: self.p - j, ..*self }
    }

    /// `μ_k(δ_{ηγq^n}) = (1-q) η^k q^{(k²+k)/2} γ^{k+1} q^{n(k+1)}`.
    pub fn moment(&self, k: usize, q: f64) -> f64 {
        let kk = k as i64;
        let sign = if self.sign < 0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * (1.0 - q) * self.gamma.powi(k as i32 + 1) * qpow(q, (kk * kk + kk) / 2 + self.p * (kk + 1))
    }
}

/// Closed-form `(δ_{εγq^t} * δ_{ηγq^s})(θγq^l)`.
pub fn delta_convolve(d1: &DiscreteDelta, d2: &DiscreteDelta, x: LatticePoint, ctx: &QContext) -> Result<C64> {
    if !same_gamma(d1.gamma, d2.gamma) || !same_gamma(d1.gamma, x.gamma) {
        return Err(QError::Mismatch(format!(
            "deltas on L({}) and L({}) evaluated on L({})",
            d1.gamma, d2.gamma, x.gamma
        )));
    }
    let q = ctx.q();
    let (eps, t) = (d1.sign as f64, d1.p);
    let (eta, s) = (d2.sign as f64, d2.p);
    let l = x.k;
    if x.sign != d2.sign || l > s {
        return Ok(C64::new(0.0, 0.0));
    }
    let ee = eta * eps;
    if ee > 0.0 && l > t {
        return Ok(C64::new(0.0, 0.0));
    }
    let j = (s - l) as usize;
    let expo = (t + s - l) + (s - l) * (t - l);
    let sign = if ee < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
    let tail = poch_inf(C64::new(ee * qpow(q, t - l + 1), 0.0), q, ctx)?;
    let qq = crate::qcore::poch_real(q, q, j);
    Ok(tail * (d1.gamma * (1.0 - q) * sign * qpow(q, expo) / qq))
}

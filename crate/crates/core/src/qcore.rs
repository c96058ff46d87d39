//! q-arithmetic primitives: Pochhammer symbols, q-numbers, q-binomials and
//! the two q-exponentials, together with the numeric policy shared by every
//! truncated sum and product in the crate.

use crate::error::{QError, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Base `q` plus the truncation policy for infinite sums and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    rel_tol: f64,
    max_terms: usize,
    tail_window: usize,
}

impl QContext {
    pub const DEFAULT_REL_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 512;
    pub const DEFAULT_TAIL_WINDOW: usize = 8;

    pub fn new(q: f64) -> Result<Self> {
        Self::with_policy(
            q,
            Self::DEFAULT_REL_TOL,
            Self::DEFAULT_MAX_TERMS,
            Self::DEFAULT_TAIL_WINDOW,
        )
    }

    pub fn with_policy(q: f64, rel_tol: f64, max_terms: usize, tail_window: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidContext(format!("q must lie in (0,1), got {q}")));
        }
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(QError::InvalidContext(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms < 16 {
            return Err(QError::InvalidContext(format!("max_terms must be at least 16, got {max_terms}")));
        }
        if tail_window == 0 {
            return Err(QError::InvalidContext("tail_window must be positive".into()));
        }
        Ok(QContext { q, rel_tol, max_terms, tail_window })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
    pub fn tail_window(&self) -> usize {
        self.tail_window
    }

    /// Same policy with a different base, used for q² families.
    pub fn with_base(&self, base: f64) -> Result<Self> {
        Self::with_policy(base, self.rel_tol, self.max_terms, self.tail_window)
    }

    /// `q^n` for integer `n`, exact in the sense of repeated multiplication.
    pub fn pow(&self, n: i64) -> f64 {
        qpow(self.q, n)
    }

    pub fn poch(&self, a: C64, k: usize) -> C64 {
        poch(a, self.q, k)
    }
    pub fn poch_inf(&self, a: C64) -> Result<C64> {
        poch_inf(a, self.q, self)
    }
    pub fn q_number(&self, k: i64) -> f64 {
        q_number(k, self.q)
    }
    pub fn q_factorial(&self, k: usize) -> f64 {
        q_factorial(k, self.q)
    }
    pub fn q_binomial(&self, n: usize, k: usize) -> Result<f64> {
        q_binomial(n, k, self.q)
    }
    pub fn e_q(&self, x: C64) -> Result<C64> {
        e_q(x, self.q, self)
    }
    #[allow(non_snake_case)]
    pub fn E_q(&self, x: C64) -> Result<C64> {
        big_e_q(x, self.q, self)
    }
}

/// `q^n` for integer exponents of either sign.
pub fn qpow(q: f64, n: i64) -> f64 {
    if n >= 0 && n <= i32::MAX as i64 {
        q.powi(n as i32)
    } else if n < 0 && n >= i32::MIN as i64 {
        q.powi(n as i32)
    } else {
        q.powf(n as f64)
    }
}

/// Finite Pochhammer symbol `(a; base)_k`.
pub fn poch(a: C64, base: f64, k: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    let mut t = a;
    for _ in 0..k {
        p *= C64::new(1.0, 0.0) - t;
        t *= base;
    }
    p
}

/// Real finite Pochhammer symbol `(a; base)_k`.
pub fn poch_real(a: f64, base: f64, k: usize) -> f64 {
    let mut p = 1.0;
    let mut t = a;
    for _ in 0..k {
        p *= 1.0 - t;
        t *= base;
    }
    p
}

/// Tracks the "tail_window consecutive small increments" stopping rule.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailMonitor {
    window: usize,
    run: usize,
}

impl TailMonitor {
    pub(crate) fn new(ctx: &QContext) -> Self {
        TailMonitor { window: ctx.tail_window, run: 0 }
    }
    /// Feeds one observation; returns true once the window is full.
    pub(crate) fn push(&mut self, small: bool) -> bool {
        if small {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= self.window
    }
}

fn factor_vanishes(t: C64) -> bool {
    let d = C64::new(1.0, 0.0) - t;
    d.norm() <= 8.0 * f64::EPSILON * t.norm().max(1.0)
}

/// Infinite Pochhammer symbol `(a; base)_∞`.
///
/// Factors that vanish to rounding are treated as exact zeros, so the product
/// is exactly zero on the zero set of `E_q`.
pub fn poch_inf(a: C64, base: f64, ctx: &QContext) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    let mut mon = TailMonitor::new(ctx);
    for j in 0..ctx.max_terms {
        let t = a * qpow(base, j as i64);
        if factor_vanishes(t) {
            return Ok(C64::new(0.0, 0.0));
        }
        p *= C64::new(1.0, 0.0) - t;
        if mon.push(t.norm() < ctx.rel_tol) {
            return Ok(p);
        }
    }
    Err(QError::Truncation(format!(
        "(a;q)_inf with |a|={} did not settle within {} factors",
        a.norm(),
        ctx.max_terms
    )))
}

/// Real infinite Pochhammer symbol.
pub fn poch_inf_real(a: f64, base: f64, ctx: &QContext) -> Result<f64> {
    poch_inf(C64::new(a, 0.0), base, ctx).map(|z| z.re)
}

/// `[k]_q = (1 - q^k)/(1 - q)`, defined for negative `k` as well.
pub fn q_number(k: i64, q: f64) -> f64 {
    (1.0 - qpow(q, k)) / (1.0 - q)
}

/// `[k]_q! = (q;q)_k / (1-q)^k`.
pub fn q_factorial(k: usize, q: f64) -> f64 {
    (1..=k as i64).map(|j| q_number(j, q)).product()
}

/// Gaussian binomial `(q;q)_n / ((q;q)_k (q;q)_{n-k})`.
pub fn q_binomial(n: usize, k: usize, q: f64) -> Result<f64> {
    if k > n {
        return Err(QError::Domain(format!("q_binomial needs k <= n, got n={n}, k={k}")));
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for j in 0..k {
        r *= (1.0 - qpow(q, (n - j) as i64)) / (1.0 - qpow(q, (j + 1) as i64));
    }
    Ok(r)
}

/// `e_q(x) = 1/(x; q)_∞`, evaluated by the product for every non-pole `x`.
pub fn e_q(x: C64, base: f64, ctx: &QContext) -> Result<C64> {
    let mut p = C64::new(1.0, 0.0);
    let mut mon = TailMonitor::new(ctx);
    for j in 0..ctx.max_terms {
        let t = x * qpow(base, j as i64);
        let f = C64::new(1.0, 0.0) - t;
        if f.norm() < ctx.rel_tol {
            return Err(QError::Pole(format!("e_q({x}) is within {} of the pole q^-{j}", ctx.rel_tol)));
        }
        p *= f;
        if mon.push(t.norm() < ctx.rel_tol) {
            return Ok(p.inv());
        }
    }
    Err(QError::Truncation(format!("e_q({x}) did not settle within {} factors", ctx.max_terms)))
}

/// `E_q(x) = (-x; q)_∞`, entire in `x`.
pub fn big_e_q(x: C64, base: f64, ctx: &QContext) -> Result<C64> {
    poch_inf(-x, base, ctx)
}

/// Neumaier-compensated complex accumulator that also tracks the sum of
/// magnitudes and the largest single term.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    abs_sum: f64,
    max_term: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
        let n = z.norm();
        self.abs_sum += n;
        if n > self.max_term {
            self.max_term = n;
        }
    }
    pub fn value(&self) -> C64 {
        C64::new(self.re + self.re_c, self.im + self.im_c)
    }
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
    pub fn max_term(&self) -> f64 {
        self.max_term
    }
}

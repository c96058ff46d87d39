//! A single function type covering every representation the convolution,
//! Fourier and solver routines accept.

use crate::error::{QError, Result};
use crate::gaussian::{GaussianFamily, GaussianSeries};
use crate::lattice::{locate, q_derivative_n, same_gamma, DiscreteDelta, LatticeFunction};
use crate::qcore::{e_q, qpow, QContext, C64};
use crate::series::{moments_of, MomentSeries, PowerSeries};

/// A function on the lattice, in the most exact representation available.
#[derive(Debug, Clone)]
pub enum QFunction {
    /// Polynomial (or entire) factor times `e_{q²}(-x²)`.
    Gaussian(GaussianSeries),
    /// Power series in `x`, evaluated by its truncation.
    Power(PowerSeries),
    /// `e_q(a x)`.
    QExp { a: C64 },
    Lattice(LatticeFunction),
    Delta(DiscreteDelta),
    /// `scale · (Q^p inner)(x) = scale · inner(q^p x)`.
    Shifted { p: i64, scale: C64, inner: Box<QFunction> },
    /// Finite linear combination.
    Sum(Vec<(C64, QFunction)>),
}

impl From<GaussianSeries> for QFunction {
    fn from(g: GaussianSeries) -> Self {
        QFunction::Gaussian(g)
    }
}

impl From<PowerSeries> for QFunction {
    fn from(p: PowerSeries) -> Self {
        QFunction::Power(p)
    }
}

impl From<DiscreteDelta> for QFunction {
    fn from(d: DiscreteDelta) -> Self {
        QFunction::Delta(d)
    }
}

impl From<LatticeFunction> for QFunction {
    fn from(f: LatticeFunction) -> Self {
        QFunction::Lattice(f)
    }
}

impl QFunction {
    pub fn kind(&self) -> &'static str {
        match self {
            QFunction::Gaussian(_) => "gaussian_series",
            QFunction::Power(_) => "power_series",
            QFunction::QExp { .. } => "q_exponential",
            QFunction::Lattice(_) => "lattice",
            QFunction::Delta(_) => "delta",
            QFunction::Shifted { .. } => "shifted",
            QFunction::Sum(_) => "sum",
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianSeries> {
        match self {
            QFunction::Gaussian(g) => Some(g),
            _ => None,
        }
    }

    pub fn eval(&self, x: C64, ctx: &QContext) -> Result<C64> {
        let q = ctx.q();
        match self {
            QFunction::Gaussian(g) => g.eval(x, ctx),
            QFunction::Power(p) => Ok(p.eval(x)),
            QFunction::QExp { a } => e_q(*a * x, q, ctx),
            QFunction::Lattice(f) => f.eval(x, q),
            QFunction::Delta(d) => Ok(match locate(x, d.gamma, q) {
                Some(p) if p.sign == d.sign && p.k == d.p => C64::new(1.0, 0.0),
                _ => C64::new(0.0, 0.0),
            }),
            QFunction::Shifted { p, scale, inner } => Ok(*scale * inner.eval(x * qpow(q, *p), ctx)?),
            QFunction::Sum(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += *c * f.eval(x, ctx)?;
                }
                Ok(s)
            }
        }
    }

    /// `∂^n f(x)`: exact for Gaussian series, power series and q-exponentials,
    /// Ryde's formula on lattice values otherwise.
    pub fn derivative_at(&self, n: usize, x: C64, ctx: &QContext) -> Result<C64> {
        if n == 0 {
            return self.eval(x, ctx);
        }
        let q = ctx.q();
        match self {
            QFunction::Gaussian(g) => g.derivative(n, q).eval(x, ctx),
            QFunction::Power(p) => {
                let mut d = p.clone();
                for _ in 0..n {
                    d = d.q_derivative(q);
                }
                Ok(d.eval(x))
            }
            QFunction::QExp { a } => Ok((*a / (1.0 - q)).powi(n as i32) * e_q(*a * x, q, ctx)?),
            QFunction::Shifted { p, scale, inner } => {
                Ok(*scale * qpow(q, p * n as i64) * inner.derivative_at(n, x * qpow(q, *p), ctx)?)
            }
            QFunction::Sum(terms) => {
                let mut s = C64::new(0.0, 0.0);
                for (c, f) in terms {
                    s += *c * f.derivative_at(n, x, ctx)?;
                }
                Ok(s)
            }
            QFunction::Lattice(_) | QFunction::Delta(_) => {
                let f = |z: C64| self.eval(z, ctx).unwrap_or(C64::new(f64::NAN, 0.0));
                q_derivative_n(f, x, n, ctx)
            }
        }
    }

    /// Moments on the family's lattice: closed forms where they exist, direct
    /// Jackson summation otherwise.
    pub fn moments(&self, fam: &GaussianFamily, up_to: usize) -> Result<MomentSeries> {
        let gamma = fam.gamma();
        let q = fam.q();
        match self {
            QFunction::Gaussian(g) => Ok(fam.moments(g, up_to)),
            QFunction::Delta(d) => {
                if !same_gamma(d.gamma, gamma) {
                    return Err(QError::Mismatch(format!("delta on L({}) integrated on L({gamma})", d.gamma)));
                }
                Ok(MomentSeries::new(gamma, (0..=up_to).map(|k| C64::new(d.moment(k, q), 0.0)).collect()))
            }
            QFunction::Shifted { p, scale, inner } => {
                let m = inner.moments(fam, up_to)?;
                let v = m
                    .moments
                    .iter()
                    .enumerate()
                    .map(|(l, &mu)| mu * *scale * qpow(q, -p * (l as i64 + 1)))
                    .collect();
                Ok(MomentSeries::new(gamma, v))
            }
            QFunction::Sum(terms) => {
                let mut acc = vec![C64::new(0.0, 0.0); up_to + 1];
                for (c, f) in terms {
                    let m = f.moments(fam, up_to)?;
                    for (slot, mu) in acc.iter_mut().zip(m.moments) {
                        *slot += *c * mu;
                    }
                }
                Ok(MomentSeries::new(gamma, acc))
            }
            QFunction::Lattice(f) if f.table_entries().is_some() => {
                if !same_gamma(f.gamma(), gamma) {
                    return Err(QError::Mismatch(format!("table on L({}) integrated on L({gamma})", f.gamma())));
                }
                moments_of(f, up_to, false, fam.ctx())
            }
            _ => moments_of(&self.to_lattice_function(gamma, fam.ctx()), up_to, false, fam.ctx()),
        }
    }

    /// The function restricted to L(γ). Tables keep their own entries.
    pub fn to_lattice_function(&self, gamma: f64, ctx: &QContext) -> LatticeFunction {
        match self {
            QFunction::Lattice(f) if f.table_entries().is_some() => f.clone(),
            QFunction::Delta(d) => d.to_lattice_function(),
            _ => {
                let f = self.clone();
                let c = *ctx;
                LatticeFunction::from_fn(gamma, Some(self.kind()), move |x| {
                    f.eval(x, &c).unwrap_or(C64::new(f64::NAN, 0.0))
                })
            }
        }
    }

    /// `Q^p f`, kept in the original representation when it is closed under Q.
    pub fn q_shift(&self, p: i64, q: f64) -> QFunction {
        match self {
            QFunction::Power(s) => QFunction::Power(s.q_shift(p, q)),
            QFunction::QExp { a } => QFunction::QExp { a: *a * qpow(q, p) },
            QFunction::Lattice(f) => QFunction::Lattice(f.shift(p, q)),
            QFunction::Delta(d) => QFunction::Delta(d.shift(p)),
            QFunction::Shifted { p: p0, scale, inner } => {
                QFunction::Shifted { p: p0 + p, scale: *scale, inner: inner.clone() }
            }
            QFunction::Sum(t) => QFunction::Sum(t.iter().map(|(c, f)| (*c, f.q_shift(p, q))).collect()),
            QFunction::Gaussian(_) => {
                QFunction::Shifted { p, scale: C64::new(1.0, 0.0), inner: Box::new(self.clone()) }
            }
        }
    }

    pub fn scale(&self, s: C64) -> QFunction {
        match self {
            QFunction::Gaussian(g) => QFunction::Gaussian(g.scale(s)),
            QFunction::Power(p) => QFunction::Power(p.scale(s)),
            QFunction::Shifted { p, scale, inner } => QFunction::Shifted { p: *p, scale: *scale * s, inner: inner.clone() },
            _ => QFunction::Sum(vec![(s, self.clone())]),
        }
    }

    /// `x · f(x)`, for representations closed under multiplication by `x`.
    pub fn times_x(&self, q: f64) -> Result<QFunction> {
        match self {
            QFunction::Gaussian(g) => Ok(QFunction::Gaussian(g.times_x(q))),
            QFunction::Power(p) => {
                let mut c = vec![C64::new(0.0, 0.0)];
                c.extend_from_slice(p.coeffs());
                Ok(QFunction::Power(match p.order() {
                    Some(n) => PowerSeries::new(c, n + 1),
                    None => PowerSeries::polynomial(c),
                }))
            }
            QFunction::Shifted { p, scale, inner } => Ok(QFunction::Shifted {
                p: *p,
                scale: *scale * qpow(q, -p),
                inner: Box::new(inner.times_x(q)?),
            }),
            QFunction::Sum(t) => {
                let mut out = Vec::with_capacity(t.len());
                for (c, f) in t {
                    out.push((*c, f.times_x(q)?));
                }
                Ok(QFunction::Sum(out))
            }
            _ => Err(QError::Domain(format!("multiplication by x is not available for {}", self.kind()))),
        }
    }
}

/// `cos_q(x) = (e_q(ix) + e_q(-ix))/2`.
pub fn cos_q() -> QFunction {
    QFunction::Sum(vec![
        (C64::new(0.5, 0.0), QFunction::QExp { a: C64::new(0.0, 1.0) }),
        (C64::new(0.5, 0.0), QFunction::QExp { a: C64::new(0.0, -1.0) }),
    ])
}

/// `sin_q(x) = (e_q(ix) - e_q(-ix))/(2i)`.
pub fn sin_q() -> QFunction {
    QFunction::Sum(vec![
        (C64::new(0.0, -0.5), QFunction::QExp { a: C64::new(0.0, 1.0) }),
        (C64::new(0.0, 0.5), QFunction::QExp { a: C64::new(0.0, -1.0) }),
    ])
}

/// `E_{q²}(-q²x²)` as a closure on L(γ).
pub fn big_gaussian(ctx: &QContext, gamma: f64) -> QFunction {
    QFunction::Lattice(GaussianFamily::big_gaussian_fn(ctx, gamma))
}

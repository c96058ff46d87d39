//! The q-convolution product, routed through one of three exact or
//! semi-exact computations, plus approximate identities, the Leibniz rule
//! and convolution inverses.

use crate::error::{QError, Result};
use crate::function::QFunction;
use crate::gaussian::{GaussianFamily, GaussianSeries};
use crate::lattice::{delta_convolve, locate, same_gamma, LatticeFunction};
use crate::qcore::{poch_real, q_binomial, q_factorial, qpow, Accumulator, QContext, TailMonitor, C64};
use crate::series::{generating_series, min_root_modulus, moments_from_generating, MomentSeries, PowerSeries};

/// Default number of moments fed to a pointwise product.
pub const DEFAULT_MOMENT_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionPath {
    /// The alternating moment sum, pointwise, or coefficient-wise for power series.
    MomentSeries,
    /// Per-coefficient action on a Hermite expansion.
    HermiteAction,
    /// Closed form for a pair of deltas.
    DeltaClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionPlan {
    pub path: ConvolutionPath,
    /// Moments of the left operand used by the moment sum.
    pub moment_order: usize,
    /// Last coefficient index kept for series outputs.
    pub output_order: usize,
}

impl ConvolutionPlan {
    /// Hermite action when the right operand is a Gaussian series, the delta
    /// closed form for two deltas, the moment sum otherwise.
    pub fn choose(f: &QFunction, g: &QFunction, order: usize) -> ConvolutionPlan {
        let path = match (f, g) {
            (_, QFunction::Gaussian(_)) => ConvolutionPath::HermiteAction,
            (QFunction::Delta(_), QFunction::Delta(_)) => ConvolutionPath::DeltaClosedForm,
            _ => ConvolutionPath::MomentSeries,
        };
        let output_order = match g {
            QFunction::Gaussian(s) => order.max(s.len().saturating_sub(1)),
            _ => order,
        };
        ConvolutionPlan { path, moment_order: DEFAULT_MOMENT_ORDER.max(output_order), output_order }
    }
}

/// Result of a convolution, in the representation the chosen path yields.
#[derive(Debug, Clone)]
pub enum Product {
    Gaussian(GaussianSeries),
    Power(PowerSeries),
    Lattice(LatticeFunction),
    Pointwise(PointwiseProduct),
}

impl Product {
    pub fn eval(&self, x: C64, ctx: &QContext) -> Result<C64> {
        match self {
            Product::Gaussian(g) => g.eval(x, ctx),
            Product::Power(p) => Ok(p.eval(x)),
            Product::Lattice(f) => f.eval(x, ctx.q()),
            Product::Pointwise(p) => Ok(p.eval_detailed(x)?.value),
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianSeries> {
        match self {
            Product::Gaussian(g) => Some(g),
            _ => None,
        }
    }

    pub fn into_function(self, gamma: f64) -> QFunction {
        match self {
            Product::Gaussian(g) => QFunction::Gaussian(g),
            Product::Power(p) => QFunction::Power(p),
            Product::Lattice(f) => QFunction::Lattice(f),
            Product::Pointwise(p) => QFunction::Lattice(LatticeFunction::from_fn(gamma, Some("product"), move |x| {
                p.eval_detailed(x).map(|v| v.value).unwrap_or(C64::new(f64::NAN, 0.0))
            })),
        }
    }
}

/// `Σ_e (-1)^e μ_e(f)/[e]_q! · ∂^e g(x)`, evaluated on demand.
#[derive(Debug, Clone)]
pub struct PointwiseProduct {
    pub moments: MomentSeries,
    pub g: QFunction,
    ctx: QContext,
}

/// A pointwise value with its cancellation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseValue {
    pub value: C64,
    pub terms: usize,
    /// Largest single term; much larger than `|value|` signals cancellation.
    pub max_term: f64,
}

impl PointwiseProduct {
    pub fn new(moments: MomentSeries, g: QFunction, ctx: QContext) -> Self {
        PointwiseProduct { moments, g, ctx }
    }

    fn term(&self, e: usize, x: C64) -> Result<C64> {
        let mu = self.moments.get(e);
        if mu.norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let q = self.ctx.q();
        let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
        let d = self.g.derivative_at(e, x, &self.ctx)?;
        if d.norm() == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok(mu * d * (sign / q_factorial(e, q)))
    }

    /// Sum with the tail policy; errors if the stored moments run out first.
    pub fn eval_detailed(&self, x: C64) -> Result<PointwiseValue> {
        let mut acc = Accumulator::new();
        let mut mon = TailMonitor::new(&self.ctx);
        for e in 0..self.moments.len() {
            let t = self.term(e, x)?;
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(QError::Truncation(format!("moment sum term {e} is not finite at x = {x}")));
            }
            acc.add(t);
            if mon.push(t.norm() <= self.ctx.rel_tol() * acc.abs_sum()) {
                return Ok(PointwiseValue { value: acc.value(), terms: e + 1, max_term: acc.max_term() });
            }
        }
        Err(QError::Truncation(format!(
            "moment sum at x = {x} not settled after {} moments (largest term {:.3e})",
            self.moments.len(),
            acc.max_term()
        )))
    }

    /// Partial sums `S_0, …, S_{n-1}` without any stopping rule.
    pub fn partial_sums(&self, x: C64, n: usize) -> Result<Vec<C64>> {
        let mut acc = Accumulator::new();
        let mut out = Vec::with_capacity(n);
        for e in 0..n.min(self.moments.len()) {
            acc.add(self.term(e, x)?);
            out.push(acc.value());
        }
        Ok(out)
    }
}

/// `f * (Σ a_t h̃_t e)`: coefficient `p` is
/// `Σ_{e≤p} μ_e(f) q^{pe-(e²+e)/2}/(q;q)_e · a_{p-e}`.
pub fn hermite_action(m: &MomentSeries, g: &GaussianSeries, output_order: usize, q: f64) -> GaussianSeries {
    let a = g.to_hermite(q);
    let lnq = q.ln();
    let mut out = vec![C64::new(0.0, 0.0); output_order + 1];
    for (p, slot) in out.iter_mut().enumerate() {
        let mut acc = Accumulator::new();
        for e in 0..=p.min(m.order()) {
            let ap = a.coeff(p - e);
            let mu = m.get(e);
            if ap.norm() == 0.0 || mu.norm() == 0.0 {
                continue;
            }
            let expo = (p * e) as f64 - (e * e + e) as f64 / 2.0;
            acc.add(mu * ap * ((expo * lnq).exp() / poch_real(q, q, e)));
        }
        *slot = acc.value();
    }
    GaussianSeries { basis: crate::gaussian::Basis::Hermite2, coeffs: out, gamma_hint: Some(m.gamma) }
}

/// `f * g` for a power series `g`: coefficient `r` is
/// `Σ_e (-1)^e μ_e(f) [r+e, e]_q a_{r+e}`, finite for polynomials.
pub fn convolve_power(m: &MomentSeries, g: &PowerSeries, q: f64) -> Result<PowerSeries> {
    let top = g.order().unwrap_or(g.top());
    if g.is_exact() && m.order() < top {
        return Err(QError::Truncation(format!(
            "polynomial of degree {top} needs {top} moments, got {}",
            m.order()
        )));
    }
    let mut out = Vec::with_capacity(top + 1);
    for r in 0..=top {
        let mut acc = Accumulator::new();
        for e in 0..=(top - r).min(m.order()) {
            let a = g.coeff(r + e);
            if a.norm() == 0.0 {
                continue;
            }
            let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(m.get(e) * a * (sign * q_binomial(r + e, e, q)?));
        }
        out.push(acc.value());
    }
    Ok(if g.is_exact() { PowerSeries::polynomial(out) } else { PowerSeries::new(out, top) })
}

/// `δ * δ` as a function on the lattice.
pub fn delta_product(f: &crate::lattice::DiscreteDelta, g: &crate::lattice::DiscreteDelta, ctx: &QContext) -> Result<LatticeFunction> {
    if !same_gamma(f.gamma, g.gamma) {
        return Err(QError::Mismatch(format!("deltas on L({}) and L({})", f.gamma, g.gamma)));
    }
    let (d1, d2, c) = (*f, *g, *ctx);
    Ok(LatticeFunction::from_fn(f.gamma, Some("delta_product"), move |x| match locate(x, d1.gamma, c.q()) {
        Some(p) => delta_convolve(&d1, &d2, p, &c).unwrap_or(C64::new(f64::NAN, 0.0)),
        None => C64::new(0.0, 0.0),
    }))
}

/// `f *_γ g` on the family's lattice, by the plan's path.
pub fn convolve_with(f: &QFunction, g: &QFunction, fam: &GaussianFamily, plan: ConvolutionPlan) -> Result<Product> {
    let q = fam.q();
    match plan.path {
        ConvolutionPath::DeltaClosedForm => match (f, g) {
            (QFunction::Delta(a), QFunction::Delta(b)) => Ok(Product::Lattice(delta_product(a, b, fam.ctx())?)),
            _ => Err(QError::Domain("the delta closed form needs two deltas".into())),
        },
        ConvolutionPath::HermiteAction => match g {
            QFunction::Gaussian(s) => {
                let m = f.moments(fam, plan.output_order)?;
                Ok(Product::Gaussian(hermite_action(&m, s, plan.output_order, q)))
            }
            _ => Err(QError::Domain("the Hermite action needs a Gaussian series on the right".into())),
        },
        ConvolutionPath::MomentSeries => match g {
            QFunction::Power(s) => {
                let need = s.order().unwrap_or(s.top());
                let m = f.moments(fam, need)?;
                Ok(Product::Power(convolve_power(&m, s, q)?))
            }
            _ => {
                let m = f.moments(fam, plan.moment_order)?;
                Ok(Product::Pointwise(PointwiseProduct::new(m, g.clone(), *fam.ctx())))
            }
        },
    }
}

/// `f *_γ g` with the default plan at truncation `order`.
pub fn convolve(f: &QFunction, g: &QFunction, fam: &GaussianFamily, order: usize) -> Result<Product> {
    convolve_with(f, g, fam, ConvolutionPlan::choose(f, g, order))
}

/// `f *_γ g` evaluated at one point.
pub fn convolve_at(f: &QFunction, g: &QFunction, x: C64, fam: &GaussianFamily, order: usize) -> Result<C64> {
    convolve(f, g, fam, order)?.eval(x, fam.ctx())
}

/// `f_k = q^{-k} Q^{-k} (f / ∫_γ f)`.
pub fn approximate_identity_sequence(f: &QFunction, k: i64, fam: &GaussianFamily) -> Result<QFunction> {
    let mass = f.moments(fam, 0)?.get(0);
    if mass.norm() <= fam.ctx().rel_tol() {
        return Err(QError::NotInvertible(format!("∫_γ f = {mass} cannot be normalized")));
    }
    let q = fam.q();
    Ok(QFunction::Shifted { p: -k, scale: C64::new(qpow(q, -k), 0.0) / mass, inner: Box::new(f.clone()) })
}

/// `|x(h*f)(x) - q(hX * Qf)(x) - (h * fX)(x)|`.
pub fn leibniz_check(h: &QFunction, f: &QFunction, x: C64, fam: &GaussianFamily, order: usize) -> Result<f64> {
    let q = fam.q();
    let lhs = x * convolve_at(h, f, x, fam, order)?;
    let hx = h.times_x(q)?;
    let a = convolve_at(&hx, &f.q_shift(1, q), x, fam, order)?;
    let b = convolve_at(h, &f.times_x(q)?, x, fam, order)?;
    Ok((lhs - q * a - b).norm())
}

/// Convolution inverse with its zero-free radius certificate.
#[derive(Debug, Clone)]
pub struct InverseReport {
    pub g: GaussianSeries,
    pub moments: MomentSeries,
    /// Estimated zero-free radius of the moment generating series of `f`.
    pub rho: f64,
    /// True when `ρ > q^{-1}(1-q)^{-1}`, so that `f * g = u_γ` holds.
    pub strong: bool,
}

/// Zero-free radius of a generating series: exact roots for polynomials,
/// otherwise the smaller of its own radius and that of its reciprocal.
pub fn zero_free_radius_of(s: &PowerSeries, ctx: &QContext) -> Result<f64> {
    let tol = ctx.rel_tol();
    if s.coeff(0).norm() <= tol {
        return Err(QError::NotInvertible("the generating series vanishes at t = 0".into()));
    }
    if s.is_polynomial_like(tol) {
        let scale = s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut c: Vec<C64> = s.coeffs().to_vec();
        while c.len() > 1 && c.last().map_or(false, |z| z.norm() <= tol * scale) {
            c.pop();
        }
        return Ok(min_root_modulus(&c));
    }
    let n = s.order().unwrap_or(s.top());
    let r = s.reciprocal(n, ctx)?;
    Ok(s.radius_estimate(tol).min(r.radius_estimate(tol)))
}

/// `g` with `μ_γ(g) μ_γ(f) = 1`, in Hermite coordinates through `order`.
pub fn convolution_inverse(f: &QFunction, fam: &GaussianFamily, order: usize) -> Result<InverseReport> {
    let m = f.moments(fam, order)?;
    inverse_from_moments(&m, fam, order)
}

pub(crate) fn inverse_from_moments(m: &MomentSeries, fam: &GaussianFamily, order: usize) -> Result<InverseReport> {
    let q = fam.q();
    let ctx = fam.ctx();
    if m.get(0).norm() <= ctx.rel_tol() {
        return Err(QError::NotInvertible(format!("μ_0 = {} vanishes", m.get(0))));
    }
    let s = generating_series(m, q);
    let rho = zero_free_radius_of(&s, ctx)?;
    if rho <= 1.0 / (1.0 - q) {
        return Err(QError::Radius(format!(
            "zero-free radius ρ ≈ {rho:.4} does not exceed (1-q)^-1 = {:.4}",
            1.0 / (1.0 - q)
        )));
    }
    let inv = s.reciprocal(m.order(), ctx)?;
    let moments = moments_from_generating(&inv, fam.gamma(), q);
    let g = fam.assemble_g_expansion(&moments, order.min(moments.order()));
    Ok(InverseReport { g, moments, rho, strong: rho > 1.0 / (q * (1.0 - q)) })
}

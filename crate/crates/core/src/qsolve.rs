//! Constant-coefficient q-differential equations `Σ c_n ∂^n Y = F` through
//! the convolution inverse of the operator function, with the q-shift
//! regularization for power-series right-hand sides.

use crate::convolve::{convolve_power, hermite_action, inverse_from_moments};
use crate::error::{QError, Result};
use crate::gaussian::{GaussianFamily, GaussianSeries};
use crate::lattice::lattice_window;
use crate::qcore::{q_factorial, qpow, C64};
use crate::series::{min_root_modulus, moments_from_generating, MomentSeries, PowerSeries};

/// `L = Σ_{n≤N} c_n ∂^n` with `c_N ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QDiffOperator {
    coeffs: Vec<C64>,
}

impl QDiffOperator {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        while coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(QError::Domain("the zero operator has no order".into()));
        }
        Ok(QDiffOperator { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of leading vanishing coefficients.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0)
    }

    /// `Σ c_n q^{pn} ∂^n`.
    pub fn shifted(&self, p: i64, q: f64) -> QDiffOperator {
        QDiffOperator {
            coeffs: self.coeffs.iter().enumerate().map(|(n, &c)| c * qpow(q, p * n as i64)).collect(),
        }
    }

    /// `L Y` in Hermite coordinates.
    pub fn apply_gaussian(&self, y: &GaussianSeries, q: f64) -> GaussianSeries {
        let mut out = GaussianSeries::hermite(vec![]);
        for (n, &c) in self.coeffs.iter().enumerate() {
            if c.norm() != 0.0 {
                out = out.add(&y.derivative(n, q).scale(c), q);
            }
        }
        out
    }

    /// `L Y` coefficient-wise.
    pub fn apply_power(&self, y: &PowerSeries, q: f64) -> PowerSeries {
        let mut d = y.clone();
        let mut out = y.scale(self.coeffs[0]);
        for &c in &self.coeffs[1..] {
            d = d.q_derivative(q);
            out = out.add(&d.scale(c));
        }
        out
    }
}

/// `μ_γ(D_L)(t) = Σ (-1)^n c_n t^n`.
pub fn operator_symbol(l: &QDiffOperator) -> PowerSeries {
    let c = l
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
        .collect();
    PowerSeries::polynomial(c)
}

/// `D_L = Σ (-1)^k c_k [k]_q! G_{k,γ}`, so that `D_L * Y = L Y`.
pub fn operator_function(l: &QDiffOperator, fam: &GaussianFamily, order: usize) -> GaussianSeries {
    let q = fam.q();
    let mu = operator_symbol(l).coeffs().iter().enumerate().map(|(k, &c)| c * q_factorial(k, q)).collect();
    fam.assemble_g_expansion(&MomentSeries::new(fam.gamma(), mu), order)
}

/// Smallest modulus of a zero of the symbol; infinite for constants.
pub fn zero_free_radius(sym: &PowerSeries, tol: f64) -> Result<f64> {
    if sym.coeff(0).norm() <= tol {
        return Err(QError::NotInvertible(
            "the symbol vanishes at t = 0; solve for a derivative of Y instead".into(),
        ));
    }
    Ok(min_root_modulus(sym.coeffs()))
}

/// Right-hand side of `L Y = F`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Gaussian(GaussianSeries),
    Power(PowerSeries),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Gaussian(GaussianSeries),
    Power(PowerSeries),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Solution,
    /// Shift used by the regularization, 0 if none.
    pub shift_p: i64,
    /// Zero-free radius of the (unshifted) symbol.
    pub rho: f64,
    /// Measured `‖L Y - F‖_∞`: over the lattice window for Gaussian data,
    /// over trusted coefficients for power series.
    pub residual: f64,
    /// True when the inverse is only a truncated approximation.
    pub approximate: bool,
    pub note: String,
}

/// `∫_0^x f d_qt` term-wise, with constant of integration 0.
pub fn q_antiderivative(f: &PowerSeries, q: f64) -> PowerSeries {
    f.q_antiderivative(q, C64::new(0.0, 0.0))
}

/// Lattice window `k ∈ [-8, 20]` on both half-lines.
pub const RESIDUAL_WINDOW: (i64, i64) = (-8, 20);

/// `sup |h(x)|` over the residual window of L(γ).
pub fn window_sup(h: &GaussianSeries, fam: &GaussianFamily) -> Result<f64> {
    let q = fam.q();
    let mut sup = 0.0f64;
    for p in lattice_window(fam.gamma(), RESIDUAL_WINDOW.0..=RESIDUAL_WINDOW.1) {
        let v = h.eval(C64::new(p.value(q), 0.0), fam.ctx())?;
        sup = sup.max(v.norm());
    }
    Ok(sup)
}

/// Solves `L Y = F` on L(γ).
pub fn solve(l: &QDiffOperator, f: &Rhs, fam: &GaussianFamily, order: usize) -> Result<SolveReport> {
    let q = fam.q();
    let v = l.valuation();
    if v > 0 {
        let reduced = QDiffOperator::new(l.coeffs[v..].to_vec())?;
        let inner = solve(&reduced, f, fam, order)?;
        let solution = match inner.solution {
            Solution::Power(mut z) => {
                for _ in 0..v {
                    z = q_antiderivative(&z, q);
                }
                Solution::Power(z)
            }
            Solution::Gaussian(mut z) => {
                for _ in 0..v {
                    z = z.antiderivative(q, 1e-9)?;
                }
                Solution::Gaussian(z)
            }
        };
        let residual = residual_of(l, &solution, f, fam)?;
        return Ok(SolveReport {
            solution,
            residual,
            note: format!("{}; integrated {v} time(s)", inner.note),
            ..inner
        });
    }
    let sym = operator_symbol(l);
    let rho = zero_free_radius(&sym, fam.ctx().rel_tol())?;
    let strong = 1.0 / (q * (1.0 - q));
    match f {
        Rhs::Power(fp) if fp.is_exact() => {
            let deg = fp.top();
            let inv = sym.reciprocal(deg, fam.ctx())?;
            let m = moments_from_generating(&inv, fam.gamma(), q);
            let y = convolve_power(&m, fp, q)?;
            let solution = Solution::Power(y);
            let residual = residual_of(l, &solution, f, fam)?;
            Ok(SolveReport { solution, shift_p: 0, rho, residual, approximate: false, note: "polynomial right-hand side".into() })
        }
        Rhs::Power(fp) => {
            let rho_f = fp.radius_estimate(fam.ctx().rel_tol());
            if !(rho_f * rho * (1.0 - q) > 1.0) {
                return Err(QError::NoRadius(format!(
                    "right-hand side radius ≈ {rho_f:.4} and symbol radius {rho:.4} violate ρ'ρ(1-q) > 1 for every shift"
                )));
            }
            let mut p = 0i64;
            while qpow(q, -p) * rho <= strong {
                p += 1;
            }
            let lp = l.shifted(p, q);
            let fp_shift = fp.q_shift(-p, q);
            let n = fp.order().unwrap_or(fp.top());
            let inv = operator_symbol(&lp).reciprocal(n, fam.ctx())?;
            let m = moments_from_generating(&inv, fam.gamma(), q);
            let yp = convolve_power(&m, &fp_shift, q)?;
            let trusted = n / 2;
            let y = PowerSeries::new(yp.q_shift(p, q).coeffs()[..=trusted].to_vec(), trusted);
            let solution = Solution::Power(y);
            let residual = residual_of(l, &solution, f, fam)?;
            Ok(SolveReport { solution, shift_p: p, rho, residual, approximate: false, note: format!("power series, shift p = {p}") })
        }
        Rhs::Gaussian(fg) => {
            let out_order = order.max(fg.len().saturating_sub(1));
            let mu = MomentSeries::new(
                fam.gamma(),
                sym.coeffs().iter().enumerate().map(|(k, &c)| c * q_factorial(k, q)).collect(),
            );
            let mut mu_full = mu.moments.clone();
            mu_full.resize(out_order + 1, C64::new(0.0, 0.0));
            let report = inverse_from_moments(&MomentSeries::new(fam.gamma(), mu_full), fam, out_order);
            let (g_moments, approximate, note) = match report {
                Ok(r) if r.strong => (r.moments, false, "ρ > q^-1 (1-q)^-1".to_string()),
                Ok(r) => (r.moments, true, format!("ρ = {:.4}: moment-level inverse only", r.rho)),
                Err(QError::Radius(msg)) => {
                    let inv = sym.reciprocal(out_order, fam.ctx())?;
                    (moments_from_generating(&inv, fam.gamma(), q), true, format!("truncated inverse; {msg}"))
                }
                Err(e) => return Err(e),
            };
            let y = hermite_action(&g_moments, fg, out_order, q);
            let solution = Solution::Gaussian(y);
            let residual = residual_of(l, &solution, f, fam)?;
            Ok(SolveReport { solution, shift_p: 0, rho, residual, approximate, note })
        }
    }
}

/// `‖L Y - F‖_∞`, pointwise on the window for Gaussian data and over the
/// trusted coefficients for power series.
pub fn residual_of(l: &QDiffOperator, y: &Solution, f: &Rhs, fam: &GaussianFamily) -> Result<f64> {
    let q = fam.q();
    match (y, f) {
        (Solution::Gaussian(y), Rhs::Gaussian(f)) => window_sup(&l.apply_gaussian(y, q).sub(f, q), fam),
        (Solution::Power(y), Rhs::Power(f)) => {
            let ly = l.apply_power(y, q);
            let top = match (y.order(), f.order()) {
                (None, None) => ly.top().max(f.top()),
                (a, b) => a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX)).saturating_sub(l.order()),
            };
            Ok((0..=top).map(|r| (ly.coeff(r) - f.coeff(r)).norm()).fold(0.0, f64::max))
        }
        _ => Err(QError::Mismatch("solution and right-hand side use different representations".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QContext;

    fn fam() -> GaussianFamily {
        GaussianFamily::new(QContext::new(0.5).unwrap(), 0.9).unwrap()
    }

    #[test]
    fn symbols() {
        let id = QDiffOperator::from_real(&[1.0]).unwrap();
        assert_eq!(operator_symbol(&id), PowerSeries::one());
        let d = QDiffOperator::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(operator_symbol(&d).coeff(1), C64::new(-1.0, 0.0));
        let l = QDiffOperator::from_real(&[1.0, 0.0, -0.015625]).unwrap();
        let s = operator_symbol(&l);
        assert_eq!(s.coeff(2), C64::new(-0.015625, 0.0));
        assert!((zero_free_radius(&s, 1e-12).unwrap() - 8.0).abs() < 1e-10);
    }

    #[test]
    fn radius_examples() {
        assert!(zero_free_radius(&PowerSeries::from_real(&[3.0], None), 1e-12).unwrap().is_infinite());
        let r = zero_free_radius(&PowerSeries::from_real(&[1.0, -2.0], None), 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!(matches!(
            zero_free_radius(&PowerSeries::from_real(&[0.0, 1.0], None), 1e-12),
            Err(QError::NotInvertible(_))
        ));
    }

    #[test]
    fn identity_operator_returns_rhs() {
        let fam = fam();
        let f = fam.g_k(2, 24);
        let r = solve(&QDiffOperator::from_real(&[1.0]).unwrap(), &Rhs::Gaussian(f.clone()), &fam, 24).unwrap();
        assert_eq!(r.shift_p, 0);
        match r.solution {
            Solution::Gaussian(y) => assert!(y.max_coeff_diff(&f, 0.5) < 1e-14),
            _ => panic!("expected a Gaussian series"),
        }
    }

    #[test]
    fn derivative_operator_integrates_polynomials() {
        let fam = fam();
        let f = PowerSeries::from_real(&[1.0, 2.0, 3.0], None);
        let r = solve(&QDiffOperator::from_real(&[0.0, 1.0]).unwrap(), &Rhs::Power(f), &fam, 32).unwrap();
        assert!(r.residual < 1e-12);
        match r.solution {
            Solution::Power(y) => {
                assert_eq!(y.coeff(0), C64::new(0.0, 0.0));
                assert!((y.coeff(1).re - 1.0).abs() < 1e-15);
            }
            _ => panic!("expected a power series"),
        }
    }
}

//! The formal q-Fourier transform and its companion F̃′, the kernel
//! transform, the two inverses, and the twisted convolution theorem.

use std::cell::RefCell;

use crate::convolve::convolve;
use crate::error::{QError, Result};
use crate::function::QFunction;
use crate::gaussian::{GaussianFamily, GaussianSeries};
use crate::lattice::{q_integral, q_integral_unit, LatticeFunction};
use crate::qcore::{big_e_q, e_q, poch_real, QContext, C64};
use crate::series::{psi_inverse_product, MomentSeries, PowerSeries};

/// A transformed function: a power series in `y` tagged with its lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierImage {
    pub series: PowerSeries,
    pub source_gamma: f64,
}

fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `Σ_k μ_k (-iy)^k/(q;q)_k` from a moment sequence.
pub fn fourier_from_moments(m: &MomentSeries, q: f64) -> FourierImage {
    let c = m
        .moments
        .iter()
        .enumerate()
        .map(|(k, &mu)| mu * i_pow(k).conj() / poch_real(q, q, k))
        .collect();
    FourierImage { series: PowerSeries::new(c, m.order()), source_gamma: m.gamma }
}

/// `F̃_γ f` through coefficient `order`.
pub fn fourier_formal(f: &QFunction, fam: &GaussianFamily, order: usize) -> Result<FourierImage> {
    Ok(fourier_from_moments(&f.moments(fam, order)?, fam.q()))
}

/// `F̃′_γ = S⁻¹ ∘ Q⁻¹ ∘ F̃_γ`; coefficient `r` is `i^r ∫_γ f x^r/(q;q)_r`.
pub fn fourier_formal_prime(f: &QFunction, fam: &GaussianFamily, order: usize) -> Result<FourierImage> {
    Ok(prime_of(&fourier_formal(f, fam, order)?, fam.q()))
}

/// Applies `S⁻¹ ∘ Q⁻¹` to an image of `F̃_γ`.
pub fn prime_of(img: &FourierImage, q: f64) -> FourierImage {
    FourierImage { series: img.series.q_shift(-1, q).antipode_inv(q), source_gamma: img.source_gamma }
}

/// `F_γ f(y) = ∫_γ E_q(-iqxy) f(x) d_qx`.
pub fn fourier_kernel(f: &QFunction, gamma: f64, y: C64, ctx: &QContext) -> Result<C64> {
    let q = ctx.q();
    let lf = f.to_lattice_function(gamma, ctx);
    let c = *ctx;
    let kernel = LatticeFunction::from_fn(gamma, Some("fourier_kernel"), move |x| {
        let k = big_e_q(C64::new(0.0, -q) * x * y, q, &c).unwrap_or(C64::new(f64::NAN, 0.0));
        k * lf.eval(x, q).unwrap_or(C64::new(f64::NAN, 0.0))
    });
    q_integral(&kernel, ctx)
}

/// `𝒢_γ φ = Σ_k i^k c_k (q;q)_k G_{k,γ}` for `φ = Σ c_k y^k`.
pub fn fourier_inverse_g(phi: &PowerSeries, fam: &GaussianFamily, order: usize) -> Result<GaussianSeries> {
    let q = fam.q();
    let radius = phi.radius_estimate(fam.ctx().rel_tol());
    if radius <= 1.0 / q {
        return Err(QError::Radius(format!("series radius ≈ {radius:.4} does not exceed q^-1 = {:.4}", 1.0 / q)));
    }
    let top = phi.order().unwrap_or(phi.top()).min(order);
    let mu = (0..=top).map(|k| phi.coeff(k) * i_pow(k) * poch_real(q, q, k)).collect();
    let out = if phi.is_exact() { order } else { top };
    Ok(fam.assemble_g_expansion(&MomentSeries::new(fam.gamma(), mu), out))
}

/// `F′_γ f(y) = (c_q(γ) b_q)⁻¹ ∫_{-1}^{1} e_q(ixy) f(x) d_qx`.
pub fn fourier_inverse_kernel<F>(f: F, y: C64, fam: &GaussianFamily) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let ctx = fam.ctx();
    let q = ctx.q();
    if y.im.abs() >= 1.0 {
        return Err(QError::Domain(format!("the bounded kernel integral needs |Im y| < 1, got {y}")));
    }
    let err = RefCell::new(None);
    let v = q_integral_unit(
        |x| match e_q(C64::new(0.0, x) * y, q, ctx) {
            Ok(k) => k * f(x),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        },
        ctx,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(v? / (fam.c_q() * fam.b_q()))
}

/// Left type `α` from the decay `|μ_e| ≈ C b^e q^{α e²/2}`, fitted by least
/// squares on the moments above `tol · max|μ|` and rounded down to 0.01
/// after snapping values within 1e-8 of a grid point.
/// Fewer than four significant moments count as finitely many: `α = ∞`.
pub fn estimate_left_type(m: &MomentSeries, q: f64, tol: f64) -> Result<f64> {
    let scale = m.moments.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = m
        .moments
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol * scale && z.norm() > 0.0)
        .map(|(e, z)| (e as f64, z.norm().ln()))
        .collect();
    if pts.is_empty() {
        return Err(QError::InsufficientData("all moments vanish".into()));
    }
    if pts.len() < 4 {
        return Ok(f64::INFINITY);
    }
    let c2 = quadratic_fit(&pts)[2];
    let alpha = 2.0 * c2 / q.ln();
    Ok((alpha * 100.0 + 1e-6).floor() / 100.0)
}

/// Least-squares coefficients of `y ≈ a + b x + c x²`.
fn quadratic_fit(pts: &[(f64, f64)]) -> [f64; 3] {
    let mut a = [[0.0f64; 4]; 3];
    for &(x, y) in pts {
        let row = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
            a[i][3] += row[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        a.swap(col, piv);
        for r in 0..3 {
            if r != col && a[col][col] != 0.0 {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]]
}

/// Both sides of the twisted convolution theorem and their discrepancy.
#[derive(Debug, Clone)]
pub struct TwistedReport {
    pub lhs: PowerSeries,
    pub rhs: PowerSeries,
    pub alpha: f64,
    pub beta: f64,
    /// Largest coefficient discrepancy through `order`.
    pub residual: f64,
}

/// `F̃′(f * g)` against `m∘Ψ⁻¹(F̃′f ⊗ F̃′g)`, gated on `(α-1)(β-1) > 1`.
pub fn convolution_theorem_twisted(f: &QFunction, g: &QFunction, fam: &GaussianFamily, order: usize) -> Result<TwistedReport> {
    let q = fam.q();
    let tol = fam.ctx().rel_tol();
    let mf = f.moments(fam, order)?;
    let mg = g.moments(fam, order)?;
    let alpha = estimate_left_type(&mf, q, tol)?;
    let beta = estimate_left_type(&mg, q, tol)?;
    if !((alpha - 1.0) * (beta - 1.0) > 1.0) {
        return Err(QError::TypeGrowth(format!(
            "left types α = {alpha}, β = {beta} violate (α-1)(β-1) > 1"
        )));
    }
    let fg = convolve(f, g, fam, order)?.into_function(fam.gamma());
    let lhs = fourier_formal_prime(&fg, fam, order)?.series;
    let rf = prime_of(&fourier_from_moments(&mf, q), q).series;
    let rg = prime_of(&fourier_from_moments(&mg, q), q).series;
    let rhs = psi_inverse_product(&rf, &rg, fam.ctx());
    let residual = (0..=order).map(|r| (lhs.coeff(r) - rhs.coeff(r)).norm()).fold(0.0, f64::max);
    Ok(TwistedReport { lhs, rhs, alpha, beta, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam() -> GaussianFamily {
        GaussianFamily::new(QContext::new(0.5).unwrap(), 0.9).unwrap()
    }

    #[test]
    fn unit_transforms_to_one() {
        let fam = fam();
        let u = QFunction::Gaussian(fam.unit_u(32).unwrap());
        let img = fourier_formal(&u, &fam, 12).unwrap();
        assert!((img.series.coeff(0) - C64::new(1.0, 0.0)).norm() < 1e-12);
        for k in 1..=12 {
            assert!(img.series.coeff(k).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_matches_formal_for_gaussian() {
        let fam = fam();
        let ctx = *fam.ctx();
        let e = QFunction::Gaussian(fam.gaussian());
        let img = fourier_formal(&e, &fam, 40).unwrap();
        for &y in &[0.1, 0.5, 1.0] {
            let yc = C64::new(y, 0.0);
            let a = fourier_kernel(&e, 0.9, yc, &ctx).unwrap();
            let b = img.series.eval(yc);
            assert!((a - b).norm() <= 1e-8 * b.norm(), "y={y}");
        }
    }

    #[test]
    fn inverse_of_constant_is_unit() {
        let fam = fam();
        let g = fourier_inverse_g(&PowerSeries::one(), &fam, 32).unwrap();
        let u = fam.unit_u(32).unwrap();
        assert!(g.max_coeff_diff(&u, 0.5) < 1e-12);
    }

    #[test]
    fn quadratic_fit_recovers_exact_parabola() {
        let pts: Vec<(f64, f64)> = (0..6).map(|x| (x as f64, 1.0 - 2.0 * x as f64 + 0.5 * (x * x) as f64)).collect();
        let c = quadratic_fit(&pts);
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] + 2.0).abs() < 1e-10 && (c[2] - 0.5).abs() < 1e-10);
    }
}

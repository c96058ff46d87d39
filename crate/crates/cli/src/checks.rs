//! Named identity checks with pinned tolerances.

use qconv::convolve::{convolve, Product};
use qconv::fourier::{fourier_formal, fourier_inverse_g};
use qconv::function::QFunction;
use qconv::gaussian::{Basis, GaussianFamily, GaussianSeries};
use qconv::lattice::{delta_convolve, lattice_window, q_integral_unit, DiscreteDelta};
use qconv::qcore::{e_q, q_binomial, qpow};
use qconv::qsolve::{solve, window_sup, QDiffOperator, Rhs};
use qconv::series::generating_series;
use qconv::C64;

use crate::CliError;

pub const NAMES: [&str; 8] = [
    "gk-binomial",
    "gk-biorthogonal",
    "homomorphism",
    "unit",
    "fourier-round-trip",
    "kernel-identity",
    "solver-example",
    "delta-commute",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckResult {
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        self.measured < self.tolerance
    }
}

fn product(f: &GaussianSeries, g: &GaussianSeries, fam: &GaussianFamily, order: usize) -> Result<GaussianSeries, CliError> {
    match convolve(&QFunction::Gaussian(f.clone()), &QFunction::Gaussian(g.clone()), fam, order)? {
        Product::Gaussian(p) => Ok(p),
        _ => unreachable!("Gaussian operands take the Hermite path"),
    }
}

pub fn run(name: &str, fam: &GaussianFamily, order: usize) -> Result<CheckResult, CliError> {
    let q = fam.q();
    let ctx = *fam.ctx();
    let c = |x: f64| C64::new(x, 0.0);
    let (measured, tolerance) = match name {
        "gk-binomial" => {
            let mut worst = 0.0f64;
            for k in 0..=10 {
                for l in 0..=10 - k {
                    let p = product(&fam.g_k(k, order), &fam.g_k(l, order), fam, order)?;
                    let want = fam.g_k(k + l, order).scale(c(q_binomial(k + l, l, q)?));
                    worst = worst.max(p.max_coeff_diff(&want, q));
                }
            }
            (worst, 1e-9)
        }
        "gk-biorthogonal" => {
            let mut worst = 0.0f64;
            for k in 0..=10 {
                let m = fam.moments(&fam.g_k(k, order), 10);
                for r in 0..=10 {
                    worst = worst.max((m.get(r) - c(if r == k { 1.0 } else { 0.0 })).norm());
                }
            }
            (worst, 1e-9)
        }
        "homomorphism" => {
            let fs = [
                fam.gaussian(),
                fam.g_m_hermite(2, order)?,
                fam.g_k(2, order),
                GaussianSeries::from_real(Basis::Hermite2, &[0.5, -1.0, 0.25]),
            ];
            let n = 12;
            let mut worst = 0.0f64;
            for f in &fs {
                for g in &fs {
                    let lhs = generating_series(&fam.moments(&product(f, g, fam, order)?, n), q);
                    let rhs = generating_series(&fam.moments(f, n), q).mul(&generating_series(&fam.moments(g, n), q));
                    let scale = (0..=n).map(|r| rhs.coeff(r).norm()).fold(0.0, f64::max);
                    for r in 0..=n {
                        worst = worst.max((lhs.coeff(r) - rhs.coeff(r)).norm() / scale);
                    }
                }
            }
            (worst, 1e-8)
        }
        "unit" => {
            let u = fam.unit_u(order)?;
            let mut worst = 0.0f64;
            for f in [fam.gaussian(), GaussianSeries::hermite_unit(1), fam.g_m_hermite(2, order)?, fam.g_k(1, order)] {
                worst = worst.max(window_sup(&product(&u, &f, fam, order)?.sub(&f, q), fam)?);
                worst = worst.max(window_sup(&product(&f, &u, fam, order)?.sub(&f, q), fam)?);
            }
            (worst, 1e-8)
        }
        "fourier-round-trip" => {
            let mut worst = 0.0f64;
            for f in [fam.unit_u(order)?, fam.g_m_hermite(2, order)?, fam.g_m_hermite(3, order)?] {
                let phi = fourier_formal(&QFunction::Gaussian(f.clone()), fam, order)?.series;
                worst = worst.max(fourier_inverse_g(&phi, fam, order)?.max_coeff_diff(&f, q));
            }
            (worst, 1e-8)
        }
        "kernel-identity" => {
            let u = fam.unit_u(order)?;
            let mut worst = 0.0f64;
            for y in [0.0, 0.1, 0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 5.0] {
                let lhs = q_integral_unit(|x| e_q(C64::new(0.0, x * y), q, &ctx).unwrap_or(c(f64::NAN)), &ctx)?;
                let rhs = u.eval(c(y), &ctx)? * (fam.b_q() * fam.c_q());
                worst = worst.max((lhs - rhs).norm());
            }
            (worst, 1e-8)
        }
        "solver-example" => {
            let l = QDiffOperator::from_real(&[1.0, 0.0, -qpow(q, 6)])?;
            let rep = solve(&l, &Rhs::Gaussian(fam.gaussian()), fam, order)?;
            (if rep.approximate { f64::INFINITY } else { rep.residual }, 1e-7)
        }
        "delta-commute" => {
            let mut worst = 0.0f64;
            for (s, p1, p2) in [(1i8, 0i64, 2i64), (-1, 1, 3), (1, -1, 4)] {
                let a = DiscreteDelta::new(s, p1, fam.gamma())?;
                let b = DiscreteDelta::new(s, p2, fam.gamma())?;
                for x in lattice_window(fam.gamma(), -4..=10) {
                    let ab = delta_convolve(&a, &b, x, &ctx)?;
                    let ba = delta_convolve(&b, &a, x, &ctx)?;
                    worst = worst.max((ab - ba).norm());
                }
            }
            (worst, 1e-12)
        }
        other => return Err(CliError::Parse(format!("unknown check `{other}`; known: {}", NAMES.join(", ")))),
    };
    Ok(CheckResult { measured, tolerance })
}

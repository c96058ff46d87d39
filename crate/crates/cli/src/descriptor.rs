//! JSON function descriptors: the exchange format of the command line.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use qconv::function::{big_gaussian, cos_q, sin_q, QFunction};
use qconv::gaussian::{Basis, GaussianFamily, GaussianSeries};
use qconv::lattice::{lattice_window, DiscreteDelta, LatticeFunction};
use qconv::series::PowerSeries;
use qconv::{QError, C64};

use crate::CliError;

/// A complex number written as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex(pub f64, pub f64);

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Complex(z.re, z.im)
    }
}

impl From<Complex> for C64 {
    fn from(z: Complex) -> Self {
        C64::new(z.0, z.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    /// `e_{q²}(-x²)`
    #[serde(rename = "eq2_gaussian")]
    Eq2Gaussian,
    /// `E_{q²}(-q²x²)`
    #[serde(rename = "Eq2_gaussian")]
    BigEq2Gaussian,
    #[serde(rename = "g_m")]
    GM,
    #[serde(rename = "G_k")]
    GK,
    #[serde(rename = "u")]
    U,
    /// `h̃_l(x;q) e_{q²}(-x²)`
    #[serde(rename = "hermite2_l")]
    Hermite2L,
    /// `e_q(ix)`
    #[serde(rename = "eq_exp_i")]
    EqExpI,
    #[serde(rename = "cos_q")]
    CosQ,
    #[serde(rename = "sin_q")]
    SinQ,
    /// Indicator of `q^k γ`.
    #[serde(rename = "delta")]
    Delta,
}

impl FromStr for Builtin {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| CliError::Parse(format!("unknown builtin `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Hermite2,
    Monomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub sign: i8,
    pub k: i64,
    pub value: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// A named family member; `index` is m, k, l or the delta's exponent.
    Builtin {
        name: Builtin,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    GaussianSeries { basis: BasisName, coeffs: Vec<Complex> },
    /// `order: null` marks an exact polynomial.
    PowerSeries {
        coeffs: Vec<Complex>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    LatticeTable { gamma: f64, entries: Vec<TableEntry> },
    Delta {
        sign: i8,
        p: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
}

impl FunctionDescriptor {
    /// Reads inline JSON, `@path` to a JSON file, or the shorthand
    /// `name` / `name:index` for builtins.
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        let arg = arg.trim();
        if let Some(path) = arg.strip_prefix('@') {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))?;
            return Self::from_json(&text);
        }
        if arg.starts_with('{') {
            return Self::from_json(arg);
        }
        let (name, index) = match arg.split_once(':') {
            Some((n, i)) => {
                let i = i.parse().map_err(|_| CliError::Parse(format!("bad index in `{arg}`")))?;
                (n, Some(i))
            }
            None => (arg, None),
        };
        Ok(FunctionDescriptor::Builtin { name: name.parse()?, index })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Parse(format!("descriptor at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptors always serialize")
    }

    pub fn from_gaussian(g: &GaussianSeries) -> Self {
        let basis = match g.basis {
            Basis::Hermite2 => BasisName::Hermite2,
            Basis::Monomial => BasisName::Monomial,
        };
        FunctionDescriptor::GaussianSeries { basis, coeffs: g.coeffs.iter().map(|&z| z.into()).collect() }
    }

    pub fn from_power(p: &PowerSeries) -> Self {
        FunctionDescriptor::PowerSeries { coeffs: p.coeffs().iter().map(|&z| z.into()).collect(), order: p.order() }
    }

    /// Tabulates `f` over the lattice window `k ∈ [lo, hi]` on both half-lines.
    pub fn tabulate<F>(gamma: f64, q: f64, lo: i64, hi: i64, f: F) -> Result<Self, CliError>
    where
        F: Fn(C64) -> Result<C64, QError>,
    {
        let mut entries = Vec::new();
        for p in lattice_window(gamma, lo..=hi) {
            let v = f(C64::new(p.value(q), 0.0))?;
            entries.push(TableEntry { sign: p.sign, k: p.k, value: v.into() });
        }
        Ok(FunctionDescriptor::LatticeTable { gamma, entries })
    }

    /// Builds the function on the lattice of `fam`, truncating families at `order`.
    pub fn to_function(&self, fam: &GaussianFamily, order: usize) -> Result<QFunction, CliError> {
        let gamma = fam.gamma();
        let same_lattice = |g: f64| -> Result<(), CliError> {
            if (g - gamma).abs() > 1e-15 * gamma {
                return Err(QError::Mismatch(format!("descriptor lattice γ = {g} differs from --gamma {gamma}")).into());
            }
            Ok(())
        };
        Ok(match self {
            FunctionDescriptor::Builtin { name, index } => {
                let i = *index;
                match name {
                    Builtin::Eq2Gaussian => QFunction::Gaussian(fam.gaussian()),
                    Builtin::BigEq2Gaussian => big_gaussian(fam.ctx(), gamma),
                    Builtin::GM => match i.unwrap_or(1) {
                        0 => QFunction::Gaussian(fam.g_m(0, order)),
                        m => QFunction::Gaussian(fam.g_m_hermite(m, order)?),
                    },
                    Builtin::GK => QFunction::Gaussian(fam.g_k(i.unwrap_or(0), order)),
                    Builtin::U => QFunction::Gaussian(fam.unit_u(order)?),
                    Builtin::Hermite2L => QFunction::Gaussian(GaussianSeries::hermite_unit(i.unwrap_or(0)).with_gamma(gamma)),
                    Builtin::EqExpI => QFunction::QExp { a: C64::new(0.0, 1.0) },
                    Builtin::CosQ => cos_q(),
                    Builtin::SinQ => sin_q(),
                    Builtin::Delta => QFunction::Delta(DiscreteDelta::new(1, i.unwrap_or(0) as i64, gamma)?),
                }
            }
            FunctionDescriptor::GaussianSeries { basis, coeffs } => {
                let basis = match basis {
                    BasisName::Hermite2 => Basis::Hermite2,
                    BasisName::Monomial => Basis::Monomial,
                };
                QFunction::Gaussian(GaussianSeries::new(basis, coeffs.iter().map(|&z| z.into()).collect()).with_gamma(gamma))
            }
            FunctionDescriptor::PowerSeries { coeffs, order } => {
                let c: Vec<C64> = coeffs.iter().map(|&z| z.into()).collect();
                QFunction::Power(match order {
                    Some(n) => PowerSeries::new(c, *n),
                    None => PowerSeries::polynomial(c),
                })
            }
            FunctionDescriptor::LatticeTable { gamma: g, entries } => {
                same_lattice(*g)?;
                QFunction::Lattice(LatticeFunction::from_table(*g, entries.iter().map(|e| (e.sign, e.k, e.value.into())))?)
            }
            FunctionDescriptor::Delta { sign, p, gamma: g } => {
                let g = g.unwrap_or(gamma);
                same_lattice(g)?;
                QFunction::Delta(DiscreteDelta::new(*sign, *p, g)?)
            }
        })
    }

    /// The power series carried by a `power_series` descriptor.
    pub fn to_power_series(&self) -> Result<PowerSeries, CliError> {
        match self {
            FunctionDescriptor::PowerSeries { coeffs, order } => {
                let c: Vec<C64> = coeffs.iter().map(|&z| z.into()).collect();
                Ok(match order {
                    Some(n) => PowerSeries::new(c, *n),
                    None => PowerSeries::polynomial(c),
                })
            }
            _ => Err(CliError::Parse("expected a power_series descriptor".into())),
        }
    }
}

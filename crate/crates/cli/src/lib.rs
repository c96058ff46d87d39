//! Command implementations behind the `qconv` executable. Each command
//! returns an [`Output`] that renders as CSV or JSON.

pub mod checks;
pub mod descriptor;

use serde_json::{json, Map, Value};
use thiserror::Error;

use qconv::convolve::{convolution_inverse, convolve, Product};
use qconv::fourier::{fourier_formal, fourier_formal_prime, fourier_inverse_g};
use qconv::gaussian::GaussianFamily;
use qconv::lattice::lattice_window;
use qconv::qsolve::{solve, QDiffOperator, Rhs, Solution, RESIDUAL_WINDOW};
use qconv::{QContext, QError, C64};

use descriptor::FunctionDescriptor;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Lib(#[from] QError),
    #[error("ParseError: {0}")]
    Parse(String),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.name(),
            CliError::Parse(_) => "ParseError",
        }
    }
}

/// Global numerical settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub q: f64,
    pub gamma: f64,
    pub tol: f64,
    pub max_terms: usize,
    pub order: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { q: 0.5, gamma: 0.9, tol: QContext::DEFAULT_REL_TOL, max_terms: QContext::DEFAULT_MAX_TERMS, order: 32 }
    }
}

impl Settings {
    pub fn family(&self) -> Result<GaussianFamily, CliError> {
        let ctx = QContext::with_policy(self.q, self.tol, self.max_terms, QContext::DEFAULT_TAIL_WINDOW)?;
        Ok(GaussianFamily::new(ctx, self.gamma)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Command result: a table of rows, or a descriptor with a report.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>> },
    Document { result: FunctionDescriptor, report: Map<String, Value> },
}

impl Output {
    /// Text for stdout. In CSV form a document prints its coefficients or
    /// table entries; the report is available through [`Output::report_lines`].
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table { columns, rows }, Format::Csv) => csv(columns, rows),
            (Output::Table { columns, rows }, Format::Json) => {
                let objs: Vec<Value> = rows
                    .iter()
                    .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                serde_json::to_string_pretty(&objs).expect("JSON values serialize")
            }
            (Output::Document { result, report }, Format::Json) => {
                serde_json::to_string_pretty(&json!({ "result": result, "report": report })).expect("JSON values serialize")
            }
            (Output::Document { result, .. }, Format::Csv) => match result {
                FunctionDescriptor::GaussianSeries { coeffs, .. } | FunctionDescriptor::PowerSeries { coeffs, .. } => {
                    let rows = coeffs.iter().enumerate().map(|(i, z)| vec![json!(i), json!(z.0), json!(z.1)]).collect::<Vec<_>>();
                    csv(&["index", "re", "im"], &rows)
                }
                FunctionDescriptor::LatticeTable { entries, .. } => {
                    let rows = entries.iter().map(|e| vec![json!(e.sign), json!(e.k), json!(e.value.0), json!(e.value.1)]).collect::<Vec<_>>();
                    csv(&["sign", "k", "re", "im"], &rows)
                }
                other => other.to_json(),
            },
        }
    }

    /// `key: value` lines of a document's report.
    pub fn report_lines(&self) -> Vec<String> {
        match self {
            Output::Document { report, .. } => report.iter().map(|(k, v)| format!("{k}: {v}")).collect(),
            Output::Table { .. } => Vec::new(),
        }
    }
}

fn csv(columns: &[&str], rows: &[Vec<Value>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses `x` or `re+imi`/`re-imi` style points; plain reals are the common case.
pub fn parse_point(s: &str) -> Result<C64, CliError> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(C64::new(x, 0.0));
    }
    s.parse::<C64>().map_err(|_| CliError::Parse(format!("bad point `{s}`")))
}

/// Values at the given points, or over the residual window when none are given.
pub fn cmd_eval(desc: &FunctionDescriptor, points: &[C64], s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let f = desc.to_function(&fam, s.order)?;
    let pts: Vec<C64> = if points.is_empty() {
        lattice_window(s.gamma, RESIDUAL_WINDOW.0..=RESIDUAL_WINDOW.1).iter().map(|p| C64::new(p.value(s.q), 0.0)).collect()
    } else {
        points.to_vec()
    };
    let mut rows = Vec::new();
    for x in pts {
        let v = f.eval(x, fam.ctx())?;
        rows.push(vec![json!(x.re), json!(x.im), json!(v.re), json!(v.im)]);
    }
    Ok(Output::Table { columns: vec!["x_re", "x_im", "re", "im"], rows })
}

pub fn cmd_moments(desc: &FunctionDescriptor, up_to: usize, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let m = desc.to_function(&fam, s.order)?.moments(&fam, up_to)?;
    let rows = (0..=up_to).map(|e| vec![json!(e), json!(m.get(e).re), json!(m.get(e).im)]).collect();
    Ok(Output::Table { columns: vec!["e", "re", "im"], rows })
}

pub fn cmd_convolve(f: &FunctionDescriptor, g: &FunctionDescriptor, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let ff = f.to_function(&fam, s.order)?;
    let gg = g.to_function(&fam, s.order)?;
    let p = convolve(&ff, &gg, &fam, s.order)?;
    let (result, path) = match &p {
        Product::Gaussian(h) => (FunctionDescriptor::from_gaussian(h), "hermite_action"),
        Product::Power(h) => (FunctionDescriptor::from_power(h), "moment_series"),
        Product::Lattice(_) | Product::Pointwise(_) => {
            let path = if matches!(p, Product::Lattice(_)) { "delta_closed_form" } else { "moment_series" };
            let ctx = *fam.ctx();
            (FunctionDescriptor::tabulate(s.gamma, s.q, RESIDUAL_WINDOW.0, RESIDUAL_WINDOW.1, |x| p.eval(x, &ctx))?, path)
        }
    };
    let mut report = Map::new();
    report.insert("path".into(), json!(path));
    Ok(Output::Document { result, report })
}

/// `F̃_γ`, or `F̃′_γ` when `prime` is set, through coefficient `order`.
pub fn cmd_fourier(desc: &FunctionDescriptor, prime: bool, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let f = desc.to_function(&fam, s.order)?;
    let img = if prime { fourier_formal_prime(&f, &fam, s.order)? } else { fourier_formal(&f, &fam, s.order)? };
    let mut report = Map::new();
    report.insert("transform".into(), json!(if prime { "F~'" } else { "F~" }));
    report.insert("source_gamma".into(), json!(img.source_gamma));
    Ok(Output::Document { result: FunctionDescriptor::from_power(&img.series), report })
}

/// `𝒢_γ` of a power series.
pub fn cmd_ifourier(desc: &FunctionDescriptor, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let phi = desc.to_power_series()?;
    let g = fourier_inverse_g(&phi, &fam, s.order)?;
    Ok(Output::Document { result: FunctionDescriptor::from_gaussian(&g), report: Map::new() })
}

pub fn cmd_invert(desc: &FunctionDescriptor, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let rep = convolution_inverse(&desc.to_function(&fam, s.order)?, &fam, s.order)?;
    let mut report = Map::new();
    report.insert("rho".into(), finite_or_string(rep.rho));
    report.insert("strong".into(), json!(rep.strong));
    Ok(Output::Document { result: FunctionDescriptor::from_gaussian(&rep.g), report })
}

/// Solves `Σ c_n ∂^n Y = F`; `operator` is a JSON array of real or `[re, im]` coefficients.
pub fn cmd_solve(operator: &str, rhs: &FunctionDescriptor, s: &Settings) -> Result<Output, CliError> {
    let fam = s.family()?;
    let l = QDiffOperator::new(parse_operator(operator)?)?;
    let f = match rhs.to_function(&fam, s.order)? {
        qconv::function::QFunction::Gaussian(g) => Rhs::Gaussian(g),
        qconv::function::QFunction::Power(p) => Rhs::Power(p),
        other => {
            return Err(QError::Domain(format!(
                "the solver takes Gaussian-series or power-series data, got {}",
                other.kind()
            ))
            .into())
        }
    };
    let rep = solve(&l, &f, &fam, s.order)?;
    let result = match &rep.solution {
        Solution::Gaussian(y) => FunctionDescriptor::from_gaussian(y),
        Solution::Power(y) => FunctionDescriptor::from_power(y),
    };
    let mut report = Map::new();
    report.insert("shift_p".into(), json!(rep.shift_p));
    report.insert("rho".into(), finite_or_string(rep.rho));
    report.insert("residual".into(), json!(rep.residual));
    report.insert("approximate".into(), json!(rep.approximate));
    report.insert("note".into(), json!(rep.note));
    Ok(Output::Document { result, report })
}

/// Runs named checks (or `all`); the boolean is true when every check passes.
pub fn cmd_check(names: &[String], s: &Settings) -> Result<(Output, bool), CliError> {
    let fam = s.family()?;
    let selected: Vec<&str> = if names.is_empty() || names.iter().any(|n| n == "all") {
        checks::NAMES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for name in selected {
        let r = checks::run(name, &fam, s.order)?;
        ok &= r.pass();
        rows.push(vec![json!(name), json!(if r.pass() { "PASS" } else { "FAIL" }), finite_or_string(r.measured), json!(r.tolerance)]);
    }
    Ok((Output::Table { columns: vec!["check", "status", "measured", "tolerance"], rows }, ok))
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn parse_operator(text: &str) -> Result<Vec<C64>, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Coef {
        Real(f64),
        Pair(f64, f64),
    }
    let raw: Vec<Coef> = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!("operator at line {}, column {}: {e}", e.line(), e.column()))
    })?;
    Ok(raw
        .into_iter()
        .map(|c| match c {
            Coef::Real(x) => C64::new(x, 0.0),
            Coef::Pair(a, b) => C64::new(a, b),
        })
        .collect())
}

//! Commands behind the `crossings` binary.
//!
//! Each command is a pure function of its arguments (and seed) that returns
//! the text to print, so the binary only parses flags and maps errors to exit
//! codes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crossings_core::mvn::{ar1_matrix, orthant_qmc_with, QmcConfig};
use crossings_core::orthant::{
    cheng_i, cheng_i_quadrature, f4, g4, p11111, q_pattern_4of5, quadrature_j, special_j_closed, ChengArgs,
    FourDimFactor, JArgs,
};
use crossings_core::{
    iia_variance, mean_sign_changes, pattern_probability, simulate, variance_exact, Error, Method, ProbEstimate, Rho,
    SignPattern, SimConfig,
};

pub mod verify;

pub use verify::{cmd_verify, Check, VerifyOptions, VerifyReport};

/// Shortest decimal that parses back to the same `f64`, never in exponent
/// form, with `.` as the separator.
pub fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Grid points are rounded to 12 decimals so `-0.99 + k·0.005` prints as the
/// decimal the user asked for.
fn grid_rho(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantRow {
    pub name: &'static str,
    pub value: f64,
    pub method: Method,
}

pub fn constants(rho: f64) -> crossings_core::Result<Vec<ConstantRow>> {
    let r = Rho::new(rho)?;
    let p = r.value();
    let f = |a, b| FourDimFactor::new(a, b).map(f4);
    let g = |a, b| FourDimFactor::new(a, b).map(g4);
    let closed = Method::ClosedForm;
    Ok(vec![
        ConstantRow { name: "f(r,r)", value: f(p, p)?, method: closed },
        ConstantRow { name: "g(r,r)", value: g(p, p)?, method: closed },
        ConstantRow { name: "f(r,-r)", value: f(p, -p)?, method: closed },
        ConstantRow { name: "g(r,-r)", value: g(p, -p)?, method: closed },
        ConstantRow { name: "f(-r,r)", value: f(-p, p)?, method: closed },
        ConstantRow { name: "f(-r,-r)", value: f(-p, -p)?, method: closed },
        ConstantRow { name: "V(S4)", value: variance_exact(4, r)?, method: closed },
        ConstantRow { name: "q1245", value: q_pattern_4of5([1, 2, 4, 5], r)?, method: closed },
        ConstantRow { name: "q1345", value: q_pattern_4of5([1, 3, 4, 5], r)?, method: Method::Quadrature },
    ])
}

pub fn cmd_constants(rho: f64) -> crossings_core::Result<String> {
    let mut out = String::new();
    writeln!(out, "rho = {}", fmt_value(rho)).unwrap();
    for row in constants(rho)? {
        writeln!(out, "{:<9} {:<24} {}", row.name, fmt_value(row.value), row.method).unwrap();
    }
    Ok(out)
}

/// One grid point of the `n = 4` variance curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub rho: f64,
    pub theory_var: f64,
    pub model_var: f64,
    pub model_var_symmetrized: f64,
}

pub const CURVE_HEADER: &str = "rho,theory_var,model_var,model_var_abs";

pub fn curve_rows(n: usize, rho_min: f64, rho_max: f64, step: f64) -> crossings_core::Result<Vec<CurveRow>> {
    if n != 4 {
        return Err(Error::Domain(format!("the exact variance curve needs n = 4, got {n}")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    Rho::new(rho_min)?;
    Rho::new(rho_max)?;
    if rho_min > rho_max {
        return Err(Error::Domain(format!("rho-min {rho_min} exceeds rho-max {rho_max}")));
    }
    let count = ((rho_max - rho_min) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let rho = grid_rho(rho_min + i as f64 * step);
            let r = Rho::new(rho)?;
            Ok(CurveRow {
                rho,
                theory_var: variance_exact(n, r)?,
                model_var: iia_variance(n, r, false)?,
                model_var_symmetrized: iia_variance(n, r, true)?,
            })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], mut w: W) -> io::Result<()> {
    w.write_all(CURVE_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_value(row.rho),
            fmt_value(row.theory_var),
            fmt_value(row.model_var),
            fmt_value(row.model_var_symmetrized)
        )?;
    }
    w.flush()
}

pub fn cmd_curve(n: usize, rho_min: f64, rho_max: f64, step: f64, out: &Path) -> anyhow::Result<Vec<CurveRow>> {
    let rows = curve_rows(n, rho_min, rho_max, step)?;
    let file = File::create(out).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", out.display()))?;
    write_curve_csv(&rows, BufWriter::new(file))?;
    Ok(rows)
}

pub fn cmd_simulate(n: usize, rho: f64, paths: u64, seed: u64, csv: bool) -> crossings_core::Result<String> {
    let cfg = SimConfig { n, rho: Rho::new(rho)?, paths, seed };
    let res = simulate(&cfg)?;
    let mut out = String::new();
    if csv {
        writeln!(out, "n,rho,paths,seed,mean,var,se_mean,se_var").unwrap();
        writeln!(
            out,
            "{n},{},{paths},{seed},{},{},{},{}",
            fmt_value(rho),
            fmt_value(res.mean_hat),
            fmt_value(res.var_hat),
            fmt_value(res.se_mean),
            fmt_value(res.se_var)
        )
        .unwrap();
    } else {
        let exact_mean = mean_sign_changes(n, cfg.rho)?;
        writeln!(out, "n = {n}, rho = {}, paths = {paths}, seed = {seed}", fmt_value(rho)).unwrap();
        writeln!(
            out,
            "mean     {} (se {}, theory {})",
            fmt_value(res.mean_hat),
            fmt_value(res.se_mean),
            fmt_value(exact_mean)
        )
        .unwrap();
        write!(out, "variance {} (se {}", fmt_value(res.var_hat), fmt_value(res.se_var)).unwrap();
        if let Ok(v) = variance_exact(n, cfg.rho) {
            write!(out, ", theory {}", fmt_value(v)).unwrap();
        }
        writeln!(out, ")").unwrap();
        for (k, c) in res.histogram.iter().enumerate() {
            writeln!(out, "S = {k:<3} {c}").unwrap();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthantMethod {
    Closed,
    Qmc,
}

pub fn orthant(
    pattern: &str,
    rho: f64,
    method: OrthantMethod,
    tol: f64,
    seed: u64,
) -> crossings_core::Result<ProbEstimate> {
    let e: SignPattern = pattern.parse()?;
    let r = Rho::new(rho)?;
    match method {
        OrthantMethod::Closed if e.len() <= 4 => pattern_probability(&e, r),
        OrthantMethod::Closed if e.len() == 5 && e.changes() == 0 => p11111(r).map(ProbEstimate::closed_form),
        OrthantMethod::Closed => {
            Err(Error::Domain(format!("no closed form for pattern {e}; closed forms cover n <= 4 and 11111/00000")))
        }
        OrthantMethod::Qmc => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
            }
            orthant_qmc_with(&ar1_matrix(r, e.len())?, &e, &QmcConfig::new(tol, seed))
        }
    }
}

pub fn cmd_orthant(
    pattern: &str,
    rho: f64,
    method: OrthantMethod,
    tol: f64,
    seed: u64,
) -> crossings_core::Result<String> {
    let est = orthant(pattern, rho, method, tol, seed)?;
    Ok(format!(
        "pattern,rho,method,value,error,samples\n{pattern},{},{},{},{},{}\n",
        fmt_value(rho),
        est.method,
        fmt_value(est.value),
        fmt_value(est.error),
        est.samples
    ))
}

/// `|I(h,x)|` dilogarithm form against adaptive quadrature.
pub(crate) fn cheng_gap(h: f64, x: f64) -> crossings_core::Result<f64> {
    let args = ChengArgs::new(h, x)?;
    Ok((cheng_i(args) - cheng_i_quadrature(args)?.value).abs())
}

/// `|J(h,h,x) - I(h,x)|`.
pub(crate) fn j_reduction_gap(h: f64, x: f64) -> crossings_core::Result<f64> {
    Ok((quadrature_j(JArgs::new(h, h, x)?)? - cheng_i(ChengArgs::new(h, x)?)).abs())
}

/// `|special J closed form - quadrature|`.
pub(crate) fn special_j_gap(k: f64) -> crossings_core::Result<f64> {
    Ok((special_j_closed(k)? - quadrature_j(JArgs::special(k)?)?).abs())
}

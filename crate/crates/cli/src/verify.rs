//! Self-check suite: golden constants, identities and oracle cross-checks.

use std::fmt::Write as _;

use crossings_core::mvn::{ar1_matrix, orthant_qmc, CorrelationMatrix};
use crossings_core::orthant::{p11111, q_pattern_4of5};
use crossings_core::{
    mean_sign_changes, simulate, variance_exact, variance_numeric, Error, Rho, SignPattern, SimConfig,
};

use crate::{cheng_gap, constants, fmt_value, j_reduction_gap, special_j_gap};

/// Reference values at `ρ = 1/2`, keyed by the `constants` row name.
#[allow(clippy::excessive_precision)]
pub const GOLDEN: [(&str, f64); 7] = [
    ("f(r,r)", 0.157_662_581_754_482_541_615_959_6),
    ("g(r,r)", 0.070_778_407_392_642_352_660_111_2),
    ("f(r,-r)", 0.065_807_331_541_540_695_670_708_1),
    ("g(r,-r)", 0.039_085_012_644_667_743_386_554_2),
    ("f(-r,r)", 0.034_113_936_793_566_086_397_151_2),
    ("f(-r,-r)", 0.022_689_309_835_790_484_222_849_9),
    ("V(S4)", 0.721_407_566_361_092_103_355_238_4),
];

#[allow(clippy::excessive_precision)]
pub const FIVE_POINT: [(&str, f64); 2] =
    [("q1245", 0.133_776_821_269_470_249_442_361_9), ("q1345", 0.135_445_152_066_138_699_923_568_3)];

/// Smallest pass bar for the golden constants, whatever `--tol` asks for.
pub const GOLDEN_FLOOR: f64 = 1e-12;
#[allow(clippy::excessive_precision)]
pub const FIVE_POINT_FLOOR: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-9;
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub fast: bool,
    /// Name of a golden constant whose reference value is perturbed by 1e-6.
    pub corrupt: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: GOLDEN_FLOOR, fast: false, corrupt: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {} {}", c.name, c.detail).unwrap();
        }
        match self.first_failure() {
            None => writeln!(out, "verify: all {} checks passed", self.checks.len()).unwrap(),
            Some(c) => writeln!(out, "verify: FAILED at {}", c.name).unwrap(),
        }
        out
    }

    fn within(&mut self, name: impl Into<String>, got: crossings_core::Result<f64>, want: f64, bar: f64) {
        let name = name.into();
        match got {
            Ok(v) => {
                let err = (v - want).abs();
                self.checks.push(Check {
                    name,
                    passed: err <= bar,
                    detail: format!("value={} ref={} err={err:.3e} bar={bar:.1e}", fmt_value(v), fmt_value(want)),
                });
            }
            Err(e) => self.checks.push(Check { name, passed: false, detail: format!("error: {e}") }),
        }
    }

    fn max_gap(&mut self, name: &str, gaps: impl Iterator<Item = crossings_core::Result<f64>>, bar: f64) {
        let name = name.to_string();
        match gaps.collect::<crossings_core::Result<Vec<f64>>>() {
            Ok(g) => {
                let worst = g.iter().copied().fold(0.0, f64::max);
                self.checks.push(Check {
                    name,
                    passed: worst <= bar,
                    detail: format!("points={} max_err={worst:.3e} bar={bar:.1e}", g.len()),
                });
            }
            Err(e) => self.checks.push(Check { name, passed: false, detail: format!("error: {e}") }),
        }
    }
}

fn rho(v: f64) -> Rho {
    Rho::new(v).expect("fixed grid point lies inside (-1, 1)")
}

fn grid(points: usize) -> impl Iterator<Item = f64> {
    let h = 2.0 / (points + 1) as f64;
    (1..=points).map(move |i| -1.0 + i as f64 * h)
}

pub fn cmd_verify(opts: &VerifyOptions) -> crossings_core::Result<VerifyReport> {
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Some(name) = &opts.corrupt {
        if !GOLDEN.iter().chain(&FIVE_POINT).any(|(n, _)| n == name) {
            return Err(Error::Domain(format!("unknown constant {name:?}")));
        }
    }
    let reference = |name: &str, v: f64| if opts.corrupt.as_deref() == Some(name) { v + 1e-6 } else { v };
    let mut report = VerifyReport::default();

    let rows = constants(0.5)?;
    let row = |name: &str| rows.iter().find(|r| r.name == name).map(|r| r.value).expect("row exists");
    let golden_bar = opts.tol.max(GOLDEN_FLOOR);
    for (name, want) in GOLDEN {
        report.within(format!("golden {name}"), Ok(row(name)), reference(name, want), golden_bar);
    }
    let five_point_bar = opts.tol.max(FIVE_POINT_FLOOR);
    for (name, want) in FIVE_POINT {
        report.within(format!("golden {name}"), Ok(row(name)), reference(name, want), five_point_bar);
    }

    let points = if opts.fast { 19 } else { 199 };
    report.max_gap(
        "identity sum-to-one n=4",
        grid(points).map(|p| {
            let r = rho(p);
            let total = SignPattern::all(4)
                .map(|e| crossings_core::pattern_probability(&e, r).map(|x| x.value))
                .sum::<crossings_core::Result<f64>>()?;
            Ok((total - 1.0).abs())
        }),
        GOLDEN_FLOOR,
    );
    report.max_gap(
        "identity rice-mean n=4",
        grid(points).map(|p| {
            let r = rho(p);
            Ok((variance_numeric(4, r, 1e-10, 0)?.mean - mean_sign_changes(4, r)?).abs())
        }),
        GOLDEN_FLOOR,
    );
    report.max_gap(
        "identity variance n=4",
        grid(points).map(|p| {
            let r = rho(p);
            Ok((variance_numeric(4, r, 1e-10, 0)?.variance - variance_exact(4, r)?).abs())
        }),
        GOLDEN_FLOOR,
    );
    let hx: Vec<(f64, f64)> =
        [0.15, 0.4, 0.65, 0.9].iter().flat_map(|&h: &f64| [0.1, 0.5, 0.9].map(|t| (h, t * h * h))).collect();
    report.max_gap("identity cheng-I dilog vs quadrature", hx.iter().map(|&(h, x)| cheng_gap(h, x)), FIVE_POINT_FLOOR);
    report.max_gap("identity J(h,h,x) = I(h,x)", hx.iter().map(|&(h, x)| j_reduction_gap(h, x)), FIVE_POINT_FLOOR);
    report.max_gap(
        "identity special J closed vs quadrature",
        [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().map(special_j_gap),
        FIVE_POINT_FLOOR,
    );
    let binom_max = if opts.fast { 5 } else { 6 };
    for n in 2..=binom_max {
        let rep = variance_numeric(n, rho(0.0), 1e-10, 0);
        let want = (n - 1) as f64 / 4.0;
        match rep {
            Ok(rep) => {
                let bar = GOLDEN_FLOOR.max(rep.variance_error);
                report.within(format!("identity binomial variance n={n}"), Ok(rep.variance), want, bar)
            }
            Err(e) => report.within(format!("identity binomial variance n={n}"), Err(e), want, 0.0),
        }
    }

    let patterns: Vec<SignPattern> = if opts.fast {
        vec!["1111".parse()?, "1010".parse()?]
    } else {
        SignPattern::all(4).filter(|e| e.bits()[0]).collect()
    };
    for p in [-0.5, 0.5] {
        let r = rho(p);
        let m = ar1_matrix(r, 4)?;
        for e in &patterns {
            let closed = crossings_core::pattern_probability(e, r)?.value;
            report.within(format!("oracle qmc p{e} rho={p}"), qmc_value(&m, e), closed, ORACLE_TOL);
        }
    }
    let r = rho(0.5);
    let five = ar1_matrix(r, 5)?;
    report.within("oracle qmc p11111 rho=0.5", qmc_value(&five, &"11111".parse()?), p11111(r)?, ORACLE_TOL);
    report.within(
        "oracle qmc q1345 rho=-0.5",
        CorrelationMatrix::new(4, four_of_five(-0.5, [1, 3, 4, 5])).and_then(|m| qmc_value(&m, &"1111".parse()?)),
        q_pattern_4of5([1, 3, 4, 5], rho(-0.5))?,
        ORACLE_TOL,
    );

    let paths = if opts.fast { 100_000 } else { 1_000_000 };
    for p in [-0.5, 0.5] {
        let r = rho(p);
        match simulate(&SimConfig { n: 4, rho: r, paths, seed: 20_240_601 }) {
            Ok(sim) => {
                report.within(
                    format!("oracle mc mean rho={p}"),
                    Ok(sim.mean_hat),
                    mean_sign_changes(4, r)?,
                    MC_SIGMAS * sim.se_mean,
                );
                report.within(
                    format!("oracle mc variance rho={p}"),
                    Ok(sim.var_hat),
                    variance_exact(4, r)?,
                    MC_SIGMAS * sim.se_var,
                );
            }
            Err(e) => report.within(format!("oracle mc rho={p}"), Err(e), 0.0, 0.0),
        }
    }
    Ok(report)
}

fn qmc_value(m: &CorrelationMatrix, e: &SignPattern) -> crossings_core::Result<f64> {
    orthant_qmc(m, e, 1e-10, 0).map(|p| p.value)
}

/// Correlation matrix of four time points of an AR(1) segment.
fn four_of_five(p: f64, idx: [usize; 4]) -> Vec<f64> {
    let mut data = vec![0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            data[i * 4 + j] = p.powi(idx[i].abs_diff(idx[j]) as i32);
        }
    }
    data
}

//! Suite execution: every check becomes one row with its pass/fail verdict.

use std::f64::consts::PI;
use std::time::Instant;

use log::{info, warn};
use serde::Serialize;
use sharplab::flat::{
    check_p_ode, check_pqr_identity, double_hardy_report, fit_power_law, gaussian_t,
    gaussian_t_ode_residual, hardy_sharpness_sweep, hpw_moment_identity, hpw_report,
    quintic_cutoff, TestFunction,
};
use sharplab::hyperbolic::{
    d_c, hardy_hyperbolic_report, hpw_constant_bounds, hpw_hyperbolic_report,
    hyp_volume_ratio_check, ko_alpha_scan, laplace_comparison_check, modified_hpw_report,
    RadialHypFunction,
};
use sharplab::{Decay, InequalityReport, MinkowskiNorm, QuadratureSpec};

use crate::config::{ConfigError, RunConfig, Suite};

/// How a report is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `|slack| <= tol`.
    Equal(f64),
    /// `slack >= -tol`.
    AtLeast(f64),
    /// `slack > 100 x` the propagated integral error.
    Strict,
    /// `slack == 0`.
    Exact,
}

/// Ten times the report's own numerical error, the default lower-bound tolerance.
fn numeric(r: &InequalityReport) -> Criterion {
    Criterion::AtLeast(10.0 * r.combined_tolerance())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub check: String,
    pub param: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub target: f64,
    pub slack: f64,
    pub err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub error: Option<String>,
}

impl CheckRow {
    fn judge(
        suite: Suite,
        report: &InequalityReport,
        criterion: Criterion,
        override_tol: Option<f64>,
    ) -> Self {
        let (tolerance, pass) = match criterion {
            Criterion::Equal(t) => {
                let t = override_tol.unwrap_or(t);
                (t, report.slack.abs() <= t)
            }
            Criterion::AtLeast(t) => {
                let t = override_tol.unwrap_or(t);
                (t, report.slack >= -t)
            }
            Criterion::Strict => {
                let t = 100.0 * report.combined_tolerance();
                (t, report.slack > t)
            }
            Criterion::Exact => (0.0, report.slack == 0.0),
        };
        Self {
            suite: suite.name().into(),
            check: report.label.clone(),
            param: report.param.is_finite().then_some(report.param),
            lhs: report.lhs,
            rhs: report.rhs,
            ratio: report.ratio,
            target: report.target,
            slack: report.slack,
            err: report.ratio_error,
            tolerance,
            pass: pass && report.is_finite(),
            error: None,
        }
    }

    fn failed(suite: Suite, check: &str, message: String) -> Self {
        Self {
            suite: suite.name().into(),
            check: check.into(),
            param: None,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            target: f64::NAN,
            slack: f64::NAN,
            err: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
            error: Some(message),
        }
    }
}

/// An xy-series for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub config_hash: String,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub pass: bool,
    pub rows: Vec<CheckRow>,
    #[serde(skip)]
    pub plots: Vec<PlotData>,
}

impl SuiteResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

/// Collects the rows of one suite; computation errors become failing rows.
struct Recorder<'a> {
    suite: Suite,
    config: &'a RunConfig,
    spec: QuadratureSpec,
    rows: Vec<CheckRow>,
    plots: Vec<PlotData>,
}

impl Recorder<'_> {
    fn push(&mut self, report: &InequalityReport, criterion: Criterion) {
        self.rows.push(CheckRow::judge(
            self.suite,
            report,
            criterion,
            self.config.tolerance,
        ));
    }

    /// Runs `f`, recording a failing row named `check` if it errors.
    fn attempt(&mut self, check: &str, f: impl FnOnce(&mut Self) -> sharplab::Result<()>) {
        if let Err(e) = f(self) {
            warn!("{}: {check} failed: {e}", self.suite);
            self.rows
                .push(CheckRow::failed(self.suite, check, e.to_string()));
        }
    }
}

/// A quantity compared against an expected value: `ratio = value`, `target = expected`.
fn measured(label: impl Into<String>, param: f64, value: f64, expected: f64) -> InequalityReport {
    InequalityReport::new(label, param, value, 1.0, expected)
}

fn smooth_bump() -> TestFunction {
    TestFunction::radial(
        |r| quintic_cutoff(0.0, 1.0, r).0,
        |r| quintic_cutoff(0.0, 1.0, r).1,
        Decay::Compact(1.0),
    )
    .with_breakpoints(vec![1.0])
}

fn identities(rec: &mut Recorder) {
    let t = rec.config.triple();
    let lambdas = rec.config.lambda_grid(&[0.1, 1.0, 10.0]);
    let spec = rec.spec;
    rec.attempt("interpolation identity", |rec| {
        for r in check_pqr_identity(&t, &lambdas, &spec)? {
            rec.push(&r, Criterion::Equal(1e-6));
        }
        Ok(())
    });
    rec.attempt("P ODE residual", |rec| {
        let residuals = check_p_ode(&t, &lambdas, &spec)?;
        for r in &residuals {
            rec.push(
                &measured("P ODE relative residual", r.lambda, r.relative, 0.0),
                Criterion::Equal(1e-5),
            );
        }
        if lambdas.len() >= 2 {
            let values: Vec<f64> = residuals.iter().map(|r| r.value).collect();
            let (e, _) = fit_power_law(&lambdas, &values)?;
            rec.push(
                &measured("P power-law exponent", f64::NAN, e, t.p_power_exponent()),
                Criterion::Equal(1e-4),
            );
        }
        Ok(())
    });
    let dims = rec.config.dimensions(&[3, 4]);
    rec.attempt("T closed form", |rec| {
        for &n in &dims {
            for &lambda in &lambdas {
                let g = gaussian_t(n, lambda, &spec)?;
                rec.push(
                    &InequalityReport::new(
                        format!("T closed form, n = {n}"),
                        lambda,
                        g.value.value,
                        g.closed_form,
                        1.0,
                    ),
                    Criterion::Equal(1e-9),
                );
                let res = gaussian_t_ode_residual(n, lambda, &spec)?;
                rec.push(
                    &measured(
                        format!("T ODE relative residual, n = {n}"),
                        lambda,
                        res,
                        0.0,
                    ),
                    Criterion::Equal(1e-6),
                );
            }
        }
        Ok(())
    });
    rec.attempt("HPW moment identity", |rec| {
        for &lambda in &lambdas {
            rec.push(
                &hpw_moment_identity(t.n(), lambda, &spec)?,
                Criterion::Equal(1e-8),
            );
        }
        Ok(())
    });
}

fn build_norm(rec: &RunConfig) -> sharplab::Result<MinkowskiNorm> {
    rec.norm_config().build()
}

fn flat_hpw(rec: &mut Recorder) {
    let lambdas = rec.config.lambda_grid(&[0.5, 1.0, 2.0]);
    let spec = rec.spec;
    rec.attempt("flat HPW", |rec| {
        let norm = build_norm(rec.config)?;
        let n = norm.dimension();
        for &lambda in &lambdas {
            let mut r = hpw_report(&norm, n, &TestFunction::gaussian(lambda), &spec)?;
            r.label = "HPW Gaussian".into();
            r.param = lambda;
            rec.push(&r, Criterion::Equal(1e-6));
            rec.push(
                &hpw_moment_identity(n, lambda, &spec)?,
                Criterion::Equal(1e-8),
            );
        }
        let u = TestFunction::radial(
            |r| (1.0 + r * r) * (-r * r).exp(),
            |r| -2.0 * r.powi(3) * (-r * r).exp(),
            Decay::Gaussian(1.0),
        );
        let mut r = hpw_report(&norm, n, &u, &spec)?;
        r.label = "HPW (1 + rho^2) exp(-rho^2)".into();
        let criterion = numeric(&r);
        rec.push(&r, criterion);
        Ok(())
    });
}

fn flat_hardy(rec: &mut Recorder) {
    let eps = rec.config.epsilon_grid();
    let h = rec.config.hardy();
    let spec = rec.spec;
    rec.attempt("Hardy sharpness", |rec| {
        let norm = build_norm(rec.config)?;
        let n = norm.dimension();
        let sweep = hardy_sharpness_sweep(&norm, n, h.inner_radius, h.outer_radius, &eps, &spec)?;
        for r in &sweep.reports {
            let criterion = numeric(r);
            rec.push(r, criterion);
        }
        let min_drop = sweep
            .points
            .windows(2)
            .map(|w| w[0].quotient - w[1].quotient)
            .fold(f64::INFINITY, f64::min);
        if sweep.points.len() >= 2 {
            rec.push(
                &measured("Hardy quotient decrease", f64::NAN, min_drop, 0.0),
                Criterion::AtLeast(1e-12),
            );
        }
        rec.push(
            &measured(
                "Hardy extrapolated limit",
                f64::NAN,
                sweep.limit,
                sweep.target,
            ),
            Criterion::Equal(0.01),
        );
        rec.push(
            &measured(
                "Hardy 1/I2 extrapolated limit",
                f64::NAN,
                sweep.inverse_i2.limit,
                sweep.target,
            ),
            Criterion::Equal(1e-6),
        );
        rec.plots.push(PlotData {
            name: "hardy_quotient".into(),
            header: vec![
                "epsilon".into(),
                "log_inverse_epsilon".into(),
                "quotient".into(),
            ],
            rows: sweep
                .points
                .iter()
                .map(|p| vec![p.epsilon, -p.epsilon.ln(), p.quotient])
                .collect(),
        });
        Ok(())
    });
    rec.attempt("double Hardy", |rec| {
        let norm = build_norm(rec.config)?;
        let mut r = double_hardy_report(
            &norm,
            norm.dimension(),
            &smooth_bump(),
            h.double_radius,
            &spec,
        )?;
        r.param = h.double_radius;
        let criterion = numeric(&r);
        rec.push(&r, criterion);
        Ok(())
    });
}

fn hyperbolic(rec: &mut Recorder) {
    let dims = rec.config.dimensions(&[3, 4, 5]);
    let alphas = rec.config.alpha_grid(&[0.25, 1.0, 4.0]);
    let rhos = rec.config.rho_grid();
    let spec = rec.spec;
    rec.attempt("modified hyperbolic HPW", |rec| {
        for &n in &dims {
            for &alpha in &alphas {
                let mut r = modified_hpw_report(alpha, n, &spec)?;
                r.label = format!("modified hyperbolic HPW, n = {n}");
                rec.push(&r, Criterion::Equal(1e-6));
            }
        }
        Ok(())
    });
    rec.attempt("hyperbolic HPW strictness", |rec| {
        for &n in &dims {
            for &alpha in &alphas {
                let mut r = hpw_hyperbolic_report(&RadialHypFunction::gaussian(alpha)?, n, &spec)?;
                r.label = format!("hyperbolic HPW, n = {n}");
                r.param = alpha;
                rec.push(&r, Criterion::Strict);
            }
        }
        Ok(())
    });
    rec.attempt("hyperbolic Hardy", |rec| {
        let u = RadialHypFunction::linear_gaussian(1.0)?;
        for &n in &dims {
            for mut r in hardy_hyperbolic_report(&u, n, &spec)? {
                r.label = format!("{}, n = {n}", r.label);
                let criterion = numeric(&r);
                rec.push(&r, criterion);
            }
        }
        let gap = (1..=10_000)
            .map(|k| {
                let r = 50.0 * k as f64 / 10_000.0;
                d_c(-1.0, r).map(|d| d - 3.0 * r * r / (PI * PI + r * r))
            })
            .collect::<sharplab::Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        rec.push(
            &measured(
                "rho coth rho - 1 - 3 rho^2/(pi^2 + rho^2), minimum",
                f64::NAN,
                gap,
                0.0,
            ),
            Criterion::AtLeast(0.0),
        );
        Ok(())
    });
    rec.attempt("Laplacian comparison", |rec| {
        for &n in &dims {
            for mut r in laplace_comparison_check(n, &[-1.0], &rhos)? {
                r.label = format!("{}, n = {n}", r.label);
                rec.push(&r, Criterion::Equal(1e-12));
            }
            for mut r in laplace_comparison_check(n, &[0.0], &rhos)? {
                r.label = format!("{}, n = {n}", r.label);
                rec.push(&r, Criterion::Strict);
            }
        }
        Ok(())
    });
    rec.attempt("volume ratio", |rec| {
        let mut grid = vec![0.01];
        grid.extend(rhos.iter().copied().filter(|&r| r > 0.01));
        let mut plot = Vec::new();
        for &n in &dims {
            let c = hyp_volume_ratio_check(n, &grid, &spec)?;
            let min_step = c
                .points
                .windows(2)
                .map(|w| w[1].ratio - w[0].ratio)
                .fold(f64::INFINITY, f64::min);
            rec.push(
                &measured(
                    format!("volume ratio increment, n = {n}"),
                    f64::NAN,
                    min_step,
                    0.0,
                ),
                Criterion::AtLeast(1e-10),
            );
            let min_ratio = c
                .points
                .iter()
                .map(|p| p.ratio)
                .fold(f64::INFINITY, f64::min);
            let r = InequalityReport::new(
                format!("volume ratio over omega_n, n = {n}"),
                f64::NAN,
                min_ratio,
                c.omega_n,
                1.0,
            );
            rec.push(&r, Criterion::AtLeast(1e-9));
            let small = InequalityReport::new(
                format!("small-ball volume ratio, n = {n}"),
                0.01,
                c.points[0].ratio,
                c.omega_n,
                1.0,
            );
            rec.push(&small, Criterion::Equal(1e-4));
            plot.extend(c.points.iter().map(|p| vec![n as f64, p.rho, p.ratio]));
        }
        rec.plots.push(PlotData {
            name: "volume_ratio".into(),
            header: vec!["n".into(), "rho".into(), "ratio".into()],
            rows: plot,
        });
        Ok(())
    });
}

fn ko_refute(rec: &mut Recorder) {
    let k = rec.config.ko();
    let spec = rec.spec;
    rec.attempt("alpha equation scan", |rec| {
        let scan = ko_alpha_scan(k.dimension, k.lower, k.upper, k.nodes, &spec)?;
        let changes = scan.brackets.len() as f64;
        for b in &scan.brackets {
            info!(
                "sign change of Phi in ({}, {}], root near {}",
                b.lo, b.hi, b.root
            );
        }
        let label = format!("alpha equation sign changes, n = {}", k.dimension);
        rec.push(
            &InequalityReport::new(label, f64::NAN, changes, 1.0, 0.0),
            Criterion::Exact,
        );
        rec.push(
            &InequalityReport::new(
                "alpha scan nodes out of range",
                f64::NAN,
                scan.flagged as f64,
                1.0,
                0.0,
            ),
            Criterion::Exact,
        );
        let (arg, min) = scan
            .nodes
            .iter()
            .filter_map(|n| n.phi.map(|p| (n.alpha, p)))
            .fold(
                (f64::NAN, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        rec.push(
            &measured("minimum of Phi", arg, min, 0.0),
            Criterion::Strict,
        );
        rec.plots.push(PlotData {
            name: "ko_phi".into(),
            header: vec!["alpha".into(), "phi".into()],
            rows: scan
                .nodes
                .iter()
                .filter_map(|n| n.phi.map(|p| vec![n.alpha, p]))
                .collect(),
        });
        Ok(())
    });
}

fn chpw_bounds(rec: &mut Recorder) {
    let dims = rec.config.dimensions(&[3, 4]);
    let alphas = rec.config.alpha_grid(&[0.25, 0.5, 1.0, 2.0, 4.0]);
    let betas = rec.config.beta_grid();
    let spec = rec.spec;
    rec.attempt("HPW constant bounds", |rec| {
        let mut plot = Vec::new();
        for &n in &dims {
            let b = hpw_constant_bounds(n, &alphas, &betas, &spec)?;
            let r = InequalityReport::new(
                format!("HPW constant upper over lower bound, n = {n}"),
                f64::NAN,
                b.upper,
                b.lower,
                1.0,
            );
            let criterion = numeric(&r);
            rec.push(&r, criterion);
            plot.push(vec![
                n as f64,
                b.lower,
                b.upper,
                b.argmin_alpha,
                b.argmin_beta,
            ]);
        }
        rec.plots.push(PlotData {
            name: "hpw_constant_bounds".into(),
            header: ["n", "lower", "upper", "argmin_alpha", "argmin_beta"]
                .map(String::from)
                .to_vec(),
            rows: plot,
        });
        Ok(())
    });
}

/// Runs every check of `config.suite`; never aborts on a failing check.
pub fn run_suite(config: &RunConfig) -> Result<SuiteResult, ConfigError> {
    config.validate()?;
    let config_hash = config.hash()?;
    let spec = config.quadrature();
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut plots = Vec::new();
    for suite in config.suite.members() {
        info!("running suite {suite}");
        let mut rec = Recorder {
            suite,
            config,
            spec,
            rows: Vec::new(),
            plots: Vec::new(),
        };
        match suite {
            Suite::Identities => identities(&mut rec),
            Suite::FlatHpw => flat_hpw(&mut rec),
            Suite::FlatHardy => flat_hardy(&mut rec),
            Suite::Hyperbolic => hyperbolic(&mut rec),
            Suite::KoRefute => ko_refute(&mut rec),
            Suite::ChpwBounds => chpw_bounds(&mut rec),
            Suite::All => unreachable!("expanded by members()"),
        }
        rows.extend(rec.rows);
        plots.extend(rec.plots);
    }
    let pass = !rows.is_empty() && rows.iter().all(|r| r.pass);
    Ok(SuiteResult {
        suite: config.suite,
        config_hash,
        seed: spec.mc_seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        pass,
        rows,
        plots,
    })
}

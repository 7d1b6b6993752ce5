//! Command execution: compute, write artifacts, report.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use stripelab_core::boundaries::{Leading, Plane, DEFAULT_CELL_CAP};
use stripelab_core::{CoefficientSet, DiagramGrid64, System64, TuringData64};
use stripelab_oracle::{
    calibrate_q_convention, compare_asymptotics, klausmeier_scan, KlausmeierParams, KlausmeierScan, OracleError,
    OracleSettings, Scenario, ScanSettings,
};
use thiserror::Error;

use crate::config::{
    emit_config, CalibrateParams, Command, ConfigError, DiagramParams, OracleParams, PlaneKind, RunConfig, ScanParams,
    SystemConfig,
};
use crate::emit::{boundaries_csv, emit_grid, emit_plot, fmt_num};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_ENV: &str = "STRIPELAB_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<stripelab_core::Error> for CliError {
    fn from(e: stripelab_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// Output of a successful run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    /// Human-readable summary lines.
    pub lines: Vec<String>,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
}

struct Sink<'a> {
    dir: &'a Path,
    report: Report,
}

impl Sink<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.report.files.push(path);
        Ok(())
    }

    fn line(&mut self, s: impl Into<String>) {
        self.report.lines.push(s.into());
    }
}

/// Output directory: `STRIPELAB_OUT` when set and non-empty, else the configured one.
pub fn output_dir(cfg: &RunConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => cfg.output_dir.clone(),
    }
}

/// Validated system of a configuration.
pub fn build_system(cfg: &SystemConfig) -> Result<System64, CliError> {
    cfg.spec()?.validate().map_err(|e| ConfigError::Range { field: "system".into(), message: e.to_string() }.into())
}

/// Run `cfg`, writing artifacts into `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<Report, CliError> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut sink = Sink { dir, report: Report::default() };
    sink.write("run_config.json", &emit_config(cfg))?;
    match &cfg.command {
        Command::Verify => verify(cfg, &mut sink)?,
        Command::Coeffs => coeffs(cfg, &mut sink)?,
        Command::Diagram(p) => diagram(cfg, p, &mut sink)?,
        Command::Oracle(p) => oracle(cfg, p, &mut sink)?,
        Command::Calibrate(p) => calibrate(cfg, p, &mut sink)?,
        Command::Scan(p) => scan(cfg, p, &mut sink)?,
    }
    Ok(sink.report)
}

fn key_values(rows: &[(&str, f64)]) -> String {
    let mut s = String::from("name,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{}", fmt_num(*v));
    }
    s
}

fn verify(cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let sys = build_system(&cfg.system)?;
    let rep = sys.turing_report()?;
    let rows = [
        ("stable_at_zero", f64::from(u8::from(rep.stable_at_zero))),
        ("critical_circle", f64::from(u8::from(rep.critical_circle))),
        ("simple_root", f64::from(u8::from(rep.simple_root))),
        ("kc_sq", rep.kc_sq),
        ("discriminant", rep.discriminant),
        ("dlambda_d", rep.dlambda_d),
        ("a2a3_residual", rep.a2a3_residual),
    ];
    sink.write("verify.csv", &key_values(&rows))?;
    for (k, v) in rows {
        sink.line(format!("{k} = {}", fmt_num(v)));
    }
    sys.verify_turing()?;
    sink.line("Turing conditions hold");
    Ok(())
}

fn linear_and_coeffs(sys: &System64) -> Result<(TuringData64, CoefficientSet<f64>), CliError> {
    let td = sys.linear_coeffs()?;
    let c = CoefficientSet::compute(sys, &td)?;
    Ok((td, c))
}

fn coeffs(cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let sys = build_system(&cfg.system)?;
    let (td, c) = linear_and_coeffs(&sys)?;
    let r = td.rates;
    let rows = [
        ("kc", td.kc),
        ("kc_sq", r.kc_sq),
        ("lambda_m", r.lambda_m),
        ("lambda_beta", r.lambda_beta),
        ("lambda_betabeta", r.lambda_betabeta),
        ("lambda_mbeta", td.lambda_mbeta),
        ("rho_beta", r.rho_beta),
        ("rho_kappa", r.rho_kappa),
        ("eckhaus_kappa_coefficient", 3.0 * r.rho_kappa),
        ("velocity_c", c.c),
        ("k0", c.k0),
        ("rho_nl", c.rho_nl),
        ("q_raw", c.q_raw()),
        ("q0", c.quad.q0),
        ("q1", c.quad.q1),
        ("q11", c.quad.q11),
        ("xi", c.xi),
        ("eta", c.eta),
    ];
    sink.write("coeffs.csv", &key_values(&rows))?;
    for (k, v) in rows {
        sink.line(format!("{k} = {}", fmt_num(v)));
    }
    Ok(())
}

/// Classified diagram for a configured system.
pub fn diagram_grid(sys: &System64, p: &DiagramParams) -> Result<DiagramGrid64, CliError> {
    let (td, c) = linear_and_coeffs(sys)?;
    let lead = Leading::new(&c, &td)?;
    let q = p.q.unwrap_or_else(|| c.q_raw());
    let plane = match p.plane {
        PlaneKind::KappaAlpha => Plane::KappaAlpha { beta: p.beta, q, theta: p.theta, ell_square: p.ell_square },
        PlaneKind::QAlpha => Plane::QAlpha { kappa: p.kappa, beta: p.beta, theta: p.theta, ell_square: p.ell_square },
        PlaneKind::BetaAlphatilde => {
            Plane::BetaAlphaTilde { kappa: p.kappa, q, theta: p.theta, ell_square: p.ell_square }
        }
        PlaneKind::EpsilonAlpha => {
            Plane::EpsilonAlpha { kappa: p.kappa, beta: p.beta, theta: p.theta, q_unit: q, ell_square: p.ell_square }
        }
    };
    Ok(lead.diagram_grid(plane, p.x.axis(), p.y.axis(), DEFAULT_CELL_CAP)?)
}

fn axis_names(plane: PlaneKind) -> (&'static str, &'static str) {
    match plane {
        PlaneKind::KappaAlpha => ("κ̃", "α"),
        PlaneKind::QAlpha => ("q", "α"),
        PlaneKind::BetaAlphatilde => ("β", "α̃"),
        PlaneKind::EpsilonAlpha => ("ε", "α"),
    }
}

fn diagram(cfg: &RunConfig, p: &DiagramParams, sink: &mut Sink) -> Result<(), CliError> {
    let sys = build_system(&cfg.system)?;
    let grid = diagram_grid(&sys, p)?;
    let names = axis_names(p.plane);
    let stem = match p.plane {
        PlaneKind::KappaAlpha => "diagram_kappa-alpha",
        PlaneKind::QAlpha => "diagram_q-alpha",
        PlaneKind::BetaAlphatilde => "diagram_beta-alphatilde",
        PlaneKind::EpsilonAlpha => "diagram_epsilon-alpha",
    };
    write_grid(sink, stem, &grid, stem, names)?;
    sink.write(&format!("{stem}_boundaries.csv"), &boundaries_csv(&grid.boundaries))?;
    let count = |f: fn(&stripelab_core::RegionLabel) -> bool| grid.labels.iter().filter(|l| f(l)).count();
    sink.line(format!(
        "{} cells: {} with stripes, {} stable, {} Eckhaus, {} zigzag, {} square, {} hex, {} quasi-hex",
        grid.labels.len(),
        count(|l| l.exists),
        count(|l| l.exists && l.stable_all_checked),
        count(|l| l.eckhaus_unstable),
        count(|l| l.zigzag_unstable),
        count(|l| l.square_unstable),
        count(|l| l.hex_unstable),
        count(|l| l.quasihex_unstable),
    ));
    Ok(())
}

fn write_grid(
    sink: &mut Sink,
    stem: &str,
    grid: &DiagramGrid64,
    title: &str,
    names: (&str, &str),
) -> Result<(), CliError> {
    let csv = sink.dir.join(format!("{stem}.csv"));
    emit_grid(grid, &csv).map_err(|source| CliError::Io { path: csv.clone(), source })?;
    sink.report.files.push(csv);
    let svg = sink.dir.join(format!("{stem}.svg"));
    emit_plot(grid, title, names, &svg).map_err(|source| CliError::Io { path: svg.clone(), source })?;
    sink.report.files.push(svg);
    Ok(())
}

fn oracle(cfg: &RunConfig, p: &OracleParams, sink: &mut Sink) -> Result<(), CliError> {
    let sys = build_system(&cfg.system)?;
    let sc = Scenario::by_name(&p.scenario).expect("validated scenario");
    let rep = compare_asymptotics(&sys, &sc, &p.eps_list, OracleSettings { n: p.n, n_lat: p.n_lat })?;
    let mut csv = String::from("eps,max_error,translation_abs,gap,residual,newton_iterations,order\n");
    for (k, r) in rep.records.iter().enumerate() {
        let order = if k == 0 { f64::NAN } else { rep.orders[k - 1] };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_num(r.eps),
            fmt_num(r.max_error),
            fmt_num(r.translation_abs),
            fmt_num(r.gap),
            fmt_num(r.residual),
            r.newton_iterations,
            fmt_num(order)
        );
    }
    sink.write(&format!("oracle_{}.csv", p.scenario), &csv)?;
    sink.line(format!(
        "{}: observed order {} (required ≥ 2.5), max translation {} → {}",
        p.scenario,
        fmt_num(rep.observed_order),
        fmt_num(rep.max_translation),
        if rep.pass { "converged" } else { "NOT converged" }
    ));
    Ok(())
}

fn calibrate(cfg: &RunConfig, p: &CalibrateParams, sink: &mut Sink) -> Result<(), CliError> {
    let sys = build_system(&cfg.system)?;
    let cal = calibrate_q_convention(&sys, &p.eps_list, OracleSettings { n: p.n, n_lat: p.n_lat })?;
    let scaled = sys.with_quadratic_scaled(p.report_epsilon);
    let (_, c) = linear_and_coeffs(&scaled)?;
    let q_eff = cal.gamma * c.q_raw();
    let mut csv = String::from("gamma,observed_order,pass\n");
    for (g, r) in stripelab_oracle::asymptotics::CALIBRATION_CANDIDATES.iter().zip(&cal.reports) {
        let _ = writeln!(csv, "{},{},{}", fmt_num(*g), fmt_num(r.observed_order), u8::from(r.pass));
    }
    sink.write("calibration.csv", &csv)?;
    sink.write(
        "calibration_q.csv",
        &key_values(&[
            ("gamma", cal.gamma),
            ("report_epsilon", p.report_epsilon),
            ("q_raw", c.q_raw()),
            ("q_eff", q_eff),
        ]),
    )?;
    sink.line(format!(
        "γ = {}; q_eff(ε = {}) = {}",
        fmt_num(cal.gamma),
        fmt_num(p.report_epsilon),
        fmt_num(q_eff)
    ));
    Ok(())
}

/// Klausmeier scan as a diagram grid (`x = κ`, `y = a`).
pub fn scan_grid(scan: &KlausmeierScan) -> DiagramGrid64 {
    DiagramGrid64 {
        plane: Plane::KappaAlpha { beta: scan.params.beta, q: 0.0, theta: 1.0, ell_square: 0.0 },
        x: scan.kappa.clone(),
        y: scan.a.clone(),
        labels: scan.labels(),
        boundaries: Vec::new(),
    }
}

fn scan(_cfg: &RunConfig, p: &ScanParams, sink: &mut Sink) -> Result<(), CliError> {
    let params = KlausmeierParams::standard(p.beta);
    let settings = ScanSettings { n: p.n, n_lat: p.n_lat, ..ScanSettings::default() };
    let scan = klausmeier_scan(params, p.kappa.axis(), p.a.axis(), settings)?;
    let stem = format!("scan_klausmeier_beta{}", fmt_num(p.beta));
    let grid = scan_grid(&scan);
    write_grid(sink, &stem, &grid, &format!("Klausmeier, β = {}", fmt_num(p.beta)), ("κ", "a"))?;
    let mut log = scan.log_lines().join("\n");
    log.push('\n');
    sink.write(&format!("{stem}.log"), &log)?;

    let failed = scan.cells.iter().filter(|c| matches!(c.status, stripelab_oracle::CellStatus::Failed(_))).count();
    let existing = scan.cells.iter().filter(|c| c.exists()).count();
    let rhomb = scan.mask(|c| c.rhomb_breakup());
    sink.line(format!(
        "{} cells: {} stripes, {} failed; rhomb-breakup components: {}",
        scan.cells.len(),
        existing,
        failed,
        scan.components(&rhomb)
    ));
    Ok(())
}

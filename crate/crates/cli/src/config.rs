//! Run configuration: a strict JSON schema with `//` and `/* */` comments.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use stripelab_core::boundaries::Axis;
use stripelab_core::presets::{designed_example, Klausmeier};
use stripelab_core::{CubicForm, Mat2, QuadForm, ReactionPoly, SystemSpec64};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown key `{key}` at line {line}, column {column}")]
    UnknownKey { key: String, line: usize, column: usize },
    #[error("{field}: {message}")]
    Range { field: String, message: String },
}

impl ConfigError {
    fn range(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Range { field: field.into(), message: message.into() }
    }
}

/// Everything needed for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub command: Command,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The system under study: a named preset or an inline description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// Designed normal-form example; `epsilon` multiplies the quadratic terms.
    DesignedExample {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    /// Extended Klausmeier model at `m = 0.45`, `d = 500`. Without `a` the
    /// rainfall is the Turing onset of the vegetated state.
    Klausmeier {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
    },
    Inline(InlineSystem),
}

fn default_epsilon() -> f64 {
    0.4
}

/// Tensor and/or polynomial form of a system. Quadratic and cubic parts are
/// monomial coefficients per component: `(u², uv, v²)` and `(u³, u²v, uv², v³)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSystem {
    pub diffusion: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unfolding: Option<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<[[f64; 3]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cubic: Option<[[f64; 4]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<InlineReaction>,
}

/// Reaction polynomial expanded about `base`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineReaction {
    pub terms: Vec<ReactionTerm>,
    pub base: [f64; 2],
}

/// `coef · u^u v^v` in equation `component`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionTerm {
    pub component: usize,
    pub u: usize,
    pub v: usize,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    Verify,
    Coeffs,
    Diagram(DiagramParams),
    Oracle(OracleParams),
    Calibrate(CalibrateParams),
    Scan(ScanParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Coeffs => "coeffs",
            Command::Diagram(_) => "diagram",
            Command::Oracle(_) => "oracle",
            Command::Calibrate(_) => "calibrate",
            Command::Scan(_) => "scan",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn axis(&self) -> Axis<f64> {
        Axis { min: self.min, max: self.max, count: self.count }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.count < 2 {
            return Err(ConfigError::range(field, format!("count must be at least 2 (got {})", self.count)));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(ConfigError::range(field, "range must be finite"));
        }
        if self.min >= self.max {
            return Err(ConfigError::range(field, format!("min {} must be below max {}", self.min, self.max)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneKind {
    KappaAlpha,
    QAlpha,
    BetaAlphatilde,
    EpsilonAlpha,
}

/// A classified parameter plane. Parameters not on an axis are held at the
/// values given here; `q` defaults to the system's raw triad coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramParams {
    pub plane: PlaneKind,
    pub x: AxisSpec,
    pub y: AxisSpec,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default)]
    pub ell_square: f64,
}

impl DiagramParams {
    pub fn default_for(plane: PlaneKind) -> Self {
        let (x, y) = match plane {
            PlaneKind::KappaAlpha => ((-0.3, 0.3), (-0.05, 0.45)),
            PlaneKind::QAlpha => ((-0.6, 0.6), (-0.05, 0.3)),
            PlaneKind::BetaAlphatilde => ((-0.8, 0.8), (-0.02, 0.15)),
            PlaneKind::EpsilonAlpha => ((0.0, 1.0), (-0.05, 0.3)),
        };
        DiagramParams {
            plane,
            x: AxisSpec { min: x.0, max: x.1, count: 121 },
            y: AxisSpec { min: y.0, max: y.1, count: 121 },
            beta: 0.0,
            kappa: if plane == PlaneKind::KappaAlpha { 0.0 } else { 0.1 },
            q: None,
            theta: 1.0,
            ell_square: 0.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleParams {
    pub scenario: String,
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_n_lat")]
    pub n_lat: usize,
}

fn default_eps_list() -> Vec<f64> {
    vec![0.05, 0.025, 0.0125]
}

fn default_n() -> usize {
    32
}

fn default_n_lat() -> usize {
    8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateParams {
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_n_lat")]
    pub n_lat: usize,
    /// Quadratic prefactor at which the calibrated `q` is reported.
    #[serde(default = "default_epsilon")]
    pub report_epsilon: f64,
}

impl Default for CalibrateParams {
    fn default() -> Self {
        CalibrateParams { eps_list: default_eps_list(), n: default_n(), n_lat: default_n_lat(), report_epsilon: 0.4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScanModel {
    Klausmeier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    pub model: ScanModel,
    pub beta: f64,
    pub kappa: AxisSpec,
    pub a: AxisSpec,
    #[serde(default = "default_scan_n")]
    pub n: usize,
    #[serde(default = "default_scan_n_lat")]
    pub n_lat: usize,
}

fn default_scan_n() -> usize {
    64
}

fn default_scan_n_lat() -> usize {
    6
}

impl ScanParams {
    /// Coarse window around the rhombic crossing at `β = 0`.
    pub fn default_for(beta: f64) -> Self {
        ScanParams {
            model: ScanModel::Klausmeier,
            beta,
            kappa: AxisSpec { min: 0.36, max: 0.52, count: 81 },
            a: AxisSpec { min: 2.70, max: 2.89, count: 39 },
            n: default_scan_n(),
            n_lat: default_scan_n_lat(),
        }
    }
}

impl SystemConfig {
    /// The system description, before validation.
    pub fn spec(&self) -> Result<SystemSpec64, ConfigError> {
        match self {
            SystemConfig::DesignedExample { epsilon } => Ok(designed_example(*epsilon)),
            SystemConfig::Klausmeier { a } => {
                let a = match a {
                    Some(a) => *a,
                    None => klausmeier_onset()?,
                };
                Klausmeier::standard(a).spec().map_err(|e| ConfigError::range("system.a", e.to_string()))
            }
            SystemConfig::Inline(s) => Ok(s.spec()),
        }
    }
}

/// Rainfall at the Turing onset of the standard Klausmeier model.
pub fn klausmeier_onset() -> Result<f64, ConfigError> {
    let p = Klausmeier::<f64>::standard(0.0);
    Klausmeier::turing_onset(p.m, p.d, 1.0, 5.0)
        .ok_or_else(|| ConfigError::range("system", "no Turing onset of the vegetated state in a ∈ [1, 5]"))
}

fn mat(m: [[f64; 2]; 2]) -> Mat2<f64> {
    Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

impl InlineSystem {
    pub fn spec(&self) -> SystemSpec64 {
        let q = self.quadratic.map(|q| QuadForm::from_monomials(q.map(|r| (r[0], r[1], r[2]))));
        let k = self.cubic.map(|k| CubicForm::from_monomials(k.map(|r| (r[0], r[1], r[2], r[3]))));
        let reaction = self.reaction.as_ref().map(|r| {
            let poly = r.terms.iter().fold(ReactionPoly::zero(), |p, t| p.with_term(t.component, t.u, t.v, t.coef));
            (poly, r.base)
        });
        SystemSpec64 {
            diffusion: self.diffusion,
            linear: self.linear.map(mat),
            unfolding: self.unfolding.map_or_else(Mat2::identity, mat),
            quadratic: q,
            cubic: k,
            reaction,
        }
    }
}

fn check_finite(field: &str, values: impl IntoIterator<Item = f64>) -> Result<(), ConfigError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(ConfigError::range(field, "values must be finite"))
    }
}

fn check_eps_list(field: &str, eps: &[f64]) -> Result<(), ConfigError> {
    if eps.len() < 2 {
        return Err(ConfigError::range(field, "at least two values are needed"));
    }
    if !eps.iter().all(|e| e.is_finite() && *e > 0.0) {
        return Err(ConfigError::range(field, "values must be positive and finite"));
    }
    if !eps.windows(2).all(|w| w[1] < w[0]) {
        return Err(ConfigError::range(field, "values must be strictly decreasing"));
    }
    Ok(())
}

fn check_truncation(field: &str, n: usize, n_lat: usize) -> Result<(), ConfigError> {
    if n < 4 || n_lat < 2 {
        return Err(ConfigError::range(field, format!("truncations too small (n = {n}, n_lat = {n_lat})")));
    }
    Ok(())
}

impl RunConfig {
    /// Range and consistency checks beyond the schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.system {
            SystemConfig::DesignedExample { epsilon } => check_finite("system.epsilon", [*epsilon])?,
            SystemConfig::Klausmeier { a } => {
                if let Some(a) = a {
                    check_finite("system.a", [*a])?;
                    if *a <= 2.0 * 0.45 {
                        return Err(ConfigError::range("system.a", "no vegetated state for a ≤ 2m"));
                    }
                }
            }
            SystemConfig::Inline(s) => {
                let mut all: Vec<f64> = s.diffusion.to_vec();
                all.extend(s.linear.iter().flatten().flatten());
                all.extend(s.unfolding.iter().flatten().flatten());
                all.extend(s.quadratic.iter().flatten().flatten());
                all.extend(s.cubic.iter().flatten().flatten());
                if let Some(r) = &s.reaction {
                    all.extend(r.base);
                    all.extend(r.terms.iter().map(|t| t.coef));
                    if let Some(t) = r.terms.iter().find(|t| t.component > 1 || t.u + t.v > 3) {
                        return Err(ConfigError::range(
                            "system.reaction.terms",
                            format!("term {t:?} needs component ∈ {{0, 1}} and degree ≤ 3"),
                        ));
                    }
                }
                check_finite("system", all)?;
            }
        }
        match &self.command {
            Command::Verify | Command::Coeffs => {}
            Command::Diagram(d) => {
                d.x.validate("command.diagram.x")?;
                d.y.validate("command.diagram.y")?;
                check_finite("command.diagram", [d.beta, d.kappa, d.theta, d.ell_square, d.q.unwrap_or(0.0)])?;
                if !(d.theta > 0.0 && d.theta <= 1.0) {
                    return Err(ConfigError::range("command.diagram.theta", "θ must lie in (0, 1]"));
                }
            }
            Command::Oracle(o) => {
                if stripelab_oracle::Scenario::by_name(&o.scenario).is_none() {
                    return Err(ConfigError::range(
                        "command.oracle.scenario",
                        format!("unknown scenario `{}` (expected one of {:?})", o.scenario, stripelab_oracle::Scenario::NAMES),
                    ));
                }
                check_eps_list("command.oracle.eps_list", &o.eps_list)?;
                check_truncation("command.oracle", o.n, o.n_lat)?;
            }
            Command::Calibrate(c) => {
                check_eps_list("command.calibrate.eps_list", &c.eps_list)?;
                check_truncation("command.calibrate", c.n, c.n_lat)?;
                check_finite("command.calibrate.report_epsilon", [c.report_epsilon])?;
            }
            Command::Scan(s) => {
                if !matches!(self.system, SystemConfig::Klausmeier { .. }) {
                    return Err(ConfigError::range("system", "the klausmeier scan needs the klausmeier preset"));
                }
                check_finite("command.scan.beta", [s.beta])?;
                s.kappa.validate("command.scan.kappa")?;
                s.a.validate("command.scan.a")?;
                if s.kappa.min <= 0.0 {
                    return Err(ConfigError::range("command.scan.kappa", "wavenumbers must be positive"));
                }
                if s.a.min <= 2.0 * 0.45 {
                    return Err(ConfigError::range("command.scan.a", "no vegetated state for a ≤ 2m"));
                }
                check_truncation("command.scan", s.n, s.n_lat)?;
            }
        }
        Ok(())
    }

    /// Default configuration for a command.
    pub fn for_command(command: Command) -> Self {
        let system = match command {
            Command::Scan(_) => SystemConfig::Klausmeier { a: None },
            Command::Oracle(_) | Command::Calibrate(_) => SystemConfig::DesignedExample { epsilon: 1.0 },
            _ => SystemConfig::DesignedExample { epsilon: default_epsilon() },
        };
        RunConfig { system, command, output_dir: default_output_dir() }
    }
}

/// Blank out comments, keeping every other byte (and so every line and
/// column) in place.
pub fn strip_comments(text: &str) -> String {
    #[derive(PartialEq)]
    enum State {
        Code,
        Str,
        Escape,
        Line,
        Block,
    }
    let mut out = String::with_capacity(text.len());
    let mut state = State::Code;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match state {
            State::Code => match (c, chars.peek()) {
                ('"', _) => {
                    state = State::Str;
                    out.push(c);
                }
                ('/', Some('/')) => {
                    chars.next();
                    out.push_str("  ");
                    state = State::Line;
                }
                ('/', Some('*')) => {
                    chars.next();
                    out.push_str("  ");
                    state = State::Block;
                }
                _ => out.push(c),
            },
            State::Str => {
                state = match c {
                    '\\' => State::Escape,
                    '"' => State::Code,
                    _ => State::Str,
                };
                out.push(c);
            }
            State::Escape => {
                state = State::Str;
                out.push(c);
            }
            State::Line => {
                if c == '\n' {
                    state = State::Code;
                    out.push(c);
                } else {
                    out.push(' ');
                }
            }
            State::Block => {
                if c == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    out.push_str("  ");
                    state = State::Code;
                } else if c == '\n' {
                    out.push(c);
                } else {
                    out.push(' ');
                }
            }
        }
    }
    out
}

fn classify(err: serde_json::Error) -> ConfigError {
    let (line, column) = (err.line(), err.column());
    let full = err.to_string();
    let message = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m).to_string();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        if let Some((key, _)) = rest.split_once('`') {
            return ConfigError::UnknownKey { key: key.to_string(), line, column };
        }
    }
    ConfigError::Parse { line, column, message }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(&strip_comments(text)).map_err(classify)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical serialization; `parse_config(&emit_config(c)) == c` for every valid `c`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("configuration serializes");
    s.push('\n');
    s
}

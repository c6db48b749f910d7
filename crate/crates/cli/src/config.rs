//! Scenario files: TOML with `[scenario]`, `[input]`, `[circuit]`,
//! `[sweep]` and `[output]` sections. Angles accept numbers or strings
//! such as `"pi/2"`, `"3pi/4"` or `"-pi/10"`.

use std::f64::consts::PI;

use kerr_mzi::interferometer::{CircuitSpec, KerrKind, LossPlacement};
use kerr_mzi::{InputSpec, ModeSelector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::observables::{Observable, Reference};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Num(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: RawScenario,
    input: RawInput,
    #[serde(default)]
    circuit: RawCircuit,
    sweep: RawSweep,
    output: RawOutput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    kind: String,
    nbar: Option<f64>,
    n: Option<i64>,
    weights: Option<Vec<f64>>,
    tail_tolerance: Option<f64>,
    n_max: Option<i64>,
    max_cutoff: Option<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    kinds: Option<Vec<String>>,
    chi: Option<RawNumber>,
    phi: Option<RawNumber>,
    eta_loss: Option<f64>,
    loss_mode: Option<String>,
    loss_placement: Option<String>,
    eta_det: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: String,
    start: RawNumber,
    stop: RawNumber,
    points: i64,
    include_stop: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    observables: Vec<String>,
    #[serde(default)]
    references: Vec<String>,
    witness_at: Option<String>,
    fisher_points: Option<i64>,
    parity_points: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKindName {
    Thermal,
    Coherent,
    Number,
    Mixture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Phi,
    Chi,
    Nbar,
    EtaDet,
    EtaLoss,
}

impl Axis {
    /// CSV header of the sweep column, with units.
    pub fn column(self) -> &'static str {
        match self {
            Axis::Phi => "phi_rad",
            Axis::Chi => "chi_rad",
            Axis::Nbar => "nbar",
            Axis::EtaDet => "eta_det",
            Axis::EtaLoss => "eta_loss",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessAt {
    AfterSecondBs,
    Output,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputConfig {
    pub kind: InputKindName,
    /// Mean photon number; the photon number itself for number input.
    pub nbar: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
    pub tail_tolerance: f64,
    pub n_max: Option<usize>,
    pub max_cutoff: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitConfig {
    pub kinds: Vec<String>,
    pub chi: f64,
    pub phi: f64,
    pub eta_loss: f64,
    pub loss_mode: String,
    pub loss_placement: String,
    pub eta_det: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub include_stop: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputConfig {
    pub observables: Vec<Observable>,
    pub references: Vec<Reference>,
    pub witness_at: WitnessAt,
    pub fisher_points: usize,
    pub parity_points: usize,
}

/// A fully resolved scenario; every default is filled in.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub input: InputConfig,
    pub circuit: CircuitConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_CUTOFF: usize = 600;
pub const DEFAULT_FISHER_POINTS: usize = 181;
pub const DEFAULT_PARITY_POINTS: usize = 721;

/// Reads `"pi/2"`, `"3pi/4"`, `"-2*pi"`, `"0.25"` and the like.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if t.is_empty() {
        return None;
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let num = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix('π')) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().ok()?,
        };
        c * PI
    } else {
        num.parse::<f64>().ok()?
    };
    let value = match den {
        Some(d) => {
            let d = d.parse::<f64>().ok()?;
            if d == 0.0 {
                return None;
            }
            num / d
        }
        None => num,
    };
    value.is_finite().then_some(value)
}

fn number(field: &str, raw: &RawNumber) -> Result<f64, CliError> {
    match raw {
        RawNumber::Num(x) => Ok(*x),
        RawNumber::Text(s) => {
            parse_angle(s).ok_or_else(|| CliError::parse(field, format!("cannot read {s:?} as a number or multiple of pi")))
        }
    }
}

fn finite(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() { Ok(x) } else { Err(CliError::domain(field, format!("must be finite, got {x}"))) }
}

fn unit_interval(field: &str, x: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&x) { Ok(x) } else { Err(CliError::domain(field, format!("must lie in [0, 1], got {x}"))) }
}

fn count(field: &str, x: i64, min: i64) -> Result<usize, CliError> {
    if x >= min { Ok(x as usize) } else { Err(CliError::domain(field, format!("must be at least {min}, got {x}"))) }
}

/// Field name from a TOML deserialisation error, when it mentions one.
fn field_of(err: &toml::de::Error) -> String {
    let msg = err.message();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.to_string();
            }
        }
    }
    "config".to_string()
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::parse("config", "file is empty"));
        }
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::parse(field_of(&e), e.to_string().trim_end()))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        let name = raw.scenario.name.trim().to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(CliError::domain("scenario.name", format!("must be a non-empty file-safe name, got {name:?}")));
        }

        let ri = raw.input;
        let kind = match ri.kind.trim().to_lowercase().as_str() {
            "thermal" => InputKindName::Thermal,
            "coherent" => InputKindName::Coherent,
            "number" | "fock" => InputKindName::Number,
            "mixture" => InputKindName::Mixture,
            other => return Err(CliError::parse("input.kind", format!("unknown input kind {other:?}"))),
        };
        let (nbar, weights) = match kind {
            InputKindName::Thermal | InputKindName::Coherent => {
                let nbar = ri.nbar.ok_or_else(|| CliError::parse("input.nbar", "required for this input kind"))?;
                if !(nbar.is_finite() && nbar >= 0.0) {
                    return Err(CliError::domain("input.nbar", format!("must be finite and non-negative, got {nbar}")));
                }
                (nbar, Vec::new())
            }
            InputKindName::Number => {
                let n = ri.n.ok_or_else(|| CliError::parse("input.n", "required for number input"))?;
                (count("input.n", n, 0)? as f64, Vec::new())
            }
            InputKindName::Mixture => {
                let w = ri.weights.ok_or_else(|| CliError::parse("input.weights", "required for mixture input"))?;
                let spec = InputSpec::mixture(w.clone());
                spec.validate().map_err(|e| CliError::domain("input.weights", e.to_string()))?;
                (spec.mean_photon_number(), w)
            }
        };
        let tail_tolerance = ri.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE);
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(CliError::domain("input.tail_tolerance", format!("must lie in (0, 1), got {tail_tolerance}")));
        }
        let n_max = ri.n_max.map(|n| count("input.n_max", n, 0)).transpose()?;
        let max_cutoff = ri.max_cutoff.map(|n| count("input.max_cutoff", n, 1)).transpose()?.unwrap_or(DEFAULT_MAX_CUTOFF);

        let rc = raw.circuit;
        let kinds = rc.kinds.unwrap_or_else(|| vec!["SK".into(), "CK".into()]);
        if kinds.is_empty() {
            return Err(CliError::domain("circuit.kinds", "at least one of SK, CK is required"));
        }
        let mut resolved_kinds = Vec::new();
        for k in &kinds {
            let label = k.trim().to_uppercase();
            if label != "SK" && label != "CK" {
                return Err(CliError::parse("circuit.kinds", format!("unknown Kerr kind {k:?}; use SK or CK")));
            }
            if resolved_kinds.contains(&label) {
                return Err(CliError::domain("circuit.kinds", format!("{label} listed twice")));
            }
            resolved_kinds.push(label);
        }
        let chi = finite("circuit.chi", rc.chi.as_ref().map(|c| number("circuit.chi", c)).transpose()?.unwrap_or(PI / 2.0))?;
        let phi = finite("circuit.phi", rc.phi.as_ref().map(|c| number("circuit.phi", c)).transpose()?.unwrap_or(0.0))?;
        let eta_loss = unit_interval("circuit.eta_loss", rc.eta_loss.unwrap_or(0.0))?;
        let eta_det = unit_interval("circuit.eta_det", rc.eta_det.unwrap_or(1.0))?;
        let loss_mode = match rc.loss_mode.as_deref().unwrap_or("a").trim().to_lowercase().as_str() {
            "a" => "a".to_string(),
            "b" => "b".to_string(),
            other => return Err(CliError::parse("circuit.loss_mode", format!("unknown mode {other:?}; use a or b"))),
        };
        let loss_placement = match rc.loss_placement.as_deref().unwrap_or("after_first_bs").trim().to_lowercase().as_str() {
            p @ ("after_first_bs" | "after_second_bs") => p.to_string(),
            other => {
                return Err(CliError::parse(
                    "circuit.loss_placement",
                    format!("unknown placement {other:?}; use after_first_bs or after_second_bs"),
                ))
            }
        };

        let rs = raw.sweep;
        let axis = match rs.axis.trim().to_lowercase().as_str() {
            "phi" => Axis::Phi,
            "chi" => Axis::Chi,
            "nbar" => Axis::Nbar,
            "eta_det" => Axis::EtaDet,
            "eta_loss" | "loss" => Axis::EtaLoss,
            other => return Err(CliError::parse("sweep.axis", format!("unknown axis {other:?}"))),
        };
        let start = finite("sweep.start", number("sweep.start", &rs.start)?)?;
        let stop = finite("sweep.stop", number("sweep.stop", &rs.stop)?)?;
        let points = count("sweep.points", rs.points, 2)?;
        if stop <= start {
            return Err(CliError::domain("sweep.stop", format!("must exceed sweep.start ({start}), got {stop}")));
        }
        match axis {
            Axis::EtaDet | Axis::EtaLoss => {
                unit_interval("sweep.start", start)?;
                unit_interval("sweep.stop", stop)?;
            }
            Axis::Nbar => {
                if start < 0.0 {
                    return Err(CliError::domain("sweep.start", format!("photon number must be non-negative, got {start}")));
                }
                if kind == InputKindName::Mixture {
                    return Err(CliError::domain("sweep.axis", "an nbar sweep needs a thermal, coherent or number input"));
                }
            }
            Axis::Phi | Axis::Chi => {}
        }

        let ro = raw.output;
        if ro.observables.is_empty() {
            return Err(CliError::domain("output.observables", "at least one observable is required"));
        }
        let observables = ro
            .observables
            .iter()
            .map(|o| Observable::from_name(o).ok_or_else(|| CliError::parse("output.observables", format!("unknown observable {o:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let references = ro
            .references
            .iter()
            .map(|r| Reference::from_name(r).ok_or_else(|| CliError::parse("output.references", format!("unknown reference {r:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let witness_at = match ro.witness_at.as_deref().unwrap_or("after_second_bs").trim().to_lowercase().as_str() {
            "after_second_bs" => WitnessAt::AfterSecondBs,
            "output" => WitnessAt::Output,
            other => return Err(CliError::parse("output.witness_at", format!("unknown tap {other:?}"))),
        };
        let fisher_points = ro.fisher_points.map(|n| count("output.fisher_points", n, 3)).transpose()?.unwrap_or(DEFAULT_FISHER_POINTS);
        let parity_points = ro.parity_points.map(|n| count("output.parity_points", n, 3)).transpose()?.unwrap_or(DEFAULT_PARITY_POINTS);

        let scenario = Scenario {
            name,
            description: raw.scenario.description,
            input: InputConfig { kind, nbar, weights, tail_tolerance, n_max, max_cutoff },
            circuit: CircuitConfig { kinds: resolved_kinds, chi, phi, eta_loss, loss_mode, loss_placement, eta_det },
            sweep: SweepConfig { axis, start, stop, points, include_stop: rs.include_stop.unwrap_or(true) },
            output: OutputConfig { observables, references, witness_at, fisher_points, parity_points },
        };
        // Every sweep value must make a valid input and circuit.
        for x in scenario.sweep_values() {
            let p = scenario.point(x);
            p.input_spec()?;
            for kind in scenario.kinds() {
                p.circuit(kind).validate().map_err(|e| CliError::from_engine("circuit", e))?;
            }
        }
        Ok(scenario)
    }

    pub fn kinds(&self) -> Vec<KerrKind> {
        self.circuit
            .kinds
            .iter()
            .map(|k| if k == "SK" { KerrKind::SelfKerr } else { KerrKind::CrossKerr })
            .collect()
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        let s = &self.sweep;
        let div = if s.include_stop { s.points - 1 } else { s.points } as f64;
        let step = (s.stop - s.start) / div;
        (0..s.points).map(|i| s.start + step * i as f64).collect()
    }

    /// Parameters at one sweep value.
    pub fn point(&self, x: f64) -> Point<'_> {
        let mut p = Point {
            scenario: self,
            nbar: self.input.nbar,
            chi: self.circuit.chi,
            phi: self.circuit.phi,
            eta_det: self.circuit.eta_det,
            eta_loss: self.circuit.eta_loss,
        };
        match self.sweep.axis {
            Axis::Phi => p.phi = x,
            Axis::Chi => p.chi = x,
            Axis::Nbar => p.nbar = x,
            Axis::EtaDet => p.eta_det = x,
            Axis::EtaLoss => p.eta_loss = x,
        }
        p
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Point<'a> {
    pub scenario: &'a Scenario,
    pub nbar: f64,
    pub chi: f64,
    pub phi: f64,
    pub eta_det: f64,
    pub eta_loss: f64,
}

impl Point<'_> {
    pub fn input_spec(&self) -> Result<InputSpec, CliError> {
        let cfg = &self.scenario.input;
        let spec = match cfg.kind {
            InputKindName::Thermal => InputSpec::thermal(self.nbar),
            InputKindName::Coherent => InputSpec::coherent(self.nbar),
            InputKindName::Number => {
                if self.nbar.fract() != 0.0 || self.nbar < 0.0 {
                    return Err(CliError::domain("input.n", format!("number input needs a whole photon number, got {}", self.nbar)));
                }
                InputSpec::number(self.nbar as usize)
            }
            InputKindName::Mixture => InputSpec::mixture(cfg.weights.clone()),
        }
        .with_tail_tolerance(cfg.tail_tolerance);
        spec.validate().map_err(|e| CliError::from_engine("input", e))?;
        Ok(spec)
    }

    /// Truncation for this point: the explicit `input.n_max`, or the
    /// smallest cutoff meeting the tail tolerance, capped at
    /// `input.max_cutoff`.
    pub fn cutoff(&self) -> Result<usize, CliError> {
        let cfg = &self.scenario.input;
        let spec = self.input_spec()?;
        if let Some(n) = cfg.n_max {
            let tail = spec.tail_mass(n);
            if tail >= cfg.tail_tolerance {
                return Err(CliError::Truncation {
                    field: "input.n_max".into(),
                    message: format!("N_max = {n} leaves tail mass {tail:e}, above tail_tolerance {:e}", cfg.tail_tolerance),
                });
            }
            return Ok(n);
        }
        let n = spec.cutoff().map_err(|e| CliError::from_engine("input", e))?;
        if n > cfg.max_cutoff {
            return Err(CliError::Truncation {
                field: "input.tail_tolerance".into(),
                message: format!(
                    "nbar = {} needs N_max = {n} to reach tail_tolerance {:e}, above input.max_cutoff = {}",
                    self.nbar, cfg.tail_tolerance, cfg.max_cutoff
                ),
            });
        }
        Ok(n)
    }

    pub fn circuit(&self, kind: KerrKind) -> CircuitSpec {
        let c = &self.scenario.circuit;
        let mode = if c.loss_mode == "b" { ModeSelector::ModeB } else { ModeSelector::ModeA };
        let placement = if c.loss_placement == "after_second_bs" { LossPlacement::AfterSecondBs } else { LossPlacement::AfterFirstBs };
        CircuitSpec::new(kind, self.chi, self.phi).with_loss(self.eta_loss).with_loss_mode(mode).with_loss_placement(placement)
    }
}

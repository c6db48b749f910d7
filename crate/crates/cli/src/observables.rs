use kerr_mzi::detection::DetectorModel;
use kerr_mzi::fockspace::TwoModeState;
use kerr_mzi::inputs::build_input;
use kerr_mzi::interferometer::{run_circuit, state_after_second_bs, state_before_phase, KerrKind};
use kerr_mzi::metrology::{
    cramer_rao_minimum, fisher_information, heisenberg_limit, maximize_fisher, min_phase_error_scan,
    phase_error_from_parity, qfi_of_state, shot_noise_limit, DetectionScheme, PhaseFamily, PhaseGrid, PARITY_MODE,
};
use kerr_mzi::witnesses::{compute_moments, g2_zero, hillery_zubairy, shchukin_vogel, MomentSet};
use kerr_mzi::{ModeSelector, State};
use serde::{Serialize, Serializer};
use std::f64::consts::{PI, TAU};

use crate::config::{Point, WitnessAt};
use crate::error::CliError;

macro_rules! named {
    ($ty:ident { $($variant:ident => $name:literal),* $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub enum $ty {
            $($variant),*
        }

        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $($ty::$variant => $name),*
                }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.name() == s.trim())
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }
    };
}

named!(Observable {
    Parity => "parity",
    DphiParity => "dphi_parity",
    FSingle => "F_single",
    FDifference => "F_difference",
    FJoint => "F_joint",
    FParity => "F_parity",
    FQ => "F_Q",
    DphiMin => "dphi_min",
    MaxFSingle => "max_F_single",
    MaxFDifference => "max_F_difference",
    MaxFJoint => "max_F_joint",
    MaxFParity => "max_F_parity",
    MinDphiParity => "min_dphi_parity",
    EHz => "E_HZ",
    ESv => "E_SV",
    G2A => "g2_a",
    G2B => "g2_b",
    Deficit => "deficit",
    NMax => "n_max",
});

named!(Reference {
    Sql => "SQL",
    Hl => "HL",
    FSql => "F_SQL",
    FHl => "F_HL",
});

impl Reference {
    pub fn value(self, nbar: f64) -> f64 {
        match self {
            Reference::Sql => shot_noise_limit(nbar),
            Reference::Hl => heisenberg_limit(nbar),
            Reference::FSql => nbar,
            Reference::FHl => nbar * nbar,
        }
    }
}

fn scheme(o: Observable) -> Option<DetectionScheme> {
    match o {
        Observable::FSingle | Observable::MaxFSingle => Some(DetectionScheme::Single(PARITY_MODE)),
        Observable::FDifference | Observable::MaxFDifference => Some(DetectionScheme::Difference),
        Observable::FJoint | Observable::MaxFJoint => Some(DetectionScheme::Joint),
        Observable::FParity | Observable::MaxFParity => Some(DetectionScheme::Parity(PARITY_MODE)),
        _ => None,
    }
}

/// Lazily built intermediate states for one sweep point and Kerr kind.
struct Context<'a> {
    point: Point<'a>,
    kind: KerrKind,
    input: State,
    family: Option<PhaseFamily>,
    tapped: Option<(State, MomentSet)>,
    qfi: Option<f64>,
}

impl Context<'_> {
    fn family(&mut self) -> Result<&PhaseFamily, CliError> {
        if self.family.is_none() {
            let detector = DetectorModel::new(self.point.eta_det).map_err(|e| CliError::from_engine("circuit", e))?;
            let spec = self.point.circuit(self.kind);
            self.family = Some(PhaseFamily::new(&self.input, &spec, detector).map_err(|e| CliError::from_engine("circuit", e))?);
        }
        Ok(self.family.as_ref().expect("just built"))
    }

    /// The QFI needs only the state before the phase shifter, so it skips
    /// the detection tables unless a family already exists.
    fn qfi(&mut self) -> Result<f64, CliError> {
        if let Some(q) = self.qfi {
            return Ok(q);
        }
        let q = match &self.family {
            Some(f) => qfi_of_state(f.state_before_phase()),
            None => {
                let before = state_before_phase(&self.input, &self.point.circuit(self.kind)).map_err(|e| CliError::from_engine("circuit", e))?;
                qfi_of_state(&before)
            }
        };
        self.qfi = Some(q);
        Ok(q)
    }

    fn tapped(&mut self) -> Result<&(State, MomentSet), CliError> {
        if self.tapped.is_none() {
            let spec = self.point.circuit(self.kind);
            let state = match self.point.scenario.output.witness_at {
                WitnessAt::AfterSecondBs => state_after_second_bs(&self.input, &spec),
                WitnessAt::Output => run_circuit(&self.input, &spec),
            }
            .map_err(|e| CliError::from_engine("circuit", e))?;
            let m = compute_moments(&state);
            self.tapped = Some((state, m));
        }
        Ok(self.tapped.as_ref().expect("just built"))
    }

    fn g2(&mut self, mode: ModeSelector) -> Result<f64, CliError> {
        let (state, _) = self.tapped()?;
        // An empty mode has no defined g2; report NaN rather than abort the sweep.
        Ok(g2_zero(state, mode).unwrap_or(f64::NAN))
    }

    fn eval(&mut self, o: Observable) -> Result<f64, CliError> {
        let phi = self.point.phi;
        let out = &self.point.scenario.output;
        Ok(match o {
            Observable::Parity | Observable::DphiParity => {
                let (dist, dp) = self.family()?.tables(phi);
                let (p, slope) = (dist.table().parity_sum(PARITY_MODE), dp.parity_sum(PARITY_MODE));
                if o == Observable::Parity { p } else { phase_error_from_parity(p, slope) }
            }
            Observable::FSingle | Observable::FDifference | Observable::FJoint | Observable::FParity => {
                let s = scheme(o).expect("Fisher observable");
                fisher_information(self.family()?, phi, s).value
            }
            Observable::FQ => self.qfi()?,
            Observable::DphiMin => cramer_rao_minimum(self.qfi()?).unwrap_or(f64::INFINITY),
            Observable::MaxFSingle | Observable::MaxFDifference | Observable::MaxFJoint | Observable::MaxFParity => {
                let grid = PhaseGrid::uniform(0.0, PI, out.fisher_points, true).expect("validated grid");
                maximize_fisher(self.family()?, grid.phis(), scheme(o).expect("Fisher observable")).0
            }
            Observable::MinDphiParity => {
                let grid = PhaseGrid::uniform(0.0, TAU, out.parity_points, false).expect("validated grid");
                let family = self.family()?;
                let errs = kerr_mzi::par::map_slice(grid.phis(), |&x| {
                    let (dist, dp) = family.tables(x);
                    phase_error_from_parity(dist.table().parity_sum(PARITY_MODE), dp.parity_sum(PARITY_MODE))
                });
                min_phase_error_scan(grid.phis(), &errs).map_or(f64::INFINITY, |(m, _)| m)
            }
            Observable::EHz => hillery_zubairy(&self.tapped()?.1),
            Observable::ESv => shchukin_vogel(&self.tapped()?.1),
            Observable::G2A => self.g2(ModeSelector::ModeA)?,
            Observable::G2B => self.g2(ModeSelector::ModeB)?,
            Observable::Deficit => self.input.tail_deficit(),
            Observable::NMax => self.input.n_max() as f64,
        })
    }
}

/// All requested observables at one sweep point for one Kerr kind.
pub fn evaluate(point: Point<'_>, kind: KerrKind, observables: &[Observable]) -> Result<Vec<f64>, CliError> {
    let spec = point.input_spec()?;
    let n_max = point.cutoff()?;
    let input = build_input(&spec, n_max).map_err(|e| CliError::from_engine("input", e))?;
    let mut ctx = Context { point, kind, input, family: None, tapped: None, qfi: None };
    observables.iter().map(|&o| ctx.eval(o)).collect()
}

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::family::PhaseFamily;
use super::fisher::{classical_fisher, phase_error_from_parity, scheme_outcomes, DetectionScheme};
use super::qfi::qfi_of_state;
use super::reference::{analytic_qfi_reference, ReferenceInput};
use super::scan::max_scan;
use super::PARITY_MODE;
use crate::detection::DetectorModel;
use crate::error::{Error, Result};
use crate::fockspace::TwoModeState;
use crate::inputs::{build_input, InputKind, InputSpec};
use crate::interferometer::{CircuitSpec, KerrKind};
use crate::par;

/// Sorted phase points plus the finite-difference step used to cross-check
/// derivatives on them.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    phis: Vec<f64>,
    delta: f64,
}

impl PhaseGrid {
    pub const DEFAULT_DELTA: f64 = 1e-5;

    pub fn new(phis: Vec<f64>, delta: f64) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::invalid("phi", "empty grid"));
        }
        if phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("phi", "non-finite grid point"));
        }
        let min_gap = phis.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if min_gap <= 0.0 {
            return Err(Error::invalid("phi", "grid must be strictly increasing"));
        }
        if !(delta > 0.0) || delta >= 0.5 * min_gap {
            return Err(Error::invalid("delta", format!("step {delta} must be positive and small next to the spacing {min_gap}")));
        }
        Ok(Self { phis, delta })
    }

    /// `points` evenly spaced values from `start`; `stop` included only when
    /// `include_stop`.
    pub fn uniform(start: f64, stop: f64, points: usize, include_stop: bool) -> Result<Self> {
        if points < 2 {
            return Err(Error::invalid("points", format!("need at least 2, got {points}")));
        }
        let div = if include_stop { points - 1 } else { points } as f64;
        let step = (stop - start) / div;
        Self::new((0..points).map(|i| start + step * i as f64).collect(), Self::DEFAULT_DELTA)
    }

    /// 721 points on `[0, 2 pi)`.
    pub fn parity_default() -> Self {
        Self::uniform(0.0, TAU, 721, false).expect("valid default grid")
    }

    /// 181 points on `[0, pi]`.
    pub fn fisher_default() -> Self {
        Self::uniform(0.0, PI, 181, true).expect("valid default grid")
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Per-phase results of one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherPoint {
    pub phi: f64,
    /// `<Pi_b>` from detected counts.
    pub parity: f64,
    /// Parity phase error.
    pub dphi_parity: f64,
    pub single: f64,
    pub difference: f64,
    pub joint: f64,
    pub parity_fisher: f64,
    /// Joint outcomes skipped below the probability floor.
    pub skipped: usize,
}

impl FisherPoint {
    pub fn get(&self, scheme: DetectionScheme) -> f64 {
        match scheme {
            DetectionScheme::Single(_) => self.single,
            DetectionScheme::Difference => self.difference,
            DetectionScheme::Joint => self.joint,
            DetectionScheme::Parity(_) => self.parity_fisher,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FisherReport {
    pub points: Vec<FisherPoint>,
    pub qfi: f64,
    /// Closed-form QFI when one exists (lossless, `chi = pi/2`).
    pub analytic_qfi: Option<f64>,
    pub kind: KerrKind,
    pub chi: f64,
    pub eta_det: f64,
    pub eta_loss: f64,
    pub input: InputSpec,
    pub n_max: usize,
    pub tail_deficit: f64,
}

impl FisherReport {
    pub fn phis(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phi).collect()
    }

    pub fn series(&self, scheme: DetectionScheme) -> Vec<f64> {
        self.points.iter().map(|p| p.get(scheme)).collect()
    }

    /// Largest value over the grid and where it occurs.
    pub fn max_of(&self, scheme: DetectionScheme) -> (f64, f64) {
        max_scan(&self.phis(), &self.series(scheme)).unwrap_or((0.0, f64::NAN))
    }

    /// Data-processing ordering: partial data never beats the joint record
    /// and nothing beats the QFI, up to relative slack `rel_tol`.
    pub fn ordering_violations(&self, rel_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.points {
            let joint_cap = p.joint * (1.0 + rel_tol) + 1e-12;
            if p.single > joint_cap {
                out.push(format!("phi={}: single {} > joint {}", p.phi, p.single, p.joint));
            }
            if p.difference > joint_cap {
                out.push(format!("phi={}: difference {} > joint {}", p.phi, p.difference, p.joint));
            }
            if p.parity_fisher > joint_cap {
                out.push(format!("phi={}: parity {} > joint {}", p.phi, p.parity_fisher, p.joint));
            }
            if p.joint > self.qfi * (1.0 + rel_tol) + 1e-12 {
                out.push(format!("phi={}: joint {} > QFI {}", p.phi, p.joint, self.qfi));
            }
        }
        out
    }
}

fn reference_input(kind: &InputKind) -> Option<(ReferenceInput, f64)> {
    match kind {
        InputKind::Thermal { nbar } => Some((ReferenceInput::Thermal, *nbar)),
        InputKind::Coherent { nbar } => Some((ReferenceInput::Coherent, *nbar)),
        InputKind::Number(n) => Some((ReferenceInput::Number, *n as f64)),
        InputKind::DiagonalMixture(_) => None,
    }
}

/// Evaluates every detection scheme over `grid` for one configuration.
/// Phase points are processed in parallel; results keep grid order.
pub fn fisher_report(input: &InputSpec, spec: &CircuitSpec, detector: DetectorModel, grid: &PhaseGrid) -> Result<FisherReport> {
    spec.validate()?;
    let n_max = input.cutoff()?;
    let state = build_input(input, n_max)?;
    let family = PhaseFamily::new(&state, spec, detector)?;
    let qfi = qfi_of_state(family.state_before_phase());
    let analytic_qfi = match reference_input(&input.kind) {
        Some((r, nbar)) if spec.eta_loss == 0.0 && (spec.chi - FRAC_PI_2).abs() <= 1e-12 => {
            analytic_qfi_reference(r, spec.kind, nbar, spec.chi).ok()
        }
        _ => None,
    };
    let points = par::map_slice(grid.phis(), |&phi| {
        let (dist, dp) = family.tables(phi);
        let table = dist.table();
        let fi = |scheme| {
            let (p, d) = scheme_outcomes(scheme, table, &dp);
            classical_fisher(&p, &d)
        };
        let joint = fi(DetectionScheme::Joint);
        let parity = table.parity_sum(PARITY_MODE);
        let slope = dp.parity_sum(PARITY_MODE);
        FisherPoint {
            phi,
            parity,
            dphi_parity: phase_error_from_parity(parity, slope),
            single: fi(DetectionScheme::Single(PARITY_MODE)).value,
            difference: fi(DetectionScheme::Difference).value,
            joint: joint.value,
            parity_fisher: fi(DetectionScheme::Parity(PARITY_MODE)).value,
            skipped: joint.skipped,
        }
    });
    Ok(FisherReport {
        points,
        qfi,
        analytic_qfi,
        kind: spec.kind,
        chi: spec.chi,
        eta_det: detector.efficiency(),
        eta_loss: spec.eta_loss,
        input: input.clone(),
        n_max,
        tail_deficit: state.tail_deficit(),
    })
}

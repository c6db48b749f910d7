//! Sector-blocked two-mode Fock algebra.
//!
//! Basis state `|k, n - k>` lives in sector `n` at index `k`: `k` photons in
//! mode `a`, `n - k` in mode `b`. Sector `n` therefore has dimension `n + 1`.

mod beamsplitter;
mod density;
mod moments;
mod ops;
mod pure;

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

pub use beamsplitter::{apply_beamsplitter, beamsplitter_matrices, beamsplitter_sector_matrix, beamsplitter_generator};
pub use density::{SectorBlock, SectorDensity};
pub use moments::{mode_number_moments, mode_number_variance, NumberMoments};
pub use ops::{apply_cross_kerr, apply_phase_shift, apply_self_kerr};
pub use pure::SectorState;

use crate::error::Result;

/// Default neglected-tail tolerance for inputs.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeSelector {
    ModeA,
    ModeB,
}

impl ModeSelector {
    /// Photons in this mode for basis state `(n, k)`.
    #[inline]
    pub fn count(self, n: usize, k: usize) -> usize {
        match self {
            ModeSelector::ModeA => k,
            ModeSelector::ModeB => n - k,
        }
    }

    pub fn other(self) -> Self {
        match self {
            ModeSelector::ModeA => ModeSelector::ModeB,
            ModeSelector::ModeB => ModeSelector::ModeA,
        }
    }
}

/// Number of basis states with at most `n_max` photons.
pub fn total_dim(n_max: usize) -> usize {
    (n_max + 1) * (n_max + 2) / 2
}

/// Offset of sector `n` in the flattened basis ordering used by dense views.
pub fn sector_offset(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Operations every two-mode state representation supports.
///
/// All transforms return new values; states are never mutated in place.
pub trait TwoModeState: Sized + Clone + Send + Sync {
    fn n_max(&self) -> usize;

    /// Probability mass neglected when the state was truncated.
    fn tail_deficit(&self) -> f64;

    /// Total probability (norm squared or trace).
    fn trace(&self) -> f64;

    /// Fock-basis populations of sector `n`, indexed by `k`.
    fn sector_populations(&self, n: usize) -> Vec<f64>;

    /// Multiplies basis state `(n, k)` by `exp(i * phase(n, k))`.
    fn apply_diagonal_phase<F>(&self, phase: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync;

    /// Applies `unitaries[n]` to sector `n`. `unitaries` must cover every sector.
    fn apply_sector_unitaries(&self, unitaries: &[Arc<DMatrix<C64>>]) -> Self;
}

/// A pure or mixed two-mode state.
#[derive(Clone, Debug)]
pub enum State {
    Pure(SectorState),
    Mixed(SectorDensity),
}

impl State {
    pub fn as_pure(&self) -> Option<&SectorState> {
        match self {
            State::Pure(s) => Some(s),
            State::Mixed(_) => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&SectorDensity> {
        match self {
            State::Mixed(d) => Some(d),
            State::Pure(_) => None,
        }
    }

    /// Density-matrix view; pure states keep their inter-sector coherences.
    pub fn to_density(&self) -> SectorDensity {
        match self {
            State::Pure(s) => SectorDensity::from_pure(s),
            State::Mixed(d) => d.clone(),
        }
    }

    /// Matrix element `<n, k| rho |m, l>`.
    pub fn element(&self, n: usize, k: usize, m: usize, l: usize) -> C64 {
        match self {
            State::Pure(s) => s.amplitude_at(n, k) * s.amplitude_at(m, l).conj(),
            State::Mixed(d) => d.element(n, k, m, l),
        }
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        match self {
            State::Pure(s) => s.norm_sqr().powi(2),
            State::Mixed(d) => d.purity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            State::Pure(_) => Ok(()),
            State::Mixed(d) => d.validate(),
        }
    }
}

impl From<SectorState> for State {
    fn from(s: SectorState) -> Self {
        State::Pure(s)
    }
}

impl From<SectorDensity> for State {
    fn from(d: SectorDensity) -> Self {
        State::Mixed(d)
    }
}

impl TwoModeState for State {
    fn n_max(&self) -> usize {
        match self {
            State::Pure(s) => s.n_max(),
            State::Mixed(d) => d.n_max(),
        }
    }

    fn tail_deficit(&self) -> f64 {
        match self {
            State::Pure(s) => s.tail_deficit(),
            State::Mixed(d) => d.tail_deficit(),
        }
    }

    fn trace(&self) -> f64 {
        match self {
            State::Pure(s) => s.trace(),
            State::Mixed(d) => d.trace(),
        }
    }

    fn sector_populations(&self, n: usize) -> Vec<f64> {
        match self {
            State::Pure(s) => s.sector_populations(n),
            State::Mixed(d) => d.sector_populations(n),
        }
    }

    fn apply_diagonal_phase<F>(&self, phase: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        match self {
            State::Pure(s) => State::Pure(s.apply_diagonal_phase(phase)),
            State::Mixed(d) => State::Mixed(d.apply_diagonal_phase(phase)),
        }
    }

    fn apply_sector_unitaries(&self, unitaries: &[Arc<DMatrix<C64>>]) -> Self {
        match self {
            State::Pure(s) => State::Pure(s.apply_sector_unitaries(unitaries)),
            State::Mixed(d) => State::Mixed(d.apply_sector_unitaries(unitaries)),
        }
    }
}

/// Coherence blocks between sectors, keyed `(n, m)` with `n > m`.
pub type Coherences = BTreeMap<(usize, usize), DMatrix<C64>>;

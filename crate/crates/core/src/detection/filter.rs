//! Cross-Kerr parity filter: `BS . exp(i chi n_b n_c) . BS` acting on the
//! measured mode and an ancilla in vacuum. At `chi = pi` even photon numbers
//! leave through port 1 and odd ones through port 2.

use nalgebra::DVector;

use super::joint_count_distribution;
use crate::error::{Error, Result};
use crate::fockspace::{apply_beamsplitter, apply_cross_kerr, SectorDensity, SectorState, State, C64};

/// Single-mode state fed to the filter.
#[derive(Clone, Debug, PartialEq)]
pub enum SingleModeInput {
    /// Amplitudes indexed by photon number.
    Pure(Vec<C64>),
    /// Photon-number probabilities.
    Diagonal(Vec<f64>),
}

impl SingleModeInput {
    fn to_two_mode(&self) -> Result<State> {
        let len = match self {
            SingleModeInput::Pure(a) => a.len(),
            SingleModeInput::Diagonal(p) => p.len(),
        };
        if len == 0 {
            return Err(Error::invalid("input", "empty single-mode state"));
        }
        // Measured mode in slot a, ancilla in slot b: |n, 0> is index k = n.
        let column = |n: usize, z: C64| {
            let mut v = DVector::zeros(n + 1);
            v[n] = z;
            v
        };
        match self {
            SingleModeInput::Pure(a) => {
                let sectors = a.iter().enumerate().map(|(n, &z)| column(n, z)).collect();
                Ok(State::Pure(SectorState::from_sectors(sectors, 0.0)?))
            }
            SingleModeInput::Diagonal(p) => {
                if let Some(x) = p.iter().find(|x| !(**x >= 0.0)) {
                    return Err(Error::invalid("weights", format!("negative weight {x}")));
                }
                let vecs = p.iter().enumerate().map(|(n, &w)| column(n, C64::new(w.sqrt(), 0.0))).collect();
                Ok(State::Mixed(SectorDensity::from_rank1(vecs, 0.0)?))
            }
        }
    }
}

/// Click statistics of the two filter detectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterClicks {
    /// Only detector 1 fired.
    pub d1_only: f64,
    /// Only detector 2 fired.
    pub d2_only: f64,
    pub both: f64,
    pub none: f64,
}

impl FilterClicks {
    /// Probability read as "even": detector 2 silent (vacuum counts as even).
    pub fn prob_even(&self) -> f64 {
        self.d1_only + self.none
    }

    /// Probability read as "odd": detector 2 fired.
    pub fn prob_odd(&self) -> f64 {
        self.d2_only + self.both
    }

    /// Parity estimate `P(even) - P(odd)`.
    pub fn parity(&self) -> f64 {
        self.prob_even() - self.prob_odd()
    }
}

/// Runs the filter numerically at nonlinearity `chi` (`pi` for the ideal
/// parity device). Returns the click statistics; `(prob_even, prob_odd)`
/// are the "detector 1" / "detector 2" probabilities.
pub fn parity_filter(input: &SingleModeInput, chi: f64) -> Result<FilterClicks> {
    if !chi.is_finite() {
        return Err(Error::invalid("chi", format!("must be finite, got {chi}")));
    }
    let state = input.to_two_mode()?;
    let out = apply_beamsplitter(&apply_cross_kerr(&apply_beamsplitter(&state), chi));
    let dist = joint_count_distribution(&out);
    let mut clicks = FilterClicks { d1_only: 0.0, d2_only: 0.0, both: 0.0, none: 0.0 };
    for n in 0..=dist.n_max() {
        for (k, p) in dist.table().sector(n).iter().enumerate() {
            // Port 1 is slot a (k photons), port 2 is slot b.
            match (k > 0, n - k > 0) {
                (true, false) => clicks.d1_only += p,
                (false, true) => clicks.d2_only += p,
                (true, true) => clicks.both += p,
                (false, false) => clicks.none += p,
            }
        }
    }
    Ok(clicks)
}

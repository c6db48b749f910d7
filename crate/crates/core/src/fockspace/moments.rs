use super::{ModeSelector, TwoModeState};

/// First two moments of a mode's photon number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumberMoments {
    pub mean: f64,
    pub second: f64,
}

impl NumberMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// `<n>` and `<n^2>` for the selected mode, from the Fock populations.
pub fn mode_number_moments<S: TwoModeState>(state: &S, mode: ModeSelector) -> NumberMoments {
    let mut mean = 0.0;
    let mut second = 0.0;
    for n in 0..=state.n_max() {
        for (k, p) in state.sector_populations(n).into_iter().enumerate() {
            let c = mode.count(n, k) as f64;
            mean += p * c;
            second += p * c * c;
        }
    }
    NumberMoments { mean, second }
}

pub fn mode_number_variance<S: TwoModeState>(state: &S, mode: ModeSelector) -> f64 {
    mode_number_moments(state, mode).variance()
}

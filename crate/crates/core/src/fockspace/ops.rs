//! Diagonal unitaries: phase shifter and Kerr phases.

use super::{ModeSelector, TwoModeState};

/// `exp(i phi n_mode)`: basis state `(n, k)` picks up `exp(i phi count)`.
pub fn apply_phase_shift<S: TwoModeState>(state: &S, phi: f64, mode: ModeSelector) -> S {
    state.apply_diagonal_phase(|n, k| phi * mode.count(n, k) as f64)
}

/// Self-Kerr `exp(i chi a^dagger^2 a^2)` on mode `a`: phase `chi k (k - 1)`.
pub fn apply_self_kerr<S: TwoModeState>(state: &S, chi: f64) -> S {
    state.apply_diagonal_phase(|_, k| chi * (k * k.saturating_sub(1)) as f64)
}

/// Cross-Kerr `exp(i chi n_a n_b)`: phase `chi k (n - k)`.
pub fn apply_cross_kerr<S: TwoModeState>(state: &S, chi: f64) -> S {
    state.apply_diagonal_phase(|n, k| chi * (k * (n - k)) as f64)
}

//! Closed-form output parities `<Pi_b>` at `chi = pi/2`, used as references
//! for the numeric pipeline.

use crate::inputs::{required_cutoff, InputSpec};
use crate::interferometer::KerrKind;

/// Number input `|n, 0>`.
///
/// Self-Kerr gives `sin(n phi)`; cross-Kerr gives `sin^n(phi)` for even `n`
/// and `-i^(n+1) sin(n phi)` for odd `n`. The vacuum has parity `+1`.
pub fn number_parity_oracle(n: usize, phi: f64, kind: KerrKind) -> f64 {
    if n == 0 {
        return 1.0;
    }
    match kind {
        KerrKind::SelfKerr => (n as f64 * phi).sin(),
        KerrKind::CrossKerr if n.is_multiple_of(2) => phi.sin().powi(n as i32),
        KerrKind::CrossKerr => {
            // i^(n+1) is real for odd n: +1 when n = 3 mod 4, -1 when n = 1 mod 4.
            let sign = if n % 4 == 3 { -1.0 } else { 1.0 };
            sign * (n as f64 * phi).sin()
        }
    }
}

/// Parity of a photon-number mixture, `sum_n p_n <Pi>_n`.
pub fn mixture_parity_oracle(weights: &[f64], phi: f64, kind: KerrKind) -> f64 {
    weights.iter().enumerate().map(|(n, p)| p * number_parity_oracle(n, phi, kind)).sum()
}

/// Thermal input of mean `nbar`.
///
/// The self-Kerr case sums the geometric series in closed form,
/// `1/(1+nbar) + Im[(1/(1+nbar)) / (1 - q e^{i phi})]` with
/// `q = nbar/(1+nbar)`; cross-Kerr sums the series to a tail below `1e-12`.
pub fn thermal_parity_oracle(nbar: f64, phi: f64, kind: KerrKind) -> f64 {
    let p0 = 1.0 / (1.0 + nbar);
    match kind {
        KerrKind::SelfKerr => {
            let q = nbar / (1.0 + nbar);
            let (s, c) = phi.sin_cos();
            // Im[1/(1 - q e^{i phi})] = q sin(phi) / (1 - 2 q cos(phi) + q^2)
            p0 + p0 * q * s / (1.0 - 2.0 * q * c + q * q)
        }
        KerrKind::CrossKerr => series(&InputSpec::thermal(nbar), phi, kind),
    }
}

/// Coherent input of mean `nbar`.
///
/// Self-Kerr: `e^{-nbar} [1 + e^{nbar cos phi} sin(nbar sin phi)]`.
pub fn coherent_parity_oracle(nbar: f64, phi: f64, kind: KerrKind) -> f64 {
    match kind {
        KerrKind::SelfKerr => (-nbar).exp() * (1.0 + (nbar * phi.cos()).exp() * (nbar * phi.sin()).sin()),
        KerrKind::CrossKerr => series(&InputSpec::coherent(nbar), phi, kind),
    }
}

fn series(spec: &InputSpec, phi: f64, kind: KerrKind) -> f64 {
    let n_max = required_cutoff(spec, 1e-13).expect("valid series input");
    mixture_parity_oracle(&spec.weights(n_max), phi, kind)
}

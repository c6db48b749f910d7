use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::interferometer::KerrKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReferenceInput {
    Thermal,
    Coherent,
    Number,
}

/// Closed-form QFI at `chi = pi/2` for input mean `nbar` (the photon number
/// itself for number input).
///
/// | input    | self-Kerr        | cross-Kerr                 |
/// |----------|------------------|----------------------------|
/// | thermal  | `2 nbar^2 + nbar`| `nbar^2 + nbar`            |
/// | coherent | `nbar^2 + 2 nbar`| `nbar^2 / 2 + 2 nbar`      |
/// | number   | `n^2`            | `n^2` (odd `n`), `n` (even)|
pub fn analytic_qfi_reference(input: ReferenceInput, kind: KerrKind, nbar: f64, chi: f64) -> Result<f64> {
    if (chi - FRAC_PI_2).abs() > 1e-12 {
        return Err(Error::UnsupportedChi { chi });
    }
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::invalid("nbar", format!("must be finite and non-negative, got {nbar}")));
    }
    let n2 = nbar * nbar;
    Ok(match (input, kind) {
        (ReferenceInput::Thermal, KerrKind::SelfKerr) => 2.0 * n2 + nbar,
        (ReferenceInput::Thermal, KerrKind::CrossKerr) => n2 + nbar,
        (ReferenceInput::Coherent, KerrKind::SelfKerr) => n2 + 2.0 * nbar,
        (ReferenceInput::Coherent, KerrKind::CrossKerr) => 0.5 * n2 + 2.0 * nbar,
        (ReferenceInput::Number, kind) => {
            if nbar.fract() != 0.0 {
                return Err(Error::invalid("nbar", format!("number input needs an integer photon number, got {nbar}")));
            }
            match kind {
                KerrKind::SelfKerr => n2,
                KerrKind::CrossKerr if (nbar as u64) % 2 == 1 => n2,
                KerrKind::CrossKerr => nbar,
            }
        }
    })
}

/// Quantum Cramér-Rao bound `1 / sqrt(F_Q)`.
pub fn cramer_rao_minimum(fq: f64) -> Result<f64> {
    if !(fq > 0.0) {
        return Err(Error::ZeroInformation { value: fq });
    }
    Ok(1.0 / fq.sqrt())
}

/// Standard quantum limit on the phase error, `1 / sqrt(nbar)`.
pub fn shot_noise_limit(nbar: f64) -> f64 {
    1.0 / nbar.sqrt()
}

/// Heisenberg limit on the phase error, `1 / nbar`.
pub fn heisenberg_limit(nbar: f64) -> f64 {
    1.0 / nbar
}

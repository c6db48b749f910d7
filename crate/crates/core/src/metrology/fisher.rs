use super::family::PhaseFamily;
use super::scan::{golden_section_max, max_scan};
use super::PARITY_MODE;
use crate::detection::CountTable;
use crate::error::{Error, Result};
use crate::fockspace::ModeSelector;

/// Outcomes below this probability are left out of Fisher sums.
pub const PROBABILITY_FLOOR: f64 = 1e-14;
/// Largest accepted relative gap between analytic and finite-difference
/// derivatives.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-5;
/// Derivative magnitude below which the parity estimator is stationary.
const STATIONARY_SLOPE: f64 = 1e-12;

/// `Delta phi = sqrt(1 - <Pi>^2) / |d<Pi>/dphi|`; `+inf` at stationary points.
pub fn phase_error_from_parity(parity: f64, slope: f64) -> f64 {
    if slope.abs() < STATIONARY_SLOPE {
        return f64::INFINITY;
    }
    (1.0 - parity * parity).max(0.0).sqrt() / slope.abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherValue {
    pub value: f64,
    /// Outcomes skipped for falling below [`PROBABILITY_FLOOR`].
    pub skipped: usize,
}

/// `F = sum (dp)^2 / p` over outcomes with `p >= PROBABILITY_FLOOR`.
pub fn classical_fisher(probs: &[f64], derivs: &[f64]) -> FisherValue {
    debug_assert_eq!(probs.len(), derivs.len());
    let mut value = 0.0;
    let mut skipped = 0;
    for (&p, &d) in probs.iter().zip(derivs) {
        if p < PROBABILITY_FLOOR {
            skipped += 1;
        } else {
            value += d * d / p;
        }
    }
    FisherValue { value, skipped }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectionScheme {
    /// Photon counting on one output detector only.
    Single(ModeSelector),
    /// Count difference `m_a - m_b`.
    Difference,
    /// Complete record of both detectors.
    Joint,
    /// Two-outcome parity of one output mode.
    Parity(ModeSelector),
}

impl DetectionScheme {
    pub const REPORTED: [DetectionScheme; 4] = [
        DetectionScheme::Single(PARITY_MODE),
        DetectionScheme::Difference,
        DetectionScheme::Joint,
        DetectionScheme::Parity(PARITY_MODE),
    ];

    pub fn label(self) -> &'static str {
        match self {
            DetectionScheme::Single(_) => "single",
            DetectionScheme::Difference => "difference",
            DetectionScheme::Joint => "joint",
            DetectionScheme::Parity(_) => "parity",
        }
    }
}

/// Outcome probabilities and derivatives seen by a scheme.
pub fn scheme_outcomes(scheme: DetectionScheme, p: &CountTable, dp: &CountTable) -> (Vec<f64>, Vec<f64>) {
    match scheme {
        DetectionScheme::Joint => (p.values().collect(), dp.values().collect()),
        DetectionScheme::Single(mode) => (p.marginal(mode), dp.marginal(mode)),
        DetectionScheme::Difference => (p.difference_marginal(), dp.difference_marginal()),
        DetectionScheme::Parity(mode) => {
            let (pe, po) = p.split_by_parity(mode);
            let (de, dodd) = dp.split_by_parity(mode);
            (vec![pe, po], vec![de, dodd])
        }
    }
}

/// Classical Fisher information of a scheme at `phi`, analytic derivative.
pub fn fisher_information(family: &PhaseFamily, phi: f64, scheme: DetectionScheme) -> FisherValue {
    let (dist, dp) = family.tables(phi);
    let (p, d) = scheme_outcomes(scheme, dist.table(), &dp);
    classical_fisher(&p, &d)
}

/// As [`fisher_information`], but first cross-checks the analytic derivative
/// against a central difference with step `delta`.
pub fn fisher_information_checked(family: &PhaseFamily, phi: f64, scheme: DetectionScheme, delta: f64) -> Result<FisherValue> {
    let (dist, dp) = family.tables(phi);
    let fd = family.finite_difference(phi, delta);
    let scale = dp.values().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
    let gap = dp.values().zip(fd.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let deviation = gap / scale;
    if deviation > DERIVATIVE_TOLERANCE {
        return Err(Error::DerivativeMismatch { deviation });
    }
    let (p, d) = scheme_outcomes(scheme, dist.table(), &dp);
    Ok(classical_fisher(&p, &d))
}

/// Maximum of a scheme's Fisher information over `phis`, refined by a
/// golden-section search between the neighbours of the best grid point.
///
/// The refinement matters for parity, whose information has removable 0/0
/// points where `<Pi> = +-1`; a grid point sitting on one reads zero.
pub fn maximize_fisher(family: &PhaseFamily, phis: &[f64], scheme: DetectionScheme) -> (f64, f64) {
    let values = crate::par::map_slice(phis, |&phi| fisher_information(family, phi, scheme).value);
    let Some((best, at)) = max_scan(phis, &values) else {
        return (0.0, f64::NAN);
    };
    let i = phis.iter().position(|&p| p == at).unwrap_or(0);
    let lo = phis[i.saturating_sub(1)];
    let hi = phis[(i + 1).min(phis.len() - 1)];
    if hi <= lo {
        return (best, at);
    }
    let (m, x) = golden_section_max(|phi| fisher_information(family, phi, scheme).value, lo, hi, 1e-9 * (hi - lo).max(1.0));
    if m > best { (m, x) } else { (best, at) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_estimator_limits() {
        assert_eq!(phase_error_from_parity(0.3, 0.0), f64::INFINITY);
        assert!((phase_error_from_parity(0.0, 5.0) - 0.2).abs() < 1e-15);
        // <Pi> = sin(n phi): sqrt(1 - sin^2)/|n cos| = 1/n.
        let (n, phi) = (4.0f64, 0.3f64);
        assert!((phase_error_from_parity((n * phi).sin(), n * (n * phi).cos()) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn two_outcome_fisher_is_inverse_parity_error() {
        let (pi, dpi) = (0.3f64, -1.7f64);
        let f = classical_fisher(&[(1.0 + pi) / 2.0, (1.0 - pi) / 2.0], &[dpi / 2.0, -dpi / 2.0]);
        let want = dpi * dpi / (1.0 - pi * pi);
        assert!((f.value - want).abs() < 1e-13);
        assert!((f.value - 1.0 / phase_error_from_parity(pi, dpi).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn floor_skips_outcomes() {
        let f = classical_fisher(&[1.0, 0.0, 1e-15], &[0.0, 1.0, 1.0]);
        assert_eq!(f.value, 0.0);
        assert_eq!(f.skipped, 2);
    }
}

//! Phase estimation: parity phase error, classical Fisher information per
//! detection scheme, quantum Fisher information and Cramér-Rao bounds.

mod family;
mod fisher;
mod qfi;
mod reference;
mod report;
mod scan;

pub use family::PhaseFamily;
pub use fisher::{
    classical_fisher, fisher_information, fisher_information_checked, maximize_fisher, phase_error_from_parity, scheme_outcomes,
    DetectionScheme, FisherValue, DERIVATIVE_TOLERANCE, PROBABILITY_FLOOR,
};
pub use qfi::{qfi, qfi_mixed, qfi_of_state, qfi_pure, EIGENVALUE_PAIR_FLOOR};
pub use reference::{analytic_qfi_reference, cramer_rao_minimum, heisenberg_limit, shot_noise_limit, ReferenceInput};
pub use report::{fisher_report, FisherPoint, FisherReport, PhaseGrid};
pub use scan::{golden_section_max, max_scan, min_phase_error_scan, refine_extremum};

/// Parity is read from the mode-`b` output, as is the single-detector scheme.
pub const PARITY_MODE: crate::fockspace::ModeSelector = crate::fockspace::ModeSelector::ModeB;

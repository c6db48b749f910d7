//! Two-mode truncated Fock-space simulator for Kerr-nonlinear Mach-Zehnder
//! interferometers.
//!
//! States are stored sector by sector: sector `n` holds every basis state with
//! `n` photons in total, indexed by `k`, the number of photons in mode `a`.
//! Every lossless element of the interferometer conserves total photon number,
//! so beamsplitters and Kerr phases act on each sector independently and a
//! thermal input becomes a family of independent sectors.
//!
//! The crate is organised bottom-up:
//!
//! * [`fockspace`]: sector-blocked pure and mixed states, beamsplitter, phase
//!   shifter and Kerr unitaries.
//! * [`inputs`]: number, coherent, thermal and diagonal-mixture inputs.
//! * [`interferometer`]: the self-Kerr / cross-Kerr MZI with optional arm loss.
//! * [`detection`]: photon-count distributions, detector inefficiency, parity
//!   and the cross-Kerr parity filter.
//! * [`metrology`]: parity phase error, classical and quantum Fisher
//!   information, Cramér-Rao bounds.
//! * [`witnesses`]: Hillery-Zubairy and Shchukin-Vogel entanglement tests and
//!   `g2(0)`.

pub mod detection;
pub mod error;
pub mod fockspace;
pub mod inputs;
pub mod interferometer;
pub mod linalg;
pub mod metrology;
pub mod par;
pub mod witnesses;

pub use error::{Error, Result};
pub use fockspace::{ModeSelector, SectorBlock, SectorDensity, SectorState, State, TwoModeState, C64};
pub use inputs::{InputKind, InputSpec};
pub use interferometer::{CircuitSpec, KerrKind, LossChannel, LossPlacement, Tap};

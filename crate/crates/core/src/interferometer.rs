//! The Kerr-nonlinear Mach-Zehnder interferometer.
//!
//! Right to left, the lossless circuit is
//! `BS . PS(phi) . BS . Kerr(chi) . PS(pi/2) . BS`, with the Kerr element
//! either self-Kerr on mode `a` or cross-Kerr between the modes. An optional
//! pure-loss channel sits in one arm at a configurable point before `PS(phi)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fockspace::{
    apply_beamsplitter, apply_cross_kerr, apply_phase_shift, apply_self_kerr, ModeSelector, SectorBlock, SectorDensity,
    State, TwoModeState, C64,
};
use crate::linalg::{binomial_table, mul_adjoint};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KerrKind {
    SelfKerr,
    CrossKerr,
}

impl KerrKind {
    pub fn label(self) -> &'static str {
        match self {
            KerrKind::SelfKerr => "SK",
            KerrKind::CrossKerr => "CK",
        }
    }
}

impl fmt::Display for KerrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Where the arm-loss channel acts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossPlacement {
    /// Between the first beamsplitter and the `PS(pi/2)`/Kerr stage.
    #[default]
    AfterFirstBs,
    /// Between the second beamsplitter and `PS(phi)`.
    AfterSecondBs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Tap {
    #[default]
    None,
    AfterSecondBs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSpec {
    pub kind: KerrKind,
    pub chi: f64,
    pub phi: f64,
    /// Fraction of photons lost in the lossy arm, `sin^2(theta)` of the
    /// fictitious beamsplitter.
    pub eta_loss: f64,
    pub loss_mode: ModeSelector,
    pub loss_placement: LossPlacement,
    pub tap: Tap,
}

impl CircuitSpec {
    pub fn new(kind: KerrKind, chi: f64, phi: f64) -> Self {
        Self {
            kind,
            chi,
            phi,
            eta_loss: 0.0,
            loss_mode: ModeSelector::ModeA,
            loss_placement: LossPlacement::default(),
            tap: Tap::None,
        }
    }

    pub fn self_kerr(chi: f64) -> Self {
        Self::new(KerrKind::SelfKerr, chi, 0.0)
    }

    pub fn cross_kerr(chi: f64) -> Self {
        Self::new(KerrKind::CrossKerr, chi, 0.0)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn with_loss(mut self, eta_loss: f64) -> Self {
        self.eta_loss = eta_loss;
        self
    }

    pub fn with_loss_mode(mut self, mode: ModeSelector) -> Self {
        self.loss_mode = mode;
        self
    }

    pub fn with_loss_placement(mut self, placement: LossPlacement) -> Self {
        self.loss_placement = placement;
        self
    }

    pub fn with_tap(mut self, tap: Tap) -> Self {
        self.tap = tap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.chi.is_finite() {
            return Err(Error::invalid("chi", format!("must be finite, got {}", self.chi)));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("phi", format!("must be finite, got {}", self.phi)));
        }
        if !(0.0..=1.0).contains(&self.eta_loss) {
            return Err(Error::invalid("eta_loss", format!("must lie in [0, 1], got {}", self.eta_loss)));
        }
        Ok(())
    }

    fn loss_channel(&self) -> Result<Option<LossChannel>> {
        if self.eta_loss > 0.0 {
            Ok(Some(LossChannel::from_loss(self.eta_loss, self.loss_mode)?))
        } else {
            Ok(None)
        }
    }
}

/// Single-mode pure-loss channel with transmission `eta_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossChannel {
    transmission: f64,
    mode: ModeSelector,
}

impl LossChannel {
    pub fn new(transmission: f64, mode: ModeSelector) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::invalid("transmission", format!("must lie in [0, 1], got {transmission}")));
        }
        Ok(Self { transmission, mode })
    }

    /// Channel losing a fraction `eta_loss` of the photons.
    pub fn from_loss(eta_loss: f64, mode: ModeSelector) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta_loss) {
            return Err(Error::invalid("eta_loss", format!("must lie in [0, 1], got {eta_loss}")));
        }
        Self::new(1.0 - eta_loss, mode)
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn mode(&self) -> ModeSelector {
        self.mode
    }
}

/// Kraus action of losing `j` photons from sector `n`: list of
/// `(source index, target index, amplitude)`.
fn kraus_entries(n: usize, j: usize, mode: ModeSelector, amps: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    (0..=n)
        .filter_map(|k| {
            let c = mode.count(n, k);
            if c < j {
                return None;
            }
            let target = match mode {
                ModeSelector::ModeA => k - j,
                ModeSelector::ModeB => k,
            };
            let a = amps[c][j];
            (a != 0.0).then_some((k, target, a))
        })
        .collect()
}

/// Applies the pure-loss channel `rho -> sum_j K_j rho K_j^dagger`, with
/// `K_j |m> = sqrt(C(m, j) eta_t^(m-j) (1-eta_t)^j) |m - j>` on the target
/// mode. Sector `n` feeds sectors `n - j`.
pub fn apply_arm_loss(state: &SectorDensity, channel: &LossChannel) -> Result<SectorDensity> {
    if channel.transmission == 1.0 {
        return Ok(state.clone());
    }
    let n_max = state.n_max();
    // amps[m][j]: amplitude for losing j of m photons.
    let amps: Vec<Vec<f64>> = binomial_table(n_max, 1.0 - channel.transmission)
        .into_iter()
        .map(|row| row.into_iter().map(f64::sqrt).collect())
        .collect();
    let mode = channel.mode;

    let blocks = par::map_range(n_max + 1, |m| {
        let mut target = DMatrix::<C64>::zeros(m + 1, m + 1);
        // Rank-one sources are gathered as columns of `w` and added as `w w^dagger`.
        let mut columns: Vec<DVector<C64>> = Vec::new();
        for n in m..=n_max {
            let entries = kraus_entries(n, n - m, mode, &amps);
            if entries.is_empty() {
                continue;
            }
            match state.block(n) {
                SectorBlock::Rank1(u) => {
                    let mut w = DVector::<C64>::zeros(m + 1);
                    for &(src, dst, a) in &entries {
                        w[dst] += u[src] * a;
                    }
                    columns.push(w);
                }
                SectorBlock::Dense(b) => {
                    for &(sr, dr, ar) in &entries {
                        for &(sc, dc, ac) in &entries {
                            target[(dr, dc)] += b[(sr, sc)] * (ar * ac);
                        }
                    }
                }
            }
        }
        if !columns.is_empty() {
            let w = DMatrix::from_columns(&columns);
            target += mul_adjoint(&w, &w);
        }
        SectorBlock::Dense(target)
    });

    let mut coherences = crate::fockspace::Coherences::new();
    for (&(n, m), c) in state.coherences() {
        for j in 0..=m {
            let rows = kraus_entries(n, j, mode, &amps);
            let cols = kraus_entries(m, j, mode, &amps);
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            let t = coherences.entry((n - j, m - j)).or_insert_with(|| DMatrix::zeros(n - j + 1, m - j + 1));
            for &(sr, dr, ar) in &rows {
                for &(sc, dc, ac) in &cols {
                    t[(dr, dc)] += c[(sr, sc)] * (ar * ac);
                }
            }
        }
    }
    SectorDensity::from_parts(blocks, coherences, state.tail_deficit()).repair_hermiticity()
}

/// [`apply_arm_loss`] on either representation; pure states become mixed.
pub fn apply_loss_to_state(state: &State, channel: &LossChannel) -> Result<State> {
    if channel.transmission == 1.0 {
        return Ok(state.clone());
    }
    Ok(State::Mixed(apply_arm_loss(&state.to_density(), channel)?))
}

pub fn apply_kerr<S: TwoModeState>(state: &S, kind: KerrKind, chi: f64) -> S {
    match kind {
        KerrKind::SelfKerr => apply_self_kerr(state, chi),
        KerrKind::CrossKerr => apply_cross_kerr(state, chi),
    }
}

/// State after `BS . Kerr . PS(pi/2) . BS`, including the loss channel when
/// it is placed after the first beamsplitter. Independent of `phi`.
pub fn state_after_second_bs(input: &State, spec: &CircuitSpec) -> Result<State> {
    spec.validate()?;
    let mut s = apply_beamsplitter(input);
    if spec.loss_placement == LossPlacement::AfterFirstBs {
        if let Some(ch) = spec.loss_channel()? {
            s = apply_loss_to_state(&s, &ch)?;
        }
    }
    let s = apply_phase_shift(&s, FRAC_PI_2, ModeSelector::ModeA);
    let s = apply_kerr(&s, spec.kind, spec.chi);
    Ok(apply_beamsplitter(&s))
}

/// State entering `PS(phi)`: everything upstream of the phase shifter,
/// including the loss channel wherever it is placed. Independent of `phi`.
pub fn state_before_phase(input: &State, spec: &CircuitSpec) -> Result<State> {
    let s = state_after_second_bs(input, spec)?;
    if spec.loss_placement == LossPlacement::AfterSecondBs {
        if let Some(ch) = spec.loss_channel()? {
            return apply_loss_to_state(&s, &ch);
        }
    }
    Ok(s)
}

/// `BS . PS(phi)` applied to a state from [`state_before_phase`].
pub fn finish_circuit(before_phase: &State, phi: f64) -> State {
    apply_beamsplitter(&apply_phase_shift(before_phase, phi, ModeSelector::ModeA))
}

/// Full interferometer output.
pub fn run_circuit(input: &State, spec: &CircuitSpec) -> Result<State> {
    Ok(finish_circuit(&state_before_phase(input, spec)?, spec.phi))
}

#[derive(Clone, Debug)]
pub struct CircuitRun {
    pub output: State,
    pub tapped: Option<State>,
}

/// Runs the circuit and keeps the state at the spec's tap point.
pub fn run_tapped(input: &State, spec: &CircuitSpec) -> Result<CircuitRun> {
    let after_bs2 = state_after_second_bs(input, spec)?;
    let before_phase = match (spec.loss_placement, spec.loss_channel()?) {
        (LossPlacement::AfterSecondBs, Some(ch)) => apply_loss_to_state(&after_bs2, &ch)?,
        _ => after_bs2.clone(),
    };
    let output = finish_circuit(&before_phase, spec.phi);
    let tapped = match spec.tap {
        Tap::None => None,
        Tap::AfterSecondBs => Some(after_bs2),
    };
    Ok(CircuitRun { output, tapped })
}

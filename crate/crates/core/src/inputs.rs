//! Input states: all photons start in mode `a`, mode `b` is vacuum.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fockspace::{SectorDensity, SectorState, State, C64, DEFAULT_TAIL_TOLERANCE};
use crate::linalg::ln_factorials;

#[derive(Clone, Debug, PartialEq)]
pub enum InputKind {
    /// `|n, 0>`.
    Number(usize),
    /// `|alpha, 0>` with real `alpha = sqrt(nbar)`.
    Coherent { nbar: f64 },
    /// Thermal mode `a` with mean `nbar`, vacuum in `b`.
    Thermal { nbar: f64 },
    /// `sum_n p_n |n,0><n,0|`, weights indexed by photon number.
    DiagonalMixture(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputSpec {
    pub kind: InputKind,
    pub tail_tolerance: f64,
}

impl InputSpec {
    pub fn new(kind: InputKind) -> Self {
        Self { kind, tail_tolerance: DEFAULT_TAIL_TOLERANCE }
    }

    pub fn number(n: usize) -> Self {
        Self::new(InputKind::Number(n))
    }

    pub fn coherent(nbar: f64) -> Self {
        Self::new(InputKind::Coherent { nbar })
    }

    pub fn thermal(nbar: f64) -> Self {
        Self::new(InputKind::Thermal { nbar })
    }

    pub fn mixture(weights: Vec<f64>) -> Self {
        Self::new(InputKind::DiagonalMixture(weights))
    }

    pub fn with_tail_tolerance(mut self, tail_tolerance: f64) -> Self {
        self.tail_tolerance = tail_tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::invalid("tail_tolerance", format!("must lie in (0, 1), got {}", self.tail_tolerance)));
        }
        match &self.kind {
            InputKind::Number(_) => Ok(()),
            InputKind::Coherent { nbar } | InputKind::Thermal { nbar } => {
                if nbar.is_finite() && *nbar >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid("nbar", format!("must be finite and non-negative, got {nbar}")))
                }
            }
            InputKind::DiagonalMixture(w) => {
                if w.is_empty() {
                    return Err(Error::invalid("weights", "empty mixture"));
                }
                if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                    return Err(Error::invalid("weights", format!("negative or non-finite weight {x}")));
                }
                let s: f64 = w.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid("weights", format!("must sum to 1, got {s}")));
                }
                Ok(())
            }
        }
    }

    /// Mean photon number of the untruncated input.
    pub fn mean_photon_number(&self) -> f64 {
        match &self.kind {
            InputKind::Number(n) => *n as f64,
            InputKind::Coherent { nbar } | InputKind::Thermal { nbar } => *nbar,
            InputKind::DiagonalMixture(w) => w.iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
        }
    }

    /// Photon-number probabilities `p_0 ..= p_n_max`.
    pub fn weights(&self, n_max: usize) -> Vec<f64> {
        match &self.kind {
            InputKind::Number(m) => (0..=n_max).map(|n| if n == *m { 1.0 } else { 0.0 }).collect(),
            InputKind::Thermal { nbar } => thermal_weights(*nbar, n_max),
            InputKind::Coherent { nbar } => poisson_weights(*nbar, n_max),
            InputKind::DiagonalMixture(w) => (0..=n_max).map(|n| w.get(n).copied().unwrap_or(0.0)).collect(),
        }
    }

    /// Probability mass above `n_max`.
    pub fn tail_mass(&self, n_max: usize) -> f64 {
        match &self.kind {
            InputKind::Number(m) => {
                if *m > n_max { 1.0 } else { 0.0 }
            }
            InputKind::Thermal { nbar } => {
                if *nbar == 0.0 {
                    0.0
                } else {
                    ((n_max + 1) as f64 * (nbar / (1.0 + nbar)).ln()).exp()
                }
            }
            InputKind::Coherent { nbar } => poisson_tail(*nbar, n_max),
            InputKind::DiagonalMixture(w) => w.iter().skip(n_max + 1).sum(),
        }
    }
}

fn thermal_weights(nbar: f64, n_max: usize) -> Vec<f64> {
    if nbar == 0.0 {
        return (0..=n_max).map(|n| if n == 0 { 1.0 } else { 0.0 }).collect();
    }
    let lq = (nbar / (1.0 + nbar)).ln();
    let l0 = -(1.0 + nbar).ln();
    (0..=n_max).map(|n| (l0 + n as f64 * lq).exp()).collect()
}

fn poisson_weights(nbar: f64, n_max: usize) -> Vec<f64> {
    if nbar == 0.0 {
        return (0..=n_max).map(|n| if n == 0 { 1.0 } else { 0.0 }).collect();
    }
    let lnf = ln_factorials(n_max);
    (0..=n_max).map(|n| (-nbar + n as f64 * nbar.ln() - lnf[n]).exp()).collect()
}

fn poisson_tail(nbar: f64, n_max: usize) -> f64 {
    if nbar == 0.0 {
        return 0.0;
    }
    // Sum the upper tail directly: 1 - cdf cancels catastrophically near 1e-16.
    let ln_nbar = nbar.ln();
    let mut n = n_max + 1;
    let mut ln_term = -nbar + n as f64 * ln_nbar - ln_factorials(n)[n];
    let mut total = 0.0;
    loop {
        let term = ln_term.exp();
        total += term;
        if (n as f64 > nbar && term <= total * 1e-18) || term == 0.0 && n as f64 > nbar {
            break;
        }
        n += 1;
        ln_term += ln_nbar - (n as f64).ln();
    }
    total.min(1.0)
}

/// Smallest cutoff `N` whose neglected tail is below `tail_tolerance`.
pub fn required_cutoff(spec: &InputSpec, tail_tolerance: f64) -> Result<usize> {
    InputSpec { tail_tolerance, ..spec.clone() }.validate()?;
    let start = match &spec.kind {
        InputKind::Number(n) => return Ok(*n),
        InputKind::DiagonalMixture(w) => {
            let mut tail = 0.0;
            for n in (0..w.len()).rev() {
                tail += w[n];
                if tail >= tail_tolerance {
                    return Ok(n);
                }
            }
            return Ok(0);
        }
        InputKind::Thermal { nbar } if *nbar > 0.0 => {
            // q^(N+1) < tol; start just below the estimate and walk up.
            let est = (tail_tolerance.ln() / (nbar / (1.0 + nbar)).ln()).floor() as usize;
            est.saturating_sub(2)
        }
        _ => 0,
    };
    let mut n = start;
    while spec.tail_mass(n) >= tail_tolerance {
        n += 1;
    }
    Ok(n)
}

impl InputSpec {
    /// Cutoff from this spec's own tolerance.
    pub fn cutoff(&self) -> Result<usize> {
        required_cutoff(self, self.tail_tolerance)
    }
}

/// Builds the input state at truncation `n_max`.
///
/// Coherent input is returned as a pure state (its inter-sector coherences
/// matter for the quantum Fisher information); the diagonal inputs are
/// sector-diagonal mixtures with every photon in mode `a`.
pub fn build_input(spec: &InputSpec, n_max: usize) -> Result<State> {
    spec.validate()?;
    let tail = spec.tail_mass(n_max);
    if tail >= spec.tail_tolerance {
        return Err(Error::Truncation { n_max, tail, tolerance: spec.tail_tolerance });
    }
    let weights = spec.weights(n_max);
    let vectors: Vec<DVector<C64>> = weights
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let mut v = DVector::zeros(n + 1);
            v[n] = C64::new(p.sqrt(), 0.0);
            v
        })
        .collect();
    match spec.kind {
        InputKind::Coherent { .. } => Ok(State::Pure(SectorState::from_sectors(vectors, tail)?)),
        _ => Ok(State::Mixed(SectorDensity::from_rank1(vectors, tail)?)),
    }
}

/// [`build_input`] at the spec's own cutoff.
pub fn build_input_auto(spec: &InputSpec) -> Result<State> {
    build_input(spec, spec.cutoff()?)
}

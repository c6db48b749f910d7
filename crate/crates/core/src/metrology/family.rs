use nalgebra::DMatrix;

use crate::detection::{CountTable, DetectorModel, JointCountDistribution};
use crate::error::Result;
use crate::fockspace::{beamsplitter_matrices, SectorBlock, State, TwoModeState, C64};
use crate::interferometer::{state_before_phase, CircuitSpec};
use crate::par;

/// Output statistics as a function of the unknown phase.
///
/// Everything upstream of `PS(phi)` is computed once; each phase point only
/// applies the phase shifter, the final beamsplitter and the detectors. The
/// derivative is analytic: `d/dphi PS(phi) = i n_a PS(phi)`, and everything
/// downstream of the phase shifter is linear and phase independent.
#[derive(Clone, Debug)]
pub struct PhaseFamily {
    before_phase: State,
    detector: DetectorModel,
    response: Vec<Vec<f64>>,
    beamsplitters: Vec<std::sync::Arc<DMatrix<C64>>>,
}

impl PhaseFamily {
    pub fn new(input: &State, spec: &CircuitSpec, detector: DetectorModel) -> Result<Self> {
        Ok(Self::from_state_before_phase(state_before_phase(input, spec)?, detector))
    }

    pub fn from_state_before_phase(before_phase: State, detector: DetectorModel) -> Self {
        let n_max = before_phase.n_max();
        Self {
            response: detector.response(n_max),
            beamsplitters: beamsplitter_matrices(n_max),
            before_phase,
            detector,
        }
    }

    pub fn state_before_phase(&self) -> &State {
        &self.before_phase
    }

    pub fn detector(&self) -> &DetectorModel {
        &self.detector
    }

    pub fn n_max(&self) -> usize {
        self.before_phase.n_max()
    }

    /// Ideal-detector populations and their phase derivatives.
    pub fn ideal_tables(&self, phi: f64) -> (CountTable, CountTable) {
        let rows = par::map_range(self.n_max() + 1, |n| self.sector_tables(n, phi));
        let (p, dp): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        (CountTable::from_rows(p), CountTable::from_rows(dp))
    }

    fn sector_tables(&self, n: usize, phi: f64) -> (Vec<f64>, Vec<f64>) {
        let b = &*self.beamsplitters[n];
        let phases: Vec<C64> = (0..=n).map(|k| C64::cis(phi * k as f64)).collect();
        let vector_route = |v: &nalgebra::DVector<C64>| {
            let shifted = nalgebra::DVector::from_iterator(n + 1, v.iter().zip(&phases).map(|(a, p)| a * p));
            let gen = nalgebra::DVector::from_iterator(n + 1, shifted.iter().enumerate().map(|(k, a)| a * C64::new(0.0, k as f64)));
            let u = b * shifted;
            let du = b * gen;
            let p = u.iter().map(|z| z.norm_sqr()).collect();
            let dp = u.iter().zip(du.iter()).map(|(z, dz)| 2.0 * (z.conj() * dz).re).collect();
            (p, dp)
        };
        match &self.before_phase {
            State::Pure(s) => vector_route(s.sector(n)),
            State::Mixed(d) => match d.block(n) {
                SectorBlock::Rank1(u) => vector_route(u),
                SectorBlock::Dense(rho) => {
                    let rho = DMatrix::from_fn(n + 1, n + 1, |r, c| rho[(r, c)] * phases[r] * phases[c].conj());
                    let krho = DMatrix::from_fn(n + 1, n + 1, |r, c| rho[(r, c)] * C64::new(0.0, r as f64));
                    let y = b * &rho;
                    let x = b * &krho;
                    let mut p = vec![0.0; n + 1];
                    let mut dp = vec![0.0; n + 1];
                    for k in 0..=n {
                        let mut pk = C64::new(0.0, 0.0);
                        let mut dk = C64::new(0.0, 0.0);
                        for j in 0..=n {
                            let bc = b[(k, j)].conj();
                            pk += y[(k, j)] * bc;
                            dk += x[(k, j)] * bc;
                        }
                        p[k] = pk.re;
                        dp[k] = 2.0 * dk.re;
                    }
                    (p, dp)
                }
            },
        }
    }

    /// Detected-count distribution and its phase derivative.
    pub fn tables(&self, phi: f64) -> (JointCountDistribution, CountTable) {
        let (p, dp) = self.ideal_tables(phi);
        let p = self.detector.smear_with(&p, &self.response);
        let dp = self.detector.smear_with(&dp, &self.response);
        let smeared = !self.detector.is_ideal();
        (JointCountDistribution::from_table(p, smeared, self.detector.efficiency()), dp)
    }

    pub fn distribution(&self, phi: f64) -> JointCountDistribution {
        self.tables(phi).0
    }

    /// Analytic `d p / d phi` over detected outcomes.
    pub fn derivative(&self, phi: f64) -> CountTable {
        self.tables(phi).1
    }

    /// Central finite difference of the detected distribution.
    pub fn finite_difference(&self, phi: f64, delta: f64) -> CountTable {
        let (plus, _) = self.ideal_tables(phi + delta);
        let (minus, _) = self.ideal_tables(phi - delta);
        let plus = self.detector.smear_with(&plus, &self.response);
        let minus = self.detector.smear_with(&minus, &self.response);
        let rows = (0..=plus.n_max())
            .map(|n| plus.sector(n).iter().zip(minus.sector(n)).map(|(a, b)| (a - b) / (2.0 * delta)).collect())
            .collect();
        CountTable::from_rows(rows)
    }
}

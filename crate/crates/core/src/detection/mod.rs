//! Photon counting at the interferometer output.
//!
//! Outcomes are pairs `(m_a, m_b)` of detected photon numbers. Tables are
//! stored by sector like the states themselves: entry `[n][k]` is outcome
//! `(k, n - k)`. Detector inefficiency is the binomial model (an ideal
//! counter behind a beamsplitter of transmission `eta_det`), the same for both
//! detectors, with no dark counts.

mod closed_form;
mod filter;

pub use closed_form::{
    coherent_parity_oracle, mixture_parity_oracle, number_parity_oracle, thermal_parity_oracle,
};
pub use filter::{parity_filter, FilterClicks, SingleModeInput};

use crate::error::{Error, Result};
use crate::fockspace::{ModeSelector, TwoModeState};
use crate::linalg::binomial_table;

/// Entries more negative than this are reported as numerical defects rather
/// than silently clamped.
pub const NEGATIVE_ENTRY_TOLERANCE: f64 = -1e-12;

/// Real-valued table over outcomes `(m_a, m_b)`, `m_a + m_b <= n_max`.
///
/// Used both for probabilities and for their (signed) phase derivatives;
/// every map applied to it is linear.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    rows: Vec<Vec<f64>>,
}

impl CountTable {
    pub fn zeros(n_max: usize) -> Self {
        Self { rows: (0..=n_max).map(|n| vec![0.0; n + 1]).collect() }
    }

    pub(crate) fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows.iter().enumerate().all(|(n, r)| r.len() == n + 1));
        Self { rows }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Value at outcome `(m_a, m_b)`; zero outside the table.
    pub fn get(&self, m_a: usize, m_b: usize) -> f64 {
        self.rows.get(m_a + m_b).map_or(0.0, |r| r[m_a])
    }

    /// Outcomes with `n` detected photons in total, indexed by `m_a`.
    pub fn sector(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    /// All entries in sector order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().flatten().copied()
    }

    /// Binomial smearing with `binom[m][j]` = P(detect `j` of `m`), applied
    /// to each mode in turn.
    fn smear(&self, binom: &[Vec<f64>]) -> Self {
        let n_max = self.n_max();
        // grid[a][b], b <= n_max - a
        let mut grid: Vec<Vec<f64>> = (0..=n_max).map(|a| (0..=n_max - a).map(|b| self.get(a, b)).collect()).collect();
        // Mode a, for each fixed b.
        for b in 0..=n_max {
            let col: Vec<f64> = (0..=n_max - b).map(|a| grid[a][b]).collect();
            for a_det in 0..col.len() {
                grid[a_det][b] = (a_det..col.len()).map(|a| col[a] * binom[a][a_det]).sum();
            }
        }
        // Mode b, for each fixed a.
        for row in grid.iter_mut() {
            let orig = row.clone();
            for b_det in 0..orig.len() {
                row[b_det] = (b_det..orig.len()).map(|b| orig[b] * binom[b][b_det]).sum();
            }
        }
        let rows = (0..=n_max).map(|n| (0..=n).map(|k| grid[k][n - k]).collect()).collect();
        Self { rows }
    }

    /// Marginal over the other mode: entry `m` is the total at `count == m`.
    pub fn marginal(&self, mode: ModeSelector) -> Vec<f64> {
        let mut out = vec![0.0; self.n_max() + 1];
        for (n, row) in self.rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                out[mode.count(n, k)] += v;
            }
        }
        out
    }

    /// Marginal over `d = m_a - m_b`; entry `i` is `d = i - n_max`.
    pub fn difference_marginal(&self) -> Vec<f64> {
        let n_max = self.n_max();
        let mut out = vec![0.0; 2 * n_max + 1];
        for (n, row) in self.rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                out[n_max + 2 * k - n] += v;
            }
        }
        out
    }

    /// `sum (-1)^count * value` for the selected mode.
    pub fn parity_sum(&self, mode: ModeSelector) -> f64 {
        let (even, odd) = self.split_by_parity(mode);
        even - odd
    }

    /// `(sum over even counts, sum over odd counts)` for the selected mode.
    pub fn split_by_parity(&self, mode: ModeSelector) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for (n, row) in self.rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if mode.count(n, k).is_multiple_of(2) {
                    even += v;
                } else {
                    odd += v;
                }
            }
        }
        (even, odd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorModel {
    eta_det: f64,
}

impl DetectorModel {
    pub fn new(eta_det: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta_det) {
            return Err(Error::invalid("eta_det", format!("must lie in [0, 1], got {eta_det}")));
        }
        Ok(Self { eta_det })
    }

    pub fn ideal() -> Self {
        Self { eta_det: 1.0 }
    }

    pub fn efficiency(&self) -> f64 {
        self.eta_det
    }

    pub fn is_ideal(&self) -> bool {
        self.eta_det == 1.0
    }

    /// `table[m][j]`: probability of registering `j` of `m` photons.
    pub fn response(&self, n_max: usize) -> Vec<Vec<f64>> {
        binomial_table(n_max, self.eta_det)
    }

    /// Smears a table (probabilities or derivatives) with this response.
    pub fn smear_table(&self, table: &CountTable) -> CountTable {
        if self.is_ideal() {
            return table.clone();
        }
        table.smear(&self.response(table.n_max()))
    }

    pub(crate) fn smear_with(&self, table: &CountTable, response: &[Vec<f64>]) -> CountTable {
        if self.is_ideal() {
            return table.clone();
        }
        table.smear(response)
    }
}

/// Probability table over detected photon numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct JointCountDistribution {
    table: CountTable,
    smeared: bool,
    eta_det: f64,
    clamped: usize,
}

impl JointCountDistribution {
    /// Wraps a table, clamping tiny negative entries to zero and counting them.
    pub fn from_table(table: CountTable, smeared: bool, eta_det: f64) -> Self {
        let mut clamped = 0;
        let rows = table
            .rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| {
                        if v < 0.0 {
                            debug_assert!(v >= NEGATIVE_ENTRY_TOLERANCE * 1e3, "probability {v} far below zero");
                            clamped += 1;
                            0.0
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        Self { table: CountTable { rows }, smeared, eta_det, clamped }
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    pub fn probability(&self, m_a: usize, m_b: usize) -> f64 {
        self.table.get(m_a, m_b)
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    pub fn is_smeared(&self) -> bool {
        self.smeared
    }

    pub fn eta_det(&self) -> f64 {
        self.eta_det
    }

    /// Number of negative round-off entries clamped to zero.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn total(&self) -> f64 {
        self.table.total()
    }

    pub fn marginal(&self, mode: ModeSelector) -> Vec<f64> {
        self.table.marginal(mode)
    }
}

/// Fock-basis populations of an output state.
pub fn joint_count_distribution<S: TwoModeState>(state: &S) -> JointCountDistribution {
    let rows = (0..=state.n_max()).map(|n| state.sector_populations(n)).collect();
    JointCountDistribution::from_table(CountTable::from_rows(rows), false, 1.0)
}

/// Binomial detector inefficiency applied to both detectors.
pub fn apply_detector_efficiency(dist: &JointCountDistribution, model: &DetectorModel) -> Result<JointCountDistribution> {
    if dist.smeared {
        return Err(Error::DoubleSmear { eta: dist.eta_det });
    }
    let table = model.smear_table(&dist.table);
    Ok(JointCountDistribution::from_table(table, true, model.eta_det))
}

/// `<(-1)^{n_mode}>` from detected counts.
pub fn parity_expectation(dist: &JointCountDistribution, mode: ModeSelector) -> f64 {
    dist.table.parity_sum(mode)
}

/// Distribution of the count difference `d = m_a - m_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceDistribution {
    n_max: usize,
    probs: Vec<f64>,
}

impl DifferenceDistribution {
    pub fn probability(&self, d: i64) -> f64 {
        let i = d + self.n_max as i64;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    /// Probabilities for `d = -n_max ..= n_max`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| (i as f64 - self.n_max as f64) * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

pub fn intensity_difference_distribution(dist: &JointCountDistribution) -> DifferenceDistribution {
    DifferenceDistribution { n_max: dist.n_max(), probs: dist.table.difference_marginal() }
}

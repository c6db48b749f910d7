use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{TwoModeState, C64};
use crate::error::{Error, Result};
use crate::par;

/// Pure two-mode state resolved into total-photon-number sectors.
///
/// The normalization deficit from truncation is carried alongside the
/// amplitudes and is never folded back in by renormalizing.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    sectors: Vec<DVector<C64>>,
    tail_deficit: f64,
}

impl SectorState {
    /// Builds a state from per-sector amplitude vectors; `sectors[n]` must have
    /// length `n + 1`.
    pub fn from_sectors(sectors: Vec<DVector<C64>>, tail_deficit: f64) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::invalid("sectors", "at least the vacuum sector is required"));
        }
        for (n, v) in sectors.iter().enumerate() {
            if v.len() != n + 1 {
                return Err(Error::SectorShape { sector: n, len: v.len(), expected: n + 1 });
            }
        }
        Ok(Self { sectors, tail_deficit })
    }

    pub fn zeros(n_max: usize) -> Self {
        Self {
            sectors: (0..=n_max).map(|n| DVector::zeros(n + 1)).collect(),
            tail_deficit: 0.0,
        }
    }

    /// Fock state `|n_a, n_b>`.
    pub fn basis(n_max: usize, n_a: usize, n_b: usize) -> Result<Self> {
        let n = n_a + n_b;
        if n > n_max {
            return Err(Error::invalid("n_max", format!("basis state |{n_a},{n_b}> exceeds n_max = {n_max}")));
        }
        let mut s = Self::zeros(n_max);
        s.sectors[n][n_a] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Builds a state from `((n_a, n_b), amplitude)` pairs.
    pub fn from_amplitudes(n_max: usize, terms: &[((usize, usize), C64)]) -> Result<Self> {
        let mut s = Self::zeros(n_max);
        for &((a, b), amp) in terms {
            if a + b > n_max {
                return Err(Error::invalid("n_max", format!("basis state |{a},{b}> exceeds n_max = {n_max}")));
            }
            s.sectors[a + b][a] += amp;
        }
        Ok(s)
    }

    pub fn with_tail_deficit(mut self, tail_deficit: f64) -> Self {
        self.tail_deficit = tail_deficit;
        self
    }

    pub fn sector(&self, n: usize) -> &DVector<C64> {
        &self.sectors[n]
    }

    pub fn sectors(&self) -> &[DVector<C64>] {
        &self.sectors
    }

    /// Amplitude of `|n_a, n_b>`; zero beyond the truncation.
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> C64 {
        self.amplitude_at(n_a + n_b, n_a)
    }

    /// Amplitude at sector `n`, index `k`; zero outside the stored range.
    pub fn amplitude_at(&self, n: usize, k: usize) -> C64 {
        match self.sectors.get(n) {
            Some(v) if k <= n => v[k],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.iter().map(|v| v.norm_squared()).sum()
    }

    /// Probability of finding `n` photons in total.
    pub fn sector_weight(&self, n: usize) -> f64 {
        self.sectors[n].norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SectorState) -> C64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .map(|(u, v)| u.dotc(v))
            .sum()
    }

    /// Largest elementwise distance to `other` after removing the best global
    /// phase.
    pub fn distance_up_to_phase(&self, other: &SectorState) -> f64 {
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        let n = self.n_max().max(other.n_max());
        let mut worst = 0.0f64;
        for s in 0..=n {
            for k in 0..=s {
                let d = self.amplitude_at(s, k) - phase * other.amplitude_at(s, k);
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

impl TwoModeState for SectorState {
    fn n_max(&self) -> usize {
        self.sectors.len() - 1
    }

    fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    fn trace(&self) -> f64 {
        self.norm_sqr()
    }

    fn sector_populations(&self, n: usize) -> Vec<f64> {
        self.sectors[n].iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_diagonal_phase<F>(&self, phase: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let sectors = self
            .sectors
            .iter()
            .enumerate()
            .map(|(n, v)| DVector::from_iterator(n + 1, v.iter().enumerate().map(|(k, a)| a * C64::cis(phase(n, k)))))
            .collect();
        Self { sectors, tail_deficit: self.tail_deficit }
    }

    fn apply_sector_unitaries(&self, unitaries: &[Arc<DMatrix<C64>>]) -> Self {
        let sectors = par::map_range(self.sectors.len(), |n| &*unitaries[n] * &self.sectors[n]);
        Self { sectors, tail_deficit: self.tail_deficit }
    }
}

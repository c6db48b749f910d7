use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{sector_offset, total_dim, Coherences, SectorState, TwoModeState, C64};
use crate::error::{Error, Result};
use crate::linalg::{conjugate, hermitian_eigen, hermitian_part, hermiticity_defect, mul, mul_adjoint};
use crate::par;

/// Elementwise Hermiticity tolerance for stored blocks.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as numerical noise.
pub const NEGATIVITY_TOLERANCE: f64 = -1e-10;

/// Density-matrix block of one sector.
///
/// `Rank1(u)` stands for `|u><u|` with `u` unnormalized (its norm squared is
/// the sector weight). Unitaries keep rank-one blocks rank one, which is what
/// makes lossless thermal input cheap; channels produce `Dense` blocks.
#[derive(Clone, Debug, PartialEq)]
pub enum SectorBlock {
    Rank1(DVector<C64>),
    Dense(DMatrix<C64>),
}

impl SectorBlock {
    pub fn dim(&self) -> usize {
        match self {
            SectorBlock::Rank1(u) => u.len(),
            SectorBlock::Dense(m) => m.nrows(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            SectorBlock::Rank1(u) => u.norm_squared(),
            SectorBlock::Dense(m) => m.diagonal().iter().map(|z| z.re).sum(),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            SectorBlock::Rank1(u) => u.iter().map(|z| z.norm_sqr()).collect(),
            SectorBlock::Dense(m) => m.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    pub fn element(&self, k: usize, l: usize) -> C64 {
        match self {
            SectorBlock::Rank1(u) => u[k] * u[l].conj(),
            SectorBlock::Dense(m) => m[(k, l)],
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            SectorBlock::Rank1(u) => u * u.adjoint(),
            SectorBlock::Dense(m) => m.clone(),
        }
    }

    /// `Tr(block^2)`.
    pub fn purity(&self) -> f64 {
        match self {
            SectorBlock::Rank1(u) => u.norm_squared().powi(2),
            SectorBlock::Dense(m) => m.norm_squared(),
        }
    }

    fn transform(&self, u: &DMatrix<C64>) -> Self {
        match self {
            SectorBlock::Rank1(v) => SectorBlock::Rank1(u * v),
            SectorBlock::Dense(m) => SectorBlock::Dense(conjugate(u, m)),
        }
    }

    fn phase(&self, phases: &[C64]) -> Self {
        match self {
            SectorBlock::Rank1(v) => {
                SectorBlock::Rank1(DVector::from_iterator(v.len(), v.iter().zip(phases).map(|(a, p)| a * p)))
            }
            SectorBlock::Dense(m) => {
                SectorBlock::Dense(DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * phases[r] * phases[c].conj()))
            }
        }
    }
}

/// Mixed two-mode state stored as per-sector blocks.
///
/// Inter-sector coherences are kept only when present (a pure input with
/// coherences between photon numbers); sector-diagonal states carry none, and
/// the loss channel preserves that property.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDensity {
    blocks: Vec<SectorBlock>,
    coherences: Coherences,
    tail_deficit: f64,
}

impl SectorDensity {
    /// Dense sector blocks; validated for shape, Hermiticity and positivity.
    pub fn from_blocks(blocks: Vec<DMatrix<C64>>, tail_deficit: f64) -> Result<Self> {
        for (n, b) in blocks.iter().enumerate() {
            if b.nrows() != n + 1 || b.ncols() != n + 1 {
                return Err(Error::SectorShape { sector: n, len: b.nrows(), expected: n + 1 });
            }
        }
        let d = Self {
            blocks: blocks.into_iter().map(SectorBlock::Dense).collect(),
            coherences: Coherences::new(),
            tail_deficit,
        };
        d.validate()?;
        Ok(d)
    }

    /// Sector-diagonal mixture of pure sector vectors, `rho_n = |u_n><u_n|`.
    pub fn from_rank1(vectors: Vec<DVector<C64>>, tail_deficit: f64) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("sectors", "at least the vacuum sector is required"));
        }
        for (n, v) in vectors.iter().enumerate() {
            if v.len() != n + 1 {
                return Err(Error::SectorShape { sector: n, len: v.len(), expected: n + 1 });
            }
        }
        Ok(Self {
            blocks: vectors.into_iter().map(SectorBlock::Rank1).collect(),
            coherences: Coherences::new(),
            tail_deficit,
        })
    }

    /// `|psi><psi|` including the coherences between populated sectors.
    pub fn from_pure(state: &SectorState) -> Self {
        let sectors = state.sectors();
        let populated: Vec<usize> = (0..sectors.len()).filter(|&n| sectors[n].iter().any(|z| z.norm_sqr() > 0.0)).collect();
        let mut coherences = Coherences::new();
        for (i, &n) in populated.iter().enumerate() {
            for &m in &populated[..i] {
                coherences.insert((n, m), &sectors[n] * sectors[m].adjoint());
            }
        }
        Self {
            blocks: sectors.iter().cloned().map(SectorBlock::Rank1).collect(),
            coherences,
            tail_deficit: state.tail_deficit(),
        }
    }

    pub(crate) fn from_parts(blocks: Vec<SectorBlock>, coherences: Coherences, tail_deficit: f64) -> Self {
        Self { blocks, coherences, tail_deficit }
    }

    pub fn block(&self, n: usize) -> &SectorBlock {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[SectorBlock] {
        &self.blocks
    }

    pub fn block_dense(&self, n: usize) -> DMatrix<C64> {
        self.blocks[n].to_dense()
    }

    /// Coherence block `<sector n| rho |sector m>` for `n > m`, if stored.
    pub fn coherence(&self, n: usize, m: usize) -> Option<&DMatrix<C64>> {
        self.coherences.get(&(n, m))
    }

    pub(crate) fn coherences(&self) -> &Coherences {
        &self.coherences
    }

    pub fn is_sector_diagonal(&self) -> bool {
        self.coherences.is_empty()
    }

    /// Weight of sector `n`.
    pub fn sector_weight(&self, n: usize) -> f64 {
        self.blocks[n].trace()
    }

    /// Matrix element `<n, k| rho |m, l>`.
    pub fn element(&self, n: usize, k: usize, m: usize, l: usize) -> C64 {
        let zero = C64::new(0.0, 0.0);
        if n >= self.blocks.len() || m >= self.blocks.len() || k > n || l > m {
            return zero;
        }
        if n == m {
            return self.blocks[n].element(k, l);
        }
        if n > m {
            self.coherences.get(&(n, m)).map_or(zero, |c| c[(k, l)])
        } else {
            self.coherences.get(&(m, n)).map_or(zero, |c| c[(l, k)].conj())
        }
    }

    pub fn purity(&self) -> f64 {
        let diag: f64 = self.blocks.iter().map(SectorBlock::purity).sum();
        let off: f64 = self.coherences.values().map(|c| c.norm_squared()).sum();
        diag + 2.0 * off
    }

    /// Checks the Hermiticity and positivity invariants of every block.
    pub fn validate(&self) -> Result<()> {
        for (n, b) in self.blocks.iter().enumerate() {
            if let SectorBlock::Dense(m) = b {
                let defect = hermiticity_defect(m);
                if defect > HERMITICITY_TOLERANCE {
                    return Err(Error::invalid("block", format!("sector {n} deviates from Hermitian by {defect:e}")));
                }
                // Cholesky of the shifted block succeeds iff no eigenvalue lies
                // below the tolerance; the eigenvalue is only needed for the report.
                if !is_positive_definite(&hermitian_part(m), -NEGATIVITY_TOLERANCE) {
                    let (vals, _) = hermitian_eigen(&hermitian_part(m));
                    return Err(Error::NotPositive { sector: n, eigenvalue: vals[0] });
                }
            }
        }
        Ok(())
    }

    /// Symmetrizes every dense block and rejects eigenvalues below the
    /// negativity tolerance. Applied after channel maps.
    pub(crate) fn repair_hermiticity(self) -> Result<Self> {
        let blocks = par::map_slice(&self.blocks, |b| match b {
            SectorBlock::Dense(m) => SectorBlock::Dense(hermitian_part(m)),
            other => other.clone(),
        });
        let out = Self { blocks, ..self };
        out.validate()?;
        Ok(out)
    }

    /// Flattened density matrix over all sectors (dimension
    /// `(n_max + 1)(n_max + 2) / 2`), sector `n` starting at
    /// [`sector_offset`]`(n)`.
    pub fn dense_matrix(&self) -> DMatrix<C64> {
        let dim = total_dim(self.n_max());
        let mut out = DMatrix::zeros(dim, dim);
        for (n, b) in self.blocks.iter().enumerate() {
            let o = sector_offset(n);
            let d = b.to_dense();
            out.view_mut((o, o), (n + 1, n + 1)).copy_from(&d);
        }
        for (&(n, m), c) in &self.coherences {
            let (on, om) = (sector_offset(n), sector_offset(m));
            out.view_mut((on, om), (n + 1, m + 1)).copy_from(c);
            out.view_mut((om, on), (m + 1, n + 1)).copy_from(&c.adjoint());
        }
        out
    }
}

impl TwoModeState for SectorDensity {
    fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    fn tail_deficit(&self) -> f64 {
        self.tail_deficit
    }

    fn trace(&self) -> f64 {
        self.blocks.iter().map(SectorBlock::trace).sum()
    }

    fn sector_populations(&self, n: usize) -> Vec<f64> {
        self.blocks[n].diagonal()
    }

    fn apply_diagonal_phase<F>(&self, phase: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let phases: Vec<Vec<C64>> = (0..self.blocks.len()).map(|n| (0..=n).map(|k| C64::cis(phase(n, k))).collect()).collect();
        let blocks = self.blocks.iter().enumerate().map(|(n, b)| b.phase(&phases[n])).collect();
        let coherences = self
            .coherences
            .iter()
            .map(|(&(n, m), c)| {
                let c = DMatrix::from_fn(n + 1, m + 1, |r, s| c[(r, s)] * phases[n][r] * phases[m][s].conj());
                ((n, m), c)
            })
            .collect();
        Self { blocks, coherences, tail_deficit: self.tail_deficit }
    }

    fn apply_sector_unitaries(&self, unitaries: &[Arc<DMatrix<C64>>]) -> Self {
        let blocks = par::map_range(self.blocks.len(), |n| self.blocks[n].transform(&unitaries[n]));
        let coherences = self
            .coherences
            .iter()
            .map(|(&(n, m), c)| ((n, m), mul_adjoint(&mul(&unitaries[n], c), &unitaries[m])))
            .collect();
        Self { blocks, coherences, tail_deficit: self.tail_deficit }
    }
}

/// Cholesky test of `m + shift * I` (Hermitian `m`), checking every pivot
/// for a positive real part.
fn is_positive_definite(m: &DMatrix<C64>, shift: f64) -> bool {
    let n = m.nrows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re + shift;
        for p in 0..j {
            d -= l[(j, p)].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

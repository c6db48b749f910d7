use crate::error::Result;
use crate::fockspace::{mode_number_moments, sector_offset, ModeSelector, SectorBlock, SectorDensity, SectorState, State};
use crate::interferometer::{state_before_phase, CircuitSpec};
use crate::linalg::hermitian_eigen;
use crate::par;

/// Eigenvalue pairs with `lambda_k + lambda_l` at or below this are skipped.
pub const EIGENVALUE_PAIR_FLOOR: f64 = 1e-12;

/// Quantum Fisher information for the phase imprinted by `PS(phi)`.
///
/// Evaluated on the state entering the phase shifter; a unitary phase
/// encoding leaves the value independent of `phi`.
pub fn qfi(input: &State, spec: &CircuitSpec) -> Result<f64> {
    Ok(qfi_of_state(&state_before_phase(input, spec)?))
}

/// QFI of `state` for the generator `n_a`.
pub fn qfi_of_state(state: &State) -> f64 {
    match state {
        State::Pure(s) => qfi_pure(s),
        State::Mixed(d) => qfi_mixed(d),
    }
}

/// `4 Var(n_a)` of a pure state.
pub fn qfi_pure(state: &SectorState) -> f64 {
    let m = mode_number_moments(state, ModeSelector::ModeA);
    4.0 * m.variance()
}

/// `2 sum (l_k - l_m)^2 / (l_k + l_m) |<k|n_a|m>|^2` over the spectrum of `rho`.
///
/// Sector-diagonal states decompose: `n_a` conserves total photon number, so
/// pairs from different sectors never contribute and each block is handled
/// alone. A rank-one block `|u><u|` reduces to `4 (<u|n_a^2|u> - <u|n_a|u>^2 / <u|u>)`.
/// States with inter-sector coherences are diagonalized as a whole.
pub fn qfi_mixed(state: &SectorDensity) -> f64 {
    if !state.is_sector_diagonal() {
        let rho = state.dense_matrix();
        let counts: Vec<f64> = (0..=state.blocks().len() - 1)
            .flat_map(|n| (0..=n).map(|k| k as f64))
            .collect();
        debug_assert_eq!(counts.len(), sector_offset(state.blocks().len()));
        return spectral_qfi(&rho, &counts);
    }
    let parts = par::map_slice(state.blocks(), |b| match b {
        SectorBlock::Rank1(u) => {
            let w = u.norm_squared();
            if w <= EIGENVALUE_PAIR_FLOOR {
                return 0.0;
            }
            let (mut m1, mut m2) = (0.0, 0.0);
            for (k, z) in u.iter().enumerate() {
                let p = z.norm_sqr();
                m1 += p * k as f64;
                m2 += p * (k * k) as f64;
            }
            4.0 * (m2 - m1 * m1 / w)
        }
        SectorBlock::Dense(rho) => {
            let counts: Vec<f64> = (0..rho.nrows()).map(|k| k as f64).collect();
            spectral_qfi(rho, &counts)
        }
    });
    parts.into_iter().sum()
}

/// Spectral QFI formula for a generator diagonal in the basis (`counts`).
fn spectral_qfi(rho: &nalgebra::DMatrix<crate::fockspace::C64>, counts: &[f64]) -> f64 {
    let (vals, vecs) = hermitian_eigen(rho);
    let dim = vals.len();
    // g = V^dagger diag(counts) V
    let weighted = nalgebra::DMatrix::from_fn(dim, dim, |r, c| vecs[(r, c)] * counts[r]);
    let g = crate::linalg::mul(&vecs.adjoint(), &weighted);
    let mut total = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let s = vals[k] + vals[l];
            if s > EIGENVALUE_PAIR_FLOOR {
                let d = vals[k] - vals[l];
                total += d * d / s * g[(k, l)].norm_sqr();
            }
        }
    }
    2.0 * total
}

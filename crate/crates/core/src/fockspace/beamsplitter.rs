use std::f64::consts::FRAC_PI_4;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use super::{TwoModeState, C64};
use crate::linalg::symmetric_eigen;
use crate::par;

/// Matrix of `a^dagger b + a b^dagger` in sector `n`.
///
/// Tridiagonal: `a^dagger b |k, n-k> = sqrt((k+1)(n-k)) |k+1, n-k-1>`.
pub fn beamsplitter_generator(n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let v = (((k + 1) * (n - k)) as f64).sqrt();
        g[(k + 1, k)] = v;
        g[(k, k + 1)] = v;
    }
    g
}

/// 50:50 beamsplitter `exp(i pi/4 (a^dagger b + a b^dagger))` restricted to
/// sector `n`, built from the eigen-decomposition of the generator.
///
/// With this sign `|1,0> -> (|1,0> + i|0,1>)/sqrt(2)`.
fn compute_sector_matrix(n: usize) -> DMatrix<C64> {
    if n == 0 {
        return DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    }
    let (vals, vecs) = symmetric_eigen(&beamsplitter_generator(n));
    // The spectrum is exactly {n, n-2, ..., -n}; snapping removes the
    // eigensolver's rounding from the phases.
    let phases: Vec<C64> = vals.iter().map(|&l| C64::cis(FRAC_PI_4 * l.round())).collect();
    let dim = n + 1;
    let mut u = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let mut acc = C64::new(0.0, 0.0);
            for (j, p) in phases.iter().enumerate() {
                acc += p * (vecs[(r, j)] * vecs[(c, j)]);
            }
            u[(r, c)] = acc;
            // The generator is real symmetric, so U is complex symmetric.
            u[(c, r)] = acc;
        }
    }
    u
}

fn cache() -> &'static RwLock<Vec<Arc<DMatrix<C64>>>> {
    static CACHE: OnceLock<RwLock<Vec<Arc<DMatrix<C64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// Beamsplitter matrices for sectors `0..=n_max`, cached process-wide.
pub fn beamsplitter_matrices(n_max: usize) -> Vec<Arc<DMatrix<C64>>> {
    {
        let guard = cache().read().expect("beamsplitter cache poisoned");
        if guard.len() > n_max {
            return guard[..=n_max].to_vec();
        }
    }
    let have = cache().read().expect("beamsplitter cache poisoned").len();
    let fresh = par::map_range(n_max + 1 - have, |i| Arc::new(compute_sector_matrix(have + i)));
    let mut guard = cache().write().expect("beamsplitter cache poisoned");
    // Another thread may have extended the cache meanwhile.
    for (i, m) in fresh.into_iter().enumerate() {
        if guard.len() == have + i {
            guard.push(m);
        }
    }
    guard[..=n_max].to_vec()
}

/// Unitary `(n+1) x (n+1)` beamsplitter block for sector `n`.
pub fn beamsplitter_sector_matrix(n: usize) -> Arc<DMatrix<C64>> {
    beamsplitter_matrices(n)[n].clone()
}

/// Applies the 50:50 beamsplitter to every sector.
pub fn apply_beamsplitter<S: TwoModeState>(state: &S) -> S {
    let us = beamsplitter_matrices(state.n_max());
    state.apply_sector_unitaries(&us)
}

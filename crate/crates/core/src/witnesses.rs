//! Entanglement witnesses and zero-delay second-order coherence.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fockspace::{ModeSelector, State, TwoModeState};

/// Low-order moments of a two-mode state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub a: C64,
    pub b: C64,
    pub n_a: f64,
    pub n_b: f64,
    pub ad_b: C64,
    pub ab: C64,
    pub ad_bd: C64,
    pub n_a_n_b: f64,
    pub ad2_a2: f64,
    pub bd2_b2: f64,
}

/// `Tr(rho O)` where `O |m, l> = c |n, k>` is given per basis ket by `op`.
fn expectation<F>(state: &State, op: F) -> C64
where
    F: Fn(usize, usize) -> Option<(f64, usize, usize)>,
{
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..=state.n_max() {
        for l in 0..=m {
            if let Some((c, n, k)) = op(m, l) {
                if c != 0.0 {
                    acc += state.element(m, l, n, k) * c;
                }
            }
        }
    }
    acc
}

fn diagonal<F: Fn(usize, usize) -> f64>(state: &State, weight: F) -> f64 {
    (0..=state.n_max())
        .map(|n| {
            state
                .sector_populations(n)
                .iter()
                .enumerate()
                .map(|(k, p)| weight(n, k) * p)
                .sum::<f64>()
        })
        .sum()
}

pub fn compute_moments(state: &State) -> MomentSet {
    let sqrt = |x: usize| (x as f64).sqrt();
    let a = expectation(state, |m, l| (l >= 1).then(|| (sqrt(l), m - 1, l - 1)));
    let b = expectation(state, |m, l| (m > l).then(|| (sqrt(m - l), m - 1, l)));
    let ad_b = expectation(state, |m, l| (m > l).then(|| (sqrt((l + 1) * (m - l)), m, l + 1)));
    let ab = expectation(state, |m, l| (l >= 1 && m > l).then(|| (sqrt(l * (m - l)), m - 2, l - 1)));
    MomentSet {
        a,
        b,
        n_a: diagonal(state, |_, k| k as f64),
        n_b: diagonal(state, |n, k| (n - k) as f64),
        ad_b,
        ab,
        ad_bd: ab.conj(),
        n_a_n_b: diagonal(state, |n, k| (k * (n - k)) as f64),
        ad2_a2: diagonal(state, |_, k| (k * k.saturating_sub(1)) as f64),
        bd2_b2: diagonal(state, |n, k| ((n - k) * (n - k).saturating_sub(1)) as f64),
    }
}

/// `<n_a n_b> - |<a^dag b>|^2`; negative values certify entanglement.
pub fn hillery_zubairy(m: &MomentSet) -> f64 {
    m.n_a_n_b - m.ad_b.norm_sqr()
}

/// Determinant of
/// `[[1, <a>, <b^dag>], [<a^dag>, <a^dag a>, <a^dag b^dag>], [<b>, <a b>, <b^dag b>]]`,
/// the partially transposed moment matrix. It vanishes on product coherent
/// states and is non-negative on separable ones.
pub fn shchukin_vogel(m: &MomentSet) -> f64 {
    let one = C64::new(1.0, 0.0);
    let x = [
        [one, m.a, m.b.conj()],
        [m.a.conj(), C64::new(m.n_a, 0.0), m.ad_bd],
        [m.b, m.ab, C64::new(m.n_b, 0.0)],
    ];
    let det = x[0][0] * (x[1][1] * x[2][2] - x[1][2] * x[2][1])
        - x[0][1] * (x[1][0] * x[2][2] - x[1][2] * x[2][0])
        + x[0][2] * (x[1][0] * x[2][1] - x[1][1] * x[2][0]);
    det.re
}

/// `<a^dag^2 a^2> / <a^dag a>^2` for the chosen mode.
pub fn g2_zero(state: &State, mode: ModeSelector) -> Result<f64> {
    let n = diagonal(state, |n, k| mode.count(n, k) as f64);
    if n <= 1e-12 {
        return Err(Error::UndefinedG2 { mean: n });
    }
    let f = diagonal(state, |n, k| {
        let c = mode.count(n, k);
        (c * c.saturating_sub(1)) as f64
    });
    Ok(f / (n * n))
}

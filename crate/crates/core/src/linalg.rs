//! Small dense kernels shared by the state and metrology code.

use nalgebra::{DMatrix, DVector};

use crate::fockspace::C64;

fn to_faer(m: &DMatrix<C64>) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns. Only the lower triangle is
/// read.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    if m.nrows() == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = to_faer(m).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver converged");
    let s = eig.S().column_vector();
    let values = DVector::from_fn(m.nrows(), |i, _| s[i].re);
    (values, from_faer(eig.U()))
}

/// `u * m * u^dagger` for square complex matrices.
pub fn conjugate(u: &DMatrix<C64>, m: &DMatrix<C64>) -> DMatrix<C64> {
    let (uf, mf) = (to_faer(u), to_faer(m));
    let out = &uf * &mf * uf.adjoint();
    from_faer(out.as_ref())
}

/// `a * b^dagger` for complex matrices.
pub fn mul_adjoint(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let out = to_faer(a) * to_faer(b).adjoint();
    from_faer(out.as_ref())
}

/// `a * b` for complex matrices.
pub fn mul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let out = to_faer(a) * to_faer(b);
    from_faer(out.as_ref())
}

/// Eigen-decomposition of a real symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// `ln(k!)` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Binomial table `table[m][j] = C(m, j) p^j (1 - p)^(m - j)` for `m <= n`.
///
/// Computed in log space so that large `m` neither overflows nor underflows
/// prematurely. `p = 0` and `p = 1` are handled exactly.
pub fn binomial_table(n: usize, p: f64) -> Vec<Vec<f64>> {
    let lnf = ln_factorials(n);
    (0..=n)
        .map(|m| {
            (0..=m)
                .map(|j| {
                    if p <= 0.0 {
                        if j == 0 { 1.0 } else { 0.0 }
                    } else if p >= 1.0 {
                        if j == m { 1.0 } else { 0.0 }
                    } else {
                        let ln = lnf[m] - lnf[j] - lnf[m - j]
                            + j as f64 * p.ln()
                            + (m - j) as f64 * (-p).ln_1p();
                        ln.exp()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows_sum_to_one() {
        for &p in &[0.0, 0.05, 0.5, 0.95, 1.0] {
            for row in binomial_table(60, p) {
                let s: f64 = row.iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "p={p} sum={s}");
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        let t = binomial_table(3, 0.25);
        assert!((t[1][1] - 0.25).abs() < 1e-15);
        assert!((t[2][1] - 2.0 * 0.25 * 0.75).abs() < 1e-15);
        assert!((t[3][0] - 0.75f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&vals.map(|v| C64::new(v, 0.0)));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - m).norm() < 1e-12);
    }
}

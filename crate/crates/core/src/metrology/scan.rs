/// Parabolic refinement of the extremum at grid index `i`.
///
/// Fits a parabola through `i - 1, i, i + 1` and returns its vertex when it
/// lies inside the bracket and improves on the grid value in the requested
/// direction; otherwise the grid point itself.
pub fn refine_extremum(xs: &[f64], ys: &[f64], i: usize, minimize: bool) -> (f64, f64) {
    let grid = (ys[i], xs[i]);
    if i == 0 || i + 1 >= xs.len() {
        return grid;
    }
    let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    if !(y0.is_finite() && y2.is_finite()) {
        return grid;
    }
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den.abs() < f64::EPSILON * (y0.abs() + y1.abs() + y2.abs()).max(f64::MIN_POSITIVE) {
        return grid;
    }
    let x = x1 - 0.5 * num / den;
    if !(x > x0 && x < x2) {
        return grid;
    }
    // Lagrange form of the same parabola.
    let y = y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    let better = if minimize { y <= y1 } else { y >= y1 };
    if better && y.is_finite() { (y, x) } else { grid }
}

fn best_index(ys: &[f64], minimize: bool) -> Option<usize> {
    ys.iter()
        .enumerate()
        .filter(|(_, y)| y.is_finite())
        .fold(None, |best: Option<(usize, f64)>, (i, &y)| match best {
            Some((_, b)) if (minimize && y >= b) || (!minimize && y <= b) => best,
            _ => Some((i, y)),
        })
        .map(|(i, _)| i)
}

/// Smallest phase error on a grid, refined locally: `(min, argmin phi)`.
/// `None` when no point is finite.
pub fn min_phase_error_scan(phis: &[f64], errors: &[f64]) -> Option<(f64, f64)> {
    best_index(errors, true).map(|i| refine_extremum(phis, errors, i, true))
}

/// Largest value on a grid without refinement: `(max, argmax phi)`.
pub fn max_scan(phis: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    best_index(values, false).map(|i| (values[i], phis[i]))
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`; returns
/// `(max, argmax)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 { (f1, x1) } else { (f2, x2) }
}

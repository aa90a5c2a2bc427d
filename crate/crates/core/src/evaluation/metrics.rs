use crate::error::{Error, Result};
use crate::linalg::{fro, CMat, ZERO};

/// ‖Ŷ − Y‖_F / ‖Y‖_F.
pub fn relative_frobenius_error(y_hat: &CMat, y_true: &CMat) -> Result<f64> {
    if y_hat.shape() != y_true.shape() {
        return Err(Error::Dimension(format!(
            "estimate is {:?}, truth is {:?}",
            y_hat.shape(),
            y_true.shape()
        )));
    }
    let denom = fro(y_true);
    if denom == 0.0 {
        return Err(Error::ZeroMatrix("reference admittance matrix"));
    }
    Ok(fro(&(y_hat - y_true)) / denom)
}

/// Copy of `a` with its diagonal set to zero.
pub fn ndiag(a: &CMat) -> CMat {
    let mut out = a.clone();
    out.fill_diagonal(ZERO);
    out
}

/// Relative off-diagonal mass of `a` in the basis `w`:
/// ‖ndiag(WᴴAW)‖_F / ‖WᴴAW‖_F. Zero iff `w` diagonalizes `a`.
pub fn dist_w(a: &CMat, w: &CMat) -> Result<f64> {
    if !a.is_square() || w.nrows() != a.nrows() || w.ncols() != a.nrows() {
        return Err(Error::Dimension(format!("matrix {:?} against basis {:?}", a.shape(), w.shape())));
    }
    let t = w.adjoint() * a * w;
    let total = fro(&t);
    if total == 0.0 {
        return Err(Error::ZeroMatrix("matrix passed to dist_W"));
    }
    Ok(fro(&ndiag(&t)) / total)
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = 0.5 * (start + end - 1) as f64;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// input is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    if x.len() != y.len() || x.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let m = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / m, ry.iter().sum::<f64>() / m);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Sample mean and (population) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    (mean, var.sqrt())
}

//! Dense complex linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// ‖AAᴴ − AᴴA‖_F / ‖A‖²_F, zero for the zero matrix.
pub fn normality_residual(a: &CMat) -> f64 {
    let scale = fro(a).powi(2);
    if scale == 0.0 {
        return 0.0;
    }
    let ah = a.adjoint();
    fro(&(a * &ah - &ah * a)) / scale
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
/// order. The input is symmetrized first so round-off asymmetry is ignored.
pub fn hermitian_eigen_desc(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Rotates each column so that its largest-modulus entry is real positive.
/// Ties within a relative 1e-9 go to the lowest row index.
pub fn normalize_phases(w: &mut CMat) {
    for mut col in w.column_iter_mut() {
        let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .position(|z| z.norm() >= max * (1.0 - 1e-9))
            .expect("nonempty column");
        let p = col[pivot];
        let rot = p.conj() / p.norm();
        for z in col.iter_mut() {
            *z *= rot;
        }
        col[pivot] = Complex64::new(col[pivot].re, 0.0);
    }
}

/// Complex product `P Q` through a single real product of the stacked
/// blocks `[Re P, −Im P; Im P, Re P] [Re Q; Im Q]`, which runs on the
/// optimized real kernel.
pub fn matmul(p: &CMat, q: &CMat) -> CMat {
    let (m, k) = p.shape();
    assert_eq!(k, q.nrows(), "matmul: inner dimensions differ");
    let cols = q.ncols();
    let mut big = DMatrix::<f64>::zeros(2 * m, 2 * k);
    for j in 0..k {
        for i in 0..m {
            let z = p[(i, j)];
            big[(i, j)] = z.re;
            big[(i, j + k)] = -z.im;
            big[(i + m, j)] = z.im;
            big[(i + m, j + k)] = z.re;
        }
    }
    let mut stacked = DMatrix::<f64>::zeros(2 * k, cols);
    for j in 0..cols {
        for i in 0..k {
            let z = q[(i, j)];
            stacked[(i, j)] = z.re;
            stacked[(i + k, j)] = z.im;
        }
    }
    let out = big * stacked;
    CMat::from_fn(m, cols, |i, j| Complex64::new(out[(i, j)], out[(i + m, j)]))
}

/// `X Yᴴ`.
pub fn cross_product(x: &CMat, y: &CMat) -> CMat {
    matmul(x, &y.adjoint())
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(a: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Least-squares solution of `A X ≈ B` for tall `A` via Householder QR.
///
/// Fails with the numerical rank when `A` does not have full column rank at
/// relative tolerance `rank_tol`.
pub fn lstsq_qr(a: &CMat, b: &CMat, what: &'static str, rank_tol: f64) -> Result<CMat> {
    let (m, n) = a.shape();
    if b.nrows() != m {
        return Err(Error::Dimension(format!(
            "{what}: {m} rows against right-hand side with {} rows",
            b.nrows()
        )));
    }
    if m < n {
        return Err(Error::RankDeficient {
            what,
            rank: m,
            required: n,
            hint: String::new(),
        });
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let rank = numerical_rank(&r, rank_tol);
    if rank < n {
        return Err(Error::RankDeficient {
            what,
            rank,
            required: n,
            hint: String::new(),
        });
    }
    let mut qtb = b.clone();
    qr.q_tr_mul(&mut qtb);
    let top = qtb.rows(0, n).into_owned();
    r.solve_upper_triangular(&top)
        .ok_or(Error::RankDeficient {
            what,
            rank,
            required: n,
            hint: String::new(),
        })
}

/// Mean of each row.
pub fn row_means(x: &CMat) -> CVec {
    let n = x.ncols() as f64;
    CVec::from_iterator(
        x.nrows(),
        x.row_iter().map(|r| r.iter().sum::<Complex64>() / n),
    )
}

/// Subtracts the row mean from every entry of the row.
pub fn center_rows(x: &CMat) -> CMat {
    let mu = row_means(x);
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        col -= &mu;
    }
    out
}

pub fn ones(n: usize) -> CVec {
    CVec::from_element(n, ONE)
}

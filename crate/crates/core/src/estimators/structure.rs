//! Duplication/elimination maps and the projection onto symmetric
//! zero-row-sum matrices.
//!
//! `vec` stacks columns. `vech` stacks the lower triangle column by column,
//! diagonal included; `vech_rs` does the same without the diagonal.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use super::ols::ols_estimate;
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, ZERO};
use crate::scenario::PhasorDataset;

fn vech_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i >= j);
    j * n - j * j.saturating_sub(1) / 2 + (i - j)
}

fn vech_rs_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i > j);
    j * (n - 1) - j * j.saturating_sub(1) / 2 + (i - j - 1)
}

pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn vech(m: &CMat) -> CVec {
    let n = m.nrows();
    CVec::from_iterator(n * (n + 1) / 2, (0..n).flat_map(|j| (j..n).map(move |i| (i, j))).map(|(i, j)| m[(i, j)]))
}

pub fn vech_rs(m: &CMat) -> CVec {
    let n = m.nrows();
    CVec::from_iterator(
        n * n.saturating_sub(1) / 2,
        (0..n).flat_map(|j| (j + 1..n).map(move |i| (i, j))).map(|(i, j)| m[(i, j)]),
    )
}

/// Structural maps for `n`-bus admittance matrices. `D` and `R` are generated
/// on demand; the postfilter `P = (D R)†` is applied through a factorization
/// of its normal matrix.
#[derive(Debug, Clone)]
pub struct StructureMaps {
    n: usize,
    // Cholesky factor of the n×n capacitance matrix 2I + B Bᵀ, where B is the
    // bus/pair incidence. (DR)ᵀ(DR) = 2I + BᵀB and Woodbury reduces its
    // inverse to this factor.
    capacitance: Cholesky<Complex64, Dyn>,
}

pub fn build_structure_maps(n: usize) -> Result<StructureMaps> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("structure maps need n ≥ 2, got {n}")));
    }
    let cap = CMat::from_fn(n, n, |i, j| {
        let bbt = if i == j { (n - 1) as f64 } else { 1.0 };
        let two = if i == j { 2.0 } else { 0.0 };
        Complex64::new(bbt + two, 0.0)
    });
    let capacitance = cap
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("capacitance matrix not positive definite".into()))?;
    Ok(StructureMaps { n, capacitance })
}

impl StructureMaps {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `n(n+1)/2`.
    pub fn n_d(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// `n(n−1)/2`.
    pub fn n_r(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Duplication matrix, `vec(S) = D vech(S)` for symmetric `S`.
    pub fn d_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut d = DMatrix::zeros(n * n, self.n_d());
        for j in 0..n {
            for i in j..n {
                let k = vech_index(i, j, n);
                d[(i + j * n, k)] = 1.0;
                d[(j + i * n, k)] = 1.0;
            }
        }
        d
    }

    /// Diagonal elimination, `vech(Y) = R vech_rs(Y)` for symmetric
    /// zero-row-sum `Y`.
    pub fn r_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut r = DMatrix::zeros(self.n_d(), self.n_r());
        for j in 0..n {
            for i in j + 1..n {
                let p = vech_rs_index(i, j, n);
                r[(vech_index(i, j, n), p)] = 1.0;
                r[(vech_index(i, i, n), p)] = -1.0;
                r[(vech_index(j, j, n), p)] = -1.0;
            }
        }
        r
    }

    /// Applies `P = (D R)†` to `vec(Ȳ)` given as a matrix.
    pub fn apply_p(&self, ybar: &CMat) -> CVec {
        let n = self.n;
        // x = (DR)ᵀ vec(Ȳ)
        let mut x = CVec::zeros(self.n_r());
        let mut bx = CVec::zeros(n);
        for j in 0..n {
            for i in j + 1..n {
                let p = vech_rs_index(i, j, n);
                let v = ybar[(i, j)] + ybar[(j, i)] - ybar[(i, i)] - ybar[(j, j)];
                x[p] = v;
                bx[i] += v;
                bx[j] += v;
            }
        }
        let s = self.capacitance.solve(&bx);
        for j in 0..n {
            for i in j + 1..n {
                let p = vech_rs_index(i, j, n);
                x[p] = (x[p] - s[i] - s[j]) * 0.5;
            }
        }
        x
    }

    /// Dense `P` (`n_r × n²`), materialized column by column.
    pub fn p_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut p = DMatrix::zeros(self.n_r(), n * n);
        let mut e = CMat::zeros(n, n);
        for col in 0..n * n {
            e[col] = Complex64::new(1.0, 0.0);
            let r = self.apply_p(&e);
            e[col] = ZERO;
            for (k, v) in r.iter().enumerate() {
                p[(k, col)] = v.re;
            }
        }
        p
    }

    /// Symmetric zero-row-sum matrix with the given off-diagonal entries.
    pub fn assemble(&self, off_diagonal: &CVec) -> CMat {
        let n = self.n;
        let mut y = CMat::zeros(n, n);
        for j in 0..n {
            for i in j + 1..n {
                let v = off_diagonal[vech_rs_index(i, j, n)];
                y[(i, j)] = v;
                y[(j, i)] = v;
                y[(i, i)] -= v;
                y[(j, j)] -= v;
            }
        }
        y
    }
}

/// Closest symmetric zero-row-sum matrix to `ybar` in Frobenius norm.
pub fn postfilter(ybar: &CMat, maps: &StructureMaps) -> Result<CMat> {
    if ybar.nrows() != maps.n() || ybar.ncols() != maps.n() {
        return Err(Error::Dimension(format!(
            "{}x{} estimate for {}-bus structure maps",
            ybar.nrows(),
            ybar.ncols(),
            maps.n()
        )));
    }
    Ok(maps.assemble(&maps.apply_p(ybar)))
}

/// Laplacian-constrained least squares, computed as the postfilter applied to
/// the unconstrained solution.
pub fn constrained_ls(ds: &PhasorDataset, maps: &StructureMaps) -> Result<CMat> {
    postfilter(&ols_estimate(ds)?, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro;
    use crate::scenario::standard_circular_matrix;

    fn random_symmetric(n: usize, seed: u64) -> CMat {
        let a = standard_circular_matrix(n, n, seed);
        &a + a.transpose()
    }

    fn random_laplacian(n: usize, seed: u64) -> CMat {
        let a = random_symmetric(n, seed);
        let mut y = a.clone();
        for i in 0..n {
            y[(i, i)] = ZERO;
            let s: Complex64 = y.row(i).iter().sum();
            y[(i, i)] = -s;
        }
        y
    }

    #[test]
    fn sizes() {
        let m = build_structure_maps(4).unwrap();
        assert_eq!((m.n_d(), m.n_r()), (10, 6));
        assert_eq!(m.d_matrix().shape(), (16, 10));
        assert_eq!(m.r_matrix().shape(), (10, 6));
        assert!(build_structure_maps(1).is_err());
    }

    #[test]
    fn duplication_is_exact() {
        for n in 2..6 {
            let m = build_structure_maps(n).unwrap();
            let s = random_symmetric(n, n as u64);
            let d = m.d_matrix().map(|v| Complex64::new(v, 0.0));
            assert_eq!(d * vech(&s), vec_of(&s));
        }
    }

    #[test]
    fn elimination_and_left_inverse() {
        for n in 2..6 {
            let m = build_structure_maps(n).unwrap();
            let y = random_laplacian(n, 10 + n as u64);
            let r = m.r_matrix().map(|v| Complex64::new(v, 0.0));
            assert!((r * vech_rs(&y) - vech(&y)).norm() < 1e-12);
            let p = m.p_matrix().map(|v| Complex64::new(v, 0.0));
            assert!((p * vec_of(&y) - vech_rs(&y)).norm() < 1e-12 * vec_of(&y).norm());
        }
    }

    #[test]
    fn postfilter_fixed_point_and_idempotence() {
        let m = build_structure_maps(5).unwrap();
        let y = random_laplacian(5, 3);
        assert!(fro(&(postfilter(&y, &m).unwrap() - &y)) < 1e-12 * fro(&y));
        let a = standard_circular_matrix(5, 5, 4);
        let once = postfilter(&a, &m).unwrap();
        let twice = postfilter(&once, &m).unwrap();
        assert!(fro(&(twice - &once)) < 1e-12 * fro(&once));
        assert!(postfilter(&CMat::zeros(4, 4), &m).is_err());
    }
}

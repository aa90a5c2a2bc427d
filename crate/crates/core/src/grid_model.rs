//! Network descriptions, admittance matrices and their spectral structure.
//!
//! Buses are indexed from 0 in the API and from 1 in the network file format.
//! Series admittances follow the convention `Re(y) > 0`, `Im(y) ≤ 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, fro, CMat, CVec, ZERO};

/// Relative tolerance on the commutator for a matrix to count as normal.
pub const NORMALITY_TOL: f64 = 1e-8;
/// Default relative threshold below which eigenvalues are treated as zero.
pub const DEFAULT_RANK_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub admittance: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shunt {
    pub bus: usize,
    pub admittance: Complex64,
}

/// Bus/branch/shunt description of a single-phase network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    n: usize,
    branches: Vec<Branch>,
    shunts: Vec<Shunt>,
}

impl NetworkSpec {
    /// Validates indices, duplicates, the series sign convention and
    /// connectivity.
    pub fn new(n: usize, branches: Vec<Branch>, shunts: Vec<Shunt>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("network has no buses".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &branches {
            if b.from >= n || b.to >= n {
                return Err(Error::InvalidNetwork(format!(
                    "branch ({},{}) references a bus outside 1..={n}",
                    b.from + 1,
                    b.to + 1
                )));
            }
            if b.from == b.to {
                return Err(Error::InvalidNetwork(format!(
                    "self-loop at bus {}",
                    b.from + 1
                )));
            }
            if !(b.admittance.re > 0.0 && b.admittance.im <= 0.0) || !b.admittance.is_finite() {
                return Err(Error::SignConvention {
                    from: b.from + 1,
                    to: b.to + 1,
                    y: b.admittance,
                });
            }
            let key = (b.from.min(b.to), b.from.max(b.to));
            if !seen.insert(key) {
                return Err(Error::DuplicateBranch(key.0 + 1, key.1 + 1));
            }
        }
        for s in &shunts {
            if s.bus >= n {
                return Err(Error::InvalidNetwork(format!(
                    "shunt references bus {} outside 1..={n}",
                    s.bus + 1
                )));
            }
            if !s.admittance.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "non-finite shunt at bus {}",
                    s.bus + 1
                )));
            }
        }
        let components = count_components(n, &branches);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(Self {
            n,
            branches,
            shunts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn shunts(&self) -> &[Shunt] {
        &self.shunts
    }

    pub fn has_shunts(&self) -> bool {
        self.shunts.iter().any(|s| s.admittance != ZERO)
    }

    /// Shunts whose conductance or susceptance is negative. These are
    /// accepted but worth reporting.
    pub fn shunt_sign_warnings(&self) -> Vec<String> {
        self.shunts
            .iter()
            .filter(|s| s.admittance.re < 0.0 || s.admittance.im < 0.0)
            .map(|s| {
                format!(
                    "shunt at bus {} has y = {} (expected g ≥ 0, b ≥ 0)",
                    s.bus + 1,
                    s.admittance
                )
            })
            .collect()
    }

    /// Copy without shunt elements.
    pub fn without_shunts(&self) -> Self {
        Self {
            n: self.n,
            branches: self.branches.clone(),
            shunts: Vec::new(),
        }
    }

    /// Per-bus total shunt admittance.
    pub fn shunt_vector(&self) -> CVec {
        let mut v = CVec::zeros(self.n);
        for s in &self.shunts {
            v[s.bus] += s.admittance;
        }
        v
    }
}

fn count_components(n: usize, branches: &[Branch]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for b in branches {
        let (ra, rb) = (find(&mut parent, b.from), find(&mut parent, b.to));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components
}

/// Dense symmetric admittance matrix with structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceMatrix {
    matrix: CMat,
    pub is_symmetric: bool,
    pub has_shunts: bool,
    pub is_normal: bool,
}

impl AdmittanceMatrix {
    /// Wraps an arbitrary square matrix, deriving the flags numerically.
    /// Row sums below 1e-12·‖Y‖_F count as zero.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "admittance matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = fro(&matrix);
        let is_symmetric = fro(&(&matrix - matrix.transpose())) <= 1e-12 * scale;
        let rows = row_sums(&matrix);
        let has_shunts = rows.iter().any(|z| z.norm() > 1e-12 * scale);
        let is_normal = linalg::normality_residual(&matrix) <= NORMALITY_TOL;
        Ok(Self {
            matrix,
            is_symmetric,
            has_shunts,
            is_normal,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn row_sums(&self) -> CVec {
        row_sums(&self.matrix)
    }

    pub fn normality_residual(&self) -> f64 {
        linalg::normality_residual(&self.matrix)
    }

    /// Whether Y has a (numerically) trivial nullspace.
    pub fn is_singular(&self) -> bool {
        let s = linalg::singular_values(&self.matrix);
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) => hi == 0.0 || lo <= 1e-12 * hi,
            _ => true,
        }
    }
}

fn row_sums(m: &CMat) -> CVec {
    CVec::from_iterator(m.nrows(), m.row_iter().map(|r| r.iter().sum()))
}

/// Assembles `Y` with `Y_ij = −y_ij` on branches and
/// `Y_ii = Σ_j y_ij + y_i0`.
pub fn build_admittance(spec: &NetworkSpec) -> AdmittanceMatrix {
    let n = spec.n();
    let mut y = CMat::zeros(n, n);
    for b in spec.branches() {
        let (i, j, a) = (b.from, b.to, b.admittance);
        y[(i, j)] -= a;
        y[(j, i)] -= a;
        y[(i, i)] += a;
        y[(j, j)] += a;
    }
    for s in spec.shunts() {
        y[(s.bus, s.bus)] += s.admittance;
    }
    AdmittanceMatrix {
        is_symmetric: true,
        has_shunts: spec.has_shunts(),
        is_normal: linalg::normality_residual(&y) <= NORMALITY_TOL,
        matrix: y,
    }
}

/// Eliminates every bus not in `keep` through the Schur complement
/// `Y_AA − Y_AB Y_BB⁻¹ Y_BA`. Kept buses retain their relative order.
pub fn kron_reduce(y: &AdmittanceMatrix, keep: &[usize]) -> Result<AdmittanceMatrix> {
    let n = y.n();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::InvalidParameter("Kron reduction needs at least one kept bus".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidParameter(format!(
            "kept bus {} outside 1..={n}",
            bad + 1
        )));
    }
    let elim: Vec<usize> = (0..n).filter(|i| kept.binary_search(i).is_err()).collect();
    if elim.is_empty() {
        return Ok(y.clone());
    }
    let m = y.matrix();
    let pick = |rows: &[usize], cols: &[usize]| {
        CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    };
    let y_aa = pick(&kept, &kept);
    let y_ab = pick(&kept, &elim);
    let y_ba = pick(&elim, &kept);
    let y_bb = pick(&elim, &elim);

    let s = linalg::singular_values(&y_bb);
    let kappa = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    };
    if kappa.is_nan() || kappa >= 1e13 {
        return Err(Error::SingularBlock { kappa });
    }
    let x = y_bb
        .lu()
        .solve(&y_ba)
        .ok_or(Error::SingularBlock { kappa })?;
    let reduced = y_aa - y_ab * x;
    // Symmetrize away round-off so the symmetric flag is exact.
    let reduced = (&reduced + reduced.transpose()).scale(0.5);
    AdmittanceMatrix::from_matrix(reduced)
}

/// Unitary eigenvector matrix and eigenvalues of a normal admittance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub w: CMat,
    /// Eigenvalues paired with the columns of `w`. Empty when only the
    /// eigenvectors are known.
    pub lambda: CVec,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    /// `W diag(λ) Wᴴ`.
    pub fn reconstruct(&self) -> CMat {
        reconstruct(&self.w, &self.lambda)
    }

    /// ‖WᴴW − I‖_F.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.w.ncols();
        fro(&(self.w.adjoint() * &self.w - CMat::identity(n, n)))
    }
}

/// `W diag(d) Wᴴ`.
pub fn reconstruct(w: &CMat, d: &CVec) -> CMat {
    let mut wd = w.clone();
    for (k, mut col) in wd.column_iter_mut().enumerate() {
        col *= d[k];
    }
    wd * w.adjoint()
}

// Weights for the Hermitian combination H = Re(M) + t·Im(M) used at each
// refinement level. Level 0 separates generic spectra in one pass; levels 1
// and 2 split clusters by the real and then the imaginary parts.
const SPLIT_WEIGHTS: [(f64, f64); 3] = [(1.0, 0.723_606_797_749_979), (1.0, 0.0), (0.0, 1.0)];

/// Unitary diagonalization of a normal matrix.
///
/// Eigenpairs are ordered by ascending `|λ|` and each eigenvector is rotated
/// so its largest-modulus entry is real positive.
pub fn spectral_decompose(y: &AdmittanceMatrix) -> Result<SpectralBasis> {
    let m = y.matrix();
    let residual = y.normality_residual();
    if residual > NORMALITY_TOL {
        return Err(Error::NotNormal { residual });
    }
    let n = y.n();
    let scale = fro(m);
    let mut w = refine(m, CMat::identity(n, n), 0, scale);
    let lambda_raw: Vec<Complex64> = (0..n)
        .map(|k| {
            let col = w.column(k);
            (col.adjoint() * m * col)[(0, 0)]
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambda_raw[a].norm().total_cmp(&lambda_raw[b].norm()));
    let sorted = CMat::from_fn(n, n, |i, k| w[(i, order[k])]);
    w = sorted;
    linalg::normalize_phases(&mut w);
    let lambda = CVec::from_iterator(n, order.iter().map(|&k| lambda_raw[k]));
    Ok(SpectralBasis { w, lambda })
}

fn refine(y: &CMat, basis: CMat, level: usize, scale: f64) -> CMat {
    let restricted = basis.adjoint() * y * &basis;
    let re = (&restricted + restricted.adjoint()).scale(0.5);
    let im = (&restricted - restricted.adjoint()) * Complex64::new(0.0, -0.5);
    let (a, b) = SPLIT_WEIGHTS[level];
    let h = re.scale(a) + im.scale(b);
    let (vals, vecs) = linalg::hermitian_eigen_desc(&h);
    let mut out = basis * vecs;
    if level + 1 == SPLIT_WEIGHTS.len() {
        return out;
    }
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len() && (vals[end - 1] - vals[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            let sub = out.columns(start, end - start).into_owned();
            let refined = refine(y, sub, level + 1, scale);
            out.columns_mut(start, end - start).copy_from(&refined);
        }
        start = end;
    }
    out
}

/// `W Λ† Wᴴ` where eigenvalues with `|λ| ≤ eps_rank · max|λ|` are zeroed.
pub fn pseudoinverse_from_spectrum(basis: &SpectralBasis, eps_rank: f64) -> CMat {
    let max = basis.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let inv = basis.lambda.map(|l| {
        if l.norm() > eps_rank * max && l.norm() > 0.0 {
            1.0 / l
        } else {
            ZERO
        }
    });
    reconstruct(&basis.w, &inv)
}

/// Per-branch departure from a common conductance-susceptance ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct XrDeviation {
    pub from: usize,
    pub to: usize,
    /// `g/b`, or `None` when `b = 0`.
    pub ratio: Option<f64>,
    /// Relative deviation from the reference ratio (`None` when undefined).
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum XrCheck {
    Constant { ratio: f64 },
    Varying { reference: Option<f64>, offending: Vec<XrDeviation> },
}

impl XrCheck {
    pub fn is_constant(&self) -> bool {
        matches!(self, XrCheck::Constant { .. })
    }
}

/// Checks whether every branch shares one `g/b` ratio to relative 1e-9.
/// The reference is the median of the defined ratios.
pub fn check_constant_xr(spec: &NetworkSpec) -> XrCheck {
    const TOL: f64 = 1e-9;
    let ratios: Vec<Option<f64>> = spec
        .branches()
        .iter()
        .map(|b| (b.admittance.im != 0.0).then(|| b.admittance.re / b.admittance.im))
        .collect();
    let mut defined: Vec<f64> = ratios.iter().flatten().copied().collect();
    defined.sort_by(f64::total_cmp);
    let reference = (!defined.is_empty()).then(|| defined[defined.len() / 2]);

    let offending: Vec<XrDeviation> = spec
        .branches()
        .iter()
        .zip(&ratios)
        .filter_map(|(b, r)| {
            let deviation = match (r, reference) {
                (Some(r), Some(refr)) => Some((r - refr) / refr.abs()),
                _ => None,
            };
            let bad = deviation.is_none_or(|d| d.abs() > TOL);
            bad.then_some(XrDeviation {
                from: b.from,
                to: b.to,
                ratio: *r,
                deviation,
            })
        })
        .collect();
    match (offending.is_empty(), reference) {
        (true, Some(ratio)) => XrCheck::Constant { ratio },
        _ => XrCheck::Varying {
            reference,
            offending,
        },
    }
}

/// Replaces every branch impedance `r + jx` by `r + jr`, giving a common
/// `g/b` ratio of −1.
pub fn make_constant_xr(spec: &NetworkSpec) -> NetworkSpec {
    let branches = spec
        .branches()
        .iter()
        .map(|b| {
            let r = (1.0 / b.admittance).re;
            Branch {
                admittance: 1.0 / Complex64::new(r, r),
                ..*b
            }
        })
        .collect();
    NetworkSpec {
        n: spec.n,
        branches,
        shunts: spec.shunts.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn two_bus(y: Complex64) -> NetworkSpec {
        NetworkSpec::new(
            2,
            vec![Branch {
                from: 0,
                to: 1,
                admittance: y,
            }],
            vec![],
        )
        .unwrap()
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        fro(&(a - b)) <= tol
    }

    #[test]
    fn two_bus_matrix() {
        let y = build_admittance(&two_bus(c(1.0, -1.0)));
        let expect = CMat::from_row_slice(2, 2, &[c(1., -1.), c(-1., 1.), c(-1., 1.), c(1., -1.)]);
        assert_eq!(y.matrix(), &expect);
        assert!(!y.has_shunts);
        assert!(y.is_normal);
    }

    #[test]
    fn shunt_only_touches_its_diagonal() {
        let spec = NetworkSpec::new(
            2,
            vec![Branch { from: 0, to: 1, admittance: c(1.0, -1.0) }],
            vec![Shunt { bus: 0, admittance: c(0.0, 0.1) }],
        )
        .unwrap();
        let y = build_admittance(&spec);
        assert!((y.matrix()[(0, 0)] - c(1.0, -0.9)).norm() < 1e-15);
        assert_eq!(y.matrix()[(0, 1)], c(-1.0, 1.0));
        assert_eq!(y.matrix()[(1, 1)], c(1.0, -1.0));
        assert!(y.has_shunts);
        assert!(spec.shunt_sign_warnings().is_empty());
    }

    #[test]
    fn rejects_invalid_specs() {
        let b = |f, t, y| Branch { from: f, to: t, admittance: y };
        let y = c(1.0, -1.0);
        assert!(matches!(
            NetworkSpec::new(3, vec![b(0, 1, y)], vec![]),
            Err(Error::Disconnected { components: 2 })
        ));
        assert!(matches!(
            NetworkSpec::new(2, vec![b(0, 1, y), b(1, 0, y)], vec![]),
            Err(Error::DuplicateBranch(1, 2))
        ));
        assert!(matches!(
            NetworkSpec::new(2, vec![b(0, 1, c(1.0, 0.5))], vec![]),
            Err(Error::SignConvention { .. })
        ));
        assert!(matches!(
            NetworkSpec::new(2, vec![b(0, 1, c(-1.0, -0.5))], vec![]),
            Err(Error::SignConvention { .. })
        ));
        assert!(NetworkSpec::new(2, vec![b(0, 0, y)], vec![]).is_err());
        assert!(NetworkSpec::new(2, vec![b(0, 2, y)], vec![]).is_err());
    }

    #[test]
    fn negative_shunt_warns_but_loads() {
        let spec = NetworkSpec::new(
            2,
            vec![Branch { from: 0, to: 1, admittance: c(1.0, -1.0) }],
            vec![Shunt { bus: 1, admittance: c(0.0, -0.2) }],
        )
        .unwrap();
        assert_eq!(spec.shunt_sign_warnings().len(), 1);
    }

    #[test]
    fn kron_series_rule() {
        let spec = NetworkSpec::new(
            3,
            vec![
                Branch { from: 0, to: 1, admittance: c(2.0, 0.0) },
                Branch { from: 1, to: 2, admittance: c(2.0, 0.0) },
            ],
            vec![Shunt { bus: 0, admittance: c(0.0, 0.01) }],
        )
        .unwrap();
        let y = build_admittance(&spec);
        let r = kron_reduce(&y, &[0, 2]).unwrap();
        assert!((r.matrix()[(0, 1)] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r.matrix()[(1, 1)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r.matrix()[(0, 0)] - c(1.0, 0.01)).norm() < 1e-14);
        assert!(r.is_symmetric);
    }

    #[test]
    fn kron_keep_all_is_identity() {
        let y = build_admittance(&two_bus(c(1.0, -1.0)));
        assert_eq!(kron_reduce(&y, &[1, 0]).unwrap(), y);
        assert!(kron_reduce(&y, &[]).is_err());
    }

    #[test]
    fn kron_singular_block() {
        // Eliminating both buses of a shunt-free pair is eliminating a
        // singular block.
        let spec = NetworkSpec::new(
            3,
            vec![
                Branch { from: 0, to: 1, admittance: c(1.0, -1.0) },
                Branch { from: 1, to: 2, admittance: c(1.0, -1.0) },
            ],
            vec![],
        )
        .unwrap();
        let y = build_admittance(&spec);
        assert!(kron_reduce(&y, &[0]).is_ok());
        let m = y.matrix().clone();
        let bad = AdmittanceMatrix::from_matrix(CMat::from_fn(3, 3, |i, j| {
            if i == 0 || j == 0 { m[(i, j)] } else { c(1.0, 0.0) }
        }))
        .unwrap();
        assert!(matches!(kron_reduce(&bad, &[0]), Err(Error::SingularBlock { .. })));
    }

    #[test]
    fn two_bus_spectrum_closed_form() {
        let basis = spectral_decompose(&build_admittance(&two_bus(c(1.0, -1.0)))).unwrap();
        assert!(basis.lambda[0].norm() < 1e-14);
        assert!((basis.lambda[1] - c(2.0, -2.0)).norm() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = CMat::from_row_slice(2, 2, &[c(s, 0.), c(s, 0.), c(s, 0.), c(-s, 0.)]);
        assert!(close(&basis.w, &expect, 1e-14), "{}", basis.w);
    }

    #[test]
    fn two_bus_pseudoinverse_closed_form() {
        let y = build_admittance(&two_bus(c(1.0, -1.0)));
        let basis = spectral_decompose(&y).unwrap();
        let p = pseudoinverse_from_spectrum(&basis, DEFAULT_RANK_EPS);
        let k = c(1.0, 1.0) / 8.0;
        let expect = CMat::from_row_slice(2, 2, &[k, -k, -k, k]);
        assert!(close(&p, &expect, 1e-14));
        let m = y.matrix();
        assert!(close(&(m * &p * m), m, 1e-14));
        assert!(close(&(&p * m * &p), &p, 1e-14));
    }

    #[test]
    fn non_normal_rejected() {
        let spec = NetworkSpec::new(
            3,
            vec![
                Branch { from: 0, to: 1, admittance: c(1.0, -1.0) },
                Branch { from: 1, to: 2, admittance: c(1.0, -5.0) },
            ],
            vec![],
        )
        .unwrap();
        let y = build_admittance(&spec);
        assert!(!y.is_normal);
        match spectral_decompose(&y) {
            Err(Error::NotNormal { residual }) => assert!(residual > 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_xr_check_and_rewrite() {
        let b = |f, t, y| Branch { from: f, to: t, admittance: y };
        let spec = NetworkSpec::new(3, vec![b(0, 1, c(2.0, -2.0)), b(1, 2, c(0.5, -0.5))], vec![]).unwrap();
        assert_eq!(check_constant_xr(&spec), XrCheck::Constant { ratio: -1.0 });

        let mixed = NetworkSpec::new(
            4,
            vec![b(0, 1, c(2.0, -2.0)), b(1, 2, c(0.5, -0.5)), b(2, 3, c(1.0, -3.0))],
            vec![],
        )
        .unwrap();
        match check_constant_xr(&mixed) {
            XrCheck::Varying { offending, .. } => {
                assert_eq!(offending.len(), 1);
                assert_eq!((offending[0].from, offending[0].to), (2, 3));
            }
            other => panic!("{other:?}"),
        }
        assert!(check_constant_xr(&make_constant_xr(&mixed)).is_constant());

        let resistive = NetworkSpec::new(3, vec![b(0, 1, c(1.0, 0.0)), b(1, 2, c(1.0, -1.0))], vec![]).unwrap();
        match check_constant_xr(&resistive) {
            XrCheck::Varying { offending, .. } => assert!(offending.iter().any(|d| d.ratio.is_none())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_xr_rule() {
        let z = c(0.5, 0.2);
        let out = make_constant_xr(&two_bus(1.0 / z));
        let z2 = 1.0 / out.branches()[0].admittance;
        assert!((z2 - c(0.5, 0.5)).norm() < 1e-14);

        let fixed = two_bus(1.0 / c(0.3, 0.3));
        let again = make_constant_xr(&fixed);
        assert!((again.branches()[0].admittance - fixed.branches()[0].admittance).norm() < 1e-14);
    }
}

//! Dense complex linear algebra shared by every construction in the crate.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`. Decompositions go through
//! the Hermitian eigensolver and the SVD; dimensions are capped at
//! [`MAX_DIM`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Largest matrix dimension accepted by the decompositions.
pub const MAX_DIM: usize = 1024;

/// Equality and rank thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eq_tol: 1e-9, rank_tol: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, rank_tol: f64) -> Result<Self> {
        if !(eq_tol >= 0.0) || !(rank_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be nonnegative (eq_tol={eq_tol}, rank_tol={rank_tol})"
            )));
        }
        Ok(Self { eq_tol, rank_tol })
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = C64::new(*v, 0.0);
    }
    m
}

pub fn from_rows(rows: &[Vec<C64>]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

/// Spectral norm (largest singular value). Zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_dim(m: &CMat) -> Result<()> {
    if m.nrows() > MAX_DIM || m.ncols() > MAX_DIM {
        return Err(Error::DimensionLimit { rows: m.nrows(), cols: m.ncols(), max: MAX_DIM });
    }
    Ok(())
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-100 * rank_tol, 0)` are clamped to zero; anything more
/// negative is rejected as an invalid PSD claim.
pub fn hermitian_sqrt(m: &CMat, tol: Tolerance) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "square root of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    check_dim(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = 1.0 + op_norm(m);
    let herm = hermitian_defect(m);
    if herm > tol.eq_tol * scale {
        return Err(Error::NotHermitian(herm));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let floor = -100.0 * tol.rank_tol * scale;
    let mut roots = Vec::with_capacity(n);
    for &lam in eig.eigenvalues.iter() {
        if lam < floor {
            return Err(Error::NotPositive(lam));
        }
        // eigenvalues at rounding level are treated as zero
        let lam = if lam <= 128.0 * f64::EPSILON * scale { 0.0 } else { lam };
        roots.push(C64::new(lam.sqrt(), 0.0));
    }
    let q = &eig.eigenvectors;
    let d = CMat::from_diagonal(&CVec::from_vec(roots));
    let r = q * d * q.adjoint();
    Ok((&r + r.adjoint()).scale(0.5))
}

/// Orthonormal basis of the column span. The rank counts singular values
/// above `rank_tol * sigma_max`.
pub fn orthonormal_range_basis(m: &CMat, tol: Tolerance) -> CMat {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    if smax <= tol.rank_tol.max(f64::MIN_POSITIVE) {
        return zeros(rows, 0);
    }
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol.rank_tol * smax)
        .collect();
    CMat::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Orthonormal basis of the null space.
///
/// Singular values at most `rank_tol * max(1, sigma_max)` count as zero, so
/// the threshold is absolute for well-scaled operators.
pub fn kernel_basis(m: &CMat, tol: Tolerance) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    // Pad to at least n rows so the thin SVD exposes all right singular vectors.
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let thresh = tol.rank_tol * smax.max(1.0);
    let null: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= thresh).collect();
    CMat::from_fn(n, null.len(), |i, j| vt[(null[j], i)].conj())
}

pub fn min_singular_value(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    let mut s = sv.min();
    // Tall/wide matrices: a nontrivial kernel in the wider direction.
    if m.ncols() > m.nrows() {
        s = 0.0;
    }
    s.max(0.0)
}

/// Orthogonal projector onto the span of orthonormal columns `q`.
pub fn projector(q: &CMat) -> CMat {
    q * q.adjoint()
}

pub fn projector_distance(a: &CMat, b: &CMat) -> f64 {
    op_norm(&(projector(a) - projector(b)))
}

pub fn isometry_residual(q: &CMat) -> f64 {
    op_norm(&(q.adjoint() * q - identity(q.ncols())))
}

pub fn unitary_residual(u: &CMat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    isometry_residual(u).max(op_norm(&(u * u.adjoint() - identity(u.nrows()))))
}

/// Horizontal concatenation of column blocks with equal row counts.
pub fn hstack(blocks: &[&CMat], rows: usize) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&CMat], cols: usize) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(b);
        at += b.nrows();
    }
    out
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut cc) = (0, 0);
    for b in blocks {
        out.view_mut((r, cc), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        cc += b.ncols();
    }
    out
}

/// Orthonormal basis of the intersection of the spans of `a` and `b`
/// (both orthonormal, same ambient dimension).
pub fn intersect(a: &CMat, b: &CMat, tol: Tolerance) -> CMat {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return zeros(n, 0);
    }
    // x = a y lies in span(b) iff (I - P_b) a y = 0.
    let resid = a - b * (b.adjoint() * a);
    let k = kernel_basis(&resid, tol);
    orthonormal_range_basis(&(a * k), tol)
}

/// Orthonormal basis of `span(outer) ⊖ span(inner)`.
pub fn complement_in(outer: &CMat, inner: &CMat, tol: Tolerance) -> CMat {
    let n = outer.nrows();
    if outer.ncols() == 0 {
        return zeros(n, 0);
    }
    if inner.ncols() == 0 {
        return outer.clone();
    }
    let resid = inner.adjoint() * outer;
    let k = kernel_basis(&resid, tol);
    orthonormal_range_basis(&(outer * k), tol)
}

/// Re-expresses the span of orthonormal `q` in a basis aligned with the
/// coordinate order: Gram–Schmidt on the projections of `e_0, e_1, ...`.
///
/// When the span is itself coordinate, the result is a set of coordinate
/// vectors in their original order.
pub fn canonical_basis(q: &CMat, tol: Tolerance) -> CMat {
    let n = q.nrows();
    let r = q.ncols();
    let mut out: Vec<CVec> = Vec::with_capacity(r);
    if r == 0 {
        return zeros(n, 0);
    }
    for i in 0..n {
        if out.len() == r {
            break;
        }
        // projection of e_i onto span(q)
        let row = q.row(i).adjoint();
        let mut v: CVec = q * row;
        for _ in 0..2 {
            for w in &out {
                let proj = w.dotc(&v);
                v -= w * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            v /= C64::new(nv, 0.0);
            // clean rounding so coordinate vectors stay exact
            for z in v.iter_mut() {
                if z.norm() < 1e-15 {
                    *z = C64::new(0.0, 0.0);
                }
            }
            out.push(v);
        }
    }
    let _ = tol;
    CMat::from_columns(&out)
}

/// Nonzero entries of a matrix, for repeated products with dense blocks.
/// Model operators are banded or block sparse, so this beats the dense
/// product by the fill ratio.
#[derive(Debug, Clone)]
pub struct Sparse {
    rows: usize,
    cols: usize,
    /// `(row, col, value)` sorted by column.
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    pub fn from_dense(m: &CMat) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), entries }
    }

    /// Sparse form of `m*`.
    pub fn adjoint_of(m: &CMat) -> Self {
        Self::from_dense(&m.adjoint())
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `self · b`.
    pub fn mul(&self, b: &CMat) -> CMat {
        assert_eq!(self.cols, b.nrows(), "sparse product dimension mismatch");
        let mut out = CMat::zeros(self.rows, b.ncols());
        for c in 0..b.ncols() {
            let src = b.column(c);
            let mut dst = out.column_mut(c);
            for &(i, k, v) in &self.entries {
                dst[i] += v * src[k];
            }
        }
        out
    }
}

/// Deterministic random source used for generic linear combinations.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Unitary factor of a QR decomposition of a random square matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let m = random_matrix(rng, n, n);
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    // fix phases so the distribution does not depend on QR sign conventions
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * ph;
        }
    }
    out
}

/// Unitary polar factor `X (X*X)^{-1/2}` of an invertible square matrix.
pub fn polar_unitary(x: &CMat) -> Option<CMat> {
    let n = x.nrows();
    if n != x.ncols() {
        return None;
    }
    if n == 0 {
        return Some(x.clone());
    }
    let svd = x.clone().svd(true, true);
    if svd.singular_values.min() < 1e-12 * svd.singular_values.max().max(1.0) {
        return None;
    }
    let u = svd.u?;
    let vt = svd.v_t?;
    Some(u * vt)
}

/// Column-stacked vec of `X` maps `X M` to `(M^T ⊗ I) vec X` and `M X` to
/// `(I ⊗ M) vec X`. Returns the matrix of `X ↦ X a - b X`.
fn intertwining_system(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let m = b.nrows();
    let mut sys = CMat::zeros(m * n, m * n);
    // vec index of X[(i, j)] is j * m + i
    for j in 0..n {
        for i in 0..m {
            let col = j * m + i;
            // (X a)[(i, l)] gets X[(i, j)] * a[(j, l)]
            for l in 0..n {
                let v = a[(j, l)];
                if v != C64::new(0.0, 0.0) {
                    sys[(l * m + i, col)] += v;
                }
            }
            // (b X)[(k, j)] gets b[(k, i)] * X[(i, j)]
            for k in 0..m {
                let v = b[(k, i)];
                if v != C64::new(0.0, 0.0) {
                    sys[(j * m + k, col)] -= v;
                }
            }
        }
    }
    sys
}

/// Largest dimension for which the full intertwiner null space is solved.
pub const INTERTWINER_MAX_DIM: usize = 24;

/// Searches for a unitary `X` with `X A_i = B_i X` for every pair.
///
/// A returned matrix is a certificate of joint unitary equivalence. `None`
/// only means no certificate was found. Beyond [`INTERTWINER_MAX_DIM`] only
/// the identity candidate is tried.
pub fn unitary_intertwiner_solve(pairs: &[(CMat, CMat)], tol: Tolerance) -> Result<Option<CMat>> {
    let Some((a0, _)) = pairs.first() else {
        return Ok(None);
    };
    let n = a0.nrows();
    for (a, b) in pairs {
        if a.nrows() != n || a.ncols() != n || b.nrows() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "intertwiner pairs must all be {n}x{n} (got {}x{} and {}x{})",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
    }
    let residual = |x: &CMat| -> f64 {
        pairs.iter().map(|(a, b)| op_norm(&(x * a - b * x))).fold(0.0, f64::max)
    };
    let id = identity(n);
    if residual(&id) <= tol.eq_tol {
        return Ok(Some(id));
    }
    if n > INTERTWINER_MAX_DIM {
        return Ok(None);
    }
    let blocks: Vec<CMat> = pairs.iter().map(|(a, b)| intertwining_system(a, b)).collect();
    let refs: Vec<&CMat> = blocks.iter().collect();
    let sys = vstack(&refs, n * n);
    let null = kernel_basis(&sys, Tolerance { rank_tol: tol.rank_tol.max(1e-9), ..tol });
    if null.ncols() == 0 {
        return Ok(None);
    }
    let mut rng = seeded_rng(0x5eed);
    let mut best: Option<(f64, CMat)> = None;
    for _attempt in 0..4 {
        let coeffs = random_matrix(&mut rng, null.ncols(), 1);
        let v = &null * coeffs;
        let x = CMat::from_fn(n, n, |i, j| v[j * n + i]);
        if let Some(u) = polar_unitary(&x) {
            let r = residual(&u);
            if best.as_ref().is_none_or(|(br, _)| r < *br) {
                best = Some((r, u));
            }
        }
        if best.as_ref().is_some_and(|(r, _)| *r <= tol.eq_tol) {
            break;
        }
    }
    Ok(best.and_then(|(r, u)| (r <= tol.eq_tol).then_some(u)))
}

/// Dimension of `{X : X A_i = B_i X for all i}`.
pub fn intertwiner_space_dim(pairs: &[(CMat, CMat)], tol: Tolerance) -> usize {
    let Some((a0, b0)) = pairs.first() else {
        return 0;
    };
    let n = a0.nrows() * b0.nrows();
    let blocks: Vec<CMat> = pairs.iter().map(|(a, b)| intertwining_system(a, b)).collect();
    let refs: Vec<&CMat> = blocks.iter().collect();
    kernel_basis(&vstack(&refs, n), tol).ncols()
}

/// Eigenbasis of a normal matrix via a generic Hermitian combination of its
/// real and imaginary parts.
pub fn normal_eigenbasis(m: &CMat) -> CMat {
    let n = m.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let re = (m + m.adjoint()).scale(0.5);
    let im = (m - m.adjoint()) * C64::new(0.0, -0.5);
    let h = re * C64::new(1.0, 0.0) + im * C64::new(std::f64::consts::SQRT_2 / 3.0, 0.0);
    SymmetricEigen::new((&h + h.adjoint()).scale(0.5)).eigenvectors
}

/// Complex eigenvalues of a general square matrix, or `None` when the Schur
/// iteration does not settle (defective matrices can stall it).
pub fn eigenvalues(m: &CMat) -> Option<Vec<C64>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 2000)?;
    Some(schur.unpack().1.diagonal().iter().copied().collect())
}

/// `σ_min(M − λI)`; zero exactly when `λ` is an eigenvalue.
pub fn eigenvalue_gap(m: &CMat, lambda: C64) -> f64 {
    min_singular_value(&(m - CMat::identity(m.nrows(), m.ncols()) * lambda))
}

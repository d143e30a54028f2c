//! Wold decompositions of truncated isometries and the four-space splitting
//! of a bi-isometry.
//!
//! All subspaces are returned as orthonormal columns in the coordinates of
//! the operator window, supported on the interior.

use crate::error::{Error, Result};
use crate::linalg::{
    self, complement_in, hstack, kernel_basis, op_norm, orthonormal_range_basis, CMat, Sparse, Tolerance,
};
use crate::window::{isometry_defect, BiIsometry, Window, WindowedOp};

/// Isometry tolerance required of inputs on their interior.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct WoldResult {
    /// Orthonormal basis of `ker V*` inside the interior, in coordinate order.
    pub wandering: CMat,
    /// Orthonormal basis of `⊕_{k<depth} V^k (wandering)`.
    pub shift_part: CMat,
    /// Orthonormal basis of the vectors `x` with `‖V^{*depth} x‖ = ‖x‖`.
    pub unitary_part: CMat,
    pub depth_used: usize,
}

impl WoldResult {
    /// `‖P_shift + P_unitary − P_interior‖`.
    pub fn completeness_defect(&self, interior_projector: &CMat) -> f64 {
        let p = linalg::projector(&self.shift_part) + linalg::projector(&self.unitary_part);
        op_norm(&(p - interior_projector))
    }
}

/// Default depth: enough powers to exhaust every grade of the interior.
pub fn default_depth(interior: &Window) -> usize {
    interior.grade_span()
}

fn interior_projector(window: &Window, interior: &Window) -> Result<CMat> {
    let j = window.inclusion(interior)?;
    Ok(&j * j.adjoint())
}

/// Vectors of the interior on which `‖T^{*d} x‖ = ‖x‖`, where `T^*` is
/// applied through the stored adjoint matrix.
fn norm_preserving_for_adjoint_power(t: &CMat, j: &CMat, d: usize, tol: Tolerance) -> CMat {
    let mut y = j.clone();
    let th = Sparse::adjoint_of(t);
    for _ in 0..d {
        y = th.mul(&y);
    }
    let gram = j.adjoint() * j - y.adjoint() * &y;
    let gram = (&gram + gram.adjoint()).scale(0.5);
    let k = kernel_basis(&gram, Tolerance { rank_tol: tol.rank_tol.max(1e-9), ..tol });
    orthonormal_range_basis(&(j * k), tol)
}

pub fn wold_single(v: &WindowedOp, interior: &Window, depth: usize, tol: Tolerance) -> Result<WoldResult> {
    if v.domain != v.codomain {
        return Err(Error::WindowMismatch("Wold decomposition needs a square windowed operator".into()));
    }
    let defect = isometry_defect(v, interior)?;
    if defect > ISOMETRY_TOL {
        return Err(Error::NotIsometric(defect));
    }
    let span = interior.grade_span();
    if depth > span {
        return Err(Error::TruncationTooSmall(format!("depth {depth} exceeds interior grade span {span}")));
    }
    let j = v.domain.inclusion(interior)?;
    let vh_int = v.matrix.adjoint() * &j;
    let wandering = linalg::canonical_basis(&orthonormal_range_basis(&(&j * kernel_basis(&vh_int, tol)), tol), tol);

    let mut blocks = Vec::with_capacity(depth);
    let mut cur = wandering.clone();
    let vs = Sparse::from_dense(&v.matrix);
    for _ in 0..depth {
        blocks.push(cur.clone());
        cur = vs.mul(&cur);
    }
    let refs: Vec<&CMat> = blocks.iter().collect();
    let shift_part = orthonormal_range_basis(&hstack(&refs, v.domain.len()), tol);
    let unitary_part = norm_preserving_for_adjoint_power(&v.matrix, &j, depth, tol);
    Ok(WoldResult { wandering, shift_part, unitary_part, depth_used: depth })
}

/// Largest subspace of `span(x)` invariant under every matrix in `ops`,
/// by repeated restriction until the dimension stops dropping.
pub fn largest_invariant_subspace(x: &CMat, ops: &[&CMat], tol: Tolerance) -> CMat {
    let ops: Vec<Sparse> = ops.iter().map(|a| Sparse::from_dense(a)).collect();
    let mut x = orthonormal_range_basis(x, tol);
    loop {
        if x.ncols() == 0 {
            return x;
        }
        let xh = x.adjoint();
        let leak: Vec<CMat> = ops
            .iter()
            .map(|a| {
                let ax = a.mul(&x);
                &ax - &x * (&xh * &ax)
            })
            .collect();
        let refs: Vec<&CMat> = leak.iter().collect();
        let k = kernel_basis(&linalg::vstack(&refs, x.ncols()), Tolerance { rank_tol: tol.rank_tol.max(1e-9), ..tol });
        if k.ncols() == x.ncols() {
            return x;
        }
        x = orthonormal_range_basis(&(&x * k), tol);
    }
}

/// Largest subspace of `span(x)` invariant under `W₀*` and `W₁*`.
fn largest_coinvariant(w: &BiIsometry, x: &CMat, tol: Tolerance) -> CMat {
    let a0 = w.w0.matrix.adjoint();
    let a1 = w.w1.matrix.adjoint();
    largest_invariant_subspace(x, &[&a0, &a1], tol)
}

/// Where both operators act unitarily: the vectors preserved in norm by
/// `(W₀W₁)^{*depth}`, which bounds every word of that length.
pub fn unitary_part_pair(w: &BiIsometry, depth: usize, tol: Tolerance) -> Result<CMat> {
    let t = &w.w0.matrix * &w.w1.matrix;
    let j = w.interior_inclusion();
    Ok(norm_preserving_for_adjoint_power(&t, &j, depth, tol))
}

/// `(K₀₀, K₀₁, K₁₀, K₁₁)`: `K_ab` is where `W₀` is a shift (`a = 0`) or
/// unitary (`a = 1`), and likewise `b` for `W₁`.
#[derive(Debug, Clone)]
pub struct FourSpaces {
    pub k00: CMat,
    pub k01: CMat,
    pub k10: CMat,
    pub k11: CMat,
}

impl FourSpaces {
    pub fn blocks(&self) -> [&CMat; 4] {
        [&self.k00, &self.k01, &self.k10, &self.k11]
    }

    pub fn dims(&self) -> [usize; 4] {
        self.blocks().map(|b| b.ncols())
    }
}

pub fn four_space_decomposition(w: &BiIsometry, depth: usize, tol: Tolerance) -> Result<FourSpaces> {
    let u0 = wold_single(&w.w0, &w.interior, depth, tol)?.unitary_part;
    let u1 = wold_single(&w.w1, &w.interior, depth, tol)?.unitary_part;
    let interior = orthonormal_range_basis(&w.interior_inclusion(), tol);

    let n0 = largest_coinvariant(w, &u0, tol);
    let k11 = largest_coinvariant(w, &linalg::intersect(&n0, &u1, tol), tol);
    let k10 = complement_in(&n0, &k11, tol);
    let rest = complement_in(&interior, &n0, tol);
    let k01 = largest_coinvariant(w, &linalg::intersect(&rest, &u1, tol), tol);
    let k00 = complement_in(&rest, &k01, tol);
    Ok(FourSpaces { k00, k01, k10, k11 })
}

/// Reducing defect of a subspace inside the interior:
/// `max_i ‖(P_int − P_B) W_i P_B‖` and `‖(P_int − P_B) W_i* P_B‖`.
/// Leakage out of the interior is a truncation effect and is not counted.
pub fn reducing_defect(w: &BiIsometry, basis: &CMat) -> Result<f64> {
    if basis.ncols() == 0 {
        return Ok(0.0);
    }
    let p_int = interior_projector(w.window(), &w.interior)?;
    let p = linalg::projector(basis);
    let mut worst = 0.0f64;
    for m in [&w.w0.matrix, &w.w1.matrix] {
        worst = worst.max(op_norm(&((&p_int - &p) * m * &p)));
        worst = worst.max(op_norm(&((&p_int - &p) * m.adjoint() * &p)));
    }
    Ok(worst)
}

/// Splits `A` into its unitary and completely nonunitary parts.
pub fn cnu_part_of_contraction(a: &CMat, tol: Tolerance) -> Result<(CMat, CMat)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!("contraction must be square, got {}x{}", n, a.ncols())));
    }
    let norm = op_norm(a);
    if norm > 1.0 + 1e-9 {
        return Err(Error::NotContractive(norm));
    }
    let id = linalg::identity(n);
    let fixed = |m: CMat| kernel_basis(&((&m + m.adjoint()).scale(0.5)), Tolerance { rank_tol: tol.rank_tol.max(1e-9), ..tol });
    let k1 = fixed(&id - a.adjoint() * a);
    let k2 = fixed(&id - a * a.adjoint());
    let start = linalg::intersect(&k1, &k2, tol);
    let ah = a.adjoint();
    let unitary = largest_invariant_subspace(&start, &[a, &ah], tol);
    let cnu = complement_in(&id, &unitary, tol);
    Ok((unitary, cnu))
}

pub fn wold_projector_of_interior(w: &WindowedOp, interior: &Window) -> Result<CMat> {
    interior_projector(&w.domain, interior)
}

//! Characteristic pairs and functions of bi-isometries, and the functional
//! model `W(Θ)` of a contractive symbol.
//!
//! The model lives on `H²(𝔈) ⊕ H²(𝔇)` where `𝔇` is the closure of
//! `Δ L²(𝔈)`. Functions in `𝔇` are stored by their values at `K` roots of
//! unity: slot coordinates `c_j ∈ ran Δ(ζ_j)` represent the boundary value
//! `√K · c_j` at `ζ_j`, so the discrete inner product is the `L²` one for
//! trigonometric polynomials of degree below `K`.

use crate::error::{Error, Result};
use crate::linalg::{self, kernel_basis, op_norm, orthonormal_range_basis, CMat, Tolerance, C64};
use crate::symbol::{boundary_defect, is_inner_sampled, roots_of_unity, OpSymbol};
use crate::window::{BiIsometry, Label, Window, WindowedOp};
use crate::wold;

/// Singular values of `Δ(ζ)` below this are treated as zero, which drops
/// defect mass of order `1e-12`.
pub const DEFECT_RANK_TOL: f64 = 1e-6;

/// Tail mass accepted when truncating a non-polynomial symbol's series.
pub const SERIES_TAIL_TOL: f64 = 1e-13;

/// Defect slots `w^0 .. w^DEFECT_SLOTS` belong to the interior; one more
/// slot closes `W₁` on them.
pub const DEFECT_SLOTS: i64 = 1;

/// Layout of a truncated model space.
#[derive(Debug, Clone)]
pub struct ModelSpaces {
    /// `H²(𝔈)` labels, grades `0..=n_total`.
    pub hardy: Window,
    /// Defect labels: grade `m` is the `w^m` slot, fibers offset past `𝔈`.
    pub defect: Window,
    /// Full model window (`hardy` then `defect`).
    pub window: Window,
    /// Dimension of one defect slot, `Σ_j rank Δ(ζ_j)`.
    pub defect_rank: usize,
    /// Orthonormal range basis of each `Δ(ζ_j)`.
    pub ranges: Vec<CMat>,
    /// Slot coordinate `t` belongs to sample `slot_index[t].0`.
    pub slot_index: Vec<(usize, usize)>,
    pub samples: Vec<C64>,
    pub fiber_dim: usize,
    pub n_interior: i64,
    pub n_total: i64,
    pub k_used: usize,
    pub series_len: usize,
}

impl ModelSpaces {
    /// Position of the `slot`-th defect coordinate `t` in the window.
    pub fn defect_position(&self, slot: i64, t: usize) -> Option<usize> {
        self.window.position(&Label::new(slot, self.fiber_dim + t))
    }

    /// Orthonormal columns of the `w^m` defect slot, in window coordinates.
    pub fn slot_basis(&self, slot: i64) -> CMat {
        let n = self.window.len();
        let pos: Vec<usize> = (0..self.defect_rank).filter_map(|t| self.defect_position(slot, t)).collect();
        CMat::from_fn(n, pos.len(), |i, j| if i == pos[j] { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Columns of `H²(𝔈)` for grades `0..=hi`.
    pub fn hardy_basis(&self, hi: i64) -> CMat {
        let sub = self.hardy.filter(|l| l.grade <= hi);
        self.window.inclusion(&sub).expect("hardy labels lie in the model window")
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub biiso: BiIsometry,
    pub spaces: ModelSpaces,
    /// Taylor coefficients `Θ_0 .. Θ_{series_len-1}`.
    pub coefficients: Vec<CMat>,
    /// `Θ(ζ_j)` and `Δ(ζ_j)` at the sample points.
    pub symbol_samples: Vec<CMat>,
    pub defect_samples: Vec<CMat>,
}

/// Smallest `N` at which `ker W₁*` of the model is resolved to the default
/// rank tolerance. Polynomial symbols give 1. For Blaschke entries the
/// kernel holds reproducing kernels decaying like `|a|^k`, so `N` follows
/// the series tail.
pub fn kernel_capture_depth(theta: &OpSymbol) -> i64 {
    if theta.is_polynomial() {
        1
    } else {
        theta.tail_length(1e-11).0 as i64
    }
}

/// Builds `W(Θ)`: `W₀ = (zf, ζg)` and `W₁ = (Θf, Δf + w g)`.
///
/// The interior is `H²` grades `0..=n` plus defect slots
/// `0..=DEFECT_SLOTS`. For polynomial symbols the sampled inner products
/// are exact once `K > n_total + deg`, and that smallest `K` is used;
/// otherwise `k` is raised to it when needed. The value used is reported in
/// `spaces.k_used`.
pub fn build_model_biisometry(theta: &OpSymbol, n: i64, k: usize) -> Result<Model> {
    if n < 1 {
        return Err(Error::TruncationTooSmall(format!("model needs N >= 1, got {n}")));
    }
    let e = theta.dim();
    let (series_len, tail) = theta.tail_length(SERIES_TAIL_TOL);
    let n_total = n + series_len as i64;
    let exact_k = ((n_total as usize) + series_len + 1).max(8);
    let k_used = if theta.is_polynomial() { exact_k } else { k.max(exact_k) };
    let coeffs = theta.series(series_len);
    let bd = boundary_defect(theta, k_used)?;
    let samples = roots_of_unity(k_used);

    let mut ranges = Vec::with_capacity(k_used);
    let mut slot_index = Vec::new();
    for (j, (_, d)) in bd.samples.iter().enumerate() {
        let svd = d.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let keep: Vec<usize> = (0..e).filter(|&i| svd.singular_values[i] > DEFECT_RANK_TOL).collect();
        let r = CMat::from_fn(e, keep.len(), |a, b| u[(a, keep[b])]);
        for col in 0..r.ncols() {
            slot_index.push((j, col));
        }
        ranges.push(r);
    }
    let drank = slot_index.len();

    let hardy = Window::graded(0, n_total, e);
    let defect_labels: Vec<Label> =
        (0..=DEFECT_SLOTS + 1).flat_map(|m| (0..drank).map(move |t| Label::new(m, e + t))).collect();
    let defect = Window::new(defect_labels)?;
    let mut all = hardy.labels().to_vec();
    all.extend_from_slice(defect.labels());
    let window = Window::new(all)?;
    let dim = window.len();
    let hp = |g: i64, i: usize| (g as usize) * e + i;
    let dp = |m: i64, t: usize| hardy.len() + (m as usize) * drank + t;

    let mut w0 = CMat::zeros(dim, dim);
    let mut w1 = CMat::zeros(dim, dim);
    let sqrt_k = (k_used as f64).sqrt();
    // sample-side map f ↦ R_j* Δ_j f(ζ_j) / √K for f = e_i
    let mut delta_rows = CMat::zeros(drank, e);
    for (t, &(j, col)) in slot_index.iter().enumerate() {
        let proj = ranges[j].column(col).adjoint() * &bd.samples[j].1;
        for i in 0..e {
            delta_rows[(t, i)] = proj[(0, i)] / sqrt_k;
        }
    }
    for g in 0..=n_total {
        for i in 0..e {
            let col = hp(g, i);
            if g < n_total {
                w0[(hp(g + 1, i), col)] = C64::new(1.0, 0.0);
            }
            for (kk, ck) in coeffs.iter().enumerate() {
                let gg = g + kk as i64;
                if gg > n_total {
                    break;
                }
                for r in 0..e {
                    w1[(hp(gg, r), col)] = ck[(r, i)];
                }
            }
            for (t, &(j, _)) in slot_index.iter().enumerate() {
                w1[(dp(0, t), col)] = delta_rows[(t, i)] * samples[j].powi(g as i32);
            }
        }
    }
    for m in 0..=DEFECT_SLOTS + 1 {
        for (t, &(j, _)) in slot_index.iter().enumerate() {
            w0[(dp(m, t), dp(m, t))] = samples[j];
            if m <= DEFECT_SLOTS {
                w1[(dp(m + 1, t), dp(m, t))] = C64::new(1.0, 0.0);
            }
        }
    }

    let interior = window.filter(|l| if l.fiber < e { l.grade <= n } else { l.grade <= DEFECT_SLOTS });
    let w0_exact = window.filter(|l| l.fiber >= e || l.grade < n_total);
    let w1_exact = window.filter(|l| if l.fiber < e { l.grade <= n + 1 } else { l.grade <= DEFECT_SLOTS });
    let w1_adj = window.filter(|l| l.fiber < e || l.grade >= 1);
    let op0 = WindowedOp::new(window.clone(), window.clone(), w0, w0_exact, window.clone(), 0.0)?;
    let op1 = WindowedOp::new(window.clone(), window.clone(), w1, w1_exact, w1_adj, tail)?;
    let biiso = BiIsometry::new(op0, op1, interior, Tolerance::default())?;
    let spaces = ModelSpaces {
        hardy,
        defect,
        window,
        defect_rank: drank,
        ranges,
        slot_index,
        samples,
        fiber_dim: e,
        n_interior: n,
        n_total,
        k_used,
        series_len,
    };
    let symbol_samples = spaces.samples.iter().map(|z| theta.eval(*z)).collect::<Result<Vec<_>>>()?;
    let defect_samples = bd.samples.into_iter().map(|(_, d)| d).collect();
    Ok(Model { biiso, spaces, coefficients: coeffs, symbol_samples, defect_samples })
}

/// `𝔈 = ker W₀*` on the interior, in coordinate order.
pub fn wandering_basis(w: &BiIsometry, tol: Tolerance) -> CMat {
    let j = w.interior_inclusion();
    let k = kernel_basis(&(w.w0.matrix.adjoint() * &j), tol);
    linalg::canonical_basis(&orthonormal_range_basis(&(&j * k), tol), tol)
}

/// `𝔉 = ker W₁*` on the interior, in coordinate order.
pub fn co_wandering_basis(w: &BiIsometry, tol: Tolerance) -> CMat {
    wandering_basis(&w.swapped(), tol)
}

/// `Θ_k = P_𝔈 W₀^{*k} W₁|𝔈` for `k = 0..=k_max`.
pub fn characteristic_function(w: &BiIsometry, k_max: usize, tol: Tolerance) -> Result<Vec<CMat>> {
    let span = w.interior.grade_span();
    if k_max + 2 > span {
        return Err(Error::TruncationTooSmall(format!(
            "k_max {k_max} needs an interior grade span of at least {}, got {span}",
            k_max + 2
        )));
    }
    let e = wandering_basis(w, tol);
    let mut cur = &w.w1.matrix * &e;
    let w0h = w.w0.matrix.adjoint();
    let mut out = Vec::with_capacity(k_max + 1);
    for _ in 0..=k_max {
        out.push(e.adjoint() * &cur);
        cur = &w0h * cur;
    }
    Ok(out)
}

/// `(V₀, A)` in the graded basis `[𝔈, W₀𝔈, W₀²𝔈, ...]` of the shift part.
#[derive(Debug, Clone)]
pub struct CharPair {
    /// Window coordinates of the graded basis of `H`.
    pub basis: CMat,
    pub v0: CMat,
    pub a: CMat,
    pub wandering_dim: usize,
    pub depth: usize,
}

impl CharPair {
    /// Columns of blocks `0..depth-1`, whose images stay inside `H`.
    pub fn interior_len(&self) -> usize {
        self.wandering_dim * self.depth.saturating_sub(1)
    }

    /// `‖(V₀A − AV₀)|interior‖` on rows that stay inside `H`.
    pub fn commutation_residual(&self) -> f64 {
        let m = self.interior_len();
        let d = &self.v0 * &self.a - &self.a * &self.v0;
        op_norm(&d.view((0, 0), (m, m)).into_owned())
    }
}

pub fn characteristic_pair(w: &BiIsometry, depth: usize, tol: Tolerance) -> Result<CharPair> {
    let e = wandering_basis(w, tol);
    if e.ncols() == 0 {
        return Err(Error::EmptyKernel("W₀ is unitary on the interior; the shift part is empty".into()));
    }
    let depth = depth.min(w.interior.grade_span()).max(1);
    let mut blocks = Vec::with_capacity(depth);
    let mut cur = e.clone();
    for _ in 0..depth {
        blocks.push(cur.clone());
        cur = &w.w0.matrix * cur;
    }
    let refs: Vec<&CMat> = blocks.iter().collect();
    let q = linalg::hstack(&refs, w.dim());
    let defect = linalg::isometry_residual(&q);
    if defect > 1e-8 {
        return Err(Error::Verification(format!("graded shift basis is not orthonormal (defect {defect:.3e})")));
    }
    let v0 = q.adjoint() * &w.w0.matrix * &q;
    let a = q.adjoint() * &w.w1.matrix * &q;
    Ok(CharPair { basis: q, v0, a, wandering_dim: e.ncols(), depth })
}

/// `(W₀*|ker W₁*)*` in the coordinate basis of `ker W₁*`, i.e. `P_𝔉 W₀|𝔉`.
pub fn pivotal_operator(w: &BiIsometry, tol: Tolerance) -> Result<CMat> {
    let f = co_wandering_basis(w, tol);
    if f.ncols() == 0 {
        return Err(Error::EmptyKernel("ker W₁* is trivial on the interior".into()));
    }
    Ok(f.adjoint() * &w.w0.matrix * &f)
}

/// Value at `z` of `(I − W₁W₁*)(I − zW₁*)^{-1}W₀` on `ran(I − W₁W₁*)`, by a
/// Neumann series whose tail is bounded by `|z|^L / (1 − |z|)`.
pub fn swapped_characteristic_function(w: &BiIsometry, z: C64, tol: Tolerance) -> Result<CMat> {
    let r = z.norm();
    if r >= 1.0 {
        return Err(Error::OutsideDisk(r));
    }
    let f = co_wandering_basis(w, tol);
    if f.ncols() == 0 {
        return Err(Error::EmptyKernel("ker W₁* is trivial on the interior".into()));
    }
    let span = w.interior.grade_span();
    let mut len = 1usize;
    while len < span && r.powi(len as i32) / (1.0 - r) > 1e-8 {
        len += 1;
    }
    let tail = if r == 0.0 { 0.0 } else { r.powi(len as i32) / (1.0 - r) };
    if tail > 1e-8 {
        return Err(Error::TruncationTooSmall(format!("Neumann tail {tail:.3e} exceeds 1e-8 at |z| = {r}")));
    }
    let w1h = w.w1.matrix.adjoint();
    let mut cur = &w.w0.matrix * &f;
    let mut acc = f.adjoint() * &cur;
    let mut zk = C64::new(1.0, 0.0);
    for _ in 1..len {
        cur = &w1h * cur;
        zk *= z;
        acc += (f.adjoint() * &cur) * zk;
    }
    Ok(acc)
}

/// `‖(W₀W₁* − W₁*W₀)|interior‖` and whether it is at most 1e-8.
pub fn doubly_commuting_test(w: &BiIsometry) -> (bool, f64) {
    let j = w.interior_inclusion();
    let a = &w.w0.matrix;
    let bh = w.w1.matrix.adjoint();
    let r = op_norm(&((a * &bh - &bh * a) * j));
    (r <= 1e-8, r)
}

/// `𝔥(Θ) = (H²(𝔈) ⊕ 𝔇) ⊖ {Θu ⊕ Δu}` at truncation, with
/// `S(Θ) = P_𝔥 W₀|𝔥`.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    /// Orthonormal basis in model-window coordinates.
    pub basis: CMat,
    pub compressed_shift: CMat,
}

pub fn model_space_compression(model: &Model, tol: Tolerance) -> Result<ModelSpace> {
    let sp = &model.spaces;
    let w = &model.biiso;
    // candidates: interior H² grades and the w^0 defect slot
    let cand = linalg::hstack(&[&sp.hardy_basis(sp.n_interior), &sp.slot_basis(0)], sp.window.len());
    // 𝔊 restricted to the window: images of every H² column
    let g = &w.w1.matrix * sp.hardy_basis(sp.n_total);
    let k = kernel_basis(&(g.adjoint() * &cand), tol);
    let basis = linalg::canonical_basis(&orthonormal_range_basis(&(&cand * k), tol), tol);
    let compressed_shift = basis.adjoint() * &w.w0.matrix * &basis;
    Ok(ModelSpace { basis, compressed_shift })
}

/// Certificate that `Θ Ω = Ω U` for a constant isometry `Ω` and diagonal
/// unitary `U`.
#[derive(Debug, Clone)]
pub struct ConstantCertificate {
    pub omega: CMat,
    pub unitary_diagonal: Vec<C64>,
}

/// Searches for a constant `Ω`: the subspace killed by every `Θ_k`, `k ≥ 1`,
/// on which `Θ₀` is isometric and which `Θ₀` maps into itself.
pub fn constant_omega_certificate(theta: &OpSymbol, tol: Tolerance) -> Option<ConstantCertificate> {
    let (len, _) = theta.tail_length(SERIES_TAIL_TOL);
    let coeffs = theta.series(len.max(2));
    let e = theta.dim();
    let t0 = &coeffs[0];
    let loose = Tolerance { rank_tol: 1e-9, ..tol };
    let mut s = kernel_basis(&(linalg::identity(e) - t0.adjoint() * t0), loose);
    for ck in coeffs.iter().skip(1) {
        if s.ncols() == 0 {
            return None;
        }
        let k = kernel_basis(&(ck * &s), loose);
        s = orthonormal_range_basis(&(&s * k), tol);
    }
    let s = wold::largest_invariant_subspace(&s, &[t0], tol);
    if s.ncols() == 0 {
        return None;
    }
    let u = s.adjoint() * t0 * &s;
    let q = linalg::normal_eigenbasis(&u);
    let diag = q.adjoint() * &u * &q;
    let omega = &s * &q;
    let ok = op_norm(&(t0 * &omega - &omega * CMat::from_diagonal(&diag.diagonal()))) <= 1e-8;
    ok.then(|| ConstantCertificate { omega, unitary_diagonal: diag.diagonal().iter().copied().collect() })
}

#[derive(Debug, Clone)]
pub struct BishiftReport {
    /// `max_x ‖W₀^{*n} x‖` over unit interior vectors, `n = 0..=n_max`.
    pub decay_w0: Vec<f64>,
    pub decay_w1: Vec<f64>,
    pub inner: bool,
    pub inner_defect: f64,
    pub certificate: Option<ConstantCertificate>,
    pub is_bishift: bool,
}

impl BishiftReport {
    /// `n,w0,w1` rows.
    pub fn decay_csv(&self) -> String {
        let mut s = String::from("n,w0,w1\n");
        for (n, (a, b)) in self.decay_w0.iter().zip(&self.decay_w1).enumerate() {
            s.push_str(&format!("{n},{a:.6e},{b:.6e}\n"));
        }
        s
    }
}

/// Largest singular value of `(W*)^n` on the interior for `n = 0..=n_max`.
pub fn adjoint_decay(op: &WindowedOp, interior: &Window, n_max: usize) -> Result<Vec<f64>> {
    let mut cur = op.domain.inclusion(interior)?;
    let h = linalg::Sparse::adjoint_of(&op.matrix);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(op_norm(&cur));
        if n < n_max {
            cur = h.mul(&cur);
        }
    }
    Ok(out)
}

/// Partial bi-shift test: adjoint decay, sampled innerness and the
/// constant-`Ω` obstruction. A missing certificate does not rule out a
/// non-constant one.
pub fn bishift_test(w: &BiIsometry, theta: &OpSymbol, n_max: usize, k: usize, tol: Tolerance) -> Result<BishiftReport> {
    let decay_w0 = adjoint_decay(&w.w0, &w.interior, n_max)?;
    let decay_w1 = adjoint_decay(&w.w1, &w.interior, n_max)?;
    let (inner, inner_defect) = is_inner_sampled(theta, k);
    let certificate = constant_omega_certificate(theta, tol);
    let decays = |v: &[f64]| v.last().is_some_and(|x| *x <= 1e-6);
    let is_bishift = decays(&decay_w0) && decays(&decay_w1) && inner && certificate.is_none();
    Ok(BishiftReport { decay_w0, decay_w1, inner, inner_defect, certificate, is_bishift })
}

/// `1 − σ_min(W* J)`: zero when `W` is co-isometric on the interior, which
/// for an isometry means unitary there.
pub fn unitarity_gap(op: &WindowedOp, interior: &Window) -> Result<f64> {
    let j = op.domain.inclusion(interior)?;
    Ok(1.0 - linalg::min_singular_value(&(op.matrix.adjoint() * j)))
}

/// The four conditions that single out the doubly commuting bi-shifts.
#[derive(Debug, Clone)]
pub struct DoubleReport {
    pub doubly_commuting: bool,
    pub commutation_residual: f64,
    /// `Θ_k = 0` for `1 ≤ k ≤ k_max` and `Θ_0` isometric.
    pub constant_isometry: bool,
    pub nonconstant_mass: f64,
    /// `Θ(0)`, the pivotal operator of `(W₁, W₀)`, is isometric.
    pub swapped_pivotal_isometry: bool,
    pub swapped_pivotal_defect: f64,
    /// Vacuously true when `W₁` is unitary on the interior. `None` when
    /// `ker W₁*` is nonzero but not captured by the window.
    pub pivotal_isometry: Option<bool>,
    pub pivotal_defect: Option<f64>,
}

impl DoubleReport {
    /// Decided verdicts all agree.
    pub fn agree(&self) -> bool {
        let mut v = vec![self.doubly_commuting, self.constant_isometry, self.swapped_pivotal_isometry];
        v.extend(self.pivotal_isometry);
        v.iter().all(|&x| x == v[0])
    }
}

pub fn double_report(w: &BiIsometry, k_max: usize, tol: Tolerance) -> Result<DoubleReport> {
    let (doubly_commuting, commutation_residual) = doubly_commuting_test(w);
    let k_max = k_max.min(w.interior.grade_span().saturating_sub(2));
    let theta = characteristic_function(w, k_max, tol)?;
    let nonconstant_mass = theta.iter().skip(1).map(op_norm).fold(0.0, f64::max);
    let swapped_pivotal_defect = linalg::isometry_residual(&theta[0]);
    let t = 1e-8;
    let pivotal_defect = match pivotal_operator(w, tol) {
        Ok(p) => Some(linalg::isometry_residual(&p)),
        Err(Error::EmptyKernel(_)) => (unitarity_gap(&w.w1, &w.interior)? <= t).then_some(0.0),
        Err(e) => return Err(e),
    };
    Ok(DoubleReport {
        doubly_commuting,
        commutation_residual,
        constant_isometry: nonconstant_mass <= t && swapped_pivotal_defect <= t,
        nonconstant_mass,
        swapped_pivotal_isometry: swapped_pivotal_defect <= t,
        swapped_pivotal_defect,
        pivotal_isometry: pivotal_defect.map(|d| d <= t),
        pivotal_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real, random_unitary, seeded_rng};
    use crate::symbol::{shifted_example_symbol, InnerScalar};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn z_symbol() -> OpSymbol {
        OpSymbol::monomial_identity(1, 1).unwrap()
    }

    #[test]
    fn shift_symbol_model() {
        let m = build_model_biisometry(&z_symbol(), 5, 16).unwrap();
        assert_eq!(m.spaces.defect_rank, 0);
        let th = characteristic_function(&m.biiso, 3, tol()).unwrap();
        assert!((th[0][(0, 0)]).norm() < 1e-12);
        assert!((th[1][(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(th[2][(0, 0)].norm() < 1e-12 && th[3][(0, 0)].norm() < 1e-12);
        let p = characteristic_pair(&m.biiso, 6, tol()).unwrap();
        // A is the shift itself
        assert!(op_norm(&(&p.a - &p.v0)) < 1e-12);
    }

    #[test]
    fn half_scalar_round_trip() {
        let s = OpSymbol::constant(&diag_real(&[0.5])).unwrap();
        let m = build_model_biisometry(&s, 4, 16).unwrap();
        assert!(m.spaces.defect_rank > 0);
        let chk = m.biiso.check().unwrap();
        assert!(chk.max() < 1e-9, "{chk:?}");
        let th = characteristic_function(&m.biiso, 2, tol()).unwrap();
        assert!((th[0][(0, 0)] - c(0.5, 0.0)).norm() < 1e-10);
        assert!(th[1].norm() < 1e-10);
        // isometric but not unitary on the interior
        let f = co_wandering_basis(&m.biiso, tol());
        assert!(f.ncols() > 0);
    }

    #[test]
    fn constant_unitary_gives_unitary_w1() {
        let u = random_unitary(&mut seeded_rng(5), 2);
        let m = build_model_biisometry(&OpSymbol::constant(&u).unwrap(), 4, 16).unwrap();
        assert_eq!(co_wandering_basis(&m.biiso, tol()).ncols(), 0);
        let ms = model_space_compression(&m, tol()).unwrap();
        assert_eq!(ms.basis.ncols(), 0);
    }

    #[test]
    fn model_space_of_z_is_constants() {
        let m = build_model_biisometry(&z_symbol(), 4, 16).unwrap();
        let ms = model_space_compression(&m, tol()).unwrap();
        assert_eq!(ms.basis.ncols(), 1);
        assert!(ms.compressed_shift.norm() < 1e-12);
        let f = co_wandering_basis(&m.biiso, tol());
        assert!(linalg::projector_distance(&f, &ms.basis) < 1e-8);
    }

    #[test]
    fn model_space_of_zero_symbol() {
        let zero = OpSymbol::constant(&CMat::zeros(1, 1)).unwrap();
        let m = build_model_biisometry(&zero, 3, 16).unwrap();
        let ms = model_space_compression(&m, tol()).unwrap();
        let sp = &m.spaces;
        // direct count: interior H² plus the slot minus the sampled H² window
        let want = (sp.n_interior as usize + 1) + sp.k_used - (sp.n_total as usize + 1);
        assert_eq!(ms.basis.ncols(), want);
        let f = co_wandering_basis(&m.biiso, tol());
        assert!(linalg::projector_distance(&f, &ms.basis) < 1e-8);
    }

    #[test]
    fn swapped_function_for_rotated_shift() {
        let zeta = C64::from_polar(1.0, 0.7);
        let s = crate::window::shift_operator(1, 40).unwrap();
        let w = BiIsometry::new(s.scaled(zeta), s, Window::graded(0, 39, 1), tol()).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.1)] {
            let v = swapped_characteristic_function(&w, z, tol()).unwrap();
            assert!((v[(0, 0)] - z * zeta).norm() < 1e-8);
        }
        let p = pivotal_operator(&w, tol()).unwrap();
        assert!(p[(0, 0)].norm() < 1e-14);
        let small = BiIsometry::new(w.w0.clone(), w.w1.clone(), Window::graded(0, 5, 1), tol()).unwrap();
        assert!(matches!(
            swapped_characteristic_function(&small, c(0.9, 0.0), tol()),
            Err(Error::TruncationTooSmall(_))
        ));
    }

    #[test]
    fn doubly_commuting_cases() {
        let u = random_unitary(&mut seeded_rng(1), 2);
        let v = OpSymbol::constant(&u).unwrap();
        assert!(doubly_commuting_test(&build_model_biisometry(&v, 4, 16).unwrap().biiso).0);
        let zi = OpSymbol::monomial_identity(2, 1).unwrap();
        assert!(!doubly_commuting_test(&build_model_biisometry(&zi, 4, 16).unwrap().biiso).0);
    }

    #[test]
    fn bishift_of_identity_and_shift() {
        let id = OpSymbol::constant(&linalg::identity(2)).unwrap();
        let m = build_model_biisometry(&id, 4, 16).unwrap();
        let r = bishift_test(&m.biiso, &id, 8, 32, tol()).unwrap();
        assert!(r.certificate.is_some() && !r.is_bishift);
        let z = z_symbol();
        let m = build_model_biisometry(&z, 4, 16).unwrap();
        let r = bishift_test(&m.biiso, &z, 8, 32, tol()).unwrap();
        assert!(r.is_bishift, "{:?}", r.decay_w0);
    }

    #[test]
    fn example_symbol_model_is_exact() {
        let phi = InnerScalar::factor(c(-0.5, 0.0)).unwrap();
        let th = shifted_example_symbol(3, &phi).unwrap();
        let m = build_model_biisometry(&th, 4, 16).unwrap();
        assert_eq!(m.spaces.defect_rank, 0);
        let cf = characteristic_function(&m.biiso, 3, tol()).unwrap();
        let series = th.series(4);
        for k in 0..4 {
            assert!(op_norm(&(&cf[k] - &series[k])) < 1e-10);
        }
    }

    #[test]
    fn double_ring_agrees() {
        let mut rng = seeded_rng(7);
        let mut j = CMat::zeros(3, 3);
        j[(0, 1)] = c(1.0, 0.0);
        j[(1, 2)] = c(1.0, 0.0);
        let cases = [
            (OpSymbol::constant(&linalg::identity(2)).unwrap(), true),
            (OpSymbol::constant(&random_unitary(&mut rng, 3)).unwrap(), true),
            (z_symbol(), false),
            (OpSymbol::constant(&j).unwrap(), false),
            (OpSymbol::constant(&diag_real(&[0.5, 0.5])).unwrap(), false),
            (OpSymbol::inner_scalar_identity(1, &InnerScalar::factor(c(0.5, 0.0)).unwrap()).unwrap(), false),
        ];
        for (theta, expect) in cases {
            let m = build_model_biisometry(&theta, 8, 16).unwrap();
            let r = double_report(&m.biiso, 6, tol()).unwrap();
            assert!(r.agree(), "{r:?}");
            assert_eq!(r.doubly_commuting, expect, "{r:?}");
        }
    }
}

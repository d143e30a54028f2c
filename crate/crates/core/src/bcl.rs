//! Unitary–projection pairs `(U, P)` attached to bi-isometries.
//!
//! A pair is stored in the basis `𝔈 ⊕ 𝔉` with `𝔈 = ker W₀*` first, so `P`
//! is diagonal with ones on the `𝔈` block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, op_norm, unitary_intertwiner_solve, CMat, Tolerance, C64};
use crate::model::{co_wandering_basis, model_space_compression, wandering_basis, Model};
use crate::symbol::{cpx, pair};
use crate::window::{BiIsometry, Window, WindowedOp};

/// Default maximal word length for trace invariants.
pub const DEFAULT_WORD_LEN: usize = 6;

#[derive(Debug, Clone)]
pub struct BclPair {
    pub u: CMat,
    pub p: CMat,
    /// `max(‖U*U − I‖, ‖UU* − I‖)`; nonzero only for truncated compressions.
    pub unitary_defect: f64,
}

impl BclPair {
    /// Validates `U` unitary and `P` an orthogonal projection within 1e-9.
    pub fn new(u: CMat, p: CMat) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "U is {}x{}, P is {}x{}",
                u.nrows(),
                u.ncols(),
                p.nrows(),
                p.ncols()
            )));
        }
        let ud = linalg::unitary_residual(&u);
        if ud > 1e-9 {
            return Err(Error::InvalidInput(format!("U is not unitary (defect {ud:.3e})")));
        }
        let herm = linalg::hermitian_defect(&p);
        let idem = op_norm(&(&p * &p - &p));
        if herm > 1e-9 || idem > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "P is not an orthogonal projection (hermitian defect {herm:.3e}, idempotence defect {idem:.3e})"
            )));
        }
        Ok(Self { u, p, unitary_defect: ud })
    }

    /// Pair with `P = diag(flags)`.
    pub fn with_flags(u: CMat, flags: &[bool]) -> Result<Self> {
        let p = linalg::diag_real(&flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        Self::new(u, p)
    }

    fn compression(u: CMat, p: CMat) -> Self {
        let unitary_defect = linalg::unitary_residual(&u);
        Self { u, p, unitary_defect }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `(dim 𝔈, dim 𝔉)` = `(rank P, dim − rank P)`.
    pub fn split(&self) -> (usize, usize) {
        let r = self.p.trace().re.round().max(0.0) as usize;
        (r, self.dim() - r)
    }

    /// Diagonal of `P` as flags, when `P` is diagonal with 0/1 entries.
    pub fn p_flags(&self) -> Option<Vec<bool>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && self.p[(i, j)].norm() > 1e-9 {
                    return None;
                }
            }
            let d = self.p[(i, i)];
            if (d - C64::new(1.0, 0.0)).norm() <= 1e-9 {
                out.push(true);
            } else if d.norm() <= 1e-9 {
                out.push(false);
            } else {
                return None;
            }
        }
        Some(out)
    }
}

/// Result of reading `(U, P)` off a truncated bi-isometry.
#[derive(Debug, Clone)]
pub struct BclExtraction {
    pub pair: BclPair,
    /// Orthonormal bases of `𝔈 = ker W₀*` and `𝔉 = ker W₁*` (window
    /// coordinates).
    pub e_basis: CMat,
    pub f_basis: CMat,
    /// `‖P_𝔈 + P_{W₀𝔉} − P_{W₁𝔈} − P_𝔉‖` plus the orthogonality defects
    /// of both splittings.
    pub decomposition_residual: f64,
}

/// Block matrix `[[W₁*|𝔈, W₁*W₀|𝔉], [P_𝔉|𝔈, P_𝔉 W₀|𝔉]]` without any
/// residual check. On truncations of infinite-dimensional `𝔇` this is a
/// compression and `unitary_defect` measures the loss.
pub fn bcl_compression_from_biisometry(w: &BiIsometry, tol: Tolerance) -> Result<BclExtraction> {
    let e = wandering_basis(w, tol);
    let f = co_wandering_basis(w, tol);
    if e.ncols() + f.ncols() == 0 {
        return Err(Error::EmptyKernel("ker (W₀W₁)* is trivial on the interior".into()));
    }
    let w0 = &w.w0.matrix;
    let w1 = &w.w1.matrix;
    let w0f = w0 * &f;
    let w1e = w1 * &e;
    let top = linalg::hstack(&[&(e.adjoint() * w1.adjoint() * &e), &(e.adjoint() * w1.adjoint() * &w0f)], e.ncols());
    let bottom = linalg::hstack(&[&(f.adjoint() * &e), &(f.adjoint() * &w0f)], f.ncols());
    let u = linalg::vstack(&[&top, &bottom], e.ncols() + f.ncols());
    let p = linalg::block_diag(&[&linalg::identity(e.ncols()), &CMat::zeros(f.ncols(), f.ncols())]);

    let proj = linalg::projector;
    let split = op_norm(&(proj(&e) + proj(&w0f) - proj(&w1e) - proj(&f)));
    let orth = op_norm(&(e.adjoint() * &w0f)).max(op_norm(&(w1e.adjoint() * &f)));
    Ok(BclExtraction { pair: BclPair::compression(u, p), e_basis: e, f_basis: f, decomposition_residual: split + orth })
}

/// `(U, P)` of a bi-isometry whose defect space `𝔇 = ker (W₀W₁)*` is
/// captured by the window.
pub fn bcl_from_biisometry(w: &BiIsometry, tol: Tolerance) -> Result<BclExtraction> {
    let ex = bcl_compression_from_biisometry(w, tol)?;
    if ex.decomposition_residual > 1e-8 {
        return Err(Error::TruncationTooSmall(format!(
            "defect space splitting fails by {:.3e}; enlarge the window",
            ex.decomposition_residual
        )));
    }
    if ex.pair.unitary_defect > 1e-8 {
        return Err(Error::Verification(format!("extracted U is not unitary (defect {:.3e})", ex.pair.unitary_defect)));
    }
    Ok(ex)
}

/// `U` and `P` re-expressed in the coordinate-ordered orthonormal basis of
/// `𝔇 = span(𝔈 ∪ W₀𝔉)` inside the window. Returns `(basis, U, P)`.
pub fn bcl_in_defect_coordinates(w: &BiIsometry, ex: &BclExtraction, tol: Tolerance) -> (CMat, CMat, CMat) {
    let w0f = &w.w0.matrix * &ex.f_basis;
    let phi = linalg::hstack(&[&ex.e_basis, &w0f], w.dim());
    let c = linalg::canonical_basis(&linalg::orthonormal_range_basis(&phi, tol), tol);
    let t = c.adjoint() * &phi;
    let u = &t * &ex.pair.u * t.adjoint();
    let p = &t * &ex.pair.p * t.adjoint();
    (c, u, p)
}

/// `W₀ = U(zP + P^⊥)` and `W₁ = (P + zP^⊥)U*` on `H²(𝔇)`, grades `0..=n`,
/// interior grades `0..n`.
pub fn biisometry_from_bcl(b: &BclPair, n: i64) -> Result<BiIsometry> {
    if n < 1 {
        return Err(Error::TruncationTooSmall(format!("need N >= 1, got {n}")));
    }
    if b.unitary_defect > 1e-9 {
        return Err(Error::InvalidInput(format!("U is not unitary (defect {:.3e})", b.unitary_defect)));
    }
    let d = b.dim();
    let w = Window::graded(0, n, d);
    let id = linalg::identity(d);
    let pp = &id - &b.p;
    let stay0 = &b.u * &pp;
    let up0 = &b.u * &b.p;
    let uh = b.u.adjoint();
    let stay1 = &b.p * &uh;
    let up1 = &pp * &uh;
    let len = w.len();
    let mut m0 = CMat::zeros(len, len);
    let mut m1 = CMat::zeros(len, len);
    for g in 0..=n as usize {
        m0.view_mut((g * d, g * d), (d, d)).copy_from(&stay0);
        m1.view_mut((g * d, g * d), (d, d)).copy_from(&stay1);
        if g < n as usize {
            m0.view_mut(((g + 1) * d, g * d), (d, d)).copy_from(&up0);
            m1.view_mut(((g + 1) * d, g * d), (d, d)).copy_from(&up1);
        }
    }
    let exact = w.filter(|l| l.grade < n);
    let op0 = WindowedOp::new(w.clone(), w.clone(), m0, exact.clone(), w.clone(), 0.0)?;
    let op1 = WindowedOp::new(w.clone(), w.clone(), m1, exact.clone(), w.clone(), 0.0)?;
    BiIsometry::new(op0, op1, exact, Tolerance::default())
}

/// `(U, P)` directly from the symbol:
/// `U(e ⊕ 0) = Θ(0)*e ⊕ [(e − ΘΘ(0)*e) ⊕ (−ΔΘ(0)*e)]` and
/// `U(0 ⊕ h) = (Θ*u + Δv)_{−1} ⊕ S(Θ)h` for `h = u ⊕ v ∈ 𝔥(Θ)`.
pub fn bcl_from_symbol(model: &Model, tol: Tolerance) -> Result<BclPair> {
    let sp = &model.spaces;
    let e = sp.fiber_dim;
    let ms = model_space_compression(model, tol)?;
    let f = &ms.basis;
    let nf = f.ncols();
    let theta_series = &model.coefficients;
    let t0 = &theta_series[0];
    let dim = sp.window.len();
    let k = sp.k_used;
    let sqrt_k = (k as f64).sqrt();

    // first column block: U(e_i ⊕ 0)
    let mut col_e = CMat::zeros(dim, e);
    for i in 0..e {
        let x = t0.adjoint().column(i).into_owned();
        let mut v = crate::linalg::CVec::zeros(dim);
        v[i] += C64::new(1.0, 0.0);
        for (g, tg) in theta_series.iter().enumerate() {
            if g as i64 > sp.n_total {
                break;
            }
            let y = tg * &x;
            for r in 0..e {
                v[g * e + r] -= y[r];
            }
        }
        for (t, &(j, col)) in sp.slot_index.iter().enumerate() {
            let dx = &model.defect_samples[j] * &x;
            let c = sp.ranges[j].column(col).dotc(&dx) / sqrt_k;
            let pos = sp.defect_position(0, t).expect("slot 0 lies in the window");
            v[pos] -= c;
        }
        col_e.set_column(i, &v);
    }
    let top_left = t0.adjoint();
    let bottom_left = f.adjoint() * col_e;

    // (Θ*u + Δv)_{−1} from boundary samples
    let mut top_right = CMat::zeros(e, nf);
    for h in 0..nf {
        let col = f.column(h);
        let mut acc = crate::linalg::CVec::zeros(e);
        for (j, z) in sp.samples.iter().enumerate() {
            let mut uval = crate::linalg::CVec::zeros(e);
            let mut zg = C64::new(1.0, 0.0);
            for g in 0..=sp.n_total as usize {
                for r in 0..e {
                    uval[r] += col[g * e + r] * zg;
                }
                zg *= z;
            }
            let mut val = model.symbol_samples[j].adjoint() * uval;
            let mut vval = crate::linalg::CVec::zeros(e);
            for (t, &(jj, c)) in sp.slot_index.iter().enumerate() {
                if jj != j {
                    continue;
                }
                let pos = sp.defect_position(0, t).expect("slot 0 lies in the window");
                vval += sp.ranges[j].column(c) * (col[pos] * sqrt_k);
            }
            val += &model.defect_samples[j] * vval;
            acc += val * *z;
        }
        top_right.set_column(h, &(acc / C64::new(k as f64, 0.0)));
    }
    let u = linalg::vstack(
        &[&linalg::hstack(&[&top_left, &top_right], e), &linalg::hstack(&[&bottom_left, &ms.compressed_shift], nf)],
        e + nf,
    );
    let p = linalg::block_diag(&[&linalg::identity(e), &CMat::zeros(nf, nf)]);
    Ok(BclPair::compression(u, p))
}

/// Outcome of comparing two pairs.
#[derive(Debug, Clone)]
pub enum Equivalence {
    /// Unitary `X` with `X U₁ = U₂ X` and `X P₁ = P₂ X`.
    Equivalent(CMat),
    /// Description of the invariant that differs.
    Inequivalent(String),
    Undecided,
}

impl Equivalence {
    pub fn label(&self) -> &'static str {
        match self {
            Equivalence::Equivalent(_) => "equivalent",
            Equivalence::Inequivalent(_) => "inequivalent",
            Equivalence::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Letter {
    U,
    Ustar,
    P,
}

/// Words in `{U, U*, P}` up to `len`, skipping `PP`, `UU*` and `U*U`.
fn words(len: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in [Letter::U, Letter::Ustar, Letter::P] {
                let redundant = matches!(
                    (w.last(), l),
                    (Some(Letter::P), Letter::P) | (Some(Letter::U), Letter::Ustar) | (Some(Letter::Ustar), Letter::U)
                );
                if !redundant {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn word_trace(b: &BclPair, uh: &CMat, w: &[Letter]) -> C64 {
    let mut m = linalg::identity(b.dim());
    for l in w {
        m = match l {
            Letter::U => m * &b.u,
            Letter::Ustar => m * uh,
            Letter::P => m * &b.p,
        };
    }
    m.trace()
}

fn word_name(w: &[Letter]) -> String {
    w.iter()
        .map(|l| match l {
            Letter::U => "U",
            Letter::Ustar => "U*",
            Letter::P => "P",
        })
        .collect::<Vec<_>>()
        .join("")
}

/// Trace invariants certify inequivalence, an intertwiner certifies
/// equivalence; otherwise the verdict is undecided.
pub fn pair_equivalence(a: &BclPair, b: &BclPair, word_len: usize, tol: Tolerance) -> Result<Equivalence> {
    if a.dim() != b.dim() {
        return Ok(Equivalence::Inequivalent(format!("dimensions differ ({} vs {})", a.dim(), b.dim())));
    }
    let (ah, bh) = (a.u.adjoint(), b.u.adjoint());
    for w in words(word_len) {
        let (ta, tb) = (word_trace(a, &ah, &w), word_trace(b, &bh, &w));
        if (ta - tb).norm() > 1e-7 {
            return Ok(Equivalence::Inequivalent(format!("tr {} differs: {ta} vs {tb}", word_name(&w))));
        }
    }
    let pairs = [(a.u.clone(), b.u.clone()), (a.p.clone(), b.p.clone())];
    let tol = Tolerance { eq_tol: tol.eq_tol.max(1e-8), ..tol };
    Ok(match unitary_intertwiner_solve(&pairs, tol)? {
        Some(x) => Equivalence::Equivalent(x),
        None => Equivalence::Undecided,
    })
}

/// `max(‖XU_a − U_bX‖, ‖XP_a − P_bX‖, ‖X*X − I‖)` for a candidate witness.
pub fn witness_residual(a: &BclPair, b: &BclPair, x: &CMat) -> f64 {
    let r1 = op_norm(&(x * &a.u - &b.u * x));
    let r2 = op_norm(&(x * &a.p - &b.p * x));
    r1.max(r2).max(linalg::unitary_residual(x))
}

// ---- serialization ------------------------------------------------------

/// `{dim, U: [[[re, im]]], P: [0|1]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BclDoc {
    pub dim: usize,
    #[serde(rename = "U")]
    pub u: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "P")]
    pub p: Vec<u8>,
}

impl TryFrom<&BclDoc> for BclPair {
    type Error = Error;

    fn try_from(doc: &BclDoc) -> Result<Self> {
        let n = doc.dim;
        if doc.u.len() != n || doc.u.iter().any(|r| r.len() != n) || doc.p.len() != n {
            return Err(Error::Parse(format!("U must be {n}x{n} and P must have {n} flags")));
        }
        if doc.p.iter().any(|&f| f > 1) {
            return Err(Error::Parse("P flags must be 0 or 1".into()));
        }
        let u = CMat::from_fn(n, n, |i, j| cpx(doc.u[i][j]));
        BclPair::with_flags(u, &doc.p.iter().map(|&f| f == 1).collect::<Vec<_>>())
    }
}

impl TryFrom<&BclPair> for BclDoc {
    type Error = Error;

    fn try_from(b: &BclPair) -> Result<Self> {
        let flags = b.p_flags().ok_or_else(|| Error::InvalidInput("P is not a diagonal 0/1 projection".into()))?;
        let n = b.dim();
        Ok(BclDoc {
            dim: n,
            u: (0..n).map(|i| (0..n).map(|j| pair(b.u[(i, j)])).collect()).collect(),
            p: flags.iter().map(|&f| u8::from(f)).collect(),
        })
    }
}

pub fn bcl_from_json(text: &str) -> Result<BclPair> {
    let doc: BclDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    BclPair::try_from(&doc)
}

pub fn bcl_to_json(b: &BclPair) -> Result<String> {
    Ok(serde_json::to_string_pretty(&BclDoc::try_from(b)?)?)
}

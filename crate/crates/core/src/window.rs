//! Operators on infinite graded spaces, stored as finite matrices between
//! index windows.
//!
//! A basis label is a `(grade, fiber)` pair. Every operator records the part
//! of its domain on which the stored columns are the true images
//! (`exact_domain`) and the part of its codomain on which the stored rows give
//! the true adjoint (`adjoint_exact_domain`). Identities are then asserted on
//! explicit interior windows rather than "up to truncation error".

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, op_norm, CMat, Tolerance, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub grade: i64,
    pub fiber: usize,
}

impl Label {
    pub const fn new(grade: i64, fiber: usize) -> Self {
        Self { grade, fiber }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.grade, self.fiber)
    }
}

/// Ordered set of basis labels.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Window {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Window({} labels)", self.labels.len())
    }
}

impl Window {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(*l, i).is_some() {
                return Err(Error::WindowMismatch(format!("duplicate label {l}")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Grade-major window `lo..=hi` × `0..fiber_dim`.
    pub fn graded(lo: i64, hi: i64, fiber_dim: usize) -> Self {
        let labels = (lo..=hi)
            .flat_map(|g| (0..fiber_dim).map(move |i| Label::new(g, i)))
            .collect();
        Self::new(labels).expect("graded labels are distinct")
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.index.contains_key(l)
    }

    /// Sub-window of labels satisfying `keep`, in the original order.
    pub fn filter(&self, keep: impl Fn(&Label) -> bool) -> Self {
        Self::new(self.labels.iter().copied().filter(|l| keep(l)).collect())
            .expect("subset of distinct labels")
    }

    /// Positions of `sub`'s labels inside `self`.
    pub fn positions_of(&self, sub: &Window) -> Result<Vec<usize>> {
        sub.labels
            .iter()
            .map(|l| {
                self.position(l)
                    .ok_or_else(|| Error::WindowMismatch(format!("label {l} not in window")))
            })
            .collect()
    }

    pub fn embeds_in(&self, other: &Window) -> bool {
        self.labels.iter().all(|l| other.contains(l))
    }

    /// Inclusion matrix of `sub` into `self` (columns are coordinate vectors).
    pub fn inclusion(&self, sub: &Window) -> Result<CMat> {
        let pos = self.positions_of(sub)?;
        let mut j = CMat::zeros(self.len(), sub.len());
        for (c, &r) in pos.iter().enumerate() {
            j[(r, c)] = C64::new(1.0, 0.0);
        }
        Ok(j)
    }

    pub fn grade_range(&self) -> Option<(i64, i64)> {
        let lo = self.labels.iter().map(|l| l.grade).min()?;
        let hi = self.labels.iter().map(|l| l.grade).max()?;
        Some((lo, hi))
    }

    /// Number of distinct grades.
    pub fn grade_span(&self) -> usize {
        let mut g: Vec<i64> = self.labels.iter().map(|l| l.grade).collect();
        g.sort_unstable();
        g.dedup();
        g.len()
    }

    pub fn intersection(&self, other: &Window) -> Self {
        self.filter(|l| other.contains(l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exactness {
    Exact,
    Approx { tail_bound: f64 },
}

impl Exactness {
    pub fn tail_bound(&self) -> f64 {
        match self {
            Exactness::Exact => 0.0,
            Exactness::Approx { tail_bound } => *tail_bound,
        }
    }

    fn combine(self, other: Exactness) -> Exactness {
        match (self, other) {
            (Exactness::Exact, Exactness::Exact) => Exactness::Exact,
            (a, b) => Exactness::Approx { tail_bound: a.tail_bound() + b.tail_bound() },
        }
    }
}

#[derive(Debug, Clone)]
pub struct WindowedOp {
    pub domain: Window,
    pub codomain: Window,
    pub matrix: CMat,
    /// Whole-operator tag: `Exact` when every stored column is a true image.
    pub exactness: Exactness,
    /// Domain labels whose stored images are exact (up to `tail_bound`).
    pub exact_domain: Window,
    /// Codomain labels on which the stored rows give the true adjoint.
    pub adjoint_exact_domain: Window,
    /// Mass of the true images outside the window, per unit vector of
    /// `exact_domain`.
    pub tail_bound: f64,
}

impl WindowedOp {
    pub fn new(
        domain: Window,
        codomain: Window,
        matrix: CMat,
        exact_domain: Window,
        adjoint_exact_domain: Window,
        tail_bound: f64,
    ) -> Result<Self> {
        if matrix.nrows() != codomain.len() || matrix.ncols() != domain.len() {
            return Err(Error::WindowMismatch(format!(
                "matrix is {}x{} but windows are {} -> {}",
                matrix.nrows(),
                matrix.ncols(),
                domain.len(),
                codomain.len()
            )));
        }
        if !exact_domain.embeds_in(&domain) || !adjoint_exact_domain.embeds_in(&codomain) {
            return Err(Error::WindowMismatch("exact sub-window outside the operator windows".into()));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let exactness = if exact_domain.len() == domain.len() && tail_bound == 0.0 {
            Exactness::Exact
        } else {
            let outside = domain.len() - exact_domain.len();
            Exactness::Approx { tail_bound: if outside > 0 { tail_bound.max(1.0) } else { tail_bound } }
        };
        Ok(Self { domain, codomain, matrix, exactness, exact_domain, adjoint_exact_domain, tail_bound })
    }

    /// Operator known exactly on both sides (finite-dimensional blocks).
    pub fn finite(window: Window, matrix: CMat) -> Result<Self> {
        Self::new(window.clone(), window.clone(), matrix, window.clone(), window, 0.0)
    }

    pub fn identity(window: &Window) -> Self {
        Self::finite(window.clone(), linalg::identity(window.len())).expect("square identity")
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.matrix *= s;
        out
    }

    /// Columns of the matrix belonging to `sub` (a sub-window of the domain).
    pub fn columns_on(&self, sub: &Window) -> Result<CMat> {
        Ok(&self.matrix * self.domain.inclusion(sub)?)
    }
}

/// `I ⊗ Q`: the same `d × d` matrix on the fiber of every grade of a graded
/// window with fiber dimension `d`.
pub fn fiberwise_operator(window: &Window, q: &CMat) -> Result<WindowedOp> {
    let d = q.nrows();
    if q.ncols() != d {
        return Err(Error::DimensionMismatch(format!("fiber matrix must be square, got {}x{}", d, q.ncols())));
    }
    let mut m = CMat::zeros(window.len(), window.len());
    for (c, l) in window.labels().iter().enumerate() {
        if l.fiber >= d {
            return Err(Error::WindowMismatch(format!("label fiber {} outside the {d}-dimensional fiber", l.fiber)));
        }
        for r in 0..d {
            if let Some(row) = window.position(&Label::new(l.grade, r)) {
                m[(row, c)] = q[(r, l.fiber)];
            }
        }
    }
    WindowedOp::finite(window.clone(), m)
}

/// `f ∘ g`. Requires `g.codomain` to embed in `f.domain`.
pub fn compose(f: &WindowedOp, g: &WindowedOp) -> Result<WindowedOp> {
    if !g.codomain.embeds_in(&f.domain) {
        return Err(Error::WindowMismatch("g.codomain does not embed in f.domain".into()));
    }
    let j = f.domain.inclusion(&g.codomain)?;
    let matrix = &f.matrix * &j * &g.matrix;
    let tol = 1e-300;
    // exact columns of g whose images only touch exact columns of f
    let g_rows_exact: Vec<bool> =
        g.codomain.labels().iter().map(|l| f.exact_domain.contains(l)).collect();
    let exact_domain = g.exact_domain.filter(|l| {
        let c = g.domain.position(l).expect("exact_domain embeds in domain");
        (0..g.codomain.len()).all(|r| g.matrix[(r, c)].norm() <= tol || g_rows_exact[r])
    });
    // adjoint: (f g)* = g* f*; f* rows exact on f.adjoint_exact_domain and the
    // image must lie where g* is exact
    let g_adj_ok: Vec<bool> = f
        .domain
        .labels()
        .iter()
        .map(|l| g.codomain.position(l).is_some_and(|_| g.adjoint_exact_domain.contains(l)))
        .collect();
    let adjoint_exact_domain = f.adjoint_exact_domain.filter(|l| {
        let r = f.codomain.position(l).expect("adjoint domain embeds in codomain");
        (0..f.domain.len()).all(|c| f.matrix[(r, c)].norm() <= tol || g_adj_ok[c])
    });
    let mut out = WindowedOp::new(
        g.domain.clone(),
        f.codomain.clone(),
        matrix,
        exact_domain,
        adjoint_exact_domain,
        f.tail_bound + g.tail_bound,
    )?;
    out.exactness = out.exactness.combine(f.exactness.combine(g.exactness));
    if out.exact_domain.len() == out.domain.len() && out.tail_bound == 0.0 {
        out.exactness = Exactness::Exact;
    }
    Ok(out)
}

/// Conjugate transpose with swapped windows and swapped exactness regions.
pub fn adjoint(f: &WindowedOp) -> WindowedOp {
    WindowedOp::new(
        f.codomain.clone(),
        f.domain.clone(),
        f.matrix.adjoint(),
        f.adjoint_exact_domain.clone(),
        f.exact_domain.clone(),
        f.tail_bound,
    )
    .expect("adjoint of a valid operator")
}

/// `‖(f*f − I)|on‖`, the largest deviation of `‖f x‖` from `‖x‖` in the
/// quadratic sense over unit vectors supported on `on`.
pub fn isometry_defect(f: &WindowedOp, on: &Window) -> Result<f64> {
    if !on.embeds_in(&f.domain) {
        return Err(Error::WindowMismatch("isometry window not inside the domain".into()));
    }
    let m = f.columns_on(on)?;
    Ok(op_norm(&(m.adjoint() * &m - linalg::identity(on.len()))))
}

/// Unilateral shift `(g, i) ↦ (g + 1, i)` on grades `0..=n`.
pub fn shift_operator(fiber_dim: usize, n: i64) -> Result<WindowedOp> {
    if n < 1 {
        return Err(Error::TruncationTooSmall(format!("shift needs N >= 1, got {n}")));
    }
    let w = Window::graded(0, n, fiber_dim);
    let m = grade_shift_matrix(&w, 1);
    let exact = w.filter(|l| l.grade < n);
    WindowedOp::new(w.clone(), w.clone(), m, exact, w, 0.0)
}

/// Bilateral shift on grades `-n..=n`; unitary on the interior.
pub fn bilateral_shift_operator(fiber_dim: usize, n: i64) -> Result<WindowedOp> {
    if n < 1 {
        return Err(Error::TruncationTooSmall(format!("bilateral shift needs N >= 1, got {n}")));
    }
    let w = Window::graded(-n, n, fiber_dim);
    let m = grade_shift_matrix(&w, 1);
    let exact = w.filter(|l| l.grade < n);
    let adj = w.filter(|l| l.grade > -n);
    WindowedOp::new(w.clone(), w, m, exact, adj, 0.0)
}

/// Matrix of `(g, i) ↦ (g + step, i)` inside a window (images leaving the
/// window are dropped).
pub fn grade_shift_matrix(w: &Window, step: i64) -> CMat {
    let mut m = CMat::zeros(w.len(), w.len());
    for (c, l) in w.labels().iter().enumerate() {
        if let Some(r) = w.position(&Label::new(l.grade + step, l.fiber)) {
            m[(r, c)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// A pair of commuting operators on a common window, isometric and commuting
/// exactly on `interior`.
#[derive(Debug, Clone)]
pub struct BiIsometry {
    pub w0: WindowedOp,
    pub w1: WindowedOp,
    pub interior: Window,
}

/// Residuals certifying a [`BiIsometry`] on its interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiIsometryCheck {
    pub isometry_defect_w0: f64,
    pub isometry_defect_w1: f64,
    pub commutation_residual: f64,
}

impl BiIsometryCheck {
    pub fn max(&self) -> f64 {
        self.isometry_defect_w0.max(self.isometry_defect_w1).max(self.commutation_residual)
    }
}

impl BiIsometry {
    /// Builds the pair and checks it on the interior within `tol.eq_tol`.
    pub fn new(w0: WindowedOp, w1: WindowedOp, interior: Window, tol: Tolerance) -> Result<Self> {
        let b = Self::new_unchecked(w0, w1, interior)?;
        let chk = b.check()?;
        if chk.isometry_defect_w0.max(chk.isometry_defect_w1) > tol.eq_tol {
            return Err(Error::NotIsometric(chk.isometry_defect_w0.max(chk.isometry_defect_w1)));
        }
        if chk.commutation_residual > tol.eq_tol {
            return Err(Error::Verification(format!(
                "operators do not commute on the interior (residual {:.3e})",
                chk.commutation_residual
            )));
        }
        Ok(b)
    }

    pub fn new_unchecked(w0: WindowedOp, w1: WindowedOp, interior: Window) -> Result<Self> {
        if w0.domain != w0.codomain || w1.domain != w1.codomain || w0.domain != w1.domain {
            return Err(Error::WindowMismatch("bi-isometry operators must share one window".into()));
        }
        if !interior.embeds_in(&w0.domain) {
            return Err(Error::WindowMismatch("interior not inside the window".into()));
        }
        Ok(Self { w0, w1, interior })
    }

    pub fn window(&self) -> &Window {
        &self.w0.domain
    }

    pub fn dim(&self) -> usize {
        self.window().len()
    }

    pub fn interior_inclusion(&self) -> CMat {
        self.window().inclusion(&self.interior).expect("interior embeds in window")
    }

    pub fn check(&self) -> Result<BiIsometryCheck> {
        let j = self.interior_inclusion();
        let a = &self.w0.matrix;
        let b = &self.w1.matrix;
        Ok(BiIsometryCheck {
            isometry_defect_w0: isometry_defect(&self.w0, &self.interior)?,
            isometry_defect_w1: isometry_defect(&self.w1, &self.interior)?,
            commutation_residual: op_norm(&((a * b - b * a) * j)),
        })
    }

    /// `(W1, W0)`.
    pub fn swapped(&self) -> Self {
        Self { w0: self.w1.clone(), w1: self.w0.clone(), interior: self.interior.clone() }
    }

    /// Orthogonal direct sum. Labels of `other` get fiber indices offset past
    /// this pair's largest fiber.
    pub fn direct_sum(&self, other: &BiIsometry) -> Result<Self> {
        let off = self.window().labels().iter().map(|l| l.fiber + 1).max().unwrap_or(0);
        let shift = |w: &Window| {
            Window::new(w.labels().iter().map(|l| Label::new(l.grade, l.fiber + off)).collect())
        };
        let mut labels = self.window().labels().to_vec();
        labels.extend(shift(other.window())?.labels());
        let window = Window::new(labels)?;
        let join = |a: &Window, b: &Window| -> Result<Window> {
            let mut l = a.labels().to_vec();
            l.extend(shift(b)?.labels());
            Window::new(l)
        };
        let op = |f: &WindowedOp, g: &WindowedOp| -> Result<WindowedOp> {
            WindowedOp::new(
                window.clone(),
                window.clone(),
                linalg::block_diag(&[&f.matrix, &g.matrix]),
                join(&f.exact_domain, &g.exact_domain)?,
                join(&f.adjoint_exact_domain, &g.adjoint_exact_domain)?,
                f.tail_bound.max(g.tail_bound),
            )
        };
        Self::new_unchecked(
            op(&self.w0, &other.w0)?,
            op(&self.w1, &other.w1)?,
            join(&self.interior, &other.interior)?,
        )
    }
}

// ---- serialization ------------------------------------------------------

/// `{labels: [[grade, fiber]], w0, w1: [[[re, im]]], interior: [[grade, fiber]]}`.
/// Matrices are taken as exact on the whole window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiIsometryDoc {
    pub labels: Vec<(i64, usize)>,
    pub w0: Vec<Vec<[f64; 2]>>,
    pub w1: Vec<Vec<[f64; 2]>>,
    pub interior: Vec<(i64, usize)>,
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("operator matrices must be {n}x{n}")));
    }
    Ok(CMat::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl BiIsometryDoc {
    pub fn to_biisometry(&self, tol: Tolerance) -> Result<BiIsometry> {
        let labels = |v: &[(i64, usize)]| Window::new(v.iter().map(|&(g, f)| Label::new(g, f)).collect());
        let win = labels(&self.labels)?;
        let interior = labels(&self.interior)?;
        let n = win.len();
        let w0 = WindowedOp::finite(win.clone(), matrix_from_rows(&self.w0, n)?)?;
        let w1 = WindowedOp::finite(win, matrix_from_rows(&self.w1, n)?)?;
        BiIsometry::new(w0, w1, interior, tol)
    }

    pub fn from_biisometry(b: &BiIsometry) -> Self {
        let pairs = |w: &Window| w.labels().iter().map(|l| (l.grade, l.fiber)).collect();
        BiIsometryDoc {
            labels: pairs(b.window()),
            w0: matrix_to_rows(&b.w0.matrix),
            w1: matrix_to_rows(&b.w1.matrix),
            interior: pairs(&b.interior),
        }
    }
}

pub fn biisometry_from_json(text: &str, tol: Tolerance) -> Result<BiIsometry> {
    let doc: BiIsometryDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_biisometry(tol)
}

pub fn biisometry_to_json(b: &BiIsometry) -> String {
    serde_json::to_string(&BiIsometryDoc::from_biisometry(b)).expect("bi-isometry documents serialize")
}

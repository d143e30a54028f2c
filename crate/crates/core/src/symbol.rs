//! Contractive matrix-valued analytic functions on the disk.
//!
//! Each entry of an [`OpSymbol`] is a polynomial optionally multiplied by a
//! finite Blaschke product, so values, Taylor coefficients and boundary values
//! are all exactly computable.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, op_norm, CMat, Tolerance, C64};
use crate::window::{Label, Window, WindowedOp};

/// Boundary sample count used to certify contractivity on construction.
pub const CERTIFY_SAMPLES: usize = 128;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `K`-th roots of unity `exp(2πi j / K)`.
pub fn roots_of_unity(k: usize) -> Vec<C64> {
    (0..k).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64)).collect()
}

/// `c · Π (z − a) / (1 − ā z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerScalar {
    pub zeros: Vec<C64>,
    pub constant: C64,
}

impl InnerScalar {
    pub fn new(zeros: Vec<C64>, constant: C64) -> Result<Self> {
        if let Some(a) = zeros.iter().find(|a| !(a.norm() < 1.0)) {
            return Err(Error::InvalidInput(format!("Blaschke zero {a} is not inside the disk")));
        }
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("unimodular constant has modulus {}", constant.norm())));
        }
        Ok(Self { zeros, constant })
    }

    /// Single factor `(z − a)/(1 − ā z)`.
    pub fn factor(a: C64) -> Result<Self> {
        Self::new(vec![a], one())
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.constant, |acc, a| acc * (z - a) / (one() - a.conj() * z))
    }

    /// First `n` Taylor coefficients, from the expansion
    /// `(z − a)/(1 − āz) = −a + (1 − |a|²) Σ_{k≥1} ā^{k−1} z^k`.
    pub fn series(&self, n: usize) -> Vec<C64> {
        let mut acc = vec![zero(); n];
        if n == 0 {
            return acc;
        }
        acc[0] = self.constant;
        for a in &self.zeros {
            let mut f = vec![zero(); n];
            f[0] = -a;
            let w = 1.0 - a.norm_sqr();
            let mut p = one();
            for c in f.iter_mut().skip(1) {
                *c = p * w;
                p *= a.conj();
            }
            acc = poly_mul_trunc(&acc, &f, n);
        }
        acc
    }

    fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn poly_mul_trunc(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if *x == zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// One matrix entry: `poly(z) · blaschke(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolEntry {
    pub poly: Vec<C64>,
    pub blaschke: Option<InnerScalar>,
}

impl SymbolEntry {
    pub fn constant(v: C64) -> Self {
        Self { poly: vec![v], blaschke: None }
    }

    pub fn poly(coeffs: Vec<C64>) -> Self {
        Self { poly: coeffs, blaschke: None }
    }

    pub fn zero() -> Self {
        Self { poly: Vec::new(), blaschke: None }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let p = self.poly.iter().rev().fold(zero(), |acc, c| acc * z + c);
        match &self.blaschke {
            Some(b) if p != zero() => p * b.eval(z),
            _ => p,
        }
    }

    fn series(&self, n: usize) -> Vec<C64> {
        let mut p: Vec<C64> = self.poly.iter().copied().take(n).collect();
        p.resize(n, zero());
        match &self.blaschke {
            Some(b) if self.poly.iter().any(|c| *c != zero()) => poly_mul_trunc(&p, &b.series(n), n),
            _ => p,
        }
    }

    fn is_polynomial(&self) -> bool {
        self.blaschke.as_ref().is_none_or(|b| b.zeros.iter().all(|a| *a == zero()))
            || self.poly.iter().all(|c| *c == zero())
    }

    fn degree_hint(&self) -> usize {
        let p = self.poly.iter().rposition(|c| *c != zero()).unwrap_or(0);
        p + self.blaschke.as_ref().map_or(0, |b| b.zeros.len())
    }
}

/// A `dim × dim` matrix of [`SymbolEntry`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OpSymbol {
    dim: usize,
    entries: Vec<SymbolEntry>,
}

impl OpSymbol {
    /// Builds the symbol and certifies `max_ζ ‖Θ(ζ)‖ ≤ 1 + 1e-9` on
    /// [`CERTIFY_SAMPLES`] boundary points.
    pub fn new(dim: usize, entries: Vec<SymbolEntry>) -> Result<Self> {
        let s = Self::new_uncertified(dim, entries)?;
        let norm = contractivity_norm(&s, CERTIFY_SAMPLES);
        if norm > 1.0 + 1e-9 {
            return Err(Error::NotContractive(norm));
        }
        Ok(s)
    }

    pub fn new_uncertified(dim: usize, entries: Vec<SymbolEntry>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "symbol of dim {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for e in &entries {
            if let Some(b) = &e.blaschke {
                InnerScalar::new(b.zeros.clone(), b.constant)?;
            }
            if e.poly.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Matrix polynomial `Σ z^k coeffs[k]`.
    pub fn from_coefficients(coeffs: &[CMat]) -> Result<Self> {
        let dim = coeffs.first().map_or(0, |m| m.nrows());
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(SymbolEntry::poly(coeffs.iter().map(|m| m[(i, j)]).collect()));
            }
        }
        Self::new(dim, entries)
    }

    pub fn constant(m: &CMat) -> Result<Self> {
        Self::from_coefficients(std::slice::from_ref(m))
    }

    /// `z^k · I`.
    pub fn monomial_identity(dim: usize, k: usize) -> Result<Self> {
        let mut coeffs = vec![CMat::zeros(dim, dim); k + 1];
        coeffs[k] = linalg::identity(dim);
        Self::from_coefficients(&coeffs)
    }

    /// `φ(z) · I` for a scalar inner function `φ`.
    pub fn inner_scalar_identity(dim: usize, phi: &InnerScalar) -> Result<Self> {
        let entries = (0..dim * dim)
            .map(|k| {
                if k / dim == k % dim {
                    SymbolEntry { poly: vec![one()], blaschke: Some(phi.clone()) }
                } else {
                    SymbolEntry::zero()
                }
            })
            .collect();
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &SymbolEntry {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.iter().all(SymbolEntry::is_polynomial)
    }

    /// Polynomial degree plus the number of Blaschke zeros, over all entries.
    pub fn degree_hint(&self) -> usize {
        self.entries.iter().map(SymbolEntry::degree_hint).max().unwrap_or(0)
    }

    /// Value at `z`, `|z| ≤ 1 + 1e-12`.
    pub fn eval(&self, z: C64) -> Result<CMat> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::OutsideDisk(z.norm()));
        }
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: C64) -> CMat {
        CMat::from_fn(self.dim, self.dim, |i, j| self.entry(i, j).eval(z))
    }

    /// Exact Taylor coefficients `Θ_0 .. Θ_{n-1}` from the power series of
    /// each entry.
    pub fn series(&self, n: usize) -> Vec<CMat> {
        let per_entry: Vec<Vec<C64>> = self.entries.iter().map(|e| e.series(n)).collect();
        (0..n)
            .map(|k| CMat::from_fn(self.dim, self.dim, |i, j| per_entry[i * self.dim + j][k]))
            .collect()
    }

    /// Number of Taylor coefficients needed so that the operator norms of the
    /// neglected coefficients sum to at most `eps`, with that sum.
    pub fn tail_length(&self, eps: f64) -> (usize, f64) {
        let mut n = self.degree_hint() + 1;
        if self.is_polynomial() {
            return (n, 0.0);
        }
        let r = self
            .entries
            .iter()
            .filter_map(|e| e.blaschke.as_ref())
            .map(InnerScalar::max_zero_modulus)
            .fold(0.0, f64::max);
        let horizon = 64.max(((eps.ln() / r.max(1e-3).ln()).ceil() as usize) * 2 + self.degree_hint() + 8);
        let coeffs = self.series(horizon);
        let norms: Vec<f64> = coeffs.iter().map(|m| m.norm()).collect();
        // geometric estimate for the part beyond the horizon
        let beyond = norms.last().copied().unwrap_or(0.0) * r / (1.0 - r).max(1e-12);
        let mut tail = beyond;
        let mut cut = horizon;
        for k in (0..horizon).rev() {
            if tail + norms[k] > eps {
                cut = k + 1;
                break;
            }
            tail += norms[k];
            cut = k;
        }
        n = n.max(cut);
        let t = norms.iter().skip(n).sum::<f64>() + beyond;
        (n, t)
    }
}

/// Taylor coefficients by discrete Fourier averaging over `k` roots of unity.
///
/// Needs `k ≥ 4 (n_max + degree)`; for polynomial symbols the result is exact
/// up to rounding.
pub fn taylor_coefficients(s: &OpSymbol, n_max: usize, k: usize) -> Result<Vec<CMat>> {
    let need = 4 * (n_max + s.degree_hint());
    if k < need.max(1) {
        return Err(Error::TruncationTooSmall(format!("{k} samples, need at least {need}")));
    }
    let pts = roots_of_unity(k);
    let vals: Vec<CMat> = pts.iter().map(|z| s.eval_unchecked(*z)).collect();
    Ok((0..=n_max)
        .map(|m| {
            let mut acc = CMat::zeros(s.dim, s.dim);
            for (z, v) in pts.iter().zip(&vals) {
                acc += v * z.powi(-(m as i32));
            }
            acc / C64::new(k as f64, 0.0)
        })
        .collect())
}

/// `max_ζ ‖Θ(ζ)‖` over `k` roots of unity.
pub fn contractivity_norm(s: &OpSymbol, k: usize) -> f64 {
    roots_of_unity(k.max(1)).iter().map(|z| op_norm(&s.eval_unchecked(*z))).fold(0.0, f64::max)
}

/// Whether `Θ(ζ)*Θ(ζ) = I` within 1e-8 at every sample, with the largest
/// deviation.
pub fn is_inner_sampled(s: &OpSymbol, k: usize) -> (bool, f64) {
    let id = linalg::identity(s.dim);
    let d = roots_of_unity(k.max(8))
        .iter()
        .map(|z| {
            let t = s.eval_unchecked(*z);
            op_norm(&(t.adjoint() * t - &id))
        })
        .fold(0.0, f64::max);
    (d <= 1e-8, d)
}

/// `Δ(ζ) = (I − Θ(ζ)*Θ(ζ))^{1/2}` at roots of unity.
#[derive(Debug, Clone)]
pub struct BoundaryDefect {
    pub dim: usize,
    pub samples: Vec<(C64, CMat)>,
}

pub fn boundary_defect(s: &OpSymbol, k: usize) -> Result<BoundaryDefect> {
    if k < 8 {
        return Err(Error::TruncationTooSmall(format!("boundary defect needs K >= 8, got {k}")));
    }
    let id = linalg::identity(s.dim);
    let tol = Tolerance::default();
    let mut samples = Vec::with_capacity(k);
    for z in roots_of_unity(k) {
        let t = s.eval_unchecked(z);
        let n = op_norm(&t);
        if n > 1.0 + 1e-6 {
            return Err(Error::NotContractive(n));
        }
        let m = &id - t.adjoint() * &t;
        let m = (&m + m.adjoint()).scale(0.5);
        // contractivity within 1e-6 may leave eigenvalues slightly below zero
        let d = linalg::hermitian_sqrt(&m, Tolerance { rank_tol: 1e-6, ..tol })?;
        samples.push((z, d));
    }
    Ok(BoundaryDefect { dim: s.dim, samples })
}

/// Symbols with two-sided Fourier coefficients on the circle.
pub trait FourierSymbol {
    fn fiber_dim(&self) -> usize;
    /// Coefficient of `ζ^m`.
    fn fourier_coefficient(&self, m: i64) -> CMat;
    /// Bound on the coefficient mass a grade window of half-width `n` misses.
    fn fourier_tail(&self, n: i64) -> f64;
}

impl FourierSymbol for OpSymbol {
    fn fiber_dim(&self) -> usize {
        self.dim
    }

    fn fourier_coefficient(&self, m: i64) -> CMat {
        if m < 0 {
            return CMat::zeros(self.dim, self.dim);
        }
        self.series(m as usize + 1).pop().expect("nonempty series")
    }

    fn fourier_tail(&self, n: i64) -> f64 {
        if self.is_polynomial() {
            return 0.0;
        }
        let n = n.max(0) as usize;
        let (len, tail) = self.tail_length(1e-15);
        if len <= n {
            return tail;
        }
        self.series(len).iter().skip(n).map(op_norm).sum::<f64>() + tail
    }
}

impl FourierSymbol for BoundaryDefect {
    fn fiber_dim(&self) -> usize {
        self.dim
    }

    fn fourier_coefficient(&self, m: i64) -> CMat {
        let k = self.samples.len() as f64;
        let mut acc = CMat::zeros(self.dim, self.dim);
        for (z, d) in &self.samples {
            acc += d * z.powi(-(m as i32));
        }
        acc / C64::new(k, 0.0)
    }

    /// Mass of the resolvable coefficients with `|m| > n`; aliasing beyond
    /// `K/2` is not resolvable from the samples.
    fn fourier_tail(&self, n: i64) -> f64 {
        let half = (self.samples.len() / 2) as i64;
        ((n + 1)..=half)
            .map(|m| op_norm(&self.fourier_coefficient(m)) + op_norm(&self.fourier_coefficient(-m)))
            .sum()
    }
}

/// Lower-triangular block Toeplitz matrix of `T_Θ` from grades `0..=n` into
/// grades `0..=n + L`, where `L` covers the Taylor tail down to 1e-15.
pub fn toeplitz_matrix(s: &OpSymbol, n: i64) -> Result<WindowedOp> {
    if n < 0 {
        return Err(Error::TruncationTooSmall(format!("grade bound {n} is negative")));
    }
    let (len, tail) = s.tail_length(1e-15);
    let coeffs = s.series(len);
    let d = s.dim;
    let dom = Window::graded(0, n, d);
    let cod = Window::graded(0, n + len as i64 - 1, d);
    let mut m = CMat::zeros(cod.len(), dom.len());
    for g in 0..=n {
        for (k, ck) in coeffs.iter().enumerate() {
            let r0 = ((g + k as i64) as usize) * d;
            let c0 = (g as usize) * d;
            m.view_mut((r0, c0), (d, d)).copy_from(ck);
        }
    }
    let adj = cod.filter(|l| l.grade <= n);
    WindowedOp::new(dom.clone(), cod, m, dom, adj, tail)
}

/// Bilateral block Toeplitz matrix `[c_{g'−g}]` on grades `-n..=n`.
pub fn laurent_matrix<S: FourierSymbol>(s: &S, n: i64) -> Result<WindowedOp> {
    if n < 0 {
        return Err(Error::TruncationTooSmall(format!("grade bound {n} is negative")));
    }
    let d = s.fiber_dim();
    let w = Window::graded(-n, n, d);
    let coeffs: Vec<CMat> = (-2 * n..=2 * n).map(|m| s.fourier_coefficient(m)).collect();
    let mut m = CMat::zeros(w.len(), w.len());
    for gi in -n..=n {
        for gj in -n..=n {
            let c = &coeffs[(gi - gj + 2 * n) as usize];
            let r0 = ((gi + n) as usize) * d;
            let c0 = ((gj + n) as usize) * d;
            m.view_mut((r0, c0), (d, d)).copy_from(c);
        }
    }
    let tail = s.fourier_tail(n);
    WindowedOp::new(w.clone(), w.clone(), m, w.clone(), w, tail)
}

/// The `n × n` truncation of the ℓ² example whose first column is
/// `(3φ/5, 4z/5, 0, ...)` and whose remaining columns shift the fiber
/// coordinates down by one.
///
/// To keep the truncation inner, the last column is completed by the unit
/// vector `(4φ/5, −3z/5, 0, ...)`, which is orthogonal to the first column on
/// the circle. Requires `n ≥ 3`.
pub fn shifted_example_symbol(n: usize, phi: &InnerScalar) -> Result<OpSymbol> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("example truncation needs n >= 3, got {n}")));
    }
    let mut entries = vec![SymbolEntry::zero(); n * n];
    let set = |e: &mut Vec<SymbolEntry>, i: usize, j: usize, v: SymbolEntry| e[i * n + j] = v;
    set(&mut entries, 0, 0, SymbolEntry { poly: vec![C64::new(0.6, 0.0)], blaschke: Some(phi.clone()) });
    set(&mut entries, 1, 0, SymbolEntry::poly(vec![zero(), C64::new(0.8, 0.0)]));
    for j in 1..n - 1 {
        set(&mut entries, j + 1, j, SymbolEntry::constant(one()));
    }
    set(&mut entries, 0, n - 1, SymbolEntry { poly: vec![C64::new(0.8, 0.0)], blaschke: Some(phi.clone()) });
    set(&mut entries, 1, n - 1, SymbolEntry::poly(vec![zero(), C64::new(-0.6, 0.0)]));
    OpSymbol::new(n, entries)
}

/// Left inverse `Ω(z)` of [`shifted_example_symbol`] at `z ≠ 0`:
/// first row `(5/(3φ(0)), η(z), 0, ...)` with `η(z) = 5/(4z)·(1 − φ(z)/φ(0))`,
/// then rows `e_{k+1}^T`.
pub fn shifted_example_left_inverse(n: usize, phi: &InnerScalar, z: C64) -> Result<CMat> {
    if z.norm() == 0.0 {
        return Err(Error::InvalidInput("left inverse formula is evaluated away from 0".into()));
    }
    let phi0 = phi.eval(zero());
    if phi0.norm() == 0.0 {
        return Err(Error::InvalidInput("φ(0) must be nonzero".into()));
    }
    let eta = C64::new(1.25, 0.0) / z * (one() - phi.eval(z) / phi0);
    Ok(example_left_inverse_with(n, phi0, eta))
}

/// Same matrix pattern with an arbitrary `η` value.
pub fn example_left_inverse_with(n: usize, phi0: C64, eta: C64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(0, 0)] = C64::new(5.0 / 3.0, 0.0) / phi0;
    m[(0, 1)] = eta;
    for k in 1..n - 1 {
        m[(k, k + 1)] = one();
    }
    m
}

// ---- serialization ------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlaschkeDoc {
    pub zeros: Vec<[f64; 2]>,
    pub constant: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDoc {
    #[serde(default)]
    pub poly: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blaschke: Option<BlaschkeDoc>,
}

/// `{dim, entries: [[{poly, blaschke}]]}` with complex numbers as `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub dim: usize,
    pub entries: Vec<Vec<EntryDoc>>,
}

pub fn cpx(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl TryFrom<&SymbolDoc> for OpSymbol {
    type Error = Error;

    fn try_from(doc: &SymbolDoc) -> Result<Self> {
        if doc.entries.len() != doc.dim || doc.entries.iter().any(|r| r.len() != doc.dim) {
            return Err(Error::Parse(format!("entries must be a {0}x{0} grid", doc.dim)));
        }
        let mut entries = Vec::with_capacity(doc.dim * doc.dim);
        for row in &doc.entries {
            for e in row {
                let blaschke = match &e.blaschke {
                    Some(b) => Some(InnerScalar::new(b.zeros.iter().map(|z| cpx(*z)).collect(), cpx(b.constant))?),
                    None => None,
                };
                entries.push(SymbolEntry { poly: e.poly.iter().map(|z| cpx(*z)).collect(), blaschke });
            }
        }
        OpSymbol::new(doc.dim, entries)
    }
}

impl From<&OpSymbol> for SymbolDoc {
    fn from(s: &OpSymbol) -> Self {
        let entries = (0..s.dim)
            .map(|i| {
                (0..s.dim)
                    .map(|j| {
                        let e = s.entry(i, j);
                        EntryDoc {
                            poly: e.poly.iter().map(|z| pair(*z)).collect(),
                            blaschke: e.blaschke.as_ref().map(|b| BlaschkeDoc {
                                zeros: b.zeros.iter().map(|z| pair(*z)).collect(),
                                constant: pair(b.constant),
                            }),
                        }
                    })
                    .collect()
            })
            .collect();
        SymbolDoc { dim: s.dim, entries }
    }
}

pub fn symbol_from_json(text: &str) -> Result<OpSymbol> {
    let doc: SymbolDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    OpSymbol::try_from(&doc)
}

pub fn symbol_to_json(s: &OpSymbol) -> String {
    serde_json::to_string_pretty(&SymbolDoc::from(s)).expect("symbol documents serialize")
}

/// Basis label helper for H²(𝔈) windows.
pub fn hardy_label(grade: i64, fiber: usize) -> Label {
    Label::new(grade, fiber)
}

//! Eventually periodic subsets of ℤ, staircase subsets of ℤ², and the
//! bi-isometries they determine.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bcl::{bcl_compression_from_biisometry, bcl_in_defect_coordinates, BclPair};
use crate::error::{Error, Result};
use crate::linalg::{self, intertwiner_space_dim, op_norm, CMat, Tolerance, C64};
use crate::window::{BiIsometry, Label, Window, WindowedOp};

/// Behaviour of a set outside its core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    AllIn,
    AllOut,
    /// `member(n) = pattern[(n − core_lo) mod len]`.
    Periodic(Vec<bool>),
}

impl Tail {
    fn period(&self) -> usize {
        match self {
            Tail::Periodic(p) => p.len(),
            _ => 1,
        }
    }

    fn at(&self, offset: i64) -> bool {
        match self {
            Tail::AllIn => true,
            Tail::AllOut => false,
            Tail::Periodic(p) => p[offset.rem_euclid(p.len() as i64) as usize],
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `core ∪ tails`, with the core covering `core_lo..=core_hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSet {
    core_lo: i64,
    core_hi: i64,
    mask: Vec<bool>,
    left: Tail,
    right: Tail,
}

impl ZSet {
    pub fn new(core_lo: i64, core_hi: i64, mask: Vec<bool>, left: Tail, right: Tail) -> Result<Self> {
        let width = core_hi - core_lo + 1;
        if width < 0 || mask.len() as i64 != width {
            return Err(Error::InvalidInput(format!(
                "core {core_lo}..={core_hi} needs a mask of length {}, got {}",
                width.max(0),
                mask.len()
            )));
        }
        for t in [&left, &right] {
            if matches!(t, Tail::Periodic(p) if p.is_empty()) {
                return Err(Error::InvalidInput("periodic tail pattern is empty".into()));
            }
        }
        Ok(Self { core_lo, core_hi, mask, left, right })
    }

    /// `{n : pattern[(n − offset) mod p]}`.
    pub fn periodic(pattern: Vec<bool>, offset: i64) -> Result<Self> {
        Self::new(offset, offset - 1, Vec::new(), Tail::Periodic(pattern.clone()), Tail::Periodic(pattern))
    }

    /// `kℤ + r`.
    pub fn multiples(k: usize, r: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        let mut p = vec![false; k];
        p[0] = true;
        Self::periodic(p, r)
    }

    /// `{n : n ≥ start}`.
    pub fn from(start: i64) -> Self {
        Self::new(start, start - 1, Vec::new(), Tail::AllOut, Tail::AllIn).expect("empty core")
    }

    /// `{n : n < end}`.
    pub fn below(end: i64) -> Self {
        Self::new(end, end - 1, Vec::new(), Tail::AllIn, Tail::AllOut).expect("empty core")
    }

    pub fn finite(members: &[i64]) -> Self {
        let lo = members.iter().copied().min().unwrap_or(0);
        let hi = members.iter().copied().max().unwrap_or(-1);
        let mask = (lo..=hi).map(|n| members.contains(&n)).collect();
        Self::new(lo, hi, mask, Tail::AllOut, Tail::AllOut).expect("consistent core")
    }

    pub fn core(&self) -> (i64, i64) {
        (self.core_lo, self.core_hi)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn tails(&self) -> (&Tail, &Tail) {
        (&self.left, &self.right)
    }

    pub fn contains(&self, n: i64) -> bool {
        if n < self.core_lo {
            self.left.at(n - self.core_lo)
        } else if n > self.core_hi {
            self.right.at(n - self.core_lo)
        } else {
            self.mask[(n - self.core_lo) as usize]
        }
    }

    /// `A + n`.
    pub fn translate(&self, n: i64) -> Self {
        Self { core_lo: self.core_lo + n, core_hi: self.core_hi + n, ..self.clone() }
    }

    fn tail_lcm(&self) -> usize {
        lcm(self.left.period(), self.right.period())
    }

    /// Setwise equality, decided on a range long enough for both
    /// eventually periodic tails.
    pub fn set_eq(&self, other: &ZSet) -> bool {
        let p = lcm(self.tail_lcm(), other.tail_lcm()) as i64;
        let lo = self.core_lo.min(other.core_lo) - p - 1;
        let hi = self.core_hi.max(other.core_hi) + p + 1;
        (lo..=hi).all(|n| self.contains(n) == other.contains(n))
    }

    pub fn minimal_period(&self) -> Option<usize> {
        (1..=self.tail_lcm()).find(|&n| self.set_eq(&self.translate(n as i64)))
    }

    pub fn is_irreducible(&self) -> bool {
        self.minimal_period().is_none()
    }

    /// Some `n` with `other = self + n`, smallest `|n|` first (ties to the
    /// positive shift).
    pub fn translate_equivalent(&self, other: &ZSet) -> Option<i64> {
        let extent = |z: &ZSet| z.core_lo.abs().max(z.core_hi.abs());
        let p = lcm(self.tail_lcm(), other.tail_lcm()) as i64;
        let r = extent(self) + extent(other) + 2 * p + 2;
        (0..=r).flat_map(|k| [k, -k]).find(|&n| self.translate(n).set_eq(other))
    }

    /// Membership string on `lo..=hi`.
    pub fn render(&self, lo: i64, hi: i64) -> String {
        (lo..=hi).map(|n| if self.contains(n) { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for ZSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.tail_lcm() as i64;
        write!(f, "…{}…", self.render(self.core_lo - p, self.core_hi + p))
    }
}

/// `(U, Q_A)` on labels `lo..=hi`, with `U e_n = e_{n+1}` closed cyclically
/// at the window edge.
#[derive(Debug, Clone)]
pub struct WindowedPair {
    pub pair: BclPair,
    pub lo: i64,
    pub hi: i64,
}

pub fn zset_to_bcl(a: &ZSet, lo: i64, hi: i64) -> Result<WindowedPair> {
    if hi - lo < 1 || lo > a.core_lo || hi < a.core_hi {
        return Err(Error::TruncationTooSmall(format!(
            "window {lo}..={hi} must have two labels and cover the core {}..={}",
            a.core_lo, a.core_hi
        )));
    }
    let n = (hi - lo + 1) as usize;
    let flags: Vec<bool> = (lo..=hi).map(|k| a.contains(k)).collect();
    let pair = BclPair::with_flags(cyclic_shift(n), &flags)?;
    Ok(WindowedPair { pair, lo, hi })
}

/// `e_k ↦ e_{k+1 mod n}`.
pub fn cyclic_shift(n: usize) -> CMat {
    let mut u = CMat::zeros(n, n);
    for k in 0..n {
        u[((k + 1) % n, k)] = C64::new(1.0, 0.0);
    }
    u
}

/// Boundary step `γ_{n+1} − γ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// `(1, 0)`.
    H,
    /// `(0, −1)`.
    V,
}

impl Step {
    fn delta(self) -> (i64, i64) {
        match self {
            Step::H => (1, 0),
            Step::V => (0, -1),
        }
    }

    fn from_bool(vertical: bool) -> Self {
        if vertical {
            Step::V
        } else {
            Step::H
        }
    }
}

/// A set `Γ ⊂ ℤ²` with `Γ + ℕ² ⊂ Γ`, stored through its boundary path:
/// `γ` at index `i − j` of the anchor is the anchor, and the steps are
/// membership in `A_Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase {
    anchor: (i64, i64),
    steps: ZSet,
}

impl Staircase {
    /// `steps` is the vertical-step set `A_Γ`.
    pub fn new(anchor: (i64, i64), steps: ZSet) -> Self {
        Self { anchor, steps }
    }

    /// `ℕ²`.
    pub fn quadrant() -> Self {
        Self::new((0, 0), ZSet::below(0))
    }

    /// `(ℤ × ℕ) ∪ (ℕ × ℤ)`.
    pub fn cross() -> Self {
        Self::new((0, 0), ZSet::from(0))
    }

    pub fn anchor(&self) -> (i64, i64) {
        self.anchor
    }

    pub fn anchor_index(&self) -> i64 {
        self.anchor.0 - self.anchor.1
    }

    pub fn step(&self, n: i64) -> Step {
        Step::from_bool(self.steps.contains(n))
    }

    /// `γ_n`, the boundary point on the diagonal `i − j = n`.
    pub fn gamma(&self, n: i64) -> (i64, i64) {
        let (mut i, mut j) = self.anchor;
        let a = self.anchor_index();
        if n >= a {
            for m in a..n {
                let (di, dj) = self.step(m).delta();
                i += di;
                j += dj;
            }
        } else {
            for m in (n..a).rev() {
                let (di, dj) = self.step(m).delta();
                i -= di;
                j -= dj;
            }
        }
        (i, j)
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= self.gamma(i - j).0
    }

    /// `Γ + (p, q)`.
    pub fn translate(&self, p: i64, q: i64) -> Self {
        Self { anchor: (self.anchor.0 + p, self.anchor.1 + q), steps: self.steps.translate(p - q) }
    }
}

pub fn staircase_to_zset(g: &Staircase) -> ZSet {
    g.steps.clone()
}

/// Staircase with `γ_0 = (0, 0)` and `A_Γ = a`.
pub fn zset_to_staircase(a: &ZSet) -> Staircase {
    Staircase::new((0, 0), a.clone())
}

/// `Γ` shifted along the diagonal by `γ` is `Γ + γ`; periodic `A_Γ` is the
/// combinatorial form of `Γ = Γ + γ` for some `γ ≠ 0`.
pub fn staircase_self_translation(g: &Staircase) -> Option<(i64, i64)> {
    let p = g.steps.minimal_period()? as i64;
    Some((p, 0))
}

/// `(V₀, V₁)` restricted to `span{e_ij : (i,j) ∈ Γ}` on the labels
/// `γ_n + k(1,1)`, `|n − anchor| ≤ w`, `0 ≤ k ≤ k_max`.
///
/// Labels carry `grade = k` and `fiber = n − anchor + w`. The interior keeps
/// one diagonal of margin on each side and drops the top grade.
pub fn staircase_restriction_biisometry(g: &Staircase, w: i64, k_max: i64) -> Result<BiIsometry> {
    if w < 2 || k_max < 2 {
        return Err(Error::TruncationTooSmall(format!("staircase window needs w >= 2 and k_max >= 2, got {w}, {k_max}")));
    }
    let a = g.anchor_index();
    let fibers = (2 * w + 1) as usize;
    let win = Window::graded(0, k_max, fibers);
    let len = win.len();
    let pos = |n: i64, k: i64| -> Option<usize> {
        if (n - a).abs() > w || k < 0 || k > k_max {
            return None;
        }
        win.position(&Label::new(k, (n - a + w) as usize))
    };
    let mut v0 = CMat::zeros(len, len);
    let mut v1 = CMat::zeros(len, len);
    for n in a - w..=a + w {
        for k in 0..=k_max {
            let c = pos(n, k).expect("label in window");
            let k0 = k + i64::from(g.step(n) == Step::V);
            if let Some(r) = pos(n + 1, k0) {
                v0[(r, c)] = C64::new(1.0, 0.0);
            }
            let k1 = k + i64::from(g.step(n - 1) == Step::H);
            if let Some(r) = pos(n - 1, k1) {
                v1[(r, c)] = C64::new(1.0, 0.0);
            }
        }
    }
    let interior = win.filter(|l| l.grade < k_max && l.fiber >= 1 && l.fiber + 1 < fibers);
    let adj0 = win.filter(|l| l.fiber >= 1);
    let adj1 = win.filter(|l| l.fiber + 1 < fibers);
    let op0 = WindowedOp::new(win.clone(), win.clone(), v0, interior.clone(), adj0, 0.0)?;
    let op1 = WindowedOp::new(win.clone(), win.clone(), v1, interior.clone(), adj1, 0.0)?;
    BiIsometry::new(op0, op1, interior, Tolerance::default())
}

/// Same operators with the interior cut down to `keep`.
pub fn shrink_interior(b: &BiIsometry, keep: impl Fn(&Label) -> bool) -> Result<BiIsometry> {
    BiIsometry::new_unchecked(b.w0.clone(), b.w1.clone(), b.interior.filter(keep))
}

/// Compares `(U, P)` read off the staircase restriction (in the boundary
/// basis `e_{γ_n}`) with `(U, U Q_A U*)` from [`zset_to_bcl`], on labels at
/// least `margin` away from both window edges. Returns the largest entry
/// difference.
pub fn staircase_bcl_residual(g: &Staircase, w: i64, k_max: i64, margin: i64) -> Result<f64> {
    let tol = Tolerance::default();
    let b = staircase_restriction_biisometry(g, w, k_max)?;
    let ex = bcl_compression_from_biisometry(&b, tol)?;
    let (c, u, p) = bcl_in_defect_coordinates(&b, &ex, tol);
    // each canonical column is a coordinate vector e_{γ_n}
    let a = g.anchor_index();
    let mut labels = Vec::with_capacity(c.ncols());
    for col in 0..c.ncols() {
        let column = c.column(col);
        let (idx, v) = column.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).expect("nonempty");
        if (v.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Verification("defect space is not spanned by boundary vectors".into()));
        }
        let l = b.window().labels()[idx];
        if l.grade != 0 {
            return Err(Error::Verification(format!("defect vector at grade {} off the boundary", l.grade)));
        }
        labels.push(l.fiber as i64 - w + a);
    }
    let lo = a - w;
    let hi = a + w;
    let z = zset_to_bcl(&staircase_to_zset(g), lo.min(g.steps.core().0), hi.max(g.steps.core().1))?;
    let zp = &z.pair.u * &z.pair.p * z.pair.u.adjoint();
    let zi = |n: i64| (n - z.lo) as usize;
    let mut worst = 0.0f64;
    for (ci, &ni) in labels.iter().enumerate() {
        for (cj, &nj) in labels.iter().enumerate() {
            let inside = |n: i64| n >= lo + margin && n <= hi - margin;
            if !inside(ni) || !inside(nj) {
                continue;
            }
            worst = worst.max((u[(ci, cj)] - z.pair.u[(zi(ni), zi(nj))]).norm());
            worst = worst.max((p[(ci, cj)] - zp[(zi(ni), zi(nj))]).norm());
        }
    }
    Ok(worst)
}

/// `U₀(ζ)` with first row `ζ^{n−1}` in the last column and subdiagonal
/// `1, ζ, ..., ζ^{n−2}`, and `P₀ = diag(α_0, ..., α_{n−1})` with
/// `α_i = 1` iff `i ∈ A`.
pub fn direct_integral_factor(a: &ZSet, zeta: C64) -> Result<(CMat, CMat)> {
    let n = a.minimal_period().ok_or(Error::Aperiodic)?;
    direct_integral_factor_with_period(a, n, zeta)
}

/// As [`direct_integral_factor`] for any period `n` of `A`, not necessarily
/// the smallest one.
pub fn direct_integral_factor_with_period(a: &ZSet, n: usize, zeta: C64) -> Result<(CMat, CMat)> {
    if n == 0 || !a.set_eq(&a.translate(n as i64)) {
        return Err(Error::InvalidInput(format!("{n} is not a period of the set")));
    }
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("ζ must be unimodular, |ζ| = {}", zeta.norm())));
    }
    let mut u = CMat::zeros(n, n);
    if n == 1 {
        u[(0, 0)] = zeta;
    } else {
        u[(0, n - 1)] = zeta.powi(n as i32 - 1);
        for k in 1..n {
            u[(k, k - 1)] = zeta.powi(k as i32 - 1);
        }
    }
    let p = linalg::diag_real(&(0..n as i64).map(|i| if a.contains(i) { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    Ok((u, p))
}

/// `dim {X : XU = UX, XP = PX}`.
pub fn commutant_dimension(u: &CMat, p: &CMat) -> usize {
    intertwiner_space_dim(&[(u.clone(), u.clone()), (p.clone(), p.clone())], Tolerance::default())
}

/// Largest entry of `U₀(ζ)*U₀(ζ) − I`.
pub fn factor_unitarity_defect(u: &CMat) -> f64 {
    op_norm(&(u.adjoint() * u - linalg::identity(u.nrows())))
}

// ---- serialization ------------------------------------------------------

fn parse_bits(s: &str, one: char, zero: char) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            c if c == one => Ok(true),
            c if c == zero => Ok(false),
            other => Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
        })
        .collect()
}

fn render_bits(bits: &[bool], one: char, zero: char) -> String {
    bits.iter().map(|&b| if b { one } else { zero }).collect()
}

fn parse_tail(s: &str, all_in: &str, all_out: &str, one: char, zero: char) -> Result<Tail> {
    if s == all_in {
        Ok(Tail::AllIn)
    } else if s == all_out {
        Ok(Tail::AllOut)
    } else if let Some(p) = s.strip_prefix("periodic:") {
        let bits = parse_bits(p, one, zero)?;
        if bits.is_empty() {
            return Err(Error::Parse("periodic tail pattern is empty".into()));
        }
        Ok(Tail::Periodic(bits))
    } else {
        Err(Error::Parse(format!("unknown tail {s:?}")))
    }
}

fn render_tail(t: &Tail, all_in: &str, all_out: &str, one: char, zero: char) -> String {
    match t {
        Tail::AllIn => all_in.to_string(),
        Tail::AllOut => all_out.to_string(),
        Tail::Periodic(p) => format!("periodic:{}", render_bits(p, one, zero)),
    }
}

/// `{core_lo, core_hi, mask: "0101", left, right}` with tails
/// `all_in | all_out | periodic:<bits>`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZSetDoc {
    pub core_lo: i64,
    pub core_hi: i64,
    pub mask: String,
    pub left: String,
    pub right: String,
}

impl TryFrom<&ZSetDoc> for ZSet {
    type Error = Error;

    fn try_from(d: &ZSetDoc) -> Result<Self> {
        let tail = |s: &str| parse_tail(s, "all_in", "all_out", '1', '0');
        ZSet::new(d.core_lo, d.core_hi, parse_bits(&d.mask, '1', '0')?, tail(&d.left)?, tail(&d.right)?)
    }
}

impl From<&ZSet> for ZSetDoc {
    fn from(z: &ZSet) -> Self {
        let tail = |t: &Tail| render_tail(t, "all_in", "all_out", '1', '0');
        ZSetDoc {
            core_lo: z.core_lo,
            core_hi: z.core_hi,
            mask: render_bits(&z.mask, '1', '0'),
            left: tail(&z.left),
            right: tail(&z.right),
        }
    }
}

/// `{anchor: [i, j], steps_lo, steps: "HVV", left, right}` with tails
/// `all_v | all_h | periodic:<HV string>`; step `k` of the string is the
/// step at index `steps_lo + k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StaircaseDoc {
    pub anchor: [i64; 2],
    pub steps_lo: i64,
    pub steps: String,
    pub left: String,
    pub right: String,
}

impl TryFrom<&StaircaseDoc> for Staircase {
    type Error = Error;

    fn try_from(d: &StaircaseDoc) -> Result<Self> {
        let tail = |s: &str| parse_tail(s, "all_v", "all_h", 'V', 'H');
        let bits = parse_bits(&d.steps, 'V', 'H')?;
        let hi = d.steps_lo + bits.len() as i64 - 1;
        let z = ZSet::new(d.steps_lo, hi, bits, tail(&d.left)?, tail(&d.right)?)?;
        Ok(Staircase::new((d.anchor[0], d.anchor[1]), z))
    }
}

impl From<&Staircase> for StaircaseDoc {
    fn from(g: &Staircase) -> Self {
        let tail = |t: &Tail| render_tail(t, "all_v", "all_h", 'V', 'H');
        let (lo, _) = g.steps.core();
        StaircaseDoc {
            anchor: [g.anchor.0, g.anchor.1],
            steps_lo: lo,
            steps: render_bits(g.steps.mask(), 'V', 'H'),
            left: tail(&g.steps.left),
            right: tail(&g.steps.right),
        }
    }
}

pub fn zset_from_json(text: &str) -> Result<ZSet> {
    let d: ZSetDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    ZSet::try_from(&d)
}

pub fn zset_to_json(z: &ZSet) -> String {
    serde_json::to_string_pretty(&ZSetDoc::from(z)).expect("zset documents serialize")
}

pub fn staircase_from_json(text: &str) -> Result<Staircase> {
    let d: StaircaseDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Staircase::try_from(&d)
}

pub fn staircase_to_json(g: &Staircase) -> String {
    serde_json::to_string_pretty(&StaircaseDoc::from(g)).expect("staircase documents serialize")
}

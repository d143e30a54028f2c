//! Wold decomposition of `S ⊕ Q` and the four-space split of a pair built
//! from four known blocks.

use biiso::lattice::cyclic_shift;
use biiso::linalg::{random_unitary, seeded_rng, Tolerance};
use biiso::window::{fiberwise_operator, shift_operator, BiIsometry, Label, Window, WindowedOp};
use biiso::wold::{default_depth, four_space_decomposition, reducing_defect, wold_projector_of_interior, wold_single};

pub fn run() -> biiso::Result<()> {
    let tol = Tolerance::default();
    let mut rng = seeded_rng(42);

    // S on grades 0..=10 next to a 3x3 unitary
    let s = shift_operator(1, 10)?;
    let q = random_unitary(&mut rng, 3);
    let qw = Window::new((0..3).map(|i| Label::new(0, 1 + i)).collect())?;
    let qop = WindowedOp::finite(qw.clone(), q)?;
    let a = BiIsometry::new_unchecked(s.clone(), s, Window::graded(0, 9, 1))?;
    let b = BiIsometry::new_unchecked(qop.clone(), qop, qw)?;
    let sum = a.direct_sum(&b)?;
    let r = wold_single(&sum.w0, &sum.interior, default_depth(&sum.interior), tol)?;
    let p = wold_projector_of_interior(&sum.w0, &sum.interior)?;
    println!(
        "S ⊕ Q: wandering {}, shift part {}, unitary part {}, completeness defect {:.1e}",
        r.wandering.ncols(),
        r.shift_part.ncols(),
        r.unitary_part.ncols(),
        r.completeness_defect(&p)
    );

    // (S, S), (S, I⊗Q), (I⊗Q, S), (C, C) side by side
    let n = 8;
    let s1 = shift_operator(1, n)?;
    let s2 = shift_operator(2, n)?;
    let g2 = Window::graded(0, n, 2);
    let inner2 = Window::graded(0, n - 1, 2);
    let q2 = fiberwise_operator(&g2, &random_unitary(&mut rng, 2))?;
    let c = WindowedOp::finite(Window::graded(0, 4, 1), cyclic_shift(5))?;
    let blocks = [
        BiIsometry::new(s1.clone(), s1, Window::graded(0, n - 1, 1), tol)?,
        BiIsometry::new(s2.clone(), q2.clone(), inner2.clone(), tol)?,
        BiIsometry::new(q2, s2, inner2, tol)?,
        BiIsometry::new(c.clone(), c.clone(), c.domain.clone(), tol)?,
    ];
    let mut w = blocks[0].clone();
    for blk in &blocks[1..] {
        w = w.direct_sum(blk)?;
    }
    let fs = four_space_decomposition(&w, default_depth(&w.interior), tol)?;
    let worst = fs.blocks().iter().map(|b| reducing_defect(&w, b)).collect::<biiso::Result<Vec<_>>>()?;
    println!("four spaces (K00, K01, K10, K11): {:?}", fs.dims());
    println!("largest reducing defect: {:.1e}", worst.iter().fold(0.0f64, |a, b| a.max(*b)));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("wold example");
}

//! `(U, P)` pairs: extraction from a bi-isometry, the model built from a
//! pair, the symbol route, and equivalence certificates.

use biiso::bcl::{
    bcl_from_biisometry, bcl_from_symbol, biisometry_from_bcl, pair_equivalence, witness_residual, BclPair, Equivalence,
    DEFAULT_WORD_LEN,
};
use biiso::lattice::cyclic_shift;
use biiso::linalg::{random_unitary, seeded_rng, Tolerance, C64};
use biiso::model::{build_model_biisometry, kernel_capture_depth};
use biiso::symbol::{shifted_example_symbol, InnerScalar, OpSymbol};

fn describe(a: &BclPair, b: &BclPair, tol: Tolerance) -> biiso::Result<String> {
    Ok(match pair_equivalence(a, b, DEFAULT_WORD_LEN, tol)? {
        Equivalence::Equivalent(x) => format!("equivalent, witness residual {:.1e}", witness_residual(a, b, &x)),
        Equivalence::Inequivalent(why) => format!("inequivalent ({why})"),
        Equivalence::Undecided => "undecided".into(),
    })
}

pub fn run() -> biiso::Result<()> {
    let tol = Tolerance::default();

    // round trip through H²(𝔇)
    let pair = BclPair::with_flags(cyclic_shift(3), &[true, false, false])?;
    let w = biisometry_from_bcl(&pair, 8)?;
    let ex = bcl_from_biisometry(&w, tol)?;
    println!("split (dim 𝔈, dim 𝔉) = {:?}, projector identity {:.1e}", ex.pair.split(), ex.decomposition_residual);
    println!("round trip: {}", describe(&pair, &ex.pair, tol)?);

    // a unitary change of basis inside each block is invisible
    let mut rng = seeded_rng(42);
    let v = random_unitary(&mut rng, 2);
    let mut x = biiso::linalg::identity(3);
    x.view_mut((1, 1), (2, 2)).copy_from(&v);
    let moved = BclPair::new(&x * &pair.u * x.adjoint(), pair.p.clone())?;
    println!("conjugated pair: {}", describe(&pair, &moved, tol)?);
    let other = BclPair::with_flags(cyclic_shift(3), &[true, true, false])?;
    println!("different rank of P: {}", describe(&pair, &other, tol)?);

    // symbol route against extraction from the model
    let phi = InnerScalar::factor(C64::new(-0.5, 0.0))?;
    for (name, theta) in [
        ("z²", OpSymbol::monomial_identity(1, 2)?),
        ("shifted example 3x3", shifted_example_symbol(3, &phi)?),
    ] {
        // Blaschke entries need a deeper window before ker W₁* is resolved
        let n = kernel_capture_depth(&theta).max(8);
        let m = build_model_biisometry(&theta, n, 64)?;
        let direct = bcl_from_symbol(&m, tol)?;
        let read = bcl_from_biisometry(&m.biiso, tol)?.pair;
        println!("{name} at N = {n}: pair dim {}, routes {}", direct.dim(), describe(&direct, &read, tol)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("bcl example");
}

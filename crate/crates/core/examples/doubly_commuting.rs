//! Doubly commuting models: the commutator test, constancy of `Θ`, and
//! both pivotal operators, on a few symbols.

use biiso::linalg::{c, diag_real, identity, random_unitary, seeded_rng, CMat, Tolerance};
use biiso::model::{bishift_test, build_model_biisometry, double_report};
use biiso::symbol::{InnerScalar, OpSymbol};

pub fn run() -> biiso::Result<()> {
    let tol = Tolerance::default();
    let mut rng = seeded_rng(42);
    let mut jordan = CMat::zeros(3, 3);
    jordan[(0, 1)] = c(1.0, 0.0);
    jordan[(1, 2)] = c(1.0, 0.0);
    let cases = [
        ("I", OpSymbol::constant(&identity(2))?),
        ("unitary", OpSymbol::constant(&random_unitary(&mut rng, 2))?),
        ("z", OpSymbol::monomial_identity(1, 1)?),
        ("jordan", OpSymbol::constant(&jordan)?),
        ("half", OpSymbol::constant(&diag_real(&[0.5]))?),
        ("blaschke", OpSymbol::inner_scalar_identity(1, &InnerScalar::factor(c(0.5, 0.0))?)?),
    ];
    println!("{:<10} {:>8} {:>9} {:>9} {:>9}", "symbol", "doubly", "constant", "swapped", "pivotal");
    for (name, theta) in &cases {
        let m = build_model_biisometry(theta, 8, 64)?;
        let r = double_report(&m.biiso, 6, tol)?;
        let piv = r.pivotal_isometry.map_or("-".to_string(), |b| b.to_string());
        println!(
            "{name:<10} {:>8} {:>9} {:>9} {piv:>9}",
            r.doubly_commuting, r.constant_isometry, r.swapped_pivotal_isometry
        );
    }

    // Θ ≡ I is doubly commuting but not a bi-shift
    let id = OpSymbol::constant(&identity(2))?;
    let m = build_model_biisometry(&id, 6, 64)?;
    let r = bishift_test(&m.biiso, &id, 12, 64, tol)?;
    println!("Θ ≡ I: bi-shift {}, constant Ω of rank {}", r.is_bishift, r.certificate.map_or(0, |c| c.omega.ncols()));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("doubly commuting example");
}

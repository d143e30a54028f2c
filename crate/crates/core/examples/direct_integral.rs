//! Fibers `(U₀(ζ), P₀)` of a periodic set and their irreducibility.

use biiso::cli::fiber_vs_rotated_shift;
use biiso::lattice::{commutant_dimension, direct_integral_factor, direct_integral_factor_with_period, factor_unitarity_defect, ZSet};
use biiso::linalg::{Tolerance, C64};

pub fn run() -> biiso::Result<()> {
    let tol = Tolerance::default();
    let two = ZSet::multiples(2, 0)?;
    let zeta = C64::from_polar(1.0, 0.9);
    let (u, p) = direct_integral_factor(&two, zeta)?;
    println!("U₀(ζ) = [[{:.3}, {:.3}], [{:.3}, {:.3}]]", u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    println!("P₀ = diag({}, {})", p[(0, 0)].re, p[(1, 1)].re);
    println!("commutant dimension {}", commutant_dimension(&u, &p));
    println!("pair vs model of (ζS, S): witness residual {:.1e}", fiber_vs_rotated_shift(&u, &p, zeta, 12, 64, tol)?);

    let a = ZSet::finite(&[0, 1, 3]);
    let pat = ZSet::periodic(vec![true, true, false, true, false], 0)?;
    println!("{} has period {:?}", a.render(-2, 6), a.minimal_period());
    let (u5, p5) = direct_integral_factor(&pat, C64::from_polar(1.0, 0.4))?;
    println!("period 5: unitary defect {:.1e}, commutant {}", factor_unitarity_defect(&u5), commutant_dimension(&u5, &p5));

    let (u4, p4) = direct_integral_factor_with_period(&two, 4, C64::from_polar(1.0, 0.3))?;
    println!("2ℤ read with period 4: commutant {}", commutant_dimension(&u4, &p4));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("direct integral example");
}

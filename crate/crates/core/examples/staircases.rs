//! Staircase sets, their step sets `A_Γ`, translation classes, and the
//! restriction of the bilateral pair to a staircase.

use biiso::lattice::{
    staircase_bcl_residual, staircase_restriction_biisometry, staircase_self_translation, staircase_to_zset, Staircase,
    ZSet,
};

pub fn run() -> biiso::Result<()> {
    let quadrant = Staircase::quadrant();
    let cross = Staircase::cross();
    println!("A(ℕ²)    = {}", staircase_to_zset(&quadrant).render(-4, 4));
    println!("A(cross) = {}", staircase_to_zset(&cross).render(-4, 4));

    let zig = Staircase::new((0, 0), ZSet::periodic(vec![true, false], 0)?);
    for n in -2..=3 {
        print!("γ{n} = {:?}  ", zig.gamma(n));
    }
    println!();
    println!("zigzag translates onto itself by {:?}", staircase_self_translation(&zig));
    println!("quadrant translates onto itself by {:?}", staircase_self_translation(&quadrant));

    let moved = quadrant.translate(3, 1);
    let a = staircase_to_zset(&quadrant);
    let b = staircase_to_zset(&moved);
    println!("ℕ² + (3, 1) has A shifted by {:?}", a.translate_equivalent(&b));

    let two = ZSet::multiples(2, 0)?;
    for other in [ZSet::multiples(2, 1)?, ZSet::multiples(3, 0)?, two.translate(7)] {
        println!("2ℤ vs {}: {:?}", other.render(-3, 3), two.translate_equivalent(&other));
    }

    let w = staircase_restriction_biisometry(&zig, 6, 6)?;
    let chk = w.check()?;
    println!("restricted pair on {} labels: residual {:.1e}", w.dim(), chk.max());
    println!("(U, P) of the restriction vs (U, U Q_A U*): {:.1e}", staircase_bcl_residual(&zig, 6, 6, 2)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("staircase example");
}

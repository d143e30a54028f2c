//! The shifted ℓ² example: a Blaschke-weighted symbol with a left inverse,
//! the eigenvalue `3φ(0)/5` of `Θ(0)`, and the bi-shift verdict.

use biiso::cli::{half_blaschke, left_inverse_residual};
use biiso::linalg::{eigenvalue_gap, Tolerance, C64};
use biiso::model::{bishift_test, build_model_biisometry};
use biiso::symbol::{boundary_defect, shifted_example_symbol};

pub fn run() -> biiso::Result<()> {
    let phi = half_blaschke();
    let phi0 = phi.eval(C64::new(0.0, 0.0));
    println!("φ(0) = {phi0}");

    let theta = shifted_example_symbol(8, &phi)?;
    let t0 = theta.eval(C64::new(0.0, 0.0))?;
    println!("σ_min(Θ(0) − 0.3) = {:.1e}", eigenvalue_gap(&t0, phi0 * 0.6));
    let bd = boundary_defect(&theta, 32)?;
    let worst = bd.samples.iter().map(|(_, d)| d.norm()).fold(0.0, f64::max);
    println!("largest Δ(ζ) over 32 samples: {worst:.1e}");

    println!("‖ΩΘ − I‖ on the leading 12x12 block at |z| = 0.9: {:.1e}", left_inverse_residual(16, 12, 0.9, 32, false)?);
    println!("same with η as printed: {:.3}", left_inverse_residual(16, 12, 0.9, 32, true)?);

    let small = shifted_example_symbol(4, &phi)?;
    let m = build_model_biisometry(&small, 6, 64)?;
    let r = bishift_test(&m.biiso, &small, 50, 64, Tolerance::default())?;
    println!(
        "‖W₀*^50‖ = {:.1e}, ‖W₁*^50‖ = {:.1e}, inner {}, constant Ω found {}, bi-shift {}",
        r.decay_w0.last().unwrap(),
        r.decay_w1.last().unwrap(),
        r.inner,
        r.certificate.is_some(),
        r.is_bishift
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("shifted example");
}

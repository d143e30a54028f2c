//! Symbol suite shared by the integration tests.

#![allow(dead_code)]

use biiso::cli::{half_blaschke, seed_from_env};
use biiso::linalg::{c, diag_real, identity, random_matrix, random_unitary, seeded_rng, CMat};
use biiso::symbol::{contractivity_norm, shifted_example_symbol, OpSymbol};
use rand::Rng;

/// Random polynomial symbol with sup norm 0.9 on the circle.
pub fn random_contraction<R: Rng>(rng: &mut R, dim: usize, degree: usize) -> OpSymbol {
    let coeffs: Vec<CMat> = (0..=degree).map(|_| random_matrix(rng, dim, dim)).collect();
    let raw = OpSymbol::from_coefficients(&coeffs).unwrap_or_else(|_| {
        // rescale first so the contractivity check accepts it
        let s: f64 = coeffs.iter().map(|m| m.norm()).sum();
        OpSymbol::from_coefficients(&coeffs.iter().map(|m| m / c(s, 0.0)).collect::<Vec<_>>()).unwrap()
    });
    let scale = 0.9 / contractivity_norm(&raw, 512);
    let scaled: Vec<CMat> = raw.series(degree + 1).iter().map(|m| m * c(scale, 0.0)).collect();
    OpSymbol::from_coefficients(&scaled).unwrap()
}

pub fn random_suite(count: usize) -> Vec<(String, OpSymbol)> {
    let mut rng = seeded_rng(seed_from_env());
    (0..count)
        .map(|i| {
            let dim = rng.gen_range(1..=3);
            let degree = rng.gen_range(0..=3);
            (format!("random #{i} ({dim}x{dim}, degree {degree})"), random_contraction(&mut rng, dim, degree))
        })
        .collect()
}

/// Nilpotent Jordan block: a constant partial isometry with no unitary part.
pub fn jordan(n: usize) -> CMat {
    let mut j = CMat::zeros(n, n);
    for i in 0..n - 1 {
        j[(i, i + 1)] = c(1.0, 0.0);
    }
    j
}

pub fn named_suite() -> Vec<(String, OpSymbol)> {
    let u = random_unitary(&mut seeded_rng(seed_from_env() ^ 0x5eed), 2);
    vec![
        ("I".into(), OpSymbol::constant(&identity(2)).unwrap()),
        ("zI".into(), OpSymbol::monomial_identity(2, 1).unwrap()),
        ("I/2".into(), OpSymbol::constant(&diag_real(&[0.5, 0.5])).unwrap()),
        ("constant unitary".into(), OpSymbol::constant(&u).unwrap()),
        ("constant partial isometry".into(), OpSymbol::constant(&jordan(3)).unwrap()),
        ("shifted example 8x8".into(), shifted_example_symbol(8, &half_blaschke()).unwrap()),
    ]
}

pub fn suite() -> Vec<(String, OpSymbol)> {
    let mut s = named_suite();
    s.extend(random_suite(20));
    s
}

/// Extra symbols for the purity and unitarity directions.
pub fn purity_extras() -> Vec<(String, OpSymbol)> {
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 1.0), c(-1.0, 0.0)]));
    let mut half_z = CMat::zeros(2, 2);
    half_z[(1, 1)] = c(0.5, 0.0);
    vec![
        ("diagonal phases".into(), OpSymbol::constant(&phases).unwrap()),
        ("1 ⊕ z/2".into(), OpSymbol::from_coefficients(&[diag_real(&[1.0, 0.0]), half_z]).unwrap()),
    ]
}

//! Randomized invariants of the constructions.

mod common;

use biiso::bcl::{bcl_from_biisometry, biisometry_from_bcl, pair_equivalence, BclPair, Equivalence};
use biiso::lattice::{
    cyclic_shift, direct_integral_factor_with_period, factor_unitarity_defect, staircase_self_translation,
    staircase_to_zset, zset_to_bcl, Staircase, ZSet,
};
use biiso::linalg::{
    c, hermitian_sqrt, isometry_residual, op_norm, orthonormal_range_basis, projector, projector_distance,
    random_matrix, random_unitary, seeded_rng, unitary_intertwiner_solve, CMat, Tolerance, C64,
};
use biiso::model::{
    build_model_biisometry, characteristic_function, co_wandering_basis, model_space_compression,
};
use biiso::symbol::{boundary_defect, taylor_coefficients, toeplitz_matrix, InnerScalar, OpSymbol};
use biiso::window::{compose, grade_shift_matrix, isometry_defect, shift_operator, BiIsometry, Window, WindowedOp};
use biiso::wold::{cnu_part_of_contraction, default_depth, four_space_decomposition, reducing_defect, wold_single};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn psd(seed: u64, n: usize, rank: usize) -> CMat {
    let b = random_matrix(&mut seeded_rng(seed), n, rank);
    &b * b.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..=32, r in 1usize..=32) {
        let m = psd(seed, n, r.min(n));
        let s = hermitian_sqrt(&m, tol()).unwrap();
        prop_assert!(op_norm(&(&s * &s - &m)) <= tol().eq_tol * (1.0 + op_norm(&m)));
    }

    #[test]
    fn range_basis_is_orthonormal(seed in any::<u64>(), n in 1usize..=20, r in 1usize..=20) {
        let mut rng = seeded_rng(seed);
        let m = random_matrix(&mut rng, n, r.min(n)) * random_matrix(&mut rng, r.min(n), n);
        let q = orthonormal_range_basis(&m, tol());
        prop_assert!(isometry_residual(&q) <= 1e-10);
        prop_assert_eq!(q.ncols(), r.min(n));
        // projector onto the range fixes the columns of m
        prop_assert!(op_norm(&(projector(&q) * &m - &m)) <= 1e-8 * (1.0 + op_norm(&m)));
    }

    #[test]
    fn intertwiner_solution_is_checked(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = seeded_rng(seed);
        let a = random_unitary(&mut rng, n);
        let x0 = random_unitary(&mut rng, n);
        let b = &x0 * &a * x0.adjoint();
        let x = unitary_intertwiner_solve(&[(a.clone(), b.clone())], tol()).unwrap().expect("conjugate pair");
        prop_assert!(isometry_residual(&x) <= 1e-8);
        prop_assert!(op_norm(&(&x * &a - &b * &x)) <= tol().eq_tol);
    }

    #[test]
    fn exact_columns_survive_widening(fiber in 1usize..=4, n in 2i64..=12, seed in any::<u64>()) {
        let theta = common::random_contraction(&mut seeded_rng(seed), fiber, 2);
        for (small, large) in [
            (shift_operator(fiber, n).unwrap(), shift_operator(fiber, n + 2).unwrap()),
            (toeplitz_matrix(&theta, n).unwrap(), toeplitz_matrix(&theta, n + 2).unwrap()),
        ] {
            let a = small.columns_on(&small.exact_domain).unwrap();
            let b = large.columns_on(&small.exact_domain).unwrap();
            let embed = large.codomain.inclusion(&small.codomain).unwrap();
            prop_assert!(op_norm(&(embed * a - b)) <= 1e-12);
        }
    }

    #[test]
    fn shift_is_isometric(fiber in 1usize..=8, n in 1i64..=64) {
        let s = shift_operator(fiber, n).unwrap();
        prop_assert!(isometry_defect(&s, &Window::graded(0, n - 1, fiber)).unwrap() <= 1e-12);
    }

    #[test]
    fn compose_associates(seed in any::<u64>(), fiber in 1usize..=3, n in 2i64..=8) {
        let mut rng = seeded_rng(seed);
        let w = Window::graded(0, n, fiber);
        let mut op = || WindowedOp::finite(w.clone(), random_matrix(&mut rng, w.len(), w.len())).unwrap();
        let (f, g, h) = (op(), op(), op());
        let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
        let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
        prop_assert!(op_norm(&(&left.matrix - &right.matrix)) <= 1e-12 * (1.0 + op_norm(&left.matrix)));
    }

    #[test]
    fn defect_completes_symbol(seed in any::<u64>(), dim in 1usize..=3, deg in 0usize..=3) {
        let theta = common::random_contraction(&mut seeded_rng(seed), dim, deg);
        let bd = boundary_defect(&theta, 32).unwrap();
        for (z, d) in &bd.samples {
            let t = theta.eval(*z).unwrap();
            let id = CMat::identity(dim, dim);
            prop_assert!(op_norm(&(d * d + t.adjoint() * t - id)) <= 1e-8);
        }
    }

    #[test]
    fn taylor_resums(a in 0.0f64..0.7, arg in 0.0f64..std::f64::consts::TAU) {
        let phi = InnerScalar::factor(C64::from_polar(a, arg)).unwrap();
        let theta = OpSymbol::inner_scalar_identity(2, &phi).unwrap();
        let coeffs = taylor_coefficients(&theta, 24, 128).unwrap();
        let z = c(0.3, 0.0);
        let sum = coeffs.iter().rev().fold(CMat::zeros(2, 2), |acc, m| acc * z + m);
        prop_assert!(op_norm(&(sum - theta.eval(z).unwrap())) <= 1e-8);
    }

    #[test]
    fn toeplitz_commutes_with_shift(seed in any::<u64>(), dim in 1usize..=3, deg in 0usize..=3, n in 3i64..=10) {
        let theta = common::random_contraction(&mut seeded_rng(seed), dim, deg);
        let t = toeplitz_matrix(&theta, n).unwrap();
        let top = t.codomain.grade_range().unwrap().1;
        let ts = compose(&t, &shift_operator(dim, n).unwrap()).unwrap();
        let st = compose(&shift_operator(dim, top).unwrap(), &t).unwrap();
        let inner = ts.domain.filter(|l| l.grade < n);
        let d = ts.columns_on(&inner).unwrap() - st.columns_on(&inner).unwrap();
        prop_assert!(op_norm(&d) <= 1e-10);
    }

    #[test]
    fn wold_of_shift_plus_unitary(seed in any::<u64>(), d in 1usize..=5, n in 4i64..=12) {
        let s = shift_operator(1, n).unwrap();
        let qw = Window::new((0..d).map(|f| biiso::window::Label::new(0, 1 + f)).collect()).unwrap();
        let q = WindowedOp::finite(qw.clone(), random_unitary(&mut seeded_rng(seed), d)).unwrap();
        let a = BiIsometry::new_unchecked(s.clone(), s, Window::graded(0, n - 1, 1)).unwrap();
        let w = a.direct_sum(&BiIsometry::new_unchecked(q.clone(), q, qw).unwrap()).unwrap();
        let r = wold_single(&w.w0, &w.interior, default_depth(&w.interior), tol()).unwrap();
        prop_assert!(op_norm(&(r.wandering.adjoint() * &r.unitary_part)) <= 1e-8);
        let vu = &w.w0.matrix * &r.unitary_part;
        prop_assert!(projector_distance(&orthonormal_range_basis(&vu, tol()), &r.unitary_part) <= 1e-8);
        let j = w.interior_inclusion();
        prop_assert!(r.completeness_defect(&(&j * j.adjoint())) <= 1e-8);
    }

    #[test]
    fn four_spaces_reduce(seed in any::<u64>(), dim in 1usize..=2, deg in 0usize..=2) {
        let theta = common::random_contraction(&mut seeded_rng(seed), dim, deg);
        let m = build_model_biisometry(&theta, 6, 16).unwrap();
        let fs = four_space_decomposition(&m.biiso, default_depth(&m.biiso.interior), tol()).unwrap();
        for b in fs.blocks() {
            prop_assert!(reducing_defect(&m.biiso, b).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn cnu_split_is_stable(seed in any::<u64>(), u in 0usize..=3, r in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let part = random_unitary(&mut rng, u.max(1));
        let contraction = random_matrix(&mut rng, r, r);
        let contraction = &contraction * c(0.9 / op_norm(&contraction), 0.0);
        let a = if u == 0 { contraction } else { biiso::linalg::block_diag(&[&part, &contraction]) };
        let x = random_unitary(&mut rng, a.nrows());
        let a = &x * a * x.adjoint();
        let (unit, _) = cnu_part_of_contraction(&a, tol()).unwrap();
        prop_assert_eq!(unit.ncols(), u);
        let id = CMat::identity(a.nrows(), a.nrows());
        prop_assert!(op_norm(&((a.adjoint() * &a - id) * &unit)) <= 1e-9);
        let finer = Tolerance { rank_tol: tol().rank_tol / 2.0, ..tol() };
        prop_assert_eq!(cnu_part_of_contraction(&a, finer).unwrap().0.ncols(), u);
    }

    #[test]
    fn model_round_trip(seed in any::<u64>(), dim in 1usize..=3, deg in 0usize..=3) {
        let theta = common::random_contraction(&mut seeded_rng(seed), dim, deg);
        let m = build_model_biisometry(&theta, 10, 64).unwrap();
        prop_assert!(m.biiso.check().unwrap().max() <= 1e-9);
        let got = characteristic_function(&m.biiso, 8, tol()).unwrap();
        for (k, g) in got.iter().enumerate() {
            let want = m.coefficients.get(k).cloned().unwrap_or_else(|| CMat::zeros(dim, dim));
            prop_assert!(op_norm(&(g - want)) <= 1e-8);
        }
        // the model space is ker W₁*
        let ms = model_space_compression(&m, tol()).unwrap();
        let f = co_wandering_basis(&m.biiso, tol());
        prop_assert!(projector_distance(&ms.basis, &f) <= 1e-8);
    }

    #[test]
    fn pair_round_trip(seed in any::<u64>(), n in 2usize..=5, rank in 0usize..=5) {
        let mut rng = seeded_rng(seed);
        let flags: Vec<bool> = (0..n).map(|i| i < rank.min(n)).collect();
        let b = BclPair::with_flags(random_unitary(&mut rng, n), &flags).unwrap();
        let w = biisometry_from_bcl(&b, 6).unwrap();
        let prod = &w.w0.matrix * &w.w1.matrix;
        let j = w.interior_inclusion();
        prop_assert!(op_norm(&((prod - grade_shift_matrix(w.window(), 1)) * &j)) <= 1e-10);
        if rank.min(n) > 0 && rank.min(n) < n {
            let ex = bcl_from_biisometry(&w, tol()).unwrap();
            prop_assert!(ex.decomposition_residual <= 1e-8);
            prop_assert!(ex.pair.unitary_defect <= 1e-8);
        }
    }

    #[test]
    fn translation_classes(seed in any::<u64>(), shift in -10i64..=10) {
        let mut rng = seeded_rng(seed);
        let period = 1 + (seed % 4) as usize;
        let pattern: Vec<bool> = (0..period).map(|i| i == 0 || rand::Rng::gen(&mut rng)).collect();
        let core: Vec<bool> = (0..4).map(|_| rand::Rng::gen(&mut rng)).collect();
        let tail = biiso::lattice::Tail::Periodic(pattern);
        let a = ZSet::new(-2, 1, core, tail.clone(), tail).unwrap();
        let b = a.translate(shift);
        let found = a.translate_equivalent(&b).expect("translates are equivalent");
        prop_assert!(a.translate(found).set_eq(&b));
        let lo = a.core().0.min(b.core().0 - found) - 3;
        let hi = a.core().1.max(b.core().1 - found) + 3;
        let pa = zset_to_bcl(&a, lo, hi).unwrap();
        let pb = zset_to_bcl(&b, lo + found, hi + found).unwrap();
        match pair_equivalence(&pa.pair, &pb.pair, 6, tol()).unwrap() {
            Equivalence::Equivalent(x) => {
                // relabeling by `found` is the identity in window coordinates
                prop_assert!(op_norm(&(&x * &pa.pair.u - &pb.pair.u * &x)) <= 1e-8);
                prop_assert_eq!(&pa.pair.p, &pb.pair.p);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn staircase_periodicity(seed in any::<u64>(), len in 1usize..=6, periodic in any::<bool>()) {
        let mut rng = seeded_rng(seed);
        let bits: Vec<bool> = (0..len).map(|_| rand::Rng::gen(&mut rng)).collect();
        let steps = if periodic {
            ZSet::periodic(bits, 0).unwrap()
        } else {
            ZSet::new(0, len as i64 - 1, bits, biiso::lattice::Tail::AllIn, biiso::lattice::Tail::AllOut).unwrap()
        };
        let g = Staircase::new((0, 0), steps);
        let self_translate = staircase_self_translation(&g).is_some();
        prop_assert_eq!(self_translate, staircase_to_zset(&g).minimal_period().is_some());
    }

    #[test]
    fn fibers_are_unitary(k in 0usize..64, n in 1usize..=6) {
        let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
        let a = ZSet::multiples(n, 0).unwrap();
        let (u, p) = direct_integral_factor_with_period(&a, n, zeta).unwrap();
        prop_assert!(factor_unitarity_defect(&u) <= 1e-12);
        prop_assert!(op_norm(&(&p * &p - &p)) <= 1e-12);
        if k == 0 {
            prop_assert!(op_norm(&(u - cyclic_shift(n))) <= 1e-12);
        }
    }
}

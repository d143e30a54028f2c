//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::time::Instant;

use biiso::bcl::{
    bcl_compression_from_biisometry, bcl_from_biisometry, bcl_from_symbol, pair_equivalence, witness_residual,
    Equivalence, DEFAULT_WORD_LEN,
};
use biiso::cli::{fiber_vs_rotated_shift, half_blaschke, left_inverse_residual};
use biiso::lattice::{
    commutant_dimension, direct_integral_factor, direct_integral_factor_with_period, staircase_to_zset, Staircase, Tail,
    ZSet,
};
use biiso::linalg::{
    eigenvalue_gap, op_norm, projector_distance, random_unitary, seeded_rng, unitary_residual, CMat, Tolerance, C64,
};
use biiso::model::{
    bishift_test, build_model_biisometry, characteristic_function, double_report, kernel_capture_depth, unitarity_gap,
    Model,
};
use biiso::symbol::{shifted_example_symbol, OpSymbol};
use biiso::window::{fiberwise_operator, shift_operator, BiIsometry, Label, Window, WindowedOp};
use biiso::wold::{cnu_part_of_contraction, default_depth, four_space_decomposition, reducing_defect, wold_single};
use rand::Rng;

const N: i64 = 16;
const K: usize = 64;

type Check = biiso::Result<(bool, String)>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

struct Built {
    name: String,
    theta: OpSymbol,
    model: Model,
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn build_all(symbols: &[(String, OpSymbol)], n: i64) -> biiso::Result<Vec<Built>> {
    symbols
        .iter()
        .map(|(name, theta)| {
            Ok(Built { name: name.clone(), theta: theta.clone(), model: build_model_biisometry(theta, n, K)? })
        })
        .collect()
}

fn roundtrip_error(b: &Built, k_max: usize) -> biiso::Result<f64> {
    let got = characteristic_function(&b.model.biiso, k_max, tol())?;
    Ok(got
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let want = b.model.coefficients.get(k).cloned().unwrap_or_else(|| CMat::zeros(g.nrows(), g.ncols()));
            op_norm(&(g - want))
        })
        .fold(0.0, f64::max))
}

fn model_validity(suite: &[Built]) -> Check {
    let mut worst = (0.0f64, String::new());
    for b in suite {
        let r = b.model.biiso.check()?.max();
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, b.name.clone());
        }
    }
    Ok((worst.0 <= 1e-9, format!("{} symbols, worst residual {:.1e} ({})", suite.len(), worst.0, worst.1)))
}

fn roundtrip(suite: &[Built]) -> Check {
    let mut worst = 0.0f64;
    for b in suite {
        worst = worst.max(roundtrip_error(b, 8)?);
    }
    Ok((worst <= 1e-8, format!("Θ_0..Θ_8 recovered within {worst:.1e}")))
}

fn purity(suite: &[Built], extras: &[Built]) -> Check {
    let (mut unitary_yes, mut unitary_no, mut cnu_yes, mut cnu_no, mut wrong) = (0, 0, 0, 0, Vec::new());
    for b in suite.iter().chain(extras) {
        let w = &b.model.biiso;
        let theta0 = b.theta.eval(C64::new(0.0, 0.0))?;
        let constant = b.theta.series(b.theta.tail_length(1e-13).0.max(2)).iter().skip(1).all(|c| op_norm(c) <= 1e-12);
        let constant_unitary = constant && unitary_residual(&theta0) <= 1e-9;
        let w1_unitary = unitarity_gap(&w.w1, &w.interior)? <= 1e-8;
        let theta0_cnu = cnu_part_of_contraction(&theta0, tol())?.0.ncols() == 0;
        let [_, k01, _, k11] = four_space_decomposition(w, default_depth(&w.interior), tol())?.dims();
        let one_pure = k01 + k11 == 0;
        if constant_unitary {
            unitary_yes += 1;
        } else {
            unitary_no += 1;
        }
        if theta0_cnu {
            cnu_yes += 1;
        } else {
            cnu_no += 1;
        }
        if w1_unitary != constant_unitary || one_pure != theta0_cnu {
            wrong.push(b.name.clone());
        }
    }
    let ok = wrong.is_empty() && unitary_yes >= 3 && unitary_no >= 3 && cnu_yes >= 3 && cnu_no >= 3;
    Ok((
        ok,
        format!(
            "unitary {unitary_yes}/{unitary_no}, cnu Θ(0) {cnu_yes}/{cnu_no} (yes/no), false verdicts {}{}",
            wrong.len(),
            if wrong.is_empty() { String::new() } else { format!(": {}", wrong.join(", ")) }
        ),
    ))
}

/// Model at a depth where `ker W₁*` is resolved.
fn deep_model(b: &Built) -> biiso::Result<Model> {
    let depth = kernel_capture_depth(&b.theta);
    if depth <= N {
        Ok(b.model.clone())
    } else {
        build_model_biisometry(&b.theta, depth, K)
    }
}

fn double_ring(suite: &[Built], deep: &[Model]) -> Check {
    let mut bad = Vec::new();
    let mut undecided = 0;
    for (b, m) in suite.iter().zip(deep) {
        let r = double_report(&m.biiso, 6, tol())?;
        if r.pivotal_isometry.is_none() {
            undecided += 1;
        }
        if !r.agree() || r.pivotal_isometry.is_none() {
            bad.push(b.name.clone());
        }
    }
    let id = OpSymbol::constant(&biiso::linalg::identity(2))?;
    let m = build_model_biisometry(&id, 8, K)?;
    let r = bishift_test(&m.biiso, &id, 12, K, tol())?;
    let identity_ok = !r.is_bishift && r.certificate.is_some();
    Ok((
        bad.is_empty() && identity_ok,
        format!(
            "verdicts agree on {}/{} symbols ({undecided} undecided); Θ ≡ I bi-shift {} with constant Ω {}",
            suite.len() - bad.len(),
            suite.len(),
            r.is_bishift,
            r.certificate.is_some()
        ),
    ))
}

fn shifted_example() -> Check {
    let phi = half_blaschke();
    let phi0 = phi.eval(C64::new(0.0, 0.0));
    let left = left_inverse_residual(16, 12, 0.9, 32, false)?;
    let t0 = shifted_example_symbol(8, &phi)?.eval(C64::new(0.0, 0.0))?;
    let gap = eigenvalue_gap(&t0, phi0 * 0.6);
    let theta = shifted_example_symbol(8, &phi)?;
    // W₁* lowers the grade once per pass through the fiber cycle, so the
    // decay needs about (dim − 1)(N + 1) steps
    let m = build_model_biisometry(&theta, 8, K)?;
    let r = bishift_test(&m.biiso, &theta, 100, K, tol())?;
    Ok((
        (phi0 - 0.5).norm() < 1e-14 && left <= 1e-8 && gap <= 1e-10 && r.is_bishift,
        format!("‖ΩΘ − I‖ {left:.1e}, σ_min(Θ(0) − 0.3) {gap:.1e}, bi-shift {}", r.is_bishift),
    ))
}

fn symbol_routes(suite: &[Built], deep: &[Model]) -> Check {
    let mut worst_witness = 0.0f64;
    let mut worst_split = 0.0f64;
    let mut worst_compression = 0.0f64;
    let (mut inner, mut bad) = (0, Vec::new());
    for (b, m) in suite.iter().zip(deep) {
        let direct = bcl_from_symbol(m, tol())?;
        if m.spaces.defect_rank == 0 {
            inner += 1;
            let ex = bcl_from_biisometry(&m.biiso, tol())?;
            worst_split = worst_split.max(ex.decomposition_residual);
            match pair_equivalence(&direct, &ex.pair, DEFAULT_WORD_LEN, tol())? {
                Equivalence::Equivalent(x) => worst_witness = worst_witness.max(witness_residual(&direct, &ex.pair, &x)),
                _ => bad.push(b.name.clone()),
            }
        } else {
            // 𝔇 is infinite dimensional: compare the two compressions entrywise
            let ex = bcl_compression_from_biisometry(&m.biiso, tol())?;
            let d = if ex.pair.dim() == direct.dim() { op_norm(&(&ex.pair.u - &direct.u)) } else { f64::INFINITY };
            worst_compression = worst_compression.max(d);
        }
    }
    let ok = bad.is_empty() && worst_witness <= 1e-8 && worst_split <= 1e-8 && worst_compression <= 1e-8;
    Ok((
        ok,
        format!(
            "{inner} inner symbols certified (witness {worst_witness:.1e}, projector identity {worst_split:.1e}), \
             {} others agree as compressions within {worst_compression:.1e}{}",
            suite.len() - inner,
            if bad.is_empty() { String::new() } else { format!("; no certificate for {}", bad.join(", ")) }
        ),
    ))
}

fn random_zset<R: Rng>(rng: &mut R) -> ZSet {
    let lo = rng.gen_range(-6..=6);
    let len = rng.gen_range(1..=8);
    let mask: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
    let tail = |rng: &mut R| match rng.gen_range(0..3) {
        0 => Tail::AllIn,
        1 => Tail::AllOut,
        _ => {
            let p = rng.gen_range(1..=4);
            let mut bits: Vec<bool> = (0..p).map(|_| rng.gen()).collect();
            bits[0] = true;
            Tail::Periodic(bits)
        }
    };
    let (l, r) = (tail(rng), tail(rng));
    ZSet::new(lo, lo + len as i64 - 1, mask, l, r).expect("valid random set")
}

fn lattice_facts() -> Check {
    let quadrant = staircase_to_zset(&Staircase::quadrant()).set_eq(&ZSet::below(0));
    let cross = staircase_to_zset(&Staircase::cross()).set_eq(&ZSet::from(0));
    let mut rng = seeded_rng(common_seed());
    let mut covariant = 0;
    for _ in 0..100 {
        let g = Staircase::new((rng.gen_range(-5..=5), rng.gen_range(-5..=5)), random_zset(&mut rng));
        let (p, q) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        if staircase_to_zset(&g.translate(p, q)).set_eq(&staircase_to_zset(&g).translate(p - q)) {
            covariant += 1;
        }
    }
    let two = ZSet::multiples(2, 0)?;
    let period = two.minimal_period();
    let plus_one = two.translate_equivalent(&ZSet::multiples(2, 1)?);
    let three = two.translate_equivalent(&ZSet::multiples(3, 0)?);
    Ok((
        quadrant && cross && covariant == 100 && period == Some(2) && plus_one == Some(1) && three.is_none(),
        format!(
            "A(ℕ²) = {{n < 0}} {quadrant}, A(cross) = ℕ {cross}, covariance {covariant}/100, period {period:?}, \
             2ℤ ~ 2ℤ+1 by {plus_one:?}, 2ℤ ~ 3ℤ {three:?}"
        ),
    ))
}

fn common_seed() -> u64 {
    biiso::cli::seed_from_env()
}

fn direct_integral() -> Check {
    let two = ZSet::multiples(2, 0)?;
    let mut worst = 0.0f64;
    let mut irreducible = 0;
    for j in 0..8 {
        let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / 8.0);
        let (u, p) = direct_integral_factor(&two, zeta)?;
        if commutant_dimension(&u, &p) == 1 {
            irreducible += 1;
        }
        worst = worst.max(fiber_vs_rotated_shift(&u, &p, zeta, 12, K, tol())?);
    }
    let (u4, p4) = direct_integral_factor_with_period(&two, 4, C64::from_polar(1.0, 0.3))?;
    let d4 = commutant_dimension(&u4, &p4);
    Ok((
        worst <= 1e-8 && irreducible == 8 && d4 > 1,
        format!("witness residual {worst:.1e}, irreducible at {irreducible}/8 ζ, period-4 reading commutant {d4}"),
    ))
}

fn block_basis(sum: &BiIsometry, start: usize, len: usize) -> CMat {
    let labels = sum.window().labels();
    let pos: Vec<usize> = (start..start + len).filter(|&p| sum.interior.contains(&labels[p])).collect();
    CMat::from_fn(labels.len(), pos.len(), |i, j| if i == pos[j] { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn wold_checks() -> Check {
    let t = tol();
    let mut rng = seeded_rng(common_seed());
    let mut worst = 0.0f64;
    let mut exact = 0;
    for i in 0..10 {
        let d = 1 + i % 5;
        let s = shift_operator(1, 10)?;
        let qw = Window::new((0..d).map(|f| Label::new(0, 1 + f)).collect())?;
        let q = WindowedOp::finite(qw.clone(), random_unitary(&mut rng, d))?;
        let a = BiIsometry::new_unchecked(s.clone(), s, Window::graded(0, 9, 1))?;
        let sum = a.direct_sum(&BiIsometry::new_unchecked(q.clone(), q, qw)?)?;
        let r = wold_single(&sum.w0, &sum.interior, default_depth(&sum.interior), t)?;
        if r.wandering.ncols() == 1 && r.shift_part.ncols() == 10 && r.unitary_part.ncols() == d {
            exact += 1;
        }
        worst = worst.max(projector_distance(&r.unitary_part, &block_basis(&sum, 11, d)));
    }

    let n = 8;
    let s1 = shift_operator(1, n)?;
    let s2 = shift_operator(2, n)?;
    let g2 = Window::graded(0, n, 2);
    let inner2 = Window::graded(0, n - 1, 2);
    let q2 = fiberwise_operator(&g2, &random_unitary(&mut rng, 2))?;
    let cyc = WindowedOp::finite(Window::graded(0, 4, 1), biiso::lattice::cyclic_shift(5))?;
    let blocks = [
        BiIsometry::new(s1.clone(), s1, Window::graded(0, n - 1, 1), t)?,
        BiIsometry::new(s2.clone(), q2.clone(), inner2.clone(), t)?,
        BiIsometry::new(q2, s2, inner2, t)?,
        BiIsometry::new(cyc.clone(), cyc.clone(), cyc.domain.clone(), t)?,
    ];
    let mut w = blocks[0].clone();
    for b in &blocks[1..] {
        w = w.direct_sum(b)?;
    }
    let fs = four_space_decomposition(&w, default_depth(&w.interior), t)?;
    let mut start = 0;
    let mut block_err = 0.0f64;
    let mut dims_ok = true;
    for (b, got) in blocks.iter().zip(fs.blocks()) {
        let want = block_basis(&w, start, b.dim());
        dims_ok &= want.ncols() == got.ncols();
        block_err = block_err.max(projector_distance(got, &want)).max(reducing_defect(&w, got)?);
        start += b.dim();
    }
    Ok((
        exact == 10 && worst <= 1e-8 && dims_ok && block_err <= 1e-8,
        format!(
            "S ⊕ Q exact in {exact}/10 (projector {worst:.1e}); four spaces {:?}, projector residual {block_err:.1e}",
            fs.dims()
        ),
    ))
}

fn residual_vector(b: &Built) -> biiso::Result<Vec<f64>> {
    let w = &b.model.biiso;
    let chk = w.check()?;
    let mut v = vec![chk.isometry_defect_w0, chk.isometry_defect_w1, chk.commutation_residual, roundtrip_error(b, 8)?];
    let r = double_report(w, 6, tol())?;
    v.extend([r.commutation_residual, r.nonconstant_mass, r.swapped_pivotal_defect]);
    for c in characteristic_function(w, 8, tol())? {
        v.extend(c.iter().flat_map(|z| [z.re, z.im]));
    }
    Ok(v)
}

fn window_stability(symbols: &[(String, OpSymbol)]) -> Check {
    let small = build_all(symbols, 12)?;
    let large = build_all(symbols, 16)?;
    let mut worst = (0.0f64, String::new());
    for (a, b) in small.iter().zip(&large) {
        let (x, y) = (residual_vector(a)?, residual_vector(b)?);
        let d = if x.len() == y.len() {
            x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        if d > worst.0 || worst.1.is_empty() {
            worst = (d, a.name.clone());
        }
    }
    let again = residual_vector(&build_all(&symbols[..1], 16)?[0])?;
    let repeat = again == residual_vector(&large[0])?;
    Ok((
        worst.0 <= 1e-9 && repeat,
        format!("largest change N = 12 → 16: {:.1e} ({}), repeated run identical {repeat}", worst.0, worst.1),
    ))
}

fn main() {
    let t = Instant::now();
    let symbols = common::suite();
    let suite = build_all(&symbols, N).expect("suite models build");
    let extras = build_all(&common::purity_extras(), N).expect("extra models build");
    let deep: Vec<Model> = suite.iter().map(deep_model).collect::<biiso::Result<_>>().expect("deep models build");

    let criteria: Vec<Criterion> = vec![
        ("model validity", Box::new(|| model_validity(&suite))),
        ("characteristic function round trip", Box::new(|| roundtrip(&suite))),
        ("unitarity and purity verdicts", Box::new(|| purity(&suite, &extras))),
        ("doubly commuting equivalences", Box::new(|| double_ring(&suite, &deep))),
        ("shifted example", Box::new(shifted_example)),
        ("symbol and extraction routes", Box::new(|| symbol_routes(&suite, &deep))),
        ("lattice facts", Box::new(lattice_facts)),
        ("direct integral fibers", Box::new(direct_integral)),
        ("Wold decompositions", Box::new(wold_checks)),
        ("window stability and determinism", Box::new(|| window_stability(&symbols))),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let s = Instant::now();
        let (ok, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {title}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            s.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

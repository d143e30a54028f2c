//! Contractive analytic symbols: evaluation, Taylor coefficients, boundary
//! defect and Toeplitz/Laurent matrices.

use biiso::linalg::{c, from_rows, op_norm, CMat, C64};
use biiso::symbol::{
    boundary_defect, contractivity_norm, is_inner_sampled, laurent_matrix, symbol_from_json, taylor_coefficients,
    toeplitz_matrix, InnerScalar, OpSymbol,
};
use biiso::window::{compose, shift_operator};

pub fn run() -> biiso::Result<()> {
    // Θ(z) = A + Bz, scaled so its boundary norm is 1
    let a = from_rows(&[vec![c(0.4, 0.0), c(0.1, 0.2)], vec![c(0.0, 0.0), c(0.3, -0.1)]]);
    let b = from_rows(&[vec![c(0.2, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.0), c(0.1, 0.0)]]);
    let raw = OpSymbol::from_coefficients(&[a.clone(), b.clone()])?;
    let scale = contractivity_norm(&raw, 256);
    let theta = OpSymbol::from_coefficients(&[a / c(scale, 0.0), b / c(scale, 0.0)])?;
    println!("boundary norm after scaling: {:.12}", contractivity_norm(&theta, 256));

    let coeffs = taylor_coefficients(&theta, 6, 64)?;
    let z = c(0.3, 0.2);
    let mut resum = CMat::zeros(2, 2);
    let mut zk = C64::new(1.0, 0.0);
    for ck in &coeffs {
        resum += ck * zk;
        zk *= z;
    }
    println!("Taylor resummation error at z = 0.3+0.2i: {:.1e}", op_norm(&(resum - theta.eval(z)?)));

    let (inner, defect) = is_inner_sampled(&theta, 64);
    println!("inner: {inner} (max defect {defect:.3})");
    let bd = boundary_defect(&theta, 64)?;
    let worst = bd
        .samples
        .iter()
        .map(|(zeta, d)| op_norm(&(d * d + theta.eval(*zeta).unwrap().adjoint() * theta.eval(*zeta).unwrap() - CMat::identity(2, 2))))
        .fold(0.0f64, f64::max);
    println!("Δ² + Θ*Θ = I on the circle within {worst:.1e}");

    // Toeplitz matrices commute with the shift
    let t = toeplitz_matrix(&theta, 10)?;
    let ts = compose(&t, &shift_operator(2, 10)?)?;
    let st = compose(&shift_operator(2, 11)?, &t)?;
    let low = CMat::from_fn(22, 20, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    println!("‖(TS − ST)|grades<10‖ = {:.1e}", op_norm(&((&ts.matrix - &st.matrix) * low)));
    let l = laurent_matrix(&bd, 6)?;
    println!("Laurent matrix of Δ: {}x{}, tail bound {:.1e}", l.matrix.nrows(), l.matrix.ncols(), l.tail_bound);

    // a Blaschke factor and the same symbol read from a document
    let phi = InnerScalar::new(vec![c(-0.5, 0.0)], c(1.0, 0.0))?;
    println!("φ(0) = {}", phi.eval(c(0.0, 0.0)));
    let doc = r#"{"dim": 1, "entries": [[{"poly": [[1, 0]], "blaschke": {"zeros": [[-0.5, 0]], "constant": [1, 0]}}]]}"#;
    let read = symbol_from_json(doc)?;
    let (len, tail) = read.tail_length(1e-13);
    println!("series of φ truncated after {len} terms (tail {tail:.1e}), inner: {}", is_inner_sampled(&read, 64).0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("symbol example");
}

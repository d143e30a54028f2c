//! Functional model `W(Θ)` of a contractive symbol: residuals, the
//! characteristic function read back, and the purity verdicts.

use biiso::linalg::{c, diag_real, op_norm, CMat, Tolerance};
use biiso::model::{build_model_biisometry, characteristic_function, model_space_compression, unitarity_gap};
use biiso::symbol::OpSymbol;
use biiso::wold::{default_depth, four_space_decomposition};

pub fn run() -> biiso::Result<()> {
    let tol = Tolerance::default();
    // Θ(z) = diag(z/2, 1/2) + z·E₁₂/2, not inner
    let mut t1 = CMat::zeros(2, 2);
    t1[(0, 0)] = c(0.5, 0.0);
    t1[(0, 1)] = c(0.5, 0.0);
    let theta = OpSymbol::from_coefficients(&[diag_real(&[0.0, 0.5]), t1])?;
    let m = build_model_biisometry(&theta, 10, 64)?;
    let chk = m.biiso.check()?;
    println!(
        "window {} labels, interior {}, defect slot rank {}, samples {}",
        m.biiso.dim(),
        m.biiso.interior.len(),
        m.spaces.defect_rank,
        m.spaces.k_used
    );
    println!("isometry defects {:.1e} / {:.1e}, commutator {:.1e}", chk.isometry_defect_w0, chk.isometry_defect_w1, chk.commutation_residual);

    let got = characteristic_function(&m.biiso, 6, tol)?;
    let err = got.iter().enumerate().map(|(k, g)| {
        let want = m.coefficients.get(k).cloned().unwrap_or_else(|| CMat::zeros(2, 2));
        op_norm(&(g - want))
    });
    println!("Θ_k read back from the model, worst error {:.1e}", err.fold(0.0, f64::max));

    println!("W₁ unitarity gap {:.3}", unitarity_gap(&m.biiso.w1, &m.biiso.interior)?);
    let fs = four_space_decomposition(&m.biiso, default_depth(&m.biiso.interior), tol)?;
    println!("four spaces {:?}", fs.dims());
    let ms = model_space_compression(&m, tol)?;
    println!("model space 𝔥(Θ) at this truncation: {} dims", ms.basis.ncols());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().expect("functional model example");
}

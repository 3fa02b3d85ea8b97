//! When `G` is badly conditioned, forming `S = G^* G` and factoring it loses
//! everything; the implicit iteration works on `G` itself.

use ghsvd::assembly::form_hs;
use ghsvd::finalize::eigen_residual;
use ghsvd::harness::{compare, generalized_eigen, generate, Dataset, GeneratorSpec};
use ghsvd::hz::{hz, HzConfig, Variant};

fn main() -> ghsvd::Result<()> {
    let spec: GeneratorSpec = "gsvd-pair:n=48,m=60,kappa=1e8,neg=12".parse()?;
    let Dataset::Factored { pencil, lambda: Some(exact) } = generate(&spec, 4)? else {
        unreachable!("gsvd-pair carries its spectrum")
    };
    let (h, s) = form_hs(&pencil);
    match generalized_eigen(&h, &s) {
        Ok(sol) => println!(
            "dense solver: max relative eigenvalue error {:.1e}",
            compare(&sol.lambda, &exact, 0.0)?.max_rel_diff
        ),
        Err(e) => println!("dense solver failed: {e}"),
    }
    let out = hz(&pencil.f, &pencil.g, &pencil.j, &HzConfig { variant: Variant::Vp, ..Default::default() })?;
    println!(
        "implicit iteration: max relative eigenvalue error {:.1e}, eigen residual {:.1e}",
        compare(&out.lambda, &exact, 0.0)?.max_rel_diff,
        eigen_residual(&h, &s, &out.z, &out.lambda)
    );
    Ok(())
}

//! With `J = I` the decomposition is the ordinary GSVD: `σ_F / σ_G` are the
//! generalized singular values of `(F, G)`.

use ghsvd::harness::{generate, Dataset, GeneratorSpec};
use ghsvd::hz::{hz, HzConfig};

fn main() -> ghsvd::Result<()> {
    let spec: GeneratorSpec = "gsvd-pair:n=64,m=64,kappa=1e3,neg=0".parse()?;
    let Dataset::Factored { pencil, lambda: Some(exact) } = generate(&spec, 2)? else {
        unreachable!("gsvd-pair carries its spectrum")
    };
    assert!(pencil.j.is_identity());
    let out = hz(&pencil.f, &pencil.g, &pencil.j, &HzConfig { threads: 2, ..Default::default() })?;
    let mut got: Vec<f64> = out.sigma_f.iter().zip(&out.sigma_g).map(|(a, b)| a / b).collect();
    let mut want: Vec<f64> = exact.iter().map(|l| l.sqrt()).collect();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    let worst = got.iter().zip(&want).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    println!("smallest / largest generalized singular value: {:.4} / {:.4}", got[0], got[got.len() - 1]);
    println!("max relative error against the construction: {worst:.2e}");
    Ok(())
}

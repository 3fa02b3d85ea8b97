//! Phase 1: from per-atom blocks to the tall pencil `(F̃, J̃, G̃)`.

use ghsvd::assembly::{assemble, form_hs};
use ghsvd::harness::{generate, Dataset, GeneratorSpec};

fn main() -> ghsvd::Result<()> {
    let spec: GeneratorSpec = "atoms:na=3,nl=6,ng=20".parse()?;
    let Dataset::Atoms(atoms) = generate(&spec, 11)? else { unreachable!("atoms spec") };
    let p = assemble(&atoms)?;
    println!(
        "{} atoms -> F̃, G̃ of shape {} x {}, J̃ with {} negative signs",
        atoms.len(),
        p.rows(),
        p.cols(),
        p.j.count_negative()
    );
    let (h, s) = form_hs(&p);
    println!("H Hermitian defect {:.1e}, S Hermitian defect {:.1e}", h.hermitian_defect(), s.hermitian_defect());
    Ok(())
}

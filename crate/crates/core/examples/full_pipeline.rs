//! All four phases from atom blocks, with the reference comparison and the
//! report written to a directory.

use ghsvd::harness::{run_pipeline, Input, RunConfig};

fn main() -> ghsvd::Result<()> {
    let out = std::env::temp_dir().join("ghsvd-full-pipeline");
    let mut cfg = RunConfig::new(Input::Generate("atoms:na=4,nl=10,ng=60".parse()?));
    cfg.hz.threads = 4;
    cfg.oracle = true;
    cfg.out = Some(out.clone());
    let outcome = run_pipeline(&cfg)?;
    print!("{}", outcome.report.to_text());
    println!("written to {}", out.display());
    Ok(())
}

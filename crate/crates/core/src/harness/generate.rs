//! Seeded synthetic datasets and their on-disk layout.
//!
//! Every generator draws from `Xoshiro256**` seeded by `seed_from_u64`, with
//! complex entries uniform on `[-1, 1) x [-1, 1)`, so a spec plus a seed
//! fully determines the data.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;
use serde::Serialize;

use crate::assembly::{AtomBlock, FactoredPencil};
use crate::io;
use crate::kernel::{ComplexMatrix, Signature, C64};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Per-atom blocks: `na` atoms, `T` blocks of order `nl`, `ng` columns.
    Atoms { na: usize, nl: usize, ng: usize },
    /// `F = D^{1/2} Q^*` with `D` uniform on `(0, 1)`, `J = I`, `G` unitary:
    /// the eigenvalues are the entries of `D`.
    HermitianPair { n: usize },
    /// `F = U_F A X`, `G = U_G B X` with `A² + B² = I`, `U_F` J-unitary,
    /// `U_G` orthonormal and `κ(X) = kappa`. The eigenvalues `±(a_i/b_i)²` are
    /// known exactly; `neg` of them are negative.
    GsvdPair { n: usize, m: usize, kappa: f64, neg: usize },
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            GeneratorSpec::Atoms { na, nl, ng } => na > 0 && nl > 0 && ng > 0 && 2 * na * nl >= ng,
            GeneratorSpec::HermitianPair { n } => n > 0,
            GeneratorSpec::GsvdPair { n, m, kappa, neg } => n > 0 && m >= n && kappa >= 1.0 && neg <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid generator spec {self}")))
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Atoms { na, nl, ng } => write!(f, "atoms:na={na},nl={nl},ng={ng}"),
            GeneratorSpec::HermitianPair { n } => write!(f, "hermitian-pair:n={n}"),
            GeneratorSpec::GsvdPair { n, m, kappa, neg } => {
                write!(f, "gsvd-pair:n={n},m={m},kappa={kappa:e},neg={neg}")
            }
        }
    }
}

/// Parses `kind:key=value,...`, e.g. `gsvd-pair:n=100,kappa=1e8`.
impl FromStr for GeneratorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in args.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| kv.remove(key);
        let int = |v: Option<String>, key: &str| -> Result<Option<usize>> {
            v.map(|v| v.parse().map_err(|_| Error::Config(format!("{key}={v} is not a count"))))
                .transpose()
        };
        let need = |v: Option<usize>, key: &str| v.ok_or_else(|| Error::Config(format!("missing {key}")));
        let spec = match kind {
            "atoms" => GeneratorSpec::Atoms {
                na: need(int(take("na"), "na")?, "na")?,
                nl: need(int(take("nl"), "nl")?, "nl")?,
                ng: need(int(take("ng"), "ng")?, "ng")?,
            },
            "hermitian-pair" => GeneratorSpec::HermitianPair { n: need(int(take("n"), "n")?, "n")? },
            "gsvd-pair" => {
                let n = need(int(take("n"), "n")?, "n")?;
                let m = int(take("m"), "m")?.unwrap_or(n);
                let neg = int(take("neg"), "neg")?.unwrap_or(0);
                let kappa = take("kappa")
                    .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("kappa={v} is not a number"))))
                    .transpose()?
                    .unwrap_or(1.0);
                GeneratorSpec::GsvdPair { n, m, kappa, neg }
            }
            other => return Err(Error::Config(format!("unknown generator kind {other:?}"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Config(format!("unknown key {k:?} for {kind}")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub enum Dataset {
    Atoms(Vec<AtomBlock>),
    Factored {
        pencil: FactoredPencil,
        /// Exact eigenvalues, when the generator knows them.
        lambda: Option<Vec<f64>>,
    },
}

impl Dataset {
    /// The first phase that accepts this representation.
    pub fn first_phase(&self) -> u8 {
        match self {
            Dataset::Atoms(_) => 1,
            Dataset::Factored { .. } => 2,
        }
    }
}

fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut t = ComplexMatrix::random(n, n, rng);
    t.symmetrize();
    t
}

/// `rows x cols` with orthonormal columns: modified Gram-Schmidt applied
/// twice to a random matrix.
pub fn random_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(rows >= cols);
    let mut q = ComplexMatrix::random(rows, cols, rng);
    for _ in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let (qk, qj) = q.col_pair_mut(k, j);
                let d: C64 = qk.iter().zip(qj.iter()).map(|(a, b)| a.conj() * b).sum();
                for (a, b) in qj.iter_mut().zip(qk.iter()) {
                    *a -= d * b;
                }
            }
            let nrm = q.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            q.scale_col(j, 1.0 / nrm);
        }
    }
    q
}

fn diag_times(d: &[f64], m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * d[i])
}

fn generate_atoms(na: usize, nl: usize, ng: usize, rng: &mut impl Rng) -> Result<Vec<AtomBlock>> {
    (0..na)
        .map(|_| {
            let a = ComplexMatrix::random(nl, ng, rng);
            let b = ComplexMatrix::random(nl, ng, rng);
            let u: Vec<f64> = (0..nl).map(|_| rng.gen_range(0.5..1.5)).collect();
            let taa = random_hermitian(nl, rng);
            let tbb = random_hermitian(nl, rng);
            let tab = ComplexMatrix::random(nl, nl, rng);
            AtomBlock::new(a, b, u, taa, tbb, tab)
        })
        .collect()
}

fn generate_hermitian_pair(n: usize, rng: &mut impl Rng) -> Result<Dataset> {
    let q = random_orthonormal(n, n, rng);
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect();
    let sq: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
    let f = diag_times(&sq, &q.conj_transpose());
    let g = random_orthonormal(n, n, rng);
    let mut lambda = d;
    lambda.sort_by(f64::total_cmp);
    Ok(Dataset::Factored {
        pencil: FactoredPencil::new(f, Signature::identity(n), g)?,
        lambda: Some(lambda),
    })
}

fn generate_gsvd_pair(n: usize, m: usize, kappa: f64, neg: usize, rng: &mut impl Rng) -> Result<Dataset> {
    // rows of F split so that U_F^* J U_F = diag(I, -I)
    let m_neg = neg + (m - n) * neg / n;
    let (np, mp) = (n - neg, m - m_neg);
    let mut uf = ComplexMatrix::zeros(m, n);
    if np > 0 {
        uf.set_submatrix(0, 0, &random_orthonormal(mp, np, rng));
    }
    if neg > 0 {
        uf.set_submatrix(mp, np, &random_orthonormal(m_neg, neg, rng));
    }
    let ug = random_orthonormal(m, n, rng);
    // X = Q1 diag(s) Q2 with s log-spaced from 1 down to 1/kappa
    let s: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 1.0 } else { kappa.powf(-(i as f64) / (n - 1) as f64) })
        .collect();
    let q1 = random_orthonormal(n, n, rng);
    let q2 = random_orthonormal(n, n, rng);
    let x = crate::kernel::matmul(&q1, crate::kernel::Op::N, &diag_times(&s, &q2), crate::kernel::Op::N);
    let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.37)).collect();
    let a: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let b: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let f = crate::kernel::matmul(&uf, crate::kernel::Op::N, &diag_times(&a, &x), crate::kernel::Op::N);
    let g = crate::kernel::matmul(&ug, crate::kernel::Op::N, &diag_times(&b, &x), crate::kernel::Op::N);
    let mut lambda: Vec<f64> = (0..n)
        .map(|i| {
            let r = (a[i] / b[i]).powi(2);
            if i >= np {
                -r
            } else {
                r
            }
        })
        .collect();
    lambda.sort_by(f64::total_cmp);
    Ok(Dataset::Factored {
        pencil: FactoredPencil::new(f, Signature::sorted(mp, m_neg), g)?,
        lambda: Some(lambda),
    })
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    match *spec {
        GeneratorSpec::Atoms { na, nl, ng } => Ok(Dataset::Atoms(generate_atoms(na, nl, ng, &mut rng)?)),
        GeneratorSpec::HermitianPair { n } => generate_hermitian_pair(n, &mut rng),
        GeneratorSpec::GsvdPair { n, m, kappa, neg } => generate_gsvd_pair(n, m, kappa, neg, &mut rng),
    }
}

const MANIFEST: &str = "manifest.txt";

/// Writes `manifest.txt` plus one binary file per matrix.
pub fn save_dataset(dir: &Path, data: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    match data {
        Dataset::Atoms(atoms) => {
            let a0 = &atoms[0];
            fs::write(
                dir.join(MANIFEST),
                format!("kind = atoms\nna = {}\nnl = {}\nng = {}\n", atoms.len(), a0.nl(), a0.ng()),
            )?;
            for (k, a) in atoms.iter().enumerate() {
                io::save_matrix(&dir.join(format!("atom{k}_A.ghp")), &a.a)?;
                io::save_matrix(&dir.join(format!("atom{k}_B.ghp")), &a.b)?;
                io::save_real_vector(&dir.join(format!("atom{k}_U.ghp")), &a.u)?;
                io::save_matrix(&dir.join(format!("atom{k}_TAA.ghp")), &a.taa)?;
                io::save_matrix(&dir.join(format!("atom{k}_TBB.ghp")), &a.tbb)?;
                io::save_matrix(&dir.join(format!("atom{k}_TAB.ghp")), &a.tab)?;
            }
        }
        Dataset::Factored { pencil, lambda } => {
            fs::write(
                dir.join(MANIFEST),
                format!(
                    "kind = factored\nm = {}\nn = {}\nexact_lambda = {}\n",
                    pencil.rows(),
                    pencil.cols(),
                    lambda.is_some()
                ),
            )?;
            io::save_matrix(&dir.join("F.ghp"), &pencil.f)?;
            io::save_signature(&dir.join("J.ghp"), &pencil.j)?;
            io::save_matrix(&dir.join("G.ghp"), &pencil.g)?;
            if let Some(l) = lambda {
                io::save_real_vector(&dir.join("lambda.ghp"), l)?;
            }
        }
    }
    Ok(())
}

fn manifest_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    match manifest_value(&text, "kind") {
        Some("atoms") => {
            let na: usize = manifest_value(&text, "na")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format("manifest lacks na".into()))?;
            let atoms = (0..na)
                .map(|k| {
                    let p = |s: &str| dir.join(format!("atom{k}_{s}.ghp"));
                    AtomBlock::new(
                        io::load_matrix(&p("A"))?,
                        io::load_matrix(&p("B"))?,
                        io::load_real_vector(&p("U"))?,
                        io::load_matrix(&p("TAA"))?,
                        io::load_matrix(&p("TBB"))?,
                        io::load_matrix(&p("TAB"))?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Dataset::Atoms(atoms))
        }
        Some("factored") => {
            let pencil = FactoredPencil::new(
                io::load_matrix(&dir.join("F.ghp"))?,
                io::load_signature(&dir.join("J.ghp"))?,
                io::load_matrix(&dir.join("G.ghp"))?,
            )?;
            let lp = dir.join("lambda.ghp");
            let lambda = if lp.exists() { Some(io::load_real_vector(&lp)?) } else { None };
            Ok(Dataset::Factored { pencil, lambda })
        }
        other => Err(Error::Format(format!("unknown dataset kind {other:?}"))),
    }
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::generate::{generate, load_dataset, Dataset, GeneratorSpec};
use super::oracle::generalized_eigen;
use crate::assembly::{assemble, form_hs, FactoredPencil};
use crate::finalize::{eigen_residual, invert, lu_complete, residuals};
use crate::hz::{hz, HzConfig, HzOutput};
use crate::io;
use crate::kernel::ComplexMatrix;
use crate::shorten::shorten;
use crate::{Error, Result};

/// Phases to run, ascending. Phase 2 may be skipped; otherwise the set has
/// no gaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseSet(Vec<u8>);

impl PhaseSet {
    pub fn new(mut phases: Vec<u8>) -> Result<Self> {
        phases.sort_unstable();
        phases.dedup();
        if phases.is_empty() || phases.iter().any(|p| !(1..=4).contains(p)) {
            return Err(Error::Config(format!("phases must be a non-empty subset of 1..4, got {phases:?}")));
        }
        for w in phases.windows(2) {
            if w[1] != w[0] + 1 && !(w[0] == 1 && w[1] == 3) {
                return Err(Error::Config(format!("phases {phases:?} leave a gap other than phase 2")));
            }
        }
        Ok(Self(phases))
    }

    pub fn all() -> Self {
        Self(vec![1, 2, 3, 4])
    }

    pub fn contains(&self, p: u8) -> bool {
        self.0.contains(&p)
    }

    pub fn first(&self) -> u8 {
        self.0[0]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

/// `1-4`, `3,4`, `1,3,4`, ...
impl FromStr for PhaseSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse phases {s:?}"));
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            if let Some((a, b)) = part.split_once('-') {
                let (a, b): (u8, u8) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        Self::new(out)
    }
}

#[derive(Clone, Debug)]
pub enum Input {
    Generate(GeneratorSpec),
    Dir(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// `None` runs from the dataset's first phase through Phase 4.
    pub phases: Option<PhaseSet>,
    pub input: Input,
    pub hz: HzConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub oracle: bool,
    /// Pass threshold for eigenvalue comparisons (max relative difference).
    pub tol: f64,
}

impl RunConfig {
    pub fn new(input: Input) -> Self {
        Self {
            phases: None,
            input,
            hz: HzConfig::default(),
            out: None,
            seed: 1,
            oracle: false,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Comparison {
    pub max_rel_diff: f64,
    pub pass: bool,
}

/// Largest relative difference between the sorted multisets.
pub fn compare(lambda: &[f64], reference: &[f64], tol: f64) -> Result<Comparison> {
    if lambda.len() != reference.len() {
        return Err(Error::Dimension(format!(
            "comparing {} eigenvalues with {}",
            lambda.len(),
            reference.len()
        )));
    }
    let mut a = lambda.to_vec();
    let mut b = reference.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let max_rel_diff = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            if d == 0.0 {
                0.0
            } else {
                d / y.abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(Comparison { max_rel_diff, pass: max_rel_diff <= tol })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OracleReport {
    /// `None` when the reference solver succeeded.
    pub failure: Option<String>,
    pub comparison: Option<Comparison>,
    pub eigen_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PhaseTime {
    pub phase: u8,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HzSummary {
    pub sweeps: usize,
    pub big_transforms: u64,
    pub all_transforms: u64,
    pub inner_sweeps: u64,
    pub converged: bool,
    pub history: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub input: String,
    pub seed: u64,
    pub phases: Vec<u8>,
    pub config: HzConfig,
    pub rows: usize,
    pub cols: usize,
    pub timings: Vec<PhaseTime>,
    pub hz: Option<HzSummary>,
    pub lambda: Vec<f64>,
    pub err_f: Option<f64>,
    pub err_g: Option<f64>,
    pub lu_perturbed: Option<usize>,
    pub kappa_z: Option<f64>,
    pub eigen_residual: Option<f64>,
    pub oracle: Option<OracleReport>,
    pub exact: Option<Comparison>,
    pub tol: f64,
    pub pass: bool,
}

impl Report {
    /// The report with wall times zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for t in &mut r.timings {
            t.seconds = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<18} {v}");
        };
        line("input", self.input.clone());
        line("seed", self.seed.to_string());
        line("phases", format!("{:?}", self.phases));
        line(
            "variant",
            format!(
                "{:?} outer={:?} inner={:?} threads={} lanes={}",
                self.config.variant,
                self.config.outer,
                self.config.inner,
                self.config.threads,
                self.config.lanes.get()
            ),
        );
        line("shape", format!("{} x {}", self.rows, self.cols));
        for t in &self.timings {
            line(&format!("phase {} time", t.phase), format!("{:.3} s", t.seconds));
        }
        if let Some(h) = &self.hz {
            line("sweeps", format!("{} (converged: {})", h.sweeps, h.converged));
            line("transforms", format!("{} big, {} total", h.big_transforms, h.all_transforms));
            if h.inner_sweeps > 0 {
                line("inner sweeps", h.inner_sweeps.to_string());
            }
        }
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
        line("errF", opt(self.err_f));
        line("errG", opt(self.err_g));
        line("kappa(Z) est.", opt(self.kappa_z));
        line("eigen residual", opt(self.eigen_residual));
        if let Some(o) = &self.oracle {
            match (&o.failure, &o.comparison) {
                (Some(msg), _) => line("oracle", format!("failed: {msg}")),
                (None, Some(c)) => line("oracle diff", format!("{:.3e} ({})", c.max_rel_diff, verdict(c.pass))),
                _ => {}
            }
            if let Some(r) = o.eigen_residual {
                line("oracle residual", format!("{r:.3e}"));
            }
        }
        if let Some(c) = &self.exact {
            line("exact diff", format!("{:.3e} ({})", c.max_rel_diff, verdict(c.pass)));
        }
        line("result", verdict(self.pass).to_string());
        s
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Everything a run produced.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// The tall pencil the run started from (after Phase 1 if it ran).
    pub pencil: Option<FactoredPencil>,
    /// The pencil handed to Phase 3.
    pub work: Option<FactoredPencil>,
    pub hz: Option<HzOutput>,
    /// Eigenvectors of the tall problem.
    pub z: Option<ComplexMatrix>,
    pub x: Option<ComplexMatrix>,
}

fn timed<T>(timings: &mut Vec<PhaseTime>, phase: u8, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let r = f().map_err(|e| e.in_phase(phase));
    timings.push(PhaseTime { phase, seconds: t0.elapsed().as_secs_f64() });
    r
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome> {
    let (data, input) = match &cfg.input {
        Input::Generate(spec) => (generate(spec, cfg.seed)?, spec.to_string()),
        Input::Dir(p) => (load_dataset(p)?, p.display().to_string()),
    };
    let phases = match &cfg.phases {
        Some(p) => p.clone(),
        None => PhaseSet::new((data.first_phase()..=4).collect())?,
    };
    let first = phases.first();
    let ok_start = match data {
        Dataset::Atoms(_) => first == 1,
        Dataset::Factored { .. } => first == 2 || first == 3,
    };
    if !ok_start {
        return Err(Error::Config(format!(
            "a dataset of this kind starts at phase {}, not {first}",
            data.first_phase()
        )));
    }
    let mut hzc = cfg.hz.clone();
    hzc.want_uv |= phases.contains(4);
    let mut timings = Vec::new();

    let (pencil, exact) = match data {
        Dataset::Atoms(atoms) => (timed(&mut timings, 1, || assemble(&atoms))?, None),
        Dataset::Factored { pencil, lambda } => (pencil, lambda),
    };
    let (work, perm) = if phases.contains(2) {
        let s = timed(&mut timings, 2, || shorten(&pencil, hzc.lanes))?;
        (s.pencil, Some(s.perm))
    } else {
        (pencil.clone(), None)
    };

    let mut report = Report {
        input,
        seed: cfg.seed,
        phases: phases.as_slice().to_vec(),
        config: hzc.clone(),
        rows: work.rows(),
        cols: work.cols(),
        timings: Vec::new(),
        hz: None,
        lambda: Vec::new(),
        err_f: None,
        err_g: None,
        lu_perturbed: None,
        kappa_z: None,
        eigen_residual: None,
        oracle: None,
        exact: None,
        tol: cfg.tol,
        pass: true,
    };
    let mut outcome = RunOutcome {
        report: report.clone(),
        pencil: Some(pencil.clone()),
        work: Some(work.clone()),
        hz: None,
        z: None,
        x: None,
    };
    if !phases.contains(3) {
        report.timings = timings;
        outcome.report = report;
        write_outputs(cfg.out.as_deref(), &outcome)?;
        return Ok(outcome);
    }

    let out = timed(&mut timings, 3, || hz(&work.f, &work.g, &work.j, &hzc))?;
    report.hz = Some(HzSummary {
        sweeps: out.stats.sweeps,
        big_transforms: out.stats.big,
        all_transforms: out.stats.all,
        inner_sweeps: out.inner_sweeps,
        converged: out.stats.converged,
        history: out.stats.history.clone(),
    });
    report.lambda = out.lambda.clone();
    report.pass &= out.stats.converged;

    if phases.contains(4) {
        let (x, lu) = timed(&mut timings, 4, || {
            let lu = lu_complete(&out.z);
            Ok((invert(&lu), lu))
        })?;
        let (u, v) = (out.u.as_ref().expect("U requested"), out.v.as_ref().expect("V requested"));
        let (ef, eg) = residuals(&work.f, &work.g, u, v, &out.sigma_f, &out.sigma_g, &x);
        report.err_f = Some(ef);
        report.err_g = Some(eg);
        report.lu_perturbed = Some(lu.perturbed);
        report.kappa_z = Some(lu.kappa_estimate());
        outcome.x = Some(x);
    }

    // eigenvectors of the tall pencil: undo the column permutation of Phase 2
    let z = match &perm {
        Some(p) => {
            let mut zt = ComplexMatrix::zeros(out.z.rows(), out.z.cols());
            for (c, &pc) in p.iter().enumerate() {
                for k in 0..out.z.cols() {
                    zt[(pc, k)] = out.z[(c, k)];
                }
            }
            zt
        }
        None => out.z.clone(),
    };
    let (h, s) = form_hs(&pencil);
    report.eigen_residual = Some(eigen_residual(&h, &s, &z, &out.lambda));

    if cfg.oracle {
        report.oracle = Some(match generalized_eigen(&h, &s) {
            Ok(sol) => {
                let c = compare(&out.lambda, &sol.lambda, cfg.tol)?;
                report.pass &= c.pass;
                OracleReport {
                    failure: None,
                    comparison: Some(c),
                    eigen_residual: Some(eigen_residual(&h, &s, &sol.z, &sol.lambda)),
                }
            }
            Err(e) => OracleReport { failure: Some(e.to_string()), comparison: None, eigen_residual: None },
        });
    }
    if let Some(l) = &exact {
        let c = compare(&out.lambda, l, cfg.tol)?;
        report.pass &= c.pass;
        report.exact = Some(c);
    }
    report.timings = timings;
    outcome.report = report;
    outcome.hz = Some(out);
    outcome.z = Some(z);
    write_outputs(cfg.out.as_deref(), &outcome)?;
    Ok(outcome)
}

fn write_outputs(dir: Option<&Path>, o: &RunOutcome) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), o.report.to_json())?;
    std::fs::write(dir.join("report.txt"), o.report.to_text())?;
    if let Some(h) = &o.hz {
        io::save_real_vector(&dir.join("lambda.ghp"), &h.lambda)?;
    }
    if let Some(z) = &o.z {
        io::save_matrix(&dir.join("Z.ghp"), z)?;
    }
    if let Some(x) = &o.x {
        io::save_matrix(&dir.join("X.ghp"), x)?;
    }
    Ok(())
}

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always show up in
//! `cargo test` output. Exits non-zero if a gated criterion fails.

use std::collections::HashSet;
use std::time::Instant;

use ghsvd::assembly::{form_hs, hebpj, FactoredPencil};
use ghsvd::harness::{compare, generalized_eigen, generate, oracle, run_pipeline, Dataset, Input, RunConfig};
use ghsvd::hz::{
    compute_transform, hz, HzConfig, PivotBlock2, Strategy, StrategyKind, TransformKind, Variant,
};
use ghsvd::kernel::{matmul, scale_rows, Op, Rotation2};
use ghsvd::shorten::shorten;
use ghsvd::{ComplexMatrix, Lanes, Signature, C64};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const EPS: f64 = f64::EPSILON;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn factored(spec: &str, seed: u64) -> (FactoredPencil, Vec<f64>) {
    match generate(&spec.parse().unwrap(), seed).unwrap() {
        Dataset::Factored { pencil, lambda: Some(l) } => (pencil, l),
        _ => panic!("{spec} has no known spectrum"),
    }
}

fn c1_hebpj() -> Outcome {
    let t0 = Instant::now();
    let mut rng = Xoshiro256StarStar::seed_from_u64(101);
    let mut worst_ratio = 0.0f64;
    let mut parts = Vec::new();
    for n in [8, 98, 242] {
        let mut t = ComplexMatrix::random(n, n, &mut rng);
        t.symmetrize();
        let r = hebpj(&t);
        let back = matmul(&r.m, Op::C, &scale_rows(&r.m, &r.j), Op::N);
        let err = t.sub(&back).frobenius_norm() / t.frobenius_norm();
        let bound = 100.0 * (n * n) as f64 * EPS;
        worst_ratio = worst_ratio.max(err / bound);
        parts.push(format!("n={n} {err:.1e}"));
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst_ratio <= 1.0 && secs < 5.0,
        format!("{} (≤ 100·n²·ε), {secs:.2} s", parts.join(", ")),
    )
}

/// `‖P^T X1 P − X0‖_F / ‖X0‖_F` for the column gather `perm`.
fn grammian_error(x1: &ComplexMatrix, x0: &ComplexMatrix, perm: &[usize]) -> f64 {
    let n = perm.len();
    let mut back = ComplexMatrix::zeros(n, n);
    for (a, &pa) in perm.iter().enumerate() {
        for (b, &pb) in perm.iter().enumerate() {
            back[(pa, pb)] = x1[(a, b)];
        }
    }
    back.sub(x0).frobenius_norm() / x0.frobenius_norm()
}

fn c2_shorten() -> Outcome {
    let (m, n) = (2000, 200);
    let mut rng = Xoshiro256StarStar::seed_from_u64(102);
    let signs: Vec<i8> = (0..m).map(|_| if rng.gen_bool(0.3) { -1 } else { 1 }).collect();
    let tall = FactoredPencil::new(
        ComplexMatrix::random(m, n, &mut rng),
        Signature::encode(&signs).unwrap(),
        ComplexMatrix::random(m, n, &mut rng),
    )
    .unwrap();
    let t0 = Instant::now();
    let short = shorten(&tall, Lanes::DEFAULT).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let (h0, s0) = form_hs(&tall);
    let (h1, s1) = form_hs(&short.pencil);
    let eh = grammian_error(&h1, &h0, &short.perm);
    let es = grammian_error(&s1, &s0, &short.perm);
    outcome(
        eh <= 1e-11 && es <= 1e-11 && secs < 30.0,
        format!("H {eh:.1e}, S {es:.1e} (≤ 1e-11), {secs:.2} s"),
    )
}

fn c3_residuals() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [100, 300, 500] {
        let spec = format!("gsvd-pair:n={n},m={},kappa=10,neg={}", n + n / 4, n / 4);
        let mut cfg = RunConfig::new(Input::Generate(spec.parse().unwrap()));
        cfg.hz.threads = 4;
        cfg.seed = 103;
        let t0 = Instant::now();
        let r = run_pipeline(&cfg).unwrap().report;
        let secs = t0.elapsed().as_secs_f64();
        let (ef, eg) = (r.err_f.unwrap(), r.err_g.unwrap());
        ok &= ef <= 1e-11 && eg <= 1e-11 && (n < 500 || secs < 300.0);
        parts.push(format!("n={n} errF {ef:.1e} errG {eg:.1e} {secs:.1}s"));
    }
    outcome(ok, format!("{} (≤ 1e-11)", parts.join("; ")))
}

fn kappa_s(s: &ComplexMatrix) -> f64 {
    let (ev, _, _) = oracle::hermitian_eigen(s);
    let hi = ev.iter().copied().fold(0.0, f64::max);
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn c4_oracle() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, variant) in [
        ("gsvd-pair:n=120,m=150,kappa=30,neg=40", Variant::Vp),
        ("gsvd-pair:n=300,m=360,kappa=100,neg=100", Variant::Bo),
        ("atoms:na=4,nl=12,ng=80", Variant::Bo),
    ] {
        let mut cfg = RunConfig::new(Input::Generate(spec.parse().unwrap()));
        cfg.hz.variant = variant;
        cfg.hz.threads = 4;
        cfg.seed = 104;
        let out = run_pipeline(&cfg).unwrap();
        let (h, s) = form_hs(out.pencil.as_ref().unwrap());
        let kappa = kappa_s(&s);
        let reference = generalized_eigen(&h, &s).unwrap();
        let d = compare(&out.report.lambda, &reference.lambda, 1e-9).unwrap();
        ok &= kappa <= 1e6 && d.pass;
        parts.push(format!("{spec} κ(S)={kappa:.0e} diff {:.1e}", d.max_rel_diff));
    }
    outcome(ok, format!("{} (≤ 1e-9)", parts.join("; ")))
}

fn c5_gsvd() -> Outcome {
    let (p, _) = factored("gsvd-pair:n=200,m=200,kappa=100,neg=0", 105);
    assert!(p.j.is_identity());
    let out = hz(&p.f, &p.g, &p.j, &HzConfig { threads: 4, ..Default::default() }).unwrap();
    let sv: Vec<f64> = out.sigma_f.iter().zip(&out.sigma_g).map(|(a, b)| a / b).collect();
    // reference generalized singular values from the dense pencil (F*F, G*G)
    let ff = matmul(&p.f, Op::C, &p.f, Op::N);
    let gg = matmul(&p.g, Op::C, &p.g, Op::N);
    let reference: Vec<f64> = generalized_eigen(&ff, &gg).unwrap().lambda.iter().map(|l| l.sqrt()).collect();
    let d = compare(&sv, &reference, 1e-10).unwrap();
    outcome(d.pass, format!("n=200 max relative difference {:.1e} (≤ 1e-10)", d.max_rel_diff))
}

/// Off-diagonal of `Z^* [[a, b], [conj b, d]] Z` and its diagonal.
fn congruence(z: &Rotation2, a: f64, b: C64, d: f64) -> (C64, C64, C64) {
    let (ca, cd) = (C64::new(a, 0.0), C64::new(d, 0.0));
    let m = |x1: C64, x2: C64, y1: C64, y2: C64| x1.conj() * (ca * y1 + b * y2) + x2.conj() * (b.conj() * y1 + cd * y2);
    (m(z.z11, z.z21, z.z11, z.z21), m(z.z11, z.z21, z.z12, z.z22), m(z.z12, z.z22, z.z12, z.z22))
}

fn c6_kernel() -> Outcome {
    let t0 = Instant::now();
    let mut rng = Xoshiro256StarStar::seed_from_u64(106);
    let (mut worst_s, mut worst_h) = (0.0f64, 0.0f64);
    let mut raw_h = 0.0f64;
    let mut kinds = [0usize; 4];
    let mut identity_ok = true;
    for i in 0..10_000 {
        let spp = 10f64.powf(rng.gen_range(-3.0..3.0));
        let sqq = 10f64.powf(rng.gen_range(-3.0..3.0));
        let ph = rng.gen_range(0.0..std::f64::consts::TAU);
        let x: f64 = rng.gen_range(0.0..0.99);
        let mut b = PivotBlock2 {
            hpp: rng.gen_range(-2.0..2.0),
            hqq: rng.gen_range(-2.0..2.0),
            hpq: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            spp,
            sqq,
            spq: C64::from_polar(x * (spp * sqq).sqrt(), ph),
        };
        match i % 4 {
            // already diagonal
            1 => {
                b.hpq = C64::new(0.0, 0.0);
                b.spq = C64::new(0.0, 0.0);
            }
            // x = 0: an ordinary Jacobi rotation
            2 => b.spq = C64::new(0.0, 0.0),
            // h = v = 0: equal scaled diagonals, hpq parallel to spq
            3 => {
                let a = rng.gen_range(-2.0..2.0);
                b.hpp = a * spp;
                b.hqq = a * sqq;
                b.hpq = C64::from_polar(rng.gen_range(0.1..1.0) * (spp * sqq).sqrt(), ph);
            }
            _ => {}
        }
        let t = compute_transform(&b).unwrap();
        kinds[match t.kind {
            TransformKind::Identity => 0,
            TransformKind::Small => 1,
            TransformKind::Big => 2,
        }] += 1;
        // already diagonal pairs are left alone (no D0 scaling either)
        let diagonal = i % 4 == 1;
        if diagonal || t.kind == TransformKind::Identity {
            identity_ok &= diagonal && t.kind == TransformKind::Identity && t.z == Rotation2::IDENTITY;
            continue;
        }
        // undo the diagonal scaling: Ẑ = D0^{-1} Ẑ'
        let (p, dp, dq) = b.prescaled();
        let z = Rotation2::new(t.z.z11 / dp, t.z.z12 / dp, t.z.z21 / dq, t.z.z22 / dq);
        let zn = [z.z11, z.z12, z.z21, z.z22].iter().map(|w| w.norm_sqr()).sum::<f64>();
        let (s11, s12, s22) = congruence(&z, 1.0, p.spq, 1.0);
        let serr = (s11 - 1.0).norm().max(s12.norm()).max((s22 - 1.0).norm());
        let (_, h12, _) = congruence(&z, p.hpp, p.hpq, p.hqq);
        let hn = (p.hpp * p.hpp + p.hqq * p.hqq + 2.0 * p.hpq.norm_sqr()).sqrt();
        worst_s = worst_s.max(serr / (zn * (1.0 + p.spq.norm())));
        worst_h = worst_h.max(h12.norm() / (zn * hn));
        raw_h = raw_h.max(h12.norm() / hn);
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        worst_s <= 64.0 * EPS && worst_h <= 64.0 * EPS && identity_ok && kinds[0] == 2500 && secs < 10.0,
        format!(
            "S {:.1}ε, H off-diagonal {:.1}ε relative to ‖Ẑ‖² (≤ 64ε; unscaled {:.1}ε), identity/small/big = {}/{}/{}, {secs:.2} s",
            worst_s / EPS,
            worst_h / EPS,
            raw_h / EPS,
            kinds[0],
            kinds[1],
            kinds[2]
        ),
    )
}

/// Disjoint pairs in every step and every pair covered; `cyclic` also
/// requires each pair exactly once per sweep.
fn check_table(s: &Strategy, cyclic: bool) -> Result<(), String> {
    let n = s.n;
    let mut seen = HashSet::new();
    for step in &s.steps {
        let mut used = vec![false; n];
        for &(p, q) in step {
            if p >= q || q >= n {
                return Err(format!("bad pair ({p}, {q})"));
            }
            if std::mem::replace(&mut used[p], true) || std::mem::replace(&mut used[q], true) {
                return Err(format!("index reused in a step at ({p}, {q})"));
            }
            if !seen.insert((p, q)) && cyclic {
                return Err(format!("pair ({p}, {q}) repeated"));
            }
        }
    }
    if seen.len() != n * (n - 1) / 2 {
        return Err(format!("{} of {} pairs covered", seen.len(), n * (n - 1) / 2));
    }
    Ok(())
}

fn c7_strategies() -> Outcome {
    let t0 = Instant::now();
    let mut errors = Vec::new();
    let mut me_orders = 0;
    for n in (2..=256).step_by(2) {
        let mm = Strategy::new(StrategyKind::Mm, n).unwrap();
        if let Err(e) = check_table(&mm, false) {
            errors.push(format!("MM n={n}: {e}"));
        }
        let mm_steps = if n == 2 { 1 } else { n };
        if mm.steps.len() != mm_steps {
            errors.push(format!("MM n={n}: {} steps", mm.steps.len()));
        }
        if let Ok(me) = Strategy::new(StrategyKind::Me, n) {
            me_orders += 1;
            if let Err(e) = check_table(&me, true) {
                errors.push(format!("ME n={n}: {e}"));
            }
            if me.steps.len() != n - 1 || me.steps.iter().any(|s| s.len() != n / 2) {
                errors.push(format!("ME n={n}: not {} steps of {} pairs", n - 1, n / 2));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        errors.is_empty() && me_orders == 8 && secs < 10.0,
        format!(
            "128 MM orders, {me_orders} ME orders (powers of two), {} problems{}, {secs:.2} s",
            errors.len(),
            errors.first().map(|e| format!(", first: {e}")).unwrap_or_default()
        ),
    )
}

struct LargeRuns {
    vp_secs: f64,
    bo_secs: f64,
    threads: usize,
}

fn c8_sweeps() -> (Outcome, LargeRuns) {
    let (p, exact) = factored("gsvd-pair:n=1024,m=1024,kappa=10,neg=256", 108);
    let threads = 4;
    let timed = |variant| {
        let cfg = HzConfig { variant, threads, ..Default::default() };
        let t0 = Instant::now();
        let out = hz(&p.f, &p.g, &p.j, &cfg).unwrap();
        (variant, t0.elapsed().as_secs_f64(), out)
    };
    // VP and BO alternate twice and keep their faster time, so a slow
    // stretch on a shared machine does not land on one variant only
    let mut runs = vec![timed(Variant::Vp), timed(Variant::Bo)];
    for k in 0..2 {
        let again = timed(runs[k].0);
        assert_eq!(again.2.lambda, runs[k].2.lambda, "repeat run differs");
        runs[k].1 = runs[k].1.min(again.1);
    }
    runs.push(timed(Variant::Fb));
    let bo = &runs[1].2;
    let vs_vp = |k: usize| compare(&runs[k].2.lambda, &runs[0].2.lambda, 1e-9).unwrap();
    let (d_bo, d_fb) = (vs_vp(1), vs_vp(2));
    let d_exact = compare(&runs[0].2.lambda, &exact, 1e-9).unwrap();
    let pass = bo.stats.converged && bo.stats.sweeps <= 30 && d_bo.pass && d_fb.pass;
    let detail = format!(
        "n=1024 t={threads}: BO {} block sweeps (≤ 30); Λ vs VP: BO {:.1e}, FB {:.1e} (≤ 1e-9); VP vs exact {:.1e}; \
         sweeps VP/BO/FB {}/{}/{}, times {:.1}/{:.1}/{:.1} s (VP, BO best of two)",
        bo.stats.sweeps,
        d_bo.max_rel_diff,
        d_fb.max_rel_diff,
        d_exact.max_rel_diff,
        runs[0].2.stats.sweeps,
        runs[1].2.stats.sweeps,
        runs[2].2.stats.sweeps,
        runs[0].1,
        runs[1].1,
        runs[2].1
    );
    (outcome(pass, detail), LargeRuns { vp_secs: runs[0].1, bo_secs: runs[1].1, threads })
}

fn c9_determinism() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (spec, variant) in [("atoms:na=3,nl=10,ng=40", Variant::Bo), ("gsvd-pair:n=90,m=110,kappa=1e3,neg=30", Variant::Vp)] {
        let mut cfg = RunConfig::new(Input::Generate(spec.parse().unwrap()));
        cfg.hz.variant = variant;
        cfg.hz.threads = 3;
        cfg.seed = 109;
        let a = run_pipeline(&cfg).unwrap();
        let b = run_pipeline(&cfg).unwrap();
        let same = a.report.without_timings() == b.report.without_timings()
            && a.z == b.z
            && a.x == b.x
            && a.hz.as_ref().map(|h| (&h.f, &h.g)) == b.hz.as_ref().map(|h| (&h.f, &h.g));
        ok &= same;
        parts.push(format!("{spec} {variant:?}: {}", if same { "identical" } else { "differs" }));
    }
    outcome(ok, parts.join("; "))
}

fn c10_ill_conditioned() -> Outcome {
    let spec = "gsvd-pair:n=60,m=80,kappa=1e8,neg=20";
    let (p, exact) = factored(spec, 110);
    let (h, s) = form_hs(&p);
    let dense = match generalized_eigen(&h, &s) {
        Ok(sol) => {
            let e = compare(&sol.lambda, &exact, 1e-3).unwrap().max_rel_diff;
            (e > 1e-3, format!("dense solver error {e:.1e}"))
        }
        Err(e) => (true, format!("dense solver failed ({e})")),
    };
    let mut cfg = RunConfig::new(Input::Generate(spec.parse().unwrap()));
    cfg.seed = 110;
    cfg.hz.threads = 2;
    let r = run_pipeline(&cfg).unwrap().report;
    let res = r.eigen_residual.unwrap();
    let err = compare(&r.lambda, &exact, 0.0).unwrap().max_rel_diff;
    outcome(
        dense.0 && res <= 1e-8,
        format!("{}; pipeline eigen residual {res:.1e} (≤ 1e-8), eigenvalue error {err:.1e}", dense.1),
    )
}

fn c11_performance(runs: &LargeRuns) -> Outcome {
    let ratio = runs.bo_secs / runs.vp_secs;
    outcome(
        ratio < 1.0,
        format!(
            "BO/VP wall time {ratio:.2} at n=1024, t={} on {} hardware thread(s) (gate < 1.0)",
            runs.threads,
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failed = 0;
    let mut report = |k: usize, o: Outcome| {
        println!("criterion {k:>2}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    };
    report(1, c1_hebpj());
    report(2, c2_shorten());
    report(3, c3_residuals());
    report(4, c4_oracle());
    report(5, c5_gsvd());
    report(6, c6_kernel());
    report(7, c7_strategies());
    let (o8, runs) = c8_sweeps();
    report(8, o8);
    report(9, c9_determinism());
    report(10, c10_ill_conditioned());
    report(11, c11_performance(&runs));
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}

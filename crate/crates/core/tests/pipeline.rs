use ghsvd::harness::{
    compare, generalized_eigen, generate, run_pipeline, save_dataset, Dataset, Input, PhaseSet, RunConfig,
};
use ghsvd::assembly::form_hs;
use ghsvd::hz::Variant;
use ghsvd::{io, Error};
use proptest::prelude::*;

fn cfg(spec: &str) -> RunConfig {
    RunConfig::new(Input::Generate(spec.parse().unwrap()))
}

#[test]
fn saved_dataset_gives_the_same_run() {
    let spec = "gsvd-pair:n=40,m=52,kappa=1e2,neg=10";
    let dir = tempfile::tempdir().unwrap();
    save_dataset(dir.path(), &generate(&spec.parse().unwrap(), 3).unwrap()).unwrap();
    let mut a = cfg(spec);
    a.seed = 3;
    let mut b = RunConfig::new(Input::Dir(dir.path().to_path_buf()));
    b.seed = 3;
    let (ra, rb) = (run_pipeline(&a).unwrap(), run_pipeline(&b).unwrap());
    assert_eq!(ra.report.lambda, rb.report.lambda);
    assert_eq!(ra.z, rb.z);
    assert!(rb.report.exact.as_ref().unwrap().pass);
}

#[test]
fn outputs_match_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg("atoms:na=2,nl=6,ng=12");
    c.out = Some(dir.path().to_path_buf());
    c.hz.threads = 2;
    let o = run_pipeline(&c).unwrap();
    let lambda = io::load_real_vector(&dir.path().join("lambda.ghp")).unwrap();
    assert_eq!(lambda, o.report.lambda);
    let z = io::load_matrix(&dir.path().join("Z.ghp")).unwrap();
    assert_eq!(Some(z), o.z);
    let x = io::load_matrix(&dir.path().join("X.ghp")).unwrap();
    assert_eq!(Some(x), o.x);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["phases"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(json["pass"], serde_json::json!(true));
    let text = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("errF"));
}

#[test]
fn skipping_phase_two_gives_the_same_spectrum() {
    let spec = "gsvd-pair:n=36,m=48,kappa=10,neg=12";
    let mut short = cfg(spec);
    short.hz.variant = Variant::Vp;
    let mut direct = short.clone();
    direct.phases = Some("3-4".parse().unwrap());
    let (a, b) = (run_pipeline(&short).unwrap(), run_pipeline(&direct).unwrap());
    assert_eq!(b.report.rows, 48);
    assert_eq!(a.report.rows, 36);
    assert!(compare(&a.report.lambda, &b.report.lambda, 1e-10).unwrap().pass);
    assert!(b.report.err_f.unwrap() <= 1e-12);
}

#[test]
fn assembly_only_runs_no_iteration() {
    let mut c = cfg("atoms:na=2,nl=4,ng=8");
    c.phases = Some("1".parse().unwrap());
    let o = run_pipeline(&c).unwrap();
    assert!(o.hz.is_none() && o.report.lambda.is_empty());
    assert_eq!(o.pencil.unwrap().cols(), 8);
}

#[test]
fn phase_rules() {
    assert!("1,3".parse::<PhaseSet>().is_ok());
    assert!("1,4".parse::<PhaseSet>().is_err());
    let mut c = cfg("gsvd-pair:n=8");
    c.phases = Some("4".parse().unwrap());
    assert!(matches!(run_pipeline(&c), Err(Error::Config(_))));
}

#[test]
fn singular_g_is_a_numerical_failure_in_phase_three() {
    let dir = tempfile::tempdir().unwrap();
    let Dataset::Factored { mut pencil, .. } = generate(&"gsvd-pair:n=6".parse().unwrap(), 1).unwrap() else {
        unreachable!()
    };
    for v in pencil.g.col_mut(2) {
        *v = 0.0.into();
    }
    save_dataset(dir.path(), &Dataset::Factored { pencil, lambda: None }).unwrap();
    let mut c = RunConfig::new(Input::Dir(dir.path().to_path_buf()));
    c.phases = Some("3".parse().unwrap());
    let e = run_pipeline(&c).unwrap_err();
    assert!(e.is_numerical());
    assert!(matches!(e, Error::InPhase { phase: 3, .. }), "{e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Any small atom configuration: the pipeline's spectrum is the dense
    /// solver's and the eigenpairs satisfy the tall pencil.
    #[test]
    fn atoms_pipeline_matches_dense_solver(na in 1usize..4, nl in 2usize..6, frac in 0.3f64..1.0, seed in 0u64..500, vp in any::<bool>()) {
        let ng = ((2 * na * nl) as f64 * frac).ceil() as usize;
        let mut c = cfg(&format!("atoms:na={na},nl={nl},ng={ng}"));
        c.seed = seed;
        c.hz.threads = 2;
        c.hz.variant = if vp { Variant::Vp } else { Variant::Bo };
        let o = run_pipeline(&c).unwrap();
        prop_assert!(o.report.eigen_residual.unwrap() <= 1e-10);
        let (h, s) = form_hs(o.pencil.as_ref().unwrap());
        if let Ok(sol) = generalized_eigen(&h, &s) {
            let d = compare(&o.report.lambda, &sol.lambda, 1e-7).unwrap();
            prop_assert!(d.pass, "max relative difference {:e}", d.max_rel_diff);
        }
    }
}

use rankprep::adiabatic::{plan, run, trace_csv, RunOptions, Schedule};
use rankprep::bounds::{eval_bounds, BoundsOptions};
use rankprep::gridfn::{rescale_to_unit_density, sample_pointwise, standard_corpus, FunctionSpec, GridSpec};
use rankprep::sparsesim::{Backend, Mode};

fn lognormal(n: u32) -> rankprep::GridFunction {
    let g = GridSpec::new(0.0, 3.0, n).unwrap();
    sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, g).unwrap()
}

#[test]
fn cumulative_success_respects_probability_bound() {
    let r = 400;
    for entry in standard_corpus() {
        let f1 = rescale_to_unit_density(&entry.sample(5).unwrap()).unwrap();
        let probe = eval_bounds(&f1, r, 1.0, &BoundsOptions { empirical: false, t_override: Some(1.0), ..Default::default() })
            .unwrap();
        let a = probe.a_max;
        // Largest T with T²a²/r = 0.2.
        let t = (0.2 * r as f64).sqrt() / a;
        let opts = RunOptions { digits: None, track_fidelity: false, ..Default::default() };
        let out = run(&f1, &Schedule::uniform(r, t).unwrap(), &opts).unwrap();
        let leading = t * t * a * a / r as f64;
        let p = out.report.cumulative_success_prob;
        assert!(p >= 1.0 - 1.5 * leading, "{}: {p} < 1 − 1.5·{leading}", entry.spec);
        assert!(out.report.all_plus);
        assert_eq!(out.report.query_count, 4 * r as u64);
    }
}

#[test]
fn run_report_is_deterministic() {
    let f1 = lognormal(5);
    let schedule = plan(&f1, 64, 4.0, None).unwrap();
    for mode in [Mode::Postselect, Mode::Sample] {
        let opts = RunOptions { mode, seed: 99, backend: Backend::Taylor { m: 7 }, ..Default::default() };
        let a = serde_json::to_string(&run(&f1, &schedule, &opts).unwrap().report).unwrap();
        let b = serde_json::to_string(&run(&f1, &schedule, &opts).unwrap().report).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn infidelity_falls_with_step_count() {
    let f1 = lognormal(5);
    let opts = RunOptions { backend: Backend::Taylor { m: 7 }, track_fidelity: false, ..Default::default() };
    let infid = |r| run(&f1, &plan(&f1, r, 4.0, None).unwrap(), &opts).unwrap().report.final_infidelity;
    let coarse = infid(128);
    let fine = infid(256);
    assert!(fine / coarse <= 0.75, "{fine} / {coarse}");
}

#[test]
fn report_fields_are_consistent() {
    let f1 = lognormal(4);
    let schedule = plan(&f1, 32, 4.0, None).unwrap();
    let out = run(&f1, &schedule, &RunOptions::default()).unwrap();
    let rep = &out.report;
    assert!((0.0..=1.0).contains(&rep.final_infidelity));
    assert_eq!(rep.steps.len(), 32);
    let product: f64 = rep.steps.iter().map(|s| s.prob_plus).product();
    assert_eq!(product, rep.cumulative_success_prob);
    assert_eq!(rep.regime_dt_amax, rep.dt * rep.a_max_path);
    assert!((out.state.norm() - 1.0).abs() < 1e-12);
    let csv = trace_csv(rep).unwrap();
    assert_eq!(csv.lines().count(), 33);
    assert!(csv.starts_with("step,s,outcome,prob_plus,fidelity,op_error,renorm"));
}

#[test]
fn sample_mode_continues_after_rejection() {
    let f1 = lognormal(4);
    let schedule = Schedule::uniform(8, 40.0).unwrap();
    let opts = RunOptions { mode: Mode::Sample, seed: 5, ..Default::default() };
    let out = run(&f1, &schedule, &opts).unwrap();
    assert_eq!(out.report.all_plus, out.report.steps.iter().all(|s| s.outcome == 0));
    assert!(!out.report.all_plus, "coarse steps should reject at least once");
    assert!((out.state.norm() - 1.0).abs() < 1e-12);
}

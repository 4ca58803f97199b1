mod common;

use common::*;
use rayon::prelude::*;
use rankprep::bounds::{
    delta0_bound, delta1_bound, empirical_delta0, empirical_gap_and_delay, eval_bounds, norm_equivalence_study,
    prob_lower_bound, query_complexity_projection, BoundsOptions,
};
use rankprep::gridfn::{rescale_to_unit_density, standard_corpus, Encoding, GridSpec};
use rankprep::rank1::{delay_factor_bound, gap_lower_bound, unit_norm_ratio};

#[test]
fn random_instances_never_violate_gap_or_delay() {
    let grid = GridSpec::unit(8).unwrap();
    let violations: usize = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(1000 + i);
            let f1 = random_function(grid, &mut r);
            let (gap, delay) = empirical_gap_and_delay(&f1, 200).unwrap();
            usize::from(gap < gap_lower_bound(&f1)) + usize::from(delay > delay_factor_bound(&f1))
        })
        .sum();
    assert_eq!(violations, 0);
}

#[test]
fn corpus_delta0_within_bound() {
    for entry in standard_corpus() {
        for n in [4, 8] {
            let f1 = rescale_to_unit_density(&entry.sample(n).unwrap()).unwrap();
            let x = unit_norm_ratio(&f1);
            for r in [4, 16, 64] {
                let emp = empirical_delta0(&f1, r).unwrap();
                assert!(emp <= delta0_bound(x, r), "{} n={n} r={r}: {emp}", entry.spec);
            }
        }
    }
}

#[test]
fn corpus_bounds_reports_have_no_violations() {
    let opts = BoundsOptions { t_override: None, ..Default::default() };
    for entry in standard_corpus().into_iter().step_by(2) {
        let f1 = rescale_to_unit_density(&entry.sample(4).unwrap()).unwrap();
        let rep = eval_bounds(&f1, 64, 1.0, &opts).unwrap();
        assert!(rep.violations().is_empty(), "{}: {:?}", entry.spec, rep.violations());
        assert!(rep.total_deviation_empirical.is_some());
        assert_eq!(rep.query_count, 256);
        assert_eq!(rep.total_qubits, 2 * 4 + 32 + 2);
    }
}

#[test]
fn closed_forms_at_unit_density() {
    assert!((delta0_bound(1.0, 10) - 1.2).abs() < 1e-15);
    assert!((delta1_bound(2.0, 3.0, 5) - 6.0).abs() < 1e-15);
    assert!((prob_lower_bound(1.0, 2.0, 8) - 0.5).abs() < 1e-15);
    let f1 = rescale_to_unit_density(&standard_corpus()[3].sample(5).unwrap()).unwrap();
    assert!((gap_lower_bound(&f1) - 0.5).abs() < 1e-12);
    assert!((delay_factor_bound(&f1) - 8.0).abs() < 1e-12);
}

#[test]
fn query_projection_scales_with_filling_ratio() {
    let pw = |f| query_complexity_projection(f, 0.1, Encoding::Pointwise, 1.0).unwrap();
    let it = |f| query_complexity_projection(f, 0.1, Encoding::Integral, 1.0).unwrap();
    assert_eq!(pw(1.0), 100);
    assert_eq!(pw(0.5), 1600);
    assert_eq!(it(0.5), 400);
    assert!(query_complexity_projection(0.5, 1.5, Encoding::Pointwise, 1.0).is_err());
}

#[test]
fn norm_equivalence_residual_is_quadratic() {
    let study = norm_equivalence_study(200, (1e-3, 1e-1), 4).unwrap();
    assert!(study.slope >= 1.9, "slope {}", study.slope);
    assert!(study.points.iter().all(|p| p.delta_u <= p.t * p.delta_h * (1.0 + 1e-9)));
}

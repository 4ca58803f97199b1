mod common;

use common::*;
use rankprep::gridfn::{rescale_to_unit_density, standard_corpus, GridSpec};
use rankprep::rank1::{matrix_norms, Rank1Hamiltonian};
use rankprep::sparsesim::{apply_sa_exact, init_joint, lowrank_step, Backend, Mode, StepOptions};
use rankprep::{Error, StateVector};

fn corpus_hamiltonians(n: u32) -> Vec<(String, Rank1Hamiltonian)> {
    standard_corpus()
        .into_iter()
        .flat_map(|e| {
            let f1 = rescale_to_unit_density(&e.sample(n).unwrap()).unwrap();
            [0.0, 0.5, 1.0].map(|s| (format!("{} s={s}", e.spec), Rank1Hamiltonian::adiabatic(&f1, s, Some(32)).unwrap()))
        })
        .collect()
}

#[test]
fn postselected_step_obeys_error_and_probability_bounds() {
    let opts = StepOptions { backend: Backend::Exact, mode: Mode::Postselect, max_qubits: 12 };
    let mut r = rng(21);
    for (name, h) in corpus_hamiltonians(6) {
        let a = matrix_norms(&h).a_max;
        for psi in [StateVector::plus(h.grid()), random_state(h.grid(), &mut r)] {
            let mut errs = Vec::new();
            for x in [0.025, 0.05, 0.1] {
                let dt = x / a;
                let step = lowrank_step(&psi, &h, dt, &opts, &mut r).unwrap();
                assert!(step.op_error <= 2.5 * x * x * 1.5, "{name}: error {} at dt·a={x}", step.op_error);
                assert!(step.prob_plus >= 1.0 - x * x * 1.5, "{name}: prob {} at dt·a={x}", step.prob_plus);
                assert!((step.state.norm() - 1.0).abs() < 1e-12);
                errs.push(step.op_error);
            }
            for w in errs.windows(2) {
                if w[0] > 1e-13 {
                    let ratio = w[1] / w[0];
                    assert!((3.2..=4.8).contains(&ratio), "{name}: doubling ratio {ratio}");
                }
            }
        }
    }
}

#[test]
fn taylor_backend_tracks_exact_backend() {
    let mut r = rng(22);
    for (name, h) in corpus_hamiltonians(5) {
        let a = matrix_norms(&h).a_max;
        let psi = random_state(h.grid(), &mut r);
        let exact = StepOptions { backend: Backend::Exact, mode: Mode::Postselect, max_qubits: 12 };
        let taylor = StepOptions { backend: Backend::Taylor { m: 7 }, ..exact };
        let x = lowrank_step(&psi, &h, 0.1 / a, &exact, &mut r).unwrap();
        let y = lowrank_step(&psi, &h, 0.1 / a, &taylor, &mut r).unwrap();
        assert!(max_abs_diff(&x.state.amplitudes, &y.state.amplitudes) < 1e-9, "{name}");
        assert!(y.renorm.unwrap() > 0.0);
    }
}

#[test]
fn sa_exact_preserves_norm() {
    let mut r = rng(23);
    for (_, h) in corpus_hamiltonians(5).into_iter().step_by(5) {
        let mut j = init_joint(&random_state(h.grid(), &mut r), 12).unwrap();
        apply_sa_exact(&mut j, &h, 3.7).unwrap();
        assert!((j.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sample_mode_is_reproducible() {
    let (_, h) = corpus_hamiltonians(5).swap_remove(10);
    let psi = StateVector::plus(h.grid());
    let opts = StepOptions { backend: Backend::Exact, mode: Mode::Sample, max_qubits: 12 };
    let dt = 2.0 / matrix_norms(&h).a_max;
    let run = |seed| {
        let mut r = rng(seed);
        (0..20).map(|_| lowrank_step(&psi, &h, dt, &opts, &mut r).unwrap()).collect::<Vec<_>>()
    };
    let (a, b) = (run(7), run(7));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.outcome, y.outcome);
        assert_eq!(x.state.amplitudes, y.state.amplitudes);
    }
    assert!(a.iter().any(|s| s.outcome != 0), "large dt should produce rejected outcomes");
}

#[test]
fn joint_register_respects_qubit_cap() {
    let psi = StateVector::plus(GridSpec::unit(7).unwrap());
    assert!(matches!(init_joint(&psi, 6), Err(Error::ResourceCap { requested: 7, cap: 6, .. })));
    assert!(init_joint(&psi, 7).is_ok());
}

//! Phase-estimation, Hadamard-test, integration and Grover–Rudolph procedures.

pub mod grover_rudolph;
pub mod hadamard;
pub mod integrate;
pub mod qpe;

pub use grover_rudolph::{grover_rudolph_reference, GroverRudolphOutput};
pub use hadamard::{
    c2_of, fit_cosine, hadamard_test_prepare, normalization_sweep, verify_state, CosineFit,
    HadamardTestResult, Verification,
};
pub use integrate::{integrate_lipschitz, IntegralEstimate, IntegrateOptions, NormEstimator};
pub use qpe::{
    estimate_normalization_qpe, qpe_distribution, qpe_prepare, NormEstimate, NormEstimateOptions,
    QpeDistribution, QpeEngine, QpeResult,
};

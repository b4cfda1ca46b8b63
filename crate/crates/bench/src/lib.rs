//! Shared fixtures for the benchmarks.

use tempsort::dgp::{generate, DgpConfig, DgpKind};
use tempsort::mrnn::{MrnnConfig, MrnnParams};
use tempsort::tpl::{derive_pairs, PairwiseSample};
use tempsort::{build_grid, encode_all, Dataset, DiscountSchedule, EncodedAlternative, Grid};

pub struct Fixture {
    pub data: Dataset,
    pub grid: Grid,
    pub encoded: Vec<EncodedAlternative>,
}

/// A generated dataset with its grid and encodings.
pub fn fixture(n: usize, gamma: usize) -> Fixture {
    let (data, _) = generate(&DgpConfig::new(DgpKind::Basic, n, 1)).expect("generate");
    let grid = build_grid(&data, gamma).expect("grid");
    let encoded = encode_all(&data, &grid).expect("encode");
    Fixture { data, grid, encoded }
}

pub fn pairs(fx: &Fixture, tau: f64, cap: usize) -> Vec<PairwiseSample> {
    let schedule = DiscountSchedule::for_shape(tau, fx.grid.shape()).expect("schedule");
    derive_pairs(&fx.encoded, &schedule, Some(cap), 0).expect("pairs")
}

pub fn network(fx: &Fixture, hidden_size: usize) -> (MrnnConfig, MrnnParams) {
    let shape = fx.grid.shape();
    let config = MrnnConfig {
        criteria: shape.criteria,
        horizon: shape.horizon,
        gamma: shape.gamma,
        hidden_size,
        class_count: fx.data.class_count(),
        ..MrnnConfig::default()
    };
    let params = MrnnParams::init(&config).expect("init");
    (config, params)
}

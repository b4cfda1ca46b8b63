//! Synthetic sorting problems: Fourier-mixture series, known sub-marginals,
//! a self-discounting recurrence and a sigmoid label rule.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use serde::{Deserialize, Serialize};

use crate::dataset::{Alternative, Dataset};
use crate::error::{Error, Result};
use crate::numeric::sigmoid;

pub const BASIS_SIZE: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DgpKind {
    Basic,
    NonMarkovian,
    NonMonotonic,
    NonIndependent,
}

impl DgpKind {
    pub const ALL: [DgpKind; 4] =
        [DgpKind::Basic, DgpKind::NonMarkovian, DgpKind::NonMonotonic, DgpKind::NonIndependent];

    pub fn name(self) -> &'static str {
        match self {
            DgpKind::Basic => "basic",
            DgpKind::NonMarkovian => "non-markovian",
            DgpKind::NonMonotonic => "non-monotonic",
            DgpKind::NonIndependent => "non-independent",
        }
    }
}

impl fmt::Display for DgpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DgpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_lowercase();
        DgpKind::ALL
            .into_iter()
            .find(|k| k.name().replace('-', "") == key)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown generator kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub kind: DgpKind,
    pub n_samples: usize,
    pub criteria: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl DgpConfig {
    pub fn new(kind: DgpKind, n_samples: usize, seed: u64) -> Self {
        Self { kind, n_samples, criteria: 4, horizon: 20, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be positive".into()));
        }
        if self.criteria == 0 || self.horizon == 0 {
            return Err(Error::InvalidArgument("criteria and horizon must be positive".into()));
        }
        if self.kind == DgpKind::NonIndependent && self.criteria != 4 {
            return Err(Error::InvalidArgument("the interaction generator needs exactly 4 criteria".into()));
        }
        Ok(())
    }
}

/// The sine basis `sin(omega_i pi t)` with `omega = 0.10, 0.15, ..., 0.50`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub omegas: [f64; BASIS_SIZE],
}

impl Default for BasisSet {
    fn default() -> Self {
        Self { omegas: std::array::from_fn(|i| (10 + 5 * i) as f64 / 100.0) }
    }
}

impl BasisSet {
    /// `sum_i beta_i sin(omega_i pi t)` at 1-based integer time `t`.
    pub fn eval(&self, beta: &[f64; BASIS_SIZE], t: usize) -> f64 {
        let t = t as f64;
        self.omegas
            .iter()
            .zip(beta)
            .map(|(w, b)| b * (w * std::f64::consts::PI * t).sin())
            .sum()
    }

    pub fn series(&self, beta: &[f64; BASIS_SIZE], horizon: usize) -> Vec<f64> {
        (1..=horizon).map(|t| self.eval(beta, t)).collect()
    }
}

/// Draws uniform simplex weights and evaluates the mixture at `t = 1..=horizon`.
pub fn gen_series<R: Rng + ?Sized>(
    basis: &BasisSet,
    horizon: usize,
    rng: &mut R,
) -> (Vec<f64>, [f64; BASIS_SIZE]) {
    let dirichlet = Dirichlet::new([1.0; BASIS_SIZE]).expect("unit concentrations are valid");
    let beta: [f64; BASIS_SIZE] = dirichlet.sample(rng);
    (basis.series(&beta, horizon), beta)
}

/// Ground-truth sub-marginals, one row per recurrence channel.
pub fn true_sub_marginal(kind: DgpKind, g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let horizon = g.first().map_or(0, Vec::len);
    Ok(match kind {
        DgpKind::Basic => g.iter().map(|s| s.iter().map(|x| x.tanh()).collect()).collect(),
        DgpKind::NonMarkovian => g
            .iter()
            .map(|s| {
                (0..horizon).map(|t| (s[t] + if t > 0 { s[t - 1] } else { 0.0 }).tanh()).collect()
            })
            .collect(),
        DgpKind::NonMonotonic => g
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let freq = 2f64.powi(j as i32) * std::f64::consts::PI;
                s.iter().map(|x| (freq * x).sin()).collect()
            })
            .collect(),
        DgpKind::NonIndependent => {
            if g.len() != 4 {
                return Err(Error::dims(4, g.len()));
            }
            vec![
                (0..horizon).map(|t| (g[0][t] + g[1][t]).tanh()).collect(),
                (0..horizon).map(|t| (g[2][t] + g[3][t]).tanh()).collect(),
            ]
        }
    })
}

/// Runs `u^t = tau u^{t-1} + (1 - tau) f^t` with `tau = sigmoid(u^{t-2})` and
/// zero history, returning `(u, tau)` with `tau` of length `T - 1`.
pub fn true_marginal_recurrence(f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(f.len());
    let mut tau = Vec::with_capacity(f.len().saturating_sub(1));
    for (t, &ft) in f.iter().enumerate() {
        if t == 0 {
            u.push(ft);
            continue;
        }
        let older = if t >= 2 { u[t - 2] } else { 0.0 };
        let d = sigmoid(older);
        tau.push(d);
        u.push(d * u[t - 1] + (1.0 - d) * ft);
    }
    (u, tau)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTruth {
    pub betas: Vec<[f64; BASIS_SIZE]>,
    pub sub_marginal: Vec<Vec<f64>>,
    pub discount: Vec<Vec<f64>>,
    pub marginal: Vec<Vec<f64>>,
    /// `sigmoid(sum_channel u^T)`.
    pub comprehensive: f64,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub kind: DgpKind,
    pub samples: Vec<SampleTruth>,
}

/// Class 2 (positive) when the comprehensive value is at least 0.5.
pub fn label_for(comprehensive: f64) -> usize {
    if comprehensive >= 0.5 {
        2
    } else {
        1
    }
}

fn sample(config: &DgpConfig, basis: &BasisSet, index: usize) -> Result<(Vec<Vec<f64>>, SampleTruth)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let (series, betas): (Vec<_>, Vec<_>) =
        (0..config.criteria).map(|_| gen_series(basis, config.horizon, &mut rng)).unzip();
    let f = true_sub_marginal(config.kind, &series)?;
    let (marginal, discount): (Vec<_>, Vec<_>) = f.iter().map(|c| true_marginal_recurrence(c)).unzip();
    let total: f64 = marginal.iter().map(|u| u[u.len() - 1]).sum();
    let comprehensive = sigmoid(total);
    let label = label_for(comprehensive);
    Ok((series, SampleTruth { betas, sub_marginal: f, discount, marginal, comprehensive, label }))
}

/// Generates a labelled two-class dataset. Each sample uses its own stream
/// of a generator keyed by the seed, so output does not depend on ordering.
pub fn generate(config: &DgpConfig) -> Result<(Dataset, GroundTruth)> {
    config.validate()?;
    let basis = BasisSet::default();
    let mut alternatives = Vec::with_capacity(config.n_samples);
    let mut samples = Vec::with_capacity(config.n_samples);
    for i in 0..config.n_samples {
        let (series, truth) = sample(config, &basis, i)?;
        alternatives.push(Alternative::new(format!("s{:05}", i + 1), series, Some(truth.label)));
        samples.push(truth);
    }
    let names = (1..=config.criteria).map(|j| format!("g{j}")).collect();
    let dataset = Dataset::new(names, config.horizon, 2, alternatives)?;
    Ok((dataset, GroundTruth { kind: config.kind, samples }))
}

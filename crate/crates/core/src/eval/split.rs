use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self { train: 0.6, validation: 0.2, test: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub folds: Vec<Fold>,
}

/// Shuffles `0..n` once, then for fold `f` rotates the permutation by
/// `floor(f n / k)` and cuts it into test, validation and train blocks.
pub fn kfold_split(n: usize, k: usize, ratios: SplitRatios, seed: u64) -> Result<FoldSplit> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    let parts = [ratios.train, ratios.validation, ratios.test];
    if parts.iter().any(|r| !(*r >= 0.0)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("split ratios must be non-negative and sum to 1: {parts:?}")));
    }
    let n_test = (ratios.test * n as f64).round() as usize;
    let n_val = (ratios.validation * n as f64).round() as usize;
    if n_test == 0 || n_val == 0 || n_test + n_val >= n {
        return Err(Error::TooFewSamples { n, k });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let folds = (0..k)
        .map(|f| {
            let mut rotated = perm.clone();
            rotated.rotate_left(f * n / k);
            let (test, rest) = rotated.split_at(n_test);
            let (validation, train) = rest.split_at(n_val);
            Fold { train: train.to_vec(), validation: validation.to_vec(), test: test.to_vec() }
        })
        .collect();
    Ok(FoldSplit { folds })
}

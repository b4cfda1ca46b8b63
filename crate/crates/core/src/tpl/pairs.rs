use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::EncodedAlternative;
use crate::value::DiscountSchedule;

/// Default upper bound on the number of pairs handed to the solvers.
pub const DEFAULT_PAIR_CAP: usize = 20_000;

/// One preference constraint `y * u . v_diff >= 1 - xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseSample {
    /// Discount-weighted `v(a) - v(b)`.
    pub v_diff: Vec<f64>,
    /// `+1` when `a` is preferred to `b`, `-1` otherwise.
    pub y: f64,
}

impl PairwiseSample {
    pub fn new(v_diff: Vec<f64>, y: f64) -> Result<Self> {
        if y != 1.0 && y != -1.0 {
            return Err(Error::InvalidArgument(format!("pair sign must be +-1, got {y}")));
        }
        if v_diff.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue("pair difference vector".into()));
        }
        Ok(Self { v_diff, y })
    }
}

/// Turns labelled encodings into pairs `(a, b)` with `label(a) > label(b)`.
///
/// When more than `cap` pairs exist, a seeded uniform subsample is kept that
/// still contains at least one pair for every pair of consecutive classes
/// present in the data.
pub fn derive_pairs(
    encoded: &[EncodedAlternative],
    schedule: &DiscountSchedule,
    cap: Option<usize>,
    seed: u64,
) -> Result<Vec<PairwiseSample>> {
    let labels: Vec<usize> = encoded
        .iter()
        .map(|e| {
            e.label.ok_or_else(|| Error::InvalidArgument(format!("alternative `{}` has no label", e.id)))
        })
        .collect::<Result<_>>()?;
    let present: BTreeSet<usize> = labels.iter().copied().collect();
    if present.len() < 2 {
        return Err(Error::SingleClass);
    }
    let Some(first) = encoded.first() else {
        return Err(Error::EmptyDataset);
    };
    let shape = first.shape();
    if schedule.criteria() != shape.criteria || schedule.horizon() != shape.horizon {
        return Err(Error::dims(
            format!("schedule for {}x{}", shape.criteria, shape.horizon),
            format!("{}x{}", schedule.criteria(), schedule.horizon()),
        ));
    }

    let mut candidates: Vec<(u32, u32)> = Vec::new();
    for (a, &la) in labels.iter().enumerate() {
        for (b, &lb) in labels.iter().enumerate() {
            if la > lb {
                candidates.push((a as u32, b as u32));
            }
        }
    }

    let selected: Vec<(u32, u32)> = match cap {
        Some(cap) if candidates.len() > cap => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let present: Vec<usize> = present.into_iter().collect();
            let mut reserved = BTreeSet::new();
            for w in present.windows(2) {
                let (lower, upper) = (w[0], w[1]);
                let boundary: Vec<usize> = (0..candidates.len())
                    .filter(|&i| {
                        let (a, b) = candidates[i];
                        labels[a as usize] == upper && labels[b as usize] == lower
                    })
                    .collect();
                reserved.insert(boundary[rng.random_range(0..boundary.len())]);
            }
            let rest: Vec<usize> = (0..candidates.len()).filter(|i| !reserved.contains(i)).collect();
            let amount = cap.saturating_sub(reserved.len()).min(rest.len());
            let mut chosen: Vec<usize> = index::sample(&mut rng, rest.len(), amount)
                .into_iter()
                .map(|i| rest[i])
                .chain(reserved)
                .collect();
            chosen.sort_unstable();
            chosen.into_iter().map(|i| candidates[i]).collect()
        }
        _ => candidates,
    };

    let weighted: Vec<Vec<f64>> = encoded
        .iter()
        .map(|e| {
            if e.shape() != shape {
                return Err(Error::dims(format!("{shape:?}"), format!("{:?}", e.shape())));
            }
            let g = shape.gamma;
            Ok(e.values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * schedule.weights()[i / g])
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(selected
        .into_iter()
        .map(|(a, b)| {
            let (va, vb) = (&weighted[a as usize], &weighted[b as usize]);
            PairwiseSample { v_diff: va.iter().zip(vb).map(|(x, y)| x - y).collect(), y: 1.0 }
        })
        .collect())
}

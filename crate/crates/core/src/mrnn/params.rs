use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::ClassStructure;
use crate::error::{Error, Result};
use crate::numeric::{softplus, softplus_inv};

/// Minimum gap added on top of the softplus spacing between thresholds.
pub const THRESHOLD_GAP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MrnnConfig {
    pub criteria: usize,
    pub horizon: usize,
    pub gamma: usize,
    pub hidden_size: usize,
    pub class_count: usize,
    pub q_hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub validation_patience: usize,
    pub momentum: f64,
    pub grad_clip: f64,
    /// Keeps the recurrent and discount-network weights non-negative and
    /// shifts the sub-marginal read-out so the carried value stays
    /// non-negative. Without it `U` is not guaranteed monotone in the inputs.
    pub monotone_recurrence: bool,
}

impl Default for MrnnConfig {
    fn default() -> Self {
        Self {
            criteria: 1,
            horizon: 1,
            gamma: 4,
            hidden_size: 8,
            class_count: 2,
            q_hidden: 8,
            epochs: 100,
            learning_rate: 1e-2,
            batch_size: 32,
            seed: 0,
            validation_patience: 20,
            momentum: 0.9,
            grad_clip: 10.0,
            monotone_recurrence: true,
        }
    }
}

impl MrnnConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [
            ("criteria", self.criteria),
            ("horizon", self.horizon),
            ("gamma", self.gamma),
            ("hidden_size", self.hidden_size),
            ("q_hidden", self.q_hidden),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("validation_patience", self.validation_patience),
        ];
        if let Some((name, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
        if self.class_count < 2 {
            return Err(Error::InvalidArgument("class_count must be at least 2".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad learning rate {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        if !(self.grad_clip > 0.0) {
            return Err(Error::InvalidArgument("grad_clip must be positive".into()));
        }
        Ok(())
    }

    /// Constant added to the hidden state before the sub-marginal read-out.
    pub(crate) fn readout_shift(&self) -> f64 {
        if self.monotone_recurrence {
            1.0
        } else {
            0.0
        }
    }
}

/// Raw (unmasked) weights of one criterion's recurrent cell, read-out and
/// discount network. Matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionParams {
    /// `s x gamma`.
    pub w_v: Vec<f64>,
    /// `s x s`.
    pub w_h: Vec<f64>,
    pub b: Vec<f64>,
    /// `T x s`, one read-out vector per timestamp.
    pub w_f: Vec<f64>,
    /// `q_hidden x s`.
    pub q_w1: Vec<f64>,
    pub q_b1: Vec<f64>,
    pub q_w2: Vec<f64>,
    pub q_b2: f64,
}

impl CriterionParams {
    fn zeros(c: &MrnnConfig) -> Self {
        let (s, q) = (c.hidden_size, c.q_hidden);
        Self {
            w_v: vec![0.0; s * c.gamma],
            w_h: vec![0.0; s * s],
            b: vec![0.0; s],
            w_f: vec![0.0; c.horizon * s],
            q_w1: vec![0.0; q * s],
            q_b1: vec![0.0; q],
            q_w2: vec![0.0; q],
            q_b2: 0.0,
        }
    }

    fn tensors(&self) -> [&[f64]; 8] {
        [
            &self.w_v,
            &self.w_h,
            &self.b,
            &self.w_f,
            &self.q_w1,
            &self.q_b1,
            &self.q_w2,
            std::slice::from_ref(&self.q_b2),
        ]
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 8] {
        [
            &mut self.w_v,
            &mut self.w_h,
            &mut self.b,
            &mut self.w_f,
            &mut self.q_w1,
            &mut self.q_b1,
            &mut self.q_w2,
            std::slice::from_mut(&mut self.q_b2),
        ]
    }
}

/// All trainable values. The same structure carries gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrnnParams {
    pub criteria: Vec<CriterionParams>,
    pub threshold_base: f64,
    pub threshold_increments: Vec<f64>,
}

impl MrnnParams {
    pub fn zeros(config: &MrnnConfig) -> Self {
        Self {
            criteria: (0..config.criteria).map(|_| CriterionParams::zeros(config)).collect(),
            threshold_base: 0.0,
            threshold_increments: vec![0.0; config.class_count - 2],
        }
    }

    /// Seeded initialization. Input and read-out weights start positive so
    /// every unit is live under the masks; thresholds start one unit apart.
    pub fn init(config: &MrnnConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut p = Self::zeros(config);
        let bound = 1.0 / (config.hidden_size as f64).sqrt();
        let q_bound = 1.0 / (config.q_hidden as f64).sqrt();
        let (lo, q_lo) = if config.monotone_recurrence { (0.0, 0.0) } else { (-bound, -q_bound) };
        for cp in &mut p.criteria {
            cp.w_v.iter_mut().for_each(|x| *x = rng.random_range(0.0..bound));
            cp.w_h.iter_mut().for_each(|x| *x = rng.random_range(lo..bound));
            cp.w_f.iter_mut().for_each(|x| *x = rng.random_range(0.0..bound));
            cp.q_w1.iter_mut().for_each(|x| *x = rng.random_range(lo..bound));
            cp.q_w2.iter_mut().for_each(|x| *x = rng.random_range(q_lo..q_bound));
        }
        let unit = softplus_inv(1.0 - THRESHOLD_GAP);
        p.threshold_increments.iter_mut().for_each(|x| *x = unit);
        Ok(p)
    }

    pub fn check_shape(&self, config: &MrnnConfig) -> Result<()> {
        let expected = Self::zeros(config);
        let same = self.criteria.len() == expected.criteria.len()
            && self.threshold_increments.len() == expected.threshold_increments.len()
            && self
                .criteria
                .iter()
                .zip(&expected.criteria)
                .all(|(a, b)| a.tensors().iter().zip(b.tensors()).all(|(x, y)| x.len() == y.len()));
        if same {
            Ok(())
        } else {
            Err(Error::dims("parameters matching the network configuration", "different tensor sizes"))
        }
    }

    /// Materialized thresholds `theta_1 < ... < theta_{H-1}`.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.threshold_increments.len() + 1);
        let mut theta = self.threshold_base;
        out.push(theta);
        for r in &self.threshold_increments {
            theta += softplus(*r) + THRESHOLD_GAP;
            out.push(theta);
        }
        out
    }

    pub fn class_structure(&self) -> Result<ClassStructure> {
        ClassStructure::new(self.thresholds())
    }

    pub fn len(&self) -> usize {
        self.criteria.iter().flat_map(|c| c.tensors()).map(<[f64]>::len).sum::<usize>()
            + 1
            + self.threshold_increments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Visits every scalar in a fixed order.
    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for cp in &mut self.criteria {
            for t in cp.tensors_mut() {
                t.iter_mut().for_each(&mut f);
            }
        }
        f(&mut self.threshold_base);
        self.threshold_increments.iter_mut().for_each(f);
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for cp in &self.criteria {
            for t in cp.tensors() {
                out.extend_from_slice(t);
            }
        }
        out.push(self.threshold_base);
        out.extend_from_slice(&self.threshold_increments);
        out
    }

    /// Overwrites every scalar from `flat` (same order as [`Self::to_flat`]).
    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::dims(self.len(), flat.len()));
        }
        let mut it = flat.iter();
        self.for_each_mut(|x| *x = *it.next().expect("length checked"));
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|x| x.is_finite())
    }
}

use crate::classes::ClassStructure;
use crate::error::{Error, Result};

/// Thresholds plus the boundaries (1-based `h`, between classes `h` and
/// `h + 1`) that had to fall back to the midpoint of class means.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedThresholds {
    pub classes: ClassStructure,
    pub fallback_boundaries: Vec<usize>,
    /// True when some threshold was nudged upward to keep strict order.
    pub repaired: bool,
}

/// Places `theta_h` halfway between the closest correctly ordered pair that
/// straddles boundary `h`: `a` in class `h + 1`, `b` in class `h`, `U(a) >= U(b)`.
///
/// `scored` holds `(id, U, label)` triples. Ties on the gap are broken by the
/// lexicographically smallest `(a.id, b.id)`.
pub fn fit_from_scores(scored: &[(&str, f64, usize)], class_count: usize) -> Result<FittedThresholds> {
    if class_count < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 classes, got {class_count}")));
    }
    if let Some(&(_, _, label)) = scored.iter().find(|s| s.2 == 0 || s.2 > class_count) {
        return Err(Error::LabelOutOfRange { label, classes: class_count });
    }
    let mut thresholds = Vec::with_capacity(class_count - 1);
    let mut fallback_boundaries = Vec::new();
    for h in 1..class_count {
        let upper: Vec<_> = scored.iter().filter(|s| s.2 == h + 1).collect();
        let lower: Vec<_> = scored.iter().filter(|s| s.2 == h).collect();
        if lower.is_empty() {
            return Err(Error::EmptyClass(h));
        }
        if upper.is_empty() {
            return Err(Error::EmptyClass(h + 1));
        }
        let mut best: Option<(f64, &str, &str, f64)> = None;
        for a in &upper {
            for b in &lower {
                let gap = a.1 - b.1;
                if gap < 0.0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((g, ai, bi, _)) => gap < g || (gap == g && (a.0, b.0) < (ai, bi)),
                };
                if better {
                    best = Some((gap, a.0, b.0, 0.5 * (a.1 + b.1)));
                }
            }
        }
        let theta = match best {
            Some((_, _, _, mid)) => mid,
            None => {
                fallback_boundaries.push(h);
                let mean = |xs: &[&(&str, f64, usize)]| xs.iter().map(|s| s.1).sum::<f64>() / xs.len() as f64;
                0.5 * (mean(&upper) + mean(&lower))
            }
        };
        thresholds.push(theta);
    }

    let mut repaired = false;
    for h in 1..thresholds.len() {
        if thresholds[h] <= thresholds[h - 1] {
            let prev = thresholds[h - 1];
            thresholds[h] = prev + 1e-9 * prev.abs().max(1.0);
            repaired = true;
        }
    }
    Ok(FittedThresholds { classes: ClassStructure::new(thresholds)?, fallback_boundaries, repaired })
}

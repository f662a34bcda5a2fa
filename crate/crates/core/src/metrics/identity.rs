use std::collections::HashMap;

use super::{EvalFrames, CLEAR_THRESHOLD};
use crate::assignment::{solve_max_score, CostMatrix};
use crate::error::Result;
use crate::types::TrajectorySet;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Idf1Metrics {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

impl Idf1Metrics {
    fn from_counts(idtp: usize, idfp: usize, idfn: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self {
            idf1: ratio(2 * idtp, 2 * idtp + idfp + idfn),
            idp: ratio(idtp, idtp + idfp),
            idr: ratio(idtp, idtp + idfn),
            idtp,
            idfp,
            idfn,
        }
    }

    pub(crate) fn pooled(parts: &[&Idf1Metrics]) -> Self {
        Self::from_counts(
            parts.iter().map(|m| m.idtp).sum(),
            parts.iter().map(|m| m.idfp).sum(),
            parts.iter().map(|m| m.idfn).sum(),
        )
    }
}

/// Identity F1 under the single gt-id to prediction-id pairing that
/// maximizes the number of frames where the paired boxes overlap by at
/// least 0.5 IoU.
pub fn compute_idf1(gt: &TrajectorySet, pr: &TrajectorySet) -> Result<Idf1Metrics> {
    idf1_from_frames(&EvalFrames::new(gt, pr)?)
}

pub(crate) fn idf1_from_frames(frames: &EvalFrames) -> Result<Idf1Metrics> {
    let mut gt_index: HashMap<u64, usize> = HashMap::new();
    let mut pr_index: HashMap<u64, usize> = HashMap::new();
    let mut overlap: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &frames.frames {
        for (g, &gid) in f.gt_ids.iter().enumerate() {
            let n = gt_index.len();
            let gi = *gt_index.entry(gid).or_insert(n);
            for (p, &pid) in f.pr_ids.iter().enumerate() {
                let n = pr_index.len();
                let pi = *pr_index.entry(pid).or_insert(n);
                if f.iou[g * f.pr_ids.len() + p] >= CLEAR_THRESHOLD {
                    *overlap.entry((gi, pi)).or_default() += 1;
                }
            }
        }
        for &pid in &f.pr_ids {
            let n = pr_index.len();
            pr_index.entry(pid).or_insert(n);
        }
    }
    let score =
        CostMatrix::from_fn(gt_index.len(), pr_index.len(), |g, p| overlap.get(&(g, p)).copied().unwrap_or(0) as f64);
    let idtp = solve_max_score(&score)?.total_cost.round() as usize;
    Ok(Idf1Metrics::from_counts(idtp, frames.num_pr - idtp, frames.num_gt - idtp))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn perfect_and_permuted() {
        let gt = single_gt(8);
        assert_eq!(compute_idf1(&gt, &relabel(&gt, |_, _| 1)).unwrap().idf1, 1.0);
        assert_eq!(compute_idf1(&gt, &relabel(&gt, |_, _| 77)).unwrap().idf1, 1.0);
    }

    #[test]
    fn half_split_trajectory() {
        let n = 6;
        let gt = single_gt(2 * n);
        let pr = relabel(&gt, |f, _| if f <= n { 1 } else { 2 });
        let m = compute_idf1(&gt, &pr).unwrap();
        assert_eq!((m.idtp, m.idfp, m.idfn), (6, 6, 6));
        assert_eq!(m.idf1, 0.5);
    }
}

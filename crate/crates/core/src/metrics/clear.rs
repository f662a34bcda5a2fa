use std::collections::HashMap;

use super::{EvalFrames, CLEAR_THRESHOLD};
use crate::error::Result;
use crate::types::TrajectorySet;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClearMetrics {
    pub mota: f64,
    /// Mean IoU over matches.
    pub motp: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
    pub num_gt: usize,
    pub iou_sum: f64,
}

impl ClearMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize, idsw: usize, num_gt: usize, iou_sum: f64) -> Self {
        let mota = 1.0 - (fp + fn_ + idsw) as f64 / num_gt as f64;
        let motp = if tp == 0 { 0.0 } else { iou_sum / tp as f64 };
        Self { mota, motp, tp, fp, fn_, idsw, num_gt, iou_sum }
    }

    pub(crate) fn pooled(parts: &[&ClearMetrics]) -> Self {
        let sum = |f: fn(&ClearMetrics) -> usize| parts.iter().map(|m| f(m)).sum::<usize>();
        Self::from_counts(
            sum(|m| m.tp),
            sum(|m| m.fp),
            sum(|m| m.fn_),
            sum(|m| m.idsw),
            sum(|m| m.num_gt),
            parts.iter().map(|m| m.iou_sum).sum(),
        )
    }
}

/// MOTA and friends at IoU 0.5. An identity switch is a match whose
/// prediction id differs from the one last matched to the same gt id,
/// however long ago that was.
pub fn compute_clear(gt: &TrajectorySet, pr: &TrajectorySet) -> Result<ClearMetrics> {
    Ok(clear_from_frames(&EvalFrames::new(gt, pr)?))
}

pub(crate) fn clear_from_frames(frames: &EvalFrames) -> ClearMetrics {
    let mut last_match: HashMap<u64, u64> = HashMap::new();
    let (mut tp, mut fp, mut fn_, mut idsw) = (0, 0, 0, 0);
    let mut iou_sum = 0.0;
    for f in &frames.frames {
        let m = f.matches(CLEAR_THRESHOLD);
        for &(g, p) in &m {
            let (gt_id, pr_id) = (f.gt_ids[g], f.pr_ids[p]);
            if let Some(prev) = last_match.insert(gt_id, pr_id) {
                if prev != pr_id {
                    idsw += 1;
                }
            }
            iou_sum += f.iou[g * f.pr_ids.len() + p];
        }
        tp += m.len();
        fn_ += f.gt_ids.len() - m.len();
        fp += f.pr_ids.len() - m.len();
    }
    ClearMetrics::from_counts(tp, fp, fn_, idsw, frames.num_gt, iou_sum)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use crate::types::{TrajectoryRole, TrajectorySet};

    #[test]
    fn perfect_tracking() {
        let gt = single_gt(10);
        let m = compute_clear(&gt, &relabel(&gt, |_, _| 4)).unwrap();
        assert_eq!(m.mota, 1.0);
        assert_eq!(m.idsw, 0);
        assert_eq!(m.motp, 1.0);
    }

    #[test]
    fn one_switch() {
        let gt = single_gt(10);
        let pr = relabel(&gt, |f, _| if f < 6 { 1 } else { 2 });
        let m = compute_clear(&gt, &pr).unwrap();
        assert_eq!(m.idsw, 1);
        assert!((m.mota - 0.9).abs() < 1e-15);
    }

    #[test]
    fn empty_prediction() {
        let gt = single_gt(10);
        let m = compute_clear(&gt, &TrajectorySet::new(TrajectoryRole::Prediction)).unwrap();
        assert_eq!(m.fn_, 10);
        assert_eq!(m.mota, 0.0);
    }

    #[test]
    fn gaps_do_not_reset_last_match() {
        let gt = single_gt(6);
        // frames 3-4 missing, then the same id resumes: no switch
        let mut pr = relabel(&gt, |_, _| 1);
        pr = {
            let mut out = TrajectorySet::new(TrajectoryRole::Prediction);
            for (f, id, b) in pr.iter().filter(|(f, _, _)| *f != 3 && *f != 4) {
                out.insert(f, id, *b).unwrap();
            }
            out
        };
        let m = compute_clear(&gt, &pr).unwrap();
        assert_eq!((m.idsw, m.fn_), (0, 2));
        // a-b-a counts two switches
        let pr = relabel(&gt, |f, _| if f == 3 { 2 } else { 1 });
        assert_eq!(compute_clear(&gt, &pr).unwrap().idsw, 2);
    }
}

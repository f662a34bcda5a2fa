//! Pairing of whole-body and head-shoulder detections within one frame.

use crate::assignment::{solve_max_score_with_floor, CapMode, CostMatrix};
use crate::error::{Error, Result};
use crate::geometry::containment_iou;
use crate::types::{Detection, DetectionKind};

pub const DEFAULT_MIN_CONTAINMENT: f64 = 0.5;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairingResult {
    /// `(wb, hs)` pairs in wb input order.
    pub matched: Vec<(Detection, Detection)>,
    pub unmatched_wb: Vec<Detection>,
    pub discarded_hs: Vec<Detection>,
}

/// Matches hs boxes to wb boxes by maximum total containment, then dissolves
/// pairs whose containment falls below `min_containment`.
pub fn pair_detections(wb: &[Detection], hs: &[Detection], min_containment: f64) -> Result<PairingResult> {
    check_frame_and_kind(wb, hs)?;
    if wb.is_empty() {
        return Ok(PairingResult { discarded_hs: hs.to_vec(), ..Default::default() });
    }

    let score = CostMatrix::from_fn(wb.len(), hs.len(), |i, j| containment_iou(&wb[i].bbox, &hs[j].bbox));
    let res = solve_max_score_with_floor(&score, min_containment, CapMode::PostFilter)?;

    let mut wb_used = vec![false; wb.len()];
    let mut hs_used = vec![false; hs.len()];
    let mut matched = Vec::with_capacity(res.pairs.len());
    for &(i, j) in &res.pairs {
        wb_used[i] = true;
        hs_used[j] = true;
        matched.push((wb[i].clone(), hs[j].clone()));
    }
    let unmatched_wb = wb.iter().zip(&wb_used).filter(|(_, &u)| !u).map(|(d, _)| d.clone()).collect();
    let discarded_hs = hs.iter().zip(&hs_used).filter(|(_, &u)| !u).map(|(d, _)| d.clone()).collect();
    Ok(PairingResult { matched, unmatched_wb, discarded_hs })
}

fn check_frame_and_kind(wb: &[Detection], hs: &[Detection]) -> Result<()> {
    let first = wb.first().or(hs.first()).map(|d| d.frame);
    for d in wb {
        if d.kind != DetectionKind::Wb {
            return Err(Error::WrongKind { expected: "wb", got: d.kind.as_str() });
        }
    }
    for d in hs {
        if d.kind != DetectionKind::Hs {
            return Err(Error::WrongKind { expected: "hs", got: d.kind.as_str() });
        }
    }
    if let Some(first) = first {
        if let Some(d) = wb.iter().chain(hs).find(|d| d.frame != first) {
            return Err(Error::MixedFrames { first, other: d.frame });
        }
    }
    Ok(())
}

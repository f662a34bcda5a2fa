//! Tracking evaluation: CLEAR (MOTA), identity (IDF1), HOTA and its
//! tour-guide variant, which restricts the association average to matches
//! consistent with every earlier match.
//!
//! All families start from per-frame matches between ground truth and
//! predictions: a maximum-total-IoU assignment in which pairs below the
//! localization threshold are inadmissible.

mod clear;
mod hota;
mod identity;

use std::fmt;
use std::str::FromStr;

pub use clear::{compute_clear, ClearMetrics};
pub use hota::{
    compute_hota, compute_tgrhota, compute_tp_prime, HotaAtThreshold, HotaMetrics, HotaSums, TgrHotaMetrics,
};
pub use identity::{compute_idf1, Idf1Metrics};

use crate::assignment::{solve_max_score_with_floor, CapMode, CostMatrix};
use crate::error::{Error, Result};
use crate::geometry::iou;
use crate::types::{validate_trajectory_set, TpRecord, TrajectorySet};

/// Localization threshold used by CLEAR and IDF1.
pub const CLEAR_THRESHOLD: f64 = 0.5;

/// Matches at one localization threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    pub loc_threshold: f64,
    /// Sorted by frame, then gt id.
    pub tps: Vec<TpRecord>,
    /// `(frame, unmatched gt count)` for every frame with gt or predictions.
    pub fns: Vec<(u32, usize)>,
    /// `(frame, unmatched prediction count)`, same frames as `fns`.
    pub fps: Vec<(u32, usize)>,
}

impl MatchSet {
    pub fn num_fn(&self) -> usize {
        self.fns.iter().map(|&(_, n)| n).sum()
    }

    pub fn num_fp(&self) -> usize {
        self.fps.iter().map(|&(_, n)| n).sum()
    }
}

/// Inclusive grid of localization thresholds `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for LocGrid {
    fn default() -> Self {
        Self { lo: 0.05, hi: 0.95, step: 0.05 }
    }
}

impl LocGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = Self { lo, hi, step };
        g.validate()?;
        Ok(g)
    }

    pub fn single(alpha: f64) -> Self {
        Self { lo: alpha, hi: alpha, step: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.lo > 0.0 && self.hi < 1.0 && self.lo <= self.hi && self.step > 0.0;
        if !ok || ![self.lo, self.hi, self.step].iter().all(|v| v.is_finite()) {
            return Err(Error::Config(format!("invalid localization grid {self}: need 0 < lo <= hi < 1 and step > 0")));
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| ((self.lo + i as f64 * self.step) * 1e9).round() / 1e9).collect()
    }
}

impl fmt::Display for LocGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for LocGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must look like lo:hi:step, got `{s}`"));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.trim().parse().map_err(|_| format!("bad number `{p}` in grid `{s}`"))?;
        }
        LocGrid::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
    }
}

/// Ground truth and predictions of one frame with their IoU matrix.
#[derive(Debug, Clone)]
pub(crate) struct FramePairs {
    pub frame: u32,
    pub gt_ids: Vec<u64>,
    pub pr_ids: Vec<u64>,
    /// Row-major `gt × pr`.
    pub iou: Vec<f64>,
}

impl FramePairs {
    fn score_matrix(&self) -> CostMatrix {
        CostMatrix::new(self.gt_ids.len(), self.pr_ids.len(), self.iou.clone()).expect("shape matches")
    }

    /// Forbidden-edge max-IoU matching as `(gt index, pr index)` pairs.
    pub fn matches(&self, threshold: f64) -> Vec<(usize, usize)> {
        if self.gt_ids.is_empty() || self.pr_ids.is_empty() {
            return Vec::new();
        }
        if !self.iou.iter().any(|&v| v >= threshold) {
            return Vec::new();
        }
        solve_max_score_with_floor(&self.score_matrix(), threshold, CapMode::ForbiddenEdge)
            .expect("IoU scores are finite and the floor is positive")
            .pairs
    }
}

/// Precomputed per-frame overlaps of a gt/prediction pair of sets.
#[derive(Debug, Clone)]
pub(crate) struct EvalFrames {
    pub frames: Vec<FramePairs>,
    pub num_gt: usize,
    pub num_pr: usize,
}

impl EvalFrames {
    pub fn new(gt: &TrajectorySet, pr: &TrajectorySet) -> Result<Self> {
        validate_trajectory_set(gt)?;
        validate_trajectory_set(pr)?;
        if gt.is_empty() {
            return Err(Error::EmptyGroundTruth);
        }
        let gt_frames = gt.frames();
        let pr_frames = pr.frames();
        let (mut i, mut j) = (0, 0);
        let mut frames = Vec::with_capacity(gt_frames.len().max(pr_frames.len()));
        let empty = Vec::new();
        while i < gt_frames.len() || j < pr_frames.len() {
            let fg = gt_frames.get(i).map(|f| f.0);
            let fp = pr_frames.get(j).map(|f| f.0);
            let frame = match (fg, fp) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            };
            let g = if fg == Some(frame) {
                i += 1;
                &gt_frames[i - 1].1
            } else {
                &empty
            };
            let p = if fp == Some(frame) {
                j += 1;
                &pr_frames[j - 1].1
            } else {
                &empty
            };
            let mut ious = Vec::with_capacity(g.len() * p.len());
            for (_, gb) in g {
                for (_, pb) in p {
                    ious.push(iou(gb, pb));
                }
            }
            frames.push(FramePairs {
                frame,
                gt_ids: g.iter().map(|r| r.0).collect(),
                pr_ids: p.iter().map(|r| r.0).collect(),
                iou: ious,
            });
        }
        Ok(Self { frames, num_gt: gt.len(), num_pr: pr.len() })
    }

    pub fn match_set(&self, threshold: f64) -> MatchSet {
        let mut tps = Vec::new();
        let mut fns = Vec::with_capacity(self.frames.len());
        let mut fps = Vec::with_capacity(self.frames.len());
        for f in &self.frames {
            let m = f.matches(threshold);
            for &(g, p) in &m {
                tps.push(TpRecord {
                    frame: f.frame,
                    pr_id: f.pr_ids[p],
                    gt_id: f.gt_ids[g],
                    loc_score: f.iou[g * f.pr_ids.len() + p],
                });
            }
            fns.push((f.frame, f.gt_ids.len() - m.len()));
            fps.push((f.frame, f.pr_ids.len() - m.len()));
        }
        MatchSet { loc_threshold: threshold, tps, fns, fps }
    }
}

/// Per-frame matching of predictions to ground truth at `loc_threshold`.
pub fn frame_match(gt: &TrajectorySet, pr: &TrajectorySet, loc_threshold: f64) -> Result<MatchSet> {
    if !(loc_threshold > 0.0 && loc_threshold < 1.0) {
        return Err(Error::Config(format!("localization threshold must lie in (0, 1), got {loc_threshold}")));
    }
    Ok(EvalFrames::new(gt, pr)?.match_set(loc_threshold))
}

/// Metric families that can be requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricFamilies {
    pub mota: bool,
    pub idf1: bool,
    pub hota: bool,
    pub tgrhota: bool,
}

impl Default for MetricFamilies {
    fn default() -> Self {
        Self { mota: true, idf1: true, hota: true, tgrhota: true }
    }
}

impl FromStr for MetricFamilies {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut out = Self { mota: false, idf1: false, hota: false, tgrhota: false };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name.to_ascii_lowercase().as_str() {
                "mota" | "clear" => out.mota = true,
                "idf1" => out.idf1 = true,
                "hota" => out.hota = true,
                "tgrhota" => out.tgrhota = true,
                other => return Err(format!("unknown metric `{other}`")),
            }
        }
        if !(out.mota || out.idf1 || out.hota || out.tgrhota) {
            return Err("no metric selected".into());
        }
        Ok(out)
    }
}

impl fmt::Display for MetricFamilies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> =
            [(self.mota, "mota"), (self.idf1, "idf1"), (self.hota, "hota"), (self.tgrhota, "tgrhota")]
                .iter()
                .filter(|(on, _)| *on)
                .map(|(_, n)| *n)
                .collect();
        f.write_str(&names.join(","))
    }
}

/// All requested metrics of one sequence, or of the pooled aggregate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceMetrics {
    pub clear: Option<ClearMetrics>,
    pub idf1: Option<Idf1Metrics>,
    pub hota: Option<HotaMetrics>,
}

/// Evaluates one sequence, sharing the overlap computation between families.
pub fn evaluate(
    gt: &TrajectorySet,
    pr: &TrajectorySet,
    families: MetricFamilies,
    grid: &LocGrid,
) -> Result<SequenceMetrics> {
    grid.validate()?;
    let frames = EvalFrames::new(gt, pr)?;
    Ok(SequenceMetrics {
        clear: families.mota.then(|| clear::clear_from_frames(&frames)),
        idf1: if families.idf1 { Some(identity::idf1_from_frames(&frames)?) } else { None },
        hota: (families.hota || families.tgrhota).then(|| hota::hota_from_frames(&frames, grid)),
    })
}

/// Pools several sequences: counts are summed and association scores are
/// weighted by their number of matches.
pub fn aggregate(sequences: &[&SequenceMetrics]) -> SequenceMetrics {
    let clears: Vec<_> = sequences.iter().filter_map(|s| s.clear.as_ref()).collect();
    let idf1s: Vec<_> = sequences.iter().filter_map(|s| s.idf1.as_ref()).collect();
    let hotas: Vec<_> = sequences.iter().filter_map(|s| s.hota.as_ref()).collect();
    SequenceMetrics {
        clear: (!clears.is_empty()).then(|| ClearMetrics::pooled(&clears)),
        idf1: (!idf1s.is_empty()).then(|| Idf1Metrics::pooled(&idf1s)),
        hota: (!hotas.is_empty()).then(|| HotaMetrics::pooled(&hotas)),
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::types::{BoundingBox, TrajectoryRole, TrajectorySet};

    pub fn bx(x: f64) -> BoundingBox {
        BoundingBox::new(x, 0.0, 10.0, 10.0)
    }

    /// Ground truth of one identity (id 1) present on frames `1..=n`.
    pub fn single_gt(n: u32) -> TrajectorySet {
        let mut ts = TrajectorySet::new(TrajectoryRole::GroundTruth);
        for f in 1..=n {
            ts.insert(f, 1, bx(f as f64)).unwrap();
        }
        ts
    }

    /// Exact copy of `gt` with the id of each frame given by `label`.
    pub fn relabel(gt: &TrajectorySet, label: impl Fn(u32, u64) -> u64) -> TrajectorySet {
        let mut ts = TrajectorySet::new(TrajectoryRole::Prediction);
        for (f, id, b) in gt.iter() {
            ts.insert(f, label(f, id), *b).unwrap();
        }
        ts
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::types::{BoundingBox, TrajectoryRole};

    #[test]
    fn identity_prediction_is_all_tp() {
        let gt = single_gt(5);
        let pr = relabel(&gt, |_, _| 9);
        for t in [0.05, 0.5, 0.95] {
            let ms = frame_match(&gt, &pr, t).unwrap();
            assert_eq!(ms.tps.len(), 5);
            assert_eq!(ms.num_fn() + ms.num_fp(), 0);
        }
    }

    #[test]
    fn best_overlap_wins() {
        let mut gt = TrajectorySet::new(TrajectoryRole::GroundTruth);
        gt.insert(1, 1, BoundingBox::new(0.0, 0.0, 10.0, 10.0)).unwrap();
        let mut pr = TrajectorySet::new(TrajectoryRole::Prediction);
        // IoU 0.6: shift by 2.5 -> inter 75, union 125
        pr.insert(1, 7, BoundingBox::new(2.5, 0.0, 10.0, 10.0)).unwrap();
        // IoU 0.55: shift by 10 * 9/31 -> inter 10*(10-s), union 10*(10+s)
        let s = 10.0 * 0.45 / 1.55;
        pr.insert(1, 8, BoundingBox::new(s, 0.0, 10.0, 10.0)).unwrap();
        let ms = frame_match(&gt, &pr, 0.5).unwrap();
        assert_eq!(ms.tps.len(), 1);
        assert_eq!(ms.tps[0].pr_id, 7);
        assert!((ms.tps[0].loc_score - 0.6).abs() < 1e-12);
        assert_eq!((ms.num_fn(), ms.num_fp()), (0, 1));
    }

    #[test]
    fn weak_overlap_is_fn_and_fp() {
        let mut gt = TrajectorySet::new(TrajectoryRole::GroundTruth);
        gt.insert(1, 1, BoundingBox::new(0.0, 0.0, 10.0, 10.0)).unwrap();
        let mut pr = TrajectorySet::new(TrajectoryRole::Prediction);
        // IoU 0.4: 10(10-s) / 10(10+s) = 0.4 -> s = 30/7
        pr.insert(1, 7, BoundingBox::new(30.0 / 7.0, 0.0, 10.0, 10.0)).unwrap();
        let ms = frame_match(&gt, &pr, 0.5).unwrap();
        assert!(ms.tps.is_empty());
        assert_eq!((ms.num_fn(), ms.num_fp()), (1, 1));
    }

    #[test]
    fn grid_parsing() {
        let g: LocGrid = "0.05:0.95:0.05".parse().unwrap();
        let t = g.thresholds();
        assert_eq!(t.len(), 19);
        assert_eq!(t[0], 0.05);
        assert_eq!(t[18], 0.95);
        assert_eq!(t[9], 0.5);
        assert!("0:0.9:0.1".parse::<LocGrid>().is_err());
        assert!("0.5:0.4:0.1".parse::<LocGrid>().is_err());
        assert!("0.5:0.9".parse::<LocGrid>().is_err());
        assert!("0.1:0.9:0".parse::<LocGrid>().is_err());
        assert_eq!(LocGrid::single(0.5).thresholds(), vec![0.5]);
    }

    #[test]
    fn families_parsing() {
        let f: MetricFamilies = "mota,tgrhota".parse().unwrap();
        assert!(f.mota && f.tgrhota && !f.hota && !f.idf1);
        assert!("bogus".parse::<MetricFamilies>().is_err());
        assert!("".parse::<MetricFamilies>().is_err());
        assert_eq!(MetricFamilies::default().to_string(), "mota,idf1,hota,tgrhota");
    }

    #[test]
    fn empty_ground_truth_is_an_error() {
        let gt = TrajectorySet::new(TrajectoryRole::GroundTruth);
        let pr = single_gt(3);
        assert!(matches!(
            evaluate(&gt, &pr, MetricFamilies::default(), &LocGrid::default()),
            Err(Error::EmptyGroundTruth)
        ));
    }
}

use std::collections::HashMap;

use rayon::prelude::*;

use super::{EvalFrames, LocGrid, MatchSet};
use crate::error::Result;
use crate::types::{TpRecord, TrajectorySet};

/// Additive per-threshold tallies; pooling sequences sums these.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HotaSums {
    pub alpha: f64,
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tp_prime: usize,
    /// Σ over TPs of `TPA / (TPA + FNA + FPA)`.
    pub ass_sum: f64,
    /// Σ over TPs of `TPA / (TPA + FPA)`.
    pub ass_pr_sum: f64,
    /// Σ over TPs of `TPA / (TPA + FNA)`.
    pub ass_re_sum: f64,
    /// Σ over TP′ of `TPA / (TPA + FNA + FPA)`.
    pub ass_prime_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HotaAtThreshold {
    pub alpha: f64,
    pub det_a: f64,
    pub ass_a: f64,
    pub ass_pr: f64,
    pub ass_re: f64,
    pub hota: f64,
    pub ass_a_prime: f64,
    pub tgrhota: f64,
    /// TP′ came out empty although TP was not; `ass_a_prime` is then 0.
    pub tp_prime_degenerate: bool,
}

impl HotaAtThreshold {
    fn from_sums(s: &HotaSums) -> Self {
        let ratio = |num: f64, den: usize| if den == 0 { 0.0 } else { num / den as f64 };
        let det_a = ratio(s.tp as f64, s.tp + s.fn_ + s.fp);
        let ass_a = ratio(s.ass_sum, s.tp);
        let ass_a_prime = ratio(s.ass_prime_sum, s.tp_prime);
        Self {
            alpha: s.alpha,
            det_a,
            ass_a,
            ass_pr: ratio(s.ass_pr_sum, s.tp),
            ass_re: ratio(s.ass_re_sum, s.tp),
            hota: (det_a * ass_a).sqrt(),
            ass_a_prime,
            tgrhota: (det_a * ass_a_prime).sqrt(),
            tp_prime_degenerate: s.tp > 0 && s.tp_prime == 0,
        }
    }
}

/// HOTA and the tour-guide variant, per threshold and averaged over the grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HotaMetrics {
    pub per_threshold: Vec<HotaAtThreshold>,
    pub sums: Vec<HotaSums>,
    pub det_a: f64,
    pub ass_a: f64,
    pub ass_pr: f64,
    pub ass_re: f64,
    pub hota: f64,
    pub ass_a_prime: f64,
    pub tgrhota: f64,
    pub tp_prime_degenerate: bool,
}

impl HotaMetrics {
    fn from_sums(sums: Vec<HotaSums>) -> Self {
        let per_threshold: Vec<_> = sums.iter().map(HotaAtThreshold::from_sums).collect();
        let n = per_threshold.len().max(1) as f64;
        let mean = |f: fn(&HotaAtThreshold) -> f64| per_threshold.iter().map(f).sum::<f64>() / n;
        Self {
            det_a: mean(|t| t.det_a),
            ass_a: mean(|t| t.ass_a),
            ass_pr: mean(|t| t.ass_pr),
            ass_re: mean(|t| t.ass_re),
            hota: mean(|t| t.hota),
            ass_a_prime: mean(|t| t.ass_a_prime),
            tgrhota: mean(|t| t.tgrhota),
            tp_prime_degenerate: per_threshold.iter().any(|t| t.tp_prime_degenerate),
            per_threshold,
            sums,
        }
    }

    pub(crate) fn pooled(parts: &[&HotaMetrics]) -> Self {
        let n = parts.first().map_or(0, |p| p.sums.len());
        let sums = (0..n)
            .map(|i| {
                let mut acc = HotaSums { alpha: parts[0].sums[i].alpha, ..Default::default() };
                for p in parts {
                    let s = &p.sums[i];
                    acc.tp += s.tp;
                    acc.fn_ += s.fn_;
                    acc.fp += s.fp;
                    acc.tp_prime += s.tp_prime;
                    acc.ass_sum += s.ass_sum;
                    acc.ass_pr_sum += s.ass_pr_sum;
                    acc.ass_re_sum += s.ass_re_sum;
                    acc.ass_prime_sum += s.ass_prime_sum;
                }
                acc
            })
            .collect();
        Self::from_sums(sums)
    }
}

/// The tour-guide association score and its combined metric.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TgrHotaMetrics {
    /// `(alpha, DetA, AssA′, TGRHOTA)` per threshold.
    pub per_threshold: Vec<(f64, f64, f64, f64)>,
    pub det_a: f64,
    pub ass_a_prime: f64,
    pub tgrhota: f64,
    pub tp_prime_degenerate: bool,
}

impl From<&HotaMetrics> for TgrHotaMetrics {
    fn from(h: &HotaMetrics) -> Self {
        Self {
            per_threshold: h.per_threshold.iter().map(|t| (t.alpha, t.det_a, t.ass_a_prime, t.tgrhota)).collect(),
            det_a: h.det_a,
            ass_a_prime: h.ass_a_prime,
            tgrhota: h.tgrhota,
            tp_prime_degenerate: h.tp_prime_degenerate,
        }
    }
}

pub fn compute_hota(gt: &TrajectorySet, pr: &TrajectorySet, grid: &LocGrid) -> Result<HotaMetrics> {
    grid.validate()?;
    Ok(hota_from_frames(&EvalFrames::new(gt, pr)?, grid))
}

pub fn compute_tgrhota(gt: &TrajectorySet, pr: &TrajectorySet, grid: &LocGrid) -> Result<TgrHotaMetrics> {
    Ok(TgrHotaMetrics::from(&compute_hota(gt, pr, grid)?))
}

#[derive(Clone, Copy, PartialEq)]
enum Partner {
    One(u64),
    Several,
}

fn note_partner(map: &mut HashMap<u64, Partner>, key: u64, partner: u64) {
    map.entry(key)
        .and_modify(|p| {
            if *p != Partner::One(partner) {
                *p = Partner::Several;
            }
        })
        .or_insert(Partner::One(partner));
}

/// Keeps a match only if every match on an earlier frame either has the same
/// (prediction, gt) pair or shares neither id. Matches on the same frame do
/// not constrain each other.
pub fn compute_tp_prime(ms: &MatchSet) -> Vec<TpRecord> {
    let mut pr_partner: HashMap<u64, Partner> = HashMap::new();
    let mut gt_partner: HashMap<u64, Partner> = HashMap::new();
    let mut kept = Vec::new();
    let tps = &ms.tps;
    let mut start = 0;
    while start < tps.len() {
        let frame = tps[start].frame;
        let end = start + tps[start..].iter().take_while(|t| t.frame == frame).count();
        for c in &tps[start..end] {
            let pr_ok = pr_partner.get(&c.pr_id).is_none_or(|p| *p == Partner::One(c.gt_id));
            let gt_ok = gt_partner.get(&c.gt_id).is_none_or(|p| *p == Partner::One(c.pr_id));
            if pr_ok && gt_ok {
                kept.push(*c);
            }
        }
        for c in &tps[start..end] {
            note_partner(&mut pr_partner, c.pr_id, c.gt_id);
            note_partner(&mut gt_partner, c.gt_id, c.pr_id);
        }
        start = end;
    }
    kept
}

fn sums_at(
    frames: &EvalFrames,
    alpha: f64,
    gt_count: &HashMap<u64, usize>,
    pr_count: &HashMap<u64, usize>,
) -> HotaSums {
    let ms = frames.match_set(alpha);
    let mut tpa: HashMap<(u64, u64), usize> = HashMap::new();
    for c in &ms.tps {
        *tpa.entry((c.gt_id, c.pr_id)).or_default() += 1;
    }
    let score = |g: u64, p: u64, n: usize| {
        let (gc, pc) = (gt_count[&g] as f64, pr_count[&p] as f64);
        let n = n as f64;
        (n / (gc + pc - n), n / pc, n / gc)
    };

    let mut s = HotaSums { alpha, tp: ms.tps.len(), fn_: ms.num_fn(), fp: ms.num_fp(), ..Default::default() };
    // Deterministic summation order.
    let mut pairs: Vec<_> = tpa.iter().map(|(&k, &v)| (k, v)).collect();
    pairs.sort_unstable();
    for ((g, p), n) in pairs {
        let (ass, pr, re) = score(g, p, n);
        s.ass_sum += n as f64 * ass;
        s.ass_pr_sum += n as f64 * pr;
        s.ass_re_sum += n as f64 * re;
    }
    let prime = compute_tp_prime(&ms);
    s.tp_prime = prime.len();
    let mut prime_tpa: HashMap<(u64, u64), usize> = HashMap::new();
    for c in &prime {
        *prime_tpa.entry((c.gt_id, c.pr_id)).or_default() += 1;
    }
    let mut prime_pairs: Vec<_> = prime_tpa.into_iter().collect();
    prime_pairs.sort_unstable();
    for ((g, p), k) in prime_pairs {
        let (ass, _, _) = score(g, p, tpa[&(g, p)]);
        s.ass_prime_sum += k as f64 * ass;
    }
    s
}

pub(crate) fn hota_from_frames(frames: &EvalFrames, grid: &LocGrid) -> HotaMetrics {
    let mut gt_count: HashMap<u64, usize> = HashMap::new();
    let mut pr_count: HashMap<u64, usize> = HashMap::new();
    for f in &frames.frames {
        for &g in &f.gt_ids {
            *gt_count.entry(g).or_default() += 1;
        }
        for &p in &f.pr_ids {
            *pr_count.entry(p).or_default() += 1;
        }
    }
    let sums: Vec<HotaSums> =
        grid.thresholds().par_iter().map(|&alpha| sums_at(frames, alpha, &gt_count, &pr_count)).collect();
    HotaMetrics::from_sums(sums)
}

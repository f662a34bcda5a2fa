//! Brute-force reference implementations used to cross-check the library.
//!
//! Everything here works from plain `(frame, id, [x, y, w, h])` rows and
//! enumerates matchings exhaustively, so it shares no code with the crate.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use tgrmpt::types::{BoundingBox, TrajectoryRole, TrajectorySet};

pub type Row = (u32, u64, [f64; 4]);

pub fn iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
    let ih = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    inter / (a[2] * a[3] + b[2] * b[3] - inter)
}

pub fn rows_of(set: &TrajectorySet) -> Vec<Row> {
    set.iter().map(|(f, id, b)| (f, id, [b.x, b.y, b.w, b.h])).collect()
}

pub fn set_of(rows: &[Row], role: TrajectoryRole) -> TrajectorySet {
    let mut s = TrajectorySet::new(role);
    for &(f, id, b) in rows {
        s.insert(f, id, BoundingBox::new(b[0], b[1], b[2], b[3])).unwrap();
    }
    s
}

/// Minimum total cost over all matchings of size `min(rows, cols)`.
pub fn brute_min_cost(cost: &[Vec<f64>]) -> f64 {
    let rows = cost.len();
    let cols = if rows == 0 { 0 } else { cost[0].len() };
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows <= cols {
        let mut best = f64::INFINITY;
        let mut used = vec![false; cols];
        min_rec(0, &mut used, 0.0, &|r, c| cost[r][c], rows, cols, &mut best);
        best
    } else {
        let t: Vec<Vec<f64>> = (0..cols).map(|c| (0..rows).map(|r| cost[r][c]).collect()).collect();
        brute_min_cost(&t)
    }
}

fn min_rec(
    r: usize,
    used: &mut [bool],
    acc: f64,
    f: &dyn Fn(usize, usize) -> f64,
    rows: usize,
    cols: usize,
    best: &mut f64,
) {
    if r == rows {
        *best = best.min(acc);
        return;
    }
    for c in 0..cols {
        if !used[c] {
            used[c] = true;
            min_rec(r + 1, used, acc + f(r, c), f, rows, cols, best);
            used[c] = false;
        }
    }
}

/// Partial matching of one frame maximizing total IoU, pairs below `alpha`
/// being inadmissible. Returns `(gt index, pr index)` pairs.
fn frame_matching(gt: &[[f64; 4]], pr: &[[f64; 4]], alpha: f64) -> Vec<(usize, usize)> {
    fn rec(
        g: usize,
        s: &[Vec<f64>],
        alpha: f64,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        acc: f64,
        best: &mut (f64, Vec<(usize, usize)>),
    ) {
        if g == s.len() {
            if acc > best.0 {
                *best = (acc, cur.clone());
            }
            return;
        }
        rec(g + 1, s, alpha, used, cur, acc, best);
        for p in 0..used.len() {
            if !used[p] && s[g][p] >= alpha {
                used[p] = true;
                cur.push((g, p));
                rec(g + 1, s, alpha, used, cur, acc + s[g][p], best);
                cur.pop();
                used[p] = false;
            }
        }
    }
    let s: Vec<Vec<f64>> = gt.iter().map(|a| pr.iter().map(|b| iou(*a, *b)).collect()).collect();
    let mut best = (0.0, Vec::new());
    rec(0, &s, alpha, &mut vec![false; pr.len()], &mut Vec::new(), 0.0, &mut best);
    best.1
}

/// Per-frame matches at `alpha`: `(frame, gt id, pr id, iou)`, plus total
/// FN and FP counts.
pub struct Matches {
    pub tps: Vec<(u32, u64, u64, f64)>,
    pub fn_: usize,
    pub fp: usize,
}

fn by_frame(rows: &[Row]) -> BTreeMap<u32, Vec<(u64, [f64; 4])>> {
    let mut m: BTreeMap<u32, Vec<(u64, [f64; 4])>> = BTreeMap::new();
    for &(f, id, b) in rows {
        m.entry(f).or_default().push((id, b));
    }
    m
}

pub fn match_all(gt: &[Row], pr: &[Row], alpha: f64) -> Matches {
    let g = by_frame(gt);
    let p = by_frame(pr);
    let frames: BTreeSet<u32> = g.keys().chain(p.keys()).copied().collect();
    let empty = Vec::new();
    let mut out = Matches { tps: Vec::new(), fn_: 0, fp: 0 };
    for f in frames {
        let gs = g.get(&f).unwrap_or(&empty);
        let ps = p.get(&f).unwrap_or(&empty);
        let gb: Vec<_> = gs.iter().map(|x| x.1).collect();
        let pb: Vec<_> = ps.iter().map(|x| x.1).collect();
        let m = frame_matching(&gb, &pb, alpha);
        out.fn_ += gs.len() - m.len();
        out.fp += ps.len() - m.len();
        for (gi, pi) in m {
            out.tps.push((f, gs[gi].0, ps[pi].0, iou(gb[gi], pb[pi])));
        }
    }
    out
}

pub fn mota(gt: &[Row], pr: &[Row]) -> f64 {
    let m = match_all(gt, pr, 0.5);
    let mut last: HashMap<u64, u64> = HashMap::new();
    let mut idsw = 0;
    let mut tps = m.tps.clone();
    tps.sort_by_key(|t| (t.0, t.1));
    for (_, g, p, _) in tps {
        if let Some(prev) = last.insert(g, p) {
            if prev != p {
                idsw += 1;
            }
        }
    }
    1.0 - (m.fn_ + m.fp + idsw) as f64 / gt.len() as f64
}

/// Tries every injective map from gt ids into pr ids (or nothing).
pub fn idf1(gt: &[Row], pr: &[Row]) -> f64 {
    let gt_ids: Vec<u64> = gt.iter().map(|r| r.1).collect::<BTreeSet<_>>().into_iter().collect();
    let pr_ids: Vec<u64> = pr.iter().map(|r| r.1).collect::<BTreeSet<_>>().into_iter().collect();
    let pb: HashMap<(u32, u64), [f64; 4]> = pr.iter().map(|r| ((r.0, r.1), r.2)).collect();
    let overlap = |g: u64, p: u64| {
        gt.iter().filter(|r| r.1 == g).filter(|r| pb.get(&(r.0, p)).is_some_and(|b| iou(r.2, *b) >= 0.5)).count()
    };
    let w: Vec<Vec<usize>> = gt_ids.iter().map(|&g| pr_ids.iter().map(|&p| overlap(g, p)).collect()).collect();
    fn rec(i: usize, w: &[Vec<usize>], used: &mut Vec<bool>, acc: usize, best: &mut usize) {
        if i == w.len() {
            *best = (*best).max(acc);
            return;
        }
        rec(i + 1, w, used, acc, best);
        for p in 0..used.len() {
            if !used[p] {
                used[p] = true;
                rec(i + 1, w, used, acc + w[i][p], best);
                used[p] = false;
            }
        }
    }
    let mut idtp = 0;
    rec(0, &w, &mut vec![false; pr_ids.len()], 0, &mut idtp);
    2.0 * idtp as f64 / (gt.len() + pr.len()) as f64
}

/// Keeps a match iff every match on an earlier frame has the same pair or
/// shares neither id.
pub fn tp_prime(tps: &[(u32, u64, u64, f64)]) -> Vec<(u32, u64, u64, f64)> {
    tps.iter()
        .filter(|c| tps.iter().filter(|e| e.0 < c.0).all(|e| (e.2 == c.2 && e.1 == c.1) || (e.2 != c.2 && e.1 != c.1)))
        .copied()
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HotaAt {
    pub det_a: f64,
    pub ass_a: f64,
    pub ass_pr: f64,
    pub ass_re: f64,
    pub ass_a_prime: f64,
}

pub fn hota_at(gt: &[Row], pr: &[Row], alpha: f64) -> HotaAt {
    let m = match_all(gt, pr, alpha);
    let tp = m.tps.len();
    let det_a = tp as f64 / (tp + m.fn_ + m.fp) as f64;
    // TPA, FNA, FPA of one match, counted by scanning everything.
    let scores = |c: &(u32, u64, u64, f64)| {
        let tpa = m.tps.iter().filter(|e| e.1 == c.1 && e.2 == c.2).count() as f64;
        let fna = gt.iter().filter(|r| r.1 == c.1).count() as f64 - tpa;
        let fpa = pr.iter().filter(|r| r.1 == c.2).count() as f64 - tpa;
        (tpa / (tpa + fna + fpa), tpa / (tpa + fpa), tpa / (tpa + fna))
    };
    let mean = |set: &[(u32, u64, u64, f64)], k: usize| {
        if set.is_empty() {
            return 0.0;
        }
        set.iter()
            .map(|c| {
                let s = scores(c);
                [s.0, s.1, s.2][k]
            })
            .sum::<f64>()
            / set.len() as f64
    };
    let prime = tp_prime(&m.tps);
    HotaAt {
        det_a,
        ass_a: mean(&m.tps, 0),
        ass_pr: mean(&m.tps, 1),
        ass_re: mean(&m.tps, 2),
        ass_a_prime: mean(&prime, 0),
    }
}

pub fn alphas() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// `(HOTA, TGRHOTA, AssA, AssA')` averaged over the default grid.
pub fn hota(gt: &[Row], pr: &[Row]) -> (f64, f64, f64, f64) {
    let per: Vec<HotaAt> = alphas().into_iter().map(|a| hota_at(gt, pr, a)).collect();
    let n = per.len() as f64;
    (
        per.iter().map(|h| (h.det_a * h.ass_a).sqrt()).sum::<f64>() / n,
        per.iter().map(|h| (h.det_a * h.ass_a_prime).sqrt()).sum::<f64>() / n,
        per.iter().map(|h| h.ass_a).sum::<f64>() / n,
        per.iter().map(|h| h.ass_a_prime).sum::<f64>() / n,
    )
}

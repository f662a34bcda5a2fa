//! Appearance-only multi-person association and track lifecycle.
//!
//! Every frame, one cost matrix of gallery distances is built between all
//! live tracks and the frame's observations and solved globally. There is no
//! motion model and no gating; matches farther than `tau` are dissolved after
//! the solve. Tracks missed for more than `age` consecutive frames are
//! deleted, and with `Age::Infinite` a confirmed track lives forever.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::assignment::{solve_min_cost, CostMatrix};
use crate::descriptor::{gallery_distance, normalized, DescriptorLayout, DistanceMode};
use crate::error::{Error, Result};
use crate::fusion::{pair_detections, DEFAULT_MIN_CONTAINMENT};
use crate::types::{BoundingBox, Detection, DetectionKind, Embedding, FusedObservation, TrajectoryRole, TrajectorySet};

/// Consecutive missed frames after which a track is deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Age {
    Finite(u32),
    #[default]
    Infinite,
}

impl fmt::Display for Age {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Age::Finite(n) => write!(f, "{n}"),
            Age::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Age {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Age::Infinite);
        }
        match s.parse::<u32>() {
            Ok(n) if n > 0 => Ok(Age::Finite(n)),
            _ => Err(format!("age must be a positive integer or `inf`, got `{s}`")),
        }
    }
}

/// Which detections feed the descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FusionMode {
    Wb,
    Hs,
    #[default]
    WbHs,
}

impl FusionMode {
    pub fn uses_wb(self) -> bool {
        self != FusionMode::Hs
    }

    pub fn uses_hs(self) -> bool {
        self != FusionMode::Wb
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionMode::Wb => "wb",
            FusionMode::Hs => "hs",
            FusionMode::WbHs => "wb+hs",
        })
    }
}

impl FromStr for FusionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "wb" => Ok(FusionMode::Wb),
            "hs" => Ok(FusionMode::Hs),
            "wb+hs" => Ok(FusionMode::WbHs),
            other => Err(format!("unknown fusion mode `{other}` (expected wb, hs or wb+hs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Maximum gallery distance for a match to stand, in `[0, 2]`.
    pub tau: f64,
    pub age: Age,
    /// Number of most recent descriptors kept per track.
    pub gallery_size: usize,
    pub distance_mode: DistanceMode,
    pub fusion_mode: FusionMode,
    /// Hits needed before a track is reported.
    pub n_init: u32,
    /// Age-prioritized matching cascade; ablation only.
    pub cascade: bool,
    pub min_containment: f64,
    pub hs_weight: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            tau: 0.85,
            age: Age::Infinite,
            gallery_size: 100,
            distance_mode: DistanceMode::Mean,
            fusion_mode: FusionMode::WbHs,
            n_init: 3,
            cascade: false,
            min_containment: DEFAULT_MIN_CONTAINMENT,
            hs_weight: 1.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.tau) {
            return Err(Error::Config(format!("tau must lie in [0, 2], got {}", self.tau)));
        }
        if self.gallery_size == 0 {
            return Err(Error::Config("gallery size must be at least 1".into()));
        }
        if self.n_init == 0 {
            return Err(Error::Config("n_init must be at least 1".into()));
        }
        if self.age == Age::Finite(0) {
            return Err(Error::Config("age must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.min_containment) {
            return Err(Error::Config(format!("min containment must lie in [0, 1], got {}", self.min_containment)));
        }
        if !(self.hs_weight.is_finite() && self.hs_weight >= 0.0) {
            return Err(Error::Config(format!("hs weight must be non-negative, got {}", self.hs_weight)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Deleted,
}

/// One reported box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRow {
    pub frame: u32,
    pub track_id: u64,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone)]
pub struct Track {
    pub track_id: u64,
    gallery: VecDeque<Embedding>,
    /// Sum of the unit-normalized gallery entries, for O(dim) mean distance.
    unit_sum: Vec<f64>,
    evictions: usize,
    pub frames_since_update: u32,
    pub hits: u32,
    pub status: TrackStatus,
    /// Rows matched while tentative; released on confirmation.
    pending: Vec<OutputRow>,
}

impl Track {
    fn new(track_id: u64, descriptor: Embedding) -> Self {
        let mut t = Self {
            track_id,
            gallery: VecDeque::new(),
            unit_sum: vec![0.0; descriptor.dim()],
            evictions: 0,
            frames_since_update: 0,
            hits: 0,
            status: TrackStatus::Tentative,
            pending: Vec::new(),
        };
        t.push_descriptor(descriptor, usize::MAX);
        t
    }

    /// Gallery entries, oldest first.
    pub fn gallery(&self) -> impl ExactSizeIterator<Item = &Embedding> {
        self.gallery.iter()
    }

    fn push_descriptor(&mut self, d: Embedding, capacity: usize) {
        accumulate_unit(&mut self.unit_sum, &d, 1.0);
        self.gallery.push_back(d);
        while self.gallery.len() > capacity {
            let old = self.gallery.pop_front().expect("gallery is non-empty");
            accumulate_unit(&mut self.unit_sum, &old, -1.0);
            self.evictions += 1;
        }
        // Bound the drift of the running sum.
        if self.evictions >= capacity.max(1) {
            self.evictions = 0;
            self.unit_sum.iter_mut().for_each(|s| *s = 0.0);
            for e in &self.gallery {
                accumulate_unit(&mut self.unit_sum, e, 1.0);
            }
        }
    }

    /// Same value as [`gallery_distance`] over this track's gallery.
    pub fn distance(&self, obs: &Embedding, mode: DistanceMode) -> Result<f64> {
        if obs.dim() != self.unit_sum.len() {
            return Err(Error::DimensionMismatch { expected: self.unit_sum.len(), got: obs.dim() });
        }
        match mode {
            DistanceMode::Mean => {
                let norm = obs.norm();
                if norm == 0.0 {
                    return Ok(1.0);
                }
                let s: f64 = obs.values().iter().zip(&self.unit_sum).map(|(&o, &g)| f64::from(o) * g).sum();
                Ok((1.0 - s / norm / self.gallery.len() as f64).clamp(0.0, 2.0))
            }
            DistanceMode::Min => gallery_distance(obs, self.gallery.iter(), mode),
        }
    }
}

fn accumulate_unit(sum: &mut [f64], e: &Embedding, sign: f64) {
    let norm = e.norm();
    if norm == 0.0 {
        return;
    }
    for (s, &v) in sum.iter_mut().zip(e.values()) {
        *s += sign * f64::from(v) / norm;
    }
}

/// Result of associating one frame's observations with the live tracks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Association {
    /// `(track_id, observation index)`.
    pub matches: Vec<(u64, usize)>,
    pub unmatched_tracks: Vec<u64>,
    pub unmatched_obs: Vec<usize>,
}

/// Solves `cost` (tracks × observations) and dissolves matches above `tau`.
/// Returns matched `(row, col)` pairs.
pub fn match_with_threshold(cost: &CostMatrix, tau: f64) -> Result<Vec<(usize, usize)>> {
    let res = solve_min_cost(cost)?;
    Ok(res.pairs.into_iter().filter(|&(r, c)| cost.get(r, c) <= tau).collect())
}

/// Per-sequence tracker state.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    tracks: Vec<Track>,
    next_id: u64,
    frame_cursor: u32,
    descriptor_dim: Option<usize>,
}

impl Tracker {
    pub fn new(cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, tracks: Vec::new(), next_id: 1, frame_cursor: 0, descriptor_dim: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    /// Live (non-deleted) tracks.
    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn frame_cursor(&self) -> u32 {
        self.frame_cursor
    }

    /// Number of track ids handed out so far.
    pub fn tracks_created(&self) -> u64 {
        self.next_id - 1
    }

    fn check_frame(&self, frame: u32, obs: &[FusedObservation]) -> Result<()> {
        let expected = self.frame_cursor + 1;
        if frame != expected {
            return Err(Error::FrameOrderViolation { expected, got: frame });
        }
        if let Some(o) = obs.iter().find(|o| o.frame != frame) {
            return Err(Error::FrameOrderViolation { expected, got: o.frame });
        }
        let dim = self.descriptor_dim.or(obs.first().map(|o| o.descriptor.dim()));
        if let Some(dim) = dim {
            if let Some(o) = obs.iter().find(|o| o.descriptor.dim() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: o.descriptor.dim() });
            }
        }
        Ok(())
    }

    /// Matches `obs` (all from the next frame) against the live tracks
    /// without changing any state.
    pub fn associate_frame(&self, frame: u32, obs: &[FusedObservation]) -> Result<Association> {
        self.check_frame(frame, obs)?;
        let cost = self.cost_matrix(&(0..self.tracks.len()).collect::<Vec<_>>(), obs)?;

        let mut track_matched = vec![false; self.tracks.len()];
        let mut obs_matched = vec![false; obs.len()];
        let mut matches = Vec::new();

        if self.cfg.cascade {
            // Buckets of equal frames_since_update, most recently updated first.
            let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (i, t) in self.tracks.iter().enumerate() {
                levels.entry(t.frames_since_update).or_default().push(i);
            }
            for rows in levels.values() {
                let cols: Vec<usize> = (0..obs.len()).filter(|&k| !obs_matched[k]).collect();
                if cols.is_empty() {
                    break;
                }
                let sub = CostMatrix::from_fn(rows.len(), cols.len(), |r, c| cost.get(rows[r], cols[c]));
                for (r, c) in match_with_threshold(&sub, self.cfg.tau)? {
                    track_matched[rows[r]] = true;
                    obs_matched[cols[c]] = true;
                    matches.push((rows[r], cols[c]));
                }
            }
        } else {
            for (r, c) in match_with_threshold(&cost, self.cfg.tau)? {
                track_matched[r] = true;
                obs_matched[c] = true;
                matches.push((r, c));
            }
        }

        matches.sort_unstable();
        Ok(Association {
            matches: matches.into_iter().map(|(r, c)| (self.tracks[r].track_id, c)).collect(),
            unmatched_tracks: self
                .tracks
                .iter()
                .zip(&track_matched)
                .filter(|(_, &m)| !m)
                .map(|(t, _)| t.track_id)
                .collect(),
            unmatched_obs: (0..obs.len()).filter(|&k| !obs_matched[k]).collect(),
        })
    }

    fn cost_matrix(&self, rows: &[usize], obs: &[FusedObservation]) -> Result<CostMatrix> {
        let mut data = Vec::with_capacity(rows.len() * obs.len());
        for &r in rows {
            let track = &self.tracks[r];
            for o in obs {
                data.push(track.distance(&o.descriptor, self.cfg.distance_mode)?);
            }
        }
        CostMatrix::new(rows.len(), obs.len(), data)
    }

    /// Advances one frame. Returns the rows that become reportable: matched
    /// confirmed tracks for this frame, plus the earlier tentative-phase rows
    /// of any track confirmed on this frame.
    pub fn step(&mut self, frame: u32, obs: &[FusedObservation]) -> Result<Vec<OutputRow>> {
        let assoc = self.associate_frame(frame, obs)?;
        if self.descriptor_dim.is_none() {
            self.descriptor_dim = obs.first().map(|o| o.descriptor.dim());
        }
        let index: HashMap<u64, usize> = self.tracks.iter().enumerate().map(|(i, t)| (t.track_id, i)).collect();
        let mut rows = Vec::new();

        for &(track_id, k) in &assoc.matches {
            let track = &mut self.tracks[index[&track_id]];
            let o = &obs[k];
            track.push_descriptor(o.descriptor.clone(), self.cfg.gallery_size);
            track.frames_since_update = 0;
            track.hits += 1;
            let row = OutputRow { frame, track_id, bbox: o.bbox };
            match track.status {
                TrackStatus::Confirmed => rows.push(row),
                TrackStatus::Tentative => {
                    track.pending.push(row);
                    if track.hits >= self.cfg.n_init {
                        track.status = TrackStatus::Confirmed;
                        rows.append(&mut track.pending);
                    }
                }
                TrackStatus::Deleted => unreachable!("deleted tracks are removed"),
            }
        }

        for track_id in &assoc.unmatched_tracks {
            let track = &mut self.tracks[index[track_id]];
            track.frames_since_update += 1;
            let expired = match self.cfg.age {
                Age::Finite(a) => track.frames_since_update > a,
                Age::Infinite => false,
            };
            if track.status == TrackStatus::Tentative || expired {
                track.status = TrackStatus::Deleted;
            }
        }
        self.tracks.retain(|t| t.status != TrackStatus::Deleted);

        for &k in &assoc.unmatched_obs {
            let o = &obs[k];
            let mut track = Track::new(self.next_id, o.descriptor.clone());
            self.next_id += 1;
            track.hits = 1;
            let row = OutputRow { frame, track_id: track.track_id, bbox: o.bbox };
            if track.hits >= self.cfg.n_init {
                track.status = TrackStatus::Confirmed;
                rows.push(row);
            } else {
                track.pending.push(row);
            }
            self.tracks.push(track);
        }

        self.frame_cursor = frame;
        rows.sort_by_key(|r| (r.frame, r.track_id));
        Ok(rows)
    }
}

/// Detections and embeddings of one sequence.
#[derive(Debug, Clone, Copy)]
pub struct SequenceInput<'a> {
    pub wb_detections: &'a [Detection],
    pub hs_detections: &'a [Detection],
    pub wb_embeddings: &'a HashMap<u64, Embedding>,
    pub hs_embeddings: &'a HashMap<u64, Embedding>,
    /// Frames to process; defaults to the last frame with a detection.
    pub num_frames: Option<u32>,
}

fn group_by_frame(dets: &[Detection], kind: DetectionKind) -> Result<BTreeMap<u32, Vec<Detection>>> {
    let mut out: BTreeMap<u32, Vec<Detection>> = BTreeMap::new();
    for d in dets {
        if d.kind != kind {
            return Err(Error::WrongKind { expected: kind.as_str(), got: d.kind.as_str() });
        }
        out.entry(d.frame).or_default().push(d.clone());
    }
    Ok(out)
}

fn embedding<'a>(map: &'a HashMap<u64, Embedding>, d: &Detection) -> Result<&'a Embedding> {
    map.get(&d.det_id).ok_or(Error::MissingEmbedding { det_id: d.det_id })
}

/// Builds the observations of one frame according to the fusion mode.
pub fn build_observations(
    frame: u32,
    wb: &[Detection],
    hs: &[Detection],
    input: &SequenceInput<'_>,
    layout: &DescriptorLayout,
    cfg: &TrackerConfig,
) -> Result<Vec<FusedObservation>> {
    let mut obs = Vec::new();
    match cfg.fusion_mode {
        FusionMode::Wb => {
            for d in wb {
                let descriptor = normalized(embedding(input.wb_embeddings, d)?);
                obs.push(FusedObservation { frame, bbox: d.bbox, hs_box: None, descriptor });
            }
        }
        FusionMode::Hs => {
            for d in hs {
                let descriptor = normalized(embedding(input.hs_embeddings, d)?);
                obs.push(FusedObservation { frame, bbox: d.bbox, hs_box: None, descriptor });
            }
        }
        FusionMode::WbHs => {
            let pairing = pair_detections(wb, hs, cfg.min_containment)?;
            for (w, h) in &pairing.matched {
                let descriptor =
                    layout.fuse(embedding(input.wb_embeddings, w)?, Some(embedding(input.hs_embeddings, h)?))?;
                obs.push(FusedObservation { frame, bbox: w.bbox, hs_box: Some(h.bbox), descriptor });
            }
            for w in &pairing.unmatched_wb {
                let descriptor = layout.fuse(embedding(input.wb_embeddings, w)?, None)?;
                obs.push(FusedObservation { frame, bbox: w.bbox, hs_box: None, descriptor });
            }
        }
    }
    Ok(obs)
}

fn map_dim(map: &HashMap<u64, Embedding>) -> usize {
    map.values().next().map_or(0, Embedding::dim)
}

/// Runs the full pipeline over a sequence and returns the reported
/// trajectories. Deterministic in its inputs.
pub fn run_sequence(input: &SequenceInput<'_>, cfg: &TrackerConfig) -> Result<TrajectorySet> {
    let mut tracker = Tracker::new(cfg.clone())?;
    let wb = if cfg.fusion_mode.uses_wb() {
        group_by_frame(input.wb_detections, DetectionKind::Wb)?
    } else {
        BTreeMap::new()
    };
    let hs = if cfg.fusion_mode.uses_hs() {
        group_by_frame(input.hs_detections, DetectionKind::Hs)?
    } else {
        BTreeMap::new()
    };
    let layout = DescriptorLayout {
        wb_dim: map_dim(input.wb_embeddings),
        hs_dim: map_dim(input.hs_embeddings),
        hs_weight: cfg.hs_weight,
    };
    let last = wb.keys().chain(hs.keys()).copied().max().unwrap_or(0);
    let num_frames = input.num_frames.unwrap_or(0).max(last);

    let mut out = TrajectorySet::new(TrajectoryRole::Prediction);
    let empty = Vec::new();
    for frame in 1..=num_frames {
        let obs = build_observations(
            frame,
            wb.get(&frame).unwrap_or(&empty),
            hs.get(&frame).unwrap_or(&empty),
            input,
            &layout,
            cfg,
        )?;
        for row in tracker.step(frame, &obs)? {
            out.insert(row.frame, row.track_id, row.bbox)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(angle_deg: f64) -> Embedding {
        let a = angle_deg.to_radians();
        Embedding(vec![a.cos() as f32, a.sin() as f32])
    }

    fn obs(frame: u32, x: f64, descriptor: Embedding) -> FusedObservation {
        FusedObservation { frame, bbox: BoundingBox::new(x, 0.0, 10.0, 20.0), hs_box: None, descriptor }
    }

    fn cfg() -> TrackerConfig {
        TrackerConfig::default()
    }

    /// Angle whose cosine distance from angle 0 equals `d`.
    fn angle_for_distance(d: f64) -> f64 {
        (1.0 - d).acos().to_degrees()
    }

    #[test]
    fn below_threshold_matches() {
        let mut t = Tracker::new(cfg()).unwrap();
        t.step(1, &[obs(1, 0.0, unit(0.0))]).unwrap();
        let a = t.associate_frame(2, &[obs(2, 0.0, unit(angle_for_distance(0.3)))]).unwrap();
        assert_eq!(a.matches, vec![(1, 0)]);
    }

    #[test]
    fn above_threshold_is_unmatched() {
        let mut t = Tracker::new(cfg()).unwrap();
        t.step(1, &[obs(1, 0.0, unit(0.0))]).unwrap();
        let a = t.associate_frame(2, &[obs(2, 0.0, unit(angle_for_distance(0.9)))]).unwrap();
        assert!(a.matches.is_empty());
        assert_eq!(a.unmatched_tracks, vec![1]);
        assert_eq!(a.unmatched_obs, vec![0]);
    }

    #[test]
    fn global_solve_prefers_lower_total() {
        let cost = CostMatrix::from_rows(&[vec![0.1, 0.4], vec![0.2, 0.9]]).unwrap();
        assert_eq!(match_with_threshold(&cost, 0.85).unwrap(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn cold_start_spawns_tentative_tracks() {
        let mut t = Tracker::new(cfg()).unwrap();
        let rows = t.step(1, &[obs(1, 0.0, unit(0.0)), obs(1, 50.0, unit(90.0))]).unwrap();
        assert!(rows.is_empty());
        assert_eq!(t.tracks().len(), 2);
        assert!(t.tracks().iter().all(|tr| tr.status == TrackStatus::Tentative));
    }

    #[test]
    fn confirmation_releases_pending_rows() {
        let mut t = Tracker::new(cfg()).unwrap();
        assert!(t.step(1, &[obs(1, 0.0, unit(0.0))]).unwrap().is_empty());
        assert!(t.step(2, &[obs(2, 1.0, unit(0.0))]).unwrap().is_empty());
        let rows = t.step(3, &[obs(3, 2.0, unit(0.0))]).unwrap();
        assert_eq!(rows.iter().map(|r| r.frame).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(rows.iter().all(|r| r.track_id == 1));
        assert_eq!(t.tracks()[0].status, TrackStatus::Confirmed);
        let rows = t.step(4, &[obs(4, 3.0, unit(0.0))]).unwrap();
        assert_eq!(rows.len(), 1);
    }

    fn confirmed_tracker(age: Age) -> Tracker {
        let mut t = Tracker::new(TrackerConfig { age, ..cfg() }).unwrap();
        for f in 1..=3 {
            t.step(f, &[obs(f, 0.0, unit(0.0))]).unwrap();
        }
        t
    }

    #[test]
    fn finite_age_deletes_after_exceeding() {
        let mut t = confirmed_tracker(Age::Finite(5));
        for f in 4..=8 {
            t.step(f, &[]).unwrap();
        }
        assert_eq!(t.tracks()[0].frames_since_update, 5);
        t.step(9, &[]).unwrap();
        assert!(t.tracks().is_empty());
        // the returning identity gets a fresh id
        t.step(10, &[obs(10, 0.0, unit(0.0))]).unwrap();
        assert_eq!(t.tracks()[0].track_id, 2);
    }

    #[test]
    fn infinite_age_keeps_tracks_forever() {
        let mut t = confirmed_tracker(Age::Infinite);
        for f in 4..4 + 10_000 {
            t.step(f, &[]).unwrap();
        }
        assert_eq!(t.tracks().len(), 1);
        assert_eq!(t.tracks()[0].frames_since_update, 10_000);
        let a = t.associate_frame(10_004, &[obs(10_004, 0.0, unit(1.0))]).unwrap();
        assert_eq!(a.matches, vec![(1, 0)]);
    }

    #[test]
    fn tentative_track_dies_on_miss() {
        let mut t = Tracker::new(cfg()).unwrap();
        t.step(1, &[obs(1, 0.0, unit(0.0))]).unwrap();
        t.step(2, &[]).unwrap();
        assert!(t.tracks().is_empty());
    }

    #[test]
    fn frame_order_is_enforced() {
        let mut t = Tracker::new(cfg()).unwrap();
        assert!(matches!(t.step(2, &[]), Err(Error::FrameOrderViolation { expected: 1, got: 2 })));
        t.step(1, &[]).unwrap();
        assert!(matches!(
            t.step(2, &[obs(3, 0.0, unit(0.0))]),
            Err(Error::FrameOrderViolation { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn gallery_is_bounded_and_ordered() {
        let mut t = Tracker::new(TrackerConfig { gallery_size: 3, ..cfg() }).unwrap();
        for f in 1..=6 {
            t.step(f, &[obs(f, 0.0, unit(f as f64))]).unwrap();
        }
        let g: Vec<_> = t.tracks()[0].gallery().cloned().collect();
        assert_eq!(g, vec![unit(4.0), unit(5.0), unit(6.0)]);
    }

    #[test]
    fn fast_mean_matches_reference_distance() {
        let mut t = Tracker::new(TrackerConfig { gallery_size: 7, tau: 2.0, ..cfg() }).unwrap();
        for f in 1..=40u32 {
            let e = Embedding(vec![(f as f32 * 0.7).sin(), (f as f32 * 1.3).cos(), 0.5, f as f32 % 3.0]);
            t.step(f, &[obs(f, 0.0, e)]).unwrap();
        }
        let probe = Embedding(vec![0.3, -0.1, 0.8, 0.2]);
        let track = &t.tracks()[0];
        let fast = track.distance(&probe, DistanceMode::Mean).unwrap();
        let reference = gallery_distance(&probe, track.gallery(), DistanceMode::Mean).unwrap();
        assert!((fast - reference).abs() < 1e-9);
    }

    #[test]
    fn cascade_prefers_recent_tracks() {
        // track 1 = [0, 0] missed the last frame, track 2 = [40, 40] did not.
        // A probe at 15 degrees is closer to track 1, which the global solve
        // picks; the cascade serves the recent track 2 first.
        let mut cfg = cfg();
        cfg.n_init = 1;
        let mut t = Tracker::new(cfg).unwrap();
        t.step(1, &[obs(1, 0.0, unit(0.0))]).unwrap();
        t.step(2, &[obs(2, 0.0, unit(0.0)), obs(2, 50.0, unit(40.0))]).unwrap();
        t.step(3, &[obs(3, 50.0, unit(40.0))]).unwrap();
        assert_eq!(t.tracks()[0].frames_since_update, 1);
        assert_eq!(t.tracks()[1].frames_since_update, 0);
        let probe = [obs(4, 0.0, unit(15.0))];
        let global = t.associate_frame(4, &probe).unwrap();
        assert_eq!(global.matches, vec![(1, 0)]);
        let mut cascaded = t.clone();
        cascaded.cfg.cascade = true;
        let a = cascaded.associate_frame(4, &probe).unwrap();
        assert_eq!(a.matches, vec![(2, 0)]);
    }

    #[test]
    fn config_validation() {
        assert!(TrackerConfig { tau: 2.5, ..cfg() }.validate().is_err());
        assert!(TrackerConfig { gallery_size: 0, ..cfg() }.validate().is_err());
        assert!(TrackerConfig { n_init: 0, ..cfg() }.validate().is_err());
        assert!("0".parse::<Age>().is_err());
        assert_eq!("inf".parse::<Age>().unwrap(), Age::Infinite);
        assert_eq!("30".parse::<Age>().unwrap(), Age::Finite(30));
        assert_eq!("wb+hs".parse::<FusionMode>().unwrap(), FusionMode::WbHs);
    }

    #[test]
    fn run_sequence_reports_missing_embedding() {
        let dets = vec![Detection {
            frame: 1,
            kind: DetectionKind::Wb,
            bbox: BoundingBox::new(0.0, 0.0, 10.0, 20.0),
            confidence: 1.0,
            det_id: 42,
        }];
        let empty = HashMap::new();
        let input = SequenceInput {
            wb_detections: &dets,
            hs_detections: &[],
            wb_embeddings: &empty,
            hs_embeddings: &empty,
            num_frames: None,
        };
        let err = run_sequence(&input, &TrackerConfig { fusion_mode: FusionMode::Wb, ..cfg() }).unwrap_err();
        assert!(matches!(err, Error::MissingEmbedding { det_id: 42 }));
    }
}

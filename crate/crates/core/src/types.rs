//! Domain types shared by every stage of the pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Axis-aligned box in continuous pixel coordinates, top-left origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self { x: self.x + dx, y: self.y + dy, ..*self }
    }

    /// `true` when `other` lies entirely within `self` (shared edges allowed).
    pub fn contains(&self, other: &BoundingBox) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "bounding box" });
        }
        if self.w <= 0.0 || self.h <= 0.0 {
            return Err(Error::DegenerateBox { w: self.w, h: self.h });
        }
        Ok(())
    }
}

/// Whole-body or head-shoulder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectionKind {
    Wb,
    Hs,
}

impl DetectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectionKind::Wb => "wb",
            DetectionKind::Hs => "hs",
        }
    }
}

impl fmt::Display for DetectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "wb" => Ok(DetectionKind::Wb),
            "hs" => Ok(DetectionKind::Hs),
            other => Err(format!("unknown detection kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// 1-based frame index.
    pub frame: u32,
    pub kind: DetectionKind,
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub det_id: u64,
}

impl Detection {
    pub fn validate(&self) -> Result<()> {
        if self.frame == 0 {
            return Err(Error::Config("frame indices start at 1".into()));
        }
        self.bbox.validate()?;
        if !self.confidence.is_finite() {
            return Err(Error::NonFiniteValue { what: "confidence" });
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::Config(format!("confidence {} outside [0, 1]", self.confidence)));
        }
        Ok(())
    }
}

/// Appearance feature vector. An all-zero vector is legal and stands for a
/// missing part (head-shoulder not detected).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Embedding(pub Vec<f32>);

impl Embedding {
    pub fn new(values: Vec<f32>) -> Self {
        Self(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if !self.0.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "embedding" });
        }
        Ok(())
    }
}

/// A detection ready for association: the reported box, the paired
/// head-shoulder box if any, and the concatenated descriptor.
///
/// `bbox` is the whole-body box, except in head-shoulder-only tracking where
/// the head-shoulder box is the reported box and `hs_box` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedObservation {
    pub frame: u32,
    pub bbox: BoundingBox,
    pub hs_box: Option<BoundingBox>,
    pub descriptor: Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryRole {
    GroundTruth,
    Prediction,
}

/// `(frame, id) -> box` with at most one box per key.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub role: TrajectoryRole,
    entries: BTreeMap<(u32, u64), BoundingBox>,
}

impl TrajectorySet {
    pub fn new(role: TrajectoryRole) -> Self {
        Self { role, entries: BTreeMap::new() }
    }

    /// Inserts a box, refusing a second box for the same `(frame, id)`.
    pub fn insert(&mut self, frame: u32, id: u64, bbox: BoundingBox) -> Result<()> {
        use std::collections::btree_map::Entry;
        match self.entries.entry((frame, id)) {
            Entry::Occupied(_) => Err(Error::DuplicateEntry { frame, id }),
            Entry::Vacant(v) => {
                v.insert(bbox);
                Ok(())
            }
        }
    }

    pub fn get(&self, frame: u32, id: u64) -> Option<&BoundingBox> {
        self.entries.get(&(frame, id))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in `(frame, id)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u64, &BoundingBox)> {
        self.entries.iter().map(|(&(f, id), b)| (f, id, b))
    }

    pub fn ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self.entries.keys().map(|&(_, id)| id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn max_frame(&self) -> Option<u32> {
        self.entries.keys().map(|&(f, _)| f).max()
    }

    /// Entries grouped by frame, frames ascending, ids ascending within a frame.
    pub fn frames(&self) -> Vec<(u32, Vec<(u64, BoundingBox)>)> {
        let mut out: Vec<(u32, Vec<(u64, BoundingBox)>)> = Vec::new();
        for (&(frame, id), b) in &self.entries {
            match out.last_mut() {
                Some((f, rows)) if *f == frame => rows.push((id, *b)),
                _ => out.push((frame, vec![(id, *b)])),
            }
        }
        out
    }

    /// Returns a copy with ids renamed through `map`; ids absent from the map
    /// are kept.
    pub fn relabeled(&self, map: impl Fn(u64) -> u64) -> Result<Self> {
        let mut out = Self::new(self.role);
        for (f, id, b) in self.iter() {
            out.insert(f, map(id), *b)?;
        }
        Ok(out)
    }
}

/// Checks frame indices and every box of a trajectory set.
pub fn validate_trajectory_set(ts: &TrajectorySet) -> Result<()> {
    for (frame, id, b) in ts.iter() {
        if frame == 0 {
            return Err(Error::Config(format!("id {id} has frame index 0; frames start at 1")));
        }
        b.validate()?;
    }
    Ok(())
}

/// One true-positive match at a given localization threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpRecord {
    pub frame: u32,
    pub pr_id: u64,
    pub gt_id: u64,
    pub loc_score: f64,
}

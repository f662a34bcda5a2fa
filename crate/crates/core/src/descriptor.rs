//! Concatenated appearance descriptors and detection-to-track distances.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::Embedding;

/// How the per-entry cosine distances against a gallery are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    #[default]
    Mean,
    Min,
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Mean => "mean",
            DistanceMode::Min => "min",
        })
    }
}

impl FromStr for DistanceMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mean" => Ok(DistanceMode::Mean),
            "min" => Ok(DistanceMode::Min),
            other => Err(format!("unknown distance mode `{other}` (expected mean or min)")),
        }
    }
}

/// Part sizes of the fused descriptor `[wb | hs]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorLayout {
    pub wb_dim: usize,
    pub hs_dim: usize,
    /// Multiplier on the normalized hs part. 1 is plain concatenation.
    pub hs_weight: f64,
}

impl DescriptorLayout {
    pub fn new(wb_dim: usize, hs_dim: usize) -> Self {
        Self { wb_dim, hs_dim, hs_weight: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.wb_dim + self.hs_dim
    }

    /// L2-normalizes each part on its own and concatenates them; a missing hs
    /// part becomes a zero block.
    pub fn fuse(&self, wb: &Embedding, hs: Option<&Embedding>) -> Result<Embedding> {
        if wb.dim() != self.wb_dim {
            return Err(Error::DimensionMismatch { expected: self.wb_dim, got: wb.dim() });
        }
        if let Some(hs) = hs {
            if hs.dim() != self.hs_dim {
                return Err(Error::DimensionMismatch { expected: self.hs_dim, got: hs.dim() });
            }
        }
        let mut out = Vec::with_capacity(self.dim());
        push_normalized(&mut out, wb.values(), 1.0);
        match hs {
            Some(hs) => push_normalized(&mut out, hs.values(), self.hs_weight),
            None => out.resize(self.dim(), 0.0),
        }
        let fused = Embedding(out);
        if fused.is_zero() {
            log::warn!("fused descriptor is all zero; it will be at distance 1 from everything");
        }
        Ok(fused)
    }
}

/// Fuses a wb feature with an optional hs feature of dimension `hs_dim`.
pub fn fuse_embedding(wb: &Embedding, hs: Option<&Embedding>, hs_dim: usize) -> Result<Embedding> {
    DescriptorLayout::new(wb.dim(), hs_dim).fuse(wb, hs)
}

/// Unit-normalizes a single feature (zero stays zero).
pub fn normalized(e: &Embedding) -> Embedding {
    let mut out = Vec::with_capacity(e.dim());
    push_normalized(&mut out, e.values(), 1.0);
    Embedding(out)
}

fn push_normalized(out: &mut Vec<f32>, part: &[f32], weight: f64) {
    let norm = part.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
    if norm == 0.0 {
        out.extend(std::iter::repeat_n(0.0, part.len()));
    } else {
        out.extend(part.iter().map(|&v| (f64::from(v) / norm * weight) as f32));
    }
}

pub(crate) fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

/// Cosine similarity; 0 when either side is the zero vector.
pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot(a.values(), b.values()) / (na * nb)).clamp(-1.0, 1.0))
}

/// Distance in `[0, 2]` between a descriptor and a track gallery: the mean
/// or the minimum of `1 - cos` over the gallery entries.
pub fn gallery_distance<'a>(
    obs: &Embedding,
    gallery: impl IntoIterator<Item = &'a Embedding>,
    mode: DistanceMode,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut count = 0usize;
    for entry in gallery {
        let d = 1.0 - cosine_similarity(obs, entry)?;
        sum += d;
        min = min.min(d);
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyGallery);
    }
    Ok(match mode {
        DistanceMode::Mean => sum / count as f64,
        DistanceMode::Min => min,
    })
}

//! Text and binary file formats.
//!
//! Text formats are comma-separated, one record per line, no header.
//! Whitespace around fields and blank lines are tolerated on input.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::{BoundingBox, Detection, DetectionKind, Embedding, TrajectoryRole, TrajectorySet};

pub const EMBEDDING_MAGIC: &[u8; 4] = b"TGRE";

/// Whole-body and head-shoulder ground truth of one sequence, sharing ids.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub wb: TrajectorySet,
    pub hs: TrajectorySet,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self {
            wb: TrajectorySet::new(TrajectoryRole::GroundTruth),
            hs: TrajectorySet::new(TrajectoryRole::GroundTruth),
        }
    }

    pub fn kind(&self, kind: DetectionKind) -> &TrajectorySet {
        match kind {
            DetectionKind::Wb => &self.wb,
            DetectionKind::Hs => &self.hs,
        }
    }
}

impl Default for GroundTruth {
    fn default() -> Self {
        Self::new()
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.{}.tmp", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

struct Fields<'a> {
    path: &'a Path,
    line: usize,
    fields: Vec<&'a str>,
}

impl<'a> Fields<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.to_path_buf(), line: self.line, message: message.into() }
    }

    fn invalid(&self, source: Error) -> Error {
        Error::Invalid { path: self.path.to_path_buf(), line: self.line, source: Box::new(source) }
    }

    fn num<T: std::str::FromStr>(&self, i: usize, name: &str) -> Result<T> {
        self.fields[i].parse().map_err(|_| self.err(format!("bad {name} `{}`", self.fields[i])))
    }

    fn real(&self, i: usize, name: &str) -> Result<f64> {
        let v: f64 = self.num(i, name)?;
        if !v.is_finite() {
            return Err(self.invalid(Error::NonFiniteValue { what: "field" }));
        }
        Ok(v)
    }

    fn frame(&self, i: usize) -> Result<u32> {
        let f: u32 = self.num(i, "frame")?;
        if f == 0 {
            return Err(self.err("frames are 1-based"));
        }
        Ok(f)
    }

    fn bbox(&self, first: usize) -> Result<BoundingBox> {
        let b = BoundingBox::new(
            self.real(first, "x")?,
            self.real(first + 1, "y")?,
            self.real(first + 2, "w")?,
            self.real(first + 3, "h")?,
        );
        b.validate().map_err(|e| self.invalid(e))?;
        Ok(b)
    }
}

fn records<'a>(text: &'a str, path: &'a Path) -> impl Iterator<Item = Fields<'a>> {
    text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(move |(i, l)| Fields {
        path,
        line: i + 1,
        fields: l.split(',').map(str::trim).collect(),
    })
}

fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    // Keep `-0.000000` out of files.
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Parses ground truth. Two line layouts are accepted and may be mixed:
/// `frame,id,kind,x,y,w,h` with kind `wb` or `hs`, and MOTChallenge
/// `frame,id,x,y,w,h,conf,class,vis` (or the 10-field result variant), read
/// as whole-body boxes.
pub fn parse_ground_truth(text: &str, path: &Path) -> Result<GroundTruth> {
    let mut gt = GroundTruth::new();
    for r in records(text, path) {
        let kind_field = r.fields.get(2).and_then(|k| k.parse::<DetectionKind>().ok());
        let (kind, first) = match (r.fields.len(), kind_field) {
            (7, Some(kind)) => (kind, 3),
            (9 | 10, _) => (DetectionKind::Wb, 2),
            (n, _) => return Err(r.err(format!("expected 7 fields with a kind, or 9/10 MOT fields; got {n}"))),
        };
        let frame = r.frame(0)?;
        let id: u64 = r.num(1, "id")?;
        let b = r.bbox(first)?;
        let target = match kind {
            DetectionKind::Wb => &mut gt.wb,
            DetectionKind::Hs => &mut gt.hs,
        };
        target.insert(frame, id, b).map_err(|e| r.invalid(e))?;
    }
    Ok(gt)
}

pub fn load_ground_truth(path: &Path) -> Result<GroundTruth> {
    parse_ground_truth(&read_text(path)?, path)
}

pub fn format_ground_truth(gt: &GroundTruth) -> String {
    let mut rows: Vec<(u32, u64, DetectionKind, &BoundingBox)> = gt
        .wb
        .iter()
        .map(|(f, id, b)| (f, id, DetectionKind::Wb, b))
        .chain(gt.hs.iter().map(|(f, id, b)| (f, id, DetectionKind::Hs, b)))
        .collect();
    rows.sort_by_key(|&(f, id, k, _)| (f, id, k));
    let mut out = String::new();
    for (f, id, k, b) in rows {
        let _ = writeln!(out, "{f},{id},{k},{},{},{},{}", fmt6(b.x), fmt6(b.y), fmt6(b.w), fmt6(b.h));
    }
    out
}

pub fn write_ground_truth(gt: &GroundTruth, path: &Path) -> Result<()> {
    write_atomic(path, format_ground_truth(gt).as_bytes())
}

/// Parses `frame,kind,x,y,w,h,conf,det_id` lines, keeping file order.
pub fn parse_detections(text: &str, path: &Path) -> Result<Vec<Detection>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in records(text, path) {
        if r.fields.len() != 8 {
            return Err(r.err(format!("expected 8 fields, got {}", r.fields.len())));
        }
        let kind = r.fields[1].parse::<DetectionKind>().map_err(|m| r.err(m))?;
        let det = Detection {
            frame: r.frame(0)?,
            kind,
            bbox: r.bbox(2)?,
            confidence: r.real(6, "confidence")?,
            det_id: r.num(7, "det_id")?,
        };
        det.validate().map_err(|e| r.invalid(e))?;
        if !seen.insert(det.det_id) {
            return Err(Error::DuplicateDetId { path: path.to_path_buf(), line: r.line, det_id: det.det_id });
        }
        out.push(det);
    }
    Ok(out)
}

pub fn load_detections(path: &Path) -> Result<Vec<Detection>> {
    parse_detections(&read_text(path)?, path)
}

pub fn format_detections(dets: &[Detection]) -> String {
    let mut out = String::new();
    for d in dets {
        let b = &d.bbox;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            d.frame,
            d.kind,
            fmt6(b.x),
            fmt6(b.y),
            fmt6(b.w),
            fmt6(b.h),
            fmt6(d.confidence),
            d.det_id
        );
    }
    out
}

pub fn write_detections(dets: &[Detection], path: &Path) -> Result<()> {
    write_atomic(path, format_detections(dets).as_bytes())
}

/// Decodes the binary embedding format: `TGRE`, dimension as u32 LE, then
/// records of a u64 LE det_id followed by `dim` f32 LE values.
///
/// `expected_dim` rejects files whose header disagrees with the caller.
pub fn decode_embeddings(bytes: &[u8], path: &Path, expected_dim: Option<usize>) -> Result<HashMap<u64, Embedding>> {
    if bytes.len() < 4 || &bytes[..4] != EMBEDDING_MAGIC {
        return Err(Error::BadMagic { path: path.to_path_buf() });
    }
    let header = bytes.get(4..8).ok_or(Error::TruncatedRecord { path: path.to_path_buf(), offset: 4 })?;
    let dim = u32::from_le_bytes(header.try_into().expect("4 bytes")) as usize;
    if let Some(expected) = expected_dim {
        if expected != dim {
            return Err(Error::DimMismatch { path: path.to_path_buf(), expected, got: dim });
        }
    }
    let record = 8 + 4 * dim;
    let body = &bytes[8..];
    if !body.len().is_multiple_of(record) {
        let offset = 8 + body.len() / record * record;
        return Err(Error::TruncatedRecord { path: path.to_path_buf(), offset });
    }
    let mut out = HashMap::with_capacity(body.len() / record);
    for (i, chunk) in body.chunks_exact(record).enumerate() {
        let id = u64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
        let values: Vec<f32> =
            chunk[8..].chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes"))).collect();
        let emb = Embedding(values);
        let invalid = |source| Error::Invalid { path: path.to_path_buf(), line: i + 1, source: Box::new(source) };
        if !emb.values().iter().all(|v| v.is_finite()) {
            return Err(invalid(Error::NonFiniteValue { what: "embedding" }));
        }
        if out.insert(id, emb).is_some() {
            return Err(Error::DuplicateDetId { path: path.to_path_buf(), line: i + 1, det_id: id });
        }
    }
    Ok(out)
}

pub fn load_embeddings(path: &Path) -> Result<HashMap<u64, Embedding>> {
    load_embeddings_with_dim(path, None)
}

pub fn load_embeddings_with_dim(path: &Path, expected_dim: Option<usize>) -> Result<HashMap<u64, Embedding>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_embeddings(&bytes, path, expected_dim)
}

/// Encodes embeddings sorted by det_id. All vectors must share `dim`.
pub fn encode_embeddings(map: &HashMap<u64, Embedding>, dim: usize) -> Result<Vec<u8>> {
    let mut ids: Vec<u64> = map.keys().copied().collect();
    ids.sort_unstable();
    let mut out = Vec::with_capacity(8 + ids.len() * (8 + 4 * dim));
    out.extend_from_slice(EMBEDDING_MAGIC);
    let dim32 = u32::try_from(dim).map_err(|_| Error::Config(format!("embedding dimension {dim} too large")))?;
    out.extend_from_slice(&dim32.to_le_bytes());
    for id in ids {
        let e = &map[&id];
        if e.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: e.dim() });
        }
        out.extend_from_slice(&id.to_le_bytes());
        for v in e.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn write_embeddings(map: &HashMap<u64, Embedding>, dim: usize, path: &Path) -> Result<()> {
    write_atomic(path, &encode_embeddings(map, dim)?)
}

/// Parses tracker results in MOTChallenge layout: `frame,id,x,y,w,h` followed
/// by up to four ignored columns.
pub fn parse_tracker_output(text: &str, path: &Path) -> Result<TrajectorySet> {
    let mut out = TrajectorySet::new(TrajectoryRole::Prediction);
    for r in records(text, path) {
        if !(6..=10).contains(&r.fields.len()) {
            return Err(r.err(format!("expected 6 to 10 fields, got {}", r.fields.len())));
        }
        let frame = r.frame(0)?;
        let id: u64 = r.num(1, "id")?;
        let b = r.bbox(2)?;
        out.insert(frame, id, b).map_err(|e| r.invalid(e))?;
    }
    Ok(out)
}

pub fn load_tracker_output(path: &Path) -> Result<TrajectorySet> {
    parse_tracker_output(&read_text(path)?, path)
}

pub fn format_tracker_output(pred: &TrajectorySet) -> String {
    let mut out = String::new();
    for (f, id, b) in pred.iter() {
        let _ = writeln!(out, "{f},{id},{},{},{},{},1,-1,-1,-1", fmt6(b.x), fmt6(b.y), fmt6(b.w), fmt6(b.h));
    }
    out
}

pub fn write_tracker_output(pred: &TrajectorySet, path: &Path) -> Result<()> {
    write_atomic(path, format_tracker_output(pred).as_bytes())
}

/// Paths of one sequence.
#[derive(Debug, Clone, Default)]
pub struct SequencePaths {
    pub gt: Option<PathBuf>,
    pub detections_wb: Option<PathBuf>,
    pub detections_hs: Option<PathBuf>,
    pub embeddings_wb: Option<PathBuf>,
    pub embeddings_hs: Option<PathBuf>,
}

/// Parsed files of one sequence. Missing paths load as empty.
#[derive(Debug, Clone, Default)]
pub struct SequenceBundle {
    pub paths: SequencePaths,
    pub gt: Option<GroundTruth>,
    pub detections_wb: Vec<Detection>,
    pub detections_hs: Vec<Detection>,
    pub embeddings_wb: HashMap<u64, Embedding>,
    pub embeddings_hs: HashMap<u64, Embedding>,
}

impl SequenceBundle {
    pub fn load(paths: SequencePaths) -> Result<Self> {
        let dets = |p: &Option<PathBuf>| p.as_deref().map(load_detections).transpose().map(Option::unwrap_or_default);
        let embs = |p: &Option<PathBuf>| p.as_deref().map(load_embeddings).transpose().map(Option::unwrap_or_default);
        let bundle = Self {
            gt: paths.gt.as_deref().map(load_ground_truth).transpose()?,
            detections_wb: dets(&paths.detections_wb)?,
            detections_hs: dets(&paths.detections_hs)?,
            embeddings_wb: embs(&paths.embeddings_wb)?,
            embeddings_hs: embs(&paths.embeddings_hs)?,
            paths,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    /// Every embedding must belong to a detection of its kind, and every
    /// detection file must hold a single kind.
    pub fn validate(&self) -> Result<()> {
        for (dets, embs, kind) in [
            (&self.detections_wb, &self.embeddings_wb, DetectionKind::Wb),
            (&self.detections_hs, &self.embeddings_hs, DetectionKind::Hs),
        ] {
            if let Some(d) = dets.iter().find(|d| d.kind != kind) {
                return Err(Error::WrongKind { expected: kind.as_str(), got: d.kind.as_str() });
            }
            let ids: HashSet<u64> = dets.iter().map(|d| d.det_id).collect();
            if let Some(id) = embs.keys().find(|id| !ids.contains(id)) {
                return Err(Error::Config(format!("{kind} embedding for unknown det_id {id}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.txt")
    }

    #[test]
    fn tgrdb_line() {
        let gt = parse_ground_truth("1,3,wb,10,20,50,100\n", p()).unwrap();
        assert_eq!(gt.wb.get(1, 3), Some(&BoundingBox::new(10.0, 20.0, 50.0, 100.0)));
        assert!(gt.hs.is_empty());
    }

    #[test]
    fn degenerate_box_reports_line() {
        let err = parse_ground_truth("1,3,wb,10,20,-5,100\n", p()).unwrap_err();
        assert!(matches!(err, Error::Invalid { line: 1, .. }));
        assert!(matches!(err.root(), Error::DegenerateBox { .. }));
    }

    #[test]
    fn mot_line_is_whole_body() {
        let gt = parse_ground_truth("1,3,10,20,50,100,1,1,1.0", p()).unwrap();
        assert_eq!(gt.wb.get(1, 3), Some(&BoundingBox::new(10.0, 20.0, 50.0, 100.0)));
    }

    #[test]
    fn whitespace_tolerated() {
        let gt = parse_ground_truth(" 2 , 4 , hs , 1 , 2 , 3 , 4 \n\n", p()).unwrap();
        assert_eq!(gt.hs.get(2, 4), Some(&BoundingBox::new(1.0, 2.0, 3.0, 4.0)));
    }

    #[test]
    fn duplicate_gt_entry() {
        let err = parse_ground_truth("1,3,wb,0,0,1,1\n1,3,wb,0,0,2,2\n", p()).unwrap_err();
        assert!(matches!(err, Error::Invalid { line: 2, .. }));
        assert!(matches!(err.root(), Error::DuplicateEntry { frame: 1, id: 3 }));
    }

    #[test]
    fn detections() {
        assert!(parse_detections("", p()).unwrap().is_empty());
        let text = "1,wb,0,0,10,10,0.9,5\n1,wb,5,0,10,10,0.8,6\n2,wb,0,0,10,10,0.7,7\n";
        let d = parse_detections(text, p()).unwrap();
        assert_eq!(d.iter().map(|d| d.det_id).collect::<Vec<_>>(), vec![5, 6, 7]);
        let dup = "1,wb,0,0,10,10,0.9,5\n2,wb,0,0,10,10,0.9,5\n";
        assert!(matches!(parse_detections(dup, p()), Err(Error::DuplicateDetId { line: 2, det_id: 5, .. })));
        assert!(matches!(parse_detections("1,wb,0,0,10,10,0.9", p()), Err(Error::Parse { line: 1, .. })));
    }

    fn emb_bytes(dim: u32, records: &[(u64, &[f32])]) -> Vec<u8> {
        let mut b = b"TGRE".to_vec();
        b.extend_from_slice(&dim.to_le_bytes());
        for (id, vals) in records {
            b.extend_from_slice(&id.to_le_bytes());
            for v in *vals {
                b.extend_from_slice(&v.to_le_bytes());
            }
        }
        b
    }

    #[test]
    fn embedding_format() {
        let m = decode_embeddings(&emb_bytes(2, &[(7, &[1.0, 0.0])]), p(), None).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&7], Embedding(vec![1.0, 0.0]));

        let mut bad = emb_bytes(2, &[]);
        bad[0] = b'X';
        assert!(matches!(decode_embeddings(&bad, p(), None), Err(Error::BadMagic { .. })));

        let mut cut = emb_bytes(2, &[(7, &[1.0, 0.0]), (8, &[0.5, 0.5])]);
        cut.truncate(cut.len() - 2);
        assert!(matches!(decode_embeddings(&cut, p(), None), Err(Error::TruncatedRecord { offset: 24, .. })));

        assert!(matches!(
            decode_embeddings(&emb_bytes(2, &[]), p(), Some(3)),
            Err(Error::DimMismatch { expected: 3, got: 2, .. })
        ));
    }

    #[test]
    fn tracker_output_layout() {
        let mut ts = TrajectorySet::new(TrajectoryRole::Prediction);
        ts.insert(2, 1, BoundingBox::new(1.5, 2.0, 3.0, 4.25)).unwrap();
        ts.insert(1, 9, BoundingBox::new(0.0, 0.0, 1.0, 1.0)).unwrap();
        let text = format_tracker_output(&ts);
        assert_eq!(
            text,
            "1,9,0.000000,0.000000,1.000000,1.000000,1,-1,-1,-1\n2,1,1.500000,2.000000,3.000000,4.250000,1,-1,-1,-1\n"
        );
        assert_eq!(parse_tracker_output(&text, p()).unwrap(), ts);
        assert_eq!(format_tracker_output(&TrajectorySet::new(TrajectoryRole::Prediction)), "");
    }

    #[test]
    fn negative_zero_is_not_emitted() {
        assert_eq!(fmt6(-0.0000001), "0.000000");
        assert_eq!(fmt6(-1.5), "-1.500000");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"a").unwrap();
        write_atomic(&path, b"b").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"b");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

//! Deterministic synthetic scenarios and scripted tracker outputs.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`, one stream per purpose (appearance, layout,
//! detections, embeddings), so changing one noise level never shifts the
//! draws of another. Uniforms are `(next_u64 >> 11) * 2^-53`; normals use
//! Box-Muller on two uniforms, keeping the cosine branch.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::io::{self, GroundTruth};
use crate::tracker::SequenceInput;
use crate::types::{BoundingBox, Detection, DetectionKind, Embedding, TrajectoryRole, TrajectorySet};

const STREAM_APPEARANCE: u64 = 0;
const STREAM_LAYOUT: u64 = 1;
const STREAM_DETECTIONS: u64 = 2;
const STREAM_EMBEDDINGS: u64 = 3;

pub struct SynthRng(ChaCha8Rng);

impl SynthRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        Self(r)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    fn unit_vector(&mut self, dim: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
        normalize(v)
    }

    /// `count` random unit vectors, made mutually orthogonal by Gram-Schmidt
    /// when `count <= dim`.
    fn orthonormal(&mut self, count: usize, dim: usize) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
        for _ in 0..count {
            let mut v = self.unit_vector(dim);
            if count <= dim {
                for u in &out {
                    let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
                }
                v = normalize(v);
            }
            out.push(v);
        }
        out
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Rounds to the 6-decimal grid of the text formats, so generated boxes
/// survive a write and read unchanged.
fn q6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

pub type Window = (u32, u32);

/// Scenario description. See the README for the text grammar.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub num_identities: usize,
    pub num_frames: u32,
    pub arena: (f64, f64),
    /// Nominal whole-body size; each identity is scaled by a factor drawn
    /// from `1 ± size_spread`.
    pub box_size: (f64, f64),
    pub size_spread: f64,
    /// Pixels per frame along the waypoint loop.
    pub speed: f64,
    /// Random waypoints per identity when none are given.
    pub num_waypoints: usize,
    /// Box-center waypoints per identity id, traversed as a closed loop.
    pub waypoints: BTreeMap<u64, Vec<(f64, f64)>>,
    pub occlusions: BTreeMap<u64, Vec<Window>>,
    pub exits: BTreeMap<u64, Vec<Window>>,
    /// Identities sharing a whole-body appearance. Unlisted ids are alone.
    pub same_cloth_groups: Vec<Vec<u64>>,
    /// Cosine between whole-body appearances within one group; 1 means identical.
    pub cloth_similarity: f64,
    pub box_jitter: f64,
    pub miss_rate: f64,
    /// Per-frame probability of one clutter detection, per kind.
    pub fp_rate: f64,
    /// Norm of the embedding noise relative to the unit appearance vector.
    pub embedding_noise: f64,
    pub hs_box_jitter: Option<f64>,
    pub hs_miss_rate: Option<f64>,
    /// Probability that a detection's appearance is blended with another
    /// identity's, as with a crop that catches a neighbour.
    pub contamination_rate: f64,
    pub contamination_weight: f64,
    pub embedding_dim_wb: usize,
    pub embedding_dim_hs: usize,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            num_identities: 4,
            num_frames: 300,
            arena: (1280.0, 720.0),
            box_size: (60.0, 160.0),
            size_spread: 0.15,
            speed: 2.0,
            num_waypoints: 4,
            waypoints: BTreeMap::new(),
            occlusions: BTreeMap::new(),
            exits: BTreeMap::new(),
            same_cloth_groups: Vec::new(),
            cloth_similarity: 1.0,
            box_jitter: 0.0,
            miss_rate: 0.0,
            fp_rate: 0.0,
            embedding_noise: 0.0,
            hs_box_jitter: None,
            hs_miss_rate: None,
            contamination_rate: 0.0,
            contamination_weight: 0.5,
            embedding_dim_wb: 128,
            embedding_dim_hs: 128,
            seed: 0,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl ScenarioSpec {
    pub fn hs_jitter(&self) -> f64 {
        self.hs_box_jitter.unwrap_or(self.box_jitter)
    }

    pub fn hs_miss(&self) -> f64 {
        self.hs_miss_rate.unwrap_or(self.miss_rate)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_identities as u64;
        if self.num_identities == 0 || self.num_frames == 0 {
            return Err(invalid("num_identities and num_frames must be positive"));
        }
        let (aw, ah) = self.arena;
        let (bw, bh) = self.box_size;
        if !(bw > 0.0 && bh > 0.0 && aw.is_finite() && ah.is_finite()) {
            return Err(invalid("box_size must be positive"));
        }
        if aw < bw * (1.0 + self.size_spread) || ah < bh * (1.0 + self.size_spread) {
            return Err(invalid("arena smaller than a box"));
        }
        if !(0.0..1.0).contains(&self.size_spread) {
            return Err(invalid("size_spread must be in [0, 1)"));
        }
        for (name, v) in [
            ("miss_rate", self.miss_rate),
            ("fp_rate", self.fp_rate),
            ("hs_miss_rate", self.hs_miss()),
            ("contamination_rate", self.contamination_rate),
            ("contamination_weight", self.contamination_weight),
            ("cloth_similarity", self.cloth_similarity),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} = {v} outside [0, 1]")));
            }
        }
        for (name, v) in [
            ("speed", self.speed),
            ("box_jitter", self.box_jitter),
            ("hs_box_jitter", self.hs_jitter()),
            ("embedding_noise", self.embedding_noise),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and non-negative")));
            }
        }
        if self.embedding_dim_wb == 0 || self.embedding_dim_hs == 0 {
            return Err(invalid("embedding dimensions must be positive"));
        }
        if self.waypoints.is_empty() && self.num_waypoints == 0 {
            return Err(invalid("num_waypoints must be positive"));
        }
        let check_id = |id: u64| {
            if id == 0 || id > n {
                Err(invalid(format!("identity {id} outside 1..={n}")))
            } else {
                Ok(())
            }
        };
        for (id, pts) in &self.waypoints {
            check_id(*id)?;
            if pts.is_empty() || pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(invalid(format!("waypoints of identity {id} must be finite and non-empty")));
            }
        }
        for map in [&self.occlusions, &self.exits] {
            for (id, ws) in map {
                check_id(*id)?;
                for &(a, b) in ws {
                    if a == 0 || a > b || b > self.num_frames {
                        return Err(invalid(format!(
                            "window {a}-{b} of identity {id} outside [1, {}]",
                            self.num_frames
                        )));
                    }
                }
            }
        }
        let mut seen = vec![false; self.num_identities + 1];
        for g in &self.same_cloth_groups {
            for &id in g {
                check_id(id)?;
                if std::mem::replace(&mut seen[id as usize], true) {
                    return Err(invalid(format!("identity {id} in two same-cloth groups")));
                }
            }
        }
        Ok(())
    }

    pub fn visible(&self, id: u64, frame: u32) -> bool {
        let hidden = |m: &BTreeMap<u64, Vec<Window>>| {
            m.get(&id).is_some_and(|ws| ws.iter().any(|&(a, b)| (a..=b).contains(&frame)))
        };
        !hidden(&self.occlusions) && !hidden(&self.exits)
    }

    /// Group index per identity (index 0 is identity 1).
    fn cloth_groups(&self) -> (Vec<usize>, usize) {
        let mut group = vec![usize::MAX; self.num_identities];
        for (g, ids) in self.same_cloth_groups.iter().enumerate() {
            for &id in ids {
                group[id as usize - 1] = g;
            }
        }
        let mut next = self.same_cloth_groups.len();
        for g in group.iter_mut().filter(|g| **g == usize::MAX) {
            *g = next;
            next += 1;
        }
        (group, next)
    }

    /// Built-in scenarios.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "long-occlusion" => Ok(long_occlusion()),
            "same-cloth" => Ok(same_cloth()),
            "fig4" => Ok(fig4()),
            other => Err(invalid(format!("unknown preset `{other}` (long-occlusion, same-cloth, fig4)"))),
        }
    }
}

pub const PRESETS: [&str; 3] = ["long-occlusion", "same-cloth", "fig4"];

/// Distinct clothing, modest noise, and absences from 60 to 200 frames.
fn long_occlusion() -> ScenarioSpec {
    let occ = [
        (1, vec![(150, 300), (700, 780)]),
        (2, vec![(260, 460)]),
        (3, vec![(400, 470), (900, 1050)]),
        (4, vec![(520, 700)]),
        (5, vec![(120, 190), (610, 760)]),
        (6, vec![(800, 980)]),
    ];
    ScenarioSpec {
        num_identities: 6,
        num_frames: 1200,
        occlusions: occ.into_iter().collect(),
        box_jitter: 2.0,
        miss_rate: 0.02,
        fp_rate: 0.05,
        embedding_noise: 0.3,
        seed: 7,
        ..Default::default()
    }
}

/// Everyone wears the same clothes; people arrive one by one, some leave for
/// good, and head-shoulder boxes are small and missed more often.
fn same_cloth() -> ScenarioSpec {
    let exits = [
        (2, vec![(1, 120)]),
        (3, vec![(1, 260), (700, 1000)]),
        (4, vec![(1, 420)]),
        (5, vec![(1, 560)]),
        (6, vec![(1, 640)]),
        (1, vec![(480, 1000)]),
    ];
    ScenarioSpec {
        num_identities: 6,
        num_frames: 1000,
        exits: exits.into_iter().collect(),
        occlusions: [(2, vec![(300, 380)]), (4, vec![(760, 820)])].into_iter().collect(),
        same_cloth_groups: vec![(1..=6).collect()],
        cloth_similarity: 0.25,
        box_jitter: 3.0,
        miss_rate: 0.02,
        fp_rate: 0.05,
        embedding_noise: 0.3,
        hs_box_jitter: Some(3.0),
        hs_miss_rate: Some(0.15),
        contamination_rate: 0.05,
        contamination_weight: 0.6,
        seed: 11,
        ..Default::default()
    }
}

/// One identity, always visible, no noise: the ground truth for the
/// three-segment scripted trackers.
fn fig4() -> ScenarioSpec {
    ScenarioSpec { num_identities: 1, num_frames: 3 * FIG4_SEGMENT, seed: 4, ..Default::default() }
}

/// Segment length of the fig4 preset.
pub const FIG4_SEGMENT: u32 = 50;

fn parse_windows(v: &str) -> std::result::Result<Vec<Window>, String> {
    list(v)
        .map(|item| {
            let (a, b) = item.split_once('-').ok_or(format!("window `{item}` is not `a-b`"))?;
            Ok((
                a.trim().parse().map_err(|_| format!("bad frame `{a}`"))?,
                b.trim().parse().map_err(|_| format!("bad frame `{b}`"))?,
            ))
        })
        .collect()
}

fn parse_points(v: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    list(v)
        .map(|item| {
            let (x, y) = item.split_once(':').ok_or(format!("waypoint `{item}` is not `x:y`"))?;
            Ok((
                x.trim().parse().map_err(|_| format!("bad x `{x}`"))?,
                y.trim().parse().map_err(|_| format!("bad y `{y}`"))?,
            ))
        })
        .collect()
}

fn parse_pair(v: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = v.split_once('x').ok_or(format!("`{v}` is not `WxH`"))?;
    Ok((
        a.trim().parse().map_err(|_| format!("bad width `{a}`"))?,
        b.trim().parse().map_err(|_| format!("bad height `{b}`"))?,
    ))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("bad value `{v}` for {key}"))
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut spec = ScenarioSpec::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |m: String| invalid(format!("line {}: {m}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| at("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(at(format!("duplicate key `{key}`")));
            }
            let indexed = |prefix: &str| -> Option<std::result::Result<u64, String>> {
                key.strip_prefix(prefix).map(|id| id.parse().map_err(|_| format!("bad identity in `{key}`")))
            };
            let r: std::result::Result<(), String> = (|| {
                if let Some(id) = indexed("waypoints.") {
                    spec.waypoints.insert(id?, parse_points(value)?);
                    return Ok(());
                }
                if let Some(id) = indexed("occlusion.") {
                    spec.occlusions.insert(id?, parse_windows(value)?);
                    return Ok(());
                }
                if let Some(id) = indexed("exit.") {
                    spec.exits.insert(id?, parse_windows(value)?);
                    return Ok(());
                }
                match key {
                    "num_identities" => spec.num_identities = num(key, value)?,
                    "num_frames" => spec.num_frames = num(key, value)?,
                    "arena" => spec.arena = parse_pair(value)?,
                    "box_size" => spec.box_size = parse_pair(value)?,
                    "size_spread" => spec.size_spread = num(key, value)?,
                    "speed" => spec.speed = num(key, value)?,
                    "num_waypoints" => spec.num_waypoints = num(key, value)?,
                    "same_cloth_groups" => {
                        spec.same_cloth_groups = list(value)
                            .map(|g| g.split_whitespace().map(|id| num(key, id)).collect())
                            .collect::<std::result::Result<_, _>>()?
                    }
                    "cloth_similarity" => spec.cloth_similarity = num(key, value)?,
                    "box_jitter" => spec.box_jitter = num(key, value)?,
                    "miss_rate" => spec.miss_rate = num(key, value)?,
                    "fp_rate" => spec.fp_rate = num(key, value)?,
                    "embedding_noise" => spec.embedding_noise = num(key, value)?,
                    "hs_box_jitter" => spec.hs_box_jitter = Some(num(key, value)?),
                    "hs_miss_rate" => spec.hs_miss_rate = Some(num(key, value)?),
                    "contamination_rate" => spec.contamination_rate = num(key, value)?,
                    "contamination_weight" => spec.contamination_weight = num(key, value)?,
                    "embedding_dim_wb" => spec.embedding_dim_wb = num(key, value)?,
                    "embedding_dim_hs" => spec.embedding_dim_hs = num(key, value)?,
                    "seed" => spec.seed = num(key, value)?,
                    _ => return Err(format!("unknown key `{key}`")),
                }
                Ok(())
            })();
            r.map_err(at)?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "num_identities = {}", self.num_identities)?;
        writeln!(f, "num_frames = {}", self.num_frames)?;
        writeln!(f, "arena = {}x{}", self.arena.0, self.arena.1)?;
        writeln!(f, "box_size = {}x{}", self.box_size.0, self.box_size.1)?;
        writeln!(f, "size_spread = {}", self.size_spread)?;
        writeln!(f, "speed = {}", self.speed)?;
        writeln!(f, "num_waypoints = {}", self.num_waypoints)?;
        let groups: Vec<String> =
            self.same_cloth_groups.iter().map(|g| g.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")).collect();
        writeln!(f, "same_cloth_groups = {}", groups.join(", "))?;
        writeln!(f, "cloth_similarity = {}", self.cloth_similarity)?;
        writeln!(f, "box_jitter = {}", self.box_jitter)?;
        writeln!(f, "miss_rate = {}", self.miss_rate)?;
        writeln!(f, "fp_rate = {}", self.fp_rate)?;
        writeln!(f, "embedding_noise = {}", self.embedding_noise)?;
        if let Some(v) = self.hs_box_jitter {
            writeln!(f, "hs_box_jitter = {v}")?;
        }
        if let Some(v) = self.hs_miss_rate {
            writeln!(f, "hs_miss_rate = {v}")?;
        }
        writeln!(f, "contamination_rate = {}", self.contamination_rate)?;
        writeln!(f, "contamination_weight = {}", self.contamination_weight)?;
        writeln!(f, "embedding_dim_wb = {}", self.embedding_dim_wb)?;
        writeln!(f, "embedding_dim_hs = {}", self.embedding_dim_hs)?;
        writeln!(f, "seed = {}", self.seed)?;
        for (id, pts) in &self.waypoints {
            let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x}:{y}")).collect();
            writeln!(f, "waypoints.{id} = {}", p.join(", "))?;
        }
        for (prefix, map) in [("occlusion", &self.occlusions), ("exit", &self.exits)] {
            for (id, ws) in map {
                let w: Vec<String> = ws.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                writeln!(f, "{prefix}.{id} = {}", w.join(", "))?;
            }
        }
        Ok(())
    }
}

/// A generated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub gt: GroundTruth,
    pub wb_detections: Vec<Detection>,
    pub hs_detections: Vec<Detection>,
    pub wb_embeddings: HashMap<u64, Embedding>,
    pub hs_embeddings: HashMap<u64, Embedding>,
    /// Identity behind each non-clutter detection.
    pub sources: HashMap<u64, u64>,
}

pub const GT_FILE: &str = "gt.txt";
pub const DET_WB_FILE: &str = "det_wb.txt";
pub const DET_HS_FILE: &str = "det_hs.txt";
pub const EMB_WB_FILE: &str = "emb_wb.bin";
pub const EMB_HS_FILE: &str = "emb_hs.bin";
pub const SPEC_FILE: &str = "spec.txt";

impl Scenario {
    pub fn input(&self) -> SequenceInput<'_> {
        SequenceInput {
            wb_detections: &self.wb_detections,
            hs_detections: &self.hs_detections,
            wb_embeddings: &self.wb_embeddings,
            hs_embeddings: &self.hs_embeddings,
            num_frames: Some(self.spec.num_frames),
        }
    }

    /// Writes the standard file set into `dir`, which must exist.
    pub fn write(&self, dir: &Path) -> Result<()> {
        io::write_ground_truth(&self.gt, &dir.join(GT_FILE))?;
        io::write_detections(&self.wb_detections, &dir.join(DET_WB_FILE))?;
        io::write_detections(&self.hs_detections, &dir.join(DET_HS_FILE))?;
        io::write_embeddings(&self.wb_embeddings, self.spec.embedding_dim_wb, &dir.join(EMB_WB_FILE))?;
        io::write_embeddings(&self.hs_embeddings, self.spec.embedding_dim_hs, &dir.join(EMB_HS_FILE))?;
        io::write_atomic(&dir.join(SPEC_FILE), self.spec.to_string().as_bytes())
    }
}

struct Walker {
    size: (f64, f64),
    points: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    phase: f64,
}

impl Walker {
    fn center(&self, frame: u32, speed: f64) -> (f64, f64) {
        let total = *self.cumulative.last().expect("non-empty");
        if total <= 0.0 {
            return self.points[0];
        }
        let s = (self.phase + speed * f64::from(frame - 1)).rem_euclid(total);
        let k = self.cumulative.partition_point(|&c| c <= s).max(1) - 1;
        let (a, b) = (self.points[k], self.points[(k + 1) % self.points.len()]);
        let len = self.cumulative[k + 1] - self.cumulative[k];
        let t = if len > 0.0 { (s - self.cumulative[k]) / len } else { 0.0 };
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }
}

fn walker(spec: &ScenarioSpec, id: u64, rng: &mut SynthRng) -> Walker {
    let scale = 1.0 + spec.size_spread * (2.0 * rng.uniform() - 1.0);
    let size = (spec.box_size.0 * scale, spec.box_size.1 * scale);
    let (aw, ah) = spec.arena;
    let random: Vec<(f64, f64)> = (0..spec.num_waypoints)
        .map(|_| {
            let x = size.0 / 2.0 + rng.uniform() * (aw - size.0);
            let y = size.1 / 2.0 + rng.uniform() * (ah - size.1);
            (x, y)
        })
        .collect();
    let phase_u = rng.uniform();
    let points = spec.waypoints.get(&id).cloned().unwrap_or(random);
    let mut cumulative = vec![0.0];
    for k in 0..points.len() {
        let (a, b) = (points[k], points[(k + 1) % points.len()]);
        cumulative.push(cumulative[k] + (b.0 - a.0).hypot(b.1 - a.1));
    }
    let phase = phase_u * cumulative[points.len()];
    Walker { size, points, cumulative, phase }
}

/// Head-shoulder box: top-center, half the width and 40% of the height.
pub fn head_shoulder_of(wb: &BoundingBox) -> BoundingBox {
    BoundingBox::new(q6(wb.x + 0.25 * wb.w), wb.y, q6(0.5 * wb.w), q6(0.4 * wb.h))
}

fn jittered(b: &BoundingBox, sigma: f64, rng: &mut SynthRng) -> BoundingBox {
    let d: [f64; 4] = std::array::from_fn(|_| sigma * rng.normal());
    BoundingBox::new(q6(b.x + d[0]), q6(b.y + d[1]), q6((b.w + d[2]).max(1.0)), q6((b.h + d[3]).max(1.0)))
}

fn noisy_embedding(base: &[f64], sigma: f64, rng: &mut SynthRng) -> Embedding {
    let per = sigma / (base.len() as f64).sqrt();
    Embedding(base.iter().map(|&v| (v + per * rng.normal()) as f32).collect())
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let n = spec.num_identities;
    let (dw, dh) = (spec.embedding_dim_wb, spec.embedding_dim_hs);

    let mut app = SynthRng::new(spec.seed, STREAM_APPEARANCE);
    let (group_of, num_groups) = spec.cloth_groups();
    // Group and personal directions are orthonormal, so two members of a
    // group have whole-body cosine exactly `cloth_similarity`.
    let basis = app.orthonormal(num_groups + n, dw);
    let (a, b) = (spec.cloth_similarity.sqrt(), (1.0 - spec.cloth_similarity).sqrt());
    let wb_app: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (g, own) = (&basis[group_of[i]], &basis[num_groups + i]);
            normalize(g.iter().zip(own).map(|(g, o)| a * g + b * o).collect())
        })
        .collect();
    let hs_app = app.orthonormal(n, dh);

    let mut layout = SynthRng::new(spec.seed, STREAM_LAYOUT);
    let walkers: Vec<Walker> = (1..=n as u64).map(|id| walker(spec, id, &mut layout)).collect();

    let mut det_rng = SynthRng::new(spec.seed, STREAM_DETECTIONS);
    let mut emb_rng = SynthRng::new(spec.seed, STREAM_EMBEDDINGS);
    let mut out = Scenario {
        spec: spec.clone(),
        gt: GroundTruth::new(),
        wb_detections: Vec::new(),
        hs_detections: Vec::new(),
        wb_embeddings: HashMap::new(),
        hs_embeddings: HashMap::new(),
        sources: HashMap::new(),
    };
    let mut next_det = 1u64;
    let appearance = |apps: &[Vec<f64>], i: usize, rng: &mut SynthRng| -> Vec<f64> {
        let hit = rng.uniform() < spec.contamination_rate;
        let other = if n > 1 { (i + 1 + rng.below(n - 1)) % n } else { i };
        if hit && other != i {
            let w = spec.contamination_weight;
            normalize(apps[i].iter().zip(&apps[other]).map(|(s, o)| (1.0 - w) * s + w * o).collect())
        } else {
            apps[i].clone()
        }
    };

    for frame in 1..=spec.num_frames {
        for (i, wk) in walkers.iter().enumerate() {
            let id = i as u64 + 1;
            if !spec.visible(id, frame) {
                continue;
            }
            let (cx, cy) = wk.center(frame, spec.speed);
            let wb = BoundingBox::new(q6(cx - wk.size.0 / 2.0), q6(cy - wk.size.1 / 2.0), q6(wk.size.0), q6(wk.size.1));
            let hs = head_shoulder_of(&wb);
            out.gt.wb.insert(frame, id, wb)?;
            out.gt.hs.insert(frame, id, hs)?;

            for (kind, gt_box, sigma, miss) in [
                (DetectionKind::Wb, wb, spec.box_jitter, spec.miss_rate),
                (DetectionKind::Hs, hs, spec.hs_jitter(), spec.hs_miss()),
            ] {
                let dropped = det_rng.uniform() < miss;
                let bbox = jittered(&gt_box, sigma, &mut det_rng);
                let confidence = q6(0.5 + 0.5 * det_rng.uniform());
                let (apps, dim_sigma) = match kind {
                    DetectionKind::Wb => (&wb_app, spec.embedding_noise),
                    DetectionKind::Hs => (&hs_app, spec.embedding_noise),
                };
                let base = appearance(apps, i, &mut emb_rng);
                let emb = noisy_embedding(&base, dim_sigma, &mut emb_rng);
                if dropped {
                    continue;
                }
                let det = Detection { frame, kind, bbox, confidence, det_id: next_det };
                out.sources.insert(next_det, id);
                push_detection(&mut out, det, emb);
                next_det += 1;
            }
        }
        for kind in [DetectionKind::Wb, DetectionKind::Hs] {
            let happens = det_rng.uniform() < spec.fp_rate;
            let scale = 0.8 + 0.4 * det_rng.uniform();
            let (w, h) = (spec.box_size.0 * scale, spec.box_size.1 * scale);
            let x = det_rng.uniform() * (spec.arena.0 - w);
            let y = det_rng.uniform() * (spec.arena.1 - h);
            let confidence = q6(0.5 * det_rng.uniform());
            let wb = BoundingBox::new(q6(x), q6(y), q6(w), q6(h));
            let (bbox, dim) = match kind {
                DetectionKind::Wb => (wb, dw),
                DetectionKind::Hs => (head_shoulder_of(&wb), dh),
            };
            let emb = Embedding(emb_rng.unit_vector(dim).into_iter().map(|v| v as f32).collect());
            if happens {
                push_detection(&mut out, Detection { frame, kind, bbox, confidence, det_id: next_det }, emb);
                next_det += 1;
            }
        }
    }
    Ok(out)
}

fn push_detection(out: &mut Scenario, det: Detection, emb: Embedding) {
    match det.kind {
        DetectionKind::Wb => {
            out.wb_embeddings.insert(det.det_id, emb);
            out.wb_detections.push(det);
        }
        DetectionKind::Hs => {
            out.hs_embeddings.insert(det.det_id, emb);
            out.hs_detections.push(det);
        }
    }
}

/// Per ground-truth identity, the prediction id to emit over frame intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdScript {
    segments: BTreeMap<u64, Vec<(u32, u32, u64)>>,
}

impl IdScript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Emits `pr_id` for `gt_id` on frames `start..=end`.
    pub fn assign(&mut self, gt_id: u64, start: u32, end: u32, pr_id: u64) -> Result<&mut Self> {
        if start > end {
            return Err(invalid(format!("empty script interval {start}-{end}")));
        }
        let segs = self.segments.entry(gt_id).or_default();
        if segs.iter().any(|&(a, b, _)| start <= b && a <= end) {
            return Err(invalid(format!("overlapping script intervals for identity {gt_id}")));
        }
        segs.push((start, end, pr_id));
        segs.sort_unstable();
        Ok(self)
    }

    /// Every identity keeps one prediction id over its whole support.
    pub fn identity(gt: &TrajectorySet, relabel: impl Fn(u64) -> u64) -> Self {
        let mut span: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
        for (f, id, _) in gt.iter() {
            let e = span.entry(id).or_insert((f, f));
            e.0 = e.0.min(f);
            e.1 = e.1.max(f);
        }
        let segments = span.into_iter().map(|(id, (a, b))| (id, vec![(a, b, relabel(id))])).collect();
        Self { segments }
    }

    /// `p1` on the first and last `m` frames, `p2` in between.
    pub fn three_segment_return(gt_id: u64, m: u32, p1: u64, p2: u64) -> Self {
        let mut s = Self::new();
        s.assign(gt_id, 1, m, p1)
            .and_then(|s| s.assign(gt_id, m + 1, 2 * m, p2))
            .and_then(|s| s.assign(gt_id, 2 * m + 1, 3 * m, p1))
            .expect("disjoint");
        s
    }

    /// `p1` on the first `m` frames, `p2` for the next `2m`.
    pub fn three_segment_abandon(gt_id: u64, m: u32, p1: u64, p2: u64) -> Self {
        let mut s = Self::new();
        s.assign(gt_id, 1, m, p1).and_then(|s| s.assign(gt_id, m + 1, 3 * m, p2)).expect("disjoint");
        s
    }

    /// `p1` on odd frames and `p2` on even frames of `1..=n`.
    pub fn alternating(gt_id: u64, n: u32, p1: u64, p2: u64) -> Self {
        let mut s = Self::new();
        for f in 1..=n {
            s.assign(gt_id, f, f, if f % 2 == 1 { p1 } else { p2 }).expect("disjoint");
        }
        s
    }
}

/// Copies `gt` boxes exactly, relabeling each identity per the script. Every
/// ground-truth box must be covered and every interval must lie within its
/// identity's support.
pub fn scripted_tracker_output(gt: &TrajectorySet, script: &IdScript) -> Result<TrajectorySet> {
    let mut span: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    for (f, id, _) in gt.iter() {
        let e = span.entry(id).or_insert((f, f));
        e.1 = e.1.max(f);
    }
    for (&id, segs) in &script.segments {
        for &(a, b, _) in segs {
            match span.get(&id) {
                Some(&(lo, hi)) if a >= lo && b <= hi => {}
                Some(&(lo, _)) if a < lo => return Err(Error::ScriptOutOfRange { id, frame: a }),
                _ => return Err(Error::ScriptOutOfRange { id, frame: b }),
            }
        }
    }
    let mut out = TrajectorySet::new(TrajectoryRole::Prediction);
    for (f, id, b) in gt.iter() {
        let pr = script
            .segments
            .get(&id)
            .and_then(|segs| segs.iter().find(|&&(a, e, _)| (a..=e).contains(&f)))
            .map(|&(_, _, p)| p)
            .ok_or(Error::ScriptOutOfRange { id, frame: f })?;
        out.insert(f, pr, *b)?;
    }
    Ok(out)
}

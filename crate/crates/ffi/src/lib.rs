//! C ABI over the `tgrmpt` tracker, assignment solver and metrics.
//!
//! Every function returns a [`TgrStatus`]. On failure, a message for the
//! calling thread is available from [`tgr_last_error_message`]. Panics never
//! cross the boundary; they surface as `TGR_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use tgrmpt::assignment::{solve_min_cost, CostMatrix};
use tgrmpt::descriptor::{fuse_embedding, DistanceMode};
use tgrmpt::error::Error;
use tgrmpt::metrics::{evaluate, LocGrid, MetricFamilies};
use tgrmpt::tracker::{Age, FusionMode, OutputRow, Tracker, TrackerConfig};
use tgrmpt::types::{BoundingBox, Embedding, FusedObservation, TrajectoryRole, TrajectorySet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    FrameOrder = 4,
    EmptyGroundTruth = 5,
    BufferTooSmall = 6,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgrDistanceMode {
    Mean = 0,
    Min = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TgrTrackerConfig {
    pub tau: f64,
    /// Non-zero disables deletion; `age` is then ignored.
    pub age_infinite: u8,
    pub age: u32,
    pub gallery_size: u32,
    pub distance_mode: TgrDistanceMode,
    pub n_init: u32,
    pub cascade: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgrBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// One reported box of a track.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgrOutputRow {
    pub frame: u32,
    pub track_id: u64,
    pub bbox: TgrBox,
}

/// A ground-truth or predicted box for evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgrLabeledBox {
    pub frame: u32,
    pub id: u64,
    pub bbox: TgrBox,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TgrMetrics {
    pub mota: f64,
    pub motp: f64,
    pub idsw: u64,
    pub fp: u64,
    pub fn_: u64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub det_a: f64,
    pub ass_a: f64,
    pub ass_pr: f64,
    pub ass_re: f64,
    pub hota: f64,
    pub ass_a_prime: f64,
    pub tgrhota: f64,
    /// Non-zero when TP' was empty at some threshold with TP non-empty.
    pub tp_prime_degenerate: u8,
}

/// Opaque tracker handle.
pub struct TgrTracker {
    inner: Tracker,
    last: Vec<OutputRow>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TgrStatus {
    match e.root() {
        Error::DimensionMismatch { .. } | Error::DimMismatch { .. } => TgrStatus::DimensionMismatch,
        Error::FrameOrderViolation { .. } => TgrStatus::FrameOrder,
        Error::EmptyGroundTruth => TgrStatus::EmptyGroundTruth,
        _ => TgrStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (TgrStatus, String)>) -> TgrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TgrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TgrStatus::Internal
        }
    }
}

fn core(e: Error) -> (TgrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TgrStatus, String) {
    (TgrStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `ptr` must be null or valid for `len` reads; a null pointer with `len`
/// zero is an empty slice.
unsafe fn view<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], (TgrStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

fn to_box(b: &TgrBox) -> BoundingBox {
    BoundingBox::new(b.x, b.y, b.w, b.h)
}

fn from_box(b: &BoundingBox) -> TgrBox {
    TgrBox { x: b.x, y: b.y, w: b.w, h: b.h }
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tgr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fills `out` with the default configuration.
///
/// # Safety
/// `out` must be null or point to writable memory for one config.
#[no_mangle]
pub unsafe extern "C" fn tgr_tracker_config_default(out: *mut TgrTrackerConfig) -> TgrStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = TrackerConfig::default();
        *out = TgrTrackerConfig {
            tau: d.tau,
            age_infinite: 1,
            age: 0,
            gallery_size: d.gallery_size as u32,
            distance_mode: TgrDistanceMode::Mean,
            n_init: d.n_init,
            cascade: 0,
        };
        Ok(())
    })
}

/// Creates a tracker. Descriptors passed to [`tgr_tracker_step`] are used
/// as given, so callers fuse whole-body and head-shoulder features first
/// (see [`tgr_fuse_embedding`]).
///
/// # Safety
/// `config` must point to a valid config and `out` to writable memory for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn tgr_tracker_new(config: *const TgrTrackerConfig, out: *mut *mut TgrTracker) -> TgrStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = TrackerConfig {
            tau: c.tau,
            age: if c.age_infinite != 0 { Age::Infinite } else { Age::Finite(c.age) },
            gallery_size: c.gallery_size as usize,
            distance_mode: match c.distance_mode {
                TgrDistanceMode::Mean => DistanceMode::Mean,
                TgrDistanceMode::Min => DistanceMode::Min,
            },
            fusion_mode: FusionMode::WbHs,
            n_init: c.n_init,
            cascade: c.cascade != 0,
            ..TrackerConfig::default()
        };
        let inner = Tracker::new(cfg).map_err(core)?;
        *out = Box::into_raw(Box::new(TgrTracker { inner, last: Vec::new() }));
        Ok(())
    })
}

/// Advances the tracker by one frame. `boxes` holds `count` reported boxes
/// and `descriptors` holds `count * dim` values, row-major. Frames must be
/// strictly increasing. The rows reported by this step (including rows
/// backfilled for newly confirmed tracks) are then available from
/// [`tgr_tracker_outputs`].
///
/// # Safety
/// `tracker` must come from [`tgr_tracker_new`]; the arrays must hold the
/// stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn tgr_tracker_step(
    tracker: *mut TgrTracker,
    frame: u32,
    boxes: *const TgrBox,
    descriptors: *const f32,
    count: usize,
    dim: usize,
) -> TgrStatus {
    guard(|| {
        let t = tracker.as_mut().ok_or_else(|| null("tracker"))?;
        let boxes = view(boxes, count, "boxes")?;
        let total = count.checked_mul(dim).ok_or((TgrStatus::InvalidArgument, "count * dim overflows".into()))?;
        let desc = view(descriptors, total, "descriptors")?;
        let obs: Vec<FusedObservation> = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| FusedObservation {
                frame,
                bbox: to_box(b),
                hs_box: None,
                descriptor: Embedding(desc[i * dim..(i + 1) * dim].to_vec()),
            })
            .collect();
        t.last = t.inner.step(frame, &obs).map_err(core)?;
        Ok(())
    })
}

/// Copies the rows of the last step into `buf`. `*count` receives the
/// number of rows; when `capacity` is too small nothing is copied and
/// `TGR_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `tracker` must be valid, `count` writable, and `buf` valid for
/// `capacity` writes (it may be null when `capacity` is zero).
#[no_mangle]
pub unsafe extern "C" fn tgr_tracker_outputs(
    tracker: *const TgrTracker,
    buf: *mut TgrOutputRow,
    capacity: usize,
    count: *mut usize,
) -> TgrStatus {
    guard(|| {
        let t = tracker.as_ref().ok_or_else(|| null("tracker"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        *count = t.last.len();
        if t.last.len() > capacity {
            return Err((TgrStatus::BufferTooSmall, format!("need room for {} rows", t.last.len())));
        }
        if t.last.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        for (i, r) in t.last.iter().enumerate() {
            ptr::write(buf.add(i), TgrOutputRow { frame: r.frame, track_id: r.track_id, bbox: from_box(&r.bbox) });
        }
        Ok(())
    })
}

/// # Safety
/// `tracker` must be null or come from [`tgr_tracker_new`], and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tgr_tracker_free(tracker: *mut TgrTracker) {
    if !tracker.is_null() {
        drop(Box::from_raw(tracker));
    }
}

/// Builds the fused descriptor: each part L2-normalized, head-shoulder
/// block zero when `hs` is null. `out` receives `wb_dim + hs_dim` values.
///
/// # Safety
/// `wb` must hold `wb_dim` values, `hs` null or `hs_dim` values, and `out`
/// room for `wb_dim + hs_dim` values.
#[no_mangle]
pub unsafe extern "C" fn tgr_fuse_embedding(
    wb: *const f32,
    wb_dim: usize,
    hs: *const f32,
    hs_dim: usize,
    out: *mut f32,
) -> TgrStatus {
    guard(|| {
        let wb = Embedding(view(wb, wb_dim, "wb")?.to_vec());
        let hs = if hs.is_null() { None } else { Some(Embedding(view(hs, hs_dim, "hs")?.to_vec())) };
        if out.is_null() {
            return Err(null("out"));
        }
        let fused = fuse_embedding(&wb, hs.as_ref(), hs_dim).map_err(core)?;
        ptr::copy_nonoverlapping(fused.values().as_ptr(), out, fused.dim());
        Ok(())
    })
}

/// Minimum-cost assignment of a row-major `rows x cols` matrix.
/// `assignment[r]` receives the column of row `r`, or -1.
///
/// # Safety
/// `cost` must hold `rows * cols` values, `assignment` room for `rows`
/// values, and `total` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn tgr_solve_min_cost(
    cost: *const f64,
    rows: usize,
    cols: usize,
    assignment: *mut i64,
    total: *mut f64,
) -> TgrStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or((TgrStatus::InvalidArgument, "rows * cols overflows".into()))?;
        let data = view(cost, n, "cost")?.to_vec();
        let m = CostMatrix::new(rows, cols, data).map_err(core)?;
        let res = solve_min_cost(&m).map_err(core)?;
        if rows > 0 {
            if assignment.is_null() {
                return Err(null("assignment"));
            }
            let out = slice::from_raw_parts_mut(assignment, rows);
            out.fill(-1);
            for &(r, c) in &res.pairs {
                out[r] = c as i64;
            }
        }
        if let Some(t) = total.as_mut() {
            *t = res.total_cost;
        }
        Ok(())
    })
}

fn trajectories(boxes: &[TgrLabeledBox], role: TrajectoryRole) -> Result<TrajectorySet, Error> {
    let mut ts = TrajectorySet::new(role);
    for b in boxes {
        ts.insert(b.frame, b.id, to_box(&b.bbox))?;
    }
    Ok(ts)
}

/// Computes all metric families over the localization grid
/// `loc_lo:loc_hi:loc_step` (0.05:0.95:0.05 is the usual choice).
///
/// # Safety
/// `gt` and `pred` must hold `n_gt` and `n_pred` boxes; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tgr_evaluate(
    gt: *const TgrLabeledBox,
    n_gt: usize,
    pred: *const TgrLabeledBox,
    n_pred: usize,
    loc_lo: f64,
    loc_hi: f64,
    loc_step: f64,
    out: *mut TgrMetrics,
) -> TgrStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let gt = trajectories(view(gt, n_gt, "gt")?, TrajectoryRole::GroundTruth).map_err(core)?;
        let pr = trajectories(view(pred, n_pred, "pred")?, TrajectoryRole::Prediction).map_err(core)?;
        let grid = LocGrid::new(loc_lo, loc_hi, loc_step).map_err(core)?;
        let m = evaluate(&gt, &pr, MetricFamilies::default(), &grid).map_err(core)?;
        let (c, i, h) = (m.clear.unwrap_or_default(), m.idf1.unwrap_or_default(), m.hota.unwrap_or_default());
        *out = TgrMetrics {
            mota: c.mota,
            motp: c.motp,
            idsw: c.idsw as u64,
            fp: c.fp as u64,
            fn_: c.fn_ as u64,
            idf1: i.idf1,
            idp: i.idp,
            idr: i.idr,
            det_a: h.det_a,
            ass_a: h.ass_a,
            ass_pr: h.ass_pr,
            ass_re: h.ass_re,
            hota: h.hota,
            ass_a_prime: h.ass_a_prime,
            tgrhota: h.tgrhota,
            tp_prime_degenerate: u8::from(h.tp_prime_degenerate),
        };
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tgr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

//! Optimal one-to-one assignment on rectangular cost matrices.
//!
//! The solver is the shortest-augmenting-path form of the Hungarian method
//! with row/column potentials, run on the matrix padded to square with zero
//! cost. Among equal-cost optima the lexicographically smallest assignment is
//! returned: row 0 gets the lowest admissible column, then row 1, and so on.
//! A row is only left unmatched (when rows outnumber columns) if no optimum
//! matches it.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RaggedMatrix { row: r, got: row.len(), expected: cols });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn negated(&self) -> Self {
        Self { data: self.data.iter().map(|v| -v).collect(), ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// Minimum-cost matching of cardinality `min(rows, cols)`.
pub fn solve_min_cost(cost: &CostMatrix) -> Result<AssignmentResult> {
    for (i, v) in cost.data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteCost { row: i / cost.cols.max(1), col: i % cost.cols.max(1) });
        }
    }
    if cost.rows == 0 || cost.cols == 0 {
        return Ok(AssignmentResult { pairs: Vec::new(), total_cost: 0.0 });
    }

    let n = cost.rows.max(cost.cols);
    let at = |r: usize, c: usize| if r < cost.rows && c < cost.cols { cost.get(r, c) } else { 0.0 };
    let (mut row_to_col, u, v) = hungarian(n, &at);

    let scale = cost.data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-11 * scale;
    let tight = |r: usize, c: usize| at(r, c) - u[r] - v[c] <= eps;
    lexicographic_refine(n, &mut row_to_col, &tight);

    let mut pairs = Vec::with_capacity(cost.rows.min(cost.cols));
    let mut total_cost = 0.0;
    for (r, &c) in row_to_col.iter().enumerate().take(cost.rows) {
        if c < cost.cols {
            pairs.push((r, c));
            total_cost += cost.get(r, c);
        }
    }
    Ok(AssignmentResult { pairs, total_cost })
}

/// Maximum-score matching; `total_cost` holds the summed score.
pub fn solve_max_score(score: &CostMatrix) -> Result<AssignmentResult> {
    let mut res = solve_min_cost(&score.negated())?;
    res.total_cost = res.pairs.iter().map(|&(r, c)| score.get(r, c)).sum();
    Ok(res)
}

/// How a score floor (or cost cap) constrains a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapMode {
    /// Solve unconstrained, then dissolve pairs that violate the floor.
    #[default]
    PostFilter,
    /// Pairs below the floor are inadmissible during the solve.
    ForbiddenEdge,
}

/// Maximum-score matching where each kept pair scores at least `floor`.
///
/// In [`CapMode::ForbiddenEdge`] the returned matching maximizes the summed
/// score over admissible pairs only, so `floor` must be positive.
pub fn solve_max_score_with_floor(score: &CostMatrix, floor: f64, mode: CapMode) -> Result<AssignmentResult> {
    let res = match mode {
        CapMode::PostFilter => solve_max_score(score)?,
        CapMode::ForbiddenEdge => {
            if floor.is_nan() || floor <= 0.0 {
                return Err(Error::Config(format!("forbidden-edge matching needs a positive floor, got {floor}")));
            }
            let masked = CostMatrix::from_fn(score.rows, score.cols, |r, c| {
                let s = score.get(r, c);
                if s >= floor {
                    s
                } else {
                    0.0
                }
            });
            solve_max_score(&masked)?
        }
    };
    let pairs: Vec<_> = res.pairs.into_iter().filter(|&(r, c)| score.get(r, c) >= floor).collect();
    let total_cost = pairs.iter().map(|&(r, c)| score.get(r, c)).sum();
    Ok(AssignmentResult { pairs, total_cost })
}

/// Square Hungarian; returns the row→col assignment and the final potentials
/// with `u[r] + v[c] <= cost(r, c)` everywhere and equality on matched pairs.
fn hungarian(n: usize, cost: &impl Fn(usize, usize) -> f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if col_owner[j] > 0 {
            row_to_col[col_owner[j] - 1] = j - 1;
        }
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Rewrites an optimal assignment into the lexicographically smallest perfect
/// matching of the tight-edge subgraph. Every such matching is optimal by
/// complementary slackness.
fn lexicographic_refine(n: usize, row_to_col: &mut [usize], tight: &impl Fn(usize, usize) -> bool) {
    let extra_tight = (0..n).any(|r| (0..n).any(|c| c != row_to_col[r] && tight(r, c)));
    if !extra_tight {
        return;
    }
    let mut col_owner = vec![0usize; n];
    for (r, &c) in row_to_col.iter().enumerate() {
        col_owner[c] = r;
    }
    let mut visited = vec![false; n];
    for r in 0..n {
        let current = row_to_col[r];
        for c in 0..current {
            if !tight(r, c) || col_owner[c] < r {
                continue;
            }
            // Row `r` takes `c`; its displaced owner must reach `current`
            // through an alternating path over rows not yet fixed.
            let displaced = col_owner[c];
            visited.iter_mut().for_each(|b| *b = false);
            visited[c] = true;
            let mut path = Vec::new();
            if augment(displaced, current, r, tight, &col_owner, &mut visited, &mut path) {
                for &(row, col) in &path {
                    row_to_col[row] = col;
                    col_owner[col] = row;
                }
                row_to_col[r] = c;
                col_owner[c] = r;
                break;
            }
        }
    }
}

/// Depth-first search for an alternating path from `row` to `target` over
/// tight edges and rows after `fixed_upto`. On success `path` holds the
/// `(row, new col)` moves along the chain.
fn augment(
    row: usize,
    target: usize,
    fixed_upto: usize,
    tight: &impl Fn(usize, usize) -> bool,
    col_owner: &[usize],
    visited: &mut [bool],
    path: &mut Vec<(usize, usize)>,
) -> bool {
    let n = col_owner.len();
    for c in 0..n {
        if visited[c] || !tight(row, c) {
            continue;
        }
        visited[c] = true;
        if c == target {
            path.push((row, c));
            return true;
        }
        let owner = col_owner[c];
        if owner <= fixed_upto {
            continue;
        }
        if augment(owner, target, fixed_upto, tight, col_owner, visited, path) {
            path.push((row, c));
            return true;
        }
    }
    false
}

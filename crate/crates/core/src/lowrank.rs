//! Differences between walk powers of two graphs that differ in a few edges.
//!
//! When `P'` differs from `P` only in the rows of a small vertex set `X`,
//!
//! ```text
//! P'^t - P^t = sum_{s < t} P^s U R_{t-1-s},    R_k = (P' - P)_X P'^k,
//! ```
//!
//! where `U` holds the indicator columns of `X`. The columns of `P^s` at `X`
//! follow from walks started at `X` by reversibility, so a whole `n x n`
//! difference costs `O(|X| t m)` to set up and `O(|X| t n)` per row.

use crate::graph::{EditMode, Graph, Link};
use crate::walk::Transition;

pub(crate) struct PowerDiff {
    t: usize,
    /// `cols[x][s][v] = P^s` at row `v`, column `X[x]`.
    cols: Vec<Vec<Vec<f64>>>,
    /// `rows[x][k] = R_k` for the row of `X[x]`.
    rows: Vec<Vec<Vec<f64>>>,
    row_norm: Vec<Vec<f64>>,
}

fn new_neighbors(base: &Graph, x: usize, edits: &[(Link, EditMode)]) -> Vec<usize> {
    let mut nb: Vec<usize> = base.neighbors(x).iter().map(|&y| y as usize).collect();
    for &(link, mode) in edits {
        if !link.touches(x) {
            continue;
        }
        let other = if link.u() == x { link.v() } else { link.u() };
        match mode {
            EditMode::Remove => nb.retain(|&y| y != other),
            EditMode::Add => {
                if !nb.contains(&other) {
                    nb.push(other)
                }
            }
        }
    }
    nb
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl PowerDiff {
    /// Difference between `t`-step walks on `base` with `edits` applied and
    /// on `base` itself.
    pub(crate) fn new(base: &Graph, edits: &[(Link, EditMode)], t: usize) -> PowerDiff {
        let n = base.n();
        let mut xs: Vec<usize> = edits.iter().flat_map(|(l, _)| [l.u(), l.v()]).collect();
        xs.sort_unstable();
        xs.dedup();
        let op = Transition::new(base);

        // delta_x = P'_x - P_x
        let deltas: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| {
                let mut d = vec![0.0; n];
                match base.degree(x) {
                    0 => d[x] -= 1.0,
                    k => base.neighbors(x).iter().for_each(|&y| d[y as usize] -= 1.0 / k as f64),
                }
                let nb = new_neighbors(base, x, edits);
                if nb.is_empty() {
                    d[x] += 1.0;
                } else {
                    nb.iter().for_each(|&y| d[y] += 1.0 / nb.len() as f64);
                }
                d
            })
            .collect();

        let steps = t.saturating_sub(1);
        let mut rows: Vec<Vec<Vec<f64>>> = deltas.iter().map(|d| vec![d.clone()]).collect();
        let mut buf = vec![0.0; n];
        for _ in 0..steps {
            for xi in 0..xs.len() {
                let cur = rows[xi].last().unwrap();
                op.step_into(cur, &mut buf);
                for (yi, &y) in xs.iter().enumerate() {
                    let w = cur[y];
                    if w != 0.0 {
                        for (b, d) in buf.iter_mut().zip(&deltas[yi]) {
                            *b += w * d;
                        }
                    }
                }
                rows[xi].push(buf.clone());
            }
        }
        let row_norm = rows.iter().map(|rs| rs.iter().map(|r| max_abs(r)).collect()).collect();

        let degs = base.degrees();
        let cols = xs
            .iter()
            .map(|&x| {
                let walk = op.row_powers(x, steps);
                walk.into_iter()
                    .map(|row| {
                        (0..n)
                            .map(|v| match (degs[v], degs[x]) {
                                (0, _) | (_, 0) => f64::from(u8::from(v == x)),
                                (dv, dx) => row[v] * dx as f64 / dv as f64,
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        PowerDiff { t, cols, rows, row_norm }
    }

    fn n(&self) -> usize {
        self.cols.first().map_or(0, |c| c[0].len())
    }

    /// Upper bound on `max_j |(P'^t - P^t)_{vj}|`.
    pub(crate) fn row_bound(&self, v: usize) -> f64 {
        let mut b = 0.0;
        for (cx, nx) in self.cols.iter().zip(&self.row_norm) {
            for s in 0..self.t {
                b += cx[s][v].abs() * nx[self.t - 1 - s];
            }
        }
        b
    }

    /// Row `v` of `P'^t - P^t` into `out`.
    pub(crate) fn row_into(&self, v: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (cx, rx) in self.cols.iter().zip(&self.rows) {
            for s in 0..self.t {
                let c = cx[s][v];
                if c == 0.0 {
                    continue;
                }
                for (o, r) in out.iter_mut().zip(&rx[self.t - 1 - s]) {
                    *o += c * r;
                }
            }
        }
    }

    fn sorted_bounds(&self) -> Vec<(f64, usize)> {
        let mut b: Vec<(f64, usize)> = (0..self.n()).map(|v| (self.row_bound(v), v)).collect();
        b.sort_by(|a, c| c.0.total_cmp(&a.0).then(a.1.cmp(&c.1)));
        b
    }

    /// `max_{v,j} |(P'^t - P^t)_{vj}|`.
    pub(crate) fn sup_max(&self) -> f64 {
        if self.t == 0 || self.cols.is_empty() {
            return 0.0;
        }
        let mut buf = vec![0.0; self.n()];
        let mut best = 0.0f64;
        for (bound, v) in self.sorted_bounds() {
            if bound <= best {
                break;
            }
            self.row_into(v, &mut buf);
            best = best.max(max_abs(&buf));
        }
        best
    }

    /// Whether `max_{v,j} |(P'^t - P^t)_{vj}| < eps`, stopping at the first
    /// row that decides it.
    pub(crate) fn sup_below(&self, eps: f64) -> bool {
        if self.t == 0 || self.cols.is_empty() {
            return 0.0 < eps;
        }
        let mut buf = vec![0.0; self.n()];
        for (bound, v) in self.sorted_bounds() {
            if bound < eps {
                return true;
            }
            self.row_into(v, &mut buf);
            if max_abs(&buf) >= eps {
                return false;
            }
        }
        true
    }
}

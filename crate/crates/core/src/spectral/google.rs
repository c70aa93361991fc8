use rayon::prelude::*;

use super::Direction;
use crate::cgraph::{CGraph, NodeId};
use crate::{Error, Result};

const PARALLEL_ROWS: usize = 4096;

/// Implicit Google matrix over a sparse weight matrix.
///
/// `S` is stored row-wise (CSR) so that `G v` is a fixed-order sum per row;
/// results do not depend on the thread schedule.
#[derive(Debug, Clone)]
pub struct GoogleMatrix {
    n: usize,
    alpha: f64,
    direction: Direction,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    dangling: Vec<usize>,
    is_dangling: Vec<bool>,
    node_ids: Option<Vec<NodeId>>,
}

impl GoogleMatrix {
    pub fn new(g: &CGraph, alpha: f64, direction: Direction) -> Result<Self> {
        let mut gm = Self::from_triplets(g.n(), &g.weight_triplets(), alpha, direction)?;
        gm.node_ids = Some(g.node_ids());
        Ok(gm)
    }

    /// Builds from `(row, col, weight)` entries of `W` (link `col -> row`).
    /// Repeated entries are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)], alpha: f64, direction: Direction) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, w) in triplets {
            if r >= n || c >= n {
                return Err(Error::InvalidParameter(format!("entry ({r}, {c}) outside {n} nodes")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!("weight {w} at ({r}, {c})")));
            }
            if w > 0.0 {
                entries.push(match direction {
                    Direction::Forward => (r, c, w),
                    Direction::Reverse => (c, r, w),
                });
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        entries.dedup_by(|next, kept| {
            if (next.0, next.1) == (kept.0, kept.1) {
                kept.2 += next.2;
                true
            } else {
                false
            }
        });

        let mut w_out = vec![0.0; n];
        for &(_, c, w) in &entries {
            w_out[c] += w;
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for &(r, c, w) in &entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(w / w_out[c]);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let is_dangling: Vec<bool> = w_out.iter().map(|&w| w <= 0.0).collect();
        let dangling = (0..n).filter(|&j| is_dangling[j]).collect();
        Ok(GoogleMatrix {
            n,
            alpha,
            direction,
            row_ptr,
            cols,
            vals,
            dangling,
            is_dangling,
            node_ids: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn node_ids(&self) -> Option<&[NodeId]> {
        self.node_ids.as_deref()
    }

    pub fn label(&self, node: usize) -> String {
        match &self.node_ids {
            Some(ids) => ids[node].to_string(),
            None => node.to_string(),
        }
    }

    pub fn is_dangling(&self, node: usize) -> bool {
        self.is_dangling[node]
    }

    /// `out = S v`, dangling columns spread uniformly.
    pub fn apply_transition(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        let dangling_mass: f64 = self.dangling.iter().map(|&j| v[j]).sum::<f64>() / self.n as f64;
        let row = |i: usize| -> f64 {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.vals[k] * v[self.cols[k]];
            }
            acc + dangling_mass
        };
        if self.n >= PARALLEL_ROWS {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row(i);
            }
        }
    }

    /// `out = G v`.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.apply_transition(v, out);
        let teleport = (1.0 - self.alpha) * v.iter().sum::<f64>() / self.n as f64;
        for o in out.iter_mut() {
            *o = self.alpha * *o + teleport;
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(v, &mut out);
        out
    }

    /// `S[i][j]`.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        if self.is_dangling[j] {
            return 1.0 / self.n as f64;
        }
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// `G[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.alpha * self.transition(i, j) + (1.0 - self.alpha) / self.n as f64
    }

    /// Column `j` of `G` as a dense vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.n];
        e[j] = 1.0;
        self.apply(&e)
    }
}

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use super::{pagerank, DenseMatrix, Direction, GoogleMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReduceOptions {
    /// Bound on the L1 residual of each `(1 - G_ss) y = G_sr e_c` solve, and
    /// PageRank tolerance for the subset slice.
    pub tol: f64,
    /// Cap on series terms per solve and on PageRank iterations.
    pub max_iter: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedGoogleMatrix {
    /// Node indices of the subset, in output order.
    pub subset: Vec<usize>,
    pub labels: Vec<String>,
    /// `N_r x N_r`, column `c` is the transition law out of `subset[c]`.
    #[serde(skip)]
    pub gr: DenseMatrix,
    /// Full-graph PageRank restricted to the subset (not renormalized).
    pub pr: Vec<f64>,
    pub direction: Direction,
    pub censored: bool,
    pub date: Option<NaiveDate>,
}

impl ReducedGoogleMatrix {
    pub fn n(&self) -> usize {
        self.subset.len()
    }

    /// `P_r / |P_r|_1`.
    pub fn normalized_pr(&self) -> Vec<f64> {
        let s: f64 = self.pr.iter().sum();
        self.pr.iter().map(|p| p / s).collect()
    }
}

/// Stochastic complement of `G` on `subset`.
///
/// Each column needs `y = (1 - G_ss)^-1 b`. With `G_ss = alpha S_ss + c 1 1^T`
/// (`c = (1 - alpha)/N`) and `M = 1 - alpha S_ss`, Sherman-Morrison gives
///
/// ```text
/// y = M^-1 b + c u (1^T M^-1 b) / (1 - c 1^T u),   u = M^-1 1
/// ```
///
/// and `M^-1` is a Neumann series whose terms shrink at least by `alpha` in
/// the 1-norm, since `S_ss` is column-substochastic. `u` is shared by all
/// columns; columns are solved in parallel.
pub fn reduced_google_matrix(g: &GoogleMatrix, subset: &[usize], opts: ReduceOptions) -> Result<ReducedGoogleMatrix> {
    let n = g.n();
    if subset.is_empty() {
        return Err(Error::InvalidParameter("empty subset".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut in_subset = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::UnknownNode(i.to_string()));
        }
        if in_subset[i] {
            return Err(Error::InvalidParameter(format!("node {} listed twice", g.label(i))));
        }
        in_subset[i] = true;
    }

    let p = pagerank(g, opts.tol, opts.max_iter)?;
    let solver = ComplementSolver::new(g, &in_subset, opts)?;

    let columns: Vec<Vec<f64>> = subset
        .par_iter()
        .map(|&node| solver.reduced_column(node, subset))
        .collect::<Result<_>>()?;

    Ok(ReducedGoogleMatrix {
        subset: subset.to_vec(),
        labels: subset.iter().map(|&i| g.label(i)).collect(),
        gr: DenseMatrix::from_columns(subset.len(), columns),
        pr: subset.iter().map(|&i| p.values[i]).collect(),
        direction: g.direction(),
        censored: false,
        date: None,
    })
}

struct ComplementSolver<'a> {
    g: &'a GoogleMatrix,
    in_subset: &'a [bool],
    opts: ReduceOptions,
    /// `M^-1 1_s`.
    u: Vec<f64>,
    /// `1 - c 1^T u`.
    denom: f64,
}

impl<'a> ComplementSolver<'a> {
    fn new(g: &'a GoogleMatrix, in_subset: &'a [bool], opts: ReduceOptions) -> Result<Self> {
        let ones: Vec<f64> = in_subset.iter().map(|&r| if r { 0.0 } else { 1.0 }).collect();
        let mut solver = ComplementSolver {
            g,
            in_subset,
            opts,
            u: Vec::new(),
            denom: 1.0,
        };
        let u = solver.neumann(&ones)?;
        let c = (1.0 - g.alpha()) / g.n() as f64;
        solver.denom = 1.0 - c * u.iter().sum::<f64>();
        solver.u = u;
        if !(solver.denom > 0.0) {
            return Err(Error::NotConverged {
                what: "stochastic complement",
                iterations: 0,
                residual: solver.denom,
            });
        }
        Ok(solver)
    }

    /// `M^-1 b = sum_k (alpha S_ss)^k b` for `b` supported on the complement.
    fn neumann(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.g.n();
        let alpha = self.g.alpha();
        let stop = self.opts.tol * 1e-4 * b.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
        let mut sum = b.to_vec();
        let mut term = b.to_vec();
        let mut next = vec![0.0; n];
        for _ in 0..self.opts.max_iter {
            let norm: f64 = term.iter().map(|x| x.abs()).sum();
            if norm <= stop {
                return Ok(sum);
            }
            self.g.apply_transition(&term, &mut next);
            for i in 0..n {
                term[i] = if self.in_subset[i] { 0.0 } else { alpha * next[i] };
                sum[i] += term[i];
            }
        }
        Err(Error::NotConverged {
            what: "complement series",
            iterations: self.opts.max_iter,
            residual: term.iter().map(|x| x.abs()).sum(),
        })
    }

    /// `(1 - G_ss)^-1 b`.
    fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let c = (1.0 - self.g.alpha()) / self.g.n() as f64;
        let mut y = self.neumann(b)?;
        let scale = c * y.iter().sum::<f64>() / self.denom;
        for (yi, ui) in y.iter_mut().zip(&self.u) {
            *yi += scale * ui;
        }
        Ok(y)
    }

    /// `b - (1 - G_ss) y`, restricted to the complement.
    fn residual(&self, b: &[f64], y: &[f64]) -> Vec<f64> {
        let gy = self.g.apply(y);
        (0..y.len())
            .map(|i| if self.in_subset[i] { 0.0 } else { b[i] - y[i] + gy[i] })
            .collect()
    }

    fn reduced_column(&self, node: usize, subset: &[usize]) -> Result<Vec<f64>> {
        let g_col = self.g.column(node);
        let b: Vec<f64> = g_col
            .iter()
            .enumerate()
            .map(|(i, &v)| if self.in_subset[i] { 0.0 } else { v })
            .collect();
        let mut y = self.solve(&b)?;
        // Iterative refinement; one step is normally enough.
        let mut res = self.residual(&b, &y);
        let mut res_norm: f64 = res.iter().map(|x| x.abs()).sum();
        let mut steps = 0;
        while res_norm > self.opts.tol * 1e-2 && steps < 3 {
            let dy = self.solve(&res)?;
            for (a, d) in y.iter_mut().zip(&dy) {
                *a += d;
            }
            res = self.residual(&b, &y);
            res_norm = res.iter().map(|x| x.abs()).sum();
            steps += 1;
        }
        if res_norm > self.opts.tol {
            return Err(Error::NotConverged {
                what: "stochastic complement",
                iterations: steps,
                residual: res_norm,
            });
        }
        let gy = self.g.apply(&y);
        Ok(subset.iter().map(|&i| g_col[i] + gy[i]).collect())
    }
}

/// Zeroes the diagonal and rescales each column to sum to one.
pub fn censor_diagonal(r: &ReducedGoogleMatrix) -> Result<ReducedGoogleMatrix> {
    let mut out = r.clone();
    for j in 0..r.n() {
        let col = out.gr.column_mut(j);
        col[j] = 0.0;
        let off: f64 = col.iter().sum();
        if !(off > 0.0) {
            return Err(Error::DiagonalOnlyColumn {
                node: r.labels[j].clone(),
            });
        }
        for v in col.iter_mut() {
            *v /= off;
        }
    }
    out.censored = true;
    Ok(out)
}

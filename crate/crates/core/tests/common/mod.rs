#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use peergraph::spectral::GoogleMatrix;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// `G` written out densely from the raw weight triplets, without going
/// through the sparse operator.
pub fn dense_google(n: usize, triplets: &[(usize, usize, f64)], alpha: f64, reverse: bool) -> DMatrix<f64> {
    let mut w = DMatrix::<f64>::zeros(n, n);
    for &(r, c, x) in triplets {
        if reverse {
            w[(c, r)] += x;
        } else {
            w[(r, c)] += x;
        }
    }
    let mut g = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let out: f64 = w.column(j).sum();
        for i in 0..n {
            let s = if out > 0.0 { w[(i, j)] / out } else { 1.0 / n as f64 };
            g[(i, j)] = alpha * s + (1.0 - alpha) / n as f64;
        }
    }
    g
}

/// Dense copy of an operator through its entry accessor.
pub fn dense_of(gm: &GoogleMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(gm.n(), gm.n(), |i, j| gm.entry(i, j))
}

/// Stationary vector by a direct solve of `(I - G) p = 0`, `sum p = 1`.
pub fn dense_pagerank(g: &DMatrix<f64>) -> DVector<f64> {
    let n = g.nrows();
    let mut a = DMatrix::<f64>::identity(n, n) - g;
    let mut b = DVector::<f64>::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("singular system")
}

/// `G_rr + G_rs (I - G_ss)^-1 G_sr` by explicit inversion.
pub fn dense_schur(g: &DMatrix<f64>, subset: &[usize]) -> DMatrix<f64> {
    let n = g.nrows();
    let rest: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])]);
    let grr = pick(subset, subset);
    if rest.is_empty() {
        return grr;
    }
    let grs = pick(subset, &rest);
    let gsr = pick(&rest, subset);
    let gss = pick(&rest, &rest);
    let inv = (DMatrix::<f64>::identity(rest.len(), rest.len()) - gss)
        .try_inverse()
        .expect("I - G_ss singular");
    grr + grs * inv * gsr
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Calls `f` on every set partition of `0..n` as a restricted growth string.
pub fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for c in 0..=max + 1 {
            labels.push(c);
            rec(labels, n, max.max(c), f);
            labels.pop();
        }
    }
    if n == 0 {
        return;
    }
    let mut labels = vec![0];
    rec(&mut labels, n, 0, f);
}

pub fn best_modularity(a: &peergraph::clustering::BipartiteGraph) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_partition(a.n(), &mut |p| best = best.max(peergraph::clustering::modularity(a, p)));
    best
}

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BipartiteGraph;
use crate::cgraph::NodeId;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LouvainOptions {
    /// `None` visits nodes in ascending order; `Some(seed)` shuffles the
    /// order of every level with a seeded generator.
    pub seed: Option<u64>,
    /// Maximum number of move-and-aggregate levels per run.
    pub max_passes: usize,
    /// Extra runs with shuffled visit orders; the best partition is kept.
    pub restarts: usize,
}

impl Default for LouvainOptions {
    fn default() -> Self {
        LouvainOptions {
            seed: None,
            max_passes: 100,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Community of every node; ids are contiguous from 0 in order of first
    /// appearance.
    pub assignment: Vec<usize>,
    pub modularity: f64,
    /// Modularity of the singleton start, then after every level of the
    /// run that produced `assignment`.
    pub history: Vec<f64>,
}

impl Partition {
    pub fn n_communities(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self, community: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == community)
            .collect()
    }

    /// `node,type,community`.
    pub fn write_csv(&self, ids: &[NodeId], out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "type", "community"])?;
        for (id, c) in ids.iter().zip(&self.assignment) {
            w.write_record([id.to_string(), id.kind().to_string(), c.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<partition stream>", e))
    }
}

/// Barber modularity of an assignment of `a`'s nodes to communities.
pub fn modularity(a: &BipartiteGraph, assignment: &[usize]) -> f64 {
    assert_eq!(assignment.len(), a.n());
    let m = a.total_weight();
    if m <= 0.0 {
        return 0.0;
    }
    let mut inside = 0.0;
    let mut kd: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for u in 0..a.n() {
        let deg = a.degree(u);
        let e = kd.entry(assignment[u]).or_default();
        if a.is_red(u) {
            e.0 += deg;
            inside += a
                .neighbors(u)
                .iter()
                .filter(|(v, _)| assignment[*v] == assignment[u])
                .map(|e| e.1)
                .sum::<f64>();
        } else {
            e.1 += deg;
        }
    }
    let null: f64 = kd.values().map(|(k, d)| k * d).sum();
    (inside - null / m) / m
}

/// One level of the hierarchy: supernodes with red and blue degree.
struct Level {
    k: Vec<f64>,
    d: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Level {
    fn n(&self) -> usize {
        self.k.len()
    }
}

/// Greedy Louvain on Barber modularity: local moves until no node improves,
/// then contract communities into supernodes, until a level moves nothing.
/// The contracted partition is then refined by single-node moves, failing
/// that by dissolving one community into its neighbours, failing that by a
/// Kernighan-Lin sequence of moves; contraction resumes if anything changed. A node only leaves its community
/// for a strictly larger gain.
///
/// The first run follows `opts.seed`; each restart shuffles with its own
/// stream of the same seed. Ties keep the earlier run.
pub fn louvain_bipartite(a: &BipartiteGraph, opts: LouvainOptions) -> Partition {
    let n = a.n();
    let base = Level {
        k: (0..n).map(|u| if a.is_red(u) { a.degree(u) } else { 0.0 }).collect(),
        d: (0..n).map(|u| if a.is_red(u) { 0.0 } else { a.degree(u) }).collect(),
        adj: (0..n).map(|u| a.neighbors(u).to_vec()).collect(),
    };
    let eps = 1e-13;
    let mut best = single_run(a, &base, opts.max_passes, opts.seed.map(ChaCha8Rng::seed_from_u64));
    if a.total_weight() > 0.0 {
        for r in 1..=opts.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
            rng.set_stream(r as u64);
            let p = single_run(a, &base, opts.max_passes, Some(rng));
            if p.modularity > best.modularity + eps {
                best = p;
            }
        }
    }
    best
}

fn single_run(a: &BipartiteGraph, base: &Level, max_passes: usize, mut rng: Option<ChaCha8Rng>) -> Partition {
    let n = a.n();
    let m = a.total_weight();
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut history = vec![modularity(a, &assignment)];
    if m > 0.0 {
        let mut passes = 0;
        loop {
            let count;
            (assignment, count) = renumber(&assignment);
            let mut level = aggregate(base, &assignment, count);
            while passes < max_passes {
                passes += 1;
                let order = visit_order(level.n(), rng.as_mut());
                let Some(comm) = local_moves(&level, &order, m, (0..level.n()).collect(), rng.as_mut()) else {
                    break;
                };
                let (comm, count) = renumber(&comm);
                for c in assignment.iter_mut() {
                    *c = comm[*c];
                }
                level = aggregate(&level, &comm, count);
                history.push(modularity(a, &assignment));
            }
            if passes >= max_passes {
                break;
            }
            passes += 1;
            let order = visit_order(n, rng.as_mut());
            let (init, _) = renumber(&assignment);
            let refined = local_moves(base, &order, m, init.clone(), rng.as_mut())
                .or_else(|| dissolve(base, m, init.clone()))
                .or_else(|| move_sequence(base, m, init));
            match refined {
                Some(refined) => {
                    assignment = refined;
                    history.push(modularity(a, &assignment));
                }
                None => break,
            }
        }
    }
    let (assignment, _) = renumber(&assignment);
    Partition {
        modularity: *history.last().unwrap(),
        assignment,
        history,
    }
}

fn visit_order(n: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(rng) = rng {
        order.shuffle(rng);
    }
    order
}

/// Moves supernodes starting from `comm` (labels below `level.n()`).
/// With `rng`, equal gains go to a random candidate instead of the first
/// neighbour. Returns the new communities, or `None` if nothing moved.
fn local_moves(
    level: &Level,
    order: &[usize],
    m: f64,
    mut comm: Vec<usize>,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Option<Vec<usize>> {
    let n = level.n();
    let eps = 1e-13 * m;
    let mut kc = vec![0.0; n];
    let mut dc = vec![0.0; n];
    let mut size = vec![0usize; n];
    for u in 0..n {
        kc[comm[u]] += level.k[u];
        dc[comm[u]] += level.d[u];
        size[comm[u]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).rev().filter(|&c| size[c] == 0).collect();
    let mut w_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    loop {
        let mut moved = false;
        for &u in order {
            let c0 = comm[u];
            kc[c0] -= level.k[u];
            dc[c0] -= level.d[u];
            size[c0] -= 1;
            for &(v, w) in &level.adj[u] {
                let c = comm[v];
                if w_to[c] == 0.0 {
                    touched.push(c);
                }
                w_to[c] += w;
            }
            if let Some(rng) = rng.as_mut() {
                touched.shuffle(rng);
            }
            let gain = |c: usize, w: f64| w - (level.k[u] * dc[c] + level.d[u] * kc[c]) / m;
            let mut best = c0;
            let mut best_gain = gain(c0, w_to[c0]);
            for &c in &touched {
                let g = gain(c, w_to[c]);
                if g > best_gain + eps {
                    best = c;
                    best_gain = g;
                }
            }
            if size[c0] > 0 && 0.0 > best_gain + eps {
                best = empty.pop().expect("a community is empty whenever a node is not alone");
            }
            for &c in &touched {
                w_to[c] = 0.0;
            }
            touched.clear();
            if size[c0] == 0 && best != c0 {
                empty.push(c0);
            }
            kc[best] += level.k[u];
            dc[best] += level.d[u];
            size[best] += 1;
            comm[u] = best;
            if best != c0 {
                moved = true;
            }
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    moved_any.then_some(comm)
}

/// `m Q` of a partition of `level`'s supernodes, without internal weights.
fn level_quality(level: &Level, comm: &[usize], m: f64) -> f64 {
    let n = level.n();
    let mut kc = vec![0.0; n];
    let mut dc = vec![0.0; n];
    let mut inside = 0.0;
    for u in 0..n {
        kc[comm[u]] += level.k[u];
        dc[comm[u]] += level.d[u];
        for &(v, w) in &level.adj[u] {
            if comm[v] == comm[u] {
                inside += w;
            }
        }
    }
    // Each edge was seen from both ends.
    inside / 2.0 - (0..n).map(|c| kc[c] * dc[c]).sum::<f64>() / m
}

/// Tries to empty each community in turn, sending its members one by one to
/// the neighbouring community of largest gain (or back home). The first
/// strict improvement is returned.
fn dissolve(level: &Level, m: f64, comm: Vec<usize>) -> Option<Vec<usize>> {
    let n = level.n();
    let eps = 1e-13 * m;
    let before = level_quality(level, &comm, m);
    let mut labels: Vec<usize> = comm.clone();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() < 2 {
        return None;
    }
    for &home in &labels {
        let members: Vec<usize> = (0..n).filter(|&u| comm[u] == home).collect();
        let mut trial = comm.clone();
        let mut pending = vec![false; n];
        for &u in &members {
            pending[u] = true;
        }
        let mut kc = vec![0.0; n];
        let mut dc = vec![0.0; n];
        for u in (0..n).filter(|&u| !pending[u]) {
            kc[trial[u]] += level.k[u];
            dc[trial[u]] += level.d[u];
        }
        for &u in &members {
            let mut w_to: BTreeMap<usize, f64> = BTreeMap::new();
            w_to.insert(home, 0.0);
            for &(v, w) in &level.adj[u] {
                if !pending[v] {
                    *w_to.entry(trial[v]).or_insert(0.0) += w;
                }
            }
            let gain = |c: usize, w: f64| w - (level.k[u] * dc[c] + level.d[u] * kc[c]) / m;
            let mut best = home;
            let mut best_gain = gain(home, w_to[&home]);
            for (&c, &w) in &w_to {
                if gain(c, w) > best_gain + eps {
                    best = c;
                    best_gain = gain(c, w);
                }
            }
            trial[u] = best;
            pending[u] = false;
            kc[best] += level.k[u];
            dc[best] += level.d[u];
        }
        if level_quality(level, &trial, m) > before + eps {
            return Some(trial);
        }
    }
    None
}

/// Moves without improvement before a move sequence gives up.
const SEQUENCE_WINDOW: usize = 64;

/// Kernighan-Lin pass: repeatedly applies the best single move of a node
/// not moved yet, even when it loses, and keeps the best prefix if it beats
/// the starting partition.
fn move_sequence(level: &Level, m: f64, start: Vec<usize>) -> Option<Vec<usize>> {
    let n = level.n();
    let eps = 1e-13 * m;
    let mut comm = start.clone();
    let mut kc = vec![0.0; n];
    let mut dc = vec![0.0; n];
    let mut size = vec![0usize; n];
    for u in 0..n {
        kc[comm[u]] += level.k[u];
        dc[comm[u]] += level.d[u];
        size[comm[u]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).rev().filter(|&c| size[c] == 0).collect();
    let mut moved = vec![false; n];
    let mut log: Vec<(usize, usize)> = Vec::new();
    let (mut total, mut best, mut best_len) = (0.0, 0.0, 0);
    let mut w_to: BTreeMap<usize, f64> = BTreeMap::new();
    while log.len() < best_len + SEQUENCE_WINDOW {
        let mut choice: Option<(f64, usize, usize)> = None;
        for u in (0..n).filter(|&u| !moved[u]) {
            let c0 = comm[u];
            w_to.clear();
            for &(v, w) in &level.adj[u] {
                *w_to.entry(comm[v]).or_insert(0.0) += w;
            }
            // Gains with `u` taken out of `c0`.
            let (k0, d0) = (kc[c0] - level.k[u], dc[c0] - level.d[u]);
            let stay = w_to.get(&c0).copied().unwrap_or(0.0) - (level.k[u] * d0 + level.d[u] * k0) / m;
            let mut consider = |delta: f64, c: usize| {
                if choice.is_none_or(|(b, _, _)| delta > b + eps) {
                    choice = Some((delta, u, c));
                }
            };
            for (&c, &w) in &w_to {
                if c != c0 {
                    consider(w - (level.k[u] * dc[c] + level.d[u] * kc[c]) / m - stay, c);
                }
            }
            if size[c0] > 1 {
                if let Some(&c) = empty.last() {
                    consider(-stay, c);
                }
            }
        }
        let Some((delta, u, c)) = choice else {
            break;
        };
        let c0 = comm[u];
        kc[c0] -= level.k[u];
        dc[c0] -= level.d[u];
        size[c0] -= 1;
        if empty.last() == Some(&c) {
            empty.pop();
        }
        if size[c0] == 0 {
            empty.push(c0);
        }
        kc[c] += level.k[u];
        dc[c] += level.d[u];
        size[c] += 1;
        comm[u] = c;
        moved[u] = true;
        log.push((u, c));
        total += delta;
        if total > best + eps {
            best = total;
            best_len = log.len();
        }
    }
    if best_len == 0 {
        return None;
    }
    let mut out = start;
    for &(u, c) in &log[..best_len] {
        out[u] = c;
    }
    Some(out)
}

/// Relabels to `0..count` in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let out = labels
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect();
    (out, map.len())
}

fn aggregate(level: &Level, comm: &[usize], count: usize) -> Level {
    let mut k = vec![0.0; count];
    let mut d = vec![0.0; count];
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
    for u in 0..level.n() {
        let cu = comm[u];
        k[cu] += level.k[u];
        d[cu] += level.d[u];
        for &(v, w) in &level.adj[u] {
            let cv = comm[v];
            if cu != cv {
                *adj[cu].entry(cv).or_insert(0.0) += w;
            }
        }
    }
    Level {
        k,
        d,
        adj: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biclique_pair() -> BipartiteGraph {
        // Red 0,1 with blue 2,3; red 4,5 with blue 6,7.
        let red = vec![true, true, false, false, true, true, false, false];
        let mut edges = Vec::new();
        for (r, b) in [(0, 2), (0, 3), (1, 2), (1, 3), (4, 6), (4, 7), (5, 6), (5, 7)] {
            edges.push((r, b, 1.0));
        }
        BipartiteGraph::new(red, &edges).unwrap()
    }

    #[test]
    fn two_bicliques() {
        let p = louvain_bipartite(&biclique_pair(), LouvainOptions::default());
        assert_eq!(p.assignment, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert!((p.modularity - 0.5).abs() < 1e-12);
        assert!(p.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = biclique_pair();
        let opts = LouvainOptions {
            seed: Some(7),
            ..Default::default()
        };
        assert_eq!(louvain_bipartite(&a, opts), louvain_bipartite(&a, opts));
        assert_eq!(louvain_bipartite(&a, opts).n_communities(), 2);
    }

    #[test]
    fn single_edge_gain_is_zero() {
        let a = BipartiteGraph::new(vec![true, false], &[(0, 1, 3.0)]).unwrap();
        assert_eq!(modularity(&a, &[0, 0]), 0.0);
        assert_eq!(modularity(&a, &[0, 1]), 0.0);
        let p = louvain_bipartite(&a, LouvainOptions::default());
        assert_eq!(p.modularity, 0.0);
    }

    #[test]
    fn modularity_by_hand() {
        // Path r0 - b1 - r2 with weights 1 and 3: m = 4, k = (1, 3), d = 4.
        let a = BipartiteGraph::new(vec![true, false, true], &[(0, 1, 1.0), (2, 1, 3.0)]).unwrap();
        assert!((modularity(&a, &[0, 0, 0]) - 0.0).abs() < 1e-15);
        // {r2, b1}, {r0}: (3 - 3 * 4 / 4) / 4 = 0
        assert!((modularity(&a, &[0, 1, 1]) - 0.0).abs() < 1e-15);
        // singletons: (0 - 0) / 4
        assert_eq!(modularity(&a, &[0, 1, 2]), 0.0);
    }

    #[test]
    fn empty_graph() {
        let a = BipartiteGraph::new(vec![true, false], &[]).unwrap();
        let p = louvain_bipartite(&a, LouvainOptions::default());
        assert_eq!(p.assignment, vec![0, 1]);
        assert_eq!(p.modularity, 0.0);
    }

    fn build(red: &[bool], edges: &[(usize, usize, f64)]) -> BipartiteGraph {
        BipartiteGraph::new(red.to_vec(), edges).unwrap()
    }

    #[test]
    fn path_splits_in_halves() {
        // 0-1-2-3-4-5, alternating sides, shuffled labels.
        let red = [true, true, true, false, false, false];
        let a = build(&red, &[(0, 3, 1.0), (0, 4, 1.0), (1, 3, 1.0), (1, 5, 1.0), (2, 4, 1.0)]);
        let p = louvain_bipartite(&a, LouvainOptions::default());
        assert!((p.modularity - 0.32).abs() < 1e-12, "{p:?}");
        assert_eq!(p.n_communities(), 2);
    }

    #[test]
    fn pair_dissolves_into_neighbours() {
        let red = [true, false, true, true, true, false, false, false];
        let e = [
            (0, 6, 7.0),
            (0, 7, 5.0),
            (2, 1, 3.0),
            (2, 6, 9.0),
            (4, 1, 8.0),
            (4, 7, 4.0),
        ];
        let p = louvain_bipartite(
            &build(&red, &e),
            LouvainOptions {
                restarts: 0,
                ..Default::default()
            },
        );
        assert!((p.modularity - 32.0 / 108.0).abs() < 1e-12, "{p:?}");
        assert!(p.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn restarts_are_deterministic() {
        let red = [true, true, true, false, false, false];
        let a = build(
            &red,
            &[
                (0, 3, 2.0),
                (0, 4, 1.0),
                (1, 3, 1.0),
                (1, 5, 3.0),
                (2, 4, 1.0),
                (2, 5, 1.0),
            ],
        );
        let o = LouvainOptions {
            seed: Some(9),
            ..Default::default()
        };
        assert_eq!(louvain_bipartite(&a, o), louvain_bipartite(&a, o));
    }
}

use std::io::Write;

use serde::Serialize;

use super::{GoogleMatrix, DEFAULT_ALPHA};
use crate::cgraph::NodeId;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageRankOptions {
    pub alpha: f64,
    /// Stop once the L1 change between iterates drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            alpha: DEFAULT_ALPHA,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRankVector {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub residual: f64,
}

/// Power iteration `P <- G P` from the uniform vector.
pub fn pagerank(g: &GoogleMatrix, tol: f64, max_iter: usize) -> Result<PageRankVector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = g.n();
    let mut p = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        g.apply_into(&p, &mut next);
        let total: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= total;
        }
        residual = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if residual < tol {
            return Ok(PageRankVector {
                values: p,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        what: "PageRank",
        iterations: max_iter,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    /// Node index in the graph.
    pub node: usize,
    pub id: NodeId,
    pub value: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RankTable {
    pub rows: Vec<RankRow>,
}

/// Orders the nodes kept by `filter` by descending value, ties by
/// ascending id, and numbers them from 1.
pub fn rank_table(p: &PageRankVector, ids: &[NodeId], filter: impl Fn(NodeId) -> bool) -> RankTable {
    assert_eq!(p.values.len(), ids.len());
    let mut nodes: Vec<usize> = (0..ids.len()).filter(|&i| filter(ids[i])).collect();
    nodes.sort_by(|&a, &b| p.values[b].total_cmp(&p.values[a]).then_with(|| ids[a].cmp(&ids[b])));
    RankTable {
        rows: nodes
            .into_iter()
            .enumerate()
            .map(|(k, node)| RankRow {
                node,
                id: ids[node],
                value: p.values[node],
                rank: k + 1,
            })
            .collect(),
    }
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn top(&self, k: usize) -> RankTable {
        RankTable {
            rows: self.rows.iter().take(k).cloned().collect(),
        }
    }

    pub fn rank_of(&self, id: NodeId) -> Option<usize> {
        self.rows.iter().find(|r| r.id == id).map(|r| r.rank)
    }

    pub fn ids(&self) -> Vec<NodeId> {
        self.rows.iter().map(|r| r.id).collect()
    }

    /// `node,type,value,rank`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "type", "value", "rank"])?;
        for r in &self.rows {
            w.write_record([
                r.id.to_string(),
                r.id.kind().to_string(),
                r.value.to_string(),
                r.rank.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<rank stream>", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Direction;

    fn vector(values: Vec<f64>) -> PageRankVector {
        PageRankVector {
            values,
            iterations: 0,
            residual: 0.0,
        }
    }

    #[test]
    fn ranks_descend() {
        let ids = [NodeId::As(1), NodeId::As(2), NodeId::As(3)];
        let t = rank_table(&vector(vec![0.2, 0.5, 0.3]), &ids, |_| true);
        let got: Vec<_> = t.rows.iter().map(|r| (r.id, r.rank)).collect();
        assert_eq!(got, vec![(NodeId::As(2), 1), (NodeId::As(3), 2), (NodeId::As(1), 3)]);
    }

    #[test]
    fn ties_break_by_id() {
        let ids = [NodeId::As(100), NodeId::As(50)];
        let t = rank_table(&vector(vec![0.4, 0.4]), &ids, |_| true);
        assert_eq!(t.rows[0].id, NodeId::As(50));
        assert_eq!(t.rank_of(NodeId::As(100)), Some(2));
    }

    #[test]
    fn filter_reranks_contiguously() {
        let ids = [NodeId::As(1), NodeId::As(2), NodeId::Ixp(1)];
        let t = rank_table(&vector(vec![0.2, 0.3, 0.5]), &ids, NodeId::is_as);
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows[0].id, NodeId::As(2));
        assert_eq!(t.rows[0].rank, 1);
        assert_eq!(t.rows[1].rank, 2);
    }

    #[test]
    fn symmetric_complete_graph_is_uniform() {
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    t.push((i, j, 2.5));
                }
            }
        }
        let g = GoogleMatrix::from_triplets(n, &t, 0.85, Direction::Forward).unwrap();
        let p = pagerank(&g, 1e-10, 100).unwrap();
        assert!(p.values.iter().all(|&x| (x - 1.0 / n as f64).abs() < 1e-12));
    }

    #[test]
    fn two_node_fixed_point() {
        // G = [[0.075, 0.5], [0.925, 0.5]]; P = (0.5, 0.925) / 1.425.
        let g = GoogleMatrix::from_triplets(2, &[(1, 0, 1.0)], 0.85, Direction::Forward).unwrap();
        let p = pagerank(&g, 1e-14, 1000).unwrap();
        assert!((p.values[0] - 0.5 / 1.425).abs() < 1e-10);
        assert!((p.values[1] - 0.925 / 1.425).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = GoogleMatrix::from_triplets(2, &[(1, 0, 1.0)], 0.85, Direction::Forward).unwrap();
        assert!(matches!(pagerank(&g, 1e-15, 1), Err(Error::NotConverged { .. })));
        assert!(pagerank(&g, 0.0, 10).is_err());
    }

    #[test]
    fn csv_format() {
        let ids = [NodeId::As(7), NodeId::Ixp(3)];
        let t = rank_table(&vector(vec![0.25, 0.75]), &ids, |_| true);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "node,type,value,rank\nIX3,ixp,0.75,1\nAS7,as,0.25,2\n"
        );
    }
}

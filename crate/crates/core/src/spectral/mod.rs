//! Google matrix, PageRank and reduced Google matrices.
//!
//! `G = alpha S + (1 - alpha)/N` where `S[i][j] = W[i][j] / w_out(j)`, and
//! columns with no out-weight are uniform `1/N`. The reverse direction
//! builds the same operator on `W^T`, i.e. with every link inverted.
//!
//! For a node subset `r` with complement `s`, the reduced Google matrix is
//! the stochastic complement
//!
//! ```text
//! G_R = G_rr + G_rs (1 - G_ss)^-1 G_sr
//! ```
//!
//! which is column-stochastic and keeps the subset's PageRank as its fixed
//! point.

mod change;
mod dense;
mod google;
mod pagerank;
mod reduced;

use serde::{Deserialize, Serialize};

pub use change::{relative_change, relative_change_dense, ChangeMatrix};
pub use dense::{read_labeled_matrix, write_labeled_matrix, DenseMatrix};
pub use google::GoogleMatrix;
pub use pagerank::{pagerank, rank_table, PageRankOptions, PageRankVector, RankRow, RankTable};
pub use reduced::{censor_diagonal, reduced_google_matrix, ReduceOptions, ReducedGoogleMatrix};

use crate::cgraph::CGraph;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Links as declared: PageRank measures the capacity to receive.
    Forward,
    /// Links inverted: reverse PageRank measures the capacity to send.
    Reverse,
}

impl std::str::FromStr for Direction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "pr" => Ok(Direction::Forward),
            "reverse" | "rpr" => Ok(Direction::Reverse),
            _ => Err(crate::Error::InvalidParameter(format!("unknown direction {s}"))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        })
    }
}

pub const DEFAULT_ALPHA: f64 = 0.85;

/// PageRank (or reverse PageRank) of a graph.
pub fn graph_pagerank(g: &CGraph, direction: Direction, opts: PageRankOptions) -> Result<PageRankVector> {
    let gm = GoogleMatrix::new(g, opts.alpha, direction)?;
    pagerank(&gm, opts.tol, opts.max_iter)
}

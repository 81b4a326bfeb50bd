//! Weighted undirected graphs and their unnormalized Laplacians.
//!
//! Graphs are stored as validated edge lists with 0-based node indices.
//! The builders here always return connected graphs:
//!
//! - [`Graph::path`]: the path `P_n` with unit weights
//! - [`Graph::river_channel`]: a stem path with tributary paths hanging off it
//! - [`Graph::trunk_roots`]: a trunk path with a leaf fan at each end
//!
//! [`Graph::weaken_edge`] replaces one edge weight, which is how constriction
//! sweeps drive the Fiedler value toward zero.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One undirected edge `(u, v, weight)`.
pub type Edge = (usize, usize, f64);

/// Weighted undirected graph without self-loops or parallel edges.
///
/// JSON form is `{"n": int, "edges": [[u, v, w], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges)
    }
}

fn unordered(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl Graph {
    /// Validates and builds a graph. Connectivity is not required here; see
    /// [`Graph::is_connected`].
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidTopology(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidTopology(format!("self-loop at node {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            if !seen.insert(unordered(u, v)) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self { n, edges })
    }

    /// Path graph with edges `(i, i+1, 1.0)`.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("path needs n >= 2, got {n}")));
        }
        Self::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0)).collect())
    }

    /// Stem path `0..stem_len` plus one unit-weight tributary path per
    /// `(attach_node, branch_len)`, appended in order.
    pub fn river_channel(stem_len: usize, tributaries: &[(usize, usize)]) -> Result<Self> {
        if stem_len < 2 {
            return Err(Error::InvalidSize(format!(
                "stem needs at least 2 nodes, got {stem_len}"
            )));
        }
        let mut edges: Vec<Edge> = (0..stem_len - 1).map(|i| (i, i + 1, 1.0)).collect();
        let mut n = stem_len;
        for &(attach, len) in tributaries {
            if attach >= stem_len {
                return Err(Error::InvalidTopology(format!(
                    "tributary attach node {attach} is not on the stem 0..{stem_len}"
                )));
            }
            if len == 0 {
                return Err(Error::InvalidTopology(
                    "tributary length must be at least 1".into(),
                ));
            }
            let mut prev = attach;
            for _ in 0..len {
                edges.push((prev, n, 1.0));
                prev = n;
                n += 1;
            }
        }
        Self::new(n, edges)
    }

    /// Trunk path `0..trunk_len`, `root_fan` leaves on node 0 and `branch_fan`
    /// leaves on the top trunk node.
    pub fn trunk_roots(trunk_len: usize, root_fan: usize, branch_fan: usize) -> Result<Self> {
        if trunk_len < 2 {
            return Err(Error::InvalidSize(format!(
                "trunk needs at least 2 nodes, got {trunk_len}"
            )));
        }
        if root_fan == 0 || branch_fan == 0 {
            return Err(Error::InvalidSize("fans must be at least 1".into()));
        }
        let top = trunk_len - 1;
        let mut edges: Vec<Edge> = (0..top).map(|i| (i, i + 1, 1.0)).collect();
        let mut n = trunk_len;
        for _ in 0..root_fan {
            edges.push((0, n, 1.0));
            n += 1;
        }
        for _ in 0..branch_fan {
            edges.push((top, n, 1.0));
            n += 1;
        }
        Self::new(n, edges)
    }

    /// Copy of the graph with edge `{u, v}` reweighted to `eps`.
    pub fn weaken_edge(&self, u: usize, v: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!(
                "edge weight must be positive, got {eps}"
            )));
        }
        let key = unordered(u, v);
        let idx = self
            .edges
            .iter()
            .position(|&(a, b, _)| unordered(a, b) == key)
            .ok_or(Error::EdgeNotFound { u, v })?;
        let mut edges = self.edges.clone();
        edges[idx].2 = eps;
        Ok(Self { n: self.n, edges })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let key = unordered(u, v);
        self.edges
            .iter()
            .find(|&&(a, b, _)| unordered(a, b) == key)
            .map(|e| e.2)
    }

    /// Symmetric weighted adjacency matrix.
    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        a
    }

    /// Unnormalized Laplacian `L = D − A`.
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            l[(u, v)] -= w;
            l[(v, u)] -= w;
            l[(u, u)] += w;
            l[(v, v)] += w;
        }
        l
    }

    /// BFS from node 0.
    pub fn is_connected(&self) -> bool {
        let mut neighbours = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            neighbours[u].push(v);
            neighbours[v].push(u);
        }
        let mut visited = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &neighbours[u] {
                if !visited[v] {
                    visited[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read graph file {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }
}

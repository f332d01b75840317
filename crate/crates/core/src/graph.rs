//! Compressed adjacency for weighted undirected graphs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Undirected weighted graph in compressed sparse row layout. Every edge is
/// stored twice, once per endpoint. Neighbour lists are sorted by node index.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Builds the graph from `(a, b, weight)` triples. Weights must be finite
    /// and positive; self-loops and repeated pairs are rejected.
    pub fn from_edges(node_count: usize, edges: &[(u32, u32, f64)]) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("too many nodes: {node_count}")));
        }
        let mut degree = vec![0usize; node_count];
        for &(a, b, w) in edges {
            let (a, b) = (a as usize, b as usize);
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidData(format!(
                    "edge ({a}, {b}) references a node outside 0..{node_count}"
                )));
            }
            if a == b {
                return Err(Error::InvalidData(format!("self-loop on node {a}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidData(format!("edge ({a}, {b}) has weight {w}")));
            }
            degree[a] += 1;
            degree[b] += 1;
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut cursor = offsets[..node_count].to_vec();
        let mut arcs = vec![(0u32, 0.0f64); total];
        for &(a, b, w) in edges {
            arcs[cursor[a as usize]] = (b, w);
            cursor[a as usize] += 1;
            arcs[cursor[b as usize]] = (a, w);
            cursor[b as usize] += 1;
        }
        for i in 0..node_count {
            let list = &mut arcs[offsets[i]..offsets[i + 1]];
            list.sort_unstable_by_key(|&(t, _)| t);
            if let Some(pair) = list.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::InvalidData(format!(
                    "duplicate edge between {i} and {}",
                    pair[0].0
                )));
            }
        }
        let (targets, weights) = arcs.into_iter().unzip();
        Ok(Self { offsets, targets, weights })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Unweighted degree.
    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn neighbor_weights(&self, node: usize) -> &[f64] {
        &self.weights[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Weight of the edge between `a` and `b`, if any.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let list = self.neighbors(a);
        list.binary_search(&(b as u32))
            .ok()
            .map(|k| self.neighbor_weights(a)[k])
    }

    /// Returns a copy with every weight mapped through `f`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            weights: self.weights.iter().map(|&w| f(w)).collect(),
        }
    }

    /// Each undirected edge once, with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .zip(self.neighbor_weights(a))
                .filter(move |(&b, _)| (b as usize) > a)
                .map(move |(&b, &w)| (a, b as usize, w))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_both_directions() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 2.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.weight(2, 1), Some(1.0));
        assert_eq!(g.weight(0, 2), None);
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1, 2.0), (1, 2, 1.0)]);
    }

    #[test]
    fn rejects_self_loops_duplicates_and_bad_weights() {
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, f64::NAN)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 5, 1.0)]).is_err());
    }
}

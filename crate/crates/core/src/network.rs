//! Word co-occurrence networks built from a period's token streams.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::token::Token;

/// Default co-occurrence window, in post-cleaning token positions.
pub const DEFAULT_WINDOW: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub weight: u64,
}

/// Weighted undirected co-occurrence graph for one period.
///
/// Nodes are every token that occurs in the period, sorted; edges have
/// `a < b`, are sorted by `(a, b)` and carry a positive co-occurrence count.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooccurrenceNetwork {
    nodes: Vec<Token>,
    prevalence: Vec<u64>,
    edges: Vec<Edge>,
}

impl CooccurrenceNetwork {
    /// Builds the network for one period.
    ///
    /// Within each document, every pair of positions `p < q` with
    /// `q - p <= window` holding different tokens adds one to the weight of
    /// that token pair. Documents never co-occur across their boundaries.
    pub fn build<S: AsRef<[Token]>>(streams: &[S], window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidArgument("co-occurrence window must be at least 1".into()));
        }

        let mut counts: BTreeMap<&Token, u64> = BTreeMap::new();
        for stream in streams {
            for t in stream.as_ref() {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        let nodes: Vec<Token> = counts.keys().map(|&t| t.clone()).collect();
        let prevalence: Vec<u64> = counts.values().copied().collect();
        let index: BTreeMap<&Token, u32> = counts
            .keys()
            .enumerate()
            .map(|(i, &t)| (t, i as u32))
            .collect();

        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut ids: Vec<u32> = Vec::new();
        for stream in streams {
            ids.clear();
            ids.extend(stream.as_ref().iter().map(|t| index[t]));
            for p in 0..ids.len() {
                for q in p + 1..ids.len().min(p + window + 1) {
                    let (x, y) = (ids[p], ids[q]);
                    if x != y {
                        pairs.push((x.min(y), x.max(y)));
                    }
                }
            }
        }
        pairs.sort_unstable();

        let mut edges: Vec<Edge> = Vec::new();
        for (a, b) in pairs {
            match edges.last_mut() {
                Some(e) if e.a == a && e.b == b => e.weight += 1,
                _ => edges.push(Edge { a, b, weight: 1 }),
            }
        }
        Ok(Self { nodes, prevalence, edges })
    }

    /// Assembles a network from already-counted parts; validates the
    /// structural invariants.
    pub fn from_parts(nodes: Vec<Token>, prevalence: Vec<u64>, mut edges: Vec<Edge>) -> Result<Self> {
        if prevalence.len() != nodes.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), actual: prevalence.len() });
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("nodes must be sorted and unique".into()));
        }
        for e in &mut edges {
            if e.a == e.b {
                return Err(Error::InvalidData(format!("self-loop on node {}", e.a)));
            }
            if e.a > e.b {
                core::mem::swap(&mut e.a, &mut e.b);
            }
            if e.b as usize >= nodes.len() || e.weight == 0 {
                return Err(Error::InvalidData(format!("invalid edge {e:?}")));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::InvalidData("duplicate edge".into()));
        }
        Ok(Self { nodes, prevalence, edges })
    }

    pub fn nodes(&self) -> &[Token] {
        &self.nodes
    }

    pub fn prevalence(&self) -> &[u64] {
        &self.prevalence
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, token: &Token) -> Option<usize> {
        self.nodes.binary_search(token).ok()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Drops edges lighter than `min_weight`; nodes are kept.
    pub fn pruned(&self, min_weight: u64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            prevalence: self.prevalence.clone(),
            edges: self.edges.iter().copied().filter(|e| e.weight >= min_weight).collect(),
        }
    }

    pub fn to_graph(&self) -> WeightedGraph {
        let edges: Vec<(u32, u32, f64)> =
            self.edges.iter().map(|e| (e.a, e.b, e.weight as f64)).collect();
        WeightedGraph::from_edges(self.nodes.len(), &edges)
            .expect("network edges satisfy graph invariants")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn words(ws: &[&str]) -> Vec<Token> {
        ws.iter().map(|w| Token::word(*w)).collect()
    }

    fn weight(net: &CooccurrenceNetwork, a: &str, b: &str) -> Option<u64> {
        let (i, j) = (net.position(&Token::word(a))?, net.position(&Token::word(b))?);
        let (i, j) = (i.min(j) as u32, i.max(j) as u32);
        net.edges().iter().find(|e| e.a == i && e.b == j).map(|e| e.weight)
    }

    #[test]
    fn single_pair() {
        let net = CooccurrenceNetwork::build(&[words(&["a", "b"])], 3).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edges(), &[Edge { a: 0, b: 1, weight: 1 }]);
    }

    #[test]
    fn repeated_token_accumulates_without_self_loop() {
        let net = CooccurrenceNetwork::build(&[words(&["a", "b", "a"])], 3).unwrap();
        assert_eq!(net.edges(), &[Edge { a: 0, b: 1, weight: 2 }]);
        assert_eq!(net.prevalence(), &[2, 1]);
    }

    #[test]
    fn window_bounds_and_document_isolation() {
        let docs = vec![words(&["a", "b", "c", "d", "e"]), words(&["e", "f"])];
        let net = CooccurrenceNetwork::build(&docs, 2).unwrap();
        assert_eq!(weight(&net, "a", "c"), Some(1));
        assert_eq!(weight(&net, "a", "d"), None);
        assert_eq!(weight(&net, "e", "f"), Some(1));
        assert_eq!(weight(&net, "d", "f"), None);
    }

    #[test]
    fn empty_period_gives_empty_network() {
        let docs: Vec<Vec<Token>> = vec![];
        let net = CooccurrenceNetwork::build(&docs, 3).unwrap();
        assert!(net.is_empty());
        assert!(net.edges().is_empty());
    }

    #[test]
    fn zero_window_rejected() {
        assert!(CooccurrenceNetwork::build(&[words(&["a"])], 0).is_err());
    }

    #[test]
    fn pruning_keeps_nodes() {
        let net = CooccurrenceNetwork::build(&[words(&["a", "b", "a", "c"])], 1).unwrap();
        let pruned = net.pruned(2);
        assert_eq!(pruned.node_count(), 3);
        assert_eq!(pruned.edges().len(), 1);
    }

    #[test]
    fn from_parts_normalizes_edge_orientation() {
        let net = CooccurrenceNetwork::from_parts(
            words(&["a", "b"]),
            vec![1, 1],
            vec![Edge { a: 1, b: 0, weight: 3 }],
        )
        .unwrap();
        assert_eq!(net.edges(), &[Edge { a: 0, b: 1, weight: 3 }]);
        assert!(CooccurrenceNetwork::from_parts(words(&["b", "a"]), vec![1, 1], vec![]).is_err());
    }
}

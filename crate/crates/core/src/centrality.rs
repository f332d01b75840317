//! Node measures of a co-occurrence network: prevalence, distinctiveness
//! (diversity), weighted betweenness (connectivity) and their per-period
//! z-scores.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::math;
use crate::network::CooccurrenceNetwork;
use crate::token::Token;

/// Relative tolerance under which two path lengths count as equal.
///
/// Distances are sums of reciprocal co-occurrence counts, so mathematically
/// equal paths (`1/6 + 1/3` against `1/2`) can differ in the last bits.
pub const PATH_TIE_RTOL: f64 = 1e-12;

#[inline]
pub fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= PATH_TIE_RTOL * a.max(b)
}

/// Logarithm base used by distinctiveness. Any base rescales every value by
/// the same constant, which per-period standardization removes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
    Custom(f64),
}

impl LogBase {
    fn ln_divisor(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => core::f64::consts::LN_2,
            LogBase::Ten => core::f64::consts::LN_10,
            LogBase::Custom(b) => math::ln(b),
        }
    }
}

/// Total occurrences of `token` across the period's token streams.
pub fn prevalence<S: AsRef<[Token]>>(streams: &[S], token: &Token) -> u64 {
    streams
        .iter()
        .map(|s| s.as_ref().iter().filter(|t| *t == token).count() as u64)
        .sum()
}

/// Distinctiveness of one node: the sum over its neighbours `j` of
/// `log((n - 1) / g_j)`, where `g_j` is the unweighted degree of `j`.
pub fn distinctiveness(graph: &WeightedGraph, node: usize, base: LogBase) -> f64 {
    let n = graph.node_count();
    if n < 2 {
        return 0.0;
    }
    let others = (n - 1) as f64;
    let sum: f64 = graph
        .neighbors(node)
        .iter()
        .map(|&j| math::ln(others / graph.degree(j as usize) as f64))
        .sum();
    sum / base.ln_divisor()
}

pub fn distinctiveness_all(graph: &WeightedGraph, base: LogBase) -> Vec<f64> {
    let n = graph.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    // Each neighbour contributes the same term to every node it touches.
    let others = (n - 1) as f64;
    let divisor = base.ln_divisor();
    let term: Vec<f64> = (0..n)
        .map(|j| match graph.degree(j) {
            0 => 0.0,
            g => math::ln(others / g as f64),
        })
        .collect();
    (0..n)
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .map(|&j| term[j as usize])
                .sum::<f64>()
                / divisor
        })
        .collect()
}

/// Exact weighted betweenness (unnormalized, each unordered pair counted once)
/// by single-source shortest-path dependency accumulation. Edge weights are
/// tie strengths; the length of an edge is the reciprocal of its weight.
///
/// The per-source step is exposed so callers can distribute sources over
/// threads; summing the per-source vectors and calling [`finish`] gives the
/// same values as [`Betweenness::compute`].
///
/// [`finish`]: Betweenness::finish
pub struct Betweenness {
    // Nodes are relabelled by decreasing degree so the hubs that every search
    // touches share cache lines.
    to_internal: Vec<u32>,
    to_external: Vec<u32>,
    offsets: Vec<usize>,
    /// `(neighbour, length class)` per arc; `lengths[class]` is the length.
    arcs: Vec<(u32, u32)>,
    lengths: Vec<f64>,
    frontier: FrontierKind,
}

#[derive(Clone, Copy, Debug)]
enum FrontierKind {
    /// Bucket width just below the shortest edge length; `slots` is a power
    /// of two larger than the longest edge measured in buckets.
    Buckets { inv_width: f64, slots: usize },
    Radix,
}

/// Longest/shortest edge ratio up to which the bucket queue is used.
const MAX_BUCKET_SLOTS: usize = 1 << 20;

const NIL: u32 = u32::MAX;

/// Scratch buffers for one single-source pass; reusable across sources.
pub struct BrandesWorkspace {
    /// Tentative distance; negated once the node is settled.
    dist: Vec<f64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    /// Head of each node's predecessor list in `links`.
    pred_head: Vec<u32>,
    /// `(predecessor, next link)`.
    links: Vec<(u32, u32)>,
    order: Vec<u32>,
    buckets: Vec<Vec<u32>>,
    radix: RadixHeap,
}

impl BrandesWorkspace {
    fn new(node_count: usize, frontier: FrontierKind) -> Self {
        let slots = match frontier {
            FrontierKind::Buckets { slots, .. } => slots,
            FrontierKind::Radix => 0,
        };
        Self {
            dist: vec![f64::INFINITY; node_count],
            sigma: vec![0.0; node_count],
            delta: vec![0.0; node_count],
            pred_head: vec![NIL; node_count],
            links: Vec::new(),
            order: Vec::with_capacity(node_count),
            buckets: (0..slots).map(|_| Vec::new()).collect(),
            radix: RadixHeap::new(),
        }
    }
}

/// Monotone priority queue over non-negative `f64` keys, compared through
/// their bit patterns (which order like the values). Valid because Dijkstra
/// never inserts a key below the last one extracted.
struct RadixHeap {
    last: u64,
    len: usize,
    buckets: [Vec<(u64, u32)>; 65],
}

impl RadixHeap {
    fn new() -> Self {
        Self { last: 0, len: 0, buckets: core::array::from_fn(|_| Vec::new()) }
    }

    #[inline]
    fn bucket_of(&self, key: u64) -> usize {
        (64 - (key ^ self.last).leading_zeros()) as usize
    }

    #[inline]
    fn push(&mut self, key: u64, node: u32) {
        debug_assert!(key >= self.last);
        let b = self.bucket_of(key);
        self.buckets[b].push((key, node));
        self.len += 1;
    }

    fn pop(&mut self) -> Option<(u64, u32)> {
        if self.len == 0 {
            return None;
        }
        if self.buckets[0].is_empty() {
            let i = (1..65).find(|&i| !self.buckets[i].is_empty())?;
            let mut moved = core::mem::take(&mut self.buckets[i]);
            self.last = moved.iter().map(|e| e.0).min().unwrap_or(self.last);
            for &(key, node) in &moved {
                let b = self.bucket_of(key);
                self.buckets[b].push((key, node));
            }
            moved.clear();
            self.buckets[i] = moved;
        }
        self.len -= 1;
        self.buckets[0].pop()
    }

    fn clear(&mut self) {
        for b in &mut self.buckets {
            b.clear();
        }
        self.last = 0;
        self.len = 0;
    }
}

impl Betweenness {
    pub fn new(graph: &WeightedGraph) -> Self {
        let n = graph.node_count();
        let mut to_external: Vec<u32> = (0..n as u32).collect();
        to_external.sort_by_key(|&i| core::cmp::Reverse(graph.degree(i as usize)));
        let mut to_internal = vec![0u32; n];
        for (internal, &external) in to_external.iter().enumerate() {
            to_internal[external as usize] = internal as u32;
        }

        // Distinct weights, heaviest (shortest) last.
        let mut weights: Vec<f64> = graph.edges().map(|(_, _, w)| w).collect();
        weights.sort_unstable_by(f64::total_cmp);
        weights.dedup();
        let lengths: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
        let class_of = |w: f64| {
            weights
                .binary_search_by(|x| x.total_cmp(&w))
                .expect("weight present in table") as u32
        };

        let mut offsets = Vec::with_capacity(n + 1);
        let mut arcs = Vec::with_capacity(2 * graph.edge_count());
        offsets.push(0);
        for &external in &to_external {
            let v = external as usize;
            let start = arcs.len();
            arcs.extend(
                graph
                    .neighbors(v)
                    .iter()
                    .zip(graph.neighbor_weights(v))
                    .map(|(&t, &w)| (to_internal[t as usize], class_of(w))),
            );
            arcs[start..].sort_unstable_by_key(|a| a.0);
            offsets.push(arcs.len());
        }

        let frontier = match (lengths.last(), lengths.first()) {
            (Some(&shortest), Some(&longest)) => {
                let width = shortest * (1.0 - 1e-9);
                let span = longest / width;
                if span < MAX_BUCKET_SLOTS as f64 {
                    let slots = (span as usize + 2).next_power_of_two();
                    FrontierKind::Buckets { inv_width: 1.0 / width, slots }
                } else {
                    FrontierKind::Radix
                }
            }
            _ => FrontierKind::Radix,
        };

        Self { to_internal, to_external, offsets, arcs, lengths, frontier }
    }

    pub fn node_count(&self) -> usize {
        self.to_external.len()
    }

    pub fn workspace(&self) -> BrandesWorkspace {
        BrandesWorkspace::new(self.node_count(), self.frontier)
    }

    /// Adds the dependencies of `source` on every other node into `acc`.
    /// Each unordered pair is reached from both endpoints, so the sum over all
    /// sources is twice the betweenness.
    pub fn accumulate(&self, ws: &mut BrandesWorkspace, source: usize, acc: &mut [f64]) {
        let source = self.to_internal[source] as usize;
        ws.dist[source] = 0.0;
        ws.sigma[source] = 1.0;
        match self.frontier {
            FrontierKind::Buckets { inv_width, slots } => {
                self.settle_buckets(ws, source, inv_width, slots)
            }
            FrontierKind::Radix => self.settle_radix(ws, source),
        }

        // Dependencies, farthest nodes first.
        for idx in (0..ws.order.len()).rev() {
            let w = ws.order[idx] as usize;
            let coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
            let mut link = ws.pred_head[w];
            while link != NIL {
                let (v, next) = ws.links[link as usize];
                ws.delta[v as usize] += ws.sigma[v as usize] * coeff;
                link = next;
            }
            if w != source {
                acc[self.to_external[w] as usize] += ws.delta[w];
            }
        }

        for &v in &ws.order {
            let v = v as usize;
            ws.dist[v] = f64::INFINITY;
            ws.sigma[v] = 0.0;
            ws.delta[v] = 0.0;
            ws.pred_head[v] = NIL;
        }
        ws.order.clear();
        ws.links.clear();
    }

    /// Relaxes every arc of the freshly settled `v`; calls `enqueue` for each
    /// node whose distance strictly improved.
    #[inline(always)]
    fn relax(&self, ws: &mut BrandesWorkspace, v: usize, mut enqueue: impl FnMut(f64, u32)) {
        let dv = ws.dist[v];
        let sv = ws.sigma[v];
        ws.dist[v] = -dv;
        ws.order.push(v as u32);
        for &(w, class) in &self.arcs[self.offsets[v]..self.offsets[v + 1]] {
            let alt = dv + self.lengths[class as usize];
            let dw = ws.dist[w as usize];
            // Settled nodes carry a negative distance and never pass this test.
            if alt <= dw * (1.0 + PATH_TIE_RTOL) {
                let w = w as usize;
                if dw == f64::INFINITY || dw - alt > PATH_TIE_RTOL * dw {
                    ws.dist[w] = alt;
                    ws.sigma[w] = sv;
                    ws.links.push((v as u32, NIL));
                    enqueue(alt, w as u32);
                } else {
                    ws.sigma[w] += sv;
                    ws.links.push((v as u32, ws.pred_head[w]));
                }
                ws.pred_head[w] = (ws.links.len() - 1) as u32;
            }
        }
    }

    // Every edge spans more than one bucket, so a node's predecessors always
    // sit in strictly earlier buckets: nodes of the current bucket are final
    // and may be settled in any order.
    fn settle_buckets(&self, ws: &mut BrandesWorkspace, source: usize, inv_width: f64, slots: usize) {
        let mask = slots - 1;
        let mut buckets = core::mem::take(&mut ws.buckets);
        buckets[0].push(source as u32);
        let mut pending = 1usize;
        let mut current = 0usize;
        while pending > 0 {
            let slot = current & mask;
            while let Some(v) = buckets[slot].pop() {
                pending -= 1;
                let v = v as usize;
                let dv = ws.dist[v];
                if dv < 0.0 || (dv * inv_width) as usize != current {
                    continue;
                }
                self.relax(ws, v, |d, w| {
                    buckets[(d * inv_width) as usize & mask].push(w);
                    pending += 1;
                });
            }
            current += 1;
        }
        ws.buckets = buckets;
    }

    fn settle_radix(&self, ws: &mut BrandesWorkspace, source: usize) {
        let mut queue = core::mem::replace(&mut ws.radix, RadixHeap::new());
        queue.push(0.0f64.to_bits(), source as u32);
        while let Some((key, v)) = queue.pop() {
            let v = v as usize;
            if key != ws.dist[v].to_bits() {
                continue;
            }
            self.relax(ws, v, |d, w| queue.push(d.to_bits(), w));
        }
        queue.clear();
        ws.radix = queue;
    }

    /// Converts a sum of per-source accumulations into betweenness values.
    pub fn finish(mut acc: Vec<f64>) -> Vec<f64> {
        for v in &mut acc {
            *v *= 0.5;
        }
        acc
    }

    /// Sequential computation over all sources.
    pub fn compute(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut acc = vec![0.0; n];
        let mut ws = self.workspace();
        for s in 0..n {
            self.accumulate(&mut ws, s, &mut acc);
        }
        Self::finish(acc)
    }

    /// Forces the heap-based frontier; used to cross-check the bucket queue.
    #[doc(hidden)]
    pub fn with_radix_frontier(mut self) -> Self {
        self.frontier = FrontierKind::Radix;
        self
    }
}

pub fn betweenness_all(graph: &WeightedGraph) -> Vec<f64> {
    Betweenness::new(graph).compute()
}

pub fn betweenness(graph: &WeightedGraph, node: usize) -> f64 {
    betweenness_all(graph)[node]
}

/// Per-period z-scores with the population standard deviation. A constant
/// input (including a single value) standardizes to all zeros.
pub fn standardize(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return vec![0.0; values.len()];
    }
    let mean = math::mean(values);
    let sd = math::sqrt(math::population_variance(values));
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CentralityConfig {
    pub log_base: LogBase,
}

/// Raw and standardized measures for every node of one period's network,
/// in the network's node order.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodMeasures {
    pub tokens: Vec<Token>,
    pub prevalence: Vec<u64>,
    pub diversity: Vec<f64>,
    pub connectivity: Vec<f64>,
    pub z_prevalence: Vec<f64>,
    pub z_diversity: Vec<f64>,
    pub z_connectivity: Vec<f64>,
}

impl PeriodMeasures {
    /// Computes all measures sequentially.
    pub fn from_network(net: &CooccurrenceNetwork, config: &CentralityConfig) -> Self {
        let graph = net.to_graph();
        let diversity = distinctiveness_all(&graph, config.log_base);
        let connectivity = betweenness_all(&graph);
        Self::from_parts(net, diversity, connectivity)
            .expect("measures computed from the network's own graph")
    }

    /// Assembles measures when diversity and connectivity were computed
    /// elsewhere (e.g. on a thread pool).
    pub fn from_parts(
        net: &CooccurrenceNetwork,
        diversity: Vec<f64>,
        connectivity: Vec<f64>,
    ) -> Result<Self> {
        let n = net.node_count();
        for len in [diversity.len(), connectivity.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, actual: len });
            }
        }
        let prevalence = net.prevalence().to_vec();
        let prev_f: Vec<f64> = prevalence.iter().map(|&p| p as f64).collect();
        Ok(Self {
            tokens: net.nodes().to_vec(),
            z_prevalence: standardize(&prev_f),
            z_diversity: standardize(&diversity),
            z_connectivity: standardize(&connectivity),
            prevalence,
            diversity,
            connectivity,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Position of `token`; tokens are kept sorted.
    pub fn position(&self, token: &Token) -> Option<usize> {
        self.tokens.binary_search(token).ok()
    }
}

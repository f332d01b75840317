//! Thread-pool wrappers whose results do not depend on the thread count.

use rayon::prelude::*;
use semidx_core::centrality::{distinctiveness_all, Betweenness, CentralityConfig, PeriodMeasures};
use semidx_core::graph::WeightedGraph;
use semidx_core::CooccurrenceNetwork;

use crate::error::{Error, Result};

/// Upper bound on the number of partial sums kept in memory at once.
const MAX_CHUNKS: usize = 128;
const MIN_CHUNK: usize = 32;

/// Sources per chunk. A function of the node count only, so the reduction
/// tree is the same for every pool size.
pub fn source_chunk(n: usize) -> usize {
    n.div_ceil(MAX_CHUNKS).max(MIN_CHUNK)
}

/// Weighted betweenness with sources spread over the current rayon pool.
/// Partial sums are reduced in chunk order.
pub fn betweenness(graph: &WeightedGraph) -> Vec<f64> {
    let bc = Betweenness::new(graph);
    let n = bc.node_count();
    if n == 0 {
        return Vec::new();
    }
    let chunk = source_chunk(n);
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&s0| {
            let mut ws = bc.workspace();
            let mut acc = vec![0.0; n];
            for s in s0..(s0 + chunk).min(n) {
                bc.accumulate(&mut ws, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    Betweenness::finish(total)
}

pub fn measures(net: &CooccurrenceNetwork, config: &CentralityConfig) -> PeriodMeasures {
    let graph = net.to_graph();
    let diversity = distinctiveness_all(&graph, config.log_base);
    let connectivity = betweenness(&graph);
    PeriodMeasures::from_parts(net, diversity, connectivity).expect("lengths match the network")
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::validation(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use semidx_core::centrality::betweenness_all;

    #[test]
    fn matches_sequential_and_ignores_pool_size() {
        let mut pairs = std::collections::BTreeMap::new();
        for i in 0..90u32 {
            for (j, w) in [((i * 7 + 3) % 90, 1.0 + (i % 4) as f64), ((i + 1) % 90, 2.0)] {
                if i != j {
                    pairs.entry((i.min(j), i.max(j))).or_insert(w);
                }
            }
        }
        let edges: Vec<(u32, u32, f64)> = pairs.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        let g = WeightedGraph::from_edges(90, &edges).unwrap();
        let seq = betweenness_all(&g);
        let one = with_threads(1, || betweenness(&g)).unwrap();
        let four = with_threads(4, || betweenness(&g)).unwrap();
        assert_eq!(one, four);
        for (a, b) in seq.iter().zip(&one) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}

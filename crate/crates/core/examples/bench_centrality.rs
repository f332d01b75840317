//! Times exact betweenness and distinctiveness on a Zipfian synthetic
//! co-occurrence network. Usage: bench_centrality [vocab] [edges] [sources]

use rand::{Rng, SeedableRng};
use semidx_core::centrality::{distinctiveness_all, Betweenness, LogBase};
use semidx_core::{CooccurrenceNetwork, Token};
use std::time::Instant;

fn main() {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().unwrap());
    let vocab = args.next().unwrap_or(140_000);
    let target_edges = args.next().unwrap_or(500_000);
    let sources = args.next().unwrap_or(500);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let zipf = rand_distr::Zipf::new(vocab as u64, 1.0).unwrap();
    let mut docs: Vec<Vec<Token>> = Vec::new();
    let mut net = CooccurrenceNetwork::default();
    while net.edges().len() < target_edges {
        for _ in 0..2000 {
            docs.push((0..30).map(|_| Token::Word(format!("w{}", rng.sample(zipf) as u64))).collect());
        }
        net = CooccurrenceNetwork::build(&docs, 3).unwrap();
    }
    let g = net.to_graph();
    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    let t = Instant::now();
    let d = distinctiveness_all(&g, LogBase::Natural);
    println!("distinctiveness {:?} ({})", t.elapsed(), d[0]);
    let b = Betweenness::new(&g);
    let mut ws = b.workspace();
    let n = g.node_count();
    let mut acc = vec![0.0; n];
    let t = Instant::now();
    for s in 0..sources {
        b.accumulate(&mut ws, s * (n / sources), &mut acc);
    }
    let el = t.elapsed();
    println!(
        "{sources} sources in {el:?}; projected full: {:.1}s",
        el.as_secs_f64() / sources as f64 * n as f64
    );
}

//! Random admissible chains: weighted random walks on connected,
//! non-bipartite undirected graphs.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::MarkovChain;

/// Symmetric edge weights of a random connected graph on `n ≥ 3` vertices
/// with at least one odd cycle.
///
/// The graph is a random spanning tree plus up to `n` extra edges; when the
/// result is bipartite a triangle is closed on top of one tree edge.
/// Weights are log-uniform in `[0.1, 10]`.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(n >= 3, "need at least 3 vertices");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert(key(order[i], order[j]));
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert(key(a, b));
        }
    }
    if is_bipartite(n, &edges) {
        let &(u, v) = edges.iter().next().expect("tree has edges");
        let w = (0..n).find(|&w| w != u && w != v).expect("n >= 3");
        edges.insert(key(u, w));
        edges.insert(key(v, w));
    }
    let mut weights = DMatrix::zeros(n, n);
    for &(a, b) in &edges {
        let w = 10f64.powf(rng.random_range(-1.0..=1.0));
        weights[(a, b)] = w;
        weights[(b, a)] = w;
    }
    weights
}

fn is_bipartite(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![None; n];
    for root in 0..n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(false);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            let cu = color[u].unwrap();
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

/// The random walk `P_xy = w_xy / Σ_z w_xz` on a symmetric weight matrix.
pub fn random_walk(weights: &DMatrix<f64>) -> crate::Result<MarkovChain> {
    let n = weights.nrows();
    let p = DMatrix::from_fn(n, n, |x, y| {
        let d: f64 = weights.row(x).iter().sum();
        weights[(x, y)] / d
    });
    MarkovChain::with_default_labels(p)
}

pub fn random_admissible_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MarkovChain {
    random_walk(&random_weights(n, rng)).expect("random walks on connected graphs are valid chains")
}

/// Chain `index` of a reproducible suite: its generator is the ChaCha
/// stream `index` under `master_seed`, so every chain is independent of
/// how many others are drawn.
pub fn suite_chain(master_seed: u64, index: u64, sizes: std::ops::RangeInclusive<usize>) -> MarkovChain {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let n = rng.random_range(sizes);
    random_admissible_chain(n, &mut rng)
}

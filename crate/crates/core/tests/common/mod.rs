#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use sscnet::oracle::random_pattern;
use sscnet::{NodeSystem, PatternMatrix, StructuredNetwork, Symbol};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn example1() -> StructuredNetwork {
    StructuredNetwork::from_path(fixture("example1.json")).unwrap()
}

pub fn pm(rows: &[&str]) -> PatternMatrix {
    let grid: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.split_whitespace().map(str::to_string).collect())
        .collect();
    PatternMatrix::from_tokens(&grid).unwrap()
}

/// Columns with exactly one `*` at a random row.
fn unit_star_columns<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> PatternMatrix {
    let mut m = PatternMatrix::zeros(rows, cols);
    for j in 0..cols {
        m.set(rng.gen_range(0..rows), j, Symbol::Star);
    }
    m
}

/// A random network satisfying the input/output assumption with
/// `N <= 4`, `n_k <= 3`, `r_k = p_k <= 2` and `1 <= m <= 2`.
pub fn random_network<R: Rng>(rng: &mut R) -> StructuredNetwork {
    let n_nodes = rng.gen_range(1..=4);
    let mut nodes = Vec::new();
    for _ in 0..n_nodes {
        let n = rng.gen_range(1..=3);
        let io = rng.gen_range(1..=2);
        let mut a = random_pattern(n, n, [0.65, 0.25, 0.1], rng);
        // diagonal-heavy nodes are controllable more often
        for i in 0..n {
            if rng.gen_bool(0.7) {
                a.set(i, i, Symbol::Star);
            }
        }
        let b = unit_star_columns(n, io, rng);
        let c = unit_star_columns(n, io, rng).transpose();
        nodes.push(NodeSystem::new(a, b, c));
    }
    let r: usize = nodes.iter().map(NodeSystem::inputs).sum();
    let p: usize = nodes.iter().map(NodeSystem::outputs).sum();
    let m = rng.gen_range(1..=2);
    let w = random_pattern(r, p, [0.6, 0.25, 0.15], rng);
    let h = random_pattern(r, m, [0.6, 0.3, 0.1], rng);
    StructuredNetwork::new(nodes, w, h)
}

//! Graph corpus shared by the integration targets.

#![allow(dead_code)]

use spantree::families::{platonic, stacked_triangulation, Solid};
use spantree::graph::Adjacency;
use spantree::{RotationGraph, SimpleGraph};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == u { b } else if b == u { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// One representative of every connected graph on `n` vertices, up to
/// isomorphism, found by minimising the edge bitmask over all relabellings.
pub fn connected_graphs(n: usize) -> Vec<SimpleGraph> {
    let all = pairs(n);
    let index = |u: usize, v: usize| all.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let perms = permutations(n);
    let images: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| all.iter().map(|&(u, v)| index(p[u], p[v])).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << all.len()) {
        let edges: Vec<(usize, usize)> = (0..all.len()).filter(|&e| mask >> e & 1 == 1).map(|e| all[e]).collect();
        if !connected(n, &edges) {
            continue;
        }
        let canonical = images
            .iter()
            .map(|img| {
                (0..all.len())
                    .filter(|&e| mask >> e & 1 == 1)
                    .fold(0u32, |acc, e| acc | 1 << img[e])
            })
            .min()
            .unwrap();
        if canonical == mask {
            out.push(SimpleGraph::from_edges(n, &edges).unwrap());
        }
    }
    out
}

/// Connected graphs on 1 to `max_n` vertices, up to isomorphism.
pub fn small_graphs(max_n: usize) -> Vec<SimpleGraph> {
    (1..=max_n).flat_map(connected_graphs).collect()
}

pub fn solids() -> Vec<(String, RotationGraph)> {
    Solid::ALL.iter().map(|&s| (s.name().to_string(), platonic(s))).collect()
}

/// `prod_{v != 0} d_v`, the number of rooted outdegree-one selections.
pub fn selection_product<G: Adjacency>(g: &G) -> u128 {
    (1..g.vertex_count()).map(|v| g.degree(v) as u128).product()
}

/// Platonic triangulations and seeded stacked triangulations.
pub fn triangulations() -> Vec<(String, RotationGraph)> {
    let mut out: Vec<(String, RotationGraph)> = [Solid::Tetrahedron, Solid::Octahedron, Solid::Icosahedron]
        .iter()
        .map(|&s| (s.name().to_string(), platonic(s)))
        .collect();
    for n in 5..=40 {
        for seed in 0..3 {
            out.push((format!("stacked({n},{seed})"), stacked_triangulation(n, seed).unwrap()));
        }
    }
    out
}

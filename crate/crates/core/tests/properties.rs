mod common;

use proptest::prelude::*;
use spantree::asymptotics::{binary_entropy, forest_bound};
use spantree::bound::{bound_for_graph, MuVector};
use spantree::dual::{dual_lhs, edge_sig, CaseSignature, DualCertificate, DualProgram};
use spantree::families::stacked_triangulation;
use spantree::graph::Adjacency;
use spantree::kirchhoff::{count_by_deletion_contraction, count_by_enumeration, count_spanning_trees};
use spantree::signatures::{check_primal_constraints, edge_signature, tally, triangle_signature, Variant};
use spantree::{RotationGraph, SimpleGraph};

/// A connected graph: a random spanning tree plus random extra edges.
fn connected_graph() -> impl Strategy<Value = SimpleGraph> {
    (2usize..=7)
        .prop_flat_map(|n| {
            let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n), 0..n * 2);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (parents[v - 1].index(v), v)).collect();
            for (u, v) in extra {
                let e = (u.min(v), u.max(v));
                if u != v && !edges.iter().any(|&(a, b)| (a.min(b), a.max(b)) == e) {
                    edges.push(e);
                }
            }
            SimpleGraph::from_edges(n, &edges).unwrap()
        })
}

/// An edge signature whose sides agree on the two apex degrees:
/// `a_last = b_1` and `b_last = a_1`.
fn consistent_edge_signature() -> impl Strategy<Value = (u32, u32, Vec<u32>, Vec<u32>)> {
    (3u32..=9, 3u32..=9, 3u32..=9, 3u32..=9)
        .prop_flat_map(|(i, j, x, y)| {
            let inner_a = proptest::collection::vec(3u32..=9, (i - 3) as usize);
            let inner_b = proptest::collection::vec(3u32..=9, (j - 3) as usize);
            (Just((i, j, x, y)), inner_a, inner_b)
        })
        .prop_map(|((i, j, x, y), inner_a, inner_b)| {
            let mut a = vec![x];
            a.extend(inner_a);
            a.push(y);
            let mut b = vec![y];
            b.extend(inner_b);
            b.push(x);
            (i, j, a, b)
        })
}

fn reflected(sig: &CaseSignature) -> CaseSignature {
    match sig {
        CaseSignature::Edge(s) => CaseSignature::Edge(s.reflected()),
        CaseSignature::Triangle(s) => CaseSignature::Triangle(s.reflected()),
    }
}

fn relabel(g: &RotationGraph, perm: &[usize]) -> RotationGraph {
    g.relabeled(perm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rot_format_round_trips(n in 4usize..40, seed in any::<u64>(), shuffle in any::<u64>()) {
        let g = stacked_triangulation(n, seed).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        // A deterministic shuffle driven by `shuffle`.
        let mut s = shuffle | 1;
        for k in (1..n).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(k, (s % (k as u64 + 1)) as usize);
        }
        let h = relabel(&g, &perm);
        let back = RotationGraph::parse(&h.to_rot_string()).unwrap();
        prop_assert_eq!(back.rotations(), h.rotations());
        prop_assert_eq!(back.trace_faces().len(), g.trace_faces().len());
        prop_assert_eq!(count_spanning_trees(&h).unwrap(), count_spanning_trees(&g).unwrap());
    }

    #[test]
    fn three_counting_routes_agree(g in connected_graph()) {
        let t = count_spanning_trees(&g).unwrap();
        prop_assert_eq!(&count_by_deletion_contraction(&g, 10_000_000).unwrap(), &t);
        prop_assert_eq!(&count_by_enumeration(&g, g.vertex_count() - 1, 10_000_000).unwrap(), &t);
    }

    #[test]
    fn edge_dual_lhs_is_reflection_invariant(sig in consistent_edge_signature()) {
        let (i, j, a, b) = sig;
        let s = edge_sig(i, j, a, b);
        for program in [DualProgram::Gen2, DualProgram::R4, DualProgram::R5] {
            let cert = DualCertificate::builtin(program);
            let x = dual_lhs(&cert, &s).unwrap();
            let y = dual_lhs(&cert, &reflected(&s)).unwrap();
            prop_assert!((x - y).abs() < 1e-12, "{program} {s}: {x} vs {y}");
        }
    }

    #[test]
    fn graph_signatures_are_reflection_invariant(n in 5usize..30, seed in any::<u64>()) {
        let g = stacked_triangulation(n, seed).unwrap();
        let gen2 = DualCertificate::builtin(DualProgram::Gen2);
        let gen3 = DualCertificate::builtin(DualProgram::Gen3);
        for (u, v) in g.edges() {
            let s = CaseSignature::Edge(edge_signature(&g, u, v).unwrap());
            let x = dual_lhs(&gen2, &s).unwrap();
            prop_assert!((x - dual_lhs(&gen2, &reflected(&s)).unwrap()).abs() < 1e-12);
        }
        for f in &g.trace_faces().faces {
            let s = CaseSignature::Triangle(triangle_signature(&g, [f[0], f[1], f[2]]).unwrap());
            let x = dual_lhs(&gen3, &s).unwrap();
            prop_assert!((x - dual_lhs(&gen3, &reflected(&s)).unwrap()).abs() < 1e-12);
        }
        // The whole bound does not depend on the orientation of the input.
        let fwd = bound_for_graph(&g, &MuVector::GENERAL, Variant::General).unwrap();
        let rev = bound_for_graph(&g.reversed(), &MuVector::GENERAL, Variant::General).unwrap();
        prop_assert!((fwd.logbound - rev.logbound).abs() < 1e-9);
    }

    #[test]
    fn dual_lhs_decreases_with_lambda3(sig in consistent_edge_signature(), delta in 1e-6f64..1.0) {
        let (i, j, a, b) = sig;
        let s = edge_sig(i, j, a, b);
        for program in [DualProgram::Gen2, DualProgram::R4, DualProgram::R5] {
            let cert = DualCertificate::builtin(program);
            let x = dual_lhs(&cert, &s).unwrap();
            let y = dual_lhs(&cert.with_lambda3_shift(delta), &s).unwrap();
            prop_assert!(y < x);
            prop_assert!((x - y - delta).abs() < 1e-12);
        }
    }

    #[test]
    fn primal_identities_hold_on_stacked_triangulations(n in 4usize..80, seed in any::<u64>()) {
        let g = stacked_triangulation(n, seed).unwrap();
        let report = check_primal_constraints(&tally(&g).unwrap(), Variant::General);
        prop_assert!(report.is_ok(), "{:?}", report.err().map(|v| v.failed));
    }

    #[test]
    fn entropy_is_symmetric(q in 0.0f64..=1.0) {
        let h = binary_entropy(q).unwrap();
        prop_assert!((h - binary_entropy(1.0 - q).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn forest_bound_meets_the_crossing(beta in 1.2f64..7.0) {
        let fb = forest_bound(beta.log2()).unwrap();
        if fb.interior {
            prop_assert!(fb.crossing_residual.abs() <= 1e-8);
        }
        prop_assert!(fb.base <= 6.75 + 1e-9);
        let larger = forest_bound((beta * 1.1).log2()).unwrap();
        prop_assert!(larger.base >= fb.base);
    }
}

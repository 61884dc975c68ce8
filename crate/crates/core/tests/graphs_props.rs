use degenform::graphs::{
    automorphism_count, canonical_form, edge_orderings, enumerate_graphs, multiplicity_data, DecoratedGraph, Edge,
};
use degenform::rational::Rat;
use degenform::target::{fixtures, GradedBasis, TargetModel};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permuted(g: &DecoratedGraph, keys: &[u32]) -> DecoratedGraph {
    let n = g.vertices.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (keys[v % keys.len()], v));
    let mut to_new = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        to_new[old] = new;
    }
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| Edge { ends: [to_new[e.ends[0]], to_new[e.ends[1]]], weight: e.weight })
        .collect();
    edges.reverse();
    DecoratedGraph { vertices: order.iter().map(|&v| g.vertices[v].clone()).collect(), edges }
}

fn instance() -> impl Strategy<Value = (TargetModel, u32, u32, Vec<i64>)> {
    (any::<u64>(), 0..=1u32, 0..=2u32, prop::collection::vec(0..=3i64, 2)).prop_map(|(seed, g, n, b)| {
        let t = if seed % 3 == 0 {
            fixtures::two_lines(GradedBasis::point())
        } else {
            fixtures::random_target(&mut ChaCha8Rng::seed_from_u64(seed))
        };
        let beta = b[..t.class_rank].to_vec();
        (t, g, n, beta)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumerated_graphs_are_valid_and_distinct((t, g, n, beta) in instance()) {
        let graphs = enumerate_graphs(&t, g, n, &beta).unwrap();
        let mut forms: Vec<DecoratedGraph> = graphs.iter().map(canonical_form).collect();
        for gr in &graphs {
            prop_assert!(gr.validate(&t, g, n, &beta).is_ok(), "{}", gr);
        }
        forms.sort();
        forms.dedup();
        prop_assert_eq!(forms.len(), graphs.len());
        prop_assert_eq!(enumerate_graphs(&t, g, n, &beta).unwrap(), graphs);
    }

    #[test]
    fn canonical_form_ignores_labels((t, g, n, beta) in instance(), keys in prop::collection::vec(any::<u32>(), 1..6)) {
        for gr in enumerate_graphs(&t, g, n, &beta).unwrap() {
            let p = permuted(&gr, &keys);
            prop_assert_eq!(canonical_form(&p), canonical_form(&gr));
            prop_assert_eq!(automorphism_count(&p), automorphism_count(&gr));
        }
    }

    #[test]
    fn orderings_sum_to_weight_product_over_aut((t, g, n, beta) in instance()) {
        for gr in enumerate_graphs(&t, g, n, &beta).unwrap() {
            let orderings = edge_orderings(&gr).unwrap();
            let total: Rat = orderings.iter().map(|og| multiplicity_data(og).numeric_coeff).sum();
            let prod: BigInt = gr.edges.iter().map(|e| BigInt::from(e.weight)).product();
            let expected = if gr.edges.is_empty() {
                Rat::from_integer(1.into())
            } else {
                Rat::new(prod, automorphism_count(&gr))
            };
            prop_assert_eq!(total, expected);
            for og in &orderings {
                let m = multiplicity_data(og);
                prop_assert_eq!(&m.numeric_coeff, &(&m.cycle_coeff * &m.deg_phi));
            }
        }
    }
}

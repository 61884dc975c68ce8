use degenform::exactcones::{linalg, Cone, IntVec, Sublattice};
use num_bigint::BigInt;
use proptest::prelude::*;

fn cone_input() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=5usize).prop_flat_map(|rank| (Just(rank), prop::collection::vec(prop::collection::vec(-5i64..=5, rank), 0..=8)))
}

fn to_int(rows: &[Vec<i64>]) -> Vec<IntVec> {
    rows.iter().map(|r| linalg::int_vec(r)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_of_dual_has_same_rays((rank, gens) in cone_input()) {
        let c = Cone::from_generators(rank, to_int(&gens)).unwrap();
        prop_assume!(c.is_pointed());
        let back = c.dual().dual();
        prop_assert_eq!(back.rays().unwrap(), c.rays().unwrap());
    }

    #[test]
    fn generators_satisfy_inequalities((rank, gens) in cone_input()) {
        let c = Cone::from_generators(rank, to_int(&gens)).unwrap();
        let ineqs = c.inequalities();
        for g in c.generators() {
            for a in &ineqs {
                prop_assert!(linalg::dot(a, &g) >= BigInt::from(0));
            }
        }
        if c.is_full_dimensional() && c.is_pointed() {
            let rays = c.rays().unwrap();
            for a in &ineqs {
                let tight: Vec<IntVec> =
                    rays.iter().filter(|r| linalg::dot(a, r) == BigInt::from(0)).cloned().collect();
                prop_assert_eq!(linalg::rank(&tight), rank - 1);
            }
        }
    }

    #[test]
    fn saturation_is_idempotent_and_keeps_span((rank, rows) in cone_input()) {
        let rows = to_int(&rows);
        let independent: Vec<IntVec> = rows.iter().fold(Vec::new(), |mut acc, r| {
            let mut next = acc.clone();
            next.push(r.clone());
            if linalg::rank(&next) == next.len() {
                acc = next;
            }
            acc
        });
        let l = Sublattice::new(rank, independent.clone()).unwrap();
        let s = l.saturate();
        prop_assert_eq!(s.saturate(), s.clone());
        prop_assert_eq!(s.rank(), l.rank());
        let mut both = independent.clone();
        both.extend(s.basis().iter().cloned());
        prop_assert_eq!(linalg::rank(&both), l.rank());
        for b in &independent {
            prop_assert!(s.contains(b));
        }
    }

    #[test]
    fn lattice_points_match_nested_loops(
        gens in prop::collection::vec(prop::collection::vec(0i64..=3, 3), 1..=4),
        h_max in 0i64..=6,
    ) {
        let c = Cone::from_generators(3, to_int(&gens)).unwrap();
        let height = linalg::int_vec(&[1, 1, 1]);
        prop_assume!(c.is_pointed() && c.rays().unwrap().iter().all(|r| linalg::dot(&height, r) > BigInt::from(0)));
        let got = c.lattice_points_box(&height, &BigInt::from(h_max)).unwrap();
        let mut want = Vec::new();
        for x in 0..=h_max {
            for y in 0..=h_max - x {
                for z in 0..=h_max - x - y {
                    let p = linalg::int_vec(&[x, y, z]);
                    if c.contains(&p) {
                        want.push(p);
                    }
                }
            }
        }
        want.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        prop_assert_eq!(got_sorted, want);
    }
}

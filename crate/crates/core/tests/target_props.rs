use degenform::exactcones::linalg;
use degenform::rational::Rat;
use degenform::target::{
    dual_basis, fixtures, koszul_sign, BasisElement, GradedBasis, GradedClass, Side, Sign, Symbol,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn r(x: i64) -> Rat {
    Rat::from_integer(x.into())
}

/// A degree-preserving change of basis for the given degrees, as rows.
fn change(degrees: &[u32], entries: &[i64]) -> Option<Vec<Vec<Rat>>> {
    let n = degrees.len();
    let m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if degrees[i] == degrees[j] { r(entries[i * n + j]) } else { Rat::zero() })
                .collect()
        })
        .collect();
    (!linalg::determinant(&m).is_zero()).then_some(m)
}

fn transformed(b: &GradedBasis, a: &[Vec<Rat>]) -> GradedBasis {
    let p = b.pairing.as_ref().unwrap();
    let at = linalg::transpose(a, a.len());
    let p2 = linalg::mat_mul(&linalg::mat_mul(a, p), &at);
    let elements = b
        .elements
        .iter()
        .map(|e| BasisElement { name: format!("{}'", e.name), degree: e.degree })
        .collect();
    GradedBasis::with_pairing(elements, p2).unwrap()
}

fn bases() -> impl Strategy<Value = GradedBasis> {
    prop_oneof![Just(GradedBasis::projective_line()), Just(fixtures::odd_curve()), Just(GradedBasis::point())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_basis_pairs_to_identity(b in bases(), entries in prop::collection::vec(-3i64..=3, 16)) {
        let degrees: Vec<u32> = (0..b.len()).map(|i| b.degree(i)).collect();
        let Some(a) = change(&degrees, &entries) else { return Ok(()) };
        let b2 = transformed(&b, &a);
        let p = b2.pairing.as_ref().unwrap();
        let dual = dual_basis(&b2).unwrap();
        for (i, d) in dual.iter().enumerate() {
            for j in 0..b2.len() {
                let pairing: Rat = (0..b2.len()).map(|k| &d.coeffs[k] * &p[k][j]).sum();
                prop_assert_eq!(pairing, if i == j { Rat::one() } else { Rat::zero() });
            }
        }
    }

    #[test]
    fn diagonal_is_basis_independent(b in bases(), entries in prop::collection::vec(-3i64..=3, 16)) {
        let degrees: Vec<u32> = (0..b.len()).map(|i| b.degree(i)).collect();
        let Some(a) = change(&degrees, &entries) else { return Ok(()) };
        let b2 = transformed(&b, &a);
        let n = b.len();
        let diagonal = |basis: &GradedBasis, to_ref: &[Vec<Rat>]| -> Vec<Vec<Rat>> {
            let dual = dual_basis(basis).unwrap();
            let mut out = vec![vec![Rat::zero(); n]; n];
            for j in 0..n {
                let first: Vec<Rat> = (0..n).map(|l| to_ref[j][l].clone()).collect();
                let second: Vec<Rat> =
                    (0..n).map(|l| (0..n).map(|k| &dual[j].coeffs[k] * &to_ref[k][l]).sum()).collect();
                for x in 0..n {
                    for y in 0..n {
                        out[x][y] += &first[x] * &second[y];
                    }
                }
            }
            out
        };
        let id: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
        prop_assert_eq!(diagonal(&b, &id), diagonal(&b2, &a));
    }

    #[test]
    fn koszul_sign_composes(
        degrees in prop::collection::vec(0u32..=3, 0..=8),
        keys1 in prop::collection::vec(any::<u32>(), 8),
        keys2 in prop::collection::vec(any::<u32>(), 8),
    ) {
        let n = degrees.len();
        let w: Vec<Symbol> = (0..n).map(|i| Symbol { id: i, degree: degrees[i] }).collect();
        let shuffle = |word: &[Symbol], keys: &[u32]| {
            let mut idx: Vec<usize> = (0..word.len()).collect();
            idx.sort_by_key(|&i| (keys[i], i));
            idx.into_iter().map(|i| word[i].clone()).collect::<Vec<_>>()
        };
        let u = shuffle(&w, &keys1);
        let v = shuffle(&u, &keys2);
        let s = |a: &[Symbol], b: &[Symbol]| koszul_sign(a, b).unwrap();
        prop_assert_eq!(s(&w, &w), Sign::Plus);
        prop_assert_eq!(s(&w, &u).to_rat() * s(&u, &v).to_rat(), s(&w, &v).to_rat());
    }

    #[test]
    fn restriction_is_linear(
        x in prop::collection::vec(-4i64..=4, 4),
        y in prop::collection::vec(-4i64..=4, 4),
        a in -3i64..=3,
    ) {
        let t = fixtures::graded_two_lines(fixtures::odd_curve());
        let cx = GradedClass { coeffs: x.iter().map(|&v| r(v)).collect() };
        let cy = GradedClass { coeffs: y.iter().map(|&v| r(v)).collect() };
        for side in Side::BOTH {
            let lhs = t.restrict(side, &cx.scale(&r(a)).add(&cy)).unwrap();
            let rhs = t.restrict(side, &cx).unwrap().scale(&r(a)).add(&t.restrict(side, &cy).unwrap());
            prop_assert_eq!(lhs, rhs);
            for i in 0..4 {
                let img = t.restrict(side, &t.x_cohomology.basis_class(i)).unwrap();
                let deg = img.homogeneous_degree(&t.component(side).cohomology).unwrap();
                prop_assert!(deg.map_or(true, |d| d == t.x_cohomology.degree(i)));
            }
        }
    }
}

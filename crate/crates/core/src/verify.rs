//! Seeded invariant suites run by `degenform verify`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactcones::{find_lattice_isomorphism, linalg, Cone, ConeError};
use crate::graphs::{automorphism_count, edge_orderings, enumerate_graphs, factorial, multiplicity_from_weights};
use crate::rational::Rat;
use crate::target::{fixtures, koszul_sign, Sign, Symbol};
use crate::tropical::random::{random_curve_graph, random_half_pair, CurveParams};
use crate::tropical::{
    basic_dual_cone, glue_halves, half_dual_cone, split_cones, splitting_rays, tropicalize,
    verify_split_facet, TropicalError, ISOMORPHISM_BOUND,
};

pub const SUITES: &[&str] = &[
    "split-facet",
    "koszul",
    "bipartition",
    "multiplicity",
    "orderings",
    "glue-roundtrip",
    "dual-involution",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Instances abandoned because a search cap was hit.
    pub capped: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.capped.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{}: {status} (seed {}, {} checked, {} failed, {} capped)",
            self.suite,
            self.seed,
            self.checked,
            self.failures.len(),
            self.capped.len()
        )?;
        for m in self.failures.iter().chain(&self.capped) {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

struct Run {
    report: SuiteReport,
}

impl Run {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checked += 1;
        if !ok {
            self.report.failures.push(what());
        }
    }

    fn error(&mut self, e: TropicalError, what: String) {
        self.report.checked += 1;
        match e {
            TropicalError::Cone(ConeError::InstanceTooLarge(m)) => {
                self.report.capped.push(format!("{what}: {m}"))
            }
            e => self.report.failures.push(format!("{what}: {e}")),
        }
    }
}

/// Runs `suite` on `size` random instances drawn from `seed`. Returns `None`
/// for an unknown suite name.
pub fn run_suite(suite: &str, seed: u64, size: usize) -> Option<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = Run {
        report: SuiteReport {
            suite: suite.to_string(),
            seed,
            checked: 0,
            failures: Vec::new(),
            capped: Vec::new(),
        },
    };
    match suite {
        "split-facet" => split_facet(&mut rng, size, &mut run),
        "koszul" => koszul(&mut rng, size, &mut run),
        "bipartition" => bipartition(&mut rng, size, &mut run),
        "multiplicity" => multiplicity(&mut rng, size, &mut run),
        "orderings" => orderings(&mut rng, size, &mut run),
        "glue-roundtrip" => glue_roundtrip(&mut rng, size, &mut run),
        "dual-involution" => dual_involution(&mut rng, size, &mut run),
        _ => return None,
    }
    Some(run.report)
}

fn split_facet(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    let mut done = 0;
    while done < size {
        let cg = random_curve_graph(rng, CurveParams::default());
        let rays = match splitting_rays(&basic_dual_cone(&cg)) {
            Ok(r) => r,
            Err(e) => {
                run.error(e, cg.to_json());
                done += 1;
                continue;
            }
        };
        for ray in rays.into_iter().take(size - done) {
            done += 1;
            match verify_split_facet(&cg, &ray.ray) {
                Ok(w) => run.check(w.found(), || format!("no witness for ray {:?} of {}", ray.ray, cg.to_json())),
                Err(e) => run.error(e, cg.to_json()),
            }
        }
    }
}

/// Sign by sorting with adjacent transpositions.
fn bubble_sign(degrees: &[u32], perm: &[usize]) -> Sign {
    let mut target_pos = vec![0usize; perm.len()];
    for (k, &i) in perm.iter().enumerate() {
        target_pos[i] = k;
    }
    let mut word: Vec<usize> = (0..perm.len()).collect();
    let mut odd = false;
    for pass in 0..word.len() {
        for k in 0..word.len().saturating_sub(1 + pass) {
            if target_pos[word[k]] > target_pos[word[k + 1]] {
                if degrees[word[k]] % 2 == 1 && degrees[word[k + 1]] % 2 == 1 {
                    odd = !odd;
                }
                word.swap(k, k + 1);
            }
        }
    }
    Sign::from_parity(odd)
}

fn koszul(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    for _ in 0..size {
        let len = rng.gen_range(0..=8usize);
        let degrees: Vec<u32> = (0..len).map(|_| rng.gen_range(0..=3)).collect();
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(rng);
        let global: Vec<Symbol> = (0..len).map(|i| Symbol { id: i, degree: degrees[i] }).collect();
        let regrouped: Vec<Symbol> = perm.iter().map(|&i| global[i].clone()).collect();
        let expected = bubble_sign(&degrees, &perm);
        let got = koszul_sign(&global, &regrouped);
        run.check(got.as_ref() == Ok(&expected), || {
            format!("degrees {degrees:?} perm {perm:?}: got {got:?}, expected {expected}")
        });
    }
}

fn bipartition(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    for _ in 0..size {
        let cg = random_curve_graph(rng, CurveParams::default());
        let b = basic_dual_cone(&cg);
        let rays = match splitting_rays(&b) {
            Ok(r) => r,
            Err(e) => {
                run.error(e, cg.to_json());
                continue;
            }
        };
        for ray in rays {
            let curve = match tropicalize(&b, &ray.ray) {
                Ok(c) => c,
                Err(e) => {
                    run.error(e, cg.to_json());
                    continue;
                }
            };
            let ends = curve.positions.iter().all(|x| x.is_zero() || *x == curve.l);
            let mut gcd = BigInt::zero();
            let mut scaled = true;
            for &e in &ray.splitting_nodes {
                let w = BigInt::from(cg.edges[e].weight().unwrap_or(0));
                scaled &= w * &ray.lengths[e] == ray.l;
                gcd = gcd.gcd(&ray.lengths[e]);
            }
            run.check(ends && scaled && gcd.is_one(), || {
                format!("ray {:?} of {}: ends {ends}, w·l_e = l {scaled}, gcd {gcd}", ray.ray, cg.to_json())
            });
        }
    }
}

fn multiplicity(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    for _ in 0..size {
        let len = rng.gen_range(1..=5usize);
        let weights: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=12)).collect();
        let m = multiplicity_from_weights(&weights, false);
        let mut l: u64 = 1;
        let mut prod: u64 = 1;
        for &w in &weights {
            l = l.lcm(&(w as u64));
            prod *= w as u64;
        }
        let fact: u64 = (1..=len as u64).product();
        let r = |p: u64, q: u64| Rat::new(p.into(), q.into());
        let ok = m.l == BigInt::from(l)
            && m.deg_phi == r(prod, l)
            && m.deg_f == r(fact, l)
            && m.numeric_coeff == &m.cycle_coeff * &m.deg_phi
            && m.numeric_coeff == r(prod, fact);
        run.check(ok, || format!("weights {weights:?}: {m:?}"));
    }
}

fn orderings(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    let mut done = 0;
    while done < size {
        let t = fixtures::random_target(rng);
        let g = rng.gen_range(0..=1u32);
        let n = rng.gen_range(0..=2u32);
        let beta: Vec<i64> = (0..t.class_rank).map(|_| rng.gen_range(0..=2)).collect();
        let graphs = match enumerate_graphs(&t, g, n, &beta) {
            Ok(gs) => gs,
            Err(e) => {
                run.check(false, || format!("enumeration failed: {e}"));
                done += 1;
                continue;
            }
        };
        for graph in graphs {
            if done >= size {
                break;
            }
            done += 1;
            match edge_orderings(&graph) {
                Ok(os) => {
                    let lhs = BigInt::from(os.len()) * automorphism_count(&graph);
                    let rhs = factorial(graph.edge_count());
                    run.check(lhs == rhs, || format!("{graph}: {} orderings × |Aut| = {lhs} ≠ {rhs}", os.len()));
                }
                Err(e) => run.check(false, || format!("{graph}: {e}")),
            }
        }
    }
}

fn glue_roundtrip(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    for _ in 0..size {
        let (h1, h2) = random_half_pair(rng, CurveParams::default());
        let glued = match glue_halves(&h1, &h2) {
            Ok(g) => g,
            Err(e) => {
                run.error(e, format!("{} | {}", h1.to_json(), h2.to_json()));
                continue;
            }
        };
        let weights: Vec<u32> = h1.half_edges.iter().map(|h| h.weight).collect();
        let l_ok = glued.l == crate::graphs::lcm_of(&weights);
        let split = match split_cones(&glued.curve, &glued.rho) {
            Ok(s) => s,
            Err(e) => {
                run.error(e, glued.curve.to_json());
                continue;
            }
        };
        let mut same = true;
        for (half, side) in [(&h1, &split.sides[0]), (&h2, &split.sides[1])] {
            let iso = half_dual_cone(half)
                .and_then(|direct| Ok(find_lattice_isomorphism(&direct, &side.cone, ISOMORPHISM_BOUND)?));
            match iso {
                Ok(m) => same &= m.is_some(),
                Err(e) => {
                    run.error(e, half.to_json());
                    same = false;
                }
            }
        }
        run.check(l_ok && same, || {
            format!("{} | {}: l matches {l_ok}, cones match {same}", h1.to_json(), h2.to_json())
        });
    }
}

fn dual_involution(rng: &mut ChaCha8Rng, size: usize, run: &mut Run) {
    for _ in 0..size {
        let rank = rng.gen_range(1..=4usize);
        let count = rng.gen_range(0..=5usize);
        let gens: Vec<Vec<i64>> = (0..count)
            .map(|_| (0..rank).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let c = Cone::from_generators(rank, gens.iter().map(|g| linalg::int_vec(g)).collect())
            .expect("lengths match");
        run.check(c.dual().dual() == c, || format!("rank {rank} generators {gens:?}"));
    }
}

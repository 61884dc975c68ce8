//! Double description: converts `{x : a·x >= 0 for all rows a}` into a
//! lineality basis plus extreme rays.
//!
//! Constraints are inserted one at a time. While the current cone still has a
//! lineality direction `v` with `a·v != 0`, that direction becomes a ray and the
//! remaining lineality and rays are shifted into `a^⊥`. Otherwise the classical
//! step applies: rays on the positive side survive and adjacent positive /
//! negative pairs are combined. Adjacency uses the combinatorial test, which is
//! exact because the ray list is kept minimal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::lattice;
use super::linalg::{self, IntVec};

#[derive(Clone, Debug)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(bits: usize) -> Self {
        ZeroSet(vec![0; bits.div_ceil(64).max(1)])
    }
    fn full(count: usize, bits: usize) -> Self {
        let mut z = Self::new(bits);
        for i in 0..count {
            z.insert(i);
        }
        z
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersect(&self, other: &Self) -> Self {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Debug)]
struct Ray {
    v: IntVec,
    zeros: ZeroSet,
}

/// Canonical description of a polyhedral cone: a Hermite basis of the
/// lineality space and the primitive extreme rays of the pointed part,
/// projected orthogonally to the lineality space and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Description {
    pub lineality: Vec<IntVec>,
    pub rays: Vec<IntVec>,
}

impl Description {
    /// Generators of the cone: rays together with `±` each lineality vector,
    /// sorted lexicographically.
    pub fn generators(&self) -> Vec<IntVec> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out.sort_by(|a, b| linalg::lex_cmp(a, b));
        out
    }
}

/// Solves `{x ∈ R^rank : a·x >= 0 ∀ a ∈ constraints}`.
pub fn solve(rank: usize, constraints: &[IntVec]) -> Description {
    let m = constraints.len();
    let mut lineality: Vec<IntVec> = linalg::identity(rank);
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in constraints.iter().enumerate() {
        if linalg::is_zero(a) {
            for r in rays.iter_mut() {
                r.zeros.insert(k);
            }
            continue;
        }
        let pivot = lineality
            .iter()
            .position(|l| !linalg::dot(a, l).is_zero());
        if let Some(p) = pivot {
            let mut v = lineality.remove(p);
            let mut av = linalg::dot(a, &v);
            if av.is_negative() {
                v = v.iter().map(|x| -x).collect();
                av = -av;
            }
            for l in lineality.iter_mut() {
                let al = linalg::dot(a, l);
                if !al.is_zero() {
                    *l = linalg::primitive(&linalg::combine(&av, l, &-al, &v));
                }
            }
            for r in rays.iter_mut() {
                let ar = linalg::dot(a, &r.v);
                if !ar.is_zero() {
                    r.v = linalg::primitive(&linalg::combine(&av, &r.v, &-ar, &v));
                }
                r.zeros.insert(k);
            }
            rays.push(Ray {
                v: linalg::primitive(&v),
                zeros: ZeroSet::full(k, m),
            });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| linalg::dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();

        let mut next: Vec<Ray> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if values[i].is_zero() {
                let mut r = r.clone();
                r.zeros.insert(k);
                next.push(r);
            } else if values[i].is_positive() {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersect(&rays[n].zeros);
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let v = linalg::combine(&values[p], &rays[n].v, &-values[n].clone(), &rays[p].v);
                let mut zeros = common;
                zeros.insert(k);
                next.push(Ray {
                    v: linalg::primitive(&v),
                    zeros,
                });
            }
        }
        rays = next;
    }

    canonicalize(rank, lineality, rays.into_iter().map(|r| r.v).collect())
}

fn canonicalize(rank: usize, lineality: Vec<IntVec>, rays: Vec<IntVec>) -> Description {
    let lineality = lattice::saturated_basis(&lineality, rank);
    let mut out: Vec<IntVec> = if lineality.is_empty() {
        rays
    } else {
        rays.iter()
            .map(|r| project_out(r, &lineality))
            .filter(|r| !linalg::is_zero(r))
            .collect()
    };
    out.sort_by(|a, b| linalg::lex_cmp(a, b));
    out.dedup();
    Description {
        lineality,
        rays: out,
    }
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`,
/// rescaled to a primitive integer vector.
fn project_out(v: &[BigInt], basis: &[IntVec]) -> IntVec {
    let b: Vec<Vec<BigRational>> = basis.iter().map(|x| linalg::to_rat(x)).collect();
    let gram: Vec<Vec<BigRational>> = b
        .iter()
        .map(|x| b.iter().map(|y| linalg::rat_dot(x, y)).collect())
        .collect();
    let inv = linalg::inverse(&gram).expect("lineality basis is independent");
    let vr = linalg::to_rat(v);
    let rhs: Vec<BigRational> = b.iter().map(|x| linalg::rat_dot(x, &vr)).collect();
    let coeffs: Vec<BigRational> = inv
        .iter()
        .map(|row| linalg::rat_dot(row, &rhs))
        .collect();
    let mut out = vr;
    for (c, bv) in coeffs.iter().zip(&b) {
        for (o, x) in out.iter_mut().zip(bv) {
            *o -= c * x;
        }
    }
    linalg::clear_denominators(&out)
}

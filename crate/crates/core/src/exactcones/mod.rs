//! Exact rational polyhedral cones and integer lattices.
//!
//! A [`Cone`] is stored as whichever description it was built from
//! (generators or inequalities). The other description, and the canonical
//! form of both, are computed on first request and cached in a `OnceLock`,
//! so cones can be shared across threads.

pub mod dd;
pub mod lattice;
pub mod linalg;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use dd::Description;
pub use lattice::Sublattice;
pub use linalg::IntVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone contains a line")]
    ContainsLine,
    #[error("vector of length {found} in a rank-{expected} lattice")]
    LengthMismatch { expected: usize, found: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("covector does not define a facet of the cone")]
    NotADualRay,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("height functional does not bound the cone")]
    UnboundedSlice,
}

#[derive(Clone, Debug)]
enum Seed {
    Generators(Vec<IntVec>),
    Inequalities(Vec<IntVec>),
}

#[derive(Debug)]
pub struct Cone {
    rank: usize,
    seed: Seed,
    primal: OnceLock<Description>,
    dual: OnceLock<Description>,
}

impl Clone for Cone {
    fn clone(&self) -> Self {
        Cone {
            rank: self.rank,
            seed: self.seed.clone(),
            primal: self.primal.clone(),
            dual: self.dual.clone(),
        }
    }
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.description() == other.description()
    }
}

impl Eq for Cone {}

fn check_lengths(rank: usize, vs: &[IntVec]) -> Result<(), ConeError> {
    match vs.iter().find(|v| v.len() != rank) {
        Some(v) => Err(ConeError::LengthMismatch {
            expected: rank,
            found: v.len(),
        }),
        None => Ok(()),
    }
}

impl Cone {
    /// The cone generated by `generators` (non-negative combinations).
    pub fn from_generators(rank: usize, generators: Vec<IntVec>) -> Result<Self, ConeError> {
        check_lengths(rank, &generators)?;
        let gens = generators
            .iter()
            .filter(|g| !linalg::is_zero(g))
            .map(|g| linalg::primitive(g))
            .collect();
        Ok(Cone {
            rank,
            seed: Seed::Generators(gens),
            primal: OnceLock::new(),
            dual: OnceLock::new(),
        })
    }

    /// `{x : a·x >= 0 for every a in inequalities}`.
    pub fn from_inequalities(rank: usize, inequalities: Vec<IntVec>) -> Result<Self, ConeError> {
        check_lengths(rank, &inequalities)?;
        let ineqs = inequalities
            .iter()
            .filter(|g| !linalg::is_zero(g))
            .map(|g| linalg::primitive(g))
            .collect();
        Ok(Cone {
            rank,
            seed: Seed::Inequalities(ineqs),
            primal: OnceLock::new(),
            dual: OnceLock::new(),
        })
    }

    pub fn zero(rank: usize) -> Self {
        Cone::from_generators(rank, Vec::new()).expect("no vectors")
    }

    pub fn orthant(rank: usize) -> Self {
        Cone::from_generators(rank, linalg::identity(rank)).expect("square identity")
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    /// Canonical description of the cone itself.
    pub fn description(&self) -> &Description {
        self.primal.get_or_init(|| match &self.seed {
            Seed::Inequalities(h) => dd::solve(self.rank, h),
            Seed::Generators(_) => dd::solve(self.rank, &self.dual_description().generators()),
        })
    }

    /// Canonical description of the dual cone.
    pub fn dual_description(&self) -> &Description {
        self.dual.get_or_init(|| match &self.seed {
            Seed::Generators(g) => dd::solve(self.rank, g),
            Seed::Inequalities(_) => dd::solve(self.rank, &self.description().generators()),
        })
    }

    /// Canonical generators: extreme rays plus `±` a lineality basis.
    pub fn generators(&self) -> Vec<IntVec> {
        self.description().generators()
    }

    /// Canonical inequalities: facet normals plus `±` an equation basis.
    pub fn inequalities(&self) -> Vec<IntVec> {
        self.dual_description().generators()
    }

    pub fn lineality(&self) -> &[IntVec] {
        &self.description().lineality
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality().is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rank - self.dual_description().lineality.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dual_description().lineality.is_empty()
    }

    /// `{φ : φ(x) >= 0 for all x in self}` with both descriptions populated.
    pub fn dual(&self) -> Cone {
        let primal = self.description().clone();
        let dual = self.dual_description().clone();
        Cone {
            rank: self.rank,
            seed: Seed::Generators(primal.generators()),
            primal: OnceLock::from(dual),
            dual: OnceLock::from(primal),
        }
    }

    /// Primitive generators of the rank-one faces, lexicographically sorted.
    pub fn rays(&self) -> Result<Vec<IntVec>, ConeError> {
        let d = self.description();
        if !d.lineality.is_empty() {
            return Err(ConeError::ContainsLine);
        }
        Ok(d.rays.clone())
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.rank
            && self
                .inequalities()
                .iter()
                .all(|a| !linalg::dot(a, x).is_negative())
    }

    /// The face `self ∩ rho^⊥`, which must be a facet.
    pub fn facet_of_ray(&self, rho: &[BigInt]) -> Result<Cone, ConeError> {
        if rho.len() != self.rank {
            return Err(ConeError::LengthMismatch {
                expected: self.rank,
                found: rho.len(),
            });
        }
        let gens = self.generators();
        if gens.iter().any(|g| linalg::dot(rho, g).is_negative()) {
            return Err(ConeError::NotADualRay);
        }
        let face: Vec<IntVec> = gens
            .into_iter()
            .filter(|g| linalg::dot(rho, g).is_zero())
            .collect();
        let face = Cone::from_generators(self.rank, face)?;
        if face.dim() + 1 != self.dim() {
            return Err(ConeError::NotADualRay);
        }
        Ok(face)
    }

    /// Block direct sum `self × other` in `Z^(a+b)`.
    pub fn product(&self, other: &Cone) -> Cone {
        let (a, b) = (self.rank, other.rank);
        let pad = |v: &IntVec, left: bool| -> IntVec {
            let mut out = vec![BigInt::zero(); a + b];
            let off = if left { 0 } else { a };
            for (i, x) in v.iter().enumerate() {
                out[off + i] = x.clone();
            }
            out
        };
        let mk = |x: &Description, y: &Description| Description {
            lineality: x
                .lineality
                .iter()
                .map(|v| pad(v, true))
                .chain(y.lineality.iter().map(|v| pad(v, false)))
                .collect(),
            rays: {
                let mut r: Vec<IntVec> = x
                    .rays
                    .iter()
                    .map(|v| pad(v, true))
                    .chain(y.rays.iter().map(|v| pad(v, false)))
                    .collect();
                r.sort_by(|p, q| linalg::lex_cmp(p, q));
                r
            },
        };
        // block sums of Hermite bases stay in Hermite form
        let primal = mk(self.description(), other.description());
        let dual = mk(self.dual_description(), other.dual_description());
        Cone {
            rank: a + b,
            seed: Seed::Generators(primal.generators()),
            primal: OnceLock::from(primal),
            dual: OnceLock::from(dual),
        }
    }

    /// Re-expresses the cone in a basis of its own saturated lattice
    /// `span(self) ∩ Z^n`. Returns the basis (rows, in ambient coordinates)
    /// and the full-dimensional cone in `Z^dim`.
    pub fn intrinsic(&self) -> (Vec<IntVec>, Cone) {
        let gens = self.generators();
        let basis = lattice::saturated_basis(&gens, self.rank);
        let coords = express_all(&basis, &gens);
        let cone = Cone::from_generators(basis.len(), coords).expect("coordinates match basis");
        (basis, cone)
    }

    /// All lattice points `x` of the cone with `height·x <= h_max`, in
    /// lexicographic order.
    pub fn lattice_points_box(
        &self,
        height: &[BigInt],
        h_max: &BigInt,
    ) -> Result<Vec<IntVec>, ConeError> {
        if height.len() != self.rank {
            return Err(ConeError::LengthMismatch {
                expected: self.rank,
                found: height.len(),
            });
        }
        let rays = self.rays().map_err(|_| ConeError::UnboundedSlice)?;
        if h_max.is_negative() {
            return Ok(Vec::new());
        }
        let mut lo = vec![BigInt::zero(); self.rank];
        let mut hi = vec![BigInt::zero(); self.rank];
        for r in &rays {
            let h = linalg::dot(height, r);
            if !h.is_positive() {
                return Err(ConeError::UnboundedSlice);
            }
            for j in 0..self.rank {
                let t = BigRational::new(h_max * &r[j], h.clone());
                let (f, c) = (t.floor().to_integer(), t.ceil().to_integer());
                if f < lo[j] {
                    lo[j] = f;
                }
                if c > hi[j] {
                    hi[j] = c;
                }
            }
        }
        let ineqs = self.inequalities();
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if !linalg::dot(height, &x).gt(h_max)
                && ineqs.iter().all(|a| !linalg::dot(a, &x).is_negative())
            {
                out.push(x.clone());
            }
            // odometer, last coordinate fastest => lexicographic order
            let mut j = self.rank;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                if x[j] < hi[j] {
                    x[j] += BigInt::one();
                    for t in j + 1..self.rank {
                        x[t] = lo[t].clone();
                    }
                    break;
                }
            }
        }
    }
}

/// Coordinates of each vector of `vs` in the lattice basis `basis`.
pub fn express_all(basis: &[IntVec], vs: &[IntVec]) -> Vec<IntVec> {
    let b: Vec<Vec<BigRational>> = basis.iter().map(|x| linalg::to_rat(x)).collect();
    vs.iter()
        .map(|v| {
            let y = linalg::solve_in_rows(&b, &linalg::to_rat(v)).expect("vector lies in span");
            linalg::as_integral(&y).expect("basis spans a saturated lattice")
        })
        .collect()
}

fn factorial_capped(n: usize, cap: u128) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k).min(cap.saturating_add(1)))
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128))
}

/// Searches a unimodular `M` with `M·a = b` (acting on column vectors) that
/// maps the rays of `a` bijectively onto the rays of `b`. The number of ray
/// matchings tried is capped at `bound!`.
pub fn find_lattice_isomorphism(
    a: &Cone,
    b: &Cone,
    bound: usize,
) -> Result<Option<Vec<IntVec>>, ConeError> {
    if a.rank != b.rank {
        return Err(ConeError::RankMismatch(a.rank, b.rank));
    }
    let n = a.rank;
    let rays_a = a.rays()?;
    let rays_b = b.rays()?;
    if rays_a.len() != rays_b.len() || a.dim() != b.dim() {
        return Ok(None);
    }
    let d = a.dim();
    let cap = factorial_capped(bound, u128::MAX - 1);
    if falling_factorial(rays_a.len(), d) > cap {
        return Err(ConeError::InstanceTooLarge(format!(
            "{} rays in dimension {d} exceed the {bound}! matching cap",
            rays_a.len()
        )));
    }

    let (basis_a, ra) = lattice::adapted_basis(&rays_a, n);
    let (basis_b, rb) = lattice::adapted_basis(&rays_b, n);
    debug_assert_eq!(ra, d);
    debug_assert_eq!(rb, d);
    let ya: Vec<IntVec> = express_all(&basis_a, &rays_a)
        .into_iter()
        .map(|v| v[..d].to_vec())
        .collect();
    let yb: Vec<IntVec> = express_all(&basis_b, &rays_b)
        .into_iter()
        .map(|v| v[..d].to_vec())
        .collect();
    let yb_set: std::collections::BTreeSet<IntVec> = yb.iter().cloned().collect();

    // facet incidence counts are preserved by any isomorphism
    let incidence = |c: &Cone, rays: &[IntVec]| -> Vec<usize> {
        let facets = c.dual_description().rays.clone();
        rays.iter()
            .map(|r| facets.iter().filter(|f| linalg::dot(f, r).is_zero()).count())
            .collect()
    };
    let inc_a = incidence(a, &rays_a);
    let inc_b = incidence(b, &rays_b);
    let mut sa = inc_a.clone();
    let mut sb = inc_b.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(None);
    }

    // greedy independent subset of a's rays
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..ya.len() {
        let mut trial: Vec<IntVec> = chosen.iter().map(|&c| ya[c].clone()).collect();
        trial.push(ya[i].clone());
        if linalg::rank(&trial) == trial.len() {
            chosen.push(i);
        }
        if chosen.len() == d {
            break;
        }
    }
    let src: Vec<Vec<BigRational>> = chosen.iter().map(|&i| linalg::to_rat(&ya[i])).collect();
    let src_inv = if d == 0 {
        Vec::new()
    } else {
        linalg::inverse(&src).expect("independent rays")
    };

    let mut assignment: Vec<usize> = Vec::with_capacity(d);
    let mut used = vec![false; yb.len()];
    let found = search(
        &chosen,
        &inc_a,
        &inc_b,
        &ya,
        &yb,
        &yb_set,
        &src_inv,
        d,
        &mut assignment,
        &mut used,
    );
    let Some(block) = found else {
        return Ok(None);
    };

    // row convention: x_b = x_a · V_a · diag(block, I) · T_b, where T_a rows
    // are basis_a and V_a = T_a^{-1}
    let ta: Vec<Vec<BigRational>> = basis_a.iter().map(|x| linalg::to_rat(x)).collect();
    let va = linalg::inverse(&ta).expect("unimodular basis");
    let mut mid = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            mid[i][j] = if i < d && j < d {
                block[i][j].clone()
            } else if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            };
        }
    }
    let tb: Vec<Vec<BigRational>> = basis_b.iter().map(|x| linalg::to_rat(x)).collect();
    let r = linalg::mat_mul(&linalg::mat_mul(&va, &mid), &tb);
    let m: Vec<IntVec> = linalg::transpose(&r, n)
        .iter()
        .map(|row| linalg::as_integral(row).expect("integral by construction"))
        .collect();
    Ok(Some(m))
}

#[allow(clippy::too_many_arguments)]
fn search(
    chosen: &[usize],
    inc_a: &[usize],
    inc_b: &[usize],
    ya: &[IntVec],
    yb: &[IntVec],
    yb_set: &std::collections::BTreeSet<IntVec>,
    src_inv: &[Vec<BigRational>],
    d: usize,
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<Vec<Vec<BigRational>>> {
    if assignment.len() == d {
        let dst: Vec<Vec<BigRational>> = assignment.iter().map(|&j| linalg::to_rat(&yb[j])).collect();
        let block = if d == 0 {
            Vec::new()
        } else {
            linalg::mat_mul(src_inv, &dst)
        };
        if block.iter().flatten().any(|x| !x.is_integer()) {
            return None;
        }
        if d > 0 && linalg::determinant(&block).abs() != BigRational::one() {
            return None;
        }
        let ok = ya.iter().all(|y| {
            let img: Vec<BigRational> = (0..d)
                .map(|j| (0..d).map(|t| BigRational::from_integer(y[t].clone()) * &block[t][j]).sum())
                .collect();
            linalg::as_integral(&img).is_some_and(|v| yb_set.contains(&v))
        });
        return ok.then_some(block);
    }
    let i = chosen[assignment.len()];
    for j in 0..yb.len() {
        if used[j] || inc_a[i] != inc_b[j] {
            continue;
        }
        used[j] = true;
        assignment.push(j);
        let r = search(chosen, inc_a, inc_b, ya, yb, yb_set, src_inv, d, assignment, used);
        assignment.pop();
        used[j] = false;
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Applies a matrix (rows) to a column vector.
pub fn apply(m: &[IntVec], x: &[BigInt]) -> IntVec {
    m.iter().map(|row| linalg::dot(row, x)).collect()
}

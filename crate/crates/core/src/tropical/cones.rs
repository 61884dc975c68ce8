//! Basic dual cones, splitting rays, split cones, the facet check and gluing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CurveEdge, CurveGraph, CurveHalfEdge, EdgeKind, TropicalError, VertexType};
use crate::exactcones::{express_all, find_lattice_isomorphism, linalg, Cone, IntVec};
use crate::graphs::lcm_of;
use crate::rational::Rat;
use crate::target::Side;

/// Cap passed to the lattice-isomorphism search (as a factorial).
pub const ISOMORPHISM_BOUND: usize = 10;

/// The dual basic monoid as a cone in coordinates `(x_V, l_e, l)`.
#[derive(Clone, Debug)]
pub struct BasicMonoidDual {
    pub curve: CurveGraph,
    pub cone: Cone,
    pub labels: Vec<String>,
    /// Covector reading `l`.
    pub one: IntVec,
    /// Per edge, the covector reading `l_e`; `None` when the coordinate was
    /// removed by [`decompose_q0`].
    pub q: Vec<Option<IntVec>>,
}

impl BasicMonoidDual {
    pub fn rank(&self) -> usize {
        self.one.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.curve.vertices.len()
    }
}

fn unit(rank: usize, i: usize) -> IntVec {
    let mut v = vec![BigInt::zero(); rank];
    v[i] = BigInt::one();
    v
}

fn push_equation(ineqs: &mut Vec<IntVec>, eq: IntVec) {
    ineqs.push(eq.iter().map(|x| -x).collect());
    ineqs.push(eq);
}

fn build(cg: &CurveGraph, keep_contracted: bool) -> BasicMonoidDual {
    let nv = cg.vertices.len();
    let mut labels: Vec<String> = (0..nv).map(|v| format!("x{v}")).collect();
    let mut coord = Vec::with_capacity(cg.edges.len());
    for (i, e) in cg.edges.iter().enumerate() {
        if keep_contracted || e.weight().is_some() {
            coord.push(Some(labels.len()));
            labels.push(format!("l{i}"));
        } else {
            coord.push(None);
        }
    }
    let li = labels.len();
    labels.push("l".into());
    let rank = labels.len();

    let mut ineqs = Vec::new();
    for (v, vx) in cg.vertices.iter().enumerate() {
        match vx.kind {
            VertexType::Rigid1 => push_equation(&mut ineqs, unit(rank, v)),
            VertexType::Rigid2 => {
                let mut eq = unit(rank, v);
                eq[li] = BigInt::from(-1);
                push_equation(&mut ineqs, eq);
            }
            VertexType::Free => {
                ineqs.push(unit(rank, v));
                let mut up = unit(rank, li);
                up[v] = BigInt::from(-1);
                ineqs.push(up);
            }
        }
    }
    for (e, c) in cg.edges.iter().zip(&coord) {
        let [a, b] = e.ends;
        let mut eq = vec![BigInt::zero(); rank];
        eq[b] += BigInt::one();
        eq[a] -= BigInt::one();
        if let (EdgeKind::Weighted { weight }, Some(c)) = (e.kind, c) {
            eq[*c] = BigInt::from(-(weight as i64));
        }
        if !linalg::is_zero(&eq) {
            push_equation(&mut ineqs, eq);
        }
        if let Some(c) = c {
            ineqs.push(unit(rank, *c));
        }
    }
    ineqs.push(unit(rank, li));
    BasicMonoidDual {
        curve: cg.clone(),
        cone: Cone::from_inequalities(rank, ineqs).expect("lengths agree"),
        labels,
        one: unit(rank, li),
        q: coord.iter().map(|c| c.map(|c| unit(rank, c))).collect(),
    }
}

pub fn basic_dual_cone(cg: &CurveGraph) -> BasicMonoidDual {
    build(cg, true)
}

/// Drops the contracted-edge coordinates, returning the reduced cone and the
/// number of free summands removed.
pub fn decompose_q0(b: &BasicMonoidDual) -> (BasicMonoidDual, usize) {
    let removed = b
        .curve
        .edges
        .iter()
        .zip(&b.q)
        .filter(|(e, q)| e.weight().is_none() && q.is_some())
        .count();
    (build(&b.curve, false), removed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingRay {
    pub ray: IntVec,
    pub l: BigInt,
    /// `l_e` per edge of the curve graph (zero for removed coordinates).
    pub lengths: Vec<BigInt>,
    pub splitting_nodes: Vec<usize>,
}

fn lengths_of(b: &BasicMonoidDual, ray: &[BigInt]) -> Vec<BigInt> {
    b.q.iter()
        .map(|q| q.as_ref().map_or(BigInt::zero(), |q| linalg::dot(q, ray)))
        .collect()
}

/// Rays of the cone with `l > 0`, in the cone's ray order.
pub fn splitting_rays(b: &BasicMonoidDual) -> Result<Vec<SplittingRay>, TropicalError> {
    let mut out = Vec::new();
    for ray in b.cone.rays()? {
        let l = linalg::dot(&b.one, &ray);
        if !l.is_positive() {
            continue;
        }
        let lengths = lengths_of(b, &ray);
        let splitting_nodes = (0..lengths.len()).filter(|&e| !lengths[e].is_zero()).collect();
        out.push(SplittingRay {
            ray,
            l,
            lengths,
            splitting_nodes,
        });
    }
    Ok(out)
}

/// An integral tropical curve `h: Γ_C → [0, l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    pub positions: Vec<BigInt>,
    pub lengths: Vec<BigInt>,
    pub l: BigInt,
}

impl TropicalCurve {
    /// Side of each vertex: `Some(One)` at 0, `Some(Two)` at `l`, `None`
    /// strictly inside.
    pub fn sides(&self) -> Vec<Option<Side>> {
        self.positions
            .iter()
            .map(|x| {
                if x.is_zero() {
                    Some(Side::One)
                } else if *x == self.l {
                    Some(Side::Two)
                } else {
                    None
                }
            })
            .collect()
    }
}

pub fn tropicalize(b: &BasicMonoidDual, rho: &[BigInt]) -> Result<TropicalCurve, TropicalError> {
    let rays = b.cone.rays()?;
    if !rays.iter().any(|r| r.as_slice() == rho) {
        return Err(TropicalError::NotARay("vector is not a primitive ray generator".into()));
    }
    let l = linalg::dot(&b.one, rho);
    if !l.is_positive() {
        return Err(TropicalError::NotARay("ray has l = 0".into()));
    }
    Ok(TropicalCurve {
        positions: rho[..b.vertex_count()].to_vec(),
        lengths: lengths_of(b, rho),
        l,
    })
}

/// The cone of tropical curves on one half: positions in `[0, ∞)` measured
/// from the splitting side (side 2 reflected), plus compact edge lengths.
pub fn half_dual_cone(half: &CurveGraph) -> Result<Cone, TropicalError> {
    let side = half
        .side
        .ok_or_else(|| TropicalError::Invalid("half curve graph without side".into()))?;
    let nv = half.vertices.len();
    let rank = nv + half.edges.len();
    let mut ineqs = Vec::new();
    for (v, vx) in half.vertices.iter().enumerate() {
        match vx.kind {
            VertexType::Free => ineqs.push(unit(rank, v)),
            k if k == VertexType::rigid(side) => push_equation(&mut ineqs, unit(rank, v)),
            _ => {
                return Err(TropicalError::Invalid(format!(
                    "side-{side} half contains a vertex of the other side"
                )))
            }
        }
    }
    for (i, e) in half.edges.iter().enumerate() {
        let c = nv + i;
        let [t, h] = e.ends;
        let mut eq = vec![BigInt::zero(); rank];
        // side 1: y_h − y_t = w l_e; side 2 (y = l − x): y_t − y_h = w l_e
        let (hi, lo) = match side {
            Side::One => (h, t),
            Side::Two => (t, h),
        };
        eq[hi] += BigInt::one();
        eq[lo] -= BigInt::one();
        if let EdgeKind::Weighted { weight } = e.kind {
            eq[c] = BigInt::from(-(weight as i64));
        }
        if !linalg::is_zero(&eq) {
            push_equation(&mut ineqs, eq);
        }
        ineqs.push(unit(rank, c));
    }
    if rank == 0 {
        return Ok(Cone::zero(0));
    }
    Ok(Cone::from_inequalities(rank, ineqs)?)
}

#[derive(Clone, Debug)]
pub struct SideCone {
    pub side: Side,
    /// Indices of the vertices in the original curve graph.
    pub vertices: Vec<usize>,
    pub half: CurveGraph,
    pub cone: Cone,
}

#[derive(Clone, Debug)]
pub struct SplitCones {
    pub curve: TropicalCurve,
    pub sides: [SideCone; 2],
    /// One summand per connected component of each half.
    pub pieces: Vec<SideCone>,
}

fn sub_half(
    cg: &CurveGraph,
    side: Side,
    verts: &[usize],
    compact: &[usize],
    cut: &[usize],
) -> Result<CurveGraph, TropicalError> {
    let local = |v: usize| verts.iter().position(|&x| x == v).expect("on this side");
    let mut vertices: Vec<_> = verts.iter().map(|&v| cg.vertices[v].clone()).collect();
    for v in vertices.iter_mut() {
        v.tau = 0;
    }
    let edges = compact
        .iter()
        .map(|&i| {
            let e = &cg.edges[i];
            CurveEdge {
                ends: [local(e.ends[0]), local(e.ends[1])],
                kind: e.kind,
            }
        })
        .collect();
    let half_edges = cut
        .iter()
        .enumerate()
        .filter(|(_, &i)| verts.contains(&cg.edges[i].ends[side.index()]))
        .map(|(k, &i)| {
            let e = &cg.edges[i];
            CurveHalfEdge {
                label: k + 1,
                vertex: local(e.ends[side.index()]),
                weight: e.weight().expect("splitting nodes are weighted"),
            }
        })
        .collect();
    CurveGraph::new(vertices, edges, half_edges, Some(side))
}

/// Cuts `cg` at the splitting nodes of `rho` and builds both side cones and
/// their per-component summands. Half-edge labels number the splitting nodes
/// in edge order.
pub fn split_cones(cg: &CurveGraph, rho: &[BigInt]) -> Result<SplitCones, TropicalError> {
    let b = basic_dual_cone(cg);
    let curve = tropicalize(&b, rho)?;
    let sides = curve.sides();
    if sides.iter().any(Option::is_none) {
        return Err(TropicalError::NotARay("a vertex lies strictly inside (0, l)".into()));
    }
    let sides: Vec<Side> = sides.into_iter().map(Option::unwrap).collect();
    let cut: Vec<usize> = (0..cg.edges.len()).filter(|&e| !curve.lengths[e].is_zero()).collect();

    let mut side_cones = Vec::new();
    let mut pieces = Vec::new();
    for side in Side::BOTH {
        let verts: Vec<usize> = (0..cg.vertices.len()).filter(|&v| sides[v] == side).collect();
        let compact: Vec<usize> = (0..cg.edges.len())
            .filter(|e| !cut.contains(e) && verts.contains(&cg.edges[*e].ends[0]))
            .collect();
        let half = sub_half(cg, side, &verts, &compact, &cut)?;
        let cone = half_dual_cone(&half)?;
        side_cones.push(SideCone {
            side,
            vertices: verts.clone(),
            half,
            cone,
        });
        for comp in components(cg, &verts, &compact) {
            let comp_edges: Vec<usize> = compact
                .iter()
                .copied()
                .filter(|&e| comp.contains(&cg.edges[e].ends[0]))
                .collect();
            let half = sub_half(cg, side, &comp, &comp_edges, &cut)?;
            let cone = half_dual_cone(&half)?;
            pieces.push(SideCone {
                side,
                vertices: comp,
                half,
                cone,
            });
        }
    }
    let [s1, s2]: [SideCone; 2] = side_cones.try_into().expect("two sides");
    Ok(SplitCones {
        curve,
        sides: [s1, s2],
        pieces,
    })
}

fn components(cg: &CurveGraph, verts: &[usize], edges: &[usize]) -> Vec<Vec<usize>> {
    let mut uf = crate::graphs::UnionFind::new(cg.vertices.len());
    for &e in edges {
        uf.union(cg.edges[e].ends[0], cg.edges[e].ends[1]);
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in verts {
        let root = uf.find(v);
        match comps.iter_mut().find(|c| uf.find(c[0]) == root) {
            Some(c) => c.push(v),
            None => comps.push(vec![v]),
        }
    }
    comps
}

/// The monoid `Hom(cone ∩ Z^n, N)` presented as a full-dimensional pointed
/// cone in the dual of the saturated span lattice of `cone`.
fn dual_monoid(cone: &Cone) -> Cone {
    cone.intrinsic().1.dual()
}

#[derive(Clone, Debug)]
pub struct SplitWitness {
    pub facet: Cone,
    pub product: Cone,
    /// Unimodular matrix carrying the facet onto the product, if found.
    pub matrix: Option<Vec<IntVec>>,
}

impl SplitWitness {
    pub fn found(&self) -> bool {
        self.matrix.is_some()
    }
}

/// Computes the facet `ρ^⊥` of the basic monoid and compares it with the
/// product of the two side monoids.
pub fn verify_split_facet(cg: &CurveGraph, rho: &[BigInt]) -> Result<SplitWitness, TropicalError> {
    let split = split_cones(cg, rho)?;
    let b = basic_dual_cone(cg);
    let (basis, qdual) = b.cone.intrinsic();
    let rho_local = express_all(&basis, &[rho.to_vec()]).remove(0);
    let q = qdual.dual();
    let facet = q.facet_of_ray(&rho_local)?.intrinsic().1;
    let product = dual_monoid(&split.sides[0].cone).product(&dual_monoid(&split.sides[1].cone));
    let matrix = if facet.ambient_rank() == product.ambient_rank() {
        find_lattice_isomorphism(&facet, &product, ISOMORPHISM_BOUND)?
    } else {
        None
    };
    Ok(SplitWitness {
        facet,
        product,
        matrix,
    })
}

#[derive(Clone, Debug)]
pub struct GlueResult {
    pub curve: CurveGraph,
    pub basic: BasicMonoidDual,
    pub rho: IntVec,
    pub l: BigInt,
}

/// Glues a side-1 and a side-2 half along equal half-edge labels, and
/// returns the distinguished ray `ρ` placing side 1 at 0 and side 2 at
/// `l = lcm` of the gluing weights.
pub fn glue_halves(h1: &CurveGraph, h2: &CurveGraph) -> Result<GlueResult, TropicalError> {
    if h1.side != Some(Side::One) || h2.side != Some(Side::Two) {
        return Err(TropicalError::Invalid("expected a side-1 and a side-2 half".into()));
    }
    let mut labels: Vec<usize> = h1.half_edges.iter().map(|h| h.label).collect();
    let mut other: Vec<usize> = h2.half_edges.iter().map(|h| h.label).collect();
    labels.sort_unstable();
    other.sort_unstable();
    if labels != other {
        return Err(TropicalError::LabelMismatch);
    }
    if labels.is_empty() {
        return Err(TropicalError::Invalid("no half-edges to glue".into()));
    }
    let n1 = h1.vertices.len();
    let mut vertices: Vec<_> = h1.vertices.iter().chain(&h2.vertices).cloned().collect();
    for v in vertices.iter_mut() {
        v.tau = 0;
    }
    let mut edges: Vec<CurveEdge> = h1.edges.clone();
    edges.extend(h2.edges.iter().map(|e| CurveEdge {
        ends: [e.ends[0] + n1, e.ends[1] + n1],
        kind: e.kind,
    }));
    let first_cut = edges.len();
    let mut weights = Vec::new();
    for &label in &labels {
        let a = h1.half_edges.iter().find(|h| h.label == label).expect("present");
        let b = h2.half_edges.iter().find(|h| h.label == label).expect("present");
        if a.weight != b.weight {
            return Err(TropicalError::WeightMismatch {
                label,
                w1: a.weight,
                w2: b.weight,
            });
        }
        weights.push(a.weight);
        edges.push(CurveEdge::weighted(a.vertex, n1 + b.vertex, a.weight));
    }
    let curve = CurveGraph::new(vertices, edges, vec![], None)?;
    let basic = basic_dual_cone(&curve);
    let l = lcm_of(&weights);
    let mut rho = vec![BigInt::zero(); basic.rank()];
    for x in rho.iter_mut().take(curve.vertices.len()).skip(n1) {
        *x = l.clone();
    }
    let mut gcd = BigInt::zero();
    for (k, &w) in weights.iter().enumerate() {
        let le = &l / BigInt::from(w);
        gcd = gcd.gcd(&le);
        let q = basic.q[first_cut + k].as_ref().expect("weighted");
        let c = q.iter().position(|x| x.is_one()).expect("unit covector");
        rho[c] = le;
    }
    let li = basic.rank() - 1;
    rho[li] = l.clone();
    assert!(gcd.is_one(), "edge lengths of the glued ray are not coprime");
    let rays = basic.cone.rays()?;
    if !rays.contains(&rho) {
        return Err(TropicalError::NotARay("glued point is not an extreme ray".into()));
    }
    Ok(GlueResult {
        curve,
        basic,
        rho,
        l,
    })
}

/// `∏ w / lcm(w)`; 1 for no weights.
pub fn gluing_degree(weights: &[u32]) -> Rat {
    let prod: BigInt = weights.iter().map(|&w| BigInt::from(w)).product();
    Rat::new(prod, lcm_of(weights))
}

#[cfg(test)]
mod tests {
    use super::super::examples::{e1, e2, e3};
    use super::super::CurveVertex;
    use super::*;
    use crate::exactcones::linalg::int_vec;
    use crate::rational::ratio;

    #[test]
    fn e1_cone_is_a_ray() {
        let b = basic_dual_cone(&e1());
        assert_eq!(b.cone.rays().unwrap(), vec![int_vec(&[0, 1, 1, 1])]);
        let rays = splitting_rays(&b).unwrap();
        assert_eq!(rays.len(), 1);
        assert_eq!(rays[0].l, BigInt::from(1));
        assert_eq!(rays[0].splitting_nodes, vec![0]);
        let t = tropicalize(&b, &rays[0].ray).unwrap();
        assert_eq!(t.positions, int_vec(&[0, 1]));
    }

    #[test]
    fn e2_splits_off_a_free_summand() {
        let b = basic_dual_cone(&e2());
        assert_eq!(b.cone.dim(), 2);
        assert_eq!(b.cone.rays().unwrap().len(), 2);
        assert_eq!(splitting_rays(&b).unwrap().len(), 1);
        let (reduced, k) = decompose_q0(&b);
        assert_eq!(k, 1);
        assert_eq!(reduced.cone.dim(), 1);
        let (same, k) = decompose_q0(&basic_dual_cone(&e1()));
        assert_eq!(k, 0);
        assert_eq!(same.cone, basic_dual_cone(&e1()).cone);
    }

    #[test]
    fn e3_ray_has_lcm_length() {
        let b = basic_dual_cone(&e3());
        assert_eq!(b.cone.rays().unwrap(), vec![int_vec(&[0, 6, 3, 2, 6])]);
        let rays = splitting_rays(&b).unwrap();
        assert_eq!(rays[0].l, BigInt::from(6));
        assert_eq!(rays[0].lengths, int_vec(&[3, 2]));
        let t = tropicalize(&b, &rays[0].ray).unwrap();
        assert_eq!(t.positions, int_vec(&[0, 6]));
        assert!(tropicalize(&b, &int_vec(&[0, 12, 6, 4, 12])).is_err());
    }

    #[test]
    fn e1_and_e3_split_into_zero_cones() {
        for cg in [e1(), e3()] {
            let b = basic_dual_cone(&cg);
            let rho = splitting_rays(&b).unwrap().remove(0).ray;
            let s = split_cones(&cg, &rho).unwrap();
            for side in &s.sides {
                assert_eq!(side.cone.dim(), 0);
            }
            let w = verify_split_facet(&cg, &rho).unwrap();
            assert!(w.found());
            assert_eq!(w.facet.ambient_rank(), 0);
        }
    }

    #[test]
    fn free_vertex_on_contracted_edge_adds_parameter() {
        // rigid1 -(w=1)-> rigid2, plus a free vertex tied to the rigid2
        // vertex by a contracted edge
        let cg = CurveGraph::new(
            vec![
                CurveVertex::new(VertexType::Rigid1),
                CurveVertex::new(VertexType::Rigid2),
                CurveVertex::new(VertexType::Free),
            ],
            vec![CurveEdge::weighted(0, 1, 1), CurveEdge::contracted(1, 2)],
            vec![],
            None,
        )
        .unwrap();
        let b = basic_dual_cone(&cg);
        let rays = splitting_rays(&b).unwrap();
        assert_eq!(rays.len(), 1);
        let s = split_cones(&cg, &rays[0].ray).unwrap();
        assert_eq!(s.sides[0].cone.dim(), 0);
        // side 2: y_rigid = 0, y_free = y_rigid, l_c >= 0 free
        let direct = Cone::from_generators(3, vec![int_vec(&[0, 0, 1])]).unwrap();
        assert_eq!(s.sides[1].cone, direct);
        assert!(verify_split_facet(&cg, &rays[0].ray).unwrap().found());
    }

    #[test]
    fn glue_examples() {
        let half = |side: Side, weights: &[u32]| {
            CurveGraph::new(
                vec![CurveVertex::new(VertexType::rigid(side))],
                vec![],
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| CurveHalfEdge {
                        label: i + 1,
                        vertex: 0,
                        weight: w,
                    })
                    .collect(),
                Some(side),
            )
            .unwrap()
        };
        let g = glue_halves(&half(Side::One, &[1]), &half(Side::Two, &[1])).unwrap();
        assert_eq!(g.l, BigInt::from(1));
        assert_eq!(g.rho, int_vec(&[0, 1, 1, 1]));
        let g = glue_halves(&half(Side::One, &[2, 3]), &half(Side::Two, &[2, 3])).unwrap();
        assert_eq!(g.l, BigInt::from(6));
        assert_eq!(g.rho, int_vec(&[0, 6, 3, 2, 6]));
        let err = glue_halves(&half(Side::One, &[2]), &half(Side::Two, &[3])).unwrap_err();
        assert!(matches!(err, TropicalError::WeightMismatch { label: 1, .. }));
        let err = glue_halves(&half(Side::One, &[2]), &half(Side::Two, &[2, 2])).unwrap_err();
        assert_eq!(err, TropicalError::LabelMismatch);
    }

    #[test]
    fn gluing_degree_examples() {
        assert_eq!(gluing_degree(&[1, 1]), ratio(1, 1));
        assert_eq!(gluing_degree(&[2, 3]), ratio(1, 1));
        assert_eq!(gluing_degree(&[2, 2]), ratio(2, 1));
        assert_eq!(gluing_degree(&[]), ratio(1, 1));
    }

    #[test]
    fn lattice_points_match_nested_loops() {
        // rigid1 and rigid2 joined by edges of weights 1 and 2
        let cg = CurveGraph::new(
            vec![CurveVertex::new(VertexType::Rigid1), CurveVertex::new(VertexType::Rigid2)],
            vec![CurveEdge::weighted(0, 1, 1), CurveEdge::weighted(0, 1, 2)],
            vec![],
            None,
        )
        .unwrap();
        let b = basic_dual_cone(&cg);
        let pts = b.cone.lattice_points_box(&b.one, &BigInt::from(6)).unwrap();
        let mut oracle = Vec::new();
        for x0 in 0..=6i64 {
            for x1 in 0..=6i64 {
                for l0 in 0..=6i64 {
                    for l1 in 0..=6i64 {
                        for l in 0..=6i64 {
                            if x0 == 0 && x1 == l && x1 - x0 == l0 && x1 - x0 == 2 * l1 {
                                oracle.push(int_vec(&[x0, x1, l0, l1, l]));
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(pts, oracle);
    }
}

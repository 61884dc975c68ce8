//! Seeded random curve graphs and matched half pairs.
//!
//! Weighted edges are laid down as flows: each path starts at a rigid1
//! vertex, climbs through free vertices in a fixed random order and ends at
//! a rigid2 vertex (or a half-edge), so free vertices balance by
//! construction. Vertices left untouched are tied in with contracted edges.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{CurveEdge, CurveGraph, CurveHalfEdge, CurveVertex, EdgeKind, VertexType};
use crate::target::Side;

#[derive(Clone, Copy, Debug)]
pub struct CurveParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_weight: u32,
}

impl Default for CurveParams {
    fn default() -> Self {
        CurveParams {
            max_vertices: 6,
            max_edges: 6,
            max_weight: 4,
        }
    }
}

fn random_kind<R: Rng>(rng: &mut R, allowed: &[VertexType]) -> VertexType {
    *allowed.choose(rng).expect("nonempty")
}

/// Adds `w` along `path`, merging into an existing parallel edge when the
/// weight cap allows.
fn lay_path<R: Rng>(rng: &mut R, edges: &mut Vec<CurveEdge>, path: &[usize], w: u32, cap: u32) {
    for pair in path.windows(2) {
        let existing = edges.iter_mut().find(|e| {
            e.ends == [pair[0], pair[1]] && matches!(e.kind, EdgeKind::Weighted { weight } if weight + w <= cap)
        });
        match existing {
            Some(e) if rng.gen_bool(0.5) => {
                if let EdgeKind::Weighted { weight } = &mut e.kind {
                    *weight += w;
                }
            }
            _ => edges.push(CurveEdge::weighted(pair[0], pair[1], w)),
        }
    }
}

fn increasing_subset<R: Rng>(rng: &mut R, order: &[usize], max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = order.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    out.truncate(max);
    out
}

fn contracted_compatible(a: VertexType, b: VertexType) -> bool {
    !matches!(
        (a, b),
        (VertexType::Rigid1, VertexType::Rigid2) | (VertexType::Rigid2, VertexType::Rigid1)
    )
}

fn tie_in<R: Rng>(rng: &mut R, kinds: &[VertexType], edges: &mut Vec<CurveEdge>, extra: f64) {
    let n = kinds.len();
    for v in 0..n {
        if edges.iter().any(|e| e.ends.contains(&v)) {
            continue;
        }
        let partners: Vec<usize> = (0..n)
            .filter(|&u| u != v && contracted_compatible(kinds[u], kinds[v]))
            .collect();
        if let Some(&u) = partners.choose(rng) {
            edges.push(CurveEdge::contracted(u.min(v), u.max(v)));
        }
    }
    if n > 0 && rng.gen_bool(extra) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if contracted_compatible(kinds[a], kinds[b]) {
            edges.push(CurveEdge::contracted(a.min(b), a.max(b)));
        }
    }
}

/// A connected, balanced curve graph with at least one rigid vertex of each
/// kind.
pub fn random_curve_graph<R: Rng>(rng: &mut R, p: CurveParams) -> CurveGraph {
    loop {
        let nv = rng.gen_range(2..=p.max_vertices.max(2));
        let mut kinds = vec![VertexType::Rigid1, VertexType::Rigid2];
        for _ in 2..nv {
            kinds.push(random_kind(
                rng,
                &[VertexType::Free, VertexType::Free, VertexType::Rigid1, VertexType::Rigid2],
            ));
        }
        kinds.shuffle(rng);
        let of = |k: VertexType| -> Vec<usize> { (0..nv).filter(|&v| kinds[v] == k).collect() };
        let (r1, r2) = (of(VertexType::Rigid1), of(VertexType::Rigid2));
        let mut free = of(VertexType::Free);
        free.shuffle(rng);

        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let mut path = vec![*r1.choose(rng).expect("has rigid1")];
            path.extend(increasing_subset(rng, &free, 2));
            path.push(*r2.choose(rng).expect("has rigid2"));
            let w = rng.gen_range(1..=p.max_weight);
            lay_path(rng, &mut edges, &path, w, p.max_weight);
        }
        tie_in(rng, &kinds, &mut edges, 0.3);
        if edges.len() > p.max_edges {
            continue;
        }
        let vertices = kinds.iter().map(|&k| CurveVertex::new(k)).collect();
        let Ok(cg) = CurveGraph::new(vertices, edges, vec![], None) else {
            continue;
        };
        if cg.is_connected() {
            return cg;
        }
    }
}

/// A side-1 and a side-2 half whose half-edges carry the same labels and
/// weights.
pub fn random_half_pair<R: Rng>(rng: &mut R, p: CurveParams) -> (CurveGraph, CurveGraph) {
    loop {
        let k = rng.gen_range(1..=3usize);
        let weights: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=p.max_weight)).collect();
        let h1 = random_half(rng, p, Side::One, &weights);
        let h2 = random_half(rng, p, Side::Two, &weights);
        if let (Some(h1), Some(h2)) = (h1, h2) {
            return (h1, h2);
        }
    }
}

fn random_half<R: Rng>(rng: &mut R, p: CurveParams, side: Side, weights: &[u32]) -> Option<CurveGraph> {
    let rigid = VertexType::rigid(side);
    let nv = rng.gen_range(1..=(p.max_vertices / 2).max(1));
    let mut kinds = vec![rigid];
    for _ in 1..nv {
        kinds.push(random_kind(rng, &[VertexType::Free, rigid]));
    }
    kinds.shuffle(rng);
    let rigids: Vec<usize> = (0..nv).filter(|&v| kinds[v] == rigid).collect();
    let mut free: Vec<usize> = (0..nv).filter(|&v| kinds[v] == VertexType::Free).collect();
    free.shuffle(rng);

    let mut edges = Vec::new();
    let mut half_edges = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        // side 1 climbs from a rigid vertex to the cut; side 2 climbs from the
        // cut to a rigid vertex
        let climb = increasing_subset(rng, &free, 2);
        let r = *rigids.choose(rng).expect("has rigid");
        let (path, at) = match side {
            Side::One => {
                let mut path = vec![r];
                path.extend(&climb);
                let at = *path.last().expect("nonempty");
                (path, at)
            }
            Side::Two => {
                let mut path = climb.clone();
                path.push(r);
                (path.clone(), path[0])
            }
        };
        lay_path(rng, &mut edges, &path, w, p.max_weight);
        half_edges.push(CurveHalfEdge {
            label: i + 1,
            vertex: at,
            weight: w,
        });
    }
    tie_in(rng, &kinds, &mut edges, 0.3);
    if edges.len() > p.max_edges {
        return None;
    }
    let vertices = kinds.iter().map(|&k| CurveVertex::new(k)).collect();
    CurveGraph::new(vertices, edges, half_edges, Some(side)).ok()
}

/// Gives every rigid vertex the class `|τ_V|` in a rank-one class lattice
/// with `D`-degree 1, so contact orders hold after collapsing.
pub fn with_balanced_classes(cg: &CurveGraph) -> CurveGraph {
    let mut out = cg.clone();
    for v in out.vertices.iter_mut() {
        v.class = match v.kind {
            VertexType::Free => None,
            _ => Some(vec![v.tau.abs()]),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_graphs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut cg = random_curve_graph(&mut rng, CurveParams::default());
            assert!(cg.validate().is_ok());
            assert!(cg.vertices.len() <= 6 && cg.edges.len() <= 6);
            let (mut h1, mut h2) = random_half_pair(&mut rng, CurveParams::default());
            assert!(h1.validate().is_ok() && h2.validate().is_ok());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_curve_graph(&mut ChaCha8Rng::seed_from_u64(3), CurveParams::default());
        let b = random_curve_graph(&mut ChaCha8Rng::seed_from_u64(3), CurveParams::default());
        assert_eq!(a, b);
    }
}

//! The map from a curve graph and a splitting ray to its bipartite graph.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{basic_dual_cone, tropicalize, CurveGraph, TropicalError};
use crate::graphs::{DecoratedGraph, Edge, GraphError, UnionFind, Vertex};
use crate::target::{Side, TargetModel};

/// Collapses every edge of length zero under `rho`, sends vertices at 0 to
/// side 1 and vertices at `l` to side 2, and validates the result as a
/// graph of its own type `(g, n, β)`.
pub fn trop_collapse(
    t: &TargetModel,
    cg: &CurveGraph,
    rho: &[BigInt],
) -> Result<DecoratedGraph, TropicalError> {
    let b = basic_dual_cone(cg);
    let curve = tropicalize(&b, rho)?;
    let sides = curve.sides();
    if let Some(v) = sides.iter().position(Option::is_none) {
        return Err(TropicalError::NotARay(format!(
            "vertex {v} lies strictly inside (0, l)"
        )));
    }
    let n = cg.vertices.len();
    let mut uf = UnionFind::new(n);
    for (e, len) in cg.edges.iter().zip(&curve.lengths) {
        if len.is_zero() {
            uf.union(e.ends[0], e.ends[1]);
        }
    }
    let mut group_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let root = uf.find(v);
        if group_of[root] == usize::MAX {
            group_of[root] = members.len();
            members.push(Vec::new());
        }
        group_of[v] = group_of[root];
        members[group_of[v]].push(v);
    }

    let mut vertices = Vec::with_capacity(members.len());
    for (gi, mem) in members.iter().enumerate() {
        let side: Side = sides[mem[0]].expect("checked above");
        let k = t.component(side).rank();
        let internal = cg
            .edges
            .iter()
            .zip(&curve.lengths)
            .filter(|(e, len)| len.is_zero() && group_of[e.ends[0]] == gi)
            .count();
        let b1 = internal + 1 - mem.len();
        let mut class = vec![0i64; k];
        let mut markings = Vec::new();
        let mut genus = b1 as u32;
        for &v in mem {
            let cv = &cg.vertices[v];
            genus += cv.genus;
            markings.extend(cv.markings.iter().copied());
            if let Some(c) = &cv.class {
                if c.len() != k {
                    return Err(GraphError::Invalid(format!(
                        "vertex {v} lands on side {side} but its class has length {} instead of {k}",
                        c.len()
                    ))
                    .into());
                }
                for (a, x) in class.iter_mut().zip(c) {
                    *a += x;
                }
            }
        }
        markings.sort_unstable();
        vertices.push(Vertex {
            side,
            genus,
            markings,
            class,
        });
    }
    let edges = cg
        .edges
        .iter()
        .zip(&curve.lengths)
        .filter(|(_, len)| !len.is_zero())
        .map(|(e, _)| Edge {
            ends: [group_of[e.ends[0]], group_of[e.ends[1]]],
            weight: e.weight().expect("contracted edges have zero length on rays"),
        })
        .collect();
    let graph = DecoratedGraph { vertices, edges };

    graph.check_shape()?;
    let g = graph.genus();
    let marks: usize = graph.vertices.iter().map(|v| v.markings.len()).sum();
    let mut beta = vec![0i64; t.class_rank];
    for v in &graph.vertices {
        let comp = t.component(v.side);
        if v.class.iter().any(|&c| c < 0) {
            return Err(GraphError::Invalid("negative class".into()).into());
        }
        for (s, x) in beta.iter_mut().zip(comp.pushforward(&v.class)) {
            *s += x;
        }
    }
    graph.validate(t, g.max(0) as u32, marks as u32, &beta)?;
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::super::examples::e1;
    use super::super::{splitting_rays, CurveEdge, CurveVertex, VertexType};
    use super::*;
    use crate::target::{fixtures, GradedBasis};

    fn t2() -> TargetModel {
        fixtures::two_lines(GradedBasis::point())
    }

    fn collapse_first(cg: &CurveGraph) -> Result<DecoratedGraph, TropicalError> {
        let rho = splitting_rays(&basic_dual_cone(cg)).unwrap().remove(0).ray;
        trop_collapse(&t2(), cg, &rho)
    }

    fn rigid(kind: VertexType, class: i64) -> CurveVertex {
        CurveVertex {
            class: Some(vec![class]),
            ..CurveVertex::new(kind)
        }
    }

    #[test]
    fn e1_collapses_to_single_edge_graph() {
        let g = collapse_first(&e1()).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.vertices[0].class, vec![1]);
        assert_eq!(g.edges, vec![Edge { ends: [0, 1], weight: 1 }]);
    }

    #[test]
    fn contracted_neighbour_merges_classes() {
        // two rigid1 vertices of class a1 tied by a contracted edge; their sum
        // 2a1 needs contact order 2, supplied by two weight-1 edges
        let ok = CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, 1),
                rigid(VertexType::Rigid1, 1),
                rigid(VertexType::Rigid2, 2),
            ],
            vec![
                CurveEdge::weighted(0, 2, 1),
                CurveEdge::weighted(1, 2, 1),
                CurveEdge::contracted(0, 1),
            ],
            vec![],
            None,
        )
        .unwrap();
        let g = collapse_first(&ok).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.vertices[0].class, vec![2]);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.genus(), 1);

        // the same shape with only one weighted edge violates contact order
        let bad = CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, 1),
                rigid(VertexType::Rigid2, 1),
                rigid(VertexType::Rigid1, 1),
            ],
            vec![CurveEdge::weighted(0, 1, 1), CurveEdge::contracted(0, 2)],
            vec![],
            None,
        )
        .unwrap();
        assert!(matches!(collapse_first(&bad), Err(TropicalError::Graph(_))));
    }

    #[test]
    fn contracted_cycle_adds_genus() {
        let cg = CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, 1),
                rigid(VertexType::Rigid2, 1),
                rigid(VertexType::Rigid1, 0),
            ],
            vec![
                CurveEdge::weighted(0, 1, 1),
                CurveEdge::contracted(0, 2),
                CurveEdge::contracted(2, 0),
            ],
            vec![],
            None,
        )
        .unwrap();
        let g = collapse_first(&cg).unwrap();
        assert_eq!(g.vertices[0].genus, 1);
        assert_eq!(g.genus(), 1);
    }
}

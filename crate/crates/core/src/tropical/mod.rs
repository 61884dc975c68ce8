//! Curve graphs and their tropical parameter cones.
//!
//! A curve graph has rigid vertices pinned to either end of the interval
//! `[0, l]`, free vertices mapping into `D`, contracted edges and weighted
//! edges. A weighted edge `tail → head` of weight `w` stretches by `w`:
//! `x_head − x_tail = w·l_e`, the tail being the lower end.

mod collapse;
mod cones;
pub mod random;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactcones::ConeError;
use crate::graphs::GraphError;
use crate::target::Side;

pub use collapse::trop_collapse;
pub use cones::{
    basic_dual_cone, decompose_q0, gluing_degree, glue_halves, half_dual_cone, split_cones,
    splitting_rays, tropicalize, verify_split_facet, BasicMonoidDual, GlueResult, SideCone,
    SplitCones, SplitWitness, SplittingRay, TropicalCurve, ISOMORPHISM_BOUND,
};

pub const CURVE_SCHEMA: &str = "degenform/curve/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("invalid curve graph: {0}")]
    Invalid(String),
    #[error("balancing fails at vertex {vertex}: net outgoing weight {net}")]
    Unbalanced { vertex: usize, net: i64 },
    #[error("not a ray: {0}")]
    NotARay(String),
    #[error("weight mismatch on half-edge {label}: {w1} vs {w2}")]
    WeightMismatch { label: usize, w1: u32, w2: u32 },
    #[error("half-edge labels do not match")]
    LabelMismatch,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexType {
    Rigid1,
    Rigid2,
    Free,
}

impl VertexType {
    pub fn rigid(side: Side) -> Self {
        match side {
            Side::One => VertexType::Rigid1,
            Side::Two => VertexType::Rigid2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveVertex {
    #[serde(rename = "type")]
    pub kind: VertexType,
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub markings: Vec<u32>,
    /// Class in the component the vertex lands in; absent means zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<i64>>,
    /// Filled in by validation from the balancing condition.
    #[serde(default)]
    pub tau: i64,
}

impl CurveVertex {
    pub fn new(kind: VertexType) -> Self {
        CurveVertex {
            kind,
            genus: 0,
            markings: Vec::new(),
            class: None,
            tau: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EdgeKind {
    Contracted,
    Weighted { weight: u32 },
}

/// For weighted edges `ends = [tail, head]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveEdge {
    pub ends: [usize; 2],
    #[serde(flatten)]
    pub kind: EdgeKind,
}

impl CurveEdge {
    pub fn weighted(tail: usize, head: usize, weight: u32) -> Self {
        CurveEdge {
            ends: [tail, head],
            kind: EdgeKind::Weighted { weight },
        }
    }

    pub fn contracted(a: usize, b: usize) -> Self {
        CurveEdge {
            ends: [a, b],
            kind: EdgeKind::Contracted,
        }
    }

    pub fn weight(&self) -> Option<u32> {
        match self.kind {
            EdgeKind::Weighted { weight } => Some(weight),
            EdgeKind::Contracted => None,
        }
    }
}

/// A cut edge kept on one side, pointing towards the other side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveHalfEdge {
    pub label: usize,
    pub vertex: usize,
    pub weight: u32,
}

/// A curve graph, or one half of a split curve graph when `side` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveGraph {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    pub vertices: Vec<CurveVertex>,
    #[serde(default)]
    pub edges: Vec<CurveEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub half_edges: Vec<CurveHalfEdge>,
}

impl CurveGraph {
    /// Validates and fills in `tau` from balancing.
    pub fn new(
        vertices: Vec<CurveVertex>,
        edges: Vec<CurveEdge>,
        half_edges: Vec<CurveHalfEdge>,
        side: Option<Side>,
    ) -> Result<Self, TropicalError> {
        let mut cg = CurveGraph {
            side,
            vertices,
            edges,
            half_edges,
        };
        cg.validate()?;
        Ok(cg)
    }

    /// Net outgoing weight at `v`, counting half-edges as pointing away
    /// from side 1 and into side 2.
    pub fn net_outgoing(&self, v: usize) -> i64 {
        let mut net = 0i64;
        for e in &self.edges {
            if let Some(w) = e.weight() {
                if e.ends[0] == v {
                    net += w as i64;
                }
                if e.ends[1] == v {
                    net -= w as i64;
                }
            }
        }
        for h in self.half_edges.iter().filter(|h| h.vertex == v) {
            match self.side {
                Some(Side::Two) => net -= h.weight as i64,
                _ => net += h.weight as i64,
            }
        }
        net
    }

    pub fn validate(&mut self) -> Result<(), TropicalError> {
        let n = self.vertices.len();
        let invalid = |s: String| Err(TropicalError::Invalid(s));
        if n == 0 {
            return invalid("no vertices".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.ends.iter().any(|&v| v >= n) {
                return invalid(format!("edge {i} has an endpoint out of range"));
            }
            if let EdgeKind::Weighted { weight } = e.kind {
                let [t, h] = e.ends;
                if weight == 0 {
                    return invalid(format!("edge {i} has weight 0"));
                }
                if t == h {
                    return invalid(format!("weighted edge {i} is a loop"));
                }
                if self.vertices[t].kind == VertexType::Rigid2 {
                    return invalid(format!("edge {i}: a rigid2 vertex cannot be a tail"));
                }
                if self.vertices[h].kind == VertexType::Rigid1 {
                    return invalid(format!("edge {i}: a rigid1 vertex cannot be a head"));
                }
            }
        }
        let mut labels: Vec<usize> = self.half_edges.iter().map(|h| h.label).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate half-edge labels".into());
        }
        if !self.half_edges.is_empty() && self.side.is_none() {
            return invalid("half-edges need a side".into());
        }
        for h in &self.half_edges {
            if h.vertex >= n || h.weight == 0 {
                return invalid(format!("half-edge {} is malformed", h.label));
            }
        }
        if let Some(side) = self.side {
            let wrong = VertexType::rigid(side.other());
            if self.vertices.iter().any(|v| v.kind == wrong) {
                return invalid(format!("a side-{side} half cannot contain {wrong:?} vertices"));
            }
        }
        for v in 0..n {
            let net = self.net_outgoing(v);
            match self.vertices[v].kind {
                VertexType::Free => {
                    if net != 0 || self.vertices[v].tau != 0 {
                        return Err(TropicalError::Unbalanced { vertex: v, net });
                    }
                }
                _ => {
                    let tau = -net;
                    let given = self.vertices[v].tau;
                    if given != 0 && given != tau {
                        return invalid(format!(
                            "vertex {v}: tau {given} contradicts balancing value {tau}"
                        ));
                    }
                    self.vertices[v].tau = tau;
                }
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.ends[0], e.ends[1]), (e.ends[1], e.ends[0])] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn contracted_count(&self) -> usize {
        self.edges.iter().filter(|e| e.weight().is_none()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CurveDoc {
            schema: CURVE_SCHEMA.into(),
            curve: self.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, TropicalError> {
        let doc: CurveDoc =
            serde_json::from_str(text).map_err(|e| TropicalError::Invalid(e.to_string()))?;
        if doc.schema != CURVE_SCHEMA {
            return Err(TropicalError::Invalid(format!(
                "unsupported schema {:?}",
                doc.schema
            )));
        }
        let mut cg = doc.curve;
        cg.validate()?;
        Ok(cg)
    }
}

/// Contracts edge `e`, merging its endpoints into the lower-indexed one.
/// Edges that become loops turn into contracted loops. Fails when the merged
/// graph breaks the orientation rules (a weighted edge into a rigid1
/// vertex). Returns the new curve graph and the image of `rho`, which must
/// have `l_e = 0`.
pub fn contract_edge(
    cg: &CurveGraph,
    e: usize,
    rho: &[BigInt],
) -> Result<(CurveGraph, Vec<BigInt>), TropicalError> {
    let nv = cg.vertices.len();
    let [a, b] = cg.edges[e].ends;
    let (keep, drop) = (a.min(b), a.max(b));
    let len_coord = nv + e;
    if !rho[len_coord].is_zero() {
        return Err(TropicalError::NotARay(format!("edge {e} has nonzero length")));
    }
    let remap = |v: usize| -> usize {
        if keep == drop {
            return v;
        }
        let v = if v == drop { keep } else { v };
        if v > drop {
            v - 1
        } else {
            v
        }
    };
    let mut vertices = cg.vertices.clone();
    if keep != drop {
        let gone = vertices.remove(drop);
        let kept = &mut vertices[keep];
        if kept.kind == VertexType::Free {
            kept.kind = gone.kind;
        }
        kept.genus += gone.genus;
        kept.markings.extend(gone.markings);
        kept.markings.sort_unstable();
        kept.class = match (kept.class.take(), gone.class) {
            (Some(x), Some(y)) => Some(x.iter().zip(&y).map(|(p, q)| p + q).collect()),
            (x, y) => x.or(y),
        };
    } else {
        vertices[keep].genus += 1;
    }
    for v in vertices.iter_mut() {
        v.tau = 0;
    }
    let mut edges = Vec::new();
    let mut new_rho: Vec<BigInt> = (0..nv)
        .filter(|&v| v != drop || keep == drop)
        .map(|v| rho[v].clone())
        .collect();
    for (i, edge) in cg.edges.iter().enumerate() {
        if i == e {
            continue;
        }
        let ends = [remap(edge.ends[0]), remap(edge.ends[1])];
        let kind = if ends[0] == ends[1] { EdgeKind::Contracted } else { edge.kind };
        edges.push(CurveEdge { ends, kind });
        new_rho.push(rho[nv + i].clone());
    }
    new_rho.push(rho[rho.len() - 1].clone());
    let out = CurveGraph::new(vertices, edges, cg.half_edges.clone(), cg.side)?;
    Ok((out, new_rho))
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    schema: String,
    #[serde(flatten)]
    curve: CurveGraph,
}

/// Ready-made curve graphs.
pub mod examples {
    use super::*;

    fn rigid(kind: VertexType, class: Option<Vec<i64>>) -> CurveVertex {
        CurveVertex {
            class,
            ..CurveVertex::new(kind)
        }
    }

    /// A rigid1 and a rigid2 vertex joined by one edge of weight 1.
    pub fn e1() -> CurveGraph {
        CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, Some(vec![1])),
                rigid(VertexType::Rigid2, Some(vec![1])),
            ],
            vec![CurveEdge::weighted(0, 1, 1)],
            vec![],
            None,
        )
        .expect("valid")
    }

    /// `e1` plus a contracted edge from the rigid1 vertex to a second rigid1
    /// vertex of class zero.
    pub fn e2() -> CurveGraph {
        CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, Some(vec![1])),
                rigid(VertexType::Rigid2, Some(vec![1])),
                rigid(VertexType::Rigid1, Some(vec![0])),
            ],
            vec![CurveEdge::weighted(0, 1, 1), CurveEdge::contracted(0, 2)],
            vec![],
            None,
        )
        .expect("valid")
    }

    /// A rigid1 and a rigid2 vertex joined by edges of weights 2 and 3.
    pub fn e3() -> CurveGraph {
        CurveGraph::new(
            vec![
                rigid(VertexType::Rigid1, Some(vec![5])),
                rigid(VertexType::Rigid2, Some(vec![5])),
            ],
            vec![CurveEdge::weighted(0, 1, 2), CurveEdge::weighted(0, 1, 3)],
            vec![],
            None,
        )
        .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_from_balancing() {
        let cg = examples::e3();
        assert_eq!(cg.vertices[0].tau, -5);
        assert_eq!(cg.vertices[1].tau, 5);
    }

    #[test]
    fn unbalanced_free_vertex_rejected() {
        let r = CurveGraph::new(
            vec![
                CurveVertex::new(VertexType::Rigid1),
                CurveVertex::new(VertexType::Free),
                CurveVertex::new(VertexType::Rigid2),
            ],
            vec![CurveEdge::weighted(0, 1, 2), CurveEdge::weighted(1, 2, 1)],
            vec![],
            None,
        );
        assert!(matches!(r, Err(TropicalError::Unbalanced { vertex: 1, net: -1 })));
    }

    #[test]
    fn orientation_rules() {
        let r = CurveGraph::new(
            vec![CurveVertex::new(VertexType::Rigid1), CurveVertex::new(VertexType::Rigid2)],
            vec![CurveEdge::weighted(1, 0, 1)],
            vec![],
            None,
        );
        assert!(matches!(r, Err(TropicalError::Invalid(_))));
    }

    #[test]
    fn json_round_trip() {
        let cg = examples::e2();
        assert_eq!(CurveGraph::from_json(&cg.to_json()).unwrap(), cg);
    }
}

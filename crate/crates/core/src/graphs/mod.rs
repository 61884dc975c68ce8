//! Decorated bipartite graphs of type `(g, n, β)`, their edge orderings,
//! half-graphs and multiplicity coefficients.

mod canon;
mod enumerate;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rat;
use crate::target::{Side, TargetError, TargetModel};

pub use canon::{automorphism_count, canonical_form, vertex_automorphisms};
pub use enumerate::enumerate_graphs;

pub const GRAPH_SCHEMA: &str = "degenform/graph/v1";

/// Largest vertex count handled by the canonical-form search.
pub const MAX_VERTICES: usize = 10;
/// Largest edge count for which orderings are enumerated explicitly.
pub const MAX_ORDERED_EDGES: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub side: Side,
    pub genus: u32,
    /// Sorted marking labels in `1..=n`.
    #[serde(default)]
    pub markings: Vec<u32>,
    /// Coefficients on the generators of the component's class monoid.
    pub class: Vec<i64>,
}

/// An edge between a side-1 vertex `ends[0]` and a side-2 vertex `ends[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub ends: [usize; 2],
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecoratedGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl DecoratedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edge endpoints at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.ends.contains(&v)).count()
    }

    pub fn incident_weight(&self, v: usize) -> i64 {
        self.edges
            .iter()
            .filter(|e| e.ends.contains(&v))
            .map(|e| e.weight as i64)
            .sum()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            uf.union(e.ends[0], e.ends[1]);
        }
        (1..n).all(|v| uf.find(v) == uf.find(0))
    }

    /// `1 − (#V − #E) + Σ g_V`.
    pub fn genus(&self) -> i64 {
        let sum: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        1 - (self.vertices.len() as i64 - self.edges.len() as i64) + sum
    }

    /// Checks edge endpoints and bipartiteness only.
    pub fn check_shape(&self) -> Result<(), GraphError> {
        for (i, e) in self.edges.iter().enumerate() {
            let [a, b] = e.ends;
            if a >= self.vertices.len() || b >= self.vertices.len() {
                return Err(GraphError::Invalid(format!("edge {i} has an endpoint out of range")));
            }
            if e.weight == 0 {
                return Err(GraphError::Invalid(format!("edge {i} has weight 0")));
            }
            if self.vertices[a].side != Side::One || self.vertices[b].side != Side::Two {
                return Err(GraphError::Invalid(format!(
                    "bipartite: edge {i} must join a side-1 vertex to a side-2 vertex"
                )));
            }
        }
        Ok(())
    }

    /// Checks every defining condition of a graph of type `(g, n, β)`.
    pub fn validate(&self, t: &TargetModel, g: u32, n: u32, beta: &[i64]) -> Result<(), GraphError> {
        let invalid = |s: String| Err(GraphError::Invalid(s));
        self.check_shape()?;
        if beta.len() != t.class_rank {
            return invalid(format!("beta must have length {}", t.class_rank));
        }
        let mut total = vec![0i64; t.class_rank];
        for (i, v) in self.vertices.iter().enumerate() {
            let comp = t.component(v.side);
            if v.class.len() != comp.rank() || v.class.iter().any(|&c| c < 0) {
                return invalid(format!("vertex {i}: class must be effective of length {}", comp.rank()));
            }
            for (s, x) in total.iter_mut().zip(comp.pushforward(&v.class)) {
                *s += x;
            }
            let contact = comp.d_degree_of(&v.class);
            if contact != self.incident_weight(i) {
                return invalid(format!(
                    "contact order: vertex {i} has D-degree {contact} but incident weight {}",
                    self.incident_weight(i)
                ));
            }
            let special = 2 * v.genus as usize + v.markings.len() + self.valence(i);
            if special < 3 && v.class.iter().all(|&c| c == 0) {
                return invalid(format!("stability: vertex {i} is unstable with zero class"));
            }
        }
        if total != beta {
            return invalid(format!("curve class: vertex classes sum to {total:?}, not {beta:?}"));
        }
        if self.genus() != g as i64 {
            return invalid(format!("genus: graph has genus {}, expected {g}", self.genus()));
        }
        let mut marks: Vec<u32> = self.vertices.iter().flat_map(|v| v.markings.iter().copied()).collect();
        marks.sort_unstable();
        if marks != (1..=n).collect::<Vec<_>>() {
            return invalid(format!("markings: vertex markings do not partition 1..={n}"));
        }
        if !self.is_connected() {
            return invalid("graph is not connected".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphDoc {
            schema: GRAPH_SCHEMA.into(),
            graph: self.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GraphError::Invalid(e.to_string()))?;
        if doc.schema != GRAPH_SCHEMA {
            return Err(GraphError::Invalid(format!("unsupported schema {:?}", doc.schema)));
        }
        doc.graph.check_shape()?;
        Ok(doc.graph)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    schema: String,
    #[serde(flatten)]
    graph: DecoratedGraph,
}

impl fmt::Display for DecoratedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                format!(
                    "V{i}(r={},g={},n={:?},β={:?})",
                    v.side, v.genus, v.markings, v.class
                )
            })
            .collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("V{}-V{}:w={}", e.ends[0], e.ends[1], e.weight))
            .collect();
        write!(f, "{} | {}", vs.join(" "), es.join(" "))
    }
}

/// A decorated graph whose edge list is in label order: edge `i` carries
/// label `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderedGraph {
    pub graph: DecoratedGraph,
}

impl OrderedGraph {
    /// Renumbers vertices by first appearance along the edge order (side-1
    /// endpoint first), giving a representative that is equal for isomorphic
    /// edge-ordered graphs.
    pub fn normalized(&self) -> OrderedGraph {
        let g = &self.graph;
        let mut map = vec![usize::MAX; g.vertices.len()];
        let mut order = Vec::with_capacity(g.vertices.len());
        for e in &g.edges {
            for &v in &e.ends {
                if map[v] == usize::MAX {
                    map[v] = order.len();
                    order.push(v);
                }
            }
        }
        // isolated vertices only occur in one-vertex graphs
        for v in 0..g.vertices.len() {
            if map[v] == usize::MAX {
                map[v] = order.len();
                order.push(v);
            }
        }
        OrderedGraph {
            graph: DecoratedGraph {
                vertices: order.iter().map(|&v| g.vertices[v].clone()).collect(),
                edges: g
                    .edges
                    .iter()
                    .map(|e| Edge {
                        ends: [map[e.ends[0]], map[e.ends[1]]],
                        weight: e.weight,
                    })
                    .collect(),
            },
        }
    }

    /// Labels (1-based) of the edges at `v`, ascending.
    pub fn edges_at(&self, v: usize) -> Vec<usize> {
        self.graph
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.ends.contains(&v))
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Representatives of the edge orderings of `g` up to isomorphism, sorted.
pub fn edge_orderings(g: &DecoratedGraph) -> Result<Vec<OrderedGraph>, GraphError> {
    let e = g.edges.len();
    if e > MAX_ORDERED_EDGES {
        return Err(GraphError::TooLarge(format!(
            "{e} edges exceed the ordering cap of {MAX_ORDERED_EDGES}"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut perm: Vec<usize> = (0..e).collect();
    loop {
        let ordered = OrderedGraph {
            graph: DecoratedGraph {
                vertices: g.vertices.clone(),
                edges: perm.iter().map(|&i| g.edges[i].clone()).collect(),
            },
        };
        seen.insert(ordered.normalized());
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(seen.into_iter().collect())
}

/// Advances `p` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdge {
    /// Global edge label (1-based).
    pub label: usize,
    pub vertex: usize,
    pub weight: u32,
}

/// The vertices of one side, the edges among them and the cut edges kept as
/// labeled half-edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfGraph {
    pub side: Side,
    pub vertices: Vec<Vertex>,
    pub compact_edges: Vec<Edge>,
    pub half_edges: Vec<HalfEdge>,
}

impl HalfGraph {
    /// Checks that each vertex's `D`-degree equals the weight of its
    /// half-edges.
    pub fn check_contact(&self, t: &TargetModel) -> Result<(), GraphError> {
        let comp = t.component(self.side);
        for (i, v) in self.vertices.iter().enumerate() {
            let w: i64 = self
                .half_edges
                .iter()
                .filter(|h| h.vertex == i)
                .map(|h| h.weight as i64)
                .sum();
            if comp.d_degree_of(&v.class) != w {
                return Err(GraphError::Invalid(format!(
                    "half-graph vertex {i}: D-degree differs from half-edge weight {w}"
                )));
            }
        }
        Ok(())
    }
}

/// Cuts an edge-ordered graph into its two sides and its per-vertex pieces.
pub fn half_graphs(og: &OrderedGraph) -> (HalfGraph, HalfGraph, Vec<HalfGraph>) {
    let g = &og.graph;
    let side_of = |side: Side| -> HalfGraph {
        let idx: Vec<usize> = (0..g.vertices.len()).filter(|&v| g.vertices[v].side == side).collect();
        let local = |v: usize| idx.iter().position(|&x| x == v).expect("on this side");
        HalfGraph {
            side,
            vertices: idx.iter().map(|&v| g.vertices[v].clone()).collect(),
            compact_edges: Vec::new(),
            half_edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| HalfEdge {
                    label: i + 1,
                    vertex: local(e.ends[side.index()]),
                    weight: e.weight,
                })
                .collect(),
        }
    };
    let pieces = (0..g.vertices.len())
        .map(|v| HalfGraph {
            side: g.vertices[v].side,
            vertices: vec![g.vertices[v].clone()],
            compact_edges: Vec::new(),
            half_edges: og
                .edges_at(v)
                .into_iter()
                .map(|label| HalfEdge {
                    label,
                    vertex: 0,
                    weight: g.edges[label - 1].weight,
                })
                .collect(),
        })
        .collect();
    (side_of(Side::One), side_of(Side::Two), pieces)
}

/// Glues the two sides back along matching half-edge labels.
pub fn reassemble(h1: &HalfGraph, h2: &HalfGraph) -> Result<OrderedGraph, GraphError> {
    if h1.side != Side::One || h2.side != Side::Two {
        return Err(GraphError::Invalid("halves must be side 1 and side 2".into()));
    }
    let n1 = h1.vertices.len();
    let mut labels: Vec<usize> = h1.half_edges.iter().map(|h| h.label).collect();
    labels.sort_unstable();
    let mut other: Vec<usize> = h2.half_edges.iter().map(|h| h.label).collect();
    other.sort_unstable();
    if labels != other || labels != (1..=labels.len()).collect::<Vec<_>>() {
        return Err(GraphError::Invalid("half-edge labels do not match".into()));
    }
    let mut edges = Vec::new();
    for label in labels {
        let a = h1.half_edges.iter().find(|h| h.label == label).expect("present");
        let b = h2.half_edges.iter().find(|h| h.label == label).expect("present");
        if a.weight != b.weight {
            return Err(GraphError::Invalid(format!("weight mismatch on half-edge {label}")));
        }
        edges.push(Edge {
            ends: [a.vertex, n1 + b.vertex],
            weight: a.weight,
        });
    }
    let mut vertices = h1.vertices.clone();
    vertices.extend(h2.vertices.iter().cloned());
    Ok(OrderedGraph {
        graph: DecoratedGraph { vertices, edges },
    })
}

/// The numeric coefficients attached to an edge-ordered graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicity {
    pub l: BigInt,
    pub cycle_coeff: Rat,
    pub numeric_coeff: Rat,
    pub deg_phi: Rat,
    pub deg_f: Rat,
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn lcm_of(weights: &[u32]) -> BigInt {
    weights.iter().fold(BigInt::one(), |acc, &w| acc.lcm(&BigInt::from(w)))
}

/// Coefficients from the edge weights; `one_vertex` selects the convention
/// for graphs without edges.
pub fn multiplicity_from_weights(weights: &[u32], one_vertex: bool) -> Multiplicity {
    let l = lcm_of(weights);
    let e_fact = factorial(weights.len());
    let prod: BigInt = weights.iter().map(|&w| BigInt::from(w)).product();
    let r = |p: &BigInt, q: &BigInt| Rat::new(p.clone(), q.clone());
    let numeric_coeff = if one_vertex {
        Rat::one()
    } else {
        r(&prod, &e_fact)
    };
    Multiplicity {
        cycle_coeff: r(&l, &e_fact),
        numeric_coeff,
        deg_phi: r(&prod, &l),
        deg_f: r(&e_fact, &l),
        l,
    }
}

pub fn multiplicity_data(og: &OrderedGraph) -> Multiplicity {
    multiplicity_from_weights(&og.graph.weights(), og.graph.vertices.len() == 1)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Sum of `1/|Aut(Γ)|` over a list of graphs.
pub fn inverse_aut_sum(graphs: &[DecoratedGraph]) -> Rat {
    graphs
        .iter()
        .map(|g| Rat::new(BigInt::one(), automorphism_count(g)))
        .fold(Rat::zero(), |a, b| a + b)
}

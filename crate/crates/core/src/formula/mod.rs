//! The numerical degeneration formula: a sum over edge-ordered bipartite
//! graphs and diagonal index tuples of signed products of vertex correlators.
//!
//! The global word is `γ_1 … γ_n` followed, edge by edge in label order, by
//! `δ¹_{e,j} δ²_{e,j}`. It is regrouped per vertex, side-1 vertices first and
//! within a side by smallest incident edge label; a vertex's block holds its
//! `γ_i` in marking order followed by its `δ^{r(V)}` in edge order.

pub mod providers;

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graphs::{edge_orderings, enumerate_graphs, multiplicity_data, GraphError, OrderedGraph};
use crate::rational::{self, Rat};
use crate::target::{
    dual_basis, koszul_sign, GradedBasis, GradedClass, Side, Symbol, TargetError, TargetModel,
};

pub use providers::{
    expand, multilinear_lookup, BasicQuery, DReference, InvariantProvider, Synthetic,
    TableProvider, TABLE_SCHEMA,
};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("insertion {0} is not homogeneous")]
    NonHomogeneous(usize),
    #[error("expected {expected} insertions, got {found}")]
    InsertionCount { expected: usize, found: usize },
    #[error("no value for {0}")]
    Unresolved(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    DuplicateRecord(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsoluteInsertion {
    pub psi: u32,
    pub class: GradedClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeInsertion {
    pub weight: u32,
    pub class: GradedClass,
}

/// A vertex correlator: absolute insertions over `H*(X_r)`, relative ones
/// over `H*(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorQuery {
    pub side: Side,
    pub genus: u32,
    pub class: Vec<i64>,
    pub absolute: Vec<AbsoluteInsertion>,
    pub relative: Vec<RelativeInsertion>,
}

fn class_text(basis: &GradedBasis, c: &GradedClass) -> String {
    let terms: Vec<String> = c
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| {
            let name = &basis.elements[i].name;
            if x.is_one() {
                name.clone()
            } else {
                format!("{}*{name}", rational::format_short(x))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl CorrelatorQuery {
    /// Human-readable form with classes written in basis names.
    pub fn describe(&self, t: &TargetModel) -> String {
        let comp = t.component(self.side);
        let class: Vec<String> = comp
            .generators
            .iter()
            .zip(&self.class)
            .filter(|(_, &c)| c != 0)
            .map(|(g, c)| format!("{c}*{g}"))
            .collect();
        let abs: Vec<String> = self
            .absolute
            .iter()
            .map(|a| format!("tau_{}({})", a.psi, class_text(&comp.cohomology, &a.class)))
            .collect();
        let rel: Vec<String> = self
            .relative
            .iter()
            .map(|r| format!("w{}:{}", r.weight, class_text(&t.d_cohomology, &r.class)))
            .collect();
        format!(
            "<{} | {}> on X{} genus {} class [{}]",
            abs.join(", "),
            rel.join(", "),
            self.side,
            self.genus,
            if class.is_empty() { "0".into() } else { class.join(" + ") }
        )
    }
}

/// One `τ_m(γ)` insertion over `H*(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub psi: u32,
    pub class: GradedClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphTerm {
    pub graph: OrderedGraph,
    pub coefficient: Rat,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub total: Rat,
    pub terms: Vec<GraphTerm>,
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rational::format(&self.total))
    }
}

fn insertion_degrees(t: &TargetModel, insertions: &[Insertion]) -> Result<Vec<u32>, FormulaError> {
    insertions
        .iter()
        .enumerate()
        .map(|(i, ins)| {
            ins.class.check_basis(&t.x_cohomology)?;
            match ins.class.homogeneous_degree(&t.x_cohomology) {
                Ok(d) => Ok(d.unwrap_or(0)),
                Err(TargetError::NonHomogeneous) => Err(FormulaError::NonHomogeneous(i + 1)),
                Err(e) => Err(e.into()),
            }
        })
        .collect()
}

/// Vertex order used for the regrouped word.
fn vertex_order(og: &OrderedGraph) -> Vec<usize> {
    let g = &og.graph;
    let mut order: Vec<usize> = (0..g.vertices.len()).collect();
    order.sort_by_key(|&v| {
        let first = og.edges_at(v).first().copied().unwrap_or(0);
        (g.vertices[v].side, first, v)
    });
    order
}

/// The contribution of one edge-ordered graph, multiplicity included.
pub fn evaluate_graph_term(
    t: &TargetModel,
    og: &OrderedGraph,
    insertions: &[Insertion],
    provider: &dyn InvariantProvider,
) -> Result<Rat, FormulaError> {
    let degrees = insertion_degrees(t, insertions)?;
    term_with_degrees(t, og, insertions, &degrees, provider)
}

fn term_with_degrees(
    t: &TargetModel,
    og: &OrderedGraph,
    insertions: &[Insertion],
    degrees: &[u32],
    provider: &dyn InvariantProvider,
) -> Result<Rat, FormulaError> {
    let g = &og.graph;
    let n = insertions.len();
    let ne = g.edges.len();
    let d = &t.d_cohomology;
    let top = d.top_degree().unwrap_or(0);
    let delta2 = if ne > 0 { dual_basis(d)? } else { Vec::new() };
    let mult = multiplicity_data(og);

    let order = vertex_order(og);
    let restricted: Vec<[GradedClass; 2]> = insertions
        .iter()
        .map(|ins| Ok([t.restrict(Side::One, &ins.class)?, t.restrict(Side::Two, &ins.class)?]))
        .collect::<Result<_, TargetError>>()?;
    let marking_vertex = |i: usize| -> usize {
        g.vertices
            .iter()
            .position(|v| v.markings.contains(&(i as u32 + 1)))
            .expect("every marking sits on a vertex")
    };
    let owner: Vec<usize> = (0..n).map(marking_vertex).collect();

    let mut total = Rat::zero();
    let mut tuple = vec![0usize; ne];
    loop {
        let delta_degree = |e: usize, side: Side| match side {
            Side::One => d.degree(tuple[e]),
            Side::Two => top - d.degree(tuple[e]),
        };
        let mut global: Vec<Symbol> = (0..n)
            .map(|i| Symbol {
                id: i,
                degree: degrees[i],
            })
            .collect();
        for e in 0..ne {
            for side in Side::BOTH {
                global.push(Symbol {
                    id: n + 2 * e + side.index(),
                    degree: delta_degree(e, side),
                });
            }
        }
        let mut regrouped = Vec::with_capacity(global.len());
        let mut product = Rat::one();
        for &v in &order {
            let vert = &g.vertices[v];
            let side = vert.side;
            let mut absolute = Vec::new();
            for i in (0..n).filter(|&i| owner[i] == v) {
                regrouped.push(global[i].clone());
                absolute.push(AbsoluteInsertion {
                    psi: insertions[i].psi,
                    class: restricted[i][side.index()].clone(),
                });
            }
            let mut relative = Vec::new();
            for e in (0..ne).filter(|&e| g.edges[e].ends[side.index()] == v) {
                regrouped.push(global[n + 2 * e + side.index()].clone());
                relative.push(RelativeInsertion {
                    weight: g.edges[e].weight,
                    class: match side {
                        Side::One => d.basis_class(tuple[e]),
                        Side::Two => delta2[tuple[e]].clone(),
                    },
                });
            }
            let q = CorrelatorQuery {
                side,
                genus: vert.genus,
                class: vert.class.clone(),
                absolute,
                relative,
            };
            let value = provider
                .lookup(t, &q)?
                .ok_or_else(|| FormulaError::Unresolved(q.describe(t)))?;
            product *= value;
        }
        let sign = koszul_sign(&global, &regrouped)?;
        total += product * sign.to_rat();

        let mut k = ne;
        loop {
            if k == 0 {
                return Ok(total * mult.numeric_coeff);
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < d.len() {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Evaluates the right-hand side for `⟨∏ τ_{m_i}(γ_i)⟩_{g,β}`.
pub fn evaluate(
    t: &TargetModel,
    g: u32,
    n: u32,
    beta: &[i64],
    insertions: &[Insertion],
    provider: &dyn InvariantProvider,
) -> Result<Evaluation, FormulaError> {
    if insertions.len() != n as usize {
        return Err(FormulaError::InsertionCount {
            expected: n as usize,
            found: insertions.len(),
        });
    }
    let degrees = insertion_degrees(t, insertions)?;
    let mut ordered = Vec::new();
    for graph in enumerate_graphs(t, g, n, beta)? {
        ordered.extend(edge_orderings(&graph)?);
    }
    let values: Vec<Result<Rat, FormulaError>> = ordered
        .par_iter()
        .map(|og| term_with_degrees(t, og, insertions, &degrees, provider))
        .collect();
    let mut total = Rat::zero();
    let mut terms = Vec::with_capacity(ordered.len());
    for (og, value) in ordered.into_iter().zip(values) {
        let value = value?;
        total += &value;
        terms.push(GraphTerm {
            coefficient: multiplicity_data(&og).numeric_coeff,
            graph: og,
            value,
        });
    }
    Ok(Evaluation { total, terms })
}

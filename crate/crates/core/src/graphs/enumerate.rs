//! Enumeration of `Ω(g, n, β)`.
//!
//! The total size `h·β` bounds the number of vertices with nonzero class, and
//! a vertex of zero class can only occur alone. The search picks a multiset
//! of vertex classes per side with the right pushforward, then a weight
//! multiset for every pair of opposite vertices matching the contact orders,
//! and finally genus and marking distributions. Results are deduplicated by
//! canonical form.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{canonical_form, DecoratedGraph, Edge, GraphError, UnionFind, Vertex, MAX_VERTICES};
use crate::target::{Side, TargetModel};

#[derive(Clone, Debug)]
struct ClassChoice {
    side: Side,
    class: Vec<i64>,
    size: i64,
    push: Vec<i64>,
    contact: i64,
}

fn effective_classes(t: &TargetModel, side: Side, budget: i64) -> Vec<ClassChoice> {
    let comp = t.component(side);
    let mut out = Vec::new();
    let mut cur = vec![0i64; comp.rank()];
    fn rec(
        comp: &crate::target::ComponentModel,
        side: Side,
        i: usize,
        budget: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<ClassChoice>,
    ) {
        if i == cur.len() {
            if cur.iter().any(|&c| c != 0) {
                out.push(ClassChoice {
                    side,
                    class: cur.clone(),
                    size: comp.size_of(cur),
                    push: comp.pushforward(cur),
                    contact: comp.d_degree_of(cur),
                });
            }
            return;
        }
        let mut c = 0;
        while c * comp.size[i] <= budget {
            cur[i] = c;
            rec(comp, side, i + 1, budget - c * comp.size[i], cur, out);
            c += 1;
        }
        cur[i] = 0;
    }
    rec(comp, side, 0, budget, &mut cur, &mut out);
    out
}

/// Multisets of class choices (as non-decreasing index lists) whose
/// pushforwards sum to `beta`.
fn class_multisets(choices: &[ClassChoice], beta: &[i64], budget: i64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut rem = beta.to_vec();
    fn rec(
        choices: &[ClassChoice],
        start: usize,
        budget: i64,
        rem: &mut Vec<i64>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rem.iter().all(|&x| x == 0) && !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == super::MAX_VERTICES {
            return;
        }
        for i in start..choices.len() {
            let c = &choices[i];
            if c.size > budget {
                continue;
            }
            for (r, p) in rem.iter_mut().zip(&c.push) {
                *r -= p;
            }
            cur.push(i);
            rec(choices, i, budget - c.size, rem, cur, out);
            cur.pop();
            for (r, p) in rem.iter_mut().zip(&c.push) {
                *r += p;
            }
        }
    }
    rec(choices, 0, budget, &mut rem, &mut cur, &mut out);
    out
}

/// Non-increasing lists of positive integers with sum at most `max_sum` and
/// at most `max_parts` parts, including the empty list.
fn partitions(max_sum: i64, max_parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: i64, largest: i64, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        if parts == 0 {
            return;
        }
        for w in (1..=largest.min(rem)).rev() {
            cur.push(w as u32);
            rec(rem - w, w, parts - 1, cur, out);
            cur.pop();
        }
    }
    rec(max_sum, max_sum, max_parts, &mut cur, &mut out);
    out
}

/// Every bipartite edge multiset with prescribed contact orders and at most
/// `max_edges` edges.
fn edge_structures(c1: &[i64], c2: &[i64], max_edges: usize) -> Vec<Vec<Edge>> {
    let n1 = c1.len();
    let n2 = c2.len();
    let mut out = Vec::new();
    let mut row = c1.to_vec();
    let mut col = c2.to_vec();
    let mut edges = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        cell: usize,
        n1: usize,
        n2: usize,
        row: &mut Vec<i64>,
        col: &mut Vec<i64>,
        budget: usize,
        edges: &mut Vec<Edge>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        if cell == n1 * n2 {
            if row.iter().all(|&x| x == 0) && col.iter().all(|&x| x == 0) {
                out.push(edges.clone());
            }
            return;
        }
        let (a, b) = (cell / n2, cell % n2);
        let last_in_row = b + 1 == n2;
        let cap = row[a].min(col[b]);
        for p in partitions(cap, budget) {
            let s: i64 = p.iter().map(|&w| w as i64).sum();
            if last_in_row && s != row[a] {
                continue;
            }
            row[a] -= s;
            col[b] -= s;
            let before = edges.len();
            edges.extend(p.iter().map(|&w| Edge {
                ends: [a, n1 + b],
                weight: w,
            }));
            rec(cell + 1, n1, n2, row, col, budget - p.len(), edges, out);
            edges.truncate(before);
            row[a] += s;
            col[b] += s;
        }
    }
    if n1 == 0 || n2 == 0 {
        if c1.iter().chain(c2).all(|&x| x == 0) {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, n1, n2, &mut row, &mut col, max_edges, &mut edges, &mut out);
    out
}

fn connected(n: usize, edges: &[Edge]) -> bool {
    let mut uf = UnionFind::new(n);
    for e in edges {
        uf.union(e.ends[0], e.ends[1]);
    }
    (1..n).all(|v| uf.find(v) == uf.find(0))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Calls `f` with every assignment of markings `1..=n` to `parts` vertices.
fn marking_assignments(n: u32, parts: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let total = (parts as u64).pow(n);
    for code in 0..total {
        let mut sets = vec![Vec::new(); parts];
        let mut c = code;
        for m in 1..=n {
            sets[(c % parts as u64) as usize].push(m);
            c /= parts as u64;
        }
        out.push(sets);
    }
    out
}

fn decorate(
    skeleton: &[(Side, Vec<i64>)],
    edges: &[Edge],
    g: u32,
    n: u32,
    sink: &mut BTreeSet<DecoratedGraph>,
) {
    let v = skeleton.len() as i64;
    let spare = g as i64 - 1 + v - edges.len() as i64;
    if spare < 0 {
        return;
    }
    for genera in compositions(spare as u32, skeleton.len()) {
        for marks in marking_assignments(n, skeleton.len()) {
            let vertices: Vec<Vertex> = skeleton
                .iter()
                .zip(&genera)
                .zip(marks)
                .map(|(((side, class), &genus), markings)| Vertex {
                    side: *side,
                    genus,
                    markings,
                    class: class.clone(),
                })
                .collect();
            let graph = DecoratedGraph {
                vertices,
                edges: edges.to_vec(),
            };
            let stable = (0..graph.vertices.len()).all(|i| {
                let vx = &graph.vertices[i];
                vx.class.iter().any(|&c| c != 0)
                    || 2 * vx.genus as usize + vx.markings.len() + graph.valence(i) >= 3
            });
            if stable {
                sink.insert(canonical_form(&graph));
            }
        }
    }
}

/// All graphs of type `(g, n, β)` up to isomorphism, in canonical order.
pub fn enumerate_graphs(
    t: &TargetModel,
    g: u32,
    n: u32,
    beta: &[i64],
) -> Result<Vec<DecoratedGraph>, GraphError> {
    t.validate()?;
    if beta.len() != t.class_rank {
        return Err(GraphError::Invalid(format!(
            "beta must have length {}",
            t.class_rank
        )));
    }
    let budget = t.size_bound(beta)?;
    let mut found = BTreeSet::new();

    if beta.iter().all(|&b| b == 0) {
        for side in Side::BOTH {
            let zero = vec![0; t.component(side).rank()];
            decorate(&[(side, zero)], &[], g, n, &mut found);
        }
        return Ok(found.into_iter().collect());
    }
    if budget < 1 {
        return Ok(Vec::new());
    }

    let mut choices = effective_classes(t, Side::One, budget);
    choices.extend(effective_classes(t, Side::Two, budget));
    let multisets = class_multisets(&choices, beta, budget);
    if multisets.iter().any(|m| m.len() > MAX_VERTICES) {
        return Err(GraphError::TooLarge(format!(
            "more than {MAX_VERTICES} vertices"
        )));
    }

    let parts: Vec<BTreeSet<DecoratedGraph>> = multisets
        .par_iter()
        .map(|ms| {
            let mut sink = BTreeSet::new();
            let side1: Vec<&ClassChoice> = ms.iter().map(|&i| &choices[i]).filter(|c| c.side == Side::One).collect();
            let side2: Vec<&ClassChoice> = ms.iter().map(|&i| &choices[i]).filter(|c| c.side == Side::Two).collect();
            let c1: Vec<i64> = side1.iter().map(|c| c.contact).collect();
            let c2: Vec<i64> = side2.iter().map(|c| c.contact).collect();
            if c1.iter().sum::<i64>() != c2.iter().sum::<i64>() {
                return sink;
            }
            let skeleton: Vec<(Side, Vec<i64>)> = side1
                .iter()
                .chain(&side2)
                .map(|c| (c.side, c.class.clone()))
                .collect();
            let vcount = skeleton.len();
            let max_edges = (g as i64 - 1 + vcount as i64).max(0) as usize;
            for edges in edge_structures(&c1, &c2, max_edges) {
                if connected(vcount, &edges) {
                    decorate(&skeleton, &edges, g, n, &mut sink);
                }
            }
            sink
        })
        .collect();
    for p in parts {
        found.extend(p);
    }
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::super::{automorphism_count, edge_orderings};
    use super::*;
    use crate::target::{fixtures, GradedBasis};

    fn t2() -> TargetModel {
        fixtures::two_lines(GradedBasis::point())
    }

    #[test]
    fn zero_class_has_no_graphs() {
        assert!(enumerate_graphs(&t2(), 0, 0, &[0, 0]).unwrap().is_empty());
    }

    #[test]
    fn class_one_one() {
        let gs = enumerate_graphs(&t2(), 0, 0, &[1, 1]).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].edges.len(), 1);
        assert_eq!(gs[0].edges[0].weight, 1);
    }

    #[test]
    fn class_two_two() {
        let gs = enumerate_graphs(&t2(), 0, 0, &[2, 2]).unwrap();
        assert_eq!(gs.len(), 3);
        let mut shapes: Vec<(usize, Vec<u32>)> =
            gs.iter().map(|g| (g.vertices.len(), g.weights())).collect();
        shapes.sort();
        assert_eq!(shapes, vec![(2, vec![2]), (3, vec![1, 1]), (3, vec![1, 1])]);
        for g in &gs {
            g.validate(&t2(), 0, 0, &[2, 2]).unwrap();
        }
    }

    #[test]
    fn orderings_times_automorphisms() {
        for (g, beta) in [(0, [2, 2]), (1, [2, 2]), (1, [3, 2]), (0, [3, 3])] {
            for gr in enumerate_graphs(&t2(), g, 1, &beta).unwrap() {
                let count = edge_orderings(&gr).unwrap().len();
                let e = gr.edges.len();
                assert_eq!(
                    automorphism_count(&gr) * count,
                    super::super::factorial(e)
                );
            }
        }
    }

    #[test]
    fn zero_class_single_vertex_when_stable() {
        let gs = enumerate_graphs(&t2(), 1, 1, &[0, 0]).unwrap();
        assert_eq!(gs.len(), 2);
        assert!(gs.iter().all(|g| g.vertices.len() == 1));
    }

    #[test]
    fn partitions_bounded() {
        assert_eq!(partitions(3, 3).len(), 1 + 1 + 2 + 3);
        assert_eq!(partitions(3, 1).len(), 4);
    }
}

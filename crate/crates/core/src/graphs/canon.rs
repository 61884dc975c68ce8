//! Canonical forms and automorphism counts of decorated graphs.
//!
//! Vertices are colored by their decorations and incident weights, the
//! coloring is refined by neighbour colors until stable, and the remaining
//! ties are broken by trying every permutation inside each color class. The
//! minimal sorted edge list over those permutations is the canonical form;
//! the number of permutations attaining it is the number of vertex
//! automorphisms.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{factorial, next_permutation, DecoratedGraph, Edge, Vertex};

type VertexKey = (Vertex, Vec<u32>);

fn initial_colors(g: &DecoratedGraph) -> Vec<usize> {
    let keys: Vec<VertexKey> = (0..g.vertices.len())
        .map(|v| {
            let mut w: Vec<u32> = g
                .edges
                .iter()
                .filter(|e| e.ends.contains(&v))
                .map(|e| e.weight)
                .collect();
            w.sort_unstable();
            (g.vertices[v].clone(), w)
        })
        .collect();
    rank(&keys)
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present"))
        .collect()
}

fn refine(g: &DecoratedGraph, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let keys: Vec<(usize, Vec<(usize, u32)>)> = (0..g.vertices.len())
            .map(|v| {
                let mut nb: Vec<(usize, u32)> = g
                    .edges
                    .iter()
                    .filter_map(|e| {
                        if e.ends[0] == v {
                            Some((colors[e.ends[1]], e.weight))
                        } else if e.ends[1] == v {
                            Some((colors[e.ends[0]], e.weight))
                        } else {
                            None
                        }
                    })
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = rank(&keys);
        let classes = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn encode(g: &DecoratedGraph, position: &[usize]) -> Vec<Edge> {
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| Edge {
            ends: [position[e.ends[0]], position[e.ends[1]]],
            weight: e.weight,
        })
        .collect();
    edges.sort();
    edges
}

struct Search {
    best: Option<(Vec<Edge>, Vec<usize>)>,
    hits: usize,
}

/// Returns the canonical representative of `g` together with the order of
/// its vertex automorphism group.
fn canonicalize(g: &DecoratedGraph) -> (DecoratedGraph, usize) {
    let colors = refine(g, initial_colors(g));
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        groups.entry(c).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut perms: Vec<Vec<usize>> = groups.iter().map(|grp| (0..grp.len()).collect()).collect();
    let mut search = Search { best: None, hits: 0 };
    loop {
        // order: new slot -> old vertex
        let order: Vec<usize> = groups
            .iter()
            .zip(&perms)
            .flat_map(|(grp, p)| p.iter().map(move |&i| grp[i]))
            .collect();
        let mut position = vec![0; order.len()];
        for (slot, &old) in order.iter().enumerate() {
            position[old] = slot;
        }
        let code = encode(g, &position);
        match &search.best {
            Some((b, _)) if code > *b => {}
            Some((b, _)) if code == *b => search.hits += 1,
            _ => {
                search.best = Some((code, order));
                search.hits = 1;
            }
        }
        // odometer over the per-group permutations
        let mut k = perms.len();
        loop {
            if k == 0 {
                let (edges, order) = search.best.expect("at least one ordering");
                let vertices = order.iter().map(|&v| g.vertices[v].clone()).collect();
                return (DecoratedGraph { vertices, edges }, search.hits);
            }
            k -= 1;
            if next_permutation(&mut perms[k]) {
                break;
            }
            perms[k].sort_unstable();
        }
    }
}

pub fn canonical_form(g: &DecoratedGraph) -> DecoratedGraph {
    canonicalize(g).0
}

/// Order of the group of decoration-preserving vertex permutations that
/// preserve the edge multiset.
pub fn vertex_automorphisms(g: &DecoratedGraph) -> usize {
    canonicalize(g).1
}

/// Full automorphism count: vertex automorphisms times the permutations of
/// parallel edges of equal weight.
pub fn automorphism_count(g: &DecoratedGraph) -> BigInt {
    let mut parallel: BTreeMap<&Edge, usize> = BTreeMap::new();
    for e in &g.edges {
        *parallel.entry(e).or_default() += 1;
    }
    parallel
        .values()
        .map(|&m| factorial(m))
        .product::<BigInt>()
        * BigInt::from(vertex_automorphisms(g))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{e, v};
    use super::*;

    #[test]
    fn relabelled_graphs_share_a_canonical_form() {
        let a = DecoratedGraph {
            vertices: vec![v(1, &[1]), v(1, &[2]), v(2, &[3])],
            edges: vec![e(0, 2, 1), e(1, 2, 2)],
        };
        let b = DecoratedGraph {
            vertices: vec![v(2, &[3]), v(1, &[2]), v(1, &[1])],
            edges: vec![e(1, 0, 2), e(2, 0, 1)],
        };
        assert_eq!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn refinement_separates_equal_looking_vertices() {
        // a 6-cycle: two orbits of three vertices, automorphism group of a
        // hexagon preserving sides has order 6
        let mut vs = Vec::new();
        for _ in 0..3 {
            vs.push(v(1, &[2]));
        }
        for _ in 0..3 {
            vs.push(v(2, &[2]));
        }
        let edges = vec![e(0, 3, 1), e(0, 4, 1), e(1, 4, 1), e(1, 5, 1), e(2, 5, 1), e(2, 3, 1)];
        let g = DecoratedGraph { vertices: vs, edges };
        assert_eq!(vertex_automorphisms(&g), 6);
    }
}

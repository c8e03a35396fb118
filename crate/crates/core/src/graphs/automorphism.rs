//! Automorphism groups by individualisation and colour refinement.
//!
//! The search walks the first path of the search tree to pick a base
//! `b_1, b_2, ...`. At each level the pointwise stabiliser `G_l` of
//! `b_1..b_{l-1}` is generated by the generators found below it plus one
//! automorphism for every point of the orbit of `b_l` not yet reached, so the
//! group order is the product of the basic orbit lengths and no group element
//! is ever stored.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

pub const DEFAULT_SEARCH_BOUND: usize = 128;

/// `p[v]` is the image of vertex `v`.
pub type Permutation = Vec<usize>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutGroup {
    pub n: usize,
    pub generators: Vec<Permutation>,
    pub order: u128,
    /// Base points chosen along the first path.
    pub base: Vec<usize>,
    /// Orbit length of each base point under its stabiliser level.
    pub basic_orbits: Vec<usize>,
}

impl AutGroup {
    pub fn identity(n: usize) -> Permutation {
        (0..n).collect()
    }

    /// `p ∘ q`, i.e. apply `q` first.
    pub fn compose(p: &[usize], q: &[usize]) -> Permutation {
        q.iter().map(|&v| p[v]).collect()
    }

    pub fn inverse(p: &[usize]) -> Permutation {
        let mut inv = vec![0; p.len()];
        for (v, &w) in p.iter().enumerate() {
            inv[w] = v;
        }
        inv
    }

    /// Vertex orbits as a representative label per vertex (smallest member).
    pub fn vertex_orbits(&self) -> Vec<usize> {
        orbit_labels(self.n, &self.generators, |p, v| p[v])
    }

    /// Materialises every element when the order is at most `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>, GraphError> {
        if self.order > cap as u128 {
            return Err(GraphError::CapExceeded { order: self.order, cap });
        }
        let id = Self::identity(self.n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = Self::compose(g, &x);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(GraphError::CapExceeded { order: seen.len() as u128, cap });
                    }
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(out)
    }

    /// A random product of `len` generators (the identity if there are none).
    pub fn random_word<R: Rng>(&self, rng: &mut R, len: usize) -> Permutation {
        let mut x = Self::identity(self.n);
        if self.generators.is_empty() {
            return x;
        }
        for _ in 0..len {
            let g = &self.generators[rng.random_range(0..self.generators.len())];
            x = Self::compose(g, &x);
        }
        x
    }
}

pub fn is_automorphism(g: &Graph, p: &[usize]) -> bool {
    p.len() == g.n() && g.edges().all(|(a, b)| g.has_edge(p[a], p[b]))
}

/// Union-find orbit labels of `0..size` under the action `act(generator, item)`.
pub(crate) fn orbit_labels<F>(size: usize, gens: &[Permutation], act: F) -> Vec<usize>
where
    F: Fn(&[usize], usize) -> usize,
{
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for x in 0..size {
            let y = act(g, x);
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                // smaller root wins so labels are canonical
                let (lo, hi) = (rx.min(ry), rx.max(ry));
                parent[hi] = lo;
            }
        }
    }
    (0..size).map(|x| find(&mut parent, x)).collect()
}

type Trace = Vec<Vec<(u32, Vec<u32>)>>;

/// Refines `colors` to the coarsest equitable colouring below it. The trace
/// records every round's sorted signatures; two colourings that lead to
/// equal traces are refined consistently.
fn refine(g: &Graph, colors: &mut [u32]) -> Trace {
    let mut trace = Vec::new();
    loop {
        let classes = colors.iter().copied().max().map_or(0, |m| m as usize + 1);
        let sigs: Vec<(u32, Vec<u32>)> = (0..g.n())
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        let round = distinct.clone();
        distinct.dedup();
        for (v, s) in sigs.iter().enumerate() {
            colors[v] = distinct.binary_search(s).expect("signature present") as u32;
        }
        trace.push(round);
        if distinct.len() == classes {
            return trace;
        }
    }
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let mut c = colors.to_vec();
    c[v] = colors.iter().copied().max().unwrap_or(0) + 1;
    c
}

/// Smallest non-singleton colour class, ties broken by colour.
fn target_cell(colors: &[u32]) -> Option<Vec<usize>> {
    let k = colors.iter().copied().max()? as usize + 1;
    let mut cells = vec![Vec::new(); k];
    for (v, &c) in colors.iter().enumerate() {
        cells[c as usize].push(v);
    }
    cells.into_iter().filter(|c| c.len() > 1).min_by_key(Vec::len)
}

struct Matcher<'a> {
    src: &'a Graph,
    tgt: &'a Graph,
}

impl Matcher<'_> {
    /// Finds an isomorphism `src -> tgt` respecting the given colourings.
    fn search(&self, mut cs: Vec<u32>, mut ct: Vec<u32>) -> Option<Permutation> {
        if refine(self.src, &mut cs) != refine(self.tgt, &mut ct) {
            return None;
        }
        let Some(cell) = target_cell(&cs) else {
            let mut by_color = vec![0; ct.len()];
            for (w, &c) in ct.iter().enumerate() {
                by_color[c as usize] = w;
            }
            let p: Permutation = cs.iter().map(|&c| by_color[c as usize]).collect();
            let ok = self.src.edges().all(|(a, b)| self.tgt.has_edge(p[a], p[b]));
            return ok.then_some(p);
        };
        let v = cell[0];
        let color = cs[v];
        let cs_next = individualize(&cs, v);
        (0..ct.len())
            .filter(|&w| ct[w] == color)
            .find_map(|w| self.search(cs_next.clone(), individualize(&ct, w)))
    }
}

/// Initial colouring keyed on degree and sorted distance profile, ranked
/// over the union of keys of both graphs so the colours agree.
fn initial_colors(graphs: &[&Graph]) -> Vec<Vec<u32>> {
    let keys: Vec<Vec<(usize, Vec<usize>)>> = graphs
        .iter()
        .map(|g| {
            let d = g.distances();
            (0..g.n()).map(|v| (g.degree(v), d.profile(v))).collect()
        })
        .collect();
    let mut all: Vec<&(usize, Vec<usize>)> = keys.iter().flatten().collect();
    all.sort();
    all.dedup();
    keys.iter()
        .map(|ks| {
            ks.iter()
                .map(|k| all.binary_search(&k).expect("key present") as u32)
                .collect()
        })
        .collect()
}

/// Computes a generating set and the order of `Aut(g)`.
pub fn automorphisms(g: &Graph, search_bound: usize) -> Result<AutGroup, GraphError> {
    if g.n() > search_bound {
        return Err(GraphError::SearchBoundExceeded { n: g.n(), bound: search_bound });
    }
    let matcher = Matcher { src: g, tgt: g };
    let mut colors = initial_colors(&[g]).remove(0);
    refine(g, &mut colors);

    let mut generators = Vec::new();
    let mut base = Vec::new();
    let mut basic_orbits = Vec::new();
    // first path, top down
    let mut levels = Vec::new();
    while let Some(cell) = target_cell(&colors) {
        let b = cell[0];
        levels.push((colors.clone(), cell));
        base.push(b);
        colors = individualize(&colors, b);
        refine(g, &mut colors);
    }
    // stabiliser chain, bottom up
    for (colors, cell) in levels.iter().rev() {
        let b = cell[0];
        let individualized = individualize(colors, b);
        let mut orbit = orbit_of(b, &generators);
        for &x in &cell[1..] {
            if orbit.contains(&x) {
                continue;
            }
            if let Some(p) = matcher.search(individualized.clone(), individualize(colors, x)) {
                generators.push(p);
                orbit = orbit_of(b, &generators);
            }
        }
        basic_orbits.push(orbit.len());
    }
    basic_orbits.reverse();
    let order = basic_orbits.iter().map(|&o| o as u128).product();
    Ok(AutGroup { n: g.n(), generators, order, base, basic_orbits })
}

fn orbit_of(b: usize, gens: &[Permutation]) -> HashSet<usize> {
    let mut orbit = HashSet::from([b]);
    let mut queue = VecDeque::from([b]);
    while let Some(x) = queue.pop_front() {
        for p in gens {
            if orbit.insert(p[x]) {
                queue.push_back(p[x]);
            }
        }
    }
    orbit
}

/// An isomorphism `g -> h` (`p[v]` is the image of `v`), if one exists.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Permutation> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    if g.n() == 0 {
        return Some(Vec::new());
    }
    let mut colors = initial_colors(&[g, h]);
    let ct = colors.pop().unwrap();
    let cs = colors.pop().unwrap();
    Matcher { src: g, tgt: h }.search(cs, ct)
}

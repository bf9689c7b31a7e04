use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest vertex count accepted by the enumerator.
pub const MAX_VERTICES: usize = 4;
/// Largest external leg count accepted by the enumerator.
pub const MAX_LEGS: usize = 8;
/// Valence of every vertex.
pub const VALENCE: usize = 4;

/// A 4-valent multigraph with labelled external legs. `legs[i]` is the
/// vertex carrying leg i; internal edges are unordered vertex pairs kept
/// sorted, self-loops allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Diagram {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

impl Diagram {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Result<Self> {
        let mut deg = vec![0usize; vertices];
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) refers to a missing vertex")));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        for &v in &legs {
            if v >= vertices {
                return Err(Error::InvalidArgument(format!("leg attached to missing vertex {v}")));
            }
            deg[v] += 1;
        }
        if let Some(v) = deg.iter().position(|d| *d != VALENCE) {
            return Err(Error::InvalidArgument(format!("vertex {v} has valence {}", deg[v])));
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        Ok(Self { vertices, edges, legs })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn internal_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    /// Number of external legs at each vertex.
    pub fn external_counts(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &v in &self.legs {
            *out.entry(v).or_insert(0) += 1;
        }
        out
    }

    pub fn self_loops(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    /// Connected components of the vertex graph.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        (0..self.vertices).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// Independent cycles of the internal graph.
    pub fn loops(&self) -> usize {
        self.edges.len() + self.components() - self.vertices
    }

    pub fn is_tree(&self) -> bool {
        self.loops() == 0
    }

    /// Power of hbar carried by the diagram: internal edges minus vertices.
    pub fn hbar_power(&self) -> i32 {
        self.edges.len() as i32 - self.vertices as i32
    }

    fn relabel(&self, perm: &[usize]) -> Diagram {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        Diagram { vertices: self.vertices, edges, legs: self.legs.iter().map(|&v| perm[v]).collect() }
    }

    /// Smallest relabelling under vertex permutations.
    pub fn canonical(&self) -> Diagram {
        permutations(self.vertices).iter().map(|p| self.relabel(p)).min().unwrap_or_else(|| self.clone())
    }

    /// Vertex permutations that map the diagram to itself (legs fixed).
    pub fn vertex_automorphisms(&self) -> usize {
        permutations(self.vertices).iter().filter(|p| self.relabel(p) == *self).count().max(1)
    }

    /// Symmetry factor: vertex automorphisms times k! for every k-fold
    /// multiple edge times 2 for every self-loop.
    pub fn symmetry_factor(&self) -> u64 {
        let mut m = self.vertex_automorphisms() as u64;
        let mut i = 0;
        while i < self.edges.len() {
            let mut j = i;
            while j < self.edges.len() && self.edges[j] == self.edges[i] {
                j += 1;
            }
            m *= (1..=(j - i) as u64).product::<u64>();
            i = j;
        }
        m * (1u64 << self.self_loops())
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn multigraphs(rem: &mut [usize], last: (usize, usize), cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    let Some(v) = rem.iter().position(|d| *d > 0) else {
        out.push(cur.clone());
        return;
    };
    let start = if last.0 == v { last.1 } else { v };
    for w in start..rem.len() {
        let ok = if w == v { rem[v] >= 2 } else { rem[w] > 0 };
        if !ok {
            continue;
        }
        rem[v] -= 1;
        rem[w] -= 1;
        cur.push((v, w));
        multigraphs(rem, (v, w), cur, out);
        cur.pop();
        rem[v] += 1;
        rem[w] += 1;
    }
}

/// All isomorphism classes of diagrams with `n` vertices and `l` labelled
/// external legs, with their symmetry factors, in canonical order.
/// Disconnected diagrams and vacuum components are included.
pub fn enumerate_diagrams(n: usize, l: usize) -> Result<Vec<(Diagram, u64)>> {
    if n > MAX_VERTICES || l > MAX_LEGS {
        return Err(Error::SizeCap(format!("N = {n}, L = {l} (limits {MAX_VERTICES}, {MAX_LEGS})")));
    }
    if l > VALENCE * n || (VALENCE * n - l) % 2 != 0 {
        return Err(Error::InvalidArgument(format!("no 4-valent diagram has N = {n} and L = {l}")));
    }
    let mut seen = BTreeSet::new();
    let mut legs = vec![0usize; l];
    loop {
        let mut count = vec![0usize; n];
        legs.iter().for_each(|&v| count[v] += 1);
        if count.iter().all(|c| *c <= VALENCE) {
            let mut rem: Vec<usize> = count.iter().map(|c| VALENCE - c).collect();
            let mut graphs = Vec::new();
            multigraphs(&mut rem, (0, 0), &mut Vec::new(), &mut graphs);
            for edges in graphs {
                seen.insert(Diagram::new(n, edges, legs.clone())?.canonical());
            }
        }
        // next leg assignment in base n
        let mut i = 0;
        while i < l {
            legs[i] += 1;
            if legs[i] < n {
                break;
            }
            legs[i] = 0;
            i += 1;
        }
        if i == l {
            break;
        }
    }
    Ok(seen.into_iter().map(|d| {
        let m = d.symmetry_factor();
        (d, m)
    }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fish_and_sunset() {
        let fish = Diagram::new(2, vec![(0, 1), (0, 1)], vec![0, 0, 1, 1]).unwrap();
        assert_eq!(fish.symmetry_factor(), 2);
        assert_eq!(fish.loops(), 1);
        assert_eq!(fish.hbar_power(), 0);
        let sunset = Diagram::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![0, 1]).unwrap();
        assert_eq!(sunset.symmetry_factor(), 6);
        assert_eq!(sunset.loops(), 2);
        let figure_eight = Diagram::new(1, vec![(0, 0), (0, 0)], vec![]).unwrap();
        assert_eq!(figure_eight.symmetry_factor(), 8);
        assert!(Diagram::new(1, vec![(0, 0)], vec![0]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_diagrams(1, 4).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].1, 1);
        let fish: Vec<_> = enumerate_diagrams(2, 4)
            .unwrap()
            .into_iter()
            .filter(|(d, _)| d.internal_edges() == [(0, 1), (0, 1)])
            .collect();
        assert_eq!(fish.len(), 3); // three channels of the labelled legs
        assert!(fish.iter().all(|(_, m)| *m == 2));
        assert!(matches!(enumerate_diagrams(5, 0), Err(Error::SizeCap(_))));
        assert!(enumerate_diagrams(1, 3).is_err());
        assert_eq!(enumerate_diagrams(0, 0).unwrap().len(), 1);
    }
}

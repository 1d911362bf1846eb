//! Overlap graphs and the Ursell connectivity weight `psi'_c`.

use crate::error::{Error, Result};
use crate::lattice::{LocatedTile, Vertex};

/// Largest graph order for which [`ursell`] enumerates edge subsets.
pub const MAX_URSELL_ORDER: usize = 6;

/// Simple undirected loop-free graph on at most 8 vertices, stored as one
/// adjacency bitmask per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OverlapGraph {
    adj: Vec<u8>,
}

impl OverlapGraph {
    pub fn empty(order: usize) -> Self {
        assert!(order <= 8, "overlap graphs hold at most 8 vertices");
        Self {
            adj: vec![0; order],
        }
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(order);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Edge `(i, j)` iff tiles `i` and `j` share a lattice vertex.
    pub fn of_tiles(tiles: &[LocatedTile]) -> Self {
        let mut g = Self::empty(tiles.len());
        for i in 0..tiles.len() {
            for j in (i + 1)..tiles.len() {
                if tiles[i].intersects(&tiles[j]) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a] |= 1 << b;
            self.adj[b] |= 1 << a;
        }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.has_edge(a, b))
            .collect()
    }

    pub fn adjacency(&self) -> &[u8] {
        &self.adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        if n == 0 {
            return false;
        }
        let full = ((1u16 << n) - 1) as u8;
        let mut seen = 1u8;
        loop {
            let mut next = seen;
            for v in 0..n {
                if seen & (1 << v) != 0 {
                    next |= self.adj[v];
                }
            }
            if next == seen {
                return seen == full;
            }
            seen = next;
        }
    }
}

/// Sum of `(-1)^|E|` over the connected spanning edge subsets `E` of the
/// graph. Zero for disconnected graphs, one for a single vertex.
pub fn ursell(graph: &OverlapGraph) -> Result<i64> {
    let n = graph.order();
    if n > MAX_URSELL_ORDER {
        return Err(Error::OrderOutOfRange {
            s: n,
            min: 1,
            max: MAX_URSELL_ORDER,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Ursell weight of the empty graph".into(),
        ));
    }
    let edges = graph.edges();
    let mut total = 0i64;
    for mask in 0u32..(1 << edges.len()) {
        if spans_connected(n, &edges, mask) {
            total += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(total)
}

fn spans_connected(n: usize, edges: &[(usize, usize)], mask: u32) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut components = n;
    for (k, &(a, b)) in edges.iter().enumerate() {
        if mask & (1 << k) != 0 {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
    }
    components == 1
}

/// Number of vertex orderings whose every prefix induces a connected
/// subgraph and whose first vertex lies in `first_allowed` (bitmask).
pub fn prefix_connected_orderings(adj: &[u8], first_allowed: u8) -> u64 {
    fn rec(adj: &[u8], placed: u8, frontier: u8, full: u8) -> u64 {
        if placed == full {
            return 1;
        }
        let mut total = 0;
        let mut cand = frontier & !placed;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            total += rec(adj, placed | (1 << v), frontier | adj[v], full);
        }
        total
    }
    let n = adj.len();
    let full = ((1u16 << n) - 1) as u8;
    (0..n)
        .filter(|&v| first_allowed & (1 << v) != 0)
        .map(|v| rec(adj, 1 << v, adj[v], full))
        .sum()
}

/// An ordered tuple of located tiles (repetitions allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterTuple {
    tiles: Vec<LocatedTile>,
    union: Vec<Vertex>,
}

impl ClusterTuple {
    pub fn new(tiles: Vec<LocatedTile>) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::InvalidArgument(
                "cluster tuple needs at least one tile".into(),
            ));
        }
        let mut union: Vec<Vertex> = tiles.iter().flat_map(|t| t.vertices().to_vec()).collect();
        union.sort();
        union.dedup();
        Ok(Self { tiles, union })
    }

    /// Like [`ClusterTuple::new`] but rejects tuples whose overlap graph is
    /// disconnected.
    pub fn connected(tiles: Vec<LocatedTile>) -> Result<Self> {
        let t = Self::new(tiles)?;
        if !t.overlap_graph().is_connected() {
            return Err(Error::InvalidArgument(
                "overlap graph is disconnected".into(),
            ));
        }
        Ok(t)
    }

    pub fn tiles(&self) -> &[LocatedTile] {
        &self.tiles
    }

    pub fn union(&self) -> &[Vertex] {
        &self.union
    }

    pub fn overlap_graph(&self) -> OverlapGraph {
        OverlapGraph::of_tiles(&self.tiles)
    }

    pub fn ursell_weight(&self) -> Result<i64> {
        ursell(&self.overlap_graph())
    }
}

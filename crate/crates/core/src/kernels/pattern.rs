//! Exact kernel sums by identification patterns instead of explicit tuples.
//!
//! Write each tile of an `s`-tuple as an ordered endpoint pair, giving `2s`
//! endpoint slots. A tuple is determined by which slots land on the same
//! lattice vertex (a set partition `pi` of the slots) plus an injective
//! placement of the blocks of `pi`. Expanding `prod (f - f_0)` over subsets
//! `D` of tiles that take the dimer part `f`, the lattice only enters
//! through the number of placements in which every tile of `D` lands on a
//! lattice edge. Injective placement counts are obtained from unrestricted
//! homomorphism counts by Moebius inversion on the partition lattice:
//!
//! ```text
//! sum_pi psi(pi) inj_D(pi) = sum_rho hom_D(rho) * sum_{pi <= rho} mu(pi, rho) psi(pi)
//! ```
//!
//! The inner sum depends only on `s` and is tabulated once. `hom_D(rho)`
//! factorizes over connected components of the graph the `D`-tiles draw on
//! the blocks of `rho`: `N` per component times the number of placements of
//! that component with one vertex pinned at the origin, enumerated on the
//! actual torus. Requires every side `>= 3` so that each vertex pair is at
//! most one located dimer.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ursell::{ursell, OverlapGraph};
use crate::error::{Error, Result};
use crate::lattice::{TorusLattice, Vertex, WeightAssignment};
use crate::rational::{pow, Rational};

/// Highest order with a tabulated pattern set.
pub const PATTERN_MAX_ORDER: usize = 5;

#[derive(Debug)]
struct PatternRow {
    /// Block label of each endpoint slot, slot `2i` and `2i + 1` being the
    /// two ends of tile `i`.
    labels: Vec<u8>,
    blocks: u8,
    coef: i64,
}

#[derive(Debug)]
pub struct PatternTable {
    s: usize,
    rows: Vec<PatternRow>,
}

impl PatternTable {
    pub fn order(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Calls `visit` with every restricted growth string of length `len`.
fn for_each_partition(len: usize, visit: &mut impl FnMut(&[u8])) {
    fn rec(buf: &mut Vec<u8>, len: usize, max: u8, visit: &mut impl FnMut(&[u8])) {
        if buf.len() == len {
            visit(buf);
            return;
        }
        let limit = if buf.is_empty() { 0 } else { max + 1 };
        for label in 0..=limit {
            buf.push(label);
            rec(buf, len, max.max(label), visit);
            buf.pop();
        }
    }
    if len == 0 {
        visit(&[]);
        return;
    }
    rec(&mut Vec::with_capacity(len), len, 0, visit);
}

fn moebius(sigma: &[u8]) -> i64 {
    let mut sizes = [0i64; 16];
    for &b in sigma {
        sizes[b as usize] += 1;
    }
    sizes
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let f: i64 = (1..n).product();
            if n % 2 == 0 {
                -f
            } else {
                f
            }
        })
        .product()
}

fn build_table(s: usize) -> PatternTable {
    let slots = 2 * s;
    let mut psi_memo: HashMap<Vec<u8>, i64> = HashMap::new();
    let mut coef: HashMap<Vec<u8>, i64> = HashMap::new();
    for_each_partition(slots, &mut |pi| {
        if (0..s).any(|i| pi[2 * i] == pi[2 * i + 1]) {
            return;
        }
        let mut adj = vec![0u8; s];
        for i in 0..s {
            for j in (i + 1)..s {
                let (a, b, c, d) = (pi[2 * i], pi[2 * i + 1], pi[2 * j], pi[2 * j + 1]);
                if a == c || a == d || b == c || b == d {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let psi = *psi_memo.entry(adj.clone()).or_insert_with(|| {
            let mut g = OverlapGraph::empty(s);
            for (i, row) in adj.iter().enumerate() {
                for j in (i + 1)..s {
                    if row & (1 << j) != 0 {
                        g.add_edge(i, j);
                    }
                }
            }
            ursell(&g).expect("pattern orders stay within the Ursell bound")
        });
        if psi == 0 {
            return;
        }
        let k = *pi.iter().max().unwrap() as usize + 1;
        for_each_partition(k, &mut |sigma| {
            let rho: Vec<u8> = pi.iter().map(|&b| sigma[b as usize]).collect();
            *coef.entry(rho).or_default() += psi * moebius(sigma);
        });
    });
    let mut rows: Vec<PatternRow> = coef
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(labels, coef)| PatternRow {
            blocks: labels.iter().max().map_or(0, |m| m + 1),
            labels,
            coef,
        })
        .collect();
    rows.sort_by(|a, b| a.labels.cmp(&b.labels));
    PatternTable { s, rows }
}

static TABLES: [OnceLock<PatternTable>; PATTERN_MAX_ORDER + 1] =
    [const { OnceLock::new() }; PATTERN_MAX_ORDER + 1];

/// Lattice-independent pattern coefficients for order `s`, built on first
/// use.
pub fn pattern_table(s: usize) -> Result<&'static PatternTable> {
    if s == 0 || s > PATTERN_MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            s,
            min: 1,
            max: PATTERN_MAX_ORDER,
        });
    }
    Ok(TABLES[s].get_or_init(|| build_table(s)))
}

fn is_adjacent(lattice: &TorusLattice, a: Vertex, b: Vertex) -> bool {
    (0..lattice.dim())
        .any(|axis| lattice.step(a, axis, true) == b || lattice.step(a, axis, false) == b)
}

/// Placements of a connected pattern graph with vertex 0 at the origin and
/// every edge on a lattice edge. Vertices must be numbered so that each
/// vertex after the first has a lower-numbered neighbor.
fn anchored_placements(lattice: &TorusLattice, order: usize, edges: &[(u8, u8)]) -> u64 {
    let mut back: Vec<Vec<usize>> = vec![Vec::new(); order];
    for &(a, b) in edges {
        back[b as usize].push(a as usize);
    }
    fn place(lattice: &TorusLattice, back: &[Vec<usize>], pos: &mut Vec<Vertex>, v: usize) -> u64 {
        if v == back.len() {
            return 1;
        }
        let parent = back[v][0];
        let mut total = 0;
        for w in lattice.neighbors(pos[parent]) {
            if back[v][1..]
                .iter()
                .all(|&u| is_adjacent(lattice, pos[u], w))
            {
                pos.push(w);
                total += place(lattice, back, pos, v + 1);
                pos.pop();
            }
        }
        total
    }
    let mut pos = vec![lattice.origin()];
    place(lattice, &back, &mut pos, 1)
}

struct HomCounter<'a> {
    lattice: &'a TorusLattice,
    powers_of_n: Vec<BigInt>,
    memo: HashMap<Vec<(u8, u8)>, u64>,
}

impl HomCounter<'_> {
    /// Maps from the blocks of `labels` to the torus sending every tile in
    /// `dimer_mask` onto a lattice edge.
    fn count(&mut self, labels: &[u8], blocks: usize, dimer_mask: u32) -> BigInt {
        let s = labels.len() / 2;
        let mut adj = [0u16; 16];
        for i in 0..s {
            if dimer_mask & (1 << i) == 0 {
                continue;
            }
            let (a, b) = (labels[2 * i] as usize, labels[2 * i + 1] as usize);
            if a == b {
                return BigInt::zero();
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let mut seen = 0u16;
        let mut components = 0;
        let mut factor = BigInt::one();
        for root in 0..blocks {
            if seen & (1 << root) != 0 {
                continue;
            }
            components += 1;
            if adj[root] == 0 {
                seen |= 1 << root;
                continue;
            }
            // Breadth-first relabelling gives every later vertex an earlier
            // neighbor.
            let mut order = vec![root];
            seen |= 1 << root;
            let mut head = 0;
            while head < order.len() {
                let v = order[head];
                head += 1;
                let mut nb = adj[v] & !seen;
                while nb != 0 {
                    let w = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    seen |= 1 << w;
                    order.push(w);
                }
            }
            let mut rank = [0u8; 16];
            for (r, &v) in order.iter().enumerate() {
                rank[v] = r as u8;
            }
            let mut edges: Vec<(u8, u8)> = Vec::new();
            for &v in &order {
                let mut nb = adj[v];
                while nb != 0 {
                    let w = nb.trailing_zeros() as usize;
                    nb &= nb - 1;
                    if rank[v] < rank[w] {
                        edges.push((rank[v], rank[w]));
                    }
                }
            }
            edges.sort_unstable_by_key(|&(a, b)| (b, a));
            let lattice = self.lattice;
            let placements = *self
                .memo
                .entry(edges)
                .or_insert_with_key(|e| anchored_placements(lattice, order.len(), e));
            if placements == 0 {
                return BigInt::zero();
            }
            factor *= BigInt::from(placements);
        }
        factor * &self.powers_of_n[components]
    }
}

/// `J_s` on `lattice`: the sum over ordered `s`-tuples of located tiles with
/// connected overlap graph of `psi'_c * prod v`.
pub fn pattern_kernel_sum(lattice: &TorusLattice, s: usize) -> Result<Rational> {
    if lattice.min_side() < 3 {
        return Err(Error::InvalidLattice(format!(
            "pattern engine needs every side >= 3, got {:?}",
            lattice.dims()
        )));
    }
    let table = pattern_table(s)?;
    let wa = WeightAssignment::dimer(lattice)?;
    let n = BigInt::from(lattice.num_vertices());
    let mut powers_of_n = vec![BigInt::one()];
    for k in 0..=2 * s {
        let next = &powers_of_n[k] * &n;
        powers_of_n.push(next);
    }
    let mut hom = HomCounter {
        lattice,
        powers_of_n,
        memo: HashMap::new(),
    };
    let mut total = Rational::zero();
    for mask in 0u32..(1 << s) {
        let mut sum = BigInt::zero();
        for row in &table.rows {
            let h = hom.count(&row.labels, row.blocks as usize, mask);
            if !h.is_zero() {
                sum += h * row.coef;
            }
        }
        if sum.is_zero() {
            continue;
        }
        let in_d = mask.count_ones() as i64;
        total += Rational::from_integer(sum)
            * pow(&wa.dimer_value, in_d)
            * pow(&wa.v_other(), s as i64 - in_d);
    }
    // Each unordered endpoint pair was counted in both orientations.
    Ok(total / Rational::from_integer(BigInt::from(1u64 << s)))
}

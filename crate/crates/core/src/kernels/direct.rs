//! Brute-force kernel sums over explicit tuples of located tiles.
//!
//! Tuples are generated in prefix-connected order (each new tile meets the
//! union of the previous ones) and reweighted by `s! / c`, where `c` counts
//! the prefix-connected orderings of the same overlap pattern. The result is
//! the sum over all ordered tuples with a connected overlap graph.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ursell::{prefix_connected_orderings, ursell, OverlapGraph};
use crate::error::{Error, Result};
use crate::lattice::{TorusLattice, Vertex, WeightAssignment};
use crate::rational::{int, pow, Rational};

/// How the translation symmetry of the torus is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Sum over tuples whose union contains the origin, each weighted by
    /// `1/|union|`, then multiply by `N`.
    #[default]
    Anchored,
    /// Sum over every tuple on the torus.
    Full,
}

/// Largest vertex count supported by the explicit enumerator.
pub const DIRECT_MAX_VERTICES: usize = 4096;

pub(crate) struct TileTable {
    ends: Vec<(u32, u32)>,
    /// Edge multiplicity of the pair, 0 for non-edges.
    mult: Vec<u8>,
    by_vertex: Vec<Vec<u32>>,
}

impl TileTable {
    /// Every 2-subset once; a pair realized by `m` edges carries `f = m/(2d)`.
    pub(crate) fn new(lattice: &TorusLattice) -> Self {
        let n = lattice.num_vertices();
        let mut ends = Vec::new();
        let mut mult = Vec::new();
        let mut by_vertex = vec![Vec::new(); n];
        for a in 0..n {
            for b in (a + 1)..n {
                let idx = ends.len() as u32;
                ends.push((a as u32, b as u32));
                mult.push(lattice.dimer_multiplicity(Vertex(a), Vertex(b)) as u8);
                by_vertex[a].push(idx);
                by_vertex[b].push(idx);
            }
        }
        Self {
            ends,
            mult,
            by_vertex,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.ends.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Bucket {
    singles: u8,
    doubles: u8,
    union_size: u8,
    psi: i64,
    orderings: u64,
}

struct Walker<'a> {
    table: &'a TileTable,
    s: usize,
    reduction: Reduction,
    budget: u64,
    visited: u64,
    tiles: Vec<u32>,
    union: Vec<u32>,
    psi_memo: HashMap<Vec<u8>, i64>,
    order_memo: HashMap<(Vec<u8>, u8), u64>,
    buckets: HashMap<Bucket, u64>,
}

impl Walker<'_> {
    fn extend(&mut self) -> Result<()> {
        if self.tiles.len() == self.s {
            return self.record();
        }
        let ulen = self.union.len();
        for p in 0..ulen {
            let x = self.union[p];
            for &t in &self.table.by_vertex[x as usize] {
                let (a, b) = self.table.ends[t as usize];
                let other = if a == x { b } else { a };
                let other_pos = self.union.iter().position(|&u| u == other);
                if matches!(other_pos, Some(q) if q < p) {
                    continue;
                }
                self.tiles.push(t);
                let fresh = other_pos.is_none();
                if fresh {
                    self.union.push(other);
                }
                self.extend()?;
                if fresh {
                    self.union.pop();
                }
                self.tiles.pop();
            }
        }
        Ok(())
    }

    fn start(&mut self, t: u32) -> Result<()> {
        let (a, b) = self.table.ends[t as usize];
        self.tiles.push(t);
        self.union.push(a);
        self.union.push(b);
        self.extend()?;
        self.union.clear();
        self.tiles.clear();
        Ok(())
    }

    fn record(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let s = self.s;
        let mut adj = vec![0u8; s];
        let mut zero_mask = 0u8;
        let mut singles = 0u8;
        let mut doubles = 0u8;
        for i in 0..s {
            let (a, b) = self.table.ends[self.tiles[i] as usize];
            if a == 0 || b == 0 {
                zero_mask |= 1 << i;
            }
            match self.table.mult[self.tiles[i] as usize] {
                0 => {}
                1 => singles += 1,
                _ => doubles += 1,
            }
            for j in (i + 1)..s {
                let (c, d) = self.table.ends[self.tiles[j] as usize];
                if a == c || a == d || b == c || b == d {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let first_allowed = match self.reduction {
            Reduction::Anchored => zero_mask,
            Reduction::Full => ((1u16 << s) - 1) as u8,
        };
        let psi = match self.psi_memo.get(&adj) {
            Some(&p) => p,
            None => {
                let mut g = OverlapGraph::empty(s);
                for (i, row) in adj.iter().enumerate() {
                    for j in (i + 1)..s {
                        if row & (1 << j) != 0 {
                            g.add_edge(i, j);
                        }
                    }
                }
                let p = ursell(&g)?;
                self.psi_memo.insert(adj.clone(), p);
                p
            }
        };
        let key = (adj, first_allowed);
        let orderings = match self.order_memo.get(&key) {
            Some(&c) => c,
            None => {
                let c = prefix_connected_orderings(&key.0, key.1);
                self.order_memo.insert(key, c);
                c
            }
        };
        *self
            .buckets
            .entry(Bucket {
                singles,
                doubles,
                union_size: self.union.len() as u8,
                psi,
                orderings,
            })
            .or_default() += 1;
        Ok(())
    }
}

/// Result of an explicit enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSum {
    /// `J_s`: the sum over all ordered `s`-tuples with connected overlap
    /// graph of `psi'_c * prod v`.
    pub total: Rational,
    /// Number of generated tuples.
    pub visited: u64,
}

/// `J_s` on `lattice` by explicit enumeration.
pub fn direct_kernel_sum(
    lattice: &TorusLattice,
    s: usize,
    reduction: Reduction,
    budget: u64,
) -> Result<DirectSum> {
    if s == 0 || s > super::ursell::MAX_URSELL_ORDER {
        return Err(Error::OrderOutOfRange {
            s,
            min: 1,
            max: super::ursell::MAX_URSELL_ORDER,
        });
    }
    let n = lattice.num_vertices();
    if n > DIRECT_MAX_VERTICES {
        return Err(Error::SizeBoundExceeded {
            vertices: n,
            bound: DIRECT_MAX_VERTICES,
        });
    }
    let wa = WeightAssignment::dimer(lattice)?;
    let table = TileTable::new(lattice);
    let mut w = Walker {
        table: &table,
        s,
        reduction,
        budget,
        visited: 0,
        tiles: Vec::with_capacity(s),
        union: Vec::with_capacity(2 * s),
        psi_memo: HashMap::new(),
        order_memo: HashMap::new(),
        buckets: HashMap::new(),
    };
    match reduction {
        Reduction::Anchored => {
            for &t in &table.by_vertex[0] {
                w.start(t)?;
            }
        }
        Reduction::Full => {
            for t in 0..table.len() as u32 {
                w.start(t)?;
            }
        }
    }

    let v_dimer = wa.v_dimer();
    let v_double = &wa.dimer_value * int(2) - &wa.f0;
    let v_other = wa.v_other();
    let s_fact: u64 = (1..=s as u64).product();
    let mut total = Rational::zero();
    for (bucket, count) in &w.buckets {
        let mut term = Rational::new(
            BigInt::from(*count) * BigInt::from(bucket.psi) * BigInt::from(s_fact),
            BigInt::from(bucket.orderings),
        );
        if reduction == Reduction::Anchored {
            term /= int(bucket.union_size as i64);
        }
        let others = s - bucket.singles as usize - bucket.doubles as usize;
        term *= pow(&v_dimer, bucket.singles as i64)
            * pow(&v_double, bucket.doubles as i64)
            * pow(&v_other, others as i64);
        total += term;
    }
    if reduction == Reduction::Anchored {
        total *= int(n as i64);
    }
    Ok(DirectSum {
        total,
        visited: w.visited,
    })
}

/// The six pieces of `Jbar_2`: `A, B, C` from coinciding vertex sets and
/// `D, E, F` from pairs meeting in one vertex; within each triple the
/// `f*f`, `f_0*f_0` and cross terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixTerms {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub f: Rational,
}

impl AppendixTerms {
    pub fn total(&self) -> Rational {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
            .into_iter()
            .sum()
    }

    pub fn as_array(&self) -> [&Rational; 6] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f]
    }

    pub const LABELS: [&'static str; 6] = ["A", "B", "C", "D", "E", "F"];
}

/// Term-by-term `Jbar_2 = -(1/2N) sum' (f - f_0)(f' - f_0)` over ordered
/// pairs of located tiles with non-empty intersection.
pub fn appendix_breakdown(lattice: &TorusLattice) -> Result<AppendixTerms> {
    let n = lattice.num_vertices();
    if n > DIRECT_MAX_VERTICES {
        return Err(Error::SizeBoundExceeded {
            vertices: n,
            bound: DIRECT_MAX_VERTICES,
        });
    }
    let wa = WeightAssignment::dimer(lattice)?;
    let table = TileTable::new(lattice);
    // sums[shared - 1] = [pairs, sum m1 + m2, sum m1 m2] with m the edge
    // multiplicities, so that f = m f_d.
    let mut sums = [[0u64; 3]; 2];
    for t1 in 0..table.len() {
        let (a, b) = table.ends[t1];
        let mut seen_pair = |t2: u32, shared: usize| {
            let (m1, m2) = (table.mult[t1] as u64, table.mult[t2 as usize] as u64);
            let row = &mut sums[shared - 1];
            row[0] += 1;
            row[1] += m1 + m2;
            row[2] += m1 * m2;
        };
        for &t2 in table.by_vertex[a as usize].iter() {
            let (c, d) = table.ends[t2 as usize];
            let shared = if (c, d) == (a, b) { 2 } else { 1 };
            seen_pair(t2, shared);
        }
        for &t2 in table.by_vertex[b as usize].iter() {
            let (c, d) = table.ends[t2 as usize];
            if c != a && d != a {
                seen_pair(t2, 1);
            }
        }
    }
    let fd = wa.dimer_value.clone();
    let f0 = wa.f0.clone();
    let scale = -Rational::new(BigInt::from(1), BigInt::from(2 * n));
    let c = |x: u64| Rational::from_integer(BigInt::from(x));
    let ff = |row: &[u64; 3]| c(row[2]) * &fd * &fd;
    let f0f0 = |row: &[u64; 3]| c(row[0]) * &f0 * &f0;
    let cross = |row: &[u64; 3]| -c(row[1]) * &fd * &f0;
    Ok(AppendixTerms {
        a: &scale * ff(&sums[1]),
        b: &scale * f0f0(&sums[1]),
        c: &scale * cross(&sums[1]),
        d: &scale * ff(&sums[0]),
        e: &scale * f0f0(&sums[0]),
        f: &scale * cross(&sums[0]),
    })
}

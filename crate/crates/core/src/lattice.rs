//! Torus lattices, located tiles and the dimer weight functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{frac, Rational};

/// A vertex of a [`TorusLattice`], addressed by its mixed-radix index with
/// axis 1 varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub usize);

/// A rectangular lattice with periodic boundary conditions in every axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusLattice {
    dims: Vec<usize>,
    strides: Vec<usize>,
    num_vertices: usize,
}

impl TorusLattice {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLattice("no dimensions given".into()));
        }
        if let Some(&side) = dims.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidLattice(format!(
                "side length {side} is below the minimum of 2"
            )));
        }
        let mut strides = Vec::with_capacity(dims.len());
        let mut n: usize = 1;
        for &l in dims {
            strides.push(n);
            n = n
                .checked_mul(l)
                .ok_or_else(|| Error::InvalidLattice("vertex count overflows".into()))?;
        }
        Ok(Self {
            dims: dims.to_vec(),
            strides,
            num_vertices: n,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Lattice dimension `d`.
    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    /// Vertex count `N`.
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn min_side(&self) -> usize {
        self.dims.iter().copied().min().unwrap_or(0)
    }

    pub fn origin(&self) -> Vertex {
        Vertex(0)
    }

    pub fn coords(&self, v: Vertex) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&l, &st)| (v.0 / st) % l)
            .collect()
    }

    pub fn vertex(&self, coords: &[usize]) -> Result<Vertex> {
        if coords.len() != self.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.dims.len(),
                coords.len()
            )));
        }
        Ok(Vertex(
            coords
                .iter()
                .zip(&self.dims)
                .zip(&self.strides)
                .map(|((&x, &l), &st)| (x % l) * st)
                .sum(),
        ))
    }

    /// One step along `axis`, wrapping around the torus.
    pub fn step(&self, v: Vertex, axis: usize, forward: bool) -> Vertex {
        let l = self.dims[axis];
        let st = self.strides[axis];
        let x = (v.0 / st) % l;
        let y = if forward {
            (x + 1) % l
        } else {
            (x + l - 1) % l
        };
        Vertex(v.0 - x * st + y * st)
    }

    /// Translate `v` by the coordinates of `by`.
    pub fn translate(&self, v: Vertex, by: Vertex) -> Vertex {
        let mut idx = 0;
        for (&l, &st) in self.dims.iter().zip(&self.strides) {
            let x = (v.0 / st) % l;
            let y = (by.0 / st) % l;
            idx += ((x + y) % l) * st;
        }
        Vertex(idx)
    }

    /// The `2d` incident dimer slots of `v`. On an axis with side 2 the
    /// forward and backward neighbor coincide and appear twice.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        (0..self.dim())
            .flat_map(|axis| [self.step(v, axis, false), self.step(v, axis, true)])
            .collect()
    }

    /// Number of distinct lattice edges joining `a` and `b`.
    pub fn dimer_multiplicity(&self, a: Vertex, b: Vertex) -> u32 {
        self.neighbors(a).iter().filter(|&&w| w == b).count() as u32
    }
}

/// Validated constructor mirroring [`TorusLattice::new`].
pub fn build_torus(dims: &[usize]) -> Result<TorusLattice> {
    TorusLattice::new(dims)
}

/// A tile placed on the lattice: a sorted set of distinct vertices.
///
/// `multiplicity` counts the distinct lattice edges realizing a dimer's
/// vertex pair; it exceeds 1 only on axes of side 2.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocatedTile {
    vertices: Vec<Vertex>,
    multiplicity: u32,
}

impl LocatedTile {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self> {
        vertices.sort();
        if vertices.is_empty() {
            return Err(Error::InvalidTile("empty tile".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTile(format!(
                "repeated vertex in {vertices:?}"
            )));
        }
        Ok(Self {
            vertices,
            multiplicity: 1,
        })
    }

    pub fn pair(a: Vertex, b: Vertex) -> Result<Self> {
        Self::new(vec![a, b])
    }

    fn with_multiplicity(mut self, m: u32) -> Self {
        self.multiplicity = m;
        self
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn intersects(&self, other: &LocatedTile) -> bool {
        self.vertices.iter().any(|&v| other.contains(v))
    }

    pub fn is_dimer(&self, lattice: &TorusLattice) -> bool {
        self.vertices.len() == 2
            && lattice.dimer_multiplicity(self.vertices[0], self.vertices[1]) > 0
    }
}

/// All nearest-neighbor located tiles, sorted, with edge multiplicities.
/// The multiplicities sum to `N * d`.
pub fn enumerate_dimers(lattice: &TorusLattice) -> Vec<LocatedTile> {
    let mut counts: BTreeMap<(Vertex, Vertex), u32> = BTreeMap::new();
    for i in 0..lattice.num_vertices() {
        let v = Vertex(i);
        for axis in 0..lattice.dim() {
            let w = lattice.step(v, axis, true);
            let key = if v < w { (v, w) } else { (w, v) };
            *counts.entry(key).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|((a, b), m)| {
            LocatedTile::pair(a, b)
                .expect("neighbors are distinct when every side is at least 2")
                .with_multiplicity(m)
        })
        .collect()
}

/// The constant weight `(n-1)!(N-n)!/(N-1)!` that satisfies the
/// normalization when spread evenly over all `n`-subsets.
pub fn f0_value(num_vertices: usize, tile_size: usize) -> Result<Rational> {
    if tile_size < 2 || tile_size > num_vertices {
        return Err(Error::InvalidArgument(format!(
            "f_0 needs 2 <= n <= N, got n = {tile_size}, N = {num_vertices}"
        )));
    }
    let c = binomial(BigInt::from(num_vertices - 1), BigInt::from(tile_size - 1));
    Ok(Rational::new(BigInt::from(1), c))
}

/// The dimer weight function `f`, its smooth counterpart `f_0`, and through
/// them the perturbation `v = f - f_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightAssignment {
    pub tile_size: usize,
    pub dimer_value: Rational,
    pub f0: Rational,
}

impl WeightAssignment {
    /// `f = 1/(2d)` on each dimer slot and zero elsewhere.
    pub fn dimer(lattice: &TorusLattice) -> Result<Self> {
        Ok(Self {
            tile_size: 2,
            dimer_value: frac(1, 2 * lattice.dim() as i64),
            f0: f0_value(lattice.num_vertices(), 2)?,
        })
    }

    /// `v` on a dimer slot.
    pub fn v_dimer(&self) -> Rational {
        &self.dimer_value - &self.f0
    }

    /// `v` on a pair that is not a lattice edge.
    pub fn v_other(&self) -> Rational {
        -self.f0.clone()
    }
}

/// `(f, v)` for one incidence slot of `tile`.
pub fn weight_and_v(
    lattice: &TorusLattice,
    wa: &WeightAssignment,
    tile: &LocatedTile,
) -> Result<(Rational, Rational)> {
    if tile.size() != wa.tile_size {
        return Err(Error::InvalidTile(format!(
            "tile has {} vertices, expected {}",
            tile.size(),
            wa.tile_size
        )));
    }
    if tile
        .vertices()
        .iter()
        .any(|v| v.0 >= lattice.num_vertices())
    {
        return Err(Error::InvalidTile(format!(
            "tile {:?} leaves the lattice",
            tile.vertices()
        )));
    }
    let f = if tile.is_dimer(lattice) {
        wa.dimer_value.clone()
    } else {
        Rational::zero()
    };
    let v = &f - &wa.f0;
    Ok((f, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn pairs(tiles: &[LocatedTile]) -> Vec<(usize, usize, u32)> {
        tiles
            .iter()
            .map(|t| (t.vertices()[0].0, t.vertices()[1].0, t.multiplicity()))
            .collect()
    }

    #[test]
    fn cycle_neighbors_wrap() {
        let l = build_torus(&[6]).unwrap();
        assert_eq!(l.num_vertices(), 6);
        assert_eq!(l.dim(), 1);
        assert_eq!(l.neighbors(Vertex(0)), vec![Vertex(5), Vertex(1)]);
        assert_eq!(l.neighbors(Vertex(3)), vec![Vertex(2), Vertex(4)]);
    }

    #[test]
    fn side_two_doubles_edges() {
        let l = build_torus(&[2, 2]).unwrap();
        assert_eq!(l.num_vertices(), 4);
        for i in 0..4 {
            let nb = l.neighbors(Vertex(i));
            assert_eq!(nb.len(), 4);
            assert_eq!(nb[0], nb[1]);
            assert_eq!(nb[2], nb[3]);
        }
    }

    #[test]
    fn cube_neighbors_distinct() {
        let l = build_torus(&[3, 3, 3]).unwrap();
        assert_eq!(l.num_vertices(), 27);
        for i in 0..27 {
            let mut nb = l.neighbors(Vertex(i));
            nb.sort();
            nb.dedup();
            assert_eq!(nb.len(), 6);
        }
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(build_torus(&[]).is_err());
        assert!(build_torus(&[4, 1]).is_err());
        assert!(build_torus(&[usize::MAX, 3]).is_err());
    }

    #[test]
    fn coordinates_round_trip_axis_one_fastest() {
        let l = build_torus(&[3, 4]).unwrap();
        assert_eq!(l.coords(Vertex(1)), vec![1, 0]);
        assert_eq!(l.coords(Vertex(3)), vec![0, 1]);
        for i in 0..12 {
            assert_eq!(l.vertex(&l.coords(Vertex(i))).unwrap(), Vertex(i));
        }
        assert_eq!(
            l.translate(Vertex(5), Vertex(11)),
            l.vertex(&[4, 4]).unwrap()
        );
    }

    #[test]
    fn dimers_on_cycle_match_appendix_support() {
        let l = build_torus(&[6]).unwrap();
        let d = enumerate_dimers(&l);
        assert_eq!(
            pairs(&d),
            vec![
                (0, 1, 1),
                (0, 5, 1),
                (1, 2, 1),
                (2, 3, 1),
                (3, 4, 1),
                (4, 5, 1)
            ]
        );
    }

    #[test]
    fn dimer_counts_with_multiplicity() {
        let d = enumerate_dimers(&build_torus(&[4, 4]).unwrap());
        assert_eq!(d.len(), 32);
        assert!(d.iter().all(|t| t.multiplicity() == 1));

        let d = enumerate_dimers(&build_torus(&[2, 2]).unwrap());
        assert_eq!(pairs(&d), vec![(0, 1, 2), (0, 2, 2), (1, 3, 2), (2, 3, 2)]);
        assert_eq!(d.iter().map(|t| t.multiplicity()).sum::<u32>(), 8);
    }

    #[test]
    fn f0_examples() {
        assert_eq!(f0_value(10, 2).unwrap(), frac(1, 9));
        assert_eq!(f0_value(6, 2).unwrap(), frac(1, 5));
        assert_eq!(f0_value(9, 3).unwrap(), frac(1, 28));
        // C(8,2) three-subsets contain a fixed vertex.
        assert_eq!(f0_value(9, 3).unwrap() * int(28), int(1));
        assert_eq!(f0_value(4, 4).unwrap(), int(1));
        assert!(f0_value(4, 5).is_err());
        assert!(f0_value(4, 1).is_err());
    }

    #[test]
    fn weights_and_perturbation() {
        let l = build_torus(&[6]).unwrap();
        let wa = WeightAssignment::dimer(&l).unwrap();
        let t = LocatedTile::pair(Vertex(0), Vertex(1)).unwrap();
        assert_eq!(
            weight_and_v(&l, &wa, &t).unwrap(),
            (frac(1, 2), frac(3, 10))
        );
        let t = LocatedTile::pair(Vertex(0), Vertex(3)).unwrap();
        assert_eq!(weight_and_v(&l, &wa, &t).unwrap(), (int(0), frac(-1, 5)));

        let l = build_torus(&[4, 4]).unwrap();
        let wa = WeightAssignment::dimer(&l).unwrap();
        let a = l.vertex(&[0, 0]).unwrap();
        let b = l.vertex(&[1, 0]).unwrap();
        let t = LocatedTile::pair(a, b).unwrap();
        assert_eq!(
            weight_and_v(&l, &wa, &t).unwrap(),
            (frac(1, 4), frac(1, 4) - frac(1, 15))
        );
    }

    #[test]
    fn weight_rejects_wrong_size() {
        let l = build_torus(&[6]).unwrap();
        let wa = WeightAssignment::dimer(&l).unwrap();
        let t = LocatedTile::new(vec![Vertex(0), Vertex(1), Vertex(2)]).unwrap();
        assert!(weight_and_v(&l, &wa, &t).is_err());
        assert!(LocatedTile::pair(Vertex(2), Vertex(2)).is_err());
    }

    #[test]
    fn normalization_holds_at_every_vertex() {
        for dims in [
            vec![2],
            vec![6],
            vec![2, 2],
            vec![2, 3],
            vec![4, 4],
            vec![3, 3, 3],
        ] {
            let l = build_torus(&dims).unwrap();
            let wa = WeightAssignment::dimer(&l).unwrap();
            let dimers = enumerate_dimers(&l);
            for x in 0..l.num_vertices() {
                let total: Rational = dimers
                    .iter()
                    .filter(|t| t.contains(Vertex(x)))
                    .map(|t| &wa.dimer_value * Rational::from_integer(t.multiplicity().into()))
                    .sum();
                assert_eq!(total, int(1), "dims {dims:?}, vertex {x}");
            }
            let n = l.num_vertices() as i64;
            assert_eq!(&wa.f0 * int(n - 1), int(1));
        }
    }

    #[test]
    fn perturbation_translation_invariant() {
        let l = build_torus(&[3, 4]).unwrap();
        let wa = WeightAssignment::dimer(&l).unwrap();
        for a in 0..12 {
            for b in (a + 1)..12 {
                let t = LocatedTile::pair(Vertex(a), Vertex(b)).unwrap();
                let v = weight_and_v(&l, &wa, &t).unwrap();
                for by in 0..12 {
                    let s = LocatedTile::pair(
                        l.translate(Vertex(a), Vertex(by)),
                        l.translate(Vertex(b), Vertex(by)),
                    )
                    .unwrap();
                    assert_eq!(weight_and_v(&l, &wa, &s).unwrap(), v);
                }
            }
        }
    }
}

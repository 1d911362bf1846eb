//! Ground truth by brute force and closed forms: tiling counts, perfect
//! matchings, the partition function `Z`, `Z_0`, and the `beta(N, i)`
//! factors with their large-`N` exponent.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{f0_value, LocatedTile, TorusLattice, Vertex, WeightAssignment};
use crate::rational::{frac, from_biguint, int, pow, Rational};
use crate::real::{self, Real};

/// Number of ways to partition an `N`-set into blocks of size `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingCount {
    pub value: BigUint,
    pub num_vertices: usize,
    pub tile_size: usize,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// `N! / ((N/n)! (n!)^(N/n))`.
pub fn count_subset_tilings(num_vertices: usize, tile_size: usize) -> Result<TilingCount> {
    if tile_size < 2 || num_vertices < tile_size {
        return Err(Error::InvalidArgument(format!(
            "need N >= n >= 2, got N = {num_vertices}, n = {tile_size}"
        )));
    }
    if !num_vertices.is_multiple_of(tile_size) {
        return Err(Error::InvalidArgument(format!(
            "tile size {tile_size} does not divide N = {num_vertices}"
        )));
    }
    let blocks = num_vertices / tile_size;
    let denom = factorial(blocks) * num_traits::pow(factorial(tile_size), blocks);
    let value = factorial(num_vertices) / denom;
    Ok(TilingCount {
        value,
        num_vertices,
        tile_size,
    })
}

/// `Z_0` as an exact rational and `p0_hat = ln(Z_0) / N`.
pub fn z0_and_p0(num_vertices: usize, tile_size: usize, digits: usize) -> Result<(Rational, Real)> {
    let z0 = z0_exact(num_vertices, tile_size)?;
    let p0 = real::ln_rational(&z0, digits)? / real::from_i64(num_vertices as i64, digits);
    Ok((z0, p0))
}

fn z0_exact(num_vertices: usize, tile_size: usize) -> Result<Rational> {
    let count = count_subset_tilings(num_vertices, tile_size)?;
    let f0 = f0_value(num_vertices, tile_size)?;
    Ok(from_biguint(&count.value) * pow(&f0, (num_vertices / tile_size) as i64))
}

/// Limits for the exhaustive matching counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchingOptions {
    pub max_vertices: usize,
}

impl Default for MatchingOptions {
    fn default() -> Self {
        Self { max_vertices: 36 }
    }
}

/// Vertex-count ceiling imposed by the bitmask representation.
pub const MATCHING_HARD_LIMIT: usize = 64;

/// Exact number of perfect matchings of the torus multigraph. A doubled
/// edge contributes two distinct matchings whenever it is used.
pub fn count_perfect_matchings(lattice: &TorusLattice, opts: MatchingOptions) -> Result<BigUint> {
    let n = lattice.num_vertices();
    let bound = opts.max_vertices.min(MATCHING_HARD_LIMIT);
    if n > bound {
        return Err(Error::SizeBoundExceeded { vertices: n, bound });
    }
    if n % 2 == 1 {
        return Err(Error::OddVertexCount(n));
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            lattice
                .neighbors(Vertex(i))
                .into_iter()
                .map(|v| v.0)
                .collect()
        })
        .collect();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo = HashMap::new();
    Ok(match_recursive(0, full, &neighbors, &mut memo))
}

fn match_recursive(
    covered: u64,
    full: u64,
    neighbors: &[Vec<usize>],
    memo: &mut HashMap<u64, BigUint>,
) -> BigUint {
    if covered == full {
        return BigUint::one();
    }
    if let Some(hit) = memo.get(&covered) {
        return hit.clone();
    }
    let v = (!covered).trailing_zeros() as usize;
    let mut total = BigUint::zero();
    for &w in &neighbors[v] {
        if w != v && covered & (1u64 << w) == 0 {
            total += match_recursive(covered | (1u64 << v) | (1u64 << w), full, neighbors, memo);
        }
    }
    memo.insert(covered, total.clone());
    total
}

/// Finite-volume growth rate `ln(#matchings) / N`.
#[derive(Clone, Debug)]
pub struct FiniteLambda {
    pub dims: Vec<usize>,
    pub matching_count: BigUint,
    pub lambda_n: Real,
}

#[derive(Clone, Debug)]
pub struct PartitionFunction {
    /// `Z = #matchings * (1/(2d))^(N/2)`.
    pub z: Rational,
    pub lambda: FiniteLambda,
}

/// `Z` for the dimer weight and `lambda_N = ln(2d)/2 + ln(Z)/N`.
///
/// Checks `(2d)^(N/2) Z = #matchings` exactly and that both routes to
/// `lambda_N` agree to `10^-30`.
pub fn partition_function(
    lattice: &TorusLattice,
    opts: MatchingOptions,
    digits: usize,
) -> Result<PartitionFunction> {
    let count = count_perfect_matchings(lattice, opts)?;
    let n = lattice.num_vertices();
    let two_d = 2 * lattice.dim() as i64;
    let half = (n / 2) as i64;
    let z = from_biguint(&count) * pow(&frac(1, two_d), half);
    if pow(&int(two_d), half) * &z != from_biguint(&count) {
        return Err(Error::Consistency(
            "(2d)^(N/2) Z differs from the matching count".into(),
        ));
    }
    if count.is_zero() {
        return Err(Error::Consistency(format!(
            "torus {:?} has no perfect matching",
            lattice.dims()
        )));
    }
    let nr = real::from_i64(n as i64, digits);
    let lambda_n = real::ln_biguint(&count, digits)? / nr.clone();
    let via_z = real::ln_rational(&int(two_d), digits)? / real::from_i64(2, digits)
        + real::ln_rational(&z, digits)? / nr;
    if !real::approx_eq(&lambda_n, &via_z) {
        return Err(Error::Consistency("lambda_N routes disagree".into()));
    }
    Ok(PartitionFunction {
        z,
        lambda: FiniteLambda {
            dims: lattice.dims().to_vec(),
            matching_count: count,
            lambda_n,
        },
    })
}

/// Exact `beta(N, i)` together with `j = i / N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaFactor {
    pub num_vertices: usize,
    pub i: usize,
    pub exact_value: Rational,
    pub j: Rational,
}

impl BetaFactor {
    pub fn new(num_vertices: usize, i: usize) -> Result<Self> {
        Ok(Self {
            num_vertices,
            i,
            exact_value: beta_exact(num_vertices, i)?,
            j: frac(i as i64, num_vertices as i64),
        })
    }

    /// `g(j) = ((1-2j)/2) ln(1-2j) + j`.
    pub fn asym_exponent(&self, digits: usize) -> Result<Real> {
        beta_asym(&self.j, digits)
    }

    /// `(1/N) ln beta(N, i)`.
    pub fn log_rate(&self, digits: usize) -> Result<Real> {
        Ok(real::ln_rational(&self.exact_value, digits)?
            / real::from_i64(self.num_vertices as i64, digits))
    }
}

/// `beta(N, i) = f_0^(N/2 - i) * T(N - 2i) / Z_0` for dimers, where `T(M)`
/// counts pairings of `M` points: every set of `i` disjoint perturbed
/// tiles is completed by a constant-weight pairing of the rest.
pub fn beta_exact(num_vertices: usize, i: usize) -> Result<Rational> {
    if num_vertices % 2 == 1 || num_vertices < 2 {
        return Err(Error::InvalidArgument(format!(
            "beta needs an even N >= 2, got {num_vertices}"
        )));
    }
    if 2 * i > num_vertices {
        return Err(Error::InvalidArgument(format!(
            "beta needs 2i <= N, got i = {i}, N = {num_vertices}"
        )));
    }
    let f0 = f0_value(num_vertices, 2)?;
    let rest = num_vertices - 2 * i;
    let completions = if rest == 0 {
        BigUint::one()
    } else {
        count_subset_tilings(rest, 2)?.value
    };
    let z0 = z0_exact(num_vertices, 2)?;
    Ok(pow(&f0, (num_vertices / 2 - i) as i64) * from_biguint(&completions) / z0)
}

/// `g(j) = ((1-2j)/2) ln(1-2j) + j` on `[0, 1/2]`, with `g(1/2) = 1/2`.
pub fn beta_asym(j: &Rational, digits: usize) -> Result<Real> {
    let half = frac(1, 2);
    if *j < Rational::zero() || *j > half {
        return Err(Error::InvalidArgument(format!("j = {j} outside [0, 1/2]")));
    }
    let jr = real::from_rational(j, digits);
    if *j == half {
        return Ok(jr);
    }
    let one_minus = int(1) - int(2) * j;
    let lead = real::from_rational(&(&one_minus / int(2)), digits)
        * real::ln_rational(&one_minus, digits)?;
    Ok(lead + jr)
}

/// Brute-force `beta(N, i)` straight from its definition
/// `Z_i = beta(N, i) Z_0 Zbar*_i`, expanding `prod (f_0 + v)` over every
/// tiling.
///
/// With the true dimer perturbation `Zbar*_1` vanishes identically (every
/// vertex is normalized), so the ratio is `0/0` at `i = 1`. The defining
/// identity is polynomial in `v`; it is checked here with the dimer `v`
/// shifted by a fixed, tile-dependent rational so that no sum degenerates.
///
/// Requires all sides `>= 3` so that located tiles are exactly the
/// 2-subsets, and `N <= 12`.
pub fn beta_brute_force(lattice: &TorusLattice, i: usize) -> Result<Rational> {
    let n = lattice.num_vertices();
    if lattice.min_side() < 3 {
        return Err(Error::InvalidLattice(
            "brute-force beta needs every side >= 3".into(),
        ));
    }
    if n > 12 {
        return Err(Error::SizeBoundExceeded {
            vertices: n,
            bound: 12,
        });
    }
    if n % 2 == 1 || 2 * i > n {
        return Err(Error::InvalidArgument(format!(
            "need even N >= 2i, got N = {n}, i = {i}"
        )));
    }
    let wa = WeightAssignment::dimer(lattice)?;
    let v = |a: usize, b: usize| -> Result<Rational> {
        let t = LocatedTile::pair(Vertex(a), Vertex(b))?;
        let shift = frac((3 * a + 7 * b + 1) as i64 % 11 + 1, 97);
        Ok(crate::lattice::weight_and_v(lattice, &wa, &t)?.1 + shift)
    };

    let mut z_i = Rational::zero();
    let mut z_0 = Rational::zero();
    let mut pairing = Vec::new();
    let mut pairings = Vec::new();
    all_pairings(&mut (0..n).collect(), &mut pairing, &mut pairings);
    for p in &pairings {
        let vs = p
            .iter()
            .map(|&(a, b)| v(a, b))
            .collect::<Result<Vec<_>>>()?;
        z_i += elementary_symmetric(&vs, i) * pow(&wa.f0, (n / 2 - i) as i64);
        z_0 += pow(&wa.f0, (n / 2) as i64);
    }

    // Zbar*_i: sets of i pairwise disjoint tiles.
    let mut zbar = Rational::zero();
    disjoint_sets(n, i, 0, 0, &mut Vec::new(), &mut |set| {
        zbar += set
            .iter()
            .map(|&(a, b)| v(a, b).unwrap())
            .product::<Rational>();
    });
    if zbar.is_zero() {
        return Err(Error::Consistency(
            "Zbar*_i vanishes; beta undefined".into(),
        ));
    }
    Ok(z_i / (z_0 * zbar))
}

fn all_pairings(
    rest: &mut Vec<usize>,
    cur: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if rest.is_empty() {
        out.push(cur.clone());
        return;
    }
    let a = rest.remove(0);
    for k in 0..rest.len() {
        let b = rest.remove(k);
        cur.push((a, b));
        all_pairings(rest, cur, out);
        cur.pop();
        rest.insert(k, b);
    }
    rest.insert(0, a);
}

fn disjoint_sets(
    n: usize,
    remaining: usize,
    min_tile: usize,
    used: u64,
    cur: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]),
) {
    if remaining == 0 {
        visit(cur);
        return;
    }
    // Tiles indexed lexicographically as a * n + b with a < b.
    for a in 0..n {
        for b in (a + 1)..n {
            let idx = a * n + b;
            if idx < min_tile || used & ((1 << a) | (1 << b)) != 0 {
                continue;
            }
            cur.push((a, b));
            disjoint_sets(
                n,
                remaining - 1,
                idx + 1,
                used | (1 << a) | (1 << b),
                cur,
                visit,
            );
            cur.pop();
        }
    }
}

fn elementary_symmetric(xs: &[Rational], k: usize) -> Rational {
    let mut e = vec![Rational::zero(); k + 1];
    e[0] = Rational::one();
    for x in xs {
        for m in (1..=k).rev() {
            let add = &e[m - 1] * x;
            e[m] += add;
        }
    }
    e.swap_remove(k)
}

/// Pairing count `(N - 1)!!` for even `N`, used in cross-checks.
pub fn double_factorial_odd(num_vertices: usize) -> BigUint {
    (1..num_vertices as u64)
        .filter(|k| k.is_odd())
        .map(BigUint::from)
        .product()
}

//! Connected cluster kernels `J_s` on finite tori and their infinite-volume
//! structure.
//!
//! `Jbar_s(N) = J_s / (s! N)` is computed exactly on each torus, fitted as a
//! rational function of `N`, and its `N -> infinity` limit is then fitted as
//! `sum_k C_k / d^k` across dimensions.

pub mod direct;
pub mod interp;
pub mod pattern;
pub mod ursell;

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use direct::{appendix_breakdown, direct_kernel_sum, AppendixTerms, Reduction};
pub use interp::RationalFunction;
pub use pattern::pattern_kernel_sum;
pub use ursell::{ursell, ClusterTuple, OverlapGraph};

use crate::error::{Error, Result};
use crate::lattice::TorusLattice;
use crate::rational::{int, Pq, Rational};

/// Highest kernel order available in this build.
pub const MAX_ORDER: usize = if cfg!(feature = "order-five") { 5 } else { 4 };

/// Default cap on explicitly enumerated tuples per torus.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMethod {
    /// Pattern engine when every side is at least 3, explicit tuples
    /// otherwise.
    #[default]
    Auto,
    Direct,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelOptions {
    pub method: KernelMethod,
    pub reduction: Reduction,
    /// Maximum number of explicitly generated tuples.
    pub budget: u64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            method: KernelMethod::Auto,
            reduction: Reduction::Anchored,
            budget: DEFAULT_BUDGET,
        }
    }
}

fn check_order(s: usize) -> Result<()> {
    if s == 0 || s > MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            s,
            min: 1,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// `J_s` on a finite torus.
pub fn kernel_total(lattice: &TorusLattice, s: usize, opts: &KernelOptions) -> Result<Rational> {
    check_order(s)?;
    let method = match opts.method {
        KernelMethod::Auto if lattice.min_side() >= 3 => KernelMethod::Pattern,
        KernelMethod::Auto => KernelMethod::Direct,
        m => m,
    };
    match method {
        KernelMethod::Pattern => pattern_kernel_sum(lattice, s),
        _ => Ok(direct_kernel_sum(lattice, s, opts.reduction, opts.budget)?.total),
    }
}

/// `Jbar_s(N) = J_s / (s! N)` on a finite torus.
pub fn kernel_finite(lattice: &TorusLattice, s: usize, opts: &KernelOptions) -> Result<Rational> {
    let j = kernel_total(lattice, s, opts)?;
    let s_fact: i64 = (1..=s as i64).product();
    Ok(j / int(s_fact * lattice.num_vertices() as i64))
}

/// Degree bounds of the rational function in `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBounds {
    pub num: usize,
    pub den: usize,
}

impl DegreeBounds {
    pub fn for_order(s: usize) -> Self {
        Self { num: s, den: s }
    }

    /// Points used by the fit.
    pub fn fit_points(&self) -> usize {
        self.num + self.den + 1
    }

    /// Fit points plus two held-out checks.
    pub fn required_samples(&self) -> usize {
        self.fit_points() + 2
    }
}

/// Smallest side for which no order-`s` cluster can wrap the torus.
pub fn stabilization_side(s: usize) -> usize {
    2 * s + 1
}

/// The `count` tori of dimension `d` with smallest even vertex count, all
/// sides at least `2s + 1`, one torus per distinct `N`.
pub fn stabilized_tori(s: usize, d: usize, count: usize) -> Vec<TorusLattice> {
    let min = stabilization_side(s);
    if d == 0 || count == 0 {
        return Vec::new();
    }
    let mut span = 4;
    loop {
        let mut by_n: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut sides = vec![min; d];
        loop {
            let n: usize = sides.iter().product();
            if n.is_multiple_of(2) {
                by_n.entry(n).or_insert_with(|| sides.clone());
            }
            // Next non-decreasing side vector within the span.
            let mut k = d;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if sides[k] < min + span {
                    sides[k] += 1;
                    let v = sides[k];
                    for x in sides.iter_mut().skip(k + 1) {
                        *x = v;
                    }
                    break;
                }
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
        // Any N up to this bound is reachable within the current span.
        let safe = (min + span)
            .pow(d as u32)
            .min(min.pow(d as u32 - 1) * (min + span));
        let picked: Vec<_> = by_n.range(..=safe).take(count).collect();
        if picked.len() == count {
            return picked
                .into_iter()
                .map(|(_, dims)| TorusLattice::new(dims).expect("sides are at least 3"))
                .collect();
        }
        span *= 2;
    }
}

/// Exact `N -> infinity` limit of samples `(N, Jbar(N))`.
pub fn kernel_limit(
    samples: &[(usize, Rational)],
    bounds: DegreeBounds,
) -> Result<(Rational, RationalFunction)> {
    if samples.len() < bounds.required_samples() {
        return Err(Error::Interpolation(format!(
            "{} samples given, {} required for degree bounds ({}, {}) with two held out",
            samples.len(),
            bounds.required_samples(),
            bounds.num,
            bounds.den
        )));
    }
    let points: Vec<(Rational, Rational)> = samples
        .iter()
        .map(|(n, y)| (int(*n as i64), y.clone()))
        .collect();
    let rf = interp::fit_rational(&points, bounds.num, bounds.den)?;
    Ok((rf.limit_at_infinity()?, rf))
}

/// Finite-volume kernels of one order and dimension with their limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelLimit {
    pub s: usize,
    pub d: usize,
    #[serde(rename = "per_N")]
    pub per_n: Vec<(usize, Pq)>,
    pub limit: Pq,
}

/// Computes `Jbar_s` on `tori` (default: [`stabilized_tori`]) and
/// extrapolates to infinite volume.
pub fn kernel_limit_for(
    s: usize,
    d: usize,
    tori: Option<Vec<TorusLattice>>,
    opts: &KernelOptions,
    bounds: DegreeBounds,
) -> Result<KernelLimit> {
    check_order(s)?;
    let tori = tori.unwrap_or_else(|| stabilized_tori(s, d, bounds.required_samples()));
    for t in &tori {
        if t.dim() != d {
            return Err(Error::InvalidArgument(format!(
                "torus {:?} does not have dimension {d}",
                t.dims()
            )));
        }
        if t.min_side() < stabilization_side(s) {
            return Err(Error::InvalidArgument(format!(
                "torus {:?} is below the stabilization side {} for order {s}",
                t.dims(),
                stabilization_side(s)
            )));
        }
    }
    let mut per_n: Vec<(usize, Rational)> = tori
        .par_iter()
        .map(|t| Ok((t.num_vertices(), kernel_finite(t, s, opts)?)))
        .collect::<Result<_>>()?;
    per_n.sort_by_key(|(n, _)| *n);
    for w in per_n.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
            return Err(Error::Consistency(format!(
                "two tori with N = {} give different kernels",
                w[0].0
            )));
        }
    }
    per_n.dedup_by_key(|(n, _)| *n);
    let (limit, _) = kernel_limit(&per_n, bounds)?;
    Ok(KernelLimit {
        s,
        d,
        per_n: per_n.into_iter().map(|(n, v)| (n, Pq(v))).collect(),
        limit: Pq(limit),
    })
}

/// `Jbar_s(d) = sum_{k=1}^{s-1} C_k / d^k` fitted from exact limits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DPoly {
    pub coeffs: BTreeMap<usize, Pq>,
    /// Lowest `k` with `C_k != 0`.
    pub r: Option<usize>,
    /// Whether `r >= s/2` holds for the fitted coefficients.
    pub r_bound_holds: bool,
    pub fit_d: Vec<usize>,
    pub holdout_d: Vec<usize>,
}

impl DPoly {
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs
            .get(&k)
            .map_or_else(Rational::zero, |c| c.0.clone())
    }

    /// Evaluates `sum C_k / d^k`.
    pub fn eval(&self, d: usize) -> Rational {
        self.coeffs
            .iter()
            .map(|(&k, c)| &c.0 / int((d as i64).pow(k as u32)))
            .sum()
    }
}

/// Default dimension schedule: `d = 1..=max(s, 3)`, which leaves at least one
/// dimension held out beyond the `s - 1` fitted ones.
pub fn default_d_samples(s: usize) -> Vec<usize> {
    (1..=s.max(3)).collect()
}

/// Fits `d^(s-1) Jbar_s(d)` as a polynomial of degree `s - 2` in `d` from
/// the first `s - 1` samples; every further sample is a held-out check.
pub fn kernel_poly_in_d(s: usize, limits: &[(usize, Rational)]) -> Result<DPoly> {
    check_order(s)?;
    let fit_count = s - 1;
    if limits.len() < fit_count + 1 {
        return Err(Error::Interpolation(format!(
            "order {s} needs {} dimensions ({} to fit, one held out), got {}",
            fit_count + 1,
            fit_count,
            limits.len()
        )));
    }
    let points: Vec<(Rational, Rational)> = limits
        .iter()
        .map(|(d, j)| {
            let d = int(*d as i64);
            (d.clone(), j * crate::rational::pow(&d, s as i64 - 1))
        })
        .collect();
    let poly = interp::fit_polynomial(&points, fit_count.checked_sub(1))?;
    // Coefficient of d^(s-1-k) is C_k.
    let mut coeffs = BTreeMap::new();
    for k in 1..s {
        let c = poly.get(s - 1 - k).cloned().unwrap_or_else(Rational::zero);
        coeffs.insert(k, Pq(c));
    }
    let r = coeffs.iter().find(|(_, c)| !c.0.is_zero()).map(|(&k, _)| k);
    let r_bound_holds = r.is_none_or(|r| 2 * r >= s);
    let ds: Vec<usize> = limits.iter().map(|(d, _)| *d).collect();
    Ok(DPoly {
        coeffs,
        r,
        r_bound_holds,
        fit_d: ds[..fit_count].to_vec(),
        holdout_d: ds[fit_count..].to_vec(),
    })
}

/// Everything known about one kernel order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelResult {
    pub s: usize,
    pub per_d: Vec<KernelLimit>,
    pub d_poly: BTreeMap<usize, Pq>,
    pub r: Option<usize>,
    pub r_bound_holds: bool,
    pub fit_d: Vec<usize>,
    pub holdout_d: Vec<usize>,
}

impl KernelResult {
    pub fn poly(&self) -> DPoly {
        DPoly {
            coeffs: self.d_poly.clone(),
            r: self.r,
            r_bound_holds: self.r_bound_holds,
            fit_d: self.fit_d.clone(),
            holdout_d: self.holdout_d.clone(),
        }
    }

    /// Builds a result straight from known coefficients, e.g. loaded kernels.
    pub fn from_coefficients(s: usize, coeffs: &[(usize, Rational)]) -> Self {
        let d_poly: BTreeMap<usize, Pq> = coeffs.iter().map(|(k, c)| (*k, Pq(c.clone()))).collect();
        let r = d_poly.iter().find(|(_, c)| !c.0.is_zero()).map(|(&k, _)| k);
        Self {
            s,
            per_d: Vec::new(),
            r_bound_holds: r.is_none_or(|r| 2 * r >= s),
            d_poly,
            r,
            fit_d: Vec::new(),
            holdout_d: Vec::new(),
        }
    }
}

/// Finite-volume kernels, limits and the `1/d` polynomial for order `s`.
pub fn kernel_result(s: usize, d_samples: &[usize], opts: &KernelOptions) -> Result<KernelResult> {
    check_order(s)?;
    let bounds = DegreeBounds::for_order(s);
    let per_d: Vec<KernelLimit> = d_samples
        .par_iter()
        .map(|&d| kernel_limit_for(s, d, None, opts, bounds))
        .collect::<Result<_>>()?;
    let limits: Vec<(usize, Rational)> = per_d.iter().map(|k| (k.d, k.limit.0.clone())).collect();
    let poly = kernel_poly_in_d(s, &limits)?;
    Ok(KernelResult {
        s,
        per_d,
        d_poly: poly.coeffs,
        r: poly.r,
        r_bound_holds: poly.r_bound_holds,
        fit_d: poly.fit_d,
        holdout_d: poly.holdout_d,
    })
}

/// `N -> infinity` limits of the six appendix terms on one-dimensional
/// cycles, together with the limit of their sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixLimits {
    pub per_n: Vec<(usize, AppendixTerms)>,
    pub limits: [Rational; 6],
    pub total_limit: Rational,
}

pub fn appendix_limits(cycle_lengths: &[usize]) -> Result<AppendixLimits> {
    let bounds = DegreeBounds::for_order(2);
    let mut per_n = Vec::new();
    for &n in cycle_lengths {
        let l = TorusLattice::new(&[n])?;
        if l.min_side() < stabilization_side(2) {
            return Err(Error::InvalidArgument(format!(
                "cycle length {n} below the stabilization side {}",
                stabilization_side(2)
            )));
        }
        per_n.push((n, appendix_breakdown(&l)?));
    }
    let mut limits: [Rational; 6] = Default::default();
    for (k, slot) in limits.iter_mut().enumerate() {
        let samples: Vec<(usize, Rational)> = per_n
            .iter()
            .map(|(n, t)| (*n, t.as_array()[k].clone()))
            .collect();
        *slot = kernel_limit(&samples, bounds)?.0;
    }
    let totals: Vec<(usize, Rational)> = per_n.iter().map(|(n, t)| (*n, t.total())).collect();
    let total_limit = kernel_limit(&totals, bounds)?.0;
    Ok(AppendixLimits {
        per_n,
        limits,
        total_limit,
    })
}

/// Even cycle lengths from 6 upward, enough for an order-2 fit.
pub fn default_appendix_cycles() -> Vec<usize> {
    let count = DegreeBounds::for_order(2).required_samples();
    (0..count).map(|k| 6 + 2 * k).collect()
}

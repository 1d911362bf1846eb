//! Truncated power series in `u = 1/d` with exact rational coefficients, the
//! stationarity system for the cluster weights `alpha_k`, and the
//! coefficients `c_i` of the `lambda_d` expansion.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelResult;
use crate::rational::{int, sign_char, Pq, Rational};
use crate::real::{self, Real};

/// `a_0 + a_1 u + ... + a_K u^K`; products discard orders above `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// The variable `u` itself.
    pub fn var(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    /// Pads or truncates `coeffs` to order `order`.
    pub fn from_coeffs(coeffs: &[Rational], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (dst, src) in s.coeffs.iter_mut().zip(coeffs) {
            *dst = src.clone();
        }
        s
    }

    /// Sparse constructor from `(power, coefficient)` pairs.
    pub fn from_terms(terms: &[(usize, Rational)], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in terms {
            if *k <= order {
                s.coeffs[*k] += c;
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(&self.coeffs, order)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn check_same_order(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "series truncation orders differ"
        );
    }

    /// `exp(a)` for `a_0 = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::SeriesDomain("exp needs a zero constant term".into()));
        }
        let k = self.order();
        let mut b = vec![Rational::zero(); k + 1];
        b[0] = Rational::one();
        for n in 1..=k {
            let mut acc = Rational::zero();
            for j in 1..=n {
                acc += int(j as i64) * &self.coeffs[j] * &b[n - j];
            }
            b[n] = acc / int(n as i64);
        }
        Ok(Self { coeffs: b })
    }

    /// `log(a)` for `a_0 = 1`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::SeriesDomain("log needs a unit constant term".into()));
        }
        let k = self.order();
        let mut l = vec![Rational::zero(); k + 1];
        for n in 1..=k {
            let mut acc = int(n as i64) * &self.coeffs[n];
            for (j, lj) in l.iter().enumerate().take(n).skip(1) {
                acc -= int(j as i64) * lj * &self.coeffs[n - j];
            }
            l[n] = acc / int(n as i64);
        }
        Ok(Self { coeffs: l })
    }

    /// Multiplicative inverse for `a_0 != 0`.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::SeriesDomain(
                "inverse needs a nonzero constant term".into(),
            ));
        }
        let k = self.order();
        let inv0 = self.coeffs[0].recip();
        let mut b = vec![Rational::zero(); k + 1];
        b[0] = inv0.clone();
        for n in 1..=k {
            let mut acc = Rational::zero();
            for j in 1..=n {
                acc += &self.coeffs[j] * &b[n - j];
            }
            b[n] = -acc * &inv0;
        }
        Ok(Self { coeffs: b })
    }

    /// Integer power; negative exponents need an invertible series.
    pub fn powi(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.check_same_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.check_same_order(rhs);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.check_same_order(rhs);
        let k = self.order();
        let mut c = vec![Rational::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(k + 1 - i).enumerate() {
                c[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: c }
    }
}

/// Kernel series `Jbar_k(u)` keyed by cluster order `k`.
pub type KernelSeries = BTreeMap<usize, TruncatedSeries>;

/// Fixed point of `alpha_k = Jbar_k e^{F_k}` with
/// `F_k = -k ln(1 - 2 S)` and `S = sum_k k alpha_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaSolution {
    pub alpha: BTreeMap<usize, TruncatedSeries>,
    pub s_sum: TruncatedSeries,
    pub f: BTreeMap<usize, TruncatedSeries>,
    pub rounds: usize,
}

fn weighted_sum(alpha: &BTreeMap<usize, TruncatedSeries>, order: usize) -> TruncatedSeries {
    alpha
        .iter()
        .fold(TruncatedSeries::zero(order), |acc, (&k, a)| {
            &acc + &a.scale(&int(k as i64))
        })
}

fn one_minus_two(s: &TruncatedSeries) -> TruncatedSeries {
    &TruncatedSeries::one(s.order()) - &s.scale(&int(2))
}

fn normalized(jbar: &KernelSeries, order: usize) -> Result<KernelSeries> {
    jbar.iter()
        .map(|(&k, j)| {
            if k == 0 {
                return Err(Error::InvalidArgument("kernel order 0 is undefined".into()));
            }
            if !j.coeff(0).is_zero() {
                return Err(Error::SeriesDomain(format!(
                    "Jbar_{k} has a nonzero constant term"
                )));
            }
            Ok((k, j.truncate(order)))
        })
        .collect()
}

/// `F_k = -k ln(1 - 2 S)`: the `alpha_k`-derivative of
/// `((1 - 2S)/2) ln(1 - 2S) + S`.
fn f_terms(
    alpha: &BTreeMap<usize, TruncatedSeries>,
    order: usize,
) -> Result<(TruncatedSeries, BTreeMap<usize, TruncatedSeries>)> {
    let s = weighted_sum(alpha, order);
    let log = one_minus_two(&s).log()?;
    let f = alpha
        .keys()
        .map(|&k| (k, log.scale(&int(-(k as i64)))))
        .collect();
    Ok((s, f))
}

/// Iterates `alpha <- Jbar e^{F(alpha)}` from `alpha = 0`. Every round
/// fixes one more order, so the iteration stops after at most `K + 1`
/// rounds.
pub fn solve_alpha(jbar: &KernelSeries, order: usize) -> Result<AlphaSolution> {
    let jbar = normalized(jbar, order)?;
    let max_rounds = order + 2;
    let mut alpha: BTreeMap<usize, TruncatedSeries> = jbar
        .keys()
        .map(|&k| (k, TruncatedSeries::zero(order)))
        .collect();
    for round in 1..=max_rounds {
        let (_, f) = f_terms(&alpha, order)?;
        let next: BTreeMap<usize, TruncatedSeries> = jbar
            .iter()
            .map(|(&k, j)| Ok((k, j * &f[&k].exp()?)))
            .collect::<Result<_>>()?;
        if next == alpha {
            let (s_sum, f) = f_terms(&alpha, order)?;
            return Ok(AlphaSolution {
                alpha,
                s_sum,
                f,
                rounds: round,
            });
        }
        alpha = next;
    }
    Err(Error::NonConvergence { rounds: max_rounds })
}

/// Solves `alpha_k = Jbar_k (1 - 2S)^{-k}` by the same fixed-point scheme
/// but with series inversion and powers only, no `exp`/`log`.
pub fn solve_alpha_closed_form(
    jbar: &KernelSeries,
    order: usize,
) -> Result<BTreeMap<usize, TruncatedSeries>> {
    let jbar = normalized(jbar, order)?;
    let mut alpha: BTreeMap<usize, TruncatedSeries> = jbar
        .keys()
        .map(|&k| (k, TruncatedSeries::zero(order)))
        .collect();
    for _ in 0..order + 2 {
        let base = one_minus_two(&weighted_sum(&alpha, order));
        let next: BTreeMap<usize, TruncatedSeries> = jbar
            .iter()
            .map(|(&k, j)| Ok((k, j * &base.powi(-(k as i64))?)))
            .collect::<Result<_>>()?;
        if next == alpha {
            return Ok(alpha);
        }
        alpha = next;
    }
    Err(Error::NonConvergence { rounds: order + 2 })
}

/// `alpha_k - Jbar_k e^{F_k}` for every `k`.
pub fn alpha_residual(
    sol: &AlphaSolution,
    jbar: &KernelSeries,
) -> Result<BTreeMap<usize, TruncatedSeries>> {
    let order = sol.s_sum.order();
    jbar.iter()
        .map(|(&k, j)| {
            let a = sol
                .alpha
                .get(&k)
                .cloned()
                .unwrap_or_else(|| TruncatedSeries::zero(order));
            let fk = sol
                .f
                .get(&k)
                .cloned()
                .unwrap_or_else(|| TruncatedSeries::zero(order));
            Ok((k, &a - &(&j.truncate(order) * &fk.exp()?)))
        })
        .collect()
}

/// `-sum alpha_i F_i + sum Jbar_i e^{F_i} + ((1 - 2S)/2) ln(1 - 2S) + S`.
pub fn exponent_series(sol: &AlphaSolution, jbar: &KernelSeries) -> Result<TruncatedSeries> {
    let order = sol.s_sum.order();
    let jbar = normalized(jbar, order)?;
    let mut total = TruncatedSeries::zero(order);
    for (k, j) in &jbar {
        let a = &sol.alpha[k];
        let f = &sol.f[k];
        total = &total - &(a * f);
        total = &total + &(j * &f.exp()?);
    }
    let base = one_minus_two(&sol.s_sum);
    let bracket = &(&base.scale(&Rational::new(1.into(), 2.into())) * &base.log()?) + &sol.s_sum;
    Ok(&total + &bracket)
}

/// `lambda_d ~ ln(2d)/2 - 1/2 + sum_i c_i / d^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaExpansion {
    pub order: usize,
    pub c: BTreeMap<usize, Rational>,
    /// Sign of the leading `1/d` coefficient of each kernel used.
    pub kernel_signs: BTreeMap<usize, char>,
    pub notes: Vec<String>,
}

/// The symbolic zeroth-order part.
pub const LEADING: &str = "0.5*ln(2d)-0.5";

impl LambdaExpansion {
    /// `ln(2d)/2 - 1/2 + sum c_i d^-i` at `digits` significant digits.
    pub fn evaluate(&self, d: usize, digits: usize) -> Result<Real> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let two_d = int(2 * d as i64);
        let mut value = real::ln_rational(&two_d, digits)? / real::from_i64(2, digits)
            - real::from_rational(&Rational::new(1.into(), 2.into()), digits);
        let tail: Rational = self
            .c
            .iter()
            .map(|(&i, c)| c / int((d as i64).pow(i as u32)))
            .sum();
        value += real::from_rational(&tail, digits);
        Ok(value)
    }

    pub fn report(&self, eval_d: Option<usize>, digits: usize) -> Result<LambdaReport> {
        let eval = match eval_d {
            Some(d) => Some(EvalPoint {
                d,
                value: real::to_decimal_string(&self.evaluate(d, digits)?, digits),
            }),
            None => None,
        };
        Ok(LambdaReport {
            order: self.order,
            c: self.c.iter().map(|(&k, v)| (k, Pq(v.clone()))).collect(),
            leading: LEADING.to_string(),
            eval,
            kernel_signs: self
                .kernel_signs
                .iter()
                .map(|(&k, c)| (k, c.to_string()))
                .collect(),
            notes: self.notes.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub d: usize,
    pub value: String,
}

/// JSON form of a [`LambdaExpansion`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub order: usize,
    pub c: BTreeMap<usize, Pq>,
    pub leading: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalPoint>,
    pub kernel_signs: BTreeMap<usize, String>,
    pub notes: Vec<String>,
}

/// Coefficients `c_1..c_K` from kernel results.
///
/// Since `Jbar_s = O(d^-ceil(s/2))`, `c_i` depends on `Jbar_2..Jbar_{2i}`
/// only; the call fails when any of `Jbar_2..Jbar_{2K}` is missing.
pub fn lambda_expansion(kernels: &[KernelResult], order: usize) -> Result<LambdaExpansion> {
    let by_order: BTreeMap<usize, &KernelResult> = kernels.iter().map(|k| (k.s, k)).collect();
    let missing: Vec<usize> = (2..=2 * order)
        .filter(|s| !by_order.contains_key(s))
        .collect();
    if !missing.is_empty() {
        let have = by_order
            .keys()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::InsufficientKernels(format!(
            "c_{order} requires {}; it depends on Jbar_2 through Jbar_{}, available orders: [{have}]",
            missing.iter().map(|s| format!("Jbar_{s}")).collect::<Vec<_>>().join(", "),
            2 * order,
        )));
    }
    let mut notes = Vec::new();
    let mut kernel_signs = BTreeMap::new();
    let mut jbar = KernelSeries::new();
    for (&s, k) in &by_order {
        if !k.r_bound_holds {
            notes.push(format!(
                "Jbar_{s} has leading power {:?} below s/2; order bookkeeping assumes r >= s/2",
                k.r
            ));
        }
        let terms: Vec<(usize, Rational)> =
            k.d_poly.iter().map(|(&p, c)| (p, c.0.clone())).collect();
        if let Some((_, lead)) = terms.iter().find(|(_, c)| !c.is_zero()) {
            kernel_signs.insert(s, sign_char(lead));
        }
        jbar.insert(s, TruncatedSeries::from_terms(&terms, order));
    }
    if kernel_signs.values().any(|&c| c == '-') {
        notes.push("negative kernels enter the formal series unchanged".into());
    }
    let next = order + 1;
    let lacking: Vec<usize> = (2..=2 * next)
        .filter(|s| !by_order.contains_key(s))
        .collect();
    if !lacking.is_empty() {
        notes.push(format!(
            "c_{next} requires {}",
            lacking
                .iter()
                .map(|s| format!("Jbar_{s}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let c = if order == 0 {
        BTreeMap::new()
    } else {
        let sol = solve_alpha(&jbar, order)?;
        if alpha_residual(&sol, &jbar)?.values().any(|r| !r.is_zero()) {
            return Err(Error::Consistency(
                "alpha does not solve its defining equation".into(),
            ));
        }
        if solve_alpha_closed_form(&jbar, order)? != sol.alpha {
            return Err(Error::Consistency(
                "alpha disagrees with the closed form".into(),
            ));
        }
        let e = exponent_series(&sol, &jbar)?;
        if !e.coeff(0).is_zero() {
            return Err(Error::Consistency("exponent has a constant term".into()));
        }
        (1..=order).map(|i| (i, e.coeff(i))).collect()
    };
    Ok(LambdaExpansion {
        order,
        c,
        kernel_signs,
        notes,
    })
}

//! Exact interpolation over the rationals: rational functions of `N` for
//! the infinite-volume limit, polynomials for the `1/d` structure.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Dense polynomial, coefficients in ascending degree.
pub type Poly = Vec<Rational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn div_rem(num: &[Rational], den: &[Rational]) -> (Poly, Poly) {
    let dd = degree(den).expect("division by the zero polynomial");
    let mut rem: Poly = num.to_vec();
    trim(&mut rem);
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    let lead = den[dd].clone();
    while let Some(dr) = degree(&rem) {
        if dr < dd {
            break;
        }
        let c = &rem[dr] / &lead;
        for (k, dk) in den.iter().enumerate().take(dd + 1) {
            rem[dr - dd + k] -= &c * dk;
        }
        quot[dr - dd] = c;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Monic greatest common divisor.
fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while degree(&y).is_some() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    match degree(&x) {
        Some(dx) => {
            let lead = x[dx].clone();
            x.iter().map(|c| c / &lead).collect()
        }
        None => vec![Rational::one()],
    }
}

/// Null vector of `rows` (each row a linear form), or `None` when the
/// system has full column rank.
fn null_vector(mut rows: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, p) in row[c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -rows[row][free].clone();
    }
    Some(v)
}

/// Solves the square system `a x = b` exactly.
pub fn solve_linear(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = b.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(-rhs.clone());
            r
        })
        .collect();
    let v = null_vector(rows, n + 1)
        .ok_or_else(|| Error::Interpolation("inconsistent linear system".into()))?;
    if v[n].is_zero() {
        return Err(Error::Interpolation("singular linear system".into()));
    }
    let scale = v[n].recip();
    Ok(v[..n].iter().map(|x| x * &scale).collect())
}

/// `num(x) / den(x)` in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    fn reduced(num: Poly, den: Poly) -> Self {
        let g = gcd(&num, &den);
        let (mut n, _) = div_rem(&num, &g);
        let (mut d, _) = div_rem(&den, &g);
        let lead = d[degree(&d).expect("nonzero denominator")].clone();
        for c in n.iter_mut().chain(d.iter_mut()) {
            *c /= &lead;
        }
        trim(&mut n);
        trim(&mut d);
        Self { num: n, den: d }
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = eval(&self.den, x);
        (!d.is_zero()).then(|| eval(&self.num, x) / d)
    }

    /// Limit as `x -> infinity`; an error if the function grows without
    /// bound.
    pub fn limit_at_infinity(&self) -> Result<Rational> {
        let dd = degree(&self.den).expect("nonzero denominator");
        match degree(&self.num) {
            None => Ok(Rational::zero()),
            Some(dn) if dn < dd => Ok(Rational::zero()),
            Some(dn) if dn == dd => Ok(&self.num[dn] / &self.den[dd]),
            Some(dn) => Err(Error::Interpolation(format!(
                "fitted function diverges (numerator degree {dn} > denominator degree {dd})"
            ))),
        }
    }
}

/// Fits `p(x)/q(x)` with `deg p <= num_deg`, `deg q <= den_deg` through the
/// first `num_deg + den_deg + 1` points and checks every remaining point
/// exactly.
pub fn fit_rational(
    points: &[(Rational, Rational)],
    num_deg: usize,
    den_deg: usize,
) -> Result<RationalFunction> {
    let need = num_deg + den_deg + 1;
    if points.len() < need {
        return Err(Error::Interpolation(format!(
            "{} points cannot determine a ({num_deg}, {den_deg}) rational function",
            points.len()
        )));
    }
    let (fit, held_out) = points.split_at(need);
    let cols = num_deg + den_deg + 2;
    let rows: Vec<Vec<Rational>> = fit
        .iter()
        .map(|(x, y)| {
            let mut row = Vec::with_capacity(cols);
            let mut xp = Rational::one();
            for _ in 0..=num_deg {
                row.push(xp.clone());
                xp *= x;
            }
            let mut xp = Rational::one();
            for _ in 0..=den_deg {
                row.push(-(y * &xp));
                xp *= x;
            }
            row
        })
        .collect();
    let v = null_vector(rows, cols).expect("underdetermined system always has a null vector");
    let num = v[..=num_deg].to_vec();
    let den = v[num_deg + 1..].to_vec();
    if degree(&den).is_none() {
        return Err(Error::Interpolation(
            "fit produced a zero denominator".into(),
        ));
    }
    let rf = RationalFunction::reduced(num, den);
    for (x, y) in fit.iter().chain(held_out) {
        match rf.eval(x) {
            Some(val) if &val == y => {}
            other => {
                return Err(Error::Interpolation(format!(
                    "sample at x = {x} gives {y} but the fit predicts {}",
                    other.map_or("a pole".to_string(), |v| v.to_string())
                )))
            }
        }
    }
    Ok(rf)
}

/// Coefficients `c_0..c_{deg}` of the polynomial through the first
/// `deg + 1` points, checked exactly against the rest.
pub fn fit_polynomial(points: &[(Rational, Rational)], deg: Option<usize>) -> Result<Poly> {
    let Some(deg) = deg else {
        // Zero polynomial: every sample must vanish.
        if let Some((x, y)) = points.iter().find(|(_, y)| !y.is_zero()) {
            return Err(Error::Interpolation(format!(
                "expected zero at x = {x}, got {y}"
            )));
        }
        return Ok(Vec::new());
    };
    if points.len() < deg + 1 {
        return Err(Error::Interpolation(format!(
            "{} points cannot determine a degree-{deg} polynomial",
            points.len()
        )));
    }
    let (fit, held_out) = points.split_at(deg + 1);
    let a: Vec<Vec<Rational>> = fit
        .iter()
        .map(|(x, _)| {
            (0..=deg)
                .map(|k| crate::rational::pow(x, k as i64))
                .collect()
        })
        .collect();
    let b: Vec<Rational> = fit.iter().map(|(_, y)| y.clone()).collect();
    let coeffs = solve_linear(&a, &b)?;
    for (x, y) in held_out {
        let val = eval(&coeffs, x);
        if &val != y {
            return Err(Error::Interpolation(format!(
                "held-out point x = {x} gives {y} but the fit predicts {val}"
            )));
        }
    }
    Ok(coeffs)
}

pub fn sample_points(xs: &[usize], ys: &[Rational]) -> Vec<(Rational, Rational)> {
    xs.iter()
        .zip(ys)
        .map(|(&x, y)| (int(x as i64), y.clone()))
        .collect()
}

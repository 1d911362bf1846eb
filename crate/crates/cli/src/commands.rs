use std::path::PathBuf;

use dimer_expansion::kernels::{
    appendix_limits, default_appendix_cycles, default_d_samples, kernel_finite, kernel_limit,
    kernel_limit_for, kernel_result, AppendixTerms, DegreeBounds, KernelLimit, KernelOptions,
    KernelResult, MAX_ORDER,
};
use dimer_expansion::lattice::TorusLattice;
use dimer_expansion::oracle::{partition_function, BetaFactor, MatchingOptions};
use dimer_expansion::rational::{parse_pq, to_pq, Pq, Rational};
use dimer_expansion::real;
use dimer_expansion::series::lambda_expansion;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{Report, Table};

fn lattice(dims: &[usize]) -> Result<TorusLattice, CliError> {
    Ok(TorusLattice::new(dims)?)
}

fn decimal(x: &real::Real, digits: usize) -> String {
    real::to_decimal_string(x, digits)
}

pub fn matchings(dims: &[usize], max_vertices: usize, digits: usize) -> Result<Report, CliError> {
    let l = lattice(dims)?;
    let pf = partition_function(&l, MatchingOptions { max_vertices }, digits)?;
    Ok(Report::json(json!({
        "dims": dims,
        "N": l.num_vertices(),
        "d": l.dim(),
        "matching_count": pf.lambda.matching_count.to_string(),
        "Z": to_pq(&pf.z),
        "lambda_N": decimal(&pf.lambda.lambda_n, digits),
    })))
}

fn pq_columns(x: &Pq) -> [String; 2] {
    [x.0.numer().to_string(), x.0.denom().to_string()]
}

fn per_n_rows(lim: &KernelLimit, with_d: bool) -> Vec<Vec<String>> {
    lim.per_n
        .iter()
        .map(|(n, v)| {
            let mut row = Vec::new();
            if with_d {
                row.push(lim.d.to_string());
            }
            row.push(n.to_string());
            row.extend(pq_columns(v));
            row
        })
        .collect()
}

pub struct KernelArgs {
    pub s: usize,
    pub d: Option<usize>,
    pub all_d: bool,
    pub d_samples: Option<Vec<usize>>,
    pub tori: Option<Vec<Vec<usize>>>,
}

pub fn kernels(args: KernelArgs, opts: &KernelOptions) -> Result<Report, CliError> {
    let s = args.s;
    let bounds = DegreeBounds::for_order(s);
    if args.all_d {
        if args.tori.is_some() {
            return Err(CliError::Config(
                "--tori cannot be combined with --all-d".into(),
            ));
        }
        let ds = args.d_samples.unwrap_or_else(|| default_d_samples(s));
        let r = kernel_result(s, &ds, opts)?;
        let rows = r.per_d.iter().flat_map(|l| per_n_rows(l, true)).collect();
        return Ok(Report {
            result: serde_json::to_value(&r).expect("kernel results serialize"),
            table: Some(Table {
                headers: vec!["d", "N", "p", "q"],
                rows,
            }),
        });
    }
    let tori = args
        .tori
        .map(|ts| {
            ts.iter()
                .map(|dims| lattice(dims))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let d = match (args.d, &tori) {
        (Some(d), _) => d,
        (None, Some(ts)) if !ts.is_empty() => ts[0].dim(),
        _ => 1,
    };
    let lim = kernel_limit_for(s, d, tori, opts, bounds)?;
    Ok(Report {
        result: serde_json::to_value(&lim).expect("kernel limits serialize"),
        table: Some(Table {
            headers: vec!["N", "p", "q"],
            rows: per_n_rows(&lim, false),
        }),
    })
}

/// The six-term breakdown of `Jbar_2` on cycles, cross-checked against the
/// kernel itself at every length.
pub fn appendix(cycles: Option<Vec<usize>>, opts: &KernelOptions) -> Result<Report, CliError> {
    let cycles = cycles.unwrap_or_else(default_appendix_cycles);
    let a = appendix_limits(&cycles)?;
    let mut kernel_samples = Vec::new();
    for (n, terms) in &a.per_n {
        let j = kernel_finite(&lattice(&[*n])?, 2, opts)?;
        if terms.total() != j {
            return Err(dimer_expansion::Error::Consistency(format!(
                "six terms sum to {} but Jbar_2 = {j} at N = {n}",
                terms.total()
            ))
            .into());
        }
        kernel_samples.push((*n, j));
    }
    let (jbar2, _) = kernel_limit(&kernel_samples, DegreeBounds::for_order(2))?;
    if jbar2 != a.total_limit {
        return Err(dimer_expansion::Error::Consistency(format!(
            "limit of the six terms {} differs from the Jbar_2 limit {jbar2}",
            a.total_limit
        ))
        .into());
    }
    let named = |terms: [&Rational; 6]| -> Value {
        AppendixTerms::LABELS
            .iter()
            .zip(terms)
            .map(|(k, v)| (k.to_string(), Value::String(to_pq(v))))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    let per_n: Vec<Value> = a
        .per_n
        .iter()
        .map(|(n, t)| json!({ "N": n, "terms": named(t.as_array()), "total": to_pq(&t.total()) }))
        .collect();
    let limit_refs: [&Rational; 6] = std::array::from_fn(|k| &a.limits[k]);
    let mut rows = Vec::new();
    for (n, t) in &a.per_n {
        for (label, v) in AppendixTerms::LABELS.iter().zip(t.as_array()) {
            rows.push(vec![
                n.to_string(),
                label.to_string(),
                v.numer().to_string(),
                v.denom().to_string(),
            ]);
        }
    }
    Ok(Report {
        result: json!({
            "s": 2,
            "d": 1,
            "per_N": per_n,
            "limits": named(limit_refs),
            "sum_limit": to_pq(&a.total_limit),
            "Jbar_2": to_pq(&jbar2),
        }),
        table: Some(Table {
            headers: vec!["N", "term", "p", "q"],
            rows,
        }),
    })
}

fn load_kernels(paths: &[PathBuf]) -> Result<Vec<KernelResult>, CliError> {
    let mut out = Vec::new();
    for path in paths {
        let fail = |reason: String| CliError::KernelFile {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        let mut value: Value = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
        if let Some(inner) = value.get_mut("result") {
            value = inner.take();
        }
        let items = match value {
            Value::Array(items) => items,
            single => vec![single],
        };
        for item in items {
            out.push(serde_json::from_value(item).map_err(|e| fail(e.to_string()))?);
        }
    }
    Ok(out)
}

pub struct SeriesArgs {
    pub order: usize,
    pub eval_d: Option<usize>,
    pub kernel_files: Vec<PathBuf>,
    pub oracle: Vec<Vec<usize>>,
}

pub fn series(args: SeriesArgs, opts: &KernelOptions, digits: usize) -> Result<Report, CliError> {
    let kernels = if args.kernel_files.is_empty() {
        (2..=(2 * args.order).min(MAX_ORDER))
            .map(|s| kernel_result(s, &default_d_samples(s), opts))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        load_kernels(&args.kernel_files)?
    };
    let expansion = lambda_expansion(&kernels, args.order)?;
    let report = expansion.report(args.eval_d, digits)?;
    let mut result = serde_json::to_value(&report).expect("series reports serialize");
    if !args.oracle.is_empty() {
        let mut rows = Vec::new();
        for dims in &args.oracle {
            let pf = partition_function(&lattice(dims)?, MatchingOptions::default(), digits)?;
            rows.push(json!({ "dims": dims, "lambda_N": decimal(&pf.lambda.lambda_n, digits) }));
        }
        result["finite_volume"] = Value::Array(rows);
    }
    Ok(Report::json(result))
}

/// Accepts `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_fraction(text: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Config(format!("cannot read `{text}` as a fraction"));
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        let scale = format!("1{}", "0".repeat(frac.len()));
        return parse_pq(&format!("{digits}/{scale}")).map_err(|_| bad());
    }
    parse_pq(text).map_err(|_| bad())
}

pub enum BetaSelector {
    Fraction(Rational),
    Index(usize),
}

pub fn beta(selector: BetaSelector, sizes: &[usize], digits: usize) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &n in sizes {
        let i = match &selector {
            BetaSelector::Index(i) => *i,
            BetaSelector::Fraction(j) => {
                let i = j * Rational::from_integer((n as i64).into());
                if !i.is_integer() || i < Rational::from_integer(0.into()) {
                    return Err(CliError::Config(format!(
                        "j * N = {i} is not a whole number at N = {n}"
                    )));
                }
                i.to_integer()
                    .to_string()
                    .parse()
                    .expect("non-negative integer")
            }
        };
        let b = BetaFactor::new(n, i)?;
        let g = b.asym_exponent(digits)?;
        let rate = b.log_rate(digits)?;
        let gap = real::abs(&(rate.clone() - g.clone()));
        let asym = (g.clone() * real::from_i64(n as i64, digits)).exp();
        let value = real::from_rational(&b.exact_value, digits);
        rows.push(vec![
            n.to_string(),
            i.to_string(),
            decimal(&value, digits),
            decimal(&gap, digits),
        ]);
        json_rows.push(json!({
            "N": n,
            "i": i,
            "j": to_pq(&b.j),
            "beta_exact": to_pq(&b.exact_value),
            "beta": decimal(&value, digits),
            "exp_N_g": decimal(&asym, digits),
            "log_rate": decimal(&rate, digits),
            "g": decimal(&g, digits),
            "rate_gap": decimal(&gap, digits),
        }));
    }
    Ok(Report {
        result: json!({ "rows": json_rows }),
        table: Some(Table {
            headers: vec!["N", "i", "beta", "rate_gap"],
            rows,
        }),
    })
}

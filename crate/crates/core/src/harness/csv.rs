//! CSV emission and parse-back.
//!
//! Floats are written with `Display`, the shortest representation that parses back to the
//! same `f64`, so a written file re-derives every series bit for bit.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::DVector;

use super::CellResult;
use crate::error::{OcoError, Result};
use crate::metrics::MetricsSeries;

/// Header for `p` constraints, with a `horizon` column when `with_horizon` is set.
pub fn header(p: usize, with_horizon: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["problem", "algo", "seed", "tau"].iter().map(|s| s.to_string()).collect();
    if with_horizon {
        cols.push("horizon".into());
    }
    for c in ["t", "cum_regret", "avg_regret", "max_avg_vio"] {
        cols.push(c.into());
    }
    cols.extend((1..=p).map(|i| format!("vio_{i}")));
    cols.push("lambda_norm".into());
    cols
}

/// Writes one row per round of every cell. `vio_i` is the cumulative violation of constraint `i`.
pub fn write_csv<W: Write>(out: &mut W, cells: &[CellResult], with_horizon: bool) -> Result<()> {
    let p = cells.first().map_or(0, |c| c.series.num_constraints());
    if cells.iter().any(|c| c.series.num_constraints() != p) {
        return Err(OcoError::InvalidArgument("cells disagree on the number of constraints".into()));
    }
    writeln!(out, "{}", header(p, with_horizon).join(","))?;
    let mut line = String::new();
    for cell in cells {
        let s = &cell.series;
        for t in 1..=s.horizon() {
            use std::fmt::Write as _;
            line.clear();
            let _ = write!(line, "{},{},{},{},", cell.problem, cell.algo, cell.seed, cell.tau);
            if with_horizon {
                let _ = write!(line, "{},", cell.horizon);
            }
            let _ = write!(
                line,
                "{t},{},{},{}",
                s.cum_regret[t - 1],
                s.avg_regret(t),
                s.max_avg_violation(t)
            );
            for v in s.cum_violation[t - 1].iter() {
                let _ = write!(line, ",{v}");
            }
            line.push(',');
            if let Some(norms) = &s.lambda_norm {
                let _ = write!(line, "{}", norms[t - 1]);
            }
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// Identifies one cell in a parsed file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    pub problem: String,
    pub algo: String,
    pub seed: u64,
    pub tau: usize,
    pub horizon: Option<usize>,
}

fn parse<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> Result<T> {
    field
        .parse()
        .map_err(|_| OcoError::Config(format!("line {line}: cannot parse {what} from `{field}`")))
}

/// Reads a file written by [`write_csv`] back into one series per cell.
pub fn read_csv<R: BufRead>(input: R) -> Result<BTreeMap<CellKey, MetricsSeries>> {
    let mut lines = input.lines();
    let head = lines.next().ok_or_else(|| OcoError::Config("empty CSV".into()))??;
    let cols: Vec<&str> = head.split(',').collect();
    let with_horizon = cols.get(4) == Some(&"horizon");
    let fixed = if with_horizon { 9 } else { 8 };
    if cols.len() < fixed + 1 || cols.last() != Some(&"lambda_norm") {
        return Err(OcoError::Config(format!("unexpected header `{head}`")));
    }
    let p = cols.len() - fixed - 1;
    let mut out: BTreeMap<CellKey, MetricsSeries> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let n = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(OcoError::Config(format!("line {n}: expected {} fields, got {}", cols.len(), f.len())));
        }
        let key = CellKey {
            problem: f[0].to_string(),
            algo: f[1].to_string(),
            seed: parse(f[2], "seed", n)?,
            tau: parse(f[3], "tau", n)?,
            horizon: if with_horizon { Some(parse(f[4], "horizon", n)?) } else { None },
        };
        let rest = &f[fixed - 4..];
        let t: usize = parse(rest[0], "t", n)?;
        let cum_regret: f64 = parse(rest[1], "cum_regret", n)?;
        let vio = (0..p)
            .map(|j| parse(rest[4 + j], "violation", n))
            .collect::<Result<Vec<f64>>>()?;
        let lambda = rest[4 + p];
        let lambda = if lambda.is_empty() { None } else { Some(parse::<f64>(lambda, "lambda_norm", n)?) };
        let series = out.entry(key).or_insert_with(|| MetricsSeries {
            cum_regret: Vec::new(),
            cum_violation: Vec::new(),
            lambda_norm: lambda.map(|_| Vec::new()),
        });
        if t != series.cum_regret.len() + 1 {
            return Err(OcoError::Config(format!("line {n}: rounds out of order")));
        }
        series.cum_regret.push(cum_regret);
        series.cum_violation.push(DVector::from_vec(vio));
        match (&mut series.lambda_norm, lambda) {
            (Some(norms), Some(l)) => norms.push(l),
            (None, None) => {}
            _ => return Err(OcoError::Config(format!("line {n}: lambda_norm present on only some rows"))),
        }
    }
    Ok(out)
}

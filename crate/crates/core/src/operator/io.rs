//! Plain-text operator format: the dimension `n`, then `T0`, `T1`, `T2`, `T3`
//! as `n x n` row-major blocks of whitespace-separated reals. Lines starting
//! with `#` are comments.

use std::fmt::Write;

use nalgebra::DMatrix;

use super::CommutingOperator;
use crate::error::{Error, Result};

pub fn format_operator(t: &CommutingOperator) -> String {
    let n = t.dim();
    let mut out = String::new();
    writeln!(out, "{n}").unwrap();
    for (i, c) in t.components().iter().enumerate() {
        writeln!(out, "# T{i}").unwrap();
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{:e}", c[(r, j)])).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    out
}

pub fn parse_operator(text: &str) -> Result<CommutingOperator> {
    let mut tokens = text.lines().filter(|l| !l.trim_start().starts_with('#')).flat_map(str::split_whitespace);
    let bad = |msg: String| Error::Parse(format!("operator file: {msg}"));
    let n: usize =
        tokens.next().ok_or_else(|| bad("missing dimension header".into()))?.parse().map_err(|e| bad(format!("dimension header: {e}")))?;
    if n == 0 {
        return Err(bad("dimension must be positive".into()));
    }
    let mut values = Vec::with_capacity(4 * n * n);
    for tok in tokens {
        values.push(tok.parse::<f64>().map_err(|e| bad(format!("{tok:?}: {e}")))?);
    }
    if values.len() != 4 * n * n {
        return Err(bad(format!("expected {} entries, found {}", 4 * n * n, values.len())));
    }
    let comps = std::array::from_fn(|i| DMatrix::from_row_slice(n, n, &values[i * n * n..(i + 1) * n * n]));
    CommutingOperator::new(comps)
}

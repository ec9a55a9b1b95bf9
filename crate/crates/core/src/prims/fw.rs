use std::fmt;
use std::sync::Arc;

use super::{as_literal, Literal, Registry, Signature, ROW};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::Term;

/// A path length; `Infinite` absorbs addition and is the largest value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn add(self, other: Distance) -> Distance {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a.saturating_add(b)),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(n) => write!(f, "{n}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Row `source` of the distance matrix at stage `stage`. Symbolic rows carry no entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowValue {
    pub source: usize,
    pub stage: usize,
    pub entries: Option<Vec<Distance>>,
}

impl RowValue {
    pub fn symbolic(source: usize, stage: usize) -> RowValue {
        RowValue { source, stage, entries: None }
    }

    pub fn numeric(source: usize, stage: usize, entries: Vec<Distance>) -> RowValue {
        RowValue { source, stage, entries: Some(entries) }
    }
}

impl fmt::Display for RowValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I{}({})", self.source, self.stage)?;
        if let Some(es) = &self.entries {
            let parts: Vec<String> = es.iter().map(Distance::to_string).collect();
            write!(f, "[{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

/// `f<I_i(s), I_m(n)>`: when the second row is `I_{s+1}(s)` this relaxes row `i` through
/// node `s+1` and yields `I_i(s+1)`; any other pair yields the first row unchanged.
pub fn fw_f(first: &RowValue, second: &RowValue) -> Result<RowValue> {
    if first.source == 0 || second.source == 0 {
        return Err(Error::Prim("row indices start at 1".into()));
    }
    if second.stage != first.stage || second.source != first.stage + 1 {
        return Ok(first.clone());
    }
    let k = second.source;
    let entries = match (&first.entries, &second.entries) {
        (None, None) => None,
        (Some(ei), Some(ek)) => {
            if ei.len() != ek.len() {
                return Err(Error::Prim(format!(
                    "rows of different length: {} and {}",
                    ei.len(),
                    ek.len()
                )));
            }
            let through = *ei
                .get(k - 1)
                .ok_or_else(|| Error::Prim(format!("row has no entry for node {k}")))?;
            Some(ei.iter().zip(ek).map(|(&direct, &via)| direct.min(through.add(via))).collect())
        }
        _ => return Err(Error::Prim("cannot combine a symbolic row with a numeric one".into())),
    };
    Ok(RowValue { source: first.source, stage: first.stage + 1, entries })
}

/// Sequential Floyd-Warshall on a square matrix.
pub fn floyd_warshall(matrix: &[Vec<Distance>]) -> Vec<Vec<Distance>> {
    let n = matrix.len();
    let mut d = matrix.to_vec();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// One row per line, entries separated by whitespace or commas; `inf` for no edge; `#` comments.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Distance>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|tok| match tok {
                "inf" => Ok(Distance::Infinite),
                _ => tok
                    .parse::<u64>()
                    .map(Distance::Finite)
                    .map_err(|_| Error::Prim(format!("line {}: bad matrix entry {tok:?}", lineno + 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Prim("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Prim(format!("matrix row {} has {} entries, expected {n}", bad + 1, rows[bad].len())));
    }
    Ok(rows)
}

pub(super) fn register(r: &mut Registry) {
    let row = Formula::atom(ROW);
    let ty = Formula::arrow(Formula::conj(row.clone(), row.clone()), row);
    r.register(
        "f",
        Signature::Fixed(ty),
        1,
        Some(Arc::new(|args: &[Term]| {
            let Term::Pair(l, r) = &args[0] else {
                return Ok(None);
            };
            match (as_literal(l), as_literal(r)) {
                (Some(Literal::Row(a)), Some(Literal::Row(b))) => Ok(Some(Term::lit(Literal::Row(fw_f(a, b)?)))),
                _ => Ok(None),
            }
        })),
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use Distance::{Finite as F, Infinite as Inf};

    #[test]
    fn symbolic_rows() {
        let out = fw_f(&RowValue::symbolic(2, 0), &RowValue::symbolic(1, 0)).unwrap();
        assert_eq!(out, RowValue::symbolic(2, 1));
        let out = fw_f(&RowValue::symbolic(1, 0), &RowValue::symbolic(3, 2)).unwrap();
        assert_eq!(out, RowValue::symbolic(1, 0));
        let out = fw_f(&RowValue::symbolic(3, 1), &RowValue::symbolic(2, 1)).unwrap();
        assert_eq!(out, RowValue::symbolic(3, 2));
    }

    #[test]
    fn numeric_rows_follow_the_recurrence() {
        let m = vec![vec![F(0), F(4), Inf], vec![Inf, F(0), F(1)], vec![F(2), Inf, F(0)]];
        // Stage by stage: row i at stage k combines with row k at stage k-1.
        let mut rows: Vec<RowValue> = m.iter().enumerate().map(|(i, r)| RowValue::numeric(i + 1, 0, r.clone())).collect();
        for k in 1..=3 {
            let pivot = rows[k - 1].clone();
            rows = rows.iter().map(|r| fw_f(r, &pivot).unwrap()).collect();
        }
        let expected = floyd_warshall(&m);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.stage, 3);
            assert_eq!(r.entries.as_ref().unwrap(), &expected[i]);
        }
        assert_eq!(expected[0][2], F(5));
    }

    #[test]
    fn mixed_rows_rejected() {
        assert!(fw_f(&RowValue::numeric(2, 0, vec![F(0), F(1)]), &RowValue::symbolic(1, 0)).is_err());
    }

    #[test]
    fn matrix_file() {
        let m = parse_matrix("# graph\n0 1 inf\ninf, 0, 2\n3 inf 0\n").unwrap();
        assert_eq!(m[1], vec![Inf, F(0), F(2)]);
        assert!(parse_matrix("0 1\n0\n").is_err());
        assert!(parse_matrix("0 x\n1 0\n").is_err());
    }

    #[test]
    fn row_display() {
        assert_eq!(RowValue::symbolic(1, 3).to_string(), "I1(3)");
        assert_eq!(RowValue::numeric(1, 0, vec![F(0), Inf]).to_string(), "I1(0)[0, inf]");
    }
}

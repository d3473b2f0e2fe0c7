//! Text formats for Gram matrices.

use crate::matrix::{Matrix, SymMatrix};
use crate::num::Rational;
use crate::{Error, Result};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Tokens of the non-comment content, one entry per nonempty line.
pub(crate) fn content_lines(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty())
        .map(|l| l.split_whitespace().collect())
        .collect()
}

/// First line `n`, then `n` rows of `n` entries (integers or `p/q`).
pub fn parse_gram(text: &str) -> Result<SymMatrix> {
    let lines = content_lines(text);
    let (head, rows) = lines.split_first().ok_or_else(|| Error::Parse("empty Gram file".into()))?;
    if head.len() != 1 {
        return Err(Error::Parse("first line must contain only the dimension".into()));
    }
    let n: usize = head[0].parse().map_err(|_| Error::Parse(format!("bad dimension `{}`", head[0])))?;
    if n == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("expected {n} rows, found {}", rows.len())));
    }
    let mut m = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
        }
        let row: Vec<Rational> = r
            .iter()
            .map(|t| t.parse::<Rational>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        m.push(row);
    }
    SymMatrix::from_full(&Matrix::from_rows(m)).ok_or_else(|| Error::Parse("matrix is not symmetric".into()))
}

pub fn write_gram(g: &SymMatrix) -> String {
    let n = g.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| g.get(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# A2 scaled\n2\n2 1  # row one\n1 3/2\n";
        let g = parse_gram(text).unwrap();
        assert_eq!(g.get(1, 1), &Rational::new(3, 2));
        assert_eq!(parse_gram(&write_gram(&g)).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_gram("2\n1 2\n3 1\n").is_err());
        assert!(parse_gram("2\n1 2\n").is_err());
        assert!(parse_gram("2\n1 x\nx 1\n").is_err());
        assert!(parse_gram("").is_err());
    }
}

//! Plain-text state dump: a labels line, a mean line, then one line per
//! covariance row. Numbers use shortest round-trip formatting.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::GaussianState;
use crate::error::{invalid, Result};

impl GaussianState {
    pub fn to_text(&self) -> String {
        let mut out = self.labels().join(" ");
        out.push('\n');
        let join = |it: &mut dyn Iterator<Item = &f64>| it.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
        out.push_str(&join(&mut self.mean().iter()));
        out.push('\n');
        for row in self.cov().row_iter() {
            let _ = writeln!(out, "{}", join(&mut row.iter()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let labels: Vec<String> = lines
            .next()
            .ok_or_else(|| invalid("state", "missing labels line"))?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let n = 2 * labels.len();
        let parse_row = |line: Option<&str>, what: &str| -> Result<Vec<f64>> {
            let line = line.ok_or_else(|| invalid("state", format!("missing {what}")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| invalid("state", format!("{what}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(invalid("state", format!("{what}: expected {n} values, got {}", row.len())));
            }
            Ok(row)
        };
        let mean = parse_row(lines.next(), "mean line")?;
        let mut cov = Vec::with_capacity(n * n);
        for i in 0..n {
            cov.extend(parse_row(lines.next(), &format!("covariance row {i}"))?);
        }
        GaussianState::new(labels, DVector::from_vec(mean), DMatrix::from_row_slice(n, n, &cov))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn text_round_trip_is_exact(r in 1.01f64..5.0, beta in -3.0f64..3.0, dx in -1e3f64..1e3) {
            let mut s = crate::gaussian::tmss(r, beta).unwrap();
            let mut mean = s.mean().clone();
            mean[1] = dx;
            s = GaussianState::new(s.labels().to_vec(), mean, s.cov().clone()).unwrap();
            let back = GaussianState::from_text(&s.to_text()).unwrap();
            prop_assert_eq!(back, s);
        }
    }

    #[test]
    fn malformed_dump() {
        assert!(GaussianState::from_text("").is_err());
        assert!(GaussianState::from_text("a\n0 0\n1 0\n").is_err());
        assert!(GaussianState::from_text("a\n0 0\n1 x\n0 1\n").is_err());
    }
}

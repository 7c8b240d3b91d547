use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Outcome of a two-sided paired t-test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairedTest {
    Tested { t: f64, df: usize, p_value: f64 },
    /// All differences are identical, so the t statistic is undefined.
    Degenerate { mean_difference: f64 },
}

impl PairedTest {
    pub fn p_value(&self) -> Option<f64> {
        match self {
            Self::Tested { p_value, .. } => Some(*p_value),
            Self::Degenerate { .. } => None,
        }
    }
}

/// Two-sided paired t-test on `a[i] − b[i]`.
///
/// The p-value is `2 · P(T_{n−1} > |t|)` from the Student-t survival
/// function, which `statrs` evaluates through the regularized incomplete
/// beta function.
pub fn paired_test(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            op: "paired_test",
            left: vec![a.len()],
            right: vec![b.len()],
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("paired test needs at least 2 pairs".into()));
    }
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let ss: f64 = diffs.iter().map(|d| (d - mean) * (d - mean)).sum();
    if ss == 0.0 {
        return Ok(PairedTest::Degenerate {
            mean_difference: mean,
        });
    }
    let sd = (ss / (n - 1.0)).sqrt();
    let t = mean / (sd / n.sqrt());
    let df = a.len() - 1;
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Numerical(format!("t distribution: {e}")))?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(PairedTest::Tested { t, df, p_value })
}

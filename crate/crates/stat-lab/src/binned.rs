use crate::StatError;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson χ² goodness of fit of observed counts against cell probabilities.
///
/// Cells with expected count below 5 are pooled into their right neighbour.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<ChiSquareReport, StatError> {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(StatError::EmptySample);
    }
    let total_p: f64 = probs.iter().sum();
    let mut cells = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        obs += c as f64;
        exp += p / total_p * n as f64;
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    if cells.len() < 2 {
        return Err(StatError::TooFewPoints { needed: 2, got: cells.len() });
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let p_value = ChiSquared::new(dof as f64).expect("dof ≥ 1").sf(statistic);
    Ok(ChiSquareReport { statistic, dof, p_value })
}

use crate::StatError;
use serde::{Deserialize, Serialize};

/// Weighted least-squares fit of `-log p` against `t^(1/3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Fits `-log p̂ = slope · t^(1/3) + intercept`.
///
/// Points are `(t, p̂, ci)` with `ci` a 3σ half-width on `p̂`. Weights are the
/// inverse delta-method variances of `log p̂`; if any `ci` is zero the fit is
/// unweighted.
pub fn survival_exponent_fit(points: &[(f64, f64, f64)]) -> Result<ExponentFit, StatError> {
    if points.len() < 3 {
        return Err(StatError::TooFewPoints { needed: 3, got: points.len() });
    }
    if let Some(&(_, p, _)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(StatError::NonPositive { what: "survival probability", value: p });
    }
    let weighted = points.iter().all(|p| p.2 > 0.0);
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(t, p, ci)| {
            let w = if weighted {
                let sd = ci / 3.0 / p;
                1.0 / (sd * sd)
            } else {
                1.0
            };
            (t.cbrt(), -p.ln(), w)
        })
        .collect();
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let mx = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let my = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - mx) * (r.1 - my)).sum();
    let syy: f64 = rows.iter().map(|r| r.2 * (r.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ExponentFit { slope, intercept, r2 })
}

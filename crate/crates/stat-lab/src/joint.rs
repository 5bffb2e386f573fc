use crate::{ks_test, KsReport, ReferenceLaw, StatError};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Thresholds for [`joint_rur_test`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointThresholds {
    pub marginal_ks: f64,
    pub ratio_ks: f64,
    pub max_abs_correlation: f64,
    /// Minimum p-value of the rank-quadrant χ² independence test.
    pub min_quadrant_p: f64,
}

/// Result of testing pairs `(a, b)` against `a ~ law`, `b/(factor·a) ~ U[0,1]`
/// with `a` and the ratio independent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRurReport {
    pub marginal: KsReport,
    pub ratio: KsReport,
    pub correlation: f64,
    pub correlation_pass: bool,
    pub quadrant_chi2: f64,
    pub quadrant_p: f64,
    pub independence_pass: bool,
    pub pass: bool,
}

/// Decomposition test for pairs of the form `(R, factor·U·R)`.
///
/// `factor` is 3 for the rescaled argmax of the full process, 2 for the
/// triangle model and 1 for the drifted taboo minimum.
pub fn joint_rur_test(
    pairs: &[(f64, f64)],
    marginal: &ReferenceLaw,
    factor: f64,
    thresholds: JointThresholds,
) -> Result<JointRurReport, StatError> {
    if pairs.is_empty() {
        return Err(StatError::EmptySample);
    }
    if let Some(&(a, _)) = pairs.iter().find(|p| !(p.0 > 0.0)) {
        return Err(StatError::NonPositive { what: "first coordinate", value: a });
    }
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ratio: Vec<f64> = pairs.iter().map(|p| p.1 / (factor * p.0)).collect();
    let marginal = ks_test(&a, marginal, thresholds.marginal_ks)?;
    let ratio_rep = ks_test(&ratio, &ReferenceLaw::UniformU, thresholds.ratio_ks)?;
    let correlation = pearson(&a, &ratio)?;
    let (quadrant_chi2, quadrant_p) = rank_quadrant_chi2(&a, &ratio)?;
    let correlation_pass = correlation.abs() < thresholds.max_abs_correlation;
    let independence_pass = correlation_pass && quadrant_p > thresholds.min_quadrant_p;
    let pass = marginal.pass && ratio_rep.pass && independence_pass;
    Ok(JointRurReport {
        marginal,
        ratio: ratio_rep,
        correlation,
        correlation_pass,
        quadrant_chi2,
        quadrant_p,
        independence_pass,
        pass,
    })
}

/// Pearson sample correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatError> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(StatError::TooFewPoints { needed: 2, got: n });
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn quartile_of_ranks(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    let mut q = vec![0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        q[i] = rank * 4 / v.len();
    }
    q
}

/// χ² statistic and p-value (9 degrees of freedom) of the 4×4 table of
/// rank quartiles. Small p-values indicate dependence.
pub fn rank_quadrant_chi2(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatError> {
    let n = x.len().min(y.len());
    if n < 16 {
        return Err(StatError::TooFewPoints { needed: 16, got: n });
    }
    let (qx, qy) = (quartile_of_ranks(&x[..n]), quartile_of_ranks(&y[..n]));
    let mut table = [[0usize; 4]; 4];
    for (i, j) in qx.iter().zip(&qy) {
        table[*i][*j] += 1;
    }
    let row: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<usize> = (0..4).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut chi2 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let expected = row[i] as f64 * col[j] as f64 / n as f64;
            let d = table[i][j] as f64 - expected;
            chi2 += d * d / expected;
        }
    }
    let p = ChiSquared::new(9.0).expect("valid dof").sf(chi2);
    Ok((chi2, p))
}

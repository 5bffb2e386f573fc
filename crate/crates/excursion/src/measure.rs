use crate::ExcursionError;
use std::f64::consts::{FRAC_PI_2, PI};

fn check(d: f64) -> Result<(), ExcursionError> {
    if d > 0.0 && d < 0.5 {
        Ok(())
    } else {
        Err(ExcursionError::Domain { what: "excursion depth", value: d })
    }
}

/// Mass of excursions below 1/2 reaching under `d`, per unit local time:
/// `(π/2) sin(πd)/sin(π/2 − πd) = (π/2) tan(πd)`.
pub fn excursion_rate_below(d: f64) -> Result<f64, ExcursionError> {
    check(d)?;
    Ok(FRAC_PI_2 * (PI * d).sin() / (FRAC_PI_2 - PI * d).sin())
}

/// Density of the depth measure: `(π²/2) / cos²(πd)`.
pub fn excursion_density(d: f64) -> Result<f64, ExcursionError> {
    check(d)?;
    let c = (PI * d).cos();
    Ok(PI * PI / 2.0 / (c * c))
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Power law `y = zeta * x^gamma` fitted in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub zeta: f64,
    pub gamma: f64,
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Ordinary least squares of `ln y` on `ln x`.
///
/// Needs at least three samples, all strictly positive, and at least two
/// distinct `x` values. A perfect fit (including constant `y`) has r² = 1.
pub fn loglog_fit(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "log-log fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(x, y)) = samples
        .iter()
        .find(|&&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::invalid(format!(
            "sample ({x}, {y}) is not positive and finite"
        )));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid(
            "log-log fit needs at least two distinct x values",
        ));
    }
    let gamma = sxy / sxx;
    let intercept = mean_y - gamma * mean_x;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - gamma * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * n {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ScalingFit {
        zeta: intercept.exp(),
        gamma,
        r_squared,
        samples: samples.to_vec(),
    })
}

//! Log-spaced grids and log-log slope fits.

use serde::Serialize;

use crate::error::{invalid, Result};

/// `points` values spaced evenly in `log t` over `[min, max]`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && points >= 2) {
        return Err(invalid(format!("log grid needs 0 < min < max and 2+ points, got [{min}, {max}] x {points}")));
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect())
}

/// 16 points in `[1e-2, 1e2]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 16).expect("valid default grid")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
}

/// Least-squares fit of `log y` against `log t`.
pub fn loglog_slope(t: &[f64], y: &[f64]) -> Result<SlopeFit> {
    if t.len() != y.len() || t.len() < 2 {
        return Err(invalid("slope fit needs two or more paired points"));
    }
    if t.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("slope fit needs positive finite data"));
    }
    let n = t.len() as f64;
    let xs: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(SlopeFit { slope, intercept: my - slope * mx, points_used: t.len() })
}

/// Fit over the middle 60% of the points (20% trimmed from each end).
pub fn middle_slope(t: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let skip = (t.len() as f64 * 0.2).round() as usize;
    let end = t.len().saturating_sub(skip);
    if end <= skip + 1 {
        return Err(invalid("too few points for a trimmed fit"));
    }
    loglog_slope(&t[skip..end], &y[skip..end])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_power_law() {
        let t = log_grid(0.1, 10.0, 9).unwrap();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.375)).collect();
        let fit = middle_slope(&t, &y).unwrap();
        assert!((fit.slope + 0.375).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn default_grid_straddles_one() {
        let t = default_t_grid();
        assert_eq!(t.len(), 16);
        assert!(t.iter().any(|&v| v < 1.0) && t.iter().any(|&v| v > 1.0));
        assert!((t[0] - 1e-2).abs() < 1e-15 && (t[15] - 1e2).abs() < 1e-10);
    }
}

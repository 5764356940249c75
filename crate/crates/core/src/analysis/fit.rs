use serde::Serialize;

use crate::{Error, Result};

const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RateModel {
    /// `u_k ≈ A τ^k + floor`
    Geometric { tau: f64 },
    /// `u_k ≈ A k^{-exponent}`
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    #[serde(flatten)]
    pub model: RateModel,
    pub amplitude: f64,
    pub floor: f64,
    pub r_squared: f64,
    /// First and last iteration index (1-based) of the points used.
    pub window: (usize, usize),
    pub points: usize,
}

impl RateFit {
    pub fn tau(&self) -> Option<f64> {
        match self.model {
            RateModel::Geometric { tau } => Some(tau),
            RateModel::Power { .. } => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self.model {
            RateModel::Power { exponent } => Some(exponent),
            RateModel::Geometric { .. } => None,
        }
    }

    /// A geometric fit is reliable when `τ < 1` and `r² ≥ 0.9`.
    pub fn is_reliable(&self) -> bool {
        match self.model {
            RateModel::Geometric { tau } => tau < 1.0 && self.r_squared >= 0.9,
            RateModel::Power { .. } => self.r_squared >= 0.9,
        }
    }
}

/// Ordinary least squares `y ≈ intercept + slope x`, returning
/// `(slope, intercept, r²)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

/// Points `(k, u_k − floor)` from index `burn_in` on (1-based) whose excess
/// over the floor is positive and finite.
fn usable(series: &[f64], floor: f64, burn_in: usize) -> Vec<(usize, f64)> {
    series
        .iter()
        .enumerate()
        .map(|(i, &u)| (i + 1, u - floor))
        .filter(|&(k, e)| k >= burn_in && e > 0.0 && e.is_finite())
        .collect()
}

/// Fit `u_k ≈ A τ^k + floor` by regressing `ln(u_k − floor)` on `k` over
/// `k ≥ burn_in` (1-based). Points at or below the floor are skipped.
pub fn fit_geometric(series: &[f64], floor: f64, burn_in: usize) -> Result<RateFit> {
    if !(floor >= 0.0) {
        return Err(Error::param("floor", "must be nonnegative"));
    }
    let pts = usable(series, floor, burn_in);
    if pts.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} usable points above the floor, need {MIN_POINTS}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(k, _)| k as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, e)| e.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(RateFit {
        model: RateModel::Geometric { tau: slope.exp() },
        amplitude: intercept.exp(),
        floor,
        r_squared,
        window: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
    })
}

/// Fit `u_k ≈ A k^{-e}` by regressing `ln u_k` on `ln k` over `k ≥ burn_in`.
pub fn fit_power(series: &[f64], burn_in: usize) -> Result<RateFit> {
    let pts = usable(series, 0.0, burn_in);
    if pts.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} positive points, need {MIN_POINTS}",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(k, _)| (k as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, e)| e.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(RateFit {
        model: RateModel::Power { exponent: -slope },
        amplitude: intercept.exp(),
        floor: 0.0,
        r_squared,
        window: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
    })
}

/// Fit `u ≈ A x^{-e}` through arbitrary abscissae `xs > 0` (at least two
/// points with positive values).
pub fn fit_power_at(xs: &[f64], values: &[f64]) -> Result<RateFit> {
    if xs.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: values.len(),
        });
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(values)
        .filter(|(&x, &u)| x > 0.0 && u > 0.0 && u.is_finite())
        .map(|(&x, &u)| (x.ln(), u.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit(format!("{} positive points, need 2", pts.len())));
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, intercept, r_squared) = least_squares(&lx, &ly);
    Ok(RateFit {
        model: RateModel::Power { exponent: -slope },
        amplitude: intercept.exp(),
        floor: 0.0,
        r_squared,
        window: (0, pts.len() - 1),
        points: pts.len(),
    })
}

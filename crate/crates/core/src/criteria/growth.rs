//! Reading trends out of quotient sequences measured at doubling lengths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};

/// Thresholds shared by every growth and stabilization decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// A trend fires when the fitted slope per e-fold of length exceeds this
    /// fraction of the mean quotient...
    pub slope_rel: f64,
    /// ...and the fit explains at least this fraction of the variance.
    pub r2_min: f64,
    /// Largest relative change of the running supremum over the last
    /// doubling that still counts as stabilized.
    pub stabilization: f64,
    /// A rising sequence whose increments shrink by a factor below this per
    /// doubling is converging geometrically and does not fire.
    pub decay_max: f64,
    /// Number of trailing increments the decay factor is fitted on.
    pub decay_window: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            slope_rel: 0.05,
            r2_min: 0.9,
            stabilization: 0.05,
            decay_max: 0.93,
            decay_window: 5,
        }
    }
}

/// Quotients along one nested or per-length family of blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAssessment {
    pub name: String,
    pub lengths: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Quotient against ln(length).
    pub fit: LinearFit,
    /// fit.slope divided by the mean quotient.
    pub relative_slope: f64,
    /// Relative change of max(quotients[..=i]) from the second-last to the
    /// last length.
    pub last_change: f64,
    /// Fitted factor by which the trailing increments shrink per step;
    /// `None` unless they are all positive.
    pub increment_ratio: Option<f64>,
    /// Clean growth trend: relative_slope > slope_rel with r2 ≥ r2_min, and
    /// increments not decaying faster than decay_max per step.
    pub fires: bool,
    /// last_change < stabilization.
    pub stable: bool,
}

pub fn assess_chain(
    name: impl Into<String>,
    lengths: Vec<f64>,
    quotients: Vec<f64>,
    th: &Thresholds,
) -> Result<ChainAssessment> {
    if lengths.len() != quotients.len() {
        return Err(Error::LengthMismatch {
            expected: lengths.len(),
            got: quotients.len(),
        });
    }
    if lengths.len() < 3 {
        return Err(Error::DegenerateFit(
            "a growth trend needs at least three lengths".into(),
        ));
    }
    let logs: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let fit = linear_fit(&logs, &quotients)?;
    let mean = quotients.iter().sum::<f64>() / quotients.len() as f64;
    let relative_slope = fit.slope / mean;
    let n = quotients.len();
    let before = quotients[..n - 1]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let after = before.max(quotients[n - 1]);
    let last_change = (after - before) / before;
    let increment_ratio = increment_ratio(&quotients, th.decay_window);
    let fires = relative_slope > th.slope_rel
        && fit.r2 >= th.r2_min
        && increment_ratio.is_some_and(|r| r >= th.decay_max);
    Ok(ChainAssessment {
        name: name.into(),
        lengths,
        quotients,
        fit,
        relative_slope,
        last_change,
        increment_ratio,
        fires,
        stable: last_change < th.stabilization,
    })
}

/// exp of the slope of ln Δ_i against i over the last `window` increments.
fn increment_ratio(quotients: &[f64], window: usize) -> Option<f64> {
    let incs: Vec<f64> = quotients.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &incs[incs.len().saturating_sub(window.max(2))..];
    if tail.len() < 2 || tail.iter().any(|&d| d.is_nan() || d <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = (0..tail.len()).map(|i| i as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|d| d.ln()).collect();
    linear_fit(&xs, &ys).ok().map(|f| f.slope.exp())
}

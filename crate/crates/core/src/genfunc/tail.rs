//! Closed-form sum of the product factors beyond the index window.
//!
//! For k > K the nodes are u_k = k + a and −v_k = −k + b (offsets taken from
//! the sequence's [`TailModel`]). The paired log-factors expand as
//!
//!   log(1 − z/u) + log(1 + z/v) = −Σ_m z^m/m · (u^{−m} + (−1)^m v^{−m}),
//!
//! and the sums over k reduce to digamma (m = 1) and Hurwitz zeta (m ≥ 2)
//! values per residue class of k modulo the tail period.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::{factor, ScaledComplex, RENORM_EVERY};

use crate::nodes::TailModel;
use crate::special::{digamma, hurwitz_zeta_scaled};

const MAX_TERMS: usize = 160;
const MAX_RATIO: f64 = 0.6;
const MAX_LEVELS: usize = 48;

/// The tail product beyond the window, valid at every z.
///
/// Level j sums the series from K·2^j onwards; points too far out for level
/// 0 multiply the tail nodes up to K·2^j explicitly and use level j.
#[derive(Debug)]
pub(crate) struct TailSeries {
    model: TailModel,
    half_window: i64,
    levels: Vec<OnceLock<Level>>,
}

impl TailSeries {
    pub(crate) fn new(model: &TailModel, half_window: i64) -> Self {
        let levels = (0..MAX_LEVELS).map(|_| OnceLock::new()).collect();
        TailSeries {
            model: model.clone(),
            half_window: half_window.max(1),
            levels,
        }
    }

    fn level(&self, j: usize) -> &Level {
        self.levels[j].get_or_init(|| Level::new(&self.model, self.half_window << j))
    }

    /// A log of the tail product at z (imaginary part only defined mod 2π).
    pub(crate) fn log_tail(&self, z: Complex64) -> Option<Complex64> {
        let base = self.level(0);
        if let Some(w) = base.log_tail(z) {
            return Some(w);
        }
        let shift = self.model.max_abs_offset();
        let need = z.norm() / MAX_RATIO + shift;
        let j = (need / self.half_window as f64).log2().ceil().max(1.0) as usize;
        if j >= MAX_LEVELS {
            return None;
        }
        let series = self.level(j).log_tail(z)?;
        let mut acc = ScaledComplex::one();
        let mut count = 0;
        for k in (self.half_window + 1)..=(self.half_window << j) {
            let u = k as f64 + self.model.right_offset(k as u64);
            let v = -(k as f64) + self.model.left_offset(k as u64);
            acc.mantissa *= factor(z, Complex64::new(u, 0.0)) * factor(z, Complex64::new(v, 0.0));
            count += 2;
            if count >= RENORM_EVERY {
                acc.renormalize();
                count = 0;
            }
        }
        acc.renormalize();
        if acc.is_zero() {
            return None;
        }
        Some(series + Complex64::new(acc.ln_abs(), acc.mantissa.arg()))
    }
}

#[derive(Debug)]
struct Level {
    /// Reference radius R: the smallest |node| in the tail.
    radius: f64,
    /// D_m = R^m · Σ_k (u_k^{−m} + (−1)^m v_k^{−m}), m = 1..
    coeffs: Vec<f64>,
    /// max_{j ≥ m} |D_j|, to bound the remainder when some D_m vanish.
    bounds: Vec<f64>,
}

impl Level {
    fn new(model: &TailModel, half_window: i64) -> Self {
        let period = model.period as i64;
        let radius = (half_window + 1) as f64 - model.max_abs_offset();
        let pf = period as f64;
        let scale = radius / pf;
        let mut coeffs = vec![0.0; MAX_TERMS];
        for c in (half_window + 1)..=(half_window + period) {
            let a = model.right_offset(c as u64);
            let b = model.left_offset(c as u64);
            let xu = (c as f64 + a) / pf;
            let xv = (c as f64 - b) / pf;
            coeffs[0] += radius * (digamma(xv) - digamma(xu)) / pf;
            for (i, slot) in coeffs.iter_mut().enumerate().skip(1) {
                let m = i as u32 + 1;
                let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
                *slot +=
                    hurwitz_zeta_scaled(m, xu, scale) + sign * hurwitz_zeta_scaled(m, xv, scale);
            }
        }
        let mut bounds = coeffs.iter().map(|d| d.abs()).collect::<Vec<_>>();
        for i in (0..bounds.len().saturating_sub(1)).rev() {
            bounds[i] = bounds[i].max(bounds[i + 1]);
        }
        Level {
            radius,
            coeffs,
            bounds,
        }
    }

    /// Series value at z, or `None` outside the disc |z| ≤ 0.6 R.
    fn log_tail(&self, z: Complex64) -> Option<Complex64> {
        let w = z / self.radius;
        let wn = w.norm();
        if wn > MAX_RATIO {
            return None;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = w;
        for (i, d) in self.coeffs.iter().enumerate() {
            acc += pow * (d / (i as f64 + 1.0));
            pow *= w;
            // The remaining terms are bounded by a geometric series in |w|.
            let rest = pow.norm() * self.bounds.get(i + 1).copied().unwrap_or(0.0) / (1.0 - wn);
            if rest < 1e-17 * (1.0 + acc.norm()) {
                break;
            }
        }
        Some(-acc)
    }
}

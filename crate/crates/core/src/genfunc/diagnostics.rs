//! Measured counterparts of the asymptotic statements about S and F:
//! the power-law exponent of F, the comparability of F with interpolated
//! node derivatives, the lower bound on |S| off the nodes, and the growth
//! of the partial integrals of F^p.

use num_complex::Complex64;
use serde::Serialize;

use super::{ExponentP, GenFnEvaluator};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};

const WINDOW_SAMPLES: usize = 32;

/// Least-squares slope of log F̄ against log x on [x_min, x_max], F̄ being F
/// averaged over a unit window around each of `n_pts` log-spaced points.
pub fn fit_f_exponent(
    ev: &GenFnEvaluator,
    x_min: f64,
    x_max: f64,
    n_pts: usize,
) -> Result<LinearFit> {
    let kk = ev.sequence().half_window() as f64;
    if !(x_min >= 1.0 && x_min < x_max && x_max <= kk / 10.0) {
        return Err(Error::Precondition(format!(
            "fit range [{x_min}, {x_max}] must satisfy 1 <= x_min < x_max <= K/10 = {}",
            kk / 10.0
        )));
    }
    if n_pts < 2 {
        return Err(Error::DegenerateFit(
            "need at least two sample points".into(),
        ));
    }
    let ratio = (x_max / x_min).ln() / (n_pts - 1) as f64;
    let centres: Vec<f64> = (0..n_pts)
        .map(|i| x_min * (ratio * i as f64).exp())
        .collect();
    let xs: Vec<f64> = centres
        .iter()
        .flat_map(|c| {
            (0..WINDOW_SAMPLES).map(move |j| c - 0.5 + (j as f64 + 0.5) / WINDOW_SAMPLES as f64)
        })
        .collect();
    let f = ev.f_many(&xs);
    let log_avg: Vec<f64> = f
        .chunks(WINDOW_SAMPLES)
        .map(|w| (w.iter().sum::<f64>() / WINDOW_SAMPLES as f64).ln())
        .collect();
    let log_x: Vec<f64> = centres.iter().map(|c| c.ln()).collect();
    linear_fit(&log_x, &log_avg)
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Stats {
    pub min: f64,
    pub max: f64,
    /// max / min
    pub spread: f64,
    pub argmin: f64,
    pub argmax: f64,
}

/// ρ(x) = |S'(γ_j)|^α |S'(γ_{j+1})|^{1−α} / F(x) with
/// α = x_{j+1}/(x_j + x_{j+1}), x_j = x − Re γ_j, x_{j+1} = Re γ_{j+1} − x.
///
/// `gamma` holds positions into the evaluator's node slice, sorted by real
/// part.
pub fn check_lemma2(ev: &GenFnEvaluator, gamma: &[usize], x_grid: &[f64]) -> Result<Lemma2Stats> {
    let nodes = ev.sequence().nodes();
    let reals: Vec<f64> = gamma.iter().map(|&i| nodes[i].position.re).collect();
    if reals.len() < 2 || reals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "gamma must hold at least two nodes with increasing real parts".into(),
        ));
    }
    if x_grid.is_empty() {
        return Err(Error::Precondition("empty x grid".into()));
    }
    let mut brackets = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if x < reals[0] || x > reals[reals.len() - 1] {
            return Err(Error::Precondition(format!(
                "x = {x} outside the span [{}, {}] of gamma",
                reals[0],
                reals[reals.len() - 1]
            )));
        }
        let j = reals.partition_point(|&r| r <= x).clamp(1, reals.len() - 1) - 1;
        brackets.push(j);
    }
    let (first, last) = (
        brackets[0].min(*brackets.iter().min().unwrap()),
        *brackets.iter().max().unwrap() + 1,
    );
    let used = &gamma[first..=last];
    let derivs = ev.abs_derivatives(used);
    let f = ev.f_many(x_grid);
    let mut stats = Lemma2Stats {
        min: f64::INFINITY,
        max: 0.0,
        spread: 0.0,
        argmin: 0.0,
        argmax: 0.0,
    };
    for ((&x, &j), fx) in x_grid.iter().zip(&brackets).zip(f) {
        let xj = x - reals[j];
        let xj1 = reals[j + 1] - x;
        let alpha = xj1 / (xj + xj1);
        let (dj, dj1) = (derivs[j - first], derivs[j + 1 - first]);
        let rho = (alpha * dj.ln() + (1.0 - alpha) * dj1.ln() - fx.ln()).exp();
        if rho < stats.min {
            stats.min = rho;
            stats.argmin = x;
        }
        if rho > stats.max {
            stats.max = rho;
            stats.argmax = x;
        }
    }
    stats.spread = stats.max / stats.min;
    Ok(stats)
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma3Stats {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub threshold: f64,
    pub passes: bool,
}

/// The values |S(z)| (1+|z|)^{1/p} e^{−π|Im z|} over admissible samples
/// (dist(z, Λ) > eps (1 + |Im z|)); passes when the minimum exceeds
/// `threshold`.
pub fn check_lemma3(
    ev: &GenFnEvaluator,
    p: ExponentP,
    eps: f64,
    samples: &[Complex64],
    threshold: f64,
) -> Result<Lemma3Stats> {
    let mut values = Vec::with_capacity(samples.len());
    for &z in samples {
        let dist = ev.sequence().nearest(z).1;
        if dist <= eps * (1.0 + z.im.abs()) {
            return Err(Error::Precondition(format!(
                "sample {z} is within eps(1+|Im z|) = {} of the sequence",
                eps * (1.0 + z.im.abs())
            )));
        }
        let ln = ev.eval_s_scaled(z).ln_abs() + (1.0 + z.norm()).ln() / p.p()
            - std::f64::consts::PI * z.im.abs();
        values.push(ln.exp());
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    Ok(Lemma3Stats {
        values,
        min,
        max,
        threshold,
        passes: min > threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub x: f64,
    /// ∫_{−X}^{X} F^p
    pub integral: f64,
    /// ∫_{−X}^{X} F^p / (1 + |x|^p)
    pub weighted_integral: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// Relative increment of each column over the last step of the list.
    pub last_increment: f64,
    pub last_weighted_increment: f64,
    /// The first column still grows while the second has settled, as
    /// expected of a complete interpolating sequence.
    pub consistent_with_cis: bool,
}

/// Composite-midpoint partial integrals of F^p and F^p/(1+|x|^p) over
/// [−X, X] for each X in the ascending list.
pub fn growth_diagnostics(
    ev: &GenFnEvaluator,
    p: ExponentP,
    x_list: &[f64],
    quad_step: f64,
    stab_tol: f64,
) -> Result<GrowthTable> {
    if x_list.len() < 2 || x_list.windows(2).any(|w| w[0] >= w[1]) || x_list[0] <= 0.0 {
        return Err(Error::Precondition(
            "X list must be positive and strictly ascending".into(),
        ));
    }
    if quad_step <= 0.0 {
        return Err(Error::Precondition(
            "quadrature step must be positive".into(),
        ));
    }
    let x_max = *x_list.last().unwrap();
    let cells = (x_max / quad_step).ceil() as usize;
    let h = x_max / cells as f64;
    // midpoints on both sides, interleaved per distance from the origin
    let xs: Vec<f64> = (0..cells)
        .flat_map(|i| {
            let m = (i as f64 + 0.5) * h;
            [m, -m]
        })
        .collect();
    let f = ev.f_many(&xs);
    let pp = p.p();
    let mut rows = Vec::with_capacity(x_list.len());
    let (mut acc, mut acc_w) = (0.0, 0.0);
    let mut next = 0;
    for i in 0..cells {
        let outer = (i + 1) as f64 * h;
        for s in 0..2 {
            let x = xs[2 * i + s];
            let v = f[2 * i + s].powf(pp);
            acc += v * h;
            acc_w += v / (1.0 + x.abs().powf(pp)) * h;
        }
        while next < x_list.len() && x_list[next] <= outer + 1e-9 * h {
            rows.push(GrowthRow {
                x: x_list[next],
                integral: acc,
                weighted_integral: acc_w,
            });
            next += 1;
        }
    }
    let n = rows.len();
    let inc = |a: f64, b: f64| (b - a) / a;
    let last_increment = inc(rows[n - 2].integral, rows[n - 1].integral);
    let last_weighted_increment = inc(rows[n - 2].weighted_integral, rows[n - 1].weighted_integral);
    Ok(GrowthTable {
        rows,
        last_increment,
        last_weighted_increment,
        consistent_with_cis: last_increment > stab_tol && last_weighted_increment < stab_tol,
    })
}

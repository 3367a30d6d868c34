//! Discrete and continuous Muckenhoupt (A_p) quotients.
//!
//! Both are computed from prefix sums, so a sweep over every offset and
//! length costs one pass per length.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::genfunc::ExponentP;

use super::growth::{assess_chain, ChainAssessment, Thresholds};

/// A strictly positive, finite weight sequence w_j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSequence {
    values: Vec<f64>,
}

impl WeightSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((pos, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::BadWeight { pos, value });
        }
        Ok(WeightSequence { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        WeightSequence::new(self.values.iter().map(|w| w * c).collect())
    }
}

/// (mean of v) · (mean of v^{−1/(p−1)})^{p−1} from the two block sums.
#[inline]
fn quotient(sum_v: f64, sum_dual: f64, n: f64, p: ExponentP) -> f64 {
    (sum_v / n) * (sum_dual / n).powf(p.p() - 1.0)
}

struct PrefixSums {
    v: Vec<f64>,
    dual: Vec<f64>,
}

impl PrefixSums {
    fn new(values: &[f64], p: ExponentP) -> Self {
        let e = -1.0 / (p.p() - 1.0);
        let mut v = Vec::with_capacity(values.len() + 1);
        let mut dual = Vec::with_capacity(values.len() + 1);
        let (mut a, mut b) = (0.0, 0.0);
        v.push(0.0);
        dual.push(0.0);
        for &w in values {
            a += w;
            b += w.powf(e);
            v.push(a);
            dual.push(b);
        }
        PrefixSums { v, dual }
    }

    #[inline]
    fn quotient(&self, start: usize, end: usize, p: ExponentP) -> f64 {
        let n = (end - start) as f64;
        quotient(
            self.v[end] - self.v[start],
            self.dual[end] - self.dual[start],
            n,
            p,
        )
    }
}

/// Largest quotient among blocks of one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthMax {
    pub length: usize,
    pub max_quotient: f64,
    /// First position of the maximising block.
    pub offset: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteApReport {
    pub sup: f64,
    pub sup_offset: usize,
    pub sup_length: usize,
    /// Maxima at the dyadic lengths 2, 4, ..., the growth fit's data.
    pub dyadic: Vec<LengthMax>,
    /// Fit of the dyadic maxima against ln n.
    pub growth: LinearFit,
    /// Quotients of the blocks [c, c + n) and [c − n, c) at the dyadic
    /// lengths, c the middle position of the sequence.
    pub anchored_right: Vec<f64>,
    pub anchored_left: Vec<f64>,
}

impl DiscreteApReport {
    /// Growth assessments of the per-length maxima and the two anchored
    /// chains, over dyadic lengths n ≥ `min_length`.
    pub fn chains(&self, th: &Thresholds, min_length: usize) -> Result<Vec<ChainAssessment>> {
        let keep: Vec<usize> = (0..self.dyadic.len())
            .filter(|&i| self.dyadic[i].length >= min_length)
            .collect();
        let lengths: Vec<f64> = keep.iter().map(|&i| self.dyadic[i].length as f64).collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let maxima: Vec<f64> = self.dyadic.iter().map(|m| m.max_quotient).collect();
        Ok(vec![
            assess_chain("max", lengths.clone(), pick(&maxima), th)?,
            assess_chain(
                "anchored_right",
                lengths.clone(),
                pick(&self.anchored_right),
                th,
            )?,
            assess_chain("anchored_left", lengths, pick(&self.anchored_left), th)?,
        ])
    }
}

/// sup over offsets k and lengths n ≤ `n_max` of
/// (n^{−1} Σ w_j)(n^{−1} Σ w_j^{−1/(p−1)})^{p−1}.
///
/// Every length up to 64 is scanned, then lengths on a grid with ratio
/// 2^{1/8}; all offsets are scanned at each length.
pub fn discrete_ap(w: &WeightSequence, p: ExponentP, n_max: usize) -> Result<DiscreteApReport> {
    if n_max < 2 || w.len() < 2 * n_max {
        return Err(Error::Precondition(format!(
            "discrete (A_p) needs n_max >= 2 and a window of at least 2 n_max = {} weights, got {}",
            2 * n_max,
            w.len()
        )));
    }
    let sums = PrefixSums::new(w.values(), p);
    let best_at = |n: usize| -> LengthMax {
        let mut best = LengthMax {
            length: n,
            max_quotient: 0.0,
            offset: 0,
        };
        for k in 0..=(w.len() - n) {
            let q = sums.quotient(k, k + n, p);
            if q > best.max_quotient {
                best.max_quotient = q;
                best.offset = k;
            }
        }
        best
    };
    let mut lengths: Vec<usize> = (1..=n_max.min(64)).collect();
    let mut t = 64.0f64;
    loop {
        t *= 2f64.powf(0.125);
        let n = t.round() as usize;
        if n > n_max {
            break;
        }
        if n > *lengths.last().unwrap() {
            lengths.push(n);
        }
    }
    let mut dyadic_lengths = Vec::new();
    let mut n = 2;
    while n <= n_max {
        dyadic_lengths.push(n);
        n *= 2;
    }
    for &d in &dyadic_lengths {
        if let Err(pos) = lengths.binary_search(&d) {
            lengths.insert(pos, d);
        }
    }

    let mut sup = LengthMax {
        length: 1,
        max_quotient: 0.0,
        offset: 0,
    };
    let mut dyadic = Vec::new();
    for &n in &lengths {
        let best = best_at(n);
        if best.max_quotient > sup.max_quotient {
            sup = best;
        }
        if dyadic_lengths.contains(&n) {
            dyadic.push(best);
        }
    }
    let xs: Vec<f64> = dyadic.iter().map(|m| (m.length as f64).ln()).collect();
    let ys: Vec<f64> = dyadic.iter().map(|m| m.max_quotient).collect();
    let growth = linear_fit(&xs, &ys)?;
    let c = w.len() / 2;
    let anchored_right = dyadic
        .iter()
        .map(|m| sums.quotient(c, c + m.length, p))
        .collect();
    let anchored_left = dyadic
        .iter()
        .map(|m| sums.quotient(c - m.length, c, p))
        .collect();
    Ok(DiscreteApReport {
        sup: sup.max_quotient,
        sup_offset: sup.offset,
        sup_length: sup.length,
        dyadic,
        growth,
        anchored_right,
        anchored_left,
    })
}

/// Intervals of lengths 2^m, m_min ≤ m ≤ m_max, inside [−X_max, X_max],
/// with left ends spaced `stride`·2^m apart starting at −X_max. The two
/// intervals [0, 2^m] and [−2^m, 0] are always included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalFamily {
    pub x_max: f64,
    pub m_min: i32,
    pub m_max: i32,
    pub stride: f64,
}

impl IntervalFamily {
    pub fn new(x_max: f64, m_min: i32, m_max: i32) -> Result<Self> {
        IntervalFamily {
            x_max,
            m_min,
            m_max,
            stride: 0.5,
        }
        .validated()
    }

    pub fn with_stride(mut self, stride: f64) -> Result<Self> {
        self.stride = stride;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = self.x_max > 0.0
            && self.m_min <= self.m_max
            && 2f64.powi(self.m_max) <= self.x_max
            && self.stride > 0.0
            && self.stride <= 1.0;
        if ok {
            Ok(self)
        } else {
            Err(Error::Precondition(format!(
                "interval family needs m_min <= m_max, 2^m_max <= X_max and stride in (0, 1]: {self:?}"
            )))
        }
    }
}

/// Per-level summary of the continuous quotients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelMax {
    pub m: i32,
    pub length: f64,
    pub max_quotient: f64,
    pub interval: (f64, f64),
    /// Quotient on [0, L].
    pub origin_right: f64,
    /// Quotient on [−L, 0].
    pub origin_left: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuousApReport {
    pub sup: f64,
    pub sup_interval: (f64, f64),
    /// Quadrature step actually used (a power of two).
    pub step: f64,
    pub levels: Vec<LevelMax>,
    /// Fit of the per-level maxima against ln(length).
    pub growth: LinearFit,
}

impl ContinuousApReport {
    /// Growth assessments of the per-level maxima and the two
    /// origin-anchored chains, over levels m ≥ `m_from`.
    pub fn chains(&self, th: &Thresholds, m_from: i32) -> Result<Vec<ChainAssessment>> {
        let levels: Vec<&LevelMax> = self.levels.iter().filter(|l| l.m >= m_from).collect();
        let lengths: Vec<f64> = levels.iter().map(|l| l.length).collect();
        Ok(vec![
            assess_chain(
                "max",
                lengths.clone(),
                levels.iter().map(|l| l.max_quotient).collect(),
                th,
            )?,
            assess_chain(
                "origin_right",
                lengths.clone(),
                levels.iter().map(|l| l.origin_right).collect(),
                th,
            )?,
            assess_chain(
                "origin_left",
                lengths,
                levels.iter().map(|l| l.origin_left).collect(),
                th,
            )?,
        ])
    }
}

/// Composite-midpoint (A_p) quotients of the weight v on every interval of
/// `fam`. `sampler` maps a batch of points to the values of v there.
///
/// The step is `quad_step` rounded down to a power of two so that interval
/// ends fall on cell boundaries.
pub fn continuous_ap(
    sampler: impl Fn(&[f64]) -> Vec<f64>,
    p: ExponentP,
    fam: &IntervalFamily,
    quad_step: f64,
) -> Result<ContinuousApReport> {
    if !(quad_step > 0.0 && quad_step.is_finite()) {
        return Err(Error::Precondition(format!(
            "quadrature step {quad_step} must be positive"
        )));
    }
    let step = 2f64
        .powi(quad_step.log2().floor() as i32)
        .min(2f64.powi(fam.m_min));
    let half_cells = (fam.x_max / step).floor() as usize;
    let x0 = -(half_cells as f64) * step;
    let xs: Vec<f64> = (0..2 * half_cells)
        .map(|i| x0 + (i as f64 + 0.5) * step)
        .collect();
    let v = sampler(&xs);
    if v.len() != xs.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: v.len(),
        });
    }
    if let Some((i, bad)) = v
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.is_finite() && **s > 0.0))
    {
        return Err(Error::Precondition(format!(
            "weight sample {bad} at x = {} is not finite and positive",
            xs[i]
        )));
    }
    let sums = PrefixSums::new(&v, p);
    let total = xs.len();
    let origin = half_cells;

    let mut levels = Vec::new();
    for m in fam.m_min..=fam.m_max {
        let length = 2f64.powi(m);
        let n = (length / step).round() as usize;
        if n > total {
            break;
        }
        let stride = ((fam.stride * n as f64).round() as usize).max(1);
        let mut best = (0.0, 0);
        let mut start = 0;
        while start + n <= total {
            let q = sums.quotient(start, start + n, p);
            if q > best.0 {
                best = (q, start);
            }
            start += stride;
        }
        // n ≤ 2^m_max / step ≤ half_cells, so both anchored blocks fit.
        let origin_right = sums.quotient(origin, origin + n, p);
        let origin_left = sums.quotient(origin - n, origin, p);
        for (q, s) in [(origin_right, origin), (origin_left, origin - n)] {
            if q > best.0 {
                best = (q, s);
            }
        }
        let a = x0 + best.1 as f64 * step;
        levels.push(LevelMax {
            m,
            length,
            max_quotient: best.0,
            interval: (a, a + length),
            origin_right,
            origin_left,
        });
    }
    let sup_level = levels
        .iter()
        .max_by(|a, b| a.max_quotient.total_cmp(&b.max_quotient))
        .ok_or_else(|| Error::Precondition("interval family is empty".into()))?;
    let xs: Vec<f64> = levels.iter().map(|l| l.length.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.max_quotient).collect();
    let growth = if levels.len() >= 2 {
        linear_fit(&xs, &ys)?
    } else {
        LinearFit {
            slope: 0.0,
            intercept: ys[0],
            r2: 0.0,
        }
    };
    Ok(ContinuousApReport {
        sup: sup_level.max_quotient,
        sup_interval: sup_level.interval,
        step,
        levels: levels.clone(),
        growth,
    })
}

/// (A_p) quotients of v on the origin-anchored intervals [0, X] for each X
/// in `xs`, with composite-midpoint quadrature of the given step.
pub fn origin_quotients(
    sampler: impl Fn(&[f64]) -> Vec<f64>,
    p: ExponentP,
    xs: &[f64],
    quad_step: f64,
) -> Result<Vec<f64>> {
    let x_end = xs.iter().copied().fold(0.0, f64::max);
    if xs.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Precondition("interval ends must be positive".into()));
    }
    let n = (x_end / quad_step).ceil() as usize;
    let h = x_end / n as f64;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let v = sampler(&grid);
    if v.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: v.len(),
        });
    }
    let sums = PrefixSums::new(&v, p);
    Ok(xs
        .iter()
        .map(|&x| {
            let end = ((x / h).round() as usize).clamp(1, n);
            sums.quotient(0, end, p)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p2() -> ExponentP {
        ExponentP::new(2.0).unwrap()
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(matches!(
            WeightSequence::new(vec![1.0, 0.0]),
            Err(Error::BadWeight { pos: 1, .. })
        ));
        assert!(WeightSequence::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn constant_weights_have_unit_quotient() {
        for p in [1.5, 2.0, 3.0] {
            let w = WeightSequence::new(vec![2.5; 256]).unwrap();
            let r = discrete_ap(&w, ExponentP::new(p).unwrap(), 128).unwrap();
            assert!((r.sup - 1.0).abs() < 1e-12, "p = {p}: {}", r.sup);
            assert!(r.growth.slope.abs() < 1e-12);
        }
    }

    #[test]
    fn linear_weights_match_harmonic_sums() {
        // For w_j = j on j = 1..n the block starting at 1 is extremal:
        // ((n + 1)/2) · (H_n / n).
        let w = WeightSequence::new((1..=4096).map(|j| j as f64).collect()).unwrap();
        let r = discrete_ap(&w, p2(), 2048).unwrap();
        for m in &r.dyadic {
            let n = m.length as f64;
            let harmonic: f64 = (1..=m.length).map(|j| 1.0 / j as f64).sum();
            let want = (n + 1.0) / 2.0 * harmonic / n;
            assert_eq!(m.offset, 0);
            assert!((m.max_quotient - want).abs() < 1e-9 * want);
        }
        // Small n bend the fit below 1/2: (1 + 1/n) and γ both matter there.
        assert!((r.growth.slope - 0.5).abs() < 0.2 * 0.5, "{:?}", r.growth);
    }

    #[test]
    fn discrete_window_precondition() {
        let w = WeightSequence::new(vec![1.0; 10]).unwrap();
        assert!(discrete_ap(&w, p2(), 6).is_err());
    }

    fn power_weight(beta: f64) -> impl Fn(&[f64]) -> Vec<f64> {
        move |xs: &[f64]| xs.iter().map(|x| x.abs().powf(beta)).collect()
    }

    #[test]
    fn constant_weight_continuous() {
        let fam = IntervalFamily::new(64.0, 0, 6).unwrap();
        let r = continuous_ap(|xs: &[f64]| vec![3.0; xs.len()], p2(), &fam, 0.125).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_weight_is_scale_invariant() {
        // ∫_0^L x^{1/2} · ∫_0^L x^{−1/2} / L² = (2/3)·2 = 4/3 for every L.
        let fam = IntervalFamily::new(1024.0, 2, 10).unwrap();
        let r = continuous_ap(power_weight(0.5), p2(), &fam, 1.0 / 64.0).unwrap();
        for l in &r.levels {
            assert!((l.origin_right / (4.0 / 3.0) - 1.0).abs() < 0.02, "{l:?}");
        }
    }

    #[test]
    fn linear_weight_grows_logarithmically() {
        // With v = |x| the dual average (1/L)∫ dx/x is cut off by the first
        // cell: midpoint sums give (1/2)(ln(L/h) + ln 2 + γ + ...).
        let h = 1.0 / 16.0;
        let fam = IntervalFamily::new(4096.0, 2, 12).unwrap();
        let r = continuous_ap(power_weight(1.0), p2(), &fam, h).unwrap();
        for l in &r.levels {
            let n = (l.length / h) as usize;
            let dual: f64 =
                (0..n).map(|i| 1.0 / ((i as f64 + 0.5) * h)).sum::<f64>() * h / l.length;
            let want = 0.5 * l.length * dual;
            assert!((l.origin_left / want - 1.0).abs() < 1e-9, "{l:?} vs {want}");
        }
        assert!((r.growth.slope - 0.5).abs() < 0.05);
        assert!(r.growth.r2 > 0.99);
    }

    #[test]
    fn origin_quotients_match_closed_form() {
        let q = origin_quotients(power_weight(0.5), p2(), &[1.0, 10.0, 100.0], 1e-3).unwrap();
        for v in q {
            assert!((v / (4.0 / 3.0) - 1.0).abs() < 0.02);
        }
    }

    proptest! {
        #[test]
        fn discrete_quotient_is_scale_invariant(ws in prop::collection::vec(0.01f64..100.0, 16..64), c in 0.001f64..1000.0, p in 1.2f64..4.0) {
            let p = ExponentP::new(p).unwrap();
            let w = WeightSequence::new(ws).unwrap();
            let n_max = w.len() / 2;
            let a = discrete_ap(&w, p, n_max).unwrap();
            let b = discrete_ap(&w.scaled(c).unwrap(), p, n_max).unwrap();
            prop_assert!((a.sup - b.sup).abs() <= 1e-12 * a.sup);
        }

        #[test]
        fn continuous_quotient_is_at_least_one(amp in 0.0f64..0.95, freq in 0.1f64..5.0, p in 1.2f64..4.0) {
            let p = ExponentP::new(p).unwrap();
            let fam = IntervalFamily::new(32.0, -2, 5).unwrap();
            let v = move |xs: &[f64]| xs.iter().map(|x| 1.0 + amp * (freq * x).sin()).collect::<Vec<_>>();
            let r = continuous_ap(v, p, &fam, 1.0 / 32.0).unwrap();
            for l in &r.levels {
                prop_assert!(l.max_quotient >= 1.0 - 1e-12);
                prop_assert!(l.origin_right >= 1.0 - 1e-12);
                prop_assert!(l.origin_left >= 1.0 - 1e-12);
            }
        }
    }
}

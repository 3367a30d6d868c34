//! The discrete Hilbert operator (ℋa)_j = Σ_k a_k/(σ_j − γ_k) on weighted
//! sequence spaces, lower bounds for its norm, and a principal-value
//! quadrature for the continuous transform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{SubsequenceSelection, WeightSequence};
use crate::error::{Error, Result};
use crate::genfunc::ExponentP;

/// Sections up to this size keep the kernel matrix in memory.
const DENSE_LIMIT: usize = 2048;
const POWER_STEPS: usize = 40;

#[derive(Debug, Clone)]
pub struct DiscreteHilbertOperator {
    gamma: Vec<Complex64>,
    sigma: Vec<Complex64>,
    /// Row-major 1/(σ_j − γ_k), when small enough to store.
    kernel: Option<Vec<Complex64>>,
    /// Drop the j = k terms.
    off_diagonal: bool,
}

impl DiscreteHilbertOperator {
    pub fn new(gamma: Vec<Complex64>, sigma: Vec<Complex64>) -> Result<Self> {
        for (j, s) in sigma.iter().enumerate() {
            if let Some(k) = gamma.iter().position(|g| g == s) {
                return Err(Error::Precondition(format!(
                    "sigma_{j} coincides with gamma_{k}"
                )));
            }
        }
        let kernel = (gamma.len().max(sigma.len()) <= DENSE_LIMIT).then(|| {
            sigma
                .iter()
                .flat_map(|s| gamma.iter().map(move |g| 1.0 / (s - g)))
                .collect()
        });
        Ok(DiscreteHilbertOperator {
            gamma,
            sigma,
            kernel,
            off_diagonal: false,
        })
    }

    /// ℋ with the terms a_j/(σ_j − γ_j) removed. On ℓ^p_w the removed
    /// diagonal has norm max_j 1/|σ_j − γ_j|, so boundedness is unchanged,
    /// but growth of the rest is no longer masked by 1/ε.
    pub fn off_diagonal(mut self) -> Self {
        self.off_diagonal = true;
        self
    }

    #[inline]
    fn entry(&self, j: usize, k: usize) -> Complex64 {
        if self.off_diagonal && j == k {
            return Complex64::new(0.0, 0.0);
        }
        match &self.kernel {
            Some(kern) => kern[j * self.gamma.len() + k],
            None => 1.0 / (self.sigma[j] - self.gamma[k]),
        }
    }

    /// ℋ_{Γ,Σ} for a selection whose σ points are filled.
    pub fn from_selection(sel: &SubsequenceSelection) -> Result<Self> {
        if sel.sigma.len() != sel.gamma.len() {
            return Err(Error::Precondition(
                "the selection has no sigma points yet".into(),
            ));
        }
        Self::new(sel.gamma_positions(), sel.sigma.clone())
    }

    pub fn gamma(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.sigma
    }

    /// Square operator on positions `range` of both Γ and Σ.
    pub fn section(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.gamma.len() || range.end > self.sigma.len() {
            return Err(Error::Precondition(format!(
                "section {range:?} exceeds the operator"
            )));
        }
        let mut op = Self::new(
            self.gamma[range.clone()].to_vec(),
            self.sigma[range].to_vec(),
        )?;
        op.off_diagonal = self.off_diagonal;
        Ok(op)
    }

    pub fn apply(&self, a: &[Complex64]) -> Result<Vec<Complex64>> {
        if a.len() != self.gamma.len() {
            return Err(Error::LengthMismatch {
                expected: self.gamma.len(),
                got: a.len(),
            });
        }
        let n = self.gamma.len();
        let mut out: Vec<Complex64> = match &self.kernel {
            Some(kern) => kern
                .chunks_exact(n.max(1))
                .take(self.sigma.len())
                .map(|row| dot(row, a))
                .collect(),
            None => self
                .sigma
                .iter()
                .map(|s| self.gamma.iter().zip(a).map(|(g, ak)| ak / (s - g)).sum())
                .collect(),
        };
        if self.off_diagonal {
            for (j, o) in out.iter_mut().enumerate().take(n) {
                *o -= a[j] / (self.sigma[j] - self.gamma[j]);
            }
        }
        Ok(out)
    }

    /// ℋ* b, with (ℋ*b)_k = Σ_j b_j / conj(σ_j − γ_k).
    fn apply_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.gamma.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, bj) in b.iter().enumerate() {
            for (k, o) in out.iter_mut().enumerate() {
                *o += self.entry(j, k).conj() * bj;
            }
        }
        out
    }

    /// Column k of ℋ, i.e. ℋ e_k.
    fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.sigma.len()).map(|j| self.entry(j, k)).collect()
    }
}

fn dot(row: &[Complex64], a: &[Complex64]) -> Complex64 {
    row.iter().zip(a).map(|(x, y)| x * y).sum()
}

/// ‖a‖_{w,p} = (Σ |a_k|^p w_k)^{1/p}.
pub fn weighted_norm(a: &[Complex64], w: &[f64], p: ExponentP) -> f64 {
    let pp = p.p();
    a.iter()
        .zip(w)
        .map(|(x, wk)| x.norm().powf(pp) * wk)
        .sum::<f64>()
        .powf(1.0 / pp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Largest ‖ℋa‖_{w,p}/‖a‖_{w,p} found: a lower bound for the norm.
    pub norm: f64,
    /// Kind of the vector attaining it.
    pub best: String,
    /// Best quotient per kind of test vector.
    pub by_kind: Vec<(String, f64)>,
    pub vectors: usize,
}

/// Lower bound for the norm of ℋ on ℓ^p_w from unit vectors, block-constant
/// vectors, witness vectors w^{−1/(p−1)} on blocks, `trials` seeded random
/// vectors and, for p = 2, a power iteration.
///
/// The first `t` random vectors do not depend on `trials`, so the bound never
/// decreases as trials grow.
pub fn probe_norm(
    op: &DiscreteHilbertOperator,
    w: &WeightSequence,
    p: ExponentP,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let n = op.gamma.len();
    if w.len() != n || op.sigma.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if w.len() != n {
                w.len()
            } else {
                op.sigma.len()
            },
        });
    }
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let wv = w.values();
    let pp = p.p();
    let mut kinds: Vec<(String, f64)> = Vec::new();
    let mut vectors = 0usize;
    let mut record = |kind: &str, q: f64, count: usize| {
        vectors += count;
        match kinds.iter_mut().find(|(k, _)| k == kind) {
            Some(entry) => entry.1 = entry.1.max(q),
            None => kinds.push((kind.to_string(), q)),
        }
    };
    let ratio = |a: &[Complex64]| -> Result<f64> {
        let den = weighted_norm(a, wv, p);
        Ok(if den > 0.0 {
            weighted_norm(&op.apply(a)?, wv, p) / den
        } else {
            0.0
        })
    };

    let unit = (0..n)
        .map(|k| weighted_norm(&op.column(k), wv, p) / wv[k].powf(1.0 / pp))
        .fold(0.0, f64::max);
    record("unit", unit, n);

    let dual = -1.0 / (pp - 1.0);
    let mut block = 0.0f64;
    let mut witness = 0.0f64;
    let mut count = 0;
    let mut len = 2;
    while len <= n {
        // Start, centre and end placements of each dyadic block length.
        let mut starts = vec![0, (n - len) / 2, n - len];
        starts.dedup();
        for s in starts {
            let mut a = vec![Complex64::new(0.0, 0.0); n];
            for x in &mut a[s..s + len] {
                *x = Complex64::new(1.0, 0.0);
            }
            block = block.max(ratio(&a)?);
            for (k, x) in a[s..s + len].iter_mut().enumerate() {
                *x = Complex64::new(wv[s + k].powf(dual), 0.0);
            }
            witness = witness.max(ratio(&a)?);
            count += 2;
        }
        len *= 2;
    }
    record("block", block, count / 2);
    record("witness", witness, count / 2);

    if trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..trials {
            let a: Vec<Complex64> = (0..n)
                .map(|k| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        * wv[k].powf(-1.0 / pp)
                })
                .collect();
            best = best.max(ratio(&a)?);
        }
        record("random", best, trials);
    }

    if (pp - 2.0).abs() < 1e-12 {
        record("power", power_iteration(op, wv, seed)?, POWER_STEPS);
    }

    let (best, norm) =
        kinds.iter().cloned().fold(
            (String::new(), 0.0),
            |acc, (k, q)| if q > acc.1 { (k, q) } else { acc },
        );
    Ok(ProbeReport {
        norm,
        best,
        by_kind: kinds,
        vectors,
    })
}

/// Largest singular value of W^{1/2} ℋ W^{−1/2} by power iteration on B*B;
/// the returned value is ‖B b‖/‖b‖ for the final iterate.
fn power_iteration(op: &DiscreteHilbertOperator, w: &[f64], seed: u64) -> Result<f64> {
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut b: Vec<Complex64> = (0..w.len())
        .map(|_| Complex64::new(rng.gen_range(0.5..1.0), rng.gen_range(-0.1..0.1)))
        .collect();
    let mut best = 0.0f64;
    for _ in 0..POWER_STEPS {
        let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(nb > 0.0 && nb.is_finite()) {
            break;
        }
        b.iter_mut().for_each(|x| *x /= nb);
        let a: Vec<Complex64> = b.iter().zip(&sq).map(|(x, s)| x / s).collect();
        let mut y = op.apply(&a)?;
        y.iter_mut().zip(&sq).for_each(|(x, s)| *x *= s);
        best = best.max(y.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt());
        y.iter_mut().zip(&sq).for_each(|(x, s)| *x *= s);
        b = op.apply_adjoint(&y);
        b.iter_mut().zip(&sq).for_each(|(x, s)| *x /= s);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    /// ‖(ℋa)|_{I_2}‖_{w,p} / ‖a‖_{w,p}.
    pub quotient: f64,
    /// Σ_{I_1} w / Σ_{I_2} w.
    pub block_ratio: f64,
}

/// The block witness a_l = w_l^{−1/(p−1)} on I_1 = {k+1, …, k+n}, with
/// ℋa measured on I_2 = {k+2n+1, …, k+3n}. Positions index both Γ and Σ.
pub fn lemma1_witness(
    op: &DiscreteHilbertOperator,
    w: &WeightSequence,
    p: ExponentP,
    k: usize,
    n: usize,
) -> Result<WitnessReport> {
    let len = op.gamma.len().min(op.sigma.len()).min(w.len());
    if n == 0 || k + 3 * n >= len {
        return Err(Error::Precondition(format!(
            "witness blocks up to position {} need a window longer than {len}",
            k + 3 * n
        )));
    }
    let wv = w.values();
    let dual = -1.0 / (p.p() - 1.0);
    let i1 = k + 1..k + n + 1;
    let i2 = k + 2 * n + 1..k + 3 * n + 1;
    let mut a = vec![Complex64::new(0.0, 0.0); op.gamma.len()];
    for l in i1.clone() {
        a[l] = Complex64::new(wv[l].powf(dual), 0.0);
    }
    let ha = op.apply(&a)?;
    let num = weighted_norm(&ha[i2.clone()], &wv[i2.clone()], p);
    let den = weighted_norm(&a[i1.clone()], &wv[i1.clone()], p);
    let block_ratio = wv[i1].iter().sum::<f64>() / wv[i2].iter().sum::<f64>();
    Ok(WitnessReport {
        quotient: num / den,
        block_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CooccurrenceRow {
    pub name: String,
    /// Central section half-widths n; each section has 2n + 1 points.
    pub windows: Vec<usize>,
    pub probe: Vec<f64>,
    /// Discrete (A_p) supremum of w over the same sections, lengths ≤ n.
    pub ap: Vec<f64>,
    pub probe_stable: bool,
    pub ap_stable: bool,
}

impl CooccurrenceRow {
    pub fn concordant(&self) -> bool {
        self.probe_stable == self.ap_stable
    }
}

fn last_doubling_change(values: &[f64]) -> f64 {
    match values {
        [.., a, b] => (b - a).abs() / a.abs(),
        _ => f64::INFINITY,
    }
}

/// Operator probe and discrete (A_p) quotient over nested central sections
/// of `op` and `w`; each is stable when its last doubling changes it by less
/// than `stabilization` (relative).
#[allow(clippy::too_many_arguments)]
pub fn lemma1_row(
    name: impl Into<String>,
    op: &DiscreteHilbertOperator,
    w: &WeightSequence,
    p: ExponentP,
    windows: &[usize],
    trials: usize,
    seed: u64,
    stabilization: f64,
) -> Result<CooccurrenceRow> {
    let n = op.gamma.len();
    if w.len() != n || op.sigma.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: w.len(),
        });
    }
    let centre = n / 2;
    let (mut probe, mut ap) = (Vec::new(), Vec::new());
    for &m in windows {
        if m == 0 || m > centre || centre + m >= n {
            return Err(Error::Precondition(format!(
                "section half-width {m} does not fit in {n} points"
            )));
        }
        let range = centre - m..centre + m + 1;
        let ws = WeightSequence::new(w.values()[range.clone()].to_vec())?;
        probe.push(probe_norm(&op.section(range)?, &ws, p, trials, seed)?.norm);
        ap.push(crate::criteria::discrete_ap(&ws, p, m.max(2))?.sup);
    }
    Ok(CooccurrenceRow {
        name: name.into(),
        windows: windows.to_vec(),
        probe_stable: last_doubling_change(&probe) < stabilization,
        ap_stable: last_doubling_change(&ap) < stabilization,
        probe,
        ap,
    })
}

/// (1/(iπ)) PV ∫_a^b f(τ)/(t − τ) dτ by midpoint cells of width h centred
/// on t + ih, i ≠ 0. Cells are clipped to [a, b]; the cell around t itself
/// contributes nothing because the kernel is odd about t.
pub fn classical_hilbert_pv(
    f: impl Fn(f64) -> f64,
    support: (f64, f64),
    t: f64,
    h: f64,
) -> Result<Complex64> {
    let (a, b) = support;
    if !(h > 0.0 && a < b) {
        return Err(Error::Precondition(format!(
            "need h > 0 and a < b, got h = {h}, [{a}, {b}]"
        )));
    }
    if (t - a).abs() < h || (t - b).abs() < h {
        return Err(Error::Precondition(format!(
            "t = {t} lies within one step {h} of the support boundary"
        )));
    }
    let i_lo = ((a - t) / h - 0.5).floor() as i64;
    let i_hi = ((b - t) / h + 0.5).ceil() as i64;
    let mut acc = 0.0;
    for i in i_lo..=i_hi {
        if i == 0 {
            continue;
        }
        let lo = (t + (i as f64 - 0.5) * h).max(a);
        let hi = (t + (i as f64 + 0.5) * h).min(b);
        if hi <= lo {
            continue;
        }
        let m = 0.5 * (lo + hi);
        acc += f(m) * (hi - lo) / (t - m);
    }
    // 1/(iπ) = −i/π.
    Ok(Complex64::new(0.0, -acc / std::f64::consts::PI))
}

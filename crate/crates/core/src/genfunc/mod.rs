//! The generating function S(z) = lim ∏_{|λ_k|<R} (1 − z/λ_k), its node
//! derivatives S'(λ_k) and the weight F(x) = |S(x)| / dist(x, Λ).
//!
//! The product converges only conditionally, so factors are multiplied in
//! ± pairs. The part of the product beyond the index window is summed in
//! closed form from the sequence's tail model when one is attached;
//! otherwise the window is taken to be the whole sequence.

mod diagnostics;
mod fast;
mod local;
mod tail;

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nodes::NodeSequence;

pub use diagnostics::{
    check_lemma2, check_lemma3, fit_f_exponent, growth_diagnostics, GrowthRow, GrowthTable,
    Lemma2Stats, Lemma3Stats,
};
pub use local::LocalExpansion;
use tail::TailSeries;

/// Exponent p ∈ (1, ∞) with its conjugate q and p' = max(p, q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentP {
    p: f64,
    q: f64,
    p_prime: f64,
}

impl ExponentP {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let q = p / (p - 1.0);
        Ok(ExponentP {
            p,
            q,
            p_prime: p.max(q),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p_prime(&self) -> f64 {
        self.p_prime
    }

    /// 1 / (2p'): the perturbation bound of the Kadets-type theorem.
    pub fn critical_perturbation(&self) -> f64 {
        0.5 / self.p_prime
    }
}

/// A complex number stored as `mantissa · 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub fn one() -> Self {
        ScaledComplex {
            mantissa: Complex64::new(1.0, 0.0),
            exp2: 0,
        }
    }

    #[inline]
    fn renormalize(&mut self) {
        let m = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = exponent_of(m);
        self.mantissa *= pow2(-e);
        self.exp2 += e;
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// Multiplies by e^{w}.
    pub fn mul_exp(&mut self, w: Complex64) {
        let shift = (w.re / std::f64::consts::LN_2).floor();
        let rest = w.re - shift * std::f64::consts::LN_2;
        self.mantissa *= Complex64::from_polar(rest.exp(), w.im);
        self.exp2 += shift as i64;
        self.renormalize();
    }

    /// self / other as a plain value; 0 or ±inf outside the f64 range.
    pub fn ratio(&self, other: &ScaledComplex) -> Complex64 {
        let q = ScaledComplex {
            mantissa: self.mantissa / other.mantissa,
            exp2: self.exp2 - other.exp2,
        };
        q.to_complex().unwrap_or(Complex64::new(f64::INFINITY, 0.0))
    }

    /// The plain value, or `None` if it does not fit in an `f64`.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(self.mantissa);
        }
        if !self.mantissa.re.is_finite() || !self.mantissa.im.is_finite() || self.exp2 > 1000 {
            return None;
        }
        if self.exp2 < -1200 {
            return Some(Complex64::new(0.0, 0.0));
        }
        let half = self.exp2 / 2;
        Some(self.mantissa * pow2(half) * pow2(self.exp2 - half))
    }
}

#[inline]
fn exponent_of(m: f64) -> i64 {
    let bits = (m.to_bits() >> 52) & 0x7ff;
    if bits == 0 {
        m.log2().floor() as i64
    } else {
        bits as i64 - 1023
    }
}

#[inline]
fn pow2(e: i64) -> f64 {
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        2f64.powi(e as i32)
    }
}

/// One factor of the product: z for a node at the origin, 1 − z/λ otherwise.
#[inline]
pub(crate) fn factor(z: Complex64, lambda: Complex64) -> Complex64 {
    if lambda.im == 0.0 {
        if lambda.re == 0.0 {
            z
        } else {
            Complex64::new(1.0 - z.re / lambda.re, -z.im / lambda.re)
        }
    } else {
        Complex64::new(1.0, 0.0) - z / lambda
    }
}

const RENORM_EVERY: usize = 64;

/// How nodes are grouped before multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorGroup {
    /// Positions (into `NodeSequence::nodes`) of a node with positive real
    /// part and its partner.
    Pair(usize, usize),
    Single(usize),
}

/// Evaluator for S, S' and F over a fixed node window.
#[derive(Debug)]
pub struct GenFnEvaluator {
    seq: NodeSequence,
    pairing: Vec<FactorGroup>,
    tol_rel: f64,
    separation: f64,
    tail: Option<TailSeries>,
    derivatives: Vec<OnceLock<ScaledComplex>>,
    convergence_probe: f64,
}

/// Sequences up to this size get every S'(λ_k) computed at build time.
const EAGER_DERIVATIVES: usize = 4097;

impl GenFnEvaluator {
    pub fn build(seq: NodeSequence, tol_rel: f64) -> Result<Self> {
        if seq.len() >= 2 {
            let (a, b, d) = seq.closest_pair().expect("two or more nodes");
            if d == 0.0 {
                return Err(Error::CoincidentNodes(a, b));
            }
        }
        let separation = if seq.len() >= 2 {
            seq.separation()
        } else {
            1.0
        };
        let pairing = pairing_plan(&seq);
        let tail = seq.tail().map(|t| TailSeries::new(t, seq.half_window()));
        let derivatives = (0..seq.len()).map(|_| OnceLock::new()).collect();
        let mut ev = GenFnEvaluator {
            seq,
            pairing,
            tol_rel,
            separation,
            tail,
            derivatives,
            convergence_probe: 0.0,
        };
        ev.convergence_probe = ev.probe_convergence();
        if ev.seq.len() <= EAGER_DERIVATIVES {
            for i in 0..ev.seq.len() {
                let d = ev.derivative_scaled(i);
                if d.is_zero() || !d.mantissa.re.is_finite() || !d.mantissa.im.is_finite() {
                    return Err(Error::Precondition(format!(
                        "S'(lambda_{}) = {} is not a usable nonzero value",
                        ev.seq.nodes()[i].index,
                        d.mantissa
                    )));
                }
            }
        }
        Ok(ev)
    }

    pub fn sequence(&self) -> &NodeSequence {
        &self.seq
    }

    pub fn pairing(&self) -> &[FactorGroup] {
        &self.pairing
    }

    pub fn tol_rel(&self) -> f64 {
        self.tol_rel
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// Radius of the near-node switch used by F and reconstruction.
    pub fn switch_radius(&self) -> f64 {
        self.separation / 4.0
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// Largest relative change of the bare window product at eight probe
    /// points when the window is halved.
    pub fn convergence_probe(&self) -> f64 {
        self.convergence_probe
    }

    pub fn convergence_ok(&self) -> bool {
        self.convergence_probe <= self.tol_rel
    }

    fn probe_convergence(&self) -> f64 {
        let kk = self.seq.half_window();
        if kk < 2 {
            return f64::INFINITY;
        }
        let half = kk / 2;
        let mut worst: f64 = 0.0;
        for x in [-3.7, -2.2, -0.9, 0.3, 1.6, 2.9, 4.4, 5.8] {
            let z = Complex64::new(x, 0.5);
            let full = self.window_product(z, None, kk);
            let halved = self.window_product(z, None, half);
            let (Some(a), Some(b)) = (full.to_complex(), halved.to_complex()) else {
                return f64::INFINITY;
            };
            if a.norm() == 0.0 {
                continue;
            }
            worst = worst.max((a - b).norm() / a.norm());
        }
        worst
    }

    /// Product over the groups restricted to |index| ≤ `max_index`, optionally
    /// leaving out one node, without the tail.
    fn window_product(&self, z: Complex64, skip: Option<usize>, max_index: i64) -> ScaledComplex {
        let nodes = self.seq.nodes();
        let keep = |i: usize| Some(i) != skip && nodes[i].index.abs() <= max_index;
        let mut acc = ScaledComplex::one();
        let mut count = 0usize;
        for g in &self.pairing {
            match *g {
                FactorGroup::Pair(i, j) => {
                    let mut f = Complex64::new(1.0, 0.0);
                    if keep(i) {
                        f *= factor(z, nodes[i].position);
                    }
                    if keep(j) {
                        f *= factor(z, nodes[j].position);
                    }
                    acc.mantissa *= f;
                    count += 2;
                }
                FactorGroup::Single(i) => {
                    if keep(i) {
                        acc.mantissa *= factor(z, nodes[i].position);
                    }
                    count += 1;
                }
            }
            if count >= RENORM_EVERY {
                acc.renormalize();
                count = 0;
            }
        }
        acc.renormalize();
        acc
    }

    fn apply_tail(&self, z: Complex64, acc: &mut ScaledComplex) {
        if let Some(w) = self.tail.as_ref().and_then(|t| t.log_tail(z)) {
            acc.mul_exp(w);
        }
    }

    /// S(z) in scaled form.
    pub fn eval_s_scaled(&self, z: Complex64) -> ScaledComplex {
        let mut acc = self.window_product(z, None, i64::MAX);
        if !acc.is_zero() {
            self.apply_tail(z, &mut acc);
        }
        acc
    }

    pub fn eval_s(&self, z: Complex64) -> Result<Complex64> {
        self.eval_s_scaled(z)
            .to_complex()
            .ok_or(Error::Overflow { re: z.re, im: z.im })
    }

    /// S(z) / (z − λ_i) with the i-th factor cancelled analytically.
    pub fn cancelled_scaled(&self, z: Complex64, i: usize) -> ScaledComplex {
        let lambda = self.seq.nodes()[i].position;
        let mut acc = self.window_product(z, Some(i), i64::MAX);
        if lambda != Complex64::new(0.0, 0.0) {
            acc.mantissa *= -1.0 / lambda;
        }
        self.apply_tail(z, &mut acc);
        acc.renormalize();
        acc
    }

    pub fn cancelled(&self, z: Complex64, i: usize) -> Result<Complex64> {
        self.cancelled_scaled(z, i)
            .to_complex()
            .ok_or(Error::Overflow { re: z.re, im: z.im })
    }

    /// S'(λ_i), `i` a position in `sequence().nodes()`.
    /// Infinite if the value does not fit in an `f64`; see
    /// [`Self::derivative_scaled`].
    pub fn derivative(&self, i: usize) -> Complex64 {
        self.derivative_scaled(i)
            .to_complex()
            .unwrap_or(Complex64::new(f64::INFINITY, 0.0))
    }

    pub fn derivative_scaled(&self, i: usize) -> ScaledComplex {
        *self.derivatives[i].get_or_init(|| {
            let lambda = self.seq.nodes()[i].position;
            self.cancelled_scaled(lambda, i)
        })
    }

    pub fn derivative_at_index(&self, k: i64) -> Result<Complex64> {
        let i = self.seq.position_of(k).ok_or(Error::UnknownIndex(k))?;
        Ok(self.derivative(i))
    }

    /// |S'(λ_i)| for many nodes; real nodes go through the block evaluator.
    pub fn abs_derivatives(&self, positions: &[usize]) -> Vec<f64> {
        let nodes = self.seq.nodes();
        let queries: Vec<(f64, Option<usize>)> = positions
            .iter()
            .filter(|&&i| nodes[i].position.im == 0.0)
            .map(|&i| (nodes[i].position.re, Some(i)))
            .collect();
        let fast_vals = fast::reduced_ln_abs(self, &queries);
        let mut fast_iter = fast_vals.into_iter();
        positions
            .iter()
            .map(|&i| {
                if nodes[i].position.im == 0.0 {
                    fast_iter.next().expect("one value per real node").exp()
                } else {
                    self.derivative(i).norm()
                }
            })
            .collect()
    }

    /// F(x) = |S(x)| / dist(x, Λ), by direct product.
    pub fn eval_f(&self, x: f64) -> f64 {
        let z = Complex64::new(x, 0.0);
        let (i, dist) = self.seq.nearest(z);
        if self.seq.nodes()[i].position.im == 0.0 && dist < self.switch_radius() {
            self.cancelled_scaled(z, i).ln_abs().exp()
        } else {
            (self.eval_s_scaled(z).ln_abs() - dist.ln()).exp()
        }
    }

    /// F at many points via the block evaluator; agrees with [`Self::eval_f`].
    pub fn f_many(&self, xs: &[f64]) -> Vec<f64> {
        let tau = self.switch_radius();
        let mut queries = Vec::with_capacity(xs.len());
        let mut dists = Vec::with_capacity(xs.len());
        for &x in xs {
            let (i, dist) = self.seq.nearest(Complex64::new(x, 0.0));
            if self.seq.nodes()[i].position.im == 0.0 && dist < tau {
                queries.push((x, Some(i)));
                dists.push(None);
            } else {
                queries.push((x, None));
                dists.push(Some(dist));
            }
        }
        fast::reduced_ln_abs(self, &queries)
            .into_iter()
            .zip(dists)
            .map(|(ln, dist)| match dist {
                Some(d) => (ln - d.ln()).exp(),
                None => ln.exp(),
            })
            .collect()
    }

    /// S(x) at many real points. For a real sequence and x inside its real
    /// span, |S| comes from the block evaluator and the sign from the number
    /// of nodes strictly between 0 and x; otherwise S is evaluated directly.
    pub fn s_many_scaled(&self, xs: &[f64]) -> Vec<ScaledComplex> {
        if !self.seq.is_real() {
            return xs
                .iter()
                .map(|&x| self.eval_s_scaled(Complex64::new(x, 0.0)))
                .collect();
        }
        let nodes = self.seq.nodes();
        let reals: Vec<f64> = self
            .seq
            .by_real()
            .iter()
            .map(|&i| nodes[i].position.re)
            .collect();
        let (lo, hi) = self.seq.real_span();
        let inside: Vec<f64> = xs.iter().copied().filter(|&x| x > lo && x < hi).collect();
        let mut lns = self.ln_abs_s_many(&inside).into_iter();
        let has_zero = reals.binary_search_by(|r| r.total_cmp(&0.0)).is_ok();
        xs.iter()
            .map(|&x| {
                if !(x > lo && x < hi) {
                    return self.eval_s_scaled(Complex64::new(x, 0.0));
                }
                let ln = lns.next().expect("one value per inside point");
                let between = if x > 0.0 {
                    reals.partition_point(|&r| r < x) - reals.partition_point(|&r| r <= 0.0)
                } else if x < 0.0 {
                    reals.partition_point(|&r| r < 0.0) - reals.partition_point(|&r| r <= x)
                } else {
                    0
                };
                let mut negative = between % 2 == 1;
                if has_zero && x < 0.0 {
                    negative = !negative;
                }
                if ln == f64::NEG_INFINITY {
                    return ScaledComplex {
                        mantissa: Complex64::new(0.0, 0.0),
                        exp2: 0,
                    };
                }
                let mut v = ScaledComplex::one();
                if negative {
                    v.mantissa.re = -v.mantissa.re;
                }
                v.mul_exp(Complex64::new(ln, 0.0));
                v
            })
            .collect()
    }

    /// ln|S(x)| at many real points via the block evaluator.
    pub fn ln_abs_s_many(&self, xs: &[f64]) -> Vec<f64> {
        let queries: Vec<(f64, Option<usize>)> = xs.iter().map(|&x| (x, None)).collect();
        fast::reduced_ln_abs(self, &queries)
    }
}

/// Groups each node of positive real part with a partner of negative real
/// part and comparable modulus: k with −k when the index window is
/// symmetric, otherwise by rank in distance from the imaginary axis.
fn pairing_plan(seq: &NodeSequence) -> Vec<FactorGroup> {
    let nodes = seq.nodes();
    let symmetric = nodes
        .iter()
        .all(|n| n.index == 0 || seq.position_of(-n.index).is_some());
    let mut groups = Vec::with_capacity(nodes.len() / 2 + 1);
    if symmetric {
        for (i, n) in nodes.iter().enumerate() {
            if n.index == 0 {
                groups.push(FactorGroup::Single(i));
            } else if n.index > 0 {
                let j = seq.position_of(-n.index).expect("symmetric window");
                groups.push(FactorGroup::Pair(i, j));
            }
        }
        return groups;
    }
    let order = seq.by_real();
    let positives: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| nodes[i].position.re > 0.0)
        .collect();
    let negatives: Vec<usize> = order
        .iter()
        .rev()
        .copied()
        .filter(|&i| nodes[i].position.re < 0.0)
        .collect();
    for &i in order.iter().filter(|&&i| nodes[i].position.re == 0.0) {
        groups.push(FactorGroup::Single(i));
    }
    let paired = positives.len().min(negatives.len());
    for t in 0..paired {
        groups.push(FactorGroup::Pair(positives[t], negatives[t]));
    }
    for &i in positives[paired..].iter().chain(&negatives[paired..]) {
        groups.push(FactorGroup::Single(i));
    }
    groups
}

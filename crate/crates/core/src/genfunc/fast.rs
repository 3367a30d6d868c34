//! Block evaluation of ln|S(x)| on the real line.
//!
//! The axis is cut into blocks about 64 node spacings wide. Inside a block
//! the factors of nodes at least one block away (plus the closed-form tail)
//! form a function analytic on a neighbourhood of the block, which is
//! replaced by a Chebyshev interpolant. Only the nodes of the block and its
//! two neighbours are multiplied out per query point.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{factor, GenFnEvaluator, ScaledComplex, RENORM_EVERY};

const CHEB_POINTS: usize = 28;
const BLOCK_SPACINGS: f64 = 64.0;

/// For each `(x, skip)` returns ln|S(x)|, or ln|S(x) / (x − λ_skip)| with the
/// skipped factor cancelled.
pub(super) fn reduced_ln_abs(ev: &GenFnEvaluator, queries: &[(f64, Option<usize>)]) -> Vec<f64> {
    let seq = ev.sequence();
    let nodes = seq.nodes();
    let order = seq.by_real();
    let (lo, hi) = seq.real_span();
    let spacing = if nodes.len() > 1 {
        (hi - lo) / (nodes.len() - 1) as f64
    } else {
        1.0
    };
    let width = BLOCK_SPACINGS * spacing.max(1e-6);

    let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (qi, &(x, _)) in queries.iter().enumerate() {
        blocks
            .entry((x / width).floor() as i64)
            .or_default()
            .push(qi);
    }

    let reals: Vec<f64> = order.iter().map(|&i| nodes[i].position.re).collect();
    let mut out = vec![0.0; queries.len()];
    for (b, members) in blocks {
        let x0 = b as f64 * width;
        let x1 = x0 + width;
        if members.len() < CHEB_POINTS {
            for qi in members {
                let (x, skip) = queries[qi];
                out[qi] = direct(ev, x, skip);
            }
            continue;
        }
        let near_lo = reals.partition_point(|&r| r < x0 - width);
        let near_hi = reals.partition_point(|&r| r < x1 + width);
        let near = &order[near_lo..near_hi];
        let far = [&order[..near_lo], &order[near_hi..]];
        let cheb = Chebyshev::fit(x0, x1, |x| {
            let z = Complex64::new(x, 0.0);
            let mut acc = product(nodes, far[0].iter().chain(far[1]).copied(), z, None);
            if let Some(w) = ev.tail.as_ref().and_then(|t| t.log_tail(z)) {
                acc.mul_exp(w);
            }
            acc.ln_abs()
        });
        for qi in members {
            let (x, skip) = queries[qi];
            let z = Complex64::new(x, 0.0);
            let local = product(nodes, near.iter().copied(), z, skip);
            out[qi] = local.ln_abs() + cheb.eval(x) + cancel_correction(ev, skip);
        }
    }
    out
}

fn direct(ev: &GenFnEvaluator, x: f64, skip: Option<usize>) -> f64 {
    let z = Complex64::new(x, 0.0);
    match skip {
        Some(i) => ev.cancelled_scaled(z, i).ln_abs(),
        None => ev.eval_s_scaled(z).ln_abs(),
    }
}

/// ln|1/λ| for the cancelled factor (1 − x/λ) = (λ − x)/λ.
fn cancel_correction(ev: &GenFnEvaluator, skip: Option<usize>) -> f64 {
    match skip {
        Some(i) => {
            let lambda = ev.sequence().nodes()[i].position;
            if lambda.norm() == 0.0 {
                0.0
            } else {
                -lambda.norm().ln()
            }
        }
        None => 0.0,
    }
}

fn product(
    nodes: &[crate::nodes::Node],
    members: impl Iterator<Item = usize>,
    z: Complex64,
    skip: Option<usize>,
) -> ScaledComplex {
    let mut acc = ScaledComplex::one();
    let mut count = 0;
    for i in members {
        if Some(i) == skip {
            continue;
        }
        acc.mantissa *= factor(z, nodes[i].position);
        count += 1;
        if count == RENORM_EVERY {
            acc.renormalize();
            count = 0;
        }
    }
    acc.renormalize();
    acc
}

struct Chebyshev {
    mid: f64,
    half: f64,
    coeffs: [f64; CHEB_POINTS],
}

impl Chebyshev {
    fn fit(a: f64, b: f64, f: impl Fn(f64) -> f64) -> Self {
        let n = CHEB_POINTS;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut samples = [0.0; CHEB_POINTS];
        let angles: Vec<f64> = (0..n)
            .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64)
            .collect();
        for (s, th) in samples.iter_mut().zip(&angles) {
            *s = f(mid + half * th.cos());
        }
        let mut coeffs = [0.0; CHEB_POINTS];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let sum: f64 = samples
                .iter()
                .zip(&angles)
                .map(|(s, th)| s * (k as f64 * th).cos())
                .sum();
            *c = 2.0 * sum / n as f64;
        }
        coeffs[0] *= 0.5;
        Chebyshev { mid, half, coeffs }
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.mid) / self.half;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }
}

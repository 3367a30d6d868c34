//! The subsequence Γ ⊂ Λ with one node in each square Q_j = Q(4rj, r), and
//! companion points σ_j on the circles |z − γ_j| = ε where
//! |S(σ_j)| = ε|S'(γ_j)|.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfunc::{GenFnEvaluator, LocalExpansion};
use crate::nodes::NodeSequence;

/// Circle samples used to bracket the level crossing.
const CIRCLE_SAMPLES: usize = 64;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPick {
    /// Square number j.
    pub j: i64,
    /// Index k of the chosen node λ_k.
    pub index: i64,
    /// Position of the node in `NodeSequence::nodes`.
    pub pos: usize,
    pub position: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsequenceSelection {
    pub gamma: Vec<GammaPick>,
    /// σ_j, filled by [`select_sigma`]; empty before.
    pub sigma: Vec<Complex64>,
    pub r: f64,
    pub eps: f64,
}

impl SubsequenceSelection {
    pub fn gamma_positions(&self) -> Vec<Complex64> {
        self.gamma.iter().map(|g| g.position).collect()
    }
}

/// Closed square Q(x, r) = {z : |Re z − x| ≤ r, |Im z| ≤ r}.
fn in_square(z: Complex64, x: f64, r: f64) -> bool {
    (z.re - x).abs() <= r && z.im.abs() <= r
}

/// For each j with Q(4rj, r) inside the real span of the window, the node
/// of Q_j closest to its centre.
pub fn select_gamma(seq: &NodeSequence, r: f64) -> Result<SubsequenceSelection> {
    select_gamma_within(seq, r, i64::MAX)
}

/// As [`select_gamma`], restricted to |j| ≤ `j_max`.
pub fn select_gamma_within(seq: &NodeSequence, r: f64, j_max: i64) -> Result<SubsequenceSelection> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!(
            "square half-side r = {r} must be positive"
        )));
    }
    let nodes = seq.nodes();
    let order = seq.by_real();
    let reals: Vec<f64> = order.iter().map(|&i| nodes[i].position.re).collect();
    let (lo, hi) = seq.real_span();
    let spacing = 4.0 * r;
    let j_lo = ((lo + r) / spacing).ceil() as i64;
    let j_hi = ((hi - r) / spacing).floor() as i64;
    let (j_lo, j_hi) = (j_lo.max(-j_max), j_hi.min(j_max));
    if j_lo > j_hi {
        return Err(Error::Precondition(format!(
            "no square Q(4rj, {r}) fits in the window"
        )));
    }

    let pick = |j: i64| -> Result<GammaPick> {
        let x = spacing * j as f64;
        let from = reals.partition_point(|&t| t < x - r);
        let to = reals.partition_point(|&t| t <= x + r);
        order[from..to]
            .iter()
            .filter(|&&i| in_square(nodes[i].position, x, r))
            .min_by(|&&a, &&b| {
                let da = (nodes[a].position - x).norm();
                let db = (nodes[b].position - x).norm();
                da.total_cmp(&db).then(nodes[a].index.cmp(&nodes[b].index))
            })
            .map(|&i| GammaPick {
                j,
                index: nodes[i].index,
                pos: i,
                position: nodes[i].position,
            })
            .ok_or(Error::EmptySquare { j, center: x, r })
    };
    // Scan outwards from j = 0 so the reported empty square is the one
    // nearest the origin.
    let mut picks = Vec::with_capacity((j_hi - j_lo + 1) as usize);
    let mut order_j: Vec<i64> = (j_lo..=j_hi).collect();
    order_j.sort_by_key(|&j| (j.abs(), j < 0));
    for j in order_j {
        picks.push(pick(j)?);
    }
    picks.sort_by_key(|g| g.j);
    Ok(SubsequenceSelection {
        gamma: picks,
        sigma: Vec::new(),
        r,
        eps: 0.0,
    })
}

/// Default circle radius: min(requested, separation/10).
pub fn default_eps(ev: &GenFnEvaluator, requested: f64) -> f64 {
    requested.min(ev.separation() / 10.0)
}

/// Which level crossing on the circle becomes σ_j, counting angles from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SigmaBranch {
    First,
    Last,
}

/// Fills σ_j: on the circle |z − γ_j| = ε, a point where
/// |S(z)/(z − γ_j)| = |S'(γ_j)|, located by bisection in the angle between
/// two circle samples on either side of the level.
pub fn select_sigma(
    ev: &GenFnEvaluator,
    sel: &SubsequenceSelection,
    eps: f64,
) -> Result<SubsequenceSelection> {
    select_sigma_branch(ev, sel, eps, SigmaBranch::First)
}

pub fn select_sigma_branch(
    ev: &GenFnEvaluator,
    sel: &SubsequenceSelection,
    eps: f64,
    branch: SigmaBranch,
) -> Result<SubsequenceSelection> {
    if !(eps > 0.0 && eps < ev.separation() / 10.0 * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!(
            "circle radius eps = {eps} must lie in (0, separation/10 = {}]",
            ev.separation() / 10.0
        )));
    }
    let mut sigma = Vec::with_capacity(sel.gamma.len());
    for g in &sel.gamma {
        let local = LocalExpansion::new(ev, g.pos, eps);
        let target = local.ln_abs_cancelled(g.position);
        let level = |theta: f64| {
            local.ln_abs_cancelled(g.position + Complex64::from_polar(eps, theta)) - target
        };
        let thetas: Vec<f64> = (0..=CIRCLE_SAMPLES)
            .map(|t| std::f64::consts::TAU * t as f64 / CIRCLE_SAMPLES as f64)
            .collect();
        let values: Vec<f64> = thetas.iter().map(|&t| level(t)).collect();
        let crosses = |w: &[f64]| w[0] <= 0.0 && w[1] >= 0.0 || w[0] >= 0.0 && w[1] <= 0.0;
        let bracket = match branch {
            SigmaBranch::First => values.windows(2).position(crosses),
            SigmaBranch::Last => values.windows(2).rposition(crosses),
        };
        let Some(t) = bracket else {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::Bracketing {
                j: g.j,
                min: (min + target).exp(),
                max: (max + target).exp(),
                target: target.exp(),
            });
        };
        let (mut a, mut b) = (thetas[t], thetas[t + 1]);
        let fa = values[t];
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            let fm = level(m);
            if (fm <= 0.0) == (fa <= 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        sigma.push(g.position + Complex64::from_polar(eps, 0.5 * (a + b)));
    }
    Ok(SubsequenceSelection {
        gamma: sel.gamma.clone(),
        sigma,
        r: sel.r,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::{integer_lattice, make_family, FamilyKind, FamilySpec};

    #[test]
    fn lattice_picks_multiples_of_four() {
        let sel = select_gamma(&integer_lattice(100), 1.0).unwrap();
        assert_eq!(sel.gamma.len(), 49);
        for g in &sel.gamma {
            assert_eq!(g.index, 4 * g.j);
        }
    }

    #[test]
    fn lattice_small_squares_are_empty() {
        // r = 0.3: Q(2.4, 0.3) = [2.1, 2.7] × [−0.3, 0.3] holds no integer.
        match select_gamma(&integer_lattice(100), 0.3) {
            Err(Error::EmptySquare { j, .. }) => assert_eq!(j, 2),
            other => panic!("expected an empty square, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_squares_are_filled() {
        let seq = make_family(&FamilySpec::new(FamilyKind::Signed, 0.25), 400).unwrap();
        let sel = select_gamma(&seq, 1.0).unwrap();
        for g in &sel.gamma {
            assert!(in_square(g.position, 4.0 * g.j as f64, 1.0));
        }
    }

    #[test]
    fn lattice_sigma_solves_level_equation() {
        let ev = GenFnEvaluator::build(integer_lattice(100_000), 1e-2).unwrap();
        let sel = select_gamma_within(ev.sequence(), 1.0, 3).unwrap();
        let sel = select_sigma(&ev, &sel, 0.1).unwrap();
        for (g, s) in sel.gamma.iter().zip(&sel.sigma) {
            assert!(((s - g.position).norm() - 0.1).abs() < 1e-15);
            let want = 0.1 * ev.derivative(g.pos).norm();
            assert!((ev.eval_s(*s).unwrap().norm() - want).abs() < 1e-6);
        }
        // Closed form at γ = 0: |sin(πσ)/(πσ)| = 1.
        let s0 = sel.sigma[3];
        let pi = std::f64::consts::PI;
        let sinc = (s0 * pi).sin() / (s0 * pi);
        assert!((sinc.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn shifted_sigma_is_translated() {
        let d = 0.2;
        let a = GenFnEvaluator::build(integer_lattice(2000), 1e-2).unwrap();
        let b = GenFnEvaluator::build(
            make_family(&FamilySpec::new(FamilyKind::ConstantShift, d), 2000).unwrap(),
            1e-2,
        )
        .unwrap();
        let sa =
            select_sigma(&a, &select_gamma_within(a.sequence(), 1.0, 2).unwrap(), 0.1).unwrap();
        let sb =
            select_sigma(&b, &select_gamma_within(b.sequence(), 1.0, 2).unwrap(), 0.1).unwrap();
        for (x, y) in sa.sigma.iter().zip(&sb.sigma) {
            assert!((x + d - y).norm() < 1e-9, "{x} {y}");
        }
    }

    #[test]
    fn last_branch_is_another_solution() {
        let ev = GenFnEvaluator::build(
            make_family(&"signed:0.2".parse().unwrap(), 2000).unwrap(),
            1e-2,
        )
        .unwrap();
        let sel = select_gamma_within(ev.sequence(), 1.0, 4).unwrap();
        // λ_0 = 1 and λ_1 = 1.2 cap the radius at separation/10 = 0.02.
        let eps = default_eps(&ev, 0.05);
        let a = select_sigma(&ev, &sel, eps).unwrap();
        let b = select_sigma_branch(&ev, &sel, eps, SigmaBranch::Last).unwrap();
        for ((g, x), y) in sel.gamma.iter().zip(&a.sigma).zip(&b.sigma) {
            assert!((x - y).norm() > 1e-3);
            let want = eps * ev.derivative(g.pos).norm();
            assert!((ev.eval_s(*y).unwrap().norm() - want).abs() < 1e-8 * want.max(1.0));
        }
    }

    #[test]
    fn eps_must_respect_separation() {
        let ev = GenFnEvaluator::build(integer_lattice(50), 1e-2).unwrap();
        let sel = select_gamma(ev.sequence(), 1.0).unwrap();
        assert!(select_sigma(&ev, &sel, 0.2).is_err());
        assert_eq!(default_eps(&ev, 0.5), 0.1);
    }
}

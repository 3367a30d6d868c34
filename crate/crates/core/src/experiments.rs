//! Sweeps over families: the perturbation boundary 1/(2p'), the critical
//! counterexample in both orientations, exponent scaling under Λ → Λ_α,
//! the operator/weight co-occurrence matrix and reconstruction stability.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{
    assess_chain, default_eps, full_verdict_with, origin_quotients, select_gamma_within,
    select_sigma_branch, CheckConfig, SigmaBranch, Thresholds, Verdict, WeightSequence,
};
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::genfunc::{fit_f_exponent, ExponentP, GenFnEvaluator};
use crate::hilbert::{lemma1_row, CooccurrenceRow, DiscreteHilbertOperator};
use crate::interp::{stability_ratio, GridSpec, SampleSet};
use crate::nodes::{make_family, FamilyKind, FamilySpec};

/// Direction of δ_k = ±d·sign(k) relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Outward,
    Inward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Outward => "outward",
            Orientation::Inward => "inward",
        })
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outward" | "out" | "+" => Ok(Orientation::Outward),
            "inward" | "in" | "-" => Ok(Orientation::Inward),
            other => Err(Error::Parse(format!("unknown orientation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KadetsRow {
    pub family: String,
    pub d: f64,
    pub orientation: Orientation,
    pub verdict: Verdict,
    /// Verdict of the check itself, before the monotonicity rule.
    pub raw_verdict: Verdict,
    pub ap_sup: f64,
    pub growth_chain: String,
    pub growth_slope: f64,
    pub growth_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KadetsTable {
    pub p: f64,
    pub boundary: f64,
    pub rows: Vec<KadetsRow>,
}

/// Runs the full check for each family kind, orientation and magnitude.
/// Along increasing d a PASS after a FAIL is reported as INCONCLUSIVE.
pub fn kadets_sweep(
    p: ExponentP,
    kinds: &[FamilyKind],
    ds: &[f64],
    orientations: &[Orientation],
    cfg: &CheckConfig,
) -> Result<KadetsTable> {
    if let Some(d) = ds.iter().find(|&&d| !(d > 0.0 && d < 0.5)) {
        return Err(Error::Precondition(format!(
            "sweep magnitude d = {d} outside (0, 1/2)"
        )));
    }
    let mut sorted = ds.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut rows = Vec::new();
    for &kind in kinds {
        for &o in orientations {
            let mut reports = Vec::with_capacity(sorted.len());
            for &d in &sorted {
                let spec = FamilySpec::new(kind, o.sign() * d);
                let ev = GenFnEvaluator::build(make_family(&spec, cfg.half_window)?, cfg.tol_rel)?;
                reports.push((spec, d, full_verdict_with(&ev, p, cfg)?));
            }
            let raw: Vec<Verdict> = reports.iter().map(|(_, _, r)| r.verdict).collect();
            for ((spec, d, r), verdict) in reports.into_iter().zip(monotone_verdicts(&raw)) {
                rows.push(KadetsRow {
                    family: spec.to_string(),
                    d,
                    orientation: o,
                    verdict,
                    raw_verdict: r.verdict,
                    ap_sup: r.ap_sup,
                    growth_chain: r.growth_chain,
                    growth_slope: r.growth_slope,
                    growth_r2: r.growth_r2,
                });
            }
        }
    }
    Ok(KadetsTable {
        p: p.p(),
        boundary: p.critical_perturbation(),
        rows,
    })
}

/// Verdicts along increasing d, with every PASS that follows a FAIL
/// replaced by INCONCLUSIVE.
pub fn monotone_verdicts(raw: &[Verdict]) -> Vec<Verdict> {
    let mut failed = false;
    raw.iter()
        .map(|&v| {
            let out = if failed && v == Verdict::Pass {
                Verdict::Inconclusive
            } else {
                v
            };
            failed |= v == Verdict::Fail;
            out
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchoredSeries {
    /// "right" for [0, X], "left" for [−X, 0].
    pub side: &'static str,
    pub quotients: Vec<f64>,
    /// Quotient against (log(1 + X))^{p−1}.
    pub fit: LinearFit,
    /// Growth detector on the quotients against X.
    pub fires: bool,
    pub relative_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationReport {
    pub orientation: Orientation,
    pub family: String,
    /// Fitted exponent of F and the value −2δ it should match.
    pub f_exponent: f64,
    pub f_exponent_expected: f64,
    pub series: Vec<AnchoredSeries>,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub p: f64,
    pub d: f64,
    pub xs: Vec<f64>,
    pub orientations: Vec<OrientationReport>,
    /// Orientations in which some anchored quotient grows.
    pub growing: Vec<Orientation>,
}

/// The signed family at |δ| = `d` in both orientations: (A_p) quotients of
/// F^p on [0, X] and [−X, 0], each regressed on (log(1 + X))^{p−1}, with the
/// fitted F exponent as orientation label.
pub fn counterexample(
    p: ExponentP,
    d: f64,
    xs: &[f64],
    half_window: u32,
    quad_step: Option<f64>,
    th: &Thresholds,
) -> Result<CounterexampleReport> {
    if xs.len() < 3 || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "X values must be ascending, at least three".into(),
        ));
    }
    let x_end = *xs.last().expect("nonempty");
    if x_end > half_window as f64 / 2.0 {
        return Err(Error::Precondition(format!(
            "X = {x_end} exceeds half of the node window {half_window}"
        )));
    }
    let pp = p.p();
    let logs: Vec<f64> = xs.iter().map(|x| (1.0 + x).ln().powf(pp - 1.0)).collect();
    let mut orientations = Vec::new();
    for o in [Orientation::Outward, Orientation::Inward] {
        let spec = FamilySpec::new(FamilyKind::Signed, o.sign() * d);
        let ev = GenFnEvaluator::build(make_family(&spec, half_window)?, 1e-2)?;
        let step = quad_step.unwrap_or(ev.separation() / 8.0);
        let f_exp = fit_f_exponent(&ev, 32.0, (half_window as f64 / 10.0).min(4096.0), 24)?;
        let mut series = Vec::new();
        for (side, sgn) in [("right", 1.0), ("left", -1.0)] {
            let q = origin_quotients(
                |grid| {
                    let pts: Vec<f64> = grid.iter().map(|x| sgn * x).collect();
                    ev.f_many(&pts).into_iter().map(|f| f.powf(pp)).collect()
                },
                p,
                xs,
                step,
            )?;
            let fit = linear_fit(&logs, &q)?;
            let chain = assess_chain(side, xs.to_vec(), q.clone(), th)?;
            series.push(AnchoredSeries {
                side,
                quotients: q,
                fit,
                fires: chain.fires,
                relative_slope: chain.relative_slope,
            });
        }
        let grows = series.iter().any(|s| s.fires);
        orientations.push(OrientationReport {
            orientation: o,
            family: spec.to_string(),
            f_exponent: f_exp.slope,
            f_exponent_expected: -2.0 * o.sign() * d,
            series,
            grows,
        });
    }
    let growing = orientations
        .iter()
        .filter(|r| r.grows)
        .map(|r| r.orientation)
        .collect();
    Ok(CounterexampleReport {
        p: pp,
        d,
        xs: xs.to_vec(),
        orientations,
        growing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub alpha: f64,
    pub exponent: f64,
    /// alpha × the base exponent.
    pub expected: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaScaling {
    pub base: String,
    pub base_exponent: f64,
    pub rows: Vec<AlphaRow>,
}

/// Exponent of F for Λ_α = {k + αδ_k} against α times that of Λ.
pub fn alpha_scaling(
    base: &FamilySpec,
    alphas: &[f64],
    half_window: u32,
    fit_range: (f64, f64),
) -> Result<AlphaScaling> {
    let base_seq = make_family(base, half_window)?;
    let fit = |seq| -> Result<LinearFit> {
        let ev = GenFnEvaluator::build(seq, 1e-2)?;
        fit_f_exponent(&ev, fit_range.0, fit_range.1, 24)
    };
    let base_exponent = fit(base_seq.clone())?.slope;
    let mut rows = Vec::new();
    for &alpha in alphas {
        if alpha.abs() * base.d.abs() >= 0.5 {
            return Err(Error::Precondition(format!(
                "|alpha| d = {} must stay below 1/2",
                alpha.abs() * base.d.abs()
            )));
        }
        let f = fit(base_seq.scale_perturbation(alpha)?)?;
        rows.push(AlphaRow {
            alpha,
            exponent: f.slope,
            expected: alpha * base_exponent,
            r2: f.r2,
        });
    }
    Ok(AlphaScaling {
        base: base.to_string(),
        base_exponent,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Cell {
    pub row: CooccurrenceRow,
    /// Largest ratio, either way round, between probes built from the first
    /// and the last admissible σ on each circle.
    pub sigma_choice_ratio: f64,
}

/// Settings of the co-occurrence matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Config {
    pub half_window: u32,
    /// Central section half-widths.
    pub windows: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub stabilization: f64,
    /// Rate r of the exponential weight e^{rj}.
    pub exp_rate: f64,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Lemma1Config {
            half_window: 1 << 12,
            windows: vec![16, 32, 64, 128, 256, 512],
            trials: 4,
            seed: 0,
            stabilization: 0.05,
            exp_rate: 0.25,
        }
    }
}

struct SelectedOperators {
    first: DiscreteHilbertOperator,
    last: DiscreteHilbertOperator,
    /// |S'(γ_j)| along the selection.
    abs_derivatives: Vec<f64>,
}

/// ℋ_{Γ,Σ} on the squares |j| ≤ j_max, with σ taken first and last on
/// each circle.
fn selected_operators(ev: &GenFnEvaluator, j_max: i64) -> Result<SelectedOperators> {
    let sel = select_gamma_within(ev.sequence(), 1.0, j_max)?;
    if sel.gamma.len() != 2 * j_max as usize + 1 {
        return Err(Error::Precondition(format!(
            "node window K = {} too small for {j_max} squares",
            ev.sequence().half_window()
        )));
    }
    let eps = default_eps(ev, 0.1);
    let first = select_sigma_branch(ev, &sel, eps, SigmaBranch::First)?;
    let last = select_sigma_branch(ev, &sel, eps, SigmaBranch::Last)?;
    let pos: Vec<usize> = sel.gamma.iter().map(|g| g.pos).collect();
    Ok(SelectedOperators {
        first: DiscreteHilbertOperator::from_selection(&first)?,
        last: DiscreteHilbertOperator::from_selection(&last)?,
        abs_derivatives: ev.abs_derivatives(&pos),
    })
}

fn cooccurrence_cell(
    name: String,
    ops: &SelectedOperators,
    w: Vec<f64>,
    p: ExponentP,
    cfg: &Lemma1Config,
) -> Result<Lemma1Cell> {
    let w = WeightSequence::new(w)?;
    let row = lemma1_row(
        name.clone(),
        &ops.first,
        &w,
        p,
        &cfg.windows,
        cfg.trials,
        cfg.seed,
        cfg.stabilization,
    )?;
    let other = lemma1_row(
        name,
        &ops.last,
        &w,
        p,
        &cfg.windows,
        cfg.trials,
        cfg.seed,
        cfg.stabilization,
    )?;
    let sigma_choice_ratio = row
        .probe
        .iter()
        .zip(&other.probe)
        .map(|(x, y)| (x / y).max(y / x))
        .fold(1.0, f64::max);
    Ok(Lemma1Cell {
        row,
        sigma_choice_ratio,
    })
}

fn max_window(cfg: &Lemma1Config) -> Result<i64> {
    cfg.windows
        .iter()
        .max()
        .map(|&n| n as i64)
        .ok_or_else(|| Error::Precondition("no windows".into()))
}

/// The co-occurrence cell of one sequence: ℋ_{Γ,Σ} against w_j = |S'(γ_j)|^p.
pub fn operator_probe(ev: &GenFnEvaluator, p: ExponentP, cfg: &Lemma1Config) -> Result<Lemma1Cell> {
    let ops = selected_operators(ev, max_window(cfg)?)?;
    let w = ops.abs_derivatives.iter().map(|x| x.powf(p.p())).collect();
    cooccurrence_cell(
        format!("|S'(gamma_j)|^p, {}", ev.sequence().family_tag()),
        &ops,
        w,
        p,
        cfg,
    )
}

/// Operators ℋ_{Γ,Σ} and weights for w ≡ 1, w_j = |S'(γ_j)|^p for the signed
/// family at each of `ds` (0 meaning the lattice), and w_j = e^{rj}.
pub fn lemma1_matrix(p: ExponentP, ds: &[f64], cfg: &Lemma1Config) -> Result<Vec<Lemma1Cell>> {
    let j_max = max_window(cfg)?;
    let evaluator = |d: f64| -> Result<GenFnEvaluator> {
        let spec = if d == 0.0 {
            FamilySpec::integer()
        } else {
            FamilySpec::new(FamilyKind::Signed, d)
        };
        GenFnEvaluator::build(make_family(&spec, cfg.half_window)?, 1e-2)
    };
    let lattice = selected_operators(&evaluator(0.0)?, j_max)?;
    let n = lattice.first.gamma().len();
    let mut cells = vec![cooccurrence_cell(
        "w = 1".into(),
        &lattice,
        vec![1.0; n],
        p,
        cfg,
    )?];
    for &d in ds {
        let ops = selected_operators(&evaluator(d)?, j_max)?;
        let w = ops.abs_derivatives.iter().map(|x| x.powf(p.p())).collect();
        cells.push(cooccurrence_cell(
            format!("|S'(gamma_j)|^p, signed d = {d}"),
            &ops,
            w,
            p,
            cfg,
        )?);
    }
    let centre = (n / 2) as f64;
    let exp_w = (0..n)
        .map(|j| (cfg.exp_rate * (j as f64 - centre)).exp())
        .collect();
    cells.push(cooccurrence_cell(
        format!("w_j = exp({} j)", cfg.exp_rate),
        &lattice,
        exp_w,
        p,
        cfg,
    )?);
    Ok(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySweep {
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

/// stability_ratio over `vectors` seeded random data vectors with entries
/// of modulus one on the nodes |k| ≤ `support`.
pub fn stability_sweep(
    ev: &GenFnEvaluator,
    p: ExponentP,
    vectors: usize,
    support: i64,
    grid: &GridSpec,
    seed: u64,
) -> Result<StabilitySweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(vectors);
    for _ in 0..vectors {
        let entries = (-support..=support)
            .map(|k| {
                (
                    k,
                    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
                )
            })
            .collect();
        ratios.push(stability_ratio(ev, &SampleSet::new(entries)?, p, grid)?.ratio);
    }
    Ok(StabilitySweep {
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn verdict() -> impl Strategy<Value = Verdict> {
        prop_oneof![
            Just(Verdict::Pass),
            Just(Verdict::Fail),
            Just(Verdict::Inconclusive)
        ]
    }

    proptest! {
        #[test]
        fn no_pass_after_fail(raw in prop::collection::vec(verdict(), 0..12)) {
            let out = monotone_verdicts(&raw);
            prop_assert_eq!(out.len(), raw.len());
            if let Some(first_fail) = out.iter().position(|&v| v == Verdict::Fail) {
                prop_assert!(out[first_fail..].iter().all(|&v| v != Verdict::Pass));
            }
            for (a, b) in raw.iter().zip(&out) {
                prop_assert!(a == b || (*a == Verdict::Pass && *b == Verdict::Inconclusive));
            }
        }
    }

    #[test]
    fn pass_after_fail_is_inconclusive() {
        use Verdict::*;
        assert_eq!(
            monotone_verdicts(&[Pass, Fail, Pass, Fail]),
            vec![Pass, Fail, Inconclusive, Fail]
        );
    }

    #[test]
    fn sweep_validates_magnitudes() {
        let p = ExponentP::new(2.0).unwrap();
        let cfg = CheckConfig::default();
        assert!(kadets_sweep(
            p,
            &[FamilyKind::Signed],
            &[0.6],
            &[Orientation::Outward],
            &cfg
        )
        .is_err());
        assert!(kadets_sweep(
            p,
            &[FamilyKind::Signed],
            &[0.0],
            &[Orientation::Outward],
            &cfg
        )
        .is_err());
    }

    #[test]
    fn monotone_sweep_on_small_window() {
        let p = ExponentP::new(2.0).unwrap();
        let cfg = CheckConfig {
            half_window: 1 << 12,
            x_max: 1024.0,
            ..CheckConfig::default()
        };
        let t = kadets_sweep(
            p,
            &[FamilyKind::Signed],
            &[0.4, 0.1],
            &[Orientation::Outward],
            &cfg,
        )
        .unwrap();
        assert_eq!(t.boundary, 0.25);
        let ds: Vec<f64> = t.rows.iter().map(|r| r.d).collect();
        assert_eq!(ds, vec![0.1, 0.4]);
        assert_eq!(t.rows[0].verdict, Verdict::Pass);
        assert_eq!(t.rows[1].verdict, Verdict::Fail);
    }

    #[test]
    fn alpha_zero_is_the_lattice() {
        let base = FamilySpec::new(FamilyKind::Signed, 0.2);
        let a = alpha_scaling(&base, &[0.0, 1.0], 20_000, (32.0, 2000.0)).unwrap();
        assert!(a.rows[0].exponent.abs() <= 0.05, "{a:?}");
        assert_eq!(a.rows[1].exponent, a.base_exponent);
        assert!(alpha_scaling(&base, &[3.0], 2000, (32.0, 200.0)).is_err());
    }

    #[test]
    fn counterexample_rejects_bad_x() {
        let p = ExponentP::new(2.0).unwrap();
        let th = Thresholds::default();
        assert!(counterexample(p, 0.25, &[64.0, 32.0, 128.0], 4096, None, &th).is_err());
        assert!(counterexample(p, 0.25, &[64.0, 128.0, 4096.0], 4096, None, &th).is_err());
    }
}

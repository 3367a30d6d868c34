//! The combined check: separation, Carleson sum, density, convergence of
//! the product and the (A_p) condition for F^p, fused into one verdict.

use std::fmt;

use serde::Serialize;

use super::ap::{continuous_ap, IntervalFamily, LevelMax};
use super::carleson::carleson_sum;
use super::growth::{ChainAssessment, Thresholds};
use crate::error::{Error, Result};
use crate::genfunc::{ExponentP, GenFnEvaluator};
use crate::nodes::NodeSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit code for the verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Every tunable of a check, with the defaults used by the command-line
/// tool.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckConfig {
    /// Node window |k| ≤ K for generated families.
    pub half_window: u32,
    /// (A_p) intervals live in [−X_max, X_max].
    pub x_max: f64,
    /// Shortest interval length 2^m_min.
    pub m_min: i32,
    /// Growth trends are fitted over lengths 2^fit_m_min ... X_max.
    pub fit_m_min: i32,
    /// Quadrature step; `None` means separation/8.
    pub quad_step: Option<f64>,
    /// Relative tolerance of the product convergence probe.
    pub tol_rel: f64,
    pub thresholds: Thresholds,
    /// Square half-sides tried, in order, for the relative density.
    pub density_candidates: Vec<f64>,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            half_window: 1 << 15,
            x_max: 8192.0,
            m_min: 0,
            fit_m_min: 5,
            quad_step: None,
            tol_rel: 1e-2,
            thresholds: Thresholds::default(),
            density_candidates: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCriterion {
    pub name: &'static str,
    pub status: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApRow {
    pub a: f64,
    pub b: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub family: String,
    pub p: f64,
    pub half_window: i64,
    pub separation: f64,
    pub carleson_sup: f64,
    pub carleson_argmax: i64,
    /// Carleson sup over the half-size window, for the doubling check.
    pub carleson_sup_half_window: f64,
    pub carleson_tail_bound: f64,
    pub density_r0: Option<f64>,
    pub convergence_probe: f64,
    pub quad_step: f64,
    /// The maximising interval of each length, and the two
    /// origin-anchored intervals.
    pub ap_quotients: Vec<ApRow>,
    pub ap_levels: Vec<LevelMax>,
    pub ap_sup: f64,
    pub ap_sup_interval: (f64, f64),
    /// Fit of the chain with the steepest relative growth.
    pub growth_chain: String,
    pub growth_slope: f64,
    pub growth_r2: f64,
    pub ap_chains: Vec<ChainAssessment>,
    pub criteria: Vec<SubCriterion>,
    /// Names of the sub-criteria that failed outright.
    pub failing: Vec<&'static str>,
    pub verdict: Verdict,
}

/// Builds the evaluator for `seq` and runs [`full_verdict_with`].
pub fn full_verdict(seq: NodeSequence, p: ExponentP, cfg: &CheckConfig) -> Result<CriteriaReport> {
    let ev = GenFnEvaluator::build(seq, cfg.tol_rel)?;
    full_verdict_with(&ev, p, cfg)
}

pub fn full_verdict_with(
    ev: &GenFnEvaluator,
    p: ExponentP,
    cfg: &CheckConfig,
) -> Result<CriteriaReport> {
    let seq = ev.sequence();
    let th = &cfg.thresholds;
    let mut criteria = Vec::new();

    let separation = ev.separation();
    criteria.push(SubCriterion {
        name: "separation",
        status: if separation > 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail: format!("minimum distance {separation:.6}"),
    });

    let carleson = carleson_sum(seq)?;
    let half = seq.subwindow(seq.half_window() / 2)?;
    let carleson_half = carleson_sum(&half)?;
    let change = (carleson.sup - carleson_half.sup).abs() / carleson_half.sup;
    let carleson_ok = carleson.sup.is_finite() && change < th.stabilization;
    criteria.push(SubCriterion {
        name: "carleson",
        status: if carleson_ok {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        },
        detail: format!(
            "sup {:.6} at k = {}, half window {:.6} (change {:.2e}), tail bound {:.2e}",
            carleson.sup, carleson.argmax, carleson_half.sup, change, carleson.tail_bound
        ),
    });

    let density_r0 = seq.relative_density(&cfg.density_candidates);
    criteria.push(SubCriterion {
        name: "density",
        status: if density_r0.is_some() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail: match density_r0 {
            Some(r) => format!("every square Q(x, {r}) meets the sequence"),
            None => format!(
                "some square misses the sequence for every r in {:?}",
                cfg.density_candidates
            ),
        },
    });

    let probe = ev.convergence_probe();
    criteria.push(SubCriterion {
        name: "convergence",
        status: if probe <= cfg.tol_rel {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        },
        detail: format!(
            "window-halving change {probe:.3e} against tolerance {:.1e}",
            cfg.tol_rel
        ),
    });

    let quad_step = match cfg.quad_step {
        Some(h) if h > separation / 8.0 => {
            return Err(Error::Precondition(format!(
                "quadrature step {h} exceeds separation/8 = {}",
                separation / 8.0
            )))
        }
        Some(h) => h,
        None => separation / 8.0,
    };
    let (lo, hi) = seq.real_span();
    if cfg.x_max > (-lo).min(hi) {
        return Err(Error::Precondition(format!(
            "X_max = {} reaches beyond the node window [{lo}, {hi}]",
            cfg.x_max
        )));
    }
    let m_max = cfg.x_max.log2().floor() as i32;
    let fam = IntervalFamily::new(cfg.x_max, cfg.m_min, m_max)?;
    let pp = p.p();
    let ap = continuous_ap(
        |xs| ev.f_many(xs).into_iter().map(|f| f.powf(pp)).collect(),
        p,
        &fam,
        quad_step,
    )?;
    let chains = ap.chains(th, cfg.fit_m_min)?;
    let steepest = chains
        .iter()
        .max_by(|a, b| a.relative_slope.total_cmp(&b.relative_slope))
        .expect("three chains");
    let ap_status = if chains.iter().any(|c| c.fires) {
        Verdict::Fail
    } else if chains.iter().all(|c| c.stable) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    criteria.push(SubCriterion {
        name: "ap",
        status: ap_status,
        detail: chains
            .iter()
            .map(|c| {
                let ratio = c.increment_ratio.map_or("n/a".to_string(), |r| format!("{r:.3}"));
                format!(
                    "{}: slope/mean {:.4} (r2 {:.3}), increment ratio {ratio}, last doubling {:+.2}%",
                    c.name,
                    c.relative_slope,
                    c.fit.r2,
                    100.0 * c.last_change
                )
            })
            .collect::<Vec<_>>()
            .join("; "),
    });

    let mut ap_quotients = Vec::new();
    for l in &ap.levels {
        ap_quotients.push(ApRow {
            a: l.interval.0,
            b: l.interval.1,
            quotient: l.max_quotient,
        });
        ap_quotients.push(ApRow {
            a: 0.0,
            b: l.length,
            quotient: l.origin_right,
        });
        ap_quotients.push(ApRow {
            a: -l.length,
            b: 0.0,
            quotient: l.origin_left,
        });
    }
    let failing: Vec<&'static str> = criteria
        .iter()
        .filter(|c| c.status == Verdict::Fail)
        .map(|c| c.name)
        .collect();
    let verdict = if !failing.is_empty() {
        Verdict::Fail
    } else if criteria.iter().all(|c| c.status == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(CriteriaReport {
        family: seq.family_tag().to_string(),
        p: pp,
        half_window: seq.half_window(),
        separation,
        carleson_sup: carleson.sup,
        carleson_argmax: carleson.argmax,
        carleson_sup_half_window: carleson_half.sup,
        carleson_tail_bound: carleson.tail_bound,
        density_r0,
        convergence_probe: probe,
        quad_step: ap.step,
        ap_quotients,
        ap_levels: ap.levels.clone(),
        ap_sup: ap.sup,
        ap_sup_interval: ap.sup_interval,
        growth_chain: steepest.name.clone(),
        growth_slope: steepest.fit.slope,
        growth_r2: steepest.fit.r2,
        ap_chains: chains.clone(),
        criteria,
        failing,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::{integer_lattice, make_family};

    fn small() -> CheckConfig {
        CheckConfig {
            half_window: 1 << 12,
            x_max: 1024.0,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn lattice_passes() {
        let cfg = small();
        let r = full_verdict(
            integer_lattice(cfg.half_window),
            ExponentP::new(2.0).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:#?}", r.criteria);
        assert!(r.failing.is_empty());
    }

    #[test]
    fn supercritical_signed_family_fails() {
        let cfg = small();
        let seq = make_family(&"signed:0.4".parse().unwrap(), cfg.half_window).unwrap();
        let r = full_verdict(seq, ExponentP::new(2.0).unwrap(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Fail, "{:#?}", r.criteria);
        assert_eq!(r.failing, vec!["ap"]);
    }

    #[test]
    fn window_must_cover_intervals() {
        let cfg = CheckConfig {
            x_max: 4096.0,
            ..small()
        };
        let seq = integer_lattice(2048);
        assert!(full_verdict(seq, ExponentP::new(2.0).unwrap(), &cfg).is_err());
    }

    #[test]
    fn coarse_quadrature_is_rejected() {
        let cfg = CheckConfig {
            quad_step: Some(0.5),
            ..small()
        };
        assert!(full_verdict(
            integer_lattice(cfg.half_window),
            ExponentP::new(2.0).unwrap(),
            &cfg
        )
        .is_err());
    }
}

use std::io::Write;

use num_complex::Complex64;
use pwcis::criteria::{full_verdict_with, CheckConfig, CriteriaReport, Thresholds};
use pwcis::experiments::{
    alpha_scaling, counterexample, kadets_sweep, lemma1_matrix, operator_probe, Lemma1Cell,
    Lemma1Config,
};
use pwcis::interp::{reconstruct, SampleSet};
use pwcis::nodes::{from_file, make_family};
use pwcis::{Error, FamilySpec, GenFnEvaluator, NodeSequence, Result};
use serde::Serialize;
use serde_json::json;

use crate::output::{is_stdout, sink, write_json};
use crate::{
    AlphaArgs, CheckArgs, CheckOpts, Command, CounterexampleArgs, FamilyArgs, GenfnArgs,
    InterpArgs, KadetsArgs, Lemma1Args, Source,
};

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Check(a) => check(a),
        Command::Kadets(a) => kadets(a),
        Command::Counterexample(a) => counterexample_cmd(a),
        Command::AlphaScaling(a) => alpha(a),
        Command::Lemma1(a) => lemma1(a),
        Command::Genfn(a) => genfn(a),
        Command::Interp(a) => interp(a),
        Command::Family(a) => family(a),
    }
}

fn load(source: &Source, half_window: u32) -> Result<NodeSequence> {
    match (&source.nodes, &source.family) {
        (Some(path), _) => from_file(path),
        (None, Some(spec)) => make_family(spec, half_window),
        (None, None) => Err(Error::Precondition(
            "one of --nodes or --family is required".into(),
        )),
    }
}

fn describe(source: &Source) -> String {
    match (&source.nodes, &source.family) {
        (Some(path), _) => format!("file:{}", path.display()),
        (None, Some(spec)) => spec.to_string(),
        (None, None) => String::new(),
    }
}

fn thresholds(t: &crate::Thresholds) -> Result<Thresholds> {
    if !(t.slope > 0.0 && t.r2 > 0.0 && t.stabilization > 0.0) {
        return Err(Error::Precondition("thresholds must be positive".into()));
    }
    Ok(Thresholds {
        slope_rel: t.slope,
        r2_min: t.r2,
        stabilization: t.stabilization,
        ..Thresholds::default()
    })
}

fn check_config(o: &CheckOpts) -> Result<CheckConfig> {
    Ok(CheckConfig {
        half_window: o.k,
        x_max: o.xmax,
        thresholds: thresholds(&o.thresholds)?,
        seed: o.seed,
        ..CheckConfig::default()
    })
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    criteria: CriteriaReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    operator_probe: Option<Lemma1Cell>,
}

fn check(a: CheckArgs) -> Result<u8> {
    let cfg = check_config(&a.opts)?;
    let seq = load(&a.source, cfg.half_window)?;
    let ev = GenFnEvaluator::build(seq, cfg.tol_rel)?;
    let criteria = full_verdict_with(&ev, a.opts.p, &cfg)?;
    let operator_probe = if a.with_operator_probe {
        let k = ev.sequence().half_window();
        let mut lc = Lemma1Config {
            seed: cfg.seed,
            stabilization: cfg.thresholds.stabilization,
            ..Default::default()
        };
        lc.windows.retain(|&n| 4 * n as i64 + 2 <= k);
        if lc.windows.len() < 2 {
            return Err(Error::Precondition(format!(
                "node window K = {k} too small for the operator probe"
            )));
        }
        Some(operator_probe(&ev, a.opts.p, &lc)?)
    } else {
        None
    };
    let report = CheckReport {
        criteria,
        operator_probe,
    };
    if !is_stdout(a.json.as_deref()) {
        let mut out = sink(None)?;
        let c = &report.criteria;
        writeln!(
            out,
            "family {}  p = {}  K = {}",
            c.family, c.p, c.half_window
        )?;
        for s in &c.criteria {
            writeln!(
                out,
                "  {:<12} {:<12} {}",
                s.name,
                s.status.to_string(),
                s.detail
            )?;
        }
        if let Some(cell) = &report.operator_probe {
            let r = &cell.row;
            writeln!(
                out,
                "  operator probe {:?} (stable {}), discrete A_p {:?} (stable {}), sigma choice ratio {:.4}",
                r.probe, r.probe_stable, r.ap, r.ap_stable, cell.sigma_choice_ratio
            )?;
        }
        writeln!(out, "verdict {}", c.verdict)?;
        out.flush()?;
    }
    if let Some(path) = &a.json {
        let config = json!({ "source": describe(&a.source), "p": a.opts.p.p(), "check": cfg,
            "with_operator_probe": a.with_operator_probe });
        write_json(path, "check", &config, &report)?;
    }
    Ok(report.criteria.verdict.exit_code() as u8)
}

fn kadets(a: KadetsArgs) -> Result<u8> {
    let cfg = check_config(&a.opts)?;
    let table = kadets_sweep(a.opts.p, &a.kinds, &a.d, &a.orientations, &cfg)?;
    if !is_stdout(a.json.as_deref()) {
        let mut out = sink(None)?;
        writeln!(
            out,
            "p = {}  boundary 1/(2p') = {:.6}",
            table.p, table.boundary
        )?;
        writeln!(
            out,
            "{:<28} {:>6} {:<9} {:<13} {:>12} {:>10} {:>6}",
            "family", "d", "orient", "verdict", "ap_sup", "slope", "r2"
        )?;
        for r in &table.rows {
            writeln!(
                out,
                "{:<28} {:>6} {:<9} {:<13} {:>12.5} {:>10.5} {:>6.3}",
                r.family,
                r.d,
                r.orientation.to_string(),
                r.verdict.to_string(),
                r.ap_sup,
                r.growth_slope,
                r.growth_r2
            )?;
        }
        out.flush()?;
    }
    if let Some(path) = &a.json {
        let kinds: Vec<&str> = a.kinds.iter().map(|k| k.name()).collect();
        let config = json!({ "p": a.opts.p.p(), "d": a.d, "orientations": a.orientations, "kinds": kinds, "check": cfg });
        write_json(path, "kadets", &config, &table)?;
    }
    Ok(0)
}

fn counterexample_cmd(a: CounterexampleArgs) -> Result<u8> {
    let d = a.d.unwrap_or_else(|| a.p.critical_perturbation());
    let xs = if a.xs.is_empty() {
        (5..=13).map(|m| 2f64.powi(m)).collect()
    } else {
        a.xs.clone()
    };
    let th = thresholds(&a.thresholds)?;
    let rep = counterexample(a.p, d, &xs, a.k, None, &th)?;
    if !is_stdout(a.json.as_deref()) {
        let mut out = sink(None)?;
        writeln!(out, "p = {}  |delta| = {}", rep.p, rep.d)?;
        for o in &rep.orientations {
            writeln!(
                out,
                "{} ({}): F exponent {:.4} (expected {:.4}), grows {}",
                o.orientation, o.family, o.f_exponent, o.f_exponent_expected, o.grows
            )?;
            for s in &o.series {
                writeln!(
                    out,
                    "  {:<5} vs (log(1+X))^(p-1): slope {:.5} r2 {:.4}; growth fires {}",
                    s.side, s.fit.slope, s.fit.r2, s.fires
                )?;
            }
            writeln!(out, "  {:>8} {:>12} {:>12}", "X", "right", "left")?;
            for (i, x) in rep.xs.iter().enumerate() {
                writeln!(
                    out,
                    "  {:>8} {:>12.6} {:>12.6}",
                    x, o.series[0].quotients[i], o.series[1].quotients[i]
                )?;
            }
        }
        out.flush()?;
    }
    if let Some(path) = &a.json {
        let config =
            json!({ "p": a.p.p(), "d": d, "xs": xs, "half_window": a.k, "thresholds": th });
        write_json(path, "counterexample", &config, &rep)?;
    }
    Ok(0)
}

fn alpha(a: AlphaArgs) -> Result<u8> {
    let rep = alpha_scaling(&a.family, &a.alphas, a.k, (a.xmin, a.xmax))?;
    let ok = rep
        .rows
        .iter()
        .all(|r| (r.exponent - r.expected).abs() <= a.tol);
    if !is_stdout(a.json.as_deref()) {
        let mut out = sink(None)?;
        writeln!(out, "base {}  exponent {:.5}", rep.base, rep.base_exponent)?;
        writeln!(
            out,
            "{:>7} {:>10} {:>10} {:>7}",
            "alpha", "exponent", "expected", "r2"
        )?;
        for r in &rep.rows {
            writeln!(
                out,
                "{:>7} {:>10.5} {:>10.5} {:>7.4}",
                r.alpha, r.exponent, r.expected, r.r2
            )?;
        }
        writeln!(
            out,
            "{}",
            if ok {
                "within tolerance"
            } else {
                "outside tolerance"
            }
        )?;
        out.flush()?;
    }
    if let Some(path) = &a.json {
        let config = json!({ "family": a.family.to_string(), "alphas": a.alphas, "half_window": a.k,
            "fit_range": [a.xmin, a.xmax], "tol": a.tol });
        write_json(path, "alpha-scaling", &config, &rep)?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn lemma1(a: Lemma1Args) -> Result<u8> {
    let cfg = Lemma1Config {
        half_window: a.k,
        windows: a.windows.clone(),
        trials: a.trials,
        seed: a.seed,
        stabilization: a.stabilization,
        ..Default::default()
    };
    let ds: Vec<f64> = a.d.iter().copied().filter(|&d| d != 0.0).collect();
    let cells = lemma1_matrix(a.p, &ds, &cfg)?;
    let concordant = cells.iter().all(|c| c.row.concordant());
    if !is_stdout(a.json.as_deref()) {
        let mut out = sink(None)?;
        for c in &cells {
            let r = &c.row;
            writeln!(
                out,
                "{:<36} probe stable {:<5} A_p stable {:<5} {:<10} last probe {:.4} last A_p {:.4} sigma ratio {:.4}",
                r.name,
                r.probe_stable,
                r.ap_stable,
                if r.concordant() { "concordant" } else { "DISCORDANT" },
                r.probe.last().copied().unwrap_or(f64::NAN),
                r.ap.last().copied().unwrap_or(f64::NAN),
                c.sigma_choice_ratio
            )?;
        }
        out.flush()?;
    }
    if let Some(path) = &a.json {
        let config = json!({ "p": a.p.p(), "d": a.d, "lemma1": cfg });
        write_json(path, "lemma1", &config, &cells)?;
    }
    Ok(if concordant { 0 } else { 1 })
}

#[derive(Serialize)]
struct GenfnRow {
    x: f64,
    #[serde(rename = "re_S")]
    re_s: f64,
    #[serde(rename = "im_S")]
    im_s: f64,
    #[serde(rename = "F")]
    f: f64,
}

fn genfn(a: GenfnArgs) -> Result<u8> {
    let ev = GenFnEvaluator::build(load(&a.source, a.k)?, 1e-2)?;
    let xs = a.grid.points();
    let s = ev.s_many_scaled(&xs);
    let f = ev.f_many(&xs);
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    for ((&x, s), f) in xs.iter().zip(&s).zip(f) {
        let s = s.to_complex().unwrap_or(Complex64::new(f64::INFINITY, 0.0));
        w.serialize(GenfnRow {
            x,
            re_s: s.re,
            im_s: s.im,
            f,
        })?;
    }
    w.flush()?;
    Ok(0)
}

fn interp(a: InterpArgs) -> Result<u8> {
    let ev = GenFnEvaluator::build(load(&a.source, a.k)?, 1e-2)?;
    let samples = SampleSet::from_file(&a.samples)?;
    let g = reconstruct(&ev, &samples, &a.grid)?;
    let mut out = sink(a.out.as_deref())?;
    g.write_csv(&mut out)?;
    out.flush()?;
    Ok(0)
}

fn family(a: FamilyArgs) -> Result<u8> {
    let spec = FamilySpec {
        kind: a.kind,
        d: a.d,
        delta0: a.delta0,
        seed: a.seed,
    };
    let seq = make_family(&spec, a.k)?;
    let mut out = sink(a.out.as_deref())?;
    seq.write_csv(&mut out)?;
    out.flush()?;
    Ok(0)
}

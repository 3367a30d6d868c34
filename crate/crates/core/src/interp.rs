//! Reconstruction from samples on Λ with the Lagrange-type series
//! f(z) = Σ_k a_k S(z) / (S'(λ_k)(z − λ_k)), and the L^p norms around it.

use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genfunc::{ExponentP, GenFnEvaluator, ScaledComplex};
use crate::nodes::NodeSequence;

/// Finitely many prescribed values f(λ_k) = a_k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    entries: Vec<(i64, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    k: i64,
    re_a: f64,
    im_a: f64,
}

impl SampleSet {
    pub fn new(entries: Vec<(i64, Complex64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(k, a) in &entries {
            if !seen.insert(k) {
                return Err(Error::DuplicateIndex(k));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::NonFinite(k));
            }
        }
        Ok(SampleSet { entries })
    }

    /// a_k = 1 at a single index.
    pub fn unit(k: i64) -> Self {
        SampleSet {
            entries: vec![(k, Complex64::new(1.0, 0.0))],
        }
    }

    /// a_k = f(λ_k) for every node with |k| ≤ `half_window`.
    pub fn from_function(
        seq: &NodeSequence,
        half_window: i64,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Self {
        let entries = seq
            .nodes()
            .iter()
            .filter(|n| n.index.abs() <= half_window)
            .map(|n| (n.index, f(n.position)))
            .collect();
        SampleSet { entries }
    }

    pub fn entries(&self) -> &[(i64, Complex64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SampleSet {
            entries: self.entries.iter().map(|&(k, a)| (k, a * c)).collect(),
        }
    }

    /// CSV with header `k,re_a,im_a`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["k", "re_a", "im_a"] {
            return Err(Error::Parse(format!(
                "expected header k,re_a,im_a, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for row in rdr.deserialize() {
            let r: SampleRow = row?;
            entries.push((r.k, Complex64::new(r.re_a, r.im_a)));
        }
        Self::new(entries)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for &(k, a) in &self.entries {
            w.serialize(SampleRow {
                k,
                re_a: a.re,
                im_a: a.im,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// (Σ_k |a_k|^p e^{−pπ|η_k|}(1 + |η_k|))^{1/p}, η_k = Im λ_k.
pub fn weighted_data_norm(s: &SampleSet, seq: &NodeSequence, p: ExponentP) -> Result<f64> {
    let pp = p.p();
    let mut acc = 0.0;
    for &(k, a) in &s.entries {
        let eta = seq.node(k)?.position.im.abs();
        acc += a.norm().powf(pp) * (-pp * std::f64::consts::PI * eta).exp() * (1.0 + eta);
    }
    Ok(acc.powf(1.0 / pp))
}

/// A uniform real grid `min, min + step, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && min.is_finite() && max.is_finite() && min <= max) {
            return Err(Error::Precondition(format!("bad grid {min}:{max}:{step}")));
        }
        Ok(GridSpec { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points computed as min + i·step, so reruns give identical values.
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `xmin:xmax:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, h] = parts[..] else {
            return Err(Error::Parse(format!("grid `{s}` is not xmin:xmax:step")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("grid `{s}`: {e}")))
        };
        GridSpec::new(num(a)?, num(b)?, num(h)?)
    }
}

/// Values of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub step: f64,
}

impl GridFunction {
    pub fn sample(spec: &GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let grid = spec.points();
        let values = grid.iter().map(|&x| f(x)).collect();
        GridFunction {
            grid,
            values,
            step: spec.step,
        }
    }

    /// The points with |x − centre| ≤ quarter of the grid length, i.e. the
    /// inner half.
    pub fn interior(&self) -> GridFunction {
        let (a, b) = (self.grid[0], *self.grid.last().expect("nonempty grid"));
        let (c, r) = (0.5 * (a + b), 0.25 * (b - a) + 1e-12);
        let keep: Vec<usize> = (0..self.grid.len())
            .filter(|&i| (self.grid[i] - c).abs() <= r)
            .collect();
        GridFunction {
            grid: keep.iter().map(|&i| self.grid[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
            step: self.step,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "re_f", "im_f"])?;
        for (x, v) in self.grid.iter().zip(&self.values) {
            w.write_record([x.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// (step · Σ |values|^p)^{1/p}.
pub fn grid_lp_norm(g: &GridFunction, p: ExponentP) -> Result<f64> {
    if g.step.is_nan() || g.step <= 0.0 {
        return Err(Error::Precondition(format!(
            "grid step {} must be positive",
            g.step
        )));
    }
    let pp = p.p();
    Ok((g.step * g.values.iter().map(|v| v.norm().powf(pp)).sum::<f64>()).powf(1.0 / pp))
}

/// The basis function f_k(z) = S(z) / (S'(λ_k)(z − λ_k)) for node position
/// `i`, always through the cancelled product.
pub fn basis_function(ev: &GenFnEvaluator, i: usize, z: Complex64) -> Complex64 {
    ev.cancelled_scaled(z, i).ratio(&ev.derivative_scaled(i))
}

struct Term {
    pos: usize,
    lambda: Complex64,
    a: Complex64,
    deriv: ScaledComplex,
}

fn support_terms(ev: &GenFnEvaluator, s: &SampleSet) -> Result<Vec<Term>> {
    let seq = ev.sequence();
    s.entries
        .iter()
        .map(|&(k, a)| {
            let pos = seq.position_of(k).ok_or(Error::UnknownIndex(k))?;
            Ok(Term {
                pos,
                lambda: seq.nodes()[pos].position,
                a,
                deriv: ev.derivative_scaled(pos),
            })
        })
        .collect()
}

/// The finite series at real points. Within the switch radius of a support
/// node its term uses the cancelled product, so the value at the node itself
/// is exactly a_k.
pub fn reconstruct_at(ev: &GenFnEvaluator, s: &SampleSet, xs: &[f64]) -> Result<Vec<Complex64>> {
    let terms = support_terms(ev, s)?;
    let tau = ev.switch_radius();
    let svals = ev.s_many_scaled(xs);
    Ok(xs
        .iter()
        .zip(&svals)
        .map(|(&x, sx)| {
            let z = Complex64::new(x, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &terms {
                let d = z - t.lambda;
                if d.norm() < tau {
                    acc += t.a * ev.cancelled_scaled(z, t.pos).ratio(&t.deriv);
                } else if !sx.is_zero() {
                    acc += t.a * sx.ratio(&t.deriv) / d;
                }
            }
            acc
        })
        .collect())
}

pub fn reconstruct(ev: &GenFnEvaluator, s: &SampleSet, grid: &GridSpec) -> Result<GridFunction> {
    let xs = grid.points();
    let values = reconstruct_at(ev, s, &xs)?;
    Ok(GridFunction {
        grid: xs,
        values,
        step: grid.step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub ratio: f64,
    pub grid_norm: f64,
    pub data_norm: f64,
    /// Share of |f|^p mass on the outer tenth of the grid at each end, a
    /// gauge of what the finite grid cuts off.
    pub edge_share: f64,
}

/// ‖reconstruct(s)‖_{L^p(grid)} / weighted_data_norm(s).
pub fn stability_ratio(
    ev: &GenFnEvaluator,
    s: &SampleSet,
    p: ExponentP,
    grid: &GridSpec,
) -> Result<StabilityReport> {
    if s.is_empty() {
        return Err(Error::Precondition("no samples".into()));
    }
    let data_norm = weighted_data_norm(s, ev.sequence(), p)?;
    if data_norm == 0.0 {
        return Err(Error::ZeroDataNorm);
    }
    let g = reconstruct(ev, s, grid)?;
    let grid_norm = grid_lp_norm(&g, p)?;
    let pp = p.p();
    let n = g.values.len();
    let edge = n / 10;
    let mass = |v: &[Complex64]| v.iter().map(|x| x.norm().powf(pp)).sum::<f64>();
    let total = mass(&g.values);
    let edge_share = if total > 0.0 {
        (mass(&g.values[..edge]) + mass(&g.values[n - edge..])) / total
    } else {
        0.0
    };
    Ok(StabilityReport {
        ratio: grid_norm / data_norm,
        grid_norm,
        data_norm,
        edge_share,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlancherelPolya {
    /// (Σ_j |f(σ_j)|^p)^{1/p} / ‖f‖_p.
    pub ratio: f64,
    pub sample_norm: f64,
    pub lp_norm: f64,
}

/// The sampling ratio of f over the points σ_j, with ‖f‖_p taken as the
/// Riemann sum on `grid`.
pub fn plancherel_polya(
    f: impl Fn(Complex64) -> Complex64,
    sigma: &[Complex64],
    p: ExponentP,
    grid: &GridSpec,
) -> Result<PlancherelPolya> {
    let pp = p.p();
    let sample_norm = sigma
        .iter()
        .map(|&z| f(z).norm().powf(pp))
        .sum::<f64>()
        .powf(1.0 / pp);
    let g = GridFunction::sample(grid, |x| f(Complex64::new(x, 0.0)));
    let lp_norm = grid_lp_norm(&g, p)?;
    if lp_norm == 0.0 {
        return Err(Error::ZeroDataNorm);
    }
    Ok(PlancherelPolya {
        ratio: sample_norm / lp_norm,
        sample_norm,
        lp_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTripReport {
    /// Largest |reconstruction − f| on the inner half of the grid.
    pub max_abs_error: f64,
    /// ‖reconstruction − f‖_p / ‖f‖_p on the inner half (0 when f vanishes
    /// there and the reconstruction does too).
    pub rel_lp_error: f64,
    pub interior: (f64, f64),
    pub samples: usize,
}

/// Samples `f` at the nodes with |k| ≤ `half_window`, reconstructs on `grid`
/// and compares with `f` on the inner half of the grid.
pub fn round_trip(
    ev: &GenFnEvaluator,
    f: impl Fn(Complex64) -> Complex64,
    half_window: i64,
    grid: &GridSpec,
    p: ExponentP,
) -> Result<RoundTripReport> {
    let s = SampleSet::from_function(ev.sequence(), half_window, &f);
    let rec = reconstruct(ev, &s, grid)?.interior();
    let exact = GridFunction {
        values: rec
            .grid
            .iter()
            .map(|&x| f(Complex64::new(x, 0.0)))
            .collect(),
        grid: rec.grid.clone(),
        step: rec.step,
    };
    let diff = GridFunction {
        values: rec
            .values
            .iter()
            .zip(&exact.values)
            .map(|(a, b)| a - b)
            .collect(),
        grid: rec.grid.clone(),
        step: rec.step,
    };
    let max_abs_error = diff.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (num, den) = (grid_lp_norm(&diff, p)?, grid_lp_norm(&exact, p)?);
    let rel_lp_error = if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(RoundTripReport {
        max_abs_error,
        rel_lp_error,
        interior: (rec.grid[0], *rec.grid.last().expect("nonempty interior")),
        samples: s.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::{integer_lattice, make_family, FamilyKind, FamilySpec, Node};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sinc(z: Complex64) -> Complex64 {
        if z.norm() < 1e-12 {
            Complex64::new(1.0, 0.0)
        } else {
            (z * PI).sin() / (z * PI)
        }
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn p2() -> ExponentP {
        ExponentP::new(2.0).unwrap()
    }

    #[test]
    fn data_norm_examples() {
        let nodes = vec![
            Node {
                index: 0,
                position: c(0.0),
            },
            Node {
                index: 1,
                position: Complex64::new(1.0, 1.0),
            },
            Node {
                index: 2,
                position: c(2.0),
            },
        ];
        let seq = NodeSequence::new(nodes, "toy", None).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let n =
                weighted_data_norm(&SampleSet::unit(0), &seq, ExponentP::new(p).unwrap()).unwrap();
            assert!((n - 1.0).abs() < 1e-15);
        }
        let n = weighted_data_norm(&SampleSet::unit(1), &seq, p2()).unwrap();
        assert!((n - (2.0 * (-2.0 * PI).exp()).sqrt()).abs() < 1e-15);
        assert!((n - 0.0612).abs() < 1e-4);
        let two = SampleSet::new(vec![(0, c(1.0)), (2, c(1.0))]).unwrap();
        assert!((weighted_data_norm(&two, &seq, p2()).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(weighted_data_norm(&SampleSet::unit(7), &seq, p2()).is_err());
    }

    #[test]
    fn sample_set_validation_and_csv() {
        assert!(SampleSet::new(vec![(1, c(1.0)), (1, c(2.0))]).is_err());
        let s = SampleSet::new(vec![(3, Complex64::new(1.0, -0.5)), (-2, c(0.5))]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("k,re_a,im_a\n"));
        assert_eq!(SampleSet::read_csv(buf.as_slice()).unwrap(), s);
        assert!(SampleSet::read_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_spec_parsing() {
        let g: GridSpec = "-10:10:0.01".parse().unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g.points()[2000], 10.0);
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("2:1:0.1".parse::<GridSpec>().is_err());
        assert!("0:1:0".parse::<GridSpec>().is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let ones = GridFunction::sample(&GridSpec::new(0.0, 0.99, 0.01).unwrap(), |_| c(1.0));
        assert_eq!(ones.values.len(), 100);
        assert!((grid_lp_norm(&ones, p2()).unwrap() - 1.0).abs() < 0.01);
        let s = GridFunction::sample(&GridSpec::new(-40.0, 40.0, 0.01).unwrap(), |x| sinc(c(x)));
        assert!((grid_lp_norm(&s, p2()).unwrap() - 1.0).abs() < 2e-2);
        let zero = GridFunction::sample(&GridSpec::new(0.0, 1.0, 0.1).unwrap(), |_| c(0.0));
        assert_eq!(grid_lp_norm(&zero, p2()).unwrap(), 0.0);
    }

    #[test]
    fn lattice_unit_data_is_sinc() {
        let ev = GenFnEvaluator::build(integer_lattice(100_000), 1e-2).unwrap();
        let v = reconstruct_at(&ev, &SampleSet::unit(0), &[0.5]).unwrap();
        assert!((v[0] - 2.0 / PI).norm() < 1e-9);
        let xs: Vec<f64> = (-8..=8).map(|j| j as f64).collect();
        let v = reconstruct_at(&ev, &SampleSet::unit(3), &xs).unwrap();
        for (x, val) in xs.iter().zip(&v) {
            assert_eq!(*val, c(if *x == 3.0 { 1.0 } else { 0.0 }));
        }
    }

    #[test]
    fn two_term_sinc_sum() {
        let ev = GenFnEvaluator::build(integer_lattice(100_000), 1e-2).unwrap();
        let s = SampleSet::new(vec![(3, c(1.0)), (-2, c(0.5))]).unwrap();
        let g = reconstruct(&ev, &s, &"-8:8:0.01".parse().unwrap()).unwrap();
        let err = g
            .grid
            .iter()
            .zip(&g.values)
            .map(|(&x, v)| (v - sinc(c(x - 3.0)) - 0.5 * sinc(c(x + 2.0))).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
    }

    #[test]
    fn interpolation_linearity_and_basis() {
        let ev = GenFnEvaluator::build(
            make_family(&"signed:0.2".parse().unwrap(), 2000).unwrap(),
            1e-2,
        )
        .unwrap();
        let seq = ev.sequence();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut data = || -> SampleSet {
            SampleSet::new(
                (-12..=12)
                    .map(|k| {
                        (
                            k,
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let (a, b) = (data(), data());
        // Values at the support nodes reproduce the data.
        let xs: Vec<f64> = a
            .entries()
            .iter()
            .map(|&(k, _)| seq.node(k).unwrap().position.re)
            .collect();
        for (v, &(_, want)) in reconstruct_at(&ev, &a, &xs)
            .unwrap()
            .iter()
            .zip(a.entries())
        {
            assert!((v - want).norm() <= 1e-9 * want.norm());
        }
        let sum = SampleSet::new(
            a.entries()
                .iter()
                .zip(b.entries())
                .map(|(&(k, x), &(_, y))| (k, x + y))
                .collect(),
        )
        .unwrap();
        let pts: Vec<f64> = (0..200).map(|i| -15.0 + 0.151 * i as f64).collect();
        let (fa, fb, fs) = (
            reconstruct_at(&ev, &a, &pts).unwrap(),
            reconstruct_at(&ev, &b, &pts).unwrap(),
            reconstruct_at(&ev, &sum, &pts).unwrap(),
        );
        for i in 0..pts.len() {
            assert!((fs[i] - fa[i] - fb[i]).norm() < 1e-12 * (1.0 + fs[i].norm()));
        }
        for k in [-3i64, 0, 5] {
            let i = seq.position_of(k).unwrap();
            let f = reconstruct_at(&ev, &SampleSet::unit(k), &pts).unwrap();
            for (x, v) in pts.iter().zip(&f) {
                let want = basis_function(&ev, i, c(*x));
                assert!(
                    (v - want).norm() < 1e-9 * (1.0 + want.norm()),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn sinc_round_trips() {
        let ev = GenFnEvaluator::build(integer_lattice(4000), 1e-2).unwrap();
        let r = round_trip(
            &ev,
            |z| sinc(z - 3.0),
            2000,
            &"-20:20:0.01".parse().unwrap(),
            p2(),
        )
        .unwrap();
        assert!(r.max_abs_error <= 1e-3, "{r:?}");
        assert_eq!(r.interior, (-10.0, 10.0));
        let zero = round_trip(&ev, |_| c(0.0), 50, &"-4:4:0.1".parse().unwrap(), p2()).unwrap();
        assert_eq!((zero.max_abs_error, zero.rel_lp_error), (0.0, 0.0));

        let shifted = GenFnEvaluator::build(
            make_family(&FamilySpec::new(FamilyKind::ConstantShift, 0.2), 2000).unwrap(),
            1e-2,
        )
        .unwrap();
        let r = round_trip(
            &shifted,
            sinc,
            2000,
            &"-100:100:0.01".parse().unwrap(),
            p2(),
        )
        .unwrap();
        assert!(r.rel_lp_error <= 5e-2, "{r:?}");
    }

    #[test]
    fn stability_ratio_examples() {
        let ev = GenFnEvaluator::build(integer_lattice(20_000), 1e-2).unwrap();
        let grid: GridSpec = "-200:200:0.01".parse().unwrap();
        let r = stability_ratio(&ev, &SampleSet::unit(0), p2(), &grid).unwrap();
        // ‖sinc‖₂ over [−200, 200] is 1 − O(1/200).
        assert!((r.ratio - 1.0).abs() < 5e-3, "{r:?}");
        let s = SampleSet::new(vec![(1, Complex64::new(0.3, 0.2)), (-4, c(-1.0))]).unwrap();
        let a = stability_ratio(&ev, &s, p2(), &grid).unwrap().ratio;
        let b = stability_ratio(&ev, &s.scaled(Complex64::new(0.0, 7.5)), p2(), &grid)
            .unwrap()
            .ratio;
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(matches!(
            stability_ratio(
                &ev,
                &SampleSet::new(vec![(0, c(0.0))]).unwrap(),
                p2(),
                &grid
            ),
            Err(Error::ZeroDataNorm)
        ));
    }

    #[test]
    fn plancherel_polya_for_sinc() {
        let grid: GridSpec = "-2000:2000:0.01".parse().unwrap();
        let on_lattice: Vec<Complex64> = (-2000..=2000).map(|j| c(j as f64)).collect();
        let r = plancherel_polya(sinc, &on_lattice, p2(), &grid).unwrap();
        assert!((r.sample_norm - 1.0).abs() < 1e-12);
        assert!((r.ratio - 1.0).abs() < 1e-3, "{r:?}");
        // Σ_j sinc²(j + 1/2) = Σ_j 4/(π²(2j + 1)²), summed directly.
        let half: Vec<Complex64> = (-2000..2000).map(|j| c(j as f64 + 0.5)).collect();
        let lattice_sum: f64 = (-2000..2000)
            .map(|j| 4.0 / (PI * PI * (2.0 * j as f64 + 1.0).powi(2)))
            .sum();
        let r = plancherel_polya(sinc, &half, p2(), &grid).unwrap();
        assert!((r.sample_norm - lattice_sum.sqrt()).abs() < 1e-10);
        assert!((r.ratio - 1.0).abs() < 1e-3, "{r:?}");
        let scaled = plancherel_polya(|z| sinc(z) * 3.0, &half, p2(), &grid).unwrap();
        assert!((scaled.ratio - r.ratio).abs() < 1e-12);
    }
}

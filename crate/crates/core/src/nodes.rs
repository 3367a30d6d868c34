//! Node sequences Λ = {λ_k}: construction of the perturbed-lattice
//! families, CSV interchange, and the geometric queries (distance,
//! separation, relative density) the rest of the toolkit builds on.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub index: i64,
    pub position: Complex64,
}

/// Asymptotic layout of the nodes beyond the index window: for |k| > K the
/// node sits at `k + right[k mod period]` (k > 0) or `k + left[|k| mod period]`
/// (k < 0). The generating-function evaluator sums this tail in closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailModel {
    pub period: usize,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

impl TailModel {
    pub fn lattice() -> Self {
        Self::uniform(0.0, 0.0)
    }

    pub fn uniform(right: f64, left: f64) -> Self {
        TailModel {
            period: 1,
            right: vec![right],
            left: vec![left],
        }
    }

    pub fn right_offset(&self, k: u64) -> f64 {
        self.right[(k % self.period as u64) as usize]
    }

    pub fn left_offset(&self, k: u64) -> f64 {
        self.left[(k % self.period as u64) as usize]
    }

    pub fn max_abs_offset(&self) -> f64 {
        self.right
            .iter()
            .chain(&self.left)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, alpha: f64) -> Self {
        TailModel {
            period: self.period,
            right: self.right.iter().map(|v| v * alpha).collect(),
            left: self.left.iter().map(|v| v * alpha).collect(),
        }
    }
}

/// A finite window of nodes, iterated in ascending index order.
#[derive(Debug, Clone)]
pub struct NodeSequence {
    nodes: Vec<Node>,
    by_real: Vec<usize>,
    family_tag: String,
    half_window: i64,
    tail: Option<TailModel>,
}

impl NodeSequence {
    pub fn new(
        mut nodes: Vec<Node>,
        family_tag: impl Into<String>,
        tail: Option<TailModel>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptySequence);
        }
        for n in &nodes {
            if !(n.position.re.is_finite() && n.position.im.is_finite()) {
                return Err(Error::NonFinite(n.index));
            }
        }
        nodes.sort_by_key(|n| n.index);
        for w in nodes.windows(2) {
            if w[0].index == w[1].index {
                return Err(Error::DuplicateIndex(w[0].index));
            }
        }
        let mut by_real: Vec<usize> = (0..nodes.len()).collect();
        by_real.sort_by(|&a, &b| {
            let (pa, pb) = (nodes[a].position, nodes[b].position);
            pa.re.total_cmp(&pb.re).then(pa.im.total_cmp(&pb.im))
        });
        let half_window = nodes.iter().map(|n| n.index.abs()).max().unwrap_or(0);
        Ok(NodeSequence {
            nodes,
            by_real,
            family_tag: family_tag.into(),
            half_window,
            tail,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn family_tag(&self) -> &str {
        &self.family_tag
    }

    /// Largest |k| in the window.
    pub fn half_window(&self) -> i64 {
        self.half_window
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: Option<TailModel>) -> Self {
        self.tail = tail;
        self
    }

    /// Positions of the nodes in the `nodes()` slice, ordered by real part.
    pub fn by_real(&self) -> &[usize] {
        &self.by_real
    }

    pub fn position_of(&self, index: i64) -> Option<usize> {
        self.nodes.binary_search_by_key(&index, |n| n.index).ok()
    }

    pub fn node(&self, index: i64) -> Result<&Node> {
        self.position_of(index)
            .map(|p| &self.nodes[p])
            .ok_or(Error::UnknownIndex(index))
    }

    pub fn is_real(&self) -> bool {
        self.nodes.iter().all(|n| n.position.im == 0.0)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.nodes
            .iter()
            .fold(0.0f64, |m, n| m.max(n.position.im.abs()))
    }

    /// Nodes with |k| ≤ `half_window`, keeping the tag and tail model.
    pub fn subwindow(&self, half_window: i64) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .copied()
            .filter(|n| n.index.abs() <= half_window)
            .collect();
        NodeSequence::new(nodes, self.family_tag.clone(), self.tail.clone())
    }

    /// Λ_α = {k + α(λ_k − k)}: scales every perturbation of the lattice by α.
    pub fn scale_perturbation(&self, alpha: f64) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let k = Complex64::new(n.index as f64, 0.0);
                Node {
                    index: n.index,
                    position: k + (n.position - k) * alpha,
                }
            })
            .collect();
        let tag = format!("{}*alpha={}", self.family_tag, alpha);
        NodeSequence::new(nodes, tag, self.tail.as_ref().map(|t| t.scaled(alpha)))
    }

    /// Index of the node nearest to `z` (in `nodes()`), with its distance.
    pub fn nearest(&self, z: Complex64) -> (usize, f64) {
        let order = &self.by_real;
        let start = order.partition_point(|&i| self.nodes[i].position.re < z.re);
        let mut best = (usize::MAX, f64::INFINITY);
        for &i in &order[start..] {
            let p = self.nodes[i].position;
            if p.re - z.re >= best.1 {
                break;
            }
            let d = (p - z).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        for &i in order[..start].iter().rev() {
            let p = self.nodes[i].position;
            if z.re - p.re >= best.1 {
                break;
            }
            let d = (p - z).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// dist(x, Λ) for real x.
    pub fn nearest_distance(&self, x: f64) -> f64 {
        self.nearest(Complex64::new(x, 0.0)).1
    }

    /// Minimum pairwise distance, exact over the window.
    pub fn separation(&self) -> f64 {
        self.closest_pair().map_or(f64::INFINITY, |(_, _, d)| d)
    }

    /// The closest pair of nodes (by index) and their distance.
    pub fn closest_pair(&self) -> Option<(i64, i64, f64)> {
        let mut best: Option<(i64, i64, f64)> = None;
        for (a, &i) in self.by_real.iter().enumerate() {
            let pi = self.nodes[i].position;
            for &j in &self.by_real[a + 1..] {
                let pj = self.nodes[j].position;
                let bound = best.map_or(f64::INFINITY, |b| b.2);
                if pj.re - pi.re >= bound {
                    break;
                }
                let d = (pi - pj).norm();
                if d < bound {
                    best = Some((self.nodes[i].index, self.nodes[j].index, d));
                }
            }
        }
        best
    }

    /// Smallest candidate r such that every square Q(x, r), x in the real
    /// span of Λ, contains a node.
    ///
    /// For a fixed r the worst centre sits in the middle of the largest gap
    /// between consecutive real parts of the nodes with |η| ≤ r, so the scan
    /// over centres reduces to a scan over gaps.
    pub fn relative_density(&self, candidates: &[f64]) -> Option<f64> {
        let (lo, hi) = self.real_span();
        candidates.iter().copied().find(|&r| {
            let mut xs = self
                .nodes
                .iter()
                .filter(|n| n.position.im.abs() <= r)
                .map(|n| n.position.re);
            let Some(first) = xs.next() else { return false };
            let mut reals: Vec<f64> = std::iter::once(first).chain(xs).collect();
            reals.sort_by(f64::total_cmp);
            let mut worst = (reals[0] - lo).max(hi - reals[reals.len() - 1]);
            for w in reals.windows(2) {
                worst = worst.max(0.5 * (w[1] - w[0]));
            }
            worst <= r
        })
    }

    pub fn real_span(&self) -> (f64, f64) {
        let first = self.nodes[self.by_real[0]].position.re;
        let last = self.nodes[*self.by_real.last().unwrap()].position.re;
        (first, last)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for n in &self.nodes {
            w.serialize(NodeRow {
                k: n.index,
                re: n.position.re,
                im: n.position.im,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, tag: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["k", "re", "im"] {
            return Err(Error::Parse(format!(
                "expected header `k,re,im`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut nodes = Vec::new();
        for row in rdr.deserialize::<NodeRow>() {
            let row = row?;
            nodes.push(Node {
                index: row.k,
                position: Complex64::new(row.re, row.im),
            });
        }
        NodeSequence::new(nodes, tag, None)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    k: i64,
    re: f64,
    im: f64,
}

/// Loads a nodes CSV (`k,re,im`). No tail model is attached: the file is
/// taken to list the whole sequence.
pub fn from_file(path: impl AsRef<Path>) -> Result<NodeSequence> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    NodeSequence::read_csv(file, format!("file:{}", path.display()))
}

pub fn integer_lattice(half_window: u32) -> NodeSequence {
    make_family(&FamilySpec::integer(), half_window).expect("lattice is always valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Integer,
    ConstantShift,
    Signed,
    Alternating,
    Random,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Integer => "integer",
            FamilyKind::ConstantShift => "constant_shift",
            FamilyKind::Signed => "signed",
            FamilyKind::Alternating => "alternating",
            FamilyKind::Random => "random",
        }
    }

    /// Perturbation magnitudes allowed for the kind. The signed family keeps
    /// its gaps at 1 away from the origin for any |d| < 1, which admits the
    /// super-critical examples.
    fn max_abs_d(self) -> f64 {
        match self {
            FamilyKind::Signed => 1.0,
            _ => 0.5,
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "integer" | "lattice" => FamilyKind::Integer,
            "constant_shift" | "shift" => FamilyKind::ConstantShift,
            "signed" => FamilyKind::Signed,
            "alternating" => FamilyKind::Alternating,
            "random" => FamilyKind::Random,
            other => {
                return Err(Error::InvalidFamily(format!(
                    "unknown family kind `{other}`"
                )))
            }
        })
    }
}

/// Perturbed lattice λ_k = k + δ_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub d: f64,
    /// δ_0 of the signed family.
    pub delta0: f64,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, d: f64) -> Self {
        FamilySpec {
            kind,
            d,
            delta0: 1.0,
            seed: 0,
        }
    }

    pub fn integer() -> Self {
        Self::new(FamilyKind::Integer, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.d.is_finite() || !self.delta0.is_finite() {
            return Err(Error::InvalidFamily("non-finite parameter".into()));
        }
        let bound = self.kind.max_abs_d();
        if self.kind != FamilyKind::Integer && self.d.abs() >= bound {
            return Err(Error::InvalidFamily(format!(
                "|d| = {} must be below {bound} for the {} family",
                self.d.abs(),
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// δ_k for this family.
    pub fn perturbation(&self, k: i64) -> f64 {
        let d = self.d;
        match self.kind {
            FamilyKind::Integer => 0.0,
            FamilyKind::ConstantShift => d,
            FamilyKind::Signed => match k.signum() {
                0 => self.delta0,
                s => s as f64 * d,
            },
            FamilyKind::Alternating => {
                if k.rem_euclid(2) == 0 {
                    d
                } else {
                    -d
                }
            }
            FamilyKind::Random => {
                // One ChaCha stream per index, so windows of different size
                // agree on the indices they share.
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(zigzag(k));
                rng.gen_range(-1.0..=1.0) * d
            }
        }
    }

    fn tail_model(&self) -> TailModel {
        let d = self.d;
        match self.kind {
            FamilyKind::Integer | FamilyKind::Random => TailModel::lattice(),
            FamilyKind::ConstantShift => TailModel::uniform(d, d),
            FamilyKind::Signed => TailModel::uniform(d, -d),
            FamilyKind::Alternating => TailModel {
                period: 2,
                right: vec![d, -d],
                left: vec![d, -d],
            },
        }
    }
}

fn zigzag(k: i64) -> u64 {
    ((k << 1) ^ (k >> 63)) as u64
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Integer => write!(f, "integer"),
            FamilyKind::Signed => write!(f, "signed:{}:delta0={}", self.d, self.delta0),
            FamilyKind::Random => write!(f, "random:{}:seed={}", self.d, self.seed),
            kind => write!(f, "{}:{}", kind.name(), self.d),
        }
    }
}

/// `kind[:d[:key=value]...]`, e.g. `signed:0.25`, `signed:-0.2:delta0=0`,
/// `random:0.2:seed=7`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind: FamilyKind = parts.next().unwrap_or_default().trim().parse()?;
        let mut spec = FamilySpec::new(kind, 0.0);
        if let Some(d) = parts.next() {
            spec.d = d
                .trim()
                .parse()
                .map_err(|_| Error::InvalidFamily(format!("bad magnitude `{d}`")))?;
        }
        for kv in parts {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidFamily(format!("expected key=value, got `{kv}`")))?;
            let bad = || Error::InvalidFamily(format!("bad value for `{key}`: `{value}`"));
            match key.trim() {
                "delta0" => spec.delta0 = value.trim().parse().map_err(|_| bad())?,
                "seed" => spec.seed = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::InvalidFamily(format!("unknown option `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds λ_k = k + δ_k for |k| ≤ K.
pub fn make_family(spec: &FamilySpec, half_window: u32) -> Result<NodeSequence> {
    spec.validate()?;
    if half_window == 0 {
        return Err(Error::Precondition(
            "window half-size K must be at least 1".into(),
        ));
    }
    let kk = half_window as i64;
    let nodes = (-kk..=kk)
        .map(|k| Node {
            index: k,
            position: Complex64::new(k as f64 + spec.perturbation(k), 0.0),
        })
        .collect();
    let seq = NodeSequence::new(nodes, spec.to_string(), Some(spec.tail_model()))?;
    if let Some((a, b, d)) = seq.closest_pair() {
        if d == 0.0 {
            return Err(Error::CoincidentNodes(a, b));
        }
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions(seq: &NodeSequence) -> Vec<f64> {
        seq.nodes().iter().map(|n| n.position.re).collect()
    }

    #[test]
    fn lattice_positions() {
        let seq = integer_lattice(3);
        assert_eq!(positions(&seq), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(seq.len(), 7);
        assert_eq!(
            integer_lattice(1).node(0).unwrap().position,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn signed_family_values() {
        let spec: FamilySpec = "signed:0.25".parse().unwrap();
        let seq = make_family(&spec, 5).unwrap();
        assert_eq!(seq.node(2).unwrap().position.re, 2.25);
        assert_eq!(seq.node(-2).unwrap().position.re, -2.25);
        assert_eq!(seq.node(0).unwrap().position.re, 1.0);
    }

    #[test]
    fn zero_shift_is_lattice() {
        let seq = make_family(&FamilySpec::new(FamilyKind::ConstantShift, 0.0), 6).unwrap();
        assert_eq!(positions(&seq), positions(&integer_lattice(6)));
    }

    #[test]
    fn family_validation() {
        assert!(make_family(&FamilySpec::new(FamilyKind::ConstantShift, 0.5), 4).is_err());
        assert!(make_family(&FamilySpec::new(FamilyKind::Random, -0.6), 4).is_err());
        assert!(make_family(&FamilySpec::new(FamilyKind::Signed, 0.6), 4).is_ok());
        assert!(make_family(&FamilySpec::integer(), 0).is_err());
        // δ_0 = 1 lands on λ_1 = 1 when d = 0
        assert!(matches!(
            make_family(&FamilySpec::new(FamilyKind::Signed, 0.0), 4),
            Err(Error::CoincidentNodes(..))
        ));
    }

    #[test]
    fn spec_round_trips_through_display() {
        for s in [
            "integer",
            "constant_shift:0.2",
            "signed:-0.25:delta0=0",
            "alternating:0.1",
            "random:0.3:seed=9",
        ] {
            let spec: FamilySpec = s.parse().unwrap();
            let again: FamilySpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again, "{s}");
        }
        assert!("bogus:0.1".parse::<FamilySpec>().is_err());
        assert!("signed:0.1:color=red".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn random_family_shares_indices_across_windows() {
        let spec: FamilySpec = "random:0.3:seed=11".parse().unwrap();
        let small = make_family(&spec, 10).unwrap();
        let big = make_family(&spec, 40).unwrap();
        for n in small.nodes() {
            assert_eq!(n.position, big.node(n.index).unwrap().position);
            assert!((n.position.re - n.index as f64).abs() <= 0.3);
        }
    }

    #[test]
    fn nearest_distance_examples() {
        let z = integer_lattice(10);
        assert!((z.nearest_distance(0.3) - 0.3).abs() < 1e-15);
        assert!((z.nearest_distance(0.5) - 0.5).abs() < 1e-15);
        let toy = NodeSequence::new(
            vec![
                Node {
                    index: 0,
                    position: Complex64::new(0.0, 0.0),
                },
                Node {
                    index: 1,
                    position: Complex64::new(0.0, 1.0),
                },
            ],
            "toy",
            None,
        )
        .unwrap();
        assert_eq!(toy.nearest_distance(2.0), 2.0);
    }

    #[test]
    fn separation_examples() {
        assert_eq!(integer_lattice(50).separation(), 1.0);
        let shifted = make_family(&FamilySpec::new(FamilyKind::ConstantShift, 0.2), 50).unwrap();
        assert!((shifted.separation() - 1.0).abs() < 1e-12);
        let signed = make_family(&"signed:0.25".parse().unwrap(), 50).unwrap();
        assert_eq!(signed.separation(), 0.25);
        assert_eq!(
            signed.closest_pair().map(|(a, b, _)| (a.min(b), a.max(b))),
            Some((0, 1))
        );
    }

    #[test]
    fn separation_matches_brute_force() {
        let spec: FamilySpec = "random:0.45:seed=3".parse().unwrap();
        let seq = make_family(&spec, 60).unwrap();
        let mut brute = f64::INFINITY;
        for a in seq.nodes() {
            for b in seq.nodes() {
                if a.index != b.index {
                    brute = brute.min((a.position - b.position).norm());
                }
            }
        }
        assert_eq!(seq.separation(), brute);
    }

    /// Oracle: slide centres over a fine grid and check the square directly.
    fn density_scan(seq: &NodeSequence, r: f64) -> bool {
        let (lo, hi) = seq.real_span();
        let steps = ((hi - lo) / 1e-3) as usize;
        (0..=steps).all(|i| {
            let x = lo + i as f64 * 1e-3;
            seq.nodes()
                .iter()
                .any(|n| (n.position.re - x).abs() <= r + 1e-12 && n.position.im.abs() <= r)
        })
    }

    #[test]
    fn relative_density_examples() {
        let z = integer_lattice(20);
        assert_eq!(z.relative_density(&[0.4, 0.6, 1.1]), Some(0.6));
        assert!(!density_scan(&z, 0.4) && density_scan(&z, 0.6));

        let mut nodes: Vec<Node> = (0..10)
            .map(|k| Node {
                index: k,
                position: Complex64::new(k as f64, 0.0),
            })
            .collect();
        nodes.push(Node {
            index: 10,
            position: Complex64::new(19.0, 0.0),
        });
        let gapped = NodeSequence::new(nodes, "gap", None).unwrap();
        assert_eq!(gapped.relative_density(&[0.5, 1.0, 2.0, 3.0]), None);

        let signed0 = make_family(&"signed:0.25:delta0=0".parse().unwrap(), 20).unwrap();
        assert_eq!(signed0.relative_density(&[0.5, 0.6, 0.75, 1.0]), Some(0.75));
        assert!(density_scan(&signed0, 0.625) && !density_scan(&signed0, 0.6));

        // δ_0 = 1 leaves a gap of 2 + d between λ_{-1} and λ_0.
        let signed1 = make_family(&"signed:0.25".parse().unwrap(), 20).unwrap();
        assert_eq!(
            signed1.relative_density(&[0.75, 1.0, 1.125, 1.5]),
            Some(1.125)
        );
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let seq = make_family(&"alternating:0.1".parse().unwrap(), 4).unwrap();
        let mut buf = Vec::new();
        seq.write_csv(&mut buf).unwrap();
        let back = NodeSequence::read_csv(buf.as_slice(), "x").unwrap();
        assert_eq!(back.nodes(), seq.nodes());

        let two = NodeSequence::read_csv("k,re,im\n1,1,0\n0,0,0\n".as_bytes(), "x").unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.nodes()[0].index, 0);
        assert!(matches!(
            NodeSequence::read_csv("k,re,im\n1,1,0\n1,2,0\n".as_bytes(), "x"),
            Err(Error::DuplicateIndex(1))
        ));
        assert!(matches!(
            NodeSequence::read_csv("k,re,im\n".as_bytes(), "x"),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(
            NodeSequence::read_csv("k,re,im\n0,NaN,0\n".as_bytes(), "x"),
            Err(Error::NonFinite(0))
        ));
        assert!(NodeSequence::read_csv("k,re,im\n0,abc,0\n".as_bytes(), "x").is_err());
        let sci = NodeSequence::read_csv("k,re,im\n0,1.5e-1,-2E0\n".as_bytes(), "x").unwrap();
        assert_eq!(sci.nodes()[0].position, Complex64::new(0.15, -2.0));
    }

    #[test]
    fn scaling_perturbation() {
        let seq = make_family(&"signed:0.2".parse().unwrap(), 8).unwrap();
        let half = seq.scale_perturbation(0.5).unwrap();
        assert!((half.node(3).unwrap().position.re - 3.1).abs() < 1e-15);
        assert!((half.node(0).unwrap().position.re - 0.5).abs() < 1e-15);
        assert_eq!(half.tail().unwrap().right, vec![0.1]);
        let zero = seq.scale_perturbation(0.0).unwrap();
        assert_eq!(positions(&zero), positions(&integer_lattice(8)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lattice_separation_is_one(k in 1u32..400) {
                prop_assert_eq!(integer_lattice(k).separation(), 1.0);
            }

            #[test]
            fn families_are_deterministic(d in -0.49f64..0.49, seed in 0u64..1000, k in 1u32..60) {
                for kind in [FamilyKind::ConstantShift, FamilyKind::Alternating, FamilyKind::Random] {
                    let spec = FamilySpec { kind, d, delta0: 1.0, seed };
                    let a = make_family(&spec, k).unwrap();
                    let b = make_family(&spec, k).unwrap();
                    prop_assert_eq!(a.nodes(), b.nodes());
                }
            }

            #[test]
            fn distance_vanishes_on_real_nodes(d in -0.45f64..0.45, k in -20i64..=20) {
                let seq = make_family(&FamilySpec::new(FamilyKind::Alternating, d), 20).unwrap();
                let x = seq.node(k).unwrap().position.re;
                prop_assert_eq!(seq.nearest_distance(x), 0.0);
            }

            #[test]
            fn small_perturbations_are_dense_at_scale_one(d in -0.49f64..0.49, seed in 0u64..50) {
                for kind in [FamilyKind::ConstantShift, FamilyKind::Alternating, FamilyKind::Random] {
                    let spec = FamilySpec { kind, d, delta0: 1.0, seed };
                    let seq = make_family(&spec, 30).unwrap();
                    let r0 = seq.relative_density(&[0.25, 0.5, 0.75, 1.0]);
                    prop_assert!(r0.is_some_and(|r| r <= 1.0));
                }
            }
        }
    }
}

//! Crossover thresholds, shape balancing and danger-zone optimisation.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{run_batched, BatchedCounts, FailureCounts, TrialConfig};
use crate::error::{Error, Result};
use crate::hrm::HrmParams;
use crate::noise::NoiseParams;
use crate::qpc::QpcShape;
use crate::rng::StreamKey;
use crate::stats::{linear_fit, percentile_sorted};

const BOOTSTRAP_TAG: u64 = 0xb007;

/// Parameters of the crossover search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    pub lo: f64,
    pub hi: f64,
    /// Points of the initial scan, endpoints included.
    pub coarse_points: usize,
    /// Bisection stops once the bracket is this narrow.
    pub tolerance: f64,
    pub bootstrap_resamples: usize,
}

impl ThresholdSearch {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let s = ThresholdSearch { lo, hi, coarse_points: 7, tolerance: 0.004, bootstrap_resamples: 200 };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi < 1.0) {
            return Err(Error::domain(format!(
                "search interval must satisfy 0 < lo < hi < 1, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.coarse_points < 2 || self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("search needs >= 2 coarse points and a positive tolerance"));
        }
        Ok(())
    }

    fn coarse_grid(&self) -> Vec<f64> {
        let k = self.coarse_points - 1;
        (0..=k).map(|i| self.lo + (self.hi - self.lo) * i as f64 / k as f64).collect()
    }
}

/// Crossover of the `p_e(xi)` curves of two consecutive ladder members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub shape_a: QpcShape,
    pub shape_b: QpcShape,
    /// `None` when the curves do not cross inside the interval.
    pub xi: Option<f64>,
    pub ci: Option<(f64, f64)>,
    /// The scan bracket in which the crossing was located.
    pub bracket: Option<(f64, f64)>,
    /// Evaluated `(xi, ln p_e(b) - ln p_e(a))` pairs in evaluation order.
    pub log_ratio: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub ladder: Vec<QpcShape>,
    pub delta: f64,
    pub crossovers: Vec<Crossover>,
    /// Crossover of the two largest ladder members.
    pub headline: Option<f64>,
    pub headline_ci: Option<(f64, f64)>,
}

/// Memoises batched Monte Carlo counts per `(shape, xi)` for one danger zone.
struct Evaluator {
    hrm: HrmParams,
    trials: u64,
    seed: u64,
    cache: HashMap<(QpcShape, u64), BatchedCounts>,
}

impl Evaluator {
    fn new(hrm: HrmParams, trials: u64, seed: u64) -> Self {
        Evaluator { hrm, trials, seed, cache: HashMap::new() }
    }

    fn counts(&mut self, shape: QpcShape, xi: f64) -> Result<&BatchedCounts> {
        let key = (shape, xi.to_bits());
        if !self.cache.contains_key(&key) {
            let config = TrialConfig::new(shape, NoiseParams::new(xi)?, self.hrm, self.trials, self.seed)?;
            self.cache.insert(key, run_batched(&config));
        }
        Ok(&self.cache[&key])
    }

    fn log_ratio(&mut self, a: QpcShape, b: QpcShape, xi: f64) -> Result<f64> {
        let pa = self.counts(a, xi)?.total().smoothed_p_e();
        let pb = self.counts(b, xi)?.total().smoothed_p_e();
        Ok(pb.ln() - pa.ln())
    }
}

fn resample<R: Rng>(counts: &BatchedCounts, rng: &mut R) -> FailureCounts {
    let k = counts.batches.len();
    (0..k).map(|_| counts.batches[rng.random_range(0..k)]).sum()
}

/// Root of the least-squares line through `(xi, d)` points; `None` unless rising.
fn line_root(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = linear_fit(&xs, &ys);
    (fit.slope > 0.0).then(|| -fit.intercept / fit.slope)
}

fn locate_crossover(
    eval: &mut Evaluator,
    search: &ThresholdSearch,
    a: QpcShape,
    b: QpcShape,
    bootstrap_key: StreamKey,
) -> Result<Crossover> {
    let mut log_ratio = Vec::new();
    let grid = search.coarse_grid();
    let mut d = Vec::with_capacity(grid.len());
    for &xi in &grid {
        let v = eval.log_ratio(a, b, xi)?;
        log_ratio.push((xi, v));
        d.push(v);
    }
    // below threshold the larger code wins (d < 0); take the first rise through zero
    let Some(i) = (0..grid.len() - 1).find(|&i| d[i] < 0.0 && d[i + 1] >= 0.0) else {
        return Ok(Crossover { shape_a: a, shape_b: b, xi: None, ci: None, bracket: None, log_ratio });
    };
    let bracket = (grid[i], grid[i + 1]);
    let (mut lo, mut hi) = bracket;
    let mut local = vec![(lo, d[i]), (hi, d[i + 1])];
    while hi - lo > search.tolerance {
        let mid = 0.5 * (lo + hi);
        let v = eval.log_ratio(a, b, mid)?;
        log_ratio.push((mid, v));
        local.push((mid, v));
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let clamp = |x: f64| x.clamp(bracket.0, bracket.1);
    let fallback = 0.5 * (lo + hi);
    let xi = line_root(&local).map(clamp).unwrap_or(fallback);

    let mut samples = Vec::with_capacity(search.bootstrap_resamples);
    for r in 0..search.bootstrap_resamples {
        let mut rng = bootstrap_key.child(r as u64).rng();
        let mut pts = Vec::with_capacity(local.len());
        for &(x, _) in &local {
            let pa = resample(eval.counts(a, x)?, &mut rng).smoothed_p_e();
            let pb = resample(eval.counts(b, x)?, &mut rng).smoothed_p_e();
            pts.push((x, pb.ln() - pa.ln()));
        }
        samples.push(line_root(&pts).map(clamp).unwrap_or(fallback));
    }
    samples.sort_by(f64::total_cmp);
    let ci = (!samples.is_empty()).then(|| (percentile_sorted(&samples, 0.025), percentile_sorted(&samples, 0.975)));
    Ok(Crossover { shape_a: a, shape_b: b, xi: Some(xi), ci, bracket: Some(bracket), log_ratio })
}

/// Locates the crossover of every consecutive pair of `shapes` (ordered small to large).
pub fn find_threshold(
    shapes: &[QpcShape],
    hrm: HrmParams,
    search: &ThresholdSearch,
    trials_per_point: u64,
    seed: u64,
) -> Result<ThresholdReport> {
    if shapes.len() < 2 {
        return Err(Error::invalid("threshold search needs at least two shapes"));
    }
    search.validate()?;
    if trials_per_point == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    let mut eval = Evaluator::new(hrm, trials_per_point, seed);
    let root = StreamKey::root(seed).child(BOOTSTRAP_TAG).child_f64(hrm.delta());
    let mut crossovers = Vec::with_capacity(shapes.len() - 1);
    for (k, pair) in shapes.windows(2).enumerate() {
        crossovers.push(locate_crossover(&mut eval, search, pair[0], pair[1], root.child(k as u64))?);
    }
    let last = crossovers.last().expect("at least one pair");
    Ok(ThresholdReport {
        ladder: shapes.to_vec(),
        delta: hrm.delta(),
        headline: last.xi,
        headline_ci: last.ci,
        crossovers,
    })
}

/// For each `n`, picks the block size `m` in `1..=m_max` whose logical X and Z error
/// rates are closest in ratio at the probe noise. Ties go to the smaller `m`.
pub fn balance_shapes(
    n_list: &[usize],
    xi_probe: f64,
    hrm: HrmParams,
    m_max: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<QpcShape>> {
    if n_list.is_empty() || m_max == 0 {
        return Err(Error::invalid("balancing needs a non-empty n list and m_max >= 1"));
    }
    let noise = NoiseParams::new(xi_probe)?;
    let mut ladder = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut best: Option<(f64, QpcShape)> = None;
        for m in 1..=m_max {
            let shape = QpcShape::new(n, m)?;
            let counts = run_batched(&TrialConfig::new(shape, noise, hrm, trials, seed)?).total();
            let imbalance = ((counts.x_errors as f64 + 0.5) / (counts.z_errors as f64 + 0.5)).ln().abs();
            if best.is_none_or(|(b, _)| imbalance < b) {
                best = Some((imbalance, shape));
            }
        }
        ladder.push(best.expect("m_max >= 1").1);
    }
    Ok(ladder)
}

/// How the code ladder is chosen for each danger zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LadderSpec {
    Fixed(Vec<QpcShape>),
    /// Re-balanced with [`balance_shapes`] at every danger zone.
    Auto {
        n_list: Vec<usize>,
        probe: f64,
        m_max: usize,
        trials: u64,
    },
}

impl LadderSpec {
    pub fn resolve(&self, hrm: HrmParams, seed: u64) -> Result<Vec<QpcShape>> {
        match self {
            LadderSpec::Fixed(shapes) => Ok(shapes.clone()),
            LadderSpec::Auto { n_list, probe, m_max, trials } => {
                balance_shapes(n_list, *probe, hrm, *m_max, *trials, seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaPoint {
    pub delta: f64,
    pub report: ThresholdReport,
}

impl DeltaPoint {
    pub fn threshold(&self) -> Option<f64> {
        self.report.headline
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaOptimization {
    pub points: Vec<DeltaPoint>,
    /// Refined optimum; equal to the best grid point when no refinement applies.
    pub delta_star: f64,
    pub threshold: Option<f64>,
    /// Full report at `delta_star` when it differs from every grid point.
    pub refined: Option<ThresholdReport>,
}

/// Vertex of the parabola through three points, if it opens downward.
fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> Option<f64> {
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return None;
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    (a < 0.0).then(|| -b / (2.0 * a))
}

/// Runs the threshold search at every grid danger zone and returns the best,
/// refined by a parabola through the best point and its neighbours.
pub fn optimize_delta(
    ladder: &LadderSpec,
    delta_grid: &[f64],
    search: &ThresholdSearch,
    trials: u64,
    seed: u64,
) -> Result<DeltaOptimization> {
    if delta_grid.is_empty() {
        return Err(Error::invalid("delta grid is empty"));
    }
    let run = |delta: f64| -> Result<DeltaPoint> {
        let hrm = HrmParams::new(delta)?;
        let shapes = ladder.resolve(hrm, seed)?;
        Ok(DeltaPoint { delta, report: find_threshold(&shapes, hrm, search, trials, seed)? })
    };
    let points = delta_grid.iter().map(|&d| run(d)).collect::<Result<Vec<_>>>()?;

    let best =
        points.iter().enumerate().filter_map(|(i, p)| p.threshold().map(|t| (i, t))).max_by(|a, b| a.1.total_cmp(&b.1));
    let Some((i, best_t)) = best else {
        return Ok(DeltaOptimization { delta_star: points[0].delta, threshold: None, refined: None, points });
    };
    let mut out =
        DeltaOptimization { delta_star: points[i].delta, threshold: Some(best_t), refined: None, points: vec![] };
    if i > 0 && i + 1 < points.len() {
        let (l, r) = (&points[i - 1], &points[i + 1]);
        if let (Some(tl), Some(tr)) = (l.threshold(), r.threshold()) {
            if let Some(v) = parabola_vertex((l.delta, tl), (points[i].delta, best_t), (r.delta, tr)) {
                let v = v.clamp(l.delta, r.delta);
                if v != points[i].delta {
                    let refined = run(v)?;
                    if let Some(t) = refined.threshold() {
                        out.delta_star = v;
                        out.threshold = Some(t);
                        out.refined = Some(refined.report);
                    }
                }
            }
        }
    }
    out.points = points;
    Ok(out)
}

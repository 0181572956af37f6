//! The staged sampling pipeline: distance-scale sampling plans, the rough
//! MST-weight estimator, approximate wavefront rounds, and the doubling
//! driver producing a (1+eps)-approximate crossing MST.

use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::arrangement::{build_arrangement, Arrangement};
use crate::error::{Error, Result};
use crate::forest::SpanningForest;
use crate::geometry::{side, Instance, Point, SignTable};
use crate::mst_exact::bounded_spanning_forest_on;
use crate::seed;

/// Knobs of the sampling pipeline. The defaults are desk-scale values tuned
/// so that sampling actually occurs at a few hundred points; the proof-scale
/// constants would make every sampling probability clamp to one.
#[derive(Debug, Clone)]
pub struct SamplingConfig {
    /// Approximation parameter, in (0, 1].
    pub eps: f64,
    /// Multiplier in the per-line sampling probability `c_samp ln n / (l eps^2)`.
    pub c_samp: f64,
    /// Divisor constant in the starting scale `l_0`.
    pub c_short: f64,
    /// Propagation-depth multiplier; depth is `(c_prop / c_samp) * rho`.
    pub c_prop: f64,
    /// Estimator threshold constant (budgets and the additive term of M).
    pub c_est: f64,
    /// Stand-in for the inverse Ackermann function.
    pub alpha_fn: f64,
    /// Estimator repetitions; `None` means `ceil(2 log2 n)`.
    pub est_repeats: Option<usize>,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        assert!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
        SamplingConfig {
            eps,
            c_samp: 2.0,
            c_short: 1.0,
            c_prop: 4.0,
            c_est: 2.0,
            alpha_fn: 3.0,
            est_repeats: None,
            seed,
        }
    }

    pub fn est_repeats_for(&self, n: usize) -> usize {
        self.est_repeats
            .unwrap_or_else(|| (2.0 * (n.max(2) as f64).log2()).ceil() as usize)
    }
}

/// Natural log of the point count, floored at ln 2 so thresholds never
/// vanish on tiny instances.
fn ln_pts(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

/// Per-line sampling probability at distance scale `l`, clamped to 1.
pub fn sampling_probability(cfg: &SamplingConfig, n_points: usize, l: f64) -> f64 {
    (cfg.c_samp * ln_pts(n_points) / (l * cfg.eps * cfg.eps)).min(1.0)
}

/// A sampled line subset at one distance scale.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub l: f64,
    pub eps: f64,
    /// Per-line inclusion probability.
    pub nu: f64,
    /// Expected sampled distance of a pair at true distance `l`.
    pub rho: f64,
    /// Sampled line ids, sorted.
    pub subset: Vec<u32>,
}

/// Draws a Bernoulli(nu) subset of the lines, deterministically in
/// (`cfg.seed`, `l`).
pub fn make_sample(inst: &Instance, cfg: &SamplingConfig, l: f64) -> SamplePlan {
    assert!(l >= 1.0, "distance scale must be at least 1");
    let nu = sampling_probability(cfg, inst.n_points(), l);
    let mut rng = seed::stream(cfg.seed, "make-sample", l.to_bits());
    let subset: Vec<u32> = (0..inst.n_hyperplanes() as u32)
        .filter(|_| rand::Rng::gen_bool(&mut rng, nu))
        .collect();
    SamplePlan { l, eps: cfg.eps, nu, rho: nu * l, subset }
}

/// Rescaled sampled distance `D_R(p, q) / (nu (1 - eps/4))`. For pairs at
/// true distance at least `l` this lands in `[D_L, (1+eps) D_L]` with high
/// probability.
pub fn scaled_distance_estimate(
    inst: &Instance,
    plan: &SamplePlan,
    p: &Point,
    q: &Point,
) -> Result<f64> {
    let mut d = 0u64;
    for &id in &plan.subset {
        let h = &inst.hyperplanes[id as usize];
        if side(h, p)? != side(h, q)? {
            d += 1;
        }
    }
    Ok(d as f64 / (plan.nu * (1.0 - plan.eps / 4.0)))
}

/// Budgeted exact MST of the points under a line subset. `Ok(weight)` when
/// the arrangement build stays within the cell budget, `Err(())` when the
/// budget trips (the "weight is large" verdict).
fn budgeted_subset_mst(
    inst: &Instance,
    subset: &[u32],
    budget: usize,
) -> Result<std::result::Result<u64, ()>> {
    let mut forest = SpanningForest::new(inst.n_points());
    let arr = match build_arrangement(inst, subset, Some(budget)) {
        Ok(arr) => arr,
        Err(Error::BudgetExceeded { .. }) => return Ok(Err(())),
        Err(e) => return Err(e),
    };
    let signs = SignTable::build(inst)?;
    bounded_spanning_forest_on(inst, &signs, &arr, u32::MAX, &mut forest)?;
    debug_assert!(forest.is_spanning());
    Ok(Ok(forest.total_weight()))
}

/// Rough upper estimate M of the optimal crossing-MST weight.
///
/// Geometric descent over sampling rates m, m/2, m/4, ...: at each rate,
/// several Bernoulli samples get a cell-budgeted exact MST; any budget trip
/// marks the rate "large". The first all-small rate yields
/// `M = (m / rate) (c_est n ln n + 2 min_j W(P, R_j))`, the sampled upper
/// bound on the true weight. W_opt <= M with high probability and M stays
/// within a polylog factor of W_opt + n.
pub fn estimate_weight_rough(inst: &Instance, cfg: &SamplingConfig) -> Result<f64> {
    let n = inst.n_points();
    let m = inst.n_hyperplanes();
    assert!(n >= 2, "estimator needs at least two points");
    assert!(m >= 1, "estimator needs at least one line");
    let ln_n = ln_pts(n);
    let repeats = cfg.est_repeats_for(n);

    let mut rate = m as f64;
    for descent in 0u64.. {
        let prob = (rate / m as f64).min(1.0);
        let runs = if prob >= 1.0 { 1 } else { repeats };
        let mut all_small = true;
        let mut best: Option<u64> = None;
        for j in 0..runs {
            let mut rng = seed::stream(cfg.seed, "estimator", (descent << 32) | j as u64);
            let subset: Vec<u32> = (0..m as u32)
                .filter(|_| rand::Rng::gen_bool(&mut rng, prob))
                .collect();
            let budget =
                (cfg.c_est * (subset.len() + n) as f64 * ln_n).ceil().max(2.0) as usize;
            match budgeted_subset_mst(inst, &subset, budget)? {
                Ok(w) => best = Some(best.map_or(w, |b| b.min(w))),
                Err(()) => {
                    all_small = false;
                    break;
                }
            }
        }
        if all_small {
            let w = best.expect("at least one run completed") as f64;
            return Ok((m as f64 / rate) * (cfg.c_est * n as f64 * ln_n + 2.0 * w));
        }
        rate /= 2.0;
    }
    unreachable!("rates descend until the sampled arrangement is trivially cheap")
}

/// Per-stage trace of the approximation driver.
#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub l: f64,
    pub nu: f64,
    pub sample_size: usize,
    pub depth: u32,
    pub edges_added: usize,
    pub exact_fallback: bool,
}

/// One approximate wavefront round at scale `l`: sample lines, propagate
/// exactly in the sampled arrangement, record every added edge with its true
/// full-set crossing distance.
pub fn propagate_approx_wavefront(
    inst: &Instance,
    cfg: &SamplingConfig,
    l: f64,
    forest: &mut SpanningForest,
) -> Result<StageReport> {
    let signs = SignTable::build(inst)?;
    let mut cache = ArrangementCache::default();
    stage_with(inst, &signs, &mut cache, cfg, l, forest)
}

#[derive(Default)]
struct ArrangementCache {
    map: HashMap<Vec<u32>, Rc<Arrangement>>,
}

impl ArrangementCache {
    fn get(&mut self, inst: &Instance, subset: &[u32]) -> Result<Rc<Arrangement>> {
        if let Some(arr) = self.map.get(subset) {
            return Ok(Rc::clone(arr));
        }
        let arr = Rc::new(build_arrangement(inst, subset, None)?);
        self.map.insert(subset.to_vec(), Rc::clone(&arr));
        Ok(arr)
    }
}

/// Propagation depth for a plan: `(c_prop / c_samp) * rho`, which equals the
/// nominal `c_prop ln n / eps^2` whenever sampling is real (nu < 1) and
/// shrinks to `(c_prop / c_samp) * l` when the probability clamps, keeping
/// early stages short-range so the stage-0 weight budget holds.
fn stage_depth(cfg: &SamplingConfig, plan: &SamplePlan) -> u32 {
    ((cfg.c_prop / cfg.c_samp) * plan.rho).ceil().max(1.0) as u32
}

fn stage_with(
    inst: &Instance,
    signs: &SignTable,
    cache: &mut ArrangementCache,
    cfg: &SamplingConfig,
    l: f64,
    forest: &mut SpanningForest,
) -> Result<StageReport> {
    let plan = make_sample(inst, cfg, l);
    let depth = stage_depth(cfg, &plan);
    let mut report = StageReport {
        l,
        nu: plan.nu,
        sample_size: plan.subset.len(),
        depth,
        edges_added: 0,
        exact_fallback: false,
    };
    if forest.is_spanning() {
        return Ok(report);
    }
    let arr = cache.get(inst, &plan.subset)?;
    let added = bounded_spanning_forest_on(inst, signs, &arr, depth, forest)?;
    report.edges_added = added.len();
    // Rewrite sampled-subset weights to true crossing distances.
    for idx in added {
        let e = forest.edges[idx];
        forest.edges[idx].weight = signs.distance(e.a as usize, e.b as usize);
    }
    Ok(report)
}

/// Result of the approximation driver.
#[derive(Debug, Clone)]
pub struct ApproxMst {
    pub forest: SpanningForest,
    /// Rough weight estimate M the schedule started from.
    pub rough_estimate: f64,
    /// Starting distance scale.
    pub l0: f64,
    pub stages: Vec<StageReport>,
}

impl ApproxMst {
    pub fn weight(&self) -> u64 {
        self.forest.total_weight()
    }
}

/// The staged approximation driver: estimate the weight roughly, start at
/// `l_0 = max(eps M / (c_short n alpha ln^2 n), 1)`, and run approximate
/// wavefront rounds with doubling scales until the forest spans. Scales
/// beyond the line count trigger one exact full-set round, so a spanning
/// tree is returned regardless of sampling luck. Edge weights are true
/// crossing distances.
pub fn approx_mst(inst: &Instance, cfg: &SamplingConfig) -> Result<ApproxMst> {
    let n = inst.n_points();
    let m = inst.n_hyperplanes();
    let mut forest = SpanningForest::new(n);
    let mut stages = Vec::new();

    if n <= 1 {
        return Ok(ApproxMst { forest, rough_estimate: 0.0, l0: 1.0, stages });
    }
    if m == 0 {
        for b in 1..n as u32 {
            forest.try_add_edge(0, b, 0);
        }
        return Ok(ApproxMst { forest, rough_estimate: 0.0, l0: 1.0, stages });
    }

    let rough = estimate_weight_rough(inst, cfg)?;
    let ln_n = ln_pts(n);
    let l0 = (cfg.eps * rough / (cfg.c_short * n as f64 * cfg.alpha_fn * ln_n * ln_n)).max(1.0);

    let signs = SignTable::build(inst)?;
    let mut cache = ArrangementCache::default();
    let mut l = l0;
    loop {
        let report = stage_with(inst, &signs, &mut cache, cfg, l, &mut forest)?;
        stages.push(report);
        if forest.is_spanning() {
            break;
        }
        l *= 2.0;
        if l > m as f64 {
            // Termination guard: one exact full-set round. Distances never
            // exceed m, so radius ceil(m/2) connects everything.
            let all: Vec<u32> = (0..m as u32).collect();
            let arr = cache.get(inst, &all)?;
            let radius = (m as u32).div_ceil(2);
            let added = bounded_spanning_forest_on(inst, &signs, &arr, radius, &mut forest)?;
            for idx in &added {
                let e = forest.edges[*idx];
                forest.edges[*idx].weight = signs.distance(e.a as usize, e.b as usize);
            }
            stages.push(StageReport {
                l,
                nu: 1.0,
                sample_size: m,
                depth: radius,
                edges_added: added.len(),
                exact_fallback: true,
            });
            break;
        }
    }
    assert!(forest.is_spanning(), "driver must return a spanning tree");
    assert_eq!(forest.edges.len(), n - 1);
    Ok(ApproxMst { forest, rough_estimate: rough, l0, stages })
}

//! Embedding of the crossing metric into Hamming space: with-replacement
//! line subsets, hashed cell labels, near/far gap thresholds, and binary
//! codes.
//!
//! Each of `mu` coordinates draws `k` lines with replacement; a point's
//! label in that coordinate is a random-weighted sum of its sign bits over
//! the drawn lines. Two points get different labels in a coordinate exactly
//! when some drawn line separates them (up to a 2^-64 hash collision, which
//! is checked for and treated as a hard error). Label Hamming distance then
//! concentrates around mu * U(D/m), separating pairs at distance <= r from
//! pairs at distance >= (1+eps) r.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{subset_mask, Instance, SignTable, SignVector};
use crate::seed;

/// Knobs of the embedding family.
#[derive(Debug, Clone)]
pub struct EmbeddingConfig {
    /// C in `mu = C ln n / (z alpha^2)`.
    pub c_embed: f64,
    /// Bits per label coordinate in the binary expansion; `None` means
    /// `ceil(2 ln n)`.
    pub binary_reps: Option<usize>,
    pub seed: u64,
}

impl EmbeddingConfig {
    pub fn new(seed: u64) -> Self {
        EmbeddingConfig { c_embed: 1.0, binary_reps: None, seed }
    }
}

/// Parameters of one embedding at distance threshold `r`.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSpec {
    pub r: u64,
    pub eps: f64,
    pub n_points: usize,
    /// Real line count.
    pub m_real: usize,
    /// Effective line count after fictitious padding (keeps m/r >= ln n);
    /// draws landing on fictitious lines separate nothing.
    pub m_eff: usize,
    /// Accuracy knob, 1 / ln n.
    pub alpha: f64,
    /// Lines drawn per subset, with replacement.
    pub k: usize,
    /// Separation probability of a pair at distance exactly r.
    pub z_near: f64,
    /// Separation probability of a pair at distance (1+eps) r.
    pub z_far: f64,
    /// Number of subsets (label coordinates).
    pub mu: usize,
    /// Bits per label coordinate in the binary code.
    pub binary_reps: usize,
    /// Near verdict cutoff: z (1+alpha) mu.
    pub near_threshold: f64,
    /// Far verdict cutoff: Z (1-alpha) mu.
    pub far_threshold: f64,
    pub seed: u64,
}

impl EmbeddingSpec {
    /// Total binary code length.
    pub fn code_len(&self) -> usize {
        self.mu * self.binary_reps
    }
}

fn ln_pts(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

/// Probability that a with-replacement sample of `k` lines separates a pair
/// whose normalized distance is `rho`: exactly `1 - (1 - rho)^k`.
pub fn separation_probability(rho: &BigRational, k: usize) -> BigRational {
    assert!(k >= 1);
    assert!(!rho.is_negative() && *rho <= BigRational::one());
    let miss = BigRational::one() - rho;
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= &miss;
    }
    BigRational::one() - acc
}

fn ratio(num: u64, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den as u64))
}

fn compute_spec(
    inst: &Instance,
    r: u64,
    eps: f64,
    cfg: &EmbeddingConfig,
) -> EmbeddingSpec {
    let n = inst.n_points();
    let m = inst.n_hyperplanes();
    assert!(r >= 1 && r as usize <= m, "threshold must satisfy 1 <= r <= m");
    let ln_n = ln_pts(n);
    let alpha = 1.0 / ln_n;
    let m_eff = m.max((r as f64 * ln_n).ceil() as usize);
    let k = ((alpha * m_eff as f64) / r as f64).ceil().max(1.0) as usize;

    let z_near_rat = separation_probability(&ratio(r, m_eff), k);
    let one = BigRational::one();
    let eps_rat = BigRational::from_float(eps).expect("eps is finite");
    let mut rho_far = ratio(r, m_eff) * (&one + &eps_rat);
    if rho_far > one {
        rho_far = BigRational::one();
    }
    let z_far_rat = separation_probability(&rho_far, k);

    let z_near = rational_to_f64(&z_near_rat);
    let z_far = rational_to_f64(&z_far_rat);
    let mu = (cfg.c_embed * ln_n / (z_near * alpha * alpha)).ceil().max(1.0) as usize;
    let binary_reps = cfg
        .binary_reps
        .unwrap_or_else(|| (2.0 * ln_n).ceil().max(1.0) as usize);

    EmbeddingSpec {
        r,
        eps,
        n_points: n,
        m_real: m,
        m_eff,
        alpha,
        k,
        z_near,
        z_far,
        mu,
        binary_reps,
        near_threshold: z_near * (1.0 + alpha) * mu as f64,
        far_threshold: z_far * (1.0 - alpha) * mu as f64,
        seed: cfg.seed,
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

/// Plans an embedding for threshold `r`. Fails with `GapDegenerate` when the
/// parameters leave no usable near/far gap (far separation probability at
/// least one half, or thresholds out of order).
pub fn plan_embedding(
    inst: &Instance,
    r: u64,
    eps: f64,
    cfg: &EmbeddingConfig,
) -> Result<EmbeddingSpec> {
    let spec = compute_spec(inst, r, eps, cfg);
    if spec.z_far >= 0.5 || spec.far_threshold <= spec.near_threshold {
        return Err(Error::GapDegenerate {
            z: spec.z_near,
            z_far: spec.z_far,
            alpha: spec.alpha,
        });
    }
    Ok(spec)
}

/// Same computation without the gap validation. The ANN threshold ladder
/// keeps rungs whose formal gap margin degenerates at small n, compensating
/// with midpoint acceptance; classification quality there is measured, not
/// promised.
pub fn plan_embedding_any(
    inst: &Instance,
    r: u64,
    eps: f64,
    cfg: &EmbeddingConfig,
) -> EmbeddingSpec {
    compute_spec(inst, r, eps, cfg)
}

/// Labels and binary codes for every point of an instance.
#[derive(Debug, Clone)]
pub struct EmbeddedPoints {
    pub spec: EmbeddingSpec,
    /// The drawn line ids per subset, in draw order, fictitious draws
    /// removed. Duplicates are legal (with-replacement sampling).
    pub subsets: Vec<Vec<u32>>,
    /// Row-major point labels: `labels[point][coordinate]`.
    pub labels: Vec<Vec<u64>>,
    /// Binary codes, `mu * binary_reps` bits per point.
    pub binary: Vec<SignVector>,
}

/// Weighted-sum labels of all points for one subset: the label of a point is
/// the wrapping sum of weights of the drawn lines on whose positive side it
/// lies. `subset_sorted` and `weights` run in lockstep.
pub(crate) fn labels_for_subset(
    signs: &SignTable,
    subset_sorted: &[u32],
    weights: &[u64],
) -> Vec<u64> {
    debug_assert_eq!(subset_sorted.len(), weights.len());
    signs
        .rows
        .iter()
        .map(|row| {
            let mut acc = 0u64;
            for (&id, &w) in subset_sorted.iter().zip(weights) {
                if row.get(id as usize) {
                    acc = acc.wrapping_add(w);
                }
            }
            acc
        })
        .collect()
}

fn hash_bit(label: u64, key: u64) -> bool {
    let mut z = label ^ key;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) >> 63 == 1
}

/// Draws the subsets and computes all labels and binary codes. Labels are
/// verified collision-free within every coordinate: points with different
/// sign patterns on a subset must get different labels.
pub fn embed_points(inst: &Instance, spec: &EmbeddingSpec) -> Result<EmbeddedPoints> {
    let signs = SignTable::build(inst)?;
    embed_points_with(&signs, spec)
}

/// [`embed_points`] over a prebuilt sign table.
pub fn embed_points_with(signs: &SignTable, spec: &EmbeddingSpec) -> Result<EmbeddedPoints> {
    let n = signs.rows.len();
    let m = signs.m;
    let mut subsets = Vec::with_capacity(spec.mu);
    let mut labels: Vec<Vec<u64>> = vec![Vec::with_capacity(spec.mu); n];

    for j in 0..spec.mu {
        let mut draw_rng = seed::stream(spec.seed, "embed-subset", j as u64);
        let mut drawn: Vec<u32> = Vec::with_capacity(spec.k);
        for _ in 0..spec.k {
            let idx = rand::Rng::gen_range(&mut draw_rng, 0..spec.m_eff as u64);
            if (idx as usize) < m {
                drawn.push(idx as u32);
            }
        }
        let mut distinct = drawn.clone();
        distinct.sort_unstable();
        distinct.dedup();
        // Odd weights: a single differing line always flips the label.
        let mut weight_rng = seed::stream(spec.seed, "embed-weights", j as u64);
        let weights: Vec<u64> = distinct.iter().map(|_| weight_rng.next_u64() | 1).collect();
        let coord = labels_for_subset(signs, &distinct, &weights);

        // Hash-label soundness: equal labels must mean equal patterns.
        let mask = subset_mask(m, &distinct);
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by_key(|&p| coord[p as usize]);
        for w in order.windows(2) {
            let (p, q) = (w[0] as usize, w[1] as usize);
            if coord[p] == coord[q] && signs.rows[p].hamming_masked(&signs.rows[q], &mask) != 0 {
                return Err(Error::LabelCollision { coordinate: j });
            }
        }

        for (p, row) in labels.iter_mut().enumerate() {
            row.push(coord[p]);
        }
        subsets.push(drawn);
    }

    let code_len = spec.code_len();
    let mut binary = Vec::with_capacity(n);
    for row in &labels {
        let mut code = SignVector::zeros(code_len);
        for (j, &label) in row.iter().enumerate() {
            for t in 0..spec.binary_reps {
                let key =
                    seed::derive_key(spec.seed, "embed-binary", ((j as u64) << 16) | t as u64);
                code.set(j * spec.binary_reps + t, hash_bit(label, key));
            }
        }
        binary.push(code);
    }

    Ok(EmbeddedPoints { spec: spec.clone(), subsets, labels, binary })
}

impl EmbeddedPoints {
    /// Number of label coordinates where points `i` and `j` disagree.
    pub fn label_hamming(&self, i: usize, j: usize) -> usize {
        self.labels[i]
            .iter()
            .zip(&self.labels[j])
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Hamming distance between the binary codes of points `i` and `j`.
    pub fn binary_hamming(&self, i: usize, j: usize) -> u64 {
        self.binary[i].hamming(&self.binary[j])
    }
}

/// Verdict of the gap test for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Near,
    Far,
    Indeterminate,
}

/// Classifies a pair by its label Hamming distance against the planned
/// thresholds: Near below `z (1+alpha) mu`, Far above `Z (1-alpha) mu`.
pub fn classify_pair(e: &EmbeddedPoints, i: usize, j: usize) -> PairClass {
    let x = e.label_hamming(i, j) as f64;
    if x <= e.spec.near_threshold {
        PairClass::Near
    } else if x >= e.spec.far_threshold {
        PairClass::Far
    } else {
        PairClass::Indeterminate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::build_arrangement;
    use crate::geometry::{generate_instance, Hyperplane, Point};

    fn vline(x: i64) -> Hyperplane {
        Hyperplane::new(vec![1, 0], -x)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn separation_probability_exact_values() {
        assert_eq!(separation_probability(&rat(0, 1), 5), rat(0, 1));
        assert_eq!(separation_probability(&rat(1, 1), 3), rat(1, 1));
        assert_eq!(separation_probability(&rat(1, 2), 1), rat(1, 2));
        // 1 - (1 - 16/256)^3 = 721/4096.
        assert_eq!(separation_probability(&rat(16, 256), 3), rat(721, 4096));
    }

    /// Instance with m vertical lines at x = 2, 4, ..., 2m and points on a
    /// horizontal row, so pair distances are exact line counts.
    fn comb_instance(n: usize, m: usize) -> Instance {
        let lines: Vec<Hyperplane> = (1..=m as i64).map(|i| vline(2 * i)).collect();
        let points: Vec<Point> = (0..n as i64)
            .map(|i| Point::new(vec![2 * i + 1, 0]))
            .collect();
        Instance::new(2, points, lines, 0).unwrap()
    }

    #[test]
    fn plan_matches_frozen_values_at_256() {
        let inst = comb_instance(256, 256);
        let cfg = EmbeddingConfig::new(5);
        let spec = plan_embedding(&inst, 16, 0.5, &cfg).unwrap();
        assert_eq!(spec.m_eff, 256);
        assert_eq!(spec.k, 3);
        let z_exact = rational_to_f64(&rat(721, 4096));
        assert!((spec.z_near - z_exact).abs() < 1e-12);
        assert!(spec.near_threshold < spec.far_threshold);
        // Deterministic planning.
        let again = plan_embedding(&inst, 16, 0.5, &cfg).unwrap();
        assert_eq!(spec.mu, again.mu);
        assert_eq!(spec.near_threshold, again.near_threshold);
    }

    #[test]
    fn plan_boundary_r_equals_m() {
        // r = m forces fictitious padding; with ln n > 3 the gap survives.
        let inst = comb_instance(30, 12);
        let cfg = EmbeddingConfig::new(6);
        match plan_embedding(&inst, 12, 1.0, &cfg) {
            Ok(spec) => {
                assert!(spec.m_eff >= (12.0 * ln_pts(30)) as usize);
                assert!(spec.k >= 1);
                assert!(spec.z_far < 0.5);
            }
            Err(Error::GapDegenerate { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn single_line_labels_are_weight_or_zero() {
        let inst = comb_instance(4, 1);
        let signs = SignTable::build(&inst).unwrap();
        let labels = labels_for_subset(&signs, &[0], &[7]);
        // Point 0 at x=1 is left of x=2 (negative side); the rest are right.
        assert_eq!(labels, vec![0, 7, 7, 7]);
    }

    #[test]
    fn identical_points_embed_identically() {
        let mut points: Vec<Point> =
            (0..4).map(|i| Point::new(vec![2 * i + 1, 0])).collect();
        points.push(points[1].clone());
        let inst =
            Instance::new(2, points, (1..=4).map(|i| vline(2 * i)).collect(), 0).unwrap();
        let cfg = EmbeddingConfig::new(8);
        let spec = plan_embedding_any(&inst, 2, 0.5, &cfg);
        let e = embed_points(&inst, &spec).unwrap();
        assert_eq!(e.labels[1], e.labels[4]);
        assert_eq!(e.binary[1], e.binary[4]);
        assert_eq!(e.label_hamming(1, 4), 0);
        assert_eq!(e.binary_hamming(1, 4), 0);
        assert_eq!(classify_pair(&e, 1, 4), PairClass::Near);
    }

    #[test]
    fn label_hamming_matches_pattern_oracle() {
        let inst = generate_instance(2, 20, 24, 400, 17).unwrap();
        let signs = SignTable::build(&inst).unwrap();
        let cfg = EmbeddingConfig::new(9);
        let spec = plan_embedding_any(&inst, 4, 0.5, &cfg);
        let e = embed_points(&inst, &spec).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let oracle: usize = e
                    .subsets
                    .iter()
                    .filter(|s| {
                        let mut distinct = (*s).clone();
                        distinct.sort_unstable();
                        distinct.dedup();
                        let mask = subset_mask(24, &distinct);
                        signs.rows[i].hamming_masked(&signs.rows[j], &mask) != 0
                    })
                    .count();
                assert_eq!(e.label_hamming(i, j), oracle);
            }
        }
    }

    #[test]
    fn fully_separated_pair_differs_everywhere() {
        // Points 0 and n-1 of the comb are separated by every line; without
        // fictitious padding every subset is nonempty, so labels differ in
        // every coordinate.
        let inst = comb_instance(40, 16);
        let cfg = EmbeddingConfig::new(10);
        let spec = plan_embedding_any(&inst, 4, 0.5, &cfg);
        assert_eq!(spec.m_eff, 16);
        let e = embed_points(&inst, &spec).unwrap();
        assert_eq!(e.label_hamming(0, 39), spec.mu);
        assert_eq!(classify_pair(&e, 0, 39), PairClass::Far);
    }

    #[test]
    fn planted_pairs_classify_correctly_across_seeds() {
        // Comb points i, j are separated by exactly j - i lines, so point 24
        // sits at distance 24 = 1.5 * 16 from point 0 (a boundary far pair)
        // and point 12 at distance 12 <= 16 (a near pair).
        let inst = comb_instance(256, 256);
        let mut far_good = 0;
        let mut near_good = 0;
        for s in 0..50u64 {
            let cfg = EmbeddingConfig::new(900 + s);
            let spec = plan_embedding(&inst, 16, 0.5, &cfg).unwrap();
            let e = embed_points(&inst, &spec).unwrap();
            if classify_pair(&e, 0, 24) == PairClass::Far {
                far_good += 1;
            }
            if classify_pair(&e, 0, 12) == PairClass::Near {
                near_good += 1;
            }
        }
        assert!(far_good >= 45, "far pair misclassified too often: {far_good}/50");
        assert!(near_good >= 45, "near pair misclassified too often: {near_good}/50");
    }

    #[test]
    fn binary_expansion_halves_label_distance() {
        let inst = comb_instance(64, 64);
        let mut coin_total = 0u64;
        let mut binary_total = 0u64;
        for s in 0..60u64 {
            let cfg = EmbeddingConfig::new(2000 + s);
            let spec = plan_embedding_any(&inst, 8, 0.5, &cfg);
            let e = embed_points(&inst, &spec).unwrap();
            let x = e.label_hamming(0, 5) as u64;
            coin_total += x * spec.binary_reps as u64;
            binary_total += e.binary_hamming(0, 5);
        }
        let mean = coin_total as f64 / 2.0;
        let sd = (coin_total as f64).sqrt() / 2.0;
        assert!(
            (binary_total as f64 - mean).abs() <= 4.0 * sd,
            "binary distance {binary_total} far from {mean} (sd {sd})"
        );
    }

    #[test]
    fn empirical_separation_matches_closed_form() {
        // One fixed pair, 2000 subset draws, frequency within 4 binomial SDs.
        let inst = comb_instance(64, 64);
        let signs = SignTable::build(&inst).unwrap();
        let d = signs.distance(0, 5); // 10 lines apart
        let k = 6usize;
        let trials = 2000u64;
        let mut separated = 0u64;
        for t in 0..trials {
            let mut rng = seed::stream(31, "separation-trial", t);
            let hit = (0..k).any(|_| {
                let idx = rand::Rng::gen_range(&mut rng, 0..64u64);
                signs.rows[0].get(idx as usize) != signs.rows[5].get(idx as usize)
            });
            if hit {
                separated += 1;
            }
        }
        let u = rational_to_f64(&separation_probability(&rat(d as i64, 64), k));
        let sd = (u * (1.0 - u) / trials as f64).sqrt();
        let freq = separated as f64 / trials as f64;
        assert!(
            (freq - u).abs() <= 4.0 * sd,
            "frequency {freq} vs U {u} (sd {sd})"
        );
    }

    #[test]
    fn labels_partition_like_located_faces() {
        // Dimension universality in the plane: hashed labels induce the same
        // partition as face location on the same subset.
        let inst = generate_instance(2, 25, 18, 300, 23).unwrap();
        let signs = SignTable::build(&inst).unwrap();
        let cfg = EmbeddingConfig::new(12);
        let spec = plan_embedding_any(&inst, 3, 0.5, &cfg);
        let e = embed_points(&inst, &spec).unwrap();
        for (j, drawn) in e.subsets.iter().enumerate().take(40) {
            let mut distinct = drawn.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let arr = build_arrangement(&inst, &distinct, None).unwrap();
            for a in 0..inst.n_points() {
                for b in 0..inst.n_points() {
                    let same_label = e.labels[a][j] == e.labels[b][j];
                    let same_face =
                        arr.locate(&inst.points[a]).unwrap() == arr.locate(&inst.points[b]).unwrap();
                    assert_eq!(same_label, same_face);
                }
            }
        }
        let _ = signs;
    }

    #[test]
    fn embedding_works_in_three_dimensions() {
        let inst = generate_instance(3, 30, 30, 60, 29).unwrap();
        let cfg = EmbeddingConfig::new(13);
        let spec = plan_embedding_any(&inst, 4, 0.5, &cfg);
        let e = embed_points(&inst, &spec).unwrap();
        assert_eq!(e.labels.len(), 30);
        let signs = SignTable::build(&inst).unwrap();
        // Same-pattern pairs agree everywhere.
        for i in 0..30 {
            for j in 0..30 {
                if signs.distance(i, j) == 0 {
                    assert_eq!(e.label_hamming(i, j), 0);
                }
            }
        }
    }
}

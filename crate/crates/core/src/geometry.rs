//! Exact geometric primitives: points, hyperplanes, instances, sign vectors,
//! and the crossing-distance oracle.
//!
//! All predicates are evaluated in exact integer arithmetic. Coordinates are
//! capped so that every dot product fits comfortably in an `i128`; there is
//! no floating point anywhere in a predicate.

use crate::error::{Error, Result};
use crate::seed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Cap on point coordinate magnitudes.
pub const POINT_COORD_CAP: i64 = 1 << 30;
/// Cap on hyperplane normal entries. Lines through pairs of lattice points
/// have normal entries up to twice the point cap.
pub const NORMAL_CAP: i64 = 1 << 31;
/// Cap on hyperplane offsets (a lattice line offset is at most 4 * cap^2).
pub const OFFSET_CAP: i64 = 1 << 62;

/// Maximum rejection resamples per generated point or hyperplane.
const MAX_RESAMPLES: usize = 1000;

/// A point with exact integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<i64>,
}

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// The locus `normal . x + offset = 0`. The `id` is the hyperplane's index
/// in its instance and is assigned on validation, not serialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperplane {
    pub normal: Vec<i64>,
    pub offset: i64,
    #[serde(skip)]
    pub id: u32,
}

impl Hyperplane {
    pub fn new(normal: Vec<i64>, offset: i64) -> Self {
        Hyperplane { normal, offset, id: 0 }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Exact evaluation of `normal . p + offset`.
    pub fn eval(&self, p: &Point) -> i128 {
        let mut acc = i128::from(self.offset);
        for (n, c) in self.normal.iter().zip(&p.coords) {
            acc += i128::from(*n) * i128::from(*c);
        }
        acc
    }
}

/// Side of a hyperplane: +1 on the strictly positive side, -1 on the strictly
/// negative side. A zero dot product is an error, never a silent default.
pub fn side(h: &Hyperplane, p: &Point) -> Result<i8> {
    let v = h.eval(p);
    if v > 0 {
        Ok(1)
    } else if v < 0 {
        Ok(-1)
    } else {
        Err(Error::OnHyperplane { hyperplane: h.id as usize })
    }
}

/// A bit per hyperplane: 1 iff the point is strictly on the positive side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    bits: Vec<u64>,
    len: usize,
}

impl SignVector {
    pub fn zeros(len: usize) -> Self {
        SignVector { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        if value {
            self.bits[i / 64] |= 1u64 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Hamming distance to `other`.
    pub fn hamming(&self, other: &SignVector) -> u64 {
        assert_eq!(self.len, other.len);
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum()
    }

    /// Hamming distance restricted to the set bits of `mask`.
    pub fn hamming_masked(&self, other: &SignVector, mask: &[u64]) -> u64 {
        assert_eq!(self.len, other.len);
        assert_eq!(self.bits.len(), mask.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .zip(mask)
            .map(|((a, b), m)| u64::from(((a ^ b) & m).count_ones()))
            .sum()
    }
}

/// Bit mask over `m` hyperplanes selecting the ids in `subset`.
pub fn subset_mask(m: usize, subset: &[u32]) -> Vec<u64> {
    let mut mask = vec![0u64; m.div_ceil(64)];
    for &id in subset {
        let i = id as usize;
        assert!(i < m);
        mask[i / 64] |= 1u64 << (i % 64);
    }
    mask
}

/// A point set and a hyperplane set with exact integer coordinates.
///
/// Validation enforces shared dimension, coordinate caps, general position
/// (no point on any hyperplane) and pairwise distinct loci.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub dim: usize,
    pub seed: u64,
    pub points: Vec<Point>,
    pub hyperplanes: Vec<Hyperplane>,
}

impl Instance {
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        hyperplanes: Vec<Hyperplane>,
        seed: u64,
    ) -> Result<Self> {
        let mut inst = Instance { dim, seed, points, hyperplanes };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_hyperplanes(&self) -> usize {
        self.hyperplanes.len()
    }

    /// Assigns hyperplane ids and checks every structural invariant.
    pub fn validate(&mut self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInstance("dim must be positive".into()));
        }
        for (i, h) in self.hyperplanes.iter_mut().enumerate() {
            h.id = i as u32;
        }
        for p in &self.points {
            if p.dim() != self.dim {
                return Err(Error::DimensionUnsupported { expected: self.dim, got: p.dim() });
            }
            for &c in &p.coords {
                if c.abs() > POINT_COORD_CAP {
                    return Err(Error::CoordinateOverflow { value: c, cap: POINT_COORD_CAP });
                }
            }
        }
        for h in &self.hyperplanes {
            if h.dim() != self.dim {
                return Err(Error::DimensionUnsupported { expected: self.dim, got: h.dim() });
            }
            if h.normal.iter().all(|&n| n == 0) {
                return Err(Error::InvalidInstance(format!("hyperplane {} has zero normal", h.id)));
            }
            for &n in &h.normal {
                if n.abs() > NORMAL_CAP {
                    return Err(Error::CoordinateOverflow { value: n, cap: NORMAL_CAP });
                }
            }
            if h.offset.abs() > OFFSET_CAP {
                return Err(Error::CoordinateOverflow { value: h.offset, cap: OFFSET_CAP });
            }
        }
        for (pi, p) in self.points.iter().enumerate() {
            for (hi, h) in self.hyperplanes.iter().enumerate() {
                if h.eval(p) == 0 {
                    return Err(Error::GeneralPosition { point: pi, hyperplane: hi });
                }
            }
        }
        for i in 0..self.hyperplanes.len() {
            for j in i + 1..self.hyperplanes.len() {
                if coincident(&self.hyperplanes[i], &self.hyperplanes[j]) {
                    return Err(Error::CoincidentHyperplanes { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON: fixed field order, integer-only numbers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut inst: Instance =
            serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// True iff the two hyperplanes describe the same locus (coefficient vectors
/// proportional, including the offset).
pub fn coincident(a: &Hyperplane, b: &Hyperplane) -> bool {
    let u: Vec<i64> = a.normal.iter().copied().chain(std::iter::once(a.offset)).collect();
    let v: Vec<i64> = b.normal.iter().copied().chain(std::iter::once(b.offset)).collect();
    proportional(&u, &v)
}

fn proportional(u: &[i64], v: &[i64]) -> bool {
    debug_assert_eq!(u.len(), v.len());
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if i128::from(u[i]) * i128::from(v[j]) != i128::from(u[j]) * i128::from(v[i]) {
                return false;
            }
        }
    }
    true
}

/// Whether the normals of two coincident hyperplanes point the same way.
/// +1: equal sign patterns on the shared locus's sides; -1: flipped.
pub fn orientation_agreement(a: &Hyperplane, b: &Hyperplane) -> i8 {
    let dot: i128 = a
        .normal
        .iter()
        .zip(&b.normal)
        .map(|(x, y)| i128::from(*x) * i128::from(*y))
        .sum();
    if dot > 0 {
        1
    } else {
        -1
    }
}

/// The sign vector of `p` over every hyperplane of the instance.
pub fn sign_vector(inst: &Instance, p: &Point) -> Result<SignVector> {
    let mut sv = SignVector::zeros(inst.n_hyperplanes());
    for (i, h) in inst.hyperplanes.iter().enumerate() {
        sv.set(i, side(h, p)? == 1);
    }
    Ok(sv)
}

/// Crossing distance: the number of hyperplanes strictly separating `p` and
/// `q`, computed as the Hamming distance of their sign vectors.
pub fn crossing_distance(inst: &Instance, p: &Point, q: &Point) -> Result<u64> {
    let vp = sign_vector(inst, p)?;
    let vq = sign_vector(inst, q)?;
    Ok(vp.hamming(&vq))
}

/// Precomputed sign vectors for every point of an instance. Distances between
/// instance points reduce to XOR + popcount on these rows.
#[derive(Debug, Clone)]
pub struct SignTable {
    pub m: usize,
    pub rows: Vec<SignVector>,
}

impl SignTable {
    pub fn build(inst: &Instance) -> Result<Self> {
        let rows = inst
            .points
            .iter()
            .map(|p| sign_vector(inst, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SignTable { m: inst.n_hyperplanes(), rows })
    }

    /// Crossing distance between instance points `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> u64 {
        self.rows[a].hamming(&self.rows[b])
    }

    /// Crossing distance under the hyperplane subset selected by `mask`.
    pub fn distance_masked(&self, a: usize, b: usize, mask: &[u64]) -> u64 {
        self.rows[a].hamming_masked(&self.rows[b], mask)
    }
}

/// Generates a random instance: uniform lattice points, hyperplanes through
/// pairs of random lattice points in the plane or with random integer normals
/// anchored at a random lattice point for d > 2. Any point falling exactly on
/// a hyperplane is rejection-resampled; so are degenerate or duplicate loci.
pub fn generate_instance(
    dim: usize,
    n_points: usize,
    n_hyperplanes: usize,
    coord_range: i64,
    master_seed: u64,
) -> Result<Instance> {
    if dim < 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: dim });
    }
    if !(1..=POINT_COORD_CAP).contains(&coord_range) {
        return Err(Error::CoordinateOverflow { value: coord_range, cap: POINT_COORD_CAP });
    }
    // Anchored offsets stay below the cap as long as d * range^2 does.
    let dc2 = i128::from(dim as i64) * i128::from(coord_range) * i128::from(coord_range);
    if 4 * dc2 > i128::from(OFFSET_CAP) {
        return Err(Error::CoordinateOverflow { value: coord_range, cap: OFFSET_CAP });
    }

    let mut rng = seed::stream(master_seed, "gen-instance", 0);
    let range = -coord_range..=coord_range;

    let mut hyperplanes: Vec<Hyperplane> = Vec::with_capacity(n_hyperplanes);
    for k in 0..n_hyperplanes {
        let mut accepted = false;
        for _ in 0..MAX_RESAMPLES {
            let cand = if dim == 2 {
                let p1 = [rng.gen_range(range.clone()), rng.gen_range(range.clone())];
                let p2 = [rng.gen_range(range.clone()), rng.gen_range(range.clone())];
                if p1 == p2 {
                    continue;
                }
                let normal = vec![p2[1] - p1[1], p1[0] - p2[0]];
                let offset = -(normal[0] * p1[0] + normal[1] * p1[1]);
                Hyperplane::new(normal, offset)
            } else {
                let normal: Vec<i64> =
                    (0..dim).map(|_| rng.gen_range(range.clone())).collect();
                if normal.iter().all(|&n| n == 0) {
                    continue;
                }
                let anchor: Vec<i64> = (0..dim).map(|_| rng.gen_range(range.clone())).collect();
                let offset: i128 = -normal
                    .iter()
                    .zip(&anchor)
                    .map(|(n, a)| i128::from(*n) * i128::from(*a))
                    .sum::<i128>();
                Hyperplane::new(normal, offset as i64)
            };
            if hyperplanes.iter().any(|h| coincident(h, &cand)) {
                continue;
            }
            hyperplanes.push(cand);
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::ResampleExhausted { attempts: MAX_RESAMPLES });
        }
        hyperplanes[k].id = k as u32;
    }

    let mut points: Vec<Point> = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let mut accepted = false;
        for _ in 0..MAX_RESAMPLES {
            let p = Point::new((0..dim).map(|_| rng.gen_range(range.clone())).collect());
            if hyperplanes.iter().any(|h| h.eval(&p) == 0) {
                continue;
            }
            points.push(p);
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::ResampleExhausted { attempts: MAX_RESAMPLES });
        }
    }

    Instance::new(dim, points, hyperplanes, master_seed)
}

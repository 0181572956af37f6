//! Exact MSTs under the crossing metric: the brute-force Kruskal oracle and
//! wavefront propagation over the arrangement face-adjacency graph.
//!
//! The wavefront algorithm floods the adjacency graph from all point-bearing
//! faces at once. Whenever two faces claimed by different representatives
//! touch, the edge yields a candidate of weight dist(f) + dist(g) + 1; a
//! Kruskal filter over all candidates in weight order produces the tree.
//! Accepted candidates always carry the exact crossing distance between their
//! endpoints (checked at runtime against the sign-vector oracle), so the
//! output weight equals the brute-force MST weight even though discovery
//! order is BFS-layer driven.

use crate::arrangement::{build_arrangement, Arrangement};
use crate::error::{Error, Result};
use crate::forest::SpanningForest;
use crate::geometry::{subset_mask, Instance, SignTable};

/// Kruskal over all point pairs with exact sign-vector distances. The
/// independent oracle every other path is measured against.
pub fn mst_bruteforce(inst: &Instance) -> Result<SpanningForest> {
    let n = inst.n_points();
    let mut forest = SpanningForest::new(n);
    if n <= 1 {
        return Ok(forest);
    }
    let signs = SignTable::build(inst)?;
    let mut pairs: Vec<(u64, u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            pairs.push((signs.distance(a as usize, b as usize), a, b));
        }
    }
    pairs.sort_unstable();
    for (w, a, b) in pairs {
        if forest.is_spanning() {
            break;
        }
        forest.try_add_edge(a, b, w);
    }
    debug_assert!(forest.is_spanning());
    Ok(forest)
}

/// Exact MST by simultaneous flooding of the face-adjacency graph of the
/// full line set. Weight-equal to [`mst_bruteforce`]; edge sets may differ
/// under ties.
pub fn mst_wavefront(inst: &Instance, budget: Option<usize>) -> Result<SpanningForest> {
    if inst.dim != 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: inst.dim });
    }
    let all: Vec<u32> = (0..inst.n_hyperplanes() as u32).collect();
    let mut forest = SpanningForest::new(inst.n_points());
    if inst.n_points() <= 1 {
        return Ok(forest);
    }
    let arr = build_arrangement(inst, &all, budget)?;
    let signs = SignTable::build(inst)?;
    flood_merge(inst, &signs, &arr, u32::MAX, &mut forest)?;
    assert!(forest.is_spanning(), "full flood must span");
    Ok(forest)
}

/// One bounded propagation round: after the call, every pair of points whose
/// crossing distance under `subset` is at most `2 * max_radius` shares a
/// component of `forest`. Added edges carry their exact distance under
/// `subset`. Returns indices (into `forest.edges`) of the edges added.
pub fn bounded_spanning_forest(
    inst: &Instance,
    subset: &[u32],
    max_radius: u32,
    forest: &mut SpanningForest,
    budget: Option<usize>,
) -> Result<Vec<usize>> {
    if forest.is_spanning() {
        return Ok(Vec::new());
    }
    if inst.dim != 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: inst.dim });
    }
    let arr = build_arrangement(inst, subset, budget)?;
    let signs = SignTable::build(inst)?;
    bounded_spanning_forest_on(inst, &signs, &arr, max_radius, forest)
}

/// [`bounded_spanning_forest`] against a prebuilt arrangement and sign table,
/// so staged drivers can reuse both across rounds.
pub fn bounded_spanning_forest_on(
    inst: &Instance,
    signs: &SignTable,
    arr: &Arrangement,
    max_radius: u32,
    forest: &mut SpanningForest,
) -> Result<Vec<usize>> {
    if forest.is_spanning() {
        return Ok(Vec::new());
    }
    flood_merge(inst, signs, arr, max_radius, forest)
}

/// Floods the arrangement from all point-bearing faces to `depth`, merging
/// same-face points at weight 0 and then applying the Kruskal filter to all
/// wavefront-collision candidates. Every accepted edge's weight is asserted
/// equal to the exact crossing distance under the arrangement's line subset.
fn flood_merge(
    inst: &Instance,
    signs: &SignTable,
    arr: &Arrangement,
    depth: u32,
    forest: &mut SpanningForest,
) -> Result<Vec<usize>> {
    let mask = subset_mask(inst.n_hyperplanes(), arr.line_ids());
    let mut added = Vec::new();

    // Group points by containing face; the smallest point id represents.
    let mut face_points: Vec<(u32, u32)> = Vec::with_capacity(inst.n_points());
    for (pid, p) in inst.points.iter().enumerate() {
        face_points.push((arr.locate(p)?, pid as u32));
    }
    face_points.sort_unstable();
    let mut sources: Vec<(u32, u64)> = Vec::new();
    let mut i = 0;
    while i < face_points.len() {
        let face = face_points[i].0;
        let rep = face_points[i].1;
        let mut j = i + 1;
        while j < face_points.len() && face_points[j].0 == face {
            if forest.try_add_edge(rep, face_points[j].1, 0) {
                added.push(forest.edges.len() - 1);
            }
            j += 1;
        }
        sources.push((face, u64::from(rep)));
        i = j;
    }
    if depth == 0 || sources.len() <= 1 {
        return Ok(added);
    }

    let labels = arr.bfs_keyed(&sources, depth);
    let mut candidates: Vec<(u64, u32, u32)> = Vec::new();
    for f in 0..arr.face_count() as u32 {
        let Some((df, kf)) = labels[f as usize] else { continue };
        for &(g, _line) in arr.adjacency(f) {
            if g <= f {
                continue;
            }
            let Some((dg, kg)) = labels[g as usize] else { continue };
            if kf == kg {
                continue;
            }
            let w = u64::from(df) + u64::from(dg) + 1;
            candidates.push((w, kf.min(kg) as u32, kf.max(kg) as u32));
        }
    }
    candidates.sort_unstable();
    for (w, a, b) in candidates {
        if forest.try_add_edge(a, b, w) {
            assert_eq!(
                w,
                signs.distance_masked(a as usize, b as usize, &mask),
                "accepted wavefront candidate must carry the exact subset distance"
            );
            added.push(forest.edges.len() - 1);
        }
    }
    Ok(added)
}

//! Planar arrangements of line subsets: cells keyed by sign pattern, the
//! face-adjacency graph, point location, and multi-source BFS over faces.
//!
//! Construction walks every line of the subset, sorting its intersections
//! with the other lines exactly (big-rational parameters), and emits the two
//! flanking cells of each segment. Cells of a line arrangement biject with
//! realizable sign patterns, and two cells sharing all signs but one always
//! share an edge, so this enumeration is complete. Everything is exact; no
//! floating point enters any decision.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{side, Instance, Point};

/// A cell of the arrangement. `pattern[k]` is the sign (+1/-1) with respect
/// to the k-th line of the subset in sorted-id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: u32,
    pub pattern: Vec<i8>,
}

/// Distance label assigned by the face BFS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceLabel {
    pub dist: u32,
    /// Id of one nearest source face; ties resolved to the smallest.
    pub source: u32,
}

#[derive(Debug, Clone)]
struct LineCoeffs {
    id: u32,
    a: i128,
    b: i128,
    c: i128,
}

impl LineCoeffs {
    fn eval_rational(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let a = BigRational::from(BigInt::from(self.a));
        let b = BigRational::from(BigInt::from(self.b));
        let c = BigRational::from(BigInt::from(self.c));
        a * x + b * y + c
    }
}

/// The arrangement of a line subset, with its face-adjacency graph.
#[derive(Debug, Clone)]
pub struct Arrangement {
    /// Subset line ids, sorted ascending; pattern positions follow this order.
    line_ids: Vec<u32>,
    lines: Vec<LineCoeffs>,
    /// Faces sorted lexicographically by pattern; `faces[i].id == i`.
    faces: Vec<Face>,
    /// Per face: (neighbor face id, crossed line id), sorted.
    adjacency: Vec<Vec<(u32, u32)>>,
    /// Distinct intersection points, exact rationals, in discovery order.
    vertices: Vec<(BigRational, BigRational)>,
    /// Arrangement edges, counting the two unbounded pieces of each line
    /// (a crossing-free line contributes one closed edge through infinity).
    edge_count: usize,
}

impl Arrangement {
    pub fn line_ids(&self) -> &[u32] {
        &self.line_ids
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Exact intersection points of the subset's lines.
    pub fn vertices(&self) -> &[(BigRational, BigRational)] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn adjacency(&self, face: u32) -> &[(u32, u32)] {
        &self.adjacency[face as usize]
    }

    /// Euler relation on the one-point compactification: V - E + F = 2 for a
    /// nonempty line set. The empty arrangement is a single face.
    pub fn euler_ok(&self) -> bool {
        if self.line_ids.is_empty() {
            self.faces.len() == 1 && self.edge_count == 0 && self.vertices.is_empty()
        } else {
            let v = self.vertices.len() as i64 + 1;
            v - self.edge_count as i64 + self.faces.len() as i64 == 2
        }
    }

    /// The unique face whose sign pattern matches `p`.
    pub fn locate(&self, p: &Point) -> Result<u32> {
        let mut pattern = Vec::with_capacity(self.lines.len());
        for l in &self.lines {
            let mut acc = l.c;
            acc += l.a * i128::from(p.coords[0]) + l.b * i128::from(p.coords[1]);
            if acc == 0 {
                return Err(Error::OnHyperplane { hyperplane: l.id as usize });
            }
            pattern.push(if acc > 0 { 1 } else { -1 });
        }
        let idx = self
            .faces
            .binary_search_by(|f| f.pattern.as_slice().cmp(pattern.as_slice()))
            .expect("every off-line point lies in an enumerated cell");
        Ok(idx as u32)
    }

    /// Multi-source BFS over the face-adjacency graph. Each face within
    /// `max_depth` hops of a source is labeled with its hop distance and the
    /// smallest-id nearest source.
    pub fn face_bfs_layers(&self, sources: &[u32], max_depth: u32) -> Vec<Option<FaceLabel>> {
        let keyed: Vec<(u32, u64)> = sources.iter().map(|&f| (f, u64::from(f))).collect();
        self.bfs_keyed(&keyed, max_depth)
            .into_iter()
            .map(|o| o.map(|(dist, key)| FaceLabel { dist, source: key as u32 }))
            .collect()
    }

    /// BFS with an arbitrary priority key per source; ties at equal hop
    /// distance resolve to the minimum key. Used by the wavefront MST, where
    /// keys are representative point ids.
    pub(crate) fn bfs_keyed(
        &self,
        sources: &[(u32, u64)],
        max_depth: u32,
    ) -> Vec<Option<(u32, u64)>> {
        let mut labels: Vec<Option<(u32, u64)>> = vec![None; self.faces.len()];
        for &(f, key) in sources {
            let slot = &mut labels[f as usize];
            match slot {
                Some((_, k)) if *k <= key => {}
                _ => *slot = Some((0, key)),
            }
        }
        let mut frontier: Vec<u32> = sources.iter().map(|&(f, _)| f).collect();
        frontier.sort_unstable();
        frontier.dedup();

        let mut depth = 0;
        while depth < max_depth && !frontier.is_empty() {
            let mut pending: HashMap<u32, u64> = HashMap::new();
            for &f in &frontier {
                let (_, key) = labels[f as usize].expect("frontier faces are labeled");
                for &(g, _) in &self.adjacency[f as usize] {
                    if labels[g as usize].is_none() {
                        pending
                            .entry(g)
                            .and_modify(|k| *k = (*k).min(key))
                            .or_insert(key);
                    }
                }
            }
            if pending.is_empty() {
                break;
            }
            let mut next: Vec<u32> = pending.keys().copied().collect();
            next.sort_unstable();
            for &g in &next {
                labels[g as usize] = Some((depth + 1, pending[&g]));
            }
            frontier = next;
            depth += 1;
        }
        labels
    }
}

/// Builds the arrangement of the given line subset. The optional `budget`
/// caps the number of cells created; exceeding it aborts the build.
pub fn build_arrangement(
    inst: &Instance,
    subset: &[u32],
    budget: Option<usize>,
) -> Result<Arrangement> {
    if inst.dim != 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: inst.dim });
    }
    let mut ids: Vec<u32> = subset.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let lines: Vec<LineCoeffs> = ids
        .iter()
        .map(|&id| {
            let h = &inst.hyperplanes[id as usize];
            LineCoeffs {
                id,
                a: i128::from(h.normal[0]),
                b: i128::from(h.normal[1]),
                c: i128::from(h.offset),
            }
        })
        .collect();
    let r = lines.len();

    let mut cells: HashMap<Vec<i8>, u32> = HashMap::new();
    let mut adjacency_raw: Vec<(u32, u32, u32)> = Vec::new();
    let mut vertex_set: HashSet<(BigRational, BigRational)> = HashSet::new();
    let mut vertices: Vec<(BigRational, BigRational)> = Vec::new();
    let mut edge_count = 0usize;

    let intern = |pattern: Vec<i8>, cells: &mut HashMap<Vec<i8>, u32>| -> Result<u32> {
        if let Some(&id) = cells.get(&pattern) {
            return Ok(id);
        }
        let id = cells.len() as u32;
        if let Some(cap) = budget {
            if cells.len() + 1 > cap {
                return Err(Error::BudgetExceeded { budget: cap, created: cells.len() + 1 });
            }
        }
        cells.insert(pattern, id);
        Ok(id)
    };

    if r == 0 {
        intern(Vec::new(), &mut cells)?;
    }

    for i in 0..r {
        let li = &lines[i];
        // Intersections with the other lines, as parameters along this line.
        let mut events: Vec<(BigRational, usize)> = Vec::new();
        for (j, lj) in lines.iter().enumerate() {
            if j == i {
                continue;
            }
            let w = li.a * lj.b - lj.a * li.b;
            if w == 0 {
                // Parallel. Coincident loci are rejected at instance
                // validation, so the sign of lj is constant along li.
                continue;
            }
            let x = li.b * lj.c - lj.b * li.c;
            let y = li.c * lj.a - lj.c * li.a;
            let num = BigInt::from(li.b) * BigInt::from(x) - BigInt::from(li.a) * BigInt::from(y);
            let t = BigRational::new(num, BigInt::from(w));
            if i < j {
                let vx = BigRational::new(BigInt::from(x), BigInt::from(w));
                let vy = BigRational::new(BigInt::from(y), BigInt::from(w));
                if vertex_set.insert((vx.clone(), vy.clone())) {
                    vertices.push((vx, vy));
                }
            }
            events.push((t, j));
        }
        events.sort_by(|a, b| a.0.cmp(&b.0));
        // Group concurrent crossings.
        let mut groups: Vec<(BigRational, Vec<usize>)> = Vec::new();
        for (t, j) in events {
            match groups.last_mut() {
                Some((gt, js)) if *gt == t => js.push(j),
                _ => groups.push((t, vec![j])),
            }
        }
        edge_count += groups.len() + 1;

        // Witness on the first segment (before the first crossing).
        let (wx, wy) = if groups.is_empty() {
            if li.b != 0 {
                (
                    BigRational::zero(),
                    BigRational::new(BigInt::from(-li.c), BigInt::from(li.b)),
                )
            } else {
                (
                    BigRational::new(BigInt::from(-li.c), BigInt::from(li.a)),
                    BigRational::zero(),
                )
            }
        } else {
            // First crossing, stepped back by the direction vector (b, -a).
            let j = groups[0].1[0];
            let lj = &lines[j];
            let w = li.a * lj.b - lj.a * li.b;
            let x = li.b * lj.c - lj.b * li.c;
            let y = li.c * lj.a - lj.c * li.a;
            let vx = BigRational::new(BigInt::from(x), BigInt::from(w));
            let vy = BigRational::new(BigInt::from(y), BigInt::from(w));
            (
                vx - BigRational::from(BigInt::from(li.b)),
                vy + BigRational::from(BigInt::from(li.a)),
            )
        };

        // Signs of every other line on the first segment; updated by flips
        // while walking across the crossings.
        let mut sigma: Vec<i8> = vec![0; r];
        for (j, lj) in lines.iter().enumerate() {
            if j == i {
                continue;
            }
            let v = lj.eval_rational(&wx, &wy);
            debug_assert!(!v.is_zero(), "witness must avoid all other lines");
            sigma[j] = if v.is_positive() { 1 } else { -1 };
        }

        for seg in 0..=groups.len() {
            let mut plus = sigma.clone();
            plus[i] = 1;
            let mut minus = sigma.clone();
            minus[i] = -1;
            let fp = intern(plus, &mut cells)?;
            let fm = intern(minus, &mut cells)?;
            adjacency_raw.push((fp, fm, li.id));
            if seg < groups.len() {
                for &j in &groups[seg].1 {
                    sigma[j] = -sigma[j];
                }
            }
        }
    }

    // Deterministic numbering: sort cells lexicographically by pattern.
    let mut patterns: Vec<(Vec<i8>, u32)> = cells.into_iter().collect();
    patterns.sort_by(|a, b| a.0.cmp(&b.0));
    let mut remap = vec![0u32; patterns.len()];
    for (new_id, (_, old_id)) in patterns.iter().enumerate() {
        remap[*old_id as usize] = new_id as u32;
    }
    let faces: Vec<Face> = patterns
        .into_iter()
        .enumerate()
        .map(|(id, (pattern, _))| Face { id: id as u32, pattern })
        .collect();

    let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); faces.len()];
    for (fp, fm, line) in adjacency_raw {
        let a = remap[fp as usize];
        let b = remap[fm as usize];
        adjacency[a as usize].push((b, line));
        adjacency[b as usize].push((a, line));
    }
    for list in &mut adjacency {
        list.sort_unstable();
        debug_assert!(list.windows(2).all(|w| w[0] != w[1]), "duplicate adjacency");
    }

    Ok(Arrangement {
        line_ids: ids,
        lines,
        faces,
        adjacency,
        vertices,
        edge_count,
    })
}

/// Restriction of a point's sign vector to a subset, in sorted-id order.
/// This is the pattern `locate` matches against; exposed for cross-checks.
pub fn subset_pattern(inst: &Instance, subset_sorted: &[u32], p: &Point) -> Result<Vec<i8>> {
    subset_sorted
        .iter()
        .map(|&id| side(&inst.hyperplanes[id as usize], p))
        .collect()
}

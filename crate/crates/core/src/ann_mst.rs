//! MST through the embedding: a ladder of Hamming embeddings at geometric
//! distance thresholds, an LSH index per rung, and Boruvka rounds where every
//! component asks the ladder for an approximate nearest foreign point.
//!
//! Rungs are scanned from the smallest threshold up; a candidate is accepted
//! at a rung when its label distance falls below the midpoint of the rung's
//! near/far separation means. Components that no rung serves fall back to an
//! exact oracle scan, so every round contracts the component count and the
//! driver always returns a spanning tree. Edges enter through a Kruskal
//! filter carrying true crossing distances.

use serde::Serialize;

use crate::embedding::{embed_points_with, plan_embedding_any, EmbeddedPoints, EmbeddingConfig};
use crate::error::Result;
use crate::forest::SpanningForest;
use crate::geometry::{Instance, SignTable};
use crate::lsh::{LshConfig, LshIndex};
use crate::seed;

/// Knobs of the embedding-MST path.
#[derive(Debug, Clone)]
pub struct AnnConfig {
    pub eps: f64,
    pub seed: u64,
    /// C in the per-rung subset count.
    pub c_embed: f64,
    /// Bits per label coordinate; `None` derives ceil(2 ln n).
    pub binary_reps: Option<usize>,
    pub lsh_bits: Option<usize>,
    pub lsh_bands: Option<usize>,
}

impl AnnConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        assert!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
        AnnConfig {
            eps,
            seed,
            c_embed: 1.0,
            binary_reps: None,
            lsh_bits: None,
            lsh_bands: None,
        }
    }
}

/// One rung of the threshold ladder, as reported to callers.
#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub r: u64,
    pub mu: usize,
    pub k: usize,
    pub code_len: usize,
    /// Whether the formal near/far gap margin degenerated at these
    /// parameters (the rung is still used, with midpoint acceptance).
    pub degenerate_gap: bool,
}

/// Per-round trace of the Boruvka driver.
#[derive(Debug, Clone, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub components_before: usize,
    pub edges_added: usize,
    pub fallback_edges: usize,
}

#[derive(Debug, Clone)]
pub struct AnnMst {
    pub forest: SpanningForest,
    pub ladder: Vec<LadderRung>,
    pub rounds: usize,
    /// Edges found by the exact-oracle fallback rather than the ladder.
    pub fallback_edges: usize,
    pub round_trace: Vec<RoundReport>,
}

impl AnnMst {
    pub fn weight(&self) -> u64 {
        self.forest.total_weight()
    }
}

struct Rung {
    embedded: EmbeddedPoints,
    index: LshIndex,
    /// Label-distance acceptance cutoff: mu (z + Z) / 2.
    accept: f64,
}

/// Geometric thresholds r_t = ceil((1+eps)^t), deduplicated, capped at m.
fn threshold_ladder(eps: f64, m: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut x = 1.0f64;
    loop {
        let r = (x.ceil() as u64).min(m as u64).max(1);
        if out.last() != Some(&r) {
            out.push(r);
        }
        if r >= m as u64 {
            break;
        }
        x *= 1.0 + eps;
    }
    out
}

/// (1+eps)-approximate MST via the Hamming embedding and LSH nearest
/// neighbors. Always returns a spanning tree with true crossing-distance
/// edge weights, for any dimension.
pub fn mst_via_embedding(inst: &Instance, cfg: &AnnConfig) -> Result<AnnMst> {
    let n = inst.n_points();
    let m = inst.n_hyperplanes();
    let mut forest = SpanningForest::new(n);
    let mut report = AnnMst {
        forest: forest.clone(),
        ladder: Vec::new(),
        rounds: 0,
        fallback_edges: 0,
        round_trace: Vec::new(),
    };
    if n <= 1 {
        return Ok(report);
    }
    if m == 0 {
        for b in 1..n as u32 {
            forest.try_add_edge(0, b, 0);
        }
        report.forest = forest;
        return Ok(report);
    }

    let signs = SignTable::build(inst)?;
    // Merge zero-distance pairs up front; they are the same metric point.
    {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| {
            (0..signs.m)
                .map(|i| signs.rows[a as usize].get(i))
                .cmp((0..signs.m).map(|i| signs.rows[b as usize].get(i)))
        });
        for w in order.windows(2) {
            if signs.distance(w[0] as usize, w[1] as usize) == 0 {
                forest.try_add_edge(w[0].min(w[1]), w[0].max(w[1]), 0);
            }
        }
    }

    // Build the ladder.
    let mut rungs: Vec<Rung> = Vec::new();
    for (t, r) in threshold_ladder(cfg.eps, m).into_iter().enumerate() {
        let embed_cfg = EmbeddingConfig {
            c_embed: cfg.c_embed,
            binary_reps: cfg.binary_reps,
            seed: seed::derive_key(cfg.seed, "ann-rung", t as u64),
        };
        let spec = plan_embedding_any(inst, r, cfg.eps, &embed_cfg);
        let degenerate = spec.z_far >= 0.5 || spec.far_threshold <= spec.near_threshold;
        let embedded = embed_points_with(&signs, &spec)?;
        let lsh_cfg = LshConfig {
            bits_per_band: cfg.lsh_bits,
            bands: cfg.lsh_bands,
            seed: seed::derive_key(cfg.seed, "ann-lsh", t as u64),
        };
        let mut index = LshIndex::new(spec.code_len(), n, &lsh_cfg);
        for (pid, code) in embedded.binary.iter().enumerate() {
            index.insert(pid as u32, code.clone())?;
        }
        report.ladder.push(LadderRung {
            r,
            mu: spec.mu,
            k: spec.k,
            code_len: spec.code_len(),
            degenerate_gap: degenerate,
        });
        let accept = spec.mu as f64 * (spec.z_near + spec.z_far) / 2.0;
        rungs.push(Rung { embedded, index, accept });
    }

    // Boruvka rounds.
    let mut rounds = 0usize;
    let mut fallback_edges = 0usize;
    let round_cap = 2 * (n.max(2) as f64).log2().ceil() as usize + 4;
    while !forest.is_spanning() {
        rounds += 1;
        assert!(rounds <= round_cap, "round cap exceeded");
        let components_before = forest.component_count();
        let round_fallbacks_before = fallback_edges;
        let edges_before = forest.edges.len();
        let roots: Vec<u32> = (0..n as u32).map(|p| forest.find(p)).collect();
        let mut components: std::collections::BTreeMap<u32, Vec<u32>> =
            std::collections::BTreeMap::new();
        for p in 0..n as u32 {
            components.entry(roots[p as usize]).or_default().push(p);
        }

        let mut candidates: Vec<(u64, u32, u32)> = Vec::new();
        for (&root, members) in &components {
            let mut found: Option<(u64, u32, u32)> = None;
            'ladder: for rung in &rungs {
                let mut best: Option<(usize, u32, u32)> = None;
                for &p in members {
                    let Ok(q) = rung.index.query(&rung.embedded.binary[p as usize], |id| {
                        roots[id as usize] == root
                    }) else {
                        continue;
                    };
                    let label_d = rung.embedded.label_hamming(p as usize, q as usize);
                    if (label_d as f64) <= rung.accept {
                        let key = (label_d, p.min(q), p.max(q));
                        if best.is_none_or(|b| key < b) {
                            best = Some(key);
                        }
                    }
                }
                if let Some((_, a, b)) = best {
                    let w = signs.distance(a as usize, b as usize);
                    found = Some((w, a, b));
                    break 'ladder;
                }
            }
            let edge = match found {
                Some(e) => e,
                None => {
                    // Exact oracle fallback for this component.
                    fallback_edges += 1;
                    let mut best: Option<(u64, u32, u32)> = None;
                    for &p in members {
                        for q in 0..n as u32 {
                            if roots[q as usize] == root {
                                continue;
                            }
                            let key =
                                (signs.distance(p as usize, q as usize), p.min(q), p.max(q));
                            if best.is_none_or(|b| key < b) {
                                best = Some(key);
                            }
                        }
                    }
                    best.expect("a non-spanning forest has foreign points")
                }
            };
            candidates.push(edge);
        }
        candidates.sort_unstable();
        for (w, a, b) in candidates {
            forest.try_add_edge(a, b, w);
        }
        report.round_trace.push(RoundReport {
            round: rounds,
            components_before,
            edges_added: forest.edges.len() - edges_before,
            fallback_edges: fallback_edges - round_fallbacks_before,
        });
    }
    assert_eq!(forest.edges.len(), n - 1);

    report.forest = forest;
    report.rounds = rounds;
    report.fallback_edges = fallback_edges;
    Ok(report)
}

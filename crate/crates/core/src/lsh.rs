//! Bit-sampling locality-sensitive hashing over binary Hamming codes, with
//! dynamic insert/delete and approximate nearest-neighbor queries.
//!
//! Each of G bands samples K bit positions; a code's band key is those bits
//! packed into a word. Queries gather every bucket collision across bands
//! and return the candidate at minimal code distance, falling back to a
//! linear scan over live points when the buckets are empty, so a query with
//! any admissible point never comes back empty-handed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::SignVector;
use crate::seed;

/// Band parameters. `None` fields derive desk-scale defaults from the
/// expected point count: K = ceil(log2 n) bits per band, G = ceil(n^0.4)
/// bands capped at 64.
#[derive(Debug, Clone)]
pub struct LshConfig {
    pub bits_per_band: Option<usize>,
    pub bands: Option<usize>,
    pub seed: u64,
}

impl LshConfig {
    pub fn new(seed: u64) -> Self {
        LshConfig { bits_per_band: None, bands: None, seed }
    }
}

#[derive(Debug, Clone)]
pub struct LshIndex {
    code_len: usize,
    /// Per band: K sorted sampled bit positions.
    bands: Vec<Vec<usize>>,
    /// Per band: packed key -> bucket of live ids.
    tables: Vec<HashMap<u64, Vec<u32>>>,
    live: HashMap<u32, SignVector>,
}

impl LshIndex {
    /// Builds an empty index over codes of `code_len` bits, sized for about
    /// `n_hint` points.
    pub fn new(code_len: usize, n_hint: usize, cfg: &LshConfig) -> Self {
        let n = n_hint.max(2) as f64;
        let k = cfg
            .bits_per_band
            .unwrap_or_else(|| n.log2().ceil() as usize)
            .clamp(1, 64.min(code_len.max(1)));
        let g = cfg.bands.unwrap_or_else(|| (n.powf(0.4).ceil() as usize).min(64)).max(1);
        let mut bands = Vec::with_capacity(g);
        for band in 0..g {
            let mut rng = seed::stream(cfg.seed, "lsh-band", band as u64);
            let mut positions = Vec::with_capacity(k);
            while positions.len() < k {
                let p = rand::Rng::gen_range(&mut rng, 0..code_len.max(1));
                if !positions.contains(&p) {
                    positions.push(p);
                }
            }
            positions.sort_unstable();
            bands.push(positions);
        }
        LshIndex {
            code_len,
            tables: vec![HashMap::new(); bands.len()],
            bands,
            live: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn live_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.live.keys().copied().collect();
        ids.sort_unstable();
        ids
    }

    fn band_key(&self, band: usize, code: &SignVector) -> u64 {
        let mut key = 0u64;
        for (i, &pos) in self.bands[band].iter().enumerate() {
            if code.get(pos) {
                key |= 1 << i;
            }
        }
        key
    }

    pub fn insert(&mut self, id: u32, code: SignVector) -> Result<()> {
        assert_eq!(code.len(), self.code_len, "code length mismatch");
        if self.live.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        for band in 0..self.bands.len() {
            let key = self.band_key(band, &code);
            self.tables[band].entry(key).or_default().push(id);
        }
        self.live.insert(id, code);
        Ok(())
    }

    pub fn delete(&mut self, id: u32) -> Result<()> {
        let Some(code) = self.live.remove(&id) else {
            return Err(Error::UnknownId(id));
        };
        for band in 0..self.bands.len() {
            let key = self.band_key(band, &code);
            if let Some(bucket) = self.tables[band].get_mut(&key) {
                bucket.retain(|&x| x != id);
                if bucket.is_empty() {
                    self.tables[band].remove(&key);
                }
            }
        }
        Ok(())
    }

    /// The live point closest to `code` (by exact code distance) among all
    /// bucket collisions, skipping ids where `exclude` holds. Falls back to
    /// a linear scan when no bucket candidate survives; `NotFound` only when
    /// every live point is excluded.
    pub fn query<F: Fn(u32) -> bool>(&self, code: &SignVector, exclude: F) -> Result<u32> {
        assert_eq!(code.len(), self.code_len, "code length mismatch");
        let mut candidates: Vec<u32> = Vec::new();
        for band in 0..self.bands.len() {
            let key = self.band_key(band, code);
            if let Some(bucket) = self.tables[band].get(&key) {
                candidates.extend(bucket.iter().copied());
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&id| !exclude(id));

        let best_of = |ids: &[u32]| -> Option<(u64, u32)> {
            ids.iter()
                .map(|&id| (self.live[&id].hamming(code), id))
                .min()
        };
        if let Some((_, id)) = best_of(&candidates) {
            return Ok(id);
        }
        // Correctness floor: scan every live point.
        let all: Vec<u32> = {
            let mut v: Vec<u32> = self.live.keys().copied().filter(|&id| !exclude(id)).collect();
            v.sort_unstable();
            v
        };
        best_of(&all).map(|(_, id)| id).ok_or(Error::NotFound)
    }
}

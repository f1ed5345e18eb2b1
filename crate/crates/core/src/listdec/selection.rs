use std::cmp::Ordering;

use crate::error::{Error, Result};

/// One of the `2L` extensions considered at a non-frozen bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathCandidate<V> {
    pub parent: usize,
    pub bit: u8,
    pub metric: V,
    /// `false` for extensions of inactive paths and for forbidden bits.
    pub live: bool,
}

impl<V: PartialOrd> PathCandidate<V> {
    /// Sorter order: live first, then (metric, parent, bit) ascending.
    pub fn order(&self, other: &Self) -> Ordering {
        other
            .live
            .cmp(&self.live)
            .then_with(|| self.metric.partial_cmp(&other.metric).unwrap_or(Ordering::Equal))
            .then_with(|| self.parent.cmp(&other.parent))
            .then_with(|| self.bit.cmp(&other.bit))
    }
}

/// Survivors of one selection step, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection<V> {
    pub parents: Vec<usize>,
    pub bits: Vec<u8>,
    pub metrics: Vec<V>,
    pub live: Vec<bool>,
}

impl<V> Default for Selection<V> {
    fn default() -> Self {
        Selection {
            parents: Vec::new(),
            bits: Vec::new(),
            metrics: Vec::new(),
            live: Vec::new(),
        }
    }
}

/// Keeps the `list_size` best of the given candidates.
///
/// Each candidate is compared against every other one and its rank is the
/// number of candidates that beat it, as in a single-stage radix-`2L`
/// sorter with `2L(2L−1)/2` comparators. Survivors are returned in rank
/// order, so slot 0 always holds the best path.
pub fn select_best<V: Copy + PartialOrd>(cands: &[PathCandidate<V>], list_size: usize) -> Result<Selection<V>> {
    let mut sel = Selection::default();
    select_best_into(cands, list_size, &mut Vec::new(), &mut sel)?;
    Ok(sel)
}

pub(crate) fn select_best_into<V: Copy + PartialOrd>(
    cands: &[PathCandidate<V>],
    list_size: usize,
    rank: &mut Vec<usize>,
    sel: &mut Selection<V>,
) -> Result<()> {
    if !cands.iter().any(|c| c.live) {
        return Err(Error::Internal("path selection with no live candidate".into()));
    }
    rank.clear();
    rank.resize(cands.len(), 0);
    for a in 0..cands.len() {
        for b in a + 1..cands.len() {
            if cands[a].order(&cands[b]) == Ordering::Greater {
                rank[a] += 1;
            } else {
                rank[b] += 1;
            }
        }
    }
    let keep = list_size.min(cands.len());
    let first = cands[0];
    sel.parents.clear();
    sel.parents.resize(keep, 0);
    sel.bits.clear();
    sel.bits.resize(keep, 0);
    sel.metrics.clear();
    sel.metrics.resize(keep, first.metric);
    sel.live.clear();
    sel.live.resize(keep, false);
    for (c, &r) in cands.iter().zip(rank.iter()) {
        if r < keep {
            sel.parents[r] = c.parent;
            sel.bits[r] = c.bit;
            sel.metrics[r] = c.metric;
            sel.live[r] = c.live;
        }
    }
    Ok(())
}

pub(crate) fn fill_candidates<V: Copy>(
    metrics: &[[V; 2]],
    active: &[bool],
    allow_one: bool,
    cands: &mut Vec<PathCandidate<V>>,
) {
    cands.clear();
    for (l, m) in metrics.iter().enumerate() {
        for bit in [0u8, 1] {
            cands.push(PathCandidate {
                parent: l,
                bit,
                metric: m[bit as usize],
                live: active[l] && (bit == 0 || allow_one),
            });
        }
    }
}

/// Path selection over an `L × 2` metric table.
///
/// `active[l]` marks live paths; when `allow_one` is false the bit-1
/// extensions are excluded (a frozen last bit).
pub fn path_selection<V: Copy + PartialOrd>(
    metrics: &[[V; 2]],
    active: &[bool],
    allow_one: bool,
) -> Result<Selection<V>> {
    let mut cands = Vec::with_capacity(2 * metrics.len());
    fill_candidates(metrics, active, allow_one, &mut cands);
    select_best(&cands, metrics.len())
}

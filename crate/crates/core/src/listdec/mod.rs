//! List-SC decoding.
//!
//! [`ListDecoder`] keeps `L` LL state-memories (stages `0..n−1`; the channel
//! stage is stored once and shared) plus an `L × (n−1)` pointer memory.
//! When path `l` recomputes stage `s` it reads stage `s+1` from state-memory
//! `p(l, s+1)` and writes stage `s` into its own state-memory, setting
//! `p(l, s) = l`. Duplicating a path copies its pointer row, partial sums and
//! path bits; LL values are never copied.
//!
//! [`ReferenceListDecoder`] runs the same schedule but gives every path a
//! private full copy of its LL state, copied on duplication. It exists as an
//! oracle for the pointer scheme.

mod selection;
mod trace;

use std::fmt::Debug;

use selection::{fill_candidates, select_best_into};
pub use selection::{path_selection, select_best, PathCandidate, Selection};
pub use trace::{write_trace, TraceRecord};

use crate::arith::{Kernel, LlPair};
use crate::code::PolarCode;
use crate::error::{param, Result};
use crate::scdec::{compute_stage, first_stage, stage_offset, PartialSums};

/// LL write counters for one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// Pairs written by stage updates.
    pub ll_writes: u64,
    /// Pairs written while duplicating paths.
    pub ll_copy_writes: u64,
}

/// Result of a list decode.
#[derive(Debug, Clone, PartialEq)]
pub struct ListOutput<V> {
    /// `û_1^N` of the best surviving path.
    pub u: Vec<u8>,
    /// Its stage-0 negative LL at the last bit.
    pub metric: V,
}

/// `L × (n−1)` table of state-memory indices, one per path and stage `1..n−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointerMemory {
    cols: usize,
    cells: Vec<usize>,
    shadow: Vec<usize>,
}

impl PointerMemory {
    pub fn new(list_size: usize, n: usize) -> Self {
        let cols = n.saturating_sub(1);
        PointerMemory {
            cols,
            cells: vec![0; list_size * cols],
            shadow: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for (idx, c) in self.cells.iter_mut().enumerate() {
            *c = idx / self.cols.max(1);
        }
    }

    /// State-memory holding path `l`'s stage-`s` LLs, `1 ≤ s ≤ n−1`.
    #[inline]
    pub fn get(&self, l: usize, s: usize) -> usize {
        self.cells[l * self.cols + s - 1]
    }

    #[inline]
    fn set(&mut self, l: usize, s: usize, v: usize) {
        self.cells[l * self.cols + s - 1] = v;
    }

    pub fn row(&self, l: usize) -> &[usize] {
        &self.cells[l * self.cols..(l + 1) * self.cols]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells.chunks(self.cols.max(1)).map(<[usize]>::to_vec).collect()
    }

    /// `p(l, :) ← p(parents[l], :)` with all reads before all writes.
    fn copy_rows(&mut self, parents: &[usize]) {
        if self.cols == 0 {
            return;
        }
        self.shadow.clone_from(&self.cells);
        let cols = self.cols;
        for (l, &p) in parents.iter().enumerate() {
            self.cells[l * cols..(l + 1) * cols].copy_from_slice(&self.shadow[p * cols..(p + 1) * cols]);
        }
    }
}

/// LL storage strategy for [`ListSc`].
pub trait LlMemory<K: Kernel>: Debug + Send {
    fn new(list_size: usize, n: usize) -> Self;

    fn reset(&mut self);

    /// Recomputes stages `first_stage(t)−1 … 0` of path `l` and returns its
    /// stage-0 pair.
    fn update_path(
        &mut self,
        kernel: &K,
        channel: &[LlPair<K::Value>],
        l: usize,
        t: usize,
        psums: &PartialSums,
        stats: &mut DecodeStats,
    ) -> LlPair<K::Value>;

    /// Applies a selection's parent map to the LL state.
    fn follow_parents(&mut self, parents: &[usize], stats: &mut DecodeStats);

    /// Path `l`'s current stage-`s` LLs, `s < n`.
    fn stage(&self, l: usize, s: usize) -> &[LlPair<K::Value>];

    fn pointer_rows(&self) -> Option<Vec<Vec<usize>>>;
}

fn pair_mut<T>(v: &mut [T], read: usize, write: usize) -> (&T, &mut T) {
    debug_assert_ne!(read, write);
    if read < write {
        let (lo, hi) = v.split_at_mut(write);
        (&lo[read], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(read);
        (&hi[0], &mut lo[write])
    }
}

/// Per-path state-memories addressed through a pointer memory.
#[derive(Debug, Clone)]
pub struct PointerStore<K: Kernel> {
    n: usize,
    mem: Vec<Vec<LlPair<K::Value>>>,
    ptr: PointerMemory,
}

impl<K: Kernel> PointerStore<K> {
    pub fn pointers(&self) -> &PointerMemory {
        &self.ptr
    }
}

impl<K: Kernel> LlMemory<K> for PointerStore<K> {
    fn new(list_size: usize, n: usize) -> Self {
        PointerStore {
            n,
            mem: vec![vec![LlPair::default(); 1 << n]; list_size],
            ptr: PointerMemory::new(list_size, n),
        }
    }

    fn reset(&mut self) {
        self.ptr.reset();
    }

    fn update_path(
        &mut self,
        kernel: &K,
        channel: &[LlPair<K::Value>],
        l: usize,
        t: usize,
        psums: &PartialSums,
        stats: &mut DecodeStats,
    ) -> LlPair<K::Value> {
        let n = self.n;
        if n == 0 {
            return channel[0];
        }
        for s in (0..first_stage(t, n)).rev() {
            let out_range = stage_offset(s)..stage_offset(s + 1);
            if s + 1 == n {
                compute_stage(kernel, channel, &mut self.mem[l][out_range], s, t, psums);
            } else {
                let src = self.ptr.get(l, s + 1);
                let in_range = stage_offset(s + 1)..stage_offset(s + 2);
                if src == l {
                    let (lo, hi) = self.mem[l].split_at_mut(in_range.start);
                    compute_stage(kernel, &hi[..2 << s], &mut lo[out_range], s, t, psums);
                } else {
                    let (from, to) = pair_mut(&mut self.mem, src, l);
                    compute_stage(kernel, &from[in_range], &mut to[out_range], s, t, psums);
                }
            }
            if s >= 1 {
                self.ptr.set(l, s, l);
            }
            stats.ll_writes += 1 << s;
        }
        self.mem[l][0]
    }

    fn follow_parents(&mut self, parents: &[usize], _stats: &mut DecodeStats) {
        self.ptr.copy_rows(parents);
    }

    fn stage(&self, l: usize, s: usize) -> &[LlPair<K::Value>] {
        let owner = if s == 0 { l } else { self.ptr.get(l, s) };
        &self.mem[owner][stage_offset(s)..stage_offset(s + 1)]
    }

    fn pointer_rows(&self) -> Option<Vec<Vec<usize>>> {
        Some(self.ptr.rows())
    }
}

/// Per-path private LL state, physically copied when a path is duplicated.
#[derive(Debug, Clone)]
pub struct CopyStore<K: Kernel> {
    n: usize,
    mem: Vec<Vec<LlPair<K::Value>>>,
    xbar: CrossbarScratch,
}

impl<K: Kernel> LlMemory<K> for CopyStore<K> {
    fn new(list_size: usize, n: usize) -> Self {
        CopyStore {
            n,
            mem: vec![vec![LlPair::default(); 1 << n]; list_size],
            xbar: CrossbarScratch::default(),
        }
    }

    fn reset(&mut self) {}

    fn update_path(
        &mut self,
        kernel: &K,
        channel: &[LlPair<K::Value>],
        l: usize,
        t: usize,
        psums: &PartialSums,
        stats: &mut DecodeStats,
    ) -> LlPair<K::Value> {
        let n = self.n;
        if n == 0 {
            return channel[0];
        }
        let mem = &mut self.mem[l];
        for s in (0..first_stage(t, n)).rev() {
            let (lo, hi) = mem.split_at_mut(stage_offset(s + 1));
            let input = if s + 1 == n { channel } else { &hi[..2 << s] };
            compute_stage(kernel, input, &mut lo[stage_offset(s)..], s, t, psums);
            stats.ll_writes += 1 << s;
        }
        mem[0]
    }

    fn follow_parents(&mut self, parents: &[usize], stats: &mut DecodeStats) {
        let stage_pairs = (1u64 << self.n) - 1;
        crossbar(&mut self.mem, parents, &mut self.xbar, |dst, src| {
            dst.copy_from_slice(src);
            stats.ll_copy_writes += stage_pairs;
        });
    }

    fn stage(&self, l: usize, s: usize) -> &[LlPair<K::Value>] {
        &self.mem[l][stage_offset(s)..stage_offset(s + 1)]
    }

    fn pointer_rows(&self) -> Option<Vec<Vec<usize>>> {
        None
    }
}

/// Reusable index buffers for [`crossbar`].
#[derive(Debug, Clone, Default)]
struct CrossbarScratch {
    first: Vec<usize>,
    perm: Vec<usize>,
}

/// `bufs[l] ← bufs[parents[l]]` for all `l` at once.
///
/// The first slot that takes a given parent receives the parent's buffer
/// itself; every further slot gets a copy written into a buffer freed by a
/// discarded path. Buffers are then moved into place by a permutation.
fn crossbar<T>(bufs: &mut [T], parents: &[usize], scratch: &mut CrossbarScratch, mut copy: impl FnMut(&mut T, &T)) {
    let size = bufs.len();
    debug_assert_eq!(parents.len(), size);
    if parents.iter().enumerate().all(|(l, &p)| l == p) {
        return;
    }
    let CrossbarScratch { first, perm } = scratch;
    first.clear();
    first.resize(size, usize::MAX);
    perm.clear();
    perm.resize(size, usize::MAX);
    for (slot, &p) in parents.iter().enumerate() {
        if first[p] == usize::MAX {
            first[p] = slot;
            perm[slot] = p;
        }
    }
    let mut free = (0..size).filter(|&p| first[p] == usize::MAX);
    for slot in 0..size {
        if perm[slot] == usize::MAX {
            let src = free.next().expect("one free buffer per duplicate");
            let (from, to) = pair_mut(bufs, parents[slot], src);
            copy(to, from);
            perm[slot] = src;
        }
    }
    // bufs[i] ← bufs[perm[i]] by following cycles; perm entries are reset
    // to their own index once placed.
    for start in 0..size {
        let mut j = start;
        while perm[j] != start && perm[j] != j {
            let k = perm[j];
            bufs.swap(j, k);
            perm[j] = j;
            j = k;
        }
        perm[j] = j;
    }
}

/// List-SC decoder over a pluggable LL storage.
#[derive(Debug)]
pub struct ListSc<K: Kernel, M: LlMemory<K>> {
    kernel: K,
    n: usize,
    list_size: usize,
    store: M,
    psums: Vec<PartialSums>,
    paths: Vec<Vec<u8>>,
    metrics: Vec<[K::Value; 2]>,
    active: Vec<bool>,
    stats: DecodeStats,
    trace: Option<Vec<TraceRecord<K::Value>>>,
    cands: Vec<PathCandidate<K::Value>>,
    rank: Vec<usize>,
    sel: Selection<K::Value>,
    xbar: CrossbarScratch,
}

/// Pointer-memory list-SC decoder.
pub type ListDecoder<K> = ListSc<K, PointerStore<K>>;

/// Copy-based list-SC decoder used as an oracle.
pub type ReferenceListDecoder<K> = ListSc<K, CopyStore<K>>;

impl<K: Kernel, M: LlMemory<K>> ListSc<K, M> {
    pub fn new(kernel: K, n: usize, list_size: usize) -> Result<Self> {
        if list_size == 0 {
            return param("list size must be at least 1");
        }
        let sat = kernel.saturated();
        Ok(ListSc {
            n,
            list_size,
            store: M::new(list_size, n),
            psums: vec![PartialSums::new(n); list_size],
            paths: vec![vec![0; 1 << n]; list_size],
            metrics: vec![[sat; 2]; list_size],
            active: vec![false; list_size],
            stats: DecodeStats::default(),
            trace: None,
            cands: Vec::with_capacity(2 * list_size),
            rank: Vec::with_capacity(2 * list_size),
            sel: Selection::default(),
            xbar: CrossbarScratch::default(),
            kernel,
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    /// Turns per-bit trace recording on or off.
    pub fn set_trace(&mut self, on: bool) {
        self.trace = on.then(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord<K::Value>> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn stats(&self) -> DecodeStats {
        self.stats
    }

    pub fn store(&self) -> &M {
        &self.store
    }

    pub fn metrics(&self) -> &[[K::Value; 2]] {
        &self.metrics
    }

    pub fn is_active(&self, l: usize) -> bool {
        self.active[l]
    }

    pub fn path(&self, l: usize) -> &[u8] {
        &self.paths[l]
    }

    pub fn partial_sums(&self, l: usize) -> &PartialSums {
        &self.psums[l]
    }

    /// Path `l`'s stage-`s` LLs as seen through the storage (`s = n` is the
    /// channel).
    pub fn stage_view<'a>(&'a self, channel: &'a [LlPair<K::Value>], l: usize, s: usize) -> &'a [LlPair<K::Value>] {
        if s == self.n {
            channel
        } else {
            self.store.stage(l, s)
        }
    }

    /// Starts a frame with one active (empty) path in slot 0.
    pub fn reset(&mut self) {
        self.store.reset();
        self.active.fill(false);
        self.active[0] = true;
        for ps in &mut self.psums {
            ps.clear();
        }
        self.stats = DecodeStats::default();
        let sat = self.kernel.saturated();
        self.metrics.fill([sat; 2]);
    }

    /// Runs the SC stage updates of every active path for 0-based bit `t`
    /// and records their stage-0 pairs as metrics.
    pub fn compute_metrics(&mut self, channel: &[LlPair<K::Value>], t: usize) {
        let sat = self.kernel.saturated();
        for l in 0..self.list_size {
            self.metrics[l] = if self.active[l] {
                let m = self
                    .store
                    .update_path(&self.kernel, channel, l, t, &self.psums[l], &mut self.stats);
                [m.v0, m.v1]
            } else {
                [sat; 2]
            };
        }
    }

    /// Extends every active path with a frozen 0 at bit `t`.
    pub fn frozen_extend(&mut self, t: usize) {
        for l in 0..self.list_size {
            if self.active[l] {
                self.paths[l][t] = 0;
                self.psums[l].update(t, 0);
            }
        }
    }

    /// Picks the `L` best of the `2L` extensions of the current metrics.
    pub fn select(&self, allow_one: bool) -> Result<Selection<K::Value>> {
        path_selection(&self.metrics, &self.active, allow_one)
    }

    /// Copies pointer rows, partial sums and path bits from each survivor's
    /// parent (all reads before all writes), then appends the survivor's bit.
    pub fn apply_selection(&mut self, sel: &Selection<K::Value>, t: usize) {
        self.store.follow_parents(&sel.parents, &mut self.stats);
        crossbar(&mut self.psums, &sel.parents, &mut self.xbar, |dst, src| dst.copy_from(src));
        crossbar(&mut self.paths, &sel.parents, &mut self.xbar, |dst, src| {
            dst[..t].copy_from_slice(&src[..t])
        });
        for l in 0..self.list_size {
            self.active[l] = sel.live[l];
            if sel.live[l] {
                self.paths[l][t] = sel.bits[l];
                self.psums[l].update(t, sel.bits[l]);
            }
        }
    }

    /// Decodes one frame of channel LL pairs.
    pub fn decode(&mut self, code: &PolarCode, channel: &[LlPair<K::Value>]) -> Result<ListOutput<K::Value>> {
        if code.n() != self.n || channel.len() != code.len() {
            return param(format!(
                "decoder for N={} got code N={} and {} channel pairs",
                1usize << self.n,
                code.len(),
                channel.len()
            ));
        }
        let len = code.len();
        self.reset();
        let mut metric = self.kernel.saturated();
        for t in 0..len {
            self.compute_metrics(channel, t);
            let frozen = code.is_frozen(t);
            let metrics = self.trace.as_ref().map(|_| (self.metrics.clone(), self.active.clone()));
            let selection = if frozen && t + 1 < len {
                self.frozen_extend(t);
                None
            } else {
                // a frozen last bit still selects, restricted to bit 0
                fill_candidates(&self.metrics, &self.active, !frozen, &mut self.cands);
                let mut sel = std::mem::take(&mut self.sel);
                select_best_into(&self.cands, self.list_size, &mut self.rank, &mut sel)?;
                self.apply_selection(&sel, t);
                metric = sel.metrics[0];
                let record = self.trace.is_some().then(|| (sel.parents.clone(), sel.bits.clone()));
                self.sel = sel;
                record
            };
            if let (Some(trace), Some((metrics, active))) = (self.trace.as_mut(), metrics) {
                trace.push(TraceRecord {
                    bit_index: t + 1,
                    frozen,
                    metrics,
                    active,
                    selection,
                    pointers: self.store.pointer_rows(),
                });
            }
        }
        Ok(ListOutput {
            u: self.paths[0].clone(),
            metric,
        })
    }
}

/// One-shot pointer-memory list decode.
pub fn list_decode<K: Kernel + Clone>(
    code: &PolarCode,
    channel: &[LlPair<K::Value>],
    list_size: usize,
    kernel: &K,
) -> Result<ListOutput<K::Value>> {
    ListDecoder::new(kernel.clone(), code.n(), list_size)?.decode(code, channel)
}

/// One-shot copy-based list decode.
pub fn reference_list_decode<K: Kernel + Clone>(
    code: &PolarCode,
    channel: &[LlPair<K::Value>],
    list_size: usize,
    kernel: &K,
) -> Result<ListOutput<K::Value>> {
    ReferenceListDecoder::new(kernel.clone(), code.n(), list_size)?.decode(code, channel)
}

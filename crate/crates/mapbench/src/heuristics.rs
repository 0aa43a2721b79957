//! Greedy, Max-Regret, ROM and Shift-ROM, implemented so that every pass
//! over the weight tensor is a pruned row-major scan. Greedy and Max-Regret
//! also come in deliberately plain reference versions that the tests hold
//! the optimized ones to.
//!
//! All tie-breaking is "first in row-major scan order": buffers and regret
//! slots replace entries only on strictly smaller weight, the regret argmax
//! takes the first maximal slot in (dimension-major, value-minor) order, and
//! Shift-ROM keeps the earliest best rotation. One deterministic convention
//! makes the naive/optimized oracle equivalences exact.

use std::ops::ControlFlow;

use crate::ap::{solve_ap, CostMatrix};
use crate::instance::{
    advance_coords, scan_available, try_scan_available, Assignment, Instance, PartialAssignment,
    Point, Weight,
};

/// Default capacity of the Greedy candidate buffer.
pub const DEFAULT_BUFFER_CAPACITY: usize = 64;

/// Weight-array read counts for one heuristic run. A plain counter kept next
/// to every read; reporting is gated by the caller.
#[derive(Debug, Default, Clone)]
pub struct RunMetrics {
    /// Total weights read from the tensor.
    pub weight_reads: u64,
    /// Reads per scan, in scan order. Greedy records one entry per buffer
    /// fill, Max-Regret one per iteration, ROM one per fixed coordinate,
    /// Shift-ROM additionally one for the pair-sum precompute.
    pub scan_reads: Vec<u64>,
}

impl RunMetrics {
    pub fn new() -> RunMetrics {
        RunMetrics::default()
    }

    fn record_scan(&mut self, reads: u64) {
        self.weight_reads += reads;
        self.scan_reads.push(reads);
    }
}

/// Tunables for the optimized Greedy.
#[derive(Debug, Clone)]
pub struct GreedyConfig {
    /// Candidate buffer capacity; the effective size each scan is
    /// `min(buffer_capacity, |available set|)`.
    pub buffer_capacity: usize,
    /// Known lower bound on every available weight, when the instance family
    /// guarantees one (the random family's is 1). `None` means unknown; the
    /// bound is learned after the first scan either way.
    pub min_weight_hint: Option<Weight>,
}

impl Default for GreedyConfig {
    fn default() -> GreedyConfig {
        GreedyConfig {
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            min_weight_hint: None,
        }
    }
}

/// Sorted buffer of the lightest (index, weight) pairs seen in a scan.
/// Non-decreasing by weight, ties in insertion order; insertion into a full
/// buffer happens only on strictly smaller weight.
struct CandidateBuffer {
    entries: Vec<(usize, Weight)>,
    cap: usize,
}

impl CandidateBuffer {
    fn new(cap: usize) -> CandidateBuffer {
        CandidateBuffer {
            entries: Vec::with_capacity(cap),
            cap,
        }
    }

    fn offer(&mut self, idx: usize, w: Weight) {
        if self.entries.len() == self.cap {
            if w >= self.entries[self.cap - 1].1 {
                return;
            }
            self.entries.pop();
        }
        let pos = self.entries.partition_point(|&(_, ew)| ew <= w);
        self.entries.insert(pos, (idx, w));
    }

    fn is_full(&self) -> bool {
        self.entries.len() == self.cap
    }

    fn max_weight(&self) -> Option<Weight> {
        self.entries.last().map(|&(_, w)| w)
    }

    fn entries(&self) -> &[(usize, Weight)] {
        &self.entries
    }
}

/// Textbook Greedy: n full passes, each appending the minimum-weight
/// available vector (ties to the smallest flat index). Oracle for [`greedy`].
pub fn greedy_naive(inst: &Instance) -> Assignment {
    let n = inst.n();
    let s = inst.s();
    let weights = inst.weights();
    let mut a = PartialAssignment::for_instance(inst);
    for _ in 0..n {
        let mut best: Option<(usize, Weight)> = None;
        let mut coords = vec![1u32; s];
        let mut idx = 0usize;
        loop {
            if (0..s).all(|d| !a.is_value_used(d, coords[d])) {
                let w = weights[idx];
                match best {
                    Some((_, bw)) if bw <= w => {}
                    _ => best = Some((idx, w)),
                }
            }
            idx += 1;
            if !advance_coords(&mut coords, n) {
                break;
            }
        }
        let (bidx, _) = best.expect("a non-full assignment always extends");
        let appended = a.try_extend(inst.coords_of(bidx).expect("valid index"));
        debug_assert!(appended);
    }
    Assignment::from_partial(a).expect("n iterations fill the assignment")
}

/// Buffered Greedy with the minimum-weight skip rule.
///
/// Each round scans the available set once, keeping the
/// `min(buffer_capacity, |available|)` lightest vectors; the scan stops early
/// once the full buffer holds only weights equal to the current lower bound,
/// since nothing lighter can follow. The buffer is then drained in weight
/// order, appending every vector that is still feasible, and the bound is
/// raised to the heaviest buffered weight before the next scan.
///
/// Returns the same objective as [`greedy_naive`].
pub fn greedy(inst: &Instance) -> Assignment {
    greedy_with(inst, &GreedyConfig::default(), &mut RunMetrics::new())
}

pub fn greedy_with(inst: &Instance, cfg: &GreedyConfig, metrics: &mut RunMetrics) -> Assignment {
    let n = inst.n();
    let s = inst.s();
    let mut a = PartialAssignment::for_instance(inst);
    let mut bound = cfg.min_weight_hint;
    while !a.is_full() {
        let available = ((n - a.len()) as u128).pow(s as u32);
        let k = available.min(cfg.buffer_capacity.max(1) as u128) as usize;
        let mut buf = CandidateBuffer::new(k);
        let reads = try_scan_available(&a, inst, |idx, _, w| {
            buf.offer(idx, w);
            match bound {
                Some(b) if buf.is_full() && buf.max_weight() == Some(b) => ControlFlow::Break(()),
                _ => ControlFlow::Continue(()),
            }
        });
        metrics.record_scan(reads);
        let next_bound = buf.max_weight().expect("available set is never empty");
        let before = a.len();
        for &(idx, _) in buf.entries() {
            a.try_extend(inst.coords_of(idx).expect("scanned index"));
            if a.is_full() {
                break;
            }
        }
        debug_assert!(a.len() > before, "the lightest buffered vector is feasible");
        bound = Some(next_bound);
    }
    Assignment::from_partial(a).expect("loop exits only when full")
}

/// The two lightest available vectors per (value, dimension) slot, under the
/// single-scan update rule: the best entry is replaced only on strictly
/// smaller weight, so ties stay with the earliest vector in scan order.
struct RegretTable {
    s: usize,
    n: usize,
    // slot (d, v) at d * n + v; each is (best, second)
    slots: Vec<[Option<(usize, Weight)>; 2]>,
}

impl RegretTable {
    fn new(s: usize, n: usize) -> RegretTable {
        RegretTable {
            s,
            n,
            slots: vec![[None, None]; s * n],
        }
    }

    fn update(&mut self, coords: &[u32], idx: usize, w: Weight) {
        for (d, &value) in coords.iter().enumerate() {
            let slot = &mut self.slots[d * self.n + value as usize - 1];
            match slot[0] {
                Some((_, bw)) if w >= bw => match slot[1] {
                    Some((_, sw)) if w >= sw => {}
                    _ => slot[1] = Some((idx, w)),
                },
                _ => {
                    slot[1] = slot[0];
                    slot[0] = Some((idx, w));
                }
            }
        }
    }

    /// Flat index of the lightest vector in the maximum-regret slot. A slot
    /// with no second entry counts as infinite regret; among equal regrets
    /// the first slot in (dimension, value) order wins.
    fn max_regret_pick(&self, a: &PartialAssignment) -> Option<usize> {
        let mut best: Option<(u64, usize)> = None;
        for d in 0..self.s {
            for v in 0..self.n {
                if a.is_value_used(d, v as u32 + 1) {
                    continue;
                }
                let slot = &self.slots[d * self.n + v];
                let (bidx, bw) = match slot[0] {
                    Some(entry) => entry,
                    // cannot happen while the assignment is not full: every
                    // unused value admits at least one available vector
                    None => {
                        debug_assert!(false, "unused slot with no available vector");
                        continue;
                    }
                };
                let regret = match slot[1] {
                    Some((_, sw)) => (sw - bw) as u64,
                    None => u64::MAX,
                };
                match best {
                    Some((r, _)) if r >= regret => {}
                    _ => best = Some((regret, bidx)),
                }
            }
        }
        best.map(|(_, idx)| idx)
    }
}

/// Textbook Max-Regret: each iteration examines every (dimension, unused
/// value) slot with its own pass over the slot's vectors. Oracle for
/// [`max_regret`]; same tie rules, so the assignments match exactly.
pub fn max_regret_naive(inst: &Instance) -> Assignment {
    let n = inst.n() as u32;
    let s = inst.s();
    let mut a = PartialAssignment::for_instance(inst);
    while !a.is_full() {
        let mut chosen: Option<(u64, usize)> = None;
        for d in 0..s {
            for v in 1..=n {
                if a.is_value_used(d, v) {
                    continue;
                }
                let (best, second) = slot_two_lightest(inst, &a, d, v);
                let (bidx, bw) = best.expect("unused value admits an available vector");
                let regret = match second {
                    Some((_, sw)) => (sw - bw) as u64,
                    None => u64::MAX,
                };
                match chosen {
                    Some((r, _)) if r >= regret => {}
                    _ => chosen = Some((regret, bidx)),
                }
            }
        }
        let (_, idx) = chosen.expect("non-full assignment leaves open slots");
        let appended = a.try_extend(inst.coords_of(idx).expect("valid index"));
        debug_assert!(appended);
    }
    Assignment::from_partial(a).expect("loop exits only when full")
}

/// An (index, weight) slot entry; None while the slot has seen no vector.
type SlotEntry = Option<(usize, Weight)>;

/// Two lightest available vectors with coordinate `d` pinned to `v`, in
/// ascending flat-index order, ties to the earlier vector.
fn slot_two_lightest(
    inst: &Instance,
    a: &PartialAssignment,
    d: usize,
    v: u32,
) -> (SlotEntry, SlotEntry) {
    let s = inst.s();
    let n = inst.n();
    let weights = inst.weights();
    let mut coords = vec![1u32; s];
    coords[d] = v;
    let mut best: SlotEntry = None;
    let mut second: SlotEntry = None;
    loop {
        if (0..s).all(|dim| !a.is_value_used(dim, coords[dim])) {
            let mut idx = 0usize;
            for &c in &coords {
                idx = idx * n + (c as usize - 1);
            }
            let w = weights[idx];
            match best {
                Some((_, bw)) if w >= bw => match second {
                    Some((_, sw)) if w >= sw => {}
                    _ => second = Some((idx, w)),
                },
                _ => {
                    second = best;
                    best = Some((idx, w));
                }
            }
        }
        if !advance_skipping(&mut coords, n, d) {
            break;
        }
    }
    (best, second)
}

/// Row-major odometer over all coordinates except the pinned one.
fn advance_skipping(coords: &mut [u32], n: usize, pinned: usize) -> bool {
    for p in (0..coords.len()).rev() {
        if p == pinned {
            continue;
        }
        if (coords[p] as usize) < n {
            coords[p] += 1;
            return true;
        }
        coords[p] = 1;
    }
    false
}

/// Single-scan Max-Regret: each of the n iterations performs exactly one
/// pass over the available set, building a fresh regret table, then appends
/// the lightest vector of the maximum-regret slot.
pub fn max_regret(inst: &Instance) -> Assignment {
    max_regret_with(inst, &mut RunMetrics::new())
}

pub fn max_regret_with(inst: &Instance, metrics: &mut RunMetrics) -> Assignment {
    let s = inst.s();
    let n = inst.n();
    let mut a = PartialAssignment::for_instance(inst);
    while !a.is_full() {
        let mut table = RegretTable::new(s, n);
        let reads = scan_available(&a, inst, |idx, coords, w| table.update(coords, idx, w));
        metrics.record_scan(reads);
        let idx = table
            .max_regret_pick(&a)
            .expect("non-full assignment leaves open slots");
        let appended = a.try_extend(inst.coords_of(idx).expect("valid index"));
        debug_assert!(appended);
    }
    Assignment::from_partial(a).expect("loop exits only when full")
}

/// A cyclic reordering of the dimensions: shift `r` views the instance in
/// the order `(X_{s-r+1}, ..., X_s, X_1, ..., X_{s-r})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionRotation {
    shift: usize,
}

impl DimensionRotation {
    pub fn identity() -> DimensionRotation {
        DimensionRotation { shift: 0 }
    }

    pub fn new(shift: usize) -> DimensionRotation {
        DimensionRotation { shift }
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// The s rotations Shift-ROM tries, in order: identity first, then each
    /// successive cyclic shift.
    pub fn all(s: usize) -> impl Iterator<Item = DimensionRotation> {
        (0..s).map(|shift| DimensionRotation { shift })
    }

    /// Original dimension (0-based) seen at rotated position `pos`.
    pub fn original_dim(&self, pos: usize, s: usize) -> usize {
        (pos + s - self.shift % s) % s
    }
}

/// ROM: starts from the trivial assignment (row i = (i, i, ..., i)) and, for
/// each coordinate after the first, aggregates the weights of all vectors
/// compatible with each (row, value) pair into an n x n matrix, solves the
/// 2-AP on it, and fixes that coordinate to the optimal matching.
///
/// The rotation is applied internally and inverted on output, so the result
/// is a feasible assignment in original coordinate order.
pub fn rom(inst: &Instance, rot: DimensionRotation) -> Assignment {
    rom_with(inst, rot, &mut RunMetrics::new())
}

pub fn rom_with(inst: &Instance, rot: DimensionRotation, metrics: &mut RunMetrics) -> Assignment {
    rom_core(inst, rot, None, metrics)
}

fn rom_core(
    inst: &Instance,
    rot: DimensionRotation,
    first_iter: Option<&PairSumMatrices>,
    metrics: &mut RunMetrics,
) -> Assignment {
    let s = inst.s();
    let n = inst.n();
    let weights = inst.weights();
    let dim_of_pos: Vec<usize> = (0..s).map(|p| rot.original_dim(p, s)).collect();
    let pos_stride: Vec<usize> = dim_of_pos.iter().map(|&d| inst.stride(d)).collect();
    // rows hold rotated-space coordinates, fixed left to right
    let mut rows: Vec<Vec<u32>> = (0..n).map(|i| vec![i as u32 + 1; s]).collect();

    for fix in 1..s {
        let mut m = vec![0u64; n * n];
        match (fix, first_iter) {
            (1, Some(ps)) => {
                // pair-sum matrix of the leading dimension pair, aggregated
                // once up front; rotated row i starts at value i+1
                m.copy_from_slice(ps.matrix(dim_of_pos[0]));
            }
            _ => {
                let mut reads = 0u64;
                let col_stride = pos_stride[fix];
                let free = &pos_stride[fix + 1..];
                for (i, row) in rows.iter().enumerate() {
                    let base: usize = (0..fix)
                        .map(|p| (row[p] as usize - 1) * pos_stride[p])
                        .sum();
                    for v in 0..n {
                        m[i * n + v] = sum_block(weights, base + v * col_stride, free, n, &mut reads);
                    }
                }
                metrics.record_scan(reads);
            }
        }
        let (perm, _) = solve_ap(&CostMatrix::new(n, m).expect("n*n entries"));
        for (i, row) in rows.iter_mut().enumerate() {
            row[fix] = perm.apply(i) as u32 + 1;
        }
    }

    let mut pa = PartialAssignment::for_instance(inst);
    for row in &rows {
        let mut coords = vec![0u32; s];
        for (p, &value) in row.iter().enumerate() {
            coords[dim_of_pos[p]] = value;
        }
        let appended = pa.try_extend(Point::new(coords));
        debug_assert!(appended, "each 2-AP step assigns distinct values");
    }
    Assignment::from_partial(pa).expect("rom fixes every coordinate")
}

/// Sums the weights of the sub-block spanned by `strides`, reading each
/// weight once; the innermost level is a tight strided loop.
fn sum_block(weights: &[Weight], base: usize, strides: &[usize], n: usize, reads: &mut u64) -> u64 {
    match strides {
        [] => {
            *reads += 1;
            weights[base] as u64
        }
        [stride] => {
            *reads += n as u64;
            let mut acc = 0u64;
            for t in 0..n {
                acc += weights[base + t * stride] as u64;
            }
            acc
        }
        [stride, rest @ ..] => {
            let mut acc = 0u64;
            for t in 0..n {
                acc += sum_block(weights, base + t * stride, rest, n, reads);
            }
            acc
        }
    }
}

/// Per-dimension n x n aggregates of weights over consecutive coordinate
/// pairs, with wraparound: matrix `d` sums w(e) over all e with the given
/// values at dimensions `d` and `(d+1) mod s`.
#[derive(Debug, Clone)]
pub struct PairSumMatrices {
    s: usize,
    n: usize,
    mats: Vec<Vec<u64>>,
}

impl PairSumMatrices {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix for dimension `d` (0-based), row-major over (value at d,
    /// value at (d+1) mod s).
    pub fn matrix(&self, d: usize) -> &[u64] {
        &self.mats[d]
    }

    /// Entry at 1-based values `(i, v)`.
    pub fn entry(&self, d: usize, i: u32, v: u32) -> u64 {
        self.mats[d][(i as usize - 1) * self.n + (v as usize - 1)]
    }

    /// Sum of all entries of matrix `d`; equals the instance's total weight
    /// for every `d`.
    pub fn matrix_total(&self, d: usize) -> u64 {
        self.mats[d].iter().sum()
    }
}

/// One full row-major scan of the tensor, accumulating all s pair-sum
/// matrices at once.
pub fn precompute_pair_sums(inst: &Instance) -> PairSumMatrices {
    precompute_pair_sums_with(inst, &mut RunMetrics::new())
}

pub fn precompute_pair_sums_with(inst: &Instance, metrics: &mut RunMetrics) -> PairSumMatrices {
    let s = inst.s();
    let n = inst.n();
    let weights = inst.weights();
    let mut mats = vec![vec![0u64; n * n]; s];
    let mut coords = vec![1u32; s];
    let mut idx = 0usize;
    let mut reads = 0u64;
    loop {
        let w = weights[idx] as u64;
        reads += 1;
        for d in 0..s {
            let i = coords[d] as usize - 1;
            let v = coords[(d + 1) % s] as usize - 1;
            mats[d][i * n + v] += w;
        }
        idx += 1;
        if !advance_coords(&mut coords, n) {
            break;
        }
    }
    metrics.record_scan(reads);
    PairSumMatrices { s, n, mats }
}

/// Shift-ROM: one ROM run per cyclic dimension rotation, sharing a single
/// pair-sum precompute that serves as every run's first-iteration matrix;
/// returns the minimum-objective result, earliest rotation on ties.
///
/// Never worse than `rom(inst, DimensionRotation::identity())`, which is the
/// first rotation tried.
pub fn shift_rom(inst: &Instance) -> Assignment {
    shift_rom_with(inst, &mut RunMetrics::new())
}

pub fn shift_rom_with(inst: &Instance, metrics: &mut RunMetrics) -> Assignment {
    let pair_sums = precompute_pair_sums_with(inst, metrics);
    let mut best: Option<(u64, Assignment)> = None;
    for rot in DimensionRotation::all(inst.s()) {
        let candidate = rom_core(inst, rot, Some(&pair_sums), metrics);
        let objective = candidate.objective(inst).expect("same instance");
        match &best {
            Some((b, _)) if *b <= objective => {}
            _ => best = Some((objective, candidate)),
        }
    }
    best.expect("s >= 2 rotations").1
}

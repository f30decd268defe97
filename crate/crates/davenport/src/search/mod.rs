//! Exhaustive branch-and-prune computation of `D_m(A)`.
//!
//! The search walks multisets of *nonzero* ring elements in nondecreasing
//! element order, so each multiset is generated exactly once. A state is
//! extended only while it stays m-zero-free (the zero-free family is closed
//! under sub-multisets, so nothing above a failure can succeed), and only
//! the freshly introduced copy needs checking: every sub-multiset that
//! avoids it was already vetted in the parent state. Zero itself never
//! appears: a multiset of length >= m containing 0 has an m-element
//! sub-multiset with product 0, and maximal zero-free multisets are never
//! shorter than m.
//!
//! When enabled, unit-orbit symmetry keeps only states that are minimal in
//! their orbit under multiplication by units (scaling by a unit u maps
//! zero-free multisets to zero-free multisets, since `e_m(uS) = u^m e_m(S)`).
//! Minimality is hereditary: removing the largest element of an orbit-minimal
//! multiset leaves an orbit-minimal multiset, so pruning non-minimal states
//! never disconnects the tree.

pub mod cache;

use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bounds::{bounds_report, BoundsError};
use crate::ring::{is_prime, RingElem, RingError, RingSpec};
use crate::symfun::{trunc_mul_linear, MultisetSeq, SymfunError};

/// Largest ring the search will materialize an element table for.
pub const MAX_SEARCH_CARDINALITY: u64 = 1 << 20;
/// Cap on the number of sub-multisets a single feasibility check may visit.
pub const FEASIBILITY_ENUM_CAP: u64 = 1_000_000_000;
/// Cap on collected witnesses in all-witness mode.
pub const MAX_WITNESSES: usize = 10_000;
/// Deepest frontier used to fan work out across threads.
const FRONTIER_DEPTH: u64 = 3;

// stop-flag states
const RUN: u8 = 0;
const CERTIFIED: u8 = 1;
const LENGTH_CAPPED: u8 = 2;
const NODE_CAPPED: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(
        "no theorem-backed upper bound applies to this ring and m; \
         pass an explicit maximum length to bound the search"
    )]
    NoUpperBound,
    #[error("search state too large: {0}")]
    StateTooLarge(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("wrong residue class: {0}")]
    WrongResidueClass(&'static str),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
}

/// Knobs for [`compute_d`]. The default searches single-threaded with unit
/// symmetry on, no node budget, and the depth cap taken from the bounds.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Longest sequence to consider. The effective cap is the minimum of
    /// this and the best theorem-backed cap; without either the search
    /// refuses to start.
    pub max_length: Option<u64>,
    /// Prune states that are not minimal in their unit orbit.
    pub use_unit_symmetry: bool,
    /// Worker threads for the subtree fan-out.
    pub thread_budget: usize,
    /// Abort (with a partial, non-exhaustive outcome) after this many nodes.
    pub node_cap: Option<u64>,
    /// Additionally enumerate every maximum-length zero-free multiset
    /// (orbit representatives when symmetry is on).
    pub collect_all_witnesses: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_length: None,
            use_unit_symmetry: true,
            thread_budget: 1,
            node_cap: None,
            collect_all_witnesses: false,
        }
    }
}

/// Maximum-length witnesses gathered by all-witness mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub witnesses: Vec<MultisetSeq>,
    /// False when the node budget or [`MAX_WITNESSES`] cut the enumeration.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub ring: RingSpec,
    pub m: u64,
    /// `D_m` when `exhaustive`, otherwise the best lower bound established.
    pub value: u64,
    /// A longest m-zero-free multiset found (length `value - 1`).
    pub witness: MultisetSeq,
    pub all_witnesses: Option<WitnessSet>,
    pub nodes_explored: u64,
    pub exhaustive: bool,
    pub elapsed: Duration,
    /// Depth cap the search ran under.
    pub depth_cap: u64,
    /// True when the cap came from a theorem and a cap-length zero-free
    /// multiset was found, pinning the value exactly.
    pub certified_by_cap: bool,
}

/// Verdict of [`is_m_zero_free`]: either the multiset is m-zero-free, or a
/// minimal violating sub-multiset (by length, then by expanded
/// lexicographic order) is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroFreeReport {
    pub zero_free: bool,
    pub violator: Option<MultisetSeq>,
}

struct Ctx<'a> {
    elements: &'a [RingElem],
    width: usize,
    moduli: &'a [u64],
    m: u64,
    cap: u64,
    certifying: bool,
    collect: bool,
    perms: &'a [Vec<u32>],
    stop: &'a AtomicU8,
    nodes: &'a AtomicU64,
    node_cap: u64,
}

#[derive(Debug, Clone)]
struct Seed {
    counts: Vec<u16>,
    len: u64,
    /// Smallest element index the state may be extended by (its support max).
    start: u32,
}

#[derive(Debug)]
struct TaskResult {
    best_len: u64,
    best_counts: Vec<u16>,
    collected: Vec<Vec<u16>>,
    overflow: bool,
}

/// True when `counts` is lexicographically minimal in its unit orbit. For
/// each unit permutation, walking indices upward, the first index where the
/// permuted count differs decides: a larger permuted count means the scaled
/// multiset has more copies of a smaller element, i.e. precedes this one.
fn is_orbit_minimal(perms: &[Vec<u32>], counts: &[u16]) -> bool {
    'perm: for perm in perms {
        for (j, &pj) in perm.iter().enumerate() {
            let cp = counts[pj as usize];
            let cj = counts[j];
            if cp != cj {
                if cp > cj {
                    return false;
                }
                continue 'perm;
            }
        }
    }
    true
}

/// Decides whether the state stays m-zero-free after its count at `b` was
/// incremented (counts already reflect the increment). Only sub-multisets
/// using all `counts[b]` copies of element `b` are new; they are enumerated
/// over the rest of the support with shared truncated polynomials.
fn increment_feasible(ctx: &Ctx, counts: &[u16], b: usize, len: u64) -> Result<bool, SearchError> {
    if len < ctx.m {
        return Ok(true); // no sub-multiset reaches size m
    }
    let mut enumerated: u64 = 1;
    for (a, &c) in counts.iter().enumerate() {
        if a != b && c > 0 {
            enumerated = enumerated.saturating_mul(c as u64 + 1);
            if enumerated > FEASIBILITY_ENUM_CAP {
                return Err(SearchError::StateTooLarge(format!(
                    "feasibility check needs more than {FEASIBILITY_ENUM_CAP} sub-multisets"
                )));
            }
        }
    }
    let w = ctx.width;
    let mu = ctx.m as usize;
    let mut f = vec![0u64; (mu + 1) * w];
    for j in 0..w {
        f[j] = 1 % ctx.moduli[j];
    }
    let rb = &ctx.elements[b].residues;
    for _ in 0..counts[b] {
        trunc_mul_linear(&mut f, w, mu, rb, ctx.moduli);
    }
    let others: Vec<(usize, u16)> = counts
        .iter()
        .enumerate()
        .filter(|&(a, &c)| a != b && c > 0)
        .map(|(a, &c)| (a, c))
        .collect();
    let mut suffix = vec![0u64; others.len() + 1];
    for i in (0..others.len()).rev() {
        suffix[i] = suffix[i + 1] + others[i].1 as u64;
    }
    Ok(!exists_zero(ctx, &others, &suffix, 0, &f, counts[b] as u64))
}

/// True if some completion of the partial sub-multiset (elements of `others`
/// from `pos` on still free) reaches total size >= m with e_m = 0.
fn exists_zero(
    ctx: &Ctx,
    others: &[(usize, u16)],
    suffix: &[u64],
    pos: usize,
    f: &[u64],
    size: u64,
) -> bool {
    let w = ctx.width;
    let mu = ctx.m as usize;
    if pos == others.len() {
        return size >= ctx.m && f[mu * w..].iter().all(|&x| x == 0);
    }
    if size + suffix[pos] < ctx.m {
        return false; // cannot reach size m any more
    }
    let (a, ca) = others[pos];
    let ra = &ctx.elements[a].residues;
    let mut g = f.to_vec();
    for k in 0..=ca {
        if k > 0 {
            trunc_mul_linear(&mut g, w, mu, ra, ctx.moduli);
        }
        if exists_zero(ctx, others, suffix, pos + 1, &g, size + k as u64) {
            return true;
        }
    }
    false
}

/// One more node: bump the counter, honor the node budget, report whether
/// the walk should continue.
fn admit_node(ctx: &Ctx) -> bool {
    let n = ctx.nodes.fetch_add(1, Ordering::Relaxed) + 1;
    if n > ctx.node_cap {
        let _ = ctx
            .stop
            .compare_exchange(RUN, NODE_CAPPED, Ordering::Relaxed, Ordering::Relaxed);
        return false;
    }
    ctx.stop.load(Ordering::Relaxed) == RUN
}

/// What to do after a state was accepted.
enum Accepted {
    Descend,
    Leaf,
    StopAll,
}

/// Shared handling of a freshly accepted state: track the incumbent, handle
/// cap hits (certification, user-cap stop, or collection).
fn accept_state(ctx: &Ctx, counts: &[u16], len: u64, res: &mut TaskResult) -> Accepted {
    if ctx.collect {
        if len == ctx.cap {
            if res.collected.len() >= MAX_WITNESSES {
                res.overflow = true;
            } else {
                res.collected.push(counts.to_vec());
            }
            return Accepted::Leaf;
        }
        return Accepted::Descend;
    }
    if len > res.best_len {
        res.best_len = len;
        res.best_counts = counts.to_vec();
    }
    if len == ctx.cap {
        let verdict = if ctx.certifying {
            CERTIFIED
        } else {
            LENGTH_CAPPED
        };
        let _ = ctx
            .stop
            .compare_exchange(RUN, verdict, Ordering::Relaxed, Ordering::Relaxed);
        return Accepted::StopAll;
    }
    Accepted::Descend
}

/// Depth-first walk of the subtree rooted at `seed` (iterative, so deep
/// caps cannot overflow the stack). `trying[lvl]` is the candidate element
/// index currently examined at that level; descending into candidate `b`
/// pushes a child level whose candidates start at `b`.
fn walk(ctx: &Ctx, seed: &Seed) -> Result<TaskResult, SearchError> {
    let mut res = TaskResult {
        best_len: seed.len,
        best_counts: seed.counts.clone(),
        collected: Vec::new(),
        overflow: false,
    };
    let k = ctx.elements.len() as u32;
    let mut counts = seed.counts.clone();
    let mut len = seed.len;
    if len >= ctx.cap {
        return Ok(res);
    }
    let mut trying: Vec<u32> = vec![seed.start];
    loop {
        let lvl = trying.len() - 1;
        let b = trying[lvl];
        if b >= k {
            trying.pop();
            match trying.last_mut() {
                None => break,
                Some(parent) => {
                    counts[*parent as usize] -= 1;
                    len -= 1;
                    *parent += 1;
                    continue;
                }
            }
        }
        if !admit_node(ctx) {
            break;
        }
        let bi = b as usize;
        counts[bi] += 1;
        len += 1;
        if (ctx.perms.is_empty() || is_orbit_minimal(ctx.perms, &counts))
            && increment_feasible(ctx, &counts, bi, len)?
        {
            match accept_state(ctx, &counts, len, &mut res) {
                Accepted::Descend => {
                    trying.push(b);
                    continue;
                }
                Accepted::Leaf => {}
                Accepted::StopAll => return Ok(res),
            }
        }
        counts[bi] -= 1;
        len -= 1;
        trying[lvl] += 1;
    }
    Ok(res)
}

/// Expands the tree breadth-first (in lexicographic order) until there are
/// enough disjoint subtrees to occupy the workers, recording incumbents and
/// cap hits exactly like the depth-first walk.
fn expand_frontier(ctx: &Ctx, want: usize, res: &mut TaskResult) -> Result<Vec<Seed>, SearchError> {
    let k = ctx.elements.len() as u32;
    let mut frontier = vec![Seed {
        counts: vec![0; k as usize],
        len: 0,
        start: 0,
    }];
    for _depth in 0..FRONTIER_DEPTH.min(ctx.cap) {
        if frontier.len() >= want {
            break;
        }
        let mut next = Vec::new();
        for seed in &frontier {
            if seed.len >= ctx.cap {
                continue;
            }
            for b in seed.start..k {
                if !admit_node(ctx) {
                    return Ok(Vec::new());
                }
                let bi = b as usize;
                let mut counts = seed.counts.clone();
                counts[bi] += 1;
                let len = seed.len + 1;
                if (ctx.perms.is_empty() || is_orbit_minimal(ctx.perms, &counts))
                    && increment_feasible(ctx, &counts, bi, len)?
                {
                    match accept_state(ctx, &counts, len, res) {
                        Accepted::Descend => next.push(Seed {
                            counts,
                            len,
                            start: b,
                        }),
                        Accepted::Leaf => {}
                        Accepted::StopAll => return Ok(Vec::new()),
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}

/// Runs one full search phase (best-finding or collection) and merges task
/// results in deterministic order.
fn run_phase(ctx: &Ctx, thread_budget: usize) -> Result<TaskResult, SearchError> {
    let root = Seed {
        counts: vec![0; ctx.elements.len()],
        len: 0,
        start: 0,
    };
    if thread_budget <= 1 {
        return walk(ctx, &root);
    }
    let mut merged = TaskResult {
        best_len: 0,
        best_counts: root.counts.clone(),
        collected: Vec::new(),
        overflow: false,
    };
    let seeds = expand_frontier(ctx, 8 * thread_budget, &mut merged)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_budget)
        .build()
        .map_err(|_| SearchError::InvalidConfig("could not build the thread pool"))?;
    let results: Result<Vec<TaskResult>, SearchError> = pool.install(|| {
        use rayon::prelude::*;
        seeds.par_iter().map(|seed| walk(ctx, seed)).collect()
    });
    for task in results? {
        if task.best_len > merged.best_len {
            merged.best_len = task.best_len;
            merged.best_counts = task.best_counts;
        }
        merged.collected.extend(task.collected);
        merged.overflow |= task.overflow;
    }
    if merged.collected.len() > MAX_WITNESSES {
        merged.collected.truncate(MAX_WITNESSES);
        merged.overflow = true;
    }
    Ok(merged)
}

fn counts_to_multiset(
    ring: &RingSpec,
    elements: &[RingElem],
    counts: &[u16],
) -> Result<MultisetSeq, SearchError> {
    let mut s = MultisetSeq::new(ring.clone());
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            s.insert(elements[i].clone(), c as u64)?;
        }
    }
    Ok(s)
}

/// Computes `D_m` of the ring by certified exhaustive search.
///
/// The returned value is exact when `exhaustive` is set: either the tree was
/// exhausted below the cap, or a zero-free multiset of the theorem-cap
/// length was found (which meets the theorem upper bound from below). With a
/// user cap or node budget the outcome may instead be a partial lower bound.
pub fn compute_d(
    ring: &RingSpec,
    m: u64,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let started = Instant::now();
    if m == 0 {
        return Err(SearchError::InvalidConfig("m must be >= 1"));
    }
    if m > crate::bounds::MAX_M {
        return Err(SearchError::InvalidConfig(
            "m exceeds the sequence length cap",
        ));
    }
    if config.thread_budget == 0 {
        return Err(SearchError::InvalidConfig("thread_budget must be >= 1"));
    }
    if config.max_length == Some(0) {
        return Err(SearchError::InvalidConfig("max_length must be >= 1"));
    }
    if ring.cardinality() > MAX_SEARCH_CARDINALITY {
        return Err(SearchError::StateTooLarge(format!(
            "ring cardinality {} exceeds the search limit {MAX_SEARCH_CARDINALITY}",
            ring.cardinality()
        )));
    }

    let report = bounds_report(ring, m)?;
    let theorem_cap = report.best_upper().map(|u| u - 1);
    let (cap, certifying) = match (config.max_length, theorem_cap) {
        (None, None) => return Err(SearchError::NoUpperBound),
        (Some(u), None) => (u, false),
        (None, Some(t)) => (t, true),
        (Some(u), Some(t)) => {
            if t <= u {
                (t, true)
            } else {
                (u, false)
            }
        }
    };
    if cap > u16::MAX as u64 {
        return Err(SearchError::InvalidConfig("depth cap exceeds 65535"));
    }

    let elements: Vec<RingElem> = ring.elements().filter(|e| !e.is_zero()).collect();
    let perms: Vec<Vec<u32>> = if config.use_unit_symmetry {
        let mut tables = Vec::new();
        for u in ring.units() {
            if u == ring.one() {
                continue;
            }
            let table: Vec<u32> = elements
                .iter()
                .map(|e| {
                    let ue = ring.mul(&u, e).expect("same ring");
                    // nonzero elements sit at indices 1.. in ring order
                    (ring.index_of(&ue).expect("same ring") - 1) as u32
                })
                .collect();
            tables.push(table);
        }
        tables
    } else {
        Vec::new()
    };

    let stop = AtomicU8::new(RUN);
    let nodes = AtomicU64::new(0);
    let ctx = Ctx {
        elements: &elements,
        width: ring.width(),
        moduli: ring.moduli(),
        m,
        cap,
        certifying,
        collect: false,
        perms: &perms,
        stop: &stop,
        nodes: &nodes,
        node_cap: config.node_cap.unwrap_or(u64::MAX),
    };
    let phase1 = run_phase(&ctx, config.thread_budget)?;

    let flag = stop.load(Ordering::Relaxed);
    let certified = certifying && phase1.best_len == cap;
    let exhaustive = certified || flag == RUN;
    let value = phase1.best_len + 1;
    let witness = counts_to_multiset(ring, &elements, &phase1.best_counts)?;

    let all_witnesses = if config.collect_all_witnesses {
        let stop2 = AtomicU8::new(RUN);
        let nodes2 = AtomicU64::new(0);
        let ctx2 = Ctx {
            cap: phase1.best_len,
            certifying: false,
            collect: true,
            stop: &stop2,
            nodes: &nodes2,
            ..ctx
        };
        let phase2 = run_phase(&ctx2, config.thread_budget)?;
        let mut witnesses = Vec::with_capacity(phase2.collected.len());
        for counts in &phase2.collected {
            witnesses.push(counts_to_multiset(ring, &elements, counts)?);
        }
        let complete = !phase2.overflow && stop2.load(Ordering::Relaxed) == RUN;
        nodes.fetch_add(nodes2.load(Ordering::Relaxed), Ordering::Relaxed);
        Some(WitnessSet {
            witnesses,
            complete,
        })
    } else {
        None
    };

    Ok(SearchOutcome {
        ring: ring.clone(),
        m,
        value,
        witness,
        all_witnesses,
        nodes_explored: nodes.load(Ordering::Relaxed),
        exhaustive,
        elapsed: started.elapsed(),
        depth_cap: cap,
        certified_by_cap: certified,
    })
}

/// Checks whether the multiset is m-zero-free by enumerating every
/// sub-multiset of size >= m. On failure reports the violator that is
/// minimal by length, then by expanded lexicographic order (more copies of
/// a smaller element first).
pub fn is_m_zero_free(s: &MultisetSeq, m: u64) -> Result<ZeroFreeReport, SearchError> {
    if m == 0 {
        return Err(SearchError::InvalidConfig("m must be >= 1"));
    }
    if s.len() < m {
        return Ok(ZeroFreeReport {
            zero_free: true,
            violator: None,
        });
    }
    let ring = s.ring();
    let pairs = s.pairs(); // ascending by element
    let mut enumerated: u64 = 1;
    for &(_, c) in &pairs {
        enumerated = enumerated.saturating_mul(c + 1);
        if enumerated > FEASIBILITY_ENUM_CAP {
            return Err(SearchError::StateTooLarge(format!(
                "zero-free check needs more than {FEASIBILITY_ENUM_CAP} sub-multisets"
            )));
        }
    }
    let w = ring.width();
    let mu = m as usize;
    let moduli = ring.moduli();
    let mut suffix = vec![0u64; pairs.len() + 1];
    for i in (0..pairs.len()).rev() {
        suffix[i] = suffix[i + 1] + pairs[i].1;
    }

    // best violator so far, as its multiplicity vector over `pairs`
    let mut best: Option<(u64, Vec<u64>)> = None;
    fn better(best: &Option<(u64, Vec<u64>)>, size: u64, k: &[u64]) -> bool {
        match best {
            None => true,
            Some((bsize, bk)) => {
                if size != *bsize {
                    return size < *bsize;
                }
                for i in 0..k.len() {
                    if k[i] != bk[i] {
                        return k[i] > bk[i];
                    }
                }
                false
            }
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn visit(
        pairs: &[(RingElem, u64)],
        suffix: &[u64],
        moduli: &[u64],
        w: usize,
        mu: usize,
        m: u64,
        pos: usize,
        f: &[u64],
        size: u64,
        k: &mut Vec<u64>,
        best: &mut Option<(u64, Vec<u64>)>,
    ) {
        if pos == pairs.len() {
            if size >= m && f[mu * w..].iter().all(|&x| x == 0) && better(best, size, k) {
                *best = Some((size, k.clone()));
            }
            return;
        }
        if size + suffix[pos] < m {
            return;
        }
        let (e, c) = &pairs[pos];
        let mut g = f.to_vec();
        for kk in 0..=*c {
            if kk > 0 {
                trunc_mul_linear(&mut g, w, mu, &e.residues, moduli);
            }
            k.push(kk);
            visit(
                pairs,
                suffix,
                moduli,
                w,
                mu,
                m,
                pos + 1,
                &g,
                size + kk,
                k,
                best,
            );
            k.pop();
        }
    }

    let mut f = vec![0u64; (mu + 1) * w];
    for j in 0..w {
        f[j] = 1 % moduli[j];
    }
    let mut k = Vec::with_capacity(pairs.len());
    visit(
        &pairs, &suffix, moduli, w, mu, m, 0, &f, 0, &mut k, &mut best,
    );

    match best {
        None => Ok(ZeroFreeReport {
            zero_free: true,
            violator: None,
        }),
        Some((_, k)) => {
            let mut v = MultisetSeq::new(ring.clone());
            for (i, &c) in k.iter().enumerate() {
                if c > 0 {
                    v.insert(pairs[i].0.clone(), c)?;
                }
            }
            Ok(ZeroFreeReport {
                zero_free: false,
                violator: Some(v),
            })
        }
    }
}

/// The all-ones multiset over `Z_n` of the longest zero-free length, i.e.
/// one less than the first vanishing binomial threshold.
pub fn witness_ones(n: u64, m: u64) -> Result<MultisetSeq, SearchError> {
    let ring = RingSpec::new(vec![n])?;
    let l = crate::bounds::l_bound(n, m)?;
    let mut s = MultisetSeq::new(ring.clone());
    s.insert(ring.one(), l - 1)?;
    Ok(s)
}

/// The staircase witness over `Z_{n1} x ... x Z_{nb}` matching the direct
/// product lower bound: block j holds the element that is 0 on the first
/// j-1 coordinates and 1 on the rest, with multiplicity `l_bound(n_j, m) - 1`
/// for the first block and `l_bound(n_j, m) - m` for the others.
pub fn witness_product(moduli: &[u64], m: u64) -> Result<MultisetSeq, SearchError> {
    let ring = RingSpec::new(moduli.to_vec())?;
    let mut s = MultisetSeq::new(ring.clone());
    for j in 0..moduli.len() {
        let residues: Vec<u64> = (0..moduli.len()).map(|i| u64::from(i >= j)).collect();
        let l = crate::bounds::l_bound(moduli[j], m)?;
        let count = if j == 0 { l - 1 } else { l - m };
        s.insert(RingElem { residues }, count)?;
    }
    Ok(s)
}

/// The length-p witness `(1^(p-1), (p+1)/2)` over `Z_p`, 2-zero-free for
/// every odd prime p.
pub fn witness_prime_m2(p: u64) -> Result<MultisetSeq, SearchError> {
    if !is_prime(p) {
        return Err(SearchError::NotPrime(p));
    }
    if p == 2 {
        return Err(SearchError::WrongResidueClass("p must be an odd prime"));
    }
    let ring = RingSpec::new(vec![p])?;
    let mut s = MultisetSeq::new(ring.clone());
    s.insert(ring.one(), p - 1)?;
    s.insert(
        RingElem {
            residues: vec![(p + 1) / 2],
        },
        1,
    )?;
    Ok(s)
}

/// The length-(p+1) witness `(1^(p-1), (p+1)/2, (p+1)/2)` over `Z_p`,
/// 2-zero-free exactly when p = 3 (mod 4).
pub fn witness_prime_m2_3mod4(p: u64) -> Result<MultisetSeq, SearchError> {
    if !is_prime(p) {
        return Err(SearchError::NotPrime(p));
    }
    if p % 4 != 3 {
        return Err(SearchError::WrongResidueClass(
            "p must be congruent to 3 mod 4",
        ));
    }
    let ring = RingSpec::new(vec![p])?;
    let mut s = MultisetSeq::new(ring.clone());
    s.insert(ring.one(), p - 1)?;
    s.insert(
        RingElem {
            residues: vec![(p + 1) / 2],
        },
        2,
    )?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{l_bound, lower_direct_product, olson_davenport, GroupSpec};

    fn ring(moduli: &[u64]) -> RingSpec {
        RingSpec::new(moduli.to_vec()).unwrap()
    }

    fn seq(r: &RingSpec, entries: &[(&[i64], u64)]) -> MultisetSeq {
        let mut s = MultisetSeq::new(r.clone());
        for (res, c) in entries {
            s.insert(r.elem(res).unwrap(), *c).unwrap();
        }
        s
    }

    #[test]
    fn compute_d_small_exact_values() {
        for (moduli, m, expected) in [
            (vec![2u64], 1, 2u64),
            (vec![2], 2, 4),
            (vec![3], 2, 5),
            (vec![4], 2, 8),
            (vec![5], 2, 6),
            (vec![6], 2, 7),
            (vec![2, 2], 2, 6),
            (vec![3], 3, 9),
        ] {
            let r = ring(&moduli);
            let out = compute_d(&r, m, &SearchConfig::default()).unwrap();
            assert_eq!(out.value, expected, "ring {r} m={m}");
            assert!(out.exhaustive, "ring {r} m={m}");
            assert_eq!(out.witness.len(), expected - 1);
            let zf = is_m_zero_free(&out.witness, m).unwrap();
            assert!(zf.zero_free, "witness for {r} m={m} is not zero-free");
        }
    }

    #[test]
    fn compute_d_m1_matches_classical_constant() {
        for moduli in [vec![2u64, 4], vec![3, 3], vec![6], vec![2, 2, 2], vec![12]] {
            let r = ring(&moduli);
            let out = compute_d(&r, 1, &SearchConfig::default()).unwrap();
            let d = olson_davenport(&GroupSpec::new(moduli).unwrap()).unwrap();
            assert_eq!(out.value, d, "ring {r}");
            assert!(out.exhaustive);
        }
    }

    #[test]
    fn compute_d_requires_some_cap() {
        let r = ring(&[10]);
        assert_eq!(
            compute_d(&r, 3, &SearchConfig::default()),
            Err(SearchError::NoUpperBound)
        );
        let cfg = SearchConfig {
            max_length: Some(8),
            ..SearchConfig::default()
        };
        let out = compute_d(&r, 3, &cfg).unwrap();
        // the staircase bound guarantees a zero-free multiset of length 6
        assert_eq!(lower_direct_product(&[2, 5], 3).unwrap(), 6);
        assert!(out.value >= 7 && out.value <= 9, "got {}", out.value);
        if out.value <= 8 {
            assert!(out.exhaustive); // finished strictly below the user cap
        }
    }

    #[test]
    fn compute_d_certifies_on_theorem_cap_instantly() {
        // the all-ones chain reaches the cap immediately for 2-power rings
        let r = ring(&[16]);
        let out = compute_d(&r, 2, &SearchConfig::default()).unwrap();
        assert_eq!(out.value, 32);
        assert!(out.exhaustive);
        assert!(out.certified_by_cap);
        assert_eq!(out.depth_cap, 31);
        assert!(
            out.nodes_explored < 10_000,
            "took {} nodes",
            out.nodes_explored
        );
    }

    #[test]
    fn compute_d_node_cap_yields_partial_outcome() {
        let r = ring(&[7]);
        let cfg = SearchConfig {
            node_cap: Some(50),
            ..SearchConfig::default()
        };
        let out = compute_d(&r, 2, &cfg).unwrap();
        assert!(!out.exhaustive);
        assert!(out.value >= 2);
        let full = compute_d(&r, 2, &SearchConfig::default()).unwrap();
        assert!(full.exhaustive);
        assert!(out.value <= full.value);
    }

    #[test]
    fn compute_d_user_cap_below_value_is_partial() {
        let r = ring(&[5]);
        let cfg = SearchConfig {
            max_length: Some(3),
            ..SearchConfig::default()
        };
        let out = compute_d(&r, 2, &cfg).unwrap();
        assert_eq!(out.value, 4); // a zero-free triple exists, e.g. 1,1,1
        assert!(!out.exhaustive);
        assert_eq!(out.depth_cap, 3);

        // a user cap above the search's natural end changes nothing
        let cfg = SearchConfig {
            max_length: Some(40),
            ..SearchConfig::default()
        };
        let out = compute_d(&r, 2, &cfg).unwrap();
        assert_eq!(out.value, 6);
        assert!(out.exhaustive);
    }

    #[test]
    fn compute_d_rejects_bad_config() {
        let r = ring(&[5]);
        let bad = SearchConfig {
            thread_budget: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(
            compute_d(&r, 2, &bad),
            Err(SearchError::InvalidConfig(_))
        ));
        let bad = SearchConfig {
            max_length: Some(0),
            ..SearchConfig::default()
        };
        assert!(matches!(
            compute_d(&r, 2, &bad),
            Err(SearchError::InvalidConfig(_))
        ));
        assert!(matches!(
            compute_d(&r, 0, &SearchConfig::default()),
            Err(SearchError::InvalidConfig(_))
        ));
    }

    #[test]
    fn determinism_across_thread_budgets() {
        for (moduli, m) in [
            (vec![6u64], 2u64),
            (vec![2, 4], 2),
            (vec![9], 2),
            (vec![7], 2),
        ] {
            let r = ring(&moduli);
            let base = compute_d(&r, m, &SearchConfig::default()).unwrap();
            for budget in [2usize, 4] {
                let cfg = SearchConfig {
                    thread_budget: budget,
                    ..SearchConfig::default()
                };
                let out = compute_d(&r, m, &cfg).unwrap();
                assert_eq!(out.value, base.value, "ring {r} m={m} budget {budget}");
                assert_eq!(out.exhaustive, base.exhaustive);
                assert_eq!(out.witness.len(), base.witness.len());
                assert!(is_m_zero_free(&out.witness, m).unwrap().zero_free);
                if !base.certified_by_cap {
                    // without an early certification stop the lexicographic
                    // merge makes even the witness identical
                    assert_eq!(out.witness, base.witness, "ring {r} m={m}");
                }
            }
        }
    }

    #[test]
    fn symmetry_pruning_preserves_value_and_witness() {
        for (moduli, m) in [
            (vec![5u64], 2u64),
            (vec![7], 2),
            (vec![2, 3], 2),
            (vec![8], 1),
        ] {
            let r = ring(&moduli);
            let with = compute_d(&r, m, &SearchConfig::default()).unwrap();
            let cfg = SearchConfig {
                use_unit_symmetry: false,
                ..SearchConfig::default()
            };
            let without = compute_d(&r, m, &cfg).unwrap();
            assert_eq!(with.value, without.value, "ring {r} m={m}");
            assert_eq!(with.exhaustive, without.exhaustive);
            if !with.certified_by_cap {
                // the overall lex-min maximal state is orbit-minimal, so both
                // searches settle on the same witness
                assert_eq!(with.witness, without.witness, "ring {r} m={m}");
            }
            assert!(without.nodes_explored >= with.nodes_explored);
        }
    }

    #[test]
    fn all_witnesses_enumeration() {
        let r = ring(&[5]);
        let cfg = SearchConfig {
            collect_all_witnesses: true,
            ..SearchConfig::default()
        };
        let with_sym = compute_d(&r, 2, &cfg).unwrap();
        let ws = with_sym.all_witnesses.as_ref().unwrap();
        assert!(ws.complete);
        assert!(!ws.witnesses.is_empty());
        for w in &ws.witnesses {
            assert_eq!(w.len(), with_sym.value - 1);
            assert!(is_m_zero_free(w, 2).unwrap().zero_free);
        }

        let cfg = SearchConfig {
            collect_all_witnesses: true,
            use_unit_symmetry: false,
            ..SearchConfig::default()
        };
        let no_sym = compute_d(&r, 2, &cfg).unwrap();
        let all = no_sym.all_witnesses.as_ref().unwrap();
        assert!(all.complete);
        // orbit representatives only vs the whole family
        assert!(all.witnesses.len() >= ws.witnesses.len());
        for w in &ws.witnesses {
            assert!(all.witnesses.contains(w));
        }
    }

    #[test]
    fn zero_free_check_examples() {
        let z7 = ring(&[7]);
        let ones7 = seq(&z7, &[(&[1], 7)]);
        let rep = is_m_zero_free(&ones7, 2).unwrap();
        assert!(!rep.zero_free);
        assert_eq!(rep.violator.unwrap(), ones7); // C(k,2) mod 7 first vanishes at k=7

        let s = seq(&z7, &[(&[1], 6), (&[4], 1)]);
        assert!(is_m_zero_free(&s, 2).unwrap().zero_free);
        let s = seq(&z7, &[(&[1], 6), (&[4], 2)]);
        assert!(is_m_zero_free(&s, 2).unwrap().zero_free);

        let s = seq(&z7, &[(&[0], 1), (&[1], 1), (&[2], 1)]);
        let rep = is_m_zero_free(&s, 2).unwrap();
        assert!(!rep.zero_free);
        // minimal violator: {0,1} beats {0,2} in expanded order
        assert_eq!(rep.violator.unwrap(), seq(&z7, &[(&[0], 1), (&[1], 1)]));

        // short multisets are vacuously zero-free
        let s = seq(&z7, &[(&[0], 1)]);
        assert!(is_m_zero_free(&s, 2).unwrap().zero_free);
    }

    #[test]
    fn zero_free_check_state_too_large() {
        let r = ring(&[36]);
        let entries: Vec<(Vec<i64>, u64)> = (1..=10).map(|i| (vec![i as i64], 9)).collect();
        let mut s = MultisetSeq::new(r.clone());
        for (res, c) in &entries {
            s.insert(r.elem(res).unwrap(), *c).unwrap();
        }
        assert!(matches!(
            is_m_zero_free(&s, 2),
            Err(SearchError::StateTooLarge(_))
        ));
    }

    #[test]
    fn witness_ones_is_zero_free_and_maximal() {
        for n in 2..=18u64 {
            for m in 1..=4u64 {
                let w = witness_ones(n, m).unwrap();
                assert_eq!(w.len(), l_bound(n, m).unwrap() - 1);
                assert!(is_m_zero_free(&w, m).unwrap().zero_free, "n={n} m={m}");
                // appending one more 1 must break zero-freeness
                let mut longer = w.clone();
                longer.insert(w.ring().one(), 1).unwrap();
                assert!(
                    !is_m_zero_free(&longer, m).unwrap().zero_free,
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn witness_product_matches_staircase_bound() {
        let lists: &[&[u64]] = &[
            &[2, 2],
            &[2, 3],
            &[2, 4],
            &[3, 3],
            &[2, 2, 2],
            &[2, 2, 3],
            &[2, 10],
            &[4, 6],
            &[3, 8],
        ];
        for moduli in lists {
            for m in [2u64, 3] {
                let w = witness_product(moduli, m).unwrap();
                assert_eq!(
                    w.len(),
                    lower_direct_product(moduli, m).unwrap() - 1,
                    "moduli {moduli:?} m={m}"
                );
                assert!(
                    is_m_zero_free(&w, m).unwrap().zero_free,
                    "moduli {moduli:?} m={m}: {w}"
                );
            }
        }
    }

    #[test]
    fn witness_prime_constructions() {
        for p in [3u64, 5, 7, 11, 13] {
            let w = witness_prime_m2(p).unwrap();
            assert_eq!(w.len(), p);
            assert!(is_m_zero_free(&w, 2).unwrap().zero_free, "p={p}");
        }
        for p in [3u64, 7, 11] {
            let w = witness_prime_m2_3mod4(p).unwrap();
            assert_eq!(w.len(), p + 1);
            assert!(is_m_zero_free(&w, 2).unwrap().zero_free, "p={p}");
        }
        // for p = 1 (mod 4) the doubled construction must fail
        for p in [5u64, 13] {
            let r = ring(&[p]);
            let mut s = seq(&r, &[(&[1], p - 1)]);
            s.insert(r.elem(&[((p + 1) / 2) as i64]).unwrap(), 2)
                .unwrap();
            assert!(!is_m_zero_free(&s, 2).unwrap().zero_free, "p={p}");
        }
        assert_eq!(
            witness_prime_m2(2),
            Err(SearchError::WrongResidueClass("p must be an odd prime"))
        );
        assert_eq!(witness_prime_m2(9), Err(SearchError::NotPrime(9)));
        assert_eq!(
            witness_prime_m2_3mod4(5),
            Err(SearchError::WrongResidueClass(
                "p must be congruent to 3 mod 4"
            ))
        );
        assert_eq!(
            witness_prime_m2_3mod4(2),
            Err(SearchError::WrongResidueClass(
                "p must be congruent to 3 mod 4"
            ))
        );
    }

    #[test]
    fn search_rejects_oversized_rings() {
        let r = ring(&[1 << 21]);
        assert!(matches!(
            compute_d(&r, 2, &SearchConfig::default()),
            Err(SearchError::StateTooLarge(_))
        ));
    }
}

//! Exhaustive generation of incidence structures with only triple points
//! (Steiner triple systems on the lines), one per isomorphism class.
//!
//! Generation is orderly. Triples are added by always covering the least
//! uncovered pair `(a, b)` with a third line `c > b`, so the triples of a
//! partial structure are a prefix of its sorted point list. A prefix of a
//! canonical structure is itself canonical, so partial structures are tested
//! whenever a row (all pairs through line `a`) is finished and discarded if
//! some relabeling beats them; complete structures are tested unconditionally.
//! Every class is then produced exactly once, by its canonical representative.
//!
//! The triples through line 0 of any canonical form are `{0,1,2}, {0,3,4},
//! ...`: relabel any line to 0 and number its partners pairwise. The first
//! row is therefore fixed up front.

pub mod canon;

pub use canon::{
    are_isomorphic, canonical_form, classes_by_canonical_form, is_canonical, CanonError, Canonical,
    MAX_CANON_DEGREE,
};

use crate::combinatorics::triple_count_from_degree;
use crate::lattice::IncidenceStructure;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};
use thiserror::Error;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;
/// Largest degree enumerated without opting in.
pub const DEFAULT_MAX_DEGREE: usize = 13;
/// Largest degree enumerated at all.
pub const SLOW_MAX_DEGREE: usize = 15;

/// Triples fixed before the parallel split, beyond the first row.
const SPLIT_EXTRA_DEPTH: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("degree {degree} exceeds the enumeration limit {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("degree {degree} is slow to enumerate; opt in explicitly")]
    SlowDegree { degree: usize },
    #[error("node budget of {limit} exceeded; partial results discarded")]
    NodeBudgetExceeded { limit: u64 },
    #[error("time budget of {secs}s exceeded; partial results discarded")]
    TimeBudgetExceeded { secs: u64 },
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Limits on an enumeration run.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
    /// Permits degrees above [`DEFAULT_MAX_DEGREE`].
    pub allow_slow: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: DEFAULT_NODE_BUDGET,
            max_time: None,
            allow_slow: false,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Complete structures reached, before isomorphism rejection.
    pub complete_structures: u64,
    /// Canonicity tests run on partial or complete structures.
    pub canonicity_tests: u64,
    /// Wall time; not part of the deterministic output.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// All isomorphism classes for one degree, in canonical form and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationCertificate {
    pub degree: usize,
    pub structures: Vec<IncidenceStructure>,
    pub stats: EnumerationStats,
    /// Why the certificate is empty without a search, if it is.
    pub reason: Option<String>,
}

pub fn enumerate_triple_systems(
    degree: usize,
    budget: &Budget,
) -> Result<EnumerationCertificate, EnumerateError> {
    if degree == 0 {
        return Err(EnumerateError::ZeroDegree);
    }
    if degree > SLOW_MAX_DEGREE {
        return Err(EnumerateError::DegreeTooLarge {
            degree,
            max: SLOW_MAX_DEGREE,
        });
    }
    if degree > DEFAULT_MAX_DEGREE && !budget.allow_slow {
        return Err(EnumerateError::SlowDegree { degree });
    }
    let start = Instant::now();
    if triple_count_from_degree(degree as u64).is_err() || degree.is_multiple_of(2) {
        return Ok(EnumerationCertificate {
            degree,
            structures: Vec::new(),
            stats: EnumerationStats::default(),
            reason: Some("divisibility".to_string()),
        });
    }

    let ctx = Context {
        degree,
        nodes: AtomicU64::new(0),
        complete: AtomicU64::new(0),
        tests: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        start,
        max_nodes: budget.max_nodes,
        max_time: budget.max_time,
    };

    let run = || -> Vec<Vec<u64>> {
        let mut root = Partial::new(degree);
        for b in (1..degree).step_by(2) {
            root.add(0, b, b + 1);
        }
        let mut frontier = Vec::new();
        let mut found = Vec::new();
        let target = root.blocks.len() + SPLIT_EXTRA_DEPTH;
        collect_frontier(&ctx, &mut root, 0, target, &mut frontier, &mut found);
        let deeper: Vec<Vec<u64>> = frontier
            .into_par_iter()
            .map(|(mut node, row)| {
                let mut out = Vec::new();
                search(&ctx, &mut node, row, &mut out);
                out
            })
            .flatten()
            .collect();
        found.extend(deeper);
        found.sort_unstable_by(|a, b| canon::list_cmp(a, b));
        found
    };

    let found = match budget.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| EnumerateError::WorkerPool(e.to_string()))?
            .install(run),
        None => run(),
    };

    if ctx.abort.load(Ordering::Relaxed) {
        let over_time = ctx
            .max_time
            .is_some_and(|limit| ctx.start.elapsed() >= limit);
        return Err(if over_time {
            EnumerateError::TimeBudgetExceeded {
                secs: ctx.max_time.unwrap_or_default().as_secs(),
            }
        } else {
            EnumerateError::NodeBudgetExceeded {
                limit: ctx.max_nodes,
            }
        });
    }

    let structures = found
        .iter()
        .map(|masks| canon::structure_from_masks(degree, masks))
        .collect();
    Ok(EnumerationCertificate {
        degree,
        structures,
        stats: EnumerationStats {
            nodes: ctx.nodes.load(Ordering::Relaxed),
            complete_structures: ctx.complete.load(Ordering::Relaxed),
            canonicity_tests: ctx.tests.load(Ordering::Relaxed),
            elapsed: start.elapsed(),
        },
        reason: None,
    })
}

struct Context {
    degree: usize,
    nodes: AtomicU64,
    complete: AtomicU64,
    tests: AtomicU64,
    abort: AtomicBool,
    start: Instant,
    max_nodes: u64,
    max_time: Option<Duration>,
}

impl Context {
    fn tick(&self) -> bool {
        if self.abort.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = n > self.max_nodes;
        let over_time = n.is_multiple_of(1024)
            && self
                .max_time
                .is_some_and(|limit| self.start.elapsed() >= limit);
        if over_nodes || over_time {
            self.abort.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn canonical(&self, blocks: &[u64]) -> bool {
        self.tests.fetch_add(1, Ordering::Relaxed);
        canon::masks_are_canonical(self.degree, blocks)
    }
}

const NONE: u8 = u8::MAX;

/// Partial triple system: `third[a * d + b]` is the line completing the
/// triple through `a` and `b`, if placed.
#[derive(Clone)]
struct Partial {
    degree: usize,
    third: Vec<u8>,
    blocks: Vec<u64>,
}

impl Partial {
    fn new(degree: usize) -> Self {
        Partial {
            degree,
            third: vec![NONE; degree * degree],
            blocks: Vec::new(),
        }
    }

    fn free(&self, a: usize, b: usize) -> bool {
        self.third[a * self.degree + b] == NONE
    }

    fn set(&mut self, a: usize, b: usize, v: u8) {
        let d = self.degree;
        self.third[a * d + b] = v;
        self.third[b * d + a] = v;
    }

    fn add(&mut self, a: usize, b: usize, c: usize) {
        self.set(a, b, c as u8);
        self.set(a, c, b as u8);
        self.set(b, c, a as u8);
        self.blocks.push((1 << a) | (1 << b) | (1 << c));
    }

    fn remove(&mut self, a: usize, b: usize, c: usize) {
        self.set(a, b, NONE);
        self.set(a, c, NONE);
        self.set(b, c, NONE);
        self.blocks.pop();
    }

    fn least_uncovered(&self, from_row: usize) -> Option<(usize, usize)> {
        let d = self.degree;
        (from_row..d).find_map(|a| (a + 1..d).find(|&b| self.free(a, b)).map(|b| (a, b)))
    }
}

enum Entry {
    Pruned,
    Done,
    Branch(usize, usize),
}

/// Visits a node once: counts it, runs the row-boundary canonicity test,
/// records it if complete.
fn enter(ctx: &Context, node: &Partial, row: usize, out: &mut Vec<Vec<u64>>) -> Entry {
    if !ctx.tick() {
        return Entry::Pruned;
    }
    let next = node.least_uncovered(row);
    let row_finished = next.is_none_or(|(a, _)| a != row);
    if row_finished && row > 0 && !ctx.canonical(&node.blocks) {
        return Entry::Pruned;
    }
    match next {
        None => {
            ctx.complete.fetch_add(1, Ordering::Relaxed);
            if row == 0 && !ctx.canonical(&node.blocks) {
                return Entry::Pruned;
            }
            out.push(node.blocks.clone());
            Entry::Done
        }
        Some((a, b)) => Entry::Branch(a, b),
    }
}

fn candidates(node: &Partial, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
    (b + 1..node.degree).filter(move |&c| node.free(a, c) && node.free(b, c))
}

fn search(ctx: &Context, node: &mut Partial, row: usize, out: &mut Vec<Vec<u64>>) {
    let Entry::Branch(a, b) = enter(ctx, node, row, out) else {
        return;
    };
    let cs: Vec<usize> = candidates(node, a, b).collect();
    for c in cs {
        node.add(a, b, c);
        search(ctx, node, a, out);
        node.remove(a, b, c);
        if ctx.abort.load(Ordering::Relaxed) {
            return;
        }
    }
}

/// Expands the tree sequentially down to `target` triples; deeper nodes are
/// handed out whole to the workers. Structures completed above the split
/// land in `found`.
fn collect_frontier(
    ctx: &Context,
    node: &mut Partial,
    row: usize,
    target: usize,
    frontier: &mut Vec<(Partial, usize)>,
    found: &mut Vec<Vec<u64>>,
) {
    if node.blocks.len() >= target {
        frontier.push((node.clone(), row));
        return;
    }
    if let Entry::Branch(a, b) = enter(ctx, node, row, found) {
        let cs: Vec<usize> = candidates(node, a, b).collect();
        for c in cs {
            node.add(a, b, c);
            collect_frontier(ctx, node, a, target, frontier, found);
            node.remove(a, b, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::{lemma_km_residue, per_line_parity, weak_combinatorics_of};

    #[test]
    fn small_degrees() {
        let one = enumerate_triple_systems(1, &Budget::default()).unwrap();
        assert_eq!(
            one.structures,
            vec![IncidenceStructure::generic(1).unwrap()]
        );
        let three = enumerate_triple_systems(3, &Budget::default()).unwrap();
        assert_eq!(three.structures, vec![fixtures::pencil(3).unwrap()]);
        for d in [2, 4, 5, 6, 8, 10, 11, 12] {
            let c = enumerate_triple_systems(d, &Budget::default()).unwrap();
            assert!(c.structures.is_empty());
            assert_eq!(c.reason.as_deref(), Some("divisibility"), "d={d}");
        }
    }

    #[test]
    fn seven_is_fano() {
        let c = enumerate_triple_systems(7, &Budget::default()).unwrap();
        assert_eq!(c.structures.len(), 1);
        assert!(are_isomorphic(&c.structures[0], &fixtures::fano())
            .unwrap()
            .is_some());
        assert_eq!(lemma_km_residue(&c.structures[0]).unwrap().residue.value, 8);
    }

    #[test]
    fn nine_is_affine_plane() {
        let c = enumerate_triple_systems(9, &Budget::default()).unwrap();
        assert_eq!(c.structures.len(), 1);
        assert!(are_isomorphic(&c.structures[0], &fixtures::dual_hesse())
            .unwrap()
            .is_some());
        let s = &c.structures[0];
        assert!(per_line_parity(s).unwrap().passes());
        assert_eq!(weak_combinatorics_of(s).weak.count(3), 12);
        assert_eq!(lemma_km_residue(s).unwrap().residue.value, 0);
        assert!(is_canonical(s).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let tight = Budget {
            max_nodes: 3,
            ..Budget::default()
        };
        assert_eq!(
            enumerate_triple_systems(9, &tight),
            Err(EnumerateError::NodeBudgetExceeded { limit: 3 })
        );
        assert_eq!(
            enumerate_triple_systems(15, &Budget::default()),
            Err(EnumerateError::SlowDegree { degree: 15 })
        );
        assert!(matches!(
            enumerate_triple_systems(19, &Budget::default()),
            Err(EnumerateError::DegreeTooLarge { .. })
        ));
    }
}

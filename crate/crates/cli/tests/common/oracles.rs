//! Slow, obviously-correct reference computations.

use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet, HashSet};

pub type Triples = Vec<[usize; 3]>;

/// Every labeled system of triples on `d` lines covering each pair exactly
/// once, by plain backtracking over the first uncovered pair.
pub fn labeled_triple_systems(d: usize) -> Vec<Triples> {
    fn go(d: usize, covered: &mut Vec<bool>, current: &mut Triples, out: &mut Vec<Triples>) {
        let Some((a, b)) = (0..d)
            .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
            .find(|&(a, b)| !covered[a * d + b])
        else {
            let mut sorted = current.clone();
            sorted.sort();
            out.push(sorted);
            return;
        };
        for c in 0..d {
            if c == a || c == b {
                continue;
            }
            let (x, y) = (a.min(c), a.max(c));
            let (u, v) = (b.min(c), b.max(c));
            if covered[x * d + y] || covered[u * d + v] {
                continue;
            }
            for (p, q) in [(a, b), (x, y), (u, v)] {
                covered[p * d + q] = true;
            }
            let mut t = [a, b, c];
            t.sort();
            current.push(t);
            go(d, covered, current, out);
            current.pop();
            for (p, q) in [(a, b), (x, y), (u, v)] {
                covered[p * d + q] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(d, &mut vec![false; d * d], &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

fn apply(perm: &[usize], system: &Triples) -> Triples {
    let mut out: Triples = system
        .iter()
        .map(|t| {
            let mut u = [perm[t[0]], perm[t[1]], perm[t[2]]];
            u.sort();
            u
        })
        .collect();
    out.sort();
    out
}

/// Isomorphism classes among `systems`, found by sweeping each unclaimed
/// system's orbit under all `d!` relabelings. Returns orbit sizes.
pub fn classes_by_permutation(d: usize, systems: &[Triples]) -> Vec<usize> {
    let mut unclaimed: BTreeSet<&Triples> = systems.iter().collect();
    let mut orbit_sizes = Vec::new();
    while let Some(&rep) = unclaimed.iter().next() {
        let orbit: HashSet<Triples> = (0..d)
            .permutations(d)
            .map(|perm| apply(&perm, rep))
            .collect();
        for s in &orbit {
            unclaimed.remove(s);
        }
        orbit_sizes.push(orbit.len());
    }
    orbit_sizes
}

/// All count maps `{m: t_m}` with `sum C(m,2) t_m = C(d,2)`, by nested loops
/// over every allowed multiplicity.
pub fn brute_force_count_vectors(d: u64, odd_only: bool) -> BTreeSet<BTreeMap<u64, u64>> {
    let mults: Vec<u64> = (2..=d)
        .filter(|&m| !odd_only || (m >= 3 && m % 2 == 1))
        .collect();
    let target = d * d.saturating_sub(1) / 2;
    let mut out = BTreeSet::new();
    fn go(
        mults: &[u64],
        i: usize,
        sum: u64,
        target: u64,
        current: &mut BTreeMap<u64, u64>,
        out: &mut BTreeSet<BTreeMap<u64, u64>>,
    ) {
        if i == mults.len() {
            if sum == target {
                out.insert(current.clone());
            }
            return;
        }
        let m = mults[i];
        let w = m * (m - 1) / 2;
        let mut t = 0;
        while sum + t * w <= target {
            if t > 0 {
                current.insert(m, t);
            }
            go(mults, i + 1, sum + t * w, target, current, out);
            t += 1;
        }
        current.remove(&m);
    }
    go(&mults, 0, 0, target, &mut BTreeMap::new(), &mut out);
    out
}

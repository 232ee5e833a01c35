//! Canonical forms and isomorphism of incidence structures under line
//! relabeling.
//!
//! The canonical form of a structure is the relabeling whose point list,
//! after sorting every point and then the list, is lexicographically least.
//! It is found by branch and bound: new labels `0, 1, 2, ...` are handed out
//! in order, and after each assignment every point is bounded below by its
//! labeled lines followed by the smallest labels still free. The sorted list
//! of those bounds is a lower bound for every completion, so a branch whose
//! bound is not below the incumbent can be cut.
//!
//! Points are encoded as bitmasks over labels, which limits these routines to
//! 64 lines.

use crate::lattice::IncidenceStructure;
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

pub const MAX_CANON_DEGREE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("canonical labeling supports at most {max} lines, got {degree}")]
    TooManyLines { degree: usize, max: usize },
    #[error("structures have different degrees ({left} and {right})")]
    DegreeMismatch { left: usize, right: usize },
}

/// Lexicographic order of the sorted label sequences encoded by `a` and `b`.
pub(crate) fn set_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let first_diff = (a ^ b).trailing_zeros();
    let above = if first_diff >= 63 {
        0
    } else {
        !0u64 << (first_diff + 1)
    };
    // whoever owns the smallest differing label is smaller, unless the other
    // sequence has already ended
    if a & (1 << first_diff) != 0 {
        if b & above == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if a & above == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub(crate) fn list_cmp(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match set_cmp(*x, *y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn sort_sets(list: &mut [u64]) {
    list.sort_unstable_by(|a, b| set_cmp(*a, *b));
}

/// `count` consecutive bits starting at `lo`.
fn bit_run(lo: usize, count: usize) -> u64 {
    if count == 0 {
        0
    } else if count >= 64 {
        !0u64 << lo
    } else {
        ((1u64 << count) - 1) << lo
    }
}

pub(crate) fn mask_of(lines: &[usize]) -> u64 {
    lines.iter().fold(0, |m, &l| m | (1u64 << l))
}

pub(crate) fn lines_of(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn check_degree(inc: &IncidenceStructure) -> Result<(), CanonError> {
    if inc.degree() > MAX_CANON_DEGREE {
        return Err(CanonError::TooManyLines {
            degree: inc.degree(),
            max: MAX_CANON_DEGREE,
        });
    }
    Ok(())
}

/// Sorted mask list of a structure as labeled.
pub(crate) fn sorted_masks(inc: &IncidenceStructure) -> Vec<u64> {
    let mut masks: Vec<u64> = inc.points().iter().map(|p| mask_of(p)).collect();
    sort_sets(&mut masks);
    masks
}

pub(crate) fn structure_from_masks(degree: usize, masks: &[u64]) -> IncidenceStructure {
    IncidenceStructure::new(degree, masks.iter().map(|&m| lines_of(m)).collect())
        .expect("relabeling preserves validity")
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Find the least relabeling.
    Minimize,
    /// Stop at the first relabeling strictly below the incumbent.
    Beat,
}

struct Search {
    degree: usize,
    mode: Mode,
    line_points: Vec<Vec<usize>>,
    labeled: Vec<u64>,
    unlabeled: Vec<usize>,
    new_label: Vec<usize>,
    // lines in the order they received labels
    path: Vec<usize>,
    best: Vec<u64>,
    best_labeling: Vec<usize>,
    found_smaller: bool,
    // old -> old maps preserving the point set, found at equal leaves
    automorphisms: Vec<Vec<usize>>,
    scratch: Vec<Vec<u64>>,
}

const UNSET: usize = usize::MAX;
const MAX_STORED_AUTOMORPHISMS: usize = 128;

impl Search {
    fn new(degree: usize, points: &[u64], mode: Mode) -> Self {
        let mut line_points = vec![Vec::new(); degree];
        for (i, &m) in points.iter().enumerate() {
            for l in lines_of(m) {
                line_points[l].push(i);
            }
        }
        let mut best = points.to_vec();
        sort_sets(&mut best);
        Search {
            degree,
            mode,
            unlabeled: points.iter().map(|m| m.count_ones() as usize).collect(),
            labeled: vec![0; points.len()],
            line_points,
            new_label: vec![UNSET; degree],
            path: Vec::with_capacity(degree),
            best,
            best_labeling: (0..degree).collect(),
            found_smaller: false,
            automorphisms: Vec::new(),
            scratch: vec![Vec::with_capacity(points.len()); degree + 1],
        }
    }

    fn run(&mut self) {
        self.descend(0);
    }

    fn stop(&self) -> bool {
        self.found_smaller && self.mode == Mode::Beat
    }

    fn descend(&mut self, k: usize) {
        if self.stop() {
            return;
        }
        if k == self.degree {
            self.leaf();
            return;
        }
        let mut explored: Vec<usize> = Vec::new();
        let mut orbits: Option<(usize, Vec<usize>)> = None;
        for line in 0..self.degree {
            if self.new_label[line] != UNSET {
                continue;
            }
            if !explored.is_empty() {
                // recompute orbits only when new automorphisms turned up
                let stale = orbits
                    .as_ref()
                    .is_none_or(|(seen, _)| *seen != self.automorphisms.len());
                if stale {
                    orbits = Some((self.automorphisms.len(), self.stabilizer_orbits()));
                }
                let (_, rep) = orbits.as_ref().expect("computed above");
                if explored.iter().any(|&y| rep[y] == rep[line]) {
                    continue;
                }
            }
            self.assign(line, k);
            if self.bound_allows(k) {
                self.descend(k + 1);
            }
            self.unassign(line, k);
            explored.push(line);
            if self.stop() {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        let mut exact = std::mem::take(&mut self.scratch[self.degree]);
        exact.clear();
        exact.extend_from_slice(&self.labeled);
        sort_sets(&mut exact);
        match list_cmp(&exact, &self.best) {
            Ordering::Less => {
                self.found_smaller = true;
                self.best.clone_from(&exact);
                self.best_labeling.clone_from(&self.new_label);
            }
            Ordering::Equal if self.automorphisms.len() < MAX_STORED_AUTOMORPHISMS => {
                let mut inverse_best = vec![0; self.degree];
                for (old, &new) in self.best_labeling.iter().enumerate() {
                    inverse_best[new] = old;
                }
                let sigma: Vec<usize> = self.new_label.iter().map(|&n| inverse_best[n]).collect();
                if sigma.iter().enumerate().any(|(i, &s)| i != s) {
                    self.automorphisms.push(sigma);
                }
            }
            _ => {}
        }
        self.scratch[self.degree] = exact;
    }

    /// Orbit representatives of the group generated by the stored
    /// automorphisms that fix every already-labeled line.
    fn stabilizer_orbits(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.degree).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for sigma in &self.automorphisms {
            if self.path.iter().any(|&l| sigma[l] != l) {
                continue;
            }
            for (x, &y) in sigma.iter().enumerate() {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
        (0..self.degree).map(|x| find(&mut parent, x)).collect()
    }

    fn assign(&mut self, line: usize, label: usize) {
        self.new_label[line] = label;
        self.path.push(line);
        for &p in &self.line_points[line] {
            self.labeled[p] |= 1 << label;
            self.unlabeled[p] -= 1;
        }
    }

    fn unassign(&mut self, line: usize, label: usize) {
        self.new_label[line] = UNSET;
        self.path.pop();
        for &p in &self.line_points[line] {
            self.labeled[p] &= !(1 << label);
            self.unlabeled[p] += 1;
        }
    }

    /// Bound after labels `0..=k` are placed. In `Beat` mode a strictly
    /// smaller prefix made only of completed points ends the search.
    fn bound_allows(&mut self, k: usize) -> bool {
        let next = k + 1;
        let mut bound = std::mem::take(&mut self.scratch[k]);
        bound.clear();
        bound.extend(
            self.labeled
                .iter()
                .zip(&self.unlabeled)
                .map(|(&l, &u)| l | bit_run(next, u)),
        );
        sort_sets(&mut bound);
        // an equal bound cannot beat the incumbent, but following it is how
        // automorphisms are found
        let mut keep = true;
        for (i, (x, y)) in bound.iter().zip(&self.best).enumerate() {
            match set_cmp(*x, *y) {
                Ordering::Equal => continue,
                Ordering::Greater => {
                    keep = false;
                    break;
                }
                Ordering::Less => {
                    keep = true;
                    let exact = next >= 64 || bound[..=i].iter().all(|m| m >> next == 0);
                    if exact && self.mode == Mode::Beat {
                        self.found_smaller = true;
                    }
                    break;
                }
            }
        }
        self.scratch[k] = bound;
        keep && !self.stop()
    }
}

/// A structure in canonical form together with the relabeling that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub structure: IncidenceStructure,
    /// `labeling[old] = new`.
    pub labeling: Vec<usize>,
}

pub fn canonical_form(inc: &IncidenceStructure) -> Result<Canonical, CanonError> {
    check_degree(inc)?;
    let masks: Vec<u64> = inc.points().iter().map(|p| mask_of(p)).collect();
    let mut search = Search::new(inc.degree(), &masks, Mode::Minimize);
    search.run();
    Ok(Canonical {
        structure: structure_from_masks(inc.degree(), &search.best),
        labeling: search.best_labeling,
    })
}

/// Whether the structure, with points and each point sorted, is already its
/// own canonical form.
pub fn is_canonical(inc: &IncidenceStructure) -> Result<bool, CanonError> {
    check_degree(inc)?;
    let masks = sorted_masks(inc);
    if masks
        .iter()
        .map(|&m| lines_of(m))
        .ne(inc.points().iter().cloned())
    {
        return Ok(false);
    }
    Ok(masks_are_canonical(inc.degree(), &masks))
}

/// `masks` must already be sorted.
pub(crate) fn masks_are_canonical(degree: usize, masks: &[u64]) -> bool {
    let mut search = Search::new(degree, masks, Mode::Beat);
    search.run();
    !search.found_smaller
}

/// Line relabeling `a -> b` found by backtracking, pruned by the multiset of
/// point sizes through each line and by pairwise point consistency.
pub fn are_isomorphic(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
) -> Result<Option<Vec<usize>>, CanonError> {
    if a.degree() != b.degree() {
        return Err(CanonError::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    let mut sa: Vec<usize> = a.points().iter().map(Vec::len).collect();
    let mut sb: Vec<usize> = b.points().iter().map(Vec::len).collect();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(None);
    }
    let ia = PairIndex::new(a);
    let ib = PairIndex::new(b);
    let mut sig_a_sorted = ia.signatures.clone();
    let mut sig_b_sorted = ib.signatures.clone();
    sig_a_sorted.sort();
    sig_b_sorted.sort();
    if sig_a_sorted != sig_b_sorted {
        return Ok(None);
    }
    let mut iso = IsoSearch {
        a: &ia,
        b: &ib,
        image: vec![UNSET; a.degree()],
        used: vec![false; a.degree()],
        corr: vec![UNSET; a.points().len()],
    };
    Ok(iso.extend(0).then(|| iso.image.clone()))
}

struct PairIndex {
    degree: usize,
    // point through each pair, UNSET for an implicit double point
    pair_point: Vec<usize>,
    point_size: Vec<usize>,
    signatures: Vec<Vec<usize>>,
}

impl PairIndex {
    fn new(inc: &IncidenceStructure) -> Self {
        let d = inc.degree();
        let mut pair_point = vec![UNSET; d * d];
        let mut signatures = vec![Vec::new(); d];
        for (i, p) in inc.points().iter().enumerate() {
            for &x in p {
                signatures[x].push(p.len());
                for &y in p {
                    if x != y {
                        pair_point[x * d + y] = i;
                    }
                }
            }
        }
        for s in &mut signatures {
            s.sort_unstable();
        }
        PairIndex {
            degree: d,
            pair_point,
            point_size: inc.points().iter().map(Vec::len).collect(),
            signatures,
        }
    }
}

struct IsoSearch<'a> {
    a: &'a PairIndex,
    b: &'a PairIndex,
    image: Vec<usize>,
    used: Vec<bool>,
    corr: Vec<usize>,
}

impl IsoSearch<'_> {
    fn extend(&mut self, x: usize) -> bool {
        let d = self.a.degree;
        if x == d {
            return true;
        }
        for y in 0..d {
            if self.used[y] || self.a.signatures[x] != self.b.signatures[y] {
                continue;
            }
            let mut newly: Vec<usize> = Vec::new();
            let mut ok = true;
            for w in 0..x {
                let pa = self.a.pair_point[w * d + x];
                let pb = self.b.pair_point[self.image[w] * d + y];
                match (pa, pb) {
                    (UNSET, UNSET) => {}
                    (UNSET, _) | (_, UNSET) => ok = false,
                    (pa, pb) => {
                        if self.a.point_size[pa] != self.b.point_size[pb] {
                            ok = false;
                        } else if self.corr[pa] == UNSET {
                            self.corr[pa] = pb;
                            newly.push(pa);
                        } else if self.corr[pa] != pb {
                            ok = false;
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.image[x] = y;
                self.used[y] = true;
                if self.extend(x + 1) {
                    return true;
                }
                self.used[y] = false;
                self.image[x] = UNSET;
            }
            for pa in newly {
                self.corr[pa] = UNSET;
            }
        }
        false
    }
}

/// Groups structures into isomorphism classes by canonical form.
pub fn classes_by_canonical_form(
    structures: &[IncidenceStructure],
) -> Result<HashMap<IncidenceStructure, usize>, CanonError> {
    let mut classes = HashMap::new();
    for s in structures {
        *classes.entry(canonical_form(s)?.structure).or_insert(0) += 1;
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn seq_cmp(a: u64, b: u64) -> Ordering {
        lines_of(a).cmp(&lines_of(b))
    }

    #[test]
    fn set_order_matches_sequence_order() {
        let samples: Vec<u64> = (0u64..256).collect();
        for &a in &samples {
            for &b in &samples {
                assert_eq!(set_cmp(a, b), seq_cmp(a, b), "{a:b} vs {b:b}");
            }
        }
        let big = [1u64 << 63, (1 << 63) | 1, !0, 3 << 62, 5];
        for &a in &big {
            for &b in &big {
                assert_eq!(set_cmp(a, b), seq_cmp(a, b));
            }
        }
    }

    #[test]
    fn fano_canonical_form() {
        let c = canonical_form(&fixtures::fano()).unwrap();
        let expected: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        assert_eq!(c.structure.points(), expected.as_slice());
        assert_eq!(
            fixtures::fano().relabel(&c.labeling).normalized(),
            c.structure
        );
        assert!(is_canonical(&c.structure).unwrap());
        assert!(!is_canonical(&fixtures::fano()).unwrap() || fixtures::fano() == c.structure);
    }

    #[test]
    fn canonical_form_is_idempotent() {
        for inc in [
            fixtures::fano(),
            fixtures::dual_hesse(),
            fixtures::pencil(5).unwrap(),
            IncidenceStructure::new(6, vec![vec![3, 4, 5], vec![0, 5]]).unwrap(),
        ] {
            let once = canonical_form(&inc).unwrap().structure;
            let twice = canonical_form(&once).unwrap().structure;
            assert_eq!(once, twice);
            assert!(is_canonical(&once).unwrap());
        }
    }

    #[test]
    fn isomorphism_examples() {
        let fano = fixtures::fano();
        let perm = vec![3, 6, 0, 5, 1, 4, 2];
        let shuffled = fano.relabel(&perm);
        let w = are_isomorphic(&fano, &shuffled)
            .unwrap()
            .expect("isomorphic");
        assert_eq!(fano.relabel(&w).normalized(), shuffled.normalized());

        let pencil = fixtures::pencil(3).unwrap();
        let generic = IncidenceStructure::generic(3).unwrap();
        assert_eq!(are_isomorphic(&pencil, &generic).unwrap(), None);
        assert!(matches!(
            are_isomorphic(&fano, &pencil),
            Err(CanonError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn disjoint_and_touching_triples_differ() {
        let a = IncidenceStructure::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let b = IncidenceStructure::new(6, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        assert_eq!(are_isomorphic(&a, &b).unwrap(), None);
        assert_ne!(
            canonical_form(&a).unwrap().structure,
            canonical_form(&b).unwrap().structure
        );
    }
}

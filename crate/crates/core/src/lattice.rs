//! Second homology of the projective plane blown up at the singular points of
//! an arrangement, in the basis (line class; exceptional classes), with the
//! diagonal intersection form `diag(+1, -1, ..., -1)`.
//!
//! Coordinates are taken against `(H, -E_1, ..., -E_t)` where `E_i` is the
//! exceptional sphere over point `i`. The form stays diagonal in that basis
//! and the strict transform of line `k`, `H - sum_{i on k} E_i`, reads
//! `(1; 1 for every point on the line, 0 elsewhere)`, squaring to `1 - p_k`.

use crate::combinatorics::WeakCombinatorics;
use crate::report::{Outcome, Residue, Verdict};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Largest number of lines an [`IncidenceStructure`] may carry.
pub const MAX_INCIDENCE_DEGREE: usize = 4096;

pub const LATTICE_MODULUS: u64 = 16;

pub mod lattice_check {
    pub const PER_LINE_PARITY: &str = "per-line-parity";
    pub const CHARACTERISTIC: &str = "characteristic-sum";
    pub const LATTICE_RESIDUE: &str = "blow-up-lattice-residue";
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("degree must lie in 1..={max}, got {degree}")]
    BadDegree { degree: usize, max: usize },
    #[error("point {point} has {size} line(s); a singular point needs at least 2")]
    PointTooSmall { point: usize, size: usize },
    #[error("point {point} mentions line {line}, outside 0..{degree}")]
    LineOutOfRange {
        point: usize,
        line: usize,
        degree: usize,
    },
    #[error("point {point} lists line {line} twice")]
    RepeatedLine { point: usize, line: usize },
    #[error("lines {a} and {b} meet in both point {first} and point {second}")]
    PairCoveredTwice {
        a: usize,
        b: usize,
        first: usize,
        second: usize,
    },
    #[error("line index {line} out of range for degree {degree}")]
    NoSuchLine { line: usize, degree: usize },
    #[error("classes live in blow-ups at {left} and {right} points")]
    DimensionMismatch { left: usize, right: usize },
}

/// `d` labeled lines and the singular points where they meet.
///
/// Point order is the blow-up order. Pairs of lines not listed in any point
/// meet in an implicit double point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IncidenceStructure {
    degree: usize,
    points: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    pub fn new(degree: usize, points: Vec<Vec<usize>>) -> Result<Self, LatticeError> {
        if degree == 0 || degree > MAX_INCIDENCE_DEGREE {
            return Err(LatticeError::BadDegree {
                degree,
                max: MAX_INCIDENCE_DEGREE,
            });
        }
        let mut owner = vec![usize::MAX; degree * degree];
        for (pi, point) in points.iter().enumerate() {
            if point.len() < 2 {
                return Err(LatticeError::PointTooSmall {
                    point: pi,
                    size: point.len(),
                });
            }
            let mut seen = vec![false; degree];
            for &line in point {
                if line >= degree {
                    return Err(LatticeError::LineOutOfRange {
                        point: pi,
                        line,
                        degree,
                    });
                }
                if std::mem::replace(&mut seen[line], true) {
                    return Err(LatticeError::RepeatedLine { point: pi, line });
                }
            }
            for (i, &a) in point.iter().enumerate() {
                for &b in &point[i + 1..] {
                    let (a, b) = (a.min(b), a.max(b));
                    let slot = &mut owner[a * degree + b];
                    if *slot != usize::MAX {
                        return Err(LatticeError::PairCoveredTwice {
                            a,
                            b,
                            first: *slot,
                            second: pi,
                        });
                    }
                    *slot = pi;
                }
            }
        }
        Ok(IncidenceStructure { degree, points })
    }

    /// `d` lines in general position: no listed points at all.
    pub fn generic(degree: usize) -> Result<Self, LatticeError> {
        IncidenceStructure::new(degree, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[Vec<usize>] {
        &self.points
    }

    /// Number of blown-up points.
    pub fn blowup_count(&self) -> usize {
        self.points.len()
    }

    /// `p_k`: how many listed points lie on each line.
    pub fn points_per_line(&self) -> Vec<usize> {
        let mut p = vec![0; self.degree];
        for point in &self.points {
            for &l in point {
                p[l] += 1;
            }
        }
        p
    }

    /// Pairs `(a, b)`, `a < b`, not met in any listed point, in lexicographic order.
    pub fn uncovered_pairs(&self) -> Vec<(usize, usize)> {
        let d = self.degree;
        let mut covered = vec![false; d * d];
        for point in &self.points {
            for (i, &a) in point.iter().enumerate() {
                for &b in &point[i + 1..] {
                    covered[a.min(b) * d + a.max(b)] = true;
                }
            }
        }
        let mut out = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                if !covered[a * d + b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn uncovered_pair_count(&self) -> usize {
        let covered: usize = self
            .points
            .iter()
            .map(|p| p.len() * (p.len() - 1) / 2)
            .sum();
        self.degree * (self.degree - 1) / 2 - covered
    }

    /// Every pair of lines is met in exactly one listed point.
    pub fn fully_covered(&self) -> bool {
        self.uncovered_pair_count() == 0
    }

    /// The same structure with every uncovered pair listed as a double point,
    /// appended after the existing points.
    pub fn with_implicit_doubles(&self) -> IncidenceStructure {
        let mut points = self.points.clone();
        points.extend(self.uncovered_pairs().into_iter().map(|(a, b)| vec![a, b]));
        IncidenceStructure {
            degree: self.degree,
            points,
        }
    }

    /// Relabels lines by `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> IncidenceStructure {
        assert_eq!(
            perm.len(),
            self.degree,
            "permutation length must equal degree"
        );
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|&l| perm[l]).collect())
            .collect();
        IncidenceStructure {
            degree: self.degree,
            points,
        }
    }

    /// Sorts each point and the point list. Not a canonical form under relabeling.
    pub fn normalized(&self) -> IncidenceStructure {
        let mut points: Vec<Vec<usize>> = self
            .points
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort_unstable();
                p
            })
            .collect();
        points.sort();
        IncidenceStructure {
            degree: self.degree,
            points,
        }
    }

    /// Reorders points (blow-up order) without touching line labels.
    pub fn with_point_order(&self, order: &[usize]) -> IncidenceStructure {
        let points = order.iter().map(|&i| self.points[i].clone()).collect();
        IncidenceStructure {
            degree: self.degree,
            points,
        }
    }
}

impl fmt::Display for IncidenceStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lines, {} listed points",
            self.degree,
            self.points.len()
        )
    }
}

/// A class `h·H + sum e_i·E_i` in the blow-up at `e.len()` points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    pub h: i64,
    pub e: Vec<i64>,
}

impl HomologyClass {
    pub fn new(h: i64, e: Vec<i64>) -> Self {
        HomologyClass { h, e }
    }

    pub fn zero(t: usize) -> Self {
        HomologyClass {
            h: 0,
            e: vec![0; t],
        }
    }

    pub fn line(t: usize) -> Self {
        HomologyClass {
            h: 1,
            e: vec![0; t],
        }
    }

    pub fn exceptional(t: usize, i: usize) -> Self {
        let mut e = vec![0; t];
        e[i] = 1;
        HomologyClass { h: 0, e }
    }

    /// The `t + 1` basis classes, line class first.
    pub fn basis(t: usize) -> Vec<HomologyClass> {
        std::iter::once(HomologyClass::line(t))
            .chain((0..t).map(|i| HomologyClass::exceptional(t, i)))
            .collect()
    }

    pub fn blowup_count(&self) -> usize {
        self.e.len()
    }

    pub fn add(&self, other: &HomologyClass) -> Result<HomologyClass, LatticeError> {
        self.same_ambient(other)?;
        Ok(HomologyClass {
            h: self.h + other.h,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, k: i64) -> HomologyClass {
        HomologyClass {
            h: self.h * k,
            e: self.e.iter().map(|x| x * k).collect(),
        }
    }

    pub fn self_intersection(&self) -> i64 {
        intersect(self, self).expect("same ambient")
    }

    fn same_ambient(&self, other: &HomologyClass) -> Result<(), LatticeError> {
        if self.e.len() != other.e.len() {
            return Err(LatticeError::DimensionMismatch {
                left: self.e.len(),
                right: other.e.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.e.iter().map(i64::to_string).collect();
        write!(f, "({}; {})", self.h, e.join(","))
    }
}

/// `a.h * b.h - sum_i a.e[i] * b.e[i]`.
pub fn intersect(a: &HomologyClass, b: &HomologyClass) -> Result<i64, LatticeError> {
    a.same_ambient(b)?;
    Ok(a.h * b.h - a.e.iter().zip(&b.e).map(|(x, y)| x * y).sum::<i64>())
}

/// All coordinates odd in the preferred basis.
pub fn is_characteristic(c: &HomologyClass) -> bool {
    c.h % 2 != 0 && c.e.iter().all(|x| x % 2 != 0)
}

/// Signature of the projective plane blown up at `t` points.
pub fn signature(t: usize) -> i64 {
    1 - t as i64
}

pub fn strict_transform_class(
    inc: &IncidenceStructure,
    line: usize,
) -> Result<HomologyClass, LatticeError> {
    if line >= inc.degree {
        return Err(LatticeError::NoSuchLine {
            line,
            degree: inc.degree,
        });
    }
    let e = inc
        .points
        .iter()
        .map(|p| i64::from(p.contains(&line)))
        .collect();
    Ok(HomologyClass { h: 1, e })
}

/// Sum of the strict transforms of all lines.
pub fn total_strict_transform(inc: &IncidenceStructure) -> HomologyClass {
    let mut total = HomologyClass::zero(inc.blowup_count());
    for k in 0..inc.degree {
        let f = strict_transform_class(inc, k).expect("line in range");
        total = total.add(&f).expect("same ambient");
    }
    total
}

/// Why an incidence-level check is outside its hypotheses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inapplicable {
    /// Lines `a`, `b` meet in an implicit double point.
    Uncovered { a: usize, b: usize, count: usize },
    /// Point `point` has even multiplicity.
    EvenPoint { point: usize, multiplicity: usize },
}

impl fmt::Display for Inapplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inapplicable::Uncovered { a, b, count } => write!(
                f,
                "lines {a} and {b} meet in an implicit double point ({count} uncovered pair(s))"
            ),
            Inapplicable::EvenPoint {
                point,
                multiplicity,
            } => write!(f, "point {point} has even multiplicity {multiplicity}"),
        }
    }
}

fn odd_and_covered(inc: &IncidenceStructure) -> Result<(), Inapplicable> {
    if let Some((i, p)) = inc
        .points
        .iter()
        .enumerate()
        .find(|(_, p)| p.len() % 2 == 0)
    {
        return Err(Inapplicable::EvenPoint {
            point: i,
            multiplicity: p.len(),
        });
    }
    let uncovered = inc.uncovered_pairs();
    if let Some(&(a, b)) = uncovered.first() {
        return Err(Inapplicable::Uncovered {
            a,
            b,
            count: uncovered.len(),
        });
    }
    Ok(())
}

/// Result of the lattice-level congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeResidue {
    /// `sum_k F_k . F_k`.
    pub self_intersection_sum: i64,
    /// `1 - t`.
    pub signature: i64,
    pub residue: Residue,
}

impl LatticeResidue {
    pub fn passes(&self) -> bool {
        self.residue.is_zero()
    }
}

/// `sum_k F_k.F_k - sigma(X)` mod 16, computed from the strict-transform
/// classes in the blow-up. Needs full coverage and odd multiplicities, which
/// make the total class characteristic.
pub fn lemma_km_residue(inc: &IncidenceStructure) -> Result<LatticeResidue, Inapplicable> {
    odd_and_covered(inc)?;
    let t = inc.blowup_count();
    let mut sum = 0i64;
    for k in 0..inc.degree {
        sum += strict_transform_class(inc, k)
            .expect("line in range")
            .self_intersection();
    }
    debug_assert!(is_characteristic(&total_strict_transform(inc)));
    let sigma = signature(t);
    Ok(LatticeResidue {
        self_intersection_sum: sum,
        signature: sigma,
        residue: Residue::reduce((sum - sigma) as i128, LATTICE_MODULUS),
    })
}

/// Witness for the per-line cross-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineParity {
    /// Line whose tally disagrees with `d - 1` or has an odd summand.
    pub offending_line: Option<usize>,
}

impl LineParity {
    pub fn passes(&self) -> bool {
        self.offending_line.is_none()
    }
}

/// For each line `k`, `sum_{points p on k} (|p| - 1) = d - 1` with every
/// summand even. Always holds under the hypotheses; a failure would mean the
/// structure is internally inconsistent.
pub fn per_line_parity(inc: &IncidenceStructure) -> Result<LineParity, Inapplicable> {
    odd_and_covered(inc)?;
    let mut met = vec![0usize; inc.degree];
    let mut odd_summand = vec![false; inc.degree];
    for p in &inc.points {
        for &l in p {
            met[l] += p.len() - 1;
            odd_summand[l] |= (p.len() - 1) % 2 == 1;
        }
    }
    let offending_line = (0..inc.degree).find(|&k| met[k] != inc.degree - 1 || odd_summand[k]);
    Ok(LineParity { offending_line })
}

/// Weak combinatorics of an incidence structure plus how many of its double
/// points were implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub weak: WeakCombinatorics,
    pub implicit_doubles: usize,
}

pub fn weak_combinatorics_of(inc: &IncidenceStructure) -> Projection {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for p in &inc.points {
        *counts.entry(p.len() as u64).or_default() += 1;
    }
    let implicit = inc.uncovered_pair_count();
    if implicit > 0 {
        *counts.entry(2).or_default() += implicit as u64;
    }
    let weak = WeakCombinatorics::new(inc.degree as u64, counts).expect("point sizes lie in 2..=d");
    Projection {
        weak,
        implicit_doubles: implicit,
    }
}

/// Both sides of `sum_k p_k = sum_m m t_m`, counted over listed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IncidenceCount {
    pub by_lines: u64,
    pub by_points: u64,
}

impl IncidenceCount {
    pub fn holds(&self) -> bool {
        self.by_lines == self.by_points
    }
}

pub fn point_line_incidence_identity(inc: &IncidenceStructure) -> IncidenceCount {
    let by_lines = inc.points_per_line().iter().map(|&p| p as u64).sum();
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    for p in &inc.points {
        *tally.entry(p.len() as u64).or_default() += 1;
    }
    IncidenceCount {
        by_lines,
        by_points: tally.iter().map(|(m, t)| m * t).sum(),
    }
}

/// Incidence-level verdicts appended after the weak-combinatorics pipeline.
pub fn incidence_verdicts(inc: &IncidenceStructure) -> Vec<Verdict> {
    let mut out = Vec::new();
    out.push(match per_line_parity(inc) {
        Ok(lp) if lp.passes() => Verdict::new(
            lattice_check::PER_LINE_PARITY,
            Outcome::Pass,
            "every line meets d-1 others through even-sized bundles",
        ),
        Ok(lp) => Verdict::new(
            lattice_check::PER_LINE_PARITY,
            Outcome::Fail,
            "per-line tally inconsistent",
        )
        .with_witness(format!("line {}", lp.offending_line.unwrap_or_default())),
        Err(why) => Verdict::not_applicable(lattice_check::PER_LINE_PARITY, why.to_string()),
    });

    let total = total_strict_transform(inc);
    let characteristic = is_characteristic(&total);
    out.push(if characteristic {
        Verdict::new(
            lattice_check::CHARACTERISTIC,
            Outcome::Pass,
            "sum of strict transforms has all coefficients odd",
        )
        .with_witness(total.to_string())
    } else {
        Verdict::not_applicable(
            lattice_check::CHARACTERISTIC,
            "sum of strict transforms is not characteristic",
        )
        .with_witness(total.to_string())
    });

    out.push(match lemma_km_residue(inc) {
        Ok(r) => Verdict::new(
            lattice_check::LATTICE_RESIDUE,
            Outcome::from_bool(r.passes()),
            format!(
                "sum F_k.F_k = {} vs signature {} mod 16",
                r.self_intersection_sum, r.signature
            ),
        )
        .with_residue(r.residue),
        Err(why) => Verdict::not_applicable(lattice_check::LATTICE_RESIDUE, why.to_string()),
    });
    out
}

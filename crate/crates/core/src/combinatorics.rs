//! Weak combinatorics of a line arrangement: the degree `d` together with the
//! number `t_m` of singular points of each multiplicity `m`.
//!
//! Every check here is exact. Sums are carried in `i128`; with the degree
//! capped at [`MAX_DEGREE`] and counts stored as `u64`, the largest sum the
//! crate ever forms is bounded by `10^6 * C(10^6, 2) * u64::MAX < 10^37`,
//! comfortably below `i128::MAX`.

use crate::report::{Outcome, Residue, Verdict};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Largest degree accepted by the congruence checks.
pub const MAX_DEGREE: u64 = 1_000_000;

/// Default cap on the degree for [`feasible_count_vectors`].
pub const DEFAULT_SCAN_CAP: u64 = 200;

/// Moduli used by the obstructions.
pub const ODD_MODULUS: u64 = 16;
pub const TRIPLE_MODULUS: u64 = 24;

/// Residues of `d` mod 24 admitted for arrangements with only triple points.
pub const TRIPLE_ONLY_RESIDUES: [u64; 4] = [1, 3, 9, 19];

pub mod check {
    pub const PAIR_COUNT: &str = "pair-count-identity";
    pub const ODD_MULTIPLICITIES: &str = "odd-multiplicities";
    pub const LINE_PARITY: &str = "line-parity";
    pub const ODD_CONGRUENCE: &str = "odd-multiplicity-congruence";
    pub const TRIPLE_GATE: &str = "triple-only-degree-gate";
    pub const MELCHIOR: &str = "melchior-inequality";
    pub const HIRZEBRUCH: &str = "hirzebruch-inequality";
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: u64, max: u64 },
    #[error("multiplicity {multiplicity} is outside 2..={degree}")]
    MultiplicityOutOfRange { multiplicity: u64, degree: u64 },
    #[error("count for multiplicity {multiplicity} must be positive")]
    ZeroCount { multiplicity: u64 },
    #[error("multiplicity {multiplicity} is even; the odd-multiplicity congruence does not apply")]
    EvenMultiplicity { multiplicity: u64 },
    #[error("t_3 = d(d-1)/6 is not an integer for d = {degree}")]
    NonIntegralTripleCount { degree: u64 },
    #[error("degree {degree} exceeds the scan cap {cap}")]
    CapExceeded { degree: u64, cap: u64 },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("malformed counts entry `{entry}`: expected m:t")]
    MalformedCounts { entry: String },
    #[error("multiplicity {multiplicity} listed twice")]
    DuplicateMultiplicity { multiplicity: u64 },
}

/// Degree plus sparse multiplicity counts. Zero counts are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWeak")]
pub struct WeakCombinatorics {
    degree: u64,
    counts: BTreeMap<u64, u64>,
}

#[derive(Deserialize)]
struct RawWeak {
    degree: u64,
    #[serde(default)]
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<RawWeak> for WeakCombinatorics {
    type Error = CombinatoricsError;

    fn try_from(raw: RawWeak) -> Result<Self, Self::Error> {
        WeakCombinatorics::new(raw.degree, raw.counts)
    }
}

impl WeakCombinatorics {
    pub fn new(degree: u64, counts: BTreeMap<u64, u64>) -> Result<Self, CombinatoricsError> {
        if degree > MAX_DEGREE {
            return Err(CombinatoricsError::DegreeTooLarge {
                degree,
                max: MAX_DEGREE,
            });
        }
        for (&m, &t) in &counts {
            if m < 2 || m > degree {
                return Err(CombinatoricsError::MultiplicityOutOfRange {
                    multiplicity: m,
                    degree,
                });
            }
            if t == 0 {
                return Err(CombinatoricsError::ZeroCount { multiplicity: m });
            }
        }
        Ok(WeakCombinatorics { degree, counts })
    }

    /// Convenience constructor from `(m, t_m)` pairs; zero counts are dropped.
    pub fn from_pairs(
        degree: u64,
        pairs: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self, CombinatoricsError> {
        let mut counts = BTreeMap::new();
        for (m, t) in pairs {
            if t == 0 {
                continue;
            }
            if counts.insert(m, t).is_some() {
                return Err(CombinatoricsError::DuplicateMultiplicity { multiplicity: m });
            }
        }
        WeakCombinatorics::new(degree, counts)
    }

    /// The single point through all `d` lines.
    pub fn pencil(degree: u64) -> Result<Self, CombinatoricsError> {
        WeakCombinatorics::from_pairs(degree, [(degree, 1)])
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, multiplicity: u64) -> u64 {
        self.counts.get(&multiplicity).copied().unwrap_or(0)
    }

    /// Total number of singular points, `t = sum_m t_m`.
    pub fn total_points(&self) -> i128 {
        self.counts.values().map(|&t| t as i128).sum()
    }

    pub fn is_pencil(&self) -> bool {
        self.degree >= 2 && self.counts.len() == 1 && self.count(self.degree) == 1
    }

    /// Reporting label only: at least three lines and two distinct singular points.
    pub fn is_nontrivial(&self) -> bool {
        self.degree >= 3 && self.total_points() >= 2
    }

    /// True when the only multiplicity present is 3 (or there are no points).
    pub fn is_triple_only(&self) -> bool {
        self.counts.keys().all(|&m| m == 3)
    }
}

impl fmt::Display for WeakCombinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} {}", self.degree, format_counts(&self.counts))
    }
}

/// `{3:12, 5:1}` style rendering, ascending multiplicity.
pub fn format_counts(counts: &BTreeMap<u64, u64>) -> String {
    let body: Vec<String> = counts.iter().map(|(m, t)| format!("{m}:{t}")).collect();
    format!("{{{}}}", body.join(", "))
}

/// Parses `3:26,5:1`. Empty input gives empty counts.
pub fn parse_counts(text: &str) -> Result<BTreeMap<u64, u64>, CombinatoricsError> {
    let mut counts = BTreeMap::new();
    for entry in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let malformed = || CombinatoricsError::MalformedCounts {
            entry: entry.to_string(),
        };
        let (m, t) = entry.split_once(':').ok_or_else(malformed)?;
        let m: u64 = m.trim().parse().map_err(|_| malformed())?;
        let t: u64 = t.trim().parse().map_err(|_| malformed())?;
        if counts.insert(m, t).is_some() {
            return Err(CombinatoricsError::DuplicateMultiplicity { multiplicity: m });
        }
    }
    Ok(counts)
}

fn binom2(n: u64) -> i128 {
    let n = n as i128;
    n * (n - 1) / 2
}

/// Both sides of the pair-count identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCount {
    /// `sum_m C(m,2) t_m`.
    pub covered: i128,
    /// `C(d,2)`.
    pub total: i128,
}

impl PairCount {
    pub fn holds(&self) -> bool {
        self.covered == self.total
    }
}

/// Every unordered pair of lines meets in exactly one singular point.
pub fn pair_count_identity(wc: &WeakCombinatorics) -> PairCount {
    let covered = wc.counts.iter().map(|(&m, &t)| binom2(m) * t as i128).sum();
    PairCount {
        covered,
        total: binom2(wc.degree),
    }
}

pub fn all_multiplicities_odd(wc: &WeakCombinatorics) -> bool {
    wc.counts.keys().all(|m| m % 2 == 1)
}

fn first_even_multiplicity(wc: &WeakCombinatorics) -> Option<u64> {
    wc.counts.keys().copied().find(|m| m % 2 == 0)
}

/// With only odd multiplicities every line meets an even number of others,
/// so `d` must be odd. `NotApplicable` when an even multiplicity is present.
/// `d = 0` passes vacuously.
pub fn line_parity_check(wc: &WeakCombinatorics) -> Outcome {
    if !all_multiplicities_odd(wc) {
        Outcome::NotApplicable
    } else {
        Outcome::from_bool(wc.degree == 0 || wc.degree % 2 == 1)
    }
}

/// `sum_m (m-1) t_m - (d-1)` reduced mod 16. Passing means residue 0.
///
/// The empty arrangement (`d = 0`) is treated as vacuously passing.
pub fn odd_multiplicity_congruence(wc: &WeakCombinatorics) -> Result<Residue, CombinatoricsError> {
    if let Some(m) = first_even_multiplicity(wc) {
        return Err(CombinatoricsError::EvenMultiplicity { multiplicity: m });
    }
    if wc.degree == 0 {
        return Ok(Residue::reduce(0, ODD_MODULUS));
    }
    let lhs: i128 = wc
        .counts
        .iter()
        .map(|(&m, &t)| (m as i128 - 1) * t as i128)
        .sum();
    Ok(Residue::reduce(lhs - (wc.degree as i128 - 1), ODD_MODULUS))
}

/// Number of triple points forced when every pair of lines meets in one.
pub fn triple_count_from_degree(degree: u64) -> Result<u64, CombinatoricsError> {
    if degree == 0 {
        return Err(CombinatoricsError::ZeroDegree);
    }
    let pairs = degree as u128 * (degree as u128 - 1);
    if !pairs.is_multiple_of(6) {
        return Err(CombinatoricsError::NonIntegralTripleCount { degree });
    }
    Ok((pairs / 6) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeGate {
    pub residue: Residue,
}

impl DegreeGate {
    pub fn passes(&self) -> bool {
        TRIPLE_ONLY_RESIDUES.contains(&self.residue.value)
    }
}

/// Degrees admissible for arrangements with only triple points.
pub fn triple_only_degree_gate(degree: u64) -> DegreeGate {
    DegreeGate {
        residue: Residue::reduce(degree as i128, TRIPLE_MODULUS),
    }
}

/// Which realization category to apply the classical inequalities for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationClass {
    Pseudoline,
    Complex,
    LocallyFlat,
}

/// Melchior's inequality for pseudoline arrangements and Hirzebruch's for
/// complex ones. These come from the classical literature rather than the
/// congruence obstructions and are applied only when requested.
///
/// Melchior: `t_2 >= 3 + sum_{m>=4} (m-3) t_m`, skipped for pencils and `d < 3`.
/// Hirzebruch: `t_2 + (3/4) t_3 >= d + sum_{m>=5} (m-4) t_m`, needs `d >= 6`
/// and `t_d = t_{d-1} = 0`.
pub fn classical_filters(wc: &WeakCombinatorics, class: RealizationClass) -> Vec<Verdict> {
    let t = |m: u64| wc.count(m) as i128;
    let d = wc.degree;

    let melchior = if class != RealizationClass::Pseudoline {
        Verdict::not_applicable(check::MELCHIOR, "applies to pseudoline arrangements only")
    } else if d < 3 || wc.is_pencil() {
        Verdict::not_applicable(check::MELCHIOR, "pencil or trivial arrangement")
    } else {
        let rhs: i128 = 3 + wc
            .counts
            .iter()
            .filter(|(&m, _)| m >= 4)
            .map(|(&m, &c)| (m as i128 - 3) * c as i128)
            .sum::<i128>();
        let lhs = t(2);
        Verdict::new(
            check::MELCHIOR,
            Outcome::from_bool(lhs >= rhs),
            format!("t_2 = {lhs} vs 3 + sum (m-3) t_m = {rhs}"),
        )
    };

    let hirzebruch = if class != RealizationClass::Complex {
        Verdict::not_applicable(check::HIRZEBRUCH, "applies to complex arrangements only")
    } else if d < 6 || t(d) != 0 || t(d - 1) != 0 {
        Verdict::not_applicable(
            check::HIRZEBRUCH,
            "requires d >= 6 and no point of multiplicity d or d-1",
        )
    } else {
        // scaled by 4 to stay integral
        let lhs4 = 4 * t(2) + 3 * t(3);
        let rhs4 = 4
            * (d as i128
                + wc.counts
                    .iter()
                    .filter(|(&m, _)| m >= 5)
                    .map(|(&m, &c)| (m as i128 - 4) * c as i128)
                    .sum::<i128>());
        Verdict::new(
            check::HIRZEBRUCH,
            Outcome::from_bool(lhs4 >= rhs4),
            format!("4 t_2 + 3 t_3 = {lhs4} vs 4 (d + sum (m-4) t_m) = {rhs4}"),
        )
    };

    vec![melchior, hirzebruch]
}

/// Runs the degree- and multiplicity-level checks in pipeline order.
pub fn weak_verdicts(
    wc: &WeakCombinatorics,
    realization: Option<RealizationClass>,
) -> Vec<Verdict> {
    let mut out = Vec::new();

    let pc = pair_count_identity(wc);
    out.push(Verdict::new(
        check::PAIR_COUNT,
        Outcome::from_bool(pc.holds()),
        format!("sum C(m,2) t_m = {} vs C(d,2) = {}", pc.covered, pc.total),
    ));

    let even = first_even_multiplicity(wc);
    out.push(match even {
        None => Verdict::new(
            check::ODD_MULTIPLICITIES,
            Outcome::Pass,
            "all multiplicities odd",
        ),
        Some(m) => Verdict::not_applicable(
            check::ODD_MULTIPLICITIES,
            format!("multiplicity {m} is even; odd-multiplicity obstructions do not apply"),
        ),
    });

    out.push(match line_parity_check(wc) {
        Outcome::NotApplicable => {
            Verdict::not_applicable(check::LINE_PARITY, "even multiplicity present")
        }
        outcome if wc.degree == 0 => {
            Verdict::new(check::LINE_PARITY, outcome, "empty arrangement")
        }
        outcome => Verdict::new(
            check::LINE_PARITY,
            outcome,
            format!("d = {} must be odd", wc.degree),
        ),
    });

    out.push(match odd_multiplicity_congruence(wc) {
        Ok(r) => Verdict::new(
            check::ODD_CONGRUENCE,
            Outcome::from_bool(r.is_zero()),
            "sum (m-1) t_m - (d-1) must vanish mod 16",
        )
        .with_residue(r),
        Err(e) => Verdict::not_applicable(check::ODD_CONGRUENCE, e.to_string()),
    });

    out.push(if !wc.is_triple_only() {
        Verdict::not_applicable(
            check::TRIPLE_GATE,
            "points other than triple points present",
        )
    } else if wc.degree == 0 {
        Verdict::not_applicable(check::TRIPLE_GATE, "empty arrangement")
    } else {
        let gate = triple_only_degree_gate(wc.degree);
        Verdict::new(
            check::TRIPLE_GATE,
            Outcome::from_bool(gate.passes()),
            "d mod 24 must lie in {1, 3, 9, 19}",
        )
        .with_residue(gate.residue)
    });

    if let Some(class) = realization {
        out.extend(classical_filters(wc, class));
    }
    out
}

/// Lazy stream of count vectors satisfying the pair-count identity.
///
/// Vectors are ordered lexicographically on `(t_d, t_{d-1}, ..., t_min)`,
/// so the stream is the concatenation of [`feasible_with_largest`] chunks for
/// increasing largest multiplicity.
pub fn feasible_count_vectors(
    degree: u64,
    odd_only: bool,
    cap: u64,
) -> Result<CountVectors, CombinatoricsError> {
    if degree == 0 {
        return Err(CombinatoricsError::ZeroDegree);
    }
    if degree > cap {
        return Err(CombinatoricsError::CapExceeded { degree, cap });
    }
    Ok(CountVectors::new(
        degree,
        allowed_multiplicities(degree, odd_only),
        0,
    ))
}

/// The chunk of [`feasible_count_vectors`] whose largest multiplicity is
/// exactly `largest`. Chunks are disjoint and can be generated independently.
pub fn feasible_with_largest(
    degree: u64,
    odd_only: bool,
    largest: u64,
    cap: u64,
) -> Result<CountVectors, CombinatoricsError> {
    if degree == 0 {
        return Err(CombinatoricsError::ZeroDegree);
    }
    if degree > cap {
        return Err(CombinatoricsError::CapExceeded { degree, cap });
    }
    let ms: Vec<u64> = allowed_multiplicities(degree, odd_only)
        .into_iter()
        .filter(|&m| m <= largest)
        .collect();
    if ms.first() != Some(&largest) {
        return Ok(CountVectors::exhausted(degree));
    }
    Ok(CountVectors::new(degree, ms, 1))
}

/// Multiplicities usable at this degree, descending.
pub fn allowed_multiplicities(degree: u64, odd_only: bool) -> Vec<u64> {
    let lo = if odd_only { 3 } else { 2 };
    (lo..=degree)
        .rev()
        .filter(|m| !odd_only || m % 2 == 1)
        .collect()
}

/// Odometer over `t_m` for descending `m`; the last coordinate is forced.
#[derive(Clone, Debug)]
pub struct CountVectors {
    degree: u64,
    mults: Vec<u64>,
    weights: Vec<u128>,
    ts: Vec<u64>,
    // rem[i]: pairs still to cover before choosing ts[i]
    rem: Vec<u128>,
    min_first: u64,
    state: StreamState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StreamState {
    Fresh,
    Running,
    Done,
}

impl CountVectors {
    fn new(degree: u64, mults: Vec<u64>, min_first: u64) -> Self {
        let weights: Vec<u128> = mults
            .iter()
            .map(|&m| m as u128 * (m as u128 - 1) / 2)
            .collect();
        let n = mults.len();
        let total = degree as u128 * (degree as u128 - 1) / 2;
        let mut rem = vec![0; n + 1];
        rem[0] = total;
        CountVectors {
            degree,
            mults,
            weights,
            ts: vec![0; n],
            rem,
            min_first,
            state: StreamState::Fresh,
        }
    }

    fn exhausted(degree: u64) -> Self {
        let mut s = CountVectors::new(degree.max(1), Vec::new(), 0);
        s.state = StreamState::Done;
        s
    }

    fn fill_from(&mut self, start: usize) {
        let n = self.mults.len();
        for j in start..n.saturating_sub(1) {
            self.ts[j] = 0;
            self.rem[j + 1] = self.rem[j];
        }
    }

    /// Whether the current prefix completes to a solution, setting the last coordinate.
    fn close_last(&mut self) -> bool {
        let n = self.mults.len();
        let last = n - 1;
        let w = self.weights[last];
        let r = self.rem[last];
        if !r.is_multiple_of(w) {
            return false;
        }
        let t = r / w;
        if last == 0 && (t as u64) < self.min_first {
            return false;
        }
        self.ts[last] = t as u64;
        true
    }

    fn advance(&mut self) -> bool {
        let n = self.mults.len();
        for j in (0..n.saturating_sub(1)).rev() {
            let next = self.ts[j] as u128 + 1;
            if next * self.weights[j] <= self.rem[j] {
                self.ts[j] = next as u64;
                self.rem[j + 1] = self.rem[j] - next * self.weights[j];
                self.fill_from(j + 1);
                return true;
            }
        }
        false
    }

    fn start(&mut self) -> bool {
        let n = self.mults.len();
        if n > 1 {
            let first = self.min_first as u128;
            if first * self.weights[0] > self.rem[0] {
                return false;
            }
            self.ts[0] = first as u64;
            self.rem[1] = self.rem[0] - first * self.weights[0];
            self.fill_from(1);
        }
        true
    }

    fn current(&self) -> WeakCombinatorics {
        WeakCombinatorics::from_pairs(
            self.degree,
            self.mults.iter().copied().zip(self.ts.iter().copied()),
        )
        .expect("generated counts respect the invariants")
    }
}

impl Iterator for CountVectors {
    type Item = WeakCombinatorics;

    fn next(&mut self) -> Option<Self::Item> {
        if self.mults.is_empty() {
            // Only the empty vector can work, and only when there are no pairs.
            let yield_empty = self.state == StreamState::Fresh && self.rem[0] == 0;
            self.state = StreamState::Done;
            return yield_empty.then(|| self.current());
        }
        loop {
            match self.state {
                StreamState::Done => return None,
                StreamState::Fresh => {
                    self.state = StreamState::Running;
                    if !self.start() {
                        self.state = StreamState::Done;
                        return None;
                    }
                }
                StreamState::Running => {
                    if !self.advance() {
                        self.state = StreamState::Done;
                        return None;
                    }
                }
            }
            if self.close_last() {
                return Some(self.current());
            }
        }
    }
}

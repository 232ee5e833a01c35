//! Check pipelines shared by the library and the command line.

use crate::combinatorics::{check, weak_verdicts, RealizationClass, WeakCombinatorics};
use crate::lattice::{incidence_verdicts, weak_combinatorics_of, IncidenceStructure};
use crate::report::ObstructionReport;
use sha2::{Digest, Sha256};

/// Pair count, odd multiplicities, line parity, the mod-16 congruence, the
/// triple-only gate, and the classical inequalities when a realization class
/// is given.
pub fn check_weak(
    wc: &WeakCombinatorics,
    realization: Option<RealizationClass>,
) -> ObstructionReport {
    ObstructionReport::new(wc.to_string(), weak_verdicts(wc, realization))
}

/// The weak pipeline on the projected combinatorics, followed by the
/// per-line parity cross-check and the blow-up lattice residue.
pub fn check_incidence(
    inc: &IncidenceStructure,
    name: Option<&str>,
    realization: Option<RealizationClass>,
) -> ObstructionReport {
    let projection = weak_combinatorics_of(inc);
    let mut verdicts = weak_verdicts(&projection.weak, realization);
    if let Some(v) = verdicts.iter_mut().find(|v| v.check == check::PAIR_COUNT) {
        v.witness = Some(format!(
            "implicit double points: {}",
            projection.implicit_doubles
        ));
    }
    verdicts.extend(incidence_verdicts(inc));
    let subject = match name {
        Some(n) => format!("{n} ({}, sha256:{})", projection.weak, digest(inc)),
        None => format!("{} (sha256:{})", projection.weak, digest(inc)),
    };
    ObstructionReport::new(subject, verdicts)
}

/// Short digest of the point list as given.
pub fn digest(inc: &IncidenceStructure) -> String {
    let mut hasher = Sha256::new();
    hasher.update(inc.degree().to_le_bytes());
    for p in inc.points() {
        hasher.update(b"[");
        for l in p {
            hasher.update(l.to_le_bytes());
        }
        hasher.update(b"]");
    }
    let bytes = hasher.finalize();
    bytes[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::lattice_check;
    use crate::report::Outcome;

    #[test]
    fn degree13_at_weak_level() {
        let r = check_weak(&WeakCombinatorics::from_pairs(13, [(3, 26)]).unwrap(), None);
        assert_eq!(r.overall(), Outcome::Fail);
        assert_eq!(
            r.verdict(check::ODD_CONGRUENCE)
                .unwrap()
                .residue
                .unwrap()
                .value,
            8
        );
        assert_eq!(r.verdict(check::PAIR_COUNT).unwrap().outcome, Outcome::Pass);

        let r = check_weak(&WeakCombinatorics::from_pairs(9, [(3, 12)]).unwrap(), None);
        assert_eq!(r.overall(), Outcome::Pass);
        let r = check_weak(&WeakCombinatorics::from_pairs(3, [(3, 1)]).unwrap(), None);
        assert_eq!(r.overall(), Outcome::Pass);
    }

    #[test]
    fn incidence_reports() {
        let r = check_incidence(&fixtures::dual_hesse(), Some("dual_hesse"), None);
        assert_eq!(r.overall(), Outcome::Pass);
        assert_eq!(
            r.verdict(lattice_check::LATTICE_RESIDUE)
                .unwrap()
                .residue
                .unwrap()
                .value,
            0
        );
        let r = check_incidence(&fixtures::fano(), None, None);
        assert_eq!(r.overall(), Outcome::Fail);
        assert_eq!(
            r.verdict(lattice_check::LATTICE_RESIDUE)
                .unwrap()
                .residue
                .unwrap()
                .value,
            8
        );

        let partial = IncidenceStructure::new(5, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        let r = check_incidence(&partial, None, None);
        let pc = r.verdict(check::PAIR_COUNT).unwrap();
        assert_eq!(pc.outcome, Outcome::Pass);
        assert_eq!(pc.witness.as_deref(), Some("implicit double points: 4"));
        assert_eq!(
            r.verdict(lattice_check::LATTICE_RESIDUE).unwrap().outcome,
            Outcome::NotApplicable
        );
    }

    #[test]
    fn digest_depends_on_labels() {
        let f = fixtures::fano();
        assert_eq!(digest(&f), digest(&f.clone()));
        assert_ne!(digest(&f), digest(&f.relabel(&[1, 0, 2, 3, 4, 5, 6])));
    }
}

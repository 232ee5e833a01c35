use arrgate_core::combinatorics::{
    line_parity_check, odd_multiplicity_congruence, triple_count_from_degree,
    triple_only_degree_gate, WeakCombinatorics,
};
use arrgate_core::enumerate::{
    are_isomorphic, canonical_form, enumerate_triple_systems, is_canonical, Budget,
    EnumerationCertificate,
};
use arrgate_core::fixtures;
use arrgate_core::incidence_file::{parse_certificate_structures, write_certificate};
use arrgate_core::lattice::{
    lemma_km_residue, per_line_parity, weak_combinatorics_of, IncidenceStructure,
};
use arrgate_core::Outcome;
use std::sync::OnceLock;

fn certificate(d: usize) -> &'static EnumerationCertificate {
    static CERTS: OnceLock<Vec<EnumerationCertificate>> = OnceLock::new();
    let all = CERTS.get_or_init(|| {
        [7, 9, 13]
            .into_iter()
            .map(|d| enumerate_triple_systems(d, &Budget::default()).unwrap())
            .collect()
    });
    all.iter().find(|c| c.degree == d).unwrap()
}

fn assert_paths_agree(inc: &IncidenceStructure) -> u64 {
    let lattice = lemma_km_residue(inc).unwrap();
    let weak = weak_combinatorics_of(inc).weak;
    let congruence = odd_multiplicity_congruence(&weak).unwrap();
    assert_eq!(lattice.residue, congruence.negate(), "{weak}");
    assert_eq!(lattice.passes(), congruence.is_zero());
    lattice.residue.value
}

#[test]
fn lattice_and_congruence_agree_on_enumerated_systems() {
    for (d, expected) in [(7, 8), (9, 0), (13, 8)] {
        for inc in &certificate(d).structures {
            assert_eq!(assert_paths_agree(inc), expected, "d={d}");
        }
    }
}

#[test]
fn lattice_and_congruence_agree_on_pencils() {
    for d in (3..=99).step_by(2) {
        assert_eq!(assert_paths_agree(&fixtures::pencil(d).unwrap()), 0);
    }
}

#[test]
fn class_counts() {
    assert_eq!(certificate(7).structures.len(), 1);
    assert_eq!(certificate(9).structures.len(), 1);
    assert_eq!(certificate(13).structures.len(), 2);
    let [a, b] = &certificate(13).structures[..] else {
        unreachable!()
    };
    assert_eq!(are_isomorphic(a, b).unwrap(), None);
}

#[test]
fn small_planes_match_their_constructions() {
    let fano = &certificate(7).structures[0];
    let witness = are_isomorphic(&fixtures::fano(), fano)
        .unwrap()
        .expect("fano");
    assert_eq!(
        fixtures::fano().relabel(&witness).normalized(),
        fano.normalized()
    );
    assert!(
        are_isomorphic(&fixtures::dual_hesse(), &certificate(9).structures[0])
            .unwrap()
            .is_some()
    );
}

#[test]
fn certificate_structures_round_trip() {
    for d in [7, 9, 13] {
        let cert = certificate(d);
        let t3 = triple_count_from_degree(d as u64).unwrap();
        let text = write_certificate(cert, None);
        let parsed = parse_certificate_structures(&text).unwrap();
        assert_eq!(&parsed, &cert.structures);
        for inc in &parsed {
            assert!(per_line_parity(inc).unwrap().passes());
            let projection = weak_combinatorics_of(inc);
            assert_eq!(projection.implicit_doubles, 0);
            assert_eq!(
                projection.weak,
                WeakCombinatorics::from_pairs(d as u64, [(3, t3)]).unwrap()
            );
            assert!(is_canonical(inc).unwrap());
            assert_eq!(&canonical_form(inc).unwrap().structure, inc);
        }
    }
}

#[test]
fn constructive_and_degree_gates_agree() {
    for d in [7u64, 9, 13] {
        let gate = triple_only_degree_gate(d).passes();
        let constructive = certificate(d as usize)
            .structures
            .iter()
            .all(|inc| lemma_km_residue(inc).unwrap().passes());
        assert_eq!(gate, constructive, "d={d}");
    }
}

#[test]
fn pencil_weak_combinatorics_pass() {
    for d in (3..=1001).step_by(2) {
        let wc = WeakCombinatorics::pencil(d).unwrap();
        assert!(odd_multiplicity_congruence(&wc).unwrap().is_zero());
        assert_eq!(line_parity_check(&wc), Outcome::Pass);
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let reference = write_certificate(certificate(9), None);
    for workers in [1, 2, 3] {
        let budget = Budget {
            workers: Some(workers),
            ..Budget::default()
        };
        let cert = enumerate_triple_systems(9, &budget).unwrap();
        assert_eq!(
            write_certificate(&cert, None),
            reference,
            "workers={workers}"
        );
    }
    let budget = Budget {
        workers: Some(2),
        ..Budget::default()
    };
    let cert = enumerate_triple_systems(13, &budget).unwrap();
    assert_eq!(
        write_certificate(&cert, None),
        write_certificate(certificate(13), None)
    );
}

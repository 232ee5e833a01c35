use crate::error::CliError;
use arrgate_core::combinatorics::parse_counts;
use arrgate_core::enumerate::{enumerate_triple_systems, Budget, EnumerateError};
use arrgate_core::fixtures::{build_fixture, FixtureError};
use arrgate_core::incidence_file::{
    parse_incidence, write_certificate, write_incidence, IncidenceFile,
};
use arrgate_core::lattice::{lemma_km_residue, Inapplicable};
use arrgate_core::pipeline::{check_incidence, check_weak};
use arrgate_core::{ObstructionReport, Outcome, RealizationClass, WeakCombinatorics};
use std::path::Path;
use std::time::Duration;

pub enum CheckInput<'a> {
    File(&'a Path),
    Counts { degree: u64, counts: &'a str },
}

pub struct Checked {
    pub report: ObstructionReport,
    /// Expected outcome recorded in the input file, if any.
    pub expect: Option<Outcome>,
}

pub fn read_incidence(path: &Path) -> Result<IncidenceFile, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_incidence(&text).map_err(|e| CliError::Data(format!("{}:{e}", path.display())))
}

pub fn check(
    input: CheckInput<'_>,
    realization: Option<RealizationClass>,
) -> Result<Checked, CliError> {
    match input {
        CheckInput::File(path) => {
            let file = read_incidence(path)?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            let name = file.name.clone().or(stem);
            Ok(Checked {
                report: check_incidence(&file.structure, name.as_deref(), realization),
                expect: file.expect,
            })
        }
        CheckInput::Counts { degree, counts } => {
            let counts = parse_counts(counts).map_err(|e| CliError::Data(e.to_string()))?;
            let wc = WeakCombinatorics::new(degree, counts)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok(Checked {
                report: check_weak(&wc, realization),
                expect: None,
            })
        }
    }
}

pub struct EnumerateRequest {
    pub degree: usize,
    pub verify: bool,
    pub budget: Budget,
}

pub struct Enumerated {
    pub document: String,
    pub outcome: Outcome,
    pub summary: String,
}

fn enumerate_error(e: EnumerateError) -> CliError {
    match e {
        EnumerateError::NodeBudgetExceeded { .. } | EnumerateError::TimeBudgetExceeded { .. } => {
            CliError::Budget(e.to_string())
        }
        EnumerateError::WorkerPool(_) => CliError::Data(e.to_string()),
        EnumerateError::ZeroDegree
        | EnumerateError::DegreeTooLarge { .. }
        | EnumerateError::SlowDegree { .. } => CliError::Usage(e.to_string()),
    }
}

/// Without `verify` the outcome is `pass` once the certificate is complete.
/// With it, each class contributes its lattice verdict.
pub fn enumerate(req: &EnumerateRequest) -> Result<Enumerated, CliError> {
    let cert = enumerate_triple_systems(req.degree, &req.budget).map_err(enumerate_error)?;
    let summary = format!(
        "d={}: {} classes, {} nodes, {} canonicity tests, {:.2?}",
        cert.degree,
        cert.structures.len(),
        cert.stats.nodes,
        cert.stats.canonicity_tests,
        cert.stats.elapsed
    );
    if !req.verify {
        return Ok(Enumerated {
            document: write_certificate(&cert, None),
            outcome: Outcome::Pass,
            summary,
        });
    }
    let residues = cert
        .structures
        .iter()
        .map(lemma_km_residue)
        .collect::<Result<Vec<_>, Inapplicable>>()
        .map_err(|e| CliError::Data(format!("enumerated structure rejected: {e}")))?;
    let outcome = if residues.is_empty() {
        Outcome::NotApplicable
    } else {
        Outcome::from_bool(residues.iter().all(|r| r.passes()))
    };
    Ok(Enumerated {
        document: write_certificate(&cert, Some(&residues)),
        outcome,
        summary,
    })
}

pub fn budget(
    max_nodes: u64,
    max_secs: Option<u64>,
    allow_slow: bool,
    workers: Option<usize>,
) -> Budget {
    Budget {
        max_nodes,
        max_time: max_secs.map(Duration::from_secs),
        allow_slow,
        workers,
    }
}

/// The fixture as an incidence file whose `expect` is its own verdict.
pub fn fixture(name: &str, param: Option<usize>) -> Result<String, CliError> {
    let structure = build_fixture(name, param).map_err(|e| match e {
        FixtureError::Enumerate(inner) => enumerate_error(inner),
        other => CliError::Usage(other.to_string()),
    })?;
    let label = match param {
        Some(p) if name == "sts13" => format!("{name}-class{p}"),
        Some(p) => format!("{name}{p}"),
        None => name.to_string(),
    };
    let expect = check_incidence(&structure, Some(&label), None).overall();
    Ok(write_incidence(&IncidenceFile {
        name: Some(label),
        structure,
        expect: Some(expect),
    }))
}

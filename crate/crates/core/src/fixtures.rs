//! Reference incidence structures, built from their classical constructions.

use crate::enumerate::{enumerate_triple_systems, Budget, EnumerateError};
use crate::lattice::{IncidenceStructure, LatticeError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}` (known: pencil, fano, dual_hesse, sts13)")]
    UnknownName(String),
    #[error("fixture `{name}` needs parameter `{param}`")]
    MissingParameter { name: String, param: &'static str },
    #[error("pencil needs at least 2 lines, got {0}")]
    PencilTooSmall(usize),
    #[error("sts13 has classes 0 and 1, got {0}")]
    NoSuchClass(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

/// All `d` lines through one point.
pub fn pencil(degree: usize) -> Result<IncidenceStructure, FixtureError> {
    if degree < 2 {
        return Err(FixtureError::PencilTooSmall(degree));
    }
    Ok(IncidenceStructure::new(
        degree,
        vec![(0..degree).collect()],
    )?)
}

/// The projective plane of order 2, dualized: its 7 points become lines and
/// its 7 lines become triple points. Line `v - 1` stands for the nonzero
/// vector `v` of `F_2^3`; `{u, v, u + v}` are collinear.
pub fn fano() -> IncidenceStructure {
    let mut points = Vec::new();
    for u in 1..8usize {
        for v in u + 1..8 {
            let w = u ^ v;
            if w > v {
                points.push(vec![u - 1, v - 1, w - 1]);
            }
        }
    }
    IncidenceStructure::new(7, points).expect("order-2 plane is a valid incidence")
}

/// The affine plane of order 3: its 9 points become lines, and each of its
/// 12 lines (4 parallel classes of 3) becomes a triple point. This is the
/// combinatorics of the dual Hesse arrangement. Line `3x + y` stands for the
/// point `(x, y)` of `F_3^2`.
pub fn dual_hesse() -> IncidenceStructure {
    let directions = [(0usize, 1usize), (1, 0), (1, 1), (1, 2)];
    let mut points = Vec::new();
    for (dx, dy) in directions {
        let mut seen = [false; 9];
        for start in 0..9 {
            if seen[start] {
                continue;
            }
            let (x0, y0) = (start / 3, start % 3);
            let line: Vec<usize> = (0..3)
                .map(|s| {
                    let x = (x0 + s * dx) % 3;
                    let y = (y0 + s * dy) % 3;
                    3 * x + y
                })
                .collect();
            for &p in &line {
                seen[p] = true;
            }
            let mut line = line;
            line.sort_unstable();
            points.push(line);
        }
    }
    IncidenceStructure::new(9, points).expect("order-3 affine plane is a valid incidence")
}

/// The isomorphism classes of only-triple-point structures on 13 lines, in
/// canonical form, produced by the enumerator.
pub fn sts13_classes() -> Result<Vec<IncidenceStructure>, FixtureError> {
    let cert = enumerate_triple_systems(13, &Budget::default())?;
    Ok(cert.structures)
}

/// Fixture by name: `pencil` (needs a degree), `fano`, `dual_hesse`,
/// `sts13` (needs a class index).
pub fn build_fixture(name: &str, param: Option<usize>) -> Result<IncidenceStructure, FixtureError> {
    match name {
        "pencil" => pencil(param.ok_or(FixtureError::MissingParameter {
            name: name.to_string(),
            param: "degree",
        })?),
        "fano" => Ok(fano()),
        "dual_hesse" | "dual-hesse" => Ok(dual_hesse()),
        "sts13" => {
            let idx = param.ok_or(FixtureError::MissingParameter {
                name: name.to_string(),
                param: "class",
            })?;
            sts13_classes()?
                .into_iter()
                .nth(idx)
                .ok_or(FixtureError::NoSuchClass(idx))
        }
        other => Err(FixtureError::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_shape() {
        let p = pencil(5).unwrap();
        assert_eq!(p.points(), &[vec![0, 1, 2, 3, 4]]);
        assert!(p.fully_covered());
        assert!(matches!(pencil(1), Err(FixtureError::PencilTooSmall(1))));
    }

    #[test]
    fn fano_shape() {
        let f = fano();
        assert_eq!(f.degree(), 7);
        assert_eq!(f.points().len(), 7);
        assert!(f.points().iter().all(|p| p.len() == 3));
        assert!(f.fully_covered());
        assert_eq!(f.points_per_line(), vec![3; 7]);
    }

    #[test]
    fn dual_hesse_shape() {
        let h = dual_hesse();
        assert_eq!(h.degree(), 9);
        assert_eq!(h.points().len(), 12);
        assert!(h.points().iter().all(|p| p.len() == 3));
        assert!(h.fully_covered());
        assert_eq!(h.points_per_line(), vec![4; 9]);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(build_fixture("fano", None).unwrap(), fano());
        assert_eq!(build_fixture("dual_hesse", None).unwrap(), dual_hesse());
        assert_eq!(
            build_fixture("pencil", Some(3)).unwrap(),
            pencil(3).unwrap()
        );
        assert!(matches!(
            build_fixture("pencil", None),
            Err(FixtureError::MissingParameter { .. })
        ));
        assert!(matches!(
            build_fixture("hesse", None),
            Err(FixtureError::UnknownName(_))
        ));
    }
}

use std::collections::BTreeSet;

use super::{ConstraintError, LegalityReport, Rule};
use crate::model::{Axis, DimDir, DimPoint, PipeId, Scheme, Subject, Vec3, MERGE_EPS};

/// Extension-line axis paired with a dimension-line direction.
pub type Orientation = (Axis, DimDir);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DimLegality {
    pub pairs: BTreeSet<Orientation>,
    /// Why the point set admits no orientation at all; empty when `pairs` is the full answer.
    pub violations: Vec<LegalityReport>,
}

impl DimLegality {
    fn illegal(rule: Rule, note: impl Into<String>) -> Self {
        DimLegality {
            pairs: BTreeSet::new(),
            violations: vec![LegalityReport::violation(Subject::Scheme, rule, note)],
        }
    }
}

/// Relative collinearity and coplanarity tolerance.
const SHAPE_TOL: f64 = 1e-6;
/// Tolerance on unit-vector components.
const DIR_TOL: f64 = 1e-9;

fn others(a: Axis) -> (Axis, Axis) {
    match a {
        Axis::X => (Axis::Y, Axis::Z),
        Axis::Y => (Axis::X, Axis::Z),
        Axis::Z => (Axis::X, Axis::Y),
    }
}

/// Legal orientations of a dimension through `points` in the current scheme.
pub fn legal_dimension_orientations(scheme: &Scheme, points: &[DimPoint]) -> Result<DimLegality, ConstraintError> {
    let positions = points
        .iter()
        .map(|p| scheme.dim_point_position(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut moved = Vec::new();
    for id in scheme.offsets.ids() {
        moved.push(
            points
                .iter()
                .map(|p| scheme.offset_moves_dim_point(id, p))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(legal_orientations_for(scheme, &positions, &moved))
}

/// Worker of [`legal_dimension_orientations`] on resolved positions.
///
/// `moved[k][i]` tells whether the k-th offset of the scheme (in id order)
/// displaces point `i`.
pub fn legal_orientations_for(scheme: &Scheme, positions: &[Vec3], moved: &[Vec<bool>]) -> DimLegality {
    if positions.len() < 2 {
        return DimLegality::illegal(Rule::DimCoincident, "fewer than two dimension points");
    }
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if (positions[i] - positions[j]).norm() < MERGE_EPS {
                return DimLegality::illegal(Rule::DimCoincident, format!("points {i} and {j} coincide"));
            }
        }
    }
    let (mut a, mut b, mut diam) = (0, 1, 0.0);
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let d = (positions[i] - positions[j]).norm();
            if d > diam {
                (a, b, diam) = (i, j, d);
            }
        }
    }
    let tol = SHAPE_TOL * diam;
    let origin = positions[a];
    let u = (positions[b] - origin) / diam;
    let off_line = |p: &Vec3| (p - origin).cross(&u).norm();
    let far = positions
        .iter()
        .copied()
        .max_by(|p, q| off_line(p).total_cmp(&off_line(q)))
        .unwrap_or(origin);

    let offsets: Vec<Vec3> = scheme.offsets.values().map(|o| o.ort).collect();
    let splitting = moved
        .iter()
        .zip(&offsets)
        .filter(|(m, _)| m.iter().any(|x| *x) && m.iter().any(|x| !*x))
        .map(|(_, ort)| *ort);

    let mut pairs = BTreeSet::new();
    if off_line(&far) > tol {
        let n = u.cross(&(far - origin)).normalize();
        if positions.iter().any(|p| (p - origin).dot(&n).abs() > tol) {
            return DimLegality::illegal(Rule::DimNonCoplanar, "dimension points are not coplanar");
        }
        let Some(normal) = Axis::ALL.into_iter().find(|ax| (n[ax.index()].abs() - 1.0).abs() <= DIR_TOL) else {
            return DimLegality::illegal(
                Rule::DimPlaneOblique,
                "plane of the points is not parallel to a coordinate plane",
            );
        };
        for ort in splitting {
            if ort[normal.index()].abs() > DIR_TOL {
                return DimLegality::illegal(
                    Rule::DimSplitByOffset,
                    "an offset moves some points out of their common plane",
                );
            }
        }
        let (p, q) = others(normal);
        pairs.insert((p, DimDir::Axis(q)));
        pairs.insert((q, DimDir::Axis(p)));
        return DimLegality {
            pairs,
            violations: Vec::new(),
        };
    }

    for ort in splitting {
        if ort.cross(&u).norm() > DIR_TOL {
            return DimLegality::illegal(
                Rule::DimSplitByOffset,
                "an offset moves some points off their common axis",
            );
        }
    }
    let zero: Vec<Axis> = Axis::ALL
        .into_iter()
        .filter(|ax| u[ax.index()].abs() <= DIR_TOL)
        .collect();
    let on_pipe_axis: Vec<PipeId> = scheme
        .pipes
        .ids()
        .filter(|id| {
            scheme.pipe_geom(*id).is_ok_and(|g| {
                let d = g.dir();
                d.cross(&u).norm() <= DIR_TOL
                    && positions.iter().all(|p| (p - g.start).cross(&d).norm() <= tol.max(MERGE_EPS))
            })
        })
        .collect();
    match zero.as_slice() {
        [z1, z2] => {
            let along = Axis::ALL.into_iter().find(|ax| ax != z1 && ax != z2).unwrap_or(Axis::X);
            pairs.insert((*z1, DimDir::Axis(along)));
            pairs.insert((*z2, DimDir::Axis(along)));
        }
        [perp] => {
            let (p, q) = others(*perp);
            pairs.insert((p, DimDir::Axis(q)));
            pairs.insert((q, DimDir::Axis(p)));
            for pipe in &on_pipe_axis {
                pairs.insert((p, DimDir::AlongPipe(*pipe)));
                pairs.insert((q, DimDir::AlongPipe(*pipe)));
            }
        }
        _ => {
            if on_pipe_axis.is_empty() {
                return DimLegality::illegal(
                    Rule::DimNoPipeAxis,
                    "oblique collinear points do not lie on a pipe axis",
                );
            }
            for pipe in &on_pipe_axis {
                for ax in Axis::ALL {
                    pairs.insert((ax, DimDir::AlongPipe(*pipe)));
                }
            }
        }
    }
    DimLegality {
        pairs,
        violations: Vec::new(),
    }
}

use std::fmt;

use crate::model::{Vec2, Vec3};

use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionFamily {
    Axonometric,
    View,
    Oblique,
    Custom,
}

impl ProjectionFamily {
    pub fn name(self) -> &'static str {
        match self {
            ProjectionFamily::Axonometric => "axonometric",
            ProjectionFamily::View => "view",
            ProjectionFamily::Oblique => "oblique",
            ProjectionFamily::Custom => "custom",
        }
    }
}

/// A parallel projection given by the 2D images of the unit axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub name: String,
    pub family: ProjectionFamily,
    pub ex: Vec2,
    pub ey: Vec2,
    pub ez: Vec2,
    /// Unit vector towards the viewer; larger depth is nearer.
    pub view_dir: Vec3,
}

impl Projection {
    /// Builds a projection; the view direction is the cross product of the
    /// two rows of the axis-image matrix.
    pub fn from_axes(name: &str, family: ProjectionFamily, ex: Vec2, ey: Vec2, ez: Vec2) -> Self {
        let r1 = Vec3::new(ex.x, ey.x, ez.x);
        let r2 = Vec3::new(ex.y, ey.y, ez.y);
        let v = r1.cross(&r2);
        Projection {
            name: name.to_string(),
            family,
            ex,
            ey,
            ez,
            view_dir: v / v.norm(),
        }
    }

    /// Orthographic projection looking against `towards_viewer`, with +Z up
    /// on the sheet when possible.
    pub fn custom(towards_viewer: Vec3) -> Result<Self, GeometryError> {
        let n = towards_viewer.norm();
        if !(n.is_finite() && n > 1e-12) {
            return Err(GeometryError::BadDirection);
        }
        let d = towards_viewer / n;
        let up = Vec3::z().cross(&d);
        let sx = if up.norm() < 1e-9 {
            Vec3::x()
        } else {
            up.normalize()
        };
        let sy = d.cross(&sx);
        Ok(Projection {
            name: "custom".to_string(),
            family: ProjectionFamily::Custom,
            ex: Vec2::new(sx.x, sy.x),
            ey: Vec2::new(sx.y, sy.y),
            ez: Vec2::new(sx.z, sy.z),
            view_dir: d,
        })
    }

    pub fn project(&self, p: &Vec3) -> Vec2 {
        self.ex * p.x + self.ey * p.y + self.ez * p.z
    }

    pub fn depth(&self, p: &Vec3) -> f64 {
        p.dot(&self.view_dir)
    }

    /// Image of a 3D direction, used for extension lines and arrows.
    pub fn project_dir(&self, d: &Vec3) -> Vec2 {
        self.project(d)
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |v: &Vec2| format!("({:.5},{:.5})", v.x, v.y);
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t({:.5},{:.5},{:.5})",
            self.name,
            self.family.name(),
            v(&self.ex),
            v(&self.ey),
            v(&self.ez),
            self.view_dir.x,
            self.view_dir.y,
            self.view_dir.z
        )
    }
}

fn polar(deg: f64, len: f64) -> Vec2 {
    let r = deg.to_radians();
    Vec2::new(len * r.cos(), len * r.sin())
}

const DEFAULT_CUSTOM_DIR: [f64; 3] = [1.0, 1.0, 1.0];

/// The fixed catalog in display order.
pub fn projection_catalog() -> Vec<Projection> {
    use ProjectionFamily::*;
    let s3 = 3f64.sqrt() / 2.0;
    let up = Vec2::new(0.0, 1.0);
    let right = Vec2::new(1.0, 0.0);
    let zero = Vec2::zeros();
    let mut out = vec![Projection::from_axes(
        "isometric",
        Axonometric,
        Vec2::new(-s3, -0.5),
        Vec2::new(s3, -0.5),
        up,
    )];
    let dx = 7.0 + 10.0 / 60.0;
    let dy = 41.0 + 25.0 / 60.0;
    let dim_x = polar(180.0 + dx, 1.0);
    let dim_y = polar(-dy, 0.5);
    out.push(Projection::from_axes("dimetric", Axonometric, dim_x, dim_y, up));
    let mirror = |v: Vec2| Vec2::new(-v.x, v.y);
    out.push(Projection::from_axes(
        "dimetric-mirrored",
        Axonometric,
        mirror(dim_x),
        mirror(dim_y),
        up,
    ));
    for a in [30.0, 45.0, 60.0] {
        out.push(Projection::from_axes(
            &format!("frontal-isometric-{a}"),
            Axonometric,
            right,
            polar(180.0 + a, 1.0),
            up,
        ));
    }
    for a in [30.0, 45.0, 60.0] {
        out.push(Projection::from_axes(
            &format!("horizontal-isometric-{a}"),
            Axonometric,
            polar(-a, 1.0),
            polar(90.0 - a, 1.0),
            up,
        ));
    }
    for a in [30.0, 45.0, 60.0] {
        out.push(Projection::from_axes(
            &format!("frontal-dimetric-{a}"),
            Axonometric,
            right,
            polar(180.0 + a, 0.5),
            up,
        ));
    }
    out.push(Projection::from_axes(
        "frontal-dimetric-45-mirrored",
        Axonometric,
        mirror(right),
        mirror(polar(225.0, 0.5)),
        up,
    ));
    let left = -right;
    let down = -up;
    for (name, ex, ey, ez) in [
        ("view-front", right, zero, up),
        ("view-back", left, zero, up),
        ("view-top", right, up, zero),
        ("view-bottom", right, down, zero),
        ("view-left", zero, left, up),
        ("view-right", zero, right, up),
    ] {
        out.push(Projection::from_axes(name, View, ex, ey, ez));
    }
    for (kind, k) in [("isometric", 1.0), ("dimetric", 0.5)] {
        for a in [30.0, 45.0, 60.0] {
            out.push(Projection::from_axes(
                &format!("oblique-{kind}-{a}"),
                Oblique,
                right,
                polar(a, k),
                up,
            ));
        }
    }
    out.push(Projection::custom(Vec3::from(DEFAULT_CUSTOM_DIR)).expect("nonzero direction"));
    // `polar` leaves round-off on exact zeros; keep the table clean.
    for p in &mut out {
        for v in [&mut p.ex, &mut p.ey, &mut p.ez] {
            for c in v.iter_mut() {
                if c.abs() < 1e-15 {
                    *c = 0.0;
                }
            }
        }
    }
    debug_assert!(out.iter().all(|p| (p.view_dir.norm() - 1.0).abs() < 1e-12));
    out
}

/// Catalog entry by name. `custom` takes an optional direction towards the
/// viewer; other names ignore it.
pub fn projection_by_name(name: &str, custom_dir: Option<Vec3>) -> Result<Projection, GeometryError> {
    if name == "custom" {
        return Projection::custom(custom_dir.unwrap_or(Vec3::from(DEFAULT_CUSTOM_DIR)));
    }
    projection_catalog()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| GeometryError::UnknownProjection(name.to_string()))
}

pub fn projection_names() -> Vec<String> {
    projection_catalog().into_iter().map(|p| p.name).collect()
}

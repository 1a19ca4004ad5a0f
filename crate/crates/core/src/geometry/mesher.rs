use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::mesh::{BoundaryTag, Mesh, Region};
use super::{GeometrySpec, Shape};
use crate::{Error, Result};

/// Interior lattice points closer than this multiple of h to a curve are dropped.
const CURVE_CLEARANCE: f64 = 0.55;

struct Curve {
    shape: Shape,
    tag: Option<BoundaryTag>,
}

/// Triangulates Ω (or the whole box with PML when `include_exterior`).
///
/// Every curve of the geometry is resolved by nodes lying exactly on it with
/// chords no longer than h; the rest of the domain is filled by a hexagonal
/// lattice of spacing h anchored at the origin, so meshes with and without the
/// exterior share their nodes inside Ω. The constrained Delaunay triangulation
/// of these points is tagged by the analytic region of each centroid.
pub fn generate_mesh(spec: &GeometrySpec, h: f64, include_exterior: bool) -> Result<Mesh> {
    spec.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Geometry(format!("mesh size must be positive, got {h}")));
    }
    let smallest = spec.curves()[0].inradius();
    if h >= smallest {
        return Err(Error::Geometry(format!("h = {h} is not below the smallest feature size {smallest}")));
    }
    let gap = spec.min_clearance();
    if gap < CURVE_CLEARANCE * h {
        return Err(Error::Geometry(format!(
            "h = {h} is too coarse to separate nested boundaries {gap:.3} apart"
        )));
    }
    if include_exterior {
        spec.validate_for_scattering()?;
    }

    let mut curves = Vec::new();
    if let Some(core) = spec.core {
        curves.push(Curve { shape: core, tag: Some(BoundaryTag::DSigma) });
    }
    curves.push(Curve { shape: spec.cavity, tag: Some(BoundaryTag::DD) });
    curves.push(Curve { shape: spec.outer, tag: Some(BoundaryTag::DOmega) });
    let physical = Shape::Square { half: spec.box_halfwidth };
    if include_exterior {
        curves.push(Curve { shape: physical, tag: None });
        curves.push(Curve {
            shape: Shape::Square { half: spec.box_halfwidth + spec.pml_thickness },
            tag: Some(BoundaryTag::Box),
        });
    }
    let outermost = curves.last().unwrap().shape;

    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut constraints: Vec<[usize; 2]> = Vec::new();
    let mut tagged: Vec<([usize; 2], BoundaryTag)> = Vec::new();
    for c in &curves {
        let pts = c.shape.boundary_points(h);
        let start = nodes.len();
        let n = pts.len();
        nodes.extend(pts);
        for i in 0..n {
            let e = [start + i, start + (i + 1) % n];
            constraints.push(e);
            if let Some(tag) = c.tag {
                tagged.push((e, tag));
            }
        }
    }

    let reach = outermost.circumradius();
    let dy = h * 3f64.sqrt() / 2.0;
    let jmax = (reach / dy).ceil() as i64 + 1;
    let imax = (reach / h).ceil() as i64 + 1;
    for j in -jmax..=jmax {
        let shift = if j.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        for i in -imax..=imax {
            let p = [(i as f64 + shift) * h, j as f64 * dy];
            if !outermost.contains(p) {
                continue;
            }
            if curves.iter().all(|c| c.shape.distance(p) > CURVE_CLEARANCE * h) {
                nodes.push(p);
            }
        }
    }

    let vertices: Vec<Point2<f64>> = nodes.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(vertices, constraints)
        .map_err(|e| Error::Geometry(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != nodes.len() {
        return Err(Error::Geometry("duplicate mesh nodes".into()));
    }

    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    let mut regions = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let v = face.vertices().map(|v| v.fix().index());
        let mut tri = [v[0], v[1], v[2]];
        let [a, b, c] = tri.map(|i| nodes[i]);
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if area < 0.0 {
            tri.swap(1, 2);
        }
        let g = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        if !outermost.contains(g) {
            continue;
        }
        let region = if include_exterior && !physical.contains(g) {
            Region::Pml
        } else if !spec.outer.contains(g) {
            Region::Exterior
        } else if !spec.cavity.contains(g) {
            Region::Shell
        } else if spec.core.is_some_and(|s| s.contains(g)) {
            Region::Core
        } else {
            Region::Lossy
        };
        triangles.push(tri);
        regions.push(region);
    }

    let (edges, edge_tags) = tagged.into_iter().unzip();
    Mesh::new(nodes, triangles, regions, edges, edge_tags, h)
}

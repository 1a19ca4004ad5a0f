use super::mesh::Mesh;

/// Barycentric tolerance for accepting a point on an element edge.
const INSIDE_TOL: f64 = 1e-12;

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Clone, Debug)]
pub struct Locator {
    lo: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    start: Vec<usize>,
    items: Vec<usize>,
    /// Per triangle: origin vertex and inverse Jacobian rows.
    maps: Vec<([f64; 2], [[f64; 2]; 2])>,
}

impl Locator {
    pub fn new(mesh: &Mesh) -> Locator {
        let (lo, hi) = mesh.bounding_box();
        let nt = mesh.triangles.len().max(1);
        let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(f64::MIN_POSITIVE);
        let cell = (2.0 * area / nt as f64).sqrt().max(1e-12);
        let dims = [
            (((hi[0] - lo[0]) / cell).ceil() as usize).max(1),
            (((hi[1] - lo[1]) / cell).ceil() as usize).max(1),
        ];
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); dims[0] * dims[1]];
        let mut maps = Vec::with_capacity(mesh.triangles.len());
        for t in 0..mesh.triangles.len() {
            let v = mesh.vertices(t);
            let (mut a, mut b) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in &v {
                for d in 0..2 {
                    a[d] = a[d].min(p[d]);
                    b[d] = b[d].max(p[d]);
                }
            }
            let c0 = cell_index(a, lo, cell, dims);
            let c1 = cell_index(b, lo, cell, dims);
            for iy in c0[1]..=c1[1] {
                for ix in c0[0]..=c1[0] {
                    buckets[iy * dims[0] + ix].push(t);
                }
            }
            let j = [[v[1][0] - v[0][0], v[2][0] - v[0][0]], [v[1][1] - v[0][1], v[2][1] - v[0][1]]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
            maps.push((v[0], inv));
        }
        let mut start = Vec::with_capacity(buckets.len() + 1);
        let mut items = Vec::new();
        start.push(0);
        for b in buckets {
            items.extend(b);
            start.push(items.len());
        }
        Locator { lo, cell, dims, start, items, maps }
    }

    fn barycentric(&self, t: usize, x: [f64; 2]) -> [f64; 3] {
        let (o, inv) = self.maps[t];
        let d = [x[0] - o[0], x[1] - o[1]];
        let l1 = inv[0][0] * d[0] + inv[0][1] * d[1];
        let l2 = inv[1][0] * d[0] + inv[1][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    fn bucket(&self, ix: usize, iy: usize) -> &[usize] {
        let c = iy * self.dims[0] + ix;
        &self.items[self.start[c]..self.start[c + 1]]
    }

    /// Containing triangle and barycentric coordinates, or `None` outside.
    pub fn locate(&self, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let gx = (x[0] - self.lo[0]) / self.cell;
        let gy = (x[1] - self.lo[1]) / self.cell;
        let eps = 1e-9;
        if gx < -eps || gy < -eps || gx > self.dims[0] as f64 + eps || gy > self.dims[1] as f64 + eps {
            return None;
        }
        let c = cell_index(x, self.lo, self.cell, self.dims);
        let mut best: Option<(usize, [f64; 3])> = None;
        let mut best_min = f64::NEG_INFINITY;
        for &t in self.bucket(c[0], c[1]) {
            let l = self.barycentric(t, x);
            let m = l[0].min(l[1]).min(l[2]);
            if m > best_min {
                best_min = m;
                best = Some((t, l));
            }
        }
        match best {
            Some((t, l)) if best_min >= -INSIDE_TOL => Some((t, clamp(l))),
            _ => None,
        }
    }

    /// Like [`locate`](Self::locate) but accepts points up to `max_dist` outside
    /// the mesh, returning the closest point's triangle with clamped coordinates.
    pub fn locate_nearest(&self, mesh: &Mesh, x: [f64; 2], max_dist: f64) -> Option<(usize, [f64; 3])> {
        if let Some(hit) = self.locate(x) {
            return Some(hit);
        }
        let r = (max_dist / self.cell).ceil() as i64 + 1;
        let c = {
            let gx = ((x[0] - self.lo[0]) / self.cell).floor() as i64;
            let gy = ((x[1] - self.lo[1]) / self.cell).floor() as i64;
            [gx, gy]
        };
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for iy in (c[1] - r).max(0)..=(c[1] + r).min(self.dims[1] as i64 - 1) {
            for ix in (c[0] - r).max(0)..=(c[0] + r).min(self.dims[0] as i64 - 1) {
                for &t in self.bucket(ix as usize, iy as usize) {
                    let (p, l) = closest_point(mesh.vertices(t), x);
                    let d = (p[0] - x[0]).hypot(p[1] - x[1]);
                    if d <= max_dist && best.map_or(true, |b| d < b.2) {
                        best = Some((t, l, d));
                    }
                }
            }
        }
        best.map(|(t, l, _)| (t, l))
    }
}

fn cell_index(x: [f64; 2], lo: [f64; 2], cell: f64, dims: [usize; 2]) -> [usize; 2] {
    let f = |v: f64, o: f64, n: usize| (((v - o) / cell).floor().max(0.0) as usize).min(n - 1);
    [f(x[0], lo[0], dims[0]), f(x[1], lo[1], dims[1])]
}

fn clamp(l: [f64; 3]) -> [f64; 3] {
    let c = l.map(|v| v.clamp(0.0, 1.0));
    let s = c[0] + c[1] + c[2];
    c.map(|v| v / s)
}

/// Closest point of a triangle to x, with its barycentric coordinates.
fn closest_point(v: [[f64; 2]; 3], x: [f64; 2]) -> ([f64; 2], [f64; 3]) {
    let mut best = (v[0], [1.0, 0.0, 0.0], f64::INFINITY);
    for k in 0..3 {
        let (a, b) = (v[k], v[(k + 1) % 3]);
        let ab = [b[0] - a[0], b[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let s = (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
        let p = [a[0] + s * ab[0], a[1] + s * ab[1]];
        let d = (p[0] - x[0]).hypot(p[1] - x[1]);
        if d < best.2 {
            let mut l = [0.0; 3];
            l[k] = 1.0 - s;
            l[(k + 1) % 3] = s;
            best = (p, l, d);
        }
    }
    (best.0, best.1)
}

/// One-shot location; builds a [`Locator`] internally.
pub fn locate_point(mesh: &Mesh, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
    Locator::new(mesh).locate(x)
}

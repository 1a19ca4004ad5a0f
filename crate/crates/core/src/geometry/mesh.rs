use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Region tag of a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// Σ, the object to be cloaked.
    Core,
    /// D∖Σ, the lossy layer (all of D when there is no core).
    Lossy,
    /// Ω∖D, the isotropic shell.
    Shell,
    /// Physical box outside Ω.
    Exterior,
    Pml,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::Core, Region::Lossy, Region::Shell, Region::Exterior, Region::Pml];

    pub fn keyword(self) -> &'static str {
        match self {
            Region::Core => "core",
            Region::Lossy => "lossy",
            Region::Shell => "shell",
            Region::Exterior => "exterior",
            Region::Pml => "pml",
        }
    }

    /// Inside the cavity D.
    pub fn in_cavity(self) -> bool {
        matches!(self, Region::Core | Region::Lossy)
    }

    /// Inside Ω.
    pub fn in_omega(self) -> bool {
        matches!(self, Region::Core | Region::Lossy | Region::Shell)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.keyword() == s)
            .ok_or_else(|| Error::Mesh(format!("unknown region tag '{s}'")))
    }
}

/// Tag of a boundary or interface edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    DSigma,
    DD,
    DOmega,
    /// Outer boundary of the computational box (PML included).
    Box,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [BoundaryTag::DSigma, BoundaryTag::DD, BoundaryTag::DOmega, BoundaryTag::Box];

    pub fn keyword(self) -> &'static str {
        match self {
            BoundaryTag::DSigma => "dSigma",
            BoundaryTag::DD => "dD",
            BoundaryTag::DOmega => "dOmega",
            BoundaryTag::Box => "box",
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundaryTag::ALL
            .into_iter()
            .find(|r| r.keyword() == s)
            .ok_or_else(|| Error::Mesh(format!("unknown boundary tag '{s}'")))
    }
}

/// Conforming triangulation with region-tagged triangles and tagged edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub edges: Vec<[usize; 2]>,
    pub edge_tags: Vec<BoundaryTag>,
    /// Target edge length.
    pub h: f64,
}

impl Mesh {
    /// Builds a mesh and checks indices, orientation and conformity.
    pub fn new(
        nodes: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
        edges: Vec<[usize; 2]>,
        edge_tags: Vec<BoundaryTag>,
        h: f64,
    ) -> Result<Mesh> {
        let mesh = Mesh { nodes, triangles, regions, edges, edge_tags, h };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.regions.len() != self.triangles.len() || self.edge_tags.len() != self.edges.len() {
            return Err(Error::Mesh("tag arrays do not match element counts".into()));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::Mesh(format!("triangle {t} references a node beyond {n}")));
            }
            if self.signed_area(t) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {t} has non-positive area")));
            }
        }
        let counts = self.edge_triangle_counts();
        if let Some((e, _)) = counts.iter().find(|(_, &c)| c > 2) {
            return Err(Error::Mesh(format!("edge {e:?} is shared by more than two triangles")));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e[0] >= n || e[1] >= n {
                return Err(Error::Mesh(format!("boundary edge {k} references a node beyond {n}")));
            }
            if !counts.contains_key(&key(e[0], e[1])) {
                return Err(Error::Mesh(format!("boundary edge {k} is not a triangle edge")));
            }
        }
        Ok(())
    }

    fn edge_triangle_counts(&self) -> HashMap<(usize, usize), u8> {
        let mut counts = HashMap::with_capacity(self.triangles.len() * 2);
        for t in &self.triangles {
            for k in 0..3 {
                *counts.entry(key(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.vertices(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn region_area(&self, region: Region) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.regions[t] == region)
            .map(|t| self.signed_area(t))
            .sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| min_angle(self.vertices(t)))
            .fold(180.0, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let v = self.vertices(t);
            for k in 0..3 {
                let (p, q) = (v[k], v[(k + 1) % 3]);
                m = m.max((p[0] - q[0]).hypot(p[1] - q[1]));
            }
        }
        m
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// Bitmask of [`BoundaryTag::bit`] for every node.
    pub fn node_tags(&self) -> Vec<u8> {
        let mut tags = vec![0u8; self.nodes.len()];
        for (e, tag) in self.edges.iter().zip(&self.edge_tags) {
            tags[e[0]] |= tag.bit();
            tags[e[1]] |= tag.bit();
        }
        tags
    }

    /// Total length of the edges carrying `tag`.
    pub fn tagged_length(&self, tag: BoundaryTag) -> f64 {
        self.edges
            .iter()
            .zip(&self.edge_tags)
            .filter(|(_, &t)| t == tag)
            .map(|(e, _)| {
                let (p, q) = (self.nodes[e[0]], self.nodes[e[1]]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .sum()
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.edge_tags.contains(&tag)
    }

    /// Triangles whose region passes `keep`, with nodes renumbered in their
    /// original order. Tagged edges survive if both ends survive.
    pub fn submesh(&self, keep: impl Fn(Region) -> bool) -> Mesh {
        let mut used = vec![false; self.nodes.len()];
        let mut triangles = Vec::new();
        let mut regions = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if keep(self.regions[t]) {
                for &i in tri {
                    used[i] = true;
                }
                triangles.push(*tri);
                regions.push(self.regions[t]);
            }
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                map[i] = nodes.len();
                nodes.push(self.nodes[i]);
            }
        }
        for tri in &mut triangles {
            for i in tri.iter_mut() {
                *i = map[*i];
            }
        }
        let mut edges = Vec::new();
        let mut edge_tags = Vec::new();
        for (e, &tag) in self.edges.iter().zip(&self.edge_tags) {
            if used[e[0]] && used[e[1]] {
                edges.push([map[e[0]], map[e[1]]]);
                edge_tags.push(tag);
            }
        }
        Mesh { nodes, triangles, regions, edges, edge_tags, h: self.h }
    }
}

pub(crate) fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn min_angle(v: [[f64; 2]; 3]) -> f64 {
    let mut best: f64 = 180.0;
    for k in 0..3 {
        let (p, q, r) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        let u = [q[0] - p[0], q[1] - p[1]];
        let w = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * w[1] - u[1] * w[0];
        let dot = u[0] * w[0] + u[1] * w[1];
        best = best.min(cross.abs().atan2(dot).to_degrees());
    }
    best
}

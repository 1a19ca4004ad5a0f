//! ASCII mesh format:
//!
//! ```text
//! nodes N triangles T edges E
//! x y                  (N lines)
//! i j k region_tag     (T lines)
//! i j boundary_tag     (E lines)
//! ```
//!
//! Indices are 0-based. Coordinates are written in shortest round-trip form so
//! a file reproduces the mesh bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::mesh::Mesh;
use crate::{Error, Result};

pub fn write_mesh(mesh: &Mesh, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "nodes {} triangles {} edges {}",
        mesh.nodes.len(),
        mesh.triangles.len(),
        mesh.edges.len()
    )?;
    for p in &mesh.nodes {
        writeln!(out, "{:?} {:?}", p[0], p[1])?;
    }
    for (t, r) in mesh.triangles.iter().zip(&mesh.regions) {
        writeln!(out, "{} {} {} {}", t[0], t[1], t[2], r)?;
    }
    for (e, tag) in mesh.edges.iter().zip(&mesh.edge_tags) {
        writeln!(out, "{} {} {}", e[0], e[1], tag)?;
    }
    Ok(())
}

pub fn export_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mesh(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn import_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    read_mesh(File::open(path)?)
}

pub fn read_mesh(input: impl Read) -> Result<Mesh> {
    let reader = BufReader::new(input);
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|s| (i + 1, s)))
        .filter(|r| r.as_ref().map_or(true, |(_, s)| !s.trim().is_empty()));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some(r) => Ok(r?),
            None => Err(Error::MeshFormat { line: 0, msg: format!("unexpected end of file, expected {what}") }),
        }
    };

    let (ln, header) = next("header")?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let counts = match h.as_slice() {
        ["nodes", n, "triangles", t, "edges", e] => [n, t, e].map(|s| s.parse::<usize>()),
        _ => return Err(fmt_err(ln, "expected 'nodes N triangles T edges E'")),
    };
    let [n, t, e] = match counts {
        [Ok(n), Ok(t), Ok(e)] => [n, t, e],
        _ => return Err(fmt_err(ln, "bad counts in header")),
    };

    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, s) = next("node")?;
        let f: Vec<&str> = s.split_whitespace().collect();
        match f.as_slice() {
            [x, y] => nodes.push([parse_f(x, ln)?, parse_f(y, ln)?]),
            _ => return Err(fmt_err(ln, "node line must be 'x y'")),
        }
    }
    let mut triangles = Vec::with_capacity(t);
    let mut regions = Vec::with_capacity(t);
    for _ in 0..t {
        let (ln, s) = next("triangle")?;
        let f: Vec<&str> = s.split_whitespace().collect();
        match f.as_slice() {
            [i, j, k, tag] => {
                let tri = [parse_idx(i, n, ln)?, parse_idx(j, n, ln)?, parse_idx(k, n, ln)?];
                triangles.push(tri);
                regions.push(tag.parse().map_err(|_| fmt_err(ln, &format!("unknown region tag '{tag}'")))?);
            }
            _ => return Err(fmt_err(ln, "triangle line must be 'i j k region_tag'")),
        }
    }
    let mut edges = Vec::with_capacity(e);
    let mut edge_tags = Vec::with_capacity(e);
    for _ in 0..e {
        let (ln, s) = next("edge")?;
        let f: Vec<&str> = s.split_whitespace().collect();
        match f.as_slice() {
            [i, j, tag] => {
                edges.push([parse_idx(i, n, ln)?, parse_idx(j, n, ln)?]);
                edge_tags.push(tag.parse().map_err(|_| fmt_err(ln, &format!("unknown boundary tag '{tag}'")))?);
            }
            [_, _] => return Err(fmt_err(ln, "untagged boundary edge")),
            _ => return Err(fmt_err(ln, "edge line must be 'i j boundary_tag'")),
        }
    }
    if let Some(Ok((ln, _))) = lines.next() {
        return Err(fmt_err(ln, "trailing data after the declared counts"));
    }
    let h = max_edge(&nodes, &triangles);
    Mesh::new(nodes, triangles, regions, edges, edge_tags, h)
}

fn max_edge(nodes: &[[f64; 2]], triangles: &[[usize; 3]]) -> f64 {
    let mut m: f64 = 0.0;
    for t in triangles {
        for k in 0..3 {
            let (p, q) = (nodes[t[k]], nodes[t[(k + 1) % 3]]);
            m = m.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
    }
    m
}

fn fmt_err(line: usize, msg: &str) -> Error {
    Error::MeshFormat { line, msg: msg.to_string() }
}

fn parse_f(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| fmt_err(line, &format!("bad coordinate '{s}'")))
}

fn parse_idx(s: &str, n: usize, line: usize) -> Result<usize> {
    let i: usize = s.parse().map_err(|_| fmt_err(line, &format!("bad index '{s}'")))?;
    if i >= n {
        return Err(fmt_err(line, &format!("node index {i} beyond node count {n}")));
    }
    Ok(i)
}

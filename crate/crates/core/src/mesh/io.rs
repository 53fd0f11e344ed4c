//! Plain-text mesh format.
//!
//! ```text
//! V E T
//! x y            (V lines)
//! i j k          (T lines, 0-based, counterclockwise)
//! v0 v1 label    (one line per boundary face, label Gamma0 or Gamma1)
//! ```
//!
//! `E` is the total face count and is checked against the rebuilt skeleton.
//! Coordinates are written in shortest round-trip form.

use std::collections::HashMap;
use std::fmt::Write;

use super::{BoundaryLabel, Mesh, Point};
use crate::error::{Error, Result};

pub(super) fn write_text(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", mesh.num_vertices(), mesh.num_faces(), mesh.num_elements());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?}", v.x, v.y);
    }
    for [a, b, c] in mesh.elements() {
        let _ = writeln!(out, "{a} {b} {c}");
    }
    for face in mesh.faces().iter().filter(|f| f.is_boundary()) {
        let label = match face.label {
            Some(BoundaryLabel::Gamma1) => "Gamma1",
            _ => "Gamma0",
        };
        let _ = writeln!(out, "{} {} {label}", face.vertices[0], face.vertices[1]);
    }
    out
}

fn parse<T: std::str::FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: malformed {what} `{token}`")))
}

pub(super) fn read_text(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let mut head = header.split_whitespace();
    let nv: usize = parse(head.next(), ln, "vertex count")?;
    let nf: usize = parse(head.next(), ln, "face count")?;
    let nt: usize = parse(head.next(), ln, "element count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of file in vertex block".into()))?;
        let mut t = line.split_whitespace();
        vertices.push(Point::new(parse(t.next(), ln, "x")?, parse(t.next(), ln, "y")?));
    }
    let mut elements = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of file in element block".into()))?;
        let mut t = line.split_whitespace();
        elements.push([
            parse(t.next(), ln, "vertex index")?,
            parse(t.next(), ln, "vertex index")?,
            parse(t.next(), ln, "vertex index")?,
        ]);
    }
    let mut labels = HashMap::new();
    for (ln, line) in lines {
        let mut t = line.split_whitespace();
        let a: usize = parse(t.next(), ln, "vertex index")?;
        let b: usize = parse(t.next(), ln, "vertex index")?;
        let label = match t.next() {
            Some("Gamma0") | Some("0") => BoundaryLabel::Gamma0,
            Some("Gamma1") | Some("1") => BoundaryLabel::Gamma1,
            other => {
                return Err(Error::Parse(format!("line {ln}: unknown boundary label {other:?}")))
            }
        };
        labels.insert([a.min(b), a.max(b)], label);
    }

    let mesh = Mesh::new(vertices, elements, None)?.with_labels(&labels)?;
    if mesh.num_faces() != nf {
        return Err(Error::Parse(format!(
            "header announces {nf} faces, connectivity yields {}",
            mesh.num_faces()
        )));
    }
    Ok(mesh)
}

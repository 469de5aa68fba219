//! Line-oriented mesh text format.
//!
//! ```text
//! steklov-mesh v1
//! v <id> [x y]
//! t <id1> <id2> <id3>
//! e <id1> <id2> <length>
//! bc <label> <id1> ... <idk>     closed chain, edge idk-id1 implied
//! bp <label> <id1> ... <idk>     open run of boundary edges
//! g <region> <tri1> ... <trik>   triangle region tags (default "base")
//! s <name> <id1> ... <idk>       named vertex set
//! ```
//! Tokens are whitespace separated; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{Edge, Mesh, MeshParts, DEFAULT_REGION};
use crate::error::{Error, Result};

pub const HEADER: &str = "steklov-mesh v1";

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        for v in 0..self.n_vertices() {
            match self.coords() {
                Some(c) => writeln!(out, "v {v} {} {}", c[v][0], c[v][1]).unwrap(),
                None => writeln!(out, "v {v}").unwrap(),
            }
        }
        for t in self.triangles() {
            writeln!(out, "t {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        for (e, l) in self.edge_lengths() {
            writeln!(out, "e {} {} {l}", e.a(), e.b()).unwrap();
        }
        for chain in self.chains() {
            let n = chain.len();
            let label_at = |i: usize| {
                let (a, b) = chain.edge(i);
                self.label_of(a, b).unwrap()
            };
            let first_change = (0..n).find(|&i| label_at(i) != label_at((i + n - 1) % n));
            match first_change {
                None => {
                    let ids: Vec<String> = chain.vertices.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "bc {} {}", label_at(0), ids.join(" ")).unwrap();
                }
                Some(start) => {
                    let mut i = start;
                    while i < start + n {
                        let label = label_at(i % n);
                        let mut ids = vec![chain.vertices[i % n].to_string()];
                        while i < start + n && label_at(i % n) == label {
                            ids.push(chain.vertices[(i + 1) % n].to_string());
                            i += 1;
                        }
                        writeln!(out, "bp {label} {}", ids.join(" ")).unwrap();
                    }
                }
            }
        }
        if self.region_names().len() > 1 || self.region_names()[0] != DEFAULT_REGION {
            for name in self.region_names() {
                let tris: Vec<String> = (0..self.triangles().len())
                    .filter(|&t| self.region_of(t) == name)
                    .map(|t| t.to_string())
                    .collect();
                writeln!(out, "g {name} {}", tris.join(" ")).unwrap();
            }
        }
        for (name, set) in self.vertex_sets() {
            let ids: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            writeln!(out, "s {name} {}", ids.join(" ")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            Some((n, l)) => return Err(parse_err(n, format!("expected header '{HEADER}', found '{l}'"))),
            None => return Err(parse_err(1, "empty mesh file")),
        }
        let mut vertices: BTreeMap<usize, Option<[f64; 2]>> = BTreeMap::new();
        let mut parts = MeshParts::default();
        let mut region_of: BTreeMap<usize, String> = BTreeMap::new();
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            let kind = tok.next().unwrap();
            let rest: Vec<&str> = tok.collect();
            match kind {
                "v" => {
                    let id = int(n, rest.first().copied())?;
                    let xy = match rest.len() {
                        1 => None,
                        3 => Some([float(n, rest[1])?, float(n, rest[2])?]),
                        _ => return Err(parse_err(n, "vertex line needs an id and optional x y")),
                    };
                    if vertices.insert(id, xy).is_some() {
                        return Err(parse_err(n, format!("duplicate vertex {id}")));
                    }
                }
                "t" => {
                    if rest.len() != 3 {
                        return Err(parse_err(n, "triangle line needs three vertex ids"));
                    }
                    parts.triangles.push([int(n, Some(rest[0]))?, int(n, Some(rest[1]))?, int(n, Some(rest[2]))?]);
                }
                "e" => {
                    if rest.len() != 3 {
                        return Err(parse_err(n, "edge line needs two ids and a length"));
                    }
                    let e = Edge::new(int(n, Some(rest[0]))?, int(n, Some(rest[1]))?);
                    if parts.edge_lengths.insert(e, float(n, rest[2])?).is_some() {
                        return Err(parse_err(n, format!("duplicate edge ({}, {})", e.a(), e.b())));
                    }
                }
                "bc" | "bp" => {
                    if rest.len() < 3 {
                        return Err(parse_err(n, "boundary line needs a label and at least two ids"));
                    }
                    let label = rest[0].to_string();
                    let ids = rest[1..].iter().map(|t| int(n, Some(t))).collect::<Result<Vec<_>>>()?;
                    let mut edges: Vec<Edge> = ids.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
                    if kind == "bc" {
                        edges.push(Edge::new(*ids.last().unwrap(), ids[0]));
                    }
                    for e in edges {
                        if parts.boundary_labels.insert(e, label.clone()).is_some() {
                            return Err(parse_err(n, format!("boundary edge ({}, {}) labeled twice", e.a(), e.b())));
                        }
                    }
                }
                "g" => {
                    let name = rest.first().ok_or_else(|| parse_err(n, "region line needs a name"))?;
                    for t in &rest[1..] {
                        let t = int(n, Some(t))?;
                        if region_of.insert(t, name.to_string()).is_some() {
                            return Err(parse_err(n, format!("triangle {t} has two regions")));
                        }
                    }
                }
                "s" => {
                    let name = rest.first().ok_or_else(|| parse_err(n, "vertex set line needs a name"))?;
                    let ids = rest[1..].iter().map(|t| int(n, Some(t))).collect::<Result<Vec<_>>>()?;
                    parts.vertex_sets.insert(name.to_string(), ids);
                }
                other => return Err(parse_err(n, format!("unknown record '{other}'"))),
            }
        }
        parts.n_vertices = vertices.len();
        if let Some((_, &id)) = vertices.keys().enumerate().find(|&(i, &id)| i != id) {
            return Err(parse_err(0, format!("vertex ids must be 0..n-1; found {id}")));
        }
        let with_xy = vertices.values().filter(|c| c.is_some()).count();
        if with_xy == vertices.len() && with_xy > 0 {
            parts.coords = Some(vertices.values().map(|c| c.unwrap()).collect());
        } else if with_xy != 0 {
            return Err(parse_err(0, "either all or no vertices may carry coordinates"));
        }
        if !region_of.is_empty() {
            if region_of.len() != parts.triangles.len() || region_of.keys().last() != Some(&(parts.triangles.len() - 1)) {
                return Err(parse_err(0, "region lines must tag every triangle exactly once"));
            }
            parts.regions = region_of.into_values().collect();
        }
        Mesh::from_parts(parts)
    }

    pub fn read(path: &Path) -> Result<Mesh> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Mesh::from_text(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn int(line: usize, tok: Option<&str>) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing integer"))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad integer '{tok}'")))
}

fn float(line: usize, tok: &str) -> Result<f64> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

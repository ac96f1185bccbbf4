use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::{dual_graph, io, Graph};
use crate::{Error, Result};

/// Named graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Edge,
    Path,
    Cycle,
    Complete,
    Grid,
    GridDual,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Edge => "edge",
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Complete => "complete",
            Family::Grid => "grid",
            Family::GridDual => "grid-dual",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "edge" => Family::Edge,
            "path" => Family::Path,
            "cycle" => Family::Cycle,
            "complete" => Family::Complete,
            "grid" => Family::Grid,
            "grid-dual" => Family::GridDual,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

/// A graph selector: `edge`, `path:n`, `cycle:n`, `complete:n`,
/// `grid:L`, `grid-dual:L` or `file:PATH`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GraphSpec {
    Family(Family, usize),
    File(PathBuf),
}

impl GraphSpec {
    /// Builds (or loads) the graph.
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSpec::Family(f, size) => generate(*f, *size),
            GraphSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                io::parse_graph(&text)
            }
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::InvalidInput("file: spec needs a path".into()));
            }
            return Ok(GraphSpec::File(PathBuf::from(path)));
        }
        if s == "edge" {
            return Ok(GraphSpec::Family(Family::Edge, 1));
        }
        let (name, size) = s.split_once(':').ok_or_else(|| {
            Error::InvalidInput(format!(
                "graph spec `{s}` must be edge, FAMILY:SIZE or file:PATH"
            ))
        })?;
        let family: Family = name.parse()?;
        if family == Family::Edge {
            return Err(Error::InvalidInput("`edge` takes no size".into()));
        }
        let size: usize = size
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad size `{size}` in graph spec `{s}`")))?;
        Ok(GraphSpec::Family(family, size))
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Family(Family::Edge, _) => f.write_str("edge"),
            GraphSpec::Family(fam, size) => write!(f, "{}:{size}", fam.name()),
            GraphSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// Generates a member of a named family.
///
/// Planar families carry the counterclockwise rotation system of a
/// straight-line drawing. `complete:n` is planar only for `n <= 4`; larger
/// complete graphs come without rotations.
pub fn generate(family: Family, size: usize) -> Result<Graph> {
    if size == 0 {
        return Err(Error::InvalidInput(format!(
            "{} needs size >= 1",
            family.name()
        )));
    }
    match family {
        Family::Edge => drawn(2, vec![(0, 1)], &[(0.0, 0.0), (1.0, 0.0)]),
        Family::Path => {
            let edges = (1..size).map(|i| (i - 1, i)).collect();
            let pos: Vec<_> = (0..size).map(|i| (i as f64, 0.0)).collect();
            drawn(size, edges, &pos)
        }
        Family::Cycle => {
            if size < 3 {
                return Err(Error::InvalidInput(format!(
                    "cycle needs at least 3 vertices, got {size}"
                )));
            }
            let edges = (0..size).map(|i| (i, (i + 1) % size)).collect();
            let pos: Vec<_> = (0..size)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / size as f64;
                    (t.cos(), t.sin())
                })
                .collect();
            drawn(size, edges, &pos)
        }
        Family::Complete => {
            let mut edges = Vec::new();
            for i in 0..size {
                for j in i + 1..size {
                    edges.push((i, j));
                }
            }
            let pos: Vec<(f64, f64)> = match size {
                1 => vec![(0.0, 0.0)],
                2 => vec![(0.0, 0.0), (1.0, 0.0)],
                3 => vec![(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)],
                4 => vec![(0.0, 0.0), (4.0, 0.0), (2.0, 4.0), (2.0, 1.5)],
                _ => return Graph::new(size, edges),
            };
            drawn(size, edges, &pos)
        }
        Family::Grid => grid(size),
        Family::GridDual => {
            let dual = dual_graph(&grid(size)?)?;
            Ok(dual.dual)
        }
    }
}

fn grid(l: usize) -> Result<Graph> {
    let mut edges = Vec::with_capacity(2 * l * l.saturating_sub(1));
    let mut pos = Vec::with_capacity(l * l);
    for a in 0..l {
        for b in 0..l {
            let v = a * l + b;
            pos.push((a as f64, b as f64));
            if b + 1 < l {
                edges.push((v, v + 1));
            }
            if a + 1 < l {
                edges.push((v, v + l));
            }
        }
    }
    drawn(l * l, edges, &pos)
}

/// Graph with the rotation system read off a straight-line drawing: ends at
/// each vertex sorted by angle in `[0, 2π)`.
fn drawn(n: usize, edges: Vec<(usize, usize)>, pos: &[(f64, f64)]) -> Result<Graph> {
    let g = Graph::new(n, edges)?;
    let mut rot: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let angle = |from: usize, to: usize| {
            let t = (pos[to].1 - pos[from].1).atan2(pos[to].0 - pos[from].0);
            if t < 0.0 {
                t + 2.0 * PI
            } else {
                t
            }
        };
        rot[u].push((angle(u, v), 2 * i));
        rot[v].push((angle(v, u), 2 * i + 1));
    }
    let rotations = rot
        .into_iter()
        .map(|mut ends| {
            ends.sort_by(|a, b| a.0.total_cmp(&b.0));
            ends.into_iter().map(|(_, e)| e).collect()
        })
        .collect();
    g.with_rotations(rotations)
}

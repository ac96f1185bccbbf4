use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotations: Option<Vec<Vec<usize>>>,
}

/// Parses a JSON graph file.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let raw: GraphFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    for (i, &[u, v]) in raw.edges.iter().enumerate() {
        if u >= raw.vertices || v >= raw.vertices {
            return Err(Error::parse(
                format!("edges[{i}]"),
                format!("endpoint of [{u}, {v}] out of range for {} vertices", raw.vertices),
            ));
        }
    }
    let g = Graph::new(raw.vertices, raw.edges.iter().map(|&[u, v]| (u, v)).collect())?;
    match raw.rotations {
        Some(rot) => g.with_rotations(rot),
        None => Ok(g),
    }
}

/// Serializes a graph to the JSON file format.
pub fn to_json(g: &Graph) -> String {
    let file = GraphFile {
        vertices: g.n_vertices(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
        rotations: g.rotations().map(|r| r.to_vec()),
    };
    serde_json::to_string(&file).expect("graph serialization cannot fail")
}

pub fn write_graph(g: &Graph, path: &Path) -> Result<()> {
    let mut text = to_json(g);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{generate, Family};
    use super::*;

    #[test]
    fn parses_small_graphs() {
        let k2 = parse_graph(r#"{"vertices":2,"edges":[[0,1]]}"#).unwrap();
        assert_eq!((k2.n_vertices(), k2.n_edges()), (2, 1));
        assert!(!k2.has_rotations());
        let p3 = parse_graph(r#"{"vertices":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(p3.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn round_trips_grid_with_rotations() {
        let g = generate(Family::Grid, 3).unwrap();
        let back = parse_graph(&to_json(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!((back.n_vertices(), back.n_edges()), (9, 12));
        assert!(back.has_rotations());
    }

    fn location(text: &str) -> String {
        match parse_graph(text) {
            Err(Error::Parse { location, .. }) => location,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(location(r#"{"vertices":2,"edges":[[0,2]]}"#), "edges[0]");
        assert_eq!(
            location(r#"{"vertices":2,"edges":[[0,1]],"rotations":[[0],[0]]}"#),
            "rotations[1]"
        );
        assert_eq!(
            location(r#"{"vertices":2,"edges":[[0,1]],"rotations":[[0]]}"#),
            "rotations"
        );
        assert!(location(r#"{"vertices":2,"edges":[[0,1]"#).starts_with("line 1"));
        assert!(location(r#"{"edges":[]}"#).starts_with("line"));
    }
}

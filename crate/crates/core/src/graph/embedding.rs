use super::{EdgeSubset, Graph};
use crate::{Error, Result};

/// A planar dual together with the faces it was built from.
///
/// Edge `i` of `dual` crosses edge `i` of the primal graph. Dual vertex `f`
/// sits in the face whose boundary edge-ends are `faces[f]`, listed in
/// tracing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualMap {
    pub dual: Graph,
    pub faces: Vec<Vec<usize>>,
}

impl DualMap {
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }
}

/// Traces the faces of an embedded graph.
///
/// An edge-end `d` is read as the dart leaving its vertex along its edge.
/// The successor of `d` is the edge-end following its twin `d ^ 1` in
/// clockwise order around the twin's vertex.
pub fn trace_faces(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let rotations = g
        .rotations()
        .ok_or_else(|| Error::Embedding("graph has no rotation system".into()))?;
    let ends = 2 * g.n_edges();
    if ends == 0 {
        return Ok(if g.n_vertices() == 1 {
            vec![Vec::new()]
        } else {
            Vec::new()
        });
    }
    // cw[d] = clockwise neighbour of d in its vertex's cycle
    let mut cw = vec![usize::MAX; ends];
    for cycle in rotations {
        let k = cycle.len();
        for (j, &d) in cycle.iter().enumerate() {
            cw[d] = cycle[(j + k - 1) % k];
        }
    }
    if cw.contains(&usize::MAX) {
        return Err(Error::Embedding("rotation system misses edge-ends".into()));
    }
    let mut face_of = vec![usize::MAX; ends];
    let mut faces = Vec::new();
    for start in 0..ends {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut boundary = Vec::new();
        let mut d = start;
        loop {
            if face_of[d] != usize::MAX {
                return Err(Error::Embedding(format!(
                    "face trace from edge-end {start} re-enters edge-end {d}"
                )));
            }
            face_of[d] = id;
            boundary.push(d);
            d = cw[d ^ 1];
            if d == start {
                break;
            }
        }
        faces.push(boundary);
    }
    Ok(faces)
}

/// Number of faces of the embedding.
pub fn face_count(g: &Graph) -> Result<usize> {
    trace_faces(g).map(|f| f.len())
}

/// Builds the planar dual of a connected embedded graph.
pub fn dual_graph(g: &Graph) -> Result<DualMap> {
    if !g.is_connected() {
        return Err(Error::Embedding("dual requires a connected graph".into()));
    }
    let faces = trace_faces(g)?;
    let (n, m, f) = (g.n_vertices(), g.n_edges(), faces.len());
    if n + f != m + 2 {
        return Err(Error::Embedding(format!(
            "rotation system is not planar: n - m + f = {} - {} + {} != 2",
            n, m, f
        )));
    }
    let mut face_of = vec![0; 2 * m];
    for (id, boundary) in faces.iter().enumerate() {
        for &d in boundary {
            face_of[d] = id;
        }
    }
    let edges = (0..m).map(|i| (face_of[2 * i], face_of[2 * i + 1])).collect();
    let dual = Graph::new(f, edges)?.with_rotations(faces.clone())?;
    Ok(DualMap { dual, faces })
}

/// Dual configuration: edge `i` is open in the dual iff it is closed in the
/// primal.
pub fn dual_config(d: &DualMap, a: EdgeSubset) -> EdgeSubset {
    a.complement(d.dual.n_edges())
}

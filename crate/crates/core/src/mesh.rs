use std::collections::HashMap;

use crate::error::{Error, Result};

/// Indexed triangle mesh with parallel coordinate arrays.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    pub tris: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn vertex_count(&self) -> usize {
        self.xs.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn push_vertex(&mut self, x: f64, y: f64, z: f64) -> usize {
        self.xs.push(x);
        self.ys.push(y);
        self.zs.push(z);
        self.xs.len() - 1
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        [self.xs[i], self.ys[i], self.zs[i]]
    }

    /// Checks array lengths, index bounds and index distinctness.
    pub fn validate(&self) -> Result<()> {
        let n = self.xs.len();
        if self.ys.len() != n || self.zs.len() != n {
            return Err(Error::InvalidParameter("coordinate arrays differ in length".into()));
        }
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::InvalidParameter(format!("triangle {t} indexes past {n} vertices")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidParameter(format!("triangle {t} repeats a vertex")));
            }
        }
        Ok(())
    }

    /// Unnormalized normal of triangle `t` (twice its area vector).
    pub fn face_normal(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.tris[t].map(|i| self.vertex(i));
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    }

    /// Undirected edge → number of incident triangles.
    pub fn edge_incidence(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for tri in &self.tris {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// Signed volume enclosed by the triangle soup (divergence theorem).
    /// Positive when faces are wound outward.
    pub fn signed_volume(&self) -> f64 {
        // Shift to the first vertex to keep Mercator-scale coordinates exact enough.
        let o = if self.is_empty() { [0.0; 3] } else { self.vertex(0) };
        self.tris
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.map(|i| {
                    let v = self.vertex(i);
                    [v[0] - o[0], v[1] - o[1], v[2] - o[2]]
                });
                a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0])
            })
            .sum::<f64>()
            / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriMesh {
        let mut m = TriMesh::default();
        m.push_vertex(0.0, 0.0, 0.0);
        m.push_vertex(1.0, 0.0, 0.0);
        m.push_vertex(0.0, 1.0, 0.0);
        m.push_vertex(0.0, 0.0, 1.0);
        m.tris = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]];
        m
    }

    #[test]
    fn tetrahedron_volume_and_edges() {
        let m = tetra();
        m.validate().unwrap();
        assert!((m.signed_volume() - 1.0 / 6.0).abs() < 1e-15);
        let e = m.edge_incidence();
        assert_eq!(e.len(), 6);
        assert!(e.values().all(|&c| c == 2));
    }

    #[test]
    fn validate_catches_bad_indices() {
        let mut m = tetra();
        m.tris.push([0, 0, 1]);
        assert!(m.validate().is_err());
        let mut m = tetra();
        m.tris.push([0, 1, 9]);
        assert!(m.validate().is_err());
    }
}

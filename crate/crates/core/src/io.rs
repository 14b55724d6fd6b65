//! File formats: meshes, solutions, eigen reports and plot data.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Mesh1D, TriMesh};

/// `{ "dim", "nodes", "elements", "boundary" }`, 0-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub elements: Vec<Vec<usize>>,
    pub boundary: Vec<usize>,
}

impl From<&Mesh> for MeshFile {
    fn from(mesh: &Mesh) -> Self {
        match mesh {
            Mesh::Interval(m) => {
                let n = m.node_count();
                MeshFile {
                    dim: 1,
                    nodes: m.nodes().iter().map(|&x| vec![x]).collect(),
                    elements: (0..n - 1).map(|k| vec![k, k + 1]).collect(),
                    boundary: vec![0, n - 1],
                }
            }
            Mesh::Triangles(m) => MeshFile {
                dim: 2,
                nodes: m.vertices().iter().map(|v| v.to_vec()).collect(),
                elements: m.triangles().iter().map(|t| t.to_vec()).collect(),
                boundary: m.boundary_vertices(),
            },
        }
    }
}

impl MeshFile {
    pub fn to_mesh(&self) -> Result<Mesh> {
        let bad = |m: &str| Error::Format(format!("mesh file: {m}"));
        match self.dim {
            1 => {
                let nodes = self
                    .nodes
                    .iter()
                    .map(|p| p.first().copied().ok_or_else(|| bad("empty node")))
                    .collect::<Result<Vec<f64>>>()?;
                let n = nodes.len();
                if self.boundary != [0, n.saturating_sub(1)] {
                    return Err(bad("1D boundary must be the two end nodes"));
                }
                Ok(Mesh::from(Mesh1D::new(nodes)?))
            }
            2 => {
                let vertices = self
                    .nodes
                    .iter()
                    .map(|p| match p.as_slice() {
                        [x, y] => Ok([*x, *y]),
                        _ => Err(bad("2D nodes need two coordinates")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let triangles = self
                    .elements
                    .iter()
                    .map(|t| match t.as_slice() {
                        [a, b, c] => Ok([*a, *b, *c]),
                        _ => Err(bad("triangles need three vertices")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Mesh::from(TriMesh::new(vertices, triangles, &self.boundary)?))
            }
            d => Err(bad(&format!("unsupported dimension {d}"))),
        }
    }
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    write_json(&MeshFile::from(mesh), path)
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let file: MeshFile = read_json(path)?;
    file.to_mesh()
}

/// Solution of a nonlinear solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub mesh: String,
    pub coefficients: Vec<f64>,
    pub p: f64,
    pub s: f64,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReportFile {
    pub lambdas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub phis: Vec<String>,
    pub second_multiple: bool,
}

/// Coefficient file of one eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub mesh: String,
    pub coefficients: Vec<f64>,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Two-column `x u` text for a 1D function, boundary zeros included.
pub fn write_dat(mesh: &Mesh, coeffs: &[f64], mut out: impl Write) -> Result<()> {
    let Mesh::Interval(m) = mesh else {
        return Err(Error::Domain("plot data is emitted for interval meshes only".into()));
    };
    let n = m.node_count();
    for (k, x) in m.nodes().iter().enumerate() {
        let u = if k == 0 || k == n - 1 { 0.0 } else { coeffs[k - 1] };
        writeln!(out, "{x:.12e} {u:.12e}")?;
    }
    Ok(())
}

/// `x y u` rows at every vertex of a triangulation, for external plotting.
pub fn write_grid(mesh: &Mesh, coeffs: &[f64], mut out: impl Write) -> Result<()> {
    let dofs = mesh.vertex_dofs();
    for v in 0..mesh.vertex_count() {
        let p = mesh.vertex_point(v);
        let u = dofs[v].map_or(0.0, |d| coeffs[d]);
        writeln!(out, "{:.12e} {:.12e} {u:.12e}", p[0], p[1])?;
    }
    Ok(())
}

//! Uniform lattice discretization of a bounded domain plus exterior collar.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{Domain, Point};
use crate::params::FracParams;

/// Classification of a lattice node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeMask {
    /// Inside the open domain; carries an unknown.
    Interior,
    /// In the complement, within the truncation ball; carries exterior data.
    Collar,
}

impl NodeMask {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeMask::Interior => "interior",
            NodeMask::Collar => "collar",
        }
    }
}

/// Nodes within `1e-9 * h` of the boundary are classified as collar; the
/// boundary itself belongs to the complement of the open domain.
const BOUNDARY_CLASSIFY_TOL: f64 = 1e-9;

/// A uniform lattice covering the domain and an exterior collar.
///
/// The lattice is anchored at the domain center with spacing `h`, so the
/// distance between nodes `i` and `j` is exactly `h * |k_i - k_j|` in
/// lattice units. Nodes beyond the truncation ball (collar radius plus the
/// domain circumradius around the center) are not stored.
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    h: f64,
    domain: Domain,
    collar_radius: f64,
    trunc_radius: f64,
    /// Lattice coordinates per node, relative to the domain center.
    lattice: Vec<(i32, i32)>,
    positions: Vec<Point>,
    mask: Vec<NodeMask>,
    boundary_dist: Vec<f64>,
    interior: Vec<u32>,
    collar: Vec<u32>,
    /// Row-major lookup from lattice coordinates to node index.
    index: Vec<Option<u32>>,
    kx_min: i32,
    ky_min: i32,
    index_width: usize,
}

impl Grid {
    /// Builds a grid with `interior_nodes` lattice intervals resolving the
    /// domain's bounding box per axis (the interior then holds that many
    /// nodes per axis in 1D) and the given collar radius.
    ///
    /// The collar radius must be at least the domain diameter so that the
    /// dropped exterior interactions are controlled by the kernel tail.
    pub fn build(domain: &Domain, interior_nodes: usize, collar_radius: f64) -> Result<Grid> {
        domain.validate()?;
        if interior_nodes < 3 {
            return Err(Error::InvalidParams(format!(
                "need at least 3 interior nodes per axis, got {interior_nodes}"
            )));
        }
        if collar_radius < domain.diameter() {
            return Err(Error::InvalidParams(format!(
                "collar radius {collar_radius} is below the domain diameter {}",
                domain.diameter()
            )));
        }
        let dim = domain.dim();
        let (lo, hi) = domain.bounding_box();
        let extent = if dim == 1 {
            hi[0] - lo[0]
        } else {
            (hi[0] - lo[0]).max(hi[1] - lo[1])
        };
        let h = extent / (interior_nodes as f64 + 1.0);
        let center = domain.center();
        let trunc_radius = collar_radius + domain.circumradius();
        let kmax = (trunc_radius / h).floor() as i32;
        let (ky_lo, ky_hi) = if dim == 1 { (0, 0) } else { (-kmax, kmax) };

        let tol = BOUNDARY_CLASSIFY_TOL * h;
        let mut lattice = Vec::new();
        let mut positions = Vec::new();
        let mut mask = Vec::new();
        let mut boundary_dist = Vec::new();
        let mut interior = Vec::new();
        let mut collar = Vec::new();
        let index_width = (2 * kmax + 1) as usize;
        let index_height = (ky_hi - ky_lo + 1) as usize;
        let mut index: Vec<Option<u32>> = vec![None; index_width * index_height];

        for ky in ky_lo..=ky_hi {
            for kx in -kmax..=kmax {
                let pos = [
                    center[0] + kx as f64 * h,
                    if dim == 1 {
                        0.0
                    } else {
                        center[1] + ky as f64 * h
                    },
                ];
                let delta = domain.boundary_distance(pos);
                let radial = crate::geom::dist(center, pos);
                let m = if delta > tol {
                    NodeMask::Interior
                } else if radial <= trunc_radius + tol {
                    NodeMask::Collar
                } else {
                    continue;
                };
                let id = positions.len() as u32;
                lattice.push((kx, ky));
                positions.push(pos);
                mask.push(m);
                boundary_dist.push(if m == NodeMask::Interior { delta } else { 0.0 });
                match m {
                    NodeMask::Interior => interior.push(id),
                    NodeMask::Collar => collar.push(id),
                }
                let row = (ky - ky_lo) as usize;
                let col = (kx + kmax) as usize;
                index[row * index_width + col] = Some(id);
            }
        }

        if interior.is_empty() {
            return Err(Error::InvalidParams(
                "grid resolves no interior nodes".into(),
            ));
        }

        Ok(Grid {
            dim,
            h,
            domain: domain.clone(),
            collar_radius,
            trunc_radius,
            lattice,
            positions,
            mask,
            boundary_dist,
            interior,
            collar,
            index,
            kx_min: -kmax,
            ky_min: ky_lo,
            index_width,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn collar_radius(&self) -> f64 {
        self.collar_radius
    }

    /// Radius of the truncation ball around the domain center beyond which
    /// exterior interactions are dropped or folded into the far-field term.
    pub fn truncation_radius(&self) -> f64 {
        self.trunc_radius
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, node: usize) -> Point {
        self.positions[node]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn mask(&self, node: usize) -> NodeMask {
        self.mask[node]
    }

    pub fn boundary_distance(&self, node: usize) -> f64 {
        self.boundary_dist[node]
    }

    pub fn lattice_coords(&self, node: usize) -> (i32, i32) {
        self.lattice[node]
    }

    pub fn interior_nodes(&self) -> &[u32] {
        &self.interior
    }

    pub fn collar_nodes(&self) -> &[u32] {
        &self.collar
    }

    pub fn node_at(&self, kx: i32, ky: i32) -> Option<usize> {
        let col = kx - self.kx_min;
        let row = ky - self.ky_min;
        if col < 0 || row < 0 || col as usize >= self.index_width {
            return None;
        }
        let idx = row as usize * self.index_width + col as usize;
        self.index.get(idx).copied().flatten().map(|v| v as usize)
    }

    /// `h^dim`, the nodal cell measure.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// `h^(2 dim)`, the pair cell measure of the double sum.
    pub fn pair_measure(&self) -> f64 {
        self.h.powi(2 * self.dim as i32)
    }
}

/// Nodal values over a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite value at node {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.positions().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Multilinear interpolation at an arbitrary point. Returns `None` when
    /// the surrounding cell is not fully covered by stored nodes.
    pub fn interpolate(&self, x: Point) -> Option<f64> {
        let g = &self.grid;
        let c = g.domain().center();
        let fx = (x[0] - c[0]) / g.h;
        let kx0 = fx.floor() as i32;
        let tx = fx - kx0 as f64;
        if g.dim == 1 {
            let v0 = self.values[g.node_at(kx0, 0)?];
            let v1 = self.values[g.node_at(kx0 + 1, 0)?];
            Some(v0 * (1.0 - tx) + v1 * tx)
        } else {
            let fy = (x[1] - c[1]) / g.h;
            let ky0 = fy.floor() as i32;
            let ty = fy - ky0 as f64;
            let v00 = self.values[g.node_at(kx0, ky0)?];
            let v10 = self.values[g.node_at(kx0 + 1, ky0)?];
            let v01 = self.values[g.node_at(kx0, ky0 + 1)?];
            let v11 = self.values[g.node_at(kx0 + 1, ky0 + 1)?];
            Some(
                v00 * (1.0 - tx) * (1.0 - ty)
                    + v10 * tx * (1.0 - ty)
                    + v01 * (1.0 - tx) * ty
                    + v11 * tx * ty,
            )
        }
    }

    /// Writes the nodal table as CSV (`x[,y],value,mask`) and a sidecar
    /// key-value file `<path stem>.meta` with spacing and parameters.
    /// Floats use 17 significant digits, which round-trips f64 exactly.
    pub fn write_csv(&self, path: &Path, params: Option<&FracParams>) -> Result<()> {
        let g = &self.grid;
        let mut out = String::new();
        if g.dim == 1 {
            out.push_str("x,value,mask\n");
        } else {
            out.push_str("x,y,value,mask\n");
        }
        for i in 0..g.len() {
            let p = g.position(i);
            if g.dim == 1 {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_float(p[0]),
                    fmt_float(self.values[i]),
                    g.mask(i).as_str()
                );
            } else {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_float(p[0]),
                    fmt_float(p[1]),
                    fmt_float(self.values[i]),
                    g.mask(i).as_str()
                );
            }
        }
        std::fs::write(path, out)?;

        let mut meta = String::new();
        let _ = writeln!(meta, "dim = {}", g.dim);
        let _ = writeln!(meta, "h = {}", fmt_float(g.h));
        if let Some(prm) = params {
            let _ = writeln!(meta, "s = {}", fmt_float(prm.s()));
            let _ = writeln!(meta, "p = {}", fmt_float(prm.p()));
            let _ = writeln!(meta, "norm_const = {}", fmt_float(prm.norm_const()));
        }
        let _ = writeln!(meta, "collar_radius = {}", fmt_float(g.collar_radius));
        let _ = writeln!(meta, "domain = {}", describe_domain(&g.domain));
        let _ = writeln!(meta, "n_interior = {}", g.interior.len());
        let _ = writeln!(meta, "n_collar = {}", g.collar.len());
        std::fs::write(path.with_extension("meta"), meta)?;
        Ok(())
    }
}

/// Fixed-width scientific formatting with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn describe_domain(d: &Domain) -> String {
    match d {
        Domain::Interval { a, b } => format!("interval({}, {})", fmt_float(*a), fmt_float(*b)),
        Domain::Ball { center, radius } => format!(
            "ball(({}, {}), {})",
            fmt_float(center[0]),
            fmt_float(center[1]),
            fmt_float(*radius)
        ),
        Domain::Rectangle { lo, hi } => format!(
            "rectangle(({}, {}), ({}, {}))",
            fmt_float(lo[0]),
            fmt_float(lo[1]),
            fmt_float(hi[0]),
            fmt_float(hi[1])
        ),
    }
}

/// Precomputed kernel weights `|x_i - x_j|^{-(dim + s p)}` indexed by lattice
/// offset; exact lattice distances make the table independent of float noise
/// in node positions.
#[derive(Debug)]
pub struct KernelTable {
    dim: usize,
    width: usize,
    weights: Vec<f64>,
}

impl KernelTable {
    pub fn build(grid: &Grid, params: &FracParams) -> Self {
        let exponent = params.kernel_exponent();
        let h = grid.spacing();
        let mut span_x = 0i32;
        let mut span_y = 0i32;
        for &(kx, ky) in &grid.lattice {
            span_x = span_x.max(kx.abs());
            span_y = span_y.max(ky.abs());
        }
        let width = (2 * span_x + 1) as usize;
        let height = (2 * span_y + 1) as usize;
        let mut weights = vec![0.0; width * height.max(1)];
        for dy in 0..height {
            for dx in 0..width {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let r = h * ((dx * dx + dy * dy) as f64).sqrt();
                weights[dy * width + dx] = r.powf(-exponent);
            }
        }
        KernelTable {
            dim: grid.dim(),
            width,
            weights,
        }
    }

    /// Weight for lattice offset (`dx`, `dy`); the diagonal is zero.
    #[inline]
    pub fn weight(&self, dx: i32, dy: i32) -> f64 {
        debug_assert!(self.dim == 2 || dy == 0);
        self.weights[dy.unsigned_abs() as usize * self.width + dx.unsigned_abs() as usize]
    }
}

//! The discrete Dirichlet problem: source, exterior datum, and zero-order
//! coefficient sampled on a grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grid::{Grid, GridFunction};

/// Data of `(-Delta_p)^s u = f + c |u|^{p-2} u` in the domain with `u = g`
/// on the exterior collar.
///
/// `f` and `c` are indexed by interior-node order, `g` by collar-node order.
/// `far_g` is the constant value the exterior datum takes beyond the
/// truncation ball; `None` means zero there, in which case the dropped
/// far-field interactions vanish with the kernel tail. A nonzero constant is
/// folded into the energy as a per-node far-field term.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    grid: Arc<Grid>,
    f: Vec<f64>,
    g: Vec<f64>,
    c: Vec<f64>,
    far_g: Option<f64>,
}

impl DirichletProblem {
    pub fn new(
        grid: Arc<Grid>,
        f: Vec<f64>,
        g: Vec<f64>,
        c: Vec<f64>,
        far_g: Option<f64>,
    ) -> Result<Self> {
        let ni = grid.interior_nodes().len();
        let nc = grid.collar_nodes().len();
        if f.len() != ni || c.len() != ni {
            return Err(Error::InvalidParams(format!(
                "f and c must have one value per interior node ({ni}), got {} and {}",
                f.len(),
                c.len()
            )));
        }
        if g.len() != nc {
            return Err(Error::InvalidParams(format!(
                "g must have one value per collar node ({nc}), got {}",
                g.len()
            )));
        }
        for v in f.iter().chain(g.iter()).chain(c.iter()) {
            if !v.is_finite() {
                return Err(Error::InvalidParams("non-finite problem data".into()));
            }
        }
        Ok(Self {
            grid,
            f,
            g,
            c,
            far_g: far_g.filter(|v| *v != 0.0),
        })
    }

    /// Samples `f`, `g`, `c` from closures; `far_g` is the constant exterior
    /// value beyond the truncation ball.
    pub fn from_fns(
        grid: Arc<Grid>,
        f: impl Fn(Point) -> f64,
        g: impl Fn(Point) -> f64,
        c: impl Fn(Point) -> f64,
        far_g: Option<f64>,
    ) -> Result<Self> {
        let fv = grid
            .interior_nodes()
            .iter()
            .map(|&i| f(grid.position(i as usize)))
            .collect();
        let cv = grid
            .interior_nodes()
            .iter()
            .map(|&i| c(grid.position(i as usize)))
            .collect();
        let gv = grid
            .collar_nodes()
            .iter()
            .map(|&i| g(grid.position(i as usize)))
            .collect();
        Self::new(grid, fv, gv, cv, far_g)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn far_g(&self) -> Option<f64> {
        self.far_g
    }

    /// Rejects any positive coefficient value; the energy is convex only
    /// for `c <= 0`.
    pub fn require_nonpositive_c(&self) -> Result<()> {
        for (k, &v) in self.c.iter().enumerate() {
            if v > 0.0 {
                return Err(Error::NonConvex {
                    node: self.grid.interior_nodes()[k] as usize,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Assembles a full grid function from interior values, pinning the
    /// collar to `g`.
    pub fn with_interior(&self, interior: &[f64]) -> GridFunction {
        let mut values = vec![0.0; self.grid.len()];
        for (k, &i) in self.grid.interior_nodes().iter().enumerate() {
            values[i as usize] = interior[k];
        }
        for (k, &i) in self.grid.collar_nodes().iter().enumerate() {
            values[i as usize] = self.g[k];
        }
        GridFunction::new(self.grid.clone(), values).expect("finite by construction")
    }

    /// Checks that `u` agrees with the exterior datum on every collar node.
    pub fn check_collar(&self, u: &GridFunction) -> Result<()> {
        for (k, &i) in self.grid.collar_nodes().iter().enumerate() {
            if u.value(i as usize) != self.g[k] {
                return Err(Error::CollarMismatch { node: i as usize });
            }
        }
        Ok(())
    }

    /// Interior values of a full grid function, in interior-node order.
    pub fn interior_slice(&self, u: &GridFunction) -> Vec<f64> {
        self.grid
            .interior_nodes()
            .iter()
            .map(|&i| u.value(i as usize))
            .collect()
    }

    /// Problem with `f`, `g` (and the far constant) scaled by `lambda`;
    /// used to build ordered solution pairs.
    pub fn scaled_data(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.f.iter().map(|v| lambda * v).collect(),
            self.g.iter().map(|v| lambda * v).collect(),
            self.c.clone(),
            self.far_g.map(|v| lambda * v),
        )
    }
}

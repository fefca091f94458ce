//! Maps of the plane sampled on a grid, with bilinear evaluation, analytic
//! Jacobians of the interpolant, and Newton inversion.

use crate::domain::GridSpec;
use crate::error::{Error, Result};
use crate::numerics::{Mat2, Vec2};
use serde::{Deserialize, Serialize};

/// A planar map stored as its displacement from the identity at cell
/// centers. Evaluation interpolates the displacement bilinearly and clamps
/// it outside the grid, so the map extends to all of the plane with constant
/// displacement beyond the sampled box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledMap {
    pub grid: GridSpec,
    /// Displacement x-components, grid layout.
    pub dx_values: Vec<f64>,
    /// Displacement y-components, grid layout.
    pub dy_values: Vec<f64>,
}

impl SampledMap {
    pub fn identity(grid: GridSpec) -> SampledMap {
        SampledMap {
            dx_values: vec![0.0; grid.len()],
            dy_values: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Build from map values at cell centers.
    pub fn from_values(grid: GridSpec, values: &[Vec2]) -> Result<SampledMap> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} map samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let centers = grid.centers();
        Ok(SampledMap {
            dx_values: values
                .iter()
                .zip(&centers)
                .map(|(v, c)| v.x - c.x)
                .collect(),
            dy_values: values
                .iter()
                .zip(&centers)
                .map(|(v, c)| v.y - c.y)
                .collect(),
            grid,
        })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec2) -> Vec2) -> SampledMap {
        let values: Vec<Vec2> = grid.centers().iter().map(|&p| f(p)).collect();
        SampledMap::from_values(grid, &values).expect("length matches by construction")
    }

    /// Map value at the cell center `(ix, iy)`.
    pub fn at_node(&self, ix: usize, iy: usize) -> Vec2 {
        let i = self.grid.index(ix, iy);
        let c = self.grid.center(ix, iy);
        Vec2::new(c.x + self.dx_values[i], c.y + self.dy_values[i])
    }

    pub fn displacement(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            self.grid.interp(&self.dx_values, p),
            self.grid.interp(&self.dy_values, p),
        )
    }

    pub fn eval(&self, p: Vec2) -> Vec2 {
        p + self.displacement(p)
    }

    /// Jacobian of the interpolated map at `p` (identity plus the analytic
    /// derivative of the bilinear displacement patch).
    pub fn jacobian(&self, p: Vec2) -> Mat2 {
        let gx = self.grid.interp_grad(&self.dx_values, p);
        let gy = self.grid.interp_grad(&self.dy_values, p);
        Mat2::new(1.0 + gx.x, gx.y, gy.x, 1.0 + gy.y)
    }

    pub fn max_displacement(&self) -> f64 {
        self.dx_values
            .iter()
            .zip(&self.dy_values)
            .map(|(&dx, &dy)| (dx * dx + dy * dy).sqrt())
            .fold(0.0, f64::max)
    }

    /// Solve `self.eval(z) = y` by Newton iteration from `z = y`.
    ///
    /// Capped at 20 iterations with step tolerance 1e-10; near-identity maps
    /// converge in a handful of steps. Divergence is reported so callers can
    /// refine the fragmentation.
    pub fn newton_invert(&self, y: Vec2) -> Result<Vec2> {
        const MAX_ITERS: usize = 20;
        const STEP_TOL: f64 = 1e-10;
        let mut z = y;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_ITERS {
            let r = self.eval(z) - y;
            residual = r.norm();
            let step = self
                .jacobian(z)
                .solve(r)
                .ok_or(Error::NewtonDivergence { at: y, residual })?;
            z = z - step;
            if step.norm() < STEP_TOL {
                let r = (self.eval(z) - y).norm();
                if r < 1e-8 {
                    return Ok(z);
                }
                return Err(Error::NewtonDivergence { at: y, residual: r });
            }
        }
        Err(Error::NewtonDivergence { at: y, residual })
    }

    /// Composition `self(other(.))` sampled on `self.grid`.
    pub fn compose_sampled(&self, other: &SampledMap) -> SampledMap {
        SampledMap::from_fn(self.grid, |p| self.eval(other.eval(p)))
    }

    /// Largest deviation `|self(p) - other(p)|` over cell centers.
    pub fn sup_distance(&self, other: &SampledMap) -> f64 {
        self.grid
            .centers()
            .iter()
            .map(|&p| (self.eval(p) - other.eval(p)).norm())
            .fold(0.0, f64::max)
    }
}

//! Planar box domains and uniform cell-centered grids.

use crate::error::{Error, Result};
use crate::numerics::Vec2;
use serde::{Deserialize, Serialize};

/// Axis-aligned open box in the plane. All coordinates are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl Domain {
    pub fn new(lo: Vec2, hi: Vec2) -> Result<Domain> {
        if !(lo.is_finite() && hi.is_finite()) || hi.x <= lo.x || hi.y <= lo.y {
            return Err(Error::GridMismatch(format!(
                "invalid box corners {lo:?}, {hi:?}"
            )));
        }
        Ok(Domain { lo, hi })
    }

    pub fn unit() -> Domain {
        Domain {
            lo: Vec2::ZERO,
            hi: Vec2::new(1.0, 1.0),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn diameter(&self) -> f64 {
        (self.width().powi(2) + self.height().powi(2)).sqrt()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    /// Box grown by `margin` times the side length on every side.
    pub fn inflate(&self, margin: f64) -> Domain {
        let dx = self.width() * margin;
        let dy = self.height() * margin;
        Domain {
            lo: Vec2::new(self.lo.x - dx, self.lo.y - dy),
            hi: Vec2::new(self.hi.x + dx, self.hi.y + dy),
        }
    }

    /// Working box for flow integration: the domain inflated by 10% per side.
    /// Synthesized schedules keep the closed domain invariant, so trajectories
    /// leaving this box signal configuration errors rather than physics.
    pub fn working_box(&self) -> Domain {
        self.inflate(0.1)
    }

    pub fn clamp(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.lo.x, self.hi.x),
            p.y.clamp(self.lo.y, self.hi.y),
        )
    }
}

/// Uniform cell-centered grid over a [`Domain`].
///
/// Values indexed row-major with the y index as the outer loop:
/// `idx = iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Result<GridSpec> {
        if nx == 0 || ny == 0 {
            return Err(Error::GridMismatch(format!(
                "grid resolution must be positive, got {nx} x {ny}"
            )));
        }
        Ok(GridSpec { domain, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.domain.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.domain.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    /// Center of cell `(ix, iy)`.
    pub fn center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            self.domain.lo.x + (ix as f64 + 0.5) * self.dx(),
            self.domain.lo.y + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn centers(&self) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.len());
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push(self.center(ix, iy));
            }
        }
        out
    }

    /// x coordinate of the ix-th cell-center column.
    pub fn x_center(&self, ix: usize) -> f64 {
        self.domain.lo.x + (ix as f64 + 0.5) * self.dx()
    }

    /// y coordinate of the iy-th cell-center row.
    pub fn y_center(&self, iy: usize) -> f64 {
        self.domain.lo.y + (iy as f64 + 0.5) * self.dy()
    }

    /// Continuous cell-center coordinates of a point: `u = 0` at the first
    /// column center, `u = nx - 1` at the last. Clamped to that range.
    pub fn fractional(&self, p: Vec2) -> (f64, f64) {
        let u = ((p.x - self.domain.lo.x) / self.dx() - 0.5).clamp(0.0, (self.nx - 1) as f64);
        let v = ((p.y - self.domain.lo.y) / self.dy() - 0.5).clamp(0.0, (self.ny - 1) as f64);
        (u, v)
    }

    /// Bilinear interpolation weights for a point: cell indices and fractions.
    pub fn bilinear(&self, p: Vec2) -> BilinearStencil {
        let (u, v) = self.fractional(p);
        let ix = (u.floor() as usize).min(self.nx.saturating_sub(2));
        let iy = (v.floor() as usize).min(self.ny.saturating_sub(2));
        let ix = if self.nx == 1 { 0 } else { ix };
        let iy = if self.ny == 1 { 0 } else { iy };
        BilinearStencil {
            ix,
            iy,
            fx: if self.nx == 1 { 0.0 } else { u - ix as f64 },
            fy: if self.ny == 1 { 0.0 } else { v - iy as f64 },
        }
    }

    /// Interpolate a scalar field stored on this grid at `p` (clamped).
    pub fn interp(&self, values: &[f64], p: Vec2) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let s = self.bilinear(p);
        let i00 = self.index(s.ix, s.iy);
        if self.nx == 1 && self.ny == 1 {
            return values[i00];
        }
        let ix1 = (s.ix + 1).min(self.nx - 1);
        let iy1 = (s.iy + 1).min(self.ny - 1);
        let v00 = values[i00];
        let v10 = values[self.index(ix1, s.iy)];
        let v01 = values[self.index(s.ix, iy1)];
        let v11 = values[self.index(ix1, iy1)];
        (1.0 - s.fy) * ((1.0 - s.fx) * v00 + s.fx * v10) + s.fy * ((1.0 - s.fx) * v01 + s.fx * v11)
    }

    /// Gradient of the bilinear interpolant of `values` at `p`.
    /// Piecewise constant per cell in each direction; clamped outside.
    pub fn interp_grad(&self, values: &[f64], p: Vec2) -> Vec2 {
        debug_assert_eq!(values.len(), self.len());
        let s = self.bilinear(p);
        if self.nx == 1 || self.ny == 1 {
            return Vec2::ZERO;
        }
        let ix1 = (s.ix + 1).min(self.nx - 1);
        let iy1 = (s.iy + 1).min(self.ny - 1);
        let v00 = values[self.index(s.ix, s.iy)];
        let v10 = values[self.index(ix1, s.iy)];
        let v01 = values[self.index(s.ix, iy1)];
        let v11 = values[self.index(ix1, iy1)];
        let gx = ((1.0 - s.fy) * (v10 - v00) + s.fy * (v11 - v01)) / self.dx();
        let gy = ((1.0 - s.fx) * (v01 - v00) + s.fx * (v11 - v10)) / self.dy();
        Vec2::new(gx, gy)
    }

    pub fn same_layout(&self, other: &GridSpec) -> bool {
        self == other
    }
}

/// Cell index and in-cell fractions for bilinear interpolation.
#[derive(Debug, Clone, Copy)]
pub struct BilinearStencil {
    pub ix: usize,
    pub iy: usize,
    pub fx: f64,
    pub fy: f64,
}

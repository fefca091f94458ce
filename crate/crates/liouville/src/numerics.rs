//! Small shared numeric building blocks: 2-vectors, 2x2 matrices,
//! deterministic summation, and monotone piecewise-linear maps.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Vec2) -> f64 {
        let d = self - other;
        d.dot(d)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }

    pub fn with_component(mut self, axis: Axis, v: f64) -> Vec2 {
        match axis {
            Axis::X => self.x = v,
            Axis::Y => self.y = v,
        }
        self
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };
    pub const ZERO: Mat2 = Mat2 {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: Vec2, c1: Vec2) -> Self {
        Mat2::new(c0.x, c1.x, c0.y, c1.y)
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn mul_mat(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Solve `self * x = rhs`; `None` when the determinant vanishes.
    pub fn solve(self, rhs: Vec2) -> Option<Vec2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Vec2::new(
            (rhs.x * self.d - rhs.y * self.b) / det,
            (rhs.y * self.a - rhs.x * self.c) / det,
        ))
    }

    /// Largest column norm; cheap scale estimate.
    pub fn max_col_norm(self) -> f64 {
        let c0 = Vec2::new(self.a, self.c).norm();
        let c1 = Vec2::new(self.b, self.d).norm();
        c0.max(c1)
    }

    /// 2-norm condition number via the singular values of a 2x2 matrix.
    pub fn cond(self) -> f64 {
        // Singular values from the eigenvalues of A^T A.
        let g11 = self.a * self.a + self.c * self.c;
        let g12 = self.a * self.b + self.c * self.d;
        let g22 = self.b * self.b + self.d * self.d;
        let tr = g11 + g22;
        let det = (g11 * g22 - g12 * g12).max(0.0);
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let s_max = (tr / 2.0 + disc).max(0.0).sqrt();
        let s_min = (tr / 2.0 - disc).max(0.0).sqrt();
        if s_min == 0.0 {
            f64::INFINITY
        } else {
            s_max / s_min
        }
    }
}

pub type Axis2 = Axis;

/// Coordinate axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn unit(self) -> Vec2 {
        match self {
            Axis::X => Vec2::new(1.0, 0.0),
            Axis::Y => Vec2::new(0.0, 1.0),
        }
    }
}

/// Pairwise (cascade) summation. Used for every mass reduction so that
/// results do not depend on thread count or chunking.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        let mut s = 0.0;
        for &x in v {
            s += x;
        }
        s
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Find `k` such that `knots[k] <= x < knots[k+1]`, clamped to valid cells.
/// `knots` must be strictly increasing with at least 2 entries.
pub fn bracket(knots: &[f64], x: f64) -> usize {
    let n = knots.len();
    if x <= knots[0] {
        return 0;
    }
    if x >= knots[n - 1] {
        return n - 2;
    }
    let mut lo = 0usize;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if knots[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Monotone piecewise-linear map on a uniform knot grid, extended with
/// slope one (constant displacement) beyond the first and last knot.
#[derive(Debug, Clone)]
pub struct PlMap<'a> {
    /// First knot coordinate.
    pub x0: f64,
    /// Knot spacing.
    pub dx: f64,
    /// Map values at the knots, strictly increasing for a valid shear.
    pub values: &'a [f64],
}

impl<'a> PlMap<'a> {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = (x - self.x0) / self.dx;
        if u <= 0.0 {
            return self.values[0] + (x - self.x0);
        }
        if u >= (n - 1) as f64 {
            let xe = self.x0 + (n - 1) as f64 * self.dx;
            return self.values[n - 1] + (x - xe);
        }
        let k = (u.floor() as usize).min(n - 2);
        let f = u - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    /// Slope of the interpolant at `x` (piecewise constant).
    pub fn slope(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = (x - self.x0) / self.dx;
        if u <= 0.0 || u >= (n - 1) as f64 {
            return 1.0;
        }
        let k = (u.floor() as usize).min(n - 2);
        (self.values[k + 1] - self.values[k]) / self.dx
    }

    /// Inverse of the (assumed strictly increasing) interpolant.
    pub fn invert(&self, y: f64) -> f64 {
        let n = self.values.len();
        if y <= self.values[0] {
            return self.x0 + (y - self.values[0]);
        }
        if y >= self.values[n - 1] {
            let xe = self.x0 + (n - 1) as f64 * self.dx;
            return xe + (y - self.values[n - 1]);
        }
        // Binary search over knot values.
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.values[mid] <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v0 = self.values[lo];
        let v1 = self.values[lo + 1];
        let f = if v1 > v0 { (y - v0) / (v1 - v0) } else { 0.0 };
        self.x0 + (lo as f64 + f) * self.dx
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert_abs_diff_eq!(pairwise_sum(&v), naive, epsilon = 1e-12);
    }

    #[test]
    fn mat2_solve_roundtrip() {
        let m = Mat2::new(2.0, 1.0, -0.5, 3.0);
        let x = Vec2::new(0.3, -1.2);
        let b = m.mul_vec(x);
        let got = m.solve(b).unwrap();
        assert_abs_diff_eq!(got.x, x.x, epsilon = 1e-14);
        assert_abs_diff_eq!(got.y, x.y, epsilon = 1e-14);
    }

    #[test]
    fn plmap_invert_is_exact_at_knots() {
        let values = vec![0.0, 0.13, 0.21, 0.45, 0.7];
        let map = PlMap {
            x0: 0.0,
            dx: 0.25,
            values: &values,
        };
        for (k, &v) in values.iter().enumerate() {
            assert_abs_diff_eq!(map.invert(v), 0.25 * k as f64, epsilon = 1e-15);
        }
        // Roundtrip off-knot.
        for &x in &[0.1, 0.33, 0.6, 0.99, -0.2, 1.5] {
            assert_abs_diff_eq!(map.invert(map.eval(x)), x, epsilon = 1e-13);
        }
    }

    #[test]
    fn cond_of_rotation_is_one() {
        let th = 0.7f64;
        let r = Mat2::new(th.cos(), -th.sin(), th.sin(), th.cos());
        assert_abs_diff_eq!(r.cond(), 1.0, epsilon = 1e-12);
    }
}

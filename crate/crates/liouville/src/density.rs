//! Cell-centered grid densities, validation, sampling, and the LVG1 file format.

use crate::domain::{Domain, GridSpec};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sum, Vec2};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Nonnegative cell-centered density on a rectangular domain.
///
/// After [`validate_density`] the total mass `sum(values) * cell_area`
/// equals one to well below 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// Relative mass deviation below which renormalization is skipped, so that
/// validating twice is bit-for-bit identical to validating once.
const MASS_SKIP_TOL: f64 = 1e-12;

impl GridDensity {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<GridDensity> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values for a {} x {} grid, got {}",
                grid.len(),
                grid.nx,
                grid.ny,
                values.len()
            )));
        }
        Ok(GridDensity { grid, values })
    }

    /// Build from a closure evaluated at cell centers (not normalized).
    pub fn from_fn(grid: GridSpec, f: impl Fn(Vec2) -> f64) -> GridDensity {
        let values = grid.centers().iter().map(|&p| f(p)).collect();
        GridDensity { grid, values }
    }

    pub fn uniform(grid: GridSpec) -> GridDensity {
        let v = 1.0 / (grid.cell_area() * grid.len() as f64);
        GridDensity {
            values: vec![v; grid.len()],
            grid,
        }
    }

    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.cell_area()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Weighted point cloud supported on the cell centers.
    pub fn to_cloud(&self) -> WeightedCloud {
        let area = self.grid.cell_area();
        WeightedCloud {
            points: self.grid.centers(),
            weights: self.values.iter().map(|v| v * area).collect(),
        }
    }

    /// Aggregate cells into blocks until at most `max_points` remain,
    /// placing each block's mass at its mass centroid. Used to stay inside
    /// transport-solver budgets on fine grids.
    pub fn aggregate_cloud(&self, max_points: usize) -> WeightedCloud {
        let mut block = 1usize;
        while self.grid.nx.div_ceil(block) * self.grid.ny.div_ceil(block) > max_points {
            block *= 2;
        }
        if block == 1 {
            return self.to_cloud();
        }
        let bx = self.grid.nx.div_ceil(block);
        let by = self.grid.ny.div_ceil(block);
        let area = self.grid.cell_area();
        let mut points = Vec::with_capacity(bx * by);
        let mut weights = Vec::with_capacity(bx * by);
        for jy in 0..by {
            for jx in 0..bx {
                let mut mass = 0.0;
                let mut cx = 0.0;
                let mut cy = 0.0;
                for iy in (jy * block)..((jy + 1) * block).min(self.grid.ny) {
                    for ix in (jx * block)..((jx + 1) * block).min(self.grid.nx) {
                        let w = self.values[self.grid.index(ix, iy)] * area;
                        let p = self.grid.center(ix, iy);
                        mass += w;
                        cx += w * p.x;
                        cy += w * p.y;
                    }
                }
                if mass > 0.0 {
                    points.push(Vec2::new(cx / mass, cy / mass));
                    weights.push(mass);
                }
            }
        }
        WeightedCloud { points, weights }
    }
}

/// Validate and normalize a density.
///
/// Checks finiteness and nonnegativity, requires strict positivity when
/// `require_positive` is set, and renormalizes the total mass to one
/// (skipped when already within bit-stability tolerance, which makes the
/// operation idempotent).
pub fn validate_density(d: &GridDensity, require_positive: bool) -> Result<GridDensity> {
    for (i, &v) in d.values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        if v < 0.0 || (require_positive && v <= 0.0) {
            return Err(Error::NegativeDensity { index: i, value: v });
        }
    }
    let mass = d.mass();
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::ZeroMass { mass });
    }
    let mut out = d.clone();
    if (mass - 1.0).abs() > MASS_SKIP_TOL {
        for v in &mut out.values {
            *v /= mass;
        }
    }
    Ok(out)
}

/// Bilinear sample of a cell-centered density; exact at cell centers,
/// clamped to the boundary cell centers outside the domain.
pub fn sample_density(d: &GridDensity, p: Vec2) -> f64 {
    d.grid.interp(&d.values, p)
}

/// Weighted points in the plane (an empirical or aggregated measure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCloud {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl WeightedCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

// ---------------------------------------------------------------------------
// LVG1 file format
//
// Line 1: `LVG1 nx ny x0 y0 x1 y1`
// Then nx*ny whitespace-separated decimal values, row-major with the y index
// as the outer loop. Writers emit 17 significant digits.
// ---------------------------------------------------------------------------

pub fn write_lvg1_string(d: &GridDensity) -> String {
    let g = &d.grid;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "LVG1 {} {} {:.16e} {:.16e} {:.16e} {:.16e}",
        g.nx, g.ny, g.domain.lo.x, g.domain.lo.y, g.domain.hi.x, g.domain.hi.y
    );
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            if ix > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.16e}", d.values[g.index(ix, iy)]);
        }
        s.push('\n');
    }
    s
}

pub fn write_lvg1(d: &GridDensity, path: &Path) -> Result<()> {
    std::fs::write(path, write_lvg1_string(d))?;
    Ok(())
}

pub fn read_lvg1_string(text: &str, origin: &str) -> Result<GridDensity> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("LVG1") {
        return Err(parse_err(header_line + 1, "expected LVG1 magic".into()));
    }
    let mut next_field = |name: &str| -> Result<f64> {
        toks.next()
            .ok_or_else(|| parse_err(header_line + 1, format!("missing field {name}")))?
            .parse::<f64>()
            .map_err(|e| parse_err(header_line + 1, format!("bad {name}: {e}")))
    };
    let nx = next_field("nx")? as usize;
    let ny = next_field("ny")? as usize;
    let x0 = next_field("x0")?;
    let y0 = next_field("y0")?;
    let x1 = next_field("x1")?;
    let y1 = next_field("y1")?;
    let domain = Domain::new(Vec2::new(x0, y0), Vec2::new(x1, y1))
        .map_err(|e| parse_err(header_line + 1, e.to_string()))?;
    let grid = GridSpec::new(domain, nx, ny).map_err(|e| parse_err(header_line + 1, e.to_string()))?;

    let mut values = Vec::with_capacity(grid.len());
    for (lineno, line) in lines {
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<f64>()
                .map_err(|e| parse_err(lineno + 1, format!("bad value '{tok}': {e}")))?;
            values.push(v);
        }
    }
    if values.len() != grid.len() {
        return Err(parse_err(
            0,
            format!("expected {} values, found {}", grid.len(), values.len()),
        ));
    }
    GridDensity::new(grid, values)
}

pub fn read_lvg1(path: &Path) -> Result<GridDensity> {
    let text = std::fs::read_to_string(path)?;
    read_lvg1_string(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit_grid(n: usize) -> GridSpec {
        GridSpec::new(Domain::unit(), n, n).unwrap()
    }

    #[test]
    fn uniform_density_is_already_normalized() {
        let g = unit_grid(32);
        let d = GridDensity::new(g, vec![1.0; g.len()]).unwrap();
        let v = validate_density(&d, false).unwrap();
        assert_eq!(v.values, d.values);
        assert_abs_diff_eq!(v.mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_two_rescales_to_one() {
        let g = unit_grid(8);
        let d = GridDensity::new(g, vec![2.0; g.len()]).unwrap();
        let v = validate_density(&d, false).unwrap();
        assert!(v.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn negative_cell_is_rejected() {
        let g = unit_grid(4);
        let mut vals = vec![1.0; g.len()];
        vals[5] = -0.25;
        let d = GridDensity::new(g, vals).unwrap();
        match validate_density(&d, true) {
            Err(Error::NegativeDensity { index: 5, .. }) => {}
            other => panic!("expected NegativeDensity, got {other:?}"),
        }
        // Also rejected without the positivity flag: densities are nonnegative.
        assert!(validate_density(&d, false).is_err());
    }

    #[test]
    fn zero_cell_needs_positivity_flag() {
        let g = unit_grid(4);
        let mut vals = vec![1.0; g.len()];
        vals[3] = 0.0;
        let d = GridDensity::new(g, vals).unwrap();
        assert!(validate_density(&d, false).is_ok());
        assert!(validate_density(&d, true).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        let g = unit_grid(2);
        let d = GridDensity::new(g, vec![1.0, f64::NAN, 1.0, 1.0]).unwrap();
        assert!(matches!(
            validate_density(&d, false),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn validation_is_idempotent_bit_for_bit() {
        let g = unit_grid(16);
        let d = GridDensity::from_fn(g, |p| 0.3 + (3.0 * p.x).sin().powi(2) + 0.7 * p.y);
        let once = validate_density(&d, true).unwrap();
        let twice = validate_density(&once, true).unwrap();
        assert_eq!(once.values, twice.values);
    }

    #[test]
    fn mass_invariant_under_refinement_of_constant() {
        for n in [8, 16, 64] {
            let d = GridDensity::uniform(unit_grid(n));
            assert_abs_diff_eq!(d.mass(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_uniform_returns_constant() {
        let d = GridDensity::uniform(unit_grid(16));
        for &p in &[
            Vec2::new(0.03, 0.97),
            Vec2::new(0.5, 0.5),
            Vec2::new(-1.0, 2.0),
        ] {
            assert_abs_diff_eq!(sample_density(&d, p), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sampling_is_exact_at_cell_centers_and_bilinear_between() {
        let g = unit_grid(10);
        let d = GridDensity::from_fn(g, |p| p.x);
        let a = g.center(3, 4);
        let b = g.center(4, 4);
        assert_abs_diff_eq!(sample_density(&d, a), a.x, epsilon = 1e-15);
        let mid = Vec2::new(0.5 * (a.x + b.x), a.y);
        assert_abs_diff_eq!(
            sample_density(&d, mid),
            0.5 * (a.x + b.x),
            epsilon = 1e-15
        );
    }

    #[test]
    fn lvg1_roundtrip_is_exact() {
        let g = GridSpec::new(
            Domain::new(Vec2::new(-0.5, 0.25), Vec2::new(1.5, 2.0)).unwrap(),
            7,
            5,
        )
        .unwrap();
        let d = GridDensity::from_fn(g, |p| 1.0 + (13.0 * p.x * p.y).sin() * 0.3);
        let text = write_lvg1_string(&d);
        let back = read_lvg1_string(&text, "test").unwrap();
        assert_eq!(back.grid, d.grid);
        assert_eq!(back.values, d.values);
    }

    #[test]
    fn lvg1_parse_errors_carry_line_numbers() {
        assert!(read_lvg1_string("", "t").is_err());
        assert!(read_lvg1_string("LVG0 2 2 0 0 1 1\n1 1\n1 1\n", "t").is_err());
        let bad = "LVG1 2 2 0 0 1 1\n1 1\n1 oops\n";
        match read_lvg1_string(bad, "t") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error on line 3, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]
        #[test]
        fn prop_validate_normalizes_and_is_idempotent(
            n in 2usize..12,
            seed in 0u64..1000,
        ) {
            let g = unit_grid(n);
            let vals: Vec<f64> = (0..g.len())
                .map(|i| 0.01 + ((i as f64 + seed as f64) * 0.7).sin().abs())
                .collect();
            let d = GridDensity::new(g, vals).unwrap();
            let v1 = validate_density(&d, true).unwrap();
            prop_assert!((v1.mass() - 1.0).abs() < 1e-9);
            let v2 = validate_density(&v1, true).unwrap();
            prop_assert_eq!(v1.values, v2.values);
        }
    }
}

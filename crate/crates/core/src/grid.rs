//! Truncated uniform velocity meshes and distribution states.
//!
//! The model lives on the whole real line; the equilibrium decays like a
//! Gaussian for large `|v|`, so we truncate to `[-v_max, v_max]` with
//! zero-flux boundaries and take the truncation error as exponentially
//! small. Everything downstream assumes a *uniform cell-centered* mesh:
//! the scheme's exact energy identity relies on
//! `v_{i+1}² - v_i² = 2 dv v_{i+1/2}`, which holds only for uniform grids.
//!
//! Moments use the midpoint (cell-average) rule so that every discrete
//! conservation statement is exact in terms of the same cell values the
//! finite-volume scheme evolves.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform cell-centered velocity mesh on `[-v_max, v_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    v_max: f64,
    n_cells: usize,
    dv: f64,
    centers: Vec<f64>,
}

impl VelocityGrid {
    /// Build a uniform grid with cells centered at
    /// `v_i = -v_max + (i + 1/2) dv`, `dv = 2 v_max / n_cells`.
    pub fn new(v_max: f64, n_cells: usize) -> Result<Self> {
        if !(v_max > 0.0) || !v_max.is_finite() {
            return Err(Error::InvalidArgument {
                field: "v_max",
                message: format!("must be positive and finite, got {v_max}"),
            });
        }
        if n_cells < 4 {
            return Err(Error::InvalidArgument {
                field: "n_cells",
                message: format!("must be at least 4, got {n_cells}"),
            });
        }
        let dv = 2.0 * v_max / n_cells as f64;
        let centers = (0..n_cells)
            .map(|i| -v_max + (i as f64 + 0.5) * dv)
            .collect();
        Ok(Self {
            v_max,
            n_cells,
            dv,
            centers,
        })
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    /// Cell centers, ordered left to right.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn center(&self, i: usize) -> f64 {
        self.centers[i]
    }

    /// Coordinate of the interior face between cells `i` and `i + 1`,
    /// for `i` in `0..n_cells - 1`.
    pub fn face(&self, i: usize) -> f64 {
        debug_assert!(i + 1 < self.n_cells);
        -self.v_max + (i as f64 + 1.0) * self.dv
    }

    pub fn n_interior_faces(&self) -> usize {
        self.n_cells - 1
    }
}

/// Nonnegative cell values of `f` on a grid, plus the simulation time.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    grid: Arc<VelocityGrid>,
    values: Vec<f64>,
    time: f64,
}

impl DistributionState {
    /// Wrap cell values; rejects negative or non-finite entries.
    pub fn new(grid: Arc<VelocityGrid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidArgument {
                field: "values",
                message: format!(
                    "expected {} cell values, got {}",
                    grid.n_cells(),
                    values.len()
                ),
            });
        }
        if !(time >= 0.0) {
            return Err(Error::InvalidArgument {
                field: "time",
                message: format!("must be nonnegative, got {time}"),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "distribution values",
                    index: i,
                });
            }
            if v < 0.0 {
                return Err(Error::InvalidArgument {
                    field: "values",
                    message: format!("cell {i} is negative ({v})"),
                });
            }
        }
        Ok(Self { grid, values, time })
    }

    /// Evaluate `profile` at every cell center. Negative evaluations are an
    /// error, as for [`DistributionState::new`].
    pub fn from_profile<F: Fn(f64) -> f64>(
        grid: Arc<VelocityGrid>,
        profile: F,
        time: f64,
    ) -> Result<Self> {
        let values = grid.centers().iter().map(|&v| profile(v)).collect();
        Self::new(grid, values, time)
    }

    pub fn zero(grid: Arc<VelocityGrid>) -> Self {
        let n = grid.n_cells();
        Self {
            grid,
            values: vec![0.0; n],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<VelocityGrid> {
        Arc::clone(&self.grid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), self.grid.n_cells());
        Self {
            grid: Arc::clone(&self.grid),
            values,
            time,
        }
    }

    /// Midpoint-rule integral `∫ w(v) f dv ≈ (Σ_i w(v_i) f_i) dv`.
    ///
    /// The single multiplication by `dv` happens after the sum so that
    /// moment sums and the scheme's conserved sums agree bit for bit.
    pub fn integrate<F: Fn(f64) -> f64>(&self, weight: F) -> f64 {
        let mut sum = 0.0;
        for (&v, &f) in self.grid.centers().iter().zip(&self.values) {
            sum += weight(v) * f;
        }
        sum * self.grid.dv()
    }

    /// `∫ f dv` without a weight closure; bit-identical to the scheme's mass.
    pub fn mass(&self) -> f64 {
        let mut sum = 0.0;
        for &f in &self.values {
            sum += f;
        }
        sum * self.grid.dv()
    }

    /// `∫ v² f dv` with the per-cell product order shared by all modules.
    pub fn energy(&self) -> f64 {
        let mut sum = 0.0;
        for (&v, &f) in self.grid.centers().iter().zip(&self.values) {
            sum += v * v * f;
        }
        sum * self.grid.dv()
    }

    /// `L¹` distance to another state on the same grid.
    pub fn l1_distance(&self, other: &DistributionState) -> f64 {
        debug_assert_eq!(self.grid.n_cells(), other.grid.n_cells());
        let mut sum = 0.0;
        for (&a, &b) in self.values.iter().zip(&other.values) {
            sum += (a - b).abs();
        }
        sum * self.grid.dv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use std::f64::consts::PI;

    fn grid(v_max: f64, n: usize) -> Arc<VelocityGrid> {
        Arc::new(VelocityGrid::new(v_max, n).unwrap())
    }

    #[test]
    fn uniform_grid_basic_layout() {
        let g = VelocityGrid::new(4.0, 8).unwrap();
        assert_eq!(g.dv(), 1.0);
        let want = [-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5];
        for (c, w) in g.centers().iter().zip(want.iter()) {
            assert_eq!(c, w);
        }
        assert_eq!(g.face(0), -3.0);
        assert_eq!(g.face(6), 3.0);

        let g = VelocityGrid::new(1.0, 4).unwrap();
        assert_eq!(g.dv(), 0.5);
        let want = [-0.75, -0.25, 0.25, 0.75];
        for (c, w) in g.centers().iter().zip(want.iter()) {
            assert_eq!(c, w);
        }
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        let err = VelocityGrid::new(2.0, 0).unwrap_err();
        assert!(err.to_string().contains("n_cells"));
        let err = VelocityGrid::new(-1.0, 16).unwrap_err();
        assert!(err.to_string().contains("v_max"));
        assert!(VelocityGrid::new(0.0, 16).is_err());
        assert!(VelocityGrid::new(2.0, 3).is_err());
    }

    #[test]
    fn centers_are_symmetric_and_spacing_consistent() {
        for &(v_max, n) in &[(8.0, 400), (5.0, 37), (1.25, 4), (16.0, 641)] {
            let g = VelocityGrid::new(v_max, n).unwrap();
            let c = g.centers();
            for i in 0..n {
                assert!(
                    (c[i] + c[n - 1 - i]).abs() <= 4.0 * f64::EPSILON * v_max,
                    "asymmetry at {i} for n={n}"
                );
            }
            let ulp = f64::EPSILON * 2.0 * v_max;
            assert!((g.dv() * n as f64 - 2.0 * v_max).abs() <= 4.0 * ulp);
        }
    }

    #[test]
    fn integrate_constant_state() {
        let g = grid(4.0, 8); // dv = 1 exactly
        let ones = DistributionState::new(Arc::clone(&g), vec![1.0; 8], 0.0).unwrap();
        assert_eq!(ones.integrate(|_| 1.0), 8.0);
        // odd weight on a symmetric grid cancels to roundoff
        let odd = ones.integrate(|v| v);
        let scale = ones.integrate(|v| v.abs());
        assert!(odd.abs() <= 1e-12 * scale);
    }

    #[test]
    fn integrate_gaussian_matches_oracle() {
        let oracle = quadrature::integrate(|v: f64| (-v * v).exp(), -8.0, 8.0, 1e-14, 0.0).unwrap();
        for &n in &[200usize, 400, 800] {
            let g = grid(8.0, n);
            let state =
                DistributionState::from_profile(Arc::clone(&g), |v| (-v * v).exp(), 0.0).unwrap();
            let got = state.integrate(|_| 1.0);
            assert!(
                (got - oracle).abs() < 1e-10,
                "n={n}: {got} vs oracle {oracle}"
            );
            assert!((got - PI.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_is_second_order_with_boundary_terms() {
        // For an integrand whose derivative does not vanish at the cut the
        // midpoint error is O(dv²); compare against the truncated oracle.
        let oracle = quadrature::integrate(|v: f64| v.cos(), -2.0, 2.0, 1e-14, 0.0).unwrap();
        let err = |n: usize| {
            let g = grid(2.0, n);
            let s = DistributionState::new(Arc::clone(&g), vec![1.0; n], 0.0).unwrap();
            (s.integrate(|v| v.cos()) - oracle).abs()
        };
        let (e1, e2, e4) = (err(50), err(100), err(200));
        let r1 = e1 / e2;
        let r2 = e2 / e4;
        assert!((3.2..=4.8).contains(&r1), "ratio {r1}");
        assert!((3.2..=4.8).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn integrate_is_linear() {
        let g = grid(3.0, 48);
        let f = DistributionState::from_profile(Arc::clone(&g), |v| (-v * v).exp(), 0.0).unwrap();
        let h =
            DistributionState::from_profile(Arc::clone(&g), |v| 1.0 / (1.0 + v * v), 0.0).unwrap();
        let (a, b) = (2.5, 0.75);
        let combo: Vec<f64> = f
            .values()
            .iter()
            .zip(h.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        let combo = DistributionState::new(Arc::clone(&g), combo, 0.0).unwrap();
        let w = |v: f64| 1.0 + v * v;
        let lhs = combo.integrate(w);
        let rhs = a * f.integrate(w) + b * h.integrate(w);
        assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(1.0));
    }

    #[test]
    fn state_rejects_bad_values() {
        let g = grid(2.0, 4);
        assert!(DistributionState::new(Arc::clone(&g), vec![0.0; 3], 0.0).is_err());
        assert!(DistributionState::new(Arc::clone(&g), vec![1.0, -0.1, 0.0, 0.0], 0.0).is_err());
        let err =
            DistributionState::new(Arc::clone(&g), vec![1.0, f64::NAN, 0.0, 0.0], 0.0).unwrap_err();
        match err {
            Error::NonFinite { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(DistributionState::new(Arc::clone(&g), vec![0.0; 4], -1.0).is_err());
    }

    #[test]
    fn zero_state_integrates_to_zero() {
        let g = grid(6.0, 64);
        let z = DistributionState::zero(g);
        assert_eq!(z.integrate(|v| v * v + 1.0), 0.0);
        assert_eq!(z.mass(), 0.0);
        assert_eq!(z.energy(), 0.0);
    }
}

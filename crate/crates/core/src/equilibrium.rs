//! Bose distribution, polylogarithm moments and the `(m, e) → (λ₁, z)` fit.
//!
//! The equilibrium is `f∞(v) = 1/(exp(λ₁ v² - λ₂) - 1)` with `λ₁ > 0` and
//! fugacity `z = e^{λ₂} ∈ (0, 1)`. Expanding the geometric series and
//! integrating termwise gives the closed-form moments
//!
//! ```text
//!     m = sqrt(π/λ₁) Li_{1/2}(z),      e = (sqrt(π)/2) λ₁^{-3/2} Li_{3/2}(z),
//! ```
//!
//! so `m³/e = 2π Li_{1/2}(z)³ / Li_{3/2}(z)` depends on `z` alone. That
//! ratio is continuous, strictly increasing, tends to `0` at `z → 0` and to
//! `∞` at `z → 1` (no condensation threshold in one dimension), which makes
//! the two-parameter fit a bracketed one-dimensional root-find.
//!
//! Parametrizing by the fugacity rather than `λ₂` keeps the admissible set
//! an open unit interval and avoids `exp` overflow.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DistributionState, VelocityGrid};
use crate::quadrature;

/// Parameters `(λ₁, z)` of the Bose distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseParameters {
    lambda1: f64,
    fugacity: f64,
}

impl BoseParameters {
    pub fn new(lambda1: f64, fugacity: f64) -> Result<Self> {
        if !(lambda1 > 0.0) || !lambda1.is_finite() {
            return Err(Error::InvalidArgument {
                field: "lambda1",
                message: format!("must be positive and finite, got {lambda1}"),
            });
        }
        if !(fugacity > 0.0 && fugacity < 1.0) {
            return Err(Error::InvalidArgument {
                field: "fugacity",
                message: format!("must lie strictly inside (0, 1), got {fugacity}"),
            });
        }
        Ok(Self { lambda1, fugacity })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn fugacity(&self) -> f64 {
        self.fugacity
    }

    /// `λ₂ = log z < 0`.
    pub fn lambda2(&self) -> f64 {
        self.fugacity.ln()
    }
}

/// Occupation number `1/(e^x / z - 1)` for `x ≥ 0`, `z ∈ (0, 1)`.
///
/// Two regimes keep it accurate everywhere: in the tail (`z e^{-x} < 1/2`)
/// the direct form `t/(1-t)` is exact to a couple of ulps, including a clean
/// underflow to zero; near the peak, `1 - z e^{-x}` would cancel
/// catastrophically, so it is assembled as `(1-z) + z (1 - e^{-x})` via
/// `exp_m1`, where both contributions are nonnegative.
#[inline]
pub(crate) fn occupation(z: f64, x: f64) -> f64 {
    let t = z * (-x).exp();
    if t < 0.5 {
        t / (1.0 - t)
    } else {
        let em = (-x).exp_m1(); // in (-1/2, 0] here
        z * (1.0 + em) / ((1.0 - z) - z * em)
    }
}

/// Evaluate the Bose distribution at velocity `v`.
///
/// Algebraically `z e^{-λ₁ v²} / (1 - z e^{-λ₁ v²})`; evaluated through the
/// numerically stable [`occupation`] split so that deep tails underflow to a
/// clean zero and near-degenerate fugacities do not lose precision.
pub fn bose_eval(p: &BoseParameters, v: f64) -> f64 {
    occupation(p.fugacity, p.lambda1 * v * v)
}

/// Sample the Bose distribution at every cell center of `grid`.
pub fn sample(p: &BoseParameters, grid: Arc<VelocityGrid>) -> DistributionState {
    let values = grid.centers().iter().map(|&v| bose_eval(p, v)).collect();
    // bose_eval is nonnegative and finite for valid parameters
    DistributionState::new(grid, values, 0.0).expect("Bose sample is a valid state")
}

/// Fugacity threshold beyond which the series for `Li_{1/2}` converges too
/// slowly and the defining integral is integrated adaptively instead.
const SERIES_LIMIT: f64 = 0.99;
const MAX_SERIES_TERMS: usize = 200_000;

/// Polylogarithm `Li_s(z) = Σ_{k≥1} z^k / k^s` for `s ∈ {1/2, 3/2}`,
/// `z ∈ (0, 1)`, to relative tolerance `tol`.
///
/// For `z > 0.99` the series is abandoned in favour of adaptive quadrature
/// of the defining integrals
/// `Li_{1/2}(z) = (1/sqrt(π)) ∫ z e^{-v²} / (1 - z e^{-v²}) dv` and
/// `Li_{3/2}(z) = (2/sqrt(π)) ∫ v² z e^{-v²} / (1 - z e^{-v²}) dv`.
pub fn polylog(s: f64, z: f64, tol: f64) -> Result<f64> {
    if s != 0.5 && s != 1.5 {
        return Err(Error::InvalidArgument {
            field: "s",
            message: format!("only orders 1/2 and 3/2 are supported, got {s}"),
        });
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidArgument {
            field: "z",
            message: format!("must lie strictly inside (0, 1), got {z}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument {
            field: "tol",
            message: format!("must be positive, got {tol}"),
        });
    }
    if z > SERIES_LIMIT {
        return polylog_by_quadrature(s, z, tol);
    }
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 1..=MAX_SERIES_TERMS {
        zk *= z;
        let term = zk / (k as f64).powf(s);
        sum += term;
        // geometric tail bound: remaining < term * z / (1 - z)
        if term * z / (1.0 - z) < tol * sum {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        what: "polylogarithm series",
        iterations: MAX_SERIES_TERMS,
    })
}

/// Quadrature route for the polylogarithms; also serves as the independent
/// oracle the series is validated against.
pub fn polylog_by_quadrature(s: f64, z: f64, tol: f64) -> Result<f64> {
    if s != 0.5 && s != 1.5 {
        return Err(Error::InvalidArgument {
            field: "s",
            message: format!("only orders 1/2 and 3/2 are supported, got {s}"),
        });
    }
    // integrand tail ~ z e^{-v²}; v_cut = 9 puts it below 1e-35
    let v_cut = 9.0;
    let integrand = |v: f64| {
        let base = occupation(z, v * v);
        if s == 0.5 {
            base
        } else {
            2.0 * v * v * base
        }
    };
    let integral = quadrature::integrate(integrand, 0.0, v_cut, tol * 0.1, 0.0)?;
    Ok(2.0 * integral / PI.sqrt())
}

/// Mass and energy of the Bose distribution with parameters `p`.
pub fn bose_moments(p: &BoseParameters) -> Result<(f64, f64)> {
    let tol = 1e-13;
    let li_half = polylog(0.5, p.fugacity, tol)?;
    let li_three_halves = polylog(1.5, p.fugacity, tol)?;
    let m = (PI / p.lambda1).sqrt() * li_half;
    let e = 0.5 * PI.sqrt() * p.lambda1.powf(-1.5) * li_three_halves;
    Ok((m, e))
}

/// `m³/e` as a function of the fugacity alone.
fn moment_ratio(z: f64, tol: f64) -> Result<f64> {
    let li_half = polylog(0.5, z, tol)?;
    let li_three_halves = polylog(1.5, z, tol)?;
    Ok(2.0 * PI * li_half.powi(3) / li_three_halves)
}

const FIT_MAX_BISECTIONS: usize = 200;

/// Fit Bose parameters to a prescribed mass and energy.
///
/// Solves `2π Li_{1/2}(z)³ / Li_{3/2}(z) = m³/e` for `z` by bracketed
/// bisection (the ratio is strictly increasing with full range `(0, ∞)`, so
/// the root exists and is unique), then recovers
/// `λ₁ = π Li_{1/2}(z)² / m²`.
pub fn fit_bose(m: f64, e: f64, tol: f64) -> Result<BoseParameters> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain {
            context: "fit_bose",
            message: format!("mass must be positive and finite, got {m}"),
        });
    }
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Domain {
            context: "fit_bose",
            message: format!("energy must be positive and finite, got {e}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument {
            field: "tol",
            message: format!("must be positive, got {tol}"),
        });
    }
    let target = m * m * m / e;
    let li_tol = (tol * 1e-2).min(1e-12);

    let mut lo = 1e-14;
    let mut hi = 1.0 - 1e-14;
    if moment_ratio(lo, li_tol)? > target {
        return Err(Error::Domain {
            context: "fit_bose",
            message: format!("m³/e = {target:.3e} is below the representable fugacity range"),
        });
    }
    if moment_ratio(hi, li_tol)? < target {
        return Err(Error::Domain {
            context: "fit_bose",
            message: format!("m³/e = {target:.3e} is above the representable fugacity range"),
        });
    }

    let mut z = 0.5 * (lo + hi);
    for _ in 0..FIT_MAX_BISECTIONS {
        let r = moment_ratio(z, li_tol)?;
        if r < target {
            lo = z;
        } else {
            hi = z;
        }
        let next = 0.5 * (lo + hi);
        if next == z {
            break; // bracket collapsed to adjacent floats
        }
        z = next;
    }

    let li_half = polylog(0.5, z, li_tol)?;
    let lambda1 = PI * li_half * li_half / (m * m);
    let fitted = BoseParameters::new(lambda1, z)?;

    let (m_fit, e_fit) = bose_moments(&fitted)?;
    if (m_fit - m).abs() > tol * m || (e_fit - e).abs() > tol * e {
        return Err(Error::Convergence {
            what: "Bose parameter fit",
            iterations: FIT_MAX_BISECTIONS,
        });
    }
    Ok(fitted)
}

/// Relative residual of the identity `λ₁ = B_{f∞} / (2 A_{f∞})`, with both
/// coefficients computed by adaptive quadrature (the oracle route, entirely
/// independent of the polylogarithm series).
pub fn lambda1_identity_residual(p: &BoseParameters) -> Result<f64> {
    // integrands decay like e^{-λ₁ v²}; cut where the exponent reaches ~746
    let v_cut = (746.0 / p.lambda1).sqrt().min(1e6);
    let f = |v: f64| bose_eval(p, v);
    let b_inf = 2.0 * quadrature::integrate(f, 0.0, v_cut, 1e-12, 0.0)?;
    let a_integrand = |v: f64| {
        let f = bose_eval(p, v);
        v * v * f * (1.0 + f)
    };
    let a_inf = 2.0 * quadrature::integrate(a_integrand, 0.0, v_cut, 1e-12, 0.0)?;
    Ok((p.lambda1 - b_inf / (2.0 * a_inf)).abs() / p.lambda1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bose_eval_known_values() {
        let p = BoseParameters::new(1.0, 0.5).unwrap();
        assert!((bose_eval(&p, 0.0) - 1.0).abs() < 1e-15);

        let p = BoseParameters::new(2.0, 0.3).unwrap();
        let want = 0.3 / (2.0f64.exp() - 0.3);
        assert!((bose_eval(&p, 1.0) - want).abs() < 1e-15 * want);
    }

    #[test]
    fn bose_eval_tail_is_clean_zero() {
        let p = BoseParameters::new(1.0, 0.999).unwrap();
        let f = bose_eval(&p, 50.0);
        assert!(f >= 0.0 && f < 1e-300 && !f.is_nan());
    }

    #[test]
    fn bose_eval_even_and_decreasing() {
        let p = BoseParameters::new(0.7, 0.9).unwrap();
        let mut prev = bose_eval(&p, 0.0);
        for k in 1..50 {
            let v = k as f64 * 0.25;
            let f = bose_eval(&p, v);
            assert_eq!(f, bose_eval(&p, -v));
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn sample_is_even_on_symmetric_grid() {
        let grid = Arc::new(VelocityGrid::new(6.0, 64).unwrap());
        let p = BoseParameters::new(1.3, 0.4).unwrap();
        let s = sample(&p, Arc::clone(&grid));
        let v = s.values();
        for i in 0..v.len() {
            let j = v.len() - 1 - i;
            assert!((v[i] - v[j]).abs() <= 1e-15 * v[i].max(v[j]));
        }
        // coarse grid: four explicit evaluations
        let coarse = Arc::new(VelocityGrid::new(1.0, 4).unwrap());
        let p = BoseParameters::new(1.0, 0.5).unwrap();
        let s = sample(&p, Arc::clone(&coarse));
        for (i, &c) in coarse.centers().iter().enumerate() {
            assert_eq!(s.values()[i], bose_eval(&p, c));
        }
    }

    #[test]
    fn polylog_leading_term() {
        let z = 1e-8;
        let li = polylog(0.5, z, 1e-12).unwrap();
        assert!((li / z - 1.0).abs() < 1e-7);
    }

    #[test]
    fn polylog_ordering() {
        for k in 1..20 {
            let z = k as f64 * 0.05;
            let a = polylog(1.5, z, 1e-12).unwrap();
            let b = polylog(0.5, z, 1e-12).unwrap();
            assert!(a < b, "Li_3/2({z}) = {a} should be < Li_1/2({z}) = {b}");
        }
    }

    #[test]
    fn polylog_series_matches_quadrature_oracle() {
        for &z in &[0.05, 0.3, 0.5, 0.8, 0.95, 0.99] {
            for &s in &[0.5, 1.5] {
                let series = polylog(s, z, 1e-13).unwrap();
                let oracle = polylog_by_quadrature(s, z, 1e-12).unwrap();
                assert!(
                    ((series - oracle) / oracle).abs() < 1e-10,
                    "s={s}, z={z}: series {series} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn polylog_quadrature_fallback_near_one() {
        // beyond the series limit the quadrature route must still work
        let li = polylog(0.5, 0.9999, 1e-10).unwrap();
        // Li_{1/2}(z) ~ sqrt(π/(1-z)) + ζ(1/2) as z → 1
        let approx = (PI / 1e-4).sqrt() - 1.4603545088095868;
        assert!(
            ((li - approx) / approx).abs() < 1e-3,
            "got {li}, asymptotic {approx}"
        );
    }

    #[test]
    fn polylog_rejects_bad_arguments() {
        assert!(polylog(1.0, 0.5, 1e-10).is_err());
        assert!(polylog(0.5, 0.0, 1e-10).is_err());
        assert!(polylog(0.5, 1.0, 1e-10).is_err());
        assert!(polylog(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn bose_moments_scaling_law() {
        let p1 = BoseParameters::new(0.7, 0.45).unwrap();
        let p4 = BoseParameters::new(2.8, 0.45).unwrap();
        let (m1, e1) = bose_moments(&p1).unwrap();
        let (m4, e4) = bose_moments(&p4).unwrap();
        assert!((m4 / m1 - 0.5).abs() < 1e-12);
        assert!((e4 / e1 - 0.125).abs() < 1e-12);
    }

    #[test]
    fn bose_moments_dilute_limit() {
        let p = BoseParameters::new(1.0, 1e-4).unwrap();
        let (m, e) = bose_moments(&p).unwrap();
        let m_leading = PI.sqrt() * 1e-4;
        let e_leading = 0.5 * PI.sqrt() * 1e-4;
        assert!((m / m_leading - 1.0).abs() < 1e-4);
        assert!((e / e_leading - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bose_moments_match_direct_quadrature() {
        let p = BoseParameters::new(1.0, 0.5).unwrap();
        let (m, e) = bose_moments(&p).unwrap();
        let m_q = 2.0 * quadrature::integrate(|v| bose_eval(&p, v), 0.0, 12.0, 1e-13, 0.0).unwrap();
        let e_q = 2.0
            * quadrature::integrate(|v| v * v * bose_eval(&p, v), 0.0, 12.0, 1e-13, 0.0).unwrap();
        assert!(((m - m_q) / m_q).abs() < 1e-10, "m={m} vs quadrature {m_q}");
        assert!(((e - e_q) / e_q).abs() < 1e-10, "e={e} vs quadrature {e_q}");
    }

    #[test]
    fn fit_round_trips() {
        let p0 = BoseParameters::new(1.7, 0.42).unwrap();
        let (m, e) = bose_moments(&p0).unwrap();
        let p = fit_bose(m, e, 1e-10).unwrap();
        assert!((p.lambda1() - 1.7).abs() < 1e-8 * 1.7);
        assert!((p.fugacity() - 0.42).abs() < 1e-8 * 0.42);
    }

    #[test]
    fn fit_classical_limit() {
        // m³/e = 4e-4: deep in the Maxwellian regime where λ₁ → m/(2e)
        let (m, e) = (1.0, 2500.0);
        let p = fit_bose(m, e, 1e-10).unwrap();
        assert!((2.0 * e * p.lambda1() / m - 1.0).abs() < 0.01);
    }

    #[test]
    fn fit_monotone_in_ratio() {
        let p_small = fit_bose(1.0, 1.0, 1e-10).unwrap();
        let p_large = fit_bose(1.0, 0.1, 1e-10).unwrap(); // m³/e = 10
        assert!(p_large.fugacity() > p_small.fugacity());
    }

    #[test]
    fn fit_rejects_nonpositive_inputs() {
        assert!(fit_bose(0.0, 1.0, 1e-10).is_err());
        assert!(fit_bose(1.0, -1.0, 1e-10).is_err());
    }

    #[test]
    fn moment_ratio_strictly_increasing() {
        let mut prev = 0.0;
        for k in 1..100 {
            let z = k as f64 / 100.0;
            let r = moment_ratio(z, 1e-12).unwrap();
            assert!(r > prev, "ratio not increasing at z = {z}");
            prev = r;
        }
    }

    #[test]
    fn lambda1_identity_holds() {
        for &(l1, z) in &[(1.0, 0.5), (10.0, 0.1), (0.3, 0.9)] {
            let p = BoseParameters::new(l1, z).unwrap();
            let r = lambda1_identity_residual(&p).unwrap();
            assert!(r < 1e-8, "residual {r} for λ₁={l1}, z={z}");
        }
        // scaling invariance: residual unchanged under λ₁ → 4 λ₁ at fixed z
        let r1 = lambda1_identity_residual(&BoseParameters::new(0.5, 0.6).unwrap()).unwrap();
        let r4 = lambda1_identity_residual(&BoseParameters::new(2.0, 0.6).unwrap()).unwrap();
        assert!(r1 < 1e-8 && r4 < 1e-8);
    }

    #[test]
    fn parameters_reject_invalid() {
        assert!(BoseParameters::new(0.0, 0.5).is_err());
        assert!(BoseParameters::new(-1.0, 0.5).is_err());
        assert!(BoseParameters::new(1.0, 0.0).is_err());
        assert!(BoseParameters::new(1.0, 1.0).is_err());
        assert!(BoseParameters::new(1.0, 1.5).is_err());
    }

    #[test]
    fn lambda2_is_log_fugacity() {
        let p = BoseParameters::new(1.0, 0.25).unwrap();
        assert!((p.lambda2() - 0.25f64.ln()).abs() < 1e-15);
    }
}

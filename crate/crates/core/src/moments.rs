//! Conserved quantities, nonlocal coefficients and norms of one state.
//!
//! `A_f` here is the cell-based sum `Σ v_i² f_i (1 + f_i) dv`, matching the
//! defining integral verbatim; the scheme internally uses a face-based
//! variant to make its energy identity exact. Both agree to `O(dv²)` and
//! both are reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DistributionState;

/// Moments and norms of a single distribution state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    /// Mass `m = ∫ f dv`.
    pub m: f64,
    /// Kinetic energy `e = ∫ v² f dv`.
    pub e: f64,
    /// `A_f = ∫ v² f (1 + f) dv` (cell-based diagnostic form).
    pub coeff_a: f64,
    /// `B_f = ∫ f dv`; identical sum to `m`.
    pub coeff_b: f64,
    /// `‖f‖_{L¹}` (equals `m` for nonnegative states).
    pub l1: f64,
    /// `‖f‖²_{L²}`.
    pub l2_sq: f64,
    /// `‖f‖³_{L³}`.
    pub l3_cubed: f64,
    /// `‖<v> f‖²_{L²}` with `<v> = (1 + v²)^{1/2}`.
    pub weighted_l2_sq: f64,
}

/// Compute every moment of `state` with the shared midpoint rule.
pub fn compute_moments(state: &DistributionState) -> Result<MomentSet> {
    let dv = state.grid().dv();
    let centers = state.grid().centers();
    let (mut m, mut e, mut a, mut l2, mut l3, mut w2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, (&v, &f)) in centers.iter().zip(state.values()).enumerate() {
        let v2 = v * v;
        let term_a = v2 * f * (1.0 + f);
        m += f;
        e += v2 * f;
        a += term_a;
        l2 += f * f;
        l3 += f * f * f;
        w2 += (1.0 + v2) * f * f;
        if !(term_a.is_finite() && f.is_finite()) {
            return Err(Error::NonFinite {
                context: "moment accumulation",
                index: i,
            });
        }
    }
    let ms = MomentSet {
        m: m * dv,
        e: e * dv,
        coeff_a: a * dv,
        coeff_b: m * dv,
        l1: m * dv,
        l2_sq: l2 * dv,
        l3_cubed: l3 * dv,
        weighted_l2_sq: w2 * dv,
    };
    if !(ms.coeff_a.is_finite() && ms.weighted_l2_sq.is_finite()) {
        return Err(Error::NonFinite {
            context: "moment totals",
            index: 0,
        });
    }
    Ok(ms)
}

/// Gap of the parameter-free interpolation bound
/// `‖f‖²_{L²} ≥ (m / 2^{7/2}) (m³/e)^{1/2}`; nonnegative certifies it.
///
/// The zero state degenerates to `0 ≤ 0` and returns `0` by convention.
pub fn l2_lower_bound_gap(ms: &MomentSet) -> Result<f64> {
    if ms.m == 0.0 {
        return Ok(0.0);
    }
    if ms.e <= 0.0 {
        return Err(Error::Domain {
            context: "l2_lower_bound_gap",
            message: format!("requires positive energy, got e = {} with m = {}", ms.e, ms.m),
        });
    }
    let bound = ms.m / 2.0f64.powf(3.5) * (ms.m.powi(3) / ms.e).sqrt();
    Ok(ms.l2_sq - bound)
}

/// Informational check of the smallness hypotheses `‖f₀‖²_{L²} < m/2` and
/// `m³/e < threshold`; the solver runs regardless of the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub l2_condition: bool,
    pub ratio_condition: bool,
    pub m3_over_e: f64,
}

pub fn smallness_report(ms: &MomentSet, threshold: f64) -> Result<SmallnessReport> {
    if !(ms.m > 0.0 && ms.e > 0.0) {
        return Err(Error::Domain {
            context: "smallness_report",
            message: format!("requires m > 0 and e > 0, got m = {}, e = {}", ms.m, ms.e),
        });
    }
    let m3_over_e = ms.m.powi(3) / ms.e;
    Ok(SmallnessReport {
        l2_condition: ms.l2_sq < ms.m / 2.0,
        ratio_condition: m3_over_e < threshold,
        m3_over_e,
    })
}

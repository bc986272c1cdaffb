//! Runtime monitors for the model's inequalities and the exponential
//! decay-rate estimator.
//!
//! Monitors work on recorded outputs only (centered differences on record
//! times), never on controller internals, so they cannot perturb a run and
//! re-running them on the same series is bit-reproducible.
//!
//! The conservation/entropy monitor is *hard*: its checks are exact
//! structural properties of the scheme and gate the CLI exit status. The
//! `d/dt D ≤ (A'/A - B) D` check is *soft*: it is derived for exact
//! solutions under smallness hypotheses that most experiments violate by
//! design, so it ships with slack and is reported but not gating.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyReport;
use crate::error::{Error, Result};
use crate::moments::{l2_lower_bound_gap, MomentSet};

/// One diagnostics row of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub time: f64,
    pub moments: MomentSet,
    pub entropy: EntropyReport,
    /// Face-based coefficient used inside the scheme's flux; agrees with
    /// `moments.coeff_a` to `O(dv²)`.
    pub a_face: f64,
    /// `‖f - f∞‖_{L¹}` against the fitted equilibrium.
    pub l1_dist_eq: f64,
    /// Last accepted step size before this record.
    pub dt_used: f64,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
}

/// Quantity whose exponential decay rate is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayQuantity {
    RelativeEntropy,
    EntropyProduction,
    L1Distance,
}

impl DecayQuantity {
    fn extract(&self, r: &TimeSeriesRecord) -> f64 {
        match self {
            DecayQuantity::RelativeEntropy => r.entropy.h_rel,
            DecayQuantity::EntropyProduction => r.entropy.d,
            DecayQuantity::L1Distance => r.l1_dist_eq,
        }
    }
}

/// Least-squares exponential rate `q(t) ≈ C e^{-alpha_hat t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub alpha_hat: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    pub quantity: DecayQuantity,
}

/// Ordinary least squares of `log q` against `t` over `window`.
///
/// Values below `10 ε q(t₀)` (the quantity's value at the first record of
/// the series) are excluded as roundoff-floor noise. A constant series
/// returns `alpha_hat = 0` with the zero-variance convention `r² = 0`.
pub fn fit_decay_rate(
    series: &[TimeSeriesRecord],
    quantity: DecayQuantity,
    window: (f64, f64),
) -> Result<DecayFit> {
    if window.0 >= window.1 {
        return Err(Error::InvalidArgument {
            field: "window",
            message: format!("need t_lo < t_hi, got ({}, {})", window.0, window.1),
        });
    }
    let first = series.first().ok_or_else(|| {
        Error::InsufficientData("decay fit needs a nonempty series".into())
    })?;
    let initial = quantity.extract(first);
    if !(initial > 0.0) {
        return Err(Error::Domain {
            context: "fit_decay_rate",
            message: format!(
                "quantity is nonpositive ({initial}) at t = {}",
                first.time
            ),
        });
    }
    let floor = 10.0 * f64::EPSILON * initial;

    let mut points = Vec::new();
    for r in series {
        if r.time < window.0 || r.time > window.1 {
            continue;
        }
        let q = quantity.extract(r);
        if q <= 0.0 {
            return Err(Error::Domain {
                context: "fit_decay_rate",
                message: format!("quantity is nonpositive ({q}) at t = {}", r.time),
            });
        }
        if q < floor {
            continue;
        }
        points.push((r.time, q.ln()));
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 3 usable points in [{}, {}], found {}",
            window.0,
            window.1,
            points.len()
        )));
    }

    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(t, y) in &points {
        sxx += (t - mean_t) * (t - mean_t);
        sxy += (t - mean_t) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "decay fit times are all identical".into(),
        ));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        0.0 // zero-variance convention: a constant series carries no rate
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(DecayFit {
        alpha_hat: -slope,
        r_squared,
        window,
        n_points: points.len(),
        quantity,
    })
}

/// Tolerances for the monitor suite; defaults match the scheme's design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorTolerances {
    /// `|m - m₀| ≤ mass_rel m₀`.
    pub mass_rel: f64,
    /// `|e - e₀| ≤ energy_rel e₀`.
    pub energy_rel: f64,
    /// Record-to-record entropy increases up to `slack·|H|` are roundoff.
    pub entropy_slack_rel: f64,
    /// `ckp_lhs ≤ ckp_rhs (1 + ckp_rel)`.
    pub ckp_rel: f64,
    /// `l2_lower_bound_gap ≥ -l2_gap_floor`.
    pub l2_gap_floor: f64,
    /// Absolute slack of the `A'/A ≤ 2‖f‖²` check is
    /// `prop_a_tol_abs_scale / Δt_record`.
    pub prop_a_tol_abs_scale: f64,
    pub prop_a_tol_rel: f64,
    /// Relative slack (in units of `B`) of the soft `d/dt D` check.
    pub d_slack_rel: f64,
}

impl Default for MonitorTolerances {
    fn default() -> Self {
        Self {
            mass_rel: 1e-10,
            energy_rel: 1e-9,
            // per accepted step the controller tolerates 1e-13 |H|; records
            // are up to ~1e3 steps apart, so the cumulative roundoff budget
            // between records is 1e-10 |H|
            entropy_slack_rel: 1e-10,
            ckp_rel: 1e-10,
            l2_gap_floor: 1e-12,
            prop_a_tol_abs_scale: 1e-8,
            prop_a_tol_rel: 1e-3,
            d_slack_rel: 0.05,
        }
    }
}

/// A flagged record of a monitored inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Check `A'/A ≤ 2 ‖f‖²_{L²}` on recorded times; `A'` by centered
/// differences. Returns the flagged records (empty list = clean).
pub fn monitor_prop_a(series: &[TimeSeriesRecord], tol: &MonitorTolerances) -> Vec<Violation> {
    let mut violations = Vec::new();
    if series.len() < 3 {
        return violations;
    }
    let dt_scale = median_spacing(series);
    let tol_abs = tol.prop_a_tol_abs_scale / dt_scale;
    for k in 1..series.len() - 1 {
        let (prev, cur, next) = (&series[k - 1], &series[k], &series[k + 1]);
        let dt = next.time - prev.time;
        if dt <= 0.0 {
            continue;
        }
        let a_prime = (next.moments.coeff_a - prev.moments.coeff_a) / dt;
        let lhs = a_prime / cur.moments.coeff_a;
        let rhs = 2.0 * cur.moments.l2_sq;
        if lhs - rhs > tol_abs + tol.prop_a_tol_rel * lhs.abs() {
            violations.push(Violation {
                time: cur.time,
                lhs,
                rhs,
            });
        }
    }
    violations
}

/// Soft check of `d/dt D ≤ (A'/A - B) D` as a log-slope inequality, with
/// `d_slack_rel·B` of slack. Records with `D` at or below the roundoff
/// floor are excluded.
pub fn monitor_d_inequality(
    series: &[TimeSeriesRecord],
    tol: &MonitorTolerances,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    if series.len() < 3 {
        return violations;
    }
    let d0 = series
        .iter()
        .map(|r| r.entropy.d)
        .find(|&d| d > 0.0)
        .unwrap_or(0.0);
    if d0 == 0.0 {
        return violations; // stationary: D ≡ 0 is excluded from the check
    }
    let floor = 10.0 * f64::EPSILON * d0;
    for k in 1..series.len() - 1 {
        let (prev, cur, next) = (&series[k - 1], &series[k], &series[k + 1]);
        if prev.entropy.d <= floor || cur.entropy.d <= floor || next.entropy.d <= floor {
            continue;
        }
        let dt = next.time - prev.time;
        if dt <= 0.0 {
            continue;
        }
        let dlog_d = (next.entropy.d.ln() - prev.entropy.d.ln()) / dt;
        let a_prime = (next.moments.coeff_a - prev.moments.coeff_a) / dt;
        let rhs = a_prime / cur.moments.coeff_a - cur.moments.coeff_b
            + tol.d_slack_rel * cur.moments.coeff_b;
        if dlog_d > rhs {
            violations.push(Violation {
                time: cur.time,
                lhs: dlog_d,
                rhs,
            });
        }
    }
    violations
}

/// Outcome of one hard check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub worst_time: f64,
    pub worst_value: f64,
    pub tolerance: f64,
}

/// Hard monitor report, keyed by check name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonitorReport {
    pub checks: BTreeMap<String, CheckResult>,
}

impl MonitorReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

/// Hard per-record checks: conservation of mass and energy against the
/// initial moments, monotone `H` and `H(f|f∞)`, `D ≥ 0`, the CKP bound and
/// the parameter-free `L²` lower bound.
pub fn monitor_conservation_and_entropy(
    series: &[TimeSeriesRecord],
    initial: &MomentSet,
    tol: &MonitorTolerances,
) -> MonitorReport {
    // worst_value is the largest signed excess in each check's natural
    // units; pass == (worst_value ≤ tolerance)
    let mut worst: BTreeMap<&'static str, (f64, f64, f64)> = BTreeMap::new();
    let mut consider = |name: &'static str, time: f64, value: f64, tolerance: f64| {
        let entry = worst.entry(name).or_insert((f64::NEG_INFINITY, 0.0, tolerance));
        if value > entry.0 {
            *entry = (value, time, tolerance);
        }
    };

    for r in series {
        consider(
            "mass_conservation",
            r.time,
            (r.moments.m - initial.m).abs() / initial.m.abs().max(f64::MIN_POSITIVE),
            tol.mass_rel,
        );
        consider(
            "energy_conservation",
            r.time,
            (r.moments.e - initial.e).abs() / initial.e.abs().max(f64::MIN_POSITIVE),
            tol.energy_rel,
        );
        consider(
            "entropy_production_nonnegative",
            r.time,
            -r.entropy.d,
            0.0,
        );
        let ckp_excess = if r.entropy.ckp_rhs > 0.0 {
            r.entropy.ckp_lhs / r.entropy.ckp_rhs - 1.0
        } else {
            r.entropy.ckp_lhs // both should be ~0 at equilibrium
        };
        consider("ckp_bound", r.time, ckp_excess, tol.ckp_rel);
        let gap = l2_lower_bound_gap(&r.moments).unwrap_or(f64::NEG_INFINITY);
        consider("l2_lower_bound", r.time, -gap, tol.l2_gap_floor);
    }
    for w in series.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let h_scale = a.entropy.h.abs().max(1e-30);
        consider(
            "entropy_monotone",
            b.time,
            (b.entropy.h - a.entropy.h) / h_scale,
            tol.entropy_slack_rel,
        );
        consider(
            "relative_entropy_monotone",
            b.time,
            (b.entropy.h_rel - a.entropy.h_rel) / h_scale,
            tol.entropy_slack_rel,
        );
    }

    let checks = worst
        .into_iter()
        .map(|(name, (value, time, tolerance))| {
            (
                name.to_string(),
                CheckResult {
                    pass: value <= tolerance,
                    worst_time: time,
                    worst_value: value,
                    tolerance,
                },
            )
        })
        .collect();
    MonitorReport { checks }
}

fn median_spacing(series: &[TimeSeriesRecord]) -> f64 {
    let mut gaps: Vec<f64> = series.windows(2).map(|w| w[1].time - w[0].time).collect();
    if gaps.is_empty() {
        return 1.0;
    }
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    gaps[gaps.len() / 2].max(f64::MIN_POSITIVE)
}

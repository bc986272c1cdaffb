//! Adaptive Gauss–Kronrod integration.
//!
//! A 7-point Gauss / 15-point Kronrod pair with recursive interval bisection.
//! This is the reference integrator the rest of the crate validates against:
//! polylogarithm series, Bose moments and the equilibrium identities are all
//! cross-checked with it. Keep it independent of every other module.

use crate::error::{Error, Result};

// Kronrod nodes on [0, 1] side of the symmetric rule (abscissae of the
// K15 rule on [-1, 1]); even indices are the embedded G7 nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7/K15 evaluation on `[a, b]`: returns `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut result_k = WGK[7] * fc;
    let mut result_g = WG[3] * fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        result_k += WGK[j] * fsum;
        if j % 2 == 1 {
            result_g += WG[j / 2] * fsum;
        }
    }

    (result_k * half, ((result_k - result_g) * half).abs())
}

/// Adaptively integrate `f` over `[a, b]` to mixed tolerance
/// `abs_tol + rel_tol * |integral|`.
///
/// Bisects the worst interval first (small fixed-size heap would be overkill:
/// plain recursion with per-interval tolerance splitting is accurate enough
/// and deterministic).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument {
            field: "interval",
            message: format!("bounds must be finite, got [{a}, {b}]"),
        });
    }
    if !(rel_tol > 0.0 || abs_tol > 0.0) {
        return Err(Error::InvalidArgument {
            field: "tolerance",
            message: "need a positive relative or absolute tolerance".into(),
        });
    }
    let mut evaluations = 0usize;
    let value = adaptive(&f, a, b, rel_tol, abs_tol.max(1e-300), 0, &mut evaluations)?;
    if !value.is_finite() {
        return Err(Error::Domain {
            context: "quadrature",
            message: format!("integral of the supplied function over [{a}, {b}] is not finite"),
        });
    }
    Ok(value)
}

const MAX_DEPTH: u32 = 52;
const MAX_EVALUATIONS: usize = 2_000_000;

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    evaluations: &mut usize,
) -> Result<f64> {
    *evaluations += 15;
    if *evaluations > MAX_EVALUATIONS {
        return Err(Error::Convergence {
            what: "adaptive Gauss-Kronrod quadrature",
            iterations: *evaluations,
        });
    }
    let (value, err) = gk15(f, a, b);
    if err <= abs_tol + rel_tol * value.abs() || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && err > 1e3 * (abs_tol + rel_tol * value.abs()) {
            return Err(Error::Convergence {
                what: "adaptive Gauss-Kronrod quadrature (max depth)",
                iterations: depth as usize,
            });
        }
        return Ok(value);
    }
    let mid = 0.5 * (a + b);
    let left = adaptive(f, a, mid, rel_tol, 0.5 * abs_tol, depth + 1, evaluations)?;
    let right = adaptive(f, mid, b, rel_tol, 0.5 * abs_tol, depth + 1, evaluations)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates polynomials up to degree 22 exactly; adaptivity never kicks in.
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
        let v = integrate(|x| x.powi(7) - x, -1.0, 1.0, 1e-14, 0.0).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x| (-x * x).exp(), -9.0, 9.0, 1e-13, 0.0).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-13, "got {v}");
    }

    #[test]
    fn narrow_spike_is_resolved() {
        // Lorentzian of width 1e-5: total arctan mass over [-1, 1].
        let eps = 1e-5f64;
        let v = integrate(|x| eps / (eps * eps + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!(((v - exact) / exact).abs() < 1e-11, "got {v}, want {exact}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(integrate(|x| x, f64::NAN, 1.0, 1e-10, 0.0).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0, 0.0).is_err());
    }
}

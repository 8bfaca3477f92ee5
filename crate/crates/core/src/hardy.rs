//! `H^2`-side computations: norms of powers `psi^n`, the Poisson-type
//! transform `I(a) = (1 - |a|^2) ∫ |1 - conj(a) psi|^{-2} dm` by quadrature
//! and by series, the exact Littlewood-Paley identity check, and the
//! non-univalent change-of-variables check.

use crate::mapspec::SelfMap;
use crate::nevanlinna::{counting_function, golden_refine};
use crate::quad::{circle_integral, disk_integral, QuadConfig};
use crate::{Complex64, Error, Result};

/// `||psi^n||^2` for `n = 0..N-1` with a geometric tail bound when the
/// boundary supremum stays below one.
#[derive(Debug, Clone)]
pub struct PowerNormTable {
    pub map_spec: String,
    /// `||psi^n||^2_{H^2}` for `n = 0 .. N-1`.
    pub norms_sq: Vec<f64>,
    pub tail: TailBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    /// `sum_{n >= N} ||psi^n||^2 <= s^{2N}/(1 - s^2)` with `s = sup_T |psi| < 1`.
    Geometric(f64),
    /// Inner map: all power norms equal one.
    Divergent,
    /// `sup_T |psi| = 1` but the map is not inner; no geometric bound.
    Unknown,
}

/// Result carrier for two-sided identity checks.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

fn identity_check_of(lhs: f64, rhs: f64, cfg: &QuadConfig) -> IdentityCheck {
    let abs_err = (lhs - rhs).abs();
    IdentityCheck {
        lhs,
        rhs,
        abs_err,
        rel_err: abs_err / lhs.abs().max(rhs.abs()).max(1e-300),
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
    }
}

/// `||psi^n||^2_{H^2} = ∫_T |psi|^{2n} dm`; `n = 0` returns 1 exactly.
pub fn h2_power_norm(map: &SelfMap, n: u32, cfg: &QuadConfig) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let v = circle_integral(
        |t| Ok(map.boundary_value(t)?.norm_sqr().powi(n as i32)),
        cfg,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// Boundary supremum of `|psi|` by a dense grid plus golden-section
/// sharpening.
pub(crate) fn sup_boundary_modulus(map: &SelfMap) -> f64 {
    let n = 8192;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let value_at = |t: f64| map.boundary_value(t).ok().map(|v| v.norm());
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0;
    for j in 0..n {
        if let Some(v) = value_at(j as f64 * step) {
            if v > best {
                best = v;
                best_j = j;
            }
        }
    }
    let t0 = best_j as f64 * step;
    if let Some((_, v)) = golden_refine(value_at, t0 - step, t0 + step, 3) {
        best = best.max(v);
    }
    best.min(1.0)
}

/// Power norms below `n_max` plus a tail bound for `sum_{n >= n_max}`.
pub fn power_sum_tail(map: &SelfMap, n_max: u32, cfg: &QuadConfig) -> Result<PowerNormTable> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    let norms_sq = (0..n_max)
        .map(|n| h2_power_norm(map, n, cfg))
        .collect::<Result<Vec<_>>>()?;
    let sup = sup_boundary_modulus(map);
    let tail = if sup < 1.0 - 1e-9 {
        TailBound::Geometric(sup.powi(2 * n_max as i32) / (1.0 - sup * sup))
    } else if map.is_inner() {
        TailBound::Divergent
    } else {
        TailBound::Unknown
    };
    Ok(PowerNormTable {
        map_spec: map.spec_string(),
        norms_sq,
        tail,
    })
}

/// `I(a) = ∫_T (1 - |a|^2)/|1 - conj(a) psi(zeta)|^2 dm(zeta)`.
pub fn poisson_transform(map: &SelfMap, a: Complex64, cfg: &QuadConfig) -> Result<f64> {
    assert!(a.norm() < 1.0, "poisson_transform requires |a| < 1");
    let scale = 1.0 - a.norm_sqr();
    circle_integral(
        |t| {
            let v = map.boundary_value(t)?;
            Ok(scale / (1.0 - a.conj() * v).norm_sqr())
        },
        cfg,
    )
}

/// Series evaluation of `I(a)` through the expansion
/// `1/(1 - conj(a) psi) = sum conj(a)^n psi^n`, truncated at `n < n_trunc`,
/// with a Cauchy-Schwarz truncation bound.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTransform {
    pub value: f64,
    pub truncation_bound: f64,
    pub n_trunc: usize,
}

pub fn poisson_transform_series(
    map: &SelfMap,
    a: Complex64,
    n_trunc: usize,
    cfg: &QuadConfig,
) -> Result<SeriesTransform> {
    assert!(a.norm() < 1.0, "poisson_transform_series requires |a| < 1");
    if n_trunc < 1 {
        return Err(Error::Domain("truncation order must be >= 1".into()));
    }
    let scale = 1.0 - a.norm_sqr();
    // The double sum over n, m < N of a^m conj(a)^n <psi^n, psi^m> collapses
    // to the boundary mean of |sum_{n<N} (conj(a) psi)^n|^2 over one shared
    // sample vector; the partial geometric sum evaluates it per node.
    let value = circle_integral(
        |t| {
            let p = a.conj() * map.boundary_value(t)?;
            let s = if (1.0 - p).norm() < 1e-12 {
                Complex64::new(n_trunc as f64, 0.0)
            } else {
                (1.0 - p.powu(n_trunc as u32)) / (1.0 - p)
            };
            Ok(scale * s.norm_sqr())
        },
        cfg,
    )?;
    // || f - f_N || <= sum_{n >= N} |a|^n ||psi^n|| <= q^N / (1 - q) with
    // q = |a| sup_T |psi|
    let q = a.norm() * sup_boundary_modulus(map);
    let t = if q == 0.0 {
        0.0
    } else {
        q.powi(n_trunc as i32) / (1.0 - q)
    };
    let truncation_bound = 2.0 * scale.sqrt() * value.max(0.0).sqrt() * t + scale * t * t;
    if truncation_bound > cfg.rel_tol * value.abs().max(1e-300) {
        return Err(Error::TruncationTooLoose {
            bound: truncation_bound,
            value,
        });
    }
    Ok(SeriesTransform {
        value,
        truncation_bound,
        n_trunc,
    })
}

/// Exact Littlewood-Paley identity for `f = 1/(1 - conj(a) psi)`:
/// `I(a) = (1 - |a|^2) [ c(a) + 2 ∫_D |conj(a) psi' / (1 - conj(a) psi)^2|^2 log(1/|z|) dA ]`
/// with `c(a) = 1/|1 - conj(a) psi(0)|^2`.
pub fn littlewood_paley_check(
    map: &SelfMap,
    a: Complex64,
    cfg: &QuadConfig,
) -> Result<IdentityCheck> {
    assert!(a.norm() < 1.0, "littlewood_paley_check requires |a| < 1");
    let lhs = poisson_transform(map, a, cfg)?;
    let c_a = 1.0 / (1.0 - a.conj() * map.value_at_zero()).norm_sqr();
    let area = disk_integral(
        |z| {
            let v = map.eval(z);
            let dv = map.derivative(z);
            let d = 1.0 - a.conj() * v;
            let f_prime = a.conj() * dv / (d * d);
            Ok(f_prime.norm_sqr() * (1.0 / z.norm()).ln())
        },
        cfg,
    )?;
    let rhs = (1.0 - a.norm_sqr()) * (c_a + 2.0 * area);
    Ok(identity_check_of(lhs, rhs, cfg))
}

/// Non-univalent change of variables: pulls the weighted area integral of
/// `|psi'|^2` back through the counting function,
/// `∫_D |conj(a) psi'/(1-conj(a) psi)^2|^2 log(1/|z|) dA(z)
///    = |a|^2 ∫_D N_psi(w) / |1 - conj(a) w|^4 dA(w)`.
pub fn change_of_variables_check(
    map: &SelfMap,
    a: Complex64,
    cfg: &QuadConfig,
) -> Result<IdentityCheck> {
    assert!(a.norm() < 1.0, "change_of_variables_check requires |a| < 1");
    if a.norm() == 0.0 {
        return Err(Error::Domain("a must be nonzero".into()));
    }
    let lhs = 2.0
        * disk_integral(
            |z| {
                let v = map.eval(z);
                let dv = map.derivative(z);
                let d = 1.0 - a.conj() * v;
                let f_prime = a.conj() * dv / (d * d);
                Ok(f_prime.norm_sqr() * (1.0 / z.norm()).ln())
            },
            cfg,
        )?;
    let rhs = 2.0
        * a.norm_sqr()
        * disk_integral(
            |w| match counting_function(map, w) {
                Ok(cv) => Ok(cv.value / (1.0 - a.conj() * w).norm_sqr().powi(2)),
                // the psi(0) node carries no measure
                Err(Error::InfiniteValue) => Ok(0.0),
                Err(e) => Err(e),
            },
            cfg,
        )?;
    Ok(identity_check_of(lhs, rhs, cfg))
}

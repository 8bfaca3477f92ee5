//! Nevanlinna counting function `N_psi(w) = sum -log|z|` over the
//! preimages of `w`, its radial supremum profile `sup N / (1 - r)`, and
//! the Möbius transform law `N_psi(phi_a(w)) = N_{phi_a ∘ psi}(w)`.

use crate::diskzeros::{self, PreimageSet};
use crate::mapspec::{MapExpr, SelfMap};
use crate::quad::{disk_integral, QuadConfig};
use crate::{Complex64, Error, Result};

const DEFAULT_SOLVE_TOL: f64 = 1e-12;

/// One evaluation of the counting function.
#[derive(Debug, Clone, Copy)]
pub struct CountingValue {
    pub w: Complex64,
    /// `sum multiplicity * (-log|z|)` over the located preimages (nats).
    pub value: f64,
    pub n_preimages: u32,
    /// Mass carried by boundary-flagged roots plus any truncated
    /// near-boundary tail (atomic maps).
    pub flagged_boundary_mass: f64,
}

/// Per-radius suprema of a boundary-indexed quantity.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    /// Strictly increasing radii in `(0, 1)`.
    pub radii: Vec<f64>,
    /// `sup` over sampled angles at each radius.
    pub values: Vec<f64>,
    /// Angle attaining the supremum.
    pub argmax_angles: Vec<f64>,
    /// Grid angles actually evaluated (singular grid points are skipped).
    pub n_angles_used: Vec<usize>,
}

/// Angle-budget rule for profile grids: `n(r) = clamp(ceil(8/(1-r)))`.
#[derive(Debug, Clone, Copy)]
pub struct AngleBudget {
    pub min_angles: usize,
    pub max_angles: usize,
}

impl AngleBudget {
    pub fn new(min_angles: usize, max_angles: usize) -> Result<Self> {
        if min_angles < 64 {
            return Err(Error::Domain("angle budget must be at least 64".into()));
        }
        if max_angles < min_angles {
            return Err(Error::Domain("max_angles must be >= min_angles".into()));
        }
        Ok(AngleBudget {
            min_angles,
            max_angles,
        })
    }

    pub(crate) fn angles_for(&self, r: f64) -> usize {
        let scale = (8.0 / (1.0 - r)).ceil() as usize;
        scale.clamp(self.min_angles, self.max_angles)
    }
}

impl Default for AngleBudget {
    fn default() -> Self {
        AngleBudget {
            min_angles: 256,
            max_angles: 1 << 16,
        }
    }
}

/// `N_psi(w)` with the default solver tolerance. Errors with
/// `InfiniteValue` when `w = psi(0)`.
pub fn counting_function(map: &SelfMap, w: Complex64) -> Result<CountingValue> {
    counting_function_tol(map, w, DEFAULT_SOLVE_TOL)
}

pub fn counting_function_tol(map: &SelfMap, w: Complex64, tol: f64) -> Result<CountingValue> {
    let set: PreimageSet = diskzeros::solve_preimages(map, w, tol)?;
    Ok(CountingValue {
        w,
        value: set.counting_sum(),
        n_preimages: set.certified_total,
        flagged_boundary_mass: set.flagged_mass() + set.truncated_tail_mass,
    })
}

/// Golden-section sharpening of a discrete argmax: maximizes `f` over
/// `[lo, hi]` with three refinement rounds. `f` may signal a skipped point
/// by returning `None`.
pub(crate) fn golden_refine<F>(f: F, lo: f64, hi: f64, rounds: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> Option<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut best: Option<(f64, f64)> = None;
    let mut consider = |theta: f64, value: Option<f64>| {
        if let Some(v) = value {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((theta, v));
            }
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    consider(c, fc);
    consider(d, fd);
    for _ in 0..rounds {
        let keep_left = match (fc, fd) {
            (Some(x), Some(y)) => x > y,
            (Some(_), None) => true,
            _ => false,
        };
        if keep_left {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    best
}

/// Supremum scan of `N(r e^{i theta})/(1 - r)` at one radius.
pub(crate) fn counting_sup_at(
    map: &SelfMap,
    r: f64,
    budget: &AngleBudget,
) -> Result<(f64, f64, usize)> {
    let n = budget.angles_for(r);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    let mut used = 0usize;
    for j in 0..n {
        let w = Complex64::from_polar(r, j as f64 * step);
        match counting_function(map, w) {
            Ok(cv) => {
                used += 1;
                let v = cv.value / (1.0 - r);
                if v > best {
                    best = v;
                    best_j = j;
                }
            }
            // the psi(0) grid point is excluded when hit exactly
            Err(Error::InfiniteValue) => continue,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(Error::Domain(
            "all profile grid points were singular".into(),
        ));
    }
    let mut best_theta = best_j as f64 * step;
    let lo = best_theta - step;
    let hi = best_theta + step;
    let refined = golden_refine(
        |theta| {
            counting_function(map, Complex64::from_polar(r, theta))
                .ok()
                .map(|cv| cv.value / (1.0 - r))
        },
        lo,
        hi,
        3,
    );
    if let Some((theta, v)) = refined {
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    Ok((best, best_theta.rem_euclid(2.0 * std::f64::consts::PI), used))
}

/// Radial profile of `sup_theta N_psi(r e^{i theta}) / (1 - r)`, the
/// finite-radius approximant of the counting-side limsup.
pub fn counting_profile(
    map: &SelfMap,
    radii: &[f64],
    budget: &AngleBudget,
) -> Result<RadialProfile> {
    validate_radii(radii)?;
    let mut profile = RadialProfile {
        radii: radii.to_vec(),
        values: Vec::with_capacity(radii.len()),
        argmax_angles: Vec::with_capacity(radii.len()),
        n_angles_used: Vec::with_capacity(radii.len()),
    };
    for &r in radii {
        let (v, theta, used) = counting_sup_at(map, r, budget)?;
        profile.values.push(v);
        profile.argmax_angles.push(theta);
        profile.n_angles_used.push(used);
    }
    Ok(profile)
}

pub(crate) fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Domain("radius schedule is empty".into()));
    }
    for pair in radii.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Domain("radii must be strictly increasing".into()));
        }
    }
    if radii.iter().any(|&r| !(0.0 < r && r < 1.0)) {
        return Err(Error::Domain("radii must lie in (0, 1)".into()));
    }
    Ok(())
}

/// The disk automorphism `phi_a(z) = (a - z)/(1 - conj(a) z)`; an
/// involution swapping `0` and `a`.
pub fn moebius_apply(a: Complex64, z: Complex64) -> Complex64 {
    (a - z) / (1.0 - a.conj() * z)
}

/// `phi_a ∘ psi` as a catalog map; the rational form propagates whenever
/// `psi` has one.
pub fn compose_with_moebius(a: Complex64, map: &SelfMap) -> Result<SelfMap> {
    if a.norm() >= 1.0 {
        return Err(Error::Domain("moebius parameter must satisfy |a| < 1".into()));
    }
    SelfMap::new(MapExpr::Compose(
        Box::new(MapExpr::Mobius(a)),
        Box::new(map.expr().clone()),
    ))
}

/// Both sides of the transform law `N_psi(phi_a(w)) = N_{phi_a ∘ psi}(w)`.
#[derive(Debug, Clone, Copy)]
pub struct TransformCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

pub fn counting_transform_check(
    map: &SelfMap,
    a: Complex64,
    w: Complex64,
) -> Result<TransformCheck> {
    let lhs = counting_function(map, moebius_apply(a, w))?.value;
    let composed = compose_with_moebius(a, map)?;
    let rhs = counting_function(&composed, w)?.value;
    Ok(TransformCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
    })
}

/// Sub-averaging inequality from the main identity's proof:
/// `∫_D N_{phi_a ∘ psi} dA >= |phi_a(psi(0))|^2 N_psi(a)`.
#[derive(Debug, Clone, Copy)]
pub struct SubaveragingCheck {
    pub integral: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn subaveraging_check(
    map: &SelfMap,
    a: Complex64,
    cfg: &QuadConfig,
) -> Result<SubaveragingCheck> {
    if a.norm() >= 1.0 {
        return Err(Error::Domain("|a| < 1 required".into()));
    }
    if map.value_at_zero() == a {
        return Err(Error::Domain("a = psi(0) makes the bound side infinite".into()));
    }
    let composed = compose_with_moebius(a, map)?;
    let integral = disk_integral(
        |z| match counting_function(&composed, z) {
            Ok(cv) => Ok(cv.value),
            // measure-zero singular node
            Err(Error::InfiniteValue) => Ok(0.0),
            Err(e) => Err(e),
        },
        cfg,
    )?;
    let bound = moebius_apply(a, map.value_at_zero()).norm_sqr()
        * counting_function(map, a)?.value;
    let tol = (10.0 * cfg.abs_tol).max(1e-6);
    Ok(SubaveragingCheck {
        integral,
        bound,
        ok: integral >= bound - tol,
    })
}

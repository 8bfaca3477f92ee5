//! Assembles both sides of the essential-norm identity into radius-indexed
//! profiles, reports their gap, estimates the essential norm squared from
//! the integral side, and renders a compactness verdict.

use crate::carleson::{carleson_ratio_profile, induced_measure};
use crate::mapspec::SelfMap;
use crate::nevanlinna::{counting_sup_at, golden_refine, validate_radii, AngleBudget, RadialProfile};
use crate::quad::{circle_integral_nodes, QuadConfig};
use crate::{Complex64, Error, Result};

/// Compactness verdict thresholds: compact-consistent below, non-compact
/// consistent above (with trend tests over the last three radii).
pub const COMPACT_THRESHOLD: f64 = 0.05;
pub const NONCOMPACT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CompactConsistent,
    NonCompactConsistent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CompactConsistent => "CompactConsistent",
            Verdict::NonCompactConsistent => "NonCompactConsistent",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Tolerance echo carried by every report.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub compact_threshold: f64,
    pub noncompact_threshold: f64,
}

/// Optional Carleson section of a report.
#[derive(Debug, Clone)]
pub struct CarlesonSection {
    pub h: Vec<f64>,
    pub ratio: Vec<f64>,
}

/// Full analysis artifact; see the JSON/CSV writers in `report`.
#[derive(Debug, Clone)]
pub struct EssNormReport {
    pub map_spec: String,
    pub radii: Vec<f64>,
    /// `sup_theta N_psi(r e^{i theta}) / (1 - r)` per radius.
    pub counting: Vec<f64>,
    /// `sup_theta I(r e^{i theta})` per radius.
    pub integral: Vec<f64>,
    pub carleson: Option<CarlesonSection>,
    /// Integral-side value at the largest radius (the smoother extremum).
    pub essnorm_sq_estimate: f64,
    /// Finite-radius proxy for the counting-side limsup: max of the
    /// counting profile.
    pub beta_proxy: f64,
    pub verdict: Verdict,
    /// `|counting - integral|` at the largest radius.
    pub gap: f64,
    pub tolerances: Tolerances,
    /// Per-radius numerical flags (reports with flags degrade rather than
    /// abort; the CLI maps them to exit code 3).
    pub flags: Vec<String>,
    pub runtime_seconds: f64,
}

/// Configuration for `essential_norm_report`.
#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub radii: Vec<f64>,
    pub angles: AngleBudget,
    pub quad: QuadConfig,
    pub carleson: Option<CarlesonConfig>,
    /// When false (the default), `runtime_seconds` is reported as zero so
    /// identical invocations produce byte-identical artifacts.
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct CarlesonConfig {
    pub atoms: usize,
    pub h_grid: Vec<f64>,
    pub n_theta: usize,
    /// When set, boundary angles come from the seeded stress sampler
    /// instead of the uniform grid.
    pub seed: Option<u64>,
}

impl Default for CarlesonConfig {
    fn default() -> Self {
        CarlesonConfig {
            atoms: 1 << 14,
            h_grid: vec![0.5, 0.2, 0.1, 0.05, 0.02, 0.01],
            n_theta: 720,
            seed: None,
        }
    }
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            radii: default_schedule(10),
            angles: AngleBudget::default(),
            quad: QuadConfig::profile(),
            carleson: None,
            timing: false,
        }
    }
}

/// The default radius schedule `r_k = 1 - 2^{-k}`, `k = 1..=k_max`.
pub fn default_schedule(k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect()
}

/// Supremum scan of the Poisson transform over `a = r e^{i theta}` at one
/// radius. One adaptive probe picks the boundary-sample count; the scan
/// then shares a single sample table across all angles.
pub(crate) fn integral_sup_at(
    map: &SelfMap,
    r: f64,
    budget: &AngleBudget,
    quad: &QuadConfig,
) -> Result<(f64, f64, usize, Option<String>)> {
    let scale = 1.0 - r * r;
    let probe = circle_integral_nodes(
        &|t: f64| {
            let v = map.boundary_value(t)?;
            Ok(scale / (1.0 - r * v.conj()).norm_sqr())
        },
        quad,
    );
    let (mut flag, nodes) = match probe {
        Ok((_, m)) => (None, m),
        Err(Error::NoConvergence { .. }) => (
            Some(format!("integral probe at r={r} hit the node cap")),
            1 << 14,
        ),
        Err(e) => return Err(e),
    };
    let m = nodes.clamp(256, 1 << 17);
    let step_m = 2.0 * std::f64::consts::PI / m as f64;
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let t = j as f64 * step_m;
        let v = match map.boundary_value(t) {
            Err(Error::SingularBoundaryPoint { .. }) => map.boundary_value(t + step_m / 2.0)?,
            other => other?,
        };
        samples.push(v);
    }
    let transform_at = |theta: f64| -> f64 {
        let a_conj = Complex64::from_polar(r, -theta);
        let mut acc = 0.0;
        for s in &samples {
            acc += 1.0 / (1.0 - a_conj * s).norm_sqr();
        }
        scale * acc / m as f64
    };
    let n = budget.angles_for(r);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    for j in 0..n {
        let v = transform_at(j as f64 * step);
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let mut best_theta = best_j as f64 * step;
    if let Some((theta, v)) = golden_refine(
        |t| Some(transform_at(t)),
        best_theta - step,
        best_theta + step,
        3,
    ) {
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    if !best.is_finite() {
        flag = Some(format!("integral scan at r={r} produced a non-finite value"));
        best = 0.0;
    }
    Ok((
        best,
        best_theta.rem_euclid(2.0 * std::f64::consts::PI),
        n,
        flag,
    ))
}

/// Radial profile of `sup_theta I(r e^{i theta})`, the finite-radius
/// approximant of the integral-side limsup.
pub fn integral_profile(
    map: &SelfMap,
    radii: &[f64],
    budget: &AngleBudget,
    quad: &QuadConfig,
) -> Result<RadialProfile> {
    validate_radii(radii)?;
    let mut profile = RadialProfile {
        radii: radii.to_vec(),
        values: Vec::with_capacity(radii.len()),
        argmax_angles: Vec::with_capacity(radii.len()),
        n_angles_used: Vec::with_capacity(radii.len()),
    };
    for &r in radii {
        let (v, theta, used, flag) = integral_sup_at(map, r, budget, quad)?;
        if flag.is_some() {
            return Err(Error::NoConvergence { estimate: v });
        }
        profile.values.push(v);
        profile.argmax_angles.push(theta);
        profile.n_angles_used.push(used);
    }
    Ok(profile)
}

/// Counting-side supremum at a single radius (one profile entry).
pub fn counting_side_at(map: &SelfMap, r: f64, budget: &AngleBudget) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::Domain("radius must lie in (0, 1)".into()));
    }
    counting_sup_at(map, r, budget).map(|(v, _, _)| v)
}

/// Integral-side supremum at a single radius. When the adaptive probe
/// hits its node cap the scan still runs at a capped sample count and a
/// descriptive flag is returned alongside the estimate.
pub fn integral_side_at(
    map: &SelfMap,
    r: f64,
    budget: &AngleBudget,
    quad: &QuadConfig,
) -> Result<(f64, Option<String>)> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::Domain("radius must lie in (0, 1)".into()));
    }
    integral_sup_at(map, r, budget, quad).map(|(v, _, _, flag)| (v, flag))
}

/// The two finite-radius suprema at a single radius and their gap. No
/// limit claim is made: the gap is reported, not asserted.
#[derive(Debug, Clone, Copy)]
pub struct IdentityGap {
    pub counting_side: f64,
    pub integral_side: f64,
    pub gap: f64,
}

pub fn identity_check(
    map: &SelfMap,
    r: f64,
    budget: &AngleBudget,
    quad: &QuadConfig,
) -> Result<IdentityGap> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::Domain("radius must lie in (0, 1)".into()));
    }
    let (counting_side, _, _) = counting_sup_at(map, r, budget)?;
    let (integral_side, _, _, flag) = integral_sup_at(map, r, budget, quad)?;
    if flag.is_some() {
        return Err(Error::NoConvergence {
            estimate: integral_side,
        });
    }
    Ok(IdentityGap {
        counting_side,
        integral_side,
        gap: (counting_side - integral_side).abs(),
    })
}

fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|p| p[1] <= p[0] + 1e-10)
}

fn relative_change(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        0.0
    } else {
        (max - min) / max
    }
}

fn decide_verdict(counting: &[f64], integral: &[f64]) -> Verdict {
    if counting.len() < 3 || integral.len() < 3 {
        return Verdict::Inconclusive;
    }
    let c3 = &counting[counting.len() - 3..];
    let i3 = &integral[integral.len() - 3..];
    let all_below = c3
        .iter()
        .chain(i3.iter())
        .all(|&v| v < COMPACT_THRESHOLD);
    if all_below && non_increasing(c3) && non_increasing(i3) {
        return Verdict::CompactConsistent;
    }
    let all_above = c3
        .iter()
        .chain(i3.iter())
        .all(|&v| v >= NONCOMPACT_THRESHOLD);
    if all_above && relative_change(c3) < 0.10 && relative_change(i3) < 0.10 {
        return Verdict::NonCompactConsistent;
    }
    Verdict::Inconclusive
}

/// Full analysis: both profiles (radius by radius, degrading to flags on
/// numerical non-convergence), optional Carleson section, verdict and
/// essential-norm estimate.
pub fn essential_norm_report(map: &SelfMap, cfg: &ReportConfig) -> Result<EssNormReport> {
    validate_radii(&cfg.radii)?;
    let start = std::time::Instant::now();
    let mut counting = Vec::with_capacity(cfg.radii.len());
    let mut integral = Vec::with_capacity(cfg.radii.len());
    let mut flags = Vec::new();
    for &r in &cfg.radii {
        match counting_sup_at(map, r, &cfg.angles) {
            Ok((v, _, _)) => counting.push(v),
            Err(e) => {
                flags.push(format!("counting r={r}: {e}"));
                counting.push(0.0);
            }
        }
        match integral_sup_at(map, r, &cfg.angles, &cfg.quad) {
            Ok((v, _, _, flag)) => {
                if let Some(f) = flag {
                    flags.push(f);
                }
                integral.push(v);
            }
            Err(e) => {
                flags.push(format!("integral r={r}: {e}"));
                integral.push(0.0);
            }
        }
    }
    let carleson = match &cfg.carleson {
        None => None,
        Some(c) => match (match c.seed {
            Some(seed) => crate::carleson::induced_measure_seeded(map, c.atoms, seed),
            None => induced_measure(map, c.atoms),
        })
        .and_then(|m| carleson_ratio_profile(&m, &c.h_grid, c.n_theta))
        {
            Ok(p) => Some(CarlesonSection {
                h: p.h,
                ratio: p.ratios,
            }),
            Err(e) => {
                flags.push(format!("carleson: {e}"));
                None
            }
        },
    };
    let last = cfg.radii.len() - 1;
    Ok(EssNormReport {
        map_spec: map.spec_string(),
        verdict: decide_verdict(&counting, &integral),
        essnorm_sq_estimate: integral[last],
        beta_proxy: counting.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        gap: (counting[last] - integral[last]).abs(),
        radii: cfg.radii.clone(),
        counting,
        integral,
        carleson,
        tolerances: Tolerances {
            abs_tol: cfg.quad.abs_tol,
            rel_tol: cfg.quad.rel_tol,
            compact_threshold: COMPACT_THRESHOLD,
            noncompact_threshold: NONCOMPACT_THRESHOLD,
        },
        runtime_seconds: if cfg.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> AngleBudget {
        AngleBudget::default()
    }

    fn quad() -> QuadConfig {
        QuadConfig::profile()
    }

    #[test]
    fn integral_profile_monomial_is_one() {
        // inner fixing zero: the transform is identically one
        let mono = SelfMap::parse("monomial(2)").unwrap();
        let p = integral_profile(&mono, &[0.5, 0.9, 0.99], &budget(), &quad()).unwrap();
        for v in &p.values {
            assert!((v - 1.0).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn integral_profile_const_zero() {
        let k = SelfMap::parse("const(0)").unwrap();
        let p = integral_profile(&k, &[0.5, 0.75, 0.9], &budget(), &quad()).unwrap();
        for (r, v) in p.radii.iter().zip(&p.values) {
            assert!((v - (1.0 - r * r)).abs() < 1e-8, "r = {r}: {v}");
        }
    }

    #[test]
    fn integral_profile_halfplane_sup_at_zero() {
        let h = SelfMap::parse("halfplane").unwrap();
        let p = integral_profile(&h, &[0.9], &budget(), &quad()).unwrap();
        assert!((p.values[0] - 1.9).abs() < 1e-6, "{}", p.values[0]);
        let theta = p.argmax_angles[0];
        let dist = theta.min(2.0 * std::f64::consts::PI - theta);
        assert!(dist < 0.05, "argmax at {theta}");
    }

    #[test]
    fn identity_check_monomial() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        let g = identity_check(&mono, 0.999, &budget(), &quad()).unwrap();
        assert!((g.counting_side - 1.0005003).abs() < 1e-6);
        assert!((g.integral_side - 1.0).abs() < 1e-7);
        assert!(g.gap <= 1e-2);
    }

    #[test]
    fn identity_check_scale_closed_forms() {
        // counting side 0 beyond the image radius; integral side
        // (1-r^2)/(1-r^2/4) at real a
        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        for &r in &[0.9, 0.999] {
            let g = identity_check(&s, r, &budget(), &quad()).unwrap();
            assert_eq!(g.counting_side, 0.0);
            let want = (1.0 - r * r) / (1.0 - r * r / 4.0);
            assert!(
                (g.integral_side - want).abs() < 1e-7,
                "r = {r}: {} vs {want}",
                g.integral_side
            );
            assert!((g.gap - want).abs() < 1e-7);
        }
    }

    #[test]
    fn report_monomial_noncompact() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        let report = essential_norm_report(&mono, &ReportConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonCompactConsistent);
        assert!((report.essnorm_sq_estimate - 1.0).abs() < 1e-2);
        assert!(report.flags.is_empty());
        assert!((report.beta_proxy - 1.0).abs() < 0.4);
    }

    #[test]
    fn report_scale_compact() {
        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let report = essential_norm_report(&s, &ReportConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::CompactConsistent);
        assert!(report.essnorm_sq_estimate < 0.01);
        // integral profile is non-increasing beyond the image radius
        let tail = &report.integral[1..];
        assert!(tail.windows(2).all(|p| p[1] <= p[0] + 1e-12));
    }

    #[test]
    fn report_halfplane_estimate_near_two() {
        let h = SelfMap::parse("halfplane").unwrap();
        let report = essential_norm_report(&h, &ReportConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonCompactConsistent);
        assert!(
            (report.essnorm_sq_estimate - 2.0).abs() < 2e-2,
            "{}",
            report.essnorm_sq_estimate
        );
    }

    #[test]
    fn report_const_monotone_integral() {
        let k = SelfMap::parse("const(0.3)").unwrap();
        let report = essential_norm_report(&k, &ReportConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::CompactConsistent);
        assert!(report
            .integral
            .windows(2)
            .all(|p| p[1] <= p[0] + 1e-12));
        assert!(report.counting.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn report_with_carleson_section() {
        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let cfg = ReportConfig {
            radii: default_schedule(5),
            carleson: Some(CarlesonConfig::default()),
            ..ReportConfig::default()
        };
        let report = essential_norm_report(&s, &cfg).unwrap();
        let section = report.carleson.expect("carleson section present");
        assert_eq!(section.h.len(), 6);
        // atoms sit at radius exactly 1/2, so only the h = 0.5 window
        // (whose inner rim is 1 - h = 1/2, inclusive) sees any mass
        for (h, ratio) in section.h.iter().zip(&section.ratio) {
            if *h < 0.5 {
                assert_eq!(*ratio, 0.0, "h = {h}");
            } else {
                assert!(*ratio > 0.0);
            }
        }
    }

    #[test]
    fn report_atomic_flags_nonconvergence() {
        // boundary oscillation of the singular inner function defeats the
        // integral probe; the report degrades to flags
        let a = SelfMap::parse("atomic(1)").unwrap();
        let cfg = ReportConfig {
            radii: default_schedule(3),
            quad: QuadConfig {
                max_nodes: 1 << 16,
                ..QuadConfig::profile()
            },
            ..ReportConfig::default()
        };
        let report = essential_norm_report(&a, &cfg).unwrap();
        assert!(!report.flags.is_empty());
    }

    #[test]
    fn schedule_shape() {
        let s = default_schedule(3);
        assert_eq!(s, vec![0.5, 0.75, 0.875]);
    }
}

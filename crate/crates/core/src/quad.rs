//! Quadrature over the circle and the disk with normalized measures
//! (`m(T) = 1`, `A(D) = 1`), plus closed forms for the geometric series
//! bound and the Möbius energy integral.

use crate::{Complex64, Error, Result};

/// Refinement strategy for `circle_integral`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Uniform trapezoid with node doubling (spectral on smooth periodic
    /// integrands).
    Doubling,
    /// Adaptive Simpson bisection; useful when the variation concentrates
    /// on a few panels.
    AdaptiveBisection,
}

/// Tolerances and node budget for the quadrature engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
    pub refinement: Refinement,
}

pub const MAX_NODE_CAP: usize = 1 << 20;

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_nodes: usize, refinement: Refinement) -> Result<Self> {
        if abs_tol <= 0.0 || rel_tol <= 0.0 || abs_tol.is_nan() || rel_tol.is_nan() {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        if !(64..=MAX_NODE_CAP).contains(&max_nodes) {
            return Err(Error::Domain(format!(
                "max_nodes must lie in [64, {MAX_NODE_CAP}]"
            )));
        }
        Ok(QuadConfig {
            abs_tol,
            rel_tol,
            max_nodes,
            refinement,
        })
    }

    /// Relaxed tolerances for essential-norm profiles at extreme radii,
    /// where integrand peaks have width `1 - |a|`.
    pub fn profile() -> Self {
        QuadConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-6,
            max_nodes: MAX_NODE_CAP,
            refinement: Refinement::Doubling,
        }
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_nodes: MAX_NODE_CAP,
            refinement: Refinement::Doubling,
        }
    }
}

/// Fixed-order pairwise summation; deterministic and accurate for the
/// accumulation patterns used here.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn converged(cur: f64, prev: f64, cfg: &QuadConfig) -> bool {
    (cur - prev).abs() < cfg.abs_tol.max(cfg.rel_tol * cur.abs())
}

/// Evaluate the integrand at `theta`, offsetting singular boundary points
/// by half a step.
fn eval_offset<F>(f: &F, theta: f64, half_step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    match f(theta) {
        Err(Error::SingularBoundaryPoint { .. }) => f(theta + half_step),
        other => other,
    }
}

/// `∫_T f dm = (1/2pi) ∫_0^{2pi} f(theta) dtheta` by the configured
/// refinement scheme.
pub fn circle_integral<F>(f: F, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    circle_integral_nodes(&f, cfg).map(|(v, _)| v)
}

/// As `circle_integral`, but also reports the node count of the final
/// level (used to share boundary-sample tables across a profile scan).
pub(crate) fn circle_integral_nodes<F>(f: &F, cfg: &QuadConfig) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    match cfg.refinement {
        // doubling first; panels with dominating variation are handed to
        // the bisection scheme when the uniform ladder exhausts its budget
        Refinement::Doubling => match doubling_trapezoid(f, cfg) {
            Err(Error::NoConvergence { estimate }) => match adaptive_bisection(f, cfg) {
                Ok(v) => Ok((v, cfg.max_nodes)),
                Err(Error::NoConvergence { .. }) => Err(Error::NoConvergence { estimate }),
                Err(e) => Err(e),
            },
            other => other,
        },
        Refinement::AdaptiveBisection => adaptive_bisection(f, cfg).map(|v| (v, cfg.max_nodes)),
    }
}

fn trapezoid_level<F>(f: &F, m: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let mut vals = Vec::with_capacity(m);
    for j in 0..m {
        vals.push(eval_offset(f, j as f64 * step, step / 2.0)?);
    }
    Ok(pairwise_sum(&vals) / m as f64)
}

fn doubling_trapezoid<F>(f: &F, cfg: &QuadConfig) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut m = 256.min(cfg.max_nodes);
    let mut prev = trapezoid_level(f, m)?;
    loop {
        let next = m * 2;
        if next > cfg.max_nodes {
            return Err(Error::NoConvergence { estimate: prev });
        }
        m = next;
        let cur = trapezoid_level(f, m)?;
        if converged(cur, prev, cfg) {
            return Ok((cur, m));
        }
        prev = cur;
    }
}

fn adaptive_bisection<F>(f: &F, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let two_pi = 2.0 * std::f64::consts::PI;
    let panels = 16;
    let mut budget = cfg.max_nodes as i64;
    let mut parts = Vec::with_capacity(panels);
    for i in 0..panels {
        let a = two_pi * i as f64 / panels as f64;
        let b = two_pi * (i + 1) as f64 / panels as f64;
        let fa = eval_offset(f, a, (b - a) / 2.0)?;
        let fb = eval_offset(f, b, (b - a) / 2.0)?;
        let tol = cfg.abs_tol * two_pi / panels as f64;
        parts.push(simpson_panel(f, a, b, fa, fb, tol, 40, &mut budget)?);
    }
    Ok(pairwise_sum(&parts) / two_pi)
}

#[allow(clippy::too_many_arguments)]
fn simpson_panel<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    tol: f64,
    depth: usize,
    budget: &mut i64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let fm = eval_offset(f, m, (b - a) / 4.0)?;
    *budget -= 1;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval_offset(f, lm, (b - a) / 8.0)?;
    let frm = eval_offset(f, rm, (b - a) / 8.0)?;
    *budget -= 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    // refusing at the depth cap keeps non-convergence honest
    if depth == 0 || *budget < 0 {
        return Err(Error::NoConvergence {
            estimate: (left + right + err / 15.0) / (b - a),
        });
    }
    Ok(
        simpson_panel(f, a, m, fa, fm, tol / 2.0, depth - 1, budget)?
            + simpson_panel(f, m, b, fm, fb, tol / 2.0, depth - 1, budget)?,
    )
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub(crate) fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 1..=n {
        // Newton iteration from the Chebyshev initial guess
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (1.0 - x)); // map [-1,1] -> [0,1], ascending
        weights.push(0.5 * w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `∫_D g dA` with `A` normalized area. Radial direction uses
/// Gauss-Legendre after the substitution `r = u^2` (clusters nodes at the
/// origin, where Littlewood-Paley integrands carry a `log(1/|z|)` factor);
/// the angle uses the uniform trapezoid. Both directions double until the
/// tolerance is met.
pub fn disk_integral<G>(g: G, cfg: &QuadConfig) -> Result<f64>
where
    G: Fn(Complex64) -> Result<f64>,
{
    let level = |nr: usize, na: usize| -> Result<f64> {
        let (u, wu) = gauss_legendre_01(nr);
        let step = 2.0 * std::f64::consts::PI / na as f64;
        let mut ring_means = Vec::with_capacity(nr);
        let mut ring = Vec::with_capacity(na);
        for i in 0..nr {
            let r = u[i] * u[i];
            ring.clear();
            for j in 0..na {
                let theta = j as f64 * step;
                let v = match g(Complex64::from_polar(r, theta)) {
                    Err(Error::SingularBoundaryPoint { .. }) => {
                        g(Complex64::from_polar(r, theta + step / 2.0))?
                    }
                    other => other?,
                };
                ring.push(v);
            }
            // ∫0^1 g 2r dr = ∫0^1 4 u^3 g(u^2) du
            ring_means.push(wu[i] * 4.0 * u[i].powi(3) * pairwise_sum(&ring) / na as f64);
        }
        Ok(pairwise_sum(&ring_means))
    };
    let mut nr = 32;
    let mut na = 256;
    let mut prev = level(nr, na)?;
    loop {
        nr *= 2;
        na *= 2;
        if nr * na > cfg.max_nodes {
            return Err(Error::NoConvergence { estimate: prev });
        }
        let cur = level(nr, na)?;
        if converged(cur, prev, cfg) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Closed form and direct partial summation of the normalized energy
/// defect `(1 - c^2) * sum_{n>=1} c^{2n-2}/(n+1)`, the factor by which the
/// Möbius energy integral falls short of `1 - |a|^2`. It decreases from
/// `1/2` at `c = 0` toward zero as `c -> 1`.
#[derive(Debug, Clone, Copy)]
pub struct EnergyDefect {
    pub closed_form: f64,
    pub partial_sum: f64,
    /// Terms summed before the first term below `1e-16`.
    pub n_terms: usize,
}

/// `S(c) = sum_{n>=1} c^{2n-2}/(n+1) = -(x + log(1-x))/x^2` with `x = c^2`
/// (limit `1/2` at `c = 0`).
pub(crate) fn geometric_series_s(c: f64) -> f64 {
    let x = c * c;
    if x < 1e-3 {
        // series tail: 1/2 + x/3 + x^2/4 + ... avoids cancellation
        let mut s = 0.0;
        let mut xp = 1.0;
        for n in 1..12 {
            s += xp / (n as f64 + 1.0);
            xp *= x;
        }
        s
    } else {
        -(x + (-x).ln_1p()) / (x * x)
    }
}

pub fn moebius_energy_defect(c: f64) -> EnergyDefect {
    assert!((0.0..1.0).contains(&c), "moebius_energy_defect requires 0 <= c < 1");
    let closed_form = (1.0 - c * c) * geometric_series_s(c);
    let mut partial_sum = 0.0;
    let mut n_terms = 0usize;
    let mut cp = 1.0; // c^(2n-2)
    loop {
        let n = n_terms + 1;
        let term = (1.0 - c * c) * cp / (n as f64 + 1.0);
        partial_sum += term;
        n_terms += 1;
        if term < 1e-16 {
            break;
        }
        cp *= c * c;
    }
    EnergyDefect {
        closed_form,
        partial_sum,
        n_terms,
    }
}

/// Both evaluations of the Möbius energy integral
/// `∫_D (1 - |w|^2) |phi_a'(w)|^2 dA(w)`: disk quadrature and the closed
/// form `(1 - |a|^2) [1 - (1 - |a|^2) S(|a|)]`.
#[derive(Debug, Clone, Copy)]
pub struct MoebiusEnergy {
    pub quadrature: f64,
    pub closed_form: f64,
}

pub fn moebius_energy(a: Complex64, cfg: &QuadConfig) -> Result<MoebiusEnergy> {
    assert!(a.norm() < 1.0, "moebius_energy requires |a| < 1");
    let asq = a.norm_sqr();
    let closed_form = (1.0 - asq) * (1.0 - (1.0 - asq) * geometric_series_s(a.norm()));
    let quadrature = disk_integral(
        |w| {
            let d = 1.0 - a.conj() * w;
            let dphi = (1.0 - asq) / d.norm_sqr();
            Ok((1.0 - w.norm_sqr()) * dphi * dphi)
        },
        cfg,
    )?;
    Ok(MoebiusEnergy {
        quadrature,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_constant_is_one() {
        let cfg = QuadConfig::default();
        let v = circle_integral(|_| Ok(1.0), &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn circle_poisson_kernel_has_unit_mean() {
        let cfg = QuadConfig::default();
        for &r in &[0.5, 0.9, 0.99] {
            let v = circle_integral(
                |t| Ok((1.0 - r * r) / (Complex64::from_polar(1.0, t) * r - 1.0).norm_sqr()),
                &cfg,
            )
            .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "r = {r}: {v}");
        }
    }

    #[test]
    fn circle_closed_form_example() {
        // ∫ dm / |1 - 0.5 e^{i t}|^2 = 1/(1 - 0.25)
        let cfg = QuadConfig::default();
        let v = circle_integral(
            |t| Ok(1.0 / (1.0 - Complex64::from_polar(0.5, t)).norm_sqr()),
            &cfg,
        )
        .unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn adaptive_bisection_matches_doubling() {
        let cfg = QuadConfig {
            refinement: Refinement::AdaptiveBisection,
            ..QuadConfig::default()
        };
        let v = circle_integral(
            |t| Ok((1.0 - 0.81) / (1.0 - Complex64::from_polar(0.9, t)).norm_sqr()),
            &cfg,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn disk_constant_and_moment() {
        let cfg = QuadConfig::default();
        let one = disk_integral(|_| Ok(1.0), &cfg).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let sq = disk_integral(|z| Ok(z.norm_sqr()), &cfg).unwrap();
        assert!((sq - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disk_radial_polynomials_exact() {
        let cfg = QuadConfig::default();
        for k in 1..=6u32 {
            let v = disk_integral(|z| Ok(z.norm_sqr().powi(k as i32)), &cfg).unwrap();
            let want = 1.0 / (k as f64 + 1.0);
            assert!((v - want).abs() < 1e-10, "k = {k}: {v}");
        }
    }

    #[test]
    fn disk_log_singularity() {
        // ∫ log(1/|z|) dA = 1/2
        let cfg = QuadConfig::default();
        let v = disk_integral(|z| Ok((1.0 / z.norm()).ln()), &cfg).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn energy_defect_examples() {
        assert!((moebius_energy_defect(0.0).closed_form - 0.5).abs() < 1e-15);
        let l = moebius_energy_defect(0.9);
        assert!((l.closed_form - l.partial_sum).abs() < 1e-12);
        // independent oracle: direct summation gives 0.2463632515...
        assert!((l.closed_form - 0.2463632515).abs() < 1e-9, "{}", l.closed_form);
        // decreasing toward zero
        assert!(moebius_energy_defect(0.999).closed_form < moebius_energy_defect(0.99).closed_form);
    }

    #[test]
    fn energy_defect_grid_agreement_and_monotone() {
        let mut prev = f64::INFINITY;
        for i in 1..=19 {
            let c = 0.05 * i as f64;
            let l = moebius_energy_defect(c);
            assert!(
                (l.closed_form - l.partial_sum).abs() < 1e-12,
                "c = {c}: {} vs {}",
                l.closed_form,
                l.partial_sum
            );
            assert!(l.closed_form < prev, "not decreasing at c = {c}");
            prev = l.closed_form;
        }
    }

    #[test]
    fn moebius_energy_zero_case() {
        let cfg = QuadConfig::default();
        let e = moebius_energy(Complex64::new(0.0, 0.0), &cfg).unwrap();
        assert_eq!(e.closed_form, 0.5);
        assert!((e.quadrature - 0.5).abs() < 1e-12);
    }

    #[test]
    fn moebius_energy_agreement() {
        let cfg = QuadConfig::default();
        for &(re, im) in &[(0.3, 0.0), (0.6, 0.2), (0.9, 0.0)] {
            let e = moebius_energy(Complex64::new(re, im), &cfg).unwrap();
            assert!(
                (e.quadrature - e.closed_form).abs() < 1e-6,
                "a = {re}+{im}i: {} vs {}",
                e.quadrature,
                e.closed_form
            );
        }
        // frozen value for a = 0.9 (closed form, cross-checked by summation)
        let e = moebius_energy(Complex64::new(0.9, 0.0), &cfg).unwrap();
        assert!((e.closed_form - 0.1431909822).abs() < 1e-7);
    }

    #[test]
    fn no_convergence_carries_estimate() {
        let cfg = QuadConfig {
            max_nodes: 512,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..QuadConfig::default()
        };
        // pseudo-random integrand never settles at these tolerances
        let r = circle_integral(|t| Ok((1e6 * t).sin().abs()), &cfg);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}

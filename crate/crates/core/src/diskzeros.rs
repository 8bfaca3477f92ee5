//! Locates all solutions of `psi(z) = w` in the unit disk with
//! multiplicities. Rational catalog maps go through a simultaneous-iteration
//! polynomial solver (Aberth-Ehrlich) with Newton polishing; atomic inner
//! factors are enumerated in closed form; anything else falls back to
//! winding-driven quadtree subdivision. An argument-principle count over a
//! certification disk provides an independent check (`certify_preimages`).

use crate::mapspec::{MapExpr, SelfMap};
use crate::quad::pairwise_sum;
use crate::{poly, Complex64, Error, Result};

/// Roots are searched in `|z| < 1 - 1e-9`; the winding certification disk
/// uses the same radius. Nearer-boundary roots contribute at most ~1e-9
/// to the counting function and are accounted as truncated tail mass where
/// a closed form exists.
pub const SEARCH_RADIUS: f64 = 1.0 - 1e-9;
/// Cover radius of the quadtree fallback. Squares straddling the circle
/// multiply geometrically with depth, so the cover stops at a width where
/// the rim cascade stays shallow; the exact solver paths (rational form,
/// atomic enumeration) are not affected by this radius.
pub const SUBDIVISION_RADIUS: f64 = 0.999;
/// Roots beyond this modulus are flagged as boundary clusters.
pub const BOUNDARY_FLAG_RADIUS: f64 = 1.0 - 1e-12;
/// Polished roots closer than this merge into one root with summed
/// multiplicity.
pub const CLUSTER_RADIUS: f64 = 1e-7;
const MAX_QUADTREE_DEPTH: usize = 40;

/// A closed region whose closure must lie inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Disk { center: Complex64, radius: f64 },
    Square { center: Complex64, half_side: f64 },
}

impl Region {
    /// Largest modulus attained on the region closure.
    pub fn max_abs(&self) -> f64 {
        match *self {
            Region::Disk { center, radius } => center.norm() + radius,
            Region::Square { center, half_side } => {
                let corners = [
                    center + Complex64::new(half_side, half_side),
                    center + Complex64::new(half_side, -half_side),
                    center + Complex64::new(-half_side, half_side),
                    center + Complex64::new(-half_side, -half_side),
                ];
                corners.iter().map(|c| c.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Smallest modulus attained on the region closure.
    pub fn min_abs(&self) -> f64 {
        match *self {
            Region::Disk { center, radius } => (center.norm() - radius).max(0.0),
            Region::Square { center, half_side } => {
                let dx = (center.re.abs() - half_side).max(0.0);
                let dy = (center.im.abs() - half_side).max(0.0);
                (dx * dx + dy * dy).sqrt()
            }
        }
    }

    fn scaled(&self, factor: f64) -> Region {
        match *self {
            Region::Disk { center, radius } => Region::Disk {
                center,
                radius: radius * factor,
            },
            Region::Square { center, half_side } => Region::Square {
                center,
                half_side: half_side * factor,
            },
        }
    }

    /// Contour point and tangent `dz/dt` for `t` in `[0, 1)`.
    fn contour(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            Region::Disk { center, radius } => {
                let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t);
                (
                    center + radius * phase,
                    Complex64::new(0.0, 2.0 * std::f64::consts::PI) * radius * phase,
                )
            }
            Region::Square { center, half_side } => {
                let h = half_side;
                let s = 4.0 * t; // four unit-speed-in-s edges, counterclockwise
                let (p, d) = if s < 1.0 {
                    (
                        Complex64::new(-h + 2.0 * h * s, -h),
                        Complex64::new(2.0 * h, 0.0),
                    )
                } else if s < 2.0 {
                    (
                        Complex64::new(h, -h + 2.0 * h * (s - 1.0)),
                        Complex64::new(0.0, 2.0 * h),
                    )
                } else if s < 3.0 {
                    (
                        Complex64::new(h - 2.0 * h * (s - 2.0), h),
                        Complex64::new(-2.0 * h, 0.0),
                    )
                } else {
                    (
                        Complex64::new(-h, h - 2.0 * h * (s - 3.0)),
                        Complex64::new(0.0, -2.0 * h),
                    )
                };
                (center + p, 4.0 * d)
            }
        }
    }
}

/// Certified solution set of `psi(z) = w` in the disk.
#[derive(Debug, Clone)]
pub struct PreimageSet {
    pub target: Complex64,
    /// Roots with multiplicities, sorted by (modulus, argument).
    pub roots: Vec<(Complex64, u32)>,
    /// Total multiplicity of the listed roots.
    pub certified_total: u32,
    /// Max residual `|psi(z) - w|` over the listed roots.
    pub residual_bound: f64,
    /// Indices of roots with `|z| > 1 - 1e-12`.
    pub boundary_flags: Vec<usize>,
    /// Counting-function mass of roots beyond the search radius that were
    /// not listed (closed-form tail for atomic maps, else best effort).
    pub truncated_tail_mass: f64,
}

impl PreimageSet {
    /// `sum multiplicity * (-log |z|)` over the listed roots.
    pub fn counting_sum(&self) -> f64 {
        let terms: Vec<f64> = self
            .roots
            .iter()
            .map(|(z, m)| -(z.norm().ln()) * f64::from(*m))
            .collect();
        pairwise_sum(&terms)
    }

    /// Counting mass carried by boundary-flagged roots.
    pub fn flagged_mass(&self) -> f64 {
        self.boundary_flags
            .iter()
            .map(|&i| {
                let (z, m) = self.roots[i];
                -(z.norm().ln()) * f64::from(m)
            })
            .sum()
    }
}

/// Argument-principle count of zeros of `psi - w` in the region: the
/// integer nearest `(1/2pi i) ∮ psi'/(psi - w) dz`, computed by an
/// adaptive trapezoid on the region contour.
pub fn winding_count(map: &SelfMap, w: Complex64, region: Region) -> Result<i64> {
    winding_count_perturbed(map, w, region).map(|(k, _)| k)
}

/// As `winding_count`, retrying with slightly perturbed region sizes when
/// a root sits too close to the contour; returns the region actually used.
pub fn winding_count_perturbed(
    map: &SelfMap,
    w: Complex64,
    region: Region,
) -> Result<(i64, Region)> {
    let extent = match region {
        Region::Disk { radius, .. } => radius,
        Region::Square { half_side, .. } => half_side,
    };
    if !(extent > 0.0) {
        return Err(Error::Domain("region extent must be positive".into()));
    }
    if region.max_abs() >= 1.0 {
        return Err(Error::RegionOutsideDomain);
    }
    let scales = [1.0, 1.0 - 1e-6, 1.0 + 1e-6, 1.0 - 1e-5, 1.0 + 1e-5, 1.0 - 1e-4, 1.0 + 1e-4];
    let mut last = Err(Error::BoundaryRootSuspected { value: f64::NAN });
    for &s in &scales {
        let r = region.scaled(s);
        if r.max_abs() >= 1.0 {
            continue;
        }
        match winding_once(map, w, r) {
            Ok(k) => return Ok((k, r)),
            Err(e @ Error::BoundaryRootSuspected { .. }) => last = Err(e),
            Err(e) => return Err(e),
        }
    }
    last.map(|k| (k, region))
}

fn winding_once(map: &SelfMap, w: Complex64, region: Region) -> Result<i64> {
    let level = |m: usize| -> Result<Option<Complex64>> {
        let mut re = Vec::with_capacity(m);
        let mut im = Vec::with_capacity(m);
        for j in 0..m {
            // midpoint nodes keep square corners (tangent jumps) off the grid
            let (z, dz) = region.contour((j as f64 + 0.5) / m as f64);
            let denom = map.eval_closed(z)? - w;
            if denom.norm() <= 1e-13 {
                return Ok(None); // root on the contour: caller perturbs
            }
            let v = map.expr().deriv_closed(z)? / denom * dz;
            re.push(v.re);
            im.push(v.im);
        }
        Ok(Some(
            Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
                / (m as f64)
                / Complex64::new(0.0, 2.0 * std::f64::consts::PI),
        ))
    };
    // two consecutive level agreements guard against a near-contour pole
    // slipping between the nodes of a single pair of levels
    let mut m = 128;
    let mut prev: Option<Complex64> = None;
    let mut streak = 0usize;
    let mut last_val = f64::NAN;
    while m <= 1 << 17 {
        match level(m)? {
            None => {
                return Err(Error::BoundaryRootSuspected { value: f64::NAN });
            }
            Some(cur) => {
                last_val = cur.re;
                if let Some(p) = prev {
                    if (cur - p).norm() < 0.05 {
                        streak += 1;
                    } else {
                        streak = 0;
                    }
                }
                let nearest = cur.re.round();
                if streak >= 2
                    && (cur.re - nearest).abs() <= 0.25
                    && cur.im.abs() <= 0.25
                    && nearest >= 0.0
                {
                    return Ok(nearest as i64);
                }
                prev = Some(cur);
            }
        }
        m *= 2;
    }
    Err(Error::BoundaryRootSuspected { value: last_val })
}

/// Aberth-Ehrlich simultaneous iteration; returns all roots of the
/// polynomial (ascending coefficients, trimmed, degree >= 1).
pub(crate) fn aberth_all_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = poly::degree(coeffs);
    debug_assert!(d >= 1);
    let lead = coeffs[d];
    // Cauchy bound for the root radius
    let bound = 1.0
        + coeffs[..d]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| {
            // global phase offset breaks real-axis symmetry traps
            Complex64::from_polar(
                bound * 0.7,
                2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.45,
            )
        })
        .collect();
    for _ in 0..300 {
        let mut max_step = 0.0f64;
        for i in 0..d {
            let (p, dp) = poly::eval_with_deriv(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(1e-3 * bound, 1e-3 * bound)
            };
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 1e-300 {
                        rep += 1.0 / diff;
                    }
                }
            }
            let denom = 1.0 - ratio * rep;
            let step = if denom.norm() > 1e-12 { ratio / denom } else { ratio };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Newton polish of a root of `psi - w` on the actual map.
fn polish(map: &SelfMap, w: Complex64, z0: Complex64) -> (Complex64, f64) {
    let residual = |z: Complex64| (map.eval_closed(z).map(|v| (v - w).norm())).unwrap_or(f64::MAX);
    let mut z = z0;
    let mut best = z0;
    let mut best_res = residual(z0);
    for _ in 0..80 {
        let Ok(v) = map.eval_closed(z) else { break };
        let Ok(dv) = map.expr().deriv_closed(z) else { break };
        if dv.norm() < 1e-300 {
            break;
        }
        let step = (v - w) / dv;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.5 {
            break;
        }
        let r = residual(z);
        if r < best_res {
            best_res = r;
            best = z;
        }
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    (best, best_res)
}

/// Merge roots closer than `CLUSTER_RADIUS` into one root of summed
/// multiplicity (centroid location).
fn cluster_roots(mut pts: Vec<(Complex64, u32)>) -> Vec<(Complex64, u32)> {
    pts.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then_with(|| a.0.im.total_cmp(&b.0.im))
    });
    let mut clusters: Vec<(Complex64, u32)> = Vec::new();
    for (z, m) in pts {
        if let Some((cz, cm)) = clusters
            .iter_mut()
            .find(|(cz, _)| (*cz - z).norm() <= CLUSTER_RADIUS)
        {
            let total = *cm + m;
            *cz = (*cz * f64::from(*cm) + z * f64::from(m)) / f64::from(total);
            *cm = total;
        } else {
            clusters.push((z, m));
        }
    }
    clusters
}

fn sort_roots(roots: &mut [(Complex64, u32)]) {
    let arg_key = |z: &Complex64| {
        let a = z.arg();
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    };
    roots.sort_by(|a, b| {
        a.0.norm()
            .total_cmp(&b.0.norm())
            .then_with(|| arg_key(&a.0).total_cmp(&arg_key(&b.0)))
    });
}

fn assemble(
    map: &SelfMap,
    w: Complex64,
    tol: f64,
    mut roots: Vec<(Complex64, u32)>,
    truncated_tail_mass: f64,
) -> Result<PreimageSet> {
    sort_roots(&mut roots);
    if roots.iter().any(|(z, _)| z.norm() < 1e-13) {
        return Err(Error::InfiniteValue);
    }
    let mut residual_bound = 0.0f64;
    for (z, _) in &roots {
        let r = (map.eval_closed(*z)? - w).norm();
        residual_bound = residual_bound.max(r);
    }
    if residual_bound > tol {
        return Err(Error::NonconvergentRoot {
            residual: residual_bound,
        });
    }
    let boundary_flags = roots
        .iter()
        .enumerate()
        .filter(|(_, (z, _))| z.norm() > BOUNDARY_FLAG_RADIUS)
        .map(|(i, _)| i)
        .collect();
    Ok(PreimageSet {
        target: w,
        certified_total: roots.iter().map(|(_, m)| m).sum(),
        roots,
        residual_bound,
        boundary_flags,
        truncated_tail_mass,
    })
}

/// Solve `psi(z) = w` for `|w| < 1`. Roots are Newton-polished to residual
/// `<= tol`, merged into multiplicity clusters, sorted by (modulus,
/// argument), and boundary-flagged. Fails with `InfiniteValue` at
/// `w = psi(0)` (a preimage at the origin).
pub fn solve_preimages(map: &SelfMap, w: Complex64, tol: f64) -> Result<PreimageSet> {
    if w.norm() >= 1.0 || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain("target w must satisfy |w| < 1".into()));
    }
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Domain("tolerance must lie in [1e-14, 1e-6]".into()));
    }
    if map.value_at_zero() == w {
        return Err(Error::InfiniteValue);
    }
    let (roots, tail) = solve_expr(map, w, tol)?;
    assemble(map, w, tol, roots, tail)
}

fn solve_expr(map: &SelfMap, w: Complex64, tol: f64) -> Result<(Vec<(Complex64, u32)>, f64)> {
    if let Some(rf) = map.rational_form() {
        return solve_rational(map, &rf.num, &rf.den, w, tol);
    }
    match map.expr() {
        // quarter of the budget leaves headroom for outer compositions
        MapExpr::AtomicInner(t) => Ok(atomic_preimages(*t, w, 0.25 * tol)),
        MapExpr::Scale(r, g) => {
            let target = w / *r;
            if target.norm() >= 1.0 {
                return Ok((vec![], 0.0));
            }
            let inner = SelfMap::new_trusted((**g).clone())?;
            solve_expr(&inner, target, tol)
        }
        MapExpr::Compose(f, g) => {
            let outer = SelfMap::new_trusted((**f).clone())?;
            let inner = SelfMap::new_trusted((**g).clone())?;
            let (outer_roots, outer_tail) = solve_expr(&outer, w, tol)?;
            let mut roots = Vec::new();
            let mut tail = outer_tail; // best-effort marker; see module docs
            for (u, mu) in outer_roots {
                let (inner_roots, inner_tail) = solve_expr(&inner, u, tol)?;
                tail += inner_tail * f64::from(mu);
                for (z, mz) in inner_roots {
                    roots.push((z, mu * mz));
                }
            }
            Ok((roots, tail))
        }
        // no rational form and no decomposable structure
        _ => solve_by_subdivision_raw(map, w, tol),
    }
}

fn solve_rational(
    map: &SelfMap,
    num: &[Complex64],
    den: &[Complex64],
    w: Complex64,
    tol: f64,
) -> Result<(Vec<(Complex64, u32)>, f64)> {
    let p = poly::trim(poly::sub(num, &poly::scale(den, w)));
    if p.is_empty() {
        return Err(Error::InfiniteValue); // psi identically w
    }
    if p.len() == 1 {
        return Ok((vec![], 0.0));
    }
    let mut roots = Vec::new();
    for cand in aberth_all_roots(&p) {
        if cand.norm() > 1.02 {
            continue;
        }
        let (z, _res) = polish(map, w, cand);
        if z.norm() < 1.0 {
            roots.push((z, 1u32));
        }
    }
    let _ = tol;
    Ok((cluster_roots(roots), 0.0))
}

/// Closed-form enumeration of `exp(t (z+1)/(z-1)) = w`: the full preimage
/// set is `z_k = (mu_k + 1)/(mu_k - 1)` with
/// `mu_k = (log|w| + i (arg w + 2 pi k))/t`, accumulating at `z = 1`.
///
/// Listing is self-limiting: far branches hug `z = 1` where the forward
/// evaluation of the map is too ill-conditioned in `f64` to verify the
/// residual, so the scan stops once the residual degrades beyond
/// `residual_cut`. The remaining counting mass is exact, as the closed-form
/// total minus the listed sum.
fn atomic_preimages(
    t: f64,
    w: Complex64,
    residual_cut: f64,
) -> (Vec<(Complex64, u32)>, f64) {
    if w.norm() == 0.0 {
        return (vec![], 0.0); // exp omits zero
    }
    let lw = w.norm().ln();
    let tw = w.arg();
    let root_at = |k: i64| -> Complex64 {
        let mu = Complex64::new(lw, tw + 2.0 * std::f64::consts::PI * k as f64) / t;
        (mu + 1.0) / (mu - 1.0)
    };
    let residual_at = |z: Complex64| (t * (z + 1.0) / (z - 1.0)).exp() - w;
    let mut roots = Vec::new();
    let mut scan = |mut k: i64, step: i64| {
        loop {
            let z = root_at(k);
            let listable = z.norm() < SEARCH_RADIUS && residual_at(z).norm() <= residual_cut;
            if listable {
                roots.push((z, 1u32));
            } else if k.abs() > 2 {
                break;
            }
            k += step;
            if k.abs() > 100_000_000 {
                break;
            }
        }
    };
    scan(0, 1);
    scan(-1, -1);
    let listed: Vec<f64> = roots.iter().map(|(z, _)| -(z.norm().ln())).collect();
    let tail = (atomic_counting_total(t, w) - pairwise_sum(&listed)).max(0.0);
    (roots, tail)
}

/// Closed form for the full counting sum of an atomic inner map:
/// `N(w) = (1/2) log [ (cosh(t - log|w|) - cos arg w) / (cosh(t + log|w|) - cos arg w) ]`,
/// obtained by the Poisson-type summation of `-log|z_k|` over all branches.
pub fn atomic_counting_total(t: f64, w: Complex64) -> f64 {
    let lw = w.norm().ln();
    let tw = w.arg();
    0.5 * (ln_cosh_minus_cos(t - lw, tw) - ln_cosh_minus_cos(t + lw, tw))
}

fn ln_cosh_minus_cos(s: f64, theta: f64) -> f64 {
    let s = s.abs();
    if s > 30.0 {
        // cosh s - cos θ = (e^s/2)(1 + e^{-2s} - 2 cos θ e^{-s})
        s - std::f64::consts::LN_2 + (1.0 + (-2.0 * s).exp() - 2.0 * theta.cos() * (-s).exp()).ln()
    } else {
        (s.cosh() - theta.cos()).ln()
    }
}

/// Quadtree subdivision driven by winding counts; works for any map and
/// serves as a cross-check of the polynomial path.
pub fn solve_preimages_subdivision(map: &SelfMap, w: Complex64, tol: f64) -> Result<PreimageSet> {
    if w.norm() >= 1.0 {
        return Err(Error::Domain("target w must satisfy |w| < 1".into()));
    }
    if map.value_at_zero() == w {
        return Err(Error::InfiniteValue);
    }
    let (roots, tail) = solve_by_subdivision_raw(map, w, tol)?;
    let set = assemble(map, w, tol, roots, tail)?;
    certify_preimages(map, &set)?;
    Ok(set)
}

fn solve_by_subdivision_raw(
    map: &SelfMap,
    w: Complex64,
    tol: f64,
) -> Result<(Vec<(Complex64, u32)>, f64)> {
    let (total, cert_region) = winding_count_perturbed(
        map,
        w,
        Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: SUBDIVISION_RADIUS,
        },
    )?;
    if total == 0 {
        return Ok((vec![], 0.0));
    }
    let cert_radius = match cert_region {
        Region::Disk { radius, .. } => radius,
        _ => SUBDIVISION_RADIUS,
    };
    let mut candidates: Vec<Complex64> = Vec::new();
    let mut multi: Vec<(Complex64, u32)> = Vec::new();
    // the cover is centered off the axes so that real or imaginary roots
    // (the common case) never lie exactly on a quadtree gridline
    let mut stack = vec![(
        Region::Square {
            center: Complex64::new(3.7e-3, 2.1e-3),
            half_side: 1.01,
        },
        0usize,
    )];
    while let Some((sq, depth)) = stack.pop() {
        if sq.min_abs() > cert_radius {
            continue;
        }
        let (center, half) = match sq {
            Region::Square { center, half_side } => (center, half_side),
            _ => unreachable!(),
        };
        let interior = sq.max_abs() < 1.0 - 1e-12;
        if interior {
            let count = match winding_count_perturbed(map, w, sq) {
                Ok((k, _)) => k,
                // persistent root-on-contour: keep splitting
                Err(Error::BoundaryRootSuspected { .. }) => {
                    if depth >= MAX_QUADTREE_DEPTH {
                        return Err(Error::NonconvergentRoot { residual: f64::NAN });
                    }
                    push_children(&mut stack, center, half, depth);
                    continue;
                }
                Err(e) => return Err(e),
            };
            if count == 0 {
                continue;
            }
            if count == 1 && half <= 1e-6 {
                let (z, _res) = polish(map, w, center);
                if z.norm() < 1.0 {
                    candidates.push(z);
                }
                continue;
            }
            if half <= 1e-4 {
                // unresolved cluster: a multiple root or roots closer than
                // the contour guard lets the winding separate (for a
                // multiplicity-m root, |psi - w| ~ d^m caps how close the
                // contour may pass, so clusters must be declared at this
                // scale while the count is still computable)
                let (z, _res) = polish(map, w, center);
                multi.push((if z.norm() < 1.0 { z } else { center }, count as u32));
                continue;
            }
            if depth >= MAX_QUADTREE_DEPTH {
                // an active square that can no longer split
                return Err(Error::NonconvergentRoot { residual: f64::NAN });
            }
        }
        if depth < MAX_QUADTREE_DEPTH {
            push_children(&mut stack, center, half, depth);
        }
    }
    // dedupe simple-root candidates found from adjacent squares
    let mut roots: Vec<(Complex64, u32)> = Vec::new();
    candidates.sort_by(|a, b| a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im)));
    for z in candidates {
        if !roots.iter().any(|(r, _)| (*r - z).norm() <= CLUSTER_RADIUS) {
            roots.push((z, 1));
        }
    }
    // winding-backed clusters supersede any escaped Newton singles nearby
    for (z, m) in multi {
        match roots
            .iter_mut()
            .find(|(r, _)| (*r - z).norm() <= CLUSTER_RADIUS)
        {
            Some(entry) => *entry = (z, m),
            None => roots.push((z, m)),
        }
    }
    let _ = tol;
    Ok((roots, 0.0))
}

fn push_children(
    stack: &mut Vec<(Region, usize)>,
    center: Complex64,
    half: f64,
    depth: usize,
) {
    let h = half / 2.0;
    for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
        stack.push((
            Region::Square {
                center: center + Complex64::new(dx * h, dy * h),
                half_side: h,
            },
            depth + 1,
        ));
    }
}

/// Independent certification of a solved preimage set: compares the total
/// listed multiplicity against a winding count over a disk whose radius is
/// chosen away from all root moduli (so the contour integrand stays
/// resolvable), up to `SEARCH_RADIUS`.
pub fn certify_preimages(map: &SelfMap, set: &PreimageSet) -> Result<i64> {
    let mut radius = if map.expr().contains_atomic() {
        // contour oscillation from the essential singularity caps the
        // usable certification radius
        0.99
    } else {
        SEARCH_RADIUS
    };
    for _ in 0..16 {
        let near = set
            .roots
            .iter()
            .map(|(z, _)| (z.norm() - radius).abs())
            .fold(f64::INFINITY, f64::min);
        if near >= 4e-3 || radius < 0.5 {
            break;
        }
        let offending = set
            .roots
            .iter()
            .map(|(z, _)| z.norm())
            .filter(|r| (r - radius).abs() < 4e-3)
            .fold(f64::NEG_INFINITY, f64::max);
        radius = offending - 4.5e-3;
    }
    let (count, used) = winding_count_perturbed(
        map,
        set.target,
        Region::Disk {
            center: Complex64::new(0.0, 0.0),
            radius,
        },
    )?;
    let used_radius = match used {
        Region::Disk { radius, .. } => radius,
        _ => radius,
    };
    let inside: u32 = set
        .roots
        .iter()
        .filter(|(z, _)| z.norm() < used_radius)
        .map(|(_, m)| m)
        .sum();
    if i64::from(inside) != count {
        return Err(Error::CertificationMismatch {
            found: inside,
            winding: count,
        });
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapspec::SelfMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(radius: f64) -> Region {
        Region::Disk {
            center: c(0.0, 0.0),
            radius,
        }
    }

    #[test]
    fn winding_examples() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        assert_eq!(winding_count(&mono, c(0.25, 0.0), disk(0.9)).unwrap(), 2);
        let mob = SelfMap::parse("mobius(0.5)").unwrap();
        assert_eq!(winding_count(&mob, c(0.2, 0.0), disk(0.99)).unwrap(), 1);
        // double root at the origin
        assert_eq!(winding_count(&mono, c(0.0, 0.0), disk(0.1)).unwrap(), 2);
    }

    #[test]
    fn winding_square_region() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        let sq = Region::Square {
            center: c(0.5, 0.0),
            half_side: 0.2,
        };
        assert_eq!(winding_count(&mono, c(0.25, 0.0), sq).unwrap(), 1);
    }

    #[test]
    fn winding_rejects_outside_region() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        assert!(matches!(
            winding_count(&mono, c(0.0, 0.0), disk(1.2)),
            Err(Error::RegionOutsideDomain)
        ));
    }

    #[test]
    fn solve_monomial_square_roots() {
        let mono = SelfMap::parse("monomial(2)").unwrap();
        let set = solve_preimages(&mono, c(0.25, 0.0), 1e-12).unwrap();
        assert_eq!(set.certified_total, 2);
        assert_eq!(set.roots.len(), 2);
        let mods: Vec<f64> = set.roots.iter().map(|(z, _)| z.norm()).collect();
        assert!((mods[0] - 0.5).abs() < 1e-12 && (mods[1] - 0.5).abs() < 1e-12);
        assert!(set.residual_bound <= 1e-12);
        certify_preimages(&mono, &set).unwrap();
    }

    #[test]
    fn solve_mobius_involution() {
        // phi_a is an involution, so the preimage of w is phi_a(w)
        let mob = SelfMap::parse("mobius(0.5)").unwrap();
        let set = solve_preimages(&mob, c(0.2, 0.0), 1e-12).unwrap();
        assert_eq!(set.certified_total, 1);
        assert!((set.roots[0].0 - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn solve_blaschke_zeros() {
        let b = SelfMap::parse("blaschke(0, 0.5)").unwrap();
        // w = 0 hits psi(0) = 0: infinite counting value
        assert!(matches!(
            solve_preimages(&b, c(0.0, 0.0), 1e-12),
            Err(Error::InfiniteValue)
        ));
        let set = solve_preimages(&b, c(0.1, 0.0), 1e-12).unwrap();
        assert_eq!(set.certified_total, 2);
    }

    #[test]
    fn solve_const_map() {
        let k = SelfMap::parse("const(0.3)").unwrap();
        // empty preimage off the constant value
        let set = solve_preimages(&k, c(0.7, 0.0), 1e-12).unwrap();
        assert!(set.roots.is_empty());
        assert_eq!(set.certified_total, 0);
        // at the constant value the whole disk is the preimage
        assert!(matches!(
            solve_preimages(&k, c(0.3, 0.0), 1e-12),
            Err(Error::InfiniteValue)
        ));
    }

    #[test]
    fn multiple_root_multiplicity() {
        // psi(z) = z^2 has a double root at z = 0 for w = 0, which is the
        // infinite-value case; shift with a Blaschke factor instead:
        // compose(monomial(2), mobius(0.5)) = phi(z)^2 where phi = phi_0.5;
        // w = phi(c)^2 with c = phi(0.5i)... simpler: poly z^2 - shifted.
        // (z - 0.3)^2 scaled: poly(0.045, -0.3, 0.5) = 0.5(z-0.3)^2 + 0
        let m = SelfMap::parse("poly(0.045, -0.3, 0.5)").unwrap();
        let set = solve_preimages(&m, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(set.certified_total, 2);
        assert_eq!(set.roots.len(), 1, "double root should cluster");
        assert_eq!(set.roots[0].1, 2);
        assert!((set.roots[0].0 - c(0.3, 0.0)).norm() < 1e-5);
        certify_preimages(&m, &set).unwrap();
    }

    #[test]
    fn subdivision_finds_multiple_root() {
        // 0.5 (z - 0.3)^2: double root away from the origin exercises the
        // unresolved-cluster branch of the quadtree
        let m = SelfMap::parse("poly(0.045, -0.3, 0.5)").unwrap();
        let set = solve_preimages_subdivision(&m, c(0.0, 0.0), 1e-10).unwrap();
        assert_eq!(set.certified_total, 2);
        assert_eq!(set.roots.len(), 1);
        assert!((set.roots[0].0 - c(0.3, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn subdivision_agrees_with_rational_path() {
        for (spec, w) in [
            ("monomial(2)", c(0.25, 0.1)),
            ("blaschke(0, 0.5)", c(-0.2, 0.3)),
            ("mobius(0.3)", c(0.4, -0.2)),
        ] {
            let map = SelfMap::parse(spec).unwrap();
            let a = solve_preimages(&map, w, 1e-10).unwrap();
            let b = solve_preimages_subdivision(&map, w, 1e-10).unwrap();
            assert_eq!(a.certified_total, b.certified_total, "{spec}");
            for ((za, _), (zb, _)) in a.roots.iter().zip(&b.roots) {
                assert!((za - zb).norm() < 1e-8, "{spec}: {za} vs {zb}");
            }
        }
    }

    #[test]
    fn atomic_enumeration_matches_closed_form() {
        let t = 1.0;
        let map = SelfMap::parse("atomic(1)").unwrap();
        let w = c(0.5, 0.2);
        let set = solve_preimages(&map, w, 1e-10).unwrap();
        assert!(set.certified_total > 100);
        let total = set.counting_sum() + set.truncated_tail_mass;
        let closed = atomic_counting_total(t, w);
        assert!(
            (total - closed).abs() < 1e-9,
            "enumeration {total} vs closed {closed}"
        );
        assert!(set.residual_bound <= 1e-10);
        certify_preimages(&map, &set).unwrap();
    }

    #[test]
    fn composed_atomic_solves() {
        // mobius(0.3) ∘ atomic(1): outer is a bijection, so the count
        // matches the atomic count at the pulled-back target
        let map = SelfMap::parse("compose(mobius(0.3), atomic(1))").unwrap();
        let w = c(0.2, 0.1);
        let set = solve_preimages(&map, w, 1e-10).unwrap();
        assert!(set.certified_total > 100);
        assert!(set.residual_bound < 1e-10);
        certify_preimages(&map, &set).unwrap();
    }

    #[test]
    fn certification_random_rational_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let maps: Vec<SelfMap> = crate::mapspec::catalog_maps()
            .into_iter()
            .filter(|m| m.rational_form().is_some())
            .collect();
        let mut done = 0;
        'outer: for round in 0.. {
            for map in &maps {
                if done == 200 {
                    break 'outer;
                }
                let _ = round;
                let r = 0.92 * rng.gen::<f64>().sqrt();
                let t = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                let w = Complex64::from_polar(r, t);
                match solve_preimages(map, w, 1e-11) {
                    Ok(set) => {
                        certify_preimages(map, &set).unwrap_or_else(|e| {
                            panic!("{}: w = {w}: {e}", map.spec_string())
                        });
                        assert!(set.residual_bound <= 1e-11);
                        done += 1;
                    }
                    Err(Error::InfiniteValue) => continue,
                    Err(e) => panic!("{}: {e}", map.spec_string()),
                }
            }
        }
        assert_eq!(done, 200);
    }

    #[test]
    fn roots_sorted_and_deterministic() {
        let b = SelfMap::parse("blaschke(0.3, -0.4, 0.2i)").unwrap();
        let w = c(0.15, -0.05);
        let s1 = solve_preimages(&b, w, 1e-12).unwrap();
        let s2 = solve_preimages(&b, w, 1e-12).unwrap();
        assert_eq!(s1.roots.len(), s2.roots.len());
        for (a, b) in s1.roots.iter().zip(&s2.roots) {
            assert_eq!(a.0, b.0);
        }
        for pair in s1.roots.windows(2) {
            assert!(pair[0].0.norm() <= pair[1].0.norm() + 1e-15);
        }
    }
}

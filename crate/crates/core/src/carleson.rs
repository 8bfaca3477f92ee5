//! Empirical induced measure `mu_psi` (push-forward of normalized
//! arclength under the boundary values of `psi`), Carleson-window masses,
//! and the two vanishing diagnostics of the window/Poisson equivalence.

use crate::mapspec::SelfMap;
use crate::quad::pairwise_sum;
use crate::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};

/// Boundary box `S(h, theta0) = { r e^{i theta} : 1-h <= r <= 1, |theta - theta0| <= h }`.
#[derive(Debug, Clone, Copy)]
pub struct CarlesonWindow {
    pub h: f64,
    pub theta0: f64,
}

impl CarlesonWindow {
    pub fn new(h: f64, theta0: f64) -> Result<Self> {
        if !(0.0 < h && h <= 1.0) {
            return Err(Error::Domain("window size h must lie in (0, 1]".into()));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&theta0) {
            return Err(Error::Domain("theta0 must lie in [0, 2pi)".into()));
        }
        Ok(CarlesonWindow { h, theta0 })
    }
}

/// Weighted point masses on the closed disk.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    /// `(location, weight)` pairs with `|location| <= 1`, `weight > 0`.
    pub atoms: Vec<(Complex64, f64)>,
    /// Sum of the weights (1 for induced measures; restrictions keep their
    /// partial mass).
    pub total: f64,
}

impl EmpiricalMeasure {
    fn from_atoms(atoms: Vec<(Complex64, f64)>) -> Self {
        let weights: Vec<f64> = atoms.iter().map(|(_, w)| *w).collect();
        EmpiricalMeasure {
            total: pairwise_sum(&weights),
            atoms,
        }
    }

    /// Restriction to the annulus `|xi| >= r`, mirroring the proof's
    /// decomposition of a measure into a compact part and an outer part.
    /// The total is the retained (not renormalized) mass.
    pub fn restrict_outer(&self, r: f64) -> EmpiricalMeasure {
        EmpiricalMeasure::from_atoms(
            self.atoms
                .iter()
                .copied()
                .filter(|(xi, _)| xi.norm() >= r)
                .collect(),
        )
    }

    /// CSV export with header `re,im,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,weight\n");
        for (xi, w) in &self.atoms {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::report::fmt_f64(xi.re),
                crate::report::fmt_f64(xi.im),
                crate::report::fmt_f64(*w)
            ));
        }
        out
    }

    /// CSV import; validates the header, weight positivity, atom locations
    /// and total mass (within 1e-9 of one, then normalized exactly).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default().trim();
        if header != "re,im,weight" {
            return Err(Error::Malformed("expected header 're,im,weight'".into()));
        }
        let mut atoms = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Malformed(format!("row {}: expected 3 fields", i + 2)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Malformed(format!("row {}: bad number '{s}'", i + 2)))
            };
            let xi = Complex64::new(parse(fields[0])?, parse(fields[1])?);
            let w = parse(fields[2])?;
            if w <= 0.0 || w.is_nan() || !w.is_finite() {
                return Err(Error::Malformed(format!("row {}: weight must be positive", i + 2)));
            }
            if xi.norm() > 1.0 + 1e-9 {
                return Err(Error::Malformed(format!(
                    "row {}: atom outside the closed disk",
                    i + 2
                )));
            }
            atoms.push((clamp_to_disk(xi), w));
        }
        let total: f64 = pairwise_sum(&atoms.iter().map(|(_, w)| *w).collect::<Vec<_>>());
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Malformed(format!(
                "total mass {total} is not 1 within 1e-9"
            )));
        }
        for (_, w) in atoms.iter_mut() {
            *w /= total;
        }
        Ok(EmpiricalMeasure::from_atoms(atoms))
    }
}

fn clamp_to_disk(xi: Complex64) -> Complex64 {
    let n = xi.norm();
    if n > 1.0 {
        xi / n
    } else {
        xi
    }
}

/// Atoms `psi(e^{i theta_j})` at `n` uniform boundary angles, each of
/// weight `1/n`. Singular boundary nodes are offset by half a step.
pub fn induced_measure(map: &SelfMap, n: usize) -> Result<EmpiricalMeasure> {
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::Domain("atom count must be a power of two >= 256".into()));
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let w = 1.0 / n as f64;
    let mut atoms = Vec::with_capacity(n);
    for j in 0..n {
        let theta = j as f64 * step;
        let v = match map.boundary_value(theta) {
            Err(Error::SingularBoundaryPoint { .. }) => map.boundary_value(theta + step / 2.0)?,
            other => other?,
        };
        atoms.push((clamp_to_disk(v), w));
    }
    Ok(EmpiricalMeasure::from_atoms(atoms))
}

/// Seeded variant for stress tests: boundary angles drawn uniformly at
/// random instead of the deterministic grid.
pub fn induced_measure_seeded(map: &SelfMap, n: usize, seed: u64) -> Result<EmpiricalMeasure> {
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::Domain("atom count must be a power of two >= 256".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let w = 1.0 / n as f64;
    let mut atoms = Vec::with_capacity(n);
    while atoms.len() < n {
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        match map.boundary_value(theta) {
            Ok(v) => atoms.push((clamp_to_disk(v), w)),
            Err(Error::SingularBoundaryPoint { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(EmpiricalMeasure::from_atoms(atoms))
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Mass of the window: atoms with `|xi| >= 1 - h` and angular distance to
/// `theta0` at most `h`.
pub fn window_mass(measure: &EmpiricalMeasure, window: &CarlesonWindow) -> f64 {
    let mut picked = Vec::new();
    for (xi, w) in &measure.atoms {
        if xi.norm() >= 1.0 - window.h && angular_distance(xi.arg(), window.theta0) <= window.h {
            picked.push(*w);
        }
    }
    pairwise_sum(&picked)
}

/// Window-ratio profile `sup_theta0 mu(S(h, theta0)) / h`, indexed by a
/// decreasing window-size grid. The supremum scans a uniform `theta0` grid
/// and all windows whose edges align with atom angles (the supremum of an
/// atomic measure is attained there).
#[derive(Debug, Clone)]
pub struct WindowProfile {
    /// Decreasing window sizes.
    pub h: Vec<f64>,
    pub ratios: Vec<f64>,
    pub argmax_thetas: Vec<f64>,
}

pub fn carleson_ratio_profile(
    measure: &EmpiricalMeasure,
    h_grid: &[f64],
    n_theta: usize,
) -> Result<WindowProfile> {
    if h_grid.is_empty() {
        return Err(Error::Domain("window grid is empty".into()));
    }
    for pair in h_grid.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::Domain("window grid must be strictly decreasing".into()));
        }
    }
    if h_grid.iter().any(|&h| !(0.0 < h && h <= 1.0)) {
        return Err(Error::Domain("window sizes must lie in (0, 1]".into()));
    }
    if n_theta < 360 {
        return Err(Error::Domain("theta grid must have at least 360 points".into()));
    }
    let guard = 8.0 * 2.0 * std::f64::consts::PI / measure.atoms.len() as f64;
    let h_min = h_grid.last().copied().unwrap_or(1.0);
    if h_min < guard {
        return Err(Error::ResolutionExceeded { h: h_min, guard });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut profile = WindowProfile {
        h: h_grid.to_vec(),
        ratios: Vec::with_capacity(h_grid.len()),
        argmax_thetas: Vec::with_capacity(h_grid.len()),
    };
    for &h in h_grid {
        // atoms deep enough to matter, sorted by angle with a wrapped copy
        let mut ring: Vec<(f64, f64)> = measure
            .atoms
            .iter()
            .filter(|(xi, _)| xi.norm() >= 1.0 - h)
            .map(|(xi, w)| (xi.arg().rem_euclid(two_pi), *w))
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        if ring.is_empty() {
            profile.ratios.push(0.0);
            profile.argmax_thetas.push(0.0);
            continue;
        }
        let angles: Vec<f64> = ring.iter().map(|(t, _)| *t).collect();
        let mut prefix = Vec::with_capacity(ring.len() + 1);
        prefix.push(0.0);
        for (_, w) in &ring {
            prefix.push(prefix.last().unwrap() + w);
        }
        let total = *prefix.last().unwrap();
        // mass of [lo, hi] (inclusive) on the circle
        let arc_mass = |lo: f64, hi: f64| -> f64 {
            let lo_m = lo.rem_euclid(two_pi);
            let hi_m = hi.rem_euclid(two_pi);
            let count_to = |x: f64| -> f64 {
                // prefix mass of angles <= x
                let idx = angles.partition_point(|&t| t <= x);
                prefix[idx]
            };
            let strictly_below = |x: f64| -> f64 {
                let idx = angles.partition_point(|&t| t < x);
                prefix[idx]
            };
            if hi - lo >= two_pi {
                total
            } else if lo_m <= hi_m {
                count_to(hi_m) - strictly_below(lo_m)
            } else {
                (total - strictly_below(lo_m)) + count_to(hi_m)
            }
        };
        let mut best = f64::NEG_INFINITY;
        let mut best_theta = 0.0;
        let mut consider = |theta0: f64| {
            let m = arc_mass(theta0 - h, theta0 + h);
            if m > best {
                best = m;
                best_theta = theta0.rem_euclid(two_pi);
            }
        };
        for j in 0..n_theta {
            consider(two_pi * j as f64 / n_theta as f64);
        }
        // edge-aligned candidates: window edge exactly on an atom angle
        let eps = 1e-12;
        for &t in &angles {
            consider(t + h - eps);
            consider(t - h + eps);
        }
        profile.ratios.push(best / h);
        profile.argmax_thetas.push(best_theta);
    }
    Ok(profile)
}

/// `∫ (1 - |a|^2)/|1 - conj(a) xi|^2 dmu(xi)` for an atomic measure.
pub fn poisson_of_measure(measure: &EmpiricalMeasure, a: Complex64) -> f64 {
    assert!(a.norm() < 1.0, "poisson_of_measure requires |a| < 1");
    let scale = 1.0 - a.norm_sqr();
    let terms: Vec<f64> = measure
        .atoms
        .iter()
        .map(|(xi, w)| w * scale / (1.0 - a.conj() * xi).norm_sqr())
        .collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn induced_measure_shapes() {
        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 512).unwrap();
        assert_eq!(m.atoms.len(), 512);
        assert!((m.total - 1.0).abs() < 1e-12);
        assert!(m.atoms.iter().all(|(xi, _)| (xi.norm() - 1.0).abs() < 1e-12));

        let k = SelfMap::parse("const(0.3)").unwrap();
        let m = induced_measure(&k, 256).unwrap();
        assert!(m.atoms.iter().all(|(xi, _)| (xi - c(0.3, 0.0)).norm() < 1e-15));

        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let m = induced_measure(&s, 256).unwrap();
        assert!(m.atoms.iter().all(|(xi, _)| (xi.norm() - 0.5).abs() < 1e-12));

        assert!(induced_measure(&id, 100).is_err());
    }

    #[test]
    fn atomic_map_measure_offsets_singularity() {
        let a = SelfMap::parse("atomic(1)").unwrap();
        let m = induced_measure(&a, 256).unwrap();
        assert_eq!(m.atoms.len(), 256);
        assert!(m.atoms.iter().all(|(xi, _)| xi.norm() <= 1.0));
    }

    #[test]
    fn window_mass_examples() {
        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 4096).unwrap();
        let w = CarlesonWindow::new(0.2, 1.0).unwrap();
        // arc mass 2h/(2pi) = h/pi
        let want = 0.2 / std::f64::consts::PI;
        assert!((window_mass(&m, &w) - want).abs() < 2.0 / 4096.0);

        let k = SelfMap::parse("const(0.3)").unwrap();
        let m = induced_measure(&k, 256).unwrap();
        assert_eq!(window_mass(&m, &CarlesonWindow::new(0.6, 0.0).unwrap()), 0.0);

        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let m = induced_measure(&s, 256).unwrap();
        assert_eq!(window_mass(&m, &CarlesonWindow::new(0.25, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn window_mass_monotone_in_h() {
        let h = SelfMap::parse("halfplane").unwrap();
        let m = induced_measure(&h, 1024).unwrap();
        for &theta0 in &[0.0, 0.4, 3.0] {
            let mut prev = 0.0;
            for &hh in &[0.05, 0.1, 0.2, 0.4, 0.8, 1.0] {
                let mass = window_mass(&m, &CarlesonWindow::new(hh, theta0).unwrap());
                assert!(mass >= prev);
                prev = mass;
            }
        }
    }

    #[test]
    fn ratio_profile_identity_near_inv_pi() {
        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 1 << 15).unwrap();
        let p = carleson_ratio_profile(&m, &[0.5, 0.2, 0.1, 0.05, 0.02, 0.01], 720).unwrap();
        for (h, ratio) in p.h.iter().zip(&p.ratios) {
            let rel = (ratio - 1.0 / std::f64::consts::PI).abs() * std::f64::consts::PI;
            assert!(rel < 0.02, "h = {h}: ratio = {ratio}");
        }
    }

    #[test]
    fn ratio_profile_resolution_guard() {
        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 256).unwrap();
        assert!(matches!(
            carleson_ratio_profile(&m, &[0.01], 720),
            Err(Error::ResolutionExceeded { .. })
        ));
    }

    #[test]
    fn ratio_profile_edge_alignment_beats_plain_grid() {
        // two heavy atoms a hair less than 2h apart: only a window whose
        // edge aligns with the first atom captures both, and no grid
        // candidate lands in the width-1e-6 admissible interval
        let h = 0.1;
        let t1 = 1.23456;
        let t2 = t1 + 2.0 * h - 1e-6;
        let mut atoms = vec![
            (Complex64::from_polar(0.995, t1), 0.25),
            (Complex64::from_polar(0.995, t2), 0.25),
        ];
        let filler = 0.5 / 510.0;
        for j in 0..510 {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 510.0;
            atoms.push((Complex64::from_polar(0.1, t), filler));
        }
        let m = EmpiricalMeasure::from_atoms(atoms);
        let p = carleson_ratio_profile(&m, &[h], 360).unwrap();
        assert!((p.ratios[0] - 0.5 / h).abs() < 1e-9, "{}", p.ratios[0]);
    }

    #[test]
    fn poisson_of_measure_examples() {
        let point = EmpiricalMeasure::from_atoms(vec![(c(0.0, 0.0), 1.0)]);
        let a = c(0.3, 0.4);
        assert!((poisson_of_measure(&point, a) - (1.0 - a.norm_sqr())).abs() < 1e-15);

        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 1 << 14).unwrap();
        let v = poisson_of_measure(&m, c(0.9, 0.0));
        assert!((v - 1.0).abs() < 1e-4, "{v}");

        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let m = induced_measure(&s, 1 << 12).unwrap();
        for &r in &[0.5, 0.9] {
            let want = (1.0 - r * r) / (1.0 - r * r / 4.0);
            let v = poisson_of_measure(&m, c(r, 0.0));
            assert!((v - want).abs() < 1e-3, "r = {r}: {v} vs {want}");
        }
    }

    #[test]
    fn restriction_filter() {
        let s = SelfMap::parse("scale(0.5, identity)").unwrap();
        let m = induced_measure(&s, 256).unwrap();
        let outer = m.restrict_outer(0.9);
        assert!(outer.atoms.is_empty());
        assert_eq!(outer.total, 0.0);
        let id = SelfMap::parse("identity").unwrap();
        let m = induced_measure(&id, 256).unwrap();
        assert_eq!(m.restrict_outer(0.9).atoms.len(), 256);
    }

    #[test]
    fn csv_round_trip() {
        let h = SelfMap::parse("halfplane").unwrap();
        let m = induced_measure(&h, 256).unwrap();
        let text = m.to_csv();
        let back = EmpiricalMeasure::from_csv(&text).unwrap();
        assert_eq!(back.atoms.len(), m.atoms.len());
        for ((a, wa), (b, wb)) in m.atoms.iter().zip(&back.atoms) {
            assert_eq!(a, b);
            assert_eq!(wa, wb);
        }
        assert!(EmpiricalMeasure::from_csv("nope\n1,2,3\n").is_err());
        assert!(EmpiricalMeasure::from_csv("re,im,weight\n0,0,-1\n").is_err());
        assert!(EmpiricalMeasure::from_csv("re,im,weight\n0,0,0.5\n").is_err());
    }

    #[test]
    fn seeded_sampler_is_reproducible() {
        let h = SelfMap::parse("halfplane").unwrap();
        let a = induced_measure_seeded(&h, 256, 9).unwrap();
        let b = induced_measure_seeded(&h, 256, 9).unwrap();
        assert_eq!(a.atoms, b.atoms);
    }
}

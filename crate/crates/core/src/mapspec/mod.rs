//! Catalog of analytic self-maps of the unit disk, a textual mini-language
//! for specifying them, and evaluation / derivative / boundary / Taylor
//! services.
//!
//! Grammar (see also `parse_map`):
//!
//! ```text
//! expr    := name | name "(" args ")" ;
//! args    := arg { "," arg } ;
//! arg     := expr | complex | integer ;
//! complex := real [ ("+"|"-") real "i" ] | real "i" ;
//! name    := "identity" | "const" | "monomial" | "mobius" | "blaschke"
//!          | "poly" | "rational" | "atomic" | "scale" | "compose" | "halfplane" ;
//! ```
//!
//! `rational(c0,...,cm; d0,...,dk)` uses `";"` to split the numerator and
//! denominator coefficient lists. `atomic(t)` is `exp(t (z+1)/(z-1))` and
//! `halfplane` is `(1+z)/2`.

mod parse;

pub use parse::{parse_map, print_map};

use crate::poly;
use crate::{Complex64, Error, Result};

/// Maximum expression tree depth accepted by the parser and constructors.
pub const MAX_TREE_DEPTH: usize = 32;

/// Abstract syntax tree of a catalog map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    Identity,
    Const(Complex64),
    /// `z^k`, `k >= 1`.
    Monomial(u32),
    /// Disk automorphism `(a - z) / (1 - conj(a) z)`, `|a| < 1`.
    Mobius(Complex64),
    /// Finite Blaschke product with the given zeros (each of modulus < 1).
    /// A zero at the origin contributes the factor `z`; a zero `w != 0`
    /// contributes `(|w|/w) (w - z)/(1 - conj(w) z)`.
    Blaschke(Vec<Complex64>),
    /// Polynomial with ascending coefficients; must validate as a self-map.
    Poly(Vec<Complex64>),
    /// Ratio of polynomials; the denominator must be zero-free on the
    /// closed disk and the quotient must validate as a self-map.
    Rational(Vec<Complex64>, Vec<Complex64>),
    /// Singular inner function `exp(t (z+1)/(z-1))`, `t > 0`; its one
    /// singular boundary point is `theta = 0`.
    AtomicInner(f64),
    /// `r * inner(z)` with `r` in `(0, 1]`.
    Scale(f64, Box<MapExpr>),
    /// `outer(inner(z))`.
    Compose(Box<MapExpr>, Box<MapExpr>),
    /// `(1 + z) / 2`.
    HalfPlane,
}

/// Rational representation `num(z) / den(z)` of a catalog map, when one
/// exists (everything except atomic-inner factors).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalForm {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

/// A validated analytic self-map of the disk.
#[derive(Debug, Clone)]
pub struct SelfMap {
    expr: MapExpr,
    rational_form: Option<RationalForm>,
    is_inner: bool,
    fixes_zero: bool,
    value_at_zero: Complex64,
}

/// Truncated Taylor expansion around the origin.
#[derive(Debug, Clone)]
pub struct TaylorSeries {
    /// Coefficients of `z^0 .. z^n`.
    pub coeffs: Vec<Complex64>,
    /// Aliasing bound for the sampled coefficients (Cauchy estimate with
    /// `sup |psi| <= 1` over the sampling circle).
    pub trunc_error_bound: f64,
}

/// Outcome of sampling-based self-map validation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub max_modulus: f64,
    pub witness: Complex64,
    pub n_samples: usize,
}

const SINGULAR_GUARD: f64 = 1e-14;

impl MapExpr {
    pub fn depth(&self) -> usize {
        match self {
            MapExpr::Scale(_, g) => 1 + g.depth(),
            MapExpr::Compose(f, g) => 1 + f.depth().max(g.depth()),
            _ => 1,
        }
    }

    /// Parameter invariants for this node and its children.
    fn validate_params(&self) -> Result<()> {
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        match self {
            MapExpr::Identity | MapExpr::HalfPlane => Ok(()),
            MapExpr::Const(c) => {
                if !finite(c) || c.norm() >= 1.0 {
                    return Err(Error::Domain(format!("const parameter {c} must satisfy |c| < 1")));
                }
                Ok(())
            }
            MapExpr::Monomial(k) => {
                if *k < 1 {
                    return Err(Error::Domain("monomial degree must be >= 1".into()));
                }
                Ok(())
            }
            MapExpr::Mobius(a) => {
                if !finite(a) || a.norm() >= 1.0 {
                    return Err(Error::Domain(format!("mobius parameter {a} must satisfy |a| < 1")));
                }
                Ok(())
            }
            MapExpr::Blaschke(zeros) => {
                if zeros.is_empty() {
                    return Err(Error::Domain("blaschke requires at least one zero".into()));
                }
                for z in zeros {
                    if !finite(z) || z.norm() >= 1.0 {
                        return Err(Error::Domain(format!("blaschke zero {z} must lie in the open disk")));
                    }
                }
                Ok(())
            }
            MapExpr::Poly(c) => {
                if c.is_empty() {
                    return Err(Error::Domain("poly requires coefficients".into()));
                }
                if !c.iter().all(finite) {
                    return Err(Error::Domain("poly coefficients must be finite".into()));
                }
                Ok(())
            }
            MapExpr::Rational(n, d) => {
                if n.is_empty() || d.is_empty() {
                    return Err(Error::Domain("rational requires coefficients".into()));
                }
                if !n.iter().all(finite) || !d.iter().all(finite) {
                    return Err(Error::Domain("rational coefficients must be finite".into()));
                }
                denominator_zero_free(d)?;
                Ok(())
            }
            MapExpr::AtomicInner(t) => {
                if !t.is_finite() || *t <= 0.0 {
                    return Err(Error::Domain("atomic parameter t must be positive".into()));
                }
                Ok(())
            }
            MapExpr::Scale(r, g) => {
                if !r.is_finite() || *r <= 0.0 || *r > 1.0 {
                    return Err(Error::Domain(format!("scale factor {r} must lie in (0, 1]")));
                }
                g.validate_params()
            }
            MapExpr::Compose(f, g) => {
                f.validate_params()?;
                g.validate_params()
            }
        }
    }

    /// Whether the tree contains a singular inner factor (such maps have
    /// no rational form and no continuous boundary extension at one point).
    pub fn contains_atomic(&self) -> bool {
        match self {
            MapExpr::AtomicInner(_) => true,
            MapExpr::Scale(_, g) => g.contains_atomic(),
            MapExpr::Compose(f, g) => f.contains_atomic() || g.contains_atomic(),
            _ => false,
        }
    }

    /// Evaluate on the closed disk. Fails only at essential singularities
    /// of atomic-inner factors (boundary points).
    pub(crate) fn eval_closed(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            MapExpr::Identity => z,
            MapExpr::Const(c) => *c,
            MapExpr::Monomial(k) => z.powu(*k),
            MapExpr::Mobius(a) => (a - z) / (1.0 - a.conj() * z),
            MapExpr::Blaschke(zeros) => {
                let mut v = Complex64::new(1.0, 0.0);
                for &w in zeros {
                    v *= blaschke_factor(w, z);
                }
                v
            }
            MapExpr::Poly(c) => poly::eval(c, z),
            MapExpr::Rational(n, d) => poly::eval(n, z) / poly::eval(d, z),
            MapExpr::AtomicInner(t) => {
                if (z - 1.0).norm() <= SINGULAR_GUARD {
                    return Err(Error::SingularBoundaryPoint { theta: z.arg() });
                }
                (t * (z + 1.0) / (z - 1.0)).exp()
            }
            MapExpr::Scale(r, g) => *r * g.eval_closed(z)?,
            MapExpr::Compose(f, g) => f.eval_closed(g.eval_closed(z)?)?,
            MapExpr::HalfPlane => (1.0 + z) / 2.0,
        })
    }

    /// Chain-rule derivative on the closed disk.
    pub(crate) fn deriv_closed(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            MapExpr::Identity => Complex64::new(1.0, 0.0),
            MapExpr::Const(_) => Complex64::new(0.0, 0.0),
            MapExpr::Monomial(k) => f64::from(*k) * z.powu(k - 1),
            MapExpr::Mobius(a) => {
                let d = 1.0 - a.conj() * z;
                -(1.0 - a.norm_sqr()) / (d * d)
            }
            MapExpr::Blaschke(zeros) => blaschke_value_deriv(zeros, z).1,
            MapExpr::Poly(c) => poly::eval_with_deriv(c, z).1,
            MapExpr::Rational(n, d) => {
                let (p, dp) = poly::eval_with_deriv(n, z);
                let (q, dq) = poly::eval_with_deriv(d, z);
                (dp * q - p * dq) / (q * q)
            }
            MapExpr::AtomicInner(t) => {
                let v = self.eval_closed(z)?;
                let d = z - 1.0;
                v * (-2.0 * t) / (d * d)
            }
            MapExpr::Scale(r, g) => *r * g.deriv_closed(z)?,
            MapExpr::Compose(f, g) => {
                let gz = g.eval_closed(z)?;
                f.deriv_closed(gz)? * g.deriv_closed(z)?
            }
            MapExpr::HalfPlane => Complex64::new(0.5, 0.0),
        })
    }

    /// Exact rational representation, when the tree has no atomic factor.
    fn rational_form(&self) -> Option<RationalForm> {
        let one = vec![Complex64::new(1.0, 0.0)];
        let c0 = Complex64::new(0.0, 0.0);
        let rf = |num, den| Some(RationalForm { num, den });
        match self {
            MapExpr::Identity => rf(vec![c0, Complex64::new(1.0, 0.0)], one),
            MapExpr::Const(c) => rf(vec![*c], one),
            MapExpr::Monomial(k) => {
                let mut num = vec![c0; *k as usize + 1];
                num[*k as usize] = Complex64::new(1.0, 0.0);
                rf(num, one)
            }
            MapExpr::Mobius(a) => rf(
                vec![*a, Complex64::new(-1.0, 0.0)],
                vec![Complex64::new(1.0, 0.0), -a.conj()],
            ),
            MapExpr::Blaschke(zeros) => {
                let mut num = vec![Complex64::new(1.0, 0.0)];
                let mut den = vec![Complex64::new(1.0, 0.0)];
                for &w in zeros {
                    if w.norm() == 0.0 {
                        num = poly::mul(&num, &[c0, Complex64::new(1.0, 0.0)]);
                    } else {
                        let u = Complex64::from(w.norm()) / w;
                        num = poly::mul(&num, &[u * w, -u]);
                        den = poly::mul(&den, &[Complex64::new(1.0, 0.0), -w.conj()]);
                    }
                }
                rf(num, den)
            }
            MapExpr::Poly(c) => rf(c.clone(), one),
            MapExpr::Rational(n, d) => rf(n.clone(), d.clone()),
            MapExpr::AtomicInner(_) => None,
            MapExpr::Scale(r, g) => {
                let inner = g.rational_form()?;
                rf(poly::scale(&inner.num, Complex64::from(*r)), inner.den)
            }
            MapExpr::Compose(f, g) => {
                let fo = f.rational_form()?;
                let gi = g.rational_form()?;
                let (num, den) = poly::compose_rational(&fo.num, &fo.den, &gi.num, &gi.den);
                rf(poly::trim(num), poly::trim(den))
            }
            MapExpr::HalfPlane => rf(
                vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
                one,
            ),
        }
    }

    fn inner(&self) -> bool {
        match self {
            MapExpr::Identity
            | MapExpr::Monomial(_)
            | MapExpr::Blaschke(_)
            | MapExpr::AtomicInner(_) => true,
            MapExpr::Scale(r, g) => *r == 1.0 && g.inner(),
            MapExpr::Compose(f, g) => f.inner() && g.inner(),
            _ => false,
        }
    }
}

fn blaschke_factor(w: Complex64, z: Complex64) -> Complex64 {
    if w.norm() == 0.0 {
        z
    } else {
        (Complex64::from(w.norm()) / w) * (w - z) / (1.0 - w.conj() * z)
    }
}

fn blaschke_value_deriv(zeros: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(1.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &w in zeros {
        let (fv, fd) = if w.norm() == 0.0 {
            (z, Complex64::new(1.0, 0.0))
        } else {
            let u = Complex64::from(w.norm()) / w;
            let den = 1.0 - w.conj() * z;
            (u * (w - z) / den, u * (w.norm_sqr() - 1.0) / (den * den))
        };
        dv = dv * fv + v * fd;
        v *= fv;
    }
    (v, dv)
}

/// Checks that a polynomial has no zeros on the closed unit disk via a
/// boundary minimum scan plus an argument-principle count on `|z| = 1`.
fn denominator_zero_free(d: &[Complex64]) -> Result<()> {
    let d = poly::trim(d.to_vec());
    if d.is_empty() {
        return Err(Error::Domain("rational denominator is identically zero".into()));
    }
    if d.len() == 1 {
        return Ok(());
    }
    let n = 4096;
    let mut min = f64::INFINITY;
    for j in 0..n {
        let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let z = Complex64::from_polar(1.0, t);
        min = min.min(poly::eval(&d, z).norm());
    }
    if min < 1e-9 {
        return Err(Error::Domain(
            "rational denominator vanishes on or near the unit circle".into(),
        ));
    }
    // winding of d over |z| = 1 counts denominator zeros in the disk
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let z = Complex64::from_polar(1.0, t);
        let (p, dp) = poly::eval_with_deriv(&d, z);
        acc += dp / p * z;
    }
    let winding = (acc / n as f64).re;
    if winding.round() as i64 != 0 {
        return Err(Error::Domain(format!(
            "rational denominator has {} zero(s) in the unit disk",
            winding.round()
        )));
    }
    Ok(())
}

impl SelfMap {
    /// Validates the expression and computes derived data (rational form,
    /// inner flag, value at the origin). Every `Poly`/`Rational` node must
    /// itself pass sampling validation: the other constructors are closed
    /// under self-map-ness, so this makes the whole tree a self-map by
    /// construction.
    pub fn new(expr: MapExpr) -> Result<Self> {
        validate_polynomial_nodes(&expr, 256)?;
        SelfMap::new_trusted(expr)
    }

    /// As `new` but without re-sampling polynomial nodes; for subtrees of
    /// an already validated expression.
    pub(crate) fn new_trusted(expr: MapExpr) -> Result<Self> {
        if expr.depth() > MAX_TREE_DEPTH {
            return Err(Error::Domain(format!(
                "expression tree depth exceeds {MAX_TREE_DEPTH}"
            )));
        }
        expr.validate_params()?;
        let mut rational_form = expr.rational_form();
        if let Some(rf) = &rational_form {
            if !rational_form_consistent(&expr, rf) {
                debug_assert!(false, "rational form mismatch for {expr:?}");
                rational_form = None;
            }
        }
        let value_at_zero = expr.eval_closed(Complex64::new(0.0, 0.0))?;
        Ok(SelfMap {
            is_inner: expr.inner(),
            fixes_zero: value_at_zero.norm() == 0.0,
            rational_form,
            value_at_zero,
            expr,
        })
    }

    /// Parse a map-spec string and construct the validated map.
    pub fn parse(spec: &str) -> Result<Self> {
        SelfMap::new(parse_map(spec)?)
    }

    pub fn expr(&self) -> &MapExpr {
        &self.expr
    }

    pub fn rational_form(&self) -> Option<&RationalForm> {
        self.rational_form.as_ref()
    }

    pub fn is_inner(&self) -> bool {
        self.is_inner
    }

    pub fn fixes_zero(&self) -> bool {
        self.fixes_zero
    }

    /// `psi(0)`.
    pub fn value_at_zero(&self) -> Complex64 {
        self.value_at_zero
    }

    /// Canonical spec text; parses back to a structurally equal expression.
    pub fn spec_string(&self) -> String {
        print_map(&self.expr)
    }

    /// Evaluate at an interior point (`|z| < 1`).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        debug_assert!(z.norm() < 1.0 + 1e-12, "eval expects |z| < 1");
        // interior points never hit the atomic singularity at z = 1
        self.expr.eval_closed(z).expect("interior evaluation")
    }

    /// Evaluate anywhere on the closed disk; fails at singular boundary
    /// points of atomic factors.
    pub fn eval_closed(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval_closed(z)
    }

    /// Chain-rule derivative at an interior point.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        debug_assert!(z.norm() < 1.0 + 1e-12, "derivative expects |z| < 1");
        self.expr.deriv_closed(z).expect("interior evaluation")
    }

    /// Boundary value at `e^{i theta}`.
    pub fn boundary_value(&self, theta: f64) -> Result<Complex64> {
        self.expr.eval_closed(Complex64::from_polar(1.0, theta))
    }

    /// Taylor coefficients of `z^0 .. z^n` by discrete Fourier analysis on
    /// the circle of radius `rho`, cross-validated at a second radius.
    pub fn taylor_coefficients(&self, n: usize, rho: f64) -> Result<TaylorSeries> {
        if !(1..=1 << 16).contains(&n) {
            return Err(Error::Domain("taylor order must lie in [1, 65536]".into()));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain("sampling radius must lie in (0, 1)".into()));
        }
        let primary = self.taylor_at_radius(n, rho);
        let rho2 = (rho + 0.1).min(0.5 + rho / 2.0);
        let check = self.taylor_at_radius(n, rho2);
        let mut disagreement = 0.0f64;
        for k in 0..=n {
            disagreement = disagreement.max((primary.0[k] - check.0[k]).norm());
        }
        if disagreement > 1e-8 {
            return Err(Error::PrecisionLoss { disagreement });
        }
        for c in &primary.0 {
            // Schwarz-Pick crude bound for self-map coefficients
            if c.norm() > 1.0 + 1e-9 {
                return Err(Error::PrecisionLoss {
                    disagreement: c.norm() - 1.0,
                });
            }
        }
        Ok(TaylorSeries {
            coeffs: primary.0,
            trunc_error_bound: primary.1,
        })
    }

    fn taylor_at_radius(&self, n: usize, rho: f64) -> (Vec<Complex64>, f64) {
        let m = (4 * (n + 1)).next_power_of_two().max(512);
        let mut samples: Vec<Complex64> = (0..m)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                self.eval(Complex64::from_polar(rho, t))
            })
            .collect();
        let mut planner = rustfft::FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut samples);
        let coeffs = (0..=n)
            .map(|k| samples[k] / (m as f64 * rho.powi(k as i32)))
            .collect();
        // aliasing bound: |c_j| <= 1 for self-maps, so the folded tail is
        // bounded by rho^m / (1 - rho^m)
        let alias = rho.powi(m as i32) / (1.0 - rho.powi(m as i32));
        (coeffs, alias)
    }

    /// Sample `|psi|` on concentric circles approaching the boundary and on
    /// the boundary grid itself; accepts iff the maximum stays within
    /// `1 + 1e-12`.
    pub fn validate(&self, n_samples: usize) -> Result<ValidationReport> {
        sample_self_map(&self.expr, n_samples)
    }
}

fn sample_self_map(expr: &MapExpr, n_samples: usize) -> Result<ValidationReport> {
    if n_samples < 64 {
        return Err(Error::Domain("validation needs at least 64 samples".into()));
    }
    let radii = [
        0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 1.0 - 1e-4, 1.0 - 1e-5,
        1.0 - 1e-6, 1.0,
    ];
    let mut max = f64::NEG_INFINITY;
    let mut witness = Complex64::new(0.0, 0.0);
    let mut observe = |z: Complex64, v: Complex64| {
        if v.norm() > max {
            max = v.norm();
            witness = z;
        }
    };
    for &r in &radii {
        for j in 0..n_samples {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n_samples as f64;
            let z = Complex64::from_polar(r, t);
            match expr.eval_closed(z) {
                Ok(v) => observe(z, v),
                // singular boundary points are offset by a half step
                Err(Error::SingularBoundaryPoint { .. }) => {
                    let t2 = t + std::f64::consts::PI / n_samples as f64;
                    let z2 = Complex64::from_polar(r, t2);
                    if let Ok(v) = expr.eval_closed(z2) {
                        observe(z2, v);
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    if max > 1.0 + 1e-12 {
        return Err(Error::NotSelfMap {
            witness,
            max_modulus: max,
        });
    }
    Ok(ValidationReport {
        max_modulus: max,
        witness,
        n_samples,
    })
}

/// Sampling validation of every polynomial-backed node in the tree; the
/// remaining constructors preserve self-map-ness, so node validity is
/// enough for the whole expression.
fn validate_polynomial_nodes(expr: &MapExpr, n_samples: usize) -> Result<()> {
    match expr {
        MapExpr::Poly(_) | MapExpr::Rational(..) => {
            expr.validate_params()?;
            sample_self_map(expr, n_samples).map(|_| ())
        }
        MapExpr::Scale(_, g) => validate_polynomial_nodes(g, n_samples),
        MapExpr::Compose(f, g) => {
            validate_polynomial_nodes(f, n_samples)?;
            validate_polynomial_nodes(g, n_samples)
        }
        _ => Ok(()),
    }
}

/// Compare the rational form against the tree at 64 deterministic interior
/// points (golden-angle spiral up to radius 0.9).
fn rational_form_consistent(expr: &MapExpr, rf: &RationalForm) -> bool {
    let golden = 2.399963229728653;
    for j in 0..64u32 {
        let r = 0.9 * ((j + 1) as f64 / 64.0).sqrt();
        let z = Complex64::from_polar(r, golden * j as f64);
        let tree = match expr.eval_closed(z) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let ratio = poly::eval(&rf.num, z) / poly::eval(&rf.den, z);
        if (tree - ratio).norm() > 1e-12 * (1.0 + tree.norm()) {
            return false;
        }
    }
    true
}

/// One entry of the built-in map catalog with its known classification.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub spec: &'static str,
    /// `true` when `C_psi` is known compact on `H^2`.
    pub known_compact: bool,
    /// Known essential norm squared, when a closed form exists.
    pub known_essnorm_sq: Option<f64>,
}

/// Built-in maps used throughout the test-suite and the `catalog`
/// subcommand. Every entry except `atomic(1)` carries a rational form.
pub fn catalog() -> Vec<CatalogEntry> {
    let e = |spec, known_compact, known_essnorm_sq| CatalogEntry {
        spec,
        known_compact,
        known_essnorm_sq,
    };
    let inv_e = (-1.0f64).exp();
    vec![
        e("identity", false, Some(1.0)),
        e("const(0.3)", true, Some(0.0)),
        e("monomial(2)", false, Some(1.0)),
        e("monomial(3)", false, Some(1.0)),
        e("mobius(0.5)", false, Some(3.0)),
        e("blaschke(0, 0.5)", false, Some(1.0)),
        e("poly(0, 0.5, 0.5)", false, Some(2.0 / 3.0)),
        e("rational(1; 2, -1)", false, Some(1.0)),
        e("scale(0.5, identity)", true, Some(0.0)),
        e("halfplane", false, Some(2.0)),
        e("compose(monomial(2), mobius(0.5))", false, Some(5.0 / 3.0)),
        e("atomic(1)", false, Some((1.0 + inv_e) / (1.0 - inv_e))),
    ]
}

/// Parsed catalog maps, in catalog order.
pub fn catalog_maps() -> Vec<SelfMap> {
    catalog()
        .iter()
        .map(|c| SelfMap::parse(c.spec).expect("catalog entries parse"))
        .collect()
}

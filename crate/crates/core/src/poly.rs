//! Dense complex polynomials in ascending coefficient order.
//!
//! Shared plumbing for rational forms of catalog maps and for the
//! preimage solver. Not part of the public API.

use crate::Complex64;

/// Drop trailing coefficients that are negligible relative to the largest.
pub(crate) fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    let max = c.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
    let cut = if max > 0.0 { max * 1e-13 } else { 0.0 };
    while let Some(last) = c.last() {
        if last.norm() <= cut && !c.is_empty() {
            c.pop();
        } else {
            break;
        }
    }
    c
}

pub(crate) fn degree(c: &[Complex64]) -> usize {
    c.len().saturating_sub(1)
}

/// Horner evaluation.
pub(crate) fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        acc = acc * z + ck;
    }
    acc
}

/// Horner evaluation of the polynomial and its derivative.
pub(crate) fn eval_with_deriv(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

pub(crate) fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

pub(crate) fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &x) in b.iter().enumerate() {
        out[i] -= x;
    }
    out
}

pub(crate) fn scale(a: &[Complex64], k: Complex64) -> Vec<Complex64> {
    a.iter().map(|&x| x * k).collect()
}

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Substitute the rational map `n/d` into the rational map `p/q`:
/// returns numerator and denominator of `(p/q) ∘ (n/d)`.
pub(crate) fn compose_rational(
    p: &[Complex64],
    q: &[Complex64],
    n: &[Complex64],
    d: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let deg = degree(p).max(degree(q));
    // n^i * d^(deg - i) for i = 0..=deg
    let mut n_pows = Vec::with_capacity(deg + 1);
    let mut d_pows = Vec::with_capacity(deg + 1);
    let one = vec![Complex64::new(1.0, 0.0)];
    n_pows.push(one.clone());
    d_pows.push(one);
    for i in 1..=deg {
        n_pows.push(mul(&n_pows[i - 1], n));
        d_pows.push(mul(&d_pows[i - 1], d));
    }
    let combine = |coeffs: &[Complex64]| {
        let mut acc = vec![Complex64::new(0.0, 0.0)];
        for i in 0..=deg {
            let ci = coeffs.get(i).copied().unwrap_or(Complex64::new(0.0, 0.0));
            if ci.norm() == 0.0 {
                continue;
            }
            let term = scale(&mul(&n_pows[i], &d_pows[deg - i]), ci);
            acc = add(&acc, &term);
        }
        acc
    };
    (combine(p), combine(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_matches_direct() {
        let p = vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0)];
        let z = c(0.3, -0.4);
        let direct = p[0] + p[1] * z + p[2] * z * z;
        assert!((eval(&p, z) - direct).norm() < 1e-15);
        let (v, dv) = eval_with_deriv(&p, z);
        assert!((v - direct).norm() < 1e-15);
        assert!((dv - (p[1] + 2.0 * p[2] * z)).norm() < 1e-15);
    }

    #[test]
    fn compose_rational_mobius_into_monomial() {
        // z^2 composed with (a - z)/(1 - conj(a) z)
        let a = c(0.5, 0.0);
        let (num, den) = compose_rational(
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            &[c(1.0, 0.0)],
            &[a, c(-1.0, 0.0)],
            &[c(1.0, 0.0), -a.conj()],
        );
        let z = c(0.2, 0.1);
        let phi = (a - z) / (1.0 - a.conj() * z);
        let want = phi * phi;
        let got = eval(&num, z) / eval(&den, z);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn trim_drops_noise() {
        let p = trim(vec![c(1.0, 0.0), c(0.5, 0.0), c(1e-17, 0.0)]);
        assert_eq!(p.len(), 2);
        assert!(trim(vec![]).is_empty());
    }
}

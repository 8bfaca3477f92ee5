//! Recursive-descent parser and canonical printer for the map-spec
//! language. Complex literals are `a+bi` / `a-bi` / `bi` / `a` with plain
//! decimal reals (no exponents).

use super::{MapExpr, MAX_TREE_DEPTH};
use crate::{Complex64, Error, Result};

/// Parse a map-spec string into its AST. Parameter domain violations are
/// reported as `Error::Domain`, malformed text as `Error::Syntax` with a
/// byte position.
pub fn parse_map(spec: &str) -> Result<MapExpr> {
    if spec.trim().is_empty() {
        return Err(Error::Syntax {
            position: 0,
            expected: "nonempty map expression".into(),
        });
    }
    if spec.len() > 4096 {
        return Err(Error::Domain("map spec longer than 4096 characters".into()));
    }
    let mut p = Parser {
        src: spec.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let expr = p.expr(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", b as char)))
        }
    }

    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("map name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .to_string())
    }

    fn expr(&mut self, depth: usize) -> Result<MapExpr> {
        if depth >= MAX_TREE_DEPTH {
            return Err(Error::Domain(format!(
                "expression tree depth exceeds {MAX_TREE_DEPTH}"
            )));
        }
        let name_pos = self.pos;
        let name = self.name()?;
        match name.as_str() {
            "identity" => Ok(MapExpr::Identity),
            "halfplane" => Ok(MapExpr::HalfPlane),
            "const" => {
                self.expect(b'(')?;
                let c = self.complex()?;
                self.expect(b')')?;
                Ok(MapExpr::Const(c))
            }
            "monomial" => {
                self.expect(b'(')?;
                let k = self.integer()?;
                self.expect(b')')?;
                if k < 1 {
                    return Err(Error::Domain("monomial degree must be >= 1".into()));
                }
                Ok(MapExpr::Monomial(k as u32))
            }
            "mobius" => {
                self.expect(b'(')?;
                let a = self.complex()?;
                self.expect(b')')?;
                Ok(MapExpr::Mobius(a))
            }
            "blaschke" => {
                self.expect(b'(')?;
                let zeros = self.complex_list()?;
                self.expect(b')')?;
                Ok(MapExpr::Blaschke(zeros))
            }
            "poly" => {
                self.expect(b'(')?;
                let coeffs = self.complex_list()?;
                self.expect(b')')?;
                Ok(MapExpr::Poly(coeffs))
            }
            "rational" => {
                self.expect(b'(')?;
                let num = self.complex_list()?;
                self.expect(b';')?;
                let den = self.complex_list()?;
                self.expect(b')')?;
                Ok(MapExpr::Rational(num, den))
            }
            "atomic" => {
                self.expect(b'(')?;
                let t = self.real()?;
                self.expect(b')')?;
                Ok(MapExpr::AtomicInner(t))
            }
            "scale" => {
                self.expect(b'(')?;
                let r = self.real()?;
                self.expect(b',')?;
                let inner = self.expr(depth + 1)?;
                self.expect(b')')?;
                Ok(MapExpr::Scale(r, Box::new(inner)))
            }
            "compose" => {
                self.expect(b'(')?;
                let outer = self.expr(depth + 1)?;
                self.expect(b',')?;
                let inner = self.expr(depth + 1)?;
                self.expect(b')')?;
                Ok(MapExpr::Compose(Box::new(outer), Box::new(inner)))
            }
            _ => Err(Error::Syntax {
                position: name_pos,
                expected: "map name (identity, const, monomial, mobius, blaschke, poly, \
                           rational, atomic, scale, compose, halfplane)"
                    .into(),
            }),
        }
    }

    fn complex_list(&mut self) -> Result<Vec<Complex64>> {
        let mut out = vec![self.complex()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
                out.push(self.complex()?);
            } else {
                return Ok(out);
            }
        }
    }

    /// Plain decimal real: optional sign, digits, optional fraction.
    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("number"));
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(self.err("digit after decimal point"));
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse::<f64>()
            .map_err(|_| Error::Syntax {
                position: start,
                expected: "number".into(),
            })
    }

    fn integer(&mut self) -> Result<i64> {
        let pos = self.pos;
        let v = self.real()?;
        if v.fract() != 0.0 || v.abs() > 1e9 {
            return Err(Error::Syntax {
                position: pos,
                expected: "integer".into(),
            });
        }
        Ok(v as i64)
    }

    /// `a`, `bi`, `a+bi`, or `a-bi`.
    fn complex(&mut self) -> Result<Complex64> {
        let first = self.real()?;
        match self.peek() {
            Some(b'i') => {
                self.pos += 1;
                Ok(Complex64::new(0.0, first))
            }
            Some(b'+') | Some(b'-') => {
                let save = self.pos;
                let second = self.real()?;
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    Ok(Complex64::new(first, second))
                } else {
                    // not an imaginary part; leave the sign unconsumed
                    self.pos = save;
                    Ok(Complex64::new(first, 0.0))
                }
            }
            _ => Ok(Complex64::new(first, 0.0)),
        }
    }
}

/// Canonical printer; `parse_map(print_map(e))` is structurally equal to
/// `e` for every valid expression.
pub fn print_map(e: &MapExpr) -> String {
    match e {
        MapExpr::Identity => "identity".into(),
        MapExpr::Const(c) => format!("const({})", fmt_complex(*c)),
        MapExpr::Monomial(k) => format!("monomial({k})"),
        MapExpr::Mobius(a) => format!("mobius({})", fmt_complex(*a)),
        MapExpr::Blaschke(zeros) => format!("blaschke({})", fmt_list(zeros)),
        MapExpr::Poly(c) => format!("poly({})", fmt_list(c)),
        MapExpr::Rational(n, d) => format!("rational({}; {})", fmt_list(n), fmt_list(d)),
        MapExpr::AtomicInner(t) => format!("atomic({t})"),
        MapExpr::Scale(r, g) => format!("scale({r}, {})", print_map(g)),
        MapExpr::Compose(f, g) => format!("compose({}, {})", print_map(f), print_map(g)),
        MapExpr::HalfPlane => "halfplane".into(),
    }
}

fn fmt_list(cs: &[Complex64]) -> String {
    cs.iter()
        .map(|c| fmt_complex(*c))
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

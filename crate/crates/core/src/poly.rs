//! Bivariate quadratics, univariate polynomials and rational functions over a
//! field context, plus the non-degeneracy classifications the decomposition
//! and image theorems require.
//!
//! A bivariate quadratic is degenerate when it fails to depend on one of its
//! variables or is a univariate polynomial of a linear form, f = g(ax + by).
//! For rational functions only a sufficient criterion is decidable here; see
//! [`rational_nondeg_sufficient`].

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};
use crate::fppoly;

/// q1 x^2 + q2 xy + q3 y^2 + l1 x + l2 y + c with coefficients in the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateQuadratic {
    ctx: FieldCtx,
    pub q1: u64,
    pub q2: u64,
    pub q3: u64,
    pub l1: u64,
    pub l2: u64,
    pub c: u64,
}

impl BivariateQuadratic {
    /// Coefficients by code, order [q1, q2, q3, l1, l2, c].
    pub fn from_codes(ctx: &FieldCtx, coeffs: [u64; 6]) -> Result<Self> {
        for &c in &coeffs {
            if c >= ctx.q() {
                return Err(Error::InvalidParams(format!(
                    "coefficient code {c} out of range for field of order {}",
                    ctx.q()
                )));
            }
        }
        let [q1, q2, q3, l1, l2, c] = coeffs;
        Ok(BivariateQuadratic {
            ctx: ctx.clone(),
            q1,
            q2,
            q3,
            l1,
            l2,
            c,
        })
    }

    /// The polynomial x*y.
    pub fn product(ctx: &FieldCtx) -> Self {
        Self::from_codes(ctx, [0, 1, 0, 0, 0, 0]).unwrap()
    }

    /// The polynomial x + y (reproduces the additive representation function).
    pub fn sum(ctx: &FieldCtx) -> Self {
        Self::from_codes(ctx, [0, 0, 0, 1, 1, 0]).unwrap()
    }

    /// g(x, y) = f(x) + f(y) for a univariate f of degree <= 2.
    pub fn from_sum_of_univariate(f: &UnivariatePoly) -> Result<Self> {
        if f.degree() > 2 {
            return Err(Error::InvalidParams(
                "univariate degree must be <= 2 to form f(x) + f(y)".into(),
            ));
        }
        let ctx = f.ctx().clone();
        let a = f.coeff(2);
        let b = f.coeff(1);
        let c0 = f.coeff(0);
        let two_c = ctx.add_code(c0, c0);
        Self::from_codes(&ctx, [a, 0, a, b, b, two_c])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    #[inline]
    pub(crate) fn eval_code(&self, x: u64, y: u64) -> u64 {
        let f = &self.ctx;
        let mut acc = self.c;
        if self.q1 != 0 {
            acc = f.add_code(acc, f.mul_code(self.q1, f.mul_code(x, x)));
        }
        if self.q2 != 0 {
            acc = f.add_code(acc, f.mul_code(self.q2, f.mul_code(x, y)));
        }
        if self.q3 != 0 {
            acc = f.add_code(acc, f.mul_code(self.q3, f.mul_code(y, y)));
        }
        if self.l1 != 0 {
            acc = f.add_code(acc, f.mul_code(self.l1, x));
        }
        if self.l2 != 0 {
            acc = f.add_code(acc, f.mul_code(self.l2, y));
        }
        acc
    }

    pub fn eval(&self, x: FElem, y: FElem) -> FElem {
        assert!(
            self.ctx.owns(x) && self.ctx.owns(y),
            "field context mismatch"
        );
        self.ctx.elem(self.eval_code(x.code(), y.code())).unwrap()
    }

    pub fn depends_on_x(&self) -> bool {
        self.q1 != 0 || self.q2 != 0 || self.l1 != 0
    }

    pub fn depends_on_y(&self) -> bool {
        self.q3 != 0 || self.q2 != 0 || self.l2 != 0
    }

    /// True when f depends on both variables and is not of the form
    /// g(ax + by) for a univariate g.
    ///
    /// Decided exactly: the quadratic part is a perfect square of a linear
    /// form iff q2^2 = 4 q1 q3 (valid since p != 2); when it is, f has the
    /// excluded form iff the linear part is proportional to the same form.
    /// A vanishing quadratic part leaves a linear polynomial, which is always
    /// of the excluded shape.
    pub fn is_nondegenerate(&self) -> bool {
        if !self.depends_on_x() || !self.depends_on_y() {
            return false;
        }
        let f = &self.ctx;
        if self.q1 == 0 && self.q2 == 0 && self.q3 == 0 {
            // linear: l1 x + l2 y + c = g(l1 x + l2 y)
            return false;
        }
        let disc_lhs = f.mul_code(self.q2, self.q2);
        let four = f.scalar(4).code();
        let disc_rhs = f.mul_code(four, f.mul_code(self.q1, self.q3));
        if disc_lhs != disc_rhs {
            // quadratic part is not a square of a linear form
            return true;
        }
        // quadratic part = s (ax + by)^2; recover (a, b) up to scalar
        let (a, b) = if self.q1 != 0 {
            (f.add_code(self.q1, self.q1), self.q2)
        } else {
            // then q2 = 0 and q3 != 0
            (0, f.add_code(self.q3, self.q3))
        };
        // degenerate iff (l1, l2) is proportional to (a, b)
        f.mul_code(self.l1, b) != f.mul_code(self.l2, a)
    }
}

impl fmt::Display for BivariateQuadratic {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (coef, mono) in [
            (self.q1, "x^2"),
            (self.q2, "x*y"),
            (self.q3, "y^2"),
            (self.l1, "x"),
            (self.l2, "y"),
        ] {
            match coef {
                0 => {}
                1 => terms.push(mono.to_string()),
                c => terms.push(format!("{c}*{mono}")),
            }
        }
        if self.c != 0 || terms.is_empty() {
            terms.push(self.c.to_string());
        }
        write!(out, "{}", terms.join("+"))
    }
}

/// Univariate polynomial, little-endian coefficients, no leading zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariatePoly {
    ctx: FieldCtx,
    coeffs: Vec<u64>,
}

impl UnivariatePoly {
    pub fn from_codes(ctx: &FieldCtx, coeffs: &[u64]) -> Result<Self> {
        for &c in coeffs {
            if c >= ctx.q() {
                return Err(Error::InvalidParams(format!(
                    "coefficient code {c} out of range for field of order {}",
                    ctx.q()
                )));
            }
        }
        Ok(UnivariatePoly {
            ctx: ctx.clone(),
            coeffs: fppoly::trim(coeffs.to_vec()),
        })
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        UnivariatePoly {
            ctx: ctx.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants including the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub(crate) fn eval_code(&self, x: u64) -> u64 {
        let f = &self.ctx;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = f.add_code(f.mul_code(acc, x), c);
        }
        acc
    }

    pub fn eval(&self, x: FElem) -> FElem {
        assert!(self.ctx.owns(x), "field context mismatch");
        self.ctx.elem(self.eval_code(x.code())).unwrap()
    }

    pub fn add(&self, other: &UnivariatePoly) -> UnivariatePoly {
        assert!(self.ctx.same_ctx(&other.ctx));
        assert!(
            self.ctx.is_prime_field(),
            "coefficient vectors are prime-field only"
        );
        UnivariatePoly {
            ctx: self.ctx.clone(),
            coeffs: fppoly::add(&self.coeffs, &other.coeffs, self.ctx.p()),
        }
    }

    pub fn mul(&self, other: &UnivariatePoly) -> UnivariatePoly {
        assert!(self.ctx.same_ctx(&other.ctx));
        assert!(
            self.ctx.is_prime_field(),
            "coefficient vectors are prime-field only"
        );
        UnivariatePoly {
            ctx: self.ctx.clone(),
            coeffs: fppoly::mul(&self.coeffs, &other.coeffs, self.ctx.p()),
        }
    }

    pub fn pow(&self, mut e: u64) -> UnivariatePoly {
        assert!(
            self.ctx.is_prime_field(),
            "coefficient vectors are prime-field only"
        );
        let mut acc = UnivariatePoly::from_codes(&self.ctx, &[1]).unwrap();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Parse a literal like `x^2+3*x+1` over the given field.
    pub fn parse(src: &str, ctx: &FieldCtx) -> Result<Self> {
        let monos = parse_monomials(src, ctx)?;
        let mut coeffs = Vec::new();
        for m in monos {
            if m.ey != 0 {
                return Err(Error::Parse(format!(
                    "unexpected variable y in univariate polynomial `{src}`"
                )));
            }
            if coeffs.len() <= m.ex as usize {
                coeffs.resize(m.ex as usize + 1, 0);
            }
            coeffs[m.ex as usize] = ctx.add_code(coeffs[m.ex as usize], m.coef);
        }
        UnivariatePoly::from_codes(ctx, &coeffs)
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(out, "0");
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}*x^{i}"),
            };
            terms.push(t);
        }
        write!(out, "{}", terms.join("+"))
    }
}

/// f = g/h with g, h coprime and h monic and nonzero; degree = max(deg g, deg h).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: UnivariatePoly,
    den: UnivariatePoly,
}

impl RationalFunction {
    pub fn new(num: UnivariatePoly, den: UnivariatePoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParams(
                "rational function denominator is zero".into(),
            ));
        }
        assert!(num.ctx().same_ctx(den.ctx()));
        let ctx = num.ctx().clone();
        if !ctx.is_prime_field() {
            return Err(Error::Unsupported(
                "rational functions are implemented over prime fields".into(),
            ));
        }
        let p = ctx.p();
        let g = fppoly::gcd(num.coeffs(), den.coeffs(), p);
        let (mut ncoef, mut dcoef) = if g.len() > 1 {
            (
                exact_div(num.coeffs(), &g, p),
                exact_div(den.coeffs(), &g, p),
            )
        } else {
            (num.coeffs().to_vec(), den.coeffs().to_vec())
        };
        // normalize denominator monic for a canonical representative
        let lead = *dcoef.last().unwrap();
        if lead != 1 {
            let li = fppoly::invm(lead, p);
            ncoef = fppoly::scale(&ncoef, li, p);
            dcoef = fppoly::scale(&dcoef, li, p);
        }
        Ok(RationalFunction {
            num: UnivariatePoly::from_codes(&ctx, &ncoef)?,
            den: UnivariatePoly::from_codes(&ctx, &dcoef)?,
        })
    }

    pub fn from_poly(p: UnivariatePoly) -> Result<Self> {
        let one = UnivariatePoly::from_codes(p.ctx(), &[1])?;
        RationalFunction::new(p, one)
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.num.ctx()
    }

    pub fn numerator(&self) -> &UnivariatePoly {
        &self.num
    }

    pub fn denominator(&self) -> &UnivariatePoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    /// None at a pole.
    pub(crate) fn eval_code(&self, x: u64) -> Option<u64> {
        let d = self.den.eval_code(x);
        if d == 0 {
            return None;
        }
        let n = self.num.eval_code(x);
        Some(
            self.ctx()
                .mul_code(n, self.ctx().inv_code(d).expect("nonzero denominator")),
        )
    }

    pub fn eval(&self, x: FElem) -> Option<FElem> {
        assert!(self.ctx().owns(x));
        self.eval_code(x.code())
            .map(|c| self.ctx().elem(c).unwrap())
    }

    /// Parse `g/h` (or a plain polynomial) over the given field.
    pub fn parse(src: &str, ctx: &FieldCtx) -> Result<Self> {
        match src.split_once('/') {
            Some((g, h)) => {
                let g = g.trim().trim_start_matches('(').trim_end_matches(')');
                let h = h.trim().trim_start_matches('(').trim_end_matches(')');
                RationalFunction::new(
                    UnivariatePoly::parse(g, ctx)?,
                    UnivariatePoly::parse(h, ctx)?,
                )
            }
            None => RationalFunction::from_poly(UnivariatePoly::parse(src, ctx)?),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() && self.den.coeff(0) == 1 {
            write!(out, "{}", self.num)
        } else {
            write!(out, "({})/({})", self.num, self.den)
        }
    }
}

fn exact_div(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // long division known to be exact (b divides a)
    let mut r = fppoly::trim(a.to_vec());
    let b = fppoly::trim(b.to_vec());
    let mut q = vec![0u64; r.len().saturating_sub(b.len()) + 1];
    let lead_inv = fppoly::invm(*b.last().unwrap(), p);
    while r.len() >= b.len() && !r.is_empty() {
        let coef = fppoly::mulm(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - b.len();
        q[shift] = coef;
        for (j, &bc) in b.iter().enumerate() {
            r[shift + j] = fppoly::subm(r[shift + j], fppoly::mulm(coef, bc, p), p);
        }
        r = fppoly::trim(r);
    }
    debug_assert!(r.is_empty(), "division was not exact");
    fppoly::trim(q)
}

/// Verdict of the sufficient non-degeneracy test for rational functions.
///
/// The excluded family is a(g(x)^p - g(x)) + bx + c over rational g. Members
/// with a = 0 or constant g are exactly the linear polynomials bx + c; all
/// others have degree >= p. Hence degree d with 2 <= d < p certifies
/// non-membership; linear polynomials certify membership; everything else is
/// left undecided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NondegVerdict {
    Pass,
    Fail,
    Unknown,
}

pub fn rational_nondeg_sufficient(f: &RationalFunction) -> NondegVerdict {
    let d = f.degree();
    if f.is_polynomial() && f.num.degree() <= 1 {
        return NondegVerdict::Fail;
    }
    if d >= 2 && (d as u64) < f.ctx().p() {
        return NondegVerdict::Pass;
    }
    NondegVerdict::Unknown
}

// ---------------------------------------------------------------------------
// literal parser
// ---------------------------------------------------------------------------

struct Monomial {
    coef: u64,
    ex: u32,
    ey: u32,
}

/// Parse a sum of monomials over x and y: integer coefficients (optionally
/// negative via a leading or separating minus), `*` products, `^` powers.
fn parse_monomials(src: &str, ctx: &FieldCtx) -> Result<Vec<Monomial>> {
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial literal".into()));
    }
    let bytes = compact.as_bytes();
    let mut monos = Vec::new();
    let mut i = 0usize;
    let mut sign_negative = false;
    if bytes[0] == b'+' || bytes[0] == b'-' {
        sign_negative = bytes[0] == b'-';
        i = 1;
    }
    while i < bytes.len() {
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &compact[start..i];
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in `{src}`")));
        }
        monos.push(parse_term(term, sign_negative, ctx)?);
        if i < bytes.len() {
            sign_negative = bytes[i] == b'-';
            i += 1;
        }
    }
    Ok(monos)
}

fn parse_term(term: &str, negative: bool, ctx: &FieldCtx) -> Result<Monomial> {
    let mut coef: u64 = 1;
    let mut ex: u32 = 0;
    let mut ey: u32 = 0;
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in term `{term}`")));
        }
        let (var, pow_str) = match factor.split_once('^') {
            Some((v, e)) => (v, Some(e)),
            None => (factor, None),
        };
        match var {
            "x" | "y" => {
                let e: u32 = match pow_str {
                    Some(e) => e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?,
                    None => 1,
                };
                if var == "x" {
                    ex += e;
                } else {
                    ey += e;
                }
            }
            digits => {
                if pow_str.is_some() {
                    return Err(Error::Parse(format!(
                        "exponent on numeric literal in `{factor}`"
                    )));
                }
                let v: u64 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad factor `{factor}`")))?;
                coef = ctx.mul_code(coef, ctx.scalar(v).code());
            }
        }
    }
    if negative {
        coef = ctx.neg_code(coef);
    }
    Ok(Monomial { coef, ex, ey })
}

impl BivariateQuadratic {
    /// Parse a literal like `x^2+3*x*y+y^2+2*x+1` over the given field.
    /// Total degree must be at most 2.
    pub fn parse(src: &str, ctx: &FieldCtx) -> Result<Self> {
        let monos = parse_monomials(src, ctx)?;
        let mut coeffs = [0u64; 6];
        for m in monos {
            let slot = match (m.ex, m.ey) {
                (2, 0) => 0,
                (1, 1) => 1,
                (0, 2) => 2,
                (1, 0) => 3,
                (0, 1) => 4,
                (0, 0) => 5,
                _ => return Err(Error::Parse(format!("total degree exceeds 2 in `{src}`"))),
            };
            coeffs[slot] = ctx.add_code(coeffs[slot], m.coef);
        }
        Self::from_codes(ctx, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldCtx {
        FieldCtx::prime(7).unwrap()
    }

    #[test]
    fn nondegenerate_examples() {
        let f = f7();
        let xy = BivariateQuadratic::product(&f);
        assert!(xy.is_nondegenerate());

        // (x+y)^2 = x^2 + 2xy + y^2
        let sq = BivariateQuadratic::from_codes(&f, [1, 2, 1, 0, 0, 0]).unwrap();
        assert!(!sq.is_nondegenerate());

        // x^2 + 2xy + y^2 + x + 2y: linear part not proportional to x + y
        let g = BivariateQuadratic::from_codes(&f, [1, 2, 1, 1, 2, 0]).unwrap();
        assert!(g.is_nondegenerate());

        // x^2 + 2xy + y^2 + 3x + 3y = (x+y)^2 + 3(x+y)
        let h = BivariateQuadratic::from_codes(&f, [1, 2, 1, 3, 3, 0]).unwrap();
        assert!(!h.is_nondegenerate());

        // x^2 + y (depends on both, quadratic part x^2 alone, linear part has y)
        let par = BivariateQuadratic::parse("x^2+y", &f).unwrap();
        assert!(par.is_nondegenerate());

        // single-variable polynomials are degenerate
        let only_x = BivariateQuadratic::parse("x^2+3*x", &f).unwrap();
        assert!(!only_x.is_nondegenerate());
        let linear = BivariateQuadratic::parse("x+y", &f).unwrap();
        assert!(!linear.is_nondegenerate());
    }

    /// Exhaustive decision: does f equal g(ax + by) pointwise for some
    /// (a, b) != 0 (up to scalar) and univariate quadratic g?
    fn degenerate_by_exhaustion(f: &BivariateQuadratic) -> bool {
        let ctx = f.ctx();
        let p = ctx.p();
        let mut directions = Vec::new();
        for b in 0..p {
            directions.push((1u64, b));
        }
        directions.push((0, 1));
        for (a, b) in directions {
            for g2 in 0..p {
                for g1 in 0..p {
                    for g0 in 0..p {
                        let mut ok = true;
                        'outer: for x in 0..p {
                            for y in 0..p {
                                let u = ctx.add_code(ctx.mul_code(a, x), ctx.mul_code(b, y));
                                let gv = ctx.add_code(
                                    ctx.add_code(
                                        ctx.mul_code(g2, ctx.mul_code(u, u)),
                                        ctx.mul_code(g1, u),
                                    ),
                                    g0,
                                );
                                if gv != f.eval_code(x, y) {
                                    ok = false;
                                    break 'outer;
                                }
                            }
                        }
                        if ok {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn nondegeneracy_agrees_with_exhaustive_oracle() {
        // every quadratic over F_3 and F_5, sampled quadratics over F_7..F_13
        for p in [3u64, 5] {
            let ctx = FieldCtx::prime(p).unwrap();
            for code in 0..p.pow(6) {
                let mut digits = [0u64; 6];
                let mut c = code;
                for d in digits.iter_mut() {
                    *d = c % p;
                    c /= p;
                }
                let f = BivariateQuadratic::from_codes(&ctx, digits).unwrap();
                assert_eq!(
                    f.is_nondegenerate(),
                    !degenerate_by_exhaustion(&f),
                    "disagreement on {digits:?} over F_{p}"
                );
            }
        }
        let mut rng = crate::util::SplitMix::new(99);
        for p in [7u64, 11, 13] {
            let ctx = FieldCtx::prime(p).unwrap();
            for _ in 0..40 {
                let digits = [
                    rng.below(p),
                    rng.below(p),
                    rng.below(p),
                    rng.below(p),
                    rng.below(p),
                    rng.below(p),
                ];
                let f = BivariateQuadratic::from_codes(&ctx, digits).unwrap();
                assert_eq!(
                    f.is_nondegenerate(),
                    !degenerate_by_exhaustion(&f),
                    "disagreement on {digits:?} over F_{p}"
                );
            }
        }
    }

    #[test]
    fn rational_verdicts() {
        let f = f7();
        let x2 = RationalFunction::parse("x^2", &f).unwrap();
        assert_eq!(rational_nondeg_sufficient(&x2), NondegVerdict::Pass);

        let lin = RationalFunction::parse("3*x+1", &f).unwrap();
        assert_eq!(rational_nondeg_sufficient(&lin), NondegVerdict::Fail);

        let f11 = FieldCtx::prime(11).unwrap();
        let x11 = RationalFunction::parse("x^11", &f11).unwrap();
        assert_eq!(rational_nondeg_sufficient(&x11), NondegVerdict::Unknown);

        let inv_x = RationalFunction::parse("1/x", &f).unwrap();
        assert_eq!(rational_nondeg_sufficient(&inv_x), NondegVerdict::Unknown);
    }

    #[test]
    fn excluded_family_never_passes() {
        // f = a(g^p - g) + bx + c for random polynomial g of degree <= 2
        let mut rng = crate::util::SplitMix::new(3);
        for p in [3u64, 5, 7] {
            let ctx = FieldCtx::prime(p).unwrap();
            for _ in 0..20 {
                let a = rng.below(p);
                let b = rng.below(p);
                let c = rng.below(p);
                let g =
                    UnivariatePoly::from_codes(&ctx, &[rng.below(p), rng.below(p), rng.below(p)])
                        .unwrap();
                let gp = g.pow(p);
                let mut shifted =
                    gp.add(&UnivariatePoly::from_codes(&ctx, &scale_neg(&g, &ctx)).unwrap());
                shifted = UnivariatePoly::from_codes(&ctx, &fppoly::scale(shifted.coeffs(), a, p))
                    .unwrap();
                let linear = UnivariatePoly::from_codes(&ctx, &[c, b]).unwrap();
                let member = RationalFunction::from_poly(shifted.add(&linear)).unwrap();
                assert_ne!(
                    rational_nondeg_sufficient(&member),
                    NondegVerdict::Pass,
                    "family member passed: p={p}"
                );
            }
        }
    }

    fn scale_neg(g: &UnivariatePoly, ctx: &FieldCtx) -> Vec<u64> {
        g.coeffs().iter().map(|&c| ctx.neg_code(c)).collect()
    }

    #[test]
    fn gcd_reduction_in_rational_functions() {
        let f = f7();
        // (x^2 - 1)/(x - 1) reduces to x + 1
        let num = UnivariatePoly::parse("x^2+6", &f).unwrap();
        let den = UnivariatePoly::parse("x+6", &f).unwrap();
        let r = RationalFunction::new(num, den).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator().coeffs(), &[1, 1]);
        assert_eq!(r.degree(), 1);
    }

    #[test]
    fn parser_round_trips() {
        let f = f7();
        let g = BivariateQuadratic::parse("x^2+3*x*y+y^2+2*x+1", &f).unwrap();
        assert_eq!((g.q1, g.q2, g.q3, g.l1, g.l2, g.c), (1, 3, 1, 2, 0, 1));
        let h = BivariateQuadratic::parse("x*y-1", &f).unwrap();
        assert_eq!((h.q2, h.c), (1, 6));
        let u = UnivariatePoly::parse("x^2+1", &f).unwrap();
        assert_eq!(u.coeffs(), &[1, 0, 1]);
        let neg = UnivariatePoly::parse("-x+2", &f).unwrap();
        assert_eq!(neg.coeffs(), &[2, 6]);
        assert!(BivariateQuadratic::parse("x^3", &f).is_err());
        assert!(UnivariatePoly::parse("x^2+y", &f).is_err());
        // display round-trip
        let again = BivariateQuadratic::parse(&g.to_string(), &f).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn rational_eval_skips_poles() {
        let f = f7();
        let r = RationalFunction::parse("(x^2+1)/(x+1)", &f).unwrap();
        assert!(r.eval(f.scalar(6)).is_none()); // pole at x = -1
                                                // (2^2+1)/(2+1) = 5/3 = 5 * 3^{-1} = 5 * 5 = 25 = 4
        assert_eq!(r.eval(f.scalar(2)).unwrap(), f.scalar(4));
    }
}

//! Exact arithmetic in F_p (p an odd prime) and in small extensions F_{p^n},
//! n <= 4, together with the trace map and the additive character
//! psi(x) = e_p(Tr(x)), e_p(k) = exp(2*pi*i*k/p).
//!
//! A context is immutable after construction and cheap to clone (shared
//! internals). Elements carry the fingerprint of their context; mixing
//! contexts is a hard error, never silent garbage.

use std::fmt;
use std::sync::Arc;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fppoly;
use crate::util::Fnv1a;

/// Largest supported extension degree. Keeps irreducibility checking exact
/// and cheap; everything downstream is exercised mostly at n = 1.
pub const MAX_EXTENSION_DEGREE: usize = 4;

/// Character tables are precomputed up to this p; beyond it e_p is evaluated
/// per call (same formula, no table).
const CHAR_TABLE_MAX_P: u64 = 1 << 21;

/// Fingerprint identifying a field context. Two contexts constructed from the
/// same (p, n, modulus) data receive the same id and interoperate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtxId(u64);

impl fmt::Debug for CtxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CtxId({:016x})", self.0)
    }
}

struct CtxInner {
    id: CtxId,
    p: u64,
    n: usize,
    q: u64,
    /// Monic modulus polynomial, little-endian, length n + 1. Empty for n = 1.
    modulus: Vec<u64>,
    char_table: OnceLock<Vec<Complex64>>,
}

/// A prime field F_p or a small extension F_{p^n}.
#[derive(Clone)]
pub struct FieldCtx(Arc<CtxInner>);

/// A field element: the canonical integer code sum(coeff_i * p^i) < q plus
/// the fingerprint of its context.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FElem {
    code: u64,
    ctx: CtxId,
}

impl fmt::Debug for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FElem({})", self.code)
    }
}

impl FElem {
    /// Canonical integer encoding in [0, q).
    pub fn code(self) -> u64 {
        self.code
    }

    pub fn ctx_id(self) -> CtxId {
        self.ctx
    }
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n.is_multiple_of(sp) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = fppoly::powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = fppoly::mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn fingerprint(p: u64, n: usize, modulus: &[u64]) -> CtxId {
    let mut h = Fnv1a::new();
    h.write_str("field-ctx");
    h.write_u64(p);
    h.write_u64(n as u64);
    for &c in modulus {
        h.write_u64(c);
    }
    CtxId(h.finish_u64())
}

/// Exact irreducibility over F_p for degree 2..=4, by complete root search
/// (degrees 2, 3) plus a gcd factor test against x^(p^2) - x (degree 4).
fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let deg = modulus.len() - 1;
    match deg {
        2 | 3 => (0..p).all(|x| fppoly::eval(modulus, x, p) != 0),
        4 => {
            // reducible iff it has a factor of degree 1 or 2, i.e. a common
            // factor with x^(p^2) - x
            let xp2 = fppoly::x_powmod(p * p, modulus, p);
            let diff = fppoly::sub(&xp2, &[0, 1], p);
            let g = fppoly::gcd(modulus, &diff, p);
            g.len() == 1
        }
        _ => unreachable!("degree checked by constructor"),
    }
}

impl FieldCtx {
    /// The prime field F_p, p an odd prime.
    pub fn prime(p: u64) -> Result<FieldCtx> {
        if p == 2 {
            return Err(Error::FieldConstruction(
                "characteristic 2 is not supported".into(),
            ));
        }
        if !is_prime_u64(p) {
            return Err(Error::FieldConstruction(format!("{p} is not prime")));
        }
        Ok(FieldCtx(Arc::new(CtxInner {
            id: fingerprint(p, 1, &[]),
            p,
            n: 1,
            q: p,
            modulus: Vec::new(),
            char_table: OnceLock::new(),
        })))
    }

    /// F_{p^n} presented as F_p\[t\]/(modulus), with `modulus` monic of degree
    /// n in little-endian order (length n + 1). Irreducibility is verified
    /// exactly at construction.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<FieldCtx> {
        if p == 2 || !is_prime_u64(p) {
            return Err(Error::FieldConstruction(format!("{p} is not an odd prime")));
        }
        let m = fppoly::trim(modulus.iter().map(|&c| c % p).collect());
        if m.len() < 3 {
            return Err(Error::FieldConstruction(
                "extension modulus must have degree >= 2".into(),
            ));
        }
        let n = m.len() - 1;
        if n > MAX_EXTENSION_DEGREE {
            return Err(Error::FieldConstruction(format!(
                "extension degree {n} exceeds the supported maximum {MAX_EXTENSION_DEGREE}"
            )));
        }
        if *m.last().unwrap() != 1 {
            return Err(Error::FieldConstruction("modulus must be monic".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..n {
            q = q.checked_mul(p).ok_or_else(|| {
                Error::FieldConstruction("q = p^n does not fit in 64 bits".into())
            })?;
        }
        if !is_irreducible(&m, p) {
            return Err(Error::FieldConstruction(
                "modulus polynomial is reducible over F_p".into(),
            ));
        }
        Ok(FieldCtx(Arc::new(CtxInner {
            id: fingerprint(p, n, &m),
            p,
            n,
            q,
            modulus: m,
            char_table: OnceLock::new(),
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    /// Field order q = p^n.
    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn id(&self) -> CtxId {
        self.0.id
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.n == 1
    }

    /// Element from its canonical code.
    pub fn elem(&self, code: u64) -> Result<FElem> {
        if code >= self.0.q {
            return Err(Error::InvalidParams(format!(
                "code {code} out of range for field of order {}",
                self.0.q
            )));
        }
        Ok(FElem {
            code,
            ctx: self.0.id,
        })
    }

    /// Base-field scalar k mod p, embedded as a constant.
    pub fn scalar(&self, k: u64) -> FElem {
        FElem {
            code: k % self.0.p,
            ctx: self.0.id,
        }
    }

    /// Scalar from a signed integer (convenient for literals like -1).
    pub fn scalar_i64(&self, k: i64) -> FElem {
        let p = self.0.p as i64;
        let r = ((k % p) + p) % p;
        self.scalar(r as u64)
    }

    pub fn zero(&self) -> FElem {
        self.scalar(0)
    }

    pub fn one(&self) -> FElem {
        self.scalar(1)
    }

    /// Element from little-endian coefficients over F_p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FElem> {
        if coeffs.len() > self.0.n {
            return Err(Error::InvalidParams(format!(
                "{} coefficients for extension degree {}",
                coeffs.len(),
                self.0.n
            )));
        }
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            code = code * self.0.p + (c % self.0.p);
        }
        Ok(FElem {
            code,
            ctx: self.0.id,
        })
    }

    /// Little-endian coefficients of an element.
    pub fn coeffs(&self, x: FElem) -> Vec<u64> {
        self.check(x);
        let mut c = x.code;
        let mut out = vec![0u64; self.0.n];
        for slot in out.iter_mut() {
            *slot = c % self.0.p;
            c /= self.0.p;
        }
        out
    }

    #[inline]
    fn check(&self, x: FElem) {
        assert!(
            x.ctx == self.0.id,
            "field context mismatch: element does not belong to F_{{{}^{}}}",
            self.0.p,
            self.0.n
        );
    }

    pub fn same_ctx(&self, other: &FieldCtx) -> bool {
        self.0.id == other.0.id
    }

    pub fn owns(&self, x: FElem) -> bool {
        x.ctx == self.0.id
    }

    // -- code-level arithmetic (hot paths over sets use these directly) --

    #[inline]
    pub(crate) fn add_code(&self, a: u64, b: u64) -> u64 {
        if self.0.n == 1 {
            fppoly::addm(a, b, self.0.p)
        } else {
            self.lift_binop(a, b, fppoly::addm)
        }
    }

    #[inline]
    pub(crate) fn sub_code(&self, a: u64, b: u64) -> u64 {
        if self.0.n == 1 {
            fppoly::subm(a, b, self.0.p)
        } else {
            self.lift_binop(a, b, fppoly::subm)
        }
    }

    #[inline]
    pub(crate) fn neg_code(&self, a: u64) -> u64 {
        self.sub_code(0, a)
    }

    pub(crate) fn mul_code(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if self.0.n == 1 {
            return fppoly::mulm(a, b, p);
        }
        let av = self.decode(a);
        let bv = self.decode(b);
        let prod = fppoly::mul(&av, &bv, p);
        let red = fppoly::rem(&prod, &self.0.modulus, p);
        self.encode(&red)
    }

    pub(crate) fn pow_code(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = self.one().code;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_code(acc, base);
            }
            base = self.mul_code(base, base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv_code(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // Fermat in the multiplicative group of order q - 1
        Ok(self.pow_code(a, self.0.q - 2))
    }

    fn lift_binop(&self, a: u64, b: u64, op: fn(u64, u64, u64) -> u64) -> u64 {
        let p = self.0.p;
        let mut out = 0u64;
        let mut pa = a;
        let mut pb = b;
        let mut mult = 1u64;
        for _ in 0..self.0.n {
            let digit = op(pa % p, pb % p, p);
            out += digit * mult;
            mult = mult.saturating_mul(p);
            pa /= p;
            pb /= p;
        }
        out
    }

    fn decode(&self, code: u64) -> Vec<u64> {
        let mut c = code;
        let mut out = vec![0u64; self.0.n];
        for slot in out.iter_mut() {
            *slot = c % self.0.p;
            c /= self.0.p;
        }
        out
    }

    fn encode(&self, coeffs: &[u64]) -> u64 {
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            code = code * self.0.p + c;
        }
        code
    }

    // -- element-level operations --

    pub fn add(&self, a: FElem, b: FElem) -> FElem {
        self.check(a);
        self.check(b);
        FElem {
            code: self.add_code(a.code, b.code),
            ctx: self.0.id,
        }
    }

    pub fn sub(&self, a: FElem, b: FElem) -> FElem {
        self.check(a);
        self.check(b);
        FElem {
            code: self.sub_code(a.code, b.code),
            ctx: self.0.id,
        }
    }

    pub fn neg(&self, a: FElem) -> FElem {
        self.check(a);
        FElem {
            code: self.neg_code(a.code),
            ctx: self.0.id,
        }
    }

    pub fn mul(&self, a: FElem, b: FElem) -> FElem {
        self.check(a);
        self.check(b);
        FElem {
            code: self.mul_code(a.code, b.code),
            ctx: self.0.id,
        }
    }

    /// a^e for a non-negative integer exponent; a^0 = 1 including a = 0.
    pub fn pow(&self, a: FElem, e: u64) -> FElem {
        self.check(a);
        FElem {
            code: self.pow_code(a.code, e),
            ctx: self.0.id,
        }
    }

    pub fn inv(&self, a: FElem) -> Result<FElem> {
        self.check(a);
        Ok(FElem {
            code: self.inv_code(a.code)?,
            ctx: self.0.id,
        })
    }

    pub fn div(&self, a: FElem, b: FElem) -> Result<FElem> {
        let bi = self.inv(b)?;
        Ok(self.mul(a, bi))
    }

    /// Trace to the base field: Tr(x) = x + x^p + ... + x^(p^(n-1)),
    /// returned as a residue in [0, p). For n = 1 this is the identity.
    pub fn trace(&self, x: FElem) -> u64 {
        self.check(x);
        if self.0.n == 1 {
            return x.code;
        }
        let mut frob = x.code;
        let mut acc = x.code;
        for _ in 1..self.0.n {
            frob = self.pow_code(frob, self.0.p);
            acc = self.add_code(acc, frob);
        }
        let coeffs = self.decode(acc);
        debug_assert!(
            coeffs[1..].iter().all(|&c| c == 0),
            "trace must land in the base field"
        );
        coeffs[0]
    }

    /// e_p(k) = exp(2*pi*i*k/p) for a base-field residue k.
    pub fn e_p(&self, k: u64) -> Complex64 {
        let p = self.0.p;
        let k = k % p;
        if p <= CHAR_TABLE_MAX_P {
            let table = self.0.char_table.get_or_init(|| {
                (0..p)
                    .map(|j| {
                        let angle = 2.0 * std::f64::consts::PI * (j as f64) / (p as f64);
                        Complex64::new(angle.cos(), angle.sin())
                    })
                    .collect()
            });
            table[k as usize]
        } else {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (p as f64);
            Complex64::new(angle.cos(), angle.sin())
        }
    }

    /// The additive character psi(x) = e_p(Tr(x)); a complex unit.
    pub fn additive_character(&self, x: FElem) -> Complex64 {
        self.e_p(self.trace(x))
    }

    /// Iterator over all q field elements in code order.
    pub fn all_elements(&self) -> impl Iterator<Item = FElem> + '_ {
        let id = self.0.id;
        (0..self.0.q).map(move |code| FElem { code, ctx: id })
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.n == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{{{}^{}}}", self.0.p, self.0.n)
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

//! Coefficient-vector arithmetic over F_p (little-endian, no leading zeros).
//! Shared by field construction (irreducibility tests) and the public
//! polynomial types.

pub(crate) fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

#[inline]
pub(crate) fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub(crate) fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse by Fermat; requires p prime and a != 0 mod p.
pub(crate) fn invm(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    powm(a, p - 2, p)
}

fn zip_coeffs(a: &[u64], b: &[u64], p: u64, op: fn(u64, u64, u64) -> u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            op(x, y, p)
        })
        .collect();
    trim(out)
}

pub(crate) fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    zip_coeffs(a, b, p, addm)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    zip_coeffs(a, b, p, subm)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    trim(out)
}

pub(crate) fn scale(a: &[u64], s: u64, p: u64) -> Vec<u64> {
    trim(a.iter().map(|&x| mulm(x, s, p)).collect())
}

pub(crate) fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = addm(mulm(acc, x, p), c, p);
    }
    acc
}

/// Remainder of a modulo b (b nonzero), coefficients over F_p.
pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = invm(*b.last().unwrap(), p);
    while r.len() >= b.len() && !r.is_empty() {
        let dr = r.len() - 1;
        let coef = mulm(*r.last().unwrap(), lead_inv, p);
        let shift = dr - db;
        for (j, &bc) in b.iter().enumerate() {
            r[shift + j] = subm(r[shift + j], mulm(coef, bc, p), p);
        }
        r = trim(r);
    }
    r
}

/// Monic gcd; gcd(0, 0) = 0 by convention.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        if lead != 1 {
            a = scale(&a, invm(lead, p), p);
        }
    }
    a
}

/// x^e modulo the monic polynomial `m`, over F_p.
pub(crate) fn x_powmod(e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = rem(&[0, 1], m, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &base, p), m, p);
        }
        base = rem(&mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rem_and_gcd() {
        let p = 7;
        // (x^2 - 1) mod (x - 1) = 0
        let a = vec![6, 0, 1];
        let b = vec![6, 1];
        assert!(rem(&a, &b, p).is_empty());
        // gcd(x^2 - 1, x - 1) = x - 1 normalized monic = x + 6
        assert_eq!(gcd(&a, &b, p), vec![6, 1]);
    }

    #[test]
    fn x_powmod_order() {
        // x^(p^2) == x mod any irreducible quadratic; t^2+1 over F_3
        let m = vec![1, 0, 1];
        let r = x_powmod(9, &m, 3);
        assert_eq!(r, vec![0, 1]);
    }
}

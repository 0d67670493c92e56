//! Exact integer convolution via a number-theoretic transform, used by the
//! fast additive-energy path.
//!
//! Working modulus is 998244353 = 119 * 2^23 + 1 (primitive root 3), which
//! admits power-of-two transforms up to length 2^23. Difference-count
//! coefficients are bounded by min(|A|, |B|) <= p, and the supported prime
//! range keeps every true coefficient far below the modulus, so the values
//! recovered mod 998244353 are the exact integers.

use crate::error::{Error, Result};

pub(crate) const NTT_PRIME: u64 = 998_244_353;
const NTT_ROOT: u64 = 3;
const MAX_LOG_LEN: u32 = 23;

/// Largest field prime the convolution path accepts. The transform length is
/// the next power of two above 2p - 1.
pub const MAX_CONVOLUTION_PRIME: u64 = 1 << 22;

#[inline]
fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % NTT_PRIME as u128) as u64
}

fn powm(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a);
        }
        a = mulm(a, a);
        e >>= 1;
    }
    r
}

/// In-place iterative radix-2 transform; `invert` runs the inverse including
/// the 1/len scaling.
fn transform(values: &mut [u64], invert: bool) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= n {
        let mut w_len = powm(NTT_ROOT, (NTT_PRIME - 1) / len as u64);
        if invert {
            w_len = powm(w_len, NTT_PRIME - 2);
        }
        for start in (0..n).step_by(len) {
            let mut w = 1u64;
            for k in 0..len / 2 {
                let u = values[start + k];
                let v = mulm(values[start + k + len / 2], w);
                values[start + k] = if u + v >= NTT_PRIME {
                    u + v - NTT_PRIME
                } else {
                    u + v
                };
                values[start + k + len / 2] = if u >= v { u - v } else { u + NTT_PRIME - v };
                w = mulm(w, w_len);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = powm(n as u64, NTT_PRIME - 2);
        for v in values.iter_mut() {
            *v = mulm(*v, n_inv);
        }
    }
}

/// Exact cyclic difference counts over F_p (prime field): entry d equals
/// |{(a, b) in A x B : a - b = d mod p}|.
pub(crate) fn cyclic_difference_counts(
    p: u64,
    a_codes: &[u64],
    b_codes: &[u64],
) -> Result<Vec<u64>> {
    if p > MAX_CONVOLUTION_PRIME {
        return Err(Error::TooLarge(format!(
            "convolution path supports p <= {MAX_CONVOLUTION_PRIME}, got {p}"
        )));
    }
    let pu = p as usize;
    if a_codes.is_empty() || b_codes.is_empty() {
        return Ok(vec![0; pu]);
    }
    let target = 2 * pu - 1;
    let len = target.next_power_of_two();
    debug_assert!(len.trailing_zeros() <= MAX_LOG_LEN);

    let mut u = vec![0u64; len];
    let mut v = vec![0u64; len];
    for &a in a_codes {
        u[a as usize] = 1;
    }
    // reversed indicator: v[i] = 1_B((p - i) mod p), so the linear convolution
    // at index d accumulates pairs with a - b = d mod p (after folding)
    for &b in b_codes {
        v[((p - b) % p) as usize] = 1;
    }
    transform(&mut u, false);
    transform(&mut v, false);
    for i in 0..len {
        u[i] = mulm(u[i], v[i]);
    }
    transform(&mut u, true);

    let mut counts = vec![0u64; pu];
    for (i, &c) in u.iter().enumerate().take(target) {
        counts[i % pu] += c;
    }
    // exactness guards: coefficients are genuine pair counts
    let cap = a_codes.len().min(b_codes.len()) as u64;
    let mut mass: u128 = 0;
    for &c in &counts {
        debug_assert!(c <= cap, "convolution coefficient exceeds the pair bound");
        mass += c as u128;
    }
    if mass != a_codes.len() as u128 * b_codes.len() as u128 {
        return Err(Error::InvalidInputs(
            "convolution mass check failed (internal error)".into(),
        ));
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_round_trip() {
        let mut v = vec![5u64, 0, 3, 7, 1, 2, 9, 4];
        let orig = v.clone();
        transform(&mut v, false);
        transform(&mut v, true);
        assert_eq!(v, orig);
    }

    #[test]
    fn difference_counts_match_direct_loop() {
        let p = 101u64;
        let a: Vec<u64> = vec![0, 1, 2, 5, 40, 99];
        let b: Vec<u64> = vec![3, 4, 40, 77];
        let fast = cyclic_difference_counts(p, &a, &b).unwrap();
        let mut slow = vec![0u64; p as usize];
        for &x in &a {
            for &y in &b {
                slow[((x + p - y) % p) as usize] += 1;
            }
        }
        assert_eq!(fast, slow);
    }
}

//! Exact energy computation: moments of representation functions, polynomial
//! image energies, six-tuple counts, and the basic energy identities.
//!
//! All energies are exact non-negative integers carried in 128 bits; square
//! roots appear only inside inequality checks, with a documented floating
//! slack. The convolution path is exactness-verified against the histogram
//! path (and both against a quadruple loop in the test suites).

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::ntt;
use crate::poly::BivariateQuadratic;
use crate::report::{BoundReport, DigestBuilder, Value};
use crate::sets::{poly_image, FSet, SetOp};

/// Method that produced an energy value; all methods agree exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyMethod {
    Naive,
    Histogram,
    Convolution,
}

/// An exact energy together with the path that computed it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergyValue {
    pub value: u128,
    pub method: EnergyMethod,
}

impl EnergyValue {
    fn histogram(value: u128) -> Self {
        EnergyValue {
            value,
            method: EnergyMethod::Histogram,
        }
    }
}

/// E_k(A, B) = sum over x in A - B of r_{A-B}(x)^k.
pub fn additive_energy_k(a: &FSet, b: &FSet, k: u32) -> Result<EnergyValue> {
    if k == 0 {
        return Err(Error::InvalidParams("moment order k must be >= 1".into()));
    }
    let h = a.rep_function(b, SetOp::Sub)?;
    Ok(EnergyValue::histogram(h.moment(k)))
}

/// E(A, B) = E_2(A, B); the quadruple count a1 + b2 = a2 + b1.
pub fn additive_energy_pair(a: &FSet, b: &FSet) -> Result<EnergyValue> {
    additive_energy_k(a, b, 2)
}

/// E(A) = E_2(A, A).
pub fn additive_energy(a: &FSet) -> Result<EnergyValue> {
    additive_energy_k(a, a, 2)
}

/// E^x_k(A, B) = sum over x in A/B of r_{A/B}(x)^k (zero denominators skipped).
pub fn mult_energy_k(a: &FSet, b: &FSet, k: u32) -> Result<EnergyValue> {
    if k == 0 {
        return Err(Error::InvalidParams("moment order k must be >= 1".into()));
    }
    let h = a.rep_function(b, SetOp::Div)?;
    Ok(EnergyValue::histogram(h.moment(k)))
}

/// E^x(A) = E^x_2(A, A).
pub fn mult_energy(a: &FSet) -> Result<EnergyValue> {
    mult_energy_k(a, a, 2)
}

/// E_f(A, B) = |{(a1, a2, b1, b2) : f(a1, b1) = f(a2, b2)}|, the second moment
/// of the image histogram.
pub fn poly_energy_pair(f: &BivariateQuadratic, a: &FSet, b: &FSet) -> Result<EnergyValue> {
    let (_, hist) = poly_image(f, a, b)?;
    Ok(EnergyValue::histogram(hist.moment(2)))
}

/// E_f(A) = E_f(A, A).
pub fn poly_energy(f: &BivariateQuadratic, a: &FSet) -> Result<EnergyValue> {
    poly_energy_pair(f, a, a)
}

/// Difference-count convolution path; equals `additive_energy_pair` exactly.
/// Prime fields only.
pub fn fast_additive_energy(a: &FSet, b: &FSet) -> Result<EnergyValue> {
    if !a.ctx().same_ctx(b.ctx()) {
        return Err(Error::CtxMismatch);
    }
    if !a.ctx().is_prime_field() {
        return Err(Error::Unsupported(
            "convolution energy path requires a prime field".into(),
        ));
    }
    let counts = ntt::cyclic_difference_counts(a.ctx().p(), a.codes(), b.codes())?;
    let mut acc: u128 = 0;
    for &c in &counts {
        acc += (c as u128) * (c as u128);
    }
    Ok(EnergyValue {
        value: acc,
        method: EnergyMethod::Convolution,
    })
}

/// Budget for six-tuple counting: |U||V||W| may not exceed this.
pub const SIX_TUPLE_TRIPLE_BUDGET: u128 = 10_000_000;

/// |{(u1,u2,v1,v2,w1,w2) : f3(u1,v1,w1) = f3(u2,v2,w2)}| for a three-variable
/// evaluator over element codes, computed as the second moment of the value
/// histogram over U x V x W.
pub fn six_tuple_count<F>(
    ctx: &FieldCtx,
    f3: F,
    u: &FSet,
    v: &FSet,
    w: &FSet,
) -> Result<EnergyValue>
where
    F: Fn(u64, u64, u64) -> u64,
{
    if !ctx.same_ctx(u.ctx()) || !ctx.same_ctx(v.ctx()) || !ctx.same_ctx(w.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let triples = u.len() as u128 * v.len() as u128 * w.len() as u128;
    if triples > SIX_TUPLE_TRIPLE_BUDGET {
        return Err(Error::TooLarge(format!(
            "{triples} triples exceed the six-tuple budget {SIX_TUPLE_TRIPLE_BUDGET}"
        )));
    }
    let mut counts: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
    for &x in u.codes() {
        for &y in v.codes() {
            for &z in w.codes() {
                *counts.entry(f3(x, y, z)).or_insert(0) += 1;
            }
        }
    }
    let mut acc: u128 = 0;
    for &c in counts.values() {
        acc = acc
            .checked_add(c as u128 * c as u128)
            .expect("six-tuple count exceeds 128 bits");
    }
    Ok(EnergyValue::histogram(acc))
}

/// Relative slack for inequality checks whose sides involve square roots.
pub const SQRT_CHECK_SLACK: f64 = 1e-9;

/// E(A, B) * |A op B| >= |A|^2 |B|^2 for op in {+, -}; exact integers on both
/// sides. Reported with lhs = |A|^2|B|^2 so that pass means lhs <= rhs.
pub fn check_cauchy_schwarz(a: &FSet, b: &FSet, op: SetOp) -> Result<BoundReport> {
    if op != SetOp::Add && op != SetOp::Sub {
        return Err(Error::InvalidInputs(
            "cauchy_schwarz is stated for + and -".into(),
        ));
    }
    let energy = additive_energy_pair(a, b)?.value;
    let span = a.setop(b, op)?.len() as u128;
    let lhs = (a.len() as u128 * a.len() as u128) * (b.len() as u128 * b.len() as u128);
    let rhs = energy * span;
    let digest = DigestBuilder::new("cauchy_schwarz")
        .set(a)
        .set(b)
        .text(&op.to_string())
        .finish();
    Ok(BoundReport::exact(
        format!(
            "cauchy_schwarz_{}",
            if op == SetOp::Add { "sum" } else { "diff" }
        ),
        Value::Exact(lhs),
        Value::Exact(rhs),
        1.0,
        digest,
    ))
}

/// First-moment identity: total representation mass equals |A||B| (minus
/// skipped zero-denominator pairs for ratios). Passes with equality.
pub fn check_first_moment(a: &FSet, b: &FSet, op: SetOp) -> Result<BoundReport> {
    let h = a.rep_function(b, op)?;
    let expected = match op {
        SetOp::Div => {
            let nonzero = b.codes().iter().filter(|&&c| c != 0).count();
            a.len() as u128 * nonzero as u128
        }
        _ => a.len() as u128 * b.len() as u128,
    };
    let digest = DigestBuilder::new("first_moment")
        .set(a)
        .set(b)
        .text(&op.to_string())
        .finish();
    let mut report = BoundReport::exact(
        "first_moment".to_string(),
        Value::Exact(h.total() as u128),
        Value::Exact(expected),
        1.0,
        digest,
    );
    report.pass = h.total() as u128 == expected;
    Ok(report)
}

/// Energy sub-additivity: E_f(union V_i) <= (sum_{i,j} E_f(V_i, V_j)^{1/2})^2,
/// square roots in floating point with 1e-9 relative slack.
pub fn check_subadditivity(f: &BivariateQuadratic, parts: &[FSet]) -> Result<BoundReport> {
    if parts.is_empty() {
        return Err(Error::InvalidInputs("subadditivity needs >= 1 set".into()));
    }
    let mut union = parts[0].clone();
    for part in &parts[1..] {
        union = union.union(part)?;
    }
    let lhs = poly_energy(f, &union)?.value;
    let mut root_sum = 0.0f64;
    for vi in parts {
        for vj in parts {
            root_sum += (poly_energy_pair(f, vi, vj)?.value as f64).sqrt();
        }
    }
    let rhs = root_sum * root_sum;
    let mut digest = DigestBuilder::new("subadditivity").text(&f.to_string());
    for part in parts {
        digest = digest.set(part);
    }
    let pass = (lhs as f64) <= rhs * (1.0 + SQRT_CHECK_SLACK);
    let mut report = BoundReport::exact(
        "subadditivity".to_string(),
        Value::Exact(lhs),
        Value::Float(rhs),
        1.0,
        digest.finish(),
    );
    report.pass = pass;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::sets::{generate, GenSpec};

    fn fp(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    fn set(ctx: &FieldCtx, codes: &[u64]) -> FSet {
        FSet::from_codes(ctx, codes.to_vec()).unwrap()
    }

    /// Quadruple-loop oracle: |{(a1, b1, a2, b2) : a1 - b1 = a2 - b2}|.
    fn quadruple_loop(a: &FSet, b: &FSet) -> u128 {
        let f = a.ctx();
        let mut count = 0u128;
        for &a1 in a.codes() {
            for &b1 in b.codes() {
                for &a2 in a.codes() {
                    for &b2 in b.codes() {
                        if f.sub_code(a1, b1) == f.sub_code(a2, b2) {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn energy_of_small_interval() {
        let f = fp(101);
        let a = set(&f, &[0, 1, 2]);
        assert_eq!(additive_energy(&a).unwrap().value, 19);
        assert_eq!(quadruple_loop(&a, &a), 19);
    }

    #[test]
    fn first_moment_identity() {
        let f = fp(101);
        let a = set(&f, &[3, 17, 50, 90]);
        let b = set(&f, &[1, 2, 8]);
        assert_eq!(additive_energy_k(&a, &b, 1).unwrap().value, 12);
        let report = check_first_moment(&a, &b, SetOp::Add).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn full_group_attains_cube() {
        let f = fp(5);
        let all = FSet::full_field(&f);
        assert_eq!(additive_energy(&all).unwrap().value, 125);
        assert_eq!(mult_energy(&all).unwrap().value, {
            // zero row removed: A/A histogram over 4x5 pairs
            let h = all.rep_function(&all, SetOp::Div).unwrap();
            h.moment(2)
        });
    }

    #[test]
    fn multiplicative_energy_examples() {
        let f = fp(13);
        let g = set(&f, &[1, 2, 4]);
        assert_eq!(mult_energy(&g).unwrap().value, 19);

        // multiplicative subgroup attains m^3
        let f7 = fp(7);
        let sub = generate(&f7, &GenSpec::Subgroup { order: 3 }).unwrap();
        assert_eq!(mult_energy(&sub).unwrap().value, 27);

        // first moment with 0 not in B
        let a = set(&f, &[5, 6, 9, 11]);
        let b = set(&f, &[1, 2, 8]);
        assert_eq!(mult_energy_k(&a, &b, 1).unwrap().value, 12);
    }

    #[test]
    fn poly_energy_examples() {
        let f = fp(13);
        let a = set(&f, &[1, 2, 4]);
        let xy = BivariateQuadratic::product(&f);
        assert_eq!(poly_energy(&xy, &a).unwrap().value, 19);

        let plus = BivariateQuadratic::sum(&f);
        let b = set(&f, &[0, 3, 5, 7]);
        assert_eq!(
            poly_energy_pair(&plus, &a, &b).unwrap().value,
            additive_energy_k(
                &a,
                &FSet::from_codes(&f, b.codes().iter().map(|&c| f.neg_code(c)).collect()).unwrap(),
                2
            )
            .unwrap()
            .value
        );

        // single row: E_f({a}, B) <= |B|^2 with equality iff f(a, .) constant
        let row = set(&f, &[3]);
        let constant_in_y = BivariateQuadratic::parse("x^2+x", &f).unwrap();
        assert_eq!(
            poly_energy_pair(&constant_in_y, &row, &b).unwrap().value,
            (b.len() * b.len()) as u128
        );
        let e = poly_energy_pair(&xy, &row, &b).unwrap().value;
        assert!(e <= (b.len() * b.len()) as u128);
    }

    #[test]
    fn convolution_matches_oracles() {
        let mut rng = crate::util::SplitMix::new(77);
        for p in [101u64, 257] {
            let f = fp(p);
            for _ in 0..25 {
                let asz = 1 + rng.below(40);
                let bsz = 1 + rng.below(40);
                let a = generate(
                    &f,
                    &GenSpec::Random {
                        seed: rng.next_u64(),
                        size: asz,
                    },
                )
                .unwrap();
                let b = generate(
                    &f,
                    &GenSpec::Random {
                        seed: rng.next_u64(),
                        size: bsz,
                    },
                )
                .unwrap();
                let hist = additive_energy_pair(&a, &b).unwrap().value;
                let conv = fast_additive_energy(&a, &b).unwrap().value;
                let quad = quadruple_loop(&a, &b);
                assert_eq!(hist, conv);
                assert_eq!(hist, quad);
            }
        }
    }

    #[test]
    fn convolution_edge_cases() {
        let f = fp(101);
        let all = FSet::full_field(&f);
        assert_eq!(
            fast_additive_energy(&all, &all).unwrap().value,
            101 * 101 * 101
        );
        let empty = FSet::empty(&f);
        assert_eq!(fast_additive_energy(&empty, &all).unwrap().value, 0);
        let f9 = FieldCtx::extension(3, &[1, 0, 1]).unwrap();
        let s = FSet::from_codes(&f9, vec![1, 2]).unwrap();
        assert!(matches!(
            fast_additive_energy(&s, &s),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn six_tuple_examples() {
        let f = fp(101);
        let u = set(&f, &[0, 1]);
        let sum3 = |x: u64, y: u64, z: u64| f.add_code(f.add_code(x, y), z);
        assert_eq!(six_tuple_count(&f, sum3, &u, &u, &u).unwrap().value, 20);

        let s1 = set(&f, &[4]);
        assert_eq!(six_tuple_count(&f, sum3, &s1, &s1, &s1).unwrap().value, 1);

        let constant = |_: u64, _: u64, _: u64| 7u64;
        let v = set(&f, &[0, 1, 2]);
        assert_eq!(
            six_tuple_count(&f, constant, &v, &v, &v).unwrap().value,
            27 * 27
        );

        let big = FieldCtx::prime(100003).unwrap();
        let w = FSet::from_codes(&big, (0..300).collect()).unwrap();
        let sum3b = |x: u64, y: u64, z: u64| big.add_code(big.add_code(x, y), z);
        assert!(matches!(
            six_tuple_count(&big, sum3b, &w, &w, &w),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn identity_checks() {
        let f = fp(101);
        let a = set(&f, &[0, 1, 2]);
        let cs = check_cauchy_schwarz(&a, &a, SetOp::Add).unwrap();
        assert!(cs.pass);
        assert_eq!(cs.lhs, Value::Exact(81));
        assert_eq!(cs.rhs, Value::Exact(19 * 5));

        let xy = BivariateQuadratic::product(&f);
        let single = check_subadditivity(&xy, std::slice::from_ref(&a)).unwrap();
        assert!(single.pass);

        let b = set(&f, &[10, 20, 30]);
        let multi = check_subadditivity(&xy, &[a, b]).unwrap();
        assert!(multi.pass);
    }

    #[test]
    fn energy_upper_bounds() {
        let mut rng = crate::util::SplitMix::new(5);
        let f = fp(257);
        for _ in 0..20 {
            let a = generate(
                &f,
                &GenSpec::Random {
                    seed: rng.next_u64(),
                    size: 1 + rng.below(30),
                },
            )
            .unwrap();
            let b = generate(
                &f,
                &GenSpec::Random {
                    seed: rng.next_u64(),
                    size: 1 + rng.below(30),
                },
            )
            .unwrap();
            let e = additive_energy_pair(&a, &b).unwrap().value;
            let cap = a.len() as u128 * b.len() as u128 * a.len().min(b.len()) as u128;
            assert!(e <= cap);
            // E_4 <= E_2 * max_r^2
            let h = a.rep_function(&b, SetOp::Sub).unwrap();
            let e4 = h.moment(4);
            let maxr = h.max_count() as u128;
            assert!(e4 <= e * maxr * maxr);
            // E_f |f(A,B)| >= |A|^2 |B|^2
            let xy = BivariateQuadratic::product(&f);
            let (img, hist) = poly_image(&xy, &a, &b).unwrap();
            assert!(
                hist.moment(2) * img.len() as u128
                    >= (a.len() as u128).pow(2) * (b.len() as u128).pow(2)
            );
        }
    }
}

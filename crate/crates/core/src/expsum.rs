//! Exponential sums: exact-order double sums of the additive character,
//! the constant-free Vinogradov/Hoelder/Konyagin-Shkredov checks, low-energy
//! subsets of forward-invariant sets, and the Littlewood l1 norm.
//!
//! Logs inside M_T follow the natural-log convention and every report that
//! depends on it carries an `ln_convention` flag.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::decompose::{balog_wooley_decompose, large_set_subsets, LargeSetMode};
use crate::energy::additive_energy;
use crate::error::{Error, Result};
use crate::poly::{
    rational_nondeg_sufficient, BivariateQuadratic, NondegVerdict, RationalFunction, UnivariatePoly,
};
use crate::report::{BoundReport, DigestBuilder, Value};
use crate::sets::{rational_image, univariate_image, FSet};

/// Largest field order the full-transform routines sweep.
pub const MAX_TRANSFORM_Q: u64 = 1 << 22;

/// An evaluated exponential sum.
#[derive(Clone, Copy, Debug)]
pub struct ExpSumValue {
    pub value: Complex64,
    pub magnitude: f64,
    /// Number of summands.
    pub terms: u64,
}

fn kahan_sum<I: Iterator<Item = Complex64>>(iter: I) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for v in iter {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Sum of psi(s * t) over S x T, summed in canonical order with compensation.
pub fn double_sum(s: &FSet, t: &FSet) -> Result<ExpSumValue> {
    if !s.ctx().same_ctx(t.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let ctx = s.ctx();
    let value = kahan_sum(s.codes().iter().flat_map(|&a| {
        t.codes().iter().map(move |&b| {
            let prod = ctx.mul_code(a, b);
            ctx.e_p(ctx.trace(ctx.elem(prod).unwrap()))
        })
    }));
    Ok(ExpSumValue {
        value,
        magnitude: value.norm(),
        terms: (s.len() * t.len()) as u64,
    })
}

/// |sum psi(st)| <= sqrt(|S||T|q); constant-free, asserted in the batteries.
pub fn check_vinogradov(s: &FSet, t: &FSet) -> Result<BoundReport> {
    let ds = double_sum(s, t)?;
    let q = s.ctx().q() as f64;
    let rhs = (s.len() as f64 * t.len() as f64 * q).sqrt();
    let digest = DigestBuilder::new("vinogradov").set(s).set(t).finish();
    Ok(BoundReport::exact(
        "vinogradov".to_string(),
        Value::Float(ds.magnitude),
        Value::Float(rhs),
        1.0,
        digest,
    ))
}

/// |sum psi(xy)|^4 <= q |X|^3 E(Y); constant-free.
pub fn check_holder4(x: &FSet, y: &FSet) -> Result<BoundReport> {
    let ds = double_sum(x, y)?;
    let q = x.ctx().q() as f64;
    let e_y = additive_energy(y)?.value;
    let lhs = ds.magnitude.powi(4);
    let rhs = q * (x.len() as f64).powi(3) * e_y as f64;
    let digest = DigestBuilder::new("holder4").set(x).set(y).finish();
    Ok(BoundReport::exact(
        "holder4".to_string(),
        Value::Float(lhs),
        Value::Float(rhs),
        1.0,
        digest,
    ))
}

/// |sum psi(xy)|^8 <= q |X|^4 |Y|^4 E(X) E(Y); constant-free.
pub fn check_holder8(x: &FSet, y: &FSet) -> Result<BoundReport> {
    let ds = double_sum(x, y)?;
    let q = x.ctx().q() as f64;
    let e_x = additive_energy(x)?.value as f64;
    let e_y = additive_energy(y)?.value as f64;
    let lhs = ds.magnitude.powi(8);
    let rhs = q * (x.len() as f64 * y.len() as f64).powi(4) * e_x * e_y;
    let digest = DigestBuilder::new("holder8").set(x).set(y).finish();
    Ok(BoundReport::exact(
        "holder8".to_string(),
        Value::Float(lhs),
        Value::Float(rhs),
        1.0,
        digest,
    ))
}

/// Mean absolute character sum over the whole field:
/// (1/q) sum over y of |sum over x in X of psi(xy)|.
pub fn mean_abs_char_sum(x: &FSet) -> Result<f64> {
    let ctx = x.ctx();
    if ctx.q() > MAX_TRANSFORM_Q {
        return Err(Error::TooLarge(format!(
            "full-field sweep needs q <= {MAX_TRANSFORM_Q}"
        )));
    }
    let mut total = 0.0f64;
    for y in ctx.all_elements() {
        let s = kahan_sum(x.codes().iter().map(|&a| {
            let prod = ctx.mul_code(a, y.code());
            ctx.e_p(ctx.trace(ctx.elem(prod).unwrap()))
        }));
        total += s.norm();
    }
    Ok(total / ctx.q() as f64)
}

/// Konyagin-Shkredov: for X1 inside X,
/// (1/q) sum_y |sum_{x in X} psi(xy)| >= |X1|^2 / (|X|^{1/2} E(X1)^{1/2}).
/// Reported with lhs = the energy expression so that pass means lhs <= rhs.
pub fn check_konyagin_shkredov(x1: &FSet, x: &FSet) -> Result<BoundReport> {
    if !x1.is_subset_of(x) {
        return Err(Error::InvalidInputs("need X1 to be a subset of X".into()));
    }
    let l1 = mean_abs_char_sum(x)?;
    let e_x1 = additive_energy(x1)?.value as f64;
    let lhs = (x1.len() as f64).powi(2) / ((x.len() as f64).sqrt() * e_x1.sqrt());
    let digest = DigestBuilder::new("konyagin_shkredov")
        .set(x1)
        .set(x)
        .finish();
    Ok(BoundReport::exact(
        "konyagin_shkredov".to_string(),
        Value::Float(lhs),
        Value::Float(l1),
        1.0,
        digest,
    ))
}

/// M_T of the large-set regime: natural logs, the convention every dependent
/// report records.
pub fn m_t(t_len: usize, q: u64) -> f64 {
    let t = t_len as f64;
    let q = q as f64;
    let lg = t.ln().max(f64::MIN_POSITIVE);
    (q.sqrt() / (t.sqrt() * lg.sqrt())).min(t / (q.sqrt() * lg))
}

/// The polynomial or rational map defining forward invariance.
#[derive(Clone, Debug)]
pub enum InvariantMap {
    Poly(UnivariatePoly),
    Rational(RationalFunction),
}

impl InvariantMap {
    fn image(&self, t: &FSet) -> FSet {
        match self {
            InvariantMap::Poly(f) => univariate_image(f, t),
            InvariantMap::Rational(f) => rational_image(f, t),
        }
    }

    fn degree(&self) -> usize {
        match self {
            InvariantMap::Poly(f) => f.degree(),
            InvariantMap::Rational(f) => f.degree(),
        }
    }

    fn display(&self) -> String {
        match self {
            InvariantMap::Poly(f) => f.to_string(),
            InvariantMap::Rational(f) => f.to_string(),
        }
    }

    fn has_pole_in(&self, t: &FSet) -> Option<u64> {
        match self {
            InvariantMap::Poly(_) => None,
            InvariantMap::Rational(f) => t
                .codes()
                .iter()
                .copied()
                .find(|&x| f.eval_code(x).is_none()),
        }
    }
}

/// Which regime drives the subset extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantRegime {
    /// Quadratic polynomial over F_p, |T| <= p^{5/8} expected.
    SmallP,
    /// Rational map over F_q with a degree certificate.
    LargeQ,
}

/// Which side of the dichotomy produced U.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichotomyBranch {
    /// U is the low-additive-energy part itself.
    Additive,
    /// U is the image under f of the other part.
    Image,
}

#[derive(Clone, Debug)]
pub struct InvariantSubsetOutcome {
    pub u: FSet,
    /// Recorded proportion constant: |U| >= |T| / proportion.
    pub proportion: u64,
    pub e_u: u128,
    pub branch: DichotomyBranch,
    /// True when |T| <= p^{5/8} held (small-p regime).
    pub size_constraint_ok: bool,
    /// Measured E(U) against the regime's reference bound; report only.
    pub report: BoundReport,
}

/// Dichotomy threshold: the additive part is kept when it holds at least
/// half of T.
const DICHOTOMY_HALF: usize = 2;

/// Extract a low-additive-energy subset U of a forward-invariant set T
/// (f(T) contained in T, verified exactly at entry).
///
/// Small-p regime: decompose T against g(x, y) = f(x) + f(y); keep the
/// low-E part if it is at least half of T, otherwise take the f-image of the
/// complementary part (still inside T by invariance). Large-q regime: the
/// same dichotomy on the regularized pair from the image-mode extraction.
pub fn invariant_low_energy_subset(
    t: &FSet,
    map: &InvariantMap,
    regime: InvariantRegime,
) -> Result<InvariantSubsetOutcome> {
    if t.len() < 2 {
        return Err(Error::TooSmall(
            "forward-invariant set must have >= 2 elements".into(),
        ));
    }
    if let Some(pole) = map.has_pole_in(t) {
        return Err(Error::NotForwardInvariant(format!(
            "map has a pole at element {pole} of T"
        )));
    }
    let image = map.image(t);
    if !image.is_subset_of(t) {
        return Err(Error::NotForwardInvariant(format!(
            "f(T) has {} elements outside T",
            image.difference(t).map(|d| d.len()).unwrap_or(0)
        )));
    }

    let ctx = t.ctx();
    let p = ctx.p() as f64;
    let size_constraint_ok = (t.len() as f64) <= p.powf(5.0 / 8.0);

    let (u, proportion, branch) = match regime {
        InvariantRegime::SmallP => {
            let f = match map {
                InvariantMap::Poly(f) if f.degree() == 2 => f,
                _ => {
                    return Err(Error::InvalidInputs(
                        "small-p regime needs a quadratic polynomial".into(),
                    ))
                }
            };
            if !ctx.is_prime_field() {
                return Err(Error::Unsupported(
                    "small-p regime runs over prime fields".into(),
                ));
            }
            let g = BivariateQuadratic::from_sum_of_univariate(f)?;
            let decomposition = balog_wooley_decompose(t, &g, None)?;
            if decomposition.s.len() * DICHOTOMY_HALF >= t.len() {
                (
                    decomposition.s,
                    DICHOTOMY_HALF as u64,
                    DichotomyBranch::Additive,
                )
            } else {
                // |T-part| > |T|/2 and a quadratic is at most 2-to-1
                let img = univariate_image(f, &decomposition.t);
                (img, 2 * DICHOTOMY_HALF as u64, DichotomyBranch::Image)
            }
        }
        InvariantRegime::LargeQ => {
            let f = match map {
                InvariantMap::Rational(f) => f,
                InvariantMap::Poly(f) => {
                    return match RationalFunction::from_poly(f.clone()) {
                        Ok(rf) => {
                            invariant_low_energy_subset(t, &InvariantMap::Rational(rf), regime)
                        }
                        Err(e) => Err(e),
                    }
                }
            };
            if rational_nondeg_sufficient(f) != NondegVerdict::Pass {
                return Err(Error::InsufficientNondegeneracy(format!(
                    "{f} lacks a degree certificate (need 2 <= deg < p)"
                )));
            }
            let (pair, _) = large_set_subsets(t, LargeSetMode::Image, Some(f), 64.0)?;
            if pair.b.len() * DICHOTOMY_HALF >= t.len() {
                (pair.b, DICHOTOMY_HALF as u64, DichotomyBranch::Additive)
            } else {
                let img = rational_image(f, &pair.c);
                let d = map.degree() as u64;
                (img, DICHOTOMY_HALF as u64 * (d + 1), DichotomyBranch::Image)
            }
        }
    };

    assert!(u.is_subset_of(t), "U must remain inside T");
    assert!(
        u.len() as u64 * proportion >= t.len() as u64,
        "size floor |U| >= |T|/{proportion} failed: |U| = {}, |T| = {}",
        u.len(),
        t.len()
    );
    let e_u = additive_energy(&u)?.value;

    // reference bound of the regime, measured into a report
    let tn = t.len() as f64;
    let (name, rhs, ln_flag) = match regime {
        InvariantRegime::SmallP => ("invariant_subset_energy_small_p", tn.powf(3.0 - 0.2), false),
        InvariantRegime::LargeQ => (
            "invariant_subset_energy_large_q",
            tn.powi(3) / m_t(t.len(), ctx.q()),
            true,
        ),
    };
    let digest = DigestBuilder::new(name)
        .set(t)
        .text(&map.display())
        .finish();
    let mut flags = BTreeMap::from([("size_constraint".to_string(), size_constraint_ok)]);
    if ln_flag {
        flags.insert("ln_convention".to_string(), true);
    }
    let report = BoundReport::new(
        name,
        Value::Exact(e_u),
        Value::Float(rhs),
        64.0,
        flags,
        digest,
    );

    Ok(InvariantSubsetOutcome {
        u,
        proportion,
        e_u,
        branch,
        size_constraint_ok,
        report,
    })
}

/// Compose the double-sum bound for a forward-invariant target: the
/// constant-free intermediate |sum|^4 <= q |S|^3 E(U), and the derived
/// comparison |sum| <= const * (|S|^3 |T|^{3 - 1/5} p)^{1/4}.
pub fn composed_invariant_double_sum(
    s: &FSet,
    outcome: &InvariantSubsetOutcome,
    t: &FSet,
    constant: f64,
) -> Result<(BoundReport, BoundReport)> {
    let hard = check_holder4(s, &outcome.u)?;
    let ds = double_sum(s, &outcome.u)?;
    let p = s.ctx().p() as f64;
    let rhs = ((s.len() as f64).powi(3) * (t.len() as f64).powf(2.8) * p).powf(0.25);
    let digest = DigestBuilder::new("composed_invariant_double_sum")
        .set(s)
        .set(&outcome.u)
        .set(t)
        .finish();
    let composed = BoundReport::new(
        "invariant_double_sum",
        Value::Float(ds.magnitude),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("size_constraint".to_string(), outcome.size_constraint_ok)]),
        digest,
    );
    Ok((hard, composed))
}

/// Littlewood l1 norm: (1/p) sum over lambda of |sum_{a in A} e_p(lambda a)|.
/// Prime fields only; direct length-p sweep of the indicator transform.
pub fn littlewood_l1(a: &FSet) -> Result<f64> {
    let ctx = a.ctx();
    if !ctx.is_prime_field() {
        return Err(Error::Unsupported(
            "littlewood l1 runs over prime fields".into(),
        ));
    }
    let p = ctx.p();
    if p > MAX_TRANSFORM_Q {
        return Err(Error::TooLarge(format!(
            "littlewood sweep needs p <= {MAX_TRANSFORM_Q}"
        )));
    }
    let mut total = 0.0f64;
    for lambda in 0..p {
        let s = kahan_sum(
            a.codes()
                .iter()
                .map(|&x| ctx.e_p(((lambda as u128 * x as u128) % p as u128) as u64)),
        );
        total += s.norm();
    }
    Ok(total / p as f64)
}

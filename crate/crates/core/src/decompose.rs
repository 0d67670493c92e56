//! Low-energy decomposition: the iterative extraction loop that splits a set
//! into a low-additive-energy part S and a low-f-energy part T, plus the
//! large-set subset constructions and the mixed-energy subset extraction.

use std::collections::BTreeMap;

use crate::energy::{additive_energy, mult_energy, poly_energy, poly_energy_pair};
use crate::error::{Error, Result};
use crate::poly::{
    rational_nondeg_sufficient, BivariateQuadratic, NondegVerdict, RationalFunction,
};
use crate::regularize::{popular_subset, regularize, regularize2, PopularSubset, RegularTriple};
use crate::report::{BoundReport, DigestBuilder, Value};
use crate::sets::{rational_image, FSet, SetOp};

/// One round of the decomposition loop.
#[derive(Clone, Debug)]
pub struct RoundLog {
    pub index: u32,
    /// |S_i| entering the round.
    pub s_size: u64,
    /// E(S_i) entering the round.
    pub s_energy: u128,
    /// |B_i| extracted this round.
    pub extracted: u64,
}

/// Result of the decomposition loop: A = S ⊔ T with E(S) below the threshold
/// |A|^3 / M, plus the full round trace.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub s: FSet,
    pub t: FSet,
    pub m: f64,
    pub f: BivariateQuadratic,
    pub rounds: Vec<RoundLog>,
    /// |A|^3 / M.
    pub threshold: f64,
    /// E(S) recomputed after the loop by the histogram path.
    pub final_s_energy: u128,
    /// E_f(T), reported but never asserted against a bound.
    pub f_energy_t: u128,
    /// Whether |A| <= p^{5/8} held at entry (a warning flag, not an error).
    pub p_constraint_ok: bool,
    /// Rounds in which the extraction came back empty and a single
    /// highest-popularity element was removed instead.
    pub safeguard_events: u32,
}

impl Decomposition {
    /// Exact post-conditions: S and T partition A and E(S) <= |A|^3 / M.
    pub fn verify(&self, a: &FSet) -> bool {
        let partition = self.s.is_disjoint_from(&self.t)
            && self.s.union(&self.t).map(|u| u == *a).unwrap_or(false);
        partition && self.final_s_energy as f64 <= self.threshold
    }
}

/// Default exponent: M = |A|^(1/5).
pub fn default_m(a_len: usize) -> f64 {
    if a_len <= 1 {
        1.0
    } else {
        (a_len as f64).powf(0.2)
    }
}

/// Extraction step of the decomposition loop: the popular subset of X, with
/// the polynomial checked for non-degeneracy. The structural guarantees
/// (popularity certificate and pigeonhole size) are asserted inside; the
/// mixed-energy bound tied to this extraction is measured separately by
/// [`measure_mixed_energy_bound`], never asserted.
pub fn extract_low_ef_subset(x: &FSet, a: &FSet, f: &BivariateQuadratic) -> Result<PopularSubset> {
    if !f.is_nondegenerate() {
        return Err(Error::Degenerate(format!(
            "{f} depends on one variable or is a polynomial of a linear form"
        )));
    }
    debug_assert!(x.is_subset_of(a), "extraction source must live inside A");
    popular_subset(x)
}

/// Measured form of the mixed-energy bound for an extracted subset:
/// max(E_f(X*, Y), E_f(Y, X*)) against |X*|^4 |Y|^{3/2} |A|^{3/2} / E(X)^{3/2}.
/// Hypothesis flags record the p-constraint |X|^5 |A| <= p^2 E(X), the
/// energy floor E(X) >= |A|^{8/3}, and |Y| >= |X*|.
pub fn measure_mixed_energy_bound(
    extraction: &PopularSubset,
    x: &FSet,
    y: &FSet,
    a: &FSet,
    f: &BivariateQuadratic,
    constant: f64,
) -> Result<BoundReport> {
    let e_x = extraction.cls.energy;
    let exy = poly_energy_pair(f, &extraction.x_star, y)?.value;
    let eyx = poly_energy_pair(f, y, &extraction.x_star)?.value;
    let lhs = exy.max(eyx);
    let xs = extraction.x_star.len() as f64;
    let rhs = xs.powi(4) * (y.len() as f64).powf(1.5) * (a.len() as f64).powf(1.5)
        / (e_x as f64).powf(1.5);
    let p = a.ctx().p() as f64;
    let p_constraint = (x.len() as f64).powi(5) * a.len() as f64 <= p * p * e_x as f64;
    let energy_floor = e_x as f64 >= (a.len() as f64).powf(8.0 / 3.0);
    let digest = DigestBuilder::new("mixed_energy_extraction")
        .set(x)
        .set(y)
        .set(a)
        .text(&f.to_string())
        .finish();
    Ok(BoundReport::new(
        "mixed_energy_extraction",
        Value::Exact(lhs),
        Value::Float(rhs),
        constant,
        BTreeMap::from([
            ("p_constraint".to_string(), p_constraint),
            ("energy_floor".to_string(), energy_floor),
            (
                "y_at_least_x_star".to_string(),
                y.len() >= extraction.x_star.len(),
            ),
        ]),
        digest,
    ))
}

/// The decomposition loop. While E(S) > |A|^3 / M, extract the popular
/// subset B of S, move it from S to T, and continue. Termination is
/// guaranteed: every extraction is nonempty (a safeguard removes the single
/// most popular element if it ever were empty), so |S| strictly decreases.
///
/// On exit the partition A = S ⊔ T and E(S) <= |A|^3 / M are re-verified
/// from scratch; E_f(T) is computed into the output for reporting.
pub fn balog_wooley_decompose(
    a: &FSet,
    f: &BivariateQuadratic,
    m: Option<f64>,
) -> Result<Decomposition> {
    if !f.is_nondegenerate() {
        return Err(Error::Degenerate(format!(
            "{f} depends on one variable or is a polynomial of a linear form"
        )));
    }
    if !a.ctx().same_ctx(f.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let m = m.unwrap_or_else(|| default_m(a.len()));
    if m.is_nan() || m < 1.0 || (!a.is_empty() && m > a.len() as f64) {
        return Err(Error::InvalidParams(format!(
            "M must lie in [1, |A|], got {m} with |A| = {}",
            a.len()
        )));
    }
    let a_len = a.len() as f64;
    let threshold = a_len.powi(3) / m;
    let p = a.ctx().p() as f64;
    let p_constraint_ok = a_len <= p.powf(5.0 / 8.0);

    let mut s = a.clone();
    let mut t = FSet::empty(a.ctx());
    let mut rounds = Vec::new();
    let mut safeguard_events = 0u32;

    loop {
        if s.len() < 2 {
            break;
        }
        let e_s = additive_energy(&s)?.value;
        if e_s as f64 <= threshold {
            break;
        }
        let extraction = extract_low_ef_subset(&s, a, f)?;
        let mut b = extraction.x_star;
        if b.is_empty() {
            // cannot happen with the pigeonhole extraction, but keep the loop
            // total: drop the single element with the largest column mass
            safeguard_events += 1;
            let hist = s.rep_function(&s, SetOp::Add)?;
            let heaviest = s
                .codes()
                .iter()
                .copied()
                .max_by_key(|&x| {
                    s.codes()
                        .iter()
                        .map(|&y| hist.count(s.ctx().add_code(x, y)))
                        .sum::<u64>()
                })
                .expect("loop guard keeps S nonempty");
            b = FSet::from_codes(s.ctx(), vec![heaviest])?;
        }
        rounds.push(RoundLog {
            index: rounds.len() as u32,
            s_size: s.len() as u64,
            s_energy: e_s,
            extracted: b.len() as u64,
        });
        let next = s.difference(&b)?;
        assert!(next.len() < s.len(), "every round must shrink S");
        t = t.union(&b)?;
        s = next;
        assert!(
            rounds.len() <= a.len(),
            "round count exceeded |A| (termination bug)"
        );
    }

    // re-verify the exit condition from scratch via the histogram path
    let final_s_energy = additive_energy(&s)?.value;
    assert!(
        final_s_energy as f64 <= threshold,
        "post-condition failed: E(S) = {final_s_energy} > threshold {threshold}"
    );
    let f_energy_t = poly_energy(f, &t)?.value;
    assert!(s.is_disjoint_from(&t));
    let reunion = s.union(&t)?;
    assert!(reunion == *a, "S and T must partition A");

    Ok(Decomposition {
        s,
        t,
        m,
        f: f.clone(),
        rounds,
        threshold,
        final_s_energy,
        f_energy_t,
        p_constraint_ok,
        safeguard_events,
    })
}

/// Which energy pair a large-set subset extraction measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LargeSetMode {
    /// Measure E(B) and E^x(C).
    Multiplicative,
    /// Measure E(B) and E(f(C)) for a rational f.
    Image,
}

/// Named measurements attached to an extracted subset pair.
#[derive(Clone, Debug)]
pub struct SubsetPair {
    pub b: FSet,
    pub c: FSet,
    pub measured: BTreeMap<String, u128>,
    pub triple: RegularTriple,
}

/// Large-set energy-energy extraction: regularize A, then measure E(B)
/// against E^x(C) (multiplicative mode) or E(f(C)) (image mode, f rational
/// and certified non-degenerate). The product bound
/// E(B) * E_other(C) <= const * (|A|^7 log|A| / q + |A|^4 (log|A|)^2 q)
/// is evaluated into a report (base-2 logs), never asserted.
pub fn large_set_subsets(
    a: &FSet,
    mode: LargeSetMode,
    f: Option<&RationalFunction>,
    constant: f64,
) -> Result<(SubsetPair, BoundReport)> {
    let triple = regularize(a)?;
    let e_b = additive_energy(&triple.b)?.value;
    let mut measured = BTreeMap::new();
    measured.insert("E(B)".to_string(), e_b);

    let (name, other) = match mode {
        LargeSetMode::Multiplicative => {
            let e = mult_energy(&triple.c)?.value;
            measured.insert("Ex(C)".to_string(), e);
            ("large_set_product_multiplicative", e)
        }
        LargeSetMode::Image => {
            let f = f.ok_or_else(|| {
                Error::InvalidInputs("image mode needs a rational function".into())
            })?;
            if rational_nondeg_sufficient(f) != NondegVerdict::Pass {
                return Err(Error::InsufficientNondegeneracy(format!(
                    "{f} lacks a degree certificate (need 2 <= deg < p)"
                )));
            }
            let image = rational_image(f, &triple.c);
            let e = additive_energy(&image)?.value;
            measured.insert("E(f(C))".to_string(), e);
            ("large_set_product_image", e)
        }
    };

    let q = a.ctx().q() as f64;
    let n = a.len() as f64;
    let lg = n.log2().max(1.0);
    let rhs = n.powi(7) * lg / q + n.powi(4) * lg * lg * q;
    let lhs = (e_b as f64) * (other as f64);
    let digest = DigestBuilder::new(name).set(a).num(mode as u64).finish();
    let report = BoundReport::new(
        name,
        Value::Float(lhs),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("nontrivial_range".to_string(), n >= q.sqrt())]),
        digest,
    );
    Ok((
        SubsetPair {
            b: triple.b.clone(),
            c: triple.c.clone(),
            measured,
            triple,
        },
        report,
    ))
}

/// Minimum companion-set proportion: |V|, |X| must be at least |A| / this.
pub const MIXED_ENERGY_PROPORTION: u64 = 8;

/// Mixed-energy subset extraction: two-set regularization of A against V,
/// then measure E(B, V) and E_f(C, X). Emits two reports: the product bound
/// E(B,V)^3 E_f(C,X)^2 <= const * |A|^6 |X|^3 |V|^5 and the p-constraint
/// |X| |B|^2 |V|^3 / E(B,V) <= p^2.
pub fn mixed_energy_subsets(
    a: &FSet,
    v: &FSet,
    x: &FSet,
    f: &BivariateQuadratic,
    constant: f64,
) -> Result<(SubsetPair, Vec<BoundReport>)> {
    if !f.is_nondegenerate() {
        return Err(Error::Degenerate(format!(
            "{f} depends on one variable or is a polynomial of a linear form"
        )));
    }
    let floor = a.len() as u64 / MIXED_ENERGY_PROPORTION;
    if (v.len() as u64) < floor || (x.len() as u64) < floor {
        return Err(Error::SizeImbalance(format!(
            "need |V|, |X| >= |A|/{MIXED_ENERGY_PROPORTION} = {floor}, got |V| = {}, |X| = {}",
            v.len(),
            x.len()
        )));
    }
    let triple = regularize2(a, v)?;
    let e_bv = triple.energy;
    let e_f_cx = poly_energy_pair(f, &triple.c, x)?.value;
    let mut measured = BTreeMap::new();
    measured.insert("E(B,V)".to_string(), e_bv);
    measured.insert("Ef(C,X)".to_string(), e_f_cx);

    let nf = a.len() as f64;
    let lhs = (e_bv as f64).powi(3) * (e_f_cx as f64).powi(2);
    let rhs = nf.powi(6) * (x.len() as f64).powi(3) * (v.len() as f64).powi(5);
    let p = a.ctx().p() as f64;
    let p_lhs =
        x.len() as f64 * (triple.b.len() as f64).powi(2) * (v.len() as f64).powi(3) / (e_bv as f64);
    let p_ok = p_lhs <= p * p;

    let digest = DigestBuilder::new("mixed_energy_subsets")
        .set(a)
        .set(v)
        .set(x)
        .text(&f.to_string())
        .finish();
    let main = BoundReport::new(
        "mixed_energy_product",
        Value::Float(lhs),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("p_constraint".to_string(), p_ok)]),
        digest.clone(),
    );
    let p_report = BoundReport::new(
        "mixed_energy_p_constraint",
        Value::Float(p_lhs),
        Value::Float(p * p),
        1.0,
        BTreeMap::new(),
        digest,
    );
    Ok((
        SubsetPair {
            b: triple.b.clone(),
            c: triple.c.clone(),
            measured,
            triple,
        },
        vec![main, p_report],
    ))
}

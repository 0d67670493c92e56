//! Finite subsets of a field: sumsets, representation functions, polynomial
//! images, orbits of univariate maps, and the structured-set generators used
//! throughout the experiments.
//!
//! Sets are canonically sorted by integer encoding, so every downstream
//! operation (pigeonholing, tie-breaking, reports) is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};
use crate::poly::{BivariateQuadratic, RationalFunction, UnivariatePoly};
use crate::util::SplitMix;

/// The four set operations of the toolkit. Division skips zero denominators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl fmt::Display for SetOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetOp::Add => "+",
            SetOp::Sub => "-",
            SetOp::Mul => "*",
            SetOp::Div => "/",
        };
        write!(f, "{s}")
    }
}

/// A finite set of field elements; strictly sorted, duplicate-free codes.
#[derive(Clone, PartialEq, Eq)]
pub struct FSet {
    ctx: FieldCtx,
    codes: Vec<u64>,
}

impl fmt::Debug for FSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FSet({}, n={})", self.ctx, self.codes.len())
    }
}

impl FSet {
    pub fn empty(ctx: &FieldCtx) -> FSet {
        FSet {
            ctx: ctx.clone(),
            codes: Vec::new(),
        }
    }

    pub fn from_codes(ctx: &FieldCtx, mut codes: Vec<u64>) -> Result<FSet> {
        for &c in &codes {
            if c >= ctx.q() {
                return Err(Error::InvalidParams(format!(
                    "element code {c} out of range for field of order {}",
                    ctx.q()
                )));
            }
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(FSet {
            ctx: ctx.clone(),
            codes,
        })
    }

    pub fn from_elems(ctx: &FieldCtx, elems: &[FElem]) -> Result<FSet> {
        for &e in elems {
            if !ctx.owns(e) {
                return Err(Error::CtxMismatch);
            }
        }
        FSet::from_codes(ctx, elems.iter().map(|e| e.code()).collect())
    }

    /// The whole field as a set.
    pub fn full_field(ctx: &FieldCtx) -> FSet {
        FSet {
            ctx: ctx.clone(),
            codes: (0..ctx.q()).collect(),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn iter(&self) -> impl Iterator<Item = FElem> + '_ {
        self.codes.iter().map(|&c| self.ctx.elem(c).unwrap())
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn contains(&self, x: FElem) -> bool {
        self.ctx.owns(x) && self.contains_code(x.code())
    }

    pub fn is_subset_of(&self, other: &FSet) -> bool {
        self.ctx.same_ctx(&other.ctx) && self.codes.iter().all(|&c| other.contains_code(c))
    }

    pub fn union(&self, other: &FSet) -> Result<FSet> {
        if !self.ctx.same_ctx(&other.ctx) {
            return Err(Error::CtxMismatch);
        }
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        FSet::from_codes(&self.ctx, codes)
    }

    pub fn intersection(&self, other: &FSet) -> Result<FSet> {
        if !self.ctx.same_ctx(&other.ctx) {
            return Err(Error::CtxMismatch);
        }
        let codes = self
            .codes
            .iter()
            .copied()
            .filter(|&c| other.contains_code(c))
            .collect();
        Ok(FSet {
            ctx: self.ctx.clone(),
            codes,
        })
    }

    /// Elements of self not in other.
    pub fn difference(&self, other: &FSet) -> Result<FSet> {
        if !self.ctx.same_ctx(&other.ctx) {
            return Err(Error::CtxMismatch);
        }
        let codes = self
            .codes
            .iter()
            .copied()
            .filter(|&c| !other.contains_code(c))
            .collect();
        Ok(FSet {
            ctx: self.ctx.clone(),
            codes,
        })
    }

    pub fn is_disjoint_from(&self, other: &FSet) -> bool {
        !self.codes.iter().any(|&c| other.contains_code(c))
    }

    fn check_pair(&self, other: &FSet, op: SetOp) -> Result<()> {
        if !self.ctx.same_ctx(&other.ctx) {
            return Err(Error::CtxMismatch);
        }
        if op == SetOp::Div && !other.codes.iter().any(|&c| c != 0) {
            return Err(Error::EmptyDenominator);
        }
        Ok(())
    }

    /// Exact sumset / difference / product / ratio set. For `/` pairs with a
    /// zero denominator are skipped.
    pub fn setop(&self, other: &FSet, op: SetOp) -> Result<FSet> {
        self.check_pair(other, op)?;
        let f = &self.ctx;
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &a in &self.codes {
            for &b in &other.codes {
                match op {
                    SetOp::Add => out.push(f.add_code(a, b)),
                    SetOp::Sub => out.push(f.sub_code(a, b)),
                    SetOp::Mul => out.push(f.mul_code(a, b)),
                    SetOp::Div => {
                        if b != 0 {
                            out.push(f.mul_code(a, f.inv_code(b).unwrap()));
                        }
                    }
                }
            }
        }
        FSet::from_codes(f, out)
    }

    /// Representation histogram r_{A o B}: how many pairs produce each value.
    pub fn rep_function(&self, other: &FSet, op: SetOp) -> Result<RepHistogram> {
        self.check_pair(other, op)?;
        let f = &self.ctx;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0u64;
        // precompute inverses of the denominators once for ratio sets
        let inv: Vec<(u64, u64)> = if op == SetOp::Div {
            other
                .codes
                .iter()
                .filter(|&&b| b != 0)
                .map(|&b| (b, f.inv_code(b).unwrap()))
                .collect()
        } else {
            Vec::new()
        };
        for &a in &self.codes {
            match op {
                SetOp::Div => {
                    for &(_, binv) in &inv {
                        *counts.entry(f.mul_code(a, binv)).or_insert(0) += 1;
                        total += 1;
                    }
                }
                _ => {
                    for &b in &other.codes {
                        let v = match op {
                            SetOp::Add => f.add_code(a, b),
                            SetOp::Sub => f.sub_code(a, b),
                            SetOp::Mul => f.mul_code(a, b),
                            SetOp::Div => unreachable!(),
                        };
                        *counts.entry(v).or_insert(0) += 1;
                        total += 1;
                    }
                }
            }
        }
        Ok(RepHistogram {
            ctx: f.clone(),
            counts,
            total,
        })
    }
}

/// A map value -> positive pair count, with its total mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepHistogram {
    ctx: FieldCtx,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl RepHistogram {
    pub(crate) fn from_counts(ctx: &FieldCtx, counts: BTreeMap<u64, u64>) -> RepHistogram {
        let total = counts.values().sum();
        RepHistogram {
            ctx: ctx.clone(),
            counts,
            total,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Count for a value code (0 if absent).
    pub fn count(&self, code: u64) -> u64 {
        self.counts.get(&code).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct values attained.
    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support_set(&self) -> FSet {
        FSet {
            ctx: self.ctx.clone(),
            codes: self.counts.keys().copied().collect(),
        }
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    /// Exact k-th moment sum_v count(v)^k as a 128-bit integer.
    pub fn moment(&self, k: u32) -> u128 {
        let mut acc: u128 = 0;
        for &c in self.counts.values() {
            let mut term: u128 = 1;
            for _ in 0..k {
                term = term
                    .checked_mul(c as u128)
                    .expect("energy moment exceeds 128 bits");
            }
            acc = acc
                .checked_add(term)
                .expect("energy moment exceeds 128 bits");
        }
        acc
    }
}

/// Image set and histogram of a bivariate polynomial over A x B.
pub fn poly_image(f: &BivariateQuadratic, a: &FSet, b: &FSet) -> Result<(FSet, RepHistogram)> {
    if !f.ctx().same_ctx(a.ctx()) || !a.ctx().same_ctx(b.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in a.codes() {
        for &y in b.codes() {
            *counts.entry(f.eval_code(x, y)).or_insert(0) += 1;
        }
    }
    let hist = RepHistogram::from_counts(a.ctx(), counts);
    Ok((hist.support_set(), hist))
}

/// {f(a) : a in A}, deduplicated.
pub fn univariate_image(f: &UnivariatePoly, a: &FSet) -> FSet {
    assert!(f.ctx().same_ctx(a.ctx()), "field context mismatch");
    let codes = a.codes().iter().map(|&x| f.eval_code(x)).collect();
    FSet::from_codes(a.ctx(), codes).unwrap()
}

/// {f(a) : a in A, a not a pole of f}.
pub fn rational_image(f: &RationalFunction, a: &FSet) -> FSet {
    assert!(f.ctx().same_ctx(a.ctx()), "field context mismatch");
    let codes = a.codes().iter().filter_map(|&x| f.eval_code(x)).collect();
    FSet::from_codes(a.ctx(), codes).unwrap()
}

/// Forward orbit of a point under a univariate polynomial.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub set: FSet,
    /// True when a repeated value was seen, in which case f(set) is contained
    /// in set.
    pub closed: bool,
}

/// Iterate u, f(u), f(f(u)), ... until a repeat is seen or `cap` applications
/// of f have been made.
pub fn orbit(f: &UnivariatePoly, u: FElem, cap: u64) -> Result<Orbit> {
    if cap < 1 {
        return Err(Error::InvalidParams("orbit cap must be >= 1".into()));
    }
    let ctx = f.ctx().clone();
    assert!(ctx.owns(u), "field context mismatch");
    let mut seen = std::collections::HashSet::new();
    let mut x = u.code();
    seen.insert(x);
    let mut closed = false;
    for _ in 0..cap {
        x = f.eval_code(x);
        if !seen.insert(x) {
            closed = true;
            break;
        }
    }
    Ok(Orbit {
        set: FSet::from_codes(&ctx, seen.into_iter().collect())?,
        closed,
    })
}

/// Specification of a deterministically generated structured set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenSpec {
    /// Arithmetic progression start, start+diff, ..., length `len`.
    Ap { start: u64, diff: u64, len: u64 },
    /// Geometric progression start, start*ratio, ..., length `len`.
    Gp { start: u64, ratio: u64, len: u64 },
    /// The multiplicative subgroup of the given order (prime fields only).
    Subgroup { order: u64 },
    /// `size` distinct elements drawn from a seeded deterministic stream.
    Random { seed: u64, size: u64 },
    /// Interval {start, ..., start + len - 1}.
    Interval { start: u64, len: u64 },
    /// Union of sub-generators.
    Union(Vec<GenSpec>),
}

/// Deterministic set of the requested structure and size.
pub fn generate(ctx: &FieldCtx, spec: &GenSpec) -> Result<FSet> {
    match spec {
        GenSpec::Ap { start, diff, len } => {
            if *diff % ctx.q() == 0 {
                return Err(Error::InvalidParams(
                    "arithmetic progression difference must be nonzero".into(),
                ));
            }
            let d = ctx.elem(*diff % ctx.q())?;
            let mut codes = Vec::with_capacity(*len as usize);
            let mut x = ctx.elem(*start % ctx.q())?;
            for _ in 0..*len {
                codes.push(x.code());
                x = ctx.add(x, d);
            }
            FSet::from_codes(ctx, codes)
        }
        GenSpec::Gp { start, ratio, len } => {
            let r = *ratio % ctx.q();
            if r == 0 || r == 1 {
                return Err(Error::InvalidParams(
                    "geometric progression ratio must avoid 0 and 1".into(),
                ));
            }
            let r = ctx.elem(r)?;
            let mut codes = Vec::with_capacity(*len as usize);
            let mut x = ctx.elem(*start % ctx.q())?;
            for _ in 0..*len {
                codes.push(x.code());
                x = ctx.mul(x, r);
            }
            FSet::from_codes(ctx, codes)
        }
        GenSpec::Subgroup { order } => {
            if !ctx.is_prime_field() {
                return Err(Error::InvalidParams(
                    "subgroup generation is prime-field only".into(),
                ));
            }
            let p = ctx.p();
            if *order == 0 || !(p - 1).is_multiple_of(*order) {
                return Err(Error::InvalidParams(format!(
                    "requested order {order} does not divide p - 1 = {}",
                    p - 1
                )));
            }
            let g = smallest_primitive_root(p);
            let h = ctx.pow(ctx.scalar(g), (p - 1) / order);
            let mut codes = Vec::with_capacity(*order as usize);
            let mut x = ctx.one();
            for _ in 0..*order {
                codes.push(x.code());
                x = ctx.mul(x, h);
            }
            FSet::from_codes(ctx, codes)
        }
        GenSpec::Random { seed, size } => {
            if *size > ctx.q() {
                return Err(Error::InvalidParams(format!(
                    "requested {size} elements from a field of order {}",
                    ctx.q()
                )));
            }
            let mut rng = SplitMix::new(*seed);
            let mut codes = std::collections::BTreeSet::new();
            while (codes.len() as u64) < *size {
                codes.insert(rng.below(ctx.q()));
            }
            FSet::from_codes(ctx, codes.into_iter().collect())
        }
        GenSpec::Interval { start, len } => generate(
            ctx,
            &GenSpec::Ap {
                start: *start,
                diff: 1,
                len: *len,
            },
        ),
        GenSpec::Union(parts) => {
            if parts.is_empty() {
                return Err(Error::InvalidParams("empty union".into()));
            }
            let mut acc = FSet::empty(ctx);
            for part in parts {
                acc = acc.union(&generate(ctx, part)?)?;
            }
            Ok(acc)
        }
    }
}

/// Smallest primitive root mod p (p an odd prime).
pub fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    'candidate: for g in 2..p {
        for &f in &factors {
            if crate::fppoly::powm(g, (p - 1) / f, p) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// set files: first line `p=<prime>` (or `p=<p> q=<p>^<n> mod=<c0,c1,...>`),
// then one element code per line; `#` starts a comment.
// ---------------------------------------------------------------------------

pub fn write_set<W: Write>(mut w: W, set: &FSet) -> Result<()> {
    let ctx = set.ctx();
    if ctx.is_prime_field() {
        writeln!(w, "p={}", ctx.p())?;
    } else {
        let mods: Vec<String> = ctx.modulus().iter().map(|c| c.to_string()).collect();
        writeln!(
            w,
            "p={} q={}^{} mod={}",
            ctx.p(),
            ctx.p(),
            ctx.n(),
            mods.join(",")
        )?;
    }
    for &c in set.codes() {
        writeln!(w, "{c}")?;
    }
    Ok(())
}

pub fn write_set_file(path: &Path, set: &FSet) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_set(std::io::BufWriter::new(f), set)
}

pub fn read_set<R: BufRead>(r: R) -> Result<FSet> {
    let mut ctx: Option<FieldCtx> = None;
    let mut codes = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = match line.split_once('#') {
            Some((head, _)) => head.trim(),
            None => line.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if ctx.is_none() {
            ctx = Some(parse_header(line)?);
            continue;
        }
        let code: u64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("bad element line `{line}`")))?;
        codes.push(code);
    }
    let ctx = ctx.ok_or_else(|| Error::Parse("missing set file header".into()))?;
    FSet::from_codes(&ctx, codes)
}

pub fn read_set_file(path: &Path) -> Result<FSet> {
    let f = std::fs::File::open(path)?;
    read_set(std::io::BufReader::new(f))
}

fn parse_header(line: &str) -> Result<FieldCtx> {
    let mut p: Option<u64> = None;
    let mut n: usize = 1;
    let mut modulus: Option<Vec<u64>> = None;
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header token `{tok}`")))?;
        match k {
            "p" => {
                p = Some(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("bad prime `{v}`")))?,
                )
            }
            "q" => {
                let (_, deg) = v
                    .split_once('^')
                    .ok_or_else(|| Error::Parse(format!("bad q token `{v}`")))?;
                n = deg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad extension degree `{deg}`")))?;
            }
            "mod" => {
                let coeffs: std::result::Result<Vec<u64>, _> =
                    v.split(',').map(|c| c.parse()).collect();
                modulus =
                    Some(coeffs.map_err(|_| Error::Parse(format!("bad modulus list `{v}`")))?);
            }
            other => return Err(Error::Parse(format!("unknown header key `{other}`"))),
        }
    }
    let p = p.ok_or_else(|| Error::Parse("header missing p=<prime>".into()))?;
    if n == 1 {
        FieldCtx::prime(p)
    } else {
        let m =
            modulus.ok_or_else(|| Error::Parse("extension header missing mod=<coeffs>".into()))?;
        let ctx = FieldCtx::extension(p, &m)?;
        if ctx.n() != n {
            return Err(Error::Parse(format!(
                "modulus degree {} does not match q exponent {n}",
                ctx.n()
            )));
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    fn set(ctx: &FieldCtx, codes: &[u64]) -> FSet {
        FSet::from_codes(ctx, codes.to_vec()).unwrap()
    }

    #[test]
    fn setop_examples() {
        let f = fp(7);
        let a = set(&f, &[1, 2]);
        let b = set(&f, &[3]);
        assert_eq!(a.setop(&b, SetOp::Add).unwrap().codes(), &[4, 5]);

        let a = set(&f, &[1, 2, 4]);
        let two = set(&f, &[2]);
        assert_eq!(a.setop(&two, SetOp::Div).unwrap().codes(), &[1, 2, 4]);

        let f5 = fp(5);
        let all = FSet::full_field(&f5);
        assert_eq!(all.setop(&all, SetOp::Sub).unwrap().len(), 5);
    }

    #[test]
    fn division_conventions() {
        let f = fp(7);
        let a = set(&f, &[1, 2]);
        let zero_only = set(&f, &[0]);
        assert!(matches!(
            a.setop(&zero_only, SetOp::Div),
            Err(Error::EmptyDenominator)
        ));
        // zero inside a larger denominator set is skipped silently
        let b = set(&f, &[0, 2]);
        let h = a.rep_function(&b, SetOp::Div).unwrap();
        assert_eq!(h.total(), 2); // pairs with denominator 2 only
    }

    #[test]
    fn ctx_mismatch_is_reported() {
        let a = set(&fp(7), &[1]);
        let b = set(&fp(11), &[1]);
        assert!(matches!(a.setop(&b, SetOp::Add), Err(Error::CtxMismatch)));
    }

    #[test]
    fn rep_function_examples() {
        let f = fp(101);
        let a = set(&f, &[0, 1, 2]);
        let h = a.rep_function(&a, SetOp::Add).unwrap();
        let counts: Vec<u64> = (0..5).map(|v| h.count(v)).collect();
        assert_eq!(counts, vec![1, 2, 3, 2, 1]);
        assert_eq!(h.total(), 9);

        // singleton shift is injective
        let c = set(&f, &[42]);
        let b = set(&f, &[5, 6, 9]);
        let h = c.rep_function(&b, SetOp::Add).unwrap();
        assert!(h.iter().all(|(_, count)| count == 1));

        // full group is perfectly regular
        let f5 = fp(5);
        let all = FSet::full_field(&f5);
        let h = all.rep_function(&all, SetOp::Sub).unwrap();
        assert!((0..5).all(|v| h.count(v) == 5));
    }

    #[test]
    fn poly_image_examples() {
        let f = fp(13);
        let a = set(&f, &[1, 2, 4]);
        let xy = BivariateQuadratic::product(&f);
        let (img, hist) = poly_image(&xy, &a, &a).unwrap();
        assert_eq!(img.codes(), &[1, 2, 3, 4, 8]);
        let counts: Vec<u64> = [1u64, 2, 3, 4, 8].iter().map(|&v| hist.count(v)).collect();
        assert_eq!(counts, vec![1, 2, 1, 3, 2]);
        assert_eq!(hist.total(), 9);

        // f = x + y reproduces the additive representation function
        let plus = BivariateQuadratic::sum(&f);
        let (_, h1) = poly_image(&plus, &a, &a).unwrap();
        let h2 = a.rep_function(&a, SetOp::Add).unwrap();
        assert_eq!(h1, h2);

        // empty operand gives empty image
        let (img, hist) = poly_image(&xy, &FSet::empty(&f), &a).unwrap();
        assert!(img.is_empty());
        assert_eq!(hist.total(), 0);
    }

    #[test]
    fn univariate_image_examples() {
        let f = fp(7);
        let sq = UnivariatePoly::parse("x^2", &f).unwrap();
        let a = set(&f, &[1, 6]); // {1, -1}
        assert_eq!(univariate_image(&sq, &a).codes(), &[1]);

        let g = UnivariatePoly::parse("x^2+1", &f).unwrap();
        let a = set(&f, &[0, 1, 2, 5]);
        assert_eq!(univariate_image(&g, &a).codes(), &[1, 2, 5]);

        let id = UnivariatePoly::parse("x", &f).unwrap();
        assert_eq!(univariate_image(&id, &a), a);
    }

    #[test]
    fn orbit_examples() {
        let f = fp(7);
        let g = UnivariatePoly::parse("x^2+1", &f).unwrap();
        let o = orbit(&g, f.zero(), 100).unwrap();
        assert_eq!(o.set.codes(), &[0, 1, 2, 5]);
        assert!(o.closed);

        let id = UnivariatePoly::parse("x", &f).unwrap();
        let o = orbit(&id, f.scalar(3), 10).unwrap();
        assert_eq!(o.set.codes(), &[3]);
        assert!(o.closed);

        // cap >= p forces closure by pigeonhole
        let mut rng = crate::util::SplitMix::new(2);
        for _ in 0..10 {
            let c = rng.below(7);
            let g = UnivariatePoly::from_codes(&f, &[c, 0, 1]).unwrap();
            let o = orbit(&g, f.scalar(rng.below(7)), 7).unwrap();
            assert!(o.closed);
            // closure implies forward invariance
            let img = univariate_image(&g, &o.set);
            assert!(img.is_subset_of(&o.set));
        }
    }

    #[test]
    fn generators() {
        let f11 = fp(11);
        let ap = generate(
            &f11,
            &GenSpec::Ap {
                start: 0,
                diff: 1,
                len: 5,
            },
        )
        .unwrap();
        assert_eq!(ap.codes(), &[0, 1, 2, 3, 4]);

        let f7 = fp(7);
        let sg = generate(&f7, &GenSpec::Subgroup { order: 3 }).unwrap();
        assert_eq!(sg.codes(), &[1, 2, 4]);

        let f13 = fp(13);
        let gp = generate(
            &f13,
            &GenSpec::Gp {
                start: 1,
                ratio: 2,
                len: 3,
            },
        )
        .unwrap();
        assert_eq!(gp.codes(), &[1, 2, 4]);

        assert!(generate(
            &f13,
            &GenSpec::Ap {
                start: 0,
                diff: 0,
                len: 3
            }
        )
        .is_err());
        assert!(generate(
            &f13,
            &GenSpec::Gp {
                start: 1,
                ratio: 1,
                len: 3
            }
        )
        .is_err());
        assert!(generate(&f7, &GenSpec::Subgroup { order: 4 }).is_err());

        let r1 = generate(&f13, &GenSpec::Random { seed: 9, size: 6 }).unwrap();
        let r2 = generate(&f13, &GenSpec::Random { seed: 9, size: 6 }).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.len(), 6);

        let u = generate(
            &f13,
            &GenSpec::Union(vec![
                GenSpec::Ap {
                    start: 0,
                    diff: 1,
                    len: 3,
                },
                GenSpec::Gp {
                    start: 1,
                    ratio: 2,
                    len: 3,
                },
            ]),
        )
        .unwrap();
        assert_eq!(u.codes(), &[0, 1, 2, 4]);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(7), 3);
        assert_eq!(smallest_primitive_root(11), 2);
        assert_eq!(smallest_primitive_root(101), 2);
    }

    #[test]
    fn set_file_round_trip() {
        let f = fp(101);
        let a = generate(&f, &GenSpec::Random { seed: 4, size: 20 }).unwrap();
        let mut buf = Vec::new();
        write_set(&mut buf, &a).unwrap();
        let back = read_set(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(a, back);

        // extension field header
        let f9 = FieldCtx::extension(3, &[1, 0, 1]).unwrap();
        let s = FSet::from_codes(&f9, vec![0, 4, 7]).unwrap();
        let mut buf = Vec::new();
        write_set(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p=3 q=3^2 mod=1,0,1"));
        let back = read_set(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(s, back);

        // comments and blank lines are ignored
        let src = "# header comment\np=7\n1\n# middle\n\n3\n";
        let parsed = read_set(std::io::Cursor::new(src.as_bytes())).unwrap();
        assert_eq!(parsed.codes(), &[1, 3]);
    }

    #[test]
    fn rep_symmetry() {
        let f = fp(101);
        let a = generate(&f, &GenSpec::Random { seed: 1, size: 12 }).unwrap();
        let b = generate(&f, &GenSpec::Random { seed: 2, size: 9 }).unwrap();
        let ab = a.rep_function(&b, SetOp::Sub).unwrap();
        let ba = b.rep_function(&a, SetOp::Sub).unwrap();
        for (v, c) in ab.iter() {
            assert_eq!(c, ba.count(f.neg_code(v)));
        }
        assert_eq!(ab.total(), (a.len() * b.len()) as u64);
    }
}

//! Brute-force oracles and the inequality battery: every named bound is
//! evaluated on concrete instances into `BoundReport`s. Constant-free
//! statements are hard assertions (a failure aborts the battery: it is an
//! implementation bug); constant-bearing statements are reports that never
//! abort.

use std::collections::BTreeMap;

use crate::decompose::{
    balog_wooley_decompose, large_set_subsets, measure_mixed_energy_bound, mixed_energy_subsets,
    LargeSetMode,
};
use crate::energy::{
    additive_energy_k, check_cauchy_schwarz, check_subadditivity, mult_energy_k, six_tuple_count,
};
use crate::error::{Error, Result};
use crate::expsum::{check_holder4, check_holder8, check_konyagin_shkredov, check_vinogradov};
use crate::field::FieldCtx;
use crate::poly::{BivariateQuadratic, RationalFunction};
use crate::regularize::popular_subset;
use crate::report::{BoundReport, DigestBuilder, Value};
use crate::sets::{generate, poly_image, rational_image, FSet, GenSpec, SetOp};
use crate::util::SplitMix;

/// Points and lines over F_q^2; lines ax + by = c are deduplicated up to
/// scalar by normalizing the first nonzero coefficient of (a, b) to 1.
#[derive(Clone, Debug)]
pub struct PointLineConfig {
    ctx: FieldCtx,
    points: Vec<(u64, u64)>,
    lines: Vec<(u64, u64, u64)>,
}

/// Pair budget for direct incidence counting.
pub const INCIDENCE_PAIR_BUDGET: u128 = 100_000_000;

impl PointLineConfig {
    pub fn new(
        ctx: &FieldCtx,
        mut points: Vec<(u64, u64)>,
        lines: Vec<(u64, u64, u64)>,
    ) -> Result<PointLineConfig> {
        for &(x, y) in &points {
            if x >= ctx.q() || y >= ctx.q() {
                return Err(Error::InvalidParams("point coordinate out of range".into()));
            }
        }
        points.sort_unstable();
        points.dedup();
        let mut normalized = Vec::with_capacity(lines.len());
        for &(a, b, c) in &lines {
            if a >= ctx.q() || b >= ctx.q() || c >= ctx.q() {
                return Err(Error::InvalidParams("line coefficient out of range".into()));
            }
            if a == 0 && b == 0 {
                return Err(Error::InvalidParams("line needs (a, b) != (0, 0)".into()));
            }
            let scale = if a != 0 { a } else { b };
            let inv = ctx.inv_code(scale).expect("nonzero leading coefficient");
            normalized.push((
                ctx.mul_code(a, inv),
                ctx.mul_code(b, inv),
                ctx.mul_code(c, inv),
            ));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(PointLineConfig {
            ctx: ctx.clone(),
            points,
            lines: normalized,
        })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Exact incidence count by direct substitution.
    pub fn count_incidences(&self) -> Result<u64> {
        let pairs = self.points.len() as u128 * self.lines.len() as u128;
        if pairs > INCIDENCE_PAIR_BUDGET {
            return Err(Error::TooLarge(format!(
                "{pairs} point-line pairs exceed the budget {INCIDENCE_PAIR_BUDGET}"
            )));
        }
        let f = &self.ctx;
        let mut count = 0u64;
        for &(a, b, c) in &self.lines {
            for &(x, y) in &self.points {
                let lhs = f.add_code(f.mul_code(a, x), f.mul_code(b, y));
                if lhs == c {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Independent reference counter: enumerate the q points of every line
    /// (solving for y, or sweeping x = c when vertical) and probe a point
    /// hash set. Used as a second oracle in tests and the battery.
    pub fn count_incidences_by_enumeration(&self) -> u64 {
        let f = &self.ctx;
        let point_set: std::collections::HashSet<(u64, u64)> =
            self.points.iter().copied().collect();
        let mut count = 0u64;
        for &(a, b, c) in &self.lines {
            if b == 0 {
                // ax = c with a = 1 after normalization
                let x = c;
                for y in 0..f.q() {
                    if point_set.contains(&(x, y)) {
                        count += 1;
                    }
                }
            } else {
                let binv = f.inv_code(b).unwrap();
                for x in 0..f.q() {
                    let y = f.mul_code(f.sub_code(c, f.mul_code(a, x)), binv);
                    if point_set.contains(&(x, y)) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// | |I| - |P||L|/q | <= sqrt(q |P| |L|); constant-free.
    pub fn check_vinh(&self) -> Result<BoundReport> {
        let incidences = self.count_incidences()? as f64;
        let q = self.ctx.q() as f64;
        let pl = self.points.len() as f64 * self.lines.len() as f64;
        let lhs = (incidences - pl / q).abs();
        let rhs = (q * pl).sqrt();
        let mut digest = DigestBuilder::new("vinh").num(self.ctx.q());
        for &(x, y) in &self.points {
            digest = digest.num(x).num(y);
        }
        for &(a, b, c) in &self.lines {
            digest = digest.num(a).num(b).num(c);
        }
        Ok(BoundReport::exact(
            "vinh".to_string(),
            Value::Float(lhs),
            Value::Float(rhs),
            1.0,
            digest.finish(),
        ))
    }
}

/// Suites accepted by the battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Constant-free theorems; any failure aborts with an error.
    ConstantFree,
    /// Constant-bearing statements; reports never abort.
    Reports,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Suite> {
        match name {
            "constant-free" => Ok(Suite::ConstantFree),
            "reports" => Ok(Suite::Reports),
            "all" => Ok(Suite::All),
            other => Err(Error::UnknownCheckName(other.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatteryConfig {
    pub suite: Suite,
    pub seed: u64,
    pub instances: u32,
    /// Multiplicative constant for the constant-bearing reports.
    pub constant: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            suite: Suite::All,
            seed: 1,
            instances: 50,
            constant: 64.0,
        }
    }
}

/// A hard-assert check failed; carries the offending report.
#[derive(Debug)]
pub struct BatteryFailure {
    pub report: BoundReport,
}

impl std::fmt::Display for BatteryFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "constant-free check `{}` failed: lhs = {}, rhs = {} (digest {})",
            self.report.name, self.report.lhs, self.report.rhs, self.report.inputs_digest
        )
    }
}

impl std::error::Error for BatteryFailure {}

const BATTERY_PRIMES: [u64; 4] = [101, 157, 193, 257];

fn random_set(ctx: &FieldCtx, rng: &mut SplitMix, max_size: u64) -> FSet {
    let size = 1 + rng.below(max_size);
    generate(
        ctx,
        &GenSpec::Random {
            seed: rng.next_u64(),
            size,
        },
    )
    .unwrap()
}

fn structured_set(ctx: &FieldCtx, rng: &mut SplitMix, len: u64) -> FSet {
    match rng.below(4) {
        0 => generate(
            ctx,
            &GenSpec::Ap {
                start: rng.below(ctx.p()),
                diff: 1 + rng.below(ctx.p() - 1),
                len,
            },
        )
        .unwrap(),
        1 => generate(
            ctx,
            &GenSpec::Gp {
                start: 1 + rng.below(ctx.p() - 1),
                ratio: 2 + rng.below(ctx.p() - 2),
                len,
            },
        )
        .unwrap(),
        2 => generate(
            ctx,
            &GenSpec::Random {
                seed: rng.next_u64(),
                size: len,
            },
        )
        .unwrap(),
        _ => generate(
            ctx,
            &GenSpec::Union(vec![
                GenSpec::Ap {
                    start: 0,
                    diff: 1,
                    len: len / 2,
                },
                GenSpec::Gp {
                    start: 1,
                    ratio: 3,
                    len: len - len / 2,
                },
            ]),
        )
        .unwrap(),
    }
}

/// Run one constant-free pass on a seeded instance; every produced report
/// must pass.
fn constant_free_instance(rng: &mut SplitMix, out: &mut Vec<BoundReport>) -> Result<()> {
    let p = BATTERY_PRIMES[rng.below(BATTERY_PRIMES.len() as u64) as usize];
    let ctx = FieldCtx::prime(p)?;
    let a = random_set(&ctx, rng, 64);
    let b = random_set(&ctx, rng, 64);

    out.push(check_cauchy_schwarz(&a, &b, SetOp::Add)?);
    out.push(check_cauchy_schwarz(&a, &b, SetOp::Sub)?);

    let f = BivariateQuadratic::parse("x^2+y", &ctx)?;
    let parts: Vec<FSet> = (0..2 + rng.below(2))
        .map(|_| random_set(&ctx, rng, 32))
        .collect();
    out.push(check_subadditivity(&f, &parts)?);

    out.push(check_vinogradov(&a, &b)?);
    out.push(check_holder4(&a, &b)?);
    out.push(check_holder8(&a, &b)?);

    // X1 random subset of X
    let x = random_set(&ctx, rng, 48);
    let x1_codes: Vec<u64> = x
        .codes()
        .iter()
        .copied()
        .filter(|_| rng.below(2) == 0)
        .collect();
    let x1 = if x1_codes.is_empty() {
        x.clone()
    } else {
        FSet::from_codes(&ctx, x1_codes)?
    };
    out.push(check_konyagin_shkredov(&x1, &x)?);

    // random point-line configuration
    let n_pts = 1 + rng.below(40);
    let n_lines = 1 + rng.below(40);
    let points: Vec<(u64, u64)> = (0..n_pts).map(|_| (rng.below(p), rng.below(p))).collect();
    let lines: Vec<(u64, u64, u64)> = (0..n_lines)
        .map(|_| loop {
            let a = rng.below(p);
            let b = rng.below(p);
            if a != 0 || b != 0 {
                return (a, b, rng.below(p));
            }
        })
        .collect();
    let cfg = PointLineConfig::new(&ctx, points, lines)?;
    debug_assert_eq!(
        cfg.count_incidences()?,
        cfg.count_incidences_by_enumeration(),
        "incidence oracles disagree"
    );
    out.push(cfg.check_vinh()?);
    Ok(())
}

/// One pass of the constant-bearing report checks on structured instances.
fn report_instance(rng: &mut SplitMix, constant: f64, out: &mut Vec<BoundReport>) -> Result<()> {
    let ctx = FieldCtx::prime(1009)?;
    let len = 24 + rng.below(40);
    let a = structured_set(&ctx, rng, len);
    let b = structured_set(&ctx, rng, len);
    let f = BivariateQuadratic::parse("x^2+y", &ctx)?;

    out.push(check_six_tuple(rng, constant)?);
    out.push(check_popular_sum_mult_energy(&ctx, rng, constant)?);
    out.push(check_popular_sum_image_energy(&ctx, rng, constant)?);
    out.push(check_fourth_moment(&a, &b, &f, constant)?);
    out.push(check_expander(&a, &f)?);

    // mixed-energy extraction measurement on the structured pair
    let decomposition_source = structured_set(&ctx, rng, 48.max(len));
    if decomposition_source.len() >= 2 {
        let ex = popular_subset(&decomposition_source)?;
        out.push(measure_mixed_energy_bound(
            &ex,
            &decomposition_source,
            &b,
            &decomposition_source.union(&b)?,
            &f,
            constant,
        )?);
    }
    Ok(())
}

/// Six-tuple bound of the three-variable quadratic shift form, reported with
/// an explicit constant. Runs at p = 53 where the triple histogram stays at
/// hand scale.
fn check_six_tuple(rng: &mut SplitMix, constant: f64) -> Result<BoundReport> {
    let small = FieldCtx::prime(53)?;
    let f_small = BivariateQuadratic::parse("x^2+y", &small)?;
    let mk = |rng: &mut SplitMix| -> Result<FSet> {
        let size = 2 + rng.below(7);
        let codes: Vec<u64> = (0..size).map(|_| 1 + rng.below(52)).collect();
        FSet::from_codes(&small, codes)
    };
    let u = mk(rng)?;
    let v = mk(rng)?;
    let w = mk(rng)?;
    let f3 = |x: u64, y: u64, z: u64| f_small.eval_code(small.add_code(x, y), z);
    let count = six_tuple_count(&small, f3, &u, &v, &w)?.value;
    let prod = (u.len() * v.len() * w.len()) as f64;
    let pairs = [
        (u.len() * v.len()) as f64,
        (u.len() * w.len()) as f64,
        (v.len() * w.len()) as f64,
    ];
    let max_pair = pairs.iter().fold(0.0f64, |m, &x| m.max(x));
    let rhs = prod.powf(1.5) + max_pair * max_pair;
    let digest = DigestBuilder::new("six_tuple")
        .set(&u)
        .set(&v)
        .set(&w)
        .finish();
    Ok(BoundReport::new(
        "six_tuple_quadratic",
        Value::Exact(count),
        Value::Float(rhs),
        constant,
        BTreeMap::from([(
            "p_constraint".to_string(),
            prod <= (small.p() * small.p()) as f64,
        )]),
        digest,
    ))
}

/// Popular-sum hypothesis: A = {a : r_{Q+R}(a) >= T}; then
/// Ex(A, B) <= const (|A||B|^2|Q||R| / (T q) + q |Q||R||B| log2|A| / T^2).
fn check_popular_sum_mult_energy(
    ctx: &FieldCtx,
    rng: &mut SplitMix,
    constant: f64,
) -> Result<BoundReport> {
    let q_set = random_set(ctx, rng, 40);
    let r_set = random_set(ctx, rng, 40);
    let b = random_set(ctx, rng, 40);
    let hist = q_set.rep_function(&r_set, SetOp::Add)?;
    let t_level = 1 + rng.below(hist.max_count().max(1));
    let a_codes: Vec<u64> = hist
        .iter()
        .filter(|&(v, c)| c >= t_level && v != 0)
        .map(|(v, _)| v)
        .collect();
    let a = if a_codes.is_empty() {
        // fall back to T = 1: every nonzero sum qualifies
        FSet::from_codes(
            ctx,
            hist.iter().map(|(v, _)| v).filter(|&v| v != 0).collect(),
        )?
    } else {
        FSet::from_codes(ctx, a_codes)?
    };
    let t_used = a
        .codes()
        .iter()
        .map(|&v| hist.count(v))
        .min()
        .unwrap_or(1)
        .max(1);
    let b_nz = FSet::from_codes(ctx, b.codes().iter().copied().filter(|&v| v != 0).collect())?;
    let e = if a.is_empty() || b_nz.is_empty() {
        0
    } else {
        mult_energy_k(&a, &b_nz, 2)?.value
    };
    let qf = ctx.q() as f64;
    let lg = (a.len().max(2) as f64).log2();
    let rhs =
        a.len() as f64 * (b_nz.len() as f64).powi(2) * q_set.len() as f64 * r_set.len() as f64
            / (t_used as f64 * qf)
            + qf * q_set.len() as f64 * r_set.len() as f64 * b_nz.len() as f64 * lg
                / (t_used as f64 * t_used as f64);
    let digest = DigestBuilder::new("popular_sum_mult")
        .set(&q_set)
        .set(&r_set)
        .set(&b_nz)
        .num(t_used)
        .finish();
    Ok(BoundReport::new(
        "popular_sum_mult_energy",
        Value::Exact(e),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("popularity_floor".to_string(), t_used >= 1)]),
        digest,
    ))
}

/// Same shape with the image energy E(f(A), B) for a rational f with a
/// degree certificate.
fn check_popular_sum_image_energy(
    ctx: &FieldCtx,
    rng: &mut SplitMix,
    constant: f64,
) -> Result<BoundReport> {
    let q_set = random_set(ctx, rng, 40);
    let r_set = random_set(ctx, rng, 40);
    let b = random_set(ctx, rng, 40);
    let f = RationalFunction::parse("x^2+x", ctx)?;
    let hist = q_set.rep_function(&r_set, SetOp::Add)?;
    let a = FSet::from_codes(
        ctx,
        hist.iter().map(|(v, _)| v).filter(|&v| v != 0).collect(),
    )?;
    let t_used = a
        .codes()
        .iter()
        .map(|&v| hist.count(v))
        .min()
        .unwrap_or(1)
        .max(1);
    let image = rational_image(&f, &a);
    let e = if image.is_empty() || b.is_empty() {
        0
    } else {
        additive_energy_k(&image, &b, 2)?.value
    };
    let qf = ctx.q() as f64;
    let lg = (a.len().max(2) as f64).log2();
    let rhs = a.len() as f64 * (b.len() as f64).powi(2) * q_set.len() as f64 * r_set.len() as f64
        / (t_used as f64 * qf)
        + qf * q_set.len() as f64 * r_set.len() as f64 * b.len() as f64 * lg
            / (t_used as f64 * t_used as f64);
    let digest = DigestBuilder::new("popular_sum_image")
        .set(&q_set)
        .set(&r_set)
        .set(&b)
        .num(t_used)
        .finish();
    Ok(BoundReport::new(
        "popular_sum_image_energy",
        Value::Exact(e),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("popularity_floor".to_string(), t_used >= 1)]),
        digest,
    ))
}

/// Fourth-moment bound: E_4(A, B) <= const |f(A,A)|^2 |B|^3 / |A| under the
/// hypothesis |A||B||A-B| <= p^2.
fn check_fourth_moment(
    a: &FSet,
    b: &FSet,
    f: &BivariateQuadratic,
    constant: f64,
) -> Result<BoundReport> {
    let e4 = additive_energy_k(a, b, 4)?.value;
    let (image, _) = poly_image(f, a, a)?;
    let rhs = (image.len() as f64).powi(2) * (b.len() as f64).powi(3) / a.len() as f64;
    let p = a.ctx().p() as f64;
    let diff = a.setop(b, SetOp::Sub)?;
    let hyp = (a.len() as f64) * (b.len() as f64) * (diff.len() as f64) <= p * p;
    let digest = DigestBuilder::new("fourth_moment").set(a).set(b).finish();
    Ok(BoundReport::new(
        "fourth_moment_energy",
        Value::Exact(e4),
        Value::Float(rhs),
        constant,
        BTreeMap::from([("p_constraint".to_string(), hyp)]),
        digest,
    ))
}

/// Expander report: measured exponent of max(|A-A|, |f(A,A)|) in |A|,
/// compared against 28/23. Report only; pass means the measured exponent
/// clears the reference value.
pub fn check_expander(a: &FSet, f: &BivariateQuadratic) -> Result<BoundReport> {
    let diff = a.setop(a, SetOp::Sub)?;
    let (image, _) = poly_image(f, a, a)?;
    let grown = diff.len().max(image.len()) as f64;
    let measured = grown.ln() / (a.len() as f64).ln();
    let p = a.ctx().p() as f64;
    let hyp = (a.len() as f64) <= p.powf(23.0 / 52.0);
    let digest = DigestBuilder::new("expander")
        .set(a)
        .text(&f.to_string())
        .finish();
    Ok(BoundReport::new(
        "expander_exponent",
        Value::Float(28.0 / 23.0),
        Value::Float(measured),
        1.0,
        BTreeMap::from([("p_constraint".to_string(), hyp)]),
        digest,
    ))
}

/// Theorem-style product reports on a full-field-scale example.
fn large_set_reports(rng: &mut SplitMix, constant: f64, out: &mut Vec<BoundReport>) -> Result<()> {
    let ctx = FieldCtx::prime(1009)?;
    let size = (ctx.q() as f64).sqrt() as u64 + 1 + rng.below(64);
    let a = generate(
        &ctx,
        &GenSpec::Random {
            seed: rng.next_u64(),
            size,
        },
    )?;
    let (_, report) = large_set_subsets(&a, LargeSetMode::Multiplicative, None, constant)?;
    out.push(report);
    let rf = RationalFunction::parse("x^2", &ctx)?;
    let (_, report) = large_set_subsets(&a, LargeSetMode::Image, Some(&rf), constant)?;
    out.push(report);
    let f = BivariateQuadratic::parse("x^2+y", &ctx)?;
    let v = generate(
        &ctx,
        &GenSpec::Random {
            seed: rng.next_u64(),
            size,
        },
    )?;
    let (_, reports) = mixed_energy_subsets(&a, &v, &a, &f, constant)?;
    out.extend(reports);

    // a small decomposition smoke: the partition is exact by construction
    let small = generate(&ctx, &GenSpec::Interval { start: 0, len: 48 })?;
    let d = balog_wooley_decompose(&small, &f, None)?;
    let digest = DigestBuilder::new("decomposition").set(&small).finish();
    out.push(BoundReport::new(
        "decomposition_post_condition",
        Value::Exact(d.final_s_energy),
        Value::Float(d.threshold),
        1.0,
        BTreeMap::from([("p_constraint".to_string(), d.p_constraint_ok)]),
        digest,
    ));
    Ok(())
}

/// Run the battery. Constant-free failures abort with `BatteryFailure`;
/// report-tier checks never abort.
pub fn run_battery(
    cfg: &BatteryConfig,
) -> std::result::Result<Vec<BoundReport>, Box<dyn std::error::Error>> {
    let mut rng = SplitMix::new(cfg.seed);
    let mut reports = Vec::new();
    if cfg.suite == Suite::ConstantFree || cfg.suite == Suite::All {
        for _ in 0..cfg.instances {
            let mut batch = Vec::new();
            constant_free_instance(&mut rng, &mut batch)?;
            for report in batch {
                if !report.pass {
                    return Err(Box::new(BatteryFailure { report }));
                }
                reports.push(report);
            }
        }
    }
    if cfg.suite == Suite::Reports || cfg.suite == Suite::All {
        let passes = (cfg.instances / 10).max(1);
        for _ in 0..passes {
            report_instance(&mut rng, cfg.constant, &mut reports)?;
        }
        large_set_reports(&mut rng, cfg.constant, &mut reports)?;
    }
    Ok(reports)
}

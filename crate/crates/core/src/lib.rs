//! Additive combinatorics over finite fields, computationally.
//!
//! The crate computes the exact objects of sum-product theory on concrete
//! sets (representation functions, additive/multiplicative/polynomial
//! energies, exponential sums) and runs the constructive procedures built
//! on them:
//!
//! * dyadic pigeonholing and popular-subset extraction ([`regularize`][mod@regularize]),
//! * the iterative low-energy decomposition A = S ⊔ T ([`decompose`]),
//! * energy-bounded subsets of forward-invariant sets and Littlewood-type
//!   l1 norms ([`expsum`]),
//! * a verification battery that evaluates every supported inequality on
//!   seeded corpora into line-oriented JSON reports ([`verify`]).
//!
//! Counts are exact integers end to end (128-bit where products demand it);
//! floating point appears only inside inequality comparisons, with pinned
//! slacks. All randomness is seeded and all orderings canonical, so every
//! run is reproducible bit for bit.

pub mod decompose;
pub mod energy;
pub mod error;
pub mod expsum;
pub mod field;
mod fppoly;
pub mod ntt;
pub mod poly;
pub mod regularize;
pub mod report;
pub mod sets;
pub mod util;
pub mod verify;

pub use decompose::{
    balog_wooley_decompose, extract_low_ef_subset, large_set_subsets, measure_mixed_energy_bound,
    mixed_energy_subsets, Decomposition, LargeSetMode, SubsetPair,
};
pub use energy::{
    additive_energy, additive_energy_k, additive_energy_pair, check_cauchy_schwarz,
    check_first_moment, check_subadditivity, fast_additive_energy, mult_energy, mult_energy_k,
    poly_energy, poly_energy_pair, six_tuple_count, EnergyMethod, EnergyValue,
};
pub use error::{Error, Result};
pub use expsum::{
    check_holder4, check_holder8, check_konyagin_shkredov, check_vinogradov,
    composed_invariant_double_sum, double_sum, invariant_low_energy_subset, littlewood_l1,
    ExpSumValue, InvariantMap, InvariantRegime,
};
pub use field::{FElem, FieldCtx};
pub use poly::{
    rational_nondeg_sufficient, BivariateQuadratic, NondegVerdict, RationalFunction, UnivariatePoly,
};
pub use regularize::{
    dyadic_energy_class, popular_subset, regularize, regularize2, DyadicClass, PopularSubset,
    RegularTriple,
};
pub use report::{BoundReport, Value};
pub use sets::{
    generate, orbit, poly_image, rational_image, read_set_file, univariate_image, write_set_file,
    FSet, GenSpec, Orbit, RepHistogram, SetOp,
};
pub use verify::{run_battery, BatteryConfig, BatteryFailure, PointLineConfig, Suite};

//! Course allocation with credit limits.
//!
//! Students have strict preferences over courses, a credit limit, and
//! optional feasibility rules on which course combinations they may hold;
//! courses have strict preferences over students, per-course credit values,
//! and upper (and optionally lower) quotas. A matching assigns students to
//! sets of courses, and this crate provides:
//!
//! - [`model`]: the instance and matching types, validation, and the credit
//!   size of a matching;
//! - [`verify`]: deciders for four blocking notions — pair, pair-with-size,
//!   coalition, and first-coalition — each returning a replayable witness;
//! - [`solve`]: a proposal algorithm producing pair-with-size stable
//!   matchings, a serial dictatorship for master-list instances, and
//!   search-based maximizers (including lower-quota handling);
//! - [`oracle`]: brute-force enumeration used to cross-check everything else
//!   on small instances;
//! - [`reductions`]: generators that encode subset-sum, stable-assignment,
//!   stable-marriage, and maximal-matching problems as course-allocation
//!   instances, plus random instances and the small worked examples used
//!   throughout the tests.

pub mod model;
pub mod oracle;
pub mod reductions;
pub mod solve;
pub mod verify;

pub use model::{
    check_matching, is_feasible_set, matching_size, validate_instance, BlockingWitness, Course,
    CourseId, Credits, FeasibilityRule, Instance, Matching, MatchingSize, MatchingViolation,
    ModelError, RuleKind, RuleOwner, StabilityNotion, Student, StudentId, Violation,
};
pub use oracle::{
    blocking_witness_bruteforce, enumerate_matchings, max_stable_brute, meets_all_lower_quotas,
    EnumerationReport, OracleError,
};
pub use reductions::{
    enumerate_maximal_matchings, exactmm_forward_matching, fixtures, gadget_subset_sum, gen_random,
    minmm_forward_matching, reduce_exactmm, reduce_hrs, reduce_minmm_fc, reduce_smti_coalition,
    smti_fc_distinct_credits, ExactMmMode, Fixture, GenParams, GraphInput, HrsHospital, HrsInput,
    HrsMode, HrsResident, ReductionError, SmtiInput, SmtiMan, SmtiWoman, SubsetSumInput,
};
pub use solve::{
    lq_cl_max, lq_nc_find_ml_pair, max_stable_search, round_schedule, solve_master_list,
    solve_pair_size_da, LqMode, RoundSchedule, SolveError,
};
pub use verify::{
    admits, blocks, check_witness, find_coalition_blocking, find_first_coalition_blocking,
    find_pair_blocking, find_size_blocking, verify, verify_with_mode, witness_report,
    ConditionReport, Verdict, VerifyError, VerifyMode, EXHAUSTIVE_CAP,
};

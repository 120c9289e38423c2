//! Stability verification for matchings under the four notions.
//!
//! Each notion asks: is there a student who could deviate — grab one or more
//! new courses, dropping some of her current ones — so that three conditions
//! hold?
//!
//! 1. Every grabbed course admits her: it is undersubscribed or prefers her
//!    to one of its assigned students.
//! 2. The preference and credit arithmetic works out. All notions require
//!    her new credit total to stay within her limit. The pair notions require
//!    her to prefer the grabbed course to everything dropped; coalitions
//!    require every grabbed course to beat every dropped one; first-coalitions
//!    compare only her favourite grabbed course against her favourite dropped
//!    course. The size-aware notions (everything except plain pair blocking)
//!    additionally forbid a net credit loss.
//! 3. The resulting course set satisfies her feasibility rules.
//!
//! Pair blocking is decided in `O(Lm)` time by a drop-maximal argument: for a
//! candidate course it is always safe to drop *every* assigned course ranked
//! below it, since dropping more only frees credits and — rules being
//! downward-feasible — can never break feasibility.
//!
//! The other three notions embed subset-sum questions, so their fast finders
//! run a pseudo-polynomial reachability DP over credit sums ([`VerifyMode::Dp`],
//! sound only without feasibility rules, whose effect is not a function of
//! credit sums). [`VerifyMode::Exhaustive`] enumerates (coalition, drop set)
//! pairs directly, honours rules, and fails loudly past a fixed combination
//! cap per student rather than ever returning a silently wrong answer.
//!
//! When several witnesses exist, finders return a deterministic one: the
//! student with the lowest index, then the coalition that is
//! lexicographically smallest as a sequence of her preference ranks. The two
//! modes always agree on the verdict and on that coalition; the reported drop
//! set may differ between them (both replay correctly).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    check_matching, is_feasible_set, BlockingWitness, CourseId, Credits, Instance, Matching,
    MatchingViolation, ModelError, StabilityNotion, StudentId,
};

/// How the subset-sum style finders search for a witness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VerifyMode {
    /// Credit-sum reachability DP; requires an instance without rules.
    Dp,
    /// Direct enumeration of (coalition, drop set) pairs; handles rules,
    /// capped at [`EXHAUSTIVE_CAP`] evaluated pairs per student.
    Exhaustive,
}

/// Hard cap on (coalition, drop set) combinations the exhaustive mode will
/// evaluate per student before giving up with an error.
pub const EXHAUSTIVE_CAP: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum VerifyError {
    #[error("matching is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMatching(Vec<MatchingViolation>),
    #[error("dp mode is unsound with feasibility rules present; use exhaustive mode")]
    DpWithRules,
    #[error("exhaustive search for {student} exceeded the cap of {cap} (coalition, drop set) combinations")]
    CapExceeded { student: StudentId, cap: u64 },
    #[error("pair ({student}, {course}) is already in the matching")]
    PairInMatching {
        student: StudentId,
        course: CourseId,
    },
    #[error("pair ({student}, {course}) is not mutually acceptable")]
    Unacceptable {
        student: StudentId,
        course: CourseId,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Outcome of a stability check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Stable,
    Unstable(BlockingWitness),
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }

    pub fn witness(&self) -> Option<&BlockingWitness> {
        match self {
            Verdict::Stable => None,
            Verdict::Unstable(w) => Some(w),
        }
    }
}

/// Whether course `c` would admit student `s` given matching `m`: true iff
/// `c` is undersubscribed or prefers `s` to one of its assigned students.
/// The pair must be mutually acceptable and not already matched.
pub fn admits(
    inst: &Instance,
    m: &Matching,
    c: CourseId,
    s: StudentId,
) -> Result<bool, VerifyError> {
    inst.student(s)?;
    inst.course(c)?;
    if !inst.acceptable(s, c) {
        return Err(VerifyError::Unacceptable {
            student: s,
            course: c,
        });
    }
    if m.contains(s, c) {
        return Err(VerifyError::PairInMatching {
            student: s,
            course: c,
        });
    }
    Ok(admits_inner(inst, m, c, s))
}

/// `admits` without the defensive checks, for use inside the finders where
/// the preconditions hold by construction.
fn admits_inner(inst: &Instance, m: &Matching, c: CourseId, s: StudentId) -> bool {
    let course = &inst.courses[c.0];
    let assigned: Vec<StudentId> = m.students_of(c).collect();
    if assigned.len() < course.upper_quota as usize {
        return true;
    }
    let my_rank = match inst.course_rank_of(c, s) {
        Some(r) => r,
        None => return false,
    };
    assigned
        .iter()
        .filter_map(|&sk| inst.course_rank_of(c, sk))
        .max()
        .is_some_and(|worst| my_rank < worst)
}

/// Per-student context shared by all finders: the student's assigned courses
/// and her admitting candidates, each ordered by her preference rank.
struct StudentCtx {
    s: StudentId,
    limit: Credits,
    assigned_credits: Credits,
    /// Matched courses as (preference rank, course), best first.
    assigned: Vec<(usize, CourseId)>,
    assigned_set: BTreeSet<CourseId>,
    /// Unmatched, mutually acceptable, admitting courses as (rank, course).
    candidates: Vec<(usize, CourseId)>,
}

impl StudentCtx {
    fn build(inst: &Instance, m: &Matching, s: StudentId) -> StudentCtx {
        let student = &inst.students[s.0];
        let mut assigned = Vec::new();
        let mut candidates = Vec::new();
        for (rank, &c) in student.prefs.iter().enumerate() {
            if m.contains(s, c) {
                assigned.push((rank, c));
            } else if inst.course_rank_of(c, s).is_some() && admits_inner(inst, m, c, s) {
                candidates.push((rank, c));
            }
        }
        let assigned_set = assigned.iter().map(|&(_, c)| c).collect();
        let assigned_credits = assigned
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .sum();
        StudentCtx {
            s,
            limit: student.credit_limit,
            assigned_credits,
            assigned,
            assigned_set,
            candidates,
        }
    }

    fn slack(&self) -> Credits {
        self.limit - self.assigned_credits
    }

    /// The course set a deviation would leave the student with.
    fn resulting_set(&self, coalition: &[CourseId], drop: &[CourseId]) -> BTreeSet<CourseId> {
        let mut set = self.assigned_set.clone();
        for c in drop {
            set.remove(c);
        }
        set.extend(coalition.iter().copied());
        set
    }
}

fn validated(inst: &Instance, m: &Matching) -> Result<(), VerifyError> {
    let viols = check_matching(inst, m);
    if viols.is_empty() {
        Ok(())
    } else {
        Err(VerifyError::InvalidMatching(viols))
    }
}

/// Reachable subset sums of `weights`, capped at `cap`: `out[v]` is true iff
/// some subset sums to exactly `v ≤ cap`. Sums beyond the cap are discarded,
/// which is sound because weights are positive.
fn subset_sums(weights: &[Credits], cap: Credits) -> Vec<bool> {
    let cap = cap as usize;
    let mut reach = vec![false; cap + 1];
    reach[0] = true;
    for &w in weights {
        let w = w as usize;
        if w > cap {
            continue;
        }
        for v in (w..=cap).rev() {
            if reach[v - w] {
                reach[v] = true;
            }
        }
    }
    reach
}

/// Suffix-reachability table: `table[i][v]` is true iff some subset of
/// `weights[i..]` sums to exactly `v ≤ cap`. Used to reconstruct
/// lexicographically smallest witnesses by greedy include-first scans.
fn suffix_sums(weights: &[Credits], cap: Credits) -> Vec<Vec<bool>> {
    let cap = cap as usize;
    let mut table = vec![vec![false; cap + 1]; weights.len() + 1];
    table[weights.len()][0] = true;
    for i in (0..weights.len()).rev() {
        let w = weights[i] as usize;
        for v in 0..=cap {
            table[i][v] = table[i + 1][v] || (v >= w && table[i + 1][v - w]);
        }
    }
    table
}

/// The lexicographically smallest (by position sequence) subset of `items`
/// summing to exactly `target`, assuming one exists. Greedy include-first:
/// taking the earliest item that still leaves the remainder reachable yields
/// the smallest sequence.
fn lex_smallest_subset(
    items: &[(usize, CourseId)],
    weights: &[Credits],
    target: Credits,
) -> Vec<CourseId> {
    let suffix = suffix_sums(weights, target);
    let mut remaining = target as usize;
    let mut out = Vec::new();
    for (i, &(_, c)) in items.iter().enumerate() {
        let w = weights[i] as usize;
        if w <= remaining && suffix[i + 1][remaining - w] {
            out.push(c);
            remaining -= w;
        }
    }
    debug_assert_eq!(remaining, 0);
    out
}

/// Finds a pair-blocking witness, or `None` if the matching is pair-stable.
///
/// Runs in `O(Lm)` time over the acceptable pairs via the drop-maximal rule:
/// for each candidate course the drop set is fixed to every assigned course
/// the student likes less, which is optimal both for credits and — by
/// downward-feasibility — for the rules. The reported witness carries that
/// maximal drop set.
pub fn find_pair_blocking(
    inst: &Instance,
    m: &Matching,
) -> Result<Option<BlockingWitness>, VerifyError> {
    validated(inst, m)?;
    for student in &inst.students {
        let ctx = StudentCtx::build(inst, m, student.id);
        for &(rank, cj) in &ctx.candidates {
            let drop: Vec<CourseId> = ctx
                .assigned
                .iter()
                .filter(|&&(r, _)| r > rank)
                .map(|&(_, c)| c)
                .collect();
            let dropped: Credits = inst.credits_of(drop.iter());
            let new_credits = ctx.assigned_credits - dropped + inst.courses[cj.0].credits;
            if new_credits > ctx.limit {
                continue;
            }
            let result = ctx.resulting_set(&[cj], &drop);
            if !is_feasible_set(inst, ctx.s, &result)? {
                continue;
            }
            return Ok(Some(BlockingWitness {
                student: ctx.s,
                coalition: vec![cj],
                drop_set: drop,
                notion: StabilityNotion::Pair,
            }));
        }
    }
    Ok(None)
}

/// The legal drop totals for a candidate course: `O(D)` must lie in
/// `[assigned + O(c) − T, O(c)]`. The lower end keeps the student inside her
/// credit limit, the upper end forbids a net credit loss.
fn size_window(ctx: &StudentCtx, course_credits: Credits) -> Option<(Credits, Credits)> {
    let lo = (ctx.assigned_credits + course_credits).saturating_sub(ctx.limit);
    let hi = course_credits;
    (lo <= hi).then_some((lo, hi))
}

/// Finds a size-blocking witness (a blocking pair whose grabbed course
/// carries at least as many credits as the dropped set), or `None`.
pub fn find_size_blocking(
    inst: &Instance,
    m: &Matching,
    mode: VerifyMode,
) -> Result<Option<BlockingWitness>, VerifyError> {
    validated(inst, m)?;
    if mode == VerifyMode::Dp && !inst.rules.is_empty() {
        return Err(VerifyError::DpWithRules);
    }
    for student in &inst.students {
        let ctx = StudentCtx::build(inst, m, student.id);
        let found = match mode {
            VerifyMode::Dp => size_blocking_dp(inst, &ctx),
            VerifyMode::Exhaustive => size_blocking_exhaustive(inst, &ctx)?,
        };
        if let Some(w) = found {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn size_blocking_dp(inst: &Instance, ctx: &StudentCtx) -> Option<BlockingWitness> {
    for &(rank, cj) in &ctx.candidates {
        let (lo, hi) = match size_window(ctx, inst.courses[cj.0].credits) {
            Some(w) => w,
            None => continue,
        };
        let droppable: Vec<(usize, CourseId)> = ctx
            .assigned
            .iter()
            .copied()
            .filter(|&(r, _)| r > rank)
            .collect();
        let weights: Vec<Credits> = droppable
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .collect();
        let reach = subset_sums(&weights, hi);
        if let Some(d) = (lo..=hi).find(|&d| reach[d as usize]) {
            let drop = lex_smallest_subset(&droppable, &weights, d);
            return Some(BlockingWitness {
                student: ctx.s,
                coalition: vec![cj],
                drop_set: drop,
                notion: StabilityNotion::PairSize,
            });
        }
    }
    None
}

fn size_blocking_exhaustive(
    inst: &Instance,
    ctx: &StudentCtx,
) -> Result<Option<BlockingWitness>, VerifyError> {
    let mut budget = EXHAUSTIVE_CAP;
    for &(rank, cj) in &ctx.candidates {
        let (lo, hi) = match size_window(ctx, inst.courses[cj.0].credits) {
            Some(w) => w,
            None => continue,
        };
        let droppable: Vec<CourseId> = ctx
            .assigned
            .iter()
            .filter(|&&(r, _)| r > rank)
            .map(|&(_, c)| c)
            .collect();
        let hit = for_each_subset(&droppable, &mut budget, ctx.s, &mut |drop| {
            let dropped = inst.credits_of(drop.iter());
            if dropped < lo || dropped > hi {
                return Ok(false);
            }
            let result = ctx.resulting_set(&[cj], drop);
            Ok(is_feasible_set(inst, ctx.s, &result)?)
        })?;
        if let Some(drop) = hit {
            return Ok(Some(BlockingWitness {
                student: ctx.s,
                coalition: vec![cj],
                drop_set: drop,
                notion: StabilityNotion::PairSize,
            }));
        }
    }
    Ok(None)
}

/// Visits every subset of `items` (the empty one first) in lexicographic
/// order of index sequences — ∅, {0}, {0,1}, {0,1,2}, …, {0,2}, …, {1}, … —
/// charging one unit of `budget` per visit, and returns the first subset the
/// test accepts.
fn for_each_subset(
    items: &[CourseId],
    budget: &mut u64,
    student: StudentId,
    test: &mut dyn FnMut(&[CourseId]) -> Result<bool, VerifyError>,
) -> Result<Option<Vec<CourseId>>, VerifyError> {
    fn rec(
        items: &[CourseId],
        start: usize,
        current: &mut Vec<CourseId>,
        budget: &mut u64,
        student: StudentId,
        test: &mut dyn FnMut(&[CourseId]) -> Result<bool, VerifyError>,
    ) -> Result<Option<Vec<CourseId>>, VerifyError> {
        if *budget == 0 {
            return Err(VerifyError::CapExceeded {
                student,
                cap: EXHAUSTIVE_CAP,
            });
        }
        *budget -= 1;
        if test(current)? {
            return Ok(Some(current.clone()));
        }
        for i in start..items.len() {
            current.push(items[i]);
            if let Some(hit) = rec(items, i + 1, current, budget, student, test)? {
                return Ok(Some(hit));
            }
            current.pop();
        }
        Ok(None)
    }
    rec(items, 0, &mut Vec::new(), budget, student, test)
}

/// Finds a blocking coalition (every grabbed course preferred to every
/// dropped course, no net credit loss), or `None`.
///
/// `Dp` mode splits the student's preference list at every cut position: the
/// coalition draws from admitting candidates above the cut, the drop set from
/// assigned courses below it — exactly the shape "every grabbed beats every
/// dropped" allows — and then asks, via two subset-sum tables, for totals
/// `b ≥ 1` and `d` with `0 ≤ b − d ≤ slack`.
pub fn find_coalition_blocking(
    inst: &Instance,
    m: &Matching,
    mode: VerifyMode,
) -> Result<Option<BlockingWitness>, VerifyError> {
    validated(inst, m)?;
    if mode == VerifyMode::Dp && !inst.rules.is_empty() {
        return Err(VerifyError::DpWithRules);
    }
    for student in &inst.students {
        let ctx = StudentCtx::build(inst, m, student.id);
        let found = match mode {
            VerifyMode::Dp => coalition_dp(inst, &ctx),
            VerifyMode::Exhaustive => coalition_exhaustive(inst, &ctx)?,
        };
        if let Some(w) = found {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `good[b]` iff some drop total `d` reachable per `d_reach` satisfies
/// `0 ≤ b − d ≤ slack`; then a coalition summing to `b` works.
fn good_coalition_sums(d_reach: &[bool], slack: Credits, cap: Credits) -> Vec<bool> {
    let cap = cap as usize;
    (0..=cap)
        .map(|b| {
            let lo = b.saturating_sub(slack as usize);
            let hi = b.min(d_reach.len() - 1);
            (lo..=hi).any(|d| d_reach[d])
        })
        .collect()
}

/// Greedy lexicographically-smallest coalition drawn from `pool` (on top of a
/// fixed base of `base` credits) whose total credit sum `base + Σ picked`
/// lands on a good value of at least `min_total`. Returns the picked courses
/// and the final total, or `None` when no valid completion exists at all.
///
/// Include-first with a suffix-reachability existence check at each step is
/// lexicographically optimal, and a valid prefix always beats its extensions,
/// so the scan stops as soon as the running total is already good.
fn lex_smallest_coalition(
    pool: &[(usize, CourseId)],
    weights: &[Credits],
    base: Credits,
    min_total: Credits,
    good: &[bool],
    cap: Credits,
) -> Option<(Vec<CourseId>, Credits)> {
    if base > cap {
        return None;
    }
    let suffix = suffix_sums(weights, cap - base);
    let valid = |sum: Credits| good[sum as usize] && sum >= min_total;
    let completable = |sum: Credits, i: usize| {
        (0..=(cap - sum) as usize).any(|t| suffix[i][t] && valid(sum + t as Credits))
    };
    if !completable(base, 0) {
        return None;
    }
    let mut sum = base;
    let mut picked = Vec::new();
    for (i, &(_, c)) in pool.iter().enumerate() {
        if valid(sum) {
            break;
        }
        let w = weights[i];
        if sum + w <= cap && completable(sum + w, i + 1) {
            picked.push(c);
            sum += w;
        }
    }
    debug_assert!(valid(sum));
    Some((picked, sum))
}

fn coalition_dp(inst: &Instance, ctx: &StudentCtx) -> Option<BlockingWitness> {
    let slack = ctx.slack();
    let cap = ctx.limit;
    let pref_len = inst.students[ctx.s.0].prefs.len();
    // Rank-sequence keys of the best (coalition, drop set) seen across cuts.
    let mut best: Option<(Vec<usize>, Vec<usize>, BlockingWitness)> = None;
    for cut in 1..=pref_len {
        let pool_b: Vec<(usize, CourseId)> = ctx
            .candidates
            .iter()
            .copied()
            .filter(|&(r, _)| r < cut)
            .collect();
        if pool_b.is_empty() {
            continue;
        }
        let pool_d: Vec<(usize, CourseId)> = ctx
            .assigned
            .iter()
            .copied()
            .filter(|&(r, _)| r >= cut)
            .collect();
        let weights_b: Vec<Credits> = pool_b
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .collect();
        let weights_d: Vec<Credits> = pool_d
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .collect();
        let d_reach = subset_sums(&weights_d, ctx.assigned_credits);
        let good = good_coalition_sums(&d_reach, slack, cap);
        let Some((coalition, b)) = lex_smallest_coalition(&pool_b, &weights_b, 0, 1, &good, cap)
        else {
            continue;
        };
        // Smallest workable drop total, then its lex-smallest subset.
        let d = (b.saturating_sub(slack)..=b.min(ctx.assigned_credits))
            .find(|&d| d_reach[d as usize])
            .expect("a good coalition sum implies a reachable drop total");
        let drop = lex_smallest_subset(&pool_d, &weights_d, d);
        let key_b: Vec<usize> = ranks_of(inst, ctx.s, &coalition);
        let key_d: Vec<usize> = ranks_of(inst, ctx.s, &drop);
        if best
            .as_ref()
            .is_none_or(|(bb, bd, _)| (&key_b, &key_d) < (bb, bd))
        {
            best = Some((
                key_b,
                key_d,
                BlockingWitness {
                    student: ctx.s,
                    coalition,
                    drop_set: drop,
                    notion: StabilityNotion::Coalition,
                },
            ));
        }
    }
    best.map(|(_, _, w)| w)
}

fn ranks_of(inst: &Instance, s: StudentId, courses: &[CourseId]) -> Vec<usize> {
    courses
        .iter()
        .map(|&c| {
            inst.student_rank_of(s, c)
                .expect("course is on the student's list")
        })
        .collect()
}

/// A grabbed/dropped course pair found by an exhaustive search, if any.
type SplitFound = Result<Option<(Vec<CourseId>, Vec<CourseId>)>, VerifyError>;

fn coalition_exhaustive(
    inst: &Instance,
    ctx: &StudentCtx,
) -> Result<Option<BlockingWitness>, VerifyError> {
    // DFS over coalition prefixes in lexicographic rank order; for each
    // coalition, scan all drop sets drawn from the courses ranked below its
    // worst member.
    fn rec(
        inst: &Instance,
        ctx: &StudentCtx,
        start: usize,
        coalition: &mut Vec<CourseId>,
        worst_rank: usize,
        budget: &mut u64,
    ) -> SplitFound {
        if !coalition.is_empty() {
            let droppable: Vec<CourseId> = ctx
                .assigned
                .iter()
                .filter(|&&(r, _)| r > worst_rank)
                .map(|&(_, c)| c)
                .collect();
            let b = inst.credits_of(coalition.iter());
            let hit = for_each_subset(&droppable, budget, ctx.s, &mut |drop| {
                let d = inst.credits_of(drop.iter());
                if b < d || ctx.assigned_credits - d + b > ctx.limit {
                    return Ok(false);
                }
                let result = ctx.resulting_set(coalition, drop);
                Ok(is_feasible_set(inst, ctx.s, &result)?)
            })?;
            if let Some(drop) = hit {
                return Ok(Some((coalition.clone(), drop)));
            }
        }
        for i in start..ctx.candidates.len() {
            let (rank, c) = ctx.candidates[i];
            coalition.push(c);
            if let Some(hit) = rec(inst, ctx, i + 1, coalition, rank, budget)? {
                return Ok(Some(hit));
            }
            coalition.pop();
        }
        Ok(None)
    }
    let mut budget = EXHAUSTIVE_CAP;
    let found = rec(inst, ctx, 0, &mut Vec::new(), 0, &mut budget)?;
    Ok(found.map(|(coalition, drop)| BlockingWitness {
        student: ctx.s,
        coalition,
        drop_set: drop,
        notion: StabilityNotion::Coalition,
    }))
}

/// Finds a first-blocking coalition (only the favourite grabbed course must
/// beat the favourite dropped course), or `None`.
///
/// Both modes fix the coalition's best course `c*` in preference order; the
/// rest of the coalition and the whole drop set then come from courses ranked
/// below `c*`, with the same credit-sum window as plain coalitions.
pub fn find_first_coalition_blocking(
    inst: &Instance,
    m: &Matching,
    mode: VerifyMode,
) -> Result<Option<BlockingWitness>, VerifyError> {
    validated(inst, m)?;
    if mode == VerifyMode::Dp && !inst.rules.is_empty() {
        return Err(VerifyError::DpWithRules);
    }
    for student in &inst.students {
        let ctx = StudentCtx::build(inst, m, student.id);
        let found = match mode {
            VerifyMode::Dp => first_coalition_dp(inst, &ctx),
            VerifyMode::Exhaustive => first_coalition_exhaustive(inst, &ctx)?,
        };
        if let Some(w) = found {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn first_coalition_dp(inst: &Instance, ctx: &StudentCtx) -> Option<BlockingWitness> {
    let slack = ctx.slack();
    let cap = ctx.limit;
    for &(rank, c_star) in &ctx.candidates {
        let base = inst.courses[c_star.0].credits;
        if base > cap {
            continue;
        }
        let pool_b: Vec<(usize, CourseId)> = ctx
            .candidates
            .iter()
            .copied()
            .filter(|&(r, _)| r > rank)
            .collect();
        let pool_d: Vec<(usize, CourseId)> = ctx
            .assigned
            .iter()
            .copied()
            .filter(|&(r, _)| r > rank)
            .collect();
        let weights_b: Vec<Credits> = pool_b
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .collect();
        let weights_d: Vec<Credits> = pool_d
            .iter()
            .map(|&(_, c)| inst.courses[c.0].credits)
            .collect();
        let d_reach = subset_sums(&weights_d, ctx.assigned_credits);
        let good = good_coalition_sums(&d_reach, slack, cap);
        let Some((extras, b)) = lex_smallest_coalition(&pool_b, &weights_b, base, 0, &good, cap)
        else {
            continue;
        };
        let mut coalition = vec![c_star];
        coalition.extend(extras);
        let d = (b.saturating_sub(slack)..=b.min(ctx.assigned_credits))
            .find(|&d| d_reach[d as usize])
            .expect("a good coalition sum implies a reachable drop total");
        let drop = lex_smallest_subset(&pool_d, &weights_d, d);
        return Some(BlockingWitness {
            student: ctx.s,
            coalition,
            drop_set: drop,
            notion: StabilityNotion::FirstCoalition,
        });
    }
    None
}

fn first_coalition_exhaustive(
    inst: &Instance,
    ctx: &StudentCtx,
) -> Result<Option<BlockingWitness>, VerifyError> {
    // As in the DP: fix c*, then DFS the rest of the coalition in
    // lexicographic rank order, scanning drop sets for each.
    fn rec(
        inst: &Instance,
        ctx: &StudentCtx,
        pool: &[(usize, CourseId)],
        droppable: &[CourseId],
        start: usize,
        coalition: &mut Vec<CourseId>,
        budget: &mut u64,
    ) -> SplitFound {
        let b = inst.credits_of(coalition.iter());
        let hit = for_each_subset(droppable, budget, ctx.s, &mut |drop| {
            let d = inst.credits_of(drop.iter());
            if b < d || ctx.assigned_credits - d + b > ctx.limit {
                return Ok(false);
            }
            let result = ctx.resulting_set(coalition, drop);
            Ok(is_feasible_set(inst, ctx.s, &result)?)
        })?;
        if let Some(drop) = hit {
            return Ok(Some((coalition.clone(), drop)));
        }
        for i in start..pool.len() {
            coalition.push(pool[i].1);
            if let Some(hit) = rec(inst, ctx, pool, droppable, i + 1, coalition, budget)? {
                return Ok(Some(hit));
            }
            coalition.pop();
        }
        Ok(None)
    }
    let mut budget = EXHAUSTIVE_CAP;
    for &(rank, c_star) in &ctx.candidates {
        let pool: Vec<(usize, CourseId)> = ctx
            .candidates
            .iter()
            .copied()
            .filter(|&(r, _)| r > rank)
            .collect();
        let droppable: Vec<CourseId> = ctx
            .assigned
            .iter()
            .filter(|&&(r, _)| r > rank)
            .map(|&(_, c)| c)
            .collect();
        let mut coalition = vec![c_star];
        if let Some((coalition, drop)) =
            rec(inst, ctx, &pool, &droppable, 0, &mut coalition, &mut budget)?
        {
            return Ok(Some(BlockingWitness {
                student: ctx.s,
                coalition,
                drop_set: drop,
                notion: StabilityNotion::FirstCoalition,
            }));
        }
    }
    Ok(None)
}

/// Decides stability of `m` under `notion`, returning the verdict together
/// with a replayable witness when unstable. Dispatches to the notion's
/// finder, choosing DP mode when the instance has no feasibility rules and
/// exhaustive mode otherwise.
pub fn verify(
    inst: &Instance,
    m: &Matching,
    notion: StabilityNotion,
) -> Result<Verdict, VerifyError> {
    let mode = if inst.rules.is_empty() {
        VerifyMode::Dp
    } else {
        VerifyMode::Exhaustive
    };
    verify_with_mode(inst, m, notion, mode)
}

/// [`verify`] with the search mode forced, for agreement testing.
pub fn verify_with_mode(
    inst: &Instance,
    m: &Matching,
    notion: StabilityNotion,
    mode: VerifyMode,
) -> Result<Verdict, VerifyError> {
    let witness = match notion {
        StabilityNotion::Pair => find_pair_blocking(inst, m)?,
        StabilityNotion::PairSize => find_size_blocking(inst, m, mode)?,
        StabilityNotion::Coalition => find_coalition_blocking(inst, m, mode)?,
        StabilityNotion::FirstCoalition => find_first_coalition_blocking(inst, m, mode)?,
    };
    Ok(match witness {
        Some(w) => Verdict::Unstable(w),
        None => Verdict::Stable,
    })
}

/// Literal evaluation of the blocking definition: does student `s` together
/// with `coalition` (grabbed) and `drop` (dropped) block matching `m` under
/// `notion`? No search, no shortcuts — this transcribes the definition and is
/// shared by the brute-force oracle and witness replay. Structural
/// requirements (nonempty coalition, disjointness, acceptability, drop set
/// assigned) are part of the answer: a malformed triple does not block.
pub fn blocks(
    inst: &Instance,
    m: &Matching,
    s: StudentId,
    coalition: &[CourseId],
    drop: &[CourseId],
    notion: StabilityNotion,
) -> bool {
    if inst.students.get(s.0).is_none() {
        return false;
    }
    if coalition.is_empty() || (notion.is_pair_notion() && coalition.len() != 1) {
        return false;
    }
    let distinct = |cs: &[CourseId]| cs.iter().collect::<BTreeSet<_>>().len() == cs.len();
    if !distinct(coalition) || !distinct(drop) {
        return false;
    }
    let assigned: BTreeSet<CourseId> = m.course_set_of(s);
    if !drop.iter().all(|c| assigned.contains(c)) {
        return false;
    }
    if !coalition
        .iter()
        .all(|&c| inst.acceptable(s, c) && !assigned.contains(&c))
    {
        return false;
    }

    // Condition 1: every grabbed course admits the student.
    if !coalition.iter().all(|&c| admits_inner(inst, m, c, s)) {
        return false;
    }

    // Condition 2: preference order, credit limit, and (where the notion
    // wants it) no net credit loss.
    let rank = |c: CourseId| inst.student_rank_of(s, c).expect("acceptable or assigned");
    let pref_ok = match notion {
        StabilityNotion::Pair | StabilityNotion::PairSize | StabilityNotion::Coalition => coalition
            .iter()
            .all(|&b| drop.iter().all(|&d| rank(b) < rank(d))),
        StabilityNotion::FirstCoalition => {
            let best_b = coalition.iter().map(|&b| rank(b)).min().expect("nonempty");
            drop.iter()
                .map(|&d| rank(d))
                .min()
                .is_none_or(|best_d| best_b < best_d)
        }
    };
    if !pref_ok {
        return false;
    }
    let assigned_credits: Credits = inst.credits_of(assigned.iter());
    let b = inst.credits_of(coalition.iter());
    let d = inst.credits_of(drop.iter());
    if assigned_credits - d + b > inst.students[s.0].credit_limit {
        return false;
    }
    if notion != StabilityNotion::Pair && b < d {
        return false;
    }

    // Condition 3: the resulting course set is feasible.
    let mut result = assigned;
    for c in drop {
        result.remove(c);
    }
    result.extend(coalition.iter().copied());
    is_feasible_set(inst, s, &result).unwrap_or(false)
}

/// One of the three numbered conditions of a blocking definition, evaluated
/// against a concrete witness, with a human-readable account.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionReport {
    pub index: u8,
    pub description: String,
    pub holds: bool,
}

/// Replays a witness against the matching, reporting each of the notion's
/// three conditions. Errors on unknown ids or structurally nonsensical
/// witnesses (empty coalition, drop set not assigned, coalition course
/// already held or unacceptable); otherwise returns the three condition
/// reports, all of which hold iff the witness is genuine.
pub fn witness_report(
    inst: &Instance,
    m: &Matching,
    w: &BlockingWitness,
) -> Result<Vec<ConditionReport>, VerifyError> {
    let student = inst.student(w.student)?;
    for &c in w.coalition.iter().chain(&w.drop_set) {
        inst.course(c)?;
    }
    let assigned = m.course_set_of(w.student);
    if w.coalition.is_empty() || (w.notion.is_pair_notion() && w.coalition.len() != 1) {
        return Err(VerifyError::Unacceptable {
            student: w.student,
            course: *w.coalition.first().unwrap_or(&CourseId(0)),
        });
    }
    for &c in &w.coalition {
        if !inst.acceptable(w.student, c) {
            return Err(VerifyError::Unacceptable {
                student: w.student,
                course: c,
            });
        }
        if assigned.contains(&c) {
            return Err(VerifyError::PairInMatching {
                student: w.student,
                course: c,
            });
        }
    }
    if let Some(&c) = w.drop_set.iter().find(|c| !assigned.contains(c)) {
        return Err(VerifyError::Unacceptable {
            student: w.student,
            course: c,
        });
    }

    let label = |c: CourseId| inst.courses[c.0].label.clone();
    let list = |cs: &[CourseId]| {
        if cs.is_empty() {
            "nothing".to_string()
        } else {
            cs.iter().map(|&c| label(c)).collect::<Vec<_>>().join(", ")
        }
    };

    // Condition 1.
    let mut admissions = Vec::new();
    let mut cond1 = true;
    for &c in &w.coalition {
        let ok = admits_inner(inst, m, c, w.student);
        cond1 &= ok;
        let seats = m.students_of(c).count();
        let quota = inst.courses[c.0].upper_quota;
        if seats < quota as usize {
            admissions.push(format!(
                "{} has {} of {} seats taken",
                label(c),
                seats,
                quota
            ));
        } else if ok {
            admissions.push(format!(
                "{} is full but prefers {}",
                label(c),
                student.label
            ));
        } else {
            admissions.push(format!(
                "{} is full and does not prefer {}",
                label(c),
                student.label
            ));
        }
    }
    let cond1_desc = format!(
        "each grabbed course admits {}: {}",
        student.label,
        admissions.join("; ")
    );

    // Condition 2.
    let rank = |c: CourseId| inst.student_rank_of(w.student, c);
    let pref_ok = match w.notion {
        StabilityNotion::Pair | StabilityNotion::PairSize | StabilityNotion::Coalition => w
            .coalition
            .iter()
            .all(|&b| w.drop_set.iter().all(|&d| rank(b) < rank(d))),
        StabilityNotion::FirstCoalition => {
            let best_b = w.coalition.iter().filter_map(|&c| rank(c)).min();
            let best_d = w.drop_set.iter().filter_map(|&c| rank(c)).min();
            match (best_b, best_d) {
                (Some(b), Some(d)) => b < d,
                _ => true,
            }
        }
    };
    let assigned_credits = inst.credits_of(assigned.iter());
    let b = inst.credits_of(w.coalition.iter());
    let d = inst.credits_of(w.drop_set.iter());
    let new_total = assigned_credits as i64 - d as i64 + b as i64;
    let credits_ok = new_total <= student.credit_limit as i64;
    let size_ok = w.notion == StabilityNotion::Pair || b >= d;
    let pref_clause = match w.notion {
        StabilityNotion::Pair | StabilityNotion::PairSize => {
            format!(
                "{} prefers {} to every dropped course",
                student.label,
                list(&w.coalition)
            )
        }
        StabilityNotion::Coalition => format!(
            "{} prefers every grabbed course to every dropped course",
            student.label
        ),
        StabilityNotion::FirstCoalition => format!(
            "{}'s favourite grabbed course beats her favourite dropped course",
            student.label
        ),
    };
    let mut cond2_desc = format!(
        "{pref_clause} ({}); credits {} - {} + {} = {} within limit {}",
        if pref_ok { "holds" } else { "fails" },
        assigned_credits,
        d,
        b,
        new_total,
        student.credit_limit,
    );
    if w.notion != StabilityNotion::Pair {
        cond2_desc.push_str(&format!(
            "; grabbed credits {} >= dropped credits {} ({})",
            b,
            d,
            if size_ok { "holds" } else { "fails" }
        ));
    }
    let cond2 = pref_ok && credits_ok && size_ok;

    // Condition 3.
    let mut result = assigned.clone();
    for c in &w.drop_set {
        result.remove(c);
    }
    result.extend(w.coalition.iter().copied());
    let cond3 = is_feasible_set(inst, w.student, &result)?;
    let result_list: Vec<String> = result.iter().map(|&c| label(c)).collect();
    let cond3_desc = format!(
        "resulting set {{{}}} satisfies the feasibility rules",
        result_list.join(", ")
    );

    Ok(vec![
        ConditionReport {
            index: 1,
            description: cond1_desc,
            holds: cond1,
        },
        ConditionReport {
            index: 2,
            description: cond2_desc,
            holds: cond2,
        },
        ConditionReport {
            index: 3,
            description: cond3_desc,
            holds: cond3,
        },
    ])
}

/// Whether a witness genuinely blocks the matching: structural checks plus
/// the notion's three conditions, via the literal evaluator.
pub fn check_witness(inst: &Instance, m: &Matching, w: &BlockingWitness) -> bool {
    blocks(inst, m, w.student, &w.coalition, &w.drop_set, w.notion)
}

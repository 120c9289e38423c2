//! Constructive solvers.
//!
//! [`solve_pair_size_da`] always produces a pair-size-stable matching in
//! `O(nm²)` time by running deferred acceptance in rounds over credit
//! groups, largest credit value first. [`solve_master_list`] handles
//! instances where both sides rank by a common master list with a single
//! serial-dictatorship pass whose output is pair-stable — and therefore
//! stable under all four notions.
//!
//! Maximum-size stable matchings are NP-hard to find in general, so
//! [`max_stable_search`] is an exhaustive backtracking search with an
//! explicit node budget, and [`lq_cl_max`] layers the lower-quota closure
//! semantics on top of it by trying every open/closed split of the
//! lower-quota courses. Closed courses keep their ids but lose their quotas
//! (see [`Instance::with_courses_closed`]), so nobody can be assigned to
//! them — or block with them.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{
    is_feasible_set, matching_size, validate_instance, CourseId, Credits, Instance, Matching,
    StabilityNotion, StudentId, Violation,
};
use crate::verify::{verify, VerifyError};

/// Default node budget for the exhaustive searches.
pub const SEARCH_NODE_BUDGET: u64 = 10_000_000;

/// Cap on the number of open/closed splits [`lq_cl_max`] will try.
pub const OPEN_SET_CAP: u32 = 16;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum SolveError {
    #[error("instance has no student master list")]
    MissingMasterList,
    #[error("master list is inconsistent: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InconsistentMasterList(Vec<Violation>),
    #[error("search exceeded its budget of {budget} nodes")]
    BudgetExceeded { budget: u64 },
    #[error("instance has {courses} lower-quota courses; open-set search is capped at {cap}")]
    TooManyOpenSets { courses: usize, cap: u32 },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// The round structure of [`solve_pair_size_da`]: courses grouped by credit
/// value, strictly descending. The groups partition the course set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoundSchedule {
    /// `(credit value, courses with that value)`, largest value first.
    pub rounds: Vec<(Credits, Vec<CourseId>)>,
}

/// Groups the courses of an instance by credit value, largest first.
pub fn round_schedule(inst: &Instance) -> RoundSchedule {
    let mut values: Vec<Credits> = inst.courses.iter().map(|c| c.credits).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    let rounds = values
        .into_iter()
        .map(|v| {
            let group: Vec<CourseId> = inst
                .courses
                .iter()
                .filter(|c| c.credits == v)
                .map(|c| c.id)
                .collect();
            (v, group)
        })
        .collect();
    RoundSchedule { rounds }
}

/// Finds a pair-size-stable matching; one always exists, so this cannot fail.
///
/// Deferred acceptance runs in rounds, one per credit value, largest first;
/// within a round every student applies, best course first, to each course
/// of the round she can currently afford and feasibly add, and courses keep
/// their best applicants up to quota, displacing worse ones. Pairs formed in
/// earlier rounds are never broken. The "some student applies" choice is
/// resolved by a FIFO queue seeded in student index order (one application
/// per turn, displaced students re-enter at the tail), which makes the
/// output deterministic; courses whose rule check fails are retried after
/// the student loses a course, since they may have become feasible.
pub fn solve_pair_size_da(inst: &Instance) -> Matching {
    solve_pair_size_da_rounds(inst).0
}

/// [`solve_pair_size_da`] plus the matching as of the end of each round,
/// for tests of the rounds-never-unwind invariant.
pub fn solve_pair_size_da_rounds(inst: &Instance) -> (Matching, Vec<Matching>) {
    let n = inst.students.len();
    let mut sets: Vec<BTreeSet<CourseId>> = vec![BTreeSet::new(); n];
    let mut credits: Vec<Credits> = vec![0; n];
    let mut rosters: Vec<Vec<StudentId>> = vec![Vec::new(); inst.courses.len()];
    let mut snapshots = Vec::new();

    for (value, group) in &round_schedule(inst).rounds {
        let in_round: BTreeSet<CourseId> = group.iter().copied().collect();
        let mut applied: Vec<BTreeSet<CourseId>> = vec![BTreeSet::new(); n];
        let mut queue: VecDeque<StudentId> = inst.students.iter().map(|s| s.id).collect();
        while let Some(s) = queue.pop_front() {
            // A student who cannot afford this round's credit value stays
            // parked until losing a course puts her back in the queue.
            if credits[s.0] + value > inst.students[s.0].credit_limit {
                continue;
            }
            // Best course of this round not yet applied to that she could
            // feasibly add right now.
            let target = inst.students[s.0].prefs.iter().copied().find(|&c| {
                in_round.contains(&c)
                    && !applied[s.0].contains(&c)
                    && inst.course_rank_of(c, s).is_some()
                    && {
                        let mut with = sets[s.0].clone();
                        with.insert(c);
                        is_feasible_set(inst, s, &with).unwrap_or(false)
                    }
            });
            let Some(c) = target else {
                continue;
            };
            applied[s.0].insert(c);
            let course = &inst.courses[c.0];
            if rosters[c.0].len() < course.upper_quota as usize {
                rosters[c.0].push(s);
                sets[s.0].insert(c);
                credits[s.0] += value;
                queue.push_back(s);
            } else {
                let worst = rosters[c.0]
                    .iter()
                    .copied()
                    .max_by_key(|&w| inst.course_rank_of(c, w).expect("roster is acceptable"));
                let my_rank = inst.course_rank_of(c, s).expect("checked above");
                match worst {
                    Some(w) if my_rank < inst.course_rank_of(c, w).unwrap() => {
                        rosters[c.0].retain(|&x| x != w);
                        sets[w.0].remove(&c);
                        credits[w.0] -= value;
                        rosters[c.0].push(s);
                        sets[s.0].insert(c);
                        credits[s.0] += value;
                        queue.push_back(s);
                        queue.push_back(w);
                    }
                    _ => queue.push_back(s),
                }
            }
        }
        snapshots.push(collect_matching(&sets));
    }
    (collect_matching(&sets), snapshots)
}

fn collect_matching(sets: &[BTreeSet<CourseId>]) -> Matching {
    Matching::new(
        sets.iter()
            .enumerate()
            .flat_map(|(i, cs)| cs.iter().map(move |&c| (StudentId(i), c))),
    )
}

/// Serial dictatorship for master-list instances: students in master-list
/// order each scan their preference list once and take every course with a
/// vacancy that fits their remaining credits and rules. The output is
/// pair-stable — and by implication stable under all four notions — and is
/// the unique pair-stable matching of the instance.
///
/// Errors if the student master list is missing, malformed, or contradicted
/// by some preference list.
pub fn solve_master_list(inst: &Instance) -> Result<Matching, SolveError> {
    let order = inst
        .master_list_students
        .as_ref()
        .ok_or(SolveError::MissingMasterList)?;
    let ml_violations: Vec<Violation> = validate_instance(inst)
        .into_iter()
        .filter(|v| {
            matches!(
                v,
                Violation::MasterListDisagreement { .. } | Violation::MasterListMalformed { .. }
            )
        })
        .collect();
    if !ml_violations.is_empty() {
        return Err(SolveError::InconsistentMasterList(ml_violations));
    }

    let mut pairs = Vec::new();
    let mut rosters: Vec<usize> = vec![0; inst.courses.len()];
    for &s in order {
        let student = &inst.students[s.0];
        let mut taken = BTreeSet::new();
        let mut used = 0;
        for &c in &student.prefs {
            let course = &inst.courses[c.0];
            if inst.course_rank_of(c, s).is_none()
                || rosters[c.0] >= course.upper_quota as usize
                || used + course.credits > student.credit_limit
            {
                continue;
            }
            let mut with = taken.clone();
            with.insert(c);
            if !is_feasible_set(inst, s, &with).unwrap_or(false) {
                continue;
            }
            taken = with;
            used += course.credits;
            rosters[c.0] += 1;
            pairs.push((s, c));
        }
    }
    Ok(Matching::new(pairs))
}

/// Lower-quota regime for the maximum-size searches.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LqMode {
    /// Lower quotas are ignored.
    None,
    /// Every course must meet its lower quota; none may close.
    NoClosures,
    /// A course missing its lower quota may instead be closed: it holds no
    /// students and nobody may block with it.
    Closures,
}

/// Finds a maximum-size stable matching by exhaustive search, or `None` if
/// no matching is stable under `notion` (and admissible under `lq`).
///
/// Backtracks over the acceptable pairs in canonical order, branching on
/// take/skip and pruning branches that break a credit limit, an upper quota,
/// or a feasibility rule; every surviving leaf is a valid matching, which is
/// kept if it passes the stability verifier and the lower-quota condition.
/// Ties between maximum-size winners go to the lexicographically smallest
/// pair list. The search is budgeted at [`SEARCH_NODE_BUDGET`] nodes and
/// fails loudly when it runs out.
pub fn max_stable_search(
    inst: &Instance,
    notion: StabilityNotion,
    lq: LqMode,
) -> Result<Option<(Matching, u64)>, SolveError> {
    match lq {
        LqMode::None | LqMode::NoClosures => {
            let mut budget = SEARCH_NODE_BUDGET;
            max_stable_with_filter(inst, notion, lq, &mut budget)
        }
        LqMode::Closures => Ok(lq_cl_max(inst, notion)?.map(|(m, _, size)| (m, size))),
    }
}

fn max_stable_with_filter(
    inst: &Instance,
    notion: StabilityNotion,
    lq: LqMode,
    budget: &mut u64,
) -> Result<Option<(Matching, u64)>, SolveError> {
    struct Search<'a> {
        inst: &'a Instance,
        notion: StabilityNotion,
        lq: LqMode,
        pairs: Vec<(StudentId, CourseId)>,
        chosen: Vec<(StudentId, CourseId)>,
        sets: Vec<BTreeSet<CourseId>>,
        credits: Vec<Credits>,
        rosters: Vec<u32>,
        best: Option<(u64, Matching)>,
    }

    impl Search<'_> {
        fn dfs(&mut self, idx: usize, budget: &mut u64) -> Result<(), SolveError> {
            if *budget == 0 {
                return Err(SolveError::BudgetExceeded {
                    budget: SEARCH_NODE_BUDGET,
                });
            }
            *budget -= 1;
            if idx == self.pairs.len() {
                return self.leaf();
            }
            let (s, c) = self.pairs[idx];
            let course = &self.inst.courses[c.0];
            if self.credits[s.0] + course.credits <= self.inst.students[s.0].credit_limit
                && self.rosters[c.0] < course.upper_quota
            {
                self.sets[s.0].insert(c);
                if is_feasible_set(self.inst, s, &self.sets[s.0]).unwrap_or(false) {
                    self.credits[s.0] += course.credits;
                    self.rosters[c.0] += 1;
                    self.chosen.push((s, c));
                    self.dfs(idx + 1, budget)?;
                    self.chosen.pop();
                    self.rosters[c.0] -= 1;
                    self.credits[s.0] -= course.credits;
                }
                self.sets[s.0].remove(&c);
            }
            self.dfs(idx + 1, budget)
        }

        fn leaf(&mut self) -> Result<(), SolveError> {
            let m = Matching::new(self.chosen.iter().copied());
            if self.lq == LqMode::NoClosures
                && !crate::oracle::meets_all_lower_quotas(self.inst, &m)
            {
                return Ok(());
            }
            if !verify(self.inst, &m, self.notion)?.is_stable() {
                return Ok(());
            }
            let size = matching_size(self.inst, &m).credits;
            let better = match &self.best {
                None => true,
                Some((best_size, best_m)) => {
                    size > *best_size || (size == *best_size && m.pairs() < best_m.pairs())
                }
            };
            if better {
                self.best = Some((size, m));
            }
            Ok(())
        }
    }

    let mut search = Search {
        inst,
        notion,
        lq,
        pairs: inst.acceptable_pairs(),
        chosen: Vec::new(),
        sets: vec![BTreeSet::new(); inst.students.len()],
        credits: vec![0; inst.students.len()],
        rosters: vec![0; inst.courses.len()],
        best: None,
    };
    search.dfs(0, budget)?;
    Ok(search.best.map(|(size, m)| (m, size)))
}

/// Polynomial lower-quota check for master-list instances: runs the serial
/// dictatorship and returns its matching iff every course meets its lower
/// quota. Because the pair-stable matching of a master-list instance is
/// unique, this decides whether any pair-stable matching meets the quotas.
pub fn lq_nc_find_ml_pair(inst: &Instance) -> Result<Option<Matching>, SolveError> {
    let m = solve_master_list(inst)?;
    Ok(crate::oracle::meets_all_lower_quotas(inst, &m).then_some(m))
}

/// Maximum-size stable matching when under-quota courses may close.
///
/// Tries every open/closed split of the courses with positive lower quotas
/// (at most `2^`[`OPEN_SET_CAP`] splits): closed courses lose their quotas, so
/// they hold nobody and cannot be blocked with, and every open lower-quota
/// course must meet its quota. Each split is searched exhaustively, all
/// splits drawing on one shared [`SEARCH_NODE_BUDGET`] node pool. Returns the
/// best matching over all splits together with the set of lower-quota
/// courses left open, or `None` when no split admits a stable matching.
pub fn lq_cl_max(
    inst: &Instance,
    notion: StabilityNotion,
) -> Result<Option<(Matching, BTreeSet<CourseId>, u64)>, SolveError> {
    let lq_courses: Vec<CourseId> = inst
        .courses
        .iter()
        .filter(|c| c.lower_quota > 0)
        .map(|c| c.id)
        .collect();
    if lq_courses.len() > OPEN_SET_CAP as usize {
        return Err(SolveError::TooManyOpenSets {
            courses: lq_courses.len(),
            cap: OPEN_SET_CAP,
        });
    }
    let mut budget = SEARCH_NODE_BUDGET;
    let mut best: Option<(Matching, BTreeSet<CourseId>, u64)> = None;
    for open_mask in 0u64..(1 << lq_courses.len()) {
        let open: BTreeSet<CourseId> = lq_courses
            .iter()
            .enumerate()
            .filter(|&(i, _)| open_mask & (1 << i) != 0)
            .map(|(_, &c)| c)
            .collect();
        let closed: BTreeSet<CourseId> = lq_courses
            .iter()
            .copied()
            .filter(|c| !open.contains(c))
            .collect();
        let sub = inst.with_courses_closed(&closed);
        // Within this split, every open lower-quota course must meet its
        // quota; model that as a temporary no-closures search on the
        // sub-instance (closed courses have lower quota zero there).
        let found = max_stable_with_filter(&sub, notion, LqMode::NoClosures, &mut budget)?;
        if let Some((m, size)) = found {
            let better = match &best {
                None => true,
                Some((best_m, _, best_size)) => {
                    size > *best_size || (size == *best_size && m.pairs() < best_m.pairs())
                }
            };
            if better {
                best = Some((m, open, size));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_matching;
    use crate::oracle::max_stable_brute;
    use crate::reductions::{fixtures, gen_random, GenParams};

    fn fixture(name: &str) -> Instance {
        fixtures()[name].instance.clone()
    }

    fn sid(inst: &Instance, label: &str) -> StudentId {
        inst.student_by_label(label).unwrap().id
    }

    fn cid(inst: &Instance, label: &str) -> CourseId {
        inst.course_by_label(label).unwrap().id
    }

    fn pairs(inst: &Instance, ps: &[(&str, &str)]) -> Matching {
        Matching::new(ps.iter().map(|&(s, c)| (sid(inst, s), cid(inst, c))))
    }

    #[test]
    fn schedule_partitions_courses_in_descending_credit_groups() {
        let inst = fixture("fig5");
        let schedule = round_schedule(&inst);
        let values: Vec<Credits> = schedule.rounds.iter().map(|&(v, _)| v).collect();
        assert!(values.windows(2).all(|w| w[0] > w[1]));
        let mut seen: Vec<CourseId> = schedule
            .rounds
            .iter()
            .flat_map(|(_, cs)| cs.iter().copied())
            .collect();
        seen.sort();
        assert_eq!(
            seen,
            (0..inst.courses.len()).map(CourseId).collect::<Vec<_>>()
        );
    }

    #[test]
    fn deferred_acceptance_reproduces_the_worked_example() {
        let inst = fixture("fig5");
        let m = solve_pair_size_da(&inst);
        assert_eq!(m, pairs(&inst, &[("s1", "c3"), ("s2", "c2")]));
        assert!(verify(&inst, &m, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());
    }

    #[test]
    fn deferred_acceptance_handles_trivial_instances() {
        assert_eq!(solve_pair_size_da(&Instance::default()), Matching::empty());
        let inst = fixture("sec42");
        // One student, c1 (1 credit) over c2 (2 credits): rounds are c2 then
        // c1, and she can take both (limit 2 is not reached by either alone)?
        // No — c2 first (2 credits) fills her limit, then c1 does not fit.
        let m = solve_pair_size_da(&inst);
        assert_eq!(m, pairs(&inst, &[("s1", "c2")]));
        assert!(verify(&inst, &m, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());
    }

    #[test]
    fn rounds_never_unwind() {
        for seed in 0..50 {
            let inst = gen_random(&GenParams::small(), seed);
            let (m, snapshots) = solve_pair_size_da_rounds(&inst);
            for (earlier, later) in snapshots.iter().zip(snapshots.iter().skip(1)) {
                for &(s, c) in earlier.pairs() {
                    assert!(later.contains(s, c));
                }
            }
            if let Some(last) = snapshots.last() {
                assert_eq!(last, &m);
            }
        }
    }

    #[test]
    fn deferred_acceptance_output_is_always_pair_size_stable() {
        for seed in 0..200 {
            let inst = gen_random(&GenParams::small().with_rules(), seed);
            let m = solve_pair_size_da(&inst);
            assert!(check_matching(&inst, &m).is_empty(), "seed {seed}");
            let verdict = verify(&inst, &m, StabilityNotion::PairSize).unwrap();
            assert!(verdict.is_stable(), "seed {seed}: {verdict:?}");
        }
    }

    #[test]
    fn serial_dictatorship_reproduces_the_worked_examples() {
        let ml = fixture("ml");
        let m = solve_master_list(&ml).unwrap();
        assert_eq!(m, pairs(&ml, &[("s1", "c1"), ("s2", "c2")]));
        for &notion in &StabilityNotion::ALL {
            assert!(verify(&ml, &m, notion).unwrap().is_stable());
        }

        let sec42 = fixture("sec42");
        let m = solve_master_list(&sec42).unwrap();
        assert_eq!(m, pairs(&sec42, &[("s1", "c1")]));
    }

    #[test]
    fn serial_dictatorship_requires_a_master_list() {
        let err = solve_master_list(&fixture("fig1")).unwrap_err();
        assert_eq!(err, SolveError::MissingMasterList);
    }

    #[test]
    fn serial_dictatorship_rejects_inconsistent_master_lists() {
        let mut inst = fixture("ml");
        inst.master_list_students = Some(vec![sid(&inst, "s2"), sid(&inst, "s1")]);
        let err = solve_master_list(&inst).unwrap_err();
        assert!(matches!(err, SolveError::InconsistentMasterList(_)));
    }

    #[test]
    fn unlucky_student_ends_unmatched() {
        // Two students, one seat, the dictator takes it.
        let mut inst = fixture("ml");
        let (c1, c2) = (cid(&inst, "c1"), cid(&inst, "c2"));
        let (s1, s2) = (sid(&inst, "s1"), sid(&inst, "s2"));
        inst.courses[c2.0].prefs.clear();
        inst.students[s1.0].prefs = vec![c1];
        inst.students[s2.0].prefs = vec![c1];
        let m = solve_master_list(&inst).unwrap();
        assert_eq!(m, pairs(&inst, &[("s1", "c1")]));
    }

    #[test]
    fn max_search_matches_known_answers() {
        let fig5 = fixture("fig5");
        assert_eq!(
            max_stable_search(&fig5, StabilityNotion::Pair, LqMode::None).unwrap(),
            None
        );
        assert_eq!(
            max_stable_search(&fig5, StabilityNotion::FirstCoalition, LqMode::None).unwrap(),
            None
        );
        let (m, size) = max_stable_search(&fig5, StabilityNotion::PairSize, LqMode::None)
            .unwrap()
            .unwrap();
        assert_eq!(size, 3);
        assert!(verify(&fig5, &m, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());

        let sec42 = fixture("sec42");
        let (m, size) = max_stable_search(&sec42, StabilityNotion::FirstCoalition, LqMode::None)
            .unwrap()
            .unwrap();
        assert_eq!(size, 2);
        assert_eq!(m, pairs(&sec42, &[("s1", "c2")]));
    }

    #[test]
    fn max_search_size_agrees_with_the_oracle() {
        for seed in 0..40 {
            let inst = gen_random(&GenParams::small(), seed);
            let report = max_stable_brute(&inst, LqMode::None).unwrap();
            for &notion in &StabilityNotion::ALL {
                let found = max_stable_search(&inst, notion, LqMode::None).unwrap();
                assert_eq!(
                    found.map(|(_, size)| size),
                    report.max_stable_size[&notion],
                    "seed {seed} {notion}"
                );
            }
        }
    }

    #[test]
    fn search_budget_fails_loudly() {
        let inst = fixture("fig5");
        let mut budget = 3;
        let err = max_stable_with_filter(&inst, StabilityNotion::Pair, LqMode::None, &mut budget)
            .unwrap_err();
        assert_eq!(
            err,
            SolveError::BudgetExceeded {
                budget: SEARCH_NODE_BUDGET
            }
        );
    }

    #[test]
    fn lq_nc_returns_the_matching_exactly_when_quotas_are_met() {
        let mut inst = fixture("ml");
        let c2 = cid(&inst, "c2");
        inst.courses[c2.0].lower_quota = 1;
        let m = lq_nc_find_ml_pair(&inst).unwrap().unwrap();
        assert_eq!(m, pairs(&inst, &[("s1", "c1"), ("s2", "c2")]));

        inst.courses[c2.0].lower_quota = 2;
        assert_eq!(lq_nc_find_ml_pair(&inst).unwrap(), None);

        inst.courses[c2.0].lower_quota = 0;
        assert!(lq_nc_find_ml_pair(&inst).unwrap().is_some());
    }

    #[test]
    fn closures_search_matches_known_answers() {
        // Without lower quotas, closures change nothing.
        let fig5 = fixture("fig5");
        let with_lq = lq_cl_max(&fig5, StabilityNotion::PairSize)
            .unwrap()
            .unwrap();
        let plain = max_stable_search(&fig5, StabilityNotion::PairSize, LqMode::None)
            .unwrap()
            .unwrap();
        assert_eq!((with_lq.0, with_lq.2), plain);
        assert!(with_lq.1.is_empty());

        // One course (1 credit, quotas 2/2), two students of limit 1: the
        // only admissible open split assigns both.
        let mut inst = Instance::default();
        for i in 0..2 {
            inst.students.push(crate::model::Student {
                id: StudentId(i),
                label: format!("s{}", i + 1),
                credit_limit: 1,
                prefs: vec![CourseId(0)],
            });
        }
        inst.courses.push(crate::model::Course {
            id: CourseId(0),
            label: "c1".into(),
            credits: 1,
            upper_quota: 2,
            lower_quota: 2,
            prefs: vec![StudentId(0), StudentId(1)],
        });
        let (m, open, size) = lq_cl_max(&inst, StabilityNotion::Pair).unwrap().unwrap();
        assert_eq!(size, 2);
        assert_eq!(m.pairs().len(), 2);
        assert_eq!(open, [CourseId(0)].into());

        // Drop to one student: the lower quota is unreachable, so the course
        // closes and the stable outcome is the empty matching.
        inst.students.pop();
        inst.courses[0].prefs.pop();
        let (m, open, size) = lq_cl_max(&inst, StabilityNotion::Pair).unwrap().unwrap();
        assert_eq!((m, size), (Matching::empty(), 0));
        assert!(open.is_empty());
    }

    #[test]
    fn closures_search_agrees_with_the_oracle() {
        for seed in 0..25 {
            let inst = gen_random(&GenParams::small().with_lower_quotas(), seed);
            let report = max_stable_brute(&inst, LqMode::Closures).unwrap();
            for &notion in &StabilityNotion::ALL {
                let found = lq_cl_max(&inst, notion).unwrap();
                assert_eq!(
                    found.map(|(_, _, size)| size),
                    report.max_stable_size[&notion],
                    "seed {seed} {notion}"
                );
            }
        }
    }
}

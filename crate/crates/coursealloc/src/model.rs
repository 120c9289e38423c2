//! Data model for course allocation with credit limits.
//!
//! An instance pairs a set of students with a set of courses. Every student
//! has a credit limit and a strict preference list over the courses she finds
//! acceptable; every course has a credit value, an upper quota (and optionally
//! a lower quota), and a strict preference list over the students it finds
//! acceptable. Acceptability is mutual: a student lists a course if and only
//! if the course lists the student.
//!
//! A matching assigns students to courses such that no student exceeds her
//! credit limit, no course exceeds its upper quota, and every per-student
//! course set satisfies the instance's feasibility rules. The size of a
//! matching is the total number of credits taken across all assignments.
//!
//! Everything in this module is plain immutable data plus pure functions, so
//! values can be shared freely across threads.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Credit values and credit limits. Credits are kept integral so that
/// subset-sum style reasoning over them stays exact and table-indexable.
pub type Credits = u32;

/// Index of a student within an instance. Indices are dense: an instance with
/// `n` students uses exactly `StudentId(0)..StudentId(n-1)`. The
/// human-readable name lives in [`Student::label`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StudentId(pub usize);

/// Index of a course within an instance; dense like [`StudentId`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CourseId(pub usize);

impl fmt::Display for StudentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "student#{}", self.0)
    }
}

impl fmt::Display for CourseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "course#{}", self.0)
    }
}

/// A student: label, credit limit, and strict preferences over acceptable
/// courses (most preferred first).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Student {
    pub id: StudentId,
    pub label: String,
    pub credit_limit: Credits,
    pub prefs: Vec<CourseId>,
}

/// A course: label, credit value, quotas, and strict preferences over
/// acceptable students (most preferred first). `lower_quota` is zero unless
/// the instance models minimum enrolment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Course {
    pub id: CourseId,
    pub label: String,
    pub credits: Credits,
    pub upper_quota: u32,
    pub lower_quota: u32,
    pub prefs: Vec<StudentId>,
}

/// Who a feasibility rule applies to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleOwner {
    Student(StudentId),
    All,
}

/// The shape of a feasibility rule. Both kinds are downward-feasible by
/// construction: removing a course from a set that satisfies the rule can
/// never break it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RuleKind {
    /// The given courses must not all be taken together.
    ExcludedCombination(BTreeSet<CourseId>),
    /// At most `k` of the given courses may be taken together.
    AtMostKOfGroup { k: u32, group: BTreeSet<CourseId> },
}

/// A per-student (or global) restriction on which course sets are feasible.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FeasibilityRule {
    pub kind: RuleKind,
    pub owner: RuleOwner,
}

impl FeasibilityRule {
    /// Whether this rule constrains the given student.
    pub fn applies_to(&self, s: StudentId) -> bool {
        match self.owner {
            RuleOwner::Student(owner) => owner == s,
            RuleOwner::All => true,
        }
    }

    /// Whether `cs` satisfies this rule (ignoring ownership).
    fn allows(&self, cs: &BTreeSet<CourseId>) -> bool {
        match &self.kind {
            RuleKind::ExcludedCombination(combo) => !combo.is_subset(cs),
            RuleKind::AtMostKOfGroup { k, group } => group.intersection(cs).count() <= *k as usize,
        }
    }
}

/// A full course-allocation instance. Master lists, when present, are global
/// strict rankings that every individual preference list on the opposite side
/// must agree with.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Instance {
    pub students: Vec<Student>,
    pub courses: Vec<Course>,
    /// Global ranking of students; all course preference lists follow it.
    pub master_list_students: Option<Vec<StudentId>>,
    /// Global ranking of courses; all student preference lists follow it.
    pub master_list_courses: Option<Vec<CourseId>>,
    pub rules: Vec<FeasibilityRule>,
}

/// Errors for operations handed an id that does not belong to the instance.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ModelError {
    #[error("unknown student index {0}")]
    UnknownStudent(usize),
    #[error("unknown course index {0}")]
    UnknownCourse(usize),
}

impl Instance {
    pub fn student(&self, s: StudentId) -> Result<&Student, ModelError> {
        self.students
            .get(s.0)
            .ok_or(ModelError::UnknownStudent(s.0))
    }

    pub fn course(&self, c: CourseId) -> Result<&Course, ModelError> {
        self.courses.get(c.0).ok_or(ModelError::UnknownCourse(c.0))
    }

    pub fn student_by_label(&self, label: &str) -> Option<&Student> {
        self.students.iter().find(|s| s.label == label)
    }

    pub fn course_by_label(&self, label: &str) -> Option<&Course> {
        self.courses.iter().find(|c| c.label == label)
    }

    /// Position of course `c` in student `s`'s preference list (0 = most
    /// preferred), or `None` if `s` does not find `c` acceptable.
    pub fn student_rank_of(&self, s: StudentId, c: CourseId) -> Option<usize> {
        self.students.get(s.0)?.prefs.iter().position(|&x| x == c)
    }

    /// Position of student `s` in course `c`'s preference list, or `None` if
    /// `c` does not find `s` acceptable.
    pub fn course_rank_of(&self, c: CourseId, s: StudentId) -> Option<usize> {
        self.courses.get(c.0)?.prefs.iter().position(|&x| x == s)
    }

    /// Whether the student–course pair is mutually acceptable.
    pub fn acceptable(&self, s: StudentId, c: CourseId) -> bool {
        self.student_rank_of(s, c).is_some() && self.course_rank_of(c, s).is_some()
    }

    /// All mutually acceptable pairs in canonical order: by student index,
    /// then by the student's preference rank. This is the order every
    /// exhaustive enumeration in the crate walks.
    pub fn acceptable_pairs(&self) -> Vec<(StudentId, CourseId)> {
        let mut out = Vec::new();
        for s in &self.students {
            for &c in &s.prefs {
                if self.course_rank_of(c, s.id).is_some() {
                    out.push((s.id, c));
                }
            }
        }
        out
    }

    /// Total credits of a set of courses.
    pub fn credits_of<'a>(&self, cs: impl IntoIterator<Item = &'a CourseId>) -> Credits {
        cs.into_iter().map(|&c| self.courses[c.0].credits).sum()
    }

    /// A copy of the instance with the given courses closed: their quotas
    /// drop to zero, so they can hold no students and never admit anyone,
    /// while every id, label, and preference list stays put. This is how the
    /// lower-quota searches model a closed course without renumbering.
    pub fn with_courses_closed(&self, closed: &BTreeSet<CourseId>) -> Instance {
        let mut inst = self.clone();
        for &c in closed {
            if let Some(course) = inst.courses.get_mut(c.0) {
                course.upper_quota = 0;
                course.lower_quota = 0;
            }
        }
        inst
    }
}

/// One structural defect found by [`validate_instance`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    DuplicateStudentLabel {
        label: String,
    },
    DuplicateCourseLabel {
        label: String,
    },
    NonDenseStudentId {
        at: usize,
        id: StudentId,
    },
    NonDenseCourseId {
        at: usize,
        id: CourseId,
    },
    ZeroCreditCourse {
        course: CourseId,
    },
    LowerQuotaAboveUpper {
        course: CourseId,
    },
    DuplicatePref {
        who: String,
    },
    UnknownRef {
        who: String,
    },
    /// `student` lists `course` but not vice versa, or the other way round.
    OneSidedListing {
        student: StudentId,
        course: CourseId,
    },
    /// A course's preference list contradicts the student master list (or a
    /// student's list contradicts the course master list).
    MasterListDisagreement {
        who: String,
    },
    MasterListMalformed {
        which: &'static str,
    },
    RuleRefersUnknownCourse,
    RuleOwnerUnknown,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateStudentLabel { label } => {
                write!(f, "duplicate student label {label:?}")
            }
            Violation::DuplicateCourseLabel { label } => {
                write!(f, "duplicate course label {label:?}")
            }
            Violation::NonDenseStudentId { at, id } => {
                write!(f, "student at position {at} has id {id}")
            }
            Violation::NonDenseCourseId { at, id } => {
                write!(f, "course at position {at} has id {id}")
            }
            Violation::ZeroCreditCourse { course } => write!(f, "{course} has zero credits"),
            Violation::LowerQuotaAboveUpper { course } => {
                write!(f, "{course} has lower quota above upper quota")
            }
            Violation::DuplicatePref { who } => write!(f, "{who} has a duplicated preference"),
            Violation::UnknownRef { who } => write!(f, "{who} refers to an unknown id"),
            Violation::OneSidedListing { student, course } => {
                write!(f, "one-sided listing between {student} and {course}")
            }
            Violation::MasterListDisagreement { who } => {
                write!(f, "{who} disagrees with the master list")
            }
            Violation::MasterListMalformed { which } => {
                write!(f, "master list of {which} is not a permutation")
            }
            Violation::RuleRefersUnknownCourse => write!(f, "rule refers to an unknown course"),
            Violation::RuleOwnerUnknown => write!(f, "rule owner is an unknown student"),
        }
    }
}

/// Checks every structural invariant of an instance and returns all
/// violations found; an empty list means the instance is valid. Violations
/// are data, not errors: a malformed instance is a legitimate thing to
/// inspect.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = inst.students.len();
    let m = inst.courses.len();

    let mut labels = BTreeSet::new();
    for (i, s) in inst.students.iter().enumerate() {
        if s.id.0 != i {
            out.push(Violation::NonDenseStudentId { at: i, id: s.id });
        }
        if !labels.insert(&s.label) {
            out.push(Violation::DuplicateStudentLabel {
                label: s.label.clone(),
            });
        }
    }
    let mut labels = BTreeSet::new();
    for (j, c) in inst.courses.iter().enumerate() {
        if c.id.0 != j {
            out.push(Violation::NonDenseCourseId { at: j, id: c.id });
        }
        if !labels.insert(&c.label) {
            out.push(Violation::DuplicateCourseLabel {
                label: c.label.clone(),
            });
        }
        if c.credits == 0 {
            out.push(Violation::ZeroCreditCourse { course: c.id });
        }
        if c.lower_quota > c.upper_quota {
            out.push(Violation::LowerQuotaAboveUpper { course: c.id });
        }
    }

    // Preference lists: known ids, no duplicates, mutual acceptability.
    for s in &inst.students {
        let mut seen = BTreeSet::new();
        for &c in &s.prefs {
            if c.0 >= m {
                out.push(Violation::UnknownRef {
                    who: s.label.clone(),
                });
                continue;
            }
            if !seen.insert(c) {
                out.push(Violation::DuplicatePref {
                    who: s.label.clone(),
                });
            }
            if inst.course_rank_of(c, s.id).is_none() {
                out.push(Violation::OneSidedListing {
                    student: s.id,
                    course: c,
                });
            }
        }
    }
    for c in &inst.courses {
        let mut seen = BTreeSet::new();
        for &s in &c.prefs {
            if s.0 >= n {
                out.push(Violation::UnknownRef {
                    who: c.label.clone(),
                });
                continue;
            }
            if !seen.insert(s) {
                out.push(Violation::DuplicatePref {
                    who: c.label.clone(),
                });
            }
            if inst.student_rank_of(s, c.id).is_none() {
                out.push(Violation::OneSidedListing {
                    student: s,
                    course: c.id,
                });
            }
        }
    }

    // Master lists must be permutations and every individual list on the
    // opposite side must be an order-preserving selection from them.
    if let Some(mls) = &inst.master_list_students {
        if mls.len() != n
            || mls.iter().map(|s| s.0).collect::<BTreeSet<_>>().len() != n
            || mls.iter().any(|s| s.0 >= n)
        {
            out.push(Violation::MasterListMalformed { which: "students" });
        } else {
            let mut pos = vec![0usize; n];
            for (p, &s) in mls.iter().enumerate() {
                pos[s.0] = p;
            }
            for c in &inst.courses {
                let ranks: Vec<usize> = c
                    .prefs
                    .iter()
                    .filter(|s| s.0 < n)
                    .map(|s| pos[s.0])
                    .collect();
                if ranks.windows(2).any(|w| w[0] >= w[1]) {
                    out.push(Violation::MasterListDisagreement {
                        who: c.label.clone(),
                    });
                }
            }
        }
    }
    if let Some(mlc) = &inst.master_list_courses {
        if mlc.len() != m
            || mlc.iter().map(|c| c.0).collect::<BTreeSet<_>>().len() != m
            || mlc.iter().any(|c| c.0 >= m)
        {
            out.push(Violation::MasterListMalformed { which: "courses" });
        } else {
            let mut pos = vec![0usize; m];
            for (p, &c) in mlc.iter().enumerate() {
                pos[c.0] = p;
            }
            for s in &inst.students {
                let ranks: Vec<usize> = s
                    .prefs
                    .iter()
                    .filter(|c| c.0 < m)
                    .map(|c| pos[c.0])
                    .collect();
                if ranks.windows(2).any(|w| w[0] >= w[1]) {
                    out.push(Violation::MasterListDisagreement {
                        who: s.label.clone(),
                    });
                }
            }
        }
    }

    for rule in &inst.rules {
        if let RuleOwner::Student(s) = rule.owner {
            if s.0 >= n {
                out.push(Violation::RuleOwnerUnknown);
            }
        }
        let group = match &rule.kind {
            RuleKind::ExcludedCombination(g) => g,
            RuleKind::AtMostKOfGroup { group, .. } => group,
        };
        if group.iter().any(|c| c.0 >= m) {
            out.push(Violation::RuleRefersUnknownCourse);
        }
    }

    out
}

/// Whether the course set `cs` is feasible for student `s` under the
/// instance's rules. Credit limits are not this function's business; they are
/// checked separately wherever matchings are validated.
pub fn is_feasible_set(
    inst: &Instance,
    s: StudentId,
    cs: &BTreeSet<CourseId>,
) -> Result<bool, ModelError> {
    inst.student(s)?;
    for &c in cs {
        inst.course(c)?;
    }
    Ok(inst
        .rules
        .iter()
        .filter(|r| r.applies_to(s))
        .all(|r| r.allows(cs)))
}

/// A matching: a set of acceptable student–course pairs. Pairs are stored
/// sorted and deduplicated, so equality is set equality and every matching
/// has one canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Matching {
    pairs: Vec<(StudentId, CourseId)>,
}

impl Matching {
    pub fn new(pairs: impl IntoIterator<Item = (StudentId, CourseId)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        Matching { pairs }
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    pub fn pairs(&self) -> &[(StudentId, CourseId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, s: StudentId, c: CourseId) -> bool {
        self.pairs.binary_search(&(s, c)).is_ok()
    }

    /// The courses student `s` is assigned to.
    pub fn courses_of(&self, s: StudentId) -> impl Iterator<Item = CourseId> + '_ {
        self.pairs
            .iter()
            .filter(move |(si, _)| *si == s)
            .map(|&(_, c)| c)
    }

    /// The students assigned to course `c`.
    pub fn students_of(&self, c: CourseId) -> impl Iterator<Item = StudentId> + '_ {
        self.pairs
            .iter()
            .filter(move |(_, cj)| *cj == c)
            .map(|&(s, _)| s)
    }

    pub fn course_set_of(&self, s: StudentId) -> BTreeSet<CourseId> {
        self.courses_of(s).collect()
    }

    /// Total credits student `s` is currently taking.
    pub fn assigned_credits(&self, inst: &Instance, s: StudentId) -> Credits {
        self.courses_of(s).map(|c| inst.courses[c.0].credits).sum()
    }

    pub fn with_pair(&self, s: StudentId, c: CourseId) -> Matching {
        let mut pairs = self.pairs.clone();
        pairs.push((s, c));
        Matching::new(pairs)
    }
}

/// The four stability notions, ordered by logical strength:
/// pair stability implies first-coalition stability, which implies coalition
/// stability, which implies pair-size stability. They differ in what a
/// deviating student may drop and what she may grab.
///
/// * `Pair` — she grabs one new course and may drop any set of courses she
///   likes less, even at a net loss of credits.
/// * `PairSize` — like `Pair`, but the new course must carry at least as many
///   credits as everything dropped.
/// * `Coalition` — she grabs a set of new courses, each preferred to every
///   dropped course, with no net credit loss.
/// * `FirstCoalition` — like `Coalition`, but only her favourite new course
///   must beat her favourite dropped course.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum StabilityNotion {
    Pair,
    PairSize,
    Coalition,
    FirstCoalition,
}

impl StabilityNotion {
    pub const ALL: [StabilityNotion; 4] = [
        StabilityNotion::Pair,
        StabilityNotion::PairSize,
        StabilityNotion::Coalition,
        StabilityNotion::FirstCoalition,
    ];

    /// The next-weaker notion in the implication chain
    /// Pair ⇒ FirstCoalition ⇒ Coalition ⇒ PairSize, if any.
    pub fn weaker(self) -> Option<StabilityNotion> {
        match self {
            StabilityNotion::Pair => Some(StabilityNotion::FirstCoalition),
            StabilityNotion::FirstCoalition => Some(StabilityNotion::Coalition),
            StabilityNotion::Coalition => Some(StabilityNotion::PairSize),
            StabilityNotion::PairSize => None,
        }
    }

    /// Whether the coalition of a blocking witness is restricted to a single
    /// course under this notion.
    pub fn is_pair_notion(self) -> bool {
        matches!(self, StabilityNotion::Pair | StabilityNotion::PairSize)
    }
}

impl fmt::Display for StabilityNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StabilityNotion::Pair => "pair",
            StabilityNotion::PairSize => "pair-size",
            StabilityNotion::Coalition => "coalition",
            StabilityNotion::FirstCoalition => "first-coalition",
        };
        f.write_str(name)
    }
}

/// Evidence that a matching is unstable: a student, the courses she would
/// grab (`coalition`), and the assigned courses she would drop (`drop_set`).
/// Both sets are sorted by the student's preference rank, best first. For the
/// pair notions the coalition is a single course.
///
/// A witness is only meaningful relative to an instance and matching;
/// [`crate::verify::check_witness`] replays the notion's conditions against
/// them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockingWitness {
    pub student: StudentId,
    pub coalition: Vec<CourseId>,
    pub drop_set: Vec<CourseId>,
    pub notion: StabilityNotion,
}

/// One way a pair set fails to be a matching for an instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MatchingViolation {
    UnknownStudent(StudentId),
    UnknownCourse(CourseId),
    UnacceptablePair(StudentId, CourseId),
    CreditLimitExceeded {
        student: StudentId,
        taken: Credits,
        limit: Credits,
    },
    UpperQuotaExceeded {
        course: CourseId,
        assigned: usize,
        quota: u32,
    },
    InfeasibleSet {
        student: StudentId,
    },
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingViolation::UnknownStudent(s) => write!(f, "unknown {s}"),
            MatchingViolation::UnknownCourse(c) => write!(f, "unknown {c}"),
            MatchingViolation::UnacceptablePair(s, c) => {
                write!(f, "pair ({s}, {c}) is not mutually acceptable")
            }
            MatchingViolation::CreditLimitExceeded {
                student,
                taken,
                limit,
            } => {
                write!(f, "{student} takes {taken} credits, over the limit {limit}")
            }
            MatchingViolation::UpperQuotaExceeded {
                course,
                assigned,
                quota,
            } => {
                write!(
                    f,
                    "{course} has {assigned} students, over the quota {quota}"
                )
            }
            MatchingViolation::InfeasibleSet { student } => {
                write!(f, "{student}'s course set violates a feasibility rule")
            }
        }
    }
}

/// Checks that `m` is a valid feasible matching for `inst`: every pair
/// acceptable, every student within her credit limit, every course within its
/// upper quota, every per-student course set feasible under the rules. Lower
/// quotas are deliberately not checked here; the solve layer owns those.
pub fn check_matching(inst: &Instance, m: &Matching) -> Vec<MatchingViolation> {
    let mut out = Vec::new();
    for &(s, c) in m.pairs() {
        if s.0 >= inst.students.len() {
            out.push(MatchingViolation::UnknownStudent(s));
            continue;
        }
        if c.0 >= inst.courses.len() {
            out.push(MatchingViolation::UnknownCourse(c));
            continue;
        }
        if !inst.acceptable(s, c) {
            out.push(MatchingViolation::UnacceptablePair(s, c));
        }
    }
    if !out.is_empty() {
        return out;
    }

    for s in &inst.students {
        let taken = m.assigned_credits(inst, s.id);
        if taken > s.credit_limit {
            out.push(MatchingViolation::CreditLimitExceeded {
                student: s.id,
                taken,
                limit: s.credit_limit,
            });
        }
        if !inst.rules.is_empty() {
            let set = m.course_set_of(s.id);
            if !is_feasible_set(inst, s.id, &set).unwrap_or(false) {
                out.push(MatchingViolation::InfeasibleSet { student: s.id });
            }
        }
    }
    for c in &inst.courses {
        let assigned = m.students_of(c.id).count();
        if assigned > c.upper_quota as usize {
            out.push(MatchingViolation::UpperQuotaExceeded {
                course: c.id,
                assigned,
                quota: c.upper_quota,
            });
        }
    }
    out
}

/// Size and completeness summary of a matching.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MatchingSize {
    /// Total credits taken: sum over courses of credits × enrolment.
    pub credits: u64,
    /// Every course is filled to its upper quota.
    pub course_complete: bool,
    /// Every student is at exactly her credit limit.
    pub student_complete: bool,
}

/// Computes the size of a matching (total credits taken) together with the
/// course-complete and student-complete flags.
pub fn matching_size(inst: &Instance, m: &Matching) -> MatchingSize {
    let mut credits: u64 = 0;
    let mut course_complete = true;
    for c in &inst.courses {
        let assigned = m.students_of(c.id).count();
        credits += c.credits as u64 * assigned as u64;
        if assigned < c.upper_quota as usize {
            course_complete = false;
        }
    }
    let student_complete = inst
        .students
        .iter()
        .all(|s| m.assigned_credits(inst, s.id) == s.credit_limit);
    MatchingSize {
        credits,
        course_complete,
        student_complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::fixtures;

    fn fig1() -> (Instance, Matching) {
        let f = &fixtures()["fig1"];
        (f.instance.clone(), f.matching.clone().unwrap())
    }

    fn sid(inst: &Instance, label: &str) -> StudentId {
        inst.student_by_label(label).unwrap().id
    }

    fn cid(inst: &Instance, label: &str) -> CourseId {
        inst.course_by_label(label).unwrap().id
    }

    #[test]
    fn valid_fixture_has_no_violations() {
        let (inst, _) = fig1();
        assert_eq!(validate_instance(&inst), vec![]);
    }

    #[test]
    fn one_sided_listing_is_flagged() {
        let (mut inst, _) = fig1();
        // Drop c3's only listed student while s1 still lists c3.
        let c3 = cid(&inst, "c3");
        inst.courses[c3.0].prefs.clear();
        let viols = validate_instance(&inst);
        assert_eq!(
            viols,
            vec![Violation::OneSidedListing {
                student: sid(&inst, "s1"),
                course: c3
            }]
        );
    }

    #[test]
    fn master_list_disagreement_is_flagged() {
        let (mut inst, _) = fig1();
        // c1 ranks s2 above s1, contradicting the master list s1 ≻ s2.
        inst.master_list_students = Some(vec![StudentId(0), StudentId(1)]);
        let viols = validate_instance(&inst);
        assert_eq!(
            viols,
            vec![Violation::MasterListDisagreement { who: "c1".into() }]
        );
    }

    #[test]
    fn feasible_set_with_no_rules_is_always_true() {
        let (inst, _) = fig1();
        let s1 = sid(&inst, "s1");
        let all: BTreeSet<_> = inst.students[s1.0].prefs.iter().copied().collect();
        assert!(is_feasible_set(&inst, s1, &all).unwrap());
        assert!(is_feasible_set(&inst, s1, &BTreeSet::new()).unwrap());
    }

    #[test]
    fn excluded_combination_semantics() {
        let (mut inst, _) = fig1();
        let (c1, c2) = (cid(&inst, "c1"), cid(&inst, "c2"));
        inst.rules.push(FeasibilityRule {
            kind: RuleKind::ExcludedCombination([c1, c2].into()),
            owner: RuleOwner::All,
        });
        let s1 = sid(&inst, "s1");
        assert!(!is_feasible_set(&inst, s1, &[c1, c2].into()).unwrap());
        assert!(is_feasible_set(&inst, s1, &[c1].into()).unwrap());
    }

    #[test]
    fn at_most_k_semantics() {
        let (mut inst, _) = fig1();
        let (c1, c2, c3) = (cid(&inst, "c1"), cid(&inst, "c2"), cid(&inst, "c3"));
        inst.rules.push(FeasibilityRule {
            kind: RuleKind::AtMostKOfGroup {
                k: 1,
                group: [c1, c2, c3].into(),
            },
            owner: RuleOwner::All,
        });
        let s1 = sid(&inst, "s1");
        assert!(!is_feasible_set(&inst, s1, &[c1, c2].into()).unwrap());
        assert!(is_feasible_set(&inst, s1, &[c2].into()).unwrap());
    }

    #[test]
    fn rules_owned_by_other_students_do_not_apply() {
        let (mut inst, _) = fig1();
        let (c1, c2) = (cid(&inst, "c1"), cid(&inst, "c2"));
        let s2 = sid(&inst, "s2");
        inst.rules.push(FeasibilityRule {
            kind: RuleKind::ExcludedCombination([c1, c2].into()),
            owner: RuleOwner::Student(s2),
        });
        let s1 = sid(&inst, "s1");
        assert!(is_feasible_set(&inst, s1, &[c1, c2].into()).unwrap());
        assert!(!is_feasible_set(&inst, s2, &[c1, c2].into()).unwrap());
    }

    #[test]
    fn unknown_ids_error() {
        let (inst, _) = fig1();
        assert!(is_feasible_set(&inst, StudentId(99), &BTreeSet::new()).is_err());
        assert!(is_feasible_set(&inst, StudentId(0), &[CourseId(99)].into()).is_err());
    }

    #[test]
    fn highlighted_matching_is_valid() {
        let (inst, m) = fig1();
        assert_eq!(check_matching(&inst, &m), vec![]);
    }

    #[test]
    fn credit_limit_violation_detected() {
        let (inst, _) = fig1();
        // s1 taking c1 (1 credit) and c3 (2 credits) exceeds her limit of 2.
        let m = Matching::new([
            (sid(&inst, "s1"), cid(&inst, "c1")),
            (sid(&inst, "s1"), cid(&inst, "c3")),
        ]);
        let viols = check_matching(&inst, &m);
        assert_eq!(
            viols,
            vec![MatchingViolation::CreditLimitExceeded {
                student: sid(&inst, "s1"),
                taken: 3,
                limit: 2,
            }]
        );
    }

    #[test]
    fn quota_violation_detected() {
        let (inst, _) = fig1();
        let m = Matching::new([
            (sid(&inst, "s2"), cid(&inst, "c2")),
            (sid(&inst, "s1"), cid(&inst, "c2")),
        ]);
        let viols = check_matching(&inst, &m);
        assert_eq!(
            viols,
            vec![MatchingViolation::UpperQuotaExceeded {
                course: cid(&inst, "c2"),
                assigned: 2,
                quota: 1,
            }]
        );
    }

    #[test]
    fn size_counts_credits_not_pairs() {
        let (inst, m) = fig1();
        let size = matching_size(&inst, &m);
        assert_eq!(size.credits, 3); // c3 (2 credits) + c2 (1 credit)
        assert!(!size.course_complete); // c1 is empty
        assert!(size.student_complete); // s1 at 2/2, s2 at 1/1
    }

    #[test]
    fn empty_matching_has_size_zero() {
        let (inst, _) = fig1();
        let size = matching_size(&inst, &Matching::empty());
        assert_eq!(size.credits, 0);
        assert!(!size.course_complete);
        assert!(!size.student_complete);
    }

    #[test]
    fn partial_matching_is_not_student_complete() {
        let (inst, _) = fig1();
        let m = Matching::new([
            (sid(&inst, "s1"), cid(&inst, "c1")),
            (sid(&inst, "s2"), cid(&inst, "c2")),
        ]);
        let size = matching_size(&inst, &m);
        assert_eq!(size.credits, 2);
        assert!(!size.student_complete); // s1 holds 1 of 2 credits
    }

    #[test]
    fn matchings_are_canonical_sets() {
        let a = Matching::new([(StudentId(1), CourseId(0)), (StudentId(0), CourseId(2))]);
        let b = Matching::new([
            (StudentId(0), CourseId(2)),
            (StudentId(1), CourseId(0)),
            (StudentId(1), CourseId(0)),
        ]);
        assert_eq!(a, b);
        assert_eq!(
            a.pairs(),
            &[(StudentId(0), CourseId(2)), (StudentId(1), CourseId(0))]
        );
    }

    #[test]
    fn two_size_summations_agree() {
        // Size computed course-wise equals the student-wise credit total.
        let (inst, m) = fig1();
        let by_students: u64 = inst
            .students
            .iter()
            .map(|s| m.assigned_credits(&inst, s.id) as u64)
            .sum();
        assert_eq!(matching_size(&inst, &m).credits, by_students);
    }
}

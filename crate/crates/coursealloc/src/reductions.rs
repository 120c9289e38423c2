//! Instance factories: the worked examples shared by the documentation and
//! tests, encoders that embed classic matching and packing problems into
//! course allocation, and a seeded random generator for property tests.
//!
//! Each encoder mirrors a hardness construction: it emits an instance whose
//! stable matchings (under the relevant notion) correspond exactly to the
//! solutions of the source problem. The `*_forward_matching` helpers build
//! the matching that a known source solution induces, so tests can replay
//! the forward guarantee through the verifiers; the reverse directions are
//! exercised against the brute-force oracle on instances small enough to
//! enumerate. Every emitted instance passes
//! [`validate_instance`](crate::model::validate_instance).
//!
//! Encoders in this module:
//!
//! - [`gadget_subset_sum`]: one student over singleton courses; the fixed
//!   matching is size/coalition/first-coalition-unstable exactly when some
//!   subset of the element sizes hits the target.
//! - [`reduce_hrs`]: hospitals/residents with sizes, either as a direct
//!   renaming (pair stability) or with a one-credit dummy course per student
//!   (first-coalition stability).
//! - [`reduce_smti_coalition`] and [`smti_fc_distinct_credits`]: stable
//!   marriage with two-element ties in the women's master list, turned into
//!   master-list instances whose course-complete stable matchings are the
//!   complete weakly stable marriages.
//! - [`reduce_minmm_fc`] and [`reduce_exactmm`]: bounded-size maximal
//!   matching questions on bipartite graphs whose W-vertices have degree
//!   two, encoded so that course- or student-complete stable matchings exist
//!   exactly when a maximal matching of the target size does.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    Course, CourseId, Credits, FeasibilityRule, Instance, Matching, RuleKind, RuleOwner, Student,
    StudentId,
};

/// Why an encoder rejected its input.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ReductionError {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("{owner} lists unknown name {name:?}")]
    UnknownName { owner: String, name: String },
    #[error("preference list of {0} contains a repeated name")]
    RepeatedPref(String),
    #[error("{a} and {b} do not list each other consistently")]
    OneSidedListing { a: String, b: String },
    #[error("resident {label} has size {size}; only sizes 1 and 2 are supported")]
    ResidentSize { label: String, size: Credits },
    #[error("hospital {label} has quota {quota}; this encoding needs quotas {expected}")]
    HospitalQuota {
        label: String,
        quota: u32,
        expected: &'static str,
    },
    #[error("preference list of {label} has {len} entries; the encoding allows at most {cap}")]
    ListTooLong {
        label: String,
        len: usize,
        cap: usize,
    },
    #[error("master list of the {side} is malformed: {reason}")]
    BadMasterList { side: &'static str, reason: String },
    #[error("a tie in the preference list of {label} is not a master-list tie")]
    BadTie { label: String },
    #[error("preference list of {label} does not follow the master list")]
    MasterListOrder { label: String },
    #[error("edge ({u}, {w}) is out of range or duplicated")]
    BadEdge { u: usize, w: usize },
    #[error("vertex w{index} has degree {degree}; the gadget needs degree exactly 2")]
    DegreeNotTwo { index: usize, degree: usize },
    #[error("target size {k} must be between 1 and {bound}")]
    TargetOutOfRange { k: usize, bound: usize },
    #[error("the supplied edge set is not a matching of the graph")]
    NotAMatching,
    #[error("supplied matching has size {got}; the gadget was built for size {expected}")]
    ForwardSizeMismatch { got: usize, expected: usize },
    #[error("supplied matching is not maximal: edge ({u}, {w}) is uncovered")]
    NotMaximal { u: usize, w: usize },
}

// ---------------------------------------------------------------------------
// Label-based construction
// ---------------------------------------------------------------------------

/// Accumulates an instance as label strings and resolves them to dense ids at
/// the end. Panics on a dangling label: every encoder writes both sides of
/// each listing itself, so a miss is a bug in the encoder, not bad input.
#[derive(Default)]
struct Builder {
    students: Vec<(String, Credits, Vec<String>)>,
    courses: Vec<(String, Credits, u32, u32, Vec<String>)>,
    master_students: Option<Vec<String>>,
    master_courses: Option<Vec<String>>,
}

impl Builder {
    fn student(&mut self, label: impl Into<String>, limit: Credits, prefs: Vec<String>) {
        self.students.push((label.into(), limit, prefs));
    }

    fn course(
        &mut self,
        label: impl Into<String>,
        credits: Credits,
        upper: u32,
        lower: u32,
        prefs: Vec<String>,
    ) {
        self.courses
            .push((label.into(), credits, upper, lower, prefs));
    }

    fn build(self) -> Instance {
        let Builder {
            students,
            courses,
            master_students,
            master_courses,
        } = self;
        let sidx: BTreeMap<String, usize> = students
            .iter()
            .enumerate()
            .map(|(i, (l, ..))| (l.clone(), i))
            .collect();
        let cidx: BTreeMap<String, usize> = courses
            .iter()
            .enumerate()
            .map(|(j, (l, ..))| (l.clone(), j))
            .collect();
        let sid = |l: &str| {
            StudentId(
                *sidx
                    .get(l)
                    .unwrap_or_else(|| panic!("unknown student label {l:?}")),
            )
        };
        let cid = |l: &str| {
            CourseId(
                *cidx
                    .get(l)
                    .unwrap_or_else(|| panic!("unknown course label {l:?}")),
            )
        };
        Instance {
            students: students
                .into_iter()
                .enumerate()
                .map(|(i, (label, credit_limit, prefs))| Student {
                    id: StudentId(i),
                    label,
                    credit_limit,
                    prefs: prefs.iter().map(|l| cid(l)).collect(),
                })
                .collect(),
            courses: courses
                .into_iter()
                .enumerate()
                .map(
                    |(j, (label, credits, upper_quota, lower_quota, prefs))| Course {
                        id: CourseId(j),
                        label,
                        credits,
                        upper_quota,
                        lower_quota,
                        prefs: prefs.iter().map(|l| sid(l)).collect(),
                    },
                )
                .collect(),
            master_list_students: master_students.map(|v| v.iter().map(|l| sid(l)).collect()),
            master_list_courses: master_courses.map(|v| v.iter().map(|l| cid(l)).collect()),
            rules: Vec::new(),
        }
    }
}

fn index_labels<'a>(
    labels: impl Iterator<Item = &'a str>,
) -> Result<BTreeMap<String, usize>, ReductionError> {
    let mut map = BTreeMap::new();
    for (i, l) in labels.enumerate() {
        if map.insert(l.to_string(), i).is_some() {
            return Err(ReductionError::DuplicateLabel(l.to_string()));
        }
    }
    Ok(map)
}

/// Resolves label pairs against an emitted instance. Used by the forward
/// constructors, where a miss means the caller paired a matching with an
/// instance from a different input.
fn matching_by_labels(
    inst: &Instance,
    pairs: impl IntoIterator<Item = (String, String)>,
) -> Result<Matching, ReductionError> {
    let mut resolved = Vec::new();
    for (s, c) in pairs {
        let student = inst
            .student_by_label(&s)
            .ok_or_else(|| ReductionError::UnknownName {
                owner: "the forward matching".into(),
                name: s.clone(),
            })?;
        let course = inst
            .course_by_label(&c)
            .ok_or_else(|| ReductionError::UnknownName {
                owner: "the forward matching".into(),
                name: c.clone(),
            })?;
        resolved.push((student.id, course.id));
    }
    Ok(Matching::new(resolved))
}

// ---------------------------------------------------------------------------
// Subset sum
// ---------------------------------------------------------------------------

/// A multiset of positive element sizes plus a positive target sum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubsetSumInput {
    pub sizes: Vec<Credits>,
    pub target: Credits,
}

/// Encodes a subset-sum question as a stability-verification question.
///
/// One student `s` with limit `Σ sizes` ranks a fresh course `b` (worth
/// `target` credits) first and then one course per element, each with upper
/// quota 1 and credits equal to the element size. The returned matching
/// assigns `s` to every element course, so her credits are exactly at the
/// limit and `(s, b)` is the only pair not matched. Swapping in `b` without
/// losing credits means dropping a course set worth exactly `target`, so the
/// matching is size-blocking (equivalently coalition- or first-coalition-
/// blocking) precisely when a subset of the sizes sums to the target.
pub fn gadget_subset_sum(x: &SubsetSumInput) -> (Instance, Matching) {
    assert!(
        !x.sizes.is_empty(),
        "subset-sum input needs at least one element"
    );
    assert!(
        x.target >= 1 && x.sizes.iter().all(|&s| s >= 1),
        "subset-sum sizes and target must be positive"
    );
    let element_labels: Vec<String> = (1..=x.sizes.len()).map(|i| format!("c{i}")).collect();
    let mut prefs = vec!["b".to_string()];
    prefs.extend(element_labels.iter().cloned());

    let mut b = Builder::default();
    b.student("s", x.sizes.iter().sum(), prefs);
    b.course("b", x.target, 1, 0, vec!["s".into()]);
    for (label, &size) in element_labels.iter().zip(&x.sizes) {
        b.course(label.clone(), size, 1, 0, vec!["s".into()]);
    }
    let inst = b.build();
    let s = inst.students[0].id;
    let m = Matching::new(
        inst.courses
            .iter()
            .filter(|c| c.label != "b")
            .map(|c| (s, c.id)),
    );
    (inst, m)
}

// ---------------------------------------------------------------------------
// Hospitals/residents with sizes
// ---------------------------------------------------------------------------

/// A resident occupying one or two posts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HrsResident {
    pub label: String,
    pub size: Credits,
    /// Hospital labels, most preferred first.
    pub prefs: Vec<String>,
}

/// A hospital with a post quota.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HrsHospital {
    pub label: String,
    pub quota: u32,
    /// Resident labels, most preferred first.
    pub prefs: Vec<String>,
}

/// A hospitals/residents instance where residents have sizes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HrsInput {
    pub residents: Vec<HrsResident>,
    pub hospitals: Vec<HrsHospital>,
}

/// Which stability notion the emitted instance targets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HrsMode {
    /// Direct renaming: hospital `i` becomes student `s{i}` with limit equal
    /// to its quota, resident `j` becomes course `c{j}` with credits equal
    /// to its size. Stability on the source side is pair stability here.
    Pair,
    /// Same renaming with every quota pinned to 2, plus a one-credit dummy
    /// course `d{i}` (upper quota 1, listing only `s{i}`) appended to the
    /// end of each student's list. The source has a stable assignment
    /// exactly when this instance has a first-coalition-stable matching.
    FirstCoalition,
}

/// Maximum preference-list length the hospitals/residents encodings accept.
const HRS_LIST_CAP: usize = 3;

/// Label-to-index maps for the two sides of a two-sided input.
type SideIndexes = (BTreeMap<String, usize>, BTreeMap<String, usize>);

fn validate_hrs(inp: &HrsInput, mode: HrsMode) -> Result<SideIndexes, ReductionError> {
    let res = index_labels(inp.residents.iter().map(|r| r.label.as_str()))?;
    let hos = index_labels(inp.hospitals.iter().map(|h| h.label.as_str()))?;
    for r in &inp.residents {
        if !(1..=2).contains(&r.size) {
            return Err(ReductionError::ResidentSize {
                label: r.label.clone(),
                size: r.size,
            });
        }
        if r.prefs.len() > HRS_LIST_CAP {
            return Err(ReductionError::ListTooLong {
                label: r.label.clone(),
                len: r.prefs.len(),
                cap: HRS_LIST_CAP,
            });
        }
        let mut seen = BTreeSet::new();
        for h in &r.prefs {
            let &i = hos
                .get(h.as_str())
                .ok_or_else(|| ReductionError::UnknownName {
                    owner: r.label.clone(),
                    name: h.clone(),
                })?;
            if !seen.insert(i) {
                return Err(ReductionError::RepeatedPref(r.label.clone()));
            }
            if !inp.hospitals[i].prefs.contains(&r.label) {
                return Err(ReductionError::OneSidedListing {
                    a: r.label.clone(),
                    b: h.clone(),
                });
            }
        }
    }
    for h in &inp.hospitals {
        let quota_ok = match mode {
            HrsMode::Pair => (1..=2).contains(&h.quota),
            HrsMode::FirstCoalition => h.quota == 2,
        };
        if !quota_ok {
            let expected = match mode {
                HrsMode::Pair => "1 or 2",
                HrsMode::FirstCoalition => "exactly 2",
            };
            return Err(ReductionError::HospitalQuota {
                label: h.label.clone(),
                quota: h.quota,
                expected,
            });
        }
        if h.prefs.len() > HRS_LIST_CAP {
            return Err(ReductionError::ListTooLong {
                label: h.label.clone(),
                len: h.prefs.len(),
                cap: HRS_LIST_CAP,
            });
        }
        let mut seen = BTreeSet::new();
        for r in &h.prefs {
            let &j = res
                .get(r.as_str())
                .ok_or_else(|| ReductionError::UnknownName {
                    owner: h.label.clone(),
                    name: r.clone(),
                })?;
            if !seen.insert(j) {
                return Err(ReductionError::RepeatedPref(h.label.clone()));
            }
            if !inp.residents[j].prefs.contains(&h.label) {
                return Err(ReductionError::OneSidedListing {
                    a: h.label.clone(),
                    b: r.clone(),
                });
            }
        }
    }
    Ok((res, hos))
}

/// Renames a hospitals/residents instance into a course-allocation instance;
/// see [`HrsMode`] for the two variants. Hospital `i` (in input order,
/// 1-based) becomes `s{i}` and resident `j` becomes `c{j}`, so the labels of
/// the source instance do not leak into the output.
pub fn reduce_hrs(inp: &HrsInput, mode: HrsMode) -> Result<Instance, ReductionError> {
    let (res, hos) = validate_hrs(inp, mode)?;
    let mut b = Builder::default();
    for (i, h) in inp.hospitals.iter().enumerate() {
        let mut prefs: Vec<String> = h
            .prefs
            .iter()
            .map(|r| format!("c{}", res[r.as_str()] + 1))
            .collect();
        if mode == HrsMode::FirstCoalition {
            prefs.push(format!("d{}", i + 1));
        }
        b.student(format!("s{}", i + 1), h.quota, prefs);
    }
    for (j, r) in inp.residents.iter().enumerate() {
        let prefs = r
            .prefs
            .iter()
            .map(|h| format!("s{}", hos[h.as_str()] + 1))
            .collect();
        b.course(format!("c{}", j + 1), r.size, 1, 0, prefs);
    }
    if mode == HrsMode::FirstCoalition {
        for i in 1..=inp.hospitals.len() {
            b.course(format!("d{i}"), 1, 1, 0, vec![format!("s{i}")]);
        }
    }
    Ok(b.build())
}

// ---------------------------------------------------------------------------
// Stable marriage with ties in the women's master list
// ---------------------------------------------------------------------------

/// A man whose preference list may contain ties.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmtiMan {
    pub label: String,
    /// Tie groups, most preferred first. A group holds one or two women; a
    /// two-woman group must be exactly a tie of the women's master list.
    pub prefs: Vec<Vec<String>>,
}

/// A woman with a strict preference list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmtiWoman {
    pub label: String,
    pub prefs: Vec<String>,
}

/// A stable-marriage instance with master lists on both sides, where ties
/// (all of length two) occur only in the women's master list. Every
/// preference list must be an order-preserving selection from the other
/// side's master list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmtiInput {
    pub men: Vec<SmtiMan>,
    pub women: Vec<SmtiWoman>,
    /// Strict master list of the men.
    pub men_master: Vec<String>,
    /// Master list of the women as tie groups of size one or two.
    pub women_master: Vec<Vec<String>>,
}

/// Index maps and master-list positions computed by [`validate_smti`].
struct SmtiShape {
    midx: BTreeMap<String, usize>,
    widx: BTreeMap<String, usize>,
    /// Women's master-list groups as input indices, in list order.
    groups: Vec<Vec<usize>>,
    /// For each woman: (group index, position within the group).
    group_of: Vec<(usize, usize)>,
}

fn validate_smti(inp: &SmtiInput) -> Result<SmtiShape, ReductionError> {
    let midx = index_labels(inp.men.iter().map(|m| m.label.as_str()))?;
    let widx = index_labels(inp.women.iter().map(|w| w.label.as_str()))?;

    // The men's master list: a strict permutation.
    let mut man_pos = vec![usize::MAX; inp.men.len()];
    if inp.men_master.len() != inp.men.len() {
        return Err(ReductionError::BadMasterList {
            side: "men",
            reason: "it is not a permutation of the men".into(),
        });
    }
    for (p, l) in inp.men_master.iter().enumerate() {
        let &i = midx
            .get(l.as_str())
            .ok_or_else(|| ReductionError::BadMasterList {
                side: "men",
                reason: format!("unknown name {l:?}"),
            })?;
        if man_pos[i] != usize::MAX {
            return Err(ReductionError::BadMasterList {
                side: "men",
                reason: format!("{l:?} appears twice"),
            });
        }
        man_pos[i] = p;
    }

    // The women's master list: groups of one or two covering every woman.
    let mut group_of = vec![(usize::MAX, 0); inp.women.len()];
    let mut groups = Vec::new();
    for group in &inp.women_master {
        if group.is_empty() || group.len() > 2 {
            return Err(ReductionError::BadMasterList {
                side: "women",
                reason: format!("a tie has length {}", group.len()),
            });
        }
        let mut members = Vec::new();
        for (pos, l) in group.iter().enumerate() {
            let &w = widx
                .get(l.as_str())
                .ok_or_else(|| ReductionError::BadMasterList {
                    side: "women",
                    reason: format!("unknown name {l:?}"),
                })?;
            if group_of[w].0 != usize::MAX {
                return Err(ReductionError::BadMasterList {
                    side: "women",
                    reason: format!("{l:?} appears twice"),
                });
            }
            group_of[w] = (groups.len(), pos);
            members.push(w);
        }
        groups.push(members);
    }
    if group_of.iter().any(|&(g, _)| g == usize::MAX) {
        return Err(ReductionError::BadMasterList {
            side: "women",
            reason: "it is not a permutation of the women".into(),
        });
    }

    // Women's lists: strict, mutual, ordered like the men's master list.
    for wmn in &inp.women {
        let mut last_pos = None;
        for l in &wmn.prefs {
            let &m = widx_get(&midx, &wmn.label, l)?;
            let pos = man_pos[m];
            if last_pos.is_some_and(|p| pos <= p) {
                return Err(ReductionError::MasterListOrder {
                    label: wmn.label.clone(),
                });
            }
            last_pos = Some(pos);
            if !inp.men[m].prefs.iter().flatten().any(|x| x == &wmn.label) {
                return Err(ReductionError::OneSidedListing {
                    a: wmn.label.clone(),
                    b: l.clone(),
                });
            }
        }
    }

    // Men's lists: tie groups that are master-list ties, mutual, ordered
    // like the women's master list. Equal consecutive group indices also
    // catch a master-list tie written as two singletons.
    for man in &inp.men {
        let mut last_group = None;
        let mut seen = BTreeSet::new();
        for group in &man.prefs {
            if group.is_empty() || group.len() > 2 {
                return Err(ReductionError::BadTie {
                    label: man.label.clone(),
                });
            }
            let mut gidx = None;
            for l in group {
                let &w = widx_get(&widx, &man.label, l)?;
                if !seen.insert(w) {
                    return Err(ReductionError::RepeatedPref(man.label.clone()));
                }
                match gidx {
                    None => gidx = Some(group_of[w].0),
                    Some(g) if g != group_of[w].0 => {
                        return Err(ReductionError::BadTie {
                            label: man.label.clone(),
                        })
                    }
                    Some(_) => {}
                }
                if !inp.women[w].prefs.contains(&man.label) {
                    return Err(ReductionError::OneSidedListing {
                        a: man.label.clone(),
                        b: l.clone(),
                    });
                }
            }
            let g = gidx.expect("group is nonempty");
            if group.len() == 2 && groups[g].len() != 2 {
                return Err(ReductionError::BadTie {
                    label: man.label.clone(),
                });
            }
            if last_group.is_some_and(|lg| g <= lg) {
                return Err(ReductionError::MasterListOrder {
                    label: man.label.clone(),
                });
            }
            last_group = Some(g);
        }
    }

    Ok(SmtiShape {
        midx,
        widx,
        groups,
        group_of,
    })
}

fn widx_get<'a>(
    map: &'a BTreeMap<String, usize>,
    owner: &str,
    name: &str,
) -> Result<&'a usize, ReductionError> {
    map.get(name).ok_or_else(|| ReductionError::UnknownName {
        owner: owner.to_string(),
        name: name.to_string(),
    })
}

/// Encodes complete weakly stable marriage as course-complete coalition
/// stability.
///
/// Woman `j` (input order, 1-based) becomes course `c{j}` with upper quota 1.
/// An untied woman's course carries two credits. In a master-list tie the
/// first woman becomes a one-credit course and the second a two-credit one,
/// and the one-credit course gets a one-credit companion `c{j}_p` with the
/// same preference list; the course master list ranks the triple
/// one-credit, two-credit, companion. Man `i` becomes student `s{i}` with
/// limit 2. A tie on his list expands to that same triple; a lone tied
/// one-credit woman expands to her course followed by its companion. Under
/// coalition stability a student is then indifferent between holding the
/// two-credit course and holding both one-credit courses, which is exactly
/// the tie the source instance expresses.
pub fn reduce_smti_coalition(inp: &SmtiInput) -> Result<Instance, ReductionError> {
    let shape = validate_smti(inp)?;
    // The first woman of each master-list tie is the one-credit course.
    let credit: Vec<Credits> = (0..inp.women.len())
        .map(|w| {
            let (g, pos) = shape.group_of[w];
            if shape.groups[g].len() == 2 && pos == 0 {
                1
            } else {
                2
            }
        })
        .collect();
    let main = |w: usize| format!("c{}", w + 1);
    let companion = |w: usize| format!("c{}_p", w + 1);

    let mut b = Builder::default();
    for (i, man) in inp.men.iter().enumerate() {
        let mut prefs = Vec::new();
        for group in &man.prefs {
            let ws: Vec<usize> = group.iter().map(|l| shape.widx[l.as_str()]).collect();
            if let [w] = ws[..] {
                prefs.push(main(w));
                if credit[w] == 1 {
                    prefs.push(companion(w));
                }
            } else {
                let (one, two) = if credit[ws[0]] == 1 {
                    (ws[0], ws[1])
                } else {
                    (ws[1], ws[0])
                };
                prefs.push(main(one));
                prefs.push(main(two));
                prefs.push(companion(one));
            }
        }
        b.student(format!("s{}", i + 1), 2, prefs);
    }
    for (w, wmn) in inp.women.iter().enumerate() {
        let prefs: Vec<String> = wmn
            .prefs
            .iter()
            .map(|l| format!("s{}", shape.midx[l.as_str()] + 1))
            .collect();
        b.course(main(w), credit[w], 1, 0, prefs.clone());
        if credit[w] == 1 {
            b.course(companion(w), 1, 1, 0, prefs);
        }
    }
    b.master_students = Some(
        inp.men_master
            .iter()
            .map(|l| format!("s{}", shape.midx[l.as_str()] + 1))
            .collect(),
    );
    let mut mlc = Vec::new();
    for group in &shape.groups {
        if let [w] = group[..] {
            mlc.push(main(w));
        } else {
            mlc.push(main(group[0]));
            mlc.push(main(group[1]));
            mlc.push(companion(group[0]));
        }
    }
    b.master_courses = Some(mlc);
    Ok(b.build())
}

/// Encodes complete weakly stable marriage as course-complete
/// first-coalition (and pair-size) stability, by giving any two courses
/// different credit values.
///
/// Woman `j` becomes course `c{j}` with upper quota 1. Ordering courses by
/// the flattened women's master list, position `p` (1-based, out of `n`)
/// would carry `n + (n - p + 1)` credits; the two members of each tie then
/// swap values, so a strictly higher-ranked course always carries more
/// credits while the earlier member of a tie carries fewer. Students have
/// limit `2n`: enough for any single course, never enough for two. (These
/// are the integer values of the construction with credit unit `1/n`,
/// scaled by `n`.)
pub fn smti_fc_distinct_credits(inp: &SmtiInput) -> Result<Instance, ReductionError> {
    let shape = validate_smti(inp)?;
    let n = inp.women.len() as Credits;
    let flattened: Vec<usize> = shape.groups.iter().flatten().copied().collect();
    let mut credit = vec![0; inp.women.len()];
    for (p, &w) in flattened.iter().enumerate() {
        credit[w] = n + (n - p as Credits);
    }
    for group in &shape.groups {
        if let [a, b] = group[..] {
            credit.swap(a, b);
        }
    }
    let main = |w: usize| format!("c{}", w + 1);

    let mut b = Builder::default();
    for (i, man) in inp.men.iter().enumerate() {
        let mut prefs = Vec::new();
        for group in &man.prefs {
            let mut ws: Vec<usize> = group.iter().map(|l| shape.widx[l.as_str()]).collect();
            // A full tie appears in master-list order.
            ws.sort_by_key(|&w| shape.group_of[w].1);
            prefs.extend(ws.into_iter().map(main));
        }
        b.student(format!("s{}", i + 1), 2 * n, prefs);
    }
    for (w, wmn) in inp.women.iter().enumerate() {
        let prefs = wmn
            .prefs
            .iter()
            .map(|l| format!("s{}", shape.midx[l.as_str()] + 1))
            .collect();
        b.course(main(w), credit[w], 1, 0, prefs);
    }
    b.master_students = Some(
        inp.men_master
            .iter()
            .map(|l| format!("s{}", shape.midx[l.as_str()] + 1))
            .collect(),
    );
    b.master_courses = Some(flattened.into_iter().map(main).collect());
    Ok(b.build())
}

// ---------------------------------------------------------------------------
// Maximal-matching gadgets
// ---------------------------------------------------------------------------

/// A bipartite graph (vertex sets `U` and `W`, 0-based indices) plus a
/// target matching size. The maximal-matching encoders require every
/// W-vertex to have degree exactly two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphInput {
    pub n_u: usize,
    pub n_w: usize,
    /// Edges as `(u, w)` index pairs.
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
}

/// Which question [`reduce_exactmm`] encodes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExactMmMode {
    /// A maximal matching of size exactly `k` exists iff the emitted
    /// instance has a student-complete pair-size-stable matching.
    PairSize,
    /// A maximal matching of size exactly `k` exists iff the emitted
    /// instance has a student-complete pair-stable matching that respects
    /// lower quotas, closing undersubscribed courses.
    LqClosures,
}

/// Per W-vertex, its two neighbours in ascending order; per U-vertex, its
/// neighbours in ascending order.
type Adjacency = (Vec<[usize; 2]>, Vec<Vec<usize>>);

/// Validates the graph and computes both adjacency views.
fn graph_adjacency(g: &GraphInput) -> Result<Adjacency, ReductionError> {
    let mut seen = BTreeSet::new();
    let mut w_neighbours = vec![Vec::new(); g.n_w];
    let mut u_neighbours = vec![Vec::new(); g.n_u];
    for &(u, w) in &g.edges {
        if u >= g.n_u || w >= g.n_w || !seen.insert((u, w)) {
            return Err(ReductionError::BadEdge { u, w });
        }
        w_neighbours[w].push(u);
        u_neighbours[u].push(w);
    }
    let mut w_pairs = Vec::with_capacity(g.n_w);
    for (i, mut ns) in w_neighbours.into_iter().enumerate() {
        ns.sort_unstable();
        match ns[..] {
            [a, b] => w_pairs.push([a, b]),
            _ => {
                return Err(ReductionError::DegreeNotTwo {
                    index: i + 1,
                    degree: ns.len(),
                })
            }
        }
    }
    for ns in &mut u_neighbours {
        ns.sort_unstable();
    }
    Ok((w_pairs, u_neighbours))
}

fn check_target(k: usize, bound: usize) -> Result<(), ReductionError> {
    if k < 1 || k > bound {
        return Err(ReductionError::TargetOutOfRange { k, bound });
    }
    Ok(())
}

// Labels shared by the maximal-matching gadgets; indices are 0-based.
fn s_lbl(i: usize, r: usize) -> String {
    format!("s{}_{}", i + 1, r)
}
fn d_lbl(i: usize, r: usize) -> String {
    format!("d{}_{}", i + 1, r)
}
fn b_lbl(i: usize, r: usize) -> String {
    format!("b{}_{}", i + 1, r)
}
fn c_lbl(j: usize) -> String {
    format!("c{}", j + 1)
}
fn p_lbl(k: usize) -> String {
    format!("p{}", k + 1)
}

/// Which of `s{i}_1`/`s{i}_2` lists course `c{j}`: the first exactly when
/// `j` is the smaller-indexed neighbour of `w{i}`.
fn cj_side(wadj: &[[usize; 2]], i: usize, j: usize) -> usize {
    if wadj[i][0] == j {
        1
    } else {
        2
    }
}

/// Encodes "does the graph have a maximal matching of size at most `k`?" as
/// the existence of a course-complete first-coalition-stable matching.
///
/// Per W-vertex `w{i}` (adjacent to `u{j}`, `u{k}`, `j < k`): students
/// `s{i}_1..s{i}_3` (limit 2) and `s{i}_4` (limit 1); courses `d{i}_1`,
/// `d{i}_2` (2 credits) and `d{i}_3` (1 credit), all quota 1. Per U-vertex
/// `u{j}`: a one-credit course `c{j}` and a student `p{j}` wanting only it.
/// An overflow course `e` (2 credits) takes up to `n_w - k` students. A
/// student master list orders everyone; course preferences follow it.
pub fn reduce_minmm_fc(g: &GraphInput) -> Result<Instance, ReductionError> {
    let (wadj, uadj) = graph_adjacency(g)?;
    check_target(g.k, g.n_w)?;
    let mut b = Builder::default();
    for (i, &[j, k]) in wadj.iter().enumerate() {
        b.student(s_lbl(i, 1), 2, vec![c_lbl(j), d_lbl(i, 1)]);
        b.student(s_lbl(i, 2), 2, vec![c_lbl(k), d_lbl(i, 1), d_lbl(i, 2)]);
        b.student(
            s_lbl(i, 3),
            2,
            vec![d_lbl(i, 2), d_lbl(i, 3), c_lbl(j), c_lbl(k), "e".into()],
        );
        b.student(s_lbl(i, 4), 1, vec![d_lbl(i, 3)]);
    }
    for j in 0..g.n_u {
        b.student(p_lbl(j), 1, vec![c_lbl(j)]);
    }
    for (j, fans) in uadj.iter().enumerate() {
        let mut prefs: Vec<String> = fans
            .iter()
            .map(|&i| s_lbl(i, cj_side(&wadj, i, j)))
            .collect();
        prefs.extend(fans.iter().map(|&i| s_lbl(i, 3)));
        prefs.push(p_lbl(j));
        b.course(c_lbl(j), 1, 1, 0, prefs);
    }
    for i in 0..g.n_w {
        b.course(d_lbl(i, 1), 2, 1, 0, vec![s_lbl(i, 1), s_lbl(i, 2)]);
        b.course(d_lbl(i, 2), 2, 1, 0, vec![s_lbl(i, 2), s_lbl(i, 3)]);
        b.course(d_lbl(i, 3), 1, 1, 0, vec![s_lbl(i, 3), s_lbl(i, 4)]);
    }
    b.course(
        "e",
        2,
        (g.n_w - g.k) as u32,
        0,
        (0..g.n_w).map(|i| s_lbl(i, 3)).collect(),
    );

    let mut mls = Vec::new();
    for i in 0..g.n_w {
        mls.push(s_lbl(i, 1));
        mls.push(s_lbl(i, 2));
    }
    mls.extend((0..g.n_w).map(|i| s_lbl(i, 3)));
    mls.extend((0..g.n_u).map(p_lbl));
    mls.extend((0..g.n_w).map(|i| s_lbl(i, 4)));
    b.master_students = Some(mls);
    Ok(b.build())
}

/// The matching a maximal matching of size `k` induces in the
/// [`reduce_minmm_fc`] instance. Errors if `mm` is not a maximal matching of
/// the graph of exactly the size the gadget was built for.
pub fn minmm_forward_matching(
    inst: &Instance,
    g: &GraphInput,
    mm: &[(usize, usize)],
) -> Result<Matching, ReductionError> {
    let (wadj, _) = graph_adjacency(g)?;
    let wmate = check_forward_matching(g, mm)?;
    let umatched: BTreeSet<usize> = wmate.values().copied().collect();
    let mut pairs = Vec::new();
    for (i, &[j, k]) in wadj.iter().enumerate() {
        match wmate.get(&i) {
            Some(&u) if u == j => {
                pairs.push((s_lbl(i, 1), c_lbl(j)));
                pairs.push((s_lbl(i, 2), d_lbl(i, 1)));
                pairs.push((s_lbl(i, 3), d_lbl(i, 2)));
            }
            Some(_) => {
                pairs.push((s_lbl(i, 2), c_lbl(k)));
                pairs.push((s_lbl(i, 1), d_lbl(i, 1)));
                pairs.push((s_lbl(i, 3), d_lbl(i, 2)));
            }
            None => {
                pairs.push((s_lbl(i, 1), d_lbl(i, 1)));
                pairs.push((s_lbl(i, 2), d_lbl(i, 2)));
                pairs.push((s_lbl(i, 3), "e".into()));
            }
        }
        pairs.push((s_lbl(i, 4), d_lbl(i, 3)));
    }
    for j in 0..g.n_u {
        if !umatched.contains(&j) {
            pairs.push((p_lbl(j), c_lbl(j)));
        }
    }
    matching_by_labels(inst, pairs)
}

/// Encodes "does the graph have a maximal matching of size exactly `k`?";
/// see [`ExactMmMode`] for the two emitted shapes.
pub fn reduce_exactmm(g: &GraphInput, mode: ExactMmMode) -> Result<Instance, ReductionError> {
    match mode {
        ExactMmMode::PairSize => exactmm_pair_size(g),
        ExactMmMode::LqClosures => exactmm_lq_closures(g),
    }
}

/// Per W-vertex: students `s{i}_1..s{i}_3` (limit 2) and two-credit courses
/// `d{i}_1`, `d{i}_2` (quota 1). Per U-vertex: one-credit `c{j}` (quota 1).
/// One-credit overflow courses `e1`, `e2` (quota `n_w - k` each) absorb the
/// `s{i}_3` students of unmatched W-vertices, a one-credit course `f`
/// (quota `k`) tops up the students holding a `c` course, and `n_u - k`
/// students `p{1}..` (limit 1) take the `c` courses of unmatched U-vertices.
/// Master lists on both sides order everything.
fn exactmm_pair_size(g: &GraphInput) -> Result<Instance, ReductionError> {
    let (wadj, uadj) = graph_adjacency(g)?;
    check_target(g.k, g.n_u.min(g.n_w))?;
    let n_p = g.n_u - g.k;
    let mut b = Builder::default();
    for (i, &[j, k]) in wadj.iter().enumerate() {
        b.student(s_lbl(i, 1), 2, vec![c_lbl(j), d_lbl(i, 1), "f".into()]);
        b.student(
            s_lbl(i, 2),
            2,
            vec![c_lbl(k), d_lbl(i, 1), d_lbl(i, 2), "f".into()],
        );
        b.student(
            s_lbl(i, 3),
            2,
            vec![c_lbl(j), c_lbl(k), d_lbl(i, 2), "e1".into(), "e2".into()],
        );
    }
    for k_ in 0..n_p {
        b.student(p_lbl(k_), 1, (0..g.n_u).map(c_lbl).collect());
    }
    for (j, fans) in uadj.iter().enumerate() {
        let mut prefs: Vec<String> = fans
            .iter()
            .map(|&i| s_lbl(i, cj_side(&wadj, i, j)))
            .collect();
        prefs.extend(fans.iter().map(|&i| s_lbl(i, 3)));
        prefs.extend((0..n_p).map(p_lbl));
        b.course(c_lbl(j), 1, 1, 0, prefs);
    }
    for i in 0..g.n_w {
        b.course(d_lbl(i, 1), 2, 1, 0, vec![s_lbl(i, 1), s_lbl(i, 2)]);
        b.course(d_lbl(i, 2), 2, 1, 0, vec![s_lbl(i, 2), s_lbl(i, 3)]);
    }
    let s3: Vec<String> = (0..g.n_w).map(|i| s_lbl(i, 3)).collect();
    let mut s12 = Vec::new();
    for i in 0..g.n_w {
        s12.push(s_lbl(i, 1));
        s12.push(s_lbl(i, 2));
    }
    b.course("e1", 1, (g.n_w - g.k) as u32, 0, s3.clone());
    b.course("e2", 1, (g.n_w - g.k) as u32, 0, s3.clone());
    b.course("f", 1, g.k as u32, 0, s12.clone());

    let mut mls = s12;
    mls.extend(s3);
    mls.extend((0..n_p).map(p_lbl));
    b.master_students = Some(mls);
    let mut mlc: Vec<String> = (0..g.n_u).map(c_lbl).collect();
    for i in 0..g.n_w {
        mlc.push(d_lbl(i, 1));
        mlc.push(d_lbl(i, 2));
    }
    mlc.extend(["e1".into(), "e2".into(), "f".into()]);
    b.master_courses = Some(mlc);
    Ok(b.build())
}

/// Per W-vertex: students `s{i}_1..s{i}_4` (limit 2), two-credit courses
/// `d{i}_1` (quotas 2/2), `d{i}_2` (1/0), and one-credit courses `b{i}_1`,
/// `b{i}_2` (quotas 2/2). Per U-vertex: one-credit `c{j}` (1/0). Two-credit
/// overflow `e` (quota `n_w - k`, no lower quota) and `f` (quotas 2/2), `k`
/// students `p{1}..` (limit 1) that fill the open `b` courses, and students
/// `q`, `r` that pin `f`. Courses with a lower quota must end up closed or
/// doubly staffed, which forces the counting the encoding relies on.
fn exactmm_lq_closures(g: &GraphInput) -> Result<Instance, ReductionError> {
    let (wadj, uadj) = graph_adjacency(g)?;
    check_target(g.k, g.n_w)?;
    let all_p: Vec<String> = (0..g.k).map(p_lbl).collect();
    let mut b = Builder::default();
    for (i, &[j, k]) in wadj.iter().enumerate() {
        b.student(s_lbl(i, 1), 2, vec![b_lbl(i, 1), d_lbl(i, 1), c_lbl(j)]);
        b.student(
            s_lbl(i, 2),
            2,
            vec![b_lbl(i, 2), d_lbl(i, 1), d_lbl(i, 2), c_lbl(k)],
        );
        b.student(
            s_lbl(i, 3),
            2,
            vec![d_lbl(i, 2), c_lbl(j), c_lbl(k), "e".into()],
        );
        b.student(s_lbl(i, 4), 2, vec![d_lbl(i, 1)]);
    }
    let mut all_b = Vec::new();
    for i in 0..g.n_w {
        all_b.push(b_lbl(i, 1));
        all_b.push(b_lbl(i, 2));
    }
    for k_ in 0..g.k {
        b.student(p_lbl(k_), 1, all_b.clone());
    }
    b.student("q", 2, vec!["e".into(), "f".into()]);
    b.student("r", 2, vec!["f".into()]);

    for (j, fans) in uadj.iter().enumerate() {
        let mut prefs: Vec<String> = fans
            .iter()
            .map(|&i| s_lbl(i, cj_side(&wadj, i, j)))
            .collect();
        prefs.extend(fans.iter().map(|&i| s_lbl(i, 3)));
        b.course(c_lbl(j), 1, 1, 0, prefs);
    }
    for i in 0..g.n_w {
        let mut b1 = vec![s_lbl(i, 1)];
        b1.extend(all_p.iter().cloned());
        let mut b2 = vec![s_lbl(i, 2)];
        b2.extend(all_p.iter().cloned());
        b.course(b_lbl(i, 1), 1, 2, 2, b1);
        b.course(b_lbl(i, 2), 1, 2, 2, b2);
        b.course(
            d_lbl(i, 1),
            2,
            2,
            2,
            vec![s_lbl(i, 1), s_lbl(i, 4), s_lbl(i, 2)],
        );
        b.course(d_lbl(i, 2), 2, 1, 0, vec![s_lbl(i, 2), s_lbl(i, 3)]);
    }
    let mut e_prefs: Vec<String> = (0..g.n_w).map(|i| s_lbl(i, 3)).collect();
    e_prefs.push("q".into());
    b.course("e", 2, (g.n_w - g.k) as u32, 0, e_prefs);
    b.course("f", 2, 2, 2, vec!["q".into(), "r".into()]);

    let mut mls = Vec::new();
    for i in 0..g.n_w {
        mls.push(s_lbl(i, 1));
        mls.push(s_lbl(i, 4));
        mls.push(s_lbl(i, 2));
    }
    mls.extend((0..g.n_w).map(|i| s_lbl(i, 3)));
    mls.extend(all_p);
    mls.extend(["q".into(), "r".into()]);
    b.master_students = Some(mls);

    let mut mlc = all_b;
    for i in 0..g.n_w {
        mlc.push(d_lbl(i, 1));
        mlc.push(d_lbl(i, 2));
    }
    mlc.extend((0..g.n_u).map(c_lbl));
    mlc.extend(["e".into(), "f".into()]);
    b.master_courses = Some(mlc);
    Ok(b.build())
}

/// The matching a maximal matching of size `k` induces in a
/// [`reduce_exactmm`] instance of the given mode. In the
/// [`ExactMmMode::LqClosures`] shape, the `b` courses left without students
/// are the ones a stability check should treat as closed.
pub fn exactmm_forward_matching(
    inst: &Instance,
    g: &GraphInput,
    mm: &[(usize, usize)],
    mode: ExactMmMode,
) -> Result<Matching, ReductionError> {
    let (wadj, _) = graph_adjacency(g)?;
    let wmate = check_forward_matching(g, mm)?;
    let umatched: BTreeSet<usize> = wmate.values().copied().collect();
    let mut pairs = Vec::new();
    match mode {
        ExactMmMode::PairSize => {
            for (i, &[j, k]) in wadj.iter().enumerate() {
                match wmate.get(&i) {
                    Some(&u) => {
                        let (side, course) = if u == j { (1, j) } else { (2, k) };
                        pairs.push((s_lbl(i, side), c_lbl(course)));
                        pairs.push((s_lbl(i, side), "f".into()));
                        pairs.push((s_lbl(i, 3 - side), d_lbl(i, 1)));
                        pairs.push((s_lbl(i, 3), d_lbl(i, 2)));
                    }
                    None => {
                        pairs.push((s_lbl(i, 1), d_lbl(i, 1)));
                        pairs.push((s_lbl(i, 2), d_lbl(i, 2)));
                        pairs.push((s_lbl(i, 3), "e1".into()));
                        pairs.push((s_lbl(i, 3), "e2".into()));
                    }
                }
            }
            let mut next_p = 0;
            for j in 0..g.n_u {
                if !umatched.contains(&j) {
                    pairs.push((p_lbl(next_p), c_lbl(j)));
                    next_p += 1;
                }
            }
        }
        ExactMmMode::LqClosures => {
            for (i, &[j, k]) in wadj.iter().enumerate() {
                match wmate.get(&i) {
                    Some(&u) => {
                        let (side, course) = if u == j { (1, j) } else { (2, k) };
                        pairs.push((s_lbl(i, side), c_lbl(course)));
                        pairs.push((s_lbl(i, side), b_lbl(i, side)));
                        pairs.push((s_lbl(i, 3 - side), d_lbl(i, 1)));
                        pairs.push((s_lbl(i, 3), d_lbl(i, 2)));
                    }
                    None => {
                        pairs.push((s_lbl(i, 1), d_lbl(i, 1)));
                        pairs.push((s_lbl(i, 2), d_lbl(i, 2)));
                        pairs.push((s_lbl(i, 3), "e".into()));
                    }
                }
                pairs.push((s_lbl(i, 4), d_lbl(i, 1)));
            }
            let mut next_p = 0;
            for (i, adj) in wadj.iter().enumerate() {
                if let Some(&u) = wmate.get(&i) {
                    let side = if u == adj[0] { 1 } else { 2 };
                    pairs.push((p_lbl(next_p), b_lbl(i, side)));
                    next_p += 1;
                }
            }
            pairs.push(("q".into(), "f".into()));
            pairs.push(("r".into(), "f".into()));
        }
    }
    matching_by_labels(inst, pairs)
}

/// Validates `mm` against the graph: a matching made of graph edges, maximal
/// (no edge has both endpoints free), of size exactly `g.k`. Returns the
/// W-to-U mate map.
fn check_forward_matching(
    g: &GraphInput,
    mm: &[(usize, usize)],
) -> Result<BTreeMap<usize, usize>, ReductionError> {
    let edge_set: BTreeSet<(usize, usize)> = g.edges.iter().copied().collect();
    let mut wmate = BTreeMap::new();
    let mut umatched = BTreeSet::new();
    for &(u, w) in mm {
        if !edge_set.contains(&(u, w)) {
            return Err(ReductionError::NotAMatching);
        }
        if !umatched.insert(u) || wmate.insert(w, u).is_some() {
            return Err(ReductionError::NotAMatching);
        }
    }
    if mm.len() != g.k {
        return Err(ReductionError::ForwardSizeMismatch {
            got: mm.len(),
            expected: g.k,
        });
    }
    for &(u, w) in &g.edges {
        if !umatched.contains(&u) && !wmate.contains_key(&w) {
            return Err(ReductionError::NotMaximal { u, w });
        }
    }
    Ok(wmate)
}

/// Test support: every maximal matching of a small bipartite graph, by
/// exhaustive search over edge subsets. Panics beyond 20 edges.
pub fn enumerate_maximal_matchings(g: &GraphInput) -> Vec<Vec<(usize, usize)>> {
    assert!(
        g.edges.len() <= 20,
        "exhaustive matching enumeration is for tiny graphs"
    );
    fn rec(
        edges: &[(usize, usize)],
        at: usize,
        used_u: &mut BTreeSet<usize>,
        used_w: &mut BTreeSet<usize>,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if at == edges.len() {
            let maximal = edges
                .iter()
                .all(|&(u, w)| used_u.contains(&u) || used_w.contains(&w));
            if maximal {
                out.push(chosen.clone());
            }
            return;
        }
        let (u, w) = edges[at];
        if !used_u.contains(&u) && !used_w.contains(&w) {
            used_u.insert(u);
            used_w.insert(w);
            chosen.push((u, w));
            rec(edges, at + 1, used_u, used_w, chosen, out);
            chosen.pop();
            used_u.remove(&u);
            used_w.remove(&w);
        }
        rec(edges, at + 1, used_u, used_w, chosen, out);
    }
    let mut out = Vec::new();
    rec(
        &g.edges,
        0,
        &mut BTreeSet::new(),
        &mut BTreeSet::new(),
        &mut Vec::new(),
        &mut out,
    );
    out
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Knobs for [`gen_random`]. All draws come from the seeded generator, so a
/// given `(params, seed)` pair always yields the same instance.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub students: usize,
    pub courses: usize,
    pub limit_range: RangeInclusive<Credits>,
    pub credit_range: RangeInclusive<Credits>,
    pub quota_range: RangeInclusive<u32>,
    /// When set, lower quotas are drawn from this range (clamped to each
    /// course's upper quota); otherwise all lower quotas are zero.
    pub lower_quota_range: Option<RangeInclusive<u32>>,
    /// Probability that a given student–course pair is mutually acceptable.
    pub list_density: f64,
    /// Generate master lists on both sides and derive all preference lists
    /// from them.
    pub master_list: bool,
    /// Attach up to two random feasibility rules.
    pub rules: bool,
}

impl GenParams {
    /// Three students, three courses: small enough for the brute-force
    /// oracle, varied enough to exercise every code path.
    pub fn small() -> GenParams {
        GenParams {
            students: 3,
            courses: 3,
            limit_range: 1..=3,
            credit_range: 1..=2,
            quota_range: 1..=2,
            lower_quota_range: None,
            list_density: 0.8,
            master_list: false,
            rules: false,
        }
    }

    pub fn with_rules(mut self) -> GenParams {
        self.rules = true;
        self
    }

    pub fn with_lower_quotas(mut self) -> GenParams {
        self.lower_quota_range = Some(0..=2);
        self
    }

    pub fn with_master_lists(mut self) -> GenParams {
        self.master_list = true;
        self
    }
}

/// Draws a random valid instance; deterministic in `(params, seed)`.
/// Acceptability is mutual by construction, and when master lists are
/// requested every preference list is derived from them. Panics on empty
/// ranges or a density outside `[0, 1]`.
pub fn gen_random(params: &GenParams, seed: u64) -> Instance {
    assert!(
        !params.limit_range.is_empty()
            && !params.credit_range.is_empty()
            && !params.quota_range.is_empty()
            && !params
                .lower_quota_range
                .as_ref()
                .is_some_and(|r| r.is_empty()),
        "generator ranges must be nonempty"
    );
    assert!(
        (0.0..=1.0).contains(&params.list_density),
        "density must be a probability"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.students;
    let m = params.courses;

    let limits: Vec<Credits> = (0..n)
        .map(|_| rng.gen_range(params.limit_range.clone()))
        .collect();
    let credits: Vec<Credits> = (0..m)
        .map(|_| rng.gen_range(params.credit_range.clone()))
        .collect();
    let uppers: Vec<u32> = (0..m)
        .map(|_| rng.gen_range(params.quota_range.clone()))
        .collect();
    let lowers: Vec<u32> = match &params.lower_quota_range {
        Some(r) => uppers
            .iter()
            .map(|&u| rng.gen_range(r.clone()).min(u))
            .collect(),
        None => vec![0; m],
    };

    let mut wants: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut fans: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, want) in wants.iter_mut().enumerate() {
        for (j, fan) in fans.iter_mut().enumerate() {
            if rng.gen_bool(params.list_density) {
                want.push(j);
                fan.push(i);
            }
        }
    }

    let (mls, mlc) = if params.master_list {
        let mut sorder: Vec<usize> = (0..n).collect();
        sorder.shuffle(&mut rng);
        let mut corder: Vec<usize> = (0..m).collect();
        corder.shuffle(&mut rng);
        (Some(sorder), Some(corder))
    } else {
        (None, None)
    };
    let rank_in = |order: &[usize]| {
        let mut pos = vec![0usize; order.len()];
        for (p, &x) in order.iter().enumerate() {
            pos[x] = p;
        }
        pos
    };

    let students = (0..n)
        .map(|i| {
            let mut prefs = wants[i].clone();
            match &mlc {
                Some(order) => {
                    let pos = rank_in(order);
                    prefs.sort_by_key(|&j| pos[j]);
                }
                None => prefs.shuffle(&mut rng),
            }
            Student {
                id: StudentId(i),
                label: format!("s{}", i + 1),
                credit_limit: limits[i],
                prefs: prefs.into_iter().map(CourseId).collect(),
            }
        })
        .collect();
    let courses = (0..m)
        .map(|j| {
            let mut prefs = fans[j].clone();
            match &mls {
                Some(order) => {
                    let pos = rank_in(order);
                    prefs.sort_by_key(|&i| pos[i]);
                }
                None => prefs.shuffle(&mut rng),
            }
            Course {
                id: CourseId(j),
                label: format!("c{}", j + 1),
                credits: credits[j],
                upper_quota: uppers[j],
                lower_quota: lowers[j],
                prefs: prefs.into_iter().map(StudentId).collect(),
            }
        })
        .collect();

    let mut rules = Vec::new();
    if params.rules && m >= 2 {
        for _ in 0..rng.gen_range(0..=2u32) {
            let group_size = rng.gen_range(2..=3.min(m));
            let mut pool: Vec<usize> = (0..m).collect();
            pool.shuffle(&mut rng);
            let group: BTreeSet<CourseId> =
                pool[..group_size].iter().map(|&j| CourseId(j)).collect();
            let kind = if rng.gen_bool(0.5) {
                RuleKind::ExcludedCombination(group)
            } else {
                RuleKind::AtMostKOfGroup {
                    k: rng.gen_range(1..=group_size as u32 - 1),
                    group,
                }
            };
            let owner = if n > 0 && rng.gen_bool(0.5) {
                RuleOwner::Student(StudentId(rng.gen_range(0..n)))
            } else {
                RuleOwner::All
            };
            rules.push(FeasibilityRule { kind, owner });
        }
    }

    Instance {
        students,
        courses,
        master_list_students: mls.map(|v| v.into_iter().map(StudentId).collect()),
        master_list_courses: mlc.map(|v| v.into_iter().map(CourseId).collect()),
        rules,
    }
}

// ---------------------------------------------------------------------------
// Worked examples
// ---------------------------------------------------------------------------

/// A named worked example: an instance and, when the example highlights one,
/// a matching.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub instance: Instance,
    pub matching: Option<Matching>,
}

fn small_instance(
    students: &[(&str, Credits, &[&str])],
    courses: &[(&str, Credits, u32, &[&str])],
    mls: Option<&[&str]>,
    mlc: Option<&[&str]>,
) -> Instance {
    let mut b = Builder::default();
    for &(label, limit, prefs) in students {
        b.student(label, limit, prefs.iter().map(|s| s.to_string()).collect());
    }
    for &(label, credits, quota, prefs) in courses {
        b.course(
            label,
            credits,
            quota,
            0,
            prefs.iter().map(|s| s.to_string()).collect(),
        );
    }
    b.master_students = mls.map(|ls| ls.iter().map(|s| s.to_string()).collect());
    b.master_courses = mlc.map(|ls| ls.iter().map(|s| s.to_string()).collect());
    b.build()
}

/// The small worked examples used across the documentation and tests, keyed
/// by short names:
///
/// - `fig1`, `fig3`, `fig5`: one shared two-student, three-course instance.
///   `fig1` and `fig3` attach the matching `{(s1, c3), (s2, c2)}` (it has a
///   blocking pair but is pair-size- and coalition-stable); `fig5` attaches
///   none — the instance has no pair-stable matching at all.
/// - `fig2`: the same shape with `s1` ranking `c3` last; the attached
///   matching is pair-size-stable but coalition-blocked.
/// - `sec42`: one student, two courses of different credit value, master
///   lists on both sides; its first-coalition-stable matchings differ in
///   size.
/// - `ml`: two students and two two-credit courses under master lists;
///   serial choice leaves nothing for the second student's second pick.
pub fn fixtures() -> BTreeMap<&'static str, Fixture> {
    let mut out = BTreeMap::new();
    let mut add = |name: &'static str, instance: Instance, matching: Option<&[(&str, &str)]>| {
        let matching = matching.map(|pairs| {
            Matching::new(pairs.iter().map(|&(s, c)| {
                (
                    instance
                        .student_by_label(s)
                        .expect("fixture student label")
                        .id,
                    instance
                        .course_by_label(c)
                        .expect("fixture course label")
                        .id,
                )
            }))
        });
        out.insert(
            name,
            Fixture {
                name,
                instance,
                matching,
            },
        );
    };

    let pair_shape = small_instance(
        &[("s1", 2, &["c1", "c3", "c2"]), ("s2", 1, &["c2", "c1"])],
        &[
            ("c1", 1, 1, &["s2", "s1"]),
            ("c2", 1, 1, &["s1", "s2"]),
            ("c3", 2, 1, &["s1"]),
        ],
        None,
        None,
    );
    let highlighted = [("s1", "c3"), ("s2", "c2")];
    add("fig1", pair_shape.clone(), Some(&highlighted));
    add(
        "fig2",
        small_instance(
            &[("s1", 2, &["c1", "c2", "c3"]), ("s2", 1, &["c2", "c1"])],
            &[
                ("c1", 1, 1, &["s2", "s1"]),
                ("c2", 1, 1, &["s1", "s2"]),
                ("c3", 2, 1, &["s1"]),
            ],
            None,
            None,
        ),
        Some(&highlighted),
    );
    add("fig3", pair_shape.clone(), Some(&highlighted));
    add("fig5", pair_shape, None);
    add(
        "sec42",
        small_instance(
            &[("s1", 2, &["c1", "c2"])],
            &[("c1", 1, 1, &["s1"]), ("c2", 2, 1, &["s1"])],
            Some(&["s1"]),
            Some(&["c1", "c2"]),
        ),
        None,
    );
    add(
        "ml",
        small_instance(
            &[("s1", 2, &["c1", "c2"]), ("s2", 2, &["c1", "c2"])],
            &[("c1", 2, 1, &["s1", "s2"]), ("c2", 2, 1, &["s1", "s2"])],
            Some(&["s1", "s2"]),
            Some(&["c1", "c2"]),
        ),
        None,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_matching, matching_size, validate_instance, StabilityNotion};
    use crate::oracle::{enumerate_matchings, max_stable_brute, meets_all_lower_quotas};
    use crate::solve::LqMode;
    use crate::verify::{find_pair_blocking, verify, Verdict};

    fn sid(inst: &Instance, l: &str) -> StudentId {
        inst.student_by_label(l)
            .unwrap_or_else(|| panic!("no student {l}"))
            .id
    }

    fn cid(inst: &Instance, l: &str) -> CourseId {
        inst.course_by_label(l)
            .unwrap_or_else(|| panic!("no course {l}"))
            .id
    }

    fn student_prefs<'a>(inst: &'a Instance, l: &str) -> Vec<&'a str> {
        inst.student_by_label(l)
            .unwrap_or_else(|| panic!("no student {l}"))
            .prefs
            .iter()
            .map(|&c| inst.courses[c.0].label.as_str())
            .collect()
    }

    fn course_prefs<'a>(inst: &'a Instance, l: &str) -> Vec<&'a str> {
        inst.course_by_label(l)
            .unwrap_or_else(|| panic!("no course {l}"))
            .prefs
            .iter()
            .map(|&s| inst.students[s.0].label.as_str())
            .collect()
    }

    fn assert_valid(inst: &Instance) {
        let violations = validate_instance(inst);
        assert!(violations.is_empty(), "{violations:?}");
    }

    /// Whether some matching is complete (on the requested side) and stable.
    fn exists_complete_stable(
        inst: &Instance,
        notion: StabilityNotion,
        student_side: bool,
    ) -> bool {
        enumerate_matchings(inst).unwrap().any(|m| {
            let size = matching_size(inst, &m);
            let complete = if student_side {
                size.student_complete
            } else {
                size.course_complete
            };
            complete && verify(inst, &m, notion).unwrap().is_stable()
        })
    }

    #[test]
    fn every_fixture_is_valid_and_its_matching_checks_out() {
        let all = fixtures();
        assert_eq!(
            all.keys().copied().collect::<Vec<_>>(),
            ["fig1", "fig2", "fig3", "fig5", "ml", "sec42"]
        );
        for f in all.values() {
            assert_valid(&f.instance);
            if let Some(m) = &f.matching {
                assert!(check_matching(&f.instance, m).is_empty(), "{}", f.name);
            }
        }
        let fig1 = &all["fig1"];
        let m = fig1.matching.clone().unwrap();
        assert_eq!(
            m,
            Matching::new([
                (sid(&fig1.instance, "s1"), cid(&fig1.instance, "c3")),
                (sid(&fig1.instance, "s2"), cid(&fig1.instance, "c2")),
            ])
        );
        assert!(all["fig5"].matching.is_none());
    }

    #[test]
    fn subset_sum_gadget_matches_known_verdicts() {
        let (inst, m) = gadget_subset_sum(&SubsetSumInput {
            sizes: vec![1, 2, 3],
            target: 3,
        });
        assert_valid(&inst);
        assert!(check_matching(&inst, &m).is_empty());
        match verify(&inst, &m, StabilityNotion::PairSize).unwrap() {
            Verdict::Unstable(w) => {
                assert_eq!(w.student, sid(&inst, "s"));
                assert_eq!(w.coalition, vec![cid(&inst, "b")]);
                // {c1, c2} precedes {c3} in preference order.
                assert_eq!(w.drop_set, vec![cid(&inst, "c1"), cid(&inst, "c2")]);
            }
            Verdict::Stable => panic!("a subset sums to the target"),
        }

        let (inst, m) = gadget_subset_sum(&SubsetSumInput {
            sizes: vec![2],
            target: 3,
        });
        for notion in [
            StabilityNotion::PairSize,
            StabilityNotion::Coalition,
            StabilityNotion::FirstCoalition,
        ] {
            assert!(verify(&inst, &m, notion).unwrap().is_stable(), "{notion}");
        }

        let (inst, m) = gadget_subset_sum(&SubsetSumInput {
            sizes: vec![5],
            target: 5,
        });
        assert!(!verify(&inst, &m, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());
    }

    #[test]
    fn subset_sum_gadget_agrees_with_direct_enumeration() {
        let cases = [
            (vec![3, 5, 7], 9),
            (vec![3, 5, 7], 8),
            (vec![2, 4], 6),
            (vec![2, 4], 5),
            (vec![1, 1, 1], 3),
        ];
        for (sizes, target) in cases {
            let hit = (0u32..1 << sizes.len()).any(|mask| {
                let sum: Credits = sizes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &s)| s)
                    .sum();
                sum == target
            });
            let (inst, m) = gadget_subset_sum(&SubsetSumInput { sizes, target });
            for notion in [
                StabilityNotion::PairSize,
                StabilityNotion::Coalition,
                StabilityNotion::FirstCoalition,
            ] {
                let stable = verify(&inst, &m, notion).unwrap().is_stable();
                assert_eq!(
                    stable,
                    !hit,
                    "{} target {target} {notion}",
                    inst.courses.len()
                );
            }
        }
    }

    /// The hospitals/residents source whose pair-mode renaming is the shared
    /// `fig5` example.
    fn unsolvable_hrs() -> HrsInput {
        HrsInput {
            residents: vec![
                HrsResident {
                    label: "r1".into(),
                    size: 1,
                    prefs: vec!["h2".into(), "h1".into()],
                },
                HrsResident {
                    label: "r2".into(),
                    size: 1,
                    prefs: vec!["h1".into(), "h2".into()],
                },
                HrsResident {
                    label: "r3".into(),
                    size: 2,
                    prefs: vec!["h1".into()],
                },
            ],
            hospitals: vec![
                HrsHospital {
                    label: "h1".into(),
                    quota: 2,
                    prefs: vec!["r1".into(), "r3".into(), "r2".into()],
                },
                HrsHospital {
                    label: "h2".into(),
                    quota: 1,
                    prefs: vec!["r2".into(), "r1".into()],
                },
            ],
        }
    }

    #[test]
    fn hrs_pair_mode_reproduces_the_shared_example() {
        let emitted = reduce_hrs(&unsolvable_hrs(), HrsMode::Pair).unwrap();
        assert_eq!(emitted, fixtures()["fig5"].instance);
        let report = max_stable_brute(&emitted, LqMode::None).unwrap();
        assert_eq!(report.stable_counts[&StabilityNotion::Pair], 0);
    }

    #[test]
    fn hrs_fc_mode_appends_dummy_courses() {
        let inp = HrsInput {
            residents: vec![
                HrsResident {
                    label: "r1".into(),
                    size: 2,
                    prefs: vec!["h1".into(), "h2".into()],
                },
                HrsResident {
                    label: "r2".into(),
                    size: 1,
                    prefs: vec!["h2".into()],
                },
            ],
            hospitals: vec![
                HrsHospital {
                    label: "h1".into(),
                    quota: 2,
                    prefs: vec!["r1".into()],
                },
                HrsHospital {
                    label: "h2".into(),
                    quota: 2,
                    prefs: vec!["r2".into(), "r1".into()],
                },
            ],
        };
        let inst = reduce_hrs(&inp, HrsMode::FirstCoalition).unwrap();
        assert_valid(&inst);
        assert_eq!(inst.students.len(), 2);
        assert_eq!(inst.courses.len(), 4);
        assert_eq!(student_prefs(&inst, "s1"), ["c1", "d1"]);
        assert_eq!(student_prefs(&inst, "s2"), ["c2", "c1", "d2"]);
        assert_eq!(course_prefs(&inst, "d1"), ["s1"]);
        let d1 = inst.course_by_label("d1").unwrap();
        assert_eq!((d1.credits, d1.upper_quota), (1, 1));
    }

    #[test]
    fn hrs_modes_agree_on_solvability() {
        // Random mutual two-hospital instances with quota 2 (so both modes
        // accept them): a stable assignment exists exactly when the
        // pair-mode instance has a pair-stable matching, and the theorem
        // says that matches first-coalition solvability of the fc mode.
        for seed in 0..60u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hospitals = ["h1", "h2"];
            let mut residents = Vec::new();
            let mut fans: BTreeMap<&str, Vec<String>> = Default::default();
            for j in 0..3 {
                let label = format!("r{}", j + 1);
                let size = rng.gen_range(1..=2);
                let mut hs: Vec<&str> = hospitals
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.7))
                    .collect();
                hs.shuffle(&mut rng);
                for h in &hs {
                    fans.entry(h).or_default().push(label.clone());
                }
                residents.push(HrsResident {
                    label,
                    size,
                    prefs: hs.iter().map(|h| h.to_string()).collect(),
                });
            }
            let inp = HrsInput {
                residents,
                hospitals: hospitals
                    .iter()
                    .map(|h| {
                        let mut prefs = fans.get(h).cloned().unwrap_or_default();
                        prefs.shuffle(&mut rng);
                        HrsHospital {
                            label: h.to_string(),
                            quota: 2,
                            prefs,
                        }
                    })
                    .collect(),
            };
            let pair = reduce_hrs(&inp, HrsMode::Pair).unwrap();
            let fc = reduce_hrs(&inp, HrsMode::FirstCoalition).unwrap();
            assert_valid(&pair);
            assert_valid(&fc);
            let pair_report = max_stable_brute(&pair, LqMode::None).unwrap();
            let fc_report = max_stable_brute(&fc, LqMode::None).unwrap();
            assert_eq!(
                pair_report.stable_counts[&StabilityNotion::Pair] > 0,
                fc_report.stable_counts[&StabilityNotion::FirstCoalition] > 0,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn hrs_rejects_bad_inputs() {
        let base = unsolvable_hrs();

        let mut inp = base.clone();
        inp.residents[0].size = 3;
        assert!(matches!(
            reduce_hrs(&inp, HrsMode::Pair),
            Err(ReductionError::ResidentSize { .. })
        ));

        // Quota 1 is fine for the pair renaming but not for the dummy-course
        // variant, which pins every limit to two credits.
        assert!(matches!(
            reduce_hrs(&base, HrsMode::FirstCoalition),
            Err(ReductionError::HospitalQuota { .. })
        ));

        let mut inp = base.clone();
        inp.hospitals[0].prefs.push("r1".into());
        assert!(matches!(
            reduce_hrs(&inp, HrsMode::Pair),
            Err(ReductionError::ListTooLong { .. })
        ));

        let mut inp = base.clone();
        inp.residents[0].prefs = vec!["h1".into()];
        assert!(matches!(
            reduce_hrs(&inp, HrsMode::Pair),
            Err(ReductionError::OneSidedListing { .. })
        ));

        let mut inp = base.clone();
        inp.residents[1].label = "r1".into();
        assert!(matches!(
            reduce_hrs(&inp, HrsMode::Pair),
            Err(ReductionError::DuplicateLabel(_))
        ));
    }

    /// Two men, two tied women, everyone acceptable; solvable.
    fn tied_smti() -> SmtiInput {
        SmtiInput {
            men: vec![
                SmtiMan {
                    label: "m1".into(),
                    prefs: vec![vec!["w1".into(), "w2".into()]],
                },
                SmtiMan {
                    label: "m2".into(),
                    prefs: vec![vec!["w1".into(), "w2".into()]],
                },
            ],
            women: vec![
                SmtiWoman {
                    label: "w1".into(),
                    prefs: vec!["m1".into(), "m2".into()],
                },
                SmtiWoman {
                    label: "w2".into(),
                    prefs: vec!["m1".into(), "m2".into()],
                },
            ],
            men_master: vec!["m1".into(), "m2".into()],
            women_master: vec![vec!["w1".into(), "w2".into()]],
        }
    }

    #[test]
    fn smti_tie_becomes_the_three_course_pattern() {
        let inst = reduce_smti_coalition(&tied_smti()).unwrap();
        assert_valid(&inst);
        assert_eq!(inst.students.len(), 2);
        assert_eq!(inst.courses.len(), 3);
        assert_eq!(inst.course_by_label("c1").unwrap().credits, 1);
        assert_eq!(inst.course_by_label("c2").unwrap().credits, 2);
        assert_eq!(inst.course_by_label("c1_p").unwrap().credits, 1);
        assert_eq!(student_prefs(&inst, "s1"), ["c1", "c2", "c1_p"]);
        assert_eq!(course_prefs(&inst, "c1_p"), course_prefs(&inst, "c1"));
        let mlc: Vec<&str> = inst
            .master_list_courses
            .as_ref()
            .unwrap()
            .iter()
            .map(|&c| inst.courses[c.0].label.as_str())
            .collect();
        assert_eq!(mlc, ["c1", "c2", "c1_p"]);
        // The tie admits a complete weakly stable marriage, so a
        // course-complete coalition-stable matching exists.
        assert!(exists_complete_stable(
            &inst,
            StabilityNotion::Coalition,
            false
        ));
    }

    #[test]
    fn smti_untied_women_become_two_credit_courses() {
        let inp = SmtiInput {
            men: vec![SmtiMan {
                label: "m1".into(),
                prefs: vec![vec!["w1".into()]],
            }],
            women: vec![SmtiWoman {
                label: "w1".into(),
                prefs: vec!["m1".into()],
            }],
            men_master: vec!["m1".into()],
            women_master: vec![vec!["w1".into()]],
        };
        let inst = reduce_smti_coalition(&inp).unwrap();
        assert_valid(&inst);
        assert_eq!(inst.students.len(), 1);
        assert_eq!(inst.courses.len(), 1);
        assert_eq!(inst.course_by_label("c1").unwrap().credits, 2);
    }

    /// A strict instance with no complete stable marriage: `(m1, w1)` is
    /// mutually first-choice, which strands `m2` and `w2`.
    fn incomplete_smti() -> SmtiInput {
        SmtiInput {
            men: vec![
                SmtiMan {
                    label: "m1".into(),
                    prefs: vec![vec!["w1".into()], vec!["w2".into()]],
                },
                SmtiMan {
                    label: "m2".into(),
                    prefs: vec![vec!["w1".into()]],
                },
            ],
            women: vec![
                SmtiWoman {
                    label: "w1".into(),
                    prefs: vec!["m1".into(), "m2".into()],
                },
                SmtiWoman {
                    label: "w2".into(),
                    prefs: vec!["m1".into()],
                },
            ],
            men_master: vec!["m1".into(), "m2".into()],
            women_master: vec![vec!["w1".into()], vec!["w2".into()]],
        }
    }

    #[test]
    fn smti_solvability_transfers_to_the_emitted_instance() {
        // Solvable strict case: the identity marriage is weakly stable, so
        // its image is coalition-stable and course-complete.
        let inp = SmtiInput {
            men: vec![
                SmtiMan {
                    label: "m1".into(),
                    prefs: vec![vec!["w1".into()], vec!["w2".into()]],
                },
                SmtiMan {
                    label: "m2".into(),
                    prefs: vec![vec!["w1".into()], vec!["w2".into()]],
                },
            ],
            women: vec![
                SmtiWoman {
                    label: "w1".into(),
                    prefs: vec!["m1".into(), "m2".into()],
                },
                SmtiWoman {
                    label: "w2".into(),
                    prefs: vec!["m1".into(), "m2".into()],
                },
            ],
            men_master: vec!["m1".into(), "m2".into()],
            women_master: vec![vec!["w1".into()], vec!["w2".into()]],
        };
        let inst = reduce_smti_coalition(&inp).unwrap();
        assert_valid(&inst);
        let forward = Matching::new([
            (sid(&inst, "s1"), cid(&inst, "c1")),
            (sid(&inst, "s2"), cid(&inst, "c2")),
        ]);
        assert!(check_matching(&inst, &forward).is_empty());
        assert!(matching_size(&inst, &forward).course_complete);
        assert!(verify(&inst, &forward, StabilityNotion::Coalition)
            .unwrap()
            .is_stable());

        // Unsolvable case: no course-complete coalition-stable matching.
        let inst = reduce_smti_coalition(&incomplete_smti()).unwrap();
        assert_valid(&inst);
        assert!(!exists_complete_stable(
            &inst,
            StabilityNotion::Coalition,
            false
        ));
    }

    #[test]
    fn smti_distinct_credit_variant_separates_all_courses() {
        let inp = tied_smti();
        let inst = smti_fc_distinct_credits(&inp).unwrap();
        assert_valid(&inst);
        // Two women: credits drawn from {n+1, .., 2n} = {3, 4}, tie swapped
        // so the master-list-first woman carries fewer credits.
        assert_eq!(inst.course_by_label("c1").unwrap().credits, 3);
        assert_eq!(inst.course_by_label("c2").unwrap().credits, 4);
        assert_eq!(inst.students[0].credit_limit, 4);
        let mut credits: Vec<Credits> = inst.courses.iter().map(|c| c.credits).collect();
        credits.sort_unstable();
        credits.dedup();
        assert_eq!(credits.len(), inst.courses.len());
        // No student can afford two courses.
        let cheapest: Credits = credits.iter().take(2).sum();
        assert!(cheapest > inst.students[0].credit_limit);

        // The marriage {(m1, w1), (m2, w2)} is weakly stable (all ranks
        // within the tie are equal); its image is first-coalition-stable.
        let forward = Matching::new([
            (sid(&inst, "s1"), cid(&inst, "c1")),
            (sid(&inst, "s2"), cid(&inst, "c2")),
        ]);
        assert!(check_matching(&inst, &forward).is_empty());
        assert!(matching_size(&inst, &forward).course_complete);
        assert!(verify(&inst, &forward, StabilityNotion::FirstCoalition)
            .unwrap()
            .is_stable());
        assert!(verify(&inst, &forward, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());

        // And the unsolvable strict case stays unsolvable.
        let inst = smti_fc_distinct_credits(&incomplete_smti()).unwrap();
        assert_valid(&inst);
        assert!(!exists_complete_stable(
            &inst,
            StabilityNotion::FirstCoalition,
            false
        ));
    }

    #[test]
    fn smti_rejects_malformed_inputs() {
        // A three-way tie in the women's master list.
        let mut inp = tied_smti();
        inp.women.push(SmtiWoman {
            label: "w3".into(),
            prefs: vec![],
        });
        inp.women_master = vec![vec!["w1".into(), "w2".into(), "w3".into()]];
        assert!(matches!(
            reduce_smti_coalition(&inp),
            Err(ReductionError::BadMasterList { side: "women", .. })
        ));

        // A tie on a man's list that is not a master-list tie.
        let mut inp = tied_smti();
        inp.women_master = vec![vec!["w1".into()], vec!["w2".into()]];
        assert!(matches!(
            reduce_smti_coalition(&inp),
            Err(ReductionError::BadTie { .. })
        ));

        // Master-list ties listed as two strict entries.
        let mut inp = tied_smti();
        inp.men[0].prefs = vec![vec!["w1".into()], vec!["w2".into()]];
        assert!(matches!(
            reduce_smti_coalition(&inp),
            Err(ReductionError::MasterListOrder { .. })
        ));

        // A woman's list against the men's master-list order.
        let mut inp = tied_smti();
        inp.women[0].prefs = vec!["m2".into(), "m1".into()];
        assert!(matches!(
            reduce_smti_coalition(&inp),
            Err(ReductionError::MasterListOrder { .. })
        ));
    }

    /// The complete bipartite graph on two U-vertices and three W-vertices.
    fn k23(k: usize) -> GraphInput {
        GraphInput {
            n_u: 2,
            n_w: 3,
            edges: (0..2).flat_map(|u| (0..3).map(move |w| (u, w))).collect(),
            k,
        }
    }

    #[test]
    fn minmm_gadget_reproduces_the_worked_lists() {
        let g = k23(2);
        let inst = reduce_minmm_fc(&g).unwrap();
        assert_valid(&inst);
        assert_eq!(inst.students.len(), 14);
        assert_eq!(inst.courses.len(), 12);
        assert_eq!(student_prefs(&inst, "s1_1"), ["c1", "d1_1"]);
        assert_eq!(student_prefs(&inst, "s1_2"), ["c2", "d1_1", "d1_2"]);
        assert_eq!(
            student_prefs(&inst, "s1_3"),
            ["d1_2", "d1_3", "c1", "c2", "e"]
        );
        assert_eq!(student_prefs(&inst, "s1_4"), ["d1_3"]);
        assert_eq!(student_prefs(&inst, "p1"), ["c1"]);
        assert_eq!(
            course_prefs(&inst, "c1"),
            ["s1_1", "s2_1", "s3_1", "s1_3", "s2_3", "s3_3", "p1"]
        );
        assert_eq!(course_prefs(&inst, "e"), ["s1_3", "s2_3", "s3_3"]);
        assert_eq!(inst.course_by_label("e").unwrap().upper_quota, 1);
        let mls: Vec<&str> = inst
            .master_list_students
            .as_ref()
            .unwrap()
            .iter()
            .map(|&s| inst.students[s.0].label.as_str())
            .collect();
        assert_eq!(
            mls,
            [
                "s1_1", "s1_2", "s2_1", "s2_2", "s3_1", "s3_2", "s1_3", "s2_3", "s3_3", "p1", "p2",
                "s1_4", "s2_4", "s3_4",
            ]
        );
        assert!(inst.master_list_courses.is_none());
    }

    #[test]
    fn minmm_forward_matching_is_first_coalition_stable() {
        let g = k23(2);
        let inst = reduce_minmm_fc(&g).unwrap();
        let mm = [(0, 0), (1, 1)];
        let m = minmm_forward_matching(&inst, &g, &mm).unwrap();
        assert!(check_matching(&inst, &m).is_empty());
        assert!(matching_size(&inst, &m).course_complete);
        assert!(verify(&inst, &m, StabilityNotion::FirstCoalition)
            .unwrap()
            .is_stable());

        assert_eq!(
            minmm_forward_matching(&inst, &g, &[(0, 0)]),
            Err(ReductionError::ForwardSizeMismatch {
                got: 1,
                expected: 2
            })
        );
        assert_eq!(
            minmm_forward_matching(&inst, &g, &[(0, 2), (1, 2)]),
            Err(ReductionError::NotAMatching)
        );

        // A path graph where a single edge is not maximal.
        let path = GraphInput {
            n_u: 3,
            n_w: 2,
            edges: vec![(0, 0), (1, 0), (1, 1), (2, 1)],
            k: 1,
        };
        let inst = reduce_minmm_fc(&path).unwrap();
        assert_eq!(
            minmm_forward_matching(&inst, &path, &[(0, 0)]),
            Err(ReductionError::NotMaximal { u: 1, w: 1 })
        );
    }

    #[test]
    fn minmm_existence_matches_the_oracle_on_a_tiny_graph() {
        let g = GraphInput {
            n_u: 2,
            n_w: 1,
            edges: vec![(0, 0), (1, 0)],
            k: 1,
        };
        let inst = reduce_minmm_fc(&g).unwrap();
        assert_valid(&inst);
        // Both maximal matchings have size 1 = k, so a course-complete
        // first-coalition-stable matching exists.
        assert!(exists_complete_stable(
            &inst,
            StabilityNotion::FirstCoalition,
            false
        ));
    }

    #[test]
    fn exactmm_pair_size_gadget_reproduces_the_worked_lists() {
        let g = k23(2);
        let inst = reduce_exactmm(&g, ExactMmMode::PairSize).unwrap();
        assert_valid(&inst);
        // No p students at k = n_u.
        assert_eq!(inst.students.len(), 9);
        assert_eq!(inst.courses.len(), 11);
        assert_eq!(student_prefs(&inst, "s1_1"), ["c1", "d1_1", "f"]);
        assert_eq!(student_prefs(&inst, "s1_2"), ["c2", "d1_1", "d1_2", "f"]);
        assert_eq!(
            student_prefs(&inst, "s1_3"),
            ["c1", "c2", "d1_2", "e1", "e2"]
        );
        assert_eq!(
            course_prefs(&inst, "c1"),
            ["s1_1", "s2_1", "s3_1", "s1_3", "s2_3", "s3_3"]
        );
        assert_eq!(course_prefs(&inst, "e1"), ["s1_3", "s2_3", "s3_3"]);
        assert_eq!(
            course_prefs(&inst, "f"),
            ["s1_1", "s1_2", "s2_1", "s2_2", "s3_1", "s3_2"]
        );
        assert_eq!(inst.course_by_label("e1").unwrap().upper_quota, 1);
        assert_eq!(inst.course_by_label("e2").unwrap().upper_quota, 1);
        assert_eq!(inst.course_by_label("f").unwrap().upper_quota, 2);
        let mlc: Vec<&str> = inst
            .master_list_courses
            .as_ref()
            .unwrap()
            .iter()
            .map(|&c| inst.courses[c.0].label.as_str())
            .collect();
        assert_eq!(
            mlc,
            ["c1", "c2", "d1_1", "d1_2", "d2_1", "d2_2", "d3_1", "d3_2", "e1", "e2", "f"]
        );
    }

    #[test]
    fn exactmm_pair_size_forward_matching_is_stable_and_complete() {
        let g = k23(2);
        let inst = reduce_exactmm(&g, ExactMmMode::PairSize).unwrap();
        let m =
            exactmm_forward_matching(&inst, &g, &[(0, 0), (1, 1)], ExactMmMode::PairSize).unwrap();
        assert!(check_matching(&inst, &m).is_empty());
        let size = matching_size(&inst, &m);
        assert!(size.student_complete && size.course_complete);
        assert!(verify(&inst, &m, StabilityNotion::PairSize)
            .unwrap()
            .is_stable());
    }

    #[test]
    fn exactmm_pair_size_existence_matches_the_oracle_on_a_tiny_graph() {
        let g = GraphInput {
            n_u: 2,
            n_w: 1,
            edges: vec![(0, 0), (1, 0)],
            k: 1,
        };
        let inst = reduce_exactmm(&g, ExactMmMode::PairSize).unwrap();
        assert_valid(&inst);
        assert!(exists_complete_stable(
            &inst,
            StabilityNotion::PairSize,
            true
        ));
    }

    #[test]
    fn exactmm_lq_gadget_reproduces_the_worked_lists() {
        let g = k23(2);
        let inst = reduce_exactmm(&g, ExactMmMode::LqClosures).unwrap();
        assert_valid(&inst);
        // 12 w-students + 2 fillers + q + r; 2 c + 12 b/d + e + f courses.
        assert_eq!(inst.students.len(), 16);
        assert_eq!(inst.courses.len(), 16);
        assert_eq!(student_prefs(&inst, "s1_1"), ["b1_1", "d1_1", "c1"]);
        assert_eq!(student_prefs(&inst, "s1_2"), ["b1_2", "d1_1", "d1_2", "c2"]);
        assert_eq!(student_prefs(&inst, "s1_3"), ["d1_2", "c1", "c2", "e"]);
        assert_eq!(student_prefs(&inst, "s1_4"), ["d1_1"]);
        assert_eq!(
            student_prefs(&inst, "p1"),
            ["b1_1", "b1_2", "b2_1", "b2_2", "b3_1", "b3_2"]
        );
        assert_eq!(student_prefs(&inst, "q"), ["e", "f"]);
        assert_eq!(student_prefs(&inst, "r"), ["f"]);
        assert_eq!(
            course_prefs(&inst, "c1"),
            ["s1_1", "s2_1", "s3_1", "s1_3", "s2_3", "s3_3"]
        );
        assert_eq!(course_prefs(&inst, "b1_1"), ["s1_1", "p1", "p2"]);
        assert_eq!(course_prefs(&inst, "d1_1"), ["s1_1", "s1_4", "s1_2"]);
        assert_eq!(course_prefs(&inst, "e"), ["s1_3", "s2_3", "s3_3", "q"]);
        assert_eq!(course_prefs(&inst, "f"), ["q", "r"]);
        for label in ["b1_1", "b1_2", "d1_1", "f"] {
            let c = inst.course_by_label(label).unwrap();
            assert_eq!((c.upper_quota, c.lower_quota), (2, 2), "{label}");
        }
        for label in ["c1", "d1_2"] {
            let c = inst.course_by_label(label).unwrap();
            assert_eq!((c.upper_quota, c.lower_quota), (1, 0), "{label}");
        }
        let e = inst.course_by_label("e").unwrap();
        assert_eq!((e.upper_quota, e.lower_quota), (1, 0));
        let mls: Vec<&str> = inst
            .master_list_students
            .as_ref()
            .unwrap()
            .iter()
            .map(|&s| inst.students[s.0].label.as_str())
            .collect();
        assert_eq!(
            mls,
            [
                "s1_1", "s1_4", "s1_2", "s2_1", "s2_4", "s2_2", "s3_1", "s3_4", "s3_2", "s1_3",
                "s2_3", "s3_3", "p1", "p2", "q", "r",
            ]
        );
    }

    #[test]
    fn exactmm_lq_forward_matching_is_pair_stable_under_closures() {
        let g = k23(2);
        let inst = reduce_exactmm(&g, ExactMmMode::LqClosures).unwrap();
        let m = exactmm_forward_matching(&inst, &g, &[(0, 0), (1, 1)], ExactMmMode::LqClosures)
            .unwrap();
        assert!(check_matching(&inst, &m).is_empty());
        assert!(matching_size(&inst, &m).student_complete);
        // Stability is judged with the unstaffed b courses closed.
        let closed: BTreeSet<CourseId> = inst
            .courses
            .iter()
            .filter(|c| c.lower_quota > 0 && m.students_of(c.id).next().is_none())
            .map(|c| c.id)
            .collect();
        assert_eq!(closed.len(), 4, "one open b per matched vertex");
        let judged = inst.with_courses_closed(&closed);
        assert!(meets_all_lower_quotas(&judged, &m));
        assert_eq!(find_pair_blocking(&judged, &m).unwrap(), None);
    }

    #[test]
    fn graph_gadgets_reject_bad_inputs() {
        let single = GraphInput {
            n_u: 1,
            n_w: 1,
            edges: vec![(0, 0)],
            k: 1,
        };
        assert_eq!(
            reduce_minmm_fc(&single),
            Err(ReductionError::DegreeNotTwo {
                index: 1,
                degree: 1
            })
        );

        let dup = GraphInput {
            n_u: 2,
            n_w: 1,
            edges: vec![(0, 0), (0, 0)],
            k: 1,
        };
        assert_eq!(
            reduce_minmm_fc(&dup),
            Err(ReductionError::BadEdge { u: 0, w: 0 })
        );

        let range = GraphInput {
            n_u: 2,
            n_w: 1,
            edges: vec![(0, 0), (2, 0)],
            k: 1,
        };
        assert_eq!(
            reduce_minmm_fc(&range),
            Err(ReductionError::BadEdge { u: 2, w: 0 })
        );

        for bad_k in [0, 4] {
            let g = k23(bad_k);
            assert_eq!(
                reduce_minmm_fc(&g),
                Err(ReductionError::TargetOutOfRange { k: bad_k, bound: 3 })
            );
        }
        // The pair-size shape also needs k surviving p-student counting.
        assert_eq!(
            reduce_exactmm(&k23(3), ExactMmMode::PairSize),
            Err(ReductionError::TargetOutOfRange { k: 3, bound: 2 })
        );
    }

    #[test]
    fn maximal_matching_enumeration_matches_hand_counts() {
        let all = enumerate_maximal_matchings(&k23(2));
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|m| m.len() == 2));

        let path = GraphInput {
            n_u: 2,
            n_w: 1,
            edges: vec![(0, 0), (1, 0)],
            k: 1,
        };
        let all = enumerate_maximal_matchings(&path);
        assert_eq!(all, vec![vec![(0, 0)], vec![(1, 0)]]);
    }

    #[test]
    fn generator_is_deterministic_and_emits_valid_instances() {
        let variants = [
            GenParams::small(),
            GenParams::small().with_rules(),
            GenParams::small().with_lower_quotas(),
            GenParams::small().with_master_lists(),
            GenParams::small()
                .with_master_lists()
                .with_rules()
                .with_lower_quotas(),
        ];
        for params in &variants {
            for seed in 0..30 {
                let a = gen_random(params, seed);
                let b = gen_random(params, seed);
                assert_eq!(a, b);
                assert_valid(&a);
                if params.master_list {
                    assert!(a.master_list_students.is_some());
                    assert!(a.master_list_courses.is_some());
                }
            }
        }
        // Distinct seeds eventually differ.
        assert_ne!(
            gen_random(&GenParams::small(), 0),
            gen_random(&GenParams::small(), 1)
        );
    }
}

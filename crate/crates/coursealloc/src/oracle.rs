//! Brute-force ground truth at tiny scale.
//!
//! Everything here is deliberately literal: [`enumerate_matchings`] walks
//! every subset of the acceptable pairs, [`blocking_witness_bruteforce`]
//! walks every (student, coalition, drop set) triple and applies the blocking
//! definition with no shortcuts, and [`max_stable_brute`] combines the two
//! into a census of an instance's matchings. The test suites use these as
//! oracles against the polynomial verifiers and the solvers.
//!
//! All walks follow one canonical order so that "the first witness" is
//! reproducible: acceptable pairs are ordered by student index then
//! preference rank, subsets are visited in binary-counter order over that
//! list (low bit = first element), and witness triples go by student index,
//! then coalition mask, then drop-set mask, with masks counting up over
//! rank-sorted course lists.
//!
//! Caps fail loudly with the size that was attempted; an oracle that silently
//! truncates is worse than none.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    check_matching, matching_size, BlockingWitness, CourseId, Instance, Matching, StabilityNotion,
    StudentId,
};
use crate::solve::LqMode;
use crate::verify::blocks;

/// Maximum number of acceptable pairs [`enumerate_matchings`] will take on
/// (the walk visits `2^pairs` subsets).
pub const ENUMERATION_PAIR_CAP: usize = 20;

/// Maximum per-student exponent for [`blocking_witness_bruteforce`]: a
/// student with `k` candidate courses and `a` assigned courses contributes
/// `2^(k+a)` triples, and `k + a` must stay within this bound.
pub const WITNESS_BIT_CAP: u32 = 20;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum OracleError {
    #[error("instance has {pairs} acceptable pairs; enumeration is capped at {cap}")]
    TooManyPairs { pairs: usize, cap: usize },
    #[error("witness search for {student} spans 2^{bits} triples; capped at 2^{cap}")]
    WitnessSpaceTooLarge {
        student: StudentId,
        bits: u32,
        cap: u32,
    },
    #[error("matching is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMatching(Vec<crate::model::MatchingViolation>),
}

/// Iterator over every valid matching of an instance, in binary-counter
/// order over the canonical acceptable-pair list. Created by
/// [`enumerate_matchings`].
pub struct MatchingEnumeration<'a> {
    inst: &'a Instance,
    pairs: Vec<(StudentId, CourseId)>,
    next_mask: u64,
    end_mask: u64,
}

impl Iterator for MatchingEnumeration<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        while self.next_mask < self.end_mask {
            let mask = self.next_mask;
            self.next_mask += 1;
            let m = Matching::new(
                self.pairs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p),
            );
            if check_matching(self.inst, &m).is_empty() {
                return Some(m);
            }
        }
        None
    }
}

/// Yields every valid matching of the instance exactly once — every subset
/// of the acceptable pairs that respects credit limits, upper quotas, and
/// feasibility rules — starting with the empty matching.
///
/// Errors if the instance has more than [`ENUMERATION_PAIR_CAP`] acceptable
/// pairs.
pub fn enumerate_matchings(inst: &Instance) -> Result<MatchingEnumeration<'_>, OracleError> {
    let pairs = inst.acceptable_pairs();
    if pairs.len() > ENUMERATION_PAIR_CAP {
        return Err(OracleError::TooManyPairs {
            pairs: pairs.len(),
            cap: ENUMERATION_PAIR_CAP,
        });
    }
    let end_mask = 1u64 << pairs.len();
    Ok(MatchingEnumeration {
        inst,
        pairs,
        next_mask: 0,
        end_mask,
    })
}

/// The definitional blocking oracle: enumerates every (student, coalition,
/// drop set) triple the notion permits and returns the first one that blocks
/// `m`, or `None` if the matching is stable under `notion`.
///
/// Candidate coalitions are all nonempty subsets of a student's unmatched
/// acceptable courses (singletons only for the pair notions); drop sets are
/// all subsets of her matched courses. Each triple is tested with
/// [`blocks`], the literal transcription of the definition.
pub fn blocking_witness_bruteforce(
    inst: &Instance,
    m: &Matching,
    notion: StabilityNotion,
) -> Result<Option<BlockingWitness>, OracleError> {
    let viols = check_matching(inst, m);
    if !viols.is_empty() {
        return Err(OracleError::InvalidMatching(viols));
    }
    for student in &inst.students {
        let s = student.id;
        let assigned: Vec<CourseId> = student
            .prefs
            .iter()
            .copied()
            .filter(|&c| m.contains(s, c))
            .collect();
        let unmatched: Vec<CourseId> = student
            .prefs
            .iter()
            .copied()
            .filter(|&c| !m.contains(s, c) && inst.course_rank_of(c, s).is_some())
            .collect();
        let bits = (unmatched.len() + assigned.len()) as u32;
        if bits > WITNESS_BIT_CAP {
            return Err(OracleError::WitnessSpaceTooLarge {
                student: s,
                bits,
                cap: WITNESS_BIT_CAP,
            });
        }
        let pick = |list: &[CourseId], mask: u64| -> Vec<CourseId> {
            list.iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &c)| c)
                .collect()
        };
        for b_mask in 1..(1u64 << unmatched.len()) {
            let coalition = pick(&unmatched, b_mask);
            if notion.is_pair_notion() && coalition.len() != 1 {
                continue;
            }
            for d_mask in 0..(1u64 << assigned.len()) {
                let drop = pick(&assigned, d_mask);
                if blocks(inst, m, s, &coalition, &drop, notion) {
                    return Ok(Some(BlockingWitness {
                        student: s,
                        coalition,
                        drop_set: drop,
                        notion,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Census of an instance produced by [`max_stable_brute`].
///
/// The counts always satisfy the implication chain between the notions:
/// `stable_counts[Pair] ≤ stable_counts[FirstCoalition] ≤
/// stable_counts[Coalition] ≤ stable_counts[PairSize]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnumerationReport {
    /// Valid matchings enumerated (after the lower-quota filter, if any).
    pub total_matchings: u64,
    /// How many of them are stable under each notion.
    pub stable_counts: BTreeMap<StabilityNotion, u64>,
    /// Largest credit size of a stable matching per notion, if any is stable.
    pub max_stable_size: BTreeMap<StabilityNotion, Option<u64>>,
}

/// Enumerates all matchings, tests each against all four notions with the
/// brute-force witness search, and reports counts and maximum stable sizes.
///
/// `lq` controls the lower-quota regime: `None` imposes nothing,
/// `NoClosures` keeps only matchings where every course meets its lower
/// quota, and `Closures` treats every under-lower-quota course as closed —
/// such a course must then be empty, and stability is judged on the
/// sub-instance with those courses closed, so nobody may block with them.
pub fn max_stable_brute(inst: &Instance, lq: LqMode) -> Result<EnumerationReport, OracleError> {
    let mut total = 0u64;
    let mut counts: BTreeMap<StabilityNotion, u64> =
        StabilityNotion::ALL.iter().map(|&n| (n, 0)).collect();
    let mut maxima: BTreeMap<StabilityNotion, Option<u64>> =
        StabilityNotion::ALL.iter().map(|&n| (n, None)).collect();
    for m in enumerate_matchings(inst)? {
        // Work out which instance to judge stability against, and whether
        // this matching is admissible under the lower-quota regime at all.
        let judge: Instance;
        let judge_ref: &Instance = match lq {
            LqMode::None => inst,
            LqMode::NoClosures => {
                if !meets_all_lower_quotas(inst, &m) {
                    continue;
                }
                inst
            }
            LqMode::Closures => {
                // A course with a positive lower quota is either closed
                // (empty) or open (meeting the quota); anything in between
                // makes the matching inadmissible.
                let Some(closed) = induced_closed_set(inst, &m) else {
                    continue;
                };
                judge = inst.with_courses_closed(&closed);
                &judge
            }
        };
        total += 1;
        let size = matching_size(inst, &m).credits;
        for &notion in &StabilityNotion::ALL {
            if blocking_witness_bruteforce(judge_ref, &m, notion)?.is_none() {
                *counts.get_mut(&notion).unwrap() += 1;
                let entry = maxima.get_mut(&notion).unwrap();
                *entry = Some(entry.map_or(size, |best| best.max(size)));
            }
        }
    }
    Ok(EnumerationReport {
        total_matchings: total,
        stable_counts: counts,
        max_stable_size: maxima,
    })
}

/// Whether every course with a positive lower quota has enough students.
pub fn meets_all_lower_quotas(inst: &Instance, m: &Matching) -> bool {
    inst.courses
        .iter()
        .all(|c| m.students_of(c.id).count() >= c.lower_quota as usize)
}

/// The closed set a matching forces under closure semantics: every empty
/// course with a positive lower quota must be closed, every staffed one must
/// meet its quota. Returns `None` when some course sits in between (closed
/// courses hold no students), making the matching inadmissible.
fn induced_closed_set(inst: &Instance, m: &Matching) -> Option<BTreeSet<CourseId>> {
    let mut closed = BTreeSet::new();
    for c in &inst.courses {
        if c.lower_quota == 0 {
            continue;
        }
        let staffed = m.students_of(c.id).count();
        if staffed == 0 {
            closed.insert(c.id);
        } else if staffed < c.lower_quota as usize {
            return None;
        }
    }
    Some(closed)
}

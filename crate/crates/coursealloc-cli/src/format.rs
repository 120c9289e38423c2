//! The instance file format: line-oriented UTF-8 text.
//!
//! A file is a sequence of bracketed sections. `[students]` and `[courses]`
//! declare the two sides, `[masterlist-students]` and `[masterlist-courses]`
//! give the optional global rankings (one label per line),
//! `[constraints]` lists feasibility rules, and `[matching]` optionally
//! names an assignment to examine:
//!
//! ```text
//! # a two-student instance
//! [students]
//! s1 credits=2 prefs=c1,c3,c2
//! s2 credits=1 prefs=c2,c1
//!
//! [courses]
//! c1 credits=1 upper=1 prefs=s2,s1
//! c2 credits=1 upper=1 prefs=s1,s2
//! c3 credits=2 upper=1 prefs=s1
//!
//! [matching]
//! s1 c3
//! s2 c2
//! ```
//!
//! `#` starts a comment, blank lines are ignored, and labels are drawn from
//! `[A-Za-z0-9_]+`. Course lines accept an optional `lower=<int>` between
//! `upper` and `prefs`; constraint lines are
//! `exclude <c1>,<c2>[,...]` or `atmost <k> of <c1>,...`, each optionally
//! scoped by `for <student>`. Parsing resolves labels to dense ids, then
//! runs the full instance validation, so a parsed instance is always a
//! valid one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use coursealloc::{
    validate_instance, Course, CourseId, Credits, FeasibilityRule, Instance, Matching, RuleKind,
    RuleOwner, Student, StudentId, Violation,
};
use thiserror::Error;

/// Why a file failed to parse.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Line {
        line,
        message: message.into(),
    })
}

/// A parsed file: the instance plus the `[matching]` section, if present.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParsedFile {
    pub instance: Instance,
    pub matching: Option<Matching>,
}

pub(crate) fn is_label(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn check_label(line: usize, s: &str) -> Result<(), ParseError> {
    if is_label(s) {
        Ok(())
    } else {
        err(line, format!("{s:?} is not a label ([A-Za-z0-9_]+)"))
    }
}

/// One section of a file: its name and the non-blank content lines with
/// their 1-based line numbers.
pub(crate) struct Section {
    pub name: &'static str,
    pub lines: Vec<(usize, String)>,
}

/// Splits a file into sections, stripping comments and blank lines.
/// `allowed` fixes the recognized section names; each may appear at most
/// once.
pub(crate) fn split_sections(
    text: &str,
    allowed: &[&'static str],
) -> Result<Vec<Section>, ParseError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line, "unterminated section header");
            };
            let Some(&known) = allowed.iter().find(|&&a| a == name) else {
                return err(
                    line,
                    format!(
                        "unknown section [{name}]; expected one of {}",
                        allowed.join(", ")
                    ),
                );
            };
            if sections.iter().any(|s| s.name == known) {
                return err(line, format!("section [{known}] appears twice"));
            }
            sections.push(Section {
                name: known,
                lines: Vec::new(),
            });
        } else {
            match sections.last_mut() {
                Some(s) => s.lines.push((line, content.to_string())),
                None => return err(line, "content before the first section header"),
            }
        }
    }
    Ok(sections)
}

/// Splits a comma-separated label list; an empty value is an empty list.
fn parse_label_list(line: usize, value: &str) -> Result<Vec<String>, ParseError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|l| check_label(line, l).map(|()| l.to_string()))
        .collect()
}

/// Parses the `key=value` tokens after a record's label, enforcing the
/// allowed key set and rejecting repeats.
fn parse_kv<'a>(
    line: usize,
    tokens: &[&'a str],
    allowed: &[&str],
) -> Result<BTreeMap<String, &'a str>, ParseError> {
    let mut map = BTreeMap::new();
    for t in tokens {
        let Some((key, value)) = t.split_once('=') else {
            return err(line, format!("expected key=value, found {t:?}"));
        };
        if !allowed.contains(&key) {
            return err(
                line,
                format!(
                    "unknown key {key:?}; expected one of {}",
                    allowed.join(", ")
                ),
            );
        }
        if map.insert(key.to_string(), value).is_some() {
            return err(line, format!("key {key:?} given twice"));
        }
    }
    Ok(map)
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ParseError> {
    value
        .parse()
        .or_else(|_| err(line, format!("{key}={value:?} is not a valid integer")))
}

fn require<'a>(
    line: usize,
    map: &BTreeMap<String, &'a str>,
    key: &str,
) -> Result<&'a str, ParseError> {
    match map.get(key) {
        Some(v) => Ok(v),
        None => err(line, format!("missing {key}=...")),
    }
}

struct RawStudent {
    line: usize,
    label: String,
    credits: Credits,
    prefs: Vec<String>,
}

struct RawCourse {
    line: usize,
    label: String,
    credits: Credits,
    upper: u32,
    lower: u32,
    prefs: Vec<String>,
}

struct RawRule {
    line: usize,
    kind: RawRuleKind,
    group: Vec<String>,
    owner: Option<String>,
}

enum RawRuleKind {
    Exclude,
    AtMost(u32),
}

/// Parses an instance file. See the module documentation for the format.
pub fn parse_instance(text: &str) -> Result<ParsedFile, ParseError> {
    let sections = split_sections(
        text,
        &[
            "students",
            "courses",
            "masterlist-students",
            "masterlist-courses",
            "constraints",
            "matching",
        ],
    )?;

    let mut students: Vec<RawStudent> = Vec::new();
    let mut courses: Vec<RawCourse> = Vec::new();
    let mut ml_students: Option<Vec<(usize, String)>> = None;
    let mut ml_courses: Option<Vec<(usize, String)>> = None;
    let mut rules: Vec<RawRule> = Vec::new();
    let mut matching: Option<Vec<(usize, String, String)>> = None;

    for section in sections {
        match section.name {
            "students" => {
                for (line, text) in &section.lines {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    check_label(*line, tokens[0])?;
                    let kv = parse_kv(*line, &tokens[1..], &["credits", "prefs"])?;
                    students.push(RawStudent {
                        line: *line,
                        label: tokens[0].to_string(),
                        credits: parse_int(*line, "credits", require(*line, &kv, "credits")?)?,
                        prefs: parse_label_list(*line, require(*line, &kv, "prefs")?)?,
                    });
                }
            }
            "courses" => {
                for (line, text) in &section.lines {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    check_label(*line, tokens[0])?;
                    let kv =
                        parse_kv(*line, &tokens[1..], &["credits", "upper", "lower", "prefs"])?;
                    courses.push(RawCourse {
                        line: *line,
                        label: tokens[0].to_string(),
                        credits: parse_int(*line, "credits", require(*line, &kv, "credits")?)?,
                        upper: parse_int(*line, "upper", require(*line, &kv, "upper")?)?,
                        lower: match kv.get("lower") {
                            Some(v) => parse_int(*line, "lower", v)?,
                            None => 0,
                        },
                        prefs: parse_label_list(*line, require(*line, &kv, "prefs")?)?,
                    });
                }
            }
            "masterlist-students" | "masterlist-courses" => {
                let mut entries = Vec::new();
                for (line, text) in section.lines {
                    check_label(line, &text)?;
                    entries.push((line, text));
                }
                if section.name == "masterlist-students" {
                    ml_students = Some(entries);
                } else {
                    ml_courses = Some(entries);
                }
            }
            "constraints" => {
                for (line, text) in &section.lines {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    let (kind, rest) = match tokens[0] {
                        "exclude" if tokens.len() >= 2 => (RawRuleKind::Exclude, &tokens[2..]),
                        "atmost" if tokens.len() >= 4 && tokens[2] == "of" => (
                            RawRuleKind::AtMost(parse_int(*line, "atmost", tokens[1])?),
                            &tokens[4..],
                        ),
                        _ => {
                            return err(
                                *line,
                                "expected `exclude <c,...>` or `atmost <k> of <c,...>`",
                            )
                        }
                    };
                    let group_token = match kind {
                        RawRuleKind::Exclude => tokens[1],
                        RawRuleKind::AtMost(_) => tokens[3],
                    };
                    let owner = match rest {
                        [] => None,
                        ["for", s] => {
                            check_label(*line, s)?;
                            Some(s.to_string())
                        }
                        _ => return err(*line, "trailing tokens; expected `for <student>`"),
                    };
                    rules.push(RawRule {
                        line: *line,
                        kind,
                        group: parse_label_list(*line, group_token)?,
                        owner,
                    });
                }
            }
            "matching" => {
                let mut pairs = Vec::new();
                for (line, text) in section.lines {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    let [s, c] = tokens[..] else {
                        return err(line, "expected `<student> <course>`");
                    };
                    check_label(line, s)?;
                    check_label(line, c)?;
                    pairs.push((line, s.to_string(), c.to_string()));
                }
                matching = Some(pairs);
            }
            _ => unreachable!("section names are fixed above"),
        }
    }

    // Resolve labels to dense ids.
    let mut sidx: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, s) in students.iter().enumerate() {
        if sidx.insert(&s.label, i).is_some() {
            return err(s.line, format!("student {:?} declared twice", s.label));
        }
    }
    let mut cidx: BTreeMap<&str, usize> = BTreeMap::new();
    for (j, c) in courses.iter().enumerate() {
        if cidx.insert(&c.label, j).is_some() {
            return err(c.line, format!("course {:?} declared twice", c.label));
        }
    }
    let sid = |line: usize, l: &str| match sidx.get(l) {
        Some(&i) => Ok(StudentId(i)),
        None => err(line, format!("unknown student {l:?}")),
    };
    let cid = |line: usize, l: &str| match cidx.get(l) {
        Some(&j) => Ok(CourseId(j)),
        None => err(line, format!("unknown course {l:?}")),
    };

    let instance = Instance {
        students: students
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Ok(Student {
                    id: StudentId(i),
                    label: s.label.clone(),
                    credit_limit: s.credits,
                    prefs: s
                        .prefs
                        .iter()
                        .map(|l| cid(s.line, l))
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<_, ParseError>>()?,
        courses: courses
            .iter()
            .enumerate()
            .map(|(j, c)| {
                Ok(Course {
                    id: CourseId(j),
                    label: c.label.clone(),
                    credits: c.credits,
                    upper_quota: c.upper,
                    lower_quota: c.lower,
                    prefs: c
                        .prefs
                        .iter()
                        .map(|l| sid(c.line, l))
                        .collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<_, ParseError>>()?,
        master_list_students: ml_students
            .map(|ls| {
                ls.iter()
                    .map(|(line, l)| sid(*line, l))
                    .collect::<Result<_, _>>()
            })
            .transpose()?,
        master_list_courses: ml_courses
            .map(|ls| {
                ls.iter()
                    .map(|(line, l)| cid(*line, l))
                    .collect::<Result<_, _>>()
            })
            .transpose()?,
        rules: rules
            .iter()
            .map(|r| {
                let group = r
                    .group
                    .iter()
                    .map(|l| cid(r.line, l))
                    .collect::<Result<_, _>>()?;
                Ok(FeasibilityRule {
                    kind: match r.kind {
                        RawRuleKind::Exclude => RuleKind::ExcludedCombination(group),
                        RawRuleKind::AtMost(k) => RuleKind::AtMostKOfGroup { k, group },
                    },
                    owner: match &r.owner {
                        Some(l) => RuleOwner::Student(sid(r.line, l)?),
                        None => RuleOwner::All,
                    },
                })
            })
            .collect::<Result<_, ParseError>>()?,
    };

    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        return Err(ParseError::Invalid(violations));
    }

    let matching = matching
        .map(|pairs| {
            let resolved = pairs
                .iter()
                .map(|(line, s, c)| Ok((sid(*line, s)?, cid(*line, c)?)))
                .collect::<Result<Vec<_>, ParseError>>()?;
            Ok(Matching::new(resolved))
        })
        .transpose()?;

    Ok(ParsedFile { instance, matching })
}

/// Renders an instance (and optionally a matching) in the file format.
/// The output parses back to an identical instance.
pub fn serialize_instance(inst: &Instance, matching: Option<&Matching>) -> String {
    let slabel = |s: StudentId| inst.students[s.0].label.as_str();
    let clabel = |c: CourseId| inst.courses[c.0].label.as_str();
    let join_c = |cs: &[CourseId]| cs.iter().map(|&c| clabel(c)).collect::<Vec<_>>().join(",");
    let join_s = |ss: &[StudentId]| ss.iter().map(|&s| slabel(s)).collect::<Vec<_>>().join(",");

    let mut out = String::new();
    out.push_str("[students]\n");
    for s in &inst.students {
        let _ = writeln!(
            out,
            "{} credits={} prefs={}",
            s.label,
            s.credit_limit,
            join_c(&s.prefs)
        );
    }
    out.push_str("\n[courses]\n");
    for c in &inst.courses {
        let lower = if c.lower_quota > 0 {
            format!(" lower={}", c.lower_quota)
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "{} credits={} upper={}{} prefs={}",
            c.label,
            c.credits,
            c.upper_quota,
            lower,
            join_s(&c.prefs)
        );
    }
    if let Some(ml) = &inst.master_list_students {
        out.push_str("\n[masterlist-students]\n");
        for &s in ml {
            let _ = writeln!(out, "{}", slabel(s));
        }
    }
    if let Some(ml) = &inst.master_list_courses {
        out.push_str("\n[masterlist-courses]\n");
        for &c in ml {
            let _ = writeln!(out, "{}", clabel(c));
        }
    }
    if !inst.rules.is_empty() {
        out.push_str("\n[constraints]\n");
        for rule in &inst.rules {
            let body = match &rule.kind {
                RuleKind::ExcludedCombination(group) => {
                    let cs: Vec<CourseId> = group.iter().copied().collect();
                    format!("exclude {}", join_c(&cs))
                }
                RuleKind::AtMostKOfGroup { k, group } => {
                    let cs: Vec<CourseId> = group.iter().copied().collect();
                    format!("atmost {} of {}", k, join_c(&cs))
                }
            };
            match rule.owner {
                RuleOwner::All => {
                    let _ = writeln!(out, "{body}");
                }
                RuleOwner::Student(s) => {
                    let _ = writeln!(out, "{body} for {}", slabel(s));
                }
            }
        }
    }
    if let Some(m) = matching {
        out.push_str("\n[matching]\n");
        for &(s, c) in m.pairs() {
            let _ = writeln!(out, "{} {}", slabel(s), clabel(c));
        }
    }
    out
}

/// Renders just a `[matching]` section, as printed by the solver commands.
pub fn serialize_matching(inst: &Instance, m: &Matching) -> String {
    let mut out = String::from("[matching]\n");
    for &(s, c) in m.pairs() {
        let _ = writeln!(
            out,
            "{} {}",
            inst.students[s.0].label, inst.courses[c.0].label
        );
    }
    out
}

//! Parsers for the source-problem files consumed by `reduce`.
//!
//! Each encoder has its own small line format, in the same comment/blank
//! conventions as instance files:
//!
//! - subset sum:
//!   ```text
//!   [subset-sum]
//!   sizes=3,5,7
//!   target=9
//!   ```
//! - hospitals/residents (`hrs`, `hrs-fc`):
//!   ```text
//!   [residents]
//!   r1 size=1 prefs=h2,h1
//!   [hospitals]
//!   h1 quota=2 prefs=r1,r2
//!   ```
//! - stable marriage with master-list ties (`smti`); ties are written
//!   `(wa|wb)` and may appear in men's lists and the women's master list:
//!   ```text
//!   [men]
//!   m1 prefs=(w1|w2)
//!   [women]
//!   w1 prefs=m1
//!   w2 prefs=m1
//!   [masterlist-men]
//!   m1
//!   [masterlist-women]
//!   (w1|w2)
//!   ```
//! - bipartite graphs (`min-mm`, `exact-mm`, `exact-mm-lq`): a target size
//!   and one `<u> <w>` edge per line; vertices are numbered per side in
//!   order of first appearance:
//!   ```text
//!   [graph]
//!   k=2
//!   u1 w1
//!   u2 w1
//!   ```

use std::collections::BTreeMap;

use coursealloc::{
    Credits, GraphInput, HrsHospital, HrsInput, HrsResident, SmtiInput, SmtiMan, SmtiWoman,
    SubsetSumInput,
};

use crate::format::{split_sections, ParseError, Section};

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Line {
        line,
        message: message.into(),
    })
}

fn label_list(line: usize, value: &str) -> Result<Vec<String>, ParseError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|l| {
            if crate::format::is_label(l) {
                Ok(l.to_string())
            } else {
                err(line, format!("{l:?} is not a label"))
            }
        })
        .collect()
}

/// Parses a record line of the shape `<label> <key>=<value> ...` where
/// `keys` lists the required keys in order.
fn record<'a>(
    line: usize,
    text: &'a str,
    keys: &[&str],
) -> Result<(String, Vec<&'a str>), ParseError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if !crate::format::is_label(tokens[0]) {
        return err(line, format!("{:?} is not a label", tokens[0]));
    }
    if tokens.len() != keys.len() + 1 {
        return err(
            line,
            format!(
                "expected `<label> {}`",
                keys.iter()
                    .map(|k| format!("{k}=..."))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        );
    }
    let mut values = Vec::new();
    for (token, key) in tokens[1..].iter().zip(keys) {
        match token.strip_prefix(&format!("{key}=")) {
            Some(v) => values.push(v),
            None => return err(line, format!("expected {key}=..., found {token:?}")),
        }
    }
    Ok((tokens[0].to_string(), values))
}

pub fn parse_subset_sum(text: &str) -> Result<SubsetSumInput, ParseError> {
    let sections = split_sections(text, &["subset-sum"])?;
    let mut sizes: Option<Vec<Credits>> = None;
    let mut target: Option<Credits> = None;
    let mut last_line = 0;
    for Section { lines, .. } in sections {
        for (line, text) in lines {
            last_line = line;
            let Some((key, value)) = text.split_once('=') else {
                return err(line, "expected sizes=... or target=...");
            };
            match (key.trim(), value.trim()) {
                ("sizes", v) => {
                    let parsed = v
                        .split(',')
                        .map(|x| x.trim().parse::<Credits>())
                        .collect::<Result<Vec<_>, _>>();
                    match parsed {
                        Ok(v) if !v.is_empty() && v.iter().all(|&s| s >= 1) => sizes = Some(v),
                        _ => return err(line, "sizes must be a comma list of positive integers"),
                    }
                }
                ("target", v) => match v.parse::<Credits>() {
                    Ok(t) if t >= 1 => target = Some(t),
                    _ => return err(line, "target must be a positive integer"),
                },
                (k, _) => return err(line, format!("unknown key {k:?}")),
            }
        }
    }
    match (sizes, target) {
        (Some(sizes), Some(target)) => Ok(SubsetSumInput { sizes, target }),
        _ => err(
            last_line,
            "a [subset-sum] section needs both sizes= and target=",
        ),
    }
}

pub fn parse_hrs(text: &str) -> Result<HrsInput, ParseError> {
    let sections = split_sections(text, &["residents", "hospitals"])?;
    let mut inp = HrsInput {
        residents: Vec::new(),
        hospitals: Vec::new(),
    };
    for section in sections {
        for (line, text) in &section.lines {
            match section.name {
                "residents" => {
                    let (label, values) = record(*line, text, &["size", "prefs"])?;
                    inp.residents.push(HrsResident {
                        label,
                        size: values[0]
                            .parse()
                            .or_else(|_| err(*line, "size must be an integer"))?,
                        prefs: label_list(*line, values[1])?,
                    });
                }
                _ => {
                    let (label, values) = record(*line, text, &["quota", "prefs"])?;
                    inp.hospitals.push(HrsHospital {
                        label,
                        quota: values[0]
                            .parse()
                            .or_else(|_| err(*line, "quota must be an integer"))?,
                        prefs: label_list(*line, values[1])?,
                    });
                }
            }
        }
    }
    Ok(inp)
}

/// Splits a list that may contain `(a|b)` tie groups into groups of labels.
fn tie_groups(line: usize, value: &str) -> Result<Vec<Vec<String>>, ParseError> {
    let mut groups = Vec::new();
    if value.is_empty() {
        return Ok(groups);
    }
    let mut rest = value;
    loop {
        if let Some(body) = rest.strip_prefix('(') {
            let Some((tie, tail)) = body.split_once(')') else {
                return err(line, "unterminated tie: missing `)`");
            };
            let members = tie
                .split('|')
                .map(|l| {
                    if crate::format::is_label(l) {
                        Ok(l.to_string())
                    } else {
                        err(line, format!("{l:?} is not a label"))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            groups.push(members);
            rest = tail;
        } else {
            let (head, tail) = match rest.find(',') {
                Some(i) => (&rest[..i], &rest[i..]),
                None => (rest, ""),
            };
            if !crate::format::is_label(head) {
                return err(line, format!("{head:?} is not a label"));
            }
            groups.push(vec![head.to_string()]);
            rest = tail;
        }
        match rest.strip_prefix(',') {
            Some(tail) => rest = tail,
            None if rest.is_empty() => return Ok(groups),
            None => return err(line, format!("expected `,` before {rest:?}")),
        }
    }
}

pub fn parse_smti(text: &str) -> Result<SmtiInput, ParseError> {
    let sections = split_sections(
        text,
        &["men", "women", "masterlist-men", "masterlist-women"],
    )?;
    let mut inp = SmtiInput {
        men: Vec::new(),
        women: Vec::new(),
        men_master: Vec::new(),
        women_master: Vec::new(),
    };
    for section in sections {
        for (line, text) in &section.lines {
            match section.name {
                "men" => {
                    let (label, values) = record(*line, text, &["prefs"])?;
                    inp.men.push(SmtiMan {
                        label,
                        prefs: tie_groups(*line, values[0])?,
                    });
                }
                "women" => {
                    let (label, values) = record(*line, text, &["prefs"])?;
                    inp.women.push(SmtiWoman {
                        label,
                        prefs: label_list(*line, values[0])?,
                    });
                }
                "masterlist-men" => {
                    if !crate::format::is_label(text) {
                        return err(*line, format!("{text:?} is not a label"));
                    }
                    inp.men_master.push(text.clone());
                }
                _ => {
                    let mut groups = tie_groups(*line, text)?;
                    if groups.len() != 1 {
                        return err(*line, "one woman or one tie per master-list line");
                    }
                    inp.women_master.push(groups.remove(0));
                }
            }
        }
    }
    Ok(inp)
}

pub fn parse_graph(text: &str) -> Result<GraphInput, ParseError> {
    let sections = split_sections(text, &["graph"])?;
    let mut k: Option<(usize, usize)> = None;
    let mut u_names: BTreeMap<String, usize> = BTreeMap::new();
    let mut w_names: BTreeMap<String, usize> = BTreeMap::new();
    let mut u_order = 0;
    let mut w_order = 0;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for Section { lines, .. } in sections {
        for (line, text) in lines {
            last_line = line;
            if let Some(v) = text.strip_prefix("k=") {
                match v.trim().parse() {
                    Ok(parsed) => k = Some((line, parsed)),
                    Err(_) => return err(line, "k must be an integer"),
                }
                continue;
            }
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let [u, w] = tokens[..] else {
                return err(line, "expected `k=<int>` or an edge `<u> <w>`");
            };
            let u = *u_names.entry(u.to_string()).or_insert_with(|| {
                u_order += 1;
                u_order - 1
            });
            let w = *w_names.entry(w.to_string()).or_insert_with(|| {
                w_order += 1;
                w_order - 1
            });
            edges.push((u, w));
        }
    }
    let Some((_, k)) = k else {
        return err(last_line, "a [graph] section needs k=<int>");
    };
    Ok(GraphInput {
        n_u: u_names.len(),
        n_w: w_names.len(),
        edges,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_sum_file_parses() {
        let inp = parse_subset_sum("[subset-sum]\nsizes=3,5,7\ntarget=9\n").unwrap();
        assert_eq!(
            inp,
            SubsetSumInput {
                sizes: vec![3, 5, 7],
                target: 9
            }
        );
        assert!(parse_subset_sum("[subset-sum]\nsizes=3\n").is_err());
        assert!(parse_subset_sum("[subset-sum]\nsizes=0\ntarget=1\n").is_err());
    }

    #[test]
    fn hrs_file_parses() {
        let text = "\
[residents]
r1 size=1 prefs=h2,h1
r2 size=2 prefs=h1

[hospitals]
h1 quota=2 prefs=r1,r2
h2 quota=1 prefs=r1
";
        let inp = parse_hrs(text).unwrap();
        assert_eq!(inp.residents.len(), 2);
        assert_eq!(inp.hospitals[1].quota, 1);
        assert_eq!(inp.residents[0].prefs, ["h2", "h1"]);
    }

    #[test]
    fn smti_file_parses_ties() {
        let text = "\
[men]
m1 prefs=(w1|w2),w3
m2 prefs=w3

[women]
w1 prefs=m1
w2 prefs=m1
w3 prefs=m1,m2

[masterlist-men]
m1
m2

[masterlist-women]
(w1|w2)
w3
";
        let inp = parse_smti(text).unwrap();
        assert_eq!(
            inp.men[0].prefs,
            vec![
                vec!["w1".to_string(), "w2".to_string()],
                vec!["w3".to_string()]
            ]
        );
        assert_eq!(inp.women_master.len(), 2);
        assert_eq!(
            inp.women_master[0],
            vec!["w1".to_string(), "w2".to_string()]
        );
        assert!(parse_smti("[men]\nm1 prefs=(w1|w2\n").is_err());
    }

    #[test]
    fn graph_file_numbers_vertices_by_first_appearance() {
        let text = "\
[graph]
k=2
a x
b x
a y
b y
";
        let g = parse_graph(text).unwrap();
        assert_eq!((g.n_u, g.n_w, g.k), (2, 2, 2));
        assert_eq!(g.edges, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
        assert!(parse_graph("[graph]\na x\n").is_err());
    }
}

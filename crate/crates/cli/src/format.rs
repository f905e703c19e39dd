//! Text formats: presentation files and line-oriented traces.
//!
//! ```text
//! # comment
//! class 2
//! gen x1 1
//! gen g_1_2 2 x1 x2
//! rel g_1_2^-1 x1^-1 x2^-1 x1 x2
//! ```
//!
//! A `gen` line may carry the two letters a compound generator is the
//! commutator of. Traces start with `word:` and `presentation:` headers,
//! list one move per line and end with `qed`.

use std::fmt::Write as _;

use nilfill_core::sequence::{apply_move_in_place, Metrics};
use nilfill_core::{Generator, Letter, Move, PSequence, Presentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct FormatError {
    pub line: usize,
    pub reason: String,
}

fn err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError { line, reason: reason.into() }
}

pub fn write_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    writeln!(out, "class {}", p.class).unwrap();
    for g in &p.generators {
        match g.definition {
            Some((x, y)) => writeln!(
                out,
                "gen {} {} {} {}",
                g.name, g.weight, p.generators[x as usize].name, p.generators[y as usize].name
            )
            .unwrap(),
            None => writeln!(out, "gen {} {}", g.name, g.weight).unwrap(),
        }
    }
    for r in &p.relators {
        writeln!(out, "rel {}", p.format_word(r)).unwrap();
    }
    out
}

pub fn parse_presentation(text: &str) -> Result<Presentation, FormatError> {
    let mut class = None;
    let mut generators: Vec<Generator> = Vec::new();
    let mut rel_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match key {
            "class" => class = Some(rest.trim().parse::<u32>().map_err(|_| err(line_no, "bad class"))?),
            "gen" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 && parts.len() != 4 {
                    return Err(err(line_no, "expected `gen NAME WEIGHT [X Y]`"));
                }
                if !nilfill_core::presentation::is_valid_name(parts[0]) {
                    return Err(err(line_no, format!("bad generator name {}", parts[0])));
                }
                let weight = parts[1].parse::<u32>().map_err(|_| err(line_no, "bad weight"))?;
                let definition = if parts.len() == 4 {
                    let find = |name: &str| {
                        generators
                            .iter()
                            .position(|g| g.name == name)
                            .map(|x| x as u32)
                            .ok_or_else(|| err(line_no, format!("unknown generator {name}")))
                    };
                    Some((find(parts[2])?, find(parts[3])?))
                } else {
                    None
                };
                generators.push(Generator { name: parts[0].to_string(), weight, definition });
            }
            "rel" => rel_lines.push((line_no, rest.to_string())),
            other => return Err(err(line_no, format!("unknown directive {other}"))),
        }
    }
    let class = class.ok_or_else(|| err(0, "missing class line"))?;
    let mut p = Presentation::new(generators, Vec::new(), class);
    for (line_no, text) in rel_lines {
        let w = p.parse_word(&text).map_err(|e| err(line_no, e.to_string()))?;
        p.relators.push(w);
    }
    Ok(p)
}

pub fn write_trace(p: &Presentation, t: &PSequence, presentation_path: &str) -> String {
    let mut out = String::new();
    writeln!(out, "word: {}", p.format_word(&t.initial)).unwrap();
    writeln!(out, "presentation: {presentation_path}").unwrap();
    for mv in &t.moves {
        match *mv {
            Move::FreeReduction { pos } => writeln!(out, "fr {pos}"),
            Move::FreeExpansion { pos, letter } => writeln!(out, "fe {pos} {}", p.format_letter(letter)),
            Move::RelatorApplication { pos, relator, shift, inverted, split } => {
                writeln!(out, "ar {pos} {relator} {shift} {} {split}", inverted as u8)
            }
        }
        .unwrap();
    }
    out.push_str("qed\n");
    out
}

/// A parsed trace with the file line of every move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub sequence: PSequence,
    pub presentation_path: String,
    pub lines: Vec<usize>,
    pub qed_line: usize,
}

fn parse_letter(p: &Presentation, token: &str, line: usize) -> Result<Letter, FormatError> {
    let w = p.parse_word(token).map_err(|e| err(line, e.to_string()))?;
    match w.letters() {
        [l] => Ok(*l),
        _ => Err(err(line, format!("expected a single letter, got {token}"))),
    }
}

fn parse_num<T: std::str::FromStr>(token: Option<&str>, what: &str, line: usize) -> Result<T, FormatError> {
    token
        .ok_or_else(|| err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| err(line, format!("bad {what}")))
}

pub fn parse_trace(text: &str, p: &Presentation) -> Result<Trace, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (n1, first) = lines.next().ok_or_else(|| err(1, "empty trace"))?;
    let word_text = first.strip_prefix("word:").ok_or_else(|| err(n1, "expected `word:` header"))?;
    let initial = p.parse_word(word_text).map_err(|e| err(n1, e.to_string()))?;
    let (n2, second) = lines.next().ok_or_else(|| err(2, "missing `presentation:` header"))?;
    let presentation_path = second
        .strip_prefix("presentation:")
        .ok_or_else(|| err(n2, "expected `presentation:` header"))?
        .trim()
        .to_string();
    let mut moves = Vec::new();
    let mut move_lines = Vec::new();
    let mut closed = None;
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        if closed.is_some() {
            return Err(err(n, "content after qed"));
        }
        let mut tok = line.split_whitespace();
        let mv = match tok.next() {
            Some("qed") => {
                closed = Some(n);
                continue;
            }
            Some("fr") => Move::FreeReduction { pos: parse_num(tok.next(), "position", n)? },
            Some("fe") => {
                let pos = parse_num(tok.next(), "position", n)?;
                let letter = parse_letter(p, tok.next().ok_or_else(|| err(n, "missing letter"))?, n)?;
                Move::FreeExpansion { pos, letter }
            }
            Some("ar") => {
                let pos = parse_num(tok.next(), "position", n)?;
                let relator = parse_num(tok.next(), "relator id", n)?;
                let shift = parse_num(tok.next(), "shift", n)?;
                let inverted = match tok.next() {
                    Some("0") => false,
                    Some("1") => true,
                    _ => return Err(err(n, "inverted flag must be 0 or 1")),
                };
                let split = parse_num(tok.next(), "split", n)?;
                Move::RelatorApplication { pos, relator, shift, inverted, split }
            }
            Some(other) => return Err(err(n, format!("unknown move {other}"))),
            None => unreachable!(),
        };
        if tok.next().is_some() {
            return Err(err(n, "trailing tokens"));
        }
        moves.push(mv);
        move_lines.push(n);
    }
    let qed_line = closed.ok_or_else(|| err(text.lines().count() + 1, "missing qed"))?;
    Ok(Trace { sequence: PSequence { initial, moves }, presentation_path, lines: move_lines, qed_line })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok(Metrics),
    Error { line: usize, reason: String },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok(_))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Ok(m) => write!(f, "ok area={} fl={} height={}", m.area, m.fl, m.height),
            Verdict::Error { line, reason } => write!(f, "error line={line} {reason}"),
        }
    }
}

/// Parses and replays a trace. The final word must be empty unless
/// `expected_final` is given, in which case it must match exactly.
pub fn validate_trace(text: &str, p: &Presentation, expected_final: Option<&Word>) -> Verdict {
    let trace = match parse_trace(text, p) {
        Ok(t) => t,
        Err(e) => return Verdict::Error { line: e.line, reason: e.reason },
    };
    let mut w = trace.sequence.initial.letters().to_vec();
    let mut metrics = Metrics { area: 0, fl: w.len() as u64, height: 0, final_length: w.len() as u64 };
    for (mv, &line) in trace.sequence.moves.iter().zip(&trace.lines) {
        if let Err(reason) = apply_move_in_place(&mut w, mv, p) {
            return Verdict::Error { line, reason };
        }
        metrics.height += 1;
        metrics.area += mv.is_relator() as u64;
        metrics.fl = metrics.fl.max(w.len() as u64);
    }
    metrics.final_length = w.len() as u64;
    let qed_line = trace.qed_line;
    match expected_final {
        None if !w.is_empty() => {
            Verdict::Error { line: qed_line, reason: format!("final word has length {}, expected empty", w.len()) }
        }
        Some(target) if w[..] != target[..] => Verdict::Error {
            line: qed_line,
            reason: format!("final word {} differs from {}", p.format_word(&w), p.format_word(target)),
        },
        _ => Verdict::Ok(metrics),
    }
}

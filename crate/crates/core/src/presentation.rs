//! Finite presentations, the word text grammar, and the chain presentations
//! of free nilpotent groups.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::ParseError;
use crate::word::{nested_commutator_letters, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// Position in the lower central series filtration, `1..=class`.
    pub weight: u32,
    /// For compound letters, the pair `(x, y)` with the letter standing for `[x, y]`.
    pub definition: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relators: Vec<Word>,
    pub class: u32,
}

impl Presentation {
    pub fn new(generators: Vec<Generator>, relators: Vec<Word>, class: u32) -> Self {
        Presentation { generators, relators, class }
    }

    /// Maximum relator length, 0 for an empty relator list.
    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    pub fn generator_id(&self, name: &str) -> Option<u32> {
        self.generators.iter().position(|g| g.name == name).map(|i| i as u32)
    }

    pub fn weight(&self, l: Letter) -> u32 {
        self.generators[l.generator() as usize].weight
    }

    /// Every letter of every relator names a declared generator.
    pub fn check(&self) -> Result<(), ParseError> {
        for (i, r) in self.relators.iter().enumerate() {
            if let Some(l) = r.iter().find(|l| l.generator() as usize >= self.generators.len()) {
                return Err(ParseError::UnknownGenerator(format!(
                    "relator {i} uses undeclared generator #{}",
                    l.generator()
                )));
            }
        }
        Ok(())
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        parse_word_with(text, |name| self.generator_id(name))
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        format_word_with(w, |g| self.generators[g as usize].name.as_str())
    }

    pub fn format_letter(&self, l: Letter) -> String {
        let name = &self.generators[l.generator() as usize].name;
        if l.is_inverse() {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Parses whitespace-separated `NAME` / `NAME^INT` tokens.
pub fn parse_word_with<F>(text: &str, mut lookup: F) -> Result<Word, ParseError>
where
    F: FnMut(&str) -> Option<u32>,
{
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        let (name, exp) = match token.split_once('^') {
            Some((name, exp)) => {
                let e: i64 = exp
                    .parse()
                    .map_err(|_| ParseError::BadExponent(token.to_string()))?;
                if e == 0 {
                    return Err(ParseError::BadExponent(token.to_string()));
                }
                (name, e)
            }
            None => (token, 1),
        };
        if !is_valid_name(name) {
            return Err(ParseError::BadName(name.to_string()));
        }
        let g = lookup(name).ok_or_else(|| ParseError::UnknownGenerator(name.to_string()))?;
        let l = Letter::new(g, exp < 0);
        for _ in 0..exp.unsigned_abs() {
            letters.push(l);
        }
    }
    Ok(Word::from_letters(letters))
}

/// Formats with runs of a repeated letter collapsed to `NAME^k`.
pub fn format_word_with<'a, F>(w: &[Letter], name: F) -> String
where
    F: Fn(u32) -> &'a str,
{
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let l = w[i];
        let mut j = i + 1;
        while j < w.len() && w[j] == l {
            j += 1;
        }
        let run = (j - i) as i64;
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(name(l.generator()));
        let e = if l.is_inverse() { -run } else { run };
        if e != 1 {
            let _ = write!(out, "^{e}");
        }
        i = j;
    }
    out
}

/// All nested commutators `[y_1, ..., y_len]` with each `y_j` ranging over
/// `gens^{±1}`, dropping freely trivial ones and exact duplicates. Order is
/// lexicographic in `(y_1, ..., y_len)` with `g` before `g^-1`.
pub fn nested_commutator_family(gens: &[u32], len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = gens
        .iter()
        .flat_map(|&g| [Letter::pos(g), Letter::neg(g)])
        .collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    if alphabet.is_empty() || len == 0 {
        return out;
    }
    let mut idx = alloc::vec![0usize; len];
    loop {
        let letters: Vec<Letter> = idx.iter().map(|&i| alphabet[i]).collect();
        let w = nested_commutator_letters(&letters);
        if !w.is_freely_trivial() && seen.insert(w.clone()) {
            out.push(w);
        }
        // odometer, last position fastest
        let mut k = len;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < alphabet.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Chain presentation `P_k` of the free nilpotent group of class `c + 1 - k`
/// on generators `x_k, ..., x_c`.
pub fn build_chain_presentation(c: u32, k: u32) -> Presentation {
    assert!(c >= 1 && (1..=c).contains(&k), "chain presentation needs 1 <= k <= c");
    let generators: Vec<Generator> = (k..=c)
        .map(|i| Generator { name: format!("x{i}"), weight: 1, definition: None })
        .collect();
    let ids: Vec<u32> = (0..generators.len() as u32).collect();
    let relators = nested_commutator_family(&ids, (c + 2 - k) as usize);
    Presentation::new(generators, relators, c + 1 - k)
}

/// Identifies an applied relator: rotation `shift` of `r_id` (or of its inverse).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelatorRef {
    pub id: u32,
    pub shift: u32,
    pub inverted: bool,
}

/// Lookup from every cyclic conjugate of every relator and inverse to the
/// first relator that produces it.
#[derive(Clone, Debug, Default)]
pub struct RelatorIndex {
    map: BTreeMap<Word, RelatorRef>,
}

impl RelatorIndex {
    pub fn new(p: &Presentation) -> Self {
        let mut map = BTreeMap::new();
        for (id, r) in p.relators.iter().enumerate() {
            for inverted in [false, true] {
                let base = if inverted { r.inverse() } else { r.clone() };
                for shift in 0..base.len() {
                    map.entry(base.rotate(shift)).or_insert(RelatorRef {
                        id: id as u32,
                        shift: shift as u32,
                        inverted,
                    });
                }
            }
        }
        RelatorIndex { map }
    }

    pub fn lookup(&self, cyclic_word: &[Letter]) -> Option<RelatorRef> {
        // BTreeMap<Word, _> can be probed with a slice through Borrow.
        self.map.get(cyclic_word).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl core::borrow::Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        self.letters()
    }
}

/// The cyclic conjugate `rotate(r^{±1}, shift)` named by a relator reference.
pub fn relator_word(p: &Presentation, r: RelatorRef) -> Word {
    let base = &p.relators[r.id as usize];
    let w = if r.inverted { base.inverse() } else { base.clone() };
    w.rotate(r.shift as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_c2_k2_is_cyclic() {
        let p = build_chain_presentation(2, 2);
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
        assert_eq!(p.max_relator_len(), 0);
        assert_eq!(p.class, 1);
    }

    /// Independent count: enumerate the 4^3 raw triples, expand each
    /// commutator by a separate recursion, reduce with a naive
    /// repeated-scan reducer, and count distinct nontrivial results.
    #[test]
    fn chain_c2_k1_counts() {
        fn expand(ys: &[(u32, bool)]) -> Vec<(u32, bool)> {
            if ys.len() == 1 {
                return ys.to_vec();
            }
            let a = alloc::vec![ys[0]];
            let b = expand(&ys[1..]);
            let inv = |w: &Vec<(u32, bool)>| -> Vec<(u32, bool)> {
                w.iter().rev().map(|&(g, s)| (g, !s)).collect()
            };
            let mut out = inv(&a);
            out.extend(inv(&b));
            out.extend(a);
            out.extend(b);
            out
        }
        fn naive_reduce(mut w: Vec<(u32, bool)>) -> Vec<(u32, bool)> {
            loop {
                let hit = (0..w.len().saturating_sub(1))
                    .find(|&i| w[i].0 == w[i + 1].0 && w[i].1 != w[i + 1].1);
                match hit {
                    Some(i) => {
                        w.drain(i..i + 2);
                    }
                    None => return w,
                }
            }
        }
        let alphabet = [(0, false), (0, true), (1, false), (1, true)];
        let mut raw = 0;
        let mut distinct = BTreeSet::new();
        for a in alphabet {
            for b in alphabet {
                for c in alphabet {
                    raw += 1;
                    let w = expand(&[a, b, c]);
                    if !naive_reduce(w.clone()).is_empty() {
                        distinct.insert(w);
                    }
                }
            }
        }
        assert_eq!(raw, 64);
        let p = build_chain_presentation(2, 1);
        assert_eq!(p.relators.len(), distinct.len());
        assert_eq!(p.max_relator_len(), 10);
    }

    #[test]
    fn grammar_round_trip() {
        let p = build_chain_presentation(3, 1);
        let w = p.parse_word("x1^-3 x2 x2 x3^2 x1").unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(p.format_word(&w), "x1^-3 x2^2 x3^2 x1");
        assert_eq!(p.parse_word(&p.format_word(&w)).unwrap(), w);
        assert!(p.parse_word("").unwrap().is_empty());
        assert!(matches!(p.parse_word("x1^0"), Err(ParseError::BadExponent(_))));
        assert!(matches!(p.parse_word("X1"), Err(ParseError::BadName(_))));
        assert!(matches!(p.parse_word("x9"), Err(ParseError::UnknownGenerator(_))));
    }

    #[test]
    fn index_finds_rotations() {
        let p = build_chain_presentation(2, 1);
        let idx = RelatorIndex::new(&p);
        let r = &p.relators[3];
        let rot = r.inverse().rotate(2);
        let found = idx.lookup(&rot).unwrap();
        assert_eq!(relator_word(&p, found), rot);
    }
}

//! P-sequences: moves, replay, exact metrics, and the sequence combinators
//! used by the compression and filling constructions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::presentation::{Presentation, RelatorIndex, RelatorRef};
use crate::word::{Letter, Word};

/// One elementary step. Positions are 0-based letter indices into the
/// current word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Remove the inverse pair at `pos, pos + 1`.
    FreeReduction { pos: u32 },
    /// Insert `letter letter^-1` before index `pos`.
    FreeExpansion { pos: u32, letter: Letter },
    /// With `r' = rotate(r^{±1}, shift) = u w`, `|u| = split`: replace the
    /// occurrence of `u` at `pos` by `w^-1`.
    RelatorApplication { pos: u32, relator: u32, shift: u32, inverted: bool, split: u32 },
}

impl Move {
    pub fn is_relator(&self) -> bool {
        matches!(self, Move::RelatorApplication { .. })
    }

    pub fn shifted(self, offset: usize) -> Move {
        let o = offset as u32;
        match self {
            Move::FreeReduction { pos } => Move::FreeReduction { pos: pos + o },
            Move::FreeExpansion { pos, letter } => Move::FreeExpansion { pos: pos + o, letter },
            Move::RelatorApplication { pos, relator, shift, inverted, split } => {
                Move::RelatorApplication { pos: pos + o, relator, shift, inverted, split }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PSequence {
    pub initial: Word,
    pub moves: Vec<Move>,
}

impl PSequence {
    pub fn trivial(initial: Word) -> Self {
        PSequence { initial, moves: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    pub area: u64,
    pub fl: u64,
    pub height: u64,
    pub final_length: u64,
}

impl Metrics {
    fn start(len: usize) -> Self {
        Metrics { area: 0, fl: len as u64, height: 0, final_length: len as u64 }
    }

    fn record(&mut self, mv: &Move, len: usize) {
        self.height += 1;
        if mv.is_relator() {
            self.area += 1;
        }
        self.fl = self.fl.max(len as u64);
        self.final_length = len as u64;
    }
}

#[inline]
fn relator_letter(r: &[Letter], inverted: bool, shift: usize, i: usize) -> Letter {
    let n = r.len();
    let j = (shift + i) % n;
    if inverted {
        r[n - 1 - j].inverse()
    } else {
        r[j]
    }
}

/// Applies one move in place. On failure the word is left untouched.
pub fn apply_move_in_place(
    w: &mut Vec<Letter>,
    mv: &Move,
    p: &Presentation,
) -> core::result::Result<(), String> {
    match *mv {
        Move::FreeReduction { pos } => {
            let pos = pos as usize;
            if pos + 1 >= w.len() {
                return Err(format!("free reduction at {pos} beyond word of length {}", w.len()));
            }
            if !w[pos].cancels(w[pos + 1]) {
                return Err(format!("letters at {pos} and {} are not inverse", pos + 1));
            }
            w.drain(pos..pos + 2);
        }
        Move::FreeExpansion { pos, letter } => {
            let pos = pos as usize;
            if pos > w.len() {
                return Err(format!("free expansion at {pos} beyond word of length {}", w.len()));
            }
            if letter.generator() as usize >= p.generators.len() {
                return Err(format!("undeclared generator #{}", letter.generator()));
            }
            w.splice(pos..pos, [letter, letter.inverse()]);
        }
        Move::RelatorApplication { pos, relator, shift, inverted, split } => {
            let r = p
                .relators
                .get(relator as usize)
                .ok_or_else(|| format!("no relator with id {relator}"))?;
            let (pos, shift, split) = (pos as usize, shift as usize, split as usize);
            let n = r.len();
            if shift >= n.max(1) || split > n {
                return Err(format!("shift {shift} or split {split} out of range for relator {relator}"));
            }
            if pos + split > w.len() {
                return Err(format!("relator prefix at {pos} runs past the end of the word"));
            }
            for i in 0..split {
                if w[pos + i] != relator_letter(r, inverted, shift, i) {
                    return Err(format!("relator prefix does not occur at {pos}"));
                }
            }
            // v = (r'[split..])^-1
            let v = (0..n - split).map(|j| relator_letter(r, inverted, shift, n - 1 - j).inverse());
            w.splice(pos..pos + split, v);
        }
    }
    Ok(())
}

pub fn apply_move(w: &Word, mv: &Move, p: &Presentation) -> Result<Word> {
    let mut v = w.letters().to_vec();
    apply_move_in_place(&mut v, mv, p).map_err(|reason| Error::NotApplicable { index: 0, reason })?;
    Ok(Word::from_letters(v))
}

/// Replays every move, returning exact metrics and the final word.
pub fn replay(p: &Presentation, t: &PSequence) -> Result<(Metrics, Word)> {
    replay_with(p, t, |_, _| {})
}

/// Replay that also hands every intermediate word (after each move) to `visit`.
pub fn replay_with<F>(p: &Presentation, t: &PSequence, mut visit: F) -> Result<(Metrics, Word)>
where
    F: FnMut(usize, &[Letter]),
{
    let mut w = t.initial.letters().to_vec();
    let mut m = Metrics::start(w.len());
    for (index, mv) in t.moves.iter().enumerate() {
        apply_move_in_place(&mut w, mv, p).map_err(|reason| Error::NotApplicable { index, reason })?;
        m.record(mv, w.len());
        visit(index, &w);
    }
    Ok((m, Word::from_letters(w)))
}

/// Replay that additionally requires the final word to be empty.
pub fn validate_null(p: &Presentation, t: &PSequence) -> Result<Metrics> {
    let (m, fin) = replay(p, t)?;
    if !fin.is_empty() {
        return Err(Error::NotNull { final_length: fin.len() });
    }
    Ok(m)
}

/// Rewrites every relator application into a whole-relator insertion
/// followed by free reductions. Area is unchanged and FL grows by at most
/// the maximum relator length.
pub fn normalize_insertions(p: &Presentation, t: &PSequence) -> Result<PSequence> {
    replay(p, t)?;
    let mut moves = Vec::with_capacity(t.moves.len());
    for mv in &t.moves {
        match *mv {
            Move::RelatorApplication { pos, relator, shift, inverted, split } if split > 0 => {
                // r' = u w: insert r'^-1 = w^-1 u^-1 in front of u, then
                // cancel u^-1 u
                let n = p.relators[relator as usize].len() as u32;
                moves.push(Move::RelatorApplication { pos, relator, shift, inverted, split: 0 });
                let junction = pos + n;
                for i in 0..split {
                    moves.push(Move::FreeReduction { pos: junction - 1 - i });
                }
            }
            other => moves.push(other),
        }
    }
    Ok(PSequence { initial: t.initial.clone(), moves })
}

/// The sequence obtained by inverting every word: runs from `w_0^-1` to
/// `w_m^-1` with identical metrics.
pub fn invert_sequence(p: &Presentation, t: &PSequence) -> Result<PSequence> {
    replay(p, t)?;
    let mut len = t.initial.len() as u32;
    let mut moves = Vec::with_capacity(t.moves.len());
    for mv in &t.moves {
        match *mv {
            Move::FreeReduction { pos } => {
                moves.push(Move::FreeReduction { pos: len - pos - 2 });
                len -= 2;
            }
            Move::FreeExpansion { pos, letter } => {
                moves.push(Move::FreeExpansion { pos: len - pos, letter });
                len += 2;
            }
            Move::RelatorApplication { pos, relator, shift, inverted, split } => {
                let n = p.relators[relator as usize].len() as u32;
                let j = (shift + split) % n;
                moves.push(Move::RelatorApplication {
                    pos: len - pos - split,
                    relator,
                    shift: (n - j) % n,
                    inverted: !inverted,
                    split,
                });
                len = len + n - 2 * split;
            }
        }
    }
    Ok(PSequence { initial: t.initial.inverse(), moves })
}

pub fn concatenate(p: &Presentation, t1: &PSequence, t2: &PSequence) -> Result<PSequence> {
    let (_, fin) = replay(p, t1)?;
    if fin != t2.initial {
        return Err(Error::EndpointMismatch);
    }
    let mut moves = t1.moves.clone();
    moves.extend_from_slice(&t2.moves);
    Ok(PSequence { initial: t1.initial.clone(), moves })
}

/// A valid random sequence from a random word of length `initial_len`:
/// free moves, relator insertions, and relator applications that consume
/// a matching prefix wherever one is found.
pub fn random_sequence<R: rand::Rng>(p: &Presentation, rng: &mut R, initial_len: usize, steps: usize) -> PSequence {
    let gens = p.generators.len() as u32;
    let initial: Word = (0..initial_len).map(|_| Letter::new(rng.gen_range(0..gens), rng.gen_bool(0.5))).collect();
    let mut w = initial.letters().to_vec();
    let mut moves = Vec::with_capacity(steps);
    while moves.len() < steps {
        let mv = match rng.gen_range(0..4) {
            0 => {
                let pairs: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i].cancels(w[i + 1])).collect();
                if pairs.is_empty() {
                    continue;
                }
                Move::FreeReduction { pos: pairs[rng.gen_range(0..pairs.len())] as u32 }
            }
            1 => Move::FreeExpansion {
                pos: rng.gen_range(0..=w.len()) as u32,
                letter: Letter::new(rng.gen_range(0..gens), rng.gen_bool(0.5)),
            },
            _ if p.relators.is_empty() => continue,
            _ => {
                let pos = rng.gen_range(0..=w.len());
                let mut found = Vec::new();
                for (id, r) in p.relators.iter().enumerate() {
                    let n = r.len();
                    for inverted in [false, true] {
                        let sigma = if inverted { r.inverse() } else { r.clone() };
                        for shift in 0..n {
                            let rot = sigma.rotate(shift);
                            let mut split = 0;
                            while split < n && pos + split < w.len() && rot[split] == w[pos + split] {
                                split += 1;
                            }
                            if split > 0 {
                                found.push((id, shift, inverted, split));
                            }
                        }
                    }
                }
                let (relator, shift, inverted, split) = if found.is_empty() || rng.gen_bool(0.3) {
                    let id = rng.gen_range(0..p.relators.len());
                    (id, rng.gen_range(0..p.relators[id].len()), rng.gen_bool(0.5), 0)
                } else {
                    let (id, shift, inverted, max) = found[rng.gen_range(0..found.len())];
                    (id, shift, inverted, rng.gen_range(1..=max))
                };
                Move::RelatorApplication {
                    pos: pos as u32,
                    relator: relator as u32,
                    shift: shift as u32,
                    inverted,
                    split: split as u32,
                }
            }
        };
        apply_move_in_place(&mut w, &mv, p).expect("generated move applies");
        moves.push(mv);
    }
    PSequence { initial, moves }
}

/// Incrementally builds a sequence while keeping the current word, so every
/// emitted move is checked as it is recorded.
pub struct Builder<'a> {
    p: &'a Presentation,
    index: &'a RelatorIndex,
    initial: Word,
    word: Vec<Letter>,
    moves: Vec<Move>,
    metrics: Metrics,
    scratch: Vec<Letter>,
}

impl<'a> Builder<'a> {
    pub fn new(p: &'a Presentation, index: &'a RelatorIndex, initial: Word) -> Self {
        let word = initial.letters().to_vec();
        let metrics = Metrics::start(word.len());
        Builder { p, index, initial, word, moves: Vec::new(), metrics, scratch: Vec::new() }
    }

    pub fn presentation(&self) -> &'a Presentation {
        self.p
    }

    pub fn index(&self) -> &'a RelatorIndex {
        self.index
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn metrics(&self) -> Metrics {
        self.metrics
    }

    pub fn moves_len(&self) -> usize {
        self.moves.len()
    }

    pub fn apply(&mut self, mv: Move) -> Result<()> {
        let index = self.moves.len();
        apply_move_in_place(&mut self.word, &mv, self.p)
            .map_err(|reason| Error::NotApplicable { index, reason })?;
        self.metrics.record(&mv, self.word.len());
        self.moves.push(mv);
        Ok(())
    }

    pub fn free_reduce_at(&mut self, pos: usize) -> Result<()> {
        self.apply(Move::FreeReduction { pos: pos as u32 })
    }

    pub fn free_expand_at(&mut self, pos: usize, letter: Letter) -> Result<()> {
        self.apply(Move::FreeExpansion { pos: pos as u32, letter })
    }

    /// Inserts `w w^-1` before index `pos` using `|w|` free expansions.
    pub fn expand_pair(&mut self, pos: usize, w: &[Letter]) -> Result<()> {
        for (i, &l) in w.iter().enumerate() {
            self.free_expand_at(pos + i, l)?;
        }
        Ok(())
    }

    /// Inserts a freely trivial word before `pos`, unfolding it as
    /// `a u a^-1 v` with `u`, `v` freely trivial.
    pub fn insert_trivial(&mut self, mut pos: usize, mut w: &[Letter]) -> Result<()> {
        while !w.is_empty() {
            let mut stack: Vec<Letter> = Vec::new();
            let mut close = None;
            for (i, &l) in w.iter().enumerate() {
                match stack.last() {
                    Some(&top) if top.cancels(l) => {
                        stack.pop();
                    }
                    _ => stack.push(l),
                }
                if stack.is_empty() {
                    close = Some(i);
                    break;
                }
            }
            let close = close.ok_or_else(|| Error::Invariant(String::from("inserted word does not reduce to 1")))?;
            self.free_expand_at(pos, w[0])?;
            self.insert_trivial(pos + 1, &w[1..close])?;
            pos += close + 1;
            w = &w[close + 1..];
        }
        Ok(())
    }

    /// Cancels `count` inverse pairs meeting at the junction before index `j`.
    pub fn cancel_junction(&mut self, j: usize, count: usize) -> Result<()> {
        for i in 0..count {
            self.free_reduce_at(j - 1 - i)?;
        }
        Ok(())
    }

    /// Greedily free-reduces the whole word, always at the lowest position.
    pub fn reduce_all(&mut self) -> Result<()> {
        let mut i = 0;
        while i + 1 < self.word.len() {
            if self.word[i].cancels(self.word[i + 1]) {
                self.free_reduce_at(i)?;
                i = i.saturating_sub(1);
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// Replaces the `u_len` letters at `pos` by `v`, provided `u v^-1` is a
    /// cyclic conjugate of a relator or its inverse.
    pub fn replace(&mut self, pos: usize, u_len: usize, v: &[Letter]) -> Result<RelatorRef> {
        let mut key = core::mem::take(&mut self.scratch);
        key.clear();
        key.extend_from_slice(&self.word[pos..pos + u_len]);
        key.extend(v.iter().rev().map(|l| l.inverse()));
        let found = self.index.lookup(&key);
        self.scratch = key;
        let r = found.ok_or_else(|| {
            Error::NoTransportRelator(format!(
                "{} -> {}",
                self.p.format_word(&self.word[pos..pos + u_len]),
                self.p.format_word(v)
            ))
        })?;
        self.apply(Move::RelatorApplication {
            pos: pos as u32,
            relator: r.id,
            shift: r.shift,
            inverted: r.inverted,
            split: u_len as u32,
        })?;
        Ok(r)
    }

    /// `W a -> a W` for the block `W = word[pos..pos + len]`; returns the new
    /// start of `W`.
    pub fn swap_block_right(&mut self, pos: usize, len: usize) -> Result<usize> {
        let mut v = Vec::with_capacity(len + 1);
        v.push(self.word[pos + len]);
        v.extend_from_slice(&self.word[pos..pos + len]);
        self.replace(pos, len + 1, &v)?;
        Ok(pos + 1)
    }

    /// `a W -> W a` for the block `W = word[pos..pos + len]`; returns the new
    /// start of `W`.
    pub fn swap_block_left(&mut self, pos: usize, len: usize) -> Result<usize> {
        let mut v = Vec::with_capacity(len + 1);
        v.extend_from_slice(&self.word[pos..pos + len]);
        v.push(self.word[pos - 1]);
        self.replace(pos - 1, len + 1, &v)?;
        Ok(pos - 1)
    }

    /// Moves the block at `pos` right past `steps` letters.
    pub fn transport_right(&mut self, mut pos: usize, len: usize, steps: usize) -> Result<usize> {
        for _ in 0..steps {
            pos = self.swap_block_right(pos, len)?;
        }
        Ok(pos)
    }

    /// Moves the block at `pos` left past `steps` letters.
    pub fn transport_left(&mut self, mut pos: usize, len: usize, steps: usize) -> Result<usize> {
        for _ in 0..steps {
            pos = self.swap_block_left(pos, len)?;
        }
        Ok(pos)
    }

    /// Replays `t` on the subword starting at `offset`.
    pub fn embed(&mut self, t: &PSequence, offset: usize) -> Result<()> {
        let n = t.initial.len();
        if offset + n > self.word.len() || self.word[offset..offset + n] != t.initial[..] {
            return Err(Error::Invariant(String::from("embedded sequence does not start at the given offset")));
        }
        for mv in &t.moves {
            self.apply(mv.shifted(offset))?;
        }
        Ok(())
    }

    pub fn finish(self) -> PSequence {
        PSequence { initial: self.initial, moves: self.moves }
    }

    pub fn finish_with_word(self) -> (PSequence, Word) {
        let w = Word::from_letters(self.word);
        (PSequence { initial: self.initial, moves: self.moves }, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{build_chain_presentation, relator_word};
    use alloc::vec;

    fn x(i: u32) -> Letter {
        Letter::pos(i)
    }

    #[test]
    fn free_expansion_on_empty() {
        let p = build_chain_presentation(2, 1);
        let w = apply_move(&Word::empty(), &Move::FreeExpansion { pos: 0, letter: x(0) }, &p).unwrap();
        assert_eq!(w.letters(), &[x(0), x(0).inverse()]);
    }

    #[test]
    fn whole_relator_insertion() {
        let p = build_chain_presentation(2, 1);
        for inverted in [false, true] {
            let mv = Move::RelatorApplication { pos: 0, relator: 5, shift: 3, inverted, split: 0 };
            let w = apply_move(&Word::empty(), &mv, &p).unwrap();
            // an empty prefix inserts the inverse of the chosen conjugate
            let r = relator_word(&p, RelatorRef { id: 5, shift: 3, inverted });
            assert_eq!(w, r.inverse());
        }
    }

    #[test]
    fn stale_positions_are_rejected() {
        let p = build_chain_presentation(2, 1);
        let w = Word::from(vec![x(0), x(1)]);
        assert!(apply_move(&w, &Move::FreeReduction { pos: 0 }, &p).is_err());
        assert!(apply_move(&w, &Move::FreeReduction { pos: 1 }, &p).is_err());
        assert!(apply_move(&w, &Move::FreeExpansion { pos: 3, letter: x(0) }, &p).is_err());
        let bad = Move::RelatorApplication { pos: 0, relator: 0, shift: 0, inverted: false, split: 1 };
        // relator 0 starts with x1^-1
        assert!(apply_move(&w, &bad, &p).is_err());
        let bad_id = Move::RelatorApplication { pos: 0, relator: 9999, shift: 0, inverted: false, split: 0 };
        assert!(apply_move(&w, &bad_id, &p).is_err());
    }

    #[test]
    fn replay_metrics() {
        let p = build_chain_presentation(2, 1);
        let t = PSequence::trivial(Word::from(vec![x(0), x(1)]));
        let (m, fin) = replay(&p, &t).unwrap();
        assert_eq!(m, Metrics { area: 0, fl: 2, height: 0, final_length: 2 });
        assert_eq!(fin.len(), 2);

        let t = PSequence {
            initial: Word::empty(),
            moves: vec![Move::FreeExpansion { pos: 0, letter: x(0) }, Move::FreeReduction { pos: 0 }],
        };
        let m = validate_null(&p, &t).unwrap();
        assert_eq!((m.area, m.fl, m.height), (0, 2, 2));
    }

    #[test]
    fn relator_then_reduce_is_null() {
        let p = build_chain_presentation(2, 1);
        let idx = RelatorIndex::new(&p);
        let mut b = Builder::new(&p, &idx, Word::empty());
        b.apply(Move::RelatorApplication { pos: 0, relator: 2, shift: 0, inverted: false, split: 0 })
            .unwrap();
        // The word is now r^-1; deleting it whole is a second application.
        let n = p.relators[2].len() as u32;
        b.apply(Move::RelatorApplication { pos: 0, relator: 2, shift: 0, inverted: true, split: n })
            .unwrap();
        let t = b.finish();
        let m = validate_null(&p, &t).unwrap();
        assert_eq!(m.area, 2);
        assert!(m.area <= m.height);
    }

    #[test]
    fn insert_trivial_builds_word() {
        let p = build_chain_presentation(3, 1);
        let idx = RelatorIndex::new(&p);
        let w = p.parse_word("x1^-2 x2^-1 x2 x3 x3^-1 x1^2 x2 x2^-1").unwrap();
        let mut b = Builder::new(&p, &idx, p.parse_word("x3").unwrap());
        b.insert_trivial(1, &w).unwrap();
        let mut expected = vec![x(2)];
        expected.extend_from_slice(&w);
        assert_eq!(b.word(), &expected[..]);
        assert_eq!(b.metrics().height as usize, w.len() / 2);
    }

    #[test]
    fn concatenate_checks_endpoints() {
        let p = build_chain_presentation(2, 1);
        let t1 = PSequence { initial: Word::empty(), moves: vec![Move::FreeExpansion { pos: 0, letter: x(1) }] };
        let t2 = PSequence { initial: Word::from(vec![x(1), x(1).inverse()]), moves: vec![Move::FreeReduction { pos: 0 }] };
        let t = concatenate(&p, &t1, &t2).unwrap();
        assert_eq!(t.moves.len(), 2);
        assert_eq!(concatenate(&p, &t1, &PSequence::trivial(Word::empty())), Err(Error::EndpointMismatch));
        let same = concatenate(&p, &t1, &PSequence::trivial(t2.initial.clone())).unwrap();
        assert_eq!(same, t1);
    }
}

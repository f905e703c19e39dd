//! Filler presentations over `A = A_1 ∪ ... ∪ A_c` and the recursive
//! filling algorithm: fill the projection in the class `c - 1` quotient,
//! replay it with lifted relators, and collect the released top-weight
//! letters into compressed registers at both ends of the word.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compression::{ChainContext, CommutatorSpec};
use crate::error::{Error, Result};
use crate::oracle::{lyndon_basis, rank, solve_rational, weight_exponents, Oracle};
use crate::presentation::{nested_commutator_family, Generator, Presentation, RelatorIndex};
use crate::sequence::{invert_sequence, normalize_insertions, Builder, Metrics, Move, PSequence};
use crate::word::{commutator, free_reduce, Letter, Word};

/// Generators of weight 1..=c: `x1..xm`, then `A_{i+1} = {(x, y) : x ∈ A_1,
/// y ∈ A_i}` with `x` varying slowest. Names spell the defining chain,
/// e.g. `g_1_2` for `(x1, x2)` and `g_2_1_2` for `(x2, g_1_2)`.
fn filler_generators(c: u32, m: u32) -> Vec<Generator> {
    let mut gens: Vec<Generator> = (1..=m)
        .map(|i| Generator { name: format!("x{i}"), weight: 1, definition: None })
        .collect();
    let mut layer: Vec<u32> = (0..m).collect();
    for w in 2..=c {
        let mut next = Vec::with_capacity(layer.len() * m as usize);
        for x in 0..m {
            for &y in &layer {
                let tail = chain_suffix(&gens[y as usize].name);
                let id = gens.len() as u32;
                gens.push(Generator { name: format!("g_{}_{}", x + 1, tail), weight: w, definition: Some((x, y)) });
                next.push(id);
            }
        }
        layer = next;
    }
    gens
}

fn chain_suffix(name: &str) -> &str {
    name.strip_prefix("g_").or_else(|| name.strip_prefix('x')).unwrap_or(name)
}

/// The defining chain `(a_1, ..., a_w)` of a letter with `g = [a_1, ..., a_w]`.
pub fn defining_chain(p: &Presentation, g: u32) -> Vec<Letter> {
    let mut chain = Vec::new();
    let mut cur = g;
    loop {
        match p.generators[cur as usize].definition {
            Some((x, y)) => {
                chain.push(Letter::pos(x));
                cur = y;
            }
            None => {
                chain.push(Letter::pos(cur));
                return chain;
            }
        }
    }
}

fn top_letters(p: &Presentation) -> Vec<u32> {
    (0..p.generators.len() as u32).filter(|&g| p.generators[g as usize].weight == p.class).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSelection {
    /// `A_{c2}`, in generator order.
    pub chosen: Vec<u32>,
    /// `A_{c1}`.
    pub rest: Vec<u32>,
    /// `a -> v_a` over `A_{c2}^{±1}` for every `a ∈ A_{c1}`.
    pub rewrite: BTreeMap<u32, Word>,
    pub t: u64,
}

/// Greedy choice of top-weight letters with independent Lie vectors, and
/// integral rewriting of the others in terms of them.
pub fn select_basis(p: &Presentation) -> Result<BasisSelection> {
    let c = p.class;
    let oracle = Oracle::new(p, c);
    let basis = lyndon_basis(oracle.symbols(), c as usize);
    let mut vectors = BTreeMap::new();
    for g in top_letters(p) {
        let v = weight_exponents(&oracle.eval(&[Letter::pos(g)]), &basis)?;
        vectors.insert(g, v);
    }
    let mut chosen: Vec<u32> = Vec::new();
    let mut chosen_vectors: Vec<Vec<BigInt>> = Vec::new();
    for (&g, v) in &vectors {
        let mut trial = chosen_vectors.clone();
        trial.push(v.clone());
        if rank(&trial) == trial.len() {
            chosen.push(g);
            chosen_vectors = trial;
        }
    }
    let mut rewrite = BTreeMap::new();
    let mut rest = Vec::new();
    let mut t = BigInt::one();
    for (&g, v) in &vectors {
        if chosen.contains(&g) {
            continue;
        }
        rest.push(g);
        let sol = solve_rational(v, &chosen_vectors)
            .ok_or_else(|| Error::Invariant(format!("letter #{g} outside the span of the chosen basis")))?;
        let mut word = Word::empty();
        for (k, x) in sol.iter().enumerate() {
            if !x.is_integer() {
                t = t.lcm(x.denom());
                continue;
            }
            let e = x.to_integer().to_i64().ok_or_else(|| Error::OutOfRange(String::from("huge exponent")))?;
            word.extend_from(&Word::letter(Letter::pos(chosen[k])).pow(e));
        }
        rewrite.insert(g, word);
    }
    if !t.is_one() {
        return Err(Error::UnsupportedIndex { t: t.to_u64().unwrap_or(u64::MAX) });
    }
    Ok(BasisSelection { chosen, rest, rewrite, t: 1 })
}

/// A filler presentation together with everything `fill` needs: its basis
/// selection, the class `c - 1` filler it recurses into, and the lift of
/// each quotient relator.
pub struct FillerPresentation {
    pub presentation: Presentation,
    pub index: RelatorIndex,
    pub basis: BasisSelection,
    pub quotient: Option<Box<FillerPresentation>>,
    /// For each relator of `quotient`, the id of its lift `r̄ v^-1`.
    pub lift: Vec<u32>,
    /// Max number of top-weight letters in one relator.
    pub max_top_letters: usize,
    chains: Vec<ChainContext>,
    m: u32,
}

impl FillerPresentation {
    pub fn class(&self) -> u32 {
        self.presentation.class
    }

    pub fn rank(&self) -> u32 {
        self.m
    }

    pub fn is_top(&self, g: u32) -> bool {
        self.presentation.generators[g as usize].weight == self.class()
    }

    pub fn chain(&self, j: usize) -> &ChainContext {
        &self.chains[j]
    }
}

struct RelatorSet {
    words: Vec<Word>,
    ids: BTreeMap<Word, u32>,
}

impl RelatorSet {
    fn new() -> Self {
        RelatorSet { words: Vec::new(), ids: BTreeMap::new() }
    }

    fn add(&mut self, w: Word) -> Option<u32> {
        if w.is_freely_trivial() {
            return None;
        }
        if let Some(&id) = self.ids.get(&w) {
            return Some(id);
        }
        let id = self.words.len() as u32;
        self.ids.insert(w.clone(), id);
        self.words.push(w);
        Some(id)
    }
}

pub fn build_filler_presentation(c: u32, m: u32) -> Result<Presentation> {
    Ok(build_filler(c, m)?.presentation)
}

pub fn build_filler(c: u32, m: u32) -> Result<FillerPresentation> {
    if c == 0 || m == 0 {
        return Err(Error::OutOfRange(format!("filler presentation needs c, m >= 1 (got c={c}, m={m})")));
    }
    let quotient = if c >= 2 { Some(Box::new(build_filler(c - 1, m)?)) } else { None };
    let generators = filler_generators(c, m);
    let bare = Presentation::new(generators.clone(), Vec::new(), c);
    let mut set = RelatorSet::new();

    // definitions g^-1 [x, y]
    for (i, g) in generators.iter().enumerate() {
        if let Some((x, y)) = g.definition {
            let mut w = Word::letter(Letter::neg(i as u32));
            w.extend_from(&commutator(&Word::letter(Letter::pos(x)), &Word::letter(Letter::pos(y))));
            set.add(w);
        }
    }
    // class relators over A_1
    let a1: Vec<u32> = (0..m).collect();
    for w in nested_commutator_family(&a1, c as usize + 1) {
        set.add(w);
    }
    // the top layer is central
    let top = top_letters(&bare);
    for x in 0..generators.len() as u32 {
        for xs in [Letter::pos(x), Letter::neg(x)] {
            for &z in &top {
                for zs in [Letter::pos(z), Letter::neg(z)] {
                    set.add(commutator(&Word::letter(xs), &Word::letter(zs)));
                }
            }
        }
    }
    // basis change a v_a^-1
    let basis = select_basis(&bare)?;
    for (&a, v) in &basis.rewrite {
        let mut w = Word::letter(Letter::pos(a));
        w.extend_from(&v.inverse());
        set.add(w);
    }
    // lifts of the quotient relators
    let mut lift = Vec::new();
    if let Some(q) = &quotient {
        let oracle = Oracle::new(&bare, c);
        let lyndon = lyndon_basis(oracle.symbols(), c as usize);
        let chosen_vectors: Vec<Vec<BigInt>> = basis
            .chosen
            .iter()
            .map(|&g| weight_exponents(&oracle.eval(&[Letter::pos(g)]), &lyndon))
            .collect::<Result<_>>()?;
        for r in &q.presentation.relators {
            let coords = weight_exponents(&oracle.eval(r), &lyndon)?;
            let sol = solve_rational(&coords, &chosen_vectors)
                .ok_or_else(|| Error::Invariant(String::from("quotient relator outside the top layer span")))?;
            let mut w = r.clone();
            // r̄ = v, so the lift is r̄ v^-1
            for (k, x) in sol.iter().enumerate().rev() {
                if !x.is_integer() {
                    return Err(Error::UnsupportedIndex { t: x.denom().to_u64().unwrap_or(u64::MAX) });
                }
                let e = x.to_integer().to_i64().ok_or_else(|| Error::OutOfRange(String::from("huge exponent")))?;
                w.extend_from(&Word::letter(Letter::pos(basis.chosen[k])).pow(-e));
            }
            let id = set
                .add(w)
                .ok_or_else(|| Error::Invariant(String::from("lift of a quotient relator is freely trivial")))?;
            lift.push(id);
        }
    }

    let presentation = Presentation::new(generators, set.words, c);
    let index = RelatorIndex::new(&presentation);
    let max_top_letters = presentation
        .relators
        .iter()
        .map(|r| r.iter().filter(|l| presentation.generators[l.generator() as usize].weight == c).count())
        .max()
        .unwrap_or(0);
    let chains = if c >= 2 {
        basis
            .chosen
            .iter()
            .map(|&g| ChainContext::new(&presentation, CommutatorSpec::new(defining_chain(&presentation, g))?))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(FillerPresentation { presentation, index, basis, quotient, lift, max_top_letters, chains, m })
}

/// Deletes every top-weight letter.
pub fn project_word(w: &[Letter], p: &Presentation) -> Word {
    w.iter().copied().filter(|l| p.generators[l.generator() as usize].weight < p.class).collect()
}

/// The class `c - 1` quotient: top-weight generators dropped, relators with
/// those letters deleted, freely trivial results and duplicates pruned.
pub fn quotient_presentation(p: &Presentation) -> Presentation {
    let generators: Vec<Generator> = p.generators.iter().filter(|g| g.weight < p.class).cloned().collect();
    let mut set = RelatorSet::new();
    for r in &p.relators {
        set.add(project_word(r, p));
    }
    Presentation::new(generators, set.words, p.class.saturating_sub(1))
}

/// Diagnostics gathered while filling.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FillReport {
    pub metrics: Metrics,
    /// Area of the recursive sequence in the quotient (0 at class 1).
    pub recursive_area: u64,
    /// Largest register exponent reached.
    pub max_register: u64,
    /// Largest register growth caused by lifted relators and their collection.
    pub max_released: u64,
    /// Top-weight letters collected from the input word itself.
    pub initial_collected: u64,
    /// `2 M Area(S̄)`.
    pub register_bound: u64,
}

/// A null-sequence for `w`, which must be trivial in the group.
pub fn fill(w: &Word, fp: &FillerPresentation) -> Result<PSequence> {
    Ok(fill_with_report(w, fp)?.0)
}

pub fn fill_with_report(w: &Word, fp: &FillerPresentation) -> Result<(PSequence, FillReport)> {
    let p = &fp.presentation;
    if w.iter().any(|l| l.generator() as usize >= p.generators.len()) {
        return Err(Error::OutOfRange(String::from("word uses undeclared generators")));
    }
    if !Oracle::new(p, p.class).is_identity(w) {
        return Err(Error::NotNullHomotopic);
    }
    if w.is_empty() {
        return Ok((PSequence::trivial(Word::empty()), FillReport::default()));
    }
    if p.class == 1 {
        return fill_abelian(w, fp);
    }
    Collector::new(w, fp)?.run()
}

/// Class 1: repeatedly carry the first inverse of the leading letter to it
/// and cancel.
fn fill_abelian(w: &Word, fp: &FillerPresentation) -> Result<(PSequence, FillReport)> {
    let mut b = Builder::new(&fp.presentation, &fp.index, w.clone());
    while !b.is_empty() {
        let a = b.word()[0];
        let mut j = b
            .word()
            .iter()
            .position(|&l| l == a.inverse())
            .ok_or_else(|| Error::Invariant(String::from("unbalanced letter in an abelian null word")))?;
        loop {
            if b.word()[j - 1] == a {
                b.free_reduce_at(j - 1)?;
                break;
            }
            j = b.swap_block_left(j, 1)?;
        }
    }
    let metrics = b.metrics();
    Ok((b.finish(), FillReport { metrics, ..FillReport::default() }))
}

#[derive(Clone, Copy, Debug, Default)]
struct Register {
    q: u64,
    len: usize,
}

struct CachedStep {
    forward: PSequence,
    backward: PSequence,
    next_len: usize,
}

struct Collector<'a> {
    fp: &'a FillerPresentation,
    b: Builder<'a>,
    n: u64,
    left: Vec<Register>,
    right: Vec<Register>,
    middle: usize,
    steps: BTreeMap<(usize, u64), Rc<CachedStep>>,
    basis_pos: BTreeMap<u32, usize>,
    released: bool,
    initial_collected: u64,
    max_released: u64,
    base: Vec<u64>,
    w: Word,
}

impl<'a> Collector<'a> {
    fn new(w: &Word, fp: &'a FillerPresentation) -> Result<Self> {
        let k = fp.basis.chosen.len();
        let n = (w.len() as u64).max(2);
        let basis_pos = fp.basis.chosen.iter().enumerate().map(|(j, &g)| (g, j)).collect();
        Ok(Collector {
            fp,
            b: Builder::new(&fp.presentation, &fp.index, w.clone()),
            n,
            left: alloc::vec![Register::default(); k],
            right: alloc::vec![Register::default(); k],
            middle: w.len(),
            steps: BTreeMap::new(),
            basis_pos,
            released: false,
            initial_collected: 0,
            max_released: 0,
            base: alloc::vec![0; 2 * k],
            w: w.clone(),
        })
    }

    fn left_total(&self) -> usize {
        self.left.iter().map(|r| r.len).sum()
    }

    fn step(&mut self, j: usize, q: u64) -> Result<Rc<CachedStep>> {
        if let Some(s) = self.steps.get(&(j, q)) {
            return Ok(s.clone());
        }
        let fp = self.fp;
        let ctx = &fp.chains[j];
        let forward = ctx.register_increment(&fp.presentation, &fp.index, self.n, q)?;
        let backward = invert_sequence(&fp.presentation, &forward)?;
        let next_len = ctx.extended_word(self.n, q + 1)?.len();
        let s = Rc::new(CachedStep { forward, backward, next_len });
        self.steps.insert((j, q), s.clone());
        Ok(s)
    }

    fn run(mut self) -> Result<(PSequence, FillReport)> {
        let fp = self.fp;
        let p = &fp.presentation;
        let quotient = fp.quotient.as_deref().expect("class >= 2 has a quotient");
        let w_bar = project_word(&self.w, p);
        let inner = fill(&w_bar, quotient)?;
        let inner = normalize_insertions(&quotient.presentation, &inner)?;
        let recursive_area = inner.moves.iter().filter(|m| m.is_relator()).count() as u64;

        // empty registers z~^0 on both sides
        for j in 0..fp.chains.len() {
            let zero = fp.chains[j].compression_word(self.n, 0)?;
            let len = self.b.len();
            self.b.insert_trivial(len, &zero)?;
            self.right[j].len = zero.len();
            self.b.insert_trivial(0, &zero.inverse())?;
            self.left[j].len = zero.len();
        }
        self.collect()?;
        self.initial_collected = self.left.iter().chain(&self.right).map(|r| r.q).sum();
        for (slot, r) in self.base.iter_mut().zip(self.left.iter().chain(&self.right)) {
            *slot = r.q;
        }
        self.released = true;
        let mut bar = w_bar.into_letters();
        self.check_shape(&bar)?;

        for mv in &inner.moves {
            let ms = self.left_total();
            crate::sequence::apply_move_in_place(&mut bar, mv, &quotient.presentation)
                .map_err(|reason| Error::Invariant(format!("recursive sequence: {reason}")))?;
            match *mv {
                Move::FreeReduction { pos } => {
                    self.b.free_reduce_at(ms + pos as usize)?;
                    self.middle -= 2;
                }
                Move::FreeExpansion { pos, letter } => {
                    self.b.free_expand_at(ms + pos as usize, letter)?;
                    self.middle += 2;
                }
                Move::RelatorApplication { pos, relator, shift, inverted, split } => {
                    debug_assert_eq!(split, 0);
                    let id = fp.lift[relator as usize];
                    let lifted = &p.relators[id as usize];
                    let extra = (lifted.len() - quotient.presentation.relators[relator as usize].len()) as u32;
                    let shift = if inverted { extra + shift } else { shift };
                    self.b.apply(Move::RelatorApplication {
                        pos: ms as u32 + pos,
                        relator: id,
                        shift,
                        inverted,
                        split: 0,
                    })?;
                    self.middle += lifted.len();
                    self.collect()?;
                    self.check_shape(&bar)?;
                }
            }
        }
        if self.middle != 0 {
            return Err(Error::Invariant(String::from("recursive sequence did not empty the middle")));
        }
        for j in 0..self.left.len() {
            if self.left[j].q != self.right[j].q {
                return Err(Error::Invariant(format!(
                    "register {j} ends asymmetric: {} left, {} right",
                    self.left[j].q, self.right[j].q
                )));
            }
        }
        let max_register = self.left.iter().chain(&self.right).map(|r| r.q).max().unwrap_or(0);
        for j in 0..self.left.len() {
            let junction: usize = self.left[j..].iter().map(|r| r.len).sum();
            self.b.cancel_junction(junction, self.left[j].len)?;
        }
        if !self.b.is_empty() {
            return Err(Error::Invariant(String::from("final word is not empty")));
        }
        let register_bound = 2 * fp.max_top_letters as u64 * recursive_area;
        if max_register > register_bound {
            return Err(Error::Invariant(format!("register {max_register} exceeds 2 M Area = {register_bound}")));
        }
        let metrics = self.b.metrics();
        let report = FillReport {
            metrics,
            recursive_area,
            max_register,
            max_released: self.max_released,
            initial_collected: self.initial_collected,
            register_bound,
        };
        Ok((self.b.finish(), report))
    }

    fn check_shape(&mut self, bar: &[Letter]) -> Result<()> {
        let ms = self.left_total();
        let word = self.b.word();
        if self.middle != bar.len() || word[ms..ms + self.middle] != *bar {
            return Err(Error::Invariant(String::from("middle differs from the recursive sequence")));
        }
        if word.len() != ms + self.middle + self.right.iter().map(|r| r.len).sum::<usize>() {
            return Err(Error::Invariant(String::from("register lengths do not add up")));
        }
        let mut pos = 0;
        for j in (0..self.left.len()).rev() {
            let expected = self.fp.chains[j].extended_word(self.n, self.left[j].q)?.inverse();
            if word[pos..pos + self.left[j].len] != expected[..] {
                return Err(Error::Invariant(format!("left register {j} is malformed")));
            }
            pos += self.left[j].len;
        }
        pos += self.middle;
        for j in 0..self.right.len() {
            let expected = self.fp.chains[j].extended_word(self.n, self.right[j].q)?;
            if word[pos..pos + self.right[j].len] != expected[..] {
                return Err(Error::Invariant(format!("right register {j} is malformed")));
            }
            pos += self.right[j].len;
        }
        Ok(())
    }

    fn note_growth(&mut self) {
        if self.released {
            for (i, r) in self.left.iter().chain(&self.right).enumerate() {
                self.max_released = self.max_released.max(r.q - self.base[i]);
            }
        }
    }

    /// Replaces a letter by its full commutator expansion through the
    /// definition relators; returns the expanded length.
    fn expand_letter(&mut self, pos: usize, l: Letter) -> Result<usize> {
        let gens = &self.fp.presentation.generators;
        let Some((x, y)) = gens[l.generator() as usize].definition else {
            return Ok(1);
        };
        let comm = commutator(&Word::letter(Letter::pos(x)), &Word::letter(Letter::pos(y)));
        let v = if l.is_inverse() { comm.inverse() } else { comm };
        self.b.replace(pos, 1, &v)?;
        let mut at = pos;
        for &letter in v.iter() {
            at += self.expand_letter(at, letter)?;
        }
        Ok(at - pos)
    }

    /// Moves every top-weight letter of the middle into its register.
    fn collect(&mut self) -> Result<()> {
        let fp = self.fp;
        // A_{c1} letters become words over A_{c2}
        let mut i = 0;
        while i < self.middle {
            let ms = self.left_total();
            let l = self.b.word()[ms + i];
            match fp.basis.rewrite.get(&l.generator()) {
                Some(v) => {
                    let v = if l.is_inverse() { v.inverse() } else { v.clone() };
                    self.b.replace(ms + i, 1, &v)?;
                    self.middle = self.middle + v.len() - 1;
                    i += v.len();
                }
                None => i += 1,
            }
        }
        // cancel z against the nearest z^-1 before anything leaves the middle
        loop {
            let ms = self.left_total();
            let mut last: BTreeMap<u32, (usize, bool)> = BTreeMap::new();
            let mut pair = None;
            for i in 0..self.middle {
                let l = self.b.word()[ms + i];
                if !fp.is_top(l.generator()) {
                    continue;
                }
                match last.insert(l.generator(), (i, l.is_inverse())) {
                    Some((prev, sign)) if sign != l.is_inverse() => {
                        pair = Some((prev, i));
                        break;
                    }
                    _ => {}
                }
            }
            let Some((i, j)) = pair else { break };
            let mut pos = ms + j;
            while pos > ms + i + 1 {
                pos = self.b.swap_block_left(pos, 1)?;
            }
            self.b.free_reduce_at(ms + i)?;
            self.middle -= 2;
        }
        // positive letters travel right, rightmost first
        loop {
            let ms = self.left_total();
            let found = (0..self.middle).rev().find(|&i| {
                let l = self.b.word()[ms + i];
                !l.is_inverse() && fp.is_top(l.generator())
            });
            let Some(i) = found else { break };
            let mut pos = ms + i;
            let l = self.b.word()[pos];
            let end = ms + self.middle;
            let mut cancelled = false;
            while pos + 1 < end {
                if self.b.word()[pos + 1] == l.inverse() {
                    self.b.free_reduce_at(pos)?;
                    self.middle -= 2;
                    cancelled = true;
                    break;
                }
                pos = self.b.swap_block_right(pos, 1)?;
            }
            if cancelled {
                continue;
            }
            let j = self.basis_pos[&l.generator()];
            let skip: usize = self.right[..j].iter().map(|r| r.len).sum();
            pos = self.b.transport_right(pos, 1, skip)?;
            self.middle -= 1;
            self.expand_letter(pos, l)?;
            let step = self.step(j, self.right[j].q)?;
            self.b.embed(&step.forward, pos)?;
            self.right[j] = Register { q: self.right[j].q + 1, len: step.next_len };
            self.note_growth();
        }
        // inverse letters travel left, leftmost first
        loop {
            let ms = self.left_total();
            let found = (0..self.middle).find(|&i| {
                let l = self.b.word()[ms + i];
                l.is_inverse() && fp.is_top(l.generator())
            });
            let Some(i) = found else { break };
            let mut pos = ms + i;
            let l = self.b.word()[pos];
            let mut cancelled = false;
            while pos > ms {
                if self.b.word()[pos - 1] == l.inverse() {
                    self.b.free_reduce_at(pos - 1)?;
                    self.middle -= 2;
                    cancelled = true;
                    break;
                }
                pos = self.b.swap_block_left(pos, 1)?;
            }
            if cancelled {
                continue;
            }
            let j = self.basis_pos[&l.generator()];
            let skip: usize = self.left[..j].iter().map(|r| r.len).sum();
            pos = self.b.transport_left(pos, 1, skip)?;
            self.middle -= 1;
            self.expand_letter(pos, l)?;
            let step = self.step(j, self.left[j].q)?;
            self.b.embed(&step.backward, pos - self.left[j].len)?;
            self.left[j] = Register { q: self.left[j].q + 1, len: step.next_len };
            self.note_growth();
        }
        Ok(())
    }
}

/// Deterministic null-homotopic words of length at most `n`: freely reduced
/// products of conjugated relators, interleaved with commutator-power
/// identities `[x^a, y^b] (x, y)^{-ab}`. Each call with a larger `count`
/// extends the list of a smaller one.
pub fn corpus_generate(fp: &FillerPresentation, n: usize, count: usize, seed: u64) -> Vec<Word> {
    let p = &fp.presentation;
    let oracle = Oracle::new(p, p.class);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let short: Vec<&Word> = p.relators.iter().filter(|r| r.len() <= n.max(1)).collect();
    let structured = structured_family(fp, n);
    let gens = p.generators.len() as u32;
    let mut out = Vec::with_capacity(count);
    let mut seen = BTreeSet::new();
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        let candidate = if !structured.is_empty() && out.len() % 5 == 4 {
            structured[rng.gen_range(0..structured.len())].clone()
        } else if short.is_empty() {
            Word::empty()
        } else {
            let mut w: Vec<Letter> = Vec::new();
            let factors = rng.gen_range(1..=4);
            for _ in 0..factors {
                let r = short[rng.gen_range(0..short.len())];
                let r = if rng.gen_bool(0.5) { r.clone() } else { r.inverse() };
                let r = r.rotate(rng.gen_range(0..r.len().max(1)));
                let conj_len = rng.gen_range(0..=2usize);
                let u: Word = (0..conj_len)
                    .map(|_| Letter::new(rng.gen_range(0..gens.min(2 * fp.m)), rng.gen_bool(0.5)))
                    .collect();
                w.extend_from_slice(&u);
                w.extend_from_slice(&r);
                w.extend_from_slice(&u.inverse());
            }
            free_reduce(&w)
        };
        let fits = candidate.len() <= n && (candidate.len() * 2 >= n || attempts.is_multiple_of(64));
        if fits && !candidate.is_empty() && (seen.insert(candidate.clone()) || attempts.is_multiple_of(16)) {
            debug_assert!(oracle.is_identity(&candidate));
            out.push(candidate);
        }
    }
    out
}

/// `[x^a, y^b] (x, y)^{-ab}` for `x ∈ A_1`, `y ∈ A_{c-1}`, within length `n`.
fn structured_family(fp: &FillerPresentation, n: usize) -> Vec<Word> {
    let p = &fp.presentation;
    let c = p.class;
    let mut out = Vec::new();
    if c < 2 {
        return out;
    }
    for (id, g) in p.generators.iter().enumerate() {
        if g.weight != c {
            continue;
        }
        let (x, y) = g.definition.expect("top letters are compound");
        for a in 1..=n {
            for bexp in 1..=n {
                let len = 2 * a + 2 * bexp + a * bexp;
                if len > n {
                    break;
                }
                let mut w = commutator(
                    &Word::letter(Letter::pos(x)).pow(a as i64),
                    &Word::letter(Letter::pos(y)).pow(bexp as i64),
                );
                w.extend_from(&Word::letter(Letter::pos(id as u32)).pow(-((a * bexp) as i64)));
                out.push(w);
            }
        }
    }
    out
}

/// Smallest `λ` with `Area ≤ λ ℓ^{c+1}` and `FL ≤ λ ℓ` over all results,
/// with the witnesses attaining each ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AflCertificate {
    pub lambda: f64,
    pub area_lambda: f64,
    pub fl_lambda: f64,
    pub worst_area: Option<(usize, Metrics)>,
    pub worst_fl: Option<(usize, Metrics)>,
}

pub fn certify_afl_pair(results: &[(usize, Metrics)], c: u32) -> AflCertificate {
    let mut cert = AflCertificate { lambda: 0.0, area_lambda: 0.0, fl_lambda: 0.0, worst_area: None, worst_fl: None };
    for &(len, m) in results {
        if len == 0 {
            continue;
        }
        let scale = (0..=c).fold(1.0f64, |acc, _| acc * len as f64);
        let a = m.area as f64 / scale;
        let f = m.fl as f64 / len as f64;
        if cert.worst_area.is_none() || a > cert.area_lambda {
            cert.area_lambda = a;
            cert.worst_area = Some((len, m));
        }
        if cert.worst_fl.is_none() || f > cert.fl_lambda {
            cert.fl_lambda = f;
            cert.worst_fl = Some((len, m));
        }
    }
    cert.lambda = cert.area_lambda.max(cert.fl_lambda);
    cert
}

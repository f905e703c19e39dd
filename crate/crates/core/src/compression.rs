//! Compression words for powers of a commutator `z = [a_1, ..., a_c]`, the
//! increment sequences `z z~^s -> z~^{s+1}`, and power compression.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::presentation::{nested_commutator_family, Presentation, RelatorIndex};
use crate::sequence::{normalize_insertions, Builder, Move, PSequence};
use crate::word::{commutator, nested_commutator, nested_commutator_letters, Letter, Word};

/// Base-`n` little-endian digits of `value`, exactly `c` of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    pub n: u64,
    pub digits: Vec<u64>,
    pub value: u64,
}

pub fn checked_power(n: u64, c: usize) -> Result<u64> {
    n.checked_pow(c as u32)
        .ok_or_else(|| Error::OutOfRange(format!("{n}^{c} overflows")))
}

pub fn digits(s: u64, n: u64, c: usize) -> Result<DigitExpansion> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("base {n} < 2")));
    }
    if s >= checked_power(n, c)? {
        return Err(Error::OutOfRange(format!("{s} does not fit in {c} digits base {n}")));
    }
    let mut x = s;
    let mut ds = Vec::with_capacity(c);
    for _ in 0..c {
        ds.push(x % n);
        x /= n;
    }
    Ok(DigitExpansion { n, digits: ds, value: s })
}

/// Largest `k` with `n^k | m`, for `m >= 1`.
pub fn valuation(m: u64, n: u64) -> u32 {
    assert!(m >= 1 && n >= 2);
    let mut k = 0;
    let mut x = m;
    while x.is_multiple_of(n) {
        x /= n;
        k += 1;
    }
    k
}

/// The chain `(a_1, ..., a_c)` of weight-1 letters defining
/// `z_k = [a_k, ..., a_c]`. Letters may repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorSpec {
    pub chain: Vec<Letter>,
}

impl CommutatorSpec {
    pub fn new(chain: Vec<Letter>) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::OutOfRange(String::from("empty commutator chain")));
        }
        Ok(CommutatorSpec { chain })
    }

    /// `x_1, ..., x_c` as generators `0..c`.
    pub fn standard(c: usize) -> Self {
        CommutatorSpec { chain: (0..c as u32).map(Letter::pos).collect() }
    }

    pub fn class(&self) -> usize {
        self.chain.len()
    }

    /// `z_k` for 1-based `k`.
    pub fn z(&self, k: usize) -> Word {
        nested_commutator_letters(&self.chain[k - 1..])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// One relator application moving a central block past a letter:
/// `W a -> a W` (right) or `a W -> W a` (left).
pub fn transport_central(
    p: &Presentation,
    index: &RelatorIndex,
    w: &Word,
    a: Letter,
    direction: Direction,
) -> Result<PSequence> {
    let mut initial = Word::empty();
    match direction {
        Direction::Right => {
            initial.extend_from(w);
            initial.push(a);
        }
        Direction::Left => {
            initial.push(a);
            initial.extend_from(w);
        }
    }
    let mut b = Builder::new(p, index, initial);
    match direction {
        Direction::Right => b.swap_block_right(0, w.len())?,
        Direction::Left => b.swap_block_left(1, w.len())?,
    };
    Ok(b.finish())
}

struct Level {
    presentation: Presentation,
    index: RelatorIndex,
}

/// Per-spec data: the words `z_k` and, for every level `k`, the chain
/// presentation over the spec letters `a_k, ..., a_c` (on the host's
/// generator list) together with its relator index.
pub struct ChainContext {
    spec: CommutatorSpec,
    z: Vec<Word>,
    levels: Vec<Level>,
}

impl ChainContext {
    pub fn new(host: &Presentation, spec: CommutatorSpec) -> Result<Self> {
        let c = spec.class();
        for l in &spec.chain {
            let g = host
                .generators
                .get(l.generator() as usize)
                .ok_or_else(|| Error::OutOfRange(format!("generator #{} not in host", l.generator())))?;
            if g.weight != 1 || l.is_inverse() {
                return Err(Error::OutOfRange(format!("chain letter {} is not a positive weight-1 letter", g.name)));
            }
        }
        let z = (1..=c).map(|k| spec.z(k)).collect();
        let mut levels = Vec::with_capacity(c);
        for k in 0..c {
            let mut alphabet: Vec<u32> = spec.chain[k..].iter().map(|l| l.generator()).collect();
            alphabet.sort_unstable();
            alphabet.dedup();
            let relators = nested_commutator_family(&alphabet, c - k + 1);
            let presentation = Presentation::new(host.generators.clone(), relators, (c - k) as u32);
            let index = RelatorIndex::new(&presentation);
            levels.push(Level { presentation, index });
        }
        Ok(ChainContext { spec, z, levels })
    }

    /// Context for `x_1, ..., x_c` over `build_chain_presentation(c, 1)`.
    pub fn standard(c: usize) -> Self {
        let host = crate::presentation::build_chain_presentation(c as u32, 1);
        ChainContext::new(&host, CommutatorSpec::standard(c)).expect("standard chain is valid")
    }

    pub fn spec(&self) -> &CommutatorSpec {
        &self.spec
    }

    pub fn class(&self) -> usize {
        self.spec.class()
    }

    /// `z_1`.
    pub fn z1(&self) -> &Word {
        &self.z[0]
    }

    /// Chain presentation of level `k` (1-based) on the spec letters.
    pub fn level_presentation(&self, k: usize) -> &Presentation {
        &self.levels[k - 1].presentation
    }

    pub fn level_index(&self, k: usize) -> &RelatorIndex {
        &self.levels[k - 1].index
    }

    /// `z~^s` for `0 <= s <= n^c`.
    pub fn compression_word(&self, n: u64, s: u64) -> Result<Word> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("base {n} < 2")));
        }
        let top = checked_power(n, self.class())?;
        if s > top {
            return Err(Error::OutOfRange(format!("exponent {s} > {n}^{}", self.class())));
        }
        Ok(self.word_at(0, n, s))
    }

    fn word_at(&self, k: usize, n: u64, s: u64) -> Word {
        let c = self.class() - k;
        let a = Word::letter(self.spec.chain[k]);
        if c == 1 {
            return a.pow(s as i64);
        }
        if s == n.pow(c as u32) {
            let entries: Vec<Word> = self.spec.chain[k..].iter().map(|&l| Word::letter(l).pow(n as i64)).collect();
            return nested_commutator(&entries);
        }
        let head = self.z[k].pow((s % n) as i64);
        head.concat(&commutator(&a.pow(n as i64), &self.word_at(k + 1, n, s / n)))
    }

    /// Sequence from `z_1 z~^s` to `z~^{s+1}` in the level-1 presentation.
    pub fn increment(&self, n: u64, s: u64) -> Result<PSequence> {
        let l = &self.levels[0];
        self.increment_into(&l.presentation, &l.index, n, s)
    }

    /// As `increment`, with moves expressed in `target`, which must contain
    /// every level-1 relator (up to cyclic conjugacy and inversion).
    pub fn increment_into(&self, target: &Presentation, index: &RelatorIndex, n: u64, s: u64) -> Result<PSequence> {
        digits(s, n, self.class())?;
        self.increment_at(0, target, index, n, s)
    }

    fn increment_at(&self, k: usize, p: &Presentation, index: &RelatorIndex, n: u64, s: u64) -> Result<PSequence> {
        let c = self.class() - k;
        let z = &self.z[k];
        let initial = z.concat(&self.word_at(k, n, s));
        if c == 1 || s % n + 1 < n {
            return Ok(PSequence::trivial(initial));
        }
        let nn = n as usize;
        let lz = z.len();
        let z2 = &self.z[k + 1];
        let lz2 = z2.len();
        let a = self.spec.chain[k];
        let t = s / n;
        let t_word = self.word_at(k + 1, n, t);
        let mut b = Builder::new(p, index, initial);

        // z^n a^-n T^-1 a^n T  ->  z^n a^-n T^-1 z2^-1 z2 a^n T
        let a_start = nn * lz + nn + t_word.len();
        b.expand_pair(a_start, &z2.inverse())?;
        let mut z2_pos = a_start + lz2;
        // Carry z2 past each a: z2 a -> a z2 z^-1, then send z^-1 left to
        // cancel against the rightmost remaining z.
        let mut carried = Vec::with_capacity(lz2 + 1);
        carried.push(a);
        carried.extend_from_slice(z2);
        for i in 0..nn {
            b.expand_pair(z2_pos, &carried)?;
            let block = z2_pos + 1 + lz2;
            let target = (nn - i) * lz;
            b.transport_left(block, lz, block - target)?;
            b.cancel_junction(target, lz)?;
            z2_pos = z2_pos + 1 - lz;
        }

        // [a^n, z2 T]: run the level-(k+1) increment on the right block and
        // its mirror image on the left block.
        let inner = self.increment_at(k + 1, &self.levels[k + 1].presentation, &self.levels[k + 1].index, n, t)?;
        let inner_p = &self.levels[k + 1].presentation;
        let inner = normalize_insertions(inner_p, &inner)?;
        let mut block_len = lz2 + t_word.len();
        for mv in &inner.moves {
            let rs = 2 * nn + block_len;
            match *mv {
                Move::FreeReduction { pos } => {
                    let pos = pos as usize;
                    b.free_reduce_at(rs + pos)?;
                    b.free_reduce_at(nn + block_len - pos - 2)?;
                    block_len -= 2;
                }
                Move::FreeExpansion { pos, letter } => {
                    let pos = pos as usize;
                    b.free_expand_at(rs + pos, letter)?;
                    b.free_expand_at(nn + block_len - pos, letter)?;
                    block_len += 2;
                }
                Move::RelatorApplication { pos, relator, shift, inverted, split } => {
                    debug_assert_eq!(split, 0);
                    let pos = pos as usize;
                    let r = &inner_p.relators[relator as usize];
                    let lr = r.len();
                    // inserted word X = rotate(rho, j) with rho = r^{±1}
                    let rho = if inverted { r.clone() } else { r.inverse() };
                    let j = (lr - shift as usize) % lr;
                    let rho_inv = rho.inverse();
                    let left_target;
                    if j == 0 {
                        b.expand_pair(rs + pos, &rho_inv)?;
                        left_target = b.transport_left(rs + pos, lr, 2 * pos + nn)?;
                    } else {
                        let (alpha, beta) = rho.split_at(j);
                        let lb = beta.len();
                        b.expand_pair(rs + pos, beta)?;
                        b.expand_pair(rs + pos + lb, &rho_inv)?;
                        b.cancel_junction(rs + pos + lb + 2 * lr, lb)?;
                        left_target = b.transport_left(rs + pos + lb, lr, lb + 2 * pos + nn)?;
                        // rho^-1 = beta^-1 alpha^-1 -> alpha^-1 beta^-1
                        let alpha_inv: Word = Word::from(alpha.to_vec()).inverse();
                        let la = alpha.len();
                        b.expand_pair(left_target, &alpha_inv)?;
                        let at = b.transport_left(left_target + 2 * la, lr, la)?;
                        b.cancel_junction(at + lr, la)?;
                    }
                    debug_assert_eq!(left_target, nn + block_len - pos);
                    block_len += lr;
                }
            }
        }
        let (seq, fin) = b.finish_with_word();
        let expected = self.word_at(k, n, s + 1);
        if fin != expected {
            return Err(Error::Invariant(format!(
                "increment at level {} for s = {s} ended in the wrong word",
                k + 1
            )));
        }
        Ok(seq)
    }

    /// `z~^A (z~^{n^c})^B` for `q = A + B n^c`; the `z~^0` prefix is kept
    /// unreduced when `A = 0`.
    pub fn extended_word(&self, n: u64, q: u64) -> Result<Word> {
        let top = checked_power(n, self.class())?;
        let (a, blocks) = (q % top, q / top);
        let mut w = self.compression_word(n, a)?;
        let full = self.compression_word(n, top)?;
        for _ in 0..blocks {
            w.extend_from(&full);
        }
        Ok(w)
    }

    /// Sequence from `z_1 . ext(q)` to `ext(q + 1)` in `target`.
    pub fn register_increment(&self, target: &Presentation, index: &RelatorIndex, n: u64, q: u64) -> Result<PSequence> {
        let top = checked_power(n, self.class())?;
        let a = q % top;
        let tail = self.extended_word(n, q)?.len() - self.compression_word(n, a)?.len();
        let inc = self.increment_into(target, index, n, a)?;
        let mut initial = inc.initial.clone();
        let rest = self.extended_word(n, q)?;
        initial.extend_from(&rest[rest.len() - tail..]);
        let mut b = Builder::new(target, index, initial);
        b.embed(&inc, 0)?;
        if a + 1 == top {
            let zero = self.compression_word(n, 0)?;
            b.insert_trivial(0, &zero)?;
        }
        Ok(b.finish())
    }

    /// Sequence from `z_1^q` to the extended compression word of `q`.
    pub fn extended_compression(&self, n: u64, q: u64) -> Result<(Word, PSequence)> {
        let l = &self.levels[0];
        let (p, index) = (&l.presentation, &l.index);
        let z = self.z1();
        let mut b = Builder::new(p, index, z.pow(q as i64));
        let zero = self.compression_word(n, 0)?;
        b.insert_trivial(b.len(), &zero)?;
        for i in 0..q {
            let inc = self.register_increment(p, index, n, i)?;
            let offset = (q - i - 1) as usize * z.len();
            b.embed(&inc, offset)?;
        }
        let (seq, fin) = b.finish_with_word();
        Ok((fin, seq))
    }

    /// Sequence from `z_1^{n^c}` to `z~^{n^c}`, with the working filling
    /// length: the longest active suffix, not counting the untouched
    /// leading copies of `z_1`.
    pub fn power_compression(&self, n: u64) -> Result<PowerCompression> {
        let l = &self.levels[0];
        let (p, index) = (&l.presentation, &l.index);
        let top = checked_power(n, self.class())?;
        let z = self.z1();
        let mut b = Builder::new(p, index, z.pow(top as i64));
        let zero = self.compression_word(n, 0)?;
        b.insert_trivial(b.len(), &zero)?;
        let mut working_fl = 2 * zero.len() as u64;
        for s in 0..top {
            let inc = self.increment_at(0, p, index, n, s)?;
            let offset = (top - s - 1) as usize * z.len();
            working_fl = working_fl.max((b.len() - offset) as u64);
            for mv in &inc.moves {
                b.apply(mv.shifted(offset))?;
                working_fl = working_fl.max((b.len() - offset) as u64);
            }
        }
        let (sequence, fin) = b.finish_with_word();
        if fin != self.compression_word(n, top)? {
            return Err(Error::Invariant(String::from("power compression ended in the wrong word")));
        }
        Ok(PowerCompression { sequence, working_fl })
    }
}

#[derive(Clone, Debug)]
pub struct PowerCompression {
    pub sequence: PSequence,
    pub working_fl: u64,
}

pub fn compression_word(spec: &CommutatorSpec, n: u64, s: u64) -> Result<Word> {
    let ctx = standalone(spec)?;
    ctx.compression_word(n, s)
}

pub fn increment_sequence(spec: &CommutatorSpec, n: u64, s: u64) -> Result<PSequence> {
    standalone(spec)?.increment(n, s)
}

pub fn power_compression_sequence(spec: &CommutatorSpec, n: u64) -> Result<PowerCompression> {
    standalone(spec)?.power_compression(n)
}

/// Context over a bare host with generators `x1..x_m`, `m` the largest
/// generator used by the spec.
fn standalone(spec: &CommutatorSpec) -> Result<ChainContext> {
    let m = spec.chain.iter().map(|l| l.generator()).max().unwrap_or(0) + 1;
    let generators = (1..=m)
        .map(|i| crate::presentation::Generator { name: format!("x{i}"), weight: 1, definition: None })
        .collect();
    let host = Presentation::new(generators, Vec::new(), spec.class() as u32);
    ChainContext::new(&host, spec.clone())
}

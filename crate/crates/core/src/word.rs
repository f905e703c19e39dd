//! Signed letters, flat words and free-group utilities.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

/// A generator index together with a sign, packed as `gen << 1 | inverted`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub const fn new(generator: u32, inverted: bool) -> Self {
        Letter((generator << 1) | inverted as u32)
    }

    pub const fn pos(generator: u32) -> Self {
        Letter::new(generator, false)
    }

    pub const fn neg(generator: u32) -> Self {
        Letter::new(generator, true)
    }

    pub const fn generator(self) -> u32 {
        self.0 >> 1
    }

    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// +1 or -1.
    pub const fn sign(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub const fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub const fn cancels(self, other: Letter) -> bool {
        self.0 ^ other.0 == 1
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "#{}^-1", self.generator())
        } else {
            write!(f, "#{}", self.generator())
        }
    }
}

/// A finite word over signed letters, stored flat.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub const fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(alloc::vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend_from(&mut self, other: &[Letter]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Letters reversed with every sign flipped.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `w^k` for any integer `k`, fully expanded.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let reps = k.unsigned_abs() as usize;
        let mut v = Vec::with_capacity(base.len() * reps);
        for _ in 0..reps {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Left rotation by `shift` letters.
    pub fn rotate(&self, shift: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let s = shift % self.0.len();
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[s..]);
        v.extend_from_slice(&self.0[..s]);
        Word(v)
    }

    pub fn free_reduce(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_freely_trivial(&self) -> bool {
        free_reduce(self).is_empty()
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Removes adjacent inverse pairs until none remain. Stack-based, so the
/// result is the unique reduced representative.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    Word(out)
}

pub fn inverse_word(w: &Word) -> Word {
    w.inverse()
}

/// `[a, b] = a^-1 b^-1 a b`, no reduction.
pub fn commutator(a: &Word, b: &Word) -> Word {
    let mut v = Vec::with_capacity(2 * (a.len() + b.len()));
    v.extend(a.iter().rev().map(|l| l.inverse()));
    v.extend(b.iter().rev().map(|l| l.inverse()));
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    Word(v)
}

/// Right-normed commutator `[a_1, [a_2, ..., [a_{c-1}, a_c]...]]`, with `[a] = a`.
///
/// Panics on an empty list.
pub fn nested_commutator(entries: &[Word]) -> Word {
    let (last, init) = entries.split_last().expect("nested commutator of no entries");
    init.iter().rev().fold(last.clone(), |acc, a| commutator(a, &acc))
}

/// Nested commutator of single letters.
pub fn nested_commutator_letters(letters: &[Letter]) -> Word {
    let entries: Vec<Word> = letters.iter().map(|&l| Word::letter(l)).collect();
    nested_commutator(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const X1: Letter = Letter::pos(0);
    const X2: Letter = Letter::pos(1);
    const X3: Letter = Letter::pos(2);

    #[test]
    fn letter_packing() {
        let l = Letter::neg(7);
        assert_eq!(l.generator(), 7);
        assert!(l.is_inverse());
        assert_eq!(l.inverse(), Letter::pos(7));
        assert!(l.cancels(Letter::pos(7)));
        assert!(!l.cancels(Letter::neg(7)));
        assert!(!l.cancels(Letter::pos(6)));
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&[X1, X1.inverse()]).is_empty());
        assert!(free_reduce(&[X1, X2, X2.inverse(), X1.inverse()]).is_empty());
        // x1^-2 x1^2
        let z0 = Word::letter(X1).pow(-2).concat(&Word::letter(X1).pow(2));
        assert_eq!(z0.len(), 4);
        assert!(z0.free_reduce().is_empty());
        assert_eq!(free_reduce(&[X1, X2]).letters(), &[X1, X2]);
    }

    #[test]
    fn inverse_examples() {
        assert!(Word::empty().inverse().is_empty());
        let w = Word::from(vec![X1, X2]);
        assert_eq!(w.inverse().letters(), &[X2.inverse(), X1.inverse()]);
        let c = commutator(&Word::letter(X1), &Word::letter(X2));
        assert_eq!(
            c.inverse().letters(),
            &[X2.inverse(), X1.inverse(), X2, X1]
        );
    }

    #[test]
    fn nested_commutator_examples() {
        assert_eq!(nested_commutator_letters(&[X1]).letters(), &[X1]);
        assert_eq!(
            nested_commutator_letters(&[X1, X2]).letters(),
            &[X1.inverse(), X2.inverse(), X1, X2]
        );
        // Hand expansion: x1^-1 (x2^-1 x3^-1 x2 x3)^-1 x1 (x2^-1 x3^-1 x2 x3)
        let inner = vec![X2.inverse(), X3.inverse(), X2, X3];
        let mut expected = vec![X1.inverse()];
        expected.extend([X3.inverse(), X2.inverse(), X3, X2]);
        expected.push(X1);
        expected.extend(inner);
        let got = nested_commutator_letters(&[X1, X2, X3]);
        assert_eq!(got.letters(), &expected[..]);
        assert_eq!(got.len(), 10);
    }

    #[test]
    fn nested_commutator_length_formula() {
        for c in 1..=5u32 {
            let letters: Vec<Letter> = (0..c).map(Letter::pos).collect();
            let w = nested_commutator_letters(&letters);
            assert_eq!(w.len(), 3 * (1usize << (c - 1)) - 2);
        }
    }

    #[test]
    fn rotate_and_pow() {
        let w = Word::from(vec![X1, X2, X3]);
        assert_eq!(w.rotate(1).letters(), &[X2, X3, X1]);
        assert_eq!(w.rotate(3), w);
        assert_eq!(w.pow(0).len(), 0);
        assert_eq!(w.pow(-1), w.inverse());
    }
}

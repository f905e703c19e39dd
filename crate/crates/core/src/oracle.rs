//! Exact evaluation in free nilpotent groups through the truncated free
//! associative algebra `Z<X_1..X_m> / (degree > c)`, with `x -> 1 + X`.
//! Also carries the Lyndon basis and coordinates on the degree-c component.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::Letter;

/// Dense noncommutative polynomial over `m` symbols, truncated above
/// degree `c`. Monomial `a_1..a_d` lives at `offset(d) + sum a_i m^(d-i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    m: usize,
    c: usize,
    coeffs: Vec<BigInt>,
}

fn degree_offsets(m: usize, c: usize) -> Vec<usize> {
    let mut off = Vec::with_capacity(c + 2);
    let mut acc = 0usize;
    let mut block = 1usize;
    for _ in 0..=c {
        off.push(acc);
        acc += block;
        block *= m;
    }
    off.push(acc);
    off
}

impl TruncatedSeries {
    pub fn zero(m: usize, c: usize) -> Self {
        let n = degree_offsets(m, c)[c + 1];
        TruncatedSeries { m, c, coeffs: vec![BigInt::zero(); n] }
    }

    pub fn one(m: usize, c: usize) -> Self {
        let mut s = Self::zero(m, c);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// `1 + X_symbol`.
    pub fn generator(m: usize, c: usize, symbol: usize) -> Self {
        let mut s = Self::one(m, c);
        if c >= 1 {
            s.coeffs[1 + symbol] = BigInt::one();
        }
        s
    }

    pub fn symbols(&self) -> usize {
        self.m
    }

    pub fn degree_cap(&self) -> usize {
        self.c
    }

    fn offsets(&self) -> Vec<usize> {
        degree_offsets(self.m, self.c)
    }

    fn index_of(&self, monomial: &[usize]) -> usize {
        let off = self.offsets();
        off[monomial.len()] + monomial.iter().fold(0, |acc, &a| acc * self.m + a)
    }

    pub fn coefficient(&self, monomial: &[usize]) -> &BigInt {
        assert!(monomial.len() <= self.c, "monomial above the degree cap");
        &self.coeffs[self.index_of(monomial)]
    }

    /// Coefficients of all degree-`d` monomials in base-`m` order.
    pub fn degree_part(&self, d: usize) -> &[BigInt] {
        let off = self.offsets();
        &self.coeffs[off[d]..off[d + 1]]
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|x| x.is_zero())
    }

    /// Lowest positive degree with a nonzero coefficient.
    pub fn lowest_nonconstant_degree(&self) -> Option<usize> {
        (1..=self.c).find(|&d| self.degree_part(d).iter().any(|x| !x.is_zero()))
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!((self.m, self.c), (other.m, other.c), "series over different algebras");
        let off = self.offsets();
        let mut out = Self::zero(self.m, self.c);
        for d1 in 0..=self.c {
            for i in 0..off[d1 + 1] - off[d1] {
                let a = &self.coeffs[off[d1] + i];
                if a.is_zero() {
                    continue;
                }
                let mut scale = 1usize;
                for d2 in 0..=self.c - d1 {
                    for j in 0..off[d2 + 1] - off[d2] {
                        let b = &other.coeffs[off[d2] + j];
                        if b.is_zero() {
                            continue;
                        }
                        out.coeffs[off[d1 + d2] + i * scale + j] += a * b;
                    }
                    scale *= self.m;
                }
            }
        }
        out
    }

    /// `self * (1 + X_s)` in place.
    fn mul_generator(&mut self, s: usize) {
        let off = self.offsets();
        for d in (0..self.c).rev() {
            for i in 0..off[d + 1] - off[d] {
                if self.coeffs[off[d] + i].is_zero() {
                    continue;
                }
                let v = self.coeffs[off[d] + i].clone();
                self.coeffs[off[d + 1] + i * self.m + s] += v;
            }
        }
    }

    /// `self * (1 + X_s)^-1` in place: solves `T (1 + X_s) = self` degree by degree.
    fn mul_generator_inverse(&mut self, s: usize) {
        let off = self.offsets();
        for d in 1..=self.c {
            for i in 0..off[d] - off[d - 1] {
                let prev = self.coeffs[off[d - 1] + i].clone();
                if prev.is_zero() {
                    continue;
                }
                self.coeffs[off[d] + i * self.m + s] -= prev;
            }
        }
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self) -> TruncatedSeries {
        assert!(self.coeffs[0].is_one(), "only series with constant term 1 are inverted here");
        let mut nil = self.clone();
        nil.coeffs[0] = BigInt::zero();
        let mut neg = nil.clone();
        for x in neg.coeffs.iter_mut() {
            *x = -core::mem::take(x);
        }
        // 1 + N + N^2 + ... with N = -nil
        let mut out = Self::one(self.m, self.c);
        let mut power = Self::one(self.m, self.c);
        for _ in 0..self.c {
            power = power.mul(&neg);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += p;
            }
        }
        out
    }
}

/// Series images of every generator of a presentation; compound letters are
/// expanded through their definitions.
#[derive(Clone, Debug)]
pub struct Oracle {
    class: usize,
    symbols: usize,
    /// `Some(symbol)` for weight-1 generators.
    symbol_of: Vec<Option<usize>>,
    images: Vec<(TruncatedSeries, TruncatedSeries)>,
}

impl Oracle {
    pub fn new(p: &Presentation, class: u32) -> Self {
        let c = class as usize;
        let mut symbol_of = Vec::with_capacity(p.generators.len());
        let mut symbols = 0;
        for g in &p.generators {
            if g.definition.is_none() {
                symbol_of.push(Some(symbols));
                symbols += 1;
            } else {
                symbol_of.push(None);
            }
        }
        let mut images: Vec<(TruncatedSeries, TruncatedSeries)> = Vec::with_capacity(p.generators.len());
        for (i, g) in p.generators.iter().enumerate() {
            let img = match (symbol_of[i], g.definition) {
                (Some(s), _) => TruncatedSeries::generator(symbols, c, s),
                (None, Some((x, y))) => {
                    let (x, y) = (x as usize, y as usize);
                    assert!(x < i && y < i, "definitions must refer to earlier generators");
                    let (sx, sx_inv) = &images[x];
                    let (sy, sy_inv) = &images[y];
                    sx_inv.mul(sy_inv).mul(sx).mul(sy)
                }
                (None, None) => unreachable!(),
            };
            let inv = img.inverse();
            images.push((img, inv));
        }
        Oracle { class: c, symbols, symbol_of, images }
    }

    pub fn class(&self) -> u32 {
        self.class as u32
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn eval(&self, w: &[Letter]) -> TruncatedSeries {
        let mut s = TruncatedSeries::one(self.symbols, self.class);
        for &l in w {
            let g = l.generator() as usize;
            match self.symbol_of[g] {
                Some(sym) if l.is_inverse() => s.mul_generator_inverse(sym),
                Some(sym) => s.mul_generator(sym),
                None => {
                    let (img, inv) = &self.images[g];
                    s = s.mul(if l.is_inverse() { inv } else { img });
                }
            }
        }
        s
    }

    pub fn is_identity(&self, w: &[Letter]) -> bool {
        self.eval(w).is_one()
    }
}

pub fn eval_word(p: &Presentation, w: &[Letter], class: u32) -> TruncatedSeries {
    Oracle::new(p, class).eval(w)
}

pub fn is_identity(p: &Presentation, w: &[Letter], class: u32) -> bool {
    Oracle::new(p, class).is_identity(w)
}

/// Lyndon words of length exactly `c` over `0..m`, increasing lexicographic
/// order (Duval's generation).
pub fn lyndon_words(m: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 || c == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        if w.len() == c {
            out.push(w.clone());
        }
        // extend periodically to length c, then increment
        let k = w.len();
        while w.len() < c {
            let x = w[w.len() - k];
            w.push(x);
        }
        while let Some(&last) = w.last() {
            if last == m - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => return out,
        }
    }
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `(1/c) sum_{d | c} mu(d) m^(c/d)`.
pub fn witt_number(m: usize, c: usize) -> u64 {
    assert!(c >= 1);
    let mut sum: i128 = 0;
    for d in 1..=c {
        if c.is_multiple_of(d) {
            sum += mobius(d) as i128 * (m as i128).pow((c / d) as u32);
        }
    }
    (sum / c as i128) as u64
}

/// Homogeneous degree-`d` polynomial, dense in base-`m` monomial order.
type Homogeneous = Vec<BigInt>;

fn monomial_index(m: usize, w: &[usize]) -> usize {
    w.iter().fold(0, |acc, &a| acc * m + a)
}

fn bracket(m: usize, p: &Homogeneous, dp: usize, q: &Homogeneous, dq: usize) -> Homogeneous {
    let mq = m.pow(dq as u32);
    let mp = m.pow(dp as u32);
    let mut out = vec![BigInt::zero(); mp * mq];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let ab = a * b;
            out[i * mq + j] += &ab;
            out[j * mp + i] -= ab;
        }
    }
    out
}

/// Standard bracketing of a Lyndon word: `[b(u), b(v)]` with `v` the
/// longest proper Lyndon suffix.
fn standard_bracketing(m: usize, w: &[usize]) -> Homogeneous {
    if w.len() == 1 {
        let mut out = vec![BigInt::zero(); m];
        out[w[0]] = BigInt::one();
        return out;
    }
    let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("single letters are Lyndon");
    let (u, v) = w.split_at(split);
    bracket(m, &standard_bracketing(m, u), u.len(), &standard_bracketing(m, v), v.len())
}

pub fn is_lyndon(w: &[usize]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| {
        let rot = w[i..].iter().chain(&w[..i]);
        w.iter().lt(rot)
    })
}

#[derive(Clone, Debug)]
pub struct LyndonBasis {
    pub m: usize,
    pub c: usize,
    pub words: Vec<Vec<usize>>,
    /// Expanded bracketing of each word over degree-`c` monomials.
    pub bracketings: Vec<Vec<BigInt>>,
}

pub fn lyndon_basis(m: usize, c: usize) -> LyndonBasis {
    let words = lyndon_words(m, c);
    let bracketings = words.iter().map(|w| standard_bracketing(m, w)).collect();
    LyndonBasis { m, c, words, bracketings }
}

impl LyndonBasis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Coordinates of the degree-`c` part of an element of `Γ_c` on the Lyndon
/// bracketings.
pub fn weight_exponents(s: &TruncatedSeries, basis: &LyndonBasis) -> Result<Vec<BigInt>> {
    assert_eq!((s.m, s.c), (basis.m, basis.c), "series and basis disagree on the algebra");
    if !s.coeffs[0].is_one() {
        return Err(Error::Invariant(alloc::string::String::from("series is not a group element")));
    }
    if let Some(d) = s.lowest_nonconstant_degree() {
        if d < basis.c {
            return Err(Error::NotInGammaC { class: d as u32 });
        }
    }
    let mut rest: Vec<BigInt> = s.degree_part(basis.c).to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for (w, b) in basis.words.iter().zip(&basis.bracketings) {
        let k = rest[monomial_index(basis.m, w)].clone();
        if !k.is_zero() {
            for (r, x) in rest.iter_mut().zip(b) {
                *r -= &k * x;
            }
        }
        coords.push(k);
    }
    if rest.iter().any(|x| !x.is_zero()) {
        return Err(Error::Invariant(alloc::string::String::from(
            "degree-c component is not a Lie element",
        )));
    }
    Ok(coords)
}

fn to_rational_rows(vectors: &[Vec<BigInt>], extra: Option<&[BigInt]>) -> Vec<Vec<BigRational>> {
    let rows = vectors.first().map(|v| v.len()).or(extra.map(|t| t.len())).unwrap_or(0);
    (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> =
                vectors.iter().map(|b| BigRational::from_integer(b[i].clone())).collect();
            if let Some(t) = extra {
                row.push(BigRational::from_integer(t[i].clone()));
            }
            row
        })
        .collect()
}

/// Reduced row echelon form over the first `cols` columns; returns the
/// pivot rows in column order, or `None` if some column has no pivot.
fn eliminate(a: &mut [Vec<BigRational>], cols: usize) -> Vec<Option<usize>> {
    let rows = a.len();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(cols);
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| !a[r][col].is_zero()) else {
            pivots.push(None);
            continue;
        };
        a.swap(pivot_row, r);
        let pv = a[pivot_row][col].clone();
        for x in a[pivot_row].iter_mut() {
            *x /= &pv;
        }
        let pivot = a[pivot_row].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(Some(pivot_row));
        pivot_row += 1;
    }
    pivots
}

/// Rank over the rationals of a list of equal-length vectors.
pub fn rank(vectors: &[Vec<BigInt>]) -> usize {
    let mut a = to_rational_rows(vectors, None);
    eliminate(&mut a, vectors.len()).iter().filter(|p| p.is_some()).count()
}

/// Rational coefficients `k` with `sum k_i basis_i = target`, if any. The
/// basis vectors must be linearly independent.
pub fn solve_rational(target: &[BigInt], basis: &[Vec<BigInt>]) -> Option<Vec<BigRational>> {
    let cols = basis.len();
    let mut a = to_rational_rows(basis, Some(target));
    let pivots = eliminate(&mut a, cols);
    let used = pivots.iter().filter(|p| p.is_some()).count();
    if used < cols || a[used..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|p| a[p.expect("full rank")][cols].clone()).collect())
}

/// Integer coefficients `k` with `sum k_i basis_i = target`, if any. The
/// basis vectors must be linearly independent.
pub fn solve_in_basis(target: &[BigInt], basis: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let sol = solve_rational(target, basis)?;
    sol.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

/// Largest absolute coefficient, handy for diagnostics.
pub fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

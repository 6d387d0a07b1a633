//! Words over {x, y}, compositions, and the shuffle / quasi-shuffle algebras.
//!
//! Convention: ζ(s₁,…,s_k) = Σ_{n₁>…>n_k≥1} ∏ nᵢ^{−sᵢ} is encoded as
//! x^{s₁−1} y … x^{s_k−1} y, where x ↔ dt/t and y ↔ dt/(1−t), and the first
//! letter sits at the largest integration variable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{LinComb, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
}

impl Letter {
    pub fn swap(self) -> Letter {
        match self {
            Letter::X => Letter::Y,
            Letter::Y => Letter::X,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
        }
    }
}

/// A word in the letters x < y. The empty word is the unit.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn depth(&self) -> usize {
        self.0.iter().filter(|&&l| l == Letter::Y).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    fn prepend(&self, l: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// `""` and `"1"` denote the empty word.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        if s == "1" {
            return Ok(Word::empty());
        }
        s.char_indices()
            .map(|(i, c)| match c {
                'x' => Ok(Letter::X),
                'y' => Ok(Letter::Y),
                other => Err(Error::parse(i, format!("unexpected character {other:?} in word"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// MZV index (s₁,…,s_k), all parts ≥ 1, never empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("composition must be nonempty".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("composition parts must be >= 1".into()));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&s| s as usize).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_admissible(&self) -> bool {
        self.0[0] >= 2
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Comma-separated positive integers, e.g. `"3,1"`; surrounding parentheses are tolerated.
impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Composition> {
        let (offset, body) = match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            Some(inner) => (1, inner),
            None => (0, s),
        };
        if body.is_empty() {
            return Err(Error::parse(0, "empty composition"));
        }
        let mut parts = Vec::new();
        let mut pos = offset;
        for piece in body.split(',') {
            if let Some(i) = piece.find(|c: char| !c.is_ascii_digit()) {
                let c = piece[i..].chars().next().unwrap();
                return Err(Error::parse(pos + i, format!("unexpected character {c:?} in composition")));
            }
            if piece.is_empty() {
                return Err(Error::parse(pos, "empty part in composition"));
            }
            let v: u32 = piece.parse().map_err(|_| Error::parse(pos, "part too large"))?;
            if v == 0 {
                return Err(Error::parse(pos, "parts must be >= 1"));
            }
            parts.push(v);
            pos += piece.len() + 1;
        }
        Composition::new(parts)
    }
}

pub fn word_from_composition(c: &Composition) -> Word {
    let mut v = Vec::with_capacity(c.weight());
    for &s in c.parts() {
        v.extend(std::iter::repeat_n(Letter::X, s as usize - 1));
        v.push(Letter::Y);
    }
    Word(v)
}

pub fn composition_from_word(w: &Word) -> Result<Composition> {
    if w.letters().last() != Some(&Letter::Y) {
        return Err(Error::WordNotOfZetaShape(w.to_string()));
    }
    let mut parts = Vec::new();
    let mut run = 1u32;
    for &l in w.letters() {
        match l {
            Letter::X => run += 1,
            Letter::Y => {
                parts.push(run);
                run = 1;
            }
        }
    }
    Composition::new(parts)
}

/// Nonempty, begins with x, ends with y.
pub fn is_admissible(w: &Word) -> bool {
    w.letters().first() == Some(&Letter::X) && w.letters().last() == Some(&Letter::Y)
}

pub fn shuffle(a: &Word, b: &Word) -> LinComb<Word> {
    match (a.letters().split_first(), b.letters().split_first()) {
        (None, _) => LinComb::basis(b.clone()),
        (_, None) => LinComb::basis(a.clone()),
        (Some((&la, ra)), Some((&lb, rb))) => {
            let ra = Word(ra.to_vec());
            let rb = Word(rb.to_vec());
            let left = shuffle(&ra, b).map_linear(|w| LinComb::basis(w.prepend(la)));
            let right = shuffle(a, &rb).map_linear(|w| LinComb::basis(w.prepend(lb)));
            left.add(&right)
        }
    }
}

/// Shuffle product extended bilinearly.
pub fn shuffle_lin(a: &LinComb<Word>, b: &LinComb<Word>) -> LinComb<Word> {
    a.mul(b, shuffle)
}

fn stuffle_parts(a: &[u32], b: &[u32]) -> Vec<(Vec<u32>, Rational)> {
    fn go(a: &[u32], b: &[u32], out: &mut LinComb<Vec<u32>>) {
        match (a.split_first(), b.split_first()) {
            (None, _) => out.add_term(b.to_vec(), Rational::one()),
            (_, None) => out.add_term(a.to_vec(), Rational::one()),
            (Some((&sa, ra)), Some((&sb, rb))) => {
                let mut sub = LinComb::zero();
                go(ra, b, &mut sub);
                for (w, c) in sub.iter() {
                    let mut v = vec![sa];
                    v.extend_from_slice(w);
                    out.add_term(v, c.clone());
                }
                let mut sub = LinComb::zero();
                go(a, rb, &mut sub);
                for (w, c) in sub.iter() {
                    let mut v = vec![sb];
                    v.extend_from_slice(w);
                    out.add_term(v, c.clone());
                }
                let mut sub = LinComb::zero();
                go(ra, rb, &mut sub);
                for (w, c) in sub.iter() {
                    let mut v = vec![sa + sb];
                    v.extend_from_slice(w);
                    out.add_term(v, c.clone());
                }
            }
        }
    }
    let mut out = LinComb::zero();
    go(a, b, &mut out);
    out.iter().map(|(k, c)| (k.clone(), c.clone())).collect()
}

/// Quasi-shuffle: (a·u)*(b·v) = a·(u*(b·v)) + b·((a·u)*v) + (a+b)·(u*v).
pub fn stuffle(a: &Composition, b: &Composition) -> LinComb<Composition> {
    stuffle_parts(a.parts(), b.parts()).into_iter().map(|(p, c)| (Composition(p), c)).collect()
}

/// Reverse, then swap x ↔ y.
pub fn dual(w: &Word) -> Result<Word> {
    if !is_admissible(w) {
        return Err(Error::NotAdmissible(format!("dual requires an admissible word, got {w}")));
    }
    Ok(Word(w.letters().iter().rev().map(|l| l.swap()).collect()))
}

/// Deconcatenation coproduct: every split w = u·v, including the two trivial ones.
pub fn deconcat_coproduct(w: &Word) -> Vec<(Word, Word)> {
    (0..=w.len()).map(|i| (w.slice(0, i), w.slice(i, w.len()))).collect()
}

/// All admissible words of the given weight, in lexicographic order.
pub fn enumerate_admissible(weight: usize) -> Result<Vec<Word>> {
    if weight < 2 {
        return Err(Error::WeightTooSmall(weight));
    }
    let inner = weight - 2;
    let mut out: Vec<Word> = (0u64..(1u64 << inner))
        .map(|mask| {
            let mut v = Vec::with_capacity(weight);
            v.push(Letter::X);
            for i in (0..inner).rev() {
                v.push(if mask >> i & 1 == 1 { Letter::Y } else { Letter::X });
            }
            v.push(Letter::Y);
            Word(v)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All words of exactly the given length.
pub fn all_words(len: usize) -> Vec<Word> {
    (0u64..(1u64 << len))
        .map(|mask| {
            Word((0..len).rev().map(|i| if mask >> i & 1 == 1 { Letter::Y } else { Letter::X }).collect())
        })
        .collect()
}

/// All compositions of weight n.
pub fn compositions_of(n: usize) -> Vec<Composition> {
    if n == 0 {
        return Vec::new();
    }
    // bits of mask mark cut points between the n units
    (0u64..(1u64 << (n - 1)))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut run = 1u32;
            for i in 0..n - 1 {
                if mask >> i & 1 == 1 {
                    parts.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            parts.push(run);
            Composition(parts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Composition {
        s.parse().unwrap()
    }

    fn lc<B: Ord + Clone>(terms: Vec<(B, i64)>) -> LinComb<B> {
        terms.into_iter().map(|(b, n)| (b, Rational::from(n))).collect()
    }

    // Independent oracle: enumerate interleavings as position subsets.
    fn shuffle_brute(a: &Word, b: &Word) -> LinComb<Word> {
        let n = a.len() + b.len();
        let mut out = LinComb::zero();
        for mask in 0u64..(1u64 << n) {
            if mask.count_ones() as usize != a.len() {
                continue;
            }
            let (mut i, mut j) = (0, 0);
            let mut v = Vec::new();
            for p in 0..n {
                if mask >> p & 1 == 1 {
                    v.push(a.letters()[i]);
                    i += 1;
                } else {
                    v.push(b.letters()[j]);
                    j += 1;
                }
            }
            out.add_term(Word(v), Rational::one());
        }
        out
    }

    // Independent oracle: quasi-shuffles as surjections onto an ordered target,
    // each target slot taking at most one part from each side, order preserving.
    fn stuffle_brute(a: &[u32], b: &[u32]) -> LinComb<Vec<u32>> {
        let mut out = LinComb::zero();
        let max_len = a.len() + b.len();
        for len in a.len().max(b.len())..=max_len {
            // choose slot sets for a and b: increasing maps into 0..len, union covers all
            for ma in 0u64..(1u64 << len) {
                if ma.count_ones() as usize != a.len() {
                    continue;
                }
                for mb in 0u64..(1u64 << len) {
                    if mb.count_ones() as usize != b.len() || (ma | mb) != (1u64 << len) - 1 {
                        continue;
                    }
                    let (mut i, mut j) = (0, 0);
                    let mut v = Vec::new();
                    for p in 0..len {
                        let mut s = 0;
                        if ma >> p & 1 == 1 {
                            s += a[i];
                            i += 1;
                        }
                        if mb >> p & 1 == 1 {
                            s += b[j];
                            j += 1;
                        }
                        v.push(s);
                    }
                    out.add_term(v, Rational::one());
                }
            }
        }
        out
    }

    #[test]
    fn composition_word_examples() {
        assert_eq!(word_from_composition(&c("2")), w("xy"));
        assert_eq!(word_from_composition(&c("2,1")), w("xyy"));
        assert_eq!(word_from_composition(&c("3,1")), w("xxyy"));
        assert_eq!(composition_from_word(&w("xy")).unwrap(), c("2"));
        assert_eq!(composition_from_word(&w("xxyxy")).unwrap(), c("3,2"));
        assert!(matches!(composition_from_word(&w("x")), Err(Error::WordNotOfZetaShape(_))));
        assert!(matches!(composition_from_word(&Word::empty()), Err(Error::WordNotOfZetaShape(_))));
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&w("xy")));
        assert!(!is_admissible(&w("yx")));
        assert!(!is_admissible(&Word::empty()));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(
            "xyz".parse::<Word>().unwrap_err(),
            Error::Parse { position: 2, message: "unexpected character 'z' in word".into() }
        );
        match "3,a".parse::<Composition>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!("2,,1".parse::<Composition>().is_err());
        assert!("0".parse::<Composition>().is_err());
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffle(&w("x"), &w("y")), lc(vec![(w("xy"), 1), (w("yx"), 1)]));
        assert_eq!(shuffle(&w("x"), &w("x")), lc(vec![(w("xx"), 2)]));
        let expect = lc(vec![(w("xyxy"), 2), (w("xxyy"), 4)]);
        assert_eq!(shuffle_brute(&w("xy"), &w("xy")), expect);
        assert_eq!(shuffle(&w("xy"), &w("xy")), expect);
    }

    #[test]
    fn stuffle_examples() {
        assert_eq!(stuffle_brute(&[2], &[2]), lc(vec![(vec![2, 2], 2), (vec![4], 1)]));
        assert_eq!(stuffle(&c("2"), &c("2")), lc(vec![(c("2,2"), 2), (c("4"), 1)]));
        assert_eq!(stuffle(&c("1"), &c("1")), lc(vec![(c("1,1"), 2), (c("2"), 1)]));
        assert_eq!(stuffle(&c("2"), &c("3")), lc(vec![(c("2,3"), 1), (c("3,2"), 1), (c("5"), 1)]));
    }

    #[test]
    fn stuffle_matches_brute_force() {
        for n in 1..=6 {
            for m in 1..=(6 - n).max(1) {
                for a in compositions_of(n) {
                    for b in compositions_of(m) {
                        let fast: LinComb<Vec<u32>> =
                            stuffle(&a, &b).iter().map(|(k, v)| (k.parts().to_vec(), v.clone())).collect();
                        assert_eq!(fast, stuffle_brute(a.parts(), b.parts()), "{a} * {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&w("xy")).unwrap(), w("xy"));
        assert_eq!(dual(&w("xxy")).unwrap(), w("xyy"));
        assert_eq!(dual(&w("xxxy")).unwrap(), w("xyyy"));
        assert!(matches!(dual(&w("yx")), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn deconcat_examples() {
        assert_eq!(
            deconcat_coproduct(&w("xy")),
            vec![(Word::empty(), w("xy")), (w("x"), w("y")), (w("xy"), Word::empty())]
        );
        assert_eq!(deconcat_coproduct(&w("x")), vec![(Word::empty(), w("x")), (w("x"), Word::empty())]);
        assert_eq!(deconcat_coproduct(&Word::empty()), vec![(Word::empty(), Word::empty())]);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_admissible(2).unwrap(), vec![w("xy")]);
        assert_eq!(enumerate_admissible(3).unwrap(), vec![w("xxy"), w("xyy")]);
        assert_eq!(enumerate_admissible(4).unwrap(), vec![w("xxxy"), w("xxyy"), w("xyxy"), w("xyyy")]);
        assert_eq!(enumerate_admissible(1), Err(Error::WeightTooSmall(1)));
        for n in 2..=10 {
            let ws = enumerate_admissible(n).unwrap();
            assert_eq!(ws.len(), 1 << (n - 2));
            assert!(ws.iter().all(|x| is_admissible(x) && x.weight() == n));
        }
    }

    #[test]
    fn round_trip_exhaustive() {
        for n in 1..=10 {
            for comp in compositions_of(n) {
                assert_eq!(composition_from_word(&word_from_composition(&comp)).unwrap(), comp);
            }
        }
    }

    fn words_up_to(n: usize) -> Vec<Word> {
        (0..=n).flat_map(all_words).collect()
    }

    #[test]
    fn shuffle_commutative_associative_and_mass() {
        let ws = words_up_to(4);
        for a in &ws {
            for b in &ws {
                if a.len() + b.len() > 6 {
                    continue;
                }
                let ab = shuffle(a, b);
                assert_eq!(ab, shuffle(b, a));
                assert_eq!(ab, shuffle_brute(a, b));
                let binom = num_integer::binomial(a.len() + b.len(), a.len()) as i64;
                assert_eq!(ab.mass(), Rational::from(binom));
                for c in &ws {
                    if a.len() + b.len() + c.len() > 6 {
                        continue;
                    }
                    let left = shuffle_lin(&ab, &LinComb::basis(c.clone()));
                    let right = shuffle_lin(&LinComb::basis(a.clone()), &shuffle(b, c));
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn stuffle_commutative_associative() {
        let cs: Vec<Composition> = (1..=4).flat_map(compositions_of).collect();
        for a in &cs {
            for b in &cs {
                if a.weight() + b.weight() > 6 {
                    continue;
                }
                let ab = stuffle(a, b);
                assert_eq!(ab, stuffle(b, a));
                for c in &cs {
                    if a.weight() + b.weight() + c.weight() > 6 {
                        continue;
                    }
                    let left = ab.mul(&LinComb::basis(c.clone()), stuffle);
                    let right = LinComb::basis(a.clone()).mul(&stuffle(b, c), stuffle);
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn dual_is_involution() {
        for n in 2..=8 {
            for x in enumerate_admissible(n).unwrap() {
                let d = dual(&x).unwrap();
                assert_eq!(d.weight(), n);
                assert_eq!(dual(&d).unwrap(), x);
            }
        }
    }

    type T2 = (Word, Word);
    type T3 = (Word, Word, Word);

    fn delta(w: &Word) -> LinComb<T2> {
        deconcat_coproduct(w).into_iter().map(|p| (p, Rational::one())).collect()
    }

    #[test]
    fn deconcat_is_coassociative() {
        for x in words_up_to(6) {
            let left: LinComb<T3> = delta(&x).map_linear(|(u, v)| {
                delta(u).map_linear(|(a, b)| LinComb::basis((a.clone(), b.clone(), v.clone())))
            });
            let right: LinComb<T3> = delta(&x).map_linear(|(u, v)| {
                delta(v).map_linear(|(a, b)| LinComb::basis((u.clone(), a.clone(), b.clone())))
            });
            assert_eq!(left, right);
            assert_eq!(delta(&x).len(), x.len() + 1);
        }
    }

    #[test]
    fn deconcat_is_shuffle_algebra_map() {
        let ws = words_up_to(5);
        let tensor_shuffle = |p: &T2, q: &T2| -> LinComb<T2> {
            let left = shuffle(&p.0, &q.0);
            let right = shuffle(&p.1, &q.1);
            left.map_linear(|a| right.map_linear(|b| LinComb::basis((a.clone(), b.clone()))))
        };
        for a in &ws {
            for b in &ws {
                if a.len() + b.len() > 5 {
                    continue;
                }
                let lhs = shuffle(a, b).map_linear(delta);
                let rhs = delta(a).mul(&delta(b), tensor_shuffle);
                assert_eq!(lhs, rhs, "{a} ш {b}");
            }
        }
    }
}

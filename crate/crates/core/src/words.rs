//! Free-group words, moment specifications, and the occurrence bookkeeping
//! (symbol set, trace permutation, mirror pairing) the moment engine runs on.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Permutation;

const MAX_EXPANDED_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u8, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self {
            inverse: !self.inverse,
            ..self
        }
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    /// Freely reduces the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    /// `(generator, sign)` pairs; panics on a zero sign.
    pub fn from_signed(pairs: &[(u8, i8)]) -> Self {
        Self::from_letters(pairs.iter().map(|&(g, s)| {
            assert!(s == 1 || s == -1, "sign must be ±1");
            Letter::new(g, s < 0)
        }))
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

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&f), Some(&l)) if self.0.len() > 1 => f != l.inv(),
                _ => true,
            }
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Strips matching inverse letters from both ends.
    pub fn cyclically_reduce(&self) -> Self {
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == self.0[hi - 1].inv() {
            lo += 1;
            hi -= 1;
        }
        Self(self.0[lo..hi].to_vec())
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let len = v.len();
            v.rotate_left(k % len);
        }
        Self(v)
    }

    /// Number of cyclic rotations that reproduce the word letter for letter.
    pub fn symmetry_count(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::Domain("symmetry count of the empty word".into()));
        }
        let len = self.len();
        Ok((0..len)
            .filter(|&k| (0..len).all(|i| self.0[i] == self.0[(i + k) % len]))
            .count())
    }

    /// Largest generator id plus one (0 for the empty word).
    pub fn generator_span(&self) -> usize {
        self.0.iter().map(|l| l.generator as usize + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    /// Compact token form, e.g. `a^2b^-1`; parses back to the same word.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            let c = (b'a' + l.generator) as char;
            match (run, l.inverse) {
                (1, false) => write!(f, "{c}")?,
                (k, false) => write!(f, "{c}^{k}")?,
                (k, true) => write!(f, "{c}^-{k}")?,
            }
            i += run;
        }
        Ok(())
    }
}

/// Parses `token+` where `token := [a-z] ('^' '-'? [1-9][0-9]*)?`, tokens
/// optionally separated by whitespace; the result is freely reduced.
pub fn parse_word(text: &str) -> Result<Word> {
    parse_word_at(text, 0)
}

/// As [`parse_word`], reporting error positions shifted by `offset`.
pub fn parse_word_at(text: &str, offset: usize) -> Result<Word> {
    let bytes = text.as_bytes();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos: offset + pos,
        msg: msg.to_string(),
    };
    let mut letters = Vec::new();
    let mut i = 0;
    let mut tokens = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_ascii_lowercase() {
            return Err(err(i, "expected a generator letter a-z"));
        }
        let generator = c - b'a';
        i += 1;
        let mut exp: i64 = 1;
        if bytes.get(i) == Some(&b'^') {
            i += 1;
            let neg = bytes.get(i) == Some(&b'-');
            if neg {
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &text[start..i];
            if digits.is_empty() {
                return Err(err(start, "expected an exponent"));
            }
            if digits.starts_with('0') {
                return Err(err(
                    start,
                    if digits.len() == 1 {
                        "zero exponent"
                    } else {
                        "exponent has a leading zero"
                    },
                ));
            }
            exp = digits
                .parse::<i64>()
                .map_err(|_| err(start, "exponent too large"))?;
            if neg {
                exp = -exp;
            }
        }
        let count = exp.unsigned_abs() as usize;
        if letters.len() + count > MAX_EXPANDED_LEN {
            return Err(err(i, "word too long"));
        }
        letters.extend(std::iter::repeat_n(Letter::new(generator, exp < 0), count));
        tokens += 1;
    }
    if tokens == 0 {
        return Err(err(bytes.len(), "empty word"));
    }
    Ok(Word::from_letters(letters))
}

/// All cyclically reduced words of length `1..=max_len` on `generators`
/// letters, in lexicographic order within each length.
pub fn cyclically_reduced_words(generators: u8, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..generators)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last() == Some(&l.inv()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(
            next.iter()
                .map(|v| Word(v.clone()))
                .filter(Word::is_cyclically_reduced),
        );
        layer = next;
    }
    out
}

/// One `tr(w)^α · conj(tr(w))^β` factor group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentTerm {
    pub word: Word,
    pub alpha: u32,
    pub beta: u32,
}

/// A product of trace powers `Π tr(w_i)^{α_i} conj(tr(w_i))^{β_i}`.
///
/// Words are cyclically reduced on construction and terms on the same word
/// are merged, keeping first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentSpec {
    terms: Vec<MomentTerm>,
    generators: usize,
}

impl MomentSpec {
    pub fn new(terms: impl IntoIterator<Item = MomentTerm>) -> Result<Self> {
        let mut merged: Vec<MomentTerm> = Vec::new();
        for t in terms {
            if t.alpha + t.beta == 0 {
                return Err(Error::Domain(format!("term tr({}) has zero total power", t.word)));
            }
            let word = t.word.cyclically_reduce();
            if word.is_empty() {
                return Err(Error::Domain(
                    "trace of the identity word is not a moment term".into(),
                ));
            }
            match merged.iter_mut().find(|m| m.word == word) {
                Some(m) => {
                    m.alpha += t.alpha;
                    m.beta += t.beta;
                }
                None => merged.push(MomentTerm { word, alpha: t.alpha, beta: t.beta }),
            }
        }
        if merged.is_empty() {
            return Err(Error::Domain("moment spec has no terms".into()));
        }
        let generators = merged.iter().map(|t| t.word.generator_span()).max().unwrap_or(1);
        Ok(Self { terms: merged, generators })
    }

    /// Convenience constructor from `(word text, α, β)` triples.
    pub fn from_words(terms: &[(&str, u32, u32)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(w, alpha, beta)| {
                Ok(MomentTerm {
                    word: parse_word(w)?,
                    alpha,
                    beta,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn terms(&self) -> &[MomentTerm] {
        &self.terms
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Every term has `α = β`, i.e. the spec is a product of `|tr(w)|^{2α}`.
    pub fn is_abs_square_form(&self) -> bool {
        self.terms.iter().all(|t| t.alpha == t.beta)
    }

    /// Number of letter occurrences after expanding all powers.
    pub fn total_letters(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.word.len() * (t.alpha + t.beta) as usize)
            .sum()
    }

    /// Replaces the word of term `i`.
    pub fn with_word(&self, i: usize, word: Word) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms[i].word = word;
        Self::new(terms)
    }
}

impl fmt::Display for MomentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for t in &self.terms {
            if t.alpha == t.beta {
                parts.push(format!("|tr({})|^{}", t.word, 2 * t.alpha));
                continue;
            }
            for (power, prefix) in [(t.alpha, ""), (t.beta, "~")] {
                match power {
                    0 => {}
                    1 => parts.push(format!("{prefix}tr({})", t.word)),
                    k => parts.push(format!("{prefix}tr({})^{k}", t.word)),
                }
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// One letter occurrence inside the expanded trace product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub generator: usize,
    /// The letter is an inverse, so it contributes an entry of `U*`.
    pub starred: bool,
    pub factor: usize,
    pub position: usize,
}

/// One trace factor of the expanded product: a copy of `w_t` or of its
/// inverse (for the conjugated powers).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub term: usize,
    pub copy: usize,
    pub conjugate: bool,
    pub start: usize,
    pub len: usize,
}

/// Letter occurrences of an expanded moment spec, partitioned per generator
/// into unstarred and starred blocks.
///
/// The order of ids inside each block is the fixed indexing used to identify
/// bijections between blocks with permutations.
#[derive(Debug, Clone)]
pub struct SymbolSet {
    occurrences: Vec<Occurrence>,
    factors: Vec<Factor>,
    unstarred: Vec<Vec<usize>>,
    starred: Vec<Vec<usize>>,
    block_index: Vec<usize>,
}

impl SymbolSet {
    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn generator_count(&self) -> usize {
        self.unstarred.len()
    }

    pub fn unstarred(&self, g: usize) -> &[usize] {
        &self.unstarred[g]
    }

    pub fn starred(&self, g: usize) -> &[usize] {
        &self.starred[g]
    }

    /// Position of an occurrence inside its (generator, starred) block.
    pub fn block_index(&self, id: usize) -> usize {
        self.block_index[id]
    }

    /// Exclusive end offsets of each trace factor.
    pub fn segment_ends(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.start + f.len).collect()
    }
}

/// The trace permutation: cycles each factor's occurrences in letter order,
/// so `Π tr(factor)` is the index contraction `Σ_a Π_x X_x[a_x, a_{γ(x)}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPermutation(Permutation);

impl GammaPermutation {
    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0.apply(x)
    }
}

pub fn build_symbol_set(spec: &MomentSpec) -> (SymbolSet, GammaPermutation) {
    let m = spec.generator_count();
    let mut occurrences = Vec::with_capacity(spec.total_letters());
    let mut factors = Vec::new();
    for (term, t) in spec.terms().iter().enumerate() {
        let inverse = t.word.inverse();
        let copies = (0..t.alpha)
            .map(|c| (c, false, &t.word))
            .chain((0..t.beta).map(|c| (c, true, &inverse)));
        for (copy, conjugate, word) in copies {
            let start = occurrences.len();
            for (position, l) in word.letters().iter().enumerate() {
                occurrences.push(Occurrence {
                    generator: l.generator as usize,
                    starred: l.inverse,
                    factor: factors.len(),
                    position,
                });
            }
            factors.push(Factor {
                term,
                copy: copy as usize,
                conjugate,
                start,
                len: word.len(),
            });
        }
    }

    let mut unstarred = vec![Vec::new(); m];
    let mut starred = vec![Vec::new(); m];
    let mut block_index = vec![0; occurrences.len()];
    for (id, o) in occurrences.iter().enumerate() {
        let block = if o.starred { &mut starred[o.generator] } else { &mut unstarred[o.generator] };
        block_index[id] = block.len();
        block.push(id);
    }

    let mut gamma = vec![0; occurrences.len()];
    for f in &factors {
        for k in 0..f.len {
            gamma[f.start + k] = f.start + (k + 1) % f.len;
        }
    }
    let gamma = Permutation::new(gamma).expect("factor cycles form a permutation");
    (
        SymbolSet {
            occurrences,
            factors,
            unstarred,
            starred,
            block_index,
        },
        GammaPermutation(gamma),
    )
}

/// The mirror involution `Ψ` and the map `I = γ ∘ Ψ` for a spec in
/// `|tr|²` form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMaps {
    pub psi: Permutation,
    pub i_map: Permutation,
}

/// Pairs letter `k` of copy `c` of `w` with letter `len-1-k` of copy `c` of
/// `w⁻¹`, which is the occurrence of that same letter's inverse.
pub fn build_pairing_maps(
    spec: &MomentSpec,
    sym: &SymbolSet,
    gamma: &GammaPermutation,
) -> Result<PairingMaps> {
    if !spec.is_abs_square_form() {
        return Err(Error::Contract(
            "pairing maps need every term in |tr(w)|^{2k} form".into(),
        ));
    }
    let mut psi = vec![usize::MAX; sym.len()];
    for f in sym.factors().iter().filter(|f| !f.conjugate) {
        let mate = sym
            .factors()
            .iter()
            .find(|g| g.conjugate && g.term == f.term && g.copy == f.copy)
            .ok_or_else(|| Error::Contract("symbol set does not match spec".into()))?;
        for k in 0..f.len {
            let a = f.start + k;
            let b = mate.start + (f.len - 1 - k);
            psi[a] = b;
            psi[b] = a;
        }
    }
    let psi = Permutation::new(psi)
        .map_err(|e| Error::Contract(format!("mirror pairing is not a bijection: {e}")))?;
    let i_map = gamma
        .as_permutation()
        .compose(&psi)
        .expect("same symbol set");
    Ok(PairingMaps { psi, i_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(w("a"), Word::from_signed(&[(0, 1)]));
        assert_eq!(w("a b b^-1 a"), Word::from_signed(&[(0, 1), (0, 1)]));
        assert_eq!(w("a^2 b^-1"), Word::from_signed(&[(0, 1), (0, 1), (1, -1)]));
        assert_eq!(w("ab"), Word::from_signed(&[(0, 1), (1, 1)]));
        assert_eq!(w("c^-2"), Word::from_signed(&[(2, -1), (2, -1)]));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(
            parse_word("a^0").unwrap_err(),
            Error::Parse { pos: 2, msg: "zero exponent".into() }
        );
        assert!(matches!(parse_word("a B"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_word("a^"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_word("a^-"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_word("a^01"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_word("  "), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a^^2"), Err(Error::Parse { pos: 2, .. })));
    }

    #[test]
    fn cancelling_input_gives_identity() {
        assert!(w("a a^-1").is_empty());
    }

    #[test]
    fn cyclic_reduction_examples() {
        assert_eq!(w("a b a^-1").cyclically_reduce(), w("b"));
        let comm = w("a b a^-1 b^-1");
        assert_eq!(comm.cyclically_reduce(), comm);
        assert_eq!(w("b^-1 a^2 b").cyclically_reduce(), w("a^2"));
    }

    #[test]
    fn symmetry_count_examples() {
        for p in 1..=3 {
            assert_eq!(Word::from_signed(&vec![(0, 1); p]).symmetry_count().unwrap(), p);
        }
        assert_eq!(w("ab").symmetry_count().unwrap(), 1);
        assert_eq!(w("abab").symmetry_count().unwrap(), 2);
        assert!(Word::default().symmetry_count().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["a", "a^2b^-1", "aba^-1b^-1", "c^-3ab^4"] {
            assert_eq!(w(s).to_string(), s);
            assert_eq!(w(&w(s).to_string()), w(s));
        }
    }

    #[test]
    fn symbol_set_for_square() {
        let spec = MomentSpec::from_words(&[("a^2", 1, 0)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        assert_eq!(sym.len(), 2);
        assert_eq!(sym.unstarred(0), &[0, 1]);
        assert_eq!(gamma.as_permutation().as_slice(), &[1, 0]);
    }

    #[test]
    fn symbol_set_abs_trace() {
        let spec = MomentSpec::from_words(&[("a", 1, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        assert_eq!(sym.len(), 2);
        assert_eq!(sym.unstarred(0), &[0]);
        assert_eq!(sym.starred(0), &[1]);
        assert!(gamma.as_permutation().is_identity());
        assert_eq!(sym.segment_ends(), vec![1, 2]);
    }

    #[test]
    fn symbol_set_ab_conjugate() {
        // Tr(UV) Tr(V*U*): ids 0=u, 1=v, 2=v*, 3=u*
        let spec = MomentSpec::from_words(&[("ab", 1, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        assert_eq!(sym.unstarred(0), &[0]);
        assert_eq!(sym.unstarred(1), &[1]);
        assert_eq!(sym.starred(0), &[3]);
        assert_eq!(sym.starred(1), &[2]);
        assert_eq!(gamma.as_permutation().as_slice(), &[1, 0, 3, 2]);
    }

    #[test]
    fn gamma_has_no_fixed_points_for_long_factors() {
        let spec = MomentSpec::from_words(&[("ab", 2, 1), ("a^2b^-1", 0, 2)]).unwrap();
        let (_, gamma) = build_symbol_set(&spec);
        let g = gamma.as_permutation();
        assert!((0..g.len()).all(|x| g.apply(x) != x));
    }

    #[test]
    fn pairing_maps_examples() {
        let spec = MomentSpec::from_words(&[("a", 1, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        let maps = build_pairing_maps(&spec, &sym, &gamma).unwrap();
        assert_eq!(maps.psi.as_slice(), &[1, 0]);
        assert_eq!(maps.i_map.apply(0), 1);

        let spec = MomentSpec::from_words(&[("a^2", 1, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        let maps = build_pairing_maps(&spec, &sym, &gamma).unwrap();
        assert_eq!(maps.psi.as_slice(), &[3, 2, 1, 0]);
        assert!(maps.psi.compose(&maps.psi).unwrap().is_identity());

        let spec = MomentSpec::from_words(&[("ab", 1, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        let maps = build_pairing_maps(&spec, &sym, &gamma).unwrap();
        assert_eq!(maps.psi.apply(sym.unstarred(0)[0]), sym.starred(0)[0]);
        assert_eq!(maps.psi.apply(sym.unstarred(1)[0]), sym.starred(1)[0]);
    }

    #[test]
    fn pairing_requires_abs_square_form() {
        let spec = MomentSpec::from_words(&[("ab", 2, 1)]).unwrap();
        let (sym, gamma) = build_symbol_set(&spec);
        assert!(matches!(
            build_pairing_maps(&spec, &sym, &gamma),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn spec_merges_and_reduces() {
        let spec = MomentSpec::from_words(&[("aba^-1", 1, 0), ("b", 0, 1), ("a", 1, 1)]).unwrap();
        assert_eq!(spec.terms().len(), 2);
        assert_eq!(spec.terms()[0].word, w("b"));
        assert_eq!((spec.terms()[0].alpha, spec.terms()[0].beta), (1, 1));
        assert_eq!(spec.generator_count(), 2);
        assert!(MomentSpec::from_words(&[("a a^-1 b b^-1", 1, 0)]).is_err());
        assert!(MomentSpec::from_words(&[("a", 0, 0)]).is_err());
    }

    #[test]
    fn enumerated_words_are_cyclically_reduced() {
        let words = cyclically_reduced_words(2, 4);
        assert!(words.iter().all(Word::is_cyclically_reduced));
        // 3^n + 1 + (1 + (-1)^n) cyclically reduced words of length n in F_2
        let lens: Vec<usize> = (1..=4).map(|l| words.iter().filter(|w| w.len() == l).count()).collect();
        assert_eq!(lens, vec![4, 12, 28, 84]);
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0u8..3, any::<bool>()), 0..12)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|(g, i)| Letter::new(g, i))))
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(word in arb_word()) {
            prop_assert!(word.is_reduced());
            prop_assert_eq!(Word::from_letters(word.letters().iter().copied()), word.clone());
            if !word.is_empty() {
                prop_assert_eq!(parse_word(&word.to_string()).unwrap(), word);
            }
        }

        #[test]
        fn rotations_stay_cyclically_reduced(word in arb_word(), k in 0usize..20) {
            let c = word.cyclically_reduce();
            prop_assert!(c.is_cyclically_reduced());
            prop_assert!(c.rotate(k).is_cyclically_reduced());
            prop_assert_eq!(c.rotate(c.len()), c.clone());
        }

        #[test]
        fn symmetry_count_divides_length(word in arb_word()) {
            let c = word.cyclically_reduce();
            prop_assume!(!c.is_empty());
            let j = c.symmetry_count().unwrap();
            prop_assert_eq!(c.len() % j, 0);
            prop_assert_eq!(j, c.inverse().symmetry_count().unwrap());
        }

        #[test]
        fn psi_is_block_swapping_involution(word in arb_word(), k in 1u32..3) {
            let c = word.cyclically_reduce();
            prop_assume!(!c.is_empty());
            let spec = MomentSpec::new([MomentTerm { word: c, alpha: k, beta: k }]).unwrap();
            let (sym, gamma) = build_symbol_set(&spec);
            let maps = build_pairing_maps(&spec, &sym, &gamma).unwrap();
            prop_assert!(maps.psi.compose(&maps.psi).unwrap().is_identity());
            for (id, o) in sym.occurrences().iter().enumerate() {
                let mate = sym.occurrences()[maps.psi.apply(id)];
                prop_assert_eq!(mate.generator, o.generator);
                prop_assert_ne!(mate.starred, o.starred);
                prop_assert_eq!(maps.i_map.apply(id), gamma.apply(maps.psi.apply(id)));
            }
        }
    }
}

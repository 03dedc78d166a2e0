//! Permutations in one-line form, cycle types, and central elements of the
//! symmetric group algebra with exact rational coefficients.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// A bijection of `{0, .., k-1}`; slot `i` holds the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let k = mapping.len();
        let mut seen = vec![false; k];
        for &x in &mapping {
            if x >= k {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range for {k} points"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("image {x} repeated")));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            mapping: (0..k).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..k).collect();
        let mut touched = vec![false; k];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= k || std::mem::replace(&mut touched[x], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle point {x} is out of range or repeated"
                    )));
                }
                mapping[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Self { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.mapping.iter().enumerate() {
            inv[x] = i;
        }
        Self { mapping: inv }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            mapping: other.mapping.iter().map(|&x| self.mapping[x]).collect(),
        })
    }

    /// Orbits of the permutation, each listed starting from its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.mapping[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        count_cycles(&self.mapping)
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_slice_perm(&self.mapping)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mapping.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// Number of cycles of a permutation given in one-line form.
pub fn count_cycles(mapping: &[usize]) -> usize {
    let mut seen = vec![false; mapping.len()];
    let mut count = 0;
    for start in 0..mapping.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = mapping[x];
        }
    }
    count
}

/// Cycle lengths sorted in weakly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain("cycle type parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    fn from_slice_perm(mapping: &[usize]) -> Self {
        let mut seen = vec![false; mapping.len()];
        let mut parts = Vec::new();
        for start in 0..mapping.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = mapping[x];
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn part_count(&self) -> usize {
        self.0.len()
    }

    /// Number of permutations of this cycle type: `n! / Π k^{m_k} m_k!`.
    pub fn class_size(&self) -> u128 {
        let mut size = factorial(self.degree());
        let mut i = 0;
        while i < self.0.len() {
            let k = self.0[i];
            let mut m = 0;
            while i < self.0.len() && self.0[i] == k {
                m += 1;
                i += 1;
            }
            size /= (k as u128).pow(m as u32) * factorial(m);
        }
        size
    }

    /// A representative permutation: consecutive blocks cycled in order.
    pub fn representative(&self) -> Permutation {
        let n = self.degree();
        let mut mapping = vec![0; n];
        let mut start = 0;
        for &len in &self.0 {
            for j in 0..len {
                mapping[start + j] = start + (j + 1) % len;
            }
            start += len;
        }
        Permutation { mapping }
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of `n`, ascending in lexicographic order of their
/// descending part lists (so `[1,..,1]` comes first and `[n]` last).
pub fn partitions(n: usize) -> Vec<CycleType> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(CycleType(cur.clone()));
            return;
        }
        for part in 1..=rest.min(max) {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Lexicographic successor of a one-line permutation; false at the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Iterator over `S_k` in lexicographic order of the one-line form.
pub struct SymmetricGroupIter {
    current: Option<Vec<usize>>,
}

impl Iterator for SymmetricGroupIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.as_mut()?;
        let out = Permutation {
            mapping: cur.clone(),
        };
        if !next_permutation(cur) {
            self.current = None;
        }
        Some(out)
    }
}

pub fn enumerate_symmetric_group(k: usize) -> SymmetricGroupIter {
    SymmetricGroupIter {
        current: Some((0..k).collect()),
    }
}

/// The conjugacy classes of `S_n`, with a fast lookup from a one-line
/// permutation to its class index.
#[derive(Debug, Clone)]
pub struct ClassBasis {
    n: usize,
    classes: Vec<CycleType>,
    index: HashMap<u128, usize>,
}

impl ClassBasis {
    pub fn new(n: usize) -> Self {
        let classes = partitions(n);
        let index = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (Self::code(n, c.parts().iter().copied()), i))
            .collect();
        Self { n, classes, index }
    }

    // Multiplicity vector of cycle lengths packed in base n+1.
    fn code(n: usize, parts: impl Iterator<Item = usize>) -> u128 {
        let base = n as u128 + 1;
        parts.fold(0u128, |acc, len| acc + base.pow(len as u32 - 1))
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[CycleType] {
        &self.classes
    }

    pub fn index_of(&self, ct: &CycleType) -> Option<usize> {
        if ct.degree() != self.n {
            return None;
        }
        self.index
            .get(&Self::code(self.n, ct.parts().iter().copied()))
            .copied()
    }

    /// Class index of a permutation in one-line form. `seen` is scratch space
    /// of the same length.
    #[inline]
    pub fn class_of_slice(&self, mapping: &[usize], seen: &mut [bool]) -> usize {
        debug_assert_eq!(mapping.len(), self.n);
        seen.iter_mut().for_each(|s| *s = false);
        let base = self.n as u128 + 1;
        let mut code = 0u128;
        for start in 0..mapping.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u32;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = mapping[x];
                len += 1;
            }
            code += base.pow(len - 1);
        }
        self.index[&code]
    }

    pub fn class_of(&self, p: &Permutation) -> usize {
        let mut seen = vec![false; p.len()];
        self.class_of_slice(p.as_slice(), &mut seen)
    }
}

/// An element of the group algebra `Q[S_n]` that is constant on conjugacy
/// classes, stored as one coefficient per class of [`ClassBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct CentralElement {
    n: usize,
    coeffs: Vec<ExactRational>,
}

impl CentralElement {
    /// Coefficients are given in the order of [`partitions`].
    pub fn new(n: usize, coeffs: Vec<ExactRational>) -> Result<Self> {
        let expected = partitions(n).len();
        if coeffs.len() != expected {
            return Err(Error::SizeMismatch {
                left: coeffs.len(),
                right: expected,
            });
        }
        Ok(Self { n, coeffs })
    }

    pub fn identity(n: usize) -> Self {
        let mut coeffs = vec![ExactRational::zero(); partitions(n).len()];
        coeffs[0] = ExactRational::one();
        Self { n, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, ct: &CycleType) -> Option<&ExactRational> {
        let idx = partitions(self.n).iter().position(|c| c == ct)?;
        Some(&self.coeffs[idx])
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Product in the group algebra, evaluated by brute force over `S_n` at
    /// one representative per class (the product of central elements is
    /// central).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let basis = ClassBasis::new(self.n);
        let mut out = Vec::with_capacity(basis.len());
        let mut seen = vec![false; self.n];
        for ct in basis.classes() {
            let tau = ct.representative();
            let mut acc = ExactRational::zero();
            for sigma in enumerate_symmetric_group(self.n) {
                // (XY)(τ) = Σ_σ X(σ) Y(σ⁻¹τ)
                let rest = sigma.inverse().compose(&tau)?;
                let a = &self.coeffs[basis.class_of_slice(sigma.as_slice(), &mut seen)];
                let b = &other.coeffs[basis.class_of_slice(rest.as_slice(), &mut seen)];
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            out.push(acc);
        }
        Ok(Self {
            n: self.n,
            coeffs: out,
        })
    }
}

//! Exact Haar moments of trace-word products.
//!
//! Two independent evaluations are provided:
//!
//! * [`exact_moment`] enumerates, per generator, all pairs `(σ, θ)` of
//!   bijections from the starred block onto the unstarred block, builds the
//!   index relation `R` with a union-find, and sums
//!   `Π_g W_g(σ_g θ_g⁻¹) · N^{#R}`.
//! * [`exact_abs_square_moment`] handles products of `|tr(w)|^{2k}` through
//!   the mirror pairing `Ψ`: it enumerates block-preserving permutations `π`,
//!   counts cycles of `I ∘ π` with `I = γ ∘ Ψ`, and weights by
//!   `Π_g W_g(σ_g Ψ⁻¹ θ_g Ψ)`.
//!
//! [`entry_monomial_oracle`] expands every trace into explicit index sums and
//! integrates each monomial with [`entry_integral_with`]; it is only usable
//! for tiny sizes and exists to check the other two.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{enumerate_symmetric_group, factorial, ClassBasis};
use crate::rational::{self, ExactRational, RationalJson};
use crate::weingarten::{cached_table, entry_integral_with, SingularPolicy, WeingartenTable};
use crate::words::{build_pairing_maps, build_symbol_set, MomentSpec, SymbolSet};

pub const DEFAULT_GUARD: u128 = 1_000_000_000;

const ORACLE_ASSIGNMENT_LIMIT: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentOptions {
    /// Largest number of permutation tuples the engine will enumerate.
    pub guard: u128,
    pub singular: SingularPolicy,
    pub order: EnumerationOrder,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_GUARD,
            singular: SingularPolicy::Reject,
            order: EnumerationOrder::Forward,
        }
    }
}

impl MomentOptions {
    pub fn with_guard(mut self, guard: u128) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_singular(mut self, singular: SingularPolicy) -> Self {
        self.singular = singular;
        self
    }

    pub fn with_order(mut self, order: EnumerationOrder) -> Self {
        self.order = order;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoment {
    pub value: ExactRational,
    /// Per generator: number of unstarred occurrences.
    pub unstarred_counts: Vec<usize>,
    /// Per generator: number of starred occurrences.
    pub starred_counts: Vec<usize>,
    pub dim: u64,
    pub tuples: u128,
    /// Tuples whose relation had a singleton class (or `I∘π` a fixed point).
    pub singleton_violations: u64,
    /// Largest class count seen over all tuples.
    pub max_classes: usize,
}

impl ExactMoment {
    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.value)
    }

    pub fn to_json(&self, spec: &str, elapsed_ms: u128) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            spec: &'a str,
            #[serde(rename = "N")]
            dim: u64,
            exact: RationalJson,
            float: f64,
            tuples: u64,
            elapsed_ms: u128,
        }
        serde_json::to_value(Out {
            spec,
            dim: self.dim,
            exact: RationalJson::from(&self.value),
            float: self.to_f64(),
            tuples: u64::try_from(self.tuples).unwrap_or(u64::MAX),
            elapsed_ms,
        })
        .expect("plain struct serialises")
    }
}

/// Every generator has as many starred as unstarred occurrences.
pub fn check_balance(sym: &SymbolSet) -> bool {
    (0..sym.generator_count()).all(|g| sym.unstarred(g).len() == sym.starred(g).len())
}

fn counts(sym: &SymbolSet) -> (Vec<usize>, Vec<usize>) {
    let m = sym.generator_count();
    (
        (0..m).map(|g| sym.unstarred(g).len()).collect(),
        (0..m).map(|g| sym.starred(g).len()).collect(),
    )
}

/// One generator that actually occurs in the spec.
struct Block {
    unstarred: Vec<usize>,
    starred: Vec<usize>,
    perms: Arc<Vec<Vec<usize>>>,
    basis: ClassBasis,
    table: Arc<WeingartenTable>,
}

impl Block {
    fn degree(&self) -> usize {
        self.unstarred.len()
    }
}

fn symmetric_group_list(n: usize, order: EnumerationOrder) -> Arc<Vec<Vec<usize>>> {
    let mut v: Vec<Vec<usize>> = enumerate_symmetric_group(n)
        .map(|p| p.as_slice().to_vec())
        .collect();
    if order == EnumerationOrder::Reverse {
        v.reverse();
    }
    Arc::new(v)
}

fn tuple_count(degrees: impl Iterator<Item = usize>) -> u128 {
    degrees.fold(1u128, |acc, n| {
        let f = factorial(n);
        acc.saturating_mul(f).saturating_mul(f)
    })
}

fn prepare_blocks(
    sym: &SymbolSet,
    dim: u64,
    opts: &MomentOptions,
) -> Result<(Vec<Block>, u128)> {
    let active: Vec<usize> = (0..sym.generator_count())
        .filter(|&g| !sym.unstarred(g).is_empty())
        .collect();
    let tuples = tuple_count(active.iter().map(|&g| sym.unstarred(g).len()));
    if tuples > opts.guard {
        return Err(Error::GuardExceeded {
            tuples,
            guard: opts.guard,
        });
    }
    let blocks = active
        .into_iter()
        .map(|g| {
            let n = sym.unstarred(g).len();
            Ok(Block {
                unstarred: sym.unstarred(g).to_vec(),
                starred: sym.starred(g).to_vec(),
                perms: symmetric_group_list(n, opts.order),
                basis: ClassBasis::new(n),
                table: cached_table(n, dim, opts.singular)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((blocks, tuples))
}

/// Evaluates one tuple of per-block permutations: writes each block's
/// Weingarten class and returns `(class count, had a singleton)`.
trait Kernel {
    fn eval(&mut self, choice: &[&[usize]], classes: &mut [usize]) -> (usize, bool);
}

#[derive(Default, Clone)]
struct Histogram {
    counts: Vec<u64>,
    singletons: u64,
    max_classes: usize,
}

impl Histogram {
    fn merge(mut self, other: Self) -> Self {
        if self.counts.is_empty() {
            return other;
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.singletons += other.singletons;
        self.max_classes = self.max_classes.max(other.max_classes);
        self
    }
}

/// Histogram index: block classes in mixed radix, then the class count.
fn key(blocks: &[Block], classes: &[usize], r: usize, points: usize) -> usize {
    let mut k = 0;
    for (b, &c) in blocks.iter().zip(classes) {
        k = k * b.basis.len() + c;
    }
    k * (points + 1) + r
}

fn run_enumeration<K, F>(blocks: &[Block], points: usize, make_kernel: F) -> Histogram
where
    K: Kernel + Send,
    F: Fn() -> K + Sync,
{
    let hist_len = blocks.iter().map(|b| b.basis.len()).product::<usize>() * (points + 1);
    // Slot 2b is σ of block b, slot 2b+1 is θ.
    let radices: Vec<usize> = blocks
        .iter()
        .flat_map(|b| [b.perms.len(), b.perms.len()])
        .collect();
    let slots = radices.len();
    let first = radices[0] * radices[1];

    (0..first)
        .into_par_iter()
        .fold(
            || {
                (
                    make_kernel(),
                    Histogram {
                        counts: vec![0; hist_len],
                        ..Default::default()
                    },
                    vec![0usize; slots],
                    vec![0usize; blocks.len()],
                )
            },
            |(mut kernel, mut hist, mut idx, mut classes), outer| {
                idx.iter_mut().for_each(|i| *i = 0);
                idx[0] = outer / radices[1];
                idx[1] = outer % radices[1];
                let mut choice: Vec<&[usize]> = Vec::with_capacity(slots);
                loop {
                    choice.clear();
                    choice.extend(
                        idx.iter()
                            .enumerate()
                            .map(|(s, &i)| blocks[s / 2].perms[i].as_slice()),
                    );
                    let (r, singleton) = kernel.eval(&choice, &mut classes);
                    hist.counts[key(blocks, &classes, r, points)] += 1;
                    hist.singletons += u64::from(singleton);
                    hist.max_classes = hist.max_classes.max(r);

                    // odometer over slots 2..
                    let mut s = slots;
                    loop {
                        if s == 2 {
                            return (kernel, hist, idx, classes);
                        }
                        s -= 1;
                        idx[s] += 1;
                        if idx[s] < radices[s] {
                            break;
                        }
                        idx[s] = 0;
                    }
                }
            },
        )
        .map(|(_, hist, _, _)| hist)
        .reduce(Histogram::default, Histogram::merge)
}

fn resolve(blocks: &[Block], hist: &Histogram, points: usize, dim: u64) -> ExactRational {
    let powers: Vec<ExactRational> = (0..=points).map(|k| rational::pow_u64(dim, k)).collect();
    let mut total = ExactRational::zero();
    let mut classes = vec![0usize; blocks.len()];
    for (k, &count) in hist.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let r = k % (points + 1);
        let mut rest = k / (points + 1);
        for (b, slot) in blocks.iter().zip(classes.iter_mut()).rev() {
            *slot = rest % b.basis.len();
            rest /= b.basis.len();
        }
        let mut term = powers[r].clone() * ExactRational::from_integer(BigInt::from(count));
        for (b, &c) in blocks.iter().zip(&classes) {
            term *= &b.table.values()[c];
        }
        total += term;
    }
    total
}

/// Union-find over occurrence ids, reset in O(1) by bumping an epoch.
struct EpochUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    unions: usize,
}

impl EpochUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: vec![0; n],
            size: vec![1; n],
            stamp: vec![0; n],
            epoch: 0,
            unions: 0,
        }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = u32::MAX);
            self.epoch = 1;
        }
        self.unions = 0;
    }

    #[inline]
    fn touch(&mut self, x: usize) {
        if self.stamp[x] != self.epoch {
            self.stamp[x] = self.epoch;
            self.parent[x] = x;
            self.size[x] = 1;
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        self.touch(x);
        while self.parent[x] != x {
            let p = self.parent[x];
            self.touch(p);
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.unions += 1;
    }

    fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

struct RelationKernel<'a> {
    blocks: &'a [Block],
    gamma: &'a [usize],
    uf: EpochUnionFind,
    inv: Vec<usize>,
    prod: Vec<usize>,
    seen: Vec<bool>,
}

impl Kernel for RelationKernel<'_> {
    fn eval(&mut self, choice: &[&[usize]], classes: &mut [usize]) -> (usize, bool) {
        self.uf.reset();
        for (b, block) in self.blocks.iter().enumerate() {
            let sigma = choice[2 * b];
            let theta = choice[2 * b + 1];
            let n = block.degree();
            for k in 0..n {
                let y = block.starred[k];
                // a_y = a_{γ(θ(y))} and a_{γ(y)} = a_{σ(y)}
                self.uf.union(y, self.gamma[block.unstarred[theta[k]]]);
                self.uf.union(self.gamma[y], block.unstarred[sigma[k]]);
            }
            for k in 0..n {
                self.inv[theta[k]] = k;
            }
            for k in 0..n {
                self.prod[k] = sigma[self.inv[k]];
            }
            classes[b] = block.basis.class_of_slice(&self.prod[..n], &mut self.seen[..n]);
        }
        let points = self.gamma.len();
        let singleton = (0..points).any(|x| self.uf.class_size(x) == 1);
        (points - self.uf.unions, singleton)
    }
}

struct PairingKernel<'a> {
    blocks: &'a [Block],
    i_map: &'a [usize],
    // per block: starred index of Ψ(unstarred k), unstarred index of Ψ(starred k)
    psi_fwd: Vec<Vec<usize>>,
    psi_back: Vec<Vec<usize>>,
    pi: Vec<usize>,
    seen: Vec<bool>,
    prod: Vec<usize>,
    class_seen: Vec<bool>,
}

impl Kernel for PairingKernel<'_> {
    fn eval(&mut self, choice: &[&[usize]], classes: &mut [usize]) -> (usize, bool) {
        for (b, block) in self.blocks.iter().enumerate() {
            let sigma = choice[2 * b];
            let theta = choice[2 * b + 1];
            let n = block.degree();
            for k in 0..n {
                self.pi[block.unstarred[k]] = block.unstarred[sigma[k]];
                self.pi[block.starred[k]] = block.starred[theta[k]];
            }
            let (fwd, back) = (&self.psi_fwd[b], &self.psi_back[b]);
            for k in 0..n {
                self.prod[k] = sigma[back[theta[fwd[k]]]];
            }
            classes[b] = block
                .basis
                .class_of_slice(&self.prod[..n], &mut self.class_seen[..n]);
        }
        self.seen.iter_mut().for_each(|s| *s = false);
        let mut cycles = 0;
        let mut fixed = false;
        for start in 0..self.pi.len() {
            if self.seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            let mut len = 0;
            while !self.seen[x] {
                self.seen[x] = true;
                x = self.i_map[self.pi[x]];
                len += 1;
            }
            fixed |= len == 1;
        }
        (cycles, fixed)
    }
}

fn max_degree(blocks: &[Block]) -> usize {
    blocks.iter().map(Block::degree).max().unwrap_or(0)
}

/// `E[Π tr(w_i)^{α_i} conj(tr(w_i))^{β_i}]` over independent Haar unitaries
/// in `U(N)`, one per generator.
pub fn exact_moment(spec: &MomentSpec, dim: u64, opts: &MomentOptions) -> Result<ExactMoment> {
    if dim == 0 {
        return Err(Error::Domain("matrix dimension N must be at least 1".into()));
    }
    let (sym, gamma) = build_symbol_set(spec);
    let (unstarred_counts, starred_counts) = counts(&sym);
    let mut out = ExactMoment {
        value: ExactRational::zero(),
        unstarred_counts,
        starred_counts,
        dim,
        tuples: 0,
        singleton_violations: 0,
        max_classes: 0,
    };
    if !check_balance(&sym) {
        return Ok(out);
    }
    let (blocks, tuples) = prepare_blocks(&sym, dim, opts)?;
    let points = sym.len();
    let gamma: Vec<usize> = gamma.as_permutation().as_slice().to_vec();
    let width = max_degree(&blocks);
    let hist = run_enumeration(&blocks, points, || RelationKernel {
        blocks: &blocks,
        gamma: &gamma,
        uf: EpochUnionFind::new(points),
        inv: vec![0; width],
        prod: vec![0; width],
        seen: vec![false; width],
    });
    out.value = resolve(&blocks, &hist, points, dim);
    out.tuples = tuples;
    out.singleton_violations = hist.singletons;
    out.max_classes = hist.max_classes;
    Ok(out)
}

/// The same moment for a spec in `|tr(w)|^{2k}` form, evaluated through the
/// mirror pairing instead of the index relation.
pub fn exact_abs_square_moment(
    spec: &MomentSpec,
    dim: u64,
    opts: &MomentOptions,
) -> Result<ExactMoment> {
    if dim == 0 {
        return Err(Error::Domain("matrix dimension N must be at least 1".into()));
    }
    let (sym, gamma) = build_symbol_set(spec);
    let maps = build_pairing_maps(spec, &sym, &gamma)?;
    let (unstarred_counts, starred_counts) = counts(&sym);
    let (blocks, tuples) = prepare_blocks(&sym, dim, opts)?;
    let points = sym.len();

    let psi_fwd = blocks
        .iter()
        .map(|b| b.unstarred.iter().map(|&x| sym.block_index(maps.psi.apply(x))).collect())
        .collect();
    let psi_back = blocks
        .iter()
        .map(|b| b.starred.iter().map(|&y| sym.block_index(maps.psi.apply(y))).collect())
        .collect();
    let i_map: Vec<usize> = maps.i_map.as_slice().to_vec();
    let width = max_degree(&blocks);
    let hist = run_enumeration(&blocks, points, || PairingKernel {
        blocks: &blocks,
        i_map: &i_map,
        psi_fwd: Vec::clone(&psi_fwd),
        psi_back: Vec::clone(&psi_back),
        pi: vec![0; points],
        seen: vec![false; points],
        prod: vec![0; width],
        class_seen: vec![false; width],
    });
    Ok(ExactMoment {
        value: resolve(&blocks, &hist, points, dim),
        unstarred_counts,
        starred_counts,
        dim,
        tuples,
        singleton_violations: hist.singletons,
        max_classes: hist.max_classes,
    })
}

/// Brute-force expansion: sums [`entry_integral_with`] products over every
/// index assignment. Cost is `N^{letters}` entry integrals.
pub fn entry_monomial_oracle(
    spec: &MomentSpec,
    dim: u64,
    policy: SingularPolicy,
) -> Result<ExactRational> {
    if dim == 0 {
        return Err(Error::Domain("matrix dimension N must be at least 1".into()));
    }
    let (sym, gamma) = build_symbol_set(spec);
    // Unequal starred/unstarred counts: the integrand picks up a net phase
    // under U -> e^{it} U, so the integral is zero.
    if !check_balance(&sym) {
        return Ok(ExactRational::zero());
    }
    let points = sym.len();
    let assignments = (dim as u128).checked_pow(points as u32).unwrap_or(u128::MAX);
    if assignments > ORACLE_ASSIGNMENT_LIMIT {
        return Err(Error::GuardExceeded {
            tuples: assignments,
            guard: ORACLE_ASSIGNMENT_LIMIT,
        });
    }
    let gens: Vec<usize> = (0..sym.generator_count())
        .filter(|&g| !sym.unstarred(g).is_empty())
        .collect();
    let mut a = vec![1u64; points];
    let mut total = ExactRational::zero();
    let (mut rows, mut cols, mut srows, mut scols) = (vec![], vec![], vec![], vec![]);
    loop {
        let mut product: Option<ExactRational> = None;
        for &g in &gens {
            rows.clear();
            cols.clear();
            srows.clear();
            scols.clear();
            // u_{a_x a_γ(x)} for unstarred x; (U*)_{a_y a_γ(y)} for starred y
            for &x in sym.unstarred(g) {
                rows.push(a[x]);
                cols.push(a[gamma.apply(x)]);
            }
            for &y in sym.starred(g) {
                srows.push(a[y]);
                scols.push(a[gamma.apply(y)]);
            }
            let v = entry_integral_with(&rows, &cols, &srows, &scols, dim, policy)?;
            if v.is_zero() {
                product = Some(v);
                break;
            }
            product = Some(match product {
                Some(p) => p * v,
                None => v,
            });
        }
        if let Some(p) = product {
            total += p;
        }
        // odometer over assignments
        let mut i = 0;
        loop {
            if i == points {
                return Ok(total);
            }
            a[i] += 1;
            if a[i] <= dim {
                break;
            }
            a[i] = 1;
            i += 1;
        }
    }
}

/// Wall-clock wrapper used by the CLI.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}

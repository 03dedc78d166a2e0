//! The Gram element `Φ^N = Σ_σ N^{#σ} σ`, its exact inverse (the Weingarten
//! function), and the unitary entry-integral formula.
//!
//! Everything is computed in the conjugacy-class basis of `S_n`: both `Φ^N`
//! and its inverse are central, so a table has one value per partition of
//! `n`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{count_cycles, enumerate_symmetric_group, CentralElement, ClassBasis, CycleType};
use crate::rational::{self, ExactRational, Matrix, RationalJson};

/// What to do when `Φ^N` is not invertible (which happens exactly when `N < n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SingularPolicy {
    /// Report [`Error::Singular`].
    #[default]
    Reject,
    /// Fall back to the group (pseudo-)inverse of `Φ^N` inside the centre of
    /// the group algebra. The entry-integral formula remains valid with it.
    PseudoInverse,
}

pub fn build_phi(n: usize, dim: u64) -> Result<CentralElement> {
    check_dim(dim)?;
    let coeffs = ClassBasis::new(n)
        .classes()
        .iter()
        .map(|ct| rational::pow_u64(dim, ct.part_count()))
        .collect();
    CentralElement::new(n, coeffs)
}

fn check_dim(dim: u64) -> Result<()> {
    if dim == 0 {
        return Err(Error::Domain("matrix dimension N must be at least 1".into()));
    }
    Ok(())
}

/// Convolution by `Φ^N` restricted to class functions.
///
/// `entries[e][c] = Σ_{σ ∈ C_c} N^{#(σ⁻¹ τ_e)}` where `τ_e` represents class
/// `e`; applied to the class values of a central `X` it gives the class
/// values of `Φ^N X`. This is the full `n! × n!` matrix `N^{#(σ⁻¹μ)}`
/// folded onto classes.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub n: usize,
    pub dim: u64,
    pub classes: Vec<CycleType>,
    pub class_sizes: Vec<u128>,
    pub entries: Matrix,
}

impl GramMatrix {
    pub fn new(n: usize, dim: u64) -> Result<Self> {
        check_dim(dim)?;
        let basis = ClassBasis::new(n);
        let p = basis.len();
        // counts[e][c][k]: number of σ in class c with #(σ⁻¹τ_e) = k
        let mut counts = vec![vec![vec![0u64; n + 1]; p]; p];
        let mut seen = vec![false; n];
        let mut scratch = vec![0usize; n];
        for (e, ct) in basis.classes().iter().enumerate() {
            let tau = ct.representative();
            for sigma in enumerate_symmetric_group(n) {
                let c = basis.class_of_slice(sigma.as_slice(), &mut seen);
                let inv = sigma.inverse();
                for (i, slot) in scratch.iter_mut().enumerate() {
                    *slot = inv.apply(tau.apply(i));
                }
                counts[e][c][count_cycles(&scratch)] += 1;
            }
        }
        let powers: Vec<ExactRational> = (0..=n).map(|k| rational::pow_u64(dim, k)).collect();
        let entries = counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|by_k| {
                        by_k.iter()
                            .zip(&powers)
                            .filter(|(&cnt, _)| cnt > 0)
                            .fold(ExactRational::zero(), |acc, (&cnt, pw)| {
                                acc + pw * rational::int(cnt as i64)
                            })
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            dim,
            class_sizes: basis.classes().iter().map(CycleType::class_size).collect(),
            classes: basis.classes().to_vec(),
            entries,
        })
    }
}

/// `W^N_σ` for every cycle type of `S_n` at a fixed dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenTable {
    n: usize,
    dim: u64,
    classes: Vec<CycleType>,
    values: Vec<ExactRational>,
    pseudo: bool,
}

impl WeingartenTable {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// True when the table came from the pseudo-inverse fallback.
    pub fn is_pseudo_inverse(&self) -> bool {
        self.pseudo
    }

    pub fn classes(&self) -> &[CycleType] {
        &self.classes
    }

    /// Values in the order of [`crate::perm::partitions`].
    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    pub fn value(&self, ct: &CycleType) -> Option<&ExactRational> {
        self.classes.iter().position(|c| c == ct).map(|i| &self.values[i])
    }

    pub fn as_central(&self) -> CentralElement {
        CentralElement::new(self.n, self.values.clone()).expect("table matches class basis")
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row<'a> {
            cycle_type: &'a [usize],
            num: String,
            den: String,
        }
        let rows: Vec<Row<'_>> = self
            .classes
            .iter()
            .zip(&self.values)
            .map(|(ct, v)| {
                let RationalJson { num, den } = RationalJson::from(v);
                Row {
                    cycle_type: ct.parts(),
                    num,
                    den,
                }
            })
            .collect();
        let mut obj = serde_json::json!({ "n": self.n, "N": self.dim, "values": rows });
        if self.pseudo {
            obj["pseudo_inverse"] = serde_json::Value::Bool(true);
        }
        obj
    }
}

/// Exact inverse of `Φ^N` in the class basis; errors when singular.
pub fn weingarten_table(n: usize, dim: u64) -> Result<WeingartenTable> {
    weingarten_table_with(n, dim, SingularPolicy::Reject)
}

pub fn weingarten_table_with(
    n: usize,
    dim: u64,
    policy: SingularPolicy,
) -> Result<WeingartenTable> {
    let gram = GramMatrix::new(n, dim)?;
    let p = gram.classes.len();
    let mut delta = vec![ExactRational::zero(); p];
    delta[0] = ExactRational::one();

    if let Some(values) = rational::solve_unique(&gram.entries, &delta) {
        return Ok(WeingartenTable {
            n,
            dim,
            classes: gram.classes,
            values,
            pseudo: false,
        });
    }
    if policy == SingularPolicy::Reject {
        return Err(Error::Singular { n, dim });
    }

    // The class-basis operator L is diagonalisable (the centre is
    // semisimple), so its group inverse applied to δ is L·y for any y with
    // L³ y = L δ.
    let l = &gram.entries;
    let l3 = rational::mat_mul(&rational::mat_mul(l, l), l);
    let rhs = rational::mat_vec(l, &delta);
    let y = rational::solve_consistent(&l3, &rhs)
        .ok_or_else(|| Error::Contract("pseudo-inverse system inconsistent".into()))?;
    Ok(WeingartenTable {
        n,
        dim,
        classes: gram.classes,
        values: rational::mat_vec(l, &y),
        pseudo: true,
    })
}

type CacheKey = (usize, u64, SingularPolicy);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<WeingartenTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<WeingartenTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoised [`weingarten_table_with`]; safe to call from many threads.
pub fn cached_table(n: usize, dim: u64, policy: SingularPolicy) -> Result<Arc<WeingartenTable>> {
    let key = (n, dim, policy);
    if let Some(t) = cache().read().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(weingarten_table_with(n, dim, policy)?);
    let mut guard = cache().write().expect("cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(table)))
}

/// `∫ u_{i₁r₁}⋯u_{iₙrₙ} u*_{s₁j₁}⋯u*_{sₙjₙ} dU` over Haar `U(N)`, with
/// `u*_{sj} = conj(u_{js})` and indices counted from 1.
///
/// Equal to the sum of `W^N_{σθ⁻¹}` over all `σ` with `j_a = i_{σ(a)}` and
/// all `θ` with `s_b = r_{θ(b)}`.
pub fn entry_integral(
    rows: &[u64],
    cols: &[u64],
    star_rows: &[u64],
    star_cols: &[u64],
    dim: u64,
) -> Result<ExactRational> {
    entry_integral_with(rows, cols, star_rows, star_cols, dim, SingularPolicy::Reject)
}

pub fn entry_integral_with(
    rows: &[u64],
    cols: &[u64],
    star_rows: &[u64],
    star_cols: &[u64],
    dim: u64,
    policy: SingularPolicy,
) -> Result<ExactRational> {
    check_dim(dim)?;
    let n = rows.len();
    for other in [cols.len(), star_rows.len(), star_cols.len()] {
        if other != n {
            return Err(Error::SizeMismatch { left: n, right: other });
        }
    }
    if let Some(&bad) = [rows, cols, star_rows, star_cols]
        .iter()
        .flat_map(|l| l.iter())
        .find(|&&i| i == 0 || i > dim)
    {
        return Err(Error::Domain(format!("index {bad} outside 1..={dim}")));
    }
    if n == 0 {
        return Ok(ExactRational::one());
    }
    let table = cached_table(n, dim, policy)?;

    let sigmas: Vec<_> = enumerate_symmetric_group(n)
        .filter(|s| (0..n).all(|a| star_cols[a] == rows[s.apply(a)]))
        .collect();
    if sigmas.is_empty() {
        return Ok(ExactRational::zero());
    }
    let thetas: Vec<_> = enumerate_symmetric_group(n)
        .filter(|t| (0..n).all(|b| star_rows[b] == cols[t.apply(b)]))
        .collect();

    let basis = ClassBasis::new(n);
    let mut seen = vec![false; n];
    let mut counts = vec![0u64; basis.len()];
    for theta in &thetas {
        let inv = theta.inverse();
        for sigma in &sigmas {
            let q = sigma.compose(&inv)?;
            counts[basis.class_of_slice(q.as_slice(), &mut seen)] += 1;
        }
    }
    Ok(counts
        .iter()
        .zip(table.values())
        .filter(|(&c, _)| c > 0)
        .fold(ExactRational::zero(), |acc, (&c, w)| {
            acc + w * rational::int(c as i64)
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn phi_coefficients() {
        assert_eq!(build_phi(1, 5).unwrap().coeffs(), &[int(5)]);
        assert_eq!(build_phi(2, 3).unwrap().coeffs(), &[int(9), int(3)]);
        assert_eq!(build_phi(3, 2).unwrap().coeffs(), &[int(8), int(4), int(2)]);
    }

    #[test]
    fn degree_one_is_reciprocal() {
        for dim in 1..6 {
            assert_eq!(weingarten_table(1, dim).unwrap().values(), &[ratio(1, dim as i64)]);
        }
    }

    #[test]
    fn degree_two_at_three() {
        let t = weingarten_table(2, 3).unwrap();
        assert_eq!(t.values(), &[ratio(1, 8), ratio(-1, 24)]);
    }

    #[test]
    fn degree_three_known_values() {
        // W[1,1,1] = (N²-2)/(N(N²-1)(N²-4)), W[2,1] = -1/((N²-1)(N²-4)),
        // W[3] = 2/(N(N²-1)(N²-4)); at N = 4 these are 7/360, -1/180, 1/360.
        let t = weingarten_table(3, 4).unwrap();
        assert_eq!(t.values(), &[ratio(7, 360), ratio(-1, 180), ratio(1, 360)]);
    }

    #[test]
    fn singular_below_degree() {
        assert_eq!(weingarten_table(3, 2).unwrap_err(), Error::Singular { n: 3, dim: 2 });
        assert!(weingarten_table(2, 2).is_ok());
        assert!(matches!(weingarten_table(2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn pseudo_inverse_is_group_inverse() {
        for (n, dim) in [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3), (5, 3)] {
            let t = weingarten_table_with(n, dim, SingularPolicy::PseudoInverse).unwrap();
            assert!(t.is_pseudo_inverse());
            let w = t.as_central();
            let phi = build_phi(n, dim).unwrap();
            let wpw = w.convolve(&phi).unwrap().convolve(&w).unwrap();
            let pwp = phi.convolve(&w).unwrap().convolve(&phi).unwrap();
            assert_eq!(wpw, w, "W Φ W = W at n={n}, N={dim}");
            assert_eq!(pwp, phi, "Φ W Φ = Φ at n={n}, N={dim}");
        }
    }

    #[test]
    fn pseudo_policy_matches_exact_when_invertible() {
        let a = weingarten_table(4, 5).unwrap();
        let b = weingarten_table_with(4, 5, SingularPolicy::PseudoInverse).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gram_rows_sum_to_phi_total() {
        // every row of the class system sums Φ over the whole group
        let g = GramMatrix::new(3, 2).unwrap();
        for row in &g.entries {
            let total = row.iter().fold(ExactRational::zero(), |a, b| a + b);
            assert_eq!(total, int(2 * 3 * 4));
        }
        assert_eq!(g.class_sizes, vec![1, 3, 2]);
    }

    #[test]
    fn entry_integral_examples() {
        assert_eq!(entry_integral(&[1], &[1], &[2], &[1], 3).unwrap(), int(0));
        assert_eq!(entry_integral(&[1], &[1], &[1], &[1], 4).unwrap(), ratio(1, 4));
        assert_eq!(
            entry_integral(&[1, 1], &[1, 1], &[1, 1], &[1, 1], 2).unwrap(),
            ratio(1, 3)
        );
        assert_eq!(entry_integral(&[], &[], &[], &[], 3).unwrap(), int(1));
    }

    #[test]
    fn entry_integral_errors() {
        assert!(matches!(
            entry_integral(&[4], &[1], &[1], &[1], 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            entry_integral(&[1], &[1, 1], &[1], &[1], 3),
            Err(Error::SizeMismatch { .. })
        ));
        assert_eq!(
            entry_integral(&[1, 1, 1], &[1, 1, 1], &[1, 1, 1], &[1, 1, 1], 2).unwrap_err(),
            Error::Singular { n: 3, dim: 2 }
        );
    }

    #[test]
    fn row_has_unit_norm() {
        for dim in 1..=5u64 {
            for i in 1..=dim {
                let total = (1..=dim)
                    .map(|r| entry_integral(&[i], &[r], &[r], &[i], dim).unwrap())
                    .fold(ExactRational::zero(), |a, b| a + b);
                assert_eq!(total, int(1));
            }
        }
    }

    #[test]
    fn mismatched_multisets_vanish() {
        assert!(entry_integral(&[1, 2], &[1, 1], &[1, 1], &[1, 1], 3).unwrap().is_zero());
        assert!(entry_integral(&[1, 1], &[1, 2], &[1, 3], &[1, 1], 3).unwrap().is_zero());
    }

    #[test]
    fn json_schema() {
        let v = weingarten_table(2, 3).unwrap().to_json();
        assert_eq!(
            v,
            serde_json::json!({
                "n": 2, "N": 3,
                "values": [
                    {"cycle_type": [1, 1], "num": "1", "den": "8"},
                    {"cycle_type": [2], "num": "-1", "den": "24"}
                ]
            })
        );
    }

    #[test]
    fn cache_returns_same_table() {
        let a = cached_table(3, 7, SingularPolicy::Reject).unwrap();
        let b = cached_table(3, 7, SingularPolicy::Reject).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}

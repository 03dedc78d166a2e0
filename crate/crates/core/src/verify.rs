//! Spec catalogues and the cross-check suite behind `hm verify`.

use serde::Serialize;

use crate::moments::{
    check_balance, entry_monomial_oracle, exact_abs_square_moment, exact_moment, MomentOptions,
};
use crate::weingarten::SingularPolicy;
use crate::words::{build_symbol_set, cyclically_reduced_words, MomentSpec, MomentTerm};

/// Every spec over distinct cyclically reduced words on `generators`
/// letters whose expanded letter count is at most `max_letters`.
pub fn all_specs(generators: u8, max_letters: usize) -> Vec<MomentSpec> {
    let words = cyclically_reduced_words(generators, max_letters);
    let mut out = Vec::new();
    let mut current: Vec<MomentTerm> = Vec::new();
    fn go(
        words: &[crate::words::Word],
        from: usize,
        budget: usize,
        current: &mut Vec<MomentTerm>,
        out: &mut Vec<MomentSpec>,
    ) {
        if !current.is_empty() {
            out.push(MomentSpec::new(current.clone()).expect("catalogue terms are valid"));
        }
        for (i, w) in words.iter().enumerate().skip(from) {
            if w.len() > budget {
                continue;
            }
            let max_power = (budget / w.len()) as u32;
            for total in 1..=max_power {
                for alpha in 0..=total {
                    current.push(MomentTerm {
                        word: w.clone(),
                        alpha,
                        beta: total - alpha,
                    });
                    go(words, i + 1, budget - w.len() * total as usize, current, out);
                    current.pop();
                }
            }
        }
    }
    go(&words, 0, max_letters, &mut current, &mut out);
    out
}

pub fn balanced_specs(generators: u8, max_letters: usize) -> Vec<MomentSpec> {
    all_specs(generators, max_letters)
        .into_iter()
        .filter(|s| check_balance(&build_symbol_set(s).0))
        .collect()
}

pub fn unbalanced_specs(generators: u8, max_letters: usize) -> Vec<MomentSpec> {
    all_specs(generators, max_letters)
        .into_iter()
        .filter(|s| !check_balance(&build_symbol_set(s).0))
        .collect()
}

/// All `|tr(w)|²` and `|tr(w₁)|²|tr(w₂)|²` specs (the latter including
/// `w₁ = w₂`, i.e. `|tr(w)|⁴`) with at most `max_letters` expanded letters.
pub fn abs_square_catalog(generators: u8, max_letters: usize) -> Vec<MomentSpec> {
    let words = cyclically_reduced_words(generators, max_letters / 2);
    let term = |w: &crate::words::Word| MomentTerm {
        word: w.clone(),
        alpha: 1,
        beta: 1,
    };
    let mut out = Vec::new();
    for (i, w1) in words.iter().enumerate() {
        if 2 * w1.len() <= max_letters {
            out.push(MomentSpec::new([term(w1)]).expect("valid"));
        }
        for w2 in &words[i..] {
            if 2 * (w1.len() + w2.len()) <= max_letters {
                out.push(MomentSpec::new([term(w1), term(w2)]).expect("valid"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckFailure {
    pub check: &'static str,
    pub spec: String,
    #[serde(rename = "N")]
    pub dim: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyReport {
    pub oracle_checks: usize,
    pub path_checks: usize,
    pub singleton_violations: u64,
    pub failures: Vec<CheckFailure>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.singleton_violations == 0
    }
}

/// Exact engine against the entry-monomial oracle on every spec with at
/// most `max_letters` letters.
pub fn oracle_agreement(
    specs: &[MomentSpec],
    dims: &[u64],
    report: &mut VerifyReport,
) {
    let opts = MomentOptions::default().with_singular(SingularPolicy::PseudoInverse);
    for spec in specs {
        for &dim in dims {
            report.oracle_checks += 1;
            let engine = exact_moment(spec, dim, &opts);
            let oracle = entry_monomial_oracle(spec, dim, SingularPolicy::PseudoInverse);
            match (engine, oracle) {
                (Ok(e), Ok(o)) if e.value == o => {}
                (e, o) => report.failures.push(CheckFailure {
                    check: "oracle",
                    spec: spec.to_string(),
                    dim,
                    detail: format!("engine {:?} vs oracle {:?}", e.map(|m| m.value.to_string()), o.map(|v| v.to_string())),
                }),
            }
        }
    }
}

/// Relation path against the mirror-pairing path, also collecting the
/// singleton-class diagnostics of both.
pub fn path_agreement(specs: &[MomentSpec], dims: &[u64], report: &mut VerifyReport) {
    let opts = MomentOptions::default().with_singular(SingularPolicy::PseudoInverse);
    for spec in specs {
        for &dim in dims {
            report.path_checks += 1;
            match (exact_moment(spec, dim, &opts), exact_abs_square_moment(spec, dim, &opts)) {
                (Ok(a), Ok(b)) => {
                    report.singleton_violations += a.singleton_violations + b.singleton_violations;
                    // no singleton classes means at most |X|/2 classes
                    let half = a.unstarred_counts.iter().sum::<usize>();
                    if a.max_classes > half {
                        report.failures.push(CheckFailure {
                            check: "class-bound",
                            spec: spec.to_string(),
                            dim,
                            detail: format!("{} classes for {} unstarred letters", a.max_classes, half),
                        });
                    }
                    if a.value != b.value {
                        report.failures.push(CheckFailure {
                            check: "path",
                            spec: spec.to_string(),
                            dim,
                            detail: format!("relation {} vs pairing {}", a.value, b.value),
                        });
                    }
                }
                (a, b) => report.failures.push(CheckFailure {
                    check: "path",
                    spec: spec.to_string(),
                    dim,
                    detail: format!("{:?} / {:?}", a.err(), b.err()),
                }),
            }
        }
    }
}

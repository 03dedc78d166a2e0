use hm_core::haar::{estimate_moment, estimate_with, evaluate_spec, haar_sample, DEFAULT_SEED};
use hm_core::moments::{entry_monomial_oracle, exact_abs_square_moment, exact_moment, MomentOptions};
use hm_core::rational::{int, ratio, to_f64, ExactRational};
use hm_core::verify::balanced_specs;
use hm_core::weingarten::SingularPolicy;
use hm_core::words::{MomentSpec, MomentTerm};
use hm_core::Error;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(terms: &[(&str, u32, u32)]) -> MomentSpec {
    MomentSpec::from_words(terms).unwrap()
}

fn pseudo() -> MomentOptions {
    MomentOptions::default().with_singular(SingularPolicy::PseudoInverse)
}

fn exact(terms: &[(&str, u32, u32)], dim: u64) -> ExactRational {
    exact_moment(&spec(terms), dim, &MomentOptions::default()).unwrap().value
}

#[test]
fn known_closed_forms() {
    for dim in 2..=6u64 {
        // E|tr U|⁴ = 2 once N ≥ 2
        assert_eq!(exact(&[("a", 2, 2)], dim), int(2));
        // commutator trace has mean 1/N
        assert_eq!(exact(&[("aba^-1b^-1", 1, 0)], dim), ratio(1, dim as i64));
    }
    for dim in 3..=6u64 {
        assert_eq!(exact(&[("a^3", 1, 1)], dim), int(3));
    }
}

#[test]
fn oracle_agrees_up_to_six_letters() {
    for s in balanced_specs(2, 6) {
        let engine = exact_moment(&s, 2, &pseudo()).unwrap().value;
        let oracle = entry_monomial_oracle(&s, 2, SingularPolicy::PseudoInverse).unwrap();
        assert_eq!(engine, oracle, "{s}");
    }
}

#[test]
fn strict_policy_refuses_small_dimension() {
    let s = spec(&[("a^4", 1, 1)]);
    let err = exact_moment(&s, 3, &MomentOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Singular { n: 4, dim: 3 }), "{err:?}");
    // E|tr U⁴|² = min(4, N) with the pseudo-inverse
    assert_eq!(exact_moment(&s, 3, &pseudo()).unwrap().value, int(3));
}

#[test]
fn rotation_and_inversion_leave_moments_unchanged() {
    let base = spec(&[("a^2b^-1ab", 1, 1), ("ab^-1", 1, 0), ("ba^-1", 1, 0)]);
    let want = exact_moment(&base, 4, &MomentOptions::default()).unwrap().value;
    assert!(want != int(0));
    let w = base.terms()[0].word.clone();
    for k in 0..w.len() {
        let rotated = base.with_word(0, w.rotate(k)).unwrap();
        assert_eq!(exact_moment(&rotated, 4, &MomentOptions::default()).unwrap().value, want);
    }
    // tr(w⁻¹) = conj tr(w): swapping α and β with the inverse word is the same moment
    let swapped: Vec<MomentTerm> = base
        .terms()
        .iter()
        .map(|t| MomentTerm { word: t.word.inverse(), alpha: t.beta, beta: t.alpha })
        .collect();
    let swapped = MomentSpec::new(swapped).unwrap();
    assert_eq!(exact_moment(&swapped, 4, &MomentOptions::default()).unwrap().value, want);
}

#[test]
fn both_exact_paths_on_larger_words() {
    for terms in [
        vec![("a^2b^2", 1, 1), ("ab", 1, 1)],
        vec![("abab^-1", 2, 2)],
        vec![("a^3b", 1, 1)],
    ] {
        let s = spec(&terms);
        for dim in [2, 4] {
            let a = exact_moment(&s, dim, &pseudo()).unwrap();
            let b = exact_abs_square_moment(&s, dim, &pseudo()).unwrap();
            assert_eq!(a.value, b.value, "{s} at N={dim}");
            assert_eq!(a.singleton_violations + b.singleton_violations, 0);
        }
    }
}

fn mc_check(terms: &[(&str, u32, u32)], dim: u64, samples: u64) {
    let s = spec(terms);
    let want = to_f64(&exact_moment(&s, dim, &pseudo()).unwrap().value);
    let est = estimate_moment(&s, dim, samples, DEFAULT_SEED).unwrap();
    assert!(est.within(Complex64::new(want, 0.0), 4.0), "{s} N={dim}: {est:?} vs {want}");
}

#[test]
fn monte_carlo_matches_exact_values() {
    mc_check(&[("a", 1, 1)], 3, 40_000);
    mc_check(&[("ab", 1, 1)], 3, 40_000);
    mc_check(&[("a^3", 1, 1)], 2, 40_000);
    mc_check(&[("aba^-1b^-1", 1, 1)], 2, 40_000);
    mc_check(&[("a^2b^-1", 1, 1), ("b", 1, 1)], 3, 40_000);
}

#[test]
fn haar_left_invariance_smoke() {
    // tr(U) and tr(VU) have the same distribution; compare E|.|² and E|.|⁴
    let a = estimate_with(2, 3, 30_000, 9, |us| Complex64::new(us[0].trace().norm_sqr().powi(2), 0.0)).unwrap();
    let b = estimate_with(2, 3, 30_000, 10, |us| {
        let vu = us[1].matrix() * us[0].matrix();
        Complex64::new(vu.trace().norm_sqr().powi(2), 0.0)
    })
    .unwrap();
    let gap = (a.mean - b.mean).norm();
    assert!(gap <= 4.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt(), "{a:?} {b:?}");
    assert!((a.mean.re - 2.0).abs() <= 4.0 * a.stderr);
}

#[test]
fn evaluate_spec_handles_conjugate_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let us = vec![haar_sample(4, &mut rng)];
    let t = us[0].trace();
    let v = evaluate_spec(&spec(&[("a", 2, 1)]), &us);
    assert!((v - t * t * t.conj()).norm() < 1e-12);
}

mod support;

use ngram_infocap::analysis::{optimal_quantization_search, staircase_scan};
use ngram_infocap::{
    build_dictionary, capacity_profile, lift1, Alphabet, FrequencyDictionary, QuantizationMap, ReturnKind,
    ReturnSeries, SymbolText, TiePolicy,
};
use support::*;

#[test]
fn dictionaries_match_window_counts() {
    let mut r = rng(11);
    for case in 0..40 {
        let len = 20 + case * 7;
        let text = iid_binary(&mut r, len, 0.3 + 0.01 * case as f64);
        for looped in [false, true] {
            let st = SymbolText::binary(&text).unwrap().looped(looped);
            for n in 1..=6 {
                let d = build_dictionary(&st, n).unwrap();
                let expected = naive_counts(&text, n, looped);
                let total: u64 = expected.values().sum();
                assert_eq!(d.len(), expected.len());
                assert_eq!(d.total(), Some(total));
                for (w, &c) in &expected {
                    let e = d.get(w).unwrap();
                    assert_eq!(e.count, Some(c), "{w} in case {case}");
                    assert!((e.frequency - c as f64 / total as f64).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn lift_is_the_entropy_maximizer() {
    let mut r = rng(5);
    for q in 1..=4 {
        for _ in 0..25 {
            let d = balanced_binary(&mut r, q);
            let dict = FrequencyDictionary::from_weights(Alphabet::binary(), q, d.clone()).unwrap();
            let lifted = lift1(&dict).unwrap();
            let oracle = maxent_binary_extension(&d, q);
            assert_eq!(lifted.len(), oracle.len());
            for (w, &f) in &oracle {
                assert!((lifted.frequency(w) - f).abs() < 1e-9, "q={q} {w}: {} vs {f}", lifted.frequency(w));
            }
        }
    }
}

/// KL divergence of `D(n)` from the Kirkwood extension of `D(n - 1)`, computed
/// from raw window counts.
fn naive_capacity(text: &str, n: usize) -> f64 {
    let natural = naive_frequencies(text, n, false);
    let lifted = naive_lift(text, n);
    let s: f64 = natural.iter().map(|(w, &f)| f * (f / lifted[w]).ln()).sum();
    s.max(0.0)
}

#[test]
fn capacity_matches_naive_kl() {
    let mut r = rng(17);
    for case in 0..12 {
        let text = iid_binary(&mut r, 150 + 40 * case, 0.5);
        let st = SymbolText::binary(&text).unwrap();
        for (n, s) in capacity_profile(&st, 2, 9).unwrap() {
            let expected = naive_capacity(&text, n);
            assert!((s - expected).abs() < 1e-12, "case {case} n={n}: {s} vs {expected}");
        }
    }
}

/// Heavy-tailed returns with volatility clustering.
fn synthetic_returns(seed: u64, len: usize) -> Vec<f64> {
    let mut r = rng(seed);
    let mut vol = 0.01;
    (0..len)
        .map(|_| {
            let u1 = unit(&mut r).max(1e-300);
            let u2 = unit(&mut r);
            let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            vol = (0.9 * vol + 0.1 * 0.01 * (1.0 + z.abs())).max(1e-4);
            vol * z
        })
        .collect()
}

#[test]
fn staircase_matches_recount() {
    let values = synthetic_returns(3, 400);
    let series = ReturnSeries::from_values(values.clone(), ReturnKind::Log);
    let scan = staircase_scan(&series, 4, 5).unwrap();
    let expected: Vec<f64> =
        (1..=5).map(|k| naive_nonunique_entropy(&naive_text(&values, &naive_thresholds(&values, k)), 4)).collect();
    for (step, &e) in scan.steps.iter().zip(&expected) {
        assert_eq!(step.cardinality, 1 << step.k);
        assert!((step.entropy - e).abs() < 1e-12, "k={}: {} vs {e}", step.k, step.entropy);
    }
    // Entropy first grows with the alphabet, then collapses once 4-grams become unique.
    let peak = (0..5).max_by(|&a, &b| expected[a].partial_cmp(&expected[b]).unwrap().then(b.cmp(&a))).unwrap();
    assert!(peak > 0 && peak < 4, "{expected:?}");
    assert!(expected[4] < expected[peak]);
    assert_eq!(scan.best_k, peak + 1);
}

#[test]
fn quantization_search_matches_exhaustive_evaluation() {
    let values = synthetic_returns(8, 600);
    let series = ReturnSeries::from_values(values.clone(), ReturnKind::Log);
    let family: Vec<QuantizationMap> = (1..=3)
        .map(|k| {
            serde_json::from_value(serde_json::json!({
                "N": 1usize << (k - 1),
                "thresholds": naive_thresholds(&values, k),
            }))
            .unwrap()
        })
        .collect();
    let search = optimal_quantization_search(&series, &family, 2, 8).unwrap();

    let mut best: Option<(usize, usize, f64)> = None;
    for (i, map) in family.iter().enumerate() {
        let text = naive_text(&values, map.thresholds());
        let profile: Vec<(usize, f64)> = (2..=8).map(|n| (n, naive_capacity(&text, n))).collect();
        let (j_star, peak) =
            profile.iter().fold((0, f64::NEG_INFINITY), |acc, &(n, s)| if s > acc.1 { (n, s) } else { acc });
        assert_eq!(search.candidates[i].j_star, j_star);
        assert!((search.candidates[i].peak - peak).abs() < 1e-12);
        let better = match best {
            None => true,
            Some((_, bj, bp)) => j_star > bj || (j_star == bj && peak > bp),
        };
        if better {
            best = Some((i, j_star, peak));
        }
    }
    let (i, j_star, _) = best.unwrap();
    assert_eq!(search.best, i);
    assert_eq!(search.j_star, j_star);
    assert_eq!(search.best_map.tie_policy(), TiePolicy::Lower);
}

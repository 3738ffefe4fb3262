mod common;

use common::{random_dist, rng, Family, Kind};
use intercausal::copositivity::{
    classify_half_definite, decompose_psd_plus_nonneg, sample_minimum, simplex_min_exact, ClassifyOptions,
    Definiteness,
};
use intercausal::model::{compound_parents, parse_network, to_json, Network};
use intercausal::oracle::{self, Evidence};
use intercausal::synergy2::{build_d, product_synergy_2};
use intercausal::Sign;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
}

fn any_matrix() -> impl Strategy<Value = DMatrix<f64>> {
    (2usize..=5).prop_flat_map(matrix)
}

fn family() -> impl Strategy<Value = Family> {
    (any::<u64>(), 0usize..3, 2usize..=3, 2usize..=3, 2usize..=4, 2usize..=3).prop_map(|(seed, k, na, nb, nx, nc)| {
        let kind = [Kind::Random, Kind::NoisyOrLike, Kind::Product][k];
        Family::random(&mut rng(seed), kind, na, nb, nx, nc)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(fam in family()) {
        let (net, _) = fam.network();
        let back = parse_network(&to_json(&net)).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn exact_minimum_never_above_sampled(m in any_matrix(), seed in any::<u64>()) {
        let exact = simplex_min_exact(&m, 1e-9).unwrap().value;
        let (x, sampled) = sample_minimum(&m, 2_000, seed);
        prop_assert!(exact <= sampled + 1e-12, "{} > {}", exact, sampled);
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_positive_needs_nonnegative_diagonal(m in any_matrix()) {
        let class = classify_half_definite(&m, &ClassifyOptions::default()).unwrap().class;
        if class == Definiteness::HalfPosSemiDef {
            prop_assert!(m.diagonal().iter().all(|&d| d >= -1e-9));
        }
    }

    #[test]
    fn decomposition_implies_copositive(m in any_matrix()) {
        if let Some(dec) = decompose_psd_plus_nonneg(&m, 1e-9) {
            prop_assert!(dec.verify(&m, 1e-9));
            prop_assert!(simplex_min_exact(&m, 1e-9).unwrap().value >= -1e-9);
        }
    }

    #[test]
    fn negation_swaps_classes(m in any_matrix()) {
        let opts = ClassifyOptions::default();
        let pos = classify_half_definite(&m, &opts).unwrap().class;
        let neg = classify_half_definite(&(-&m), &opts).unwrap().class;
        let swapped = match pos {
            Definiteness::HalfPosSemiDef => Definiteness::HalfNegSemiDef,
            Definiteness::HalfNegSemiDef => Definiteness::HalfPosSemiDef,
            other => other,
        };
        prop_assert_eq!(neg, swapped);
    }

    #[test]
    fn classification_is_scale_invariant(m in any_matrix(), scale in 0.01f64..100.0) {
        let opts = ClassifyOptions::default();
        let a = classify_half_definite(&m, &opts).unwrap().class;
        let b = classify_half_definite(&(&m * scale), &opts).unwrap().class;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn synergy_entries_bounded_and_diagonal_consistent(fam in family()) {
        let (net, [a, b, _, c]) = fam.network();
        let (na, nb, nx) = fam.cards();
        for a1 in 0..na {
            for a2 in a1 + 1..na {
                let d = build_d(&net, c, (a, b), 0, (a1, a2), (0, nb - 1)).unwrap();
                prop_assert!(d.entries.iter().all(|v| (-1.0..=1.0).contains(v)));
                for i in 0..nx {
                    let diag = fam.p(a1, 0, i, 0) * fam.p(a2, nb - 1, i, 0) - fam.p(a2, 0, i, 0) * fam.p(a1, nb - 1, i, 0);
                    prop_assert!((d.entries[(i, i)] - diag).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn verdict_symmetric_in_the_pair(fam in family()) {
        let (net, [a, b, _, c]) = fam.network();
        let opts = ClassifyOptions::default();
        let ab = product_synergy_2(&net, c, (a, b), 0, &opts).unwrap().overall;
        let ba = product_synergy_2(&net, c, (b, a), 0, &opts).unwrap().overall;
        prop_assert_eq!(ab, ba);
    }
}

/// Regrouping parents into a compound keeps every conditional probability,
/// as seen by the inference oracle.
#[test]
fn compound_rows_match_oracle() {
    let mut rng = rng(0xc0);
    for _ in 0..20 {
        let mut bld = Network::builder();
        let cards: Vec<usize> = (0..4).map(|_| rng.random_range(2..=3)).collect();
        let labels = |n: usize| (0..n).map(|i| format!("o{i}")).collect::<Vec<_>>();
        let parents: Vec<_> = cards
            .iter()
            .enumerate()
            .map(|(i, &n)| bld.variable(&format!("p{i}"), &labels(n)))
            .collect();
        let c = bld.variable("c", &labels(3));
        for (&p, &n) in parents.iter().zip(&cards) {
            bld.prior(p, random_dist(&mut rng, n));
        }
        let rows = (0..cards.iter().product::<usize>()).map(|_| random_dist(&mut rng, 3)).collect();
        bld.table(c, &parents, rows);
        let net = bld.build().unwrap();

        let keep = (parents[2], parents[0]);
        let cc = compound_parents(&net, c, keep).unwrap();
        assert_eq!(cc.compound.members, vec![parents[1], parents[3]]);
        for ka in 0..cards[2] {
            for kb in 0..cards[0] {
                for (xi, values) in cc.compound.outcomes.iter().enumerate() {
                    let ev = Evidence::new()
                        .observe(parents[2], ka)
                        .observe(parents[0], kb)
                        .observe(parents[1], values[0])
                        .observe(parents[3], values[1]);
                    let post = oracle::posterior(&net, c, &ev).unwrap();
                    for o in 0..3 {
                        assert!((post.probs[o] - cc.prob(ka, kb, xi, o)).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

/// A negative verdict means explaining away under every prior on the other
/// parents, checked with the library's own oracle.
#[test]
fn negative_verdicts_explain_away() {
    let mut rng = rng(0xe4);
    let opts = ClassifyOptions::default();
    let mut seen = 0;
    for _ in 0..40 {
        let fam = Family::random(&mut rng, Kind::NoisyOrLike, 2, 2, 3, 2);
        let (net, [a, b, x, c]) = fam.network();
        if product_synergy_2(&net, c, (a, b), 0, &opts).unwrap().overall != Sign::Negative {
            continue;
        }
        seen += 1;
        for _ in 0..10 {
            let swept = net.with_prior(x, random_dist(&mut rng, 3)).unwrap();
            let s = oracle::intercausal_dominance(&swept, a, b, &Evidence::new().observe(c, 0), 1e-12).unwrap();
            assert!(s.satisfies(Sign::Negative), "{s}");
        }
    }
    assert!(seen > 5, "only {seen} negative instances");
}

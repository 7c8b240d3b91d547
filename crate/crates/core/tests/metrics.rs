//! ROC area and the paired test against brute-force and closed-form references.

use mocap_core::metrics::{auc_roc, paired_test, PairedTest};
use proptest::prelude::*;

fn brute_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / pairs
}

/// Two-sided p-value of Student's t with 3 degrees of freedom, in closed form.
fn t3_two_sided(t: f64) -> f64 {
    let th = (t.abs() / 3f64.sqrt()).atan();
    let cdf = 0.5 + (th + th.sin() * th.cos()) / std::f64::consts::PI;
    2.0 * (1.0 - cdf)
}

/// Two-sided p-value of Student's t with 4 degrees of freedom, in closed form.
fn t4_two_sided(t: f64) -> f64 {
    let x = t.abs() / (4.0 + t * t).sqrt();
    let cdf = 0.5 + 0.75 * x * (1.0 - x * x / 3.0);
    2.0 * (1.0 - cdf)
}

#[test]
fn all_ties_with_balanced_labels_is_exactly_half() {
    assert_eq!(auc_roc(&[false, true, false, true], &[0.4; 4]).unwrap(), 0.5);
    let labels: Vec<bool> = (0..200).map(|i| i % 2 == 0).collect();
    assert_eq!(auc_roc(&labels, &[3.0; 200]).unwrap(), 0.5);
}

#[test]
fn listed_auc_examples() {
    assert_eq!(auc_roc(&[false, false, true, true], &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
    assert_eq!(auc_roc(&[true, false], &[0.3, 0.7]).unwrap(), 0.0);
    assert!(auc_roc(&[true, true], &[0.3, 0.7]).is_err());
}

#[test]
fn paired_test_hand_example_with_three_degrees_of_freedom() {
    // differences 1, 2, 3, 4: mean 2.5, sd sqrt(5/3), t = 2.5 / sqrt(5/12)
    let a = [2.0, 4.0, 6.0, 8.0];
    let b = [1.0, 2.0, 3.0, 4.0];
    let t = 2.5 / (5.0f64 / 12.0).sqrt();
    match paired_test(&a, &b).unwrap() {
        PairedTest::Tested { t: got, df, p_value } => {
            assert_eq!(df, 3);
            assert!((got - t).abs() < 1e-12);
            assert!((p_value - t3_two_sided(t)).abs() < 1e-6, "{p_value} vs {}", t3_two_sided(t));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn paired_test_balanced_differences() {
    // differences 1, -1, 1, -1, 0 have mean 0 and so t = 0 and p = 1
    let a = [1.0, 0.0, 1.0, 0.0, 0.5];
    let b = [0.0, 1.0, 0.0, 1.0, 0.5];
    match paired_test(&a, &b).unwrap() {
        PairedTest::Tested { t, df, p_value } => {
            assert_eq!(df, 4);
            assert!(t.abs() < 1e-12);
            assert!((p_value - t4_two_sided(0.0)).abs() < 1e-6);
            assert!(p_value > 0.5);
        }
        other => panic!("unexpected {other:?}"),
    }
    // a nonzero mean with four degrees of freedom: differences 1, -1, 1, 0, 1.5
    let d = [1.0, -1.0, 1.0, 0.0, 1.5];
    let mean = d.iter().sum::<f64>() / 5.0;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
    let t = mean / (var / 5.0).sqrt();
    let p = paired_test(&d, &[0.0; 5]).unwrap().p_value().unwrap();
    assert!((p - t4_two_sided(t)).abs() < 1e-6);
}

proptest! {
    #[test]
    fn auc_matches_pair_enumeration(
        rows in prop::collection::vec((any::<bool>(), 0u8..12), 2..200)
    ) {
        let labels: Vec<bool> = rows.iter().map(|r| r.0).collect();
        prop_assume!(labels.iter().any(|l| *l) && labels.iter().any(|l| !*l));
        // a coarse score grid forces plenty of ties
        let scores: Vec<f64> = rows.iter().map(|r| r.1 as f64 / 4.0).collect();
        let got = auc_roc(&labels, &scores).unwrap();
        prop_assert!((got - brute_auc(&labels, &scores)).abs() < 1e-12);
    }

    #[test]
    fn auc_is_invariant_to_monotone_transforms(
        rows in prop::collection::vec((any::<bool>(), -5.0f64..5.0), 2..150)
    ) {
        let labels: Vec<bool> = rows.iter().map(|r| r.0).collect();
        prop_assume!(labels.iter().any(|l| *l) && labels.iter().any(|l| !*l));
        let scores: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let squashed: Vec<f64> = scores.iter().map(|s| 1.0 / (1.0 + (-s).exp())).collect();
        let cubed: Vec<f64> = scores.iter().map(|s| 3.0 * s * s * s + 7.0).collect();
        let base = auc_roc(&labels, &scores).unwrap();
        prop_assert_eq!(base, auc_roc(&labels, &squashed).unwrap());
        prop_assert_eq!(base, auc_roc(&labels, &cubed).unwrap());
    }

    #[test]
    fn paired_test_is_symmetric(
        pairs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..40)
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        if let (Some(p), Some(q)) = (
            paired_test(&a, &b).unwrap().p_value(),
            paired_test(&b, &a).unwrap().p_value(),
        ) {
            prop_assert!((p - q).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}

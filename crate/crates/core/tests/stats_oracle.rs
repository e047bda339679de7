//! Hypothesis tests against frozen scipy values, and weighted kappa against a
//! brute-force tabulation of the observed and chance-expected matrices.
//!
//! `tests/data/stats_reference.json` is produced by `gen_stats_reference.py`.

use pdqi_core::analytics::{one_way_anova, pairwise_weighted_kappa, pooled_t_test, welch_t_test};
use pdqi_core::LikertScore;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn reference() -> Value {
    serde_json::from_str(include_str!("data/stats_reference.json")).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn welch_matches_reference() {
    let r = reference();
    let cases = r["welch"].as_array().unwrap();
    assert!(cases.len() >= 25);
    for (i, c) in cases.iter().enumerate() {
        let got = welch_t_test(&floats(&c["a"]), &floats(&c["b"])).unwrap();
        let (t, df, p) = (
            c["t"].as_f64().unwrap(),
            c["df"].as_f64().unwrap(),
            c["p"].as_f64().unwrap(),
        );
        assert!(
            (got.t - t).abs() <= 1e-9 * t.abs().max(1.0),
            "case {i}: t {} vs {t}",
            got.t
        );
        assert!(
            (got.df - df).abs() <= 1e-9 * df.max(1.0),
            "case {i}: df {} vs {df}",
            got.df
        );
        assert!((got.p - p).abs() <= 1e-8, "case {i}: p {} vs {p}", got.p);
    }
}

#[test]
fn welch_named_example() {
    // a = {28,30,35,41}, b = {20,22,25}
    let got = welch_t_test(&[28.0, 30.0, 35.0, 41.0], &[20.0, 22.0, 25.0]).unwrap();
    assert!((got.t - 3.441_558_829_481_345).abs() < 1e-12);
    assert!((got.df - 4.288_943_298_199_515_5).abs() < 1e-12);
    assert!((got.p - 0.023_502_110_161_146_568).abs() < 1e-8);
}

#[test]
fn anova_matches_reference() {
    let r = reference();
    let cases = r["anova"].as_array().unwrap();
    assert!(cases.len() >= 25);
    for (i, c) in cases.iter().enumerate() {
        let groups: Vec<Vec<f64>> = c["groups"].as_array().unwrap().iter().map(floats).collect();
        let got = one_way_anova(&groups).unwrap();
        let (f, p) = (c["f"].as_f64().unwrap(), c["p"].as_f64().unwrap());
        assert!(
            (got.f - f).abs() <= 1e-9 * f.abs().max(1.0),
            "case {i}: F {} vs {f}",
            got.f
        );
        assert_eq!(got.df1, c["df1"].as_f64().unwrap());
        assert_eq!(got.df2, c["df2"].as_f64().unwrap());
        assert!((got.p - p).abs() <= 1e-8, "case {i}: p {} vs {p}", got.p);
    }
}

/// κ from the definition: full 5×5 observed and expected proportion tables.
fn kappa_brute_force(a: &[u8], b: &[u8]) -> Option<f64> {
    let n = a.len() as f64;
    let mut observed = [[0.0f64; 5]; 5];
    for (&x, &y) in a.iter().zip(b) {
        observed[usize::from(x) - 1][usize::from(y) - 1] += 1.0 / n;
    }
    let rows: Vec<f64> = (0..5).map(|i| observed[i].iter().sum()).collect();
    let cols: Vec<f64> = (0..5)
        .map(|j| (0..5).map(|i| observed[i][j]).sum())
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..5 {
        for j in 0..5 {
            let w = ((i as f64) - (j as f64)).powi(2);
            num += w * observed[i][j];
            den += w * rows[i] * cols[j];
        }
    }
    (den > 0.0).then(|| 1.0 - num / den)
}

fn to_likert(v: &[u8]) -> Vec<LikertScore> {
    v.iter()
        .map(|&x| LikertScore::new(i64::from(x)).unwrap())
        .collect()
}

#[test]
fn kappa_matches_brute_force_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut defined = 0;
    for case in 0..200 {
        let len = if case < 100 {
            10
        } else {
            rng.random_range(2..40)
        };
        let a: Vec<u8> = (0..len).map(|_| rng.random_range(1..=5)).collect();
        // Correlated second rater, sometimes off by one.
        let b: Vec<u8> = a
            .iter()
            .map(|&x| {
                let shift: i8 = rng.random_range(-1..=1);
                (x as i8 + shift).clamp(1, 5) as u8
            })
            .collect();
        let got = pairwise_weighted_kappa(&to_likert(&a), &to_likert(&b)).unwrap();
        let want = kappa_brute_force(&a, &b);
        match (got, want) {
            (Some(g), Some(w)) => {
                defined += 1;
                assert!((g - w).abs() <= 1e-12, "case {case}: {g} vs {w}");
            }
            (None, None) => {}
            other => panic!("case {case}: definedness differs {other:?}"),
        }
    }
    assert!(defined >= 100);
}

#[test]
fn anova_two_groups_equals_pooled_t_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let na = rng.random_range(2..12);
        let nb = rng.random_range(2..12);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(9..=45) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random_range(9..=45) as f64).collect();
        let (Ok(t), Ok(f)) = (pooled_t_test(&a, &b), one_way_anova(&[&a[..], &b[..]])) else {
            continue;
        };
        assert!((f.f - t.t * t.t).abs() <= 1e-9 * f.f.max(1.0));
        assert!((f.p - t.p).abs() <= 1e-9);
    }
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(9u32..=45, 2..15).prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn welch_antisymmetric(a in sample(), b in sample()) {
        if let (Ok(ab), Ok(ba)) = (welch_t_test(&a, &b), welch_t_test(&b, &a)) {
            prop_assert!((ab.t + ba.t).abs() <= 1e-12 * ab.t.abs().max(1.0));
            prop_assert!((ab.p - ba.p).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p));
        }
    }

    #[test]
    fn welch_translation_invariant(a in sample(), b in sample(), c in -100.0f64..100.0) {
        if let Ok(base) = welch_t_test(&a, &b) {
            let a2: Vec<f64> = a.iter().map(|x| x + c).collect();
            let b2: Vec<f64> = b.iter().map(|x| x + c).collect();
            let moved = welch_t_test(&a2, &b2).unwrap();
            prop_assert!((base.t - moved.t).abs() <= 1e-9);
            prop_assert!((base.df - moved.df).abs() <= 1e-9);
            prop_assert!((base.p - moved.p).abs() <= 1e-9);
        }
    }

    #[test]
    fn anova_two_groups_identity(a in sample(), b in sample()) {
        if let (Ok(t), Ok(f)) = (pooled_t_test(&a, &b), one_way_anova(&[a.clone(), b.clone()])) {
            prop_assert!((f.f - t.t * t.t).abs() <= 1e-9 * f.f.max(1.0));
            prop_assert!((f.p - t.p).abs() <= 1e-9);
        }
    }

    #[test]
    fn kappa_invariant_under_item_permutation(
        pairs in prop::collection::vec((1u8..=5, 1u8..=5), 2..30),
        seed in any::<u64>(),
    ) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let mut shuffled = pairs.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (sa, sb): (Vec<u8>, Vec<u8>) = shuffled.into_iter().unzip();
        let k1 = pairwise_weighted_kappa(&to_likert(&a), &to_likert(&b)).unwrap();
        let k2 = pairwise_weighted_kappa(&to_likert(&sa), &to_likert(&sb)).unwrap();
        prop_assert_eq!(k1, k2);
        if let Some(k) = k1 {
            prop_assert!(k <= 1.0);
        }
    }
}

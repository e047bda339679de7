//! Deterministic inputs shared by the benchmarks.

use pdqi_core::LikertScore;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` totals in the valid range.
pub fn totals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| f64::from(rng.random_range(9..=45u32)))
        .collect()
}

/// Two correlated rating lists of length `n`.
pub fn rating_pair(seed: u64, n: usize) -> (Vec<LikertScore>, Vec<LikertScore>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a: i64 = rng.random_range(1..=5);
            let b = (a + rng.random_range(-1..=1)).clamp(1, 5);
            (LikertScore::new(a).unwrap(), LikertScore::new(b).unwrap())
        })
        .unzip()
}

/// A documents CSV with `n` rows, every third note quoted with embedded commas and newlines.
pub fn documents_csv(n: usize) -> Vec<u8> {
    let mut out = String::from("filename,description,mrn,note,true_origin\n");
    for i in 0..n {
        let origin = if i % 2 == 0 { "human" } else { "ai" };
        if i % 3 == 0 {
            out.push_str(&format!(
                "note_{i}.txt,Visit {i},MRN{i:08},\"Assessment, plan:\nfollow up in {i} days, \"\"stable\"\".\",{origin}\n"
            ));
        } else {
            out.push_str(&format!(
                "note_{i}.txt,Visit {i},MRN{i:08},Patient seen for routine follow-up number {i}.,{origin}\n"
            ));
        }
    }
    out.into_bytes()
}

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use textsweep::corpus::{background_word, heaps_fit, inject_misspellings};

fn zipf_texts(tokens: usize, vocab: u64, seed: u64) -> Vec<String> {
    let zipf = Zipf::new(vocab as f64, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..tokens).map(|_| background_word(zipf.sample(&mut rng) as u64)).collect();
    words.chunks(20).map(|c| c.join(" ")).collect()
}

/// Recounts the vocabulary curve independently and solves the 2x2 normal
/// equations of `ln V = b + a ln n`.
fn reference_alpha(texts: &[String], interval: usize) -> f64 {
    let mut seen = BTreeSet::new();
    let mut pts = Vec::new();
    let mut n = 0usize;
    for t in texts {
        for w in t.split(' ') {
            seen.insert(w.to_lowercase());
            n += 1;
            if n.is_multiple_of(interval) {
                pts.push(((n as f64).ln(), (seen.len() as f64).ln()));
            }
        }
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

#[test]
fn zipf_million_tokens_matches_recount() {
    let texts = zipf_texts(1_000_000, 50_000, 11);
    let fit = heaps_fit(&texts, 10_000).unwrap();
    assert_eq!(fit.points.len(), 100);
    let reference = reference_alpha(&texts, 10_000);
    assert!((fit.alpha - reference).abs() < 1e-9, "{} vs {}", fit.alpha, reference);
    assert!(fit.alpha > 0.0 && fit.alpha < 1.0);
}

#[test]
fn misspellings_raise_alpha() {
    let clean = zipf_texts(100_000, 5_000, 5);
    let noisy = inject_misspellings(&clean, 0.1, 5);
    let a_clean = heaps_fit(&clean, 1_000).unwrap().alpha;
    let a_noisy = heaps_fit(&noisy, 1_000).unwrap().alpha;
    assert!(a_noisy > a_clean, "{a_noisy} <= {a_clean}");
}

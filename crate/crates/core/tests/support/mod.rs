//! Brute-force reference implementations shared by integration tests.
//!
//! Nothing here calls into the library's counting, lifting or entropy code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// i.i.d. binary text with `P('1') = p1`.
pub fn iid_binary(rng: &mut ChaCha8Rng, len: usize, p1: f64) -> String {
    (0..len).map(|_| if unit(rng) < p1 { '1' } else { '0' }).collect()
}

/// All windows of length `n`; `looped` adds the wrap-around windows.
pub fn naive_counts(text: &str, n: usize, looped: bool) -> BTreeMap<String, u64> {
    let chars: Vec<char> = text.chars().collect();
    let len = chars.len();
    let starts = if looped { len } else { len + 1 - n };
    let mut out = BTreeMap::new();
    for s in 0..starts {
        let w: String = (0..n).map(|i| chars[(s + i) % len]).collect();
        *out.entry(w).or_insert(0) += 1;
    }
    out
}

pub fn naive_frequencies(text: &str, n: usize, looped: bool) -> BTreeMap<String, f64> {
    let counts = naive_counts(text, n, looped);
    let total: u64 = counts.values().sum();
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

pub fn naive_entropy<'a>(freqs: impl IntoIterator<Item = &'a f64>) -> f64 {
    freqs.into_iter().filter(|&&f| f > 0.0).map(|&f| -f * f.ln()).sum()
}

fn binary_strings(len: usize) -> Vec<String> {
    (0..1usize << len).map(|i| (0..len).rev().map(|b| if i >> b & 1 == 1 { '1' } else { '0' }).collect()).collect()
}

/// Stationary `q`-gram distribution of a random binary Markov chain of order
/// `q - 1` with transition probabilities in `[0.05, 0.95]`. Its prefix and
/// suffix `(q - 1)`-marginals agree.
pub fn balanced_binary(rng: &mut ChaCha8Rng, q: usize) -> BTreeMap<String, f64> {
    assert!(q >= 1);
    let ctx = q - 1;
    let states = 1usize << ctx;
    let p_one: Vec<f64> = (0..states).map(|_| 0.05 + 0.9 * unit(rng)).collect();
    if ctx == 0 {
        return BTreeMap::from([("0".to_string(), 1.0 - p_one[0]), ("1".to_string(), p_one[0])]);
    }
    let mut pi = vec![1.0 / states as f64; states];
    for _ in 0..5000 {
        let mut next = vec![0.0; states];
        for (s, &mass) in pi.iter().enumerate() {
            let shifted = (s << 1) & (states - 1);
            next[shifted] += mass * (1.0 - p_one[s]);
            next[shifted | 1] += mass * p_one[s];
        }
        pi = next;
    }
    let mut out = BTreeMap::new();
    for (s, w) in binary_strings(ctx).into_iter().enumerate() {
        out.insert(format!("{w}0"), pi[s] * (1.0 - p_one[s]));
        out.insert(format!("{w}1"), pi[s] * p_one[s]);
    }
    out
}

/// Maximum-entropy binary `(q + 1)`-gram distribution whose prefix and suffix
/// `q`-marginals equal `d`.
///
/// Every `(q + 1)`-gram `a w c` belongs to exactly one 2x2 table indexed by
/// its middle `w`, with row sums `d(a w)` and column sums `d(w c)`. Each table
/// has one free cell `x`; table entropy is concave in `x`, so its maximum is
/// found by bisection on the sign of the derivative over the feasible range.
pub fn maxent_binary_extension(d: &BTreeMap<String, f64>, q: usize) -> BTreeMap<String, f64> {
    let get = |s: &str| d.get(s).copied().unwrap_or(0.0);
    let mut out = BTreeMap::new();
    for w in binary_strings(q - 1) {
        let r0 = get(&format!("0{w}"));
        let r1 = get(&format!("1{w}"));
        let c0 = get(&format!("{w}0"));
        let cells = |x: f64| [x, r0 - x, c0 - x, r1 - c0 + x];
        // dH/dx = ln(t01 t10) - ln(t00 t11)
        let slope = |x: f64| {
            let t = cells(x);
            (t[1].ln() + t[2].ln()) - (t[0].ln() + t[3].ln())
        };
        let mut lo = 0f64.max(c0 - r1);
        let mut hi = r0.min(c0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = cells(0.5 * (lo + hi));
        for (i, (a, c)) in [('0', '0'), ('0', '1'), ('1', '0'), ('1', '1')].into_iter().enumerate() {
            if t[i] > 0.0 {
                out.insert(format!("{a}{w}{c}"), t[i]);
            }
        }
    }
    out
}

pub fn naive_quantile(sorted: &[f64], level: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Thresholds of the `2^k` staircase level: sign split at zero, equal-mass
/// quantiles on each side.
pub fn naive_thresholds(returns: &[f64], k: usize) -> Vec<f64> {
    let half = 1usize << (k - 1);
    let mut neg: Vec<f64> = returns.iter().copied().filter(|&x| x <= 0.0).collect();
    let mut pos: Vec<f64> = returns.iter().copied().filter(|&x| x > 0.0).collect();
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut t: Vec<f64> = (1..half).map(|j| naive_quantile(&neg, j as f64 / half as f64)).collect();
    t.push(0.0);
    t.extend((1..half).map(|j| naive_quantile(&pos, j as f64 / half as f64)));
    t
}

pub fn naive_text(returns: &[f64], thresholds: &[f64]) -> String {
    const GLYPHS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    returns.iter().map(|&p| GLYPHS[thresholds.iter().filter(|&&t| t < p).count()] as char).collect()
}

pub fn naive_nonunique_entropy(text: &str, n: usize) -> f64 {
    let kept: Vec<u64> = naive_counts(text, n, false).into_values().filter(|&c| c >= 2).collect();
    let total: u64 = kept.iter().sum();
    if total == 0 {
        return 0.0;
    }
    naive_entropy(&kept.iter().map(|&c| c as f64 / total as f64).collect::<Vec<_>>())
}

/// Kirkwood extension of the non-looped `D(n - 1)` of `text` to thickness `n`,
/// renormalized. The normalizer is the `(n - 2)`-gram marginal obtained by
/// dropping the last letter of `D(n - 1)`.
pub fn naive_lift(text: &str, n: usize) -> BTreeMap<String, f64> {
    let prev = naive_frequencies(text, n - 1, false);
    let mut g: BTreeMap<&str, f64> = BTreeMap::new();
    for (w, &f) in &prev {
        *g.entry(&w[..n - 2]).or_insert(0.0) += f;
    }
    let mut lifted: BTreeMap<String, f64> = BTreeMap::new();
    for (aw, &f1) in &prev {
        let w = &aw[1..];
        for (wb, &f2) in &prev {
            if &wb[..n - 2] == w {
                lifted.insert(format!("{aw}{}", &wb[n - 2..]), f1 * f2 / g[w]);
            }
        }
    }
    let z: f64 = lifted.values().sum();
    lifted.values_mut().for_each(|f| *f /= z);
    lifted
}

//! Multi-reference corpus chrF and BLEU.
//!
//! Both metrics accumulate sufficient statistics per segment and compute
//! the score once over the pooled corpus statistics.
//!
//! chrF uses character n-grams of orders `1..=char_n` with all whitespace
//! removed. Per order it pools hypothesis, reference and matched n-gram
//! counts; precision and recall are averaged across orders and combined
//! into an F-beta score. For several references the segment keeps the
//! statistics of the reference with the highest segment-level F score
//! (first reference on ties).
//!
//! BLEU uses whitespace tokens after NFC normalisation (case-sensitive),
//! clips n-gram matches by the maximum count over references, and applies
//! the brevity penalty against the reference length closest to the
//! hypothesis length (shorter on ties). No smoothing: a zero precision at
//! any order gives 0.

use std::collections::HashMap;
use std::hash::Hash;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredSegment {
    pub hypothesis: String,
    pub references: Vec<String>,
}

impl ScoredSegment {
    pub fn new(hypothesis: impl Into<String>, references: Vec<String>) -> Result<Self> {
        let s = Self {
            hypothesis: hypothesis.into(),
            references,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if self.references.is_empty() {
            Err(Error::InsufficientData("segment has no reference".into()))
        } else {
            Ok(())
        }
    }
}

fn check_corpus(segments: &[ScoredSegment]) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    segments.iter().try_for_each(ScoredSegment::check)
}

fn ngram_counts<T: Hash + Eq + Clone>(items: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut m = HashMap::new();
    if items.len() >= n {
        for w in items.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Per-order `(hypothesis, reference, matched)` character n-gram counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChrfStats {
    pub orders: Vec<[usize; 3]>,
}

impl ChrfStats {
    fn zero(char_n: usize) -> Self {
        Self {
            orders: vec![[0; 3]; char_n],
        }
    }

    fn add(&mut self, other: &ChrfStats) {
        for (a, b) in self.orders.iter_mut().zip(&other.orders) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
    }

    /// F-beta in `[0, 100]`.
    pub fn score(&self, beta: f64) -> f64 {
        const EPS: f64 = 1e-16;
        let factor = beta * beta;
        let mut avg_prec = 0.0;
        let mut avg_rec = 0.0;
        let mut effective = 0usize;
        for &[hyp, rf, matched] in &self.orders {
            avg_prec += if hyp > 0 { matched as f64 / hyp as f64 } else { EPS };
            avg_rec += if rf > 0 { matched as f64 / rf as f64 } else { EPS };
            if hyp > 0 && rf > 0 {
                effective += 1;
            }
        }
        if effective == 0 {
            return 0.0;
        }
        avg_prec /= effective as f64;
        avg_rec /= effective as f64;
        if avg_prec + avg_rec == 0.0 {
            return 0.0;
        }
        let f = (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
        100.0 * f
    }
}

fn strip_whitespace(s: &str) -> Vec<char> {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn chrf_pair_stats(hyp: &[char], reference: &[char], char_n: usize) -> ChrfStats {
    let mut st = ChrfStats::zero(char_n);
    for n in 1..=char_n {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        let matched = h
            .iter()
            .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
            .sum();
        st.orders[n - 1] = [h.values().sum(), r.values().sum(), matched];
    }
    st
}

/// Statistics of the best-matching reference for one segment.
pub fn chrf_segment_stats(seg: &ScoredSegment, char_n: usize, beta: f64) -> ChrfStats {
    let hyp = strip_whitespace(&seg.hypothesis);
    let mut best: Option<(f64, ChrfStats)> = None;
    for r in &seg.references {
        let st = chrf_pair_stats(&hyp, &strip_whitespace(r), char_n);
        let f = st.score(beta);
        if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
            best = Some((f, st));
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| ChrfStats::zero(char_n))
}

/// Corpus-level chrF. `chrf(segments, 6, 2.0)` is chrF2.
pub fn chrf(segments: &[ScoredSegment], char_n: usize, beta: f64) -> Result<f64> {
    check_corpus(segments)?;
    if char_n == 0 {
        return Err(Error::InvalidParameter("chrF order must be >= 1".into()));
    }
    let mut total = ChrfStats::zero(char_n);
    for seg in segments {
        total.add(&chrf_segment_stats(seg, char_n, beta));
    }
    Ok(total.score(beta))
}

pub fn chrf2(segments: &[ScoredSegment]) -> Result<f64> {
    chrf(segments, 6, 2.0)
}

/// Clipped n-gram matches and totals per order plus length statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct BleuStats {
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    fn zero(max_n: usize) -> Self {
        Self {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    fn add(&mut self, o: &BleuStats) {
        for n in 0..self.matches.len() {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
    }

    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        if self
            .matches
            .iter()
            .zip(&self.totals)
            .any(|(&m, &t)| m == 0 || t == 0)
        {
            return 0.0;
        }
        let log_mean = self
            .matches
            .iter()
            .zip(&self.totals)
            .map(|(&m, &t)| (m as f64 / t as f64).ln())
            .sum::<f64>()
            / self.matches.len() as f64;
        let bp = if self.hyp_len >= self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        100.0 * bp * log_mean.exp()
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let normalized: String = s.nfc().collect();
    normalized.split_whitespace().map(str::to_owned).collect()
}

pub fn bleu_segment_stats(seg: &ScoredSegment, max_n: usize) -> BleuStats {
    let hyp = tokenize(&seg.hypothesis);
    let refs: Vec<Vec<String>> = seg.references.iter().map(|r| tokenize(r)).collect();
    let mut st = BleuStats::zero(max_n);
    st.hyp_len = hyp.len();
    st.ref_len = refs
        .iter()
        .map(Vec::len)
        .min_by_key(|&l| (l.abs_diff(hyp.len()), l))
        .unwrap_or(0);
    for n in 1..=max_n {
        let h = ngram_counts(&hyp, n);
        let mut max_ref: HashMap<&[String], usize> = HashMap::new();
        for r in &refs {
            for (g, c) in ngram_counts(r, n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(c);
            }
        }
        st.totals[n - 1] = h.values().sum();
        st.matches[n - 1] = h
            .iter()
            .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
            .sum();
    }
    st
}

/// Corpus-level BLEU without smoothing.
pub fn bleu(segments: &[ScoredSegment], max_n: usize) -> Result<f64> {
    check_corpus(segments)?;
    if max_n == 0 {
        return Err(Error::InvalidParameter("BLEU order must be >= 1".into()));
    }
    let mut total = BleuStats::zero(max_n);
    for seg in segments {
        total.add(&bleu_segment_stats(seg, max_n));
    }
    Ok(total.score())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(h: &str, refs: &[&str]) -> ScoredSegment {
        ScoredSegment::new(h, refs.iter().map(|r| r.to_string()).collect()).unwrap()
    }

    #[test]
    fn chrf_identity_is_100() {
        let c = vec![seg("domani tornerò a casa", &["altro testo", "domani tornerò a casa"])];
        assert!((chrf2(&c).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn chrf_disjoint_is_0() {
        let c = vec![seg("abcdefg", &["hijklmn"])];
        assert_eq!(chrf2(&c).unwrap(), 0.0);
        // Orders longer than both strings contribute only the eps floor.
        let c = vec![seg("abc", &["xyz"])];
        assert!(chrf2(&c).unwrap() < 1e-12);
    }

    #[test]
    fn chrf_hand_counted_bigram_case() {
        // unigrams {a,b,c} vs {a,b,d}: P = R = 2/3
        // bigrams {ab,bc} vs {ab,bd}:  P = R = 1/2
        let p = (2.0 / 3.0 + 0.5) / 2.0;
        let r = p;
        let expected = 100.0 * 5.0 * p * r / (4.0 * p + r);
        let got = chrf(&[seg("abc", &["abd"])], 2, 2.0).unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn chrf_ignores_whitespace() {
        let a = chrf2(&[seg("a b c", &["abc"])]).unwrap();
        assert!((a - 100.0).abs() < 1e-9);
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        assert_eq!(chrf2(&[seg("", &["abc"])]).unwrap(), 0.0);
        assert_eq!(bleu(&[seg("", &["a b c d"])], 4).unwrap(), 0.0);
    }

    #[test]
    fn bleu_identity_is_100() {
        let c = vec![seg("si munge due volte al giorno", &["si munge due volte al giorno"])];
        assert!((bleu(&c, 4).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn bleu_no_fourgram_overlap_is_zero() {
        let c = vec![seg("a b c x d e f", &["a b c y d e f"])];
        assert_eq!(bleu(&c, 4).unwrap(), 0.0);
    }

    #[test]
    fn bleu_hand_counted() {
        let got = bleu(&[seg("a b c d e", &["a b c d f"])], 4).unwrap();
        let expected = 100.0 * (0.8f64 * 0.75 * (2.0 / 3.0) * 0.5).powf(0.25);
        assert!((got - expected).abs() < 1e-9);
        assert!((got - 66.874).abs() < 1e-3);
    }

    #[test]
    fn bleu_brevity_penalty_uses_closest_reference() {
        let s = seg("a b c d", &["a b c d e f g h", "a b c d e"]);
        let st = bleu_segment_stats(&s, 4);
        assert_eq!(st.ref_len, 5);
        // equidistant lengths 3 and 5 from 4 -> shorter
        let s = seg("a b c d", &["a b c d e", "a b c"]);
        assert_eq!(bleu_segment_stats(&s, 4).ref_len, 3);
    }

    #[test]
    fn bleu_is_case_sensitive_and_nfc_normalised() {
        let composed = "città è bella oggi";
        let decomposed = "citta\u{300} e\u{300} bella oggi";
        let c = vec![seg(decomposed, &[composed])];
        assert!((bleu(&c, 4).unwrap() - 100.0).abs() < 1e-9);
        let c = vec![seg("Città è bella oggi", &[composed])];
        assert!(bleu(&c, 4).unwrap() < 100.0);
    }

    #[test]
    fn empty_corpus_and_missing_references() {
        assert!(chrf2(&[]).is_err());
        assert!(bleu(&[], 4).is_err());
        assert!(ScoredSegment::new("x", vec![]).is_err());
    }
}

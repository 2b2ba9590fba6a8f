//! Corpus statistics: utterances per debate and words per utterance, per
//! legislature and over the whole corpus.
//!
//! A word is a maximal run of non-whitespace characters. Every emitted
//! utterance counts, the president's included. Statistics are accumulated
//! into exact integer histograms so that shards can be merged and medians
//! stay exact.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SdConvention;
use crate::model::{AnnotatedDebate, Utterance};

pub fn word_count(u: &Utterance) -> u64 {
    words(&u.text)
}

pub fn words(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Exact histogram of non-negative integer observations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
    n: u64,
}

impl Histogram {
    pub fn add(&mut self, value: u64) {
        self.add_n(value, 1);
    }

    pub fn add_n(&mut self, value: u64, times: u64) {
        if times > 0 {
            *self.counts.entry(value).or_default() += times;
            self.n += times;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&v, &c) in &other.counts {
            self.add_n(v, c);
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sum(&self) -> u128 {
        self.counts.iter().map(|(&v, &c)| v as u128 * c as u128).sum()
    }

    pub fn max(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum() as f64 / self.n as f64)
    }

    /// Value at 0-based rank `k` in sorted order.
    fn nth(&self, k: u64) -> u64 {
        let mut seen = 0;
        for (&v, &c) in &self.counts {
            seen += c;
            if k < seen {
                return v;
            }
        }
        unreachable!("rank {k} beyond {} observations", self.n)
    }

    /// Middle value, or the mean of the two middle values for even counts.
    pub fn median(&self) -> Option<f64> {
        if self.n == 0 {
            return None;
        }
        let lo = self.nth((self.n - 1) / 2);
        let hi = self.nth(self.n / 2);
        Some((lo as f64 + hi as f64) / 2.0)
    }

    pub fn sd(&self, convention: SdConvention) -> Option<f64> {
        let mean = self.mean()?;
        let denom = match convention {
            SdConvention::Population => self.n,
            SdConvention::Sample if self.n >= 2 => self.n - 1,
            SdConvention::Sample => return None,
        };
        let ss: f64 = self
            .counts
            .iter()
            .map(|(&v, &c)| c as f64 * (v as f64 - mean).powi(2))
            .sum();
        Some((ss / denom as f64).sqrt())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct LegislatureAcc {
    start: Option<NaiveDate>,
    end: Option<NaiveDate>,
    debates: u64,
    utterances: u64,
    words: u128,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("shards overlap on debate L{0}-S{1}-N{2}")]
    OverlappingShards(u32, u32, u32),
}

/// Mergeable sufficient statistics for a set of debates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    seen: BTreeSet<(u32, u32, u32)>,
    legislatures: BTreeMap<u32, LegislatureAcc>,
    per_debate: Histogram,
    per_utterance: Histogram,
    duplicates: u64,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a debate. A debate whose (legislature, session, number) was
    /// already counted is skipped and `false` is returned.
    pub fn add(&mut self, d: &AnnotatedDebate) -> bool {
        let m = &d.meta;
        if !self.seen.insert((m.legislature, m.session, m.number)) {
            self.duplicates += 1;
            return false;
        }
        let leg = self.legislatures.entry(m.legislature).or_default();
        leg.start = Some(leg.start.map_or(m.date, |s| s.min(m.date)));
        leg.end = Some(leg.end.map_or(m.date, |e| e.max(m.date)));
        leg.debates += 1;
        let mut n = 0u64;
        for u in d.utterances() {
            let w = word_count(u);
            self.per_utterance.add(w);
            leg.words += w as u128;
            n += 1;
        }
        leg.utterances += n;
        self.per_debate.add(n);
        true
    }

    pub fn duplicates(&self) -> u64 {
        self.duplicates
    }

    /// Combines two disjoint shards.
    pub fn merge(mut self, other: StatsAccumulator) -> Result<Self, StatsError> {
        if let Some(&(l, s, n)) = self.seen.intersection(&other.seen).next() {
            return Err(StatsError::OverlappingShards(l, s, n));
        }
        self.seen.extend(other.seen);
        for (l, o) in other.legislatures {
            let acc = self.legislatures.entry(l).or_default();
            acc.start = match (acc.start, o.start) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            acc.end = match (acc.end, o.end) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            acc.debates += o.debates;
            acc.utterances += o.utterances;
            acc.words += o.words;
        }
        self.per_debate.merge(&other.per_debate);
        self.per_utterance.merge(&other.per_utterance);
        self.duplicates += other.duplicates;
        Ok(self)
    }

    pub fn finalize(&self, convention: SdConvention) -> CorpusStats {
        let legislatures = self
            .legislatures
            .iter()
            .map(|(&legislature, a)| LegislatureRow {
                legislature,
                start_date: a.start.expect("legislature with debates has dates"),
                end_date: a.end.expect("legislature with debates has dates"),
                n_debates: a.debates,
                n_utterances: a.utterances,
                mean_utterances_per_debate: a.utterances as f64 / a.debates as f64,
                mean_words_per_utterance: (a.utterances > 0)
                    .then(|| a.words as f64 / a.utterances as f64),
            })
            .collect();
        CorpusStats {
            n_debates: self.per_debate.len(),
            n_utterances: self.per_utterance.len(),
            legislatures,
            utterances_per_debate: Summary::of(&self.per_debate, convention),
            words_per_utterance: Summary::of(&self.per_utterance, convention),
            sd_convention: convention,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegislatureRow {
    pub legislature: u32,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub n_debates: u64,
    pub n_utterances: u64,
    pub mean_utterances_per_debate: f64,
    pub mean_words_per_utterance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Under the configured convention.
    pub sd: Option<f64>,
    pub sd_population: Option<f64>,
    pub sd_sample: Option<f64>,
    pub max: Option<u64>,
}

impl Summary {
    fn of(h: &Histogram, convention: SdConvention) -> Self {
        Summary {
            n: h.len(),
            mean: h.mean(),
            median: h.median(),
            sd: h.sd(convention),
            sd_population: h.sd(SdConvention::Population),
            sd_sample: h.sd(SdConvention::Sample),
            max: h.max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_debates: u64,
    pub n_utterances: u64,
    pub legislatures: Vec<LegislatureRow>,
    pub utterances_per_debate: Summary,
    pub words_per_utterance: Summary,
    pub sd_convention: SdConvention,
}

pub fn compute_stats<'a, I>(corpus: I, convention: SdConvention) -> CorpusStats
where
    I: IntoIterator<Item = &'a AnnotatedDebate>,
{
    let mut acc = StatsAccumulator::new();
    for d in corpus {
        acc.add(d);
    }
    acc.finalize(convention)
}

fn fmt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub const REPORT_NOTE: &str = "every emitted utterance is counted, including the president's; \
a word is a maximal run of non-whitespace characters";

impl CorpusStats {
    /// One row per legislature plus an `all` row, means to 2 decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, rec: [String; 6]| {
            w.write_record(&rec).expect("writing to memory");
        };
        write(
            &mut w,
            [
                "legislature",
                "start_date",
                "end_date",
                "n_debates",
                "mean_utterances_per_debate",
                "mean_words_per_utterance",
            ]
            .map(String::from),
        );
        for r in &self.legislatures {
            write(
                &mut w,
                [
                    r.legislature.to_string(),
                    r.start_date.to_string(),
                    r.end_date.to_string(),
                    r.n_debates.to_string(),
                    fmt2(Some(r.mean_utterances_per_debate)),
                    fmt2(r.mean_words_per_utterance),
                ],
            );
        }
        let start = self.legislatures.iter().map(|r| r.start_date).min();
        let end = self.legislatures.iter().map(|r| r.end_date).max();
        write(
            &mut w,
            [
                "all".to_string(),
                start.map(|d| d.to_string()).unwrap_or_default(),
                end.map(|d| d.to_string()).unwrap_or_default(),
                self.n_debates.to_string(),
                fmt2(self.utterances_per_debate.mean),
                fmt2(self.words_per_utterance.mean),
            ],
        );
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv of utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("stats serialize");
        v["note"] = serde_json::Value::String(REPORT_NOTE.to_string());
        let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DebateMeta, SpeakerRef};
    use proptest::prelude::*;

    fn debate(l: u32, n: u32, date: (i32, u32, u32), texts: &[&str]) -> AnnotatedDebate {
        let meta = DebateMeta::r3(l, 1, n, NaiveDate::from_ymd_opt(date.0, date.1, date.2).unwrap());
        let us = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Utterance {
                order: i as u32 + 1,
                page_start: 1,
                speaker_string: "O Sr. Presidente".into(),
                speaker: SpeakerRef::President,
                text: t.to_string(),
            })
            .collect();
        AnnotatedDebate::from_utterances(meta, us)
    }

    #[test]
    fn word_counts() {
        assert_eq!(words("Dou a palavra ao senhor Alberto Alves"), 7);
        assert_eq!(words("Blah"), 1);
        assert_eq!(words("  a  b "), 2);
        assert_eq!(words(""), 0);
        assert_eq!(words("a\u{A0}b\tc\nd"), 4);
    }

    #[test]
    fn mean_words_of_three_utterances() {
        let t2 = "w ".repeat(2);
        let t19 = "w ".repeat(19);
        let t300 = "w ".repeat(300);
        let s = compute_stats(&[debate(1, 1, (1976, 6, 3), &[&t2, &t19, &t300])], SdConvention::Population);
        assert_eq!(fmt2(s.words_per_utterance.mean), "107.00");
        assert_eq!(s.words_per_utterance.median, Some(19.0));
        assert_eq!(s.words_per_utterance.max, Some(300));
        assert!(s.to_csv().contains("\nall,1976-06-03,1976-06-03,1,3.00,107.00\n"));
    }

    #[test]
    fn empty_corpus() {
        let s = compute_stats(&[], SdConvention::Population);
        assert_eq!(s.n_debates, 0);
        assert!(s.legislatures.is_empty());
        assert_eq!(s.utterances_per_debate.mean, None);
        assert_eq!(s.words_per_utterance.median, None);
        assert_eq!(s.to_csv().lines().count(), 2);
        assert!(s.to_json().contains("\"note\""));
    }

    #[test]
    fn legislature_rows_and_duplicates() {
        let a = debate(1, 1, (1976, 6, 3), &["a b", "c"]);
        let b = debate(1, 2, (1977, 1, 10), &["a"]);
        let c = debate(2, 1, (1980, 11, 13), &["a b c d"]);
        let mut acc = StatsAccumulator::new();
        for d in [&a, &b, &c, &a] {
            acc.add(d);
        }
        assert_eq!(acc.duplicates(), 1);
        let s = acc.finalize(SdConvention::Population);
        assert_eq!(s.n_debates, 3);
        assert_eq!(s.legislatures.len(), 2);
        let l1 = &s.legislatures[0];
        assert_eq!((l1.start_date, l1.end_date), (a.meta.date, b.meta.date));
        assert_eq!(l1.mean_utterances_per_debate, 1.5);
        assert_eq!(l1.mean_words_per_utterance, Some(4.0 / 3.0));
        // medians come from raw distributions: per-debate counts {2, 1, 1}
        assert_eq!(s.utterances_per_debate.median, Some(1.0));
        assert_eq!(s.words_per_utterance.median, Some(1.5));
    }

    #[test]
    fn sd_conventions() {
        let mut h = Histogram::default();
        for v in [2, 4, 4, 4, 5, 5, 7, 9] {
            h.add(v);
        }
        assert_eq!(h.sd(SdConvention::Population), Some(2.0));
        assert!((h.sd(SdConvention::Sample).unwrap() - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        let mut one = Histogram::default();
        one.add(3);
        assert_eq!(one.sd(SdConvention::Sample), None);
        assert_eq!(one.sd(SdConvention::Population), Some(0.0));
    }

    #[test]
    fn overlapping_shards_are_rejected() {
        let a = debate(1, 1, (1976, 6, 3), &["x"]);
        let mut s1 = StatsAccumulator::new();
        s1.add(&a);
        let s2 = s1.clone();
        assert_eq!(s1.merge(s2), Err(StatsError::OverlappingShards(1, 1, 1)));
    }

    proptest! {
        #[test]
        fn shard_merge_equals_union(
            sizes in prop::collection::vec((1u32..4, 0usize..6), 0..12),
            split in any::<prop::sample::Index>(),
        ) {
            let corpus: Vec<AnnotatedDebate> = sizes
                .iter()
                .enumerate()
                .map(|(i, &(l, n))| {
                    let texts: Vec<String> = (0..n).map(|k| "w ".repeat(k * 3 + i % 5)).collect();
                    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
                    debate(l, i as u32 + 1, (1976 + i as i32, 1, 1), &refs)
                })
                .collect();
            let cut = if corpus.is_empty() { 0 } else { split.index(corpus.len() + 1) };
            let mut left = StatsAccumulator::new();
            corpus[..cut].iter().for_each(|d| { left.add(d); });
            let mut right = StatsAccumulator::new();
            corpus[cut..].iter().for_each(|d| { right.add(d); });
            let whole = compute_stats(&corpus, SdConvention::Population);
            let lr = left.clone().merge(right.clone()).unwrap().finalize(SdConvention::Population);
            let rl = right.merge(left).unwrap().finalize(SdConvention::Population);
            prop_assert_eq!(&lr, &whole);
            prop_assert_eq!(&rl, &whole);
        }
    }
}

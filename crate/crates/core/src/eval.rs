//! Crossing-brackets accuracy and corpus-level reporting.

use std::fmt;

use crate::treebank::Brackets;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    LengthMismatch { sentence: usize, candidate: usize, gold: usize },
    Empty,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { sentence, candidate, gold } => write!(
                f,
                "sentence {sentence}: candidate spans {candidate} tokens but gold spans {gold}"
            ),
            EvalError::Empty => write!(f, "no sentences to score"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Number of candidate spans that strictly overlap some gold span without
/// nesting. Labels are ignored; the count is over candidate spans.
pub fn crossings(candidate: &Brackets, gold: &Brackets) -> Result<usize, EvalError> {
    if candidate.tokens != gold.tokens {
        return Err(EvalError::LengthMismatch {
            sentence: 0,
            candidate: candidate.tokens,
            gold: gold.tokens,
        });
    }
    Ok(candidate
        .spans
        .iter()
        .filter(|(_, c1, c2)| {
            gold.spans
                .iter()
                .any(|(_, g1, g2)| (c1 < g1 && g1 < c2 && c2 < g2) || (g1 < c1 && c1 < g2 && g2 < c2))
        })
        .count())
}

/// Per-sentence scoring input: candidate and gold span sets, plus optional
/// parser run statistics.
#[derive(Debug, Clone)]
pub struct SentenceScore {
    pub candidate: Brackets,
    pub gold: Brackets,
    pub edges: Option<u64>,
    pub seconds: Option<f64>,
}

/// Corpus-level evaluation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub sentences: usize,
    /// Constituents pooled over all sentences.
    pub total_constituents: usize,
    pub non_crossing_constituents: usize,
    /// 100 x non-crossing / total, pooled corpus-wide.
    pub accuracy_pct: f64,
    /// Mean of per-sentence accuracies, for comparison with pooling.
    pub mean_sentence_accuracy_pct: f64,
    pub pct_zero_crossings: f64,
    pub pct_le1_crossings: f64,
    pub pct_le2_crossings: f64,
    pub mean_sentence_length: f64,
    pub mean_edges: Option<f64>,
    pub mean_seconds: Option<f64>,
}

/// Pools crossing statistics over candidate/gold pairs.
pub fn accuracy(results: &[SentenceScore]) -> Result<Report, EvalError> {
    if results.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut total = 0usize;
    let mut non_crossing = 0usize;
    let mut zero = 0usize;
    let mut le1 = 0usize;
    let mut le2 = 0usize;
    let mut length_sum = 0usize;
    let mut sentence_acc_sum = 0.0f64;
    for (ix, r) in results.iter().enumerate() {
        if r.candidate.tokens != r.gold.tokens {
            return Err(EvalError::LengthMismatch {
                sentence: ix + 1,
                candidate: r.candidate.tokens,
                gold: r.gold.tokens,
            });
        }
        let sentence_crossings = crossings(&r.candidate, &r.gold)?;
        let sentence_total = r.candidate.spans.len();
        total += sentence_total;
        non_crossing += sentence_total - sentence_crossings;
        if sentence_crossings == 0 {
            zero += 1;
        }
        if sentence_crossings <= 1 {
            le1 += 1;
        }
        if sentence_crossings <= 2 {
            le2 += 1;
        }
        length_sum += r.gold.tokens;
        sentence_acc_sum += if sentence_total == 0 {
            100.0
        } else {
            100.0 * (sentence_total - sentence_crossings) as f64 / sentence_total as f64
        };
    }
    let n = results.len() as f64;
    let mean_of = |xs: Vec<f64>| -> Option<f64> {
        if xs.len() == results.len() {
            Some(xs.iter().sum::<f64>() / n)
        } else {
            None
        }
    };
    Ok(Report {
        sentences: results.len(),
        total_constituents: total,
        non_crossing_constituents: non_crossing,
        accuracy_pct: if total == 0 { 100.0 } else { 100.0 * non_crossing as f64 / total as f64 },
        mean_sentence_accuracy_pct: sentence_acc_sum / n,
        pct_zero_crossings: 100.0 * zero as f64 / n,
        pct_le1_crossings: 100.0 * le1 as f64 / n,
        pct_le2_crossings: 100.0 * le2 as f64 / n,
        mean_sentence_length: length_sum as f64 / n,
        mean_edges: mean_of(results.iter().filter_map(|r| r.edges.map(|e| e as f64)).collect()),
        mean_seconds: mean_of(results.iter().filter_map(|r| r.seconds).collect()),
    })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<34} {}", "Sentences", self.sentences)?;
        writeln!(f, "{:<34} {:.2} words", "Average sentence length", self.mean_sentence_length)?;
        if let Some(s) = self.mean_seconds {
            writeln!(f, "{:<34} {:.3} sec", "Average processing time", s)?;
        }
        if let Some(e) = self.mean_edges {
            writeln!(f, "{:<34} {:.1}", "Average number of edges", e)?;
        }
        writeln!(f, "{:<34} {:.1}", "Accuracy (%)", self.accuracy_pct)?;
        writeln!(f, "{:<34} {:.2}%", "no-crossing sentences", self.pct_zero_crossings)?;
        writeln!(f, "{:<34} {:.2}%", "% of <= 1-crossing sentences", self.pct_le1_crossings)?;
        writeln!(f, "{:<34} {:.2}%", "% of <= 2-crossing sentences", self.pct_le2_crossings)?;
        Ok(())
    }
}

impl Report {
    /// Machine-readable `key=value` block.
    pub fn machine_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sentences={}\n", self.sentences));
        out.push_str(&format!("total_constituents={}\n", self.total_constituents));
        out.push_str(&format!("non_crossing_constituents={}\n", self.non_crossing_constituents));
        out.push_str(&format!("accuracy_pct={:.4}\n", self.accuracy_pct));
        out.push_str(&format!(
            "mean_sentence_accuracy_pct={:.4}\n",
            self.mean_sentence_accuracy_pct
        ));
        out.push_str(&format!("pct_zero_crossings={:.4}\n", self.pct_zero_crossings));
        out.push_str(&format!("pct_le1_crossings={:.4}\n", self.pct_le1_crossings));
        out.push_str(&format!("pct_le2_crossings={:.4}\n", self.pct_le2_crossings));
        out.push_str(&format!("mean_sentence_length={:.4}\n", self.mean_sentence_length));
        if let Some(e) = self.mean_edges {
            out.push_str(&format!("mean_edges={e:.4}\n"));
        }
        if let Some(s) = self.mean_seconds {
            out.push_str(&format!("mean_seconds={s:.6}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn brackets(tokens: usize, spans: &[(&str, usize, usize)]) -> Brackets {
        Brackets {
            tokens,
            spans: spans
                .iter()
                .map(|(l, a, b)| (l.to_string(), *a, *b))
                .collect::<BTreeSet<_>>(),
        }
    }

    #[test]
    fn identical_sets_have_zero_crossings() {
        let b = brackets(3, &[("S", 0, 3), ("NP", 0, 2)]);
        assert_eq!(crossings(&b, &b).unwrap(), 0);
    }

    #[test]
    fn strict_overlap_counts() {
        let c = brackets(5, &[("X", 0, 3)]);
        let g = brackets(5, &[("Y", 1, 4)]);
        assert_eq!(crossings(&c, &g).unwrap(), 1);
    }

    #[test]
    fn nesting_is_not_crossing() {
        let c = brackets(5, &[("X", 1, 3)]);
        let g = brackets(5, &[("Y", 0, 4)]);
        assert_eq!(crossings(&c, &g).unwrap(), 0);
        assert_eq!(crossings(&g, &c).unwrap(), 0);
    }

    #[test]
    fn mismatched_lengths_error() {
        let c = brackets(4, &[("X", 0, 3)]);
        let g = brackets(5, &[("Y", 1, 4)]);
        assert!(crossings(&c, &g).is_err());
    }

    #[test]
    fn perfect_corpus_scores_100() {
        let b = brackets(3, &[("S", 0, 3), ("NP", 0, 2)]);
        let results = vec![SentenceScore {
            candidate: b.clone(),
            gold: b,
            edges: None,
            seconds: None,
        }];
        let r = accuracy(&results).unwrap();
        assert_eq!(r.accuracy_pct, 100.0);
        assert_eq!(r.pct_zero_crossings, 100.0);
    }

    #[test]
    fn crossing_percentages_are_cumulative() {
        // Sentence A: 0 crossings; sentence B: 2 crossings.
        let gold = brackets(6, &[("S", 0, 6), ("A", 0, 3), ("B", 3, 6)]);
        let zero = gold.clone();
        let two = brackets(6, &[("S", 0, 6), ("X", 1, 4), ("Y", 2, 5)]);
        let results = vec![
            SentenceScore { candidate: zero, gold: gold.clone(), edges: None, seconds: None },
            SentenceScore { candidate: two, gold, edges: None, seconds: None },
        ];
        let r = accuracy(&results).unwrap();
        assert_eq!(r.pct_zero_crossings, 50.0);
        assert_eq!(r.pct_le1_crossings, 50.0);
        assert_eq!(r.pct_le2_crossings, 100.0);
        assert!(r.pct_zero_crossings <= r.pct_le1_crossings);
        assert!(r.pct_le1_crossings <= r.pct_le2_crossings);
    }

    #[test]
    fn pooled_accuracy_is_corpus_wide() {
        // A: 4/5 non-crossing; B: 6/10 non-crossing. Pooled: 10/15.
        let gold_a = brackets(8, &[("S", 0, 8), ("G", 2, 6)]);
        let mut spans_a: Vec<(&str, usize, usize)> = vec![("S", 0, 8), ("N1", 0, 2), ("N2", 2, 4), ("N3", 4, 6)];
        spans_a.push(("X", 1, 3)); // crosses G? 1<2<3<6 yes
        let cand_a = brackets(8, &spans_a);
        assert_eq!(crossings(&cand_a, &gold_a).unwrap(), 1);

        let gold_b = brackets(12, &[("S", 0, 12), ("G", 3, 9)]);
        let spans_b: Vec<(&str, usize, usize)> = vec![
            ("S", 0, 12),
            ("K1", 0, 3),
            ("K2", 3, 5),
            ("K3", 5, 7),
            ("K4", 7, 9),
            ("K5", 9, 12),
            ("C1", 2, 4),  // 2<3<4<9 crosses
            ("C2", 8, 10), // 3<8<9<10 crosses
            ("C3", 1, 5),  // crosses
            ("C4", 2, 7),  // crosses
        ];
        let cand_b = brackets(12, &spans_b);
        assert_eq!(crossings(&cand_b, &gold_b).unwrap(), 4);
        assert_eq!(cand_b.spans.len(), 10);

        let results = vec![
            SentenceScore { candidate: cand_a, gold: gold_a, edges: None, seconds: None },
            SentenceScore { candidate: cand_b, gold: gold_b, edges: None, seconds: None },
        ];
        let r = accuracy(&results).unwrap();
        assert_eq!(r.total_constituents, 15);
        assert_eq!(r.non_crossing_constituents, 10);
        assert!((r.accuracy_pct - 100.0 * 10.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn accuracy_is_permutation_invariant() {
        let gold = brackets(6, &[("S", 0, 6), ("A", 0, 3)]);
        let cand = brackets(6, &[("S", 0, 6), ("X", 2, 4)]);
        let a = SentenceScore { candidate: cand.clone(), gold: gold.clone(), edges: None, seconds: None };
        let b = SentenceScore { candidate: gold.clone(), gold: gold.clone(), edges: None, seconds: None };
        let r1 = accuracy(&[a.clone(), b.clone()]).unwrap();
        let r2 = accuracy(&[b, a]).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn report_formats_both_ways() {
        let b = brackets(3, &[("S", 0, 3)]);
        let results = vec![SentenceScore {
            candidate: b.clone(),
            gold: b,
            edges: Some(42),
            seconds: Some(0.5),
        }];
        let r = accuracy(&results).unwrap();
        let text = r.to_string();
        assert!(text.contains("Accuracy (%)"));
        assert!(text.contains("no-crossing sentences"));
        let block = r.machine_block();
        assert!(block.contains("accuracy_pct=100.0000"));
        assert!(block.contains("mean_edges=42.0000"));
    }
}

//! Binary classification metrics.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Scores in `[0, 1]` paired with 0/1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredLabels {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl ScoredLabels {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::invalid("no scores"));
        }
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: scores.len(),
                found: labels.len(),
            });
        }
        if scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::invalid("scores must lie in [0, 1]"));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::invalid("labels must be 0 or 1"));
        }
        Ok(ScoredLabels { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    fn class_counts(&self) -> Result<(usize, usize)> {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        let neg = self.labels.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::invalid("ROC analysis needs both classes present"));
        }
        Ok((pos, neg))
    }
}

/// Fraction of rows where `score >= threshold` agrees with the label.
pub fn accuracy(s: &ScoredLabels, threshold: f64) -> f64 {
    let hits = s
        .scores
        .iter()
        .zip(&s.labels)
        .filter(|(&score, &label)| (score >= threshold) == (label == 1))
        .count();
    hits as f64 / s.scores.len() as f64
}

/// ROC points `(fpr, tpr)`, one per distinct score threshold, from `(0, 0)` to `(1, 1)`.
pub fn roc_curve(s: &ScoredLabels) -> Result<Vec<(f64, f64)>> {
    let (pos, neg) = s.class_counts()?;
    let mut order: Vec<usize> = (0..s.scores.len()).collect();
    order.sort_by(|&a, &b| s.scores[b].total_cmp(&s.scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let score = s.scores[order[i]];
        while i < order.len() && s.scores[order[i]] == score {
            if s.labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(points)
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann-Whitney U / (n_pos * n_neg)).
pub fn auc(s: &ScoredLabels) -> Result<f64> {
    let (pos, neg) = s.class_counts()?;
    let mut order: Vec<usize> = (0..s.scores.len()).collect();
    order.sort_by(|&a, &b| s.scores[a].total_cmp(&s.scores[b]));
    // midranks, 1-based
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && s.scores[order[j]] == s.scores[order[i]] {
            j += 1;
        }
        let mid = (i + 1 + j) as f64 / 2.0;
        rank_sum_pos += mid * order[i..j].iter().filter(|&&k| s.labels[k] == 1).count() as f64;
        i = j;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Trapezoidal area under a ROC polyline.
pub fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

pub fn roc_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (f, t) in points {
        out.push_str(&format!("{f},{t}\n"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub accuracy: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTables {
    pub accuracy_csv: String,
    pub auc_csv: String,
}

/// Square class-by-class tables (one per metric) for pairwise experiments.
/// A result for `(a, b)` fills both `(a, b)` and `(b, a)`; the diagonal and
/// pairs without a result stay empty.
pub fn pairwise_table(results: &BTreeMap<(String, String), PairMetrics>) -> PairwiseTables {
    let classes: Vec<&str> = results
        .keys()
        .flat_map(|(a, b)| [a.as_str(), b.as_str()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lookup = |a: &str, b: &str| {
        results
            .get(&(a.to_string(), b.to_string()))
            .or_else(|| results.get(&(b.to_string(), a.to_string())))
    };
    let render = |metric: fn(&PairMetrics) -> f64| {
        let mut out = String::from("class");
        for c in &classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for a in &classes {
            out.push_str(a);
            for b in &classes {
                out.push(',');
                if a != b {
                    if let Some(m) = lookup(a, b) {
                        out.push_str(&metric(m).to_string());
                    }
                }
            }
            out.push('\n');
        }
        out
    };
    PairwiseTables {
        accuracy_csv: render(|m| m.accuracy),
        auc_csv: render(|m| m.auc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl(scores: &[f64], labels: &[u8]) -> ScoredLabels {
        ScoredLabels::new(scores.to_vec(), labels.to_vec()).unwrap()
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&sl(&[0.6, 0.4], &[1, 0]), 0.5), 1.0);
        assert_eq!(accuracy(&sl(&[0.0, 1.0, 0.2], &[1, 0, 1]), 0.5), 0.0);
        assert_eq!(accuracy(&sl(&[0.9, 0.2, 0.6, 0.4], &[1, 0, 0, 1]), 0.5), 0.5);
        // boundary counts as positive
        assert_eq!(accuracy(&sl(&[0.5], &[1]), 0.5), 1.0);
    }

    #[test]
    fn validation() {
        assert!(ScoredLabels::new(vec![], vec![]).is_err());
        assert!(ScoredLabels::new(vec![0.2], vec![0, 1]).is_err());
        assert!(ScoredLabels::new(vec![1.2], vec![0]).is_err());
        assert!(ScoredLabels::new(vec![0.2], vec![2]).is_err());
        let one_class = sl(&[0.1, 0.7], &[1, 1]);
        assert!(roc_curve(&one_class).is_err());
        assert!(auc(&one_class).is_err());
    }

    #[test]
    fn roc_examples() {
        let s = sl(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]);
        assert_eq!(
            roc_curve(&s).unwrap(),
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
        let flat = sl(&[0.3; 4], &[0, 1, 0, 1]);
        assert_eq!(roc_curve(&flat).unwrap(), vec![(0.0, 0.0), (1.0, 1.0)]);
        let sep = sl(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        assert!(roc_curve(&sep).unwrap().contains(&(0.0, 1.0)));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&sl(&[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1])).unwrap(), 0.75);
        assert_eq!(auc(&sl(&[0.1, 0.4, 0.35, 0.8], &[1, 1, 0, 0])).unwrap(), 0.25);
        assert_eq!(auc(&sl(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0])).unwrap(), 1.0);
        assert_eq!(auc(&sl(&[0.3; 4], &[0, 1, 0, 1])).unwrap(), 0.5);
    }

    #[test]
    fn random_scores_give_chance_auc() {
        use rand::Rng as _;
        let mut rng = crate::rng::seeded(99, 0);
        let n = 10_000;
        let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let a = auc(&ScoredLabels::new(scores, labels).unwrap()).unwrap();
        assert!((0.47..=0.53).contains(&a), "{a}");
    }

    #[test]
    fn roc_csv_format() {
        assert_eq!(roc_to_csv(&[(0.0, 0.0), (0.5, 1.0)]), "fpr,tpr\n0,0\n0.5,1\n");
    }

    #[test]
    fn pairwise_two_classes() {
        let mut r = BTreeMap::new();
        r.insert(("1993".to_string(), "1994".to_string()), PairMetrics { accuracy: 0.8, auc: 0.9 });
        let t = pairwise_table(&r);
        assert_eq!(t.accuracy_csv, "class,1993,1994\n1993,,0.8\n1994,0.8,\n");
        assert_eq!(t.auc_csv, "class,1993,1994\n1993,,0.9\n1994,0.9,\n");
    }

    #[test]
    fn pairwise_missing_and_full() {
        let m = |a: f64| PairMetrics { accuracy: a, auc: a };
        let mut r = BTreeMap::new();
        r.insert(("a".to_string(), "b".to_string()), m(0.1));
        r.insert(("b".to_string(), "c".to_string()), m(0.2));
        let t = pairwise_table(&r);
        assert_eq!(t.accuracy_csv, "class,a,b,c\na,,0.1,\nb,0.1,,0.2\nc,,0.2,\n");

        r.insert(("a".to_string(), "c".to_string()), m(0.3));
        let t = pairwise_table(&r);
        let filled: usize = t
            .auc_csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').skip(1).filter(|c| !c.is_empty()).count())
            .sum();
        // 3 distinct pairs, each shown on both sides of the diagonal
        assert_eq!(filled, 6);
    }

    proptest! {
        #[test]
        fn auc_matches_trapezoid(
            scores in prop::collection::vec(0u8..20, 4..60),
            flips in prop::collection::vec(any::<bool>(), 60),
        ) {
            let n = scores.len();
            let mut labels: Vec<u8> = flips[..n].iter().map(|&b| b as u8).collect();
            labels[0] = 0;
            labels[1] = 1;
            let s = ScoredLabels::new(scores.iter().map(|&v| f64::from(v) / 19.0).collect(), labels).unwrap();
            let a = auc(&s).unwrap();
            prop_assert!((a - trapezoid_area(&roc_curve(&s).unwrap())).abs() < 1e-12);
        }

        #[test]
        fn auc_invariant_under_monotone_transform(
            scores in prop::collection::vec(0.0f64..1.0, 6..40),
        ) {
            let labels: Vec<u8> = (0..scores.len()).map(|i| (i % 2) as u8).collect();
            let a = auc(&ScoredLabels::new(scores.clone(), labels.clone()).unwrap()).unwrap();
            let squashed: Vec<f64> = scores.iter().map(|v| v.powi(3)).collect();
            let b = auc(&ScoredLabels::new(squashed, labels).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

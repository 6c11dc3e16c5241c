use crate::scalar::Real;

/// A non-ignored detection after matching: its score and whether it was a
/// true positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredFlag<T: Real> {
    pub score: T,
    pub tp: bool,
}

/// Interpolated average precision.
///
/// Flags are ranked by descending score (stable, so equal scores keep their
/// input order). The precision envelope is made non-increasing from the
/// right and sampled at `interp_points` evenly spaced recall levels in
/// `[0, 1]`; each sample takes the envelope at the first rank whose recall
/// reaches the level, or 0 if none does.
///
/// Returns `None` when there is nothing to score (`n_gt == 0`, no flags)
/// and `Some(0)` when detections exist but no ground truth does.
pub fn average_precision<T: Real>(flags: &[ScoredFlag<T>], n_gt: usize, interp_points: usize) -> Option<T> {
    if n_gt == 0 {
        return if flags.is_empty() { None } else { Some(T::zero()) };
    }
    if flags.is_empty() || interp_points == 0 {
        return Some(T::zero());
    }
    let order = super::matching::score_order(&flags.iter().map(|f| f.score).collect::<Vec<_>>());

    let n_gt_t = T::lit(n_gt as f64);
    let mut recall = Vec::with_capacity(order.len());
    let mut precision = Vec::with_capacity(order.len());
    let mut tp = 0usize;
    for (rank, &i) in order.iter().enumerate() {
        if flags[i].tp {
            tp += 1;
        }
        recall.push(T::lit(tp as f64) / n_gt_t);
        precision.push(T::lit(tp as f64) / T::lit((rank + 1) as f64));
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        if precision[i + 1] > precision[i] {
            precision[i] = precision[i + 1];
        }
    }

    let steps = interp_points.saturating_sub(1).max(1);
    let mut sum = T::zero();
    let mut cursor = 0usize;
    for j in 0..interp_points {
        let level = T::lit(j as f64) / T::lit(steps as f64);
        while cursor < recall.len() && recall[cursor] < level {
            cursor += 1;
        }
        if cursor < recall.len() {
            sum += precision[cursor];
        }
    }
    Some(sum / T::lit(interp_points as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(seq: &[bool]) -> Vec<ScoredFlag<f64>> {
        seq.iter()
            .enumerate()
            .map(|(i, &tp)| ScoredFlag { score: 1.0 - i as f64 * 0.1, tp })
            .collect()
    }

    /// Independent reference: evaluate interpolated precision at each recall
    /// level directly from its definition (max precision over ranks whose
    /// recall reaches the level).
    fn reference_ap(seq: &[bool], n_gt: usize, points: usize) -> f64 {
        let mut total = 0.0;
        for j in 0..points {
            let level = j as f64 / (points - 1) as f64;
            let mut best: f64 = 0.0;
            let mut tp = 0;
            for (rank, &hit) in seq.iter().enumerate() {
                tp += hit as usize;
                let r = tp as f64 / n_gt as f64;
                let p = tp as f64 / (rank + 1) as f64;
                if r >= level {
                    best = best.max(p);
                }
            }
            total += best;
        }
        total / points as f64
    }

    #[test]
    fn perfect_ranking_is_one() {
        assert_eq!(average_precision(&flags(&[true, true, true]), 3, 101), Some(1.0));
    }

    #[test]
    fn only_false_positives_is_zero() {
        assert_eq!(average_precision(&flags(&[false, false]), 2, 101), Some(0.0));
    }

    #[test]
    fn no_ground_truth() {
        assert_eq!(average_precision(&flags(&[false]), 0, 101), Some(0.0));
        assert_eq!(average_precision::<f64>(&[], 0, 101), None);
        assert_eq!(average_precision::<f64>(&[], 4, 101), Some(0.0));
    }

    #[test]
    fn tp_fp_tp_hand_walk() {
        // envelope 1 for recall <= 0.5 (51 levels), 2/3 above (50 levels)
        let expected = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
        let got = average_precision(&flags(&[true, false, true]), 2, 101).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.834983498349835).abs() < 1e-12);
        assert!((reference_ap(&[true, false, true], 2, 101) - expected).abs() < 1e-12);
    }

    #[test]
    fn matches_reference_on_all_short_sequences() {
        for len in 1..=8usize {
            for bits in 0u32..(1 << len) {
                let seq: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
                let tps = seq.iter().filter(|&&b| b).count();
                for n_gt in tps.max(1)..=tps + 2 {
                    let got = average_precision(&flags(&seq), n_gt, 101).unwrap();
                    let want = reference_ap(&seq, n_gt, 101);
                    assert!((got - want).abs() < 1e-12, "{seq:?} n_gt={n_gt}");
                }
            }
        }
    }

    #[test]
    fn invariant_under_positive_rescaling() {
        let base = vec![
            ScoredFlag { score: 0.3, tp: true },
            ScoredFlag { score: 0.9, tp: false },
            ScoredFlag { score: 0.6, tp: true },
            ScoredFlag { score: 0.6, tp: false },
        ];
        let scaled: Vec<_> = base.iter().map(|f| ScoredFlag { score: f.score * 7.5, tp: f.tp }).collect();
        assert_eq!(average_precision(&base, 3, 101), average_precision(&scaled, 3, 101));
    }
}

use crate::error::{Error, Result};

/// Area under the ROC curve via the Mann–Whitney statistic.
///
/// Scores are ranked once (ties share their average rank), so the result
/// equals `(correctly ordered pairs + 0.5 · tied pairs) / (P · N)`.
pub fn auc_roc(labels: &[bool], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::ShapeMismatch {
            op: "auc_roc",
            left: vec![labels.len()],
            right: vec![scores.len()],
        });
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::InvalidArgument(format!("score {i} is NaN")));
    }
    let positives = labels.iter().filter(|l| **l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidArgument(format!(
            "AUC is undefined with {positives} positive and {negatives} negative labels"
        )));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the rank sum of positives keeps tied (half-integer) ranks exact
    let mut rank_sum_x2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 averaged: (i + j + 2) / 2
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k]).count() as u128;
        rank_sum_x2 += pos_in_group * (i + j + 2) as u128;
        i = j + 1;
    }
    let p = positives as u128;
    let u_x2 = rank_sum_x2 - p * (p + 1);
    Ok(u_x2 as f64 / (2 * positives * negatives) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_inverted() {
        let labels = [false, false, true, true];
        assert_eq!(auc_roc(&labels, &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(auc_roc(&[true, false], &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn all_ties_give_one_half() {
        assert_eq!(auc_roc(&[false, true, false, true], &[0.4; 4]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(auc_roc(&[true, true], &[0.1, 0.2]).is_err());
        assert!(auc_roc(&[false], &[0.1]).is_err());
        assert!(auc_roc(&[false, true], &[0.1]).is_err());
    }

    #[test]
    fn partial_ties() {
        // pairs (pos, neg): (0.5,0.5) tie, (0.5,0.1) win, (0.9,0.5) win, (0.9,0.1) win
        let a = auc_roc(&[true, false, true, false], &[0.5, 0.5, 0.9, 0.1]).unwrap();
        assert_eq!(a, 3.5 / 4.0);
    }
}

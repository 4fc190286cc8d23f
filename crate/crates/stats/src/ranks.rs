//! Ranking with average ranks for ties.

use crate::TIE_EPS;

/// 1-based ranks of `values` (ascending); tied values share the mean of
/// the ranks they span. Also returns the sizes of every tie group.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && (values[order[end]] - values[order[start]]).abs() <= TIE_EPS {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

/// Σ(t³ − t) over tie groups.
pub fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]).0, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn ties_share_average() {
        let (r, t) = average_ranks(&[1.0, 2.0, 2.0, 3.0, 2.0]);
        assert_eq!(r, vec![1.0, 3.0, 3.0, 5.0, 3.0]);
        assert_eq!(t, vec![3]);
        assert_eq!(tie_sum(&t), 24.0);
    }
}

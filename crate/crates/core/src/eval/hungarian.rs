//! Minimum-cost perfect assignment on a square cost matrix (Hungarian
//! method, shortest augmenting paths with row/column potentials, O(n³)).

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("cost matrix is empty")]
    Empty,
    #[error("cost matrix must be square, row {row} has {len} entries for {n} rows")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("cost matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T: Real> {
    /// `row_to_col[i]` is the column assigned to row `i`.
    pub row_to_col: Vec<usize>,
    /// Sum of the assigned costs, accumulated in row order.
    pub cost: T,
}

pub fn hungarian_assign<T: Real>(cost: &[Vec<T>]) -> Result<Assignment<T>, AssignmentError> {
    let n = cost.len();
    if n == 0 {
        return Err(AssignmentError::Empty);
    }
    for (row, r) in cost.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare { row, len: r.len(), n });
        }
        if let Some(col) = r.iter().position(|v| !v.is_finite()) {
            return Err(AssignmentError::NonFinite { row, col });
        }
    }

    let inf = T::max_value().unwrap_or_else(|| T::lit(f64::MAX));
    // 1-based bookkeeping; index 0 is the virtual source column.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    let total = row_to_col
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &j)| acc + cost[i][j]);
    Ok(Assignment {
        row_to_col,
        cost: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_zero_matrix() {
        let cost: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let a = hungarian_assign(&cost).unwrap();
        assert_eq!(a.row_to_col, vec![0, 1, 2, 3, 4]);
        assert_eq!(a.cost, 0.0);
    }

    #[test]
    fn two_by_two() {
        let a = hungarian_assign(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(a.row_to_col, vec![0, 1]);
        assert_eq!(a.cost, 2.0);
        let b = hungarian_assign(&[vec![3.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(b.row_to_col, vec![1, 0]);
    }

    #[test]
    fn single_and_negative_entries() {
        assert_eq!(hungarian_assign(&[vec![-4.5]]).unwrap().cost, -4.5);
        let a = hungarian_assign(&[vec![-1.0, 0.0], vec![0.0, -3.0]]).unwrap();
        assert_eq!(a.cost, -4.0);
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(hungarian_assign::<f64>(&[]), Err(AssignmentError::Empty));
        assert!(matches!(
            hungarian_assign(&[vec![1.0, 2.0], vec![1.0]]),
            Err(AssignmentError::NotSquare { .. })
        ));
        assert!(matches!(
            hungarian_assign(&[vec![f64::NAN]]),
            Err(AssignmentError::NonFinite { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let a = hungarian_assign(&[vec![4.0f32, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]]).unwrap();
        assert_eq!(a.cost, 5.0);
    }
}

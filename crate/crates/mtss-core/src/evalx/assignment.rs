//! Minimum-cost perfect assignment on a square cost matrix: the O(n^3)
//! Hungarian algorithm with row/column potentials and augmenting paths.
//! Used above the exhaustive-search cutoffs; small instances are checked
//! against brute force in tests.

/// Solve min-cost perfect assignment. `cost` must be square and finite.
/// Returns `perm` with `perm[row] = column`.
pub fn solve_min_cost(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|row| row.len() == n), "matrix must be square");

    // potentials and matching use 1-based indexing with a dummy 0 slot
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    // way[j]: previous column on the alternating path to column j
    let mut match_by_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        match_by_col[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = match_by_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let slack = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[match_by_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if match_by_col[j0] == 0 {
                break;
            }
        }
        // augment along the path back to the start
        loop {
            let j1 = way[j0];
            match_by_col[j0] = match_by_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        if match_by_col[j] > 0 {
            perm[match_by_col[j] - 1] = j - 1;
        }
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(cost: &[Vec<f64>], perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
    }

    fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, cost, &mut best);
        best
    }

    fn permute(perm: &mut Vec<usize>, k: usize, cost: &[Vec<f64>], best: &mut f64) {
        if k == perm.len() {
            let t = total(cost, perm);
            if t < *best {
                *best = t;
            }
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(perm, k + 1, cost, best);
            perm.swap(k, i);
        }
    }

    #[test]
    fn known_matrix() {
        let cost = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let perm = solve_min_cost(&cost);
        assert_eq!(total(&cost, &perm), 5.0); // 1 + 2 + 2
    }

    #[test]
    fn empty_and_single() {
        assert!(solve_min_cost(&[]).is_empty());
        assert_eq!(solve_min_cost(&[vec![7.0]]), vec![0]);
    }

    #[test]
    fn matches_brute_force_on_pseudorandom_matrices() {
        let mut x = 42u64;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 33) % 1000) as f64 / 100.0
        };
        for n in 1..=7usize {
            for _ in 0..20 {
                let cost: Vec<Vec<f64>> =
                    (0..n).map(|_| (0..n).map(|_| next()).collect()).collect();
                let perm = solve_min_cost(&cost);
                // perm is a permutation
                let mut seen = vec![false; n];
                for &j in &perm {
                    assert!(!seen[j]);
                    seen[j] = true;
                }
                assert!((total(&cost, &perm) - brute_force_min(&cost)).abs() < 1e-9);
            }
        }
    }
}

//! Transposition distance from a local optimum of the jump benchmark to the
//! nearest good local optimum, by breadth-first search over all of `S_n`.

use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::perm::{check_jump_parameter, factorial, is_good_cycle_type, Permutation};

/// Largest `n` accepted by the searches here.
pub const MAX_BFS_N: usize = 8;

fn check(n: usize, m: usize) -> Result<()> {
    if n > MAX_BFS_N {
        return Err(Error::TooLarge(format!("BFS over S_n is limited to n <= {MAX_BFS_N}, got {n}")));
    }
    check_jump_parameter(n, m)
}

fn is_good_word(word: &[u32], m: usize) -> bool {
    let p = Permutation::from_zero_based_unchecked(word.to_vec());
    p.fixed_point_count() + m == word.len() && is_good_cycle_type(&p.nontrivial_cycle_lengths(), m)
}

/// Fewest transpositions turning `σ` into a good local optimum.
pub fn good_distance_bfs(sigma: &Permutation, m: usize) -> Result<u32> {
    let n = sigma.size();
    check(n, m)?;
    if sigma.fixed_point_count() + m != n {
        return Err(invalid(format!("{sigma} is not a local optimum for m = {m}")));
    }
    let mut dist = vec![u32::MAX; factorial(n)];
    let mut queue = VecDeque::new();
    dist[sigma.lex_rank()] = 0;
    queue.push_back(sigma.as_zero_based().to_vec());
    while let Some(word) = queue.pop_front() {
        let here = dist[Permutation::from_zero_based_unchecked(word.clone()).lex_rank()];
        if is_good_word(&word, m) {
            return Ok(here);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut next = word.clone();
                next.swap(i, j);
                let r = Permutation::from_zero_based_unchecked(next.clone()).lex_rank();
                if dist[r] == u32::MAX {
                    dist[r] = here + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    // Good local optima exist whenever 2 <= m <= n.
    unreachable!("no good local optimum reachable")
}

/// Distance to the nearest good local optimum for every permutation, by
/// lexicographic rank: one search started from all good ones at once.
pub fn good_distance_table(n: usize, m: usize) -> Result<Vec<u32>> {
    check(n, m)?;
    let mut dist = vec![u32::MAX; factorial(n)];
    let mut queue = VecDeque::new();
    for p in Permutation::all(n) {
        if is_good_word(p.as_zero_based(), m) {
            dist[p.lex_rank()] = 0;
            queue.push_back(p.into_zero_based());
        }
    }
    while let Some(word) = queue.pop_front() {
        let here = dist[Permutation::from_zero_based_unchecked(word.clone()).lex_rank()];
        for i in 0..n {
            for j in i + 1..n {
                let mut next = word.clone();
                next.swap(i, j);
                let r = Permutation::from_zero_based_unchecked(next.clone()).lex_rank();
                if dist[r] == u32::MAX {
                    dist[r] = here + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn good_start_is_zero() {
        let sigma = Permutation::from_one_based(&[2, 1, 4, 3, 5, 6]).unwrap();
        assert_eq!(good_distance_bfs(&sigma, 4).unwrap(), 0);
    }

    #[test]
    fn four_cycle_splits_in_one() {
        let sigma = Permutation::from_one_based(&[2, 3, 4, 1, 5, 6]).unwrap();
        assert_eq!(good_distance_bfs(&sigma, 4).unwrap(), 1);
    }

    #[test]
    fn single_source_agrees_with_table() {
        let table = good_distance_table(6, 5).unwrap();
        for p in Permutation::all(6).filter(|p| p.fixed_point_count() == 1) {
            assert_eq!(good_distance_bfs(&p, 5).unwrap(), table[p.lex_rank()]);
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            good_distance_bfs(&Permutation::identity(9), 3),
            Err(Error::TooLarge(_))
        ));
        assert!(good_distance_bfs(&Permutation::identity(5), 3).is_err());
    }
}

//! Degree bookkeeping: Koszul signs, shuffles and the décalage sign.
//!
//! A permutation of `n` items is a slice `perm` with `perm[k]` the index of
//! the original item that ends up in position `k`; applying it to
//! `(x_0, …, x_{n-1})` yields `(x_{perm[0]}, …, x_{perm[n-1]})`. All sign
//! computations in the crate go through the three functions
//! [`koszul_sign`], [`unshuffles`] and [`decalage_sign`].

use crate::error::{Error, Result};

/// Degrees of the arguments of a multilinear expression, in argument order.
pub type DegreeVector = Vec<i64>;

/// `+1` for an even exponent, `-1` for an odd one.
pub fn parity_sign(exponent: i64) -> i32 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::Argument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Sign of the even representation of the symmetric group.
///
/// Reorders `x_0 ⊗ … ⊗ x_{n-1}` into `x_{perm[0]} ⊗ … ⊗ x_{perm[n-1]}` by
/// adjacent transpositions in bubble-sort order; swapping neighbours `a`,
/// `b` contributes `(-1)^{|a||b|}` with degrees read from `degs`.
pub fn koszul_sign(perm: &[usize], degs: &[i64]) -> Result<i32> {
    if perm.len() != degs.len() {
        return Err(Error::Argument(format!(
            "permutation of length {} against {} degrees",
            perm.len(),
            degs.len()
        )));
    }
    check_permutation(perm)?;
    let mut work = perm.to_vec();
    let mut sign = 1;
    for pass in 0..work.len() {
        for k in 0..work.len().saturating_sub(pass + 1) {
            if work[k] > work[k + 1] {
                sign *= parity_sign(degs[work[k]] * degs[work[k + 1]]);
                work.swap(k, k + 1);
            }
        }
    }
    Ok(sign)
}

/// Applies `perm` to a sequence: `result[k] = items[perm[k]]`.
pub fn apply_permutation<T: Clone>(perm: &[usize], items: &[T]) -> Vec<T> {
    perm.iter().map(|&p| items[p].clone()).collect()
}

/// The permutation obtained by first applying `first` and then `then` to
/// the result, so that `apply(compose(first, then), x) =
/// apply(then, apply(first, x))`.
pub fn compose(first: &[usize], then: &[usize]) -> Vec<usize> {
    then.iter().map(|&k| first[k]).collect()
}

/// All `(r,s)`-unshuffles: permutations whose first `r` and last `s`
/// entries are increasing, listed in lexicographic order of the first block.
pub fn unshuffles(r: usize, s: usize) -> Vec<Vec<usize>> {
    multi_unshuffles(&[r, s])
}

/// Permutations of `Σ sizes` items that are increasing on each consecutive
/// block of the given sizes, in lexicographic order of the blocks.
pub fn multi_unshuffles(sizes: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = sizes.iter().sum();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fill_blocks(sizes, 0, &mut used, &mut current, &mut out);
    out
}

fn fill_blocks(
    sizes: &[usize],
    block: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if block == sizes.len() {
        out.push(current.clone());
        return;
    }
    choose_in_block(sizes, block, sizes[block], 0, used, current, out);
}

fn choose_in_block(
    sizes: &[usize],
    block: usize,
    remaining: usize,
    start: usize,
    used: &mut Vec<bool>,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        fill_blocks(sizes, block + 1, used, current, out);
        return;
    }
    for k in start..used.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        current.push(k);
        choose_in_block(sizes, block, remaining - 1, k + 1, used, current, out);
        current.pop();
        used[k] = false;
    }
}

/// All permutations of `n` items in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    multi_unshuffles(&vec![1; n])
}

/// The décalage sign `(-1)^{Σ_i (n-i)|x_i|}` (positions counted from 1).
pub fn decalage_sign(degs: &[i64]) -> i32 {
    let n = degs.len() as i64;
    let exponent: i64 = degs
        .iter()
        .enumerate()
        .map(|(i, d)| (n - 1 - i as i64) * d)
        .sum();
    parity_sign(exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 3, 5]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        // the cycle sending position k to item k+1: (x2, x3, x1)
        assert_eq!(koszul_sign(&[1, 2, 0], &[1, 1, 0]).unwrap(), -1);
    }

    #[test]
    fn koszul_rejects_bad_input() {
        assert!(koszul_sign(&[0, 1], &[1]).is_err());
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
    }

    #[test]
    fn koszul_is_a_homomorphism() {
        for n in 0..=5usize {
            let perms = permutations(n);
            let degs: Vec<i64> = (0..n as i64).map(|k| k * 3 % 4 - 1).collect();
            for tau in &perms {
                let tau_degs = apply_permutation(tau, &degs);
                for sigma in &perms {
                    let both = compose(tau, sigma);
                    let lhs = koszul_sign(&both, &degs).unwrap();
                    let rhs =
                        koszul_sign(sigma, &tau_degs).unwrap() * koszul_sign(tau, &degs).unwrap();
                    assert_eq!(lhs, rhs, "sigma={sigma:?} tau={tau:?}");
                }
            }
        }
    }

    #[test]
    fn even_degrees_give_plus_one() {
        for perm in permutations(4) {
            assert_eq!(koszul_sign(&perm, &[0, 2, -2, 4]).unwrap(), 1);
        }
    }

    #[test]
    fn koszul_matches_inversion_count_oracle() {
        // independent route: product over inverted pairs
        for perm in permutations(5) {
            let degs = [1, 0, 1, 1, 2];
            let mut expected = 1;
            for a in 0..5 {
                for b in a + 1..5 {
                    if perm[a] > perm[b] {
                        expected *= parity_sign(degs[perm[a]] * degs[perm[b]]);
                    }
                }
            }
            assert_eq!(koszul_sign(&perm, &degs).unwrap(), expected);
        }
    }

    #[test]
    fn unshuffle_examples() {
        assert_eq!(unshuffles(0, 3), vec![vec![0, 1, 2]]);
        assert_eq!(unshuffles(1, 1), vec![vec![0, 1], vec![1, 0]]);
        let brute: Vec<Vec<usize>> = permutations(4)
            .into_iter()
            .filter(|p| p[0] < p[1] && p[2] < p[3])
            .collect();
        assert_eq!(unshuffles(2, 2), brute);
        assert_eq!(brute.len(), 6);
    }

    #[test]
    fn unshuffle_counts() {
        for n in 0..=8 {
            for r in 0..=n {
                assert_eq!(unshuffles(r, n - r).len(), binomial(n, r));
            }
        }
    }

    #[test]
    fn decalage_examples() {
        assert_eq!(decalage_sign(&[7]), 1);
        assert_eq!(decalage_sign(&[1, 0]), -1);
        assert_eq!(decalage_sign(&[2, 2]), 1);
    }
}

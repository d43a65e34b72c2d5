//! Exact linear algebra over the rationals. Systems are solved by
//! multi-modular elimination; leading minors use fraction-free (Bareiss)
//! elimination on an integer-scaled copy of the matrix.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::rational::{self, Rational};

/// Elimination hit an all-zero pivot column at step `step` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Singular {
    pub step: usize,
}

/// Scales every row of `[a | b]` to integers.
fn integer_rows(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Vec<BigInt>> {
    a.iter()
        .zip(b)
        .map(|(row, rhs)| {
            let d = rational::common_denominator(row.iter().chain(std::iter::once(rhs)));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|v| rational::scale_to_integer(v, &d))
                .collect()
        })
        .collect()
}

/// Solves `a·x = b` exactly.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, Singular> {
    let n = a.len();
    assert_eq!(b.len(), n);
    assert!(a.iter().all(|r| r.len() == n), "square system expected");
    let m = integer_rows(a, b);
    let ai: Vec<Vec<BigInt>> = m.iter().map(|r| r[..n].to_vec()).collect();
    let bi: Vec<BigInt> = m.iter().map(|r| r[n].clone()).collect();
    let (y, d) = solve_integer(&ai, &bi)?;
    Ok(y.into_iter().map(|v| Rational::new(v, d.clone())).collect())
}

/// Solves an integer system `a·y = d·b` with `d = det(a)`, so that the
/// rational solution is `y/d`. No gcds are taken, which matters when the
/// entries run to thousands of bits.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<(Vec<BigInt>, BigInt), Singular> {
    crate::modular::solve_integer(a, b).map_err(|step| Singular { step })
}

/// Leading principal minors `det(a[..k, ..k])` for `k = 1..=n`, by Bareiss
/// elimination without pivoting. Stops after the first vanishing minor.
pub fn leading_minors(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    // scale all of `a` by one common denominator so minors rescale uniformly
    let d = rational::common_denominator(a.iter().flatten());
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|v| rational::scale_to_integer(v, &d)).collect())
        .collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::from(1);
    let mut d_pow = Rational::from_integer(1.into());
    let d_rat = Rational::from_integer(d.clone());
    for k in 0..n {
        d_pow = &d_pow * &d_rat;
        minors.push(Rational::from_integer(m[k][k].clone()) / &d_pow);
        if m[k][k].is_zero() {
            break;
        }
        let (head, tail) = m.split_at_mut(k + 1);
        let pivot_row = &head[k];
        tail.par_iter_mut().for_each(|row| {
            let factor = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        });
        prev = m[k][k].clone();
    }
    minors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mat(rows: &[&[Rational]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn solves_small_system() {
        let a = mat(&[&[int(2), int(1)], &[int(1), int(3)]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
    }

    #[test]
    fn needs_pivoting() {
        let a = mat(&[&[int(0), int(1)], &[ratio(1, 2), int(0)]]);
        let x = solve(&a, &[int(7), int(1)]).unwrap();
        assert_eq!(x, vec![int(2), int(7)]);
    }

    #[test]
    fn reports_singularity() {
        let a = mat(&[&[int(1), int(2)], &[int(2), int(4)]]);
        assert_eq!(solve(&a, &[int(1), int(1)]), Err(Singular { step: 2 }));
    }

    #[test]
    fn minors_of_hilbert_matrix() {
        // Hilbert matrix H_3: minors 1, 1/12, 1/2160
        let h: Vec<Vec<Rational>> = (0..3)
            .map(|i| (0..3).map(|j| ratio(1, i + j + 1)).collect())
            .collect();
        assert_eq!(leading_minors(&h), vec![int(1), ratio(1, 12), ratio(1, 2160)]);
        let x = solve(&h, &[int(1), int(0), int(0)]).unwrap();
        assert_eq!(x, vec![int(9), int(-36), int(30)]);
    }

    #[test]
    fn random_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 1..7 {
            let a: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..n).map(|_| ratio(rng.gen_range(-9..10), rng.gen_range(1..5))).collect())
                .collect();
            let x0: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
            let b: Vec<Rational> = a
                .iter()
                .map(|r| r.iter().zip(&x0).map(|(u, v)| u * v).sum())
                .collect();
            if let Ok(x) = solve(&a, &b) {
                assert_eq!(x, x0);
            }
        }
    }
}

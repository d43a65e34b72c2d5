//! Multi-modular exact solution of integer linear systems.
//!
//! The system is solved modulo enough 62-bit primes to cover the Hadamard
//! bound of the Cramer numerators and the determinant, which are then
//! recovered by Chinese remaindering over a product tree. Results are exact
//! and independent of evaluation order.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;

/// A prime modulus `p < 2^62` with Montgomery constants for `R = 2^64`.
#[derive(Clone, Copy, Debug)]
struct Modulus {
    p: u64,
    /// `−p⁻¹ mod 2^64`.
    neg_inv: u64,
    /// `R² mod p`.
    r2: u64,
}

impl Modulus {
    fn new(p: u64) -> Modulus {
        debug_assert!(p % 2 == 1 && p < 1 << 62);
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = (u128::from(u64::MAX) + 1) % u128::from(p);
        let r2 = ((r * r) % u128::from(p)) as u64;
        Modulus {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    /// `t·R⁻¹ mod p` for `t < p·R`, result in `[0, p)`.
    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + u128::from(m) * u128::from(self.p)) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    /// Montgomery product `a·b·R⁻¹`.
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(u128::from(a) * u128::from(b))
    }

    #[inline]
    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    #[inline]
    fn from_mont(&self, a: u64) -> u64 {
        self.redc(u128::from(a))
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    /// Montgomery-form power.
    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Montgomery-form inverse of a nonzero Montgomery-form value.
    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Bits contributed by each prime (all primes lie in `(2^61, 2^62)`).
const PRIME_BITS: u64 = 61;

/// The first `k` primes below `2^62`, in decreasing order.
fn primes(k: usize) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(Vec::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    let mut c = cache.last().map_or((1u64 << 62) - 1, |&p| p - 2);
    while cache.len() < k {
        if is_prime(c) {
            cache.push(c);
        }
        c -= 2;
    }
    cache[..k].to_vec()
}

/// `x mod p` for a multi-limb integer, as a Montgomery-form residue.
struct Limbs {
    negative: bool,
    digits: Vec<u64>,
}

impl Limbs {
    fn new(x: &BigInt) -> Limbs {
        Limbs {
            negative: x.sign() == Sign::Minus,
            digits: x.magnitude().to_u64_digits(),
        }
    }
}

/// `mont(R^{i+1})` for each limb position `i`.
fn limb_weights(m: &Modulus, count: usize) -> Vec<u64> {
    let mut w = Vec::with_capacity(count);
    // mont(R) = R² mod p; each step multiplies by R
    let r_mont = m.r2;
    let mut cur = r_mont;
    for _ in 0..count {
        w.push(cur);
        cur = m.mul(cur, r_mont);
    }
    w
}

fn reduce(x: &Limbs, m: &Modulus, weights: &[u64]) -> u64 {
    // mul(d, mont(R^{i+1})) = d·R^{i+1}, the Montgomery form of d·2^{64i}
    let mut acc = 0u64;
    for (d, w) in x.digits.iter().zip(weights) {
        acc = m.add(acc, m.mul(*d, *w));
    }
    if x.negative {
        m.sub(0, acc)
    } else {
        acc
    }
}

/// Solution of `a·x = b` modulo one prime: Montgomery-form `det(a)` and
/// `det(a)·x`, or `None` when `a` is singular modulo the prime (with the
/// 1-based elimination step that failed).
fn solve_mod(a: &[Vec<Limbs>], b: &[Limbs], m: &Modulus) -> Result<(u64, Vec<u64>), usize> {
    let n = a.len();
    let max_limbs = a
        .iter()
        .flatten()
        .chain(b)
        .map(|x| x.digits.len())
        .max()
        .unwrap_or(0);
    let weights = limb_weights(m, max_limbs);
    let mut rows: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| reduce(x, m, &weights))
                .collect()
        })
        .collect();
    let mut det = m.to_mont(1);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| rows[i][k] != 0) else {
            return Err(k + 1);
        };
        if piv != k {
            rows.swap(piv, k);
            det = m.sub(0, det);
        }
        det = m.mul(det, rows[k][k]);
        let inv = m.inv(rows[k][k]);
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &mut head[k];
        for v in pivot_row[k..].iter_mut() {
            *v = m.mul(*v, inv);
        }
        for row in tail.iter_mut() {
            let f = row[k];
            if f == 0 {
                continue;
            }
            for j in k..=n {
                row[j] = m.sub(row[j], m.mul(f, pivot_row[j]));
            }
        }
    }
    let mut x = vec![0u64; n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n];
        for j in i + 1..n {
            acc = m.sub(acc, m.mul(rows[i][j], x[j]));
        }
        x[i] = acc;
    }
    let y = x.into_iter().map(|v| m.from_mont(m.mul(v, det))).collect();
    Ok((m.from_mont(det), y))
}

/// Chinese remaindering over a product tree.
struct CrtTree {
    /// `levels[0]` are the primes; each next level multiplies adjacent pairs.
    levels: Vec<Vec<BigUint>>,
    /// `(M/p_i)⁻¹ mod p_i`.
    coeffs: Vec<u64>,
    primes: Vec<u64>,
}

impl CrtTree {
    fn new(primes: Vec<u64>) -> CrtTree {
        let mut levels = vec![primes.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>()];
        while levels.last().is_some_and(|l| l.len() > 1) {
            let prev = levels.last().expect("nonempty");
            let next: Vec<BigUint> = prev
                .par_chunks(2)
                .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
                .collect();
            levels.push(next);
        }
        let coeffs: Vec<u64> = primes
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut prod = 1u64;
                for (j, &q) in primes.iter().enumerate() {
                    if j != i {
                        prod = mulmod(prod, q % p, p);
                    }
                }
                powmod(prod, p - 2, p)
            })
            .collect();
        CrtTree {
            levels,
            coeffs,
            primes,
        }
    }

    fn modulus(&self) -> &BigUint {
        &self.levels.last().expect("nonempty")[0]
    }

    /// The integer in `(−M/2, M/2]` with the given residues.
    fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let mut cur: Vec<BigUint> = residues
            .iter()
            .zip(&self.coeffs)
            .zip(&self.primes)
            .map(|((&r, &c), &p)| BigUint::from(mulmod(r, c, p)))
            .collect();
        // combine S = S_L·M_R + S_R·M_L level by level
        for level in &self.levels[..self.levels.len() - 1] {
            cur = cur
                .chunks(2)
                .zip(level.chunks(2))
                .map(|(s, m)| {
                    if s.len() == 2 {
                        &s[0] * &m[1] + &s[1] * &m[0]
                    } else {
                        s[0].clone()
                    }
                })
                .collect();
        }
        let modulus = self.modulus();
        let x = &cur[0] % modulus;
        let half = modulus >> 1u32;
        if x > half {
            BigInt::from_biguint(Sign::Minus, modulus - x)
        } else {
            BigInt::from_biguint(Sign::Plus, x)
        }
    }
}

fn log2_norm(values: impl Iterator<Item = f64>) -> f64 {
    // values are log2|x|; returns log2 of the Euclidean norm
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    let Some(max) = v.iter().cloned().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + 0.5 * v.iter().map(|x| 4f64.powf(x - max)).sum::<f64>().log2()
}

fn log2_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return crate::rational::log_abs(&crate::rational::Rational::from_integer(x.clone())) / std::f64::consts::LN_2;
    }
    let top = x.magnitude() >> (bits - 64);
    (bits - 64) as f64 + (top.iter_u64_digits().next().unwrap_or(0) as f64).log2()
}

/// Solves `a·y = d·b` over the integers with `d = det(a) ≠ 0`.
///
/// Returns `(y, d)`, so that `x = y/d`, or the 1-based step at which the
/// elimination found `a` singular.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<(Vec<BigInt>, BigInt), usize> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), BigInt::one()));
    }
    // Hadamard bounds for det(a) and for every Cramer numerator
    let row_norms: Vec<f64> = a.iter().map(|r| log2_norm(r.iter().map(log2_abs))).collect();
    let ext_norms: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| log2_norm(r.iter().chain(std::iter::once(rhs)).map(log2_abs)))
        .collect();
    if row_norms.iter().any(|x| !x.is_finite()) {
        let step = row_norms.iter().position(|x| !x.is_finite()).expect("found");
        return Err(step + 1);
    }
    let bound = ext_norms.iter().sum::<f64>().max(row_norms.iter().sum::<f64>());
    let count = ((bound + 2.0) / PRIME_BITS as f64).ceil() as usize + 1;

    let la: Vec<Vec<Limbs>> = a.iter().map(|r| r.iter().map(Limbs::new).collect()).collect();
    let lb: Vec<Limbs> = b.iter().map(Limbs::new).collect();

    // collect `count` primes at which `a` is invertible; two singular primes
    // in a row is taken as genuine singularity
    let mut used = Vec::with_capacity(count);
    let mut dets = Vec::with_capacity(count);
    let mut sols: Vec<Vec<u64>> = Vec::with_capacity(count);
    let mut offset = 0usize;
    let mut singular_streak = 0usize;
    while used.len() < count {
        let need = count - used.len();
        let batch = primes(offset + need);
        let batch = &batch[offset..];
        offset += need;
        let results: Vec<(u64, Result<(u64, Vec<u64>), usize>)> = batch
            .par_iter()
            .map(|&p| (p, solve_mod(&la, &lb, &Modulus::new(p))))
            .collect();
        for (p, r) in results {
            match r {
                Ok((d, y)) => {
                    singular_streak = 0;
                    used.push(p);
                    dets.push(d);
                    sols.push(y);
                }
                Err(step) => {
                    singular_streak += 1;
                    if singular_streak >= 2 {
                        return Err(step);
                    }
                }
            }
        }
    }
    let tree = CrtTree::new(used);
    let det = tree.reconstruct(&dets);
    if det.is_zero() {
        return Err(n);
    }
    let y: Vec<BigInt> = (0..n)
        .into_par_iter()
        .map(|i| {
            let residues: Vec<u64> = sols.iter().map(|s| s[i]).collect();
            tree.reconstruct(&residues)
        })
        .collect();
    Ok((y, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime((1u64 << 61) + 1));
        let ps = primes(5);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| p > 1 << 61 && p < 1 << 62));
    }

    #[test]
    fn montgomery_round_trip() {
        let m = Modulus::new(primes(1)[0]);
        for (a, b) in [(3u64, 5u64), (m.p - 1, m.p - 2), (123456789, 987654321)] {
            let prod = m.from_mont(m.mul(m.to_mont(a), m.to_mont(b)));
            assert_eq!(prod, mulmod(a, b, m.p));
        }
        let x = m.to_mont(7);
        assert_eq!(m.from_mont(m.mul(x, m.inv(x))), 1);
    }

    #[test]
    fn reduces_multi_limb_values() {
        let m = Modulus::new(primes(2)[1]);
        let x: BigInt = BigInt::from(3).pow(300) - BigInt::from(17);
        let weights = limb_weights(&m, 10);
        let r = m.from_mont(reduce(&Limbs::new(&x), &m, &weights));
        let expect = (&x % BigInt::from(m.p)).to_u64_digits().1.first().copied().unwrap_or(0);
        assert_eq!(r, expect);
        let neg = m.from_mont(reduce(&Limbs::new(&-x.clone()), &m, &weights));
        assert_eq!((neg + r) % m.p, 0);
    }

    #[test]
    fn crt_recovers_signed_values() {
        let tree = CrtTree::new(primes(4));
        for v in [BigInt::from(-5), BigInt::from(3).pow(150), -BigInt::from(7).pow(70)] {
            let res: Vec<u64> = tree
                .primes
                .iter()
                .map(|&p| {
                    let r = ((&v % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                    r.to_u64_digits().1.first().copied().unwrap_or(0)
                })
                .collect();
            assert_eq!(tree.reconstruct(&res), v);
        }
    }

    #[test]
    fn solves_integer_systems() {
        let a = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3)],
        ];
        let b = vec![BigInt::from(3), BigInt::from(5)];
        let (y, d) = solve_integer(&a, &b).unwrap();
        assert_eq!(d, BigInt::from(5));
        assert_eq!(y, vec![BigInt::from(4), BigInt::from(7)]);
        let sing = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        assert!(solve_integer(&sing, &b).is_err());
    }
}

//! The hyperoctahedral group `W = S_N ⋉ Z_2^N` acting on integer vectors by
//! signed coordinate permutations, together with dominant weights and the
//! dominance order used to index the orthogonal polynomials.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dominant integral weight: a weakly decreasing vector of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.is_empty() || !is_dominant(&parts) {
            return Err(Error::NotDominant(parts));
        }
        Ok(Weight(parts))
    }

    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    /// `ℓ·λ`, the ℓ-th point on the ray through λ.
    pub fn scale(&self, l: i64) -> Weight {
        assert!(l >= 0);
        Weight(self.0.iter().map(|p| p * l).collect())
    }

    /// Parses `"3,1,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::config("weight", format!("{s:?}: {e}")))?;
        Weight::new(parts)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<i64>::deserialize(d)?;
        Weight::new(parts).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn is_dominant(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1]) && v.last().is_none_or(|&x| x >= 0)
}

/// A signed permutation `(σ, ε)` acting by `w(v)_j = ε_j v_{σ_j}`.
///
/// `sigma` is stored zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    sigma: Vec<usize>,
    eps: Vec<i8>,
}

impl GroupElement {
    pub fn new(sigma: Vec<usize>, eps: Vec<i8>) -> Result<Self> {
        if sigma.len() != eps.len() {
            return Err(Error::DimensionMismatch {
                expected: sigma.len(),
                found: eps.len(),
            });
        }
        let mut seen = vec![false; sigma.len()];
        for &s in &sigma {
            if s >= sigma.len() || seen[s] {
                return Err(Error::Precondition(format!("{sigma:?} is not a permutation")));
            }
            seen[s] = true;
        }
        if eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Precondition(format!("signs must be ±1, got {eps:?}")));
        }
        Ok(GroupElement { sigma, eps })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement {
            sigma: (0..n).collect(),
            eps: vec![1; n],
        }
    }

    /// `-1`, the element flipping every sign.
    pub fn longest(n: usize) -> Self {
        GroupElement {
            sigma: (0..n).collect(),
            eps: vec![-1; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn eps(&self) -> &[i8] {
        &self.eps
    }

    pub fn is_identity(&self) -> bool {
        self.eps.iter().all(|&e| e == 1) && self.sigma.iter().enumerate().all(|(i, &s)| i == s)
    }

    /// `sign(σ)·∏ ε_j`.
    pub fn det(&self) -> i8 {
        permutation_sign(&self.sigma) * self.eps.iter().product::<i8>()
    }

    /// Composition with `act(a∘b, v) = act(a, act(b, v))`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.dim(), other.dim(), "composing elements of different rank");
        let sigma = self.sigma.iter().map(|&s| other.sigma[s]).collect();
        let eps = self
            .eps
            .iter()
            .zip(&self.sigma)
            .map(|(&e, &s)| e * other.eps[s])
            .collect();
        GroupElement { sigma, eps }
    }

    pub fn inverse(&self) -> GroupElement {
        let n = self.dim();
        let mut sigma = vec![0; n];
        let mut eps = vec![1; n];
        for (j, &s) in self.sigma.iter().enumerate() {
            sigma[s] = j;
            eps[s] = self.eps[j];
        }
        GroupElement { sigma, eps }
    }

    pub fn act(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.act_unchecked(v))
    }

    pub(crate) fn act_unchecked(&self, v: &[i64]) -> Vec<i64> {
        self.sigma
            .iter()
            .zip(&self.eps)
            .map(|(&s, &e)| i64::from(e) * v[s])
            .collect()
    }

    /// All `2^N·N!` elements, in a fixed order.
    pub fn all(n: usize) -> Vec<GroupElement> {
        let perms = permutations(n);
        let mut out = Vec::with_capacity(perms.len() << n);
        for sigma in perms {
            for mask in 0u32..(1 << n) {
                let eps = (0..n)
                    .map(|j| if mask >> j & 1 == 1 { -1 } else { 1 })
                    .collect();
                out.push(GroupElement {
                    sigma: sigma.clone(),
                    eps,
                });
            }
        }
        out
    }
}

pub fn group_order(n: usize) -> u64 {
    (1..=n as u64).product::<u64>() << n
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn permutation_sign(sigma: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Result of comparing two weights in the dominance order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dominance {
    Less,
    Greater,
    Equal,
    Incomparable,
}

pub fn compare_dominance(lambda: &Weight, mu: &Weight) -> Result<Dominance> {
    compare_dominance_vec(lambda.parts(), mu.parts())
}

/// Dominance comparison of arbitrary integer vectors by their leading partial sums.
pub fn compare_dominance_vec(a: &[i64], b: &[i64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (mut sa, mut sb) = (0i64, 0i64);
    let (mut above, mut below) = (false, false);
    for (x, y) in a.iter().zip(b) {
        sa += x;
        sb += y;
        match sa.cmp(&sb) {
            CmpOrdering::Greater => above = true,
            CmpOrdering::Less => below = true,
            CmpOrdering::Equal => {}
        }
    }
    Ok(match (above, below) {
        (false, false) => Dominance::Equal,
        (true, false) => Dominance::Greater,
        (false, true) => Dominance::Less,
        (true, true) => Dominance::Incomparable,
    })
}

/// `μ ⪯ λ`.
pub fn dominated_by(mu: &[i64], lambda: &[i64]) -> bool {
    matches!(
        compare_dominance_vec(mu, lambda),
        Ok(Dominance::Less | Dominance::Equal)
    )
}

/// `m(λ)`: the smallest of `λ_j − λ_{j+1}` with `λ_{N+1} = 0`.
pub fn min_gap(lambda: &Weight) -> i64 {
    let p = lambda.parts();
    (0..p.len())
        .map(|j| p[j] - p.get(j + 1).copied().unwrap_or(0))
        .min()
        .unwrap_or(0)
}

pub fn stabilizer_order(lambda: &Weight) -> u64 {
    let mut order = 1u64;
    let p = lambda.parts();
    let mut i = 0;
    while i < p.len() {
        let mut j = i;
        while j < p.len() && p[j] == p[i] {
            j += 1;
        }
        let run = (j - i) as u64;
        let fact: u64 = (1..=run).product();
        order *= if p[i] == 0 { fact << run } else { fact };
        i = j;
    }
    order
}

/// The W-orbit of λ, deduplicated, by a full loop over the group.
pub fn orbit(lambda: &Weight) -> BTreeSet<Vec<i64>> {
    orbit_of(lambda.parts())
}

pub fn orbit_of(v: &[i64]) -> BTreeSet<Vec<i64>> {
    GroupElement::all(v.len())
        .iter()
        .map(|w| w.act_unchecked(v))
        .collect()
}

/// The dominant vector in the W-orbit of `v`, with the determinant of the
/// element carrying `v` there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantRep {
    pub rep: Vec<i64>,
    pub parity: i8,
    pub singular: bool,
}

pub fn dominant_representative(v: &[i64]) -> DominantRep {
    let flips = v.iter().filter(|&&x| x < 0).count();
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // stable sort, descending in absolute value
    idx.sort_by(|&a, &b| v[b].abs().cmp(&v[a].abs()));
    let rep: Vec<i64> = idx.iter().map(|&i| v[i].abs()).collect();
    let singular = rep.windows(2).any(|w| w[0] == w[1]) || rep.contains(&0);
    let parity = if singular {
        1
    } else {
        let flip_sign = if flips % 2 == 0 { 1 } else { -1 };
        permutation_sign(&idx) * flip_sign
    };
    DominantRep {
        rep,
        parity,
        singular,
    }
}

/// All dominant μ ⪯ λ, in lexicographic order.
pub fn weights_below(lambda: &Weight) -> Vec<Weight> {
    let n = lambda.dim();
    let top = lambda.parts()[0];
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(j: usize, cur: &mut Vec<i64>, bound: i64, lambda: &[i64], out: &mut Vec<Weight>) {
        if j == cur.len() {
            if dominated_by(cur, lambda) {
                out.push(Weight(cur.clone()));
            }
            return;
        }
        for x in 0..=bound {
            cur[j] = x;
            rec(j + 1, cur, x, lambda, out);
        }
    }
    rec(0, &mut cur, top, lambda.parts(), &mut out);
    out
}

/// All dominant weights of rank `n` with largest part at most `max_part`,
/// in lexicographic order.
pub fn dominant_weights(n: usize, max_part: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(j: usize, cur: &mut Vec<i64>, bound: i64, out: &mut Vec<Weight>) {
        if j == cur.len() {
            out.push(Weight(cur.clone()));
            return;
        }
        for x in 0..=bound {
            cur[j] = x;
            rec(j + 1, cur, x, out);
        }
    }
    rec(0, &mut cur, max_part, &mut out);
    out
}

/// `ρ = (N, N−1, …, 1)`.
pub fn rho(n: usize) -> Weight {
    assert!(n >= 1, "rank must be positive");
    Weight((1..=n as i64).rev().collect())
}

pub fn lex_compare(lambda: &Weight, mu: &Weight) -> Result<CmpOrdering> {
    if lambda.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: lambda.dim(),
            found: mu.dim(),
        });
    }
    Ok(lambda.parts().cmp(mu.parts()))
}

//! Sparse Laurent polynomials in `N` torus variables with exact rational
//! coefficients.
//!
//! The exponent vector `n` stands for `z^n = e^{i⟨n,x⟩}` with `z_j = e^{ix_j}`.
//! Terms live in a `BTreeMap`, so iteration is lexicographic and the
//! lex-maximal term (the one exact division cancels against) is the last entry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyperoctahedral::{self, GroupElement, Weight};
use crate::rational::{self, Rational};

pub type Exponent = Vec<i64>;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(vec![0; dim], Rational::one())
    }

    pub fn monomial(exponent: Exponent, coeff: Rational) -> Self {
        let dim = exponent.len();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        LaurentPoly { dim, terms }
    }

    /// Builds from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Result<Self> {
        let mut p = LaurentPoly::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[i64]) -> Rational {
        self.terms.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    /// The lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &LaurentPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut acc: HashMap<Exponent, Rational> = HashMap::with_capacity(self.len() + other.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Ok(LaurentPoly {
            dim: self.dim,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn shift(&self, shift: &[i64]) -> LaurentPoly {
        assert_eq!(shift.len(), self.dim);
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Complex conjugation on the torus; coefficients are real, so every
    /// exponent is negated.
    pub fn conjugate(&self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|x| -x).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.dim])
    }

    /// `x ↦ f(x_w)`; the term `z^n` becomes `z^{w⁻¹(n)}`.
    pub fn substitute(&self, w: &GroupElement) -> Result<LaurentPoly> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: w.dim(),
            });
        }
        let inv = w.inverse();
        Ok(LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (inv.act_unchecked(e), c.clone()))
                .collect(),
        })
    }

    /// Invariance under the generators (adjacent swaps and the last sign flip)
    /// implies invariance under all of W.
    pub fn is_invariant(&self) -> bool {
        let n = self.dim;
        let mut gens = Vec::with_capacity(n);
        for j in 0..n.saturating_sub(1) {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(j, j + 1);
            gens.push(GroupElement::new(sigma, vec![1; n]).expect("valid generator"));
        }
        let mut eps = vec![1i8; n];
        if n > 0 {
            eps[n - 1] = -1;
            gens.push(GroupElement::new((0..n).collect(), eps).expect("valid generator"));
        }
        gens.iter().all(|g| {
            self.terms
                .iter()
                .all(|(e, c)| self.terms.get(&g.act_unchecked(e)) == Some(c))
        })
    }

    /// Approximate evaluation at `z_j = e^{i x_j}`; returns (re, im).
    pub fn eval_torus(&self, x: &[f64]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (e, c) in &self.terms {
            let phase: f64 = e.iter().zip(x).map(|(&n, &t)| n as f64 * t).sum();
            let c = rational::to_f64(c);
            re += c * phase.cos();
            im += c * phase.sin();
        }
        (re, im)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| format!("{}*z^{:?}", c, e))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $via:ident) => {
        impl<'a> $tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            /// Panics on a dimension mismatch; use the `try_` form to handle it.
            fn $m(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                self.$via(rhs).expect("Laurent polynomial dimension mismatch")
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$via(&rhs).expect("Laurent polynomial dimension mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponent: Vec<i64>,
    numerator: String,
    denominator: String,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(e, c)| TermRecord {
                exponent: e.clone(),
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<TermRecord>::deserialize(d)?;
        let dim = records
            .first()
            .map(|r| r.exponent.len())
            .ok_or_else(|| D::Error::custom("empty polynomial has no dimension"))?;
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let c = rational::parse(&format!("{}/{}", r.numerator, r.denominator))
                .map_err(D::Error::custom)?;
            terms.push((r.exponent, c));
        }
        LaurentPoly::from_terms(dim, terms).map_err(D::Error::custom)
    }
}

/// `m_λ`: the orbit sum of `z^λ`, every coefficient 1.
pub fn symmetric_monomial(lambda: &Weight) -> LaurentPoly {
    LaurentPoly {
        dim: lambda.dim(),
        terms: hyperoctahedral::orbit(lambda)
            .into_iter()
            .map(|e| (e, Rational::one()))
            .collect(),
    }
}

/// Coefficients `c_μ` with `f = Σ c_μ m_μ`.
pub fn monomial_coordinates(f: &LaurentPoly) -> Result<BTreeMap<Weight, Rational>> {
    if !f.is_invariant() {
        return Err(Error::NotInvariant);
    }
    Ok(dominant_part(f))
}

/// Restriction to dominant exponents, without the invariance check.
pub(crate) fn dominant_part(f: &LaurentPoly) -> BTreeMap<Weight, Rational> {
    f.terms
        .iter()
        .filter(|(e, _)| hyperoctahedral::is_dominant(e))
        .map(|(e, c)| (Weight::new(e.clone()).expect("dominant exponent"), c.clone()))
        .collect()
}

/// Expands monomial coordinates back into a Laurent polynomial.
pub fn from_coordinates(dim: usize, coords: &BTreeMap<Weight, Rational>) -> LaurentPoly {
    let mut terms = BTreeMap::new();
    for (mu, c) in coords {
        assert_eq!(mu.dim(), dim);
        if c.is_zero() {
            continue;
        }
        for e in hyperoctahedral::orbit(mu) {
            terms.insert(e, c.clone());
        }
    }
    LaurentPoly { dim, terms }
}

/// `δ = ∏_{j<k}(z_j + z_j⁻¹ − z_k − z_k⁻¹)·∏_j(z_j − z_j⁻¹)`.
pub fn weyl_denominator(n: usize) -> LaurentPoly {
    assert!(n >= 1, "rank must be positive");
    let unit = |j: usize, s: i64| {
        let mut e = vec![0; n];
        e[j] = s;
        e
    };
    let mut delta = LaurentPoly::one(n);
    for j in 0..n {
        for k in j + 1..n {
            let factor = LaurentPoly::from_terms(
                n,
                [
                    (unit(j, 1), Rational::one()),
                    (unit(j, -1), Rational::one()),
                    (unit(k, 1), -Rational::one()),
                    (unit(k, -1), -Rational::one()),
                ],
            )
            .expect("consistent dimension");
            delta = &delta * &factor;
        }
    }
    for j in 0..n {
        let factor = LaurentPoly::from_terms(
            n,
            [(unit(j, 1), Rational::one()), (unit(j, -1), -Rational::one())],
        )
        .expect("consistent dimension");
        delta = &delta * &factor;
    }
    delta
}

/// `Σ_w det(w) z^{w(n)}`.
pub fn antisymmetrize(v: &[i64]) -> LaurentPoly {
    let mut out = LaurentPoly::zero(v.len());
    for w in GroupElement::all(v.len()) {
        out.add_term(w.act_unchecked(v), Rational::from_integer(w.det().into()));
    }
    out
}

/// Antisymmetrization of a whole polynomial: `Σ_w det(w) f(x_w)`.
pub fn antisymmetrize_poly(f: &LaurentPoly) -> LaurentPoly {
    let mut out = LaurentPoly::zero(f.dim);
    for w in GroupElement::all(f.dim) {
        let sign = Rational::from_integer(w.det().into());
        for (e, c) in &f.terms {
            out.add_term(w.act_unchecked(e), c * &sign);
        }
    }
    out
}

/// Quotient `q` with `q·d = f`, by repeated cancellation of lex-leading terms.
///
/// Fails with [`Error::NotDivisible`] as soon as a quotient term would leave
/// the coordinate box `box(f) − box(d)` that any true quotient lives in.
pub fn exact_divide(f: &LaurentPoly, d: &LaurentPoly) -> Result<LaurentPoly> {
    f.check_dim(d)?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = f.dim;
    if f.is_zero() {
        return Ok(LaurentPoly::zero(n));
    }
    let (lo_f, hi_f) = bounding_box(f);
    let (lo_d, hi_d) = bounding_box(d);
    let lo: Vec<i64> = lo_f.iter().zip(&lo_d).map(|(a, b)| a - b).collect();
    let hi: Vec<i64> = hi_f.iter().zip(&hi_d).map(|(a, b)| a - b).collect();

    let (lead_e, lead_c) = d.leading_term().expect("nonzero divisor");
    let lead_e = lead_e.clone();
    let lead_inv = lead_c.recip();
    let d_terms: Vec<(Exponent, Rational)> = d.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();

    let mut rem = f.terms.clone();
    let mut quotient = BTreeMap::new();
    while let Some((e, c)) = rem.pop_last() {
        let qe: Exponent = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
        if qe.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
            return Err(Error::NotDivisible);
        }
        let qc = &c * &lead_inv;
        for (de, dc) in &d_terms {
            if *de == lead_e {
                continue;
            }
            let te: Exponent = qe.iter().zip(de).map(|(a, b)| a + b).collect();
            let delta = -(&qc * dc);
            use std::collections::btree_map::Entry;
            match rem.entry(te) {
                Entry::Vacant(v) => {
                    v.insert(delta);
                }
                Entry::Occupied(mut o) => {
                    *o.get_mut() += delta;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        quotient.insert(qe, qc);
    }
    Ok(LaurentPoly {
        dim: n,
        terms: quotient,
    })
}

fn bounding_box(f: &LaurentPoly) -> (Vec<i64>, Vec<i64>) {
    let n = f.dim;
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for e in f.terms.keys() {
        for j in 0..n {
            lo[j] = lo[j].min(e[j]);
            hi[j] = hi[j].max(e[j]);
        }
    }
    (lo, hi)
}

/// Integer-coefficient polynomial, used where a common denominator is kept
/// on the side to avoid per-term gcds.
pub(crate) type IntPoly = HashMap<Exponent, BigInt>;

/// Multiplies `poly` by the one-variable factor `Σ_k c_k s^k` with
/// `s = z^direction`.
pub(crate) fn mul_along(poly: &IntPoly, factor: &[(i64, BigInt)], direction: &[i64]) -> IntPoly {
    let partials: Vec<IntPoly> = factor
        .par_iter()
        .map(|(k, c)| {
            poly.iter()
                .map(|(e, v)| {
                    let e2: Exponent = e.iter().zip(direction).map(|(x, d)| x + k * d).collect();
                    (e2, v * c)
                })
                .collect()
        })
        .collect();
    let mut out: IntPoly = HashMap::with_capacity(poly.len() * 2);
    for part in partials {
        for (e, v) in part {
            match out.get_mut(&e) {
                Some(x) => *x += v,
                None => {
                    out.insert(e, v);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `Σ_w det(w) f(x_w)` on integer coefficients.
pub(crate) fn antisymmetrize_int(f: &IntPoly, n: usize) -> BTreeMap<Exponent, BigInt> {
    let mut out: BTreeMap<Exponent, BigInt> = BTreeMap::new();
    for w in GroupElement::all(n) {
        let negate = w.det() < 0;
        for (e, c) in f {
            let entry = out.entry(w.act_unchecked(e)).or_insert_with(BigInt::zero);
            if negate {
                *entry -= c;
            } else {
                *entry += c;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Exact quotient of an integer polynomial by an integer-coefficient divisor.
/// Every cancellation step must divide evenly by the leading coefficient,
/// which always holds for a monic divisor such as `δ`.
pub(crate) fn exact_divide_int(f: BTreeMap<Exponent, BigInt>, d: &LaurentPoly) -> Result<BTreeMap<Exponent, BigInt>> {
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut d_terms: Vec<(Exponent, BigInt)> = Vec::with_capacity(d.len());
    for (e, c) in &d.terms {
        if !c.is_integer() {
            return Err(Error::NotDivisible);
        }
        d_terms.push((e.clone(), c.to_integer()));
    }
    let (lead_e, lead_c) = d_terms.last().cloned().expect("nonzero divisor");
    if f.is_empty() {
        return Ok(BTreeMap::new());
    }
    let (lo_d, hi_d) = bounding_box(d);
    let mut lo = vec![i64::MAX; d.dim];
    let mut hi = vec![i64::MIN; d.dim];
    for e in f.keys() {
        for j in 0..d.dim {
            lo[j] = lo[j].min(e[j] - lo_d[j]);
            hi[j] = hi[j].max(e[j] - hi_d[j]);
        }
    }
    let mut rem = f;
    let mut quotient = BTreeMap::new();
    while let Some((e, c)) = rem.pop_last() {
        let qe: Exponent = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
        if qe.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
            return Err(Error::NotDivisible);
        }
        let (qc, r) = c.div_rem(&lead_c);
        if !r.is_zero() {
            return Err(Error::NotDivisible);
        }
        for (de, dc) in &d_terms[..d_terms.len() - 1] {
            let te: Exponent = qe.iter().zip(de).map(|(a, b)| a + b).collect();
            use std::collections::btree_map::Entry;
            match rem.entry(te) {
                Entry::Vacant(v) => {
                    v.insert(-(&qc * dc));
                }
                Entry::Occupied(mut o) => {
                    *o.get_mut() -= &qc * dc;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        quotient.insert(qe, qc);
    }
    Ok(quotient)
}

static DENOMINATORS: LazyLock<RwLock<HashMap<usize, Arc<LaurentPoly>>>> = LazyLock::new(Default::default);
static CHARACTERS: LazyLock<RwLock<HashMap<Vec<i64>, Arc<LaurentPoly>>>> = LazyLock::new(Default::default);

pub(crate) fn cached_denominator(n: usize) -> Arc<LaurentPoly> {
    if let Some(d) = DENOMINATORS.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return d.clone();
    }
    let d = Arc::new(weyl_denominator(n));
    DENOMINATORS.write().unwrap_or_else(|e| e.into_inner()).entry(n).or_insert(d).clone()
}

/// The Weyl character `χ_μ = δ⁻¹ Σ_w det(w) z^{w(μ+ρ)}`, cached per weight.
pub fn weyl_character(mu: &Weight) -> Arc<LaurentPoly> {
    if let Some(c) = CHARACTERS.read().unwrap_or_else(|e| e.into_inner()).get(mu.parts()) {
        return c.clone();
    }
    let n = mu.dim();
    let shifted: Vec<i64> = mu
        .parts()
        .iter()
        .zip(hyperoctahedral::rho(n).parts())
        .map(|(a, b)| a + b)
        .collect();
    let chi = exact_divide(&antisymmetrize(&shifted), &cached_denominator(n))
        .expect("μ+ρ is regular for dominant μ, so the alternant is divisible by δ");
    CHARACTERS
        .write().unwrap_or_else(|e| e.into_inner())
        .entry(mu.parts().to_vec())
        .or_insert(Arc::new(chi))
        .clone()
}

/// Monomial coordinates of `χ_μ`.
pub fn character_coordinates(mu: &Weight) -> BTreeMap<Weight, Rational> {
    dominant_part(&weyl_character(mu))
}

//! The truncated weight function `Δ_K` and the constant-term inner product
//! `⟨f, g⟩_Δ = CT(f · conj(g) · Δ_K)`.
//!
//! `Δ = 1/(|W| C(x) C(−x))` factorizes over the roots. Each factor is a
//! one-variable Laurent series in `z^α` built from the pole factor of the
//! c-function and the reciprocal reduced c-function truncated at order `K`.
//! The factors are multiplied exactly on integer-scaled coefficients, and a
//! dense integer copy of `Δ_K` is kept for fast constant-term sums.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cfuncs::{self, CSpec, Root};
use crate::error::{Error, Result};
use crate::hyperoctahedral::{self, Weight};
use crate::laurent::{self, Exponent, IntPoly, LaurentPoly};
use crate::rational::{self, Rational, RawRatio};

/// Default truncation order by rank: 30 up to rank 2, 12 for rank 3 and above.
pub fn default_order(n: usize) -> usize {
    if n <= 2 {
        30
    } else {
        12
    }
}

/// Dense integer image of a Laurent polynomial over its bounding box:
/// `poly = values / denom`.
#[derive(Clone, Debug)]
struct DenseScaled {
    lo: Vec<i64>,
    extent: Vec<i64>,
    stride: Vec<usize>,
    values: Vec<BigInt>,
    denom: BigInt,
}

impl DenseScaled {
    fn from_int(terms: &IntPoly, n: usize, denom: BigInt) -> DenseScaled {
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for e in terms.keys() {
            for j in 0..n {
                lo[j] = lo[j].min(e[j]);
                hi[j] = hi[j].max(e[j]);
            }
        }
        let extent: Vec<i64> = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).collect();
        let mut stride = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            stride[j] = stride[j + 1] * extent[j + 1] as usize;
        }
        let size: usize = extent.iter().map(|&x| x as usize).product();
        let mut values = vec![BigInt::zero(); size];
        for (e, c) in terms {
            let idx: usize = (0..n).map(|j| (e[j] - lo[j]) as usize * stride[j]).sum();
            values[idx] = c.clone();
        }
        DenseScaled {
            lo,
            extent,
            stride,
            values,
            denom,
        }
    }

    fn to_poly(&self) -> LaurentPoly {
        let n = self.lo.len();
        let terms: Vec<(Exponent, Rational)> = self
            .values
            .par_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(idx, v)| {
                let mut rest = idx;
                let e: Exponent = (0..n)
                    .map(|j| {
                        let k = rest / self.stride[j];
                        rest %= self.stride[j];
                        self.lo[j] + k as i64
                    })
                    .collect();
                (e, Rational::new(v.clone(), self.denom.clone()))
            })
            .collect();
        LaurentPoly::from_terms(n, terms).expect("consistent dimension")
    }

    /// Integer value at `a − b`, or `None` outside the box.
    #[inline]
    fn at_diff(&self, a: &[i64], b: &[i64]) -> Option<&BigInt> {
        let mut idx = 0usize;
        for j in 0..a.len() {
            let off = a[j] - b[j] - self.lo[j];
            if off < 0 || off >= self.extent[j] {
                return None;
            }
            idx += off as usize * self.stride[j];
        }
        Some(&self.values[idx])
    }
}

/// The truncation-order-`K` Laurent approximation of the weight function.
#[derive(Clone, Debug)]
pub struct DeltaApprox {
    dim: usize,
    order: usize,
    spec: CSpec,
    poly: OnceLock<LaurentPoly>,
    tail_hint: f64,
    dense: DenseScaled,
}

impl DeltaApprox {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn spec(&self) -> &CSpec {
        &self.spec
    }

    /// `Δ_K` as an exact Laurent polynomial, built on first use.
    pub fn poly(&self) -> &LaurentPoly {
        self.poly.get_or_init(|| self.dense.to_poly())
    }

    /// Common denominator of the integer image used by [`gram_integer`].
    pub fn denominator(&self) -> &BigInt {
        &self.dense.denom
    }

    /// Heuristic size of the neglected Taylor tail; reported, never trusted.
    pub fn tail_hint(&self) -> f64 {
        self.tail_hint
    }
}

/// One-variable factor `(1 − s^k)(1 − s^{−k}) R(s) R(s^{−1})` as a map from
/// powers of `s` to coefficients.
fn root_factor(recip: &cfuncs::TruncSeries, k: i64) -> BTreeMap<i64, Rational> {
    let pole = [(0i64, Rational::from_integer(2.into())), (k, -Rational::one()), (-k, -Rational::one())];
    let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
    let r = recip.coeffs();
    for (i, a) in r.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in r.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let ab = a * b;
            for (p, c) in &pole {
                let e = i as i64 - j as i64 + p;
                *out.entry(e).or_insert_with(Rational::zero) += &ab * c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn build_delta(spec: &CSpec, n: usize, order: usize) -> Result<DeltaApprox> {
    if order < 1 {
        return Err(Error::Precondition("truncation order K must be at least 1".into()));
    }
    if n < 1 {
        return Err(Error::Precondition("rank N must be at least 1".into()));
    }
    spec.validate()?;
    let r0 = cfuncs::reciprocal_series(&cfuncs::taylor_c(spec, Root::Long, order)?, order)?;
    let r1 = cfuncs::reciprocal_series(&cfuncs::taylor_c(spec, Root::Short, order)?, order)?;

    let scale = |f: BTreeMap<i64, Rational>| -> (Vec<(i64, BigInt)>, BigInt) {
        let d = rational::common_denominator(f.values());
        let ints = f.iter().map(|(k, c)| (*k, rational::scale_to_integer(c, &d))).collect();
        (ints, d)
    };
    let (long, long_d) = scale(root_factor(&r0, 1));
    let (short, short_d) = scale(root_factor(&r1, 2));

    let mut acc: IntPoly = IntPoly::new();
    acc.insert(vec![0; n], BigInt::one());
    let mut denom = BigInt::from(hyperoctahedral::group_order(n));
    for j in 0..n {
        for k in j + 1..n {
            for sign in [1i64, -1] {
                let mut dir = vec![0i64; n];
                dir[j] = 1;
                dir[k] = sign;
                acc = laurent::mul_along(&acc, &long, &dir);
                denom *= &long_d;
            }
        }
    }
    for j in 0..n {
        let mut dir = vec![0i64; n];
        dir[j] = 1;
        acc = laurent::mul_along(&acc, &short, &dir);
        denom *= &short_d;
    }

    let content = acc.values().try_fold(denom.clone(), |g, v| {
        let g = g.gcd(v);
        if g.is_one() {
            Err(g)
        } else {
            Ok(g)
        }
    });
    let content = content.unwrap_or_else(|g| g);
    let denom = denom / &content;
    if !content.is_one() {
        acc.par_iter_mut().for_each(|(_, v)| *v /= &content);
    }
    let dense = DenseScaled::from_int(&acc, n, denom);

    let tail = r0.max_abs_tail().max(r1.max_abs_tail());
    let tail_hint = rational::to_f64(&tail) * (n * n) as f64;

    Ok(DeltaApprox {
        dim: n,
        order,
        spec: spec.clone(),
        poly: OnceLock::new(),
        tail_hint,
        dense,
    })
}

fn scaled_terms(p: &LaurentPoly) -> (Vec<(Exponent, BigInt)>, BigInt) {
    let d = rational::common_denominator(p.terms().map(|(_, c)| c));
    let v = p
        .terms()
        .map(|(e, c)| (e.clone(), rational::scale_to_integer(c, &d)))
        .collect();
    (v, d)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `⟨f, g⟩_Δ = CT(f · conj(g) · Δ_K) = Σ_{a,b} f_a g_b Δ_{b−a}`.
pub fn inner_product(f: &LaurentPoly, g: &LaurentPoly, delta: &DeltaApprox) -> Result<Rational> {
    check_dim(delta.dim, f.dim())?;
    check_dim(delta.dim, g.dim())?;
    if f.is_zero() || g.is_zero() {
        return Ok(Rational::zero());
    }
    let (fs, fd) = scaled_terms(f);
    let (gs, gd) = scaled_terms(g);
    let dense = &delta.dense;
    let total: BigInt = fs
        .par_iter()
        .map(|(a, fa)| {
            let mut s = BigInt::zero();
            for (b, gb) in &gs {
                if let Some(d) = dense.at_diff(b, a) {
                    if !d.is_zero() {
                        s += gb * d;
                    }
                }
            }
            s * fa
        })
        .sum();
    Ok(Rational::new(total, fd * gd * &dense.denom))
}

/// Monomial coordinates `μ ↦ c_μ` of a W-invariant polynomial.
pub type Coords = BTreeMap<Weight, Rational>;

/// Monomial coordinates over one shared denominator: `c_μ = num[μ] / den`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCoords {
    pub num: BTreeMap<Weight, BigInt>,
    pub den: BigInt,
}

impl ScaledCoords {
    pub fn from_coords(c: &Coords) -> ScaledCoords {
        let den = rational::common_denominator(c.values());
        let num = c
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(mu, v)| (mu.clone(), rational::scale_to_integer(v, &den)))
            .collect();
        ScaledCoords { num, den }
    }

    /// Reduced coordinates; costs one gcd per entry.
    pub fn to_coords(&self) -> Coords {
        self.num
            .par_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(mu, v)| (mu.clone(), Rational::new(v.clone(), self.den.clone())))
            .collect()
    }
}

/// Inner product of two W-invariant polynomials given by monomial coordinates.
///
/// Uses `⟨f, g⟩ = Σ_μ f_μ |W·μ| h(μ)` with `h(a) = Σ_b g_b Δ_{b−a}`, which
/// is W-invariant because `g` and `Δ` are.
pub fn inner_product_coords(f: &Coords, g: &Coords, delta: &DeltaApprox) -> Result<Rational> {
    let v = inner_product_scaled(&ScaledCoords::from_coords(f), &ScaledCoords::from_coords(g), delta)?;
    Ok(v.reduce())
}

/// [`inner_product_coords`] on scaled coordinates, returned unreduced.
pub fn inner_product_scaled(f: &ScaledCoords, g: &ScaledCoords, delta: &DeltaApprox) -> Result<RawRatio> {
    for mu in f.num.keys().chain(g.num.keys()) {
        check_dim(delta.dim, mu.dim())?;
    }
    let (f, g) = if f.num.len() <= g.num.len() { (f, g) } else { (g, f) };
    let den = &f.den * &g.den * &delta.dense.denom;
    let fs: Vec<(&Weight, &BigInt)> = f.num.iter().filter(|(_, c)| !c.is_zero()).collect();
    if fs.is_empty() || g.num.values().all(|c| c.is_zero()) {
        return Ok(RawRatio::new(BigInt::zero(), den));
    }
    let g_full: Vec<(Exponent, &BigInt)> = g
        .num
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .flat_map(|(mu, c)| hyperoctahedral::orbit(mu).into_iter().map(move |e| (e, c)))
        .collect();
    let dense = &delta.dense;
    let total: BigInt = fs
        .par_iter()
        .map(|(mu, c)| {
            let a = mu.parts();
            let mut h = BigInt::zero();
            for (b, gb) in &g_full {
                if let Some(d) = dense.at_diff(b, a) {
                    if !d.is_zero() {
                        h += *gb * d;
                    }
                }
            }
            let orbit = hyperoctahedral::group_order(a.len()) / hyperoctahedral::stabilizer_order(mu);
            h * *c * BigInt::from(orbit)
        })
        .sum();
    Ok(RawRatio::new(total, den))
}

/// `⟨m_μ, m_ν⟩_Δ` times the denominator of `Δ_K`.
fn monomial_inner_int(mu: &Weight, nu: &Weight, delta: &DeltaApprox) -> BigInt {
    let orbit_mu_len = hyperoctahedral::group_order(mu.dim()) / hyperoctahedral::stabilizer_order(mu);
    let mut s = BigInt::zero();
    for b in hyperoctahedral::orbit(nu) {
        if let Some(d) = delta.dense.at_diff(&b, mu.parts()) {
            s += d;
        }
    }
    s * BigInt::from(orbit_mu_len)
}

/// `⟨m_μ, m_ν⟩_Δ`.
pub fn monomial_inner(mu: &Weight, nu: &Weight, delta: &DeltaApprox) -> Rational {
    Rational::new(monomial_inner_int(mu, nu, delta), delta.dense.denom.clone())
}

/// Gram matrix of the monomial basis times [`DeltaApprox::denominator`].
pub fn gram_integer(basis: &[Weight], delta: &DeltaApprox) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    let upper: Vec<Vec<BigInt>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| monomial_inner_int(&basis[i], &basis[j], delta)).collect())
        .collect();
    let mut g = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    g
}

/// Gram matrix of the monomial basis over a list of weights.
pub fn gram_of(basis: &[Weight], delta: &DeltaApprox) -> Vec<Vec<Rational>> {
    gram_integer(basis, delta)
        .into_par_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| Rational::new(v, delta.dense.denom.clone()))
                .collect()
        })
        .collect()
}

/// Gram matrix indexed by `weights_below(λ)` in lexicographic order.
#[derive(Clone, Debug, Serialize)]
pub struct GramMatrix {
    pub basis: Vec<Weight>,
    #[serde(serialize_with = "serialize_matrix")]
    pub entries: Vec<Vec<Rational>>,
}

fn serialize_matrix<S: serde::Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(rational::to_string).collect())
        .collect();
    strings.serialize(s)
}

impl GramMatrix {
    pub fn leading_minors(&self) -> Vec<Rational> {
        crate::linalg::leading_minors(&self.entries)
    }

    pub fn is_positive_definite(&self) -> bool {
        let minors = self.leading_minors();
        minors.len() == self.basis.len() && minors.iter().all(|m| m.is_positive())
    }

    /// CSV with a header row of weights and `"p/q"` entries.
    pub fn to_csv(&self) -> String {
        let label = |w: &Weight| format!("\"{}\"", w.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
        let mut out = String::from("weight");
        for w in &self.basis {
            out.push(',');
            out.push_str(&label(w));
        }
        out.push('\n');
        for (w, row) in self.basis.iter().zip(&self.entries) {
            out.push_str(&label(w));
            for v in row {
                out.push(',');
                out.push_str(&rational::to_string(v));
            }
            out.push('\n');
        }
        out
    }
}

pub fn gram_matrix(lambda: &Weight, delta: &DeltaApprox) -> Result<GramMatrix> {
    check_dim(delta.dim, lambda.dim())?;
    let basis = hyperoctahedral::weights_below(lambda);
    let entries = gram_of(&basis, delta);
    Ok(GramMatrix { basis, entries })
}

/// Gram-matrix drift under increasing truncation order.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub lambda: Weight,
    pub order: usize,
    pub step: usize,
    /// max |G(K) − G(K+step)| entrywise.
    pub diff: f64,
    /// max |G(K+step) − G(K+2·step)| entrywise.
    pub next_diff: f64,
    /// `next_diff / diff`, or 0 when both vanish.
    pub ratio: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub diff_exact: Rational,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::to_string(r))
}

fn max_abs_diff(a: &GramMatrix, b: &GramMatrix) -> Rational {
    let mut best = Rational::zero();
    for (ra, rb) in a.entries.iter().zip(&b.entries) {
        for (x, y) in ra.iter().zip(rb) {
            let d = (x - y).abs();
            if d > best {
                best = d;
            }
        }
    }
    best
}

pub const DEFAULT_STABILITY_STEP: usize = 10;

pub fn stability_probe(lambda: &Weight, spec: &CSpec, n: usize, order: usize, step: usize) -> Result<StabilityReport> {
    let grams: Vec<GramMatrix> = [order, order + step, order + 2 * step]
        .iter()
        .map(|&k| gram_matrix(lambda, &build_delta(spec, n, k)?))
        .collect::<Result<_>>()?;
    let d1 = max_abs_diff(&grams[0], &grams[1]);
    let d2 = max_abs_diff(&grams[1], &grams[2]);
    let (f1, f2) = (rational::to_f64(&d1), rational::to_f64(&d2));
    let ratio = if d1.is_zero() { 0.0 } else { rational::to_f64(&(&d2 / &d1)) };
    Ok(StabilityReport {
        lambda: lambda.clone(),
        order,
        step,
        diff: f1,
        next_diff: f2,
        ratio,
        diff_exact: d1,
    })
}

/// Expands coordinates and multiplies out the inner product the slow way;
/// used to cross-check [`inner_product_coords`].
pub fn inner_product_expanded(f: &Coords, g: &Coords, delta: &DeltaApprox) -> Result<Rational> {
    let n = delta.dim;
    let f = laurent::from_coordinates(n, f);
    let g = laurent::from_coordinates(n, g);
    Ok((&(&f * &g.conjugate()) * delta.poly()).constant_term())
}

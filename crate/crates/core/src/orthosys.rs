//! Orthogonal polynomials by exact Gram-Schmidt, the truncated asymptotic
//! functions `P_λ^{(m)}`, and the checks that compare the two.
//!
//! Polynomials are stored monic (`coords[λ] = 1`) with an exact `norm_sq`.
//! The unit-norm polynomial is `P̃_λ / √norm_sq`; square roots only appear
//! at the reporting boundary.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfuncs::{self, CSpec, Root};
use crate::error::{Error, Result};
use crate::hyperoctahedral::{self, Dominance, Weight};
use crate::innerproduct::{self, Coords, DeltaApprox, ScaledCoords};
use crate::laurent::{self, IntPoly, LaurentPoly};
use crate::linalg;
use crate::rational::{self, RawRatio, Rational};

/// Fractional bits of the fixed-point arithmetic behind error norms.
const FIXED_BITS: u64 = 256;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    #[default]
    Dominance,
    Lexicographic,
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ordering> {
        match s {
            "dominance" => Ok(Ordering::Dominance),
            "lexicographic" | "lex" => Ok(Ordering::Lexicographic),
            other => Err(Error::config("ordering", format!("unknown ordering {other:?}"))),
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::Dominance => "dominance",
            Ordering::Lexicographic => "lexicographic",
        })
    }
}

/// Weights strictly below λ that enter the Gram-Schmidt system.
pub fn predecessors(lambda: &Weight, ordering: Ordering) -> Vec<Weight> {
    match ordering {
        Ordering::Dominance => hyperoctahedral::weights_below(lambda)
            .into_iter()
            .filter(|mu| mu != lambda)
            .collect(),
        Ordering::Lexicographic => hyperoctahedral::dominant_weights(lambda.dim(), lambda.parts()[0])
            .into_iter()
            .filter(|mu| mu < lambda)
            .collect(),
    }
}

/// Monic orthogonal polynomial `P̃_λ = m_λ + Σ_{μ below λ} c_μ m_μ`.
///
/// The exact solution is held over one common denominator; the reduced
/// coordinates and norm are derived on first access.
#[derive(Clone, Debug)]
pub struct MonicOrthoPoly {
    pub lambda: Weight,
    pub ordering: Ordering,
    /// Truncation order of the weight used.
    pub order: usize,
    scaled: ScaledCoords,
    norm: RawRatio,
    coords: OnceLock<Coords>,
    norm_sq: OnceLock<Rational>,
}

impl PartialEq for MonicOrthoPoly {
    fn eq(&self, other: &Self) -> bool {
        self.lambda == other.lambda
            && self.ordering == other.ordering
            && self.order == other.order
            && self.coords() == other.coords()
            && self.norm_sq() == other.norm_sq()
    }
}

impl MonicOrthoPoly {
    pub fn coords(&self) -> &Coords {
        self.coords.get_or_init(|| self.scaled.to_coords())
    }

    /// `⟨P̃, P̃⟩_Δ`.
    pub fn norm_sq(&self) -> &Rational {
        self.norm_sq.get_or_init(|| self.norm.reduce())
    }

    pub fn scaled(&self) -> &ScaledCoords {
        &self.scaled
    }

    /// `⟨P̃, P̃⟩_Δ` unreduced.
    pub fn norm_raw(&self) -> &RawRatio {
        &self.norm
    }

    pub fn to_poly(&self) -> LaurentPoly {
        laurent::from_coordinates(self.lambda.dim(), self.coords())
    }

    /// `𝒩_λ = √norm_sq`, in double precision.
    pub fn n_lambda(&self) -> f64 {
        self.norm.to_f64().sqrt()
    }
}

pub fn monic_orthogonal(lambda: &Weight, ordering: Ordering, delta: &DeltaApprox) -> Result<MonicOrthoPoly> {
    if lambda.dim() != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: delta.dim(),
            found: lambda.dim(),
        });
    }
    let below = predecessors(lambda, ordering);
    let mut basis = below.clone();
    basis.push(lambda.clone());
    let g = innerproduct::gram_integer(&basis, delta);
    let k = below.len();
    let a: Vec<Vec<BigInt>> = g[..k].iter().map(|row| row[..k].to_vec()).collect();
    let b: Vec<BigInt> = g[..k].iter().map(|row| -&row[k]).collect();
    let (mut y, mut d) = linalg::solve_integer(&a, &b).map_err(|s| Error::Degenerate {
        weight: lambda.to_string(),
        minor: s.step,
    })?;
    if d.is_negative() {
        d = -d;
        y.iter_mut().for_each(|v| *v = -&*v);
    }
    // ⟨P̃,P̃⟩ = G_λλ + Σ c_ν G_νλ, over the denominator d·D
    let mut norm_num = &d * &g[k][k];
    for (yi, row) in y.iter().zip(&g[..k]) {
        norm_num += yi * &row[k];
    }
    let norm = RawRatio::new(norm_num, &d * delta.denominator());
    let mut num: BTreeMap<Weight, BigInt> = below.into_iter().zip(y).filter(|(_, v)| !v.is_zero()).collect();
    num.insert(lambda.clone(), d.clone());
    Ok(MonicOrthoPoly {
        lambda: lambda.clone(),
        ordering,
        order: delta.order(),
        scaled: ScaledCoords { num, den: d },
        norm,
        coords: OnceLock::new(),
        norm_sq: OnceLock::new(),
    })
}

/// Monomial coordinates of the truncated asymptotic function `P_λ^{(m)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPoly {
    pub lambda: Weight,
    pub m: usize,
    pub coords: Coords,
}

impl AsymptoticPoly {
    pub fn to_poly(&self) -> LaurentPoly {
        laurent::from_coordinates(self.lambda.dim(), &self.coords)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coords.get(&self.lambda).cloned().unwrap_or_else(Rational::zero)
    }
}

/// `Ĉ^{(m)}` on integer coefficients: `(terms, D)` with `Ĉ^{(m)} = terms / D`.
fn truncated_c_product_int(spec: &CSpec, n: usize, m: usize) -> Result<(IntPoly, BigInt)> {
    let scaled = |series: &cfuncs::TruncSeries| -> (Vec<(i64, BigInt)>, BigInt) {
        let d = rational::common_denominator(series.coeffs());
        let terms = series
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (-(p as i64), rational::scale_to_integer(c, &d)))
            .collect();
        (terms, d)
    };
    let (c0, d0) = scaled(&cfuncs::taylor_c(spec, Root::Long, m)?);
    let (c1, d1) = scaled(&cfuncs::taylor_c(spec, Root::Short, 2 * m)?);
    let mut out: IntPoly = IntPoly::new();
    out.insert(vec![0; n], BigInt::one());
    let mut denom = BigInt::one();
    for j in 0..n {
        for k in j + 1..n {
            for sign in [1i64, -1] {
                let mut dir = vec![0i64; n];
                dir[j] = 1;
                dir[k] = sign;
                out = laurent::mul_along(&out, &c0, &dir);
                denom *= &d0;
            }
        }
    }
    for j in 0..n {
        let mut dir = vec![0i64; n];
        dir[j] = 1;
        out = laurent::mul_along(&out, &c1, &dir);
        denom *= &d1;
    }
    Ok((out, denom))
}

/// `Ĉ^{(m)}(x) = ∏_{j<k} ĉ_0^{(m)}(z_j⁻¹z_k⁻¹) ĉ_0^{(m)}(z_j⁻¹z_k) ∏_j ĉ_1^{(m)}(z_j⁻¹)`,
/// with `ĉ_0` cut after `m+1` and `ĉ_1` after `2m+1` Taylor terms.
pub fn truncated_c_product(spec: &CSpec, n: usize, m: usize) -> Result<LaurentPoly> {
    let (terms, denom) = truncated_c_product_int(spec, n, m)?;
    LaurentPoly::from_terms(n, terms.into_iter().map(|(e, c)| (e, Rational::new(c, denom.clone()))))
}

fn lambda_plus_rho(lambda: &Weight) -> Vec<i64> {
    lambda
        .parts()
        .iter()
        .zip(hyperoctahedral::rho(lambda.dim()).parts())
        .map(|(a, b)| a + b)
        .collect()
}

/// `P_λ^{(m)} = δ⁻¹ Σ_w det(w) (Ĉ^{(m)} z^{λ+ρ})(x_w)`, computed by
/// antisymmetrizing the product and dividing by `δ` exactly.
pub fn truncated_asymptotic(lambda: &Weight, m: usize, spec: &CSpec) -> Result<AsymptoticPoly> {
    let n = lambda.dim();
    let (product, denom) = truncated_c_product_int(spec, n, m)?;
    let shift = lambda_plus_rho(lambda);
    let shifted: IntPoly = product
        .into_iter()
        .map(|(e, c)| (e.iter().zip(&shift).map(|(a, b)| a + b).collect(), c))
        .collect();
    let alternant = laurent::antisymmetrize_int(&shifted, n);
    // δ is monic, so the quotient stays integral over the same denominator
    let quotient = laurent::exact_divide_int(alternant, &laurent::cached_denominator(n))?;
    let coords: Coords = quotient
        .into_iter()
        .filter(|(e, _)| hyperoctahedral::is_dominant(e))
        .map(|(e, c)| Ok((Weight::new(e)?, Rational::new(c, denom.clone()))))
        .collect::<Result<_>>()?;
    Ok(AsymptoticPoly {
        lambda: lambda.clone(),
        m,
        coords,
    })
}

/// The same function assembled term by term from Weyl characters: each
/// term `c z^{−n}` of `Ĉ^{(m)}` contributes `c · parity · χ_{rep − ρ}` where
/// `rep` is the dominant representative of `λ + ρ − n`, or nothing when that
/// vector is singular.
pub fn truncated_asymptotic_by_characters(lambda: &Weight, m: usize, spec: &CSpec) -> Result<AsymptoticPoly> {
    let n = lambda.dim();
    let shifted = lambda_plus_rho(lambda);
    let rho = hyperoctahedral::rho(n);
    let product = truncated_c_product(spec, n, m)?;
    let mut coords: Coords = BTreeMap::new();
    for (e, c) in product.terms() {
        let v: Vec<i64> = shifted.iter().zip(e).map(|(a, b)| a + b).collect();
        let dr = hyperoctahedral::dominant_representative(&v);
        if dr.singular {
            continue;
        }
        let mu = Weight::new(dr.rep.iter().zip(rho.parts()).map(|(a, b)| a - b).collect())?;
        let factor = c * Rational::from_integer(dr.parity.into());
        for (nu, k) in laurent::character_coordinates(&mu) {
            let entry = coords.entry(nu).or_insert_with(Rational::zero);
            *entry += &factor * k;
        }
    }
    coords.retain(|_, v| !v.is_zero());
    Ok(AsymptoticPoly {
        lambda: lambda.clone(),
        m,
        coords,
    })
}

/// Default stand-in level for `P^∞`: `m + 10` in general, `max(M, m)` when
/// both reduced c-functions are polynomials of degree `M` (then `P^{(M)} = P^∞`).
pub fn default_m_ref(spec: &CSpec, m: usize) -> usize {
    match spec.polynomial_degree() {
        Some(deg) => deg.max(m),
        None => m + 10,
    }
}

/// Distance between the unit-norm orthogonal polynomial and `P^{(m_ref)}`.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub lambda: Weight,
    pub min_gap: i64,
    pub m: usize,
    pub m_ref: usize,
    #[serde(rename = "K")]
    pub order: usize,
    /// `1 + ‖Q‖² − 2⟨P̃,Q⟩/𝒩_λ`, evaluated to 256 fractional bits.
    pub err_norm_sq: f64,
    /// The same value as the exact rational `fixed / 2^256` it was computed as.
    #[serde(serialize_with = "ser_rational")]
    pub err_norm_sq_exact: Rational,
    pub err_norm: f64,
    /// `𝒩_λ = √⟨P̃,P̃⟩_Δ`.
    pub n_lambda: f64,
    /// `‖P^{(m_ref)}‖_Δ`.
    pub asym_norm: f64,
    /// `|𝒩_λ − 1|`.
    pub n_lambda_dev: f64,
    /// `|‖P^{(m_ref)}‖_Δ − 1|`.
    pub asym_norm_dev: f64,
    pub tail_hint: f64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::to_string(r))
}

/// `|√x − 1|` for `x` near 1, without cancellation: `|x − 1| / (√x + 1)`.
fn sqrt_distance_to_one(x: &Rational) -> f64 {
    rational::to_f64(&(x - Rational::one()).abs()) / (rational::to_f64(x).sqrt() + 1.0)
}

/// [`sqrt_distance_to_one`] for a fixed-point value `x / 2^FIXED_BITS`.
fn sqrt_distance_to_one_fixed(x: &BigInt) -> f64 {
    let one = BigInt::one() << FIXED_BITS;
    let diff = RawRatio::new((x - &one).abs(), one.clone()).to_f64();
    let v = RawRatio::new(x.clone(), one).to_f64();
    diff / (v.max(0.0).sqrt() + 1.0)
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str = "lambda,min_gap,m,K,err_norm,n_lambda,asym_norm,tail_hint";

    pub fn csv_row(&self, digits: usize) -> String {
        format!(
            "\"{}\",{},{},{},{},{},{},{}",
            self.lambda.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
            self.min_gap,
            self.m_ref,
            self.order,
            fmt_f64(self.err_norm, digits),
            fmt_f64(self.n_lambda, digits),
            fmt_f64(self.asym_norm, digits),
            fmt_f64(self.tail_hint, digits),
        )
    }
}

/// Scientific notation with `digits` significant digits.
pub fn fmt_f64(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

pub fn asymptotic_error(
    lambda: &Weight,
    spec: &CSpec,
    delta: &DeltaApprox,
    m: usize,
    m_ref: usize,
) -> Result<ErrorReport> {
    if m_ref < m {
        return Err(Error::Precondition(format!("m_ref = {m_ref} must be at least m = {m}")));
    }
    let p = monic_orthogonal(lambda, Ordering::Dominance, delta)?;
    let q = ScaledCoords::from_coords(&truncated_asymptotic(lambda, m_ref, spec)?.coords);
    let qq = innerproduct::inner_product_scaled(&q, &q, delta)?;
    let pq = innerproduct::inner_product_scaled(p.scaled(), &q, delta)?;
    if !p.norm_raw().is_positive() {
        return Err(Error::Degenerate {
            weight: lambda.to_string(),
            minor: p.scaled().num.len(),
        });
    }
    // ‖P̃/𝒩 − Q‖² = 1 + ‖Q‖² − 2⟨P̃,Q⟩/𝒩 in fixed point
    let one = BigInt::one() << FIXED_BITS;
    let ns = p.norm_raw().fixed(FIXED_BITS);
    let qq_fixed = qq.fixed(FIXED_BITS);
    let root = (&ns << FIXED_BITS).sqrt();
    let err_fixed = &one + &qq_fixed - (pq.fixed(FIXED_BITS) << (FIXED_BITS + 1)) / &root;
    let err_norm_sq_exact = Rational::new(err_fixed, one);
    let err_norm_sq = rational::to_f64(&err_norm_sq_exact);
    Ok(ErrorReport {
        lambda: lambda.clone(),
        min_gap: hyperoctahedral::min_gap(lambda),
        m,
        m_ref,
        order: delta.order(),
        err_norm_sq,
        err_norm_sq_exact,
        err_norm: err_norm_sq.max(0.0).sqrt(),
        n_lambda: p.n_lambda(),
        asym_norm: qq.to_f64().sqrt(),
        n_lambda_dev: sqrt_distance_to_one_fixed(&ns),
        asym_norm_dev: sqrt_distance_to_one_fixed(&qq_fixed),
        tail_hint: delta.tail_hint(),
    })
}

/// Outcome of comparing Gram-Schmidt output with `P^{(M)}` for a polynomial spec.
#[derive(Clone, Debug, Serialize)]
pub struct ExactReport {
    pub lambda: Weight,
    pub min_gap: i64,
    #[serde(rename = "M")]
    pub degree: usize,
    /// `max_μ |c_μ(P̃) − c_μ(P^{(M)})/lead|`.
    pub coord_dev: f64,
    pub coords_equal: bool,
    /// `|‖P^{(M)}‖_Δ − 1|`, checked only when `m(λ) ≥ M`.
    pub norm_dev: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_exact(lambda: &Weight, spec: &CSpec, delta: &DeltaApprox, ordering: Ordering, tol: f64) -> Result<ExactReport> {
    let degree = spec
        .polynomial_degree()
        .ok_or_else(|| Error::Precondition("exactness needs polynomial reduced c-functions".into()))?;
    let gap = hyperoctahedral::min_gap(lambda);
    if gap < degree as i64 - 1 {
        return Err(Error::Precondition(format!(
            "min_gap{} = {gap} is below M - 1 = {}",
            lambda,
            degree as i64 - 1
        )));
    }
    let p = monic_orthogonal(lambda, ordering, delta)?;
    let q = truncated_asymptotic(lambda, degree, spec)?;
    let lead = q.leading_coeff();
    let (coord_dev, coords_equal) = if lead.is_zero() {
        (f64::INFINITY, false)
    } else {
        let mut worst = Rational::zero();
        for mu in p.coords().keys().chain(q.coords.keys()) {
            let a = p.coords().get(mu).cloned().unwrap_or_else(Rational::zero);
            let b = q.coords.get(mu).cloned().unwrap_or_else(Rational::zero) / &lead;
            let d = (a - b).abs();
            if d > worst {
                worst = d;
            }
        }
        (rational::to_f64(&worst), worst.is_zero())
    };
    let norm_dev = if gap >= degree as i64 {
        let qq = innerproduct::inner_product_coords(&q.coords, &q.coords, delta)?;
        Some(sqrt_distance_to_one(&qq))
    } else {
        None
    };
    let pass = coord_dev <= tol && norm_dev.is_none_or(|d| d <= tol);
    Ok(ExactReport {
        lambda: lambda.clone(),
        min_gap: gap,
        degree,
        coord_dev,
        coords_equal,
        norm_dev,
        tol,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BiorthReport {
    pub lambda: Weight,
    pub m: usize,
    pub max_dev: f64,
    #[serde(serialize_with = "ser_rational")]
    pub max_dev_exact: Rational,
    /// `⟨P^{(m)}, m_μ⟩_Δ` for every μ ⪯ λ, as `"p/q"` strings.
    #[serde(serialize_with = "ser_pairs")]
    pub values: Vec<(Weight, Rational)>,
}

fn ser_pairs<S: serde::Serializer>(v: &[(Weight, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let m: Vec<(&Weight, String)> = v.iter().map(|(w, r)| (w, rational::to_string(r))).collect();
    m.serialize(s)
}

/// `⟨P_λ^{(m)}, m_μ⟩_Δ` against `δ_{λμ}` for all μ ⪯ λ.
pub fn biorthogonality_check(lambda: &Weight, m: usize, delta: &DeltaApprox) -> Result<BiorthReport> {
    let gap = hyperoctahedral::min_gap(lambda);
    if m as i64 > gap {
        return Err(Error::Precondition(format!("m = {m} exceeds min_gap{lambda} = {gap}")));
    }
    let p = truncated_asymptotic(lambda, m, delta.spec())?;
    let values: Vec<(Weight, Rational)> = hyperoctahedral::weights_below(lambda)
        .into_par_iter()
        .map(|mu| {
            let single: Coords = [(mu.clone(), Rational::one())].into_iter().collect();
            innerproduct::inner_product_coords(&p.coords, &single, delta).map(|v| (mu, v))
        })
        .collect::<Result<_>>()?;
    let mut worst = Rational::zero();
    for (mu, v) in &values {
        let target = if mu == lambda { Rational::one() } else { Rational::zero() };
        let d = (v - target).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(BiorthReport {
        lambda: lambda.clone(),
        m,
        max_dev: rational::to_f64(&worst),
        max_dev_exact: worst,
        values,
    })
}

/// Least-squares line through `(x, log err)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Fits `log err = slope·x + intercept`. Every error must be positive.
pub fn decay_fit(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!("decay fit needs at least 3 points, got {}", points.len())));
    }
    if let Some((x, e)) = points.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(Error::Domain(format!("nonpositive error {e} at x = {x}")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, e)| (x, e.ln())).collect();
    fit_line(&logs)
}

/// Ordinary least squares on already-transformed `(x, y)` pairs.
pub fn fit_line(points: &[(f64, f64)]) -> Result<DecayFit> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("decay fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Ok(DecayFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Pairwise `⟨P_λ, P_μ⟩_Δ` of unit-normalized polynomials over a weight box.
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub weights: Vec<Weight>,
    /// `|⟨P_λ, P_μ⟩_Δ|` off the diagonal, 0 on it.
    pub deviations: Vec<Vec<f64>>,
    pub max_dev: f64,
    /// Pair attaining `max_dev`.
    pub worst_pair: Option<(Weight, Weight)>,
}

pub fn orthogonality_scan(weights: &[Weight], delta: &DeltaApprox, ordering: Ordering) -> Result<ScanReport> {
    let polys: Vec<MonicOrthoPoly> = weights
        .par_iter()
        .map(|w| monic_orthogonal(w, ordering, delta))
        .collect::<Result<_>>()?;
    let n = weights.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let ip = innerproduct::inner_product_scaled(polys[i].scaled(), polys[j].scaled(), delta)?;
            Ok(ip.to_f64().abs() / (polys[i].n_lambda() * polys[j].n_lambda()))
        })
        .collect::<Result<_>>()?;
    let mut deviations = vec![vec![0.0; n]; n];
    let mut max_dev = 0.0;
    let mut worst_pair = None;
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        deviations[i][j] = v;
        deviations[j][i] = v;
        if v > max_dev {
            max_dev = v;
            worst_pair = Some((weights[i].clone(), weights[j].clone()));
        }
    }
    Ok(ScanReport {
        weights: weights.to_vec(),
        deviations,
        max_dev,
        worst_pair,
    })
}

/// True when every weight in the support of `coords` is dominated by λ.
pub fn supported_below(lambda: &Weight, coords: &Coords) -> bool {
    coords.keys().all(|mu| {
        matches!(
            hyperoctahedral::compare_dominance(mu, lambda),
            Ok(Dominance::Less | Dominance::Equal)
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::innerproduct::build_delta;
    use crate::rational::{int, ratio};

    fn w(p: &[i64]) -> Weight {
        Weight::new(p.to_vec()).unwrap()
    }

    fn koornwinder_sample() -> CSpec {
        CSpec::Koornwinder {
            q: ratio(1, 2),
            t: ratio(1, 3),
            t_r: [ratio(1, 2), ratio(-1, 3), ratio(1, 4), ratio(-1, 5)],
        }
    }

    fn hl(t: Rational, t0: Rational, t1: Rational) -> CSpec {
        CSpec::HallLittlewood { t, t0, t1 }
    }

    #[test]
    fn zero_weight_is_constant() {
        let d = build_delta(&koornwinder_sample(), 2, 6).unwrap();
        let p = monic_orthogonal(&w(&[0, 0]), Ordering::Dominance, &d).unwrap();
        assert_eq!(p.coords().len(), 1);
        assert_eq!(p.norm_sq(), &d.poly().constant_term());
    }

    #[test]
    fn symplectic_rank_one() {
        let d = build_delta(&CSpec::trivial(), 1, 3).unwrap();
        let p = monic_orthogonal(&w(&[2]), Ordering::Dominance, &d).unwrap();
        let expect: Coords = [(w(&[2]), int(1)), (w(&[0]), int(1))].into_iter().collect();
        assert_eq!(p.coords(), &expect);
        assert_eq!(p.norm_sq(), &int(1));
        assert_eq!(p.coords(), &laurent::character_coordinates(&w(&[2])));
    }

    #[test]
    fn koornwinder_rank_one_first_degree() {
        let d = build_delta(&koornwinder_sample(), 1, 12).unwrap();
        let p = monic_orthogonal(&w(&[1]), Ordering::Dominance, &d).unwrap();
        let g00 = innerproduct::monomial_inner(&w(&[0]), &w(&[0]), &d);
        let g01 = innerproduct::monomial_inner(&w(&[0]), &w(&[1]), &d);
        let c = p.coords().get(&w(&[0])).cloned().unwrap_or_else(Rational::zero);
        assert_eq!(c, -g01 / g00);
    }

    #[test]
    fn orthogonal_against_predecessors() {
        let d = build_delta(&koornwinder_sample(), 2, 8).unwrap();
        for ordering in [Ordering::Dominance, Ordering::Lexicographic] {
            let lambda = w(&[3, 0]);
            let p = monic_orthogonal(&lambda, ordering, &d).unwrap();
            for mu in predecessors(&lambda, ordering) {
                let single: Coords = [(mu, int(1))].into_iter().collect();
                assert!(innerproduct::inner_product_coords(p.coords(), &single, &d).unwrap().is_zero());
            }
        }
        // the lexicographic system also sees the incomparable (2,2)
        assert!(predecessors(&w(&[3, 0]), Ordering::Lexicographic).contains(&w(&[2, 2])));
        assert!(!predecessors(&w(&[3, 0]), Ordering::Dominance).contains(&w(&[2, 2])));
    }

    #[test]
    fn degree_one_rank_one_oracle() {
        // δ⁻¹[(1 − t0 z⁻¹) z³ − (1 − t0 z) z⁻³] = m_(2) − t0 m_(1) + m_(0)
        let spec = hl(int(0), ratio(1, 2), int(0));
        let p = truncated_asymptotic(&w(&[2]), 1, &spec).unwrap();
        let expect: Coords = [(w(&[2]), int(1)), (w(&[1]), ratio(-1, 2)), (w(&[0]), int(1))]
            .into_iter()
            .collect();
        assert_eq!(p.coords, expect);
    }

    #[test]
    fn level_zero_gives_characters() {
        for lambda in [w(&[3, 1]), w(&[2, 2]), w(&[0, 0])] {
            let p = truncated_asymptotic(&lambda, 0, &koornwinder_sample()).unwrap();
            assert_eq!(p.coords, laurent::character_coordinates(&lambda));
            let p = truncated_asymptotic(&lambda, 4, &CSpec::trivial()).unwrap();
            assert_eq!(p.coords, laurent::character_coordinates(&lambda));
        }
    }

    #[test]
    fn two_paths_agree() {
        let spec = koornwinder_sample();
        for lambda in hyperoctahedral::dominant_weights(2, 3) {
            for m in 0..=2 {
                let a = truncated_asymptotic(&lambda, m, &spec).unwrap();
                let b = truncated_asymptotic_by_characters(&lambda, m, &spec).unwrap();
                assert_eq!(a, b, "λ = {lambda}, m = {m}");
            }
        }
    }

    #[test]
    fn symplectic_error_vanishes() {
        let d = build_delta(&CSpec::trivial(), 2, 2).unwrap();
        let r = asymptotic_error(&w(&[2, 1]), &CSpec::trivial(), &d, 0, 0).unwrap();
        assert_eq!(r.err_norm_sq, 0.0);
        assert_eq!(r.n_lambda, 1.0);
        let e = verify_exact(&w(&[3, 1]), &CSpec::trivial(), &d, Ordering::Dominance, 0.0).unwrap();
        assert!(e.pass && e.coords_equal);
    }

    #[test]
    fn degree_one_exactness() {
        let spec = hl(ratio(1, 3), ratio(1, 2), ratio(-1, 4));
        let d = build_delta(&spec, 2, 30).unwrap();
        let r = verify_exact(&w(&[2, 1]), &spec, &d, Ordering::Dominance, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.norm_dev.is_some());
        let r = verify_exact(&w(&[1, 1]), &spec, &d, Ordering::Dominance, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.norm_dev.is_none());
        let err = verify_exact(&w(&[2, 1]), &koornwinder_sample(), &d, Ordering::Dominance, 1e-8);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn biorthogonality_symplectic_is_exact() {
        let d = build_delta(&CSpec::trivial(), 2, 2).unwrap();
        let r = biorthogonality_check(&w(&[3, 1]), 1, &d).unwrap();
        assert!(r.max_dev_exact.is_zero());
        assert!(biorthogonality_check(&w(&[3, 1]), 2, &d).is_err());
    }

    #[test]
    fn fits_exact_lines() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, (-0.7 * x as f64 + 1.0).exp())).collect();
        let f = decay_fit(&pts).unwrap();
        assert!((f.slope + 0.7).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        let halving: Vec<(f64, f64)> = (0..4).map(|x| (x as f64, 0.5f64.powi(x))).collect();
        assert!((decay_fit(&halving).unwrap().slope + 2f64.ln()).abs() < 1e-12);
        assert!(decay_fit(&[(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
        assert!(decay_fit(&[(0.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn symplectic_scan_is_orthogonal() {
        let d = build_delta(&CSpec::trivial(), 2, 2).unwrap();
        let r = orthogonality_scan(&hyperoctahedral::dominant_weights(2, 3), &d, Ordering::Dominance).unwrap();
        assert_eq!(r.max_dev, 0.0);
    }

    #[test]
    fn ordering_parses() {
        assert_eq!("lex".parse::<Ordering>().unwrap(), Ordering::Lexicographic);
        assert_eq!("dominance".parse::<Ordering>().unwrap(), Ordering::Dominance);
        assert!("other".parse::<Ordering>().is_err());
    }
}

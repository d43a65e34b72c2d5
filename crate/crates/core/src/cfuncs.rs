//! Reduced c-functions `ĉ_0`, `ĉ_1` and their truncated Taylor series.
//!
//! Three families are supported: explicit polynomials, the degree-one
//! (Hall-Littlewood) case, and the q-Pochhammer quotients of the
//! Koornwinder-Macdonald weight. All parameters are exact rationals.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Which reduced c-function: `ĉ_0` (long roots `x_j ± x_k`) or `ĉ_1` (short roots `x_j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Root {
    Long = 0,
    Short = 1,
}

impl Root {
    pub fn from_index(p: u8) -> Result<Root> {
        match p {
            0 => Ok(Root::Long),
            1 => Ok(Root::Short),
            _ => Err(Error::Precondition(format!("c-function index must be 0 or 1, got {p}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CSpec {
    /// Polynomial `ĉ_0`, `ĉ_1` given by their coefficient lists, constant terms 1.
    ExplicitPoly { c0: Vec<Rational>, c1: Vec<Rational> },
    /// `ĉ_0(z) = 1 − tz`, `ĉ_1(z) = (1 − t0 z)(1 − t1 z)`.
    HallLittlewood { t: Rational, t0: Rational, t1: Rational },
    /// `ĉ_0(z) = (tz;q)_∞/(qz;q)_∞`, `ĉ_1(z) = ∏_r (t_r z;q)_∞/(qz²;q)_∞`.
    Koornwinder { q: Rational, t: Rational, t_r: [Rational; 4] },
}

impl CSpec {
    /// The symplectic-character case: `ĉ_0 = ĉ_1 = 1`.
    pub fn trivial() -> Self {
        CSpec::ExplicitPoly {
            c0: vec![Rational::one()],
            c1: vec![Rational::one()],
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CSpec::ExplicitPoly { .. } => "explicit",
            CSpec::HallLittlewood { .. } => "hall-littlewood",
            CSpec::Koornwinder { .. } => "koornwinder",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: &Rational| {
            if v.abs() >= Rational::one() {
                Err(Error::Domain(format!("{name} = {} must lie in (-1, 1)", rational::to_string(v))))
            } else {
                Ok(())
            }
        };
        match self {
            CSpec::ExplicitPoly { c0, c1 } => {
                for (name, c) in [("c0", c0), ("c1", c1)] {
                    if c.first() != Some(&Rational::one()) {
                        return Err(Error::Domain(format!("{name} must have constant coefficient 1")));
                    }
                }
                Ok(())
            }
            CSpec::HallLittlewood { t, t0, t1 } => {
                open_unit("t", t)?;
                open_unit("t0", t0)?;
                open_unit("t1", t1)
            }
            CSpec::Koornwinder { q, t, t_r } => {
                if !q.is_positive() || *q >= Rational::one() {
                    return Err(Error::Domain(format!("q = {} must lie in (0, 1)", rational::to_string(q))));
                }
                open_unit("t", t)?;
                for (r, tr) in t_r.iter().enumerate() {
                    open_unit(&format!("t_r[{r}]"), tr)?;
                }
                Ok(())
            }
        }
    }

    /// `M` when both reduced c-functions are polynomials of degree at most
    /// `M` and `2M`; `None` for the Koornwinder family.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            CSpec::ExplicitPoly { c0, c1 } => {
                let d0 = degree(c0);
                let d1 = degree(c1);
                Some(d0.max(d1.div_ceil(2)))
            }
            CSpec::HallLittlewood { .. } => Some(1),
            CSpec::Koornwinder { .. } => None,
        }
    }
}

fn degree(c: &[Rational]) -> usize {
    c.iter().rposition(|x| !x.is_zero()).unwrap_or(0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_r: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1: Option<Vec<String>>,
}

impl CSpec {
    /// Parses the JSON object form, e.g.
    /// `{"family": "koornwinder", "q": "1/2", "t": "1/3", "t_r": ["1/2","-1/3","1/4","-1/5"]}`.
    pub fn from_json_value(v: &serde_json::Value) -> Result<CSpec> {
        let raw: RawSpec = serde_json::from_value(v.clone()).map_err(|e| Error::config("spec", e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(s: &str) -> Result<CSpec> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::config("spec", e.to_string()))?;
        Self::from_json_value(&v)
    }

    fn from_raw(raw: RawSpec) -> Result<CSpec> {
        fn need(field: &str, v: &Option<String>) -> Result<Rational> {
            let s = v.as_deref().ok_or_else(|| Error::config(field, "missing"))?;
            rational::parse_field(field, s)
        }
        fn list(field: &str, v: &Option<Vec<String>>) -> Result<Vec<Rational>> {
            let v = v.as_ref().ok_or_else(|| Error::config(field, "missing"))?;
            v.iter()
                .enumerate()
                .map(|(i, s)| rational::parse_field(&format!("{field}[{i}]"), s))
                .collect()
        }
        let spec = match raw.family.as_str() {
            "koornwinder" => {
                let t_r = list("t_r", &raw.t_r)?;
                let t_r: [Rational; 4] = t_r
                    .try_into()
                    .map_err(|_| Error::config("t_r", "expected exactly four parameters"))?;
                CSpec::Koornwinder {
                    q: need("q", &raw.q)?,
                    t: need("t", &raw.t)?,
                    t_r,
                }
            }
            "hall-littlewood" | "hall_littlewood" => CSpec::HallLittlewood {
                t: need("t", &raw.t)?,
                t0: need("t0", &raw.t0)?,
                t1: need("t1", &raw.t1)?,
            },
            "explicit" | "explicit-poly" => CSpec::ExplicitPoly {
                c0: list("c0", &raw.c0)?,
                c1: list("c1", &raw.c1)?,
            },
            other => return Err(Error::config("family", format!("unknown family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let s = |r: &Rational| Some(rational::to_string(r));
        let raw = match self {
            CSpec::ExplicitPoly { c0, c1 } => RawSpec {
                family: self.family().into(),
                q: None,
                t: None,
                t0: None,
                t1: None,
                t_r: None,
                c0: Some(c0.iter().map(rational::to_string).collect()),
                c1: Some(c1.iter().map(rational::to_string).collect()),
            },
            CSpec::HallLittlewood { t, t0, t1 } => RawSpec {
                family: self.family().into(),
                q: None,
                t: s(t),
                t0: s(t0),
                t1: s(t1),
                t_r: None,
                c0: None,
                c1: None,
            },
            CSpec::Koornwinder { q, t, t_r } => RawSpec {
                family: self.family().into(),
                q: s(q),
                t: s(t),
                t0: None,
                t1: None,
                t_r: Some(t_r.iter().map(rational::to_string).collect()),
                c0: None,
                c1: None,
            },
        };
        serde_json::to_value(raw).expect("plain strings serialize")
    }
}

impl Serialize for CSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        CSpec::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

/// The first `K+1` Taylor coefficients `a_0 … a_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series has at least one coefficient");
        TruncSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = Rational::one();
        TruncSeries { coeffs }
    }

    /// Zero-pads or truncates `c` to order `K`.
    pub fn from_poly(c: &[Rational], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| c.get(n).cloned().unwrap_or_else(Rational::zero))
            .collect();
        TruncSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        TruncSeries::from_poly(&self.coeffs, order)
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order().min(other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncSeries { coeffs: out }
    }

    /// `f(z) ↦ f(z^k)`, truncated at the same order.
    pub fn dilate(&self, k: usize) -> TruncSeries {
        let order = self.order();
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i * k > order {
                break;
            }
            out[i * k] = a.clone();
        }
        TruncSeries { coeffs: out }
    }

    pub fn max_abs_tail(&self) -> Rational {
        self.coeffs.last().map(|c| c.abs()).unwrap_or_else(Rational::zero)
    }
}

/// Taylor coefficients of `(az;q)_∞` through order `K`.
///
/// Uses the functional equation `(az;q)_∞ = (1 − az)(aqz;q)_∞`, which gives
/// `c_n (1 − q^n) = −a q^{n−1} c_{n−1}`.
pub fn pochhammer_inf_series(a: &Rational, q: &Rational, order: usize) -> Result<TruncSeries> {
    if q.abs() >= Rational::one() {
        return Err(Error::Domain(format!("|q| = |{}| must be < 1", rational::to_string(q))));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Rational::one());
    let mut q_pow = Rational::one(); // q^{n-1}
    for n in 1..=order {
        let q_n = &q_pow * q;
        let c = -(&coeffs[n - 1] * a * &q_pow) / (Rational::one() - &q_n);
        coeffs.push(c);
        q_pow = q_n;
    }
    Ok(TruncSeries { coeffs })
}

/// Truncated Taylor series of `ĉ_p` through order `K`.
pub fn taylor_c(spec: &CSpec, root: Root, order: usize) -> Result<TruncSeries> {
    spec.validate()?;
    Ok(match (spec, root) {
        (CSpec::ExplicitPoly { c0, .. }, Root::Long) => TruncSeries::from_poly(c0, order),
        (CSpec::ExplicitPoly { c1, .. }, Root::Short) => TruncSeries::from_poly(c1, order),
        (CSpec::HallLittlewood { t, .. }, Root::Long) => {
            TruncSeries::from_poly(&[Rational::one(), -t.clone()], order)
        }
        (CSpec::HallLittlewood { t0, t1, .. }, Root::Short) => {
            TruncSeries::from_poly(&[Rational::one(), -(t0 + t1), t0 * t1], order)
        }
        (CSpec::Koornwinder { q, t, .. }, Root::Long) => {
            let num = pochhammer_inf_series(t, q, order)?;
            let den = pochhammer_inf_series(q, q, order)?;
            num.mul(&reciprocal_series(&den, order)?)
        }
        (CSpec::Koornwinder { q, t_r, .. }, Root::Short) => {
            let mut num = TruncSeries::one(order);
            for tr in t_r {
                num = num.mul(&pochhammer_inf_series(tr, q, order)?);
            }
            // (q z²; q)_∞ as a series in w = z², inverted there, then spread out
            let half = order / 2;
            let den = pochhammer_inf_series(q, q, half)?;
            let inv = reciprocal_series(&den, half)?;
            let spread = TruncSeries::from_poly(inv.coeffs(), order).dilate(2);
            num.mul(&spread)
        }
    })
}

/// `1/s` through order `K` via `r_0 = 1`, `r_n = −Σ_{k=1}^n s_k r_{n−k}`.
pub fn reciprocal_series(s: &TruncSeries, order: usize) -> Result<TruncSeries> {
    if !s.coeffs[0].is_one() {
        return Err(Error::InvalidSeries(format!(
            "constant coefficient must be 1, got {}",
            rational::to_string(&s.coeffs[0])
        )));
    }
    let mut r: Vec<Rational> = Vec::with_capacity(order + 1);
    r.push(Rational::one());
    for n in 1..=order {
        let mut acc = Rational::zero();
        for k in 1..=n.min(s.order()) {
            if !s.coeffs[k].is_zero() {
                acc -= &s.coeffs[k] * &r[n - k];
            }
        }
        r.push(acc);
    }
    Ok(TruncSeries { coeffs: r })
}

/// Admissible exponential decay rate `ε` of the Taylor coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayBudget {
    /// Any `ε` below this value is admissible.
    Rate(f64),
    /// Reduced c-functions are polynomials: the expansion is exact beyond degree `M`.
    ExactBeyond(usize),
}

pub fn decay_budget(spec: &CSpec) -> DecayBudget {
    match spec {
        CSpec::Koornwinder { q, .. } => DecayBudget::Rate(-rational::to_f64(q).ln()),
        _ => DecayBudget::ExactBeyond(spec.polynomial_degree().expect("polynomial family")),
    }
}

pub const ZERO_FREE_WARN: f64 = 1e-6;

/// Sampled minimum of `|ĉ_p|` on the unit circle (512 points each).
#[derive(Clone, Debug)]
pub struct ZeroFreeReport {
    pub min_abs: [f64; 2],
}

impl ZeroFreeReport {
    pub fn suspicious(&self) -> bool {
        self.min_abs.iter().any(|&m| m < ZERO_FREE_WARN)
    }
}

pub fn zero_free_check(spec: &CSpec) -> ZeroFreeReport {
    const SAMPLES: usize = 512;
    let mut min_abs = [f64::INFINITY; 2];
    for (p, slot) in min_abs.iter_mut().enumerate() {
        let root = if p == 0 { Root::Long } else { Root::Short };
        for k in 0..SAMPLES {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / SAMPLES as f64;
            let v = eval_reduced(spec, root, (theta.cos(), theta.sin()));
            *slot = slot.min(v.0.hypot(v.1));
        }
    }
    ZeroFreeReport { min_abs }
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// `(a z; q)_∞` in double precision.
fn poch_f64(a: f64, q: f64, z: C64) -> C64 {
    let mut acc = (1.0, 0.0);
    let mut qk = 1.0;
    while qk.abs() > 1e-18 {
        acc = cmul(acc, (1.0 - a * qk * z.0, -a * qk * z.1));
        qk *= q;
    }
    acc
}

fn eval_poly(c: &[Rational], z: C64) -> C64 {
    let mut acc = (0.0, 0.0);
    for a in c.iter().rev() {
        acc = cmul(acc, z);
        acc.0 += rational::to_f64(a);
    }
    acc
}

pub(crate) fn eval_reduced(spec: &CSpec, root: Root, z: C64) -> C64 {
    match (spec, root) {
        (CSpec::ExplicitPoly { c0, .. }, Root::Long) => eval_poly(c0, z),
        (CSpec::ExplicitPoly { c1, .. }, Root::Short) => eval_poly(c1, z),
        (CSpec::HallLittlewood { t, .. }, Root::Long) => eval_poly(&[Rational::one(), -t.clone()], z),
        (CSpec::HallLittlewood { t0, t1, .. }, Root::Short) => {
            eval_poly(&[Rational::one(), -(t0 + t1), t0 * t1], z)
        }
        (CSpec::Koornwinder { q, t, .. }, Root::Long) => {
            let q = rational::to_f64(q);
            cdiv(poch_f64(rational::to_f64(t), q, z), poch_f64(q, q, z))
        }
        (CSpec::Koornwinder { q, t_r, .. }, Root::Short) => {
            let qf = rational::to_f64(q);
            let mut num = (1.0, 0.0);
            for tr in t_r {
                num = cmul(num, poch_f64(rational::to_f64(tr), qf, z));
            }
            cdiv(num, poch_f64(qf, qf, cmul(z, z)))
        }
    }
}

//! Limiting ramification data `(V, R, M, E, C)` and the level-`n` Newton
//! polygons it describes.
//!
//! For large `n` the Newton polygon of `P(x + α_n) - α_{n-1}` is the lower hull
//! of the points `(p^k, y_k)` with
//!
//! ```text
//! y_k = min_{p^k <= j <= q} { v binom(j, p^k) + v(P_j) + (j - p^k) v(α_n) }
//! ```
//!
//! Splitting each minimum into an integral main term and the small error term
//! `(j - p^k) v(α_n)` gives the data computed here.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::branchdyn::{BranchValuationRecord, PolynomialValuationProfile};
use crate::error::{Error, Result};
use crate::exactval::{binom_valuation, ceil_to_u64, pow_rat, rat, ratstr, Extended};
use crate::polygeom::{lower_hull_finite, NewtonPolygon};
use crate::Rational;

/// Height data over `x = p^k`: `M_{p^k} + E_{p^k}·v(α_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPoint {
    pub x: u64,
    pub main: Rational,
    pub error_factor: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitingRamificationData {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "R")]
    pub r: Vec<u32>,
    #[serde(rename = "M")]
    pub m: Vec<i64>,
    #[serde(rename = "E")]
    pub e: Vec<u64>,
    #[serde(rename = "C", with = "ratstr::option")]
    pub c: Option<Rational>,
    pub sign: i8,
}

impl LimitingRamificationData {
    pub fn with_c(mut self, c: Rational) -> Self {
        self.c = Some(c);
        self
    }

    /// Checks `r_1 = 0`, `r_V = r`, `m_V = e_V = 0`, `0 <= e_i < q` and
    /// strictly increasing exponents.
    pub fn check_invariants(&self, profile: &PolynomialValuationProfile) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("limiting data: {what}")));
        if self.v < 2 || self.r.len() != self.v || self.m.len() != self.v || self.e.len() != self.v {
            return bad("V must be at least 2 and match the lengths of R, M, E");
        }
        if self.r[0] != 0 || self.r[self.v - 1] != profile.r() {
            return bad("R must start at 0 and end at r");
        }
        if self.r.windows(2).any(|w| w[1] <= w[0]) {
            return bad("R must be strictly increasing");
        }
        if self.m[self.v - 1] != 0 || self.e[self.v - 1] != 0 {
            return bad("m_V and e_V must vanish");
        }
        if self.e.iter().any(|&e| e >= profile.q()) {
            return bad("error factors must lie in [0, q-1]");
        }
        if self.sign != 1 && self.sign != -1 {
            return bad("sign must be +1 or -1");
        }
        Ok(())
    }

    /// The vertex points `(p^{r_i}, m_i + e_i t)` for an error scale `t`.
    pub fn points_at(&self, p: u64, t: &Rational) -> Vec<(Rational, Rational)> {
        (0..self.v)
            .map(|i| {
                (
                    rat(p.pow(self.r[i]) as i64),
                    rat(self.m[i]) + rat(self.e[i] as i64) * t,
                )
            })
            .collect()
    }
}

fn check_sign(sign: i8) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("sign must be +1 or -1, got {sign}")))
    }
}

/// Main term and error factor over `p^k`.
///
/// Ties in the main-term minimum go to the first index for a positive base
/// valuation and to the last for a negative one.
pub fn main_and_error(profile: &PolynomialValuationProfile, k: u32, sign: i8) -> Result<LabeledPoint> {
    check_sign(sign)?;
    if k > profile.r() {
        return Err(Error::InvalidInput(format!("k = {k} exceeds r = {}", profile.r())));
    }
    let x = profile.p().pow(k);
    let vp = Extended::Finite(profile.v_p_rational());
    let mut best: Option<(Rational, u64)> = None;
    for j in x..=profile.q() {
        let term = binom_valuation(j, x, profile.p(), &vp)? + profile.coeff(j);
        let Extended::Finite(term) = term else { continue };
        let better = match &best {
            None => true,
            Some((b, _)) if sign > 0 => term < *b,
            Some((b, _)) => term <= *b,
        };
        if better {
            best = Some((term, j));
        }
    }
    let (main, j) = best.ok_or_else(|| Error::Degenerate(format!("no finite term over x = {x}")))?;
    Ok(LabeledPoint {
        x,
        main,
        error_factor: j - x,
    })
}

/// All `r + 1` labeled points.
pub fn labeled_points(profile: &PolynomialValuationProfile, sign: i8) -> Result<Vec<LabeledPoint>> {
    (0..=profile.r()).map(|k| main_and_error(profile, k, sign)).collect()
}

/// `V, R, M, E` from the hull of `(p^k, M_{p^k} + sign·E_{p^k}/q²)`.
pub fn limiting_data(profile: &PolynomialValuationProfile, sign: i8) -> Result<LimitingRamificationData> {
    check_sign(sign)?;
    let labeled = labeled_points(profile, sign)?;
    let eps = rat(sign as i64) / pow_rat(profile.q(), 2);
    let pts: Vec<(Rational, Rational)> = labeled
        .iter()
        .map(|lp| (rat(lp.x as i64), lp.main.clone() + rat(lp.error_factor as i64) * &eps))
        .collect();
    let hull = lower_hull_finite(&pts)?;
    let mut data = LimitingRamificationData {
        v: hull.len(),
        r: Vec::new(),
        m: Vec::new(),
        e: Vec::new(),
        c: None,
        sign,
    };
    for (x, _) in hull.vertices() {
        let k = labeled
            .iter()
            .position(|lp| rat(lp.x as i64) == *x)
            .expect("hull vertices are input points");
        let lp = &labeled[k];
        data.r.push(k as u32);
        data.m.push(
            lp.main
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Overflow("main term does not fit i64".into()))?,
        );
        data.e.push(lp.error_factor);
    }
    data.check_invariants(profile)?;
    Ok(data)
}

/// The error coefficient `C = q^N v(α_N)` and the index `N` used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorCoefficient {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C", with = "ratstr")]
    pub c: Rational,
}

/// `N = 0` for a negative base valuation, `ceil(v(α_0))` for a positive one,
/// and `k + ℓ` for a zero base with `k` leading zeros and `ℓ` the largest
/// coefficient valuation.
pub fn compute_c(profile: &PolynomialValuationProfile, record: &BranchValuationRecord) -> Result<ErrorCoefficient> {
    let n = match record.valuations().first() {
        None => return Err(Error::RecordTooShort { needed: 0, len: 0 }),
        Some(Extended::Finite(v)) if v.is_negative() => 0,
        Some(Extended::Finite(v)) => ceil_to_u64(v)? as usize,
        Some(Extended::Infinity) => {
            let ell = profile
                .max_coeff()
                .map(|m| ceil_to_u64(&m))
                .transpose()?
                .unwrap_or(0) as usize;
            record.leading_zeros() + ell
        }
    };
    let v = record.valuation(n)?;
    Ok(ErrorCoefficient {
        n,
        c: pow_rat(profile.q(), n) * v,
    })
}

/// `𝒩_n` from the limiting data: the hull of `(p^{r_i}, m_i + e_i C / q^n)`.
///
/// Fails with [`Error::NotStable`] if some `(p^{r_i}, ·)` is not a vertex at
/// this level.
pub fn level_polygon(
    profile: &PolynomialValuationProfile,
    data: &LimitingRamificationData,
    n: usize,
) -> Result<NewtonPolygon<Rational>> {
    let c = data.c.as_ref().ok_or(Error::MissingErrorCoefficient)?;
    let t = c / pow_rat(profile.q(), n);
    let pts = data.points_at(profile.p(), &t);
    let hull = lower_hull_finite(&pts)?;
    if hull.len() != data.v {
        return Err(Error::NotStable {
            level: n,
            reason: format!("{} of the {} limiting vertices survive", hull.len(), data.v),
        });
    }
    Ok(hull)
}

/// Heights `y_{p^k}` at a given `v(α_n)` evaluated term by term, with the
/// minimizing index and whether it is unique.
pub fn exact_level_heights(
    profile: &PolynomialValuationProfile,
    v_alpha_n: &Rational,
) -> Result<Vec<(u64, Rational, u64, bool)>> {
    let vp = Extended::Finite(profile.v_p_rational());
    let mut out = Vec::with_capacity(profile.r() as usize + 1);
    for k in 0..=profile.r() {
        let x = profile.p().pow(k);
        let mut best: Option<(Rational, u64, bool)> = None;
        for j in x..=profile.q() {
            let Extended::Finite(main) = binom_valuation(j, x, profile.p(), &vp)? + profile.coeff(j)
            else {
                continue;
            };
            let term = main + rat((j - x) as i64) * v_alpha_n;
            best = match best {
                None => Some((term, j, true)),
                Some((b, bj, uniq)) => match term.cmp(&b) {
                    std::cmp::Ordering::Less => Some((term, j, true)),
                    std::cmp::Ordering::Equal => Some((b, bj, false)),
                    std::cmp::Ordering::Greater => Some((b, bj, uniq)),
                },
            };
        }
        let (y, j, uniq) = best.ok_or_else(|| Error::Degenerate(format!("no finite term over x = {x}")))?;
        out.push((x, y, j, uniq));
    }
    Ok(out)
}

/// Hull of the exact prime-power heights at `v(α_n)`.
pub fn exact_level_polygon(
    profile: &PolynomialValuationProfile,
    v_alpha_n: &Rational,
) -> Result<NewtonPolygon<Rational>> {
    let pts: Vec<(Rational, Rational)> = exact_level_heights(profile, v_alpha_n)?
        .into_iter()
        .map(|(x, y, _, _)| (rat(x as i64), y))
        .collect();
    lower_hull_finite(&pts)
}

/// Vertex exponents `k` of a polygon whose vertices sit over powers of `p`.
pub fn vertex_exponents(poly: &NewtonPolygon<Rational>, p: u64) -> Vec<u32> {
    poly.vertices()
        .iter()
        .map(|(x, _)| {
            let mut x = x.to_integer().to_u64().unwrap_or(0);
            let mut k = 0;
            while x > 1 && x % p == 0 {
                x /= p;
                k += 1;
            }
            k
        })
        .collect()
}

/// `|C| / q^n <= 1/q²`: the levels at which the vertex set is provably fixed.
pub fn in_stable_regime(c: &Rational, q: u64, n: usize) -> bool {
    let lhs = c.abs() / pow_rat(q, n);
    lhs <= Rational::one() / pow_rat(q, 2) && !c.is_zero()
}

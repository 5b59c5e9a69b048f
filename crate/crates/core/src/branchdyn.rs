//! Valuation dynamics along a branch `P(α_n) = α_{n-1}`.
//!
//! Everything here works on valuations only. Steps are predicted from the
//! Newton polygon of `P(x) - α_{n-1}`, which is exact as long as no
//! coefficient cancellation occurs.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactval::{ceil_to_u64, is_prime, pow_rat, rat, Extended};
use crate::polygeom::lower_hull;
use crate::{ExtendedRational, Rational};

/// Valuation data of a monic `P` of degree `q = p^r` with `P(0) = 0` and
/// `P(x) ≡ x^q mod π_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialValuationProfile {
    p: u64,
    r: u32,
    v_p: u64,
    e_ke: u64,
    /// Indexed `0..=q`; entry 0 is always infinite.
    coeffs: Vec<ExtendedRational>,
}

impl PolynomialValuationProfile {
    /// Validates and builds a profile. Indices absent from `coeff_valuations`
    /// are zero coefficients; a missing leading entry is taken as monic.
    pub fn new(
        p: u64,
        r: u32,
        v_p: u64,
        coeff_valuations: &BTreeMap<u64, ExtendedRational>,
        e_ke: u64,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("p: {p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidInput("r: must be positive".into()));
        }
        if v_p == 0 {
            return Err(Error::InvalidInput("v_p: must be positive".into()));
        }
        if e_ke == 0 {
            return Err(Error::InvalidInput("e_ke: must be positive".into()));
        }
        let q = p
            .checked_pow(r)
            .filter(|q| *q <= 1 << 20)
            .ok_or_else(|| Error::Overflow(format!("r: degree {p}^{r} is too large")))?;
        let mut coeffs = vec![Extended::Infinity; q as usize + 1];
        for (&i, v) in coeff_valuations {
            if i == 0 {
                return Err(Error::InvalidInput(
                    "coeff_valuations[0]: P(0) = 0 is assumed, omit the constant term".into(),
                ));
            }
            if i > q {
                return Err(Error::InvalidInput(format!(
                    "coeff_valuations[{i}]: index exceeds the degree q = {q}"
                )));
            }
            if let Extended::Finite(val) = v {
                if !val.is_integer() {
                    return Err(Error::InvalidInput(format!(
                        "coeff_valuations[{i}] = {val}: coefficient valuations must be integers"
                    )));
                }
                if i < q && *val < Rational::one() {
                    return Err(Error::InvalidInput(format!(
                        "coeff_valuations[{i}] = {val}: non-leading coefficients need valuation >= 1"
                    )));
                }
            }
            coeffs[i as usize] = v.clone();
        }
        match &coeffs[q as usize] {
            Extended::Infinity if !coeff_valuations.contains_key(&q) => {
                coeffs[q as usize] = Extended::Finite(Rational::zero())
            }
            Extended::Finite(v) if v.is_zero() => {}
            other => {
                return Err(Error::InvalidInput(format!(
                    "coeff_valuations[{q}] = {other}: P must be monic (valuation 0)"
                )))
            }
        }
        Ok(Self {
            p,
            r,
            v_p,
            e_ke,
            coeffs,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn v_p(&self) -> u64 {
        self.v_p
    }

    pub fn v_p_rational(&self) -> Rational {
        rat(self.v_p as i64)
    }

    pub fn e_ke(&self) -> u64 {
        self.e_ke
    }

    /// `v(P_i)`; infinite for zero coefficients and indices outside `1..=q`.
    pub fn coeff(&self, i: u64) -> ExtendedRational {
        self.coeffs
            .get(i as usize)
            .cloned()
            .unwrap_or(Extended::Infinity)
    }

    /// Finite coefficient valuations as a sparse map.
    pub fn coeff_map(&self) -> BTreeMap<u64, ExtendedRational> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| (i as u64, v.clone()))
            .collect()
    }

    /// Smallest finite `v(P_i)` with `i < q`.
    pub fn min_lower_coeff(&self) -> Option<Rational> {
        let q = self.q() as usize;
        self.coeffs[1..q].iter().filter_map(|v| v.finite().cloned()).min()
    }

    /// Largest finite coefficient valuation.
    pub fn max_coeff(&self) -> Option<Rational> {
        self.coeffs.iter().filter_map(|v| v.finite().cloned()).max()
    }

    /// Same polynomial over a base with a different ramification index over `E`.
    pub fn with_e_ke(&self, e_ke: u64) -> Result<Self> {
        if e_ke == 0 {
            return Err(Error::InvalidInput("e_ke: must be positive".into()));
        }
        Ok(Self {
            e_ke,
            ..self.clone()
        })
    }
}

/// Valuations along a branch, with derived `d_n` estimates and stable index.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchValuationRecord {
    valuations: Vec<ExtendedRational>,
    d_estimates: Vec<Option<i64>>,
    stable_index: Option<usize>,
    c: Option<Rational>,
}

impl BranchValuationRecord {
    /// Validates a branch of valuations `v(α_0), v(α_1), …` against `profile`.
    ///
    /// Leading infinite entries (zero base points) are allowed; an infinite
    /// entry after a finite one is not. Once the branch is in the regime where
    /// the Newton polygon of `P(x) - α_n` has a single segment, each entry must
    /// be the previous one divided by `q`.
    pub fn new(profile: &PolynomialValuationProfile, valuations: Vec<ExtendedRational>) -> Result<Self> {
        validate_branch(profile, &valuations)?;
        let d_estimates = valuations
            .iter()
            .map(|v| v.finite().map(|v| d_heuristic(v, profile.e_ke())).transpose())
            .collect::<Result<Vec<_>>>()?;
        let mut rec = Self {
            valuations,
            d_estimates,
            stable_index: None,
            c: None,
        };
        rec.stable_index = find_stable_index(profile, &rec);
        rec.c = crate::limitdata::compute_c(profile, &rec).ok().map(|c| c.c);
        Ok(rec)
    }

    pub fn valuations(&self) -> &[ExtendedRational] {
        &self.valuations
    }

    pub fn d_estimates(&self) -> &[Option<i64>] {
        &self.d_estimates
    }

    pub fn stable_index(&self) -> Option<usize> {
        self.stable_index
    }

    pub fn c(&self) -> Option<&Rational> {
        self.c.as_ref()
    }

    pub fn len(&self) -> usize {
        self.valuations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valuations.is_empty()
    }

    /// Number of leading zero entries (infinite valuations).
    pub fn leading_zeros(&self) -> usize {
        self.valuations.iter().take_while(|v| v.is_infinite()).count()
    }

    /// `+1` or `-1` from the first finite entry.
    pub fn sign(&self) -> Option<i8> {
        self.valuations
            .iter()
            .find_map(|v| v.finite())
            .map(|v| if v.is_positive() { 1 } else { -1 })
    }

    pub fn valuation(&self, n: usize) -> Result<&Rational> {
        match self.valuations.get(n) {
            Some(Extended::Finite(v)) => Ok(v),
            Some(Extended::Infinity) => Err(Error::ZeroBase(n)),
            None => Err(Error::RecordTooShort {
                needed: n,
                len: self.valuations.len(),
            }),
        }
    }

    /// The branch re-based at `α_n` over a profile whose `e_{K/E}` is that of
    /// `K_n`.
    pub fn reindexed(&self, profile: &PolynomialValuationProfile, n: usize) -> Result<Self> {
        if n >= self.valuations.len() {
            return Err(Error::RecordTooShort {
                needed: n,
                len: self.valuations.len(),
            });
        }
        Self::new(profile, self.valuations[n..].to_vec())
    }

    /// Extends the branch with predicted steps until it has `depth + 1` entries.
    pub fn extended(
        &self,
        profile: &PolynomialValuationProfile,
        choices: &[usize],
        depth: usize,
    ) -> Result<Self> {
        let mut vals = self.valuations.clone();
        while vals.len() <= depth {
            let n = vals.len();
            let prev = &vals[n - 1];
            if prev.is_infinite() {
                return Err(Error::ZeroBase(n - 1));
            }
            let candidates = branch_step_candidates(profile, prev)?;
            let pick = match (choices.get(n - 1), candidates.len()) {
                (Some(&i), len) if i >= len => {
                    return Err(Error::ChoiceOutOfRange {
                        step: n,
                        index: i,
                        available: len,
                    })
                }
                (Some(&i), _) => i,
                (None, 1) => 0,
                (None, len) => return Err(Error::AmbiguousStep { step: n, available: len }),
            };
            vals.push(Extended::Finite(candidates[pick].clone()));
        }
        Self::new(profile, vals)
    }
}

fn validate_branch(profile: &PolynomialValuationProfile, vals: &[ExtendedRational]) -> Result<()> {
    if vals.is_empty() {
        return Err(Error::InconsistentRecord("branch has no entries".into()));
    }
    let lead = vals.iter().take_while(|v| v.is_infinite()).count();
    if lead == vals.len() {
        return Err(Error::InconsistentRecord("branch is entirely zero".into()));
    }
    if let Some(pos) = vals[lead..].iter().position(|v| v.is_infinite()) {
        return Err(Error::InconsistentRecord(format!(
            "zero entry at level {} after a nonzero entry",
            lead + pos
        )));
    }
    let finite: Vec<&Rational> = vals[lead..].iter().map(|v| v.finite().expect("checked")).collect();
    if let Some(pos) = finite.iter().position(|v| v.is_zero()) {
        return Err(Error::InconsistentRecord(format!(
            "valuation 0 at level {}: base points must have nonzero valuation",
            lead + pos
        )));
    }
    let positive = finite[0].is_positive();
    if let Some(pos) = finite.iter().position(|v| v.is_positive() != positive) {
        return Err(Error::InconsistentRecord(format!(
            "sign change at level {}: all valuations share the sign of the first",
            lead + pos
        )));
    }
    let q = Rational::from_integer(profile.q().into());
    for (k, w) in finite.windows(2).enumerate() {
        let single_segment = w[0].is_negative() || *w[0] < Rational::one();
        if single_segment && *w[1] != w[0] / &q {
            return Err(Error::InconsistentRecord(format!(
                "level {}: v = {} forces v(next) = {}, record has {}",
                lead + k,
                w[0],
                w[0] / &q,
                w[1]
            )));
        }
    }
    Ok(())
}

/// `d_n` under the minimal-ramification heuristic: `e(K_n/E)` is the least
/// multiple of `e_{K/E}` clearing the denominator of `v(α_n)`.
pub fn d_heuristic(v: &Rational, e_ke: u64) -> Result<i64> {
    let e = v.denom().lcm(&e_ke.into());
    let d = v * Rational::from_integer(e);
    d.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("d estimate for v = {v} does not fit i64")))
}

/// The ramification index `e(K_n/E)` implied by `v(α_n)` and `d`, when that is
/// a positive multiple of `e_{K/E}`; otherwise the heuristic index.
pub fn implied_ramification(v: &Rational, d: i64, e_ke: u64) -> u64 {
    let implied = Rational::from_integer(d.into()) / v;
    if implied.is_integer() && implied.is_positive() {
        if let Some(e) = implied.to_integer().to_u64() {
            if e % e_ke == 0 {
                return e;
            }
        }
    }
    let heuristic = v.denom().lcm(&e_ke.into());
    heuristic.to_u64().unwrap_or(u64::MAX)
}

/// Candidate values of `v(α_n)` given `v(α_{n-1})`: the negated slopes of the
/// Newton polygon of `P(x) - α_{n-1}`, left to right.
pub fn branch_step_candidates(
    profile: &PolynomialValuationProfile,
    v_prev: &ExtendedRational,
) -> Result<Vec<Rational>> {
    if v_prev.is_infinite() {
        return Err(Error::ZeroBase(0));
    }
    let q = profile.q();
    let mut pts = Vec::with_capacity(q as usize + 1);
    pts.push((Rational::zero(), v_prev.clone()));
    for i in 1..=q {
        pts.push((rat(i as i64), profile.coeff(i)));
    }
    let hull = lower_hull(&pts)?;
    let mut out: Vec<Rational> = Vec::new();
    for s in hull.slopes()? {
        let v = -s;
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Predicts `v(α_0), …, v(α_depth)`. `choices[n-1]` selects the slope used to
/// reach level `n` when several exist.
pub fn predict_branch(
    profile: &PolynomialValuationProfile,
    v_alpha0: &ExtendedRational,
    choices: &[usize],
    depth: usize,
) -> Result<BranchValuationRecord> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let seed = BranchValuationRecord::new(profile, vec![v_alpha0.clone()])?;
    seed.extended(profile, choices, depth)
}

/// An index by which `v(α_n)` is guaranteed to have entered the single-slope
/// regime: `ceil(v(α_0))`.
pub fn semistable_a_bound(v_alpha0: &Rational) -> Result<u64> {
    if !v_alpha0.is_positive() {
        return Err(Error::InvalidInput(format!(
            "v(α_0) = {v_alpha0} must be positive for this bound"
        )));
    }
    ceil_to_u64(v_alpha0)
}

/// A value of `d` together with whether it can be relied upon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DEstimate {
    pub d: i64,
    pub trusted: bool,
}

/// Chooses `d`: the supplied value (trusted), `1` for a uniformizer base
/// (trusted, every `P(x) - α_n` is Eisenstein), otherwise the heuristic
/// estimate at the stable index or last recorded level (untrusted).
pub fn estimate_d(record: &BranchValuationRecord, e_ke: u64, supplied: Option<i64>) -> Result<DEstimate> {
    if let Some(d) = supplied {
        return Ok(DEstimate { d, trusted: true });
    }
    if record.is_empty() || record.d_estimates().iter().all(Option::is_none) {
        return Err(Error::InconsistentRecord("no nonzero valuation to estimate d from".into()));
    }
    if let Some(Extended::Finite(v0)) = record.valuations().first() {
        if v0 * Rational::from_integer(e_ke.into()) == Rational::one() {
            return Ok(DEstimate { d: 1, trusted: true });
        }
    }
    let at = record
        .stable_index()
        .and_then(|n| record.d_estimates()[n])
        .or_else(|| record.d_estimates().iter().rev().find_map(|d| *d))
        .expect("checked non-empty");
    Ok(DEstimate { d: at, trusted: false })
}

/// Least recorded `N` with `0 < |v(α_N)| <= 1/q²`, heuristic `d_N` prime to
/// `p`, and `v(α_N)` below every finite non-leading coefficient valuation.
pub fn find_stable_index(profile: &PolynomialValuationProfile, record: &BranchValuationRecord) -> Option<usize> {
    let q2 = pow_rat(profile.q(), 2);
    let threshold = Rational::one() / q2;
    let min_coeff = profile.min_lower_coeff();
    let p = profile.p() as i64;
    record.valuations().iter().enumerate().position(|(n, v)| {
        let Some(v) = v.finite() else { return false };
        let small = !v.is_zero() && v.abs() <= threshold;
        let tame = record.d_estimates()[n].is_some_and(|d| d.rem_euclid(p) != 0);
        let below = min_coeff.as_ref().is_none_or(|m| v < m);
        small && tame && below
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactval::rat_frac;
    use crate::fixtures;

    fn fr(n: i64, d: i64) -> ExtendedRational {
        Extended::Finite(rat_frac(n, d))
    }

    #[test]
    fn profile_validation() {
        let mut m = BTreeMap::new();
        m.insert(1, fr(2, 1));
        assert!(PolynomialValuationProfile::new(3, 1, 1, &m, 1).is_ok());
        assert!(PolynomialValuationProfile::new(4, 1, 1, &m, 1).is_err());
        m.insert(5, fr(1, 1));
        assert!(PolynomialValuationProfile::new(3, 1, 1, &m, 1).is_err());
        m.remove(&5);
        m.insert(2, fr(1, 2));
        assert!(PolynomialValuationProfile::new(3, 1, 1, &m, 1).is_err());
        m.insert(2, fr(0, 1));
        assert!(PolynomialValuationProfile::new(3, 1, 1, &m, 1).is_err());
        m.remove(&2);
        m.insert(3, fr(1, 1));
        assert!(PolynomialValuationProfile::new(3, 1, 1, &m, 1).is_err());
    }

    #[test]
    fn step_candidates_worked_examples() {
        let sample = fixtures::sample_profile();
        assert_eq!(
            branch_step_candidates(&sample, &fr(2, 3)).unwrap(),
            vec![rat_frac(2, 27)]
        );
        let from4 = branch_step_candidates(&sample, &fr(4, 1)).unwrap();
        assert!(from4.contains(&rat_frac(2, 3)));
        assert_eq!(from4, vec![rat_frac(2, 3), rat_frac(1, 3)]);
        let berger = fixtures::berger_profile();
        assert_eq!(branch_step_candidates(&berger, &fr(1, 1)).unwrap(), vec![rat_frac(1, 3)]);
        assert!(matches!(
            branch_step_candidates(&berger, &Extended::Infinity),
            Err(Error::ZeroBase(_))
        ));
    }

    #[test]
    fn predict_sample_branch_with_supplied_first_step() {
        let sample = fixtures::sample_profile();
        let rec = predict_branch(&sample, &fr(4, 1), &[0], 4).unwrap();
        let want = [fr(4, 1), fr(2, 3), fr(2, 27), fr(2, 243), fr(2, 2187)];
        assert_eq!(rec.valuations(), &want[..]);
        assert!(matches!(
            predict_branch(&sample, &fr(4, 1), &[], 2),
            Err(Error::AmbiguousStep { step: 1, available: 2 })
        ));
        assert!(matches!(
            predict_branch(&sample, &fr(4, 1), &[5], 2),
            Err(Error::ChoiceOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn predict_berger_and_negative() {
        let berger = fixtures::berger_profile();
        let rec = predict_branch(&berger, &fr(1, 1), &[], 3).unwrap();
        assert_eq!(rec.valuations(), &[fr(1, 1), fr(1, 3), fr(1, 9), fr(1, 27)]);
        let neg = predict_branch(&berger, &fr(-5, 2), &[], 3).unwrap();
        assert_eq!(neg.valuations(), &[fr(-5, 2), fr(-5, 6), fr(-5, 18), fr(-5, 54)]);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(semistable_a_bound(&rat(4)).unwrap(), 4);
        assert_eq!(semistable_a_bound(&rat(1)).unwrap(), 1);
        assert_eq!(semistable_a_bound(&rat_frac(7, 2)).unwrap(), 4);
        assert!(semistable_a_bound(&rat(0)).is_err());
        assert!(semistable_a_bound(&rat(-1)).is_err());
    }

    #[test]
    fn d_estimates() {
        let sample = fixtures::sample_profile();
        let rec = BranchValuationRecord::new(&sample, vec![fr(4, 1), fr(2, 3), fr(2, 27)]).unwrap();
        assert_eq!(rec.d_estimates(), &[Some(4), Some(2), Some(2)]);
        assert_eq!(estimate_d(&rec, 1, None).unwrap(), DEstimate { d: 2, trusted: false });
        assert_eq!(estimate_d(&rec, 1, Some(2)).unwrap(), DEstimate { d: 2, trusted: true });

        let berger = fixtures::berger_profile();
        let rec = BranchValuationRecord::new(&berger, vec![fr(1, 1), fr(1, 3), fr(1, 9)]).unwrap();
        assert_eq!(estimate_d(&rec, 1, None).unwrap().d, 1);
        let alone = BranchValuationRecord::new(&berger, vec![fr(1, 1)]).unwrap();
        assert_eq!(estimate_d(&alone, 1, None).unwrap(), DEstimate { d: 1, trusted: true });
    }

    #[test]
    fn d_heuristic_respects_e_ke() {
        assert_eq!(d_heuristic(&rat_frac(2, 27), 1).unwrap(), 2);
        assert_eq!(d_heuristic(&rat_frac(1, 2), 4).unwrap(), 2);
        assert_eq!(d_heuristic(&rat_frac(-5, 6), 1).unwrap(), -5);
        assert_eq!(implied_ramification(&rat_frac(2, 3), 2, 1), 3);
        assert_eq!(implied_ramification(&rat_frac(2, 3), 5, 1), 3);
    }

    #[test]
    fn stable_index_examples() {
        let sample = fixtures::sample_profile();
        let rec = BranchValuationRecord::new(
            &sample,
            vec![fr(4, 1), fr(2, 3), fr(2, 27), fr(2, 243)],
        )
        .unwrap();
        assert_eq!(rec.stable_index(), Some(3));
        let berger = fixtures::berger_profile();
        let vals = (0..6).map(|k| fr(1, 3i64.pow(k))).collect();
        let rec = BranchValuationRecord::new(&berger, vals).unwrap();
        assert_eq!(rec.stable_index(), Some(2));
        let short = BranchValuationRecord::new(&berger, vec![fr(1, 1), fr(1, 3)]).unwrap();
        assert_eq!(short.stable_index(), None);
    }

    #[test]
    fn record_validation() {
        let berger = fixtures::berger_profile();
        let bad = |v: Vec<ExtendedRational>| BranchValuationRecord::new(&berger, v).is_err();
        assert!(bad(vec![fr(1, 1), Extended::Infinity]));
        assert!(bad(vec![fr(1, 1), fr(-1, 3)]));
        assert!(bad(vec![fr(1, 3), fr(1, 6)]));
        assert!(bad(vec![fr(-1, 1), fr(-1, 2)]));
        assert!(bad(vec![Extended::Infinity]));
        assert!(bad(vec![]));
        assert!(bad(vec![fr(0, 1)]));
        let zeros = BranchValuationRecord::new(
            &berger,
            vec![Extended::Infinity, Extended::Infinity, fr(2, 1)],
        )
        .unwrap();
        assert_eq!(zeros.leading_zeros(), 2);
        assert_eq!(zeros.sign(), Some(1));
    }
}

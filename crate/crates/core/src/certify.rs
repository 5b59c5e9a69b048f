//! Stability predicates and certificates.
//!
//! A certificate lists every inequality it relied on, each with exact values,
//! so it can be re-checked without recomputing anything.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::branchdyn::{estimate_d, BranchValuationRecord, PolynomialValuationProfile};
use crate::error::{Error, Result};
use crate::exactval::{padic_valuation, parse_rational, pow_rat, rat, Extended};
use crate::limitdata::{exact_level_polygon, limiting_data, vertex_exponents, LimitingRamificationData};
use crate::Rational;

/// How many levels a short record may be extended by when every step is
/// forced.
const MAX_EXTENSION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "==",
            Relation::Ne => "!=",
        }
    }
}

/// One exact inequality `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, level: Option<usize>, lhs: &Rational, relation: Relation, rhs: &Rational) -> Self {
        Self {
            name: name.to_string(),
            level,
            lhs: lhs.to_string(),
            relation,
            rhs: rhs.to_string(),
            passed: relation.holds(lhs, rhs),
        }
    }

    /// Re-evaluates the recorded inequality from its stored values.
    pub fn recheck(&self) -> Result<bool> {
        let lhs = parse_rational(&self.lhs)?;
        let rhs = parse_rational(&self.rhs)?;
        Ok(self.relation.holds(&lhs, &rhs))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "pass" } else { "FAIL" };
        match self.level {
            Some(n) => write!(f, "[{mark}] {} @ {n}: {} {} {}", self.name, self.lhs, self.relation.symbol(), self.rhs),
            None => write!(f, "[{mark}] {}: {} {} {}", self.name, self.lhs, self.relation.symbol(), self.rhs),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "N")]
pub enum CertificateKind {
    #[serde(rename = "TRS")]
    Trs,
    #[serde(rename = "PotentiallyTRS")]
    PotentiallyTrs(usize),
    NotCertified,
}

impl CertificateKind {
    pub fn is_certified(self) -> bool {
        !matches!(self, CertificateKind::NotCertified)
    }

    pub fn reindex(self) -> Option<usize> {
        match self {
            CertificateKind::Trs => Some(0),
            CertificateKind::PotentiallyTrs(n) => Some(n),
            CertificateKind::NotCertified => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub kind: CertificateKind,
    /// Set when `d` came from the heuristic estimate.
    pub conditional_on_d: bool,
    pub d_used: i64,
    pub d_trusted: bool,
    pub reindex: usize,
    pub checks: Vec<Check>,
    /// Which conditions fixed the reindex level.
    pub reasons: Vec<String>,
    pub interpretation_notes: Vec<String>,
}

impl StabilityCertificate {
    /// Re-evaluates every embedded inequality and compares with its stored bit.
    pub fn self_validate(&self) -> Result<bool> {
        for c in &self.checks {
            if c.recheck()? != c.passed {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn checks_at(&self, level: usize) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.level == Some(level))
    }

    pub fn check(&self, name: &str, level: usize) -> Option<&Check> {
        self.checks_at(level).find(|c| c.name == name)
    }
}

pub const NOTE_NOT_DIVISIBLE: &str = "\"v(alpha_N) not divisible by p\" is read as: the heuristic d-estimate at N, \
the numerator of v(alpha_N) times the least admissible ramification index, is prime to p";
pub const NOTE_CEILING: &str = "a non-integral positive v(alpha_0) uses its ceiling when choosing the level for C";
pub const NOTE_SUFFICIENT: &str = "all conditions are sufficient, not necessary; the reindex level is sound but may not be minimal";

/// Result of the post-critically bounded normal-form test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PcbResult {
    pub holds: bool,
    /// First index `i` with `v(P_i) + v(i) < r v(p)`.
    pub witness: Option<u64>,
}

/// `v(P_i) + v(i) >= r v(p)` for every `1 <= i <= q`.
pub fn pcb_normal_form(profile: &PolynomialValuationProfile) -> PcbResult {
    let bound = rat((profile.r() as u64 * profile.v_p()) as i64);
    for i in 1..=profile.q() {
        if let Extended::Finite(v) = profile.coeff(i) {
            let vi = rat((padic_valuation(i, profile.p()) as u64 * profile.v_p()) as i64);
            if v + vi < bound {
                return PcbResult {
                    holds: false,
                    witness: Some(i),
                };
            }
        }
    }
    PcbResult {
        holds: true,
        witness: None,
    }
}

/// Both sides of the composition inequality, or `None` when `V = 2` and the
/// criterion holds automatically.
pub fn composition_sides(data: &LimitingRamificationData, v_base: &Rational, p: u64, q: u64) -> Option<(Rational, Rational)> {
    if data.v == 2 {
        return None;
    }
    let v = data.v;
    let pr = |i: usize| rat(p.pow(data.r[i]) as i64);
    let m = |i: usize| rat(data.m[i]);
    let lhs = -rat(q as i64) * (m(v - 1) - m(v - 2)) / (pr(v - 1) - pr(v - 2));
    let rhs = -(m(1) - m(0)) / (pr(1) - pr(0)) + rat(2) * v_base.abs() / rat(p as i64 - 1);
    Some((lhs, rhs))
}

/// True if `V = 2` or the composition inequality holds at `v_base`.
pub fn composition_criterion(data: &LimitingRamificationData, v_base: &Rational, p: u64, q: u64) -> bool {
    composition_sides(data, v_base, p, q).is_none_or(|(l, r)| l > r)
}

/// `|v_base| < (p - 1) v(p) / 2`.
pub fn pcb_sufficient(p: u64, v_p: u64, v_base: &Rational) -> bool {
    v_base.abs() < rat((p - 1) as i64) * rat(v_p as i64) / rat(2)
}

fn exponent_mask(r: &[u32]) -> Rational {
    rat(r.iter().map(|k| 1i64 << k).sum())
}

/// Certifies the branch, reindexing to the least level where every checkable
/// sufficient condition holds.
///
/// A short record is extended by predicted steps when each step is forced.
pub fn certify(
    profile: &PolynomialValuationProfile,
    record: &BranchValuationRecord,
    d: Option<i64>,
) -> Result<StabilityCertificate> {
    let record = extend_if_forced(profile, record);
    let est = estimate_d(&record, profile.e_ke(), d)?;
    let sign = record
        .sign()
        .ok_or_else(|| Error::InconsistentRecord("branch has no nonzero valuation".into()))?;
    let p = profile.p();
    let q = profile.q();
    let mut cert = StabilityCertificate {
        kind: CertificateKind::NotCertified,
        conditional_on_d: !est.trusted,
        d_used: est.d,
        d_trusted: est.trusted,
        reindex: 0,
        checks: Vec::new(),
        reasons: Vec::new(),
        interpretation_notes: vec![
            NOTE_NOT_DIVISIBLE.to_string(),
            NOTE_CEILING.to_string(),
            NOTE_SUFFICIENT.to_string(),
        ],
    };
    let tame = Check::new("p does not divide d", None, &rat(est.d.rem_euclid(p as i64)), Relation::Ne, &Rational::zero());
    let tame_ok = tame.passed;
    cert.checks.push(tame);
    if !tame_ok {
        cert.reasons.push(format!("d = {} is divisible by p = {p}", est.d));
        return Ok(cert);
    }
    let data = limiting_data(profile, sign)?;
    let threshold = Rational::one() / pow_rat(q, 2);
    let min_coeff = profile.min_lower_coeff();

    for n in 0..record.len() {
        let Extended::Finite(v) = &record.valuations()[n] else { continue };
        let mut level_ok = true;
        let mut h_route = None;

        match composition_sides(&data, v, p, q) {
            Some((lhs, rhs)) => {
                let c = Check::new("composition criterion", Some(n), &lhs, Relation::Gt, &rhs);
                level_ok &= c.passed;
                cert.checks.push(c);
            }
            None => {
                let c = Check::new("single limiting slope (V = 2)", Some(n), &rat(data.v as i64), Relation::Eq, &rat(2));
                cert.checks.push(c);
            }
        }

        let eisenstein = n == 0 && v * rat(profile.e_ke() as i64) == Rational::one();
        if eisenstein {
            let c = Check::new(
                "uniformizer base: v(alpha_0) e_K/E",
                Some(n),
                &(v * rat(profile.e_ke() as i64)),
                Relation::Eq,
                &Rational::one(),
            );
            cert.checks.push(c);
            let want = exponent_mask(&data.r);
            let mut ok = true;
            for lvl in 1..=2 {
                let Ok(vl) = record.valuation(lvl) else {
                    ok = false;
                    break;
                };
                let poly = exact_level_polygon(profile, vl)?;
                let c = Check::new(
                    &format!("vertex exponents at level {lvl} match R (bitmask)"),
                    Some(n),
                    &exponent_mask(&vertex_exponents(&poly, p)),
                    Relation::Eq,
                    &want,
                );
                ok &= c.passed;
                cert.checks.push(c);
            }
            if ok {
                h_route = Some("uniformizer base: every P(x) - alpha_n is Eisenstein, d = 1".to_string());
            }
        }

        if h_route.is_none() {
            let mut ok = true;
            let mut push = |c: Check, cert: &mut StabilityCertificate| {
                ok &= c.passed;
                cert.checks.push(c);
            };
            push(Check::new("|v(alpha_N)| <= 1/q^2", Some(n), &v.abs(), Relation::Le, &threshold), &mut cert);
            push(Check::new("v(alpha_N) != 0", Some(n), v, Relation::Ne, &Rational::zero()), &mut cert);
            let dn = record.d_estimates()[n].unwrap_or(0);
            push(
                Check::new("p does not divide d_N", Some(n), &rat(dn.rem_euclid(p as i64)), Relation::Ne, &Rational::zero()),
                &mut cert,
            );
            let tail_constant = record.d_estimates()[n..].iter().all(|d| *d == Some(dn));
            push(
                Check::new(
                    "d-estimates constant from N (count of changes)",
                    Some(n),
                    &rat(i64::from(!tail_constant)),
                    Relation::Eq,
                    &Rational::zero(),
                ),
                &mut cert,
            );
            if let Some(m) = &min_coeff {
                push(Check::new("v(alpha_N) < min v(P_i), i < q", Some(n), v, Relation::Lt, m), &mut cert);
            }
            let poly = exact_level_polygon(profile, v)?;
            push(
                Check::new(
                    "vertex exponents at N match R (bitmask)",
                    Some(n),
                    &exponent_mask(&vertex_exponents(&poly, p)),
                    Relation::Eq,
                    &exponent_mask(&data.r),
                ),
                &mut cert,
            );
            if ok {
                h_route = Some(format!("stable threshold reached at level {n}"));
            }
        }

        let Some(route) = h_route else { continue };
        if level_ok {
            cert.kind = if n == 0 {
                CertificateKind::Trs
            } else {
                CertificateKind::PotentiallyTrs(n)
            };
            cert.reindex = n;
            cert.reasons.push(route);
            cert.reasons.push(format!("composition criterion holds at v = {v}"));
            return Ok(cert);
        }
        cert.reasons.push(format!("level {n}: stability conditions hold but the composition criterion fails"));
    }
    cert.reasons.push(format!(
        "no recorded level among 0..{} satisfies every sufficient condition",
        record.len()
    ));
    Ok(cert)
}

/// The record extended by forced predicted steps until two levels past its
/// stable index are known, or until a step needs a choice.
pub fn extend_if_forced(profile: &PolynomialValuationProfile, record: &BranchValuationRecord) -> BranchValuationRecord {
    let mut rec = record.clone();
    // two forced levels past the threshold are enough for every check
    while rec.len() < record.len() + MAX_EXTENSION {
        let done = rec
            .stable_index()
            .is_some_and(|n| rec.len() > n + 2);
        if done {
            break;
        }
        match rec.extended(profile, &[], rec.len()) {
            Ok(next) => rec = next,
            Err(_) => break,
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactval::rat_frac;
    use crate::fixtures;

    #[test]
    fn pcb_examples() {
        let s = pcb_normal_form(&fixtures::sample_profile());
        assert_eq!(s, PcbResult { holds: false, witness: Some(4) });
        assert!(pcb_normal_form(&fixtures::berger_profile()).holds);
        let pure = PolynomialValuationProfile::new(3, 2, 1, &Default::default(), 1).unwrap();
        assert!(pcb_normal_form(&pure).holds);
    }

    #[test]
    fn composition_examples() {
        let s = fixtures::sample_profile();
        let data = limiting_data(&s, 1).unwrap();
        assert_eq!(
            composition_sides(&data, &rat_frac(2, 3), 3, 9),
            Some((rat(3), rat_frac(7, 6)))
        );
        assert!(composition_criterion(&data, &rat_frac(2, 3), 3, 9));
        assert_eq!(composition_sides(&data, &rat(4), 3, 9), Some((rat(3), rat_frac(9, 2))));
        assert!(!composition_criterion(&data, &rat(4), 3, 9));
        let b = limiting_data(&fixtures::berger_profile(), 1).unwrap();
        assert!(composition_sides(&b, &rat(100), 3, 3).is_none());
        assert!(composition_criterion(&b, &rat(100), 3, 3));
    }

    #[test]
    fn pcb_sufficient_examples() {
        assert!(pcb_sufficient(5, 1, &rat(1)));
        assert!(!pcb_sufficient(3, 1, &rat(1)));
        assert!(pcb_sufficient(3, 2, &rat(1)));
        assert!(pcb_sufficient(3, 2, &rat(-1)));
    }

    #[test]
    fn certify_sample() {
        let cert = certify(&fixtures::sample_profile(), &fixtures::sample_record(), Some(2)).unwrap();
        assert_eq!(cert.kind, CertificateKind::PotentiallyTrs(3));
        assert!(!cert.conditional_on_d);
        let at0 = cert.check("composition criterion", 0).unwrap();
        assert!(!at0.passed);
        assert_eq!((at0.lhs.as_str(), at0.rhs.as_str()), ("3", "9/2"));
        let at1 = cert.check("composition criterion", 1).unwrap();
        assert!(at1.passed);
        assert_eq!((at1.lhs.as_str(), at1.rhs.as_str()), ("3", "7/6"));
        assert!(cert.self_validate().unwrap());
    }

    #[test]
    fn certify_berger_is_trs() {
        let cert = certify(&fixtures::berger_profile(), &fixtures::berger_record(), Some(1)).unwrap();
        assert_eq!(cert.kind, CertificateKind::Trs);
        let short = BranchValuationRecord::new(&fixtures::berger_profile(), vec![Extended::Finite(rat(1))]).unwrap();
        let cert = certify(&fixtures::berger_profile(), &short, None).unwrap();
        assert_eq!(cert.kind, CertificateKind::Trs);
        assert!(cert.d_trusted);
    }

    #[test]
    fn wild_d_is_not_certified() {
        let cert = certify(&fixtures::berger_profile(), &fixtures::berger_record(), Some(3)).unwrap();
        assert_eq!(cert.kind, CertificateKind::NotCertified);
        assert!(!cert.checks[0].passed);
        assert_eq!(cert.checks[0].name, "p does not divide d");
    }

    #[test]
    fn heuristic_d_is_conditional() {
        let cert = certify(&fixtures::sample_profile(), &fixtures::sample_record(), None).unwrap();
        assert_eq!(cert.d_used, 2);
        assert!(cert.conditional_on_d);
        assert!(cert.kind.is_certified());
    }

    #[test]
    fn tampered_check_fails_validation() {
        let mut cert = certify(&fixtures::sample_profile(), &fixtures::sample_record(), Some(2)).unwrap();
        cert.checks[1].passed = !cert.checks[1].passed;
        assert!(!cert.self_validate().unwrap());
    }

    #[test]
    fn serde_shape() {
        let cert = certify(&fixtures::sample_profile(), &fixtures::sample_record(), Some(2)).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["kind"]["kind"], "PotentiallyTRS");
        assert_eq!(json["kind"]["N"], 3);
        let back: StabilityCertificate = serde_json::from_value(json).unwrap();
        assert_eq!(back, cert);
    }
}

//! Transition functions `φ_n` of `K_n/K_{n-1}`, their composites `Φ_n` for
//! `K_n/K`, ramification breaks and the elementary-subfield table.
//!
//! Breaks are reported on the scale where `v` is normalized on `E`.

use num_traits::{One, Signed, Zero};

use crate::branchdyn::{implied_ramification, BranchValuationRecord, PolynomialValuationProfile};
use crate::error::{Error, Result};
use crate::exactval::{pow_rat, rat};
use crate::limitdata::{compute_c, level_polygon, limiting_data, LimitingRamificationData};
use crate::{PLFunction, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionFunction {
    pub level: usize,
    pub plf: PLFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerFunction {
    pub level: usize,
    pub plf: PLFunction,
    pub breaks: Vec<Rational>,
    pub altitude: Rational,
}

/// Shift `sgn(v) (d - 1) v` applied to every vertex abscissa.
fn base_shift(d: i64, v_base: &Rational) -> Rational {
    rat(d - 1) * v_base.abs()
}

fn check_d(p: u64, d: i64) -> Result<()> {
    if d.rem_euclid(p as i64) == 0 {
        Err(Error::WildD { d, p })
    } else {
        Ok(())
    }
}

/// `φ_n` from the segment slopes `s_i` of `𝒩_n`: each slope gives a vertex at
/// `x = -e q^n s_i + sgn(v)(d - 1)v`, the identity holds up to the first
/// vertex, and the slopes after it are `p^{r_{V-1}}/q, …, 1/q`.
pub fn build_phi(
    profile: &PolynomialValuationProfile,
    data: &LimitingRamificationData,
    n: usize,
    d: i64,
    v_base: &Rational,
) -> Result<TransitionFunction> {
    check_d(profile.p(), d)?;
    if n == 0 {
        return Err(Error::InvalidInput("transition functions start at level 1".into()));
    }
    let poly = level_polygon(profile, data, n)?;
    let slopes = poly.slopes()?;
    let q = rat(profile.q() as i64);
    let scale = rat(profile.e_ke() as i64) * pow_rat(profile.q(), n);
    let shift = base_shift(d, v_base);

    let xs: Vec<Rational> = slopes.iter().rev().map(|s| -(&scale * s) + &shift).collect();
    if !xs[0].is_positive() {
        return Err(Error::NotStable {
            level: n,
            reason: format!("first vertex of φ_{n} at x = {} is not positive", xs[0]),
        });
    }
    let mut vertices = Vec::with_capacity(xs.len());
    let mut y = xs[0].clone();
    vertices.push((xs[0].clone(), y.clone()));
    for (i, w) in xs.windows(2).enumerate() {
        // segment i + 1 of φ_n lies over polygon vertex V - 1 - i
        let k = data.v - 2 - i;
        let s = rat(profile.p().pow(data.r[k]) as i64) / &q;
        y += s * (&w[1] - &w[0]);
        vertices.push((w[1].clone(), y.clone()));
    }
    let plf = PLFunction::new(Rational::one(), vertices, Rational::one() / q)?;
    Ok(TransitionFunction { level: n, plf })
}

/// The same function obtained by transforming the copolygon of `𝒩_n`: shift by
/// `(d - 1)|v| / (e q^n)`, stretch by `e q^n` horizontally and `e q^{n-1}`
/// vertically.
pub fn phi_via_copolygon(
    profile: &PolynomialValuationProfile,
    data: &LimitingRamificationData,
    n: usize,
    d: i64,
    v_base: &Rational,
) -> Result<PLFunction> {
    check_d(profile.p(), d)?;
    let poly = level_polygon(profile, data, n)?;
    let co = poly.copolygon()?;
    let scale = rat(profile.e_ke() as i64) * pow_rat(profile.q(), n);
    let shift = base_shift(d, v_base) / &scale;
    let y_scale = &scale / rat(profile.q() as i64);
    co.affine_transform(&shift, &scale, &y_scale)
}

/// `Φ_1, …, Φ_depth` with `Φ_n = Φ_{n-1} ∘ φ_n`, each checked against the
/// structural laws before it is returned.
pub fn build_tower(
    profile: &PolynomialValuationProfile,
    data: &LimitingRamificationData,
    d: i64,
    v_base: &Rational,
    depth: usize,
) -> Result<(Vec<TransitionFunction>, Vec<TowerFunction>)> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let mut phis: Vec<TransitionFunction> = Vec::with_capacity(depth);
    let mut tower: Vec<TowerFunction> = Vec::with_capacity(depth);
    for n in 1..=depth {
        let phi = build_phi(profile, data, n, d, v_base)?;
        if let Some(prev) = phis.last() {
            let last_prev = &prev.plf.vertices().last().expect("V >= 2").0;
            let first = &phi.plf.vertices()[0].0;
            if first <= last_prev {
                return Err(Error::TowerInvariant {
                    level: n,
                    property: format!(
                        "composition gap: first vertex of φ_{n} at {first} does not exceed last vertex of φ_{} at {last_prev}",
                        n - 1
                    ),
                });
            }
        }
        let plf = match tower.last() {
            None => phi.plf.clone(),
            Some(prev) => prev.plf.compose(&phi.plf)?,
        };
        let t = TowerFunction {
            level: n,
            breaks: plf.vertices().iter().map(|v| v.0.clone()).collect(),
            altitude: plf.altitude()?,
            plf,
        };
        validate_level(profile, data, &phi, &t, tower.last())?;
        phis.push(phi);
        tower.push(t);
    }
    Ok((phis, tower))
}

fn validate_level(
    profile: &PolynomialValuationProfile,
    data: &LimitingRamificationData,
    phi: &TransitionFunction,
    t: &TowerFunction,
    prev: Option<&TowerFunction>,
) -> Result<()> {
    let n = t.level;
    let fail = |property: String| Err(Error::TowerInvariant { level: n, property });
    let want = (data.v - 1) * n;
    if t.plf.vertices().len() != want {
        return fail(format!("vertex count {} != (V-1)n = {want}", t.plf.vertices().len()));
    }
    let last = &t.plf.vertices().last().expect("counted").0;
    let phi_last = &phi.plf.vertices().last().expect("V >= 2").0;
    if last != phi_last {
        return fail(format!("last vertex x {last} differs from that of φ_{n}, {phi_last}"));
    }
    let final_slope = Rational::one() / pow_rat(profile.q(), n);
    if *t.plf.final_slope() != final_slope {
        return fail(format!("final slope {} != {final_slope}", t.plf.final_slope()));
    }
    if let Some(prev) = prev {
        let k = prev.plf.vertices().len();
        if t.plf.vertices()[..k] != *prev.plf.vertices() || t.plf.initial_slope() != prev.plf.initial_slope() {
            return fail(format!("Φ_{n} does not restrict to Φ_{} on its range", n - 1));
        }
        if t.altitude <= prev.altitude {
            return fail(format!("altitude {} does not exceed {}", t.altitude, prev.altitude));
        }
    }
    Ok(())
}

/// `A` and `B` with last-vertex abscissa `A q^n + B`, solved from levels 1
/// and 2 and confirmed on every further level.
pub fn progression_constants(tower: &[TowerFunction], q: u64) -> Result<(Rational, Rational)> {
    if tower.len() < 3 {
        return Err(Error::InvalidInput("need at least three levels".into()));
    }
    let x = |t: &TowerFunction| t.breaks.last().cloned().expect("non-empty tower level");
    let qr = rat(q as i64);
    let (x1, x2) = (x(&tower[0]), x(&tower[1]));
    let a = (&x2 - &x1) / (&qr * &qr - &qr);
    let b = &x1 - &a * &qr;
    for t in &tower[2..] {
        if x(t) != &a * pow_rat(q, t.level) + &b {
            return Err(Error::TowerInvariant {
                level: t.level,
                property: "last vertices do not follow A q^n + B".into(),
            });
        }
    }
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakRow {
    pub m: usize,
    pub b_m: Rational,
    /// Absolute level `k` whose step `K_k/K_{k-1}` contributes this break.
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfieldRow {
    pub level: usize,
    /// `(V-1)(k-N)+1`; nonpositive means the ground field.
    pub index: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakTable {
    pub breaks: Vec<BreakRow>,
    pub subfields: Vec<SubfieldRow>,
}

/// Breaks of the deepest `Φ_n` and the index `m` with `K_k = K_∞^(m)`.
/// Levels are absolute; `reindex` is the level of the working base.
pub fn breaks_and_subfields(tower: &[TowerFunction], data: &LimitingRamificationData, reindex: usize) -> Result<BreakTable> {
    let last = tower.last().ok_or_else(|| Error::InvalidInput("empty tower".into()))?;
    let per_level = data.v - 1;
    let breaks = last
        .breaks
        .iter()
        .enumerate()
        .map(|(i, b)| BreakRow {
            m: i + 1,
            b_m: b.clone(),
            level: reindex + i / per_level + 1,
        })
        .collect();
    let subfields = (reindex..=reindex + last.level)
        .map(|k| SubfieldRow {
            level: k,
            index: per_level as i64 * (k as i64 - reindex as i64) + 1,
        })
        .collect();
    Ok(BreakTable { breaks, subfields })
}

/// A profile, limiting data and base valuation describing the branch over
/// `K_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkingBase {
    pub reindex: usize,
    pub profile: PolynomialValuationProfile,
    pub record: BranchValuationRecord,
    pub data: LimitingRamificationData,
    pub v_base: Rational,
    pub d: i64,
}

impl WorkingBase {
    /// Rebases at `α_N`. The ramification index of `K_N` is inferred from
    /// `d` and `v(α_N)`; `C` is recomputed from the tail of the branch.
    pub fn new(profile: &PolynomialValuationProfile, record: &BranchValuationRecord, reindex: usize, d: i64) -> Result<Self> {
        check_d(profile.p(), d)?;
        let v_base = record.valuation(reindex)?.clone();
        let e = if reindex == 0 {
            profile.e_ke()
        } else {
            implied_ramification(&v_base, d, profile.e_ke())
        };
        let base_profile = profile.with_e_ke(e)?;
        let mut tail = record.reindexed(&base_profile, reindex)?;
        let c = loop {
            match compute_c(&base_profile, &tail) {
                Ok(c) => break c.c,
                Err(Error::RecordTooShort { needed, .. }) if needed >= tail.len() => {
                    tail = tail.extended(&base_profile, &[], needed)?;
                }
                Err(e) => return Err(e),
            }
        };
        let sign = if v_base.is_negative() { -1 } else { 1 };
        let data = limiting_data(&base_profile, sign)?.with_c(c);
        if data.c.as_ref().is_some_and(Zero::is_zero) {
            return Err(Error::Degenerate("error coefficient vanished".into()));
        }
        Ok(Self {
            reindex,
            profile: base_profile,
            record: tail,
            data,
            v_base,
            d,
        })
    }

    pub fn tower(&self, depth: usize) -> Result<(Vec<TransitionFunction>, Vec<TowerFunction>)> {
        build_tower(&self.profile, &self.data, self.d, &self.v_base, depth)
    }
}

//! JSON reports for each command. Every rational is an exact string.

use serde::Serialize;

use crate::branchdyn::{estimate_d, BranchValuationRecord, PolynomialValuationProfile};
use crate::certify::{certify, extend_if_forced, pcb_normal_form, CertificateKind, PcbResult, StabilityCertificate};
use crate::document::InputDocument;
use crate::error::{Error, Result};
use crate::exactval::ratstr;
use crate::hasseherbrand::{breaks_and_subfields, BreakTable, TowerFunction, TransitionFunction, WorkingBase};
use crate::limitdata::{compute_c, limiting_data, ErrorCoefficient};
use crate::{ExtendedRational, PLFunction, Rational};

pub const NOTE_E_SCALE: &str = "breaks and transition functions use the valuation normalized on E";
pub const NOTE_CONDITIONAL: &str = "d is a heuristic estimate; every result below is conditional on it";

#[derive(Clone, Debug, Serialize)]
pub struct PlfView {
    pub level: usize,
    pub vertices: Vec<[String; 2]>,
    pub slopes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub altitude: Option<String>,
}

impl PlfView {
    pub fn new(level: usize, plf: &PLFunction) -> Self {
        Self {
            level,
            vertices: plf.vertices().iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect(),
            slopes: plf.slopes().iter().map(ToString::to_string).collect(),
            altitude: None,
        }
    }
}

impl From<&TransitionFunction> for PlfView {
    fn from(t: &TransitionFunction) -> Self {
        PlfView::new(t.level, &t.plf)
    }
}

impl From<&TowerFunction> for PlfView {
    fn from(t: &TowerFunction) -> Self {
        Self {
            altitude: Some(t.altitude.to_string()),
            ..PlfView::new(t.level, &t.plf)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BreakView {
    pub m: usize,
    #[serde(with = "ratstr")]
    pub b_m: Rational,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubfieldView {
    pub level: usize,
    pub index: i64,
    pub field: String,
}

fn break_views(table: &BreakTable) -> (Vec<BreakView>, Vec<SubfieldView>) {
    let breaks = table
        .breaks
        .iter()
        .map(|b| BreakView {
            m: b.m,
            b_m: b.b_m.clone(),
            level: b.level,
        })
        .collect();
    let subfields = table
        .subfields
        .iter()
        .map(|s| SubfieldView {
            level: s.level,
            index: s.index,
            field: if s.index <= 0 {
                "ground field".to_string()
            } else {
                format!("K_inf^({})", s.index)
            },
        })
        .collect();
    (breaks, subfields)
}

/// Computes `C`, extending the record by forced steps when it is too short.
fn error_coefficient(
    profile: &PolynomialValuationProfile,
    record: &BranchValuationRecord,
    choices: &[usize],
) -> Result<ErrorCoefficient> {
    match compute_c(profile, record) {
        Err(Error::RecordTooShort { needed, .. }) => compute_c(profile, &record.extended(profile, choices, needed)?),
        other => other,
    }
}

#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct LimitDataReport {
    pub V: usize,
    pub R: Vec<u32>,
    pub M: Vec<i64>,
    pub E: Vec<u64>,
    #[serde(with = "ratstr::option")]
    pub C: Option<Rational>,
    pub sign: i8,
    pub N: Option<usize>,
    pub notes: Vec<String>,
}

pub fn limit_data_report(doc: &InputDocument) -> Result<LimitDataReport> {
    let (profile, record) = doc.parse()?;
    let sign = record.sign().expect("validated records have a nonzero entry");
    let data = limiting_data(&profile, sign)?;
    let mut notes = vec![crate::certify::NOTE_CEILING.to_string()];
    let (c, n) = match error_coefficient(&profile, &record, &doc.choices) {
        Ok(ec) => (Some(ec.c), Some(ec.n)),
        Err(e) => {
            notes.push(format!("C unavailable: {e}"));
            (None, None)
        }
    };
    Ok(LimitDataReport {
        V: data.v,
        R: data.r,
        M: data.m,
        E: data.e,
        C: c,
        sign,
        N: n,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchReport {
    pub valuations: Vec<ExtendedRational>,
    pub d_estimates: Vec<Option<i64>>,
    pub stable_index: Option<usize>,
    #[serde(with = "ratstr::option")]
    pub c: Option<Rational>,
    pub d: i64,
    pub d_trusted: bool,
}

/// The recorded branch, extended to `depth` when given.
pub fn branch_report(doc: &InputDocument, depth: Option<usize>) -> Result<BranchReport> {
    let (profile, mut record) = doc.parse()?;
    if let Some(depth) = depth {
        record = record.extended(&profile, &doc.choices, depth)?;
    }
    let est = estimate_d(&record, profile.e_ke(), doc.d)?;
    Ok(BranchReport {
        valuations: record.valuations().to_vec(),
        d_estimates: record.d_estimates().to_vec(),
        stable_index: record.stable_index(),
        c: record.c().cloned(),
        d: est.d,
        d_trusted: est.trusted,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    #[serde(flatten)]
    pub certificate: StabilityCertificate,
    pub pcb_normal_form: PcbResult,
}

pub fn certify_report(doc: &InputDocument) -> Result<CertifyReport> {
    let (profile, record) = doc.parse()?;
    Ok(CertifyReport {
        certificate: certify(&profile, &record, doc.d)?,
        pcb_normal_form: pcb_normal_form(&profile),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HhReport {
    pub certificate: CertificateKind,
    pub conditional_on_d: bool,
    pub reindex: usize,
    pub d: i64,
    pub e_ke: u64,
    #[serde(with = "ratstr")]
    pub v_base: Rational,
    #[serde(with = "ratstr")]
    pub c: Rational,
    pub phi: Vec<PlfView>,
    #[serde(rename = "Phi")]
    pub tower: Vec<PlfView>,
    pub breaks: Vec<BreakView>,
    pub subfields: Vec<SubfieldView>,
    pub notes: Vec<String>,
}

/// Everything needed to build the tower: the certificate and the working base.
pub struct TowerSetup {
    pub certificate: StabilityCertificate,
    pub base: WorkingBase,
}

/// Certifies, then rebases at the certificate's level or at `reindex` when
/// given. An uncertified branch is rejected unless `reindex` is given.
pub fn tower_setup(doc: &InputDocument, reindex: Option<usize>) -> Result<TowerSetup> {
    let (profile, record) = doc.parse()?;
    let certificate = certify(&profile, &record, doc.d)?;
    let n = match (reindex, certificate.kind.reindex()) {
        (Some(n), _) | (None, Some(n)) => n,
        (None, None) => {
            return Err(Error::NotStable {
                level: 0,
                reason: format!(
                    "the branch is not certified ({}); pass an explicit reindex level to build anyway",
                    certificate.reasons.join("; ")
                ),
            })
        }
    };
    if certificate.d_used.rem_euclid(profile.p() as i64) == 0 {
        return Err(Error::WildD {
            d: certificate.d_used,
            p: profile.p(),
        });
    }
    let record = extend_if_forced(&profile, &record);
    let base = WorkingBase::new(&profile, &record, n, certificate.d_used)?;
    Ok(TowerSetup { certificate, base })
}

pub fn hh_report(doc: &InputDocument, depth: usize, reindex: Option<usize>) -> Result<HhReport> {
    let setup = tower_setup(doc, reindex)?;
    let base = &setup.base;
    let (phis, tower) = base.tower(depth)?;
    let table = breaks_and_subfields(&tower, &base.data, base.reindex)?;
    let (breaks, subfields) = break_views(&table);
    let mut notes = vec![NOTE_E_SCALE.to_string()];
    if setup.certificate.conditional_on_d {
        notes.push(NOTE_CONDITIONAL.to_string());
    }
    if reindex.is_some() && reindex != setup.certificate.kind.reindex() {
        notes.push(format!(
            "reindex level {} was set explicitly; the certificate chose {:?}",
            base.reindex, setup.certificate.kind
        ));
    }
    Ok(HhReport {
        certificate: setup.certificate.kind,
        conditional_on_d: setup.certificate.conditional_on_d,
        reindex: base.reindex,
        d: base.d,
        e_ke: base.profile.e_ke(),
        v_base: base.v_base.clone(),
        c: base.data.c.clone().expect("working bases carry C"),
        phi: phis.iter().map(PlfView::from).collect(),
        tower: tower.iter().map(PlfView::from).collect(),
        breaks,
        subfields,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BreaksReport {
    pub reindex: usize,
    pub conditional_on_d: bool,
    pub breaks: Vec<BreakView>,
    pub subfields: Vec<SubfieldView>,
}

pub fn breaks_report(doc: &InputDocument, depth: usize, reindex: Option<usize>) -> Result<BreaksReport> {
    let hh = hh_report(doc, depth, reindex)?;
    Ok(BreaksReport {
        reindex: hh.reindex,
        conditional_on_d: hh.conditional_on_d,
        breaks: hh.breaks,
        subfields: hh.subfields,
    })
}

/// Reports compared by `selftest`, keyed by command name.
pub fn golden_report(doc: &InputDocument, command: &str, depth: usize) -> Result<serde_json::Value> {
    let value = match command {
        "limit-data" => serde_json::to_value(limit_data_report(doc)?),
        "certify" => serde_json::to_value(certify_report(doc)?),
        "hh" => serde_json::to_value(hh_report(doc, depth, None)?),
        other => return Err(Error::InvalidInput(format!("no golden report for command {other}"))),
    };
    Ok(value.expect("reports always serialize"))
}

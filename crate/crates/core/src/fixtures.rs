//! The two bundled fixtures and their golden reports.

use crate::branchdyn::{BranchValuationRecord, PolynomialValuationProfile};
use crate::document::InputDocument;

pub const SAMPLE_JSON: &str = include_str!("../fixtures/sample.json");
pub const BERGER_JSON: &str = include_str!("../fixtures/berger.json");

/// Depth used for the golden `hh` reports.
pub const GOLDEN_DEPTH: usize = 5;

/// `(fixture, command, report)` for every committed golden report.
pub const GOLDEN: &[(&str, &str, &str)] = &[
    ("sample", "limit-data", include_str!("../fixtures/golden/sample.limit-data.json")),
    ("sample", "certify", include_str!("../fixtures/golden/sample.certify.json")),
    ("sample", "hh", include_str!("../fixtures/golden/sample.hh.json")),
    ("berger", "limit-data", include_str!("../fixtures/golden/berger.limit-data.json")),
    ("berger", "certify", include_str!("../fixtures/golden/berger.certify.json")),
    ("berger", "hh", include_str!("../fixtures/golden/berger.hh.json")),
];

pub fn document(name: &str) -> Option<InputDocument> {
    let text = match name {
        "sample" => SAMPLE_JSON,
        "berger" => BERGER_JSON,
        _ => return None,
    };
    Some(InputDocument::from_json(text).expect("bundled fixture parses"))
}

pub fn sample_document() -> InputDocument {
    document("sample").expect("bundled")
}

pub fn berger_document() -> InputDocument {
    document("berger").expect("bundled")
}

pub fn sample_profile() -> PolynomialValuationProfile {
    sample_document().profile().expect("bundled fixture is valid")
}

pub fn sample_record() -> BranchValuationRecord {
    sample_document().record(&sample_profile()).expect("bundled fixture is valid")
}

pub fn berger_profile() -> PolynomialValuationProfile {
    berger_document().profile().expect("bundled fixture is valid")
}

pub fn berger_record() -> BranchValuationRecord {
    berger_document().record(&berger_profile()).expect("bundled fixture is valid")
}

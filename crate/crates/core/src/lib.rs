//! Exact valuation-level computations for dynamical branch extensions of
//! local fields: Newton polygons along a branch `P(α_n) = α_{n-1}`, limiting
//! ramification data, stability certificates and Hasse-Herbrand functions.
//!
//! The geometric layers ([`polygeom`], [`plf`]) are generic over a
//! [`scalar::Scalar`]; everything else works over [`Rational`].

pub mod branchdyn;
pub mod certify;
pub mod document;
pub mod error;
pub mod exactval;
pub mod fixtures;
pub mod hasseherbrand;
pub mod limitdata;
pub mod plf;
pub mod plot;
pub mod polygeom;
pub mod report;
pub mod scalar;

pub use branchdyn::{BranchValuationRecord, PolynomialValuationProfile};
pub use certify::{CertificateKind, StabilityCertificate};
pub use document::InputDocument;
pub use error::{Error, Result};
pub use limitdata::LimitingRamificationData;

pub type Rational = num_rational::BigRational;
pub type ExtendedRational = exactval::Extended<Rational>;
pub type NewtonPolygon = polygeom::NewtonPolygon<Rational>;
pub type PLFunction = plf::PLFunction<Rational>;
pub type NewtonPolygonF64 = polygeom::NewtonPolygon<f64>;
pub type PLFunctionF64 = plf::PLFunction<f64>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;

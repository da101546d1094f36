//! CVSS v2 base metrics: labels, vector parsing and the impact /
//! exploitability / base score equations.
//!
//! Label weights are the constants published with the CVSS v2 standard and
//! live in [`numeric_weight`] so they can be audited in one place.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest exploitability value any vector can reach (AV:N, AC:L, Au:N).
pub const MAX_EXPLOITABILITY: f64 = 20.0 * 1.0 * 0.71 * 0.704;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvssError {
    #[error("malformed CVSS v2 vector {vector:?}: {reason}")]
    MalformedVector { vector: String, reason: String },
    #[error("metric {0} is missing; impute it before scoring")]
    MissingLabel(Metric),
    #[error("label {label:?} is not legal for metric {metric}")]
    IllegalLabel { metric: Metric, label: String },
}

/// The six CVSS v2 base metrics, in canonical vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    AccessVector,
    AccessComplexity,
    Authentication,
    ConfidentialityImpact,
    IntegrityImpact,
    AvailabilityImpact,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::AccessVector,
        Metric::AccessComplexity,
        Metric::Authentication,
        Metric::ConfidentialityImpact,
        Metric::IntegrityImpact,
        Metric::AvailabilityImpact,
    ];

    /// Number of legal labels per metric. Every CVSS v2 base metric has three.
    pub const N_LABELS: usize = 3;

    /// Short key used in vector strings and on the model-server wire.
    pub fn key(self) -> &'static str {
        match self {
            Metric::AccessVector => "AV",
            Metric::AccessComplexity => "AC",
            Metric::Authentication => "Au",
            Metric::ConfidentialityImpact => "C",
            Metric::IntegrityImpact => "I",
            Metric::AvailabilityImpact => "A",
        }
    }

    pub fn from_key(key: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.key() == key)
    }

    /// Column name used in CSV exports.
    pub fn column_name(self) -> &'static str {
        match self {
            Metric::AccessVector => "access_vector",
            Metric::AccessComplexity => "access_complexity",
            Metric::Authentication => "authentication",
            Metric::ConfidentialityImpact => "confidentiality_impact",
            Metric::IntegrityImpact => "integrity_impact",
            Metric::AvailabilityImpact => "availability_impact",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Legal labels of this metric, ordered by ascending numeric weight.
    /// A label's position in this array is its class index.
    pub fn labels(self) -> [MetricLabel; 3] {
        match self {
            Metric::AccessVector => [
                MetricLabel::AccessVector(AccessVector::Local),
                MetricLabel::AccessVector(AccessVector::AdjacentNetwork),
                MetricLabel::AccessVector(AccessVector::Network),
            ],
            Metric::AccessComplexity => [
                MetricLabel::AccessComplexity(AccessComplexity::High),
                MetricLabel::AccessComplexity(AccessComplexity::Medium),
                MetricLabel::AccessComplexity(AccessComplexity::Low),
            ],
            Metric::Authentication => [
                MetricLabel::Authentication(Authentication::Multiple),
                MetricLabel::Authentication(Authentication::Single),
                MetricLabel::Authentication(Authentication::None),
            ],
            Metric::ConfidentialityImpact | Metric::IntegrityImpact | Metric::AvailabilityImpact => {
                [Impact::None, Impact::Partial, Impact::Complete].map(|i| MetricLabel::impact(self, i))
            }
        }
    }

    pub fn label_at(self, class: usize) -> Option<MetricLabel> {
        self.labels().get(class).copied()
    }

    /// Parses a label for this metric from either its single-letter vector
    /// code (`N`, `P`, ...) or its long name (`NETWORK`, `Adjacent Network`,
    /// `adjacent_network`, ...). Matching is case-insensitive.
    pub fn parse_label(self, text: &str) -> Result<MetricLabel, CvssError> {
        let trimmed = text.trim();
        let by_code = self.labels().into_iter().find(|l| l.code().eq_ignore_ascii_case(trimmed));
        if let Some(label) = by_code {
            return Ok(label);
        }
        let folded: String = trimmed
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        self.labels()
            .into_iter()
            .find(|l| l.name().replace('_', "").to_lowercase() == folded)
            .ok_or_else(|| CvssError::IllegalLabel { metric: self, label: text.to_string() })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Metric::AccessVector => "Access Vector",
            Metric::AccessComplexity => "Access Complexity",
            Metric::Authentication => "Authentication",
            Metric::ConfidentialityImpact => "Confidentiality Impact",
            Metric::IntegrityImpact => "Integrity Impact",
            Metric::AvailabilityImpact => "Availability Impact",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessVector {
    Local,
    AdjacentNetwork,
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessComplexity {
    High,
    Medium,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Authentication {
    Multiple,
    Single,
    None,
}

/// Shared label set of the confidentiality, integrity and availability metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Impact {
    None,
    Partial,
    Complete,
}

/// A legal label of one metric. Missing labels are represented by the
/// absence of a `MetricLabel` in a [`Cvss2Vector`] slot.
///
/// Displays and serializes as `KEY:CODE`, e.g. `AV:N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricLabel {
    AccessVector(AccessVector),
    AccessComplexity(AccessComplexity),
    Authentication(Authentication),
    ConfidentialityImpact(Impact),
    IntegrityImpact(Impact),
    AvailabilityImpact(Impact),
}

impl MetricLabel {
    fn impact(metric: Metric, value: Impact) -> MetricLabel {
        match metric {
            Metric::ConfidentialityImpact => MetricLabel::ConfidentialityImpact(value),
            Metric::IntegrityImpact => MetricLabel::IntegrityImpact(value),
            Metric::AvailabilityImpact => MetricLabel::AvailabilityImpact(value),
            other => unreachable!("{other} is not an impact metric"),
        }
    }

    pub fn metric(self) -> Metric {
        match self {
            MetricLabel::AccessVector(_) => Metric::AccessVector,
            MetricLabel::AccessComplexity(_) => Metric::AccessComplexity,
            MetricLabel::Authentication(_) => Metric::Authentication,
            MetricLabel::ConfidentialityImpact(_) => Metric::ConfidentialityImpact,
            MetricLabel::IntegrityImpact(_) => Metric::IntegrityImpact,
            MetricLabel::AvailabilityImpact(_) => Metric::AvailabilityImpact,
        }
    }

    /// Class index of this label within its metric (see [`Metric::labels`]).
    pub fn class_index(self) -> usize {
        match self {
            MetricLabel::AccessVector(v) => v as usize,
            MetricLabel::AccessComplexity(v) => v as usize,
            MetricLabel::Authentication(v) => v as usize,
            MetricLabel::ConfidentialityImpact(v)
            | MetricLabel::IntegrityImpact(v)
            | MetricLabel::AvailabilityImpact(v) => v as usize,
        }
    }

    /// Single-letter code used in vector strings.
    pub fn code(self) -> &'static str {
        match self {
            MetricLabel::AccessVector(AccessVector::Local) => "L",
            MetricLabel::AccessVector(AccessVector::AdjacentNetwork) => "A",
            MetricLabel::AccessVector(AccessVector::Network) => "N",
            MetricLabel::AccessComplexity(AccessComplexity::High) => "H",
            MetricLabel::AccessComplexity(AccessComplexity::Medium) => "M",
            MetricLabel::AccessComplexity(AccessComplexity::Low) => "L",
            MetricLabel::Authentication(Authentication::Multiple) => "M",
            MetricLabel::Authentication(Authentication::Single) => "S",
            MetricLabel::Authentication(Authentication::None) => "N",
            MetricLabel::ConfidentialityImpact(i)
            | MetricLabel::IntegrityImpact(i)
            | MetricLabel::AvailabilityImpact(i) => match i {
                Impact::None => "N",
                Impact::Partial => "P",
                Impact::Complete => "C",
            },
        }
    }

    /// Long label name as NVD spells it (`NETWORK`, `ADJACENT_NETWORK`, ...).
    pub fn name(self) -> &'static str {
        match self {
            MetricLabel::AccessVector(AccessVector::Local) => "LOCAL",
            MetricLabel::AccessVector(AccessVector::AdjacentNetwork) => "ADJACENT_NETWORK",
            MetricLabel::AccessVector(AccessVector::Network) => "NETWORK",
            MetricLabel::AccessComplexity(AccessComplexity::High) => "HIGH",
            MetricLabel::AccessComplexity(AccessComplexity::Medium) => "MEDIUM",
            MetricLabel::AccessComplexity(AccessComplexity::Low) => "LOW",
            MetricLabel::Authentication(Authentication::Multiple) => "MULTIPLE",
            MetricLabel::Authentication(Authentication::Single) => "SINGLE",
            MetricLabel::Authentication(Authentication::None) => "NONE",
            MetricLabel::ConfidentialityImpact(i)
            | MetricLabel::IntegrityImpact(i)
            | MetricLabel::AvailabilityImpact(i) => match i {
                Impact::None => "NONE",
                Impact::Partial => "PARTIAL",
                Impact::Complete => "COMPLETE",
            },
        }
    }
}

impl fmt::Display for MetricLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.metric().key(), self.code())
    }
}

impl FromStr for MetricLabel {
    type Err = CvssError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, value) = s.split_once(':').ok_or_else(|| CvssError::MalformedVector {
            vector: s.to_string(),
            reason: "expected KEY:VALUE".into(),
        })?;
        let metric = Metric::from_key(key).ok_or_else(|| CvssError::MalformedVector {
            vector: s.to_string(),
            reason: format!("unknown metric key {key:?}"),
        })?;
        metric
            .labels()
            .into_iter()
            .find(|l| l.code() == value)
            .ok_or_else(|| CvssError::IllegalLabel { metric, label: value.to_string() })
    }
}

impl Serialize for MetricLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// CVSS v2 constant for a label.
pub fn numeric_weight(label: MetricLabel) -> f64 {
    match label {
        MetricLabel::AccessVector(AccessVector::Local) => 0.395,
        MetricLabel::AccessVector(AccessVector::AdjacentNetwork) => 0.646,
        MetricLabel::AccessVector(AccessVector::Network) => 1.0,
        MetricLabel::AccessComplexity(AccessComplexity::High) => 0.35,
        MetricLabel::AccessComplexity(AccessComplexity::Medium) => 0.61,
        MetricLabel::AccessComplexity(AccessComplexity::Low) => 0.71,
        MetricLabel::Authentication(Authentication::Multiple) => 0.45,
        MetricLabel::Authentication(Authentication::Single) => 0.56,
        MetricLabel::Authentication(Authentication::None) => 0.704,
        MetricLabel::ConfidentialityImpact(i)
        | MetricLabel::IntegrityImpact(i)
        | MetricLabel::AvailabilityImpact(i) => match i {
            Impact::None => 0.0,
            Impact::Partial => 0.275,
            Impact::Complete => 0.660,
        },
    }
}

/// The six base metrics of a CVE. A `None` slot means the label is missing.
///
/// Serializes as its vector string, with `NF` in place of missing labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Cvss2Vector {
    slots: [Option<MetricLabel>; 6],
}

impl Cvss2Vector {
    /// A vector with every metric missing.
    pub fn missing() -> Self {
        Self::default()
    }

    pub fn new(
        av: AccessVector,
        ac: AccessComplexity,
        au: Authentication,
        c: Impact,
        i: Impact,
        a: Impact,
    ) -> Self {
        Self {
            slots: [
                Some(MetricLabel::AccessVector(av)),
                Some(MetricLabel::AccessComplexity(ac)),
                Some(MetricLabel::Authentication(au)),
                Some(MetricLabel::ConfidentialityImpact(c)),
                Some(MetricLabel::IntegrityImpact(i)),
                Some(MetricLabel::AvailabilityImpact(a)),
            ],
        }
    }

    /// Builds a complete vector from one class index per metric.
    pub fn from_class_indices(classes: [usize; 6]) -> Option<Self> {
        let mut v = Self::missing();
        for (metric, class) in Metric::ALL.into_iter().zip(classes) {
            v.set(metric.label_at(class)?);
        }
        Some(v)
    }

    pub fn get(&self, metric: Metric) -> Option<MetricLabel> {
        self.slots[metric.index()]
    }

    pub fn set(&mut self, label: MetricLabel) {
        self.slots[label.metric().index()] = Some(label);
    }

    pub fn clear(&mut self, metric: Metric) {
        self.slots[metric.index()] = None;
    }

    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    pub fn missing_metrics(&self) -> Vec<Metric> {
        Metric::ALL.into_iter().filter(|m| self.get(*m).is_none()).collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = (Metric, Option<MetricLabel>)> + '_ {
        Metric::ALL.into_iter().map(|m| (m, self.get(m)))
    }

    /// Numeric weight of one metric, or `MissingLabel` if it has not been set.
    pub fn weight(&self, metric: Metric) -> Result<f64, CvssError> {
        self.get(metric).map(numeric_weight).ok_or(CvssError::MissingLabel(metric))
    }

    /// Canonical `AV:x/AC:x/Au:x/C:x/I:x/A:x` form; `None` if any metric is missing.
    pub fn to_vector_string(&self) -> Option<String> {
        if !self.is_complete() {
            return None;
        }
        Some(self.to_string())
    }

    /// Every complete vector (3^6 = 729 of them), in lexicographic class order.
    pub fn enumerate_complete() -> impl Iterator<Item = Cvss2Vector> {
        (0..729usize).map(|mut n| {
            let mut classes = [0usize; 6];
            for slot in classes.iter_mut().rev() {
                *slot = n % 3;
                n /= 3;
            }
            Cvss2Vector::from_class_indices(classes).expect("class indices are < 3")
        })
    }
}

impl fmt::Display for Cvss2Vector {
    /// Complete vectors print in canonical form; missing slots print as `NF`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (metric, label)) in self.labels().enumerate() {
            if n > 0 {
                f.write_str("/")?;
            }
            write!(f, "{}:{}", metric.key(), label.map_or("NF", MetricLabel::code))?;
        }
        Ok(())
    }
}

impl FromStr for Cvss2Vector {
    type Err = CvssError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_vector(s)
    }
}

impl Serialize for Cvss2Vector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cvss2Vector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        parse_vector_allowing_missing(&raw).map_err(serde::de::Error::custom)
    }
}

/// Parses the standard short form, e.g. `AV:N/AC:L/Au:N/C:P/I:P/A:P`.
///
/// Keys may appear in any order but each of the six must appear exactly once.
pub fn parse_vector(text: &str) -> Result<Cvss2Vector, CvssError> {
    parse_six(text, false)
}

/// Like [`parse_vector`], but a value of `NF` leaves that metric missing.
pub fn parse_vector_allowing_missing(text: &str) -> Result<Cvss2Vector, CvssError> {
    parse_six(text, true)
}

fn parse_six(text: &str, allow_missing: bool) -> Result<Cvss2Vector, CvssError> {
    let malformed = |reason: String| CvssError::MalformedVector { vector: text.to_string(), reason };
    let parts: Vec<&str> = text.trim().split('/').collect();
    if parts.len() != 6 {
        return Err(malformed(format!("expected 6 metrics, found {}", parts.len())));
    }
    let mut vector = Cvss2Vector::missing();
    let mut seen = std::collections::HashSet::new();
    for part in parts {
        let (key, value) = part
            .split_once(':')
            .ok_or_else(|| malformed(format!("component {part:?} is not KEY:VALUE")))?;
        let metric = Metric::from_key(key).ok_or_else(|| malformed(format!("unknown metric key {key:?}")))?;
        if !seen.insert(metric) {
            return Err(malformed(format!("duplicate metric key {key:?}")));
        }
        if allow_missing && value == "NF" {
            continue;
        }
        let label = metric
            .labels()
            .into_iter()
            .find(|l| l.code() == value)
            .ok_or_else(|| malformed(format!("unknown value {value:?} for {key}")))?;
        vector.set(label);
    }
    Ok(vector)
}

/// Impact, exploitability and base score of one vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreTriple {
    /// Clamped to 10 for reporting.
    pub impact_score: f64,
    pub exploitability_score: f64,
    /// Rounded to one decimal place.
    pub base_score: f64,
}

/// `10.41 * (1 - (1-C)(1-I)(1-A))`, unclamped (all-Complete gives 10.0008).
pub fn impact_score(v: &Cvss2Vector) -> Result<f64, CvssError> {
    let c = v.weight(Metric::ConfidentialityImpact)?;
    let i = v.weight(Metric::IntegrityImpact)?;
    let a = v.weight(Metric::AvailabilityImpact)?;
    Ok(10.41 * (1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a)))
}

/// `20 * AV * AC * Au`.
pub fn exploitability_score(v: &Cvss2Vector) -> Result<f64, CvssError> {
    let av = v.weight(Metric::AccessVector)?;
    let ac = v.weight(Metric::AccessComplexity)?;
    let au = v.weight(Metric::Authentication)?;
    Ok(20.0 * av * ac * au)
}

/// Base score before one-decimal rounding.
pub fn raw_base_score(v: &Cvss2Vector) -> Result<f64, CvssError> {
    let impact = impact_score(v)?;
    let exploitability = exploitability_score(v)?;
    let f_impact = if impact == 0.0 { 0.0 } else { 1.176 };
    Ok((0.6 * impact + 0.4 * exploitability - 1.5) * f_impact)
}

pub fn base_score(v: &Cvss2Vector) -> Result<f64, CvssError> {
    raw_base_score(v).map(round_one_decimal)
}

pub fn score(v: &Cvss2Vector) -> Result<ScoreTriple, CvssError> {
    Ok(ScoreTriple {
        impact_score: impact_score(v)?.clamp(0.0, 10.0),
        exploitability_score: exploitability_score(v)?,
        base_score: base_score(v)?,
    })
}

pub(crate) fn round_one_decimal(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Cvss2Vector {
        parse_vector(s).unwrap()
    }

    #[test]
    fn parses_standard_vectors() {
        assert_eq!(
            v("AV:N/AC:L/Au:N/C:P/I:P/A:P"),
            Cvss2Vector::new(
                AccessVector::Network,
                AccessComplexity::Low,
                Authentication::None,
                Impact::Partial,
                Impact::Partial,
                Impact::Partial
            )
        );
        assert_eq!(
            v("AV:L/AC:H/Au:M/C:N/I:N/A:N"),
            Cvss2Vector::new(
                AccessVector::Local,
                AccessComplexity::High,
                Authentication::Multiple,
                Impact::None,
                Impact::None,
                Impact::None
            )
        );
    }

    #[test]
    fn rejects_malformed_vectors() {
        for bad in [
            "AV:N/AC:L",
            "AV:N/AC:L/Au:N/C:P/I:P/A:P/E:F",
            "AV:N/AC:L/Au:N/C:P/I:P/AV:N",
            "AV:X/AC:L/Au:N/C:P/I:P/A:P",
            "AV:N/AC:L/AU:N/C:P/I:P/A:P",
            "AV:N/AC:L/Au:N/C:P/I:P/A",
            "",
        ] {
            assert!(
                matches!(parse_vector(bad), Err(CvssError::MalformedVector { .. })),
                "{bad} should be rejected"
            );
        }
    }

    #[test]
    fn serializes_in_canonical_order() {
        let parsed = v("A:C/I:N/C:P/Au:S/AC:M/AV:A");
        assert_eq!(parsed.to_vector_string().unwrap(), "AV:A/AC:M/Au:S/C:P/I:N/A:C");
        let mut partial = parsed;
        partial.clear(Metric::Authentication);
        assert_eq!(partial.to_vector_string(), None);
        assert_eq!(partial.to_string(), "AV:A/AC:M/Au:NF/C:P/I:N/A:C");
    }

    #[test]
    fn missing_labels_round_trip_through_serde() {
        let mut partial = v("AV:N/AC:L/Au:N/C:P/I:P/A:P");
        partial.clear(Metric::AccessComplexity);
        let json = serde_json::to_string(&partial).unwrap();
        assert_eq!(json, "\"AV:N/AC:NF/Au:N/C:P/I:P/A:P\"");
        assert_eq!(serde_json::from_str::<Cvss2Vector>(&json).unwrap(), partial);
        assert!(parse_vector("AV:N/AC:NF/Au:N/C:P/I:P/A:P").is_err());
        assert!(parse_vector_allowing_missing("AV:NF/AC:NF/Au:NF/C:NF/I:NF/A:NF").unwrap().is_empty());
    }

    #[test]
    fn label_weights() {
        assert_eq!(numeric_weight(MetricLabel::AccessVector(AccessVector::Network)), 1.0);
        assert_eq!(numeric_weight(MetricLabel::ConfidentialityImpact(Impact::None)), 0.0);
        assert_eq!(numeric_weight(MetricLabel::Authentication(Authentication::None)), 0.704);
    }

    #[test]
    fn labels_are_ordered_by_weight() {
        for metric in Metric::ALL {
            let w: Vec<f64> = metric.labels().into_iter().map(numeric_weight).collect();
            assert!(w.windows(2).all(|p| p[0] < p[1]), "{metric}: {w:?}");
            for (class, label) in metric.labels().into_iter().enumerate() {
                assert_eq!(label.class_index(), class);
                assert_eq!(label.metric(), metric);
            }
        }
    }

    #[test]
    fn impact_examples() {
        assert_eq!(impact_score(&v("AV:N/AC:L/Au:N/C:N/I:N/A:N")).unwrap(), 0.0);
        assert!((impact_score(&v("AV:N/AC:L/Au:N/C:P/I:P/A:P")).unwrap() - 6.443).abs() < 1e-3);
        assert!((impact_score(&v("AV:N/AC:L/Au:N/C:C/I:C/A:C")).unwrap() - 10.001).abs() < 1e-3);
    }

    #[test]
    fn exploitability_examples() {
        assert!((exploitability_score(&v("AV:N/AC:L/Au:N/C:N/I:N/A:N")).unwrap() - 9.997).abs() < 1e-3);
        assert!((exploitability_score(&v("AV:L/AC:H/Au:M/C:N/I:N/A:N")).unwrap() - 1.245).abs() < 1e-3);
    }

    #[test]
    fn base_examples() {
        assert_eq!(base_score(&v("AV:N/AC:L/Au:N/C:P/I:P/A:P")).unwrap(), 7.5);
        assert_eq!(base_score(&v("AV:N/AC:L/Au:N/C:C/I:C/A:C")).unwrap(), 10.0);
        assert_eq!(base_score(&v("AV:N/AC:L/Au:N/C:N/I:N/A:N")).unwrap(), 0.0);
        // Published NVD scores for common vectors.
        assert_eq!(base_score(&v("AV:N/AC:M/Au:N/C:P/I:P/A:P")).unwrap(), 6.8);
        assert_eq!(base_score(&v("AV:N/AC:M/Au:N/C:N/I:P/A:N")).unwrap(), 4.3);
        assert_eq!(base_score(&v("AV:N/AC:L/Au:N/C:N/I:N/A:P")).unwrap(), 5.0);
        assert_eq!(base_score(&v("AV:L/AC:L/Au:N/C:C/I:C/A:C")).unwrap(), 7.2);
        assert_eq!(base_score(&v("AV:N/AC:L/Au:S/C:P/I:P/A:P")).unwrap(), 6.5);
    }

    #[test]
    fn reported_impact_is_clamped() {
        let s = score(&v("AV:N/AC:L/Au:N/C:C/I:C/A:C")).unwrap();
        assert_eq!(s.impact_score, 10.0);
        assert_eq!(s.base_score, 10.0);
    }

    #[test]
    fn scoring_requires_complete_vector() {
        let mut partial = v("AV:N/AC:L/Au:N/C:P/I:P/A:P");
        partial.clear(Metric::IntegrityImpact);
        assert_eq!(impact_score(&partial), Err(CvssError::MissingLabel(Metric::IntegrityImpact)));
        assert!(exploitability_score(&partial).is_ok());
        assert!(base_score(&partial).is_err());
        assert_eq!(
            Cvss2Vector::missing().weight(Metric::AccessVector),
            Err(CvssError::MissingLabel(Metric::AccessVector))
        );
    }

    #[test]
    fn parses_long_and_short_label_names() {
        let m = Metric::AccessVector;
        assert_eq!(m.parse_label("N").unwrap(), MetricLabel::AccessVector(AccessVector::Network));
        assert_eq!(m.parse_label("ADJACENT_NETWORK").unwrap().code(), "A");
        assert_eq!(m.parse_label("Adjacent Network").unwrap().code(), "A");
        assert!(matches!(m.parse_label("Critical"), Err(CvssError::IllegalLabel { .. })));
        assert!(Metric::IntegrityImpact.parse_label("partial").is_ok());
        assert!(Metric::IntegrityImpact.parse_label("LOW").is_err());
    }

    #[test]
    fn enumerates_every_complete_vector_once() {
        let all: std::collections::HashSet<_> = Cvss2Vector::enumerate_complete().collect();
        assert_eq!(all.len(), 729);
        assert!(all.iter().all(Cvss2Vector::is_complete));
    }
}

//! Merging stored metrics with predictions, per-CVE scoring and
//! per-component aggregation.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cve::CveId;
use crate::cvss::{score, Cvss2Vector, Metric, ScoreTriple};
use crate::imputer::{Prediction, PredictionSource};
use crate::nvd::CveRecord;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("{cve_id} is missing {} and no prediction was supplied", keys(.metrics))]
    UnresolvableMetric { cve_id: CveId, metrics: Vec<Metric> },
    #[error("prediction for {found} supplied for record {expected}")]
    PredictionMismatch { expected: CveId, found: CveId },
    #[error("component {0:?} has no assessed CVEs")]
    EmptyComponent(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn keys(metrics: &[Metric]) -> String {
    metrics.iter().map(|m| m.key()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GroundTruth,
    Predicted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessedCve {
    pub cve_id: CveId,
    pub resolved_vector: Cvss2Vector,
    pub scores: ScoreTriple,
    /// Per metric, in canonical order.
    pub provenance: [Provenance; 6],
    /// Set when a predicted metric came from a low-confidence prediction.
    pub low_confidence: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_source: Option<PredictionSource>,
}

impl AssessedCve {
    pub fn is_imputed(&self) -> bool {
        self.provenance.contains(&Provenance::Predicted)
    }

    pub fn predicted_metrics(&self) -> Vec<Metric> {
        Metric::ALL.into_iter().filter(|m| self.provenance[m.index()] == Provenance::Predicted).collect()
    }
}

/// Resolves every metric, preferring the stored label, and scores the result.
pub fn assess(record: &CveRecord, prediction: Option<&Prediction>) -> Result<AssessedCve, RiskError> {
    let stored = record.vector();
    let missing = stored.missing_metrics();
    let mut resolved = *stored;
    let mut provenance = [Provenance::GroundTruth; 6];
    let mut low_confidence = false;
    let mut prediction_source = None;

    if !missing.is_empty() {
        let prediction = prediction.ok_or_else(|| RiskError::UnresolvableMetric {
            cve_id: record.cve_id().clone(),
            metrics: missing.clone(),
        })?;
        if prediction.cve_id() != record.cve_id() {
            return Err(RiskError::PredictionMismatch {
                expected: record.cve_id().clone(),
                found: prediction.cve_id().clone(),
            });
        }
        for metric in &missing {
            resolved.set(prediction.get(*metric).label);
            provenance[metric.index()] = Provenance::Predicted;
        }
        low_confidence = prediction.low_confidence();
        prediction_source = Some(prediction.source());
    }

    let scores = score(&resolved).expect("every metric resolved");
    Ok(AssessedCve {
        cve_id: record.cve_id().clone(),
        resolved_vector: resolved,
        scores,
        provenance,
        low_confidence,
        prediction_source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRisk {
    pub component: String,
    pub n_cves: usize,
    pub n_imputed: usize,
    pub mean_impact: f64,
    pub mean_exploitability: f64,
    pub mean_base: f64,
    pub max_base: f64,
    /// Sorted by CVE id.
    pub cves: Vec<AssessedCve>,
}

/// Arithmetic means and the maximum base score over one component's CVEs.
pub fn aggregate(component: &str, mut assessed: Vec<AssessedCve>) -> Result<ComponentRisk, RiskError> {
    if assessed.is_empty() {
        return Err(RiskError::EmptyComponent(component.to_string()));
    }
    // Summing in a fixed order keeps the means bit-identical under any
    // input permutation.
    assessed.sort_by(|a, b| a.cve_id.cmp(&b.cve_id));
    let n = assessed.len() as f64;
    let mean = |f: fn(&ScoreTriple) -> f64| assessed.iter().map(|a| f(&a.scores)).sum::<f64>() / n;
    Ok(ComponentRisk {
        component: component.to_string(),
        n_cves: assessed.len(),
        n_imputed: assessed.iter().filter(|a| a.is_imputed()).count(),
        mean_impact: mean(|s| s.impact_score),
        mean_exploitability: mean(|s| s.exploitability_score),
        mean_base: mean(|s| s.base_score),
        max_base: assessed.iter().map(|a| a.scores.base_score).fold(0.0, f64::max),
        cves: assessed,
    })
}

/// One summary row per component.
pub fn write_components_csv<W: Write>(writer: W, components: &[ComponentRisk]) -> Result<(), RiskError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "component",
        "n_cves",
        "n_imputed",
        "mean_impact",
        "mean_exploitability",
        "mean_base",
        "max_base",
    ])?;
    for c in components {
        w.write_record([
            c.component.clone(),
            c.n_cves.to_string(),
            c.n_imputed.to_string(),
            c.mean_impact.to_string(),
            c.mean_exploitability.to_string(),
            c.mean_base.to_string(),
            c.max_base.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per assessed CVE. `predicted_metrics` lists the keys of imputed
/// metrics separated by `/`, empty when all came from the record.
pub fn write_detail_csv<W: Write>(writer: W, components: &[ComponentRisk]) -> Result<(), RiskError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "component",
        "cve_id",
        "vector",
        "impact",
        "exploitability",
        "base",
        "predicted_metrics",
        "low_confidence",
    ])?;
    for c in components {
        for a in &c.cves {
            let predicted: Vec<&str> = a.predicted_metrics().iter().map(|m| m.key()).collect();
            w.write_record([
                c.component.clone(),
                a.cve_id.to_string(),
                a.resolved_vector.to_string(),
                a.scores.impact_score.to_string(),
                a.scores.exploitability_score.to_string(),
                a.scores.base_score.to_string(),
                predicted.join("/"),
                a.low_confidence.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(writer: W, components: &[ComponentRisk]) -> Result<(), RiskError> {
    serde_json::to_writer_pretty(writer, components)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvss::{parse_vector, parse_vector_allowing_missing};

    fn record(id: &str, vector: &str) -> CveRecord {
        CveRecord::new(
            CveId::parse(id).unwrap(),
            "heap overflow in parser",
            parse_vector_allowing_missing(vector).unwrap(),
            None,
        )
        .unwrap()
    }

    fn prediction(id: &str, vector: &str) -> Prediction {
        Prediction::from_vector(CveId::parse(id).unwrap(), &parse_vector(vector).unwrap(), PredictionSource::Baseline)
            .unwrap()
    }

    #[test]
    fn complete_record_needs_no_prediction() {
        let a = assess(&record("CVE-2020-0001", "AV:N/AC:L/Au:N/C:P/I:P/A:P"), None).unwrap();
        assert_eq!(a.provenance, [Provenance::GroundTruth; 6]);
        assert_eq!(a.scores.base_score, 7.5);
        assert!(!a.is_imputed());
    }

    #[test]
    fn missing_record_uses_prediction() {
        let r = record("CVE-2020-0001", "AV:NF/AC:NF/Au:NF/C:NF/I:NF/A:NF");
        assert!(matches!(assess(&r, None), Err(RiskError::UnresolvableMetric { .. })));
        let a = assess(&r, Some(&prediction("CVE-2020-0001", "AV:N/AC:L/Au:N/C:C/I:C/A:C"))).unwrap();
        assert_eq!(a.provenance, [Provenance::Predicted; 6]);
        assert_eq!(a.scores.base_score, 10.0);
        assert_eq!(a.prediction_source, Some(PredictionSource::Baseline));
    }

    #[test]
    fn ground_truth_wins_on_present_metrics() {
        let r = record("CVE-2020-0001", "AV:L/AC:H/Au:M/C:N/I:NF/A:NF");
        let a = assess(&r, Some(&prediction("CVE-2020-0001", "AV:N/AC:L/Au:N/C:C/I:C/A:C"))).unwrap();
        assert_eq!(a.resolved_vector.to_string(), "AV:L/AC:H/Au:M/C:N/I:C/A:C");
        assert_eq!(a.predicted_metrics(), vec![Metric::IntegrityImpact, Metric::AvailabilityImpact]);
    }

    #[test]
    fn mismatched_prediction_is_rejected() {
        let r = record("CVE-2020-0001", "AV:NF/AC:L/Au:N/C:P/I:P/A:P");
        let p = prediction("CVE-2020-0002", "AV:N/AC:L/Au:N/C:P/I:P/A:P");
        assert!(matches!(assess(&r, Some(&p)), Err(RiskError::PredictionMismatch { .. })));
    }

    #[test]
    fn aggregate_means_and_max() {
        // base 4.3 and 6.8 style vectors
        let a = assess(&record("CVE-2020-0001", "AV:N/AC:M/Au:N/C:N/I:P/A:N"), None).unwrap();
        let b = assess(&record("CVE-2020-0002", "AV:N/AC:M/Au:N/C:P/I:P/A:P"), None).unwrap();
        let c = aggregate("carts", vec![b.clone(), a.clone()]).unwrap();
        assert_eq!(c.n_cves, 2);
        assert_eq!(c.max_base, 6.8);
        assert!((c.mean_base - (4.3 + 6.8) / 2.0).abs() < 1e-12);
        assert_eq!(c, aggregate("carts", vec![a, b]).unwrap());
        assert!(matches!(aggregate("x", vec![]), Err(RiskError::EmptyComponent(_))));
    }

    #[test]
    fn csv_outputs() {
        let a = assess(&record("CVE-2020-0001", "AV:N/AC:L/Au:N/C:P/I:P/A:P"), None).unwrap();
        let c = aggregate("carts", vec![a]).unwrap();
        let mut buf = Vec::new();
        write_components_csv(&mut buf, std::slice::from_ref(&c)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("component,n_cves,n_imputed,mean_impact,mean_exploitability,mean_base,max_base\n"));
        assert!(text.contains("carts,1,0,"));
        let mut buf = Vec::new();
        write_detail_csv(&mut buf, &[c]).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("carts,CVE-2020-0001,AV:N/AC:L/Au:N/C:P/I:P/A:P,"));
    }
}

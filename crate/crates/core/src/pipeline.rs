//! End-to-end assessment: scan findings → store lookup → imputation →
//! scoring → per-component aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cve::CveId;
use crate::evaluation::masking::ImputationFailure;
use crate::imputer::{ImputeError, Imputer, Prediction};
use crate::nvd::{CveRecord, NvdStore};
use crate::risk::{aggregate, assess, ComponentRisk, RiskError};
use crate::scan::ScanReport;

/// A scanned CVE with no record in the store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotFound {
    pub component: String,
    pub cve_id: CveId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub n_findings: usize,
    pub components: Vec<ComponentRisk>,
    pub not_found: Vec<NotFound>,
    pub imputation_failures: Vec<ImputationFailure>,
    /// Components none of whose CVEs could be assessed.
    pub unassessed_components: Vec<String>,
}

/// Runs `imputer` over `records`, splitting the work across at most
/// `workers` threads. Results come back in input order.
pub fn impute_records(
    records: &[&CveRecord],
    imputer: &dyn Imputer,
    workers: usize,
) -> Vec<Result<Prediction, ImputeError>> {
    let items: Vec<(CveId, String)> =
        records.iter().map(|r| (r.cve_id().clone(), r.description().to_string())).collect();
    if items.is_empty() {
        return Vec::new();
    }
    let chunk = items.len().div_ceil(workers.max(1));
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(move || imputer.predict_many(c))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("imputation worker panicked")).collect()
    })
}

/// Assesses every finding of `report`. CVEs missing from the store are
/// counted in [`Assessment::not_found`]. Without an imputer, any stored
/// record lacking a metric is an error; with one, failed predictions are
/// reported and the CVE is left out of its component.
pub fn assess_scan(
    report: &ScanReport,
    store: &NvdStore,
    imputer: Option<&dyn Imputer>,
    workers: usize,
) -> Result<Assessment, RiskError> {
    let groups = report.components();

    let mut incomplete: BTreeMap<&CveId, &CveRecord> = BTreeMap::new();
    for (_, ids) in &groups {
        for id in ids {
            if let Some(r) = store.lookup(id) {
                if !r.vector().is_complete() {
                    incomplete.insert(r.cve_id(), r);
                }
            }
        }
    }

    let mut predictions: BTreeMap<CveId, Result<Prediction, String>> = BTreeMap::new();
    if let Some((_, first)) = incomplete.iter().next() {
        let Some(imputer) = imputer else {
            return Err(RiskError::UnresolvableMetric {
                cve_id: first.cve_id().clone(),
                metrics: first.vector().missing_metrics(),
            });
        };
        let records: Vec<&CveRecord> = incomplete.values().copied().collect();
        for (record, result) in records.iter().zip(impute_records(&records, imputer, workers)) {
            predictions.insert(record.cve_id().clone(), result.map_err(|e| e.to_string()));
        }
    }

    let mut out = Assessment {
        n_findings: report.len(),
        components: Vec::new(),
        not_found: Vec::new(),
        imputation_failures: Vec::new(),
        unassessed_components: Vec::new(),
    };
    for (component, ids) in groups {
        let mut assessed = Vec::new();
        for id in ids {
            let Some(record) = store.lookup(&id) else {
                out.not_found.push(NotFound { component: component.clone(), cve_id: id });
                continue;
            };
            let prediction = match predictions.get(&id) {
                None => None,
                Some(Ok(p)) => Some(p),
                Some(Err(error)) => {
                    out.imputation_failures.push(ImputationFailure {
                        component: component.clone(),
                        cve_id: id,
                        error: error.clone(),
                    });
                    continue;
                }
            };
            assessed.push(assess(record, prediction)?);
        }
        if assessed.is_empty() {
            out.unassessed_components.push(component);
        } else {
            out.components.push(aggregate(&component, assessed)?);
        }
    }
    Ok(out)
}

/// Per component, the stored records that carry complete vectors; these are
/// the ones usable as ground truth in the masking experiment.
pub fn assessable_groups(report: &ScanReport, store: &NvdStore) -> Vec<(String, Vec<CveRecord>)> {
    report
        .components()
        .into_iter()
        .map(|(component, ids)| {
            let records =
                ids.iter().filter_map(|id| store.lookup(id)).filter(|r| r.vector().is_complete()).cloned().collect();
            (component, records)
        })
        .filter(|(_, records): &(String, Vec<CveRecord>)| !records.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvss::parse_vector_allowing_missing;
    use crate::imputer::PerfectOracle;
    use crate::nvd::ReplacePolicy;
    use crate::scan::{Finding, ScanSource};

    fn store() -> NvdStore {
        let mut s = NvdStore::in_memory();
        for (id, v) in [
            ("CVE-2020-0001", "AV:N/AC:L/Au:N/C:P/I:P/A:P"),
            ("CVE-2020-0002", "AV:NF/AC:NF/Au:NF/C:NF/I:NF/A:NF"),
            ("CVE-2020-0003", "AV:L/AC:L/Au:N/C:C/I:C/A:C"),
        ] {
            let r = CveRecord::new(
                CveId::parse(id).unwrap(),
                "remote code execution in the image parser",
                parse_vector_allowing_missing(v).unwrap(),
                None,
            )
            .unwrap();
            s.insert(r, ReplacePolicy::Replace).unwrap();
        }
        s
    }

    fn report(pairs: &[(&str, &str)]) -> ScanReport {
        ScanReport {
            source: ScanSource::Csv,
            scanned_at: None,
            findings: pairs
                .iter()
                .map(|(c, id)| Finding {
                    component: c.to_string(),
                    cve_id: CveId::parse(id).unwrap(),
                    package: None,
                    severity_hint: None,
                })
                .collect(),
            skipped_non_cve: 0,
            row_errors: Vec::new(),
        }
    }

    #[test]
    fn counts_not_found_and_aggregates() {
        let r = report(&[("carts", "CVE-2020-0001"), ("carts", "CVE-2020-0003"), ("carts", "CVE-2021-9999")]);
        let a = assess_scan(&r, &store(), None, 2).unwrap();
        assert_eq!(a.not_found.len(), 1);
        assert_eq!(a.components.len(), 1);
        assert_eq!(a.components[0].n_cves, 2);
        assert_eq!(a.components[0].n_imputed, 0);
    }

    #[test]
    fn incomplete_record_without_model_fails() {
        let r = report(&[("carts", "CVE-2020-0002")]);
        assert!(matches!(assess_scan(&r, &store(), None, 1), Err(RiskError::UnresolvableMetric { .. })));
    }

    #[test]
    fn imputation_failures_are_reported() {
        let r = report(&[("carts", "CVE-2020-0002"), ("carts", "CVE-2020-0001")]);
        let oracle = PerfectOracle::default();
        let a = assess_scan(&r, &store(), Some(&oracle), 4).unwrap();
        assert_eq!(a.imputation_failures.len(), 1);
        assert_eq!(a.components[0].n_cves, 1);
    }

    #[test]
    fn parallel_imputation_preserves_order() {
        let s = store();
        let records: Vec<&CveRecord> = s.records().collect();
        let oracle = PerfectOracle::new(records.iter().map(|r| (r.cve_id().clone(), *r.vector())));
        for workers in [1, 2, 8] {
            let out = impute_records(&records, &oracle, workers);
            assert_eq!(out.len(), 3);
            assert!(out[0].is_ok() && out[1].is_err() && out[2].is_ok());
        }
    }

    #[test]
    fn assessable_groups_keep_complete_records() {
        let r = report(&[("a", "CVE-2020-0001"), ("a", "CVE-2020-0002"), ("b", "CVE-2020-0002")]);
        let g = assessable_groups(&r, &store());
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].1.len(), 1);
    }
}

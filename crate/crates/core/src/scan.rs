//! Container-scanner output: Trivy JSON reports and a flat CSV layout.
//!
//! Findings are deduplicated on `(component, cve_id)` and kept sorted, so the
//! parsed report does not depend on the order of the input rows.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cve::CveId;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan report {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub component: String,
    pub cve_id: CveId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub package: Option<String>,
    /// Severity string as the scanner reported it. Never used for scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity_hint: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanSource {
    TrivyJson,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub source: ScanSource,
    /// Scanner-reported creation time, when the report carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scanned_at: Option<String>,
    pub findings: Vec<Finding>,
    /// Advisories without a CVE id (GHSA, distro-specific, ...).
    #[serde(default)]
    pub skipped_non_cve: usize,
    #[serde(default)]
    pub row_errors: Vec<RowError>,
}

impl ScanReport {
    /// Groups findings by component, in lexicographic component order.
    pub fn components(&self) -> Vec<(String, Vec<CveId>)> {
        let mut groups: BTreeMap<&str, Vec<CveId>> = BTreeMap::new();
        for f in &self.findings {
            groups.entry(&f.component).or_default().push(f.cve_id.clone());
        }
        groups.into_iter().map(|(c, ids)| (c.to_string(), ids)).collect()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    /// Merges several reports (e.g. one Trivy run per image).
    pub fn merge(reports: impl IntoIterator<Item = ScanReport>) -> Option<ScanReport> {
        let mut iter = reports.into_iter();
        let first = iter.next()?;
        let mut builder = FindingSet::default();
        let mut merged = ScanReport { findings: Vec::new(), ..first.clone() };
        for f in first.findings {
            builder.add(f);
        }
        for r in iter {
            merged.skipped_non_cve += r.skipped_non_cve;
            merged.row_errors.extend(r.row_errors);
            for f in r.findings {
                builder.add(f);
            }
        }
        merged.findings = builder.finish();
        Some(merged)
    }
}

/// Accumulates findings, keeping one per `(component, cve_id)`. Among
/// duplicates the smallest `(package, severity_hint)` wins so the result is
/// independent of input order.
#[derive(Default)]
struct FindingSet {
    by_key: BTreeMap<(String, CveId), Finding>,
}

impl FindingSet {
    fn add(&mut self, finding: Finding) {
        let key = (finding.component.clone(), finding.cve_id.clone());
        match self.by_key.get_mut(&key) {
            Some(existing) => {
                if (&finding.package, &finding.severity_hint) < (&existing.package, &existing.severity_hint) {
                    *existing = finding;
                }
            }
            None => {
                self.by_key.insert(key, finding);
            }
        }
    }

    fn finish(self) -> Vec<Finding> {
        self.by_key.into_values().collect()
    }
}

/// Strips the tag and digest from an image reference, keeping registry and
/// repository path: `registry:5000/sockshop/carts-db:0.4.8@sha256:...` becomes
/// `registry:5000/sockshop/carts-db`.
pub fn component_from_image(image: &str) -> String {
    let image = image.trim();
    let without_digest = image.split_once('@').map_or(image, |(name, _)| name);
    let last_slash = without_digest.rfind('/').map_or(0, |i| i + 1);
    match without_digest[last_slash..].rfind(':') {
        Some(colon) => without_digest[..last_slash + colon].to_string(),
        None => without_digest.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "PascalCase")]
struct TrivyOutput {
    artifact_name: Option<String>,
    created_at: Option<String>,
    #[serde(default)]
    results: Option<Vec<TrivyResult>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "PascalCase")]
struct TrivyResult {
    target: Option<String>,
    #[serde(default)]
    vulnerabilities: Option<Vec<TrivyVulnerability>>,
}

#[derive(Deserialize)]
#[serde(rename_all = "PascalCase")]
struct TrivyVulnerability {
    #[serde(rename = "VulnerabilityID")]
    vulnerability_id: String,
    pkg_name: Option<String>,
    severity: Option<String>,
}

pub fn parse_trivy_json(path: impl AsRef<Path>) -> Result<ScanReport, ScanError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_trivy_reader(BufReader::new(file)).map_err(|message| ScanError::Schema {
        path: path.display().to_string(),
        message,
    })
}

pub fn parse_trivy_reader(reader: impl Read) -> Result<ScanReport, String> {
    let output: TrivyOutput = serde_json::from_reader(reader).map_err(|e| e.to_string())?;
    let mut set = FindingSet::default();
    let mut skipped = 0;
    for result in output.results.unwrap_or_default() {
        let component = output
            .artifact_name
            .as_deref()
            .or(result.target.as_deref())
            .map(component_from_image)
            .filter(|c| !c.is_empty())
            .ok_or("report has neither ArtifactName nor Target")?;
        for vuln in result.vulnerabilities.unwrap_or_default() {
            let Ok(cve_id) = CveId::parse(&vuln.vulnerability_id) else {
                skipped += 1;
                continue;
            };
            set.add(Finding {
                component: component.clone(),
                cve_id,
                package: vuln.pkg_name.filter(|p| !p.is_empty()),
                severity_hint: vuln.severity.filter(|s| !s.is_empty()),
            });
        }
    }
    Ok(ScanReport {
        source: ScanSource::TrivyJson,
        scanned_at: output.created_at,
        findings: set.finish(),
        skipped_non_cve: skipped,
        row_errors: Vec::new(),
    })
}

/// CSV with header `component,cve_id[,package,severity_hint]`. Bad rows are
/// collected as [`RowError`]s and the remaining rows are still parsed.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<ScanReport, ScanError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_csv_reader(BufReader::new(file)).map_err(|message| ScanError::Schema {
        path: path.display().to_string(),
        message,
    })
}

pub fn parse_csv_reader(reader: impl Read) -> Result<ScanReport, String> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let component_col = column("component").ok_or("missing `component` column")?;
    let cve_col = column("cve_id").ok_or("missing `cve_id` column")?;
    let package_col = column("package");
    let severity_col = column("severity_hint");

    let mut set = FindingSet::default();
    let mut row_errors = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                row_errors.push(RowError { line, message: e.to_string() });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let field = |col: Option<usize>| {
            col.and_then(|c| row.get(c)).map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
        };
        let Some(component) = field(Some(component_col)) else {
            row_errors.push(RowError { line, message: "empty component".into() });
            continue;
        };
        let raw_id = field(Some(cve_col)).unwrap_or_default();
        let cve_id = match CveId::parse(&raw_id) {
            Ok(id) => id,
            Err(_) if is_other_advisory(&raw_id) => {
                skipped += 1;
                continue;
            }
            Err(e) => {
                row_errors.push(RowError { line, message: e.to_string() });
                continue;
            }
        };
        set.add(Finding { component, cve_id, package: field(package_col), severity_hint: field(severity_col) });
    }
    Ok(ScanReport {
        source: ScanSource::Csv,
        scanned_at: None,
        findings: set.finish(),
        skipped_non_cve: skipped,
        row_errors,
    })
}

/// Well-formed advisory ids from other namespaces, e.g. `GHSA-...`, `RUSTSEC-...`.
fn is_other_advisory(id: &str) -> bool {
    let prefixes = ["GHSA-", "RUSTSEC-", "PYSEC-", "GO-", "OSV-", "DSA-", "DLA-", "RHSA-", "USN-", "ALAS", "ELSA-", "TEMP-"];
    prefixes.iter().any(|p| id.to_ascii_uppercase().starts_with(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivy(image: &str, vulns: &[(&str, &str)]) -> String {
        let vulns: Vec<_> = vulns
            .iter()
            .map(|(id, pkg)| serde_json::json!({"VulnerabilityID": id, "PkgName": pkg, "Severity": "HIGH"}))
            .collect();
        serde_json::json!({
            "SchemaVersion": 2,
            "ArtifactName": image,
            "ArtifactType": "container_image",
            "Results": [{"Target": format!("{image} (debian 9.13)"), "Class": "os-pkgs", "Vulnerabilities": vulns}]
        })
        .to_string()
    }

    #[test]
    fn component_strips_tag_and_digest() {
        assert_eq!(component_from_image("sockshop/carts-db:latest"), "sockshop/carts-db");
        assert_eq!(component_from_image("weaveworksdemos/carts:0.4.8"), "weaveworksdemos/carts");
        assert_eq!(component_from_image("localhost:5000/user-db"), "localhost:5000/user-db");
        assert_eq!(component_from_image("localhost:5000/user-db:1.0"), "localhost:5000/user-db");
        assert_eq!(component_from_image("mongo@sha256:abcdef"), "mongo");
        assert_eq!(component_from_image("rabbitmq:3.6.8@sha256:abcdef"), "rabbitmq");
        assert_eq!(component_from_image("rabbitmq"), "rabbitmq");
    }

    #[test]
    fn trivy_two_cves() {
        let report =
            parse_trivy_reader(trivy("sockshop/carts-db:latest", &[("CVE-2019-0001", "libc"), ("CVE-2019-0002", "ssl")]).as_bytes())
                .unwrap();
        assert_eq!(report.findings.len(), 2);
        assert!(report.findings.iter().all(|f| f.component == "sockshop/carts-db"));
        assert_eq!(report.source, ScanSource::TrivyJson);
    }

    #[test]
    fn trivy_dedups_same_cve_across_packages() {
        let report = parse_trivy_reader(
            trivy("sockshop/carts-db:latest", &[("CVE-2019-0001", "libc6"), ("CVE-2019-0001", "libc-bin")]).as_bytes(),
        )
        .unwrap();
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].package.as_deref(), Some("libc-bin"));
    }

    #[test]
    fn trivy_empty_and_null_vulnerabilities() {
        let empty = parse_trivy_reader(trivy("sockshop/user:latest", &[]).as_bytes()).unwrap();
        assert!(empty.is_empty());
        let null = r#"{"ArtifactName": "x:1", "Results": [{"Target": "x", "Vulnerabilities": null}]}"#;
        assert!(parse_trivy_reader(null.as_bytes()).unwrap().is_empty());
        let no_results = r#"{"ArtifactName": "x:1"}"#;
        assert!(parse_trivy_reader(no_results.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn trivy_skips_non_cve_advisories() {
        let report =
            parse_trivy_reader(trivy("app:1", &[("GHSA-aaaa-bbbb-cccc", "lodash"), ("CVE-2020-8203", "lodash")]).as_bytes())
                .unwrap();
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.skipped_non_cve, 1);
    }

    #[test]
    fn trivy_schema_error() {
        assert!(parse_trivy_reader("[1,2,3]".as_bytes()).is_err());
        assert!(parse_trivy_reader(r#"{"Results": [{"Vulnerabilities": []}]}"#.as_bytes()).is_err());
    }

    #[test]
    fn csv_three_rows() {
        let csv = "component,cve_id,package,severity_hint\n\
                   carts,CVE-2019-0001,libc,HIGH\n\
                   carts-db,CVE-2019-0002,,\n\
                   user,CVE-2019-0003,openssl,weird-severity\n";
        let report = parse_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(report.findings.len(), 3);
        assert_eq!(report.findings[2].severity_hint.as_deref(), Some("weird-severity"));
        assert_eq!(report.findings[1].package, None);
    }

    #[test]
    fn csv_malformed_cve_is_row_error() {
        let csv = "component,cve_id\ncarts,CVE-2019-0001\ncarts,CVE-19-1\n,CVE-2019-0003\nuser,CVE-2019-0004\n";
        let report = parse_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!(report.findings.len(), 2);
        assert_eq!(report.row_errors.len(), 2);
        assert_eq!(report.row_errors[0].line, 3);
        assert_eq!(report.row_errors[1].line, 4);
    }

    #[test]
    fn csv_duplicates_and_missing_columns() {
        let csv = "cve_id,component\nCVE-2019-0001,carts\nCVE-2019-0001,carts\n";
        assert_eq!(parse_csv_reader(csv.as_bytes()).unwrap().findings.len(), 1);
        assert!(parse_csv_reader("component,package\ncarts,x\n".as_bytes()).is_err());
    }

    #[test]
    fn components_grouping() {
        let csv = "component,cve_id\nuser,CVE-2019-0003\ncarts,CVE-2019-0002\ncarts,CVE-2019-0001\n";
        let report = parse_csv_reader(csv.as_bytes()).unwrap();
        let groups = report.components();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].0, "carts");
        assert_eq!(groups[0].1.len(), 2);
        assert_eq!(groups[1].0, "user");

        let single = parse_csv_reader("component,cve_id\ncarts,CVE-2019-0001\n".as_bytes()).unwrap();
        assert_eq!(single.components().len(), 1);
        let empty = parse_csv_reader("component,cve_id\n".as_bytes()).unwrap();
        assert!(empty.components().is_empty());
    }

    #[test]
    fn merge_reports() {
        let a = parse_trivy_reader(trivy("carts:1", &[("CVE-2019-0001", "a")]).as_bytes()).unwrap();
        let b = parse_trivy_reader(trivy("user:1", &[("CVE-2019-0001", "a"), ("GHSA-1", "b")]).as_bytes()).unwrap();
        let merged = ScanReport::merge([a, b]).unwrap();
        assert_eq!(merged.findings.len(), 2);
        assert_eq!(merged.skipped_non_cve, 1);
    }
}

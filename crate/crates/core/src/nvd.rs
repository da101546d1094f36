//! Local mirror of NVD CVE records.
//!
//! On disk a store is a directory holding
//!
//! ```text
//! records.jsonl   one CveRecord per line, sorted by CVE id
//! index.tsv       cve_id <TAB> line number <TAB> completeness tag
//! .lock           present while a writer holds the store
//! ```
//!
//! Both files are rewritten through a temporary file and an atomic rename,
//! so readers never observe a half-written store. Only one writer may hold a
//! store at a time; see [`NvdStore::open_writable`].

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cve::CveId;
use crate::cvss::{self, Cvss2Vector, Metric};

/// Placeholder written for missing metric labels in CSV exports.
pub const NOT_FOUND: &str = "NF";

const RECORDS_FILE: &str = "records.jsonl";
const INDEX_FILE: &str = "index.tsv";
const LOCK_FILE: &str = ".lock";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("feed {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0} already stored with different content and replacement is disabled")]
    DuplicateConflict(CveId),
    #[error("store {0} is locked by another writer")]
    Locked(PathBuf),
    #[error("store {path} is corrupt at line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("record has an empty description")]
    EmptyDescription,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One NVD entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StoredRecord", into = "StoredRecord")]
pub struct CveRecord {
    cve_id: CveId,
    description: String,
    vector: Cvss2Vector,
    published_date: Option<String>,
}

impl CveRecord {
    /// Normalizes whitespace in the description and rejects empty ones.
    pub fn new(
        cve_id: CveId,
        description: &str,
        vector: Cvss2Vector,
        published_date: Option<String>,
    ) -> Result<Self, StoreError> {
        let description = normalize_description(description);
        if description.is_empty() {
            return Err(StoreError::EmptyDescription);
        }
        Ok(Self { cve_id, description, vector, published_date })
    }

    pub fn cve_id(&self) -> &CveId {
        &self.cve_id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn vector(&self) -> &Cvss2Vector {
        &self.vector
    }

    pub fn published_date(&self) -> Option<&str> {
        self.published_date.as_deref()
    }

    /// 1 when the record carries all six CVSS v2 metrics, else 0.
    pub fn completeness_tag(&self) -> u8 {
        u8::from(self.vector.is_complete())
    }

    /// Copy of this record with every metric hidden.
    pub fn masked(&self) -> CveRecord {
        CveRecord { vector: Cvss2Vector::missing(), ..self.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct StoredRecord {
    cve_id: CveId,
    description: String,
    vector: Cvss2Vector,
    completeness_tag: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    published_date: Option<String>,
}

impl TryFrom<StoredRecord> for CveRecord {
    type Error = String;

    fn try_from(raw: StoredRecord) -> Result<Self, Self::Error> {
        let record = CveRecord::new(raw.cve_id, &raw.description, raw.vector, raw.published_date)
            .map_err(|e| e.to_string())?;
        if record.completeness_tag() != raw.completeness_tag {
            return Err(format!(
                "{}: completeness tag {} disagrees with vector {}",
                record.cve_id, raw.completeness_tag, record.vector
            ));
        }
        Ok(record)
    }
}

impl From<CveRecord> for StoredRecord {
    fn from(r: CveRecord) -> Self {
        let completeness_tag = r.completeness_tag();
        StoredRecord {
            cve_id: r.cve_id,
            description: r.description,
            vector: r.vector,
            completeness_tag,
            published_date: r.published_date,
        }
    }
}

fn normalize_description(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoreStats {
    pub total: usize,
    pub available: usize,
    pub unavailable: usize,
    pub percent_unavailable: f64,
}

impl StoreStats {
    pub fn from_counts(available: usize, unavailable: usize) -> Self {
        let total = available + unavailable;
        let percent_unavailable = if total == 0 { 0.0 } else { 100.0 * unavailable as f64 / total as f64 };
        Self { total, available, unavailable, percent_unavailable }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedFormat {
    /// NVD REST API 2.0 response (`{"vulnerabilities": [{"cve": ...}]}`).
    #[serde(rename = "nvd-api-2.0-json")]
    NvdApi2,
    /// NVD 1.1 data feed (`{"CVE_Items": [...]}`).
    #[serde(rename = "legacy-feed-json")]
    LegacyFeed,
}

impl std::str::FromStr for FeedFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nvd-api-2.0-json" | "api" | "nvd-api-2.0" => Ok(FeedFormat::NvdApi2),
            "legacy-feed-json" | "legacy" => Ok(FeedFormat::LegacyFeed),
            other => Err(format!("unknown feed format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReplacePolicy {
    /// A re-ingested id overwrites the stored record.
    #[default]
    Replace,
    /// A re-ingested id with different content fails the ingest.
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRecord {
    pub cve_id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    /// Records stored by this ingest (new or replaced).
    pub ingested: usize,
    pub replaced: usize,
    /// Records identical to what the store already held.
    pub unchanged: usize,
    pub rejected: Vec<RejectedRecord>,
}

impl IngestReport {
    fn merge(&mut self, other: IngestReport) {
        self.ingested += other.ingested;
        self.replaced += other.replaced;
        self.unchanged += other.unchanged;
        self.rejected.extend(other.rejected);
    }
}

/// Which records an export includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportFilter {
    #[default]
    All,
    CompleteOnly,
    IncompleteOnly,
}

struct StoreLock {
    path: PathBuf,
}

impl StoreLock {
    fn acquire(dir: &Path) -> Result<Self, StoreError> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked(dir.to_path_buf())),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for StoreLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// The local NVD mirror. Records are kept sorted by CVE id.
#[derive(Default)]
pub struct NvdStore {
    dir: Option<PathBuf>,
    records: BTreeMap<CveId, CveRecord>,
    lock: Option<StoreLock>,
}

impl NvdStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens an existing store for reading. A missing directory is an empty store.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref();
        Ok(Self { dir: Some(dir.to_path_buf()), records: load_records(dir)?, lock: None })
    }

    /// Opens (creating if needed) a store for ingest, taking its exclusive lock.
    pub fn open_writable(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let lock = StoreLock::acquire(dir)?;
        Ok(Self { dir: Some(dir.to_path_buf()), records: load_records(dir)?, lock: Some(lock) })
    }

    pub fn is_writable(&self) -> bool {
        self.dir.is_none() || self.lock.is_some()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn lookup(&self, cve_id: &CveId) -> Option<&CveRecord> {
        self.records.get(cve_id)
    }

    pub fn records(&self) -> impl Iterator<Item = &CveRecord> {
        self.records.values()
    }

    pub fn stats(&self) -> StoreStats {
        let available = self.records.values().filter(|r| r.completeness_tag() == 1).count();
        StoreStats::from_counts(available, self.records.len() - available)
    }

    /// Inserts one record. Returns `true` if the store changed.
    pub fn insert(&mut self, record: CveRecord, policy: ReplacePolicy) -> Result<bool, StoreError> {
        match self.records.get(record.cve_id()) {
            Some(existing) if *existing == record => Ok(false),
            Some(_) if policy == ReplacePolicy::Reject => Err(StoreError::DuplicateConflict(record.cve_id.clone())),
            _ => {
                self.records.insert(record.cve_id.clone(), record);
                Ok(true)
            }
        }
    }

    /// Parses a feed file and inserts its records. Call [`NvdStore::commit`]
    /// to persist.
    pub fn ingest_feed(
        &mut self,
        path: impl AsRef<Path>,
        format: Option<FeedFormat>,
        policy: ReplacePolicy,
    ) -> Result<IngestReport, StoreError> {
        let path = path.as_ref();
        let file = File::open(path)?;
        let parsed = parse_feed(BufReader::new(file), format).map_err(|message| StoreError::Schema {
            path: path.display().to_string(),
            message,
        })?;
        self.ingest_parsed(parsed, policy)
    }

    pub fn ingest_reader(
        &mut self,
        reader: impl Read,
        format: Option<FeedFormat>,
        policy: ReplacePolicy,
    ) -> Result<IngestReport, StoreError> {
        let parsed = parse_feed(reader, format)
            .map_err(|message| StoreError::Schema { path: "<reader>".into(), message })?;
        self.ingest_parsed(parsed, policy)
    }

    fn ingest_parsed(&mut self, parsed: ParsedFeed, policy: ReplacePolicy) -> Result<IngestReport, StoreError> {
        let mut report = IngestReport { rejected: parsed.rejected, ..Default::default() };
        for record in parsed.records {
            let existed = self.records.contains_key(record.cve_id());
            if self.insert(record, policy)? {
                report.ingested += 1;
                report.replaced += usize::from(existed);
            } else {
                report.unchanged += 1;
            }
        }
        Ok(report)
    }

    /// Ingests several feeds in order; later feeds win on conflicting ids.
    pub fn ingest_feeds<P: AsRef<Path>>(
        &mut self,
        paths: &[P],
        format: Option<FeedFormat>,
        policy: ReplacePolicy,
    ) -> Result<IngestReport, StoreError> {
        let mut total = IngestReport::default();
        for path in paths {
            total.merge(self.ingest_feed(path, format, policy)?);
        }
        Ok(total)
    }

    /// Writes the record and index files. In-memory stores do nothing.
    pub fn commit(&self) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        if self.lock.is_none() {
            return Err(io::Error::new(io::ErrorKind::PermissionDenied, "store opened read-only").into());
        }
        write_atomically(&dir.join(RECORDS_FILE), |w| {
            for record in self.records.values() {
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        })?;
        write_atomically(&dir.join(INDEX_FILE), |w| {
            for (line, record) in self.records.values().enumerate() {
                writeln!(w, "{}\t{}\t{}", record.cve_id, line + 1, record.completeness_tag())?;
            }
            Ok(())
        })?;
        Ok(())
    }

    /// CSV export: `cve_id`, `description`, one column per metric holding the
    /// NVD label name or `NF`, and `completeness_tag`.
    pub fn export_csv<W: Write>(&self, writer: W, filter: ExportFilter) -> Result<usize, StoreError> {
        export_records_csv(self.records.values(), writer, filter)
    }
}

/// Writes records in the CSV export layout.
pub fn export_records_csv<'a, W: Write>(
    records: impl IntoIterator<Item = &'a CveRecord>,
    writer: W,
    filter: ExportFilter,
) -> Result<usize, StoreError> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["cve_id", "description"];
    header.extend(Metric::ALL.map(Metric::column_name));
    header.push("completeness_tag");
    out.write_record(&header)?;
    let mut written = 0;
    for record in records {
        let keep = match filter {
            ExportFilter::All => true,
            ExportFilter::CompleteOnly => record.completeness_tag() == 1,
            ExportFilter::IncompleteOnly => record.completeness_tag() == 0,
        };
        if !keep {
            continue;
        }
        let mut row = vec![record.cve_id.to_string(), record.description.clone()];
        row.extend(record.vector.labels().map(|(_, l)| l.map_or(NOT_FOUND, |l| l.name()).to_string()));
        row.push(record.completeness_tag().to_string());
        out.write_record(&row)?;
        written += 1;
    }
    out.flush()?;
    Ok(written)
}

fn write_atomically(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<(), StoreError>,
) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        w.flush()?;
        w.get_ref().sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

impl From<serde_json::Error> for StoreError {
    fn from(e: serde_json::Error) -> Self {
        StoreError::Io(e.into())
    }
}

fn load_records(dir: &Path) -> Result<BTreeMap<CveId, CveRecord>, StoreError> {
    let path = dir.join(RECORDS_FILE);
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(e) => return Err(e.into()),
    };
    let mut records = BTreeMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CveRecord = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
            path: path.clone(),
            line: n + 1,
            message: e.to_string(),
        })?;
        if records.insert(record.cve_id.clone(), record).is_some() {
            return Err(StoreError::Corrupt { path, line: n + 1, message: "duplicate CVE id".into() });
        }
    }
    Ok(records)
}

// --- feed parsing -----------------------------------------------------------

pub(crate) struct ParsedFeed {
    pub records: Vec<CveRecord>,
    pub rejected: Vec<RejectedRecord>,
}

#[derive(Deserialize)]
struct LangString {
    #[serde(default)]
    lang: String,
    #[serde(default)]
    value: String,
}

#[derive(Deserialize)]
struct ApiResponse {
    vulnerabilities: Vec<ApiItem>,
}

#[derive(Deserialize)]
struct ApiItem {
    cve: ApiCve,
}

#[derive(Deserialize)]
struct ApiCve {
    id: String,
    published: Option<String>,
    #[serde(default)]
    descriptions: Vec<LangString>,
    #[serde(default)]
    metrics: ApiMetrics,
}

#[derive(Deserialize, Default)]
struct ApiMetrics {
    #[serde(default, rename = "cvssMetricV2")]
    cvss_metric_v2: Vec<ApiCvssMetricV2>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ApiCvssMetricV2 {
    #[serde(rename = "type")]
    kind: Option<String>,
    cvss_data: CvssFields,
}

/// Vector fields shared by the API 2.0 `cvssData` and legacy `cvssV2` objects.
#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct CvssFields {
    vector_string: Option<String>,
    access_vector: Option<String>,
    access_complexity: Option<String>,
    authentication: Option<String>,
    confidentiality_impact: Option<String>,
    integrity_impact: Option<String>,
    availability_impact: Option<String>,
}

#[derive(Deserialize)]
struct LegacyFeed {
    #[serde(rename = "CVE_Items")]
    items: Vec<LegacyItem>,
}

#[derive(Deserialize)]
struct LegacyItem {
    cve: LegacyCve,
    #[serde(default)]
    impact: LegacyImpact,
    #[serde(rename = "publishedDate")]
    published_date: Option<String>,
}

#[derive(Deserialize)]
struct LegacyCve {
    #[serde(rename = "CVE_data_meta")]
    meta: LegacyMeta,
    #[serde(default)]
    description: LegacyDescription,
}

#[derive(Deserialize)]
struct LegacyMeta {
    #[serde(rename = "ID")]
    id: String,
}

#[derive(Deserialize, Default)]
struct LegacyDescription {
    #[serde(default)]
    description_data: Vec<LangString>,
}

#[derive(Deserialize, Default)]
struct LegacyImpact {
    #[serde(rename = "baseMetricV2")]
    base_metric_v2: Option<LegacyBaseMetricV2>,
}

#[derive(Deserialize)]
struct LegacyBaseMetricV2 {
    #[serde(rename = "cvssV2", default)]
    cvss_v2: CvssFields,
}

impl CvssFields {
    /// The vector string wins when present; otherwise the per-metric fields
    /// are read individually and absent ones stay missing.
    fn to_vector(&self) -> Result<Cvss2Vector, String> {
        if let Some(text) = self.vector_string.as_deref().filter(|s| !s.trim().is_empty()) {
            let text = text.trim().trim_start_matches('(').trim_end_matches(')');
            let text = text.strip_prefix("CVSS:2.0/").unwrap_or(text);
            return cvss::parse_vector(text).map_err(|e| e.to_string());
        }
        let fields = [
            (Metric::AccessVector, &self.access_vector),
            (Metric::AccessComplexity, &self.access_complexity),
            (Metric::Authentication, &self.authentication),
            (Metric::ConfidentialityImpact, &self.confidentiality_impact),
            (Metric::IntegrityImpact, &self.integrity_impact),
            (Metric::AvailabilityImpact, &self.availability_impact),
        ];
        let mut vector = Cvss2Vector::missing();
        for (metric, value) in fields {
            if let Some(value) = value {
                vector.set(metric.parse_label(value).map_err(|e| e.to_string())?);
            }
        }
        Ok(vector)
    }
}

/// English description if one exists (first in feed order), otherwise the
/// first non-empty description in any language.
fn pick_description(descriptions: &[LangString]) -> Option<&str> {
    let non_empty = || descriptions.iter().filter(|d| !d.value.trim().is_empty());
    non_empty()
        .find(|d| d.lang.eq_ignore_ascii_case("en") || d.lang.to_ascii_lowercase().starts_with("en-"))
        .or_else(|| non_empty().next())
        .map(|d| d.value.as_str())
}

fn normalize_date(raw: Option<&str>) -> Option<String> {
    let date = raw?.trim().get(..10)?;
    let b = date.as_bytes();
    let shaped = b[4] == b'-' && b[7] == b'-' && date.bytes().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    shaped.then(|| date.to_string())
}

struct RawEntry<'a> {
    id: &'a str,
    descriptions: &'a [LangString],
    cvss: Option<&'a CvssFields>,
    published: Option<&'a str>,
}

fn build_record(entry: RawEntry<'_>) -> Result<CveRecord, RejectedRecord> {
    let reject = |reason: String| RejectedRecord { cve_id: Some(entry.id.to_string()), reason };
    let cve_id = CveId::parse(entry.id).map_err(|e| reject(e.to_string()))?;
    let description =
        pick_description(entry.descriptions).ok_or_else(|| reject("record has no description".into()))?;
    let vector = match entry.cvss {
        Some(fields) => fields.to_vector().map_err(reject)?,
        None => Cvss2Vector::missing(),
    };
    CveRecord::new(cve_id, description, vector, normalize_date(entry.published)).map_err(|e| reject(e.to_string()))
}

pub(crate) fn parse_feed(mut reader: impl Read, format: Option<FeedFormat>) -> Result<ParsedFeed, String> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| e.to_string())?;
    let format = match format {
        Some(f) => f,
        None => detect_format(&text)?,
    };
    let mut feed = ParsedFeed { records: Vec::new(), rejected: Vec::new() };
    let mut push = |result: Result<CveRecord, RejectedRecord>| match result {
        Ok(r) => feed.records.push(r),
        Err(r) => feed.rejected.push(r),
    };
    match format {
        FeedFormat::NvdApi2 => {
            let response: ApiResponse = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            for item in &response.vulnerabilities {
                let cve = &item.cve;
                let primary = cve
                    .metrics
                    .cvss_metric_v2
                    .iter()
                    .find(|m| m.kind.as_deref() == Some("Primary"))
                    .or_else(|| cve.metrics.cvss_metric_v2.first());
                push(build_record(RawEntry {
                    id: &cve.id,
                    descriptions: &cve.descriptions,
                    cvss: primary.map(|m| &m.cvss_data),
                    published: cve.published.as_deref(),
                }));
            }
        }
        FeedFormat::LegacyFeed => {
            let legacy: LegacyFeed = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            for item in &legacy.items {
                push(build_record(RawEntry {
                    id: &item.cve.meta.id,
                    descriptions: &item.cve.description.description_data,
                    cvss: item.impact.base_metric_v2.as_ref().map(|m| &m.cvss_v2),
                    published: item.published_date.as_deref(),
                }));
            }
        }
    }
    Ok(feed)
}

fn detect_format(text: &str) -> Result<FeedFormat, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if value.get("vulnerabilities").is_some() {
        Ok(FeedFormat::NvdApi2)
    } else if value.get("CVE_Items").is_some() {
        Ok(FeedFormat::LegacyFeed)
    } else {
        Err("neither `vulnerabilities` (API 2.0) nor `CVE_Items` (legacy feed) found".into())
    }
}

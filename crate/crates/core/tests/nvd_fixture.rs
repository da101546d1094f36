//! Checks against the real NVD records in `fixtures/nvd-slice-5000.json`.

mod common;

use serde_json::Value;
use vulnrisk::cvss::{base_score, parse_vector};
use vulnrisk::imputer::baseline::{examples_from_records, train_baseline, BaselineConfig};
use vulnrisk::nvd::{ExportFilter, NvdStore};
use vulnrisk::text::StopWords;
use vulnrisk::CveId;

use common::*;

fn raw_items() -> Vec<Value> {
    let text = std::fs::read_to_string(NVD_SLICE).unwrap();
    let feed: Value = serde_json::from_str(&text).unwrap();
    feed["CVE_Items"].as_array().unwrap().clone()
}

#[test]
fn engine_reproduces_published_base_scores() {
    let items = raw_items();
    assert_eq!(items.len(), 5000);
    for item in &items {
        let v2 = &item["impact"]["baseMetricV2"]["cvssV2"];
        let vector = parse_vector(v2["vectorString"].as_str().unwrap()).unwrap();
        let published = v2["baseScore"].as_f64().unwrap();
        let id = item["cve"]["CVE_data_meta"]["ID"].as_str().unwrap();
        assert_eq!(base_score(&vector).unwrap(), published, "{id} {vector}");
    }
}

#[test]
fn ingested_records_match_the_feed() {
    let store = nvd_slice();
    assert_eq!(store.len(), 5000);
    assert_eq!(store.stats().unavailable, 0);
    for item in raw_items() {
        let id = CveId::parse(item["cve"]["CVE_data_meta"]["ID"].as_str().unwrap()).unwrap();
        let record = store.lookup(&id).unwrap();
        let expected = item["impact"]["baseMetricV2"]["cvssV2"]["vectorString"].as_str().unwrap();
        assert_eq!(record.vector().to_vector_string().unwrap(), expected);
        assert!(!record.description().is_empty());
    }
}

#[test]
fn persisted_store_reopens_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store");
    {
        let mut store = NvdStore::open_writable(&path).unwrap();
        store
            .ingest_feed(NVD_SLICE, None, vulnrisk::nvd::ReplacePolicy::Replace)
            .unwrap();
        store.commit().unwrap();
    }
    let reopened = NvdStore::open(&path).unwrap();
    let original = nvd_slice();
    assert!(reopened.records().eq(original.records()));
    let mut a = Vec::new();
    let mut b = Vec::new();
    reopened.export_csv(&mut a, ExportFilter::All).unwrap();
    original.export_csv(&mut b, ExportFilter::All).unwrap();
    assert_eq!(a, b);
}

#[test]
fn training_on_the_slice_is_deterministic() {
    let store = nvd_slice();
    let stop = StopWords::english_v1();
    let records: Vec<_> = store.records().take(1500).cloned().collect();
    let (corpus, _) = examples_from_records(records.iter(), 132, &stop).unwrap();
    let config = BaselineConfig { max_epochs: 8, ..BaselineConfig::default() };
    let dump = |c: &BaselineConfig| {
        let mut buf = Vec::new();
        train_baseline(&corpus, &stop, c).unwrap().model.write_to(&mut buf).unwrap();
        buf
    };
    let first = dump(&config);
    assert_eq!(first, dump(&config));
    assert_ne!(first, dump(&BaselineConfig { seed: 7, ..config.clone() }));
}

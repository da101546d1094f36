#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vulnrisk::cvss::{parse_vector, parse_vector_allowing_missing};
use vulnrisk::nvd::{FeedFormat, ReplacePolicy};
use vulnrisk::{CveId, CveRecord, Cvss2Vector, NvdStore};

pub const NVD_SLICE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/nvd-slice-5000.json");

pub const WORDS: &[&str] = &[
    "remote", "attackers", "execute", "arbitrary", "code", "crafted", "request", "buffer", "overflow", "heap",
    "local", "users", "gain", "privileges", "cross", "site", "scripting", "sql", "injection", "denial", "service",
    "memory", "corruption", "authenticated", "parameter", "kernel", "container", "image", "parser", "header",
];

pub fn cve(n: usize) -> CveId {
    CveId::parse(&format!("CVE-2021-{:05}", 10_000 + n)).unwrap()
}

pub fn random_vector(rng: &mut impl Rng) -> Cvss2Vector {
    Cvss2Vector::from_class_indices(std::array::from_fn(|_| rng.random_range(0..3))).unwrap()
}

pub fn random_description(rng: &mut impl Rng) -> String {
    let n = rng.random_range(8..40);
    (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

pub fn record(id: CveId, vector: &str) -> CveRecord {
    let v = parse_vector_allowing_missing(vector).unwrap();
    CveRecord::new(id, "remote attackers execute arbitrary code via a crafted request", v, None).unwrap()
}

/// `n` records with random complete vectors, grouped round-robin into
/// `components` components named `svc-00`, `svc-01`, ...
pub fn grouped_records(n: usize, components: usize, seed: u64) -> Vec<(String, Vec<CveRecord>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: Vec<(String, Vec<CveRecord>)> =
        (0..components).map(|c| (format!("svc-{c:02}"), Vec::new())).collect();
    for i in 0..n {
        let r = CveRecord::new(cve(i), &random_description(&mut rng), random_vector(&mut rng), None).unwrap();
        groups[i % components].1.push(r);
    }
    groups
}

pub fn store_with(available: usize, unavailable: usize) -> NvdStore {
    let mut store = NvdStore::in_memory();
    for i in 0..available + unavailable {
        let v = if i < available { "AV:N/AC:L/Au:N/C:P/I:P/A:P" } else { "AV:NF/AC:NF/Au:NF/C:NF/I:NF/A:NF" };
        store.insert(record(cve(i), v), ReplacePolicy::Replace).unwrap();
    }
    store
}

pub fn nvd_slice() -> NvdStore {
    let mut store = NvdStore::in_memory();
    store.ingest_feed(NVD_SLICE, Some(FeedFormat::LegacyFeed), ReplacePolicy::Replace).unwrap();
    store
}

pub fn complete(vector: &str) -> Cvss2Vector {
    parse_vector(vector).unwrap()
}

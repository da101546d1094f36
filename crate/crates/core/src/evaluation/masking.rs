//! Hide the vectors of a fraction of complete records, impute them, and
//! compare scores of the imputed vectors against the hidden truth.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::error_bias::{bias, percentage_error, BiasAccumulator, ErrorAccumulator};
use super::EvalError;
use crate::cve::CveId;
use crate::cvss::{score, Cvss2Vector, ScoreTriple};
use crate::imputer::Imputer;
use crate::nvd::CveRecord;
use crate::risk::assess;

/// Guards `ceil` against products like `0.24 * 100 = 24.000000000000004`.
const CEIL_SLACK: f64 = 1e-9;

/// Number of records masked out of `n` for a given fraction.
pub fn masked_count(n: usize, mask_fraction: f64) -> usize {
    ((mask_fraction * n as f64 - CEIL_SLACK).ceil().max(0.0) as usize).min(n)
}

/// Per-component means. Error means are `None` when every compared pair had
/// a zero true value; all means are `None` when nothing was compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBiasRow {
    pub component: String,
    pub n_records: usize,
    pub n_masked: usize,
    pub n_compared: usize,
    pub impact_error_pct: Option<f64>,
    pub exploitability_error_pct: Option<f64>,
    pub base_error_pct: Option<f64>,
    pub impact_bias: Option<f64>,
    pub exploitability_bias: Option<f64>,
    pub base_bias: Option<f64>,
    pub zero_true_excluded: ZeroTrueCounts,
}

/// Pairs left out of percentage-error means because the true score was 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroTrueCounts {
    pub impact: usize,
    pub exploitability: usize,
    pub base: usize,
}

impl ZeroTrueCounts {
    pub fn total(&self) -> usize {
        self.impact + self.exploitability + self.base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskedComparison {
    pub component: String,
    pub cve_id: CveId,
    pub true_vector: Cvss2Vector,
    pub imputed_vector: Cvss2Vector,
    pub true_scores: ScoreTriple,
    pub imputed_scores: ScoreTriple,
    pub impact_error_pct: Option<f64>,
    pub exploitability_error_pct: Option<f64>,
    pub base_error_pct: Option<f64>,
    pub impact_bias: f64,
    pub exploitability_bias: f64,
    pub base_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedComponent {
    pub component: String,
    pub n_records: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationFailure {
    pub component: String,
    pub cve_id: CveId,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskingOutcome {
    pub mask_fraction: f64,
    pub seed: u64,
    pub rows: Vec<ErrorBiasRow>,
    /// Components with fewer than two records.
    pub skipped: Vec<SkippedComponent>,
    pub details: Vec<MaskedComparison>,
    pub imputation_failures: Vec<ImputationFailure>,
    pub zero_true_excluded: ZeroTrueCounts,
}

fn component_seed(seed: u64, component: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in component.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs the experiment over `groups` of `(component, records)`. Every record
/// must carry a complete vector. Each component is masked independently with
/// its own seed derived from `seed` and the component name, so adding or
/// removing a component does not change the selection in the others.
pub fn masking_experiment(
    groups: &[(String, Vec<CveRecord>)],
    mask_fraction: f64,
    seed: u64,
    imputer: &dyn Imputer,
) -> Result<MaskingOutcome, EvalError> {
    if !(0.0..=1.0).contains(&mask_fraction) {
        return Err(EvalError::InvalidMaskFraction(mask_fraction));
    }
    for (_, records) in groups {
        if let Some(r) = records.iter().find(|r| !r.vector().is_complete()) {
            return Err(EvalError::IncompleteRecord(r.cve_id().clone()));
        }
    }

    let mut sorted: Vec<&(String, Vec<CveRecord>)> = groups.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let mut outcome = MaskingOutcome {
        mask_fraction,
        seed,
        rows: Vec::new(),
        skipped: Vec::new(),
        details: Vec::new(),
        imputation_failures: Vec::new(),
        zero_true_excluded: ZeroTrueCounts::default(),
    };

    for (component, records) in sorted {
        if records.len() < 2 {
            outcome.skipped.push(SkippedComponent {
                component: component.clone(),
                n_records: records.len(),
                reason: "insufficient data: fewer than 2 records".into(),
            });
            continue;
        }
        let mut records: Vec<&CveRecord> = records.iter().collect();
        records.sort_by(|a, b| a.cve_id().cmp(b.cve_id()));
        records.shuffle(&mut ChaCha8Rng::seed_from_u64(component_seed(seed, component)));
        let n_masked = masked_count(records.len(), mask_fraction);
        let mut chosen: Vec<&CveRecord> = records[..n_masked].to_vec();
        chosen.sort_by(|a, b| a.cve_id().cmp(b.cve_id()));

        let masked: Vec<CveRecord> = chosen.iter().map(|r| r.masked()).collect();
        let requests: Vec<(CveId, String)> =
            masked.iter().map(|r| (r.cve_id().clone(), r.description().to_string())).collect();
        let predictions = imputer.predict_many(&requests);

        let mut errors = [ErrorAccumulator::default(); 3];
        let mut biases = [BiasAccumulator::default(); 3];
        let mut n_compared = 0;
        for ((original, hidden), prediction) in chosen.iter().zip(&masked).zip(predictions) {
            let resolved = prediction.map_err(|e| e.to_string()).and_then(|p| assess(hidden, Some(&p)).map_err(|e| e.to_string()));
            let assessed = match resolved {
                Ok(a) => a,
                Err(error) => {
                    outcome.imputation_failures.push(ImputationFailure {
                        component: component.clone(),
                        cve_id: original.cve_id().clone(),
                        error,
                    });
                    continue;
                }
            };
            let truth = score(original.vector()).expect("complete vector");
            let imputed = assessed.scores;
            let pairs = [
                (truth.impact_score, imputed.impact_score),
                (truth.exploitability_score, imputed.exploitability_score),
                (truth.base_score, imputed.base_score),
            ];
            for (k, (t, p)) in pairs.into_iter().enumerate() {
                errors[k].push(t, p);
                biases[k].push(t, p);
            }
            n_compared += 1;
            outcome.details.push(MaskedComparison {
                component: component.clone(),
                cve_id: original.cve_id().clone(),
                true_vector: *original.vector(),
                imputed_vector: assessed.resolved_vector,
                true_scores: truth,
                imputed_scores: imputed,
                impact_error_pct: percentage_error(pairs[0].0, pairs[0].1),
                exploitability_error_pct: percentage_error(pairs[1].0, pairs[1].1),
                base_error_pct: percentage_error(pairs[2].0, pairs[2].1),
                impact_bias: bias(pairs[0].0, pairs[0].1),
                exploitability_bias: bias(pairs[1].0, pairs[1].1),
                base_bias: bias(pairs[2].0, pairs[2].1),
            });
        }

        let zero = ZeroTrueCounts {
            impact: errors[0].zero_true_excluded,
            exploitability: errors[1].zero_true_excluded,
            base: errors[2].zero_true_excluded,
        };
        outcome.zero_true_excluded.impact += zero.impact;
        outcome.zero_true_excluded.exploitability += zero.exploitability;
        outcome.zero_true_excluded.base += zero.base;
        outcome.rows.push(ErrorBiasRow {
            component: component.clone(),
            n_records: records.len(),
            n_masked,
            n_compared,
            impact_error_pct: errors[0].mean(),
            exploitability_error_pct: errors[1].mean(),
            base_error_pct: errors[2].mean(),
            impact_bias: biases[0].mean(),
            exploitability_bias: biases[1].mean(),
            base_bias: biases[2].mean(),
            zero_true_excluded: zero,
        });
    }
    Ok(outcome)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `component,impact_error_pct,exploitability_error_pct,base_error_pct`;
/// undefined means are left empty.
pub fn write_error_csv<W: Write>(writer: W, rows: &[ErrorBiasRow]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["component", "impact_error_pct", "exploitability_error_pct", "base_error_pct"])?;
    for r in rows {
        w.write_record([
            r.component.clone(),
            cell(r.impact_error_pct),
            cell(r.exploitability_error_pct),
            cell(r.base_error_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `component,impact_bias,exploitability_bias,base_bias`.
pub fn write_bias_csv<W: Write>(writer: W, rows: &[ErrorBiasRow]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["component", "impact_bias", "exploitability_bias", "base_bias"])?;
    for r in rows {
        w.write_record([r.component.clone(), cell(r.impact_bias), cell(r.exploitability_bias), cell(r.base_bias)])?;
    }
    w.flush()?;
    Ok(())
}

/// The whole outcome, including per-CVE detail and exclusion counters.
pub fn write_json<W: Write>(writer: W, outcome: &MaskingOutcome) -> Result<(), EvalError> {
    serde_json::to_writer_pretty(writer, outcome)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvss::parse_vector;
    use crate::imputer::{ImputeError, PerfectOracle, Prediction, PredictionSource};

    fn rec(i: usize, vector: &str) -> CveRecord {
        CveRecord::new(
            CveId::parse(&format!("CVE-2018-{:04}", 1000 + i)).unwrap(),
            "buffer overflow allows remote attackers to execute code",
            parse_vector(vector).unwrap(),
            None,
        )
        .unwrap()
    }

    fn groups() -> Vec<(String, Vec<CveRecord>)> {
        let vectors = [
            "AV:N/AC:L/Au:N/C:P/I:P/A:P",
            "AV:N/AC:M/Au:N/C:N/I:P/A:N",
            "AV:L/AC:L/Au:N/C:C/I:C/A:C",
            "AV:N/AC:L/Au:S/C:P/I:N/A:N",
        ];
        vec![
            ("carts".into(), (0..10).map(|i| rec(i, vectors[i % 4])).collect()),
            ("orders".into(), (10..15).map(|i| rec(i, vectors[i % 4])).collect()),
            ("lonely".into(), vec![rec(20, vectors[0])]),
        ]
    }

    fn oracle(groups: &[(String, Vec<CveRecord>)]) -> PerfectOracle {
        PerfectOracle::new(groups.iter().flat_map(|(_, rs)| rs.iter().map(|r| (r.cve_id().clone(), *r.vector()))))
    }

    #[test]
    fn masked_counts() {
        assert_eq!(masked_count(100, 0.24), 24);
        assert_eq!(masked_count(10, 0.24), 3);
        assert_eq!(masked_count(5, 0.0), 0);
        assert_eq!(masked_count(2, 1.0), 2);
        assert_eq!(masked_count(2, 0.01), 1);
    }

    #[test]
    fn perfect_oracle_gives_zero_rows() {
        let g = groups();
        let out = masking_experiment(&g, 0.24, 3, &oracle(&g)).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].component, "lonely");
        for row in &out.rows {
            assert!(row.n_compared > 0);
            for v in [row.impact_error_pct, row.exploitability_error_pct, row.base_error_pct] {
                assert_eq!(v, Some(0.0));
            }
            for v in [row.impact_bias, row.exploitability_bias, row.base_bias] {
                assert_eq!(v, Some(0.0));
            }
        }
    }

    #[test]
    fn zero_fraction_compares_nothing() {
        let g = groups();
        let out = masking_experiment(&g, 0.0, 3, &oracle(&g)).unwrap();
        assert!(out.details.is_empty());
        assert!(out.rows.iter().all(|r| r.n_masked == 0 && r.impact_bias.is_none()));
    }

    #[test]
    fn deterministic_per_seed() {
        let g = groups();
        let a = masking_experiment(&g, 0.5, 11, &oracle(&g)).unwrap();
        let b = masking_experiment(&g, 0.5, 11, &oracle(&g)).unwrap();
        assert_eq!(a, b);
    }

    struct AllComplete;

    impl Imputer for AllComplete {
        fn predict(&self, cve_id: &CveId, _: &str) -> Result<Prediction, ImputeError> {
            let v = parse_vector("AV:N/AC:L/Au:N/C:C/I:C/A:C").unwrap();
            Ok(Prediction::from_vector(cve_id.clone(), &v, PredictionSource::Baseline).unwrap())
        }

        fn source(&self) -> PredictionSource {
            PredictionSource::Baseline
        }
    }

    #[test]
    fn overestimating_impacts_gives_negative_bias() {
        let g = vec![(
            "svc".to_string(),
            vec![
                rec(1, "AV:N/AC:L/Au:N/C:P/I:P/A:P"),
                rec(2, "AV:N/AC:L/Au:N/C:P/I:N/A:N"),
                rec(3, "AV:N/AC:L/Au:N/C:N/I:P/A:P"),
            ],
        )];
        let out = masking_experiment(&g, 1.0, 0, &AllComplete).unwrap();
        let row = &out.rows[0];
        assert_eq!(row.n_compared, 3);
        // true impacts PPP, PNN, NPP against a predicted (clamped) 10
        let expected_err = [10.41 * (1.0 - 0.725f64.powi(3)), 10.41 * 0.275, 10.41 * (1.0 - 0.725f64.powi(2))]
            .iter()
            .map(|t: &f64| (10.0 - t) / t * 100.0)
            .sum::<f64>()
            / 3.0;
        assert!((row.impact_error_pct.unwrap() - expected_err).abs() < 1e-3);
        assert!(row.impact_bias.unwrap() < 0.0);
        assert_eq!(row.exploitability_bias, Some(0.0));
    }

    #[test]
    fn zero_true_values_are_counted() {
        let g = vec![("svc".to_string(), vec![rec(1, "AV:N/AC:L/Au:N/C:N/I:N/A:N"), rec(2, "AV:N/AC:L/Au:N/C:P/I:N/A:N")])];
        let out = masking_experiment(&g, 1.0, 0, &AllComplete).unwrap();
        assert_eq!(out.zero_true_excluded.impact, 1);
        assert_eq!(out.zero_true_excluded.base, 1);
        assert_eq!(out.rows[0].zero_true_excluded.exploitability, 0);
    }

    #[test]
    fn rejects_incomplete_inputs_and_bad_fraction() {
        let mut g = groups();
        assert!(matches!(masking_experiment(&g, 1.5, 0, &AllComplete), Err(EvalError::InvalidMaskFraction(_))));
        g[0].1.push(rec(30, "AV:N/AC:L/Au:N/C:P/I:P/A:P").masked());
        assert!(matches!(masking_experiment(&g, 0.5, 0, &AllComplete), Err(EvalError::IncompleteRecord(_))));
    }

    #[test]
    fn csv_layouts() {
        let g = groups();
        let out = masking_experiment(&g, 0.24, 3, &oracle(&g)).unwrap();
        let mut buf = Vec::new();
        write_error_csv(&mut buf, &out.rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "component,impact_error_pct,exploitability_error_pct,base_error_pct\ncarts,0,0,0\norders,0,0,0\n"
        );
        let mut buf = Vec::new();
        write_bias_csv(&mut buf, &out.rows).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("component,impact_bias,exploitability_bias,base_bias\n"));
    }
}

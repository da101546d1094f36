//! CVSS v2 risk assessment for containerized microservices.
//!
//! Scanner findings are matched against a local NVD mirror ([`nvd`]); CVEs
//! whose CVSS v2 metrics are missing get them predicted from their
//! description ([`imputer`]); every CVE is then scored ([`cvss`]) and
//! aggregated per component ([`risk`]). [`evaluation`] measures how far
//! imputed scores drift from hidden ground truth.

pub mod cve;
pub mod cvss;
pub mod evaluation;
pub mod imputer;
pub mod nvd;
pub mod pipeline;
pub mod risk;
pub mod scan;
pub mod taxonomy;
pub mod text;

pub use cve::CveId;
pub use cvss::{Cvss2Vector, Metric, MetricLabel, ScoreTriple};
pub use nvd::{CveRecord, NvdStore};

/// Any error the library can return, grouped by subsystem.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Cvss(#[from] cvss::CvssError),
    #[error(transparent)]
    Store(#[from] nvd::StoreError),
    #[error(transparent)]
    Scan(#[from] scan::ScanError),
    #[error(transparent)]
    Impute(#[from] imputer::ImputeError),
    #[error(transparent)]
    Risk(#[from] risk::RiskError),
    #[error(transparent)]
    Eval(#[from] evaluation::EvalError),
    #[error(transparent)]
    Taxonomy(#[from] taxonomy::TaxonomyError),
}

impl Error {
    /// Process exit status for this error class. 1 and 2 are left to the
    /// command line layer (internal and usage errors).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Cvss(_) => 3,
            Error::Store(_) => 4,
            Error::Scan(_) => 5,
            Error::Impute(_) => 6,
            Error::Risk(_) => 7,
            Error::Eval(_) => 8,
            Error::Taxonomy(_) => 9,
        }
    }
}

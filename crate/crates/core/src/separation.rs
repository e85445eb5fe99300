//! Least primes at which two curves have Frobenius traces of strictly
//! opposite sign.
//!
//! With normalized traces `t`, `t2` and genera `g`, `g2`, the separating
//! character takes the value `psi = t (t - 2g) t2 (t2 + 2g2)`. Inside the
//! Weil box the factors `t - 2g` and `t2 + 2g2` have fixed signs, so
//! `psi > 0` exactly when `t * t2 < 0`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::curve::{CountLimits, CurveError, CurveSpec};
use crate::kernel::fmt_sig;
use crate::primes::primes_up_to;
use crate::symp::psi_closed_form;
use crate::trace_store::{compute_range, StoreError, TraceCache, TraceTable};

pub const SCAN_CSV_HEADER: &str = "labelA,labelB,N,N2,least_prime,log_bound,ratio";

/// First search bound of a staged scan; each stage multiplies it by ten.
const FIRST_STAGE: u64 = 1000;

#[derive(Debug, Error)]
pub enum SeparationError {
    #[error("normalized trace {t} lies outside [-{bound}, {bound}]")]
    WeilViolation { t: f64, bound: f64 },
    #[error("normalized trace {t} is on the boundary of [-{bound}, {bound}]")]
    BoundaryCase { t: f64, bound: f64 },
    #[error("trace table for {label} has no entry for p = {p}")]
    IncompleteTable { label: String, p: u64 },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("malformed corpus: {0}")]
    Corpus(String),
}

fn check_box(t: f64, g: usize, strict: bool) -> Result<(), SeparationError> {
    let bound = 2.0 * g as f64;
    if !t.is_finite() || t.abs() > bound {
        return Err(SeparationError::WeilViolation { t, bound });
    }
    if strict && t.abs() == bound {
        return Err(SeparationError::BoundaryCase { t, bound });
    }
    Ok(())
}

/// `psi` at normalized traces `t`, `t2`.
pub fn psi_value(t: f64, t2: f64, g: usize, g2: usize) -> Result<f64, SeparationError> {
    check_box(t, g, false)?;
    check_box(t2, g2, false)?;
    Ok(psi_closed_form(t, t2, g, g2))
}

/// `(psi > 0, t * t2 < 0)`; on the open Weil box the two always agree.
pub fn sign_criterion_equivalence(t: f64, t2: f64, g: usize, g2: usize) -> Result<(bool, bool), SeparationError> {
    check_box(t, g, true)?;
    check_box(t2, g2, true)?;
    Ok((psi_closed_form(t, t2, g, g2) > 0.0, t * t2 < 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationRecord {
    pub label_a: String,
    pub label_b: String,
    pub n: u64,
    pub n2: u64,
    pub least_prime: Option<u64>,
    pub search_bound: u64,
    /// `log(2 N N2)^2`.
    pub log_bound: f64,
    pub ratio: Option<f64>,
}

impl SeparationRecord {
    fn new(a: &TraceTable, b: &TraceTable, least_prime: Option<u64>, search_bound: u64) -> Self {
        let log_bound = (2.0 * a.conductor() as f64 * b.conductor() as f64).ln().powi(2);
        Self {
            label_a: a.curve_label().to_string(),
            label_b: b.curve_label().to_string(),
            n: a.conductor(),
            n2: b.conductor(),
            least_prime,
            search_bound,
            log_bound,
            ratio: least_prime.map(|p| p as f64 / log_bound),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.label_a,
            self.label_b,
            self.n,
            self.n2,
            self.least_prime.map(|p| p.to_string()).unwrap_or_default(),
            fmt_sig(self.log_bound),
            self.ratio.map(fmt_sig).unwrap_or_default()
        )
    }
}

/// Smallest `p <= p_max`, good for both curves, with `a_p(A) a_p(A2) < 0`.
pub fn least_separating_prime(a: &TraceTable, b: &TraceTable, p_max: u64) -> Result<SeparationRecord, SeparationError> {
    for p in primes_up_to(p_max) {
        let ea = a.get(p).ok_or_else(|| SeparationError::IncompleteTable {
            label: a.curve_label().to_string(),
            p,
        })?;
        let eb = b.get(p).ok_or_else(|| SeparationError::IncompleteTable {
            label: b.curve_label().to_string(),
            p,
        })?;
        if let (true, true, Some(x), Some(y)) = (ea.good, eb.good, ea.a_p, eb.a_p) {
            if x.signum() * y.signum() < 0 {
                return Ok(SeparationRecord::new(a, b, Some(p), p_max));
            }
        }
    }
    Ok(SeparationRecord::new(a, b, None, p_max))
}

/// Where trace tables come from during a scan.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub p_max: u64,
    pub limits: CountLimits,
    pub cache: Option<TraceCache>,
}

impl ScanConfig {
    pub fn table(&self, curve: &CurveSpec, bound: u64) -> Result<TraceTable, SeparationError> {
        Ok(match &self.cache {
            Some(cache) => cache.load_or_compute(curve, bound, &self.limits)?,
            None => compute_range(curve, bound, &self.limits)?,
        })
    }

    /// Searches with tables of growing length, stopping at the first stage
    /// that finds a separating prime. The answer equals a single search up
    /// to `p_max`, since the least prime does not depend on the bound once
    /// found.
    pub fn separate(&self, a: &CurveSpec, b: &CurveSpec) -> Result<SeparationRecord, SeparationError> {
        let mut bound = FIRST_STAGE.min(self.p_max);
        loop {
            let (ta, tb) = rayon::join(|| self.table(a, bound), || self.table(b, bound));
            let mut record = least_separating_prime(&ta?, &tb?, bound)?;
            if record.least_prime.is_some() || bound >= self.p_max {
                record.search_bound = self.p_max;
                return Ok(record);
            }
            bound = bound.saturating_mul(10).min(self.p_max);
        }
    }
}

/// Outcome of [`separation_scan`]; records keep corpus order.
#[derive(Debug, Default)]
pub struct ScanReport {
    pub records: Vec<SeparationRecord>,
    /// `(label A, label B, reason)` for pairs not scanned.
    pub skipped: Vec<(String, String, String)>,
    pub errors: Vec<(String, String, String)>,
}

impl ScanReport {
    pub fn max_ratio(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.ratio).reduce(f64::max)
    }

    /// True when some scanned pair has no separating prime below the bound.
    pub fn has_unseparated(&self) -> bool {
        self.records.iter().any(|r| r.least_prime.is_none())
    }

    /// Header, one row per record, then a `max_ratio` summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        if !self.records.is_empty() {
            out.push_str(&format!(
                "max_ratio,,,,,,{}\n",
                self.max_ratio().map(fmt_sig).unwrap_or_default()
            ));
        }
        out
    }
}

/// Least separating primes for every pair of a corpus. Pairs with identical
/// labels are skipped; failures are collected and the scan goes on.
pub fn separation_scan(pairs: &[(CurveSpec, CurveSpec)], config: &ScanConfig) -> ScanReport {
    let results: Vec<(usize, Result<SeparationRecord, String>)> = pairs
        .par_iter()
        .enumerate()
        .filter(|(_, (a, b))| a.label() != b.label())
        .map(|(i, (a, b))| (i, config.separate(a, b).map_err(|e| e.to_string())))
        .collect();
    let mut report = ScanReport::default();
    let mut by_index: BTreeMap<usize, Result<SeparationRecord, String>> = results.into_iter().collect();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let pair = (a.label().to_string(), b.label().to_string());
        match by_index.remove(&i) {
            None => report.skipped.push((pair.0, pair.1, "identical labels".into())),
            Some(Ok(r)) => report.records.push(r),
            Some(Err(e)) => report.errors.push((pair.0, pair.1, e)),
        }
    }
    report
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusDoc {
    pairs: Vec<[String; 2]>,
}

/// Reads `{"pairs": [[fileA, fileB], ...]}`; relative paths are resolved
/// against the corpus file's directory.
pub fn load_corpus(path: &std::path::Path) -> Result<Vec<(CurveSpec, CurveSpec)>, SeparationError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SeparationError::Corpus(format!("{}: {e}", path.display())))?;
    let doc: CorpusDoc =
        serde_json::from_str(&text).map_err(|e| SeparationError::Corpus(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    doc.pairs
        .iter()
        .map(|[a, b]| Ok((CurveSpec::from_path(base.join(a))?, CurveSpec::from_path(base.join(b))?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveModel, PrimeTrace};
    use crate::trace_store::{Provenance, TableMeta};

    #[test]
    fn psi_examples() {
        assert_eq!(psi_value(1.0, -1.0, 1, 1).unwrap(), 1.0);
        assert_eq!(psi_value(1.0, 1.0, 1, 1).unwrap(), -3.0);
        assert_eq!(psi_value(0.0, 1.5, 1, 1).unwrap(), 0.0);
        assert!(matches!(psi_value(2.5, 0.0, 1, 1), Err(SeparationError::WeilViolation { .. })));
        assert_eq!(psi_value(2.0, 0.5, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn criterion_boundary() {
        assert_eq!(sign_criterion_equivalence(0.5, -0.2, 1, 2).unwrap(), (true, true));
        assert_eq!(sign_criterion_equivalence(0.0, -0.2, 1, 2).unwrap(), (false, false));
        assert!(matches!(
            sign_criterion_equivalence(2.0, -1.0, 1, 1),
            Err(SeparationError::BoundaryCase { .. })
        ));
        assert!(matches!(
            sign_criterion_equivalence(1.0, -4.0, 1, 2),
            Err(SeparationError::BoundaryCase { .. })
        ));
    }

    fn table(label: &str, rows: &[(u64, Option<i64>)]) -> TraceTable {
        let meta = TableMeta {
            curve_label: label.into(),
            conductor: 1,
            genus: 1,
        };
        let entries = rows
            .iter()
            .map(|&(p, a)| match a {
                Some(a) => PrimeTrace {
                    p,
                    good: true,
                    count: Some((p as i64 + 1 - a) as u64),
                    a_p: Some(a),
                    lpoly: None,
                },
                None => PrimeTrace::bad(p),
            })
            .collect();
        TraceTable::from_entries(meta, entries, Provenance::Imported).unwrap()
    }

    #[test]
    fn least_prime_from_tables() {
        let a = table("A", &[(2, Some(1)), (3, Some(0)), (5, Some(2))]);
        let b = table("B", &[(2, Some(-1)), (3, Some(1)), (5, Some(-2))]);
        assert_eq!(least_separating_prime(&a, &b, 5).unwrap().least_prime, Some(2));
        let c = table("C", &[(2, None), (3, Some(-1)), (5, Some(-2))]);
        // 2 bad, 3 has a zero trace
        assert_eq!(least_separating_prime(&a, &c, 5).unwrap().least_prime, Some(5));
        let r = least_separating_prime(&a, &a, 5).unwrap();
        assert_eq!((r.least_prime, r.ratio), (None, None));
        assert!(matches!(
            least_separating_prime(&a, &a, 7),
            Err(SeparationError::IncompleteTable { p: 7, .. })
        ));
        assert!((r.log_bound - 2f64.ln().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn scan_skips_identical_labels() {
        let e11 = CurveSpec::new("11a1", 1, CurveModel::Weierstrass { a1: 0, a2: -1, a3: 1, a4: -10, a6: -20 }, 11)
            .unwrap();
        let e37 = CurveSpec::new("37a1", 1, CurveModel::Weierstrass { a1: 0, a2: 0, a3: 1, a4: -1, a6: 0 }, 37)
            .unwrap();
        let config = ScanConfig {
            p_max: 100,
            limits: CountLimits::default(),
            cache: None,
        };
        let report = separation_scan(&[(e11.clone(), e11.clone()), (e11, e37)], &config);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].least_prime, Some(5));
        assert!(separation_scan(&[], &config).to_csv().lines().count() == 1);
    }
}

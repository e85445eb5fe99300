//! Per-curve tables of Frobenius data: computation, CSV persistence, merging
//! and an on-disk cache.
//!
//! CSV schema (UTF-8, `\n` line endings, no floats):
//!
//! ```text
//! p,good,count_fp,a_p,lpoly
//! 2,0,,,
//! 3,1,4,0,
//! 7,1,8,0,1;0;-2;0;49
//! ```
//!
//! `good` is `1` or `0`; `count_fp` and `a_p` are empty when the reduction is
//! singular; `lpoly` is a `;`-separated coefficient list or empty.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{satisfies_weil_bound, CountLimits, CurveError, CurveSpec, PrimeTrace};
use crate::primes::{is_prime, primes_in};

pub const CSV_HEADER: &str = "p,good,count_fp,a_p,lpoly";

/// Width of one cache file in `p`.
pub const BUCKET_WIDTH: u64 = 100_000;

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "FROBSEP_CACHE";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("line {line}: expected header `{expected}`, found `{found}`")]
    Schema {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: {reason}")]
    Validation { line: usize, reason: String },
    #[error("conflicting data at p = {p}: {left} vs {right}")]
    Conflict { p: u64, left: String, right: String },
    #[error("cannot merge tables of different curves: {0}")]
    Mismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Imported,
}

/// Identity of the curve a table belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMeta {
    pub curve_label: String,
    pub conductor: u64,
    pub genus: u8,
}

impl TableMeta {
    pub fn of(curve: &CurveSpec) -> Self {
        Self {
            curve_label: curve.label().to_string(),
            conductor: curve.conductor(),
            genus: curve.genus(),
        }
    }
}

/// Frobenius data of one curve, strictly ascending in `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTable {
    meta: TableMeta,
    entries: Vec<PrimeTrace>,
    pub provenance: Provenance,
}

impl TraceTable {
    pub fn empty(meta: TableMeta, provenance: Provenance) -> Self {
        Self {
            meta,
            entries: Vec::new(),
            provenance,
        }
    }

    /// Builds a table after checking every invariant; `line` numbers in
    /// errors count the CSV header as line 1.
    pub fn from_entries(
        meta: TableMeta,
        entries: Vec<PrimeTrace>,
        provenance: Provenance,
    ) -> Result<Self, StoreError> {
        for (i, e) in entries.iter().enumerate() {
            validate_entry(&meta, e).map_err(|reason| StoreError::Validation { line: i + 2, reason })?;
            if i > 0 && entries[i - 1].p >= e.p {
                return Err(StoreError::Validation {
                    line: i + 2,
                    reason: format!("p = {} is not strictly above the previous prime {}", e.p, entries[i - 1].p),
                });
            }
        }
        Ok(Self {
            meta,
            entries,
            provenance,
        })
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn curve_label(&self) -> &str {
        &self.meta.curve_label
    }

    pub fn conductor(&self) -> u64 {
        self.meta.conductor
    }

    pub fn genus(&self) -> u8 {
        self.meta.genus
    }

    pub fn entries(&self) -> &[PrimeTrace] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: u64) -> Option<&PrimeTrace> {
        self.entries
            .binary_search_by_key(&p, |e| e.p)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn max_prime(&self) -> Option<u64> {
        self.entries.last().map(|e| e.p)
    }

    /// Entries with `p <= p_max`.
    pub fn truncated(&self, p_max: u64) -> Self {
        let end = self.entries.partition_point(|e| e.p <= p_max);
        Self {
            meta: self.meta.clone(),
            entries: self.entries[..end].to_vec(),
            provenance: self.provenance,
        }
    }

    /// Same curve and same entries, ignoring provenance.
    pub fn same_contents(&self, other: &Self) -> bool {
        self.meta == other.meta && self.entries == other.entries
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(16 * (self.entries.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            let opt = |v: Option<String>| v.unwrap_or_default();
            let lpoly = e.lpoly.as_ref().map(|c| {
                c.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(";")
            });
            writeln!(
                out,
                "{},{},{},{},{}",
                e.p,
                u8::from(e.good),
                opt(e.count.map(|c| c.to_string())),
                opt(e.a_p.map(|a| a.to_string())),
                opt(lpoly)
            )
            .expect("writing to a String");
        }
        out
    }
}

fn validate_entry(meta: &TableMeta, e: &PrimeTrace) -> Result<(), String> {
    if !is_prime(e.p) {
        return Err(format!("{} is not prime", e.p));
    }
    if let (Some(count), Some(a)) = (e.count, e.a_p) {
        if (e.p + 1) as i64 - count as i64 != a {
            return Err(format!("a_p = {a} disagrees with p + 1 - count = {}", (e.p + 1) as i64 - count as i64));
        }
    }
    if !e.good {
        return Ok(());
    }
    if meta.conductor.is_multiple_of(e.p) {
        return Err(format!("p = {} divides the conductor but is marked good", e.p));
    }
    let (Some(_), Some(a)) = (e.count, e.a_p) else {
        return Err(format!("good prime {} lacks count_fp or a_p", e.p));
    };
    if !satisfies_weil_bound(a, e.p, meta.genus) {
        return Err(format!(
            "Weil bound violated at p = {}: |a_p| = {} > {}*sqrt(p)",
            e.p,
            a.abs(),
            2 * meta.genus
        ));
    }
    if let Some(lpoly) = &e.lpoly {
        validate_lpoly(lpoly, e.p, a, meta.genus)?;
    }
    Ok(())
}

fn validate_lpoly(lpoly: &[i64], p: u64, a: i64, genus: u8) -> Result<(), String> {
    let g = genus as usize;
    if lpoly.len() != 2 * g + 1 {
        return Err(format!("lpoly has {} coefficients, expected {}", lpoly.len(), 2 * g + 1));
    }
    if lpoly[0] != 1 || lpoly[1] != -a {
        return Err(format!("lpoly {lpoly:?} does not start with [1, -a_p]"));
    }
    for i in 0..=g {
        let scale = (p as i128).pow((g - i) as u32);
        if lpoly[2 * g - i] as i128 != scale * lpoly[i] as i128 {
            return Err(format!("lpoly {lpoly:?} violates the functional equation at index {i}"));
        }
    }
    Ok(())
}

/// Frobenius data for every prime in `(lo, hi]`.
pub fn compute_primes(
    curve: &CurveSpec,
    lo: u64,
    hi: u64,
    limits: &CountLimits,
) -> Result<Vec<PrimeTrace>, CurveError> {
    if hi > limits.fp_ceiling {
        return Err(CurveError::CeilingExceeded {
            p: hi,
            ceiling: limits.fp_ceiling,
        });
    }
    primes_in(lo, hi)
        .into_par_iter()
        .map(|p| trace_at(curve, p, limits))
        .collect()
}

fn trace_at(curve: &CurveSpec, p: u64, limits: &CountLimits) -> Result<PrimeTrace, CurveError> {
    if curve.divides_discriminant(p) {
        return Ok(PrimeTrace::bad(p));
    }
    let mut entry = curve.frobenius_trace(p, limits)?;
    if entry.good && curve.genus() == 2 && p <= limits.fp2_ceiling {
        entry.lpoly = Some(curve.euler_factor(p, limits)?);
    }
    Ok(entry)
}

/// Trace table for every prime `<= p_max`.
pub fn compute_range(curve: &CurveSpec, p_max: u64, limits: &CountLimits) -> Result<TraceTable, CurveError> {
    let entries = compute_primes(curve, 0, p_max, limits)?;
    Ok(TraceTable {
        meta: TableMeta::of(curve),
        entries,
        provenance: Provenance::Computed,
    })
}

pub fn export_csv(table: &TraceTable, path: impl AsRef<Path>) -> Result<(), StoreError> {
    write_atomic(path.as_ref(), table.to_csv_string().as_bytes())
}

pub fn import_csv(path: impl AsRef<Path>, meta: TableMeta) -> Result<TraceTable, StoreError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_csv(&text, meta)
}

pub fn parse_csv(text: &str, meta: TableMeta) -> Result<TraceTable, StoreError> {
    let mut lines = text.split('\n');
    let header = lines.next().unwrap_or_default();
    if header != CSV_HEADER {
        return Err(StoreError::Schema {
            line: 1,
            expected: CSV_HEADER.into(),
            found: header.into(),
        });
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| StoreError::Validation { line: line_no, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", fields.len())));
        }
        let p: u64 = fields[0].parse().map_err(|_| bad(format!("bad prime `{}`", fields[0])))?;
        let good = match fields[1] {
            "1" => true,
            "0" => false,
            other => return Err(bad(format!("good must be 0 or 1, found `{other}`"))),
        };
        let count = optional(fields[2]).map_err(|e| bad(format!("count_fp: {e}")))?;
        let a_p = optional(fields[3]).map_err(|e| bad(format!("a_p: {e}")))?;
        let lpoly = if fields[4].is_empty() {
            None
        } else {
            Some(
                fields[4]
                    .split(';')
                    .map(str::parse)
                    .collect::<Result<Vec<i64>, _>>()
                    .map_err(|e| bad(format!("lpoly: {e}")))?,
            )
        };
        entries.push(PrimeTrace {
            p,
            good,
            count,
            a_p,
            lpoly,
        });
    }
    TraceTable::from_entries(meta, entries, Provenance::Imported)
}

fn optional<T: std::str::FromStr>(field: &str) -> Result<Option<T>, T::Err> {
    if field.is_empty() {
        Ok(None)
    } else {
        field.parse().map(Some)
    }
}

/// Union of two tables of the same curve. Overlapping primes must carry
/// identical data.
pub fn merge(t1: &TraceTable, t2: &TraceTable) -> Result<TraceTable, StoreError> {
    if t1.meta != t2.meta {
        return Err(StoreError::Mismatch(format!("{:?} vs {:?}", t1.meta, t2.meta)));
    }
    let (a, b) = (&t1.entries, &t2.entries);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].p.cmp(&b[j].p) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if a[i] != b[j] {
                    return Err(StoreError::Conflict {
                        p: a[i].p,
                        left: format!("{:?}", a[i]),
                        right: format!("{:?}", b[j]),
                    });
                }
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    let provenance = if t1.provenance == Provenance::Computed && t2.provenance == Provenance::Computed {
        Provenance::Computed
    } else {
        Provenance::Imported
    };
    Ok(TraceTable {
        meta: t1.meta.clone(),
        entries: out,
        provenance,
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers only ever see complete files.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(())
}

/// Directory of cached trace tables: `<root>/<label>/b<k>.csv` holds the
/// primes in `[k * BUCKET_WIDTH, (k + 1) * BUCKET_WIDTH)`.
#[derive(Clone, Debug)]
pub struct TraceCache {
    root: PathBuf,
}

impl TraceCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// The explicit directory if given, else `$FROBSEP_CACHE`.
    pub fn resolve(flag: Option<PathBuf>) -> Option<Self> {
        flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .map(Self::new)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn bucket_path(&self, label: &str, bucket: u64) -> PathBuf {
        let safe: String = label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
            .collect();
        self.root.join(safe).join(format!("b{bucket}.csv"))
    }

    /// Loads the cached buckets covering `p <= p_max`, computing and storing
    /// whatever is missing.
    pub fn load_or_compute(
        &self,
        curve: &CurveSpec,
        p_max: u64,
        limits: &CountLimits,
    ) -> Result<TraceTable, StoreError> {
        let meta = TableMeta::of(curve);
        let mut table = TraceTable::empty(meta.clone(), Provenance::Computed);
        if p_max < 2 {
            return Ok(table);
        }
        if p_max > limits.fp_ceiling {
            return Err(CurveError::CeilingExceeded {
                p: p_max,
                ceiling: limits.fp_ceiling,
            }
            .into());
        }
        for bucket in 0..=p_max / BUCKET_WIDTH {
            let start = bucket * BUCKET_WIDTH;
            let end = (start + BUCKET_WIDTH - 1).min(p_max);
            let path = self.bucket_path(&meta.curve_label, bucket);
            let mut part = if path.exists() {
                import_csv(&path, meta.clone())?
            } else {
                TraceTable::empty(meta.clone(), Provenance::Computed)
            };
            let covered = part.max_prime().unwrap_or(start.saturating_sub(1));
            if covered < end {
                let fresh = compute_primes(curve, covered, end, limits)?;
                if !fresh.is_empty() {
                    let fresh = TraceTable::from_entries(meta.clone(), fresh, Provenance::Computed)?;
                    part = merge(&part, &fresh)?;
                    export_csv(&part, &path)?;
                }
            }
            table = merge(&table, &part.truncated(p_max))?;
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveModel;

    fn x3_plus_x() -> CurveSpec {
        CurveSpec::new("x3+x", 1, CurveModel::Weierstrass { a1: 0, a2: 0, a3: 0, a4: 1, a6: 0 }, 64).unwrap()
    }

    #[test]
    fn small_range() {
        let t = compute_range(&x3_plus_x(), 10, &CountLimits::default()).unwrap();
        let ps: Vec<u64> = t.entries().iter().map(|e| e.p).collect();
        assert_eq!(ps, vec![2, 3, 5, 7]);
        assert!(!t.get(2).unwrap().good);
        assert_eq!(t.get(3).unwrap().a_p, Some(0));
        assert!(compute_range(&x3_plus_x(), 1, &CountLimits::default()).unwrap().is_empty());
    }

    #[test]
    fn header_mismatch_is_a_schema_error() {
        let meta = TableMeta::of(&x3_plus_x());
        let err = parse_csv("p,good,count,a_p,lpoly\n3,1,4,0,\n", meta).unwrap_err();
        assert!(matches!(err, StoreError::Schema { line: 1, .. }));
    }

    #[test]
    fn weil_violation_names_the_row() {
        let meta = TableMeta::of(&x3_plus_x());
        // a_5 = -4 needs 10 points; |a_5| = 4 < 2 sqrt 5 holds, a_5 = -5 does not
        let ok = parse_csv("p,good,count_fp,a_p,lpoly\n3,1,4,0,\n5,1,10,-4,\n", meta.clone());
        assert!(ok.is_ok());
        let err = parse_csv("p,good,count_fp,a_p,lpoly\n3,1,4,0,\n5,1,11,-5,\n", meta).unwrap_err();
        match err {
            StoreError::Validation { line, reason } => {
                assert_eq!(line, 3);
                assert!(reason.contains("Weil"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ordering_and_consistency_violations() {
        let meta = TableMeta::of(&x3_plus_x());
        let unordered = parse_csv("p,good,count_fp,a_p,lpoly\n5,1,8,-2,\n3,1,4,0,\n", meta.clone());
        assert!(matches!(unordered, Err(StoreError::Validation { line: 3, .. })));
        let dup = parse_csv("p,good,count_fp,a_p,lpoly\n3,1,4,0,\n3,1,4,0,\n", meta.clone());
        assert!(matches!(dup, Err(StoreError::Validation { line: 3, .. })));
        let mismatch = parse_csv("p,good,count_fp,a_p,lpoly\n3,1,5,0,\n", meta.clone());
        assert!(matches!(mismatch, Err(StoreError::Validation { line: 2, .. })));
        let bad_marked_good = parse_csv("p,good,count_fp,a_p,lpoly\n2,1,3,0,\n", meta);
        assert!(matches!(bad_marked_good, Err(StoreError::Validation { line: 2, .. })));
    }

    #[test]
    fn merge_rules() {
        let c = x3_plus_x();
        let limits = CountLimits::default();
        let whole = compute_range(&c, 100, &limits).unwrap();
        let low = compute_range(&c, 50, &limits).unwrap();
        let high = TraceTable::from_entries(
            TableMeta::of(&c),
            compute_primes(&c, 50, 100, &limits).unwrap(),
            Provenance::Computed,
        )
        .unwrap();
        assert!(merge(&low, &high).unwrap().same_contents(&whole));
        assert!(merge(&high, &low).unwrap().same_contents(&whole));
        assert!(merge(&whole, &whole).unwrap().same_contents(&whole));

        let mut tampered = whole.clone();
        let e = tampered.entries.iter_mut().find(|e| e.p == 13).unwrap();
        e.a_p = e.a_p.map(|a| -a);
        e.count = Some((14 - e.a_p.unwrap()) as u64);
        assert!(matches!(merge(&whole, &tampered), Err(StoreError::Conflict { p: 13, .. })));

        let other = CurveSpec::new("other", 1, CurveModel::Weierstrass { a1: 0, a2: 0, a3: 1, a4: -1, a6: 0 }, 37).unwrap();
        let t_other = compute_range(&other, 10, &limits).unwrap();
        assert!(matches!(merge(&whole, &t_other), Err(StoreError::Mismatch(_))));
    }

    #[test]
    fn cache_extends_incrementally() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TraceCache::new(dir.path());
        let c = x3_plus_x();
        let limits = CountLimits::default();
        let first = cache.load_or_compute(&c, 500, &limits).unwrap();
        let path = cache.bucket_path("x3+x", 0);
        assert!(path.exists());
        let second = cache.load_or_compute(&c, 1000, &limits).unwrap();
        assert!(second.truncated(500).same_contents(&first));
        assert!(second.same_contents(&compute_range(&c, 1000, &limits).unwrap()));
        let bytes = std::fs::read_to_string(&path).unwrap();
        assert_eq!(bytes, compute_range(&c, 1000, &limits).unwrap().to_csv_string());
        // smaller request served from the cache without touching the file
        let third = cache.load_or_compute(&c, 300, &limits).unwrap();
        assert!(third.same_contents(&first.truncated(300)));
        assert_eq!(std::fs::read_to_string(&path).unwrap(), bytes);
    }
}

//! The Bach kernel and kernel-weighted sums over Frobenius classes.
//!
//! For a character `chi` of the Sato–Tate group the summand at a prime power
//! `p^r <= x` is `chi(y_p^r) log(p) (p^r / x)^a log(x / p^r)`. The sum over
//! primes (`r = 1`) has main term `delta(chi) x / (1 + a)^2`; prime powers
//! are reported separately by [`prime_power_tail`].

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{CurveError, PrimeTrace};
use crate::numeric::{adaptive_gauss, CompensatedSum, GaussLegendre, QuadratureError};
use crate::primes::primes_up_to;
use crate::symp::{delta_psi_exact, psi_closed_form, Group, SympError, VirtualCharacter};
use crate::trace_store::TraceTable;
use crate::Scalar;

/// Number of consecutive primes summed sequentially before blocks are
/// combined in ascending order.
pub const PRIME_BLOCK: usize = 2048;

pub const REPORT_CSV_HEADER: &str = "x,sum,main,residual,res_sqrtx,res_sqrtx_log3,primes,skipped";

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("trace table for {label} has no entry for p = {p}")]
    IncompleteTable { label: String, p: u64 },
    #[error("{label}: eigenangles at p = {p} need a stored Euler factor")]
    MissingEigendata { label: String, p: u64 },
    #[error("character does not match the tables: {0}")]
    Shape(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Symp(#[from] SympError),
}

/// Kernel exponent `a` in `(0, 1/4]` and cutoff `x >= 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams<T> {
    a: T,
    x: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn new(a: T, x: T) -> Result<Self, KernelError> {
        if !(a > T::zero() && a <= T::lit(0.25)) {
            return Err(KernelError::Domain(format!("kernel exponent a = {a} is outside (0, 1/4]")));
        }
        if !(x >= T::lit(2.0)) || !x.is_finite() {
            return Err(KernelError::Domain(format!("x = {x} must be at least 2")));
        }
        Ok(Self { a, x })
    }

    /// `a = 1/4`.
    pub fn standard(x: T) -> Result<Self, KernelError> {
        Self::new(T::lit(0.25), x)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn with_x(&self, x: T) -> Result<Self, KernelError> {
        Self::new(self.a, x)
    }
}

/// `y^(-a) log y` for `y >= 1`, zero on `(0, 1)`.
pub fn bach_kernel<T: Scalar>(y: T, a: T) -> Result<T, KernelError> {
    if !(y > T::zero()) {
        return Err(KernelError::Domain(format!("kernel argument y = {y} must be positive")));
    }
    if y < T::one() {
        return Ok(T::zero());
    }
    Ok(y.powf(-a) * y.ln())
}

/// `1 / (1 + a)^2`; exactly `16/25` at `a = 1/4`.
pub fn main_term_coefficient<T: Scalar>(a: T) -> T {
    let s = T::one() + a;
    T::one() / (s * s)
}

/// Truncated inverse Mellin integral
/// `(1 / 2 pi i) int_{2 - iT}^{2 + iT} y^s / (s + a)^2 ds`.
///
/// The integrand is split into panels no wider than half an oscillation of
/// `y^(it)`, each integrated adaptively; panel sums are combined in a fixed
/// order.
pub fn bach_kernel_contour(y: f64, a: f64, t_max: f64) -> Result<f64, KernelError> {
    if !(y > 0.0) {
        return Err(KernelError::Domain(format!("kernel argument y = {y} must be positive")));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(KernelError::Domain(format!("truncation T = {t_max} must be positive")));
    }
    let l = y.ln();
    let c = 2.0 + a;
    let y2 = y * y;
    // Re[y^(2+it) / (c+it)^2] = y^2 (cos(tL)(c^2 - t^2) + 2ct sin(tL)) / (c^2 + t^2)^2
    let f = |t: f64| {
        let (s, co) = (t * l).sin_cos();
        let d = c * c + t * t;
        y2 * (co * (c * c - t * t) + 2.0 * c * t * s) / (d * d)
    };
    let width = if l == 0.0 { 2.0 } else { (std::f64::consts::PI / l.abs()).min(2.0) };
    let panels = (t_max / width).ceil() as usize;
    let rule = GaussLegendre::<f64>::new(16);
    let chunks: Vec<Result<CompensatedSum<f64>, QuadratureError>> = (0..panels)
        .collect::<Vec<_>>()
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = CompensatedSum::new();
            for &i in chunk {
                let lo = i as f64 * width;
                let hi = ((i + 1) as f64 * width).min(t_max);
                let scale = y2 * (hi - lo) / (c * c + lo * lo);
                acc.add(adaptive_gauss(&rule, &f, lo, hi, 1e-10 * scale, 12)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = CompensatedSum::new();
    for chunk in chunks {
        total.merge(&chunk?);
    }
    Ok(total.value() / std::f64::consts::PI)
}

/// The character whose values weight the prime sums.
#[derive(Clone, Debug, PartialEq)]
pub enum FrobeniusCharacter {
    /// Constant 1; needs at least one table.
    Trivial,
    /// Standard representation of the first table's curve.
    Standard,
    /// The separating character of a pair of curves.
    Psi,
    /// Any virtual character; single-factor groups read the first table,
    /// product groups the first two.
    Virtual(VirtualCharacter),
}

impl FrobeniusCharacter {
    fn tables_needed(&self) -> usize {
        match self {
            Self::Trivial | Self::Standard => 1,
            Self::Psi => 2,
            Self::Virtual(v) => v.group().ranks().len(),
        }
    }

    fn check_shape(&self, tables: &[&TraceTable]) -> Result<(), KernelError> {
        if tables.len() < self.tables_needed() {
            return Err(KernelError::Shape(format!(
                "{} table(s) given, {} needed",
                tables.len(),
                self.tables_needed()
            )));
        }
        if let Self::Virtual(v) = self {
            let ranks = v.group().ranks();
            let genera: Vec<usize> = tables.iter().take(ranks.len()).map(|t| t.genus() as usize).collect();
            if genera != ranks {
                return Err(KernelError::Shape(format!(
                    "character on {} but curves have genera {genera:?}",
                    v.group()
                )));
            }
        }
        Ok(())
    }

    /// `delta(chi)`, the trivial multiplicity entering the main term.
    pub fn delta(&self, tables: &[&TraceTable]) -> Result<i64, KernelError> {
        self.check_shape(tables)?;
        Ok(match self {
            Self::Trivial => 1,
            Self::Standard => 0,
            Self::Psi => delta_psi_exact(tables[0].genus() as usize, tables[1].genus() as usize)?,
            Self::Virtual(v) => v.delta(),
        })
    }

    /// `chi(y_p^r)`.
    pub fn value(&self, class: &FrobeniusClass<'_>, r: u32) -> Result<f64, KernelError> {
        let power_trace = |k: usize| -> Result<f64, KernelError> {
            if r == 1 {
                Ok(class.normalized_trace(k))
            } else {
                Ok(class.angles(k)?.iter().map(|t| 2.0 * (r as f64 * t).cos()).sum())
            }
        };
        match self {
            Self::Trivial => Ok(1.0),
            Self::Standard => power_trace(0),
            Self::Psi => {
                let (g, g2) = (class.genus(0), class.genus(1));
                Ok(psi_closed_form(power_trace(0)?, power_trace(1)?, g, g2))
            }
            Self::Virtual(v) => {
                let scaled = |k: usize| -> Result<Vec<f64>, KernelError> {
                    Ok(class.angles(k)?.iter().map(|t| r as f64 * t).collect())
                };
                let a = scaled(0)?;
                let b = match v.group() {
                    Group { g2: Some(_), .. } => Some(scaled(1)?),
                    _ => None,
                };
                Ok(v.eval_angles(&a, b.as_deref()))
            }
        }
    }
}

/// Frobenius data of every curve of a family at one prime good for all of
/// them.
#[derive(Clone, Debug)]
pub struct FrobeniusClass<'a> {
    p: u64,
    entries: Vec<(&'a PrimeTrace, u8, &'a str)>,
}

impl<'a> FrobeniusClass<'a> {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn genus(&self, k: usize) -> usize {
        self.entries[k].1 as usize
    }

    pub fn normalized_trace(&self, k: usize) -> f64 {
        self.entries[k].0.normalized().expect("good entries carry a_p")
    }

    pub fn angles(&self, k: usize) -> Result<Vec<f64>, KernelError> {
        let (entry, genus, label) = self.entries[k];
        entry.eigenangles(genus)?.ok_or_else(|| KernelError::MissingEigendata {
            label: label.to_string(),
            p: self.p,
        })
    }
}

/// Classes at every prime `<= p_max`, `None` where some curve is bad.
fn classes<'a>(tables: &[&'a TraceTable], p_max: u64) -> Result<Vec<(u64, Option<FrobeniusClass<'a>>)>, KernelError> {
    let primes = primes_up_to(p_max);
    let mut out = Vec::with_capacity(primes.len());
    for (i, &p) in primes.iter().enumerate() {
        let mut entries = Vec::with_capacity(tables.len());
        let mut good = true;
        for t in tables {
            let e = t
                .entries()
                .get(i)
                .filter(|e| e.p == p)
                .or_else(|| t.get(p))
                .ok_or_else(|| KernelError::IncompleteTable {
                    label: t.curve_label().to_string(),
                    p,
                })?;
            good &= e.good;
            entries.push((e, t.genus(), t.curve_label()));
        }
        out.push((p, good.then_some(FrobeniusClass { p, entries })));
    }
    Ok(out)
}

/// `chi(y_p^r) log(p) (p^r / x)^a log(x / p^r)` given `chi(y_p^r)`.
pub fn lambda_weight(value: f64, p: u64, r: u32, params: &KernelParams<f64>) -> Result<f64, KernelError> {
    let q = (p as f64).powi(r as i32);
    if q > params.x() {
        return Err(KernelError::Domain(format!("p^r = {p}^{r} exceeds x = {}", params.x())));
    }
    let ratio = q / params.x();
    Ok(value * (p as f64).ln() * ratio.powf(params.a()) * (-ratio.ln()))
}

/// One summand `Lambda_chi(p^r, x)`.
pub fn lambda_term(
    chi: &FrobeniusCharacter,
    class: &FrobeniusClass<'_>,
    r: u32,
    params: &KernelParams<f64>,
) -> Result<f64, KernelError> {
    if r == 0 {
        return Err(KernelError::Domain("prime power exponent must be positive".into()));
    }
    let q = (class.p() as f64).powi(r as i32);
    if q > params.x() {
        return Err(KernelError::Domain(format!("p^r = {q} exceeds x = {}", params.x())));
    }
    lambda_weight(chi.value(class, r)?, class.p(), r, params)
}

/// Output of [`weighted_sum`]; `residual = sum_value - main_term`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSumReport {
    pub x: f64,
    pub sum_value: f64,
    pub main_term: f64,
    pub residual: f64,
    pub residual_over_sqrtx: f64,
    pub residual_over_sqrtx_log3: f64,
    pub primes_used: usize,
    pub bad_primes_skipped: usize,
}

impl KernelSumReport {
    /// Row matching [`REPORT_CSV_HEADER`], numbers to 12 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            fmt_sig(self.x),
            fmt_sig(self.sum_value),
            fmt_sig(self.main_term),
            fmt_sig(self.residual),
            fmt_sig(self.residual_over_sqrtx),
            fmt_sig(self.residual_over_sqrtx_log3),
            self.primes_used,
            self.bad_primes_skipped
        )
    }
}

/// Sums `f` over good classes in fixed blocks of primes; the result does
/// not depend on the number of worker threads.
fn block_sum<F>(classes: &[(u64, Option<FrobeniusClass<'_>>)], f: F) -> Result<(f64, usize, usize), KernelError>
where
    F: Fn(&FrobeniusClass<'_>) -> Result<f64, KernelError> + Sync,
{
    type Block = (CompensatedSum<f64>, usize, usize);
    let blocks: Vec<Result<Block, KernelError>> = classes
        .par_chunks(PRIME_BLOCK)
        .map(|block| {
            let mut acc = CompensatedSum::new();
            let (mut used, mut skipped) = (0, 0);
            for (_, class) in block {
                match class {
                    Some(c) => {
                        acc.add(f(c)?);
                        used += 1;
                    }
                    None => skipped += 1,
                }
            }
            Ok((acc, used, skipped))
        })
        .collect();
    let mut total = CompensatedSum::new();
    let (mut used, mut skipped) = (0, 0);
    for b in blocks {
        let (acc, u, s) = b?;
        total.merge(&acc);
        used += u;
        skipped += s;
    }
    Ok((total.value(), used, skipped))
}

/// `sum_{p <= x good} Lambda_chi(p, x)` with its main term.
pub fn weighted_sum(
    tables: &[&TraceTable],
    chi: &FrobeniusCharacter,
    params: &KernelParams<f64>,
) -> Result<KernelSumReport, KernelError> {
    let delta = chi.delta(tables)?;
    let x = params.x();
    let cls = classes(tables, x.floor() as u64)?;
    let (sum_value, primes_used, bad_primes_skipped) = block_sum(&cls, |c| lambda_term(chi, c, 1, params))?;
    let main_term = delta as f64 * x * main_term_coefficient(params.a());
    let residual = sum_value - main_term;
    Ok(KernelSumReport {
        x,
        sum_value,
        main_term,
        residual,
        residual_over_sqrtx: residual / x.sqrt(),
        residual_over_sqrtx_log3: residual / (x.sqrt() * x.ln().powi(3)),
        primes_used,
        bad_primes_skipped,
    })
}

/// The prime-power part `sum_{r >= 2} sum_{p^r <= x} Lambda_chi(p^r, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub x: f64,
    /// Terms with `r = 2`.
    pub squares: f64,
    /// Terms with `r >= 3`.
    pub higher: f64,
    pub total: f64,
    /// `total / (sqrt(x) log(x)^3)`.
    pub normalized: f64,
}

pub fn prime_power_tail(
    tables: &[&TraceTable],
    chi: &FrobeniusCharacter,
    params: &KernelParams<f64>,
) -> Result<TailReport, KernelError> {
    chi.check_shape(tables)?;
    let x = params.x();
    let cls = classes(tables, x.sqrt().floor() as u64)?;
    let (squares, _, _) = block_sum(&cls, |c| lambda_term(chi, c, 2, params))?;
    let (higher, _, _) = block_sum(&cls, |c| {
        let mut acc = CompensatedSum::new();
        let mut r = 3;
        while (c.p() as f64).powi(r as i32) <= x {
            acc.add(lambda_term(chi, c, r, params)?);
            r += 1;
        }
        Ok(acc.value())
    })?;
    let total = squares + higher;
    Ok(TailReport {
        x,
        squares,
        higher,
        total,
        normalized: total / (x.sqrt() * x.ln().powi(3)),
    })
}

/// Unweighted `sum_{p <= x good} chi(y_p)` against `delta(chi) Li(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevReport {
    pub x: f64,
    pub sum_value: f64,
    pub main_term: f64,
    pub primes_used: usize,
    pub bad_primes_skipped: usize,
}

pub fn chebyshev_sum(tables: &[&TraceTable], chi: &FrobeniusCharacter, x: f64) -> Result<ChebyshevReport, KernelError> {
    let delta = chi.delta(tables)?;
    let cls = classes(tables, x.max(0.0).floor() as u64)?;
    let (sum_value, primes_used, bad_primes_skipped) = block_sum(&cls, |c| chi.value(c, 1))?;
    Ok(ChebyshevReport {
        x,
        sum_value,
        main_term: delta as f64 * log_integral(x)?,
        primes_used,
        bad_primes_skipped,
    })
}

/// `Li(x) = int_2^x dt / log t`.
pub fn log_integral(x: f64) -> Result<f64, KernelError> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(KernelError::Domain(format!("Li(x) needs x >= 2, got {x}")));
    }
    let rule = GaussLegendre::<f64>::new(16);
    let f = |t: f64| 1.0 / t.ln();
    // geometric panels keep the relative accuracy uniform in x
    let mut acc = CompensatedSum::new();
    let mut lo = 2.0;
    while lo < x {
        let hi = (lo * 2.0).min(x);
        acc.add(adaptive_gauss(&rule, &f, lo, hi, 1e-13 * (hi - lo), 30)?);
        lo = hi;
    }
    Ok(acc.value())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-5, 1e12)`.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, e) = sci.split_once('e').expect("exponent present");
    let e: i32 = e.parse().expect("integer exponent");
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if e < 0 { "-" } else { "+" }, e.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

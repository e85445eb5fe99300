use std::path::Path;

use anyhow::{anyhow, Context};
use frobsep::curve::{CountLimits, CurveSpec};
use frobsep::kernel::{
    bach_kernel, bach_kernel_contour, fmt_sig, weighted_sum, FrobeniusCharacter, KernelParams, REPORT_CSV_HEADER,
};
use frobsep::separation::{least_separating_prime, load_corpus, separation_scan, ScanConfig};
use frobsep::symp::{delta_psi_exact, delta_psi_quadrature, trivial_multiplicity, VirtualCharacter, MIN_ORDER};
use frobsep::trace_store::{compute_range, export_csv, TraceCache, TraceTable};

use crate::{Command, RunConfig};

pub const NO_SEPARATING_PRIME: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Invalid(e) => format!("{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn invalid<E: std::error::Error + Send + Sync + 'static>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

fn check_config(config: &RunConfig) -> Result<(), Failure> {
    if !(config.kernel_a > 0.0 && config.kernel_a <= 0.25) {
        return Err(usage(format!("--kernel-a {} is outside (0, 1/4]", config.kernel_a)));
    }
    if config.quadrature_order < MIN_ORDER {
        return Err(usage(format!(
            "--quadrature-order {} is below the minimum {MIN_ORDER}",
            config.quadrature_order
        )));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build_global()
        .map_err(|e| Failure::Invalid(anyhow!("cannot start worker pool: {e}")))
}

fn limits(config: &RunConfig) -> CountLimits {
    CountLimits {
        fp_ceiling: config.count_ceiling,
        ..CountLimits::default()
    }
}

fn read_curve(path: &Path) -> Result<CurveSpec, Failure> {
    CurveSpec::from_path(path).map_err(invalid)
}

fn table(config: &RunConfig, curve: &CurveSpec, p_max: u64) -> Result<TraceTable, Failure> {
    let limits = limits(config);
    match &config.cache_dir {
        Some(dir) => TraceCache::new(dir)
            .load_or_compute(curve, p_max, &limits)
            .map_err(invalid),
        None => compute_range(curve, p_max, &limits).map_err(invalid),
    }
}

pub fn run(config: &RunConfig, command: Command) -> Result<u8, Failure> {
    check_config(config)?;
    match command {
        Command::Count { curve, pmax, output } => count(config, &curve, pmax, output.as_deref()),
        Command::Delta { g, g2, character } => delta(config, g, g2, character.as_deref()),
        Command::Sum {
            curve_a,
            curve_b,
            x,
            chi,
            steps,
            factor,
        } => sum(config, &curve_a, &curve_b, x, &chi, steps, factor),
        Command::Separate { curve_a, curve_b, pmax } => separate(config, &curve_a, &curve_b, pmax),
        Command::Scan { corpus, pmax } => scan(config, &corpus, pmax),
        Command::KernelCheck { y, t } => kernel_check(config, &y, t),
    }
}

fn count(config: &RunConfig, path: &Path, p_max: u64, output: Option<&Path>) -> Result<u8, Failure> {
    let curve = read_curve(path)?;
    let t = table(config, &curve, p_max)?;
    if let Some(out) = output {
        export_csv(&t, out).map_err(invalid)?;
    }
    let good = t.entries().iter().filter(|e| e.good).count();
    let report = curve.bad_prime_report(p_max);
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
    println!("label,{}", curve.label());
    println!("genus,{}", curve.genus());
    println!("conductor,{}", curve.conductor());
    println!("pmax,{p_max}");
    println!("primes,{}", t.len());
    println!("good,{good}");
    println!("bad,{}", t.len() - good);
    println!("bad_conductor_only,{}", join(&report.conductor_only));
    println!("bad_discriminant_only,{}", join(&report.discriminant_only));
    Ok(0)
}

fn delta(config: &RunConfig, g: usize, g2: usize, character: Option<&Path>) -> Result<u8, Failure> {
    let order = config.quadrature_order;
    let (quadrature, exact) = match character {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let chi = VirtualCharacter::from_json(&text).map_err(invalid)?;
            (trivial_multiplicity(&chi, order).map_err(invalid)?, chi.delta())
        }
        None => {
            if g == 0 || g2 == 0 {
                return Err(usage("--g and --g2 must be positive"));
            }
            (
                delta_psi_quadrature(g, g2, order).map_err(invalid)?,
                delta_psi_exact(g, g2).map_err(invalid)?,
            )
        }
    };
    println!("method,delta");
    println!("quadrature,{quadrature}");
    println!("exact,{exact}");
    if quadrature != exact {
        return Err(Failure::Invalid(anyhow!(
            "quadrature ({quadrature}) and exact ({exact}) multiplicities disagree"
        )));
    }
    Ok(0)
}

fn parse_chi(spec: &str) -> Result<FrobeniusCharacter, Failure> {
    match spec {
        "psi" => Ok(FrobeniusCharacter::Psi),
        "trivial" => Ok(FrobeniusCharacter::Trivial),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            Ok(FrobeniusCharacter::Virtual(
                VirtualCharacter::from_json(&text).map_err(invalid)?,
            ))
        }
    }
}

fn sum(config: &RunConfig, a: &Path, b: &Path, x: f64, chi: &str, steps: u32, factor: f64) -> Result<u8, Failure> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(usage(format!("--x {x} must be at least 2")));
    }
    if steps == 0 || !(factor > 1.0) {
        return Err(usage("--steps must be positive and --factor above 1"));
    }
    let chi = parse_chi(chi)?;
    let (ca, cb) = (read_curve(a)?, read_curve(b)?);
    let p_max = x.floor() as u64;
    let (ta, tb) = (table(config, &ca, p_max)?, table(config, &cb, p_max)?);
    println!("{REPORT_CSV_HEADER}");
    for k in (0..steps).rev() {
        let xk = x / factor.powi(k as i32);
        if xk < 2.0 {
            continue;
        }
        let params = KernelParams::new(config.kernel_a, xk).map_err(invalid)?;
        let report = weighted_sum(&[&ta, &tb], &chi, &params).map_err(invalid)?;
        println!("{}", report.csv_row());
    }
    Ok(0)
}

fn separate(config: &RunConfig, a: &Path, b: &Path, p_max: u64) -> Result<u8, Failure> {
    let (ca, cb) = (read_curve(a)?, read_curve(b)?);
    let (ta, tb) = (table(config, &ca, p_max)?, table(config, &cb, p_max)?);
    let record = least_separating_prime(&ta, &tb, p_max).map_err(invalid)?;
    match record.least_prime {
        Some(p) => {
            println!("{p}");
            Ok(0)
        }
        None => {
            println!("none");
            eprintln!("no separating prime up to {p_max}");
            Ok(NO_SEPARATING_PRIME)
        }
    }
}

fn scan(config: &RunConfig, corpus: &Path, p_max: u64) -> Result<u8, Failure> {
    let pairs = load_corpus(corpus).map_err(invalid)?;
    let scan_config = ScanConfig {
        p_max,
        limits: limits(config),
        cache: config.cache_dir.as_ref().map(TraceCache::new),
    };
    let report = separation_scan(&pairs, &scan_config);
    print!("{}", report.to_csv());
    for (a, b, why) in &report.skipped {
        eprintln!("skipped {a},{b}: {why}");
    }
    for (a, b, e) in &report.errors {
        eprintln!("error {a},{b}: {e}");
    }
    if !report.errors.is_empty() {
        return Err(Failure::Invalid(anyhow!("{} pair(s) failed", report.errors.len())));
    }
    Ok(if report.has_unseparated() { NO_SEPARATING_PRIME } else { 0 })
}

fn kernel_check(config: &RunConfig, ys: &[String], t: f64) -> Result<u8, Failure> {
    if !(t >= 1e3) || !t.is_finite() {
        return Err(usage(format!("--T {t} must be at least 1000")));
    }
    let a = config.kernel_a;
    println!("y,closed_form,contour,abs_error");
    for raw in ys {
        let y = match raw.trim() {
            "e" => std::f64::consts::E,
            s => s.parse::<f64>().map_err(|_| usage(format!("cannot parse --y value {s:?}")))?,
        };
        let closed = bach_kernel(y, a).map_err(invalid)?;
        let contour = bach_kernel_contour(y, a, t).map_err(invalid)?;
        println!(
            "{},{},{},{}",
            fmt_sig(y),
            fmt_sig(closed),
            fmt_sig(contour),
            fmt_sig((contour - closed).abs())
        );
    }
    Ok(0)
}

//! Point counting and Euler factors for genus-1 and genus-2 curves over `Q`.
//!
//! Counting is naive but linear in `p`: the curve is brought to the form
//! `Y^2 = F(x)` by completing the square and the affine points are summed
//! through a table of the quadratic character. Characteristic 2 (and 3 for
//! long Weierstrass models) is handled by direct enumeration, which is cheap
//! at those sizes.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{eval_mod, mul_mod, poly_values_mod, reduce, QuadraticCharacter, QuadraticExtension};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("curve {label}: {reason}")]
    InvalidModel { label: String, reason: String },
    #[error("curve {label} has bad reduction at p = {p} (p divides the discriminant)")]
    BadReduction { label: String, p: u64 },
    #[error("p = {p} exceeds the point-counting ceiling {ceiling}")]
    CeilingExceeded { p: u64, ceiling: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("curve {label}: Weil bound violated at p = {p} (a_p = {a_p})")]
    WeilViolation { label: String, p: u64, a_p: i64 },
    #[error("unitarized Frobenius roots leave the unit circle (deviation {deviation:.3e})")]
    NonUnitaryRoots { deviation: f64 },
    #[error("malformed Euler factor: {0}")]
    InvalidLPoly(String),
    #[error("cannot read curve file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed curve JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Limits for the naive counting routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountLimits {
    /// Largest `p` for counts over `F_p`.
    pub fp_ceiling: u64,
    /// Largest `p` for genus-2 counts over `F_{p^2}` (cost is `O(p^2)`).
    pub fp2_ceiling: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        Self {
            fp_ceiling: 2_000_000,
            fp2_ceiling: 10_000,
        }
    }
}

/// Integer model of the curve as it appears in the JSON input.
///
/// Coefficient lists are in ascending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveModel {
    /// `y^2 + h(x) y = f(x)`.
    Hyperelliptic {
        f: Vec<i64>,
        #[serde(default)]
        h: Vec<i64>,
    },
    /// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
    Weierstrass {
        #[serde(default)]
        a1: i64,
        #[serde(default)]
        a2: i64,
        #[serde(default)]
        a3: i64,
        #[serde(default)]
        a4: i64,
        #[serde(default)]
        a6: i64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CurveDocument {
    label: String,
    genus: u8,
    model: CurveModel,
    conductor: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Normalized {
    Weierstrass([i64; 5]),
    Genus2 { f: Vec<i64>, h: Vec<i64> },
}

/// A genus-1 or genus-2 curve over `Q` with a declared conductor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CurveDocument", into = "CurveDocument")]
pub struct CurveSpec {
    label: String,
    genus: u8,
    model: CurveModel,
    conductor: u64,
    normalized: Normalized,
    discriminant: BigInt,
}

impl From<CurveSpec> for CurveDocument {
    fn from(c: CurveSpec) -> Self {
        CurveDocument {
            label: c.label,
            genus: c.genus,
            model: c.model,
            conductor: c.conductor,
        }
    }
}

impl TryFrom<CurveDocument> for CurveSpec {
    type Error = CurveError;

    fn try_from(doc: CurveDocument) -> Result<Self, CurveError> {
        CurveSpec::new(doc.label, doc.genus, doc.model, doc.conductor)
    }
}

fn degree(coeffs: &[i64]) -> Option<usize> {
    coeffs.iter().rposition(|&c| c != 0)
}

impl CurveSpec {
    pub fn new(
        label: impl Into<String>,
        genus: u8,
        model: CurveModel,
        conductor: u64,
    ) -> Result<Self, CurveError> {
        let label = label.into();
        let invalid = |reason: String| CurveError::InvalidModel {
            label: label.clone(),
            reason,
        };
        if conductor == 0 {
            return Err(invalid("conductor must be positive".into()));
        }
        let normalized = match &model {
            CurveModel::Weierstrass { a1, a2, a3, a4, a6 } => {
                if genus != 1 {
                    return Err(invalid(format!(
                        "Weierstrass model declared with genus {genus}"
                    )));
                }
                Normalized::Weierstrass([*a1, *a2, *a3, *a4, *a6])
            }
            CurveModel::Hyperelliptic { f, h } => {
                if f.len() > 7 || degree(f).is_some_and(|d| d > 6) {
                    return Err(invalid("deg f must be at most 6".into()));
                }
                if degree(h).is_some_and(|d| d > 3) {
                    return Err(invalid("deg h must be at most 3".into()));
                }
                let big_f = completed_square(f, h);
                match (genus, degree(&big_f)) {
                    (2, Some(5 | 6)) => Normalized::Genus2 {
                        f: f.clone(),
                        h: h.clone(),
                    },
                    (1, _) => {
                        // only Weierstrass-shaped models: f monic cubic, deg h <= 1
                        let coeff = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
                        if degree(f) != Some(3) || coeff(f, 3) != 1 || degree(h).is_some_and(|d| d > 1) {
                            return Err(invalid(
                                "genus-1 models must be Weierstrass-shaped (f monic cubic, deg h <= 1)"
                                    .into(),
                            ));
                        }
                        Normalized::Weierstrass([
                            coeff(h, 1),
                            coeff(f, 2),
                            coeff(h, 0),
                            coeff(f, 1),
                            coeff(f, 0),
                        ])
                    }
                    (2, d) => {
                        return Err(invalid(format!(
                            "genus 2 needs deg(4f + h^2) in {{5, 6}}, got {d:?}"
                        )))
                    }
                    (g, _) => return Err(invalid(format!("unsupported genus {g}"))),
                }
            }
        };
        let discriminant = match &normalized {
            Normalized::Weierstrass(a) => weierstrass_discriminant(a),
            Normalized::Genus2 { f, h } => genus2_discriminant(f, h),
        };
        if discriminant.is_zero() {
            return Err(invalid("model is singular (zero discriminant)".into()));
        }
        Ok(Self {
            label,
            genus,
            model,
            conductor,
            normalized,
            discriminant,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, CurveError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, CurveError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CurveError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serializes")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn divides_discriminant(&self, p: u64) -> bool {
        (&self.discriminant % BigInt::from(p)).is_zero()
    }

    /// A prime is good iff it divides neither the declared conductor nor the
    /// model discriminant.
    pub fn is_good(&self, p: u64) -> bool {
        !self.conductor.is_multiple_of(p) && !self.divides_discriminant(p)
    }

    /// Primes up to `p_max` on which the conductor and the discriminant
    /// disagree about bad reduction.
    pub fn bad_prime_report(&self, p_max: u64) -> BadPrimeReport {
        let mut report = BadPrimeReport::default();
        for p in crate::primes::primes_up_to(p_max) {
            match (self.conductor.is_multiple_of(p), self.divides_discriminant(p)) {
                (true, false) => report.conductor_only.push(p),
                (false, true) => report.discriminant_only.push(p),
                _ => {}
            }
        }
        report
    }

    /// Number of projective points of the reduction over `F_p`.
    pub fn count_points(&self, p: u64, limits: &CountLimits) -> Result<u64, CurveError> {
        if p > limits.fp_ceiling {
            return Err(CurveError::CeilingExceeded {
                p,
                ceiling: limits.fp_ceiling,
            });
        }
        self.check_reduction(p)?;
        Ok(match &self.normalized {
            Normalized::Weierstrass(a) if p <= 3 => count_weierstrass_enumerate(a, p),
            Normalized::Weierstrass(a) => count_weierstrass_charsum(a, p),
            Normalized::Genus2 { f, h } if p == 2 => {
                count_char2_hyperelliptic(f, h, &QuadraticExtension::new(2), false)
            }
            Normalized::Genus2 { f, h } => count_genus2_charsum(f, h, p),
        })
    }

    /// Number of points over `F_{p^2}`; genus 2 only.
    pub fn count_points_fp2(&self, p: u64, limits: &CountLimits) -> Result<u64, CurveError> {
        let Normalized::Genus2 { f, h } = &self.normalized else {
            return Err(CurveError::Unsupported(
                "F_{p^2} counts are only needed for genus 2; genus 1 uses a_p alone".into(),
            ));
        };
        if p > limits.fp2_ceiling {
            return Err(CurveError::CeilingExceeded {
                p,
                ceiling: limits.fp2_ceiling,
            });
        }
        self.check_reduction(p)?;
        let field = QuadraticExtension::new(p);
        Ok(if p == 2 {
            count_char2_hyperelliptic(f, h, &field, true)
        } else {
            count_genus2_fp2_charsum(f, h, &field)
        })
    }

    /// Frobenius data at `p`. Requires `p` not to divide the discriminant; a
    /// prime dividing only the conductor yields an entry flagged bad.
    pub fn frobenius_trace(&self, p: u64, limits: &CountLimits) -> Result<PrimeTrace, CurveError> {
        let count = self.count_points(p, limits)?;
        let a_p = (p + 1) as i64 - count as i64;
        let good = self.is_good(p);
        if good && !satisfies_weil_bound(a_p, p, self.genus) {
            return Err(CurveError::WeilViolation {
                label: self.label.clone(),
                p,
                a_p,
            });
        }
        Ok(PrimeTrace {
            p,
            good,
            count: Some(count),
            a_p: Some(a_p),
            lpoly: None,
        })
    }

    /// Unnormalized Euler factor `det(1 - Frob T)` with integer coefficients.
    pub fn euler_factor(&self, p: u64, limits: &CountLimits) -> Result<Vec<i64>, CurveError> {
        let n1 = self.count_points(p, limits)? as i64;
        let p_i = p as i64;
        let a1 = p_i + 1 - n1;
        match self.genus {
            1 => Ok(vec![1, -a1, p_i]),
            _ => {
                let n2 = self.count_points_fp2(p, limits)? as i64;
                let s2 = p_i * p_i + 1 - n2;
                let twice = a1 * a1 - s2;
                if twice % 2 != 0 {
                    return Err(CurveError::InvalidLPoly(format!(
                        "odd second power sum at p = {p}"
                    )));
                }
                Ok(vec![1, -a1, twice / 2, -p_i * a1, p_i * p_i])
            }
        }
    }

    fn check_reduction(&self, p: u64) -> Result<(), CurveError> {
        if self.divides_discriminant(p) {
            return Err(CurveError::BadReduction {
                label: self.label.clone(),
                p,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BadPrimeReport {
    /// Dividing the declared conductor but not the model discriminant.
    pub conductor_only: Vec<u64>,
    /// Dividing the model discriminant but not the declared conductor.
    pub discriminant_only: Vec<u64>,
}

impl BadPrimeReport {
    pub fn is_consistent(&self) -> bool {
        self.conductor_only.is_empty() && self.discriminant_only.is_empty()
    }
}

/// `a_p^2 <= 4 g^2 p`, checked in exact integer arithmetic.
pub fn satisfies_weil_bound(a_p: i64, p: u64, genus: u8) -> bool {
    let g = genus as i128;
    (a_p as i128) * (a_p as i128) <= 4 * g * g * p as i128
}

/// Frobenius data of one curve at one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTrace {
    pub p: u64,
    pub good: bool,
    /// `#C(F_p)`; absent when the reduction is singular.
    pub count: Option<u64>,
    /// `p + 1 - #C(F_p)`.
    pub a_p: Option<i64>,
    /// Full Euler factor, when computed.
    pub lpoly: Option<Vec<i64>>,
}

impl PrimeTrace {
    pub fn bad(p: u64) -> Self {
        Self {
            p,
            good: false,
            count: None,
            a_p: None,
            lpoly: None,
        }
    }

    /// `a_p / sqrt(p)`.
    pub fn normalized(&self) -> Option<f64> {
        self.a_p.map(|a| a as f64 / (self.p as f64).sqrt())
    }

    /// Eigenangles of the unitarized Frobenius class, when determinable.
    ///
    /// Genus 1 needs only `a_p`; genus 2 needs the stored Euler factor.
    pub fn eigenangles(&self, genus: u8) -> Result<Option<Vec<f64>>, CurveError> {
        match (genus, &self.lpoly, self.a_p) {
            (_, Some(lpoly), _) => unitarized_eigenangles(lpoly, self.p).map(Some),
            (1, None, Some(a)) => unitarized_eigenangles(&[1, -a, self.p as i64], self.p).map(Some),
            _ => Ok(None),
        }
    }
}

const ROOT_MODULUS_TOLERANCE: f64 = 1e-6;

/// Eigenangles `theta_j` in `[0, pi]` of the unitarized Euler factor
/// `L(T / sqrt(p))`, so that `L(T / sqrt(p)) = prod_j (1 - 2 cos(theta_j) T + T^2)`.
///
/// Accepts degree 2 (`[1, -a, p]`) and degree 4 factors. Cosines are clamped
/// into `[-1, 1]` before `acos`, so boundary traces `|a| = 2g sqrt(p)` map to
/// angles `0` or `pi`. Angles are returned in ascending order.
pub fn unitarized_eigenangles(lpoly: &[i64], p: u64) -> Result<Vec<f64>, CurveError> {
    if lpoly.first() != Some(&1) {
        return Err(CurveError::InvalidLPoly("constant term must be 1".into()));
    }
    let sp = (p as f64).sqrt();
    // each u_j = 2 cos(theta_j) is a root of a real polynomial; complex or
    // out-of-range u signals roots off the unit circle
    let us: Vec<Complex64> = match lpoly.len() {
        3 => vec![Complex64::new(-lpoly[1] as f64 / sp, 0.0)],
        5 => {
            let s = -lpoly[1] as f64 / sp;
            let prod = lpoly[2] as f64 / p as f64 - 2.0;
            let disc = Complex64::new(s * s - 4.0 * prod, 0.0).sqrt();
            vec![(s + disc) / 2.0, (s - disc) / 2.0]
        }
        n => {
            return Err(CurveError::InvalidLPoly(format!(
                "expected 3 or 5 coefficients, got {n}"
            )))
        }
    };
    let mut deviation: f64 = 0.0;
    for &u in &us {
        let root = (u * u - 4.0).sqrt();
        for t in [(u + root) / 2.0, (u - root) / 2.0] {
            deviation = deviation.max((t.norm() - 1.0).abs());
        }
    }
    if deviation > ROOT_MODULUS_TOLERANCE {
        return Err(CurveError::NonUnitaryRoots { deviation });
    }
    let mut angles: Vec<f64> = us
        .iter()
        .map(|u| (u.re / 2.0).clamp(-1.0, 1.0).acos())
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// `4 f + h^2`, the right-hand side after completing the square.
fn completed_square(f: &[i64], h: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; 7];
    for (i, &c) in f.iter().enumerate() {
        out[i] += 4 * c;
    }
    for (i, &x) in h.iter().enumerate() {
        for (j, &y) in h.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn weierstrass_discriminant(a: &[i64; 5]) -> BigInt {
    let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
    let b2: BigInt = &a1 * &a1 + 4 * &a2;
    let b4: BigInt = 2 * &a4 + &a1 * &a3;
    let b6: BigInt = &a3 * &a3 + 4 * &a6;
    let b8: BigInt = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let lead: BigInt = -(&b2 * &b2 * &b8);
    lead - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
}

/// `2^-12 disc_6(4f + h^2)`, with `disc_6` the discriminant of the binary
/// sextic (which equals `a_5^2 disc_5` when the degree drops to 5).
fn genus2_discriminant(f: &[i64], h: &[i64]) -> BigInt {
    let big_f: Vec<BigInt> = completed_square(f, h).into_iter().map(BigInt::from).collect();
    let d = big_f.iter().rposition(|c| !c.is_zero()).expect("nonzero");
    let poly = &big_f[..=d];
    let mut disc = polynomial_discriminant(poly);
    if d == 5 {
        disc *= &poly[5] * &poly[5];
    }
    let scale = BigInt::from(4096);
    if !(&disc % &scale).is_zero() {
        // not reachable for integral models; keep the unscaled value so bad
        // primes are still detected
        return disc;
    }
    disc / scale
}

/// Discriminant of a polynomial with nonzero leading coefficient.
fn polynomial_discriminant(poly: &[BigInt]) -> BigInt {
    let n = poly.len() - 1;
    let deriv: Vec<BigInt> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let res = resultant(poly, &deriv);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    res * sign / &poly[n]
}

/// Resultant via the Sylvester matrix (ascending coefficient lists).
fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + row][row + k] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].clone() * sign
}

fn count_weierstrass_enumerate(a: &[i64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = a.map(|c| reduce(c, p));
    let mut affine = 0;
    for x in 0..p {
        let rhs = eval_mod(&[a6, a4, a2, 1], x, p);
        let lin = (mul_mod(a1, x, p) + a3) % p;
        for y in 0..p {
            if (mul_mod(y, y, p) + mul_mod(lin, y, p)) % p == rhs {
                affine += 1;
            }
        }
    }
    affine + 1
}

fn count_weierstrass_charsum(a: &[i64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = *a;
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let g = [reduce(b6, p), reduce(2 * b4, p), reduce(b2, p), 4 % p];
    let chi = QuadraticCharacter::new(p);
    let s: i64 = poly_values_mod(&g, p).map(|v| chi.of(v)).sum();
    (p as i64 + 1 + s) as u64
}

fn reduced_square_completion(f: &[i64], h: &[i64], p: u64) -> Vec<u64> {
    completed_square(f, h).iter().map(|&c| reduce(c, p)).collect()
}

fn count_genus2_charsum(f: &[i64], h: &[i64], p: u64) -> u64 {
    let big_f = reduced_square_completion(f, h, p);
    let chi = QuadraticCharacter::new(p);
    let at_infinity = if big_f[6] != 0 { 1 + chi.of(big_f[6]) } else { 1 };
    let s: i64 = poly_values_mod(&big_f, p).map(|v| chi.of(v)).sum();
    (p as i64 + s + at_infinity) as u64
}

fn count_genus2_fp2_charsum(f: &[i64], h: &[i64], field: &QuadraticExtension) -> u64 {
    let p = field.p;
    let big_f = reduced_square_completion(f, h, p);
    let chi = QuadraticCharacter::new(p);
    // every nonzero element of F_p is a square in F_{p^2}
    let at_infinity = if big_f[6] != 0 { 2 } else { 1 };
    let s: i64 = field
        .elements()
        .map(|z| chi.of(field.norm(field.eval(&big_f, z))))
        .sum();
    (p as i64 * p as i64 + s + at_infinity) as u64
}

/// Direct enumeration of `y^2 + h(x) y = f(x)` over `F_2` or `F_4`.
fn count_char2_hyperelliptic(f: &[i64], h: &[i64], field: &QuadraticExtension, over_fp2: bool) -> u64 {
    debug_assert_eq!(field.p, 2);
    let fr: Vec<u64> = f.iter().map(|&c| reduce(c, 2)).collect();
    let hr: Vec<u64> = h.iter().map(|&c| reduce(c, 2)).collect();
    let elems: Vec<_> = if over_fp2 {
        field.elements().collect()
    } else {
        vec![(0, 0), (1, 0)]
    };
    let on_curve = |x, y| {
        let lhs = field.add(field.mul(y, y), field.mul(field.eval(&hr, x), y));
        lhs == field.eval(&fr, x)
    };
    let affine = elems
        .iter()
        .map(|&x| elems.iter().filter(|&&y| on_curve(x, y)).count() as u64)
        .sum::<u64>();
    // points at infinity: roots of Y^2 + h_3 Y = f_6
    let h3 = (hr.get(3).copied().unwrap_or(0), 0);
    let f6 = (fr.get(6).copied().unwrap_or(0), 0);
    let infinite = elems
        .iter()
        .filter(|&&y| field.add(field.mul(y, y), field.mul(h3, y)) == f6)
        .count() as u64;
    affine + infinite
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weierstrass(label: &str, a: [i64; 5], n: u64) -> CurveSpec {
        let [a1, a2, a3, a4, a6] = a;
        CurveSpec::new(label, 1, CurveModel::Weierstrass { a1, a2, a3, a4, a6 }, n).unwrap()
    }

    fn hyper(label: &str, f: &[i64], h: &[i64], n: u64) -> CurveSpec {
        CurveSpec::new(
            label,
            2,
            CurveModel::Hyperelliptic {
                f: f.to_vec(),
                h: h.to_vec(),
            },
            n,
        )
        .unwrap()
    }

    #[test]
    fn discriminants_of_known_models() {
        assert_eq!(*weierstrass("x3+x", [0, 0, 0, 1, 0], 64).discriminant(), BigInt::from(-64));
        assert_eq!(*weierstrass("11a1", [0, -1, 1, -10, -20], 11).discriminant(), BigInt::from(-161051));
        assert_eq!(*weierstrass("37a1", [0, 0, 1, -1, 0], 37).discriminant(), BigInt::from(37));
        // y^2 = x^5 + 1: 2^8 5^5; y^2 + y = x^5: 5^5
        assert_eq!(*hyper("x5+1", &[1, 0, 0, 0, 0, 1], &[], 800).discriminant(), BigInt::from(256 * 3125));
        let d = hyper("y2+y=x5", &[0, 0, 0, 0, 0, 1], &[1], 3125).discriminant().clone();
        assert!(d == BigInt::from(3125) || d == BigInt::from(-3125));
    }

    #[test]
    fn singular_and_inconsistent_models_are_rejected() {
        let cusp = CurveSpec::new("cusp", 1, CurveModel::Weierstrass { a1: 0, a2: 0, a3: 0, a4: 0, a6: 0 }, 1);
        assert!(matches!(cusp, Err(CurveError::InvalidModel { .. })));
        let wrong_genus = CurveSpec::new("g", 2, CurveModel::Weierstrass { a1: 0, a2: 0, a3: 0, a4: 1, a6: 0 }, 64);
        assert!(wrong_genus.is_err());
        let quartic = CurveSpec::new("q", 2, CurveModel::Hyperelliptic { f: vec![1, 0, 0, 0, 1], h: vec![] }, 1);
        assert!(quartic.is_err());
        let repeated = CurveSpec::new("r", 2, CurveModel::Hyperelliptic { f: vec![0, 0, 1, 0, 0, 1], h: vec![] }, 1);
        assert!(repeated.is_err());
    }

    #[test]
    fn count_and_trace_of_x3_plus_x() {
        let c = weierstrass("x3+x", [0, 0, 0, 1, 0], 64);
        let limits = CountLimits::default();
        assert_eq!(c.count_points(3, &limits).unwrap(), 4);
        assert!(matches!(c.count_points(2, &limits), Err(CurveError::BadReduction { p: 2, .. })));
        let t = c.frobenius_trace(3, &limits).unwrap();
        assert_eq!(t.a_p, Some(0));
        assert!(t.good);
        assert_eq!(c.euler_factor(3, &limits).unwrap(), vec![1, 0, 3]);
    }

    #[test]
    fn ceilings_are_enforced() {
        let c = hyper("x5+1", &[1, 0, 0, 0, 0, 1], &[], 800);
        let limits = CountLimits { fp_ceiling: 100, fp2_ceiling: 10 };
        assert!(matches!(c.count_points(101, &limits), Err(CurveError::CeilingExceeded { .. })));
        assert!(matches!(c.count_points_fp2(11, &limits), Err(CurveError::CeilingExceeded { .. })));
        let e = weierstrass("x3+x", [0, 0, 0, 1, 0], 64);
        assert!(matches!(e.count_points_fp2(3, &limits), Err(CurveError::Unsupported(_))));
    }

    #[test]
    fn conductor_only_primes_are_flagged_bad_but_counted() {
        // declare an extra factor 3 in the conductor
        let c = weierstrass("x3+x", [0, 0, 0, 1, 0], 192);
        let t = c.frobenius_trace(3, &CountLimits::default()).unwrap();
        assert!(!t.good);
        assert_eq!(t.count, Some(4));
        let report = c.bad_prime_report(10);
        assert_eq!(report.conductor_only, vec![3]);
        assert!(report.discriminant_only.is_empty());
    }

    #[test]
    fn eigenangles_of_simple_factors() {
        let a = unitarized_eigenangles(&[1, 0, 3], 3).unwrap();
        assert!((a[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // boundary trace 2: double root at 1
        let a = unitarized_eigenangles(&[1, -4, 4], 4).unwrap();
        assert_eq!(a, vec![0.0]);
        let a = unitarized_eigenangles(&[1, 4, 4], 4).unwrap();
        assert!((a[0] - std::f64::consts::PI).abs() < 1e-12);
        assert!(matches!(
            unitarized_eigenangles(&[1, -5, 3], 3),
            Err(CurveError::NonUnitaryRoots { .. })
        ));
        assert!(matches!(unitarized_eigenangles(&[1, 0], 3), Err(CurveError::InvalidLPoly(_))));
    }

    #[test]
    fn curve_json_round_trip() {
        let text = r#"{"label":"37a1","genus":1,"model":{"a1":0,"a2":0,"a3":1,"a4":-1,"a6":0},"conductor":37}"#;
        let c = CurveSpec::from_json_str(text).unwrap();
        assert_eq!(c.label(), "37a1");
        let again = CurveSpec::from_json_str(&c.to_json()).unwrap();
        assert_eq!(c, again);
        let g2 = r#"{"label":"c","genus":2,"model":{"f":[1,0,0,0,0,1]},"conductor":800}"#;
        assert_eq!(CurveSpec::from_json_str(g2).unwrap().genus(), 2);
        let short = r#"{"label":"s","genus":1,"model":{"f":[0,1,0,1],"h":[]},"conductor":64}"#;
        let s = CurveSpec::from_json_str(short).unwrap();
        assert_eq!(s.discriminant(), &BigInt::from(-64));
    }
}

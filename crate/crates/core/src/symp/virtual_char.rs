use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{character_poly, decompose};
use super::{sp_value, DominantWeight, LaurentPoly, SympError, TorusPoint, WeylGrid};
use crate::Scalar;

/// Quadrature order used when callers do not choose one.
pub const DEFAULT_ORDER: usize = 64;

/// A multiplicity computed by quadrature must be this close to an integer.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-3;

/// `USp(2g)`, or `USp(2g) x USp(2g2)` when `g2` is present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub g: usize,
    pub g2: Option<usize>,
}

impl Group {
    pub fn single(g: usize) -> Self {
        Self { g, g2: None }
    }

    pub fn product(g: usize, g2: usize) -> Self {
        Self { g, g2: Some(g2) }
    }

    pub fn is_product(&self) -> bool {
        self.g2.is_some()
    }

    /// Rank of each simple factor.
    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(self.g).chain(self.g2).collect()
    }

    pub fn nvars(&self) -> usize {
        self.g + self.g2.unwrap_or(0)
    }

    fn validate(&self) -> Result<(), SympError> {
        if self.g == 0 || self.g2 == Some(0) {
            return Err(SympError::InvalidWeight(format!("group ranks must be positive: {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.g2 {
            None => write!(f, "USp({})", 2 * self.g),
            Some(g2) => write!(f, "USp({}) x USp({})", 2 * self.g, 2 * g2),
        }
    }
}

/// Index of an irreducible: `sp_lambda`, or `sp_lambda (x) sp_mu` on a
/// product group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub lambda: DominantWeight,
    pub mu: Option<DominantWeight>,
}

impl TermKey {
    pub fn trivial(group: Group) -> Self {
        Self {
            lambda: DominantWeight::trivial(group.g),
            mu: group.g2.map(DominantWeight::trivial),
        }
    }

    pub fn dimension(&self) -> u64 {
        self.lambda.dimension() * self.mu.as_ref().map_or(1, |m| m.dimension())
    }

    /// Total tensor degree `|lambda| + |mu|`.
    pub fn degree(&self) -> u32 {
        self.lambda.size() + self.mu.as_ref().map_or(0, |m| m.size())
    }

    fn fits(&self, group: Group) -> bool {
        self.lambda.g() == group.g && self.mu.as_ref().map(|m| m.g()) == group.g2
    }

    fn eval<T: Scalar>(&self, angles: &[T], angles2: Option<&[T]>) -> T {
        let a = sp_value(&self.lambda, angles);
        match (&self.mu, angles2) {
            (Some(mu), Some(b)) => a * sp_value(mu, b),
            _ => a,
        }
    }
}

/// Integer combination of irreducible characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualCharacter {
    group: Group,
    terms: BTreeMap<TermKey, i64>,
    weight: u32,
}

impl VirtualCharacter {
    pub fn zero(group: Group) -> Self {
        Self {
            group,
            terms: BTreeMap::new(),
            weight: 0,
        }
    }

    pub fn irreducible(key: TermKey) -> Self {
        let group = Group {
            g: key.lambda.g(),
            g2: key.mu.as_ref().map(|m| m.g()),
        };
        let weight = key.degree();
        Self {
            group,
            terms: BTreeMap::from([(key, 1)]),
            weight,
        }
    }

    pub fn trivial(group: Group) -> Self {
        Self::irreducible(TermKey::trivial(group))
    }

    /// The standard representation `V` of `USp(2g)`.
    pub fn standard(g: usize) -> Self {
        Self::irreducible(TermKey {
            lambda: DominantWeight::standard(g),
            mu: None,
        })
    }

    pub fn from_terms<I>(group: Group, terms: I) -> Result<Self, SympError>
    where
        I: IntoIterator<Item = (TermKey, i64)>,
    {
        group.validate()?;
        let mut out = Self::zero(group);
        for (key, c) in terms {
            if !key.fits(group) {
                return Err(SympError::GroupMismatch(format!(
                    "term {} does not belong to {group}",
                    key_label(&key)
                )));
            }
            out.add_term(key, c);
        }
        out.weight = out.default_weight();
        Ok(out)
    }

    /// Decomposes a class function given as an integer Laurent polynomial.
    pub fn from_laurent(group: Group, f: &LaurentPoly<i64>) -> Result<Self, SympError> {
        let terms = decompose(f, &group.ranks()).into_iter().map(|(mut ws, c)| {
            let mu = if ws.len() > 1 { ws.pop() } else { None };
            let lambda = ws.pop().expect("at least one block");
            (TermKey { lambda, mu }, c)
        });
        Self::from_terms(group, terms)
    }

    pub fn to_laurent(&self) -> LaurentPoly<i64> {
        let total = self.group.nvars();
        let mut f = LaurentPoly::zero(total);
        for (key, &c) in &self.terms {
            let mut piece = character_poly::<i64>(&key.lambda).embed(0, total);
            if let Some(mu) = &key.mu {
                piece = &piece * &character_poly::<i64>(mu).embed(self.group.g, total);
            }
            f = &f + &piece.scale(&c);
        }
        f
    }

    fn add_term(&mut self, key: TermKey, c: i64) {
        let entry = self.terms.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    fn default_weight(&self) -> u32 {
        self.terms.keys().map(TermKey::degree).max().unwrap_or(0)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, i64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coefficient(&self, key: &TermKey) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_irreducible(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|&c| c == 1)
    }

    /// Motivic weight `w_chi`.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn with_weight(mut self, weight: u32) -> Self {
        self.weight = weight;
        self
    }

    /// Virtual dimension `sum c * dim`.
    pub fn dimension(&self) -> i64 {
        self.terms.iter().map(|(k, &c)| c * k.dimension() as i64).sum()
    }

    /// `d_chi = d_{chi+} + d_{chi-}`.
    pub fn total_degree(&self) -> u64 {
        self.terms.iter().map(|(k, &c)| c.unsigned_abs() * k.dimension()).sum()
    }

    /// Exact trivial multiplicity: the coefficient of the trivial character.
    pub fn delta(&self) -> i64 {
        self.coefficient(&TermKey::trivial(self.group))
    }

    fn check_same_group(&self, other: &Self) -> Result<(), SympError> {
        if self.group != other.group {
            return Err(SympError::GroupMismatch(format!("{} vs {}", self.group, other.group)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SympError> {
        self.check_same_group(other)?;
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out.weight = self.weight.max(other.weight);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SympError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero(self.group);
        }
        Self {
            group: self.group,
            terms: self.terms.iter().map(|(k, &v)| (k.clone(), v * c)).collect(),
            weight: self.weight,
        }
    }

    /// Tensor product on the same group, decomposed exactly.
    pub fn tensor(&self, other: &Self) -> Result<Self, SympError> {
        self.check_same_group(other)?;
        let product = &self.to_laurent() * &other.to_laurent();
        Ok(Self::from_laurent(self.group, &product)?.with_weight(self.weight + other.weight))
    }

    /// External tensor product of characters of `USp(2g)` and `USp(2g2)`.
    pub fn outer(&self, other: &Self) -> Result<Self, SympError> {
        if self.group.is_product() || other.group.is_product() {
            return Err(SympError::GroupMismatch(
                "external products need two single-factor characters".into(),
            ));
        }
        let group = Group::product(self.group.g, other.group.g);
        let mut out = Self::zero(group);
        for (k1, &c1) in &self.terms {
            for (k2, &c2) in &other.terms {
                let key = TermKey {
                    lambda: k1.lambda.clone(),
                    mu: Some(k2.lambda.clone()),
                };
                out.add_term(key, c1 * c2);
            }
        }
        out.weight = self.weight + other.weight;
        Ok(out)
    }

    /// Adams operation: the class function `g -> chi(g^2)`, which equals
    /// `Sym^2 chi - Lambda^2 chi`.
    pub fn adams2(&self) -> Self {
        let doubled = self.to_laurent().substitute_power(2);
        Self::from_laurent(self.group, &doubled)
            .expect("group is already valid")
            .with_weight(2 * self.weight)
    }

    pub fn eval<T: Scalar>(&self, point: &TorusPoint<T>) -> Result<T, SympError> {
        let ok = point.angles().len() == self.group.g && point.angles2().map(<[T]>::len) == self.group.g2;
        if !ok {
            return Err(SympError::GroupMismatch(format!(
                "torus point of shape ({}, {:?}) for {}",
                point.angles().len(),
                point.angles2().map(<[T]>::len),
                self.group
            )));
        }
        Ok(self.eval_angles(point.angles(), point.angles2()))
    }

    /// Evaluation without shape checks. Angles outside `[0, pi]` are fine
    /// here since characters are even and `2 pi`-periodic.
    pub fn eval_angles<T: Scalar>(&self, angles: &[T], angles2: Option<&[T]>) -> T {
        self.terms
            .iter()
            .map(|(k, &c)| T::lit(c as f64) * k.eval(angles, angles2))
            .sum()
    }

    /// Analytic invariants. `t_chi` is found by a torus grid search followed
    /// by local ascent, so it is a lower bound for the true maximum.
    pub fn metadata(&self) -> AnalyticMetadata {
        let d_chi = self.total_degree();
        let t_chi = self.torus_maximum();
        let gamma_chi_bound = d_chi;
        AnalyticMetadata {
            d_chi,
            delta: self.delta(),
            w_chi: self.weight,
            t_chi,
            gamma_chi_bound,
            n_chi_bound: gamma_chi_bound.max((t_chi - 1e-9).ceil().max(0.0) as u64),
            b_chi_exponent: d_chi,
        }
    }

    fn torus_maximum(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let dims = self.group.nvars();
        let res = match dims {
            0..=2 => 512,
            3 => 96,
            4 => 48,
            _ => 16,
        };
        let nodes: Vec<f64> = (0..res)
            .map(|i| std::f64::consts::PI * i as f64 / (res - 1) as f64)
            .collect();
        let f = |v: &[f64]| {
            let (a, b) = v.split_at(self.group.g);
            self.eval_angles(a, self.group.g2.map(|_| b))
        };
        // tabulate each factor's irreducibles on its own grid, then combine
        let g1_points = grid_points(&nodes, self.group.g);
        let g2_points = grid_points(&nodes, self.group.g2.unwrap_or(0));
        let lambda_vals = tabulate_weights(self.terms.keys().map(|k| &k.lambda), &g1_points);
        let mu_vals = tabulate_weights(self.terms.keys().filter_map(|k| k.mu.as_ref()), &g2_points);
        let (best, i_best, j_best) = (0..g1_points.len())
            .into_par_iter()
            .map(|i| {
                let mut best = (f64::NEG_INFINITY, i, 0);
                for j in 0..g2_points.len().max(1) {
                    let v: f64 = self
                        .terms
                        .iter()
                        .map(|(k, &c)| {
                            let a = lambda_vals[&k.lambda][i];
                            let b = k.mu.as_ref().map_or(1.0, |m| mu_vals[m][j]);
                            c as f64 * a * b
                        })
                        .sum();
                    if v > best.0 {
                        best = (v, i, j);
                    }
                }
                best
            })
            .reduce(
                || (f64::NEG_INFINITY, 0, 0),
                |x, y| if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x },
            );
        let mut x: Vec<f64> = g1_points[i_best].clone();
        if self.group.g2.is_some() {
            x.extend_from_slice(&g2_points[j_best]);
        }
        local_ascent(&f, x, best, std::f64::consts::PI / (res - 1) as f64)
    }

    pub fn to_json(&self) -> String {
        let doc = CharacterDoc {
            g: self.group.g,
            g2: self.group.g2,
            terms: self
                .terms
                .iter()
                .map(|(k, &c)| TermDoc {
                    lambda: k.lambda.parts().to_vec(),
                    mu: k.mu.as_ref().map(|m| m.parts().to_vec()),
                    coeff: c,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SympError> {
        let doc: CharacterDoc = serde_json::from_str(text)?;
        let group = Group { g: doc.g, g2: doc.g2 };
        group.validate()?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let lambda = DominantWeight::new(group.g, &t.lambda)?;
            let mu = match (group.g2, t.mu) {
                (Some(g2), Some(mu)) => Some(DominantWeight::new(g2, &mu)?),
                (Some(g2), None) => Some(DominantWeight::trivial(g2)),
                (None, None) => None,
                (None, Some(_)) => {
                    return Err(SympError::GroupMismatch("\"mu\" given but \"g2\" is absent".into()))
                }
            };
            terms.push((TermKey { lambda, mu }, t.coeff));
        }
        Self::from_terms(group, terms)
    }
}

impl fmt::Display for VirtualCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{sign}")?;
            if i > 0 {
                write!(f, " ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{}", key_label(k))?;
        }
        Ok(())
    }
}

fn key_label(k: &TermKey) -> String {
    match &k.mu {
        None => format!("sp{}", k.lambda),
        Some(mu) => format!("sp{}(x)sp{}", k.lambda, mu),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CharacterDoc {
    g: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g2: Option<usize>,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    lambda: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<Vec<u32>>,
    coeff: i64,
}

fn grid_points(nodes: &[f64], dims: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for _ in 0..dims {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                nodes.iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    pts
}

fn tabulate_weights<'a>(
    weights: impl Iterator<Item = &'a DominantWeight>,
    points: &[Vec<f64>],
) -> BTreeMap<DominantWeight, Vec<f64>> {
    let mut out = BTreeMap::new();
    for w in weights {
        if !out.contains_key(w) {
            let vals = points.par_iter().map(|p| sp_value(w, p)).collect();
            out.insert(w.clone(), vals);
        }
    }
    out
}

/// Compass search restricted to `[0, pi]^n`.
fn local_ascent<F: Fn(&[f64]) -> f64>(f: &F, mut x: Vec<f64>, mut fx: f64, mut step: f64) -> f64 {
    let pi = std::f64::consts::PI;
    while step > 1e-12 {
        let mut moved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + dir * step).clamp(0.0, pi);
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    fx
}

/// Invariants of a virtual character entering the error terms of the
/// weighted prime sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticMetadata {
    pub d_chi: u64,
    pub delta: i64,
    pub w_chi: u32,
    pub t_chi: f64,
    pub gamma_chi_bound: u64,
    pub n_chi_bound: u64,
    /// `B_chi` is only known up to `O(N^{d_chi})`; this is that exponent.
    pub b_chi_exponent: u64,
}

/// Bounds for the Adams square of a character with the given metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Adams2Bounds {
    pub t_chi: f64,
    pub w_chi: u32,
    pub gamma_chi_bound: u64,
}

impl AnalyticMetadata {
    pub fn log_b_chi_bound(&self, conductor: u64) -> f64 {
        self.b_chi_exponent as f64 * (conductor as f64).ln()
    }

    pub fn adams2_bounds(&self) -> Adams2Bounds {
        Adams2Bounds {
            t_chi: self.d_chi as f64,
            w_chi: 2 * self.w_chi,
            gamma_chi_bound: 2 * self.d_chi,
        }
    }
}

fn round_checked(raw: f64) -> Result<i64, SympError> {
    let r = raw.round();
    if (raw - r).abs() > INTEGRALITY_TOLERANCE || !raw.is_finite() {
        return Err(SympError::NonIntegral { raw });
    }
    Ok(r as i64)
}

/// Haar pairing `int chi1 * chi2` by quadrature, before rounding.
pub fn inner_product_raw(a: &VirtualCharacter, b: &VirtualCharacter, order: usize) -> Result<f64, SympError> {
    a.check_same_group(b)?;
    let group = a.group;
    let grid = WeylGrid::<f64>::new(group.g, order)?;
    let grid2 = group.g2.map(|g2| WeylGrid::<f64>::new(g2, order)).transpose()?;
    let lambdas = tabulate_weights(a.terms.keys().chain(b.terms.keys()).map(|k| &k.lambda), grid.points());
    let mus = match &grid2 {
        Some(g2) => tabulate_weights(
            a.terms.keys().chain(b.terms.keys()).filter_map(|k| k.mu.as_ref()),
            g2.points(),
        ),
        None => BTreeMap::new(),
    };
    let mut cache = BTreeMap::new();
    let mut pair = |x: &DominantWeight, y: &DominantWeight, second: bool| -> f64 {
        let key = (second, x.min(y).clone(), x.max(y).clone());
        *cache.entry(key).or_insert_with(|| {
            if second {
                grid2.as_ref().expect("product group").pair(&mus[x], &mus[y])
            } else {
                grid.pair(&lambdas[x], &lambdas[y])
            }
        })
    };
    let mut total = 0.0;
    for (k1, &c1) in &a.terms {
        for (k2, &c2) in &b.terms {
            let mut v = pair(&k1.lambda, &k2.lambda, false);
            if let (Some(m1), Some(m2)) = (&k1.mu, &k2.mu) {
                v *= pair(m1, m2, true);
            }
            total += (c1 * c2) as f64 * v;
        }
    }
    Ok(total)
}

/// Haar pairing rounded to the nearest integer, failing when the raw value
/// is not close to one.
pub fn inner_product(a: &VirtualCharacter, b: &VirtualCharacter, order: usize) -> Result<i64, SympError> {
    round_checked(inner_product_raw(a, b, order)?)
}

/// `delta(chi)` by quadrature.
pub fn trivial_multiplicity(chi: &VirtualCharacter, order: usize) -> Result<i64, SympError> {
    inner_product(chi, &VirtualCharacter::trivial(chi.group), order)
}

/// Frobenius–Schur indicator `int chi(g^2) dg` of an irreducible, by
/// quadrature of the doubled-angle values.
pub fn fs_indicator(chi: &VirtualCharacter, order: usize) -> Result<i64, SympError> {
    if !chi.is_irreducible() {
        return Err(SympError::NotIrreducible);
    }
    let key = chi.terms.keys().next().expect("one term");
    let doubled = |w: &DominantWeight, g: usize| -> Result<f64, SympError> {
        let grid = WeylGrid::<f64>::new(g, order)?;
        Ok(grid.integrate(|a| {
            let twice: Vec<f64> = a.iter().map(|t| 2.0 * t).collect();
            sp_value(w, &twice)
        }))
    };
    let mut raw = doubled(&key.lambda, chi.group.g)?;
    if let (Some(mu), Some(g2)) = (&key.mu, chi.group.g2) {
        raw *= doubled(mu, g2)?;
    }
    round_checked(raw)
}

/// `(t^2 - 2g t)(t2^2 + 2g2 t2)` for normalized traces `t`, `t2`.
pub fn psi_closed_form<T: Scalar>(t: T, t2: T, g: usize, g2: usize) -> T {
    let two = T::lit(2.0);
    t * (t - two * T::from_count(g)) * t2 * (t2 + two * T::from_count(g2))
}

/// The separating character `(-2g V + V (x) V) (x) (2g2 V' + V' (x) V')` on
/// `USp(2g) x USp(2g2)`.
pub fn psi_character(g: usize, g2: usize) -> Result<VirtualCharacter, SympError> {
    Group::product(g, g2).validate()?;
    let v = VirtualCharacter::standard(g);
    let left = v.tensor(&v)?.sub(&v.scale(2 * g as i64))?;
    let w = VirtualCharacter::standard(g2);
    let right = w.tensor(&w)?.add(&w.scale(2 * g2 as i64))?;
    Ok(left.outer(&right)?.with_weight(2))
}

/// `delta(psi)` read off the exact decomposition.
pub fn delta_psi_exact(g: usize, g2: usize) -> Result<i64, SympError> {
    Ok(psi_character(g, g2)?.delta())
}

/// `delta(psi)` by quadrature of the closed form, factor by factor.
pub fn delta_psi_quadrature(g: usize, g2: usize, order: usize) -> Result<i64, SympError> {
    Group::product(g, g2).validate()?;
    let trace = |a: &[f64]| a.iter().map(|t| 2.0 * t.cos()).sum::<f64>();
    let left = WeylGrid::<f64>::new(g, order)?.integrate(|a| {
        let t = trace(a);
        t * (t - 2.0 * g as f64)
    });
    let right = WeylGrid::<f64>::new(g2, order)?.integrate(|b| {
        let t = trace(b);
        t * (t + 2.0 * g2 as f64)
    });
    round_checked(left * right)
}

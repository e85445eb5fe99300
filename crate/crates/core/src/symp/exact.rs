//! Exact character arithmetic on Laurent polynomials in the torus
//! variables `x_j = exp(i theta_j)`.
//!
//! A class function `f` of `USp(2g)` decomposes as `sum m_lambda sp_lambda`
//! where `m_lambda` is the coefficient of `x^(lambda + rho)` in `f * a_rho`,
//! `a_rho = det(x_j^(rho_i) - x_j^(-rho_i))` and `rho = (g, g-1, ..., 1)`.
//! Product groups use one block of variables per factor.

use super::{Coeff, DominantWeight, LaurentPoly};

/// `sum_j (x_j + 1/x_j)`, the character of the standard representation.
pub fn trace_poly<C: Coeff>(g: usize) -> LaurentPoly<C> {
    let mut t = LaurentPoly::zero(g);
    for j in 0..g {
        t = &t + &LaurentPoly::var(g, j, 1);
        t = &t + &LaurentPoly::var(g, j, -1);
    }
    t
}

/// `a_{mu}` for a strictly decreasing positive exponent vector `mu`.
pub fn alternant<C: Coeff>(exponents: &[i64]) -> LaurentPoly<C> {
    let g = exponents.len();
    let entries: Vec<Vec<LaurentPoly<C>>> = exponents
        .iter()
        .map(|&e| {
            (0..g)
                .map(|j| &LaurentPoly::var(g, j, e as i32) - &LaurentPoly::var(g, j, -e as i32))
                .collect()
        })
        .collect();
    laurent_det(&entries, g)
}

/// The Weyl denominator `a_rho`.
pub fn weyl_numerator<C: Coeff>(g: usize) -> LaurentPoly<C> {
    let rho: Vec<i64> = (1..=g as i64).rev().collect();
    alternant(&rho)
}

/// `sp_lambda` as a Laurent polynomial, by the same determinant in the
/// complete homogeneous polynomials that [`super::sp_value`] uses.
pub fn character_poly<C: Coeff>(weight: &DominantWeight) -> LaurentPoly<C> {
    let g = weight.g();
    let n = weight.length();
    if n == 0 {
        return LaurentPoly::one(g);
    }
    let max = weight.part(0) as usize + n;
    let h = complete_homogeneous_polys::<C>(g, max);
    let hk = |k: i64| {
        if k < 0 {
            LaurentPoly::zero(g)
        } else {
            h[k as usize].clone()
        }
    };
    let entries: Vec<Vec<LaurentPoly<C>>> = (0..n)
        .map(|i| {
            let base = weight.part(i) as i64 - i as i64;
            (0..n)
                .map(|j| {
                    if j == 0 {
                        hk(base)
                    } else {
                        &hk(base + j as i64) + &hk(base - j as i64)
                    }
                })
                .collect()
        })
        .collect();
    laurent_det(&entries, g)
}

fn complete_homogeneous_polys<C: Coeff>(g: usize, max: usize) -> Vec<LaurentPoly<C>> {
    let mut h = vec![LaurentPoly::zero(g); max + 1];
    h[0] = LaurentPoly::one(g);
    for j in 0..g {
        let u = &LaurentPoly::var(g, j, 1) + &LaurentPoly::var(g, j, -1);
        for k in 1..=max {
            let mut next = &h[k] + &(&u * &h[k - 1]);
            if k >= 2 {
                next = &next - &h[k - 2];
            }
            h[k] = next;
        }
    }
    h
}

/// Laplace expansion along the first row; the matrices here are at most
/// `g x g` with `g` small.
fn laurent_det<C: Coeff>(m: &[Vec<LaurentPoly<C>>], nvars: usize) -> LaurentPoly<C> {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::one(nvars);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = LaurentPoly::zero(nvars);
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly<C>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &laurent_det(&minor, nvars);
        det = if col % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Multiplicities of the irreducibles of `USp(2 ranks[0]) x USp(2 ranks[1]) x ...`
/// in the class function `f`, whose variables are laid out block by block.
///
/// Returns `(weights per block, multiplicity)` pairs with nonzero
/// multiplicity, in ascending exponent order.
pub fn decompose<C: Coeff>(f: &LaurentPoly<C>, ranks: &[usize]) -> Vec<(Vec<DominantWeight>, C)> {
    let total: usize = ranks.iter().sum();
    assert_eq!(f.nvars(), total, "variable count must match the ranks");
    let mut numerator = LaurentPoly::one(total);
    let mut offset = 0;
    for &g in ranks {
        numerator = &numerator * &weyl_numerator::<C>(g).embed(offset, total);
        offset += g;
    }
    let product = f * &numerator;
    let mut out = Vec::new();
    'terms: for (exps, c) in product.terms() {
        let mut weights = Vec::with_capacity(ranks.len());
        let mut offset = 0;
        for &g in ranks {
            let block = &exps[offset..offset + g];
            offset += g;
            let dominant = block.iter().all(|&e| e > 0) && block.windows(2).all(|w| w[0] > w[1]);
            if !dominant {
                continue 'terms;
            }
            let parts: Vec<u32> = block
                .iter()
                .enumerate()
                .map(|(i, &e)| (e - (g - i) as i32) as u32)
                .collect();
            weights.push(DominantWeight::new(g, &parts).expect("shifted exponents are dominant"));
        }
        out.push((weights, c.clone()));
    }
    out
}

use rayon::prelude::*;

use super::SympError;
use crate::numeric::{CompensatedSum, GaussLegendre};
use crate::Scalar;

/// Orders below this cannot resolve even the degree-6 moments used in tests.
pub const MIN_ORDER: usize = 8;

const MAX_POINTS: usize = 1 << 24;

/// Unnormalized Weyl density of `USp(2g)` in eigenangle coordinates:
/// `prod_{j<k} (2cos t_j - 2cos t_k)^2 prod_j 4 sin^2 t_j`.
pub fn weyl_density<T: Scalar>(angles: &[T]) -> T {
    let two = T::lit(2.0);
    let mut d = T::one();
    for (j, &a) in angles.iter().enumerate() {
        let s = a.sin();
        d = d * T::lit(4.0) * s * s;
        for &b in &angles[j + 1..] {
            let diff = two * a.cos() - two * b.cos();
            d = d * diff * diff;
        }
    }
    d
}

/// Tensor-product Gauss–Legendre grid on `[0, pi]^g` carrying normalized
/// Haar weights. Immutable after construction.
#[derive(Clone, Debug)]
pub struct WeylGrid<T> {
    g: usize,
    order: usize,
    points: Vec<Vec<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> WeylGrid<T> {
    pub fn new(g: usize, order: usize) -> Result<Self, SympError> {
        if order < MIN_ORDER {
            return Err(SympError::OrderTooSmall { order, min: MIN_ORDER });
        }
        let count = (0..g).try_fold(1usize, |acc, _| acc.checked_mul(order));
        let count = match count {
            Some(c) if c <= MAX_POINTS => c,
            _ => return Err(SympError::GridTooLarge { points: count.unwrap_or(usize::MAX) }),
        };
        let rule = GaussLegendre::<T>::new(order);
        let (nodes, w1): (Vec<T>, Vec<T>) = rule.mapped(T::zero(), T::PI()).unzip();
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut idx = vec![0usize; g];
        for _ in 0..count {
            let angles: Vec<T> = idx.iter().map(|&i| nodes[i]).collect();
            let w = idx.iter().fold(T::one(), |acc, &i| acc * w1[i]) * weyl_density(&angles);
            points.push(angles);
            weights.push(w);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < order {
                    break;
                }
                *slot = 0;
            }
        }
        let total: CompensatedSum<T> = weights.iter().copied().collect();
        let total = total.value();
        for w in &mut weights {
            *w = *w / total;
        }
        Ok(Self {
            g,
            order,
            points,
            weights,
        })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Haar integral of a class function given on eigenangles.
    pub fn integrate<F>(&self, f: F) -> T
    where
        F: Fn(&[T]) -> T + Sync,
    {
        let parts: Vec<CompensatedSum<T>> = self
            .points
            .par_chunks(4096)
            .zip(self.weights.par_chunks(4096))
            .map(|(pts, ws)| pts.iter().zip(ws).map(|(p, &w)| w * f(p)).collect())
            .collect();
        parts
            .into_iter()
            .fold(CompensatedSum::new(), |mut acc, s| {
                acc.merge(&s);
                acc
            })
            .value()
    }

    /// Values of `f` at every grid point, in grid order.
    pub fn tabulate<F>(&self, f: F) -> Vec<T>
    where
        F: Fn(&[T]) -> T + Sync,
    {
        self.points.par_iter().map(|p| f(p)).collect()
    }

    /// `sum_k w_k a_k b_k` for tabulated values.
    pub fn pair(&self, a: &[T], b: &[T]) -> T {
        let s: CompensatedSum<T> = self
            .weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&w, (&x, &y))| w * x * y)
            .collect();
        s.value()
    }
}

/// Haar integral over `USp(2g)`.
pub fn weyl_integrate<T, F>(f: F, g: usize, order: usize) -> Result<T, SympError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    Ok(WeylGrid::new(g, order)?.integrate(f))
}

/// Haar integral over `USp(2g) x USp(2g2)` with the product measure.
pub fn weyl_integrate_product<T, F>(f: F, g: usize, g2: usize, order: usize) -> Result<T, SympError>
where
    T: Scalar,
    F: Fn(&[T], &[T]) -> T + Sync,
{
    let outer = WeylGrid::<T>::new(g, order)?;
    let inner = WeylGrid::<T>::new(g2, order)?;
    Ok(outer.integrate(|a| inner.integrate(|b| f(a, b))))
}

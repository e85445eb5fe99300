use super::{DominantWeight, SympError};
use crate::Scalar;

/// A point of the maximal torus of `USp(2g)` (or of a product group), given
/// by eigenangles: the eigenvalues are `exp(+-i theta_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint<T> {
    angles: Vec<T>,
    angles2: Option<Vec<T>>,
}

impl<T: Scalar> TorusPoint<T> {
    pub fn new(angles: Vec<T>) -> Result<Self, SympError> {
        check_angles(&angles)?;
        Ok(Self { angles, angles2: None })
    }

    pub fn product(angles: Vec<T>, angles2: Vec<T>) -> Result<Self, SympError> {
        check_angles(&angles)?;
        check_angles(&angles2)?;
        Ok(Self {
            angles,
            angles2: Some(angles2),
        })
    }

    pub fn identity(g: usize, g2: Option<usize>) -> Self {
        Self {
            angles: vec![T::zero(); g],
            angles2: g2.map(|g2| vec![T::zero(); g2]),
        }
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn angles2(&self) -> Option<&[T]> {
        self.angles2.as_deref()
    }
}

fn check_angles<T: Scalar>(angles: &[T]) -> Result<(), SympError> {
    if angles.is_empty() {
        return Err(SympError::InvalidPoint("no angles".into()));
    }
    if let Some(bad) = angles.iter().find(|&&a| !(a >= T::zero() && a <= T::PI())) {
        return Err(SympError::InvalidPoint(format!("angle {bad} outside [0, pi]")));
    }
    Ok(())
}

/// Complete homogeneous symmetric polynomials `h_0 ..= h_max` in the `2g`
/// eigenvalues `exp(+-i theta_j)`, read off from the generating function
/// `prod_j 1 / (1 - 2 cos(theta_j) t + t^2)`.
pub fn complete_homogeneous<T: Scalar>(angles: &[T], max: usize) -> Vec<T> {
    let mut h = vec![T::zero(); max + 1];
    h[0] = T::one();
    for &theta in angles {
        let u = T::lit(2.0) * theta.cos();
        for k in 1..=max {
            let prev2 = if k >= 2 { h[k - 2] } else { T::zero() };
            h[k] = h[k] + u * h[k - 1] - prev2;
        }
    }
    h
}

/// Value of the irreducible character `sp_lambda` at a torus point.
///
/// Uses the symplectic Jacobi–Trudi (Koike–Terada) determinant
/// `det[h_{l_i - i + 1} | h_{l_i - i + j} + h_{l_i - i - j + 2}]`, which has
/// no singularities on the torus, unlike the Weyl quotient.
pub fn sp_value<T: Scalar>(weight: &DominantWeight, angles: &[T]) -> T {
    debug_assert_eq!(weight.g(), angles.len());
    let n = weight.length();
    if n == 0 {
        return T::one();
    }
    let max = weight.part(0) as usize + n;
    let h = complete_homogeneous(angles, max);
    let hk = |k: i64| if k < 0 { T::zero() } else { h[k as usize] };
    let mut m = vec![vec![T::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        let base = weight.part(i) as i64 - i as i64;
        row[0] = hk(base);
        for (j, cell) in row.iter_mut().enumerate().skip(1) {
            *cell = hk(base + j as i64) + hk(base - j as i64);
        }
    }
    determinant(m)
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).expect("finite"))
            .expect("nonempty");
        if m[pivot][k] == T::zero() {
            return T::zero();
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det = det * m[k][k];
        for i in k + 1..n {
            let factor = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] = m[i][j] - factor * v;
            }
        }
    }
    det
}

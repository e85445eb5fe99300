//! Arithmetic in `F_p` and `F_{p^2}` for point counting.

/// Reduces a signed integer into `[0, p)`.
pub fn reduce(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Evaluates a polynomial with coefficients already reduced mod `p`
/// (ascending powers) at `x` by Horner's rule.
pub fn eval_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Values `f(0), f(1), ..., f(p - 1)` mod `p`, by forward differences so
/// that each step costs `deg f` modular additions.
pub fn poly_values_mod(coeffs: &[u64], p: u64) -> impl Iterator<Item = u64> {
    let d = coeffs.len().saturating_sub(1);
    let mut diffs: Vec<u64> = (0..=d as u64).map(|x| eval_mod(coeffs, x % p, p)).collect();
    for k in 1..=d {
        for i in (k..=d).rev() {
            diffs[i] = (diffs[i] + p - diffs[i - 1]) % p;
        }
    }
    (0..p).map(move |_| {
        let v = diffs[0];
        for i in 0..d {
            let s = diffs[i] + diffs[i + 1];
            diffs[i] = if s >= p { s - p } else { s };
        }
        v
    })
}

/// Table of the quadratic character of `F_p` (`p` odd).
pub struct QuadraticCharacter {
    p: u64,
    table: Vec<i8>,
}

impl QuadraticCharacter {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1, "quadratic character table needs odd p");
        let mut table = vec![-1i8; p as usize];
        table[0] = 0;
        // (y + 1)^2 = y^2 + 2y + 1
        let mut square = 0u64;
        for y in 0..(p - 1) / 2 {
            square += 2 * y + 1;
            if square >= p {
                square -= p;
            }
            table[square as usize] = 1;
        }
        Self { p, table }
    }

    /// Legendre symbol of a reduced residue.
    pub fn of(&self, a: u64) -> i64 {
        self.table[a as usize] as i64
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

/// `F_{p^2} = F_p[w] / (w^2 + b w + c)`; elements are pairs `u + v w`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticExtension {
    pub p: u64,
    pub b: u64,
    pub c: u64,
}

pub type Fp2Elem = (u64, u64);

impl QuadraticExtension {
    /// Uses the first irreducible `w^2 + b w + c` in lexicographic `(b, c)`.
    pub fn new(p: u64) -> Self {
        for b in 0..p {
            for c in 0..p {
                let has_root = (0..p).any(|r| (mul_mod(r, r, p) + mul_mod(b, r, p) + c).is_multiple_of(p));
                if !has_root {
                    return Self { p, b, c };
                }
            }
        }
        unreachable!("every prime field has an irreducible quadratic")
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp2Elem> + '_ {
        (0..self.p).flat_map(move |u| (0..self.p).map(move |v| (u, v)))
    }

    pub fn add(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn mul(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        let p = self.p;
        let vv = mul_mod(x.1, y.1, p);
        let u = (mul_mod(x.0, y.0, p) + p - mul_mod(self.c, vv, p)) % p;
        let v = (mul_mod(x.0, y.1, p) + mul_mod(x.1, y.0, p) + p - mul_mod(self.b, vv, p)) % p;
        (u, v)
    }

    /// Norm to `F_p`: `u^2 - b u v + c v^2`.
    pub fn norm(&self, x: Fp2Elem) -> u64 {
        let p = self.p;
        let uu = mul_mod(x.0, x.0, p);
        let uv = mul_mod(self.b, mul_mod(x.0, x.1, p), p);
        let vv = mul_mod(self.c, mul_mod(x.1, x.1, p), p);
        (uu + p - uv + vv) % p
    }

    /// Horner evaluation of an `F_p`-coefficient polynomial at `x`.
    pub fn eval(&self, coeffs: &[u64], x: Fp2Elem) -> Fp2Elem {
        coeffs
            .iter()
            .rev()
            .fold((0, 0), |acc, &c| self.add(self.mul(acc, x), (c, 0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_sweep_matches_horner() {
        for p in [2u64, 3, 5, 7, 101] {
            for coeffs in [vec![3u64, 0, 1], vec![1, 1, 0, 4, 2, 0, 1], vec![5], vec![]] {
                let c: Vec<u64> = coeffs.iter().map(|&x| x % p).collect();
                let want: Vec<u64> = (0..p).map(|x| eval_mod(&c, x, p)).collect();
                assert_eq!(poly_values_mod(&c, p).collect::<Vec<_>>(), want, "p={p} {c:?}");
            }
        }
    }

    #[test]
    fn legendre_symbols_mod_7() {
        let chi = QuadraticCharacter::new(7);
        let got: Vec<i64> = (0..7).map(|a| chi.of(a)).collect();
        assert_eq!(got, vec![0, 1, 1, -1, 1, -1, -1]);
    }

    #[test]
    fn chosen_moduli() {
        let f2 = QuadraticExtension::new(2);
        assert_eq!((f2.b, f2.c), (1, 1));
        let f3 = QuadraticExtension::new(3);
        assert_eq!((f3.b, f3.c), (0, 1));
        let f7 = QuadraticExtension::new(7);
        assert_eq!((f7.b, f7.c), (0, 1));
        let f17 = QuadraticExtension::new(17);
        assert_eq!((f17.b, f17.c), (0, 3));
    }

    #[test]
    fn norm_is_multiplicative_and_frobenius_fixed() {
        for p in [2u64, 3, 5, 11] {
            let k = QuadraticExtension::new(p);
            let elems: Vec<_> = k.elements().collect();
            for &x in &elems {
                for &y in &elems {
                    assert_eq!(k.norm(k.mul(x, y)), mul_mod(k.norm(x), k.norm(y), p));
                }
            }
            // the multiplicative group is cyclic of order p^2 - 1
            let nonzero = elems.iter().filter(|&&e| e != (0, 0)).count() as u64;
            assert_eq!(nonzero, p * p - 1);
        }
    }
}

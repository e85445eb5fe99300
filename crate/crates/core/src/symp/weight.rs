use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::SympError;

/// Highest weight of an irreducible representation of `USp(2g)`: a partition
/// with at most `g` nonzero parts. Trailing zeros are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DominantWeight {
    g: usize,
    parts: Vec<u32>,
}

impl DominantWeight {
    pub fn new(g: usize, parts: &[u32]) -> Result<Self, SympError> {
        if g == 0 {
            return Err(SympError::InvalidWeight("rank g must be at least 1".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SympError::InvalidWeight(format!("{parts:?} is not non-increasing")));
        }
        let len = parts.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
        if len > g {
            return Err(SympError::InvalidWeight(format!(
                "{parts:?} has {len} nonzero parts, more than g = {g}"
            )));
        }
        Ok(Self {
            g,
            parts: parts[..len].to_vec(),
        })
    }

    pub fn trivial(g: usize) -> Self {
        Self::new(g, &[]).expect("valid")
    }

    /// The defining `2g`-dimensional representation.
    pub fn standard(g: usize) -> Self {
        Self::new(g, &[1]).expect("valid")
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// `|lambda|`, the tensor degree in which the representation first occurs.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    /// `lambda + rho` with `rho = (g, g-1, ..., 1)`.
    pub fn shifted(&self) -> Vec<i64> {
        (0..self.g)
            .map(|i| self.part(i) as i64 + (self.g - i) as i64)
            .collect()
    }

    /// Weyl dimension formula for type `C_g`.
    pub fn dimension(&self) -> u64 {
        let l = self.shifted();
        let r = Self::trivial(self.g).shifted();
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        for i in 0..self.g {
            num *= l[i];
            den *= r[i];
            for j in i + 1..self.g {
                num *= (l[i] - l[j]) * (l[i] + l[j]);
                den *= (r[i] - r[j]) * (r[i] + r[j]);
            }
        }
        debug_assert!((&num % &den) == BigInt::from(0));
        (num / den).to_u64().expect("dimension fits in u64")
    }

    /// All weights of rank `g` with `|lambda| <= max_size`, ordered by size
    /// and then lexicographically.
    pub fn all_up_to(g: usize, max_size: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for n in 0..=max_size {
            let mut parts = Vec::new();
            partitions(n, n, g, &mut parts, &mut out, g);
        }
        out
    }
}

fn partitions(
    remaining: u32,
    max_part: u32,
    slots: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<DominantWeight>,
    g: usize,
) {
    if remaining == 0 {
        out.push(DominantWeight::new(g, current).expect("valid partition"));
        return;
    }
    if slots == 0 {
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        partitions(remaining - part, part, slots - 1, current, out, g);
        current.pop();
    }
}

impl std::fmt::Display for DominantWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(DominantWeight::trivial(3).dimension(), 1);
        assert_eq!(DominantWeight::standard(2).dimension(), 4);
        assert_eq!(DominantWeight::new(2, &[2]).unwrap().dimension(), 10);
        assert_eq!(DominantWeight::new(2, &[1, 1]).unwrap().dimension(), 5);
        assert_eq!(DominantWeight::new(1, &[5]).unwrap().dimension(), 6);
        // Sp(6): Lambda^2_0 V has dimension 14, Lambda^3_0 V has 14
        assert_eq!(DominantWeight::new(3, &[1, 1]).unwrap().dimension(), 14);
        assert_eq!(DominantWeight::new(3, &[1, 1, 1]).unwrap().dimension(), 14);
    }

    #[test]
    fn validation() {
        assert!(DominantWeight::new(1, &[1, 1]).is_err());
        assert!(DominantWeight::new(2, &[1, 2]).is_err());
        assert!(DominantWeight::new(0, &[]).is_err());
        assert_eq!(DominantWeight::new(1, &[2, 0, 0]).unwrap().parts(), &[2]);
    }

    #[test]
    fn enumeration() {
        assert_eq!(DominantWeight::all_up_to(1, 3).len(), 4);
        let w2: Vec<_> = DominantWeight::all_up_to(2, 3).iter().map(|w| w.parts().to_vec()).collect();
        assert_eq!(w2, vec![vec![], vec![1], vec![2], vec![1, 1], vec![3], vec![2, 1]]);
    }
}

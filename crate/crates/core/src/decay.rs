//! Matrix-coefficient decay of cohomological representations and the
//! comparison with the Sarnak–Xue exponent.
//!
//! For `π_B` with a single mixed pair `(a_k, b_k)` the leading exponent is
//! controlled by the ratios `⟨ν₀, ωⱼ⟩ / ⟨ρ₀, ωⱼ⟩ = (N_k − j)/(N − j)` for
//! `j ≤ c_k = min(a_k, b_k)` (and 0 beyond), and `p(π_B) ≤ 2 / (1 − max ratio)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::cohomology::Bipartition;
use crate::error::{Error, Result};
use crate::exact::{integer, rational, Rational};

/// Upper bound for `p(π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PBound {
    Finite(Rational),
    /// Matrix coefficients do not decay (the trivial-representation direction).
    Unbounded,
}

impl PBound {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            PBound::Finite(p) => Some(*p),
            PBound::Unbounded => None,
        }
    }
}

impl fmt::Display for PBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PBound::Finite(p) => write!(f, "{p}"),
            PBound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for PBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayProfile {
    pub n: u32,
    pub n_k: u32,
    pub c: u32,
    pub c_k: u32,
    #[serde(with = "crate::exact::vec_as_str")]
    pub ratios: Vec<Rational>,
    pub p_bound: PBound,
}

impl DecayProfile {
    pub fn max_ratio(&self) -> Rational {
        self.ratios.iter().copied().max().unwrap_or_else(|| integer(0))
    }
}

/// Ratios `(N_k − j)/(N − j)` for `j = 1..=c` (zero past `c_k`) and the
/// resulting bound on `p`.
///
/// Requires `1 ≤ N_k ≤ N`, `2c ≤ N`, `2c_k ≤ N_k` and `c_k ≤ c`.
pub fn ratio_profile(n: u32, n_k: u32, c: u32, c_k: u32) -> Result<DecayProfile> {
    if n_k == 0 || n_k > n || 2 * c > n || 2 * c_k > n_k || c_k > c {
        return Err(Error::OutOfRange(format!(
            "need 1 <= N_k <= N, 2c <= N, 2c_k <= N_k, c_k <= c; got N = {n}, N_k = {n_k}, c = {c}, c_k = {c_k}"
        )));
    }
    let ratios: Vec<Rational> = (1..=c)
        .map(|j| {
            if j <= c_k {
                rational(i128::from(n_k - j), i128::from(n - j))
            } else {
                integer(0)
            }
        })
        .collect();
    let max = ratios.iter().copied().max().unwrap_or_else(|| integer(0));
    let p_bound = if max == integer(1) {
        PBound::Unbounded
    } else {
        let p = (integer(2) / (integer(1) - max)).max(integer(2));
        if c_k >= 1 {
            debug_assert_eq!(p, rational(2 * i128::from(n - 1), i128::from(n - n_k)));
        }
        PBound::Finite(p)
    };
    Ok(DecayProfile {
        n,
        n_k,
        c,
        c_k,
        ratios,
        p_bound,
    })
}

/// `2(N − 1)/(N − N_k)` for a bipartition with exactly one mixed pair.
pub fn p_bound_of_bipartition(bip: &Bipartition) -> Result<PBound> {
    profile_of_bipartition(bip).map(|p| p.p_bound)
}

pub fn profile_of_bipartition(bip: &Bipartition) -> Result<DecayProfile> {
    let mixed: Vec<_> = bip.mixed_pairs().collect();
    let &[(_, (a_k, b_k))] = mixed.as_slice() else {
        return Err(Error::Hypothesis(format!(
            "{bip} has {} pairs with a_i b_i != 0; exactly one is required",
            mixed.len()
        )));
    };
    ratio_profile(bip.rank(), a_k + b_k, bip.a().min(bip.b()), a_k.min(b_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SxCheck {
    pub n: u32,
    pub k: u32,
    /// `N(N − 2k)`.
    pub theorem_exponent: u64,
    /// `(N² − 1) · (N − 2k)/(N − 1)`.
    pub sx_exponent: u64,
    pub holds: bool,
}

/// Compares the growth exponent `N(N − 2k)` with the Sarnak–Xue prediction
/// `(dim G − 1) · 2/p` where `2/p ≥ (N − 2k)/(N − 1)`.
pub fn sx_check(n: u32, k: u32) -> Result<SxCheck> {
    if k == 0 || 2 * k > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= N/2, got N = {n}, k = {k}")));
    }
    let (big, small) = (i128::from(n), i128::from(n - 2 * k));
    let theorem = big * small;
    let sx = integer(big * big - 1) * rational(small, big - 1);
    if !sx.is_integer() {
        return Err(Error::Overflow("Sarnak–Xue exponent is not integral"));
    }
    let sx = sx.to_integer();
    Ok(SxCheck {
        n,
        k,
        theorem_exponent: theorem as u64,
        sx_exponent: sx as u64,
        holds: theorem <= sx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip(pairs: &[(u32, u32)]) -> Bipartition {
        Bipartition::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn profile_examples() {
        let p = ratio_profile(5, 4, 2, 2).unwrap();
        assert_eq!(p.max_ratio(), rational(3, 4));
        assert_eq!(p.ratios, vec![rational(3, 4), rational(2, 3)]);
        assert_eq!(p.p_bound, PBound::Finite(integer(8)));

        let p = ratio_profile(6, 1, 3, 0).unwrap();
        assert!(p.ratios.iter().all(|r| *r == integer(0)));
        assert_eq!(p.p_bound, PBound::Finite(integer(2)));

        let p = ratio_profile(7, 4, 3, 2).unwrap();
        assert_eq!(p.max_ratio(), rational(1, 2));
        assert_eq!(p.ratios[2], integer(0));
        assert_eq!(p.p_bound, PBound::Finite(integer(4)));

        assert_eq!(ratio_profile(4, 4, 2, 2).unwrap().p_bound, PBound::Unbounded);
        assert!(ratio_profile(4, 5, 2, 2).is_err());
    }

    #[test]
    fn bipartition_bounds() {
        assert_eq!(p_bound_of_bipartition(&bip(&[(2, 2), (1, 0)])).unwrap(), PBound::Finite(integer(8)));
        assert!(matches!(
            p_bound_of_bipartition(&bip(&[(1, 0), (0, 1)])),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            p_bound_of_bipartition(&bip(&[(1, 1), (1, 1)])),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(p_bound_of_bipartition(&bip(&[(2, 3)])).unwrap(), PBound::Unbounded);
    }

    #[test]
    fn sx_examples() {
        let c = sx_check(5, 2).unwrap();
        assert_eq!((c.theorem_exponent, c.sx_exponent, c.holds), (5, 6, true));
        let c = sx_check(6, 3).unwrap();
        assert_eq!((c.theorem_exponent, c.sx_exponent, c.holds), (0, 0, true));
        let c = sx_check(9, 1).unwrap();
        assert_eq!((c.theorem_exponent, c.sx_exponent, c.holds), (63, 70, true));
        assert!(sx_check(4, 0).is_err());
        assert!(sx_check(4, 3).is_err());
    }

    #[test]
    fn pbound_json() {
        assert_eq!(serde_json::to_string(&PBound::Finite(rational(8, 3))).unwrap(), "\"8/3\"");
        assert_eq!(serde_json::to_string(&PBound::Unbounded).unwrap(), "\"unbounded\"");
    }
}

//! Elliptic endoscopic data of `U(N)`, the correspondence between `𝒮_ψ` and
//! pairs `(H, ψ^H)`, the dominant group `H_ψ`, Kottwitz signs and the global
//! invariant of inner forms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational, Rational, Sign};
use crate::params::{centralizer_group, is_elliptic, s_psi, ArthurShape, BlockSignVector};

/// The datum `U(n1) × U(n2)` of `U(N)` with `n1 ≥ n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "DatumRepr", try_from = "DatumRepr")]
pub struct EndoscopicDatum {
    n1: u32,
    n2: u32,
}

#[derive(Serialize, Deserialize)]
struct DatumRepr {
    n1: u32,
    n2: u32,
    #[serde(default)]
    kappa: Option<(Sign, Sign)>,
    #[serde(default)]
    proper: Option<bool>,
}

impl From<EndoscopicDatum> for DatumRepr {
    fn from(d: EndoscopicDatum) -> DatumRepr {
        DatumRepr {
            n1: d.n1,
            n2: d.n2,
            kappa: Some(d.kappa()),
            proper: Some(d.is_proper()),
        }
    }
}

impl TryFrom<DatumRepr> for EndoscopicDatum {
    type Error = Error;

    fn try_from(raw: DatumRepr) -> Result<EndoscopicDatum> {
        let d = EndoscopicDatum::new(raw.n1, raw.n2)?;
        if raw.kappa.is_some_and(|k| k != d.kappa()) || raw.proper.is_some_and(|p| p != d.is_proper()) {
            return Err(Error::OutOfRange(format!("inconsistent metadata for datum {d}")));
        }
        Ok(d)
    }
}

impl EndoscopicDatum {
    /// Orders the pair so that `n1 ≥ n2`; rejects `N = 0`.
    pub fn new(x: u32, y: u32) -> Result<EndoscopicDatum> {
        if x + y == 0 {
            return Err(Error::OutOfRange("datum of U(0)".into()));
        }
        Ok(EndoscopicDatum {
            n1: x.max(y),
            n2: x.min(y),
        })
    }

    pub fn improper(n: u32) -> Result<EndoscopicDatum> {
        EndoscopicDatum::new(n, 0)
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn rank(&self) -> u32 {
        self.n1 + self.n2
    }

    /// `((-1)^(N-n1), (-1)^(N-n2))`.
    pub fn kappa(&self) -> (Sign, Sign) {
        let n = i64::from(self.rank());
        (
            Sign::pow_neg_one(n - i64::from(self.n1)),
            Sign::pow_neg_one(n - i64::from(self.n2)),
        )
    }

    pub fn is_proper(&self) -> bool {
        self.n2 > 0
    }
}

impl fmt::Display for EndoscopicDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n1, self.n2)
    }
}

/// A splitting of a shape's summands into the parameters of the two factors.
/// `first` lives on `U(n1)` and `second` on `U(n2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParameterSplit {
    pub first: ArthurShape,
    pub second: ArthurShape,
}

impl ParameterSplit {
    pub fn trivial(shape: &ArthurShape) -> ParameterSplit {
        ParameterSplit {
            first: shape.clone(),
            second: ArthurShape::empty(),
        }
    }
}

impl fmt::Display for ParameterSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} | {{{}}}", self.first, self.second)
    }
}

/// `U(N)` has data `(N − j, j)` for `0 ≤ j ≤ N/2`, the improper one first.
pub fn elliptic_data(n: u32) -> Vec<EndoscopicDatum> {
    (0..=n / 2).map(|j| EndoscopicDatum { n1: n - j, n2: j }).collect()
}

/// `ι(G, H)`: 1 for the improper datum, ¼ for `n1 = n2`, ½ otherwise.
pub fn iota(d: &EndoscopicDatum) -> Rational {
    if d.n2 == 0 {
        rational(1, 1)
    } else if d.n1 == d.n2 {
        rational(1, 4)
    } else {
        rational(1, 2)
    }
}

/// The two sides of a summand mask: `(mask of first, mask of second)`.
///
/// The side with larger rank comes first; on a tie, the side holding summand 0.
pub(crate) fn orient(shape: &ArthurShape, side: u64) -> (u64, u64) {
    let full = if shape.len() >= 64 { u64::MAX } else { (1u64 << shape.len()) - 1 };
    let other = full & !side;
    let rank_of = |mask: u64| shape.select(mask).rank();
    let (rs, ro) = (rank_of(side), rank_of(other));
    let side_first = rs > ro || (rs == ro && side & 1 == 1);
    if side_first {
        (side, other)
    } else {
        (other, side)
    }
}

/// The datum and split attached to a block-sign element of `𝒮_ψ`.
pub fn datum_of(shape: &ArthurShape, s: &BlockSignVector) -> Result<(EndoscopicDatum, ParameterSplit)> {
    if s.len() != shape.len() {
        return Err(Error::RankMismatch {
            expected: shape.len() as u32,
            got: s.len() as u32,
        });
    }
    let (first, second) = orient(shape, s.minus_mask());
    let split = ParameterSplit {
        first: shape.select(first),
        second: shape.select(second),
    };
    let datum = EndoscopicDatum::new(split.first.rank(), split.second.rank())?;
    Ok((datum, split))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionEntry {
    pub element: BlockSignVector,
    pub datum: EndoscopicDatum,
    pub split: ParameterSplit,
}

/// Every `s ∈ 𝒮_ψ` with its `(H, ψ^H)`, ordered by the group-element bit mask.
pub fn bijection(shape: &ArthurShape) -> Result<Vec<BijectionEntry>> {
    if !is_elliptic(shape) {
        return Err(Error::NotElliptic(shape.to_string()));
    }
    let group = centralizer_group(shape)?;
    group
        .elements()
        .map(|e| {
            let element = BlockSignVector::from_element(shape.len(), e)?;
            let (datum, split) = datum_of(shape, &element)?;
            Ok(BijectionEntry { element, datum, split })
        })
        .collect()
}

/// `H_ψ`: the datum at `s_ψ`, separating even-`m` summands from odd-`m` ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantGroup {
    pub datum: EndoscopicDatum,
    pub split: ParameterSplit,
    /// Total rank of the summands with even `m`.
    pub n_even_block: u32,
    /// Total rank of the summands with odd `m`.
    pub n_odd_block: u32,
}

impl DominantGroup {
    pub fn is_whole_group(&self) -> bool {
        !self.datum.is_proper()
    }
}

pub fn dominant_group(shape: &ArthurShape) -> Result<DominantGroup> {
    if !is_elliptic(shape) {
        return Err(Error::NotElliptic(shape.to_string()));
    }
    let (datum, split) = datum_of(shape, &s_psi(shape))?;
    let n_even_block = shape
        .summands()
        .iter()
        .filter(|s| s.m % 2 == 0)
        .map(|s| s.block_rank())
        .sum();
    Ok(DominantGroup {
        datum,
        split,
        n_even_block,
        n_odd_block: shape.rank() - n_even_block,
    })
}

/// `(-1)^(q(G) − q(G*))` at a real place with `q(U(p,q)) = pq`.
pub fn kottwitz_sign_real(p: u32, q: u32) -> Sign {
    let n = i64::from(p + q);
    let quasisplit = ((n + 1) / 2) * (n / 2);
    Sign::pow_neg_one(i64::from(p) * i64::from(q) - quasisplit)
}

/// `(-1)^(rank drop)` at a finite place.
pub fn kottwitz_sign_padic(rank_drop: u32) -> Sign {
    Sign::pow_neg_one(i64::from(rank_drop))
}

/// Local data of a global inner form of `U(N)`: real signatures and the finite
/// places where the form is not quasisplit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerFormSpec {
    pub signatures: Vec<(u32, u32)>,
    pub finite_flips: BTreeSet<u64>,
}

impl InnerFormSpec {
    fn validate(&self, n: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::MalformedInnerForm("N must be positive".into()));
        }
        if let Some(&(p, q)) = self.signatures.iter().find(|(p, q)| p + q != n) {
            return Err(Error::MalformedInnerForm(format!("signature ({p},{q}) is not of rank {n}")));
        }
        Ok(())
    }

    /// Toggle the invariant at a finite place.
    pub fn toggle_place(&mut self, place: u64) {
        if !self.finite_flips.remove(&place) {
            self.finite_flips.insert(place);
        }
    }

    /// Move one real place from `(p, q)` to `(p ± 1, q ∓ 1)`, flipping its invariant.
    pub fn shift_signature(&mut self, index: usize) {
        let (p, q) = &mut self.signatures[index];
        if *q > 0 {
            *p += 1;
            *q -= 1;
        } else {
            *p -= 1;
            *q += 1;
        }
    }

    /// `Σ_v (N/2 + q_v) + #flips mod 2` for `N` even; always 0 for `N` odd.
    pub fn invariant_sum(&self, n: u32) -> u32 {
        if n % 2 == 1 {
            return 0;
        }
        let real: u64 = self.signatures.iter().map(|&(_, q)| u64::from(n / 2 + q)).sum();
        ((real + self.finite_flips.len() as u64) % 2) as u32
    }
}

/// Product of the local Kottwitz signs. Flipped finite places lose one unit
/// of rank when `N` is even; for `N` odd there is nothing to flip.
pub fn kottwitz_product(spec: &InnerFormSpec, n: u32) -> Result<Sign> {
    spec.validate(n)?;
    let mut sign = spec
        .signatures
        .iter()
        .fold(Sign::Plus, |acc, &(p, q)| acc * kottwitz_sign_real(p, q));
    if n % 2 == 0 {
        for _ in &spec.finite_flips {
            sign *= kottwitz_sign_padic(1);
        }
    }
    Ok(sign)
}

/// Whether the local data glue to a global inner form, with the Kottwitz
/// product required to be `+1` as well.
pub fn check_inner_form(spec: &InnerFormSpec, n: u32) -> Result<bool> {
    let product = kottwitz_product(spec, n)?;
    if n % 2 == 1 {
        return Ok(product.is_plus());
    }
    Ok(spec.invariant_sum(n) == 0 && product.is_plus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Summand;

    fn nu(dims: &[u32]) -> ArthurShape {
        ArthurShape::from_sl2_dims(dims).unwrap()
    }

    fn d(n1: u32, n2: u32) -> EndoscopicDatum {
        EndoscopicDatum::new(n1, n2).unwrap()
    }

    #[test]
    fn data_lists() {
        assert_eq!(elliptic_data(1), vec![d(1, 0)]);
        assert_eq!(elliptic_data(5), vec![d(5, 0), d(4, 1), d(3, 2)]);
        assert_eq!(elliptic_data(4), vec![d(4, 0), d(3, 1), d(2, 2)]);
        assert_eq!(d(1, 3), d(3, 1));
    }

    #[test]
    fn iota_table() {
        assert_eq!(iota(&d(6, 0)), rational(1, 1));
        assert_eq!(iota(&d(3, 2)), rational(1, 2));
        assert_eq!(iota(&d(2, 2)), rational(1, 4));
    }

    #[test]
    fn kappa_signs() {
        assert_eq!(d(4, 3).kappa(), (Sign::Minus, Sign::Plus));
        assert_eq!(d(2, 2).kappa(), (Sign::Plus, Sign::Plus));
    }

    #[test]
    fn bijection_examples() {
        let shape = nu(&[4, 1, 1, 1]);
        let entries = bijection(&shape).unwrap();
        assert_eq!(entries.len(), 8);
        assert_eq!(entries[0].datum, d(7, 0));
        assert_eq!(entries[0].split, ParameterSplit::trivial(&shape));
        // minus on ν(4) is (+,-,-,-) canonically, i.e. element 0b111
        let s = BlockSignVector::new(vec![Sign::Minus, Sign::Plus, Sign::Plus, Sign::Plus]);
        let entry = entries.iter().find(|e| e.element == s).unwrap();
        assert_eq!(entry.datum, d(4, 3));
        assert_eq!(entry.split.first, nu(&[4]));
        assert_eq!(entry.split.second.rank(), 3);
        let twice = ArthurShape::new(vec![Summand::nu("x", 1), Summand::nu("x", 1)]).unwrap();
        assert!(bijection(&twice).is_err());
    }

    #[test]
    fn dominant_examples() {
        let bounded = dominant_group(&nu(&[1, 1, 1, 1])).unwrap();
        assert_eq!(bounded.datum, d(4, 0));
        assert!(bounded.is_whole_group());
        let hook = dominant_group(&nu(&[4, 1])).unwrap();
        assert_eq!(hook.datum, d(4, 1));
        assert_eq!(hook.split.first, nu(&[4]));
        assert_eq!((hook.n_even_block, hook.n_odd_block), (4, 1));
        let small = dominant_group(&nu(&[2, 1, 1, 1, 1])).unwrap();
        assert_eq!(small.datum, d(4, 2));
        assert_eq!(small.split.second, nu(&[2]));
        assert_eq!(dominant_group(&nu(&[6])).unwrap().datum, d(6, 0));
    }

    #[test]
    fn real_signs() {
        assert_eq!(kottwitz_sign_real(2, 1), Sign::Plus);
        assert_eq!(kottwitz_sign_real(3, 0), Sign::Plus);
        assert_eq!(kottwitz_sign_real(4, 0), Sign::Plus);
        assert_eq!(kottwitz_sign_real(3, 1), Sign::Minus);
        for n in 0..12 {
            for p in 0..=n {
                assert_eq!(kottwitz_sign_real(p, n - p), kottwitz_sign_real(n - p, p));
            }
        }
    }

    #[test]
    fn padic_signs() {
        assert_eq!(kottwitz_sign_padic(0), Sign::Plus);
        assert_eq!(kottwitz_sign_padic(1), Sign::Minus);
        assert_eq!(kottwitz_sign_padic(2), Sign::Plus);
    }

    #[test]
    fn inner_form_examples() {
        let odd = InnerFormSpec {
            signatures: vec![(3, 0), (2, 1)],
            finite_flips: BTreeSet::new(),
        };
        assert!(check_inner_form(&odd, 3).unwrap());
        let mut even = InnerFormSpec {
            signatures: vec![(2, 0)],
            finite_flips: BTreeSet::from([7]),
        };
        assert!(check_inner_form(&even, 2).unwrap());
        even.toggle_place(7);
        assert!(!check_inner_form(&even, 2).unwrap());
        assert!(check_inner_form(&even, 3).is_err());
    }

    #[test]
    fn datum_json() {
        let text = serde_json::to_string(&d(3, 2)).unwrap();
        assert_eq!(text, r#"{"n1":3,"n2":2,"kappa":[1,-1],"proper":true}"#);
        assert_eq!(serde_json::from_str::<EndoscopicDatum>(&text).unwrap(), d(3, 2));
        assert!(serde_json::from_str::<EndoscopicDatum>(r#"{"n1":3,"n2":2,"proper":false}"#).is_err());
    }
}

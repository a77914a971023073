//! Formal elliptic Arthur parameter shapes and their centralizer 2-groups.
//!
//! A shape is the integer skeleton of a parameter `⊞ μᵢ ⊠ ν(mᵢ)`: each summand
//! carries an opaque label standing for the cuspidal block `μᵢ` (of rank `n`)
//! and the dimension `m` of the Arthur-SL₂ representation. The component group
//! of such a parameter is elementary abelian of rank `r - 1`, realised here as
//! block-sign vectors modulo a global sign.

use std::collections::HashSet;
use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::cohomology::OrderedPartition;
use crate::error::{Error, Result};
use crate::exact::Sign;

/// Largest rank of a component group we are willing to enumerate.
pub const MAX_GROUP_RANK: u32 = 31;

fn default_true() -> bool {
    true
}

fn is_true(value: &bool) -> bool {
    *value
}

/// One block `μ ⊠ ν(m)` with `μ` of rank `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub label: String,
    pub n: u32,
    pub m: u32,
    /// Whether the opaque block is conjugate self-dual; assumed unless stated.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub conjugate_self_dual: bool,
}

impl Summand {
    pub fn new(label: impl Into<String>, n: u32, m: u32) -> Summand {
        Summand {
            label: label.into(),
            n,
            m,
            conjugate_self_dual: true,
        }
    }

    /// `ν(m)` on a rank-one block.
    pub fn nu(label: impl Into<String>, m: u32) -> Summand {
        Summand::new(label, 1, m)
    }

    pub fn block_rank(&self) -> u32 {
        self.n * self.m
    }

    /// Image of `-I` under `ν(m)`: `(-1)^(m+1)`.
    pub fn sl2_sign(&self) -> Sign {
        Sign::pow_neg_one(self.m as i64 + 1)
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}⊠ν({})", self.label, self.m)
        } else {
            write!(f, "{}[{}]⊠ν({})", self.label, self.n, self.m)
        }
    }
}

#[derive(Deserialize)]
struct RawShape {
    summands: Vec<Summand>,
}

/// A formal parameter `⊞ᵢ μᵢ ⊠ ν(mᵢ)`; the total rank is `Σ nᵢmᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawShape")]
pub struct ArthurShape {
    summands: Vec<Summand>,
}

impl TryFrom<RawShape> for ArthurShape {
    type Error = Error;

    fn try_from(raw: RawShape) -> Result<ArthurShape> {
        ArthurShape::new(raw.summands)
    }
}

impl ArthurShape {
    /// Builds a shape, rejecting blocks with `n = 0` or `m = 0`.
    ///
    /// Repeated summands are accepted here; [`is_elliptic`] reports them.
    pub fn new(summands: Vec<Summand>) -> Result<ArthurShape> {
        if let Some(bad) = summands.iter().find(|s| s.n == 0 || s.m == 0) {
            return Err(Error::InvalidShape(format!(
                "summand {} has n = {}, m = {}; both must be positive",
                bad.label, bad.n, bad.m
            )));
        }
        Ok(ArthurShape { summands })
    }

    /// The empty shape on a rank-zero group.
    pub fn empty() -> ArthurShape {
        ArthurShape { summands: Vec::new() }
    }

    /// `ν(m₁) ⊞ ν(m₂) ⊞ …` with labels `mu1, mu2, …`.
    pub fn from_sl2_dims(dims: &[u32]) -> Result<ArthurShape> {
        ArthurShape::new(
            dims.iter()
                .enumerate()
                .map(|(i, &m)| Summand::nu(format!("mu{}", i + 1), m))
                .collect(),
        )
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Number of summands `r`.
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Total rank `N = Σ nᵢmᵢ`.
    pub fn rank(&self) -> u32 {
        self.summands.iter().map(Summand::block_rank).sum()
    }

    /// The sub-shape consisting of the summands whose index bit is set.
    pub fn select(&self, mask: u64) -> ArthurShape {
        ArthurShape {
            summands: self
                .summands
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Concatenation of two shapes.
    pub fn join(&self, other: &ArthurShape) -> ArthurShape {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        ArthurShape { summands }
    }

    pub fn is_bounded(&self) -> bool {
        self.summands.iter().all(|s| s.m == 1)
    }
}

impl fmt::Display for ArthurShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return f.write_str("∅");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊞ ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// An element of `(ℤ/2ℤ)^rank`, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl BitXor for Element {
    type Output = Element;

    fn bitxor(self, rhs: Element) -> Element {
        Element(self.0 ^ rhs.0)
    }
}

/// The elementary abelian group `(ℤ/2ℤ)^rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoGroup {
    rank: u32,
}

impl TwoGroup {
    pub fn new(rank: u32) -> Result<TwoGroup> {
        if rank > MAX_GROUP_RANK {
            return Err(Error::OutOfRange(format!(
                "2-group rank {rank} exceeds {MAX_GROUP_RANK}"
            )));
        }
        Ok(TwoGroup { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn order(&self) -> u64 {
        1u64 << self.rank
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..(1u32 << self.rank)).map(Element)
    }

    pub fn contains(&self, element: Element) -> bool {
        u64::from(element.0) < self.order()
    }

    /// All characters, indexed by their defining bit vectors.
    pub fn characters(&self) -> impl Iterator<Item = GroupChar> + '_ {
        let rank = self.rank;
        (0..(1u32 << rank)).map(move |bits| GroupChar { rank, bits })
    }
}

/// The character `s ↦ (-1)^⟨χ, s⟩` of `(ℤ/2ℤ)^rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupChar {
    pub rank: u32,
    pub bits: u32,
}

impl GroupChar {
    pub fn new(rank: u32, bits: u32) -> Result<GroupChar> {
        if rank > MAX_GROUP_RANK || u64::from(bits) >= 1u64 << rank {
            return Err(Error::InvalidElement(format!(
                "character bits {bits:#b} do not fit rank {rank}"
            )));
        }
        Ok(GroupChar { rank, bits })
    }

    pub fn trivial(rank: u32) -> GroupChar {
        GroupChar { rank, bits: 0 }
    }

    pub fn eval(&self, s: Element) -> Sign {
        Sign::pow_neg_one((self.bits & s.0).count_ones() as i64)
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }
}

/// Block signs `diag(±I_{N₁}, …, ±I_{N_r})` modulo the global sign.
///
/// The canonical representative has `+1` on the first summand; bit `i` of the
/// associated group element is set when summand `i + 1` has sign `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSignVector {
    signs: Vec<Sign>,
}

impl BlockSignVector {
    pub fn new(mut signs: Vec<Sign>) -> BlockSignVector {
        if signs.first() == Some(&Sign::Minus) {
            for s in &mut signs {
                *s = -*s;
            }
        }
        BlockSignVector { signs }
    }

    pub fn identity(len: usize) -> BlockSignVector {
        BlockSignVector {
            signs: vec![Sign::Plus; len],
        }
    }

    pub fn from_element(len: usize, element: Element) -> Result<BlockSignVector> {
        if len == 0 || u64::from(element.0) >= 1u64 << (len - 1) {
            return Err(Error::InvalidElement(format!(
                "element {:#b} does not lie in a group on {len} summands",
                element.0
            )));
        }
        let mut signs = vec![Sign::Plus; len];
        for (i, sign) in signs.iter_mut().enumerate().skip(1) {
            if element.0 >> (i - 1) & 1 == 1 {
                *sign = Sign::Minus;
            }
        }
        Ok(BlockSignVector { signs })
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn to_element(&self) -> Element {
        Element(
            self.signs
                .iter()
                .skip(1)
                .enumerate()
                .filter(|(_, s)| **s == Sign::Minus)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|s| s.is_plus())
    }

    /// Mask of summands carrying `-1` in the canonical representative.
    pub fn minus_mask(&self) -> u64 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Sign::Minus)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

impl fmt::Display for BlockSignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.signs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if s.is_plus() { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// The component group `𝒮_ψ ≅ (ℤ/2ℤ)^(r-1)`.
pub fn centralizer_group(shape: &ArthurShape) -> Result<TwoGroup> {
    if shape.is_empty() {
        return Err(Error::InvalidShape("shape has no summands".into()));
    }
    TwoGroup::new(shape.len() as u32 - 1)
}

/// The distinguished element `s_ψ = ψ(1, -I)`.
pub fn s_psi(shape: &ArthurShape) -> BlockSignVector {
    BlockSignVector::new(shape.summands().iter().map(Summand::sl2_sign).collect())
}

/// Adams–Johnson parameter of a cohomological packet restricted to Arthur SL₂:
/// one rank-one summand `ν(Nᵢ)` per part.
pub fn from_cohomological(partition: &OrderedPartition) -> Result<ArthurShape> {
    if partition.parts().is_empty() {
        return Err(Error::InvalidPartition("empty partition".into()));
    }
    ArthurShape::from_sl2_dims(partition.parts())
}

/// Pairwise distinct summands, each conjugate self-dual.
pub fn is_elliptic(shape: &ArthurShape) -> bool {
    let mut seen = HashSet::new();
    shape
        .summands()
        .iter()
        .all(|s| s.conjugate_self_dual && seen.insert((s.label.as_str(), s.m)))
}

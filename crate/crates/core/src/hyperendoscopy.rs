//! Hyperendoscopic chains and the expansion of stable distributions.
//!
//! A chain starting at a group `H = Πⱼ U(kⱼ)` with an assigned parameter on
//! each factor repeatedly replaces one factor `U(k)` by a proper endoscopic
//! `U(k₁) × U(k₂)` through which the local parameter factors, i.e. the
//! summands on that factor are split into two nonempty sets. Refinements of
//! different factors commute, so a chain is recorded as a binary tree of
//! splits per starting factor; its step list is the preorder traversal.
//!
//! The stable distribution then expands as
//! `S^H = Σ_ℋ ι(ℋ) I^{H_q}` with `ι(ℋ) = (-1)^q Π ι(Hᵢ, Hᵢ₊₁)`, which is the
//! unique solution of `S^G = I^G − Σ_{H proper} ι(G, H) S^H`.

use std::cmp::{Ordering, Reverse};
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::endoscopy::{dominant_group, iota, EndoscopicDatum, ParameterSplit};
use crate::error::{Error, Result};
use crate::exact::{integer, is_dyadic, Rational, Sign};
use crate::params::{is_elliptic, ArthurShape, Summand};

/// Default cap on the number of chains materialised by [`enumerate_chains`].
pub const CHAIN_GUARD: u64 = 1_000_000;

/// Largest number of summands a chain computation accepts.
pub const MAX_SUMMANDS: usize = 24;

/// `U(k₁) × … × U(k_t)`, ranks sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct GroupSymbol {
    ranks: Vec<u32>,
}

impl TryFrom<Vec<u32>> for GroupSymbol {
    type Error = Error;

    fn try_from(ranks: Vec<u32>) -> Result<GroupSymbol> {
        GroupSymbol::new(ranks)
    }
}

impl From<GroupSymbol> for Vec<u32> {
    fn from(g: GroupSymbol) -> Vec<u32> {
        g.ranks
    }
}

impl GroupSymbol {
    pub fn new(mut ranks: Vec<u32>) -> Result<GroupSymbol> {
        if ranks.contains(&0) {
            return Err(Error::OutOfRange(format!("U(0) factor in {ranks:?}")));
        }
        ranks.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GroupSymbol { ranks })
    }

    pub fn unitary(n: u32) -> Result<GroupSymbol> {
        GroupSymbol::new(vec![n])
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `Σ kⱼ²`.
    pub fn dimension(&self) -> u64 {
        self.ranks.iter().map(|&k| u64::from(k) * u64::from(k)).sum()
    }

    pub fn total_rank(&self) -> u32 {
        self.ranks.iter().sum()
    }
}

impl fmt::Display for GroupSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ranks.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.ranks.iter().map(|k| format!("U({k})")).collect();
        f.write_str(&parts.join("×"))
    }
}

/// A group `Πⱼ U(kⱼ)` with a parameter shape on each factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignedGroup {
    factors: Vec<ArthurShape>,
}

impl AssignedGroup {
    /// Factors are put in canonical order (rank decreasing, then by shape).
    /// The union of all summands must be elliptic.
    pub fn new(mut factors: Vec<ArthurShape>) -> Result<AssignedGroup> {
        if factors.is_empty() || factors.iter().any(ArthurShape::is_empty) {
            return Err(Error::InvalidShape("every factor needs at least one summand".into()));
        }
        let all = factors.iter().fold(ArthurShape::empty(), |acc, f| acc.join(f));
        if !is_elliptic(&all) {
            return Err(Error::NotElliptic(all.to_string()));
        }
        if all.len() > MAX_SUMMANDS {
            return Err(Error::OutOfRange(format!(
                "{} summands exceed the limit of {MAX_SUMMANDS}",
                all.len()
            )));
        }
        factors.sort_by(|a, b| b.rank().cmp(&a.rank()).then_with(|| a.cmp(b)));
        Ok(AssignedGroup { factors })
    }

    pub fn single(shape: &ArthurShape) -> Result<AssignedGroup> {
        AssignedGroup::new(vec![shape.clone()])
    }

    /// Checks that the factors realise the declared group.
    pub fn with_symbol(symbol: &GroupSymbol, factors: Vec<ArthurShape>) -> Result<AssignedGroup> {
        let group = AssignedGroup::new(factors)?;
        if group.symbol() != *symbol {
            return Err(Error::InvalidShape(format!(
                "parameter lives on {} but the group is {symbol}",
                group.symbol()
            )));
        }
        Ok(group)
    }

    pub fn factors(&self) -> &[ArthurShape] {
        &self.factors
    }

    pub fn symbol(&self) -> GroupSymbol {
        GroupSymbol {
            ranks: self.factors.iter().map(ArthurShape::rank).collect(),
        }
    }

    /// `I^H` with the parameter split as assigned.
    pub fn term(&self) -> Term {
        Term::new(self.factors.iter().map(Block::of_shape).collect())
    }
}

/// One factor of a terminal group together with the summands living on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub rank: u32,
    pub summands: Vec<Summand>,
}

impl Block {
    fn of_shape(shape: &ArthurShape) -> Block {
        let mut summands = shape.summands().to_vec();
        summands.sort();
        Block {
            rank: shape.rank(),
            summands,
        }
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Block) -> Ordering {
        (Reverse(self.rank), &self.summands).cmp(&(Reverse(other.rank), &other.summands))
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Block) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.summands.iter().map(Summand::to_string).collect();
        write!(f, "U({})[{}]", self.rank, parts.join(", "))
    }
}

/// The symbol `I^{H}_{ψ^H}`: a group with the parameter split over its factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    blocks: Vec<Block>,
}

impl Term {
    pub fn new(mut blocks: Vec<Block>) -> Term {
        blocks.sort();
        Term { blocks }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn symbol(&self) -> GroupSymbol {
        GroupSymbol {
            ranks: self.blocks.iter().map(|b| b.rank).collect(),
        }
    }

    fn product(&self, other: &Term) -> Term {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        Term::new(blocks)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(Block::to_string).collect();
        write!(f, "I[{}]", parts.join(" × "))
    }
}

/// A finite rational combination of [`Term`]s. Zero coefficients are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalDist {
    terms: BTreeMap<Term, Rational>,
}

impl FormalDist {
    pub fn zero() -> FormalDist {
        FormalDist::default()
    }

    pub fn single(term: Term, coefficient: Rational) -> FormalDist {
        let mut d = FormalDist::zero();
        d.add_term(term, coefficient);
        d
    }

    pub fn add_term(&mut self, term: Term, coefficient: Rational) {
        match self.terms.entry(term) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coefficient;
                if *e.get() == integer(0) {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if coefficient != integer(0) {
                    e.insert(coefficient);
                }
            }
        }
    }

    pub fn add(&mut self, other: &FormalDist) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), *c);
        }
    }

    pub fn add_scaled(&mut self, other: &FormalDist, factor: Rational) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), *c * factor);
        }
    }

    pub fn scaled(&self, factor: Rational) -> FormalDist {
        let mut out = FormalDist::zero();
        out.add_scaled(self, factor);
        out
    }

    /// Distribution on the product group: terms multiply blockwise.
    pub fn product(&self, other: &FormalDist) -> FormalDist {
        let mut out = FormalDist::zero();
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                out.add_term(t1.product(t2), *c1 * *c2);
            }
        }
        out
    }

    pub fn coefficient(&self, term: &Term) -> Rational {
        self.terms.get(term).copied().unwrap_or_else(|| integer(0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_dyadic(&self) -> bool {
        self.terms.values().all(is_dyadic)
    }

    /// Coefficients summed by group symbol.
    pub fn by_symbol(&self) -> BTreeMap<GroupSymbol, Rational> {
        let mut out = BTreeMap::new();
        for (t, c) in &self.terms {
            *out.entry(t.symbol()).or_insert_with(|| integer(0)) += *c;
        }
        out
    }
}

impl fmt::Display for FormalDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{c:>8}  {t}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermEntry<'a> {
    group: String,
    blocks: &'a [Block],
    #[serde(with = "crate::exact::as_str")]
    coefficient: Rational,
}

impl Serialize for FormalDist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (t, c) in &self.terms {
            seq.serialize_element(&TermEntry {
                group: t.symbol().to_string(),
                blocks: &t.blocks,
                coefficient: *c,
            })?;
        }
        seq.end()
    }
}

/// One refinement: the factor at position `factor` of the current list is
/// replaced in place by `split.first` followed by `split.second`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub factor: usize,
    pub datum: EndoscopicDatum,
    pub split: ParameterSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperChain {
    pub start: GroupSymbol,
    pub steps: Vec<ChainStep>,
    pub terminal: Term,
}

impl HyperChain {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn terminal_symbol(&self) -> GroupSymbol {
        self.terminal.symbol()
    }
}

/// `ι(ℋ) = (-1)^q Π ι(step)`.
pub fn chain_iota(chain: &HyperChain) -> Rational {
    let sign = Sign::pow_neg_one(chain.depth() as i64).as_rational();
    chain.steps.iter().fold(sign, |acc, s| acc * iota(&s.datum))
}

enum Tree {
    Leaf(u64),
    Node { mask: u64, first: Rc<Tree>, second: Rc<Tree> },
}

impl Tree {
    fn mask(&self) -> u64 {
        match self {
            Tree::Leaf(m) => *m,
            Tree::Node { mask, .. } => *mask,
        }
    }
}

/// Flattened summands of an assigned group; sets of summands are bit masks.
struct Engine {
    summands: Vec<Summand>,
    factor_masks: Vec<u64>,
    trees: HashMap<u64, Vec<Rc<Tree>>>,
    counts: HashMap<u64, u128>,
    stable: HashMap<u64, FormalDist>,
}

impl Engine {
    fn new(group: &AssignedGroup) -> Engine {
        let mut summands = Vec::new();
        let mut factor_masks = Vec::new();
        for f in &group.factors {
            let start = summands.len();
            summands.extend(f.summands().iter().cloned());
            factor_masks.push(((1u64 << f.len()) - 1) << start);
        }
        Engine {
            summands,
            factor_masks,
            trees: HashMap::new(),
            counts: HashMap::new(),
            stable: HashMap::new(),
        }
    }

    fn shape(&self, mask: u64) -> ArthurShape {
        let summands = self
            .summands
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.clone())
            .collect();
        ArthurShape::new(summands).expect("summands were validated")
    }

    fn rank(&self, mask: u64) -> u32 {
        self.summands
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| s.block_rank())
            .sum()
    }

    fn block(&self, mask: u64) -> Block {
        Block::of_shape(&self.shape(mask))
    }

    /// Unordered proper splits of `mask`, each oriented as `(first, second)`:
    /// larger rank first, and on a tie the part holding the lowest summand.
    fn proper_splits(&self, mask: u64) -> Vec<(u64, u64)> {
        let low = mask & mask.wrapping_neg();
        let rest = mask & !low;
        let mut out = Vec::new();
        // enumerate subsets of `rest`; the part containing `low` is low | sub
        let mut sub = rest;
        loop {
            let with_low = low | sub;
            if with_low != mask {
                let other = mask & !with_low;
                let (rl, ro) = (self.rank(with_low), self.rank(other));
                out.push(if rl >= ro { (with_low, other) } else { (other, with_low) });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        out.sort_unstable();
        out
    }

    fn split_iota(&self, first: u64, second: u64) -> (EndoscopicDatum, Rational) {
        let datum = EndoscopicDatum::new(self.rank(first), self.rank(second)).expect("positive rank");
        (datum, iota(&datum))
    }

    fn count(&mut self, mask: u64) -> u128 {
        if let Some(&c) = self.counts.get(&mask) {
            return c;
        }
        let mut total: u128 = 1;
        for (a, b) in self.proper_splits(mask) {
            let product = self.count(a).saturating_mul(self.count(b));
            total = total.saturating_add(product);
        }
        self.counts.insert(mask, total);
        total
    }

    fn trees(&mut self, mask: u64) -> Vec<Rc<Tree>> {
        if let Some(t) = self.trees.get(&mask) {
            return t.clone();
        }
        let mut out = vec![Rc::new(Tree::Leaf(mask))];
        for (a, b) in self.proper_splits(mask) {
            let left = self.trees(a);
            let right = self.trees(b);
            for l in &left {
                for r in &right {
                    out.push(Rc::new(Tree::Node {
                        mask,
                        first: l.clone(),
                        second: r.clone(),
                    }));
                }
            }
        }
        self.trees.insert(mask, out.clone());
        out
    }

    /// Appends the preorder steps of `tree` sitting at position `pos`;
    /// returns the number of factors it ends up occupying.
    fn emit(&self, tree: &Tree, pos: usize, steps: &mut Vec<ChainStep>, leaves: &mut Vec<u64>) -> usize {
        match tree {
            Tree::Leaf(m) => {
                leaves.push(*m);
                1
            }
            Tree::Node { first, second, .. } => {
                let (datum, _) = self.split_iota(first.mask(), second.mask());
                steps.push(ChainStep {
                    factor: pos,
                    datum,
                    split: ParameterSplit {
                        first: self.shape(first.mask()),
                        second: self.shape(second.mask()),
                    },
                });
                let used = self.emit(first, pos, steps, leaves);
                used + self.emit(second, pos + used, steps, leaves)
            }
        }
    }

    /// Terminal groups reachable from `mask`, with the number of chains reaching each.
    fn census(&mut self, mask: u64, memo: &mut HashMap<u64, BTreeMap<Vec<u32>, u128>>) -> BTreeMap<Vec<u32>, u128> {
        if let Some(c) = memo.get(&mask) {
            return c.clone();
        }
        let mut out = BTreeMap::new();
        out.insert(vec![self.rank(mask)], 1u128);
        for (a, b) in self.proper_splits(mask) {
            let left = self.census(a, memo);
            let right = self.census(b, memo);
            for (ra, ca) in &left {
                for (rb, cb) in &right {
                    let mut ranks = ra.clone();
                    ranks.extend_from_slice(rb);
                    ranks.sort_unstable_by(|x, y| y.cmp(x));
                    let slot = out.entry(ranks).or_insert(0u128);
                    *slot = slot.saturating_add(ca.saturating_mul(*cb));
                }
            }
        }
        memo.insert(mask, out.clone());
        out
    }

    fn chain_count(&mut self, masks: &[u64]) -> u128 {
        masks
            .iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(self.count(m)))
    }

    fn chains(&mut self, masks: &[u64], guard: u64) -> Result<Vec<HyperChain>> {
        let size = self.chain_count(masks);
        if size > u128::from(guard) {
            return Err(Error::GuardExceeded {
                size: u64::try_from(size).unwrap_or(u64::MAX),
                cap: guard,
            });
        }
        let start = GroupSymbol::new(masks.iter().map(|&m| self.rank(m)).collect())?;
        let per_factor: Vec<Vec<Rc<Tree>>> = masks.iter().map(|&m| self.trees(m)).collect();
        let mut out = Vec::with_capacity(size as usize);
        let mut index = vec![0usize; per_factor.len()];
        loop {
            let mut steps = Vec::new();
            let mut leaves = Vec::new();
            let mut pos = 0;
            for (trees, &i) in per_factor.iter().zip(&index) {
                pos += self.emit(&trees[i], pos, &mut steps, &mut leaves);
            }
            out.push(HyperChain {
                start: start.clone(),
                steps,
                terminal: Term::new(leaves.iter().map(|&m| self.block(m)).collect()),
            });
            let mut k = 0;
            loop {
                if k == index.len() {
                    return Ok(out);
                }
                index[k] += 1;
                if index[k] < per_factor[k].len() {
                    break;
                }
                index[k] = 0;
                k += 1;
            }
        }
    }

    fn chain_sum(&mut self, masks: &[u64], guard: u64) -> Result<FormalDist> {
        let mut out = FormalDist::zero();
        for chain in self.chains(masks, guard)? {
            out.add_term(chain.terminal.clone(), chain_iota(&chain));
        }
        Ok(out)
    }

    /// `S(M) = I(M) − Σ ι · S(A) · S(B)` over proper splits `{A, B}` of `M`.
    fn stable(&mut self, mask: u64) -> FormalDist {
        if let Some(d) = self.stable.get(&mask) {
            return d.clone();
        }
        let mut out = FormalDist::single(Term::new(vec![self.block(mask)]), integer(1));
        for (a, b) in self.proper_splits(mask) {
            let (_, i) = self.split_iota(a, b);
            let product = self.stable(a).product(&self.stable(b));
            out.add_scaled(&product, -i);
        }
        self.stable.insert(mask, out.clone());
        out
    }

    fn stable_product(&mut self, masks: &[u64]) -> FormalDist {
        masks.iter().fold(
            FormalDist::single(Term::new(Vec::new()), integer(1)),
            |acc, &m| acc.product(&self.stable(m)),
        )
    }
}

/// All chains from `group`, the trivial one first.
pub fn enumerate_chains(group: &AssignedGroup) -> Result<Vec<HyperChain>> {
    enumerate_chains_with_guard(group, CHAIN_GUARD)
}

pub fn enumerate_chains_with_guard(group: &AssignedGroup, guard: u64) -> Result<Vec<HyperChain>> {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    engine.chains(&masks, guard)
}

/// Number of chains without materialising them.
pub fn count_chains(group: &AssignedGroup) -> u128 {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    engine.chain_count(&masks)
}

/// For each factor of `group` (in canonical order), the terminal groups its
/// chains reach together with how many chains reach each of them.
pub fn factor_census(group: &AssignedGroup) -> Vec<BTreeMap<GroupSymbol, u128>> {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    let mut memo = HashMap::new();
    masks
        .iter()
        .map(|&m| {
            engine
                .census(m, &mut memo)
                .into_iter()
                .map(|(ranks, c)| (GroupSymbol { ranks }, c))
                .collect()
        })
        .collect()
}

/// `Σ_ℋ ι(ℋ) I^{H_q}` by explicit enumeration.
pub fn chain_sum(group: &AssignedGroup) -> Result<FormalDist> {
    chain_sum_with_guard(group, CHAIN_GUARD)
}

pub fn chain_sum_with_guard(group: &AssignedGroup, guard: u64) -> Result<FormalDist> {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    engine.chain_sum(&masks, guard)
}

/// `S^H` resolved into `I`-terms by the defining recursion, factor by factor.
pub fn expand_stable(group: &AssignedGroup) -> FormalDist {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    engine.stable_product(&masks)
}

/// Checks the chain expansion against the recursion and the inversion
/// `I^G = Σ_{H} ι(G, H) S^H` over all data `H` of `G` (the improper one
/// included), with every `S^H` taken from chain enumeration. On a product
/// group the data are tuples of data of the factors with `ι` multiplicative.
pub fn verify_inversion(group: &AssignedGroup) -> Result<bool> {
    verify_inversion_with_guard(group, CHAIN_GUARD)
}

pub fn verify_inversion_with_guard(group: &AssignedGroup, guard: u64) -> Result<bool> {
    let mut engine = Engine::new(group);
    let masks = engine.factor_masks.clone();
    let chains = engine.chain_sum(&masks, guard)?;
    if chains != engine.stable_product(&masks) || !chains.is_dyadic() {
        return Ok(false);
    }
    if chains.coefficient(&group.term()) != integer(1) {
        return Ok(false);
    }

    // each factor either stays or splits once
    let options: Vec<Vec<(Vec<u64>, Rational)>> = masks
        .iter()
        .map(|&m| {
            let mut opts = vec![(vec![m], integer(1))];
            for (a, b) in engine.proper_splits(m) {
                let (_, i) = engine.split_iota(a, b);
                opts.push((vec![a, b], i));
            }
            opts
        })
        .collect();
    let mut total = FormalDist::zero();
    let mut index = vec![0usize; options.len()];
    loop {
        let mut sub = Vec::new();
        let mut weight = integer(1);
        for (opts, &i) in options.iter().zip(&index) {
            sub.extend_from_slice(&opts[i].0);
            weight *= opts[i].1;
        }
        total.add_scaled(&engine.chain_sum(&sub, guard)?, weight);
        let mut k = 0;
        loop {
            if k == index.len() {
                return Ok(total == FormalDist::single(group.term(), integer(1)));
            }
            index[k] += 1;
            if index[k] < options[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

/// The part of the expansion selected by `s_ψ`: `ι(G, H_ψ)` times the
/// expansion of `S^{H_ψ}` with the dominant split held fixed.
pub fn dominant_contribution(shape: &ArthurShape) -> Result<FormalDist> {
    let dominant = dominant_group(shape)?;
    if dominant.is_whole_group() {
        return Ok(expand_stable(&AssignedGroup::single(shape)?));
    }
    let h = AssignedGroup::new(vec![dominant.split.first, dominant.split.second])?;
    Ok(expand_stable(&h).scaled(iota(&dominant.datum)))
}

/// Chains of `H_ψ` (or of `G` when `s_ψ` is trivial) with the dominant split fixed.
pub fn dominant_chains(shape: &ArthurShape) -> Result<Vec<HyperChain>> {
    let dominant = dominant_group(shape)?;
    let group = if dominant.is_whole_group() {
        AssignedGroup::single(shape)?
    } else {
        AssignedGroup::new(vec![dominant.split.first, dominant.split.second])?
    };
    enumerate_chains(&group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    fn nu(dims: &[u32]) -> ArthurShape {
        ArthurShape::from_sl2_dims(dims).unwrap()
    }

    fn labelled(prefix: &str, dims: &[u32]) -> ArthurShape {
        ArthurShape::new(
            dims.iter()
                .enumerate()
                .map(|(i, &m)| Summand::nu(format!("{prefix}{i}"), m))
                .collect(),
        )
        .unwrap()
    }

    fn sym(ranks: &[u32]) -> GroupSymbol {
        GroupSymbol::new(ranks.to_vec()).unwrap()
    }

    #[test]
    fn symbols() {
        assert_eq!(sym(&[1, 2, 1]).ranks(), &[2, 1, 1]);
        assert_eq!(sym(&[2, 1]).to_string(), "U(2)×U(1)");
        assert_eq!(sym(&[3, 1]).dimension(), 10);
        assert!(GroupSymbol::new(vec![0]).is_err());
    }

    #[test]
    fn chain_examples() {
        let g1 = AssignedGroup::single(&nu(&[1])).unwrap();
        assert_eq!(enumerate_chains(&g1).unwrap().len(), 1);

        let g2 = AssignedGroup::single(&nu(&[1, 1])).unwrap();
        let chains = enumerate_chains(&g2).unwrap();
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[1].terminal_symbol(), sym(&[1, 1]));
        assert_eq!(chain_iota(&chains[0]), integer(1));
        assert_eq!(chain_iota(&chains[1]), rational(-1, 4));

        let g3 = AssignedGroup::single(&nu(&[1, 1, 1])).unwrap();
        let chains = enumerate_chains(&g3).unwrap();
        let by_depth = |d: usize| chains.iter().filter(|c| c.depth() == d).count();
        assert_eq!((by_depth(0), by_depth(1), by_depth(2)), (1, 3, 3));
        for c in chains.iter().filter(|c| c.depth() == 2) {
            assert_eq!(chain_iota(c), rational(1, 8));
            assert_eq!(c.steps[0].datum, EndoscopicDatum::new(2, 1).unwrap());
            assert_eq!(c.steps[1].factor, 0);
        }
    }

    #[test]
    fn chain_counts() {
        let expected = [1u128, 2, 7, 41, 346, 3797];
        for (r, &want) in expected.iter().enumerate() {
            let g = AssignedGroup::single(&nu(&vec![1; r + 1])).unwrap();
            assert_eq!(count_chains(&g), want);
        }
        let g = AssignedGroup::single(&nu(&[1; 4])).unwrap();
        assert_eq!(enumerate_chains(&g).unwrap().len(), 41);
        assert!(matches!(
            enumerate_chains_with_guard(&g, 40),
            Err(Error::GuardExceeded { size: 41, cap: 40 })
        ));
    }

    #[test]
    fn census_matches_enumeration() {
        let g = AssignedGroup::new(vec![nu(&[4]), labelled("b", &[1, 1, 1])]).unwrap();
        let census = factor_census(&g);
        assert_eq!(census.len(), 2);
        assert_eq!(census[0].len(), 1);
        assert_eq!(census[0][&sym(&[4])], 1);
        assert_eq!(census[1][&sym(&[3])], 1);
        assert_eq!(census[1][&sym(&[2, 1])], 3);
        assert_eq!(census[1][&sym(&[1, 1, 1])], 3);
        let total: u128 = census[1].values().sum();
        assert_eq!(total, count_chains(&g));
    }

    #[test]
    fn step_positions_follow_preorder() {
        let g = AssignedGroup::single(&nu(&[1, 1, 1, 1])).unwrap();
        for chain in enumerate_chains(&g).unwrap() {
            let mut factors = vec![g.factors()[0].clone()];
            for step in &chain.steps {
                let mut before = factors[step.factor].summands().to_vec();
                let mut after = step.split.first.join(&step.split.second).summands().to_vec();
                before.sort();
                after.sort();
                assert_eq!(before, after);
                factors.splice(step.factor..=step.factor, [step.split.first.clone(), step.split.second.clone()]);
            }
            let terminal = Term::new(factors.iter().map(Block::of_shape).collect());
            assert_eq!(terminal, chain.terminal);
        }
    }

    #[test]
    fn expansion_examples() {
        let g = AssignedGroup::single(&nu(&[5])).unwrap();
        let e = expand_stable(&g);
        assert_eq!(e.len(), 1);
        assert_eq!(e.coefficient(&g.term()), integer(1));

        let g = AssignedGroup::single(&nu(&[1, 1])).unwrap();
        let by = expand_stable(&g).by_symbol();
        assert_eq!(by[&sym(&[2])], integer(1));
        assert_eq!(by[&sym(&[1, 1])], rational(-1, 4));

        let g = AssignedGroup::single(&nu(&[1, 1, 1])).unwrap();
        let e = expand_stable(&g);
        assert_eq!(e, chain_sum(&g).unwrap());
        let by = e.by_symbol();
        assert_eq!(by[&sym(&[3])], integer(1));
        assert_eq!(by[&sym(&[2, 1])], rational(-3, 2));
        assert_eq!(by[&sym(&[1, 1, 1])], rational(3, 8));
        assert_eq!(e.len(), 5);
    }

    #[test]
    fn inversion_examples() {
        assert!(verify_inversion(&AssignedGroup::single(&nu(&[3])).unwrap()).unwrap());
        assert!(verify_inversion(&AssignedGroup::single(&nu(&[2, 1, 1, 1])).unwrap()).unwrap());
        let product = AssignedGroup::new(vec![labelled("a", &[1, 1]), labelled("b", &[1, 1])]).unwrap();
        assert_eq!(product.symbol(), sym(&[2, 2]));
        assert!(verify_inversion(&product).unwrap());
        let e = expand_stable(&product);
        assert_eq!(e.by_symbol()[&sym(&[1, 1, 1, 1])], rational(1, 16));
    }

    #[test]
    fn assignment_checks() {
        assert!(AssignedGroup::with_symbol(&sym(&[3]), vec![nu(&[2, 1])]).is_ok());
        assert!(AssignedGroup::with_symbol(&sym(&[2, 1]), vec![nu(&[2, 1])]).is_err());
        assert!(AssignedGroup::new(vec![nu(&[1]), nu(&[1])]).is_err());
    }

    #[test]
    fn dominant_examples() {
        let d = dominant_contribution(&nu(&[2, 1])).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.by_symbol()[&sym(&[2, 1])], rational(1, 2));

        let shape = nu(&[1, 1, 1]);
        assert_eq!(
            dominant_contribution(&shape).unwrap(),
            expand_stable(&AssignedGroup::single(&shape).unwrap())
        );

        // ν(4) stays whole on U(4); only the ν(1)² factor refines
        let d = dominant_contribution(&nu(&[4, 1, 1])).unwrap();
        let by = d.by_symbol();
        assert_eq!(by[&sym(&[4, 2])], rational(1, 2));
        assert_eq!(by[&sym(&[4, 1, 1])], rational(-1, 8));
        assert_eq!(by.len(), 2);
    }
}

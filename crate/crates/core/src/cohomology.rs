//! Cohomological representations of `U(a, b)` labelled by bipartitions, their
//! Adams–Johnson packets, and Poincaré polynomials of `(𝔤, K)`-cohomology.
//!
//! For a bipartition `B = ((a₁,b₁), …, (a_r,b_r))` the cohomology of `π_B` is
//! `t^R · Πᵢ [aᵢ+bᵢ choose aᵢ]_{t²}` with `R = ab − Σ aᵢbᵢ`, the Gaussian
//! binomials being Poincaré polynomials of the compact duals `Gr(aᵢ, aᵢ+bᵢ)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of Schubert-cell tuples `brute_poincare` visits.
pub const BRUTE_GUARD: u64 = 1_000_000;

/// Largest `n` accepted by [`gaussian_binomial`]; keeps every coefficient below `2^63`.
pub const MAX_GAUSSIAN_N: u32 = 62;

/// A composition `(N₁, …, N_r)` of `N` into positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct OrderedPartition {
    parts: Vec<u32>,
}

impl TryFrom<Vec<u32>> for OrderedPartition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<OrderedPartition> {
        OrderedPartition::new(parts)
    }
}

impl From<OrderedPartition> for Vec<u32> {
    fn from(p: OrderedPartition) -> Vec<u32> {
        p.parts
    }
}

impl OrderedPartition {
    pub fn new(parts: Vec<u32>) -> Result<OrderedPartition> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        Ok(OrderedPartition { parts })
    }

    /// `(2k, 1, …, 1)` of total `n`; `k = 0` gives `(1ⁿ)`.
    pub fn hook(n: u32, k: u32) -> Result<OrderedPartition> {
        if n == 0 || 2 * k > n {
            return Err(Error::OutOfRange(format!("need 0 <= 2k <= N, got N = {n}, k = {k}")));
        }
        let mut parts = Vec::with_capacity((n - 2 * k + 1) as usize);
        if k > 0 {
            parts.push(2 * k);
        }
        parts.extend(std::iter::repeat(1).take((n - 2 * k) as usize));
        OrderedPartition::new(parts)
    }

    /// Parse a comma separated list such as `2,1,1`.
    pub fn parse(text: &str) -> Result<OrderedPartition> {
        let parts = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidPartition(format!("bad part {p:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        OrderedPartition::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBipartition {
    Pairs(Vec<(u32, u32)>),
    Object { pairs: Vec<(u32, u32)> },
}

/// An ordered list of pairs `(aᵢ, bᵢ)`, none equal to `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawBipartition")]
pub struct Bipartition {
    pairs: Vec<(u32, u32)>,
}

impl TryFrom<RawBipartition> for Bipartition {
    type Error = Error;

    fn try_from(raw: RawBipartition) -> Result<Bipartition> {
        match raw {
            RawBipartition::Pairs(pairs) | RawBipartition::Object { pairs } => Bipartition::new(pairs),
        }
    }
}

impl Bipartition {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Bipartition> {
        if pairs.is_empty() {
            return Err(Error::InvalidBipartition("no pairs".into()));
        }
        if pairs.contains(&(0, 0)) {
            return Err(Error::InvalidBipartition(format!("(0,0) pair in {pairs:?}")));
        }
        Ok(Bipartition { pairs })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn a(&self) -> u32 {
        self.pairs.iter().map(|p| p.0).sum()
    }

    pub fn b(&self) -> u32 {
        self.pairs.iter().map(|p| p.1).sum()
    }

    pub fn rank(&self) -> u32 {
        self.a() + self.b()
    }

    /// `P_B = (a₁+b₁, …, a_r+b_r)`.
    pub fn partition(&self) -> OrderedPartition {
        OrderedPartition {
            parts: self.pairs.iter().map(|(a, b)| a + b).collect(),
        }
    }

    /// Pairs with `aᵢbᵢ ≠ 0`.
    pub fn mixed_pairs(&self) -> impl Iterator<Item = (usize, (u32, u32))> + '_ {
        self.pairs
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, (a, b))| a * b != 0)
    }

    pub fn is_reduced(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| a * b != 0 || a + b == 1)
    }

    /// Splits each zero-pair `(x, 0)` or `(0, y)` into unit pairs in place.
    pub fn reduce(&self) -> Bipartition {
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for &(a, b) in &self.pairs {
            match (a, b) {
                (x, 0) => pairs.extend(std::iter::repeat((1, 0)).take(x as usize)),
                (0, y) => pairs.extend(std::iter::repeat((0, 1)).take(y as usize)),
                pair => pairs.push(pair),
            }
        }
        Bipartition { pairs }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str(")")
    }
}

/// A polynomial in `t` with nonnegative integer coefficients; `coeffs[i]` is the
/// coefficient of `t^i`. Trailing zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PoincarePoly {
    coeffs: Vec<u64>,
}

impl PoincarePoly {
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> PoincarePoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PoincarePoly { coeffs }
    }

    pub fn zero() -> PoincarePoly {
        PoincarePoly { coeffs: Vec::new() }
    }

    pub fn one() -> PoincarePoly {
        PoincarePoly { coeffs: vec![1] }
    }

    pub fn monomial(degree: usize) -> PoincarePoly {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = 1;
        PoincarePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> u64 {
        self.coeffs.get(degree).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn checked_mul(&self, other: &PoincarePoly) -> Result<PoincarePoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(PoincarePoly::zero());
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                let term = x.checked_mul(y).ok_or(Error::Overflow("polynomial product"))?;
                coeffs[i + j] = coeffs[i + j]
                    .checked_add(term)
                    .ok_or(Error::Overflow("polynomial product"))?;
            }
        }
        Ok(PoincarePoly::from_coeffs(coeffs))
    }

    pub fn checked_add(&self, other: &PoincarePoly) -> Result<PoincarePoly> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeff(i)
                    .checked_add(other.coeff(i))
                    .ok_or(Error::Overflow("polynomial sum"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PoincarePoly::from_coeffs(coeffs))
    }

    /// Multiply by `t^by`.
    pub fn shift(&self, by: usize) -> PoincarePoly {
        if self.is_zero() {
            return PoincarePoly::zero();
        }
        let mut coeffs = vec![0; by];
        coeffs.extend_from_slice(&self.coeffs);
        PoincarePoly { coeffs }
    }

    /// Substitute `t ↦ t^factor`.
    pub fn stretch(&self, factor: usize) -> PoincarePoly {
        assert!(factor > 0, "stretch factor must be positive");
        let Some(deg) = self.degree() else {
            return PoincarePoly::zero();
        };
        let mut coeffs = vec![0; deg * factor + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * factor] = c;
        }
        PoincarePoly { coeffs }
    }

    /// Sum of coefficients, i.e. the value at `t = 1`.
    pub fn eval_at_one(&self) -> u128 {
        self.coeffs.iter().map(|&c| u128::from(c)).sum()
    }

    /// Symmetric about the midpoint of its lowest and highest degrees.
    pub fn is_palindromic(&self) -> bool {
        match (self.low_degree(), self.degree()) {
            (Some(lo), Some(hi)) => (lo..=hi).all(|i| self.coeffs[i] == self.coeffs[lo + hi - i]),
            _ => true,
        }
    }
}

impl fmt::Display for PoincarePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("t")?,
                (1, c) => write!(f, "{c}t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// One member of a nominal packet. Non-reduced members point at the reduced
/// bipartition labelling the same representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketMember {
    pub bipartition: Bipartition,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duplicate_of: Option<Bipartition>,
}

impl PacketMember {
    fn new(bipartition: Bipartition) -> PacketMember {
        let duplicate_of = (!bipartition.is_reduced()).then(|| bipartition.reduce());
        PacketMember {
            bipartition,
            duplicate_of,
        }
    }
}

fn check_feasible(a: u32, b: u32, p: &OrderedPartition) -> Result<()> {
    if p.total() != a + b {
        return Err(Error::InvalidPartition(format!(
            "{p} has total {} but a + b = {}",
            p.total(),
            a + b
        )));
    }
    Ok(())
}

/// Bipartitions of `(a, b)`.
///
/// With a partition `P`, every `B` with `aᵢ + bᵢ = Nᵢ`; without one, every
/// reduced bipartition. Output is in lexicographic order on the pair lists.
pub fn enumerate_bipartitions(a: u32, b: u32, p: Option<&OrderedPartition>) -> Result<Vec<Bipartition>> {
    if a + b == 0 {
        return Err(Error::OutOfRange("a + b must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    match p {
        Some(p) => {
            check_feasible(a, b, p)?;
            fill_shaped(p.parts(), a, &mut current, &mut out);
        }
        None => fill_reduced(a, b, &mut current, &mut out),
    }
    Ok(out)
}

fn fill_shaped(parts: &[u32], a_left: u32, current: &mut Vec<(u32, u32)>, out: &mut Vec<Bipartition>) {
    let Some((&n, rest)) = parts.split_first() else {
        if a_left == 0 {
            out.push(Bipartition {
                pairs: current.clone(),
            });
        }
        return;
    };
    let rest_total: u32 = rest.iter().sum();
    // aᵢ must leave room for the remaining a-budget in the later blocks
    let lo = a_left.saturating_sub(rest_total);
    for x in lo..=n.min(a_left) {
        current.push((x, n - x));
        fill_shaped(rest, a_left - x, current, out);
        current.pop();
    }
}

fn fill_reduced(a_left: u32, b_left: u32, current: &mut Vec<(u32, u32)>, out: &mut Vec<Bipartition>) {
    if a_left == 0 && b_left == 0 {
        out.push(Bipartition {
            pairs: current.clone(),
        });
        return;
    }
    for x in 0..=a_left {
        for y in 0..=b_left {
            let unit_or_mixed = x * y != 0 || x + y == 1;
            if !unit_or_mixed {
                continue;
            }
            current.push((x, y));
            fill_reduced(a_left - x, b_left - y, current, out);
            current.pop();
        }
    }
}

/// All compositions of `n`, in lexicographic order.
pub fn compositions(n: u32) -> Vec<OrderedPartition> {
    fn go(left: u32, current: &mut Vec<u32>, out: &mut Vec<OrderedPartition>) {
        if left == 0 {
            out.push(OrderedPartition { parts: current.clone() });
            return;
        }
        for part in 1..=left {
            current.push(part);
            go(left - part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, &mut Vec::new(), &mut out);
    }
    out
}

/// Partitions of `n` with parts in decreasing order.
pub fn integer_partitions(n: u32) -> Vec<OrderedPartition> {
    fn go(left: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<OrderedPartition>) {
        if left == 0 {
            out.push(OrderedPartition { parts: current.clone() });
            return;
        }
        for part in (1..=left.min(max)).rev() {
            current.push(part);
            go(left - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// `R = ab − Σ aᵢbᵢ`, the lowest degree in which `π_B` has cohomology.
pub fn degree_r(bip: &Bipartition) -> u64 {
    let (a, b) = (u64::from(bip.a()), u64::from(bip.b()));
    a * b - bip.pairs.iter().map(|&(x, y)| u64::from(x) * u64::from(y)).sum::<u64>()
}

/// Lowest cohomological degree over the packet of `ν(2k) ⊕ ν(1)^{N−2k}` on
/// `U(a, b)`: `a(N − 2k)` when `a ≤ k`, and `ab − k²` when `k ≤ a`.
pub fn lowest_degree(a: u32, b: u32, k: u32) -> Result<u64> {
    let n = a + b;
    if a > b || 2 * k > n || n == 0 {
        return Err(Error::OutOfRange(format!(
            "need a <= b and 2k <= a + b, got a = {a}, b = {b}, k = {k}"
        )));
    }
    let (a, b, k, n) = (u64::from(a), u64::from(b), u64::from(k), u64::from(n));
    Ok(if a <= k { a * (n - 2 * k) } else { a * b - k * k })
}

/// `[n choose k]_q` via `[n,k] = [n−1,k−1] + q^k [n−1,k]`.
pub fn gaussian_binomial(n: u32, k: u32) -> Result<PoincarePoly> {
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
    }
    if n > MAX_GAUSSIAN_N {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {MAX_GAUSSIAN_N}")));
    }
    let k = k.min(n - k) as usize;
    // row[j] holds [m choose j] for the current m
    let mut row: Vec<PoincarePoly> = vec![PoincarePoly::one()];
    for m in 1..=n as usize {
        let mut next = Vec::with_capacity(row.len() + 1);
        for j in 0..=m.min(k) {
            let left = if j > 0 { row.get(j - 1).cloned() } else { None };
            let right = row.get(j).map(|p| p.shift(j));
            next.push(match (left, right) {
                (Some(l), Some(r)) => l.checked_add(&r)?,
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => PoincarePoly::zero(),
            });
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}

/// `t^R · Πᵢ [aᵢ+bᵢ choose aᵢ]_{t²}`.
pub fn poincare_poly(bip: &Bipartition) -> Result<PoincarePoly> {
    let mut poly = PoincarePoly::monomial(degree_r(bip) as usize);
    for &(a, b) in bip.pairs() {
        poly = poly.checked_mul(&gaussian_binomial(a + b, a)?.stretch(2))?;
    }
    Ok(poly)
}

/// Areas of all partitions fitting in a `rows × cols` box.
fn box_partition_areas(rows: u32, cols: u32) -> Vec<u64> {
    fn go(rows_left: u32, max_part: u32, area: u64, out: &mut Vec<u64>) {
        if rows_left == 0 {
            out.push(area);
            return;
        }
        for part in 0..=max_part {
            go(rows_left - 1, part, area + u64::from(part), out);
        }
    }
    let mut out = Vec::new();
    go(rows, cols, 0, &mut out);
    out
}

/// Independent oracle for [`poincare_poly`] with the default guard.
pub fn brute_poincare(bip: &Bipartition) -> Result<PoincarePoly> {
    brute_poincare_with_guard(bip, BRUTE_GUARD)
}

/// Counts tuples of Schubert cells (one box partition per pair) by total
/// real dimension `R + 2 Σ area`. Refuses to visit more than `guard` tuples.
pub fn brute_poincare_with_guard(bip: &Bipartition, guard: u64) -> Result<PoincarePoly> {
    let cells: Vec<Vec<u64>> = bip
        .pairs()
        .iter()
        .map(|&(a, b)| box_partition_areas(a, b))
        .collect();
    let size = cells
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if size > guard {
        return Err(Error::GuardExceeded { size, cap: guard });
    }
    let r = degree_r(bip);
    let mut counts: Vec<u64> = Vec::new();
    let mut index = vec![0usize; cells.len()];
    loop {
        let area: u64 = index.iter().zip(&cells).map(|(&i, c)| c[i]).sum();
        let degree = (r + 2 * area) as usize;
        if counts.len() <= degree {
            counts.resize(degree + 1, 0);
        }
        counts[degree] += 1;
        // odometer step
        let mut pos = 0;
        loop {
            if pos == cells.len() {
                return Ok(PoincarePoly::from_coeffs(counts));
            }
            index[pos] += 1;
            if index[pos] < cells[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

/// The nominal packet `Π_P` on `U(a, b)`.
pub fn packet_of(p: &OrderedPartition, a: u32, b: u32) -> Result<Vec<PacketMember>> {
    Ok(enumerate_bipartitions(a, b, Some(p))?
        .into_iter()
        .map(PacketMember::new)
        .collect())
}

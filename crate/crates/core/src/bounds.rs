//! Stable multiplicity coefficients, the dominance inequality for the
//! discrete spectrum, and the bookkeeping that turns the hyperendoscopic
//! expansion into the growth exponent `N(N − 2k)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{lowest_degree, OrderedPartition};
use crate::endoscopy::{datum_of, dominant_group, iota};
use crate::error::{Error, Result};
use crate::exact::{integer, rational, Rational};
use crate::hyperendoscopy::{count_chains, factor_census, AssignedGroup, GroupSymbol};
use crate::params::{
    centralizer_group, from_cohomological, is_elliptic, s_psi, ArthurShape, BlockSignVector, Element, GroupChar,
};

/// One packet member: its character of `𝒮_ψ` and the value `tr π(f) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketEntry {
    pub character: GroupChar,
    #[serde(with = "crate::exact::as_str")]
    pub trace: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketModel {
    pub members: Vec<PacketEntry>,
    pub epsilon: GroupChar,
}

impl PacketModel {
    pub fn new(members: Vec<PacketEntry>, epsilon: GroupChar) -> Result<PacketModel> {
        let model = PacketModel { members, epsilon };
        model.check_traces()?;
        Ok(model)
    }

    fn check_traces(&self) -> Result<()> {
        match self.members.iter().find(|m| m.trace < integer(0)) {
            Some(m) => Err(Error::NegativeTrace(m.trace.to_string())),
            None => Ok(()),
        }
    }

    fn check_rank(&self, rank: u32) -> Result<()> {
        let chars = std::iter::once(&self.epsilon).chain(self.members.iter().map(|m| &m.character));
        for c in chars {
            if c.rank != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: c.rank,
                });
            }
        }
        Ok(())
    }

    pub fn total_trace(&self) -> Rational {
        self.members.iter().map(|m| m.trace).sum()
    }
}

/// A packet of `1..=max_members` members with random characters of
/// `(ℤ/2)^rank` and traces `p/q` with `0 ≤ p ≤ 20`, `1 ≤ q ≤ 10`.
pub fn random_packet<R: Rng>(rng: &mut R, rank: u32, max_members: usize) -> PacketModel {
    let size = rng.gen_range(1..=max_members.max(1));
    let members = (0..size)
        .map(|_| PacketEntry {
            character: GroupChar {
                rank,
                bits: rng.gen_range(0..1u32 << rank),
            },
            trace: rational(rng.gen_range(0..=20), rng.gen_range(1..=10)),
        })
        .collect();
    let epsilon = GroupChar {
        rank,
        bits: rng.gen_range(0..1u32 << rank),
    };
    PacketModel { members, epsilon }
}

/// `C(ψ, s) = ι(G, H) / |𝒮_{ψ^H}|` where `(H, ψ^H)` corresponds to `s`.
pub fn stable_coefficient(shape: &ArthurShape, s: &BlockSignVector) -> Result<Rational> {
    if !is_elliptic(shape) {
        return Err(Error::NotElliptic(shape.to_string()));
    }
    let (datum, split) = datum_of(shape, s)?;
    let order = |part: &ArthurShape| -> i128 {
        if part.is_empty() {
            1
        } else {
            1i128 << (part.len() - 1)
        }
    };
    Ok(iota(&datum) / integer(order(&split.first) * order(&split.second)))
}

fn coefficients(shape: &ArthurShape) -> Result<Vec<(BlockSignVector, Rational)>> {
    let group = centralizer_group(shape)?;
    group
        .elements()
        .map(|e| {
            let s = BlockSignVector::from_element(shape.len(), e)?;
            let c = stable_coefficient(shape, &s)?;
            Ok((s, c))
        })
        .collect()
}

/// All `C(ψ, s)` for one shape, computed once and reused across packets.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    rank: u32,
    s_psi: Element,
    entries: Vec<(Element, Rational)>,
}

impl CoefficientTable {
    pub fn new(shape: &ArthurShape) -> Result<CoefficientTable> {
        let group = centralizer_group(shape)?;
        let entries = coefficients(shape)?
            .into_iter()
            .map(|(s, c)| (s.to_element(), c))
            .collect();
        Ok(CoefficientTable {
            rank: group.rank(),
            s_psi: s_psi(shape).to_element(),
            entries,
        })
    }

    /// `C(ψ, s_ψ)`.
    pub fn dominant(&self) -> Rational {
        self.entries
            .iter()
            .find(|(e, _)| *e == self.s_psi)
            .map(|(_, c)| *c)
            .expect("s_ψ lies in the group")
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().map(|(_, c)| *c).sum()
    }

    pub fn i_disc(&self, packet: &PacketModel) -> Result<Rational> {
        packet.check_rank(self.rank)?;
        let mut total = integer(0);
        for &(s, c) in &self.entries {
            let t = self.s_psi ^ s;
            let eps = packet.epsilon.eval(t);
            let inner: Rational = packet
                .members
                .iter()
                .map(|m| (eps * m.character.eval(t)).as_rational() * m.trace)
                .sum();
            total += c * inner;
        }
        Ok(total)
    }

    pub fn dominance(&self, packet: &PacketModel) -> Result<Dominance> {
        packet.check_traces()?;
        let i_disc = self.i_disc(packet)?;
        let c_dom = self.dominant();
        let s_dom = c_dom * packet.total_trace();
        let c_psi = self.total() / c_dom;
        Ok(Dominance {
            i_disc,
            s_dom,
            c_psi,
            holds: i_disc <= c_psi * s_dom,
        })
    }
}

/// `Σ_s C(ψ, s) Σ_π ε(s_ψ s) ⟨s_ψ s, π⟩ tr π(f)`.
pub fn i_disc_model(shape: &ArthurShape, packet: &PacketModel) -> Result<Rational> {
    CoefficientTable::new(shape)?.i_disc(packet)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dominance {
    #[serde(with = "crate::exact::as_str")]
    pub i_disc: Rational,
    #[serde(with = "crate::exact::as_str")]
    pub s_dom: Rational,
    #[serde(with = "crate::exact::as_str")]
    pub c_psi: Rational,
    pub holds: bool,
}

/// Compares `I_disc` with `C(ψ) · S(ψ, s_ψ)` exactly.
pub fn dominance_check(shape: &ArthurShape, packet: &PacketModel) -> Result<Dominance> {
    packet.check_traces()?;
    CoefficientTable::new(shape)?.dominance(packet)
}

/// `dim H − 1` for `H = Π U(kⱼ)`.
pub fn savin_exponent(group: &GroupSymbol) -> Result<i64> {
    if group.is_empty() {
        return Err(Error::OutOfRange("empty group".into()));
    }
    Ok(group.dimension() as i64 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub claim: String,
    pub justification: String,
    #[serde(with = "crate::exact::as_str")]
    pub value: Rational,
}

/// Exponent bookkeeping for one terminal group `H_q = H¹_q × H²_q`, where
/// `H¹_q` carries the even-`m` summands and `H²_q` the odd ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainExponent {
    pub h1: GroupSymbol,
    pub h2: GroupSymbol,
    /// Number of chains ending in this terminal group.
    pub chains: u128,
    /// `d(G, H_q) = (dim G − dim H_q)/2`.
    pub transfer: i64,
    /// `dim H²_q − 1`, absent when `H²_q` is trivial.
    pub savin: Option<i64>,
    /// Extra power from counting characters of bounded conductor.
    pub character_count: i64,
    pub total: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationInput {
    pub n: u32,
    pub a: u32,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub input: DerivationInput,
    pub b: u32,
    pub shape: ArthurShape,
    pub lowest_degree: u64,
    pub steps: Vec<Step>,
    pub chain_exponents: Vec<ChainExponent>,
    /// Exponent of the untouched `H_ψ` term.
    pub dominant_exponent: i64,
    /// Largest exponent over all terminal groups.
    pub chain_maximum: i64,
    pub final_exponent: i64,
}

impl Derivation {
    pub fn maximum_at_dominant(&self) -> bool {
        self.chain_maximum == self.dominant_exponent
    }
}

fn step(claim: impl Into<String>, justification: &str, value: Rational) -> Step {
    Step {
        claim: claim.into(),
        justification: justification.into(),
        value,
    }
}

/// The exponent of `h^i(𝔭ⁿ)` for the packet of `ν(2k) ⊕ ν(1)^{N−2k}` on `U(a, N − a)`.
pub fn derive_exponent(n: u32, a: u32, k: u32) -> Result<Derivation> {
    if k == 0 || 2 * k > n || 2 * a > n {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= N/2 and a <= N/2, got N = {n}, a = {a}, k = {k}"
        )));
    }
    let b = n - a;
    let shape = from_cohomological(&OrderedPartition::hook(n, k)?)?;
    let low = lowest_degree(a, b, k)?;
    let big = i64::from(n);
    let dim_g = big * big;

    let dominant = dominant_group(&shape)?;
    let (group, iota_dom) = if dominant.is_whole_group() {
        (AssignedGroup::single(&shape)?, integer(1))
    } else {
        (
            AssignedGroup::new(vec![dominant.split.first.clone(), dominant.split.second.clone()])?,
            iota(&dominant.datum),
        )
    };
    let h_psi = group.symbol();

    let table = CoefficientTable::new(&shape)?;
    let c_psi = table.total() / table.dominant();

    // H¹ collects the factors carrying even m, H² the rest
    let census = factor_census(&group);
    let even = |f: &ArthurShape| f.summands().iter().all(|s| s.m % 2 == 0);
    let mut h1_options = vec![(Vec::new(), 1u128)];
    let mut h2_options = vec![(Vec::new(), 1u128)];
    for (factor, terminals) in group.factors().iter().zip(&census) {
        let target = if even(factor) { &mut h1_options } else { &mut h2_options };
        let mut next = Vec::new();
        for (ranks, count) in target.iter() {
            for (sym, c) in terminals {
                let mut r: Vec<u32> = ranks.clone();
                r.extend_from_slice(sym.ranks());
                next.push((r, count * c));
            }
        }
        *target = next;
    }

    let mut chain_exponents = Vec::new();
    for (r1, c1) in &h1_options {
        for (r2, c2) in &h2_options {
            let h1 = GroupSymbol::new(r1.clone())?;
            let h2 = GroupSymbol::new(r2.clone())?;
            let dim_h = (h1.dimension() + h2.dimension()) as i64;
            let transfer = (dim_g - dim_h) / 2;
            let (savin, character_count) = if h2.is_empty() {
                (None, 0)
            } else {
                (Some(savin_exponent(&h2)?), 1)
            };
            chain_exponents.push(ChainExponent {
                total: transfer + savin.unwrap_or(0) + character_count,
                h1,
                h2,
                chains: c1 * c2,
                transfer,
                savin,
                character_count,
            });
        }
    }
    chain_exponents.sort_by(|x, y| y.total.cmp(&x.total).then_with(|| x.h2.cmp(&y.h2)));

    let dim_h1: Vec<u64> = chain_exponents.iter().map(|c| c.h1.dimension()).collect();
    let dim_h1_value = *dim_h1.iter().max().unwrap_or(&0);
    let dim_h1_constant = dim_h1.iter().all(|&d| d == dim_h1_value);
    let max_h2 = chain_exponents.iter().map(|c| c.h2.dimension()).max().unwrap_or(0);
    let odd_rank = u64::from(n - 2 * k);
    if max_h2 > odd_rank * odd_rank {
        return Err(Error::Hypothesis(format!(
            "terminal odd block of dimension {max_h2} exceeds (N-2k)^2 = {}",
            odd_rank * odd_rank
        )));
    }
    let dominant_exponent = chain_exponents
        .iter()
        .find(|c| {
            let mut ranks = c.h1.ranks().to_vec();
            ranks.extend_from_slice(c.h2.ranks());
            GroupSymbol::new(ranks).is_ok_and(|g| g == h_psi)
        })
        .map(|c| c.total)
        .ok_or_else(|| Error::Hypothesis("H_ψ does not occur among terminal groups".into()))?;
    let chain_maximum = chain_exponents.iter().map(|c| c.total).max().unwrap_or(0);
    let n_chains = count_chains(&group);

    let big_k = i64::from(k);
    let steps = vec![
        step(
            format!("ψ = ν({}) ⊕ ν(1)^{} on U({a},{b}); rank N", 2 * k, n - 2 * k),
            "Adams–Johnson packets: the restriction to the Arthur SL₂ is ⊕ν(Nᵢ) for P = (2k,1,…,1)",
            integer(i128::from(n)),
        ),
        step(
            "lowest degree i of cohomology over the packet",
            "Vogan–Zuckerman: π_B has lowest degree R = ab − Σaᵢbᵢ; minimise over the packet",
            integer(i128::from(low)),
        ),
        step(
            "number of Levi contributions to I_disc at regular infinitesimal character",
            "Bergeron–Clozel: the spectral side equals the discrete part when the infinitesimal character is regular",
            integer(0),
        ),
        step(
            format!("H_ψ = {h_psi}, ι(G, H_ψ)"),
            "the distinguished element s_ψ = ψ(1, −I) determines the dominant endoscopic group",
            iota_dom,
        ),
        step(
            "I_disc,ψ(f) ≤ C(ψ) · S(ψ, s_ψ, f) with C(ψ)",
            "stable multiplicity formula with nonnegative traces; every element of 𝒮_ψ has order two",
            c_psi,
        ),
        step(
            "number of hyperendoscopic chains of H_ψ through which ψ factors",
            "inversion of the stabilization along hyperendoscopic chains",
            integer(n_chains as i128),
        ),
        step(
            if dim_h1_constant {
                "dim H¹_q = (2k)² on every chain: ν(2k) admits no proper refinement".to_string()
            } else {
                "dim H¹_q varies along chains".to_string()
            },
            "a proper refinement of U(2k) would split the simple summand ν(2k)",
            integer(i128::from(dim_h1_value)),
        ),
        step(
            "max dim H²_q, checked ≤ (N − 2k)²",
            "terminal groups of the odd block are products of unitary groups of total rank N − 2k",
            integer(i128::from(max_h2)),
        ),
        step(
            "transfer exponent d(G, H_q) = (dim G − dim H_q)/2",
            "Ferrari's fundamental lemma for congruence subgroups: f(𝔭ⁿ) transfers to Nm(𝔭ⁿ)^{d(G,H)} f_H(𝔭ⁿ)",
            integer(i128::from((dim_g - (4 * big_k * big_k + (big - 2 * big_k).pow(2))) / 2)),
        ),
        step(
            "exponent of I^{H²_q}: dim H²_q − 1",
            "Savin's limit multiplicity for the principal congruence tower",
            integer(i128::from((big - 2 * big_k).pow(2) - 1).max(0)),
        ),
        step(
            "exponent from one-dimensional representations of H¹_q",
            "characters of conductor dividing 𝔭ⁿ number O(Nm(𝔭ⁿ)); bounded constants absorb component counts and archimedean traces",
            integer(if n > 2 * k { 1 } else { 0 }),
        ),
        step(
            "maximum over terminal groups of d(G, H_q) + dim H²_q",
            "sum of the bounds above over all chains of H_ψ",
            integer(i128::from(chain_maximum)),
        ),
        step(
            "exponent of h^i(𝔭ⁿ)",
            if dominant_exponent == chain_maximum {
                "the maximum is attained at the untouched term H_q = H_ψ"
            } else {
                "the maximum is attained away from H_ψ; the larger value is kept"
            },
            integer(i128::from(chain_maximum)),
        ),
    ];
    let final_exponent = steps.last().map(|s| s.value.to_integer() as i64).unwrap_or(0);
    Ok(Derivation {
        input: DerivationInput { n, a, k },
        b,
        shape,
        lowest_degree: low,
        steps,
        chain_exponents,
        dominant_exponent,
        chain_maximum,
        final_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use crate::params::TwoGroup;

    fn nu(dims: &[u32]) -> ArthurShape {
        ArthurShape::from_sl2_dims(dims).unwrap()
    }

    fn unit_packet(rank: u32, bits: &[u32], epsilon: u32) -> PacketModel {
        PacketModel::new(
            bits.iter()
                .map(|&b| PacketEntry {
                    character: GroupChar::new(rank, b).unwrap(),
                    trace: integer(1),
                })
                .collect(),
            GroupChar::new(rank, epsilon).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let one = nu(&[3]);
        assert_eq!(stable_coefficient(&one, &s_psi(&one)).unwrap(), integer(1));
        let hook = nu(&[2, 1]);
        assert_eq!(stable_coefficient(&hook, &s_psi(&hook)).unwrap(), rational(1, 2));
        let flat = nu(&[1, 1, 1]);
        assert_eq!(stable_coefficient(&flat, &BlockSignVector::identity(3)).unwrap(), rational(1, 4));
        assert!(stable_coefficient(&flat, &BlockSignVector::identity(2)).is_err());
    }

    #[test]
    fn coefficient_ranges() {
        for dims in [vec![1, 1, 1, 1], vec![2, 1, 1, 1, 1], vec![4, 3, 2, 1]] {
            let shape = nu(&dims);
            let cs = coefficients(&shape).unwrap();
            let sum: Rational = cs.iter().map(|(_, c)| *c).sum();
            assert!(cs.iter().all(|(_, c)| *c > integer(0) && *c <= integer(1)));
            assert!(sum <= integer(1 << (shape.len() - 1)));
        }
    }

    #[test]
    fn i_disc_examples() {
        let one = nu(&[2]);
        let p = PacketModel::new(
            vec![PacketEntry {
                character: GroupChar::trivial(0),
                trace: rational(3, 2),
            }],
            GroupChar::trivial(0),
        )
        .unwrap();
        assert_eq!(i_disc_model(&one, &p).unwrap(), rational(3, 2));

        let hook = nu(&[2, 1]);
        assert_eq!(i_disc_model(&hook, &unit_packet(1, &[0], 0)).unwrap(), integer(1));
        assert!(matches!(
            i_disc_model(&hook, &unit_packet(2, &[0], 0)),
            Err(Error::RankMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn dominance_examples() {
        let shape = nu(&[4, 1, 1]);
        let zero = PacketModel::new(
            vec![PacketEntry {
                character: GroupChar::trivial(2),
                trace: integer(0),
            }],
            GroupChar::trivial(2),
        )
        .unwrap();
        let d = dominance_check(&shape, &zero).unwrap();
        assert_eq!((d.i_disc, d.s_dom, d.holds), (integer(0), integer(0), true));
        let g = TwoGroup::new(2).unwrap();
        for eps in g.characters() {
            for chi in g.characters() {
                let d = dominance_check(&shape, &unit_packet(2, &[chi.bits], eps.bits)).unwrap();
                assert!(d.holds);
            }
        }
        let negative = PacketModel {
            members: vec![PacketEntry {
                character: GroupChar::trivial(2),
                trace: integer(-1),
            }],
            epsilon: GroupChar::trivial(2),
        };
        assert!(matches!(dominance_check(&shape, &negative), Err(Error::NegativeTrace(_))));
    }

    #[test]
    fn dominant_term_has_plus_signs() {
        let shape = nu(&[2, 1, 1]);
        let sp = s_psi(&shape).to_element();
        for chi in TwoGroup::new(2).unwrap().characters() {
            assert!(chi.eval(sp ^ sp).is_plus());
        }
        assert_eq!(sp ^ sp, Element::IDENTITY);
    }

    #[test]
    fn savin_examples() {
        let g = |r: &[u32]| GroupSymbol::new(r.to_vec()).unwrap();
        assert_eq!(savin_exponent(&g(&[1])).unwrap(), 0);
        assert_eq!(savin_exponent(&g(&[3])).unwrap(), 8);
        assert_eq!(savin_exponent(&g(&[2, 1])).unwrap(), 4);
        assert!(savin_exponent(&g(&[])).is_err());
    }

    #[test]
    fn derivation_examples() {
        let d = derive_exponent(5, 1, 2).unwrap();
        assert_eq!(d.final_exponent, 5);
        assert_eq!(d.lowest_degree, 1);
        assert_eq!(d.chain_exponents.len(), 1);
        assert_eq!(d.chain_exponents[0].total, 5);
        assert_eq!(d.steps.last().unwrap().value, integer(5));

        let d = derive_exponent(7, 3, 2).unwrap();
        assert_eq!(d.final_exponent, 21);
        let sub = d
            .chain_exponents
            .iter()
            .find(|c| c.h2.ranks() == [2, 1])
            .unwrap();
        assert_eq!(sub.total, 19);
        assert!(d.maximum_at_dominant());

        let d = derive_exponent(9, 2, 4).unwrap();
        assert_eq!(d.final_exponent, 9);
        let d = derive_exponent(4, 2, 2).unwrap();
        assert_eq!(d.final_exponent, 0);
        assert!(derive_exponent(5, 3, 1).is_err());
        assert!(derive_exponent(5, 1, 0).is_err());
    }
}

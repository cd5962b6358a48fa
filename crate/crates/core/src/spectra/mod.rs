//! Closed-form Reidemeister spectra, product numbers `Π(φ)`, and witness
//! automorphisms.
//!
//! For a p-group of type `e` with abc-decomposition counts `b(e)`, `c(e)`:
//!
//! * odd `p`: the Reidemeister spectrum is `{p^i : 0 ≤ i ≤ Σ(e)}`;
//! * any `p`: the product-number spectrum is `{p^m : b(e)+c(e) ≤ m ≤ Σ(e)}`,
//!   which for `p = 2` is also the Reidemeister spectrum.
//!
//! Spectra of coprime direct sums multiply, so a general finite abelian group
//! is handled one Sylow component at a time.

mod poly;
mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

pub use poly::{companion_matrix, find_irreducible, is_irreducible, Poly};
pub use witness::{reidemeister_witness, witness, witness_abelian};

use crate::decomposition::abc_decompose;
use crate::endo::{EndoMatrix, PGroupType};
use crate::error::{Error, Result};
use crate::factored::{checked_pow, factorize, Factored};
use crate::lattice::{det_mod_p_u64, mul_mod};

/// A finite set of positive integers, iterated in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Spectrum {
    values: BTreeSet<Factored>,
}

impl Spectrum {
    pub fn new(values: impl IntoIterator<Item = Factored>) -> Self {
        Self {
            values: values.into_iter().collect(),
        }
    }

    /// `{p^i : lo ≤ i ≤ hi}`.
    pub fn prime_powers(p: u64, lo: u64, hi: u64) -> Self {
        Self::new((lo..=hi).map(|i| Factored::prime_power(p, i)))
    }

    pub fn values(&self) -> impl Iterator<Item = &Factored> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Factored) -> bool {
        self.values.contains(v)
    }

    pub fn insert(&mut self, v: Factored) -> bool {
        self.values.insert(v)
    }

    pub fn min(&self) -> Option<&Factored> {
        self.values.first()
    }

    pub fn max(&self) -> Option<&Factored> {
        self.values.last()
    }

    pub fn is_subset(&self, other: &Spectrum) -> bool {
        self.values.is_subset(&other.values)
    }

    /// `{a·b : a ∈ self, b ∈ other}`.
    pub fn product(&self, other: &Spectrum) -> Spectrum {
        Self::new(
            self.values
                .iter()
                .flat_map(|a| other.values.iter().map(move |b| a * b)),
        )
    }

    pub fn union(&mut self, other: Spectrum) {
        self.values.extend(other.values);
    }
}

impl FromIterator<Factored> for Spectrum {
    fn from_iter<I: IntoIterator<Item = Factored>>(iter: I) -> Self {
        Self::new(iter)
    }
}

/// `{1,3,9}` style, decimal values.
impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|v| v.to_biguint().to_string())
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A finite abelian group as a list of cyclic orders `Z/n_1 ⊕ … ⊕ Z/n_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupType {
    cyclic_orders: Vec<u64>,
}

impl AbelianGroupType {
    /// Every order must be at least 2; the empty list is the trivial group.
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = cyclic_orders.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidOrder(bad));
        }
        Ok(Self { cyclic_orders })
    }

    /// The direct sum of the given p-groups (distinct primes expected).
    pub fn from_sylow<'a>(components: impl IntoIterator<Item = &'a PGroupType>) -> Result<Self> {
        let mut orders = Vec::new();
        for g in components {
            for &k in g.exponents() {
                let q = checked_pow(g.p(), u64::from(k)).ok_or_else(|| {
                    Error::BudgetExceeded(format!("{}^{} does not fit in 64 bits", g.p(), k))
                })?;
                orders.push(q);
            }
        }
        Self::new(orders)
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> Factored {
        self.cyclic_orders
            .iter()
            .map(|&n| Factored::of_u64(n))
            .product()
    }

    /// One p-group per prime dividing the order.
    pub fn sylow_components(&self) -> BTreeMap<u64, PGroupType> {
        let mut exps: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in &self.cyclic_orders {
            for (p, k) in factorize(n) {
                exps.entry(p).or_default().push(k as u32);
            }
        }
        exps.into_iter()
            .map(|(p, e)| (p, PGroupType::new(p, e).expect("factor primes are prime")))
            .collect()
    }

    /// The Sylow 2-subgroup, trivial when the order is odd.
    pub fn sylow2(&self) -> PGroupType {
        self.sylow_components()
            .remove(&2)
            .unwrap_or_else(|| PGroupType::trivial(2).expect("2 is prime"))
    }

    /// Prime-power cyclic orders, by prime then exponent.
    pub fn elementary_divisors(&self) -> Vec<u64> {
        self.sylow_components()
            .values()
            .flat_map(|g| {
                g.exponents()
                    .iter()
                    .map(|&k| g.p().pow(k))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Invariant factors `n_1 | n_2 | …`, ascending.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let comps = self.sylow_components();
        let len = comps.values().map(PGroupType::rank).max().unwrap_or(0);
        let mut out = vec![1u64; len];
        for g in comps.values() {
            let e = g.exponents();
            for (slot, &k) in out.iter_mut().rev().zip(e.iter().rev()) {
                *slot *= g.p().pow(k);
            }
        }
        out
    }

    /// Same group up to isomorphism.
    pub fn is_isomorphic(&self, other: &AbelianGroupType) -> bool {
        self.sylow_components() == other.sylow_components()
    }
}

impl fmt::Display for AbelianGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::endo::join(&self.cyclic_orders))
    }
}

/// Parses `4,8,3`.
impl FromStr for AbelianGroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(Vec::new());
        }
        let orders = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad cyclic order {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(orders)
    }
}

/// Partitions of `n` as nondecreasing lists, in lexicographic order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in min..=rest {
            if part == rest || rest - part >= part {
                cur.push(part);
                go(rest - part, part, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// One representative per isomorphism class of abelian groups of order `n`,
/// as elementary divisors. Sorted by the Sylow exponent vectors, smaller
/// primes first.
pub fn abelian_groups_of_order(n: u64) -> Vec<AbelianGroupType> {
    let mut combos: Vec<Vec<PGroupType>> = vec![Vec::new()];
    for (p, k) in factorize(n) {
        let parts = partitions(k as u32);
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                parts.iter().map(move |e| {
                    let mut next = prefix.clone();
                    next.push(PGroupType::new(p, e.clone()).expect("prime from factorize"));
                    next
                })
            })
            .collect();
    }
    combos
        .iter()
        .map(|comps| AbelianGroupType::from_sylow(comps).expect("orders fit since n does"))
        .collect()
}

/// `Π(φ) = ∏_{i=1}^{p-1} |Fix(i·φ)|`.
///
/// `i·φ` has a nontrivial fixed point exactly when it fixes a nonzero element
/// of order `p`. The map on the `p`-torsion has, modulo `p`, the same diagonal
/// blocks as `M mod p`, so the factor for `i` is 1 whenever `iM - I` is
/// invertible mod `p` and only the remaining factors need a lattice index.
pub fn product_number(em: &EndoMatrix) -> Result<Factored> {
    if !em.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let p = em.group().p();
    let n = em.group().rank();
    let reduced: Vec<u64> = em
        .induced_mod_p()
        .entries()
        .iter()
        .map(|x| u64::try_from(x).expect("residue below p"))
        .collect();
    let mut out = Factored::one();
    for i in 1..p {
        let shifted: Vec<u64> = (0..n * n)
            .map(|idx| {
                let x = mul_mod(reduced[idx], i, p);
                if idx / n == idx % n {
                    (x + p - 1) % p
                } else {
                    x
                }
            })
            .collect();
        if det_mod_p_u64(shifted, n, p) != 0 {
            continue;
        }
        let scaled = em.scaled_by(i);
        out = &out * &scaled.fixed_point_count();
    }
    Ok(out)
}

fn require_odd(g: &PGroupType) -> Result<()> {
    if g.p() == 2 {
        return Err(Error::WrongPrime {
            p: 2,
            expected: "an odd prime",
        });
    }
    Ok(())
}

/// Reidemeister spectrum of a p-group for odd `p`.
pub fn spec_r_odd_p(g: &PGroupType) -> Result<Spectrum> {
    require_odd(g)?;
    Ok(Spectrum::prime_powers(g.p(), 0, g.total_exponent()))
}

/// The spectrum of product numbers over all automorphisms.
pub fn spec_p(g: &PGroupType) -> Spectrum {
    let lower = abc_decompose(g).lower_exponent();
    Spectrum::prime_powers(g.p(), lower, g.total_exponent())
}

/// Reidemeister spectrum of a 2-group.
pub fn spec_r_2group(g: &PGroupType) -> Result<Spectrum> {
    if g.p() != 2 {
        return Err(Error::WrongPrime {
            p: g.p(),
            expected: "p = 2",
        });
    }
    Ok(spec_p(g))
}

/// Reidemeister spectrum of a p-group for any `p`.
pub fn spec_r_pgroup(g: &PGroupType) -> Spectrum {
    if g.p() == 2 {
        spec_p(g)
    } else {
        Spectrum::prime_powers(g.p(), 0, g.total_exponent())
    }
}

/// Reidemeister spectrum of a finite abelian group: the product of the
/// spectra of its Sylow components.
pub fn spec_r_abelian(a: &AbelianGroupType) -> Spectrum {
    a.sylow_components()
        .values()
        .map(spec_r_pgroup)
        .fold(Spectrum::new([Factored::one()]), |acc, s| acc.product(&s))
}

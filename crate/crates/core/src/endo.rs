//! Endomorphisms of a finite abelian p-group `⊕ Z/p^{e_i}` as integer
//! matrices.
//!
//! An integer matrix `M` describes an endomorphism (acting on column vectors)
//! exactly when `p^{e_i - e_j}` divides `M[i][j]` for every `j ≤ i`; it is an
//! automorphism exactly when it is invertible modulo `p`. Matrices are stored
//! with row `i` reduced into `[0, p^{e_i})`, which picks one representative
//! per endomorphism.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::factored::{checked_pow, is_prime, pow_big, pow_bigint, Factored};
use crate::lattice::{det_mod_p, lattice_index, local_index_exponent, reduce};
use crate::matrix::IntMatrix;

/// A prime `p` with a nondecreasing exponent vector `e`; the group
/// `⊕ Z/p^{e_i}`. The empty vector is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PGroupType {
    p: u64,
    e: Vec<u32>,
}

impl PGroupType {
    /// Validates `p` and sorts the exponents into canonical order.
    pub fn new(p: u64, mut raw: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if raw.contains(&0) {
            return Err(Error::NonPositiveExponent);
        }
        raw.sort_unstable();
        Ok(Self { p, e: raw })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, Vec::new())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.e
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.e.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.e.is_empty()
    }

    /// `Σ e_i`, so that the group has order `p^{Σ e_i}`.
    pub fn total_exponent(&self) -> u64 {
        self.e.iter().map(|&x| u64::from(x)).sum()
    }

    pub fn order(&self) -> Factored {
        Factored::prime_power(self.p, self.total_exponent())
    }

    /// The order as a `u64`, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        checked_pow(self.p, self.total_exponent())
    }

    /// `p^{e_i}`.
    pub fn modulus(&self, i: usize) -> BigInt {
        pow_bigint(self.p, u64::from(self.e[i]))
    }

    pub fn max_exponent(&self) -> u32 {
        self.e.last().copied().unwrap_or(0)
    }
}

/// Renders as `p=2 e=2,3`.
impl fmt::Display for PGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} e={}", self.p, join(&self.e))
    }
}

impl FromStr for PGroupType {
    type Err = Error;

    /// Parses `p=<prime> e=<comma list>`; tokens may appear in either order.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = None;
        let mut e = None;
        for tok in s.split_whitespace() {
            if let Some(v) = tok.strip_prefix("p=") {
                p = Some(
                    v.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad prime {v:?}")))?,
                );
            } else if let Some(v) = tok.strip_prefix("e=") {
                e = Some(parse_exponents(v)?);
            } else {
                return Err(Error::Parse(format!("unexpected token {tok:?}")));
            }
        }
        let p = p.ok_or_else(|| Error::Parse("missing p=<prime>".into()))?;
        let e = e.ok_or_else(|| Error::Parse("missing e=<exponents>".into()))?;
        Self::new(p, e)
    }
}

/// Parses a comma-separated exponent list; the empty string is the empty list.
pub fn parse_exponents(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent {t:?}")))
        })
        .collect()
}

pub(crate) fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Whether `m` satisfies the divisibility constraints for type `g`.
pub fn is_valid_endo(g: &PGroupType, m: &IntMatrix) -> Result<bool> {
    Ok(first_violation(g, m)?.is_none())
}

fn first_violation(g: &PGroupType, m: &IntMatrix) -> Result<Option<(usize, usize, u32)>> {
    let n = g.rank();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    for i in 0..n {
        for j in 0..i {
            let shift = g.e[i] - g.e[j];
            if shift > 0 && !m[(i, j)].is_multiple_of(&pow_bigint(g.p, u64::from(shift))) {
                return Ok(Some((i, j, shift)));
            }
        }
    }
    Ok(None)
}

/// A point of the group: coordinate `i` lies in `[0, p^{e_i})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: PGroupType,
    coords: Vec<BigInt>,
}

impl GroupElement {
    /// Reduces the coordinates into canonical range.
    pub fn new(group: &PGroupType, coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() != group.rank() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coordinates", group.rank()),
                found: format!("{} coordinates", coords.len()),
            });
        }
        let coords = coords
            .iter()
            .enumerate()
            .map(|(i, x)| reduce(x, &group.modulus(i)))
            .collect();
        Ok(Self {
            group: group.clone(),
            coords,
        })
    }

    pub fn from_i64(group: &PGroupType, coords: &[i64]) -> Result<Self> {
        Self::new(group, coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(group: &PGroupType) -> Self {
        Self {
            group: group.clone(),
            coords: vec![BigInt::zero(); group.rank()],
        }
    }

    pub fn group(&self) -> &PGroupType {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
}

/// A matrix in canonical form describing an endomorphism of a p-group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndoMatrix {
    group: PGroupType,
    m: IntMatrix,
}

impl EndoMatrix {
    /// Checks the divisibility constraints and reduces row `i` mod `p^{e_i}`.
    pub fn new(group: &PGroupType, m: IntMatrix) -> Result<Self> {
        if let Some((row, col, shift)) = first_violation(group, &m)? {
            return Err(Error::InvalidEndo { row, col, shift });
        }
        Ok(Self::normalized(group, m))
    }

    /// Caller guarantees the divisibility constraints hold.
    pub(crate) fn normalized(group: &PGroupType, mut m: IntMatrix) -> Self {
        for i in 0..group.rank() {
            let q = group.modulus(i);
            for j in 0..group.rank() {
                let x = &m[(i, j)];
                if x.sign() == num_bigint::Sign::Minus || *x >= q {
                    m[(i, j)] = reduce(x, &q);
                }
            }
        }
        Self {
            group: group.clone(),
            m,
        }
    }

    /// Caller guarantees `m` is valid and already canonical.
    pub(crate) fn from_canonical(group: &PGroupType, m: IntMatrix) -> Self {
        debug_assert!(is_valid_endo(group, &m).unwrap_or(false));
        Self {
            group: group.clone(),
            m,
        }
    }

    pub fn identity(group: &PGroupType) -> Self {
        Self::from_canonical(group, IntMatrix::identity(group.rank()))
    }

    pub fn group(&self) -> &PGroupType {
        &self.group
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    /// Invertible modulo `p`. The trivial group's only endomorphism counts.
    pub fn is_automorphism(&self) -> bool {
        det_mod_p(&self.m, self.group.p) != 0
    }

    /// `x ↦ M x`, coordinate `i` reduced mod `p^{e_i}`.
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.group != self.group {
            return Err(Error::GroupMismatch);
        }
        let n = self.group.rank();
        let coords = (0..n)
            .map(|i| {
                let s: BigInt = (0..n).map(|j| &self.m[(i, j)] * &x.coords[j]).sum();
                reduce(&s, &self.group.modulus(i))
            })
            .collect();
        Ok(GroupElement {
            group: self.group.clone(),
            coords,
        })
    }

    /// The composite `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn compose(&self, other: &EndoMatrix) -> Result<EndoMatrix> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(Self::normalized(&self.group, &self.m * &other.m))
    }

    /// Multiplication by `i` after this map, for `i` coprime to `p`.
    pub fn scale(&self, i: i64) -> Result<EndoMatrix> {
        if num_integer::gcd(i.unsigned_abs(), self.group.p) != 1 {
            return Err(Error::NotCoprime {
                value: i,
                p: self.group.p,
            });
        }
        Ok(self.scaled_by(i))
    }

    /// Multiplication by `k` after this map, with no coprimality check.
    pub(crate) fn scaled_by(&self, k: impl Into<BigInt>) -> EndoMatrix {
        let k = k.into();
        Self::normalized(&self.group, self.m.map(|x| x * &k))
    }

    /// `M mod p`, the matrix of the induced map on `P/pP`.
    pub fn induced_mod_p(&self) -> IntMatrix {
        let p = BigInt::from(self.group.p);
        self.m.map(|x| x.mod_floor(&p))
    }

    /// `|Fix(φ)|`, computed as the index in `Z^n` of the lattice spanned by
    /// the columns of `[M - I | diag(p^{e_1}, …, p^{e_n})]`.
    pub fn fixed_point_count(&self) -> Factored {
        let g = &self.group;
        let n = g.rank();
        if n == 0 {
            return Factored::one();
        }
        let top = g.max_exponent();
        let k = match checked_pow(g.p, u64::from(top)) {
            Some(q) => self.fixed_point_exponent_local(q, top),
            None => self.fixed_point_exponent_smith(),
        };
        Factored::prime_power(g.p, k)
    }

    /// Fast path: the lattice contains `p^top · Z^n`, so reduce modulo
    /// `p^top` and work in machine integers.
    fn fixed_point_exponent_local(&self, q: u64, top: u32) -> u64 {
        let g = &self.group;
        let n = g.rank();
        let m = 2 * n;
        let mut cols = vec![0u64; n * m];
        for i in 0..n {
            for j in 0..n {
                // entries are canonical, so already below p^{e_i} ≤ q
                let x = self.m[(i, j)].to_u64().expect("canonical entry fits");
                cols[i * m + j] = if i == j { (x + q - 1) % q } else { x };
            }
            cols[i * m + n + i] = checked_pow(g.p, u64::from(g.e[i])).unwrap() % q;
        }
        local_index_exponent(cols, n, m, g.p, top)
    }

    fn fixed_point_exponent_smith(&self) -> u64 {
        let g = &self.group;
        let n = g.rank();
        let shifted = {
            let mut s = self.m.clone();
            for i in 0..n {
                s[(i, i)] -= 1;
            }
            s
        };
        let d = IntMatrix::diagonal((0..n).map(|i| g.modulus(i)));
        let idx = lattice_index(&shifted.hconcat(&d).expect("same row count"))
            .expect("lattice contains diag(p^e) so has full rank");
        Factored::from_biguint_over(&idx, &[g.p])
            .expect("index divides the group order")
            .valuation(g.p)
    }

    /// The Reidemeister number, which equals the number of fixed points.
    pub fn reidemeister_number(&self) -> Factored {
        self.fixed_point_count()
    }
}

impl fmt::Display for EndoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

/// `gcd(k - 1, p^n)`: the Reidemeister number of `1 ↦ k` on `Z/p^n`.
pub fn reidemeister_cyclic(k: &BigInt, p: u64, n: u32) -> Factored {
    let shifted = k - BigInt::one();
    let v = crate::factored::valuation_bigint(&shifted, p).unwrap_or(u64::MAX);
    Factored::prime_power(p, v.min(u64::from(n)))
}

/// `1 ↦ k` on the cyclic group `Z/p^n`.
pub fn cyclic_endo(p: u64, n: u32, k: &BigInt) -> Result<EndoMatrix> {
    let g = PGroupType::new(p, vec![n])?;
    let m = IntMatrix::from_vec(1, 1, vec![k.clone()])?;
    EndoMatrix::new(&g, m)
}

pub(crate) fn big_pow(p: u64, k: u64) -> BigInt {
    BigInt::from(pow_big(p, k))
}

//! Brute-force ground truth: exhaustive enumeration of endomorphisms and
//! automorphisms, element-level fixed-point counting and twisted-class
//! counting.
//!
//! Endomorphisms of `P = ⊕ Z/p^{e_i}` are the matrices with
//! `p^{e_i - e_j} | M_ij`. Entry `(i, j)` is parameterised as
//! `p^{max(0, e_i - e_j)} · t_ij` with `t_ij ∈ [0, p^{min(e_i, e_j)})`, and
//! the stream runs through the parameter vectors `t` (row-major)
//! lexicographically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::decomposition::{abc_decompose, column_structure_check, restrict};
use crate::endo::{EndoMatrix, PGroupType};
use crate::error::{Error, Result};
use crate::factored::{checked_pow, Factored};
use crate::lattice::det_mod_p_u64;
use crate::matrix::IntMatrix;
use crate::spectra::{spec_p, spec_r_pgroup, AbelianGroupType, Spectrum};

/// Caps on the size of brute-force work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBudget {
    pub max_endos: u64,
    pub max_group_order: u64,
}

impl EnumBudget {
    /// Environment variable holding `max_endos[,max_group_order]`.
    pub const ENV_VAR: &'static str = "REIDEMEISTER_BUDGET";

    pub fn new(max_endos: u64, max_group_order: u64) -> Result<Self> {
        if max_endos == 0 || max_group_order == 0 {
            return Err(Error::Parse("budget caps must be positive".into()));
        }
        Ok(Self {
            max_endos,
            max_group_order,
        })
    }

    /// The defaults, overridden by `REIDEMEISTER_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(s) if !s.trim().is_empty() => s.parse(),
            _ => Ok(Self::default()),
        }
    }

    fn check_group(&self, g: &PGroupType) -> Result<u64> {
        match g.order_u64() {
            Some(n) if n <= self.max_group_order => Ok(n),
            _ => Err(Error::BudgetExceeded(format!(
                "|P| = {} exceeds max_group_order {}",
                g.order(),
                self.max_group_order
            ))),
        }
    }
}

impl Default for EnumBudget {
    fn default() -> Self {
        Self {
            max_endos: 1 << 20,
            max_group_order: 1 << 14,
        }
    }
}

impl FromStr for EnumBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad budget value {t:?}")))
        };
        let mut parts = s.split(',');
        let max_endos = parse(parts.next().unwrap_or(""))?;
        let max_group_order = match parts.next() {
            Some(t) => parse(t)?,
            None => Self::default().max_group_order,
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!("bad budget {s:?}")));
        }
        Self::new(max_endos, max_group_order)
    }
}

/// Machine-word description of `End(P)` for groups whose exponent fits in
/// 64 bits.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    group: PGroupType,
    n: usize,
    p: u64,
    /// `p^{e_i}`
    moduli: Vec<u64>,
    /// `p^{max(0, e_i - e_j)}`, row-major
    steps: Vec<u64>,
    /// `p^{min(e_i, e_j)}`, row-major
    radices: Vec<u64>,
    /// number of parameter vectors sharing a first coordinate
    stride: u64,
    total: u64,
}

impl Layout {
    fn new(g: &PGroupType, budget: &EnumBudget) -> Result<Self> {
        let n = g.rank();
        let p = g.p();
        let e = g.exponents();
        let over = || {
            Error::BudgetExceeded(format!(
                "End({g}) has more than {} elements",
                budget.max_endos
            ))
        };
        let mut total: u64 = 1;
        let mut radices = Vec::with_capacity(n * n);
        let mut steps = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let r = checked_pow(p, u64::from(e[i].min(e[j]))).ok_or_else(over)?;
                total = total
                    .checked_mul(r)
                    .filter(|&t| t <= budget.max_endos)
                    .ok_or_else(over)?;
                radices.push(r);
                steps.push(p.pow(e[i].saturating_sub(e[j])));
            }
        }
        let moduli = e.iter().map(|&k| p.pow(k)).collect();
        let stride = if n == 0 { 1 } else { total / radices[0] };
        Ok(Self {
            group: g.clone(),
            n,
            p,
            moduli,
            steps,
            radices,
            stride,
            total,
        })
    }

    /// Canonical entries for parameter index `idx`.
    fn decode(&self, mut idx: u64, out: &mut [u64]) {
        for k in (0..self.n * self.n).rev() {
            let r = self.radices[k];
            out[k] = (idx % r) * self.steps[k];
            idx /= r;
        }
    }

    fn is_automorphism(&self, entries: &[u64]) -> bool {
        let reduced = entries.iter().map(|&x| x % self.p).collect();
        det_mod_p_u64(reduced, self.n, self.p) != 0
    }

    fn to_endo(&self, entries: &[u64]) -> EndoMatrix {
        let m = IntMatrix::from_vec(
            self.n,
            self.n,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .expect("n×n entries");
        EndoMatrix::from_canonical(&self.group, m)
    }

    fn entries_of(&self, em: &EndoMatrix) -> Vec<u64> {
        em.matrix()
            .entries()
            .iter()
            .map(|x| u64::try_from(x).expect("canonical entries fit"))
            .collect()
    }
}

/// Fixed points of `M` and the size of `im(M - I)`, by walking every element
/// of the group once.
///
/// The walk is an odometer over the coordinates. Every digit that moves,
/// whether it wraps to 0 or steps up by one, changes by `+1 mod p^{e_j}`, and
/// `(M - I)` applied to `p^{e_j}` times the basis vector is 0, so each move
/// adds column `j` of `M - I` to the running image.
pub(crate) fn walk(layout: &Layout, entries: &[u64], want_image: bool) -> (u64, u64) {
    let n = layout.n;
    let q = &layout.moduli;
    let order: u64 = q.iter().product();
    // column-major (M - I) mod q_i
    let mut cols = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = entries[i * n + j] % q[i];
            cols[j * n + i] = if i == j { (x + q[i] - 1) % q[i] } else { x };
        }
    }
    let mut weights = vec![1u64; n];
    for i in 1..n {
        weights[i] = weights[i - 1] * q[i - 1];
    }
    let mut bitmap = if want_image {
        vec![0u64; (order as usize).div_ceil(64)]
    } else {
        Vec::new()
    };
    let mut x = vec![0u64; n];
    let mut y = vec![0u64; n];
    let mut nonzero = 0usize;
    let mut fixed = 0u64;
    for _ in 0..order {
        if nonzero == 0 {
            fixed += 1;
        }
        if want_image {
            let idx: u64 = y.iter().zip(&weights).map(|(a, w)| a * w).sum();
            bitmap[(idx / 64) as usize] |= 1 << (idx % 64);
        }
        for j in 0..n {
            let col = &cols[j * n..(j + 1) * n];
            for i in 0..n {
                let c = col[i];
                if c == 0 {
                    continue;
                }
                let before = y[i];
                let mut after = before + c;
                if after >= q[i] {
                    after -= q[i];
                }
                y[i] = after;
                match (before == 0, after == 0) {
                    (true, false) => nonzero += 1,
                    (false, true) => nonzero -= 1,
                    _ => {}
                }
            }
            x[j] += 1;
            if x[j] < q[j] {
                break;
            }
            x[j] = 0;
        }
    }
    let image = bitmap.iter().map(|w| u64::from(w.count_ones())).sum();
    (fixed, image)
}

/// `∏_{i,j} p^{min(e_i, e_j)}` when it fits in 64 bits.
pub fn endomorphism_count(g: &PGroupType) -> Option<u64> {
    let e = g.exponents();
    let mut total = 1u64;
    for &a in e {
        for &b in e {
            total = total.checked_mul(checked_pow(g.p(), u64::from(a.min(b)))?)?;
        }
    }
    Some(total)
}

/// Lexicographic stream of canonical endomorphisms over a range of
/// parameter indices.
#[derive(Debug, Clone)]
pub struct EndoStream {
    layout: Layout,
    range: Range<u64>,
    buf: Vec<u64>,
}

impl EndoStream {
    fn new(layout: Layout, range: Range<u64>) -> Self {
        let buf = vec![0; layout.n * layout.n];
        Self { layout, range, buf }
    }

    /// Parameter indices still to be produced.
    pub fn remaining(&self) -> Range<u64> {
        self.range.clone()
    }

    /// Splits the remaining stream by the first parameter coordinate.
    pub fn partitions(&self) -> Vec<EndoStream> {
        let stride = self.layout.stride;
        let Range { start, end } = self.range;
        let mut out = Vec::new();
        let mut lo = start;
        while lo < end {
            let hi = ((lo / stride + 1) * stride).min(end);
            out.push(Self::new(self.layout.clone(), lo..hi));
            lo = hi;
        }
        out
    }

    fn next_raw(&mut self) -> Option<&[u64]> {
        let idx = self.range.next()?;
        self.layout.decode(idx, &mut self.buf);
        Some(&self.buf)
    }
}

impl Iterator for EndoStream {
    type Item = EndoMatrix;

    fn next(&mut self) -> Option<EndoMatrix> {
        let idx = self.range.next()?;
        self.layout.decode(idx, &mut self.buf);
        Some(self.layout.to_endo(&self.buf))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = usize::try_from(self.range.end - self.range.start).ok();
        (len.unwrap_or(usize::MAX), len)
    }
}

/// Every endomorphism of `g` exactly once, in canonical form.
pub fn enumerate_endomorphisms(g: &PGroupType, budget: &EnumBudget) -> Result<EndoStream> {
    let layout = Layout::new(g, budget)?;
    let total = layout.total;
    Ok(EndoStream::new(layout, 0..total))
}

/// The automorphisms among [`enumerate_endomorphisms`], same order.
pub fn enumerate_automorphisms(
    g: &PGroupType,
    budget: &EnumBudget,
) -> Result<impl Iterator<Item = EndoMatrix>> {
    let mut stream = enumerate_endomorphisms(g, budget)?;
    Ok(std::iter::from_fn(move || loop {
        let layout = stream.layout.clone();
        let raw = stream.next_raw()?;
        if layout.is_automorphism(raw) {
            return Some(layout.to_endo(raw));
        }
    }))
}

/// Number of `x ∈ P` with `φ(x) = x`, by visiting every element.
pub fn brute_fixed_points(em: &EndoMatrix, budget: &EnumBudget) -> Result<u64> {
    let layout = element_layout(em.group(), budget)?;
    Ok(walk(&layout, &layout.entries_of(em), false).0)
}

/// `|P| / |im(Id - φ)|`, the number of twisted conjugacy classes, with the
/// image found by applying `Id - φ` to every element.
pub fn twisted_class_count(em: &EndoMatrix, budget: &EnumBudget) -> Result<u64> {
    let layout = element_layout(em.group(), budget)?;
    let order = budget.check_group(em.group())?;
    let (_, image) = walk(&layout, &layout.entries_of(em), true);
    Ok(order / image)
}

fn element_layout(g: &PGroupType, budget: &EnumBudget) -> Result<Layout> {
    budget.check_group(g)?;
    // element walks never look at the endomorphism count
    Layout::new(g, &EnumBudget::new(u64::MAX, budget.max_group_order)?)
}

/// `{R(ψ)}` or `{Π(ψ)}` over every automorphism `ψ`, by enumeration.
pub fn oracle_spectrum(g: &PGroupType, use_pi: bool, budget: &EnumBudget) -> Result<Spectrum> {
    let stream = enumerate_endomorphisms(g, budget)?;
    let layout = stream.layout.clone();
    let sets: Vec<BTreeSet<Factored>> = stream
        .partitions()
        .into_par_iter()
        .map(|mut part| {
            let mut seen = BTreeSet::new();
            while let Some(raw) = part.next_raw() {
                if !layout.is_automorphism(raw) {
                    continue;
                }
                let em = layout.to_endo(raw);
                let v = if use_pi {
                    crate::spectra::product_number(&em).expect("automorphism")
                } else {
                    em.reidemeister_number()
                };
                seen.insert(v);
            }
            seen
        })
        .collect();
    Ok(sets.into_iter().flatten().collect())
}

/// Outcome of checking one p-group type against every closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellReport {
    pub group: PGroupType,
    pub endomorphisms: u64,
    pub automorphisms: u64,
    pub oracle_r: Spectrum,
    pub closed_r: Spectrum,
    pub oracle_pi: Spectrum,
    pub closed_pi: Spectrum,
    /// automorphisms with `Π` outside `[p^{b+c}, p^Σ]`
    pub bound_violations: u64,
    pub lower_attained: bool,
    pub upper_attained: bool,
    /// automorphisms whose restriction to the depth-`d(e)` subgroup is not an
    /// automorphism of type `e - d(e)`
    pub restrict_failures: u64,
    pub column_failures: u64,
    /// endomorphisms where the lattice, fixed-point walk and class count
    /// disagree, when brute checks were requested
    pub brute_mismatches: Option<u64>,
}

impl CellReport {
    pub fn r_matches(&self) -> bool {
        self.oracle_r == self.closed_r
    }

    pub fn pi_matches(&self) -> bool {
        self.oracle_pi == self.closed_pi
    }

    pub fn bounds_hold(&self) -> bool {
        self.bound_violations == 0 && self.lower_attained && self.upper_attained
    }

    pub fn structure_holds(&self) -> bool {
        self.restrict_failures == 0 && self.column_failures == 0
    }

    pub fn passes(&self) -> bool {
        self.r_matches()
            && self.pi_matches()
            && self.bounds_hold()
            && self.structure_holds()
            && self.brute_mismatches.unwrap_or(0) == 0
    }
}

impl fmt::Display for CellReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} endos={} autos={} R={} Pi={}",
            if self.passes() { "PASS" } else { "FAIL" },
            self.group,
            self.endomorphisms,
            self.automorphisms,
            self.oracle_r,
            self.oracle_pi
        )?;
        if !self.r_matches() {
            write!(f, " expected-R={}", self.closed_r)?;
        }
        if !self.pi_matches() {
            write!(f, " expected-Pi={}", self.closed_pi)?;
        }
        if !self.bounds_hold() {
            write!(
                f,
                " bound-violations={} lower-attained={} upper-attained={}",
                self.bound_violations, self.lower_attained, self.upper_attained
            )?;
        }
        if !self.structure_holds() {
            write!(
                f,
                " restrict-failures={} column-failures={}",
                self.restrict_failures, self.column_failures
            )?;
        }
        if let Some(m) = self.brute_mismatches.filter(|&m| m > 0) {
            write!(f, " brute-mismatches={m}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct CellAcc {
    endos: u64,
    autos: u64,
    r: BTreeSet<u64>,
    pi: BTreeSet<u64>,
    bound_violations: u64,
    restrict_failures: u64,
    column_failures: u64,
    brute_mismatches: u64,
}

impl CellAcc {
    fn merge(mut self, other: CellAcc) -> CellAcc {
        self.endos += other.endos;
        self.autos += other.autos;
        self.r.extend(other.r);
        self.pi.extend(other.pi);
        self.bound_violations += other.bound_violations;
        self.restrict_failures += other.restrict_failures;
        self.column_failures += other.column_failures;
        self.brute_mismatches += other.brute_mismatches;
        self
    }
}

/// Runs every automorphism of `g` through the closed forms: both spectra,
/// the `Π` bounds, the characteristic restriction and the column shape.
/// With `brute`, every endomorphism also gets its fixed points counted
/// three ways, which additionally needs `|P| ≤ max_group_order`.
pub fn verify_cell(g: &PGroupType, budget: &EnumBudget, brute: bool) -> Result<CellReport> {
    let stream = enumerate_endomorphisms(g, budget)?;
    if brute {
        budget.check_group(g)?;
    }
    let layout = stream.layout.clone();
    let p = g.p();
    let dec = abc_decompose(g);
    let lo = dec.lower_exponent();
    let hi = g.total_exponent();
    let order = g.order_u64();
    let sub = PGroupType::new(
        p,
        g.exponents()
            .iter()
            .zip(dec.d())
            .map(|(e, d)| e - d)
            .collect(),
    )?;

    let acc = stream
        .partitions()
        .into_par_iter()
        .map(|mut part| {
            let mut acc = CellAcc::default();
            while let Some(raw) = part.next_raw() {
                acc.endos += 1;
                let auto = layout.is_automorphism(raw);
                if !auto && !brute {
                    continue;
                }
                let em = layout.to_endo(raw);
                let r = em.fixed_point_count().valuation(p);
                if brute {
                    let (fixed, image) = walk(&layout, raw, true);
                    let classes = order.expect("checked") / image;
                    if fixed != p.pow(r as u32) || classes != fixed {
                        acc.brute_mismatches += 1;
                    }
                }
                if !auto {
                    continue;
                }
                acc.autos += 1;
                acc.r.insert(r);
                let pi = crate::spectra::product_number(&em)
                    .expect("automorphism")
                    .valuation(p);
                acc.pi.insert(pi);
                if pi < lo || pi > hi {
                    acc.bound_violations += 1;
                }
                match restrict(&em, dec.d()) {
                    Ok(res) if res.group() == &sub && res.is_automorphism() => {}
                    _ => acc.restrict_failures += 1,
                }
                match column_structure_check(&em) {
                    Ok(cols) if cols.iter().all(|c| c.passes()) => {}
                    _ => acc.column_failures += 1,
                }
            }
            acc
        })
        .reduce(CellAcc::default, CellAcc::merge);

    let powers =
        |set: &BTreeSet<u64>| Spectrum::new(set.iter().map(|&k| Factored::prime_power(p, k)));
    Ok(CellReport {
        group: g.clone(),
        endomorphisms: acc.endos,
        automorphisms: acc.autos,
        oracle_r: powers(&acc.r),
        closed_r: spec_r_pgroup(g),
        oracle_pi: powers(&acc.pi),
        closed_pi: spec_p(g),
        bound_violations: acc.bound_violations,
        lower_attained: acc.pi.first() == Some(&lo),
        upper_attained: acc.pi.last() == Some(&hi),
        restrict_failures: acc.restrict_failures,
        column_failures: acc.column_failures,
        brute_mismatches: brute.then_some(acc.brute_mismatches),
    })
}

/// `SpecR` of a finite abelian group by enumerating every endomorphism of
/// `⊕ Z/n_i` directly, with no Sylow splitting and no lattice arithmetic.
///
/// A homomorphism `Z/n_j → Z/n_i` sends 1 to a multiple of
/// `n_i / gcd(n_i, n_j)`. Bijectivity and fixed points are decided by
/// visiting every element.
pub fn abelian_oracle_spectrum(a: &AbelianGroupType, budget: &EnumBudget) -> Result<Spectrum> {
    let q = a.cyclic_orders().to_vec();
    let n = q.len();
    let order = q
        .iter()
        .try_fold(1u64, |acc, &x| acc.checked_mul(x))
        .filter(|&o| o <= budget.max_group_order)
        .ok_or_else(|| Error::BudgetExceeded(format!("|A| for {a} exceeds max_group_order")))?;
    let mut steps = Vec::with_capacity(n * n);
    let mut radices = Vec::with_capacity(n * n);
    let mut total = 1u64;
    for &qi in &q {
        for &qj in &q {
            let g = num_integer::gcd(qi, qj);
            steps.push(qi / g);
            radices.push(g);
            total = total
                .checked_mul(g)
                .filter(|&t| t <= budget.max_endos)
                .ok_or_else(|| Error::BudgetExceeded(format!("End({a}) exceeds max_endos")))?;
        }
    }
    let spectrum: BTreeMap<u64, ()> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut m = vec![0u64; n * n];
            for k in (0..n * n).rev() {
                m[k] = (idx % radices[k]) * steps[k];
                idx /= radices[k];
            }
            let mut x = vec![0u64; n];
            let mut kernel = 0u64;
            let mut fixed = 0u64;
            for _ in 0..order {
                let mut zero = true;
                let mut same = true;
                for i in 0..n {
                    let y = (0..n).map(|j| m[i * n + j] * x[j] % q[i]).sum::<u64>() % q[i];
                    zero &= y == 0;
                    same &= y == x[i];
                }
                kernel += u64::from(zero);
                fixed += u64::from(same);
                for j in 0..n {
                    x[j] += 1;
                    if x[j] < q[j] {
                        break;
                    }
                    x[j] = 0;
                }
            }
            (kernel == 1).then_some((fixed, ()))
        })
        .collect();
    Ok(spectrum.into_keys().map(Factored::of_u64).collect())
}

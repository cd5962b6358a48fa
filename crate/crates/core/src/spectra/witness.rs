//! Explicit automorphisms realising every spectrum value.
//!
//! A product-number witness is assembled block-diagonally along the
//! abc-decomposition. Each block receives an exponent: b- and c-blocks start
//! at 1, a-blocks at 0, and the remaining budget is handed out left to right
//! up to each block's capacity.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::poly::{companion_matrix, find_irreducible};
use super::AbelianGroupType;
use crate::decomposition::{abc_decompose, Block, BlockKind};
use crate::endo::{big_pow, EndoMatrix, PGroupType};
use crate::error::{Error, Result};
use crate::factored::Factored;
use crate::matrix::IntMatrix;

fn out_of_spectrum(g: &PGroupType, m: u64, lo: u64) -> Error {
    Error::OutOfSpectrum(format!(
        "exponent {m} outside [{lo}, {}] for {g}",
        g.total_exponent()
    ))
}

/// `1 ↦ p^t + 1`, fixing `p^t` elements of `Z/p^k` for `1 ≤ t ≤ k`.
fn cyclic(p: u64, t: u64) -> IntMatrix {
    IntMatrix::diagonal([big_pow(p, t) + 1])
}

/// `[[1,1],[p,1]]` on `Z/p^k ⊕ Z/p^{k'}`, `k' ∈ {k, k+1}`: `p` fixed points,
/// and none besides 0 for `i·φ` with `i ≢ 1`.
fn shear(p: u64) -> IntMatrix {
    IntMatrix::from_rows(&[vec![1u64, 1], vec![p, 1]]).expect("square")
}

fn block_diag(parts: &[IntMatrix]) -> IntMatrix {
    let n = parts.iter().map(IntMatrix::rows).sum();
    let mut out = IntMatrix::zeros(n, n);
    let mut off = 0;
    for part in parts {
        for i in 0..part.rows() {
            for j in 0..part.cols() {
                out[(off + i, off + j)] = part[(i, j)].clone();
            }
        }
        off += part.rows();
    }
    out
}

/// Two copies of `Z/p^k` carrying exponent `t ∈ [0, 2k]`.
fn pair(p: u64, k: u64, t: u64) -> IntMatrix {
    match t {
        0 => companion_matrix(&find_irreducible(p, 2)),
        1 => shear(p),
        _ => {
            let t1 = t.saturating_sub(k).max(1);
            block_diag(&[cyclic(p, t1), cyclic(p, t - t1)])
        }
    }
}

fn capacity(block: &Block) -> u64 {
    block.values.iter().map(|&v| u64::from(v)).sum()
}

fn block_witness(p: u64, block: &Block, t: u64) -> IntMatrix {
    match block.kind {
        BlockKind::C => cyclic(p, t),
        BlockKind::B => {
            if t == 1 {
                shear(p)
            } else {
                let b = u64::from(block.values[0]);
                let t1 = t.saturating_sub(b + 1).max(1);
                block_diag(&[cyclic(p, t1), cyclic(p, t - t1)])
            }
        }
        BlockKind::A => {
            let w = block.len();
            let k = u64::from(block.values[0]);
            if t == 0 {
                return companion_matrix(&find_irreducible(p, w));
            }
            let mut parts = Vec::new();
            let mut rest = t;
            if w % 2 == 1 {
                let first = rest.min(k);
                parts.push(cyclic(p, first));
                rest -= first;
            }
            for _ in 0..w / 2 {
                let share = rest.min(2 * k);
                parts.push(pair(p, k, share));
                rest -= share;
            }
            block_diag(&parts)
        }
    }
}

/// An automorphism `φ` of the p-group `g` with `Π(φ) = p^m`, for
/// `b(e) + c(e) ≤ m ≤ Σ(e)`. For `p = 2` this is also `R(φ) = 2^m`.
pub fn witness(g: &PGroupType, m: u64) -> Result<EndoMatrix> {
    let dec = abc_decompose(g);
    let lo = dec.lower_exponent();
    if m < lo || m > g.total_exponent() {
        return Err(out_of_spectrum(g, m, lo));
    }
    let p = g.p();
    let mut budget = m - lo;
    let parts: Vec<IntMatrix> = dec
        .blocks()
        .iter()
        .map(|block| {
            let floor = u64::from(block.kind != BlockKind::A);
            let raise = budget.min(capacity(block) - floor);
            budget -= raise;
            block_witness(p, block, floor + raise)
        })
        .collect();
    debug_assert_eq!(budget, 0);
    EndoMatrix::new(g, block_diag(&parts))
}

/// An automorphism with `R(φ) = p^m` for `m` in the Reidemeister spectrum
/// exponent range: `[0, Σ(e)]` for odd `p`, `[b(e)+c(e), Σ(e)]` for `p = 2`.
///
/// For odd `p` the witness is diagonal: coordinate `i` is multiplied by
/// `p^{t_i} + 1` (or by 2 when `t_i = 0`), filling the `t_i` left to right.
pub fn reidemeister_witness(g: &PGroupType, m: u64) -> Result<EndoMatrix> {
    let p = g.p();
    if p == 2 {
        return witness(g, m);
    }
    if m > g.total_exponent() {
        return Err(out_of_spectrum(g, m, 0));
    }
    let mut budget = m;
    let diag = g.exponents().iter().map(|&k| {
        let t = budget.min(u64::from(k));
        budget -= t;
        if t == 0 {
            BigInt::from(2)
        } else {
            big_pow(p, t) + 1
        }
    });
    EndoMatrix::new(g, IntMatrix::diagonal(diag.collect::<Vec<_>>()))
}

/// One automorphism per Sylow component, with Reidemeister numbers
/// multiplying to `target`.
pub fn witness_abelian(
    a: &AbelianGroupType,
    target: &Factored,
) -> Result<BTreeMap<u64, EndoMatrix>> {
    let comps = a.sylow_components();
    if let Some(&q) = target.factors().keys().find(|q| !comps.contains_key(q)) {
        return Err(Error::OutOfSpectrum(format!(
            "{target} has prime factor {q} not dividing the order of {a}"
        )));
    }
    comps
        .iter()
        .map(|(&p, g)| Ok((p, reidemeister_witness(g, target.valuation(p))?)))
        .collect()
}

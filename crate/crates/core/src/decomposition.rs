//! The abc-decomposition of a type vector and the characteristic subgroups
//! `⊕ p^{d_i} Z/p^{e_i}` it selects.
//!
//! Blocks are found in three passes over `e`: maximal constant runs of
//! length at least two (a-blocks), then left-to-right pairs `(v, v+1)` among
//! the remaining indices (b-blocks), then every leftover singleton (c-blocks).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::endo::{big_pow, EndoMatrix, PGroupType};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    A,
    B,
    C,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BlockKind::A => "a",
            BlockKind::B => "b",
            BlockKind::C => "c",
        };
        f.write_str(s)
    }
}

/// A contiguous run of `e` (zero-based `start`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub kind: BlockKind,
    pub start: usize,
    pub values: Vec<u32>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> usize {
        self.start + self.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockDecomposition {
    blocks: Vec<Block>,
    a: usize,
    b: usize,
    c: usize,
    d: Vec<u32>,
}

impl BlockDecomposition {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn c(&self) -> usize {
        self.c
    }

    /// `b(e) + c(e)`, the exponent of the lower bound.
    pub fn lower_exponent(&self) -> u64 {
        (self.b + self.c) as u64
    }

    /// The depth sequence `d(e)`.
    pub fn d(&self) -> &[u32] {
        &self.d
    }

    /// Reassembled exponent vector.
    pub fn exponents(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect()
    }

    /// Indices `j` where `e_j` opens a b- or c-block.
    pub fn bc_starts(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.kind != BlockKind::A)
            .map(|b| b.start)
            .collect()
    }

    /// Block membership per index.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.d.len()];
        for (bi, b) in self.blocks.iter().enumerate() {
            out[b.start..b.end()].fill(bi);
        }
        out
    }
}

/// Parenthesised notation, e.g. `((1,1),(2,3),(8))`.
impl fmt::Display for BlockDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({})", crate::endo::join(&b.values))?;
        }
        write!(f, ")")
    }
}

pub fn abc_decompose(g: &PGroupType) -> BlockDecomposition {
    decompose_exponents(g.exponents())
}

/// Decomposition of a nondecreasing exponent vector.
pub fn decompose_exponents(e: &[u32]) -> BlockDecomposition {
    let n = e.len();
    let mut kind: Vec<Option<BlockKind>> = vec![None; n];
    let mut starts: Vec<(usize, usize)> = Vec::new();

    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && e[j] == e[i] {
            j += 1;
        }
        if j - i >= 2 {
            kind[i..j].fill(Some(BlockKind::A));
            starts.push((i, j - i));
        }
        i = j;
    }

    let mut i = 0;
    while i + 1 < n {
        if kind[i].is_none() && kind[i + 1].is_none() && e[i + 1] == e[i] + 1 {
            kind[i] = Some(BlockKind::B);
            kind[i + 1] = Some(BlockKind::B);
            starts.push((i, 2));
            i += 2;
        } else {
            i += 1;
        }
    }

    for (i, k) in kind.iter_mut().enumerate() {
        if k.is_none() {
            *k = Some(BlockKind::C);
            starts.push((i, 1));
        }
    }

    starts.sort_unstable();
    let blocks: Vec<Block> = starts
        .into_iter()
        .map(|(start, len)| Block {
            kind: kind[start].expect("every index is assigned"),
            start,
            values: e[start..start + len].to_vec(),
        })
        .collect();
    let count = |k| blocks.iter().filter(|b| b.kind == k).count();
    let (a, b, c) = (
        count(BlockKind::A),
        count(BlockKind::B),
        count(BlockKind::C),
    );
    let mut dec = BlockDecomposition {
        blocks,
        a,
        b,
        c,
        d: Vec::new(),
    };
    dec.d = d_sequence(&dec);
    dec
}

/// `d_1 = 0`; `d_{i+1}` steps up by one exactly when index `i+1` opens a new
/// b- or c-block.
pub fn d_sequence(dec: &BlockDecomposition) -> Vec<u32> {
    let mut d = Vec::new();
    for block in &dec.blocks {
        for offset in 0..block.len() {
            let next = match d.last() {
                None => 0,
                Some(&prev) if offset == 0 && block.kind != BlockKind::A => prev + 1,
                Some(&prev) => prev,
            };
            d.push(next);
        }
    }
    d
}

/// Whether `⊕ p^{d_i} Z/p^{e_i}` is characteristic: `d` and `e - d` are
/// both nondecreasing.
pub fn is_characteristic(g: &PGroupType, d: &[u32]) -> Result<bool> {
    let e = g.exponents();
    if d.len() != e.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} depths", e.len()),
            found: format!("{} depths", d.len()),
        });
    }
    if let Some(index) = (0..e.len()).find(|&i| d[i] > e[i]) {
        return Err(Error::OutOfRange {
            index,
            depth: d[index],
            exponent: e[index],
        });
    }
    Ok((1..e.len()).all(|i| d[i - 1] <= d[i] && e[i - 1] - d[i - 1] <= e[i] - d[i]))
}

/// The induced endomorphism on the characteristic subgroup of depth `d`,
/// represented by `D⁻¹ M D` with `D = diag(p^{d_i})` on type `e - d`.
pub fn restrict(em: &EndoMatrix, d: &[u32]) -> Result<EndoMatrix> {
    let g = em.group();
    if !is_characteristic(g, d)? {
        return Err(Error::NotCharacteristic);
    }
    let e = g.exponents();
    if let Some(index) = (0..e.len()).find(|&i| d[i] == e[i]) {
        return Err(Error::FullDepth {
            index,
            depth: d[index],
        });
    }
    let p = g.p();
    let n = g.rank();
    let m = em.matrix();
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = &m[(i, j)];
            if x.is_zero() {
                continue;
            }
            // characteristic depth makes every quotient exact
            let scaled = if d[j] >= d[i] {
                x * big_pow(p, u64::from(d[j] - d[i]))
            } else {
                let den = big_pow(p, u64::from(d[i] - d[j]));
                let (q, r) = x.div_rem(&den);
                debug_assert!(r.is_zero(), "non-integral entry in D^-1 M D");
                q
            };
            out[(i, j)] = scaled;
        }
    }
    let sub = PGroupType::new(p, e.iter().zip(d).map(|(a, b)| a - b).collect())?;
    EndoMatrix::new(&sub, out)
}

/// Column `column` of `D⁻¹ M D` reduced mod `p`, for `column` opening a
/// b- or c-block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnReport {
    pub column: usize,
    pub off_diagonal_zero: bool,
    pub diagonal_nonzero: bool,
}

impl ColumnReport {
    pub fn passes(&self) -> bool {
        self.off_diagonal_zero && self.diagonal_nonzero
    }
}

/// Checks the mod-`p` shape of the columns of `D⁻¹ M D` (with `d = d(e)`)
/// that open a b- or c-block: zero off the diagonal, a unit on it.
pub fn column_structure_check(em: &EndoMatrix) -> Result<Vec<ColumnReport>> {
    if !em.is_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let dec = abc_decompose(em.group());
    let restricted = restrict(em, dec.d())?;
    let p = BigInt::from(em.group().p());
    let n = restricted.matrix();
    Ok(dec
        .bc_starts()
        .into_iter()
        .map(|j| ColumnReport {
            column: j,
            off_diagonal_zero: (0..n.rows())
                .filter(|&i| i != j)
                .all(|i| n[(i, j)].is_multiple_of(&p)),
            diagonal_nonzero: !n[(j, j)].is_multiple_of(&p),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const WORKED: [u32; 12] = [1, 1, 2, 3, 4, 4, 6, 7, 8, 10, 12, 13];

    fn ty(p: u64, e: &[u32]) -> PGroupType {
        PGroupType::new(p, e.to_vec()).unwrap()
    }

    fn endo(p: u64, e: &[u32], m: &str) -> EndoMatrix {
        EndoMatrix::new(&ty(p, e), m.parse().unwrap()).unwrap()
    }

    fn kinds(dec: &BlockDecomposition) -> String {
        dec.blocks().iter().map(|b| b.kind.to_string()).collect()
    }

    #[test]
    fn worked_example() {
        let dec = decompose_exponents(&WORKED);
        assert_eq!(
            dec.to_string(),
            "((1,1),(2,3),(4,4),(6,7),(8),(10),(12,13))"
        );
        assert_eq!(kinds(&dec), "ababccb");
        assert_eq!((dec.a(), dec.b(), dec.c()), (2, 3, 2));
        assert_eq!(dec.d(), &[0, 0, 1, 1, 1, 1, 2, 2, 3, 4, 5, 5]);
    }

    #[test]
    fn small_examples() {
        let single = decompose_exponents(&[7]);
        assert_eq!(kinds(&single), "c");
        assert_eq!((single.a(), single.b(), single.c()), (0, 0, 1));
        assert_eq!(single.d(), &[0]);

        let dec = decompose_exponents(&[1, 2, 3]);
        assert_eq!(dec.to_string(), "((1,2),(3))");
        assert_eq!(kinds(&dec), "bc");
        assert_eq!(dec.d(), &[0, 0, 1]);

        let empty = decompose_exponents(&[]);
        assert!(empty.blocks().is_empty());
        assert_eq!((empty.a(), empty.b(), empty.c()), (0, 0, 0));
        assert!(empty.d().is_empty());

        // b-blocks are taken from the left
        assert_eq!(
            decompose_exponents(&[1, 2, 3, 4]).to_string(),
            "((1,2),(3,4))"
        );
        assert_eq!(
            decompose_exponents(&[2, 3, 4, 6, 6]).to_string(),
            "((2,3),(4),(6,6))"
        );
    }

    #[test]
    fn characteristic_examples() {
        assert!(is_characteristic(&ty(2, &[1, 2]), &[0, 1]).unwrap());
        assert!(!is_characteristic(&ty(2, &[1, 2]), &[1, 0]).unwrap());
        assert!(!is_characteristic(&ty(2, &[2, 2]), &[0, 1]).unwrap());
        assert_eq!(
            is_characteristic(&ty(2, &[1, 2]), &[2, 2]),
            Err(Error::OutOfRange {
                index: 0,
                depth: 2,
                exponent: 1
            })
        );
    }

    #[test]
    fn restrict_examples() {
        let em = endo(2, &[1, 3], "1,0;4,1");
        assert_eq!(restrict(&em, &[0, 0]).unwrap(), em);
        let r = restrict(&em, &[0, 1]).unwrap();
        assert_eq!(r.group(), &ty(2, &[1, 2]));
        assert_eq!(r.matrix().to_string(), "1,0;2,1");

        let b = endo(2, &[2, 3], "1,1;2,1");
        let d = abc_decompose(b.group());
        assert_eq!(d.d(), &[0, 0]);
        assert_eq!(restrict(&b, d.d()).unwrap(), b);

        assert_eq!(restrict(&b, &[1, 0]), Err(Error::NotCharacteristic));
        assert_eq!(
            restrict(&endo(2, &[1, 1], "1,0;0,1"), &[1, 1]),
            Err(Error::FullDepth { index: 0, depth: 1 })
        );
    }

    #[test]
    fn column_examples() {
        let cyc = column_structure_check(&endo(2, &[3], "5")).unwrap();
        assert_eq!(cyc.len(), 1);
        assert!(cyc[0].passes());

        let b = column_structure_check(&endo(2, &[2, 3], "1,1;2,1")).unwrap();
        assert_eq!(
            b,
            vec![ColumnReport {
                column: 0,
                off_diagonal_zero: true,
                diagonal_nonzero: true
            }]
        );

        let c = endo(3, &[1, 3], "1,0;9,1");
        assert_eq!(
            restrict(&c, &[0, 1]).unwrap().matrix().to_string(),
            "1,0;3,1"
        );
        let report = column_structure_check(&c).unwrap();
        assert_eq!(
            report.iter().map(|r| r.column).collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert!(report.iter().all(ColumnReport::passes));

        assert_eq!(
            column_structure_check(&endo(2, &[1, 1], "1,1;1,1")),
            Err(Error::NotAutomorphism)
        );
    }

    fn exponent_vectors() -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(1u32..=9, 0..=12).prop_map(|mut v| {
            v.sort_unstable();
            v
        })
    }

    proptest! {
        #[test]
        fn blocks_partition_e(e in exponent_vectors()) {
            let dec = decompose_exponents(&e);
            prop_assert_eq!(dec.exponents(), e.clone());
            prop_assert_eq!(dec.a() + dec.b() + dec.c(), dec.blocks().len());
            let mut next = 0;
            for b in dec.blocks() {
                prop_assert_eq!(b.start, next);
                next = b.end();
                match b.kind {
                    BlockKind::A => {
                        prop_assert!(b.len() >= 2);
                        prop_assert!(b.values.iter().all(|&v| v == b.values[0]));
                        // maximal
                        prop_assert!(b.start == 0 || e[b.start - 1] != b.values[0]);
                        prop_assert!(b.end() == e.len() || e[b.end()] != b.values[0]);
                    }
                    BlockKind::B => {
                        prop_assert_eq!(b.len(), 2);
                        prop_assert_eq!(b.values[1], b.values[0] + 1);
                    }
                    BlockKind::C => prop_assert_eq!(b.len(), 1),
                }
            }
            // a c-block right before a b-block sits at least two below it
            for w in dec.blocks().windows(2) {
                if w[0].kind == BlockKind::C && w[1].kind == BlockKind::B {
                    prop_assert!(w[1].values[0] >= w[0].values[0] + 2);
                }
            }
        }

        #[test]
        fn depth_sequence_properties(e in exponent_vectors()) {
            let dec = decompose_exponents(&e);
            let d = dec.d();
            let starts = dec.bc_starts();
            let n = e.len();
            if n > 0 {
                prop_assert_eq!(d[0], 0);
            }
            for i in 0..n {
                prop_assert!(d[i] < e[i]);
                for j in i + 1..n {
                    prop_assert!(d[i] <= d[j]);
                    if starts.contains(&j) {
                        prop_assert!(d[i] < d[j]);
                    }
                    let (dd, de) = (i64::from(d[j]) - i64::from(d[i]), i64::from(e[j]) - i64::from(e[i]));
                    prop_assert!(dd <= de);
                    if starts.contains(&i) {
                        prop_assert!(dd < de);
                    }
                }
            }
            let g = PGroupType::new(2, e.clone()).unwrap();
            prop_assert!(is_characteristic(&g, d).unwrap());
        }
    }
}

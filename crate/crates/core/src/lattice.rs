//! Smith reduction, lattice indices and determinants modulo a prime.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Diagonal of the Smith normal form of `m`, of length `min(rows, cols)`.
///
/// Every invariant is nonnegative, each nonzero one divides the next, and
/// zeros come last. The pivot at each stage is the entry of smallest nonzero
/// absolute value, ties going to the lowest row and then the lowest column.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let steps = rows.min(cols);
    let mut out = Vec::with_capacity(steps);

    for k in 0..steps {
        loop {
            let Some((pi, pj)) = min_pivot(&a, k, cols) else {
                out.resize(steps, BigInt::zero());
                return out;
            };
            a.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }

            let mut clean = true;
            for i in k + 1..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = &a[i][k] / &a[k][k];
                if !q.is_zero() {
                    let (top, rest) = a.split_at_mut(i);
                    for (x, y) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                        *x -= &q * y;
                    }
                }
                clean &= a[i][k].is_zero();
            }
            for j in k + 1..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = &a[k][j] / &a[k][k];
                if !q.is_zero() {
                    for row in a.iter_mut().skip(k) {
                        let t = &q * &row[k];
                        row[j] -= t;
                    }
                }
                clean &= a[k][j].is_zero();
            }
            if !clean {
                continue;
            }

            // pivot must divide the whole remaining block
            let bad_row =
                (k + 1..rows).find(|&i| (k + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[k][k])));
            match bad_row {
                Some(i) => {
                    let (top, rest) = a.split_at_mut(i);
                    for (x, y) in top[k][k..].iter_mut().zip(&rest[0][k..]) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        out.push(a[k][k].abs());
    }
    out
}

fn min_pivot(a: &[Vec<BigInt>], k: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(k) {
        for (j, v) in row.iter().enumerate().take(cols).skip(k) {
            if v.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => v.magnitude() < a[bi][bj].magnitude(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

/// The index `[Z^n : L]` where `L` is spanned by the columns of `generators`.
pub fn lattice_index(generators: &IntMatrix) -> Result<BigUint> {
    let n = generators.rows();
    if generators.cols() < n {
        return Err(Error::RankDeficient(n));
    }
    let invariants = smith_invariants(generators);
    let mut index = BigUint::one();
    for s in invariants {
        if s.is_zero() {
            return Err(Error::RankDeficient(n));
        }
        index *= s.magnitude();
    }
    Ok(index)
}

/// Determinant of a square matrix reduced into `[0, p)`.
///
/// Panics if the matrix is not square.
pub fn det_mod_p(m: &IntMatrix, p: u64) -> u64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let pb = BigInt::from(p);
    let residues: Vec<u64> = m
        .entries()
        .iter()
        .map(|x| x.mod_floor(&pb).to_u64().expect("residue below p"))
        .collect();
    det_mod_p_u64(residues, m.rows(), p)
}

/// Determinant over the `p`-element field of a row-major `n×n` matrix whose
/// entries are already in `[0, p)`.
pub(crate) fn det_mod_p_u64(mut a: Vec<u64>, n: usize, p: u64) -> u64 {
    let mut det = 1 % p;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return 0;
        };
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = (p - det) % p;
        }
        let pivot = a[k * n + k];
        det = mul_mod(det, pivot, p);
        let inv = inverse_mod(pivot, p).expect("nonzero residue is invertible mod a prime");
        for i in k + 1..n {
            let f = mul_mod(a[i * n + k], inv, p);
            if f == 0 {
                continue;
            }
            for j in k..n {
                let t = mul_mod(f, a[k * n + j], p);
                a[i * n + j] = (a[i * n + j] + p - t) % p;
            }
        }
    }
    det
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

/// Exponent `k` with `[Z^n : L] = p^k`, for a lattice `L` known to contain
/// `p^top · Z^n`, given its generators as residues modulo `p^top`.
///
/// `columns` is row-major `n × m` with every entry in `[0, p^top)`; the caller
/// guarantees `p^top` fits in a `u64`. Reduction happens over the local ring
/// `Z/p^top`, pivoting on an entry of least valuation each round.
pub(crate) fn local_index_exponent(
    mut columns: Vec<u64>,
    n: usize,
    m: usize,
    p: u64,
    top: u32,
) -> u64 {
    let q = p.pow(top);
    let mut live_rows: Vec<usize> = (0..n).collect();
    let mut live_cols: Vec<usize> = (0..m).collect();
    let mut exponent = 0u64;

    while !live_rows.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (ri, &i) in live_rows.iter().enumerate() {
            for (ci, &j) in live_cols.iter().enumerate() {
                let x = columns[i * m + j];
                if x == 0 {
                    continue;
                }
                let v = valuation_u64(x, p);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, ri, ci));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, ri, ci)) = best else {
            break;
        };
        let pr = live_rows[ri];
        let pc = live_cols[ci];
        let pv = p.pow(v);
        let unit_inv =
            inverse_mod((columns[pr * m + pc] / pv) % q, q).expect("pivot cofactor is a unit");
        for &i in &live_rows {
            if i == pr {
                continue;
            }
            let x = columns[i * m + pc];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x / pv, unit_inv, q);
            for &j in &live_cols {
                let t = mul_mod(f, columns[pr * m + j], q);
                let cell = &mut columns[i * m + j];
                *cell = if *cell >= t { *cell - t } else { *cell + q - t };
            }
        }
        exponent += u64::from(v);
        live_rows.swap_remove(ri);
        live_cols.swap_remove(ci);
    }
    exponent + live_rows.len() as u64 * u64::from(top)
}

fn valuation_u64(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Sign-normalised residue helper shared by callers that reduce into `[0, m)`.
pub(crate) fn reduce(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    debug_assert!(r.sign() != Sign::Minus);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn mat(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Index of the lattice spanned by `gens` (columns, each a vector in Z^n)
    /// together with `k·Z^n`, by closing the span inside `(Z/k)^n`.
    fn brute_index(gens: &[Vec<i64>], n: usize, k: i64) -> u64 {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut frontier = vec![vec![0i64; n]];
        seen.insert(vec![0; n]);
        while let Some(v) = frontier.pop() {
            for g in gens {
                let w: Vec<i64> = v
                    .iter()
                    .zip(g)
                    .map(|(a, b)| (a + b).rem_euclid(k))
                    .collect();
                if seen.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        (k as u64).pow(n as u32) / seen.len() as u64
    }

    #[test]
    fn index_examples() {
        // columns (2,0), (0,3)
        assert_eq!(lattice_index(&mat("2,0;0,3")).unwrap(), BigUint::from(6u32));
        assert_eq!(
            lattice_index(&IntMatrix::identity(4)).unwrap(),
            BigUint::one()
        );
        // columns (2,0), (1,1), (0,4); residues of Z^2 counted inside [0,8)^2
        let gens = vec![vec![2, 0], vec![1, 1], vec![0, 4]];
        let expected = brute_index(&gens, 2, 8);
        assert_eq!(expected, 2);
        assert_eq!(
            lattice_index(&mat("2,1,0;0,1,4")).unwrap(),
            BigUint::from(expected)
        );
    }

    #[test]
    fn index_rank_deficient() {
        assert_eq!(lattice_index(&mat("1,2;2,4")), Err(Error::RankDeficient(2)));
        assert_eq!(lattice_index(&mat("1;0")), Err(Error::RankDeficient(2)));
        assert_eq!(
            lattice_index(&IntMatrix::zeros(0, 0)).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariants(&mat("4,0;0,6")), ints(&[2, 12]));
        assert_eq!(smith_invariants(&IntMatrix::identity(3)), ints(&[1, 1, 1]));
        assert_eq!(smith_invariants(&IntMatrix::zeros(2, 2)), ints(&[0, 0]));
        assert_eq!(
            smith_invariants(&mat("2,4,4;-6,6,12;10,-4,-16")),
            ints(&[2, 6, 12])
        );
        assert_eq!(smith_invariants(&mat("0,0;0,5;0,0")), ints(&[5, 0]));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_mod_p(&mat("1,1;2,1"), 2), 1);
        assert_eq!(det_mod_p(&IntMatrix::identity(3), 7), 1);
        assert_eq!(det_mod_p(&mat("1,1;1,1"), 3), 0);
        assert_eq!(det_mod_p(&mat("0,1;1,0"), 5), 4);
        assert_eq!(det_mod_p(&IntMatrix::zeros(0, 0), 5), 1);
    }

    fn leibniz_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * leibniz_det(&minor)
            })
            .sum()
    }

    fn small_square() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4)
            .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..=6, n), n))
    }

    proptest! {
        #[test]
        fn full_rank_index_is_abs_det(rows in small_square()) {
            let d = leibniz_det(&rows);
            let m = IntMatrix::from_rows(&rows).unwrap();
            match lattice_index(&m) {
                Ok(idx) => prop_assert_eq!(BigInt::from(idx), BigInt::from(d.abs())),
                Err(_) => prop_assert_eq!(d, 0),
            }
        }

        #[test]
        fn det_mod_p_matches_leibniz(rows in small_square(), pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let m = IntMatrix::from_rows(&rows).unwrap();
            prop_assert_eq!(det_mod_p(&m, p), leibniz_det(&rows).rem_euclid(p as i64) as u64);
        }

        #[test]
        fn smith_chain_divides(rows in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)|
            prop::collection::vec(prop::collection::vec(-20i64..=20, c), r)))
        {
            let s = smith_invariants(&IntMatrix::from_rows(&rows).unwrap());
            for w in s.windows(2) {
                if w[1].is_zero() { continue; }
                prop_assert!(!w[0].is_zero());
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }

        #[test]
        fn index_matches_brute_force(
            n in 1usize..=3,
            k in 2i64..=6,
            gens in prop::collection::vec(prop::collection::vec(-9i64..=9, 3), 0..4),
        ) {
            let gens: Vec<Vec<i64>> = gens.into_iter().map(|g| g[..n].to_vec()).collect();
            let mut all = gens.clone();
            for i in 0..n {
                let mut e = vec![0; n];
                e[i] = k;
                all.push(e);
            }
            let cols = IntMatrix::from_rows(&all).unwrap().transpose();
            let idx = lattice_index(&cols).unwrap();
            prop_assert_eq!(idx, BigUint::from(brute_index(&gens, n, k)));
        }

        #[test]
        fn redundant_generators_keep_index(rows in small_square(), coeffs in prop::collection::vec(-3i64..=3, 4)) {
            let m = IntMatrix::from_rows(&rows).unwrap();
            let Ok(idx) = lattice_index(&m) else { return Ok(()); };
            let n = rows.len();
            // append a column that is an integer combination of the others
            let extra: Vec<i64> = (0..n).map(|i| (0..n).map(|j| coeffs[j] * rows[i][j]).sum()).collect();
            let ext = m.hconcat(&IntMatrix::from_rows(&extra.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()).unwrap();
            prop_assert_eq!(lattice_index(&ext).unwrap(), idx);
        }

        #[test]
        fn local_index_matches_smith(
            pi in 0usize..3,
            top in 1u32..=3,
            n in 1usize..=3,
            raw in prop::collection::vec(0u64..1000, 9),
        ) {
            let p = [2u64, 3, 5][pi];
            let q = p.pow(top);
            let a: Vec<u64> = raw[..n * n].iter().map(|x| x % q).collect();
            // [A | q·I]
            let m = 2 * n;
            let mut cols = vec![0u64; n * m];
            let mut big = IntMatrix::zeros(n, m);
            for i in 0..n {
                for j in 0..n {
                    cols[i * m + j] = a[i * n + j];
                    big[(i, j)] = BigInt::from(a[i * n + j]);
                }
                big[(i, n + i)] = BigInt::from(q);
            }
            let k = local_index_exponent(cols, n, m, p, top);
            let idx = lattice_index(&big).unwrap();
            prop_assert_eq!(idx, num_traits::pow::pow(BigUint::from(p), k as usize));
        }
    }
}

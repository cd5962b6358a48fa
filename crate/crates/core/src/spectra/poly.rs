//! Monic polynomials over `F_p` and their companion matrices.

use std::fmt;

use num_bigint::BigInt;

use crate::matrix::IntMatrix;

/// Coefficients from the constant term up; the leading coefficient is an
/// implicit 1 and is not stored, so `x - 1` is `[-1]` and `x` is `[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<i64>,
}

impl Poly {
    /// Monic polynomial `x^n + c_{n-1} x^{n-1} + … + c_0`.
    pub fn monic(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Lower coefficients `c_0, …, c_{n-1}`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn residues(&self, p: u64) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut terms = vec![monomial(1, n)];
        for k in (0..n).rev() {
            let c = self.coeffs[k];
            if c != 0 {
                terms.push(monomial(c, k));
            }
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {t}")),
            }
        }
        write!(f, "{out}")
    }
}

fn monomial(c: i64, k: usize) -> String {
    let var = match k {
        0 => String::new(),
        1 => "x".to_string(),
        _ => format!("x^{k}"),
    };
    match (c, k) {
        (_, 0) => c.to_string(),
        (1, _) => var,
        (-1, _) => format!("-{var}"),
        _ => format!("{c}{var}"),
    }
}

/// Remainder of the monic `f` (full coefficient list, low to high, leading 1
/// included) on division by the monic `g`, over `F_p`.
fn rem_monic(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (k, &gk) in g.iter().enumerate() {
                let sub = ((lead as u128 * gk as u128) % p as u128) as u64;
                r[shift + k] = (r[shift + k] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

/// Full coefficient vector (leading 1 included) of the monic polynomial of
/// degree `n` with index `idx`, base-`p` digits with the `x^{n-1}`
/// coefficient most significant.
fn monic_from_index(mut idx: u128, n: usize, p: u64) -> Vec<u64> {
    let mut c = vec![0u64; n + 1];
    c[n] = 1;
    for slot in c.iter_mut().take(n) {
        *slot = (idx % p as u128) as u64;
        idx /= p as u128;
    }
    c
}

/// Irreducibility over `F_p` by trial division by every monic polynomial of
/// degree at most `deg f / 2`.
pub fn is_irreducible(f: &Poly, p: u64) -> bool {
    let n = f.degree();
    if n == 0 {
        return false;
    }
    let mut full = f.residues(p);
    full.push(1);
    for d in 1..=n / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, d, p);
            if rem_monic(&full, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible of degree `n ≥ 1` over `F_p`, ordering
/// coefficient tuples `(c_{n-1}, …, c_0)` lexicographically.
pub fn find_irreducible(p: u64, n: usize) -> Poly {
    assert!(n >= 1, "degree must be positive");
    let count = (p as u128).saturating_pow(n as u32);
    for idx in 0..count {
        let full = monic_from_index(idx, n, p);
        let f = Poly::monic(full[..n].iter().map(|&c| c as i64).collect());
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Companion matrix: ones on the subdiagonal, last column `-c_0, …, -c_{n-1}`.
pub fn companion_matrix(f: &Poly) -> IntMatrix {
    let n = f.degree();
    let mut m = IntMatrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = BigInt::from(1);
    }
    for (i, &c) in f.coeffs().iter().enumerate() {
        m[(i, n - 1)] = -BigInt::from(c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reducible monics of degree `n`, by multiplying out every pair of
    /// monic factors of complementary degrees.
    fn reducible_set(p: u64, n: usize) -> std::collections::HashSet<Vec<u64>> {
        let mut out = std::collections::HashSet::new();
        for d in 1..n {
            for i in 0..(p as u128).pow(d as u32) {
                let a = monic_from_index(i, d, p);
                for j in 0..(p as u128).pow((n - d) as u32) {
                    let b = monic_from_index(j, n - d, p);
                    let mut prod = vec![0u64; n + 1];
                    for (x, &ax) in a.iter().enumerate() {
                        for (y, &by) in b.iter().enumerate() {
                            prod[x + y] = (prod[x + y] + ax * by) % p;
                        }
                    }
                    out.insert(prod);
                }
            }
        }
        out
    }

    #[test]
    fn smallest_irreducibles() {
        assert_eq!(find_irreducible(2, 2).coeffs(), &[1, 1]);
        assert_eq!(find_irreducible(2, 3).coeffs(), &[1, 1, 0]);
        assert_eq!(find_irreducible(3, 1).coeffs(), &[0]);
        assert_eq!(find_irreducible(3, 2).coeffs(), &[1, 0]);
        assert_eq!(find_irreducible(2, 2).to_string(), "x^2 + x + 1");
        assert_eq!(find_irreducible(2, 3).to_string(), "x^3 + x + 1");
        assert_eq!(find_irreducible(3, 2).to_string(), "x^2 + 1");
    }

    #[test]
    fn companion_examples() {
        let f = find_irreducible(2, 2);
        assert_eq!(companion_matrix(&f).to_string(), "0,-1;1,-1");
        assert_eq!(companion_matrix(&Poly::monic(vec![-1])).to_string(), "1");
        assert_eq!(Poly::monic(vec![-1]).to_string(), "x - 1");
        assert_eq!(Poly::monic(vec![2, 0, -3]).to_string(), "x^3 - 3x^2 + 2");
    }

    #[test]
    fn irreducible_counts() {
        // number of monic irreducibles of degree n over F_p
        for (p, n, expected) in [
            (2u64, 2usize, 1usize),
            (2, 3, 2),
            (2, 4, 3),
            (3, 2, 3),
            (3, 3, 8),
            (5, 2, 10),
        ] {
            let count = (0..(p as u128).pow(n as u32))
                .filter(|&i| {
                    let full = monic_from_index(i, n, p);
                    is_irreducible(
                        &Poly::monic(full[..n].iter().map(|&c| c as i64).collect()),
                        p,
                    )
                })
                .count();
            assert_eq!(count, expected, "p={p} n={n}");
        }
    }

    proptest! {
        #[test]
        fn trial_division_agrees_with_factor_products(
            (p, n) in prop_oneof![Just(2u64), Just(3), Just(5)].prop_flat_map(|p| (Just(p), 1usize..=4)),
        ) {
            let reducible = reducible_set(p, n);
            for i in 0..(p as u128).pow(n as u32) {
                let full = monic_from_index(i, n, p);
                let f = Poly::monic(full[..n].iter().map(|&c| c as i64).collect());
                prop_assert_eq!(is_irreducible(&f, p), !reducible.contains(&full));
            }
        }

        #[test]
        fn found_polynomial_is_first_irreducible(
            (p, n) in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)].prop_flat_map(|p| (Just(p), 1usize..=4)),
        ) {
            let reducible = reducible_set(p, n);
            let first = (0..(p as u128).pow(n as u32))
                .map(|i| monic_from_index(i, n, p))
                .find(|full| !reducible.contains(full))
                .unwrap();
            let f = find_irreducible(p, n);
            let got: Vec<u64> = f.coeffs().iter().map(|&c| c as u64).chain([1]).collect();
            prop_assert_eq!(got, first);
        }
    }
}

//! Tabulated Conway polynomials for the small odd characteristics used here.
//!
//! Entries are coefficient lists, low degree first, monic leading term
//! included. The brute-force search below recomputes them from the
//! definition and the test suite checks every tabulated entry it can reach.

use super::poly::{divisors, FpPoly};

const TABLE: &[(u32, &[u32])] = &[
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (3, &[1, 2, 0, 0, 0, 1]),
    (3, &[2, 2, 1, 0, 2, 0, 1]),
    (3, &[1, 0, 2, 0, 0, 0, 0, 1]),
    (3, &[2, 2, 2, 0, 1, 2, 0, 0, 1]),
    (3, &[1, 1, 2, 2, 0, 0, 0, 0, 0, 1]),
    (3, &[2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1]),
    (3, &[1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (3, &[2, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 1]),
    (3, &[1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (5, &[3, 4, 0, 0, 0, 1]),
    (5, &[2, 0, 1, 4, 1, 0, 1]),
    (5, &[3, 3, 0, 0, 0, 0, 0, 1]),
    (5, &[2, 4, 3, 0, 1, 0, 0, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
    (7, &[4, 1, 0, 0, 0, 1]),
    (7, &[3, 6, 4, 5, 1, 0, 1]),
    (7, &[4, 6, 0, 0, 0, 0, 0, 1]),
    (11, &[9, 1]),
    (11, &[2, 7, 1]),
    (11, &[9, 2, 0, 1]),
    (11, &[2, 10, 8, 0, 1]),
    (13, &[11, 1]),
    (13, &[2, 12, 1]),
    (13, &[11, 2, 0, 1]),
];

/// Looks up the tabulated Conway polynomial of degree `n` over `F_p`.
pub(crate) fn lookup(p: u32, n: usize) -> Option<Vec<u32>> {
    TABLE
        .iter()
        .find(|(tp, coeffs)| *tp == p && coeffs.len() == n + 1)
        .map(|(_, coeffs)| coeffs.to_vec())
}

/// Whether the root `x` of `f` (degree `n`) is compatible with the given
/// lower-degree Conway polynomials: for each proper divisor `d`, the norm
/// `x^((p^n-1)/(p^d-1))` must be a root of `conway(d)`.
pub(crate) fn is_compatible(f: &FpPoly, lower: &dyn Fn(usize) -> Option<FpPoly>) -> bool {
    let p = f.p as u64;
    let n = f.degree().unwrap_or(0) as u64;
    let full = p.pow(n as u32) - 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let Some(cd) = lower(d as usize) else {
            return false;
        };
        let exponent = full / (p.pow(d as u32) - 1);
        let beta = FpPoly::x(f.p).pow_mod(exponent, f);
        // Horner evaluation of cd at beta, modulo f.
        let mut acc = FpPoly::new(f.p, vec![]);
        for &c in cd.coeffs.iter().rev() {
            acc = acc.mul_mod(&beta, f);
            acc = acc.sub(&FpPoly::new(f.p, vec![(f.p - c) % f.p]));
        }
        if !acc.is_zero() {
            return false;
        }
    }
    true
}

/// Recomputes the Conway polynomial of degree `n` from its definition by
/// scanning candidates in Conway order. Only feasible for small `p^n`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn search(p: u32, n: usize, lower: &dyn Fn(usize) -> Option<FpPoly>) -> Option<FpPoly> {
    let total = (p as u64).pow(n as u32);
    for idx in 0..total {
        // idx enumerates (a_{n-1}, ..., a_0) lexicographically, a_{n-1} most significant.
        let mut a = vec![0u32; n];
        let mut rest = idx;
        for slot in a.iter_mut() {
            *slot = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        let mut coeffs = vec![0u32; n + 1];
        coeffs[n] = 1;
        for i in 0..n {
            let sign_negative = (n - i) % 2 == 1;
            coeffs[i] = if sign_negative { (p - a[i]) % p } else { a[i] };
        }
        let f = FpPoly::new(p, coeffs);
        if f.coeffs[0] == 0 {
            continue;
        }
        if f.is_primitive() && is_compatible(&f, lower) {
            return Some(f);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn recompute(p: u32, max_n: usize) -> HashMap<usize, FpPoly> {
        let mut found: HashMap<usize, FpPoly> = HashMap::new();
        for n in 1..=max_n {
            let snapshot = found.clone();
            let lower = move |d: usize| snapshot.get(&d).cloned();
            let f = search(p, n, &lower).expect("Conway polynomial exists");
            found.insert(n, f);
        }
        found
    }

    fn check_range(ranges: &[(u32, usize)]) {
        for &(p, max_n) in ranges {
            let computed = recompute(p, max_n);
            for n in 1..=max_n {
                if let Some(tab) = lookup(p, n) {
                    assert_eq!(
                        computed[&n].coeffs, tab,
                        "tabulated Conway polynomial for p={p}, n={n} is wrong"
                    );
                }
            }
        }
    }

    #[test]
    fn table_matches_definition() {
        check_range(&[(3, 13), (5, 8), (7, 7), (11, 4), (13, 3)]);
    }

    #[test]
    fn every_entry_is_primitive_and_compatible() {
        for (p, coeffs) in TABLE {
            let f = FpPoly::new(*p, coeffs.to_vec());
            assert!(f.is_primitive(), "p={p} coeffs={coeffs:?}");
            let lower = |d: usize| lookup(*p, d).map(|c| FpPoly::new(*p, c));
            assert!(is_compatible(&f, &lower), "p={p} coeffs={coeffs:?}");
        }
    }
}

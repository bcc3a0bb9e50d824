//! Dense polynomials over a prime field `F_p`, used while choosing the
//! defining modulus of a tower and for the Conway-polynomial checks.
//!
//! Coefficients are stored low degree first and are always reduced into
//! `0..p`. The zero polynomial is the empty vector.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct FpPoly {
    pub(crate) p: u32,
    pub(crate) coeffs: Vec<u32>,
}

fn mod_inv(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and small.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p as u64 - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

impl FpPoly {
    pub(crate) fn new(p: u32, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut poly = FpPoly { p, coeffs };
        poly.trim();
        poly
    }

    pub(crate) fn x(p: u32) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub(crate) fn one(p: u32) -> Self {
        FpPoly::new(p, vec![1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub(crate) fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn sub(&self, other: &FpPoly) -> FpPoly {
        let p = self.p;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        FpPoly::new(p, coeffs)
    }

    pub(crate) fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let p = self.p as u64;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % p;
            }
        }
        FpPoly::new(self.p, out.into_iter().map(|c| c as u32).collect())
    }

    /// Remainder of division by `m` (which must be nonzero).
    pub(crate) fn rem(&self, m: &FpPoly) -> FpPoly {
        let dm = m.degree().expect("division by zero polynomial");
        let p = self.p as u64;
        let lead_inv = mod_inv(*m.coeffs.last().unwrap(), self.p) as u64;
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let top = *r.last().unwrap() as u64;
            if top != 0 {
                let factor = top * lead_inv % p;
                let shift = r.len() - 1 - dm;
                for (k, &mc) in m.coeffs.iter().enumerate() {
                    let idx = shift + k;
                    r[idx] = ((r[idx] as u64 + p * p - factor * mc as u64 % p) % p) as u32;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        FpPoly::new(self.p, r)
    }

    pub(crate) fn mul_mod(&self, other: &FpPoly, m: &FpPoly) -> FpPoly {
        self.mul(other).rem(m)
    }

    pub(crate) fn pow_mod(&self, mut exp: u64, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly::one(self.p).rem(m);
        let mut base = self.rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            exp >>= 1;
        }
        result
    }

    pub(crate) fn gcd(&self, other: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.coeffs.last() {
            let inv = mod_inv(lead, a.p) as u64;
            let p = a.p as u64;
            let coeffs = a.coeffs.iter().map(|&c| (c as u64 * inv % p) as u32).collect();
            a = FpPoly::new(a.p, coeffs);
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `n`.
    pub(crate) fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            Some(0) | None => return false,
            Some(n) => n as u64,
        };
        let p = self.p as u64;
        let x = FpPoly::x(self.p);
        // x^(p^n) == x mod f
        let mut frob = x.clone();
        for _ in 0..n {
            frob = frob.pow_mod(p, self);
        }
        if frob != x.rem(self) {
            return false;
        }
        for r in prime_factors(n) {
            let k = n / r;
            let mut h = x.clone();
            for _ in 0..k {
                h = h.pow_mod(p, self);
            }
            let g = h.sub(&x).gcd(self);
            if g.degree() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Whether the class of `x` has multiplicative order `p^n - 1` modulo this
    /// (irreducible, degree `n`) polynomial.
    pub(crate) fn is_primitive(&self) -> bool {
        let n = match self.degree() {
            Some(n) if n > 0 => n as u32,
            _ => return false,
        };
        if !self.is_irreducible() {
            return false;
        }
        let order = (self.p as u64).pow(n) - 1;
        let x = FpPoly::x(self.p);
        let one = FpPoly::one(self.p);
        prime_factors(order)
            .into_iter()
            .all(|r| x.pow_mod(order / r, self) != one)
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

pub(crate) fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabin_matches_known_cases() {
        // x^2 + 1 is irreducible over F_3, x^2 + 2 = (x+1)(x+2) is not.
        assert!(FpPoly::new(3, vec![1, 0, 1]).is_irreducible());
        assert!(!FpPoly::new(3, vec![2, 0, 1]).is_irreducible());
        // x^4 + x + 2 over F_3 is irreducible (primitive, in fact).
        assert!(FpPoly::new(3, vec![2, 1, 0, 0, 1]).is_irreducible());
    }

    #[test]
    fn primitivity_distinguishes_x2_plus_1() {
        // Over F_3, x^2+1 is irreducible but x has order 4, not 8.
        assert!(!FpPoly::new(3, vec![1, 0, 1]).is_primitive());
        assert!(FpPoly::new(3, vec![2, 2, 1]).is_primitive());
    }

    #[test]
    fn gcd_is_monic() {
        let a = FpPoly::new(5, vec![4, 0, 1]); // x^2 - 1
        let b = FpPoly::new(5, vec![2, 2]); // 2(x + 1)
        assert_eq!(a.gcd(&b), FpPoly::new(5, vec![1, 1]));
    }
}

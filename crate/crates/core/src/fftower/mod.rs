//! Exact arithmetic in one fixed ambient field `F_{p^N}`.
//!
//! Every finite field that appears in a computation lives inside a single
//! [`FieldTower`]: the residue field `F_q` (with `q = p^k`), the coefficient
//! fields `F_{q^n}` and anything needed to hold Artin–Schreier roots. The
//! ambient degree is `N = k * lcm(levels)`.
//!
//! Elements are stored as their coefficient vector in the power basis of a
//! root of the defining modulus, packed into a `u32` with the constant
//! coefficient as the most significant base-`p` digit. The packed order is
//! therefore the lexicographic order of the little-endian coefficient
//! vectors, which is the canonical order used for every point set.
//! Multiplication and addition go through log/antilog and Zech tables.

mod conway;
mod poly;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::modlinalg;
use poly::FpPoly;

pub(crate) use poly::{is_prime, prime_factors};

/// Largest ambient field we build tables for.
pub const MAX_FIELD_SIZE: u64 = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic must be odd (got {0})")]
    EvenCharacteristic(u32),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("degrees must be positive")]
    ZeroDegree,
    #[error("ambient field F_{p}^{degree} has {size} elements, above the supported {max}")]
    TooLarge { p: u32, degree: u32, size: u128, max: u64 },
    #[error("element is not in the base field F_q")]
    NotInBaseField,
    #[error("coefficient vector {0:?} does not describe an element of the ambient field")]
    BadCoefficients(Vec<u32>),
    #[error("F_q^{level} is not contained in the ambient field of degree {degree}")]
    LevelNotContained { level: u32, degree: u32 },
}

/// An element of the ambient field. Only meaningful together with the tower
/// that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The packed base-`p` encoding.
    pub fn raw(self) -> u32 {
        self.0
    }
}

const NO_LOG: u32 = u32::MAX;

pub struct FieldTower {
    p: u32,
    q_degree: u32,
    levels: Vec<u32>,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    conway: bool,
    /// Place value of coefficient `i`, i.e. `p^(N-1-i)`.
    place: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    one: FieldElem,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("q", &self.q())
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .field("conway", &self.conway)
            .finish()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Builds the tower exposing `F_q` (`q = p^q_degree`) and `F_{q^n}` for every
/// `n` in `levels`.
pub fn make_tower(p: u32, q_degree: u32, levels: &[u32]) -> Result<FieldTower, FieldError> {
    if p.is_multiple_of(2) {
        return Err(FieldError::EvenCharacteristic(p));
    }
    if !is_prime(p as u64) {
        return Err(FieldError::NotPrime(p));
    }
    if q_degree == 0 || levels.contains(&0) {
        return Err(FieldError::ZeroDegree);
    }
    let mut levels: Vec<u32> = if levels.is_empty() { vec![1] } else { levels.to_vec() };
    if !levels.contains(&1) {
        levels.push(1);
    }
    levels.sort_unstable();
    levels.dedup();
    let level_lcm = levels.iter().fold(1u32, |acc, &n| lcm(acc, n));
    let degree = q_degree
        .checked_mul(level_lcm)
        .ok_or(FieldError::TooLarge { p, degree: u32::MAX, size: u128::MAX, max: MAX_FIELD_SIZE })?;
    let size = (p as u128).checked_pow(degree).unwrap_or(u128::MAX);
    if size > MAX_FIELD_SIZE as u128 {
        return Err(FieldError::TooLarge { p, degree, size, max: MAX_FIELD_SIZE });
    }
    Ok(FieldTower::build(p, q_degree, levels, degree, size as u32))
}

impl FieldTower {
    fn build(p: u32, q_degree: u32, levels: Vec<u32>, degree: u32, size: u32) -> FieldTower {
        let n = degree as usize;
        let (modulus, conway) = match conway::lookup(p, n) {
            Some(c) => (c, true),
            None => (least_irreducible(p, n), false),
        };
        FieldTower::with_modulus(p, q_degree, levels, degree, size, modulus, conway)
    }

    fn with_modulus(
        p: u32,
        q_degree: u32,
        levels: Vec<u32>,
        degree: u32,
        size: u32,
        modulus: Vec<u32>,
        conway: bool,
    ) -> FieldTower {
        let n = degree as usize;
        let place: Vec<u32> = (0..n).map(|i| p.pow((n - 1 - i) as u32)).collect();
        let mod_poly = FpPoly::new(p, modulus.clone());
        let generator = if mod_poly.is_primitive() {
            FpPoly::x(p)
        } else {
            find_primitive(p, n, &mod_poly)
        };

        let order = size - 1;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![NO_LOG; size as usize];
        let encode = |coeffs: &[u32]| -> u32 {
            coeffs.iter().enumerate().map(|(i, &c)| c * place[i]).sum()
        };
        let mut current = vec![0u32; n];
        current[0] = 1;
        let gen_is_x = generator == FpPoly::x(p);
        for k in 0..order {
            let raw = encode(&current);
            exp[k as usize] = raw;
            log[raw as usize] = k;
            current = if gen_is_x {
                times_x(&current, &modulus, p)
            } else {
                let prod = FpPoly::new(p, current.clone()).mul_mod(&generator, &mod_poly);
                let mut c = prod.coeffs;
                c.resize(n, 0);
                c
            };
        }
        debug_assert!(log.iter().skip(1).all(|&l| l != NO_LOG), "generator is not primitive");

        let decode = |raw: u32| -> Vec<u32> { place.iter().map(|&pl| (raw / pl) % p).collect() };
        let mut zech = vec![NO_LOG; order as usize];
        for k in 0..order {
            let mut coeffs = decode(exp[k as usize]);
            coeffs[0] = (coeffs[0] + 1) % p;
            let raw = encode(&coeffs);
            zech[k as usize] = if raw == 0 { NO_LOG } else { log[raw as usize] };
        }

        let one = FieldElem(place[0]);
        FieldTower { p, q_degree, levels, degree, size, modulus, conway, place, exp, log, zech, one }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Cardinality of the residue field.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.q_degree)
    }

    pub fn q_degree(&self) -> u32 {
        self.q_degree
    }

    /// Ambient degree `N` over `F_p`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of elements of the ambient field.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Requested coefficient levels `n` (always including 1).
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Defining polynomial, low degree first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_is_conway(&self) -> bool {
        self.conway
    }

    /// Whether `F_{q^n}` sits inside the ambient field.
    pub fn contains_level(&self, n: u32) -> bool {
        n > 0 && self.degree.is_multiple_of(self.q_degree * n)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        self.one
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> FieldElem {
        FieldElem(self.exp[1 % self.exp.len()])
    }

    pub fn from_int(&self, v: i64) -> FieldElem {
        let r = v.rem_euclid(self.p as i64) as u32;
        FieldElem(r * self.place[0])
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients(coeffs.to_vec()));
        }
        Ok(FieldElem(coeffs.iter().enumerate().map(|(i, &c)| c * self.place[i]).sum()))
    }

    /// Little-endian coefficient vector in the power basis.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        self.place.iter().map(|&pl| (x.0 / pl) % self.p).collect()
    }

    /// Coefficient vector rendered as `[c0,c1,...]`.
    pub fn serialize(&self, x: FieldElem) -> String {
        let parts: Vec<String> = self.coeffs(x).iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Element with the given packed encoding, if in range.
    pub fn elem(&self, raw: u32) -> Option<FieldElem> {
        (raw < self.size).then_some(FieldElem(raw))
    }

    #[inline]
    fn order(&self) -> u32 {
        self.size - 1
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let order = self.order();
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + order - la };
        let z = self.zech[diff as usize];
        if z == NO_LOG {
            return FieldElem::ZERO;
        }
        let mut e = la + z;
        if e >= order {
            e -= order;
        }
        FieldElem(self.exp[e as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if a.0 == 0 {
            return a;
        }
        let order = self.order();
        let mut e = self.log[a.0 as usize] + order / 2;
        if e >= order {
            e -= order;
        }
        FieldElem(self.exp[e as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let order = self.order();
        let mut e = self.log[a.0 as usize] + self.log[b.0 as usize];
        if e >= order {
            e -= order;
        }
        FieldElem(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        let order = self.order();
        let e = (order - self.log[a.0 as usize]) % order;
        Some(FieldElem(self.exp[e as usize]))
    }

    /// `a / b`; panics on division by zero.
    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b).expect("division by zero in field"))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return self.one;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let order = self.order() as u64;
        let l = self.log[a.0 as usize] as u64 * (e % order) % order;
        FieldElem(self.exp[l as usize])
    }

    /// `x -> x^q`, the Frobenius over the residue field.
    #[inline]
    pub fn frobenius_q(&self, a: FieldElem) -> FieldElem {
        self.frobenius_q_pow(a, 1)
    }

    /// `x -> x^(q^k)`.
    pub fn frobenius_q_pow(&self, a: FieldElem, k: u32) -> FieldElem {
        if a.0 == 0 {
            return a;
        }
        let order = self.order() as u64;
        let mut factor = 1u64;
        for _ in 0..k {
            factor = factor * (self.q() % order) % order;
        }
        let l = self.log[a.0 as usize] as u64 * factor % order;
        FieldElem(self.exp[l as usize])
    }

    /// `x -> x^p`.
    pub fn frobenius_p(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// Membership in `F_{q^n}` (as a subset of the ambient field).
    pub fn in_level(&self, a: FieldElem, n: u32) -> bool {
        self.frobenius_q_pow(a, n) == a
    }

    /// All elements of `F_{p^d}` inside the ambient field, in canonical order.
    /// `d` must divide the ambient degree.
    pub fn subfield_elements_p(&self, d: u32) -> Vec<FieldElem> {
        assert!(d > 0 && self.degree.is_multiple_of(d), "F_p^{d} is not a subfield");
        let sub_order = (self.p as u64).pow(d) - 1;
        let step = (self.order() as u64 / sub_order) as usize;
        let mut out: Vec<FieldElem> = std::iter::once(FieldElem::ZERO)
            .chain((0..sub_order as usize).map(|k| FieldElem(self.exp[k * step])))
            .collect();
        out.sort_unstable();
        out
    }

    /// All elements of `F_{q^n}`, canonical order.
    pub fn level_elements(&self, n: u32) -> Result<Vec<FieldElem>, FieldError> {
        if !self.contains_level(n) {
            return Err(FieldError::LevelNotContained { level: n, degree: self.degree });
        }
        Ok(self.subfield_elements_p(self.q_degree * n))
    }

    /// Every element of the ambient field in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.size).map(FieldElem)
    }

    /// Uniformly random element of `F_{q^n}` (`n` must be a contained level).
    pub fn random_in_level<R: Rng + ?Sized>(&self, rng: &mut R, n: u32) -> FieldElem {
        assert!(self.contains_level(n));
        let sub_order = (self.p as u64).pow(self.q_degree * n) - 1;
        let k = rng.gen_range(0..=sub_order);
        if k == sub_order {
            return FieldElem::ZERO;
        }
        let step = self.order() as u64 / sub_order;
        FieldElem(self.exp[(k * step) as usize])
    }

    /// An `F_p`-basis of `F_{q^n}`: powers of a generator of its unit group.
    pub fn level_basis(&self, n: u32) -> Result<Vec<FieldElem>, FieldError> {
        if !self.contains_level(n) {
            return Err(FieldError::LevelNotContained { level: n, degree: self.degree });
        }
        let dim = self.q_degree * n;
        let sub_order = (self.p as u64).pow(dim) - 1;
        let beta = FieldElem(self.exp[(self.order() as u64 / sub_order) as usize]);
        Ok((0..dim).map(|k| self.pow(beta, k as u64)).collect())
    }

    /// Matrix over `F_p` of an `F_p`-linear map of the ambient field, one
    /// column per power-basis vector.
    fn linear_map_matrix(&self, f: impl Fn(FieldElem) -> FieldElem) -> Vec<Vec<u64>> {
        let n = self.degree as usize;
        let mut rows = vec![vec![0u64; n]; n];
        for j in 0..n {
            let mut basis = vec![0u32; n];
            basis[j] = 1;
            let image = self.coeffs(f(self.from_coeffs(&basis).expect("basis vector")));
            for (i, &c) in image.iter().enumerate() {
                rows[i][j] = c as u64;
            }
        }
        rows
    }

    /// Solves `x^q - x = c` in the ambient field for `c` in `F_q`.
    ///
    /// The solution set is empty or a coset of `F_q`; it is returned in
    /// canonical order.
    pub fn artin_schreier_solve(&self, c: FieldElem) -> Result<Vec<FieldElem>, FieldError> {
        if !self.in_level(c, 1) {
            return Err(FieldError::NotInBaseField);
        }
        let p = self.p as u64;
        let matrix = self.linear_map_matrix(|x| self.sub(self.frobenius_q(x), x));
        let rhs: Vec<u64> = self.coeffs(c).iter().map(|&v| v as u64).collect();
        let n = self.degree as usize;
        let Some((particular, kernel)) = modlinalg::solve(&matrix, &rhs, n, p) else {
            return Ok(Vec::new());
        };
        let to_elem = |v: &[u64]| {
            let coeffs: Vec<u32> = v.iter().map(|&c| c as u32).collect();
            self.from_coeffs(&coeffs).expect("reduced coefficients")
        };
        let base = to_elem(&particular);
        let kernel: Vec<FieldElem> = kernel.iter().map(|k| to_elem(k)).collect();
        let mut out = vec![base];
        for k in &kernel {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for &s in &out {
                let mut acc = s;
                for _ in 0..self.p {
                    next.push(acc);
                    acc = self.add(acc, *k);
                }
            }
            out = next;
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

fn times_x(current: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = current.len();
    let top = current[n - 1];
    let mut next = vec![0u32; n];
    for i in (1..n).rev() {
        next[i] = current[i - 1];
    }
    if top != 0 {
        // x^n = -(m_0 + ... + m_{n-1} x^{n-1})
        for i in 0..n {
            next[i] = (next[i] + (p - modulus[i] % p) % p * top) % p;
        }
    }
    next
}

fn least_irreducible(p: u32, n: usize) -> Vec<u32> {
    // Lexicographic on (c_{n-1}, ..., c_0), smallest first.
    let total = (p as u64).pow(n as u32);
    for idx in 0..total {
        let mut coeffs = vec![0u32; n + 1];
        coeffs[n] = 1;
        let mut rest = idx;
        for slot in coeffs[..n].iter_mut() {
            *slot = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        let f = FpPoly::new(p, coeffs.clone());
        if f.is_irreducible() {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn find_primitive(p: u32, n: usize, modulus: &FpPoly) -> FpPoly {
    let order = (p as u64).pow(n as u32) - 1;
    let factors = prime_factors(order);
    let one = FpPoly::one(p);
    // Canonical order: packed encoding has c0 most significant.
    let place: Vec<u64> = (0..n).map(|i| (p as u64).pow((n - 1 - i) as u32)).collect();
    for raw in 1..=order {
        let coeffs: Vec<u32> = place.iter().map(|&pl| ((raw / pl) % p as u64) as u32).collect();
        let cand = FpPoly::new(p, coeffs);
        if factors.iter().all(|&r| cand.pow_mod(order / r, modulus) != one) {
            return cand;
        }
    }
    unreachable!("multiplicative group of a finite field is cyclic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pow(t: &FieldTower, a: FieldElem, e: u64) -> FieldElem {
        (0..e).fold(t.one(), |acc, _| t.mul(acc, a))
    }

    #[test]
    fn make_tower_degree_arithmetic() {
        let t = make_tower(3, 1, &[1, 2, 3]).unwrap();
        assert_eq!(t.degree(), 6);
        assert_eq!(t.level_elements(1).unwrap().len(), 3);
        assert_eq!(t.level_elements(2).unwrap().len(), 9);
        assert_eq!(t.level_elements(3).unwrap().len(), 27);

        let t = make_tower(3, 2, &[1, 2]).unwrap();
        assert_eq!(t.degree(), 4);
        assert_eq!(t.q(), 9);
        assert_eq!(t.level_elements(1).unwrap().len(), 9);
        assert_eq!(t.level_elements(2).unwrap().len(), 81);
    }

    #[test]
    fn rejects_even_and_composite_characteristic() {
        let err = make_tower(2, 1, &[1]).unwrap_err();
        assert_eq!(err, FieldError::EvenCharacteristic(2));
        assert!(err.to_string().contains("characteristic must be odd"));
        assert_eq!(make_tower(9, 1, &[1]).unwrap_err(), FieldError::NotPrime(9));
        assert!(matches!(make_tower(3, 1, &[14]), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn uses_conway_modulus_when_tabulated() {
        let t = make_tower(3, 1, &[3]).unwrap();
        assert!(t.modulus_is_conway());
        assert_eq!(t.modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn falls_back_to_least_irreducible() {
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        // x^2 + 1 over F_3 is not primitive; tables must still be consistent.
        let t = FieldTower::with_modulus(3, 1, vec![1, 2], 2, 9, vec![1, 0, 1], false);
        let elems: Vec<_> = t.elements().collect();
        for &a in &elems {
            for &b in &elems {
                let s = t.add(a, b);
                let (ca, cb, cs) = (t.coeffs(a), t.coeffs(b), t.coeffs(s));
                for i in 0..2 {
                    assert_eq!((ca[i] + cb[i]) % 3, cs[i]);
                }
            }
        }
        let x = t.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(t.mul(x, x), t.from_int(-1));
    }

    #[test]
    fn addition_matches_coefficientwise_sum() {
        let t = make_tower(3, 1, &[6]).unwrap();
        for a in t.elements().step_by(7) {
            for b in t.elements().step_by(11) {
                let s = t.coeffs(t.add(a, b));
                let expected: Vec<u32> =
                    t.coeffs(a).iter().zip(t.coeffs(b)).map(|(x, y)| (x + y) % 3).collect();
                assert_eq!(s, expected);
            }
        }
    }

    #[test]
    fn multiplication_matches_polynomial_product() {
        let t = make_tower(5, 1, &[3]).unwrap();
        let m = FpPoly::new(5, t.modulus().to_vec());
        for a in t.elements().step_by(13) {
            for b in t.elements().step_by(17) {
                let pa = FpPoly::new(5, t.coeffs(a));
                let pb = FpPoly::new(5, t.coeffs(b));
                let mut prod = pa.mul_mod(&pb, &m).coeffs;
                prod.resize(3, 0);
                assert_eq!(t.coeffs(t.mul(a, b)), prod);
            }
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        use rand::SeedableRng;
        let t = make_tower(3, 1, &[1, 2, 3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = t.random_in_level(&mut rng, 6);
            let b = t.random_in_level(&mut rng, 6);
            let c = t.random_in_level(&mut rng, 6);
            assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
            assert_eq!(t.add(t.add(a, b), c), t.add(a, t.add(b, c)));
            assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
            assert_eq!(t.add(a, t.neg(a)), t.zero());
            if !a.is_zero() {
                assert_eq!(t.mul(a, t.inv(a).unwrap()), t.one());
            }
        }
    }

    #[test]
    fn frobenius_is_additive_exhaustively() {
        let t = make_tower(3, 1, &[1, 2, 4]).unwrap(); // N = 4, 81 elements
        for a in t.elements() {
            for b in t.elements() {
                assert_eq!(t.frobenius_q(t.add(a, b)), t.add(t.frobenius_q(a), t.frobenius_q(b)));
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field_and_has_full_orbits() {
        let t = make_tower(3, 1, &[1, 3]).unwrap();
        for x in t.level_elements(1).unwrap() {
            assert_eq!(t.frobenius_q(x), x);
        }
        let g = t.generator();
        assert_eq!(t.frobenius_q(g), brute_pow(&t, g, 3));
        let orbit: Vec<_> = (0..4).map(|k| t.frobenius_q_pow(g, k)).collect();
        assert_ne!(orbit[1], g);
        assert_ne!(orbit[2], g);
        assert_eq!(orbit[3], g);
        for x in t.elements() {
            assert_eq!(t.frobenius_q_pow(x, 3), x);
        }
    }

    #[test]
    fn subfield_filtration_by_membership_counts() {
        let t = make_tower(3, 1, &[1, 2, 3]).unwrap();
        for a in [1u32, 2, 3, 6] {
            let count = t.elements().filter(|&x| t.in_level(x, a)).count();
            assert_eq!(count, 3usize.pow(a));
            for b in [1u32, 2, 3, 6] {
                let contained = t.level_elements(a).unwrap().iter().all(|&x| t.in_level(x, b));
                assert_eq!(contained, b % a == 0, "F_3^{a} in F_3^{b}");
            }
        }
    }

    #[test]
    fn artin_schreier_kernel_is_base_field() {
        let t = make_tower(3, 1, &[3]).unwrap();
        let sols = t.artin_schreier_solve(t.zero()).unwrap();
        assert_eq!(sols, t.level_elements(1).unwrap());
    }

    #[test]
    fn artin_schreier_matches_brute_scan() {
        let t = make_tower(3, 1, &[1, 3]).unwrap();
        let one = t.one();
        let brute: Vec<FieldElem> =
            t.elements().filter(|&x| t.sub(t.frobenius_q(x), x) == one).collect();
        assert_eq!(brute.len(), 3);
        assert!(brute.iter().all(|&x| !t.in_level(x, 1)));
        assert_eq!(t.artin_schreier_solve(one).unwrap(), brute);

        // q = 9: roots of x^9 - x = 1 lie in F_{9^3} = F_{3^6}.
        let t = make_tower(3, 2, &[1, 3]).unwrap();
        let brute: Vec<FieldElem> =
            t.elements().filter(|&x| t.sub(t.frobenius_q(x), x) == t.one()).collect();
        assert_eq!(brute.len(), 9);
        assert_eq!(t.artin_schreier_solve(t.one()).unwrap(), brute);
    }

    #[test]
    fn artin_schreier_empty_without_room() {
        let t = make_tower(3, 1, &[2]).unwrap();
        assert!(t.artin_schreier_solve(t.one()).unwrap().is_empty());
    }

    #[test]
    fn artin_schreier_rejects_non_base_input() {
        let t = make_tower(3, 1, &[3]).unwrap();
        assert_eq!(t.artin_schreier_solve(t.generator()), Err(FieldError::NotInBaseField));
    }

    #[test]
    fn serialization_is_little_endian() {
        let t = make_tower(3, 1, &[3]).unwrap();
        let x = t.from_coeffs(&[1, 0, 2]).unwrap();
        assert_eq!(t.serialize(x), "[1,0,2]");
        assert_eq!(t.serialize(t.one()), "[1,0,0]");
        assert_eq!(t.serialize(t.from_int(-1)), "[2,0,0]");
    }
}

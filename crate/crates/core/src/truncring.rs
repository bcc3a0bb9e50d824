//! Truncated ramified rings `F_{q^n}[pi]/(pi^r')` with `pi^e = t`, together
//! with the Galois operators: the Frobenius lift `phi` (q-power on
//! coefficients, fixes `pi`) and the ramified twist `sigma` (`pi -> zeta pi`).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::fftower::{FieldElem, FieldError, FieldTower};

/// Largest truncation level supported by the fixed-size element layout.
pub const MAX_LEVEL: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("truncation level must be in 1..={max} (got {0})", max = MAX_LEVEL)]
    LevelOutOfRange(usize),
    #[error("non-unit: element has valuation {0}")]
    NotUnit(usize),
    #[error("ramification index {e} needs an explicit primitive e-th root of unity in F_q (e | q-1)")]
    BadRamification { e: u32 },
    #[error("supplied root is not a primitive {e}-th root of unity in F_q")]
    BadRoot { e: u32 },
    #[error("enumeration of {required} elements exceeds the cap of {cap}")]
    SizeCap { required: u128, cap: u128 },
    #[error("ring descriptors are incompatible: {0}")]
    Incompatible(String),
}

/// An element `sum coeffs[i] pi^i`. Coefficients past the ring's level are
/// always zero, so the derived ordering is lexicographic on the first `r'`
/// coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TruncElem {
    coeffs: [FieldElem; MAX_LEVEL],
}

impl fmt::Debug for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        f.debug_list().entries(self.coeffs[..last].iter().map(|c| c.raw())).finish()
    }
}

impl TruncElem {
    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn coeffs(&self) -> &[FieldElem; MAX_LEVEL] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// An element of `<phi> x <sigma>`: `phi^frob_power sigma^twist`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaloisElem {
    pub frob_power: u32,
    pub twist: u32,
}

impl GaloisElem {
    pub const IDENTITY: GaloisElem = GaloisElem { frob_power: 0, twist: 0 };
    pub const PHI: GaloisElem = GaloisElem { frob_power: 1, twist: 0 };
    pub const SIGMA: GaloisElem = GaloisElem { frob_power: 0, twist: 1 };

    pub fn name(&self) -> String {
        match (self.frob_power, self.twist) {
            (0, 0) => "id".to_string(),
            (f, 0) => if f == 1 { "phi".into() } else { format!("phi^{f}") },
            (0, s) => if s == 1 { "sigma".into() } else { format!("sigma^{s}") },
            (f, s) => format!("phi^{f}sigma^{s}"),
        }
    }
}

#[derive(Clone)]
pub struct RingDesc {
    tower: Arc<FieldTower>,
    n: u32,
    e: u32,
    r_prime: usize,
    /// `zeta^k` for `k < e`, where `sigma(pi) = zeta pi`.
    zeta_pows: Vec<FieldElem>,
}

impl fmt::Debug for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingDesc")
            .field("q", &self.q())
            .field("n", &self.n)
            .field("e", &self.e)
            .field("r_prime", &self.r_prime)
            .finish()
    }
}

impl PartialEq for RingDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower)
            && self.n == other.n
            && self.e == other.e
            && self.r_prime == other.r_prime
            && self.zeta_pows == other.zeta_pows
    }
}

impl RingDesc {
    /// `F_{q^n}[pi]/(pi^r')` with `pi^e = t`, for `e` in `{1, 2}`. For `e = 2`
    /// the twist is `pi -> -pi`.
    pub fn new(tower: Arc<FieldTower>, n: u32, e: u32, r_prime: usize) -> Result<RingDesc, RingError> {
        match e {
            1 => RingDesc::build(tower, n, 1, r_prime, None),
            2 => {
                let minus_one = tower.from_int(-1);
                RingDesc::build(tower, n, 2, r_prime, Some(minus_one))
            }
            _ => Err(RingError::BadRamification { e }),
        }
    }

    /// Tame cyclic ramification of index `e`: `sigma(pi) = zeta pi` with the
    /// caller's choice of primitive `e`-th root of unity `zeta` in `F_q`.
    pub fn tame(
        tower: Arc<FieldTower>,
        n: u32,
        e: u32,
        r_prime: usize,
        zeta: FieldElem,
    ) -> Result<RingDesc, RingError> {
        if e == 0 || !(tower.q() - 1).is_multiple_of(e as u64) {
            return Err(RingError::BadRamification { e });
        }
        let primitive = tower.in_level(zeta, 1)
            && tower.pow(zeta, e as u64) == tower.one()
            && (1..e).all(|k| tower.pow(zeta, k as u64) != tower.one());
        if !primitive {
            return Err(RingError::BadRoot { e });
        }
        RingDesc::build(tower, n, e, r_prime, Some(zeta))
    }

    fn build(
        tower: Arc<FieldTower>,
        n: u32,
        e: u32,
        r_prime: usize,
        zeta: Option<FieldElem>,
    ) -> Result<RingDesc, RingError> {
        if r_prime == 0 || r_prime > MAX_LEVEL {
            return Err(RingError::LevelOutOfRange(r_prime));
        }
        if !tower.contains_level(n) {
            return Err(FieldError::LevelNotContained { level: n, degree: tower.degree() }.into());
        }
        let zeta = zeta.unwrap_or_else(|| tower.one());
        let zeta_pows = (0..e).map(|k| tower.pow(zeta, k as u64)).collect();
        Ok(RingDesc { tower, n, e, r_prime, zeta_pows })
    }

    /// Same field and ramification data at another truncation level.
    pub fn at_level(&self, r_prime: usize) -> Result<RingDesc, RingError> {
        if r_prime == 0 || r_prime > MAX_LEVEL {
            return Err(RingError::LevelOutOfRange(r_prime));
        }
        Ok(RingDesc { r_prime, ..self.clone() })
    }

    /// Same ramification data with coefficients in `F_{q^n}`.
    pub fn with_coefficient_level(&self, n: u32) -> Result<RingDesc, RingError> {
        if !self.tower.contains_level(n) {
            return Err(FieldError::LevelNotContained { level: n, degree: self.tower.degree() }.into());
        }
        Ok(RingDesc { n, ..self.clone() })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn field(&self) -> &FieldTower {
        &self.tower
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    /// Coefficient level: coefficients live in `F_{q^n}`.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn r_prime(&self) -> usize {
        self.r_prime
    }

    pub fn zeta(&self) -> FieldElem {
        self.zeta_pows.get(1).copied().unwrap_or_else(|| self.tower.one())
    }

    /// `q^(n r')`.
    pub fn size(&self) -> u128 {
        (self.q() as u128).pow(self.n * self.r_prime as u32)
    }

    pub fn zero(&self) -> TruncElem {
        TruncElem::default()
    }

    pub fn one(&self) -> TruncElem {
        self.from_field(self.tower.one())
    }

    /// The uniformizer `pi` (zero when `r' = 1`).
    pub fn pi(&self) -> TruncElem {
        self.monomial(self.tower.one(), 1)
    }

    /// The base uniformizer `t = pi^e`.
    pub fn t(&self) -> TruncElem {
        self.monomial(self.tower.one(), self.e as usize)
    }

    /// `c pi^k`, truncated.
    pub fn monomial(&self, c: FieldElem, k: usize) -> TruncElem {
        let mut out = TruncElem::default();
        if k < self.r_prime {
            out.coeffs[k] = c;
        }
        out
    }

    pub fn from_field(&self, c: FieldElem) -> TruncElem {
        self.monomial(c, 0)
    }

    pub fn from_int(&self, v: i64) -> TruncElem {
        self.from_field(self.tower.from_int(v))
    }

    /// Element with the given coefficients, truncated at `pi^r'`.
    pub fn from_coeffs(&self, coeffs: &[FieldElem]) -> TruncElem {
        let mut out = TruncElem::default();
        for (i, &c) in coeffs.iter().take(self.r_prime).enumerate() {
            out.coeffs[i] = c;
        }
        out
    }

    pub fn add(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let mut out = TruncElem::default();
        for i in 0..self.r_prime {
            out.coeffs[i] = f.add(a.coeffs[i], b.coeffs[i]);
        }
        out
    }

    pub fn sub(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let mut out = TruncElem::default();
        for i in 0..self.r_prime {
            out.coeffs[i] = f.sub(a.coeffs[i], b.coeffs[i]);
        }
        out
    }

    pub fn neg(&self, a: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let mut out = TruncElem::default();
        for i in 0..self.r_prime {
            out.coeffs[i] = f.neg(a.coeffs[i]);
        }
        out
    }

    pub fn mul(&self, a: &TruncElem, b: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let r = self.r_prime;
        let mut out = TruncElem::default();
        for i in 0..r {
            let ai = a.coeffs[i];
            if ai.is_zero() {
                continue;
            }
            for j in 0..r - i {
                let bj = b.coeffs[j];
                if !bj.is_zero() {
                    out.coeffs[i + j] = f.add(out.coeffs[i + j], f.mul(ai, bj));
                }
            }
        }
        out
    }

    /// Multiplies by a field scalar.
    pub fn scale(&self, c: FieldElem, a: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let mut out = TruncElem::default();
        for i in 0..self.r_prime {
            out.coeffs[i] = f.mul(c, a.coeffs[i]);
        }
        out
    }

    /// Index of the first nonzero coefficient, `r'` for zero.
    pub fn valuation(&self, a: &TruncElem) -> usize {
        (0..self.r_prime).find(|&i| !a.coeffs[i].is_zero()).unwrap_or(self.r_prime)
    }

    pub fn is_unit(&self, a: &TruncElem) -> bool {
        !a.coeffs[0].is_zero()
    }

    pub fn inv(&self, a: &TruncElem) -> Result<TruncElem, RingError> {
        let f = &*self.tower;
        let c0_inv = f.inv(a.coeffs[0]).ok_or(RingError::NotUnit(self.valuation(a)))?;
        let mut out = TruncElem::default();
        out.coeffs[0] = c0_inv;
        for k in 1..self.r_prime {
            let mut acc = FieldElem::ZERO;
            for j in 1..=k {
                acc = f.add(acc, f.mul(a.coeffs[j], out.coeffs[k - j]));
            }
            out.coeffs[k] = f.neg(f.mul(c0_inv, acc));
        }
        Ok(out)
    }

    /// Exact division `a / pi^k` of an element of valuation at least `k`;
    /// the top `k` coefficients of the result are zero.
    pub fn shift_down(&self, a: &TruncElem, k: usize) -> Option<TruncElem> {
        if self.valuation(a) < k {
            return None;
        }
        let mut out = TruncElem::default();
        for i in k..self.r_prime {
            out.coeffs[i - k] = a.coeffs[i];
        }
        Some(out)
    }

    /// Applies `phi^f sigma^s` coefficientwise.
    pub fn galois_apply(&self, g: GaloisElem, a: &TruncElem) -> TruncElem {
        let f = &*self.tower;
        let s = (g.twist % self.e) as usize;
        let mut out = TruncElem::default();
        for i in 0..self.r_prime {
            let c = f.frobenius_q_pow(a.coeffs[i], g.frob_power);
            let z = self.zeta_pows[(i * s) % self.e as usize];
            out.coeffs[i] = f.mul(c, z);
        }
        out
    }

    pub fn phi(&self, a: &TruncElem) -> TruncElem {
        self.galois_apply(GaloisElem::PHI, a)
    }

    pub fn sigma(&self, a: &TruncElem) -> TruncElem {
        self.galois_apply(GaloisElem::SIGMA, a)
    }

    pub fn compose(&self, g: GaloisElem, h: GaloisElem) -> GaloisElem {
        GaloisElem { frob_power: g.frob_power + h.frob_power, twist: (g.twist + h.twist) % self.e }
    }

    /// The homomorphism `F_q[t]/(t^r) -> R`, `t -> pi^e`, applied to the
    /// element with the given `t`-coefficients.
    pub fn base_embed(&self, t_coeffs: &[FieldElem]) -> TruncElem {
        let mut out = TruncElem::default();
        for (i, &c) in t_coeffs.iter().enumerate() {
            let k = i * self.e as usize;
            if k < self.r_prime {
                out.coeffs[k] = c;
            }
        }
        out
    }

    /// Reduction `R_{r'} -> R_{r''}` (truncation) into `target`.
    pub fn reduce_to(&self, a: &TruncElem, target: &RingDesc) -> Result<TruncElem, RingError> {
        self.check_reducible_to(target)?;
        Ok(target.from_coeffs(&a.coeffs[..target.r_prime]))
    }

    pub(crate) fn check_reducible_to(&self, target: &RingDesc) -> Result<(), RingError> {
        if !Arc::ptr_eq(&self.tower, &target.tower) {
            return Err(RingError::Incompatible("different field towers".into()));
        }
        if self.n != target.n || self.e != target.e || self.zeta_pows != target.zeta_pows {
            return Err(RingError::Incompatible(format!(
                "(n, e) = ({}, {}) vs ({}, {})",
                self.n, self.e, target.n, target.e
            )));
        }
        if target.r_prime > self.r_prime {
            return Err(RingError::Incompatible(format!(
                "cannot reduce level {} to higher level {}",
                self.r_prime, target.r_prime
            )));
        }
        Ok(())
    }

    /// Every element with coefficients in `F_{q^n}`, in canonical order.
    pub fn elements(&self, cap: u128) -> Result<Vec<TruncElem>, RingError> {
        let size = self.size();
        if size > cap {
            return Err(RingError::SizeCap { required: size, cap });
        }
        let field = self.tower.level_elements(self.n)?;
        let per_position = vec![field; self.r_prime];
        Ok(product(&per_position))
    }

    /// The subring fixed by every element of `generators`, computed
    /// coefficientwise (each Galois element preserves the `pi`-adic grading).
    pub fn fixed_subring(&self, generators: &[GaloisElem], cap: u128) -> Result<Vec<TruncElem>, RingError> {
        let f = &*self.tower;
        let field = f.level_elements(self.n)?;
        let per_position: Vec<Vec<FieldElem>> = (0..self.r_prime)
            .map(|i| {
                field
                    .iter()
                    .copied()
                    .filter(|&c| {
                        let mono = self.monomial(c, i);
                        generators.iter().all(|&g| self.galois_apply(g, &mono) == mono)
                    })
                    .collect()
            })
            .collect();
        let required = per_position.iter().map(|v| v.len() as u128).product::<u128>();
        if required > cap {
            return Err(RingError::SizeCap { required, cap });
        }
        Ok(product(&per_position))
    }

    /// `[[c0...],[c1...],...]`, ascending powers of `pi`.
    pub fn serialize(&self, a: &TruncElem) -> String {
        let parts: Vec<String> = (0..self.r_prime).map(|i| self.tower.serialize(a.coeffs[i])).collect();
        format!("[{}]", parts.join(","))
    }
}

/// Cartesian product with position 0 varying slowest, so the output is in
/// lexicographic order when each position list is sorted.
fn product(per_position: &[Vec<FieldElem>]) -> Vec<TruncElem> {
    let mut out = vec![TruncElem::default()];
    for (i, choices) in per_position.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for &c in choices {
                let mut x = *prefix;
                x.coeffs[i] = c;
                next.push(x);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fftower::make_tower;
    use rand::SeedableRng;

    fn ring(n_levels: &[u32], n: u32, e: u32, r: usize) -> RingDesc {
        let tower = Arc::new(make_tower(3, 1, n_levels).unwrap());
        RingDesc::new(tower, n, e, r).unwrap()
    }

    fn random_elem(ring: &RingDesc, rng: &mut impl rand::Rng) -> TruncElem {
        let coeffs: Vec<FieldElem> =
            (0..ring.r_prime()).map(|_| ring.field().random_in_level(rng, ring.n())).collect();
        ring.from_coeffs(&coeffs)
    }

    #[test]
    fn geometric_series_inverse() {
        let r = ring(&[1], 1, 2, 3);
        let pi = r.pi();
        let one = r.one();
        let a = r.add(&one, &pi);
        let b = r.add(&r.sub(&one, &pi), &r.mul(&pi, &pi));
        assert_eq!(r.mul(&a, &b), one);
    }

    #[test]
    fn truncation_kills_high_powers() {
        let r = ring(&[1], 1, 2, 3);
        let pi = r.pi();
        let pi2 = r.mul(&pi, &pi);
        assert_eq!(r.mul(&pi, &pi2), r.zero());
        assert_eq!(r.valuation(&pi2), 2);
        assert_eq!(r.valuation(&r.zero()), 3);
    }

    #[test]
    fn inverse_of_non_unit_is_rejected() {
        let r = ring(&[1], 1, 2, 3);
        let err = r.inv(&r.pi()).unwrap_err();
        assert_eq!(err, RingError::NotUnit(1));
        assert!(err.to_string().contains("non-unit"));
    }

    #[test]
    fn inverse_exhaustive_small_ring() {
        let r = ring(&[2], 2, 2, 3);
        for x in r.elements(1 << 20).unwrap() {
            if r.is_unit(&x) {
                assert_eq!(r.mul(&x, &r.inv(&x).unwrap()), r.one());
            }
        }
    }

    #[test]
    fn sigma_negates_odd_coefficients() {
        let r = ring(&[3], 3, 2, 3);
        let f = r.field();
        let (a0, a1, a2) = (f.generator(), f.from_int(2), f.pow(f.generator(), 5));
        let x = r.from_coeffs(&[a0, a1, a2]);
        assert_eq!(r.sigma(&x), r.from_coeffs(&[a0, f.neg(a1), a2]));
    }

    #[test]
    fn phi_fixes_base_coefficients() {
        let r = ring(&[3], 3, 2, 3);
        for x in r.with_coefficient_level(1).unwrap().elements(1000).unwrap() {
            assert_eq!(r.phi(&x), x);
        }
    }

    #[test]
    fn phi_and_sigma_commute_on_random_elements() {
        let r = ring(&[3], 3, 2, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = random_elem(&r, &mut rng);
            assert_eq!(r.phi(&r.sigma(&x)), r.sigma(&r.phi(&x)));
            assert_eq!(r.sigma(&r.sigma(&x)), x);
        }
    }

    #[test]
    fn galois_elements_are_ring_automorphisms_exhaustively() {
        let r = ring(&[2], 2, 2, 2); // 81 elements
        let elems = r.elements(1 << 20).unwrap();
        for g in [GaloisElem::PHI, GaloisElem::SIGMA, GaloisElem { frob_power: 1, twist: 1 }] {
            let mut images: Vec<_> = elems.iter().map(|x| r.galois_apply(g, x)).collect();
            for x in &elems {
                for y in &elems {
                    let gx = r.galois_apply(g, x);
                    let gy = r.galois_apply(g, y);
                    assert_eq!(r.galois_apply(g, &r.add(x, y)), r.add(&gx, &gy));
                    assert_eq!(r.galois_apply(g, &r.mul(x, y)), r.mul(&gx, &gy));
                }
            }
            images.sort();
            images.dedup();
            assert_eq!(images.len(), elems.len(), "bijective");
        }
    }

    #[test]
    fn base_embedding_examples() {
        let r = ring(&[1], 1, 2, 3);
        let f = r.field();
        let (zero, one) = (f.zero(), f.one());
        assert_eq!(r.base_embed(&[zero, one]), r.mul(&r.pi(), &r.pi()));
        assert_eq!(r.base_embed(&[one]), r.one());
        let r2 = ring(&[1], 1, 2, 2);
        assert_eq!(r2.base_embed(&[zero, one]), r2.zero());
    }

    #[test]
    fn fixed_subring_examples() {
        let all = [GaloisElem::PHI, GaloisElem::SIGMA];
        for n in [1u32, 2] {
            let r = ring(&[2], n, 2, 3);
            let fixed = r.fixed_subring(&all, 1 << 20).unwrap();
            assert_eq!(fixed.len(), 9);
            let f = r.field();
            for x in &fixed {
                assert!(f.in_level(x.coeff(0), 1) && f.in_level(x.coeff(2), 1));
                assert!(x.coeff(1).is_zero());
            }
            // Matches a brute-force filter.
            let brute: Vec<_> = r
                .elements(1 << 20)
                .unwrap()
                .into_iter()
                .filter(|x| all.iter().all(|&g| r.galois_apply(g, x) == *x))
                .collect();
            assert_eq!(fixed, brute);
        }
        let r = ring(&[1], 1, 2, 3);
        assert_eq!(r.fixed_subring(&[], 1 << 20).unwrap(), r.elements(1 << 20).unwrap());
    }

    #[test]
    fn fixed_subring_respects_cap() {
        let r = ring(&[2], 2, 2, 3);
        assert_eq!(r.fixed_subring(&[], 100), Err(RingError::SizeCap { required: 729, cap: 100 }));
    }

    /// Ring-level content of the fixed-point lemma: the fixed ring is the
    /// faithful image of `F_q[t]/(t^r)` exactly when `(r-1)e < r' <= re`.
    #[test]
    fn fixed_ring_is_faithful_base_image_on_grid() {
        let tower = Arc::new(make_tower(3, 1, &[1, 2]).unwrap());
        let all = [GaloisElem::PHI, GaloisElem::SIGMA];
        for n in [1u32, 2] {
            for r_prime in 1..=5usize {
                let ring = RingDesc::new(tower.clone(), n, 2, r_prime).unwrap();
                let fixed = ring.fixed_subring(&all, 1 << 20).unwrap();
                for r in 1..=3usize {
                    let base = tower.level_elements(1).unwrap();
                    let base_ring = product(&vec![base; r]);
                    let mut image: Vec<_> =
                        base_ring.iter().map(|u| ring.base_embed(&u.coeffs[..r])).collect();
                    image.sort();
                    image.dedup();
                    let faithful = image.len() == base_ring.len();
                    let equal = faithful && image == fixed;
                    let predicted = (r - 1) * 2 < r_prime && r_prime <= r * 2;
                    assert_eq!(equal, predicted, "n={n} r={r} r'={r_prime}");
                }
            }
        }
    }

    #[test]
    fn reduction_is_homomorphism_commuting_with_galois() {
        let r3 = ring(&[3], 3, 2, 3);
        let r2 = r3.at_level(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x = random_elem(&r3, &mut rng);
            let y = random_elem(&r3, &mut rng);
            let red = |z: &TruncElem| r3.reduce_to(z, &r2).unwrap();
            assert_eq!(red(&r3.mul(&x, &y)), r2.mul(&red(&x), &red(&y)));
            assert_eq!(red(&r3.add(&x, &y)), r2.add(&red(&x), &red(&y)));
            assert_eq!(red(&r3.sigma(&x)), r2.sigma(&red(&x)));
            assert_eq!(red(&r3.phi(&x)), r2.phi(&red(&x)));
        }
        assert!(r2.reduce_to(&r2.one(), &r3).is_err());
    }

    #[test]
    fn reduction_is_surjective() {
        let r3 = ring(&[1], 1, 2, 3);
        let r1 = r3.at_level(1).unwrap();
        let mut image: Vec<_> =
            r3.elements(1000).unwrap().iter().map(|x| r3.reduce_to(x, &r1).unwrap()).collect();
        image.sort();
        image.dedup();
        assert_eq!(image, r1.elements(1000).unwrap());
    }

    #[test]
    fn tame_twist_requires_root_of_unity() {
        let tower = Arc::new(make_tower(7, 1, &[1]).unwrap());
        // 2 has order 3 mod 7.
        let zeta = tower.from_int(2);
        let r = RingDesc::tame(tower.clone(), 1, 3, 4, zeta).unwrap();
        let x = r.pi();
        let s = GaloisElem::SIGMA;
        let thrice = r.galois_apply(s, &r.galois_apply(s, &r.galois_apply(s, &x)));
        assert_eq!(thrice, x);
        assert_eq!(r.galois_apply(s, &x), r.monomial(zeta, 1));
        assert_eq!(RingDesc::tame(tower.clone(), 1, 3, 4, tower.from_int(3)).unwrap_err(), RingError::BadRoot { e: 3 });
        assert_eq!(RingDesc::tame(tower.clone(), 1, 4, 4, zeta).unwrap_err(), RingError::BadRamification { e: 4 });
        assert_eq!(RingDesc::new(tower, 1, 3, 2).unwrap_err(), RingError::BadRamification { e: 3 });
    }
}

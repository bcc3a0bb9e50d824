//! Conjugacy classes and exact character tables by the Burnside–Dixon
//! method, with character values as cyclotomic integers.

use std::fmt;

use thiserror::Error;

use crate::fftower::{is_prime, prime_factors};
use crate::matgroup::FiniteGroup;
use crate::modlinalg::{inv_mod, nullspace, pow_mod};
use crate::par;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("group of order {order} exceeds the cap of {cap}")]
    SizeCap { order: usize, cap: usize },
    #[error("class function is not constant on class {0}")]
    NotClassFunction(usize),
    #[error("eigenspace splitting failed for every auxiliary prime up to {0}")]
    SplittingFailed(u64),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

/// An element of `Z[zeta_m]`, reduced modulo the cyclotomic polynomial
/// `Phi_m`: the coefficients of `1, zeta, ..., zeta^(phi(m)-1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyclo {
    coeffs: Vec<i64>,
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

impl Cyclo {
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The rational integer value, if the element is one.
    pub fn as_integer(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn serialize(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

/// Arithmetic in `Z[zeta_m]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloField {
    m: usize,
    /// `Phi_m`, monic, low degree first.
    phi: Vec<i64>,
}

impl CycloField {
    pub fn new(m: usize) -> CycloField {
        CycloField { m, phi: cyclotomic_polynomial(m) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `phi(m)`, the length of every coefficient vector.
    pub fn dim(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut v: Vec<i64>) -> Cyclo {
        let deg = self.dim();
        for i in (deg..v.len()).rev() {
            let c = v[i];
            if c != 0 {
                for (j, &p) in self.phi.iter().enumerate() {
                    v[i - deg + j] -= c * p;
                }
            }
        }
        v.resize(deg, 0);
        Cyclo { coeffs: v }
    }

    pub fn integer(&self, n: i64) -> Cyclo {
        let mut v = vec![0; self.dim()];
        v[0] = n;
        Cyclo { coeffs: v }
    }

    /// `zeta^k`.
    pub fn zeta_pow(&self, k: usize) -> Cyclo {
        let mut v = vec![0; self.m.max(self.dim())];
        v[k % self.m] = 1;
        self.reduce(v)
    }

    /// `sum_s mult[s] zeta^s`.
    pub fn from_exponent_counts(&self, mult: &[i64]) -> Cyclo {
        let mut v = vec![0; self.m.max(self.dim())];
        for (s, &c) in mult.iter().enumerate() {
            v[s % self.m] += c;
        }
        self.reduce(v)
    }

    pub fn add(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        Cyclo { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn mul(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut v = vec![0; 2 * self.dim()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x != 0 {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    v[i + j] += x * y;
                }
            }
        }
        self.reduce(v)
    }

    pub fn scale(&self, k: i64, a: &Cyclo) -> Cyclo {
        Cyclo { coeffs: a.coeffs.iter().map(|x| k * x).collect() }
    }

    /// Complex conjugation, `zeta -> zeta^-1`.
    pub fn conj(&self, a: &Cyclo) -> Cyclo {
        let mut v = vec![0; self.m.max(self.dim())];
        for (i, &c) in a.coeffs.iter().enumerate() {
            v[(self.m - i % self.m) % self.m] += c;
        }
        self.reduce(v)
    }
}

/// `Phi_m` by dividing `x^m - 1` by `Phi_d` for every proper divisor `d`.
fn cyclotomic_polynomial(m: usize) -> Vec<i64> {
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &p) in den.iter().enumerate() {
            rem[i + j] -= c * p;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "exact division");
    quot
}

/// Conjugacy classes of a finite group, numbered by their least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClasses {
    order: usize,
    class_of: Vec<u32>,
    members: Vec<Vec<usize>>,
    exponent: u64,
    /// `power_class[k][j]`: class of `g_k^j` for `j < exponent`.
    power_class: Vec<Vec<u32>>,
    inverse_class: Vec<usize>,
}

impl ConjClasses {
    pub fn new(group: &FiniteGroup, cap: usize) -> Result<ConjClasses, CharError> {
        let order = group.order();
        if order > cap {
            return Err(CharError::SizeCap { order, cap });
        }
        const NONE: u32 = u32::MAX;
        let mut class_of = vec![NONE; order];
        let mut members = Vec::new();
        for x in 0..order {
            if class_of[x] != NONE {
                continue;
            }
            let id = members.len() as u32;
            let mut orbit = Vec::new();
            for g in 0..order {
                let y = group.mul(group.mul(g, x), group.inv(g));
                if class_of[y] == NONE {
                    class_of[y] = id;
                    orbit.push(y);
                }
            }
            orbit.sort_unstable();
            members.push(orbit);
        }
        let exponent = group.exponent();
        let power_class = members
            .iter()
            .map(|m| {
                let g = m[0];
                let mut acc = 0;
                (0..exponent)
                    .map(|_| {
                        let c = class_of[acc];
                        acc = group.mul(acc, g);
                        c
                    })
                    .collect()
            })
            .collect();
        let inverse_class = members.iter().map(|m| class_of[group.inv(m[0])] as usize).collect();
        Ok(ConjClasses { order, class_of, members, exponent, power_class, inverse_class })
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g] as usize
    }

    pub fn size(&self, k: usize) -> usize {
        self.members[k].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.len()).collect()
    }

    pub fn representative(&self, k: usize) -> usize {
        self.members[k][0]
    }

    pub fn members(&self, k: usize) -> &[usize] {
        &self.members[k]
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Class of `g_k^j`.
    pub fn power(&self, k: usize, j: u64) -> usize {
        self.power_class[k][(j % self.exponent) as usize] as usize
    }

    pub fn inverse(&self, k: usize) -> usize {
        self.inverse_class[k]
    }

    /// Order of the elements of class `k`.
    pub fn element_order(&self, k: usize) -> u64 {
        (1..=self.exponent).find(|&j| self.power(k, j) == 0).unwrap_or(self.exponent)
    }

    /// Turns per-element values into per-class values, checking constancy.
    pub fn class_function(&self, per_element: &[i64]) -> Result<Vec<i64>, CharError> {
        (0..self.count())
            .map(|k| {
                let v = per_element[self.representative(k)];
                if self.members[k].iter().all(|&g| per_element[g] == v) {
                    Ok(v)
                } else {
                    Err(CharError::NotClassFunction(k))
                }
            })
            .collect()
    }
}

/// The full character table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    pub classes: ConjClasses,
    pub field: CycloField,
    /// `chars[i][k]`: value of the i-th irreducible on class `k`.
    pub chars: Vec<Vec<Cyclo>>,
    pub degrees: Vec<u64>,
    /// The auxiliary prime that succeeded.
    pub ell: u64,
}

/// Burnside–Dixon: common eigenvectors of the class matrices modulo a prime
/// `ell = 1 mod exponent`, `ell > 2 sqrt|G|`, lifted to cyclotomic integers
/// through eigenvalue multiplicities on cyclic subgroups.
pub fn dixon_char_table(group: &FiniteGroup, classes: &ConjClasses) -> Result<CharTable, CharError> {
    let order = classes.group_order() as u64;
    let m = classes.exponent();
    let mut ell = first_aux_prime(m, order);
    let limit = ell + 200 * m;
    while ell <= limit {
        if let Some(table) = dixon_attempt(group, classes, ell) {
            table.verify()?;
            return Ok(table);
        }
        ell = next_aux_prime(ell, m);
    }
    Err(CharError::SplittingFailed(limit))
}

/// Smallest prime `ell = 1 mod m` with `ell > 2 sqrt(order)`.
pub fn first_aux_prime(m: u64, order: u64) -> u64 {
    let mut ell = 1;
    loop {
        ell = next_aux_prime(ell, m);
        if ell * ell > 4 * order {
            return ell;
        }
    }
}

fn next_aux_prime(after: u64, m: u64) -> u64 {
    let mut c = after + m - (after % m) + 1;
    if c <= after {
        c += m;
    }
    while !is_prime(c) {
        c += m;
    }
    c
}

fn primitive_root(ell: u64) -> u64 {
    let factors = prime_factors(ell - 1);
    (2..ell).find(|&g| factors.iter().all(|&p| pow_mod(g, (ell - 1) / p, ell) != 1)).expect("prime modulus")
}

fn dixon_attempt(group: &FiniteGroup, classes: &ConjClasses, ell: u64) -> Option<CharTable> {
    let r = classes.count();
    let order = classes.group_order() as u64;
    // c[j][k][l] = #{x in C_j : x^-1 g_l in C_k}
    let js: Vec<usize> = (0..r).collect();
    let structure: Vec<Vec<Vec<u64>>> = par::map(&js, |&j| {
        let mut mat = vec![vec![0u64; r]; r];
        #[allow(clippy::needless_range_loop)]
        for l in 0..r {
            let gl = classes.representative(l);
            for &x in classes.members(j) {
                let k = classes.class_of(group.mul(group.inv(x), gl));
                mat[k][l] += 1;
            }
        }
        mat
    });

    // Split F_ell^r into common eigenspaces.
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r).map(|i| unit_vector(r, i)).collect()];
    for mat in &structure {
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let mut found = 0;
            for lambda in 0..ell {
                // Rows of (M - lambda) B.
                let rows: Vec<Vec<u64>> = (0..r)
                    .map(|k| {
                        basis
                            .iter()
                            .map(|b| {
                                let mut acc = 0u64;
                                for l in 0..r {
                                    let coeff = (mat[k][l] % ell + if k == l { ell - lambda } else { 0 }) % ell;
                                    acc = (acc + coeff * b[l]) % ell;
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect();
                let kernel = nullspace(&rows, basis.len(), ell);
                if kernel.is_empty() {
                    continue;
                }
                found += kernel.len();
                next.push(
                    kernel
                        .iter()
                        .map(|c| {
                            (0..r)
                                .map(|l| basis.iter().zip(c).fold(0, |acc, (b, &ci)| (acc + b[l] * ci) % ell))
                                .collect()
                        })
                        .collect(),
                );
                if found == basis.len() {
                    break;
                }
            }
            if found != basis.len() {
                return None;
            }
        }
        spaces = next;
    }
    if spaces.len() != r || spaces.iter().any(|s| s.len() != 1) {
        return None;
    }

    let sizes = classes.sizes();
    let m = classes.exponent();
    let z = pow_mod(primitive_root(ell), (ell - 1) / m, ell);
    let field = CycloField::new(m as usize);
    let inv_m = inv_mod(m % ell, ell);
    let mut chars = Vec::with_capacity(r);
    let mut degrees = Vec::with_capacity(r);
    for space in &spaces {
        let v = &space[0];
        let scale = inv_mod(v[0], ell);
        let omega: Vec<u64> = v.iter().map(|x| x * scale % ell).collect();
        // d^2 = |G| / sum_k omega_k omega_kbar / |C_k|
        let s = (0..r).fold(0u64, |acc, k| {
            let term = omega[k] * omega[classes.inverse(k)] % ell * inv_mod(sizes[k] as u64 % ell, ell) % ell;
            (acc + term) % ell
        });
        if s == 0 {
            return None;
        }
        let d_sq = order % ell * inv_mod(s, ell) % ell;
        let d = (1..=isqrt(order)).find(|&d| d * d % ell == d_sq && order.is_multiple_of(d))?;
        let modular: Vec<u64> = (0..r).map(|k| omega[k] * d % ell * inv_mod(sizes[k] as u64 % ell, ell) % ell).collect();
        let mut row = Vec::with_capacity(r);
        for k in 0..r {
            let mut mult = vec![0i64; m as usize];
            for (s, slot) in mult.iter_mut().enumerate() {
                let mut acc = 0u64;
                for j in 0..m {
                    let chi = modular[classes.power(k, j)];
                    let twist = pow_mod(z, (m - (s as u64 * j) % m) % m, ell);
                    acc = (acc + chi * twist) % ell;
                }
                let mu = acc * inv_m % ell;
                if mu > d {
                    return None;
                }
                *slot = mu as i64;
            }
            row.push(field.from_exponent_counts(&mult));
        }
        chars.push(row);
        degrees.push(d);
    }
    let mut order_idx: Vec<usize> = (0..r).collect();
    let is_trivial = |i: usize| chars[i].iter().all(|c| c.as_integer() == Some(1));
    order_idx.sort_by(|&a, &b| (degrees[a], !is_trivial(a), &chars[a]).cmp(&(degrees[b], !is_trivial(b), &chars[b])));
    Some(CharTable {
        classes: classes.clone(),
        field,
        chars: order_idx.iter().map(|&i| chars[i].clone()).collect(),
        degrees: order_idx.iter().map(|&i| degrees[i]).collect(),
        ell,
    })
}

fn unit_vector(r: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; r];
    v[i] = 1;
    v
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Outcome of the exact orthogonality checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orthogonality {
    pub rows: bool,
    pub columns: bool,
    pub sum_of_squares: bool,
    pub degrees_divide_order: bool,
}

impl Orthogonality {
    pub fn all(&self) -> bool {
        self.rows && self.columns && self.sum_of_squares && self.degrees_divide_order
    }
}

impl CharTable {
    pub fn count(&self) -> usize {
        self.chars.len()
    }

    /// `sum_g chi(g) conj(psi(g))`, which is `|G| <chi, psi>`.
    fn pairing(&self, chi: &[Cyclo], psi: &[Cyclo]) -> Cyclo {
        let f = &self.field;
        (0..self.classes.count()).fold(f.integer(0), |acc, k| {
            let term = f.mul(&chi[k], &f.conj(&psi[k]));
            f.add(&acc, &f.scale(self.classes.size(k) as i64, &term))
        })
    }

    pub fn orthogonality(&self) -> Orthogonality {
        let f = &self.field;
        let order = self.classes.group_order() as i64;
        let r = self.count();
        let rows = (0..r).all(|i| {
            (0..r).all(|j| {
                let expect = if i == j { order } else { 0 };
                self.pairing(&self.chars[i], &self.chars[j]).as_integer() == Some(expect)
            })
        });
        let columns = (0..r).all(|k| {
            (0..r).all(|l| {
                let sum = (0..r).fold(f.integer(0), |acc, i| {
                    f.add(&acc, &f.mul(&self.chars[i][k], &f.conj(&self.chars[i][l])))
                });
                let expect = if k == l { order / self.classes.size(k) as i64 } else { 0 };
                sum.as_integer() == Some(expect)
            })
        });
        let sum_sq: u64 = self.degrees.iter().map(|d| d * d).sum();
        Orthogonality {
            rows,
            columns,
            sum_of_squares: sum_sq == order as u64,
            degrees_divide_order: self.degrees.iter().all(|d| (order as u64).is_multiple_of(*d)),
        }
    }

    fn verify(&self) -> Result<(), CharError> {
        let o = self.orthogonality();
        if !o.all() {
            return Err(CharError::Integrity(format!("character table fails orthogonality: {o:?}")));
        }
        if self.chars.iter().zip(&self.degrees).any(|(row, &d)| row[0].as_integer() != Some(d as i64)) {
            return Err(CharError::Integrity("degree column disagrees with identity values".into()));
        }
        Ok(())
    }

    /// Multiplicities of the irreducibles in an integer-valued class function.
    pub fn decompose(&self, class_values: &[i64]) -> Result<Vec<u64>, CharError> {
        let f = &self.field;
        let order = self.classes.group_order() as i64;
        let chi: Vec<Cyclo> = class_values.iter().map(|&v| f.integer(v)).collect();
        let mults = self
            .chars
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let total = self.pairing(&chi, row);
                match total.as_integer() {
                    Some(t) if t % order == 0 && t >= 0 => Ok((t / order) as u64),
                    _ => Err(CharError::Integrity(format!(
                        "multiplicity of irreducible {i} is {total:?}/{order}, not a non-negative integer"
                    ))),
                }
            })
            .collect::<Result<Vec<u64>, CharError>>()?;
        let dim: u64 = mults.iter().zip(&self.degrees).map(|(m, d)| m * d).sum();
        if dim as i64 != class_values[0] {
            return Err(CharError::Integrity(format!("multiplicities give dimension {dim}, not {}", class_values[0])));
        }
        Ok(mults)
    }
}

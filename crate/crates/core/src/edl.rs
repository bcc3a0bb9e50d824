//! Extended Deligne–Lusztig varieties at finite coefficient level.
//!
//! A variety is given by a set of Galois elements `delta` and, for each, a
//! target set `Y_delta`; its points are the `g` in `SL_2(R)` with
//! `g^-1 delta(g)` in `Y_delta` for every `delta`. Points are enumerated over
//! `F_{q^n}` coefficients either by filtering the whole group (the reference
//! oracle) or by solving for the columns of `g` one at a time.
//!
//! The concrete varieties of the ramified `SL_2` example are built here too:
//! `X_L` (level 3, `e = 2`), its `U_2^1`-quotient `Y_L` in the coordinates
//! `(a_0, c_0, a_1, c_1, a_2, c_2)`, and the variety `Y` in `G_2` whose
//! `(S,S)`-orbits are the tuples `(x_0, y_0, z_0, w_0, f)`.

use std::collections::HashSet;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

use crate::fftower::{FieldElem, FieldError, FieldTower};
use crate::matgroup::{GroupError, Mat2, Sl2};
use crate::par;
use crate::truncring::{GaloisElem, RingDesc, RingError, TruncElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EdlError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0}")]
    Unsupported(String),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

impl EdlError {
    fn naive_too_large(required: u128, cap: u128) -> EdlError {
        EdlError::Unsupported(format!(
            "the group has {required} elements (cap {cap}); use a structured enumerator instead"
        ))
    }
}

/// Where `g^-1 delta(g)` must land.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The coset `x U` of the upper unitriangular group over the whole ring.
    Coset(Mat2),
    /// The group `(S,S)` of matrices `[[1 + x t, y t], [0, 1 - x t]]`.
    Ss,
}

#[derive(Clone, Debug)]
pub struct EdlSpec {
    group: Sl2,
    conditions: Vec<(GaloisElem, Target)>,
}

impl EdlSpec {
    pub fn new(group: Sl2, conditions: Vec<(GaloisElem, Target)>) -> Result<EdlSpec, EdlError> {
        for (_, target) in &conditions {
            if let Target::Coset(x) = target {
                if !group.is_member(x) {
                    return Err(GroupError::NotInGroup(group.ring().serialize(&group.det(x))).into());
                }
            }
        }
        Ok(EdlSpec { group, conditions })
    }

    pub fn group(&self) -> &Sl2 {
        &self.group
    }

    pub fn conditions(&self) -> &[(GaloisElem, Target)] {
        &self.conditions
    }

    pub fn in_target(&self, target: &Target, y: &Mat2) -> bool {
        let ring = self.group.ring();
        match target {
            Target::Coset(x) => is_upper_unitriangular(ring, &self.group.mul(&self.group.inv(x), y)),
            Target::Ss => {
                let f = ring.field();
                y.c.is_zero()
                    && y.a.coeff(0) == f.one()
                    && y.b.coeff(0).is_zero()
                    && ring.valuation(&ring.sub(&y.a, &ring.one())) >= ring.e() as usize
                    && ring.valuation(&y.b) >= ring.e() as usize
                    && self.group.is_member(y)
            }
        }
    }

    /// Raw membership: every `g^-1 delta(g)` lies in its target.
    pub fn is_member(&self, g: &Mat2) -> bool {
        self.group.is_member(g)
            && self
                .conditions
                .iter()
                .all(|(delta, target)| self.in_target(target, &self.group.twisted_quotient(*delta, g)))
    }
}

fn is_upper_unitriangular(ring: &RingDesc, m: &Mat2) -> bool {
    m.a == ring.one() && m.d == ring.one() && m.c.is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMeta {
    pub variety: String,
    pub q: u64,
    pub n: u32,
    pub r_prime: usize,
    pub method: String,
    /// Set when the set is empty for a structural reason (no Artin–Schreier
    /// roots at this coefficient level) rather than by enumeration.
    pub structurally_empty: bool,
}

/// A duplicate-free, canonically ordered set of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet<P> {
    pub points: Vec<P>,
    pub meta: PointMeta,
}

impl<P: Ord + Hash + Clone> PointSet<P> {
    /// Sorts, then re-verifies every point and rejects duplicates.
    pub fn verified(
        mut points: Vec<P>,
        meta: PointMeta,
        check: impl Fn(&P) -> bool,
    ) -> Result<PointSet<P>, EdlError> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(EdlError::Integrity(format!("duplicate point in {}", meta.variety)));
        }
        if let Some(i) = points.iter().position(|p| !check(p)) {
            return Err(EdlError::Integrity(format!("point {i} of {} fails its defining conditions", meta.variety)));
        }
        Ok(PointSet { points, meta })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_all(&self, other: &[P]) -> bool {
        let set: HashSet<&P> = self.points.iter().collect();
        other.iter().all(|p| set.contains(p))
    }
}

fn mat_point_set(spec: &EdlSpec, mut points: Vec<Mat2>, variety: &str, method: &str) -> Result<PointSet<Mat2>, EdlError> {
    let ring = spec.group().ring();
    let meta = PointMeta {
        variety: variety.to_string(),
        q: ring.q(),
        n: ring.n(),
        r_prime: ring.r_prime(),
        method: method.to_string(),
        structurally_empty: false,
    };
    let mut set = PointSet::verified(std::mem::take(&mut points), meta, |g| spec.is_member(g))?;
    spec.group().canonical_sort(&mut set.points);
    Ok(set)
}

/// Filters the whole group by the defining conditions.
pub fn enumerate_naive(spec: &EdlSpec, cap: u128) -> Result<PointSet<Mat2>, EdlError> {
    let required = spec.group().predicted_order();
    if required > cap {
        return Err(EdlError::naive_too_large(required, cap));
    }
    let elems = spec.group().elements(cap)?;
    let points = par::flat_map(&elems, |g| if spec.is_member(g) { vec![*g] } else { Vec::new() });
    mat_point_set(spec, points, "custom", "naive")
}

/// A condition `g^-1 delta(g) in [[1,0],[s,1]] U` with `s = c pi^k`.
struct LowerCoset {
    delta: GaloisElem,
    s: TruncElem,
    k: usize,
    unit: FieldElem,
}

fn lower_cosets(spec: &EdlSpec) -> Result<Vec<LowerCoset>, EdlError> {
    let ring = spec.group().ring();
    let unsupported =
        || EdlError::Unsupported("column solving needs cosets [[1,0],[c pi^k,1]] U with k >= 1".into());
    let mut out = Vec::new();
    for (delta, target) in spec.conditions() {
        let Target::Coset(x) = target else { return Err(unsupported()) };
        if *x != spec.group().lower(x.c) {
            return Err(unsupported());
        }
        let k = ring.valuation(&x.c);
        if k == 0 || k >= ring.r_prime() || x.c != ring.monomial(x.c.coeff(k), k) {
            return Err(unsupported());
        }
        out.push(LowerCoset { delta: *delta, s: x.c, k, unit: x.c.coeff(k) });
    }
    if out.is_empty() {
        return Err(unsupported());
    }
    out.sort_by_key(|c| c.k);
    Ok(out)
}

/// Column-solving enumerator for lower-unipotent coset conditions.
///
/// Writing `g = [v | w]`, the condition for `delta` with coset
/// `[[1,0],[s,1]] U` reads `delta(v) = v + s w` and
/// `delta(w) - w in R delta(v)`. Each entry of `v` is first pruned by
/// `delta(x) - x in s R`; the condition with the smallest valuation of `s`
/// then fixes `w` up to the annihilator of `s`, and the remaining
/// first-column conditions do not depend on that ambiguity.
pub fn enumerate_by_columns(spec: &EdlSpec) -> Result<PointSet<Mat2>, EdlError> {
    let group = spec.group();
    let ring = group.ring();
    let f = ring.field();
    let cosets = lower_cosets(spec)?;
    let primary = &cosets[0];
    let components: Vec<TruncElem> = ring
        .elements(u128::MAX)?
        .into_iter()
        .filter(|x| {
            cosets.iter().all(|c| ring.valuation(&ring.sub(&ring.galois_apply(c.delta, x), x)) >= c.k)
        })
        .collect();
    let field = f.level_elements(ring.n())?;
    let r_prime = ring.r_prime();
    let annihilator: Vec<TruncElem> = {
        let mut acc = vec![ring.zero()];
        for pos in r_prime - primary.k..r_prime {
            acc = acc
                .iter()
                .flat_map(|x| field.iter().map(move |&c| (*x, c)))
                .map(|(x, c)| ring.add(&x, &ring.monomial(c, pos)))
                .collect();
        }
        acc
    };
    let unit_inv = f.inv(primary.unit).expect("monomial coefficient is nonzero");
    let solve_w = |x: &TruncElem| {
        let diff = ring.sub(&ring.galois_apply(primary.delta, x), x);
        ring.scale(unit_inv, &ring.shift_down(&diff, primary.k).expect("pruned component"))
    };
    let points = par::flat_map(&components, |a| {
        let mut found = Vec::new();
        let wb = solve_w(a);
        for c in &components {
            if !ring.is_unit(a) && !ring.is_unit(c) {
                continue;
            }
            let wd = solve_w(c);
            let consistent = cosets[1..].iter().all(|cs| {
                let lhs_a = ring.sub(&ring.galois_apply(cs.delta, a), a);
                let lhs_c = ring.sub(&ring.galois_apply(cs.delta, c), c);
                lhs_a == ring.mul(&cs.s, &wb) && lhs_c == ring.mul(&cs.s, &wd)
            });
            if !consistent {
                continue;
            }
            for kb in &annihilator {
                for kd in &annihilator {
                    let g = Mat2 { a: *a, b: ring.add(&wb, kb), c: *c, d: ring.add(&wd, kd) };
                    if group.is_member(&g) && spec.is_member(&g) {
                        found.push(g);
                    }
                }
            }
        }
        found
    });
    mat_point_set(spec, points, "custom", "column-solving")
}

/// The ring `F_{q^n}[pi]/pi^3` with `pi^2 = t` of the ramified example.
pub fn xl_ring(tower: &Arc<FieldTower>, n: u32) -> Result<RingDesc, EdlError> {
    Ok(RingDesc::new(tower.clone(), n, 2, 3)?)
}

/// `X_L`: `x_phi = [[1,0],[t,1]]`, `x_sigma = [[1,0],[pi,1]]`, level 3.
pub fn xl_spec(tower: &Arc<FieldTower>, n: u32) -> Result<EdlSpec, EdlError> {
    let group = Sl2::new(xl_ring(tower, n)?);
    let ring = group.ring();
    let conditions = vec![
        (GaloisElem::PHI, Target::Coset(group.lower(ring.t()))),
        (GaloisElem::SIGMA, Target::Coset(group.lower(ring.pi()))),
    ];
    EdlSpec::new(group, conditions)
}

/// Whether the Artin–Schreier roots of `x^q - x = 1` lie in `F_{q^n}`.
pub fn artin_schreier_level_ok(tower: &FieldTower, n: u32) -> bool {
    n.is_multiple_of(tower.p())
}

fn structurally_empty<P>(variety: &str, ring: &RingDesc) -> PointSet<P> {
    PointSet {
        points: Vec::new(),
        meta: PointMeta {
            variety: variety.to_string(),
            q: ring.q(),
            n: ring.n(),
            r_prime: ring.r_prime(),
            method: "artin-schreier-obstruction".into(),
            structurally_empty: true,
        },
    }
}

/// `X_L(F_{q^n})` by column solving.
pub fn enumerate_xl(tower: &Arc<FieldTower>, n: u32) -> Result<PointSet<Mat2>, EdlError> {
    let spec = xl_spec(tower, n)?;
    if !artin_schreier_level_ok(tower, n) {
        return Ok(structurally_empty("X_L", spec.group().ring()));
    }
    let mut set = enumerate_by_columns(&spec)?;
    set.meta.variety = "X_L".into();
    Ok(set)
}

/// A point of `Y_L`: the first column `(a, c)` of a point of `X_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YlPoint {
    pub a0: FieldElem,
    pub c0: FieldElem,
    pub a1: FieldElem,
    pub c1: FieldElem,
    pub a2: FieldElem,
    pub c2: FieldElem,
}

impl YlPoint {
    pub fn coords(&self) -> [FieldElem; 6] {
        [self.a0, self.c0, self.a1, self.c1, self.a2, self.c2]
    }

    pub fn from_column(a: &TruncElem, c: &TruncElem) -> YlPoint {
        YlPoint { a0: a.coeff(0), c0: c.coeff(0), a1: a.coeff(1), c1: c.coeff(1), a2: a.coeff(2), c2: c.coeff(2) }
    }

    pub fn column(&self, ring: &RingDesc) -> (TruncElem, TruncElem) {
        (ring.from_coeffs(&[self.a0, self.a1, self.a2]), ring.from_coeffs(&[self.c0, self.c1, self.c2]))
    }

    /// `f_1 = a_0 c_2 - c_0 a_2`.
    pub fn f1(&self, f: &FieldTower) -> FieldElem {
        f.sub(f.mul(self.a0, self.c2), f.mul(self.c0, self.a2))
    }

    /// `f_2 = a_1 c_2 - c_1 a_2`.
    pub fn f2(&self, f: &FieldTower) -> FieldElem {
        f.sub(f.mul(self.a1, self.c2), f.mul(self.c1, self.a2))
    }

    /// The defining system of `Y_L`.
    pub fn satisfies(&self, f: &FieldTower) -> bool {
        let fixed = |x: FieldElem| f.frobenius_q(x) == x;
        let two = f.from_int(2);
        let constraint = f.mul(two, f.sub(f.mul(self.c0, self.a1), f.mul(self.c1, self.a0)));
        let f1 = self.f1(f);
        fixed(self.a0)
            && fixed(self.c0)
            && fixed(self.a1)
            && fixed(self.c1)
            && constraint == f.one()
            && f.sub(f.frobenius_q(f1), f1) == f.one()
            && fixed(self.f2(f))
    }
}

pub fn project_xl(g: &Mat2) -> YlPoint {
    YlPoint::from_column(&g.a, &g.c)
}

/// `Y_L(F_{q^n})` by its triangular parameterization: `(a_0, c_0, a_1, c_1)`
/// on `2(c_0 a_1 - c_1 a_0) = 1`, `f_1` an Artin–Schreier root, `f_2` in
/// `F_q`, and `(a_2, c_2)` recovered linearly from `(f_1, f_2)`.
pub fn enumerate_yl(tower: &Arc<FieldTower>, n: u32) -> Result<PointSet<YlPoint>, EdlError> {
    let ring = xl_ring(tower, n)?;
    let f = &**tower;
    if !artin_schreier_level_ok(tower, n) {
        return Ok(structurally_empty("Y_L", &ring));
    }
    let fq = f.level_elements(1)?;
    let roots: Vec<FieldElem> = f.artin_schreier_solve(f.one())?.into_iter().filter(|&x| f.in_level(x, n)).collect();
    let two = f.from_int(2);
    let mut points = Vec::new();
    for &a0 in &fq {
        for &c0 in &fq {
            for &a1 in &fq {
                for &c1 in &fq {
                    let minor = f.sub(f.mul(c0, a1), f.mul(c1, a0));
                    if f.mul(two, minor) != f.one() {
                        continue;
                    }
                    // [[-c0, a0], [-c1, a1]] (a2, c2) = (f1, f2), determinant -minor.
                    let det_inv = f.inv(f.neg(minor)).expect("minor is 1/2");
                    for &f1 in &roots {
                        for &f2 in &fq {
                            let a2 = f.mul(det_inv, f.sub(f.mul(a1, f1), f.mul(a0, f2)));
                            let c2 = f.mul(det_inv, f.sub(f.mul(c1, f1), f.mul(c0, f2)));
                            points.push(YlPoint { a0, c0, a1, c1, a2, c2 });
                        }
                    }
                }
            }
        }
    }
    let meta = PointMeta {
        variety: "Y_L".into(),
        q: ring.q(),
        n,
        r_prime: 3,
        method: "triangular".into(),
        structurally_empty: false,
    };
    PointSet::verified(points, meta, |p| p.satisfies(f) && f.in_level(p.a2, n) && f.in_level(p.c2, n))
}

/// The `U_2^1`-fibre over a point of `Y_L`: the second columns allowed by
/// the final system, `b_0 = a_2^q - a_2`, `d_0 = c_2^q - c_2`,
/// `b_1 = d_1 = 0` and `a_0 d_2 + a_2 d_0 = b_0 c_2 + b_2 c_0`.
pub fn lift_yl(ring: &RingDesc, p: &YlPoint) -> Vec<Mat2> {
    let f = ring.field();
    let b0 = f.sub(f.frobenius_q(p.a2), p.a2);
    let d0 = f.sub(f.frobenius_q(p.c2), p.c2);
    let rhs = f.sub(f.mul(b0, p.c2), f.mul(p.a2, d0));
    let (a, c) = p.column(ring);
    let zero = f.zero();
    let field = f.level_elements(ring.n()).expect("coefficient level exists");
    field
        .iter()
        .map(|&free| {
            // a0 d2 - c0 b2 = rhs
            let (b2, d2) = match f.inv(p.a0) {
                Some(a0_inv) => (free, f.mul(a0_inv, f.add(rhs, f.mul(p.c0, free)))),
                None => (f.neg(f.div(rhs, p.c0)), free),
            };
            Mat2 { a, b: ring.from_coeffs(&[b0, zero, b2]), c, d: ring.from_coeffs(&[d0, zero, d2]) }
        })
        .collect()
}

/// `X_L(F_{q^n})` from the final system: every `Y_L` point lifted along its
/// `U_2^1`-fibre. Independent of the column-solving enumerator.
pub fn enumerate_xl_by_lifting(tower: &Arc<FieldTower>, n: u32) -> Result<PointSet<Mat2>, EdlError> {
    let spec = xl_spec(tower, n)?;
    let ring = spec.group().ring().clone();
    let yl = enumerate_yl(tower, n)?;
    if yl.meta.structurally_empty {
        return Ok(structurally_empty("X_L", &ring));
    }
    let points = par::flat_map(&yl.points, |p| lift_yl(&ring, p));
    let mut set = mat_point_set(&spec, points, "X_L", "final-system-lift")?;
    set.meta.variety = "X_L".into();
    Ok(set)
}

/// The group `G_2 = SL_2(F_q[t]/t^2)`.
pub fn g2(tower: &Arc<FieldTower>) -> Result<Sl2, EdlError> {
    Ok(Sl2::new(RingDesc::new(tower.clone(), 1, 1, 2)?))
}

/// `Y = {g in SL_2(F_{q^n}[t]/t^2) : g^-1 phi(g) in (S,S)}`.
pub fn y_spec(tower: &Arc<FieldTower>, n: u32) -> Result<EdlSpec, EdlError> {
    let group = Sl2::new(RingDesc::new(tower.clone(), n, 1, 2)?);
    EdlSpec::new(group, vec![(GaloisElem::PHI, Target::Ss)])
}

/// An `(S,S)`-orbit of `Y`: `(x_0, y_0, z_0, w_0)` in `SL_2(F_q)` and
/// `f = x_0 z_1 - z_0 x_1` in `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YOrbit {
    pub x0: FieldElem,
    pub y0: FieldElem,
    pub z0: FieldElem,
    pub w0: FieldElem,
    pub f: FieldElem,
}

impl YOrbit {
    pub fn coords(&self) -> [FieldElem; 5] {
        [self.x0, self.y0, self.z0, self.w0, self.f]
    }

    /// Orbit of a raw point of `Y`.
    pub fn of(tower: &FieldTower, g: &Mat2) -> YOrbit {
        let f = tower;
        let (x0, x1, z0, z1) = (g.a.coeff(0), g.a.coeff(1), g.c.coeff(0), g.c.coeff(1));
        YOrbit { x0, y0: g.b.coeff(0), z0, w0: g.d.coeff(0), f: f.sub(f.mul(x0, z1), f.mul(z0, x1)) }
    }

    /// A raw point of `Y` over `F_q` in this orbit.
    pub fn canonical_lift(&self, ring: &RingDesc) -> Mat2 {
        let f = ring.field();
        let zero = f.zero();
        let (x1, z1, y1, w1) = match f.inv(self.x0) {
            Some(x0_inv) => {
                let z1 = f.mul(self.f, x0_inv);
                (zero, z1, zero, f.mul(f.mul(self.y0, z1), x0_inv))
            }
            None => {
                let z0_inv = f.inv(self.z0).expect("first column is unimodular");
                let x1 = f.neg(f.mul(self.f, z0_inv));
                (x1, zero, f.mul(f.mul(x1, self.w0), z0_inv), zero)
            }
        };
        Mat2 {
            a: ring.from_coeffs(&[self.x0, x1]),
            b: ring.from_coeffs(&[self.y0, y1]),
            c: ring.from_coeffs(&[self.z0, z1]),
            d: ring.from_coeffs(&[self.w0, w1]),
        }
    }
}

/// `Y/(S,S)` as orbit tuples, by its parameterization.
pub fn enumerate_y_orbits(tower: &Arc<FieldTower>) -> Result<PointSet<YOrbit>, EdlError> {
    let f = &**tower;
    let base = Sl2::new(RingDesc::new(tower.clone(), 1, 1, 1)?);
    let fq = f.level_elements(1)?;
    let mut points = Vec::new();
    for m in base.elements(u128::MAX)? {
        for &fv in &fq {
            points.push(YOrbit { x0: m.a.coeff(0), y0: m.b.coeff(0), z0: m.c.coeff(0), w0: m.d.coeff(0), f: fv });
        }
    }
    let spec = y_spec(tower, 1)?;
    let ring = spec.group().ring().clone();
    let meta = PointMeta {
        variety: "Y/(S,S)".into(),
        q: f.q(),
        n: 1,
        r_prime: 2,
        method: "orbit-parameterization".into(),
        structurally_empty: false,
    };
    PointSet::verified(points, meta, |o| {
        let g = o.canonical_lift(&ring);
        spec.is_member(&g) && YOrbit::of(f, &g) == *o
    })
}

/// Raw points of `Y(F_{q^n})` by parameterization: `(x_0, y_0, z_0, w_0)` in
/// `SL_2(F_q)`, `(x_1, z_1)` with `x_0 z_1 - z_0 x_1` in `F_q`, and
/// `(y_1, w_1)` on the line cut out by the determinant.
pub fn enumerate_y_raw(tower: &Arc<FieldTower>, n: u32) -> Result<PointSet<Mat2>, EdlError> {
    let spec = y_spec(tower, n)?;
    let ring = spec.group().ring().clone();
    let f = &**tower;
    let fqn = f.level_elements(n)?;
    let base = Sl2::new(RingDesc::new(tower.clone(), 1, 1, 1)?);
    let base_elems = base.elements(u128::MAX)?;
    let points = par::flat_map(&base_elems, |m| {
        let (x0, y0, z0, w0) = (m.a.coeff(0), m.b.coeff(0), m.c.coeff(0), m.d.coeff(0));
        let mut out = Vec::new();
        for &x1 in &fqn {
            for &z1 in &fqn {
                let fv = f.sub(f.mul(x0, z1), f.mul(z0, x1));
                if !f.in_level(fv, 1) {
                    continue;
                }
                // x1 w0 + x0 w1 = y0 z1 + y1 z0
                let rhs = f.sub(f.mul(y0, z1), f.mul(x1, w0));
                for &free in &fqn {
                    let (y1, w1) = match f.inv(x0) {
                        Some(x0_inv) => (free, f.mul(x0_inv, f.add(rhs, f.mul(free, z0)))),
                        None => (f.neg(f.div(rhs, z0)), free),
                    };
                    out.push(Mat2 {
                        a: ring.from_coeffs(&[x0, x1]),
                        b: ring.from_coeffs(&[y0, y1]),
                        c: ring.from_coeffs(&[z0, z1]),
                        d: ring.from_coeffs(&[w0, w1]),
                    });
                }
            }
        }
        out
    });
    let mut set = mat_point_set(&spec, points, "Y", "parameterization")?;
    set.meta.variety = "Y".into();
    Ok(set)
}

/// Point counts of Lusztig's `X_x = {g : g^-1 phi(g) in x U}` in
/// `SL_2(F_{q^n}[t]/t^r)` for each requested `n`.
pub fn lusztig_counts(
    tower: &Arc<FieldTower>,
    x_entries: [i64; 4],
    r: usize,
    ns: &[u32],
    cap: u128,
) -> Result<Vec<(u32, usize)>, EdlError> {
    ns.iter()
        .map(|&n| {
            let group = Sl2::new(RingDesc::new(tower.clone(), n, 1, r)?);
            let ring = group.ring();
            let x = group.element(x_entries.map(|v| ring.from_int(v)))?;
            let spec = EdlSpec::new(group, vec![(GaloisElem::PHI, Target::Coset(x))])?;
            Ok((n, enumerate_naive(&spec, cap)?.len()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fftower::make_tower;

    fn tower(levels: &[u32]) -> Arc<FieldTower> {
        Arc::new(make_tower(3, 1, levels).unwrap())
    }

    #[test]
    fn empty_delta_gives_whole_group() {
        let t = tower(&[1]);
        let group = Sl2::new(RingDesc::new(t, 1, 1, 2).unwrap());
        let spec = EdlSpec::new(group.clone(), vec![]).unwrap();
        let pts = enumerate_naive(&spec, 1 << 20).unwrap();
        assert_eq!(pts.points, group.elements(1 << 20).unwrap());
    }

    #[test]
    fn identity_not_in_nontrivial_lower_coset() {
        let t = tower(&[1]);
        let spec = xl_spec(&t, 1).unwrap();
        assert!(!spec.is_member(&spec.group().identity()));
    }

    #[test]
    fn lang_preimage_of_u_over_base_field() {
        let t = tower(&[1, 2]);
        let counts = lusztig_counts(&t, [1, 0, 0, 1], 1, &[1, 2], 1 << 20).unwrap();
        // phi is trivial on F_3, so every element qualifies at n = 1.
        assert_eq!(counts[0], (1, 24));
        // Over F_9: g^-1 phi(g) in U(F_9) means g in SL_2(F_3) U(F_9).
        assert_eq!(counts[1], (2, 24 * 9 / 3));
        let weyl = lusztig_counts(&t, [0, -1, 1, 0], 1, &[2], 1 << 20).unwrap();
        assert_eq!(weyl, lusztig_counts(&t, [0, -1, 1, 0], 1, &[2], 1 << 20).unwrap());
        assert!(weyl[0].1 <= 720);
    }

    #[test]
    fn xl_is_empty_over_base_field() {
        let t = tower(&[1]);
        let naive = enumerate_naive(&xl_spec(&t, 1).unwrap(), 1 << 20).unwrap();
        assert!(naive.is_empty());
        let structured = enumerate_xl(&t, 1).unwrap();
        assert!(structured.is_empty() && structured.meta.structurally_empty);
        assert!(enumerate_by_columns(&xl_spec(&t, 1).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn column_solving_matches_naive_on_small_specs() {
        let t = tower(&[1]);
        let group = Sl2::new(RingDesc::new(t.clone(), 1, 2, 3).unwrap());
        let ring = group.ring().clone();
        let specs = vec![
            vec![(GaloisElem::SIGMA, Target::Coset(group.lower(ring.pi())))],
            vec![(GaloisElem::PHI, Target::Coset(group.lower(ring.t())))],
            vec![(GaloisElem::SIGMA, Target::Coset(group.lower(ring.scale(t.from_int(2), &ring.pi()))))],
            vec![
                (GaloisElem::SIGMA, Target::Coset(group.lower(ring.pi()))),
                (GaloisElem::PHI, Target::Coset(group.lower(ring.t()))),
            ],
        ];
        for conditions in specs {
            let spec = EdlSpec::new(group.clone(), conditions).unwrap();
            let naive = enumerate_naive(&spec, 1 << 20).unwrap();
            let cols = enumerate_by_columns(&spec).unwrap();
            assert_eq!(naive.points, cols.points);
        }
    }

    #[test]
    fn yl_has_216_points_and_exact_recovery() {
        let t = tower(&[1, 3]);
        let yl = enumerate_yl(&t, 3).unwrap();
        assert_eq!(yl.len(), 216);
        let f = &*t;
        let fq = f.level_elements(1).unwrap();
        for p in &yl.points {
            assert!(fq.contains(&p.f2(f)));
            assert_eq!(f.sub(f.frobenius_q(p.f1(f)), p.f1(f)), f.one());
        }
        assert!(enumerate_yl(&t, 1).unwrap().meta.structurally_empty);
    }

    #[test]
    fn xl_dual_oracle_at_n3() {
        let t = tower(&[1, 3]);
        let cols = enumerate_xl(&t, 3).unwrap();
        let lifted = enumerate_xl_by_lifting(&t, 3).unwrap();
        assert_eq!(cols.len(), 216 * 27);
        assert_eq!(cols.points, lifted.points);
        let f = &*t;
        for g in &cols.points {
            // b_0 = -2 a_1, d_0 = -2 c_1, b_1 = d_1 = 0
            assert_eq!(g.b.coeff(0), f.mul(f.from_int(-2), g.a.coeff(1)));
            assert_eq!(g.d.coeff(0), f.mul(f.from_int(-2), g.c.coeff(1)));
            assert!(g.b.coeff(1).is_zero() && g.d.coeff(1).is_zero());
        }
    }

    #[test]
    fn y_orbits_match_raw_points_at_n1() {
        let t = tower(&[1]);
        let orbits = enumerate_y_orbits(&t).unwrap();
        assert_eq!(orbits.len(), 72);
        let naive = enumerate_naive(&y_spec(&t, 1).unwrap(), 1 << 20).unwrap();
        let raw = enumerate_y_raw(&t, 1).unwrap();
        assert_eq!(naive.points, raw.points);
        // At n = 1 the condition is vacuous: Y is all of G_2.
        assert_eq!(raw.len(), 648);
        let mut seen: Vec<YOrbit> = raw.points.iter().map(|g| YOrbit::of(&t, g)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen, orbits.points);
        let ring = y_spec(&t, 1).unwrap().group().ring().clone();
        let id = Sl2::new(ring.clone()).identity();
        assert!(orbits.points.contains(&YOrbit::of(&t, &id)));
    }

    #[test]
    fn y_raw_parameterization_matches_naive_at_n2() {
        let t = tower(&[2]);
        let naive = enumerate_naive(&y_spec(&t, 2).unwrap(), 1 << 20).unwrap();
        let raw = enumerate_y_raw(&t, 2).unwrap();
        assert_eq!(naive.points, raw.points);
        assert_eq!(raw.len(), 24 * 3 * 9 * 9);
    }
}

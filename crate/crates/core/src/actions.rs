//! Finite group actions on point sets: orbits, quotient identifications,
//! equivariant maps and the search for the map `Y/(S,S) -> Y_L/A_+`.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::edl::{self, EdlError, YOrbit, YlPoint};
use crate::fftower::{FieldElem, FieldTower};
use crate::matgroup::{subgroup_points, FiniteGroup, GroupError, Mat2, Sl2, SubgroupKind};
use crate::par;
use crate::truncring::RingDesc;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error(transparent)]
    Edl(#[from] EdlError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("group element {g} sends point {point} outside the set")]
    PointEscaped { g: usize, point: usize },
    #[error("action axiom fails: {0}")]
    Axiom(String),
    #[error("rule is not constant on the orbit of point {0}: points {0} and {1} disagree")]
    NotOrbitConstant(usize, usize),
    #[error("rule identifies points {0} and {1} from different orbits")]
    NotInjective(usize, usize),
    #[error("induced action is not well defined on the orbit of point {0}")]
    NotWellDefined(usize),
}

/// A left action of a finite group (elements `0..order`, identity 0) on
/// points `0..degree`, stored as a full table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAction {
    order: usize,
    degree: usize,
    table: Vec<u32>,
}

impl FiniteAction {
    /// Tabulates `act` over group elements and points, both given as
    /// canonical lists; the group list must start with the identity.
    pub fn build<T, P, F>(elems: &[T], points: &[P], act: F) -> Result<FiniteAction, ActionError>
    where
        T: Sync,
        P: Hash + Eq + Sync,
        F: Fn(&T, &P) -> P + Sync + Send,
    {
        let index: HashMap<&P, u32> = points.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let idx: Vec<usize> = (0..elems.len()).collect();
        let rows = par::map(&idx, |&g| {
            points
                .iter()
                .enumerate()
                .map(|(s, p)| index.get(&act(&elems[g], p)).copied().ok_or(ActionError::PointEscaped { g, point: s }))
                .collect::<Result<Vec<u32>, _>>()
        });
        let mut table = Vec::with_capacity(elems.len() * points.len());
        for row in rows {
            table.extend(row?);
        }
        Ok(FiniteAction { order: elems.len(), degree: points.len(), table })
    }

    pub fn from_table(order: usize, degree: usize, table: Vec<u32>) -> FiniteAction {
        assert_eq!(table.len(), order * degree);
        FiniteAction { order, degree, table }
    }

    pub fn trivial(order: usize, degree: usize) -> FiniteAction {
        let table = (0..order).flat_map(|_| 0..degree as u32).collect();
        FiniteAction { order, degree, table }
    }

    /// The left regular action of a group on itself.
    pub fn regular(group: &FiniteGroup) -> FiniteAction {
        let n = group.order();
        let table = (0..n * n).map(|k| group.mul(k / n, k % n) as u32).collect();
        FiniteAction { order: n, degree: n, table }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn act(&self, g: usize, s: usize) -> usize {
        self.table[g * self.degree + s] as usize
    }

    /// Checks `1.s = s` everywhere and `(gh).s = g.(h.s)` for every
    /// generator `g`, every `h` and every point, plus `samples` random
    /// triples.
    pub fn verify_axioms<R: Rng>(
        &self,
        group: &FiniteGroup,
        generators: &[usize],
        samples: usize,
        rng: &mut R,
    ) -> Result<(), ActionError> {
        if let Some(s) = (0..self.degree).find(|&s| self.act(0, s) != s) {
            return Err(ActionError::Axiom(format!("identity moves point {s}")));
        }
        let check = |g: usize, h: usize, s: usize| {
            if self.act(group.mul(g, h), s) != self.act(g, self.act(h, s)) {
                Err(ActionError::Axiom(format!("(g h).s != g.(h.s) for g={g}, h={h}, s={s}")))
            } else {
                Ok(())
            }
        };
        for &g in generators {
            for h in 0..self.order {
                for s in 0..self.degree {
                    check(g, h, s)?;
                }
            }
        }
        for _ in 0..samples {
            check(rng.gen_range(0..self.order), rng.gen_range(0..self.order), rng.gen_range(0..self.degree))?;
        }
        Ok(())
    }

    pub fn fixed_points(&self, g: usize) -> usize {
        (0..self.degree).filter(|&s| self.act(g, s) == s).count()
    }

    /// Fixed-point count of every group element.
    pub fn permutation_character(&self) -> Vec<u64> {
        let idx: Vec<usize> = (0..self.order).collect();
        par::map(&idx, |&g| self.fixed_points(g) as u64)
    }

    pub fn orbits(&self) -> Orbits {
        let mut uf = UnionFind::new(self.degree);
        for g in 0..self.order {
            for s in 0..self.degree {
                uf.union(s, self.act(g, s));
            }
        }
        Orbits::from_union_find(&mut uf)
    }

    /// Whether every point has trivial stabilizer.
    pub fn is_free(&self) -> bool {
        (1..self.order).all(|g| self.fixed_points(g) == 0)
    }

    /// Burnside: the sum of fixed-point counts equals `|G|` times the number
    /// of orbits.
    pub fn burnside_holds(&self) -> bool {
        let total: u64 = self.permutation_character().iter().sum();
        total == (self.order * self.orbits().count()) as u64
    }

    /// The action induced on the orbits of a commuting action `orbits`.
    pub fn induced(&self, orbits: &Orbits) -> Result<FiniteAction, ActionError> {
        let m = orbits.count();
        let mut table = vec![0u32; self.order * m];
        for g in 0..self.order {
            for s in 0..self.degree {
                let target = orbits.class_of(self.act(g, s)) as u32;
                let slot = &mut table[g * m + orbits.class_of(s)];
                if s == orbits.representative(orbits.class_of(s)) {
                    *slot = target;
                } else if *slot != target {
                    return Err(ActionError::NotWellDefined(s));
                }
            }
        }
        Ok(FiniteAction { order: self.order, degree: m, table })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as root so roots are orbit minima.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// A partition of `0..degree` into orbits, numbered by increasing minimal
/// element; each orbit's representative is its minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbits {
    class_of: Vec<u32>,
    reps: Vec<usize>,
    sizes: Vec<usize>,
}

impl Orbits {
    fn from_union_find(uf: &mut UnionFind) -> Orbits {
        let n = uf.parent.len();
        let mut class_of = vec![0u32; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let mut root_class: HashMap<usize, u32> = HashMap::new();
        for (s, slot) in class_of.iter_mut().enumerate() {
            let root = uf.find(s);
            let class = *root_class.entry(root).or_insert_with(|| {
                reps.push(s);
                sizes.push(0);
                (reps.len() - 1) as u32
            });
            *slot = class;
            sizes[class as usize] += 1;
        }
        Orbits { class_of, reps, sizes }
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, s: usize) -> usize {
        self.class_of[s] as usize
    }

    pub fn representative(&self, class: usize) -> usize {
        self.reps[class]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// A verified identification of an orbit set with the image of a
/// coordinate-forgetting rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientProjection<K> {
    /// Image of each orbit, indexed by orbit number.
    pub keys: Vec<K>,
}

impl<K: Ord + Clone> QuotientProjection<K> {
    pub fn sorted_image(&self) -> Vec<K> {
        let mut v = self.keys.clone();
        v.sort();
        v
    }
}

/// Checks that `rule` is constant on orbits and separates them.
pub fn quotient_projection<P, K, F>(points: &[P], orbits: &Orbits, rule: F) -> Result<QuotientProjection<K>, ActionError>
where
    K: Hash + Eq + Clone,
    F: Fn(&P) -> K,
{
    let keys: Vec<K> = (0..orbits.count()).map(|c| rule(&points[orbits.representative(c)])).collect();
    for (s, p) in points.iter().enumerate() {
        let rep = orbits.representative(orbits.class_of(s));
        if rule(p) != keys[orbits.class_of(s)] {
            return Err(ActionError::NotOrbitConstant(rep, s));
        }
    }
    let mut seen: HashMap<&K, usize> = HashMap::new();
    for (c, k) in keys.iter().enumerate() {
        if let Some(&other) = seen.get(k) {
            return Err(ActionError::NotInjective(orbits.representative(other), orbits.representative(c)));
        }
        seen.insert(k, c);
    }
    Ok(QuotientProjection { keys })
}

/// First group element and point where `map` fails to intertwine the two
/// actions, if any.
pub fn equivariance_counterexample(
    domain: &FiniteAction,
    codomain: &FiniteAction,
    map: &[usize],
    elements: &[usize],
) -> Option<(usize, usize)> {
    elements.iter().find_map(|&g| {
        (0..domain.degree())
            .find(|&s| map[domain.act(g, s)] != codomain.act(g, map[s]))
            .map(|s| (g, s))
    })
}

pub fn is_bijection(map: &[usize], codomain_size: usize) -> bool {
    let mut hit = vec![false; codomain_size];
    map.len() == codomain_size
        && map.iter().all(|&t| t < codomain_size && !std::mem::replace(&mut hit[t], true))
}

/// How the two `SL_2(F_q)` coordinates are matched with `(a_0, c_0)` and
/// `(a_1, c_1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// `(a_0, c_0) = (x_0, y_0)`, `(a_1, c_1) ~ (z_0, w_0)`.
    Row,
    /// `(a_0, c_0) = (x_0, z_0)`, `(a_1, c_1) ~ (y_0, w_0)`.
    Column,
}

/// `alpha(x_0, y_0, z_0, w_0, f) = (u_0, v_0, s_3 u_1 / 2, s_4 v_1 / 2, s_f f + xi)`
/// with `(u, v)` chosen by the pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlphaVariant {
    pub id: usize,
    pub pairing: Pairing,
    pub signs: [i8; 2],
    pub f_sign: i8,
}

impl AlphaVariant {
    /// All 16 variants; id 0 is the row pairing with every sign positive.
    pub fn all() -> Vec<AlphaVariant> {
        let mut out = Vec::new();
        for pairing in [Pairing::Row, Pairing::Column] {
            for signs in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
                for f_sign in [1, -1] {
                    out.push(AlphaVariant { id: out.len(), pairing, signs, f_sign });
                }
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        let sign = |s: i8| if s > 0 { "" } else { "-" };
        let (u1, v1) = match self.pairing {
            Pairing::Row => ("z0", "w0"),
            Pairing::Column => ("y0", "w0"),
        };
        let (u0, v0) = match self.pairing {
            Pairing::Row => ("x0", "y0"),
            Pairing::Column => ("x0", "z0"),
        };
        format!(
            "({u0},{v0},{}{u1}/2,{}{v1}/2,{}f+xi)",
            sign(self.signs[0]),
            sign(self.signs[1]),
            sign(self.f_sign)
        )
    }

    pub fn apply(&self, f: &FieldTower, xi: FieldElem, p: &YOrbit) -> [FieldElem; 5] {
        let half = f.inv(f.from_int(2)).expect("q is odd");
        let (u0, v0, u1, v1) = match self.pairing {
            Pairing::Row => (p.x0, p.y0, p.z0, p.w0),
            Pairing::Column => (p.x0, p.z0, p.y0, p.w0),
        };
        let scaled = |x: FieldElem, s: i8| f.mul(f.mul(x, half), f.from_int(s as i64));
        let fv = f.add(f.mul(f.from_int(self.f_sign as i64), p.f), xi);
        [u0, v0, scaled(u1, self.signs[0]), scaled(v1, self.signs[1]), fv]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaResult {
    pub variant: AlphaVariant,
    /// The value of `2(c_0 a_1 - c_1 a_0)` on the image, when it is constant.
    pub constraint_value: Option<FieldElem>,
    pub lands_in_codomain: bool,
    pub bijective: bool,
    pub equivariant_on_generators: bool,
    pub equivariant_everywhere: bool,
    /// `(group element index, domain point index)` of the first failure.
    pub counterexample: Option<(usize, usize)>,
}

impl AlphaResult {
    pub fn verified(&self) -> bool {
        self.lands_in_codomain && self.bijective && self.equivariant_on_generators && self.equivariant_everywhere
    }
}

/// The `G_2`-sets of the quotient theorem at `q`, fully tabulated.
pub struct TheoremData {
    pub tower: Arc<FieldTower>,
    pub g2: Sl2,
    pub g2_elements: Vec<Mat2>,
    pub g2_group: FiniteGroup,
    pub generators: Vec<usize>,
    pub y_orbits: Vec<YOrbit>,
    pub y_action: FiniteAction,
    pub yl_points: Vec<YlPoint>,
    pub yl_action: FiniteAction,
    pub a_plus_orbits: Orbits,
    pub a_orbits: Orbits,
    /// `(a_0, c_0, a_1, c_1, f_1)` of each `A_+`-orbit.
    pub yl_mod_a_plus: QuotientProjection<[FieldElem; 5]>,
    pub yl_mod_a_plus_action: FiniteAction,
    pub a_plus_free: bool,
}

/// Standard generators of `G_2`: the four elementary unipotents
/// `[[1,1],[0,1]], [[1,0],[1,1]], [[1,t],[0,1]], [[1,0],[t,1]]` and the
/// diagonal matrix of a primitive root of `F_q`.
pub fn g2_generators(g2: &Sl2) -> Result<Vec<Mat2>, GroupError> {
    let ring = g2.ring();
    let f = ring.field();
    let gamma = f.level_elements(1).map_err(crate::truncring::RingError::from)?
        .into_iter()
        .find(|&x| !x.is_zero() && (1..f.q() - 1).all(|k| f.pow(x, k) != f.one()))
        .expect("F_q has a primitive root");
    Ok(vec![
        g2.upper(ring.one()),
        g2.lower(ring.one()),
        g2.upper(ring.t()),
        g2.lower(ring.t()),
        g2.diagonal(ring.from_field(gamma))?,
    ])
}

/// Embeds `G_2` in `SL_2(F_{q^n}[pi]/pi^3)` via `t -> pi^2`.
fn embed_g2(target: &RingDesc, m: &Mat2) -> Mat2 {
    let emb = |x: &crate::truncring::TruncElem| target.base_embed(&x.coeffs()[..2]);
    Mat2 { a: emb(&m.a), b: emb(&m.b), c: emb(&m.c), d: emb(&m.d) }
}

impl TheoremData {
    pub fn build(p: u32) -> Result<TheoremData, ActionError> {
        let tower = Arc::new(crate::fftower::make_tower(p, 1, &[1, p]).map_err(EdlError::from)?);
        let f = &*tower;
        let g2 = edl::g2(&tower)?;
        let g2_elements = g2.elements(u128::MAX)?;
        let g2_group = FiniteGroup::from_elements(&g2_elements, |x, y| g2.mul(x, y))?;
        let index: HashMap<Mat2, usize> = g2_elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let generators = g2_generators(&g2)?.iter().map(|m| index[m]).collect();

        let y_orbits = edl::enumerate_y_orbits(&tower)?.points;
        let y_ring = edl::y_spec(&tower, 1)?.group().ring().clone();
        let y_action = FiniteAction::build(&g2_elements, &y_orbits, |g, o| {
            YOrbit::of(f, &g2.mul(g, &o.canonical_lift(&y_ring)))
        })?;

        let yl_points = edl::enumerate_yl(&tower, p)?.points;
        let xl_ring = edl::xl_ring(&tower, p)?;
        let xl_group = Sl2::new(xl_ring.clone());
        let column_action = |m: &Mat2, pt: &YlPoint| {
            let (a, c) = pt.column(&xl_ring);
            let r = &xl_ring;
            YlPoint::from_column(&r.add(&r.mul(&m.a, &a), &r.mul(&m.b, &c)), &r.add(&r.mul(&m.c, &a), &r.mul(&m.d, &c)))
        };
        let yl_action = FiniteAction::build(&g2_elements, &yl_points, |g, pt| column_action(&embed_g2(&xl_ring, g), pt))?;

        let right = |kind: SubgroupKind| -> Result<FiniteAction, ActionError> {
            let elems = subgroup_points(kind, &xl_group, u128::MAX)?;
            FiniteAction::build(&elems, &yl_points, |s, pt| {
                let (a, c) = pt.column(&xl_ring);
                let r = &xl_ring;
                // Right multiplication by a diagonal matrix scales the first column.
                YlPoint::from_column(&r.mul(&a, &s.a), &r.mul(&c, &s.a))
            })
        };
        let a_plus = right(SubgroupKind::APlus)?;
        let a_full = right(SubgroupKind::A)?;
        let a_plus_orbits = a_plus.orbits();
        let a_orbits = a_full.orbits();
        let yl_mod_a_plus = quotient_projection(&yl_points, &a_plus_orbits, |pt| {
            [pt.a0, pt.c0, pt.a1, pt.c1, pt.f1(f)]
        })?;
        let yl_mod_a_plus_action = yl_action.induced(&a_plus_orbits)?;
        Ok(TheoremData {
            tower,
            g2,
            g2_elements,
            g2_group,
            generators,
            y_orbits,
            y_action,
            yl_points,
            yl_action,
            a_plus_orbits,
            a_orbits,
            yl_mod_a_plus,
            yl_mod_a_plus_action,
            a_plus_free: a_plus.is_free(),
        })
    }

    /// Roots of `xi^q - xi = 1` in the ambient field.
    pub fn xis(&self) -> Vec<FieldElem> {
        self.tower.artin_schreier_solve(self.tower.one()).expect("1 is in F_q")
    }

    pub fn check_variant(&self, variant: AlphaVariant, xi: FieldElem) -> AlphaResult {
        let f = &*self.tower;
        let key_index: HashMap<&[FieldElem; 5], usize> =
            self.yl_mod_a_plus.keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let images: Vec<[FieldElem; 5]> = self.y_orbits.iter().map(|o| variant.apply(f, xi, o)).collect();
        let two = f.from_int(2);
        let constraint = |k: &[FieldElem; 5]| f.mul(two, f.sub(f.mul(k[1], k[2]), f.mul(k[3], k[0])));
        let first = images.first().map(constraint);
        let constraint_value = first.filter(|v| images.iter().all(|k| constraint(k) == *v));
        let map: Option<Vec<usize>> = images.iter().map(|k| key_index.get(k).copied()).collect();
        let Some(map) = map else {
            return AlphaResult {
                variant,
                constraint_value,
                lands_in_codomain: false,
                bijective: false,
                equivariant_on_generators: false,
                equivariant_everywhere: false,
                counterexample: None,
            };
        };
        let bijective = is_bijection(&map, self.yl_mod_a_plus.keys.len());
        let on_gens = equivariance_counterexample(&self.y_action, &self.yl_mod_a_plus_action, &map, &self.generators);
        let all: Vec<usize> = (0..self.g2_group.order()).collect();
        let everywhere = equivariance_counterexample(&self.y_action, &self.yl_mod_a_plus_action, &map, &all);
        AlphaResult {
            variant,
            constraint_value,
            lands_in_codomain: true,
            bijective,
            equivariant_on_generators: on_gens.is_none(),
            equivariant_everywhere: everywhere.is_none(),
            counterexample: on_gens.or(everywhere),
        }
    }

    /// Every variant, checked against the given `xi`.
    pub fn alpha_search(&self, xi: FieldElem) -> Vec<AlphaResult> {
        AlphaVariant::all().into_iter().map(|v| self.check_variant(v, xi)).collect()
    }

    /// Whether the verdict of each variant is the same for every root `xi`.
    pub fn xi_independent(&self) -> bool {
        let xis = self.xis();
        let verdicts: Vec<Vec<bool>> =
            xis.iter().map(|&xi| self.alpha_search(xi).iter().map(|r| r.verified()).collect()).collect();
        verdicts.windows(2).all(|w| w[0] == w[1])
    }

    /// Agreement of the closed-form action formula on `(x_0, y_0, z_0, w_0, f)`
    /// with the computed action, over all group elements and orbits.
    pub fn closed_form_y_action_agrees(&self) -> bool {
        let f = &*self.tower;
        let index: HashMap<&YOrbit, usize> = self.y_orbits.iter().enumerate().map(|(i, o)| (o, i)).collect();
        self.g2_elements.iter().enumerate().all(|(gi, g)| {
            let c = |x: &crate::truncring::TruncElem, i: usize| x.coeff(i);
            let (g0, g1, h0, h1) = (c(&g.a, 0), c(&g.a, 1), c(&g.b, 0), c(&g.b, 1));
            let (i0, i1, j0, j1) = (c(&g.c, 0), c(&g.c, 1), c(&g.d, 0), c(&g.d, 1));
            self.y_orbits.iter().enumerate().all(|(si, o)| {
                let lin = |a: FieldElem, x: FieldElem, b: FieldElem, y: FieldElem| f.add(f.mul(a, x), f.mul(b, y));
                let q = f.add(
                    f.add(
                        f.mul(f.mul(o.x0, o.x0), f.sub(f.mul(g0, i1), f.mul(i0, g1))),
                        f.mul(
                            f.mul(o.x0, o.z0),
                            f.sub(f.add(f.mul(g0, j1), f.mul(h0, i1)), f.add(f.mul(i0, h1), f.mul(j0, g1))),
                        ),
                    ),
                    f.mul(f.mul(o.z0, o.z0), f.sub(f.mul(h0, j1), f.mul(j0, h1))),
                );
                let closed = YOrbit {
                    x0: lin(g0, o.x0, h0, o.z0),
                    y0: lin(g0, o.y0, h0, o.w0),
                    z0: lin(i0, o.x0, j0, o.z0),
                    w0: lin(i0, o.y0, j0, o.w0),
                    f: f.add(o.f, q),
                };
                index.get(&closed) == Some(&self.y_action.act(gi, si))
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn trivial_action_has_singleton_orbits() {
        let a = FiniteAction::trivial(5, 4);
        let o = a.orbits();
        assert_eq!(o.count(), 4);
        assert!(o.sizes().iter().all(|&s| s == 1));
        assert!(a.burnside_holds());
    }

    #[test]
    fn regular_action_is_free_with_zero_character_off_identity() {
        let g = FiniteGroup::cyclic(6);
        let a = FiniteAction::regular(&g);
        assert!(a.is_free());
        let chi = a.permutation_character();
        assert_eq!(chi[0], 6);
        assert!(chi[1..].iter().all(|&v| v == 0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        a.verify_axioms(&g, &[1], 100, &mut rng).unwrap();
    }

    #[test]
    fn broken_action_is_detected() {
        let g = FiniteGroup::cyclic(3);
        // Swaps two points for every non-identity element: not an action of Z/3.
        let table = vec![0, 1, 1, 0, 1, 0];
        let a = FiniteAction::from_table(3, 2, table);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        assert!(a.verify_axioms(&g, &[1], 0, &mut rng).is_err());
    }

    #[test]
    fn projection_detects_non_constant_rules() {
        let a = FiniteAction::regular(&FiniteGroup::cyclic(4));
        let orbits = a.orbits();
        let points = [0usize, 1, 2, 3];
        assert!(quotient_projection(&points, &orbits, |_| 0u8).is_ok());
        assert_eq!(quotient_projection(&points, &orbits, |&p| p), Err(ActionError::NotOrbitConstant(0, 1)));
        let t = FiniteAction::trivial(1, 4);
        let proj = quotient_projection(&points, &t.orbits(), |&p| p).unwrap();
        assert_eq!(proj.keys, vec![0, 1, 2, 3]);
        assert!(matches!(quotient_projection(&points, &t.orbits(), |&p| p / 2), Err(ActionError::NotInjective(0, 1))));
    }

    #[test]
    fn identity_map_is_equivariant() {
        let g = FiniteGroup::cyclic(5);
        let a = FiniteAction::regular(&g);
        let map: Vec<usize> = (0..5).collect();
        assert_eq!(equivariance_counterexample(&a, &a, &map, &[0, 1, 2, 3, 4]), None);
        assert!(is_bijection(&map, 5));
    }

    #[test]
    fn theorem_at_q3() {
        let data = TheoremData::build(3).unwrap();
        let f = &*data.tower;
        assert_eq!(data.y_orbits.len(), 72);
        assert_eq!(data.yl_points.len(), 216);
        assert_eq!(data.a_plus_orbits.count(), 72);
        assert!(data.a_plus_free);
        assert_eq!(data.a_orbits.count(), 36);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        data.y_action.verify_axioms(&data.g2_group, &data.generators, 1000, &mut rng).unwrap();
        data.yl_action.verify_axioms(&data.g2_group, &data.generators, 1000, &mut rng).unwrap();
        for action in [&data.y_action, &data.yl_action, &data.yl_mod_a_plus_action] {
            assert!(action.burnside_holds());
        }
        let xi = data.xis()[0];
        let results = data.alpha_search(xi);
        let row_plus = &results[0];
        assert_eq!(row_plus.constraint_value, Some(f.from_int(-1)));
        assert!(!row_plus.verified());
        let verified: Vec<&AlphaResult> = results.iter().filter(|r| r.verified()).collect();
        assert_eq!(verified.len(), 1);
        let v = verified[0].variant;
        assert_eq!((v.pairing, v.signs, v.f_sign), (Pairing::Column, [-1, -1], 1));
        assert!(data.xi_independent());
        assert!(data.closed_form_y_action_agrees());
    }
}

//! Polynomial systems with q-power terms: a small text format, a solver
//! driven by triangular hints, solution-set comparison, and the check of
//! the expanded entries of `g^-1 phi(g)` and `g^-1 sigma(g)`.
//!
//! System files look like
//!
//! ```text
//! system name
//! var x n          # level: `n` (ambient) or an integer k for F_{q^k}
//! expr s = x^q - x # named subexpression, inlined where used
//! eq e1: s = 1
//! enum x           # hint: enumerate x over F_{q^n}
//! solve y using e1 # hint: e1 must be F_p-affine in y once earlier
//!                  # variables are bound
//! ```

mod expr;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::edl::{self, EdlError, PointMeta, PointSet};
use crate::fftower::{FieldElem, FieldError, FieldTower};
use crate::matgroup::{GroupError, Mat2, Sl2};
use crate::modlinalg;
use crate::par;
use crate::truncring::GaloisElem;

pub use expr::{parse_expr, Expr, ExprDisplay};

/// Default cap on equation evaluations for one solve.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SysError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("hint for `{system}` is insufficient: {reason}")]
    HintInsufficient { system: String, reason: String },
    #[error("budget of {budget} evaluations exceeded after {spent} (static estimate {estimate:.3e})")]
    BudgetExceeded { budget: u64, spent: u64, estimate: f64 },
    #[error("no declared map from `{from}` to `{to}` for variable `{var}`")]
    Incomparable { from: String, to: String, var: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Edl(#[from] EdlError),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Ambient,
    Sub(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub label: String,
    /// `lhs - rhs`.
    pub expr: Expr,
    pub source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HintStep {
    Enumerate(usize),
    Solve { var: usize, eq: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    pub name: String,
    pub vars: Vec<String>,
    pub levels: Vec<Level>,
    pub defs: Vec<(String, Expr)>,
    pub equations: Vec<Equation>,
    pub hints: Vec<HintStep>,
}

impl PolySystem {
    pub fn parse(text: &str) -> Result<PolySystem, SysError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let bad = |no: usize, msg: &str| SysError::Parse(format!("line {no}: {msg}"));

        let mut name = None;
        let mut vars = Vec::new();
        let mut levels = Vec::new();
        for &(no, line) in &lines {
            let mut words = line.split_whitespace();
            match words.next() {
                Some("system") => name = Some(words.collect::<Vec<_>>().join(" ")),
                Some("var") => {
                    let v = words.next().ok_or_else(|| bad(no, "missing variable name"))?;
                    if v == "q" || !v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                        return Err(bad(no, "invalid variable name"));
                    }
                    if vars.iter().any(|x| x == v) {
                        return Err(bad(no, "variable declared twice"));
                    }
                    let level = match words.next() {
                        None | Some("n") => Level::Ambient,
                        Some(k) => Level::Sub(k.parse().ok().filter(|&k: &u32| k > 0).ok_or_else(|| bad(no, "bad level"))?),
                    };
                    vars.push(v.to_string());
                    levels.push(level);
                }
                _ => {}
            }
        }
        let name = name.ok_or_else(|| SysError::Parse("missing `system` line".into()))?;

        let mut defs: Vec<(String, Expr)> = Vec::new();
        let mut def_map: HashMap<String, Expr> = HashMap::new();
        let mut equations: Vec<Equation> = Vec::new();
        let mut hints = Vec::new();
        let var_index = |v: &str, no: usize| vars.iter().position(|x| x == v).ok_or_else(|| bad(no, &format!("unknown variable `{v}`")));
        for &(no, line) in &lines {
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "system" | "var" => {}
                "expr" => {
                    let (lhs, rhs) = rest.split_once('=').ok_or_else(|| bad(no, "expected `expr name = ...`"))?;
                    let lhs = lhs.trim();
                    if vars.iter().any(|v| v == lhs) || def_map.contains_key(lhs) {
                        return Err(bad(no, "name already in use"));
                    }
                    let e = parse_expr(rhs, &vars, &def_map)?;
                    def_map.insert(lhs.to_string(), e.clone());
                    defs.push((lhs.to_string(), e));
                }
                "eq" => {
                    let (label, body) = rest.split_once(':').ok_or_else(|| bad(no, "expected `eq label: lhs = rhs`"))?;
                    let label = label.trim().to_string();
                    if equations.iter().any(|e| e.label == label) {
                        return Err(bad(no, "duplicate equation label"));
                    }
                    let (lhs, rhs) = body.split_once('=').ok_or_else(|| bad(no, "equation without `=`"))?;
                    let expr = Expr::Sub(Box::new(parse_expr(lhs, &vars, &def_map)?), Box::new(parse_expr(rhs, &vars, &def_map)?));
                    equations.push(Equation { label, expr, source: body.trim().to_string() });
                }
                "enum" => hints.push(HintStep::Enumerate(var_index(rest, no)?)),
                "solve" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 3 || parts[1] != "using" {
                        return Err(bad(no, "expected `solve var using label`"));
                    }
                    let var = var_index(parts[0], no)?;
                    let eq = equations
                        .iter()
                        .position(|e| e.label == parts[2])
                        .ok_or_else(|| bad(no, &format!("unknown equation `{}`", parts[2])))?;
                    hints.push(HintStep::Solve { var, eq });
                }
                other => return Err(bad(no, &format!("unknown directive `{other}`"))),
            }
        }
        Ok(PolySystem { name, vars, levels, defs, equations, hints })
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn def(&self, name: &str) -> Option<&Expr> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Labels of the equations failing at `point`.
    pub fn failing(&self, f: &FieldTower, point: &[FieldElem]) -> Vec<&str> {
        self.equations
            .iter()
            .filter(|e| e.expr.eval(f, point) != f.zero())
            .map(|e| e.label.as_str())
            .collect()
    }

    pub fn satisfied_by(&self, f: &FieldTower, point: &[FieldElem]) -> bool {
        self.equations.iter().all(|e| e.expr.eval(f, point) == f.zero())
    }

    fn plan(&self) -> Result<Plan, SysError> {
        let insufficient = |reason: String| SysError::HintInsufficient { system: self.name.clone(), reason };
        let mut bound_at = vec![usize::MAX; self.vars.len()];
        for (i, step) in self.hints.iter().enumerate() {
            let var = match *step {
                HintStep::Enumerate(v) => v,
                HintStep::Solve { var, eq } => {
                    let e = &self.equations[eq];
                    let mut vs = Vec::new();
                    e.expr.vars(&mut vs);
                    if let Some(&late) = vs.iter().find(|&&v| v != var && bound_at[v] == usize::MAX) {
                        return Err(insufficient(format!(
                            "`{}` is solved from {} before `{}` is bound",
                            self.vars[var], e.label, self.vars[late]
                        )));
                    }
                    match e.expr.degree_in(var) {
                        1 => {}
                        0 => return Err(insufficient(format!("{} does not involve `{}`", e.label, self.vars[var]))),
                        d => {
                            return Err(insufficient(format!(
                                "{} has degree {d} in `{}`, not affine",
                                e.label, self.vars[var]
                            )))
                        }
                    }
                    var
                }
            };
            if bound_at[var] != usize::MAX {
                return Err(insufficient(format!("`{}` is bound twice", self.vars[var])));
            }
            bound_at[var] = i;
        }
        if let Some(v) = bound_at.iter().position(|&b| b == usize::MAX) {
            return Err(insufficient(format!("`{}` is never bound", self.vars[v])));
        }
        let mut checks_after = vec![Vec::new(); self.hints.len()];
        let mut initial = Vec::new();
        for (k, e) in self.equations.iter().enumerate() {
            let mut vs = Vec::new();
            e.expr.vars(&mut vs);
            match vs.iter().map(|&v| bound_at[v]).max() {
                None => initial.push(k),
                Some(step) => checks_after[step].push(k),
            }
        }
        Ok(Plan { checks_after, initial })
    }

    /// Worst-case candidate count: the product of the enumerated domains.
    pub fn static_estimate(&self, field_size: u64) -> f64 {
        let enums = self.hints.iter().filter(|h| matches!(h, HintStep::Enumerate(_))).count();
        (field_size as f64).powi(enums as i32)
    }
}

struct Plan {
    checks_after: Vec<Vec<usize>>,
    initial: Vec<usize>,
}

/// Exact solution set of a system over `F_{q^n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solutions {
    pub system: String,
    pub vars: Vec<String>,
    pub set: PointSet<Vec<FieldElem>>,
    pub evaluations: u64,
}

impl Solutions {
    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn points(&self) -> &[Vec<FieldElem>] {
        &self.set.points
    }
}

struct Budget<'a> {
    spent: &'a AtomicU64,
    stop: &'a AtomicBool,
    local: u64,
    limit: u64,
}

impl Budget<'_> {
    const FLUSH: u64 = 1 << 14;

    fn charge(&mut self, k: u64) -> bool {
        self.local += k;
        if self.local >= Self::FLUSH {
            self.flush()
        } else {
            true
        }
    }

    fn flush(&mut self) -> bool {
        let total = self.spent.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.limit {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }
}

struct Solver<'a> {
    sys: &'a PolySystem,
    f: &'a FieldTower,
    plan: Plan,
    domain: Vec<FieldElem>,
    basis: Vec<FieldElem>,
}

impl Solver<'_> {
    fn passes(&self, checks: &[usize], env: &[FieldElem], budget: &mut Budget) -> bool {
        budget.charge(checks.len() as u64);
        checks.iter().all(|&k| self.sys.equations[k].expr.eval(self.f, env) == self.f.zero())
    }

    fn candidates(&self, step: usize, env: &mut [FieldElem], budget: &mut Budget) -> Vec<FieldElem> {
        match self.sys.hints[step] {
            HintStep::Enumerate(_) => self.domain.clone(),
            HintStep::Solve { var, eq } => {
                budget.charge(self.basis.len() as u64 + 1);
                let f = self.f;
                let e = &self.sys.equations[eq].expr;
                env[var] = f.zero();
                let c0 = e.eval(f, env);
                let width = f.degree() as usize;
                let mut rows = vec![vec![0u64; self.basis.len()]; width];
                for (j, &b) in self.basis.iter().enumerate() {
                    env[var] = b;
                    let col = f.coeffs(f.sub(e.eval(f, env), c0));
                    for (i, &c) in col.iter().enumerate() {
                        rows[i][j] = c as u64;
                    }
                }
                let p = f.p() as u64;
                let rhs: Vec<u64> = f.coeffs(f.neg(c0)).iter().map(|&c| c as u64).collect();
                let Some((particular, kernel)) = modlinalg::solve(&rows, &rhs, self.basis.len(), p) else {
                    return Vec::new();
                };
                let combine = |coeffs: &[u64]| {
                    coeffs.iter().zip(&self.basis).fold(f.zero(), |acc, (&c, &b)| f.add(acc, f.mul(f.from_int(c as i64), b)))
                };
                let base = combine(&particular);
                let kernel: Vec<FieldElem> = kernel.iter().map(|k| combine(k)).collect();
                let mut out = vec![base];
                for k in kernel {
                    let mut next = Vec::with_capacity(out.len() * p as usize);
                    for &x in &out {
                        let mut acc = x;
                        for _ in 0..p {
                            next.push(acc);
                            acc = f.add(acc, k);
                        }
                    }
                    out = next;
                }
                out
            }
        }
    }

    fn var_of(&self, step: usize) -> usize {
        match self.sys.hints[step] {
            HintStep::Enumerate(v) => v,
            HintStep::Solve { var, .. } => var,
        }
    }

    fn dfs(&self, step: usize, env: &mut Vec<FieldElem>, out: &mut Vec<Vec<FieldElem>>, budget: &mut Budget) -> bool {
        if step == self.sys.hints.len() {
            out.push(env.clone());
            return true;
        }
        let var = self.var_of(step);
        for value in self.candidates(step, env, budget) {
            env[var] = value;
            if self.passes(&self.plan.checks_after[step], env, budget) && !self.dfs(step + 1, env, out, budget) {
                return false;
            }
            if budget.stop.load(Ordering::Relaxed) {
                return false;
            }
        }
        true
    }
}

/// All solutions over `F_{q^n}`, following the system's hints. At most
/// `budget` equation evaluations are spent.
pub fn system_solutions(sys: &PolySystem, f: &FieldTower, n: u32, budget: u64) -> Result<Solutions, SysError> {
    let plan = sys.plan()?;
    let domain = f.level_elements(n)?;
    let basis = f.level_basis(n)?;
    let estimate = sys.static_estimate(domain.len() as u64);
    let solver = Solver { sys, f, plan, domain, basis };
    let spent = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let new_budget = || Budget { spent: &spent, stop: &stop, local: 0, limit: budget };

    let mut env = vec![f.zero(); sys.vars.len()];
    let mut root_budget = new_budget();
    let mut points = Vec::new();
    if solver.passes(&solver.plan.initial, &env, &mut root_budget) && !sys.hints.is_empty() {
        let first = solver.var_of(0);
        let roots: Vec<FieldElem> = solver
            .candidates(0, &mut env, &mut root_budget)
            .into_iter()
            .filter(|&v| {
                env[first] = v;
                solver.passes(&solver.plan.checks_after[0], &env, &mut root_budget)
            })
            .collect();
        let branches: Vec<Vec<Vec<FieldElem>>> = par::map(&roots, |&v| {
            let mut env = vec![f.zero(); sys.vars.len()];
            env[first] = v;
            let mut out = Vec::new();
            let mut b = new_budget();
            solver.dfs(1, &mut env, &mut out, &mut b);
            b.flush();
            out
        });
        points = branches.into_iter().flatten().collect();
    } else if solver.passes(&solver.plan.initial, &env, &mut root_budget) {
        points.push(env);
    }
    root_budget.flush();
    let total = spent.load(Ordering::Relaxed);
    if stop.load(Ordering::Relaxed) || total > budget {
        return Err(SysError::BudgetExceeded { budget, spent: total, estimate });
    }

    for p in &points {
        for (i, level) in sys.levels.iter().enumerate() {
            if let Level::Sub(k) = level {
                if f.frobenius_q_pow(p[i], *k) != p[i] {
                    return Err(SysError::Integrity(format!(
                        "`{}` of system `{}` leaves its declared level {k}",
                        sys.vars[i], sys.name
                    )));
                }
            }
        }
    }
    let meta = PointMeta {
        variety: sys.name.clone(),
        q: f.q(),
        n,
        r_prime: 3,
        method: "hinted-solve".into(),
        structurally_empty: false,
    };
    let set = PointSet::verified(points, meta, |p| sys.satisfied_by(f, p))?;
    Ok(Solutions { system: sys.name.clone(), vars: sys.vars.clone(), set, evaluations: total })
}

/// Expressions for the variables of a target system in terms of a source
/// system's variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    pub exprs: Vec<Expr>,
}

impl VarMap {
    /// Same-named variables; every target variable must exist in the source
    /// or be given by a rule `(target_var, expression in source vars)`.
    pub fn new(source: &PolySystem, target: &PolySystem, rules: &[(&str, &str)]) -> Result<VarMap, SysError> {
        let exprs = target
            .vars
            .iter()
            .map(|v| {
                if let Some((_, text)) = rules.iter().find(|(name, _)| name == v) {
                    parse_expr(text, &source.vars, &HashMap::new())
                } else if let Some(i) = source.var_index(v) {
                    Ok(Expr::Var(i))
                } else {
                    Err(SysError::Incomparable { from: source.name.clone(), to: target.name.clone(), var: v.clone() })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VarMap { exprs })
    }

    pub fn apply(&self, f: &FieldTower, point: &[FieldElem]) -> Vec<FieldElem> {
        self.exprs.iter().map(|e| e.eval(f, point)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    /// A source solution whose image is not a target solution.
    SourceOnly(Vec<FieldElem>),
    /// A target solution outside the image.
    TargetOnly(Vec<FieldElem>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub source: String,
    pub target: String,
    pub source_count: usize,
    pub target_count: usize,
    pub image_count: usize,
    /// Smallest and largest fibre of the map over its image.
    pub fiber: (usize, usize),
    pub verdict: Verdict,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }
}

/// Compares `map(source solutions)` with the target solutions as sets.
pub fn compare_solutions(f: &FieldTower, source: &Solutions, target: &Solutions, map: &VarMap) -> Comparison {
    let mut fibers: BTreeMap<Vec<FieldElem>, usize> = BTreeMap::new();
    let mut verdict = Verdict::Equal;
    let targets: HashSet<&Vec<FieldElem>> = target.points().iter().collect();
    for p in source.points() {
        let image = map.apply(f, p);
        if verdict == Verdict::Equal && !targets.contains(&image) {
            verdict = Verdict::SourceOnly(p.clone());
        }
        *fibers.entry(image).or_default() += 1;
    }
    if verdict == Verdict::Equal {
        if let Some(p) = target.points().iter().find(|p| !fibers.contains_key(*p)) {
            verdict = Verdict::TargetOnly(p.clone());
        }
    }
    let fiber = (fibers.values().copied().min().unwrap_or(0), fibers.values().copied().max().unwrap_or(0));
    Comparison {
        source: source.system.clone(),
        target: target.system.clone(),
        source_count: source.len(),
        target_count: target.len(),
        image_count: fibers.len(),
        fiber,
        verdict,
    }
}

/// Solves both systems and compares them through `rules` (see [`VarMap::new`]).
pub fn compare_systems(
    source: &PolySystem,
    target: &PolySystem,
    rules: &[(&str, &str)],
    f: &FieldTower,
    n: u32,
    budget: u64,
) -> Result<Comparison, SysError> {
    let map = VarMap::new(source, target, rules)?;
    let a = system_solutions(source, f, n, budget)?;
    let b = system_solutions(target, f, n, budget)?;
    Ok(compare_solutions(f, &a, &b, &map))
}

const BUILTIN: [(&str, &str); 9] = [
    ("xl-raw", include_str!("systems/xl_raw.sys")),
    ("xl-step1", include_str!("systems/xl_step1.sys")),
    ("xl-step2", include_str!("systems/xl_step2.sys")),
    ("xl-step3", include_str!("systems/xl_step3.sys")),
    ("xl-step4", include_str!("systems/xl_step4.sys")),
    ("xl-final", include_str!("systems/xl_final.sys")),
    ("xl-mod-u", include_str!("systems/xl_mod_u.sys")),
    ("xl-mod-u-reduced", include_str!("systems/xl_mod_u_reduced.sys")),
    ("yl", include_str!("systems/yl.sys")),
];

/// Names of the built-in systems, in rewrite order.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin_system(name: &str) -> Result<PolySystem, SysError> {
    let text = builtin_source(name).ok_or_else(|| SysError::UnknownName(name.to_string()))?;
    let sys = PolySystem::parse(text)?;
    if sys.name != name {
        return Err(SysError::Integrity(format!("built-in `{name}` declares itself `{}`", sys.name)));
    }
    Ok(sys)
}

/// Consecutive links of the rewrite chain, with the variable rules for
/// links that change coordinates. Links into a smaller variable set are
/// projections; `yl` maps onto the reduced quotient by forgetting `f1, f2`.
pub const CHAIN_LINKS: [(&str, &str); 8] = [
    ("xl-raw", "xl-step1"),
    ("xl-step1", "xl-step2"),
    ("xl-step2", "xl-step3"),
    ("xl-step3", "xl-step4"),
    ("xl-step4", "xl-final"),
    ("xl-final", "xl-mod-u"),
    ("xl-mod-u", "xl-mod-u-reduced"),
    ("yl", "xl-mod-u-reduced"),
];

/// Rules carrying a point of `xl-final` to each other built-in system.
pub fn rules_from_final(target: &str) -> &'static [(&'static str, &'static str)] {
    if target == "yl" {
        &[("f1", "a0*c2 - c0*a2"), ("f2", "a1*c2 - c1*a2")]
    } else {
        &[]
    }
}

/// Coordinates `(a_0..a_2, b_0..b_2, c_0..c_2, d_0..d_2)` of a matrix over
/// `F_{q^n}[pi]/pi^3`, the variable order of the twelve-variable systems.
pub fn matrix_coords(g: &Mat2) -> Vec<FieldElem> {
    g.entries().iter().flat_map(|x| (0..3).map(move |i| x.coeff(i))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub n: u32,
    pub counts: Vec<(String, usize)>,
    pub evaluations: u64,
    pub links: Vec<Comparison>,
    /// For each built-in system, whether every point of `xl-final` (carried
    /// over by [`rules_from_final`]) satisfies all of its equations.
    pub forward_inclusion: Vec<(String, bool)>,
    /// `xl-final` solutions against the column-solving enumeration of `X_L`.
    pub final_vs_column_solving: bool,
    /// `xl-raw` solutions against the same enumeration.
    pub raw_vs_column_solving: bool,
    /// `yl` solutions against the triangular `Y_L` parameterization.
    pub yl_vs_triangular: bool,
    /// `xl-final` solutions against `Y_L` lifted over the `U_2^1`-fibre.
    pub final_vs_lifted: bool,
    pub column_solving_count: usize,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.links.iter().all(Comparison::equal)
            && self.forward_inclusion.iter().all(|(_, ok)| *ok)
            && self.final_vs_column_solving
            && self.raw_vs_column_solving
            && self.yl_vs_triangular
            && self.final_vs_lifted
    }
}

/// Solves every built-in system at level `n`, compares consecutive links,
/// checks forward inclusion of the final set, and compares against the
/// independent enumerators of `X_L` and `Y_L`.
pub fn verify_chain(tower: &Arc<FieldTower>, n: u32, budget: u64) -> Result<ChainReport, SysError> {
    let f = &**tower;
    let mut systems = BTreeMap::new();
    let mut sols = BTreeMap::new();
    let mut counts = Vec::new();
    let mut evaluations = 0;
    for name in builtin_names() {
        let sys = builtin_system(name)?;
        let sol = system_solutions(&sys, f, n, budget)?;
        counts.push((name.to_string(), sol.len()));
        evaluations += sol.evaluations;
        systems.insert(name, sys);
        sols.insert(name, sol);
    }
    let mut links = Vec::new();
    for (a, b) in CHAIN_LINKS {
        let map = VarMap::new(&systems[a], &systems[b], &[])?;
        links.push(compare_solutions(f, &sols[a], &sols[b], &map));
    }
    let finals = &sols["xl-final"];
    let mut forward_inclusion = Vec::new();
    for name in builtin_names() {
        let map = VarMap::new(&systems["xl-final"], &systems[name], rules_from_final(name))?;
        let ok = finals.points().iter().all(|p| systems[name].satisfied_by(f, &map.apply(f, p)));
        forward_inclusion.push((name.to_string(), ok));
    }
    let column = edl::enumerate_xl(tower, n)?;
    let column_pts: Vec<Vec<FieldElem>> = sorted(column.points.iter().map(matrix_coords).collect());
    let lifted = edl::enumerate_xl_by_lifting(tower, n)?;
    let lifted_pts: Vec<Vec<FieldElem>> = sorted(lifted.points.iter().map(matrix_coords).collect());
    let yl = edl::enumerate_yl(tower, n)?;
    let yl_pts: Vec<Vec<FieldElem>> = sorted(
        yl.points
            .iter()
            .map(|p| {
                let mut v = p.coords().to_vec();
                v.push(p.f1(f));
                v.push(p.f2(f));
                v
            })
            .collect(),
    );
    Ok(ChainReport {
        n,
        counts,
        evaluations,
        links,
        forward_inclusion,
        final_vs_column_solving: finals.points() == column_pts.as_slice(),
        raw_vs_column_solving: sols["xl-raw"].points() == column_pts.as_slice(),
        yl_vs_triangular: sols["yl"].points() == yl_pts.as_slice(),
        final_vs_lifted: finals.points() == lifted_pts.as_slice(),
        column_solving_count: column_pts.len(),
    })
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Twist {
    Phi,
    Sigma,
}

impl Twist {
    pub fn galois(self) -> GaloisElem {
        match self {
            Twist::Phi => GaloisElem::PHI,
            Twist::Sigma => GaloisElem::SIGMA,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Twist::Phi => "phi",
            Twist::Sigma => "sigma",
        }
    }

    /// Prefix of the entry definitions in `xl-raw`.
    fn prefix(self) -> char {
        match self {
            Twist::Phi => 'a',
            Twist::Sigma => 'b',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryMismatch {
    pub element: String,
    pub entry: String,
    pub formula: String,
    pub direct: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryCheck {
    pub twist: Twist,
    pub n: u32,
    pub exhaustive: bool,
    /// `(name, formula)` for the twelve coefficient expressions.
    pub entries: Vec<(String, String)>,
    pub checked: u64,
    pub mismatches: u64,
    pub examples: Vec<EntryMismatch>,
}

impl EntryCheck {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.checked > 0
    }
}

/// The twelve coefficient formulas of `g^-1 twist(g)`, read from `xl-raw`,
/// checked against direct matrix computation in `SL_2(F_{q^n}[pi]/pi^3)`.
pub fn expand_twisted_entries(
    twist: Twist,
    tower: &Arc<FieldTower>,
    n: u32,
    sampling: Sampling,
) -> Result<EntryCheck, SysError> {
    let sys = builtin_system("xl-raw")?;
    let mut formulas = Vec::with_capacity(12);
    for ij in ["11", "12", "21", "22"] {
        for k in 0..3 {
            let name = format!("{}{ij}_{k}", twist.prefix());
            let e = sys.def(&name).ok_or_else(|| SysError::UnknownName(name.clone()))?.clone();
            formulas.push((name, e));
        }
    }
    let group = Sl2::new(edl::xl_ring(tower, n)?);
    let elements: Vec<Mat2> = match sampling {
        Sampling::Exhaustive => group.elements(1 << 24)?,
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| group.random(&mut rng)).collect()
        }
    };
    let f = &**tower;
    let found: Vec<Vec<EntryMismatch>> = par::map(&elements, |g| {
        let direct = group.twisted_quotient(twist.galois(), g);
        let values: Vec<FieldElem> = direct.entries().iter().flat_map(|x| (0..3).map(move |i| x.coeff(i))).collect();
        let env = matrix_coords(g);
        formulas
            .iter()
            .zip(&values)
            .filter(|((_, e), &v)| e.eval(f, &env) != v)
            .map(|((name, e), &v)| EntryMismatch {
                element: group.serialize(g),
                entry: name.clone(),
                formula: f.serialize(e.eval(f, &env)),
                direct: f.serialize(v),
            })
            .collect()
    });
    let mismatches: Vec<EntryMismatch> = found.into_iter().flatten().collect();
    Ok(EntryCheck {
        twist,
        n,
        exhaustive: sampling == Sampling::Exhaustive,
        entries: formulas.iter().map(|(name, e)| (name.clone(), e.display(&sys.vars).to_string())).collect(),
        checked: elements.len() as u64,
        mismatches: mismatches.len() as u64,
        examples: mismatches.into_iter().take(5).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fftower::make_tower;

    fn tower() -> Arc<FieldTower> {
        Arc::new(make_tower(3, 1, &[1, 3]).unwrap())
    }

    #[test]
    fn artin_schreier_kernel_has_q_points() {
        let t = tower();
        let sys = PolySystem::parse("system fixed\nvar x\neq e: x^q = x\nsolve x using e\n").unwrap();
        for n in [1, 3] {
            let sol = system_solutions(&sys, &t, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(sol.len(), 3);
        }
        let enumerated = PolySystem::parse("system fixed\nvar x\neq e: x^q = x\nenum x\n").unwrap();
        assert_eq!(system_solutions(&enumerated, &t, 3, DEFAULT_BUDGET).unwrap().len(), 3);
    }

    #[test]
    fn inconsistent_system_is_empty() {
        let t = tower();
        let sys = PolySystem::parse("system bad\nvar x\neq e: 0 = 1\nenum x\n").unwrap();
        assert!(system_solutions(&sys, &t, 3, DEFAULT_BUDGET).unwrap().is_empty());
    }

    #[test]
    fn hint_validation() {
        let t = tower();
        let unbound = PolySystem::parse("system s\nvar x\nvar y\neq e: x = y\nenum x\n").unwrap();
        assert!(matches!(system_solutions(&unbound, &t, 1, 100), Err(SysError::HintInsufficient { .. })));
        let nonlinear = PolySystem::parse("system s\nvar x\neq e: x*x = 1\nsolve x using e\n").unwrap();
        assert!(matches!(system_solutions(&nonlinear, &t, 1, 100), Err(SysError::HintInsufficient { .. })));
        let early = PolySystem::parse("system s\nvar x\nvar y\neq e: x = y\nsolve x using e\nenum y\n").unwrap();
        assert!(matches!(system_solutions(&early, &t, 1, 100), Err(SysError::HintInsufficient { .. })));
        let costly = PolySystem::parse("system s\nvar x\nvar y\nvar z\neq e: x*y*z = 1\nenum x\nenum y\nenum z\n").unwrap();
        assert!(matches!(system_solutions(&costly, &t, 3, 1000), Err(SysError::BudgetExceeded { .. })));
    }

    #[test]
    fn parse_errors() {
        assert!(PolySystem::parse("var x\n").is_err());
        assert!(PolySystem::parse("system s\nvar x\neq e x = 1\n").is_err());
        assert!(PolySystem::parse("system s\nvar x\nfoo\n").is_err());
        assert!(PolySystem::parse("system s\nvar q\n").is_err());
        assert!(PolySystem::parse("system s\nvar x\nvar x\n").is_err());
    }

    #[test]
    fn self_comparison_is_equal() {
        let t = tower();
        let sys = builtin_system("xl-mod-u-reduced").unwrap();
        let c = compare_systems(&sys, &sys, &[], &t, 3, DEFAULT_BUDGET).unwrap();
        assert!(c.equal());
        assert_eq!(c.fiber, (1, 1));
        assert_eq!(c.source_count, 216);
    }

    #[test]
    fn incomparable_spaces_are_rejected() {
        let a = builtin_system("xl-mod-u-reduced").unwrap();
        let b = builtin_system("xl-mod-u").unwrap();
        assert!(matches!(VarMap::new(&a, &b, &[]), Err(SysError::Incomparable { .. })));
        assert!(VarMap::new(&a, &b, &[("b0", "a2^q - a2"), ("d0", "c2^q - c2")]).is_ok());
    }

    #[test]
    fn all_builtins_parse_and_plan() {
        for name in builtin_names() {
            let sys = builtin_system(name).unwrap();
            sys.plan().unwrap();
        }
    }

    #[test]
    fn entries_at_identity() {
        let t = tower();
        let sys = builtin_system("xl-raw").unwrap();
        let g = Sl2::new(edl::xl_ring(&t, 1).unwrap());
        let env = matrix_coords(&g.identity());
        for (name, expect) in [("a11", [1, 0, 0]), ("a12", [0, 0, 0]), ("a21", [0, 0, 0]), ("a22", [1, 0, 0])] {
            for (k, &e) in expect.iter().enumerate() {
                assert_eq!(sys.def(&format!("{name}_{k}")).unwrap().eval(&t, &env), t.from_int(e));
            }
        }
    }

    #[test]
    fn entry_formulas_exhaustive_at_level_one() {
        let t = tower();
        for twist in [Twist::Phi, Twist::Sigma] {
            let r = expand_twisted_entries(twist, &t, 1, Sampling::Exhaustive).unwrap();
            assert_eq!(r.checked, 17496);
            assert!(r.passed(), "{:?}", r.examples);
        }
    }

    #[test]
    fn entry_formulas_random_at_level_three() {
        let t = tower();
        for twist in [Twist::Phi, Twist::Sigma] {
            let r = expand_twisted_entries(twist, &t, 3, Sampling::Random { count: 2000, seed: 7 }).unwrap();
            assert!(r.passed(), "{:?}", r.examples);
        }
    }

    #[test]
    fn a_corrupted_formula_is_caught() {
        let t = tower();
        let text = builtin_source("xl-raw").unwrap().replace(
            "expr b12_1 = 2*(d1*b0 - d0*b1)",
            "expr b12_1 = 2*(d1*b0 + d0*b1)",
        );
        let sys = PolySystem::parse(&text).unwrap();
        let g = Sl2::new(edl::xl_ring(&t, 1).unwrap());
        let e = sys.def("b12_1").unwrap();
        let bad = g.elements(1 << 20).unwrap().iter().any(|m| {
            let direct = g.twisted_quotient(GaloisElem::SIGMA, m);
            e.eval(&t, &matrix_coords(m)) != direct.b.coeff(1)
        });
        assert!(bad);
    }

    #[test]
    fn b1_d1_deduction_step() {
        let t = tower();
        let a = builtin_system("xl-step4").unwrap();
        let b = builtin_system("xl-final").unwrap();
        let c = compare_systems(&a, &b, &[], &t, 3, DEFAULT_BUDGET).unwrap();
        assert!(c.equal(), "{c:?}");
        assert_eq!(c.source_count, 5832);
    }
}

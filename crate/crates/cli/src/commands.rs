//! One function per subcommand. Each fills a [`Report`] with checks, data
//! and a CSV summary table; nothing here prints.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use edlforge::actions::{quotient_projection, FiniteAction, TheoremData};
use edlforge::chartab::{dixon_char_table, CharTable, ConjClasses};
use edlforge::edl::{self, PointMeta, YOrbit};
use edlforge::fftower::{make_tower, FieldElem, FieldTower};
use edlforge::matgroup::{fixed_point_cell, lang_search, subgroup_points, FiniteGroup, LangOutcome, Sl2, SubgroupKind};
use edlforge::par;
use edlforge::syscheck::{self, Sampling, Twist, Verdict};
use edlforge::truncring::{GaloisElem, RingDesc};

use crate::config::RunConfig;
use crate::report::{Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Fixed-point grid of SL_2 over the ramified ring against the embedded base group.
    Lemma1,
    /// Enumerate one variety (`--variety`): X_L, X_L-lift, Y_L, Y, Y-mod-SS.
    Enumerate,
    /// Entry formulas, the rewrite chain and the U2_1 quotient of X_L.
    VerifyQuotient,
    /// The G_2-equivariant bijection between Y/(S,S) and Y_L/A_plus.
    VerifyTheorem,
    /// Character table of G_2.
    Chartable,
    /// Decompose a permutation character (`--variety`): Y-mod-SS, Y_L-mod-A_plus, Y_L-mod-A, regular.
    Decompose,
    /// Solvability of g^-1 phi(g) = y over small extensions.
    LangTest,
    /// Surjectivity of the reduction maps between truncation levels.
    ReductionTest,
    /// Which irreducibles of G_2 occur in the computed quotients.
    ExploreConstruction,
    /// Everything above, in one report.
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Lemma1,
        Command::Enumerate,
        Command::VerifyQuotient,
        Command::VerifyTheorem,
        Command::Chartable,
        Command::Decompose,
        Command::LangTest,
        Command::ReductionTest,
        Command::ExploreConstruction,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Lemma1 => "lemma1",
            Command::Enumerate => "enumerate",
            Command::VerifyQuotient => "verify-quotient",
            Command::VerifyTheorem => "verify-theorem",
            Command::Chartable => "chartable",
            Command::Decompose => "decompose",
            Command::LangTest => "lang-test",
            Command::ReductionTest => "reduction-test",
            Command::ExploreConstruction => "explore-construction",
            Command::Report => "report",
        }
    }
}

/// Validates the configuration and runs one command on `cfg.workers`
/// threads (0 picks the default).
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    par::with_threads(cfg.workers, || {
        let ctx = Ctx { cfg, theorem: OnceCell::new() };
        ctx.run(command)
    })
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    theorem: OnceCell<TheoremData>,
}

struct Clock {
    on: bool,
    laps: BTreeMap<String, f64>,
}

impl Clock {
    fn lap<R>(&mut self, name: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        if self.on {
            let secs = (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0;
            self.laps.insert(name.to_string(), secs);
        }
        out
    }
}

impl Ctx<'_> {
    fn run(&self, command: Command) -> Result<Report> {
        let mut rep = Report::new(command.name(), self.cfg);
        let mut clock = Clock { on: self.cfg.timings, laps: BTreeMap::new() };
        match command {
            Command::Lemma1 => self.lemma1(&mut rep, &mut clock)?,
            Command::Enumerate => self.enumerate(&mut rep, &mut clock)?,
            Command::VerifyQuotient => self.verify_quotient(&mut rep, &mut clock)?,
            Command::VerifyTheorem => self.verify_theorem(&mut rep, &mut clock)?,
            Command::Chartable => self.chartable(&mut rep, &mut clock)?,
            Command::Decompose => self.decompose(&mut rep, &mut clock)?,
            Command::LangTest => self.lang_test(&mut rep, &mut clock)?,
            Command::ReductionTest => self.reduction_test(&mut rep, &mut clock)?,
            Command::ExploreConstruction => self.explore(&mut rep, &mut clock)?,
            Command::Report => self.report(&mut rep, &mut clock)?,
        }
        if clock.on {
            rep.timings = Some(clock.laps);
        }
        Ok(rep)
    }

    fn tower(&self, levels: &[u32]) -> Result<Arc<FieldTower>> {
        let (p, k) = self.cfg.prime_power()?;
        let levels: BTreeSet<u32> = levels.iter().copied().collect();
        let levels: Vec<u32> = levels.into_iter().collect();
        Ok(Arc::new(make_tower(p, k, &levels)?))
    }

    fn cap(&self) -> u128 {
        self.cfg.point_cap as u128
    }

    fn prime(&self, command: &str) -> Result<u32> {
        let (p, k) = self.cfg.prime_power()?;
        if k != 1 {
            bail!("{command} is implemented for prime q only (got q = {})", self.cfg.q);
        }
        Ok(p)
    }

    fn theorem(&self, clock: &mut Clock) -> Result<&TheoremData> {
        if self.theorem.get().is_none() {
            let p = self.prime("the quotient construction")?;
            let group_order = (self.cfg.q as u128).pow(3) * (self.cfg.q as u128).pow(3).saturating_sub(self.cfg.q as u128);
            if group_order > self.cfg.group_cap as u128 {
                bail!("G_2 has order {group_order}, above group_cap = {}", self.cfg.group_cap);
            }
            let data = clock.lap("theorem-data", || TheoremData::build(p))?;
            let _ = self.theorem.set(data);
        }
        Ok(self.theorem.get().expect("set above"))
    }

    fn char_table(&self, group: &FiniteGroup, clock: &mut Clock) -> Result<CharTable> {
        let cap = self.cfg.group_cap as usize;
        let classes = clock.lap("classes", || ConjClasses::new(group, cap))?;
        Ok(clock.lap("dixon", || dixon_char_table(group, &classes))?)
    }

    fn lemma1(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let levels: Vec<u32> = (1..=cfg.n_max).collect();
        let t = self.tower(&levels)?;
        let zeta = if cfg.e > 2 { Some(root_of_unity(&t, cfg.e)?) } else { None };
        let mut table = Table::new(&["r", "r_prime", "n", "fixed_order", "base_order", "image_order", "equal", "predicted"]);
        let mut cells = Vec::new();
        let mut mismatches = Vec::new();
        clock.lap("grid", || -> Result<()> {
            for r in 1..=cfg.r_max {
                for rp in 1..=cfg.rprime_max {
                    for n in 1..=cfg.n_max {
                        let ring = match zeta {
                            Some(z) => RingDesc::tame(t.clone(), n, cfg.e, rp, z)?,
                            None => RingDesc::new(t.clone(), n, cfg.e, rp)?,
                        };
                        let c = fixed_point_cell(&ring, r, self.cap())?;
                        table.push([
                            c.r.to_string(),
                            c.r_prime.to_string(),
                            c.n.to_string(),
                            c.fixed_order.to_string(),
                            c.base_order.to_string(),
                            c.image_order.to_string(),
                            c.equal.to_string(),
                            c.predicted.to_string(),
                        ]);
                        if c.equal != c.predicted {
                            mismatches.push(format!("(r={r}, r'={rp}, n={n}): equal={} predicted={}", c.equal, c.predicted));
                        }
                        cells.push(c);
                    }
                }
            }
            Ok(())
        })?;
        rep.check(
            "pass-matrix-equals-predicate",
            mismatches.is_empty(),
            if mismatches.is_empty() {
                format!("{} cells agree with (r-1)e < r' <= re", cells.len())
            } else {
                mismatches.join("; ")
            },
        );

        let mut smallest = Vec::new();
        let mut wrong = Vec::new();
        for r in 1..=cfg.r_max {
            for n in 1..=cfg.n_max {
                let found = cells.iter().filter(|c| c.r == r && c.n == n && c.equal).map(|c| c.r_prime).min();
                let expected = (r - 1) * cfg.e as usize + 1;
                let expected = (expected <= cfg.rprime_max).then_some(expected);
                if found != expected {
                    wrong.push(format!("r={r}, n={n}: found {found:?}, expected {expected:?}"));
                }
                smallest.push(json!({ "r": r, "n": n, "smallest_r_prime": found }));
            }
        }
        let detail = if wrong.is_empty() {
            (1..=cfg.r_max)
                .map(|r| {
                    let v = (r - 1) * cfg.e as usize + 1;
                    format!("r={r}: r'={v}")
                })
                .collect::<Vec<_>>()
                .join(", ")
        } else {
            wrong.join("; ")
        };
        rep.check("smallest-level", wrong.is_empty(), detail);

        let cell_json: Vec<Value> = cells
            .iter()
            .map(|c| {
                json!({
                    "r": c.r, "r_prime": c.r_prime, "n": c.n,
                    "fixed_order": c.fixed_order, "base_order": c.base_order, "image_order": c.image_order,
                    "equal": c.equal, "predicted": c.predicted,
                })
            })
            .collect();
        rep.put("cells", cell_json);
        rep.put("smallest", smallest);
        rep.table = table;
        Ok(())
    }

    fn enumerate(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let n = cfg.n;
        let t = self.tower(&[1, n])?;
        let f = &*t;
        let (lines, meta): (Vec<String>, PointMeta) = match cfg.variety.as_str() {
            "X_L" | "X_L-lift" => {
                let columns = clock.lap("column-solving", || edl::enumerate_xl(&t, n))?;
                let lifted = clock.lap("lifting", || edl::enumerate_xl_by_lifting(&t, n))?;
                let same = columns.points == lifted.points;
                rep.check(
                    "column-solving-equals-lifting",
                    same,
                    format!("{} vs {} points", columns.len(), lifted.len()),
                );
                let set = if cfg.variety == "X_L" { columns } else { lifted };
                let g = Sl2::new(edl::xl_ring(&t, n)?);
                (set.points.iter().map(|m| g.serialize(m)).collect(), set.meta)
            }
            "Y_L" => {
                let yl = clock.lap("triangular", || edl::enumerate_yl(&t, n))?;
                let xl = clock.lap("column-solving", || edl::enumerate_xl(&t, n))?;
                let fibre = cfg.q.pow(n) as usize;
                rep.check(
                    "fibre-count",
                    xl.len() == yl.len() * fibre,
                    format!("|X_L| = {}, |Y_L| = {}, fibre q^n = {fibre}", xl.len(), yl.len()),
                );
                (yl.points.iter().map(|p| coords(f, &p.coords())).collect(), yl.meta)
            }
            "Y" => {
                let raw = clock.lap("parameterization", || edl::enumerate_y_raw(&t, n))?;
                let spec = edl::y_spec(&t, n)?;
                let order = spec.group().predicted_order();
                if order <= self.cap() {
                    let naive = clock.lap("naive", || edl::enumerate_naive(&spec, self.cap()))?;
                    rep.check(
                        "parameterization-equals-naive",
                        naive.points == raw.points,
                        format!("{} vs {} points", raw.len(), naive.len()),
                    );
                } else {
                    rep.put("naive_oracle", format!("skipped: group order {order} exceeds point_cap"));
                }
                let g = spec.group();
                (raw.points.iter().map(|m| g.serialize(m)).collect(), raw.meta)
            }
            "Y-mod-SS" => {
                let orbits = clock.lap("parameterization", || edl::enumerate_y_orbits(&t))?;
                let raw = clock.lap("raw", || edl::enumerate_y_raw(&t, 1))?;
                let image: BTreeSet<YOrbit> = raw.points.iter().map(|g| YOrbit::of(f, g)).collect();
                let listed: BTreeSet<YOrbit> = orbits.points.iter().copied().collect();
                rep.check(
                    "orbits-of-raw-points",
                    image == listed,
                    format!("{} raw points give {} orbits; parameterization lists {}", raw.len(), image.len(), listed.len()),
                );
                (orbits.points.iter().map(|o| coords(f, &o.coords())).collect(), orbits.meta)
            }
            other => bail!("unknown variety `{other}` (expected X_L, X_L-lift, Y_L, Y or Y-mod-SS)"),
        };
        let mut table = Table::new(&["index", "point"]);
        for (i, line) in lines.iter().enumerate() {
            table.push([i.to_string(), line.clone()]);
        }
        rep.put("variety", &meta.variety);
        rep.put("q", meta.q);
        rep.put("n", meta.n);
        rep.put("r_prime", meta.r_prime);
        rep.put("method", &meta.method);
        rep.put("structurally_empty", meta.structurally_empty);
        rep.put("count", lines.len());
        rep.put("sha256", digest(&lines));
        rep.table = table;
        Ok(())
    }

    fn verify_quotient(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let n = cfg.n;
        let t = self.tower(&[1, n])?;
        let mut table = Table::new(&["section", "item", "value"]);

        // Entry formulas of the twisted quotients.
        let mut entries = Vec::new();
        for twist in [Twist::Phi, Twist::Sigma] {
            let runs = [
                (1, Sampling::Exhaustive, format!("{}-exhaustive-n1", twist.name())),
                (n, Sampling::Random { count: cfg.samples, seed: cfg.seed }, format!("{}-random-n{n}", twist.name())),
            ];
            for (level, sampling, label) in runs {
                let check = clock.lap(&format!("entries-{label}"), || syscheck::expand_twisted_entries(twist, &t, level, sampling))?;
                let examples: Vec<Value> = check
                    .examples
                    .iter()
                    .map(|m| json!({ "element": m.element, "entry": m.entry, "formula": m.formula, "direct": m.direct }))
                    .collect();
                rep.check(
                    &format!("entries-{label}"),
                    check.passed(),
                    format!("{} elements checked, {} mismatches", check.checked, check.mismatches),
                );
                table.push(["entries".to_string(), label.clone(), format!("{}/{}", check.mismatches, check.checked)]);
                entries.push(json!({
                    "twist": twist.name(), "n": level, "exhaustive": check.exhaustive,
                    "checked": check.checked, "mismatches": check.mismatches, "examples": examples,
                }));
            }
        }
        rep.put("entries", entries);

        // The rewrite chain, solved system by system.
        let chain = clock.lap("chain", || syscheck::verify_chain(&t, n, cfg.budget))?;
        let links: Vec<Value> = chain
            .links
            .iter()
            .map(|c| {
                json!({
                    "source": c.source, "target": c.target,
                    "source_count": c.source_count, "target_count": c.target_count, "image_count": c.image_count,
                    "fiber": [c.fiber.0, c.fiber.1], "verdict": verdict_text(&t, &c.verdict),
                })
            })
            .collect();
        let broken: Vec<String> = chain
            .links
            .iter()
            .filter(|c| !c.equal())
            .map(|c| format!("{} -> {}: {}", c.source, c.target, verdict_text(&t, &c.verdict)))
            .collect();
        rep.check("chain-links-equal", broken.is_empty(), if broken.is_empty() { format!("{} links", links.len()) } else { broken.join("; ") });
        let outside: Vec<&str> = chain.forward_inclusion.iter().filter(|(_, ok)| !ok).map(|(s, _)| s.as_str()).collect();
        rep.check(
            "forward-inclusion",
            outside.is_empty(),
            if outside.is_empty() { "final solutions satisfy every system".to_string() } else { format!("fails for {}", outside.join(", ")) },
        );
        rep.check("final-equals-column-solving", chain.final_vs_column_solving, format!("|X_L| = {}", chain.column_solving_count));
        rep.check("raw-equals-column-solving", chain.raw_vs_column_solving, "");
        rep.check("yl-system-equals-triangular", chain.yl_vs_triangular, "");
        rep.check("final-equals-lifted-Y_L", chain.final_vs_lifted, "");
        for (name, count) in &chain.counts {
            table.push(["count".to_string(), name.clone(), count.to_string()]);
        }
        rep.put("chain", json!({ "counts": chain.counts.iter().cloned().collect::<BTreeMap<_, _>>(), "links": links, "evaluations": chain.evaluations }));

        // U_2^1 acting on X_L, and the projection to Y_L.
        let xl = clock.lap("X_L", || edl::enumerate_xl(&t, n))?;
        let group = Sl2::new(edl::xl_ring(&t, n)?);
        let u21 = subgroup_points(SubgroupKind::U21, &group, self.cap())?;
        let action = clock.lap("U2_1-action", || FiniteAction::build(&u21, &xl.points, |u, g| group.mul(g, u)))?;
        let orbits = action.orbits();
        rep.check("U2_1-acts-freely", action.is_free(), format!("|U2_1| = {}, {} points, {} orbits", u21.len(), xl.len(), orbits.count()));
        rep.check("burnside-U2_1", action.burnside_holds(), "");
        let yl = clock.lap("Y_L", || edl::enumerate_yl(&t, n))?;
        match quotient_projection(&xl.points, &orbits, edl::project_xl) {
            Ok(proj) => rep.check(
                "projection-bijects-with-Y_L",
                proj.sorted_image() == yl.points,
                format!("{} orbits, |Y_L| = {}", orbits.count(), yl.len()),
            ),
            Err(e) => rep.check("projection-bijects-with-Y_L", false, e.to_string()),
        }
        table.push(["quotient".to_string(), "X_L".to_string(), xl.len().to_string()]);
        table.push(["quotient".to_string(), "orbits".to_string(), orbits.count().to_string()]);
        table.push(["quotient".to_string(), "Y_L".to_string(), yl.len().to_string()]);
        rep.put("quotient", json!({ "X_L": xl.len(), "U2_1": u21.len(), "orbits": orbits.count(), "Y_L": yl.len() }));
        rep.table = table;
        Ok(())
    }

    fn verify_theorem(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let td = self.theorem(clock)?;
        let f = &*td.tower;
        let y_count = td.y_orbits.len();
        let a_plus = td.yl_mod_a_plus.keys.len();
        let a_full = td.a_orbits.count();
        rep.check("quotient-cardinalities-agree", y_count == a_plus, format!("|Y/(S,S)| = {y_count}, |Y_L/A_plus| = {a_plus}"));
        rep.check("A_plus-acts-freely", td.a_plus_free, "");

        let mut table = Table::new(&["xi", "id", "formula", "lands", "bijective", "equivariant_generators", "equivariant_all", "verified"]);
        let mut per_xi = Vec::new();
        let mut verdicts = Vec::new();
        for xi in td.xis() {
            let results = clock.lap(&format!("alpha-{}", f.serialize(xi)), || td.alpha_search(xi));
            let mut variants = Vec::new();
            for r in &results {
                let counterexample = r.counterexample.map(|(g, s)| {
                    json!({ "group_element": td.g2.serialize(&td.g2_elements[g]), "point": coords(f, &td.y_orbits[s].coords()) })
                });
                variants.push(json!({
                    "id": r.variant.id,
                    "formula": r.variant.describe(),
                    "constraint_value": r.constraint_value.map(|v| f.serialize(v)),
                    "lands_in_codomain": r.lands_in_codomain,
                    "bijective": r.bijective,
                    "equivariant_on_generators": r.equivariant_on_generators,
                    "equivariant_everywhere": r.equivariant_everywhere,
                    "verified": r.verified(),
                    "counterexample": counterexample,
                }));
                table.push([
                    f.serialize(xi),
                    r.variant.id.to_string(),
                    r.variant.describe(),
                    r.lands_in_codomain.to_string(),
                    r.bijective.to_string(),
                    r.equivariant_on_generators.to_string(),
                    r.equivariant_everywhere.to_string(),
                    r.verified().to_string(),
                ]);
            }
            let verified: Vec<usize> = results.iter().filter(|r| r.verified()).map(|r| r.variant.id).collect();
            verdicts.push(results.iter().map(|r| r.verified()).collect::<Vec<bool>>());
            per_xi.push(json!({ "xi": f.serialize(xi), "verified": verified, "variants": variants }));
        }
        let every_xi = per_xi.iter().all(|v| v["verified"].as_array().is_some_and(|a| !a.is_empty()));
        let listed: Vec<String> = per_xi.iter().map(|v| format!("xi={}: {}", v["xi"].as_str().unwrap_or(""), v["verified"])).collect();
        rep.check("some-variant-is-an-equivariant-bijection", every_xi && !per_xi.is_empty(), listed.join("; "));
        rep.check("verdicts-independent-of-xi", verdicts.windows(2).all(|w| w[0] == w[1]), format!("{} roots", verdicts.len()));
        rep.check("closed-form-Y-action-agrees", td.closed_form_y_action_agrees(), "");

        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        for (name, action) in [("Y/(S,S)", &td.y_action), ("Y_L", &td.yl_action), ("Y_L/A_plus", &td.yl_mod_a_plus_action)] {
            let axioms = action.verify_axioms(&td.g2_group, &td.generators, self.cfg.samples, &mut rng);
            rep.check(&format!("axioms-{name}"), axioms.is_ok(), axioms.err().map(|e| e.to_string()).unwrap_or_default());
            rep.check(&format!("burnside-{name}"), action.burnside_holds(), format!("{} orbits", action.orbits().count()));
        }
        rep.check(
            "full-A-quotient-is-half",
            2 * a_full == a_plus,
            format!("|Y_L/A| = {a_full} against |Y_L/A_plus| = {a_plus}: -I identifies A_plus-orbits in pairs"),
        );
        rep.put(
            "counts",
            json!({
                "G_2": td.g2_group.order(), "Y/(S,S)": y_count, "Y_L": td.yl_points.len(),
                "Y_L/A_plus": a_plus, "Y_L/A": a_full,
            }),
        );
        rep.put("xis", per_xi);
        rep.table = table;
        Ok(())
    }

    fn chartable(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let t = self.tower(&[1])?;
        let g2 = edl::g2(&t)?;
        let order = g2.predicted_order();
        if order > cfg.group_cap as u128 {
            bail!("G_2 has order {order}, above group_cap = {}", cfg.group_cap);
        }
        let elems = clock.lap("elements", || g2.elements(order))?;
        let group = clock.lap("multiplication-table", || FiniteGroup::from_elements(&elems, |x, y| g2.mul(x, y)))?;
        let table = self.char_table(&group, clock)?;
        let o = table.orthogonality();
        rep.check("row-orthogonality", o.rows, "");
        rep.check("column-orthogonality", o.columns, "");
        let sum_sq: u64 = table.degrees.iter().map(|d| d * d).sum();
        rep.check("sum-of-squared-degrees", o.sum_of_squares, format!("{sum_sq} = {}", group.order()));
        rep.check("degrees-divide-order", o.degrees_divide_order, "");
        rep.check("square-table", table.count() == table.classes.count(), format!("{} irreducibles, {} classes", table.count(), table.classes.count()));

        let classes = &table.classes;
        let class_json: Vec<Value> = (0..classes.count())
            .map(|k| {
                json!({
                    "size": classes.size(k),
                    "element_order": classes.element_order(k),
                    "representative": g2.serialize(&elems[classes.representative(k)]),
                })
            })
            .collect();
        let mut header = vec!["irreducible".to_string(), "degree".to_string()];
        header.extend((0..classes.count()).map(|k| format!("class_{k}")));
        let mut csv = Table { header, rows: Vec::new() };
        for (i, row) in table.chars.iter().enumerate() {
            let mut cells = vec![i.to_string(), table.degrees[i].to_string()];
            cells.extend(row.iter().map(|v| v.serialize()));
            csv.rows.push(cells);
        }
        rep.put("group_order", group.order());
        rep.put("exponent", classes.exponent());
        rep.put("aux_prime", table.ell);
        rep.put("classes", class_json);
        rep.put("degrees", &table.degrees);
        rep.put("degree_histogram", histogram(&table.degrees));
        rep.put("characters", table.chars.iter().map(|r| r.iter().map(|v| v.serialize()).collect::<Vec<_>>()).collect::<Vec<_>>());
        rep.table = csv;
        Ok(())
    }

    fn decompose(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let variety = self.cfg.variety.clone();
        let td = self.theorem(clock)?;
        let action = match variety.as_str() {
            "Y-mod-SS" => td.y_action.clone(),
            "Y_L-mod-A_plus" => td.yl_mod_a_plus_action.clone(),
            "Y_L-mod-A" => td.yl_action.induced(&td.a_orbits)?,
            "regular" => FiniteAction::regular(&td.g2_group),
            other => bail!("unknown variety `{other}` (expected Y-mod-SS, Y_L-mod-A_plus, Y_L-mod-A or regular)"),
        };
        let table = self.char_table(&td.g2_group, clock)?;
        rep.check("burnside", action.burnside_holds(), format!("{} points, {} orbits", action.degree(), action.orbits().count()));
        let mults = decompose_action(&table, &action)?;
        rep.check(
            "trivial-multiplicity-is-orbit-count",
            mults[0] as usize == action.orbits().count(),
            format!("{} vs {}", mults[0], action.orbits().count()),
        );
        let family = family_degree(self.cfg.q);
        let family_mults: Vec<(usize, u64)> =
            table.degrees.iter().enumerate().filter(|(_, &d)| d == family).map(|(i, _)| (i, mults[i])).collect();
        let missing: Vec<usize> = family_mults.iter().filter(|(_, m)| *m == 0).map(|(i, _)| *i).collect();
        rep.check(
            "every-degree-(q^2-1)/2-irreducible-appears",
            missing.is_empty() && !family_mults.is_empty(),
            if missing.is_empty() {
                format!("{} irreducibles of degree {family}, all present", family_mults.len())
            } else {
                format!("irreducibles {missing:?} of degree {family} have multiplicity 0")
            },
        );
        if variety == "regular" {
            rep.check("regular-multiplicity-is-degree", mults == table.degrees, "");
        }
        let mut csv = Table::new(&["irreducible", "degree", "multiplicity"]);
        for (i, m) in mults.iter().enumerate() {
            csv.push([i.to_string(), table.degrees[i].to_string(), m.to_string()]);
        }
        rep.put("variety", variety);
        rep.put("points", action.degree());
        rep.put("orbits", action.orbits().count());
        rep.put("degrees", &table.degrees);
        rep.put("multiplicities", &mults);
        rep.put("family_degree", family);
        rep.put("family", family_mults.iter().map(|(i, m)| json!({ "irreducible": i, "multiplicity": m })).collect::<Vec<_>>());
        rep.table = csv;
        Ok(())
    }

    fn lang_test(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let cap = cfg.lang_cap;
        let levels: Vec<u32> = (1..=cap).collect();
        let t = self.tower(&levels)?;
        let mut csv = Table::new(&["r", "target", "order", "degree"]);
        let mut sections = Vec::new();
        for r in [1usize, 2] {
            let base = Sl2::new(RingDesc::new(t.clone(), 1, 1, r)?);
            let targets = base.elements(self.cap())?;
            let outcomes = clock.lap(&format!("lang-r{r}"), || lang_search(&base, &targets, cap))?;
            let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
            let mut unresolved = Vec::new();
            let mut bad_solution = Vec::new();
            let mut not_minimal = Vec::new();
            let mut unpredicted = Vec::new();
            for (y, outcome) in targets.iter().zip(&outcomes) {
                let order = base.element_order(y);
                let degree = match outcome {
                    LangOutcome::Solved { m, g } => {
                        let ext = Sl2::new(base.ring().with_coefficient_level(*m)?);
                        if !ext.is_member(g) || ext.twisted_quotient(GaloisElem::PHI, g) != *y {
                            bad_solution.push(base.serialize(y));
                        }
                        // y is rational, so phi^m(g) = g y^m: the least m is the order of y.
                        if *m as u64 != order {
                            not_minimal.push(base.serialize(y));
                        }
                        *histogram.entry(*m).or_default() += 1;
                        m.to_string()
                    }
                    LangOutcome::Unresolved => {
                        if order <= cap as u64 {
                            unpredicted.push(base.serialize(y));
                        }
                        unresolved.push(json!({ "target": base.serialize(y), "order": order }));
                        "unresolved".to_string()
                    }
                };
                csv.push([r.to_string(), base.serialize(y), order.to_string(), degree]);
            }
            let predicted = targets.iter().filter(|y| base.element_order(y) > cap as u64).count();
            rep.check(
                &format!("r{r}-every-target-solved"),
                unresolved.is_empty(),
                format!("{} of {} targets unresolved within coefficient degree {cap}", unresolved.len(), targets.len()),
            );
            rep.check(&format!("r{r}-solutions-verify"), bad_solution.is_empty(), bad_solution.join("; "));
            rep.check(&format!("r{r}-degree-is-element-order"), not_minimal.is_empty(), not_minimal.join("; "));
            rep.check(
                &format!("r{r}-unresolved-are-exactly-high-order"),
                unpredicted.is_empty() && unresolved.len() == predicted,
                format!("{} unresolved, {predicted} targets of order above {cap}", unresolved.len()),
            );
            sections.push(json!({
                "r": r,
                "targets": targets.len(),
                "solved_by_degree": histogram,
                "unresolved_count": unresolved.len(),
                "unresolved": unresolved,
            }));
        }
        rep.put("cap", cap);
        rep.put("levels", sections);
        rep.table = csv;
        Ok(())
    }

    fn reduction_test(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let cfg = self.cfg;
        let t = self.tower(&[1])?;
        let top = cfg.r_prime;
        let groups: Vec<Sl2> = (1..=top).map(|k| Ok(Sl2::new(RingDesc::new(t.clone(), 1, 1, k)?))).collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut csv = Table::new(&["from", "to", "source_order", "target_order", "image", "fibre_min", "fibre_max"]);
        let mut steps = Vec::new();
        for k in (2..=top).rev() {
            let (src, dst) = (&groups[k - 1], &groups[k - 2]);
            let elems = clock.lap(&format!("elements-{k}"), || src.elements(self.cap()))?;
            let targets = dst.elements(self.cap())?;
            let images = par::map(&elems, |m| src.reduce(m, dst));
            let mut fibres: HashMap<_, usize> = HashMap::new();
            for img in images {
                *fibres.entry(img?).or_default() += 1;
            }
            let surjective = fibres.len() == targets.len() && targets.iter().all(|y| fibres.contains_key(y));
            let lo = fibres.values().copied().min().unwrap_or(0);
            let hi = fibres.values().copied().max().unwrap_or(0);
            let kernel = (cfg.q as usize).pow(3);
            let mut hom = true;
            for _ in 0..cfg.samples.min(elems.len() * elems.len()) {
                let x = &elems[rng.gen_range(0..elems.len())];
                let y = &elems[rng.gen_range(0..elems.len())];
                if src.reduce(&src.mul(x, y), dst)? != dst.mul(&src.reduce(x, dst)?, &src.reduce(y, dst)?) {
                    hom = false;
                    break;
                }
            }
            rep.check(&format!("R{k}-to-R{}-surjective", k - 1), surjective, format!("image {} of {}", fibres.len(), targets.len()));
            rep.check(&format!("R{k}-to-R{}-uniform-fibres", k - 1), lo == hi && hi == kernel, format!("fibres {lo}..{hi}, q^3 = {kernel}"));
            rep.check(&format!("R{k}-to-R{}-homomorphism", k - 1), hom, format!("{} seeded samples", cfg.samples));
            csv.push([k, k - 1, elems.len(), targets.len(), fibres.len(), lo, hi]);
            steps.push(json!({
                "from": k, "to": k - 1, "source_order": elems.len(), "target_order": targets.len(),
                "image": fibres.len(), "fibre": [lo, hi],
            }));
        }
        rep.put("steps", steps);
        rep.table = csv;
        Ok(())
    }

    fn explore(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let td = self.theorem(clock)?;
        let table = self.char_table(&td.g2_group, clock)?;
        let quotients = [
            ("Y/(S,S)", td.y_action.clone()),
            ("Y_L", td.yl_action.clone()),
            ("Y_L/A_plus", td.yl_mod_a_plus_action.clone()),
            ("Y_L/A", td.yl_action.induced(&td.a_orbits)?),
        ];
        let mut header = vec!["irreducible".to_string(), "degree".to_string()];
        header.extend(quotients.iter().map(|(name, _)| name.to_string()));
        let mut csv = Table { header, rows: Vec::new() };
        let mut columns = Vec::new();
        let mut sizes = BTreeMap::new();
        for (name, action) in &quotients {
            rep.check(&format!("burnside-{name}"), action.burnside_holds(), "");
            columns.push(decompose_action(&table, action)?);
            sizes.insert(name.to_string(), action.degree());
        }
        let mut missing = Vec::new();
        for i in 0..table.count() {
            let row: Vec<u64> = columns.iter().map(|c| c[i]).collect();
            if row.iter().all(|&m| m == 0) {
                missing.push(json!({ "irreducible": i, "degree": table.degrees[i] }));
            }
            let mut cells = vec![i.to_string(), table.degrees[i].to_string()];
            cells.extend(row.iter().map(|m| m.to_string()));
            csv.rows.push(cells);
        }
        rep.put("sizes", sizes);
        rep.put("degrees", &table.degrees);
        rep.put(
            "multiplicities",
            quotients.iter().zip(&columns).map(|((n, _), c)| (n.to_string(), c.clone())).collect::<BTreeMap<_, _>>(),
        );
        rep.put("absent_everywhere", missing);
        rep.table = csv;
        Ok(())
    }

    fn report(&self, rep: &mut Report, clock: &mut Clock) -> Result<()> {
        let mut csv = Table::new(&["command", "check", "passed", "detail"]);
        let mut data = BTreeMap::new();
        for command in Command::ALL.into_iter().filter(|c| *c != Command::Report) {
            let sub = self.run(command)?;
            for c in &sub.checks {
                rep.check(&format!("{}/{}", command.name(), c.name), c.passed, c.detail.clone());
                csv.push([command.name().to_string(), c.name.clone(), c.passed.to_string(), c.detail.clone()]);
            }
            for (k, v) in sub.timings.into_iter().flatten() {
                clock.laps.insert(format!("{}/{k}", command.name()), v);
            }
            data.insert(command.name().to_string(), json!({ "verdict": sub.verdict, "data": sub.data }));
        }
        rep.data = serde_json::to_value(data)?;
        rep.table = csv;
        Ok(())
    }
}

fn decompose_action(table: &CharTable, action: &FiniteAction) -> Result<Vec<u64>> {
    let per_element: Vec<i64> = action.permutation_character().iter().map(|&v| v as i64).collect();
    let chi = table.classes.class_function(&per_element)?;
    Ok(table.decompose(&chi)?)
}

fn family_degree(q: u64) -> u64 {
    (q * q - 1) / 2
}

fn root_of_unity(t: &FieldTower, e: u32) -> Result<FieldElem> {
    let one = t.one();
    t.level_elements(1)?
        .into_iter()
        .find(|&z| t.pow(z, e as u64) == one && (1..e).all(|k| t.pow(z, k as u64) != one))
        .with_context(|| format!("no primitive {e}-th root of unity in F_q"))
}

fn coords(f: &FieldTower, xs: &[FieldElem]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| f.serialize(x)).collect();
    format!("({})", parts.join(","))
}

fn verdict_text(f: &FieldTower, v: &Verdict) -> String {
    match v {
        Verdict::Equal => "equal".into(),
        Verdict::SourceOnly(p) => format!("source-only {}", coords(f, p)),
        Verdict::TargetOnly(p) => format!("target-only {}", coords(f, p)),
    }
}

fn digest(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for line in lines {
        h.update(line.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn histogram(values: &[u64]) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for &v in values {
        *out.entry(v).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig { n: 1, samples: 200, ..RunConfig::default() }
    }

    #[test]
    fn names_round_trip_through_clap() {
        use clap::Subcommand;
        for c in Command::ALL {
            assert!(Command::has_subcommand(c.name()), "{}", c.name());
        }
    }

    #[test]
    fn digest_is_stable() {
        let a = digest(&["x".into(), "y".into()]);
        assert_eq!(a.len(), 64);
        assert_ne!(a, digest(&["xy".into()]));
    }

    #[test]
    fn reduction_at_two_levels() {
        let cfg = RunConfig { r_prime: 2, ..small() };
        let rep = run(Command::ReductionTest, &cfg).unwrap();
        assert!(rep.passed(), "{}", rep.to_json());
        assert_eq!(rep.table.rows, vec![vec!["2", "1", "648", "24", "24", "27", "27"]]);
    }

    #[test]
    fn unknown_variety_is_an_error() {
        let cfg = RunConfig { variety: "Z".into(), ..small() };
        assert!(run(Command::Enumerate, &cfg).is_err());
    }

    #[test]
    fn enumerate_structurally_empty_level() {
        let cfg = RunConfig { variety: "X_L".into(), ..small() };
        let rep = run(Command::Enumerate, &cfg).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.data["count"], 0);
        assert_eq!(rep.data["structurally_empty"], true);
    }

    #[test]
    fn prime_power_q_is_refused_where_unsupported() {
        let cfg = RunConfig { q: 9, ..small() };
        assert!(run(Command::VerifyTheorem, &cfg).is_err());
    }
}

use std::fs::File;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use nilflow::catalog::{self, CatalogEntry};
use nilflow::deffile;
use nilflow::geodesic::{conservation_report, integrate, integrate_adaptive};
use nilflow::group::{Chart, TangentPoint};
use nilflow::integrals::FirstIntegral;
use nilflow::linalg::{format_matrix, Matrix};
use nilflow::notation::{parse_integral_in, NotationContext};
use nilflow::poisson::{involution_table, is_first_integral, poisson_bracket, verify_iso_homomorphism};
use nilflow::quotients::{invariance_check, quotient_shift_table, Lattice};
use nilflow::scalar::{format_q, parse_q, to_f64, Q};
use nilflow::solvers::{
    independence_scan, killing2_structured, killing2_tensors, skew_derivations, RankPath, Region, SolutionSpace,
};
use nilflow::verify::{sample_count, verify_all, VerifyOptions, FULL_RANK_FRACTION, INVARIANCE_TOL};
use nilflow::{Error, LieAlgebra, Result};

use crate::output::{csv_table, mark, Report};
use crate::{ChartArg, ExportFormat, Target};

/// Member drift bound used by the `geodesic` verdict.
pub const MEMBER_DRIFT_TOL: f64 = 1e-8;
pub const ENERGY_DRIFT_TOL: f64 = 1e-10;

/// Algebras checked by the isometry homomorphism suite in `verify-paper`.
pub const ISO_SUITE: &[&str] = &[
    "h3", "h5", "n1", "n2", "n3", "n23free", "n6_10", "n6_19(0)", "n6_19(1)", "n6_20", "n6_22(1)", "n6_25", "n6_26",
];

struct Resolved {
    alg: LieAlgebra,
    entry: Option<CatalogEntry>,
    rest: Vec<String>,
}

impl Resolved {
    fn parse(&self, spec: &str) -> Result<FirstIntegral> {
        match &self.entry {
            Some(e) => e.parse_integral(spec),
            None => parse_integral_in(spec, &self.alg, &mut NotationContext::new()),
        }
    }

    fn parse_all(&self, specs: &[String]) -> Result<Vec<FirstIntegral>> {
        specs.iter().map(|s| self.parse(s)).collect()
    }

    /// The given specs, or the catalog complete set when none are given.
    fn set_or_default(&self, specs: &[String]) -> Result<Vec<FirstIntegral>> {
        if !specs.is_empty() {
            return self.parse_all(specs);
        }
        match self.entry.as_ref().map(CatalogEntry::complete_set_integrals).transpose()?.flatten() {
            Some(set) => Ok(set),
            None => Err(Error::InvalidArgument(format!(
                "no integral specs given and {} has no complete set",
                self.alg.name()
            ))),
        }
    }
}

fn resolve(t: &Target) -> Result<Resolved> {
    match &t.file {
        Some(path) => Ok(Resolved {
            alg: deffile::load(path)?,
            entry: None,
            rest: t.args.clone(),
        }),
        None => {
            let (name, rest) = t
                .args
                .split_first()
                .ok_or_else(|| Error::InvalidArgument("expected an algebra name or --file".into()))?;
            let entry = catalog::resolve(name)?;
            Ok(Resolved {
                alg: entry.algebra.clone(),
                entry: Some(entry),
                rest: rest.to_vec(),
            })
        }
    }
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

fn matrix_json(m: &Matrix<Q>) -> Value {
    json!(format_matrix(m))
}

fn matrix_text(m: &Matrix<Q>) -> String {
    let rows = format_matrix(m);
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
            format!("  [ {} ]", cells.join(" "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn parse_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|x| parse_q(x.trim())).collect()
}

fn algebra_json(alg: &LieAlgebra) -> Value {
    json!({
        "name": alg.name(),
        "dim": alg.dim(),
        "labels": alg.labels(),
        "brackets": alg.bracket_entries().iter().map(|(i, j, k, c)| json!([i, j, k, format_q(c)])).collect::<Vec<_>>(),
        "metric": matrix_json(alg.metric()),
    })
}

fn bracket_text(alg: &LieAlgebra) -> String {
    let l = alg.labels();
    alg.bracket_entries()
        .iter()
        .map(|(i, j, k, c)| {
            let coef = if *c == Q::from_integer(1.into()) {
                String::new()
            } else {
                format!("{} ", format_q(c))
            };
            format!("[{}, {}] += {coef}{}", l[i - 1], l[j - 1], l[k - 1])
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn members_json(members: &Option<Vec<(String, String)>>) -> Value {
    match members {
        Some(m) => json!(m.iter().map(|(l, s)| json!({"label": l, "spec": s})).collect::<Vec<_>>()),
        None => Value::Null,
    }
}

pub fn catalog(name: Option<&str>, export: Option<&Path>, format: ExportFormat) -> Result<Report> {
    let names = match name {
        Some(n) => vec![n.to_string()],
        None => catalog::default_instances(),
    };
    let entries = names.iter().map(|n| catalog::resolve(n)).collect::<Result<Vec<_>>>()?;
    if let Some(dir) = export {
        std::fs::create_dir_all(dir)?;
        let ext = match format {
            ExportFormat::Toml => "toml",
            ExportFormat::Json => "json",
        };
        let mut written = Vec::new();
        for e in &entries {
            let file = e.name.replace(['(', ')', '+'], "_").trim_end_matches('_').to_string();
            let path: PathBuf = dir.join(format!("{file}.{ext}"));
            deffile::save(&e.algebra, &path)?;
            written.push(path.display().to_string());
        }
        let text = written.iter().map(|p| format!("wrote {p}")).collect::<Vec<_>>().join("\n");
        let rows: Vec<Vec<String>> = written.iter().map(|p| vec![p.clone()]).collect();
        return Ok(Report::new(json!({ "written": written }), text, true).with_csv(csv_table(&["path"], &rows)?));
    }
    if name.is_some() {
        let e = &entries[0];
        return Ok(Report::new(entry_json(e)?, entry_text(e)?, true));
    }
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for e in &entries {
        let a = e.algebra.analyze()?;
        let set = e.complete_set.is_some();
        rows.push(vec![
            e.name.clone(),
            e.algebra.dim().to_string(),
            a.step.to_string(),
            a.center_dim().to_string(),
            set.to_string(),
        ]);
        items.push(json!({
            "name": e.name,
            "dim": e.algebra.dim(),
            "step": a.step,
            "center_dim": a.center_dim(),
            "complete_set": set,
        }));
    }
    let mut text = format!("{:<12} {:>3} {:>4} {:>6}  complete set\n", "name", "dim", "step", "center");
    for r in &rows {
        text.push_str(&format!(
            "{:<12} {:>3} {:>4} {:>6}  {}\n",
            r[0],
            r[1],
            r[2],
            r[3],
            if r[4] == "true" { "yes" } else { "-" }
        ));
    }
    Ok(Report::new(json!({ "entries": items }), text, true)
        .with_csv(csv_table(&["name", "dim", "step", "center_dim", "complete_set"], &rows)?))
}

fn entry_json(e: &CatalogEntry) -> Result<Value> {
    let lattices: Vec<Value> = e
        .lattices
        .iter()
        .map(|l| {
            json!({
                "name": l.lattice.name,
                "generators": l.lattice.generators.iter().map(|g| json!({"chart": g.chart.name(), "coords": qs(&g.coords)})).collect::<Vec<_>>(),
                "integrals": members_json(&Some(l.integrals.clone())),
            })
        })
        .collect();
    let families: Vec<Value> = e
        .families
        .iter()
        .map(|f| json!({"name": f.name, "kind": f.kind, "matching": f.matching, "dim": f.basis.len()}))
        .collect();
    Ok(json!({
        "name": e.name,
        "algebra": algebra_json(&e.algebra),
        "step": e.algebra.step()?,
        "complete_set": members_json(&e.complete_set),
        "repaired_set": members_json(&e.repaired_set),
        "dense_predicate": e.dense_predicate.as_ref().map(|r| r.description.clone()),
        "lattices": lattices,
        "expected": e.expected,
        "families": families,
        "group_laws": e.laws.iter().map(|l| json!({"group": l.group, "chart": l.chart.name()})).collect::<Vec<_>>(),
        "notes": e.notes,
    }))
}

fn entry_text(e: &CatalogEntry) -> Result<String> {
    let mut s = format!("{} (dim {}, step {})\n", e.name, e.algebra.dim(), e.algebra.step()?);
    s.push_str(&format!("brackets: {}\n", bracket_text(&e.algebra)));
    let show = |s: &mut String, title: &str, m: &Option<Vec<(String, String)>>| {
        if let Some(m) = m {
            let items: Vec<String> = m.iter().map(|(l, sp)| format!("{l} = {sp}")).collect();
            s.push_str(&format!("{title}: {}\n", items.join(", ")));
        }
    };
    match &e.complete_set {
        Some(_) => show(&mut s, "complete set", &e.complete_set),
        None => s.push_str("complete set: none claimed\n"),
    }
    show(&mut s, "repaired set", &e.repaired_set);
    if let Some(r) = &e.dense_predicate {
        s.push_str(&format!("dense set: {}\n", r.description));
    }
    for l in &e.lattices {
        s.push_str(&format!("lattice {} with {} generators\n", l.lattice.name, l.lattice.generators.len()));
    }
    for (k, v) in &e.expected {
        s.push_str(&format!("expected {k} = {v}\n"));
    }
    for n in &e.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    Ok(s)
}

pub fn check(t: &Target) -> Result<Report> {
    let r = resolve(t)?;
    let a = r.alg.analyze()?;
    let set = r.parse_all(&r.rest)?;
    let mut items = Vec::new();
    let mut text = format!(
        "{}: dim {}, step {}, center dim {}, lower central series dims {:?}\n",
        r.alg.name(),
        r.alg.dim(),
        a.step,
        a.center_dim(),
        a.commutator_chain.iter().map(Vec::len).collect::<Vec<_>>()
    );
    let mut passed = true;
    for f in &set {
        let c = is_first_integral(f, &r.alg)?;
        passed &= c.holds;
        let spec = f.spec(&r.alg);
        text.push_str(&format!("{} first integral {spec}\n", mark(c.holds)));
        if let Some(w) = &c.witness {
            text.push_str(&format!("  {{f, E}} = {w}\n"));
        }
        items.push(json!({
            "spec": spec,
            "first_integral": c.holds,
            "witness": c.witness.map(|w| w.render()),
        }));
    }
    let value = json!({
        "algebra": algebra_json(&r.alg),
        "step": a.step,
        "center_basis": a.center_basis.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "lower_central_series_dims": a.commutator_chain.iter().map(Vec::len).collect::<Vec<_>>(),
        "integrals": items,
    });
    Ok(Report::new(value, text, passed))
}

fn space_report(kind: &str, alg: &LieAlgebra, space: &SolutionSpace) -> (Value, String, Vec<Vec<String>>) {
    let value = json!({
        "algebra": alg.name(),
        "kind": kind,
        "dim": space.dim,
        "unknowns": space.unknowns,
        "constraints_rank": space.constraints_rank,
        "basis": space.basis.iter().map(matrix_json).collect::<Vec<_>>(),
    });
    let mut text = format!("{}: {kind} space of dimension {}\n", alg.name(), space.dim);
    let mut rows = Vec::new();
    for (k, b) in space.basis.iter().enumerate() {
        text.push_str(&format!("#{k}\n{}\n", matrix_text(b)));
        for (i, row) in format_matrix(b).iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c != "0" {
                    rows.push(vec![k.to_string(), (i + 1).to_string(), (j + 1).to_string(), c.clone()]);
                }
            }
        }
    }
    (value, text, rows)
}

pub fn derivations(t: &Target) -> Result<Report> {
    let r = resolve(t)?;
    let space = skew_derivations(&r.alg);
    let (value, text, rows) = space_report("skew-derivation", &r.alg, &space);
    Ok(Report::new(value, text, true).with_csv(csv_table(&["basis", "row", "col", "value"], &rows)?))
}

pub fn killing2(t: &Target) -> Result<Report> {
    let r = resolve(t)?;
    r.alg.analyze()?;
    let space = killing2_tensors(&r.alg);
    let (mut value, mut text, rows) = space_report("killing-2-tensor", &r.alg, &space);
    let has_id = space.contains(&Matrix::identity(r.alg.dim()));
    text.push_str(&format!("{} identity is a Killing tensor\n", mark(has_id)));
    let mut passed = has_id;
    let step = r.alg.step()?;
    if step == 2 || step == 3 {
        let s = killing2_structured(&r.alg)?;
        text.push_str(&format!(
            "{} structured conditions: dim {} vs generic {}\n",
            mark(s.passed),
            s.structured_dim,
            s.generic_dim
        ));
        passed &= s.passed;
        value["structured"] = serde_json::to_value(&s).map_err(|e| Error::Parse(e.to_string()))?;
    }
    value["contains_identity"] = json!(has_id);
    Ok(Report::new(value, text, passed).with_csv(csv_table(&["basis", "row", "col", "value"], &rows)?))
}

pub fn bracket(t: &Target) -> Result<Report> {
    let r = resolve(t)?;
    let [f, g] = r.rest.as_slice() else {
        return Err(Error::InvalidArgument("bracket needs exactly two integral specs".into()));
    };
    let (f, g) = (r.parse(f)?, r.parse(g)?);
    let b = poisson_bracket(&f, &g, &r.alg)?;
    let rhs = match (&b.matched_integral, b.is_zero) {
        (_, true) => "0".to_string(),
        (Some(m), false) => m.canonical_spec(&r.alg),
        (None, false) => b.poly.render(),
    };
    let text = format!("{{{}, {}}} = {rhs}", f.spec(&r.alg), g.spec(&r.alg));
    let value = json!({
        "algebra": r.alg.name(),
        "f": f.spec(&r.alg),
        "g": g.spec(&r.alg),
        "bracket": b.poly.render(),
        "zero": b.is_zero,
        "matched": b.matched_integral.map(|m| m.canonical_spec(&r.alg)),
    });
    Ok(Report::new(value, text, true))
}

pub fn involution(t: &Target) -> Result<Report> {
    let r = resolve(t)?;
    let set = r.set_or_default(&r.rest)?;
    let table = involution_table(&set, &r.alg)?;
    let names: Vec<String> = set.iter().map(|f| f.spec(&r.alg)).collect();
    let checks = set.iter().map(|f| is_first_integral(f, &r.alg)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut text = String::new();
    for (i, c) in checks.iter().enumerate() {
        text.push_str(&format!("{} first integral {}\n", mark(c.holds), names[i]));
    }
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let p = &table.entries[i][j];
            rows.push(vec![names[i].clone(), names[j].clone(), p.render()]);
            if !p.is_identically_zero() {
                text.push_str(&format!("{{{}, {}}} = {p}\n", names[i], names[j]));
            }
        }
    }
    let commute = table.all_zero();
    text.push_str(&format!("{} {} members pairwise in involution\n", mark(commute), set.len()));
    let all_fi = checks.iter().all(|c| c.holds);
    let value = json!({
        "algebra": r.alg.name(),
        "members": names,
        "first_integrals": checks.iter().map(|c| c.holds).collect::<Vec<_>>(),
        "failures": table.failures().iter().map(|&(i, j)| json!({"i": i, "j": j, "bracket": table.entries[i][j].render()})).collect::<Vec<_>>(),
    });
    Ok(Report::new(value, text, commute && all_fi).with_csv(csv_table(&["f", "g", "bracket"], &rows)?))
}

pub fn independence(t: &Target, samples: Option<usize>, seed: u64, exact: bool, everywhere: bool) -> Result<Report> {
    let r = resolve(t)?;
    let set = r.set_or_default(&r.rest)?;
    let region = match (&r.entry, everywhere) {
        (Some(e), false) => e.dense_predicate.clone().unwrap_or_else(Region::everywhere),
        _ => Region::everywhere(),
    };
    let path = if exact { RankPath::Exact } else { RankPath::Float };
    let n = samples.unwrap_or_else(sample_count);
    let s = independence_scan(&set, &r.alg, &region, n, seed, path)?;
    let passed = if exact {
        s.full_rank == s.accepted
    } else {
        s.full_rank_fraction >= FULL_RANK_FRACTION
    };
    let text = format!(
        "{} {}/{} samples reach rank {} on {} ({} path, ranks {}..{}, {} attempts)",
        mark(passed),
        s.full_rank,
        s.accepted,
        s.target_rank,
        region.description,
        if exact { "exact" } else { "float" },
        s.min_rank,
        s.max_rank,
        s.attempts
    );
    let mut value = serde_json::to_value(&s).map_err(|e| Error::Parse(e.to_string()))?;
    value["algebra"] = json!(r.alg.name());
    value["region"] = json!(region.description);
    value["members"] = json!(set.iter().map(|f| f.spec(&r.alg)).collect::<Vec<_>>());
    value["seed"] = json!(seed);
    Ok(Report::new(value, text, passed))
}

pub struct GeodesicArgs {
    pub target: Target,
    pub y0: Option<String>,
    pub w0: Option<String>,
    pub dt: f64,
    pub t_end: f64,
    pub integrals: Vec<String>,
    pub adaptive: Option<f64>,
    pub csv_out: Option<PathBuf>,
}

pub fn geodesic(a: &GeodesicArgs) -> Result<Report> {
    let r = resolve(&a.target)?;
    let n = r.alg.dim();
    let vec_or = |s: &Option<String>, fill: f64| -> Result<Vec<f64>> {
        match s {
            Some(s) => Ok(parse_list(s)?.iter().map(to_f64).collect()),
            None => Ok(vec![fill; n]),
        }
    };
    let init = TangentPoint::new(vec_or(&a.w0, 0.0)?, vec_or(&a.y0, 1.0)?)?;
    let set = if a.integrals.is_empty() && r.entry.as_ref().is_some_and(|e| e.complete_set.is_some()) {
        r.set_or_default(&[])?
    } else {
        r.parse_all(&a.integrals)?
    };
    let traj = match a.adaptive {
        Some(tol) => integrate_adaptive(&r.alg, &init, a.dt, a.t_end, tol)?,
        None => integrate(&r.alg, &init, a.dt, a.t_end)?,
    };
    if let Some(path) = &a.csv_out {
        traj.write_csv(File::create(path)?)?;
    }
    let rep = conservation_report(&r.alg, &traj, &set)?;
    let member_ok = rep.integrals.iter().all(|d| d.max_rel_drift < MEMBER_DRIFT_TOL);
    let passed = member_ok && rep.energy_rel_drift < ENERGY_DRIFT_TOL;
    let mut text = format!(
        "{}: {} steps, dt {}, t in [0, {}], {:.3} s\n",
        r.alg.name(),
        traj.len() - 1,
        a.dt,
        a.t_end,
        rep.wall_clock_secs
    );
    text.push_str(&format!("{} energy relative drift {:.3e}\n", mark(rep.energy_rel_drift < ENERGY_DRIFT_TOL), rep.energy_rel_drift));
    for d in &rep.integrals {
        text.push_str(&format!(
            "{} {} relative drift {:.3e} (initial {:.6})\n",
            mark(d.max_rel_drift < MEMBER_DRIFT_TOL),
            d.integral,
            d.max_rel_drift,
            d.initial
        ));
    }
    let mut value = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
    if let Value::Object(m) = &mut value {
        m.remove("wall_clock_secs");
        m.insert("steps".into(), json!(traj.len() - 1));
        m.insert("final_state".into(), json!({"w": traj.final_state().w, "y": traj.final_state().y}));
    }
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Report::new(value, text, passed).with_csv(csv))
}

pub fn quotient(
    t: &Target,
    scales: Option<&str>,
    chart: ChartArg,
    integrals: &[String],
    samples: Option<usize>,
    seed: u64,
) -> Result<Report> {
    let r = resolve(t)?;
    let n_samples = samples.unwrap_or_else(sample_count);
    let mut fixtures: Vec<(Lattice, Vec<FirstIntegral>)> = Vec::new();
    match scales {
        Some(s) => {
            let chart = match chart {
                ChartArg::Exponential => Chart::Exponential,
                ChartArg::Matrix => {
                    let n = r.alg.dim();
                    if n % 2 == 0 {
                        return Err(Error::InvalidArgument("matrix chart needs odd dimension".into()));
                    }
                    Chart::HeisenbergMatrix { m: (n - 1) / 2 }
                }
            };
            if integrals.is_empty() {
                return Err(Error::InvalidArgument("--scales needs --integrals".into()));
            }
            let lat = Lattice::scaled_basis(format!("scales({s})"), &parse_list(s)?, chart)?;
            fixtures.push((lat, r.parse_all(integrals)?));
        }
        None => {
            let entry = r
                .entry
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("no lattice: pass --scales".into()))?;
            if entry.lattices.is_empty() {
                return Err(Error::InvalidArgument(format!("{} has no catalog lattice; pass --scales", entry.name)));
            }
            for l in &entry.lattices {
                let fs = if integrals.is_empty() {
                    entry.integrals(&l.integrals)?
                } else {
                    r.parse_all(integrals)?
                };
                fixtures.push((l.lattice.clone(), fs));
            }
        }
    }
    let mut passed = true;
    let mut text = String::new();
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (lat, fs) in &fixtures {
        for f in fs {
            let inv = invariance_check(f, lat, &r.alg, n_samples, seed)?;
            let shifts = quotient_shift_table(&r.alg, lat, f)?;
            let integer = shifts.iter().all(|s| s.multiple.as_ref().is_some_and(Q::is_integer));
            let ok = inv.max_deviation < INVARIANCE_TOL && integer;
            passed &= ok;
            let mult: Vec<String> = shifts
                .iter()
                .map(|s| s.multiple.as_ref().map_or("none".into(), format_q))
                .collect();
            text.push_str(&format!(
                "{} {} on {}: max deviation {:.3e} over {} samples, shift multiples [{}]\n",
                mark(ok),
                f.spec(&r.alg),
                lat.name,
                inv.max_deviation,
                inv.samples,
                mult.join(", ")
            ));
            rows.push(vec![
                lat.name.clone(),
                f.spec(&r.alg),
                format!("{:e}", inv.max_deviation),
                inv.samples.to_string(),
                mult.join(" "),
            ]);
            items.push(json!({
                "lattice": lat.name,
                "integral": f.spec(&r.alg),
                "max_deviation": inv.max_deviation,
                "samples": inv.samples,
                "attempts": inv.attempts,
                "shift_multiples": mult,
                "passed": ok,
            }));
        }
    }
    let value = json!({"algebra": r.alg.name(), "seed": seed, "checks": items});
    Ok(Report::new(value, text, passed)
        .with_csv(csv_table(&["lattice", "integral", "max_deviation", "samples", "shift_multiples"], &rows)?))
}

pub fn verify_paper(entries: &[String], samples: Option<usize>, seed: u64, exact: bool, skip_iso: bool) -> Result<Report> {
    let names = if entries.is_empty() {
        catalog::default_instances()
    } else {
        entries.to_vec()
    };
    let opts = VerifyOptions {
        samples: samples.unwrap_or_else(sample_count),
        seed,
        exact_rank: exact,
    };
    let reports = verify_all(&names, &opts)?;
    let mut text = String::from("entry         verdict  failing claims\n");
    let mut rows = Vec::new();
    for r in &reports {
        let fails: Vec<&str> = r.failures().iter().map(|c| c.name.as_str()).collect();
        text.push_str(&format!("{:<13} {:<8} {}\n", r.entry, mark(r.passed), fails.join("; ")));
        for c in &r.claims {
            rows.push(vec![
                r.entry.clone(),
                c.name.clone(),
                c.passed.to_string(),
                c.informational.to_string(),
                c.detail.clone(),
            ]);
        }
    }
    let mut passed = reports.iter().all(|r| r.passed);
    let mut iso = Vec::new();
    if !skip_iso {
        text.push_str("isometry homomorphism\n");
        let suite: Vec<&str> = if entries.is_empty() {
            ISO_SUITE.to_vec()
        } else {
            names.iter().map(String::as_str).collect()
        };
        for name in suite {
            let alg = catalog::resolve(name)?.algebra;
            let step = alg.step()?;
            if step != 2 && step != 3 {
                continue;
            }
            let rep = verify_iso_homomorphism(&alg, 10, seed)?;
            passed &= rep.passed;
            text.push_str(&format!(
                "{:<13} {:<8} derivation dim {}, {} identity checks, injective {}\n",
                name,
                mark(rep.passed),
                rep.derivation_dim,
                rep.checks.len(),
                rep.injective
            ));
            rows.push(vec![
                name.to_string(),
                "isometry-homomorphism".into(),
                rep.passed.to_string(),
                "false".into(),
                format!("{} checks, injective {}", rep.checks.len(), rep.injective),
            ]);
            iso.push(json!({
                "algebra": name,
                "derivation_dim": rep.derivation_dim,
                "checks": rep.checks.len(),
                "identities_passed": rep.identities_passed,
                "injective": rep.injective,
                "passed": rep.passed,
            }));
        }
    }
    let total = reports.len();
    let ok = reports.iter().filter(|r| r.passed).count();
    text.push_str(&format!("{ok}/{total} entries pass all claims\n"));
    let value = json!({
        "entries": reports,
        "isometry_homomorphism": iso,
        "samples": opts.samples,
        "seed": seed,
    });
    Ok(Report::new(value, text, passed)
        .with_csv(csv_table(&["entry", "claim", "passed", "informational", "detail"], &rows)?))
}

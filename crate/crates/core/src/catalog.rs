//! Built-in metric nilpotent Lie algebras of dimension at most six (steps 2 and 3),
//! their complete sets of first integrals, dense sets, lattices and fixtures.

use std::collections::BTreeMap;

use crate::algebra::{int_brackets, LieAlgebra};
use crate::error::{Error, Result};
use crate::group::Chart;
use crate::integrals::FirstIntegral;
use crate::linalg::Matrix;
use crate::notation::{parse_integral_in, NotationContext};
use crate::poly::{tangent_variables, Polynomial};
use crate::quotients::Lattice;
use crate::scalar::{format_q, parse_q, q, qf, Q};
use crate::solvers::Region;

/// A labelled integral spec, e.g. `("f_X1*", "right:X1")`.
pub type SetMember = (String, String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Derivation,
    Killing,
}

/// How a family fixture is compared with the solver output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyMatch {
    SameSpan,
    Contains,
}

/// A displayed family of derivations or Killing tensors, given by a basis.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub kind: FamilyKind,
    pub matching: FamilyMatch,
    pub basis: Vec<Matrix<Q>>,
}

/// Group product in some chart.
pub type Law = fn(&[Q], &[Q]) -> Vec<Q>;

/// A coordinate group law together with the chart it is written in.
#[derive(Clone, Debug)]
pub struct CoordinateLaw {
    pub group: String,
    pub chart: Chart,
    pub product: Law,
}

/// A left-invariant metric written in chart coordinates `x1..xn`.
#[derive(Clone, Debug)]
pub struct CoordinateMetric {
    pub chart: Chart,
    pub entries: Matrix<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct LatticeFixture {
    pub lattice: Lattice,
    pub integrals: Vec<SetMember>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    pub context: NotationContext,
    pub complete_set: Option<Vec<SetMember>>,
    pub repaired_set: Option<Vec<SetMember>>,
    pub dense_predicate: Option<Region>,
    pub lattices: Vec<LatticeFixture>,
    pub expected: BTreeMap<String, usize>,
    pub families: Vec<Family>,
    pub laws: Vec<CoordinateLaw>,
    pub metrics: Vec<CoordinateMetric>,
    pub butler_display: Option<Polynomial>,
    pub notes: Vec<String>,
}

impl CatalogEntry {
    fn new(name: impl Into<String>, algebra: LieAlgebra) -> Self {
        CatalogEntry {
            name: name.into(),
            algebra,
            context: NotationContext::new(),
            complete_set: None,
            repaired_set: None,
            dense_predicate: None,
            lattices: Vec::new(),
            expected: BTreeMap::new(),
            families: Vec::new(),
            laws: Vec::new(),
            metrics: Vec::new(),
            butler_display: None,
            notes: Vec::new(),
        }
    }

    fn set(mut self, members: &[(&str, &str)]) -> Self {
        self.complete_set = Some(owned(members));
        self
    }

    fn repaired(mut self, members: &[(&str, &str)]) -> Self {
        self.repaired_set = Some(owned(members));
        self
    }

    fn matrix(mut self, name: &str, m: Matrix<Q>, assume_derivation: bool) -> Self {
        self.context = self.context.with_matrix(name, m, assume_derivation);
        self
    }

    fn expect(mut self, key: &str, value: usize) -> Self {
        self.expected.insert(key.into(), value);
        self
    }

    fn family(mut self, name: &str, kind: FamilyKind, matching: FamilyMatch, basis: Vec<Matrix<Q>>) -> Self {
        self.families.push(Family {
            name: name.into(),
            kind,
            matching,
            basis,
        });
        self
    }

    fn dense(mut self, description: &str, test: impl Fn(&[f64], &[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.dense_predicate = Some(Region::new(description, test));
        self
    }

    fn note(mut self, text: &str) -> Self {
        self.notes.push(text.into());
        self
    }

    fn law(mut self, group: &str, chart: Chart, product: Law) -> Self {
        self.laws.push(CoordinateLaw {
            group: group.into(),
            chart,
            product,
        });
        self
    }

    /// Parses a labelled member list against this entry's named matrices.
    pub fn integrals(&self, members: &[SetMember]) -> Result<Vec<FirstIntegral>> {
        let mut ctx = self.context.clone();
        members
            .iter()
            .map(|(label, spec)| Ok(parse_integral_in(spec, &self.algebra, &mut ctx)?.with_label(label.clone())))
            .collect()
    }

    pub fn complete_set_integrals(&self) -> Result<Option<Vec<FirstIntegral>>> {
        self.complete_set.as_ref().map(|s| self.integrals(s)).transpose()
    }

    pub fn repaired_set_integrals(&self) -> Result<Option<Vec<FirstIntegral>>> {
        self.repaired_set.as_ref().map(|s| self.integrals(s)).transpose()
    }

    /// Parses an integral spec with this entry's names in scope.
    pub fn parse_integral(&self, spec: &str) -> Result<FirstIntegral> {
        let mut ctx = self.context.clone();
        if let Some(set) = &self.complete_set {
            for (label, s) in set {
                if let Ok(f) = parse_integral_in(s, &self.algebra, &mut ctx) {
                    ctx = ctx.with_integral(label.clone(), f);
                }
            }
        }
        parse_integral_in(spec, &self.algebra, &mut ctx)
    }
}

fn owned(members: &[(&str, &str)]) -> Vec<SetMember> {
    members.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// Canonical names accepted by [`get`]; `(ε)` marks a required parameter.
pub const NAMES: &[&str] = &[
    "h3", "h5", "h2n+1(n)", "n1", "n2", "n3", "n23free", "n6_10", "n6_19(ε)", "n6_20", "n6_22(ε)", "n6_23",
    "n6_24(ε)", "n6_25", "n6_26", "r<k>", "r+<name>", "r<k>+<name>",
];

/// Default instantiation used by catalog-wide runs (ε ∈ {−1, 0, 1, 2}).
pub fn default_instances() -> Vec<String> {
    let mut v: Vec<String> = ["h3", "h5", "r+h3", "r2+h3", "n1", "n2", "r+n2", "n3", "n23free", "n6_10"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for fam in ["n6_19", "n6_22", "n6_24"] {
        for e in ["-1", "0", "1", "2"] {
            v.push(format!("{fam}({e})"));
        }
    }
    v.extend(["n6_20", "n6_23", "n6_25", "n6_26"].iter().map(|s| s.to_string()));
    v.sort_by_key(|s| order_key(s));
    v
}

fn order_key(s: &str) -> (usize, String) {
    let base = s.rsplit('+').next().unwrap_or(s);
    let dim = match base {
        b if b.starts_with("h3") => 3,
        b if b.starts_with("n2") && !b.starts_with("n23") => 4,
        b if b.starts_with("n6") => 6,
        _ => 5,
    };
    (dim, s.to_string())
}

/// Default instances that carry a complete set.
pub fn complete_set_instances() -> Vec<String> {
    default_instances()
        .into_iter()
        .filter(|n| resolve(n).is_ok_and(|e| e.complete_set.is_some()))
        .collect()
}

/// Resolves `name` or `name(param)`, e.g. `n6_19(1)`, `h2n+1(3)`, `r2+h3`.
pub fn resolve(text: &str) -> Result<CatalogEntry> {
    let t = text.trim();
    if let Some((base, rest)) = t.split_once('(') {
        if let Some(p) = rest.strip_suffix(')') {
            if !base.contains('+') || base == "h2n+1" {
                return get(base, Some(&parse_q(p)?));
            }
        }
    }
    get(t, None)
}

pub fn get(name: &str, param: Option<&Q>) -> Result<CatalogEntry> {
    let need = || {
        param
            .cloned()
            .ok_or_else(|| Error::MissingParameter(format!("{name} requires a parameter, e.g. {name}(1)")))
    };
    if let Some(k) = abelian_dim(name) {
        return Ok(abelian(k));
    }
    if let Some((k, base)) = split_extension(name) {
        let base_entry = match base.split_once('(') {
            Some(_) => resolve(base)?,
            None => get(base, param)?,
        };
        return extension(k, base_entry);
    }
    match name {
        "h3" => h3(),
        "h5" => h5(),
        h if heisenberg_dim(h).is_some() => heisenberg(heisenberg_dim(h).unwrap_or(1)),
        "h2n+1" => {
            let m = need()?;
            if !m.is_integer() || m < q(1) {
                return Err(Error::InvalidArgument("h2n+1(n) needs an integer n >= 1".into()));
            }
            heisenberg(m.to_integer().try_into().map_err(|_| Error::InvalidArgument("n too large".into()))?)
        }
        "n1" => n1(),
        "n2" => n2(),
        "n3" => n3(),
        "n23free" | "n23" => n23(),
        "n6_10" => n6_10(),
        "n6_19" => n6_19(need()?),
        "n6_20" => n6_20(),
        "n6_22" => n6_22(need()?),
        "n6_23" => n6_23(),
        "n6_24" => n6_24(need()?),
        "n6_25" => n6_25(),
        "n6_26" => n6_26(),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

fn abelian_dim(name: &str) -> Option<usize> {
    let k = name.strip_prefix('r')?;
    if k.is_empty() || !k.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    k.parse().ok().filter(|&k| k >= 1)
}

/// `h7`, `h9`, ... as aliases of `h2n+1(n)`.
fn heisenberg_dim(name: &str) -> Option<usize> {
    let d: usize = name.strip_prefix('h')?.parse().ok()?;
    (d >= 3 && d % 2 == 1).then_some((d - 1) / 2)
}

fn split_extension(name: &str) -> Option<(usize, &str)> {
    let (head, base) = name.split_once('+')?;
    if head == "h2n" {
        return None;
    }
    let k = if head == "r" { 1 } else { abelian_dim(head)? };
    Some((k, base))
}

fn mk(name: &str, n: usize, br: &[(usize, usize, usize, i64)], labels: Option<&[&str]>) -> Result<LieAlgebra> {
    mk_q(name, n, &int_brackets(br), labels, BTreeMap::new())
}

fn mk_q(
    name: &str,
    n: usize,
    br: &[(usize, usize, usize, Q)],
    labels: Option<&[&str]>,
    params: BTreeMap<String, Q>,
) -> Result<LieAlgebra> {
    let a = LieAlgebra::new(name, n, br, None, params)?;
    match labels {
        Some(l) => a.with_labels(l.iter().map(|s| s.to_string()).collect()),
        None => Ok(a),
    }
}

fn eps_name(base: &str, eps: &Q) -> String {
    format!("{base}({})", format_q(eps))
}

fn eps_params(eps: &Q) -> BTreeMap<String, Q> {
    BTreeMap::from([("eps".to_string(), eps.clone())])
}

/// `n×n` matrix from 1-based `(row, col, value)` triples.
pub fn sparse(n: usize, entries: &[(usize, usize, i64)]) -> Matrix<Q> {
    let mut m = Matrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i - 1, j - 1)] = q(v);
    }
    m
}

/// The skew map `e_i ↦ e_j`, `e_j ↦ −e_i` (1-based).
pub fn rotation(n: usize, i: usize, j: usize) -> Matrix<Q> {
    sparse(n, &[(j, i, 1), (i, j, -1)])
}

fn diag(entries: &[i64]) -> Matrix<Q> {
    let n = entries.len();
    let mut m = Matrix::zeros(n, n);
    for (i, &v) in entries.iter().enumerate() {
        m[(i, i)] = q(v);
    }
    m
}

fn xvars(n: usize) -> Vec<Polynomial> {
    (0..n).map(|i| Polynomial::var(n, i).expect("in range")).collect()
}

fn cq(n: usize, c: Q) -> Polynomial {
    Polynomial::constant(n, c)
}

fn abelian(k: usize) -> CatalogEntry {
    let alg = LieAlgebra::new(format!("r{k}"), k, &[], None, BTreeMap::new()).expect("abelian algebra is valid");
    let members: Vec<SetMember> = (1..=k).map(|i| (format!("f_e{i}"), format!("lin:e{i}"))).collect();
    let mut e = CatalogEntry::new(format!("r{k}"), alg)
        .expect("step", 1)
        .expect("center_dim", k)
        .expect("derivation_dim", k * (k - 1) / 2)
        .expect("killing_dim", k * (k + 1) / 2);
    e.complete_set = Some(members);
    e
}

/// `ℝ^k ⊕ base`: the abelian factor is appended as `A1..Ak`, and the complete set
/// gains the central linear integrals `f_{A_i}`.
pub fn extension(k: usize, base: CatalogEntry) -> Result<CatalogEntry> {
    let name = if k == 1 {
        format!("r+{}", base.name)
    } else {
        format!("r{k}+{}", base.name)
    };
    let alg = base.algebra.abelian_extension(k, name.clone())?;
    let n = base.algebra.dim();
    let grow = |m: &Matrix<Q>| {
        let mut out = Matrix::zeros(n + k, n + k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(i, j)].clone();
            }
        }
        out
    };
    let mut e = CatalogEntry::new(name, alg);
    for (nm, m) in &base.context.matrices {
        e = e.matrix(nm, grow(&m.matrix), m.assume_derivation);
    }
    let extra: Vec<SetMember> = (1..=k).map(|i| (format!("f_A{i}"), format!("lin:A{i}"))).collect();
    e.complete_set = base.complete_set.map(|mut s| {
        s.extend(extra.iter().cloned());
        s
    });
    e.repaired_set = base.repaired_set.map(|mut s| {
        s.extend(extra.iter().cloned());
        s
    });
    if let Some(r) = base.dense_predicate {
        e.dense_predicate = Some(Region::new(r.description.clone(), move |w, y| r.contains(&w[..n], &y[..n])));
    }
    if let Some(s) = base.expected.get("step") {
        e.expected.insert("step".into(), *s);
    }
    if let Some(c) = base.expected.get("center_dim") {
        e.expected.insert("center_dim".into(), c + k);
    }
    let oracle: &[(&str, usize, usize)] = &[("r+h3", 1, 4), ("r2+h3", 2, 7), ("r+n2", 0, 5)];
    if let Some((_, d, kd)) = oracle.iter().find(|(nm, _, _)| *nm == e.name) {
        e.expected.insert("derivation_dim".into(), *d);
        e.expected.insert("killing_dim".into(), *kd);
    }
    e.notes.push(format!("trivial extension of {} by an abelian factor of dimension {k}", base.name));
    Ok(e)
}

fn h3_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    vec![&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2] + &a[0] * &b[1]]
}

fn h5_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    out[4] += &a[0] * &b[2] + &a[1] * &b[3];
    out
}

fn half() -> Q {
    qf(1, 2)
}

fn twelfth() -> Q {
    qf(1, 12)
}

/// `(v, x4, x5)(w, x4', x5')` on `N_3`.
fn n3_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    out[3] += half() * (&a[0] * &b[1] - &a[1] * &b[0]);
    out[4] += half() * (&a[0] * &b[2] - &a[2] * &b[0]);
    out
}

fn n1_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let c12 = &a[0] * &b[1] - &a[1] * &b[0];
    out[2] += half() * &c12;
    out[4] += half() * (&a[0] * &b[2] - &a[2] * &b[0] + &a[1] * &b[3] - &a[3] * &b[1])
        + twelfth() * (&a[0] * &c12 + &b[0] * (&b[0] * &a[1] - &a[0] * &b[1]));
    out
}

fn n2_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let c12 = &a[0] * &b[1] - &a[1] * &b[0];
    out[2] += half() * &c12;
    out[3] += half() * (&a[0] * &b[2] - &b[0] * &a[2]) + twelfth() * &a[0] * &c12;
    out
}

fn n23_law(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let c12 = &a[0] * &b[1] - &a[1] * &b[0];
    out[2] += half() * &c12;
    out[3] += half() * (&a[0] * &b[2] - &a[2] * &b[0]) + twelfth() * &a[0] * &c12;
    out[4] += half() * (&a[1] * &b[2] - &a[2] * &b[1]) + twelfth() * &a[1] * &c12;
    out
}

fn h3() -> Result<CatalogEntry> {
    let alg = mk("h3", 3, &[(1, 2, 3, 1)], Some(&["X1", "Y1", "Z"]))?;
    let x = xvars(3);
    let one = cq(3, q(1));
    let zero = cq(3, q(0));
    let metric = Matrix::from_rows(vec![
        vec![one.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), &one + &(&x[0] * &x[0]), -x[0].clone()],
        vec![zero, -x[0].clone(), one],
    ])?;
    let mut e = CatalogEntry::new("h3", alg)
        .set(&[("f_Z", "lin:Z"), ("E", "E"), ("f_X1*", "right:X1")])
        .dense("<Y,Z> != 0 and (<Y,X1> != 0 or <Y,Y1> != 0)", |_, y| {
            y[2] != 0.0 && (y[0] != 0.0 || y[1] != 0.0)
        })
        .expect("step", 2)
        .expect("center_dim", 1)
        .expect("derivation_dim", 1)
        .expect("killing_dim", 2)
        .family(
            "rotation in span{X1,Y1}",
            FamilyKind::Derivation,
            FamilyMatch::SameSpan,
            vec![rotation(3, 1, 2)],
        )
        .law("H3", Chart::HeisenbergMatrix { m: 1 }, h3_law)
        .note("coordinate metric dx1^2 + (1+x1^2) dy1^2 + dz^2 - x1 dy1 dz in the matrix chart (coefficients are tensor entries g_ij)");
    e.metrics.push(CoordinateMetric {
        chart: Chart::HeisenbergMatrix { m: 1 },
        entries: metric,
    });
    e.lattices.push(h3_lattice(&q(2))?);
    Ok(e)
}

/// `Γ_r = rℤ × ℤ × ℤ` in the matrix chart, with `f1 = quot(f_{X1*} / f_Z)`.
pub fn h3_lattice(r: &Q) -> Result<LatticeFixture> {
    Ok(LatticeFixture {
        lattice: Lattice::scaled_basis(
            format!("Gamma_{}", format_q(r)),
            &[r.clone(), q(1), q(1)],
            Chart::HeisenbergMatrix { m: 1 },
        )?,
        integrals: owned(&[("f1", "quot(right:X1 / lin:Z)")]),
    })
}

fn h5() -> Result<CatalogEntry> {
    let alg = mk("h5", 5, &[(1, 3, 5, 1), (2, 4, 5, 1)], Some(&["X1", "X2", "Y1", "Y2", "Z"]))?;
    let mut e = CatalogEntry::new("h5", alg)
        .matrix("S1", diag(&[1, 0, 1, 0, 0]), false)
        .matrix("S2", diag(&[0, 1, 0, 1, 0]), false)
        .set(&[
            ("f_Z", "lin:Z"),
            ("f_X1*", "right:X1"),
            ("f_X2*", "right:X2"),
            ("g_S1", "quad:S1"),
            ("g_S2", "quad:S2"),
        ])
        .expect("step", 2)
        .expect("center_dim", 1)
        .expect("derivation_dim", 4)
        .expect("killing_dim", 5)
        .law("H5", Chart::HeisenbergMatrix { m: 2 }, h5_law)
        .note("S_i is the identity on span{X_i, Y_i}; g_S carries the factor 1/2 of the quadratic convention");
    e.lattices.push(LatticeFixture {
        lattice: Lattice::scaled_basis(
            "Gamma_1,2",
            &[q(1), q(2), q(1), q(1), q(1)],
            Chart::HeisenbergMatrix { m: 2 },
        )?,
        integrals: owned(&[("f1", "quot(right:X1 / lin:Z)"), ("f2", "quot(right:X2 / lin:Z)")]),
    });
    Ok(e)
}

/// `h_{2m+1}` with basis `X1..Xm, Y1..Ym, Z`, `[X_i, Y_i] = Z`.
fn heisenberg(m: usize) -> Result<CatalogEntry> {
    let n = 2 * m + 1;
    let name = format!("h{n}");
    let br: Vec<(usize, usize, usize, i64)> = (1..=m).map(|i| (i, m + i, n, 1)).collect();
    let mut labels: Vec<String> = (1..=m).map(|i| format!("X{i}")).collect();
    labels.extend((1..=m).map(|i| format!("Y{i}")));
    labels.push("Z".into());
    let alg = LieAlgebra::new(name.clone(), n, &int_brackets(&br), None, BTreeMap::new())?.with_labels(labels)?;
    let mut e = CatalogEntry::new(name, alg)
        .expect("step", 2)
        .expect("center_dim", 1)
        .expect("derivation_dim", m * m)
        .expect("killing_dim", m * m + 1);
    let mut set = vec![("f_Z".to_string(), "lin:Z".to_string())];
    for i in 1..=m {
        set.push((format!("f_X{i}*"), format!("right:X{i}")));
    }
    for i in 1..=m {
        let mut d = vec![0; n];
        d[i - 1] = 1;
        d[m + i - 1] = 1;
        e = e.matrix(&format!("S{i}"), diag(&d), false);
        set.push((format!("g_S{i}"), format!("quad:S{i}")));
    }
    e.complete_set = Some(set);
    let law: Option<Law> = match m {
        1 => Some(h3_law),
        2 => Some(h5_law),
        _ => None,
    };
    if let Some(product) = law {
        e.laws.push(CoordinateLaw {
            group: format!("H{n}"),
            chart: Chart::HeisenbergMatrix { m },
            product,
        });
    }
    Ok(e)
}

fn n1() -> Result<CatalogEntry> {
    let alg = mk("n1", 5, &[(1, 2, 3, 1), (1, 3, 5, 1), (2, 4, 5, 1)], None)?;
    Ok(CatalogEntry::new("n1", alg)
        .matrix("D", rotation(5, 1, 2), true)
        .set(&[
            ("E", "E"),
            ("f_e3*", "right:e3"),
            ("f_e4*", "right:e4"),
            ("f_e5", "lin:e5"),
            ("f_D*", "der:D"),
        ])
        .dense("y5 != 0 and (x1 != 0 or x2 != 0)", |w, y| y[4] != 0.0 && (w[0] != 0.0 || w[1] != 0.0))
        .expect("step", 3)
        .expect("center_dim", 1)
        .expect("derivation_dim", 2)
        .expect("killing_dim", 2)
        .family(
            "De1 = a e2, De2 = -a e1 + b e4, De4 = -b e2",
            FamilyKind::Derivation,
            FamilyMatch::SameSpan,
            vec![rotation(5, 1, 2), rotation(5, 2, 4)],
        )
        .law("N1", Chart::Exponential, n1_law)
        .note("D: e1 -> e2, e2 -> -e1 is taken as displayed; it fails D[e1,e3] = [De1,e3] + [e1,De3]"))
}

fn n2() -> Result<CatalogEntry> {
    let alg = mk("n2", 4, &[(1, 2, 3, 1), (1, 3, 4, 1)], None)?;
    Ok(CatalogEntry::new("n2", alg)
        .set(&[("E", "E"), ("f_e2*", "right:e2"), ("f_e3*", "right:e3"), ("f_e4*", "right:e4")])
        .dense("<Y,e1> != 0", |_, y| y[0] != 0.0)
        .expect("step", 3)
        .expect("center_dim", 1)
        .expect("derivation_dim", 0)
        .expect("killing_dim", 3)
        .law("N2", Chart::Exponential, n2_law)
        .note("the displayed coordinate law carries only the x1/12 correction and is not associative; exponential coordinates give e2* = e2 - x1 e3 + 1/2 x1^2 e4"))
}

fn n3() -> Result<CatalogEntry> {
    let alg = mk("n3", 5, &[(1, 2, 4, 1), (1, 3, 5, 1)], None)?;
    let x = xvars(5);
    let c = |v: Q| cq(5, v);
    let mut g: Matrix<Polynomial> = Matrix::zeros(5, 5);
    let quarter = qf(1, 4);
    g[(0, 0)] = c(q(1)) + (&x[1] * &x[1] + &x[2] * &x[2]).scale_by(&quarter);
    g[(1, 1)] = c(q(1)) + (&x[0] * &x[0]).scale_by(&quarter);
    g[(2, 2)] = g[(1, 1)].clone();
    g[(3, 3)] = c(q(1));
    g[(4, 4)] = c(q(1));
    let sym = |g: &mut Matrix<Polynomial>, i: usize, j: usize, p: Polynomial| {
        g[(i, j)] = p.clone();
        g[(j, i)] = p;
    };
    sym(&mut g, 0, 1, (&x[0] * &x[1]).scale_by(&-quarter.clone()));
    sym(&mut g, 0, 2, (&x[0] * &x[2]).scale_by(&-quarter.clone()));
    sym(&mut g, 0, 3, x[1].scale_by(&half()));
    sym(&mut g, 0, 4, x[2].scale_by(&half()));
    sym(&mut g, 1, 3, x[0].scale_by(&-half()));
    sym(&mut g, 2, 4, x[0].scale_by(&-half()));
    let mut e = CatalogEntry::new("n3", alg)
        .set(&[
            ("E", "E"),
            ("f_e4", "lin:e4"),
            ("f_e5", "lin:e5"),
            ("f_e2*", "right:e2"),
            ("f_e3*", "right:e3"),
        ])
        .dense("<Y,e1> != 0", |_, y| y[0] != 0.0)
        .expect("step", 2)
        .expect("center_dim", 2)
        .expect("derivation_dim", 1)
        .expect("killing_dim", 5)
        .law("N3", Chart::Exponential, n3_law)
        .note("f3 is displayed on a lattice labelled Lambda_(r,r1,r2,m1,m2) while only Lambda_r is defined; the fixture uses Lambda_r");
    e.metrics.push(CoordinateMetric {
        chart: Chart::Exponential,
        entries: g,
    });
    e.lattices.push(n3_lattice(&q(2))?);
    Ok(e)
}

/// `Λ_r = rℤ × ℤ⁴` with `f2 = quot(f_{e2*} / f_{e4})`, `f3 = quot(f_{e3*} / f_{e5})`.
pub fn n3_lattice(r: &Q) -> Result<LatticeFixture> {
    Ok(LatticeFixture {
        lattice: Lattice::scaled_basis(
            format!("Lambda_{}", format_q(r)),
            &[r.clone(), q(1), q(1), q(1), q(1)],
            Chart::Exponential,
        )?,
        integrals: owned(&[("f2", "quot(right:e2 / lin:e4)"), ("f3", "quot(right:e3 / lin:e5)")]),
    })
}

fn n23() -> Result<CatalogEntry> {
    let alg = mk("n23free", 5, &[(1, 2, 3, 1), (1, 3, 4, 1), (2, 3, 5, 1)], None)?;
    let s = sparse(5, &[(1, 5, 1), (5, 1, 1), (2, 4, -1), (4, 2, -1), (3, 3, 1)]);
    let a = sparse(5, &[(1, 1, 1), (2, 2, 1), (1, 5, -1), (5, 1, -1), (2, 4, 1), (4, 2, 1)]);
    let b = sparse(5, &[(1, 5, 1), (5, 1, 1), (3, 3, 1), (2, 4, -1), (4, 2, -1)]);
    let c = sparse(5, &[(4, 4, 1)]);
    let d = sparse(5, &[(4, 5, 1), (5, 4, 1)]);
    let f = sparse(5, &[(5, 5, 1)]);
    let der = rotation(5, 1, 2).add(&rotation(5, 4, 5));
    Ok(CatalogEntry::new("n23free", alg)
        .matrix("S", s, false)
        .set(&[
            ("E", "E"),
            ("f_e3*", "right:e3"),
            ("f_e4", "lin:e4"),
            ("f_e5", "lin:e5"),
            ("g_S", "quad:S"),
        ])
        .dense("<Y,e4> != 0 and <Y,e2><Y,e5> + <Y,e1><Y,e4> != 0", |_, y| {
            y[3] != 0.0 && y[1] * y[4] + y[0] * y[3] != 0.0
        })
        .expect("step", 3)
        .expect("center_dim", 2)
        .expect("derivation_dim", 1)
        .expect("killing_dim", 5)
        .family(
            "De1 = a e2, De2 = -a e1, De4 = a e5, De5 = -a e4",
            FamilyKind::Derivation,
            FamilyMatch::SameSpan,
            vec![der],
        )
        .family("Killing family in a, b, c, d, f", FamilyKind::Killing, FamilyMatch::SameSpan, vec![a, b, c, d, f])
        .law("N2,3", Chart::Exponential, n23_law)
        .note("the Killing family lists parameters a,b,c,d,e,f but the matrix uses a,b,c,d,f; the solver dimension 5 is authoritative")
        .note("the displayed coordinate law carries only x1/12 and x2/12 corrections and is not associative"))
}

fn n6_10() -> Result<CatalogEntry> {
    let alg = mk("n6_10", 6, &[(1, 2, 3, 1), (1, 3, 6, 1), (4, 5, 6, 1)], None)?;
    let s = sparse(6, &[(1, 1, 1), (2, 2, 1), (2, 6, 1), (6, 2, 1)]);
    Ok(CatalogEntry::new("n6_10", alg)
        .matrix("D", rotation(6, 1, 4), true)
        .matrix("D45", rotation(6, 4, 5), false)
        .matrix("S", s, false)
        .set(&[
            ("E", "E"),
            ("f_D*", "der:D"),
            ("f_e2*", "right:e2"),
            ("f_e3*", "right:e3"),
            ("f_e5*", "right:e5"),
            ("f_e6*", "right:e6"),
        ])
        .repaired(&[
            ("E", "E"),
            ("f_D45*", "der:D45"),
            ("f_e2*", "right:e2"),
            ("f_e3*", "right:e3"),
            ("f_e6", "lin:e6"),
            ("g_S", "quad:S"),
        ])
        .expect("step", 3)
        .expect("center_dim", 1)
        .expect("derivation_dim", 1)
        .expect("killing_dim", 4)
        .note("D: e1 -> e4, e4 -> -e1 is taken as displayed; it is not a derivation"))
}

fn n6_19(eps: Q) -> Result<CatalogEntry> {
    let name = eps_name("n6_19", &eps);
    let mut br = int_brackets(&[(1, 2, 4, 1), (1, 3, 5, 1), (2, 4, 6, 1)]);
    if eps != q(0) {
        br.push((3, 5, 6, eps.clone()));
    }
    let alg = mk_q(&name, 6, &br, None, eps_params(&eps))?;
    let center = if eps == q(0) { 2 } else { 1 };
    let mut e = CatalogEntry::new(&name, alg).expect("step", 3).expect("center_dim", center);
    let oracle: &[(i64, usize, usize)] = &[(-1, 0, 3), (0, 0, 4), (1, 1, 4), (2, 0, 3)];
    if let Some((_, d, k)) = oracle.iter().find(|(v, _, _)| q(*v) == eps) {
        e = e.expect("derivation_dim", *d).expect("killing_dim", *k);
    }
    if eps == q(0) {
        let blocks = vec![
            diag(&[1, 1, 1, 1, 0, 0]),
            sparse(6, &[(5, 5, 1)]),
            sparse(6, &[(5, 6, 1), (6, 5, 1)]),
            sparse(6, &[(6, 6, 1)]),
        ];
        Ok(e.matrix("D", rotation(6, 1, 2), true)
            .set(&[
                ("E", "E"),
                ("f_e3*", "right:e3"),
                ("f_e4*", "right:e4"),
                ("f_e5*", "right:e5"),
                ("f_e6*", "right:e6"),
                ("f_D*", "der:D"),
            ])
            .family("a Id on e1..e4 plus a symmetric block on e5, e6", FamilyKind::Killing, FamilyMatch::SameSpan, blocks)
            .note("D: e1 -> e2, e2 -> -e1 is taken as displayed; it is not a derivation"))
    } else {
        let mut s1 = Matrix::zeros(6, 6);
        s1[(3, 3)] = eps.clone();
        s1[(4, 4)] = q(1);
        s1[(0, 5)] = eps.clone();
        s1[(5, 0)] = eps.clone();
        e = e
            .matrix("S1", s1.clone(), false)
            .set(&[
                ("E", "E"),
                ("f_e3*", "right:e3"),
                ("f_e4*", "right:e4"),
                ("f_e5*", "right:e5"),
                ("f_e6*", "right:e6"),
                ("g_S1", "quad:S1"),
            ])
            .family("S1 (alpha = 0, gamma = 1, delta = 0)", FamilyKind::Killing, FamilyMatch::Contains, vec![s1])
            .note("[e3,e5] = eps e6 makes {f_e3*, f_e5*} = eps f_e6, so the displayed set is not in involution for eps != 0");
        if eps == q(1) {
            e = e
                .matrix("S25", sparse(6, &[(2, 5, 1), (5, 2, 1), (3, 4, -1), (4, 3, -1)]), false)
                .repaired(&[
                    ("E", "E"),
                    ("f_e1*", "right:e1"),
                    ("f_e4*", "right:e4"),
                    ("f_e5*", "right:e5"),
                    ("f_e6", "lin:e6"),
                    ("g_S25", "quad:S25"),
                ]);
        }
        Ok(e)
    }
}

fn n6_20() -> Result<CatalogEntry> {
    let alg = mk("n6_20", 6, &[(1, 2, 4, 1), (1, 3, 5, 1), (1, 5, 6, 1), (2, 4, 6, 1)], None)?;
    Ok(CatalogEntry::new("n6_20", alg)
        .matrix("D", rotation(6, 1, 2), true)
        .set(&[
            ("E", "E"),
            ("f_D*", "der:D"),
            ("f_e3*", "right:e3"),
            ("f_e4*", "right:e4"),
            ("f_e5*", "right:e5"),
            ("f_e6*", "right:e6"),
        ])
        .expect("step", 3)
        .expect("center_dim", 1)
        .expect("derivation_dim", 0)
        .expect("killing_dim", 3)
        .note("D: e1 -> e2, e2 -> -e1 is taken as displayed; it is not a derivation"))
}

/// `−(z5²+z6²)[v1²+v4²+(1+ε)(v2²+v3²)] + 2(1+ε) z5 z6 [v1 v4 − v2 v3]` with `v_i = y_i`, `z_k = y_k`.
pub fn n6_22_display(eps: &Q) -> Polynomial {
    let (_, y) = tangent_variables(6);
    let one_eps = q(1) + eps;
    let sq = |p: &Polynomial| p * p;
    let z = &sq(&y[4]) + &sq(&y[5]);
    let v = &(&sq(&y[0]) + &sq(&y[3])) + &(&sq(&y[1]) + &sq(&y[2])).scale_by(&one_eps);
    let mixed = &(&y[0] * &y[3]) - &(&y[1] * &y[2]);
    let cross = (&(&y[4] * &y[5]) * &mixed).scale_by(&(q(2) * &one_eps));
    &(-(&z * &v)) + &cross
}

fn n6_22(eps: Q) -> Result<CatalogEntry> {
    let name = eps_name("n6_22", &eps);
    let mut br = int_brackets(&[(1, 2, 5, 1), (1, 3, 6, 1), (3, 4, 5, 1)]);
    if eps != q(0) {
        br.push((2, 4, 6, eps.clone()));
    }
    let alg = mk_q(&name, 6, &br, None, eps_params(&eps))?;
    let mut e = CatalogEntry::new(&name, alg)
        .set(&[
            ("E", "E"),
            ("g_1", "butler:1"),
            ("f_e1*", "right:e1"),
            ("f_e4*", "right:e4"),
            ("f_e5", "lin:e5"),
            ("f_e6", "lin:e6"),
        ])
        .expect("step", 2)
        .expect("center_dim", 2);
    let oracle: &[(i64, usize, usize)] = &[(-1, 4, 4), (0, 1, 4), (1, 2, 5), (2, 1, 4)];
    if let Some((_, d, k)) = oracle.iter().find(|(v, _, _)| q(*v) == eps) {
        e = e.expect("derivation_dim", *d).expect("killing_dim", *k);
    }
    e.butler_display = Some(n6_22_display(&eps));
    Ok(e)
}

fn n6_23() -> Result<CatalogEntry> {
    let alg = mk("n6_23", 6, &[(1, 2, 3, 1), (1, 3, 5, 1), (1, 4, 6, 1), (2, 4, 5, 1)], None)?;
    Ok(CatalogEntry::new("n6_23", alg)
        .expect("step", 3)
        .expect("center_dim", 2)
        .expect("derivation_dim", 0)
        .expect("killing_dim", 4)
        .family("no non-trivial skew derivation", FamilyKind::Derivation, FamilyMatch::SameSpan, vec![])
        .family(
            "a on e1, e2, e4; b on e3; symmetric block on e5, e6",
            FamilyKind::Killing,
            FamilyMatch::SameSpan,
            vec![
                diag(&[1, 1, 0, 1, 0, 0]),
                sparse(6, &[(3, 3, 1)]),
                sparse(6, &[(5, 5, 1)]),
                sparse(6, &[(5, 6, 1), (6, 5, 1)]),
                sparse(6, &[(6, 6, 1)]),
            ],
        )
        .note("no complete set is claimed"))
}

fn n6_24(eps: Q) -> Result<CatalogEntry> {
    let name = eps_name("n6_24", &eps);
    let mut br = int_brackets(&[(1, 2, 3, 1), (1, 3, 5, 1), (2, 3, 6, 1), (2, 4, 5, 1)]);
    if eps != q(0) {
        br.push((1, 4, 6, eps.clone()));
    }
    br.sort_by_key(|b| (b.0, b.1));
    let alg = mk_q(&name, 6, &br, None, eps_params(&eps))?;
    let mut e = CatalogEntry::new(&name, alg)
        .expect("step", 3)
        .expect("center_dim", 2)
        .family(
            "a Id on e1..e4 plus a symmetric block on e5, e6",
            FamilyKind::Killing,
            FamilyMatch::SameSpan,
            vec![
                diag(&[1, 1, 1, 1, 0, 0]),
                sparse(6, &[(5, 5, 1)]),
                sparse(6, &[(5, 6, 1), (6, 5, 1)]),
                sparse(6, &[(6, 6, 1)]),
            ],
        )
        .note("no complete set is claimed");
    let oracle: &[(i64, usize, usize)] = &[(-1, 1, 4), (0, 0, 4), (2, 0, 4)];
    if let Some((_, d, k)) = oracle.iter().find(|(v, _, _)| q(*v) == eps) {
        e = e.expect("derivation_dim", *d).expect("killing_dim", *k);
    }
    if eps == q(-1) {
        e = e
            .family(
                "De1 = -a e2, De2 = a e1, De5 = -a e6, De6 = a e5",
                FamilyKind::Derivation,
                FamilyMatch::SameSpan,
                vec![rotation(6, 2, 1).add(&rotation(6, 6, 5))],
            )
            .note("a complete set is asserted for eps = -1 but none is exhibited");
    } else if eps == q(0) {
        e = e.family(
            "De2 = -a e4, De4 = a e2",
            FamilyKind::Derivation,
            FamilyMatch::SameSpan,
            vec![rotation(6, 4, 2)],
        );
    } else {
        e = e.note("f_T = E - f_e5^2 - f_e6^2 and the accompanying dependence claim are not encoded");
    }
    Ok(e)
}

fn n6_25() -> Result<CatalogEntry> {
    let alg = mk("n6_25", 6, &[(1, 2, 3, 1), (1, 3, 5, 1), (1, 4, 6, 1)], None)?;
    Ok(CatalogEntry::new("n6_25", alg)
        .set(&[
            ("E", "E"),
            ("f_e2*", "right:e2"),
            ("f_e3*", "right:e3"),
            ("f_e4*", "right:e4"),
            ("f_e5*", "right:e5"),
            ("f_e6*", "right:e6"),
        ])
        .expect("step", 3)
        .expect("center_dim", 2)
        .expect("derivation_dim", 0)
        .expect("killing_dim", 6))
}

fn n6_26() -> Result<CatalogEntry> {
    let alg = mk("n6_26", 6, &[(1, 2, 4, 1), (1, 3, 5, 1), (2, 3, 6, 1)], None)?;
    let s = sparse(6, &[(1, 6, 2), (6, 1, 2), (2, 5, -2), (5, 2, -2), (3, 4, 2), (4, 3, 2)]);
    Ok(CatalogEntry::new("n6_26", alg)
        .matrix("S", s.clone(), false)
        .set(&[
            ("E", "E"),
            ("f_e2*", "right:e2"),
            ("f_e4", "lin:e4"),
            ("f_e5", "lin:e5"),
            ("f_e6", "lin:e6"),
            ("g_S", "quad:S"),
        ])
        .expect("step", 2)
        .expect("center_dim", 3)
        .expect("derivation_dim", 3)
        .expect("killing_dim", 8)
        .family("S with g_S = 2(y1 y6 - y2 y5 + y3 y4)", FamilyKind::Killing, FamilyMatch::Contains, vec![s])
        .note("the quadratic q = 2(y1 y6 - y2 y5 + y3 y4) is absorbed into S under g_S = 1/2 <Y, SY>"))
}

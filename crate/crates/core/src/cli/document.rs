//! JSON documents. Every number is a decimal string; tuples are sorted
//! arrays of positions into `index_set`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coherence::Family;
use crate::complexes::{MeetSemilattice, PosetSystem};
use crate::deltasys::{PartitionInstance, SetFamily, UniformWitness};
use crate::error::{Error, Result};
use crate::exactalg::{Domain, Int, Matrix, Rat, Scalar};
use crate::omega::{IndexFunction, InverseSystem, NegligibleIdeal, OmegaSystem};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_set: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_instance: Option<PartitionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsDoc>,
}

/// `kind` is `"omega"` (towers of groups indexed by levels) or
/// `"semilattice"` (a finite meet-semilattice given by `elements` and
/// generating `order` pairs `[lower, upper]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub kind: String,
    pub domain: String,
    pub kappa: String,
    /// Omega: the top level of each column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<String>>,
    /// Omega: ranks per column and level. Semilattice: block ranks per
    /// element.
    pub groups: Vec<Vec<String>>,
    /// Omega: `bonds[α][k]` is the matrix from level `k+1` to level `k`.
    /// Semilattice: a list of `{"from", "to", "matrix"}` along covers.
    pub bonds: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[String; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub arity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<Value>,
    /// Missing tuples are zero.
    pub values: Vec<FamilyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub tuple: Vec<String>,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub a: Vec<String>,
    pub n: String,
    #[serde(default)]
    pub s: Vec<ColumnSet>,
    pub f: Vec<SelectorEntry>,
    pub beta: Vec<ColumnSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSet {
    pub set: Vec<String>,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorEntry {
    pub column: String,
    pub set: Vec<String>,
    pub point: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaDoc {
    pub n: String,
    pub h: Vec<String>,
    pub u: Vec<SetEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Vec<ColorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetEntry {
    pub tuple: Vec<String>,
    pub set: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub rho: String,
    pub roots: Vec<RootEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootEntry {
    pub pattern: Vec<String>,
    pub root: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorEntry {
    pub tuple: Vec<String>,
    pub color: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<String>,
    /// Positions of the points a propagation should reach.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<String>>,
}

impl Document {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Parse every section into typed values.
    pub fn load(&self) -> Result<Loaded> {
        let problem = match &self.system {
            None => {
                if self.index_set.is_some() || self.family.is_some() || self.partition_instance.is_some() {
                    return Err(Error::parse("system", "index_set, family and partition_instance need a system"));
                }
                None
            }
            Some(sys) => Some(match (sys.kind.as_str(), sys.domain.as_str()) {
                ("omega", "int") => AnyProblem::OmegaInt(Problem::load(self, sys)?),
                ("omega", "rat") => AnyProblem::OmegaRat(Problem::load(self, sys)?),
                ("semilattice", "int") => AnyProblem::PosetInt(Problem::load(self, sys)?),
                ("semilattice", "rat") => AnyProblem::PosetRat(Problem::load(self, sys)?),
                ("omega" | "semilattice", d) => return Err(Error::parse("system.domain", format!("unknown domain {d:?}"))),
                (k, _) => return Err(Error::parse("system.kind", format!("unknown kind {k:?}"))),
            }),
        };
        let partition = match &self.partition_instance {
            None => None,
            Some(p) => {
                let points = match &problem {
                    Some(AnyProblem::OmegaInt(pr)) => pr.index_set.clone(),
                    Some(AnyProblem::OmegaRat(pr)) => pr.index_set.clone(),
                    _ => return Err(Error::parse("partition_instance", "partition instances need an omega system")),
                };
                Some(load_partition(p, points)?)
            }
        };
        let delta = self.delta.as_ref().map(load_delta).transpose()?;
        let options = match &self.options {
            None => Options::default(),
            Some(o) => Options {
                n_max: o.n_max.as_deref().map(|s| num(s, "options.n_max")).transpose()?,
                target: o.target.as_ref().map(|t| positions(t, "options.target")).transpose()?,
            },
        };
        Ok(Loaded {
            problem,
            partition,
            delta,
            options,
        })
    }

    /// `serialize(parse(self))`.
    pub fn normalized(&self) -> Result<Document> {
        Ok(self.load()?.to_document())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub n_max: Option<usize>,
    pub target: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaInput {
    pub n: usize,
    pub h: Vec<usize>,
    pub u: SetFamily,
    pub witness: Option<UniformWitness>,
    pub color: Option<BTreeMap<Vec<usize>, usize>>,
    pub target: Option<usize>,
}

/// A system with the data living on it.
#[derive(Clone, Debug)]
pub struct Problem<S: InverseSystem> {
    pub system: S,
    pub index_set: Vec<S::Index>,
    pub ideal: NegligibleIdeal,
    pub family: Option<Family<S::Index, S::Scalar>>,
}

#[derive(Clone, Debug)]
pub enum AnyProblem {
    OmegaInt(Problem<OmegaSystem<Int>>),
    OmegaRat(Problem<OmegaSystem<Rat>>),
    PosetInt(Problem<PosetSystem<Int>>),
    PosetRat(Problem<PosetSystem<Rat>>),
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub problem: Option<AnyProblem>,
    pub partition: Option<PartitionInstance>,
    pub delta: Option<DeltaInput>,
    pub options: Options,
}

impl Loaded {
    pub fn to_document(&self) -> Document {
        let mut doc = Document::default();
        match &self.problem {
            Some(AnyProblem::OmegaInt(p)) => p.write(&mut doc),
            Some(AnyProblem::OmegaRat(p)) => p.write(&mut doc),
            Some(AnyProblem::PosetInt(p)) => p.write(&mut doc),
            Some(AnyProblem::PosetRat(p)) => p.write(&mut doc),
            None => {}
        }
        doc.partition_instance = self.partition.as_ref().map(partition_doc);
        doc.delta = self.delta.as_ref().map(delta_doc);
        if self.options != Options::default() {
            doc.options = Some(OptionsDoc {
                n_max: self.options.n_max.map(|n| n.to_string()),
                target: self.options.target.as_ref().map(|t| strs(t)),
            });
        }
        doc
    }
}

/// Conversion between a system and its document section.
pub trait DocSystem: InverseSystem + Sized {
    fn from_doc(doc: &SystemDoc) -> Result<Self>;
    fn to_doc(&self) -> SystemDoc;
    fn index_from_doc(&self, v: &Value, loc: &str) -> Result<Self::Index>;
    fn index_to_doc(&self, x: &Self::Index) -> Value;
}

fn num(s: &str, loc: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::parse(loc, format!("expected a nonnegative decimal integer, found {s:?}")))
}

fn positions(v: &[String], loc: &str) -> Result<Vec<usize>> {
    v.iter().enumerate().map(|(i, s)| num(s, &format!("{loc}[{i}]"))).collect()
}

fn sorted_positions(v: &[String], loc: &str) -> Result<Vec<usize>> {
    let p = positions(v, loc)?;
    if p.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parse(loc, "expected a strictly increasing array"));
    }
    Ok(p)
}

fn strs(v: &[usize]) -> Vec<String> {
    v.iter().map(usize::to_string).collect()
}

fn scalar<T: Scalar>(s: &str, loc: &str) -> Result<T> {
    T::parse_decimal(s).ok_or_else(|| Error::parse(loc, format!("cannot read {s:?} as an element of {}", T::DOMAIN)))
}

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::Int => "int",
        Domain::Rat => "rat",
    }
}

fn matrix_from<T: Scalar>(v: &Value, rows: usize, cols: usize, loc: &str) -> Result<Matrix<T>> {
    let arr = v.as_array().ok_or_else(|| Error::parse(loc, "expected an array of rows"))?;
    if arr.len() != rows {
        return Err(Error::parse(loc, format!("expected {rows} rows, found {}", arr.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::parse(format!("{loc}[{i}]"), "expected an array"))?;
        if row.len() != cols {
            return Err(Error::parse(format!("{loc}[{i}]"), format!("expected {cols} entries, found {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            let at = format!("{loc}[{i}][{j}]");
            let s = e.as_str().ok_or_else(|| Error::parse(&at, "numbers must be decimal strings"))?;
            data.push(scalar(s, &at)?);
        }
    }
    Matrix::from_vec(rows, cols, data)
}

fn matrix_to<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

impl<T: Scalar> DocSystem for OmegaSystem<T> {
    fn from_doc(doc: &SystemDoc) -> Result<Self> {
        let kappa = num(&doc.kappa, "system.kappa")?;
        let heights = positions(doc.heights.as_deref().ok_or_else(|| Error::parse("system.heights", "missing"))?, "system.heights")?;
        if heights.len() != kappa || doc.groups.len() != kappa {
            return Err(Error::parse("system", format!("heights and groups must have kappa = {kappa} columns")));
        }
        let mut ranks = Vec::new();
        for (a, (g, &h)) in doc.groups.iter().zip(&heights).enumerate() {
            let r = positions(g, &format!("system.groups[{a}]"))?;
            if r.len() != h + 1 {
                return Err(Error::parse(format!("system.groups[{a}]"), format!("expected {} levels", h + 1)));
            }
            ranks.push(r);
        }
        let towers = doc.bonds.as_array().ok_or_else(|| Error::parse("system.bonds", "expected one array per column"))?;
        if towers.len() != kappa {
            return Err(Error::parse("system.bonds", format!("expected {kappa} columns")));
        }
        let mut bonds = Vec::new();
        for (a, tower) in towers.iter().enumerate() {
            let loc = format!("system.bonds[{a}]");
            let tower = tower.as_array().ok_or_else(|| Error::parse(&loc, "expected an array of matrices"))?;
            if tower.len() != heights[a] {
                return Err(Error::parse(&loc, format!("expected {} bonds", heights[a])));
            }
            bonds.push(
                tower
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix_from(m, ranks[a][k], ranks[a][k + 1], &format!("{loc}[{k}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        OmegaSystem::new(ranks, bonds).map_err(|e| Error::parse("system", e.to_string()))
    }

    fn to_doc(&self) -> SystemDoc {
        SystemDoc {
            kind: "omega".into(),
            domain: domain_name(T::DOMAIN).into(),
            kappa: self.kappa().to_string(),
            heights: Some(strs(&self.heights())),
            groups: self.ranks().iter().map(|r| strs(r)).collect(),
            bonds: Value::Array(
                self.one_step_bonds()
                    .iter()
                    .map(|t| Value::Array(t.iter().map(matrix_to).collect()))
                    .collect(),
            ),
            elements: None,
            order: None,
        }
    }

    fn index_from_doc(&self, v: &Value, loc: &str) -> Result<IndexFunction> {
        let arr: Vec<String> = serde_json::from_value(v.clone())
            .map_err(|_| Error::parse(loc, "an index function is an array of decimal strings"))?;
        let f = IndexFunction::new(positions(&arr, loc)?);
        self.check_index(&f).map_err(|e| Error::parse(loc, e.to_string()))?;
        Ok(f)
    }

    fn index_to_doc(&self, x: &IndexFunction) -> Value {
        Value::Array(x.0.iter().map(|v| Value::String(v.to_string())).collect())
    }
}

impl<T: Scalar> DocSystem for PosetSystem<T> {
    fn from_doc(doc: &SystemDoc) -> Result<Self> {
        let kappa = num(&doc.kappa, "system.kappa")?;
        let names = doc.elements.clone().ok_or_else(|| Error::parse("system.elements", "missing"))?;
        let find = |s: &str, loc: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::parse(loc, format!("unknown element {s:?}")))
        };
        let mut relations = Vec::new();
        for (i, [lo, hi]) in doc.order.iter().flatten().enumerate() {
            let loc = format!("system.order[{i}]");
            relations.push((find(lo, &loc)?, find(hi, &loc)?));
        }
        let lattice = MeetSemilattice::from_order(names.clone(), &relations).map_err(|e| Error::parse("system.order", e.to_string()))?;
        if doc.groups.len() != names.len() {
            return Err(Error::parse("system.groups", format!("expected one entry per element ({})", names.len())));
        }
        let mut block_ranks = Vec::new();
        for (e, g) in doc.groups.iter().enumerate() {
            let r = positions(g, &format!("system.groups[{e}]"))?;
            if r.len() != kappa {
                return Err(Error::parse(format!("system.groups[{e}]"), format!("expected {kappa} column ranks")));
            }
            block_ranks.push(r);
        }
        let list = doc.bonds.as_array().ok_or_else(|| Error::parse("system.bonds", "expected a list of bonds"))?;
        let mut given = Vec::new();
        for (i, b) in list.iter().enumerate() {
            let loc = format!("system.bonds[{i}]");
            let field = |k: &str| {
                b.get(k)
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::parse(&loc, format!("missing string field {k:?}")))
            };
            let (y, x) = (find(field("from")?, &loc)?, find(field("to")?, &loc)?);
            let m = b.get("matrix").ok_or_else(|| Error::parse(&loc, "missing field \"matrix\""))?;
            let rank = |e: usize| block_ranks[e].iter().sum::<usize>();
            given.push(((y, x), matrix_from(m, rank(x), rank(y), &format!("{loc}.matrix"))?));
        }
        PosetSystem::from_bonds(lattice, block_ranks, given).map_err(|e| Error::parse("system.bonds", e.to_string()))
    }

    fn to_doc(&self) -> SystemDoc {
        let names = self.lattice().names();
        let mut covers = self.lattice().covers();
        covers.sort();
        let bonds = self
            .cover_bonds()
            .into_iter()
            .map(|((y, x), m)| {
                serde_json::json!({"from": names[y], "to": names[x], "matrix": matrix_to(&m)})
            })
            .collect();
        SystemDoc {
            kind: "semilattice".into(),
            domain: domain_name(T::DOMAIN).into(),
            kappa: self.kappa().to_string(),
            heights: None,
            groups: self.all_block_ranks().iter().map(|r| strs(r)).collect(),
            bonds: Value::Array(bonds),
            elements: Some(names.to_vec()),
            order: Some(covers.into_iter().map(|(x, y)| [names[x].clone(), names[y].clone()]).collect()),
        }
    }

    fn index_from_doc(&self, v: &Value, loc: &str) -> Result<usize> {
        let s = v.as_str().ok_or_else(|| Error::parse(loc, "a semilattice point is an element name"))?;
        self.lattice()
            .index_of(s)
            .ok_or_else(|| Error::parse(loc, format!("unknown element {s:?}")))
    }

    fn index_to_doc(&self, x: &usize) -> Value {
        Value::String(self.lattice().names()[*x].clone())
    }
}

impl<S: DocSystem> Problem<S> {
    fn load(doc: &Document, sys: &SystemDoc) -> Result<Self> {
        let system = S::from_doc(sys)?;
        let index_set = doc
            .index_set
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, v)| system.index_from_doc(v, &format!("index_set[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if index_set.iter().collect::<BTreeSet<_>>().len() != index_set.len() {
            return Err(Error::parse("index_set", "points must be distinct"));
        }
        let ideal = match &doc.ideal {
            None => NegligibleIdeal::empty(),
            Some(cols) => NegligibleIdeal::new(positions(cols, "ideal")?, system.kappa()).map_err(|e| Error::parse("ideal", e.to_string()))?,
        };
        let family = doc.family.as_ref().map(|f| load_family(&system, &index_set, f)).transpose()?;
        Ok(Problem {
            system,
            index_set,
            ideal,
            family,
        })
    }

    fn write(&self, doc: &mut Document) {
        doc.system = Some(self.system.to_doc());
        doc.index_set = Some(self.index_set.iter().map(|x| self.system.index_to_doc(x)).collect());
        if !self.ideal.columns().is_empty() {
            doc.ideal = Some(self.ideal.columns().iter().map(usize::to_string).collect());
        }
        doc.family = self.family.as_ref().map(|f| family_doc(&self.system, f));
    }
}

fn load_family<S: DocSystem>(system: &S, points: &[S::Index], f: &FamilyDoc) -> Result<Family<S::Index, S::Scalar>> {
    let arity = num(&f.arity, "family.arity")?;
    let cap = f.cap.as_ref().map(|c| system.index_from_doc(c, "family.cap")).transpose()?;
    let mut fam = Family::zero(system, points.to_vec(), cap, arity).map_err(|e| Error::parse("family", e.to_string()))?;
    for (i, e) in f.values.iter().enumerate() {
        let loc = format!("family.values[{i}]");
        let t = sorted_positions(&e.tuple, &format!("{loc}.tuple"))?;
        let v = e
            .value
            .iter()
            .enumerate()
            .map(|(j, s)| scalar(s, &format!("{loc}.value[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        fam.set(&t, v).map_err(|e| Error::parse(&loc, e.to_string()))?;
    }
    Ok(fam)
}

/// Only nonzero values are written.
pub fn family_doc<S: DocSystem>(system: &S, f: &Family<S::Index, S::Scalar>) -> FamilyDoc {
    FamilyDoc {
        arity: f.arity().to_string(),
        cap: f.cap().map(|c| system.index_to_doc(c)),
        values: f
            .values()
            .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
            .map(|(t, v)| FamilyEntry {
                tuple: strs(t),
                value: v.iter().map(ToString::to_string).collect(),
            })
            .collect(),
    }
}

fn load_column_sets(v: &[ColumnSet], loc: &str) -> Result<BTreeMap<Vec<usize>, BTreeSet<usize>>> {
    let mut out = BTreeMap::new();
    for (i, e) in v.iter().enumerate() {
        let set = sorted_positions(&e.set, &format!("{loc}[{i}].set"))?;
        let cols = positions(&e.columns, &format!("{loc}[{i}].columns"))?.into_iter().collect();
        if out.insert(set, cols).is_some() {
            return Err(Error::parse(format!("{loc}[{i}]"), "repeated set"));
        }
    }
    Ok(out)
}

fn load_partition(p: &PartitionDoc, points: Vec<IndexFunction>) -> Result<PartitionInstance> {
    let kappa = points.first().map_or(0, IndexFunction::len);
    let mut f = BTreeMap::new();
    for (i, e) in p.f.iter().enumerate() {
        let loc = format!("partition_instance.f[{i}]");
        let key = (num(&e.column, &format!("{loc}.column"))?, sorted_positions(&e.set, &format!("{loc}.set"))?);
        if f.insert(key, num(&e.point, &format!("{loc}.point"))?).is_some() {
            return Err(Error::parse(loc, "repeated selector"));
        }
    }
    Ok(PartitionInstance {
        kappa,
        points,
        a: sorted_positions(&p.a, "partition_instance.a")?,
        n: num(&p.n, "partition_instance.n")?,
        s: load_column_sets(&p.s, "partition_instance.s")?,
        f,
        beta: load_column_sets(&p.beta, "partition_instance.beta")?,
    })
}

fn column_sets_doc(m: &BTreeMap<Vec<usize>, BTreeSet<usize>>) -> Vec<ColumnSet> {
    m.iter()
        .map(|(s, c)| ColumnSet {
            set: strs(s),
            columns: c.iter().map(usize::to_string).collect(),
        })
        .collect()
}

pub fn partition_doc(p: &PartitionInstance) -> PartitionDoc {
    PartitionDoc {
        a: strs(&p.a),
        n: p.n.to_string(),
        s: column_sets_doc(&p.s),
        f: p.f
            .iter()
            .map(|((c, s), v)| SelectorEntry {
                column: c.to_string(),
                set: strs(s),
                point: v.to_string(),
            })
            .collect(),
        beta: column_sets_doc(&p.beta),
    }
}

fn load_delta(d: &DeltaDoc) -> Result<DeltaInput> {
    let mut u = SetFamily::new();
    for (i, e) in d.u.iter().enumerate() {
        let loc = format!("delta.u[{i}]");
        u.insert(sorted_positions(&e.tuple, &format!("{loc}.tuple"))?, sorted_positions(&e.set, &format!("{loc}.set"))?);
    }
    let witness = match &d.witness {
        None => None,
        Some(w) => {
            let mut roots = BTreeMap::new();
            for (i, r) in w.roots.iter().enumerate() {
                let loc = format!("delta.witness.roots[{i}]");
                roots.insert(sorted_positions(&r.pattern, &format!("{loc}.pattern"))?, sorted_positions(&r.root, &format!("{loc}.root"))?);
            }
            Some(UniformWitness {
                rho: num(&w.rho, "delta.witness.rho")?,
                roots,
            })
        }
    };
    let color = match &d.color {
        None => None,
        Some(c) => Some(
            c.iter()
                .enumerate()
                .map(|(i, e)| {
                    let loc = format!("delta.color[{i}]");
                    Ok((sorted_positions(&e.tuple, &format!("{loc}.tuple"))?, num(&e.color, &format!("{loc}.color"))?))
                })
                .collect::<Result<BTreeMap<_, _>>>()?,
        ),
    };
    Ok(DeltaInput {
        n: num(&d.n, "delta.n")?,
        h: sorted_positions(&d.h, "delta.h")?,
        u,
        witness,
        color,
        target: d.target.as_deref().map(|t| num(t, "delta.target")).transpose()?,
    })
}

fn delta_doc(d: &DeltaInput) -> DeltaDoc {
    DeltaDoc {
        n: d.n.to_string(),
        h: strs(&d.h),
        u: d.u
            .iter()
            .map(|(t, s)| SetEntry {
                tuple: strs(t),
                set: strs(s),
            })
            .collect(),
        witness: d.witness.as_ref().map(|w| WitnessDoc {
            rho: w.rho.to_string(),
            roots: w
                .roots
                .iter()
                .map(|(p, r)| RootEntry {
                    pattern: strs(p),
                    root: strs(r),
                })
                .collect(),
        }),
        color: d.color.as_ref().map(|c| {
            c.iter()
                .map(|(t, k)| ColorEntry {
                    tuple: strs(t),
                    color: k.to_string(),
                })
                .collect()
        }),
        target: d.target.map(|t| t.to_string()),
    }
}

//! Problem files: a graph, optionally an action, a representation and
//! tolerance overrides, stored as JSON.
//!
//! The canonical form has sorted keys, two-space indentation, floats written
//! with 17 significant digits (`{:.16e}`), complex numbers as `[re, im]` and
//! one matrix row per line. [`Problem::to_canonical_string`] of a parsed
//! canonical file reproduces it byte for byte.
//!
//! ```json
//! {
//!   "graph": {
//!     "edges": [
//!       {
//!         "dst": "v",
//!         "id": "e1",
//!         "src": "v"
//!       }
//!     ],
//!     "vertices": ["v"]
//!   }
//! }
//! ```
//!
//! Optional blocks: `graph.truncated` (vertex ids), `action` with
//! `group {identity, inverse, table}` and per-element
//! `{vertex_perm: {v: w}, buckets: [{range, source, matrix}]}`,
//! `representation {dim, proj: {v: M}, edge_op: {e: M}, unitaries: [M]}`
//! and `tolerance {eps, eig_clip, max_dim}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::gauge::{FiniteGroup, GaugeAction};
use crate::graph::DirectedGraph;
use crate::linalg::{CMatrix, Tolerance, C64};
use crate::representation::GraphRep;

/// Tolerance fields present in a file. Absent fields fall back to defaults
/// (or command-line flags).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub eps: Option<f64>,
    pub eig_clip: Option<f64>,
    pub max_dim: Option<usize>,
}

impl ToleranceOverrides {
    fn is_empty(&self) -> bool {
        self.eps.is_none() && self.eig_clip.is_none() && self.max_dim.is_none()
    }

    /// `self` on top of `base`.
    pub fn apply(&self, base: Tolerance) -> Result<Tolerance> {
        Tolerance::new(
            self.eps.unwrap_or(base.eps),
            self.eig_clip.unwrap_or(base.eig_clip),
            self.max_dim.unwrap_or(base.max_dim),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub graph: Arc<DirectedGraph>,
    pub action: Option<Arc<GaugeAction>>,
    pub representation: Option<GraphRep>,
    pub tolerance: ToleranceOverrides,
}

impl Problem {
    pub fn new(graph: Arc<DirectedGraph>) -> Self {
        Problem {
            graph,
            action: None,
            representation: None,
            tolerance: ToleranceOverrides::default(),
        }
    }

    /// A problem holding `rep` together with its graph and action.
    pub fn from_rep(rep: GraphRep) -> Self {
        Problem {
            graph: Arc::clone(rep.graph()),
            action: rep.action().cloned(),
            representation: Some(rep),
            tolerance: ToleranceOverrides::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        from_value(&value)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_canonical_string(&self) -> Result<String> {
        let value = to_value(self)?;
        let mut out = String::new();
        emit(&value, 0, &mut out);
        out.push('\n');
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_canonical_string()?)
            .map_err(|e| Error::Configuration(format!("cannot write {}: {e}", path.display())))
    }
}

// ---------------------------------------------------------------- reading

/// A JSON value together with its dotted path, for diagnostics.
#[derive(Clone, Copy)]
struct Field<'a> {
    path: &'a str,
    value: &'a Value,
}

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("at `{path}`: {msg}"))
}

fn child_path(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl<'a> Field<'a> {
    fn object(&self, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
        let map = self
            .value
            .as_object()
            .ok_or_else(|| err(self.path, "expected an object"))?;
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(err(self.path, format!("unknown field `{k}`")));
        }
        Ok(map)
    }

    fn array(&self) -> Result<&'a Vec<Value>> {
        self.value
            .as_array()
            .ok_or_else(|| err(self.path, "expected an array"))
    }

    fn string(&self) -> Result<&'a str> {
        self.value
            .as_str()
            .ok_or_else(|| err(self.path, "expected a string"))
    }

    fn count(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| err(self.path, "expected a nonnegative integer"))
    }

    fn real(&self) -> Result<f64> {
        self.value
            .as_f64()
            .ok_or_else(|| err(self.path, "expected a number"))
    }

    fn complex(&self) -> Result<C64> {
        match self.value.as_array().map(Vec::as_slice) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(err(self.path, "complex entries must be numbers")),
            },
            _ => Err(err(self.path, "expected a complex number [re, im]")),
        }
    }

    fn matrix(&self) -> Result<CMatrix> {
        let rows = self.array()?;
        let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
        let mut m = CMatrix::zeros(rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            let row_path = format!("{}[{i}]", self.path);
            let row_field = Field { path: &row_path, value: row };
            let entries = row_field.array()?;
            if entries.len() != ncols {
                return Err(err(&row_path, format!("row has {} entries, expected {ncols}", entries.len())));
            }
            for (j, z) in entries.iter().enumerate() {
                let p = format!("{row_path}[{j}]");
                m[(i, j)] = Field { path: &p, value: z }.complex()?;
            }
        }
        Ok(m)
    }
}

fn required<'a>(map: &'a Map<String, Value>, parent: &str, key: &str) -> Result<(String, &'a Value)> {
    let path = child_path(parent, key);
    match map.get(key) {
        Some(v) => Ok((path, v)),
        None => Err(err(parent_or_root(parent), format!("missing field `{key}`"))),
    }
}

fn parent_or_root(p: &str) -> &str {
    if p.is_empty() {
        "<root>"
    } else {
        p
    }
}

/// Library errors raised while assembling parsed parts, tagged with the field.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(_) => e,
        other => err(path, other),
    }
}

fn from_value(root: &Value) -> Result<Problem> {
    let top = Field { path: "", value: root }
        .object(&["graph", "action", "representation", "tolerance"])
        .map_err(|_| err("<root>", "expected an object with a `graph` block"))?;
    let (gpath, gval) = required(top, "", "graph")?;
    let graph = Arc::new(read_graph(Field { path: &gpath, value: gval })?);

    let action = match top.get("action") {
        Some(v) => Some(Arc::new(read_action(Field { path: "action", value: v }, &graph)?)),
        None => None,
    };
    let representation = match top.get("representation") {
        Some(v) => Some(read_rep(Field { path: "representation", value: v }, &graph, action.as_ref())?),
        None => None,
    };
    let tolerance = match top.get("tolerance") {
        Some(v) => read_tolerance(Field { path: "tolerance", value: v })?,
        None => ToleranceOverrides::default(),
    };
    Ok(Problem {
        graph,
        action,
        representation,
        tolerance,
    })
}

fn read_graph(f: Field) -> Result<DirectedGraph> {
    let map = f.object(&["vertices", "edges", "truncated"])?;
    let (vpath, vval) = required(map, f.path, "vertices")?;
    let vertices = Field { path: &vpath, value: vval }
        .array()?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let p = format!("{vpath}[{i}]");
            Field { path: &p, value: v }.string().map(str::to_string)
        })
        .collect::<Result<Vec<_>>>()?;
    let (epath, eval) = required(map, f.path, "edges")?;
    let mut edges = Vec::new();
    let edge_list = Field { path: &epath, value: eval }.array()?;
    for (i, e) in edge_list.iter().enumerate() {
        let p = format!("{epath}[{i}]");
        let emap = Field { path: &p, value: e }.object(&["id", "src", "dst"])?;
        let get = |k: &str| -> Result<String> {
            let (kp, kv) = required(emap, &p, k)?;
            Field { path: &kp, value: kv }.string().map(str::to_string)
        };
        edges.push((get("id")?, get("src")?, get("dst")?));
    }
    let mut graph = DirectedGraph::new(vertices, edges).map_err(at(f.path))?;
    if let Some(t) = map.get("truncated") {
        let tpath = child_path(f.path, "truncated");
        let ids = Field { path: &tpath, value: t }
            .array()?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let p = format!("{tpath}[{i}]");
                Field { path: &p, value: v }.string().map(str::to_string)
            })
            .collect::<Result<Vec<_>>>()?;
        graph = graph.with_truncated(ids).map_err(at(&tpath))?;
    }
    Ok(graph)
}

fn read_action(f: Field, graph: &Arc<DirectedGraph>) -> Result<GaugeAction> {
    let map = f.object(&["group", "elements"])?;
    let (gpath, gval) = required(map, f.path, "group")?;
    let gmap = Field { path: &gpath, value: gval }.object(&["table", "identity", "inverse"])?;
    let (tpath, tval) = required(gmap, &gpath, "table")?;
    let table = Field { path: &tpath, value: tval }
        .array()?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{tpath}[{i}]");
            Field { path: &rp, value: row }
                .array()?
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let p = format!("{rp}[{j}]");
                    Field { path: &p, value: x }.count()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (ipath, ival) = required(gmap, &gpath, "identity")?;
    let identity = Field { path: &ipath, value: ival }.count()?;
    let (invpath, invval) = required(gmap, &gpath, "inverse")?;
    let inverse = Field { path: &invpath, value: invval }
        .array()?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{invpath}[{i}]");
            Field { path: &p, value: x }.count()
        })
        .collect::<Result<Vec<_>>>()?;
    let group = FiniteGroup::new(table, identity, inverse).map_err(at(&gpath))?;

    let (epath, eval) = required(map, f.path, "elements")?;
    let elements = Field { path: &epath, value: eval }.array()?;
    let mut vertex_perm = Vec::with_capacity(elements.len());
    let mut buckets = Vec::with_capacity(elements.len());
    for (g, el) in elements.iter().enumerate() {
        let gp = format!("{epath}[{g}]");
        let emap = Field { path: &gp, value: el }.object(&["vertex_perm", "buckets"])?;
        let (pp, pv) = required(emap, &gp, "vertex_perm")?;
        let pmap = pv.as_object().ok_or_else(|| err(&pp, "expected an object"))?;
        let mut perm: Vec<Option<usize>> = vec![None; graph.vertex_count()];
        for (k, v) in pmap {
            let kp = child_path(&pp, k);
            let from = graph.vertex(k).map_err(at(&kp))?;
            let to = graph
                .vertex(Field { path: &kp, value: v }.string()?)
                .map_err(at(&kp))?;
            perm[from] = Some(to);
        }
        let perm = perm
            .into_iter()
            .enumerate()
            .map(|(v, w)| w.ok_or_else(|| err(&pp, format!("no image for vertex `{}`", graph.vertex_id(v)))))
            .collect::<Result<Vec<_>>>()?;
        vertex_perm.push(perm);

        let (bp, bv) = required(emap, &gp, "buckets")?;
        let mut bmap = BTreeMap::new();
        let bucket_list = Field { path: &bp, value: bv }.array()?;
        for (i, b) in bucket_list.iter().enumerate() {
            let ip = format!("{bp}[{i}]");
            let bm = Field { path: &ip, value: b }.object(&["range", "source", "matrix"])?;
            let vertex = |k: &str| -> Result<usize> {
                let (kp, kv) = required(bm, &ip, k)?;
                graph.vertex(Field { path: &kp, value: kv }.string()?).map_err(at(&kp))
            };
            let key = (vertex("range")?, vertex("source")?);
            let (mp, mv) = required(bm, &ip, "matrix")?;
            let m = Field { path: &mp, value: mv }.matrix()?;
            if bmap.insert(key, m).is_some() {
                return Err(err(&ip, "duplicate bucket"));
            }
        }
        buckets.push(bmap);
    }
    GaugeAction::new(group, Arc::clone(graph), vertex_perm, buckets).map_err(at(f.path))
}

fn read_rep(f: Field, graph: &Arc<DirectedGraph>, action: Option<&Arc<GaugeAction>>) -> Result<GraphRep> {
    let map = f.object(&["dim", "proj", "edge_op", "unitaries"])?;
    let (dpath, dval) = required(map, f.path, "dim")?;
    let dim = Field { path: &dpath, value: dval }.count()?;

    let keyed = |key: &str, ids: Vec<String>, kind: &str| -> Result<Vec<CMatrix>> {
        let (path, val) = required(map, f.path, key)?;
        let obj = val.as_object().ok_or_else(|| err(&path, "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| !ids.contains(k)) {
            return Err(err(&path, format!("unknown {kind} `{k}`")));
        }
        ids.iter()
            .map(|id| {
                let p = child_path(&path, id);
                let v = obj
                    .get(id)
                    .ok_or_else(|| err(&path, format!("missing {kind} `{id}`")))?;
                let m = Field { path: &p, value: v }.matrix()?;
                if m.shape() != (dim, dim) {
                    return Err(err(&p, format!("matrix is {}x{}, dim is {dim}", m.nrows(), m.ncols())));
                }
                Ok(m)
            })
            .collect()
    };
    let proj = keyed("proj", graph.vertex_ids().to_vec(), "vertex")?;
    let edge_op = keyed(
        "edge_op",
        graph.edges().iter().map(|e| e.id.clone()).collect(),
        "edge",
    )?;
    let rep = GraphRep::new(Arc::clone(graph), dim, proj, edge_op).map_err(at(f.path))?;

    match (map.get("unitaries"), action) {
        (Some(u), Some(action)) => {
            let upath = child_path(f.path, "unitaries");
            let us = Field { path: &upath, value: u }
                .array()?
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let p = format!("{upath}[{i}]");
                    Field { path: &p, value: m }.matrix()
                })
                .collect::<Result<Vec<_>>>()?;
            rep.with_covariance(Arc::clone(action), us).map_err(at(&upath))
        }
        (Some(_), None) => Err(err(&child_path(f.path, "unitaries"), "unitaries given without an `action` block")),
        (None, Some(action)) => rep.with_action(Arc::clone(action)).map_err(at(f.path)),
        (None, None) => Ok(rep),
    }
}

fn read_tolerance(f: Field) -> Result<ToleranceOverrides> {
    let map = f.object(&["eps", "eig_clip", "max_dim"])?;
    let real = |k: &str| -> Result<Option<f64>> {
        map.get(k)
            .map(|v| Field { path: &child_path(f.path, k), value: v }.real())
            .transpose()
    };
    let out = ToleranceOverrides {
        eps: real("eps")?,
        eig_clip: real("eig_clip")?,
        max_dim: map
            .get("max_dim")
            .map(|v| Field { path: "tolerance.max_dim", value: v }.count())
            .transpose()?,
    };
    out.apply(Tolerance::default()).map_err(at(f.path))?;
    Ok(out)
}

// ---------------------------------------------------------------- writing

fn real_value(x: f64) -> Result<Value> {
    Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| Error::Configuration(format!("cannot store non-finite value {x}")))
}

fn matrix_value(m: &CMatrix) -> Result<Value> {
    let mut rows = Vec::with_capacity(m.nrows());
    for i in 0..m.nrows() {
        let mut row = Vec::with_capacity(m.ncols());
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            row.push(Value::Array(vec![real_value(z.re)?, real_value(z.im)?]));
        }
        rows.push(Value::Array(row));
    }
    Ok(Value::Array(rows))
}

fn obj<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn to_value(p: &Problem) -> Result<Value> {
    let g = &p.graph;
    let mut graph = Map::new();
    graph.insert(
        "vertices".into(),
        Value::Array(g.vertex_ids().iter().cloned().map(Value::String).collect()),
    );
    graph.insert(
        "edges".into(),
        Value::Array(
            g.edges()
                .iter()
                .map(|e| {
                    obj([
                        ("id", Value::String(e.id.clone())),
                        ("src", Value::String(g.vertex_id(e.src).to_string())),
                        ("dst", Value::String(g.vertex_id(e.dst).to_string())),
                    ])
                })
                .collect(),
        ),
    );
    let truncated = g.truncated_ids();
    if !truncated.is_empty() {
        graph.insert(
            "truncated".into(),
            Value::Array(truncated.into_iter().map(|s| Value::String(s.to_string())).collect()),
        );
    }
    let mut top = Map::new();
    top.insert("graph".into(), Value::Object(graph));

    if let Some(action) = &p.action {
        let group = action.group();
        let ints = |xs: &[usize]| Value::Array(xs.iter().map(|&x| Value::from(x)).collect());
        let mut elements = Vec::with_capacity(group.order());
        for gi in 0..group.order() {
            let perm: Map<String, Value> = action.vertex_perms()[gi]
                .iter()
                .enumerate()
                .map(|(v, &w)| (g.vertex_id(v).to_string(), Value::String(g.vertex_id(w).to_string())))
                .collect();
            let buckets = action
                .bucket_matrices(gi)
                .iter()
                .map(|(&(r, s), m)| {
                    Ok(obj([
                        ("range", Value::String(g.vertex_id(r).to_string())),
                        ("source", Value::String(g.vertex_id(s).to_string())),
                        ("matrix", matrix_value(m)?),
                    ]))
                })
                .collect::<Result<Vec<_>>>()?;
            elements.push(obj([
                ("vertex_perm", Value::Object(perm)),
                ("buckets", Value::Array(buckets)),
            ]));
        }
        top.insert(
            "action".into(),
            obj([
                (
                    "group",
                    obj([
                        ("table", Value::Array(group.table().iter().map(|r| ints(r)).collect())),
                        ("identity", Value::from(group.identity())),
                        ("inverse", ints(group.inverse_map())),
                    ]),
                ),
                ("elements", Value::Array(elements)),
            ]),
        );
    }

    if let Some(rep) = &p.representation {
        let mut r = Map::new();
        r.insert("dim".into(), Value::from(rep.dim()));
        let mut proj = Map::new();
        for (v, m) in rep.projections().iter().enumerate() {
            proj.insert(g.vertex_id(v).to_string(), matrix_value(m)?);
        }
        r.insert("proj".into(), Value::Object(proj));
        let mut ops = Map::new();
        for (e, m) in rep.edge_ops().iter().enumerate() {
            ops.insert(g.edge(e).id.clone(), matrix_value(m)?);
        }
        r.insert("edge_op".into(), Value::Object(ops));
        if let Some(us) = rep.unitaries() {
            r.insert(
                "unitaries".into(),
                Value::Array(us.iter().map(matrix_value).collect::<Result<_>>()?),
            );
        }
        top.insert("representation".into(), Value::Object(r));
    }

    if !p.tolerance.is_empty() {
        let mut t = Map::new();
        if let Some(x) = p.tolerance.eps {
            t.insert("eps".into(), real_value(x)?);
        }
        if let Some(x) = p.tolerance.eig_clip {
            t.insert("eig_clip".into(), real_value(x)?);
        }
        if let Some(x) = p.tolerance.max_dim {
            t.insert("max_dim".into(), Value::from(x));
        }
        top.insert("tolerance".into(), Value::Object(t));
    }
    Ok(Value::Object(top))
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Arrays of scalars, or of arrays of scalars, fit on one line.
fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs
            .iter()
            .all(|x| is_scalar(x) || matches!(x, Value::Array(ys) if ys.iter().all(is_scalar))),
        _ => true,
    }
}

fn emit_inline(v: &Value, out: &mut String) {
    match v {
        Value::Array(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                emit_inline(x, out);
            }
            out.push(']');
        }
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i)) if !n.is_f64() => write!(out, "{i}").unwrap(),
            _ => write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN)).unwrap(),
        },
        other => out.push_str(&other.to_string()),
    }
}

fn emit(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.push_str(&"  ".repeat(d));
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                emit(x, depth + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(depth, out);
            out.push('}');
        }
        Value::Array(xs) if !xs.is_empty() && !is_flat(v) => {
            out.push_str("[\n");
            for (i, x) in xs.iter().enumerate() {
                pad(depth + 1, out);
                emit(x, depth + 1, out);
                if i + 1 < xs.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(_) => out.push_str("{}"),
        other => emit_inline(other, out),
    }
}

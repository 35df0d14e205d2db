//! JSON documents for groups, groupoids, homomorphisms and bundles.
//!
//! Readers walk a [`serde_json::Value`] and report failures with the JSON
//! path of the offending node. Writers emit keys in a fixed order and round
//! floats to 12 significant digits so that output is byte-stable.

use std::sync::Arc;

use num_complex::Complex;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::fingrp::FiniteGroup;
use crate::gmor::GroupoidHom;
use crate::gpd::{action_groupoid, localisation_parts, GroupAction, Groupoid, GroupoidData};
use crate::linalg::CMatrix;
use crate::orbmodel::{cone_point_model, multi_cone_model};
use crate::scalar::Real;
use crate::vbun::VectorBundle;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },
    #[error(transparent)]
    Core(#[from] Error),
}

pub type DocResult<T> = std::result::Result<T, DocError>;

pub fn parse_text(text: &str) -> DocResult<Value> {
    serde_json::from_str(text).map_err(|e| DocError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })
}

fn schema(path: &str, msg: impl Into<String>) -> DocError {
    DocError::Schema { path: path.to_string(), msg: msg.into() }
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> DocResult<&'a Value> {
    v.get(key).ok_or_else(|| schema(path, format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, path: &str) -> DocResult<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> DocResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn usize_list(v: &Value, path: &str) -> DocResult<Vec<usize>> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| as_usize(x, &format!("{path}[{i}]"))).collect()
}

fn usize_table(v: &Value, path: &str) -> DocResult<Vec<Vec<usize>>> {
    as_array(v, path)?.iter().enumerate().map(|(i, row)| usize_list(row, &format!("{path}[{i}]"))).collect()
}

fn single_key(v: &Value) -> Option<(&str, &Value)> {
    let m = v.as_object()?;
    (m.len() == 1).then(|| m.iter().next().map(|(k, x)| (k.as_str(), x))).flatten()
}

/// `{"cyclic": n}`, `{"symmetric": n}`, `{"order", "mul", "names"?}` or
/// `{"degree", "generators"}`.
pub fn group_from_json(v: &Value, path: &str) -> DocResult<FiniteGroup> {
    if let Some((k, x)) = single_key(v) {
        match k {
            "cyclic" => return Ok(FiniteGroup::cyclic(as_usize(x, &format!("{path}.cyclic"))?)?),
            "symmetric" => return Ok(FiniteGroup::symmetric(as_usize(x, &format!("{path}.symmetric"))?)?),
            "product" => {
                let parts = as_array(x, &format!("{path}.product"))?;
                let mut g = FiniteGroup::trivial();
                for (i, p) in parts.iter().enumerate() {
                    g = g.direct_product(&group_from_json(p, &format!("{path}.product[{i}]"))?);
                }
                return Ok(g);
            }
            _ => {}
        }
    }
    if let Some(mul) = v.get("mul") {
        let table = usize_table(mul, &format!("{path}.mul"))?;
        if let Some(order) = v.get("order") {
            if as_usize(order, &format!("{path}.order"))? != table.len() {
                return Err(schema(path, "order does not match the table size"));
            }
        }
        let names = match v.get("names") {
            None => None,
            Some(n) => Some(
                as_array(n, &format!("{path}.names"))?
                    .iter()
                    .map(|s| {
                        s.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| schema(&format!("{path}.names"), "expected strings"))
                    })
                    .collect::<DocResult<Vec<_>>>()?,
            ),
        };
        return FiniteGroup::from_table(&table, names)
            .map_err(|e| DocError::Invalid { what: "group", msg: e.to_string() });
    }
    if let Some(gens) = v.get("generators") {
        let degree = as_usize(field(v, path, "degree")?, &format!("{path}.degree"))?;
        let gens = usize_table(gens, &format!("{path}.generators"))?;
        return Ok(FiniteGroup::from_permutations(degree, &gens)?);
    }
    Err(schema(path, "not a group document"))
}

pub fn group_to_json(g: &FiniteGroup) -> Value {
    let mut m = Map::new();
    m.insert("order".into(), json!(g.order()));
    m.insert("mul".into(), json!(g.table()));
    if let Some(names) = g.names() {
        m.insert("names".into(), json!(names));
    }
    Value::Object(m)
}

/// A loaded groupoid; action documents keep their action for the
/// centralizer decomposition.
#[derive(Clone, Debug)]
pub struct LoadedGroupoid {
    pub groupoid: Arc<Groupoid>,
    pub action: Option<GroupAction>,
}

fn action_from_json(v: &Value, path: &str) -> DocResult<GroupAction> {
    let group = group_from_json(field(v, path, "group")?, &format!("{path}.group"))?;
    match v.get("act") {
        None if v.get("points").is_none() => Ok(GroupAction::natural(group)?),
        None => Ok(GroupAction::trivial(group, as_usize(&v["points"], &format!("{path}.points"))?)),
        Some(act) => {
            let table = usize_table(act, &format!("{path}.act"))?;
            let points = match v.get("points") {
                Some(p) => as_usize(p, &format!("{path}.points"))?,
                None => table.first().map_or(0, Vec::len),
            };
            GroupAction::new(group, points, &table)
                .map_err(|e| DocError::Invalid { what: "action", msg: e.to_string() })
        }
    }
}

/// Explicit tables or one of the shorthands `{"action": …}`,
/// `{"cone": n}`, `{"multi_cone": [..]}`, `{"point_quotient": <group>}`,
/// `{"unit": n}`, `{"pair": n}`.
pub fn groupoid_from_json(v: &Value, path: &str) -> DocResult<LoadedGroupoid> {
    let plain = |g: Groupoid| LoadedGroupoid { groupoid: Arc::new(g), action: None };
    let from_action = |a: GroupAction| LoadedGroupoid { groupoid: Arc::new(action_groupoid(&a)), action: Some(a) };
    if let Some((k, x)) = single_key(v) {
        let sub = format!("{path}.{k}");
        match k {
            "action" => return Ok(from_action(action_from_json(x, &sub)?)),
            "cone" => return Ok(from_action(cone_point_model(as_usize(x, &sub)?)?)),
            "multi_cone" => return Ok(plain(multi_cone_model(&usize_list(x, &sub)?)?)),
            "point_quotient" => {
                let g = group_from_json(x, &sub)?;
                return Ok(from_action(GroupAction::trivial(g, 1)));
            }
            "unit" => return Ok(plain(Groupoid::unit_groupoid(as_usize(x, &sub)?))),
            "pair" => return Ok(plain(Groupoid::pair_groupoid(as_usize(x, &sub)?))),
            _ => {}
        }
    }
    let data = groupoid_data_from_json(v, path)?;
    Groupoid::from_data(&data).map(plain).map_err(|e| DocError::Invalid { what: "groupoid", msg: e.to_string() })
}

fn groupoid_data_from_json(v: &Value, path: &str) -> DocResult<GroupoidData> {
    let objects = as_usize(field(v, path, "objects")?, &format!("{path}.objects"))?;
    let arrows = as_array(field(v, path, "arrows")?, &format!("{path}.arrows"))?;
    let n = arrows.len();
    let (mut src, mut tgt) = (vec![0; n], vec![0; n]);
    let mut seen = vec![false; n];
    for (i, a) in arrows.iter().enumerate() {
        let p = format!("{path}.arrows[{i}]");
        let id = match a.get("id") {
            Some(x) => as_usize(x, &format!("{p}.id"))?,
            None => i,
        };
        if id >= n || seen[id] {
            return Err(schema(&format!("{p}.id"), format!("arrow ids must be a permutation of 0..{n}")));
        }
        seen[id] = true;
        src[id] = as_usize(field(a, &p, "src")?, &format!("{p}.src"))?;
        tgt[id] = as_usize(field(a, &p, "tgt")?, &format!("{p}.tgt"))?;
    }
    let comp = as_array(field(v, path, "comp")?, &format!("{path}.comp"))?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let p = format!("{path}.comp[{i}]");
            let t = usize_list(t, &p)?;
            <[usize; 3]>::try_from(t).map_err(|_| schema(&p, "expected [first, second, composite]"))
        })
        .collect::<DocResult<Vec<_>>>()?;
    let units = usize_list(field(v, path, "units")?, &format!("{path}.units"))?;
    let inv = usize_list(field(v, path, "inv")?, &format!("{path}.inv"))?;
    Ok(GroupoidData { objects, src, tgt, comp, units, inv })
}

pub fn groupoid_to_json(g: &Groupoid) -> Value {
    let d = g.to_data();
    let arrows: Vec<Value> = (0..d.src.len()).map(|a| json!({"id": a, "src": d.src[a], "tgt": d.tgt[a]})).collect();
    json!({"objects": d.objects, "arrows": arrows, "comp": d.comp, "units": d.units, "inv": d.inv})
}

/// `{"obj_map", "arr_map"}` between given groupoids. The homomorphism laws
/// are checked.
pub fn hom_from_json(v: &Value, path: &str, dom: Arc<Groupoid>, cod: Arc<Groupoid>) -> DocResult<GroupoidHom> {
    let obj_map = usize_list(field(v, path, "obj_map")?, &format!("{path}.obj_map"))?;
    let arr_map = usize_list(field(v, path, "arr_map")?, &format!("{path}.arr_map"))?;
    let f = GroupoidHom::new(dom, cod, obj_map, arr_map)
        .map_err(|e| DocError::Invalid { what: "homomorphism", msg: e.to_string() })?;
    f.validate().map_err(|e| DocError::Invalid { what: "homomorphism", msg: e.to_string() })?;
    Ok(f)
}

/// The projection from the localisation of `g` over `cover` to `g`.
pub fn localisation_projection(g: &Arc<Groupoid>, cover: &[Vec<usize>]) -> DocResult<GroupoidHom> {
    let loc = localisation_parts(g, cover)?;
    Ok(GroupoidHom::new(Arc::new(loc.groupoid), g.clone(), loc.obj_map, loc.arr_map)?)
}

fn complex_from_json(v: &Value, path: &str) -> DocResult<Complex<f64>> {
    match v {
        Value::Number(n) => Ok(Complex::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => {
            let re = p[0].as_f64().ok_or_else(|| schema(path, "expected a number"))?;
            let im = p[1].as_f64().ok_or_else(|| schema(path, "expected a number"))?;
            Ok(Complex::new(re, im))
        }
        _ => Err(schema(path, "expected [re, im] or a real number")),
    }
}

/// Flat row-major `[[re, im], …]` or nested rows `[[[re, im], …], …]`.
fn matrix_from_json<T: Real>(v: &Value, path: &str, rows: usize, cols: usize) -> DocResult<CMatrix<T>> {
    let items = as_array(v, path)?;
    let nested = items.len() == rows
        && items.iter().all(|r| r.as_array().is_some_and(|r| r.len() == cols && r.iter().all(Value::is_array)));
    let mut data = Vec::with_capacity(rows * cols);
    if nested && rows * cols > 0 {
        for (i, r) in items.iter().enumerate() {
            for (j, z) in r.as_array().expect("checked").iter().enumerate() {
                data.push(complex_from_json(z, &format!("{path}[{i}][{j}]"))?);
            }
        }
    } else {
        for (i, z) in items.iter().enumerate() {
            data.push(complex_from_json(z, &format!("{path}[{i}]"))?);
        }
    }
    let data = data.into_iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect();
    CMatrix::from_vec(rows, cols, data)
        .ok_or_else(|| schema(path, format!("expected {} entries for a {rows}x{cols} matrix", rows * cols)))
}

/// `{"dims", "matrices": {"<arrow id>": entries}}` over `base`; units may
/// be omitted and default to the identity.
pub fn bundle_from_json<T: Real>(v: &Value, path: &str, base: Arc<Groupoid>) -> DocResult<VectorBundle<T>> {
    let dims = usize_list(field(v, path, "dims")?, &format!("{path}.dims"))?;
    if dims.len() != base.num_objects() {
        return Err(schema(&format!("{path}.dims"), format!("{} dims for {} objects", dims.len(), base.num_objects())));
    }
    let mats = field(v, path, "matrices")?
        .as_object()
        .ok_or_else(|| schema(&format!("{path}.matrices"), "expected an object keyed by arrow id"))?;
    let mut action: Vec<Option<CMatrix<T>>> = vec![None; base.num_arrows()];
    for (k, m) in mats {
        let p = format!("{path}.matrices.{k}");
        let a: usize = k.parse().map_err(|_| schema(&p, "key is not an arrow id"))?;
        if a >= base.num_arrows() {
            return Err(schema(&p, format!("arrow {a} out of range")));
        }
        action[a] = Some(matrix_from_json(m, &p, dims[base.tgt(a)], dims[base.src(a)])?);
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(a, m)| match m {
            Some(m) => Ok(m),
            None if base.objects().any(|x| base.unit(x) == a) => Ok(CMatrix::identity(dims[base.src(a)])),
            None => Err(schema(&format!("{path}.matrices"), format!("no matrix for arrow {a}"))),
        })
        .collect::<DocResult<Vec<_>>>()?;
    Ok(VectorBundle::new(base, dims, action)?)
}

pub fn bundle_to_json<T: Real>(e: &VectorBundle<T>) -> Value {
    let mut mats = Map::new();
    for (a, m) in e.matrices().iter().enumerate() {
        mats.insert(a.to_string(), Value::Array(m.data().iter().map(|&z| complex_to_json(z)).collect()));
    }
    json!({"dims": e.dims(), "matrices": mats})
}

/// Rounds to 12 significant digits; integral values become JSON integers.
pub fn real_to_json<T: Real>(x: T) -> Value {
    let x = x.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == r.trunc() && r.abs() < 1e15 {
        return json!(r as i64);
    }
    json!(r)
}

pub fn complex_to_json<T: Real>(z: Complex<T>) -> Value {
    json!([real_to_json(z.re), real_to_json(z.im)])
}

/// `{"<orbit id>": [re, im]}` in orbit order.
pub fn values_to_json<T: Real>(values: &[Complex<T>]) -> Value {
    let mut m = Map::new();
    for (i, &z) in values.iter().enumerate() {
        m.insert(i.to_string(), complex_to_json(z));
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_round_trip() {
        let g = group_from_json(&json!({"symmetric": 3}), "$").unwrap();
        assert_eq!(g.order(), 6);
        let back = group_from_json(&group_to_json(&g), "$").unwrap();
        assert_eq!(back.table(), g.table());
        let p = group_from_json(&json!({"degree": 3, "generators": [[1, 2, 0]]}), "$").unwrap();
        assert_eq!(p.order(), 3);
        let v4 = group_from_json(&json!({"product": [{"cyclic": 2}, {"cyclic": 2}]}), "$").unwrap();
        assert_eq!(v4.order(), 4);
        assert!(matches!(group_from_json(&json!({"mul": [[0, 1], [1, 1]]}), "$"), Err(DocError::Invalid { .. })));
        assert!(matches!(group_from_json(&json!({"cyclic": "x"}), "$"), Err(DocError::Schema { .. })));
    }

    #[test]
    fn groupoids_round_trip() {
        let l = groupoid_from_json(&json!({"point_quotient": {"cyclic": 2}}), "$").unwrap();
        assert_eq!(l.groupoid.num_arrows(), 2);
        let doc = groupoid_to_json(&l.groupoid);
        let back = groupoid_from_json(&doc, "$").unwrap();
        assert_eq!(*back.groupoid, *l.groupoid);
        let mut broken = doc.clone();
        broken["comp"][0][2] = json!(1);
        assert!(matches!(groupoid_from_json(&broken, "$"), Err(DocError::Invalid { .. })));
        let act = groupoid_from_json(&json!({"action": {"group": {"cyclic": 2}, "act": [[0, 1, 2], [1, 0, 2]]}}), "$")
            .unwrap();
        assert_eq!(act.groupoid.num_objects(), 3);
        assert!(act.action.is_some());
        let missing = groupoid_from_json(&json!({"objects": 1}), "$");
        assert_eq!(missing.unwrap_err(), DocError::Schema { path: "$".into(), msg: "missing field \"arrows\"".into() });
    }

    #[test]
    fn bundles_and_numbers() {
        let g = groupoid_from_json(&json!({"point_quotient": {"cyclic": 2}}), "$").unwrap().groupoid;
        let e: VectorBundle<f64> =
            bundle_from_json(&json!({"dims": [1], "matrices": {"1": [[-1, 0]]}}), "$", g.clone()).unwrap();
        assert_eq!(e.matrix(1)[(0, 0)], Complex::new(-1.0, 0.0));
        assert!(e.matrix(0).is_identity(0.0));
        let nested: VectorBundle<f64> = bundle_from_json(
            &json!({"dims": [2], "matrices": {"1": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}}),
            "$",
            g.clone(),
        )
        .unwrap();
        assert_eq!(nested.matrix(1), &CMatrix::permutation(&[1, 0]));
        let round = bundle_from_json::<f64>(&bundle_to_json(&nested), "$", g.clone()).unwrap();
        assert_eq!(round, nested);
        assert!(bundle_from_json::<f64>(&json!({"dims": [1], "matrices": {}}), "$", g).is_err());
        assert_eq!(real_to_json(3.0000000000001f64), json!(3));
        assert_eq!(real_to_json(1.0f64 / 3.0), json!(0.333333333333));
        assert_eq!(real_to_json(-0.0f64), json!(0));
        assert!(matches!(parse_text("{"), Err(DocError::Syntax { line: 1, .. })));
    }
}

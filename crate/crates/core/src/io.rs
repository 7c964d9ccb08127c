//! JSON formats for posets, matrices and modules.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::decomp;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::pmod::{self, PModule};
use crate::poset::Poset;

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Parses JSON text, reporting line and column on failure.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| fmt_err(e.to_string()))
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| fmt_err(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| match e {
        Error::Format(m) => fmt_err(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn str_list(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| fmt_err(format!("{what} must be an array")))?
        .iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(fmt_err(format!("{what} entries must be strings"))),
        })
        .collect()
}

fn usize_pair(v: &Value, what: &str) -> Result<(usize, usize)> {
    let a = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| fmt_err(format!("{what} must be [n, m]")))?;
    let get = |x: &Value| {
        x.as_u64()
            .filter(|&k| k >= 1)
            .map(|k| k as usize)
            .ok_or_else(|| fmt_err(format!("{what} entries must be positive integers")))
    };
    Ok((get(&a[0])?, get(&a[1])?))
}

/// `{"elements": [...], "relations": [[a,b],...]}`, `{"grid": [n,m]}`,
/// `{"staircase": [n,m]}` or the name of a builtin template.
pub fn parse_poset(v: &Value) -> Result<Poset> {
    if let Some(name) = v.as_str() {
        return decomp::builtin_template(name);
    }
    let obj = v
        .as_object()
        .ok_or_else(|| fmt_err("poset must be an object or a template name"))?;
    if let Some(g) = obj.get("grid") {
        let (n, m) = usize_pair(g, "grid")?;
        return Ok(Poset::grid(n, m));
    }
    if let Some(g) = obj.get("staircase") {
        let (n, m) = usize_pair(g, "staircase")?;
        return Ok(Poset::staircase_grid(n, m));
    }
    let elements = str_list(
        obj.get("elements")
            .ok_or_else(|| fmt_err("poset needs `elements`"))?,
        "elements",
    )?;
    let mut pairs = Vec::new();
    if let Some(rel) = obj.get("relations") {
        for r in rel
            .as_array()
            .ok_or_else(|| fmt_err("relations must be an array"))?
        {
            let pr = str_list(r, "relation")?;
            if pr.len() != 2 {
                return Err(fmt_err("each relation is a pair"));
            }
            pairs.push((pr[0].clone(), pr[1].clone()));
        }
    }
    Poset::from_relations(&elements, &pairs)
}

pub fn poset_to_json(p: &Poset) -> Value {
    let rels: Vec<Value> = p
        .covers()
        .iter()
        .map(|&(a, b)| json!([p.name(a), p.name(b)]))
        .collect();
    json!({ "elements": p.elements(), "relations": rels })
}

fn parse_scalar_text(field: Field, s: &str) -> Result<crate::linalg::Scalar> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| fmt_err(format!("bad scalar `{s}`")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| fmt_err(format!("bad scalar `{s}`")))?;
    field.from_ratio(&n, &d)
}

/// Arrays of arrays of integers or "num/den" strings.
pub fn parse_matrix(field: Field, v: &Value, rows: usize, cols: usize) -> Result<Matrix> {
    let rs = v
        .as_array()
        .ok_or_else(|| fmt_err("matrix must be an array of rows"))?;
    // an empty array stands for any matrix with a zero dimension
    if rs.is_empty() && (rows == 0 || cols == 0) {
        return Ok(Matrix::zeros(field, rows, cols));
    }
    if rs.len() != rows {
        return Err(Error::ShapeMismatch(format!(
            "expected {rows} rows, got {}",
            rs.len()
        )));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for r in rs {
        let r = r
            .as_array()
            .ok_or_else(|| fmt_err("matrix rows must be arrays"))?;
        if r.len() != cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {cols} columns, got {}",
                r.len()
            )));
        }
        for x in r {
            data.push(match x {
                Value::Number(n) => parse_scalar_text(field, &n.to_string())?,
                Value::String(s) => parse_scalar_text(field, s)?,
                _ => return Err(fmt_err("matrix entries are integers or strings")),
            });
        }
    }
    Matrix::from_scalars(field, rows, cols, data)
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let f = m.field();
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| match f.to_i64(m.get(i, j)) {
                            Some(k) if matches!(f, Field::Rational) => json!(k),
                            _ => Value::String(f.format(m.get(i, j))),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn element(p: &Poset, v: &Value) -> Result<usize> {
    match v {
        Value::String(s) => p.id(s),
        Value::Number(n) => p.id(&n.to_string()),
        _ => Err(fmt_err("element references are strings")),
    }
}

fn element_pair(p: &Poset, v: &Value, what: &str) -> Result<(usize, usize)> {
    let a = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| fmt_err(format!("{what} takes two elements")))?;
    Ok((element(p, &a[0])?, element(p, &a[1])?))
}

/// Parses a module object. `poset` is used when the object has no
/// `"poset"` entry.
pub fn parse_module(field: Field, v: &Value, poset: Option<&Arc<Poset>>) -> Result<PModule> {
    let obj = v
        .as_object()
        .ok_or_else(|| fmt_err("module must be an object"))?;
    let p: Arc<Poset> = match (obj.get("poset"), poset) {
        (Some(pv), _) => Arc::new(parse_poset(pv)?),
        (None, Some(p)) => p.clone(),
        (None, None) => return Err(fmt_err("module needs a `poset`")),
    };
    if let Some(s) = obj.get("interval") {
        let members = s
            .as_array()
            .ok_or_else(|| fmt_err("interval lists its elements"))?
            .iter()
            .map(|x| element(&p, x))
            .collect::<Result<Vec<_>>>()?;
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        return pmod::interval_module(&p, &members, field);
    }
    if let Some(x) = obj.get("hook") {
        let (a, b) = element_pair(&p, x, "hook")?;
        return pmod::hook(&p, a, b, field);
    }
    if let Some(x) = obj.get("cohook") {
        let (a, b) = element_pair(&p, x, "cohook")?;
        return pmod::cohook(&p, a, b, field);
    }
    if let Some(x) = obj.get("rectangle") {
        let (a, b) = element_pair(&p, x, "rectangle")?;
        return pmod::rectangle(&p, a, b, field);
    }
    if let Some(x) = obj.get("projective") {
        return Ok(pmod::projective(&p, element(&p, x)?, field));
    }
    if let Some(x) = obj.get("injective") {
        return Ok(pmod::injective(&p, element(&p, x)?, field));
    }
    if let Some(x) = obj.get("simple") {
        return Ok(pmod::simple(&p, element(&p, x)?, field));
    }
    if obj.contains_key("sincere") {
        return pmod::sincere_interval(&p, field);
    }
    let mut dims = vec![0usize; p.len()];
    if let Some(d) = obj.get("dims") {
        let d = d
            .as_object()
            .ok_or_else(|| fmt_err("dims must be an object"))?;
        for (k, val) in d {
            let a = p.id(k)?;
            dims[a] = val.as_u64().ok_or_else(|| {
                fmt_err(format!("dimension at `{k}` must be a nonnegative integer"))
            })? as usize;
        }
    }
    let mut maps = HashMap::new();
    if let Some(m) = obj.get("maps") {
        let m = m
            .as_object()
            .ok_or_else(|| fmt_err("maps must be an object"))?;
        for (k, val) in m {
            let (a, b) = k
                .split_once('<')
                .ok_or_else(|| fmt_err(format!("map key `{k}` must look like `a<b`")))?;
            let (a, b) = (p.id(a.trim())?, p.id(b.trim())?);
            maps.insert((a, b), parse_matrix(field, val, dims[b], dims[a])?);
        }
    }
    PModule::new(p, field, dims, maps)
}

/// Module object with its poset inlined; zero maps are omitted.
pub fn module_to_json(m: &PModule) -> Value {
    let p = m.poset();
    let mut dims = Map::new();
    for a in 0..p.len() {
        if m.dim(a) > 0 {
            dims.insert(p.name(a).to_string(), json!(m.dim(a)));
        }
    }
    let mut maps = Map::new();
    for ((a, b), x) in m.cover_maps() {
        if !x.is_zero() {
            maps.insert(format!("{}<{}", p.name(a), p.name(b)), matrix_to_json(x));
        }
    }
    json!({ "poset": poset_to_json(p), "dims": dims, "maps": maps })
}

/// Renders dimensions of a module over a grid as rows, top row first,
/// matching the usual (i, j) picture. `None` if the poset is not a grid.
pub fn render_grid(m: &PModule) -> Option<String> {
    let p = m.poset();
    let mut cells = HashMap::new();
    let (mut n, mut k) = (0, 0);
    for a in 0..p.len() {
        let (i, j) = p.name(a).split_once(',')?;
        let (i, j): (usize, usize) = (i.parse().ok()?, j.parse().ok()?);
        n = n.max(i);
        k = k.max(j);
        cells.insert((i, j), m.dim(a));
    }
    let mut out = String::new();
    for i in (1..=n).rev() {
        let row: Vec<String> = (1..=k)
            .map(|j| {
                cells
                    .get(&(i, j))
                    .map_or(".".to_string(), |d| d.to_string())
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn posets() {
        let p = parse_poset(&json!({"elements": ["a", "b"], "relations": [["a", "b"]]})).unwrap();
        assert!(p.lt(0, 1));
        let g = parse_poset(&json!({"grid": [3, 2]})).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(parse_poset(&poset_to_json(&g)).unwrap(), g);
        assert!(parse_poset(&json!({"grid": [0, 2]})).is_err());
        assert!(parse_json("{\n \"elements\": [}")
            .unwrap_err()
            .to_string()
            .contains("line 2"));
    }

    #[test]
    fn modules_round_trip() {
        let q = Field::Rational;
        let v = json!({
            "poset": {"elements": ["1", "2"], "relations": [["1", "2"]]},
            "dims": {"1": 1, "2": 2},
            "maps": {"1<2": [["1/2"], [3]]}
        });
        let m = parse_module(q, &v, None).unwrap();
        assert_eq!(m.dims(), &[1, 2]);
        assert_eq!(parse_module(q, &module_to_json(&m), None).unwrap(), m);
        let h = parse_module(
            q,
            &json!({"poset": {"grid": [2, 2]}, "hook": ["1,1", "2,2"]}),
            None,
        )
        .unwrap();
        assert_eq!(h.support().len(), 3);
        let i = parse_module(
            q,
            &json!({"poset": {"grid": [2, 2]}, "interval": ["1,1", "1,2", "2,1"]}),
            None,
        )
        .unwrap();
        assert_eq!(i, h);
        let gf = Field::Prime(5);
        let m5 = parse_module(gf, &v, None).unwrap();
        assert_eq!(
            gf.to_i64(m5.map(0, 1).get(0, 0)),
            Some(gf.to_i64(&gf.from_i64(3)).unwrap())
        );
        let bad = json!({"poset": {"grid": [1, 2]}, "dims": {"1,1": 1, "1,2": 1}, "maps": {"1,1<1,2": [[1, 2]]}});
        assert!(matches!(
            parse_module(q, &bad, None),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn grid_rendering() {
        let g = Arc::new(Poset::grid(2, 3));
        let m = pmod::projective(&g, g.id("1,2").unwrap(), Field::Rational);
        assert_eq!(render_grid(&m).unwrap(), "0 1 1\n0 1 1\n");
    }
}

//! Invariant vectors: dim, rank, mult^E / dimh^E over templates, and
//! multiplicity invariants of embedding families.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::decomp::{builtin_catalog, dimh_profile, mult_from_dimh, IndCatalog};
use crate::error::{Error, Result};
use crate::linalg::{integer_lattice_rank, Matrix};
use crate::pmod::{restrict, PModule};
use crate::poset::{canonicalize, OrderEmbedding, Poset};

/// Integer vector indexed by string keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantVector {
    keys: Vec<String>,
    values: Vec<i64>,
}

impl InvariantVector {
    pub fn new(keys: Vec<String>, values: Vec<i64>) -> Result<Self> {
        if keys.len() != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} keys for {} values",
                keys.len(),
                values.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(k) = keys.iter().find(|k| !seen.insert(k.as_str())) {
            return Err(Error::Format(format!("duplicate key `{k}`")));
        }
        Ok(InvariantVector { keys, values })
    }

    pub fn zeros(keys: Vec<String>) -> Self {
        let values = vec![0; keys.len()];
        InvariantVector { keys, values }
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<i64> {
        self.keys
            .iter()
            .position(|k| k == key)
            .map(|i| self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(i64, i64) -> i64) -> Result<Self> {
        if self.keys != other.keys {
            return Err(Error::KeyMismatch);
        }
        Ok(InvariantVector {
            keys: self.keys.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: i64) -> Self {
        InvariantVector {
            keys: self.keys.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Same values under new key names.
    pub fn relabel(&self, keys: Vec<String>) -> Result<Self> {
        InvariantVector::new(keys, self.values.clone())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in self.keys.iter().zip(&self.values) {
            m.insert(k.clone(), Value::from(*v));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Format("invariant vector must be an object".into()))?;
        let mut keys = Vec::new();
        let mut values = Vec::new();
        for (k, x) in obj {
            keys.push(k.clone());
            values.push(
                x.as_i64()
                    .ok_or_else(|| Error::Format(format!("value of `{k}` is not an integer")))?,
            );
        }
        InvariantVector::new(keys, values)
    }
}

impl fmt::Display for InvariantVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.keys.iter().map(String::len).max().unwrap_or(0);
        for (k, v) in self.keys.iter().zip(&self.values) {
            writeln!(f, "{k:<w$}  {v}")?;
        }
        Ok(())
    }
}

pub fn dim_invariant(m: &PModule) -> InvariantVector {
    let p = m.poset();
    InvariantVector {
        keys: p.elements().iter().map(|e| format!("dim:{e}")).collect(),
        values: m.dims().iter().map(|&d| d as i64).collect(),
    }
}

/// brk: keys `rk:a<=b` over all relations a <= b.
pub fn rank_invariant(m: &PModule) -> InvariantVector {
    let p = m.poset();
    let rel = p.relations();
    InvariantVector {
        keys: rel
            .iter()
            .map(|&(a, b)| format!("rk:{}<={}", p.name(a), p.name(b)))
            .collect(),
        values: rel
            .iter()
            .map(|&(a, b)| m.map(a, b).rank() as i64)
            .collect(),
    }
}

fn check_embeddings(x: &Arc<Poset>, e: &[OrderEmbedding], m: &PModule) -> Result<()> {
    for f in e {
        if **f.source() != **x || **f.target() != **m.poset() {
            return Err(Error::PosetMismatch);
        }
    }
    Ok(())
}

fn per_embedding(
    prefix: &str,
    e: &[OrderEmbedding],
    c: &IndCatalog,
    m: &PModule,
    eval: impl Fn(&IndCatalog, &PModule) -> Result<Vec<i64>> + Sync,
) -> Result<InvariantVector> {
    check_embeddings(c.template(), e, m)?;
    let blocks = e
        .par_iter()
        .map(|f| eval(c, &restrict(f, m)?))
        .collect::<Result<Vec<_>>>()?;
    let mut keys = Vec::new();
    let mut values = Vec::new();
    for (k, b) in blocks.into_iter().enumerate() {
        for (j, v) in b.into_iter().enumerate() {
            keys.push(format!("{prefix}:f#{k}:U#{j}"));
            values.push(v);
        }
    }
    Ok(InvariantVector { keys, values })
}

/// mult^E_{X,P}: multiplicity of each catalog member in each restriction.
pub fn mult_inv(e: &[OrderEmbedding], c: &IndCatalog, m: &PModule) -> Result<InvariantVector> {
    per_embedding("mult", e, c, m, mult_from_dimh)
}

/// dimh^E_{X,P}: dim Hom(U, f*M).
pub fn dimh_inv(e: &[OrderEmbedding], c: &IndCatalog, m: &PModule) -> Result<InvariantVector> {
    per_embedding("dimh", e, c, m, dimh_profile)
}

/// Matrix-vector product `phi * v` under new keys.
pub fn transport(
    phi: &[Vec<i64>],
    v: &InvariantVector,
    new_keys: Vec<String>,
) -> Result<InvariantVector> {
    if phi.len() != new_keys.len() || phi.iter().any(|r| r.len() != v.len()) {
        return Err(Error::ShapeMismatch(format!(
            "transport: {}x{} matrix, vector of length {}, {} keys",
            phi.len(),
            phi.first().map_or(0, Vec::len),
            v.len(),
            new_keys.len()
        )));
    }
    let values = phi
        .iter()
        .map(|r| r.iter().zip(&v.values).map(|(a, b)| a * b).sum())
        .collect();
    InvariantVector::new(new_keys, values)
}

/// Block-diagonal transport: applies `block` to each consecutive chunk.
pub fn transport_blockwise(
    block: &[Vec<i64>],
    v: &InvariantVector,
    new_keys: Vec<String>,
) -> Result<InvariantVector> {
    let w = block.first().map_or(0, Vec::len);
    if w == 0 || !v.len().is_multiple_of(w) || new_keys.len() != v.len() / w * block.len() {
        return Err(Error::ShapeMismatch("blockwise transport".into()));
    }
    let mut values = Vec::with_capacity(new_keys.len());
    for chunk in v.values.chunks(w) {
        for r in block {
            values.push(r.iter().zip(chunk).map(|(a, b)| a * b).sum());
        }
    }
    InvariantVector::new(new_keys, values)
}

/// Rank of the lattice spanned by the invariant's values on `modules`. A
/// lower bound for the invariant's rank when the modules do not span.
pub fn image_rank(
    invariant: impl Fn(&PModule) -> Result<InvariantVector>,
    modules: &[PModule],
) -> Result<usize> {
    let rows = modules
        .iter()
        .map(|m| invariant(m).map(|v| v.values))
        .collect::<Result<Vec<_>>>()?;
    Ok(integer_lattice_rank(&rows))
}

/// One template of an embedding family, optionally with its catalog.
#[derive(Clone, Debug)]
pub struct FamilyPart {
    pub template: Arc<Poset>,
    pub embeddings: Vec<OrderEmbedding>,
    pub catalog: Option<Arc<IndCatalog>>,
}

/// F = {(X_i, E_i)}; keys `fam:f#k` run over the concatenation of the E_i.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingFamily {
    pub parts: Vec<FamilyPart>,
}

impl EmbeddingFamily {
    pub fn embeddings(&self) -> impl Iterator<Item = (&FamilyPart, &OrderEmbedding)> {
        self.parts
            .iter()
            .flat_map(|p| p.embeddings.iter().map(move |f| (p, f)))
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(|p| p.embeddings.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn keys(&self) -> Vec<String> {
        (0..self.len()).map(|k| format!("fam:f#{k}")).collect()
    }

    /// The embedding images, in key order.
    pub fn images(&self) -> Vec<Vec<usize>> {
        self.embeddings().map(|(_, f)| f.image()).collect()
    }

    /// {(X1, all), (X2, all)} over `p`, with builtin catalogs.
    pub fn x1_x2(p: &Arc<Poset>, field: crate::linalg::Field) -> Result<Self> {
        let mut parts = Vec::new();
        for name in ["X1", "X2"] {
            let c = builtin_catalog(name, field)?;
            let embeddings = crate::poset::enumerate_embeddings(c.template(), p);
            parts.push(FamilyPart {
                template: c.template().clone(),
                embeddings,
                catalog: Some(c),
            });
        }
        Ok(EmbeddingFamily { parts })
    }

    /// One inclusion per subset, each induced subposet as its own template.
    pub fn from_subsets(p: &Arc<Poset>, subsets: &[Vec<usize>]) -> Result<Self> {
        let parts = subsets
            .iter()
            .map(|s| {
                let x = Arc::new(p.induced(s));
                let f = OrderEmbedding::new(x.clone(), p.clone(), s.clone())?;
                Ok(FamilyPart {
                    template: x,
                    embeddings: vec![canonicalize(&f)],
                    catalog: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EmbeddingFamily { parts })
    }

    /// All interval subposets (the generalized rank invariant).
    pub fn intervals(p: &Arc<Poset>) -> Result<Self> {
        Self::from_subsets(p, &p.intervals()?)
    }

    /// Connected subposets without chains of three elements.
    pub fn chain_length_lt3(p: &Arc<Poset>) -> Result<Self> {
        Self::from_subsets(p, &p.height_two_subsets()?)
    }

    /// Swaps each template for an isomorphic builtin one and attaches its
    /// catalog; `UnknownCatalog` when no builtin template matches.
    pub fn with_builtin_catalogs(&self, field: crate::linalg::Field) -> Result<Self> {
        let parts = self
            .parts
            .iter()
            .map(|part| {
                let x = &part.template;
                for name in crate::decomp::BUILTIN_NAMES {
                    let c = builtin_catalog(name, field)?;
                    if c.template().len() != x.len() {
                        continue;
                    }
                    if let Some(iso) = crate::poset::enumerate_embeddings(c.template(), x)
                        .into_iter()
                        .next()
                    {
                        return Ok(FamilyPart {
                            template: c.template().clone(),
                            embeddings: part.embeddings.iter().map(|f| f.compose(&iso)).collect(),
                            catalog: Some(c),
                        });
                    }
                }
                Err(Error::UnknownCatalog(format!(
                    "no builtin template with {} elements matches",
                    x.len()
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EmbeddingFamily { parts })
    }
}

/// Index of the sincere interval module in a catalog.
pub fn sincere_member(c: &IndCatalog) -> Result<usize> {
    let x = c.template();
    let all: Vec<usize> = (0..x.len()).collect();
    (0..c.len())
        .find(|&i| crate::pmod::is_interval_module_on(c.module(i), &all))
        .ok_or(Error::NotConnected)
}

/// Rank of the canonical map lim M -> colim M over a connected poset.
pub fn lim_colim_rank(m: &PModule) -> Result<usize> {
    let p = m.poset();
    if p.is_empty() || !p.is_connected() {
        return Err(Error::NotConnected);
    }
    let f = m.field();
    let n = p.len();
    let mut offs = Vec::with_capacity(n);
    let mut total = 0;
    for a in 0..n {
        offs.push(total);
        total += m.dim(a);
    }
    if total == 0 {
        return Ok(0);
    }
    // relation vectors: v_a embedded at a minus M_ab v_a at b
    let mut rel_cols: Vec<Matrix> = Vec::new();
    for &(a, b) in p.covers() {
        let mab = m.map(a, b);
        for j in 0..m.dim(a) {
            let col = Matrix::from_fn(f, total, 1, |r, _| {
                if r >= offs[a] && r < offs[a] + m.dim(a) {
                    if r - offs[a] == j {
                        f.one()
                    } else {
                        f.zero()
                    }
                } else if r >= offs[b] && r < offs[b] + m.dim(b) {
                    f.neg(mab.get(r - offs[b], j))
                } else {
                    f.zero()
                }
            });
            rel_cols.push(col);
        }
    }
    let refs: Vec<&Matrix> = rel_cols.iter().collect();
    let rel = Matrix::hstack(f, total, &refs);
    // lim = {v : rel^T-style constraints M_ab v_a = v_b}
    let lim = {
        let eqs: Vec<Matrix> = p
            .covers()
            .iter()
            .map(|&(a, b)| {
                let mab = m.map(a, b);
                Matrix::from_fn(f, m.dim(b), total, |i, c| {
                    if c >= offs[a] && c < offs[a] + m.dim(a) {
                        mab.get(i, c - offs[a]).clone()
                    } else if c >= offs[b] && c < offs[b] + m.dim(b) {
                        if c - offs[b] == i {
                            f.neg(&f.one())
                        } else {
                            f.zero()
                        }
                    } else {
                        f.zero()
                    }
                })
            })
            .collect();
        let refs: Vec<&Matrix> = eqs.iter().collect();
        Matrix::vstack(f, total, &refs).kernel_basis()
    };
    let x = 0;
    let q = rel.cokernel_projection();
    // lim -> M_x -> colim
    let at_x = Matrix::from_fn(f, total, m.dim(x), |r, c| {
        if r == offs[x] + c {
            f.one()
        } else {
            f.zero()
        }
    });
    let pick = Matrix::from_fn(f, m.dim(x), total, |r, c| {
        if c == offs[x] + r {
            f.one()
        } else {
            f.zero()
        }
    });
    Ok(q.mul(&at_x).mul(&pick.mul(&lim)).rank())
}

/// mult_F: multiplicity of the sincere interval of X_i in f*M for each f.
/// Uses the catalog when present, the lim -> colim rank otherwise.
pub fn family_mult(fam: &EmbeddingFamily, m: &PModule) -> Result<InvariantVector> {
    let pairs: Vec<(&FamilyPart, &OrderEmbedding)> = fam.embeddings().collect();
    let values = pairs
        .par_iter()
        .map(|(part, f)| {
            if **f.target() != **m.poset() {
                return Err(Error::PosetMismatch);
            }
            let r = restrict(f, m)?;
            match &part.catalog {
                Some(c) => Ok(mult_from_dimh(c, &r)?[sincere_member(c)?]),
                None => lim_colim_rank(&r).map(|v| v as i64),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    InvariantVector::new(fam.keys(), values)
}

fn stacked_rank_into(m: &PModule, sources: &[usize], b: usize) -> usize {
    let parts: Vec<&Matrix> = sources.iter().map(|&s| m.map(s, b)).collect();
    Matrix::hstack(m.field(), m.dim(b), &parts).rank()
}

/// Closed-form multiplicities on small templates, in catalog member order.
/// Supports X1, X2, X3_chain, X3_fork and X3_cofork.
///
/// For X3_fork the formulas use `k = rk(1->2) + rk(1->3) - rk(1 -> 2 (+) 3)`;
/// X3_cofork is the dual with `j = rk(1 (+) 2 -> 3)`.
pub fn closed_form_mult(c: &IndCatalog, f: &OrderEmbedding, m: &PModule) -> Result<Vec<i64>> {
    check_embeddings(c.template(), std::slice::from_ref(f), m)?;
    let r = restrict(f, m)?;
    let d = |a: usize| r.dim(a) as i64;
    let rk = |a: usize, b: usize| r.map(a, b).rank() as i64;
    let by_name: HashMap<&str, i64> = match c.name() {
        "X1" => HashMap::from([("I{1}", d(0))]),
        "X2" => HashMap::from([
            ("I{2}", d(1) - rk(0, 1)),
            ("I{1,2}", rk(0, 1)),
            ("I{1}", d(0) - rk(0, 1)),
        ]),
        "X3_chain" => HashMap::from([
            ("I{1}", d(0) - rk(0, 1)),
            ("I{2}", d(1) - rk(0, 1) - rk(1, 2) + rk(0, 2)),
            ("I{3}", d(2) - rk(1, 2)),
            ("I{1,2}", rk(0, 1) - rk(0, 2)),
            ("I{2,3}", rk(1, 2) - rk(0, 2)),
            ("I{1,2,3}", rk(0, 2)),
        ]),
        "X3_fork" => {
            let k = rk(0, 1) + rk(0, 2) - r.joint_rank(0, &[1, 2])? as i64;
            HashMap::from([
                ("I{1}", d(0) - rk(0, 1) - rk(0, 2) + k),
                ("I{2}", d(1) - rk(0, 1)),
                ("I{3}", d(2) - rk(0, 2)),
                ("I{1,2}", rk(0, 1) - k),
                ("I{1,3}", rk(0, 2) - k),
                ("I{1,2,3}", k),
            ])
        }
        "X3_cofork" => {
            let j = stacked_rank_into(&r, &[0, 1], 2) as i64;
            HashMap::from([
                ("I{3}", d(2) - j),
                ("I{1}", d(0) - rk(0, 2)),
                ("I{2}", d(1) - rk(1, 2)),
                ("I{1,3}", j - rk(1, 2)),
                ("I{2,3}", j - rk(0, 2)),
                ("I{1,2,3}", rk(0, 2) + rk(1, 2) - j),
            ])
        }
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    c.names()
        .iter()
        .map(|n| {
            by_name
                .get(n.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownCatalog(n.clone()))
        })
        .collect()
}

/// The X3_fork closed form read with the joint rank `rk(1 -> 2 (+) 3)` in
/// place of `k`; kept to document that this reading is inconsistent.
pub fn fork_joint_rank_reading(
    c: &IndCatalog,
    f: &OrderEmbedding,
    m: &PModule,
) -> Result<Vec<i64>> {
    let r = restrict(f, m)?;
    let d = |a: usize| r.dim(a) as i64;
    let rk = |a: usize, b: usize| r.map(a, b).rank() as i64;
    let j = r.joint_rank(0, &[1, 2])? as i64;
    let by_name: HashMap<&str, i64> = HashMap::from([
        ("I{1}", d(0) - rk(0, 1) - rk(0, 2) + j),
        ("I{2}", d(1) - rk(0, 1)),
        ("I{3}", d(2) - rk(0, 2)),
        ("I{1,2}", rk(0, 1) - j),
        ("I{1,3}", rk(0, 2) - j),
        ("I{1,2,3}", j),
    ]);
    c.names()
        .iter()
        .map(|n| {
            by_name
                .get(n.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownCatalog(n.clone()))
        })
        .collect()
}

/// dim(Im M_{a->b} ∩ Im M_{c->b} ∩ Im M_{d->b}) on the D4 sink template.
pub fn d4_triple_intersection(m: &PModule) -> Result<usize> {
    let p = m.poset();
    let b = p.id("b")?;
    let imgs: Vec<Matrix> = ["a", "c", "d"]
        .iter()
        .map(|s| p.id(s).map(|x| m.map(x, b).image_basis()))
        .collect::<Result<_>>()?;
    Ok(crate::linalg::subspace_intersection(&imgs)?.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::pmod::{self, direct_sum, interval_module, projective, simple};
    use crate::poset::enumerate_embeddings;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn dim_and_rank() {
        let g = Arc::new(Poset::grid(2, 2));
        let r = pmod::rectangle(&g, 0, 3, q()).unwrap();
        assert!(rank_invariant(&r).values().iter().all(|&v| v == 1));
        let s = direct_sum(&simple(&g, 0, q()), &projective(&g, 0, q())).unwrap();
        assert_eq!(rank_invariant(&s).get("rk:1,1<=1,1"), Some(2));
        assert_eq!(rank_invariant(&s).get("rk:1,1<=2,2"), Some(1));
        assert_eq!(dim_invariant(&s).get("dim:1,1"), Some(2));
        let v = dim_invariant(&s);
        assert_eq!(v.add(&v).unwrap(), v.scale(2));
        assert!(matches!(
            v.add(&rank_invariant(&s)),
            Err(Error::KeyMismatch)
        ));
    }

    #[test]
    fn closed_forms_match_catalogs() {
        let g = Arc::new(Poset::grid(3, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in ["X1", "X2", "X3_chain", "X3_fork", "X3_cofork"] {
            let c = builtin_catalog(name, q()).unwrap();
            let embs = enumerate_embeddings(c.template(), &g);
            for t in 0..5 {
                let m = pmod::random_module(&g, q(), 3, &mut rng);
                let f = &embs[(t * 5) % embs.len()];
                let want = mult_from_dimh(&c, &restrict(f, &m).unwrap()).unwrap();
                assert_eq!(closed_form_mult(&c, f, &m).unwrap(), want, "{name}");
            }
        }
    }

    #[test]
    fn joint_rank_reading_fails_on_hook() {
        let c = builtin_catalog("X3_fork", q()).unwrap();
        let x = c.template().clone();
        let id = OrderEmbedding::identity(x.clone());
        let m = interval_module(&x, &[0, 1], q()).unwrap();
        assert_ne!(
            fork_joint_rank_reading(&c, &id, &m).unwrap(),
            mult_from_dimh(&c, &m).unwrap()
        );
    }

    #[test]
    fn lim_colim_agrees_with_catalog() {
        let g = Arc::new(Poset::grid(3, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for name in ["X2", "X3_fork", "X3_cofork", "X4_D4_sink", "diamond"] {
            let c = builtin_catalog(name, q()).unwrap();
            let s = sincere_member(&c).unwrap();
            let embs = enumerate_embeddings(c.template(), &g);
            for t in 0..4 {
                let m = pmod::random_module(&g, q(), 2, &mut rng);
                let r = restrict(&embs[t % embs.len()], &m).unwrap();
                assert_eq!(
                    lim_colim_rank(&r).unwrap() as i64,
                    mult_from_dimh(&c, &r).unwrap()[s],
                    "{name}"
                );
            }
        }
    }

    #[test]
    fn d4_intersection() {
        let c = builtin_catalog("X4_D4_sink", q()).unwrap();
        let s = sincere_member(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let m = pmod::random_module(c.template(), q(), 3, &mut rng);
            assert_eq!(
                d4_triple_intersection(&m).unwrap() as i64,
                mult_from_dimh(&c, &m).unwrap()[s]
            );
        }
    }

    #[test]
    fn x1_x2_family_is_brk() {
        let g = Arc::new(Poset::grid(2, 3));
        let fam = EmbeddingFamily::x1_x2(&g, q()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = pmod::random_module(&g, q(), 3, &mut rng);
        let v = family_mult(&fam, &m).unwrap();
        for ((_, f), val) in fam.embeddings().zip(v.values()) {
            let im = f.image();
            let (a, b) = (im[0], *im.last().unwrap());
            assert_eq!(*val, m.map(a, b).rank() as i64);
        }
        assert_eq!(v.len(), g.relations().len());
    }

    #[test]
    fn transports() {
        let v = InvariantVector::new(vec!["a".into(), "b".into()], vec![2, 3]).unwrap();
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(transport(&id, &v, v.keys().to_vec()).unwrap(), v);
        assert!(transport(&id[..1], &v, v.keys().to_vec()).is_err());
        let rt = InvariantVector::from_json(&v.to_json()).unwrap();
        assert_eq!(rt, v);
    }
}

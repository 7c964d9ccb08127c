//! Persistence modules over finite posets and morphisms between them.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::poset::{OrderEmbedding, Poset};

#[derive(Debug)]
struct Inner {
    poset: Arc<Poset>,
    field: Field,
    dims: Vec<usize>,
    // parallel to poset.covers()
    cover_maps: Vec<Matrix>,
    // M_{a->b} for every a <= b, filled during validation
    structure: HashMap<(usize, usize), Matrix>,
}

/// A validated P-module: a vector space per element and commuting maps.
///
/// Cheap to clone.
#[derive(Clone, Debug)]
pub struct PModule(Arc<Inner>);

impl PartialEq for PModule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field
                && self.0.dims == other.0.dims
                && self.0.cover_maps == other.0.cover_maps
                && *self.0.poset == *other.0.poset)
    }
}

impl Eq for PModule {}

impl PModule {
    /// Builds and validates a module. Covers missing from `maps` get zero maps.
    pub fn new(
        poset: Arc<Poset>,
        field: Field,
        dims: Vec<usize>,
        mut maps: HashMap<(usize, usize), Matrix>,
    ) -> Result<PModule> {
        if dims.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} dimensions for {} elements",
                dims.len(),
                poset.len()
            )));
        }
        for &(a, b) in maps.keys() {
            if !poset.is_cover(a, b) {
                return Err(Error::ShapeMismatch(format!(
                    "{}<{} is not a cover relation",
                    poset.name(a),
                    poset.name(b)
                )));
            }
        }
        let mut cover_maps = Vec::with_capacity(poset.covers().len());
        for &(a, b) in poset.covers() {
            let m = maps
                .remove(&(a, b))
                .unwrap_or_else(|| Matrix::zeros(field, dims[b], dims[a]));
            if m.shape() != (dims[b], dims[a]) {
                return Err(Error::ShapeMismatch(format!(
                    "map {}<{} is {}x{}, expected {}x{}",
                    poset.name(a),
                    poset.name(b),
                    m.rows(),
                    m.cols(),
                    dims[b],
                    dims[a]
                )));
            }
            if m.field() != field {
                return Err(Error::FieldMismatch);
            }
            cover_maps.push(m);
        }
        let structure = validate(&poset, field, &dims, &cover_maps)?;
        Ok(PModule(Arc::new(Inner {
            poset,
            field,
            dims,
            cover_maps,
            structure,
        })))
    }

    pub fn zero(poset: Arc<Poset>, field: Field) -> PModule {
        let n = poset.len();
        PModule::new(poset, field, vec![0; n], HashMap::new()).expect("zero module")
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.0.poset
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn dim(&self, a: usize) -> usize {
        self.0.dims[a]
    }

    pub fn total_dim(&self) -> usize {
        self.0.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.dims.len())
            .filter(|&a| self.0.dims[a] > 0)
            .collect()
    }

    /// Cover maps keyed by cover, in Hasse order.
    pub fn cover_maps(&self) -> impl Iterator<Item = ((usize, usize), &Matrix)> {
        self.0
            .poset
            .covers()
            .iter()
            .copied()
            .zip(self.0.cover_maps.iter())
    }

    /// `M_{a->b}`; panics unless `a <= b`.
    pub fn map(&self, a: usize, b: usize) -> &Matrix {
        self.0
            .structure
            .get(&(a, b))
            .unwrap_or_else(|| panic!("no structure map {a}->{b}: not comparable"))
    }

    pub fn try_map(&self, a: usize, b: usize) -> Result<&Matrix> {
        self.0.structure.get(&(a, b)).ok_or_else(|| {
            Error::OrderViolation(format!(
                "{} is not below {}",
                self.0.poset.name(a),
                self.0.poset.name(b)
            ))
        })
    }

    pub fn same_poset(&self, other: &PModule) -> bool {
        Arc::ptr_eq(&self.0.poset, &other.0.poset) || *self.0.poset == *other.0.poset
    }

    pub fn dim_vector(&self) -> Vec<usize> {
        self.0.dims.clone()
    }

    pub fn rank_pair(&self, a: usize, b: usize) -> Result<usize> {
        Ok(self.try_map(a, b)?.rank())
    }

    /// Rank of the stacked map `M_a -> (+)_t M_t`.
    pub fn joint_rank(&self, a: usize, targets: &[usize]) -> Result<usize> {
        let parts = targets
            .iter()
            .map(|&t| self.try_map(a, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::vstack(self.field(), self.dim(a), &parts).rank())
    }
}

/// The inductive path-independence check. Returns every composite.
fn validate(
    poset: &Poset,
    field: Field,
    dims: &[usize],
    cover_maps: &[Matrix],
) -> Result<HashMap<(usize, usize), Matrix>> {
    let cover_idx: HashMap<(usize, usize), usize> = poset
        .covers()
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let n = poset.len();
    let mut st: HashMap<(usize, usize), Matrix> = HashMap::new();
    for &a in poset.linear_extension().iter().rev() {
        st.insert((a, a), Matrix::identity(field, dims[a]));
        for b in 0..n {
            if !poset.lt(a, b) {
                continue;
            }
            let ups: Vec<usize> = poset
                .upper_covers(a)
                .iter()
                .copied()
                .filter(|&x| poset.leq(x, b))
                .collect();
            let x0 = ups[0];
            let canonical = st[&(x0, b)].mul(&cover_maps[cover_idx[&(a, x0)]]);
            for &y in &ups[1..] {
                let other = st[&(y, b)].mul(&cover_maps[cover_idx[&(a, y)]]);
                if other != canonical {
                    return Err(Error::CommutativityViolation {
                        a: poset.name(a).into(),
                        x: poset.name(x0).into(),
                        y: poset.name(y).into(),
                        b: poset.name(b).into(),
                    });
                }
            }
            st.insert((a, b), canonical);
        }
    }
    Ok(st)
}

/// `I_S`: one-dimensional on `S`, identities inside.
pub fn interval_module(poset: &Arc<Poset>, s: &[usize], field: Field) -> Result<PModule> {
    if !poset.is_interval(s) {
        return Err(Error::NotAnInterval);
    }
    Ok(thin_module(poset, s, field))
}

/// One-dimensional on `s` with identities on covers inside `s`; the caller
/// guarantees commutativity (convex `s` suffices).
fn thin_module(poset: &Arc<Poset>, s: &[usize], field: Field) -> PModule {
    let mut dims = vec![0; poset.len()];
    for &x in s {
        dims[x] = 1;
    }
    let maps = poset
        .covers()
        .iter()
        .filter(|&&(a, b)| dims[a] == 1 && dims[b] == 1)
        .map(|&c| (c, Matrix::identity(field, 1)))
        .collect();
    PModule::new(poset.clone(), field, dims, maps).expect("convex support commutes")
}

pub fn projective(poset: &Arc<Poset>, a: usize, field: Field) -> PModule {
    thin_module(poset, &poset.up_set(a), field)
}

pub fn injective(poset: &Arc<Poset>, a: usize, field: Field) -> PModule {
    thin_module(poset, &poset.down_set(a), field)
}

pub fn simple(poset: &Arc<Poset>, a: usize, field: Field) -> PModule {
    thin_module(poset, &[a], field)
}

pub fn rectangle(poset: &Arc<Poset>, a: usize, b: usize, field: Field) -> Result<PModule> {
    if !poset.leq(a, b) {
        return Err(order_err(poset, a, b, "<="));
    }
    Ok(thin_module(poset, &poset.segment(a, b), field))
}

/// H_{a,b} on [a,b[.
pub fn hook(poset: &Arc<Poset>, a: usize, b: usize, field: Field) -> Result<PModule> {
    if !poset.lt(a, b) {
        return Err(order_err(poset, a, b, "<"));
    }
    Ok(thin_module(poset, &poset.hook_set(a, b), field))
}

/// C_{a,b} on ]a,b].
pub fn cohook(poset: &Arc<Poset>, a: usize, b: usize, field: Field) -> Result<PModule> {
    if !poset.lt(a, b) {
        return Err(order_err(poset, a, b, "<"));
    }
    Ok(thin_module(poset, &poset.cohook_set(a, b), field))
}

pub fn sincere_interval(poset: &Arc<Poset>, field: Field) -> Result<PModule> {
    if !poset.is_connected() {
        return Err(Error::NotConnected);
    }
    let all: Vec<usize> = (0..poset.len()).collect();
    Ok(thin_module(poset, &all, field))
}

fn order_err(poset: &Poset, a: usize, b: usize, rel: &str) -> Error {
    Error::OrderViolation(format!("need {} {rel} {}", poset.name(a), poset.name(b)))
}

pub fn direct_sum(m: &PModule, n: &PModule) -> Result<PModule> {
    if !m.same_poset(n) {
        return Err(Error::PosetMismatch);
    }
    if m.field() != n.field() {
        return Err(Error::FieldMismatch);
    }
    let dims = (0..m.dims().len()).map(|a| m.dim(a) + n.dim(a)).collect();
    let maps = m
        .cover_maps()
        .zip(n.cover_maps())
        .map(|((c, x), (_, y))| (c, x.block_diag(y)))
        .collect();
    PModule::new(m.poset().clone(), m.field(), dims, maps)
}

/// Direct sum of a list; the zero module when empty.
pub fn direct_sum_all(poset: &Arc<Poset>, field: Field, parts: &[PModule]) -> Result<PModule> {
    let mut acc = PModule::zero(poset.clone(), field);
    for p in parts {
        acc = direct_sum(&acc, p)?;
    }
    Ok(acc)
}

/// f*M: (f*M)_x = M_{f(x)}, cover maps are composites in the target.
pub fn restrict(f: &OrderEmbedding, m: &PModule) -> Result<PModule> {
    if **f.target() != **m.poset() {
        return Err(Error::PosetMismatch);
    }
    let x = f.source();
    let dims = (0..x.len()).map(|i| m.dim(f.apply(i))).collect();
    let maps = x
        .covers()
        .iter()
        .map(|&(a, b)| ((a, b), m.map(f.apply(a), f.apply(b)).clone()))
        .collect();
    PModule::new(x.clone(), m.field(), dims, maps)
}

/// Rescales a pointwise at most one-dimensional module so that every
/// nonzero cover map becomes 1. Returns `None` when some dimension exceeds 1.
pub fn thin_normal_form(m: &PModule) -> Option<PModule> {
    if m.dims().iter().any(|&d| d > 1) {
        return None;
    }
    let f = m.field();
    let p = m.poset();
    let n = p.len();
    let mut scale: Vec<Option<Scalar>> = vec![None; n];
    let nonzero: Vec<((usize, usize), Scalar)> = m
        .cover_maps()
        .filter(|(_, x)| x.shape() == (1, 1) && !f.is_zero(x.get(0, 0)))
        .map(|(c, x)| (c, x.get(0, 0).clone()))
        .collect();
    for root in 0..n {
        if m.dim(root) == 0 || scale[root].is_some() {
            continue;
        }
        scale[root] = Some(f.one());
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let sx = scale[x].clone().unwrap();
            for ((a, b), v) in &nonzero {
                // new map = s_b * v / s_a, forced to 1
                if *a == x && scale[*b].is_none() {
                    scale[*b] = Some(f.mul(&sx, &f.inv(v)));
                    stack.push(*b);
                } else if *b == x && scale[*a].is_none() {
                    scale[*a] = Some(f.mul(&sx, v));
                    stack.push(*a);
                }
            }
        }
    }
    let maps = m
        .cover_maps()
        .map(|((a, b), x)| {
            let y = if x.shape() == (1, 1) {
                let (sa, sb) = (scale[a].clone().unwrap(), scale[b].clone().unwrap());
                let v = f.mul(&f.mul(&sb, x.get(0, 0)), &f.inv(&sa));
                Matrix::from_fn(f, 1, 1, |_, _| v.clone())
            } else {
                x.clone()
            };
            ((a, b), y)
        })
        .collect();
    PModule::new(p.clone(), f, m.dim_vector(), maps).ok()
}

/// Is `m` isomorphic to `I_S` for its own support, via rescaling?
pub fn is_interval_module_on(m: &PModule, s: &[usize]) -> bool {
    let Some(norm) = thin_normal_form(m) else {
        return false;
    };
    match interval_module(m.poset(), s, m.field()) {
        Ok(i) => i == norm,
        Err(_) => false,
    }
}

/// A natural transformation between modules over the same poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMorphism {
    source: PModule,
    target: PModule,
    components: Vec<Matrix>,
}

impl ModuleMorphism {
    pub fn new(source: PModule, target: PModule, components: Vec<Matrix>) -> Result<Self> {
        if !source.same_poset(&target) {
            return Err(Error::PosetMismatch);
        }
        let p = source.poset().clone();
        if components.len() != p.len() {
            return Err(Error::ShapeMismatch(
                "one component per element expected".into(),
            ));
        }
        for (a, c) in components.iter().enumerate() {
            if c.shape() != (target.dim(a), source.dim(a)) {
                return Err(Error::ShapeMismatch(format!(
                    "component at {} has shape {:?}",
                    p.name(a),
                    c.shape()
                )));
            }
        }
        for &(a, b) in p.covers() {
            if target.map(a, b).mul(&components[a]) != components[b].mul(source.map(a, b)) {
                return Err(Error::NotNatural(format!("{}<{}", p.name(a), p.name(b))));
            }
        }
        Ok(ModuleMorphism {
            source,
            target,
            components,
        })
    }

    pub fn zero(source: &PModule, target: &PModule) -> Result<Self> {
        let f = source.field();
        let comps = (0..source.dims().len())
            .map(|a| Matrix::zeros(f, target.dim(a), source.dim(a)))
            .collect();
        ModuleMorphism::new(source.clone(), target.clone(), comps)
    }

    pub fn identity(m: &PModule) -> Self {
        let f = m.field();
        let comps = m.dims().iter().map(|&d| Matrix::identity(f, d)).collect();
        ModuleMorphism {
            source: m.clone(),
            target: m.clone(),
            components: comps,
        }
    }

    pub fn source(&self) -> &PModule {
        &self.source
    }

    pub fn target(&self) -> &PModule {
        &self.target
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Matrix {
        &self.components[a]
    }

    /// `other o self`.
    pub fn then(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        if self.target != other.source {
            return Err(Error::PosetMismatch);
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| b.mul(a))
            .collect();
        Ok(ModuleMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            components: comps,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().all(|c| c.rank() == c.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.components.iter().all(|c| c.rank() == c.rows())
    }

    pub fn restrict(&self, f: &OrderEmbedding) -> Result<ModuleMorphism> {
        let s = restrict(f, &self.source)?;
        let t = restrict(f, &self.target)?;
        let comps = (0..f.source().len())
            .map(|x| self.components[f.apply(x)].clone())
            .collect();
        Ok(ModuleMorphism {
            source: s,
            target: t,
            components: comps,
        })
    }

    /// Kernel module with its inclusion.
    pub fn kernel(&self) -> Result<(PModule, ModuleMorphism)> {
        let bases = self.components.iter().map(|c| c.kernel_basis()).collect();
        submodule(&self.source, bases)
    }

    /// Image module with its inclusion into the target.
    pub fn image(&self) -> Result<(PModule, ModuleMorphism)> {
        let bases = self.components.iter().map(|c| c.image_basis()).collect();
        submodule(&self.target, bases)
    }

    /// Cokernel module with its projection from the target.
    pub fn cokernel(&self) -> Result<(PModule, ModuleMorphism)> {
        let bases = self.components.iter().map(|c| c.image_basis()).collect();
        quotient(&self.target, bases)
    }

    /// Direct sum of two morphisms.
    pub fn direct_sum(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        let s = direct_sum(&self.source, &other.source)?;
        let t = direct_sum(&self.target, &other.target)?;
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.block_diag(b))
            .collect();
        ModuleMorphism::new(s, t, comps)
    }
}

/// The submodule spanned pointwise by the columns of `bases` (full column
/// rank, closed under the structure maps).
pub fn submodule(m: &PModule, bases: Vec<Matrix>) -> Result<(PModule, ModuleMorphism)> {
    let p = m.poset();
    let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
    let mut maps = HashMap::new();
    for &(a, b) in p.covers() {
        let rhs = m.map(a, b).mul(&bases[a]);
        let x = bases[b].solve(&rhs)?.ok_or_else(|| {
            Error::NoSolution(format!(
                "subspaces not closed under {}<{}",
                p.name(a),
                p.name(b)
            ))
        })?;
        maps.insert((a, b), x);
    }
    let sub = PModule::new(p.clone(), m.field(), dims, maps)?;
    let incl = ModuleMorphism::new(sub.clone(), m.clone(), bases)?;
    Ok((sub, incl))
}

/// The quotient of `m` by the submodule spanned by `bases`.
pub fn quotient(m: &PModule, bases: Vec<Matrix>) -> Result<(PModule, ModuleMorphism)> {
    let p = m.poset();
    let qs: Vec<Matrix> = bases.iter().map(|b| b.cokernel_projection()).collect();
    let sections: Vec<Matrix> = qs
        .iter()
        .map(|q| q.right_inverse().expect("projection has full row rank"))
        .collect();
    let dims: Vec<usize> = qs.iter().map(|q| q.rows()).collect();
    let maps = p
        .covers()
        .iter()
        .map(|&(a, b)| ((a, b), qs[b].mul(m.map(a, b)).mul(&sections[a])))
        .collect();
    let quo = PModule::new(p.clone(), m.field(), dims, maps)?;
    let proj = ModuleMorphism::new(m.clone(), quo.clone(), qs)?;
    Ok((quo, proj))
}

/// A random module: dimensions uniform in `0..=max_dim`, entries uniform in
/// `-2..=2`. Elements are filled along the linear extension; where several
/// lower covers meet, the incoming maps are a random point of the solution
/// space of the commutativity constraints.
pub fn random_module<R: Rng>(
    poset: &Arc<Poset>,
    field: Field,
    max_dim: usize,
    rng: &mut R,
) -> PModule {
    let n = poset.len();
    let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_dim)).collect();
    let mut comp: HashMap<(usize, usize), Matrix> = HashMap::new();
    let mut maps = HashMap::new();
    let rand_entry = |rng: &mut R| field.from_i64(rng.gen_range(-2..=2));
    for &b in poset.linear_extension() {
        comp.insert((b, b), Matrix::identity(field, dims[b]));
        let lows = poset.lower_covers(b).to_vec();
        let offs: Vec<usize> = lows
            .iter()
            .scan(0, |acc, &a| {
                let o = *acc;
                *acc += dims[b] * dims[a];
                Some(o)
            })
            .collect();
        let nvars: usize = lows.iter().map(|&a| dims[b] * dims[a]).sum();
        // constraints g_i M_{c->a_i} = g_j M_{c->a_j}
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for i in 0..lows.len() {
            for j in (i + 1)..lows.len() {
                let (ai, aj) = (lows[i], lows[j]);
                for c in 0..n {
                    if !(poset.leq(c, ai) && poset.leq(c, aj)) || dims[c] == 0 {
                        continue;
                    }
                    let (mi, mj) = (&comp[&(c, ai)], &comp[&(c, aj)]);
                    for r in 0..dims[b] {
                        for s in 0..dims[c] {
                            let mut row = vec![field.zero(); nvars];
                            for t in 0..dims[ai] {
                                row[offs[i] + r * dims[ai] + t] = mi.get(t, s).clone();
                            }
                            for t in 0..dims[aj] {
                                row[offs[j] + r * dims[aj] + t] = field.neg(mj.get(t, s));
                            }
                            rows.push(row);
                        }
                    }
                }
            }
        }
        let values: Vec<Scalar> = if rows.is_empty() {
            (0..nvars).map(|_| rand_entry(rng)).collect()
        } else {
            let nr = rows.len();
            let sys = Matrix::from_scalars(field, nr, nvars, rows.into_iter().flatten().collect())
                .expect("rectangular system");
            let k = sys.kernel_basis();
            let coeffs = Matrix::from_fn(field, k.cols(), 1, |_, _| rand_entry(rng));
            let v = k.mul(&coeffs);
            (0..nvars).map(|i| v.get(i, 0).clone()).collect()
        };
        for (i, &a) in lows.iter().enumerate() {
            let g = Matrix::from_fn(field, dims[b], dims[a], |r, t| {
                values[offs[i] + r * dims[a] + t].clone()
            });
            for c in 0..n {
                if poset.leq(c, a) && !comp.contains_key(&(c, b)) {
                    comp.insert((c, b), g.mul(&comp[&(c, a)]));
                }
            }
            maps.insert((a, b), g);
        }
    }
    PModule::new(poset.clone(), field, dims, maps).expect("random module commutes by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diamond() -> Arc<Poset> {
        Arc::new(
            Poset::from_relations(
                &["a", "b", "c", "d"],
                &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
            )
            .unwrap(),
        )
    }

    fn one(f: Field, v: i64) -> Matrix {
        Matrix::from_ints(f, &[vec![v]], 1)
    }

    #[test]
    fn validation() {
        let p = diamond();
        let q = Field::Rational;
        assert!(PModule::new(p.clone(), q, vec![0; 4], HashMap::new()).is_ok());
        let mut maps = HashMap::new();
        for &(a, b) in p.covers() {
            maps.insert((a, b), one(q, 1));
        }
        let ip = PModule::new(p.clone(), q, vec![1; 4], maps.clone()).unwrap();
        assert_eq!(ip, sincere_interval(&p, q).unwrap());
        let (c, d) = (p.id("c").unwrap(), p.id("d").unwrap());
        maps.insert((c, d), one(q, -1));
        assert!(matches!(
            PModule::new(p.clone(), q, vec![1; 4], maps),
            Err(Error::CommutativityViolation { .. })
        ));
        let mut bad = HashMap::new();
        bad.insert((0, 1), Matrix::zeros(q, 2, 1));
        assert!(matches!(
            PModule::new(p, q, vec![1; 4], bad),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn constructors() {
        let q = Field::Rational;
        let g = Arc::new(Poset::grid(3, 3));
        let (a, b) = (g.id("1,1").unwrap(), g.id("2,2").unwrap());
        let h = hook(&g, a, b, q).unwrap();
        let expect: Vec<usize> = (0..9)
            .filter(|&k| {
                let (i, j) = (k / 3 + 1, k % 3 + 1);
                !(i >= 2 && j >= 2)
            })
            .collect();
        assert_eq!(h.support(), expect);
        assert!(hook(&g, b, a, q).is_err());
        let x2 = Arc::new(Poset::chain(2));
        assert_eq!(rectangle(&x2, 0, 1, q).unwrap().support(), vec![0, 1]);
        assert_eq!(cohook(&x2, 0, 1, q).unwrap().support(), vec![1]);
        assert_eq!(interval_module(&x2, &[0], q).unwrap(), simple(&x2, 0, q));
        let d = diamond();
        assert_eq!(interval_module(&d, &[1, 2], q), Err(Error::NotAnInterval));
        let disc = Arc::new(Poset::from_relations(&["a", "b"], &[]).unwrap());
        assert_eq!(sincere_interval(&disc, q), Err(Error::NotConnected));
    }

    #[test]
    fn sums_and_restriction() {
        let q = Field::Rational;
        let d = diamond();
        let sa = simple(&d, 0, q);
        let ss = direct_sum(&sa, &sa).unwrap();
        assert_eq!(ss.dims(), &[2, 0, 0, 0]);
        assert_eq!(direct_sum(&sa, &PModule::zero(d.clone(), q)).unwrap(), sa);
        let x2 = Arc::new(Poset::chain(2));
        let f = OrderEmbedding::new(x2.clone(), d.clone(), vec![0, 3]).unwrap();
        assert!(restrict(&f, &simple(&d, 1, q)).unwrap().is_zero());
        let g = OrderEmbedding::new(x2.clone(), d.clone(), vec![0, 1]).unwrap();
        let ip = sincere_interval(&d, q).unwrap();
        assert_eq!(restrict(&g, &ip).unwrap(), rectangle(&x2, 0, 1, q).unwrap());
        let id = OrderEmbedding::identity(d.clone());
        assert_eq!(restrict(&id, &ip).unwrap(), ip);
    }

    #[test]
    fn ranks() {
        let q = Field::Rational;
        let d = diamond();
        let r = rectangle(&d, 0, 1, q).unwrap();
        assert_eq!(r.rank_pair(0, 1).unwrap(), 1);
        let s = direct_sum(&simple(&d, 0, q), &simple(&d, 1, q)).unwrap();
        assert_eq!(s.rank_pair(0, 1).unwrap(), 0);
        assert!(s.rank_pair(1, 2).is_err());
        let ip = sincere_interval(&d, q).unwrap();
        assert_eq!(ip.joint_rank(0, &[1, 2]).unwrap(), 1);
    }

    #[test]
    fn hook_is_cokernel_and_cohook_is_kernel() {
        let q = Field::Rational;
        let g = Arc::new(Poset::grid(3, 3));
        for a in 0..9 {
            for b in 0..9 {
                if !g.lt(a, b) {
                    continue;
                }
                let (pa, pb) = (projective(&g, a, q), projective(&g, b, q));
                let comps = (0..9)
                    .map(|x| {
                        if g.leq(b, x) {
                            Matrix::identity(q, 1)
                        } else {
                            Matrix::zeros(q, pa.dim(x), pb.dim(x))
                        }
                    })
                    .collect();
                let incl = ModuleMorphism::new(pb, pa, comps).unwrap();
                let (coker, _) = incl.cokernel().unwrap();
                assert_eq!(
                    thin_normal_form(&coker).unwrap(),
                    hook(&g, a, b, q).unwrap()
                );
                let (ia, ib) = (injective(&g, a, q), injective(&g, b, q));
                let comps = (0..9)
                    .map(|x| {
                        if g.leq(x, a) {
                            Matrix::identity(q, 1)
                        } else {
                            Matrix::zeros(q, ia.dim(x), ib.dim(x))
                        }
                    })
                    .collect();
                let proj = ModuleMorphism::new(ib, ia, comps).unwrap();
                let (ker, _) = proj.kernel().unwrap();
                assert_eq!(
                    thin_normal_form(&ker).unwrap(),
                    cohook(&g, a, b, q).unwrap()
                );
            }
        }
    }

    #[test]
    fn random_modules_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [Field::Rational, Field::Prime(2), Field::Prime(3)] {
            for _ in 0..10 {
                let g = Arc::new(Poset::grid(3, 3));
                let m = random_module(&g, field, 3, &mut rng);
                for a in 0..9 {
                    for b in 0..9 {
                        for c in 0..9 {
                            if g.leq(a, b) && g.leq(b, c) {
                                assert_eq!(m.map(b, c).mul(m.map(a, b)), *m.map(a, c));
                            }
                        }
                    }
                }
            }
        }
    }
}

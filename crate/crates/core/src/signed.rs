//! Bases of invariants and signed decompositions via back-substitution
//! along a unitriangular order.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::decomp::{hom_dim, IndCatalog};
use crate::error::{Error, Result};
use crate::invariants::{family_mult, mult_inv, rank_invariant, EmbeddingFamily, InvariantVector};
use crate::kan::intermediate_extension;
use crate::linalg::Field;
use crate::pmod::{self, is_interval_module_on, PModule};
use crate::poset::{OrderEmbedding, Poset};

pub type InvariantFn = Arc<dyn Fn(&PModule) -> Result<InvariantVector> + Send + Sync>;

/// A basis member: module, its invariant value and the pivot functional
/// `l_y` (sparse, over key indices) with `l_y(value_y) = 1`.
#[derive(Clone, Debug)]
pub struct BasisMember {
    pub label: String,
    pub module: PModule,
    pub value: InvariantVector,
    pub pivot: Vec<(usize, i64)>,
}

impl BasisMember {
    fn apply(&self, v: &[i64]) -> i64 {
        self.pivot.iter().map(|&(k, c)| c * v[k]).sum()
    }
}

#[derive(Clone)]
pub struct InvariantBasis {
    name: String,
    invariant: InvariantFn,
    members: Vec<BasisMember>,
    /// below[z][y]: z <= y in the verified partial order.
    below: Vec<Vec<bool>>,
    order: Vec<usize>,
}

impl fmt::Debug for InvariantBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantBasis")
            .field("name", &self.name)
            .field(
                "members",
                &self.members.iter().map(|m| &m.label).collect::<Vec<_>>(),
            )
            .finish()
    }
}

fn pivot_from_keys(keys: &[String], terms: &[(String, i64)]) -> Result<Vec<(usize, i64)>> {
    terms
        .iter()
        .map(|(k, c)| {
            keys.iter()
                .position(|x| x == k)
                .map(|i| (i, *c))
                .ok_or_else(|| {
                    Error::TriangularityError(format!("pivot key `{k}` is not an invariant key"))
                })
        })
        .collect()
}

/// Transitive closure of a relation given as an adjacency matrix.
fn closure(mut r: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let n = r.len();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

impl InvariantBasis {
    /// Builds and verifies a basis. `leq(z, y)` is the declared partial
    /// order; `l_z(value_y) != 0` must imply `leq(z, y)`, with 1 on the
    /// diagonal.
    pub fn new(
        name: impl Into<String>,
        invariant: InvariantFn,
        members: Vec<BasisMember>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let n = members.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if members[i].value == members[j].value {
                    return Err(Error::DuplicateModule(
                        members[i].label.clone(),
                        members[j].label.clone(),
                    ));
                }
            }
        }
        let mut below = vec![vec![false; n]; n];
        for z in 0..n {
            for y in 0..n {
                let t = members[z].apply(members[y].value.values());
                if z == y && t != 1 {
                    return Err(Error::TriangularityError(format!(
                        "pivot of {} evaluates to {t} on itself",
                        members[z].label
                    )));
                }
                if z != y && t != 0 && !leq(z, y) {
                    return Err(Error::TriangularityError(format!(
                        "pivot of {} is nonzero on {} outside the order",
                        members[z].label, members[y].label
                    )));
                }
                below[z][y] = leq(z, y);
            }
        }
        let below = closure(below);
        for z in 0..n {
            for y in 0..n {
                if z != y && below[z][y] && below[y][z] {
                    return Err(Error::TriangularityError(format!(
                        "declared order has a cycle through {} and {}",
                        members[z].label, members[y].label
                    )));
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&y| (0..n).filter(|&z| below[z][y]).count());
        Ok(InvariantBasis {
            name: name.into(),
            invariant,
            members,
            below,
            order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[BasisMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn leq(&self, z: usize, y: usize) -> bool {
        self.below[z][y]
    }

    /// A linear extension, minimal members first.
    pub fn linear_extension(&self) -> &[usize] {
        &self.order
    }

    pub fn evaluate(&self, m: &PModule) -> Result<InvariantVector> {
        (self.invariant)(m)
    }

    /// A random linear extension of the partial order.
    pub fn shuffled_extension<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let n = self.len();
        let mut placed = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let mut ready: Vec<usize> = (0..n)
                .filter(|&y| !placed[y] && (0..n).all(|z| z == y || !self.below[z][y] || placed[z]))
                .collect();
            ready.shuffle(rng);
            let y = ready[0];
            placed[y] = true;
            out.push(y);
        }
        out
    }
}

/// Coefficients of `target` in the basis, processing members from maximal
/// to minimal along the default linear extension.
pub fn triangular_solve(basis: &InvariantBasis, target: &InvariantVector) -> Result<Vec<i64>> {
    triangular_solve_in(basis, target, basis.linear_extension())
}

/// As [`triangular_solve`] along an explicit linear extension.
pub fn triangular_solve_in(
    basis: &InvariantBasis,
    target: &InvariantVector,
    extension: &[usize],
) -> Result<Vec<i64>> {
    let keys = basis.members.first().map(|m| m.value.keys());
    if let Some(k) = keys {
        if k != target.keys() {
            return Err(Error::KeyMismatch);
        }
    }
    let mut rem: Vec<i64> = target.values().to_vec();
    let mut alpha = vec![0i64; basis.len()];
    for &y in extension.iter().rev() {
        let m = &basis.members[y];
        let a = m.apply(&rem);
        alpha[y] = a;
        if a != 0 {
            for (r, v) in rem.iter_mut().zip(m.value.values()) {
                *r -= a * v;
            }
        }
    }
    if let Some(k) = rem.iter().position(|&r| r != 0) {
        return Err(Error::NotInSpan(format!(
            "remainder {} at `{}`",
            rem[k],
            target.keys()[k]
        )));
    }
    Ok(alpha)
}

/// Ψ(M) = Ψ(positive) − Ψ(negative), as labelled multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedDecomposition {
    pub basis: String,
    pub positive: Vec<(String, i64)>,
    pub negative: Vec<(String, i64)>,
}

impl SignedDecomposition {
    pub fn to_json(&self) -> Value {
        let side = |v: &[(String, i64)]| -> Vec<Value> {
            v.iter()
                .map(|(l, c)| json!({"member": l, "multiplicity": c}))
                .collect()
        };
        json!({
            "basis": self.basis,
            "positive": side(&self.positive),
            "negative": side(&self.negative),
        })
    }
}

impl fmt::Display for SignedDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "basis: {}", self.basis)?;
        for (sign, side) in [("+", &self.positive), ("-", &self.negative)] {
            for (l, c) in side.iter() {
                writeln!(f, "{sign} {c} x {l}")?;
            }
        }
        Ok(())
    }
}

pub fn signed_barcode(m: &PModule, basis: &InvariantBasis) -> Result<SignedDecomposition> {
    let v = basis.evaluate(m)?;
    let alpha = triangular_solve(basis, &v)?;
    let mut acc = InvariantVector::zeros(v.keys().to_vec());
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (y, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let mem = &basis.members[y];
        acc = acc.add(&mem.value.scale(a))?;
        if a > 0 {
            positive.push((mem.label.clone(), a));
        } else {
            negative.push((mem.label.clone(), -a));
        }
    }
    if acc != v {
        return Err(Error::NotInSpan(
            "signed decomposition does not reproduce the invariant".into(),
        ));
    }
    Ok(SignedDecomposition {
        basis: basis.name.clone(),
        positive,
        negative,
    })
}

fn subset_label(p: &Poset, s: &[usize]) -> String {
    let names: Vec<&str> = s.iter().map(|&x| p.name(x)).collect();
    format!("I{{{}}}", names.join(" | "))
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn brk_fn() -> InvariantFn {
    Arc::new(|m: &PModule| Ok(rank_invariant(m)))
}

/// Rectangles I_[a,b] for every a <= b; pivot e_(a,b); containment order.
pub fn rectangle_basis(p: &Arc<Poset>, field: Field) -> Result<InvariantBasis> {
    let rel = p.relations();
    let members = rel
        .par_iter()
        .map(|&(a, b)| {
            let module = pmod::rectangle(p, a, b, field)?;
            let value = rank_invariant(&module);
            let pivot = pivot_from_keys(
                value.keys(),
                &[(format!("rk:{}<={}", p.name(a), p.name(b)), 1)],
            )?;
            Ok(BasisMember {
                label: format!("[{}..{}]", p.name(a), p.name(b)),
                module,
                value,
                pivot,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let supports: Vec<Vec<usize>> = members.iter().map(|m| m.module.support()).collect();
    InvariantBasis::new("rectangles", brk_fn(), members, |z, y| {
        is_subset(&supports[z], &supports[y])
    })
}

/// Projectives P_a (pivot e_aa) and hooks H_{a,b}, a < b (pivot e_aa − e_ab),
/// ordered by the Hom digraph.
pub fn hook_basis(p: &Arc<Poset>, field: Field) -> Result<InvariantBasis> {
    let rk = |a: usize, b: usize| format!("rk:{}<={}", p.name(a), p.name(b));
    let mut specs: Vec<(String, PModule, Vec<(String, i64)>)> = (0..p.len())
        .map(|a| {
            (
                format!("P({})", p.name(a)),
                pmod::projective(p, a, field),
                vec![(rk(a, a), 1)],
            )
        })
        .collect();
    for (a, b) in p.relations() {
        if a != b {
            specs.push((
                format!("H({}; {})", p.name(a), p.name(b)),
                pmod::hook(p, a, b, field)?,
                vec![(rk(a, a), 1), (rk(a, b), -1)],
            ));
        }
    }
    let members = specs
        .into_iter()
        .map(|(label, module, terms)| {
            let value = rank_invariant(&module);
            let pivot = pivot_from_keys(value.keys(), &terms)?;
            Ok(BasisMember {
                label,
                module,
                value,
                pivot,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let homs = hom_relation(&members)?;
    InvariantBasis::new("hooks", brk_fn(), members, |z, y| homs[z][y])
}

fn hom_relation(members: &[BasisMember]) -> Result<Vec<Vec<bool>>> {
    let rel = members
        .par_iter()
        .map(|u| {
            members
                .iter()
                .map(|v| hom_dim(&u.module, &v.module).map(|d| d > 0))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(closure(rel))
}

/// Checks that every pair a < b lies in the image of some embedding.
pub fn check_pair_coverage(p: &Poset, e: &[OrderEmbedding]) -> Result<()> {
    let images: Vec<Vec<usize>> = e.iter().map(|f| f.image()).collect();
    for (a, b) in p.relations() {
        if a != b && !images.iter().any(|im| im.contains(&a) && im.contains(&b)) {
            return Err(Error::CoverageError(format!(
                "no embedding hits both {} and {}",
                p.name(a),
                p.name(b)
            )));
        }
    }
    Ok(())
}

/// R_E = {Θ_f U}: interval modules on hull(f(supp U)), for mult^E_{X,P}.
pub fn theta_basis(
    e: &[OrderEmbedding],
    c: &Arc<IndCatalog>,
    p: &Arc<Poset>,
) -> Result<InvariantBasis> {
    check_pair_coverage(p, e)?;
    let supports: Vec<Vec<usize>> = c.modules().iter().map(PModule::support).collect();
    let pairs: Vec<(usize, usize)> = (0..e.len())
        .flat_map(|k| (0..c.len()).map(move |j| (k, j)))
        .collect();
    let thetas = pairs
        .par_iter()
        .map(|&(k, j)| {
            let f = &e[k];
            let th = intermediate_extension(f, c.module(j))?;
            let fs: Vec<usize> = supports[j].iter().map(|&s| f.apply(s)).collect();
            let hull = p.convex_hull(&fs)?;
            if !is_interval_module_on(&th, &hull) {
                return Err(Error::TriangularityError(format!(
                    "Θ of {} is not the hull interval",
                    c.names()[j]
                )));
            }
            Ok((hull, th))
        })
        .collect::<Result<Vec<_>>>()?;
    let ev = {
        let e = e.to_vec();
        let c = c.clone();
        Arc::new(move |m: &PModule| mult_inv(&e, &c, m)) as InvariantFn
    };
    let mut members: Vec<BasisMember> = Vec::new();
    let mut hulls: Vec<Vec<usize>> = Vec::new();
    for (&(k, j), (hull, th)) in pairs.iter().zip(thetas) {
        if hulls.contains(&hull) {
            continue;
        }
        // pivot: Σ_U [supp U_j ⊆ supp U] e_(f,U)
        let terms: Vec<(String, i64)> = (0..c.len())
            .filter(|&u| is_subset(&supports[j], &supports[u]))
            .map(|u| (format!("mult:f#{k}:U#{u}"), 1))
            .collect();
        let value = ev(&th)?;
        let pivot = pivot_from_keys(value.keys(), &terms)?;
        members.push(BasisMember {
            label: subset_label(p, &hull),
            module: th,
            value,
            pivot,
        });
        hulls.push(hull);
    }
    InvariantBasis::new(format!("theta:{}", c.name()), ev, members, |z, y| {
        is_subset(&hulls[z], &hulls[y])
    })
}

/// {I_hull(Im f)} for a family without chains of three elements, for mult_F.
pub fn interval_family_basis(
    fam: &EmbeddingFamily,
    p: &Arc<Poset>,
    field: Field,
) -> Result<InvariantBasis> {
    for part in &fam.parts {
        if part.template.height() >= 3 {
            return Err(Error::ChainLengthError(format!(
                "template with {} elements has a chain of length {}",
                part.template.len(),
                part.template.height()
            )));
        }
    }
    let keys = fam.keys();
    let images = fam.images();
    let ev = {
        let fam = fam.clone();
        Arc::new(move |m: &PModule| family_mult(&fam, m)) as InvariantFn
    };
    let mut hulls: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for (k, im) in images.iter().enumerate() {
        let h = p.convex_hull(im)?;
        if !hulls.contains(&h) {
            hulls.push(h);
            reps.push(k);
        }
    }
    let members = hulls
        .par_iter()
        .zip(reps.par_iter())
        .map(|(h, &k)| {
            let module = pmod::interval_module(p, h, field)?;
            let value = ev(&module)?;
            let pivot = pivot_from_keys(value.keys(), &[(keys[k].clone(), 1)])?;
            Ok(BasisMember {
                label: subset_label(p, h),
                module,
                value,
                pivot,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    InvariantBasis::new("intervals", ev, members, |z, y| {
        is_subset(&hulls[z], &hulls[y])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::builtin_catalog;
    use crate::pmod::{direct_sum, interval_module};
    use crate::poset::enumerate_embeddings;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn rectangles_on_grid22() {
        let g = Arc::new(Poset::grid(2, 2));
        let b = rectangle_basis(&g, q()).unwrap();
        assert_eq!(b.len(), 9);
        for (y, m) in b.members().iter().enumerate() {
            let a = triangular_solve(&b, &m.value).unwrap();
            assert!(a.iter().enumerate().all(|(i, &v)| v == i64::from(i == y)));
        }
        let r = pmod::rectangle(&g, 0, 3, q()).unwrap();
        let d = signed_barcode(&r, &b).unwrap();
        assert_eq!((d.positive.len(), d.negative.len()), (1, 0));
        // I{(1,1),(1,2),(2,1)} = [11..12] + [11..21] − [11..11]
        let m = interval_module(&g, &[0, 1, 2], q()).unwrap();
        let d = signed_barcode(&m, &b).unwrap();
        assert_eq!(d.positive.len(), 2);
        assert_eq!(d.negative, vec![("[1,1..1,1]".to_string(), 1)]);
    }

    #[test]
    fn hooks_on_grid22() {
        let g = Arc::new(Poset::grid(2, 2));
        let b = hook_basis(&g, q()).unwrap();
        assert_eq!(b.len(), 4 + 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = pmod::random_module(&g, q(), 3, &mut rng);
        let d1 = signed_barcode(&m, &b).unwrap();
        let v = b.evaluate(&m).unwrap();
        for _ in 0..5 {
            let ext = b.shuffled_extension(&mut rng);
            assert_eq!(
                triangular_solve_in(&b, &v, &ext).unwrap(),
                triangular_solve(&b, &v).unwrap()
            );
        }
        let rect = rectangle_basis(&g, q()).unwrap();
        let d2 = signed_barcode(&m, &rect).unwrap();
        assert!(!d1.positive.is_empty() && !d2.positive.is_empty());
    }

    #[test]
    fn theta_basis_fork() {
        let p = Arc::new(Poset::staircase_grid(3, 3));
        let c = builtin_catalog("X3_fork", q()).unwrap();
        let e = enumerate_embeddings(c.template(), &p);
        let b = theta_basis(&e, &c, &p).unwrap();
        for m in b.members() {
            assert!(pmod::thin_normal_form(&m.module).is_some());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = pmod::random_module(&p, q(), 2, &mut rng);
        signed_barcode(&m, &b).unwrap();
        let g = Arc::new(Poset::grid(2, 2));
        let e = enumerate_embeddings(c.template(), &g);
        assert!(matches!(
            theta_basis(&e, &c, &g),
            Err(Error::CoverageError(_))
        ));
    }

    #[test]
    fn interval_family_on_grid22() {
        let g = Arc::new(Poset::grid(2, 2));
        let fam = EmbeddingFamily::chain_length_lt3(&g).unwrap();
        let b = interval_family_basis(&fam, &g, q()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let m = pmod::random_module(&g, q(), 2, &mut rng);
            signed_barcode(&m, &b).unwrap();
        }
        let s = direct_sum(&pmod::simple(&g, 0, q()), &pmod::simple(&g, 3, q())).unwrap();
        let d = signed_barcode(&s, &b).unwrap();
        assert_eq!(d.positive.len(), 2);
        let all = EmbeddingFamily::intervals(&g).unwrap();
        assert!(matches!(
            interval_family_basis(&all, &g, q()),
            Err(Error::ChainLengthError(_))
        ));
    }
}

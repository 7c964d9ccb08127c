//! Induction f_!, coinduction f_*, duality and the intermediate extension.

use std::collections::HashMap;
use std::sync::Arc;

use crate::decomp::hom_basis;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::pmod::{ModuleMorphism, PModule};
use crate::poset::{OrderEmbedding, Poset};

/// `P1 -> P0 -> U -> 0` with `P0 = ⊕ P_{gens0[i]}`, `P1 = ⊕ P_{gens1[j]}`.
/// Entry (i,j) is the scalar of `P_{gens1[j]} -> P_{gens0[i]}`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub poset: Arc<Poset>,
    pub field: Field,
    pub gens0: Vec<usize>,
    pub gens1: Vec<usize>,
    pub matrix: Matrix,
}

/// ⊕ P_{gens[i]}; at p the basis is the generators below p, in list order.
pub fn projective_sum(poset: &Arc<Poset>, field: Field, gens: &[usize]) -> PModule {
    let local =
        |p: usize| -> Vec<usize> { (0..gens.len()).filter(|&i| poset.leq(gens[i], p)).collect() };
    let dims = (0..poset.len()).map(|p| local(p).len()).collect();
    let maps = poset
        .covers()
        .iter()
        .map(|&(a, b)| {
            let (la, lb) = (local(a), local(b));
            let m = Matrix::from_fn(field, lb.len(), la.len(), |r, c| {
                if lb[r] == la[c] {
                    field.one()
                } else {
                    field.zero()
                }
            });
            ((a, b), m)
        })
        .collect();
    PModule::new(poset.clone(), field, dims, maps).expect("projective sums commute")
}

/// Columns spanning a complement of the span of `sub` inside k^d.
fn complement(field: Field, d: usize, sub: &Matrix) -> Matrix {
    let mut acc = sub.image_basis();
    let mut rank = acc.cols();
    let mut picked = Vec::new();
    for k in 0..d {
        if rank == d {
            break;
        }
        let e = Matrix::from_fn(
            field,
            d,
            1,
            |r, _| if r == k { field.one() } else { field.zero() },
        );
        let next = Matrix::hstack(field, d, &[&acc, &e]);
        if next.rank() > rank {
            acc = next;
            rank += 1;
            picked.push(k);
        }
    }
    Matrix::from_fn(field, d, picked.len(), |r, c| {
        if r == picked[c] {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// Generators of the top of `m`: pairs (x, v) with v spanning a complement
/// of the radical at x.
fn top_generators(m: &PModule) -> Vec<(usize, Matrix)> {
    let p = m.poset();
    let f = m.field();
    let mut out = Vec::new();
    for x in 0..p.len() {
        let d = m.dim(x);
        if d == 0 {
            continue;
        }
        let parts: Vec<&Matrix> = p.lower_covers(x).iter().map(|&y| m.map(y, x)).collect();
        let rad = Matrix::hstack(f, d, &parts);
        let comp = complement(f, d, &rad);
        for c in 0..comp.cols() {
            out.push((x, comp.column(c)));
        }
    }
    out
}

/// Minimal projective presentation with the components of `P0 -> U`.
fn present(u: &PModule) -> Result<(Presentation, ModuleMorphism)> {
    let p = u.poset();
    let f = u.field();
    let tops = top_generators(u);
    let gens0: Vec<usize> = tops.iter().map(|(x, _)| *x).collect();
    let p0 = projective_sum(p, f, &gens0);
    let pi_comps = (0..p.len())
        .map(|q| {
            let cols: Vec<Matrix> = (0..gens0.len())
                .filter(|&i| p.leq(gens0[i], q))
                .map(|i| u.map(gens0[i], q).mul(&tops[i].1))
                .collect();
            let refs: Vec<&Matrix> = cols.iter().collect();
            Matrix::hstack(f, u.dim(q), &refs)
        })
        .collect();
    let pi = ModuleMorphism::new(p0, u.clone(), pi_comps)?;
    let (k, incl) = pi.kernel()?;
    let ktops = top_generators(&k);
    let gens1: Vec<usize> = ktops.iter().map(|(b, _)| *b).collect();
    let mut matrix = Matrix::zeros(f, gens0.len(), gens1.len());
    for (j, (b, w)) in ktops.iter().enumerate() {
        let v = incl.component(*b).mul(w);
        let local: Vec<usize> = (0..gens0.len()).filter(|&i| p.leq(gens0[i], *b)).collect();
        for (r, &i) in local.iter().enumerate() {
            matrix.set(i, j, v.get(r, 0).clone());
        }
    }
    let pres = Presentation {
        poset: p.clone(),
        field: f,
        gens0,
        gens1,
        matrix,
    };
    Ok((pres, pi))
}

pub fn projective_presentation(u: &PModule) -> Result<Presentation> {
    let (pres, _) = present(u)?;
    let (c, _) = pres.cokernel_over(&pres.poset, &(0..pres.poset.len()).collect::<Vec<_>>())?;
    if c.dims() != u.dims() {
        return Err(Error::NoSolution(
            "presentation cokernel differs from the module".into(),
        ));
    }
    Ok(pres)
}

impl Presentation {
    /// The map `P1 -> P0` after relabelling generators by `g` into `target`.
    pub fn morphism_over(&self, target: &Arc<Poset>, g: &[usize]) -> Result<ModuleMorphism> {
        let f = self.field;
        let g0: Vec<usize> = self.gens0.iter().map(|&a| g[a]).collect();
        let g1: Vec<usize> = self.gens1.iter().map(|&b| g[b]).collect();
        let p0 = projective_sum(target, f, &g0);
        let p1 = projective_sum(target, f, &g1);
        let comps = (0..target.len())
            .map(|q| {
                let rows: Vec<usize> = (0..g0.len()).filter(|&i| target.leq(g0[i], q)).collect();
                let cols: Vec<usize> = (0..g1.len()).filter(|&j| target.leq(g1[j], q)).collect();
                self.matrix.select_rows(&rows).select_cols(&cols)
            })
            .collect();
        ModuleMorphism::new(p1, p0, comps)
    }

    /// Cokernel over `target` of the relabelled presentation, with the
    /// projection from `P0`.
    pub fn cokernel_over(
        &self,
        target: &Arc<Poset>,
        g: &[usize],
    ) -> Result<(PModule, ModuleMorphism)> {
        self.morphism_over(target, g)?.cokernel()
    }
}

/// f_!U with the unit components `U_x -> (f_!U)_{f(x)}` (isomorphisms).
pub fn induce_with_unit(f: &OrderEmbedding, u: &PModule) -> Result<(PModule, Vec<Matrix>)> {
    if **f.source() != **u.poset() {
        return Err(Error::PosetMismatch);
    }
    let (pres, pi) = present(u)?;
    let (m, q) = pres.cokernel_over(f.target(), f.map())?;
    let unit = (0..u.poset().len())
        .map(|x| {
            let s = pi
                .component(x)
                .right_inverse()
                .expect("presentation map is surjective");
            q.component(f.apply(x)).mul(&s)
        })
        .collect();
    Ok((m, unit))
}

pub fn induce(f: &OrderEmbedding, u: &PModule) -> Result<PModule> {
    Ok(induce_with_unit(f, u)?.0)
}

/// The dual module over `target`, which must be the opposite poset.
fn dualize_onto(m: &PModule, target: &Arc<Poset>) -> Result<PModule> {
    if **target != m.poset().opposite() {
        return Err(Error::PosetMismatch);
    }
    let maps: HashMap<(usize, usize), Matrix> = m
        .cover_maps()
        .map(|((a, b), x)| ((b, a), x.transpose()))
        .collect();
    PModule::new(target.clone(), m.field(), m.dim_vector(), maps)
}

/// Pointwise dual over the opposite poset.
pub fn dualize(m: &PModule) -> PModule {
    let op = Arc::new(m.poset().opposite());
    dualize_onto(m, &op).expect("opposite poset")
}

/// f_*U with the counit components `(f_*U)_{f(x)} -> U_x` (isomorphisms).
pub fn coinduce_with_counit(f: &OrderEmbedding, u: &PModule) -> Result<(PModule, Vec<Matrix>)> {
    if **f.source() != **u.poset() {
        return Err(Error::PosetMismatch);
    }
    let fop = f.opposite();
    let du = dualize_onto(u, fop.source())?;
    let (ind, unit) = induce_with_unit(&fop, &du)?;
    let m = dualize_onto(&ind, f.target())?;
    Ok((m, unit.iter().map(Matrix::transpose).collect()))
}

pub fn coinduce(f: &OrderEmbedding, u: &PModule) -> Result<PModule> {
    Ok(coinduce_with_counit(f, u)?.0)
}

/// θ_f U : f_!U -> f_*U, the morphism restricting to the identity of U.
pub fn theta(f: &OrderEmbedding, u: &PModule) -> Result<ModuleMorphism> {
    let (ind, alpha) = induce_with_unit(f, u)?;
    let (coind, beta) = coinduce_with_counit(f, u)?;
    let fld = u.field();
    let basis = hom_basis(&ind, &coind)?;
    // Σ c_k (θ_k)_{f(x)} = β_x⁻¹ α_x⁻¹ for every x
    let mut rows: Vec<Vec<crate::linalg::Scalar>> = Vec::new();
    let mut rhs = Vec::new();
    for x in 0..u.poset().len() {
        let d = u.dim(x);
        if d == 0 {
            continue;
        }
        let ai = alpha[x]
            .inverse()
            .ok_or_else(|| Error::NoSolution("unit not invertible".into()))?;
        let bi = beta[x]
            .inverse()
            .ok_or_else(|| Error::NoSolution("counit not invertible".into()))?;
        let target = bi.mul(&ai);
        let fx = f.apply(x);
        for r in 0..d {
            for s in 0..d {
                rows.push(
                    basis
                        .iter()
                        .map(|t| t.component(fx).get(r, s).clone())
                        .collect(),
                );
                rhs.push(target.get(r, s).clone());
            }
        }
    }
    let n = rows.len();
    let sys = Matrix::from_scalars(fld, n, basis.len(), rows.into_iter().flatten().collect())?;
    let b = Matrix::from_scalars(fld, n, 1, rhs)?;
    let c = sys
        .solve(&b)?
        .ok_or_else(|| Error::NoSolution("no morphism restricts to the identity".into()))?;
    let p = f.target();
    let comps = (0..p.len())
        .map(|q| {
            let mut acc = Matrix::zeros(fld, coind.dim(q), ind.dim(q));
            for (k, t) in basis.iter().enumerate() {
                acc = acc.add(&t.component(q).scale(c.get(k, 0)));
            }
            acc
        })
        .collect();
    ModuleMorphism::new(ind, coind, comps)
}

/// Θ_f U = Im θ_f U.
pub fn intermediate_extension(f: &OrderEmbedding, u: &PModule) -> Result<PModule> {
    Ok(theta(f, u)?.image()?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{builtin_catalog, hom_dim, mult_from_dimh};
    use crate::pmod::{self, hook, interval_module, projective, restrict, simple};
    use crate::poset::enumerate_embeddings;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::Rational
    }

    fn emb(x: &Arc<Poset>, p: &Arc<Poset>, names: &[&str]) -> OrderEmbedding {
        let map = names.iter().map(|n| p.id(n).unwrap()).collect();
        OrderEmbedding::new(x.clone(), p.clone(), map).unwrap()
    }

    #[test]
    fn presentations() {
        let g = Arc::new(Poset::grid(3, 3));
        let pa = projective(&g, 4, q());
        let pr = projective_presentation(&pa).unwrap();
        assert_eq!((pr.gens0.clone(), pr.gens1.len()), (vec![4], 0));
        let h = hook(&g, 0, 4, q()).unwrap();
        let pr = projective_presentation(&h).unwrap();
        assert_eq!((pr.gens0.clone(), pr.gens1.clone()), (vec![0], vec![4]));
        let x3 =
            Arc::new(Poset::from_relations(&["1", "2", "3"], &[("1", "3"), ("2", "3")]).unwrap());
        let i = interval_module(&x3, &[0, 1, 2], q()).unwrap();
        let pr = projective_presentation(&i).unwrap();
        assert_eq!((pr.gens0.clone(), pr.gens1.clone()), (vec![0, 1], vec![2]));
    }

    #[test]
    fn induce_projective_and_duality() {
        let x = Arc::new(Poset::chain(2));
        let g = Arc::new(Poset::grid(3, 3));
        let f = emb(&x, &g, &["1,2", "2,3"]);
        assert_eq!(
            induce(&f, &projective(&x, 1, q())).unwrap(),
            projective(&g, g.id("2,3").unwrap(), q())
        );
        assert_eq!(
            coinduce(&f, &pmod::injective(&x, 0, q())).unwrap(),
            pmod::injective(&g, g.id("1,2").unwrap(), q())
        );
        let d = dualize(&projective(&g, 4, q()));
        assert_eq!(d, pmod::injective(d.poset(), 4, q()));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = pmod::random_module(&g, q(), 2, &mut rng);
        let dd = dualize_onto(&dualize(&m), &g).unwrap();
        assert_eq!(dd, m);
    }

    #[test]
    fn x2_intermediate_extensions() {
        let x = Arc::new(Poset::chain(2));
        let g = Arc::new(Poset::grid(3, 3));
        let f = emb(&x, &g, &["1,1", "2,3"]);
        let th = intermediate_extension(&f, &interval_module(&x, &[0, 1], q()).unwrap()).unwrap();
        let rect = pmod::rectangle(&g, 0, g.id("2,3").unwrap(), q()).unwrap();
        assert_eq!(thin_support(&th), rect.support());
        assert!(pmod::is_interval_module_on(&th, &rect.support()));
        let th1 = intermediate_extension(&f, &simple(&x, 0, q())).unwrap();
        assert_eq!(th1.support(), vec![0]);
        let id = OrderEmbedding::identity(g.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = pmod::random_module(&g, q(), 2, &mut rng);
        let t = theta(&id, &m).unwrap();
        assert_eq!(t.source().dims(), m.dims());
        assert!(t.is_injective() && t.is_surjective());
    }

    fn thin_support(m: &PModule) -> Vec<usize> {
        m.support()
    }

    #[test]
    fn adjunction_random() {
        let c = builtin_catalog("X3_fork", q()).unwrap();
        let x = c.template().clone();
        let g = Arc::new(Poset::grid(3, 3));
        let embs = enumerate_embeddings(&x, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..6 {
            let f = &embs[(t * 7) % embs.len()];
            let u = pmod::random_module(&x, q(), 2, &mut rng);
            let m = pmod::random_module(&g, q(), 2, &mut rng);
            let ind = induce(f, &u).unwrap();
            let co = coinduce(f, &u).unwrap();
            assert_eq!(
                hom_dim(&ind, &m).unwrap(),
                hom_dim(&u, &restrict(f, &m).unwrap()).unwrap()
            );
            assert_eq!(
                hom_dim(&m, &co).unwrap(),
                hom_dim(&restrict(f, &m).unwrap(), &u).unwrap()
            );
            let a = mult_from_dimh(&c, &u).unwrap();
            assert_eq!(mult_from_dimh(&c, &restrict(f, &ind).unwrap()).unwrap(), a);
            assert_eq!(mult_from_dimh(&c, &restrict(f, &co).unwrap()).unwrap(), a);
        }
    }
}

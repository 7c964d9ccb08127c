//! Short exact sequences, admissibility relative to a template, and the
//! relative projectives f_!U.

use rayon::prelude::*;

use crate::decomp::{bricks_isomorphic, dimh_profile, IndCatalog};
use crate::error::{Error, Result};
use crate::invariants::rank_invariant;
use crate::kan::induce;
use crate::linalg::Matrix;
use crate::pmod::{ModuleMorphism, PModule};
use crate::poset::OrderEmbedding;

/// 0 -> A -i-> B -p-> C -> 0, validated pointwise.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    i: ModuleMorphism,
    p: ModuleMorphism,
}

impl ShortExactSequence {
    pub fn a(&self) -> &PModule {
        self.i.source()
    }

    pub fn b(&self) -> &PModule {
        self.i.target()
    }

    pub fn c(&self) -> &PModule {
        self.p.target()
    }

    pub fn inclusion(&self) -> &ModuleMorphism {
        &self.i
    }

    pub fn projection(&self) -> &ModuleMorphism {
        &self.p
    }

    pub fn restrict(&self, f: &OrderEmbedding) -> Result<ShortExactSequence> {
        ses_validate(self.i.restrict(f)?, self.p.restrict(f)?)
    }

    pub fn direct_sum(&self, other: &ShortExactSequence) -> Result<ShortExactSequence> {
        ses_validate(self.i.direct_sum(&other.i)?, self.p.direct_sum(&other.p)?)
    }
}

pub fn ses_validate(i: ModuleMorphism, p: ModuleMorphism) -> Result<ShortExactSequence> {
    if i.target() != p.source() {
        return Err(Error::NotExact("middle terms differ".into()));
    }
    let poset = i.target().poset().clone();
    for x in 0..poset.len() {
        let (ix, px) = (i.component(x), p.component(x));
        let name = poset.name(x);
        if ix.rank() != ix.cols() {
            return Err(Error::NotExact(format!("not injective at {name}")));
        }
        if px.rank() != px.rows() {
            return Err(Error::NotExact(format!("not surjective at {name}")));
        }
        if !px.mul(ix).is_zero() || ix.cols() + px.rows() != ix.rows() {
            return Err(Error::NotExact(format!(
                "image differs from kernel at {name}"
            )));
        }
    }
    Ok(ShortExactSequence { i, p })
}

/// The split sequence A -> A (+) C -> C.
pub fn split_sequence(a: &PModule, c: &PModule) -> Result<ShortExactSequence> {
    let b = crate::pmod::direct_sum(a, c)?;
    let f = a.field();
    let n = a.poset().len();
    let inc = (0..n)
        .map(|x| {
            let (da, dc) = (a.dim(x), c.dim(x));
            Matrix::vstack(
                f,
                da,
                &[&Matrix::identity(f, da), &Matrix::zeros(f, dc, da)],
            )
        })
        .collect();
    let proj = (0..n)
        .map(|x| {
            let (da, dc) = (a.dim(x), c.dim(x));
            Matrix::hstack(
                f,
                dc,
                &[&Matrix::zeros(f, dc, da), &Matrix::identity(f, dc)],
            )
        })
        .collect();
    ses_validate(
        ModuleMorphism::new(a.clone(), b.clone(), inc)?,
        ModuleMorphism::new(b, c.clone(), proj)?,
    )
}

/// B ≅ A (+) C, decided by dim-Hom profiles over the catalog.
pub fn splits(s: &ShortExactSequence, c: &IndCatalog) -> Result<bool> {
    let pa = dimh_profile(c, s.a())?;
    let pb = dimh_profile(c, s.b())?;
    let pc = dimh_profile(c, s.c())?;
    Ok(pa.iter().zip(&pc).map(|(x, y)| x + y).eq(pb))
}

/// Splits after restriction along every embedding.
pub fn is_admissible(s: &ShortExactSequence, e: &[OrderEmbedding], c: &IndCatalog) -> Result<bool> {
    let r = e
        .par_iter()
        .map(|f| splits(&s.restrict(f)?, c))
        .collect::<Result<Vec<bool>>>()?;
    Ok(r.into_iter().all(|b| b))
}

/// A relative projective with the (embedding, member) pair it came from.
#[derive(Clone, Debug)]
pub struct RelativeProjective {
    pub embedding: usize,
    pub member: usize,
    pub module: PModule,
}

/// H^E = {f_!U}, deduplicated by dims, then rank invariant, then an exact
/// brick isomorphism test.
pub fn relative_projectives(
    e: &[OrderEmbedding],
    c: &IndCatalog,
) -> Result<Vec<RelativeProjective>> {
    let Some(first) = e.first() else {
        return Err(Error::CoverageError("no embeddings".into()));
    };
    let p = first.target().clone();
    let mut covered = vec![false; p.len()];
    for f in e {
        for x in f.image() {
            covered[x] = true;
        }
    }
    if let Some(x) = covered.iter().position(|&b| !b) {
        return Err(Error::CoverageError(format!(
            "{} is not in any image",
            p.name(x)
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..e.len())
        .flat_map(|k| (0..c.len()).map(move |j| (k, j)))
        .collect();
    let mods = pairs
        .par_iter()
        .map(|&(k, j)| induce(&e[k], c.module(j)))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<(RelativeProjective, Vec<i64>)> = Vec::new();
    for ((k, j), m) in pairs.into_iter().zip(mods) {
        let rk = rank_invariant(&m).values().to_vec();
        let mut dup = false;
        for (r, rk2) in &out {
            if r.module.dims() == m.dims() && *rk2 == rk && bricks_isomorphic(&r.module, &m)? {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push((
                RelativeProjective {
                    embedding: k,
                    member: j,
                    module: m,
                },
                rk,
            ));
        }
    }
    Ok(out.into_iter().map(|(r, _)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{builtin_catalog, hom_dim};
    use crate::linalg::Field;
    use crate::pmod::{hook, interval_module, is_interval_module_on, projective, simple};
    use crate::poset::{enumerate_embeddings, Poset};
    use std::sync::Arc;

    fn q() -> Field {
        Field::Rational
    }

    fn nonsplit_x2() -> ShortExactSequence {
        let x = Arc::new(Poset::chain(2));
        let s2 = simple(&x, 1, q());
        let i12 = interval_module(&x, &[0, 1], q()).unwrap();
        let s1 = simple(&x, 0, q());
        let one = Matrix::identity(q(), 1);
        let i = ModuleMorphism::new(
            s2.clone(),
            i12.clone(),
            vec![Matrix::zeros(q(), 1, 0), one.clone()],
        )
        .unwrap();
        let p = ModuleMorphism::new(i12, s1, vec![one, Matrix::zeros(q(), 0, 1)]).unwrap();
        ses_validate(i, p).unwrap()
    }

    #[test]
    fn sequences() {
        let c = builtin_catalog("X2", q()).unwrap();
        let x = c.template().clone();
        let ns = nonsplit_x2();
        assert!(!splits(&ns, &c).unwrap());
        let sp = split_sequence(&simple(&x, 0, q()), &projective(&x, 0, q())).unwrap();
        assert!(splits(&sp, &c).unwrap());
        assert!(!splits(&sp.direct_sum(&ns).unwrap(), &c).unwrap());
        let bad = ModuleMorphism::zero(ns.b(), ns.c()).unwrap();
        assert!(matches!(
            ses_validate(ns.inclusion().clone(), bad),
            Err(Error::NotExact(_))
        ));
    }

    #[test]
    fn hook_sequence_not_admissible() {
        let g = Arc::new(Poset::grid(2, 2));
        let c = builtin_catalog("X2", q()).unwrap();
        let e = enumerate_embeddings(c.template(), &g);
        let (a, b) = (0, 1);
        let pb = projective(&g, b, q());
        let pa = projective(&g, a, q());
        let h = hook(&g, a, b, q()).unwrap();
        let incl = ModuleMorphism::new(
            pb.clone(),
            pa.clone(),
            (0..4)
                .map(|x| {
                    Matrix::identity(q(), pa.dim(x))
                        .select_cols(&(0..pb.dim(x)).collect::<Vec<_>>())
                })
                .collect(),
        )
        .unwrap();
        let (coker, proj) = incl.cokernel().unwrap();
        assert!(is_interval_module_on(&coker, &h.support()));
        let s = ses_validate(incl, proj).unwrap();
        assert!(!is_admissible(&s, &e, &c).unwrap());
        let sp = split_sequence(&pa, &h).unwrap();
        assert!(is_admissible(&sp, &e, &c).unwrap());
    }

    #[test]
    fn x2_relative_projectives() {
        let g = Arc::new(Poset::grid(2, 2));
        let c = builtin_catalog("X2", q()).unwrap();
        let e = enumerate_embeddings(c.template(), &g);
        let rp = relative_projectives(&e, &c).unwrap();
        assert_eq!(rp.len(), 4 + 5);
        for a in 0..4 {
            let pa = projective(&g, a, q());
            assert!(rp
                .iter()
                .any(|r| r.module.dims() == pa.dims() && hom_dim(&r.module, &pa).unwrap() == 1));
        }
        let x = c.template().clone();
        let one = OrderEmbedding::new(x, g.clone(), vec![0, 1]).unwrap();
        assert!(matches!(
            relative_projectives(&[one], &c),
            Err(Error::CoverageError(_))
        ));
    }
}

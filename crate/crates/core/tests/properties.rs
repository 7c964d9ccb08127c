use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use posetinv::decomp::{builtin_catalog, hom_dim, mult_from_dimh};
use posetinv::invariants::rank_invariant;
use posetinv::kan::{coinduce, dualize, induce};
use posetinv::linalg::{Field, Matrix};
use posetinv::pmod::{direct_sum, random_module, restrict};
use posetinv::poset::{enumerate_embeddings, Poset};
use posetinv::signed::{rectangle_basis, signed_barcode, triangular_solve, triangular_solve_in};

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rational),
        Just(Field::gf(2).unwrap()),
        Just(Field::gf(5).unwrap())
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rank_nullity(rows in 1usize..5, cols in 1usize..5, seed: u64, f in fields()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Matrix::from_fn(f, rows, cols, |_, _| f.from_i64(rand::Rng::gen_range(&mut rng, -2..=2)));
        prop_assert_eq!(m.rank() + m.kernel_basis().cols(), cols);
        prop_assert!(m.mul(&m.kernel_basis()).is_zero());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn multiplicities_are_additive(seed: u64, f in fields(), t in 0usize..4) {
        let name = ["X2", "X3_fork", "X3_cofork", "diamond"][t];
        let c = builtin_catalog(name, f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_module(c.template(), f, 2, &mut rng);
        let b = random_module(c.template(), f, 2, &mut rng);
        let s = direct_sum(&a, &b).unwrap();
        let (ma, mb, ms) = (mult_from_dimh(&c, &a).unwrap(), mult_from_dimh(&c, &b).unwrap(), mult_from_dimh(&c, &s).unwrap());
        let sum: Vec<i64> = ma.iter().zip(&mb).map(|(x, y)| x + y).collect();
        prop_assert_eq!(ms, sum);
        prop_assert!(mult_from_dimh(&c, &a).unwrap().iter().all(|&x| x >= 0));
    }

    #[test]
    fn duality_is_an_involution(seed: u64, n in 1usize..4, m in 1usize..4) {
        let g = Arc::new(Poset::grid(n, m));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_module(&g, Field::Rational, 3, &mut rng);
        let dd = dualize(&dualize(&x));
        prop_assert_eq!(dd.dims(), x.dims());
        prop_assert_eq!(rank_invariant(&dd).values().to_vec(), rank_invariant(&x).values().to_vec());
    }

    #[test]
    fn kan_extensions_are_adjoint(seed: u64, t in 0usize..3, k: prop::sample::Index) {
        let name = ["X2", "X3_fork", "X3_cofork"][t];
        let c = builtin_catalog(name, Field::Rational).unwrap();
        let g = Arc::new(Poset::grid(3, 3));
        let e = enumerate_embeddings(c.template(), &g);
        let f = &e[k.index(e.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_module(c.template(), Field::Rational, 2, &mut rng);
        let m = random_module(&g, Field::Rational, 2, &mut rng);
        let fm = restrict(f, &m).unwrap();
        prop_assert_eq!(hom_dim(&induce(f, &u).unwrap(), &m).unwrap(), hom_dim(&u, &fm).unwrap());
        prop_assert_eq!(hom_dim(&m, &coinduce(f, &u).unwrap()).unwrap(), hom_dim(&fm, &u).unwrap());
        let v = random_module(c.template(), Field::Rational, 2, &mut rng);
        let uv = direct_sum(&u, &v).unwrap();
        let lhs = induce(f, &uv).unwrap();
        let rhs = direct_sum(&induce(f, &u).unwrap(), &induce(f, &v).unwrap()).unwrap();
        prop_assert_eq!(rank_invariant(&lhs).values().to_vec(), rank_invariant(&rhs).values().to_vec());
    }

    #[test]
    fn signed_barcodes_do_not_depend_on_the_order(seed: u64) {
        let g = Arc::new(Poset::grid(2, 3));
        let b = rectangle_basis(&g, Field::Rational).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&g, Field::Rational, 3, &mut rng);
        let v = b.evaluate(&m).unwrap();
        let base = triangular_solve(&b, &v).unwrap();
        let ext = b.shuffled_extension(&mut rng);
        prop_assert_eq!(triangular_solve_in(&b, &v, &ext).unwrap(), base);
        prop_assert!(signed_barcode(&m, &b).is_ok());
    }
}

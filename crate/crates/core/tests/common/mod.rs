#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use tate::{md, Multidegree, PresentedModule, ProductSpace, SPolynomial};

pub fn p1p2() -> Arc<ProductSpace> {
    ProductSpace::p1p2()
}

pub fn structure_sheaf() -> PresentedModule {
    PresentedModule::structure_sheaf(p1p2())
}

/// `S(1,1) ⊗ ker(vars)`, the running monad example.
pub fn koszul_example() -> PresentedModule {
    let space = p1p2();
    PresentedModule::structure_sheaf(space.clone())
        .twist(&md![1, 1])
        .tensor(&PresentedModule::koszul_kernel(space))
        .unwrap()
}

fn random_degree(rng: &mut impl Rng, lo: &Multidegree, hi: i32) -> Multidegree {
    Multidegree(lo.0.iter().map(|&l| rng.gen_range(l..=hi.max(l))).collect())
}

fn random_poly(rng: &mut impl Rng, space: &ProductSpace, d: &Multidegree) -> SPolynomial {
    let basis = space.s_basis(d);
    let field = space.field();
    let terms = (0..rng.gen_range(1..=3))
        .map(|_| (basis.get(rng.gen_range(0..basis.len())).to_vec(), rng.gen_range(1..field.p())))
        .collect::<Vec<_>>();
    SPolynomial::from_terms(field, terms)
}

/// Up to 3 generators and 3 relations, all degrees in `[0,2]²`.
pub fn random_module(rng: &mut impl Rng, space: &Arc<ProductSpace>) -> PresentedModule {
    let zero = space.zero_degree();
    let gens: Vec<Multidegree> = (0..rng.gen_range(1..=3)).map(|_| random_degree(rng, &zero, 2)).collect();
    let mut cols = Vec::new();
    let mut rels = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let anchor = &gens[rng.gen_range(0..gens.len())];
        let c = random_degree(rng, anchor, 2);
        let mut col = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if Multidegree::le(g, &c) && rng.gen_bool(0.7) {
                col.push((i, random_poly(rng, space, &(&c - g))));
            }
        }
        cols.push(c);
        rels.push(col);
    }
    PresentedModule::new(space.clone(), gens, cols, rels).unwrap()
}

//! The product P^{n_1} x ... x P^{n_t}: variable layout of the Cox ring S
//! and of the exterior algebra E, plus monomial bases of their graded pieces.
//!
//! Global variable order: group 1 first, then group 2, and so on; ascending
//! index within a group. S-variable `j` and E-variable `j` are dual.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Exterior monomials are bitmasks over the global variable order.
pub type ExtMask = u32;

const MAX_VARS: usize = 24;

#[derive(Debug)]
pub struct ProductSpace {
    dims: Vec<usize>,
    field: PrimeField,
    offsets: Vec<usize>,
    group_of: Vec<usize>,
    group_masks: Vec<ExtMask>,
    strides: Vec<usize>,
    ext_by_degree: Vec<Vec<ExtMask>>,
    ext_index: Vec<u32>,
    s_cache: RwLock<HashMap<Multidegree, Arc<MonomialBasis>>>,
}

impl PartialEq for ProductSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.field == other.field
    }
}

impl Eq for ProductSpace {}

impl ProductSpace {
    pub fn new(dims: Vec<usize>, field: PrimeField) -> Result<Arc<Self>> {
        if dims.is_empty() {
            return Err(Error::Invalid("a product needs at least one factor".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Invalid(format!("factor dimensions must be >= 1, got {dims:?}")));
        }
        let nvars: usize = dims.iter().map(|n| n + 1).sum();
        if nvars > MAX_VARS {
            return Err(Error::Invalid(format!("{nvars} variables exceeds the supported {MAX_VARS}")));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut group_of = Vec::with_capacity(nvars);
        let mut group_masks = Vec::with_capacity(dims.len());
        let mut off = 0;
        for (i, &n) in dims.iter().enumerate() {
            offsets.push(off);
            group_masks.push(((1u32 << (n + 1)) - 1) << off);
            group_of.extend(std::iter::repeat_n(i, n + 1));
            off += n + 1;
        }
        let mut strides = Vec::with_capacity(dims.len());
        let mut s = 1;
        for &n in &dims {
            strides.push(s);
            s *= n + 2;
        }
        let mut ext_by_degree: Vec<Vec<ExtMask>> = vec![Vec::new(); s];
        for mask in 0..(1u32 << nvars) {
            let slot: usize = group_masks
                .iter()
                .zip(&strides)
                .map(|(g, st)| (mask & g).count_ones() as usize * st)
                .sum();
            ext_by_degree[slot].push(mask);
        }
        let mut ext_index = vec![0u32; 1 << nvars];
        for masks in ext_by_degree.iter_mut() {
            masks.sort_by_key(|&m| mask_vars(m));
            for (k, &m) in masks.iter().enumerate() {
                ext_index[m as usize] = k as u32;
            }
        }
        Ok(Arc::new(ProductSpace {
            dims,
            field,
            offsets,
            group_of,
            group_masks,
            strides,
            ext_by_degree,
            ext_index,
            s_cache: RwLock::new(HashMap::new()),
        }))
    }

    /// `P^1 x P^2` over GF(101), the running example.
    pub fn p1p2() -> Arc<Self> {
        Self::new(vec![1, 2], PrimeField::default()).expect("valid")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn num_vars(&self) -> usize {
        self.group_of.len()
    }

    /// `sum n_i`, the dimension of the product.
    pub fn dimension(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `(n_1 + 1, ..., n_t + 1)`.
    pub fn exterior_width(&self) -> Multidegree {
        Multidegree(self.dims.iter().map(|&n| n as i32 + 1).collect())
    }

    pub fn n(&self) -> Multidegree {
        Multidegree(self.dims.iter().map(|&n| n as i32).collect())
    }

    pub fn var(&self, group: usize, j: usize) -> usize {
        debug_assert!(j <= self.dims[group]);
        self.offsets[group] + j
    }

    pub fn group_of(&self, var: usize) -> usize {
        self.group_of[var]
    }

    /// Global indices of the variables of `group`.
    pub fn group_vars(&self, group: usize) -> std::ops::Range<usize> {
        self.offsets[group]..self.offsets[group] + self.dims[group] + 1
    }

    pub fn group_mask(&self, group: usize) -> ExtMask {
        self.group_masks[group]
    }

    pub fn var_name(&self, var: usize) -> String {
        let g = self.group_of[var];
        format!("x_({},{})", g, var - self.offsets[g])
    }

    pub fn zero_degree(&self) -> Multidegree {
        Multidegree::zero(self.factors())
    }

    // ---- exterior algebra ----

    /// Degree of an exterior monomial; componentwise `<= 0`.
    pub fn ext_degree(&self, mask: ExtMask) -> Multidegree {
        Multidegree(self.group_masks.iter().map(|g| -((mask & g).count_ones() as i32)).collect())
    }

    fn ext_slot(&self, a: &Multidegree) -> Option<usize> {
        let mut slot = 0;
        for (i, &n) in self.dims.iter().enumerate() {
            let k = -a.0[i];
            if k < 0 || k > n as i32 + 1 {
                return None;
            }
            slot += k as usize * self.strides[i];
        }
        Some(slot)
    }

    /// Canonical basis of `E_a`, ordered lexicographically by ascending variable lists.
    pub fn ext_basis(&self, a: &Multidegree) -> &[ExtMask] {
        match self.ext_slot(a) {
            Some(s) => &self.ext_by_degree[s],
            None => &[],
        }
    }

    /// Position of `mask` inside the basis of its own degree.
    pub fn ext_index(&self, mask: ExtMask) -> usize {
        self.ext_index[mask as usize] as usize
    }

    pub fn dim_e(&self, a: &Multidegree) -> usize {
        self.ext_basis(a).len()
    }

    // ---- symmetric algebra ----

    pub fn dim_s(&self, d: &Multidegree) -> usize {
        let mut prod = 1usize;
        for (i, &n) in self.dims.iter().enumerate() {
            let di = d.0[i];
            if di < 0 {
                return 0;
            }
            prod *= binomial(n as u64 + di as u64, n as u64) as usize;
        }
        prod
    }

    /// Cached lex-ordered monomial basis of `S_d`.
    pub fn s_basis(&self, d: &Multidegree) -> Arc<MonomialBasis> {
        if let Some(b) = self.s_cache.read().expect("cache lock").get(d) {
            return b.clone();
        }
        let b = Arc::new(MonomialBasis::build(self, d));
        self.s_cache.write().expect("cache lock").entry(d.clone()).or_insert(b).clone()
    }

    /// Multidegree of an exponent vector.
    pub fn s_degree(&self, exps: &[u16]) -> Multidegree {
        let mut d = vec![0i32; self.factors()];
        for (v, &e) in exps.iter().enumerate() {
            d[self.group_of[v]] += e as i32;
        }
        Multidegree(d)
    }
}

/// Ascending variable list of a mask.
pub fn mask_vars(mask: ExtMask) -> Vec<usize> {
    (0..32).filter(|&j| mask >> j & 1 == 1).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Monomials of one multidegree, in descending lex order of exponent vectors.
#[derive(Debug)]
pub struct MonomialBasis {
    degree: Multidegree,
    monomials: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl MonomialBasis {
    fn build(space: &ProductSpace, d: &Multidegree) -> Self {
        let mut monomials: Vec<Vec<u16>> = Vec::new();
        if d.0.iter().all(|&x| x >= 0) {
            monomials.push(vec![0; space.num_vars()]);
            for (g, &n) in space.dims.iter().enumerate() {
                let parts = compositions(d.0[g] as u16, n + 1);
                let off = space.offsets[g];
                let mut next = Vec::with_capacity(monomials.len() * parts.len());
                for m in &monomials {
                    for p in &parts {
                        let mut e = m.clone();
                        e[off..off + n + 1].copy_from_slice(p);
                        next.push(e);
                    }
                }
                monomials = next;
            }
        }
        monomials.sort_by(|a, b| b.cmp(a));
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis { degree: d.clone(), monomials, index }
    }

    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u16>] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> &[u16] {
        &self.monomials[i]
    }

    pub fn index_of(&self, exps: &[u16]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn compositions(total: u16, parts: usize) -> Vec<Vec<u16>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

//! The U functor from Beilinson windows to complexes of presented S-modules.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{merge, LabeledFreeComplex};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::exterior::ExteriorElement;
use crate::linalg::{SparseMatrix, SparseVec};
use crate::module::PresentedModule;
use crate::space::{mask_vars, ExtMask, ProductSpace};
use crate::spoly::SPolynomial;
use crate::tate::{beilinson_window, strand, tate_resolution_with, TateOptions};

/// Matrix of polynomials stored by columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, SPolynomial)>>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn from_columns(rows: usize, mut columns: Vec<Vec<(usize, SPolynomial)>>) -> Self {
        for c in columns.iter_mut() {
            c.retain(|(_, p)| !p.is_zero());
            c.sort_by_key(|e| e.0);
        }
        PolyMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[(usize, SPolynomial)] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<(usize, SPolynomial)>] {
        &self.columns
    }

    pub fn get(&self, l: usize, k: usize) -> SPolynomial {
        self.columns[k].iter().find(|e| e.0 == l).map(|e| e.1.clone()).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &SPolynomial)> {
        self.columns.iter().enumerate().flat_map(|(k, c)| c.iter().map(move |(l, p)| (*l, k, p)))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, space: &ProductSpace, inner: &PolyMatrix) -> PolyMatrix {
        let field = space.field();
        let columns = inner
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, SPolynomial> = BTreeMap::new();
                for (l, p) in col {
                    for (m, q) in &self.columns[*l] {
                        let e = acc.entry(*m).or_default();
                        *e = e.add(field, &q.mul(field, p));
                    }
                }
                acc.into_iter().filter(|(_, p)| !p.is_zero()).collect()
            })
            .collect();
        PolyMatrix { rows: self.rows, columns }
    }
}

/// Ascending-list lexicographic `k`-subsets of `vars`.
fn subsets(vars: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(vars: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..vars.len() {
            cur.push(vars[i]);
            rec(vars, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(vars, k, 0, &mut cur, &mut out);
    out
}

fn to_mask(vars: &[usize]) -> ExtMask {
    vars.iter().fold(0, |m, &v| m | (1 << v))
}

fn check_exponent(space: &ProductSpace, p: &Multidegree) -> Result<()> {
    if p.len() != space.factors() || !p.in_box(&space.zero_degree(), &space.n()) {
        return Err(Error::Range(format!("exponent {p} outside 0..{}", space.n())));
    }
    Ok(())
}

/// Per-factor generators of `U^p`: `(p_i + 1)`-subsets of the group's
/// variables as masks, or the single marker `0` when `p_i = 0`.
fn factor_generators(space: &ProductSpace, p: &Multidegree) -> Vec<Vec<ExtMask>> {
    (0..space.factors())
        .map(|i| {
            let pi = p.0[i] as usize;
            if pi == 0 {
                vec![0]
            } else {
                let vars: Vec<usize> = space.group_vars(i).collect();
                subsets(&vars, pi + 1).iter().map(|s| to_mask(s)).collect()
            }
        })
        .collect()
}

fn factor_presentation(space: &Arc<ProductSpace>, i: usize, pi: usize) -> PresentedModule {
    let t = space.factors();
    if pi == 0 {
        return PresentedModule::structure_sheaf(space.clone());
    }
    let field = space.field();
    let nv = space.num_vars();
    let vars: Vec<usize> = space.group_vars(i).collect();
    let gens = subsets(&vars, pi + 1);
    let index: BTreeMap<Vec<usize>, usize> = gens.iter().cloned().enumerate().map(|(k, g)| (g, k)).collect();
    let e = Multidegree::unit(t, i);
    let mut rels = Vec::new();
    for j in subsets(&vars, pi + 2) {
        let col = (0..j.len())
            .map(|r| {
                let mut rest = j.clone();
                rest.remove(r);
                let x = SPolynomial::var(nv, j[r]);
                (index[&rest], if r % 2 == 1 { x.scale(field, field.neg(1)) } else { x })
            })
            .collect();
        rels.push(col);
    }
    let cols = vec![&e + &e; rels.len()];
    PresentedModule::new(space.clone(), vec![e; gens.len()], cols, rels).expect("Koszul presentation")
}

/// Presentation of `U^p = ⊠ Ω^{p_i}(p_i)` as a tensor product of Koszul
/// image presentations.
pub fn beilinson_bundle(space: &Arc<ProductSpace>, p: &Multidegree) -> Result<PresentedModule> {
    check_exponent(space, p)?;
    let mut acc = factor_presentation(space, 0, p.0[0] as usize);
    for i in 1..space.factors() {
        acc = acc.tensor(&factor_presentation(space, i, p.0[i] as usize))?;
    }
    Ok(acc)
}

/// `ι_v(w)`: removes `v` from `w` with sign `(-1)^{#(w below v)}`.
fn contract(w: ExtMask, v: usize) -> Option<(ExtMask, bool)> {
    if w >> v & 1 == 0 {
        return None;
    }
    let below = (w & ((1u32 << v) - 1)).count_ones();
    Some((w ^ (1 << v), below % 2 == 1))
}

/// Generator-level matrix of `U(g): U^p → U^{p'}`. A monomial with `k_i`
/// variables in factor `i` contracts the factor-`i` generator; when the
/// target exponent reaches 0 the surviving variable becomes a linear form.
pub fn beilinson_map_entry(
    space: &ProductSpace,
    g: &ExteriorElement,
    p: &Multidegree,
    p_target: &Multidegree,
) -> Result<PolyMatrix> {
    check_exponent(space, p)?;
    check_exponent(space, p_target)?;
    let field = space.field();
    let t = space.factors();
    let nv = space.num_vars();
    let src = factor_generators(space, p);
    let tgt = factor_generators(space, p_target);
    let tgt_index: Vec<BTreeMap<ExtMask, usize>> =
        tgt.iter().map(|f| f.iter().enumerate().map(|(k, &m)| (m, k)).collect()).collect();
    let radix = |sizes: &[usize], digits: &[usize]| digits.iter().zip(sizes).fold(0, |acc, (d, s)| acc * s + d);
    let src_sizes: Vec<usize> = src.iter().map(|f| f.len()).collect();
    let tgt_sizes: Vec<usize> = tgt.iter().map(|f| f.len()).collect();
    let src_total: usize = src_sizes.iter().product();
    let tgt_total: usize = tgt_sizes.iter().product();
    let mut columns: Vec<BTreeMap<usize, SPolynomial>> = vec![BTreeMap::new(); src_total];

    for &(mask, c) in g.terms() {
        let k: Vec<i32> = (0..t).map(|i| (mask & space.group_mask(i)).count_ones() as i32).collect();
        if (0..t).any(|i| p.0[i] - k[i] != p_target.0[i]) {
            return Err(Error::Invalid(format!(
                "exterior monomial {:?} does not map U^{p} to U^{p_target}",
                mask_vars(mask)
            )));
        }
        let global = (0..t).flat_map(|j| (0..j).map(move |i| (i, j))).fold(false, |acc, (i, j)| {
            acc ^ ((k[j] * (p.0[i] + 1)) % 2 == 1)
        });
        let mut digits = vec![0usize; t];
        for (s, column) in columns.iter_mut().enumerate() {
            let mut rest = s;
            for i in (0..t).rev() {
                digits[i] = rest % src_sizes[i];
                rest /= src_sizes[i];
            }
            let mut neg = global;
            let mut exps = vec![0u16; nv];
            let mut tdigits = vec![0usize; t];
            let mut alive = true;
            for i in 0..t {
                let mut w = src[i][digits[i]];
                let gi = mask & space.group_mask(i);
                for v in mask_vars(gi).into_iter().rev() {
                    match contract(w, v) {
                        Some((w2, s)) => {
                            w = w2;
                            neg ^= s;
                        }
                        None => {
                            alive = false;
                            break;
                        }
                    }
                }
                if !alive {
                    break;
                }
                if p_target.0[i] == 0 && p.0[i] > 0 {
                    exps[w.trailing_zeros() as usize] += 1;
                    w = 0;
                }
                tdigits[i] = tgt_index[i][&w];
            }
            if !alive {
                continue;
            }
            let coeff = if neg { field.neg(c) } else { c };
            let row = radix(&tgt_sizes, &tdigits);
            let e = column.entry(row).or_default();
            *e = e.add(field, &SPolynomial::monomial(exps, coeff));
        }
    }
    let columns = columns
        .into_iter()
        .map(|c| c.into_iter().filter(|(_, p)| !p.is_zero()).collect())
        .collect();
    Ok(PolyMatrix::from_columns(tgt_total, columns))
}

/// Complex `⋯ → B_d → B_{d+1} → ⋯` of presented S-modules.
#[derive(Clone, Debug)]
pub struct SModuleComplex {
    space: Arc<ProductSpace>,
    terms: BTreeMap<i64, PresentedModule>,
    differentials: BTreeMap<i64, PolyMatrix>,
    /// Exponents of the `U` summands making up each term, when built by `U`.
    exponents: BTreeMap<i64, Vec<Multidegree>>,
}

impl PartialEq for SModuleComplex {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.terms == other.terms
            && self.differentials == other.differentials
            && self.exponents == other.exponents
    }
}

impl SModuleComplex {
    pub fn new(space: Arc<ProductSpace>) -> Self {
        SModuleComplex { space, terms: BTreeMap::new(), differentials: BTreeMap::new(), exponents: BTreeMap::new() }
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn set_term(&mut self, d: i64, m: PresentedModule) {
        if m.num_gens() == 0 {
            self.terms.remove(&d);
        } else {
            self.terms.insert(d, m);
        }
    }

    pub fn set_exponents(&mut self, d: i64, e: Vec<Multidegree>) {
        self.exponents.insert(d, e);
    }

    pub fn exponents(&self) -> &BTreeMap<i64, Vec<Multidegree>> {
        &self.exponents
    }

    /// Sets `B_d → B_{d+1}`, checking shape and homogeneity.
    pub fn set_differential(&mut self, d: i64, m: PolyMatrix) -> Result<()> {
        let (src_gens, tgt_gens) = (self.gen_degrees(d), self.gen_degrees(d + 1));
        if m.cols() != src_gens.len() || m.rows() != tgt_gens.len() {
            return Err(Error::Dimension(format!(
                "differential at {d} is {}x{}, terms have {} and {} generators",
                m.rows(),
                m.cols(),
                src_gens.len(),
                tgt_gens.len()
            )));
        }
        for (l, k, p) in m.entries() {
            let want = &src_gens[k] - &tgt_gens[l];
            if !p.is_homogeneous(&self.space) || p.degree(&self.space).as_ref() != Some(&want) {
                return Err(Error::Invalid(format!("entry ({l},{k}) at index {d} must have degree {want}")));
            }
        }
        if m.is_zero() {
            self.differentials.remove(&d);
        } else {
            self.differentials.insert(d, m);
        }
        Ok(())
    }

    pub fn terms(&self) -> &BTreeMap<i64, PresentedModule> {
        &self.terms
    }

    pub fn term(&self, d: i64) -> Option<&PresentedModule> {
        self.terms.get(&d)
    }

    pub fn differentials(&self) -> &BTreeMap<i64, PolyMatrix> {
        &self.differentials
    }

    pub fn differential(&self, d: i64) -> PolyMatrix {
        self.differentials
            .get(&d)
            .cloned()
            .unwrap_or_else(|| PolyMatrix::zeros(self.gen_degrees(d + 1).len(), self.gen_degrees(d).len()))
    }

    fn gen_degrees(&self, d: i64) -> Vec<Multidegree> {
        self.terms.get(&d).map(|m| m.gen_degrees().to_vec()).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Map of free covers in degree δ, before projecting to the quotient.
    fn cover_image(&self, d: i64, delta: &Multidegree, gen: usize, mono: &[u16]) -> SparseVec {
        let tgt = &self.terms[&(d + 1)];
        let piece = tgt.graded_piece(delta);
        let mut v = Vec::new();
        if let Some(m) = self.differentials.get(&d) {
            for (l, p) in m.column(gen) {
                let basis = self.space.s_basis(&(delta - &tgt.gen_degrees()[*l]));
                for (e, c) in p.mul_monomial(mono).terms() {
                    let idx = basis.index_of(e).expect("homogeneous entry");
                    v.push((piece.cover_index(*l, idx), *c));
                }
            }
        }
        merge(self.space.field(), v)
    }

    /// `B_d → B_{d+1}` on graded pieces of degree δ.
    pub fn degree_matrix(&self, d: i64, delta: &Multidegree) -> SparseMatrix {
        let field = self.space.field();
        let (Some(src), Some(tgt)) = (self.terms.get(&d), self.terms.get(&(d + 1))) else {
            let rows = self.terms.get(&(d + 1)).map_or(0, |m| m.dim(delta));
            let cols = self.terms.get(&d).map_or(0, |m| m.dim(delta));
            return SparseMatrix::zeros(rows, cols, field);
        };
        let sp = src.graded_piece(delta);
        let tp = tgt.graded_piece(delta);
        let columns = (0..sp.dim())
            .map(|k| {
                let (g, mi) = sp.lift(k);
                let mono = self.space.s_basis(&(delta - &src.gen_degrees()[g])).get(mi).to_vec();
                tp.project(&self.cover_image(d, delta, g, &mono))
            })
            .collect();
        SparseMatrix::from_columns(tp.dim(), field, columns)
    }

    /// Relations of `B_d` map into relations of `B_{d+1}` in degree δ.
    pub fn is_well_defined_at(&self, d: i64, delta: &Multidegree) -> bool {
        let (Some(src), Some(tgt)) = (self.terms.get(&d), self.terms.get(&(d + 1))) else {
            return true;
        };
        let field = self.space.field();
        let tp = tgt.graded_piece(delta);
        for (j, col) in src.relations().iter().enumerate() {
            for mu in self.space.s_basis(&(delta - &src.col_degrees()[j])).monomials() {
                let mut v = Vec::new();
                for (g, p) in col {
                    for (e, c) in p.mul_monomial(mu).terms() {
                        for (i, x) in self.cover_image(d, delta, *g, e) {
                            v.push((i, field.mul(x, *c)));
                        }
                    }
                }
                if !tp.project(&merge(field, v)).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    pub fn homology_dim(&self, d: i64, delta: &Multidegree) -> usize {
        let Some(m) = self.terms.get(&d) else { return 0 };
        let n = m.dim(delta);
        if n == 0 {
            return 0;
        }
        n - self.degree_matrix(d, delta).rank() - self.degree_matrix(d - 1, delta).rank()
    }

    /// `B_{d+1} ∘ B_d = 0` and well-definedness on every degree of the box.
    pub fn check_complex(&self, low: &Multidegree, high: &Multidegree) -> bool {
        let idx: Vec<i64> = self.differentials.keys().copied().collect();
        Multidegree::box_iter(low, high).par_iter().all(|delta| {
            idx.iter().all(|&d| {
                if !self.is_well_defined_at(d, delta) {
                    return false;
                }
                if !self.differentials.contains_key(&(d + 1)) {
                    return true;
                }
                let a = self.degree_matrix(d, delta);
                let b = self.degree_matrix(d + 1, delta);
                b.mul(&a).map(|p| p.is_zero()).unwrap_or(false)
            })
        })
    }

    /// `(index, degree) ↦ dim H` for every term index and degree in the box.
    pub fn homology_dims(&self, low: &Multidegree, high: &Multidegree) -> BTreeMap<(i64, Multidegree), usize> {
        let idx: Vec<i64> = self.terms.keys().copied().collect();
        Multidegree::box_iter(low, high)
            .par_iter()
            .flat_map_iter(|delta| {
                idx.iter().map(|&d| ((d, delta.clone()), self.homology_dim(d, delta))).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Componentwise max of all generator degrees plus `(1,…,1)`.
    pub fn positivity_threshold(&self) -> Multidegree {
        self.terms
            .values()
            .flat_map(|m| m.gen_degrees().iter())
            .fold(self.space.zero_degree(), |acc, g| acc.sup(g))
            .plus_constant(1)
    }
}

impl fmt::Display for SModuleComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        let describe = |m: &PresentedModule| {
            if m.num_relations() == 0 {
                format!("S^{}", m.num_gens())
            } else {
                format!("cokernel({} generators, {} relations)", m.num_gens(), m.num_relations())
            }
        };
        let shown: Vec<(i64, String)> = self.terms.iter().rev().map(|(&d, m)| (d, describe(m))).collect();
        writeln!(f, "{}", shown.iter().map(|s| s.1.clone()).collect::<Vec<_>>().join(" <-- "))?;
        let mut idx = String::new();
        for (k, (d, s)) in shown.iter().enumerate() {
            let cell = d.to_string();
            idx.push_str(&cell);
            if k + 1 < shown.len() {
                idx.push_str(&" ".repeat(s.len() + 5 - cell.len().min(s.len() + 5)));
            }
        }
        writeln!(f, "{idx}")?;
        for (&d, m) in self.terms.iter().rev() {
            if m.num_relations() == 0 {
                continue;
            }
            writeln!(f, "term {d}:")?;
            for (r, g) in m.gen_degrees().iter().enumerate() {
                let cells: Vec<String> = m
                    .relations()
                    .iter()
                    .map(|col| {
                        col.iter()
                            .find(|e| e.0 == r)
                            .map(|e| e.1.render(&self.space))
                            .unwrap_or_else(|| "0".into())
                    })
                    .collect();
                let deg = g.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
                writeln!(f, "  {{{deg}}} | {} |", cells.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Applies U to a window whose labels lie in `[-n, 0]`: a summand labeled
/// `a` becomes `U^{-a}`.
pub fn apply_u(window: &LabeledFreeComplex) -> Result<SModuleComplex> {
    let space = window.space().clone();
    let mut out = SModuleComplex::new(space.clone());
    let mut offsets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut bundles: BTreeMap<Multidegree, PresentedModule> = BTreeMap::new();
    for (&d, summands) in window.terms() {
        let mut term: Option<PresentedModule> = None;
        let mut offs = Vec::new();
        let mut exps = Vec::new();
        for s in summands {
            let p = -&s.label;
            if !bundles.contains_key(&p) {
                bundles.insert(p.clone(), beilinson_bundle(&space, &p)?);
            }
            let u = &bundles[&p];
            offs.push(term.as_ref().map_or(0, |t| t.num_gens()));
            term = Some(match term {
                None => u.clone(),
                Some(t) => t.direct_sum(u)?,
            });
            exps.push(p);
        }
        if let Some(t) = term {
            out.set_term(d, t);
            out.set_exponents(d, exps);
            offsets.insert(d, offs);
        }
    }
    for (&d, m) in window.differentials() {
        let src = window.term(d);
        let tgt = window.term(d + 1);
        let rows = out.term(d + 1).map_or(0, |t| t.num_gens());
        let cols = out.term(d).map_or(0, |t| t.num_gens());
        let mut columns: Vec<BTreeMap<usize, SPolynomial>> = vec![BTreeMap::new(); cols];
        for (l, k, g) in m.entries() {
            let block = beilinson_map_entry(&space, g, &-&src[k].label, &-&tgt[l].label)?;
            let (ro, co) = (offsets[&(d + 1)][l], offsets[&d][k]);
            for (bl, bk, p) in block.entries() {
                let e = columns[co + bk].entry(ro + bl).or_default();
                *e = e.add(space.field(), p);
            }
        }
        let columns = columns.into_iter().map(|c| c.into_iter().collect()).collect();
        out.set_differential(d, PolyMatrix::from_columns(rows, columns))?;
    }
    Ok(out)
}

/// Beilinson monad of the sheaf of `M`.
pub fn beilinson_monad(m: &PresentedModule) -> Result<SModuleComplex> {
    let space = m.space();
    let t = tate_resolution_with(m, &-&space.n(), &space.zero_degree(), &TateOptions::boxed())?;
    apply_u(&beilinson_window(&t)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadCheck {
    pub degree: Multidegree,
    pub h0: usize,
    pub expected: usize,
    /// Nonzero homology away from index 0, as `(index, dim)`.
    pub other: Vec<(i64, usize)>,
}

impl MonadCheck {
    pub fn passed(&self) -> bool {
        self.h0 == self.expected && self.other.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadReport {
    pub low: Multidegree,
    pub high: Multidegree,
    pub well_formed: bool,
    pub checks: Vec<MonadCheck>,
}

impl MonadReport {
    pub fn passed(&self) -> bool {
        self.well_formed && self.checks.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &MonadCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Compares `H^0(B)_d` with `M_d` and checks `H^{i≠0}(B)_d = 0` on the box.
pub fn verify_monad(b: &SModuleComplex, m: &PresentedModule, low: &Multidegree, high: &Multidegree) -> MonadReport {
    let well_formed = b.check_complex(low, high);
    let dims = b.homology_dims(low, high);
    let checks = Multidegree::box_iter(low, high)
        .into_iter()
        .map(|delta| {
            let h0 = dims.get(&(0, delta.clone())).copied().unwrap_or(0);
            let other = dims
                .iter()
                .filter(|((d, g), &n)| *d != 0 && *g == delta && n > 0)
                .map(|((d, _), &n)| (*d, n))
                .collect();
            MonadCheck { expected: m.dim(&delta), degree: delta, h0, other }
        })
        .collect();
    MonadReport { low: low.clone(), high: high.clone(), well_formed, checks }
}

/// Monad over `P^I` for the pushforward along the projection onto the
/// factors in `retained`, read off the strand through 0 in the other factors.
pub fn direct_image_complex(m: &PresentedModule, retained: &[usize]) -> Result<SModuleComplex> {
    let space = m.space();
    let t = space.factors();
    let mut keep = retained.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() >= t || keep.iter().any(|&i| i >= t) {
        return Err(Error::Invalid(format!("retained factors {retained:?} must be a proper nonempty subset")));
    }
    let n = space.n();
    let low = Multidegree((0..t).map(|i| if keep.contains(&i) { -n.0[i] } else { 0 }).collect());
    let high = space.zero_degree();
    let tate = tate_resolution_with(m, &low, &high, &TateOptions::boxed())?;
    let s = strand(&tate, &high, &keep)?;
    apply_u(&beilinson_window(&s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md;

    fn sp() -> Arc<ProductSpace> {
        ProductSpace::p1p2()
    }

    #[test]
    fn bundle_presentations() {
        let space = sp();
        let u = beilinson_bundle(&space, &md![0, 0]).unwrap();
        assert_eq!(u, PresentedModule::structure_sheaf(space.clone()));
        let u = beilinson_bundle(&space, &md![0, 1]).unwrap();
        assert_eq!(u.num_gens(), 3);
        assert_eq!(u.num_relations(), 1);
        assert_eq!(u.gen_degrees(), vec![md![0, 1]; 3].as_slice());
        let col: Vec<String> = u.relations()[0].iter().map(|(_, p)| p.render(&space)).collect();
        assert_eq!(col, vec!["x_(1,2)", "-x_(1,1)", "x_(1,0)"]);
        // Ω²(2) on P² is O(-1)
        let u = beilinson_bundle(&space, &md![0, 2]).unwrap();
        assert_eq!((u.num_gens(), u.num_relations()), (1, 0));
        for d in Multidegree::box_iter(&md![0, 0], &md![2, 3]) {
            assert_eq!(u.dim(&d), space.dim_s(&(&d - &md![0, 1])));
        }
        assert!(beilinson_bundle(&space, &md![2, 0]).is_err());
    }

    /// dim Ω^p(p)_d on P^n as the kernel of the Koszul map `Λ^p W ⊗ S_d → Λ^{p-1} W ⊗ S_{d+1}`.
    fn omega_dim(n: usize, p: usize, d: i32) -> usize {
        let space = ProductSpace::new(vec![n], Default::default()).unwrap();
        let vars: Vec<usize> = (0..=n).collect();
        let src = subsets(&vars, p);
        let tgt = subsets(&vars, p - 1);
        let sb = space.s_basis(&md![d]);
        let tb = space.s_basis(&md![d + 1]);
        let mut trip = Vec::new();
        let field = space.field();
        for (si, s) in src.iter().enumerate() {
            for (mi, mono) in sb.monomials().iter().enumerate() {
                for r in 0..s.len() {
                    let mut rest = s.clone();
                    rest.remove(r);
                    let ti = tgt.iter().position(|x| *x == rest).unwrap();
                    let mut e = mono.clone();
                    e[s[r]] += 1;
                    let row = ti * tb.len() + tb.index_of(&e).unwrap();
                    trip.push((row, si * sb.len() + mi, field.sign(r % 2 == 1)));
                }
            }
        }
        let m = SparseMatrix::from_triplets(tgt.len() * tb.len(), src.len() * sb.len(), field, trip).unwrap();
        m.kernel_basis().cols()
    }

    #[test]
    fn bundle_hilbert_functions_match_kernels() {
        for n in 1..=3usize {
            let space = ProductSpace::new(vec![n], Default::default()).unwrap();
            for p in 1..=n {
                let u = beilinson_bundle(&space, &md![p as i32]).unwrap();
                for d in 0..4 {
                    assert_eq!(u.dim(&md![d]), omega_dim(n, p, d), "n={n} p={p} d={d}");
                }
            }
        }
    }

    #[test]
    fn contraction_to_linear_forms() {
        let space = ProductSpace::new(vec![2], Default::default()).unwrap();
        let field = space.field();
        for j in 0..3 {
            let m = beilinson_map_entry(&space, &ExteriorElement::var(j), &md![1], &md![0]).unwrap();
            assert_eq!((m.rows(), m.cols()), (1, 3));
            // generators e01, e02, e12
            let gens = [[0usize, 1], [0, 2], [1, 2]];
            for (k, &[s, t]) in gens.iter().enumerate() {
                let want = if j == s {
                    SPolynomial::var(3, t)
                } else if j == t {
                    SPolynomial::var(3, s).scale(field, field.neg(1))
                } else {
                    SPolynomial::zero()
                };
                assert_eq!(m.get(0, k), want);
            }
            // composite with the relation column vanishes
            let u = beilinson_bundle(&space, &md![1]).unwrap();
            let rel = PolyMatrix::from_columns(3, vec![u.relations()[0].clone()]);
            assert!(m.compose(&space, &rel).is_zero());
        }
    }

    #[test]
    fn two_step_contraction_composes() {
        let space = ProductSpace::new(vec![2], Default::default()).unwrap();
        let field = space.field();
        for i in 0..3 {
            for j in 0..3 {
                let vi = ExteriorElement::var(i);
                let vj = ExteriorElement::var(j);
                let first = beilinson_map_entry(&space, &vj, &md![2], &md![1]).unwrap();
                let second = beilinson_map_entry(&space, &vi, &md![1], &md![0]).unwrap();
                let both = beilinson_map_entry(&space, &vi.mul(field, &vj), &md![2], &md![0]).unwrap();
                assert_eq!(second.compose(&space, &first), both);
            }
        }
    }

    #[test]
    fn identity_entry() {
        let space = sp();
        let m = beilinson_map_entry(&space, &ExteriorElement::one(), &md![1, 1], &md![1, 1]).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 3));
        for k in 0..3 {
            assert_eq!(m.column(k), &[(k, SPolynomial::constant(5, 1))]);
        }
        assert!(beilinson_map_entry(&space, &ExteriorElement::var(0), &md![1, 1], &md![1, 1]).is_err());
    }

    #[test]
    fn monad_of_structure_sheaf() {
        let s = PresentedModule::structure_sheaf(sp());
        let b = beilinson_monad(&s).unwrap();
        assert_eq!(b.terms().len(), 1);
        assert_eq!(b.term(0).unwrap(), &s);
        assert!(verify_monad(&b, &s, &md![0, 0], &md![2, 2]).passed());
    }

    #[test]
    fn monad_of_zero_sheaf() {
        let k = PresentedModule::residue_field(sp());
        assert!(beilinson_monad(&k).unwrap().is_zero());
        assert!(direct_image_complex(&k, &[1]).unwrap().is_zero());
    }

    #[test]
    fn worked_example_monad() {
        let space = sp();
        let o11 = PresentedModule::structure_sheaf(space.clone()).twist(&md![1, 1]);
        let m = o11.tensor(&PresentedModule::koszul_kernel(space.clone())).unwrap();
        let b = beilinson_monad(&m).unwrap();
        assert_eq!(b.term(0).unwrap(), &PresentedModule::free(space.clone(), vec![md![0, 0]; 6]));
        assert_eq!(b.term(-1).unwrap(), &beilinson_bundle(&space, &md![1, 1]).unwrap());
        assert_eq!(b.terms().len(), 2);
        let r = verify_monad(&b, &m, &md![0, 0], &md![3, 3]);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.checks.iter().find(|c| c.degree == md![0, 0]).unwrap().h0, 6);
        assert!(b.to_string().starts_with("S^6 <-- cokernel(3 generators, 1 relations)\n0       -1\n"));
    }

    #[test]
    fn direct_images_of_line_bundles() {
        let space = sp();
        let o = PresentedModule::structure_sheaf(space.clone());
        let p2 = ProductSpace::new(vec![2], space.field()).unwrap();
        let d = direct_image_complex(&o.twist(&md![-3, 0]), &[1]).unwrap();
        assert_eq!(d.terms().keys().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(d.term(1).unwrap(), &PresentedModule::free(p2.clone(), vec![md![0]; 2]));
        let d = direct_image_complex(&o.twist(&md![3, 0]), &[1]).unwrap();
        assert_eq!(d.term(0).unwrap(), &PresentedModule::free(p2, vec![md![0]; 4]));
        assert!(direct_image_complex(&o, &[0, 1]).is_err());
    }
}

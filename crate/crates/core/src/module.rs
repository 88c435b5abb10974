//! Finitely presented multigraded S-modules, accessed through graded pieces.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::linalg::{Cokernel, SparseMatrix, SparseVec};
use crate::space::{binomial, ProductSpace};
use crate::spoly::SPolynomial;

/// `M = coker(⊕_j S(-colDeg_j) → ⊕_k S(-genDeg_k))`.
#[derive(Debug)]
pub struct PresentedModule {
    space: Arc<ProductSpace>,
    gen_degrees: Vec<Multidegree>,
    col_degrees: Vec<Multidegree>,
    /// Relation columns as sparse `(generator row, polynomial)` lists.
    relations: Vec<Vec<(usize, SPolynomial)>>,
    cache: RwLock<HashMap<Multidegree, Arc<GradedPiece>>>,
}

impl Clone for PresentedModule {
    fn clone(&self) -> Self {
        PresentedModule {
            space: self.space.clone(),
            gen_degrees: self.gen_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            relations: self.relations.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for PresentedModule {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.gen_degrees == other.gen_degrees
            && self.col_degrees == other.col_degrees
            && self.relations == other.relations
    }
}

/// `M_d` as the quotient of the free cover `⊕_k S_{d - genDeg_k}` by the
/// relations in degree `d`. Each quotient basis vector lifts to a single
/// `(generator, monomial)` pair.
#[derive(Debug)]
pub struct GradedPiece {
    degree: Multidegree,
    /// Start of each generator's block in the cover (len = gens + 1).
    offsets: Vec<usize>,
    cokernel: Cokernel,
}

impl GradedPiece {
    pub fn degree(&self) -> &Multidegree {
        &self.degree
    }

    pub fn dim(&self) -> usize {
        self.cokernel.dim()
    }

    pub fn cover_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn cokernel(&self) -> &Cokernel {
        &self.cokernel
    }

    /// Cover coordinate of `(generator, monomial index)`.
    pub fn cover_index(&self, gen: usize, mono: usize) -> usize {
        self.offsets[gen] + mono
    }

    /// `(generator, monomial index)` of a cover coordinate.
    pub fn cover_pair(&self, coord: usize) -> (usize, usize) {
        let g = self.offsets.partition_point(|&o| o <= coord) - 1;
        (g, coord - self.offsets[g])
    }

    /// Lift of quotient basis vector `k`.
    pub fn lift(&self, k: usize) -> (usize, usize) {
        self.cover_pair(self.cokernel.lift(k))
    }

    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.cokernel.project(v)
    }
}

impl PresentedModule {
    /// Validates homogeneity of every relation entry.
    pub fn new(
        space: Arc<ProductSpace>,
        gen_degrees: Vec<Multidegree>,
        col_degrees: Vec<Multidegree>,
        relations: Vec<Vec<(usize, SPolynomial)>>,
    ) -> Result<Self> {
        let t = space.factors();
        let nv = space.num_vars();
        if gen_degrees.iter().chain(&col_degrees).any(|d| d.len() != t) {
            return Err(Error::Invalid(format!("degrees must have {t} components")));
        }
        if relations.len() != col_degrees.len() {
            return Err(Error::Invalid("one column degree per relation column required".into()));
        }
        let field = space.field();
        let mut cleaned = Vec::with_capacity(relations.len());
        for (j, col) in relations.into_iter().enumerate() {
            let mut merged: Vec<(usize, SPolynomial)> = Vec::new();
            for (row, poly) in col {
                if row >= gen_degrees.len() {
                    return Err(Error::Invalid(format!("relation row {row} out of range")));
                }
                if poly.terms().iter().any(|(e, _)| e.len() != nv) {
                    return Err(Error::Invalid(format!("exponent vectors must have length {nv}")));
                }
                if let Some(d) = poly.degree(&space) {
                    let want = &col_degrees[j] - &gen_degrees[row];
                    if !poly.is_homogeneous(&space) || d != want {
                        return Err(Error::Invalid(format!(
                            "relation entry ({row},{j}) is not homogeneous of degree {want}"
                        )));
                    }
                }
                match merged.iter_mut().find(|(r, _)| *r == row) {
                    Some((_, p)) => *p = p.add(field, &poly),
                    None => merged.push((row, poly)),
                }
            }
            merged.retain(|(_, p)| !p.is_zero());
            merged.sort_by_key(|e| e.0);
            cleaned.push(merged);
        }
        Ok(PresentedModule {
            space,
            gen_degrees,
            col_degrees,
            relations: cleaned,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Free module `⊕ S(-d_k)`.
    pub fn free(space: Arc<ProductSpace>, gen_degrees: Vec<Multidegree>) -> Self {
        PresentedModule::new(space, gen_degrees, Vec::new(), Vec::new()).expect("free module")
    }

    /// `S^1`, representing the structure sheaf.
    pub fn structure_sheaf(space: Arc<ProductSpace>) -> Self {
        let z = space.zero_degree();
        Self::free(space, vec![z])
    }

    /// `coker(vars)`, the residue field; its sheaf is zero.
    pub fn residue_field(space: Arc<ProductSpace>) -> Self {
        let nv = space.num_vars();
        let z = space.zero_degree();
        let mut cols = Vec::new();
        let mut rels = Vec::new();
        for v in 0..nv {
            cols.push(Multidegree::unit(space.factors(), space.group_of(v)));
            rels.push(vec![(0, SPolynomial::var(nv, v))]);
        }
        PresentedModule::new(space, vec![z], cols, rels).expect("valid presentation")
    }

    /// Presentation of `ker(vars: ⊕ S(-e_i)^{n_i+1} → S)` by the Koszul complex:
    /// generators `Λ²` of the variable space, relations its third differential.
    pub fn koszul_kernel(space: Arc<ProductSpace>) -> Self {
        let nv = space.num_vars();
        let t = space.factors();
        let field = space.field();
        let vdeg = |v: usize| Multidegree::unit(t, space.group_of(v));
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i + 1..nv).map(move |j| (i, j))).collect();
        let pair_index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let gens = pairs.iter().map(|&(i, j)| &vdeg(i) + &vdeg(j)).collect();
        let mut cols = Vec::new();
        let mut rels = Vec::new();
        for i in 0..nv {
            for j in i + 1..nv {
                for k in j + 1..nv {
                    cols.push(&(&vdeg(i) + &vdeg(j)) + &vdeg(k));
                    // x_i e_jk - x_j e_ik + x_k e_ij
                    rels.push(vec![
                        (pair_index[&(j, k)], SPolynomial::var(nv, i)),
                        (pair_index[&(i, k)], SPolynomial::var(nv, j).scale(field, field.neg(1))),
                        (pair_index[&(i, j)], SPolynomial::var(nv, k)),
                    ]);
                }
            }
        }
        PresentedModule::new(space, gens, cols, rels).expect("valid Koszul presentation")
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn gen_degrees(&self) -> &[Multidegree] {
        &self.gen_degrees
    }

    pub fn col_degrees(&self) -> &[Multidegree] {
        &self.col_degrees
    }

    pub fn relations(&self) -> &[Vec<(usize, SPolynomial)>] {
        &self.relations
    }

    pub fn num_gens(&self) -> usize {
        self.gen_degrees.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    /// `twist(M, a)_d = M_{d+a}`.
    pub fn twist(&self, a: &Multidegree) -> Self {
        PresentedModule {
            space: self.space.clone(),
            gen_degrees: self.gen_degrees.iter().map(|g| g - a).collect(),
            col_degrees: self.col_degrees.iter().map(|g| g - a).collect(),
            relations: self.relations.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::Invalid("direct sum over different rings".into()));
        }
        let shift = self.num_gens();
        let mut gens = self.gen_degrees.clone();
        gens.extend(other.gen_degrees.iter().cloned());
        let mut cols = self.col_degrees.clone();
        cols.extend(other.col_degrees.iter().cloned());
        let mut rels = self.relations.clone();
        rels.extend(
            other
                .relations
                .iter()
                .map(|c| c.iter().map(|(r, p)| (r + shift, p.clone())).collect()),
        );
        Ok(PresentedModule { space: self.space.clone(), gen_degrees: gens, col_degrees: cols, relations: rels, cache: RwLock::new(HashMap::new()) })
    }

    /// Tensor product of presentations: generators are pairs, relations are
    /// `rel ⊗ gen` and `gen ⊗ rel`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::Invalid("tensor over different rings".into()));
        }
        let field = self.space.field();
        let nv = self.space.num_vars();
        let (g1, g2) = (self.num_gens(), other.num_gens());
        let gens = self
            .gen_degrees
            .iter()
            .flat_map(|a| other.gen_degrees.iter().map(move |b| a + b))
            .collect();
        let mut cols = Vec::new();
        let mut rels = Vec::new();
        for (j, col) in self.relations.iter().enumerate() {
            for k in 0..g2 {
                cols.push(&self.col_degrees[j] + &other.gen_degrees[k]);
                rels.push(col.iter().map(|(r, p)| (r * g2 + k, p.clone())).collect());
            }
        }
        for i in 0..g1 {
            for (j, col) in other.relations.iter().enumerate() {
                cols.push(&self.gen_degrees[i] + &other.col_degrees[j]);
                rels.push(col.iter().map(|(r, p)| (i * g2 + r, p.clone())).collect());
            }
        }
        let _ = (field, nv);
        Ok(PresentedModule { space: self.space.clone(), gen_degrees: gens, col_degrees: cols, relations: rels, cache: RwLock::new(HashMap::new()) })
    }

    /// Graded piece `M_d`, cached per degree.
    pub fn graded_piece(&self, d: &Multidegree) -> Arc<GradedPiece> {
        if let Some(p) = self.cache.read().expect("cache lock").get(d) {
            return p.clone();
        }
        let piece = Arc::new(self.compute_piece(d));
        self.cache.write().expect("cache lock").entry(d.clone()).or_insert(piece).clone()
    }

    fn compute_piece(&self, d: &Multidegree) -> GradedPiece {
        let space = &self.space;
        let field = space.field();
        let mut offsets = vec![0usize];
        for g in &self.gen_degrees {
            offsets.push(offsets.last().unwrap() + space.dim_s(&(d - g)));
        }
        let cover = *offsets.last().unwrap();
        let mut columns: Vec<SparseVec> = Vec::new();
        for (j, col) in self.relations.iter().enumerate() {
            let mult = space.s_basis(&(d - &self.col_degrees[j]));
            for mu in mult.monomials() {
                let mut entries = Vec::new();
                for (row, poly) in col {
                    let basis = space.s_basis(&(d - &self.gen_degrees[*row]));
                    for (e, c) in poly.mul_monomial(mu).terms() {
                        let idx = basis.index_of(e).expect("monomial of the right degree");
                        entries.push((offsets[*row] + idx, *c));
                    }
                }
                entries.sort_unstable_by_key(|e| e.0);
                if !entries.is_empty() {
                    columns.push(entries);
                }
            }
        }
        let image = SparseMatrix::from_columns(cover, field, columns);
        GradedPiece { degree: d.clone(), offsets, cokernel: image.image_cokernel_basis() }
    }

    pub fn dim(&self, d: &Multidegree) -> usize {
        self.graded_piece(d).dim()
    }

    /// Matrix of multiplication by global variable `var`: `M_d → M_{d+e_i}`.
    pub fn variable_action(&self, d: &Multidegree, var: usize) -> SparseMatrix {
        let space = &self.space;
        let group = space.group_of(var);
        let src = self.graded_piece(d);
        let dt = d.plus_unit(group);
        let tgt = self.graded_piece(&dt);
        let columns = (0..src.dim())
            .map(|k| {
                let (g, m) = src.lift(k);
                let mut e = space.s_basis(&(d - &self.gen_degrees[g])).get(m).to_vec();
                e[var] += 1;
                let idx = space.s_basis(&(&dt - &self.gen_degrees[g])).index_of(&e).expect("degree");
                tgt.cokernel().project_basis(tgt.cover_index(g, idx))
            })
            .collect();
        SparseMatrix::from_columns(tgt.dim(), space.field(), columns)
    }

    /// `W_i ⊗ M_d → M_{d+e_i}`; column block `j` is multiplication by the
    /// `j`-th variable of group `i`.
    pub fn multiplication_map(&self, d: &Multidegree, group: usize) -> SparseMatrix {
        let space = &self.space;
        let dim = self.dim(d);
        let rows = self.dim(&d.plus_unit(group));
        let mut columns = Vec::with_capacity(dim * (space.dims()[group] + 1));
        for v in space.group_vars(group) {
            columns.extend(self.variable_action(d, v).into_columns());
        }
        SparseMatrix::from_columns(rows, space.field(), columns)
    }

    pub fn hilbert_function_box(&self, low: &Multidegree, high: &Multidegree) -> Vec<(Multidegree, usize)> {
        Multidegree::box_iter(low, high)
            .into_iter()
            .map(|d| {
                let n = self.dim(&d);
                (d, n)
            })
            .collect()
    }

    /// Componentwise max over generator and relation degrees (and 0).
    pub fn presentation_degree_bound(&self) -> Multidegree {
        self.gen_degrees
            .iter()
            .chain(&self.col_degrees)
            .fold(self.space.zero_degree(), |acc, d| acc.sup(d))
    }
}

/// `dim S_d` of a single projective space `P^n`.
pub fn single_factor_dim(n: usize, d: i64) -> u64 {
    if d < 0 {
        0
    } else {
        binomial(n as u64 + d as u64, n as u64)
    }
}

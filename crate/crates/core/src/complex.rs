//! Complexes of free multigraded E-modules with labeled summands.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::exterior::{wedge_sign, ExteriorElement};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::space::ProductSpace;

/// A free summand `E(label)`, generated in degree `label`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub label: Multidegree,
    pub padding: bool,
}

impl Summand {
    pub fn new(label: Multidegree) -> Self {
        Summand { label, padding: false }
    }
}

/// Matrix with exterior entries, stored by columns (one column per source
/// summand). Entry `(l, k)` acts on the `k`-th source component by `u ↦ g ∧ u`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, ExteriorElement)>>,
}

impl ExtMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExtMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn from_columns(rows: usize, mut columns: Vec<Vec<(usize, ExteriorElement)>>) -> Self {
        for c in columns.iter_mut() {
            c.retain(|(_, g)| !g.is_zero());
            c.sort_by_key(|e| e.0);
        }
        ExtMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[(usize, ExteriorElement)] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<(usize, ExteriorElement)>] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn get(&self, l: usize, k: usize) -> ExteriorElement {
        self.columns[k]
            .iter()
            .find(|e| e.0 == l)
            .map(|e| e.1.clone())
            .unwrap_or_default()
    }

    /// `(row, col, entry)` for all nonzero entries, column by column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &ExteriorElement)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.iter().map(move |(l, g)| (*l, k, g)))
    }

    /// `self ∘ inner`: entry `(m, k)` is `Σ_l self[m,l] ∧ inner[l,k]`.
    pub fn compose(&self, space: &ProductSpace, inner: &ExtMatrix) -> Result<ExtMatrix> {
        if inner.rows != self.cols() {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows,
                self.cols(),
                inner.rows,
                inner.cols()
            )));
        }
        let field = space.field();
        let columns = inner
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, ExteriorElement> = BTreeMap::new();
                for (l, g) in col {
                    for (m, h) in &self.columns[*l] {
                        let e = acc.entry(*m).or_default();
                        *e = e.add(field, &h.mul(field, g));
                    }
                }
                acc.into_iter().filter(|(_, g)| !g.is_zero()).collect()
            })
            .collect();
        Ok(ExtMatrix { rows: self.rows, columns })
    }

    /// Keeps the listed rows and columns, renumbered in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ExtMatrix {
        let mut row_map = vec![usize::MAX; self.rows];
        for (new, &old) in rows.iter().enumerate() {
            row_map[old] = new;
        }
        let columns = cols
            .iter()
            .map(|&k| {
                let mut c: Vec<_> = self.columns[k]
                    .iter()
                    .filter(|(l, _)| row_map[*l] != usize::MAX)
                    .map(|(l, g)| (row_map[*l], g.clone()))
                    .collect();
                c.sort_by_key(|e| e.0);
                c
            })
            .collect();
        ExtMatrix { rows: rows.len(), columns }
    }

    pub fn map_entries(&self, f: impl Fn(&ExteriorElement) -> ExteriorElement) -> ExtMatrix {
        let columns = self
            .columns
            .iter()
            .map(|c| c.iter().map(|(l, g)| (*l, f(g))).filter(|(_, g)| !g.is_zero()).collect())
            .collect();
        ExtMatrix { rows: self.rows, columns }
    }
}

/// Coordinates of `⊕_k E_{δ - label_k}`: start offset per summand, `None`
/// where the piece vanishes.
#[derive(Clone, Debug)]
pub struct DegreeLayout {
    offsets: Vec<Option<usize>>,
    dim: usize,
}

impl DegreeLayout {
    pub fn new<'a>(space: &ProductSpace, labels: impl IntoIterator<Item = &'a Multidegree>, delta: &Multidegree) -> Self {
        let mut offsets = Vec::new();
        let mut dim = 0;
        for a in labels {
            let n = space.dim_e(&(delta - a));
            if n == 0 {
                offsets.push(None);
            } else {
                offsets.push(Some(dim));
                dim += n;
            }
        }
        DegreeLayout { offsets, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, k: usize) -> Option<usize> {
        self.offsets[k]
    }

    /// Summand owning a coordinate.
    pub fn summand_of(&self, coord: usize) -> usize {
        let mut best = 0;
        for (k, o) in self.offsets.iter().enumerate() {
            if let Some(o) = o {
                if *o <= coord {
                    best = k;
                } else {
                    break;
                }
            }
        }
        best
    }
}

/// Degree-δ realization of a map between free modules with the given labels.
pub fn degree_matrix(
    space: &ProductSpace,
    source: &[Multidegree],
    target: &[Multidegree],
    map: &ExtMatrix,
    delta: &Multidegree,
) -> SparseMatrix {
    let field = space.field();
    let src = DegreeLayout::new(space, source, delta);
    let tgt = DegreeLayout::new(space, target, delta);
    let mut columns: Vec<SparseVec> = Vec::with_capacity(src.dim());
    for (k, a) in source.iter().enumerate() {
        if src.offset(k).is_none() {
            continue;
        }
        for &u in space.ext_basis(&(delta - a)) {
            let mut col: SparseVec = Vec::new();
            for (l, g) in &map.columns[k] {
                let Some(off) = tgt.offset(*l) else { continue };
                for &(m, c) in g.terms() {
                    if m & u != 0 {
                        continue;
                    }
                    let v = if wedge_sign(m, u) { field.neg(c) } else { c };
                    col.push((off + space.ext_index(m | u), v));
                }
            }
            columns.push(merge(field, col));
        }
    }
    SparseMatrix::from_columns(tgt.dim(), field, columns)
}

pub(crate) fn merge(field: crate::field::PrimeField, mut v: SparseVec) -> SparseVec {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = field.add(last.1, x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// How indices and Betti rows are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Tate windows and strands: columns print as `-d` (chain orientation).
    Tate,
    /// Corner complexes: columns print as `d`.
    Corner,
}

impl Orientation {
    pub fn note(&self) -> &'static str {
        match self {
            Orientation::Tate => {
                "differentials raise the index d; summand E(a) at index d carries H^(d-|a|)(F(a)); columns show -d"
            }
            Orientation::Corner => {
                "differentials raise the index d; tail at d < |c|, quadrant M_a (x) E(a) at d = |a|; columns show d"
            }
        }
    }

    fn column_label(&self, d: i64) -> i64 {
        match self {
            Orientation::Tate => -d,
            Orientation::Corner => d,
        }
    }
}

/// A bounded complex `⋯ → F_d → F_{d+1} → ⋯` of free E-modules.
#[derive(Clone, Debug)]
pub struct LabeledFreeComplex {
    space: Arc<ProductSpace>,
    terms: BTreeMap<i64, Vec<Summand>>,
    differentials: BTreeMap<i64, ExtMatrix>,
    orientation: Orientation,
    /// Sum of label coordinates dropped when passing to a strand; Betti rows
    /// are read against the full label total.
    fixed_total: i64,
    /// Label window the complex is known to cover, if any.
    window: Option<(Multidegree, Multidegree)>,
}

impl PartialEq for LabeledFreeComplex {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.terms == other.terms
            && self.differentials == other.differentials
            && self.orientation == other.orientation
            && self.fixed_total == other.fixed_total
            && self.window == other.window
    }
}

impl LabeledFreeComplex {
    pub fn new(space: Arc<ProductSpace>, orientation: Orientation) -> Self {
        LabeledFreeComplex {
            space,
            terms: BTreeMap::new(),
            differentials: BTreeMap::new(),
            orientation,
            fixed_total: 0,
            window: None,
        }
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn fixed_total(&self) -> i64 {
        self.fixed_total
    }

    pub fn set_fixed_total(&mut self, t: i64) {
        self.fixed_total = t;
    }

    pub fn window(&self) -> Option<&(Multidegree, Multidegree)> {
        self.window.as_ref()
    }

    pub fn set_window(&mut self, window: Option<(Multidegree, Multidegree)>) {
        self.window = window;
    }

    /// Replaces the term at `d`. Empty terms are dropped.
    pub fn set_term(&mut self, d: i64, summands: Vec<Summand>) {
        if summands.is_empty() {
            self.terms.remove(&d);
        } else {
            self.terms.insert(d, summands);
        }
    }

    /// Sets `F_d → F_{d+1}`, checking shape and entry degrees.
    pub fn set_differential(&mut self, d: i64, m: ExtMatrix) -> Result<()> {
        let src = self.term(d);
        let tgt = self.term(d + 1);
        if m.cols() != src.len() || m.rows() != tgt.len() {
            return Err(Error::Dimension(format!(
                "differential at {d} is {}x{}, terms have ranks {} and {}",
                m.rows(),
                m.cols(),
                src.len(),
                tgt.len()
            )));
        }
        for (l, k, g) in m.entries() {
            let want = &src[k].label - &tgt[l].label;
            if !g.is_homogeneous(&self.space) || g.degree(&self.space).as_ref() != Some(&want) {
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

    pub fn terms(&self) -> &BTreeMap<i64, Vec<Summand>> {
        &self.terms
    }

    pub fn term(&self, d: i64) -> &[Summand] {
        self.terms.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn labels(&self, d: i64) -> Vec<Multidegree> {
        self.term(d).iter().map(|s| s.label.clone()).collect()
    }

    /// `F_d → F_{d+1}`, zero if unset.
    pub fn differential(&self, d: i64) -> ExtMatrix {
        self.differentials
            .get(&d)
            .cloned()
            .unwrap_or_else(|| ExtMatrix::zeros(self.term(d + 1).len(), self.term(d).len()))
    }

    pub fn differentials(&self) -> &BTreeMap<i64, ExtMatrix> {
        &self.differentials
    }

    pub fn rank(&self, d: i64) -> usize {
        self.term(d).len()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.values().map(|v| v.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    /// Cohomological row `d - |a|` of a summand at index `d`.
    pub fn row(&self, d: i64, label: &Multidegree) -> i64 {
        d - label.total() - self.fixed_total
    }

    /// Restriction to the summands accepted by `keep(index, summand)`.
    /// This is a complex whenever the kept label set is convex.
    pub fn restrict(&self, keep: impl Fn(i64, &Summand) -> bool) -> LabeledFreeComplex {
        let mut kept: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (&d, s) in &self.terms {
            let idx: Vec<usize> = (0..s.len()).filter(|&k| keep(d, &s[k])).collect();
            if !idx.is_empty() {
                kept.insert(d, idx);
            }
        }
        let mut out = LabeledFreeComplex::new(self.space.clone(), self.orientation);
        out.fixed_total = self.fixed_total;
        out.window = self.window.clone();
        for (&d, idx) in &kept {
            out.terms.insert(d, idx.iter().map(|&k| self.terms[&d][k].clone()).collect());
        }
        for (&d, idx) in &kept {
            if let (Some(m), Some(tgt)) = (self.differentials.get(&d), kept.get(&(d + 1))) {
                let sub = m.submatrix(tgt, idx);
                if !sub.is_zero() {
                    out.differentials.insert(d, sub);
                }
            }
        }
        out
    }

    pub fn map_summands(&mut self, f: impl Fn(i64, &mut Summand)) {
        for (&d, s) in self.terms.iter_mut() {
            for x in s.iter_mut() {
                f(d, x);
            }
        }
    }

    /// Replaces the underlying space and relabels, for strands.
    pub(crate) fn with_space(
        &self,
        space: Arc<ProductSpace>,
        label: impl Fn(&Multidegree) -> Multidegree,
        entry: impl Fn(&ExteriorElement) -> ExteriorElement,
    ) -> LabeledFreeComplex {
        let terms = self
            .terms
            .iter()
            .map(|(&d, s)| (d, s.iter().map(|x| Summand { label: label(&x.label), padding: x.padding }).collect()))
            .collect();
        let differentials = self.differentials.iter().map(|(&d, m)| (d, m.map_entries(&entry))).collect();
        LabeledFreeComplex {
            space,
            terms,
            differentials,
            orientation: self.orientation,
            fixed_total: self.fixed_total,
            window: self.window.as_ref().map(|(l, h)| (label(l), label(h))),
        }
    }

    pub fn betti(&self) -> BettiTable {
        let mut entries = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (&d, s) in &self.terms {
            for x in s {
                *entries.entry((d, self.row(d, &x.label))).or_insert(0) += 1;
                *labels.entry((d, x.label.clone())).or_insert(0) += 1;
            }
        }
        BettiTable { entries, labels, orientation: self.orientation }
    }

    /// Every entry of every differential has zero constant term.
    pub fn is_minimal(&self) -> bool {
        self.differentials.values().all(|m| m.entries().all(|(_, _, g)| g.constant_term() == 0))
    }

    /// `d_{d+1} ∘ d_d = 0` as matrices over E.
    pub fn check_d_squared_symbolic(&self) -> Result<bool> {
        for (&d, m) in &self.differentials {
            if let Some(next) = self.differentials.get(&(d + 1)) {
                if !next.compose(&self.space, m)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Degree-δ realization of `F_d → F_{d+1}`.
    pub fn degree_matrix(&self, d: i64, delta: &Multidegree) -> SparseMatrix {
        degree_matrix(&self.space, &self.labels(d), &self.labels(d + 1), &self.differential(d), delta)
    }

    pub fn degree_dim(&self, d: i64, delta: &Multidegree) -> usize {
        DegreeLayout::new(&self.space, self.term(d).iter().map(|s| &s.label), delta).dim()
    }

    /// Degreewise `d∘d = 0` at every index and every degree of the box.
    pub fn check_d_squared_degreewise(&self, low: &Multidegree, high: &Multidegree) -> bool {
        let degrees = Multidegree::box_iter(low, high);
        degrees.par_iter().all(|delta| {
            self.differentials.keys().all(|&d| {
                if !self.differentials.contains_key(&(d + 1)) {
                    return true;
                }
                let a = self.degree_matrix(d, delta);
                let b = self.degree_matrix(d + 1, delta);
                b.mul(&a).map(|p| p.is_zero()).unwrap_or(false)
            })
        })
    }

    /// `dim H_d` in degree δ.
    pub fn homology_dim(&self, d: i64, delta: &Multidegree) -> usize {
        let n = self.degree_dim(d, delta);
        if n == 0 {
            return 0;
        }
        let out_rank = self.degree_matrix(d, delta).rank();
        let in_rank = self.degree_matrix(d - 1, delta).rank();
        n - out_rank - in_rank
    }

    /// Nonzero homology over all degrees of the box and the given indices
    /// (all indices of the complex when `indices` is `None`).
    pub fn degreewise_homology(
        &self,
        low: &Multidegree,
        high: &Multidegree,
        indices: Option<&[i64]>,
    ) -> HomologyReport {
        let idx: Vec<i64> = match indices {
            Some(v) => v.to_vec(),
            None => self.terms.keys().copied().collect(),
        };
        let degrees = Multidegree::box_iter(low, high);
        let checked = degrees.len() * idx.len();
        let mut nonzero: Vec<HomologyEntry> = degrees
            .par_iter()
            .flat_map_iter(|delta| {
                idx.iter()
                    .filter_map(|&d| {
                        let dim = self.homology_dim(d, delta);
                        (dim > 0).then(|| HomologyEntry { degree: delta.clone(), index: d, dim })
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        nonzero.sort_by(|a, b| (a.index, &a.degree).cmp(&(b.index, &b.degree)));
        HomologyReport { checked, nonzero }
    }
}

impl fmt::Display for LabeledFreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "-- {}", self.orientation.note())?;
        write!(f, "{}", self.betti())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyEntry {
    pub degree: Multidegree,
    pub index: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    /// Number of (degree, index) positions examined.
    pub checked: usize,
    pub nonzero: Vec<HomologyEntry>,
}

impl HomologyReport {
    pub fn is_exact(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Counts per (index, row) and per (index, label).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub entries: BTreeMap<(i64, i64), usize>,
    pub labels: BTreeMap<(i64, Multidegree), usize>,
    pub orientation: Orientation,
}

impl BettiTable {
    pub fn get(&self, d: i64, row: i64) -> usize {
        self.entries.get(&(d, row)).copied().unwrap_or(0)
    }

    pub fn total(&self, d: i64) -> usize {
        self.entries.iter().filter(|((i, _), _)| *i == d).map(|(_, c)| c).sum()
    }

    /// Indices in printed column order.
    pub fn columns(&self) -> Vec<i64> {
        let mut idx: Vec<i64> = self.entries.keys().map(|k| k.0).collect();
        idx.dedup();
        if let (Some(&lo), Some(&hi)) = (idx.iter().min(), idx.iter().max()) {
            idx = (lo..=hi).collect();
        }
        idx.sort_by_key(|&d| self.orientation.column_label(d));
        idx
    }

    /// Totals in printed column order.
    pub fn totals(&self) -> Vec<usize> {
        self.columns().into_iter().map(|d| self.total(d)).collect()
    }

    pub fn rows(&self) -> Vec<i64> {
        let lo = self.entries.keys().map(|k| k.1).min();
        let hi = self.entries.keys().map(|k| k.1).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo..=hi).collect(),
            _ => Vec::new(),
        }
    }

    /// One row of counts in printed column order.
    pub fn row(&self, r: i64) -> Vec<usize> {
        self.columns().into_iter().map(|d| self.get(d, r)).collect()
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols = self.columns();
        let rows = self.rows();
        let cell = |n: usize| if n == 0 { ".".to_string() } else { n.to_string() };
        let mut grid: Vec<(String, Vec<String>)> = Vec::new();
        grid.push((String::new(), cols.iter().map(|&d| self.orientation.column_label(d).to_string()).collect()));
        grid.push(("total:".into(), cols.iter().map(|&d| self.total(d).to_string()).collect()));
        for &r in &rows {
            grid.push((format!("{r}:"), cols.iter().map(|&d| cell(self.get(d, r))).collect()));
        }
        let widths: Vec<usize> =
            (0..cols.len()).map(|j| grid.iter().map(|(_, c)| c[j].len()).max().unwrap_or(1)).collect();
        let label_w = grid.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(7);
        for (label, cells) in &grid {
            let mut line = format!("{label:>label_w$}");
            for (j, c) in cells.iter().enumerate() {
                line.push(' ');
                line.push_str(&format!("{c:>w$}", w = widths[j]));
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

//! Exact sparse linear algebra over GF(p).
//!
//! Everything downstream reduces to three questions about a sparse matrix:
//! its rank, a basis of its right kernel, and an explicit description of the
//! quotient of the target space by its column space. All three are answered
//! by one incremental echelon form ([`Echelon`]) whose pivot order is chosen
//! by a static Markowitz count (sparsest coordinates first).

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Sparse vector: `(index, value)` pairs sorted by index, no stored zeros.
pub type SparseVec = Vec<(usize, u32)>;

/// Column-major sparse matrix over GF(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        SparseMatrix { rows, cols, field, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize, field: PrimeField) -> Self {
        let columns = (0..n).map(|i| vec![(i, 1)]).collect();
        SparseMatrix { rows: n, cols: n, field, columns }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions
    /// are summed; zeros are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        field: PrimeField,
        entries: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self> {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r},{c}) outside {rows}x{cols} matrix"
                )));
            }
            columns[c].push((r, v % field.p()));
        }
        for col in columns.iter_mut() {
            *col = normalize(field, std::mem::take(col));
        }
        Ok(SparseMatrix { rows, cols, field, columns })
    }

    /// Dense row-major input with signed entries, reduced mod p.
    pub fn from_dense(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &x) in row.iter().enumerate() {
                let v = field.reduce(x);
                if v != 0 {
                    columns[j].push((i, v));
                }
            }
        }
        SparseMatrix { rows: nrows, cols: ncols, field, columns }
    }

    /// Builds a matrix from already-normalized sparse columns.
    pub fn from_columns(rows: usize, field: PrimeField, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns
            .iter()
            .all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|&(r, v)| r < rows && v != 0)));
        SparseMatrix { rows, cols: columns.len(), field, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<SparseVec> {
        self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        match self.columns[c].binary_search_by_key(&r, |e| e.0) {
            Ok(k) => self.columns[c][k].1,
            Err(_) => 0,
        }
    }

    /// Triplets in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (r, c, v) in self.entries() {
            columns[r].push((c, v));
        }
        SparseMatrix { rows: self.cols, cols: self.rows, field: self.field, columns }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut acc = vec![0u32; self.rows];
        let f = self.field;
        for &(j, x) in v {
            for &(r, y) in &self.columns[j] {
                acc[r] = f.add(acc[r], f.mul(x, y));
            }
        }
        acc.into_iter().enumerate().filter(|e| e.1 != 0).collect()
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other.columns.iter().map(|c| self.mul_vec(c)).collect();
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, field: self.field, columns })
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack with different column counts".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|&(r, v)| (r + self.rows, v)));
                c
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows + other.rows, cols: self.cols, field: self.field, columns })
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::for_vectors(self.rows, self.field, &self.columns);
        for j in self.column_order() {
            ech.insert(&self.columns[j]);
        }
        ech.rank()
    }

    /// Columns span the right kernel; exactly `cols - rank` of them.
    pub fn kernel_basis(&self) -> SparseMatrix {
        let mut ech = Echelon::for_vectors(self.rows, self.field, &self.columns).tracking();
        let mut kernel = Vec::new();
        for j in self.column_order() {
            if let Insertion::Dependent(combo) = ech.insert_tracked(&self.columns[j], j) {
                kernel.push(combo);
            }
        }
        SparseMatrix { rows: self.cols, cols: kernel.len(), field: self.field, columns: kernel }
    }

    /// Echelon description of `target / column space`.
    pub fn image_cokernel_basis(&self) -> Cokernel {
        let mut ech = Echelon::for_vectors(self.rows, self.field, &self.columns);
        for j in self.column_order() {
            ech.insert(&self.columns[j]);
        }
        Cokernel::new(ech)
    }

    /// Sparsest columns first; ties by index.
    fn column_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.cols).collect();
        order.sort_by_key(|&j| (self.columns[j].len(), j));
        order
    }
}

fn normalize(field: PrimeField, mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|e| e.0);
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

/// `a[start..] - x * b`, keeping `a[..start]`; `b` must start at or after `a[start]`.
fn axpy_from(field: PrimeField, a: &SparseVec, start: usize, x: u32, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(&a[..start]);
    let (mut i, mut j) = (start, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, field.neg(field.mul(x, b[j].1))));
            j += 1;
        } else {
            let v = field.sub(a[i].1, field.mul(x, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn scale(field: PrimeField, v: &mut SparseVec, x: u32) {
    for e in v.iter_mut() {
        e.1 = field.mul(e.1, x);
    }
}

pub enum Insertion {
    /// New pivot at this (original) coordinate.
    Pivot(usize),
    /// Reduced to zero; carries the tracked combination (empty when untracked).
    Dependent(SparseVec),
}

/// Incremental echelon basis of a subspace of GF(p)^dim.
///
/// Coordinates are permuted so that sparse coordinates become pivots first.
/// Stored rows have leading coefficient 1 in permuted order; reduction of a
/// vector only ever introduces entries after the pivot being eliminated.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    dim: usize,
    perm: Vec<usize>,
    inv: Vec<usize>,
    rows: Vec<SparseVec>,
    tracks: Vec<SparseVec>,
    tracked: bool,
    pivot_row: Vec<u32>,
}

const NO_PIVOT: u32 = u32::MAX;

impl Echelon {
    /// Identity coordinate order.
    pub fn new(dim: usize, field: PrimeField) -> Self {
        Echelon {
            field,
            dim,
            perm: (0..dim).collect(),
            inv: (0..dim).collect(),
            rows: Vec::new(),
            tracks: Vec::new(),
            tracked: false,
            pivot_row: vec![NO_PIVOT; dim],
        }
    }

    /// Coordinate order by ascending occurrence count in `vectors`.
    pub fn for_vectors(dim: usize, field: PrimeField, vectors: &[SparseVec]) -> Self {
        let mut count = vec![0usize; dim];
        for v in vectors {
            for &(i, _) in v {
                count[i] += 1;
            }
        }
        let mut inv: Vec<usize> = (0..dim).collect();
        inv.sort_by_key(|&i| (count[i], i));
        let mut perm = vec![0; dim];
        for (pos, &i) in inv.iter().enumerate() {
            perm[i] = pos;
        }
        Echelon { perm, inv, ..Echelon::new(dim, field) }
    }

    fn tracking(mut self) -> Self {
        self.tracked = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn to_internal(&self, v: &SparseVec) -> SparseVec {
        let mut w: SparseVec = v.iter().map(|&(i, x)| (self.perm[i], x)).collect();
        w.sort_unstable_by_key(|e| e.0);
        w
    }

    fn to_external(&self, v: &SparseVec) -> SparseVec {
        let mut w: SparseVec = v.iter().map(|&(i, x)| (self.inv[i], x)).collect();
        w.sort_unstable_by_key(|e| e.0);
        w
    }

    fn reduce_internal(&self, mut v: SparseVec, mut track: Option<&mut SparseVec>) -> SparseVec {
        let f = self.field;
        let mut i = 0;
        while i < v.len() {
            let (pos, x) = v[i];
            let r = self.pivot_row[pos];
            if r == NO_PIVOT {
                i += 1;
                continue;
            }
            let r = r as usize;
            v = axpy_from(f, &v, i, x, &self.rows[r]);
            if let Some(t) = track.as_deref_mut() {
                *t = axpy_from(f, t, 0, x, &self.tracks[r]);
            }
        }
        v
    }

    /// Reduces `v` (original coordinates) modulo the span; the result has
    /// zero entries at every pivot coordinate.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let w = self.reduce_internal(self.to_internal(v), None);
        self.to_external(&w)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_internal(self.to_internal(v), None).is_empty()
    }

    pub fn insert(&mut self, v: &SparseVec) -> Insertion {
        let w = self.reduce_internal(self.to_internal(v), None);
        self.push_reduced(w, Vec::new())
    }

    /// Inserts `v` while tracking it as the formal combination `e_label`.
    pub fn insert_tracked(&mut self, v: &SparseVec, label: usize) -> Insertion {
        let mut t = vec![(label, 1)];
        let w = self.reduce_internal(self.to_internal(v), Some(&mut t));
        self.push_reduced(w, t)
    }

    fn push_reduced(&mut self, mut w: SparseVec, mut t: SparseVec) -> Insertion {
        if w.is_empty() {
            return Insertion::Dependent(t);
        }
        let f = self.field;
        let lead = w[0].1;
        let inv = f.inv(lead).expect("nonzero leading coefficient");
        scale(f, &mut w, inv);
        if self.tracked {
            scale(f, &mut t, inv);
        }
        let pos = w[0].0;
        self.pivot_row[pos] = self.rows.len() as u32;
        self.rows.push(w);
        self.tracks.push(if self.tracked { t } else { Vec::new() });
        Insertion::Pivot(self.inv[pos])
    }

    /// Pivot coordinates in original indexing, in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| self.inv[r[0].0]).collect()
    }

    pub fn is_pivot(&self, coord: usize) -> bool {
        self.pivot_row[self.perm[coord]] != NO_PIVOT
    }
}

/// Explicit model of `GF(p)^rows / column space`: the quotient basis is the
/// set of non-pivot coordinates, and [`Cokernel::project`] reduces a vector
/// and reads off those coordinates.
#[derive(Clone, Debug)]
pub struct Cokernel {
    echelon: Echelon,
    free: Vec<usize>,
    free_index: Vec<u32>,
}

impl Cokernel {
    fn new(echelon: Echelon) -> Self {
        let free: Vec<usize> = (0..echelon.dim()).filter(|&c| !echelon.is_pivot(c)).collect();
        let mut free_index = vec![NO_PIVOT; echelon.dim()];
        for (k, &c) in free.iter().enumerate() {
            free_index[c] = k as u32;
        }
        Cokernel { echelon, free, free_index }
    }

    /// Quotient of the whole space by nothing.
    pub fn trivial(dim: usize, field: PrimeField) -> Self {
        Cokernel::new(Echelon::new(dim, field))
    }

    pub fn ambient_dim(&self) -> usize {
        self.echelon.dim()
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn pivot_set(&self) -> Vec<usize> {
        let mut p = self.echelon.pivots();
        p.sort_unstable();
        p
    }

    /// Ambient coordinates whose classes form the quotient basis.
    pub fn basis_coordinates(&self) -> &[usize] {
        &self.free
    }

    /// Ambient coordinate lifting quotient basis vector `k`.
    pub fn lift(&self, k: usize) -> usize {
        self.free[k]
    }

    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let r = self.echelon.reduce(v);
        r.into_iter()
            .map(|(c, x)| {
                let k = self.free_index[c];
                debug_assert!(k != NO_PIVOT);
                (k as usize, x)
            })
            .collect()
    }

    /// Class of the standard basis vector `e_coord`.
    pub fn project_basis(&self, coord: usize) -> SparseVec {
        let k = self.free_index[coord];
        if k != NO_PIVOT {
            vec![(k as usize, 1)]
        } else {
            self.project(&vec![(coord, 1)])
        }
    }

    pub fn projection_matrix(&self) -> SparseMatrix {
        let field = self.echelon.field;
        let columns = (0..self.ambient_dim()).map(|c| self.project_basis(c)).collect();
        SparseMatrix::from_columns(self.dim(), field, columns)
    }
}

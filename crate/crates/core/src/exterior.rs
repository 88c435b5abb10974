//! Homogeneous arithmetic in the exterior algebra E and its degreewise
//! multiplication matrices.

use crate::degree::Multidegree;
use crate::field::PrimeField;
use crate::linalg::SparseMatrix;
use crate::space::{ExtMask, ProductSpace};

/// An element of E as a sorted list of `(monomial mask, coefficient)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExteriorElement {
    terms: Vec<(ExtMask, u32)>,
}

/// Parity of the permutation sorting `a` followed by `b`: counts pairs
/// `i in a, j in b` with `i > j`. Assumes `a & b == 0`.
#[inline]
pub fn wedge_sign(a: ExtMask, b: ExtMask) -> bool {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a.checked_shr(j + 1).unwrap_or(0)).count_ones();
    }
    inversions & 1 == 1
}

impl ExteriorElement {
    pub fn zero() -> Self {
        ExteriorElement { terms: Vec::new() }
    }

    pub fn one() -> Self {
        ExteriorElement { terms: vec![(0, 1)] }
    }

    pub fn monomial(mask: ExtMask, coeff: u32) -> Self {
        if coeff == 0 {
            return Self::zero();
        }
        ExteriorElement { terms: vec![(mask, coeff)] }
    }

    pub fn var(j: usize) -> Self {
        Self::monomial(1 << j, 1)
    }

    /// Wedge of variables in the given order (sign from sorting them).
    pub fn wedge_of_vars(field: PrimeField, vars: &[usize]) -> Self {
        let mut acc = Self::one();
        for &v in vars {
            acc = acc.mul(field, &Self::var(v));
        }
        acc
    }

    /// Sums repeated masks and drops zeros.
    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (ExtMask, u32)>) -> Self {
        let mut t: Vec<(ExtMask, u32)> = terms.into_iter().map(|(m, c)| (m, c % field.p())).collect();
        t.sort_by_key(|e| e.0);
        let mut out: Vec<(ExtMask, u32)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|e| e.1 != 0);
        ExteriorElement { terms: out }
    }

    pub fn terms(&self) -> &[(ExtMask, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of the leading term; `None` for zero.
    pub fn degree(&self, space: &ProductSpace) -> Option<Multidegree> {
        self.terms.first().map(|&(m, _)| space.ext_degree(m))
    }

    pub fn is_homogeneous(&self, space: &ProductSpace) -> bool {
        match self.degree(space) {
            None => true,
            Some(d) => self.terms.iter().all(|&(m, _)| space.ext_degree(m) == d),
        }
    }

    pub fn constant_term(&self) -> u32 {
        match self.terms.first() {
            Some(&(0, c)) => c,
            _ => 0,
        }
    }

    pub fn add(&self, field: PrimeField, other: &Self) -> Self {
        Self::from_terms(field, self.terms.iter().chain(&other.terms).copied())
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> Self {
        Self::from_terms(field, self.terms.iter().map(|&(m, x)| (m, field.mul(x, c))))
    }

    pub fn neg(&self, field: PrimeField) -> Self {
        self.scale(field, field.neg(1))
    }

    /// Wedge product `self ∧ other`.
    pub fn mul(&self, field: PrimeField, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(a, x) in &self.terms {
            for &(b, y) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let c = field.mul(x, y);
                out.push((a | b, if wedge_sign(a, b) { field.neg(c) } else { c }));
            }
        }
        Self::from_terms(field, out)
    }

    /// Keeps only monomials whose variables all lie in `mask`.
    pub fn restrict_to(&self, mask: ExtMask) -> Self {
        ExteriorElement { terms: self.terms.iter().copied().filter(|&(m, _)| m & !mask == 0).collect() }
    }

    /// Applies a variable renumbering that is increasing on the support.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let mut out = 0;
                let mut rest = m;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    out |= 1 << f(j);
                }
                (out, c)
            })
            .collect::<Vec<_>>();
        let mut e = ExteriorElement { terms };
        e.terms.sort_by_key(|t| t.0);
        e
    }
}

/// Matrix of `u ↦ g ∧ u` from `E_source` to `E_{source + deg g}`.
pub fn multiplication_matrix(space: &ProductSpace, g: &ExteriorElement, source: &Multidegree) -> SparseMatrix {
    mult_matrix(space, g, source, false)
}

/// Matrix of `u ↦ u ∧ g`.
pub fn right_multiplication_matrix(space: &ProductSpace, g: &ExteriorElement, source: &Multidegree) -> SparseMatrix {
    mult_matrix(space, g, source, true)
}

fn mult_matrix(space: &ProductSpace, g: &ExteriorElement, source: &Multidegree, right: bool) -> SparseMatrix {
    let field = space.field();
    let src = space.ext_basis(source);
    let Some(gdeg) = g.degree(space) else {
        let target = source.clone();
        return SparseMatrix::zeros(space.dim_e(&target), src.len(), field);
    };
    let target = source + &gdeg;
    let rows = space.dim_e(&target);
    let mut trip = Vec::new();
    for (col, &u) in src.iter().enumerate() {
        for &(m, c) in g.terms() {
            if m & u != 0 {
                continue;
            }
            let neg = if right { wedge_sign(u, m) } else { wedge_sign(m, u) };
            trip.push((space.ext_index(m | u), col, if neg { field.neg(c) } else { c }));
        }
    }
    SparseMatrix::from_triplets(rows, src.len(), field, trip).expect("indices in range")
}

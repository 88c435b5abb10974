//! Cohomology tables decoded from Tate windows, and the line-bundle oracle.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::LabeledFreeComplex;
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::module::PresentedModule;
use crate::space::binomial;
use crate::tate::{tate_resolution_with, TateOptions, TateScope};

/// `Σ_i dim H^i · h^i`, stored as the coefficient list without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EulerPolynomial(Vec<u64>);

impl EulerPolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        EulerPolynomial(coeffs)
    }

    pub fn zero() -> Self {
        EulerPolynomial(Vec::new())
    }

    pub fn monomial(i: usize, c: u64) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = c;
        Self::new(v)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of nonzero terms.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn add_term(&mut self, i: usize, c: u64) {
        if self.0.len() <= i {
            self.0.resize(i + 1, 0);
        }
        self.0[i] += c;
        *self = Self::new(std::mem::take(&mut self.0));
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    /// `χ = Σ (-1)^i dim H^i`.
    pub fn euler_characteristic(&self) -> i64 {
        self.0.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }
}

/// Compact rendering: `0`, `3`, `h`, `3h2`, `2+h`.
impl fmt::Display for EulerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            parts.push(match i {
                0 => coeff,
                1 => format!("{coeff}h"),
                _ => format!("{coeff}h{i}"),
            });
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// Euler polynomials of `F(a)` for every `low ≤ a ≤ high`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub low: Multidegree,
    pub high: Multidegree,
    pub entries: BTreeMap<Multidegree, EulerPolynomial>,
}

impl CohomologyTable {
    pub fn get(&self, a: &Multidegree) -> Option<&EulerPolynomial> {
        self.entries.get(a)
    }

    /// Reads `dim H^{d-|a|}(F(a))` off the non-padding summands of a window.
    pub fn from_window(t: &LabeledFreeComplex, low: &Multidegree, high: &Multidegree) -> Result<Self> {
        let mut entries: BTreeMap<Multidegree, EulerPolynomial> =
            Multidegree::box_iter(low, high).into_iter().map(|a| (a, EulerPolynomial::zero())).collect();
        for (&d, summands) in t.terms() {
            for s in summands.iter().filter(|s| !s.padding) {
                let Some(e) = entries.get_mut(&s.label) else { continue };
                let i = t.row(d, &s.label);
                if i < 0 {
                    return Err(Error::Invalid(format!("summand {} at index {d} has negative row", s.label)));
                }
                e.add_term(i as usize, 1);
            }
        }
        Ok(CohomologyTable { low: low.clone(), high: high.clone(), entries })
    }
}

pub fn euler_polynomial_table(m: &PresentedModule, low: &Multidegree, high: &Multidegree) -> Result<CohomologyTable> {
    euler_polynomial_table_with(m, low, high, &TateOptions::boxed())
}

pub fn euler_polynomial_table_with(
    m: &PresentedModule,
    low: &Multidegree,
    high: &Multidegree,
    opts: &TateOptions,
) -> Result<CohomologyTable> {
    let opts = TateOptions { scope: TateScope::Box, ..opts.clone() };
    let t = tate_resolution_with(m, low, high, &opts)?;
    CohomologyTable::from_window(&t, low, high)
}

/// Rows run from `high₂` down to `low₂`, columns from `low₁` up to `high₁`.
pub fn cohomology_matrix(table: &CohomologyTable) -> Result<String> {
    if table.low.len() != 2 {
        return Err(Error::Dimension(format!("cohomology matrix needs 2 factors, got {}", table.low.len())));
    }
    let (l, h) = (&table.low.0, &table.high.0);
    let cols: Vec<i32> = (l[0]..=h[0]).collect();
    let cells: Vec<Vec<String>> = (l[1]..=h[1])
        .rev()
        .map(|j| {
            cols.iter()
                .map(|&i| table.get(&Multidegree(vec![i, j])).map(|e| e.to_string()).unwrap_or_else(|| "0".into()))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..cols.len()).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(1)).collect();
    let mut out = String::new();
    for row in cells {
        let padded: Vec<String> = row.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(&format!("| {} |\n", padded.join(" ")));
    }
    Ok(out)
}

pub fn cohomology_matrix_of(m: &PresentedModule, low: &Multidegree, high: &Multidegree) -> Result<String> {
    if m.space().factors() != 2 {
        return Err(Error::Dimension(format!("cohomology matrix needs 2 factors, got {}", m.space().factors())));
    }
    cohomology_matrix(&euler_polynomial_table(m, low, high)?)
}

/// Euler polynomial of `O(a₁,…,a_t)` on `P^{n₁} × ⋯ × P^{n_t}` by Künneth.
pub fn kunneth_line_bundle(dims: &[usize], a: &Multidegree) -> EulerPolynomial {
    let mut acc = EulerPolynomial::new(vec![1]);
    for (&n, &ai) in dims.iter().zip(&a.0) {
        let n64 = n as i64;
        let ai = ai as i64;
        let factor = if ai >= 0 {
            EulerPolynomial::monomial(0, binomial((ai + n64) as u64, n as u64))
        } else if ai < -n64 {
            EulerPolynomial::monomial(n, binomial((-ai - 1) as u64, n as u64))
        } else {
            EulerPolynomial::zero()
        };
        acc = acc.mul(&factor);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md;
    use crate::space::ProductSpace;

    #[test]
    fn rendering() {
        assert_eq!(EulerPolynomial::zero().to_string(), "0");
        assert_eq!(EulerPolynomial::new(vec![3]).to_string(), "3");
        assert_eq!(EulerPolynomial::monomial(1, 1).to_string(), "h");
        assert_eq!(EulerPolynomial::monomial(2, 3).to_string(), "3h2");
        assert_eq!(EulerPolynomial::new(vec![2, 1]).to_string(), "2+h");
    }

    #[test]
    fn kunneth_examples() {
        assert_eq!(kunneth_line_bundle(&[1, 2], &md![-3, -3]), EulerPolynomial::monomial(3, 2));
        assert_eq!(kunneth_line_bundle(&[1, 2], &md![0, 0]), EulerPolynomial::new(vec![1]));
        assert_eq!(kunneth_line_bundle(&[1, 2], &md![3, 3]), EulerPolynomial::new(vec![40]));
        assert!(kunneth_line_bundle(&[1, 2], &md![-1, 5]).is_zero());
    }

    #[test]
    fn zero_sheaf_matrix() {
        let k = PresentedModule::residue_field(ProductSpace::p1p2());
        let m = cohomology_matrix_of(&k, &md![-1, -1], &md![1, 1]).unwrap();
        assert_eq!(m, "| 0 0 0 |\n| 0 0 0 |\n| 0 0 0 |\n");
    }

    #[test]
    fn matrix_needs_two_factors() {
        let p2 = ProductSpace::new(vec![2], Default::default()).unwrap();
        let s = PresentedModule::structure_sheaf(p2);
        assert!(matches!(cohomology_matrix_of(&s, &md![0], &md![1]), Err(Error::Dimension(_))));
    }
}

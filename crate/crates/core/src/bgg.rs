//! The BGG functor on truncations `M_{≥b}` and the corner search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{ExtMatrix, HomologyEntry, LabeledFreeComplex, Orientation, Summand};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::exterior::ExteriorElement;
use crate::module::PresentedModule;

/// Total complex of `M_a ⊗ E(a)` over the given labels, one summand per
/// basis vector of `M_a`, placed at index `|a|`. Summands at one index are
/// ordered by label, then by basis position.
pub fn quadrant_complex(m: &PresentedModule, labels: &[Multidegree]) -> LabeledFreeComplex {
    let space = m.space().clone();
    let field = space.field();
    let mut by_index: BTreeMap<i64, Vec<Multidegree>> = BTreeMap::new();
    let mut sorted = labels.to_vec();
    sorted.sort();
    sorted.dedup();
    for a in &sorted {
        if m.dim(a) > 0 {
            by_index.entry(a.total()).or_default().push(a.clone());
        }
    }
    // label -> (index, offset within the term)
    let mut place: BTreeMap<Multidegree, (i64, usize)> = BTreeMap::new();
    let mut c = LabeledFreeComplex::new(space.clone(), Orientation::Corner);
    for (&d, ls) in &by_index {
        let mut summands = Vec::new();
        for a in ls {
            place.insert(a.clone(), (d, summands.len()));
            summands.extend(std::iter::repeat_n(Summand::new(a.clone()), m.dim(a)));
        }
        c.set_term(d, summands);
    }
    for (&d, ls) in &by_index {
        let Some(next) = by_index.get(&(d + 1)) else { continue };
        let rows: usize = next.iter().map(|a| m.dim(a)).sum();
        let cols: usize = ls.iter().map(|a| m.dim(a)).sum();
        let mut columns: Vec<Vec<(usize, ExteriorElement)>> = vec![Vec::new(); cols];
        for a in ls {
            let (_, src_off) = place[a];
            let dim_a = m.dim(a);
            for i in 0..space.factors() {
                let b = a.plus_unit(i);
                let Some(&(_, tgt_off)) = place.get(&b) else { continue };
                let mm = m.multiplication_map(a, i);
                let mut entries: BTreeMap<(usize, usize), Vec<(u32, u32)>> = BTreeMap::new();
                for (j, var) in space.group_vars(i).enumerate() {
                    for k in 0..dim_a {
                        for &(l, v) in mm.column(j * dim_a + k) {
                            entries.entry((l, k)).or_default().push((1u32 << var, v));
                        }
                    }
                }
                for ((l, k), terms) in entries {
                    let g = ExteriorElement::from_terms(field, terms);
                    columns[src_off + k].push((tgt_off + l, g));
                }
            }
        }
        c.set_differential(d, ExtMatrix::from_columns(rows, columns))
            .expect("quadrant differential is homogeneous");
    }
    c
}

/// `bgg(M_{≥b})` on the labels `b ≤ a ≤ b + steps·(1,…,1)`.
pub fn bgg_quadrant_complex(m: &PresentedModule, b: &Multidegree, steps: usize) -> LabeledFreeComplex {
    let high = b.plus_constant(steps as i32);
    quadrant_complex(m, &Multidegree::box_iter(b, &high))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantReport {
    pub corner: Multidegree,
    pub margin: usize,
    pub checked: usize,
    pub nonzero: Vec<HomologyEntry>,
}

impl QuadrantReport {
    pub fn passed(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Degreewise homology of `bgg(M_{≥b})` past its first term, for all
/// degrees `b - (n+1) ≤ δ ≤ b + margin·(1,…,1)`. Each such degree only sees
/// labels in `[δ, δ + n + 1]`, so the computation is complete there.
pub fn verify_quadrant_exactness(m: &PresentedModule, b: &Multidegree, margin: usize) -> QuadrantReport {
    let space = m.space();
    let width = space.exterior_width();
    let low = b - &width;
    let high = b.plus_constant(margin as i32);
    let labels = Multidegree::box_iter(b, &(&high + &width));
    let c = quadrant_complex(m, &labels);
    let indices: Vec<i64> = c.terms().keys().copied().filter(|&d| d > b.total()).collect();
    let report = c.degreewise_homology(&low, &high, Some(&indices));
    QuadrantReport { corner: b.clone(), margin, checked: report.checked, nonzero: report.nonzero }
}

/// Settings for the corner search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityOptions {
    pub margin: usize,
    pub max_steps: usize,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions { margin: 2, max_steps: 8 }
    }
}

/// Proposes `b₀ = max(generator degrees, relation degrees, 0)` and moves
/// along the diagonal until the quadrant check passes.
pub fn coarse_regularity(m: &PresentedModule) -> Result<Multidegree> {
    coarse_regularity_with(m, RegularityOptions::default())
}

pub fn coarse_regularity_with(m: &PresentedModule, opts: RegularityOptions) -> Result<Multidegree> {
    let mut b = m.presentation_degree_bound();
    for _ in 0..=opts.max_steps {
        if verify_quadrant_exactness(m, &b, opts.margin).passed() {
            return Ok(b);
        }
        b = b.plus_constant(1);
    }
    Err(Error::RegularityFailed { last: b.plus_constant(-1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md;
    use crate::space::ProductSpace;

    #[test]
    fn quadrant_ranks_for_structure_sheaf() {
        let s = PresentedModule::structure_sheaf(ProductSpace::p1p2());
        let q = bgg_quadrant_complex(&s, &md![0, 0], 1);
        assert_eq!(q.rank(0), 1);
        assert_eq!(q.rank(1), 5);
        assert!(q.check_d_squared_symbolic().unwrap());
        let q = bgg_quadrant_complex(&s, &md![0, 0], 3);
        assert!(q.check_d_squared_symbolic().unwrap());
        assert!(q.check_d_squared_degreewise(&md![-2, -3], &md![3, 3]));
        assert!(q.is_minimal());
    }

    #[test]
    fn regularity_examples() {
        let space = ProductSpace::p1p2();
        let s = PresentedModule::structure_sheaf(space.clone());
        assert_eq!(coarse_regularity(&s).unwrap(), md![0, 0]);
        assert_eq!(coarse_regularity(&s.twist(&md![-2, -2])).unwrap(), md![2, 2]);
        let k = PresentedModule::residue_field(space);
        let b = coarse_regularity(&k).unwrap();
        assert!(b.ge(&md![1, 1]));
        assert!(bgg_quadrant_complex(&k, &b, 2).is_zero());
    }

    #[test]
    fn exactness_report() {
        let space = ProductSpace::p1p2();
        let s = PresentedModule::structure_sheaf(space.clone());
        assert!(verify_quadrant_exactness(&s, &md![0, 0], 3).passed());
        let kk = PresentedModule::koszul_kernel(space).twist(&md![1, 1]);
        let b = coarse_regularity(&kk).unwrap();
        assert!(verify_quadrant_exactness(&kk, &b, 2).passed());
        let far = s.twist(&md![-5, -5]);
        assert!(!verify_quadrant_exactness(&far, &md![0, 0], 5).passed());
    }
}

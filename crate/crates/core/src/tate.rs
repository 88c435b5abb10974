//! Tate windows, corner complexes, strands and Beilinson windows.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bgg::{coarse_regularity_with, quadrant_complex, verify_quadrant_exactness, RegularityOptions};
use crate::complex::{HomologyReport, LabeledFreeComplex, Orientation, Summand};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::module::PresentedModule;
use crate::space::ProductSpace;
use crate::tail::{corner_tail, Tail};

/// Which summands a Tate computation returns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TateScope {
    /// Every summand with label `≤ high` at index `≥ |low|`; labels outside
    /// `[low, high]` are flagged as padding.
    #[default]
    Window,
    /// Exactly the summands with `low ≤ label ≤ high`.
    Box,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateOptions {
    pub scope: TateScope,
    /// Corner to use instead of the regularity search; still raised to `high + 1`.
    pub corner: Option<Multidegree>,
    pub regularity: RegularityOptions,
}

impl TateOptions {
    pub fn boxed() -> Self {
        TateOptions { scope: TateScope::Box, ..Default::default() }
    }
}

pub(crate) fn check_window(space: &ProductSpace, low: &Multidegree, high: &Multidegree) -> Result<()> {
    let t = space.factors();
    if low.len() != t || high.len() != t {
        return Err(Error::Invalid(format!("window degrees must have {t} components")));
    }
    if !low.le(high) {
        return Err(Error::Invalid(format!("window low {low} is not <= high {high}")));
    }
    Ok(())
}

/// Part of the Tate resolution of the sheaf of `M` containing every summand
/// generated in degrees `low ≤ a ≤ high`.
pub fn tate_resolution(m: &PresentedModule, low: &Multidegree, high: &Multidegree) -> Result<LabeledFreeComplex> {
    tate_resolution_with(m, low, high, &TateOptions::default())
}

pub fn tate_resolution_with(
    m: &PresentedModule,
    low: &Multidegree,
    high: &Multidegree,
    opts: &TateOptions,
) -> Result<LabeledFreeComplex> {
    let space = m.space();
    check_window(space, low, high)?;
    let reg = match &opts.corner {
        Some(c) => c.clone(),
        None => coarse_regularity_with(m, opts.regularity)?,
    };
    let b = reg.sup(&high.plus_constant(1));
    let dim = space.dimension() as i64;
    let bottom = low.total();
    let mut out = match opts.scope {
        TateScope::Window => {
            let tail = corner_tail(m, &b, |a| a.total() >= bottom - dim);
            tail_complex(space, &tail).restrict(|d, s| s.label.le(high) && d >= bottom)
        }
        TateScope::Box => {
            let tail = corner_tail(m, &b, |a| a.ge(low));
            tail_complex(space, &tail).restrict(|_, s| s.label.in_box(low, high))
        }
    };
    out.map_summands(|_, s| s.padding = !s.label.in_box(low, high));
    out.set_window(Some((low.clone(), high.clone())));
    Ok(out)
}

/// The tail without `F_0`, placed at Tate indices `|b| - k - (t - 1)` and
/// cut down to the honest labels `≤ b - 1`.
pub fn tail_complex(space: &Arc<ProductSpace>, tail: &Tail) -> LabeledFreeComplex {
    let shift = space.factors() as i64 - 1;
    let honest = tail.corner.plus_constant(-1);
    let mut c = LabeledFreeComplex::new(space.clone(), Orientation::Tate);
    for k in 1..=tail.len() {
        let d = tail.corner_index(k) - shift;
        c.set_term(d, tail.labels(k).iter().map(|a| Summand::new(a.clone())).collect());
    }
    for k in 1..tail.len() {
        let d = tail.corner_index(k + 1) - shift;
        c.set_differential(d, tail.steps[k].map.clone()).expect("tail map is homogeneous");
    }
    c.restrict(|_, s| s.label.le(&honest))
}

/// `Tail_c(M) → bgg(M_{≥c})`: the tail on labels `≥ low - n` and the
/// quadrant on labels `a ≥ c` with `|a| ≤ |high|`.
pub fn corner_complex(
    m: &PresentedModule,
    c: &Multidegree,
    low: &Multidegree,
    high: &Multidegree,
) -> Result<LabeledFreeComplex> {
    let space = m.space();
    check_window(space, low, high)?;
    if c.len() != space.factors() {
        return Err(Error::Invalid(format!("corner must have {} components", space.factors())));
    }
    let check = verify_quadrant_exactness(m, c, RegularityOptions::default().margin);
    if let Some(e) = check.nonzero.first() {
        return Err(Error::NotExact { degree: e.degree.clone(), index: e.index });
    }
    let floor = low - &space.n();
    let tail = corner_tail(m, c, |a| a.ge(&floor));
    let top = high.total();
    let quad_labels: Vec<Multidegree> = if c.total() <= top {
        let span = (top - c.total()) as i32;
        Multidegree::box_iter(c, &c.plus_constant(span))
            .into_iter()
            .filter(|a| a.total() <= top)
            .collect()
    } else {
        Vec::new()
    };
    let mut out = quadrant_complex(m, &quad_labels);
    for k in 1..=tail.len() {
        out.set_term(tail.corner_index(k), tail.labels(k).iter().map(|a| Summand::new(a.clone())).collect());
    }
    for k in 0..tail.len() {
        if k == 0 && out.rank(c.total()) != tail.f0.len() {
            continue;
        }
        out.set_differential(tail.corner_index(k + 1), tail.steps[k].map.clone())?;
    }
    out.set_window(Some((floor, high.clone())));
    Ok(out)
}

/// Degreewise homology of a corner complex over `[low - n, high]`, at every
/// index below the last computed one.
pub fn corner_exactness(corner: &LabeledFreeComplex, low: &Multidegree, high: &Multidegree) -> HomologyReport {
    let n = corner.space().n();
    let Some((_, last)) = corner.index_range() else {
        return HomologyReport::default();
    };
    let indices: Vec<i64> = corner.terms().keys().copied().filter(|&d| d < last).collect();
    corner.degreewise_homology(&(low - &n), high, Some(&indices))
}

/// Summands whose labels equal `c` off the retained factors, as a complex
/// over the product of the retained factors.
pub fn strand(t: &LabeledFreeComplex, c: &Multidegree, retained: &[usize]) -> Result<LabeledFreeComplex> {
    let space = t.space();
    let nf = space.factors();
    if c.len() != nf {
        return Err(Error::Invalid(format!("strand anchor must have {nf} components")));
    }
    let mut keep: Vec<usize> = retained.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() >= nf || keep.iter().any(|&i| i >= nf) {
        return Err(Error::Invalid(format!("retained factors {retained:?} must be a proper nonempty subset")));
    }
    let omitted: Vec<usize> = (0..nf).filter(|i| !keep.contains(i)).collect();
    if let Some((low, high)) = t.window() {
        for &j in &omitted {
            if c.0[j] < low.0[j] || c.0[j] > high.0[j] {
                return Err(Error::Range(format!(
                    "strand coordinate {} of factor {j} lies outside the window {low}..{high}",
                    c.0[j]
                )));
            }
        }
    }
    let sub = ProductSpace::new(keep.iter().map(|&i| space.dims()[i]).collect(), space.field())?;
    let mut var_map = vec![usize::MAX; space.num_vars()];
    for (new_group, &g) in keep.iter().enumerate() {
        for (j, v) in space.group_vars(g).enumerate() {
            var_map[v] = sub.var(new_group, j);
        }
    }
    let on_strand = |a: &Multidegree| omitted.iter().all(|&j| a.0[j] == c.0[j]);
    let restricted = t.restrict(|_, s| on_strand(&s.label));
    let mut out = restricted.with_space(sub, |a| a.select(&keep), |g| g.map_vars(|v| var_map[v]));
    out.set_fixed_total(t.fixed_total() + omitted.iter().map(|&j| c.0[j] as i64).sum::<i64>());
    Ok(out)
}

/// Summands with `-n ≤ label ≤ 0`.
pub fn beilinson_window(t: &LabeledFreeComplex) -> Result<LabeledFreeComplex> {
    let space = t.space();
    let low = -&space.n();
    let high = space.zero_degree();
    match t.window() {
        Some((l, h)) if l.le(&low) && high.le(h) => {}
        Some((l, h)) => {
            return Err(Error::Coverage(format!("labels {low}..{high}; the complex covers {l}..{h}")));
        }
        None => return Err(Error::Coverage(format!("labels {low}..{high}; the complex has no recorded window"))),
    }
    let mut w = t.restrict(|_, s| s.label.in_box(&low, &high));
    w.set_window(Some((low, high)));
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md;

    fn o() -> PresentedModule {
        PresentedModule::structure_sheaf(ProductSpace::p1p2())
    }

    #[test]
    fn zero_sheaf_has_empty_window() {
        let k = PresentedModule::residue_field(ProductSpace::p1p2());
        let t = tate_resolution(&k, &md![-3, -3], &md![0, 0]).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn structure_sheaf_corner_summands() {
        let t = tate_resolution(&o(), &md![-3, -3], &md![0, 0]).unwrap();
        let b = t.betti();
        assert_eq!(b.labels.get(&(0, md![0, 0])), Some(&1));
        assert_eq!(b.labels.get(&(-2, md![-2, -3])), Some(&1));
        assert!(t.is_minimal());
        assert!(t.check_d_squared_symbolic().unwrap());
    }

    #[test]
    fn rejects_bad_window() {
        assert!(tate_resolution(&o(), &md![0, 0], &md![-1, 0]).is_err());
    }

    #[test]
    fn window_of_structure_sheaf() {
        let t = tate_resolution_with(&o(), &md![-1, -2], &md![0, 0], &TateOptions::boxed()).unwrap();
        let w = beilinson_window(&t).unwrap();
        assert_eq!(w.total_rank(), 1);
        assert_eq!(w.term(0)[0].label, md![0, 0]);
    }

    #[test]
    fn window_coverage_error() {
        let t = tate_resolution(&o(), &md![0, 0], &md![1, 1]).unwrap();
        assert!(matches!(beilinson_window(&t), Err(Error::Coverage(_))));
    }

    #[test]
    fn strand_range_error() {
        let t = tate_resolution(&o(), &md![-1, -1], &md![0, 0]).unwrap();
        assert!(matches!(strand(&t, &md![-3, 0], &[1]), Err(Error::Range(_))));
        assert!(strand(&t, &md![0, 0], &[0, 1]).is_err());
    }
}

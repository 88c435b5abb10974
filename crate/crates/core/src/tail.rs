//! Minimal free resolutions over E of the kernel at a corner, computed one
//! multidegree at a time and restricted to an up-set of labels.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::bgg::quadrant_complex;
use crate::complex::{degree_matrix, merge, DegreeLayout, ExtMatrix};
use crate::degree::Multidegree;
use crate::exterior::{wedge_sign, ExteriorElement};
use crate::linalg::{Echelon, Insertion, SparseVec};
use crate::module::PresentedModule;
use crate::space::{ExtMask, ProductSpace};

/// One homological step `F_{k+1} → F_k` of the tail.
#[derive(Clone, Debug)]
pub struct TailStep {
    pub labels: Vec<Multidegree>,
    /// Columns are the new generators written in `F_k`.
    pub map: ExtMatrix,
}

/// `⋯ → F_2 → F_1 → F_0 = M_b ⊗ E(b)`, with `F_k` at corner index `|b| - k`.
#[derive(Clone, Debug)]
pub struct Tail {
    pub corner: Multidegree,
    pub f0: Vec<Multidegree>,
    pub steps: Vec<TailStep>,
}

impl Tail {
    pub fn corner_index(&self, k: usize) -> i64 {
        self.corner.total() - k as i64
    }

    /// Labels of `F_k`.
    pub fn labels(&self, k: usize) -> &[Multidegree] {
        if k == 0 {
            &self.f0
        } else {
            &self.steps[k - 1].labels
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Resolves `ker(M_b ⊗ E(b) → ⊕ M_{b+e_i} ⊗ E(b+e_i))` on the labels in
/// `keep`, which must be an up-set.
pub fn corner_tail<F>(m: &PresentedModule, b: &Multidegree, keep: F) -> Tail
where
    F: Fn(&Multidegree) -> bool + Sync,
{
    let space = m.space();
    let mut labels = vec![b.clone()];
    labels.extend((0..space.factors()).map(|i| b.plus_unit(i)));
    let q = quadrant_complex(m, &labels);
    let d = b.total();
    let f0 = q.labels(d);
    let steps = resolve(space, &f0, &q.labels(d + 1), &q.differential(d), &keep);
    Tail { corner: b.clone(), f0, steps }
}

/// Minimal resolution of `ker(map)` restricted to labels in `keep`.
pub fn resolve<F>(
    space: &ProductSpace,
    source: &[Multidegree],
    target: &[Multidegree],
    map: &ExtMatrix,
    keep: &F,
) -> Vec<TailStep>
where
    F: Fn(&Multidegree) -> bool + Sync,
{
    let mut steps = Vec::new();
    let mut src = source.to_vec();
    let mut tgt = target.to_vec();
    let mut phi = map.clone();
    loop {
        let step = next_step(space, &src, &tgt, &phi, keep);
        if step.labels.is_empty() {
            break;
        }
        tgt = std::mem::replace(&mut src, step.labels.clone());
        phi = step.map.clone();
        steps.push(step);
    }
    steps
}

/// Degrees where the free module on `labels` is nonzero, inside `keep`.
fn support<F: Fn(&Multidegree) -> bool>(space: &ProductSpace, labels: &[Multidegree], keep: &F) -> Vec<Multidegree> {
    let width = space.exterior_width();
    let distinct: BTreeSet<&Multidegree> = labels.iter().collect();
    let mut out = BTreeSet::new();
    for a in distinct {
        for d in Multidegree::box_iter(&(a - &width), a) {
            if keep(&d) {
                out.insert(d);
            }
        }
    }
    out.into_iter().collect()
}

struct Piece {
    layout: DegreeLayout,
    /// `(summand, monomial)` of each coordinate.
    coords: Vec<(usize, ExtMask)>,
    kernel: Vec<SparseVec>,
}

fn next_step<F>(space: &ProductSpace, src: &[Multidegree], tgt: &[Multidegree], phi: &ExtMatrix, keep: &F) -> TailStep
where
    F: Fn(&Multidegree) -> bool + Sync,
{
    let degrees = support(space, src, keep);
    let pieces: HashMap<Multidegree, Piece> = degrees
        .par_iter()
        .map(|delta| {
            let layout = DegreeLayout::new(space, src, delta);
            let mut coords = Vec::with_capacity(layout.dim());
            for (k, a) in src.iter().enumerate() {
                if layout.offset(k).is_some() {
                    coords.extend(space.ext_basis(&(delta - a)).iter().map(|&u| (k, u)));
                }
            }
            let kernel = if tgt.is_empty() {
                (0..layout.dim()).map(|i| vec![(i, 1)]).collect()
            } else {
                degree_matrix(space, src, tgt, phi, delta).kernel_basis().into_columns()
            };
            (delta.clone(), Piece { layout, coords, kernel })
        })
        .collect();

    let field = space.field();
    let generators: Vec<(Multidegree, Vec<SparseVec>)> = degrees
        .par_iter()
        .map(|delta| {
            let piece = &pieces[delta];
            if piece.kernel.is_empty() {
                return (delta.clone(), Vec::new());
            }
            let mut ech = Echelon::new(piece.layout.dim(), field);
            'outer: for i in 0..space.factors() {
                let Some(up) = pieces.get(&delta.plus_unit(i)) else { continue };
                for x in &up.kernel {
                    for var in space.group_vars(i) {
                        let v: ExtMask = 1 << var;
                        let y = right_multiply(space, x, up, piece, v);
                        if !y.is_empty() {
                            ech.insert(&y);
                            if ech.rank() == piece.kernel.len() {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            let mut gens = Vec::new();
            for x in &piece.kernel {
                if ech.rank() == piece.kernel.len() {
                    break;
                }
                if let Insertion::Pivot(_) = ech.insert(x) {
                    gens.push(x.clone());
                }
            }
            (delta.clone(), gens)
        })
        .collect();

    let mut labels = Vec::new();
    let mut columns = Vec::new();
    for (delta, gens) in generators {
        let piece = &pieces[&delta];
        for g in gens {
            let mut parts: Vec<(usize, Vec<(ExtMask, u32)>)> = Vec::new();
            for &(coord, c) in &g {
                let (k, u) = piece.coords[coord];
                match parts.iter_mut().find(|p| p.0 == k) {
                    Some(p) => p.1.push((u, c)),
                    None => parts.push((k, vec![(u, c)])),
                }
            }
            let col = parts.into_iter().map(|(k, t)| (k, ExteriorElement::from_terms(field, t))).collect();
            labels.push(delta.clone());
            columns.push(col);
        }
    }
    TailStep { labels, map: ExtMatrix::from_columns(src.len(), columns) }
}

/// `x · v` for `x` in the piece `up` (degree `δ + e_i`), landing in `down`.
fn right_multiply(space: &ProductSpace, x: &SparseVec, up: &Piece, down: &Piece, v: ExtMask) -> SparseVec {
    let field = space.field();
    let mut out = Vec::with_capacity(x.len());
    for &(coord, c) in x {
        let (k, u) = up.coords[coord];
        if u & v != 0 {
            continue;
        }
        let off = down.layout.offset(k).expect("nonzero product has a home");
        let val = if wedge_sign(u, v) { field.neg(c) } else { c };
        out.push((off + space.ext_index(u | v), val));
    }
    merge(field, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md;

    #[test]
    fn structure_sheaf_socle() {
        let s = PresentedModule::structure_sheaf(ProductSpace::p1p2());
        let low = md![-2, -3];
        let tail = corner_tail(&s, &md![0, 0], |a| a.ge(&low));
        assert_eq!(tail.f0, vec![md![0, 0]]);
        assert_eq!(tail.labels(1), &[md![-2, -3]]);
        // the socle generator is the top wedge
        let g = tail.steps[0].map.get(0, 0);
        assert_eq!(g.terms().len(), 1);
        assert_eq!(g.terms()[0].0, 0b11111);
    }

    #[test]
    fn zero_kernel_gives_empty_tail() {
        let space = ProductSpace::p1p2();
        let k = PresentedModule::residue_field(space);
        let tail = corner_tail(&k, &md![1, 1], |_| true);
        assert!(tail.is_empty());
    }

    #[test]
    fn annihilated_vector_is_one_generator() {
        // E(0) with the zero map: the kernel is E(0) itself, one generator
        let space = ProductSpace::p1p2();
        let steps = resolve(&space, &[md![0, 0]], &[], &ExtMatrix::zeros(0, 1), &|a: &Multidegree| a.ge(&md![0, 0]));
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].labels, vec![md![0, 0]]);
    }
}

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An element of Z^t. Comparisons via [`Multidegree::le`] are termwise;
/// the derived `Ord` is lexicographic and only used for deterministic ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(pub Vec<i32>);

impl Multidegree {
    pub fn new(components: Vec<i32>) -> Self {
        Multidegree(components)
    }

    pub fn zero(t: usize) -> Self {
        Multidegree(vec![0; t])
    }

    pub fn unit(t: usize, i: usize) -> Self {
        let mut v = vec![0; t];
        v[i] = 1;
        Multidegree(v)
    }

    pub fn constant(t: usize, c: i32) -> Self {
        Multidegree(vec![c; t])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    /// `|a| = a_1 + ... + a_t`.
    pub fn total(&self) -> i64 {
        self.0.iter().map(|&x| x as i64).sum()
    }

    /// Termwise `self <= other`.
    pub fn le(&self, other: &Multidegree) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn ge(&self, other: &Multidegree) -> bool {
        other.le(self)
    }

    pub fn partial_cmp_termwise(&self, other: &Multidegree) -> Option<Ordering> {
        match (self.le(other), other.le(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    pub fn in_box(&self, low: &Multidegree, high: &Multidegree) -> bool {
        low.le(self) && self.le(high)
    }

    pub fn sup(&self, other: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn inf(&self, other: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn plus_unit(&self, i: usize) -> Multidegree {
        let mut v = self.0.clone();
        v[i] += 1;
        Multidegree(v)
    }

    pub fn plus_constant(&self, c: i32) -> Multidegree {
        Multidegree(self.0.iter().map(|x| x + c).collect())
    }

    /// Restriction to the listed coordinates.
    pub fn select(&self, idx: &[usize]) -> Multidegree {
        Multidegree(idx.iter().map(|&i| self.0[i]).collect())
    }

    /// All degrees `low <= d <= high`, last coordinate varying fastest.
    pub fn box_iter(low: &Multidegree, high: &Multidegree) -> Vec<Multidegree> {
        assert_eq!(low.len(), high.len());
        if !low.le(high) {
            return Vec::new();
        }
        let mut out = vec![low.clone()];
        for i in 0..low.len() {
            let mut next = Vec::new();
            for d in &out {
                for x in low.0[i]..=high.0[i] {
                    let mut e = d.clone();
                    e.0[i] = x;
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }
}

impl Add for &Multidegree {
    type Output = Multidegree;
    fn add(self, rhs: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Multidegree {
    type Output = Multidegree;
    fn sub(self, rhs: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Multidegree {
    type Output = Multidegree;
    fn neg(self) -> Multidegree {
        Multidegree(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Parses comma-separated signed integers, optionally wrapped in `()`, `{}` or `[]`.
impl FromStr for Multidegree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_matches(|c| matches!(c, '(' | ')' | '{' | '}' | '[' | ']'));
        if t.trim().is_empty() {
            return Err(Error::Parse(format!("empty multidegree {s:?}")));
        }
        t.split(',')
            .map(|x| {
                x.trim()
                    .parse::<i32>()
                    .map_err(|e| Error::Parse(format!("bad multidegree {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Multidegree)
    }
}

impl From<Vec<i32>> for Multidegree {
    fn from(v: Vec<i32>) -> Self {
        Multidegree(v)
    }
}

/// `md![1, 2]` shorthand.
#[macro_export]
macro_rules! md {
    ($($x:expr),* $(,)?) => {
        $crate::degree::Multidegree(vec![$($x),*])
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn termwise_order() {
        let a = md![0, 1];
        let b = md![1, 1];
        let c = md![1, 0];
        assert!(a.le(&b));
        assert!(!a.le(&c) && !c.le(&a));
        assert_eq!(a.partial_cmp_termwise(&c), None);
        assert_eq!(b.total(), 2);
    }

    #[test]
    fn parse_and_box() {
        assert_eq!("-3,-3".parse::<Multidegree>().unwrap(), md![-3, -3]);
        assert_eq!("{1, 2}".parse::<Multidegree>().unwrap(), md![1, 2]);
        assert!("1,x".parse::<Multidegree>().is_err());
        assert!("".parse::<Multidegree>().is_err());
        let bx = Multidegree::box_iter(&md![0, 0], &md![1, 2]);
        assert_eq!(bx.len(), 6);
        assert_eq!(bx[1], md![0, 1]);
    }
}

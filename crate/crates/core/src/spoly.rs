//! Polynomials in the Cox ring S.

use crate::degree::Multidegree;
use crate::field::PrimeField;
use crate::space::ProductSpace;

pub type Exponents = Vec<u16>;

/// A polynomial as `(exponent vector, coefficient)` pairs in descending lex order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SPolynomial {
    terms: Vec<(Exponents, u32)>,
}

impl SPolynomial {
    pub fn zero() -> Self {
        SPolynomial { terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: u32) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Exponents, c: u32) -> Self {
        if c == 0 {
            return Self::zero();
        }
        SPolynomial { terms: vec![(exps, c)] }
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (Exponents, u32)>) -> Self {
        let mut t: Vec<(Exponents, u32)> = terms.into_iter().map(|(e, c)| (e, c % field.p())).collect();
        t.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Exponents, u32)> = Vec::with_capacity(t.len());
        for (e, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = field.add(last.1, c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|e| e.1 != 0);
        SPolynomial { terms: out }
    }

    pub fn terms(&self) -> &[(Exponents, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self, space: &ProductSpace) -> Option<Multidegree> {
        self.terms.first().map(|(e, _)| space.s_degree(e))
    }

    pub fn is_homogeneous(&self, space: &ProductSpace) -> bool {
        match self.degree(space) {
            None => true,
            Some(d) => self.terms.iter().all(|(e, _)| space.s_degree(e) == d),
        }
    }

    pub fn add(&self, field: PrimeField, other: &Self) -> Self {
        Self::from_terms(field, self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> Self {
        Self::from_terms(field, self.terms.iter().map(|(e, x)| (e.clone(), field.mul(*x, c))))
    }

    pub fn mul_monomial(&self, exps: &[u16]) -> Self {
        SPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), *c))
                .collect(),
        }
    }

    pub fn mul(&self, field: PrimeField, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.push((a.iter().zip(b).map(|(p, q)| p + q).collect(), field.mul(*x, *y)));
            }
        }
        Self::from_terms(field, out)
    }

    /// Human-readable rendering with signed coefficients.
    pub fn render(&self, space: &ProductSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let f = space.field();
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let c = f.signed(*c);
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(v, &x)| if x == 1 { space.var_name(v) } else { format!("{}^{x}", space.var_name(v)) })
                .collect();
            let body = mono.join("*");
            let (neg, abs) = (c < 0, c.abs());
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if body.is_empty() {
                s.push_str(&abs.to_string());
            } else if abs == 1 {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{abs}*{body}"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let f = PrimeField::default();
        let sp = ProductSpace::p1p2();
        let x0 = SPolynomial::var(5, 0);
        let y0 = SPolynomial::var(5, 2);
        let p = x0.mul(f, &y0).add(f, &x0.mul(f, &y0));
        assert_eq!(p.terms(), &[(vec![1, 0, 1, 0, 0], 2)]);
        assert_eq!(p.degree(&sp), Some(crate::md![1, 1]));
        assert!(p.add(f, &p.scale(f, f.neg(1))).is_zero());
        assert!(!x0.add(f, &y0).is_homogeneous(&sp));
        assert_eq!(x0.scale(f, 100).render(&sp), "-x_(0,0)");
    }
}

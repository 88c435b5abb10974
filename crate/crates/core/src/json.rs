//! JSON forms of modules, complexes, cohomology tables and monads.
//!
//! Coefficients are written as canonical representatives in `[0, p)`; on
//! input any integer is accepted and reduced.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::beilinson::{PolyMatrix, SModuleComplex};
use crate::cohomology::{CohomologyTable, EulerPolynomial};
use crate::complex::{ExtMatrix, LabeledFreeComplex, Orientation, Summand};
use crate::degree::Multidegree;
use crate::error::{Error, Result};
use crate::exterior::ExteriorElement;
use crate::field::PrimeField;
use crate::module::PresentedModule;
use crate::space::{mask_vars, ProductSpace};
use crate::spoly::SPolynomial;

pub const MODULE_SCHEMA: &str = "tate.module/1";
pub const COMPLEX_SCHEMA: &str = "tate.complex/1";
pub const COHOMOLOGY_SCHEMA: &str = "tate.cohomology/1";
pub const MONAD_SCHEMA: &str = "tate.monad/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: i64,
    pub exps: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTerm {
    pub coeff: i64,
    pub vars: Vec<usize>,
}

pub fn poly_to_json(p: &SPolynomial) -> Vec<PolyTerm> {
    p.terms().iter().map(|(e, c)| PolyTerm { coeff: *c as i64, exps: e.clone() }).collect()
}

pub fn poly_from_json(space: &ProductSpace, terms: &[PolyTerm]) -> Result<SPolynomial> {
    let field = space.field();
    for t in terms {
        if t.exps.len() != space.num_vars() {
            return Err(Error::Parse(format!(
                "exponent vector {:?} has length {}, expected {}",
                t.exps,
                t.exps.len(),
                space.num_vars()
            )));
        }
    }
    Ok(SPolynomial::from_terms(field, terms.iter().map(|t| (t.exps.clone(), field.reduce(t.coeff)))))
}

pub fn ext_to_json(g: &ExteriorElement) -> Vec<ExtTerm> {
    g.terms().iter().map(|&(m, c)| ExtTerm { coeff: c as i64, vars: mask_vars(m) }).collect()
}

pub fn ext_from_json(space: &ProductSpace, terms: &[ExtTerm]) -> Result<ExteriorElement> {
    let field = space.field();
    let mut out = ExteriorElement::zero();
    for t in terms {
        if t.vars.iter().any(|&v| v >= space.num_vars()) {
            return Err(Error::Parse(format!("variable index in {:?} out of range", t.vars)));
        }
        if t.vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("exterior variables {:?} must be strictly ascending", t.vars)));
        }
        let mono = ExteriorElement::wedge_of_vars(field, &t.vars).scale(field, field.reduce(t.coeff));
        out = out.add(field, &mono);
    }
    Ok(out)
}

fn degree_from_json(space: &ProductSpace, d: &[i32], what: &str) -> Result<Multidegree> {
    if d.len() != space.factors() {
        return Err(Error::Parse(format!("{what} {d:?} must have {} components", space.factors())));
    }
    Ok(Multidegree(d.to_vec()))
}

fn space_from(factors: &[usize], prime: u32) -> Result<Arc<ProductSpace>> {
    ProductSpace::new(factors.to_vec(), PrimeField::new(prime)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub row: usize,
    pub col: usize,
    pub poly: Vec<PolyTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub factors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    pub gens: Vec<Vec<i32>>,
    #[serde(default)]
    pub rels: Vec<RelationEntry>,
    #[serde(default)]
    pub col_degs: Vec<Vec<i32>>,
}

impl ModuleJson {
    pub fn from_module(m: &PresentedModule) -> Self {
        let rels = m
            .relations()
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(r, p)| RelationEntry { row: *r, col: j, poly: poly_to_json(p) }))
            .collect();
        ModuleJson {
            schema: Some(MODULE_SCHEMA.into()),
            factors: m.space().dims().to_vec(),
            prime: Some(m.space().field().p()),
            gens: m.gen_degrees().iter().map(|d| d.0.clone()).collect(),
            rels,
            col_degs: m.col_degrees().iter().map(|d| d.0.clone()).collect(),
        }
    }

    /// Builds the module; `default_prime` is used when the JSON has none.
    pub fn to_module(&self, default_prime: u32) -> Result<PresentedModule> {
        if let Some(s) = &self.schema {
            if s != MODULE_SCHEMA {
                return Err(Error::Parse(format!("unsupported module schema {s:?}")));
            }
        }
        let space = space_from(&self.factors, self.prime.unwrap_or(default_prime))?;
        self.to_module_over(&space)
    }

    pub fn to_module_over(&self, space: &Arc<ProductSpace>) -> Result<PresentedModule> {
        let gens = self.gens.iter().map(|d| degree_from_json(space, d, "generator degree")).collect::<Result<Vec<_>>>()?;
        let cols = self.col_degs.iter().map(|d| degree_from_json(space, d, "column degree")).collect::<Result<Vec<_>>>()?;
        let mut rels: Vec<BTreeMap<usize, SPolynomial>> = vec![BTreeMap::new(); cols.len()];
        for e in &self.rels {
            if e.col >= cols.len() || e.row >= gens.len() {
                return Err(Error::Parse(format!(
                    "relation entry ({}, {}) outside {}x{}",
                    e.row,
                    e.col,
                    gens.len(),
                    cols.len()
                )));
            }
            let p = poly_from_json(space, &e.poly)?;
            let slot = rels[e.col].entry(e.row).or_default();
            *slot = slot.add(space.field(), &p);
        }
        let rels = rels.into_iter().map(|c| c.into_iter().filter(|(_, p)| !p.is_zero()).collect()).collect();
        PresentedModule::new(space.clone(), gens, cols, rels)
    }
}

/// Parses a module from JSON text, rejecting empty input.
pub fn parse_module(text: &str, default_prime: u32) -> Result<PresentedModule> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty module description".into()));
    }
    let j: ModuleJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.to_module(default_prime)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub index: i64,
    pub labels: Vec<Vec<i32>>,
    pub padding: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEntry {
    pub row: usize,
    pub col: usize,
    pub elem: Vec<ExtTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtDifferentialJson {
    pub index: i64,
    pub entries: Vec<ExtEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowJson {
    pub low: Vec<i32>,
    pub high: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexJson {
    pub schema: String,
    pub factors: Vec<usize>,
    pub prime: u32,
    pub orientation: Orientation,
    pub fixed_total: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowJson>,
    pub terms: Vec<TermJson>,
    pub differentials: Vec<ExtDifferentialJson>,
}

impl ComplexJson {
    pub fn from_complex(c: &LabeledFreeComplex) -> Self {
        let terms = c
            .terms()
            .iter()
            .map(|(&index, s)| TermJson {
                index,
                labels: s.iter().map(|x| x.label.0.clone()).collect(),
                padding: s.iter().map(|x| x.padding).collect(),
            })
            .collect();
        let differentials = c
            .differentials()
            .iter()
            .map(|(&index, m)| ExtDifferentialJson {
                index,
                entries: m.entries().map(|(row, col, g)| ExtEntry { row, col, elem: ext_to_json(g) }).collect(),
            })
            .collect();
        ComplexJson {
            schema: COMPLEX_SCHEMA.into(),
            factors: c.space().dims().to_vec(),
            prime: c.space().field().p(),
            orientation: c.orientation(),
            fixed_total: c.fixed_total(),
            window: c.window().map(|(l, h)| WindowJson { low: l.0.clone(), high: h.0.clone() }),
            terms,
            differentials,
        }
    }

    pub fn to_complex(&self) -> Result<LabeledFreeComplex> {
        if self.schema != COMPLEX_SCHEMA {
            return Err(Error::Parse(format!("unsupported complex schema {:?}", self.schema)));
        }
        let space = space_from(&self.factors, self.prime)?;
        let mut c = LabeledFreeComplex::new(space.clone(), self.orientation);
        c.set_fixed_total(self.fixed_total);
        if let Some(w) = &self.window {
            c.set_window(Some((degree_from_json(&space, &w.low, "window")?, degree_from_json(&space, &w.high, "window")?)));
        }
        for t in &self.terms {
            if t.labels.len() != t.padding.len() {
                return Err(Error::Parse(format!("term {} has mismatched labels and padding", t.index)));
            }
            let summands = t
                .labels
                .iter()
                .zip(&t.padding)
                .map(|(l, &padding)| Ok(Summand { label: degree_from_json(&space, l, "label")?, padding }))
                .collect::<Result<Vec<_>>>()?;
            c.set_term(t.index, summands);
        }
        for d in &self.differentials {
            let (rows, cols) = (c.rank(d.index + 1), c.rank(d.index));
            let mut columns: Vec<Vec<(usize, ExteriorElement)>> = vec![Vec::new(); cols];
            for e in &d.entries {
                if e.row >= rows || e.col >= cols {
                    return Err(Error::Parse(format!("differential entry ({}, {}) at {} out of range", e.row, e.col, d.index)));
                }
                columns[e.col].push((e.row, ext_from_json(&space, &e.elem)?));
            }
            c.set_differential(d.index, ExtMatrix::from_columns(rows, columns))?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyEntryJson {
    pub a: Vec<i32>,
    pub h: EulerPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyJson {
    pub schema: String,
    pub low: Vec<i32>,
    pub high: Vec<i32>,
    pub entries: Vec<CohomologyEntryJson>,
}

impl CohomologyJson {
    pub fn from_table(t: &CohomologyTable) -> Self {
        CohomologyJson {
            schema: COHOMOLOGY_SCHEMA.into(),
            low: t.low.0.clone(),
            high: t.high.0.clone(),
            entries: t.entries.iter().map(|(a, h)| CohomologyEntryJson { a: a.0.clone(), h: h.clone() }).collect(),
        }
    }

    pub fn to_table(&self) -> Result<CohomologyTable> {
        if self.schema != COHOMOLOGY_SCHEMA {
            return Err(Error::Parse(format!("unsupported cohomology schema {:?}", self.schema)));
        }
        Ok(CohomologyTable {
            low: Multidegree(self.low.clone()),
            high: Multidegree(self.high.clone()),
            entries: self.entries.iter().map(|e| (Multidegree(e.a.clone()), EulerPolynomial::new(e.h.coefficients().to_vec()))).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadTermJson {
    pub index: i64,
    pub module: ModuleJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<Vec<i32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDifferentialJson {
    pub index: i64,
    pub entries: Vec<RelationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadJson {
    pub schema: String,
    pub factors: Vec<usize>,
    pub prime: u32,
    pub terms: Vec<MonadTermJson>,
    pub differentials: Vec<PolyDifferentialJson>,
}

impl MonadJson {
    pub fn from_complex(b: &SModuleComplex) -> Self {
        let terms = b
            .terms()
            .iter()
            .map(|(&index, m)| {
                let mut module = ModuleJson::from_module(m);
                module.schema = None;
                module.prime = None;
                MonadTermJson {
                    index,
                    module,
                    exponents: b.exponents().get(&index).map(|e| e.iter().map(|p| p.0.clone()).collect()).unwrap_or_default(),
                }
            })
            .collect();
        let differentials = b
            .differentials()
            .iter()
            .map(|(&index, m)| PolyDifferentialJson {
                index,
                entries: m.entries().map(|(row, col, p)| RelationEntry { row, col, poly: poly_to_json(p) }).collect(),
            })
            .collect();
        MonadJson {
            schema: MONAD_SCHEMA.into(),
            factors: b.space().dims().to_vec(),
            prime: b.space().field().p(),
            terms,
            differentials,
        }
    }

    pub fn to_complex(&self) -> Result<SModuleComplex> {
        if self.schema != MONAD_SCHEMA {
            return Err(Error::Parse(format!("unsupported monad schema {:?}", self.schema)));
        }
        let space = space_from(&self.factors, self.prime)?;
        let mut b = SModuleComplex::new(space.clone());
        for t in &self.terms {
            b.set_term(t.index, t.module.to_module_over(&space)?);
            if !t.exponents.is_empty() {
                let e = t.exponents.iter().map(|p| degree_from_json(&space, p, "exponent")).collect::<Result<_>>()?;
                b.set_exponents(t.index, e);
            }
        }
        for d in &self.differentials {
            let rows = b.term(d.index + 1).map_or(0, |m| m.num_gens());
            let cols = b.term(d.index).map_or(0, |m| m.num_gens());
            let mut columns: Vec<Vec<(usize, SPolynomial)>> = vec![Vec::new(); cols];
            for e in &d.entries {
                if e.row >= rows || e.col >= cols {
                    return Err(Error::Parse(format!("differential entry ({}, {}) at {} out of range", e.row, e.col, d.index)));
                }
                columns[e.col].push((e.row, poly_from_json(&space, &e.poly)?));
            }
            b.set_differential(d.index, PolyMatrix::from_columns(rows, columns))?;
        }
        Ok(b)
    }
}

pub fn to_string_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beilinson::beilinson_monad;
    use crate::cohomology::euler_polynomial_table;
    use crate::md;
    use crate::tate::tate_resolution;

    fn sp() -> Arc<ProductSpace> {
        ProductSpace::p1p2()
    }

    #[test]
    fn module_round_trip() {
        let m = PresentedModule::koszul_kernel(sp());
        let j = ModuleJson::from_module(&m);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"colDegs\""));
        assert_eq!(parse_module(&text, 7).unwrap(), m);
    }

    #[test]
    fn hand_written_module() {
        let text = r#"{"factors":[1,2],"gens":[[0,0]],"rels":[{"row":0,"col":0,"poly":[{"coeff":-1,"exps":[1,0,0,0,0]}]}],"colDegs":[[1,0]]}"#;
        let m = parse_module(text, 101).unwrap();
        assert_eq!(m.space().field().p(), 101);
        assert_eq!(m.relations()[0][0].1.terms()[0].1, 100);
        assert_eq!(m.dim(&md![1, 0]), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_module("", 101), Err(Error::Parse(_))));
        assert!(matches!(parse_module("{", 101), Err(Error::Parse(_))));
        let bad_len = r#"{"factors":[1,2],"gens":[[0,0]],"rels":[{"row":0,"col":0,"poly":[{"coeff":1,"exps":[1]}]}],"colDegs":[[1,0]]}"#;
        assert!(matches!(parse_module(bad_len, 101), Err(Error::Parse(_))));
        let inhomogeneous = r#"{"factors":[1,2],"gens":[[0,0]],"rels":[{"row":0,"col":0,"poly":[{"coeff":1,"exps":[1,0,0,0,0]}]}],"colDegs":[[0,1]]}"#;
        assert!(parse_module(inhomogeneous, 101).is_err());
        assert!(matches!(parse_module(r#"{"factors":[1],"prime":100,"gens":[]}"#, 101), Err(Error::NotPrime(100))));
    }

    #[test]
    fn exterior_terms_are_canonical() {
        let space = sp();
        let g = ExteriorElement::from_terms(space.field(), [(0b101, 3), (0b011, 100)]);
        let j = ext_to_json(&g);
        assert_eq!(j[0].vars, vec![0, 1]);
        assert_eq!(ext_from_json(&space, &j).unwrap(), g);
        assert!(ext_from_json(&space, &[ExtTerm { coeff: 1, vars: vec![2, 0] }]).is_err());
    }

    #[test]
    fn complex_round_trip() {
        let o = PresentedModule::structure_sheaf(sp());
        let t = tate_resolution(&o, &md![-2, -2], &md![0, 0]).unwrap();
        let j = ComplexJson::from_complex(&t);
        let back: ComplexJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back.to_complex().unwrap(), t);
    }

    #[test]
    fn cohomology_round_trip() {
        let o = PresentedModule::structure_sheaf(sp());
        let table = euler_polynomial_table(&o, &md![-3, -3], &md![-2, -2]).unwrap();
        let j = CohomologyJson::from_table(&table);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains(r#"{"a":[-3,-3],"h":[0,0,0,2]}"#));
        let back: CohomologyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_table().unwrap(), table);
    }

    #[test]
    fn monad_round_trip() {
        let space = sp();
        let m = PresentedModule::structure_sheaf(space.clone())
            .twist(&md![1, 1])
            .tensor(&PresentedModule::koszul_kernel(space))
            .unwrap();
        let b = beilinson_monad(&m).unwrap();
        let j = MonadJson::from_complex(&b);
        let back: MonadJson = serde_json::from_str(&to_string_pretty(&j)).unwrap();
        assert_eq!(back.to_complex().unwrap(), b);
    }
}

//! Deterministic pretty printer. Output re-parses to an equal value; the
//! canonical term order of the underlying maps makes it byte-stable.

use num::{One, Signed};

use crate::form::{BasisOneForm, GradedForm, WedgeWord};
use crate::index::MultiIndex;
use crate::model::{JetSymbol, Model};
use crate::parser::Value;
use crate::scalar::{GradedScalar, Monomial, Rat};

fn print_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn print_jet(sym: &JetSymbol, model: &Model) -> String {
    let name = &model.generator(sym.gen).name;
    if sym.index.is_empty() {
        name.clone()
    } else {
        let coords: Vec<&str> = sym
            .index
            .entries()
            .iter()
            .map(|&l| model.coord_names()[l as usize].as_str())
            .collect();
        format!("d({},{})", name, coords.join(","))
    }
}

fn print_monomial(m: &Monomial, model: &Model) -> Vec<String> {
    let mut factors = Vec::new();
    for &(l, k) in &m.base {
        let name = &model.coord_names()[l as usize];
        if k == 1 {
            factors.push(name.clone());
        } else {
            factors.push(format!("{name}^{k}"));
        }
    }
    for (s, k) in &m.even {
        let t = print_jet(s, model);
        if *k == 1 {
            factors.push(t);
        } else {
            factors.push(format!("{t}^{k}"));
        }
    }
    for s in &m.odd {
        factors.push(print_jet(s, model));
    }
    factors
}

/// Scalar as re-parsable text.
pub fn print_scalar(s: &GradedScalar, model: &Model) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in s.terms().enumerate() {
        let negative = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut factors = print_monomial(m, model);
        if !mag.is_one() || factors.is_empty() {
            factors.insert(0, print_rat(&mag));
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn print_basis(b: &BasisOneForm, model: &Model) -> String {
    match b {
        BasisOneForm::Dx(l) => format!("dx({})", model.coord_names()[*l as usize]),
        BasisOneForm::Theta(s) => {
            let name = &model.generator(s.gen).name;
            if s.index.is_empty() {
                format!("theta({name})")
            } else {
                let coords: Vec<&str> = s
                    .index
                    .entries()
                    .iter()
                    .map(|&l| model.coord_names()[l as usize].as_str())
                    .collect();
                format!("theta({},{})", name, coords.join(","))
            }
        }
    }
}

fn print_word(w: &WedgeWord, model: &Model) -> String {
    w.iter()
        .map(|b| print_basis(b, model))
        .collect::<Vec<_>>()
        .join(" ^ ")
}

/// Form as re-parsable text.
pub fn print_form(f: &GradedForm, model: &Model) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (w, c) in f.terms() {
        let coeff = print_scalar(c, model);
        let piece = if w.is_empty() {
            if c.num_terms() > 1 {
                format!("({coeff})")
            } else {
                coeff
            }
        } else if coeff == "1" {
            print_word(w, model)
        } else if c.num_terms() > 1 || coeff.starts_with('-') {
            format!("({}) * {}", coeff, print_word(w, model))
        } else {
            format!("{} * {}", coeff, print_word(w, model))
        };
        parts.push(piece);
    }
    parts.join(" + ")
}

pub fn print_value(v: &Value, model: &Model) -> String {
    match v {
        Value::Scalar(s) => print_scalar(s, model),
        Value::Form(f) => print_form(f, model),
    }
}

/// Multi-index in the model-file bracket syntax.
pub fn print_index(idx: &MultiIndex, model: &Model) -> String {
    let coords: Vec<&str> = idx
        .entries()
        .iter()
        .map(|&l| model.coord_names()[l as usize].as_str())
        .collect();
    format!("[{}]", coords.join(" "))
}

//! Seeded random generators for scalars, forms and derivations.
//!
//! Used by the randomized identity suites and the `selftest` command; all
//! randomness flows through a caller-supplied RNG so runs are reproducible.

use rand::Rng;

use crate::derivation::GradedDerivation;
use crate::form::{BasisOneForm, GradedForm};
use crate::index::MultiIndex;
use crate::model::{GenClass, Model};
use crate::parity::Parity;
use crate::scalar::{rat, GradedScalar, Monomial};
use crate::variational::Lagrangian;

#[derive(Clone, Debug)]
pub struct ScalarProfile {
    /// Highest jet order of the symbols drawn.
    pub max_order: usize,
    /// Highest polynomial degree per monomial.
    pub max_degree: usize,
    /// Highest base-coordinate power per monomial.
    pub max_base_power: u32,
    pub max_terms: usize,
}

impl Default for ScalarProfile {
    fn default() -> Self {
        ScalarProfile {
            max_order: 2,
            max_degree: 3,
            max_base_power: 1,
            max_terms: 3,
        }
    }
}

fn random_coefficient(rng: &mut impl Rng) -> crate::scalar::Rat {
    let num = rng.gen_range(-4i64..=4);
    let den = *[1i64, 2, 3].get(rng.gen_range(0..3)).unwrap();
    if num == 0 {
        rat(1, den)
    } else {
        rat(num, den)
    }
}

pub fn random_index(rng: &mut impl Rng, dim: u8, max_order: usize) -> MultiIndex {
    let order = rng.gen_range(0..=max_order);
    MultiIndex::new((0..order).map(|_| rng.gen_range(0..dim)).collect())
}

pub fn random_monomial(rng: &mut impl Rng, model: &Model, profile: &ScalarProfile) -> Monomial {
    let gens: Vec<_> = model.generators().map(|(id, g)| (id, g.parity)).collect();
    let mut mono = Monomial::one();
    if profile.max_base_power > 0 && rng.gen_bool(0.3) {
        let lambda = rng.gen_range(0..model.dim());
        mono.base.push((lambda, rng.gen_range(1..=profile.max_base_power)));
    }
    let degree = rng.gen_range(0..=profile.max_degree);
    let mut acc = GradedScalar::monomial(model.dim(), mono, rat(1, 1));
    for _ in 0..degree {
        let (id, parity) = gens[rng.gen_range(0..gens.len())].clone();
        let sym = crate::model::JetSymbol {
            gen: id,
            index: random_index(rng, model.dim(), profile.max_order),
            parity,
        };
        acc = &acc * &GradedScalar::sym(model.dim(), sym);
        if acc.is_zero() {
            // an odd square was drawn; keep what we had
            return Monomial::one();
        }
    }
    let mono = acc.terms().next().map(|(m, _)| m.clone()).unwrap_or_default();
    mono
}

pub fn random_scalar(rng: &mut impl Rng, model: &Model, profile: &ScalarProfile) -> GradedScalar {
    let mut out = GradedScalar::zero(model.dim());
    let terms = rng.gen_range(1..=profile.max_terms);
    for _ in 0..terms {
        let m = random_monomial(rng, model, profile);
        out = &out + &GradedScalar::monomial(model.dim(), m, random_coefficient(rng));
    }
    out
}

/// Random scalar that is homogeneous of the requested parity.
pub fn random_scalar_of_parity(
    rng: &mut impl Rng,
    model: &Model,
    profile: &ScalarProfile,
    parity: Parity,
) -> GradedScalar {
    let mut out = GradedScalar::zero(model.dim());
    for _ in 0..profile.max_terms * 4 {
        let m = random_monomial(rng, model, profile);
        if m.parity() == parity {
            out = &out + &GradedScalar::monomial(model.dim(), m, random_coefficient(rng));
        }
        if out.num_terms() >= profile.max_terms {
            break;
        }
    }
    out
}

/// Random wedge word with `contact` theta factors and `horizontal` dx factors.
pub fn random_word(
    rng: &mut impl Rng,
    model: &Model,
    profile: &ScalarProfile,
    contact: usize,
    horizontal: usize,
) -> Option<Vec<BasisOneForm>> {
    let gens: Vec<_> = model.generators().map(|(id, g)| (id, g.parity)).collect();
    if horizontal > model.dim() as usize {
        return None;
    }
    let mut word = Vec::new();
    let mut dxs: Vec<u8> = (0..model.dim()).collect();
    for _ in 0..horizontal {
        let i = rng.gen_range(0..dxs.len());
        word.push(BasisOneForm::Dx(dxs.remove(i)));
    }
    for _ in 0..contact {
        let (id, parity) = gens[rng.gen_range(0..gens.len())].clone();
        let sym = crate::model::JetSymbol {
            gen: id,
            index: random_index(rng, model.dim(), profile.max_order),
            parity,
        };
        word.push(BasisOneForm::Theta(sym));
    }
    Some(word)
}

/// Random form with every term of bidegree (contact, horizontal).
pub fn random_form(
    rng: &mut impl Rng,
    model: &Model,
    profile: &ScalarProfile,
    contact: usize,
    horizontal: usize,
) -> GradedForm {
    let mut out = GradedForm::zero(model.dim());
    let terms = rng.gen_range(1..=profile.max_terms);
    for _ in 0..terms {
        let Some(word) = random_word(rng, model, profile, contact, horizontal) else {
            continue;
        };
        let coeff = random_scalar(rng, model, profile);
        let mut term = GradedForm::from_scalar(coeff);
        for f in word {
            term = term.wedge(&GradedForm::basis(model.dim(), f));
        }
        out = &out + &term;
    }
    out
}

/// Random form mixing several bidegrees.
pub fn random_mixed_form(rng: &mut impl Rng, model: &Model, profile: &ScalarProfile) -> GradedForm {
    let mut out = GradedForm::zero(model.dim());
    for _ in 0..rng.gen_range(1..=3) {
        let contact = rng.gen_range(0..=2usize);
        let horizontal = rng.gen_range(0..=model.dim() as usize);
        out = &out + &random_form(rng, model, profile, contact, horizontal);
    }
    out
}

/// Random even Lagrangian density of bounded jet order.
pub fn random_lagrangian(
    rng: &mut impl Rng,
    model: &Model,
    profile: &ScalarProfile,
) -> Lagrangian {
    let density = random_scalar_of_parity(rng, model, profile, Parity::Even);
    Lagrangian::new(density, model).expect("even density by construction")
}

/// Random generalized vector field; horizontal coefficients are drawn from
/// base-only polynomials when `projectable` is set.
pub fn random_derivation(
    rng: &mut impl Rng,
    model: &Model,
    profile: &ScalarProfile,
    parity: Parity,
    projectable: bool,
) -> GradedDerivation {
    let dim = model.dim();
    let mut horizontal = Vec::new();
    for _ in 0..dim {
        if rng.gen_bool(0.5) {
            horizontal.push(GradedScalar::zero(dim));
            continue;
        }
        let coeff = if projectable {
            let mut c = GradedScalar::constant(dim, random_coefficient(rng));
            if rng.gen_bool(0.5) {
                c = &c * &GradedScalar::coord(dim, rng.gen_range(0..dim));
            }
            if parity == Parity::Odd {
                GradedScalar::zero(dim)
            } else {
                c
            }
        } else {
            random_scalar_of_parity(rng, model, profile, parity)
        };
        horizontal.push(coeff);
    }
    let mut vertical = std::collections::BTreeMap::new();
    for (id, g) in model.generators() {
        if g.class != GenClass::Field {
            continue;
        }
        if rng.gen_bool(0.4) {
            continue;
        }
        let coeff = random_scalar_of_parity(rng, model, profile, parity + g.parity);
        if !coeff.is_zero() {
            vertical.insert(id, coeff);
        }
    }
    GradedDerivation {
        parity,
        horizontal,
        vertical,
    }
}

/// A compact two-field test model: one even and one odd field.
pub fn test_model(dim: u8) -> Model {
    let coords: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = coords.iter().map(|s| s.as_str()).collect();
    let mut m = Model::new(&refs);
    m.declare_field("u", Parity::Even).unwrap();
    m.declare_field("v", Parity::Even).unwrap();
    m.declare_field("p", Parity::Odd).unwrap();
    m.declare_field("q", Parity::Odd).unwrap();
    m
}

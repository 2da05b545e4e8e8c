//! Executable homotopy operators on a contractible chart.
//!
//! Each operator produces an explicit antiderivative: given a d_H-closed
//! horizontal form (or a variationally trivial density) it returns a form xi
//! with d_H xi equal to the input, exactly. The jet-dependent part is
//! handled by per-monomial degree weights realizing the scaling integrals;
//! the jet-free part by the radial homotopy for polynomial forms.

use std::collections::BTreeMap;

use crate::error::AlgebraError;
use crate::form::{
    interior_product, BasisOneForm, FrameContraction, GradedForm, WedgeWord,
};
use crate::index::{enumerate_indices, factorial, MultiIndex};
use crate::model::{GenClass, GenId, JetSymbol, Model};
use crate::scalar::{rat_int, rat_u128, GradedScalar, Rat};
use crate::variational::{density_coefficient, euler_lagrange_scalar, rho};

/// Splits a form into its jet-free part and the rest. The jet-free part is
/// an exterior form on the base (coefficients polynomial in x only).
pub fn fiber_decompose(phi: &GradedForm) -> (GradedForm, GradedForm) {
    let dim = phi.dim();
    let mut base = GradedForm::zero(dim);
    let mut rest = GradedForm::zero(dim);
    for (w, c) in phi.terms() {
        let (free, jets) = c.split_jet_free();
        let has_theta = w.iter().any(|f| matches!(f, BasisOneForm::Theta(_)));
        if has_theta {
            // contact factors carry jet symbols themselves
            rest.insert(w.clone(), c.clone());
            continue;
        }
        base.insert(w.clone(), free);
        rest.insert(w.clone(), jets);
    }
    (base, rest)
}

/// Radial homotopy for polynomial forms in the base coordinates alone:
/// for closed input of positive degree, d(out) reproduces the input.
pub fn poincare_base(phi: &GradedForm) -> Result<GradedForm, AlgebraError> {
    let dim = phi.dim();
    let mut out = GradedForm::zero(dim);
    for (w, c) in phi.terms() {
        let m = w.len();
        if w.iter().any(|f| matches!(f, BasisOneForm::Theta(_))) {
            return Err(AlgebraError::Invalid(
                "radial homotopy expects a purely horizontal form".into(),
            ));
        }
        for (mono, r) in c.terms() {
            if !mono.even.is_empty() || !mono.odd.is_empty() {
                return Err(AlgebraError::Invalid(
                    "radial homotopy expects jet-free coefficients".into(),
                ));
            }
            let a: usize = mono.base.iter().map(|&(_, k)| k as usize).sum();
            if a + m == 0 {
                return Err(AlgebraError::BaseNotExact);
            }
            for (j, f) in w.iter().enumerate() {
                let BasisOneForm::Dx(lambda) = f else {
                    unreachable!()
                };
                let mut nm = mono.clone();
                match nm.base.iter_mut().find(|(l, _)| l == lambda) {
                    Some((_, k)) => *k += 1,
                    None => {
                        nm.base.push((*lambda, 1));
                        nm.base.sort_unstable_by_key(|&(l, _)| l);
                    }
                }
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let coeff = r * crate::scalar::rat(sign, (a + m) as i64);
                let mut word = w.clone();
                word.remove(j);
                let mut term = GradedForm::zero(dim);
                term.insert(word, GradedScalar::monomial(dim, nm, coeff));
                out = &out + &term;
            }
        }
    }
    Ok(out)
}

/// D^{+nu}: lowers the jet order by one while keeping the jet degree, with
/// the scaling integral realized as a 1/degree weight per monomial. On forms
/// it acts coefficient-wise. Satisfies [D^{+nu}, d_mu] = delta^nu_mu on
/// scalars with no jet-free part.
pub fn d_plus_scalar(f: &GradedScalar, nu: u8) -> GradedScalar {
    let dim = f.dim();
    let mut out = GradedScalar::zero(dim);
    for (mono, r) in f.terms() {
        let degree = mono.jet_degree();
        if degree == 0 {
            continue;
        }
        let piece = GradedScalar::monomial(dim, mono.clone(), r.clone());
        let mut acc = GradedScalar::zero(dim);
        for sym in mono.symbols() {
            let mult = sym.index.count(nu);
            if mult == 0 {
                continue;
            }
            let lowered = JetSymbol {
                gen: sym.gen,
                index: sym.index.remove_one(nu).unwrap(),
                parity: sym.parity,
            };
            let term = &GradedScalar::sym(dim, lowered) * &piece.partial(sym);
            acc = &acc + &term.scale(&rat_int(mult as i64));
        }
        out = &out + &acc.scale(&crate::scalar::rat(1, degree as i64));
    }
    out
}

pub fn d_plus_form(phi: &GradedForm, nu: u8) -> GradedForm {
    let mut out = GradedForm::zero(phi.dim());
    for (w, c) in phi.terms() {
        out.insert(w.clone(), d_plus_scalar(c, nu));
    }
    out
}

/// P_k = d_{nu_1} ... d_{nu_k} D^{+nu_1} ... D^{+nu_k}, summed over all index
/// tuples; computed per multiset with multiplicity k!/M!.
fn p_k(phi: &GradedForm, k: usize) -> GradedForm {
    let dim = phi.dim();
    if k == 0 {
        return phi.clone();
    }
    let mut acc = GradedForm::zero(dim);
    for idx in enumerate_indices(dim, k) {
        if idx.order() != k {
            continue;
        }
        let mut val = phi.clone();
        for mu in idx.entries() {
            val = d_plus_form(&val, *mu);
            if val.is_zero() {
                break;
            }
        }
        if val.is_zero() {
            continue;
        }
        val = val.total_derivative_multi(&idx);
        let mult = rat_u128(factorial(k) / idx.factorial());
        acc = &acc + &val.scale(&mult);
    }
    acc
}

fn ensure_bidegree(
    phi: &GradedForm,
    contact: usize,
    horizontal_max: usize,
    exact_horizontal: Option<usize>,
) -> Result<(usize, usize), AlgebraError> {
    let (k, m) = phi.bidegree().ok_or_else(|| AlgebraError::Bidegree {
        expected: "homogeneous bidegree".into(),
        found: format!("{:?}", phi.bidegrees()),
    })?;
    let ok = k == contact
        && m <= horizontal_max
        && exact_horizontal.map(|e| m == e).unwrap_or(true);
    if !ok && !phi.is_zero() {
        return Err(AlgebraError::Bidegree {
            expected: format!("({contact}, m)"),
            found: format!("({k}, {m})"),
        });
    }
    Ok((k, m))
}

/// Antiderivative of a d_H-closed (0, m < n) form.
pub fn homotopy_horizontal(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let dim = model.dim();
    if phi.is_zero() {
        return Ok(GradedForm::zero(dim));
    }
    let (_, m) = ensure_bidegree(phi, 0, dim as usize - 1, None)?;
    if !phi.d_horizontal().is_zero() {
        return Err(AlgebraError::NotClosed);
    }
    let (base, tilde) = fiber_decompose(phi);
    let mut xi = GradedForm::zero(dim);
    if !base.is_zero() {
        if m == 0 {
            return Err(AlgebraError::BaseNotExact);
        }
        xi = poincare_base(&base)?;
    }
    if tilde.is_zero() {
        return Ok(xi);
    }
    let q = dim as usize - m;
    let top = tilde
        .terms()
        .flat_map(|(_, c)| c.terms().map(|(mono, _)| mono.total_order()))
        .max()
        .unwrap_or(0);
    for k in 0..=top {
        // (-1)^k (n - m - 1)! / (n - m + k)!
        let coeff = rat_u128(factorial(q - 1)) / rat_u128(factorial(q + k));
        let coeff = if k % 2 == 0 { coeff } else { -coeff };
        let mut layer = GradedForm::zero(dim);
        for nu in 0..dim {
            let hooked = interior_product(&FrameContraction(nu), &tilde);
            if hooked.is_zero() {
                continue;
            }
            let pk = p_k(&hooked, k);
            if pk.is_zero() {
                continue;
            }
            layer = &layer + &d_plus_form(&pk, nu);
        }
        xi = &xi + &layer.scale(&coeff);
    }
    Ok(xi)
}

/// Telescoping multiplicity shared by the density and projector-kernel
/// operators; reduces to 1 in one base dimension.
fn telescope_weight(sigma: &MultiIndex, xi: &MultiIndex, mu: u8) -> Rat {
    let full = sigma.merge(xi).push(mu);
    let num = rat_u128(full.factorial() * factorial(sigma.order()) * factorial(xi.order()));
    let den = rat_u128(
        factorial(sigma.order() + xi.order() + 1) * sigma.factorial() * xi.factorial(),
    );
    num / den
}

fn check_trivial(density: &GradedScalar, model: &Model) -> Result<(), AlgebraError> {
    let el = euler_lagrange_scalar(density, model);
    if let Some((gen, _)) = el.iter().next() {
        return Err(AlgebraError::NotTrivial(
            model.generator(*gen).name.clone(),
        ));
    }
    Ok(())
}

/// Antiderivative of a variationally trivial (0, n) density.
pub fn homotopy_density(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let dim = model.dim();
    if phi.is_zero() {
        return Ok(GradedForm::zero(dim));
    }
    ensure_bidegree(phi, 0, dim as usize, Some(dim as usize))?;
    let density = density_coefficient(phi);
    check_trivial(&density, model)?;
    let (base, tilde) = fiber_decompose(phi);
    let mut xi = GradedForm::zero(dim);
    if !base.is_zero() {
        xi = poincare_base(&base)?;
    }
    let lag = density_coefficient(&tilde);
    let mut currents: BTreeMap<u8, GradedScalar> = BTreeMap::new();
    for sym in lag.jet_symbols() {
        let deriv = lag.partial(&sym);
        if deriv.is_zero() {
            continue;
        }
        for mu in sym.index.distinct() {
            let rest = sym.index.remove_one(mu).unwrap();
            for (sigma, sub_xi, _) in rest.splittings() {
                let weight = telescope_weight(&sigma, &sub_xi, mu);
                let sign = if sigma.order() % 2 == 0 { 1 } else { -1 };
                let s_factor =
                    GradedScalar::sym(dim, model.sym(sym.gen, sub_xi.clone()));
                let term = &s_factor * &deriv.total_derivative_multi(&sigma);
                let entry = currents
                    .entry(mu)
                    .or_insert_with(|| GradedScalar::zero(dim));
                *entry = &*entry + &term.scale(&(weight * rat_int(sign)));
            }
        }
    }
    for (mu, current) in currents {
        let weighted = current.scale_by_degree(|k| (k > 0).then(|| crate::scalar::rat(1, k as i64)))?;
        xi = &xi + &GradedForm::volume_contracted(dim, mu).mul_scalar_left(&weighted);
    }
    Ok(xi)
}

/// Alternative density antiderivative through higher Euler operators; agrees
/// with `homotopy_density` after applying d_H.
pub fn homotopy_olver(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let dim = model.dim();
    if phi.is_zero() {
        return Ok(GradedForm::zero(dim));
    }
    ensure_bidegree(phi, 0, dim as usize, Some(dim as usize))?;
    let density = density_coefficient(phi);
    check_trivial(&density, model)?;
    let (base, tilde) = fiber_decompose(phi);
    let mut xi = GradedForm::zero(dim);
    if !base.is_zero() {
        xi = poincare_base(&base)?;
    }
    let lag = density_coefficient(&tilde);
    let mut currents: BTreeMap<u8, GradedScalar> = BTreeMap::new();
    // group the derivatives by generator and full index
    for sym in lag.jet_symbols() {
        let deriv = lag.partial(&sym);
        if deriv.is_zero() {
            continue;
        }
        let full = &sym.index;
        for mu in full.distinct() {
            let rest = full.remove_one(mu).unwrap();
            for (lambda, sub_xi, _) in rest.splittings() {
                // J = mu + lambda, Xi = sub_xi, J + Xi = full
                let j = lambda.push(mu);
                let binom = rat_u128(full.factorial())
                    / rat_u128(j.factorial() * sub_xi.factorial());
                let sign = if sub_xi.order() % 2 == 0 { 1 } else { -1 };
                let outer = crate::scalar::rat(
                    (lambda.count(mu) + 1) as i64,
                    (lambda.order() + 1) as i64,
                );
                let inner = &GradedScalar::sym(dim, model.sym0(sym.gen))
                    * &deriv.total_derivative_multi(&sub_xi);
                let term = inner
                    .scale(&(binom * rat_int(sign)))
                    .total_derivative_multi(&lambda)
                    .scale(&outer);
                let entry = currents
                    .entry(mu)
                    .or_insert_with(|| GradedScalar::zero(dim));
                *entry = &*entry + &term;
            }
        }
    }
    for (mu, current) in currents {
        let weighted = current.scale_by_degree(|k| (k > 0).then(|| crate::scalar::rat(1, k as i64)))?;
        xi = &xi + &GradedForm::volume_contracted(dim, mu).mul_scalar_left(&weighted);
    }
    Ok(xi)
}

/// Antiderivative of a d_H-closed (1, m < n) contact form via the barred
/// variable reduction: replace each theta by an auxiliary even-jet copy of
/// the same parity, solve the horizontal problem, and read the result back.
pub fn homotopy_contact(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let dim = model.dim();
    if phi.is_zero() {
        return Ok(GradedForm::zero(dim));
    }
    ensure_bidegree(phi, 1, dim as usize - 1, None)?;
    if !phi.d_horizontal().is_zero() {
        return Err(AlgebraError::NotClosed);
    }
    let (barred_model, bar_of, gen_of_bar) = barred_extension(model)?;
    let barred = bar_form(phi, &bar_of, dim)?;
    let xi_bar = homotopy_horizontal(&barred, &barred_model)?;
    unbar_form(&xi_bar, &gen_of_bar, dim)
}

fn barred_extension(
    model: &Model,
) -> Result<(Model, BTreeMap<GenId, GenId>, BTreeMap<GenId, GenId>), AlgebraError> {
    let mut extended = model.clone();
    let mut bar_of = BTreeMap::new();
    let mut gen_of_bar = BTreeMap::new();
    for (id, g) in model.generators() {
        let bar = extended.declare(
            &format!("{}@bar", g.name),
            g.parity,
            GenClass::Field,
        )?;
        bar_of.insert(id, bar);
        gen_of_bar.insert(bar, id);
    }
    Ok((extended, bar_of, gen_of_bar))
}

fn bar_form(
    phi: &GradedForm,
    bar_of: &BTreeMap<GenId, GenId>,
    dim: u8,
) -> Result<GradedForm, AlgebraError> {
    let mut out = GradedForm::zero(dim);
    for (w, c) in phi.terms() {
        let Some(BasisOneForm::Theta(s)) = w.last() else {
            return Err(AlgebraError::Invalid(
                "expected a single trailing contact factor".into(),
            ));
        };
        let word: WedgeWord = w[..w.len() - 1].to_vec();
        let bar_sym = JetSymbol {
            gen: bar_of[&s.gen],
            index: s.index.clone(),
            parity: s.parity,
        };
        let coeff = c * &GradedScalar::sym(dim, bar_sym);
        out.insert(word, coeff);
    }
    Ok(out)
}

fn unbar_form(
    phi: &GradedForm,
    gen_of_bar: &BTreeMap<GenId, GenId>,
    dim: u8,
) -> Result<GradedForm, AlgebraError> {
    let mut out = GradedForm::zero(dim);
    for (w, c) in phi.terms() {
        for (mono, r) in c.terms() {
            let mut stripped = mono.clone();
            let mut found: Option<(JetSymbol, i8)> = None;
            // even candidates
            if let Some(pos) = stripped
                .even
                .iter()
                .position(|(s, _)| gen_of_bar.contains_key(&s.gen))
            {
                let (s, k) = stripped.even[pos].clone();
                if k != 1 || found.is_some() {
                    return Err(AlgebraError::Invalid(
                        "reduction output not linear in barred variables".into(),
                    ));
                }
                stripped.even.remove(pos);
                found = Some((s, 1));
            }
            if let Some(pos) = stripped
                .odd
                .iter()
                .position(|s| gen_of_bar.contains_key(&s.gen))
            {
                if found.is_some() {
                    return Err(AlgebraError::Invalid(
                        "reduction output not linear in barred variables".into(),
                    ));
                }
                let s = stripped.odd.remove(pos);
                // move the letter past those to its right
                let crossings = mono.odd.len() - 1 - pos;
                let sign = if crossings % 2 == 0 { 1 } else { -1 };
                found = Some((s, sign));
            }
            let Some((bar_sym, sign)) = found else {
                return Err(AlgebraError::Invalid(
                    "reduction output lost its barred variable".into(),
                ));
            };
            let theta = BasisOneForm::Theta(JetSymbol {
                gen: gen_of_bar[&bar_sym.gen],
                index: bar_sym.index.clone(),
                parity: bar_sym.parity,
            });
            let mut word = w.clone();
            word.push(theta);
            let mut term = GradedForm::zero(dim);
            term.insert(
                word,
                GradedScalar::monomial(dim, stripped, r * rat_int(sign as i64)),
            );
            out = &out + &term;
        }
    }
    Ok(out)
}

/// Antiderivative of a (1, n) form in the kernel of the projector.
pub fn homotopy_rho_kernel(
    sigma: &GradedForm,
    model: &Model,
) -> Result<GradedForm, AlgebraError> {
    let dim = model.dim();
    if sigma.is_zero() {
        return Ok(GradedForm::zero(dim));
    }
    ensure_bidegree(sigma, 1, dim as usize, Some(dim as usize))?;
    if !rho(sigma, model)?.is_zero() {
        return Err(AlgebraError::NotRhoKernel);
    }
    // extract sigma^Lambda_A with sigma = sum theta^A_Lambda ^ (sigma^Lambda_A omega)
    let omega_word: WedgeWord = (0..dim).map(BasisOneForm::Dx).collect();
    let mut coeffs: BTreeMap<JetSymbol, GradedScalar> = BTreeMap::new();
    for (w, c) in sigma.terms() {
        let mut expected = omega_word.clone();
        let Some(BasisOneForm::Theta(s)) = w.last() else {
            return Err(AlgebraError::Invalid("missing contact factor".into()));
        };
        expected.push(BasisOneForm::Theta(s.clone()));
        if *w != expected {
            return Err(AlgebraError::Invalid(
                "projector-kernel input must be contact-linear at top degree".into(),
            ));
        }
        for (mono, r) in c.terms() {
            let mut sign = if dim % 2 == 0 { 1i8 } else { -1 };
            if s.parity.is_odd() && mono.parity().is_odd() {
                sign = -sign;
            }
            let entry = coeffs
                .entry(s.clone())
                .or_insert_with(|| GradedScalar::zero(dim));
            *entry = &*entry
                + &GradedScalar::monomial(dim, mono.clone(), r * rat_int(sign as i64));
        }
    }
    let mut xi = GradedForm::zero(dim);
    for (sym, coeff) in &coeffs {
        for mu in sym.index.distinct() {
            let rest = sym.index.remove_one(mu).unwrap();
            for (sig, sub_xi, _) in rest.splittings() {
                let weight = telescope_weight(&sig, &sub_xi, mu);
                let sign = if sig.order() % 2 == 0 { -1 } else { 1 };
                let theta = GradedForm::theta(dim, model.sym(sym.gen, sub_xi.clone()));
                let inner = GradedForm::volume_contracted(dim, mu)
                    .mul_scalar_left(&coeff.total_derivative_multi(&sig));
                xi = &xi
                    + &theta
                        .wedge(&inner)
                        .scale(&(weight * rat_int(sign)));
            }
        }
    }
    Ok(xi)
}

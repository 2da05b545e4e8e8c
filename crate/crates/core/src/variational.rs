//! Lagrangians and the bicomplex operators: Euler-Lagrange, the projector,
//! the variational operator, Lepage equivalents, the first variational
//! formula and variational-symmetry checks.

use std::collections::BTreeMap;

use crate::derivation::{lie_derivative, prolong, GradedDerivation};
use crate::error::AlgebraError;
use crate::form::{
    interior_product, BasisOneForm, ElementaryContraction, GradedForm,
};
use crate::index::MultiIndex;
use crate::model::{GenId, Model};
use crate::parity::Parity;
use crate::scalar::{rat, rat_int, GradedScalar};

/// A graded Lagrangian L = (density) * omega. The density must be even.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    pub density: GradedScalar,
}

impl Lagrangian {
    pub fn new(density: GradedScalar, model: &Model) -> Result<Lagrangian, AlgebraError> {
        assert_eq!(density.dim(), model.dim());
        match density.parity() {
            Some(Parity::Even) => Ok(Lagrangian { density }),
            _ => Err(AlgebraError::OddLagrangian),
        }
    }

    /// The (0, n) form L = density * omega.
    pub fn form(&self) -> GradedForm {
        GradedForm::volume(self.density.dim()).mul_scalar_left(&self.density)
    }

    pub fn dim(&self) -> u8 {
        self.density.dim()
    }
}

/// Components E_A and the form delta L = theta^A ^ E_A omega.
#[derive(Clone, Debug)]
pub struct EulerLagrangeResult {
    pub components: BTreeMap<GenId, GradedScalar>,
    pub form: GradedForm,
}

/// E_A = sum_Lambda (-1)^{|Lambda|} d_Lambda(partial^Lambda_A f), over every
/// generator of the model.
pub fn euler_lagrange_scalar(f: &GradedScalar, model: &Model) -> BTreeMap<GenId, GradedScalar> {
    let mut out = BTreeMap::new();
    let mut grouped: BTreeMap<GenId, Vec<MultiIndex>> = BTreeMap::new();
    for s in f.jet_symbols() {
        grouped.entry(s.gen).or_default().push(s.index);
    }
    for (gen, indices) in grouped {
        let mut acc = GradedScalar::zero(f.dim());
        for idx in indices {
            let inner = f.partial(&model.sym(gen, idx.clone()));
            if inner.is_zero() {
                continue;
            }
            let sign = if idx.order() % 2 == 0 { 1 } else { -1 };
            acc = &acc + &inner.total_derivative_multi(&idx).scale(&rat_int(sign));
        }
        if !acc.is_zero() {
            out.insert(gen, acc);
        }
    }
    out
}

/// The graded Euler-Lagrange operator of a Lagrangian.
pub fn euler_lagrange(l: &Lagrangian, model: &Model) -> EulerLagrangeResult {
    let dim = l.dim();
    let components = euler_lagrange_scalar(&l.density, model);
    let omega = GradedForm::volume(dim);
    let mut form = GradedForm::zero(dim);
    for (gen, e) in &components {
        let theta = GradedForm::theta(dim, model.sym0(*gen));
        form = &form + &theta.wedge(&omega.mul_scalar_left(e));
    }
    EulerLagrangeResult { components, form }
}

/// delta applied to a (0, n) density form: theta^A ^ E_A(coefficient) omega.
pub fn delta_of_density(phi: &GradedForm, model: &Model) -> GradedForm {
    let dim = phi.dim();
    let coeff = density_coefficient(phi);
    let el = euler_lagrange_scalar(&coeff, model);
    let omega = GradedForm::volume(dim);
    let mut out = GradedForm::zero(dim);
    for (gen, e) in &el {
        out = &out + &GradedForm::theta(dim, model.sym0(*gen)).wedge(&omega.mul_scalar_left(e));
    }
    out
}

/// Extracts f from a (0, n) form f * omega.
pub fn density_coefficient(phi: &GradedForm) -> GradedScalar {
    let dim = phi.dim();
    let word: Vec<BasisOneForm> = (0..dim).map(BasisOneForm::Dx).collect();
    phi.coefficient_of_word(&word)
}

/// The auxiliary projector rho-bar on (k > 0, n) forms.
pub fn rho_bar(phi: &GradedForm, model: &Model) -> GradedForm {
    let dim = phi.dim();
    let mut out = GradedForm::zero(dim);
    let mut symbols = std::collections::BTreeSet::new();
    for (w, _) in phi.terms() {
        for f in w {
            if let BasisOneForm::Theta(s) = f {
                symbols.insert(s.clone());
            }
        }
    }
    for s in symbols {
        let hooked = interior_product(&ElementaryContraction(s.clone()), phi);
        if hooked.is_zero() {
            continue;
        }
        let sign = if s.index.order() % 2 == 0 { 1 } else { -1 };
        let pulled = hooked.total_derivative_multi(&s.index).scale(&rat_int(sign));
        let theta = GradedForm::theta(dim, model.sym0(s.gen));
        out = &out + &theta.wedge(&pulled);
    }
    out
}

/// The projector rho = sum_{k>0} (1/k) rho-bar restricted to contact degree k
/// at top horizontal degree.
pub fn rho(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let dim = phi.dim();
    for (k, m) in phi.bidegrees() {
        if m != dim as usize || k == 0 {
            return Err(AlgebraError::Bidegree {
                expected: format!("(k > 0, {dim})"),
                found: format!("({k}, {m})"),
            });
        }
    }
    let max_contact = phi.bidegrees().iter().map(|(k, _)| *k).max().unwrap_or(0);
    let mut out = GradedForm::zero(dim);
    for k in 1..=max_contact {
        let layer = phi.project_bidegree(k, dim as usize);
        if layer.is_zero() {
            continue;
        }
        out = &out + &rho_bar(&layer, model).scale(&rat(1, k as i64));
    }
    Ok(out)
}

/// The variational operator delta = rho after d on forms of horizontal
/// degree n.
pub fn delta(phi: &GradedForm, model: &Model) -> Result<GradedForm, AlgebraError> {
    let d = phi.d_total();
    // d of a (*, n) form is purely vertical
    rho(&d, model)
}

/// Lepage equivalent Xi_L of a Lagrangian: L plus contact corrections built
/// from a divided-weight momentum recursion. Satisfies dL = delta L - d_H Xi_L.
pub fn lepage_equivalent(l: &Lagrangian, model: &Model) -> GradedForm {
    let dim = l.dim();
    let order = l.density.max_jet_order();
    // momenta[(gen, lambda, Lambda)] paired with theta^gen_Lambda and
    // omega_lambda
    let mut momenta: BTreeMap<(GenId, u8, MultiIndex), GradedScalar> = BTreeMap::new();
    if order > 0 {
        for depth in (0..order).rev() {
            for (gen, _) in model.generators() {
                for idx in crate::index::enumerate_indices(dim, depth).into_iter() {
                    if idx.order() != depth {
                        continue;
                    }
                    for lambda in 0..dim {
                        let full = idx.push(lambda);
                        let mut val = l.density.partial(&model.sym(gen, full.clone()));
                        for mu in 0..dim {
                            if let Some(higher) =
                                momenta.get(&(gen, mu, full.clone())).cloned()
                            {
                                val = &val - &higher.total_derivative(mu);
                            }
                        }
                        if val.is_zero() {
                            continue;
                        }
                        let weight = rat(
                            (idx.count(lambda) + 1) as i64,
                            (idx.order() + 1) as i64,
                        );
                        momenta.insert((gen, lambda, idx.clone()), val.scale(&weight));
                    }
                }
            }
        }
    }
    let mut xi = l.form();
    for ((gen, lambda, idx), val) in &momenta {
        let theta = GradedForm::theta(dim, model.sym(*gen, idx.clone()));
        let omega_l = GradedForm::volume_contracted(dim, *lambda);
        xi = &xi + &theta.wedge(&omega_l.mul_scalar_left(val));
    }
    xi
}

/// Residual of the first variational formula; identically zero.
pub fn first_variational_residual(
    l: &Lagrangian,
    v: &GradedDerivation,
    model: &Model,
) -> GradedForm {
    let dim = l.dim();
    let p = prolong(v, model);
    let lform = l.form();
    let lie = lie_derivative(&p, &lform);

    let el = euler_lagrange(l, model);
    let vert = prolong(&p.vertical_part(), model);
    let hook_delta = interior_product(&vert, &el.form);

    let xi = lepage_equivalent(l, model);
    let boundary = interior_product(&p, &xi).project_contact(0).d_horizontal();

    // d_V(upsilon_H rfloor omega) * density
    let mut horizontal_piece = GradedForm::zero(dim);
    for lambda in 0..dim {
        let h = &v.horizontal[lambda as usize];
        if h.is_zero() {
            continue;
        }
        let omega_l = GradedForm::volume_contracted(dim, lambda);
        horizontal_piece = &horizontal_piece + &omega_l.mul_scalar_left(h);
    }
    let dv_piece = horizontal_piece.d_vertical().mul_scalar_right(&l.density);

    &(&(&lie - &hook_delta) - &boundary) - &dv_piece
}

/// Outcome of a variational-symmetry test.
#[derive(Clone, Debug)]
pub enum SymmetryVerdict {
    /// The Lie derivative is d_H-exact: sigma certifies it and `current` is
    /// the conserved current h_0(v rfloor Xi_L) - sigma.
    Symmetry {
        sigma: GradedForm,
        current: GradedForm,
    },
    /// Not a symmetry; the witness is the nonzero delta(L_v L).
    NotSymmetry { witness: GradedForm },
    /// Rejected before testing: the derivation is not projectable.
    NotProjectable,
}

/// Variational-symmetry test with conserved-current extraction.
pub fn is_variational_symmetry(
    l: &Lagrangian,
    v: &GradedDerivation,
    model: &Model,
) -> Result<SymmetryVerdict, AlgebraError> {
    if !v.is_projectable() {
        return Ok(SymmetryVerdict::NotProjectable);
    }
    let p = prolong(v, model);
    let lie = lie_derivative(&p, &l.form());
    // projectable input keeps the Lie derivative horizontal
    let lie = lie.project_contact(0);
    let witness = delta_of_density(&lie, model);
    if !witness.is_zero() {
        return Ok(SymmetryVerdict::NotSymmetry { witness });
    }
    let sigma = crate::homotopy::homotopy_density(&lie, model)?;
    let current = &interior_product(&p, &lepage_equivalent(l, model)).project_contact(0) - &sigma;
    Ok(SymmetryVerdict::Symmetry { sigma, current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use crate::random::{
        random_derivation, random_lagrangian, test_model, ScalarProfile,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u_model() -> (Model, GenId) {
        let mut m = Model::new(&["x"]);
        let u = m.declare_field("u", Parity::Even).unwrap();
        (m, u)
    }

    fn free_field_lagrangian(m: &Model, u: GenId) -> Lagrangian {
        let ux = GradedScalar::sym(1, m.sym(u, MultiIndex::single(0)));
        Lagrangian::new((&ux * &ux).scale(&rat(1, 2)), m).unwrap()
    }

    #[test]
    fn euler_lagrange_classic() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let el = euler_lagrange(&l, &m);
        let uxx = GradedScalar::sym(1, m.sym(u, MultiIndex::new(vec![0, 0])));
        assert_eq!(el.components.get(&u).unwrap(), &(-&uxx));
    }

    #[test]
    fn euler_lagrange_linear_density() {
        let (m, u) = u_model();
        let l = Lagrangian::new(GradedScalar::sym(1, m.sym0(u)), &m).unwrap();
        let el = euler_lagrange(&l, &m);
        assert_eq!(el.components.get(&u).unwrap(), &GradedScalar::one(1));
    }

    #[test]
    fn euler_lagrange_odd_field_left_convention() {
        // L = c c_x omega gives E_c = 2 c_x
        let mut m = Model::new(&["x"]);
        let c = m.declare_field("c", Parity::Odd).unwrap();
        let sc = GradedScalar::sym(1, m.sym0(c));
        let scx = GradedScalar::sym(1, m.sym(c, MultiIndex::single(0)));
        let l = Lagrangian::new(&sc * &scx, &m).unwrap();
        let el = euler_lagrange(&l, &m);
        assert_eq!(el.components.get(&c).unwrap(), &scx.scale(&rat_int(2)));
    }

    #[test]
    fn total_divergence_is_variationally_trivial() {
        let (m, u) = u_model();
        let su = GradedScalar::sym(1, m.sym0(u));
        let ux = GradedScalar::sym(1, m.sym(u, MultiIndex::single(0)));
        let l = Lagrangian::new((&su * &ux).total_derivative(0), &m).unwrap();
        assert!(euler_lagrange(&l, &m).components.is_empty());
    }

    #[test]
    fn odd_density_rejected() {
        let mut m = Model::new(&["x"]);
        let c = m.declare_field("c", Parity::Odd).unwrap();
        let sc = GradedScalar::sym(1, m.sym0(c));
        assert!(Lagrangian::new(sc, &m).is_err());
    }

    #[test]
    fn rho_fixes_first_order_contact_density() {
        let (m, u) = u_model();
        // f theta^u ^ omega is a fixed point
        let f = GradedScalar::sym(1, m.sym(u, MultiIndex::single(0)));
        let phi = GradedForm::theta(1, m.sym0(u))
            .wedge(&GradedForm::volume(1))
            .mul_scalar_left(&f);
        assert_eq!(rho(&phi, &m).unwrap(), phi);

        // f theta^u_x ^ omega maps to -(d_x f) theta^u ^ omega
        let phi = GradedForm::theta(1, m.sym(u, MultiIndex::single(0)))
            .wedge(&GradedForm::volume(1))
            .mul_scalar_left(&f);
        let expect = GradedForm::theta(1, m.sym0(u))
            .wedge(&GradedForm::volume(1))
            .mul_scalar_left(&(-&f.total_derivative(0)));
        assert_eq!(rho(&phi, &m).unwrap(), expect);
    }

    #[test]
    fn rho_is_a_projector_killing_d_h() {
        let model = test_model(2);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let profile = ScalarProfile {
            max_order: 2,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        for _ in 0..6 {
            let phi = crate::random::random_form(&mut rng, &model, &profile, 1, 2);
            let r = rho(&phi, &model).unwrap();
            assert_eq!(rho(&r, &model).unwrap(), r);
            let psi = crate::random::random_form(&mut rng, &model, &profile, 1, 1);
            let closed = psi.d_horizontal();
            if closed.is_zero() {
                continue;
            }
            assert!(rho(&closed, &model).unwrap().is_zero());
        }
    }

    #[test]
    fn rho_rejects_wrong_bidegree() {
        let model = test_model(2);
        let phi = GradedForm::dx(2, 0);
        assert!(rho(&phi, &model).is_err());
    }

    #[test]
    fn lepage_of_first_order_lagrangian_is_poincare_cartan() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let xi = lepage_equivalent(&l, &m);
        let ux = GradedScalar::sym(1, m.sym(u, MultiIndex::single(0)));
        let expect = &l.form() + &GradedForm::theta(1, m.sym0(u)).mul_scalar_left(&ux);
        assert_eq!(xi, expect);
    }

    #[test]
    fn lepage_without_momenta() {
        let (m, u) = u_model();
        let l = Lagrangian::new(GradedScalar::sym(1, m.sym0(u)), &m).unwrap();
        assert_eq!(lepage_equivalent(&l, &m), l.form());
    }

    #[test]
    fn lepage_identity_on_random_lagrangians() {
        for dim in [1u8, 2] {
            let model = test_model(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(43 + dim as u64);
            let profile = ScalarProfile {
                max_order: 2,
                max_degree: 2,
                max_terms: 2,
                ..ScalarProfile::default()
            };
            for _ in 0..6 {
                let l = random_lagrangian(&mut rng, &model, &profile);
                let lhs = l.form().d_total();
                let el = euler_lagrange(&l, &model);
                let xi = lepage_equivalent(&l, &model);
                let rhs = &el.form - &xi.d_horizontal();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn first_variational_formula_residual_vanishes() {
        for dim in [1u8, 2] {
            let model = test_model(dim);
            let mut rng = ChaCha8Rng::seed_from_u64(47 + dim as u64);
            let profile = ScalarProfile {
                max_order: 1,
                max_degree: 2,
                max_terms: 2,
                ..ScalarProfile::default()
            };
            for parity in [Parity::Even, Parity::Odd] {
                for _ in 0..4 {
                    let l = random_lagrangian(&mut rng, &model, &profile);
                    let v = random_derivation(&mut rng, &model, &profile, parity, false);
                    let res = first_variational_residual(&l, &v, &model);
                    assert!(res.is_zero(), "residual nonzero: {res}");
                }
            }
        }
    }

    #[test]
    fn translation_symmetry_of_free_field() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let mut vert = BTreeMap::new();
        vert.insert(u, GradedScalar::one(1));
        let v = GradedDerivation::vertical(1, Parity::Even, vert);
        match is_variational_symmetry(&l, &v, &m).unwrap() {
            SymmetryVerdict::Symmetry { current, .. } => {
                let ux = GradedScalar::sym(1, m.sym(u, MultiIndex::single(0)));
                assert_eq!(current, GradedForm::from_scalar(ux));
            }
            other => panic!("expected symmetry, got {other:?}"),
        }
    }

    #[test]
    fn scaling_is_not_a_symmetry_of_free_field() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let mut vert = BTreeMap::new();
        vert.insert(u, GradedScalar::sym(1, m.sym0(u)));
        let v = GradedDerivation::vertical(1, Parity::Even, vert);
        match is_variational_symmetry(&l, &v, &m).unwrap() {
            SymmetryVerdict::NotSymmetry { witness } => {
                let uxx = GradedScalar::sym(1, m.sym(u, MultiIndex::new(vec![0, 0])));
                let expect = GradedForm::theta(1, m.sym0(u))
                    .wedge(&GradedForm::volume(1))
                    .mul_scalar_left(&uxx.scale(&rat_int(-2)));
                assert_eq!(witness, expect);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn zero_derivation_is_a_symmetry() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let v = GradedDerivation::zero(1);
        match is_variational_symmetry(&l, &v, &m).unwrap() {
            SymmetryVerdict::Symmetry { sigma, .. } => assert!(sigma.is_zero()),
            other => panic!("expected symmetry, got {other:?}"),
        }
    }

    #[test]
    fn non_projectable_rejected() {
        let (m, u) = u_model();
        let l = free_field_lagrangian(&m, u);
        let v = GradedDerivation {
            parity: Parity::Even,
            horizontal: vec![GradedScalar::sym(1, m.sym0(u))],
            vertical: BTreeMap::new(),
        };
        assert!(matches!(
            is_variational_symmetry(&l, &v, &m).unwrap(),
            SymmetryVerdict::NotProjectable
        ));
    }

    #[test]
    fn delta_annihilates_total_divergences() {
        let model = test_model(2);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let profile = ScalarProfile {
            max_order: 1,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        for _ in 0..6 {
            let xi = crate::random::random_form(&mut rng, &model, &profile, 0, 1);
            let dxi = xi.d_horizontal();
            assert!(delta_of_density(&dxi, &model).is_zero());
        }
    }

    #[test]
    fn delta_squares_to_zero_downstream() {
        let model = test_model(2);
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let profile = ScalarProfile {
            max_order: 1,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        for _ in 0..4 {
            let l = random_lagrangian(&mut rng, &model, &profile);
            let el = euler_lagrange(&l, &model);
            let second = delta(&el.form, &model).unwrap();
            assert!(second.is_zero());
        }
    }

    #[test]
    fn delta_matches_rho_after_d_on_lagrangians() {
        let model = test_model(2);
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let profile = ScalarProfile {
            max_order: 1,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        for _ in 0..4 {
            let l = random_lagrangian(&mut rng, &model, &profile);
            let via_formula = euler_lagrange(&l, &model).form;
            let via_projector = delta(&l.form(), &model).unwrap();
            assert_eq!(via_formula, via_projector);
        }
    }
}

//! The integration-by-parts involution on coefficient tuples.
//!
//! A coefficient tuple assigns a scalar f^Lambda to each multi-index up to
//! some finite order. The transform below realizes the identity
//!   sum (-1)^{|Lambda|} d_Lambda(f^Lambda g) = sum eta(f)^Lambda d_Lambda g
//! and is an involution. The combinatorial factor is the per-direction
//! binomial product C(Sigma_mu + Lambda_mu, Lambda_mu); in one base dimension
//! it reduces to the length-factorial quotient.

use std::collections::BTreeMap;

use crate::index::{enumerate_indices, MultiIndex};
use crate::scalar::{rat_u128, GradedScalar};

pub type CoeffTuple = BTreeMap<MultiIndex, GradedScalar>;

pub fn tuple_max_order(f: &CoeffTuple) -> usize {
    f.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, _)| k.order())
        .max()
        .unwrap_or(0)
}

/// eta(f)^Lambda = sum_{|Sigma| <= k - |Lambda|} (-1)^{|Sigma + Lambda|}
///                 prod_mu C(Sigma_mu + Lambda_mu, Lambda_mu) d_Sigma f^{Sigma + Lambda}
pub fn eta(f: &CoeffTuple, dim: u8) -> CoeffTuple {
    let k = tuple_max_order(f);
    let mut out = CoeffTuple::new();
    for lambda in enumerate_indices(dim, k) {
        let mut acc = GradedScalar::zero(dim);
        for sigma in enumerate_indices(dim, k - lambda.order().min(k)) {
            if sigma.order() + lambda.order() > k {
                continue;
            }
            let merged = sigma.merge(&lambda);
            let Some(coeff) = f.get(&merged) else {
                continue;
            };
            if coeff.is_zero() {
                continue;
            }
            let mut mult = 1u128;
            for mu in merged.distinct() {
                mult *= crate::index::binomial(merged.count(mu), lambda.count(mu));
            }
            let sign = if merged.order() % 2 == 0 { 1i64 } else { -1 };
            let term = coeff
                .total_derivative_multi(&sigma)
                .scale(&(rat_u128(mult) * crate::scalar::rat_int(sign)));
            acc = &acc + &term;
        }
        if !acc.is_zero() {
            out.insert(lambda, acc);
        }
    }
    out
}

/// sum_Lambda f^Lambda d_Lambda(g), the differential operator a tuple encodes.
pub fn apply_tuple(f: &CoeffTuple, g: &GradedScalar) -> GradedScalar {
    let mut acc = GradedScalar::zero(g.dim());
    for (idx, coeff) in f {
        if coeff.is_zero() {
            continue;
        }
        acc = &acc + &(coeff * &g.total_derivative_multi(idx));
    }
    acc
}

/// sum_Lambda (-1)^{|Lambda|} d_Lambda(f^Lambda g), the formal adjoint route.
pub fn apply_tuple_adjoint(f: &CoeffTuple, g: &GradedScalar) -> GradedScalar {
    let mut acc = GradedScalar::zero(g.dim());
    for (idx, coeff) in f {
        if coeff.is_zero() {
            continue;
        }
        let sign = if idx.order() % 2 == 0 { 1 } else { -1 };
        let term = (coeff * g)
            .total_derivative_multi(idx)
            .scale(&crate::scalar::rat_int(sign));
        acc = &acc + &term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::factorial;
    use crate::model::Model;
    use crate::parity::Parity;
    use crate::random::{random_scalar, ScalarProfile};
    use crate::scalar::rat_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_dim_model() -> Model {
        let mut m = Model::new(&["x"]);
        m.declare_field("u", Parity::Even).unwrap();
        m.declare_field("c", Parity::Odd).unwrap();
        m
    }

    #[test]
    fn one_dimensional_first_order() {
        // (f^0, f^x) = (a, b) maps to (a - d_x b, -b)
        let m = one_dim_model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let profile = ScalarProfile::default();
        let a = random_scalar(&mut rng, &m, &profile);
        let b = random_scalar(&mut rng, &m, &profile);
        let mut f = CoeffTuple::new();
        f.insert(MultiIndex::empty(), a.clone());
        f.insert(MultiIndex::single(0), b.clone());
        let e = eta(&f, 1);
        assert_eq!(
            e.get(&MultiIndex::empty()).unwrap(),
            &(&a - &b.total_derivative(0))
        );
        assert_eq!(e.get(&MultiIndex::single(0)).unwrap(), &(-&b));
    }

    #[test]
    fn eta_of_zero_is_zero() {
        let e = eta(&CoeffTuple::new(), 2);
        assert!(e.is_empty());
    }

    #[test]
    fn defining_identity_on_random_tuples() {
        let m = {
            let mut m = Model::new(&["x", "y"]);
            m.declare_field("u", Parity::Even).unwrap();
            m.declare_field("c", Parity::Odd).unwrap();
            m
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let profile = ScalarProfile {
            max_order: 1,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        for _ in 0..20 {
            let mut f = CoeffTuple::new();
            for idx in crate::index::enumerate_indices(2, 2) {
                f.insert(idx, random_scalar(&mut rng, &m, &profile));
            }
            let g = random_scalar(&mut rng, &m, &profile);
            let lhs = apply_tuple_adjoint(&f, &g);
            let rhs = apply_tuple(&eta(&f, 2), &g);
            assert_eq!(lhs, rhs);
        }
    }

    /// The length-factorial reading of the combinatorial factor, kept here
    /// only to document that it fails the involution when the base dimension
    /// exceeds one.
    fn eta_length_factorial(f: &CoeffTuple, dim: u8) -> CoeffTuple {
        let k = tuple_max_order(f);
        let mut out = CoeffTuple::new();
        for lambda in enumerate_indices(dim, k) {
            let mut acc = GradedScalar::zero(dim);
            for sigma in enumerate_indices(dim, k) {
                if sigma.order() + lambda.order() > k {
                    continue;
                }
                let merged = sigma.merge(&lambda);
                let Some(coeff) = f.get(&merged) else {
                    continue;
                };
                let mult = factorial(merged.order())
                    / (factorial(sigma.order()) * factorial(lambda.order()));
                let sign = if merged.order() % 2 == 0 { 1i64 } else { -1 };
                let term = coeff
                    .total_derivative_multi(&sigma)
                    .scale(&(rat_u128(mult) * rat_int(sign)));
                acc = &acc + &term;
            }
            if !acc.is_zero() {
                out.insert(lambda, acc);
            }
        }
        out
    }

    #[test]
    fn involution_adjudicates_the_factorial_convention() {
        let mut m = Model::new(&["x", "y"]);
        m.declare_field("u", Parity::Even).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let profile = ScalarProfile {
            max_order: 1,
            max_degree: 2,
            max_terms: 2,
            ..ScalarProfile::default()
        };
        let mut length_factorial_failed = false;
        for _ in 0..10 {
            let mut f = CoeffTuple::new();
            for idx in crate::index::enumerate_indices(2, 2) {
                f.insert(idx, random_scalar(&mut rng, &m, &profile));
            }
            let keep = |t: &CoeffTuple| -> CoeffTuple {
                t.iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect()
            };
            let back = eta(&eta(&f, 2), 2);
            assert_eq!(keep(&back), keep(&f));
            let alt = eta_length_factorial(&eta_length_factorial(&f, 2), 2);
            if keep(&alt) != keep(&f) {
                length_factorial_failed = true;
            }
        }
        assert!(length_factorial_failed);
    }
}

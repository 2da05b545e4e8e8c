//! Built-in reference models: an abelian gauge field in two base dimensions
//! and a reducible antisymmetric two-form field in three. Used by the self
//! test command and the test suites.

use crate::index::MultiIndex;
use crate::model::{GenId, Model};
use crate::noether::{NoetherOperator, NoetherTower, Slot};
use crate::parity::Parity;
use crate::scalar::{rat, rat_int, GradedScalar};
use crate::variational::Lagrangian;

pub struct GaugeFixture {
    pub model: Model,
    pub lagrangian: Lagrangian,
    pub tower: NoetherTower,
    pub fields: Vec<GenId>,
}

/// n = 2 abelian gauge model: fields A_0, A_1 with density F^2 / 2 for
/// F = d_0 A_1 - d_1 A_0, and the single divergence-type Noether operator.
pub fn maxwell() -> GaugeFixture {
    let mut model = Model::new(&["t", "x"]);
    let a0 = model.declare_field("A_0", Parity::Even).unwrap();
    let a1 = model.declare_field("A_1", Parity::Even).unwrap();
    let f = &GradedScalar::sym(2, model.sym(a1, MultiIndex::single(0)))
        - &GradedScalar::sym(2, model.sym(a0, MultiIndex::single(1)));
    let lagrangian = Lagrangian::new((&f * &f).scale(&rat(1, 2)), &model).unwrap();

    let mut op = NoetherOperator::new("div");
    op.coeffs.insert(
        (Slot::Field(a0), MultiIndex::single(0)),
        GradedScalar::one(2),
    );
    op.coeffs.insert(
        (Slot::Field(a1), MultiIndex::single(1)),
        GradedScalar::one(2),
    );
    GaugeFixture {
        model,
        lagrangian,
        tower: NoetherTower { stages: vec![vec![op]] },
        fields: vec![a0, a1],
    }
}

/// n = 3 antisymmetric two-form model: independent components B_01, B_02,
/// B_12 with density H^2 / 2 for H = d_0 B_12 - d_1 B_02 + d_2 B_01. The
/// three stage-0 operators are reducible through one stage-1 operator.
pub fn two_form() -> GaugeFixture {
    let mut model = Model::new(&["x0", "x1", "x2"]);
    let b01 = model.declare_field("B_01", Parity::Even).unwrap();
    let b02 = model.declare_field("B_02", Parity::Even).unwrap();
    let b12 = model.declare_field("B_12", Parity::Even).unwrap();
    let h = &(&GradedScalar::sym(3, model.sym(b12, MultiIndex::single(0)))
        - &GradedScalar::sym(3, model.sym(b02, MultiIndex::single(1))))
        + &GradedScalar::sym(3, model.sym(b01, MultiIndex::single(2)));
    let lagrangian = Lagrangian::new((&h * &h).scale(&rat(1, 2)), &model).unwrap();

    // stage 0: for each nu, sum_mu d_mu E^{mu nu} = 0 with E^{mu nu}
    // antisymmetric in (mu, nu)
    let mut stage0 = Vec::new();
    let entries: [(&str, Vec<(GenId, u8, i64)>); 3] = [
        ("N0", vec![(b01, 1, -1), (b02, 2, -1)]),
        ("N1", vec![(b01, 0, 1), (b12, 2, -1)]),
        ("N2", vec![(b02, 0, 1), (b12, 1, 1)]),
    ];
    for (name, rows) in entries {
        let mut op = NoetherOperator::new(name);
        for (field, mu, sign) in rows {
            op.coeffs.insert(
                (Slot::Field(field), MultiIndex::single(mu)),
                GradedScalar::int(3, sign),
            );
        }
        stage0.push(op);
    }

    // stage 1: d_nu applied to the stage-0 family closes with no correction
    let mut stage1_op = NoetherOperator::new("M");
    for nu in 0..3u8 {
        stage1_op.coeffs.insert(
            (
                Slot::Op {
                    stage: 0,
                    index: nu as usize,
                },
                MultiIndex::single(nu),
            ),
            GradedScalar::one(3),
        );
    }

    GaugeFixture {
        model,
        lagrangian,
        tower: NoetherTower {
            stages: vec![stage0, vec![stage1_op]],
        },
        fields: vec![b01, b02, b12],
    }
}

/// Flips the sign of one coefficient of one operator; used by mutation tests.
pub fn flip_one_sign(tower: &NoetherTower, stage: usize, op: usize) -> NoetherTower {
    let mut out = tower.clone();
    let target = &mut out.stages[stage][op];
    if let Some((key, value)) = target.coeffs.iter().next().map(|(k, v)| (k.clone(), v.clone())) {
        target.coeffs.insert(key, value.scale(&rat_int(-1)));
    }
    out
}

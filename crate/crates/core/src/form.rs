//! The bigraded algebra of jet-space forms.
//!
//! Forms are sums of terms `coefficient * wedge word`, the coefficient a
//! `GradedScalar` stored to the left of the word. Words are canonically
//! ordered with horizontal factors dx^lambda first, contact factors
//! theta^A_Lambda after, and every reordering sign absorbed into the
//! coefficient. Odd contact factors commute with each other and may repeat;
//! all other basis one-forms anticommute and square to zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::Zero;

use crate::model::JetSymbol;
use crate::parity::Parity;
use crate::scalar::{rat_int, GradedScalar, Monomial, Rat};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BasisOneForm {
    /// Horizontal generator dx^lambda.
    Dx(u8),
    /// Contact generator theta^A_Lambda.
    Theta(JetSymbol),
}

impl BasisOneForm {
    pub fn parity(&self) -> Parity {
        match self {
            BasisOneForm::Dx(_) => Parity::Even,
            BasisOneForm::Theta(s) => s.parity,
        }
    }
}

pub type WedgeWord = Vec<BasisOneForm>;

/// Sorts a wedge word into canonical order. Returns `None` when the word
/// vanishes (a repeated one-form of even parity), otherwise the sorted word
/// and the Koszul sign of the permutation.
pub fn canonicalize_word(mut word: WedgeWord) -> Option<(WedgeWord, i8)> {
    let mut sign = 1i8;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            // adjacent swap of two one-forms: (-1)^{1 + [a][b]}
            if !(word[j - 1].parity().is_odd() && word[j].parity().is_odd()) {
                sign = -sign;
            }
            word.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in word.windows(2) {
        if w[0] == w[1] && !w[0].parity().is_odd() {
            return None;
        }
    }
    Some((word, sign))
}

fn word_odd_count(word: &[BasisOneForm]) -> usize {
    word.iter().filter(|f| f.parity().is_odd()).count()
}

/// Bidegree of a word: (contact degree, horizontal degree).
pub fn word_bidegree(word: &[BasisOneForm]) -> (usize, usize) {
    let horizontal = word
        .iter()
        .filter(|f| matches!(f, BasisOneForm::Dx(_)))
        .count();
    (word.len() - horizontal, horizontal)
}

/// A graded form over the jet ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedForm {
    dim: u8,
    terms: BTreeMap<WedgeWord, GradedScalar>,
}

impl GradedForm {
    pub fn zero(dim: u8) -> GradedForm {
        GradedForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_scalar(c: GradedScalar) -> GradedForm {
        let mut f = GradedForm::zero(c.dim());
        if !c.is_zero() {
            f.terms.insert(Vec::new(), c);
        }
        f
    }

    pub fn basis(dim: u8, b: BasisOneForm) -> GradedForm {
        let mut f = GradedForm::zero(dim);
        f.terms.insert(vec![b], GradedScalar::one(dim));
        f
    }

    pub fn theta(dim: u8, s: JetSymbol) -> GradedForm {
        GradedForm::basis(dim, BasisOneForm::Theta(s))
    }

    pub fn dx(dim: u8, lambda: u8) -> GradedForm {
        GradedForm::basis(dim, BasisOneForm::Dx(lambda))
    }

    /// The horizontal volume form dx^1 ^ ... ^ dx^n.
    pub fn volume(dim: u8) -> GradedForm {
        let mut f = GradedForm::zero(dim);
        f.terms.insert(
            (0..dim).map(BasisOneForm::Dx).collect(),
            GradedScalar::one(dim),
        );
        f
    }

    /// omega_lambda, the contraction of the frame along x^lambda into the
    /// volume form.
    pub fn volume_contracted(dim: u8, lambda: u8) -> GradedForm {
        interior_product(&FrameContraction(lambda), &GradedForm::volume(dim))
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeWord, &GradedScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient_of_word(&self, w: &WedgeWord) -> GradedScalar {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| GradedScalar::zero(self.dim))
    }

    pub(crate) fn insert(&mut self, word: WedgeWord, coeff: GradedScalar) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let v = e.get() + &coeff;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Adds `rat * mono * word`, canonicalizing the word.
    fn insert_atom(&mut self, mono: Monomial, rat: Rat, word: WedgeWord) {
        if rat.is_zero() {
            return;
        }
        if let Some((w, sign)) = canonicalize_word(word) {
            self.insert(
                w,
                GradedScalar::monomial(self.dim, mono, rat * rat_int(sign as i64)),
            );
        }
    }

    fn atoms(&self) -> impl Iterator<Item = (&Monomial, &Rat, &WedgeWord)> {
        self.terms
            .iter()
            .flat_map(|(w, c)| c.terms().map(move |(m, r)| (m, r, w)))
    }

    /// Graded wedge product.
    pub fn wedge(&self, other: &GradedForm) -> GradedForm {
        assert_eq!(self.dim, other.dim, "base dimension mismatch");
        let mut out = GradedForm::zero(self.dim);
        for (m1, r1, w1) in self.atoms() {
            let w1_odd = word_odd_count(w1);
            for (m2, r2, w2) in other.atoms() {
                // move the scalar part of the right atom through the left
                // word: parity signs only
                let mut sign = if m2.parity().is_odd() && w1_odd % 2 == 1 {
                    -1i8
                } else {
                    1
                };
                let Some((mono, s)) = m1.mul(m2) else {
                    continue;
                };
                sign *= s;
                let mut word = w1.clone();
                word.extend(w2.iter().cloned());
                out.insert_atom(mono, r1 * r2 * rat_int(sign as i64), word);
            }
        }
        out
    }

    pub fn mul_scalar_left(&self, c: &GradedScalar) -> GradedForm {
        GradedForm::from_scalar(c.clone()).wedge(self)
    }

    pub fn mul_scalar_right(&self, c: &GradedScalar) -> GradedForm {
        self.wedge(&GradedForm::from_scalar(c.clone()))
    }

    pub fn scale(&self, r: &Rat) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            out.insert(w.clone(), c.scale(r));
        }
        out
    }

    /// Sum of the terms with exactly `contact` theta factors and
    /// `horizontal` dx factors.
    pub fn project_bidegree(&self, contact: usize, horizontal: usize) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            if word_bidegree(w) == (contact, horizontal) {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// Projection h_k onto contact degree k.
    pub fn project_contact(&self, contact: usize) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            if word_bidegree(w).0 == contact {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// The bidegrees present in this form.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.terms.keys().map(|w| word_bidegree(w)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `Some((k, m))` when every term has the same bidegree; zero gives
    /// `Some((0, 0))`.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut degs = self.bidegrees();
        match degs.len() {
            0 => Some((0, 0)),
            1 => degs.pop(),
            _ => None,
        }
    }

    pub fn max_jet_order(&self) -> usize {
        let coeff = self
            .terms
            .values()
            .map(|c| c.max_jet_order())
            .max()
            .unwrap_or(0);
        let basis = self
            .terms
            .keys()
            .flat_map(|w| w.iter())
            .filter_map(|f| match f {
                BasisOneForm::Theta(s) => Some(s.index.order()),
                BasisOneForm::Dx(_) => None,
            })
            .max()
            .unwrap_or(0);
        coeff.max(basis)
    }

    /// Total derivative d_lambda acting on coefficients and raising contact
    /// factors; an even derivation.
    pub fn total_derivative(&self, lambda: u8) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            out.insert(w.clone(), c.total_derivative(lambda));
            for (i, f) in w.iter().enumerate() {
                if let BasisOneForm::Theta(s) = f {
                    let mut nw = w.clone();
                    nw[i] = BasisOneForm::Theta(s.raise(lambda));
                    for (m, r) in c.terms() {
                        out.insert_atom(m.clone(), r.clone(), nw.clone());
                    }
                }
            }
        }
        out
    }

    pub fn total_derivative_multi(&self, index: &crate::index::MultiIndex) -> GradedForm {
        let mut out = self.clone();
        for l in index.entries() {
            out = out.total_derivative(*l);
        }
        out
    }

    /// Horizontal differential d_H = dx^lambda ^ d_lambda.
    pub fn d_horizontal(&self) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for lambda in 0..self.dim {
            let d = self.total_derivative(lambda);
            for (w, c) in &d.terms {
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.push(BasisOneForm::Dx(lambda));
                nw.extend(w.iter().cloned());
                // dx is even: the coefficient passes it without a sign
                for (m, r) in c.terms() {
                    out.insert_atom(m.clone(), r.clone(), nw.clone());
                }
            }
        }
        out
    }

    /// Vertical differential d_V = theta^A_Lambda ^ partial^Lambda_A.
    pub fn d_vertical(&self) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            for s in c.jet_symbols() {
                let dc = c.partial(&s);
                if dc.is_zero() {
                    continue;
                }
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.push(BasisOneForm::Theta(s.clone()));
                nw.extend(w.iter().cloned());
                // move each derivative monomial back through theta^s
                for (m, r) in dc.terms() {
                    let sign = if m.parity().is_odd() && s.parity.is_odd() {
                        -1i64
                    } else {
                        1
                    };
                    out.insert_atom(m.clone(), r * rat_int(sign), nw.clone());
                }
            }
        }
        out
    }

    /// Full exterior differential, assembled independently of d_H and d_V
    /// through the ds-basis so that d = d_H + d_V is a testable identity.
    pub fn d_total(&self) -> GradedForm {
        let dim = self.dim;
        let ds = |s: &JetSymbol| -> GradedForm {
            let mut f = GradedForm::theta(dim, s.clone());
            for mu in 0..dim {
                f = &f
                    + &GradedForm::dx(dim, mu)
                        .mul_scalar_right(&GradedScalar::sym(dim, s.raise(mu)));
            }
            f
        };
        let d_basis = |b: &BasisOneForm| -> GradedForm {
            match b {
                BasisOneForm::Dx(_) => GradedForm::zero(dim),
                BasisOneForm::Theta(s) => {
                    let mut acc = GradedForm::zero(dim);
                    for mu in 0..dim {
                        acc = &acc - &ds(&s.raise(mu)).wedge(&GradedForm::dx(dim, mu));
                    }
                    acc
                }
            }
        };
        let mut out = GradedForm::zero(dim);
        for (w, c) in &self.terms {
            // d(c) ^ W
            let mut dc = GradedForm::zero(dim);
            for lambda in 0..dim {
                dc = &dc
                    + &GradedForm::dx(dim, lambda).mul_scalar_right(&c.partial_base(lambda));
            }
            for s in c.jet_symbols() {
                dc = &dc + &ds(&s).mul_scalar_right(&c.partial(&s));
            }
            let word_form = |part: &[BasisOneForm]| -> GradedForm {
                let mut f = GradedForm::from_scalar(GradedScalar::one(dim));
                for b in part {
                    f = f.wedge(&GradedForm::basis(dim, b.clone()));
                }
                f
            };
            out = &out + &dc.wedge(&word_form(w));
            // c * sum_i (-1)^{i-1} f_1 ^ .. ^ d f_i ^ .. ^ f_k
            for i in 0..w.len() {
                let dfi = d_basis(&w[i]);
                if dfi.is_zero() {
                    continue;
                }
                let piece = word_form(&w[..i]).wedge(&dfi).wedge(&word_form(&w[i + 1..]));
                let signed = if i % 2 == 0 { piece } else { -&piece };
                out = &out + &signed.mul_scalar_left(c);
            }
        }
        out
    }
}

impl Add for &GradedForm {
    type Output = GradedForm;
    fn add(self, rhs: &GradedForm) -> GradedForm {
        assert_eq!(self.dim, rhs.dim, "base dimension mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GradedForm {
    type Output = GradedForm;
    fn sub(self, rhs: &GradedForm) -> GradedForm {
        self + &(-rhs)
    }
}

impl Neg for &GradedForm {
    type Output = GradedForm;
    fn neg(self) -> GradedForm {
        let mut out = GradedForm::zero(self.dim);
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), -c);
        }
        out
    }
}

impl fmt::Display for GradedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for b in w {
                match b {
                    BasisOneForm::Dx(l) => write!(f, " ^ dx{l}")?,
                    BasisOneForm::Theta(s) => write!(f, " ^ th(g{}, {})", s.gen.0, s.index)?,
                }
            }
        }
        Ok(())
    }
}

/// Something that can be contracted into forms: supplies the images of the
/// basis one-forms and its own parity.
pub trait ContractionSource {
    fn parity(&self) -> Parity;
    fn dx_image(&self, dim: u8, lambda: u8) -> GradedScalar;
    fn theta_image(&self, dim: u8, s: &JetSymbol) -> GradedScalar;
}

/// The horizontal frame dual to dx^lambda. It annihilates contact factors,
/// so on horizontal forms it coincides with the coordinate frame.
pub struct FrameContraction(pub u8);

impl ContractionSource for FrameContraction {
    fn parity(&self) -> Parity {
        Parity::Even
    }
    fn dx_image(&self, dim: u8, lambda: u8) -> GradedScalar {
        if lambda == self.0 {
            GradedScalar::one(dim)
        } else {
            GradedScalar::zero(dim)
        }
    }
    fn theta_image(&self, dim: u8, _s: &JetSymbol) -> GradedScalar {
        GradedScalar::zero(dim)
    }
}

/// The elementary vertical frame partial^Lambda_A dual to theta^A_Lambda.
pub struct ElementaryContraction(pub JetSymbol);

impl ContractionSource for ElementaryContraction {
    fn parity(&self) -> Parity {
        self.0.parity
    }
    fn dx_image(&self, dim: u8, _lambda: u8) -> GradedScalar {
        GradedScalar::zero(dim)
    }
    fn theta_image(&self, dim: u8, s: &JetSymbol) -> GradedScalar {
        if *s == self.0 {
            GradedScalar::one(dim)
        } else {
            GradedScalar::zero(dim)
        }
    }
}

/// Graded interior product of a contraction source with a form.
pub fn interior_product(v: &impl ContractionSource, phi: &GradedForm) -> GradedForm {
    let dim = phi.dim();
    let p = v.parity();
    let mut out = GradedForm::zero(dim);
    for (mono, r, w) in phi.atoms() {
        let sign_base = if p.is_odd() && mono.parity().is_odd() {
            -1i8
        } else {
            1
        };
        let mut odd_prefix = 0usize;
        for (i, f) in w.iter().enumerate() {
            let image = match f {
                BasisOneForm::Dx(l) => v.dx_image(dim, *l),
                BasisOneForm::Theta(s) => v.theta_image(dim, s),
            };
            if !image.is_zero() {
                // passing the first i factors: (-1)^{i + p * odd_prefix}
                let mut sign = sign_base;
                if i % 2 == 1 {
                    sign = -sign;
                }
                if p.is_odd() && odd_prefix % 2 == 1 {
                    sign = -sign;
                }
                let mut word = w.clone();
                word.remove(i);
                for (gm, gr) in image.terms() {
                    // the image scalar crosses back over the removed prefix
                    let mut s2 = sign;
                    if gm.parity().is_odd() && odd_prefix % 2 == 1 {
                        s2 = -s2;
                    }
                    let Some((prod, ms)) = mono.mul(gm) else {
                        continue;
                    };
                    out.insert_atom(prod, r * gr * rat_int((s2 * ms) as i64), word.clone());
                }
            }
            if f.parity().is_odd() {
                odd_prefix += 1;
            }
        }
    }
    out
}

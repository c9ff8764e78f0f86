//! Noncommutative polynomials over canonical generators.
//!
//! Generators come in two interchangeable bases per mode: `q, p` with
//! `[q, p] = i`, and the ladder pair `c = (q + i p)/sqrt2`, `cd = (q - i p)/sqrt2`
//! with `[c, cd] = 1`. Different modes commute.
//!
//! [`OperatorPolynomial::normal_form`] rewrites every word into the canonical
//! order (mode-major; `cd` before `c`, `q` before `p`) by adjacent
//! transpositions, emitting a commutator side term whenever a non-commuting
//! pair is swapped.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::scalar::{Bindings, Gauss, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// creation operator `c†`
    Cd,
    /// annihilation operator `c`
    C,
    Q,
    P,
}

impl Kind {
    pub fn basis(self) -> Basis {
        match self {
            Kind::C | Kind::Cd => Basis::Ladder,
            Kind::Q | Kind::P => Basis::Qp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Cd => "cd",
            Kind::C => "c",
            Kind::Q => "q",
            Kind::P => "p",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Qp,
    Ladder,
}

impl Basis {
    /// Generator kinds in coordinate order: `(x_k, x_{n+k})`.
    pub fn kinds(self) -> (Kind, Kind) {
        match self {
            Basis::Qp => (Kind::Q, Kind::P),
            Basis::Ladder => (Kind::C, Kind::Cd),
        }
    }
}

/// One canonical generator; `mode` is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub mode: u16,
    pub kind: Kind,
}

impl Gen {
    pub fn new(mode: u16, kind: Kind) -> Self {
        Gen { mode, kind }
    }
    pub fn q(mode: u16) -> Self {
        Gen::new(mode, Kind::Q)
    }
    pub fn p(mode: u16) -> Self {
        Gen::new(mode, Kind::P)
    }
    pub fn c(mode: u16) -> Self {
        Gen::new(mode, Kind::C)
    }
    pub fn cd(mode: u16) -> Self {
        Gen::new(mode, Kind::Cd)
    }

    /// Image of the generator in `basis` as `(generator, coefficient)` pairs.
    pub fn in_basis(self, basis: Basis) -> Vec<(Gen, Scalar)> {
        if self.kind.basis() == basis {
            return vec![(self, Scalar::one())];
        }
        let h = Scalar::inv_root2();
        let ih = &h * &Scalar::i();
        let m = self.mode;
        match self.kind {
            // q = (c + cd)/sqrt2, p = -i (c - cd)/sqrt2
            Kind::Q => vec![(Gen::cd(m), h.clone()), (Gen::c(m), h)],
            Kind::P => vec![(Gen::cd(m), ih.clone()), (Gen::c(m), -ih)],
            // c = (q + i p)/sqrt2, cd = (q - i p)/sqrt2
            Kind::C => vec![(Gen::q(m), h), (Gen::p(m), ih)],
            Kind::Cd => vec![(Gen::q(m), h), (Gen::p(m), -ih)],
        }
    }

    /// The c-number `[self, other]`, for generators of one basis.
    pub fn commutator(self, other: Gen) -> Gauss {
        if self.mode != other.mode {
            return Gauss::zero();
        }
        match (self.kind, other.kind) {
            (Kind::C, Kind::Cd) => Gauss::one(),
            (Kind::Cd, Kind::C) => -Gauss::one(),
            (Kind::Q, Kind::P) => Gauss::i(),
            (Kind::P, Kind::Q) => -Gauss::i(),
            _ => Gauss::zero(),
        }
    }

    pub fn display(self, indexed: bool) -> String {
        if indexed {
            format!("{}[{}]", self.kind.name(), self.mode + 1)
        } else {
            self.kind.name().to_string()
        }
    }
}

pub type Word = Vec<Gen>;

type NormalTerms = Rc<Vec<(Word, Gauss)>>;

thread_local! {
    static NORMAL_CACHE: RefCell<HashMap<Word, NormalTerms>> = RefCell::new(HashMap::new());
}

fn first_descent(w: &[Gen]) -> Option<usize> {
    w.windows(2).position(|pair| pair[0] > pair[1])
}

/// Canonical form of a single word whose generators share one basis.
fn normal_word(w: &[Gen]) -> Rc<Vec<(Word, Gauss)>> {
    let Some(i) = first_descent(w) else {
        return Rc::new(vec![(w.to_vec(), Gauss::one())]);
    };
    if let Some(hit) = NORMAL_CACHE.with(|c| c.borrow().get(w).cloned()) {
        return hit;
    }
    let mut acc: BTreeMap<Word, Gauss> = BTreeMap::new();
    let mut swapped = w.to_vec();
    swapped.swap(i, i + 1);
    for (word, g) in normal_word(&swapped).iter() {
        *acc.entry(word.clone()).or_default() += g;
    }
    // w[i] w[i+1] = w[i+1] w[i] + [w[i], w[i+1]]
    let side = w[i].commutator(w[i + 1]);
    if !side.is_zero() {
        let mut reduced = w[..i].to_vec();
        reduced.extend_from_slice(&w[i + 2..]);
        for (word, g) in normal_word(&reduced).iter() {
            *acc.entry(word.clone()).or_default() += &(g * &side);
        }
    }
    let out: Rc<Vec<(Word, Gauss)>> =
        Rc::new(acc.into_iter().filter(|(_, g)| !g.is_zero()).collect());
    NORMAL_CACHE.with(|c| c.borrow_mut().insert(w.to_vec(), out.clone()));
    out
}

/// Finite map from words to coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Word, Scalar>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        OperatorPolynomial::default()
    }

    pub fn one() -> Self {
        OperatorPolynomial::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        OperatorPolynomial::term(Vec::new(), s)
    }

    pub fn term(word: Word, s: Scalar) -> Self {
        let mut p = OperatorPolynomial::zero();
        p.add_term(word, s);
        p
    }

    pub fn generator(g: Gen) -> Self {
        OperatorPolynomial::term(vec![g], Scalar::one())
    }

    pub fn word(w: &[Gen]) -> Self {
        OperatorPolynomial::term(w.to_vec(), Scalar::one())
    }

    pub fn add_term(&mut self, word: Word, s: Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(s);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &s;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &[Gen]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Maximum word length.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of modes touched (one past the largest mode index).
    pub fn modes(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|w| w.iter().map(|g| g.mode as usize + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn uses_basis(&self, basis: Basis) -> bool {
        self.terms.keys().any(|w| w.iter().any(|g| g.kind.basis() == basis))
    }

    /// The c-number value when only the empty word is present.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = OperatorPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = OperatorPolynomial::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn substitute(&self, bindings: &Bindings) -> Self {
        self.map_coefficients(|c| c.substitute(bindings))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(OperatorPolynomial::one(), |acc, _| &acc * self)
    }

    /// Rewrites every generator into `basis` without reordering.
    pub fn to_basis(&self, basis: Basis) -> Self {
        let mut out = OperatorPolynomial::zero();
        for (w, c) in &self.terms {
            if w.iter().all(|g| g.kind.basis() == basis) {
                out.add_term(w.clone(), c.clone());
                continue;
            }
            let mut partial: Vec<(Word, Scalar)> = vec![(Vec::with_capacity(w.len()), c.clone())];
            for g in w {
                let image = g.in_basis(basis);
                partial = partial
                    .into_iter()
                    .flat_map(|(pw, pc)| {
                        image.iter().map(move |(h, hc)| {
                            let mut nw = pw.clone();
                            nw.push(*h);
                            (nw, &pc * hc)
                        })
                    })
                    .collect();
            }
            for (nw, nc) in partial {
                out.add_term(nw, nc);
            }
        }
        out
    }

    /// Canonical representative in `basis`; equal operators have equal
    /// normal forms.
    pub fn normal_form(&self, basis: Basis) -> Self {
        let converted = self.to_basis(basis);
        let mut out = OperatorPolynomial::zero();
        for (w, c) in &converted.terms {
            for (nw, g) in normal_word(w).iter() {
                out.add_term(nw.clone(), c.scale(g));
            }
        }
        out
    }

    /// `normal_form(self * rhs)` for operands already in `basis`.
    pub fn normal_product(&self, rhs: &Self, basis: Basis) -> Self {
        let mut out = OperatorPolynomial::zero();
        let mut joined = Vec::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                let coef = ca * cb;
                if coef.is_zero() {
                    continue;
                }
                joined.clear();
                joined.extend(wa.iter().map(|g| {
                    debug_assert_eq!(g.kind.basis(), basis);
                    *g
                }));
                joined.extend_from_slice(wb);
                for (nw, g) in normal_word(&joined).iter() {
                    out.add_term(nw.clone(), coef.scale(g));
                }
            }
        }
        out
    }

    /// Reorders the factors of every word by `rank` (ties keep mode order)
    /// as if the generators commuted; this is how monomial orderings act on
    /// a product of canonical generators.
    pub fn reorder_factors(&self, basis: Basis, rank: impl Fn(Kind) -> u8) -> Self {
        let converted = self.to_basis(basis);
        let mut out = OperatorPolynomial::zero();
        for (w, c) in &converted.terms {
            let mut w = w.clone();
            w.sort_by_key(|g| (g.mode, rank(g.kind)));
            out.add_term(w, c.clone());
        }
        out
    }

    fn indexed_display(&self) -> bool {
        self.terms.keys().any(|w| w.iter().any(|g| g.mode > 0))
    }
}

/// Formats a word as `cd^2*c` (or `q[1]*p[2]` when several modes occur).
pub fn format_word(w: &[Gen], indexed: bool) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let name = w[i].display(indexed);
        if j - i == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{}", j - i));
        }
        i = j;
    }
    parts.join("*")
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let indexed = self.indexed_display();
        // highest degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        for (k, (w, c)) in terms.into_iter().enumerate() {
            let word = format_word(w, indexed);
            let single = c.len() == 1;
            let negative = single && c.leads_negative();
            let sep = match (k == 0, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            f.write_str(sep)?;
            let coef = if negative { -c } else { c.clone() };
            let coef_text =
                if single { coef.to_string() } else { format!("({coef})") };
            if w.is_empty() {
                f.write_str(&coef_text)?;
            } else if coef.is_one() {
                f.write_str(&word)?;
            } else {
                write!(f, "{coef_text}*{word}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a OperatorPolynomial> for &'a OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(self, rhs: &'a OperatorPolynomial) -> OperatorPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a OperatorPolynomial> for &'a OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn sub(self, rhs: &'a OperatorPolynomial) -> OperatorPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a OperatorPolynomial> for &'a OperatorPolynomial {
    type Output = OperatorPolynomial;
    /// Word concatenation; no reordering is applied.
    fn mul(self, rhs: &'a OperatorPolynomial) -> OperatorPolynomial {
        let mut out = OperatorPolynomial::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca * cb);
            }
        }
        out
    }
}

impl Neg for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.map_coefficients(|c| -c)
    }
}

impl Add for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        &self + &rhs
    }
}

impl Sub for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn sub(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        &self - &rhs
    }
}

impl Mul for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        &self * &rhs
    }
}

impl From<Gen> for OperatorPolynomial {
    fn from(g: Gen) -> Self {
        OperatorPolynomial::generator(g)
    }
}

/// `X = sum_k a_k x_k` over the `2n` canonical coordinates of one basis.
///
/// Coordinates `0..n` are `q_k` (or `c_k`), coordinates `n..2n` are `p_k`
/// (or `cd_k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCombination {
    n_modes: usize,
    basis: Basis,
    coeffs: Vec<Scalar>,
}

impl LinearCombination {
    pub fn zero(n_modes: usize, basis: Basis) -> Self {
        LinearCombination { n_modes, basis, coeffs: vec![Scalar::zero(); 2 * n_modes] }
    }

    pub fn new(n_modes: usize, basis: Basis, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != 2 * n_modes {
            return Err(Error::Dimension { expected: n_modes, found: coeffs.len() / 2 });
        }
        Ok(LinearCombination { n_modes, basis, coeffs })
    }

    /// Builds `sum c_j g_j`; the basis is taken from the first generator.
    pub fn from_terms(n_modes: usize, terms: &[(Gen, Scalar)]) -> Result<Self> {
        let basis = terms.first().map_or(Basis::Qp, |(g, _)| g.kind.basis());
        let mut out = LinearCombination::zero(n_modes, basis);
        for (g, c) in terms {
            if g.mode as usize >= n_modes {
                return Err(Error::Dimension { expected: n_modes, found: g.mode as usize + 1 });
            }
            for (h, hc) in g.in_basis(basis) {
                let idx = out.index_of(h);
                out.coeffs[idx] += &(c * &hc);
            }
        }
        Ok(out)
    }

    pub fn generator(n_modes: usize, g: Gen) -> Result<Self> {
        LinearCombination::from_terms(n_modes, &[(g, Scalar::one())])
    }

    /// Reads a homogeneous degree-one polynomial.
    pub fn from_polynomial(p: &OperatorPolynomial, n_modes: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (w, c) in p.terms() {
            if w.len() != 1 {
                return Err(Error::Argument(format!(
                    "expected a linear combination of generators, found a term of degree {}",
                    w.len()
                )));
            }
            terms.push((w[0], c.clone()));
        }
        LinearCombination::from_terms(n_modes.max(p.modes()), &terms)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    fn index_of(&self, g: Gen) -> usize {
        let (first, _) = self.basis.kinds();
        if g.kind == first {
            g.mode as usize
        } else {
            self.n_modes + g.mode as usize
        }
    }

    pub fn gen_at(&self, idx: usize) -> Gen {
        let (first, second) = self.basis.kinds();
        if idx < self.n_modes {
            Gen::new(idx as u16, first)
        } else {
            Gen::new((idx - self.n_modes) as u16, second)
        }
    }

    pub fn coefficient(&self, g: Gen) -> Scalar {
        let conv = self.to_basis(g.kind.basis());
        conv.coeffs[conv.index_of(g)].clone()
    }

    pub fn to_basis(&self, basis: Basis) -> LinearCombination {
        if basis == self.basis {
            return self.clone();
        }
        let terms: Vec<(Gen, Scalar)> =
            (0..2 * self.n_modes).map(|i| (self.gen_at(i), self.coeffs[i].clone())).collect();
        let mut out = LinearCombination::zero(self.n_modes, basis);
        for (g, c) in terms {
            for (h, hc) in g.in_basis(basis) {
                let idx = out.index_of(h);
                out.coeffs[idx] += &(&c * &hc);
            }
        }
        out
    }

    pub fn to_polynomial(&self) -> OperatorPolynomial {
        let mut p = OperatorPolynomial::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            p.add_term(vec![self.gen_at(i)], c.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> LinearCombination {
        LinearCombination {
            n_modes: self.n_modes,
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn checked_add(&self, rhs: &LinearCombination) -> Result<LinearCombination> {
        self.check_modes(rhs)?;
        let rhs = rhs.to_basis(self.basis);
        Ok(LinearCombination {
            n_modes: self.n_modes,
            basis: self.basis,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn substitute(&self, bindings: &Bindings) -> LinearCombination {
        LinearCombination {
            n_modes: self.n_modes,
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c.substitute(bindings)).collect(),
        }
    }

    /// Same operator, regardless of the basis each side is stored in.
    pub fn same_operator(&self, rhs: &LinearCombination) -> bool {
        self.n_modes == rhs.n_modes && self.coeffs == rhs.to_basis(self.basis).coeffs
    }

    fn check_modes(&self, rhs: &LinearCombination) -> Result<()> {
        if self.n_modes != rhs.n_modes {
            return Err(Error::Dimension { expected: self.n_modes, found: rhs.n_modes });
        }
        Ok(())
    }

    /// The c-number `[self, rhs]`.
    pub fn commutator(&self, rhs: &LinearCombination) -> Result<Scalar> {
        self.check_modes(rhs)?;
        let n = self.n_modes;
        if self.basis == Basis::Ladder && rhs.basis == Basis::Ladder {
            // [sum a c + b cd, sum a' c + b' cd] = sum (a b' - b a')
            return Ok((0..n)
                .map(|k| {
                    &(&self.coeffs[k] * &rhs.coeffs[n + k]) - &(&self.coeffs[n + k] * &rhs.coeffs[k])
                })
                .sum());
        }
        let x = self.to_basis(Basis::Qp);
        let y = rhs.to_basis(Basis::Qp);
        let sum: Scalar = (0..n)
            .map(|k| &(&x.coeffs[k] * &y.coeffs[n + k]) - &(&x.coeffs[n + k] * &y.coeffs[k]))
            .sum();
        Ok(&sum * &Scalar::i())
    }
}

/// `[X, Y]` as a c-number; see [`LinearCombination::commutator`].
pub fn commutator_scalar(x: &LinearCombination, y: &LinearCombination) -> Result<Scalar> {
    x.commutator(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> OperatorPolynomial {
        Gen::q(0).into()
    }
    fn p() -> OperatorPolynomial {
        Gen::p(0).into()
    }
    fn c() -> OperatorPolynomial {
        Gen::c(0).into()
    }
    fn cd() -> OperatorPolynomial {
        Gen::cd(0).into()
    }

    #[test]
    fn ladder_swap_emits_unit_commutator() {
        let nf = (&c() * &cd()).normal_form(Basis::Ladder);
        assert_eq!(nf, &(&cd() * &c()) + &OperatorPolynomial::one());
    }

    #[test]
    fn p_q_squared() {
        // p q^2 = q^2 p - 2 i q
        let nf = (&p() * &q().pow(2)).normal_form(Basis::Qp);
        let expected = &(&q().pow(2) * &p()) - &q().scale(&Scalar::from_gauss(Gauss::from_int(2).mul_ref(&Gauss::i())));
        assert_eq!(nf, expected);
    }

    #[test]
    fn q_p_q() {
        let nf = (&(&q() * &p()) * &q()).normal_form(Basis::Qp);
        let expected = &(&q().pow(2) * &p()) - &q().scale(&Scalar::i());
        assert_eq!(nf, expected);
    }

    #[test]
    fn unreduced_product_keeps_word_order() {
        let a = &q() + &p();
        let b = &q() - &p();
        let prod = &a * &b;
        assert_eq!(prod.len(), 4);
        assert_eq!(prod.coefficient(&[Gen::q(0), Gen::p(0)]), Scalar::from_int(-1));
        assert_eq!(prod.coefficient(&[Gen::p(0), Gen::q(0)]), Scalar::one());
    }

    #[test]
    fn basis_conversion_round_trip() {
        let e = &(&q() * &p()) + &cd();
        let back = e.to_basis(Basis::Ladder).to_basis(Basis::Qp).normal_form(Basis::Qp);
        assert_eq!(back, e.normal_form(Basis::Qp));
    }

    #[test]
    fn number_operator_in_qp() {
        // cd c = (q^2 + p^2 - 1)/2
        let n = (&cd() * &c()).normal_form(Basis::Qp);
        let half = Scalar::ratio(1, 2);
        let expected = (&(&q().pow(2) + &p().pow(2)) - &OperatorPolynomial::one()).scale(&half);
        assert_eq!(n, expected);
    }

    #[test]
    fn different_modes_commute() {
        let w = OperatorPolynomial::word(&[Gen::c(1), Gen::cd(0)]);
        assert_eq!(w.normal_form(Basis::Ladder), OperatorPolynomial::word(&[Gen::cd(0), Gen::c(1)]));
    }

    #[test]
    fn commutator_examples() {
        let n = 1;
        let qx = LinearCombination::generator(n, Gen::q(0)).unwrap();
        let px = LinearCombination::generator(n, Gen::p(0)).unwrap();
        assert_eq!(qx.commutator(&px).unwrap(), Scalar::i());
        assert!(qx.commutator(&qx).unwrap().is_zero());
        let x = LinearCombination::from_terms(n, &[(Gen::q(0), 2.into()), (Gen::p(0), 3.into())]).unwrap();
        let y = LinearCombination::from_terms(n, &[(Gen::q(0), 1.into()), (Gen::p(0), (-1).into())]).unwrap();
        assert_eq!(x.commutator(&y).unwrap(), Scalar::i().scale_rational(&crate::scalar::integer(-5)));
        let cx = LinearCombination::generator(n, Gen::c(0)).unwrap();
        let cdx = LinearCombination::generator(n, Gen::cd(0)).unwrap();
        assert_eq!(cx.commutator(&cdx).unwrap(), Scalar::one());
        // mixed bases go through q, p
        assert_eq!(cx.commutator(&cdx.to_basis(Basis::Qp)).unwrap(), Scalar::one());
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = LinearCombination::generator(1, Gen::q(0)).unwrap();
        let b = LinearCombination::generator(2, Gen::q(1)).unwrap();
        assert!(matches!(a.commutator(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn linear_combination_basis_conversion_is_exact() {
        let x = LinearCombination::from_terms(
            2,
            &[(Gen::q(0), Scalar::var("a")), (Gen::p(1), Scalar::i()), (Gen::cd(1), Scalar::ratio(1, 3))],
        )
        .unwrap();
        let there = x.to_basis(Basis::Ladder);
        assert!(there.same_operator(&x));
        assert_eq!(there.to_basis(Basis::Qp), x);
    }

    #[test]
    fn display() {
        let e = (&(&c() * &cd()) - &OperatorPolynomial::one()).normal_form(Basis::Ladder);
        assert_eq!(e.to_string(), "cd*c");
        let e = (&p() * &q().pow(2)).normal_form(Basis::Qp);
        assert_eq!(e.to_string(), "q^2*p - 2*i*q");
        assert_eq!(OperatorPolynomial::zero().to_string(), "0");
    }
}

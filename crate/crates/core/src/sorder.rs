//! s-ordering as a path ordering.
//!
//! The `c` factors are spread uniformly over `[0, 1]` and the `cd` factors
//! arrive according to a monotone path `chi`; later factors stand to the
//! left. The resulting mixture of words is the s-ordered product with
//! `s = 1 - 2 * integral(chi)`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{format_word, Gen, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, format_rational, integer, Rational, Scalar};

/// Default bound on `n + m` for [`scheme_weights`].
pub const DEFAULT_SIZE_BOUND: usize = 8;

/// Dense polynomial, coefficients in ascending powers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn constant(c: Rational) -> Self {
        Poly(vec![c]).trimmed()
    }

    pub fn monomial(k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = Rational::one();
        Poly(v)
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let z = Rational::zero();
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&z) + rhs.0.get(i).unwrap_or(&z)).collect()).trimmed()
    }

    pub fn scale(&self, r: &Rational) -> Poly {
        Poly(self.0.iter().map(|c| c * r).collect()).trimmed()
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * integer(i as i64)).collect()).trimmed()
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Poly {
        let mut v = vec![Rational::zero()];
        v.extend(self.0.iter().enumerate().map(|(i, c)| c / integer(i as i64 + 1)));
        Poly(v).trimmed()
    }

    /// `p(a + (b - a) u)` as a polynomial in `u`.
    fn rescaled(&self, a: &Rational, b: &Rational) -> Poly {
        let lin = Poly(vec![a.clone(), b - a]);
        self.0.iter().rev().fold(Poly::default(), |acc, c| acc.mul(&lin).add(&Poly::constant(c.clone())))
    }

    /// Bernstein coefficients of degree `d` on `[0, 1]`.
    fn bernstein(&self, d: usize) -> Vec<Rational> {
        let z = Rational::zero();
        (0..=d)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let c = self.0.get(j).unwrap_or(&z);
                        c * Rational::new(binomial(i as u32, j as u32), binomial(d as u32, j as u32))
                    })
                    .fold(Rational::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    /// Certifies `p >= 0` on `[a, b]` by Bernstein subdivision.
    fn nonnegative_on(&self, a: &Rational, b: &Rational, depth: u32) -> Option<bool> {
        let d = self.degree();
        let coeffs = self.rescaled(a, b).bernstein(d);
        if coeffs.iter().all(|c| !c.is_negative()) {
            return Some(true);
        }
        if coeffs[0].is_negative() || coeffs[d].is_negative() {
            return Some(false);
        }
        if depth == 0 {
            return None;
        }
        let mid = (a + b) / integer(2);
        if self.eval(&mid).is_negative() {
            return Some(false);
        }
        match (self.nonnegative_on(a, &mid, depth - 1), self.nonnegative_on(&mid, b, depth - 1)) {
            (Some(true), Some(true)) => Some(true),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        }
    }
}

/// One polynomial piece of `chi`, valid on the open interval `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub a: Rational,
    pub b: Rational,
    pub poly: Poly,
}

/// Monotone piecewise-polynomial path with `chi(0) = 0`, `chi(1) = 1`.
///
/// Pieces give the values on open intervals. Any gap between neighbouring
/// one-sided limits is a jump, including jumps at `0` and `1`, so the
/// Stieltjes measure `d chi` may carry point masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiPath {
    pieces: Vec<Piece>,
}

impl ChiPath {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidChi(m));
        if pieces.is_empty() {
            return bad("no pieces".into());
        }
        if !pieces[0].a.is_zero() || !pieces[pieces.len() - 1].b.is_one() {
            return bad("pieces must cover [0, 1]".into());
        }
        for w in pieces.windows(2) {
            if w[0].b != w[1].a {
                return bad(format!("gap or overlap at {}", format_rational(&w[0].b)));
            }
        }
        for p in &pieces {
            if p.a >= p.b {
                return bad(format!("empty interval [{}, {}]", format_rational(&p.a), format_rational(&p.b)));
            }
            match p.poly.derivative().nonnegative_on(&p.a, &p.b, 40) {
                Some(true) => {}
                Some(false) => return bad(format!("decreasing on ({}, {})", format_rational(&p.a), format_rational(&p.b))),
                None => return bad("could not certify monotonicity".into()),
            }
        }
        let chi = ChiPath { pieces };
        for (x, mass) in chi.atoms() {
            if mass.is_negative() {
                return bad(format!("downward jump at {}", format_rational(&x)));
            }
        }
        Ok(chi)
    }

    /// `chi(t) = t`.
    pub fn identity() -> Self {
        ChiPath::power(1)
    }

    /// `chi(t) = t^k`; `k = 0` puts all mass at `0`.
    pub fn power(k: usize) -> Self {
        ChiPath { pieces: vec![Piece { a: integer(0), b: integer(1), poly: Poly::monomial(k) }] }
    }

    /// Step from 0 to 1 at `x`.
    pub fn jump_at(x: Rational) -> Result<Self> {
        if x.is_negative() || x > integer(1) {
            return Err(Error::InvalidChi(format!("jump position {} outside [0, 1]", format_rational(&x))));
        }
        let zero = || Poly::default();
        let one = || Poly::constant(integer(1));
        let pieces = if x.is_zero() {
            vec![Piece { a: integer(0), b: integer(1), poly: one() }]
        } else if x.is_one() {
            vec![Piece { a: integer(0), b: integer(1), poly: zero() }]
        } else {
            vec![
                Piece { a: integer(0), b: x.clone(), poly: zero() },
                Piece { a: x, b: integer(1), poly: one() },
            ]
        };
        ChiPath::new(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Point masses `(position, mass)` of `d chi`, zero masses omitted.
    pub fn atoms(&self) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        let mut left = integer(0);
        for p in &self.pieces {
            let right = p.poly.eval(&p.a);
            out.push((p.a.clone(), right - &left));
            left = p.poly.eval(&p.b);
        }
        out.push((integer(1), integer(1) - left));
        out.retain(|(_, m)| !m.is_zero());
        out
    }

    /// `integral_0^1 chi(t) dt`.
    pub fn integral(&self) -> Rational {
        self.pieces.iter().fold(Rational::zero(), |acc, p| {
            let f = p.poly.integral();
            acc + f.eval(&p.b) - f.eval(&p.a)
        })
    }

    /// Stieltjes integral `integral f d chi`.
    pub fn stieltjes(&self, f: &Poly) -> Rational {
        let atoms: Rational = self.atoms().iter().fold(Rational::zero(), |acc, (x, m)| acc + f.eval(x) * m);
        self.pieces.iter().fold(atoms, |acc, p| {
            let g = f.mul(&p.poly.derivative()).integral();
            acc + g.eval(&p.b) - g.eval(&p.a)
        })
    }
}

impl fmt::Display for ChiPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                let terms: Vec<String> = p
                    .poly
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| match i {
                        0 => format_rational(c),
                        1 => format!("{}*t", format_rational(c)),
                        _ => format!("{}*t^{i}", format_rational(c)),
                    })
                    .collect();
                let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                format!("{}:{}:{}", format_rational(&p.a), format_rational(&p.b), body)
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

pub fn s_of_chi(chi: &ChiPath) -> Rational {
    integer(1) - integer(2) * chi.integral()
}

/// Closed form of the s-ordered `c^n cd^m` in normal form.
pub fn s_ordered_value(n: u32, m: u32, s: &Scalar) -> OperatorPolynomial {
    let half_gap = &(&Scalar::one() - s) * &Scalar::ratio(1, 2);
    let mut out = OperatorPolynomial::zero();
    for j in 0..=n.min(m) {
        let coef = factorial(n) * factorial(m) / (factorial(j) * factorial(n - j) * factorial(m - j));
        let mut word = vec![Gen::cd(0); (m - j) as usize];
        word.extend(std::iter::repeat_n(Gen::c(0), (n - j) as usize));
        out.add_term(word, half_gap.pow(j).scale_rational(&Rational::from_integer(coef)));
    }
    out
}

/// Weight of one interleaving of `n` copies of `c` with `m` copies of `cd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaving {
    /// Left-to-right slots, `true` for `cd`.
    pub pattern: Vec<bool>,
    pub weight: Rational,
}

impl Interleaving {
    pub fn word(&self) -> Vec<Gen> {
        self.pattern.iter().map(|&d| if d { Gen::cd(0) } else { Gen::c(0) }).collect()
    }

    /// Binary string, `1` for `cd` and `0` for `c`.
    pub fn bits(&self) -> String {
        self.pattern.iter().map(|&d| if d { '1' } else { '0' }).collect()
    }

    pub fn word_string(&self) -> String {
        if self.pattern.is_empty() {
            "1".into()
        } else {
            format_word(&self.word(), false)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavingWeights {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Interleaving>,
}

impl InterleavingWeights {
    pub fn total(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |acc, e| acc + &e.weight)
    }

    pub fn weight_of(&self, word: &[Gen]) -> Option<&Rational> {
        self.entries.iter().find(|e| e.word() == word).map(|e| &e.weight)
    }

    /// `sum_P w_P word_P`, unreduced.
    pub fn operator(&self) -> OperatorPolynomial {
        let mut out = OperatorPolynomial::zero();
        for e in &self.entries {
            out.add_term(e.word(), Scalar::from_rational(e.weight.clone()));
        }
        out
    }
}

/// Piecewise polynomial on the breakpoints of a path.
#[derive(Clone, Debug)]
struct Piecewise {
    breaks: Vec<Rational>,
    polys: Vec<Poly>,
}

impl Piecewise {
    fn chi(chi: &ChiPath) -> Self {
        let mut breaks: Vec<Rational> = chi.pieces.iter().map(|p| p.a.clone()).collect();
        breaks.push(integer(1));
        Piecewise { breaks, polys: chi.pieces.iter().map(|p| p.poly.clone()).collect() }
    }

    fn constant(like: &Piecewise, c: Rational) -> Self {
        Piecewise { breaks: like.breaks.clone(), polys: vec![Poly::constant(c); like.polys.len()] }
    }

    fn zip(&self, rhs: &Piecewise, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        Piecewise { breaks: self.breaks.clone(), polys: self.polys.iter().zip(&rhs.polys).map(|(a, b)| f(a, b)).collect() }
    }

    fn mul(&self, rhs: &Piecewise) -> Self {
        self.zip(rhs, Poly::mul)
    }

    fn add(&self, rhs: &Piecewise) -> Self {
        self.zip(rhs, Poly::add)
    }

    fn scale(&self, r: &Rational) -> Self {
        Piecewise { breaks: self.breaks.clone(), polys: self.polys.iter().map(|p| p.scale(r)).collect() }
    }

    fn pow(&self, e: usize) -> Self {
        Piecewise { breaks: self.breaks.clone(), polys: self.polys.iter().map(|p| p.pow(e)).collect() }
    }

    /// `G(v) = integral_0^v self`, continuous.
    fn integral(&self) -> Self {
        let mut carry = Rational::zero();
        let mut polys = Vec::with_capacity(self.polys.len());
        for (i, p) in self.polys.iter().enumerate() {
            let f = p.integral();
            let a = &self.breaks[i];
            let shift = &carry - f.eval(a);
            let g = f.add(&Poly::constant(shift));
            carry = g.eval(&self.breaks[i + 1]);
            polys.push(g);
        }
        Piecewise { breaks: self.breaks.clone(), polys }
    }

    fn total(&self) -> Rational {
        self.integral().polys.last().map_or(Rational::zero(), |g| g.eval(&integer(1)))
    }
}

/// All gap-count vectors `(k_0, ..., k_n)` summing to `m`.
fn compositions(m: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in compositions(m - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Probability that sorted uniform `c` times `u_1 < ... < u_n` and `m`
/// independent `cd` times drawn from `d chi` leave `k_i` of the `cd` times
/// between `u_i` and `u_{i+1}`.
fn gap_weight(chi: &Piecewise, gaps: &[usize], m: usize) -> Rational {
    let n = gaps.len() - 1;
    let one = Piecewise::constant(chi, integer(1));
    // F_0(u) = chi(u)^{k_0}
    let mut f = chi.pow(gaps[0]);
    for &k in &gaps[1..n] {
        // F_next(v) = integral_0^v F(u) (chi(v) - chi(u))^k du
        let mut next = Piecewise::constant(chi, Rational::zero());
        for j in 0..=k {
            let sign = if j % 2 == 0 { integer(1) } else { integer(-1) };
            let c = Rational::from_integer(binomial(k as u32, j as u32)) * sign;
            let g = f.mul(&chi.pow(j)).integral();
            next = next.add(&g.mul(&chi.pow(k - j)).scale(&c));
        }
        f = next;
    }
    let tail = one.add(&chi.scale(&integer(-1))).pow(gaps[n]);
    let multinomial = gaps
        .iter()
        .fold(Rational::from_integer(factorial(m as u32)), |acc, &k| acc / Rational::from_integer(factorial(k as u32)));
    f.mul(&tail).total() * Rational::from_integer(factorial(n as u32)) * multinomial
}

/// Interleaving weights of `c^n cd^m` for the path `chi`.
pub fn scheme_weights(chi: &ChiPath, n: usize, m: usize) -> Result<InterleavingWeights> {
    scheme_weights_bounded(chi, n, m, DEFAULT_SIZE_BOUND)
}

pub fn scheme_weights_bounded(chi: &ChiPath, n: usize, m: usize, bound: usize) -> Result<InterleavingWeights> {
    if n + m > bound {
        return Err(Error::Size { got: n + m, bound });
    }
    if n == 0 {
        return Ok(InterleavingWeights { n, m, entries: vec![Interleaving { pattern: vec![true; m], weight: integer(1) }] });
    }
    let pw = Piecewise::chi(chi);
    let mut entries = Vec::new();
    for gaps in compositions(m, n + 1) {
        // latest first: cd^{k_n} c cd^{k_{n-1}} c ... c cd^{k_0}
        let mut pattern = Vec::with_capacity(n + m);
        for i in (0..=n).rev() {
            pattern.extend(std::iter::repeat_n(true, gaps[i]));
            if i > 0 {
                pattern.push(false);
            }
        }
        entries.push(Interleaving { pattern, weight: gap_weight(&pw, &gaps, m) });
    }
    entries.sort_by(|a, b| b.pattern.cmp(&a.pattern));
    Ok(InterleavingWeights { n, m, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeReport {
    pub s: Rational,
    pub weights: InterleavingWeights,
    pub value: OperatorPolynomial,
    pub expected: OperatorPolynomial,
}

impl SchemeReport {
    pub fn passed(&self) -> bool {
        self.value == self.expected && self.weights.total().is_one()
    }
}

/// Compares the weighted mixture with the closed-form s-ordered value.
pub fn verify_scheme(chi: &ChiPath, n: usize, m: usize) -> Result<SchemeReport> {
    let weights = scheme_weights(chi, n, m)?;
    let s = s_of_chi(chi);
    let value = weights.operator().normal_form(crate::algebra::Basis::Ladder);
    let expected = s_ordered_value(n as u32, m as u32, &Scalar::from_rational(s.clone()));
    Ok(SchemeReport { s, weights, value, expected })
}

/// Contraction of the path ordering against Weyl ordering for
/// `X = lc * c + l * cd`, from the Stieltjes double-integral reduction:
/// `C = l lc / 2 * (integral (1 - t) d chi - integral t d chi)`.
pub fn path_contraction(chi: &ChiPath, l: &Scalar, lc: &Scalar) -> Result<Scalar> {
    let late = chi.stieltjes(&Poly(vec![integer(1), integer(-1)]));
    let early = chi.stieltjes(&Poly(vec![integer(0), integer(1)]));
    let factor = (late - early) / integer(2);
    let c = (l * lc).scale_rational(&factor);
    let expected = (l * lc).scale_rational(&(-s_of_chi(chi) / integer(2)));
    if c != expected {
        return Err(Error::Internal(format!("path contraction {c} differs from -s/2 l lc = {expected}")));
    }
    Ok(c)
}

/// `kappa = (1 + s)/(1 - s)` for the path `t^kappa`, when `s < 1`.
pub fn kappa_for_s(s: &Rational) -> Option<Rational> {
    (s < &integer(1)).then(|| (integer(1) + s) / (integer(1) - s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Basis;
    use crate::scalar::rational;

    fn cd() -> Gen {
        Gen::cd(0)
    }
    fn c() -> Gen {
        Gen::c(0)
    }

    #[test]
    fn s_values() {
        assert_eq!(s_of_chi(&ChiPath::identity()), integer(0));
        for k in 1..6 {
            assert_eq!(s_of_chi(&ChiPath::power(k)), rational(k as i64 - 1, k as i64 + 1));
        }
        assert_eq!(s_of_chi(&ChiPath::jump_at(integer(1)).unwrap()), integer(1));
        assert_eq!(s_of_chi(&ChiPath::jump_at(integer(0)).unwrap()), integer(-1));
    }

    #[test]
    fn atoms_of_jumps() {
        let j = ChiPath::jump_at(rational(1, 2)).unwrap();
        assert_eq!(j.atoms(), vec![(rational(1, 2), integer(1))]);
        assert_eq!(ChiPath::jump_at(integer(1)).unwrap().atoms(), vec![(integer(1), integer(1))]);
        assert!(ChiPath::identity().atoms().is_empty());
    }

    #[test]
    fn rejects_decreasing_paths() {
        let p = Piece { a: integer(0), b: integer(1), poly: Poly(vec![integer(0), integer(2), integer(-1)]) };
        assert!(ChiPath::new(vec![p]).is_ok());
        let p = Piece { a: integer(0), b: integer(1), poly: Poly(vec![integer(0), integer(3), integer(-2)]) };
        assert!(matches!(ChiPath::new(vec![p]), Err(Error::InvalidChi(_))));
        // (2t - 1)^3 / 2 + 1/2 has a stationary point at 1/2
        let p = Piece {
            a: integer(0),
            b: integer(1),
            poly: Poly(vec![integer(0), integer(3), integer(-6), integer(4)]),
        };
        assert!(ChiPath::new(vec![p]).is_ok());
        let down = vec![
            Piece { a: integer(0), b: rational(1, 2), poly: Poly::constant(rational(3, 4)) },
            Piece { a: rational(1, 2), b: integer(1), poly: Poly::constant(rational(1, 4)) },
        ];
        assert!(ChiPath::new(down).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let s = Scalar::var("s");
        let one_minus_s = &Scalar::one() - &s;
        let v = s_ordered_value(2, 1, &s);
        let mut expected = OperatorPolynomial::word(&[cd(), c(), c()]);
        expected.add_term(vec![c()], one_minus_s.clone());
        assert_eq!(v, expected);
        assert_eq!(s_ordered_value(3, 2, &Scalar::one()), OperatorPolynomial::word(&[cd(), cd(), c(), c(), c()]));
    }

    #[test]
    fn weyl_path_weights() {
        let w = scheme_weights(&ChiPath::identity(), 2, 1).unwrap();
        assert_eq!(w.entries.len(), 3);
        for e in &w.entries {
            assert_eq!(e.weight, rational(1, 3));
        }
        assert!(verify_scheme(&ChiPath::identity(), 2, 1).unwrap().passed());
        assert!(verify_scheme(&ChiPath::identity(), 0, 0).unwrap().passed());
    }

    #[test]
    fn power_path_weights() {
        for k in 1..5usize {
            let kr = integer(k as i64);
            let s = s_of_chi(&ChiPath::power(k));
            let w = scheme_weights(&ChiPath::power(k), 2, 1).unwrap();
            let three_minus_s = integer(3) - &s;
            let w1 = w.weight_of(&[cd(), c(), c()]).unwrap();
            let w2 = w.weight_of(&[c(), cd(), c()]).unwrap();
            let w3 = w.weight_of(&[c(), c(), cd()]).unwrap();
            assert_eq!(w1, &(&kr / (&kr + integer(2))));
            assert_eq!(w1, &((integer(1) + &s) / &three_minus_s));
            assert_eq!(w2, &((integer(1) - &s * &s) / &three_minus_s));
            assert_eq!(w3, &((integer(1) - &s) * (integer(1) - &s) / &three_minus_s));
            assert_eq!(w2 + w3 * integer(2), integer(1) - &s);
        }
    }

    #[test]
    fn one_one_weights() {
        let chi = ChiPath::power(3);
        let s = s_of_chi(&chi);
        let w = scheme_weights(&chi, 1, 1).unwrap();
        assert_eq!(w.weight_of(&[cd(), c()]).unwrap(), &((integer(1) + &s) / integer(2)));
        assert_eq!(w.weight_of(&[c(), cd()]).unwrap(), &((integer(1) - &s) / integer(2)));
    }

    #[test]
    fn endpoints_via_jumps() {
        let normal = ChiPath::jump_at(integer(1)).unwrap();
        let w = scheme_weights(&normal, 2, 2).unwrap();
        assert_eq!(w.weight_of(&[cd(), cd(), c(), c()]).unwrap(), &integer(1));
        let anti = ChiPath::jump_at(integer(0)).unwrap();
        let w = scheme_weights(&anti, 2, 2).unwrap();
        assert_eq!(w.weight_of(&[c(), c(), cd(), cd()]).unwrap(), &integer(1));
        assert!(verify_scheme(&anti, 2, 2).unwrap().passed());
    }

    #[test]
    fn size_bound() {
        assert!(matches!(scheme_weights(&ChiPath::identity(), 5, 4), Err(Error::Size { got: 9, bound: 8 })));
    }

    #[test]
    fn contraction_from_path() {
        let (l, lc) = (Scalar::var("l"), Scalar::var("lc"));
        assert!(path_contraction(&ChiPath::identity(), &l, &lc).unwrap().is_zero());
        assert_eq!(
            path_contraction(&ChiPath::power(2), &l, &lc).unwrap(),
            (&l * &lc).scale_rational(&rational(-1, 6))
        );
        assert_eq!(
            path_contraction(&ChiPath::jump_at(integer(1)).unwrap(), &l, &lc).unwrap(),
            (&l * &lc).scale_rational(&rational(-1, 2))
        );
    }

    #[test]
    fn anti_normal_endpoint_of_closed_form() {
        let v = s_ordered_value(2, 3, &Scalar::from_int(-1));
        let direct = OperatorPolynomial::word(&[c(), c(), cd(), cd(), cd()]).normal_form(Basis::Ladder);
        assert_eq!(v, direct);
    }
}

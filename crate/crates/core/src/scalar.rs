//! Exact commutative coefficients.
//!
//! A [`Scalar`] is a polynomial in named commuting indeterminates whose
//! coefficients are Gaussian rationals, extended by an adjoined `sqrt(2)`.
//! Every monomial carries at most one power of `sqrt(2)`; even powers are
//! folded into the rational coefficient, so the representation is canonical
//! and equality is structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Formats a rational as `n` or `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact complex rational `re + i im`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Gauss {
    pub re: Rational,
    pub im: Rational,
}

impl Gauss {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gauss { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::real(integer(n))
    }

    pub fn i() -> Self {
        Gauss { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Gauss::default()
    }

    pub fn one() -> Self {
        Gauss::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Gauss { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Gauss { re: &self.re * r, im: &self.im * r }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn mul_ref(&self, rhs: &Gauss) -> Gauss {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Gauss::real(&self.re * &rhs.re);
        }
        Gauss {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Add<&Gauss> for &Gauss {
    type Output = Gauss;
    fn add(self, rhs: &Gauss) -> Gauss {
        Gauss { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&Gauss> for &Gauss {
    type Output = Gauss;
    fn sub(self, rhs: &Gauss) -> Gauss {
        Gauss { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&Gauss> for &Gauss {
    type Output = Gauss;
    fn mul(self, rhs: &Gauss) -> Gauss {
        self.mul_ref(rhs)
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Gauss> for Gauss {
    fn add_assign(&mut self, rhs: &Gauss) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}*i", format_rational(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                let mag = self.im.abs();
                if mag.is_one() {
                    write!(f, "({} {} i)", format_rational(&self.re), sign)
                } else {
                    write!(f, "({} {} {}*i)", format_rational(&self.re), sign, format_rational(&mag))
                }
            }
        }
    }
}

/// A named commuting indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Product of indeterminate powers times an optional `sqrt(2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    powers: Vec<(Symbol, u32)>,
    root2: bool,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(sym: Symbol, power: u32) -> Self {
        if power == 0 {
            return Monomial::one();
        }
        Monomial { powers: vec![(sym, power)], root2: false }
    }

    pub fn root2() -> Self {
        Monomial { powers: Vec::new(), root2: true }
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut map: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, e) in powers {
            *map.entry(s).or_insert(0) += e;
        }
        Monomial { powers: map.into_iter().filter(|(_, e)| *e > 0).collect(), root2: false }
    }

    pub fn powers(&self) -> &[(Symbol, u32)] {
        &self.powers
    }

    pub fn has_root2(&self) -> bool {
        self.root2
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && !self.root2
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|(_, e)| e).sum()
    }

    pub fn power_of(&self, sym: &Symbol) -> u32 {
        self.powers.iter().find(|(s, _)| s == sym).map_or(0, |(_, e)| *e)
    }

    /// Product; the boolean reports whether two `sqrt(2)` factors merged into 2.
    fn mul(&self, rhs: &Monomial) -> (Monomial, bool) {
        let mut powers = Vec::with_capacity(self.powers.len() + rhs.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() && j < rhs.powers.len() {
            let (a, ea) = &self.powers[i];
            let (b, eb) = &rhs.powers[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    powers.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    powers.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    powers.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        powers.extend_from_slice(&self.powers[i..]);
        powers.extend_from_slice(&rhs.powers[j..]);
        let both = self.root2 && rhs.root2;
        (Monomial { powers, root2: self.root2 ^ rhs.root2 }, both)
    }

    fn display_factors(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.root2 {
            out.push("sqrt2".to_string());
        }
        for (s, e) in &self.powers {
            if *e == 1 {
                out.push(s.to_string());
            } else {
                out.push(format!("{s}^{e}"));
            }
        }
        out
    }
}

/// Exact polynomial coefficient; see the module docs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Gauss>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_gauss(Gauss::one())
    }

    pub fn i() -> Self {
        Scalar::from_gauss(Gauss::i())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_gauss(Gauss::from_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::from_gauss(Gauss::real(r))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(rational(n, d))
    }

    pub fn from_gauss(g: Gauss) -> Self {
        Scalar::monomial(Monomial::one(), g)
    }

    pub fn monomial(m: Monomial, g: Gauss) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(m, g);
        }
        Scalar { terms }
    }

    pub fn var(name: &str) -> Self {
        Scalar::monomial(Monomial::var(Symbol::new(name), 1), Gauss::one())
    }

    pub fn symbol(sym: &Symbol) -> Self {
        Scalar::monomial(Monomial::var(sym.clone(), 1), Gauss::one())
    }

    /// `sqrt(2)`.
    pub fn root2() -> Self {
        Scalar::monomial(Monomial::root2(), Gauss::one())
    }

    /// `1/sqrt(2) = sqrt(2)/2`.
    pub fn inv_root2() -> Self {
        Scalar::monomial(Monomial::root2(), Gauss::real(rational(1, 2)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().is_some_and(|(m, g)| m.is_one() && g.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no indeterminates occur (a `sqrt(2)` factor is allowed).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.powers.is_empty())
    }

    /// The value as a Gaussian rational, if the scalar is one.
    pub fn as_gauss(&self) -> Option<Gauss> {
        match self.terms.len() {
            0 => Some(Gauss::zero()),
            1 => {
                let (m, g) = self.terms.iter().next()?;
                m.is_one().then(|| g.clone())
            }
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_gauss().filter(Gauss::is_real).map(|g| g.re)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.powers.iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Gauss {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn insert_term(&mut self, m: Monomial, g: Gauss) {
        if g.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(g);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &g;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, g: &Gauss) -> Scalar {
        if g.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * g)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> Scalar {
        self.scale(&Gauss::real(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn conj_coefficients(&self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(m, g)| (m.clone(), g.conj())).collect() }
    }

    /// Substitutes every bound indeterminate; the result is a ring
    /// homomorphism image of `self`.
    pub fn substitute(&self, bindings: &Bindings) -> Scalar {
        let mut out = Scalar::zero();
        for (m, g) in &self.terms {
            let mut term = Scalar::monomial(
                if m.root2 { Monomial::root2() } else { Monomial::one() },
                g.clone(),
            );
            for (s, e) in &m.powers {
                let factor = match bindings.get(s) {
                    Some(v) => v.pow(*e),
                    None => Scalar::monomial(Monomial::var(s.clone(), *e), Gauss::one()),
                };
                term = &term * &factor;
            }
            out += &term;
        }
        out
    }

    /// Multiplicative inverse of a constant `a + b sqrt(2)`.
    pub fn inverse_constant(&self) -> Option<Scalar> {
        if !self.is_constant() || self.is_zero() {
            return None;
        }
        let a = self.coefficient(&Monomial::one());
        let b = self.coefficient(&Monomial::root2());
        // (a + b r)(a - b r) = a^2 - 2 b^2
        let norm = &(&a * &a) - &(&b * &b).scale(&integer(2));
        let inv = norm.inv()?;
        let conj = Scalar::from_gauss(a) - Scalar::monomial(Monomial::root2(), b);
        Some(conj.scale(&inv))
    }

    /// Numeric value of a constant scalar.
    pub fn to_complex(&self) -> Option<Complex64> {
        if !self.is_constant() {
            return None;
        }
        let r2 = std::f64::consts::SQRT_2;
        Some(self.terms.iter().fold(Complex64::zero(), |acc, (m, g)| {
            acc + g.to_complex() * if m.root2 { r2 } else { 1.0 }
        }))
    }

    /// Splits off the part whose monomials have the given exponents in `syms`,
    /// returning it with those powers removed.
    pub fn coefficient_of_powers(&self, syms: &[(Symbol, u32)]) -> Scalar {
        let mut out = Scalar::zero();
        'terms: for (m, g) in &self.terms {
            for (s, e) in syms {
                if m.power_of(s) != *e {
                    continue 'terms;
                }
            }
            let rest = Monomial {
                powers: m
                    .powers
                    .iter()
                    .filter(|(s, _)| !syms.iter().any(|(t, _)| t == s))
                    .cloned()
                    .collect(),
                root2: m.root2,
            };
            out.insert_term(rest, g.clone());
        }
        out
    }

    /// Total degree in the given symbols of the lowest-degree term, if any.
    pub fn min_degree_in(&self, syms: &[Symbol]) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| syms.iter().map(|s| m.power_of(s)).sum())
            .min()
    }

    /// Numeric evaluation after binding every indeterminate to a complex value.
    pub fn eval(&self, values: &BTreeMap<Symbol, Complex64>) -> Option<Complex64> {
        let r2 = std::f64::consts::SQRT_2;
        let mut acc = Complex64::zero();
        for (m, g) in &self.terms {
            let mut t = g.to_complex();
            if m.root2 {
                t *= r2;
            }
            for (s, e) in &m.powers {
                t *= values.get(s)?.powu(*e);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Terms sorted for display: descending total degree, then by symbol names.
    fn display_order(&self) -> Vec<(&Monomial, &Gauss)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            b.degree()
                .cmp(&a.degree())
                .then_with(|| b.powers.cmp(&a.powers))
                .then_with(|| a.root2.cmp(&b.root2))
        });
        terms
    }

    /// True when a leading minus would be printed.
    pub fn leads_negative(&self) -> bool {
        self.display_order().first().is_some_and(|(_, g)| {
            if g.re.is_zero() {
                g.im.is_negative()
            } else {
                g.im.is_zero() && g.re.is_negative()
            }
        })
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, m: &Monomial, g: &Gauss, first: bool) -> fmt::Result {
    let factors = m.display_factors();
    // pull a sign out of purely real or purely imaginary coefficients
    let (negative, mag) = if g.im.is_zero() && g.re.is_negative() {
        (true, Gauss::real(-g.re.clone()))
    } else if g.re.is_zero() && g.im.is_negative() {
        (true, Gauss::new(Rational::zero(), -g.im.clone()))
    } else {
        (false, g.clone())
    };
    if first {
        if negative {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if negative { " - " } else { " + " })?;
    }
    if factors.is_empty() {
        return write!(f, "{mag}");
    }
    if !mag.is_one() {
        write!(f, "{mag}*")?;
    }
    f.write_str(&factors.join("*"))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, g)) in self.display_order().into_iter().enumerate() {
            write_term(f, m, g, k == 0)?;
        }
        Ok(())
    }
}

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &'a Scalar) {
        for (m, g) in &rhs.terms {
            self.insert_term(m.clone(), g.clone());
        }
    }
}

impl<'a> SubAssign<&'a Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &'a Scalar) {
        for (m, g) in &rhs.terms {
            self.insert_term(m.clone(), -g.clone());
        }
    }
}

impl<'a> MulAssign<&'a Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &'a Scalar) {
        *self = &*self * rhs;
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ma, ga) in &self.terms {
            for (mb, gb) in &rhs.terms {
                let (m, merged) = ma.mul(mb);
                let mut g = ga * gb;
                if merged {
                    g = g.scale(&integer(2));
                }
                out.insert_term(m, g);
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(m, g)| (m.clone(), -g.clone())).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<Gauss> for Scalar {
    fn from(g: Gauss) -> Self {
        Scalar::from_gauss(g)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, s| {
            acc += &s;
            acc
        })
    }
}

/// The set of indeterminates a computation has declared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Indeterminates {
    names: BTreeSet<Symbol>,
}

impl Indeterminates {
    pub fn new<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        Indeterminates { names: names.into_iter().map(Symbol::new).collect() }
    }

    /// `s`, `mu`, `l`, `lc`, `z`, `zc`, `k`.
    pub fn standard() -> Self {
        Indeterminates::new(["s", "mu", "l", "lc", "z", "zc", "k"])
    }

    pub fn declare(&mut self, name: &str) -> Symbol {
        let s = Symbol::new(name);
        self.names.insert(s.clone());
        s
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(&Symbol::new(name))
    }

    pub fn extend_from(&mut self, s: &Scalar) {
        self.names.extend(s.symbols());
    }
}

/// Values bound to declared indeterminates.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    values: BTreeMap<Symbol, Scalar>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn bind(mut self, declared: &Indeterminates, name: &str, value: Scalar) -> Result<Self> {
        if !declared.contains(name) {
            return Err(Error::UndeclaredIndeterminate(name.to_string()));
        }
        self.values.insert(Symbol::new(name), value);
        Ok(self)
    }

    pub fn get(&self, sym: &Symbol) -> Option<&Scalar> {
        self.values.get(sym)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

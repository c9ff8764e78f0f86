//! Evaluation of parsed expressions to operator polynomials.

use wick_core::algebra::{Basis, Gen, Kind, LinearCombination, OperatorPolynomial};
use wick_core::gwt::OrderingSpec;
use wick_core::orderings::{weyl_scheme, Builtin};
use wick_core::scalar::{Gauss, Rational, Scalar};
use wick_core::sorder::s_ordered_value;
use wick_core::Error;

use crate::parse::{Expr, OrderName};

/// Largest generator index and whether any generator is unindexed.
fn scan(e: &Expr, max: &mut u16, bare: &mut bool) {
    match e {
        Expr::Gen { index: Some(k), .. } => *max = (*max).max(*k),
        Expr::Gen { index: None, .. } => *bare = true,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            scan(a, max, bare);
            scan(b, max, bare);
        }
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Ordered(_, a) => scan(a, max, bare),
        _ => {}
    }
}

/// Number of modes: the explicit value, or the largest index used.
/// Unindexed generators are only allowed with a single mode.
pub fn mode_count(e: &Expr, explicit: Option<usize>) -> Result<usize, String> {
    let (mut max, mut bare) = (0u16, false);
    scan(e, &mut max, &mut bare);
    let n = explicit.unwrap_or((max as usize).max(1));
    if (max as usize) > n {
        return Err(format!("bad index: generator index {max} exceeds the mode count {n}"));
    }
    if bare && n > 1 {
        return Err(format!("bad index: generators need an index when there are {n} modes"));
    }
    Ok(n)
}

pub fn scalar_of(e: &Expr) -> Option<Scalar> {
    match e {
        Expr::Num(r) => Some(Scalar::from_rational(r.clone())),
        Expr::Imag(r) => Some(Scalar::from_gauss(Gauss::new(Rational::from_integer(0.into()), r.clone()))),
        Expr::Root2 => Some(Scalar::root2()),
        Expr::Sym(s) => Some(Scalar::var(s)),
        _ => None,
    }
}

pub fn eval(e: &Expr) -> Result<OperatorPolynomial, Error> {
    if let Some(s) = scalar_of(e) {
        return Ok(OperatorPolynomial::scalar(s));
    }
    Ok(match e {
        Expr::Gen { kind, index } => {
            OperatorPolynomial::generator(Gen { mode: index.map_or(0, |k| k - 1), kind: *kind })
        }
        Expr::Add(a, b) => eval(a)? + eval(b)?,
        Expr::Sub(a, b) => eval(a)? - eval(b)?,
        Expr::Mul(a, b) => eval(a)? * eval(b)?,
        Expr::Neg(a) => -&eval(a)?,
        Expr::Pow(a, k) => eval(a)?.pow(*k),
        Expr::Ordered(name, body) => apply_ordering(name, &eval(body)?)?,
        _ => unreachable!(),
    })
}

/// Basis in which results are reported: ladder as soon as a ladder
/// generator appears.
pub fn natural_basis(p: &OperatorPolynomial) -> Basis {
    if p.uses_basis(Basis::Ladder) {
        Basis::Ladder
    } else {
        Basis::Qp
    }
}

fn with_mode(p: &OperatorPolynomial, mode: u16) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero();
    for (w, c) in p.terms() {
        out.add_term(w.iter().map(|g| Gen { mode, kind: g.kind }).collect(), c.clone());
    }
    out
}

/// Applies an ordering to `body`, read as a polynomial in commuting symbols.
pub fn apply_ordering(name: &OrderName, body: &OperatorPolynomial) -> Result<OperatorPolynomial, Error> {
    let builtin = match name {
        OrderName::Normal => Some(Builtin::Normal),
        OrderName::Antinormal => Some(Builtin::Antinormal),
        OrderName::Qp => Some(Builtin::Qp),
        OrderName::Pq => Some(Builtin::Pq),
        _ => None,
    };
    if let Some(b) = builtin {
        return Ok(b.order_polynomial(body).normal_form(b.basis()));
    }
    match name {
        OrderName::Weyl => {
            let basis = natural_basis(body);
            let mut out = OperatorPolynomial::zero();
            for (w, c) in body.to_basis(basis).terms() {
                let factors = w.iter().map(|g| OperatorPolynomial::generator(*g)).collect();
                out = out + weyl_scheme(factors).apply().scale(c);
            }
            Ok(out.normal_form(basis))
        }
        OrderName::S(s) => {
            let s = Scalar::from_rational(s.clone());
            let mut out = OperatorPolynomial::zero();
            for (w, c) in body.to_basis(Basis::Ladder).terms() {
                let modes = w.iter().map(|g| g.mode).max().map_or(0, |m| m + 1);
                let mut term = OperatorPolynomial::scalar(c.clone());
                for mode in 0..modes {
                    let n = w.iter().filter(|g| g.mode == mode && g.kind == Kind::C).count() as u32;
                    let m = w.iter().filter(|g| g.mode == mode && g.kind == Kind::Cd).count() as u32;
                    term = term * with_mode(&s_ordered_value(n, m, &s), mode);
                }
                out = out + term;
            }
            Ok(out.normal_form(Basis::Ladder))
        }
        _ => unreachable!(),
    }
}

/// Reads a homogeneous linear expression `X`.
pub fn linear(e: &Expr, n_modes: usize) -> Result<LinearCombination, Error> {
    LinearCombination::from_polynomial(&eval(e)?, n_modes)
}

/// Ordering applied to the exponential of `x`.
pub fn ordering_spec(name: &OrderName, x: &LinearCombination) -> Result<OrderingSpec, Error> {
    let builtin = match name {
        OrderName::Normal => Builtin::Normal,
        OrderName::Antinormal => Builtin::Antinormal,
        OrderName::Qp => Builtin::Qp,
        OrderName::Pq => Builtin::Pq,
        OrderName::Weyl => return Ok(OrderingSpec::weyl(x.clone())),
        OrderName::S(s) => return Ok(OrderingSpec::s_ordered(x.clone(), Scalar::from_rational(s.clone()))),
    };
    OrderingSpec::over(builtin.collection(x.n_modes())?, x)
}

//! General contraction between two orderings of `exp(X)` and the exact
//! degree-by-degree check of `O1 e^X = e^C O2 e^X`.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};

use crate::algebra::{Basis, Gen, LinearCombination, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::orderings::{decompose, ordered_exp_components, Decomposition, OrderedCollection, Policy};
use crate::scalar::{factorial, Rational, Scalar};

/// An ordering of `exp(X)` for a fixed `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderingSpec {
    /// Product of per-label exponentials in label order.
    Monomial { collection: OrderedCollection, decomposition: Decomposition },
    /// `exp(log_prefactor) * exp(X)`, where `log_prefactor` is quadratic in
    /// the coefficients of `X`. Weyl ordering has `log_prefactor = 0`.
    Characteristic { x: LinearCombination, log_prefactor: Scalar },
}

impl OrderingSpec {
    pub fn monomial(collection: OrderedCollection, decomposition: Decomposition) -> Self {
        OrderingSpec::Monomial { collection, decomposition }
    }

    /// Decomposes `x` over `collection`, splitting equal operators evenly.
    pub fn over(collection: OrderedCollection, x: &LinearCombination) -> Result<Self> {
        let decomposition = decompose(x, &collection, Policy::CollapseDuplicates)?;
        Ok(OrderingSpec::Monomial { collection, decomposition })
    }

    pub fn weyl(x: LinearCombination) -> Self {
        OrderingSpec::Characteristic { x, log_prefactor: Scalar::zero() }
    }

    /// s-ordering: prefactor `exp(-s/2 * sum_k b_k a_k)` for
    /// `X = sum_k (a_k c_k + b_k cd_k)`.
    pub fn s_ordered(x: LinearCombination, s: Scalar) -> Self {
        let lad = x.to_basis(Basis::Ladder);
        let n = lad.n_modes();
        let sum: Scalar = (0..n).map(|k| &lad.coeffs()[k] * &lad.coeffs()[n + k]).sum();
        let log_prefactor = &(&s * &sum) * &Scalar::ratio(-1, 2);
        OrderingSpec::Characteristic { x, log_prefactor }
    }

    /// The operator whose exponential is being ordered.
    pub fn operator(&self) -> LinearCombination {
        match self {
            OrderingSpec::Monomial { collection, decomposition } => decomposition.operator(collection),
            OrderingSpec::Characteristic { x, .. } => x.clone(),
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            OrderingSpec::Monomial { collection, .. } => collection.basis(),
            OrderingSpec::Characteristic { x, .. } => x.basis(),
        }
    }

    /// Word-degree components `E_0..=E_k` of the ordered exponential, in
    /// normal form for `basis`.
    pub fn components(&self, k: usize, basis: Basis) -> Result<Vec<OperatorPolynomial>> {
        let parts = match self {
            OrderingSpec::Monomial { collection, decomposition } => {
                ordered_exp_components(collection, decomposition, k)?
            }
            OrderingSpec::Characteristic { x, log_prefactor } => {
                let xp = x.to_basis(basis).to_polynomial();
                let mut powers = vec![OperatorPolynomial::one()];
                for j in 1..=k {
                    let next = powers[j - 1]
                        .normal_product(&xp, basis)
                        .scale(&Scalar::from_rational(Rational::new(1.into(), (j as i64).into())));
                    powers.push(next);
                }
                scale_by_exp(&powers, log_prefactor, basis)
            }
        };
        Ok(parts.iter().map(|p| p.normal_form(basis)).collect())
    }

    /// `1/2 sum_{alpha left of beta} lambda_alpha lambda_beta [A_alpha, A_beta]`,
    /// the contraction of this ordering against Weyl ordering.
    pub fn weyl_contraction(&self) -> Result<Scalar> {
        match self {
            OrderingSpec::Characteristic { log_prefactor, .. } => Ok(log_prefactor.clone()),
            OrderingSpec::Monomial { collection, decomposition } => {
                let active: Vec<usize> =
                    (0..collection.len()).filter(|&i| !decomposition.get(i).is_zero()).collect();
                let order = collection.arrange(&active)?;
                let labels = collection.labels();
                let mut sum = Scalar::zero();
                for (i, &a) in order.iter().enumerate() {
                    for &b in &order[i + 1..] {
                        let c = labels[a].op.commutator(&labels[b].op)?;
                        if !c.is_zero() {
                            sum += &(&(decomposition.get(a) * decomposition.get(b)) * &c);
                        }
                    }
                }
                Ok(&sum * &Scalar::ratio(1, 2))
            }
        }
    }
}

/// Components of `exp(c) * sum_j parts[j]` with `c` counted as degree 2.
fn scale_by_exp(parts: &[OperatorPolynomial], c: &Scalar, basis: Basis) -> Vec<OperatorPolynomial> {
    let k = parts.len() - 1;
    (0..=k)
        .map(|j| {
            let mut acc = OperatorPolynomial::zero();
            for i in 0..=j / 2 {
                let coef = c.pow(i as u32).scale_rational(&Rational::new(1.into(), factorial(i as u32)));
                if coef.is_zero() {
                    continue;
                }
                acc = &acc + &parts[j - 2 * i].scale(&coef);
            }
            acc.normal_form(basis)
        })
        .collect()
}

fn check_same_operator(o1: &OrderingSpec, o2: &OrderingSpec) -> Result<()> {
    if o1.operator().same_operator(&o2.operator()) {
        Ok(())
    } else {
        Err(Error::Mismatch)
    }
}

/// `C = E1_2 - E2_2 = 1/2 (O1 - O2) X^2`, which must be a c-number.
pub fn general_contraction(o1: &OrderingSpec, o2: &OrderingSpec) -> Result<Scalar> {
    check_same_operator(o1, o2)?;
    let basis = o1.basis();
    let e1 = o1.components(2, basis)?;
    let e2 = o2.components(2, basis)?;
    let diff = (&e1[2] - &e2[2]).normal_form(basis);
    let c = diff
        .as_scalar()
        .ok_or_else(|| Error::Internal(format!("contraction has an operator part: {diff}")))?;
    let bilinear = &o1.weyl_contraction()? - &o2.weyl_contraction()?;
    if bilinear != c {
        return Err(Error::Internal(format!(
            "ordered-square difference {c} disagrees with the bilinear sum {bilinear}"
        )));
    }
    Ok(c)
}

/// `C_ab = O1(A_a A_b) - O2(A_a A_b)` for `a != b`, zero on the diagonal, so
/// that `C = 1/2 sum_ab C_ab lambda_a lambda_b`.
pub fn contraction_matrix(o1: &OrderedCollection, o2: &OrderedCollection) -> Result<Vec<Vec<Scalar>>> {
    if o1.len() != o2.len() {
        return Err(Error::LabelMismatch(format!("{} vs {} labels", o1.len(), o2.len())));
    }
    // label j of o2 matching label i of o1
    let mut map = Vec::with_capacity(o1.len());
    for l in o1.labels() {
        let j = o2
            .index_of(&l.name)
            .ok_or_else(|| Error::LabelMismatch(format!("`{}` missing from the second ordering", l.name)))?;
        if !o2.labels()[j].op.same_operator(&l.op) {
            return Err(Error::LabelMismatch(format!("`{}` carries different operators", l.name)));
        }
        map.push(j);
    }
    let basis = o1.basis();
    let n = o1.len();
    let mut out = vec![vec![Scalar::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let first = o1.apply_monomial(&[a, b])?;
            let second = o2.apply_monomial(&[map[a], map[b]])?;
            let d = (&first - &second).normal_form(basis);
            out[a][b] = d
                .as_scalar()
                .ok_or_else(|| Error::Internal(format!("pair contraction has an operator part: {d}")))?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeStatus {
    pub degree: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionReport {
    pub contraction: Scalar,
    pub degrees: Vec<DegreeStatus>,
    pub max_degree: usize,
}

impl ContractionReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.degrees.iter().find(|d| !d.pass).map(|d| d.degree)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Checks `O1 e^X = e^C O2 e^X` for every word degree up to `k`.
pub fn gwt_verify(o1: &OrderingSpec, o2: &OrderingSpec, k: usize) -> Result<ContractionReport> {
    if k < 1 {
        return Err(Error::Argument("verification degree must be at least 1".into()));
    }
    let c = general_contraction(o1, o2)?;
    let basis = o1.basis();
    let e1 = o1.components(k, basis)?;
    let e2 = o2.components(k, basis)?;
    let rhs = scale_by_exp(&e2, &c, basis);
    let degrees = e1
        .iter()
        .zip(&rhs)
        .enumerate()
        .map(|(degree, (l, r))| DegreeStatus { degree, pass: l == r })
        .collect();
    Ok(ContractionReport { contraction: c, degrees, max_degree: k })
}

/// Result of replaying the transposition sequence between two orderings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapReplay {
    /// Accumulated exponent `sum eps^2 [x_l, x_k]`.
    pub exponent: Scalar,
    /// Number of adjacent transpositions performed.
    pub swaps: usize,
}

/// Builds the refined factor string of `e^{eps x_k}` factors for each
/// ordering and transforms one into the other by adjacent transpositions.
///
/// Within a label, the factors of different generators are interleaved
/// evenly. Both a bubble-sort and an insertion-sort sequence are replayed;
/// they must accumulate the same exponent.
pub fn swap_replay(
    from: &OrderedCollection,
    to: &OrderedCollection,
    x: &LinearCombination,
    eps: &Rational,
) -> Result<SwapReplay> {
    if !eps.is_positive() {
        return Err(Error::Argument("step must be positive".into()));
    }
    let d = decompose(x, from, Policy::CollapseDuplicates)?;
    // labels of `to` in the order of `from`
    let mut map = Vec::with_capacity(from.len());
    for l in from.labels() {
        let j = to
            .index_of(&l.name)
            .filter(|&j| to.labels()[j].op.same_operator(&l.op))
            .ok_or_else(|| Error::LabelMismatch(format!("`{}` differs between the orderings", l.name)))?;
        map.push(j);
    }
    if to.len() != from.len() {
        return Err(Error::LabelMismatch(format!("{} vs {} labels", from.len(), to.len())));
    }
    let basis = from.basis();
    // per label: the token string of generators
    let mut blocks: Vec<Vec<Gen>> = Vec::with_capacity(from.len());
    for (i, l) in from.labels().iter().enumerate() {
        let op = l.op.to_basis(basis).scale(d.get(i));
        let mut slots: Vec<(Rational, Gen)> = Vec::new();
        for (idx, c) in op.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c
                .as_rational()
                .filter(|r| !r.is_negative())
                .ok_or_else(|| Error::Restriction(format!("coefficient {c} of `{}`", l.name)))?;
            let count = (a / eps).floor().to_integer().to_usize().unwrap_or(0);
            let g = op.gen_at(idx);
            for j in 0..count {
                // midpoint of the j-th of `count` equal cells
                let pos = Rational::new((2 * j + 1).into(), (2 * count).into());
                slots.push((pos, g));
            }
        }
        slots.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        blocks.push(slots.into_iter().map(|(_, g)| g).collect());
    }
    let active: Vec<usize> = (0..from.len()).filter(|&i| !blocks[i].is_empty()).collect();
    let from_order = from.arrange(&active)?;
    let to_order = to.arrange(&active.iter().map(|&i| map[i]).collect::<Vec<_>>())?;
    // rank of each `from` label in the target string
    let mut rank = vec![0usize; from.len()];
    for (r, &j) in to_order.iter().enumerate() {
        let i = map.iter().position(|&m| m == j).expect("label present");
        rank[i] = r;
    }
    // tokens: (target key, generator), in source order
    let mut tokens: Vec<((usize, usize), Gen)> = Vec::new();
    for &i in &from_order {
        for (j, &g) in blocks[i].iter().enumerate() {
            tokens.push(((rank[i], j), g));
        }
    }
    let eps2 = Scalar::from_rational(eps * eps);
    let (bubble, swaps) = replay(tokens.clone(), bubble_sort);
    let (insertion, swaps2) = replay(tokens, insertion_sort);
    if bubble != insertion || swaps != swaps2 {
        return Err(Error::Internal("transposition strategies disagree".into()));
    }
    let mut exponent = Scalar::zero();
    for ((left, right), count) in bubble {
        let l = LinearCombination::generator(from.n_modes(), left)?;
        let r = LinearCombination::generator(from.n_modes(), right)?;
        // the new left factor is the old right one
        let c = r.commutator(&l)?;
        exponent += &(&c * &Scalar::from_int(count as i64));
    }
    Ok(SwapReplay { exponent: &exponent * &eps2, swaps })
}

type Token = ((usize, usize), Gen);
type SwapCounts = HashMap<(Gen, Gen), usize>;
type SwapCount = ((Gen, Gen), usize);

fn replay(mut tokens: Vec<Token>, sorter: impl Fn(&mut [Token]) -> Vec<(Gen, Gen)>) -> (Vec<SwapCount>, usize) {
    let swaps = sorter(&mut tokens);
    let total = swaps.len();
    let mut counts: SwapCounts = HashMap::new();
    for s in swaps {
        *counts.entry(s).or_default() += 1;
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort();
    (out, total)
}

/// Records `(old left, old right)` generators of every adjacent swap.
fn bubble_sort(t: &mut [Token]) -> Vec<(Gen, Gen)> {
    let mut swaps = Vec::new();
    let n = t.len();
    for pass in 0..n {
        let mut changed = false;
        for i in 0..n.saturating_sub(1 + pass) {
            if t[i].0 > t[i + 1].0 {
                swaps.push((t[i].1, t[i + 1].1));
                t.swap(i, i + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    swaps
}

fn insertion_sort(t: &mut [Token]) -> Vec<(Gen, Gen)> {
    let mut swaps = Vec::new();
    for i in 1..t.len() {
        let mut j = i;
        while j > 0 && t[j - 1].0 > t[j].0 {
            swaps.push((t[j - 1].1, t[j].1));
            t.swap(j - 1, j);
            j -= 1;
        }
    }
    swaps
}

/// `|a - b|` for numeric scalars, used by convergence checks.
pub fn numeric_distance(a: &Scalar, b: &Scalar) -> Option<f64> {
    Some((a.to_complex()? - b.to_complex()?).norm())
}

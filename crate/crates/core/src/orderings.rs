//! Monomial orderings, weighted schemes and decompositions over labeled
//! collections of linear operators.
//!
//! A label may carry a rational time. Two timed labels with different times
//! are comparable and the later one is written to the left. Labels that are
//! not comparable must commute, otherwise the ordering is undefined.

use std::collections::BTreeMap;

use crate::algebra::{Basis, Gen, Kind, LinearCombination, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::scalar::{factorial, integer, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub name: String,
    pub time: Option<Rational>,
    pub op: LinearCombination,
}

impl Label {
    pub fn new(name: &str, time: Option<Rational>, op: LinearCombination) -> Self {
        Label { name: name.to_string(), time, op }
    }

    pub fn timed(name: &str, time: Rational, op: LinearCombination) -> Self {
        Label::new(name, Some(time), op)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedCollection {
    n_modes: usize,
    labels: Vec<Label>,
}

impl OrderedCollection {
    pub fn new(n_modes: usize, labels: Vec<Label>) -> Result<Self> {
        for l in &labels {
            if l.op.n_modes() != n_modes {
                return Err(Error::Dimension { expected: n_modes, found: l.op.n_modes() });
            }
        }
        let coll = OrderedCollection { n_modes, labels };
        for a in 0..coll.labels.len() {
            for b in a + 1..coll.labels.len() {
                coll.check_pair(a, b)?;
            }
        }
        Ok(coll)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    /// Basis used for products: that of the first label.
    pub fn basis(&self) -> Basis {
        self.labels.first().map_or(Basis::Qp, |l| l.op.basis())
    }

    /// `Some(true)` when label `a` is later than `b`, `None` when unordered.
    pub fn later(&self, a: usize, b: usize) -> Option<bool> {
        match (&self.labels[a].time, &self.labels[b].time) {
            (Some(ta), Some(tb)) if ta != tb => Some(ta > tb),
            _ => None,
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if self.later(a, b).is_some() {
            return Ok(());
        }
        let c = self.labels[a].op.commutator(&self.labels[b].op)?;
        if c.is_zero() {
            Ok(())
        } else {
            Err(Error::OrderingUndefined(self.labels[a].name.clone(), self.labels[b].name.clone()))
        }
    }

    /// Arranges label indices left to right, later labels leftmost.
    pub fn arrange(&self, factors: &[usize]) -> Result<Vec<usize>> {
        for &f in factors {
            if f >= self.labels.len() {
                return Err(Error::Argument(format!("label index {f} out of range")));
            }
        }
        for (i, &a) in factors.iter().enumerate() {
            for &b in &factors[i + 1..] {
                if a != b {
                    self.check_pair(a, b)?;
                }
            }
        }
        // unordered labels commute with everything they meet, so any
        // linear extension gives the same operator
        let mut out = factors.to_vec();
        out.sort_by(|&a, &b| {
            let ta = &self.labels[a].time;
            let tb = &self.labels[b].time;
            match (ta, tb) {
                (Some(x), Some(y)) => y.cmp(x),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
        });
        Ok(out)
    }

    /// Product of the factor operators in label order (unreduced words).
    pub fn apply_monomial(&self, factors: &[usize]) -> Result<OperatorPolynomial> {
        let order = self.arrange(factors)?;
        Ok(order
            .iter()
            .fold(OperatorPolynomial::one(), |acc, &i| &acc * &self.labels[i].op.to_polynomial()))
    }

    /// Same as [`apply_monomial`](Self::apply_monomial) with factors named.
    pub fn apply_named(&self, names: &[&str]) -> Result<OperatorPolynomial> {
        let idx = names
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::Argument(format!("unknown label `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        self.apply_monomial(&idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Normal,
    Antinormal,
    Qp,
    Pq,
}

impl Builtin {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "normal" | "N" => Ok(Builtin::Normal),
            "antinormal" | "A" => Ok(Builtin::Antinormal),
            "qp" | "QP" => Ok(Builtin::Qp),
            "pq" | "PQ" => Ok(Builtin::Pq),
            _ => Err(Error::Argument(format!("unknown ordering `{name}`"))),
        }
    }

    /// The (later, earlier) generator kinds.
    fn kinds(self) -> (Kind, Kind) {
        match self {
            Builtin::Normal => (Kind::Cd, Kind::C),
            Builtin::Antinormal => (Kind::C, Kind::Cd),
            Builtin::Qp => (Kind::Q, Kind::P),
            Builtin::Pq => (Kind::P, Kind::Q),
        }
    }

    /// Rank of a generator kind when the ordering is applied to a word.
    pub fn rank(self, kind: Kind) -> u8 {
        let (first, _) = self.kinds();
        if kind == first {
            0
        } else {
            1
        }
    }

    pub fn basis(self) -> Basis {
        self.kinds().0.basis()
    }

    /// Two labels per mode named like `cd1`, `c1`.
    pub fn collection(self, n_modes: usize) -> Result<OrderedCollection> {
        let (late, early) = self.kinds();
        let mut labels = Vec::new();
        for m in 0..n_modes {
            for (kind, t) in [(late, 1), (early, 0)] {
                let g = Gen::new(m as u16, kind);
                labels.push(Label::timed(
                    &format!("{}{}", kind.name(), m + 1),
                    integer(t),
                    LinearCombination::generator(n_modes, g)?,
                ));
            }
        }
        OrderedCollection::new(n_modes, labels)
    }

    /// Applies the ordering to each word of `p` as a multiset of generators.
    pub fn order_polynomial(self, p: &OperatorPolynomial) -> OperatorPolynomial {
        p.reorder_factors(self.basis(), |k| self.rank(k))
    }
}

pub fn builtin_ordering(name: &str, n_modes: usize) -> Result<OrderedCollection> {
    Builtin::from_name(name)?.collection(n_modes)
}

/// Coefficients `lambda_alpha`, aligned with the collection's labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    coeffs: Vec<Scalar>,
}

impl Decomposition {
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.coeffs[i]
    }

    /// The represented operator `sum lambda_alpha A_alpha`.
    pub fn operator(&self, coll: &OrderedCollection) -> LinearCombination {
        let mut acc = LinearCombination::zero(coll.n_modes(), coll.basis());
        for (l, c) in coll.labels().iter().zip(&self.coeffs) {
            acc = acc.checked_add(&l.op.scale(c)).expect("collection modes agree");
        }
        acc
    }

    /// Checks user-supplied coefficients against `x`.
    pub fn checked(coll: &OrderedCollection, x: &LinearCombination, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != coll.len() {
            return Err(Error::Argument(format!(
                "{} coefficients for {} labels",
                coeffs.len(),
                coll.len()
            )));
        }
        let d = Decomposition { coeffs };
        if !d.operator(coll).same_operator(x) {
            return Err(Error::Invariant("coefficients do not reproduce the operator".into()));
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    ExactUnique,
    CollapseDuplicates,
    UserSupplied(Vec<Scalar>),
}

/// Row-reduces `matrix * lambda = rhs` over constant entries; the right-hand
/// side may be symbolic. Returns a particular solution with free variables
/// set to zero, plus the number of free variables.
fn solve(mut matrix: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>, cols: usize) -> Result<(Vec<Scalar>, usize)> {
    if matrix.iter().flatten().any(|e| !e.is_constant()) {
        return Err(Error::Unsupported("collection operators with symbolic coefficients".into()));
    }
    let rows = matrix.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !matrix[i][c].is_zero()) else {
            continue;
        };
        matrix.swap(r, p);
        rhs.swap(r, p);
        let inv = matrix[r][c].inverse_constant().ok_or_else(|| Error::Internal("pivot".into()))?;
        for e in matrix[r].iter_mut() {
            *e = &*e * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..rows {
            if i == r || matrix[i][c].is_zero() {
                continue;
            }
            let f = matrix[i][c].clone();
            let pivot_row = matrix[r].clone();
            for (e, pe) in matrix[i].iter_mut().zip(&pivot_row) {
                *e = &*e - &(&f * pe);
            }
            rhs[i] = &rhs[i] - &(&f * &rhs[r]);
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return Err(Error::Span);
    }
    let mut sol = vec![Scalar::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rhs[i].clone();
    }
    Ok((sol, cols - pivots.len()))
}

/// Solves `sum lambda_alpha A_alpha = x` under the given policy.
pub fn decompose(x: &LinearCombination, coll: &OrderedCollection, policy: Policy) -> Result<Decomposition> {
    if x.n_modes() != coll.n_modes() {
        return Err(Error::Dimension { expected: coll.n_modes(), found: x.n_modes() });
    }
    let basis = coll.basis();
    let x = x.to_basis(basis);
    let columns: Vec<Vec<Scalar>> = match &policy {
        Policy::UserSupplied(c) => return Decomposition::checked(coll, &x, c.clone()),
        _ => coll.labels().iter().map(|l| l.op.to_basis(basis).coeffs().to_vec()).collect(),
    };
    // groups of identical operators
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..columns.len() {
        let hit = match policy {
            Policy::CollapseDuplicates => groups.iter_mut().find(|g| columns[g[0]] == columns[i]),
            _ => None,
        };
        match hit {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let rows = 2 * coll.n_modes();
    let matrix: Vec<Vec<Scalar>> =
        (0..rows).map(|r| groups.iter().map(|g| columns[g[0]][r].clone()).collect()).collect();
    let (sol, free) = solve(matrix, x.coeffs().to_vec(), groups.len())?;
    if free > 0 {
        return Err(Error::Ambiguity { free });
    }
    let mut coeffs = vec![Scalar::zero(); coll.len()];
    for (g, v) in groups.iter().zip(sol) {
        let share = v.scale_rational(&Rational::new(1.into(), (g.len() as i64).into()));
        for &i in g {
            coeffs[i] = share.clone();
        }
    }
    Ok(Decomposition { coeffs })
}

/// Degree components `E_0..=E_k` of the ordered exponential, each in normal
/// form; `E_j` collects the words of total degree `j`.
pub fn ordered_exp_components(
    coll: &OrderedCollection,
    d: &Decomposition,
    k: usize,
) -> Result<Vec<OperatorPolynomial>> {
    let basis = coll.basis();
    let active: Vec<usize> = (0..coll.len()).filter(|&i| !d.get(i).is_zero()).collect();
    let order = coll.arrange(&active)?;
    let mut acc = vec![OperatorPolynomial::zero(); k + 1];
    acc[0] = OperatorPolynomial::one();
    for i in order {
        let gen = coll.labels()[i].op.scale(d.get(i)).to_polynomial().normal_form(basis);
        // (lambda A)^j / j!
        let mut series = vec![OperatorPolynomial::one()];
        for j in 1..=k {
            let next = series[j - 1]
                .normal_product(&gen, basis)
                .scale(&Scalar::from_rational(Rational::new(1.into(), (j as i64).into())));
            series.push(next);
        }
        let mut next = vec![OperatorPolynomial::zero(); k + 1];
        for (a, left) in acc.iter().enumerate() {
            if left.is_zero() {
                continue;
            }
            for (b, right) in series.iter().enumerate().take(k + 1 - a) {
                next[a + b] = &next[a + b] + &left.normal_product(right, basis);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// The ordered exponential truncated to total word degree `k`.
pub fn ordered_exp_taylor(coll: &OrderedCollection, d: &Decomposition, k: i64) -> Result<OperatorPolynomial> {
    if k < 0 {
        return Err(Error::Argument(format!("negative truncation degree {k}")));
    }
    let parts = ordered_exp_components(coll, d, k as usize)?;
    Ok(parts.iter().fold(OperatorPolynomial::zero(), |acc, p| &acc + p))
}

/// A weighted mixture of monomial orderings of a fixed list of factors.
///
/// Each permutation lists factor indices from left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedScheme {
    factors: Vec<OperatorPolynomial>,
    weights: Vec<(Vec<usize>, Scalar)>,
}

impl MixedScheme {
    pub fn new(factors: Vec<OperatorPolynomial>, weights: Vec<(Vec<usize>, Scalar)>) -> Result<Self> {
        for (perm, _) in &weights {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..factors.len()).collect::<Vec<_>>() {
                return Err(Error::Argument(format!("{perm:?} is not a permutation of the factors")));
            }
        }
        let total: Scalar = weights.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::Invariant(format!("scheme weights sum to {total}, not 1")));
        }
        Ok(MixedScheme { factors, weights })
    }

    pub fn factors(&self) -> &[OperatorPolynomial] {
        &self.factors
    }

    pub fn weights(&self) -> &[(Vec<usize>, Scalar)] {
        &self.weights
    }

    pub fn apply(&self) -> OperatorPolynomial {
        let mut out = OperatorPolynomial::zero();
        for (perm, w) in &self.weights {
            let word = perm.iter().fold(OperatorPolynomial::one(), |acc, &i| &acc * &self.factors[i]);
            out = &out + &word.scale(w);
        }
        out
    }
}

pub fn apply_scheme(scheme: &MixedScheme) -> OperatorPolynomial {
    scheme.apply()
}

/// Distinct arrangements of a multiset given by class ids, in lexicographic
/// order of the class sequence.
pub fn distinct_permutations(classes: &[usize]) -> Vec<Vec<usize>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in classes {
        *counts.entry(c).or_default() += 1;
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(classes.len());
    fn rec(counts: &mut BTreeMap<usize, usize>, cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let keys: Vec<usize> = counts.iter().filter(|(_, &v)| v > 0).map(|(&k, _)| k).collect();
        for k in keys {
            *counts.get_mut(&k).unwrap() -= 1;
            cur.push(k);
            rec(counts, cur, n, out);
            cur.pop();
            *counts.get_mut(&k).unwrap() += 1;
        }
    }
    rec(&mut counts, &mut cur, classes.len(), &mut out);
    out
}

/// Uniform weight over every distinct arrangement of the factors.
pub fn weyl_scheme(factors: Vec<OperatorPolynomial>) -> MixedScheme {
    let mut reps: Vec<usize> = Vec::new();
    let classes: Vec<usize> = (0..factors.len())
        .map(|i| match reps.iter().position(|&r| factors[r] == factors[i]) {
            Some(c) => c,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        })
        .collect();
    let arrangements = distinct_permutations(&classes);
    let w = Scalar::from_rational(Rational::new(1.into(), (arrangements.len() as i64).into()));
    let weights = arrangements
        .into_iter()
        .map(|seq| {
            // hand out concrete factor indices class by class
            let mut pools: Vec<Vec<usize>> = vec![Vec::new(); reps.len()];
            for (i, &c) in classes.iter().enumerate().rev() {
                pools[c].push(i);
            }
            let perm = seq.iter().map(|&c| pools[c].pop().unwrap()).collect();
            (perm, w.clone())
        })
        .collect();
    MixedScheme { factors, weights }
}

/// Number of distinct arrangements, `n! / prod(multiplicity!)`.
pub fn arrangement_count(multiplicities: &[u32]) -> num_bigint::BigInt {
    let n: u32 = multiplicities.iter().sum();
    multiplicities.iter().fold(factorial(n), |acc, &m| acc / factorial(m))
}

//! Truncated Fock-space matrices used as an independent numeric check.
//!
//! Modes are combined by Kronecker product with mode 1 as the slowest index.
//! A word of degree `d` moves number states by at most `d`, so truncation
//! defects stay within the last `d` levels of each mode.

use std::collections::HashMap;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::algebra::{Gen, Kind, OperatorPolynomial};
use crate::error::{Error, Result};

pub type FockMatrix = Array2<Complex64>;
pub type FockVector = Array1<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockConfig {
    /// Number states `|0>..|dim-1>` per mode.
    pub dim: usize,
    pub modes: usize,
}

impl FockConfig {
    pub fn new(dim: usize, modes: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Argument(format!("Fock dimension {dim} is below 2")));
        }
        if modes == 0 {
            return Err(Error::Argument("at least one mode is required".into()));
        }
        Ok(FockConfig { dim, modes })
    }

    pub fn single(dim: usize) -> Result<Self> {
        FockConfig::new(dim, 1)
    }

    pub fn total_dim(&self) -> usize {
        self.dim.pow(self.modes as u32)
    }
}

pub fn identity(n: usize) -> FockMatrix {
    Array2::eye(n)
}

/// Single-mode annihilation matrix, `c|n> = sqrt(n)|n-1>`.
pub fn annihilation(dim: usize) -> FockMatrix {
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    m
}

fn single_mode(kind: Kind, dim: usize) -> FockMatrix {
    let c = annihilation(dim);
    let cd = c.t().to_owned();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        Kind::C => c,
        Kind::Cd => cd,
        Kind::Q => (&c + &cd).mapv(|x| x * h),
        Kind::P => (&c - &cd).mapv(|x| x * Complex64::new(0.0, -h)),
    }
}

pub fn kron(a: &FockMatrix, b: &FockMatrix) -> FockMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let x = a[[i, j]];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]).assign(&b.mapv(|y| x * y));
        }
    }
    out
}

/// Matrix of one generator acting on its mode.
pub fn generator_matrix(g: Gen, cfg: &FockConfig) -> Result<FockMatrix> {
    let mode = g.mode as usize;
    if mode >= cfg.modes {
        return Err(Error::Dimension { expected: cfg.modes, found: mode + 1 });
    }
    let eye = identity(cfg.dim);
    let mut out = Array2::eye(1);
    for k in 0..cfg.modes {
        let factor = if k == mode { single_mode(g.kind, cfg.dim) } else { eye.clone() };
        out = kron(&out, &factor);
    }
    Ok(out)
}

/// Word-by-word matrix product; coefficients must be numeric.
pub fn represent(p: &OperatorPolynomial, cfg: &FockConfig) -> Result<FockMatrix> {
    let n = cfg.total_dim();
    let mut cache: HashMap<Gen, FockMatrix> = HashMap::new();
    let mut out: FockMatrix = Array2::zeros((n, n));
    for (w, c) in p.terms() {
        let z = c.to_complex().ok_or_else(|| Error::SymbolicResidue(c.to_string()))?;
        let mut m: Option<FockMatrix> = None;
        for g in w {
            if !cache.contains_key(g) {
                cache.insert(*g, generator_matrix(*g, cfg)?);
            }
            m = Some(match m {
                None => cache[g].clone(),
                Some(acc) => acc.dot(&cache[g]),
            });
        }
        match m {
            Some(m) => out.scaled_add(z, &m),
            None => out.diag_mut().mapv_inplace(|x| x + z),
        }
    }
    Ok(out)
}

fn one_norm(m: &FockMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn is_diagonal(m: &FockMatrix) -> bool {
    m.indexed_iter().all(|((i, j), x)| i == j || *x == Complex64::new(0.0, 0.0))
}

fn check_finite(m: &FockMatrix) -> Result<()> {
    if m.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericRange("matrix exponential overflowed".into()))
    }
}

/// `e^M` by scaling and squaring with a Taylor kernel.
///
/// The scaled matrix has one-norm at most 1/2; the series stops once the
/// next term's norm bound falls below `1e-18` relative to the partial sum.
pub fn matexp(m: &FockMatrix) -> Result<FockMatrix> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::Argument(format!("matrix exponential of a {r}x{c} matrix")));
    }
    check_finite(m)?;
    if is_diagonal(m) {
        let mut out = Array2::zeros((r, r));
        for i in 0..r {
            out[[i, i]] = m[[i, i]].exp();
        }
        check_finite(&out)?;
        return Ok(out);
    }
    let norm = one_norm(m);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    if squarings > 1000 {
        return Err(Error::NumericRange(format!("norm {norm} too large")));
    }
    let a = m.mapv(|x| x / 2f64.powi(squarings as i32));
    let an = one_norm(&a);
    let mut sum = identity(r);
    let mut term = identity(r);
    let mut bound = 1.0;
    for k in 1..60 {
        term = term.dot(&a).mapv(|x| x / k as f64);
        sum += &term;
        bound *= an / k as f64;
        if bound < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    check_finite(&sum)?;
    Ok(sum)
}

/// `e^M v` by a Taylor series on the vector, splitting `M` into pieces of
/// one-norm at most 1/2.
pub fn expm_apply(m: &FockMatrix, v: &FockVector) -> Result<FockVector> {
    let norm = one_norm(m);
    let pieces = if norm > 0.5 { (norm / 0.5).ceil() as usize } else { 1 };
    let a = m.mapv(|x| x / pieces as f64);
    let an = norm / pieces as f64;
    let mut out = v.clone();
    for _ in 0..pieces {
        let mut term = out.clone();
        let mut sum = out.clone();
        let mut bound = 1.0;
        for k in 1..60 {
            term = a.dot(&term).mapv(|x| x / k as f64);
            sum += &term;
            bound *= an / k as f64;
            if bound < 1e-18 {
                break;
            }
        }
        out = sum;
    }
    if out.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NumericRange("vector exponential overflowed".into()))
    }
}

/// Slices `(time, increment)` of a time-ordered exponential.
pub type Schedule = Vec<(f64, OperatorPolynomial)>;

/// Midpoint rule: `steps` slices of `[0, t]` with increment `f(tau) * dt`.
pub fn midpoint_schedule(t: f64, steps: usize, f: impl Fn(f64) -> OperatorPolynomial) -> Schedule {
    let dt = t / steps as f64;
    (0..steps)
        .map(|j| {
            let tau = (j as f64 + 0.5) * dt;
            let inc = f(tau).map_coefficients(|c| c.scale(&crate::scalar::Gauss::real(float_rational(dt))));
            (tau, inc)
        })
        .collect()
}

/// Exact rational value of a finite double.
pub fn float_rational(x: f64) -> crate::scalar::Rational {
    crate::scalar::Rational::from_float(x).unwrap_or_default()
}

fn check_ascending(schedule: &Schedule) -> Result<()> {
    if schedule.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::Argument("schedule times must be ascending".into()));
    }
    Ok(())
}

/// Product of slice exponentials, latest slice leftmost.
pub fn trotter_ordered_exp(schedule: &Schedule, cfg: &FockConfig) -> Result<FockMatrix> {
    check_ascending(schedule)?;
    let mut out = identity(cfg.total_dim());
    for (_, inc) in schedule {
        let e = matexp(&represent(inc, cfg)?)?;
        out = e.dot(&out);
    }
    Ok(out)
}

/// Applies the time-ordered product to a state, earliest slice first.
pub fn trotter_apply(schedule: &Schedule, v: &FockVector, cfg: &FockConfig) -> Result<FockVector> {
    check_ascending(schedule)?;
    let mut out = v.clone();
    for (_, inc) in schedule {
        out = expm_apply(&represent(inc, cfg)?, &out)?;
    }
    Ok(out)
}

/// Max `|a_ij - b_ij|` over the top `(N - margin)` block.
pub fn compare_block(a: &FockMatrix, b: &FockMatrix, margin: usize) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.nrows(), found: b.nrows() });
    }
    let n = a.nrows().saturating_sub(margin);
    let diff = &a.slice(s![..n, ..n]) - &b.slice(s![..n, ..n]);
    Ok(diff.iter().map(|x| x.norm()).fold(0.0, f64::max))
}

/// Top-left `n x n` block.
pub fn crop(a: &FockMatrix, n: usize) -> FockMatrix {
    a.slice(s![..n, ..n]).to_owned()
}

pub fn dagger(a: &FockMatrix) -> FockMatrix {
    a.t().mapv(|x| x.conj())
}

/// Number state `|k>` in a single-mode space.
pub fn number_state(k: usize, dim: usize) -> FockVector {
    let mut v = Array1::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Normalized Hermite functions `psi_0(x) .. psi_{n-1}(x)`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp());
    if n > 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for k in 2..n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

/// Position-space amplitudes of a single-mode state on `grid`.
pub fn to_grid(v: &FockVector, grid: &[f64]) -> Vec<Complex64> {
    grid.iter()
        .map(|&x| {
            hermite_functions(v.len(), x).iter().zip(v.iter()).map(|(h, a)| a * *h).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Basis;
    use crate::scalar::Scalar;

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn number_operator_is_diagonal() {
        let cfg = FockConfig::single(6).unwrap();
        let n = represent(&OperatorPolynomial::word(&[Gen::cd(0), Gen::c(0)]), &cfg).unwrap();
        for i in 0..6 {
            assert!((n[[i, i]] - Complex64::new(i as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn truncation_defect_sits_in_the_corner() {
        let cfg = FockConfig::single(8).unwrap();
        let cc = represent(&OperatorPolynomial::word(&[Gen::c(0), Gen::cd(0)]), &cfg).unwrap();
        let rhs = represent(
            &(&OperatorPolynomial::word(&[Gen::cd(0), Gen::c(0)]) + &OperatorPolynomial::one()),
            &cfg,
        )
        .unwrap();
        // sqrt(n)^2 rounds, so "zero" means zero up to one ulp of N
        assert!(compare_block(&cc, &rhs, 1).unwrap() < 1e-14);
        // the corner holds cc+ = 0 against cd c + 1 = N
        assert!((compare_block(&cc, &rhs, 0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn quadratures_square_to_odd_diagonal() {
        let cfg = FockConfig::single(10).unwrap();
        let q: OperatorPolynomial = Gen::q(0).into();
        let p: OperatorPolynomial = Gen::p(0).into();
        let m = represent(&(&q.pow(2) + &p.pow(2)), &cfg).unwrap();
        for i in 0..9 {
            assert!((m[[i, i]] - Complex64::new(2.0 * i as f64 + 1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn exponentials() {
        let z = Array2::<Complex64>::zeros((5, 5));
        assert_eq!(matexp(&z).unwrap(), identity(5));
        let mut d = Array2::zeros((5, 5));
        for i in 0..5 {
            d[[i, i]] = Complex64::new(0.0, std::f64::consts::PI * i as f64);
        }
        let e = matexp(&d).unwrap();
        for i in 0..5 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            assert!((e[[i, i]] - c1() * sign).norm() < 1e-12);
        }
    }

    #[test]
    fn displacement_column_is_coherent() {
        let cfg = FockConfig::single(40).unwrap();
        let lam = 0.3;
        let gen = (&OperatorPolynomial::generator(Gen::cd(0)) - &OperatorPolynomial::generator(Gen::c(0)))
            .scale(&Scalar::ratio(3, 10));
        let e = matexp(&represent(&gen, &cfg).unwrap()).unwrap();
        let mut fact = 1.0;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-lam * lam / 2.0f64).exp() * lam.powi(n as i32) / fact.sqrt();
            assert!((e[[n, 0]] - c1() * expected).norm() < 1e-10);
        }
        let v = expm_apply(&represent(&gen, &cfg).unwrap(), &number_state(0, 40)).unwrap();
        for n in 0..20 {
            assert!((v[n] - e[[n, 0]]).norm() < 1e-12);
        }
    }

    #[test]
    fn homomorphism_and_normal_form() {
        let cfg = FockConfig::single(12).unwrap();
        let a = &OperatorPolynomial::word(&[Gen::p(0), Gen::q(0), Gen::q(0)]) + &OperatorPolynomial::generator(Gen::p(0));
        let b = OperatorPolynomial::word(&[Gen::q(0), Gen::p(0)]);
        let ab = represent(&(&a * &b), &cfg).unwrap();
        let prod = represent(&a, &cfg).unwrap().dot(&represent(&b, &cfg).unwrap());
        assert!(compare_block(&ab, &prod, 0).unwrap() < 1e-10);
        let nf = represent(&(&a * &b).normal_form(Basis::Qp), &cfg).unwrap();
        assert!(compare_block(&ab, &nf, 5).unwrap() < 1e-9);
    }

    #[test]
    fn two_modes_commute() {
        let cfg = FockConfig::new(4, 2).unwrap();
        let a = generator_matrix(Gen::c(0), &cfg).unwrap();
        let b = generator_matrix(Gen::cd(1), &cfg).unwrap();
        assert!(compare_block(&a.dot(&b), &b.dot(&a), 0).unwrap() < 1e-14);
        assert!(generator_matrix(Gen::c(2), &cfg).is_err());
    }

    #[test]
    fn constant_generator_trotter() {
        let cfg = FockConfig::single(10).unwrap();
        let g = OperatorPolynomial::generator(Gen::q(0)).scale(&Scalar::i());
        let sched = midpoint_schedule(1.0, 7, |_| g.clone());
        let t = trotter_ordered_exp(&sched, &cfg).unwrap();
        let direct = matexp(&represent(&g, &cfg).unwrap()).unwrap();
        assert!(compare_block(&t, &direct, 0).unwrap() < 1e-12);
        let mut bad = sched.clone();
        bad.reverse();
        assert!(trotter_ordered_exp(&bad, &cfg).is_err());
    }

    #[test]
    fn symbolic_coefficients_are_rejected() {
        let cfg = FockConfig::single(4).unwrap();
        let p = OperatorPolynomial::generator(Gen::c(0)).scale(&Scalar::var("s"));
        assert!(matches!(represent(&p, &cfg), Err(Error::SymbolicResidue(_))));
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let h = 0.01;
        let grid: Vec<f64> = (-1200..=1200).map(|i| i as f64 * h).collect();
        let vals: Vec<Vec<f64>> = grid.iter().map(|&x| hermite_functions(5, x)).collect();
        for a in 0..5 {
            for b in 0..5 {
                let s: f64 = vals.iter().map(|v| v[a] * v[b] * h).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-10);
            }
        }
    }
}

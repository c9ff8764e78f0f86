//! Worked examples: a forced particle, a driven cavity and the squeezing
//! operator, each with a numeric cross-check in a truncated Fock space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::algebra::{Gen, LinearCombination, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::fock::{
    self, annihilation, compare_block, crop, expm_apply, identity, matexp, FockConfig, FockMatrix, FockVector,
};
use crate::gwt::{general_contraction, OrderingSpec};
use crate::orderings::Builtin;
use crate::scalar::{integer, rational_to_f64, Gauss, Rational, Scalar, Symbol};

/// Constant value on `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrivePiece {
    pub start: Rational,
    pub end: Rational,
    pub value: Gauss,
}

/// A time-dependent drive on `[0, t]`.
#[derive(Clone)]
pub enum DriveSpec {
    /// Zero outside the listed pieces.
    Piecewise(Vec<DrivePiece>),
    /// Smooth drive, integrated by Simpson's rule with step halving.
    Function(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for DriveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveSpec::Piecewise(p) => f.debug_tuple("Piecewise").field(p).finish(),
            DriveSpec::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl DriveSpec {
    pub fn piecewise(pieces: Vec<DrivePiece>) -> Result<Self> {
        for p in &pieces {
            if p.start.is_negative() || p.end <= p.start {
                return Err(Error::InvalidDrive(format!(
                    "piece [{}, {}) is empty or starts before 0",
                    p.start, p.end
                )));
            }
        }
        for w in pieces.windows(2) {
            if w[1].start < w[0].end {
                return Err(Error::InvalidDrive("pieces overlap or are not ascending".into()));
            }
        }
        Ok(DriveSpec::Piecewise(pieces))
    }

    /// Constant value on `[0, t]`.
    pub fn constant(value: Gauss, t: &Rational) -> Result<Self> {
        DriveSpec::piecewise(vec![DrivePiece { start: integer(0), end: t.clone(), value }])
    }

    pub fn function(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        DriveSpec::Function(Arc::new(f))
    }

    pub fn value_at(&self, tau: f64) -> Complex64 {
        match self {
            DriveSpec::Function(f) => f(tau),
            DriveSpec::Piecewise(pieces) => pieces
                .iter()
                .find(|p| rational_to_f64(&p.start) <= tau && tau < rational_to_f64(&p.end))
                .map_or(Complex64::zero(), |p| p.value.to_complex()),
        }
    }

    /// Pieces clipped to `[0, t]`.
    fn clipped(pieces: &[DrivePiece], t: &Rational) -> Vec<DrivePiece> {
        pieces
            .iter()
            .filter(|p| &p.start < t)
            .map(|p| DrivePiece { start: p.start.clone(), end: p.end.clone().min(t.clone()), value: p.value.clone() })
            .collect()
    }
}

fn check_horizon(t: &Rational) -> Result<()> {
    if t.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidDrive("horizon must be positive".into()))
    }
}

/// Composite Simpson's rule with step halving until successive results
/// differ by at most `tol` (absolute, plus relative to the value).
fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    let rule = |n: usize| {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += f(a + i as f64 * h) * w;
        }
        s * (h / 3.0)
    };
    let mut n = 16;
    let mut prev = rule(n);
    while n < 1 << 22 {
        n *= 2;
        let next = rule(n);
        if (next - prev).norm() <= tol * (1.0 + next.norm()) {
            return next;
        }
        prev = next;
    }
    prev
}

/// `(int_0^t f, int_0^t conj(g(tau)) int_0^tau f(sigma) d sigma d tau)` on a
/// uniform grid, refined until both settle.
fn simpson_nested(g: &dyn Fn(f64) -> Complex64, f: &dyn Fn(f64) -> Complex64, t: f64, tol: f64) -> (Complex64, Complex64) {
    let rule = |n: usize| {
        let h = t / n as f64;
        let vals: Vec<Complex64> = (0..=n).map(|i| f(i as f64 * h)).collect();
        // cumulative integral at every node: Simpson on even nodes, a
        // three-point rule for the half step in between
        let mut cum = vec![Complex64::zero(); n + 1];
        for k in (0..n).step_by(2) {
            let (f0, f1, f2) = (vals[k], vals[k + 1], vals[k + 2]);
            cum[k + 1] = cum[k] + (f0 * 5.0 + f1 * 8.0 - f2) * (h / 12.0);
            cum[k + 2] = cum[k] + (f0 + f1 * 4.0 + f2) * (h / 3.0);
        }
        let outer: Complex64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                g(i as f64 * h).conj() * cum[i] * w
            })
            .sum::<Complex64>()
            * (h / 3.0);
        (cum[n], outer)
    };
    let mut n = 16;
    let mut prev = rule(n);
    while n < 1 << 20 {
        n *= 2;
        let next = rule(n);
        let d = (next.0 - prev.0).norm().max((next.1 - prev.1).norm());
        if d <= tol * (1.0 + next.0.norm() + next.1.norm()) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Shifts and contraction of the forced particle.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcedParticle {
    /// `int_0^t F`.
    pub dp: f64,
    /// `-(1/m) int_0^t F tau`.
    pub dq: f64,
    /// Imaginary part of `C_t = 1/2 (T - QP) X_t^2`.
    pub contraction_im: f64,
    /// `int int F_tau F_sigma |tau - sigma|`.
    pub abs_kernel: f64,
    /// Exact values for piecewise-constant drives.
    pub exact: Option<ExactParticle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactParticle {
    pub dp: Rational,
    pub dq: Rational,
    pub abs_kernel: Rational,
    /// `C_t`, purely imaginary.
    pub contraction: Scalar,
}

impl ForcedParticle {
    pub fn contraction(&self) -> Complex64 {
        Complex64::new(0.0, self.contraction_im)
    }
}

/// `X_t = i int F_tau (q + p tau/m) d tau = i dp q - i dq p` and the
/// time-ordered exponential `T e^{X_t} = e^{C_t} e^{i dp q} e^{-i dq p}`.
///
/// The T-versus-QP contraction is
/// `C_t = i/(4m) int int F F |tau - sigma| - i/2 dp dq`.
pub fn forced_particle(drive: &DriveSpec, m: &Rational, t: &Rational) -> Result<ForcedParticle> {
    check_horizon(t)?;
    if !m.is_positive() {
        return Err(Error::InvalidDrive("mass must be positive".into()));
    }
    match drive {
        DriveSpec::Piecewise(pieces) => {
            let pieces = DriveSpec::clipped(pieces, t);
            if pieces.iter().any(|p| !p.value.is_real()) {
                return Err(Error::InvalidDrive("the force must be real".into()));
            }
            let two = integer(2);
            let mut dp = Rational::zero();
            let mut moment = Rational::zero();
            let mut kernel = Rational::zero();
            for (i, a) in pieces.iter().enumerate() {
                let la = &a.end - &a.start;
                dp += &a.value.re * &la;
                moment += &a.value.re * (&a.end * &a.end - &a.start * &a.start) / &two;
                // same piece: int int |tau - sigma| = L^3 / 3
                kernel += &a.value.re * &a.value.re * &la * &la * &la / integer(3);
                for b in &pieces[i + 1..] {
                    let lb = &b.end - &b.start;
                    let gap = (&b.end + &b.start - &a.end - &a.start) / &two;
                    kernel += &a.value.re * &b.value.re * &la * &lb * gap * &two;
                }
            }
            let dq = -(&moment / m);
            let c_im = &kernel / (integer(4) * m) - &dp * &dq / &two;
            let contraction = Scalar::from_gauss(Gauss::new(Rational::zero(), c_im.clone()));
            Ok(ForcedParticle {
                dp: rational_to_f64(&dp),
                dq: rational_to_f64(&dq),
                contraction_im: rational_to_f64(&c_im),
                abs_kernel: rational_to_f64(&kernel),
                exact: Some(ExactParticle { dp, dq, abs_kernel: kernel, contraction }),
            })
        }
        DriveSpec::Function(f) => {
            let tf = rational_to_f64(t);
            let mf = rational_to_f64(m);
            let tol = 1e-12;
            let dp = simpson(|x| f(x), 0.0, tf, tol).re;
            let moment = simpson(|x| f(x) * x, 0.0, tf, tol).re;
            // int int F F |tau - sigma| = 2 int F(tau) (tau A(tau) - B(tau))
            // with A, B the running integrals of F and F sigma
            let (_, aa) = simpson_nested(&|x| f(x) * x, &|x| f(x), tf, tol);
            let (_, bb) = simpson_nested(&|x| f(x), &|x| f(x) * x, tf, tol);
            let kernel = 2.0 * (aa.re - bb.re);
            let dq = -moment / mf;
            Ok(ForcedParticle {
                dp,
                dq,
                contraction_im: kernel / (4.0 * mf) - dp * dq / 2.0,
                abs_kernel: kernel,
                exact: None,
            })
        }
    }
}

/// Uniform grid `x_j = x0 + j dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub len: usize,
}

impl Grid {
    pub fn symmetric(half_width: f64, len: usize) -> Self {
        let dx = 2.0 * half_width / (len - 1) as f64;
        Grid { x0: -half_width, dx, len }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.x0 + j as f64 * self.dx).collect()
    }

    pub fn extent(&self) -> f64 {
        self.dx * (self.len - 1) as f64
    }

    pub fn norm(&self, psi: &[Complex64]) -> f64 {
        (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx).sqrt()
    }

    /// Linear interpolation, zero outside the grid.
    pub fn sample(&self, psi: &[Complex64], x: f64) -> Complex64 {
        let u = (x - self.x0) / self.dx;
        if u < 0.0 || u > (self.len - 1) as f64 {
            return Complex64::zero();
        }
        let j = (u.floor() as usize).min(self.len - 2);
        let w = u - j as f64;
        psi[j] * (1.0 - w) + psi[j + 1] * w
    }
}

/// `psi_t(q) = e^{C_t} e^{i dp q} psi_0(q - dq)`.
pub fn forced_particle_wavefunction(psi0: &[Complex64], grid: &Grid, shifts: &ForcedParticle) -> Result<Vec<Complex64>> {
    if psi0.len() != grid.len {
        return Err(Error::Dimension { expected: grid.len, found: psi0.len() });
    }
    if shifts.dq.abs() >= grid.extent() {
        return Err(Error::Domain(format!("shift {} exceeds the grid extent {}", shifts.dq, grid.extent())));
    }
    let phase = shifts.contraction().exp();
    Ok(grid
        .points()
        .iter()
        .map(|&q| phase * Complex64::new(0.0, shifts.dp * q).exp() * grid.sample(psi0, q - shifts.dq))
        .collect())
}

/// Trotterized `T exp(i int F (q + p tau/m))` applied to `psi`.
pub fn particle_trotter_state(
    drive: &DriveSpec,
    m: f64,
    t: f64,
    steps: usize,
    psi: &FockVector,
    cfg: &FockConfig,
) -> Result<FockVector> {
    let q = fock::generator_matrix(Gen::q(0), cfg)?;
    let p = fock::generator_matrix(Gen::p(0), cfg)?;
    let dt = t / steps as f64;
    let mut out = psi.clone();
    for j in 0..steps {
        let tau = (j as f64 + 0.5) * dt;
        let f = drive.value_at(tau).re;
        let inc = (&q + &p.mapv(|x| x * (tau / m))).mapv(|x| x * Complex64::new(0.0, f * dt));
        out = expm_apply(&inc, &out)?;
    }
    Ok(out)
}

/// `e^{C_t} e^{i dp q} e^{-i dq p} psi`.
pub fn particle_closed_state(shifts: &ForcedParticle, psi: &FockVector, cfg: &FockConfig) -> Result<FockVector> {
    let q = fock::generator_matrix(Gen::q(0), cfg)?;
    let p = fock::generator_matrix(Gen::p(0), cfg)?;
    let v = expm_apply(&p.mapv(|x| x * Complex64::new(0.0, -shifts.dq)), psi)?;
    let v = expm_apply(&q.mapv(|x| x * Complex64::new(0.0, shifts.dp)), &v)?;
    Ok(v.mapv(|x| x * shifts.contraction().exp()))
}

pub fn overlap(a: &FockVector, b: &FockVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Shift and contraction of the driven cavity.
#[derive(Clone, Debug, PartialEq)]
pub struct DrivenCavity {
    /// `dc* = int E*_tau e^{-i omega tau}`.
    pub dc_conj: Complex64,
    /// `C_t = -int int theta(tau - sigma) E*_tau E_sigma e^{-i omega (tau - sigma)}`.
    pub contraction: Complex64,
}

impl DrivenCavity {
    pub fn dc(&self) -> Complex64 {
        self.dc_conj.conj()
    }
}

/// `(e^z - 1)/z`.
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `(e^z - 1 - z)/z^2`.
fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        Complex64::new(0.5, 0.0) + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// `U_t = e^{C_t} e^{-dc cd} e^{dc* c}` for `H = omega cd c + (E* c - h.c.)`
/// in the interaction picture.
pub fn driven_cavity(drive: &DriveSpec, omega: f64, t: &Rational) -> Result<DrivenCavity> {
    check_horizon(t)?;
    let iw = Complex64::new(0.0, omega);
    match drive {
        DriveSpec::Piecewise(pieces) => {
            let pieces = DriveSpec::clipped(pieces, t);
            // int_a^b e^{-i omega tau} = e^{-i omega a} L phi1(-i omega L)
            let seg: Vec<(Complex64, Complex64)> = pieces
                .iter()
                .map(|p| {
                    let (a, b) = (rational_to_f64(&p.start), rational_to_f64(&p.end));
                    let l = b - a;
                    (p.value.to_complex(), (-iw * a).exp() * l * phi1(-iw * l))
                })
                .collect();
            let dc_conj: Complex64 = seg.iter().map(|(e, g)| e.conj() * g).sum();
            let mut c = Complex64::zero();
            for (i, p) in pieces.iter().enumerate() {
                let l = rational_to_f64(&(&p.end - &p.start));
                let (e, g) = seg[i];
                // same piece: int_0^L (L - u) e^{-i omega u} du = L^2 phi2(-i omega L)
                c -= e.norm_sqr() * l * l * phi2(-iw * l);
                for &(ej, gj) in &seg[..i] {
                    // earlier piece j: int e^{-i omega tau} * int e^{+i omega sigma}
                    c -= e.conj() * g * ej * gj.conj();
                }
            }
            Ok(DrivenCavity { dc_conj, contraction: c })
        }
        DriveSpec::Function(f) => {
            let tf = rational_to_f64(t);
            // with g(tau) = E_tau e^{i omega tau}: dc* = conj(int g), C = -int conj(g) int g
            let g = |x: f64| f(x) * (iw * x).exp();
            let (total, nested) = simpson_nested(&g, &g, tf, 1e-12);
            Ok(DrivenCavity { dc_conj: total.conj(), contraction: -nested })
        }
    }
}

/// Trotterized time-ordered exponential of `int (E* c_tau - E cd_tau)`.
pub fn cavity_trotter(drive: &DriveSpec, omega: f64, t: f64, steps: usize, cfg: &FockConfig) -> Result<FockMatrix> {
    let c = fock::generator_matrix(Gen::c(0), cfg)?;
    let cd = fock::dagger(&c);
    let dt = t / steps as f64;
    let mut out = identity(cfg.total_dim());
    let mut cache: Option<(Complex64, FockMatrix)> = None;
    for j in 0..steps {
        let tau = (j as f64 + 0.5) * dt;
        let e = drive.value_at(tau);
        let a = e.conj() * Complex64::new(0.0, -omega * tau).exp() * dt;
        // identical slices reuse one exponential
        let step = match &cache {
            Some((key, m)) if (key - a).norm() == 0.0 => m.clone(),
            _ => {
                let inc = &c.mapv(|x| x * a) - &cd.mapv(|x| x * a.conj());
                let m = matexp(&inc)?;
                cache = Some((a, m.clone()));
                m
            }
        };
        out = step.dot(&out);
    }
    Ok(out)
}

/// `e^{C_t} e^{-dc cd} e^{dc* c}` as a matrix.
pub fn cavity_closed_matrix(r: &DrivenCavity, cfg: &FockConfig) -> Result<FockMatrix> {
    let c = fock::generator_matrix(Gen::c(0), cfg)?;
    let cd = fock::dagger(&c);
    let left = matexp(&cd.mapv(|x| x * -r.dc()))?;
    let right = matexp(&c.mapv(|x| x * r.dc_conj))?;
    Ok(left.dot(&right).mapv(|x| x * r.contraction.exp()))
}

/// `prefactor * N exp(alpha cd^2 + beta cd c + gamma c^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianNormalForm {
    /// Square of the prefactor, kept exact.
    pub prefactor_sq: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl GaussianNormalForm {
    pub fn prefactor(&self) -> f64 {
        rational_to_f64(&self.prefactor_sq).sqrt()
    }

    /// Exponent with `q, p` as commuting symbols: coefficients of
    /// `(p q, p^2, q^2)`.
    pub fn qp_exponent(&self) -> (Gauss, Rational, Rational) {
        // cd^2 = (q^2 - 2i pq - p^2)/2, c^2 = (q^2 + 2i pq - p^2)/2, cd c = (q^2 + p^2)/2
        let half = Rational::new(1.into(), 2.into());
        let pq = Gauss::new(Rational::zero(), &self.gamma - &self.alpha);
        let p2 = (-&self.alpha - &self.gamma + &self.beta) * &half;
        let q2 = (&self.alpha + &self.gamma + &self.beta) * &half;
        (pq, p2, q2)
    }
}

/// Normal form of the squeezing operator `psi(x) -> sqrt(mu) psi(mu x)`:
/// prefactor `sqrt(2 mu/(1 + mu^2))`, `alpha = (1 - mu^2)/(2(1 + mu^2)) = -gamma`,
/// `beta = -(1 - mu)^2/(1 + mu^2)`.
pub fn squeezing_normal_form(mu: &Rational) -> Result<GaussianNormalForm> {
    if !mu.is_positive() {
        return Err(Error::Domain("squeezing parameter must be positive".into()));
    }
    let one = integer(1);
    let den = &one + mu * mu;
    let alpha = (&one - mu * mu) / (integer(2) * &den);
    let gamma = -alpha.clone();
    let beta = -((&one - mu) * (&one - mu)) / &den;
    Ok(GaussianNormalForm { prefactor_sq: integer(2) * mu / &den, alpha, beta, gamma })
}

/// `prefactor * e^{alpha C+^2} diag((1 + beta)^n) e^{gamma C^2}`.
pub fn normal_ordered_gaussian_matrix(g: &GaussianNormalForm, cfg: &FockConfig) -> Result<FockMatrix> {
    if cfg.modes != 1 {
        return Err(Error::Unsupported("single-mode Gaussians only".into()));
    }
    let c = annihilation(cfg.dim);
    let c2 = c.dot(&c);
    let cd2 = fock::dagger(&c2);
    let alpha = rational_to_f64(&g.alpha);
    let gamma = rational_to_f64(&g.gamma);
    let base = 1.0 + rational_to_f64(&g.beta);
    let mut d = Array2::zeros((cfg.dim, cfg.dim));
    for n in 0..cfg.dim {
        // 0^0 = 1 keeps the vacuum projector at beta = -1
        d[[n, n]] = Complex64::new(base.powi(n as i32), 0.0);
    }
    let left = matexp(&cd2.mapv(|x| x * alpha))?;
    let right = matexp(&c2.mapv(|x| x * gamma))?;
    let out = left.dot(&d).dot(&right).mapv(|x| x * g.prefactor());
    if out.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NumericRange("Gaussian matrix overflowed".into()));
    }
    Ok(out)
}

/// `N exp(beta cd c) = sum_k beta^k cd^k c^k / k!` summed directly.
pub fn normal_exp_number_series(beta: f64, cfg: &FockConfig) -> FockMatrix {
    let c = annihilation(cfg.dim);
    let cd = fock::dagger(&c);
    let mut out = identity(cfg.dim);
    let mut left = identity(cfg.dim);
    let mut right = identity(cfg.dim);
    let mut coef = 1.0;
    for k in 1..cfg.dim {
        left = left.dot(&cd);
        right = right.dot(&c);
        coef *= beta / k as f64;
        out = out + left.dot(&right).mapv(|x| x * coef);
    }
    out
}

/// `exp(i ln(mu) (qp + pq)/2)`, computed in a padded space of twice the
/// dimension and cropped.
pub fn dilation_matrix(mu: f64, cfg: &FockConfig) -> Result<FockMatrix> {
    let big = FockConfig::single(2 * cfg.dim)?;
    let q = fock::generator_matrix(Gen::q(0), &big)?;
    let p = fock::generator_matrix(Gen::p(0), &big)?;
    let gen = (&q.dot(&p) + &p.dot(&q)).mapv(|x| x * Complex64::new(0.0, mu.ln() / 2.0));
    Ok(crop(&matexp(&gen)?, cfg.dim))
}

/// Outcome of deriving the squeezer through the Gaussian unraveling and
/// the PQ-versus-normal contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqueezeRoute {
    /// `C(z)` for `X = i z p + zc q` (positive sign branch).
    pub contraction_plus: Scalar,
    /// `C(z)` for `X = i z p - zc q`.
    pub contraction_minus: Scalar,
    /// Squared prefactor as `numerator / denominator` in `k = 1 - 1/mu`.
    pub prefactor_sq: (Scalar, Scalar),
    /// Coefficients of `cd^2`, `cd c`, `c^2` over the common denominator.
    pub alpha: Scalar,
    pub beta: Scalar,
    pub gamma: Scalar,
    pub denominator: Scalar,
    /// Exponent coefficients agree with [`squeezing_normal_form`] as
    /// rational functions of `mu`.
    pub exponent_matches: bool,
    /// The route prefactor squared equals `mu` times the closed-form one.
    pub prefactor_matches_times_mu: bool,
    /// Both sign branches give identical results.
    pub branches_agree: bool,
}

/// Reads the Gaussian integrand exponent of one sign branch.
fn unravel_branch(sigma: i64) -> Result<(Scalar, Scalar, Scalar, Scalar, Scalar, Scalar)> {
    let (z, zc) = (Scalar::var("z"), Scalar::var("zc"));
    let x = LinearCombination::from_terms(
        1,
        &[(Gen::p(0), &Scalar::i() * &z), (Gen::q(0), &zc * &Scalar::from_int(sigma))],
    )?;
    let pq = OrderingSpec::over(Builtin::Pq.collection(1)?, &x)?;
    let n = OrderingSpec::over(Builtin::Normal.collection(1)?, &x)?;
    let c = general_contraction(&pq, &n)?;
    let zs = Symbol::new("z");
    let zcs = Symbol::new("zc");
    let b = c.coefficient_of_powers(&[(zs.clone(), 2), (zcs.clone(), 0)]);
    let b_conj = c.coefficient_of_powers(&[(zs.clone(), 0), (zcs.clone(), 2)]);
    let mixed = c.coefficient_of_powers(&[(zs.clone(), 1), (zcs.clone(), 1)]);
    // N e^X = e^{u cd} e^{v c} with u, v linear in z, zc; read J = d/dz and
    // J' = d/dzc with c, cd as commuting symbols
    let lad = x.to_basis(crate::algebra::Basis::Ladder);
    let sym_c = Scalar::var("c");
    let sym_cd = Scalar::var("cd");
    let linear = &(&lad.coeffs()[0] * &sym_c) + &(&lad.coeffs()[1] * &sym_cd);
    let j = linear.coefficient_of_powers(&[(zs.clone(), 1), (zcs.clone(), 0)]);
    let jc = linear.coefficient_of_powers(&[(zs, 0), (zcs, 1)]);
    Ok((c, b, b_conj, mixed, j, jc))
}

/// Derives the squeezer normal form symbolically in `k = 1 - 1/mu`:
/// `int d^2z/pi exp(-a |z|^2 + b z^2 + b' zc^2 + J z + J' zc)
///  = (a^2 - 4 b b')^{-1/2} exp((a J J' + b' J^2 + b J'^2)/(a^2 - 4 b b'))`
/// with `a = 1/|k| - (coefficient of z zc in C)`.
pub fn squeeze_route() -> Result<SqueezeRoute> {
    let k = Scalar::var("k");
    let mut results = Vec::new();
    for sigma in [1i64, -1] {
        let (c, b, b_conj, mixed, j, jc) = unravel_branch(sigma)?;
        // a = a_n / a_d with |k| = sigma k
        let a_d = &k * &Scalar::from_int(sigma);
        let a_n = &Scalar::one() - &(&a_d * &mixed);
        let four = Scalar::from_int(4);
        let den = &(&a_n * &a_n) - &(&(&four * &b) * &(&b_conj * &(&a_d * &a_d)));
        let num = &(&(&a_n * &a_d) * &(&j * &jc)) + &(&(&a_d * &a_d) * &(&(&b_conj * &(&j * &j)) + &(&b * &(&jc * &jc))));
        let (cs, cds) = (Symbol::new("c"), Symbol::new("cd"));
        let alpha = num.coefficient_of_powers(&[(cds.clone(), 2), (cs.clone(), 0)]);
        let beta = num.coefficient_of_powers(&[(cds.clone(), 1), (cs.clone(), 1)]);
        let gamma = num.coefficient_of_powers(&[(cds, 0), (cs, 2)]);
        // prefactor^2 = (1/|k|^2) / (a^2 - 4 b b') = 1 / den
        results.push((c, den, alpha, beta, gamma));
    }
    let (c_plus, den, alpha, beta, gamma) = results[0].clone();
    let branches_agree = results[1].1 == den && results[1].2 == alpha && results[1].3 == beta && results[1].4 == gamma;

    // closed form with mu = 1/(1 - k): 1 - mu^2 = (k^2 - 2k)/(1-k)^2,
    // 1 + mu^2 = ((1-k)^2 + 1)/(1-k)^2, (1 - mu)^2 = k^2/(1-k)^2
    let one = Scalar::one();
    let omk = &one - &k;
    let s_den = &(&omk * &omk) + &one;
    let two = Scalar::from_int(2);
    let k2_minus_2k = &(&k * &k) - &(&two * &k);
    // alpha_route / den == (k^2 - 2k) / (2 s_den)
    let alpha_ok = &(&alpha * &two) * &s_den == &k2_minus_2k * &den;
    let gamma_ok = &(&gamma * &two) * &s_den == -(&k2_minus_2k * &den);
    // beta_route / den == -k^2 / s_den
    let beta_ok = &beta * &s_den == -(&(&k * &k) * &den);
    // 1/den == mu * 2 mu/(1 + mu^2) = 2/s_den  <=>  s_den == 2 den
    let pref_ok = s_den == &two * &den;
    Ok(SqueezeRoute {
        contraction_plus: c_plus,
        contraction_minus: results[1].0.clone(),
        prefactor_sq: (one, den.clone()),
        alpha,
        beta,
        gamma,
        denominator: den,
        exponent_matches: alpha_ok && beta_ok && gamma_ok,
        prefactor_matches_times_mu: pref_ok,
        branches_agree,
    })
}

/// Error report of the Gaussian unraveling of `O_PQ e^{i kappa p q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnravelReport {
    /// Max block error with the requested grid.
    pub error: f64,
    /// Same with half as many nodes per axis.
    pub coarse_error: f64,
    /// Refining did not reduce the error.
    pub non_convergent: bool,
    pub integral: FockMatrix,
    pub reference: FockMatrix,
}

/// `sum_j (i kappa)^j P^j Q^j / j!` with truncated matrices.
pub fn pq_exp_series(kappa: f64, cfg: &FockConfig) -> Result<FockMatrix> {
    let q = fock::generator_matrix(Gen::q(0), cfg)?;
    let p = fock::generator_matrix(Gen::p(0), cfg)?;
    let n = cfg.total_dim();
    let mut out = identity(n);
    let mut pj = identity(n);
    let mut qj = identity(n);
    let mut coef = Complex64::new(1.0, 0.0);
    for j in 1..400 {
        pj = pj.dot(&p);
        qj = qj.dot(&q);
        coef *= Complex64::new(0.0, kappa) / j as f64;
        let term = pj.dot(&qj).mapv(|x| x * coef);
        let size = term.iter().map(|x| x.norm()).fold(0.0, f64::max);
        out = out + term;
        if size < 1e-18 {
            return Ok(out);
        }
    }
    Err(Error::NumericRange("PQ exponential series did not converge".into()))
}

fn unravel_integral(kappa: f64, cfg: &FockConfig, radius: f64, nodes: usize) -> Result<FockMatrix> {
    let q = fock::generator_matrix(Gen::q(0), cfg)?;
    let p = fock::generator_matrix(Gen::p(0), cfg)?;
    let sign = if kappa > 0.0 { 1.0 } else { -1.0 };
    let ak = kappa.abs();
    let h = 2.0 * radius / (nodes - 1) as f64;
    let norm_bound = fock_one_norm(&p).max(fock_one_norm(&q));
    let n = cfg.total_dim();
    let mut acc: FockMatrix = Array2::zeros((n, n));
    for ix in 0..nodes {
        for iy in 0..nodes {
            let z = Complex64::new(-radius + ix as f64 * h, -radius + iy as f64 * h);
            let log_w = -z.norm_sqr() / ak;
            // skip nodes whose contribution is below double precision
            if log_w + 2.0 * z.norm() * norm_bound < -60.0 {
                continue;
            }
            let edge = |i: usize| if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            let w = log_w.exp() * edge(ix) * edge(iy) * h * h / (PI * ak);
            let ep = matexp(&p.mapv(|x| x * Complex64::new(0.0, 1.0) * z))?;
            let eq = matexp(&q.mapv(|x| x * z.conj() * sign))?;
            acc.scaled_add(Complex64::new(w, 0.0), &ep.dot(&eq));
        }
    }
    Ok(acc)
}

fn fock_one_norm(m: &FockMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Integrates `O_PQ e^{i z p +- zc q} e^{-|z|^2/|kappa|} d^2z / (pi |kappa|)`
/// on a square grid and compares it with the series of `O_PQ e^{i kappa p q}`
/// on the block that excludes the last `margin` levels.
pub fn pq_unravel_check(kappa: f64, cfg: &FockConfig, radius: f64, nodes: usize, margin: usize) -> Result<UnravelReport> {
    if kappa == 0.0 || kappa.abs() > 1.0 {
        return Err(Error::Domain("kappa must satisfy 0 < |kappa| <= 1".into()));
    }
    if nodes < 4 {
        return Err(Error::Argument("at least four nodes per axis".into()));
    }
    let reference = pq_exp_series(kappa, cfg)?;
    let integral = unravel_integral(kappa, cfg, radius, nodes)?;
    let coarse = unravel_integral(kappa, cfg, radius, nodes / 2)?;
    let error = compare_block(&integral, &reference, margin)?;
    let coarse_error = compare_block(&coarse, &reference, margin)?;
    Ok(UnravelReport {
        error,
        coarse_error,
        non_convergent: error > coarse_error && error > 1e-12,
        integral,
        reference,
    })
}

/// Unitarity defect `max |U+ U - 1|` on the top `keep` block.
pub fn unitarity_defect(u: &FockMatrix, keep: usize) -> f64 {
    let uu = fock::dagger(u).dot(u);
    let n = u.nrows();
    compare_block(&uu, &identity(n), n - keep).unwrap_or(f64::INFINITY)
}

/// Displacement-free sanity helper: the polynomial `i F (q + p tau/m)`.
pub fn particle_generator(f: &Rational, tau: &Rational, m: &Rational) -> OperatorPolynomial {
    let i_f = Scalar::from_gauss(Gauss::new(Rational::zero(), f.clone()));
    let q = OperatorPolynomial::generator(Gen::q(0)).scale(&i_f);
    let p = OperatorPolynomial::generator(Gen::p(0)).scale(&(&i_f * &Scalar::from_rational(tau / m)));
    &q + &p
}

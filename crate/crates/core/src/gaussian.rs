//! Single-mode Gaussian states: moments, covariance matrix, entropy and
//! relative entropy of coherence.
//!
//! Quadratures are `x = a + a†`, `p = -i(a - a†)`, so the vacuum covariance
//! matrix is the identity and the uncertainty relation reads `det V ≥ 1`.
//! Entropies are in bits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::GreensTrajectory;

/// Below this, `x log₂ x` is taken at its limit 0.
const XLOGX_FLOOR: f64 = 1e-15;
/// Symplectic eigenvalues this far below 1 are roundoff and get clamped.
const NU_SLACK: f64 = 1e-6;

/// Parameters of `D(α) S(r) ρ_th(n̄) S†(r) D†(α)` with
/// `S(r) = exp[r(a² - a†²)/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianInit {
    pub alpha: Complex64,
    pub r: f64,
    pub n_bar: f64,
}

impl GaussianInit {
    pub fn new(alpha: Complex64, r: f64, n_bar: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite() && r.is_finite()) {
            return Err(Error::InvalidParameter("alpha and r must be finite".into()));
        }
        if !(n_bar >= 0.0 && n_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!("n_bar must be >= 0, got {n_bar}")));
        }
        Ok(Self { alpha, r, n_bar })
    }

    /// Real displacement.
    pub fn real(alpha: f64, r: f64, n_bar: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), r, n_bar)
    }

    /// Centered first and second moments at t = 0.
    pub fn initial_moments(&self) -> Moments {
        let (sh, ch) = (self.r.sinh(), self.r.cosh());
        let n = self.n_bar;
        Moments {
            mean_a: self.alpha,
            var_a: Complex64::new(-(2.0 * n + 1.0) * sh * ch, 0.0),
            cov_adag_a: n * ch * ch + (n + 1.0) * sh * sh,
        }
    }

    /// ⟨a†a⟩ at t = 0.
    pub fn photon_number(&self) -> f64 {
        self.initial_moments().photon_number()
    }
}

/// `⟨a⟩`, `Var(a) = ⟨a²⟩ - ⟨a⟩²` and `Cov(a†, a) = ⟨a†a⟩ - |⟨a⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_a: Complex64,
    pub var_a: Complex64,
    pub cov_adag_a: f64,
}

impl Moments {
    /// `Var(a†)`, the conjugate of `Var(a)`.
    pub fn var_adag(&self) -> Complex64 {
        self.var_a.conj()
    }

    /// ⟨a†a⟩ = |⟨a⟩|² + Cov(a†, a).
    pub fn photon_number(&self) -> f64 {
        self.mean_a.norm_sqr() + self.cov_adag_a
    }
}

/// Symmetric 2×2 quadrature covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub v11: f64,
    pub v22: f64,
    pub v12: f64,
}

impl CovarianceMatrix {
    pub fn det(&self) -> f64 {
        self.v11 * self.v22 - self.v12 * self.v12
    }

    /// ν = √det V.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        self.det().max(0.0).sqrt()
    }

    /// Covariance matrix of a state with the given centered moments.
    pub fn from_moments(m: &Moments) -> Self {
        let diag = 1.0 + 2.0 * m.cov_adag_a;
        let re2 = 2.0 * m.var_a.re;
        Self { v11: diag + re2, v22: diag - re2, v12: 2.0 * m.var_a.im }
    }
}

fn check_greens(u: Complex64, v: f64) -> Result<()> {
    if !(u.norm() <= 1.0 + 1e-6) {
        return Err(Error::Domain { what: "|u|", value: u.norm() });
    }
    if !(v >= -1e-9) {
        return Err(Error::Domain { what: "v", value: v });
    }
    Ok(())
}

/// Covariance matrix at time t from the initial moments and the Green's
/// functions `u(t)`, `v(t)`.
pub fn propagate_covariance(m0: &Moments, u: Complex64, v: f64) -> Result<CovarianceMatrix> {
    check_greens(u, v)?;
    let squeeze = u * u * m0.var_a;
    let squeeze_conj = u.conj() * u.conj() * m0.var_adag();
    let diag = 1.0 + 2.0 * v + 2.0 * u.norm_sqr() * m0.cov_adag_a;
    let off = Complex64::i() * (squeeze_conj - squeeze);
    if off.im.abs() > 1e-10 * off.re.abs().max(1.0) {
        return Err(Error::Consistency(format!("V12 has imaginary residue {:e}", off.im)));
    }
    let cm = CovarianceMatrix {
        v11: diag + (squeeze + squeeze_conj).re,
        v22: diag - (squeeze + squeeze_conj).re,
        v12: off.re,
    };
    let det = cm.det();
    if det < 1.0 - NU_SLACK {
        return Err(Error::Physicality { det });
    }
    Ok(cm)
}

/// ⟨a†(t)a(t)⟩ = |u|² ⟨a†(0)a(0)⟩ + v.
pub fn mean_photon(photon0: f64, u: Complex64, v: f64) -> Result<f64> {
    check_greens(u, v)?;
    let mu = u.norm_sqr() * photon0 + v;
    if mu < -1e-9 || !mu.is_finite() {
        return Err(Error::Domain { what: "mean photon number", value: mu });
    }
    Ok(mu.max(0.0))
}

fn xlog2x(x: f64) -> f64 {
    if x < XLOGX_FLOOR {
        0.0
    } else {
        x * x.log2()
    }
}

fn clamp_nu(nu: f64) -> Result<f64> {
    if nu.is_nan() || nu < 1.0 - NU_SLACK {
        return Err(Error::Domain { what: "nu", value: nu });
    }
    Ok(nu.max(1.0))
}

/// Von Neumann entropy (bits) of a single-mode Gaussian state with
/// symplectic eigenvalue ν.
pub fn entropy(nu: f64) -> Result<f64> {
    let nu = clamp_nu(nu)?;
    Ok(xlog2x((nu + 1.0) / 2.0) - xlog2x((nu - 1.0) / 2.0))
}

/// Entropy (bits) of the thermal state with mean occupation μ̄.
pub fn thermal_entropy(mu_bar: f64) -> f64 {
    xlog2x(mu_bar + 1.0) - xlog2x(mu_bar)
}

/// Relative entropy of coherence (bits): the distance to the thermal state
/// carrying the same mean photon number.
pub fn coherence(nu: f64, mu_bar: f64) -> Result<f64> {
    if nu.is_nan() {
        return Err(Error::Domain { what: "nu", value: nu });
    }
    if mu_bar.is_nan() || mu_bar < -1e-9 {
        return Err(Error::Domain { what: "mu_bar", value: mu_bar });
    }
    let nu = clamp_nu(nu)?;
    let mu = mu_bar.max(0.0);
    Ok(xlog2x((nu - 1.0) / 2.0) - xlog2x((nu + 1.0) / 2.0) + thermal_entropy(mu))
}

/// Coherence and its ingredients at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub t: f64,
    pub nu: f64,
    pub mu_bar: f64,
    pub entropy: f64,
    pub coherence: f64,
}

impl CoherencePoint {
    /// Evaluates the state built from `init` after evolution with `u`, `v`.
    pub fn evaluate(init: &GaussianInit, t: f64, u: Complex64, v: f64) -> Result<Self> {
        let m0 = init.initial_moments();
        let cm = propagate_covariance(&m0, u, v)?;
        let nu = cm.symplectic_eigenvalue();
        let mu_bar = mean_photon(m0.photon_number(), u, v)?;
        Ok(Self { t, nu, mu_bar, entropy: entropy(nu)?, coherence: coherence(nu, mu_bar)? })
    }
}

/// Coherence at every point of a Green's-function trajectory.
pub fn coherence_trajectory(init: &GaussianInit, traj: &GreensTrajectory) -> Result<Vec<CoherencePoint>> {
    if traj.u.len() != traj.v.len() || traj.u.len() != traj.grid.len() {
        return Err(Error::InvalidParameter("trajectory series and grid lengths differ".into()));
    }
    traj.u
        .iter()
        .zip(&traj.v)
        .enumerate()
        .map(|(i, (&u, &v))| CoherencePoint::evaluate(init, traj.grid.time(i), u, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn initial_moment_examples() {
        let m = GaussianInit::real(0.0, 0.0, 0.7).unwrap().initial_moments();
        assert_eq!(m.mean_a, Complex64::new(0.0, 0.0));
        assert_eq!(m.var_a, Complex64::new(0.0, 0.0));
        assert_relative_eq!(m.cov_adag_a, 0.7);

        let m = GaussianInit::real(1.0, 0.0, 0.0).unwrap().initial_moments();
        assert_eq!(m.mean_a, Complex64::new(1.0, 0.0));
        assert_eq!(m.var_a.norm(), 0.0);
        assert_eq!(m.cov_adag_a, 0.0);

        let m = GaussianInit::real(0.0, 0.5, 1.0).unwrap().initial_moments();
        let (sh, ch) = (0.5f64.sinh(), 0.5f64.cosh());
        assert_relative_eq!(m.var_a.re, -3.0 * sh * ch, max_relative = 1e-15);
        assert_relative_eq!(m.cov_adag_a, ch * ch + 2.0 * sh * sh, max_relative = 1e-15);
    }

    #[test]
    fn invalid_init_rejected() {
        assert!(GaussianInit::real(0.0, 0.0, -0.1).is_err());
        assert!(GaussianInit::real(f64::NAN, 0.0, 0.1).is_err());
    }

    #[test]
    fn covariance_examples() {
        let one = Complex64::new(1.0, 0.0);
        let m = GaussianInit::real(0.0, 0.0, 2.0).unwrap().initial_moments();
        let cm = propagate_covariance(&m, one, 0.0).unwrap();
        assert_eq!((cm.v11, cm.v22, cm.v12), (5.0, 5.0, 0.0));

        let m = GaussianInit::real(1.3, 0.8, 0.4).unwrap().initial_moments();
        let cm = propagate_covariance(&m, Complex64::new(0.0, 0.0), 0.9).unwrap();
        assert_eq!((cm.v11, cm.v22, cm.v12), (2.8, 2.8, 0.0));

        let m = GaussianInit::real(0.0, 0.5, 1.0).unwrap().initial_moments();
        let cm = propagate_covariance(&m, one, 0.0).unwrap();
        assert_relative_eq!(cm.v11, 1.0 + 2.0 * m.cov_adag_a + 2.0 * m.var_a.re, max_relative = 1e-15);
        assert_relative_eq!(cm.det(), 9.0, max_relative = 1e-13);
        assert_eq!(cm, CovarianceMatrix::from_moments(&m));
    }

    #[test]
    fn covariance_rejects_unphysical_input() {
        let m = GaussianInit::real(0.0, 0.5, 1.0).unwrap().initial_moments();
        assert!(propagate_covariance(&m, Complex64::new(1.1, 0.0), 0.0).is_err());
        assert!(propagate_covariance(&m, Complex64::new(0.5, 0.0), -0.1).is_err());
        // a squeezed variance too large for the diagonal breaks det V ≥ 1
        let bad = Moments { mean_a: Complex64::new(0.0, 0.0), var_a: Complex64::new(-2.0, 0.0), cov_adag_a: 0.1 };
        assert!(matches!(
            propagate_covariance(&bad, Complex64::new(1.0, 0.0), 0.0),
            Err(Error::Physicality { .. })
        ));
    }

    #[test]
    fn mean_photon_examples() {
        assert_eq!(mean_photon(0.0, Complex64::new(0.3, 0.4), 0.0).unwrap(), 0.0);
        let init = GaussianInit::real(1.0, 0.0, 0.0).unwrap();
        assert_eq!(mean_photon(init.photon_number(), Complex64::new(1.0, 0.0), 0.0).unwrap(), 1.0);
        let init = GaussianInit::real(1.0, 0.5, 1.0).unwrap();
        let (sh, ch) = (0.5f64.sinh(), 0.5f64.cosh());
        let got = mean_photon(init.photon_number(), Complex64::new(0.0, 0.5), 0.3).unwrap();
        assert_relative_eq!(got, 0.25 * (1.0 + ch * ch + 2.0 * sh * sh) + 0.3, max_relative = 1e-14);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        assert_relative_eq!(entropy(3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(entropy(1.0 - 5e-7).unwrap(), 0.0);
        assert!(entropy(0.99).is_err());
        // thermal entropy equals the entropy of ν = 2n̄+1
        for n in [0.1, 1.0, 10.0] {
            assert_relative_eq!(entropy(2.0 * n + 1.0).unwrap(), thermal_entropy(n), max_relative = 1e-13);
        }
    }

    #[test]
    fn entropy_matches_thermal_distribution_sum() {
        for n in [0.1f64, 0.5, 1.0, 4.0] {
            let q = n / (1.0 + n);
            let sum: f64 = (0..4000)
                .map(|k| {
                    let p = q.powi(k) / (1.0 + n);
                    if p > 0.0 { -p * p.log2() } else { 0.0 }
                })
                .sum();
            assert_relative_eq!(entropy(2.0 * n + 1.0).unwrap(), sum, max_relative = 1e-12);
        }
    }

    #[test]
    fn coherence_examples() {
        for mu in [0.0, 0.1, 1.0, 10.0, 37.5] {
            assert!(coherence(2.0 * mu + 1.0, mu).unwrap().abs() < 1e-9);
        }
        assert_relative_eq!(coherence(1.0, 1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(coherence(1.0, 0.0).unwrap(), 0.0);
        assert!(coherence(f64::NAN, 1.0).is_err());
        assert!(coherence(1.0, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn coherence_is_nonnegative_for_physical_states(
            alpha in 0.0f64..3.0, phase in 0.0f64..6.3, r in -1.5f64..1.5, n in 0.0f64..20.0,
            ur in 0.0f64..1.0, uphase in 0.0f64..6.3, v in 0.0f64..30.0,
        ) {
            let init = GaussianInit::new(Complex64::from_polar(alpha, phase), r, n).unwrap();
            let p = CoherencePoint::evaluate(&init, 0.0, Complex64::from_polar(ur, uphase), v).unwrap();
            prop_assert!(p.coherence >= -1e-9);
            prop_assert!(p.nu >= 1.0 - 1e-6);
            prop_assert!(p.entropy >= 0.0);
        }

        #[test]
        fn uncertainty_holds_initially(r in -2.0f64..2.0, n in 0.0f64..50.0) {
            let m = GaussianInit::real(0.0, r, n).unwrap().initial_moments();
            let det = CovarianceMatrix::from_moments(&m).det();
            prop_assert!((det - (2.0 * n + 1.0).powi(2)).abs() <= 1e-9 * det);
        }
    }
}

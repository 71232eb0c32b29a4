//! Ohmic-family bosonic environment.
//!
//! Natural units throughout: ħ = k_B = 1 and the system frequency is the unit
//! of frequency, so time is measured in inverse system frequencies.
//!
//! The spectral density is
//!
//! ```text
//! J(ω) = η ω (ω/ω_c)^(s-1) e^(-ω/ω_c)
//! ```
//!
//! and both kernels are one-sided Fourier transforms of it. Because the
//! exponential cutoff makes them Laplace transforms of a power law, they have
//! closed forms: the memory kernel directly, the thermal kernel as a
//! Hurwitz-zeta-type series obtained by expanding the Bose factor into
//! geometric terms. The adaptive-quadrature versions are kept alongside as
//! an independent route.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// System frequency; every other frequency is measured in this unit.
pub const OMEGA_0: f64 = 1.0;

/// Spectral-density family plus bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Absolute coupling strength η.
    pub eta: f64,
    /// Ohmicity exponent: `s < 1` sub-Ohmic, `s = 1` Ohmic, `s > 1` super-Ohmic.
    pub s: f64,
    /// Cutoff frequency ω_c.
    pub omega_c: f64,
    /// Scaled temperature k_B T / ħω_0.
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(eta: f64, s: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        let spec = Self { eta, s, omega_c, temperature };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a bath whose coupling is given in units of the critical coupling.
    pub fn with_relative_coupling(eta_rel: f64, s: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        let probe = Self::new(0.0, s, omega_c, temperature)?;
        if !(eta_rel.is_finite() && eta_rel >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta_rel must be finite and >= 0, got {eta_rel}")));
        }
        Self::new(eta_rel * probe.critical_coupling(), s, omega_c, temperature)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite();
        if !(ok(self.s) && self.s > 0.0) {
            return Err(Error::InvalidParameter(format!("s must be > 0, got {}", self.s)));
        }
        if !(ok(self.omega_c) && self.omega_c > 0.0) {
            return Err(Error::InvalidParameter(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if !(ok(self.eta) && self.eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(ok(self.temperature) && self.temperature >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Same bath at a different temperature.
    pub fn at_temperature(&self, temperature: f64) -> Self {
        Self { temperature, ..*self }
    }

    /// J(ω) for ω ≥ 0.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain { what: "omega", value: omega });
        }
        Ok(self.density(omega))
    }

    /// Unchecked J(ω); `omega` must be non-negative.
    #[inline]
    pub(crate) fn density(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        let x = omega / self.omega_c;
        self.eta * omega * x.powf(self.s - 1.0) * (-x).exp()
    }

    /// η_c = ω_0 / (ω_c Γ(s)): the coupling at which a bound mode splits off
    /// below the continuum.
    pub fn critical_coupling(&self) -> f64 {
        OMEGA_0 / (self.omega_c * gamma(self.s))
    }

    /// Coupling in units of the critical coupling.
    pub fn relative_coupling(&self) -> f64 {
        self.eta / self.critical_coupling()
    }

    /// Bose–Einstein occupation n̄(ω) = 1/(e^{ω/T} − 1) for ω > 0.
    pub fn bose_occupation(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain { what: "omega", value: omega });
        }
        Ok(self.occupation(omega))
    }

    #[inline]
    pub(crate) fn occupation(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            return 0.0;
        }
        1.0 / (omega / self.temperature).exp_m1()
    }

    /// J(ω)·n̄(ω), the weight of the thermal kernel. Finite products are
    /// returned for every ω > 0; for `s < 1` it diverges integrably at 0.
    #[inline]
    pub fn thermal_weight(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 || omega <= 0.0 {
            return 0.0;
        }
        self.density(omega) * self.occupation(omega)
    }

    /// Total kernel weight ∫J dω = η ω_c² Γ(s+1).
    pub fn total_weight(&self) -> f64 {
        self.eta * self.omega_c * self.omega_c * gamma(self.s + 1.0)
    }

    /// Memory kernel g(τ) = ∫₀^∞ J(ω) e^{-iωτ} dω in closed form,
    /// η ω_c² Γ(s+1) (1 + iω_c τ)^{-(s+1)}.
    pub fn memory_kernel(&self, dt: f64) -> Complex64 {
        let z = Complex64::new(1.0, self.omega_c * dt);
        let prefactor = self.eta * self.omega_c * self.omega_c * gamma(self.s + 1.0);
        z.powf(-(self.s + 1.0)) * prefactor
    }

    /// Thermal kernel g̃(τ) = ∫₀^∞ J(ω) n̄(ω) e^{-iωτ} dω.
    ///
    /// Expanding n̄ = Σ_{m≥1} e^{-mω/T} turns each term into a Laplace
    /// transform, giving η ω_c^{1-s} Γ(s+1) T^{s+1} Σ_{m≥1} (m + a)^{-(s+1)}
    /// with a = T/ω_c + iTτ. The tail of the sum is closed with
    /// Euler–Maclaurin.
    pub fn thermal_kernel(&self, dt: f64) -> Complex64 {
        let t = self.temperature;
        if t == 0.0 || self.eta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p = self.s + 1.0;
        let a = Complex64::new(t / self.omega_c, t * dt);
        let prefactor = self.eta * self.omega_c.powf(1.0 - self.s) * gamma(p) * t.powf(p);
        shifted_zeta(p, a) * prefactor
    }

    /// Memory kernel by adaptive quadrature of the defining integral.
    pub fn memory_kernel_quadrature(&self, dt: f64, tol: Tolerance) -> Result<Complex64> {
        self.fourier_quadrature(|w| self.density(w), dt, tol)
    }

    /// Thermal kernel by adaptive quadrature of the defining integral.
    pub fn thermal_kernel_quadrature(&self, dt: f64, tol: Tolerance) -> Result<Complex64> {
        if self.temperature == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.fourier_quadrature(|w| self.thermal_weight(w), dt, tol)
    }

    /// ∫₀^∞ weight(ω) e^{-iωτ} dω. The low-frequency panel [0, ω_c/10] uses
    /// ω = y² so that power-law endpoint behavior becomes regular; the rest
    /// runs to 60 ω_c, past which e^{-ω/ω_c} is below 1e-26.
    fn fourier_quadrature<F: Fn(f64) -> f64>(&self, weight: F, dt: f64, tol: Tolerance) -> Result<Complex64> {
        let split = self.omega_c / 10.0;
        let upper = 60.0 * self.omega_c;
        let phase = |w: f64| Complex64::from_polar(1.0, -w * dt);
        let low = quad::integrate(
            |y: f64| {
                let w = y * y;
                phase(w) * (weight(w) * 2.0 * y)
            },
            0.0,
            split.sqrt(),
            tol,
        )?;
        // seed enough panels to resolve the oscillation before adapting
        let cycles = ((upper - split) * dt.abs() / (2.0 * PI)).ceil() as usize;
        let high = quad::integrate_split(|w: f64| phase(w) * weight(w), split, upper, cycles.max(8), tol)?;
        Ok(low.value + high.value)
    }
}

/// Σ_{m≥1} (m + a)^{-p} for p > 1 and Re a > 0.
fn shifted_zeta(p: f64, a: Complex64) -> Complex64 {
    // Bernoulli numbers B_2 .. B_16
    const B2K: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    const DIRECT: usize = 16;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..DIRECT {
        sum += (a + m as f64).powf(-p);
    }
    let z = a + DIRECT as f64;
    // ∫_M^∞ f + f(M)/2
    let mut tail = z.powf(1.0 - p) / (p - 1.0) + z.powf(-p) * 0.5;
    // − Σ B_2k/(2k)! f^{(2k-1)}(M), with f^{(n)} = (-1)^n (p)_n z^{-p-n}
    let zinv = z.inv();
    let mut rising = p; // (p)_{2k-1}
    let mut factorial = 2.0; // (2k)!
    let mut power = z.powf(-p) * zinv; // z^{-p-(2k-1)}
    for (k, b) in B2K.iter().enumerate() {
        let k = k + 1;
        // odd derivative carries a minus sign
        tail += power * (b / factorial * rising);
        let n = 2.0 * k as f64;
        rising *= (p + n - 1.0) * (p + n);
        factorial *= (n + 1.0) * (n + 2.0);
        power = power * zinv * zinv;
    }
    sum + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ohmic(eta: f64, t: f64) -> BathSpec {
        BathSpec::new(eta, 1.0, 5.0, t).unwrap()
    }

    #[test]
    fn spectral_density_examples() {
        assert_eq!(ohmic(0.2, 1.0).spectral_density(0.0).unwrap(), 0.0);
        assert_relative_eq!(ohmic(0.2, 1.0).spectral_density(5.0).unwrap(), 0.2 * 5.0 * (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(0.2 * 5.0 * (-1.0f64).exp(), 0.36788, epsilon = 1e-5);
        // sub-Ohmic leading behaviour η√(ω ω_c)
        let sub = BathSpec::new(0.3, 0.5, 5.0, 1.0).unwrap();
        let w = 1e-10;
        assert_relative_eq!(sub.spectral_density(w).unwrap(), 0.3 * (w * 5.0).sqrt(), max_relative = 1e-9);
        assert!(matches!(sub.spectral_density(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn critical_coupling_examples() {
        assert_relative_eq!(BathSpec::new(0.0, 1.0, 5.0, 0.0).unwrap().critical_coupling(), 0.2, max_relative = 1e-14);
        assert_relative_eq!(BathSpec::new(0.0, 3.0, 5.0, 0.0).unwrap().critical_coupling(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(
            BathSpec::new(0.0, 0.5, 5.0, 0.0).unwrap().critical_coupling(),
            1.0 / (5.0 * PI.sqrt()),
            max_relative = 1e-14
        );
        for wc in [0.5, 1.0, 5.0, 17.0] {
            let b = BathSpec::new(0.0, 1.0, wc, 0.0).unwrap();
            assert_relative_eq!(b.critical_coupling() * wc, 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn relative_coupling_roundtrip() {
        let b = BathSpec::with_relative_coupling(2.0, 0.5, 5.0, 1.0).unwrap();
        assert_relative_eq!(b.relative_coupling(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(BathSpec::new(0.1, 0.0, 5.0, 1.0).is_err());
        assert!(BathSpec::new(0.1, 1.0, -5.0, 1.0).is_err());
        assert!(BathSpec::new(-0.1, 1.0, 5.0, 1.0).is_err());
        assert!(BathSpec::new(0.1, 1.0, 5.0, -1.0).is_err());
        assert!(BathSpec::new(f64::NAN, 1.0, 5.0, 1.0).is_err());
    }

    #[test]
    fn bose_occupation_examples() {
        assert_eq!(ohmic(0.2, 0.0).bose_occupation(1.0).unwrap(), 0.0);
        let t = 3.7;
        assert_relative_eq!(ohmic(0.2, t).bose_occupation(t * 2f64.ln()).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(ohmic(0.2, 20.0).bose_occupation(1.0).unwrap(), 19.504, epsilon = 1e-3);
        assert_relative_eq!(ohmic(0.2, 20.0).bose_occupation(1.0).unwrap(), 1.0 / (0.05f64.exp() - 1.0), max_relative = 1e-14);
        assert!(ohmic(0.2, 1.0).bose_occupation(0.0).is_err());
    }

    #[test]
    fn memory_kernel_at_zero_lag() {
        let b = ohmic(0.2, 1.0);
        assert_relative_eq!(b.memory_kernel(0.0).re, 5.0, max_relative = 1e-14);
        assert_eq!(b.memory_kernel(0.0).im, 0.0);
        assert_relative_eq!(b.memory_kernel(0.0).re, b.total_weight(), max_relative = 1e-14);
    }

    #[test]
    fn memory_kernel_matches_ohmic_closed_form() {
        let b = ohmic(0.2, 1.0);
        for i in 0..=200 {
            let dt = 0.1 * i as f64;
            let z = Complex64::new(1.0, 5.0 * dt);
            let exact = Complex64::new(0.2 * 25.0, 0.0) / (z * z);
            let got = b.memory_kernel(dt);
            assert!((got - exact).norm() <= 1e-8 * exact.norm(), "dt={dt}");
        }
    }

    #[test]
    fn memory_kernel_quadrature_agrees_for_all_families() {
        let tol = Tolerance::new(1e-13, 1e-11);
        for s in [0.5, 1.0, 3.0] {
            let b = BathSpec::new(0.37, s, 5.0, 1.0).unwrap();
            for dt in [0.0, 0.05, 0.7, 3.0, 12.5, 20.0] {
                let closed = b.memory_kernel(dt);
                let quad = b.memory_kernel_quadrature(dt, tol).unwrap();
                assert!(
                    (closed - quad).norm() <= 1e-8 * closed.norm().max(1e-3),
                    "s={s} dt={dt}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn thermal_kernel_series_matches_quadrature() {
        let tol = Tolerance::new(1e-13, 1e-11);
        for s in [0.5, 1.0, 3.0] {
            for t in [0.1, 1.0, 20.0] {
                let b = BathSpec::new(0.21, s, 5.0, t).unwrap();
                for dt in [0.0, 0.01, 0.3, 2.0, 15.0, 50.0] {
                    let series = b.thermal_kernel(dt);
                    let quad = b.thermal_kernel_quadrature(dt, tol).unwrap();
                    let scale = b.thermal_kernel(0.0).norm();
                    assert!(
                        (series - quad).norm() <= 1e-9 * scale,
                        "s={s} T={t} dt={dt}: {series} vs {quad}"
                    );
                }
            }
        }
    }

    #[test]
    fn thermal_kernel_zero_temperature_vanishes() {
        let b = ohmic(0.2, 0.0);
        for dt in [0.0, 1.0, -3.0] {
            assert_eq!(b.thermal_kernel(dt), Complex64::new(0.0, 0.0));
        }
        assert_eq!(b.thermal_weight(1.0), 0.0);
    }

    #[test]
    fn thermal_kernel_zero_lag_is_positive_real() {
        // brute force: composite midpoint in y with ω = y² on a long range
        let b = ohmic(0.2, 1.0);
        let g0 = b.thermal_kernel(0.0);
        assert!(g0.im.abs() < 1e-15 && g0.re > 0.0);
        let n = 400_000;
        let ymax = (60.0f64 * 5.0).sqrt();
        let h = ymax / n as f64;
        let brute: f64 = (0..n)
            .map(|i| {
                let y = (i as f64 + 0.5) * h;
                b.thermal_weight(y * y) * 2.0 * y * h
            })
            .sum();
        assert_relative_eq!(g0.re, brute, max_relative = 1e-8);
    }

    proptest! {
        #[test]
        fn spectral_density_nonnegative(eta in 0.0f64..10.0, s in 0.05f64..6.0, wc in 0.1f64..50.0, w in 0.0f64..500.0) {
            let b = BathSpec::new(eta, s, wc, 1.0).unwrap();
            let j = b.spectral_density(w).unwrap();
            prop_assert!(j >= 0.0 && j.is_finite());
        }

        #[test]
        fn kernels_are_hermitian_in_lag(s in 0.2f64..4.0, t in 0.0f64..30.0, dt in 0.0f64..60.0) {
            let b = BathSpec::new(0.3, s, 5.0, t).unwrap();
            let g = b.memory_kernel(dt);
            let gm = b.memory_kernel(-dt);
            prop_assert!((g - gm.conj()).norm() <= 1e-14 * g.norm().max(1e-300));
            let th = b.thermal_kernel(dt);
            let thm = b.thermal_kernel(-dt);
            prop_assert!((th - thm.conj()).norm() <= 1e-12 * th.norm().max(1e-300));
        }

        #[test]
        fn thermal_kernel_zero_lag_real_nonnegative(s in 0.2f64..4.0, t in 0.0f64..40.0) {
            let b = BathSpec::new(0.3, s, 5.0, t).unwrap();
            let g0 = b.thermal_kernel(0.0);
            prop_assert!(g0.re >= 0.0);
            prop_assert!(g0.im.abs() <= 1e-14 * g0.re.max(1e-300));
        }
    }
}

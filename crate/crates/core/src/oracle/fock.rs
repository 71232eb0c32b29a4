//! Gaussian states built explicitly in a truncated Fock basis.
//!
//! `D(α)` and `S(r)` are exponentiated from their Hermitian generators in a
//! working space larger than the requested cutoff, applied to the thermal
//! diagonal, then projected back. The weight lost in the projection is the
//! truncation leakage.

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianInit, Moments};

pub const DEFAULT_CUTOFF: usize = 60;
pub const MAX_LEAKAGE: f64 = 1e-8;
const MAX_CUTOFF: usize = 1000;
const XLOGX_FLOOR: f64 = 1e-15;

/// Density matrix on photon numbers `0..=cutoff`.
#[derive(Debug, Clone)]
pub struct FockState {
    pub cutoff: usize,
    pub density: Array2<Complex64>,
    /// `1 - trace` before renormalization.
    pub leakage: f64,
}

/// Moments, entropy and coherence read off a Fock-space density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSummary {
    pub moments: Moments,
    pub photon_number: f64,
    pub entropy: f64,
    pub coherence: f64,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn annihilation(dim: usize) -> Array2<Complex64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Eigenpairs of a Hermitian matrix. LAPACK is handed a column-major copy:
/// for row-major complex input the returned eigenvectors come back
/// conjugated.
fn hermitian_eigh(h: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>)> {
    let mut f = Array2::zeros(h.raw_dim().f());
    f.assign(h);
    f.eigh(UPLO::Upper)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e}")))
}

/// `exp(-i H)` for Hermitian `H`.
fn unitary_from_generator(h: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (vals, vecs) = hermitian_eigh(h)?;
    let phases = Array1::from_iter(vals.iter().map(|&l| (-I * l).exp()));
    let scaled = &vecs * &phases.view().insert_axis(ndarray::Axis(0));
    Ok(scaled.dot(&dagger(&vecs)))
}

fn thermal_probability(n_bar: f64, n: usize) -> f64 {
    if n_bar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // n̄ⁿ/(1+n̄)^{n+1} in log form to stay finite for large n
    (n as f64 * (n_bar / (1.0 + n_bar)).ln() - (1.0 + n_bar).ln()).exp()
}

/// Builds `D(α) S(r) ρ_th S†(r) D†(α)` on photon numbers `0..=cutoff`.
pub fn fock_state(init: &GaussianInit, cutoff: usize) -> Result<FockState> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive".into()));
    }
    let work = cutoff + 40.max(cutoff / 2);
    let a = annihilation(work);
    let ad = dagger(&a);

    let mut rho = Array2::<Complex64>::zeros((work, work));
    for n in 0..work {
        rho[[n, n]] = Complex64::new(thermal_probability(init.n_bar, n), 0.0);
    }

    if init.r != 0.0 {
        // S(r) = exp[r(a² - a†²)/2] = exp(-iK),  K = i r (a² - a†²)/2
        let k = (a.dot(&a) - ad.dot(&ad)) * (I * init.r * 0.5);
        let s = unitary_from_generator(&k)?;
        rho = s.dot(&rho).dot(&dagger(&s));
    }
    if init.alpha != Complex64::new(0.0, 0.0) {
        // D(α) = exp(α a† - ᾱ a) = exp(-iH),  H = i(α a† - ᾱ a)
        let h = (&ad * init.alpha - &a * init.alpha.conj()) * I;
        let d = unitary_from_generator(&h)?;
        rho = d.dot(&rho).dot(&dagger(&d));
    }

    let mut density = rho.slice(ndarray::s![..=cutoff, ..=cutoff]).to_owned();
    let trace: f64 = (0..=cutoff).map(|n| density[[n, n]].re).sum();
    let leakage = 1.0 - trace;
    if !(leakage <= MAX_LEAKAGE) {
        return Err(Error::Truncation { cutoff, leakage });
    }
    density.mapv_inplace(|z| z / trace);
    // remove antihermitian roundoff
    let herm = (&density + &dagger(&density)) * Complex64::new(0.5, 0.0);
    Ok(FockState { cutoff, density: herm, leakage })
}

/// [`fock_state`] starting at [`DEFAULT_CUTOFF`] and doubling the cutoff
/// until the leakage is acceptable.
pub fn fock_state_auto(init: &GaussianInit) -> Result<FockState> {
    let mut cutoff = DEFAULT_CUTOFF;
    loop {
        match fock_state(init, cutoff) {
            Err(Error::Truncation { .. }) if cutoff < MAX_CUTOFF => cutoff = (2 * cutoff).min(MAX_CUTOFF),
            other => return other,
        }
    }
}

fn xlog2x(x: f64) -> f64 {
    if x < XLOGX_FLOOR { 0.0 } else { x * x.log2() }
}

/// Moments by trace against ladder operators, von Neumann entropy from the
/// spectrum, and coherence `Tr ρ log₂ρ - Tr ρ log₂ρ_d` against the thermal
/// state with the same mean photon number.
pub fn fock_moments_entropy_coherence(state: &FockState) -> Result<FockSummary> {
    let rho = &state.density;
    let dim = state.cutoff + 1;

    let mut mean_a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut photons = 0.0;
    for n in 0..dim {
        let nf = n as f64;
        photons += nf * rho[[n, n]].re;
        if n >= 1 {
            mean_a += rho[[n, n - 1]] * nf.sqrt();
        }
        if n >= 2 {
            a2 += rho[[n, n - 2]] * (nf * (nf - 1.0)).sqrt();
        }
    }
    let moments = Moments {
        mean_a,
        var_a: a2 - mean_a * mean_a,
        cov_adag_a: photons - mean_a.norm_sqr(),
    };

    let (eigs, _) = hermitian_eigh(rho)?;
    let entropy = -eigs.iter().map(|&p| xlog2x(p)).sum::<f64>();

    // log₂ p_n(μ̄) = n log₂(μ̄/(1+μ̄)) - log₂(1+μ̄)
    let cross: f64 = if photons <= 0.0 {
        0.0
    } else {
        let ratio = (photons / (1.0 + photons)).log2();
        let offset = (1.0 + photons).log2();
        (0..dim).map(|n| rho[[n, n]].re * (n as f64 * ratio - offset)).sum()
    };
    Ok(FockSummary { moments, photon_number: photons, entropy, coherence: -entropy - cross })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_diagonal() {
        let init = GaussianInit::real(0.0, 0.0, 1.0).unwrap();
        let st = fock_state(&init, 60).unwrap();
        for n in 0..=60 {
            let p = 0.5f64.powi(n as i32 + 1);
            assert!((st.density[[n, n]].re - p).abs() < 1e-15, "n={n}");
        }
        let sum = fock_moments_entropy_coherence(&st).unwrap();
        assert!(sum.coherence.abs() < 1e-9);
        assert!((sum.entropy - 2.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_state_is_poisson() {
        let init = GaussianInit::real(1.0, 0.0, 0.0).unwrap();
        let st = fock_state(&init, 60).unwrap();
        let mut fact = 1.0;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let p = (-1.0f64).exp() / fact;
            assert!((st.density[[n, n]].re - p).abs() < 1e-12, "n={n}");
        }
        let sum = fock_moments_entropy_coherence(&st).unwrap();
        assert!((sum.coherence - 2.0).abs() < 1e-6);
        assert!(sum.entropy.abs() < 1e-9);
        assert!((sum.moments.mean_a - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn squeezed_thermal_moments() {
        let init = GaussianInit::real(0.0, 0.5, 1.0).unwrap();
        let m = fock_moments_entropy_coherence(&fock_state(&init, 80).unwrap()).unwrap().moments;
        let (sh, ch) = (0.5f64.sinh(), 0.5f64.cosh());
        assert!((m.var_a - Complex64::new(-3.0 * sh * ch, 0.0)).norm() < 1e-6, "{m:?}");
        assert!((m.cov_adag_a - (ch * ch + 2.0 * sh * sh)).abs() < 1e-6);
    }

    #[test]
    fn valid_density_matrix() {
        let init = GaussianInit::new(Complex64::new(0.7, -0.4), 0.4, 0.5).unwrap();
        let st = fock_state(&init, 60).unwrap();
        let tr: f64 = (0..=60).map(|n| st.density[[n, n]].re).sum();
        assert!((tr - 1.0).abs() < 1e-10);
        let (eigs, _) = hermitian_eigh(&st.density).unwrap();
        assert!(eigs.iter().all(|&p| p >= -1e-10));
        assert!(st.leakage <= MAX_LEAKAGE);
    }

    #[test]
    fn generator_exponential_matches_series() {
        // exp(-iH) against a Taylor series for a small non-real Hermitian H
        let a = annihilation(6);
        let h = (&dagger(&a) * Complex64::new(0.2, 0.1) - &a * Complex64::new(0.2, -0.1)) * I
            + a.dot(&dagger(&a)) * Complex64::new(0.05, 0.0);
        let u = unitary_from_generator(&h).unwrap();
        let mut term = Array2::<Complex64>::eye(6);
        let mut series = term.clone();
        for k in 1..40 {
            term = term.dot(&h) * (-I / k as f64);
            series = series + &term;
        }
        let err = (&u - &series).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn truncation_guard() {
        let init = GaussianInit::real(3.0, 0.0, 2.0).unwrap();
        assert!(matches!(fock_state(&init, 10), Err(Error::Truncation { cutoff: 10, .. })));
        let st = fock_state_auto(&init).unwrap();
        assert!(st.cutoff >= 60 && st.leakage <= MAX_LEAKAGE);
    }
}

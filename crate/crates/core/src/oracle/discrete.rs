//! Exact evolution of a finite Fano–Anderson model.
//!
//! With N bath modes the Heisenberg equations close on the (N+1)-vector
//! `(a, b_1, …, b_N)` and are generated by the real symmetric matrix
//!
//! ```text
//!     ⎡ ω_0  V_1  …  V_N ⎤
//! H = ⎢ V_1  ω_1         ⎥
//!     ⎢  ⋮        ⋱      ⎥
//!     ⎣ V_N          ω_N ⎦
//! ```
//!
//! so `a(t) = Σ_j G_0j(t) c_j(0)` with `G = e^{-iHt}`. One dense
//! eigendecomposition gives the propagator at every time without stepping.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::bath::{BathSpec, OMEGA_0};
use crate::error::{Error, Result};

/// Finite set of bath modes with real, non-negative couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub mode_freqs: Vec<f64>,
    pub couplings: Vec<f64>,
}

/// How the continuum is cut into modes: midpoint rule in `x` on `(0, 1)`
/// with `ω = omega_max · x^power`, optionally followed by one extra mode that
/// stands in for the spectrum above `omega_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub modes: usize,
    /// Upper frequency in units of ω_c.
    pub omega_max: f64,
    pub power: f64,
    pub lump_tail: bool,
}

impl Discretization {
    /// Default for a given bath: up to 20 ω_c plus a tail mode, graded so that in `x` the
    /// weights `J dω ∝ x^{p(s+1)-1}` and `J n̄ dω ∝ x^{ps-1}` are smooth at
    /// the origin. That needs `ps` to be a positive integer, and
    /// `p(s+1) ≥ 3` keeps the midpoint error in the bound-state condition
    /// `∫J/(ω_b - ω)` beyond second order.
    pub fn for_spec(spec: &BathSpec, modes: usize) -> Self {
        let s = spec.s;
        let k = s.max(3.0 * s / (s + 1.0)).ceil();
        Self { modes, omega_max: 20.0, power: (k / s).max(1.0), lump_tail: true }
    }

    /// Plain uniform midpoint rule on `[0, omega_max·ω_c]`.
    pub fn uniform(modes: usize, omega_max: f64) -> Self {
        Self { modes, omega_max, power: 1.0, lump_tail: false }
    }
}

/// Single mode carrying the spectrum above `cut`: its weight matches
/// `∫_cut^∞ J dω` and its frequency `∫J dω / ∫J/ω dω` over the same range, so
/// the tail's static shift `∫J/(ω' - ω)` is reproduced for ω well below the
/// cut. Without it a cut low enough to keep the mode spacing fine loses a
/// visible part of the s = 3 spectrum.
fn tail_mode(spec: &BathSpec, cut: f64) -> Option<(f64, f64)> {
    let x = cut / spec.omega_c;
    let s = spec.s;
    // ∫_cut^∞ η ω^s ω_c^{1-s} e^{-ω/ω_c} ω^{-m} dω = η ω_c^{2-m} Γ(s+1-m, x)
    let weight = spec.eta * spec.omega_c.powi(2) * gamma(s + 1.0) * gamma_ur(s + 1.0, x);
    let inverse = spec.eta * spec.omega_c * gamma(s) * gamma_ur(s, x);
    if weight > 0.0 && inverse > 0.0 {
        Some((weight / inverse, weight.sqrt()))
    } else {
        None
    }
}

impl DiscreteBath {
    /// Discretizes the continuum with couplings `V_k = √(J(ω_k) Δω_k)`.
    pub fn from_spec(spec: &BathSpec, scheme: Discretization) -> Result<Self> {
        if scheme.modes == 0 || !(scheme.omega_max > 0.0) || !(scheme.power >= 1.0) {
            return Err(Error::InvalidParameter(format!("bad discretization {scheme:?}")));
        }
        let n = scheme.modes as f64;
        let top = scheme.omega_max * spec.omega_c;
        let (freqs, couplings) = (0..scheme.modes)
            .map(|k| {
                let x = (k as f64 + 0.5) / n;
                let w = top * x.powf(scheme.power);
                let dw = top * scheme.power * x.powf(scheme.power - 1.0) / n;
                (w, (spec.density(w) * dw).sqrt())
            })
            .unzip();
        let mut bath = Self { mode_freqs: freqs, couplings };
        if scheme.lump_tail {
            if let Some((w, v)) = tail_mode(spec, top) {
                bath.mode_freqs.push(w);
                bath.couplings.push(v);
            }
        }
        Ok(bath)
    }

    /// One mode at `freq` with coupling `coupling`.
    pub fn single(freq: f64, coupling: f64) -> Self {
        Self { mode_freqs: vec![freq], couplings: vec![coupling] }
    }

    pub fn len(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mode_freqs.is_empty()
    }

    /// Σ_k V_k², the discrete analogue of ∫J dω.
    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|v| v * v).sum()
    }

    fn hamiltonian(&self) -> Array2<f64> {
        let n = self.len() + 1;
        let mut h = Array2::zeros((n, n));
        h[[0, 0]] = OMEGA_0;
        for (k, (&w, &v)) in self.mode_freqs.iter().zip(&self.couplings).enumerate() {
            h[[k + 1, k + 1]] = w;
            h[[0, k + 1]] = v;
            h[[k + 1, 0]] = v;
        }
        h
    }
}

/// Eigendecomposition of the single-particle matrix, reused across times.
#[derive(Debug, Clone)]
pub struct DiscretePropagator {
    energies: Array1<f64>,
    /// Column `e` is eigenvector `e`; row 0 is the system component.
    vectors: Array2<f64>,
    mode_freqs: Vec<f64>,
}

impl DiscretePropagator {
    pub fn new(bath: &DiscreteBath) -> Result<Self> {
        let (energies, vectors) = bath
            .hamiltonian()
            .eigh(UPLO::Upper)
            .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e}")))?;
        Ok(Self { energies, vectors, mode_freqs: bath.mode_freqs.clone() })
    }

    /// Largest entry of `|VᵀV - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.vectors.t().dot(&self.vectors);
        gram.indexed_iter()
            .map(|((i, j), &x)| (x - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// `u(t) = G_00(t)`.
    pub fn exact_u(&self, t: f64) -> Complex64 {
        self.vectors
            .row(0)
            .iter()
            .zip(&self.energies)
            .map(|(&c, &e)| Complex64::from_polar(c * c, -e * t))
            .sum()
    }

    /// `v(t) = Σ_k |G_0k(t)|² n̄(ω_k)`.
    pub fn exact_v(&self, temperature: f64, t: f64) -> f64 {
        self.exact_v_batch(&[temperature], &[t])[0][0]
    }

    /// `v` for several temperatures at several times; result is indexed
    /// `[temperature][time]`. The propagator rows are formed once per time
    /// as a matrix product.
    pub fn exact_v_batch(&self, temperatures: &[f64], times: &[f64]) -> Vec<Vec<f64>> {
        let dim = self.energies.len();
        let occupations: Vec<Vec<f64>> = temperatures
            .iter()
            .map(|&temp| {
                self.mode_freqs
                    .iter()
                    .map(|&w| if temp == 0.0 { 0.0 } else { 1.0 / (w / temp).exp_m1() })
                    .collect()
            })
            .collect();
        let mut out = vec![vec![0.0; times.len()]; temperatures.len()];
        const BLOCK: usize = 128;
        for (chunk_idx, chunk) in times.chunks(BLOCK).enumerate() {
            let mut re = Array2::<f64>::zeros((chunk.len(), dim));
            let mut im = Array2::<f64>::zeros((chunk.len(), dim));
            for (m, &t) in chunk.iter().enumerate() {
                for e in 0..dim {
                    let amp = Complex64::from_polar(self.vectors[[0, e]], -self.energies[e] * t);
                    re[[m, e]] = amp.re;
                    im[[m, e]] = amp.im;
                }
            }
            // G_0k(t_m) = Σ_e ψ_e(0) e^{-iE_e t_m} ψ_e(k)
            let g_re = re.dot(&self.vectors.t());
            let g_im = im.dot(&self.vectors.t());
            for (m, (row_re, row_im)) in g_re.axis_iter(Axis(0)).zip(g_im.axis_iter(Axis(0))).enumerate() {
                let idx = chunk_idx * BLOCK + m;
                for (ti, occ) in occupations.iter().enumerate() {
                    out[ti][idx] = occ
                        .iter()
                        .enumerate()
                        .map(|(k, n)| n * (row_re[k + 1] * row_re[k + 1] + row_im[k + 1] * row_im[k + 1]))
                        .sum();
                }
            }
        }
        out
    }
}

/// `u(t)` of a discrete bath (decomposes on every call; prefer
/// [`DiscretePropagator`] for repeated use).
pub fn exact_u(bath: &DiscreteBath, t: f64) -> Result<Complex64> {
    Ok(DiscretePropagator::new(bath)?.exact_u(t))
}

/// `v(t)` of a discrete bath at temperature `temperature`.
pub fn exact_v(bath: &DiscreteBath, temperature: f64, t: f64) -> Result<f64> {
    Ok(DiscretePropagator::new(bath)?.exact_v(temperature, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_values() {
        let spec = BathSpec::with_relative_coupling(2.0, 1.0, 5.0, 1.0).unwrap();
        let bath = DiscreteBath::from_spec(&spec, Discretization::for_spec(&spec, 200)).unwrap();
        let p = DiscretePropagator::new(&bath).unwrap();
        assert!((p.exact_u(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(p.exact_v(1.0, 0.0).abs() < 1e-12);
        assert_eq!(p.exact_v(0.0, 3.0), 0.0);
        assert!(p.unitarity_defect() < 1e-10);
    }

    #[test]
    fn single_resonant_mode_rabi() {
        // resonant 2×2 block: u = e^{-iω_0 t} cos(V t)
        let v = 0.3;
        let bath = DiscreteBath::single(OMEGA_0, v);
        for t in [0.0, 0.7, 2.0, 13.0] {
            let expected = Complex64::from_polar((v * t).cos(), -OMEGA_0 * t);
            assert!((exact_u(&bath, t).unwrap() - expected).norm() < 1e-12);
            // the bath mode's amplitude is -i e^{-iω_0 t} sin(V t)
            let n = 1.0 / (OMEGA_0 / 2.0f64).exp_m1();
            let vt = exact_v(&bath, 2.0, t).unwrap();
            assert!((vt - n * (v * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_sum_approximates_kernel_weight() {
        for s in [0.5, 1.0, 3.0] {
            let spec = BathSpec::with_relative_coupling(2.0, s, 5.0, 1.0).unwrap();
            let bath = DiscreteBath::from_spec(&spec, Discretization::for_spec(&spec, 2000)).unwrap();
            let rel = (bath.total_weight() - spec.total_weight()).abs() / spec.total_weight();
            assert!(rel < 0.01, "s={s} rel={rel}");
        }
    }

    #[test]
    fn tail_mode_carries_missing_weight() {
        let spec = BathSpec::with_relative_coupling(2.0, 3.0, 5.0, 1.0).unwrap();
        let (w, v) = tail_mode(&spec, 100.0).unwrap();
        // brute-force midpoint over [100, 400]
        let n = 300_000;
        let h = 300.0 / n as f64;
        let (mut m0, mut m1) = (0.0, 0.0);
        for i in 0..n {
            let x = 100.0 + (i as f64 + 0.5) * h;
            m0 += spec.density(x) * h;
            m1 += spec.density(x) / x * h;
        }
        assert!((v * v - m0).abs() < 1e-8 * m0);
        assert!((w - m0 / m1).abs() < 1e-8 * w);
    }

    #[test]
    fn amplitude_bounded() {
        let spec = BathSpec::with_relative_coupling(2.0, 0.5, 5.0, 1.0).unwrap();
        let bath = DiscreteBath::from_spec(&spec, Discretization::for_spec(&spec, 300)).unwrap();
        let p = DiscretePropagator::new(&bath).unwrap();
        for i in 0..100 {
            assert!(p.exact_u(0.5 * i as f64).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_discretization() {
        let spec = BathSpec::with_relative_coupling(2.0, 1.0, 5.0, 1.0).unwrap();
        assert!(DiscreteBath::from_spec(&spec, Discretization::uniform(0, 10.0)).is_err());
        let bad = Discretization { power: 0.5, ..Discretization::uniform(5, 10.0) };
        assert!(DiscreteBath::from_spec(&spec, bad).is_err());
    }
}

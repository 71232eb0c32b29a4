//! Long-time limit: self-energy, the localized bound mode and the steady
//! Green's functions.
//!
//! The retarded self-energy is `Σ(ω ± i0⁺) = Δ(ω) ∓ iγ(ω)` with
//! `Δ(ω) = P∫ J(ω')/(ω - ω') dω'` and `γ = πJ`. Below the continuum (ω < 0)
//! `F(ω) = ω - ω_0 - Δ(ω)` is strictly increasing, so a bound mode exists
//! exactly when `F(0⁻) > 0`, which is `η > η_c`.

use num_complex::Complex64;

use crate::bath::{BathSpec, OMEGA_0};
use crate::error::{Error, Result};
use crate::gaussian::{CoherencePoint, GaussianInit};
use crate::quad::{self, Tolerance};

/// Upper frequency limit for steady-state integrals, in units of ω_c.
pub const STEADY_CUTOFF: f64 = 50.0;
/// Truncation of the principal-value integral, in units of ω_c. Kept above
/// [`STEADY_CUTOFF`] so the analytic log remainder stays finite on the
/// integration range.
const PV_CUTOFF: f64 = 60.0;

fn tolerance() -> Tolerance {
    Tolerance { abs: 1e-15, rel: 1e-13, max_intervals: 4000 }
}

/// Integrates `f` over `[0, upper]` through the given interior breakpoints.
/// The first segment `[0, ω_c/10]` uses ω = y², which regularizes the
/// ω^s and ω^(s-1) endpoint behaviour of J and J·n̄; breakpoints inside it
/// are mapped to y.
fn integrate_bath<F: Fn(f64) -> f64>(spec: &BathSpec, f: F, upper: f64, breaks: &[f64]) -> Result<f64> {
    let low = (spec.omega_c / 10.0).min(upper);
    let inside = |b: f64, lo: f64, hi: f64| b > lo && b < hi;

    let mut y_edges = vec![0.0];
    y_edges.extend(breaks.iter().filter(|&&b| inside(b, 0.0, low)).map(|b| b.sqrt()));
    y_edges.push(low.sqrt());
    let mut edges = vec![low];
    edges.extend(breaks.iter().copied().filter(|&b| inside(b, low, upper)));
    edges.push(upper);
    for e in [&mut y_edges, &mut edges] {
        e.sort_by(f64::total_cmp);
        e.dedup();
    }

    let mapped = |y: f64| f(y * y) * 2.0 * y;
    let mut total = 0.0;
    for pair in y_edges.windows(2) {
        total += quad::integrate(mapped, pair[0], pair[1], tolerance())?.value;
    }
    for pair in edges.windows(2) {
        let panels = ((pair[1] - pair[0]) / spec.omega_c).ceil().max(1.0) as usize;
        total += quad::integrate_split(&f, pair[0], pair[1], panels, tolerance())?.value;
    }
    Ok(total)
}

/// Real part of the self-energy, `Δ(ω) = P∫₀^∞ J(ω')/(ω - ω') dω'`.
///
/// For ω ≤ 0 the integrand is regular. For ω > 0 the singularity is
/// subtracted: `∫ [J(ω') - J(ω)]/(ω - ω') dω' + J(ω) ln(ω/(W - ω))` on
/// `[0, W]`.
pub fn self_energy_delta(spec: &BathSpec, omega: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::Domain { what: "omega", value: omega });
    }
    if spec.eta == 0.0 {
        return Ok(0.0);
    }
    let upper = PV_CUTOFF * spec.omega_c;
    if omega <= 0.0 {
        let b = -omega;
        let breaks: Vec<f64> = if b > 0.0 { vec![b, 10.0 * b] } else { vec![] };
        return Ok(-integrate_bath(spec, |w| spec.density(w) / (w + b), upper, &breaks)?);
    }
    if omega >= upper {
        return Err(Error::Domain { what: "omega beyond principal-value range", value: omega });
    }
    let j0 = spec.density(omega);
    let regular = |w: f64| {
        if w == omega {
            0.0
        } else {
            (spec.density(w) - j0) / (omega - w)
        }
    };
    let body = integrate_bath(spec, regular, upper, &[omega])?;
    Ok(body + j0 * (omega / (upper - omega)).ln())
}

/// Imaginary part of the self-energy, γ(ω) = π J(ω).
pub fn damping_gamma(spec: &BathSpec, omega: f64) -> Result<f64> {
    Ok(std::f64::consts::PI * spec.spectral_density(omega)?)
}

/// Retarded (`retarded = true`, ω + i0⁺) or advanced self-energy.
pub fn self_energy(spec: &BathSpec, omega: f64, retarded: bool) -> Result<Complex64> {
    let delta = self_energy_delta(spec, omega)?;
    let gamma = if omega > 0.0 { damping_gamma(spec, omega)? } else { 0.0 };
    Ok(Complex64::new(delta, if retarded { -gamma } else { gamma }))
}

/// Slope Δ'(ω) below the continuum by central differences, with the step
/// halved once to confirm the estimate.
pub fn self_energy_slope(spec: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega < 0.0) {
        return Err(Error::Domain { what: "omega (slope needs omega < 0)", value: omega });
    }
    let step = (1e-6 * omega.abs().max(1.0)).min(0.25 * omega.abs());
    let diff = |h: f64| -> Result<f64> {
        Ok((self_energy_delta(spec, omega + h)? - self_energy_delta(spec, omega - h)?) / (2.0 * h))
    };
    let coarse = diff(step)?;
    let fine = diff(0.5 * step)?;
    if (coarse - fine).abs() > 1e-5 * fine.abs().max(1e-3) {
        return Err(Error::Numerical(format!(
            "self-energy slope not stable under step halving: {coarse} vs {fine}"
        )));
    }
    Ok(fine)
}

/// The bound mode below the continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedMode {
    /// Frequency ω_b < 0.
    pub omega_b: f64,
    /// Residue 𝒵 = 1/(1 - Σ'(ω_b)), in (0, 1].
    pub residue: f64,
}

/// Root of `ω - ω_0 - Δ(ω) = 0` on `[-20 ω_c, -1e-12]`, if any.
pub fn find_localized_mode(spec: &BathSpec) -> Result<Option<LocalizedMode>> {
    if spec.eta == 0.0 {
        return Ok(None);
    }
    let f = |w: f64| -> Result<f64> { Ok(w - OMEGA_0 - self_energy_delta(spec, w)?) };
    let mut hi = -1e-12;
    let mut lo = -20.0 * spec.omega_c;
    let f_hi = f(hi)?;
    if f_hi <= 0.0 {
        return Ok(None);
    }
    let f_lo = f(lo)?;
    if f_lo >= 0.0 {
        return Err(Error::Analysis(format!(
            "no sign change on [{lo}, {hi}] (F = {f_lo}, {f_hi}); widen the bracket"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    let omega_b = 0.5 * (lo + hi);
    let slope = self_energy_slope(spec, omega_b)?;
    let residue = 1.0 / (1.0 - slope);
    Ok(Some(LocalizedMode { omega_b, residue }))
}

/// Long-time summary of the Green's functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyReport {
    pub localized: Option<LocalizedMode>,
    /// v(t → ∞).
    pub v_inf: f64,
}

impl SteadyReport {
    pub fn analyze(spec: &BathSpec) -> Result<Self> {
        let localized = find_localized_mode(spec)?;
        let v_inf = steady_v(spec, localized.as_ref())?;
        Ok(Self { localized, v_inf })
    }

    pub fn exists_localized(&self) -> bool {
        self.localized.is_some()
    }

    pub fn omega_b(&self) -> Option<f64> {
        self.localized.map(|m| m.omega_b)
    }

    /// 𝒵, or 0 when the amplitude fully decays.
    pub fn residue(&self) -> f64 {
        self.localized.map_or(0.0, |m| m.residue)
    }

    /// Long-time coherence of the state evolved from `init`. Only |u|
    /// enters ν and μ̄, so the phase of the bound-mode oscillation drops out.
    pub fn coherence(&self, init: &GaussianInit) -> Result<f64> {
        let u = Complex64::new(self.residue(), 0.0);
        Ok(CoherencePoint::evaluate(init, f64::INFINITY, u, self.v_inf)?.coherence)
    }
}

/// Surviving amplitude `u(t) → 𝒵 e^{-iω_b t}`.
pub fn steady_u_envelope(report: &SteadyReport, t: f64) -> Result<Complex64> {
    let mode = report.localized.ok_or(Error::NoLocalizedMode)?;
    Ok(Complex64::from_polar(mode.residue, -mode.omega_b * t))
}

/// `v(∞) = ∫ [𝒟_l(ω) + 𝒟_c(ω)] n̄(ω) dω` with
/// `𝒟_c = J/[(ω - ω_0 - Δ)² + γ²]` and `𝒟_l = J 𝒵²/(ω - ω_b)²`.
pub fn steady_v(spec: &BathSpec, localized: Option<&LocalizedMode>) -> Result<f64> {
    if spec.temperature == 0.0 || spec.eta == 0.0 {
        return Ok(0.0);
    }
    let upper = STEADY_CUTOFF * spec.omega_c;
    // 𝒟_c peaks near the renormalized frequency; seed breakpoints around it
    let shift = self_energy_delta(spec, OMEGA_0)?;
    let center = (OMEGA_0 + shift).max(0.0);
    let width = damping_gamma(spec, center.max(1e-12))?.max(1e-6);
    let mut breaks = vec![OMEGA_0, center];
    for k in [1.0, 3.0, 10.0, 30.0] {
        breaks.push(center - k * width);
        breaks.push(center + k * width);
    }
    let failure = std::cell::RefCell::new(None);
    let continuum = integrate_bath(
        spec,
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            match self_energy_delta(spec, w) {
                Ok(delta) => {
                    let j = spec.density(w);
                    let detune = w - OMEGA_0 - delta;
                    let gamma = std::f64::consts::PI * j;
                    spec.thermal_weight(w) / (detune * detune + gamma * gamma)
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        upper,
        &breaks,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut total = continuum?;
    if let Some(mode) = localized {
        let z2 = mode.residue * mode.residue;
        total += integrate_bath(
            spec,
            |w| {
                let d = w - mode.omega_b;
                spec.thermal_weight(w) * z2 / (d * d)
            },
            upper,
            &[],
        )?;
    }
    Ok(total)
}

/// Steady coherence over an (α, r) grid; rows follow `alphas`, columns `rs`.
pub fn steady_coherence_surface(report: &SteadyReport, alphas: &[f64], rs: &[f64], n_bar: f64) -> Result<Vec<Vec<f64>>> {
    alphas
        .iter()
        .map(|&alpha| {
            rs.iter()
                .map(|&r| report.coherence(&GaussianInit::real(alpha, r, n_bar)?))
                .collect()
        })
        .collect()
}

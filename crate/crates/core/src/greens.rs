//! Green's functions of the quantum Langevin equation.
//!
//! `u(t)` solves
//!
//! ```text
//! du/dt = -iω_0 u - ∫_0^t g(t-τ) u(τ) dτ,   u(0) = 1
//! ```
//!
//! and `v(t) = ∫_0^t∫_0^t u(t-τ₁) g̃(τ₁-τ₂) u*(t-τ₂) dτ₁dτ₂` is the thermal
//! occupation injected by the bath noise.
//!
//! Both are computed in a rotating frame, `u = e^{-iω_r t} w`, with ω_r = ω_0
//! unless the bath binds a localized mode (see [`frame_frequency`]), so the
//! decoupled motion is reproduced exactly. The envelope `w` is taken
//! piecewise linear on the grid and every kernel integral against it is done
//! exactly (product integration), which keeps the scheme second order with an
//! error set by the smoothness of `w` rather than by the sharp kernels.
//! Kernels depend only on the lag, so their panel integrals are computed once
//! per run. The implicit step is linear and solved in closed form.

use num_complex::Complex64;

use crate::bath::{BathSpec, OMEGA_0};
use crate::error::{Error, Result};
use crate::quad;
use crate::steady;

/// Uniform time grid `t_i = i·dt`, `i = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_max must be > 0, got {t_max}")));
        }
        let n = (t_max / dt).round();
        if n < 1.0 || (n * dt - t_max).abs() > 1e-9 * t_max {
            return Err(Error::InvalidParameter(format!(
                "t_max = {t_max} is not an integer multiple of dt = {dt}"
            )));
        }
        Ok(Self { dt, n_steps: n as usize })
    }

    pub fn from_steps(dt: f64, n_steps: usize) -> Result<Self> {
        Self::new(dt * n_steps as f64, dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    /// Same horizon at half the step.
    pub fn refined(&self) -> Self {
        Self { dt: 0.5 * self.dt, n_steps: 2 * self.n_steps }
    }

    /// Indices `0, stride, 2·stride, …` plus the final point.
    pub fn strided(&self, stride: usize) -> Vec<usize> {
        let stride = stride.max(1);
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if *idx.last().unwrap() != self.n_steps {
            idx.push(self.n_steps);
        }
        idx
    }
}

/// `u` and `v` sampled on a grid.
#[derive(Debug, Clone)]
pub struct GreensTrajectory {
    pub grid: TimeGrid,
    pub u: Vec<Complex64>,
    pub v: Vec<f64>,
}

impl GreensTrajectory {
    /// Solves `u` then `v` and checks the trajectory invariants.
    pub fn solve(spec: &BathSpec, grid: TimeGrid) -> Result<Self> {
        let u = solve_u(spec, grid)?;
        let v = solve_v(spec, grid, &u)?;
        let traj = Self { grid, u, v };
        traj.check()?;
        Ok(traj)
    }

    fn check(&self) -> Result<()> {
        for (i, (u, &v)) in self.u.iter().zip(&self.v).enumerate() {
            if u.norm() > 1.0 + 1e-6 {
                return Err(Error::Consistency(format!(
                    "|u| = {} exceeds 1 at t = {}",
                    u.norm(),
                    self.grid.time(i)
                )));
            }
            if v < -1e-9 {
                return Err(Error::Consistency(format!("v = {v:e} negative at t = {}", self.grid.time(i))));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Gauss–Legendre order for kernel integrals over one panel. Kernels vary on
/// the scale 1/ω_c, far above any usable step, so this is exact to roundoff.
const PANEL_ORDER: usize = 8;

/// Frequency of the frame in which `u` is interpolated: the localized-mode
/// frequency when the bath binds one, since `u` then settles into
/// `𝒵 e^{-iω_b t}`, and ω_0 otherwise. Only accuracy depends on this choice.
pub fn frame_frequency(spec: &BathSpec) -> f64 {
    if spec.eta == 0.0 {
        return OMEGA_0;
    }
    match steady::find_localized_mode(spec) {
        Ok(Some(mode)) => mode.omega_b,
        _ => OMEGA_0,
    }
}

fn rotating(kernel: Complex64, lag: f64, frame: f64) -> Complex64 {
    kernel * Complex64::from_polar(1.0, frame * lag)
}

fn unit_rule(order: usize) -> Vec<(f64, f64)> {
    let (x, w) = quad::gauss_legendre(order);
    x.into_iter().zip(w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// `∫_0^1 y^m k(h(p + y)) dy` for `m = 0, 1, 2` on panels `p = 0..panels`.
fn panel_moments(kernel: impl Fn(f64) -> Complex64, h: f64, panels: usize) -> Vec<[Complex64; 3]> {
    let rule = unit_rule(PANEL_ORDER);
    (0..panels)
        .map(|p| {
            let mut m = [Complex64::new(0.0, 0.0); 3];
            for &(y, wy) in &rule {
                let k = kernel(h * (p as f64 + y)) * wy;
                m[0] += k;
                m[1] += k * y;
                m[2] += k * (y * y);
            }
            m
        })
        .collect()
}

/// Survival amplitude `u(t)` on `grid`.
pub fn solve_u(spec: &BathSpec, grid: TimeGrid) -> Result<Vec<Complex64>> {
    let h = grid.dt();
    let n = grid.n_steps();
    let frame = frame_frequency(spec);
    let m = panel_moments(|s| rotating(spec.memory_kernel(s), s, frame), h, n);

    // Integrating dw/dt over a step, with w piecewise linear, gives
    // w_n - w_{n-1} = -Σ_j D_{n,j} w_j where D is the double integral of the
    // kernel against the hat of node j. Interior hats depend on the lag only.
    let h2 = h * h;
    let interior: Vec<Complex64> = (0..n)
        .map(|d| {
            let mut acc = (m[d][0] - m[d][1] * 2.0 + m[d][2]) * 0.5;
            if d >= 1 {
                let q = &m[d - 1];
                acc += (q[0] + q[1] * 2.0 - q[2] * 2.0) * 0.5;
            }
            if d >= 2 {
                acc += m[d - 2][2] * 0.5;
            }
            acc * h2
        })
        .collect();
    // the half hat at t = 0
    let initial = |step: usize| {
        let mut acc = (m[step - 1][0] - m[step - 1][2]) * 0.5;
        if step >= 2 {
            acc += m[step - 2][2] * 0.5;
        }
        acc * h2
    };

    // residual rotation of the frame, integrated exactly for linear w
    let spin = Complex64::new(0.0, 0.5 * h * (frame - OMEGA_0));
    let one = Complex64::new(1.0, 0.0);
    let mut w = Vec::with_capacity(n + 1);
    w.push(one);
    let denom = one - spin + interior[0];
    for step in 1..=n {
        let mut hist = initial(step) * w[0];
        for j in 1..step {
            hist += interior[step - j] * w[j];
        }
        let next = (w[step - 1] * (one + spin) - hist) / denom;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Divergence { step, t: grid.time(step) });
        }
        w.push(next);
    }

    Ok(w.iter()
        .enumerate()
        .map(|(i, w)| w * Complex64::from_polar(1.0, -frame * grid.time(i)))
        .collect())
}

/// Envelope `w = e^{iω_r t} u` in the frame rotating at `frame`.
fn envelope(grid: &TimeGrid, u: &[Complex64], frame: f64) -> Vec<Complex64> {
    u.iter()
        .enumerate()
        .map(|(i, u)| u * Complex64::from_polar(1.0, frame * grid.time(i)))
        .collect()
}

/// Panel-pair weights `C_ab(d) = h² ∫∫ ℓ_a(y₁) ℓ_b(y₂) κ(h(d + y₂ - y₁))`
/// for `d = 0..lags`, with `ℓ_0 = 1 - y`, `ℓ_1 = y` and κ the thermal
/// kernel in the rotating frame. Negative lags follow from
/// `C_ab(-d) = conj C_ba(d)`.
fn panel_pair_weights(spec: &BathSpec, h: f64, lags: usize, frame: f64) -> Vec<[[Complex64; 2]; 2]> {
    // reduce to one dimension in z = y₂ - y₁; the overlap of the two linear
    // pieces is quadratic in y, so three points integrate it exactly
    let inner = unit_rule(3);
    let overlap = |a: usize, b: usize, z: f64| -> f64 {
        let lo = (-z).max(0.0);
        let hi = (1.0 - z).min(1.0);
        let ell = |i: usize, y: f64| if i == 0 { 1.0 - y } else { y };
        inner
            .iter()
            .map(|&(x, wx)| {
                let y = lo + (hi - lo) * x;
                ell(a, y) * ell(b, y + z) * wx * (hi - lo)
            })
            .sum()
    };
    let outer = unit_rule(PANEL_ORDER);
    let mut nodes = Vec::with_capacity(2 * outer.len());
    for &(x, wx) in &outer {
        for z in [x - 1.0, x] {
            let lam = [[overlap(0, 0, z), overlap(0, 1, z)], [overlap(1, 0, z), overlap(1, 1, z)]];
            nodes.push((z, wx, lam));
        }
    }
    (0..lags)
        .map(|d| {
            let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
            for &(z, wz, lam) in &nodes {
                let lag = h * (d as f64 + z);
                let k = rotating(spec.thermal_kernel(lag), lag, frame) * (wz * h * h);
                for a in 0..2 {
                    for b in 0..2 {
                        c[a][b] += k * lam[a][b];
                    }
                }
            }
            c
        })
        .collect()
}

fn check_lengths(grid: &TimeGrid, u: &[Complex64]) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "u has {} samples, grid has {}",
            u.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Thermal fluctuation `v(t)` on the whole grid.
///
/// With `σ = t - τ` the double integral runs over `[0, t]²` with integrand
/// `u(σ₁) g̃(σ₂ - σ₁) u*(σ₂)`. The envelope of `u` is interpolated linearly
/// and the kernel integrated exactly against it, which makes `v` a sum of
/// panel-pair terms. Extending the grid by one panel adds one border row and
/// column, so the whole trajectory costs O(N²).
pub fn solve_v(spec: &BathSpec, grid: TimeGrid, u: &[Complex64]) -> Result<Vec<f64>> {
    check_lengths(&grid, u)?;
    let n = grid.n_steps();
    let mut v = vec![0.0; grid.len()];
    if spec.temperature == 0.0 || spec.eta == 0.0 {
        return Ok(v);
    }
    let frame = frame_frequency(spec);
    let w = envelope(&grid, u, frame);
    let c = panel_pair_weights(spec, grid.dt(), n, frame);
    for q in 0..n {
        let mut s0 = Complex64::new(0.0, 0.0);
        let mut s1 = Complex64::new(0.0, 0.0);
        for p in 0..q {
            let cd = &c[q - p];
            s0 += w[p] * cd[0][0] + w[p + 1] * cd[1][0];
            s1 += w[p] * cd[0][1] + w[p + 1] * cd[1][1];
        }
        let border = w[q].conj() * s0 + w[q + 1].conj() * s1;
        let c0 = &c[0];
        let diagonal = w[q] * w[q].conj() * c0[0][0]
            + w[q] * w[q + 1].conj() * c0[0][1]
            + w[q + 1] * w[q].conj() * c0[1][0]
            + w[q + 1] * w[q + 1].conj() * c0[1][1];
        v[q + 1] = v[q] + 2.0 * border.re + diagonal.re;
        if !v[q + 1].is_finite() {
            return Err(Error::Divergence { step: q + 1, t: grid.time(q + 1) });
        }
    }
    Ok(v)
}

/// `v(t_n)` from the full complex double sum over panel pairs, without the
/// incremental bookkeeping of [`solve_v`]. The imaginary part must vanish; a
/// residue above `1e-8·max(1, v)` is reported as an error.
pub fn thermal_double_sum(spec: &BathSpec, grid: TimeGrid, u: &[Complex64], index: usize) -> Result<f64> {
    check_lengths(&grid, u)?;
    if index >= grid.len() {
        return Err(Error::InvalidParameter(format!("index {index} outside the grid")));
    }
    if index == 0 || spec.temperature == 0.0 || spec.eta == 0.0 {
        return Ok(0.0);
    }
    let frame = frame_frequency(spec);
    let w = envelope(&grid, u, frame);
    let c = panel_pair_weights(spec, grid.dt(), index, frame);
    let weight = |p: usize, q: usize, a: usize, b: usize| {
        if q >= p { c[q - p][a][b] } else { c[p - q][b][a].conj() }
    };
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..index {
        for q in 0..index {
            for a in 0..2 {
                for b in 0..2 {
                    total += w[p + a] * weight(p, q, a, b) * w[q + b].conj();
                }
            }
        }
    }
    if total.im.abs() > 1e-8 * total.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "thermal fluctuation has imaginary residue {:e} (real part {:e})",
            total.im, total.re
        )));
    }
    Ok(total.re)
}

/// Frequency quadrature used by [`solve_v_spectral`]: nodes and weights that
/// already include J(ω)·n̄(ω).
fn spectral_nodes(spec: &BathSpec, t_max: f64) -> (Vec<f64>, Vec<f64>) {
    let split = spec.omega_c / 10.0;
    let upper = 40.0 * spec.omega_c;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    // ω = y² on the low panel regularizes the ω^(s-1) behaviour of J·n̄
    let ymax = split.sqrt();
    let low_panels = ((split * t_max / std::f64::consts::PI).ceil() as usize).max(4);
    let (ys, wys) = quad::composite_gauss_legendre(0.0, ymax, low_panels, 8);
    for (y, wy) in ys.into_iter().zip(wys) {
        let w = y * y;
        nodes.push(w);
        weights.push(wy * 2.0 * y * spec.thermal_weight(w));
    }
    // |Φ(ω)|² oscillates with period 2π/t; keep panels at half that
    let width = (std::f64::consts::PI / t_max).min(0.5);
    let panels = ((upper - split) / width).ceil() as usize;
    let (ws, wws) = quad::composite_gauss_legendre(split, upper, panels, 8);
    for (w, ww) in ws.into_iter().zip(wws) {
        nodes.push(w);
        weights.push(ww * spec.thermal_weight(w));
    }
    (nodes, weights)
}

/// `∫_0^1 e^{iθy} dy` and `∫_0^1 y e^{iθy} dy`.
fn filon_moments(theta: f64) -> (Complex64, Complex64) {
    let it = Complex64::new(0.0, theta);
    if theta.abs() < 0.5 {
        // Σ (iθ)^k/(k+1)! and Σ (iθ)^k/(k!(k+2))
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut pow_over_fact = Complex64::new(1.0, 0.0);
        for k in 0..20 {
            let kf = k as f64;
            e0 += pow_over_fact / (kf + 1.0);
            e1 += pow_over_fact / (kf + 2.0);
            pow_over_fact = pow_over_fact * it / (kf + 1.0);
        }
        (e0, e1)
    } else {
        let e = it.exp();
        let e0 = (e - 1.0) / it;
        (e0, (e - e0) / it)
    }
}

/// `v(t)` at the requested grid indices through the frequency-domain form
/// `v(t) = ∫ dω J(ω) n̄(ω) |Φ(ω, t)|²`, `Φ = ∫_0^t u(σ) e^{iωσ} dσ`. `Φ` is
/// integrated exactly against the same piecewise-linear envelope as the time
/// domain route and advanced one panel at a time.
pub fn solve_v_spectral(spec: &BathSpec, grid: TimeGrid, u: &[Complex64], indices: &[usize]) -> Result<Vec<f64>> {
    check_lengths(&grid, u)?;
    if indices.iter().any(|&i| i >= grid.len()) {
        return Err(Error::InvalidParameter("output index outside the grid".into()));
    }
    if spec.temperature == 0.0 || spec.eta == 0.0 {
        return Ok(vec![0.0; indices.len()]);
    }
    let h = grid.dt();
    let frame = frame_frequency(spec);
    let w = envelope(&grid, u, frame);
    let last = indices.iter().copied().max().unwrap_or(0);
    let (nodes, weights) = spectral_nodes(spec, grid.time(last).max(h));
    let detuning: Vec<f64> = nodes.iter().map(|&om| om - frame).collect();
    let moments: Vec<(Complex64, Complex64)> = detuning.iter().map(|&d| filon_moments(d * h)).collect();
    let rotation: Vec<Complex64> = detuning.iter().map(|&d| Complex64::from_polar(1.0, d * h)).collect();
    let mut phase = vec![Complex64::new(1.0, 0.0); nodes.len()];
    let mut running = vec![Complex64::new(0.0, 0.0); nodes.len()];

    let mut wanted = vec![usize::MAX; grid.len()];
    for (slot, &i) in indices.iter().enumerate() {
        wanted[i] = slot;
    }
    let mut out = vec![0.0; indices.len()];
    for n in 0..=last {
        if n > 0 {
            let p = n - 1;
            for q in 0..nodes.len() {
                let (e0, e1) = moments[q];
                running[q] += phase[q] * (w[p] * (e0 - e1) + w[p + 1] * e1) * h;
                // refresh the accumulated phase exactly now and then
                phase[q] = if n % 256 == 0 {
                    Complex64::from_polar(1.0, detuning[q] * grid.time(n))
                } else {
                    phase[q] * rotation[q]
                };
            }
        }
        if wanted[n] != usize::MAX {
            out[wanted[n]] = running.iter().zip(&weights).map(|(r, wt)| wt * r.norm_sqr()).sum();
        }
    }
    Ok(out)
}

//! Pseudo-spectral evolution in sheared coordinates.
//!
//! The linear part of the equation is diagonal in Fourier space and is
//! integrated exactly. The transport term is evaluated pseudo-spectrally
//! with 2/3-rule dealiasing and advanced with integrating-factor RK4.

pub mod checkpoint;
pub mod diagnostics;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fft::Fft3;
use crate::freq::{Frequency, Lattice, Mode, SpectralField};
use crate::symbols::{damping_integral_unchecked, u_moving_symbol, zero_mode_rate};
use crate::weights::{lambda_t, WeightBank, WeightParams};

pub use diagnostics::DiagnosticRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    /// Every mode of the box, unit amplitude profile, fixed phases.
    Multimode,
    /// Every mode of the box with seeded random amplitude and phase.
    Random,
    /// Only the listed modes (and their conjugates), real amplitudes.
    Modes,
}

/// How `theta(0)` is built before rescaling to `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitSpec {
    pub recipe: Recipe,
    pub seed: u64,
    /// Gevrey radius of the data; amplitudes carry `e^{-lambda_in |f|^s}`.
    pub lambda_in: f64,
    /// Box `|k| <= kmax, |j| <= jmax, |alpha| <= amax` for the box recipes,
    /// clipped to the dealiasing band. The defaults fill the band: with a
    /// smaller box the top modes start at zero and the high-index norms
    /// measure transfer into them rather than the size of the solution.
    pub kmax: i64,
    pub jmax: i64,
    pub amax: i64,
    /// `(k, j, alpha)` with `eta = j * delta_eta`, for `recipe = "modes"`.
    pub modes: Vec<[i64; 3]>,
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec {
            recipe: Recipe::Random,
            seed: 1,
            lambda_in: 0.2,
            kmax: 64,
            jmax: 256,
            amax: 64,
            modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub lattice: Lattice,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub output_every: f64,
    pub mode: RunMode,
    pub dealias: f64,
    pub init: InitSpec,
    pub weights: WeightParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lattice: Lattice::default(),
            epsilon: 1e-3,
            dt: 0.05,
            t_end: 100.0,
            output_every: 1.0,
            mode: RunMode::Nonlinear,
            dealias: 2.0 / 3.0,
            init: InitSpec::default(),
            weights: WeightParams::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.weights.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("t_end must be positive"));
        }
        if !(self.output_every >= self.dt) {
            return Err(Error::invalid("output_every must be at least dt"));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return Err(Error::invalid("dealias must lie in (0, 1]"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon must be finite and >= 0"));
        }
        let lam0 = lambda_t(0.0, &self.weights);
        if !(self.init.lambda_in > lam0) {
            return Err(Error::invalid(format!(
                "init.lambda_in = {} must exceed lambda(0) = {lam0}",
                self.init.lambda_in
            )));
        }
        Ok(())
    }

    /// Steps between two outputs.
    pub fn output_stride(&self) -> usize {
        ((self.output_every / self.dt).round() as usize).max(1)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub theta: SpectralField,
}

/// Precomputed per-mode data and transforms for one configuration.
pub struct Solver {
    cfg: SimConfig,
    exec: Exec,
    fft: Fft3,
    freqs: Vec<Frequency>,
    in_band: Vec<bool>,
    bank: WeightBank,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("cfg", &self.cfg).field("exec", &self.exec).finish()
    }
}

impl Solver {
    pub fn new(cfg: SimConfig, exec: Exec) -> Result<Self> {
        cfg.validate()?;
        let l = cfg.lattice;
        let band = l.band(cfg.dealias);
        let freqs = exec.map(l.len(), |i| l.frequency(i));
        let in_band = exec.map(l.len(), |i| !l.is_nyquist(i) && band.contains(l.mode(i)));
        let bank = WeightBank::for_lattice(cfg.weights, &l);
        Ok(Solver {
            fft: Fft3::new(l),
            cfg,
            exec,
            freqs,
            in_band,
            bank,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn lattice(&self) -> &Lattice {
        &self.cfg.lattice
    }

    pub fn bank(&self) -> &WeightBank {
        &self.bank
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn frequencies(&self) -> &[Frequency] {
        &self.freqs
    }

    /// `theta(0)` from the configured recipe, rescaled so that
    /// `||theta(0)||_{G^{lambda_in}} = epsilon`.
    pub fn init_field(&self) -> Result<SimState> {
        let l = self.cfg.lattice;
        let spec = &self.cfg.init;
        let s = self.cfg.weights.s;
        let profile = |m: Mode| (-spec.lambda_in * l.mode_frequency(m).l1_norm().powf(s)).exp();
        let mut field = SpectralField::zeros(l);
        let mut placed = 0usize;
        let mut put = |field: &mut SpectralField, m: Mode, v: Complex64| -> Result<()> {
            match l.index_of(m) {
                Some(i) if self.in_band[i] => {
                    field.set_mode(m, v)?;
                    placed += 1;
                    Ok(())
                }
                _ => Ok(()),
            }
        };
        match spec.recipe {
            Recipe::Modes => {
                if spec.modes.is_empty() {
                    return Err(Error::invalid("recipe 'modes' needs a non-empty mode list"));
                }
                for &[k, j, alpha] in &spec.modes {
                    let m = Mode { k, j, alpha };
                    if k == 0 && j == 0 && alpha == 0 {
                        return Err(Error::invalid("initial data must have zero mean: (0,0,0) is not allowed"));
                    }
                    put(&mut field, m, Complex64::new(profile(m), 0.0))?;
                }
            }
            Recipe::Multimode | Recipe::Random => {
                if spec.kmax < 0 || spec.jmax < 0 || spec.amax < 0 {
                    return Err(Error::invalid("mode box extents must be >= 0"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let (kmax, jmax, amax) = (
                    spec.kmax.min(l.nx as i64 / 2),
                    spec.jmax.min(l.ny as i64 / 2),
                    spec.amax.min(l.nz as i64 / 2),
                );
                for k in -kmax..=kmax {
                    for j in -jmax..=jmax {
                        for alpha in -amax..=amax {
                            // one representative of each conjugate pair
                            if (k, j, alpha) <= (0, 0, 0) {
                                continue;
                            }
                            let m = Mode { k, j, alpha };
                            let v = match spec.recipe {
                                Recipe::Random => {
                                    let amp: f64 = rng.random_range(0.25..1.0);
                                    let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                                    Complex64::from_polar(amp * profile(m), ph)
                                }
                                _ => {
                                    let ph = 1.3 * k as f64 + 0.7 * j as f64 + 2.1 * alpha as f64;
                                    Complex64::from_polar(profile(m), ph)
                                }
                            };
                            put(&mut field, m, v)?;
                        }
                    }
                }
            }
        }
        if placed == 0 || field.max_abs() == 0.0 {
            return Err(Error::invalid(
                "initial recipe has no non-zero, zero-mean content inside the dealiasing band",
            ));
        }
        if self.cfg.epsilon == 0.0 {
            return Ok(SimState {
                t: 0.0,
                theta: SpectralField::zeros(l),
            });
        }
        let norm = crate::weights::ln_norm_weighted(
            &field,
            &self.bank,
            &crate::weights::NormSpec {
                sigma: 0.0,
                lambda: spec.lambda_in,
                t: 0.0,
                use_j: false,
                use_b: false,
            },
            |_, _| 0.0,
            self.exec,
        )
        .exp();
        field.scale(self.cfg.epsilon / norm);
        Ok(SimState { t: 0.0, theta: field })
    }

    /// `exp(-int_{t0}^{t1} damping)` for every mode.
    pub fn linear_factors(&self, t0: f64, t1: f64) -> Vec<f64> {
        let freqs = &self.freqs;
        self.exec.map(freqs.len(), |i| {
            let f = &freqs[i];
            if f.k == 0 {
                (-zero_mode_rate(f.eta, f.alpha) * (t1 - t0)).exp()
            } else {
                (-damping_integral_unchecked(t0, t1, f)).exp()
            }
        })
    }

    pub fn step_linear(&self, state: &mut SimState, dt: f64) {
        let e = self.linear_factors(state.t, state.t + dt);
        self.exec.for_each_mut(&mut state.theta.coeffs, |i, c| *c *= e[i]);
        state.t += dt;
    }

    /// `-P(u . grad theta)` at time `t`, where `P` keeps the dealiasing
    /// band and projects onto Hermitian-symmetric spectra.
    pub fn nonlinear_rhs(&self, t: f64, theta: &SpectralField) -> SpectralField {
        let l = self.cfg.lattice;
        let n = l.len();
        let freqs = &self.freqs;
        let c = &theta.coeffs;
        // buffer j holds u_j + i d_j theta, both real in physical space
        let mut bufs: Vec<Vec<Complex64>> = (0..3)
            .map(|axis| {
                let mut b = vec![Complex64::default(); n];
                self.exec.for_each_mut(&mut b, |i, out| {
                    let f = &freqs[i];
                    let u = u_moving_symbol(t, f);
                    let (uj, wj) = match axis {
                        0 => (u.v1, f.k as f64),
                        1 => (u.v2, f.eta),
                        _ => (u.v3, f.alpha as f64),
                    };
                    // u_j c + i (i w_j c)
                    *out = c[i] * (uj - wj);
                });
                self.fft.inverse(&mut b, self.exec);
                b
            })
            .collect();
        let (b0, rest) = bufs.split_at_mut(1);
        let (b1, b2) = rest.split_at_mut(1);
        let (b1, b2) = (&b1[0], &b2[0]);
        self.exec.for_each_mut(&mut b0[0], |i, z| {
            let p = z.re * z.im + b1[i].re * b1[i].im + b2[i].re * b2[i].im;
            *z = Complex64::new(p, 0.0);
        });
        let mut p = std::mem::take(&mut b0[0]);
        self.fft.forward(&mut p, self.exec);
        let band = &self.in_band;
        self.exec.for_each_mut(&mut p, |i, z| {
            *z = if band[i] { -*z } else { Complex64::default() };
        });
        let mut out = SpectralField { lattice: l, coeffs: p };
        out.symmetrize();
        out
    }

    /// Integrating-factor RK4 step. The state is left untouched when the
    /// update is not finite.
    pub fn step_nonlinear(&self, state: &mut SimState, h: f64) -> Result<()> {
        let t = state.t;
        let ea = self.linear_factors(t, t + 0.5 * h);
        let eb = self.linear_factors(t + 0.5 * h, t + h);
        let u = &state.theta;
        let ex = self.exec;
        let l = u.lattice;
        let combine = |f: &(dyn Fn(usize) -> Complex64 + Sync)| -> SpectralField {
            let mut v = vec![Complex64::default(); l.len()];
            ex.for_each_mut(&mut v, |i, z| *z = f(i));
            SpectralField { lattice: l, coeffs: v }
        };
        let uc = &u.coeffs;
        let k1 = self.nonlinear_rhs(t, u);
        let u2 = combine(&|i| ea[i] * (uc[i] + 0.5 * h * k1.coeffs[i]));
        let k2 = self.nonlinear_rhs(t + 0.5 * h, &u2);
        let u3 = combine(&|i| ea[i] * uc[i] + 0.5 * h * k2.coeffs[i]);
        let k3 = self.nonlinear_rhs(t + 0.5 * h, &u3);
        let u4 = combine(&|i| ea[i] * eb[i] * uc[i] + h * eb[i] * k3.coeffs[i]);
        let k4 = self.nonlinear_rhs(t + h, &u4);
        let next = combine(&|i| {
            let e = ea[i] * eb[i];
            e * uc[i]
                + (h / 6.0) * (e * k1.coeffs[i] + 2.0 * eb[i] * (k2.coeffs[i] + k3.coeffs[i]) + k4.coeffs[i])
        });
        if !next.is_finite() {
            return Err(Error::NumericalAbort {
                t: t + h,
                reason: "non-finite coefficients after nonlinear step".into(),
            });
        }
        state.theta = next;
        state.t = t + h;
        Ok(())
    }

    pub fn step(&self, state: &mut SimState, dt: f64) -> Result<()> {
        match self.cfg.mode {
            RunMode::Linear => {
                self.step_linear(state, dt);
                Ok(())
            }
            RunMode::Nonlinear => self.step_nonlinear(state, dt),
        }
    }

    /// Advances `state` to `t_end`, calling `observe` at the starting time
    /// and after every output stride. Times are `n * dt` to avoid accumulated drift.
    /// On error `state` holds the last finite state.
    pub fn run<F>(&self, state: &mut SimState, mut observe: F) -> Result<()>
    where
        F: FnMut(&SimState, &DiagnosticRow) -> Result<()>,
    {
        let stride = self.cfg.output_stride();
        let steps = ((self.cfg.t_end - state.t) / self.cfg.dt).round().max(0.0) as usize;
        let dt = self.cfg.dt;
        let t0 = state.t;
        observe(state, &self.diagnostics(state))?;
        for n in 1..=steps {
            self.step(state, dt)?;
            state.t = t0 + n as f64 * dt;
            if n % stride == 0 || n == steps {
                observe(state, &self.diagnostics(state))?;
            }
        }
        Ok(())
    }
}

/// [`Solver::init_field`] for a one-off configuration.
pub fn init_field(cfg: &SimConfig) -> Result<SimState> {
    Solver::new(cfg.clone(), Exec::default())?.init_field()
}

/// One exact linear step on a state.
pub fn step_linear(state: &SimState, dt: f64) -> Result<SimState> {
    let cfg = SimConfig {
        lattice: state.theta.lattice,
        mode: RunMode::Linear,
        ..SimConfig::default()
    };
    let mut s = state.clone();
    Solver::new(cfg, Exec::default())?.step_linear(&mut s, dt);
    Ok(s)
}

/// The dealiased transport term of a state, with the default dealias fraction.
pub fn nonlinear_rhs(state: &SimState) -> Result<SpectralField> {
    let cfg = SimConfig {
        lattice: state.theta.lattice,
        ..SimConfig::default()
    };
    Ok(Solver::new(cfg, Exec::default())?.nonlinear_rhs(state.t, &state.theta))
}

/// One integrating-factor RK4 step on a state.
pub fn step_nonlinear(state: &SimState, dt: f64) -> Result<SimState> {
    let cfg = SimConfig {
        lattice: state.theta.lattice,
        ..SimConfig::default()
    };
    let mut s = state.clone();
    Solver::new(cfg, Exec::default())?.step_nonlinear(&mut s, dt)?;
    Ok(s)
}

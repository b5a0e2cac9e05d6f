//! Integrating-factor RK4 for `∂ₜu − Δu + P[(u·∇)u] = 0` on the periodic box.
//!
//! The viscous part is integrated exactly through `e^{−|k|²h}`; the
//! nonlinear term is evaluated pseudo-spectrally in divergence form
//! `(u·∇)u = ∂ⱼ(uⱼu)`, dealiased by the two-thirds rule and projected.
//! The mean mode is held at zero.

use std::fmt;
use std::str::FromStr;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lab::{EnergyLedger, LedgerRow};
use crate::multipliers::MultiplierSet;
use crate::similarity::{evaluate_routes, SimilarityClock};
use crate::spectral::{dealias_mask, forward_real, PhysicalField, SpectralField, SpectralGrid};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    TaylorGreen,
    RandomLowMode,
}

impl FromStr for InitialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor_green" => Ok(InitialKind::TaylorGreen),
            "random_low_mode" => Ok(InitialKind::RandomLowMode),
            other => Err(Error::InvalidParameter(format!(
                "unknown initial-data kind `{other}` (expected taylor_green or random_low_mode)"
            ))),
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialKind::TaylorGreen => "taylor_green",
            InitialKind::RandomLowMode => "random_low_mode",
        })
    }
}

/// How to build `u₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    /// Coefficient scale before any rescaling to `delta`.
    pub amplitude: f64,
    pub seed: u64,
    /// Target `‖u₀‖_{L²}`; `None` keeps the raw amplitude.
    pub delta: Option<f64>,
    /// Largest `|k|` populated by `random_low_mode`.
    pub k_max: f64,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            kind: InitialKind::RandomLowMode,
            amplitude: 1.0,
            seed: 1,
            delta: Some(0.01),
            k_max: 4.0,
        }
    }
}

/// Real, divergence-free, mean-free, dealiased `û₀`.
pub fn make_initial_data(spec: &InitialDataSpec, grid: &SpectralGrid) -> Result<SpectralField> {
    if !(spec.amplitude.is_finite() && spec.amplitude >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be finite and nonnegative, got {}",
            spec.amplitude
        )));
    }
    let mut field = match spec.kind {
        InitialKind::TaylorGreen => {
            let kappa = 2.0 * std::f64::consts::PI / grid.box_length();
            let a = spec.amplitude;
            PhysicalField::from_fn(grid, |x| {
                let [c1, c2, c3] = x.map(|v| (kappa * v).cos());
                let [s1, s2, _] = x.map(|v| (kappa * v).sin());
                [a * s1 * c2 * c3, -a * c1 * s2 * c3, 0.0]
            })
            .to_spectral()
        }
        InitialKind::RandomLowMode => random_low_mode(spec, grid)?,
    };
    field.set_mode(0, [Complex64::new(0.0, 0.0); 3]);
    field.leray_project_in_place();
    field.dealias_in_place();
    if let Some(delta) = spec.delta {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be finite and nonnegative, got {delta}"
            )));
        }
        let norm = field.l2_sq().sqrt();
        if delta == 0.0 {
            field.scale_in_place(0.0);
        } else if norm == 0.0 {
            return Err(Error::InvalidParameter(
                "initial data vanish on this grid; cannot rescale to delta".into(),
            ));
        } else {
            field.scale_in_place(delta / norm);
        }
    }
    Ok(field)
}

/// Seeded complex normal coefficients on `0 < |k| ≤ k_max`. Integer modes
/// are visited in a fixed lexicographic order over a box that depends only
/// on `k_max` and `L`, so the draw is the same on every resolution.
fn random_low_mode(spec: &InitialDataSpec, grid: &SpectralGrid) -> Result<SpectralField> {
    if !(spec.k_max > 0.0 && spec.k_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "k_max must be positive, got {}",
            spec.k_max
        )));
    }
    let unit = 2.0 * std::f64::consts::PI / grid.box_length();
    let reach = (spec.k_max / unit).floor() as i64;
    let half = grid.n() as i64 / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut field = SpectralField::zeros(grid);
    for m1 in -reach..=reach {
        for m2 in -reach..=reach {
            for m3 in -reach..=reach {
                let m = [m1, m2, m3];
                // one draw per conjugate pair: keep m > −m lexicographically
                if m <= [-m1, -m2, -m3] {
                    continue;
                }
                let k2 = m.iter().map(|&c| (c as f64 * unit).powi(2)).sum::<f64>();
                let coef: [Complex64; 3] = [0, 1, 2].map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) * spec.amplitude
                });
                if k2.sqrt() > spec.k_max || m.iter().any(|c| c.abs() >= half) {
                    continue;
                }
                field.set_mode(grid.index_of_mode(m), coef);
                field.set_mode(grid.index_of_mode(m.map(|c| -c)), coef.map(|c| c.conj()));
            }
        }
    }
    Ok(field)
}

/// Spectral velocity at one time.
#[derive(Clone, Debug)]
pub struct TrajectoryState {
    pub u_hat: SpectralField,
    pub t: f64,
    pub step: u64,
    pub last_dt: f64,
}

impl TrajectoryState {
    pub fn new(u_hat: SpectralField) -> Self {
        Self {
            u_hat,
            t: 0.0,
            step: 0,
            last_dt: 0.0,
        }
    }
}

/// Time stepper bound to one grid.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: SpectralGrid,
    mask: Vec<bool>,
    nonlinear: bool,
    c_cfl: f64,
}

impl Integrator {
    pub fn new(grid: &SpectralGrid, c_cfl: f64) -> Result<Self> {
        if !(c_cfl > 0.0 && c_cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "c_cfl must lie in (0, 1], got {c_cfl}"
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            mask: dealias_mask(grid),
            nonlinear: true,
            c_cfl,
        })
    }

    /// Switches the nonlinear term off (pure heat flow) or back on.
    pub fn with_nonlinear(mut self, nonlinear: bool) -> Self {
        self.nonlinear = nonlinear;
        self
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// `−P[F[(u·∇)u]]`, dealiased. Zero when the nonlinearity is switched off.
    pub fn nonlinear_rhs(&self, u_hat: &SpectralField) -> SpectralField {
        if !self.nonlinear {
            return SpectralField::zeros(&self.grid);
        }
        nonlinear_term(u_hat, &self.mask)
    }

    /// `c_cfl · min(Δx / max|u|, 1/k_max²)` with `k_max = πn/L`.
    pub fn cfl_dt(&self, state: &TrajectoryState) -> f64 {
        let k_max = self.grid.max_axis_wavenumber();
        let viscous = 1.0 / (k_max * k_max);
        let speed = state.u_hat.to_physical().sup_norm();
        let advective = if speed > 0.0 {
            self.grid.dx() / speed
        } else {
            f64::INFINITY
        };
        self.c_cfl * advective.min(viscous)
    }

    /// One integrating-factor RK4 step.
    pub fn step(&self, state: &TrajectoryState, dt: f64) -> Result<TrajectoryState> {
        let limit = self.cfl_dt(state);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::TimeStep { dt, limit });
        }
        self.step_unchecked(state, dt)
    }

    /// One step without the CFL precondition; used by convergence studies
    /// that need steps above the stability-motivated bound.
    pub fn step_unchecked(&self, state: &TrajectoryState, dt: f64) -> Result<TrajectoryState> {
        let k_sq = self.grid.k_sq();
        let e_half: Vec<f64> = k_sq.iter().map(|k2| (-k2 * 0.5 * dt).exp()).collect();
        let e_full: Vec<f64> = k_sq.iter().map(|k2| (-k2 * dt).exp()).collect();
        let half = |f: &SpectralField| f.apply_symbol(|i| e_half[i]);
        let full = |f: &SpectralField| f.apply_symbol(|i| e_full[i]);

        let u = &state.u_hat;
        let a = self.nonlinear_rhs(u);
        let ua = half(&u.axpy(0.5 * dt, &a));
        let b = self.nonlinear_rhs(&ua);
        let ub = half(u).axpy(0.5 * dt, &b);
        let c = self.nonlinear_rhs(&ub);
        let uc = full(u).axpy(dt, &half(&c));
        let d = self.nonlinear_rhs(&uc);

        let combo = full(&a).axpy(2.0, &half(&b.axpy(1.0, &c))).axpy(1.0, &d);
        let mut next = full(u).axpy(dt / 6.0, &combo);
        next.set_mode(0, [Complex64::new(0.0, 0.0); 3]);
        next.leray_project_in_place();

        let t = state.t + dt;
        let step = state.step + 1;
        if !next.is_finite() {
            return Err(Error::NumericalBlowup {
                step,
                t,
                what: "velocity coefficients".into(),
            });
        }
        Ok(TrajectoryState {
            u_hat: next,
            t,
            step,
            last_dt: dt,
        })
    }
}

/// `−P[dealias(i kⱼ F[uⱼ uₖ])]`.
fn nonlinear_term(u_hat: &SpectralField, mask: &[bool]) -> SpectralField {
    let grid = u_hat.grid();
    let u = u_hat.to_physical();
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let products: Vec<Vec<Complex64>> = pairs
        .iter()
        .map(|&(a, b)| {
            let prod: Vec<f64> = u
                .component(a)
                .iter()
                .zip(u.component(b))
                .map(|(x, y)| x * y)
                .collect();
            forward_real(grid, &prod)
        })
        .collect();
    let flux = |a: usize, b: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let pos = pairs
            .iter()
            .position(|&p| p == (a, b))
            .expect("pair listed");
        &products[pos]
    };
    let mut out = SpectralField::zeros(grid);
    let comps = out.components_mut();
    for idx in 0..grid.len() {
        if !mask[idx] {
            continue;
        }
        let k = grid.odd_wavevector(idx);
        for (c, comp) in comps.iter_mut().enumerate() {
            let div: Complex64 = (0..3).map(|j| flux(j, c)[idx] * k[j]).sum();
            comp[idx] = Complex64::new(div.im, -div.re);
        }
    }
    out.leray_project_in_place();
    out
}

/// `−P[F[(u·∇)u]]` with the nonlinearity on; see [`Integrator::nonlinear_rhs`].
pub fn nonlinear_rhs(u_hat: &SpectralField) -> SpectralField {
    nonlinear_term(u_hat, &dealias_mask(u_hat.grid()))
}

/// Everything a trajectory run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub box_length: f64,
    /// `T`
    pub horizon: f64,
    pub initial: InitialDataSpec,
    pub c_cfl: f64,
    pub alpha: f64,
    /// Stop at `T − t_min`; `None` means `T·e^{−6}`.
    pub t_min: Option<f64>,
    /// Log every `stride`-th step (the final step is always logged).
    pub stride: usize,
    /// Cap on the similarity-time increment per step, `dt ≤ dtau_max·(T−t)`.
    pub dtau_max: f64,
    pub nonlinear: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n: 32,
            box_length: 2.0 * std::f64::consts::PI,
            horizon: 1.0,
            initial: InitialDataSpec::default(),
            c_cfl: 0.5,
            alpha: crate::multipliers::DEFAULT_ALPHA,
            t_min: None,
            stride: 2,
            dtau_max: 0.02,
            nonlinear: true,
        }
    }
}

impl SimulationConfig {
    pub fn t_min(&self) -> f64 {
        self.t_min.unwrap_or(self.horizon * (-6.0f64).exp())
    }

    /// Last physical time reached by [`run`].
    pub fn t_end(&self) -> f64 {
        self.horizon - self.t_min()
    }

    pub fn validate(&self) -> Result<()> {
        SpectralGrid::new(self.n, self.box_length)?;
        crate::multipliers::Alpha::new(self.alpha)?;
        let positive = [
            ("horizon", self.horizon),
            ("c_cfl", self.c_cfl),
            ("dtau_max", self.dtau_max),
            ("t_min", self.t_min()),
            ("k_max", self.initial.k_max),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.c_cfl > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "c_cfl must lie in (0, 1], got {}",
                self.c_cfl
            )));
        }
        if self.t_min() >= self.horizon {
            return Err(Error::InvalidParameter(format!(
                "t_min {} must be below the horizon {}",
                self.t_min(),
                self.horizon
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        if self.initial.amplitude < 0.0 || !self.initial.amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be finite and nonnegative, got {}",
                self.initial.amplitude
            )));
        }
        if let Some(delta) = self.initial.delta {
            if !(delta >= 0.0 && delta.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "delta must be finite and nonnegative, got {delta}"
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.n, self.box_length)
    }
}

/// Output of [`run`]: the ledger plus the initial similarity energy.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub ledger: EnergyLedger,
    pub initial_energy: f64,
    pub steps: u64,
}

/// Integrates from `t = 0` to `T − t_min`, logging a ledger row at `t = 0`,
/// every `stride` steps, and at the final time.
pub fn run(config: &SimulationConfig) -> Result<EnergyLedger> {
    Ok(run_detailed(config)?.ledger)
}

pub fn run_detailed(config: &SimulationConfig) -> Result<RunOutput> {
    config.validate()?;
    let grid = config.grid()?;
    let set = MultiplierSet::new(config.alpha)?;
    let integrator = Integrator::new(&grid, config.c_cfl)?.with_nonlinear(config.nonlinear);
    let u0 = make_initial_data(&config.initial, &grid)?;
    let initial_energy = crate::similarity::initial_similarity_energy(&u0, config.horizon, &set)?;

    let horizon = config.horizon;
    let t_end = config.t_end();
    let mut state = TrajectoryState::new(u0);
    let mut ledger = EnergyLedger::default().with_alpha(config.alpha);
    let record = |state: &TrajectoryState, ledger: &mut EnergyLedger| -> Result<()> {
        let clock = SimilarityClock::new(state.t, horizon)?;
        let eval = evaluate_routes(&state.u_hat, &clock, &set)?;
        let row = LedgerRow::from_evaluation(&clock, state.last_dt, &eval);
        if row.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup {
                step: state.step,
                t: state.t,
                what: "ledger functionals".into(),
            });
        }
        ledger.push(row);
        Ok(())
    };
    record(&state, &mut ledger)?;

    while state.t < t_end {
        let remaining = t_end - state.t;
        let mut dt = integrator
            .cfl_dt(&state)
            .min(config.dtau_max * (horizon - state.t));
        let last = dt >= remaining * (1.0 - 1e-9);
        if last {
            dt = remaining;
        }
        state = if last {
            let mut s = integrator.step_unchecked(&state, dt)?;
            s.t = t_end;
            s
        } else {
            integrator.step(&state, dt)?
        };
        if last || state.step % config.stride as u64 == 0 {
            record(&state, &mut ledger)?;
        }
        if last {
            break;
        }
    }
    debug!(
        "run finished: {} steps, {} rows, final t = {}",
        state.step,
        ledger.len(),
        state.t
    );
    Ok(RunOutput {
        ledger,
        initial_energy,
        steps: state.step,
    })
}

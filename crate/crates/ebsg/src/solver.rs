//! Time integration of the advection–diffusion equation.
//!
//! The semi-discrete Galerkin system `A δ̇ + (ξB − λC) δ = 0` (mass,
//! advection, diffusion matrices from [`crate::assembly`]) is advanced by the
//! Crank–Nicolson rule
//!
//! ```text
//! [A + (Δt/2)(ξB − λC)] δ^{n+1} = [A − (Δt/2)(ξB − λC)] δ^n.
//! ```
//!
//! The two Dirichlet conditions replace the weighted-residual equations for
//! the exterior basis functions `B_{−1}` and `B_{n+1}`: their coefficients are
//! eliminated through the boundary value identities
//!
//! ```text
//! α₁δ_{−1} + δ_0 + α₁δ_1 = u(x_0, t),     α₁δ_{n−1} + δ_n + α₁δ_{n+1} = u(x_n, t),
//! ```
//!
//! leaving an `(n+1)`-unknown septa-diagonal system whose matrix is constant
//! in time and factored once. After each solve the exterior coefficients are
//! rebuilt from the identities so the full coefficient vector stays available
//! for evaluation and for the next right-hand side.
//!
//! The initial coefficients interpolate `u₀` at the knots, closed by the two
//! endpoint slope conditions (the same closure used in collocation fits of
//! splines): `δ_{−1} = δ_1 + u₀′(x_0)/α₂` and `δ_{n+1} = δ_{n−1} − u₀′(x_n)/α₂`.

use crate::assembly::{assemble_global, AssemblyError, GlobalMatrices};
use crate::basis::{eval_basis, BasisConstants, BasisError, Mesh};
use crate::linalg::{solve_tridiagonal, BandedLu, BandedMatrix, LinalgError};
use std::sync::Arc;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Hard cap on the number of time steps a single [`run`] may take.
pub const MAX_STEPS: u64 = 100_000_000;

/// Relative tolerance for `t_final / Δt` being an integer.
const STEP_COUNT_TOLERANCE: f64 = 1e-9;

/// Errors from problem setup and time integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// Invalid mesh or tension parameters.
    #[error(transparent)]
    Basis(#[from] BasisError),
    /// Invalid quadrature order.
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    /// Linear-algebra failure (singular or near-singular system).
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    /// The boundary elimination needs at least three elements.
    #[error("mesh has {0} elements; the solver requires at least 3")]
    MeshTooCoarse(usize),
    /// Time step must be positive and finite.
    #[error("time step {0} must be positive and finite")]
    InvalidTimeStep(f64),
    /// Final time must be non-negative and finite.
    #[error("final time {0} must be non-negative and finite")]
    InvalidFinalTime(f64),
    /// `t_final` must be an integer multiple of `Δt`.
    #[error("final time {t_final} is not an integer multiple of the time step {dt}")]
    NonIntegerStepCount { t_final: f64, dt: f64 },
    /// The run would exceed [`MAX_STEPS`] steps.
    #[error("run would take {0} steps, more than the supported maximum {MAX_STEPS}")]
    TooManySteps(u64),
    /// The coefficient vector left the representable range.
    #[error("solution became non-finite at step {0}")]
    NonFiniteState(u64),
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One initial-boundary-value problem for `u_t + ξ·u_x − λ·u_xx = 0`.
///
/// Cloning is cheap (the closures are shared). The endpoint slopes of the
/// initial condition close the interpolation system; when no analytic slope is
/// supplied they are approximated by one-sided fourth-order differences with
/// spacing `h/2`, consistent with the scheme's accuracy.
#[derive(Clone)]
pub struct ProblemSpec {
    /// Advection velocity ξ.
    pub velocity: f64,
    /// Diffusion coefficient λ (non-negative).
    pub diffusivity: f64,
    /// Spatial domain `[a, b]`.
    pub domain: (f64, f64),
    initial: ScalarFn,
    initial_slope: Option<ScalarFn>,
    left_bc: ScalarFn,
    right_bc: ScalarFn,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("velocity", &self.velocity)
            .field("diffusivity", &self.diffusivity)
            .field("domain", &self.domain)
            .field("analytic_initial_slope", &self.initial_slope.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Builds a problem from the PDE coefficients, the initial profile
    /// `u₀(x)`, and the two Dirichlet boundary signals `t ↦ u(a, t)` and
    /// `t ↦ u(b, t)`.
    pub fn new(
        domain: (f64, f64),
        velocity: f64,
        diffusivity: f64,
        initial: impl Fn(f64) -> f64 + Send + Sync + 'static,
        left_bc: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right_bc: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ProblemSpec {
            velocity,
            diffusivity,
            domain,
            initial: Arc::new(initial),
            initial_slope: None,
            left_bc: Arc::new(left_bc),
            right_bc: Arc::new(right_bc),
        }
    }

    /// Supplies the analytic derivative `u₀′(x)`, used for the endpoint slope
    /// conditions of the initial fit instead of finite differences.
    pub fn with_initial_slope(
        mut self,
        slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.initial_slope = Some(Arc::new(slope));
        self
    }

    /// The initial profile at `x`.
    pub fn initial(&self, x: f64) -> f64 {
        (self.initial)(x)
    }

    /// The left boundary value at time `t`.
    pub fn left_bc(&self, t: f64) -> f64 {
        (self.left_bc)(t)
    }

    /// The right boundary value at time `t`.
    pub fn right_bc(&self, t: f64) -> f64 {
        (self.right_bc)(t)
    }

    /// Endpoint slope of `u₀`: analytic when available, otherwise a one-sided
    /// fourth-order difference with spacing `step` (signed; positive probes
    /// rightward into the domain).
    fn initial_slope_at(&self, x: f64, step: f64) -> f64 {
        if let Some(slope) = &self.initial_slope {
            return slope(x);
        }
        let f = |k: f64| (self.initial)(x + k * step);
        (-25.0 * f(0.0) + 48.0 * f(1.0) - 36.0 * f(2.0) + 16.0 * f(3.0) - 3.0 * f(4.0))
            / (12.0 * step)
    }
}

/// Spatial and temporal discretization parameters for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    /// Number of mesh elements (`≥ 3`).
    pub n: usize,
    /// Tension parameter `p` of the basis.
    pub p: f64,
    /// Time step Δt.
    pub dt: f64,
    /// Gauss–Legendre order for matrix assembly.
    pub quad_order: usize,
}

impl Discretization {
    /// Convenience constructor with the default quadrature order 10.
    pub fn new(n: usize, p: f64, dt: f64) -> Self {
        Discretization {
            n,
            p,
            dt,
            quad_order: 10,
        }
    }
}

/// Interpolates `u₀` at the knots: the tridiagonal value conditions
/// `α₁δ_{m−1} + δ_m + α₁δ_{m+1} = u₀(x_m)` closed by the endpoint slope
/// conditions. Returns the full coefficient vector `δ_{−1} ..= δ_{n+1}` as
/// `n + 3` entries (entry `g` holds `δ_{g−1}`).
pub fn fit_initial(
    mesh: &Mesh,
    constants: &BasisConstants,
    spec: &ProblemSpec,
) -> Result<Vec<f64>, SolverError> {
    let n = mesh.n();
    if n < 3 {
        return Err(SolverError::MeshTooCoarse(n));
    }
    let a1 = constants.alpha1;
    let a2 = constants.alpha2;
    let h = mesh.h();
    let slope_left = spec.initial_slope_at(mesh.a(), 0.5 * h);
    let slope_right = spec.initial_slope_at(mesh.b(), -0.5 * h);

    // Eliminating the exterior coefficients from the first and last value
    // conditions doubles their off-diagonal entry and shifts the data by the
    // slope term.
    let mut diag = vec![1.0; n + 1];
    let mut sub = vec![a1; n];
    let mut sup = vec![a1; n];
    sup[0] = 2.0 * a1;
    sub[n - 1] = 2.0 * a1;
    let mut rhs: Vec<f64> = (0..=n).map(|m| spec.initial(mesh.knot(m as i64))).collect();
    rhs[0] -= a1 * slope_left / a2;
    rhs[n] += a1 * slope_right / a2;
    // `diag` is all ones; kept explicit for clarity of the system shape.
    diag.iter_mut().for_each(|d| *d = 1.0);

    let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;

    let mut state = vec![0.0; n + 3];
    state[1..=(n + 1)].copy_from_slice(&interior);
    state[0] = interior[1] + slope_left / a2;
    state[n + 2] = interior[n - 1] - slope_right / a2;
    Ok(state)
}

/// A Crank–Nicolson time stepper with the boundary-eliminated system factored
/// once at construction.
pub struct TimeStepper {
    mesh: Mesh,
    constants: BasisConstants,
    dt: f64,
    /// Full `(n+3)²` right-hand-side operator `A − (Δt/2)(ξB − λC)`.
    rhs_operator: BandedMatrix,
    /// Factored reduced `(n+1)²` left-hand-side matrix.
    lhs: BandedLu,
    /// Per-row right-hand-side coefficients of `u(a, t^{n+1})` for the first
    /// three reduced equations (from eliminating `δ_{−1}`).
    bc_left: [f64; 3],
    /// Same for `u(b, t^{n+1})` and the last three reduced equations.
    bc_right: [f64; 3],
    spec: ProblemSpec,
    /// Coefficients `δ_{−1} ..= δ_{n+1}`.
    state: Vec<f64>,
    steps_taken: u64,
    /// Scratch: full-size matrix–vector product.
    work_full: Vec<f64>,
    /// Scratch: reduced right-hand side / solution.
    work_reduced: Vec<f64>,
}

/// Builds the full Crank–Nicolson operators `A ± (Δt/2)(ξB − λC)` from the
/// assembled global matrices; the first matrix returned is the implicit
/// (left) operator.
fn crank_nicolson_operators(
    gm: &GlobalMatrices,
    dt: f64,
    velocity: f64,
    diffusivity: f64,
) -> (BandedMatrix, BandedMatrix) {
    let size = gm.mass.n();
    let bw = gm.mass.bandwidth();
    let mut lhs = BandedMatrix::new(size, bw);
    let mut rhs = BandedMatrix::new(size, bw);
    let k = 0.5 * dt;
    for r in 0..size {
        let lo = r.saturating_sub(bw);
        let hi = (r + bw).min(size - 1);
        for c in lo..=hi {
            let transport =
                velocity * gm.advection.get(r, c) - diffusivity * gm.diffusion.get(r, c);
            let m = gm.mass.get(r, c);
            lhs.set(r, c, m + k * transport);
            rhs.set(r, c, m - k * transport);
        }
    }
    (lhs, rhs)
}

impl TimeStepper {
    /// Assembles the Galerkin matrices for `spec` on an `disc.n`-element mesh,
    /// performs the boundary elimination, factors the implicit operator, and
    /// fits the initial condition.
    pub fn new(spec: &ProblemSpec, disc: &Discretization) -> Result<Self, SolverError> {
        if disc.n < 3 {
            return Err(SolverError::MeshTooCoarse(disc.n));
        }
        if disc.dt <= 0.0 || !disc.dt.is_finite() {
            return Err(SolverError::InvalidTimeStep(disc.dt));
        }
        let mesh = Mesh::new(spec.domain.0, spec.domain.1, disc.n)?;
        let constants = BasisConstants::new(disc.p, mesh.h())?;
        let gm = assemble_global(&mesh, &constants, disc.quad_order)?;
        let (lhs_full, rhs_operator) =
            crank_nicolson_operators(&gm, disc.dt, spec.velocity, spec.diffusivity);

        // Reduced system: unknowns δ_0 ..= δ_n (full columns 1 ..= n+1), kept
        // equations are the weighted residuals of B_0 ..= B_n (full rows
        // 1 ..= n+1). The exterior coefficients are eliminated via
        //     δ_{−1}  = (u(a,t) − δ_0 − α₁δ_1) / α₁,
        //     δ_{n+1} = (u(b,t) − δ_n − α₁δ_{n−1}) / α₁,
        // which adds corrections to the first/last three rows and moves the
        // boundary-value terms to the right-hand side.
        let n = disc.n;
        let size = n + 1;
        let a1 = constants.alpha1;
        let mut reduced = BandedMatrix::new(size, 3);
        for r in 0..size {
            let full_row = r + 1;
            let lo = r.saturating_sub(3);
            let hi = (r + 3).min(size - 1);
            for c in lo..=hi {
                reduced.set(r, c, lhs_full.get(full_row, c + 1));
            }
        }
        let mut bc_left = [0.0; 3];
        let mut bc_right = [0.0; 3];
        for r in 0..3 {
            let coupling = lhs_full.get(r + 1, 0);
            reduced.add(r, 0, -coupling / a1);
            reduced.add(r, 1, -coupling);
            bc_left[r] = -coupling / a1;
        }
        for (k, r) in ((size - 3)..size).enumerate() {
            let coupling = lhs_full.get(r + 1, n + 2);
            reduced.add(r, n, -coupling / a1);
            reduced.add(r, n - 1, -coupling);
            bc_right[k] = -coupling / a1;
        }
        let lhs = BandedLu::factor(&reduced)?;

        let state = fit_initial(&mesh, &constants, spec)?;
        Ok(TimeStepper {
            mesh,
            constants,
            dt: disc.dt,
            rhs_operator,
            lhs,
            bc_left,
            bc_right,
            spec: spec.clone(),
            state,
            steps_taken: 0,
            work_full: vec![0.0; n + 3],
            work_reduced: vec![0.0; size],
        })
    }

    /// The mesh the solution lives on.
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// The basis constants in use.
    pub fn constants(&self) -> &BasisConstants {
        &self.constants
    }

    /// Current simulation time `steps_taken · Δt`.
    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    /// Number of completed steps.
    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    /// The full coefficient vector `δ_{−1} ..= δ_{n+1}`.
    pub fn state(&self) -> &[f64] {
        &self.state
    }

    /// Advances the solution by one time step.
    pub fn step(&mut self) -> Result<(), SolverError> {
        let n = self.mesh.n();
        let t_next = (self.steps_taken + 1) as f64 * self.dt;
        let beta_left = self.spec.left_bc(t_next);
        let beta_right = self.spec.right_bc(t_next);

        self.rhs_operator.matvec(&self.state, &mut self.work_full);
        for r in 0..=n {
            self.work_reduced[r] = self.work_full[r + 1];
        }
        for r in 0..3 {
            self.work_reduced[r] += self.bc_left[r] * beta_left;
            self.work_reduced[n - 2 + r] += self.bc_right[r] * beta_right;
        }
        self.lhs.solve_in_place(&mut self.work_reduced);

        self.state[1..=(n + 1)].copy_from_slice(&self.work_reduced);
        let a1 = self.constants.alpha1;
        self.state[0] = (beta_left - self.state[1] - a1 * self.state[2]) / a1;
        self.state[n + 2] = (beta_right - self.state[n + 1] - a1 * self.state[n]) / a1;
        self.steps_taken += 1;

        if !self.state.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFiniteState(self.steps_taken));
        }
        Ok(())
    }

    /// The solution at knot `j` (`0 ..= n`): `α₁δ_{j−1} + δ_j + α₁δ_{j+1}`.
    pub fn nodal_values(&self) -> Vec<f64> {
        nodal_values_of(&self.constants, &self.state)
    }

    /// Evaluates the spline solution at an arbitrary point `x` (0 outside the
    /// domain's basis support).
    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.mesh.h();
        let m = (((x - self.mesh.a()) / h).floor() as i64).clamp(0, self.mesh.n() as i64 - 1);
        let mut sum = 0.0;
        for i in (m - 1)..=(m + 2) {
            sum += self.state[(i + 1) as usize] * eval_basis(&self.mesh, &self.constants, i, x, 0);
        }
        sum
    }
}

/// Knot values of a coefficient vector: entry `j` is
/// `α₁δ_{j−1} + δ_j + α₁δ_{j+1}`.
pub fn nodal_values_of(constants: &BasisConstants, state: &[f64]) -> Vec<f64> {
    let a1 = constants.alpha1;
    (0..state.len() - 2)
        .map(|g| a1 * state[g] + state[g + 1] + a1 * state[g + 2])
        .collect()
}

/// The solution profile captured at one time level.
#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Simulation time of the capture.
    pub time: f64,
    /// Solution values at the `n + 1` knots.
    pub nodal: Vec<f64>,
}

/// Result of a completed [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Captured profiles in time order (always includes `t = 0` and
    /// `t = t_final`).
    pub snapshots: Vec<Snapshot>,
    /// Number of time steps taken.
    pub steps: u64,
    /// Full coefficient vector at the final time.
    pub final_state: Vec<f64>,
}

impl RunOutput {
    /// The snapshot at the final time.
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("run output always holds at least the initial snapshot")
    }
}

/// Integrates `spec` from `t = 0` to `t_final` and captures knot profiles.
///
/// `t_final` must be a non-negative integer multiple of `disc.dt` (relative
/// tolerance `1e−9`) needing at most [`MAX_STEPS`] steps. Snapshots are taken
/// at `t = 0`, at `t_final`, and at each requested time in `snapshot_times`
/// snapped to the nearest step boundary; duplicates collapse.
pub fn run(
    spec: &ProblemSpec,
    disc: &Discretization,
    t_final: f64,
    snapshot_times: &[f64],
) -> Result<RunOutput, SolverError> {
    if disc.dt <= 0.0 || !disc.dt.is_finite() {
        return Err(SolverError::InvalidTimeStep(disc.dt));
    }
    if t_final < 0.0 || !t_final.is_finite() {
        return Err(SolverError::InvalidFinalTime(t_final));
    }
    let ratio = t_final / disc.dt;
    if ratio > MAX_STEPS as f64 {
        return Err(SolverError::TooManySteps(ratio.ceil() as u64));
    }
    let steps = ratio.round() as u64;
    if (ratio - steps as f64).abs() > STEP_COUNT_TOLERANCE * ratio.max(1.0) {
        return Err(SolverError::NonIntegerStepCount {
            t_final,
            dt: disc.dt,
        });
    }

    let mut capture: Vec<u64> = snapshot_times
        .iter()
        .map(|&t| ((t / disc.dt).round().max(0.0) as u64).min(steps))
        .collect();
    capture.push(0);
    capture.push(steps);
    capture.sort_unstable();
    capture.dedup();

    let mut stepper = TimeStepper::new(spec, disc)?;
    let mut snapshots = Vec::with_capacity(capture.len());
    let mut next = capture.iter().copied().peekable();
    for k in 0..=steps {
        if next.peek() == Some(&k) {
            next.next();
            snapshots.push(Snapshot {
                time: stepper.time(),
                nodal: stepper.nodal_values(),
            });
        }
        if k < steps {
            stepper.step()?;
        }
    }
    Ok(RunOutput {
        snapshots,
        steps,
        final_state: stepper.state().to_vec(),
    })
}

/// One independent solver job for the batch drivers.
#[derive(Debug, Clone)]
pub struct RunRequest {
    /// The problem to integrate.
    pub spec: ProblemSpec,
    /// Its discretization.
    pub disc: Discretization,
    /// Final time of the integration.
    pub t_final: f64,
    /// Requested snapshot times.
    pub snapshot_times: Vec<f64>,
}

/// Runs every request in order on the current thread.
pub fn run_batch_sequential(requests: &[RunRequest]) -> Vec<Result<RunOutput, SolverError>> {
    requests
        .iter()
        .map(|r| run(&r.spec, &r.disc, r.t_final, &r.snapshot_times))
        .collect()
}

/// Runs the requests across the rayon thread pool; results keep request
/// order. Independent runs are embarrassingly parallel — each owns its
/// matrices and state — while a single run stays sequential in time.
#[cfg(feature = "parallel")]
pub fn run_batch(requests: &[RunRequest]) -> Vec<Result<RunOutput, SolverError>> {
    requests
        .par_iter()
        .map(|r| run(&r.spec, &r.disc, r.t_final, &r.snapshot_times))
        .collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn run_batch(requests: &[RunRequest]) -> Vec<Result<RunOutput, SolverError>> {
    run_batch_sequential(requests)
}

//! Brute-force reference dynamics: direct integration of
//! `i d/dt psi = H(t) psi` on the truncated space, dressed-state
//! populations of the result, and the Bessel expansion of the periodic
//! drive phase.

use serde::Serialize;

use crate::algebra::{tail_leakage, CMat, CVec, HermitianEigen, C64, I, LEAKAGE_TOL};
use crate::dressing::DressedFrame;
use crate::error::{Error, Result};
use crate::hamiltonians::Hamiltonian;

/// Refinement control for [`integrate`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepControl {
    /// Accept an interval once two successive halvings differ by less than this
    /// in state norm distance.
    pub tol: f64,
    /// Substeps per grid interval tried first.
    pub initial_substeps: usize,
    /// Smallest step allowed before giving up.
    pub h_min: f64,
    /// Mode dimension used for the tail-leakage series; `None` skips it.
    pub mode_dim: Option<usize>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { tol: 1e-8, initial_substeps: 4, h_min: 1e-9, mode_dim: None }
    }
}

impl StepControl {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_mode_dim(mut self, mode_dim: usize) -> Self {
        self.mode_dim = Some(mode_dim);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodMeta {
    pub method: &'static str,
    pub order: u32,
    /// Smallest step used anywhere on the grid.
    pub min_step: f64,
    /// Total number of accepted substeps.
    pub steps: usize,
    /// Largest halving difference accepted.
    pub max_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<CVec>,
    /// Tail weight of each state; empty unless a mode dimension was given.
    pub leakage: Vec<f64>,
    pub meta: MethodMeta,
}

impl Trajectory {
    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidGrid("empty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("non-finite time"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("times must be strictly increasing"));
    }
    Ok(())
}

/// `exp(-i h H)` for Hermitian `H`, closed form for 2x2.
pub fn hermitian_step(h: f64, ham: &CMat) -> Result<CMat> {
    if ham.nrows() == 2 {
        let (a, d, b) = (ham[(0, 0)].re, ham[(1, 1)].re, ham[(0, 1)]);
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let r = (half * half + b.norm_sqr()).sqrt();
        let (c, s) = ((h * r).cos(), (h * r).sin());
        // sin(h r)/r, finite as r -> 0
        let sinc = if r * h.abs() < 1e-8 { h } else { s / r };
        let phase = (-I * h * mean).exp();
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(c, -sinc * half),
                -I * sinc * b,
                -I * sinc * b.conj(),
                C64::new(c, sinc * half),
            ],
        );
        return Ok(m * phase);
    }
    Ok(HermitianEigen::new(ham)?.exp_scaled(C64::new(0.0, -h)))
}

/// Largest `h ||H - mu||_1` for which [`step_action`] sums the Taylor series.
const TAYLOR_RADIUS: f64 = 0.5;

/// `exp(-i h H) psi`. Small steps sum the Taylor series of the diagonally
/// shifted generator until the next term drops below rounding; larger ones
/// go through [`hermitian_step`].
pub fn step_action(h: f64, ham: &CMat, psi: &CVec) -> Result<CVec> {
    let n = ham.nrows();
    if n == 2 {
        return Ok(hermitian_step(h, ham)? * psi);
    }
    let (lo, hi) = ham.diagonal().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.re), hi.max(d.re)));
    let mu = 0.5 * (lo + hi);
    let shifted = ham - CMat::identity(n, n) * C64::from(mu);
    let norm1 = (0..n).map(|j| shifted.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    if !norm1.is_finite() {
        return Err(Error::NonFinite);
    }
    if h.abs() * norm1 > TAYLOR_RADIUS {
        return Ok(hermitian_step(h, ham)? * psi);
    }
    let mut term = psi.clone();
    let mut sum = psi.clone();
    for k in 1..=40 {
        term = &shifted * term * (-I * h / k as f64);
        sum += &term;
        // the tail is bounded by the last term since the ratio is <= 1/2
        if term.norm() <= f64::EPSILON * 0.1 * sum.norm() {
            break;
        }
    }
    Ok(sum * (-I * h * mu).exp())
}

fn midpoint_sweep<H: Hamiltonian + ?Sized>(ham: &H, psi: &CVec, t0: f64, t1: f64, substeps: usize) -> Result<CVec> {
    let h = (t1 - t0) / substeps as f64;
    let mut out = psi.clone();
    for k in 0..substeps {
        let tm = t0 + (k as f64 + 0.5) * h;
        out = step_action(h, &ham.at(tm), &out)?;
    }
    Ok(out)
}

/// Integrate from `psi0` at `t_grid[0]` and record the state at every grid
/// time.
///
/// Each interval is covered with exponential-midpoint steps
/// `exp(-i h H(t + h/2))`, halving `h` until two successive refinements agree
/// to `control.tol`; the finer of the pair is kept. A time-independent
/// Hamiltonian is instead propagated exactly from one eigendecomposition.
pub fn integrate<H: Hamiltonian + ?Sized>(
    ham: &H,
    psi0: &CVec,
    t_grid: &[f64],
    control: StepControl,
) -> Result<Trajectory> {
    check_grid(t_grid)?;
    if psi0.len() != ham.dim() {
        return Err(Error::DimensionMismatch { expected: ham.dim(), got: psi0.len() });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }

    let mut states = Vec::with_capacity(t_grid.len());
    let mut meta = MethodMeta { method: "", order: 2, min_step: f64::INFINITY, steps: 0, max_diff: 0.0 };

    if ham.is_time_independent() {
        let eig = HermitianEigen::new(&ham.at(t_grid[0]))?;
        for &t in t_grid {
            states.push(eig.evolve(t - t_grid[0], psi0));
        }
        meta.method = "eigendecomposition";
        meta.order = 0;
        meta.min_step = 0.0;
    } else {
        meta.method = "exponential-midpoint";
        states.push(psi0.clone());
        let mut substeps = control.initial_substeps.max(1);
        for w in t_grid.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let psi = states.last().expect("seeded with psi0").clone();
            // start from half the count that last succeeded
            let mut n = (substeps / 2).max(control.initial_substeps.max(1));
            let mut coarse = midpoint_sweep(ham, &psi, t0, t1, n)?;
            loop {
                let fine = midpoint_sweep(ham, &psi, t0, t1, 2 * n)?;
                let diff = (&fine - &coarse).norm();
                let h = (t1 - t0) / (2 * n) as f64;
                if diff < control.tol {
                    meta.steps += 2 * n;
                    meta.min_step = meta.min_step.min(h);
                    meta.max_diff = meta.max_diff.max(diff);
                    substeps = 2 * n;
                    states.push(fine);
                    break;
                }
                if h / 2.0 < control.h_min {
                    return Err(Error::StepFloor { t: t0, h_min: control.h_min, diff });
                }
                coarse = fine;
                n *= 2;
            }
        }
    }

    let leakage = match control.mode_dim {
        Some(d) => states.iter().map(|s| tail_leakage(s, d)).collect(),
        None => Vec::new(),
    };
    Ok(Trajectory { times: t_grid.to_vec(), states, leakage, meta })
}

/// Evenly spaced grid of `samples` points on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidGrid("end time must be positive"));
    }
    if samples < 2 {
        return Err(Error::InvalidGrid("need at least two samples"));
    }
    Ok((0..samples).map(|k| t_end * k as f64 / (samples - 1) as f64).collect())
}

/// Dressed-state populations `|<{lambda,n}|psi(t)>|^2` for every trusted
/// level, plus the weight outside the trusted dressed subspace.
#[derive(Debug, Clone, Serialize)]
pub struct DressedPopulations {
    pub times: Vec<f64>,
    /// `(lambda, n)` for each column of `values`.
    pub labels: Vec<(i8, usize)>,
    /// One row per time.
    pub values: Vec<Vec<f64>>,
    /// `|psi - P psi|^2` with `P` the projector onto the trusted levels.
    pub untracked: Vec<f64>,
    /// Worst `|sum p + untracked - 1|` over the series.
    pub completeness_defect: f64,
    /// Some state carried more than the leakage tolerance outside the trusted levels.
    pub flagged: bool,
}

impl DressedPopulations {
    /// Combined weight of both branches of level `n` at every time.
    pub fn level(&self, n: usize) -> Vec<f64> {
        self.values
            .iter()
            .map(|row| {
                self.labels
                    .iter()
                    .zip(row)
                    .filter(|((_, k), _)| *k == n)
                    .map(|(_, p)| p)
                    .sum()
            })
            .collect()
    }

    pub fn column(&self, lambda: i8, n: usize) -> Option<Vec<f64>> {
        let idx = self.labels.iter().position(|&l| l == (lambda, n))?;
        Some(self.values.iter().map(|row| row[idx]).collect())
    }
}

pub fn dressed_populations(traj: &Trajectory, frame: &DressedFrame) -> Result<DressedPopulations> {
    let dim = frame.dim();
    if let Some(s) = traj.states.first() {
        if s.len() != 2 * dim {
            return Err(Error::DimensionMismatch { expected: 2 * dim, got: s.len() });
        }
    }
    let labels: Vec<(i8, usize)> =
        [1i8, -1].into_iter().flat_map(|l| (0..=frame.n_max).map(move |n| (l, n))).collect();
    let basis: Vec<CVec> = labels.iter().map(|&(l, n)| frame.state_unchecked(l, n)).collect();

    let mut values = Vec::with_capacity(traj.states.len());
    let mut untracked = Vec::with_capacity(traj.states.len());
    let mut defect: f64 = 0.0;
    for psi in &traj.states {
        let amps: Vec<C64> = basis.iter().map(|b| b.dotc(psi)).collect();
        let mut rest = psi.clone();
        for (b, a) in basis.iter().zip(&amps) {
            rest -= b * *a;
        }
        let row: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
        let outside = rest.norm_squared();
        let total: f64 = row.iter().sum::<f64>() + outside;
        defect = defect.max((total - psi.norm_squared()).abs());
        values.push(row);
        untracked.push(outside);
    }
    let flagged = untracked.iter().any(|&u| u > LEAKAGE_TOL);
    Ok(DressedPopulations {
        times: traj.times.clone(),
        labels,
        values,
        untracked,
        completeness_defect: defect,
        flagged,
    })
}

/// Period of a sampled oscillation from the spacing of its upward crossings
/// of the midline `(max + min) / 2`. `None` with fewer than two crossings.
pub fn estimate_period(times: &[f64], values: &[f64]) -> Option<f64> {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mid = 0.5 * (lo + hi);
    let mut crossings = Vec::new();
    for k in 0..values.len().saturating_sub(1) {
        let (a, b) = (values[k] - mid, values[k + 1] - mid);
        if a < 0.0 && b >= 0.0 {
            let frac = a / (a - b);
            crossings.push(times[k] + frac * (times[k + 1] - times[k]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

/// Bessel functions `J_0(z) ..= J_{n_max}(z)` by downward recurrence,
/// normalized with `J_0 + 2 sum_k J_{2k} = 1`.
pub fn bessel_j_table(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let az = z.abs();
    let start = {
        let base = n_max.max(az.ceil() as usize);
        let m = base + 20 + (40.0 * base as f64).sqrt() as usize;
        m + m % 2
    };
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / az * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if k - 1 <= n_max {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            // rescale to stay in range
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if z < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(z)` for any integer order.
pub fn bessel_j(n: i64, z: f64) -> f64 {
    let k = n.unsigned_abs() as usize;
    let v = bessel_j_table(k, z)[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Symmetric partial sum `sum_{|n| <= n_terms} J_n(2 theta/omega) e^{i n omega t}`
/// of the expansion of `e^{2i Theta(t)}`, `Theta(t) = theta sin(omega t)/omega`.
pub fn jacobi_anger(theta: f64, omega: f64, n_terms: usize, t: f64) -> Result<C64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter { name: "omega", reason: format!("must be > 0, got {omega}") });
    }
    if n_terms == 0 {
        return Err(Error::InvalidParameter { name: "n_terms", reason: "must be >= 1".into() });
    }
    let j = bessel_j_table(n_terms, 2.0 * theta / omega);
    let mut sum = C64::from(j[0]);
    for (n, &jn) in j.iter().enumerate().skip(1) {
        let phase = n as f64 * omega * t;
        // J_{-n} = (-1)^n J_n
        let neg = if n % 2 == 0 { jn } else { -jn };
        sum += C64::from_polar(jn, phase) + C64::from_polar(neg, -phase);
    }
    Ok(sum)
}

/// The exact value `e^{2i theta sin(omega t)/omega}` the expansion approaches.
pub fn drive_phase(theta: f64, omega: f64, t: f64) -> C64 {
    (I * 2.0 * theta * (omega * t).sin() / omega).exp()
}

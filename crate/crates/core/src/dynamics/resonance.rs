//! Resonance conditions between two dressed levels `m < n`, the effective
//! coupling `gamma` left after the rotating-wave approximation, and a
//! bracketed solver that tunes one model parameter onto a resonance.
//!
//! With `lambda_{k,+-} = -g2 +- sqrt(E_{k,Delta}^2 + g2^2)` the four
//! conditions are `Omega (m - n) + lambda_{m,s} - lambda_{n,s'} = 0` for
//! `(s, s') = (+,+), (-,-), (+,-), (-,+)`.

use std::{fmt, str::FromStr};

use serde::Serialize;

use crate::algebra::build_ladder;
use crate::dressing::{omega_x, table_for, TransitionTable};
use crate::error::{Error, Result};
use crate::hamiltonians::ModelParams;

use super::roots::{find_root, RootOptions};
use super::twolevel::{gamma_matrix, lambda_pm, Mat2};

/// Residual tolerance for an accepted resonance.
pub const RESONANCE_TOL: f64 = 1e-10;
/// Default trust threshold for the rotating-wave approximation.
pub const RWA_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ResonanceCase {
    I,
    II,
    III,
    IV,
}

impl ResonanceCase {
    pub const ALL: [Self; 4] = [Self::I, Self::II, Self::III, Self::IV];

    /// Branch signs `(s, s')` for levels `m` and `n`; `true` is `+`.
    pub fn branches(self) -> (bool, bool) {
        match self {
            Self::I => (true, true),
            Self::II => (false, false),
            Self::III => (true, false),
            Self::IV => (false, true),
        }
    }

    /// Column of `Gamma` selected by a branch.
    fn column(plus: bool) -> usize {
        if plus {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for ResonanceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for ResonanceCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Self::I),
            "II" | "2" => Ok(Self::II),
            "III" | "3" => Ok(Self::III),
            "IV" | "4" => Ok(Self::IV),
            other => Err(Error::UnknownSelector(other.to_owned())),
        }
    }
}

/// The 2x2 block of one dressed level `k` under the constant field.
#[derive(Debug, Clone, Serialize)]
pub struct TwoLevelBlock {
    pub k: usize,
    pub e_delta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(serialize_with = "serialize_mat2")]
    pub gamma: Mat2,
}

fn serialize_mat2<S: serde::Serializer>(m: &Mat2, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize as _;
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]].serialize(s)
}

impl TwoLevelBlock {
    pub fn new(k: usize, e_delta: f64, g2: f64) -> Self {
        let (lambda_plus, lambda_minus) = lambda_pm(e_delta, g2);
        Self { k, e_delta, lambda_plus, lambda_minus, gamma: gamma_matrix(e_delta, g2) }
    }

    pub fn lambda(&self, plus: bool) -> f64 {
        if plus {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }

    /// Fast frequency `lambda_+ - lambda_- = 2 sqrt(E^2 + g2^2)` dropped by the RWA.
    pub fn splitting(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }
}

fn check_pair(m: usize, n: usize, n_max: usize) -> Result<()> {
    if m == n {
        return Err(Error::InvalidPair { m, n, reason: "levels must differ" });
    }
    for k in [m, n] {
        if k > n_max {
            return Err(Error::QuantumNumberOutOfRange { n: k, n_max });
        }
    }
    Ok(())
}

/// Left-hand side `Omega (m - n) + lambda_{m,s} - lambda_{n,s'}` of the
/// chosen resonance condition.
pub fn resonance_residual(
    case: ResonanceCase,
    m: usize,
    n: usize,
    big_omega: f64,
    table: &TransitionTable,
    g2: f64,
) -> Result<f64> {
    check_pair(m, n, table.n_max)?;
    let bm = TwoLevelBlock::new(m, table.e_delta(m)?, g2);
    let bn = TwoLevelBlock::new(n, table.e_delta(n)?, g2);
    let (sm, sn) = case.branches();
    Ok(big_omega * (m as f64 - n as f64) + bm.lambda(sm) - bn.lambda(sn))
}

/// Effective coupling `gamma = Gamma_m[:, s]^T [[0, T_mn], [T_nm, 0]] Gamma_n[:, s']`.
///
/// With the closed-form columns this is
/// `(E_n T_nm lambda_{m,s} + E_m T_mn lambda_{n,s'}) / (N_{m,s} N_{n,s'})`.
pub fn gamma_coupling(
    case: ResonanceCase,
    block_m: &TwoLevelBlock,
    block_n: &TwoLevelBlock,
    table: &TransitionTable,
) -> f64 {
    let (m, n) = (block_m.k, block_n.k);
    let (sm, sn) = case.branches();
    let cm = block_m.gamma.column(ResonanceCase::column(sm));
    let cn = block_n.gamma.column(ResonanceCase::column(sn));
    let coupling = Mat2::new(0.0, table.t(m, n), table.t_tilde(m, n), 0.0);
    cm.dot(&(coupling * cn))
}

/// Everything the analytic two-level propagator needs.
#[derive(Debug, Clone, Serialize)]
pub struct ResonanceSolution {
    pub case: ResonanceCase,
    pub m: usize,
    pub n: usize,
    pub params: ModelParams,
    pub big_omega: f64,
    pub x: f64,
    pub t_mn: f64,
    pub t_nm: f64,
    pub gamma: f64,
    /// `Delta * gamma`, the angular frequency of the population oscillation.
    pub rabi_frequency: f64,
    pub blocks: [TwoLevelBlock; 2],
    pub residual: f64,
    pub warnings: Vec<String>,
}

impl ResonanceSolution {
    /// Assemble the solution data at `params`, whether or not the resonance
    /// condition holds there.
    pub fn at(case: ResonanceCase, m: usize, n: usize, params: &ModelParams) -> Result<Self> {
        if m >= n {
            return Err(Error::InvalidPair { m, n, reason: "need m < n" });
        }
        if params.omega_e != 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega_e",
                reason: "analytic propagators exist only for a constant field".into(),
            });
        }
        params.validate()?;
        let (big_omega, x) = omega_x(params.kind, params.omega, params.g1)?;
        let alg = build_ladder(params.kind, params.dim)?;
        let table = table_for(&alg, x, params.delta, params.dim - 1)?;
        Self::from_table(case, m, n, params, big_omega, x, &table)
    }

    pub fn from_table(
        case: ResonanceCase,
        m: usize,
        n: usize,
        params: &ModelParams,
        big_omega: f64,
        x: f64,
        table: &TransitionTable,
    ) -> Result<Self> {
        let residual = resonance_residual(case, m, n, big_omega, table, params.g2)?;
        let bm = TwoLevelBlock::new(m, table.e_delta(m)?, params.g2);
        let bn = TwoLevelBlock::new(n, table.e_delta(n)?, params.g2);
        let gamma = gamma_coupling(case, &bm, &bn, table);
        Ok(Self {
            case,
            m,
            n,
            params: *params,
            big_omega,
            x,
            t_mn: table.t(m, n),
            t_nm: table.t(n, m),
            gamma,
            rabi_frequency: params.delta * gamma,
            blocks: [bm, bn],
            residual,
            warnings: Vec::new(),
        })
    }

    pub fn is_resonant(&self) -> bool {
        self.residual.abs() < RESONANCE_TOL
    }

    /// Period `2 pi / |Delta gamma|` of the population oscillation.
    pub fn rabi_period(&self) -> f64 {
        std::f64::consts::TAU / self.rabi_frequency.abs()
    }
}

/// `|Delta gamma| / min_k 2 sqrt(E_{k,Delta}^2 + g2^2)`; the rotating-wave
/// approximation is trusted when this is well below one.
pub fn rwa_validity(sol: &ResonanceSolution) -> f64 {
    let fastest = sol.blocks.iter().map(TwoLevelBlock::splitting).fold(f64::INFINITY, f64::min);
    if sol.rabi_frequency == 0.0 {
        return 0.0;
    }
    sol.rabi_frequency.abs() / fastest
}

/// The model parameter tuned by [`find_resonance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FreeParam {
    /// Vary `omega` with `g1` fixed.
    Omega,
    /// Vary `omega` keeping `g1 / omega` fixed (so `x` stays put).
    OmegaScaled,
    G2,
    Delta,
}

impl FreeParam {
    pub fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        let mut p = *base;
        match self {
            Self::Omega => p.omega = value,
            Self::OmegaScaled => {
                p.g1 = base.g1 / base.omega * value;
                p.omega = value;
            }
            Self::G2 => p.g2 = value,
            Self::Delta => p.delta = value,
        }
        p
    }
}

impl FromStr for FreeParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "omega" => Ok(Self::Omega),
            "omega_scaled" | "omega_ratio" => Ok(Self::OmegaScaled),
            "g2" => Ok(Self::G2),
            "delta" => Ok(Self::Delta),
            other => Err(Error::UnknownSelector(other.to_owned())),
        }
    }
}

/// Tune `free` within `bracket` until the resonance condition of `case` holds
/// to [`RESONANCE_TOL`], then assemble the full solution.
pub fn find_resonance(
    case: ResonanceCase,
    m: usize,
    n: usize,
    base: &ModelParams,
    free: FreeParam,
    bracket: (f64, f64),
) -> Result<ResonanceSolution> {
    if m >= n {
        return Err(Error::InvalidPair { m, n, reason: "need m < n" });
    }
    let alg = build_ladder(base.kind, base.dim)?;
    // the transition table only depends on x; reuse it while x is unchanged
    let mut cache: Option<(f64, TransitionTable)> = None;
    let mut residual_at = |value: f64| -> Result<f64> {
        let p = free.apply(base, value);
        p.validate()?;
        let (big_omega, x) = omega_x(p.kind, p.omega, p.g1)?;
        let stale = cache.as_ref().is_none_or(|(cx, _)| *cx != x);
        if stale {
            cache = Some((x, table_for(&alg, x, 2.0, p.dim - 1)?));
        }
        let table = &cache.as_ref().expect("filled above").1;
        // table built with Delta = 2 so e_delta = T_nn; rescale here
        let em = p.delta / 2.0 * table.e_delta(m)?;
        let en = p.delta / 2.0 * table.e_delta(n)?;
        check_pair(m, n, table.n_max)?;
        let (sm, sn) = case.branches();
        let bm = lambda_pm(em, p.g2);
        let bn = lambda_pm(en, p.g2);
        let pick = |l: (f64, f64), plus: bool| if plus { l.0 } else { l.1 };
        Ok(big_omega * (m as f64 - n as f64) + pick(bm, sm) - pick(bn, sn))
    };
    let root = find_root(&mut residual_at, bracket.0, bracket.1, RootOptions::default())?;
    let params = free.apply(base, root.x);
    let mut sol = ResonanceSolution::at(case, m, n, &params)?;
    if root.sign_changes > 1 {
        sol.warnings.push(format!(
            "residual changes sign {} times over [{}, {}]; returned the lowest root",
            root.sign_changes, bracket.0, bracket.1
        ));
    }
    if !sol.is_resonant() {
        return Err(Error::NoConvergence { residual: sol.residual.abs(), iterations: root.iterations });
    }
    let r = rwa_validity(&sol);
    if r >= RWA_THRESHOLD {
        sol.warnings.push(format!("rotating-wave ratio {r:.3e} is not below {RWA_THRESHOLD}"));
    }
    Ok(sol)
}

//! Two-layer penalty method.
//!
//! The sum constraints `d_br + d_ru = D` and `alpha_br + alpha_ru = 1` are
//! moved onto auxiliary copies, and the copy-equalities are penalized with
//! weight `1/(2 lambda)` (distances additionally weighted by `nu`). For a fixed
//! `lambda` the inner loop cycles placement -> bandwidth -> auxiliary until the
//! penalized objective stalls; the outer loop shrinks `lambda` by a constant
//! factor until the largest copy violation drops below `eps1`.
//!
//! The rate term of the penalized objective is the spectral efficiency
//! `eta / W` (bits/s/Hz), so `lambda` has the same meaning at every `W`.

use crate::error::ModelError;
use crate::subproblems::{
    local_point, solve_auxiliary, solve_bandwidth, solve_placement, Auxiliaries, BlockSettings,
    SubproblemStatus,
};
use crate::system_model::{
    bit_rate_ru, max_semantic_bandwidth, semantic_bit_rate, semantic_similarity,
    snr_br_db_unchecked, DesignPoint, SigmoidFit, SystemParams, ALPHA_FLOOR,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub lambda0: f64,
    /// Shrink factor applied to `lambda` after each outer step, in (0, 1).
    pub shrink: f64,
    pub nu: f64,
    pub eps1: f64,
    /// Relative change of the penalized objective that ends an inner loop.
    pub inner_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub alpha_floor: f64,
    pub lambda_floor: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            lambda0: 1000.0,
            shrink: 0.9,
            nu: 1e-4,
            eps1: 1e-8,
            inner_tol: 1e-6,
            max_inner: 100,
            max_outer: 500,
            alpha_floor: ALPHA_FLOOR,
            lambda_floor: 1e-12,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(ModelError::invalid(
                "c",
                format!("must lie in (0, 1), got {}", self.shrink),
            ));
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(ModelError::invalid("lambda0", "must be > 0"));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(ModelError::invalid("nu", "must be > 0"));
        }
        if !(self.eps1 > 0.0) {
            return Err(ModelError::invalid("eps1", "must be > 0"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(ModelError::invalid("inner_tol", "must be > 0"));
        }
        if self.max_inner < 1 {
            return Err(ModelError::invalid("max_inner", "must be >= 1"));
        }
        if self.max_outer < 1 {
            return Err(ModelError::invalid("max_outer", "must be >= 1"));
        }
        if !(self.alpha_floor > 0.0 && self.alpha_floor < 0.5) {
            return Err(ModelError::invalid("alpha_floor", "must lie in (0, 0.5)"));
        }
        if !(self.lambda_floor > 0.0 && self.lambda_floor <= self.lambda0) {
            return Err(ModelError::invalid(
                "lambda_floor",
                "must lie in (0, lambda0]",
            ));
        }
        Ok(())
    }
}

/// Copies, penalty coefficient and current violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyState {
    pub aux: Auxiliaries,
    pub lambda: f64,
    pub nu: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    IterationCap,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::IterationCap => "iteration-cap",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

/// Penalized objective after each inner cycle of one fixed-`lambda` phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub lambda: f64,
    pub objectives: Vec<f64>,
    /// Violation at the end of the phase.
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub best: DesignPoint,
    pub zeta: f64,
    pub inner_iters: usize,
    pub outer_iters: usize,
    pub objective_trace: Vec<PhaseTrace>,
    pub status: SolveStatus,
}

/// Largest copy violation; distance terms are divided by `D`.
pub fn violation(d: (f64, f64), alpha: (f64, f64), aux: &Auxiliaries, distance: f64) -> f64 {
    (alpha.0 - aux.alpha_br)
        .abs()
        .max((alpha.1 - aux.alpha_ru).abs())
        .max((d.0 - aux.d_br).abs() / distance)
        .max((d.1 - aux.d_ru).abs() / distance)
}

/// Primal variables of the penalized problem.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Iterate {
    d: (f64, f64),
    alpha: (f64, f64),
}

/// Exact `eta / W` of an iterate, ignoring the similarity floor.
fn spectral_rate(p: &SystemParams, fit: &SigmoidFit, it: &Iterate) -> f64 {
    let gamma = snr_br_db_unchecked(p, it.d.0, it.alpha.0);
    let sem = semantic_bit_rate(p, fit, it.alpha.0, semantic_similarity(fit, gamma));
    sem.min(bit_rate_ru(p, it.d.1, it.alpha.1)) / p.bandwidth
}

/// Penalized objective, `eta/W - (|alpha - alpha_hat|^2 + nu |d - d_hat|^2) / (2 lambda)`.
pub fn penalized_objective(
    p: &SystemParams,
    fit: &SigmoidFit,
    d: (f64, f64),
    alpha: (f64, f64),
    aux: &Auxiliaries,
    lambda: f64,
    nu: f64,
) -> f64 {
    let it = Iterate { d, alpha };
    let pen = (alpha.0 - aux.alpha_br).powi(2)
        + (alpha.1 - aux.alpha_ru).powi(2)
        + nu * (d.0 - aux.d_br).powi(2)
        + nu * (d.1 - aux.d_ru).powi(2);
    spectral_rate(p, fit, &it) - pen / (2.0 * lambda)
}

/// Whether any point of a `n x n` grid on the equality manifold meets the similarity floor.
pub fn coarse_feasible(p: &SystemParams, fit: &SigmoidFit, n: usize, alpha_floor: f64) -> bool {
    let Ok(threshold) = crate::system_model::min_snr_threshold_db(fit) else {
        return false;
    };
    (0..n).any(|i| {
        let d_br = p.distance * i as f64 / (n - 1) as f64;
        (0..n).any(|j| {
            let a = alpha_floor + (1.0 - 2.0 * alpha_floor) * j as f64 / (n - 1) as f64;
            snr_br_db_unchecked(p, d_br, a) >= threshold
        })
    })
}

/// Default start: relay midway, even split. When that split misses the
/// similarity floor the BS-relay share is cut to 90% of its largest admissible value.
pub fn default_init(p: &SystemParams, fit: &SigmoidFit) -> DesignPoint {
    let d_br = p.distance / 2.0;
    let alpha_br = match max_semantic_bandwidth(p, fit, d_br) {
        Ok(cap) => (0.9 * cap / p.bandwidth).min(0.5),
        Err(_) => 0.5,
    };
    DesignPoint::on_manifold(p, fit, d_br, alpha_br)
}

/// Moves an equality-feasible point onto the similarity floor if it sits below it.
fn repair_similarity(p: &SystemParams, fit: &SigmoidFit, d_br: f64, alpha_br: f64) -> (f64, f64) {
    let Ok(cap) = max_semantic_bandwidth(p, fit, d_br) else {
        return (d_br, alpha_br);
    };
    let limit = cap / p.bandwidth * (1.0 - 1e-12);
    let a = alpha_br.min(limit).max(0.0);
    (d_br, a)
}

fn finalize(p: &SystemParams, fit: &SigmoidFit, it: &Iterate) -> DesignPoint {
    let proj = solve_auxiliary(it.d, it.alpha, p.distance);
    let d_br = proj.d_br.clamp(0.0, p.distance);
    let alpha_br = proj.alpha_br.clamp(0.0, 1.0);
    let mut pt = DesignPoint::on_manifold(p, fit, d_br, alpha_br);
    if semantic_similarity(fit, pt.gamma_br_db) < fit.min_similarity {
        let (d, a) = repair_similarity(p, fit, d_br, alpha_br);
        pt = DesignPoint::on_manifold(p, fit, d, a);
    }
    pt
}

/// Runs the penalty method from `init` (or the default start).
pub fn run(
    p: &SystemParams,
    fit: &SigmoidFit,
    cfg: &PenaltyConfig,
    init: Option<DesignPoint>,
) -> Result<SolveReport, ModelError> {
    p.validate()?;
    fit.validate()?;
    cfg.validate()?;

    let start = init.unwrap_or_else(|| default_init(p, fit));
    let mut it = Iterate {
        d: (start.d_br, start.d_ru),
        alpha: (
            start.alpha_br.max(cfg.alpha_floor),
            start.alpha_ru.max(cfg.alpha_floor),
        ),
    };

    if !coarse_feasible(p, fit, 101, cfg.alpha_floor) {
        return Ok(SolveReport {
            best: start,
            zeta: f64::NAN,
            inner_iters: 0,
            outer_iters: 0,
            objective_trace: Vec::new(),
            status: SolveStatus::Infeasible,
        });
    }

    let settings = BlockSettings {
        alpha_floor: cfg.alpha_floor,
        ..BlockSettings::default()
    };
    let mut state = PenaltyState {
        aux: Auxiliaries {
            d_br: it.d.0,
            d_ru: it.d.1,
            alpha_br: it.alpha.0,
            alpha_ru: it.alpha.1,
        },
        lambda: cfg.lambda0,
        nu: cfg.nu,
        zeta: 0.0,
    };
    let mut trace = Vec::new();
    let mut inner_total = 0;
    let mut status = SolveStatus::IterationCap;
    let mut outer = 0;

    while outer < cfg.max_outer {
        outer += 1;
        let mut objectives = Vec::new();
        let mut prev: Option<f64> = None;
        for _ in 0..cfg.max_inner {
            inner_total += 1;
            cycle(p, fit, &mut it, &mut state, &settings);
            let value =
                penalized_objective(p, fit, it.d, it.alpha, &state.aux, state.lambda, state.nu);
            objectives.push(value);
            if let Some(prev) = prev {
                if (value - prev).abs() <= cfg.inner_tol * prev.abs() {
                    break;
                }
            }
            prev = Some(value);
        }
        state.zeta = violation(it.d, it.alpha, &state.aux, p.distance);
        trace.push(PhaseTrace {
            lambda: state.lambda,
            objectives,
            zeta: state.zeta,
        });
        if state.zeta <= cfg.eps1 {
            status = SolveStatus::Converged;
            break;
        }
        state.lambda = (state.lambda * cfg.shrink).max(cfg.lambda_floor);
    }

    Ok(SolveReport {
        best: finalize(p, fit, &it),
        zeta: state.zeta,
        inner_iters: inner_total,
        outer_iters: outer,
        objective_trace: trace,
        status,
    })
}

/// One placement -> bandwidth -> auxiliary pass.
fn cycle(
    p: &SystemParams,
    fit: &SigmoidFit,
    it: &mut Iterate,
    state: &mut PenaltyState,
    settings: &BlockSettings,
) {
    let before = penalized_objective(p, fit, it.d, it.alpha, &state.aux, state.lambda, state.nu);
    let lp = local_point(p, fit, it.d, it.alpha.0);
    let placed = solve_placement(
        p,
        fit,
        &lp,
        it.alpha,
        &state.aux,
        state.lambda,
        state.nu,
        settings,
    );
    if placed.status != SubproblemStatus::Infeasible {
        let cand = Iterate {
            d: (placed.block.d_br, placed.block.d_ru),
            ..*it
        };
        accept_if_not_worse(p, fit, it, cand, state, before);
    }

    let before = penalized_objective(p, fit, it.d, it.alpha, &state.aux, state.lambda, state.nu);
    let lp = local_point(p, fit, it.d, it.alpha.0);
    let banded = solve_bandwidth(p, fit, &lp, it.d, &state.aux, state.lambda, settings);
    if banded.status != SubproblemStatus::Infeasible {
        let cand = Iterate {
            alpha: (banded.block.alpha_br, banded.block.alpha_ru),
            ..*it
        };
        accept_if_not_worse(p, fit, it, cand, state, before);
    }

    state.aux = solve_auxiliary(it.d, it.alpha, p.distance);
}

/// Takes `cand` unless it breaks the similarity floor of a feasible incumbent
/// or lowers the penalized objective.
fn accept_if_not_worse(
    p: &SystemParams,
    fit: &SigmoidFit,
    it: &mut Iterate,
    cand: Iterate,
    state: &PenaltyState,
    before: f64,
) {
    let feasible = |x: &Iterate| {
        semantic_similarity(fit, snr_br_db_unchecked(p, x.d.0, x.alpha.0)) >= fit.min_similarity
    };
    let was_feasible = feasible(it);
    if was_feasible && !feasible(&cand) {
        return;
    }
    let after = penalized_objective(
        p,
        fit,
        cand.d,
        cand.alpha,
        &state.aux,
        state.lambda,
        state.nu,
    );
    if was_feasible && after < before {
        return;
    }
    *it = cand;
}

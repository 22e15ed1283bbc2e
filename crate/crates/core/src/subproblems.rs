//! Convex blocks of the inner coordinate-ascent loop.
//!
//! Rates inside these programs are spectral efficiencies (bits/s/Hz, i.e.
//! rate divided by `W`), which keeps the penalty weights meaningful across
//! bandwidths. Reported `eta` values are converted back to bits/s.
//!
//! * placement: relay distances with the bandwidth split frozen;
//! * bandwidth: bandwidth split with the distances frozen;
//! * auxiliary: closed-form projection of the copies onto the sum constraints.

use crate::barrier::{self, BarrierSettings, BarrierStatus, ConvexProgram, Local, Vector};
use crate::sca_bounds::{
    LocalPoint, LogDistanceBound, LogisticBound, RelayRateBound, SnrBandwidthBound,
};
use crate::system_model::{
    linear_to_db, min_snr_threshold_db, semantic_similarity, snr_br_db_unchecked, SigmoidFit,
    SystemParams,
};
use std::f64::consts::{LN_2, LOG2_E};

/// Duality-gap target of every block solve.
pub const TOL_SUB: f64 = 1e-9;

/// Copies of the coupled variables that carry the sum constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Auxiliaries {
    pub d_br: f64,
    pub d_ru: f64,
    pub alpha_br: f64,
    pub alpha_ru: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubproblemStatus {
    Optimal,
    MaxIter,
    /// No strictly feasible point exists; the block keeps its incumbent.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemSolution<B> {
    pub block: B,
    /// Surrogate objective, `eta / W` minus the block's penalty.
    pub objective: f64,
    pub status: SubproblemStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementBlock {
    pub d_br: f64,
    pub d_ru: f64,
    pub gamma_br_db: f64,
    /// bits/s allowed by the surrogate constraints.
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthBlock {
    pub alpha_br: f64,
    pub alpha_ru: f64,
    pub gamma_br_db: f64,
    pub similarity: f64,
    /// bits/s allowed by the surrogate constraints.
    pub eta: f64,
}

/// Settings shared by the two barrier-solved blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSettings {
    pub alpha_floor: f64,
    pub barrier: BarrierSettings,
}

impl Default for BlockSettings {
    fn default() -> Self {
        BlockSettings {
            alpha_floor: crate::system_model::ALPHA_FLOOR,
            barrier: BarrierSettings {
                tol: TOL_SUB,
                ..BarrierSettings::default()
            },
        }
    }
}

fn start_margin(value: f64) -> f64 {
    1e-2 * (1.0 + value.abs())
}

// ---------------------------------------------------------------------------
// placement
// ---------------------------------------------------------------------------

/// Variables `[d_br, d_ru, gamma, eta/W]`.
struct PlacementProgram {
    p: SystemParams,
    alpha_ru: f64,
    relay: RelayRateBound,
    logistic: LogisticBound,
    log_dist: LogDistanceBound,
    /// `alpha_br mu / K`.
    semantic_scale: f64,
    a1: f64,
    a2: f64,
    /// `10 log10(P_b rho0 / (alpha_br W N0))`.
    snr_base_db: f64,
    five_beta: f64,
    gamma_min: f64,
    hat: (f64, f64),
    /// `nu / lambda`.
    weight: f64,
}

impl PlacementProgram {
    fn gamma_cap(&self, d_br: f64) -> f64 {
        self.snr_base_db - self.five_beta * self.log_dist.derivs(d_br).0
    }

    fn relay_eff(&self, d_ru: f64) -> f64 {
        self.alpha_ru * self.relay.efficiency_derivs(&self.p, d_ru).0
    }

    fn semantic_eff(&self, gamma: f64) -> f64 {
        self.semantic_scale * (self.a1 + self.a2 * self.logistic.derivs(gamma).0)
    }

    fn penalty(&self, d_br: f64, d_ru: f64) -> f64 {
        0.5 * self.weight * ((d_br - self.hat.0).powi(2) + (d_ru - self.hat.1).powi(2))
    }
}

impl ConvexProgram<4> for PlacementProgram {
    fn objective(&self, x: &Vector<4>) -> Local<4> {
        let mut f = Local::zero();
        f.value = -x[3] + self.penalty(x[0], x[1]);
        f.grad[0] = self.weight * (x[0] - self.hat.0);
        f.grad[1] = self.weight * (x[1] - self.hat.1);
        f.grad[3] = -1.0;
        f.hess[(0, 0)] = self.weight;
        f.hess[(1, 1)] = self.weight;
        f
    }

    fn num_constraints(&self) -> usize {
        6
    }

    fn constraint(&self, i: usize, x: &Vector<4>) -> Local<4> {
        let mut g = Local::zero();
        match i {
            0 => {
                let (v, d1, d2) = self.relay.efficiency_derivs(&self.p, x[1]);
                g.value = x[3] - self.alpha_ru * v;
                g.grad[1] = -self.alpha_ru * d1;
                g.grad[3] = 1.0;
                g.hess[(1, 1)] = -self.alpha_ru * d2;
            }
            1 => {
                let (v, d1, d2) = self.logistic.derivs(x[2]);
                let k = self.semantic_scale;
                g.value = x[3] - k * (self.a1 + self.a2 * v);
                g.grad[2] = -k * self.a2 * d1;
                g.grad[3] = 1.0;
                g.hess[(2, 2)] = -k * self.a2 * d2;
            }
            2 => {
                let (v, d1, d2) = self.log_dist.derivs(x[0]);
                g.value = x[2] - (self.snr_base_db - self.five_beta * v);
                g.grad[0] = self.five_beta * d1;
                g.grad[2] = 1.0;
                g.hess[(0, 0)] = self.five_beta * d2;
            }
            3 => {
                g.value = self.gamma_min - x[2];
                g.grad[2] = -1.0;
            }
            4 => {
                g.value = -x[0];
                g.grad[0] = -1.0;
            }
            _ => {
                g.value = -x[1];
                g.grad[1] = -1.0;
            }
        }
        g
    }
}

/// Placement block: maximizes `eta/W - nu/(2 lambda) |d - d_hat|^2` over the
/// distances with the bandwidth split fixed, using the surrogates expanded at `lp`.
#[allow(clippy::too_many_arguments)]
pub fn solve_placement(
    p: &SystemParams,
    fit: &SigmoidFit,
    lp: &LocalPoint,
    alpha: (f64, f64),
    aux: &Auxiliaries,
    lambda: f64,
    nu: f64,
    settings: &BlockSettings,
) -> SubproblemSolution<PlacementBlock> {
    let (alpha_br, alpha_ru) = alpha;
    let gamma_min = min_snr_threshold_db(fit).expect("validated sigmoid fit");
    let prog = PlacementProgram {
        p: *p,
        alpha_ru,
        relay: RelayRateBound::new(p, lp.d_ru, alpha_ru),
        logistic: LogisticBound::new(fit, lp.gamma_br_db),
        log_dist: LogDistanceBound::new(p.altitude, lp.d_br),
        semantic_scale: alpha_br * p.bits_per_word / fit.symbols_per_word,
        a1: fit.a1,
        a2: fit.a2,
        snr_base_db: linear_to_db(p.snr_scale(p.bs_power) / alpha_br),
        five_beta: 5.0 * p.path_loss_exp,
        gamma_min,
        hat: (aux.d_br, aux.d_ru),
        weight: nu / lambda,
    };

    let incumbent = PlacementBlock {
        d_br: lp.d_br,
        d_ru: lp.d_ru,
        gamma_br_db: lp.gamma_br_db,
        eta: 0.0,
    };
    let infeasible = SubproblemSolution {
        block: incumbent,
        objective: f64::NEG_INFINITY,
        status: SubproblemStatus::Infeasible,
    };

    // gamma_cap(d) > gamma_min  <=>  d^2 < reach
    let ld = &prog.log_dist;
    let reach = lp.d_br * lp.d_br
        + (prog.snr_base_db - gamma_min - prog.five_beta * ld.e5) / (prog.five_beta * ld.e6);
    if !(reach > 0.0) {
        return infeasible;
    }
    let d_lim = reach.sqrt();
    let margin = 1e-3 * p.distance;
    let lo = margin.min(0.5 * d_lim);
    let d_br0 = lp.d_br.clamp(lo, lo.max(d_lim - lo));
    let d_ru0 = lp.d_ru.max(margin);
    let cap = prog.gamma_cap(d_br0);
    if !(cap > gamma_min) {
        return infeasible;
    }
    let gamma0 = cap - 0.5 * (cap - gamma_min).min(1.0);
    let eta_room = prog.relay_eff(d_ru0).min(prog.semantic_eff(gamma0));
    let eta0 = eta_room - start_margin(eta_room);
    let x0 = Vector::<4>::new(d_br0, d_ru0, gamma0, eta0);

    match barrier::minimize(&prog, x0, &settings.barrier) {
        Ok(out) => SubproblemSolution {
            block: PlacementBlock {
                d_br: out.x[0],
                d_ru: out.x[1],
                gamma_br_db: out.x[2],
                eta: out.x[3] * p.bandwidth,
            },
            objective: -out.objective,
            status: match out.status {
                BarrierStatus::Optimal => SubproblemStatus::Optimal,
                BarrierStatus::MaxIter => SubproblemStatus::MaxIter,
            },
        },
        Err(_) => infeasible,
    }
}

// ---------------------------------------------------------------------------
// bandwidth
// ---------------------------------------------------------------------------

/// Variables `[alpha_br, alpha_ru, gamma, S, eta/W]`.
struct BandwidthProgram {
    /// Relay-hop SNR at unit bandwidth fraction, for the fixed `d_ru`.
    relay_snr: f64,
    logistic: LogisticBound,
    snr: SnrBandwidthBound,
    /// `alpha_br_t + S_t`.
    s_t: f64,
    /// `mu / (4K)`.
    product_scale: f64,
    a1: f64,
    a2: f64,
    gamma_min: f64,
    alpha_floor: f64,
    hat: (f64, f64),
    /// `1 / lambda`.
    weight: f64,
}

impl BandwidthProgram {
    /// `a log2(1 + c/a)` with derivatives.
    fn relay_eff(&self, a: f64) -> (f64, f64, f64) {
        let c = self.relay_snr;
        let v = a * (c / a).ln_1p() * LOG2_E;
        let d1 = ((c / a).ln_1p() - c / (a + c)) * LOG2_E;
        let d2 = -c * c / (LN_2 * a * (a + c) * (a + c));
        (v, d1, d2)
    }

    fn product_eff(&self, alpha: f64, s: f64) -> f64 {
        let lb = -self.s_t * self.s_t + 2.0 * self.s_t * (alpha + s);
        self.product_scale * (lb - (alpha - s).powi(2))
    }

    fn similarity_cap(&self, gamma: f64) -> f64 {
        self.a1 + self.a2 * self.logistic.derivs(gamma).0
    }
}

impl ConvexProgram<5> for BandwidthProgram {
    fn objective(&self, x: &Vector<5>) -> Local<5> {
        let mut f = Local::zero();
        f.value =
            -x[4] + 0.5 * self.weight * ((x[0] - self.hat.0).powi(2) + (x[1] - self.hat.1).powi(2));
        f.grad[0] = self.weight * (x[0] - self.hat.0);
        f.grad[1] = self.weight * (x[1] - self.hat.1);
        f.grad[4] = -1.0;
        f.hess[(0, 0)] = self.weight;
        f.hess[(1, 1)] = self.weight;
        f
    }

    fn num_constraints(&self) -> usize {
        7
    }

    fn constraint(&self, i: usize, x: &Vector<5>) -> Local<5> {
        let mut g = Local::zero();
        match i {
            0 => {
                if !(x[1] > 0.0) {
                    g.value = f64::INFINITY;
                    return g;
                }
                let (v, d1, d2) = self.relay_eff(x[1]);
                g.value = x[4] - v;
                g.grad[1] = -d1;
                g.grad[4] = 1.0;
                g.hess[(1, 1)] = -d2;
            }
            1 => {
                let k = self.product_scale;
                let diff = x[0] - x[3];
                g.value = x[4] - self.product_eff(x[0], x[3]);
                g.grad[0] = -k * (2.0 * self.s_t - 2.0 * diff);
                g.grad[3] = -k * (2.0 * self.s_t + 2.0 * diff);
                g.grad[4] = 1.0;
                g.hess[(0, 0)] = 2.0 * k;
                g.hess[(3, 3)] = 2.0 * k;
                g.hess[(0, 3)] = -2.0 * k;
                g.hess[(3, 0)] = -2.0 * k;
            }
            2 => {
                let (v, d1, d2) = self.logistic.derivs(x[2]);
                g.value = x[3] - (self.a1 + self.a2 * v);
                g.grad[2] = -self.a2 * d1;
                g.grad[3] = 1.0;
                g.hess[(2, 2)] = -self.a2 * d2;
            }
            3 => {
                g.value = x[2] - self.snr.value(x[0]);
                g.grad[0] = -self.snr.slope();
                g.grad[2] = 1.0;
            }
            4 => {
                g.value = self.gamma_min - x[2];
                g.grad[2] = -1.0;
            }
            5 => {
                g.value = self.alpha_floor - x[0];
                g.grad[0] = -1.0;
            }
            _ => {
                g.value = self.alpha_floor - x[1];
                g.grad[1] = -1.0;
            }
        }
        g
    }
}

/// Bandwidth block: maximizes `eta/W - 1/(2 lambda) |alpha - alpha_hat|^2`
/// over the split with the distances fixed, using surrogates expanded at `lp`.
pub fn solve_bandwidth(
    p: &SystemParams,
    fit: &SigmoidFit,
    lp: &LocalPoint,
    d: (f64, f64),
    aux: &Auxiliaries,
    lambda: f64,
    settings: &BlockSettings,
) -> SubproblemSolution<BandwidthBlock> {
    let (d_br, d_ru) = d;
    let floor = settings.alpha_floor;
    let gamma_min = min_snr_threshold_db(fit).expect("validated sigmoid fit");
    let alpha_t = lp.alpha_br.max(floor);
    let prog = BandwidthProgram {
        relay_snr: p.snr_scale(p.relay_power) / p.path_loss(d_ru),
        logistic: LogisticBound::new(fit, lp.gamma_br_db),
        snr: SnrBandwidthBound::new(p, alpha_t, d_br),
        s_t: alpha_t + lp.similarity,
        product_scale: p.bits_per_word / (4.0 * fit.symbols_per_word),
        a1: fit.a1,
        a2: fit.a2,
        gamma_min,
        alpha_floor: floor,
        hat: (aux.alpha_br, aux.alpha_ru),
        weight: 1.0 / lambda,
    };

    let infeasible = SubproblemSolution {
        block: BandwidthBlock {
            alpha_br: lp.alpha_br,
            alpha_ru: aux.alpha_ru,
            gamma_br_db: lp.gamma_br_db,
            similarity: lp.similarity,
            eta: 0.0,
        },
        objective: f64::NEG_INFINITY,
        status: SubproblemStatus::Infeasible,
    };

    // surrogate SNR > gamma_min  <=>  alpha_br < a_lim
    let a_lim = alpha_t + (prog.snr.base_db - prog.snr.e9 - gamma_min) / prog.snr.e10;
    if !(a_lim > floor) {
        return infeasible;
    }
    let lo = floor.min(0.5 * (a_lim - floor));
    let alpha_br0 = lp.alpha_br.clamp(floor + lo, (floor + lo).max(a_lim - lo));
    let alpha_ru0 = aux.alpha_ru.max(2.0 * floor);
    let cap = prog.snr.value(alpha_br0);
    if !(cap > gamma_min) {
        return infeasible;
    }
    let gamma0 = cap - 0.5 * (cap - gamma_min).min(1.0);
    let s0 = prog.similarity_cap(gamma0) - 1e-3;
    let eta_room = prog
        .relay_eff(alpha_ru0)
        .0
        .min(prog.product_eff(alpha_br0, s0));
    let eta0 = eta_room - start_margin(eta_room);
    let x0 = Vector::<5>::from([alpha_br0, alpha_ru0, gamma0, s0, eta0]);

    match barrier::minimize(&prog, x0, &settings.barrier) {
        Ok(out) => SubproblemSolution {
            block: BandwidthBlock {
                alpha_br: out.x[0],
                alpha_ru: out.x[1],
                gamma_br_db: out.x[2],
                similarity: out.x[3],
                eta: out.x[4] * p.bandwidth,
            },
            objective: -out.objective,
            status: match out.status {
                BarrierStatus::Optimal => SubproblemStatus::Optimal,
                BarrierStatus::MaxIter => SubproblemStatus::MaxIter,
            },
        },
        Err(_) => infeasible,
    }
}

// ---------------------------------------------------------------------------
// auxiliary
// ---------------------------------------------------------------------------

/// Euclidean projection of `(d, alpha)` onto `d_br + d_ru = D`, `alpha_br + alpha_ru = 1`.
///
/// The two pairs decouple and carry equal weights within a pair, so the
/// shortfall is split evenly and the result does not depend on `lambda` or `nu`.
pub fn solve_auxiliary(d: (f64, f64), alpha: (f64, f64), distance: f64) -> Auxiliaries {
    let a_shift = 0.5 * (1.0 - alpha.0 - alpha.1);
    let d_shift = 0.5 * (distance - d.0 - d.1);
    Auxiliaries {
        d_br: d.0 + d_shift,
        d_ru: d.1 + d_shift,
        alpha_br: alpha.0 + a_shift,
        alpha_ru: alpha.1 + a_shift,
    }
}

/// Local point for the next surrogate step, with `gamma` and `S` made exact.
pub fn local_point(p: &SystemParams, fit: &SigmoidFit, d: (f64, f64), alpha_br: f64) -> LocalPoint {
    let gamma = snr_br_db_unchecked(p, d.0, alpha_br);
    LocalPoint {
        d_br: d.0,
        d_ru: d.1,
        alpha_br,
        gamma_br_db: gamma,
        similarity: semantic_similarity(fit, gamma),
    }
}

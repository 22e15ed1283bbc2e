//! Exhaustive grid searches: the SemRelay oracle and the comparison schemes
//! (equal bandwidth, fixed mid-link placement, conventional DF relay).
//!
//! All searches work on the equality manifold `d_ru = D - d_br`,
//! `alpha_ru = 1 - alpha_br`. Rows of the grid are evaluated in parallel and
//! reduced in index order, so the result never depends on thread scheduling.
//! Ties go to the smaller `d_br`, then the smaller `alpha_br`.

use rayon::prelude::*;

use crate::error::ModelError;
use crate::system_model::{
    bit_rate_ru, max_semantic_bandwidth, shannon_rate, DesignPoint, SigmoidFit, SystemParams,
    ALPHA_FLOOR,
};

/// Grid resolution over `d_br in [0, D]` and `alpha_br in [floor, 1 - floor]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_d: usize,
    pub n_alpha: usize,
    pub alpha_floor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(1001)
    }
}

impl GridSpec {
    pub fn square(n: usize) -> Self {
        GridSpec {
            n_d: n,
            n_alpha: n,
            alpha_floor: ALPHA_FLOOR,
        }
    }

    /// Resolution used by the one-dimensional baselines.
    pub fn line(n: usize) -> Self {
        GridSpec::square(n)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_d < 2 {
            return Err(ModelError::invalid("n_d", "need at least 2 grid points"));
        }
        if self.n_alpha < 2 {
            return Err(ModelError::invalid(
                "n_alpha",
                "need at least 2 grid points",
            ));
        }
        if !(self.alpha_floor >= 0.0 && self.alpha_floor < 0.5) {
            return Err(ModelError::invalid("alpha_floor", "must lie in [0, 0.5)"));
        }
        Ok(())
    }

    pub fn d_at(&self, distance: f64, i: usize) -> f64 {
        distance * i as f64 / (self.n_d - 1) as f64
    }

    pub fn alpha_at(&self, j: usize) -> f64 {
        let f = self.alpha_floor;
        f + (1.0 - 2.0 * f) * j as f64 / (self.n_alpha - 1) as f64
    }

    /// Nested refinement: every old node stays on the new grid.
    pub fn refined(&self) -> Self {
        GridSpec {
            n_d: 2 * self.n_d - 1,
            n_alpha: 2 * self.n_alpha - 1,
            ..*self
        }
    }
}

/// Keeps the first strictly larger candidate, which realizes the tie rule
/// when candidates arrive in (d_br, alpha_br) lexicographic order.
fn better(best: Option<DesignPoint>, cand: Option<DesignPoint>) -> Option<DesignPoint> {
    match (best, cand) {
        (Some(b), Some(c)) if c.eta > b.eta => Some(c),
        (None, c) => c,
        (b, _) => b,
    }
}

fn semrelay_point(
    p: &SystemParams,
    fit: &SigmoidFit,
    d_br: f64,
    alpha_br: f64,
) -> Option<DesignPoint> {
    let pt = DesignPoint::on_manifold(p, fit, d_br, alpha_br);
    crate::system_model::effective_rate(p, fit, &pt)
        .is_feasible()
        .then_some(pt)
}

fn grid_argmax<F>(n_rows: usize, n_cols: usize, eval: F) -> Option<DesignPoint>
where
    F: Fn(usize, usize) -> Option<DesignPoint> + Sync,
{
    let rows: Vec<Option<DesignPoint>> = (0..n_rows)
        .into_par_iter()
        .map(|i| (0..n_cols).fold(None, |best, j| better(best, eval(i, j))))
        .collect();
    rows.into_iter().fold(None, better)
}

/// Best feasible SemRelay point on the grid; `None` when no node meets the similarity floor.
pub fn oracle_search(p: &SystemParams, fit: &SigmoidFit, g: &GridSpec) -> Option<DesignPoint> {
    grid_argmax(g.n_d, g.n_alpha, |i, j| {
        semrelay_point(p, fit, g.d_at(p.distance, i), g.alpha_at(j))
    })
}

/// Two-hop DF rate: both hops use bit transmission, no similarity constraint.
pub fn df_relay_rate(p: &SystemParams, d_br: f64, alpha_br: f64) -> f64 {
    let first = shannon_rate(p, p.bs_power, d_br, alpha_br);
    let second = bit_rate_ru(p, p.distance - d_br, 1.0 - alpha_br);
    first.min(second)
}

fn df_point(p: &SystemParams, d_br: f64, alpha_br: f64) -> DesignPoint {
    DesignPoint {
        d_br,
        d_ru: p.distance - d_br,
        alpha_br,
        alpha_ru: 1.0 - alpha_br,
        gamma_br_db: crate::system_model::snr_br_db_unchecked(p, d_br, alpha_br),
        eta: df_relay_rate(p, d_br, alpha_br),
    }
}

pub fn df_search(p: &SystemParams, g: &GridSpec) -> DesignPoint {
    grid_argmax(g.n_d, g.n_alpha, |i, j| {
        Some(df_point(p, g.d_at(p.distance, i), g.alpha_at(j)))
    })
    .expect("grid has at least one node")
}

/// Placement search with `alpha_br = alpha_ru = 1/2`; uses `g.n_d` nodes.
pub fn equal_bandwidth_search(
    p: &SystemParams,
    fit: &SigmoidFit,
    g: &GridSpec,
) -> Option<DesignPoint> {
    grid_argmax(g.n_d, 1, |i, _| {
        semrelay_point(p, fit, g.d_at(p.distance, i), 0.5)
    })
}

/// Result of the bandwidth-only search at the mid-link placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPlacement {
    pub best: Option<DesignPoint>,
    /// Largest admissible `alpha_br` at `d_br = D/2`.
    pub alpha_cap: f64,
    /// Whether the best point sits on the cap (within one grid step).
    pub cap_binding: bool,
}

/// Bandwidth search with `d_br = d_ru = D/2`; uses `g.n_alpha` nodes.
pub fn fixed_placement_search(p: &SystemParams, fit: &SigmoidFit, g: &GridSpec) -> FixedPlacement {
    let d_br = p.distance / 2.0;
    let best = grid_argmax(1, g.n_alpha, |_, j| {
        semrelay_point(p, fit, d_br, g.alpha_at(j))
    });
    let alpha_cap = max_semantic_bandwidth(p, fit, d_br)
        .map(|cap| cap / p.bandwidth)
        .unwrap_or(f64::NAN);
    let step = (1.0 - 2.0 * g.alpha_floor) / (g.n_alpha - 1) as f64;
    let cap_binding = best.is_some_and(|b| alpha_cap - b.alpha_br <= step);
    FixedPlacement {
        best,
        alpha_cap,
        cap_binding,
    }
}

//! Physical-layer model of the two-hop link.
//!
//! The BS sends semantic symbols to an elevated relay, which decodes them and
//! forwards plain bits to the user over an orthogonal band. Both hops are
//! line-of-sight with power-law path loss `rho0 / (d^2 + H^2)^(beta/2)`.
//!
//! Everything here is a pure function of its inputs. Powers, gains and noise
//! are converted to linear units once, at the accessor boundary; dB only
//! appears in the SNR that feeds the similarity sigmoid.

use crate::error::ModelError;

/// Smallest bandwidth fraction the solvers ever hand to a logarithm.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Tolerance on the two equality constraints (sum of distances, sum of fractions).
pub const TOL_EQ: f64 = 1e-8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Converts a dBm-per-hertz density into watts per hertz.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

/// Link-level constants shared by both hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Horizontal BS-to-user distance `D` in meters.
    pub distance: f64,
    /// Relay altitude `H` in meters.
    pub altitude: f64,
    /// Channel power gain at 1 m, in dB.
    pub rho0_db: f64,
    /// Path-loss exponent `beta`.
    pub path_loss_exp: f64,
    /// BS transmit power in watts.
    pub bs_power: f64,
    /// Relay transmit power in watts.
    pub relay_power: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_dbm_hz: f64,
    /// Total system bandwidth `W` in hertz.
    pub bandwidth: f64,
    /// Bits per word `mu`.
    pub bits_per_word: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            distance: 100.0,
            altitude: 10.0,
            rho0_db: -60.0,
            path_loss_exp: 3.0,
            bs_power: 0.1,
            relay_power: 0.1,
            noise_dbm_hz: -169.0,
            bandwidth: 1e6,
            bits_per_word: 40.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("D", self.distance),
            ("P_b", self.bs_power),
            ("P_r", self.relay_power),
            ("W", self.bandwidth),
            ("mu", self.bits_per_word),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::invalid(key, format!("must be > 0, got {v}")));
            }
        }
        if !(self.altitude.is_finite() && self.altitude >= 0.0) {
            return Err(ModelError::invalid(
                "H",
                format!("must be >= 0, got {}", self.altitude),
            ));
        }
        if !(self.path_loss_exp.is_finite() && self.path_loss_exp >= 2.0) {
            return Err(ModelError::invalid(
                "beta",
                format!("must be >= 2, got {}", self.path_loss_exp),
            ));
        }
        if !self.rho0_db.is_finite() {
            return Err(ModelError::invalid("rho0_db", "must be finite"));
        }
        if !self.noise_dbm_hz.is_finite() {
            return Err(ModelError::invalid("N0_dbm_hz", "must be finite"));
        }
        Ok(())
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Self {
        self.bandwidth = bandwidth;
        self
    }

    pub fn rho0(&self) -> f64 {
        db_to_linear(self.rho0_db)
    }

    /// Noise density in W/Hz.
    pub fn noise_psd(&self) -> f64 {
        dbm_to_watts(self.noise_dbm_hz)
    }

    /// Path-loss denominator `(d^2 + H^2)^(beta/2)`.
    pub fn path_loss(&self, d: f64) -> f64 {
        (d * d + self.altitude * self.altitude).powf(self.path_loss_exp / 2.0)
    }

    /// Linear SNR at unit path loss over the full band `W`.
    ///
    /// The SNR of a hop is `snr_scale(P) / (path_loss(d) * alpha)`.
    pub fn snr_scale(&self, power: f64) -> f64 {
        power * self.rho0() / (self.bandwidth * self.noise_psd())
    }
}

/// Logistic fit of DeepSC sentence similarity against received SNR (dB).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidFit {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    /// Average semantic symbols per word `K`.
    pub symbols_per_word: f64,
    /// Minimum admissible similarity.
    pub min_similarity: f64,
}

impl Default for SigmoidFit {
    fn default() -> Self {
        SigmoidFit {
            a1: 0.3980,
            a2: 0.5385,
            c1: 0.2815,
            c2: -1.3135,
            symbols_per_word: 4.0,
            min_similarity: 0.9,
        }
    }
}

impl SigmoidFit {
    pub fn validate(&self) -> Result<(), ModelError> {
        let (a1, a2) = (self.a1, self.a2);
        if !(a1.is_finite() && a1 > 0.0) {
            return Err(ModelError::invalid("a1", format!("must be > 0, got {a1}")));
        }
        if !(a2.is_finite() && a2 > 0.0 && a1 + a2 <= 1.0) {
            return Err(ModelError::invalid(
                "a2",
                format!("need 0 < a2 and a1 + a2 <= 1, got a2 = {a2}"),
            ));
        }
        if !(self.c1.is_finite() && self.c1 > 0.0) {
            return Err(ModelError::invalid(
                "c1",
                format!("must be > 0, got {}", self.c1),
            ));
        }
        if !self.c2.is_finite() {
            return Err(ModelError::invalid("c2", "must be finite"));
        }
        if !(self.symbols_per_word.is_finite() && self.symbols_per_word > 0.0) {
            return Err(ModelError::invalid(
                "K",
                format!("must be > 0, got {}", self.symbols_per_word),
            ));
        }
        let e = self.min_similarity;
        if !(e > a1 && e < a1 + a2) {
            return Err(ModelError::invalid(
                "eps_bar",
                format!("must lie strictly inside ({a1}, {}), got {e}", a1 + a2),
            ));
        }
        Ok(())
    }

    /// Saturation value `a1 + a2` of the similarity curve.
    pub fn max_similarity(&self) -> f64 {
        self.a1 + self.a2
    }

    /// Logistic part `1 / (1 + exp(-(c1 * gamma + c2)))`.
    pub fn logistic(&self, gamma_db: f64) -> f64 {
        1.0 / (1.0 + (-(self.c1 * gamma_db + self.c2)).exp())
    }
}

/// A candidate operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub d_br: f64,
    pub d_ru: f64,
    pub alpha_br: f64,
    pub alpha_ru: f64,
    /// BS-to-relay SNR in dB.
    pub gamma_br_db: f64,
    /// Effective end-to-end bit rate in bits/s.
    pub eta: f64,
}

impl DesignPoint {
    /// Builds a point on the equality manifold and evaluates its SNR and rate.
    ///
    /// An infeasible point keeps `eta = 0`; callers that care check
    /// [`effective_rate`] directly.
    pub fn on_manifold(p: &SystemParams, fit: &SigmoidFit, d_br: f64, alpha_br: f64) -> Self {
        Self::evaluate(p, fit, d_br, p.distance - d_br, alpha_br, 1.0 - alpha_br)
    }

    pub fn evaluate(
        p: &SystemParams,
        fit: &SigmoidFit,
        d_br: f64,
        d_ru: f64,
        alpha_br: f64,
        alpha_ru: f64,
    ) -> Self {
        let mut pt = DesignPoint {
            d_br,
            d_ru,
            alpha_br,
            alpha_ru,
            gamma_br_db: snr_br_db_unchecked(p, d_br, alpha_br),
            eta: 0.0,
        };
        pt.eta = effective_rate(p, fit, &pt).value().unwrap_or(0.0);
        pt
    }

    /// Checks nonnegativity and the two sum constraints within `tol`.
    pub fn satisfies_equalities(&self, distance: f64, tol: f64) -> bool {
        self.d_br >= 0.0
            && self.d_ru >= 0.0
            && self.alpha_br >= 0.0
            && self.alpha_ru >= 0.0
            && (self.d_br + self.d_ru - distance).abs() <= tol * distance
            && (self.alpha_br + self.alpha_ru - 1.0).abs() <= tol
    }
}

/// Outcome of evaluating the end-to-end rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkRate {
    Feasible(f64),
    /// The semantic hop cannot meet the minimum similarity.
    BelowSimilarity {
        similarity: f64,
    },
}

impl LinkRate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            LinkRate::Feasible(r) => Some(r),
            LinkRate::BelowSimilarity { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, LinkRate::Feasible(_))
    }
}

/// BS-to-relay SNR in dB.
pub fn snr_br_db(p: &SystemParams, d_br: f64, alpha_br: f64) -> Result<f64, ModelError> {
    if !(alpha_br > 0.0) {
        return Err(ModelError::domain(
            "snr_br_db",
            format!("bandwidth fraction must be > 0, got {alpha_br}"),
        ));
    }
    if !(d_br >= 0.0) {
        return Err(ModelError::domain(
            "snr_br_db",
            format!("distance must be >= 0, got {d_br}"),
        ));
    }
    Ok(snr_br_db_unchecked(p, d_br, alpha_br))
}

pub(crate) fn snr_br_db_unchecked(p: &SystemParams, d_br: f64, alpha_br: f64) -> f64 {
    linear_to_db(p.snr_scale(p.bs_power) / (p.path_loss(d_br) * alpha_br))
}

pub fn semantic_similarity(fit: &SigmoidFit, gamma_db: f64) -> f64 {
    fit.a1 + fit.a2 * fit.logistic(gamma_db)
}

/// Semantic rate in suts/s for `suts_per_word = I / L`.
pub fn semantic_rate(
    p: &SystemParams,
    fit: &SigmoidFit,
    alpha_br: f64,
    similarity: f64,
    suts_per_word: f64,
) -> f64 {
    alpha_br * p.bandwidth * suts_per_word * similarity / fit.symbols_per_word
}

/// Semantic-to-bit rate of the first hop, bits/s.
pub fn semantic_bit_rate(
    p: &SystemParams,
    fit: &SigmoidFit,
    alpha_br: f64,
    similarity: f64,
) -> f64 {
    p.bits_per_word * alpha_br * p.bandwidth * similarity / fit.symbols_per_word
}

/// Shannon rate of a hop carrying `power` over distance `d` with fraction `alpha`.
pub(crate) fn shannon_rate(p: &SystemParams, power: f64, d: f64, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let snr = p.snr_scale(power) / (p.path_loss(d) * alpha);
    alpha * p.bandwidth * snr.ln_1p() / std::f64::consts::LN_2
}

/// Bit rate of the relay-to-user hop, bits/s. Zero at `alpha_ru = 0`.
pub fn bit_rate_ru(p: &SystemParams, d_ru: f64, alpha_ru: f64) -> f64 {
    shannon_rate(p, p.relay_power, d_ru, alpha_ru)
}

pub fn effective_rate(p: &SystemParams, fit: &SigmoidFit, pt: &DesignPoint) -> LinkRate {
    if pt.alpha_br <= 0.0 {
        // no semantic band: the similarity constraint cannot hold
        return LinkRate::BelowSimilarity { similarity: fit.a1 };
    }
    let gamma = snr_br_db_unchecked(p, pt.d_br, pt.alpha_br);
    let similarity = semantic_similarity(fit, gamma);
    if similarity < fit.min_similarity {
        return LinkRate::BelowSimilarity { similarity };
    }
    let semantic = semantic_bit_rate(p, fit, pt.alpha_br, similarity);
    let bits = bit_rate_ru(p, pt.d_ru, pt.alpha_ru);
    LinkRate::Feasible(semantic.min(bits))
}

/// SNR (dB) at which the similarity curve reaches `fit.min_similarity`.
pub fn min_snr_threshold_db(fit: &SigmoidFit) -> Result<f64, ModelError> {
    let (a1, top, e) = (fit.a1, fit.max_similarity(), fit.min_similarity);
    if !(e > a1 && e < top) {
        return Err(ModelError::domain(
            "min_snr_threshold_db",
            format!("eps_bar = {e} outside ({a1}, {top})"),
        ));
    }
    Ok(((e - a1) / (top - e)).ln() / fit.c1 - fit.c2 / fit.c1)
}

/// Largest first-hop bandwidth (Hz) that still meets the similarity floor at `d_br`.
pub fn max_semantic_bandwidth(
    p: &SystemParams,
    fit: &SigmoidFit,
    d_br: f64,
) -> Result<f64, ModelError> {
    let threshold = min_snr_threshold_db(fit)?;
    Ok(p.bs_power * p.rho0() / (p.path_loss(d_br) * p.noise_psd() * db_to_linear(threshold)))
}

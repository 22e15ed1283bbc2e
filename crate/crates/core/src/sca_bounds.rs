//! First-order surrogates used by the successive convex approximation steps.
//!
//! Each surrogate is a Taylor expansion of a convex (or concave) piece of a
//! constraint, taken at a local point, so it is tight there and bounds the
//! exact function globally on the side that keeps the surrogate program a
//! restriction of the exact one. Coefficients are rebuilt from the incumbent
//! on every SCA step.
//!
//! The `*_derivs` methods return `(value, first, second)` derivatives in the
//! surrogate's own variable; the subproblem solvers assemble gradients and
//! Hessians from them.

use crate::system_model::{linear_to_db, SigmoidFit, SystemParams};
use std::f64::consts::{LN_10, LOG10_E, LOG2_E};

/// Incumbent values the surrogates are expanded around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPoint {
    pub d_br: f64,
    pub d_ru: f64,
    pub alpha_br: f64,
    pub gamma_br_db: f64,
    /// Similarity value `S` at the incumbent.
    pub similarity: f64,
}

/// `(d^2 + H^2)^(beta/2)` with its first two derivatives in `d`.
pub fn path_loss_derivs(p: &SystemParams, d: f64) -> (f64, f64, f64) {
    let beta = p.path_loss_exp;
    let r = d * d + p.altitude * p.altitude;
    let u = r.powf(beta / 2.0);
    let du = beta * d * r.powf(beta / 2.0 - 1.0);
    let d2u =
        beta * r.powf(beta / 2.0 - 1.0) + beta * (beta - 2.0) * d * d * r.powf(beta / 2.0 - 2.0);
    (u, du, d2u)
}

/// Tangent lower bound of the relay-hop spectral efficiency `log2(1 + c/u)`,
/// linear in the path loss `u = (d_ru^2 + H^2)^(beta/2)`.
#[derive(Debug, Clone, Copy)]
pub struct RelayRateBound {
    pub e1: f64,
    pub e2: f64,
    pub u_t: f64,
}

impl RelayRateBound {
    pub fn new(p: &SystemParams, d_ru_t: f64, alpha_ru: f64) -> Self {
        let u_t = p.path_loss(d_ru_t);
        let c = p.snr_scale(p.relay_power) / alpha_ru;
        let snr_t = c / u_t;
        RelayRateBound {
            e1: snr_t.ln_1p() * LOG2_E,
            e2: c * LOG2_E / (u_t * u_t) / (1.0 + snr_t),
            u_t,
        }
    }

    /// Bound on `log2(1 + SNR)`, bits/s/Hz of the allocated band.
    pub fn efficiency_derivs(&self, p: &SystemParams, d_ru: f64) -> (f64, f64, f64) {
        let (u, du, d2u) = path_loss_derivs(p, d_ru);
        (
            self.e1 - self.e2 * (u - self.u_t),
            -self.e2 * du,
            -self.e2 * d2u,
        )
    }
}

/// Lower bound on `R_ru` in bits/s, tight at `lp.d_ru`.
pub fn relay_rate_lower_bound(p: &SystemParams, lp: &LocalPoint, alpha_ru: f64, d_ru: f64) -> f64 {
    let b = RelayRateBound::new(p, lp.d_ru, alpha_ru);
    alpha_ru * p.bandwidth * b.efficiency_derivs(p, d_ru).0
}

/// Lower bound of the logistic `1/(1 + e^{-chi})`, `chi = c1*gamma + c2`,
/// obtained from convexity of `1/x` in `x = 1 + e^{-chi}`.
#[derive(Debug, Clone, Copy)]
pub struct LogisticBound {
    pub c1: f64,
    pub c2: f64,
    pub e3: f64,
    pub e4: f64,
    exp_t: f64,
}

impl LogisticBound {
    pub fn new(fit: &SigmoidFit, gamma_t: f64) -> Self {
        let exp_t = (-(fit.c1 * gamma_t + fit.c2)).exp();
        let e3 = 1.0 / (1.0 + exp_t);
        LogisticBound {
            c1: fit.c1,
            c2: fit.c2,
            e3,
            e4: e3 * e3,
            exp_t,
        }
    }

    pub fn derivs(&self, gamma_db: f64) -> (f64, f64, f64) {
        let e = (-(self.c1 * gamma_db + self.c2)).exp();
        (
            self.e3 - self.e4 * (e - self.exp_t),
            self.e4 * self.c1 * e,
            -self.e4 * self.c1 * self.c1 * e,
        )
    }
}

pub fn logistic_lower_bound(fit: &SigmoidFit, lp: &LocalPoint, gamma_db: f64) -> f64 {
    LogisticBound::new(fit, lp.gamma_br_db).derivs(gamma_db).0
}

/// Upper bound of `log10(d^2 + H^2)`, linear in `d^2`.
#[derive(Debug, Clone, Copy)]
pub struct LogDistanceBound {
    pub e5: f64,
    pub e6: f64,
    d_t: f64,
}

impl LogDistanceBound {
    pub fn new(altitude: f64, d_br_t: f64) -> Self {
        let r = d_br_t * d_br_t + altitude * altitude;
        LogDistanceBound {
            e5: r.log10(),
            e6: LOG10_E / r,
            d_t: d_br_t,
        }
    }

    pub fn derivs(&self, d_br: f64) -> (f64, f64, f64) {
        (
            self.e5 + self.e6 * (d_br * d_br - self.d_t * self.d_t),
            2.0 * self.e6 * d_br,
            2.0 * self.e6,
        )
    }
}

pub fn log_distance_upper_bound(lp: &LocalPoint, altitude: f64, d_br: f64) -> f64 {
    LogDistanceBound::new(altitude, lp.d_br).derivs(d_br).0
}

/// Tangent-plane lower bound of `(alpha_br + S)^2` at `lp.alpha_br + lp.similarity`.
pub fn product_square_lower_bound(lp: &LocalPoint, alpha_br: f64, similarity: f64) -> f64 {
    let s_t = lp.alpha_br + lp.similarity;
    -s_t * s_t + 2.0 * s_t * (alpha_br + similarity)
}

/// Affine surrogate of the first-hop SNR in `alpha_br` at fixed `d_br`.
///
/// `-10 log10(alpha)` is convex, so its tangent lies below it and the
/// surrogate never exceeds the exact SNR.
#[derive(Debug, Clone, Copy)]
pub struct SnrBandwidthBound {
    /// `10 log10(P_b rho0 / ((d^2+H^2)^(beta/2) W N0))`.
    pub base_db: f64,
    pub e9: f64,
    pub e10: f64,
    alpha_t: f64,
}

impl SnrBandwidthBound {
    pub fn new(p: &SystemParams, alpha_br_t: f64, d_br: f64) -> Self {
        SnrBandwidthBound {
            base_db: linear_to_db(p.snr_scale(p.bs_power) / p.path_loss(d_br)),
            e9: 10.0 * alpha_br_t.log10(),
            e10: 10.0 / (LN_10 * alpha_br_t),
            alpha_t: alpha_br_t,
        }
    }

    pub fn value(&self, alpha_br: f64) -> f64 {
        self.base_db - self.e9 - self.e10 * (alpha_br - self.alpha_t)
    }

    /// Constant slope in `alpha_br`.
    pub fn slope(&self) -> f64 {
        -self.e10
    }
}

pub fn snr_bandwidth_lower_bound(
    p: &SystemParams,
    lp: &LocalPoint,
    d_br: f64,
    alpha_br: f64,
) -> f64 {
    SnrBandwidthBound::new(p, lp.alpha_br, d_br).value(alpha_br)
}

/// Lower bound of the similarity curve, `a1 + a2 * logistic bound`.
pub fn similarity_lower_bound(fit: &SigmoidFit, lp: &LocalPoint, gamma_db: f64) -> f64 {
    fit.a1 + fit.a2 * logistic_lower_bound(fit, lp, gamma_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system_model::{bit_rate_ru, semantic_similarity, snr_br_db};

    fn lp(d_br: f64, d_ru: f64, alpha_br: f64, gamma: f64, s: f64) -> LocalPoint {
        LocalPoint {
            d_br,
            d_ru,
            alpha_br,
            gamma_br_db: gamma,
            similarity: s,
        }
    }

    #[test]
    fn relay_bound_tangent_in_path_loss() {
        // independent tangent: f(u) = a W log2(1 + c/u), f'(u) = -a W c log2(e) / (u (u + c))
        let p = SystemParams::default().with_bandwidth(5e5);
        let (d_t, d, a) = (50.0, 60.0, 1.0);
        let c = p.snr_scale(p.relay_power) / a;
        let (u_t, u) = (2600f64.powf(1.5), 3700f64.powf(1.5));
        let f_t = a * p.bandwidth * (1.0 + c / u_t).log2();
        let slope = -a * p.bandwidth * c * LOG2_E / (u_t * (u_t + c));
        let tangent = f_t + slope * (u - u_t);
        let got = relay_rate_lower_bound(&p, &lp(0.0, d_t, 0.5, 0.0, 0.0), a, d);
        assert!(
            (got - tangent).abs() <= 1e-9 * tangent.abs(),
            "{got} vs {tangent}"
        );
        assert!(got < bit_rate_ru(&p, d, a));
        let tight = relay_rate_lower_bound(&p, &lp(0.0, d_t, 0.5, 0.0, 0.0), a, d_t);
        assert!((tight - bit_rate_ru(&p, d_t, a)).abs() <= 1e-9 * tight);
    }

    #[test]
    fn logistic_bound_tangent_in_denominator() {
        let fit = SigmoidFit::default();
        let (g_t, g) = (10.0, 14.0);
        let x_t = 1.0 + (-(fit.c1 * g_t + fit.c2)).exp();
        let x = 1.0 + (-(fit.c1 * g + fit.c2)).exp();
        let tangent = 1.0 / x_t - (x - x_t) / (x_t * x_t);
        let got = logistic_lower_bound(&fit, &lp(0.0, 0.0, 0.5, g_t, 0.0), g);
        assert!((got - tangent).abs() < 1e-14);
        assert!(got <= fit.logistic(g));
        let tight = logistic_lower_bound(&fit, &lp(0.0, 0.0, 0.5, g_t, 0.0), g_t);
        assert_eq!(tight, fit.logistic(g_t));
    }

    #[test]
    fn log_distance_bound_values() {
        let l = lp(50.0, 0.0, 0.5, 0.0, 0.0);
        let at0 = log_distance_upper_bound(&l, 10.0, 0.0);
        let expect = 2600f64.log10() - 2500.0 * LOG10_E / 2600.0;
        assert!((at0 - expect).abs() < 1e-14);
        assert!(at0 >= 100f64.log10());
        assert!((log_distance_upper_bound(&l, 10.0, 50.0) - 2600f64.log10()).abs() < 1e-15);
    }

    #[test]
    fn product_bound_values() {
        let l = lp(0.0, 0.0, 0.4, 0.0, 0.9);
        let v = product_square_lower_bound(&l, 0.5, 1.0);
        assert!((v - 2.21).abs() < 1e-12);
        assert!(v <= 2.25);
        assert!((product_square_lower_bound(&l, 0.7, 0.6) - 1.69).abs() < 1e-12);
    }

    #[test]
    fn snr_bandwidth_gap() {
        let p = SystemParams::default();
        let l = lp(0.0, 0.0, 0.5, 0.0, 0.0);
        let exact = snr_br_db(&p, 50.0, 0.25).unwrap();
        let sur = snr_bandwidth_lower_bound(&p, &l, 50.0, 0.25);
        // tangent of -10log10(a) at 0.5 evaluated at 0.25 falls short by 10 log10(e)(ln2 - 1/2)
        let gap = 10.0 * LOG10_E * (2f64.ln() - 0.5);
        assert!((gap - 0.838).abs() < 1e-3);
        assert!(((exact - sur) - gap).abs() < 1e-10);
        let tight = snr_bandwidth_lower_bound(&p, &l, 50.0, 0.5);
        assert!((tight - snr_br_db(&p, 50.0, 0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn similarity_bound_is_scaled_logistic_bound() {
        let fit = SigmoidFit::default();
        let l = lp(0.0, 0.0, 0.5, 12.0, 0.0);
        for g in [-5.0, 0.0, 12.0, 20.0, 40.0] {
            let s = similarity_lower_bound(&fit, &l, g);
            let direct = fit.a1 + fit.a2 * logistic_lower_bound(&fit, &l, g);
            assert_eq!(s, direct);
            assert!(s <= semantic_similarity(&fit, g) + 1e-15);
        }
        assert!(
            (similarity_lower_bound(&fit, &l, 12.0) - semantic_similarity(&fit, 12.0)).abs()
                < 1e-15
        );
    }

    #[test]
    fn path_loss_derivatives_match_differences() {
        let p = SystemParams::default();
        for d in [0.0, 3.0, 50.0, 97.0] {
            let (u, du, d2u) = path_loss_derivs(&p, d);
            let h = 1e-4;
            let fd1 = (p.path_loss(d + h) - p.path_loss(d - h)) / (2.0 * h);
            let fd2 = (p.path_loss(d + h) - 2.0 * u + p.path_loss(d - h)) / (h * h);
            assert!((du - fd1).abs() <= 1e-6 * du.abs().max(1.0));
            assert!((d2u - fd2).abs() <= 1e-4 * d2u.abs().max(1.0));
        }
    }
}

//! Log-barrier interior-point method for tiny dense convex programs.
//!
//! Minimizes a convex `f(x)` subject to convex `g_i(x) <= 0` by following the
//! central path of `t f(x) - sum log(-g_i(x))`, centering each step with a
//! damped Newton method and growing `t` by a constant factor until the
//! duality bound `m / t` falls below the requested tolerance.

use nalgebra::{SMatrix, SVector};
use thiserror::Error;

pub type Vector<const N: usize> = SVector<f64, N>;
pub type Matrix<const N: usize> = SMatrix<f64, N, N>;

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Debug, Clone, Copy)]
pub struct Local<const N: usize> {
    pub value: f64,
    pub grad: Vector<N>,
    pub hess: Matrix<N>,
}

impl<const N: usize> Local<N> {
    pub fn zero() -> Self {
        Local {
            value: 0.0,
            grad: Vector::zeros(),
            hess: Matrix::zeros(),
        }
    }

    /// Affine function `c + a . x`.
    pub fn affine(value: f64, grad: Vector<N>) -> Self {
        Local {
            value,
            grad,
            hess: Matrix::zeros(),
        }
    }
}

pub trait ConvexProgram<const N: usize> {
    /// Objective to minimize.
    fn objective(&self, x: &Vector<N>) -> Local<N>;

    fn num_constraints(&self) -> usize;

    /// Constraint `i`, feasible when its value is `<= 0`.
    fn constraint(&self, i: usize, x: &Vector<N>) -> Local<N>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSettings {
    pub t0: f64,
    /// Factor applied to `t` after each centering.
    pub growth: f64,
    /// Stop once `m / t` is below this.
    pub tol: f64,
    pub max_newton_per_center: usize,
    pub max_outer: usize,
}

impl Default for BarrierSettings {
    fn default() -> Self {
        BarrierSettings {
            t0: 1.0,
            growth: 10.0,
            tol: 1e-9,
            max_newton_per_center: 100,
            max_outer: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierStatus {
    Optimal,
    MaxIter,
}

#[derive(Debug, Clone, Copy)]
pub struct BarrierOutcome<const N: usize> {
    pub x: Vector<N>,
    pub objective: f64,
    /// Final `m / t`.
    pub gap: f64,
    pub newton_steps: usize,
    pub status: BarrierStatus,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("start point is not strictly feasible (constraint {index} = {value})")]
    InfeasibleStart { index: usize, value: f64 },
    #[error("non-finite value while centering")]
    NonFinite,
}

fn strictly_feasible<P: ConvexProgram<N>, const N: usize>(prob: &P, x: &Vector<N>) -> bool {
    (0..prob.num_constraints()).all(|i| {
        let g = prob.constraint(i, x).value;
        g < 0.0 && g.is_finite()
    })
}

/// Barrier function value; `None` outside the strict interior.
fn barrier_value<P: ConvexProgram<N>, const N: usize>(
    prob: &P,
    t: f64,
    x: &Vector<N>,
) -> Option<f64> {
    let mut v = t * prob.objective(x).value;
    for i in 0..prob.num_constraints() {
        let g = prob.constraint(i, x).value;
        if !(g < 0.0) {
            return None;
        }
        v -= (-g).ln();
    }
    v.is_finite().then_some(v)
}

fn newton_system<P: ConvexProgram<N>, const N: usize>(
    prob: &P,
    t: f64,
    x: &Vector<N>,
) -> (Vector<N>, Matrix<N>) {
    let f = prob.objective(x);
    let mut grad = f.grad * t;
    let mut hess = f.hess * t;
    for i in 0..prob.num_constraints() {
        let g = prob.constraint(i, x);
        let inv = -1.0 / g.value;
        grad += g.grad * inv;
        hess += g.grad * g.grad.transpose() * (inv * inv) + g.hess * inv;
    }
    (grad, hess)
}

fn solve_spd<const N: usize>(hess: &Matrix<N>, rhs: &Vector<N>) -> Option<Vector<N>> {
    if let Some(ch) = hess.cholesky() {
        return Some(ch.solve(rhs));
    }
    // barely indefinite from rounding: shift the diagonal until it factors
    let scale = hess.diagonal().abs().max().max(1e-300);
    let mut shift = 1e-12 * scale;
    for _ in 0..30 {
        let shifted = hess + Matrix::<N>::identity() * shift;
        if let Some(ch) = shifted.cholesky() {
            return Some(ch.solve(rhs));
        }
        shift *= 10.0;
    }
    None
}

/// Runs the barrier method from a strictly feasible `x0`.
pub fn minimize<P: ConvexProgram<N>, const N: usize>(
    prob: &P,
    x0: Vector<N>,
    settings: &BarrierSettings,
) -> Result<BarrierOutcome<N>, BarrierError> {
    for i in 0..prob.num_constraints() {
        let g = prob.constraint(i, &x0).value;
        if !(g < 0.0) {
            return Err(BarrierError::InfeasibleStart { index: i, value: g });
        }
    }
    let m = prob.num_constraints().max(1) as f64;
    let mut x = x0;
    let mut t = settings.t0;
    let mut steps = 0;
    let mut status = BarrierStatus::MaxIter;

    for _ in 0..settings.max_outer {
        for _ in 0..settings.max_newton_per_center {
            let (grad, hess) = newton_system(prob, t, &x);
            let Some(dx) = solve_spd(&hess, &(-grad)) else {
                return Err(BarrierError::NonFinite);
            };
            let decrement = -grad.dot(&dx);
            if !decrement.is_finite() {
                return Err(BarrierError::NonFinite);
            }
            if decrement / 2.0 <= 1e-10 {
                break;
            }
            steps += 1;
            let phi = barrier_value(prob, t, &x).ok_or(BarrierError::NonFinite)?;
            let mut s = 1.0;
            let mut accepted = false;
            while s > 1e-14 {
                let cand = x + dx * s;
                if strictly_feasible(prob, &cand) {
                    if let Some(v) = barrier_value(prob, t, &cand) {
                        if v <= phi - 0.25 * s * decrement {
                            x = cand;
                            accepted = true;
                            break;
                        }
                    }
                }
                s *= 0.5;
            }
            if !accepted {
                // no representable decrease left at this t
                break;
            }
        }
        if m / t < settings.tol {
            status = BarrierStatus::Optimal;
            break;
        }
        t *= settings.growth;
    }

    Ok(BarrierOutcome {
        x,
        objective: prob.objective(&x).value,
        gap: m / t,
        newton_steps: steps,
        status,
    })
}

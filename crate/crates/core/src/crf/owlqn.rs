//! Orthant-wise limited-memory quasi-Newton (OWL-QN).
//!
//! Minimizes `f(w) + l1 · ‖w‖₁` for a smooth `f`. With `l1 = 0` this is plain
//! L-BFGS with a backtracking Armijo line search.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::errors::{Error, Result};
use crate::math::sqrt;

/// A smooth objective: writes its gradient and returns its value.
pub trait Objective {
    fn evaluate(&mut self, w: &[f64], grad: &mut [f64]) -> f64;
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> Objective for F {
    fn evaluate(&mut self, w: &[f64], grad: &mut [f64]) -> f64 {
        self(w, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwlqnParams {
    pub l1: f64,
    /// Number of correction pairs kept.
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop when `(F_prev − F) / max(|F_prev|, 1)` falls below this.
    pub tolerance: f64,
    pub max_linesearch: usize,
}

impl Default for OwlqnParams {
    fn default() -> Self {
        Self {
            l1: 0.0,
            memory: 6,
            max_iterations: 200,
            tolerance: 1e-6,
            max_linesearch: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative improvement under the tolerance.
    Converged,
    /// Pseudo-gradient vanished.
    Stationary,
    MaxIterations,
    /// No step satisfied the sufficient-decrease condition.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwlqnResult {
    pub weights: Vec<f64>,
    /// Final value of `f(w) + l1 · ‖w‖₁`.
    pub objective: f64,
    pub iterations: usize,
    /// Objective after the starting point and after every accepted step.
    pub history: Vec<f64>,
    pub stop: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l1_norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x.abs()).sum()
}

fn pseudo_gradient(w: &[f64], g: &[f64], l1: f64, out: &mut [f64]) {
    if l1 == 0.0 {
        out.copy_from_slice(g);
        return;
    }
    for ((p, &wi), &gi) in out.iter_mut().zip(w).zip(g) {
        // at zero, take the one-sided derivative that points downhill
        *p = if wi < 0.0 || (wi == 0.0 && gi - l1 > 0.0) {
            gi - l1
        } else if wi > 0.0 || gi + l1 < 0.0 {
            gi + l1
        } else {
            0.0
        };
    }
}

struct Correction {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// `-H · pg` by the two-loop recursion.
fn direction(pg: &[f64], memory: &VecDeque<Correction>) -> Vec<f64> {
    let mut q = pg.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for c in memory.iter().rev() {
        let a = c.rho * dot(&c.s, &q);
        q.iter_mut().zip(&c.y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some(c) = memory.back() {
        let gamma = dot(&c.s, &c.y) / dot(&c.y, &c.y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for (c, a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = c.rho * dot(&c.y, &q);
        q.iter_mut().zip(&c.s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

/// Runs OWL-QN from `start`.
pub fn minimize<O: Objective>(objective: &mut O, start: &[f64], params: &OwlqnParams) -> Result<OwlqnResult> {
    if params.l1 < 0.0 || !params.l1.is_finite() {
        return Err(Error::InvalidConfig("l1 must be a non-negative number".into()));
    }
    let n = start.len();
    let l1 = params.l1;
    let mut x = start.to_vec();
    let mut g = vec![0.0; n];
    let fx = objective.evaluate(&x, &mut g);
    if !fx.is_finite() {
        return Err(Error::NonFiniteObjective { iteration: 0 });
    }
    let mut value = fx + l1 * l1_norm(&x);
    let mut history = vec![value];
    let mut memory: VecDeque<Correction> = VecDeque::with_capacity(params.memory);
    let mut pg = vec![0.0; n];
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    while iterations < params.max_iterations {
        pseudo_gradient(&x, &g, l1, &mut pg);
        let pg_norm = sqrt(dot(&pg, &pg));
        if pg_norm <= 1e-10 * sqrt(dot(&x, &x)).max(1.0) {
            stop = StopReason::Stationary;
            break;
        }
        let mut d = direction(&pg, &memory);
        if l1 > 0.0 {
            for (di, pi) in d.iter_mut().zip(&pg) {
                if *di * *pi >= 0.0 {
                    *di = 0.0;
                }
            }
        }
        let mut slope = dot(&pg, &d);
        if slope.is_nan() || slope >= 0.0 {
            memory.clear();
            d = pg.iter().map(|p| -p).collect();
            slope = -pg_norm * pg_norm;
        }
        let orthant: Vec<f64> = x
            .iter()
            .zip(&pg)
            .map(|(&xi, &pi)| {
                if xi != 0.0 {
                    xi.signum()
                } else if pi != 0.0 {
                    -pi.signum()
                } else {
                    0.0
                }
            })
            .collect();

        let mut step = if memory.is_empty() {
            (1.0 / sqrt(dot(&d, &d))).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        let mut saw_non_finite = false;
        for _ in 0..params.max_linesearch {
            for i in 0..n {
                let v = x[i] + step * d[i];
                xn[i] = if l1 > 0.0 && v.signum() != orthant[i] { 0.0 } else { v };
            }
            let f_new = objective.evaluate(&xn, &mut gn);
            if !f_new.is_finite() {
                saw_non_finite = true;
                step *= 0.5;
                continue;
            }
            let total = f_new + l1 * l1_norm(&xn);
            let moved: f64 = pg.iter().zip(xn.iter().zip(&x)).map(|(p, (a, b))| p * (a - b)).sum();
            let bound = if l1 > 0.0 { moved } else { step * slope };
            if total <= value + 1e-4 * bound {
                accepted = Some(total);
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some(new_value) = accepted else {
            if saw_non_finite {
                return Err(Error::NonFiniteObjective { iteration: iterations });
            }
            stop = StopReason::LineSearchFailed;
            break;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if memory.len() == params.memory.max(1) {
                memory.pop_front();
            }
            memory.push_back(Correction { s, y, rho: 1.0 / sy });
        }
        core::mem::swap(&mut x, &mut xn);
        core::mem::swap(&mut g, &mut gn);
        let improvement = (value - new_value) / value.abs().max(1.0);
        value = new_value;
        history.push(value);
        if improvement < params.tolerance {
            stop = StopReason::Converged;
            break;
        }
    }

    Ok(OwlqnResult {
        weights: x,
        objective: value,
        iterations,
        history,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(w: &[f64], g: &mut [f64]) -> f64 {
        // (w0 - 3)^2 + 10 (w1 + 1)^2 + (w2 - 0.1)^2
        g[0] = 2.0 * (w[0] - 3.0);
        g[1] = 20.0 * (w[1] + 1.0);
        g[2] = 2.0 * (w[2] - 0.1);
        (w[0] - 3.0).powi(2) + 10.0 * (w[1] + 1.0).powi(2) + (w[2] - 0.1).powi(2)
    }

    #[test]
    fn lbfgs_solves_quadratic() {
        let params = OwlqnParams {
            tolerance: 1e-14,
            ..OwlqnParams::default()
        };
        let r = minimize(&mut quadratic, &[0.0; 3], &params).unwrap();
        assert!((r.weights[0] - 3.0).abs() < 1e-5);
        assert!((r.weights[1] + 1.0).abs() < 1e-5);
        assert!((r.weights[2] - 0.1).abs() < 1e-5);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn l1_soft_thresholds() {
        // minimizer of (w-a)^2 + l1|w| is sign(a) max(|a| - l1/2, 0)
        let params = OwlqnParams {
            l1: 1.0,
            tolerance: 1e-14,
            ..OwlqnParams::default()
        };
        let r = minimize(&mut quadratic, &[0.0; 3], &params).unwrap();
        assert!((r.weights[0] - 2.5).abs() < 1e-5, "{:?}", r.weights);
        assert!((r.weights[1] + 0.95).abs() < 1e-5);
        assert_eq!(r.weights[2], 0.0);
    }

    #[test]
    fn huge_l1_keeps_zero() {
        let params = OwlqnParams {
            l1: 1e6,
            ..OwlqnParams::default()
        };
        let r = minimize(&mut quadratic, &[0.0; 3], &params).unwrap();
        assert_eq!(r.weights, vec![0.0; 3]);
        assert_eq!(r.stop, StopReason::Stationary);
    }

    #[test]
    fn non_finite_start() {
        let mut bad = |_: &[f64], _: &mut [f64]| f64::NAN;
        assert!(matches!(
            minimize(&mut bad, &[0.0], &OwlqnParams::default()),
            Err(Error::NonFiniteObjective { iteration: 0 })
        ));
    }
}

//! SMO for the box- and equality-constrained SVM dual
//!
//!   min_a  f(a) = 1/2 a'Qa - sum(a),   Q_ij = y_i y_j K(x_i, x_j)
//!   s.t.   0 <= a_i <= u_i,  sum(y_i a_i) = 0
//!
//! with libsvm-style working sets: the maximal violator first, then the
//! partner chosen by second-order (quadratic model) gain, and shrinking of
//! variables that sit firmly at a bound.

use super::cache::KernelCache;
use super::{KernelSpec, SolverConfig};
use crate::matrix::Matrix;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Gradient of f at `alpha`.
    pub gradient: Vec<f64>,
    /// Decision offset: f(x) = sum(y_i a_i K(x_i, x)) - rho.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// max over I_up of -y G minus min over I_low of -y G at termination.
    pub max_violation: f64,
    /// Dual objective sum(a) - 1/2 a'Qa (the quantity being maximized).
    pub objective: f64,
}

fn in_up(y: f64, a: f64, u: f64) -> bool {
    (y > 0.0 && a < u) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, u: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < u)
}

/// Maximal violator `i` over I_up among `active`, together with
/// `gmax = max_{I_up} -yG` and `gmax2 = max_{I_low} yG`; the KKT violation
/// is `gmax + gmax2`.
fn select_first(
    active: &[usize],
    y: &[f64],
    alpha: &[f64],
    upper: &[f64],
    grad: &[f64],
) -> (Option<usize>, f64, f64) {
    let mut gmax = f64::NEG_INFINITY;
    let mut gmax2 = f64::NEG_INFINITY;
    let mut i = None;
    for &t in active {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], upper[t]) && v > gmax {
            gmax = v;
            i = Some(t);
        }
        if in_low(y[t], alpha[t], upper[t]) && -v > gmax2 {
            gmax2 = -v;
        }
    }
    (i, gmax, gmax2)
}

/// Second-order choice of `j`: among violating partners in I_low, the one
/// whose pair step gives the largest decrease of the quadratic model.
#[allow(clippy::too_many_arguments)]
fn select_second(
    active: &[usize],
    i: usize,
    ki: &[f64],
    diag: &[f64],
    y: &[f64],
    alpha: &[f64],
    upper: &[f64],
    grad: &[f64],
) -> Option<usize> {
    let gmax = -y[i] * grad[i];
    let mut best = f64::INFINITY;
    let mut j = None;
    for &t in active {
        if !in_low(y[t], alpha[t], upper[t]) {
            continue;
        }
        let b = gmax + y[t] * grad[t];
        if b <= 0.0 {
            continue;
        }
        let a = (diag[i] + diag[t] - 2.0 * ki[t]).max(TAU);
        let obj = -(b * b) / a;
        if obj < best {
            best = obj;
            j = Some(t);
        }
    }
    j
}

/// A bounded variable whose gradient pushes it further into its bound than
/// any current violation can pull it out is unlikely to move again.
fn can_shrink(
    t: usize,
    y: &[f64],
    alpha: &[f64],
    upper: &[f64],
    grad: &[f64],
    gmax: f64,
    gmax2: f64,
) -> bool {
    if alpha[t] >= upper[t] {
        if y[t] > 0.0 {
            -grad[t] > gmax
        } else {
            -grad[t] > gmax2
        }
    } else if alpha[t] <= 0.0 {
        if y[t] > 0.0 {
            grad[t] > gmax2
        } else {
            grad[t] > gmax
        }
    } else {
        false
    }
}

/// Recomputes the gradient of the variables outside `active` and reactivates
/// every variable. `g_bar[t] = sum over s at its upper bound of u_s Q_ts`, so
/// only free variables need kernel rows.
#[allow(clippy::too_many_arguments)]
fn unshrink(
    active: &mut Vec<usize>,
    y: &[f64],
    alpha: &[f64],
    upper: &[f64],
    g_bar: &[f64],
    grad: &mut [f64],
    cache: &mut KernelCache,
) {
    let n = y.len();
    if active.len() == n {
        return;
    }
    let mut is_active = vec![false; n];
    for &t in active.iter() {
        is_active[t] = true;
    }
    let inactive: Vec<usize> = (0..n).filter(|&t| !is_active[t]).collect();
    for &t in &inactive {
        grad[t] = g_bar[t] - 1.0;
    }
    for s in 0..n {
        if alpha[s] > 0.0 && alpha[s] < upper[s] {
            let ks = cache.row(s);
            let coef = alpha[s] * y[s];
            for &t in &inactive {
                grad[t] += y[t] * coef * ks[t];
            }
        }
    }
    active.clear();
    active.extend(0..n);
}

/// Solves the dual for labels `y` in {+1, -1} and per-sample upper bounds.
///
/// Inputs are assumed validated by the caller: equal lengths, finite values,
/// positive bounds.
pub fn solve_dual(
    x: &Matrix,
    y: &[f64],
    upper: &[f64],
    kernel: &KernelSpec,
    config: &SolverConfig,
) -> DualSolution {
    let n = x.rows();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = x.iter_rows().map(|r| kernel.eval(r, r)).collect();
    let mut cache = KernelCache::new(x, kernel, config.cache_size);
    let mut g_bar = vec![0.0; n];
    let mut active: Vec<usize> = (0..n).collect();
    let shrink_every = n.clamp(1, 1000);
    let mut countdown = shrink_every;
    let mut unshrunk_once = false;

    let mut iterations = 0;
    let mut converged = false;
    let mut violation;
    loop {
        countdown -= 1;
        if countdown == 0 {
            countdown = shrink_every;
            let (_, gmax, gmax2) = select_first(&active, y, &alpha, upper, &grad);
            if !unshrunk_once && gmax + gmax2 <= 10.0 * config.tol {
                unshrunk_once = true;
                unshrink(&mut active, y, &alpha, upper, &g_bar, &mut grad, &mut cache);
            }
            active.retain(|&t| !can_shrink(t, y, &alpha, upper, &grad, gmax, gmax2));
        }

        let (mut sel_i, mut gmax, mut gmax2) = select_first(&active, y, &alpha, upper, &grad);
        if sel_i.is_none() || gmax + gmax2 <= config.tol {
            // Converged on the active set; confirm on all variables.
            if active.len() < n {
                unshrink(&mut active, y, &alpha, upper, &g_bar, &mut grad, &mut cache);
                (sel_i, gmax, gmax2) = select_first(&active, y, &alpha, upper, &grad);
                countdown = 1;
            }
        }
        violation = if sel_i.is_some() && gmax2.is_finite() {
            (gmax + gmax2).max(0.0)
        } else {
            0.0
        };
        let Some(i) = sel_i else {
            converged = true;
            break;
        };
        if violation <= config.tol {
            converged = true;
            break;
        }
        if iterations >= config.max_iter {
            break;
        }
        let ki = cache.row(i);
        let Some(j) = select_second(&active, i, &ki, &diag, y, &alpha, upper, &grad) else {
            converged = true;
            break;
        };
        iterations += 1;

        let kj = cache.row(j);
        let (ci, cj) = (upper[i], upper[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = ki[j];

        if y[i] != y[j] {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        // G_t += Q_ti * da_i + Q_tj * da_j, with Q_ts = y_t y_s K_ts
        let di = (alpha[i] - old_i) * y[i];
        let dj = (alpha[j] - old_j) * y[j];
        for &t in &active {
            grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
        }
        for (k, kk, old) in [(i, &ki, old_i), (j, &kj, old_j)] {
            let was = old >= upper[k];
            let now = alpha[k] >= upper[k];
            if was != now {
                let coef = if now {
                    upper[k] * y[k]
                } else {
                    -upper[k] * y[k]
                };
                for t in 0..n {
                    g_bar[t] += y[t] * coef * kk[t];
                }
            }
        }
    }
    unshrink(&mut active, y, &alpha, upper, &g_bar, &mut grad, &mut cache);

    let rho = compute_rho(y, &alpha, upper, &grad);
    let objective = -0.5
        * alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>();
    DualSolution {
        alpha,
        gradient: grad,
        rho,
        iterations,
        converged,
        max_violation: violation,
        objective,
    }
}

/// Averages y_i G_i over free variables; with none free, takes the midpoint
/// of the interval the KKT conditions allow.
fn compute_rho(y: &[f64], alpha: &[f64], upper: &[f64], grad: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= upper[t] {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> (Matrix, Vec<f64>) {
        (
            Matrix::from_rows(&[[-1.0], [1.0]]).unwrap(),
            vec![-1.0, 1.0],
        )
    }

    #[test]
    fn two_point_analytic() {
        let (x, y) = two_points();
        let k = KernelSpec::Rbf { gamma: 0.5 };
        let s = solve_dual(&x, &y, &[1e6, 1e6], &k, &SolverConfig::default());
        let expected = 1.0 / (1.0 - (-2.0f64).exp());
        assert!((s.alpha[0] - expected).abs() < 1e-9);
        assert!((s.alpha[1] - expected).abs() < 1e-9);
        assert!(s.rho.abs() < 1e-9);
        assert!(s.converged);
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn two_point_box_bound() {
        let (x, y) = two_points();
        let k = KernelSpec::Rbf { gamma: 0.5 };
        let s = solve_dual(&x, &y, &[0.5, 0.5], &k, &SolverConfig::default());
        assert_eq!(s.alpha, vec![0.5, 0.5]);
        assert!(s.rho.abs() < 1e-12);
    }

    #[test]
    fn cache_size_does_not_change_result() {
        let x = Matrix::from_rows(&[
            [0.0, 0.1],
            [0.3, 0.9],
            [1.0, 0.2],
            [0.8, 0.8],
            [0.2, 0.5],
            [0.6, 0.4],
            [0.9, 0.0],
        ])
        .unwrap();
        let y = [1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
        let u = [3.0; 7];
        let k = KernelSpec::Rbf { gamma: 2.0 };
        let small = SolverConfig {
            cache_size: 1,
            ..SolverConfig::default()
        };
        let a = solve_dual(&x, &y, &u, &k, &small);
        let b = solve_dual(&x, &y, &u, &k, &SolverConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let x = Matrix::from_rows(&[[0.0], [0.1], [0.2], [0.3], [0.4], [0.5]]).unwrap();
        let y = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let k = KernelSpec::Rbf { gamma: 1.0 };
        let cfg = SolverConfig {
            max_iter: 1,
            ..SolverConfig::default()
        };
        let s = solve_dual(&x, &y, &[10.0; 6], &k, &cfg);
        assert!(!s.converged);
        assert_eq!(s.iterations, 1);
        assert!(s.max_violation > cfg.tol);
    }
}

//! Deterministic derivative-free maximization: a coarse grid scan seeds a
//! bounded Nelder-Mead polish. No randomness anywhere, so two runs with the
//! same configuration produce bit-identical results, and the result never
//! falls below the best seed point.

use crate::error::{Error, Result};
use crate::metrics::{self, GainCheck};
use crate::optics::Quadrature;
use crate::protocols::{self, ProtocolParams, Scheme, TeleportOutcome};

/// Default number of grid points per free dimension.
pub const DEFAULT_GRID_POINTS: usize = 33;

pub struct OptimizationProblem<F> {
    pub objective: F,
    /// Inclusive `(lo, hi)` bounds per dimension; `lo == hi` pins a parameter.
    pub bounds: Vec<(f64, f64)>,
    pub grid_points: usize,
    /// Extra seed points evaluated alongside the grid; the result dominates
    /// every one of them.
    pub reference_points: Vec<Vec<f64>>,
    /// Convergence tolerance on the objective during polish.
    pub tolerance: f64,
    pub max_polish_iterations: usize,
    pub keep_trace: bool,
}

impl<F: Fn(&[f64]) -> f64> OptimizationProblem<F> {
    pub fn new(objective: F, bounds: Vec<(f64, f64)>) -> Self {
        OptimizationProblem {
            objective,
            bounds,
            grid_points: DEFAULT_GRID_POINTS,
            reference_points: Vec::new(),
            tolerance: 1e-8,
            max_polish_iterations: 600,
            keep_trace: false,
        }
    }

    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n.max(2);
        self
    }

    pub fn with_reference_point(mut self, point: Vec<f64>) -> Self {
        self.reference_points.push(point);
        self
    }
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
}

struct Evaluator<'a, F> {
    objective: &'a F,
    bounds: &'a [(f64, f64)],
    evaluations: usize,
    trace: Option<Vec<(Vec<f64>, f64)>>,
}

impl<'a, F: Fn(&[f64]) -> f64> Evaluator<'a, F> {
    /// Clamp to bounds, evaluate, and map non-finite values to −inf so the
    /// search simply avoids them.
    fn eval(&mut self, point: &[f64]) -> f64 {
        let clamped: Vec<f64> = point
            .iter()
            .zip(self.bounds.iter())
            .map(|(&x, &(lo, hi))| x.clamp(lo, hi))
            .collect();
        let value = (self.objective)(&clamped);
        let value = if value.is_finite() {
            value
        } else {
            f64::NEG_INFINITY
        };
        self.evaluations += 1;
        if let Some(trace) = self.trace.as_mut() {
            trace.push((clamped, value));
        }
        value
    }
}

/// Maximize the objective over the given box.
pub fn maximize<F: Fn(&[f64]) -> f64>(
    problem: &OptimizationProblem<F>,
) -> Result<OptimizationResult> {
    for &(lo, hi) in &problem.bounds {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::param(
                "bounds",
                format!("bounds must be finite with lo <= hi, got ({lo}, {hi})"),
            ));
        }
    }
    let dims = problem.bounds.len();
    let mut ev = Evaluator {
        objective: &problem.objective,
        bounds: &problem.bounds,
        evaluations: 0,
        trace: problem.keep_trace.then(Vec::new),
    };

    if dims == 0 {
        let value = ev.eval(&[]);
        return Ok(OptimizationResult {
            best_params: Vec::new(),
            best_value: value,
            evaluations: ev.evaluations,
            trace: ev.trace,
        });
    }

    // Grid scan (plus caller-supplied seed points).
    let axes: Vec<Vec<f64>> = problem
        .bounds
        .iter()
        .map(|&(lo, hi)| {
            if lo == hi {
                vec![lo]
            } else {
                let n = problem.grid_points;
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let mut best_point: Option<Vec<f64>> = None;
    let mut best_value = f64::NEG_INFINITY;
    let mut counter = vec![0usize; dims];
    loop {
        let point: Vec<f64> = counter
            .iter()
            .zip(axes.iter())
            .map(|(&i, ax)| ax[i])
            .collect();
        let value = ev.eval(&point);
        if value > best_value {
            best_value = value;
            best_point = Some(point);
        }
        let mut d = 0;
        loop {
            counter[d] += 1;
            if counter[d] < axes[d].len() {
                break;
            }
            counter[d] = 0;
            d += 1;
            if d == dims {
                break;
            }
        }
        if d == dims {
            break;
        }
    }
    for reference in &problem.reference_points {
        let value = ev.eval(reference);
        if value > best_value {
            best_value = value;
            best_point = Some(
                reference
                    .iter()
                    .zip(problem.bounds.iter())
                    .map(|(&x, &(lo, hi))| x.clamp(lo, hi))
                    .collect(),
            );
        }
    }
    let Some(grid_best) = best_point else {
        return Err(Error::Optimization("empty search space".into()));
    };
    if !best_value.is_finite() {
        return Err(Error::Optimization(
            "objective non-finite over the entire grid".into(),
        ));
    }

    // Simplex polish in the subspace of free dimensions, restarted once at a
    // finer scale to cope with narrow ridges.
    let free: Vec<usize> = (0..dims)
        .filter(|&d| problem.bounds[d].0 < problem.bounds[d].1)
        .collect();
    let mut current = grid_best.clone();
    let mut current_value = best_value;
    if !free.is_empty() {
        for restart in 0..2 {
            let scale = 1.0 / (4.0f64.powi(restart)); // step = spacing/2, then /8
            let steps: Vec<f64> = free
                .iter()
                .map(|&d| {
                    let (lo, hi) = problem.bounds[d];
                    (hi - lo) / (problem.grid_points - 1) as f64 * 0.5 * scale
                })
                .collect();
            let (point, value) = nelder_mead(&mut ev, &current, &free, &steps, problem);
            if value > current_value {
                current_value = value;
                current = point;
            }
        }
    }

    Ok(OptimizationResult {
        best_params: current,
        best_value: current_value,
        evaluations: ev.evaluations,
        trace: ev.trace,
    })
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(
    ev: &mut Evaluator<F>,
    start: &[f64],
    free: &[usize],
    steps: &[f64],
    problem: &OptimizationProblem<F>,
) -> (Vec<f64>, f64) {
    let n = free.len();
    let embed = |sub: &[f64]| -> Vec<f64> {
        let mut full = start.to_vec();
        for (k, &d) in free.iter().enumerate() {
            full[d] = sub[k].clamp(problem.bounds[d].0, problem.bounds[d].1);
        }
        full
    };
    let base: Vec<f64> = free.iter().map(|&d| start[d]).collect();

    // Vertices: base plus one step along each free axis, flipped away from a
    // boundary when necessary.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let value = ev.eval(&embed(&base));
    simplex.push((base.clone(), value));
    for k in 0..n {
        let d = free[k];
        let (lo, hi) = problem.bounds[d];
        let mut vertex = base.clone();
        let step = if base[k] + steps[k] <= hi {
            steps[k]
        } else {
            -steps[k]
        };
        vertex[k] = (base[k] + step).clamp(lo, hi);
        let value = ev.eval(&embed(&vertex));
        simplex.push((vertex, value));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..problem.max_polish_iterations {
        // Sort descending: best first (maximization).
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[0].1 - simplex[n].1;
        if spread.abs() < problem.tolerance {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflected: Vec<f64> = (0..n)
            .map(|k| centroid[k] + alpha * (centroid[k] - worst.0[k]))
            .collect();
        let f_reflected = ev.eval(&embed(&reflected));

        if f_reflected > simplex[0].1 {
            let expanded: Vec<f64> = (0..n)
                .map(|k| centroid[k] + gamma * (reflected[k] - centroid[k]))
                .collect();
            let f_expanded = ev.eval(&embed(&expanded));
            simplex[n] = if f_expanded > f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected > simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflected);
        } else {
            let contracted: Vec<f64> = (0..n)
                .map(|k| centroid[k] + rho * (worst.0[k] - centroid[k]))
                .collect();
            let f_contracted = ev.eval(&embed(&contracted));
            if f_contracted > worst.1 {
                simplex[n] = (contracted, f_contracted);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|k| best[k] + sigma * (vertex.0[k] - best[k]))
                        .collect();
                    let f_shrunk = ev.eval(&embed(&shrunk));
                    *vertex = (shrunk, f_shrunk);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    (embed(&simplex[0].0), simplex[0].1)
}

/// One of the four biased-entanglement operating regimes: the squeezed
/// quadrature of the third beam crossed with the polarity of the amplitude
/// feedforward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BetRegime {
    pub sq3_angle: Quadrature,
    pub positive_amp_gain: bool,
}

impl BetRegime {
    pub const ALL: [BetRegime; 4] = [
        BetRegime {
            sq3_angle: Quadrature::Phase,
            positive_amp_gain: true,
        },
        BetRegime {
            sq3_angle: Quadrature::Phase,
            positive_amp_gain: false,
        },
        BetRegime {
            sq3_angle: Quadrature::Amplitude,
            positive_amp_gain: true,
        },
        BetRegime {
            sq3_angle: Quadrature::Amplitude,
            positive_amp_gain: false,
        },
    ];

    /// The regime the closed-form analysis selects as best: positive gain with
    /// the third beam phase squeezed.
    pub const BEST: BetRegime = BetRegime {
        sq3_angle: Quadrature::Phase,
        positive_amp_gain: true,
    };

    pub fn describe(&self) -> String {
        format!(
            "{}-squeezed g{}",
            match self.sq3_angle {
                Quadrature::Amplitude => "amplitude",
                Quadrature::Phase => "phase",
            },
            if self.positive_amp_gain { "+" } else { "-" }
        )
    }
}

fn bet_params(v_sq: f64, v_sq3: f64, regime: BetRegime, point: &[f64]) -> ProtocolParams {
    let mut params =
        ProtocolParams::bet(v_sq, v_sq3, regime.sq3_angle, point[0], point[1], point[2]);
    params.gains.v_plus = if regime.positive_amp_gain { 1.0 } else { -1.0 };
    params
}

fn bet_fidelity_objective(v_sq: f64, v_sq3: f64, regime: BetRegime) -> impl Fn(&[f64]) -> f64 {
    move |point: &[f64]| {
        let params = bet_params(v_sq, v_sq3, regime, point);
        match protocols::run(&params) {
            Ok(outcome) => {
                match metrics::polarization_fidelity_checked(&outcome, GainCheck::UpToSign) {
                    Ok(report) => report.total,
                    Err(_) => f64::NEG_INFINITY,
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Search box for the free phase gain of the vertical arm.
pub const PHASE_GAIN_BOUND: f64 = 25.0;

/// Best parameters and outcome of one BET regime at fixed squeezing.
pub struct BetOptimum {
    pub regime: BetRegime,
    pub result: OptimizationResult,
    pub params: ProtocolParams,
    pub outcome: TeleportOutcome,
}

/// Maximize BET fidelity over `(eps1, eps2, g−)` in one regime. The
/// SQD-equivalent configuration `(1, 0, 0)` is always included as a seed, so
/// the optimum dominates it.
pub fn optimize_bet(
    v_sq: f64,
    v_sq3: f64,
    regime: BetRegime,
    grid_points: usize,
) -> Result<BetOptimum> {
    let objective = bet_fidelity_objective(v_sq, v_sq3, regime);
    let problem = OptimizationProblem::new(
        objective,
        vec![
            (0.0, 1.0),
            (0.0, 1.0),
            (-PHASE_GAIN_BOUND, PHASE_GAIN_BOUND),
        ],
    )
    .with_grid_points(grid_points)
    .with_reference_point(vec![1.0, 0.0, 0.0]);
    let result = maximize(&problem)?;
    let params = bet_params(v_sq, v_sq3, regime, &result.best_params);
    let outcome = protocols::run(&params)?;
    Ok(BetOptimum {
        regime,
        result,
        params,
        outcome,
    })
}

/// Maximize the summed transfer coefficient of the BET scheme over
/// `(eps1, eps2)` at a fixed vertical gain, subject to a conditional-variance
/// budget (points whose averaged V_cv exceeds the cap are rejected). The
/// horizontal arm stays at unity gain and the third beam is amplitude
/// squeezed, matching the information-transfer analysis; the optimum recovers
/// the direct-detection wiring `(eps1, eps2) = (1, 0)`.
pub fn optimize_bet_transfer(
    v_sq: f64,
    v_sq3: f64,
    v_gain: f64,
    v_cv_cap: f64,
    grid_points: usize,
) -> Result<BetOptimum> {
    let build = move |point: &[f64]| {
        let mut params =
            ProtocolParams::bet(v_sq, v_sq3, Quadrature::Amplitude, point[0], point[1], 0.0);
        params.gains.v_plus = v_gain;
        params
    };
    let objective = move |point: &[f64]| {
        let Ok(outcome) = protocols::run(&build(point)) else {
            return f64::NEG_INFINITY;
        };
        let cv = metrics::conditional_variances(&outcome, false);
        if cv.average > v_cv_cap {
            return f64::NEG_INFINITY;
        }
        match metrics::transfer_coefficients(&outcome, false) {
            Ok(t) => t.t_q,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let problem = OptimizationProblem::new(objective, vec![(0.0, 1.0), (0.0, 1.0)])
        .with_grid_points(grid_points)
        .with_reference_point(vec![1.0, 0.0]);
    let result = maximize(&problem)?;
    let params = build(&result.best_params);
    let outcome = protocols::run(&params)?;
    Ok(BetOptimum {
        regime: BetRegime {
            sq3_angle: Quadrature::Amplitude,
            positive_amp_gain: v_gain >= 0.0,
        },
        result,
        params,
        outcome,
    })
}

/// Enumerate all four BET regimes and return their optima, best first.
pub fn optimize_bet_all_regimes(
    v_sq: f64,
    v_sq3: f64,
    grid_points: usize,
) -> Result<Vec<BetOptimum>> {
    let mut optima: Vec<BetOptimum> = BetRegime::ALL
        .iter()
        .map(|&regime| optimize_bet(v_sq, v_sq3, regime, grid_points))
        .collect::<Result<_>>()?;
    optima.sort_by(|a, b| {
        b.result
            .best_value
            .partial_cmp(&a.result.best_value)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(optima)
}

/// Best parameters and outcome of the optimized twin scheme at fixed squeezing.
pub struct OptTwinOptimum {
    pub result: OptimizationResult,
    pub params: ProtocolParams,
    pub outcome: TeleportOutcome,
}

/// Maximize optimized-twin fidelity over `(eps1, eps2, g−)` on the vertical
/// arm. The balanced twin configuration is always included as a seed.
pub fn optimize_optimized_twin(v_sq: f64, grid_points: usize) -> Result<OptTwinOptimum> {
    let objective = move |point: &[f64]| {
        let params = ProtocolParams::optimized_twin(v_sq, point[0], point[1], point[2]);
        match protocols::run(&params) {
            Ok(outcome) => match metrics::polarization_fidelity(&outcome) {
                Ok(report) => report.total,
                Err(_) => f64::NEG_INFINITY,
            },
            Err(_) => f64::NEG_INFINITY,
        }
    };
    // Balanced arms with the unity-calibrated phase feedforward correspond to
    // g− = 1/sqrt(eps2) = sqrt(2).
    let balanced = vec![0.5, 0.5, std::f64::consts::SQRT_2];
    let problem = OptimizationProblem::new(
        objective,
        vec![
            (0.0, 1.0),
            (0.0, 1.0),
            (-PHASE_GAIN_BOUND, PHASE_GAIN_BOUND),
        ],
    )
    .with_grid_points(grid_points)
    .with_reference_point(balanced);
    let result = maximize(&problem)?;
    let params = ProtocolParams::optimized_twin(
        v_sq,
        result.best_params[0],
        result.best_params[1],
        result.best_params[2],
    );
    let outcome = protocols::run(&params)?;
    Ok(OptTwinOptimum {
        result,
        params,
        outcome,
    })
}

/// Maximize SQD fidelity over the third-beam squeezing at fixed entanglement
/// squeezing. Returns `(best_v_sq3, best_fidelity)`.
pub fn optimize_sqd_over_sq3(v_sq: f64, grid_points: usize) -> Result<(f64, f64)> {
    let objective = move |point: &[f64]| {
        let params = ProtocolParams::sqd(v_sq, point[0]);
        match protocols::run(&params) {
            Ok(outcome) => match metrics::polarization_fidelity(&outcome) {
                Ok(report) => report.total,
                Err(_) => f64::NEG_INFINITY,
            },
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let problem =
        OptimizationProblem::new(objective, vec![(1e-6, 1.0)]).with_grid_points(grid_points);
    let result = maximize(&problem)?;
    Ok((result.best_params[0], result.best_value))
}

/// Fidelity of a scheme at unity gain, as driven by sweeps: direct evaluation
/// for the fixed-topology schemes, optimization for bet and optimized-twin.
pub fn scheme_fidelity(
    scheme: Scheme,
    v_sq: f64,
    v_sq3: f64,
    grid_points: usize,
) -> Result<(f64, Option<(f64, f64)>)> {
    match scheme {
        Scheme::Twin => {
            let outcome = protocols::run(&ProtocolParams::twin(v_sq))?;
            Ok((metrics::polarization_fidelity(&outcome)?.total, None))
        }
        Scheme::Sqd => {
            let outcome = protocols::run(&ProtocolParams::sqd(v_sq, v_sq3))?;
            Ok((metrics::polarization_fidelity(&outcome)?.total, None))
        }
        Scheme::Bet => {
            let best = optimize_bet(v_sq, v_sq3, BetRegime::BEST, grid_points)?;
            Ok((
                best.result.best_value,
                Some((best.params.eps1, best.params.eps2)),
            ))
        }
        Scheme::OptimizedTwin => {
            let best = optimize_optimized_twin(v_sq, grid_points)?;
            Ok((
                best.result.best_value,
                Some((best.params.eps1, best.params.eps2)),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ClosedForm;
    use approx::assert_abs_diff_eq;

    const SQRT_TWO_THIRDS: f64 = 0.816496580927726;

    #[test]
    fn quadratic_bowl_is_found() {
        let problem = OptimizationProblem::new(
            |p: &[f64]| -((p[0] - 0.3).powi(2) + (p[1] + 0.4).powi(2)),
            vec![(-1.0, 1.0), (-1.0, 1.0)],
        );
        let result = maximize(&problem).unwrap();
        assert_abs_diff_eq!(result.best_params[0], 0.3, epsilon = 1e-4);
        assert_abs_diff_eq!(result.best_params[1], -0.4, epsilon = 1e-4);
        assert!(result.best_value > -1e-8);
    }

    #[test]
    fn boundary_maximum_is_found() {
        let problem =
            OptimizationProblem::new(|p: &[f64]| p[0], vec![(0.0, 1.0)]).with_grid_points(17);
        let result = maximize(&problem).unwrap();
        assert_abs_diff_eq!(result.best_params[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_problem_returns_single_point() {
        let problem = OptimizationProblem::new(|_: &[f64]| 41.5, vec![]);
        let result = maximize(&problem).unwrap();
        assert_eq!(result.evaluations, 1);
        assert_eq!(result.best_value, 41.5);
    }

    #[test]
    fn pinned_dimensions_are_respected() {
        let problem = OptimizationProblem::new(
            |p: &[f64]| -(p[0] - 0.2).powi(2) - p[1].powi(2),
            vec![(0.7, 0.7), (-1.0, 1.0)],
        );
        let result = maximize(&problem).unwrap();
        assert_eq!(result.best_params[0], 0.7);
        assert_abs_diff_eq!(result.best_params[1], 0.0, epsilon = 1e-4);
    }

    #[test]
    fn non_finite_objective_reported() {
        let problem = OptimizationProblem::new(|_: &[f64]| f64::NAN, vec![(0.0, 1.0)]);
        assert!(maximize(&problem).is_err());
    }

    #[test]
    fn determinism_bit_identical() {
        let make = || {
            OptimizationProblem::new(
                |p: &[f64]| (p[0] * 3.7).sin() * (p[1] * 1.3).cos(),
                vec![(0.0, 3.0), (0.0, 3.0)],
            )
        };
        let a = maximize(&make()).unwrap();
        let b = maximize(&make()).unwrap();
        assert_eq!(a.best_params, b.best_params);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn result_dominates_reference_points() {
        let objective = |p: &[f64]| -(p[0] - 0.123).powi(2);
        let reference = vec![0.123];
        let problem = OptimizationProblem::new(objective, vec![(0.0, 1.0)])
            .with_grid_points(5)
            .with_reference_point(reference.clone());
        let result = maximize(&problem).unwrap();
        assert!(result.best_value >= -(0.123f64 - 0.123).powi(2) - 1e-15);
    }

    #[test]
    fn bet_without_third_beam_squeezing_reaches_direct_detection_limit() {
        // Ideal entanglement, unsqueezed third beam: the optimum is the
        // direct-detection maximum sqrt(2/3), reached at eps2 = 0.
        let best = optimize_bet(1e-6, 1.0, BetRegime::BEST, 17).unwrap();
        assert_abs_diff_eq!(best.result.best_value, SQRT_TWO_THIRDS, epsilon = 1e-4);
        assert!(best.params.eps2 < 0.02, "eps2 = {}", best.params.eps2);
    }

    #[test]
    fn bet_information_transfer_optimum_recovers_direct_detection_wiring() {
        let best = optimize_bet_transfer(0.5, 0.5, 2.0, 1.0, 17).unwrap();
        assert!(best.params.eps1 > 0.98, "eps1 = {}", best.params.eps1);
        assert!(best.params.eps2 < 0.02, "eps2 = {}", best.params.eps2);
        // T_q = 2·1/(1+2V_SQ) + γ²/(γ²+V_SQ3) with γ = 2.
        let expected = 1.0 + 4.0 / 4.5;
        assert_abs_diff_eq!(best.result.best_value, expected, epsilon = 1e-6);
        let cv = crate::metrics::conditional_variances(&best.outcome, false);
        assert!(cv.average <= 1.0);
    }

    #[test]
    fn bet_best_regime_wins_the_enumeration() {
        let optima = optimize_bet_all_regimes(1e-3, 1e-3, 13).unwrap();
        assert_eq!(optima[0].regime, BetRegime::BEST);
        assert!(optima[0].result.best_value > 0.9);
    }

    #[test]
    fn bet_optimum_tracks_the_closed_form() {
        let v3 = 0.05;
        let best = optimize_bet(1e-6, v3, BetRegime::BEST, 33).unwrap();
        let reference = ClosedForm::BetBest {
            v_plus_sq3: 1.0 / v3,
            eps1: best.params.eps1,
            eps2: best.params.eps2,
        }
        .eval()
        .unwrap();
        // Horizontal factor is ~1 at ideal entanglement, so the total tracks
        // the vertical-arm closed form at the found beamsplitter ratios.
        assert_abs_diff_eq!(best.result.best_value, reference, epsilon = 1e-5);
    }

    #[test]
    fn grid_refinement_is_consistent() {
        let coarse = optimize_bet(1e-4, 1e-4, BetRegime::BEST, 33).unwrap();
        let fine = optimize_bet(1e-4, 1e-4, BetRegime::BEST, 65).unwrap();
        assert!(
            (coarse.result.best_value - fine.result.best_value).abs() < 1e-4,
            "33-grid {} vs 65-grid {}",
            coarse.result.best_value,
            fine.result.best_value
        );
    }

    #[test]
    fn optimized_twin_dominates_balanced_twin() {
        for v in [0.2, 0.5, 0.9] {
            let best = optimize_optimized_twin(v, 17).unwrap();
            let balanced = ClosedForm::Twin { v_sq: v }.eval().unwrap();
            assert!(
                best.result.best_value >= balanced - 1e-9,
                "v={v}: optimized {} < balanced {balanced}",
                best.result.best_value
            );
        }
    }

    #[test]
    fn sqd_sq3_sweep_peaks_without_squeezing() {
        let (best_v3, best_f) = optimize_sqd_over_sq3(1e-6, 33).unwrap();
        assert!(best_v3 > 0.99, "best v_sq3 = {best_v3}");
        assert_abs_diff_eq!(best_f, SQRT_TWO_THIRDS, epsilon = 1e-4);
    }
}

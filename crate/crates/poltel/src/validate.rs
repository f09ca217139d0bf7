//! Numerical validation suite behind the `validate` CLI command.
//!
//! Every asserted check pins its tolerance in code and reports the measured
//! value; the two closing entries are report-only comparisons that carry no
//! pass/fail weight (they track reference expressions whose normalization is
//! unresolved, plus the scheme comparison at moderate squeezing).

use crate::fluct::{linear_combination, symplectic_product, FluctuationVector, SourceRegistry};
use crate::metrics::{
    self, conditional_variance, four_sq_magnitude, transfer_coefficient, ClosedForm,
};
use crate::optics::{OpticalMode, Quadrature};
use crate::optimizer::{self, BetRegime};
use crate::protocols::{self, ProtocolParams, QuadKey, Scheme};
use crate::stokes::{
    stokes_means, stokes_variances, stokes_variances_reference, ClassicalCross, ModeVariances,
    PolarizationState, StokesStatistics,
};
use crate::sweeps::{self, Sq3Choice, SweepOptions};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const SQRT_TWO_THIRDS: f64 = 0.816496580927726;
const ONE_OVER_SQRT6: f64 = 0.408248290463863;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Report-only entries never fail the run.
    pub asserted: bool,
    pub details: String,
}

impl CriterionResult {
    fn asserted(id: &'static str, name: &'static str, passed: bool, details: String) -> Self {
        CriterionResult {
            id,
            name,
            passed,
            asserted: true,
            details,
        }
    }

    fn report_only(id: &'static str, name: &'static str, details: String) -> Self {
        CriterionResult {
            id,
            name,
            passed: true,
            asserted: false,
            details,
        }
    }
}

/// Run the full suite. Deterministic: every randomized check uses a fixed
/// seed.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        c01_twin_classical_limit(),
        c02_twin_oracle_grid(),
        c03_sqd_anchors(),
        c04_sqd_oracle_grid(),
        c05_bet_reduction(),
        c06_bet_optimum(),
        c07_bet_dominance(),
        c08_tv_anchors(),
        c09_gaussian_identity(),
        c10_sqd_gain_properties(),
        c11_stokes_properties(),
        c12_structural_properties(),
        r01_four_sq_agreement(),
        r02_scheme_comparison(),
    ]
}

pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.passed || !r.asserted)
}

fn c01_twin_classical_limit() -> CriterionResult {
    let run = || -> crate::Result<f64> {
        let outcome = protocols::run(&ProtocolParams::twin(1.0))?;
        Ok(metrics::polarization_fidelity(&outcome)?.total)
    };
    match run() {
        Ok(f) => {
            let diff = (f - 0.25).abs();
            CriterionResult::asserted(
                "1",
                "twin classical limit",
                diff <= 1e-9,
                format!("fidelity = {f:.12} (|diff| = {diff:.2e}, tol 1e-9)"),
            )
        }
        Err(e) => CriterionResult::asserted("1", "twin classical limit", false, e.to_string()),
    }
}

fn c02_twin_oracle_grid() -> CriterionResult {
    let grid = sweeps::open_low_grid(0.01, 1.0, 50);
    let mut max_diff: f64 = 0.0;
    for &v in &grid {
        let f = protocols::run(&ProtocolParams::twin(v))
            .and_then(|o| metrics::polarization_fidelity(&o))
            .map(|r| r.total);
        let reference = ClosedForm::Twin { v_sq: v }.eval();
        match (f, reference) {
            (Ok(f), Ok(r)) => max_diff = max_diff.max((f - r).abs()),
            _ => {
                return CriterionResult::asserted(
                    "2",
                    "twin oracle equivalence",
                    false,
                    format!("evaluation failed at v_sq = {v}"),
                )
            }
        }
    }
    CriterionResult::asserted(
        "2",
        "twin oracle equivalence",
        max_diff <= 1e-9,
        format!("max |sim − 1/(V+1)²| = {max_diff:.2e} over 50 points (tol 1e-9)"),
    )
}

fn c03_sqd_anchors() -> CriterionResult {
    let run = || -> crate::Result<(f64, f64, f64)> {
        let classical = protocols::run(&ProtocolParams::sqd(1.0, 1.0))?;
        let f_classical = metrics::polarization_fidelity(&classical)?.total;
        let (best_v3, best_f) = optimizer::optimize_sqd_over_sq3(1e-6, 33)?;
        Ok((f_classical, best_v3, best_f))
    };
    match run() {
        Ok((f_classical, best_v3, best_f)) => {
            let d1 = (f_classical - ONE_OVER_SQRT6).abs();
            let d2 = (best_f - SQRT_TWO_THIRDS).abs();
            let passed = d1 <= 1e-9 && d2 <= 1e-4 && best_v3 > 0.99;
            CriterionResult::asserted(
                "3",
                "sqd fidelity anchors",
                passed,
                format!(
                    "F(1,1) = {f_classical:.12} (|diff| = {d1:.2e}, tol 1e-9); \
                     sup over V_SQ3 = {best_f:.9} at V_SQ3 = {best_v3:.6} (|diff| = {d2:.2e}, tol 1e-4)"
                ),
            )
        }
        Err(e) => CriterionResult::asserted("3", "sqd fidelity anchors", false, e.to_string()),
    }
}

fn c04_sqd_oracle_grid() -> CriterionResult {
    let grid = sweeps::open_low_grid(0.05, 1.0, 20);
    let mut max_diff: f64 = 0.0;
    for &v in &grid {
        for &v3 in &grid {
            let f = protocols::run(&ProtocolParams::sqd(v, v3))
                .and_then(|o| metrics::polarization_fidelity(&o))
                .map(|r| r.total);
            let reference = ClosedForm::Sqd { v_sq: v, v_sq3: v3 }.eval();
            match (f, reference) {
                (Ok(f), Ok(r)) => max_diff = max_diff.max((f - r).abs()),
                _ => {
                    return CriterionResult::asserted(
                        "4",
                        "sqd oracle equivalence",
                        false,
                        format!("evaluation failed at ({v}, {v3})"),
                    )
                }
            }
        }
    }
    CriterionResult::asserted(
        "4",
        "sqd oracle equivalence",
        max_diff <= 1e-9,
        format!("max |sim − closed form| = {max_diff:.2e} over 20×20 grid (tol 1e-9)"),
    )
}

fn c05_bet_reduction() -> CriterionResult {
    let mut max_diff: f64 = 0.0;
    for (v_sq, v_sq3, gain) in [(0.5, 0.4, 1.0), (0.9, 1.0, 0.3), (0.2, 0.65, 2.5)] {
        let mut bet = ProtocolParams::bet(v_sq, v_sq3, Quadrature::Amplitude, 1.0, 0.0, 0.0);
        bet.gains.v_plus = gain;
        let mut sqd = ProtocolParams::sqd(v_sq, v_sq3);
        sqd.gains.v_plus = gain;
        let (b, s) = match (protocols::run(&bet), protocols::run(&sqd)) {
            (Ok(b), Ok(s)) => (b, s),
            _ => {
                return CriterionResult::asserted(
                    "5",
                    "bet reduces to sqd",
                    false,
                    "protocol run failed".into(),
                )
            }
        };
        for key in [
            QuadKey::HPlus,
            QuadKey::HMinus,
            QuadKey::VPlus,
            QuadKey::VMinus,
        ] {
            let rb = b.record(key);
            let rs = s.record(key);
            for (x, y) in [
                (rb.v_out_quiet, rs.v_out_quiet),
                (rb.signal_var_out, rs.signal_var_out),
                (rb.cov_quiet, rs.cov_quiet),
                (rb.signal_gain, rs.signal_gain),
            ] {
                max_diff = max_diff.max((x - y).abs());
            }
        }
    }
    CriterionResult::asserted(
        "5",
        "bet reduces to sqd",
        max_diff <= 1e-12,
        format!("max per-quadrature |diff| at (eps1, eps2) = (1, 0): {max_diff:.2e} (tol 1e-12)"),
    )
}

fn c06_bet_optimum() -> CriterionResult {
    match optimizer::optimize_bet(1e-4, 1e-4, BetRegime::BEST, 33) {
        Ok(best) => {
            let f = best.result.best_value;
            let vp = best.outcome.v_plus.v_out_quiet;
            let vm = best.outcome.v_minus.v_out_quiet;
            let f_ok = (0.935..=0.9428).contains(&f);
            let vp_ok = (1.8..=2.2).contains(&vp);
            let vm_ok = (0.45..=0.55).contains(&vm);
            CriterionResult::asserted(
                "6",
                "bet optimum near ideal squeezing",
                f_ok && vp_ok && vm_ok,
                format!(
                    "fidelity = {f:.6} (window [0.935, 0.9428]); vertical V+ = {vp:.4} \
                     (2 ± 10%), V− = {vm:.4} (0.5 ± 10%); eps1 = {:.4}, eps2 = {:.4}",
                    best.params.eps1, best.params.eps2
                ),
            )
        }
        Err(e) => CriterionResult::asserted(
            "6",
            "bet optimum near ideal squeezing",
            false,
            e.to_string(),
        ),
    }
}

fn c07_bet_dominance() -> CriterionResult {
    let grid = sweeps::closed_grid(0.05, 1.0, 20);
    let mut worst_margin = f64::INFINITY;
    for &v in &grid {
        let sqd = match (ClosedForm::Sqd { v_sq: v, v_sq3: v }).eval() {
            Ok(f) => f,
            Err(e) => {
                return CriterionResult::asserted("7", "bet dominates sqd", false, e.to_string())
            }
        };
        // Enumerate the two positive-polarity regimes; the amplitude-squeezed
        // one contains the SQD configuration as a seed point.
        let mut best = f64::NEG_INFINITY;
        for angle in [Quadrature::Phase, Quadrature::Amplitude] {
            let regime = BetRegime {
                sq3_angle: angle,
                positive_amp_gain: true,
            };
            match optimizer::optimize_bet(v, v, regime, 21) {
                Ok(o) => best = best.max(o.result.best_value),
                Err(e) => {
                    return CriterionResult::asserted(
                        "7",
                        "bet dominates sqd",
                        false,
                        e.to_string(),
                    )
                }
            }
        }
        worst_margin = worst_margin.min(best - sqd);
    }
    CriterionResult::asserted(
        "7",
        "bet dominates sqd",
        worst_margin >= -1e-12,
        format!("min (F_bet − F_sqd) over 20-point grid = {worst_margin:.3e} (must be >= 0)"),
    )
}

fn c08_tv_anchors() -> CriterionResult {
    let run = || -> crate::Result<(f64, f64, f64, f64, f64, f64)> {
        let mut reg = SourceRegistry::new();
        let mut input = OpticalMode::coherent(&mut reg, 10.0);
        input.add_signal(&mut reg, Quadrature::Amplitude, 1.0)?;
        input.add_signal(&mut reg, Quadrature::Phase, 1.0)?;
        let classical = protocols::quadrature_teleport(&mut reg, input, 1.0, 1.0, 1.0)?;
        let (t_classical, v_classical) = metrics::single_mode_tv(&classical)?;

        let twin = protocols::run(&ProtocolParams::twin(1e-6))?;
        let twin_point = metrics::tv_point(&twin, false, 1e-6, 1.0)?;

        let mut sqd = ProtocolParams::sqd(1e-6, 1e-6);
        sqd.gains.v_plus = 1e3;
        let sqd_outcome = protocols::run(&sqd)?;
        let sqd_point = metrics::tv_point(&sqd_outcome, false, 1e-6, 1e3)?;

        Ok((
            t_classical,
            v_classical,
            twin_point.t_q,
            twin_point.v_cv,
            sqd_point.t_q,
            sqd_point.v_cv,
        ))
    };
    match run() {
        Ok((tc, vc, tt, vt, ts, vs)) => {
            let passed = (tc - 2.0 / 3.0).abs() <= 1e-9
                && (vc - 2.0).abs() <= 1e-9
                && tt >= 3.99
                && vt <= 0.01
                && ts >= 2.99
                && vs <= 0.01;
            CriterionResult::asserted(
                "8",
                "t-v anchors",
                passed,
                format!(
                    "classical quad: (T_q, V_cv) = ({tc:.12}, {vc:.12}); \
                     twin ideal: ({tt:.6}, {vt:.2e}); sqd ideal gain 1e3: ({ts:.6}, {vs:.2e})"
                ),
            )
        }
        Err(e) => CriterionResult::asserted("8", "t-v anchors", false, e.to_string()),
    }
}

fn c09_gaussian_identity() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut max_diff: f64 = 0.0;
    for i in 0..200 {
        let v_sq: f64 = rng.gen_range(0.05..1.0);
        let v_sq3: f64 = rng.gen_range(0.05..1.0);
        let gain = |rng: &mut ChaCha8Rng| rng.gen_range(0.2..3.0);
        let scheme = i % 4;
        let params = match scheme {
            0 => {
                let mut p = ProtocolParams::twin(v_sq);
                p.gains.h_plus = gain(&mut rng);
                p.gains.h_minus = gain(&mut rng);
                p.gains.v_plus = gain(&mut rng);
                p.gains.v_minus = protocols::PhaseGain::Calibrated(gain(&mut rng));
                p
            }
            1 => {
                let mut p = ProtocolParams::sqd(v_sq, v_sq3);
                p.gains.h_plus = gain(&mut rng);
                p.gains.h_minus = gain(&mut rng);
                p.gains.v_plus = gain(&mut rng);
                p
            }
            2 => {
                let angle = if rng.gen_bool(0.5) {
                    Quadrature::Phase
                } else {
                    Quadrature::Amplitude
                };
                let e1: f64 = rng.gen_range(0.02..0.98);
                let e2: f64 = rng.gen_range(0.02..0.98);
                let gm: f64 = rng.gen_range(-3.0..3.0);
                let mut p = ProtocolParams::bet(v_sq, v_sq3, angle, e1, e2, gm);
                p.gains.h_plus = gain(&mut rng);
                p.gains.h_minus = gain(&mut rng);
                p.gains.v_plus = gain(&mut rng);
                p
            }
            _ => {
                let e1: f64 = rng.gen_range(0.02..0.98);
                let e2: f64 = rng.gen_range(0.02..0.98);
                let gm: f64 = rng.gen_range(-3.0..3.0);
                let mut p = ProtocolParams::optimized_twin(v_sq, e1, e2, gm);
                p.gains.h_plus = gain(&mut rng);
                p.gains.h_minus = gain(&mut rng);
                p.gains.v_plus = gain(&mut rng);
                p
            }
        };
        let outcome = match protocols::run(&params) {
            Ok(o) => o,
            Err(e) => {
                return CriterionResult::asserted(
                    "9",
                    "gaussian identity",
                    false,
                    format!("run failed: {e}"),
                )
            }
        };
        for (key, rec) in outcome.info_records(false) {
            let t = match transfer_coefficient(key, rec) {
                Ok(t) => t,
                Err(e) => {
                    return CriterionResult::asserted(
                        "9",
                        "gaussian identity",
                        false,
                        format!("transfer failed: {e}"),
                    )
                }
            };
            let lhs = conditional_variance(rec);
            let rhs = rec.v_out_quiet * (1.0 - t);
            max_diff = max_diff.max((lhs - rhs).abs());
        }
    }
    CriterionResult::asserted(
        "9",
        "gaussian identity",
        max_diff <= 1e-9,
        format!(
            "max |V_cv − V_out(1−T)| over 200 random configurations = {max_diff:.2e} (tol 1e-9)"
        ),
    )
}

fn c10_sqd_gain_properties() -> CriterionResult {
    let v_sq3 = 0.5;
    let gains: Vec<f64> = (0..25)
        .map(|i| 0.1 * (1000.0f64).powf(i as f64 / 24.0))
        .collect();
    let mut cv_min = f64::INFINITY;
    let mut cv_max = f64::NEG_INFINITY;
    let mut max_t_diff: f64 = 0.0;
    for &g in &gains {
        let mut params = ProtocolParams::sqd(0.5, v_sq3);
        params.gains.v_plus = g;
        let outcome = match protocols::run(&params) {
            Ok(o) => o,
            Err(e) => {
                return CriterionResult::asserted("10", "sqd gain properties", false, e.to_string())
            }
        };
        let cv = conditional_variance(&outcome.v_plus);
        cv_min = cv_min.min(cv);
        cv_max = cv_max.max(cv);
        let t = match transfer_coefficient(QuadKey::VPlus, &outcome.v_plus) {
            Ok(t) => t,
            Err(e) => {
                return CriterionResult::asserted("10", "sqd gain properties", false, e.to_string())
            }
        };
        // γ is the calibrated displacement gain; conventions that define the
        // modulator gain as γ/2 write the same curve as 4g²/(4g² + V).
        let gamma = g;
        let reference = gamma * gamma / (gamma * gamma + v_sq3);
        let half_gain = gamma / 2.0;
        let reference_half = 4.0 * half_gain * half_gain / (4.0 * half_gain * half_gain + v_sq3);
        max_t_diff = max_t_diff
            .max((t - reference).abs())
            .max((t - reference_half).abs());
    }
    let spread = cv_max - cv_min;
    CriterionResult::asserted(
        "10",
        "sqd gain properties",
        spread <= 1e-9 && max_t_diff <= 1e-9,
        format!(
            "V+_cv spread over gains [0.1, 100] = {spread:.2e} (tol 1e-9); \
             max |T+_V − γ²/(γ²+V)| = {max_t_diff:.2e} (tol 1e-9)"
        ),
    )
}

fn c11_stokes_properties() -> CriterionResult {
    // Coherent noise ball.
    let mut reg = SourceRegistry::new();
    let h = OpticalMode::coherent(&mut reg, 6.0);
    let v = OpticalMode::coherent(&mut reg, 8.0);
    let state = PolarizationState::new(h, v, 0.8).unwrap();
    let vs = stokes_variances(&state);
    let s0 = stokes_means(&state)[0];
    let ballyes = vs.iter().all(|&x| (x - s0).abs() <= 1e-9);

    // Vertical-carrier uncertainty equality.
    let mut reg = SourceRegistry::new();
    let h = OpticalMode::coherent(&mut reg, 0.0);
    let v = OpticalMode::coherent(&mut reg, 10.0);
    let state = PolarizationState::new(h, v, 0.0).unwrap();
    let stats = StokesStatistics::of(&state);
    let eq = (stats.variances[2] * stats.variances[3] - stats.means[1] * stats.means[1]).abs();

    // Formula equivalence on random states.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut max_diff: f64 = 0.0;
    for _ in 0..100 {
        let mut reg = SourceRegistry::new();
        let ah: f64 = rng.gen_range(0.0..20.0);
        let av: f64 = rng.gen_range(0.0..20.0);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let vh: f64 = rng.gen_range(0.1..10.0);
        let vv: f64 = rng.gen_range(0.1..10.0);
        let hp_c: f64 = rng.gen_range(0.0..5.0);
        let hm_c: f64 = rng.gen_range(0.0..5.0);
        let vp_c: f64 = rng.gen_range(0.0..5.0);
        let vm_c: f64 = rng.gen_range(0.0..5.0);
        let mut h = OpticalMode::squeezed(&mut reg, vh, Quadrature::Amplitude)
            .unwrap()
            .with_carrier(ah);
        h.add_signal(&mut reg, Quadrature::Amplitude, hp_c).unwrap();
        h.add_signal(&mut reg, Quadrature::Phase, hm_c).unwrap();
        let mut v = OpticalMode::squeezed(&mut reg, vv, Quadrature::Amplitude)
            .unwrap()
            .with_carrier(av);
        v.add_signal(&mut reg, Quadrature::Amplitude, vp_c).unwrap();
        v.add_signal(&mut reg, Quadrature::Phase, vm_c).unwrap();
        let state = PolarizationState::new(h, v, theta).unwrap();
        let got = stokes_variances(&state);
        let want = stokes_variances_reference(
            ah,
            av,
            theta,
            ModeVariances {
                plus_quantum: vh,
                minus_quantum: 1.0 / vh,
                plus_classical: hp_c,
                minus_classical: hm_c,
            },
            ModeVariances {
                plus_quantum: vv,
                minus_quantum: 1.0 / vv,
                plus_classical: vp_c,
                minus_classical: vm_c,
            },
            ClassicalCross::default(),
        );
        for (g, w) in got.iter().zip(want.iter()) {
            max_diff = max_diff.max((g - w).abs() / (1.0 + w.abs()));
        }
    }

    CriterionResult::asserted(
        "11",
        "stokes properties",
        ballyes && eq <= 1e-6 && max_diff <= 1e-9,
        format!(
            "coherent ball isotropic: {ballyes}; |V_S2·V_S3 − <S1>²| = {eq:.2e} (tol 1e-6); \
             max relative formula mismatch over 100 states = {max_diff:.2e} (tol 1e-9)"
        ),
    )
}

fn c12_structural_properties() -> CriterionResult {
    // Symplectic preservation through random passive networks.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut max_dev: f64 = 0.0;
    for _ in 0..1000 {
        let mut reg = SourceRegistry::new();
        let n_modes = rng.gen_range(2..=4);
        let mut modes: Vec<(FluctuationVector, FluctuationVector)> = (0..n_modes)
            .map(|_| {
                let (x, p) = reg.quantum_pair();
                let v: f64 = rng.gen_range(0.05..1.0);
                (
                    FluctuationVector::of(x, v.sqrt()),
                    FluctuationVector::of(p, 1.0 / v.sqrt()),
                )
            })
            .collect();
        for _ in 0..rng.gen_range(1..=10) {
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..n_modes);
                let mut j = rng.gen_range(0..n_modes);
                while j == i {
                    j = rng.gen_range(0..n_modes);
                }
                let eps: f64 = rng.gen_range(0.0..=1.0);
                let (t, r) = (eps.sqrt(), (1.0 - eps).sqrt());
                let a = modes[i].clone();
                let b = modes[j].clone();
                modes[i] = (
                    linear_combination(&[(t, &a.0), (r, &b.0)]),
                    linear_combination(&[(t, &a.1), (r, &b.1)]),
                );
                modes[j] = (
                    linear_combination(&[(r, &a.0), (-t, &b.0)]),
                    linear_combination(&[(r, &a.1), (-t, &b.1)]),
                );
            } else {
                let i = rng.gen_range(0..n_modes);
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let (c, s) = (phi.cos(), phi.sin());
                let (x, p) = modes[i].clone();
                modes[i] = (
                    linear_combination(&[(c, &x), (-s, &p)]),
                    linear_combination(&[(s, &x), (c, &p)]),
                );
            }
        }
        for (x, p) in &modes {
            max_dev = max_dev.max((symplectic_product(x, p) - 1.0).abs());
        }
    }

    // In-process determinism of a representative sweep.
    let grid = sweeps::closed_grid(0.1, 1.0, 5);
    let opts = SweepOptions {
        v_sq3: Sq3Choice::Fixed(1.0),
        ..SweepOptions::default()
    };
    let run_once = || -> String {
        let rows = sweeps::fidelity_sweep(Scheme::Sqd, &grid, &opts).unwrap();
        rows.iter()
            .map(|r| format!("{:.17e},{:.17e}", r.v_sq, r.fidelity))
            .collect::<Vec<_>>()
            .join(";")
    };
    let deterministic = run_once() == run_once();

    CriterionResult::asserted(
        "12",
        "structural properties",
        max_dev <= 1e-12 && deterministic,
        format!(
            "max |symplectic − 1| over 1000 random networks = {max_dev:.2e} (tol 1e-12); \
             repeated sweep bytes identical: {deterministic}"
        ),
    )
}

fn r01_four_sq_agreement() -> CriterionResult {
    // Agreement mask between the simulated optimized-twin vertical factor and
    // the magnitude-continued four-squeezer expression, over a coarse grid.
    let mut agree = 0usize;
    let mut total = 0usize;
    let mut undefined = 0usize;
    let mut max_diff: f64 = 0.0;
    for v in [0.3, 0.5, 0.8] {
        for e1 in [0.2, 0.4, 0.6, 0.8] {
            for e2 in [0.1, 0.3, 0.5, 0.7] {
                total += 1;
                let g = vertical_phase_gain_minimizer(v, e1, e2);
                let params = ProtocolParams::optimized_twin(v, e1, e2, g);
                let Ok(outcome) = protocols::run(&params) else {
                    undefined += 1;
                    continue;
                };
                let Ok(sim) = metrics::fidelity_unity_gain(
                    outcome.v_plus.v_out_quiet,
                    outcome.v_minus.v_out_quiet,
                ) else {
                    undefined += 1;
                    continue;
                };
                match four_sq_magnitude(v, e1, e2) {
                    Some(reference) => {
                        let diff = (sim - reference).abs();
                        max_diff = max_diff.max(diff);
                        if diff <= 1e-3 {
                            agree += 1;
                        }
                    }
                    None => undefined += 1,
                }
            }
        }
    }
    CriterionResult::report_only(
        "R1",
        "four-squeezer reference (flagged, non-asserted)",
        format!(
            "magnitude-continued expression vs simulated vertical factor: \
             {agree}/{total} agree within 1e-3 (max |diff| = {max_diff:.2e}), {undefined} undefined; \
             as printed the expression is out of its real domain there, so the \
             comparison carries no pass/fail weight"
        ),
    )
}

/// Exact minimiser of the vertical phase variance over the raw phase gain
/// (the variance is a parabola in the gain; three evaluations pin it).
fn vertical_phase_gain_minimizer(v: f64, e1: f64, e2: f64) -> f64 {
    let eval = |g: f64| -> f64 {
        protocols::run(&ProtocolParams::optimized_twin(v, e1, e2, g))
            .map(|o| o.v_minus.v_out_quiet)
            .unwrap_or(f64::INFINITY)
    };
    let (f_m, f_0, f_p) = (eval(-1.0), eval(0.0), eval(1.0));
    let a = 0.5 * (f_p + f_m) - f_0;
    let b = 0.5 * (f_p - f_m);
    if a <= 0.0 {
        return 0.0;
    }
    -b / (2.0 * a)
}

fn r02_scheme_comparison() -> CriterionResult {
    let mut lines = Vec::new();
    for v in [0.5, 0.9] {
        let sqd = ClosedForm::Sqd { v_sq: v, v_sq3: v }.eval().unwrap();
        let bet = optimizer::optimize_bet(v, v, BetRegime::BEST, 17)
            .map(|o| o.result.best_value)
            .unwrap_or(f64::NAN);
        let opt_twin = optimizer::optimize_optimized_twin(v, 17)
            .map(|o| o.result.best_value)
            .unwrap_or(f64::NAN);
        lines.push(format!(
            "v_sq = {v}: sqd {sqd:.4}, bet {bet:.4}, optimized-twin {opt_twin:.4}"
        ));
    }
    CriterionResult::report_only(
        "R2",
        "scheme comparison at moderate squeezing (non-asserted)",
        lines.join("; "),
    )
}

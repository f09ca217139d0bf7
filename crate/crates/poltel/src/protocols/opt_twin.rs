//! Twin topology with variable beamsplitter ratios on the vertical arm.
//!
//! All four squeezer variances are equal and each entangled pair is built from
//! two beams squeezed 90 degrees apart. The horizontal arm keeps the balanced
//! layout (optimal when both of its quadratures must be reconstructed at unity
//! gain); the vertical arm exposes `eps1`, `eps2` and a free phase gain, since
//! the vertical phase quadrature carries no polarisation information.

use crate::error::Result;
use crate::fluct::SourceRegistry;
use crate::optics::{OpticalMode, Quadrature};
use crate::protocols::core::{teleporter_core, CoreConfig};
use crate::protocols::quad::quadrature_teleport;
use crate::protocols::{ProtocolParams, Scheme, TeleportOutcome};
use crate::stokes::PolarizationState;

pub fn optimized_twin_teleport(
    reg: &mut SourceRegistry,
    input: PolarizationState,
    params: &ProtocolParams,
) -> Result<TeleportOutcome> {
    let input_copy = input.clone();
    let g = &params.gains;

    let h_arm = quadrature_teleport(reg, input.h, params.v_sq_epr, g.h_plus, g.h_minus)?;

    let res_a = OpticalMode::squeezed(reg, params.v_sq_epr, Quadrature::Phase)?;
    let res_b = OpticalMode::squeezed(reg, params.v_sq_epr, Quadrature::Amplitude)?;
    let v_out = teleporter_core(
        reg,
        input.v,
        res_a,
        res_b,
        &CoreConfig {
            eps1: params.eps1,
            eps2: params.eps2,
            amp_gain: g.v_plus,
            phase_gain: g.v_minus,
        },
    )?;

    let output = PolarizationState {
        h: h_arm.output,
        v: v_out,
        theta: input_copy.theta,
    };
    Ok(TeleportOutcome::from_states(
        Scheme::OptimizedTwin,
        input_copy,
        output,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{run, PhaseGain, QuadKey, SignalSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn balanced_settings_reduce_to_the_twin_scheme() {
        for v in [0.2, 0.5, 1.0] {
            let mut opt = ProtocolParams::optimized_twin(v, 0.5, 0.5, 0.0);
            opt.gains.v_minus = PhaseGain::Calibrated(1.0);
            opt.signal = SignalSpec {
                v_minus: 1.0,
                ..SignalSpec::default()
            };
            let twin = ProtocolParams::twin(v);
            let a = run(&opt).unwrap();
            let b = run(&twin).unwrap();
            for key in [
                QuadKey::HPlus,
                QuadKey::HMinus,
                QuadKey::VPlus,
                QuadKey::VMinus,
            ] {
                let ra = a.record(key);
                let rb = b.record(key);
                assert_abs_diff_eq!(ra.v_out_quiet, rb.v_out_quiet, epsilon = 1e-12);
                assert_abs_diff_eq!(ra.signal_gain, rb.signal_gain, epsilon = 1e-12);
                assert_abs_diff_eq!(ra.cov_quiet, rb.cov_quiet, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn matched_diagonal_cancels_antisqueezed_amplitude_noise() {
        // With eps1 = eps2 the vertical amplitude picks up only the squeezed
        // resource: V+ = 1 + v/(1−eps).
        for eps in [0.1, 0.3] {
            let v = 0.04;
            let params = ProtocolParams::optimized_twin(v, eps, eps, 0.0);
            let outcome = run(&params).unwrap();
            assert_abs_diff_eq!(
                outcome.v_plus.v_out_quiet,
                1.0 + v / (1.0 - eps),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn theta_and_carriers_preserved() {
        let mut params = ProtocolParams::optimized_twin(0.5, 0.4, 0.3, 0.5);
        params.input.theta = 1.2;
        let outcome = run(&params).unwrap();
        assert_abs_diff_eq!(outcome.output.theta, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(outcome.output.alpha_v(), 10.0, epsilon = 1e-12);
    }
}

//! Twin-teleporter scheme: one standard quadrature teleporter per
//! polarisation mode, consuming four squeezed beams in total.

use crate::error::{Error, Result};
use crate::fluct::SourceRegistry;
use crate::protocols::quad::quadrature_teleport;
use crate::protocols::{PhaseGain, ProtocolParams, Scheme, TeleportOutcome};
use crate::stokes::PolarizationState;

pub fn twin_teleport(
    reg: &mut SourceRegistry,
    input: PolarizationState,
    params: &ProtocolParams,
) -> Result<TeleportOutcome> {
    let g = &params.gains;
    let v_minus = match g.v_minus {
        PhaseGain::Calibrated(c) => c,
        PhaseGain::Raw(_) => {
            return Err(Error::param(
                "gains.v_minus",
                "the twin scheme reconstructs the vertical phase quadrature and needs a calibrated gain",
            ))
        }
    };
    let h_arm = quadrature_teleport(reg, input.h.clone(), params.v_sq_epr, g.h_plus, g.h_minus)?;
    let v_arm = quadrature_teleport(reg, input.v.clone(), params.v_sq_epr, g.v_plus, v_minus)?;
    let output = PolarizationState {
        h: h_arm.output,
        v: v_arm.output,
        theta: input.theta,
    };
    Ok(TeleportOutcome::from_states(Scheme::Twin, input, output))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{build_input, run, ProtocolParams};
    use approx::assert_abs_diff_eq;

    #[test]
    fn no_squeezing_gives_three_units_per_quadrature() {
        let outcome = run(&ProtocolParams::twin(1.0)).unwrap();
        for rec in [
            &outcome.h_plus,
            &outcome.h_minus,
            &outcome.v_plus,
            &outcome.v_minus,
        ] {
            assert_abs_diff_eq!(rec.v_out_quiet, 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(rec.signal_gain, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn squeezing_shrinks_every_output_quadrature() {
        let outcome = run(&ProtocolParams::twin(0.25)).unwrap();
        for rec in [&outcome.h_plus, &outcome.v_minus] {
            assert_abs_diff_eq!(rec.v_out_quiet, 1.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn carriers_and_theta_replicated() {
        let mut params = ProtocolParams::twin(0.5);
        params.input.theta = 0.9;
        let outcome = run(&params).unwrap();
        assert_abs_diff_eq!(outcome.output.alpha_h(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.output.alpha_v(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.output.theta, 0.9, epsilon = 1e-15);
    }

    #[test]
    fn raw_phase_gain_rejected() {
        let mut params = ProtocolParams::twin(0.5);
        params.gains.v_minus = PhaseGain::Raw(0.3);
        let mut reg = SourceRegistry::new();
        let input = build_input(&mut reg, &params).unwrap();
        assert!(twin_teleport(&mut reg, input, &params).is_err());
    }
}

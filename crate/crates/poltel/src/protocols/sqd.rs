//! Single-quadrature-detection scheme: the bright vertical mode is directly
//! detected and its photocurrent drives an amplitude modulator on a squeezed
//! beam, while a quadrature teleporter carries the horizontal fluctuations.
//! Only three squeezed beams are consumed.

use crate::error::{Error, Result};
use crate::fluct::SourceRegistry;
use crate::optics::{detect, modulate, Detection, OpticalMode, Quadrature};
use crate::protocols::quad::quadrature_teleport;
use crate::protocols::{ProtocolParams, Scheme, TeleportOutcome, DARK_CARRIER_TOL};
use crate::stokes::PolarizationState;

pub fn sqd_teleport(
    reg: &mut SourceRegistry,
    input: PolarizationState,
    params: &ProtocolParams,
) -> Result<TeleportOutcome> {
    if input.alpha_h().abs() > DARK_CARRIER_TOL {
        return Err(Error::param(
            "alpha_h",
            format!(
                "the SQD scheme needs a vertical carrier (alpha_h = 0), got {}",
                input.alpha_h()
            ),
        ));
    }
    let input_copy = input.clone();
    let g = &params.gains;

    let photocurrent = detect(input.v, Detection::Direct)?;
    let sq3 = OpticalMode::squeezed(reg, params.v_sq3, params.sq3_angle)?;
    let v_out = modulate(sq3, Quadrature::Amplitude, g.v_plus, &photocurrent)
        .with_carrier(g.v_plus * input_copy.alpha_v());

    let h_arm = quadrature_teleport(reg, input.h, params.v_sq_epr, g.h_plus, g.h_minus)?;

    let output = PolarizationState {
        h: h_arm.output,
        v: v_out,
        theta: input_copy.theta,
    };
    Ok(TeleportOutcome::from_states(
        Scheme::Sqd,
        input_copy,
        output,
    ))
}

#[cfg(test)]
mod tests {
    use crate::protocols::{run, ProtocolParams};
    use approx::assert_abs_diff_eq;

    #[test]
    fn vertical_output_variances_at_unity_gain() {
        let outcome = run(&ProtocolParams::sqd(0.5, 0.4)).unwrap();
        // V+_out = V_SQ3 + V+_V,in ; V-_out = 1 / V_SQ3.
        assert_abs_diff_eq!(outcome.v_plus.v_out_quiet, 0.4 + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.v_minus.v_out_quiet, 1.0 / 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.v_plus.signal_gain, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn horizontal_arm_is_a_standard_teleporter() {
        let outcome = run(&ProtocolParams::sqd(0.5, 1.0)).unwrap();
        assert_abs_diff_eq!(outcome.h_plus.v_out_quiet, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.h_minus.v_out_quiet, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn horizontal_carrier_rejected() {
        let mut params = ProtocolParams::sqd(0.5, 0.5);
        params.input.alpha_h = 1.0;
        assert!(run(&params).is_err());
    }

    #[test]
    fn output_carrier_stays_vertical() {
        let outcome = run(&ProtocolParams::sqd(0.5, 0.5)).unwrap();
        assert_eq!(outcome.output.alpha_h(), 0.0);
        assert_abs_diff_eq!(outcome.output.alpha_v(), 20.0, epsilon = 1e-12);
    }

    #[test]
    fn vertical_conditional_variance_is_sq3_noise_at_any_gain() {
        for g in [0.1, 1.0, 7.0, 100.0] {
            let mut params = ProtocolParams::sqd(0.5, 0.3);
            params.gains.v_plus = g;
            let outcome = run(&params).unwrap();
            let rec = &outcome.v_plus;
            let v_cv = rec.v_out_quiet - rec.cov_quiet * rec.cov_quiet / rec.v_in_quiet;
            assert_abs_diff_eq!(v_cv, 0.3, epsilon = 1e-9);
        }
    }
}

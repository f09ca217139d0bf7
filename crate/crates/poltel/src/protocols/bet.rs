//! Biased-entanglement teleporter: the third squeezed beam is split with
//! vacuum on a variable beamsplitter `eps1`; one output is the reconstruction
//! beam, the other is mixed with the vertical input on `eps2` and measured.
//! Setting `eps1 = 1`, `eps2 = 0` recovers the SQD scheme exactly.

use crate::error::{Error, Result};
use crate::fluct::SourceRegistry;
use crate::optics::OpticalMode;
use crate::protocols::core::{teleporter_core, CoreConfig};
use crate::protocols::quad::quadrature_teleport;
use crate::protocols::{ProtocolParams, Scheme, TeleportOutcome, DARK_CARRIER_TOL};
use crate::stokes::PolarizationState;

pub fn bet_teleport(
    reg: &mut SourceRegistry,
    input: PolarizationState,
    params: &ProtocolParams,
) -> Result<TeleportOutcome> {
    if input.alpha_h().abs() > DARK_CARRIER_TOL {
        return Err(Error::param(
            "alpha_h",
            format!(
                "the BET scheme needs a vertical carrier (alpha_h = 0), got {}",
                input.alpha_h()
            ),
        ));
    }
    let input_copy = input.clone();
    let g = &params.gains;

    let sq3 = OpticalMode::squeezed(reg, params.v_sq3, params.sq3_angle)?;
    let vac = OpticalMode::vacuum(reg);
    let v_out = teleporter_core(
        reg,
        input.v,
        sq3,
        vac,
        &CoreConfig {
            eps1: params.eps1,
            eps2: params.eps2,
            amp_gain: g.v_plus,
            phase_gain: g.v_minus,
        },
    )?;

    let h_arm = quadrature_teleport(reg, input.h, params.v_sq_epr, g.h_plus, g.h_minus)?;

    let output = PolarizationState {
        h: h_arm.output,
        v: v_out,
        theta: input_copy.theta,
    };
    Ok(TeleportOutcome::from_states(
        Scheme::Bet,
        input_copy,
        output,
    ))
}

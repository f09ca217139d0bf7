//! Standard single-mode quadrature teleporter.

use crate::error::{Error, Result};
use crate::fluct::SourceRegistry;
use crate::optics::{OpticalMode, Quadrature};
use crate::protocols::core::{teleporter_core, CoreConfig};
use crate::protocols::{PhaseGain, QuadratureRecord, SingleModeOutcome};

/// Teleport one optical mode using an entangled pair made from two beams
/// squeezed to variance `v_sq`. At unity gains the output variances are
/// `V±_out = V±_in + 2·v_sq`.
pub fn quadrature_teleport(
    reg: &mut SourceRegistry,
    input: OpticalMode,
    v_sq: f64,
    gain_plus: f64,
    gain_minus: f64,
) -> Result<SingleModeOutcome> {
    if !(v_sq > 0.0 && v_sq <= 1.0) {
        return Err(Error::param(
            "v_sq",
            format!("entanglement squeezing must lie in (0, 1], got {v_sq}"),
        ));
    }
    let res_a = OpticalMode::squeezed(reg, v_sq, Quadrature::Phase)?;
    let res_b = OpticalMode::squeezed(reg, v_sq, Quadrature::Amplitude)?;
    let input_copy = input.clone();
    let output = teleporter_core(
        reg,
        input,
        res_a,
        res_b,
        &CoreConfig {
            eps1: 0.5,
            eps2: 0.5,
            amp_gain: gain_plus,
            phase_gain: PhaseGain::Calibrated(gain_minus),
        },
    )?;
    let plus = QuadratureRecord::between(&input_copy.x_plus, &output.x_plus);
    let minus = QuadratureRecord::between(&input_copy.x_minus, &output.x_minus);
    Ok(SingleModeOutcome {
        input: input_copy,
        output,
        plus,
        minus,
    })
}

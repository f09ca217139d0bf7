//! Shared teleporter topology used by every scheme.
//!
//! Two resource beams interfere on a beamsplitter `eps1`; one output becomes
//! the reconstruction beam, the other is mixed with the input on a second
//! beamsplitter `eps2`. Amplitude homodyne reads the port that carries the
//! input with weight `sqrt(1 − eps2)`, phase homodyne reads the other port,
//! and both photocurrents are fed forward onto the reconstruction beam.

use crate::error::{Error, Result};
use crate::fluct::SourceRegistry;
use crate::optics::{beamsplitter, detect, modulate, Detection, OpticalMode, Quadrature};
use crate::protocols::PhaseGain;

pub(crate) struct CoreConfig {
    pub eps1: f64,
    pub eps2: f64,
    /// Calibrated amplitude gain: 1.0 reproduces the input signal coefficient.
    pub amp_gain: f64,
    pub phase_gain: PhaseGain,
}

pub(crate) fn teleporter_core(
    _reg: &mut SourceRegistry,
    input: OpticalMode,
    res_a: OpticalMode,
    res_b: OpticalMode,
    cfg: &CoreConfig,
) -> Result<OpticalMode> {
    let input_carrier = input.carrier;
    let (out_beam, meas_beam) = beamsplitter(res_a, res_b, cfg.eps1)?;
    // minus_port = sqrt(eps2)·input + sqrt(1−eps2)·meas
    // plus_port  = sqrt(1−eps2)·input − sqrt(eps2)·meas
    let (minus_port, plus_port) = beamsplitter(input, meas_beam, cfg.eps2)?;
    let i_plus = detect(plus_port, Detection::AmplitudeHomodyne)?;
    let i_minus = detect(minus_port, Detection::PhaseHomodyne)?;

    let input_weight_plus = (1.0 - cfg.eps2).sqrt();
    if input_weight_plus == 0.0 {
        return Err(Error::param(
            "eps2",
            "calibrated amplitude gain is undefined at eps2 = 1 (no input reaches the amplitude detector)",
        ));
    }
    let g_plus_raw = cfg.amp_gain / input_weight_plus;
    let g_minus_raw = match cfg.phase_gain {
        PhaseGain::Raw(g) => g,
        PhaseGain::Calibrated(c) => {
            let input_weight_minus = cfg.eps2.sqrt();
            if input_weight_minus == 0.0 {
                return Err(Error::param(
                    "eps2",
                    "calibrated phase gain is undefined at eps2 = 0 (no input reaches the phase detector)",
                ));
            }
            c / input_weight_minus
        }
    };

    let out = modulate(out_beam, Quadrature::Amplitude, g_plus_raw, &i_plus);
    let mut out = modulate(out, Quadrature::Phase, g_minus_raw, &i_minus);
    // Unity-gain reconstruction replicates the classical amplitude.
    out.carrier = cfg.amp_gain * input_carrier;
    Ok(out)
}

//! End-to-end simulations of the four polarisation teleportation schemes.
//!
//! Each run builds a private [`SourceRegistry`], constructs the input state,
//! wires the optical network, and returns a [`TeleportOutcome`] that keeps the
//! input's fluctuation vectors alive so input–output correlations remain
//! computable. The polarising beamsplitters that split and recombine the H and
//! V arms on the optical table are implicit in the two-mode representation.

mod bet;
mod core;
mod opt_twin;
mod quad;
mod sqd;
mod twin;

pub use bet::bet_teleport;
pub use opt_twin::optimized_twin_teleport;
pub use quad::quadrature_teleport;
pub use sqd::sqd_teleport;
pub use twin::twin_teleport;

use crate::error::{Error, Result};
use crate::fluct::{FluctuationVector, SourceRegistry};
use crate::optics::{OpticalMode, Quadrature};
use crate::stokes::PolarizationState;
use serde::Serialize;

/// Tolerance below which a carrier amplitude counts as dark.
pub const DARK_CARRIER_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Two standard quadrature teleporters, one per polarisation mode.
    Twin,
    /// Direct detection of the bright vertical quadrature plus one quadrature
    /// teleporter for the horizontal fluctuations.
    Sqd,
    /// Biased entanglement from a single squeezed beam on the vertical arm.
    Bet,
    /// Twin topology with variable beamsplitter ratios on the vertical arm.
    OptimizedTwin,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Twin => "twin",
            Scheme::Sqd => "sqd",
            Scheme::Bet => "bet",
            Scheme::OptimizedTwin => "optimized-twin",
        }
    }

    /// Quadratures that carry polarisation information for this scheme.
    /// Twin reconstructs all four; the vertical-carrier schemes leave the
    /// vertical phase quadrature out of the information budget.
    pub fn info_quadratures(self) -> &'static [QuadKey] {
        match self {
            Scheme::Twin => &[
                QuadKey::HPlus,
                QuadKey::HMinus,
                QuadKey::VPlus,
                QuadKey::VMinus,
            ],
            Scheme::Sqd | Scheme::Bet | Scheme::OptimizedTwin => {
                &[QuadKey::HPlus, QuadKey::HMinus, QuadKey::VPlus]
            }
        }
    }

    /// Best fidelity attainable without squeezing.
    pub fn classical_fidelity_limit(self) -> f64 {
        match self {
            Scheme::Twin => 0.25,
            // Three reconstructed quadratures: 1/sqrt(6).
            Scheme::Sqd | Scheme::Bet | Scheme::OptimizedTwin => 1.0 / 6.0f64.sqrt(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "twin" => Ok(Scheme::Twin),
            "sqd" => Ok(Scheme::Sqd),
            "bet" => Ok(Scheme::Bet),
            "optimized-twin" | "opt-twin" => Ok(Scheme::OptimizedTwin),
            other => Err(Error::param(
                "scheme",
                format!("unknown scheme `{other}` (expected twin|sqd|bet|optimized-twin)"),
            )),
        }
    }
}

/// One of the four polarisation quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadKey {
    HPlus,
    HMinus,
    VPlus,
    VMinus,
}

impl std::fmt::Display for QuadKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            QuadKey::HPlus => "H+",
            QuadKey::HMinus => "H-",
            QuadKey::VPlus => "V+",
            QuadKey::VMinus => "V-",
        };
        f.write_str(s)
    }
}

/// Feedforward gain on a quadrature that carries no information: either still
/// calibrated to signal transfer, or a raw electro-optic gain chosen to
/// minimise reconstruction noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseGain {
    /// 1.0 means unity signal transfer on that quadrature.
    Calibrated(f64),
    /// Raw displacement gain applied to the photocurrent.
    Raw(f64),
}

/// Calibrated feedforward gains: 1.0 means unity signal gain wherever a signal
/// is defined. Some modulator conventions define their gain `g` as half the
/// displacement gain used here; under that convention the vertical transfer
/// coefficient reads `4g²/(4g² + V)` instead of `γ²/(γ² + V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    pub h_plus: f64,
    pub h_minus: f64,
    pub v_plus: f64,
    pub v_minus: PhaseGain,
}

impl Gains {
    pub fn unity() -> Self {
        Gains {
            h_plus: 1.0,
            h_minus: 1.0,
            v_plus: 1.0,
            v_minus: PhaseGain::Calibrated(1.0),
        }
    }
}

/// Classical modulation variances applied to the input quadratures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalSpec {
    pub h_plus: f64,
    pub h_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec {
            h_plus: 1.0,
            h_minus: 1.0,
            v_plus: 1.0,
            v_minus: 0.0,
        }
    }
}

/// Input carrier configuration. Schemes that require a vertical carrier take
/// the state pre-rotated; the polarisation control loop that would do the
/// rotation in hardware is modelled as ideal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputSpec {
    pub alpha_h: f64,
    pub alpha_v: f64,
    pub theta: f64,
}

/// Full configuration of one protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolParams {
    pub scheme: Scheme,
    /// Squeezed-quadrature variance of the entanglement resources, in (0, 1].
    pub v_sq_epr: f64,
    /// Squeezed-quadrature variance of the third beam, in (0, 1].
    pub v_sq3: f64,
    /// Which quadrature of the third beam is squeezed.
    pub sq3_angle: Quadrature,
    pub eps1: f64,
    pub eps2: f64,
    pub gains: Gains,
    pub signal: SignalSpec,
    pub input: InputSpec,
}

impl ProtocolParams {
    pub fn twin(v_sq: f64) -> Self {
        ProtocolParams {
            scheme: Scheme::Twin,
            v_sq_epr: v_sq,
            v_sq3: v_sq,
            sq3_angle: Quadrature::Amplitude,
            eps1: 0.5,
            eps2: 0.5,
            gains: Gains {
                v_minus: PhaseGain::Calibrated(1.0),
                ..Gains::unity()
            },
            signal: SignalSpec {
                v_minus: 1.0,
                ..SignalSpec::default()
            },
            input: InputSpec {
                alpha_h: 10.0,
                alpha_v: 10.0,
                theta: 0.0,
            },
        }
    }

    pub fn sqd(v_sq: f64, v_sq3: f64) -> Self {
        ProtocolParams {
            scheme: Scheme::Sqd,
            v_sq_epr: v_sq,
            v_sq3,
            sq3_angle: Quadrature::Amplitude,
            eps1: 1.0,
            eps2: 0.0,
            gains: Gains::unity(),
            signal: SignalSpec::default(),
            input: InputSpec {
                alpha_h: 0.0,
                alpha_v: 20.0,
                theta: 0.0,
            },
        }
    }

    pub fn bet(
        v_sq: f64,
        v_sq3: f64,
        sq3_angle: Quadrature,
        eps1: f64,
        eps2: f64,
        g_minus: f64,
    ) -> Self {
        ProtocolParams {
            scheme: Scheme::Bet,
            v_sq_epr: v_sq,
            v_sq3,
            sq3_angle,
            eps1,
            eps2,
            gains: Gains {
                v_minus: PhaseGain::Raw(g_minus),
                ..Gains::unity()
            },
            signal: SignalSpec::default(),
            input: InputSpec {
                alpha_h: 0.0,
                alpha_v: 20.0,
                theta: 0.0,
            },
        }
    }

    pub fn optimized_twin(v_sq: f64, eps1: f64, eps2: f64, g_minus: f64) -> Self {
        ProtocolParams {
            scheme: Scheme::OptimizedTwin,
            v_sq_epr: v_sq,
            v_sq3: v_sq,
            sq3_angle: Quadrature::Amplitude,
            eps1,
            eps2,
            gains: Gains {
                v_minus: PhaseGain::Raw(g_minus),
                ..Gains::unity()
            },
            signal: SignalSpec::default(),
            input: InputSpec {
                alpha_h: 10.0,
                alpha_v: 10.0,
                theta: 0.0,
            },
        }
    }

    /// Multiply every information-quadrature gain by `g` (used by gain sweeps).
    pub fn with_gain_multiplier(mut self, g: f64) -> Self {
        self.gains.h_plus *= g;
        self.gains.h_minus *= g;
        self.gains.v_plus *= g;
        if self.scheme == Scheme::Twin {
            if let PhaseGain::Calibrated(c) = self.gains.v_minus {
                self.gains.v_minus = PhaseGain::Calibrated(c * g);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_sq_epr > 0.0 && self.v_sq_epr <= 1.0) {
            return Err(Error::param(
                "v_sq_epr",
                format!("must lie in (0, 1], got {}", self.v_sq_epr),
            ));
        }
        let uses_sq3 = matches!(self.scheme, Scheme::Sqd | Scheme::Bet);
        if uses_sq3 && !(self.v_sq3 > 0.0 && self.v_sq3 <= 1.0) {
            return Err(Error::param(
                "v_sq3",
                format!("must lie in (0, 1], got {}", self.v_sq3),
            ));
        }
        let uses_eps = matches!(self.scheme, Scheme::Bet | Scheme::OptimizedTwin);
        if uses_eps {
            for (name, eps) in [("eps1", self.eps1), ("eps2", self.eps2)] {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::param(
                        if name == "eps1" { "eps1" } else { "eps2" },
                        format!("must lie in [0, 1], got {eps}"),
                    ));
                }
            }
        }
        for v in [
            self.signal.h_plus,
            self.signal.h_minus,
            self.signal.v_plus,
            self.signal.v_minus,
        ] {
            if v < 0.0 {
                return Err(Error::param(
                    "signal",
                    format!("variances must be >= 0, got {v}"),
                ));
            }
        }
        if matches!(self.scheme, Scheme::Sqd | Scheme::Bet)
            && self.input.alpha_h.abs() > DARK_CARRIER_TOL
        {
            return Err(Error::param(
                "alpha_h",
                format!(
                    "{} requires a vertical carrier (alpha_h = 0), got {}",
                    self.scheme.name(),
                    self.input.alpha_h
                ),
            ));
        }
        Ok(())
    }
}

/// Per-quadrature bookkeeping tying the output back to the input.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureRecord {
    /// Quantum ("no signal") part of the input variance.
    pub v_in_quiet: f64,
    /// Classical modulation variance at the input.
    pub signal_var_in: f64,
    /// Quantum part of the output variance.
    pub v_out_quiet: f64,
    /// Classical modulation variance at the output.
    pub signal_var_out: f64,
    /// Quantum covariance between input and output fluctuations.
    pub cov_quiet: f64,
    /// Achieved classical signal gain (quantum-path gain when no signal).
    pub signal_gain: f64,
}

impl QuadratureRecord {
    pub fn between(input: &FluctuationVector, output: &FluctuationVector) -> Self {
        let v_in_quiet = input.quantum_variance();
        let signal_var_in = input.classical_variance();
        let signal_gain = if signal_var_in > 0.0 {
            input.classical_covariance(output) / signal_var_in
        } else if v_in_quiet > 0.0 {
            input.quantum_covariance(output) / v_in_quiet
        } else {
            0.0
        };
        QuadratureRecord {
            v_in_quiet,
            signal_var_in,
            v_out_quiet: output.quantum_variance(),
            signal_var_out: output.classical_variance(),
            cov_quiet: input.quantum_covariance(output),
            signal_gain,
        }
    }

    pub fn v_in(&self) -> f64 {
        self.v_in_quiet + self.signal_var_in
    }

    pub fn v_out(&self) -> f64 {
        self.v_out_quiet + self.signal_var_out
    }
}

/// Result of one polarisation teleportation run. Input and output states share
/// a source registry, so any cross-correlation can still be evaluated.
#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub scheme: Scheme,
    pub input: PolarizationState,
    pub output: PolarizationState,
    pub h_plus: QuadratureRecord,
    pub h_minus: QuadratureRecord,
    pub v_plus: QuadratureRecord,
    pub v_minus: QuadratureRecord,
}

impl TeleportOutcome {
    pub(crate) fn from_states(
        scheme: Scheme,
        input: PolarizationState,
        output: PolarizationState,
    ) -> Self {
        let h_plus = QuadratureRecord::between(&input.h.x_plus, &output.h.x_plus);
        let h_minus = QuadratureRecord::between(&input.h.x_minus, &output.h.x_minus);
        let v_plus = QuadratureRecord::between(&input.v.x_plus, &output.v.x_plus);
        let v_minus = QuadratureRecord::between(&input.v.x_minus, &output.v.x_minus);
        TeleportOutcome {
            scheme,
            input,
            output,
            h_plus,
            h_minus,
            v_plus,
            v_minus,
        }
    }

    pub fn record(&self, key: QuadKey) -> &QuadratureRecord {
        match key {
            QuadKey::HPlus => &self.h_plus,
            QuadKey::HMinus => &self.h_minus,
            QuadKey::VPlus => &self.v_plus,
            QuadKey::VMinus => &self.v_minus,
        }
    }

    /// Records of the scheme's information quadratures, optionally widened by
    /// the vertical phase quadrature for sensitivity studies.
    pub fn info_records(&self, include_v_minus: bool) -> Vec<(QuadKey, &QuadratureRecord)> {
        let mut keys: Vec<QuadKey> = self.scheme.info_quadratures().to_vec();
        if include_v_minus && !keys.contains(&QuadKey::VMinus) {
            keys.push(QuadKey::VMinus);
        }
        keys.into_iter().map(|k| (k, self.record(k))).collect()
    }
}

/// Single-mode teleportation result (one quadrature teleporter).
#[derive(Clone, Debug)]
pub struct SingleModeOutcome {
    pub input: OpticalMode,
    pub output: OpticalMode,
    pub plus: QuadratureRecord,
    pub minus: QuadratureRecord,
}

/// Build the input state for a run: coherent carriers per [`InputSpec`] with
/// the configured classical modulation signals.
pub fn build_input(reg: &mut SourceRegistry, params: &ProtocolParams) -> Result<PolarizationState> {
    let mut h = OpticalMode::coherent(reg, params.input.alpha_h);
    if params.signal.h_plus > 0.0 {
        h.add_signal(reg, Quadrature::Amplitude, params.signal.h_plus)?;
    }
    if params.signal.h_minus > 0.0 {
        h.add_signal(reg, Quadrature::Phase, params.signal.h_minus)?;
    }
    let mut v = OpticalMode::coherent(reg, params.input.alpha_v);
    if params.signal.v_plus > 0.0 {
        v.add_signal(reg, Quadrature::Amplitude, params.signal.v_plus)?;
    }
    if params.signal.v_minus > 0.0 {
        v.add_signal(reg, Quadrature::Phase, params.signal.v_minus)?;
    }
    PolarizationState::new(h, v, params.input.theta)
}

/// Run one protocol from scratch on a fresh source registry.
pub fn run(params: &ProtocolParams) -> Result<TeleportOutcome> {
    params.validate()?;
    let mut reg = SourceRegistry::new();
    let input = build_input(&mut reg, params)?;
    match params.scheme {
        Scheme::Twin => twin_teleport(&mut reg, input, params),
        Scheme::Sqd => sqd_teleport(&mut reg, input, params),
        Scheme::Bet => bet_teleport(&mut reg, input, params),
        Scheme::OptimizedTwin => optimized_twin_teleport(&mut reg, input, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn every_scheme_achieves_unity_signal_gain_when_calibrated() {
        let configs = [
            ProtocolParams::twin(0.5),
            ProtocolParams::sqd(0.5, 0.4),
            ProtocolParams::bet(0.5, 0.4, Quadrature::Phase, 0.3, 0.2, 0.7),
            ProtocolParams::optimized_twin(0.5, 0.4, 0.3, 0.7),
        ];
        for params in configs {
            let outcome = run(&params).unwrap();
            for (key, rec) in outcome.info_records(false) {
                assert_abs_diff_eq!(rec.signal_gain, 1.0, epsilon = 1e-9);
                let _ = key;
            }
        }
    }

    #[test]
    fn gain_multiplier_scales_information_quadratures() {
        let params = ProtocolParams::twin(0.5).with_gain_multiplier(1.7);
        let outcome = run(&params).unwrap();
        for (_, rec) in outcome.info_records(false) {
            assert_abs_diff_eq!(rec.signal_gain, 1.7, epsilon = 1e-9);
        }
    }

    #[test]
    fn scheme_parsing_roundtrips() {
        for scheme in [
            Scheme::Twin,
            Scheme::Sqd,
            Scheme::Bet,
            Scheme::OptimizedTwin,
        ] {
            assert_eq!(Scheme::parse(scheme.name()).unwrap(), scheme);
        }
        assert!(Scheme::parse("quantum-internet").is_err());
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        let mut p = ProtocolParams::twin(0.5);
        p.v_sq_epr = 1.5;
        assert!(p.validate().is_err());
        let mut p = ProtocolParams::sqd(0.5, 0.5);
        p.v_sq3 = 0.0;
        assert!(p.validate().is_err());
        let mut p = ProtocolParams::bet(0.5, 0.5, Quadrature::Phase, 0.5, 0.5, 0.0);
        p.signal.h_plus = -1.0;
        assert!(p.validate().is_err());
    }
}

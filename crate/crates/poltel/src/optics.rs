//! Optical modes and the network elements acting on them: vacuum / coherent /
//! squeezed sources, beamsplitters, phase shifts, entangled-pair generation,
//! homodyne and direct detection, and electro-optic feedforward modulation.
//!
//! All elements are pure functions from modes to modes; detection consumes its
//! mode and returns a classical record. Loss, detector inefficiency and dark
//! noise are out of scope: every element is ideal.

use crate::error::{Error, Result};
use crate::fluct::{
    linear_combination, symplectic_product, FluctuationVector, Source, SourceRegistry,
};

/// Amplitude (X+) or phase (X-) quadrature selector, also used as squeezing
/// angle and modulation target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrature {
    Amplitude,
    Phase,
}

/// Direct detection is only meaningful on a bright beam; below this carrier
/// amplitude the linearised photocurrent model does not apply.
pub const MIN_DIRECT_CARRIER: f64 = 10.0;

/// One optical mode: a real carrier amplitude plus the fluctuation operators of
/// both quadratures. `phase` is bookkeeping advanced by [`phase_shift`]; the
/// physics of a rotation lives in the quadrature vectors.
#[derive(Clone, Debug)]
pub struct OpticalMode {
    pub carrier: f64,
    pub phase: f64,
    pub x_plus: FluctuationVector,
    pub x_minus: FluctuationVector,
}

impl OpticalMode {
    /// Fresh vacuum mode: both quadratures at the standard quantum limit.
    pub fn vacuum(reg: &mut SourceRegistry) -> Self {
        Self::coherent(reg, 0.0)
    }

    /// Bright coherent mode with carrier amplitude `alpha`.
    pub fn coherent(reg: &mut SourceRegistry, alpha: f64) -> Self {
        let (x, p) = reg.quantum_pair();
        OpticalMode {
            carrier: alpha,
            phase: 0.0,
            x_plus: FluctuationVector::of(x, 1.0),
            x_minus: FluctuationVector::of(p, 1.0),
        }
    }

    /// Pure squeezed mode: the selected quadrature has variance `v_sq`, the
    /// conjugate `1/v_sq`, so the minimum-uncertainty product holds at creation.
    pub fn squeezed(reg: &mut SourceRegistry, v_sq: f64, angle: Quadrature) -> Result<Self> {
        if v_sq <= 0.0 || !v_sq.is_finite() {
            return Err(Error::param(
                "v_sq",
                format!("must be positive, got {v_sq}"),
            ));
        }
        let (x, p) = reg.quantum_pair();
        let (cx, cp) = match angle {
            Quadrature::Amplitude => (v_sq.sqrt(), 1.0 / v_sq.sqrt()),
            Quadrature::Phase => (1.0 / v_sq.sqrt(), v_sq.sqrt()),
        };
        Ok(OpticalMode {
            carrier: 0.0,
            phase: 0.0,
            x_plus: FluctuationVector::of(x, cx),
            x_minus: FluctuationVector::of(p, cp),
        })
    }

    pub fn with_carrier(mut self, alpha: f64) -> Self {
        self.carrier = alpha;
        self
    }

    /// Add a classical modulation signal of the given variance to one
    /// quadrature. Returns the allocated source so callers can track it.
    pub fn add_signal(
        &mut self,
        reg: &mut SourceRegistry,
        quad: Quadrature,
        variance: f64,
    ) -> Result<Source> {
        if variance < 0.0 {
            return Err(Error::param(
                "signal variance",
                format!("must be >= 0, got {variance}"),
            ));
        }
        let s = reg.classical();
        self.quadrature_mut(quad).add_term(s, variance.sqrt());
        Ok(s)
    }

    pub fn quadrature(&self, quad: Quadrature) -> &FluctuationVector {
        match quad {
            Quadrature::Amplitude => &self.x_plus,
            Quadrature::Phase => &self.x_minus,
        }
    }

    fn quadrature_mut(&mut self, quad: Quadrature) -> &mut FluctuationVector {
        match quad {
            Quadrature::Amplitude => &mut self.x_plus,
            Quadrature::Phase => &mut self.x_minus,
        }
    }

    pub fn variance(&self, quad: Quadrature) -> f64 {
        self.quadrature(quad).variance()
    }

    pub fn quantum_variance(&self, quad: Quadrature) -> f64 {
        self.quadrature(quad).quantum_variance()
    }

    /// Commutator bookkeeping of this mode's quadrature pair.
    pub fn symplectic(&self) -> f64 {
        symplectic_product(&self.x_plus, &self.x_minus)
    }
}

/// Mode construction request, mirroring the source kinds the model supports.
#[derive(Clone, Copy, Debug)]
pub enum ModeKind {
    Vacuum,
    Coherent { alpha: f64 },
    Squeezed { v_sq: f64, angle: Quadrature },
}

/// Build a mode from a fresh quantum source pair, optionally with classical
/// modulation signals `(v_plus_c, v_minus_c)` on the two quadratures.
pub fn make_mode(
    reg: &mut SourceRegistry,
    kind: ModeKind,
    signal: Option<(f64, f64)>,
) -> Result<OpticalMode> {
    let mut mode = match kind {
        ModeKind::Vacuum => OpticalMode::vacuum(reg),
        ModeKind::Coherent { alpha } => OpticalMode::coherent(reg, alpha),
        ModeKind::Squeezed { v_sq, angle } => OpticalMode::squeezed(reg, v_sq, angle)?,
    };
    if let Some((vp, vm)) = signal {
        if vp > 0.0 {
            mode.add_signal(reg, Quadrature::Amplitude, vp)?;
        }
        if vm > 0.0 {
            mode.add_signal(reg, Quadrature::Phase, vm)?;
        }
    }
    Ok(mode)
}

/// Variable-transmittivity beamsplitter:
/// `c = √ε·a + √(1−ε)·b`, `d = √(1−ε)·a − √ε·b`,
/// applied identically to carriers and both quadrature vectors.
pub fn beamsplitter(
    a: OpticalMode,
    b: OpticalMode,
    eps: f64,
) -> Result<(OpticalMode, OpticalMode)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param(
            "eps",
            format!("transmittivity must lie in [0, 1], got {eps}"),
        ));
    }
    let t = eps.sqrt();
    let r = (1.0 - eps).sqrt();
    let c = OpticalMode {
        carrier: t * a.carrier + r * b.carrier,
        phase: a.phase,
        x_plus: linear_combination(&[(t, &a.x_plus), (r, &b.x_plus)]),
        x_minus: linear_combination(&[(t, &a.x_minus), (r, &b.x_minus)]),
    };
    let d = OpticalMode {
        carrier: r * a.carrier - t * b.carrier,
        phase: a.phase,
        x_plus: linear_combination(&[(r, &a.x_plus), (-t, &b.x_plus)]),
        x_minus: linear_combination(&[(r, &a.x_minus), (-t, &b.x_minus)]),
    };
    Ok((c, d))
}

/// Rotate the quadrature pair by `phi` and advance the carrier phase
/// bookkeeping. `X+' = cos φ·X+ − sin φ·X−`, `X−' = sin φ·X+ + cos φ·X−`.
pub fn phase_shift(a: OpticalMode, phi: f64) -> OpticalMode {
    let (s, c) = phi.sin_cos();
    OpticalMode {
        carrier: a.carrier,
        phase: a.phase + phi,
        x_plus: linear_combination(&[(c, &a.x_plus), (-s, &a.x_minus)]),
        x_minus: linear_combination(&[(s, &a.x_plus), (c, &a.x_minus)]),
    }
}

/// Quadrature-entangled pair from two equally squeezed beams, 90 degrees out
/// of phase, combined 50/50. The outputs satisfy
/// `V(X+_1 + X+_2) = V(X−_1 − X−_2) = 2·v_sq`.
pub fn epr_pair(reg: &mut SourceRegistry, v_sq: f64) -> Result<(OpticalMode, OpticalMode)> {
    if !(v_sq > 0.0 && v_sq <= 1.0) {
        return Err(Error::param(
            "v_sq",
            format!("entanglement source must have squeezed variance in (0, 1], got {v_sq}"),
        ));
    }
    let amp = OpticalMode::squeezed(reg, v_sq, Quadrature::Amplitude)?;
    let ph = OpticalMode::squeezed(reg, v_sq, Quadrature::Phase)?;
    beamsplitter(amp, ph, 0.5)
}

/// A detected photocurrent: the measured fluctuation, now classical
/// information that may be copied and scaled freely.
#[derive(Clone, Debug)]
pub struct Photocurrent {
    pub signal: FluctuationVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detection {
    AmplitudeHomodyne,
    PhaseHomodyne,
    /// Direct (intensity) detection of a bright beam; reads X+ with no vacuum
    /// penalty in this ideal-detector model.
    Direct,
}

/// Detect one quadrature of `mode`, consuming it.
pub fn detect(mode: OpticalMode, which: Detection) -> Result<Photocurrent> {
    let signal = match which {
        Detection::AmplitudeHomodyne => mode.x_plus,
        Detection::PhaseHomodyne => mode.x_minus,
        Detection::Direct => {
            if mode.carrier.abs() < MIN_DIRECT_CARRIER {
                return Err(Error::DimCarrier {
                    carrier: mode.carrier,
                    min: MIN_DIRECT_CARRIER,
                });
            }
            mode.x_plus
        }
    };
    Ok(Photocurrent { signal })
}

/// Electro-optic feedforward: add `gain · i` to the selected quadrature.
/// The carrier is untouched; displacements of the mean signal ride on the
/// classical-source coefficients.
pub fn modulate(mode: OpticalMode, quad: Quadrature, gain: f64, i: &Photocurrent) -> OpticalMode {
    let mut out = mode;
    let target = out.quadrature_mut(quad);
    *target = linear_combination(&[(1.0, target), (gain, &i.signal)]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn vacuum_is_shot_noise_limited() {
        let mut reg = SourceRegistry::new();
        let m = OpticalMode::vacuum(&mut reg);
        assert_eq!(m.variance(Quadrature::Amplitude), 1.0);
        assert_eq!(m.variance(Quadrature::Phase), 1.0);
        assert_eq!(m.symplectic(), 1.0);
    }

    #[test]
    fn squeezed_mode_is_minimum_uncertainty() {
        let mut reg = SourceRegistry::new();
        let m = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Amplitude).unwrap();
        assert_abs_diff_eq!(m.variance(Quadrature::Amplitude), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.variance(Quadrature::Phase), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.symplectic(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn non_positive_squeezing_rejected() {
        let mut reg = SourceRegistry::new();
        assert!(OpticalMode::squeezed(&mut reg, 0.0, Quadrature::Amplitude).is_err());
        assert!(OpticalMode::squeezed(&mut reg, -1.0, Quadrature::Phase).is_err());
    }

    #[test]
    fn coherent_mode_with_signal_adds_classical_variance() {
        let mut reg = SourceRegistry::new();
        let m = make_mode(
            &mut reg,
            ModeKind::Coherent { alpha: 10.0 },
            Some((4.0, 0.0)),
        )
        .unwrap();
        assert_abs_diff_eq!(m.variance(Quadrature::Amplitude), 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            m.quantum_variance(Quadrature::Amplitude),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(m.variance(Quadrature::Phase), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn beamsplitter_at_full_transmission_passes_through() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::squeezed(&mut reg, 0.3, Quadrature::Amplitude).unwrap();
        let b = OpticalMode::vacuum(&mut reg);
        let (ax, bx) = (a.x_plus.clone(), b.x_plus.clone());
        let (c, d) = beamsplitter(a, b, 1.0).unwrap();
        assert_eq!(c.x_plus, ax);
        assert_eq!(d.x_plus, bx.scaled(-1.0));
    }

    #[test]
    fn balanced_beamsplitter_preserves_vacuum() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::vacuum(&mut reg);
        let b = OpticalMode::vacuum(&mut reg);
        let (c, d) = beamsplitter(a, b, 0.5).unwrap();
        for m in [&c, &d] {
            assert_abs_diff_eq!(m.variance(Quadrature::Amplitude), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(m.variance(Quadrature::Phase), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(m.symplectic(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn squeezed_plus_vacuum_mixes_variances() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Amplitude).unwrap();
        let b = OpticalMode::vacuum(&mut reg);
        let (c, d) = beamsplitter(a, b, 0.5).unwrap();
        assert_abs_diff_eq!(c.variance(Quadrature::Amplitude), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(d.variance(Quadrature::Amplitude), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn out_of_range_transmittivity_rejected() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::vacuum(&mut reg);
        let b = OpticalMode::vacuum(&mut reg);
        assert!(beamsplitter(a, b, 1.5).is_err());
    }

    #[test]
    fn phase_shift_zero_is_identity() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::squeezed(&mut reg, 0.4, Quadrature::Amplitude).unwrap();
        let before = a.clone();
        let after = phase_shift(a, 0.0);
        assert_eq!(after.x_plus, before.x_plus);
        assert_eq!(after.x_minus, before.x_minus);
    }

    #[test]
    fn quarter_turn_swaps_quadratures() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Amplitude).unwrap();
        let r = phase_shift(a, FRAC_PI_2);
        assert_abs_diff_eq!(r.variance(Quadrature::Amplitude), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.variance(Quadrature::Phase), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn intermediate_rotation_blends_variances() {
        let mut reg = SourceRegistry::new();
        for v in [0.2, 0.5, 0.8] {
            let a = OpticalMode::squeezed(&mut reg, v, Quadrature::Amplitude).unwrap();
            let r = phase_shift(a, std::f64::consts::FRAC_PI_4);
            assert_abs_diff_eq!(
                r.variance(Quadrature::Amplitude),
                (v + 1.0 / v) / 2.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn epr_pair_correlations() {
        let mut reg = SourceRegistry::new();
        let (e1, e2) = epr_pair(&mut reg, 0.5).unwrap();
        let sum = e1.x_plus.plus(&e2.x_plus);
        let diff = e1.x_minus.minus(&e2.x_minus);
        assert_abs_diff_eq!(sum.variance(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(diff.variance(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn epr_pair_without_squeezing_is_uncorrelated() {
        let mut reg = SourceRegistry::new();
        let (e1, e2) = epr_pair(&mut reg, 1.0).unwrap();
        for m in [&e1, &e2] {
            assert_abs_diff_eq!(m.variance(Quadrature::Amplitude), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m.variance(Quadrature::Phase), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(e1.x_plus.plus(&e2.x_plus).variance(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn epr_correlations_vanish_with_ideal_squeezing() {
        let mut reg = SourceRegistry::new();
        let (e1, e2) = epr_pair(&mut reg, 1e-9).unwrap();
        assert!(e1.x_plus.plus(&e2.x_plus).variance() < 1e-8);
        assert!(e1.x_minus.minus(&e2.x_minus).variance() < 1e-8);
    }

    #[test]
    fn anti_squeezed_entanglement_source_rejected() {
        let mut reg = SourceRegistry::new();
        assert!(epr_pair(&mut reg, 1.5).is_err());
    }

    #[test]
    fn direct_detection_needs_bright_carrier() {
        let mut reg = SourceRegistry::new();
        let dim = OpticalMode::vacuum(&mut reg);
        assert!(detect(dim, Detection::Direct).is_err());
        let bright = OpticalMode::coherent(&mut reg, 20.0);
        let i = detect(bright, Detection::Direct).unwrap();
        assert_abs_diff_eq!(i.signal.variance(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn direct_detection_carries_the_classical_signal() {
        let mut reg = SourceRegistry::new();
        let mut bright = OpticalMode::coherent(&mut reg, 20.0);
        let s = bright
            .add_signal(&mut reg, Quadrature::Amplitude, 4.0)
            .unwrap();
        let i = detect(bright, Detection::Direct).unwrap();
        assert_abs_diff_eq!(i.signal.coeff(s), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(i.signal.variance(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn homodyne_reads_selected_quadrature() {
        let mut reg = SourceRegistry::new();
        let m = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Amplitude).unwrap();
        let i = detect(m, Detection::AmplitudeHomodyne).unwrap();
        assert_abs_diff_eq!(i.signal.variance(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_gain_modulation_is_identity() {
        let mut reg = SourceRegistry::new();
        let m = OpticalMode::vacuum(&mut reg);
        let probe = OpticalMode::vacuum(&mut reg);
        let i = detect(probe, Detection::AmplitudeHomodyne).unwrap();
        let before = m.x_plus.clone();
        let out = modulate(m, Quadrature::Amplitude, 0.0, &i);
        assert_eq!(out.x_plus, before);
    }

    #[test]
    fn unit_gain_modulation_adds_independent_noise() {
        let mut reg = SourceRegistry::new();
        let m = OpticalMode::vacuum(&mut reg);
        let probe = OpticalMode::vacuum(&mut reg);
        let i = detect(probe, Detection::AmplitudeHomodyne).unwrap();
        let out = modulate(m, Quadrature::Amplitude, 1.0, &i);
        assert_abs_diff_eq!(out.variance(Quadrature::Amplitude), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn anti_correlated_feedforward_cancels_exactly() {
        let mut reg = SourceRegistry::new();
        let a = OpticalMode::vacuum(&mut reg);
        let b = OpticalMode::vacuum(&mut reg);
        let (c, d) = beamsplitter(a, b, 0.5).unwrap();
        // Feed the measured port back onto the sibling with the gain that
        // cancels their shared source content.
        let i = detect(d, Detection::AmplitudeHomodyne).unwrap();
        let out = modulate(c, Quadrature::Amplitude, -1.0, &i);
        // c − d = √2·b on the amplitude quadrature.
        assert_abs_diff_eq!(out.variance(Quadrature::Amplitude), 2.0, epsilon = 1e-12);
        let mut expected_support: Vec<_> = out.x_plus.support().map(|(s, _)| s).collect();
        expected_support.dedup();
        assert_eq!(expected_support.len(), 1);
    }

    #[test]
    fn interferometer_with_crossed_arms_reconstructs_inputs() {
        // Second splitter at 1 − ε with swapped ports restores (a, −b).
        let mut reg = SourceRegistry::new();
        for eps in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let a = OpticalMode::squeezed(&mut reg, 0.4, Quadrature::Amplitude).unwrap();
            let b = OpticalMode::coherent(&mut reg, 3.0);
            let (ax, bx) = (a.x_plus.clone(), b.x_plus.clone());
            let (c, d) = beamsplitter(a, b, eps).unwrap();
            let (oa, ob) = beamsplitter(d, c, 1.0 - eps).unwrap();
            assert!(oa.x_plus.minus(&ax).variance() < 1e-24);
            assert!(ob.x_plus.plus(&bx).variance() < 1e-24);
            assert_abs_diff_eq!(oa.carrier, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ob.carrier, -3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn feedforward_noise_penalty_never_beats_the_input() {
        // Split a coherent beam 50/50, measure one port, feed onto the other at
        // unity signal gain: the output variance is V_in plus a penalty.
        let mut reg = SourceRegistry::new();
        let mut input = OpticalMode::coherent(&mut reg, 20.0);
        let sig = input
            .add_signal(&mut reg, Quadrature::Amplitude, 1.0)
            .unwrap();
        let vac = OpticalMode::vacuum(&mut reg);
        let (kept, tapped) = beamsplitter(input, vac, 0.5).unwrap();
        let i = detect(tapped, Detection::AmplitudeHomodyne).unwrap();
        // Unity signal gain: the signal coefficient must come back to 1.
        let g = (1.0 - kept.x_plus.coeff(sig)) / i.signal.coeff(sig);
        let out = modulate(kept, Quadrature::Amplitude, g, &i);
        assert_abs_diff_eq!(out.x_plus.coeff(sig), 1.0, epsilon = 1e-12);
        let quantum_out = out.x_plus.quantum_variance();
        assert!(quantum_out >= 1.0 - 1e-12, "got {quantum_out}");
        assert_abs_diff_eq!(quantum_out, 1.0 + g * g, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn pure_state_product_preserved_by_rotation(
            v in 0.05f64..1.0,
            phi in 0.0f64..std::f64::consts::TAU,
        ) {
            let mut reg = SourceRegistry::new();
            let m = OpticalMode::squeezed(&mut reg, v, Quadrature::Amplitude).unwrap();
            prop_assert!((m.quantum_variance(Quadrature::Amplitude)
                * m.quantum_variance(Quadrature::Phase) - 1.0).abs() < 1e-9);
            let r = phase_shift(m, phi);
            prop_assert!((r.symplectic() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn beamsplitter_conserves_carrier_power(
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            eps in 0.0f64..=1.0,
        ) {
            let mut reg = SourceRegistry::new();
            let ma = OpticalMode::coherent(&mut reg, a);
            let mb = OpticalMode::coherent(&mut reg, b);
            let (c, d) = beamsplitter(ma, mb, eps).unwrap();
            let before = a * a + b * b;
            let after = c.carrier * c.carrier + d.carrier * d.carrier;
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
        }

        #[test]
        fn beamsplitter_outputs_stay_canonical(
            v in 0.05f64..1.0,
            eps in 0.0f64..=1.0,
        ) {
            let mut reg = SourceRegistry::new();
            let a = OpticalMode::squeezed(&mut reg, v, Quadrature::Amplitude).unwrap();
            let b = OpticalMode::vacuum(&mut reg);
            let (c, d) = beamsplitter(a, b, eps).unwrap();
            prop_assert!((c.symplectic() - 1.0).abs() < 1e-12);
            prop_assert!((d.symplectic() - 1.0).abs() < 1e-12);
        }
    }
}

//! Quantum Stokes-operator statistics of a two-mode polarisation state: means,
//! linearised fluctuation operators, variances, the quantum Poincaré radius and
//! uncertainty-relation margins.
//!
//! Conventions: `S1 = n_H − n_V` (a vertical carrier gives a negative `<S1>`),
//! `<S2> = 2 α_H α_V cos θ`, `<S3> = 2 α_H α_V sin θ`, and the fluctuation
//! operators are the first-order expansions
//!
//! ```text
//! δS0 = α_H δX+_H + α_V δX+_V
//! δS1 = α_H δX+_H − α_V δX+_V
//! δS2 = α_H (δX−_V sin θ + δX+_V cos θ) + α_V (δX+_H cos θ − δX−_H sin θ)
//! δS3 = α_H (δX+_V sin θ − δX−_V cos θ) + α_V (δX−_H cos θ + δX+_H sin θ)
//! ```

use crate::error::{Error, Result};
use crate::fluct::{linear_combination, FluctuationVector};
use crate::optics::OpticalMode;

/// Below this total photon number the linearisation underlying the Stokes
/// statistics is questionable; callers may override per call site.
pub const DEFAULT_BRIGHTNESS_THRESHOLD: f64 = 100.0;

/// Two-mode polarisation state: horizontal and vertical constituents plus the
/// relative phase θ between them. Carrier amplitudes are non-negative; any
/// carrier phase is absorbed into θ.
#[derive(Clone, Debug)]
pub struct PolarizationState {
    pub h: OpticalMode,
    pub v: OpticalMode,
    pub theta: f64,
}

impl PolarizationState {
    pub fn new(h: OpticalMode, v: OpticalMode, theta: f64) -> Result<Self> {
        if h.carrier < 0.0 || v.carrier < 0.0 {
            return Err(Error::param(
                "carrier",
                format!(
                    "carrier amplitudes must be non-negative (phase lives in theta), got ({}, {})",
                    h.carrier, v.carrier
                ),
            ));
        }
        Ok(PolarizationState { h, v, theta })
    }

    pub fn alpha_h(&self) -> f64 {
        self.h.carrier
    }

    pub fn alpha_v(&self) -> f64 {
        self.v.carrier
    }

    /// Total photon number `α_H² + α_V²`.
    pub fn total_power(&self) -> f64 {
        self.alpha_h().powi(2) + self.alpha_v().powi(2)
    }
}

/// Carrier-level Stokes vector `(S0, S1, S2, S3)`.
pub fn stokes_means(state: &PolarizationState) -> [f64; 4] {
    let (ah, av) = (state.alpha_h(), state.alpha_v());
    let (s, c) = state.theta.sin_cos();
    [
        ah * ah + av * av,
        ah * ah - av * av,
        2.0 * ah * av * c,
        2.0 * ah * av * s,
    ]
}

/// Linearised fluctuation operators `[δS0, δS1, δS2, δS3]`.
pub fn stokes_fluctuations(state: &PolarizationState) -> [FluctuationVector; 4] {
    let (ah, av) = (state.alpha_h(), state.alpha_v());
    let (sin, cos) = state.theta.sin_cos();
    let (hp, hm) = (&state.h.x_plus, &state.h.x_minus);
    let (vp, vm) = (&state.v.x_plus, &state.v.x_minus);
    [
        linear_combination(&[(ah, hp), (av, vp)]),
        linear_combination(&[(ah, hp), (-av, vp)]),
        linear_combination(&[
            (ah * sin, vm),
            (ah * cos, vp),
            (av * cos, hp),
            (-av * sin, hm),
        ]),
        linear_combination(&[
            (ah * sin, vp),
            (-ah * cos, vm),
            (av * cos, hm),
            (av * sin, hp),
        ]),
    ]
}

/// Variances `(V_S1, V_S2, V_S3)` computed through the fluctuation algebra.
pub fn stokes_variances(state: &PolarizationState) -> [f64; 3] {
    let fl = stokes_fluctuations(state);
    [fl[1].variance(), fl[2].variance(), fl[3].variance()]
}

/// Full statistics bundle for one state.
#[derive(Clone, Debug)]
pub struct StokesStatistics {
    pub means: [f64; 4],
    pub fluct: [FluctuationVector; 4],
    /// `[V_S0, V_S1, V_S2, V_S3]`.
    pub variances: [f64; 4],
    /// Quantum Poincaré radius `sqrt(<S0>² + 2<S0>)`.
    pub poincare_radius: f64,
}

impl StokesStatistics {
    pub fn of(state: &PolarizationState) -> Self {
        let means = stokes_means(state);
        let fluct = stokes_fluctuations(state);
        let variances = [
            fluct[0].variance(),
            fluct[1].variance(),
            fluct[2].variance(),
            fluct[3].variance(),
        ];
        let s0 = means[0];
        StokesStatistics {
            means,
            fluct,
            variances,
            poincare_radius: (s0 * s0 + 2.0 * s0).sqrt(),
        }
    }

    /// Whether the state is bright enough for the linearisation to hold.
    pub fn linearization_ok(&self, threshold: f64) -> bool {
        self.means[0] >= threshold
    }
}

/// Margin `V_l·V_m − <S_n>²` for one cyclic triple; non-negative for any
/// physical state.
#[derive(Clone, Copy, Debug)]
pub struct UncertaintyMargin {
    /// Indices `(l, m, n)` with values in {1, 2, 3}.
    pub triple: (usize, usize, usize),
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct UncertaintyReport {
    pub margins: [UncertaintyMargin; 3],
}

impl UncertaintyReport {
    /// Triples whose margin is negative beyond `tol` — a model bug if any.
    pub fn violations(&self, tol: f64) -> Vec<UncertaintyMargin> {
        self.margins
            .iter()
            .copied()
            .filter(|m| m.margin < -tol)
            .collect()
    }
}

/// Evaluate the three cyclic uncertainty products `V_l V_m >= <S_n>²`.
pub fn uncertainty_check(stats: &StokesStatistics) -> UncertaintyReport {
    let v = &stats.variances;
    let s = &stats.means;
    let margin = |l: usize, m: usize, n: usize| UncertaintyMargin {
        triple: (l, m, n),
        margin: v[l] * v[m] - s[n] * s[n],
    };
    UncertaintyReport {
        margins: [margin(1, 2, 3), margin(2, 3, 1), margin(3, 1, 2)],
    }
}

/// Per-mode second moments used by the reference variance formulas.
#[derive(Clone, Copy, Debug, Default)]
pub struct ModeVariances {
    pub plus_quantum: f64,
    pub minus_quantum: f64,
    pub plus_classical: f64,
    pub minus_classical: f64,
}

impl ModeVariances {
    pub fn coherent() -> Self {
        ModeVariances {
            plus_quantum: 1.0,
            minus_quantum: 1.0,
            plus_classical: 0.0,
            minus_classical: 0.0,
        }
    }

    fn plus(&self) -> f64 {
        self.plus_quantum + self.plus_classical
    }

    fn minus(&self) -> f64 {
        self.minus_quantum + self.minus_classical
    }
}

/// Classical cross-correlations between modulation signals. All zero in the
/// default modelling; non-zero values arise when two quadratures share a
/// classical source.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClassicalCross {
    /// `<δX+_V,c δX+_H,c>`
    pub vp_hp: f64,
    /// `<δX+_V,c δX−_H,c>`
    pub vp_hm: f64,
    /// `<δX−_V,c δX+_H,c>`
    pub vm_hp: f64,
    /// `<δX−_V,c δX−_H,c>`
    pub vm_hm: f64,
    /// `<δX+_H,c δX−_H,c>`
    pub hp_hm: f64,
    /// `<δX+_V,c δX−_V,c>`
    pub vp_vm: f64,
}

/// Reference evaluation of `(V_S1, V_S2, V_S3)` directly from per-mode second
/// moments, independent of the fluctuation-vector machinery. Cross terms carry
/// the signs obtained by expanding the fluctuation operators above.
pub fn stokes_variances_reference(
    alpha_h: f64,
    alpha_v: f64,
    theta: f64,
    h: ModeVariances,
    v: ModeVariances,
    cross: ClassicalCross,
) -> [f64; 3] {
    let (ah, av) = (alpha_h, alpha_v);
    let (sin, cos) = theta.sin_cos();
    let (s2, c2) = (sin * sin, cos * cos);
    let sc = sin * cos;

    let v_s1 = ah * ah * h.plus() + av * av * v.plus() - 2.0 * ah * av * cross.vp_hp;

    let v_s2 = ah * ah * c2 * v.plus()
        + av * av * c2 * h.plus()
        + ah * ah * s2 * v.minus()
        + av * av * s2 * h.minus()
        + 2.0 * ah * av * sc * cross.vm_hp
        + 2.0 * ah * av * c2 * cross.vp_hp
        + 2.0 * ah * ah * sc * cross.vp_vm
        - 2.0 * ah * av * sc * cross.vp_hm
        - 2.0 * ah * av * s2 * cross.vm_hm
        - 2.0 * av * av * sc * cross.hp_hm;

    let v_s3 = ah * ah * c2 * v.minus()
        + av * av * c2 * h.minus()
        + ah * ah * s2 * v.plus()
        + av * av * s2 * h.plus()
        + 2.0 * ah * av * sc * cross.vp_hm
        + 2.0 * ah * av * s2 * cross.vp_hp
        + 2.0 * av * av * sc * cross.hp_hm
        - 2.0 * ah * av * sc * cross.vm_hp
        - 2.0 * ah * av * c2 * cross.vm_hm
        - 2.0 * ah * ah * sc * cross.vp_vm;

    [v_s1, v_s2, v_s3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluct::{Source, SourceRegistry};
    use crate::optics::{make_mode, ModeKind, OpticalMode, Quadrature};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn coherent_state(
        reg: &mut SourceRegistry,
        alpha_h: f64,
        alpha_v: f64,
        theta: f64,
    ) -> PolarizationState {
        let h = OpticalMode::coherent(reg, alpha_h);
        let v = OpticalMode::coherent(reg, alpha_v);
        PolarizationState::new(h, v, theta).unwrap()
    }

    #[test]
    fn dark_state_has_zero_means() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 0.0, 0.0, 0.3);
        assert_eq!(stokes_means(&s), [0.0; 4]);
        assert_eq!(stokes_variances(&s), [0.0; 3]);
    }

    #[test]
    fn vertical_carrier_means() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 0.0, 10.0, 0.0);
        let m = stokes_means(&s);
        assert_eq!(m, [100.0, -100.0, 0.0, 0.0]);
    }

    #[test]
    fn circular_polarization_means() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 1.0, 1.0, FRAC_PI_2);
        let m = stokes_means(&s);
        assert_abs_diff_eq!(m[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[3], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_carrier_rejected() {
        let mut reg = SourceRegistry::new();
        let h = OpticalMode::coherent(&mut reg, -1.0);
        let v = OpticalMode::coherent(&mut reg, 1.0);
        assert!(PolarizationState::new(h, v, 0.0).is_err());
    }

    #[test]
    fn vertical_carrier_fluctuations_reduce() {
        let mut reg = SourceRegistry::new();
        let theta = 0.7;
        let s = coherent_state(&mut reg, 0.0, 10.0, theta);
        let fl = stokes_fluctuations(&s);
        // δS1 = −α_V δX+_V
        assert_eq!(fl[1], s.v.x_plus.scaled(-10.0));
        // δS2 = α_V (δX+_H cos θ − δX−_H sin θ)
        let expected = linear_combination(&[
            (10.0 * theta.cos(), &s.h.x_plus),
            (-10.0 * theta.sin(), &s.h.x_minus),
        ]);
        assert_eq!(fl[2], expected);
    }

    #[test]
    fn zero_theta_diagonal_fluctuation() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 3.0, 4.0, 0.0);
        let fl = stokes_fluctuations(&s);
        let expected = linear_combination(&[(3.0, &s.v.x_plus), (4.0, &s.h.x_plus)]);
        assert!(fl[2].minus(&expected).variance() < 1e-24);
    }

    #[test]
    fn s0_plus_s1_is_twice_horizontal_amplitude() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 5.0, 7.0, 1.1);
        let fl = stokes_fluctuations(&s);
        let lhs = fl[0].plus(&fl[1]);
        let rhs = s.h.x_plus.scaled(10.0);
        assert!(lhs.minus(&rhs).variance() < 1e-24);
    }

    #[test]
    fn amplitude_quadratures_only_in_s0_s1() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 2.0, 9.0, 0.9);
        let fl = stokes_fluctuations(&s);
        let minus_sources: Vec<Source> =
            s.h.x_minus
                .support()
                .chain(s.v.x_minus.support())
                .map(|(src, _)| src)
                .collect();
        for vec in [&fl[0], &fl[1]] {
            for src in &minus_sources {
                assert_eq!(vec.coeff(*src), 0.0);
            }
        }
    }

    #[test]
    fn coherent_vertical_carrier_noise_ball() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 0.0, 10.0, 0.0);
        let v = stokes_variances(&s);
        assert_abs_diff_eq!(v[0], 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[2], 100.0, epsilon = 1e-9);
    }

    #[test]
    fn phase_squeezed_horizontal_mode_shrinks_s3() {
        let mut reg = SourceRegistry::new();
        let h = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Phase).unwrap();
        let v = OpticalMode::coherent(&mut reg, 10.0);
        let s = PolarizationState::new(h, v, 0.0).unwrap();
        let vs = stokes_variances(&s);
        assert_abs_diff_eq!(vs[2], 50.0, epsilon = 1e-9);
        // Conjugate quadrature pays: V_S2 = α_V² V+_H = 200.
        assert_abs_diff_eq!(vs[1], 200.0, epsilon = 1e-9);
    }

    #[test]
    fn poincare_radius_exceeds_classical() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 0.0, 10.0, 0.0);
        let stats = StokesStatistics::of(&s);
        assert_abs_diff_eq!(stats.poincare_radius, 10200.0f64.sqrt(), epsilon = 1e-9);
        assert!(stats.poincare_radius > stats.means[0]);
        assert!(stats.linearization_ok(DEFAULT_BRIGHTNESS_THRESHOLD));
    }

    #[test]
    fn coherent_vertical_carrier_saturates_uncertainty() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 0.0, 10.0, 0.0);
        let stats = StokesStatistics::of(&s);
        let report = uncertainty_check(&stats);
        // V_S2 · V_S3 = <S1>² exactly.
        let m = report
            .margins
            .iter()
            .find(|m| m.triple == (2, 3, 1))
            .unwrap();
        assert_abs_diff_eq!(m.margin, 0.0, epsilon = 1e-6);
        assert!(report.violations(1e-9).is_empty());
    }

    #[test]
    fn squeezed_mode_still_satisfies_uncertainty() {
        for theta in [0.0, std::f64::consts::FRAC_PI_4] {
            let mut reg = SourceRegistry::new();
            let h = OpticalMode::squeezed(&mut reg, 0.5, Quadrature::Phase).unwrap();
            let v = OpticalMode::coherent(&mut reg, 10.0);
            let s = PolarizationState::new(h, v, theta).unwrap();
            let stats = StokesStatistics::of(&s);
            let report = uncertainty_check(&stats);
            assert!(report.violations(1e-9).is_empty());
            let m = report
                .margins
                .iter()
                .find(|m| m.triple == (2, 3, 1))
                .unwrap();
            assert!(m.margin >= -1e-9);
        }
    }

    #[test]
    fn coherent_states_have_spherical_noise_ball() {
        let mut reg = SourceRegistry::new();
        let s = coherent_state(&mut reg, 6.0, 8.0, 1.3);
        let v = stokes_variances(&s);
        let s0 = stokes_means(&s)[0];
        for vi in v {
            assert_abs_diff_eq!(vi, s0, epsilon = 1e-9);
        }
    }

    #[test]
    fn transverse_variance_sum_is_theta_invariant_for_vertical_carrier() {
        let mut reg = SourceRegistry::new();
        let h = OpticalMode::squeezed(&mut reg, 0.3, Quadrature::Amplitude).unwrap();
        let v = OpticalMode::coherent(&mut reg, 12.0);
        let base = PolarizationState::new(h, v, 0.0).unwrap();
        let reference = {
            let vs = stokes_variances(&base);
            vs[1] + vs[2]
        };
        for k in 1..16 {
            let mut s = base.clone();
            s.theta = k as f64 * 0.41;
            let vs = stokes_variances(&s);
            assert_abs_diff_eq!(vs[1] + vs[2], reference, epsilon = 1e-9);
            // θ genuinely moves the individual variances.
            if k == 3 {
                assert!((vs[1] - 0.3 * 144.0).abs() > 1.0);
            }
        }
    }

    #[test]
    fn fluctuation_variances_match_reference_formulas_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
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

            let h = make_mode(
                &mut reg,
                ModeKind::Squeezed {
                    v_sq: vh,
                    angle: Quadrature::Amplitude,
                },
                Some((hp_c, hm_c)),
            )
            .unwrap()
            .with_carrier(ah);
            let v = make_mode(
                &mut reg,
                ModeKind::Squeezed {
                    v_sq: vv,
                    angle: Quadrature::Amplitude,
                },
                Some((vp_c, vm_c)),
            )
            .unwrap()
            .with_carrier(av);
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
                assert_abs_diff_eq!(g, w, epsilon = 1e-9 * (1.0 + w.abs()));
            }
        }
    }

    #[test]
    fn shared_classical_source_reproduces_cross_terms() {
        // Let the H+ and V+ signals ride on one classical source so the
        // correlator <δX+_V,c δX+_H,c> is non-zero, and compare against the
        // reference formula with that cross term filled in.
        let mut reg = SourceRegistry::new();
        let mut h = OpticalMode::coherent(&mut reg, 4.0);
        let mut v = OpticalMode::coherent(&mut reg, 7.0);
        let shared = reg.classical();
        h.x_plus.add_term(shared, 1.5);
        v.x_plus.add_term(shared, -0.8);
        let state = PolarizationState::new(h, v, 0.4).unwrap();

        let got = stokes_variances(&state);
        let want = stokes_variances_reference(
            4.0,
            7.0,
            0.4,
            ModeVariances {
                plus_quantum: 1.0,
                minus_quantum: 1.0,
                plus_classical: 1.5 * 1.5,
                minus_classical: 0.0,
            },
            ModeVariances {
                plus_quantum: 1.0,
                minus_quantum: 1.0,
                plus_classical: 0.8 * 0.8,
                minus_classical: 0.0,
            },
            ClassicalCross {
                vp_hp: -0.8 * 1.5,
                ..Default::default()
            },
        );
        for (g, w) in got.iter().zip(want.iter()) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-9 * (1.0 + w.abs()));
        }
    }
}

//! Relaxation-rate sets and the Bloch-vector generator.
//!
//! The excitation exchange maps onto a two-level system with bias eps
//! (donor-acceptor detuning) and exchange coupling V, dressed to V_R = B V.
//! The state is tracked as the vector a = (<s_x>, <s_y>, <s_z>) whose x and
//! y components are lab-frame coherences (they carry the dressing factor)
//! while the population difference a_z is frame-invariant. Its equation of
//! motion is linear,
//!
//!   da/dt = M a + b,
//!
//! with M and b assembled from the correlator transforms at the few
//! frequencies the dressed Hamiltonian singles out: 0, eta, and -eta, where
//! eta = sqrt(eps^2 + 4 V_R^2) is the dressed level splitting.
//!
//! Four builders produce (M, b) at different levels of approximation:
//!
//! - `Regime::Full`: second-order rates at arbitrary bias.
//! - `Regime::Resonant`: the eps = 0 specialization (same rates, fewer
//!   transforms).
//! - `Regime::Weak`: one-phonon rates, valid at weak dressing; the decay
//!   rate collapses to a closed form in the bath spectral density.
//! - `Regime::HighTemperature`: secular structure appropriate when the
//!   thermal rate overwhelms the splitting.

use crate::correlations::{Axis, ResponseSet};
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Bare two-level parameters of the donor-acceptor pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    /// Donor-acceptor energy detuning eps.
    pub bias: f64,
    /// Bare exchange coupling V.
    pub coupling: f64,
}

impl SystemModel {
    pub fn new(bias: f64, coupling: f64) -> Result<Self> {
        let m = SystemModel { bias, coupling };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.bias.is_finite() {
            return Err(Error::InvalidModel(format!(
                "bias must be finite, got {}",
                self.bias
            )));
        }
        if !(self.coupling >= 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidModel(format!(
                "exchange coupling must be non-negative and finite, got {}",
                self.coupling
            )));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        self.bias == 0.0
    }
}

/// Which rate construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Full,
    Resonant,
    Weak,
    HighTemperature,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Full => "full",
            Regime::Resonant => "resonant",
            Regime::Weak => "weak",
            Regime::HighTemperature => "high-temperature",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "full" => Ok(Regime::Full),
            "resonant" => Ok(Regime::Resonant),
            "weak" => Ok(Regime::Weak),
            "high-temperature" | "high-t" | "hight" => Ok(Regime::HighTemperature),
            other => Err(Error::InvalidModel(format!(
                "unknown regime '{other}'; expected full, resonant, weak, or high-temperature"
            ))),
        }
    }
}

/// Dressed single-excitation quantities shared by every regime.
#[derive(Debug, Clone, Copy)]
pub struct PolaronQuantities {
    /// Dressing factor B.
    pub dressing: f64,
    /// Renormalized exchange V_R = B V.
    pub v_renorm: f64,
    /// Dressed splitting eta = sqrt(eps^2 + 4 V_R^2).
    pub eta: f64,
}

impl PolaronQuantities {
    pub fn compute(system: &SystemModel, dressing: f64) -> Self {
        let v_renorm = dressing * system.coupling;
        PolaronQuantities {
            dressing,
            v_renorm,
            eta: system.bias.hypot(2.0 * v_renorm),
        }
    }
}

/// The scalar rates and shifts entering the generator. Entries not used by
/// a regime are zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct RateSet {
    pub regime: Option<Regime>,
    /// Decay of the x coherence.
    pub gamma_x: f64,
    /// Decay of the y coherence.
    pub gamma_y: f64,
    /// Decay of the population difference.
    pub gamma_z: f64,
    /// Bias-axis frequency shifts of the x and y rows.
    pub lambda_1: f64,
    pub lambda_2: f64,
    /// Shift of the exchange frequency in the z row.
    pub lambda_3: f64,
    /// Cross-relaxation feeding x from z.
    pub zeta: f64,
    /// Inhomogeneous drives.
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub kappa_z: f64,
}

/// Assembled Bloch generator: da/dt = M a + b.
#[derive(Debug, Clone)]
pub struct Generator {
    pub system: SystemModel,
    pub quantities: PolaronQuantities,
    pub rates: RateSet,
    /// Inverse temperature of the bath the rates were computed against.
    pub beta: f64,
    matrix: Matrix3<f64>,
    drive: Vector3<f64>,
    xi_squared: Option<f64>,
}

impl Generator {
    /// Build the generator for `regime` from shared correlator responses.
    pub fn build(regime: Regime, system: &SystemModel, responses: &ResponseSet) -> Result<Self> {
        system.validate()?;
        match regime {
            Regime::Full => build_full(system, responses),
            Regime::Resonant => build_resonant(system, responses),
            Regime::Weak => build_weak(system, responses),
            Regime::HighTemperature => build_high_temperature(system, responses),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn drive(&self) -> &Vector3<f64> {
        &self.drive
    }

    /// Squared frequency of the coherent y-z mode, where the regime admits
    /// one in closed form (resonant and weak; full only at zero bias).
    /// Negative values mean the mode is overdamped.
    pub fn xi_squared(&self) -> Option<f64> {
        self.xi_squared
    }

    /// Construct directly from parts; used by solvers that perturb rates
    /// and by tests probing degenerate configurations.
    pub fn from_parts(
        system: SystemModel,
        quantities: PolaronQuantities,
        rates: RateSet,
        beta: f64,
        matrix: Matrix3<f64>,
        drive: Vector3<f64>,
        xi_squared: Option<f64>,
    ) -> Self {
        Generator {
            system,
            quantities,
            rates,
            beta,
            matrix,
            drive,
            xi_squared,
        }
    }
}

/// Discriminant of the resonant y-z mode: xi^2 = 8 V_R (2 V_R + lambda_3)
/// - (gamma_z - gamma_y)^2.
pub(crate) fn resonant_xi_squared(q: &PolaronQuantities, r: &RateSet) -> f64 {
    8.0 * q.v_renorm * (2.0 * q.v_renorm + r.lambda_3) - (r.gamma_z - r.gamma_y).powi(2)
}

fn build_full(system: &SystemModel, responses: &ResponseSet) -> Result<Generator> {
    let q = PolaronQuantities::compute(system, responses.dressing());
    let (eps, v, b) = (system.bias, system.coupling, q.dressing);
    let (vr, eta) = (q.v_renorm, q.eta);
    let v2 = v * v;

    let gxx_0 = responses.response(Axis::X, 0.0)?;
    let gxx_p = responses.response(Axis::X, eta)?;
    let gxx_m = responses.response(Axis::X, -eta)?;
    let gyy_p = responses.response(Axis::Y, eta)?;
    let gyy_m = responses.response(Axis::Y, -eta)?;

    // direction cosines of the dressed eigenbasis
    let (ce, cv) = if eta > 0.0 {
        (eps / eta, 2.0 * vr / eta)
    } else {
        (0.0, 0.0)
    };

    let gamma_x = v2 * (gyy_p.gamma + gyy_m.gamma);
    let gamma_y = 2.0 * v2 * (cv * cv * gxx_0.gamma + 0.5 * ce * ce * (gxx_p.gamma + gxx_m.gamma));
    let gamma_z = gamma_x + gamma_y;
    let lambda_1 = 2.0 * v2 * ce * (gyy_p.shift - gyy_m.shift);
    let lambda_2 = 2.0 * v2 * ce * (gxx_p.shift - gxx_m.shift);
    let lambda_3 = 2.0 * v2 * cv * (gyy_p.shift - gyy_m.shift);
    let zeta = 2.0 * v2 * cv * ce * (gxx_0.gamma - 0.5 * (gxx_p.gamma + gxx_m.gamma));
    let kappa_x = v2 * cv * (gyy_p.gamma - gyy_m.gamma);
    let kappa_y = 4.0 * v2 * cv * ce * (gxx_0.shift - 0.5 * (gxx_p.shift + gxx_m.shift));
    let kappa_z = v2 * ce * (gxx_p.gamma - gxx_m.gamma + gyy_p.gamma - gyy_m.gamma);

    let rates = RateSet {
        regime: Some(Regime::Full),
        gamma_x,
        gamma_y,
        gamma_z,
        lambda_1,
        lambda_2,
        lambda_3,
        zeta,
        kappa_x,
        kappa_y,
        kappa_z,
    };
    let matrix = Matrix3::new(
        -gamma_x,
        -(eps + lambda_1),
        0.0,
        eps + lambda_2,
        -gamma_y,
        -2.0 * b * vr,
        zeta / b,
        (2.0 * vr + lambda_3) / b,
        -gamma_z,
    );
    let drive = Vector3::new(-b * kappa_x, -b * kappa_y, -kappa_z);
    let xi_squared = system
        .is_resonant()
        .then(|| resonant_xi_squared(&q, &rates));
    Ok(Generator {
        system: *system,
        quantities: q,
        rates,
        beta: responses.propagator().thermal().beta,
        matrix,
        drive,
        xi_squared,
    })
}

fn build_resonant(system: &SystemModel, responses: &ResponseSet) -> Result<Generator> {
    if !system.is_resonant() {
        return Err(Error::BiasNotZero(system.bias));
    }
    let q = PolaronQuantities::compute(system, responses.dressing());
    let (v, b, vr) = (system.coupling, q.dressing, q.v_renorm);
    let v2 = v * v;
    let two_vr = 2.0 * vr;

    let gxx_0 = responses.response(Axis::X, 0.0)?;
    let gyy_p = responses.response(Axis::Y, two_vr)?;
    let gyy_m = responses.response(Axis::Y, -two_vr)?;

    let gamma_x = v2 * (gyy_p.gamma + gyy_m.gamma);
    let gamma_y = 2.0 * v2 * gxx_0.gamma;
    let gamma_z = gamma_x + gamma_y;
    let lambda_3 = 2.0 * v2 * (gyy_p.shift - gyy_m.shift);
    let kappa_x = v2 * (gyy_p.gamma - gyy_m.gamma);

    let rates = RateSet {
        regime: Some(Regime::Resonant),
        gamma_x,
        gamma_y,
        gamma_z,
        lambda_3,
        kappa_x,
        ..RateSet::default()
    };
    let matrix = Matrix3::new(
        -gamma_x,
        0.0,
        0.0,
        0.0,
        -gamma_y,
        -b * two_vr,
        0.0,
        (two_vr + lambda_3) / b,
        -gamma_z,
    );
    let drive = Vector3::new(-b * kappa_x, 0.0, 0.0);
    let xi_squared = Some(resonant_xi_squared(&q, &rates));
    Ok(Generator {
        system: *system,
        quantities: q,
        rates,
        beta: responses.propagator().thermal().beta,
        matrix,
        drive,
        xi_squared,
    })
}

fn build_weak(system: &SystemModel, responses: &ResponseSet) -> Result<Generator> {
    let q = PolaronQuantities::compute(system, responses.dressing());
    let (eps, v, b) = (system.bias, system.coupling, q.dressing);
    let (vr, eta) = (q.v_renorm, q.eta);
    let bath = responses.propagator().bath();
    let thermal = responses.propagator().thermal();

    // one-phonon golden-rule decay at the dressed splitting:
    //   Gamma = 4 pi (V_R/eta)^2 J(eta) (1 - F(eta/mu)) coth(beta eta / 2)
    let (gamma_w, kappa_x, kappa_z) = if eta > 0.0 && vr > 0.0 {
        let weight = bath.spectral_density(eta) * (1.0 - bath.spatial_kernel(eta));
        let gamma_w = 4.0 * std::f64::consts::PI * (vr / eta).powi(2)
            * weight
            * thermal.coth_half(eta);
        let th = (0.5 * thermal.beta * eta).tanh();
        // kappa_z written bias-over-splitting so that V -> 0 stays finite
        (
            gamma_w,
            gamma_w * (2.0 * vr / eta) * th,
            gamma_w * (eps / eta) * th,
        )
    } else {
        (0.0, 0.0, 0.0)
    };

    let (lambda_1, lambda_3, shift) = if eta > 0.0 {
        let v2 = v * v;
        let gyy_p = responses.response(Axis::Y, eta)?;
        let gyy_m = responses.response(Axis::Y, -eta)?;
        let shift = 2.0 * v2 * (gyy_p.shift - gyy_m.shift);
        ((eps / eta) * shift, (2.0 * vr / eta) * shift, shift)
    } else {
        (0.0, 0.0, 0.0)
    };

    let rates = RateSet {
        regime: Some(Regime::Weak),
        gamma_x: gamma_w,
        gamma_z: gamma_w,
        lambda_1,
        lambda_3,
        kappa_x,
        kappa_z,
        ..RateSet::default()
    };
    let matrix = Matrix3::new(
        -gamma_w,
        -(eps + lambda_1),
        0.0,
        eps,
        0.0,
        -2.0 * b * vr,
        0.0,
        (2.0 * vr + lambda_3) / b,
        -gamma_w,
    );
    let drive = Vector3::new(-b * kappa_x, 0.0, -kappa_z);
    // underdamped mode of the weak generator: 4 eta (eta + shift) - Gamma^2
    let xi_squared = Some(4.0 * eta * (eta + shift) - gamma_w * gamma_w);
    Ok(Generator {
        system: *system,
        quantities: q,
        rates,
        beta: responses.propagator().thermal().beta,
        matrix,
        drive,
        xi_squared,
    })
}

fn build_high_temperature(system: &SystemModel, responses: &ResponseSet) -> Result<Generator> {
    let q = PolaronQuantities::compute(system, responses.dressing());
    let (eps, v, b) = (system.bias, system.coupling, q.dressing);
    let (vr, eta) = (q.v_renorm, q.eta);
    let v2 = v * v;

    let gxx_p = responses.response(Axis::X, eta)?;
    let gxx_m = responses.response(Axis::X, -eta)?;
    let gyy_p = responses.response(Axis::Y, eta)?;
    let gyy_m = responses.response(Axis::Y, -eta)?;

    let gamma_y = v2 * (gxx_p.gamma + gxx_m.gamma);
    let gamma_z = gamma_y + v2 * (gyy_p.gamma + gyy_m.gamma);
    let lambda_1 = 2.0 * v2 * (gyy_p.shift - gyy_m.shift);
    let lambda_2 = 2.0 * v2 * (gxx_p.shift - gxx_m.shift);
    let kappa_z = v2 * (gxx_p.gamma - gxx_m.gamma + gyy_p.gamma - gyy_m.gamma);

    let rates = RateSet {
        regime: Some(Regime::HighTemperature),
        gamma_x: gamma_z - gamma_y,
        gamma_y,
        gamma_z,
        lambda_1,
        lambda_2,
        kappa_z,
        ..RateSet::default()
    };
    let matrix = Matrix3::new(
        -(gamma_z - gamma_y),
        -(eps + lambda_1),
        0.0,
        eps + lambda_2,
        -gamma_y,
        -2.0 * b * vr,
        0.0,
        2.0 * vr / b,
        -gamma_z,
    );
    let drive = Vector3::new(0.0, 0.0, -kappa_z);
    Ok(Generator {
        system: *system,
        quantities: q,
        rates,
        beta: responses.propagator().thermal().beta,
        matrix,
        drive,
        xi_squared: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{BathModel, Mu, Propagator, ThermalState};
    use approx::assert_relative_eq;

    fn responses(alpha: f64, omega_c: f64, mu: Mu, t: f64) -> ResponseSet {
        let bath = BathModel::three_dimensional(alpha, omega_c, mu);
        let p = Propagator::new(bath, ThermalState::new(t).unwrap()).unwrap();
        ResponseSet::new(p)
    }

    fn fig_responses(t: f64) -> ResponseSet {
        responses(0.05, 4.0, Mu::Finite(0.5), t)
    }

    #[test]
    fn resonant_equals_full_at_zero_bias() {
        let rs = fig_responses(5.0);
        let system = SystemModel::new(0.0, 0.5).unwrap();
        let full = Generator::build(Regime::Full, &system, &rs).unwrap();
        let res = Generator::build(Regime::Resonant, &system, &rs).unwrap();
        let dm = (full.matrix() - res.matrix()).abs().max();
        let db = (full.drive() - res.drive()).abs().max();
        assert!(dm < 1e-10, "matrix deviation {dm}");
        assert!(db < 1e-10, "drive deviation {db}");
        assert_relative_eq!(
            full.xi_squared().unwrap(),
            res.xi_squared().unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn resonant_reference_rates() {
        // V = 1/2 at the reference bath: gamma_y = 2 V^2 gamma_xx(0)
        let rs = fig_responses(5.0);
        let system = SystemModel::new(0.0, 0.5).unwrap();
        let g = Generator::build(Regime::Resonant, &system, &rs).unwrap();
        assert_relative_eq!(
            g.rates.gamma_y,
            2.0 * 0.25 * 0.0785412857685862852,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            g.rates.gamma_x,
            0.25 * (0.0499778789849 + 0.0484024798837),
            max_relative = 1e-8
        );
        assert_relative_eq!(g.quantities.v_renorm, 0.0800735938827069371, max_relative = 1e-10);
        // drives oppose the population gradient: kappa_x > 0 here
        assert!(g.rates.kappa_x > 0.0);
        assert!(g.drive()[0] < 0.0);
    }

    #[test]
    fn decoupled_environment_keeps_bare_coherent_motion() {
        // alpha = 0: every kernel vanishes, B = 1, and the generator is the
        // bare precession with eigenvalues {0, +-2iV}.
        let rs = responses(0.0, 4.0, Mu::Finite(0.5), 5.0);
        let system = SystemModel::new(0.0, 0.5).unwrap();
        let g = Generator::build(Regime::Full, &system, &rs).unwrap();
        assert_eq!(g.quantities.dressing, 1.0);
        assert!(g.rates.gamma_x.abs() < 1e-14);
        assert!(g.rates.gamma_y.abs() < 1e-14);
        assert!(g.rates.gamma_z.abs() < 1e-14);
        let mut eigs = crate::dynamics::eigen_frequencies(g.matrix())
            .unwrap()
            .map(|z| (z.re, z.im));
        eigs.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        for (re, _) in eigs {
            assert!(re.abs() < 1e-12, "expected purely imaginary spectrum");
        }
        assert_relative_eq!(eigs[0].1, -1.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[1].1, 0.0, epsilon = 1e-12);
        assert_relative_eq!(eigs[2].1, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn resonant_requires_zero_bias() {
        let rs = fig_responses(5.0);
        let system = SystemModel::new(0.4, 0.5).unwrap();
        assert!(matches!(
            Generator::build(Regime::Resonant, &system, &rs),
            Err(Error::BiasNotZero(b)) if b == 0.4
        ));
    }

    #[test]
    fn weak_approaches_full_at_small_coupling() {
        let rs = responses(1e-3, 4.0, Mu::Finite(0.5), 1.0);
        let system = SystemModel::new(1.0, 0.5).unwrap();
        let full = Generator::build(Regime::Full, &system, &rs).unwrap();
        let weak = Generator::build(Regime::Weak, &system, &rs).unwrap();
        assert_relative_eq!(
            weak.rates.gamma_x,
            full.rates.gamma_x,
            max_relative = 0.05
        );
        assert_relative_eq!(
            weak.rates.kappa_x,
            full.rates.kappa_x,
            max_relative = 0.05
        );
        assert_relative_eq!(
            weak.rates.lambda_3,
            full.rates.lambda_3,
            max_relative = 0.05
        );
    }

    #[test]
    fn decoupled_exchange_precesses_only() {
        // V = 0: no relaxation at all, only bias rotation in x-y
        let rs = fig_responses(5.0);
        let system = SystemModel::new(0.8, 0.0).unwrap();
        for regime in [Regime::Full, Regime::Weak, Regime::HighTemperature] {
            let g = Generator::build(regime, &system, &rs).unwrap();
            assert_eq!(g.rates.gamma_z, 0.0, "{regime}");
            assert_eq!(g.drive().norm(), 0.0, "{regime}");
            assert_relative_eq!(g.matrix()[(0, 1)], -0.8, max_relative = 1e-12);
            assert_relative_eq!(g.matrix()[(1, 0)], 0.8, max_relative = 1e-12);
            assert_eq!(g.matrix()[(2, 2)], 0.0, "{regime}");
        }
    }

    #[test]
    fn coinciding_sites_give_pure_precession() {
        let rs = responses(0.05, 4.0, Mu::Infinite, 5.0);
        let system = SystemModel::new(0.3, 0.5).unwrap();
        let g = Generator::build(Regime::Full, &system, &rs).unwrap();
        assert_eq!(g.quantities.dressing, 1.0);
        let m = g.matrix();
        let expect = Matrix3::new(0.0, -0.3, 0.0, 0.3, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert!((m - expect).abs().max() < 1e-12);
        assert_eq!(g.drive().norm(), 0.0);
    }

    #[test]
    fn rates_are_nonnegative_and_additive() {
        let rs = fig_responses(12.0);
        let system = SystemModel::new(1.0, 0.5).unwrap();
        let g = Generator::build(Regime::Full, &system, &rs).unwrap();
        assert!(g.rates.gamma_x >= 0.0);
        assert!(g.rates.gamma_y >= 0.0);
        assert_relative_eq!(
            g.rates.gamma_z,
            g.rates.gamma_x + g.rates.gamma_y,
            max_relative = 1e-14
        );
    }

    #[test]
    fn high_temperature_structure() {
        let rs = fig_responses(20.0);
        let system = SystemModel::new(1.0, 0.5).unwrap();
        let g = Generator::build(Regime::HighTemperature, &system, &rs).unwrap();
        // drives act on z only, and the z row carries the bare dressed
        // exchange without a shift
        assert_eq!(g.drive()[0], 0.0);
        assert_eq!(g.drive()[1], 0.0);
        assert!(g.drive()[2] != 0.0);
        assert_relative_eq!(
            g.matrix()[(2, 1)],
            2.0 * g.quantities.v_renorm / g.quantities.dressing,
            max_relative = 1e-14
        );
        assert!(g.xi_squared().is_none());
    }

    #[test]
    fn regime_names_roundtrip() {
        for (name, want) in [
            ("full", Regime::Full),
            ("resonant", Regime::Resonant),
            ("weak", Regime::Weak),
            ("high-temperature", Regime::HighTemperature),
            ("high_t", Regime::HighTemperature),
            ("HIGH-T", Regime::HighTemperature),
        ] {
            assert_eq!(name.parse::<Regime>().unwrap(), want);
        }
        assert!("bogus".parse::<Regime>().is_err());
        assert_eq!(
            serde_json::from_str::<Regime>("\"high-temperature\"").unwrap(),
            Regime::HighTemperature
        );
        assert_eq!(Regime::Weak.to_string(), "weak");
    }

    #[test]
    fn invalid_systems_are_rejected() {
        assert!(SystemModel::new(f64::NAN, 0.5).is_err());
        assert!(SystemModel::new(0.0, -0.5).is_err());
        assert!(SystemModel::new(0.0, f64::INFINITY).is_err());
    }
}

//! Gas constants and Sutherland's law.

use super::FlowPhysics;
use crate::error::Error;
use crate::num::Scalar;
use crate::Result;

/// Calorically perfect gas. The nondimensional heat capacity c_v is chosen so
/// that T = p/((gamma-1) c_v rho) gives T_inf = 1 with the free-stream
/// sound-speed scaling.
#[derive(Clone, Copy, Debug)]
pub struct GasModel {
    pub gamma: f64,
    pub prandtl: f64,
    /// Sutherland C1 [kg/(m s sqrt(K))]
    pub sutherland_c1: f64,
    /// Sutherland C2 [K]
    pub sutherland_c2: f64,
}

impl GasModel {
    pub fn air() -> Self {
        GasModel {
            gamma: 1.4,
            prandtl: 0.72,
            sutherland_c1: 1.458e-6,
            sutherland_c2: 110.4,
        }
    }

    pub fn c_v(&self) -> f64 {
        1.0 / (self.gamma * (self.gamma - 1.0))
    }
}

/// Dimensional Sutherland viscosity mu(T) = C1 T^{3/2} / (T + C2), T in K.
pub fn sutherland_viscosity(gas: &GasModel, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("temperature {t} must be positive")));
    }
    Ok(gas.sutherland_c1 * t.powf(1.5) / (t + gas.sutherland_c2))
}

/// Nondimensional viscosity at nondimensional temperature T (T_inf = 1):
/// mu_inf * (T^{3/2} (1 + S)) / (T + S) with S = C2 / T_ref.
pub fn sutherland_nondim<S: Scalar>(flow: &FlowPhysics, t: S) -> S {
    let s = flow.gas.sutherland_c2 / flow.t_ref;
    let num = t.powf(1.5).scale(1.0 + s);
    num.scale(flow.mu_inf()) / (t + S::from_f64(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sutherland_reference_value() {
        // mu(273.15 K) for air
        let mu = sutherland_viscosity(&GasModel::air(), 273.15).unwrap();
        assert!((mu - 1.716e-5).abs() < 1e-8, "mu = {mu}");
    }

    #[test]
    fn sutherland_monotone_on_physical_range() {
        let gas = GasModel::air();
        let mut prev = 0.0;
        let mut t = 100.0;
        while t <= 2000.0 {
            let mu = sutherland_viscosity(&gas, t).unwrap();
            assert!(mu > prev);
            prev = mu;
            t += 25.0;
        }
    }

    #[test]
    fn sutherland_rejects_nonpositive_temperature() {
        assert!(sutherland_viscosity(&GasModel::air(), 0.0).is_err());
        assert!(sutherland_viscosity(&GasModel::air(), -5.0).is_err());
    }

    #[test]
    fn nondim_matches_freestream() {
        let flow = FlowPhysics::new(GasModel::air(), 0.5, 0.0, 5000.0);
        let mu: f64 = sutherland_nondim(&flow, 1.0);
        assert!((mu - flow.mu_inf()).abs() < 1e-15);
        // ratio agrees with the dimensional law
        let t_nd: f64 = 1.3;
        let expect = flow.mu_inf()
            * sutherland_viscosity(&flow.gas, 1.3 * flow.t_ref).unwrap()
            / sutherland_viscosity(&flow.gas, flow.t_ref).unwrap();
        let got: f64 = sutherland_nondim(&flow, t_nd);
        assert!((got - expect).abs() < 1e-12 * expect);
    }
}

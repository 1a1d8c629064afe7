//! Flux functions, material laws, boundary states and output functionals for
//! the three supported models: scalar convection-diffusion (verification),
//! 2D Euler and 2D laminar Navier-Stokes.
//!
//! Flux and boundary-state routines are generic over [`Scalar`], so the same
//! code produces residual values on `f64` and exact derivatives on dual
//! numbers during Jacobian assembly.

pub mod euler;
pub mod functional;
pub mod gas;

pub use functional::{FunctionalKind, TargetFunctional};
pub use gas::GasModel;

use crate::error::Error;
use crate::geom::V2;
use crate::num::Scalar;
use crate::Result;
use std::collections::HashMap;
use std::sync::Arc;

/// Maximum number of conserved components (m = 4 for Euler/Navier-Stokes).
pub const MAX_M: usize = 4;

pub type StateA<S> = [S; MAX_M];
pub type GradA<S> = [[S; 2]; MAX_M];
pub type FluxA<S> = [[S; 2]; MAX_M];

pub fn zero_state<S: Scalar>() -> StateA<S> {
    [S::from_f64(0.0); MAX_M]
}

pub fn zero_flux<S: Scalar>() -> FluxA<S> {
    [[S::from_f64(0.0); 2]; MAX_M]
}

/// Scalar linear convection-diffusion: f_c = b w, f_v = nu q.
#[derive(Clone, Copy, Debug)]
pub struct ScalarConvDiff {
    pub velocity: V2,
    pub diffusivity: f64,
}

/// Gas state and nondimensionalization for the flow models. Free-stream
/// density and sound speed are the scales, so rho_inf = 1, p_inf = 1/gamma,
/// |v_inf| = Ma and T_inf = 1.
#[derive(Clone, Copy, Debug)]
pub struct FlowPhysics {
    pub gas: GasModel,
    pub mach: f64,
    /// angle of attack in radians
    pub alpha: f64,
    /// Reynolds number based on chord and free-stream speed (Navier-Stokes)
    pub reynolds: f64,
    /// dimensional free-stream temperature used by Sutherland's law [K]
    pub t_ref: f64,
}

impl FlowPhysics {
    pub fn new(gas: GasModel, mach: f64, alpha: f64, reynolds: f64) -> Self {
        FlowPhysics {
            gas,
            mach,
            alpha,
            reynolds,
            t_ref: 273.15,
        }
    }

    pub fn p_inf(&self) -> f64 {
        1.0 / self.gas.gamma
    }

    /// Nondimensional free-stream viscosity Ma/Re (chord length 1).
    pub fn mu_inf(&self) -> f64 {
        self.mach / self.reynolds
    }

    pub fn freestream(&self) -> [f64; MAX_M] {
        let g = self.gas.gamma;
        let (u, v) = (self.mach * self.alpha.cos(), self.mach * self.alpha.sin());
        let p = self.p_inf();
        [
            1.0,
            u,
            v,
            p / (g - 1.0) + 0.5 * (u * u + v * v),
        ]
    }
}

#[derive(Clone)]
pub enum Model {
    Scalar(ScalarConvDiff),
    Euler(FlowPhysics),
    NavierStokes(FlowPhysics),
}

impl Model {
    pub fn m(&self) -> usize {
        match self {
            Model::Scalar(_) => 1,
            _ => MAX_M,
        }
    }

    /// Whether the model has a gradient unknown (viscous terms present).
    pub fn is_viscous(&self) -> bool {
        match self {
            Model::Scalar(s) => s.diffusivity > 0.0,
            Model::Euler(_) => false,
            Model::NavierStokes(_) => true,
        }
    }

    pub fn flow(&self) -> Option<&FlowPhysics> {
        match self {
            Model::Euler(f) | Model::NavierStokes(f) => Some(f),
            Model::Scalar(_) => None,
        }
    }

    /// rho > 0 and p > 0 for the flow models.
    pub fn check_admissible(&self, w: &[f64; MAX_M], elem: Option<usize>) -> Result<()> {
        if let Some(flow) = self.flow() {
            let rho = w[0];
            let p = (flow.gas.gamma - 1.0) * (w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / rho);
            if !(rho > 0.0 && p > 0.0) || !rho.is_finite() || !p.is_finite() {
                return Err(Error::NonAdmissible { elem, rho, p });
            }
        }
        Ok(())
    }

    /// Convective flux f_c(w), m×d.
    pub fn conv_flux<S: Scalar>(&self, w: &StateA<S>) -> FluxA<S> {
        match self {
            Model::Scalar(s) => {
                let mut f = zero_flux();
                f[0][0] = w[0].scale(s.velocity.x);
                f[0][1] = w[0].scale(s.velocity.y);
                f
            }
            Model::Euler(flow) | Model::NavierStokes(flow) => euler::conv_flux(&flow.gas, w),
        }
    }

    /// Viscous flux f_v(w, q), m×d. Zero for Euler.
    pub fn visc_flux<S: Scalar>(&self, w: &StateA<S>, q: &GradA<S>) -> FluxA<S> {
        match self {
            Model::Scalar(s) => {
                let mut f = zero_flux();
                f[0][0] = q[0][0].scale(s.diffusivity);
                f[0][1] = q[0][1].scale(s.diffusivity);
                f
            }
            Model::Euler(_) => zero_flux(),
            Model::NavierStokes(flow) => euler::visc_flux(flow, w, q),
        }
    }

    /// Largest characteristic speed normal to `n` (for stabilization and
    /// Lax-Friedrichs dissipation).
    pub fn max_wave_speed(&self, w: &[f64; MAX_M], n: V2) -> f64 {
        match self {
            Model::Scalar(s) => (s.velocity.dot(n)).abs(),
            Model::Euler(flow) | Model::NavierStokes(flow) => {
                let g = flow.gas.gamma;
                let rho = w[0];
                let vn = (w[1] * n.x + w[2] * n.y) / rho;
                let p = (g - 1.0) * (w[3] - 0.5 * (w[1] * w[1] + w[2] * w[2]) / rho);
                let c = (g * p / rho).sqrt();
                vn.abs() + c
            }
        }
    }

    /// Rough kinematic-viscosity scale for stabilization defaults.
    pub fn viscosity_scale(&self, w: &[f64; MAX_M]) -> f64 {
        match self {
            Model::Scalar(s) => s.diffusivity,
            Model::Euler(_) => 0.0,
            Model::NavierStokes(flow) => {
                let t: f64 = euler::temperature(&flow.gas, w);
                let mu = gas::sutherland_nondim(flow, t.max(1e-8));
                mu / w[0] * (flow.gas.gamma / flow.gas.prandtl).max(4.0 / 3.0)
            }
        }
    }
}

/// Boundary condition attached to a boundary tag.
#[derive(Clone)]
pub enum Bc {
    SlipWall,
    NoSlipAdiabatic,
    Farfield,
    /// Position-dependent Dirichlet data (manufactured solutions).
    Dirichlet(Arc<dyn Fn(V2) -> [f64; MAX_M] + Send + Sync>),
}

/// Tag-to-condition map for a problem.
#[derive(Clone, Default)]
pub struct BcSet {
    map: HashMap<String, Bc>,
}

impl BcSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tag: impl Into<String>, bc: Bc) {
        self.map.insert(tag.into(), bc);
    }

    pub fn with(mut self, tag: impl Into<String>, bc: Bc) -> Self {
        self.insert(tag, bc);
        self
    }

    pub fn get(&self, tag: &str) -> Result<&Bc> {
        self.map
            .get(tag)
            .ok_or_else(|| Error::Config(format!("no boundary condition for tag '{tag}'")))
    }

    /// Tags with wall conditions (where force functionals integrate).
    pub fn wall_tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self
            .map
            .iter()
            .filter(|(_, bc)| matches!(bc, Bc::SlipWall | Bc::NoSlipAdiabatic))
            .map(|(t, _)| t.clone())
            .collect();
        tags.sort();
        tags
    }
}

/// Position-dependent source term (zero when absent).
pub type SourceFn = Option<Arc<dyn Fn(V2) -> [f64; MAX_M] + Send + Sync>>;

/// Boundary-state map w_dOmega(w); generic so Jacobian assembly can seed `w`.
pub fn boundary_state<S: Scalar>(
    model: &Model,
    bc: &Bc,
    w: &StateA<S>,
    n: V2,
    x: V2,
) -> Result<StateA<S>> {
    match (bc, model) {
        (Bc::Dirichlet(g), _) => {
            let gv = g(x);
            let mut out = zero_state();
            for i in 0..model.m() {
                out[i] = S::from_f64(gv[i]);
            }
            Ok(out)
        }
        (Bc::SlipWall, Model::Euler(_) | Model::NavierStokes(_)) => {
            // (rho, (Id - n otimes n) rho v, E)
            let vn = w[1].scale(n.x) + w[2].scale(n.y);
            Ok([
                w[0],
                w[1] - vn.scale(n.x),
                w[2] - vn.scale(n.y),
                w[3],
            ])
        }
        (Bc::NoSlipAdiabatic, Model::NavierStokes(_)) => {
            Ok([w[0], S::from_f64(0.0), S::from_f64(0.0), w[3]])
        }
        (Bc::Farfield, Model::Euler(flow) | Model::NavierStokes(flow)) => {
            Ok(euler::farfield_state(flow, w, n))
        }
        _ => Err(Error::Config(
            "boundary condition incompatible with the active model".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_model() -> Model {
        Model::Euler(FlowPhysics::new(GasModel::air(), 0.5, 0.0, 0.0))
    }

    #[test]
    fn rest_state_flux() {
        let model = euler_model();
        let w = [1.0, 0.0, 0.0, 2.5];
        let f = model.conv_flux(&w);
        // p = 0.4 * 2.5 = 1
        assert_eq!(f[0], [0.0, 0.0]);
        assert!((f[1][0] - 1.0).abs() < 1e-15 && f[1][1].abs() < 1e-15);
        assert!(f[2][0].abs() < 1e-15 && (f[2][1] - 1.0).abs() < 1e-15);
        assert_eq!(f[3], [0.0, 0.0]);
    }

    #[test]
    fn moving_state_flux_matches_direct_evaluation() {
        let model = euler_model();
        let w = [1.0, 1.0, 0.0, 2.5];
        let f = model.conv_flux(&w);
        // p = 0.4 (2.5 - 0.5) = 0.8
        assert!((f[1][0] - (1.0 + 0.8)).abs() < 1e-15);
        assert_eq!(f[0], [1.0, 0.0]);
        assert!((f[3][0] - (2.5 + 0.8)).abs() < 1e-14);
    }

    #[test]
    fn scalar_flux() {
        let model = Model::Scalar(ScalarConvDiff {
            velocity: V2::new(1.0, 0.0),
            diffusivity: 0.0,
        });
        let f = model.conv_flux(&[3.0, 0.0, 0.0, 0.0]);
        assert_eq!(f[0], [3.0, 0.0]);
    }

    #[test]
    fn slip_wall_kills_normal_velocity() {
        let model = euler_model();
        let n = V2::new(0.0, 1.0);
        let w = [1.0, 1.0, 1.0, 5.0];
        let wb: StateA<f64> =
            boundary_state(&model, &Bc::SlipWall, &w, n, V2::ZERO).unwrap();
        assert_eq!(wb, [1.0, 1.0, 0.0, 5.0]);
        // v_n(w_b) = 0 exactly for random normals
        let n = V2::new(0.6, 0.8);
        let wb: StateA<f64> =
            boundary_state(&model, &Bc::SlipWall, &w, n, V2::ZERO).unwrap();
        assert!((wb[1] * n.x + wb[2] * n.y).abs() < 1e-15);
    }

    #[test]
    fn no_slip_zeroes_momentum() {
        let model = Model::NavierStokes(FlowPhysics::new(GasModel::air(), 0.5, 0.0, 5000.0));
        let wb: StateA<f64> = boundary_state(
            &model,
            &Bc::NoSlipAdiabatic,
            &[1.0, 1.0, 1.0, 5.0],
            V2::new(1.0, 0.0),
            V2::ZERO,
        )
        .unwrap();
        assert_eq!(wb, [1.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn admissibility() {
        let model = euler_model();
        assert!(model.check_admissible(&[1.0, 0.0, 0.0, 2.5], None).is_ok());
        assert!(model
            .check_admissible(&[-1.0, 0.0, 0.0, 2.5], Some(7))
            .is_err());
        // negative pressure
        let err = model
            .check_admissible(&[1.0, 3.0, 0.0, 2.5], Some(7))
            .unwrap_err();
        assert!(err.to_string().contains("element 7"));
    }
}

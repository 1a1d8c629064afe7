//! Output functionals: weighted wall forces (drag/lift) and volume-weighted
//! averages for manufactured cases.

use super::{boundary_state, euler, Bc, BcSet, Model, StateA, MAX_M};
use crate::error::Error;
use crate::geom::V2;
use crate::mesh::Mesh;
use crate::num::Scalar;
use crate::space::tables::{elem_edge_table, local_edge_point, volume_table};
use crate::space::DegreeMap;
use crate::Result;
use nalgebra::DVector;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalKind {
    PressureDrag,
    PressureLift,
    ViscousDrag,
    ViscousLift,
    MmsVolume,
}

impl FunctionalKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "pressure-drag" => FunctionalKind::PressureDrag,
            "pressure-lift" => FunctionalKind::PressureLift,
            "viscous-drag" => FunctionalKind::ViscousDrag,
            "viscous-lift" => FunctionalKind::ViscousLift,
            "mms-volume" => FunctionalKind::MmsVolume,
            other => {
                return Err(Error::Config(format!("unknown functional '{other}'")))
            }
        })
    }

    pub fn needs_viscous(&self) -> bool {
        matches!(self, FunctionalKind::ViscousDrag | FunctionalKind::ViscousLift)
    }

    fn is_lift(&self) -> bool {
        matches!(self, FunctionalKind::PressureLift | FunctionalKind::ViscousLift)
    }
}

/// Normalization C_inf = 1/2 gamma Ma^2 p_inf l.
pub fn force_reference(gamma: f64, mach: f64, p_inf: f64, chord: f64) -> f64 {
    0.5 * gamma * mach * mach * p_inf * chord
}

#[derive(Clone)]
pub struct TargetFunctional {
    pub kind: FunctionalKind,
    /// force normalization (1 for volume functionals)
    pub c_inf: f64,
    /// angle of attack the force direction is built from
    pub alpha: f64,
    /// weight of the volume functional
    pub volume_weight: Option<Arc<dyn Fn(V2) -> [f64; MAX_M] + Send + Sync>>,
}

impl TargetFunctional {
    pub fn force(kind: FunctionalKind, model: &Model) -> Result<Self> {
        let flow = model.flow().ok_or_else(|| {
            Error::Config("force functionals need a flow model".into())
        })?;
        if kind.needs_viscous() && !matches!(model, Model::NavierStokes(_)) {
            return Err(Error::Config(
                "functional requires viscous terms but the model is inviscid".into(),
            ));
        }
        Ok(TargetFunctional {
            kind,
            c_inf: force_reference(flow.gas.gamma, flow.mach, flow.p_inf(), 1.0),
            alpha: flow.alpha,
            volume_weight: None,
        })
    }

    pub fn volume(weight: Arc<dyn Fn(V2) -> [f64; MAX_M] + Send + Sync>) -> Self {
        TargetFunctional {
            kind: FunctionalKind::MmsVolume,
            c_inf: 1.0,
            alpha: 0.0,
            volume_weight: Some(weight),
        }
    }

    /// Boundary weight vector psi on wall boundaries.
    pub fn psi(&self) -> V2 {
        let dir = if self.kind.is_lift() {
            V2::new(-self.alpha.sin(), self.alpha.cos())
        } else {
            V2::new(self.alpha.cos(), self.alpha.sin())
        };
        dir * (1.0 / self.c_inf)
    }
}

/// Per-point integrand psi . (p n - tau n) of the force functionals,
/// evaluated at the boundary state; generic for the adjoint linearization.
pub fn force_integrand<S: Scalar>(
    functional: &TargetFunctional,
    model: &Model,
    bc: &Bc,
    w: &StateA<S>,
    q: &[[S; 2]; MAX_M],
    n: V2,
    x: V2,
) -> Result<S> {
    let flow = model.flow().expect("force functional checked at build");
    let wb = boundary_state(model, bc, w, n, x)?;
    let psi = functional.psi();
    let p = euler::pressure(&flow.gas, &wb);
    let mut val = p.scale(psi.x * n.x + psi.y * n.y);
    if functional.kind.needs_viscous() {
        let fv = model.visc_flux(&wb, q);
        // tau n rows are the momentum components of the viscous flux
        let tnx = fv[1][0].scale(n.x) + fv[1][1].scale(n.y);
        let tny = fv[2][0].scale(n.x) + fv[2][1].scale(n.y);
        val = val - tnx.scale(psi.x) - tny.scale(psi.y);
    }
    Ok(val)
}

/// Evaluate the functional on a discrete solution given by per-element state
/// coefficients `w` (and gradient coefficients `q` for viscous models).
pub fn evaluate_functional(
    functional: &TargetFunctional,
    mesh: &Mesh,
    degrees: &DegreeMap,
    model: &Model,
    bcs: &BcSet,
    w: &[DVector<f64>],
    q: Option<&[DVector<f64>]>,
) -> Result<f64> {
    let m = model.m();
    match functional.kind {
        FunctionalKind::MmsVolume => {
            let weight = functional
                .volume_weight
                .as_ref()
                .ok_or_else(|| Error::Config("volume functional without weight".into()))?;
            let mut j = 0.0;
            for k in 0..mesh.n_elements() {
                let p = degrees.p_elem[k];
                let qdeg = 2 * p + 2 + if mesh.is_curved(k) { 4 } else { 0 };
                let tab = volume_table(p, qdeg);
                let n = crate::space::n_modes(p);
                for (iq, pt) in tab.rule.points.iter().enumerate() {
                    let det = mesh.geom_jacobian_det(k, *pt);
                    let x = mesh.geom_eval(k, *pt);
                    let wt = weight(x);
                    let mut val = 0.0;
                    for i in 0..m {
                        let wi: f64 =
                            (0..n).map(|jm| w[k][i * n + jm] * tab.phi[(jm, iq)]).sum();
                        val += wt[i] * wi;
                    }
                    j += tab.rule.weights[iq] * det * val;
                }
            }
            Ok(j)
        }
        _ => {
            if functional.kind.needs_viscous() && q.is_none() {
                return Err(Error::Config(
                    "viscous functional needs gradient coefficients".into(),
                ));
            }
            let mut j = 0.0;
            for be in &mesh.boundary_edges {
                let bc = bcs.get(&be.tag)?;
                if !matches!(bc, Bc::SlipWall | Bc::NoSlipAdiabatic) {
                    continue;
                }
                let k = be.elem;
                let p = degrees.p_elem[k];
                let qdeg = 2 * p + 2 + if mesh.is_curved(k) { 4 } else { 0 };
                let tab = elem_edge_table(p, be.local, qdeg);
                let n = crate::space::n_modes(p);
                for (iq, &s) in tab.rule.points.iter().enumerate() {
                    let xi = local_edge_point(be.local, s);
                    // tangent along the edge gives the surface element and normal
                    let jac = mesh.geom_jacobian(k, xi);
                    let tref = match be.local {
                        0 => (1.0, 0.0),
                        1 => (-1.0, 1.0),
                        _ => (0.0, -1.0),
                    };
                    let tan = V2::new(
                        jac[0][0] * tref.0 + jac[0][1] * tref.1,
                        jac[1][0] * tref.0 + jac[1][1] * tref.1,
                    );
                    let nrm = tan.rot_cw().normalized();
                    let x = mesh.geom_eval(k, xi);
                    let mut wv = super::zero_state::<f64>();
                    for i in 0..m {
                        wv[i] = (0..n).map(|jm| w[k][i * n + jm] * tab.phi[(jm, iq)]).sum();
                    }
                    let mut qv = [[0.0f64; 2]; MAX_M];
                    if let Some(qc) = q {
                        for i in 0..m {
                            for a in 0..2 {
                                qv[i][a] = (0..n)
                                    .map(|jm| qc[k][(i * 2 + a) * n + jm] * tab.phi[(jm, iq)])
                                    .sum();
                            }
                        }
                    }
                    let val =
                        force_integrand(functional, model, bc, &wv, &qv, nrm, x)?;
                    j += tab.rule.weights[iq] * tan.norm() * val;
                }
            }
            Ok(j)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{FlowPhysics, GasModel};

    #[test]
    fn reference_value_direct_evaluation() {
        assert!((force_reference(1.4, 0.5, 1.0, 1.0) - 0.175).abs() < 1e-15);
    }

    #[test]
    fn c_inf_recomputable_from_model() {
        let model = Model::Euler(FlowPhysics::new(GasModel::air(), 0.5, 0.03, 0.0));
        let f = TargetFunctional::force(FunctionalKind::PressureDrag, &model).unwrap();
        let flow = model.flow().unwrap();
        let expect = 0.5 * flow.gas.gamma * flow.mach * flow.mach * flow.p_inf();
        assert!((f.c_inf - expect).abs() < 1e-15);
    }

    #[test]
    fn viscous_functional_rejected_for_euler() {
        let model = Model::Euler(FlowPhysics::new(GasModel::air(), 0.5, 0.0, 0.0));
        assert!(TargetFunctional::force(FunctionalKind::ViscousDrag, &model).is_err());
        assert!(TargetFunctional::force(FunctionalKind::PressureDrag, &model).is_ok());
    }

    #[test]
    fn psi_directions() {
        let model = Model::Euler(FlowPhysics::new(GasModel::air(), 0.5, 0.1, 0.0));
        let drag = TargetFunctional::force(FunctionalKind::PressureDrag, &model).unwrap();
        let lift = TargetFunctional::force(FunctionalKind::PressureLift, &model).unwrap();
        assert!(drag.psi().dot(lift.psi()).abs() < 1e-15);
    }
}

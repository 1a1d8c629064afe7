//! Euler / Navier-Stokes flux functions and the normal-Jacobian eigensystem.

use super::gas::{sutherland_nondim, GasModel};
use super::{zero_flux, FluxA, FlowPhysics, GradA, StateA, MAX_M};
use crate::geom::V2;
use crate::num::Scalar;

pub fn pressure<S: Scalar>(gas: &GasModel, w: &StateA<S>) -> S {
    let half_rho_v2 = (w[1] * w[1] + w[2] * w[2]).scale(0.5) / w[0];
    (w[3] - half_rho_v2).scale(gas.gamma - 1.0)
}

/// Nondimensional temperature T = p/((gamma-1) c_v rho) with T_inf = 1.
pub fn temperature<S: Scalar>(gas: &GasModel, w: &StateA<S>) -> S {
    let p = pressure(gas, w);
    (p / w[0]).scale(gas.gamma)
}

pub fn conv_flux<S: Scalar>(gas: &GasModel, w: &StateA<S>) -> FluxA<S> {
    let p = pressure(gas, w);
    let u = w[1] / w[0];
    let v = w[2] / w[0];
    let ep = w[3] + p;
    [
        [w[1], w[2]],
        [w[1] * u + p, w[1] * v],
        [w[2] * u, w[2] * v + p],
        [ep * u, ep * v],
    ]
}

/// Viscous flux (0, tau, tau v + k grad T) with Sutherland viscosity and the
/// Stokes hypothesis for the stress tensor.
pub fn visc_flux<S: Scalar>(flow: &FlowPhysics, w: &StateA<S>, q: &GradA<S>) -> FluxA<S> {
    let gas = &flow.gas;
    let rho = w[0];
    let u = w[1] / rho;
    let v = w[2] / rho;

    // velocity gradients by the chain rule: grad u = (grad(rho u) - u grad rho)/rho
    let du = [(q[1][0] - u * q[0][0]) / rho, (q[1][1] - u * q[0][1]) / rho];
    let dv = [(q[2][0] - v * q[0][0]) / rho, (q[2][1] - v * q[0][1]) / rho];

    let t = temperature(gas, w);
    let mu = sutherland_nondim(flow, t);

    let div = du[0] + dv[1];
    let txx = mu * (du[0].scale(2.0) - div.scale(2.0 / 3.0));
    let tyy = mu * (dv[1].scale(2.0) - div.scale(2.0 / 3.0));
    let txy = mu * (du[1] + dv[0]);

    // grad T = gamma (gamma-1) (grad(E/rho) - u grad u - v grad v)
    let e_over_rho = w[3] / rho;
    let de = [
        (q[3][0] - e_over_rho * q[0][0]) / rho,
        (q[3][1] - e_over_rho * q[0][1]) / rho,
    ];
    let g1 = gas.gamma * (gas.gamma - 1.0);
    let dt = [
        (de[0] - u * du[0] - v * dv[0]).scale(g1),
        (de[1] - u * du[1] - v * dv[1]).scale(g1),
    ];
    // k = mu / ((gamma-1) Pr) with the nondimensional c_p
    let kcoef = 1.0 / ((gas.gamma - 1.0) * gas.prandtl);

    let mut f = zero_flux();
    f[1] = [txx, txy];
    f[2] = [txy, tyy];
    f[3] = [
        txx * u + txy * v + (mu * dt[0]).scale(kcoef),
        txy * u + tyy * v + (mu * dt[1]).scale(kcoef),
    ];
    f
}

/// Eigendecomposition f_c'(w)·n = Q diag(lam) Q^{-1} with eigenvalue order
/// [v_n, v_n, v_n + c, v_n - c]. Columns of `q` are the right eigenvectors.
pub struct Eigensystem<S> {
    pub q: [[S; MAX_M]; MAX_M],
    pub lam: [S; MAX_M],
    pub qinv: [[S; MAX_M]; MAX_M],
}

pub fn normal_eigensystem<S: Scalar>(gas: &GasModel, w: &StateA<S>, n: V2) -> Eigensystem<S> {
    let g1 = gas.gamma - 1.0;
    let rho = w[0];
    let u = w[1] / rho;
    let v = w[2] / rho;
    let p = pressure(gas, w);
    let c = (p / rho).scale(gas.gamma).sqrt();
    let vn = u.scale(n.x) + v.scale(n.y);
    let vt = v.scale(n.x) - u.scale(n.y);
    let ke = (u * u + v * v).scale(0.5);
    let h = (w[3] + p) / rho;
    let phi2 = ke.scale(g1);
    let c2 = c * c;
    let beta = S::from_f64(0.5) / c2;
    let zero = S::from_f64(0.0);
    let one = S::from_f64(1.0);

    let q = [
        [one, zero, one, one],
        [u, S::from_f64(-n.y), u + c.scale(n.x), u - c.scale(n.x)],
        [v, S::from_f64(n.x), v + c.scale(n.y), v - c.scale(n.y)],
        [ke, vt, h + c * vn, h - c * vn],
    ];
    let lam = [vn, vn, vn + c, vn - c];
    let qinv = [
        [
            one - phi2 / c2,
            u.scale(g1) / c2,
            v.scale(g1) / c2,
            -S::from_f64(g1) / c2,
        ],
        [-vt, S::from_f64(-n.y), S::from_f64(n.x), zero],
        [
            beta * (phi2 - c * vn),
            beta * (c.scale(n.x) - u.scale(g1)),
            beta * (c.scale(n.y) - v.scale(g1)),
            beta.scale(g1),
        ],
        [
            beta * (phi2 + c * vn),
            beta * (-c.scale(n.x) - u.scale(g1)),
            beta * (-c.scale(n.y) - v.scale(g1)),
            beta.scale(g1),
        ],
    ];
    Eigensystem { q, lam, qinv }
}

/// Characteristic far-field state: characteristic variables are taken from
/// the interior where the eigenvalue leaves the domain and from the free
/// stream where it enters. The eigensystem is evaluated at the interior
/// state; the in/out selection is frozen at the primal values.
pub fn farfield_state<S: Scalar>(flow: &FlowPhysics, w: &StateA<S>, n: V2) -> StateA<S> {
    let eig = normal_eigensystem(&flow.gas, w, n);
    let winf = flow.freestream();
    let mut wc = [S::from_f64(0.0); MAX_M];
    for i in 0..MAX_M {
        let mut interior = S::from_f64(0.0);
        let mut exterior = S::from_f64(0.0);
        for j in 0..MAX_M {
            interior = interior + eig.qinv[i][j] * w[j];
            exterior = exterior + eig.qinv[i][j].scale(winf[j]);
        }
        wc[i] = if eig.lam[i].value() >= 0.0 {
            interior
        } else {
            exterior
        };
    }
    let mut out = [S::from_f64(0.0); MAX_M];
    for i in 0..MAX_M {
        for j in 0..MAX_M {
            out[i] = out[i] + eig.q[i][j] * wc[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{FlowPhysics, Model};

    fn random_state(rng: &mut impl FnMut() -> f64) -> [f64; 4] {
        let rho = 0.5 + rng();
        let u = rng() - 0.5;
        let v = rng() - 0.5;
        let p = 0.5 + rng();
        [
            rho,
            rho * u,
            rho * v,
            p / 0.4 + 0.5 * rho * (u * u + v * v),
        ]
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64)
        }
    }

    #[test]
    fn rest_state_eigenvalues() {
        let gas = GasModel::air();
        let w = [1.0, 0.0, 0.0, 2.5];
        let eig = normal_eigensystem(&gas, &w, V2::new(1.0, 0.0));
        let c = (1.4f64).sqrt(); // p = 1
        assert!(eig.lam[0].abs() < 1e-14 && eig.lam[1].abs() < 1e-14);
        assert!((eig.lam[2] - c).abs() < 1e-14);
        assert!((eig.lam[3] + c).abs() < 1e-14);
    }

    #[test]
    fn q_times_qinv_is_identity() {
        let gas = GasModel::air();
        let mut rng = lcg(42);
        for _ in 0..20 {
            let w = random_state(&mut rng);
            let n = V2::new(rng() - 0.5, rng() - 0.5).normalized();
            let eig = normal_eigensystem(&gas, &w, n);
            for i in 0..4 {
                for j in 0..4 {
                    let prod: f64 = (0..4).map(|k| eig.q[i][k] * eig.qinv[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod - expect).abs() < 1e-12, "QQinv[{i}][{j}] = {prod}");
                }
            }
        }
    }

    #[test]
    fn eigensystem_reconstructs_normal_jacobian() {
        // Q Lambda Qinv must match the finite-difference Jacobian of f_c . n
        let gas = GasModel::air();
        let model = Model::Euler(FlowPhysics::new(gas, 0.5, 0.0, 0.0));
        let mut rng = lcg(7);
        for _ in 0..10 {
            let w = random_state(&mut rng);
            let n = V2::new(rng() - 0.5, rng() - 0.5).normalized();
            let eig = normal_eigensystem(&gas, &w, n);
            let h = 1e-7;
            for j in 0..4 {
                let mut wp = w;
                let mut wm = w;
                wp[j] += h;
                wm[j] -= h;
                let fp = model.conv_flux(&wp);
                let fm = model.conv_flux(&wm);
                for i in 0..4 {
                    let fd = ((fp[i][0] - fm[i][0]) * n.x + (fp[i][1] - fm[i][1]) * n.y)
                        / (2.0 * h);
                    let rec: f64 = (0..4)
                        .map(|k| eig.q[i][k] * eig.lam[k] * eig.qinv[k][j])
                        .sum();
                    assert!(
                        (rec - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                        "A[{i}][{j}]: {rec} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn supersonic_inflow_takes_the_free_stream() {
        let flow = FlowPhysics::new(GasModel::air(), 2.0, 0.0, 0.0);
        let winf = flow.freestream();
        // interior state slightly off free stream; inflow normal opposes the flow
        let w = [1.05, winf[1] * 1.1, 0.02, winf[3] * 1.02];
        let n = V2::new(-1.0, 0.0);
        let wb: [f64; 4] = farfield_state(&flow, &w, n);
        for i in 0..4 {
            assert!((wb[i] - winf[i]).abs() < 1e-12);
        }
        // outflow side keeps the interior state
        let wb: [f64; 4] = farfield_state(&flow, &w, V2::new(1.0, 0.0));
        for i in 0..4 {
            assert!((wb[i] - w[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn viscous_flux_zero_for_zero_gradient_and_uniform_flow() {
        let flow = FlowPhysics::new(GasModel::air(), 0.5, 0.1, 5000.0);
        let w = flow.freestream();
        let q = [[0.0; 2]; 4];
        let f = visc_flux(&flow, &w, &q);
        for row in &f {
            assert!(row[0].abs() < 1e-16 && row[1].abs() < 1e-16);
        }
    }

    #[test]
    fn velocity_gradient_chain_rule_matches_finite_differences() {
        // synthesize w(x) with a linear primitive field and compare the
        // stress tensor against finite differences of v(w(x))
        let flow = FlowPhysics::new(GasModel::air(), 0.5, 0.0, 1000.0);
        let gas = flow.gas;
        let prim = |x: V2| {
            let rho = 1.0 + 0.1 * x.x - 0.05 * x.y;
            let u = 0.3 + 0.2 * x.x + 0.1 * x.y;
            let v = -0.1 + 0.05 * x.x - 0.15 * x.y;
            let p = 1.0 + 0.02 * x.x + 0.03 * x.y;
            (rho, u, v, p)
        };
        let wof = |x: V2| {
            let (rho, u, v, p) = prim(x);
            [
                rho,
                rho * u,
                rho * v,
                p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v),
            ]
        };
        let x0 = V2::new(0.3, 0.7);
        let h = 1e-6;
        let mut q = [[0.0; 2]; 4];
        for i in 0..4 {
            q[i][0] = (wof(V2::new(x0.x + h, x0.y))[i] - wof(V2::new(x0.x - h, x0.y))[i])
                / (2.0 * h);
            q[i][1] = (wof(V2::new(x0.x, x0.y + h))[i] - wof(V2::new(x0.x, x0.y - h))[i])
                / (2.0 * h);
        }
        let w = wof(x0);
        let f = visc_flux(&flow, &w, &q);
        // independent: differentiate the primitive velocity directly
        let dudx = 0.2;
        let dudy = 0.1;
        let dvdx = 0.05;
        let dvdy = -0.15;
        let t: f64 = temperature(&gas, &w);
        let mu = sutherland_nondim(&flow, t);
        let div = dudx + dvdy;
        let txx = mu * (2.0 * dudx - 2.0 / 3.0 * div);
        let txy = mu * (dudy + dvdx);
        assert!((f[1][0] - txx).abs() < 1e-6 * mu.max(1e-30));
        assert!((f[1][1] - txy).abs() < 1e-6 * mu.max(1e-30));
    }
}

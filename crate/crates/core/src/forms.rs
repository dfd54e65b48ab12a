//! Pointwise constitutive relations, edge traces and the jump/average algebra
//! for traces that are multilinear in the conormal.
//!
//! A trace that is `d`-linear in the conormal `ν` changes sign as `(-1)^d`
//! under `ν → -ν`. On an edge shared by two elements the jump and average are
//!
//! ```text
//! [w] = w⁺ − (−1)^d w⁻        ⟨w⟩ = ½ (w⁺ + (−1)^d w⁻)
//! ```
//!
//! where each side is evaluated with its own outward conormal. Across a flat
//! edge (`ν⁻ = −ν⁺`) this is the classical jump; across a fold between two
//! plates it is the correct generalization. On one-sided (Dirichlet) edges
//! `⟨w⟩ = [w] = w`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::error::{PlateError, Result};
use crate::model::Material;

/// Degree of the moment `M = t̃² ν·σ_Γ(∇_Γu_n)·ν`.
pub const MOMENT_DEGREE: u32 = 2;
/// Degree of the rotation trace `ν·∇_Γu_n`.
pub const ROTATION_DEGREE: u32 = 1;
/// Degree of the edge force `F`.
pub const FORCE_DEGREE: u32 = 1;

/// Values that can be carried by a trace.
pub trait TraceValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn dot(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl TraceValue for f64 {
    fn dot(&self, other: &Self) -> f64 {
        self * other
    }
}

impl TraceValue for Vector3<f64> {
    fn dot(&self, other: &Self) -> f64 {
        Vector3::dot(self, other)
    }
}

/// A trace value together with its conormal degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultilinearTrace<V> {
    pub value: V,
    pub degree: u32,
}

impl<V: TraceValue> MultilinearTrace<V> {
    pub fn new(value: V, degree: u32) -> Self {
        Self { value, degree }
    }

    /// `(w₁·w₂)` is `(d₁+d₂)`-linear.
    pub fn product(&self, other: &Self) -> MultilinearTrace<f64> {
        MultilinearTrace::new(self.value.dot(&other.value), self.degree + other.degree)
    }
}

/// `(−1)^d`.
pub fn parity_sign(degree: u32) -> f64 {
    if degree.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Coefficients `(c⁺, c⁻)` with `[w] = c⁺ w⁺ + c⁻ w⁻`.
pub fn jump_weights(degree: u32) -> [f64; 2] {
    [1.0, -parity_sign(degree)]
}

/// Coefficients `(c⁺, c⁻)` with `⟨w⟩ = c⁺ w⁺ + c⁻ w⁻`.
pub fn average_weights(degree: u32) -> [f64; 2] {
    [0.5, 0.5 * parity_sign(degree)]
}

/// Traces of one quantity on an edge: two sides, or one side on a Dirichlet edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeTraces<V> {
    Interior {
        plus: MultilinearTrace<V>,
        minus: MultilinearTrace<V>,
    },
    Boundary(MultilinearTrace<V>),
}

impl<V: TraceValue> EdgeTraces<V> {
    pub fn degree(&self) -> u32 {
        match self {
            EdgeTraces::Interior { plus, .. } => plus.degree,
            EdgeTraces::Boundary(w) => w.degree,
        }
    }

    pub fn jump(&self) -> Result<V> {
        match self {
            EdgeTraces::Interior { plus, minus } => jump(plus, minus),
            EdgeTraces::Boundary(w) => Ok(w.value),
        }
    }

    pub fn average(&self) -> Result<V> {
        match self {
            EdgeTraces::Interior { plus, minus } => average(plus, minus),
            EdgeTraces::Boundary(w) => Ok(w.value),
        }
    }

    /// Pointwise product of two edge traces, side by side.
    pub fn product(&self, other: &Self) -> Result<EdgeTraces<f64>> {
        match (self, other) {
            (
                EdgeTraces::Interior { plus: a, minus: b },
                EdgeTraces::Interior { plus: c, minus: d },
            ) => Ok(EdgeTraces::Interior {
                plus: a.product(c),
                minus: b.product(d),
            }),
            (EdgeTraces::Boundary(a), EdgeTraces::Boundary(c)) => Ok(EdgeTraces::Boundary(a.product(c))),
            _ => Err(PlateError::InvalidInput(
                "cannot multiply an interior trace pair with a one-sided trace".into(),
            )),
        }
    }
}

/// `[w] = w⁺ − (−1)^d w⁻`.
pub fn jump<V: TraceValue>(plus: &MultilinearTrace<V>, minus: &MultilinearTrace<V>) -> Result<V> {
    if plus.degree != minus.degree {
        return Err(PlateError::DegreeMismatch(plus.degree, minus.degree));
    }
    let [cp, cm] = jump_weights(plus.degree);
    Ok(plus.value * cp + minus.value * cm)
}

/// `⟨w⟩ = ½ (w⁺ + (−1)^d w⁻)`.
pub fn average<V: TraceValue>(plus: &MultilinearTrace<V>, minus: &MultilinearTrace<V>) -> Result<V> {
    if plus.degree != minus.degree {
        return Err(PlateError::DegreeMismatch(plus.degree, minus.degree));
    }
    let [cp, cm] = average_weights(plus.degree);
    Ok(plus.value * cp + minus.value * cm)
}

/// Absolute residual of `[w₁·w₂] = [w₁]·⟨w₂⟩ + ⟨w₁⟩·[w₂]`.
pub fn product_identity_check<V: TraceValue>(w1: &EdgeTraces<V>, w2: &EdgeTraces<V>) -> Result<f64> {
    let lhs = w1.product(w2)?.jump()?;
    let rhs = w1.jump()?.dot(&w2.average()?) + w1.average()?.dot(&w2.jump()?);
    Ok((lhs - rhs).abs())
}

/// In-plane strain from a tangential Jacobian `G = v⊗∇_Γ`:
/// `ε_Γ = e_Γ − (e_Γ·n)⊗n − n⊗(e_Γ·n)` with `e_Γ = sym G`.
pub fn eps_gamma(tangential_jacobian: &Matrix3<f64>, n: &Vector3<f64>) -> Matrix3<f64> {
    let e = 0.5 * (tangential_jacobian + tangential_jacobian.transpose());
    let en = e * n;
    e - en * n.transpose() - n * en.transpose()
}

/// `σ_Γ = 2μ ε_Γ + λ tr(ε_Γ) P_Γ`.
pub fn sigma_gamma(eps: &Matrix3<f64>, material: &Material, projector: &Matrix3<f64>) -> Matrix3<f64> {
    2.0 * material.mu() * eps + material.lambda() * eps.trace() * projector
}

/// `∇_Γu_n` from the tangential Jacobian `u⊗∇_Γ` (contracting the row index with `n`).
pub fn grad_un(u_jacobian: &Matrix3<f64>, n: &Vector3<f64>) -> Vector3<f64> {
    u_jacobian.transpose() * n
}

/// `ε_Γ(∇_Γu_n) = Σᵢ (uᵢ·n) Hᵢ` for element-constant shape Hessians `Hᵢ`.
pub fn bending_hessian(hessians: &[Matrix3<f64>], nodal_u: &[Vector3<f64>], n: &Vector3<f64>) -> Matrix3<f64> {
    hessians
        .iter()
        .zip(nodal_u)
        .fold(Matrix3::zeros(), |acc, (h, u)| acc + h * u.dot(n))
}

/// Bending stress `σ_Γ(∇_Γu_n)` for a curvature `κ = ε_Γ(∇_Γu_n)`.
pub fn bending_stress(kappa: &Matrix3<f64>, material: &Material, n: &Vector3<f64>) -> Matrix3<f64> {
    let p = crate::tdc::projector_unchecked(n);
    sigma_gamma(kappa, material, &p)
}

/// `M = t̃² ν·σ_Γ(κ)·ν`, a 2-linear trace.
pub fn moment(kappa: &Matrix3<f64>, material: &Material, n: &Vector3<f64>, conormal: &Vector3<f64>) -> MultilinearTrace<f64> {
    let s = bending_stress(kappa, material, n);
    MultilinearTrace::new(material.t_tilde_sq() * conormal.dot(&(s * conormal)), MOMENT_DEGREE)
}

/// Twisting moment `t̃² τ·σ_Γ(κ)·ν`.
pub fn twisting_moment(
    kappa: &Matrix3<f64>,
    material: &Material,
    n: &Vector3<f64>,
    tangent: &Vector3<f64>,
    conormal: &Vector3<f64>,
) -> f64 {
    let s = bending_stress(kappa, material, n);
    material.t_tilde_sq() * tangent.dot(&(s * conormal))
}

/// Edge quantities needed for the force traces on one side of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideState {
    /// In-plane membrane stress `σ_Γ(u_t)` at the evaluation point.
    pub membrane_stress: Matrix3<f64>,
    /// `∇_Γ·σ_Γ(∇_Γu_n)`; identically zero inside quadratic elements.
    pub bending_stress_divergence: Vector3<f64>,
    /// `τ·∇_Γ(τ·σ_Γ(∇_Γu_n)·ν)` along the edge; zero for quadratic elements on straight edges.
    pub twist_derivative: f64,
}

impl SideState {
    /// State of a quadratic element: element-constant bending stress, so the
    /// divergence and the along-edge twist derivative vanish.
    pub fn quadratic(membrane_stress: Matrix3<f64>) -> Self {
        Self {
            membrane_stress,
            bending_stress_divergence: Vector3::zeros(),
            twist_derivative: 0.0,
        }
    }
}

/// Normal and tangential edge forces,
///
/// ```text
/// F_n = t̃² ν·(∇_Γ·σ_Γ(∇_Γu_n)) n − t̃² τ·∇_Γ(τ·σ_Γ(∇_Γu_n)·ν) n
/// F_t = −σ_Γ(u_t)·ν
/// ```
///
/// both 1-linear in the conormal.
pub fn force_traces(
    state: &SideState,
    conormal: &Vector3<f64>,
    n: &Vector3<f64>,
    material: &Material,
) -> (MultilinearTrace<Vector3<f64>>, MultilinearTrace<Vector3<f64>>) {
    let t2 = material.t_tilde_sq();
    let f_n = n * (t2 * conormal.dot(&state.bending_stress_divergence) - t2 * state.twist_derivative);
    let f_t = -(state.membrane_stress * conormal);
    (
        MultilinearTrace::new(f_n, FORCE_DEGREE),
        MultilinearTrace::new(f_t, FORCE_DEGREE),
    )
}

/// Kirchhoff corner force `t̃² τᵢ·σ_Γ(κ)·νᵢ n` at a corner, with `τᵢ`
/// directed into the corner.
pub fn corner_force(
    kappa: &Matrix3<f64>,
    material: &Material,
    n: &Vector3<f64>,
    tangent_into_corner: &Vector3<f64>,
    conormal: &Vector3<f64>,
) -> Vector3<f64> {
    n * twisting_moment(kappa, material, n, tangent_into_corner, conormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tdc::projector;

    fn unit_material() -> Material {
        // μ = λ = 1: E = 2μ(1+ν) with λ = Eν/(1−ν²)  ⇒  ν = 1/3, E = 8/3.
        let m = Material::new(8.0 / 3.0, 1.0 / 3.0, 12f64.sqrt()).unwrap();
        assert!((m.mu() - 1.0).abs() < 1e-14 && (m.lambda() - 1.0).abs() < 1e-14);
        m
    }

    #[test]
    fn jump_average_definition() {
        let p = MultilinearTrace::new(2.0, 1);
        let m = MultilinearTrace::new(3.0, 1);
        assert_eq!(jump(&p, &m).unwrap(), 5.0);
        assert_eq!(average(&p, &m).unwrap(), -0.5);
        let p = MultilinearTrace::new(2.0, 2);
        let m = MultilinearTrace::new(3.0, 2);
        assert_eq!(jump(&p, &m).unwrap(), -1.0);
        assert_eq!(average(&p, &m).unwrap(), 2.5);
        let bad = MultilinearTrace::new(3.0, 1);
        assert!(matches!(jump(&p, &bad), Err(PlateError::DegreeMismatch(2, 1))));
    }

    #[test]
    fn dirichlet_edge_is_one_sided() {
        let w = EdgeTraces::Boundary(MultilinearTrace::new(4.0, 2));
        assert_eq!(w.jump().unwrap(), 4.0);
        assert_eq!(w.average().unwrap(), 4.0);
    }

    #[test]
    fn coplanar_conormal_jump_vanishes() {
        let nu = Vector3::new(0.3, -0.4, 0.0).normalize();
        let p = MultilinearTrace::new(nu, 1);
        let m = MultilinearTrace::new(-nu, 1);
        assert!(jump(&p, &m).unwrap().norm() == 0.0);
    }

    #[test]
    fn product_identity_example() {
        let w1 = EdgeTraces::Interior {
            plus: MultilinearTrace::new(2.0, 1),
            minus: MultilinearTrace::new(3.0, 1),
        };
        let w2 = EdgeTraces::Interior {
            plus: MultilinearTrace::new(5.0, 1),
            minus: MultilinearTrace::new(7.0, 1),
        };
        assert_eq!(w1.product(&w2).unwrap().jump().unwrap(), -11.0);
        assert_eq!(w1.jump().unwrap() * w2.average().unwrap() + w1.average().unwrap() * w2.jump().unwrap(), -11.0);
        assert_eq!(product_identity_check(&w1, &w2).unwrap(), 0.0);
    }

    #[test]
    fn eps_gamma_examples() {
        let n = Vector3::z();
        // v_t = (x, −y, 0) on z = 0.
        let g = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(eps_gamma(&g, &n), Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 0.0)));
        assert_eq!(eps_gamma(&Matrix3::zeros(), &n), Matrix3::zeros());
    }

    #[test]
    fn sigma_gamma_examples() {
        let m = unit_material();
        let p = projector(&Vector3::z()).unwrap();
        let eps = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 0.0));
        assert!((sigma_gamma(&eps, &m, &p) - 2.0 * eps).norm() < 1e-14);
        assert!((sigma_gamma(&p, &m, &p) - 4.0 * p).norm() < 1e-14);
    }

    #[test]
    fn grad_un_examples() {
        let n = Vector3::z();
        // u = (0, 0, x)
        let g = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert_eq!(grad_un(&g, &n), Vector3::new(1.0, 0.0, 0.0));
        // u = (x, y, 0)
        let g = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(grad_un(&g, &n), Vector3::zeros());
    }

    #[test]
    fn moment_example_and_parity() {
        let m = unit_material();
        let n = Vector3::z();
        // u_n = (x² + y²)/2  ⇒  κ = P, σ = 4P, M = t̃²·4 with t̃ = 1.
        let kappa = projector(&n).unwrap();
        let nu = Vector3::x();
        let mm = moment(&kappa, &m, &n, &nu);
        assert_eq!(mm.degree, 2);
        assert!((mm.value - 4.0).abs() < 1e-13);
        assert_eq!(moment(&Matrix3::zeros(), &m, &n, &nu).value, 0.0);
        let nu = Vector3::new(0.6, 0.8, 0.0);
        assert_eq!(moment(&kappa, &m, &n, &nu).value, moment(&kappa, &m, &n, &(-nu)).value);
    }

    #[test]
    fn membrane_force_trace() {
        let m = unit_material();
        let n = Vector3::z();
        let p = projector(&n).unwrap();
        let sigma0 = 3.5;
        let (f_n, f_t) = force_traces(&SideState::quadratic(sigma0 * p), &Vector3::x(), &n, &m);
        assert_eq!(f_n.value, Vector3::zeros());
        assert_eq!(f_t.value, Vector3::new(-sigma0, 0.0, 0.0));
        assert_eq!(f_t.degree, 1);
    }

    #[test]
    fn corner_force_points_along_normal() {
        let m = unit_material();
        let n = Vector3::z();
        let mut kappa = Matrix3::zeros();
        kappa[(0, 1)] = 1.0;
        kappa[(1, 0)] = 1.0;
        let f = corner_force(&kappa, &m, &n, &Vector3::x(), &Vector3::y());
        assert!((f - Vector3::new(0.0, 0.0, 2.0 * m.t_tilde_sq())).norm() < 1e-14);
    }
}

//! Tangential differential calculus on planar triangles.
//!
//! Geometry is affine (three corner nodes), displacements are quadratic
//! (six-node Lagrange). The element Jacobian stacks the two edge vectors and
//! the unit normal,
//!
//! ```text
//!     | x1 - x0 |
//! J = | x2 - x0 |
//!     |    n    |
//! ```
//!
//! so that `J⁻¹ (∂ξφ, ∂ηφ, 0)ᵀ` is the surface gradient `∇_Γ φ`. Since the
//! map is affine, second derivatives of the shape functions are constant per
//! element.
//!
//! Reference node ordering: corners `(0,0)`, `(1,0)`, `(0,1)`, then the
//! mid-sides of edges 0-1, 1-2 and 2-0.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{PlateError, Result};
use crate::model::Point3;

/// `P_Γ = I − n⊗n`.
pub fn projector(n: &Vector3<f64>) -> Result<Matrix3<f64>> {
    if (n.norm() - 1.0).abs() > 1e-12 {
        return Err(PlateError::InvalidInput(format!(
            "projector needs a unit normal, |n| = {}",
            n.norm()
        )));
    }
    Ok(projector_unchecked(n))
}

pub(crate) fn projector_unchecked(n: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::identity() - n * n.transpose()
}

/// Values and reference derivatives of the six quadratic shape functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub values: [f64; 6],
    pub ref_gradients: [Vector2<f64>; 6],
    pub ref_hessians: [Matrix2<f64>; 6],
}

/// Quadratic Lagrange basis at `(ξ, η)` on the reference triangle.
pub fn p2_shape(xi: Vector2<f64>) -> ShapeEval {
    let (x, y) = (xi.x, xi.y);
    let l = 1.0 - x - y;
    let values = [
        l * (2.0 * l - 1.0),
        x * (2.0 * x - 1.0),
        y * (2.0 * y - 1.0),
        4.0 * l * x,
        4.0 * x * y,
        4.0 * y * l,
    ];
    let ref_gradients = [
        Vector2::new(1.0 - 4.0 * l, 1.0 - 4.0 * l),
        Vector2::new(4.0 * x - 1.0, 0.0),
        Vector2::new(0.0, 4.0 * y - 1.0),
        Vector2::new(4.0 * (l - x), -4.0 * x),
        Vector2::new(4.0 * y, 4.0 * x),
        Vector2::new(-4.0 * y, 4.0 * (l - y)),
    ];
    let ref_hessians = [
        Matrix2::new(4.0, 4.0, 4.0, 4.0),
        Matrix2::new(4.0, 0.0, 0.0, 0.0),
        Matrix2::new(0.0, 0.0, 0.0, 4.0),
        Matrix2::new(-8.0, -4.0, -4.0, 0.0),
        Matrix2::new(0.0, 4.0, 4.0, 0.0),
        Matrix2::new(0.0, -4.0, -4.0, -8.0),
    ];
    ShapeEval {
        values,
        ref_gradients,
        ref_hessians,
    }
}

/// Affine element map data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementFrame {
    pub origin: Point3,
    pub jacobian: Matrix3<f64>,
    pub inverse: Matrix3<f64>,
    pub normal: Vector3<f64>,
    pub projector: Matrix3<f64>,
    pub area: f64,
}

impl ElementFrame {
    /// `det J`; equals twice the area for a counter-clockwise element.
    pub fn det(&self) -> f64 {
        self.jacobian.determinant()
    }

    /// Physical point of reference coordinates `(ξ, η)`.
    pub fn map(&self, xi: Vector2<f64>) -> Point3 {
        self.origin + self.jacobian.transpose() * Vector3::new(xi.x, xi.y, 0.0)
    }

    /// Reference coordinates of a physical point in the element plane.
    pub fn pullback(&self, x: &Point3) -> Vector2<f64> {
        let r = self.inverse.transpose() * (x - self.origin);
        Vector2::new(r.x, r.y)
    }

    /// The 3×2 block `C` of `J⁻¹` with `∇_Γφ = C ∇_ξφ`.
    fn gradient_map(&self) -> nalgebra::Matrix3x2<f64> {
        self.inverse.fixed_view::<3, 2>(0, 0).into_owned()
    }
}

/// Builds the frame of a planar triangle from its corners and unit normal.
pub fn element_frame(corners: [Point3; 3], n: Vector3<f64>) -> Result<ElementFrame> {
    let e1 = corners[1] - corners[0];
    let e2 = corners[2] - corners[0];
    let cross = e1.cross(&e2);
    let area = 0.5 * cross.norm();
    let scale = e1.norm().max(e2.norm());
    if !(area > 1e-14 * scale * scale) {
        return Err(PlateError::Geometry(format!("degenerate triangle (area {area:e})")));
    }
    let jacobian = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), n.transpose()]);
    let inverse = jacobian
        .try_inverse()
        .ok_or_else(|| PlateError::Geometry("singular element Jacobian".into()))?;
    Ok(ElementFrame {
        origin: corners[0],
        jacobian,
        inverse,
        normal: n,
        projector: projector_unchecked(&n),
        area,
    })
}

/// Surface gradients `∇_Γφᵢ` of the six shape functions.
pub fn physical_gradients(frame: &ElementFrame, shape: &ShapeEval) -> [Vector3<f64>; 6] {
    let c = frame.gradient_map();
    shape.ref_gradients.map(|g| c * g)
}

/// Tangential Hessians `C Ĥᵢ Cᵀ` of the six shape functions (constant per element).
pub fn physical_hessians(frame: &ElementFrame) -> [Matrix3<f64>; 6] {
    let c = frame.gradient_map();
    let shape = p2_shape(Vector2::new(1.0 / 3.0, 1.0 / 3.0));
    shape.ref_hessians.map(|h| c * h * c.transpose())
}

/// Quadrature point on the reference triangle or unit segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint<P> {
    pub point: P,
    pub weight: f64,
}

/// Triangle rules exact to the given polynomial order; weights sum to ½.
pub fn tri_quadrature(order: usize) -> Result<Vec<QuadPoint<Vector2<f64>>>> {
    match order {
        2 => Ok([(1.0 / 6.0, 1.0 / 6.0), (2.0 / 3.0, 1.0 / 6.0), (1.0 / 6.0, 2.0 / 3.0)]
            .iter()
            .map(|&(x, y)| QuadPoint {
                point: Vector2::new(x, y),
                weight: 1.0 / 6.0,
            })
            .collect()),
        4 => {
            // Dunavant degree-4 rule.
            let a = 0.445_948_490_915_964_9;
            let wa = 0.223_381_589_678_011_47 / 2.0;
            let b = 0.091_576_213_509_770_74;
            let wb = 0.109_951_743_655_321_87 / 2.0;
            let mut pts = Vec::with_capacity(6);
            for &(c, w) in &[(a, wa), (b, wb)] {
                for p in [(c, c), (1.0 - 2.0 * c, c), (c, 1.0 - 2.0 * c)] {
                    pts.push(QuadPoint {
                        point: Vector2::new(p.0, p.1),
                        weight: w,
                    });
                }
            }
            Ok(pts)
        }
        other => Err(PlateError::UnsupportedQuadrature(other)),
    }
}

/// Gauss rules on `[0, 1]` exact to the given order; weights sum to 1.
pub fn seg_quadrature(order: usize) -> Result<Vec<QuadPoint<f64>>> {
    match order {
        2 => {
            let d = 0.5 / 3f64.sqrt();
            Ok(vec![
                QuadPoint { point: 0.5 - d, weight: 0.5 },
                QuadPoint { point: 0.5 + d, weight: 0.5 },
            ])
        }
        4 => {
            let d = 0.5 * (0.6f64).sqrt();
            Ok(vec![
                QuadPoint { point: 0.5 - d, weight: 5.0 / 18.0 },
                QuadPoint { point: 0.5, weight: 8.0 / 18.0 },
                QuadPoint { point: 0.5 + d, weight: 5.0 / 18.0 },
            ])
        }
        other => Err(PlateError::UnsupportedQuadrature(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ref_points() -> Vec<Vector2<f64>> {
        vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(0.5, 0.0),
            Vector2::new(0.5, 0.5),
            Vector2::new(0.0, 0.5),
        ]
    }

    #[test]
    fn projector_examples() {
        let p = projector(&Vector3::z()).unwrap();
        assert_eq!(p, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0)));
        let p = projector(&Vector3::x()).unwrap();
        assert_eq!(p, Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, 1.0)));
        let n = Vector3::new(1.0, -2.0, 0.5).normalize();
        let p = projector(&n).unwrap();
        assert!((p * n).norm() < 1e-15);
        assert!((p * p - p).norm() < 1e-15);
        assert!((p - p.transpose()).norm() == 0.0);
        assert!(projector(&Vector3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn lagrange_property() {
        for (i, xi) in ref_points().into_iter().enumerate() {
            let s = p2_shape(xi);
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s.values[j] - expect).abs() < 1e-15, "node {i} fn {j}");
            }
        }
        let s = p2_shape(Vector2::new(0.25, 0.25));
        assert!((s.values.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shape_derivatives_match_finite_differences() {
        let xi = Vector2::new(0.21, 0.33);
        let s = p2_shape(xi);
        let h = 1e-6;
        for k in 0..2 {
            let mut d = Vector2::zeros();
            d[k] = h;
            let sp = p2_shape(xi + d);
            let sm = p2_shape(xi - d);
            for i in 0..6 {
                let fd = (sp.values[i] - sm.values[i]) / (2.0 * h);
                assert!((fd - s.ref_gradients[i][k]).abs() < 1e-8);
                let fd2 = (sp.ref_gradients[i] - sm.ref_gradients[i]) / (2.0 * h);
                for m in 0..2 {
                    assert!((fd2[m] - s.ref_hessians[i][(m, k)]).abs() < 1e-7);
                }
            }
        }
        let gsum: Vector2<f64> = s.ref_gradients.iter().sum();
        let hsum: Matrix2<f64> = s.ref_hessians.iter().sum();
        assert!(gsum.norm() < 1e-14 && hsum.norm() < 1e-14);
    }

    #[test]
    fn frame_examples() {
        let f = element_frame(
            [Point3::zeros(), Point3::x(), Point3::y()],
            Vector3::z(),
        )
        .unwrap();
        assert_eq!(f.jacobian, Matrix3::identity());
        assert!((f.jacobian * f.inverse - Matrix3::identity()).norm() < 1e-12);
        let f = element_frame(
            [Point3::zeros(), Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0)],
            Vector3::z(),
        )
        .unwrap();
        assert_relative_eq!(f.det(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(f.area, 2.0, epsilon = 1e-14);
        let bad = element_frame(
            [Point3::zeros(), Point3::x(), Point3::new(2.0, 0.0, 0.0)],
            Vector3::z(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn pullback_inverts_map() {
        let f = element_frame(
            [
                Point3::new(0.3, -1.0, 2.0),
                Point3::new(1.1, 0.2, 2.5),
                Point3::new(-0.4, 0.7, 1.1),
            ],
            {
                let e1 = Vector3::new(0.8, 1.2, 0.5);
                let e2 = Vector3::new(-0.7, 1.7, -0.9);
                e1.cross(&e2).normalize()
            },
        )
        .unwrap();
        let xi = Vector2::new(0.2, 0.7);
        assert!((f.pullback(&f.map(xi)) - xi).norm() < 1e-14);
    }

    #[test]
    fn reference_aligned_gradient_and_hessian() {
        let f = element_frame([Point3::zeros(), Point3::x(), Point3::y()], Vector3::z()).unwrap();
        let s = p2_shape(Vector2::zeros());
        let g = physical_gradients(&f, &s);
        assert_eq!(g[0], Vector3::new(-3.0, -3.0, 0.0));
        let h = physical_hessians(&f);
        // φ₁ = ξ(2ξ−1): single in-plane second derivative ∂²/∂x² = 4.
        let mut expect = Matrix3::zeros();
        expect[(0, 0)] = 4.0;
        assert_eq!(h[1], expect);
    }

    #[test]
    fn quadrature_examples() {
        let t2 = tri_quadrature(2).unwrap();
        assert_eq!(t2.len(), 3);
        assert!((t2.iter().map(|q| q.weight).sum::<f64>() - 0.5).abs() < 1e-15);
        let t4 = tri_quadrature(4).unwrap();
        assert_eq!(t4.len(), 6);
        assert!((t4.iter().map(|q| q.weight).sum::<f64>() - 0.5).abs() < 1e-15);
        let s4 = seg_quadrature(4).unwrap();
        assert_eq!(s4.len(), 3);
        assert!((s4.iter().map(|q| q.weight).sum::<f64>() - 1.0).abs() < 1e-15);
        // ∫ ξη over the reference triangle = 1/24.
        let v: f64 = t4.iter().map(|q| q.weight * q.point.x * q.point.y).sum();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        assert!(matches!(tri_quadrature(3), Err(PlateError::UnsupportedQuadrature(3))));
        assert!(seg_quadrature(7).is_err());
    }

    /// Exact monomial integrals `∫ ξ^a η^b = a! b! / (a+b+2)!` (oracle).
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn tri_rules_exact_to_order() {
        for (order, rule) in [(2, tri_quadrature(2).unwrap()), (4, tri_quadrature(4).unwrap())] {
            for a in 0..=order as u32 {
                for b in 0..=(order as u32 - a) {
                    let q: f64 = rule
                        .iter()
                        .map(|p| p.weight * p.point.x.powi(a as i32) * p.point.y.powi(b as i32))
                        .sum();
                    assert!((q - monomial_integral(a, b)).abs() < 1e-15, "order {order} a {a} b {b}");
                }
            }
        }
    }

    #[test]
    fn seg_rules_exact_to_order() {
        for (order, exact_to) in [(2, 3), (4, 5)] {
            let rule = seg_quadrature(order).unwrap();
            for k in 0..=exact_to {
                let q: f64 = rule.iter().map(|p| p.weight * p.point.powi(k)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
            }
        }
    }
}

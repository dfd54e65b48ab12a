#![allow(dead_code)]

use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use tdc_plates::assembly::CsrMatrix;
use tdc_plates::model::{BoundaryTag, LoadRegion, Material, PlatePatch, Point3, StructureModel};

use BoundaryTag::{Clamped as C, Free as F, Junction as J};

pub fn quad(id: usize, corners: [[f64; 3]; 4], normal: Vector3<f64>, tags: [BoundaryTag; 4]) -> PlatePatch {
    let v = corners.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect();
    PlatePatch::new(id, v, Some(normal), tags.to_vec()).unwrap()
}

/// Floor plate clamped along `x = 0` with a free vertical flange along
/// `x = 1`, under a unit transverse load on the floor.
pub fn angle_section(thickness: f64) -> StructureModel {
    let floor = quad(
        0,
        [[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]],
        Vector3::z(),
        [F, J, F, C],
    );
    let flange = quad(
        1,
        [[1., 0., 0.], [1., 0., 1.], [1., 1., 1.], [1., 1., 0.]],
        -Vector3::x(),
        [F, F, F, J],
    );
    StructureModel::new(vec![floor, flange], Material::new(1.0, 0.3, thickness).unwrap())
        .with_load(LoadRegion::Patch(0), Vector3::new(0.0, 0.0, 1.0))
}

/// Index in `to` of the node at `map(from[i])`, for every `i`.
pub fn match_nodes(from: &[Point3], to: &[Point3], map: impl Fn(&Point3) -> Point3) -> Vec<usize> {
    let scale = to.iter().map(|p| p.norm()).fold(1.0, f64::max);
    from.iter()
        .map(|p| {
            let q = map(p);
            let (best, dist) = to
                .iter()
                .enumerate()
                .map(|(i, x)| (i, (x - q).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty mesh");
            assert!(dist < 1e-9 * scale, "no node at {q:?} (closest {dist:e})");
            best
        })
        .collect()
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation3<f64> {
    let axis = Vector3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let angle = rng.random_range(0.1..std::f64::consts::PI);
    Rotation3::from_scaled_axis(axis.normalize() * angle)
}

/// The six rigid motions sampled at the nodes, as DOF vectors.
pub fn rigid_modes(nodes: &[Point3]) -> Vec<Vec<f64>> {
    let mut modes = Vec::new();
    for axis in [Vector3::x(), Vector3::y(), Vector3::z()] {
        modes.push(nodes.iter().flat_map(|_| [axis.x, axis.y, axis.z]).collect());
        modes.push(
            nodes
                .iter()
                .flat_map(|p| {
                    let u = axis.cross(p);
                    [u.x, u.y, u.z]
                })
                .collect(),
        );
    }
    modes
}

/// `max |A_ij − B_{p(i) p(j)}| / max |A|` comparing both stored patterns.
pub fn aligned_difference(a: &CsrMatrix, b: &CsrMatrix, perm: &[usize]) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    let mut inverse = vec![usize::MAX; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for (j, v) in a.row(i) {
            worst = worst.max((v - b.get(perm[i], perm[j])).abs());
        }
    }
    for i in 0..b.nrows() {
        for (j, v) in b.row(i) {
            worst = worst.max((v - a.get(inverse[i], inverse[j])).abs());
        }
    }
    worst / scale
}

/// DOF permutation induced by a node permutation.
pub fn dof_permutation(node_map: &[usize]) -> Vec<usize> {
    node_map.iter().flat_map(|&n| [3 * n, 3 * n + 1, 3 * n + 2]).collect()
}

/// A random `d`-linear form on ℝ³, `T(ν, …, ν) = Σ c_{i₁…i_d} ν_{i₁}…ν_{i_d}`.
#[derive(Debug, Clone)]
pub struct RandomForm {
    pub degree: u32,
    pub coeffs: Vec<f64>,
}

impl RandomForm {
    pub fn new(degree: u32, rng: &mut impl Rng) -> Self {
        let n = 3usize.pow(degree);
        Self {
            degree,
            coeffs: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        }
    }

    pub fn eval(&self, nu: &Vector3<f64>) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(mut k, c)| {
                let mut term = *c;
                for _ in 0..self.degree {
                    term *= nu[k % 3];
                    k /= 3;
                }
                term
            })
            .sum()
    }

    /// Sum of `|c|`, a bound on `|T(ν)|` for unit `ν`.
    pub fn bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

pub fn random_unit(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Expected relative residual of the correctly rounded exact solution:
/// each product `A_ij x_j` carries a rounding error of about `ε/2 |A_ij x_j|`.
pub fn rounding_floor(sol: &tdc_plates::solver::Solution<'_>) -> f64 {
    let constrained = sol.problem.dofmap.constraints();
    let a = &sol.system.matrix;
    let x = &sol.dofs;
    let free = |i: &usize| !constrained.contains_key(i);
    let noise: f64 = (0..a.nrows())
        .filter(free)
        .map(|i| a.row(i).map(|(j, v)| (0.5 * f64::EPSILON * v * x[j]).powi(2)).sum::<f64>())
        .sum();
    let b: f64 = (0..a.nrows()).filter(free).map(|i| sol.system.rhs[i].powi(2)).sum();
    (noise / b).sqrt()
}

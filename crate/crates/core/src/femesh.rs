//! Uniform 1D mesh and the continuous piecewise-affine element space with
//! homogeneous Dirichlet conditions.
//!
//! Only interior nodes carry unknowns: a function on a mesh with `M`
//! elements is stored as its `M - 1` interior nodal values. All bilinear
//! forms are tridiagonal on that index set.

use std::ops::{Add, Sub};

use crate::{Error, Result};

/// Three-point Gauss-Legendre rule on the reference element `[0, 1]`,
/// as `(abscissa, weight)` pairs. Exact for polynomials up to degree 5.
pub const GAUSS3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh {
    length: f64,
    elements: usize,
}

impl UniformMesh {
    pub fn new(length: f64, elements: usize) -> Result<Self> {
        if elements < 2 {
            return Err(Error::InvalidMesh(format!(
                "M = {elements} (need at least 2 elements)"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMesh(format!("L = {length}")));
        }
        Ok(Self { length, elements })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of elements `M`.
    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Number of unknowns per field, `M - 1`.
    pub fn interior_nodes(&self) -> usize {
        self.elements - 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.elements as f64
    }

    /// Coordinate of node `i` in `0..=M`; `node(M) == L` exactly.
    pub fn node(&self, i: usize) -> f64 {
        self.length * i as f64 / self.elements as f64
    }

    /// All `M + 1` node coordinates, boundary included.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.elements).map(|i| self.node(i)).collect()
    }

    /// Coordinate of interior unknown `k` (node `k + 1`).
    pub fn interior_node(&self, k: usize) -> f64 {
        self.node(k + 1)
    }

    /// Element containing `x` and the local coordinate in `[0, 1]`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let h = self.h();
        let e = ((x / h).floor().max(0.0) as usize).min(self.elements - 1);
        (e, (x - self.node(e)) / h)
    }
}

/// A P1 function vanishing at both ends, stored by interior nodal values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeFunction {
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![0.0; n],
        }
    }

    pub fn from_vec(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    /// Value at global node `i` in `0..=M` (zero on the boundary).
    pub fn node_value(&self, i: usize) -> f64 {
        if i == 0 || i > self.coeffs.len() {
            0.0
        } else {
            self.coeffs[i - 1]
        }
    }

    /// Nodal values on `0..=M`, boundary zeros included.
    pub fn with_boundary(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len() + 2);
        out.push(0.0);
        out.extend_from_slice(&self.coeffs);
        out.push(0.0);
        out
    }

    /// End values of element `e`.
    pub fn element_ends(&self, e: usize) -> (f64, f64) {
        (self.node_value(e), self.node_value(e + 1))
    }

    /// Point evaluation by linear interpolation between nodes.
    pub fn eval(&self, mesh: &UniformMesh, x: f64) -> f64 {
        let (e, s) = mesh.locate(x);
        let (a, b) = self.element_ends(e);
        a + (b - a) * s
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| factor * c).collect())
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &FeFunction) -> Self {
        assert_eq!(self.len(), other.len());
        Self::from_vec(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + factor * b)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &FeFunction {
    type Output = FeFunction;

    fn add(self, rhs: &FeFunction) -> FeFunction {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &FeFunction {
    type Output = FeFunction;

    fn sub(self, rhs: &FeFunction) -> FeFunction {
        self.axpy(-1.0, rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    General,
}

/// Tridiagonal matrix over interior nodes.
///
/// `lower[i]` is entry `(i + 1, i)`, `upper[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub symmetry: Symmetry,
}

impl TriDiag {
    fn constant(n: usize, sub: f64, main: f64, sup: f64, symmetry: Symmetry) -> Self {
        let off = n.saturating_sub(1);
        Self {
            lower: vec![sub; off],
            diag: vec![main; n],
            upper: vec![sup; off],
            symmetry,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            lower: self.upper.clone(),
            diag: self.diag.clone(),
            upper: self.lower.clone(),
            symmetry: self.symmetry,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: &[f64]| v.iter().map(|x| factor * x).collect();
        Self {
            lower: s(&self.lower),
            diag: s(&self.diag),
            upper: s(&self.upper),
            symmetry: self.symmetry,
        }
    }

    /// `sum_k c_k T_k` over matrices of equal dimension.
    pub fn combine(terms: &[(f64, &TriDiag)]) -> Self {
        let n = terms.first().map_or(0, |(_, t)| t.dim());
        let mut out = Self::constant(n, 0.0, 0.0, 0.0, Symmetry::General);
        let mut symmetry = None;
        for &(c, t) in terms {
            assert_eq!(t.dim(), n);
            if c != 0.0 {
                symmetry = match symmetry {
                    None => Some(t.symmetry),
                    Some(s) if s == t.symmetry => Some(s),
                    Some(_) => Some(Symmetry::General),
                };
            }
            for (o, x) in out.lower.iter_mut().zip(&t.lower) {
                *o += c * x;
            }
            for (o, x) in out.diag.iter_mut().zip(&t.diag) {
                *o += c * x;
            }
            for (o, x) in out.upper.iter_mut().zip(&t.upper) {
                *o += c * x;
            }
        }
        out.symmetry = symmetry.unwrap_or(Symmetry::Symmetric);
        out
    }

    /// `out = self * v`.
    pub fn mul_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        assert_eq!(v.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.lower[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    pub fn mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.mul_into(v, &mut out);
        out
    }

    /// `out += factor * self * v`.
    pub fn mul_add(&self, factor: f64, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.lower[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * v[i + 1];
            }
            out[i] += factor * acc;
        }
    }

    /// Bilinear form `a^T self b`.
    pub fn form(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut row = self.diag[i] * b[i];
                if i > 0 {
                    row += self.lower[i - 1] * b[i - 1];
                }
                if i + 1 < n {
                    row += self.upper[i] * b[i + 1];
                }
                a[i] * row
            })
            .sum()
    }

    /// Thomas algorithm without pivoting; intended for the symmetric
    /// positive definite stiffness and mass matrices.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        for i in 0..n {
            if i > 0 {
                denom = self.diag[i] - self.lower[i - 1] * c[i - 1];
            }
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::SingularSystem { row: i });
            }
            if i + 1 < n {
                c[i] = self.upper[i] / denom;
            }
            let prev = if i > 0 { self.lower[i - 1] * d[i - 1] } else { 0.0 };
            d[i] = (rhs[i] - prev) / denom;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Mass matrix `(phi_j, phi_i)`: `2h/3` on the diagonal, `h/6` off it.
pub fn build_mass(mesh: &UniformMesh) -> TriDiag {
    let h = mesh.h();
    TriDiag::constant(
        mesh.interior_nodes(),
        h / 6.0,
        2.0 * h / 3.0,
        h / 6.0,
        Symmetry::Symmetric,
    )
}

/// Stiffness matrix `(phi_j', phi_i')`: `2/h` on the diagonal, `-1/h` off it.
pub fn build_stiffness(mesh: &UniformMesh) -> TriDiag {
    let h = mesh.h();
    TriDiag::constant(
        mesh.interior_nodes(),
        -1.0 / h,
        2.0 / h,
        -1.0 / h,
        Symmetry::Symmetric,
    )
}

/// Gradient matrix with entry `(i, j) = (phi_j', phi_i)`: zero diagonal,
/// `+1/2` above, `-1/2` below. Row `i` of `G v` is `(v_x, phi_i)`.
pub fn build_gradient(mesh: &UniformMesh) -> TriDiag {
    TriDiag::constant(
        mesh.interior_nodes(),
        -0.5,
        0.0,
        0.5,
        Symmetry::Antisymmetric,
    )
}

/// The three element matrices for one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FeMatrices {
    pub mesh: UniformMesh,
    pub mass: TriDiag,
    pub stiffness: TriDiag,
    pub gradient: TriDiag,
}

impl FeMatrices {
    pub fn new(mesh: &UniformMesh) -> Self {
        Self {
            mesh: *mesh,
            mass: build_mass(mesh),
            stiffness: build_stiffness(mesh),
            gradient: build_gradient(mesh),
        }
    }
}

/// Nodal interpolant. Boundary values of `f` are ignored.
pub fn interpolate(f: impl Fn(f64) -> f64, mesh: &UniformMesh) -> FeFunction {
    FeFunction::from_vec(
        (0..mesh.interior_nodes())
            .map(|k| f(mesh.interior_node(k)))
            .collect(),
    )
}

/// Exact L2 norm of a P1 function.
pub fn l2_norm(v: &FeFunction, mesh: &UniformMesh) -> f64 {
    let h = mesh.h();
    (0..mesh.elements())
        .map(|e| {
            let (a, b) = v.element_ends(e);
            h * (a * a + a * b + b * b) / 3.0
        })
        .sum::<f64>()
        .sqrt()
}

/// Exact H1 seminorm `||v_x||` of a P1 function.
pub fn h1_seminorm(v: &FeFunction, mesh: &UniformMesh) -> f64 {
    let h = mesh.h();
    (0..mesh.elements())
        .map(|e| {
            let (a, b) = v.element_ends(e);
            (b - a) * (b - a) / h
        })
        .sum::<f64>()
        .sqrt()
}

/// Load vectors `(f_k, phi_i)` for `K` integrands evaluated together,
/// by three-point Gauss quadrature on each element.
pub fn load_vectors<const K: usize>(
    f: impl Fn(f64) -> [f64; K],
    mesh: &UniformMesh,
) -> [Vec<f64>; K] {
    let n = mesh.interior_nodes();
    let h = mesh.h();
    let mut out: [Vec<f64>; K] = std::array::from_fn(|_| vec![0.0; n]);
    for e in 0..mesh.elements() {
        let x0 = mesh.node(e);
        let mut left = [0.0; K];
        let mut right = [0.0; K];
        for &(s, w) in &GAUSS3 {
            let values = f(x0 + s * h);
            for k in 0..K {
                left[k] += w * h * (1.0 - s) * values[k];
                right[k] += w * h * s * values[k];
            }
        }
        // element e spans nodes e and e+1, i.e. interior rows e-1 and e
        for k in 0..K {
            if e >= 1 {
                out[k][e - 1] += left[k];
            }
            if e < n {
                out[k][e] += right[k];
            }
        }
    }
    out
}

/// Load vector `(f, phi_i)`.
pub fn load_vector(f: impl Fn(f64) -> f64, mesh: &UniformMesh) -> Vec<f64> {
    let [v] = load_vectors(|x| [f(x)], mesh);
    v
}

/// Vector `(f, phi_i')` against derivatives of the hat functions.
pub fn derivative_load_vector(f: impl Fn(f64) -> f64, mesh: &UniformMesh) -> Vec<f64> {
    let n = mesh.interior_nodes();
    let h = mesh.h();
    let mut out = vec![0.0; n];
    for e in 0..mesh.elements() {
        let x0 = mesh.node(e);
        let mean: f64 = GAUSS3.iter().map(|&(s, w)| w * f(x0 + s * h)).sum();
        // phi_left' = -1/h and phi_right' = 1/h; the h from dx cancels
        if e >= 1 {
            out[e - 1] -= mean;
        }
        if e < n {
            out[e] += mean;
        }
    }
    out
}

/// `sqrt(sum_e int_e g(x, e, s)^2 dx)` by three-point Gauss on each element,
/// where `s` is the local coordinate of `x` in element `e`.
pub fn quadrature_l2(mesh: &UniformMesh, g: impl Fn(f64, usize, f64) -> f64) -> f64 {
    let h = mesh.h();
    (0..mesh.elements())
        .map(|e| {
            let x0 = mesh.node(e);
            GAUSS3
                .iter()
                .map(|&(s, w)| {
                    let v = g(x0 + s * h, e, s);
                    w * h * v * v
                })
                .sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

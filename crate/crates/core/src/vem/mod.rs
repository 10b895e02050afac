//! Nodal virtual element discretisation of the Poisson problem.

pub mod local;

use serde::Serialize;

pub use local::{compute_projectors, element_triangles, stab_matrix, LocalProjectors, StabKind};

use crate::error::{Error, Result};
use crate::linalg::TripletMatrix;
use crate::mesh::{Point, PolygonalMesh};
use crate::polyspace::{dim_p, EdgeNodeSet};

/// Scalar field given in closed form.
pub type ScalarFn<'a> = &'a dyn Fn(Point) -> f64;
/// Vector field given in closed form.
pub type VectorFn<'a> = &'a dyn Fn(Point) -> [f64; 2];

/// Global dof numbering: vertices, then `p - 1` internal nodes per edge
/// (ordered from the lower to the higher vertex id), then element moments.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub degree: usize,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub moments_per_element: usize,
    pub ndofs: usize,
    /// Local-to-global map per element.
    pub elements: Vec<Vec<usize>>,
    /// Dofs fixed by the Dirichlet condition.
    pub boundary: Vec<bool>,
    /// Node location of nodal dofs, `None` for moments.
    pub nodes: Vec<Option<Point>>,
}

impl DofMap {
    pub fn new(mesh: &PolygonalMesh, degree: usize) -> Self {
        let p = degree;
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let nb = dim_p(p as isize - 2);
        let edge_base = nv;
        let moment_base = nv + ne * (p - 1);
        let ndofs = moment_base + mesh.num_elements() * nb;
        let mut boundary = vec![false; ndofs];
        let mut nodes = vec![None; ndofs];
        for v in 0..nv {
            boundary[v] = mesh.is_boundary_vertex(v);
            nodes[v] = Some(mesh.vertex(v));
        }
        for e in 0..ne {
            let [a, b] = mesh.edge(e);
            let set = EdgeNodeSet::new(mesh.vertex(a), mesh.vertex(b), p);
            for j in 1..p {
                let g = edge_base + e * (p - 1) + j - 1;
                boundary[g] = mesh.is_boundary_edge(e);
                nodes[g] = Some(set.points[j]);
            }
        }
        let elements = (0..mesh.num_elements())
            .map(|k| {
                let el = mesh.element(k);
                let n = el.len();
                let mut map = Vec::with_capacity(n * p + nb);
                map.extend_from_slice(el);
                for i in 0..n {
                    let e = mesh.element_edges(k)[i];
                    let forward = el[i] < el[(i + 1) % n];
                    for j in 1..p {
                        let jg = if forward { j } else { p - j };
                        map.push(edge_base + e * (p - 1) + jg - 1);
                    }
                }
                map.extend((0..nb).map(|b| moment_base + k * nb + b));
                map
            })
            .collect();
        Self {
            degree,
            num_vertices: nv,
            num_edges: ne,
            moments_per_element: nb,
            ndofs,
            elements,
            boundary,
            nodes,
        }
    }

    pub fn num_free(&self) -> usize {
        self.boundary.iter().filter(|&&b| !b).count()
    }
}

/// Assembled and solved virtual element system.
#[derive(Debug, Clone)]
pub struct VemSystem {
    pub mesh: PolygonalMesh,
    pub degree: usize,
    pub stab: StabKind,
    pub dofmap: DofMap,
    pub locals: Vec<LocalProjectors>,
    /// Per element, coefficients of `f_h = Π⁰_{max(p-2,0)} f`.
    pub load_coeffs: Vec<Vec<f64>>,
    pub stiffness: TripletMatrix,
    pub load: Vec<f64>,
    pub solution: Vec<f64>,
    /// Relative residual of the reduced linear system.
    pub residual: f64,
}

impl VemSystem {
    pub fn local_dofs(&self, k: usize, global: &[f64]) -> Vec<f64> {
        self.dofmap.elements[k].iter().map(|&g| global[g]).collect()
    }

    /// Coefficients of `Π∇_p u_h` on element `k`.
    pub fn projection_coeffs(&self, k: usize) -> Vec<f64> {
        let u = nalgebra::DVector::from_vec(self.local_dofs(k, &self.solution));
        (&self.locals[k].pi_nabla * u).as_slice().to_vec()
    }

    pub fn num_dofs(&self) -> usize {
        self.dofmap.ndofs
    }

    /// `a_h(u, v)` for global dof vectors.
    pub fn energy_product(&self, u: &[f64], v: &[f64]) -> f64 {
        self.stiffness.mul_vec(u).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Export: global dofs and per-element `Π∇_p u_h` in scaled monomials.
    pub fn export(&self) -> SolutionExport {
        SolutionExport {
            degree: self.degree,
            stab: self.stab,
            dofs: self.solution.clone(),
            elements: (0..self.mesh.num_elements())
                .map(|k| {
                    let lp = &self.locals[k];
                    let c = nalgebra::DVector::from_vec(self.projection_coeffs(k));
                    let mono = lp.basis.transform.transpose() * c;
                    ElementExport {
                        center: lp.basis.mono.center,
                        scale: lp.basis.mono.scale,
                        monomial_coeffs: mono.as_slice().to_vec(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementExport {
    pub center: Point,
    pub scale: f64,
    /// Coefficients of `((x - center) / scale)^α`, graded order.
    pub monomial_coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionExport {
    pub degree: usize,
    pub stab: StabKind,
    pub dofs: Vec<f64>,
    pub elements: Vec<ElementExport>,
}

/// Assembles the global system with `f` replaced by its elementwise
/// projection, imposes `g` at the boundary nodes and solves.
pub fn assemble_and_solve(
    mesh: &PolygonalMesh,
    degree: usize,
    stab: StabKind,
    f: ScalarFn,
    dirichlet: ScalarFn,
) -> Result<VemSystem> {
    if degree == 0 {
        return Err(Error::Config("degree must be at least 1".into()));
    }
    let dofmap = DofMap::new(mesh, degree);
    let n = dofmap.ndofs;
    let mut stiffness = TripletMatrix::new(n);
    let mut load = vec![0.0; n];
    let mut locals = Vec::with_capacity(mesh.num_elements());
    let mut load_coeffs = Vec::with_capacity(mesh.num_elements());
    for k in 0..mesh.num_elements() {
        let lp = compute_projectors(mesh, k, degree, stab)?;
        let fc = lp.project_load(f)?;
        let map = &dofmap.elements[k];
        for (a, &ga) in map.iter().enumerate() {
            for (b, &gb) in map.iter().enumerate() {
                stiffness.push(ga, gb, lp.stiffness[(a, b)]);
            }
        }
        for (a, v) in lp.load_vector(&fc).into_iter().enumerate() {
            load[map[a]] += v;
        }
        locals.push(lp);
        load_coeffs.push(fc);
    }

    let mut solution = vec![0.0; n];
    for g in 0..n {
        if dofmap.boundary[g] {
            solution[g] = dirichlet(dofmap.nodes[g].expect("boundary dofs are nodal"));
        }
    }
    let lifted = stiffness.mul_vec(&solution);
    let mut keep = vec![None; n];
    let mut rhs = Vec::new();
    for g in 0..n {
        if !dofmap.boundary[g] {
            keep[g] = Some(rhs.len());
            rhs.push(load[g] - lifted[g]);
        }
    }
    if rhs.len() == n {
        return Err(Error::Singular("global stiffness (no Dirichlet dofs)"));
    }
    let x = stiffness.solve_spd_reduced(&keep, &rhs, "global stiffness")?;
    for g in 0..n {
        if let Some(r) = keep[g] {
            solution[g] = x[r];
        }
    }
    let au = stiffness.mul_vec(&solution);
    let (mut rnum, mut rden) = (0.0f64, 0.0f64);
    for g in 0..n {
        if !dofmap.boundary[g] {
            rnum += (au[g] - load[g]).powi(2);
            rden += load[g].powi(2) + lifted[g].powi(2);
        }
    }
    let residual = if rden > 0.0 { (rnum / rden).sqrt() } else { rnum.sqrt() };
    Ok(VemSystem {
        mesh: mesh.clone(),
        degree,
        stab,
        dofmap,
        locals,
        load_coeffs,
        stiffness,
        load,
        solution,
        residual,
    })
}

/// `‖∇u - ∇_h Π∇_p u_h‖_Ω`, by quadrature of order `2p + 4` on the
/// element subtriangulations.
pub fn energy_projection_error(system: &VemSystem, exact_gradient: VectorFn) -> f64 {
    let mut total = 0.0;
    for k in 0..system.mesh.num_elements() {
        let lp = &system.locals[k];
        let c = system.projection_coeffs(k);
        let (pts, wts) = lp.quadrature(2 * system.degree + 4);
        for (x, w) in pts.iter().zip(&wts) {
            let g = exact_gradient(*x);
            let gh = lp.poly_gradient(&c, *x);
            total += w * ((g[0] - gh[0]).powi(2) + (g[1] - gh[1]).powi(2));
        }
    }
    total.sqrt()
}

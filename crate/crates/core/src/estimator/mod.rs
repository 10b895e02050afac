//! Vertex-patch a posteriori error estimator built on the generalised
//! gradient, and the matching error measure.

pub mod patch;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use patch::{eta_fl, eta_pt, PatchFlux, PatchPotential};

use crate::error::Result;
use crate::ggrad::GradientField;
use crate::mesh::VertexPatch;
use crate::polyspace::quadrature::segment_rule;
use crate::vem::{ScalarFn, VectorFn, VemSystem};

/// Divergence data of the patch flux problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxLoad {
    /// The solver's load `Π⁰_{p-2} f`.
    Discrete,
    /// `f` projected onto the full divergence space of the flux.
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Potential space degree is `p + potential_offset`.
    pub potential_offset: usize,
    /// Flux space degree is `p + flux_offset`.
    pub flux_offset: usize,
    pub flux_load: FluxLoad,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            potential_offset: 2,
            flux_offset: 0,
            flux_load: FluxLoad::Projected,
        }
    }
}

/// Data of the continuous problem seen by the estimator.
#[derive(Clone, Copy)]
pub struct ProblemData<'a> {
    pub f: ScalarFn<'a>,
    pub dirichlet: ScalarFn<'a>,
    /// Enables the error measure and the effectivity index.
    pub exact_gradient: Option<VectorFn<'a>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexTerms {
    pub vertex: usize,
    pub flux: f64,
    pub potential: f64,
    /// `‖𝔊 - ∇_h Π∇ u_h‖_{ω^ν}`.
    pub mismatch: f64,
    /// `Σ_{e ∋ ν} h_e⁻¹ ‖Π⁰_0 ⟦Π∇ u_h⟧‖²_e`.
    pub jump: f64,
    pub eta: f64,
    /// `ℰ(ω^ν)` when the exact gradient is known.
    pub local_error: Option<f64>,
}

/// Components of `ℰ(Ω)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorMeasure {
    /// `‖∇u - 𝔊‖_Ω`.
    pub gradient: f64,
    /// `‖𝔊 - ∇_h Π∇ u_h‖_Ω`.
    pub mismatch: f64,
    /// `(Σ_e h_e⁻¹ ‖Π⁰_0 ⟦Π∇ u_h⟧‖²_e)^{1/2}`.
    pub jump: f64,
    pub total: f64,
    /// `‖∇u - ∇_h Π∇ u_h‖_Ω`, for comparison.
    pub energy_projection: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatorReport {
    pub vertices: Vec<VertexTerms>,
    /// `η_E = (Σ_{ν ∈ E} η_ν²)^{1/2}`.
    pub element_eta: Vec<f64>,
    pub eta: f64,
    pub error: Option<ErrorMeasure>,
    pub effectivity: Option<f64>,
    /// Worst relative residuals of the patch solves.
    pub max_orthogonality: f64,
    pub max_flux_divergence: f64,
}

/// `(h_e⁻¹ ∫_e ⟦Π∇ u_h⟧)²` per edge; on boundary edges the jump is the trace
/// minus the Dirichlet data.
pub fn jump_term(system: &VemSystem, projections: &[Vec<f64>], dirichlet: ScalarFn) -> Vec<f64> {
    let mesh = &system.mesh;
    let n = system.degree + 4;
    (0..mesh.num_edges())
        .map(|e| {
            let [a, b] = mesh.edge(e);
            let (pts, wts, _) = segment_rule(mesh.vertex(a), mesh.vertex(b), n);
            let len = mesh.edge_length(e);
            let els = mesh.edge_elements(e);
            let trace = |k: usize, x| system.locals[k].poly_value(&projections[k], x);
            let mut s = 0.0;
            for (x, w) in pts.iter().zip(&wts) {
                let other = if els.len() == 2 {
                    trace(els[1], *x)
                } else {
                    dirichlet(*x)
                };
                s += w * (trace(els[0], *x) - other);
            }
            (s / len).powi(2)
        })
        .collect()
}

/// Elementwise pieces shared by the estimator and the error measure.
struct ElementTerms {
    jumps: Vec<f64>,
    /// `‖𝔊 - ∇_h Π∇ u_h‖²_E`.
    mismatch2: Vec<f64>,
    /// `‖∇u - 𝔊‖²_E`.
    gradient2: Option<Vec<f64>>,
}

fn element_terms(
    system: &VemSystem,
    field: &GradientField,
    dirichlet: ScalarFn,
    exact_gradient: Option<VectorFn>,
) -> ElementTerms {
    let mesh = &system.mesh;
    let p = system.degree;
    let q = field.degree();
    let subtri = &field.rt.subtri;
    let projections: Vec<Vec<f64>> = (0..mesh.num_elements()).map(|k| system.projection_coeffs(k)).collect();
    let jumps = jump_term(system, &projections, dirichlet);
    let mismatch2 = (0..mesh.num_elements())
        .map(|k| {
            let lp = &system.locals[k];
            field.dist2(subtri.element_triangles[k].clone(), 2 * q + 2, &|_, x| {
                lp.poly_gradient(&projections[k], x)
            })
        })
        .collect();
    let gradient2 = exact_gradient.map(|g| {
        (0..mesh.num_elements())
            .map(|k| {
                field.dist2(
                    subtri.element_triangles[k].clone(),
                    (2 * p + 4).max(2 * q + 2),
                    &|_, x| g(x),
                )
            })
            .collect()
    });
    ElementTerms {
        jumps,
        mismatch2,
        gradient2,
    }
}

fn measure(system: &VemSystem, terms: &ElementTerms, exact_gradient: VectorFn) -> Option<ErrorMeasure> {
    let ge = terms.gradient2.as_ref()?;
    let gradient = ge.iter().sum::<f64>().sqrt();
    let mismatch = terms.mismatch2.iter().sum::<f64>().sqrt();
    let jump = terms.jumps.iter().sum::<f64>().sqrt();
    Some(ErrorMeasure {
        gradient,
        mismatch,
        jump,
        total: (gradient * gradient + mismatch * mismatch + jump * jump).sqrt(),
        energy_projection: crate::vem::energy_projection_error(system, exact_gradient),
    })
}

/// `ℰ(Ω)` and its components, without solving any patch problem.
pub fn error_measure(
    system: &VemSystem,
    field: &GradientField,
    dirichlet: ScalarFn,
    exact_gradient: VectorFn,
) -> ErrorMeasure {
    let terms = element_terms(system, field, dirichlet, Some(exact_gradient));
    measure(system, &terms, exact_gradient).expect("gradient terms computed")
}

/// Assembles all estimator contributions; with an exact gradient the error
/// measure `ℰ` and the effectivity index are computed as well.
pub fn assemble_report(
    system: &VemSystem,
    field: &GradientField,
    patches: &[VertexPatch],
    data: ProblemData,
    options: EstimatorOptions,
) -> Result<EstimatorReport> {
    let mesh = &system.mesh;
    let p = system.degree;
    let (dirichlet, exact_gradient) = (data.dirichlet, data.exact_gradient);
    let load = match options.flux_load {
        FluxLoad::Discrete => None,
        FluxLoad::Projected => Some(data.f),
    };
    let terms = element_terms(system, field, dirichlet, exact_gradient);
    let (jumps, mismatch2) = (&terms.jumps, &terms.mismatch2);

    let mut vertices = Vec::with_capacity(patches.len());
    let mut max_orthogonality = 0.0f64;
    let mut max_flux_divergence = 0.0f64;
    for patch in patches {
        let pt = eta_pt(mesh, patch, field, p + options.potential_offset, dirichlet)?;
        let fl = eta_fl(system, patch, field, p + options.flux_offset, load)?;
        max_orthogonality = max_orthogonality.max(pt.orthogonality);
        max_flux_divergence = max_flux_divergence.max(fl.divergence);
        let mis2: f64 = patch.elements.iter().map(|&k| mismatch2[k]).sum();
        let jump: f64 = patch.edges.iter().map(|&e| jumps[e]).sum();
        let eta = (fl.eta.powi(2) + pt.eta.powi(2) + mis2 + jump).sqrt();
        let local_error = terms.gradient2.as_ref().map(|ge| {
            let vol: f64 = patch.elements.iter().map(|&k| ge[k] + mismatch2[k]).sum();
            let edges: f64 = patch.closure_edges(mesh).iter().map(|&e| jumps[e]).sum();
            (vol + edges).sqrt()
        });
        vertices.push(VertexTerms {
            vertex: patch.vertex,
            flux: fl.eta,
            potential: pt.eta,
            mismatch: mis2.sqrt(),
            jump,
            eta,
            local_error,
        });
    }
    let eta = vertices.iter().map(|v| v.eta.powi(2)).sum::<f64>().sqrt();
    let mut eta2 = vec![0.0; mesh.num_vertices()];
    for v in &vertices {
        eta2[v.vertex] = v.eta * v.eta;
    }
    let element_eta = (0..mesh.num_elements())
        .map(|k| mesh.element(k).iter().map(|&v| eta2[v]).sum::<f64>().sqrt())
        .collect();
    let error = exact_gradient.and_then(|g| measure(system, &terms, g));
    let effectivity = error.map(|e| eta / e.total);
    Ok(EstimatorReport {
        vertices,
        element_eta,
        eta,
        error,
        effectivity,
        max_orthogonality,
        max_flux_divergence,
    })
}

/// Empirical reliability and efficiency constants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundsProbe {
    /// `ℰ²(Ω) / η²`.
    pub reliability: Option<f64>,
    /// `max_ν η_ν / ℰ(ω^ν)` over patches with nonzero local error.
    pub efficiency: Option<f64>,
}

pub fn bounds_probe(report: &EstimatorReport) -> BoundsProbe {
    let reliability = report
        .error
        .filter(|e| report.eta > 0.0 && e.total > 0.0)
        .map(|e| e.total.powi(2) / report.eta.powi(2));
    let efficiency = report
        .vertices
        .iter()
        .filter_map(|v| v.local_error.filter(|&l| l > 0.0).map(|l| v.eta / l))
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    BoundsProbe {
        reliability,
        efficiency,
    }
}

impl EstimatorReport {
    /// One row per vertex.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "vertex,eta_flux,eta_potential,mismatch,jump,eta")?;
        for v in &self.vertices {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e}",
                v.vertex, v.flux, v.potential, v.mismatch, v.jump, v.eta
            )?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "eta": self.eta,
            "error": self.error,
            "effectivity": self.effectivity,
            "bounds": bounds_probe(self),
        })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ggrad::{generalised_gradient, RtMesh};
    use crate::mesh::{build_cartesian_mesh, refine, subtriangulate, vertex_patches, PolygonalMesh, Rect};
    use crate::vem::{assemble_and_solve, StabKind};

    fn interpolated(mesh: &PolygonalMesh, degree: usize, g: impl Fn(crate::mesh::Point) -> [f64; 2]) -> GradientField {
        let rt = Arc::new(RtMesh::new(subtriangulate(mesh).unwrap(), degree).unwrap());
        let dofs = rt.triangles.iter().map(|t| t.dofs_of(&g)).collect();
        GradientField { rt, dofs }
    }

    #[test]
    fn potential_estimator_vanishes_on_gradients() {
        // w = x(1-x)y(1-y) vanishes on the boundary; ∇w is in RT_3
        let m = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[0]).unwrap();
        let field = interpolated(&m, 3, |x| {
            [
                (1.0 - 2.0 * x[0]) * x[1] * (1.0 - x[1]),
                x[0] * (1.0 - x[0]) * (1.0 - 2.0 * x[1]),
            ]
        });
        for patch in vertex_patches(&m) {
            let pt = eta_pt(&m, &patch, &field, 4, &|_| 0.0).unwrap();
            assert!(pt.eta < 1e-10, "vertex {} eta {}", patch.vertex, pt.eta);
            assert!(pt.boundary_trace < 1e-10);
        }
    }

    #[test]
    fn flux_estimator_vanishes_for_solenoidal_field() {
        let m = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[2]).unwrap();
        let s = assemble_and_solve(&m, 1, StabKind::DofiDofi, &|_| 0.0, &|_| 0.0).unwrap();
        let field = interpolated(&m, 1, |_| [1.0, 2.0]);
        for patch in vertex_patches(&m) {
            let fl = eta_fl(&s, &patch, &field, 1, None).unwrap();
            assert!(fl.eta < 1e-10, "vertex {} eta {}", patch.vertex, fl.eta);
        }
    }

    #[test]
    fn jump_of_unit_step_between_squares() {
        let m = build_cartesian_mesh(2, 1, Rect::new(0.0, 0.0, 2.0, 1.0)).unwrap();
        let s = assemble_and_solve(&m, 1, StabKind::DofiDofi, &|_| 0.0, &|_| 0.0).unwrap();
        let trace = |k: usize| if m.centroid(k)[0] < 1.0 { 1.0 } else { 0.0 };
        let projections: Vec<Vec<f64>> = (0..2).map(|k| vec![trace(k), 0.0, 0.0]).collect();
        let g = |x: crate::mesh::Point| if x[0] < 1.0 { 1.0 } else { 0.0 };
        let jumps = jump_term(&s, &projections, &g);
        for (e, j) in jumps.iter().enumerate() {
            let expected = if m.is_boundary_edge(e) { 0.0 } else { 1.0 };
            assert!((j - expected).abs() < 1e-12, "edge {e}: {j}");
        }
    }

    #[test]
    fn patch_test_has_no_estimated_error() {
        let m = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[1]).unwrap();
        let u = |x: crate::mesh::Point| 1.0 + 3.0 * x[0] - 2.0 * x[1];
        for p in 1..=3 {
            let s = assemble_and_solve(&m, p, StabKind::Projected, &|_| 0.0, &u).unwrap();
            let (_, field) = generalised_gradient(&s).unwrap();
            let patches = vertex_patches(&m);
            let r = assemble_report(
                &s,
                &field,
                &patches,
                ProblemData {
                    f: &|_| 0.0,
                    dirichlet: &u,
                    exact_gradient: Some(&|_| [3.0, -2.0]),
                },
                EstimatorOptions::default(),
            )
            .unwrap();
            assert!(r.eta < 1e-7, "p={p} eta={}", r.eta);
            assert!(r.error.unwrap().total < 1e-7);
        }
    }

    #[test]
    fn effectivity_is_moderate_on_smooth_problem() {
        let pi = std::f64::consts::PI;
        let m = build_cartesian_mesh(4, 4, Rect::UNIT).unwrap();
        let f = |x: crate::mesh::Point| 2.0 * pi * pi * (pi * x[0]).sin() * (pi * x[1]).sin();
        let s = assemble_and_solve(&m, 2, StabKind::DofiDofi, &f, &|_| 0.0).unwrap();
        let (_, field) = generalised_gradient(&s).unwrap();
        let grad = |x: crate::mesh::Point| {
            [
                pi * (pi * x[0]).cos() * (pi * x[1]).sin(),
                pi * (pi * x[0]).sin() * (pi * x[1]).cos(),
            ]
        };
        let data = ProblemData {
            f: &f,
            dirichlet: &|_| 0.0,
            exact_gradient: Some(&grad),
        };
        let r = assemble_report(&s, &field, &vertex_patches(&m), data, EstimatorOptions::default()).unwrap();
        let eff = r.effectivity.unwrap();
        assert!(eff > 0.5 && eff < 10.0, "{eff}");
        let probe = bounds_probe(&r);
        assert!(probe.reliability.unwrap() < 10.0 && probe.efficiency.unwrap() < 10.0);
    }
}

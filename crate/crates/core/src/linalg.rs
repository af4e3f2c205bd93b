use nalgebra::Matrix4;

use crate::C64;

/// Eigenvalues of a Hermitian 4×4 matrix, ascending. Only the upper triangle
/// is trusted by the solver, so the caller is responsible for hermiticity.
pub(crate) fn hermitian_eigenvalues(m: &Matrix4<C64>) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Σ|λᵢ| for a Hermitian matrix.
pub(crate) fn hermitian_trace_norm(m: &Matrix4<C64>) -> f64 {
    m.symmetric_eigenvalues().iter().map(|v| v.abs()).sum()
}

pub(crate) fn max_hermitian_defect(m: &Matrix4<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

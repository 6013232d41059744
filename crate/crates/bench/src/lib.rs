//! Fixed inputs shared by the kernel benchmarks.

use smoothfe_core::complexes::{complex_spec, ComplexKind, ComplexSpec};
use smoothfe_core::elements::{build_dofs, DoFSet, ElementSpec, Family};
use smoothfe_core::exact_linalg::{rat, RatMatrix};
use smoothfe_core::lattice::SmoothnessPair;
use smoothfe_core::mesh::Mesh;

/// The `n × n` Hilbert matrix, a dense nonsingular matrix with growing entries.
pub fn hilbert(n: usize) -> RatMatrix {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| rat(1, (i + j + 1) as i64)).collect())
        .collect();
    RatMatrix::from_rows(rows, n).expect("square rows")
}

/// DoFs of the quintic C1 element with second derivatives at vertices.
pub fn argyris() -> DoFSet {
    build_dofs(&ElementSpec::scalar(5, SmoothnessPair::new(2, 1))).expect("valid element")
}

/// DoFs of the cubic symmetric H(div) element with vertex continuity.
pub fn hu_zhang() -> DoFSet {
    let spec = ElementSpec::new(
        Family::SymDiv,
        3,
        SmoothnessPair::new(0, -1),
        SmoothnessPair::new(-1, -1),
    );
    build_dofs(&spec).expect("valid element")
}

/// A smooth de Rham complex on the twice refined diagonal square.
pub fn stokes_complex() -> (ComplexSpec, Mesh) {
    let name = "builtin:square-diagonal-2";
    let spec = complex_spec(
        ComplexKind::Derham,
        4,
        SmoothnessPair::new(1, 0),
        SmoothnessPair::new(0, -1),
        name,
    );
    (spec, Mesh::builtin(name).expect("builtin mesh"))
}

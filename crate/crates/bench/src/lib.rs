//! Fixtures shared by the criterion benches.

use ndarray::Array2;
use qtruncate_core::{Circuit, Complex64, DetectionPattern, Element, Occupation, Preset, Wiring};

/// Deterministic dense `n × n` matrix with entries of unit scale.
pub fn test_matrix(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        let k = (i * n + j) as f64;
        Complex64::from_polar(1.0 / (1.0 + 0.1 * k), 0.7 * k + 0.3)
    })
}

/// Published flat d = 4 device on the default eight-port wiring.
pub fn d4_device() -> Circuit {
    Preset::Qsd8(Wiring::L0)
        .build(
            &[1.0 / 3.0, 0.25, 1.0, 1.0 / 3.0, 0.5],
            &[0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2],
        )
        .expect("valid parameters")
}

/// One photon in each ancilla mode, heralded on one photon per detector.
pub fn single_photon_herald() -> (Occupation, DetectionPattern) {
    let anc = Occupation::from([1, 1, 1]);
    let det = DetectionPattern::standard(anc.clone());
    (anc, det)
}

/// Balanced `n`-mode mesh of beam splitters and phases.
pub fn mesh(n: usize, layers: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for layer in 0..layers {
        for a in (layer % 2..n.saturating_sub(1)).step_by(2) {
            c.push(Element::phase_shifter(a, 0.4 + layer as f64), None)
                .expect("mode in range");
            c.push(Element::beam_splitter(a, a + 1, 0.5), None)
                .expect("modes in range");
        }
    }
    c
}

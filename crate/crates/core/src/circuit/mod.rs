//! Beam-splitter / phase-shifter networks and their scattering matrices.
//!
//! Convention: output annihilation operators are `b = S a`. A beam splitter
//! on modes `(p, q)` with transmittance `t²` contributes the real block
//! `[t, r; -r, t]` (`t, r ≥ 0`), a phase shifter multiplies its mode by
//! `e^{iξ}`. Elements are listed in the order light meets them, so the
//! compiled matrix is the product with the first element rightmost.
//!
//! Mode indices are 0-based in the API and 1-based in the JSON format.

mod catalog;
mod preset;

use std::fmt;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{expr, Error, Result};

pub use catalog::{catalog, find_entry, CatalogEntry, Family};
pub use preset::{Preset, Wiring};

/// Unitarity tolerance for compiled matrices.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    BeamSplitter { modes: (usize, usize), t2: f64 },
    PhaseShifter { mode: usize, xi: f64 },
}

impl Element {
    pub fn beam_splitter(a: usize, b: usize, t2: f64) -> Self {
        Element::BeamSplitter { modes: (a, b), t2 }
    }

    pub fn phase_shifter(mode: usize, xi: f64) -> Self {
        Element::PhaseShifter { mode, xi }
    }

    pub fn validate(&self, num_modes: usize) -> Result<()> {
        let check = |index: usize| {
            if index < num_modes {
                Ok(())
            } else {
                Err(Error::ModeOutOfRange { index, num_modes })
            }
        };
        match *self {
            Element::BeamSplitter { modes: (a, b), t2 } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::DuplicateModes(a));
                }
                if !t2.is_finite() {
                    return Err(Error::NonFinite(t2));
                }
                if !(0.0..=1.0).contains(&t2) {
                    return Err(Error::InvalidTransmittance(t2));
                }
            }
            Element::PhaseShifter { mode, xi } => {
                check(mode)?;
                if !xi.is_finite() {
                    return Err(Error::NonFinite(xi));
                }
            }
        }
        Ok(())
    }

    /// `(t, r)` for a beam splitter, both non-negative.
    pub fn amplitudes(t2: f64) -> (f64, f64) {
        (t2.sqrt(), (1.0 - t2).max(0.0).sqrt())
    }

    /// The element's own `N × N` matrix.
    pub fn matrix(&self, num_modes: usize) -> Array2<Complex64> {
        let mut m = Array2::eye(num_modes);
        match *self {
            Element::BeamSplitter { modes: (p, q), t2 } => {
                let (t, r) = Element::amplitudes(t2);
                m[[p, p]] = Complex64::new(t, 0.0);
                m[[p, q]] = Complex64::new(r, 0.0);
                m[[q, p]] = Complex64::new(-r, 0.0);
                m[[q, q]] = Complex64::new(t, 0.0);
            }
            Element::PhaseShifter { mode, xi } => {
                m[[mode, mode]] = Complex64::from_polar(1.0, xi);
            }
        }
        m
    }

    /// Left-multiply `s` by this element in place.
    fn apply_rows(&self, s: &mut Array2<Complex64>) {
        match *self {
            Element::BeamSplitter { modes: (p, q), t2 } => {
                let (t, r) = Element::amplitudes(t2);
                for j in 0..s.ncols() {
                    let sp = s[[p, j]];
                    let sq = s[[q, j]];
                    s[[p, j]] = sp * t + sq * r;
                    s[[q, j]] = sq * t - sp * r;
                }
            }
            Element::PhaseShifter { mode, xi } => {
                let ph = Complex64::from_polar(1.0, xi);
                for j in 0..s.ncols() {
                    s[[mode, j]] *= ph;
                }
            }
        }
    }
}

/// Ordered list of elements on `num_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_modes: usize,
    elements: Vec<Element>,
    labels: Vec<Option<String>>,
}

impl Circuit {
    pub fn new(num_modes: usize) -> Self {
        assert!(num_modes >= 1, "at least one mode required");
        Circuit {
            num_modes,
            elements: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_elements(num_modes: usize, elements: Vec<Element>) -> Result<Self> {
        let mut c = Circuit::new(num_modes);
        for e in elements {
            c.push(e, None)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, element: Element, label: Option<String>) -> Result<&mut Self> {
        element.validate(self.num_modes)?;
        self.elements.push(element);
        self.labels.push(label);
        Ok(self)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).and_then(|l| l.as_deref())
    }

    pub fn compile(&self) -> Result<ScatteringMatrix> {
        let mut s = Array2::eye(self.num_modes);
        for e in &self.elements {
            e.validate(self.num_modes)?;
            e.apply_rows(&mut s);
        }
        Ok(ScatteringMatrix(s))
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        CircuitFile::parse(src)?.into_circuit()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            input: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Circuit::from_json_str(&src)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let record = CircuitRecord {
            modes: self.num_modes,
            elements: self
                .elements
                .iter()
                .zip(&self.labels)
                .map(|(e, label)| match *e {
                    Element::BeamSplitter { modes: (a, b), t2 } => ElementRecord::Bs {
                        modes: [a + 1, b + 1],
                        t2: Literal::Number(t2),
                        label: label.clone(),
                    },
                    Element::PhaseShifter { mode, xi } => ElementRecord::Ps {
                        mode: mode + 1,
                        xi: Literal::Number(xi),
                        label: label.clone(),
                    },
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }
}

/// `N × N` unitary with `b = S a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix(Array2<Complex64>);

impl ScatteringMatrix {
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NonSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(ScatteringMatrix(entries))
    }

    pub fn identity(n: usize) -> Self {
        ScatteringMatrix(Array2::eye(n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[[row, col]]
    }

    /// `max |S†S − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::default();
                for k in 0..n {
                    acc += self.0[[k, i]].conj() * self.0[[k, j]];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARITY_TOL
    }
}

impl fmt::Display for ScatteringMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0.rows() {
            for (j, z) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A number that may also be written as a literal expression (`"pi/2"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Expr(String),
}

impl Literal {
    pub fn value(&self) -> Result<f64> {
        match self {
            Literal::Number(x) => Ok(*x),
            Literal::Expr(s) => expr::eval(s),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    modes: usize,
    elements: Vec<ElementRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ElementRecord {
    Bs {
        modes: [usize; 2],
        t2: Literal,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Ps {
        mode: usize,
        xi: Literal,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetRecord {
    preset: String,
    t2: Vec<Literal>,
    xi: Vec<Literal>,
}

enum CircuitFile {
    Explicit(CircuitRecord),
    Preset(PresetRecord),
}

impl CircuitFile {
    fn parse(src: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(src)?;
        if probe.get("preset").is_some() {
            Ok(CircuitFile::Preset(serde_json::from_str(src)?))
        } else {
            Ok(CircuitFile::Explicit(serde_json::from_str(src)?))
        }
    }

    fn into_circuit(self) -> Result<Circuit> {
        match self {
            CircuitFile::Preset(p) => {
                let preset: Preset = p.preset.parse()?;
                let t2 =
                    p.t2.iter()
                        .map(Literal::value)
                        .collect::<Result<Vec<_>>>()?;
                let xi =
                    p.xi.iter()
                        .map(Literal::value)
                        .collect::<Result<Vec<_>>>()?;
                preset.build(&t2, &xi)
            }
            CircuitFile::Explicit(rec) => {
                if rec.modes == 0 {
                    return Err(Error::Parse {
                        input: "modes".into(),
                        reason: "at least one mode required".into(),
                    });
                }
                // errors report the file's 1-based numbering
                let one_based = |m: usize| {
                    if (1..=rec.modes).contains(&m) {
                        Ok(m - 1)
                    } else {
                        Err(Error::ModeOutOfRange {
                            index: m,
                            num_modes: rec.modes,
                        })
                    }
                };
                let mut c = Circuit::new(rec.modes);
                for e in rec.elements {
                    match e {
                        ElementRecord::Bs { modes, t2, label } => {
                            if modes[0] == modes[1] {
                                return Err(Error::DuplicateModes(modes[0]));
                            }
                            let el = Element::beam_splitter(
                                one_based(modes[0])?,
                                one_based(modes[1])?,
                                t2.value()?,
                            );
                            c.push(el, label)?;
                        }
                        ElementRecord::Ps { mode, xi, label } => {
                            c.push(Element::phase_shifter(one_based(mode)?, xi.value()?), label)?;
                        }
                    }
                }
                Ok(c)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn product_oracle(c: &Circuit) -> Array2<Complex64> {
        let mut s = Array2::eye(c.num_modes());
        for e in c.elements() {
            s = e.matrix(c.num_modes()).dot(&s);
        }
        s
    }

    fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn empty_is_identity() {
        let s = Circuit::new(3).compile().unwrap();
        assert_eq!(s, ScatteringMatrix::identity(3));
    }

    #[test]
    fn transparent_beam_splitter() {
        let c = Circuit::from_elements(2, vec![Element::beam_splitter(0, 1, 1.0)]).unwrap();
        assert_eq!(c.compile().unwrap(), ScatteringMatrix::identity(2));
    }

    #[test]
    fn balanced_beam_splitter() {
        let c = Circuit::from_elements(2, vec![Element::beam_splitter(0, 1, 0.5)]).unwrap();
        let s = c.compile().unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [[h, h], [-h, h]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((s.get(i, j) - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn invalid_elements() {
        let mut c = Circuit::new(2);
        assert!(matches!(
            c.push(Element::beam_splitter(0, 1, 1.5), None),
            Err(Error::InvalidTransmittance(_))
        ));
        assert!(matches!(
            c.push(Element::beam_splitter(1, 1, 0.5), None),
            Err(Error::DuplicateModes(1))
        ));
        assert!(matches!(
            c.push(Element::phase_shifter(2, 0.0), None),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(c.elements().is_empty());
    }

    #[test]
    fn compile_is_order_sensitive() {
        let a = Element::beam_splitter(0, 1, 0.3);
        let b = Element::phase_shifter(0, 1.1);
        let ab = Circuit::from_elements(2, vec![a, b])
            .unwrap()
            .compile()
            .unwrap();
        let ba = Circuit::from_elements(2, vec![b, a])
            .unwrap()
            .compile()
            .unwrap();
        assert!(max_diff(ab.entries(), ba.entries()) > 1e-3);
    }

    #[test]
    fn json_with_literals() {
        let src = r#"{"modes": 2, "elements": [
            {"type": "ps", "mode": 2, "xi": "pi/2", "label": "P1"},
            {"type": "bs", "modes": [1, 2], "t2": "1/2", "label": "B1"}
        ]}"#;
        let c = Circuit::from_json_str(src).unwrap();
        assert_eq!(c.elements()[0], Element::phase_shifter(1, PI / 2.0));
        assert_eq!(c.elements()[1], Element::beam_splitter(0, 1, 0.5));
        assert_eq!(c.label(1), Some("B1"));
    }

    #[test]
    fn json_preset() {
        let src = r#"{"preset": "qsd6", "t2": ["1/2", 0.5], "xi": [0, "pi"]}"#;
        let c = Circuit::from_json_str(src).unwrap();
        let direct = Preset::Qsd6.build(&[0.5, 0.5], &[0.0, PI]).unwrap();
        assert_eq!(c, direct);
    }

    #[test]
    fn json_rejects_malformed() {
        assert!(Circuit::from_json_str(r#"{"modes": 2, "elements": [{"type": "xx"}]}"#).is_err());
        assert!(Circuit::from_json_str(
            r#"{"modes": 2, "elements": [{"type": "bs", "modes": [0, 1], "t2": 1}]}"#
        )
        .is_err());
        assert!(Circuit::from_json_str(r#"{"modes": 2"#).is_err());
        assert!(Circuit::from_json_str(r#"{"modes": 2, "elements": [], "extra": 1}"#).is_err());
        assert!(matches!(
            Circuit::from_json_str(
                r#"{"modes": 2, "elements": [{"type": "ps", "mode": 3, "xi": 0}]}"#
            ),
            Err(Error::ModeOutOfRange {
                index: 3,
                num_modes: 2
            })
        ));
        assert!(matches!(
            Circuit::from_json_str(
                r#"{"modes": 2, "elements": [{"type": "bs", "modes": [2, 2], "t2": 0.5}]}"#
            ),
            Err(Error::DuplicateModes(2))
        ));
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..=5).prop_flat_map(|n| {
            let element = (
                0..n,
                0..n - 1,
                0.0f64..=1.0,
                0.0f64..(2.0 * PI),
                any::<bool>(),
            )
                .prop_map(move |(a, off, t2, xi, is_bs)| {
                    if is_bs {
                        let b = (a + 1 + off) % n;
                        Element::beam_splitter(a, b, t2)
                    } else {
                        Element::phase_shifter(a, xi)
                    }
                });
            proptest::collection::vec(element, 0..=10)
                .prop_map(move |els| Circuit::from_elements(n, els).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn compiled_matrix_is_unitary_product(c in arb_circuit()) {
            let s = c.compile().unwrap();
            prop_assert!(s.unitarity_error() <= UNITARITY_TOL);
            prop_assert!(max_diff(s.entries(), &product_oracle(&c)) < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(c in arb_circuit()) {
            let text = c.to_json_string().unwrap();
            let back = Circuit::from_json_str(&text).unwrap();
            prop_assert_eq!(c.compile().unwrap(), back.compile().unwrap());
        }
    }
}

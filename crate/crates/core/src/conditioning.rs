//! Heralding on detector outcomes and truncation profiles.
//!
//! The signal enters the last mode, ancilla Fock states the others; mode 1
//! (index 0) is the output port and the remaining modes are counted. With
//! ancilla counts `n_1 … n_{N−1}` and detected counts `N_2 … N_N`, the
//! heralded output is `Σ_n c_n γ_n |n⟩` with
//! `c_n = ⟨n, N_2, …, N_N| U |n_1, …, n_{N−1}, n⟩`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, ScatteringMatrix};
use crate::evolution::{evolve, matrix_element};
use crate::fock::{make_input, Occupation, SingleModeInput, StateVector};
use crate::{Error, Result};

/// Detector counts on every mode but the output port.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetectionPattern {
    output_mode: usize,
    counts: Occupation,
}

impl DetectionPattern {
    /// Output port mode 1, counts on modes 2..=N in order.
    pub fn standard(counts: Occupation) -> Self {
        DetectionPattern {
            output_mode: 0,
            counts,
        }
    }

    pub fn output_mode(&self) -> usize {
        self.output_mode
    }

    pub fn counts(&self) -> &Occupation {
        &self.counts
    }

    pub fn num_modes(&self) -> usize {
        self.counts.num_modes() + 1
    }

    pub fn measured_modes(&self) -> Vec<usize> {
        (0..self.num_modes())
            .filter(|&m| m != self.output_mode)
            .collect()
    }

    pub fn total(&self) -> u32 {
        self.counts.total()
    }

    /// The full occupation with `n` photons at the output port.
    pub fn full_occupation(&self, n: u32) -> Occupation {
        let mut v = self.counts.counts().to_vec();
        v.insert(self.output_mode, n);
        Occupation::new(v)
    }
}

/// Which Fock components of a `d`-dimensional truncation should survive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TargetPattern {
    d: usize,
    kept: BTreeSet<usize>,
}

impl TargetPattern {
    pub fn new(d: usize, kept: impl IntoIterator<Item = usize>) -> Result<Self> {
        let kept: BTreeSet<usize> = kept.into_iter().collect();
        if d == 0 {
            return Err(Error::InvalidTarget("dimension must be at least 1".into()));
        }
        if kept.is_empty() {
            return Err(Error::InvalidTarget("no component kept".into()));
        }
        if let Some(&k) = kept.iter().find(|&&k| k >= d) {
            return Err(Error::InvalidTarget(format!("index {k} outside 0..{d}")));
        }
        Ok(TargetPattern { d, kept })
    }

    /// Keep `|0⟩ … |d−1⟩`.
    pub fn truncation(d: usize) -> Result<Self> {
        TargetPattern::new(d, 0..d)
    }

    /// Remove the listed components.
    pub fn punch(d: usize, holes: &[usize]) -> Result<Self> {
        if let Some(&k) = holes.iter().find(|&&k| k >= d) {
            return Err(Error::InvalidTarget(format!("hole {k} outside 0..{d}")));
        }
        TargetPattern::new(d, (0..d).filter(|k| !holes.contains(k)))
    }

    /// Keep only `|k⟩`.
    pub fn fock(d: usize, k: usize) -> Result<Self> {
        TargetPattern::new(d, [k])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kept(&self) -> &BTreeSet<usize> {
        &self.kept
    }

    pub fn holes(&self) -> Vec<usize> {
        (0..self.d).filter(|k| !self.kept.contains(k)).collect()
    }
}

/// Heralded state on the output port (single mode, unnormalized) and the
/// heralding probability.
pub fn project(evolved: &StateVector, pattern: &DetectionPattern) -> Result<(StateVector, f64)> {
    if evolved.num_modes() != pattern.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: pattern.num_modes(),
            actual: evolved.num_modes(),
        });
    }
    let total = evolved.norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let out_mode = pattern.output_mode();
    let mut reduced = StateVector::new(1);
    for (occ, amp) in evolved.iter() {
        let matches = pattern
            .measured_modes()
            .iter()
            .zip(pattern.counts().counts())
            .all(|(&m, &k)| occ.get(m) == k);
        if matches {
            reduced.add(Occupation::new(vec![occ.get(out_mode)]), *amp);
        }
    }
    let p = reduced.norm_sqr() / total;
    Ok((reduced, p))
}

/// `c_0 … c_{d−1}` for one device and heralding configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationProfile {
    coefficients: Vec<Complex64>,
    ancilla: Occupation,
    detection: DetectionPattern,
}

impl TruncationProfile {
    /// Wrap raw coefficients, e.g. for analysis of hypothetical profiles.
    pub fn from_coefficients(
        coefficients: Vec<Complex64>,
        ancilla: Occupation,
        detection: DetectionPattern,
    ) -> Self {
        TruncationProfile {
            coefficients,
            ancilla,
            detection,
        }
    }

    pub fn d(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn ancilla(&self) -> &Occupation {
        &self.ancilla
    }

    pub fn detection(&self) -> &DetectionPattern {
        &self.detection
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn check_configuration(
    num_modes: usize,
    ancilla: &Occupation,
    detection: &DetectionPattern,
) -> Result<()> {
    for len in [ancilla.num_modes() + 1, detection.num_modes()] {
        if len != num_modes {
            return Err(Error::DimensionMismatch {
                expected: num_modes,
                actual: len,
            });
        }
    }
    if detection.total() != ancilla.total() {
        return Err(Error::SumMismatch {
            detected: detection.total(),
            ancilla: ancilla.total(),
        });
    }
    Ok(())
}

/// `c_n` for any `n`, including `n ≥ d` where it should vanish.
pub fn coefficient(
    s: &ScatteringMatrix,
    ancilla: &Occupation,
    detection: &DetectionPattern,
    n: u32,
) -> Result<Complex64> {
    let mut input = ancilla.counts().to_vec();
    input.push(n);
    matrix_element(s, &detection.full_occupation(n), &Occupation::new(input))
}

/// Profile from permanents of the compiled scattering matrix.
pub fn truncation_profile(
    circuit: &Circuit,
    ancilla: &Occupation,
    detection: &DetectionPattern,
) -> Result<TruncationProfile> {
    check_configuration(circuit.num_modes(), ancilla, detection)?;
    let s = circuit.compile()?;
    profile_from_matrix(&s, ancilla, detection)
}

pub(crate) fn profile_from_matrix(
    s: &ScatteringMatrix,
    ancilla: &Occupation,
    detection: &DetectionPattern,
) -> Result<TruncationProfile> {
    let d = ancilla.total() + 1;
    let coefficients = (0..d)
        .map(|n| coefficient(s, ancilla, detection, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationProfile {
        coefficients,
        ancilla: ancilla.clone(),
        detection: detection.clone(),
    })
}

/// The same profile obtained from sequential evolution of each
/// `|ancilla, n⟩`, for cross-checking.
pub fn truncation_profile_by_evolution(
    circuit: &Circuit,
    ancilla: &Occupation,
    detection: &DetectionPattern,
) -> Result<TruncationProfile> {
    check_configuration(circuit.num_modes(), ancilla, detection)?;
    let signal_mode = circuit.num_modes() - 1;
    let d = ancilla.total() + 1;
    let coefficients = (0..d)
        .map(|n| {
            let input = make_input(&SingleModeInput::Fock(n), ancilla, signal_mode)?;
            let out = evolve(&input, circuit)?;
            Ok(out.amplitude(&detection.full_occupation(n)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncationProfile {
        coefficients,
        ancilla: ancilla.clone(),
        detection: detection.clone(),
    })
}

/// `|Σ_{n∈kept} c_n|² / (‖c‖² |kept|)`: the squared overlap of the
/// normalized profile with the normalized kept-indicator, maximized over
/// global phase. Equal to one exactly when `c` is a complex multiple of the
/// indicator.
pub fn profile_fidelity(profile: &TruncationProfile, target: &TargetPattern) -> Result<f64> {
    if profile.d() != target.d() {
        return Err(Error::TargetDimension {
            profile: profile.d(),
            target: target.d(),
        });
    }
    let norm = profile.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let overlap: Complex64 = target.kept().iter().map(|&n| profile.coefficients[n]).sum();
    Ok((overlap.norm_sqr() / (norm * target.kept().len() as f64)).min(1.0))
}

fn normalized_signal(signal: &SingleModeInput) -> Result<Vec<Complex64>> {
    let g = signal.coefficients();
    let norm: f64 = g.iter().map(|x| x.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(Error::EmptySignal);
    }
    let s = norm.sqrt();
    Ok(g.into_iter().map(|x| x / s).collect())
}

/// `Σ_{n<d} |γ_n c_n|²` with `γ` normalized over its stored support.
pub fn success_probability(profile: &TruncationProfile, signal: &SingleModeInput) -> Result<f64> {
    let g = normalized_signal(signal)?;
    Ok(profile
        .coefficients
        .iter()
        .zip(&g)
        .map(|(c, g)| (c * g).norm_sqr())
        .sum())
}

/// Normalized heralded output `∝ Σ c_n γ_n |n⟩` and its fidelity to the
/// ideal `Σ_{n∈kept} γ_n |n⟩`.
pub fn output_state(
    profile: &TruncationProfile,
    signal: &SingleModeInput,
    target: &TargetPattern,
) -> Result<(StateVector, f64)> {
    if profile.d() != target.d() {
        return Err(Error::TargetDimension {
            profile: profile.d(),
            target: target.d(),
        });
    }
    let g = normalized_signal(signal)?;
    let mut raw = StateVector::new(1);
    let mut ideal = StateVector::new(1);
    for (n, c) in profile.coefficients.iter().enumerate() {
        let gn = g.get(n).copied().unwrap_or_default();
        let amp = c * gn;
        if amp.norm_sqr() != 0.0 {
            raw.add(Occupation::new(vec![n as u32]), amp);
        }
        if target.kept().contains(&n) && gn.norm_sqr() != 0.0 {
            ideal.add(Occupation::new(vec![n as u32]), gn);
        }
    }
    if raw.norm_sqr() == 0.0 {
        return Err(Error::ImpossibleHerald);
    }
    let f = if ideal.norm_sqr() == 0.0 {
        0.0
    } else {
        crate::fock::fidelity(&raw, &ideal)?
    };
    Ok((raw.normalized()?, f))
}

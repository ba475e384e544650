//! Multi-mode bosonic Fock basis and sparse state vectors.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Photon counts per mode, `|n_1, …, n_N⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Occupation(vec![0; num_modes])
    }

    pub fn num_modes(&self) -> usize {
        self.0.len()
    }

    /// Total photon number ν.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Copy with one mode's count replaced.
    pub fn with(&self, mode: usize, count: u32) -> Self {
        let mut c = self.0.clone();
        c[mode] = count;
        Occupation(c)
    }

    /// `Π n_i!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(v: [u32; N]) -> Self {
        Occupation(v.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// All occupations of `num_modes` modes holding exactly `total_photons`,
/// in lexicographic order.
pub fn enumerate_basis(num_modes: usize, total_photons: u32) -> Vec<Occupation> {
    assert!(num_modes >= 1, "at least one mode required");
    let mut out = Vec::new();
    let mut current = vec![0u32; num_modes];
    fill(&mut current, 0, total_photons, &mut out);
    out
}

fn fill(current: &mut [u32], mode: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if mode == current.len() - 1 {
        current[mode] = remaining;
        out.push(Occupation(current.to_vec()));
        return;
    }
    for k in 0..=remaining {
        current[mode] = k;
        fill(current, mode + 1, remaining - k, out);
    }
}

/// Sparse pure state over a fixed number of modes.
///
/// The map is ordered so iteration (and everything serialized from it) is
/// deterministic. States are not normalized implicitly; use
/// [`StateVector::norm_sqr`] where a norm is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_modes: usize,
    amplitudes: BTreeMap<Occupation, Complex64>,
}

impl StateVector {
    pub fn new(num_modes: usize) -> Self {
        assert!(num_modes >= 1, "at least one mode required");
        StateVector {
            num_modes,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Single basis state with unit amplitude.
    pub fn basis(occupation: Occupation) -> Self {
        let mut s = StateVector::new(occupation.num_modes());
        s.amplitudes.insert(occupation, Complex64::new(1.0, 0.0));
        s
    }

    /// Single-mode state `Σ coeffs[n] |n⟩`.
    pub fn single_mode(coeffs: &[Complex64]) -> Self {
        let mut s = StateVector::new(1);
        for (n, &c) in coeffs.iter().enumerate() {
            s.add(Occupation(vec![n as u32]), c);
        }
        s
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, occupation: &Occupation) -> Complex64 {
        self.amplitudes.get(occupation).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Accumulate `amp` onto `occupation`.
    ///
    /// Panics if the occupation has the wrong number of modes.
    pub fn add(&mut self, occupation: Occupation, amp: Complex64) {
        assert_eq!(
            occupation.num_modes(),
            self.num_modes,
            "mode count mismatch"
        );
        *self.amplitudes.entry(occupation).or_default() += amp;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_modes != other.num_modes {
            return Err(Error::DimensionMismatch {
                expected: self.num_modes,
                actual: other.num_modes,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .map(|(occ, a)| a.conj() * other.amplitude(occ))
            .sum())
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            num_modes: self.num_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(o, a)| (o.clone(), a * factor))
                .collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Drop amplitudes with modulus at or below `threshold`.
    pub fn pruned(&self, threshold: f64) -> StateVector {
        StateVector {
            num_modes: self.num_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(_, a)| a.norm() > threshold)
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
        }
    }

    /// Distinct total photon numbers present.
    pub fn sectors(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.amplitudes.keys().map(Occupation::total).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// The component with exactly `total` photons.
    pub fn sector(&self, total: u32) -> StateVector {
        StateVector {
            num_modes: self.num_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(o, _)| o.total() == total)
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
        }
    }

    pub(crate) fn from_map(num_modes: usize, amplitudes: BTreeMap<Occupation, Complex64>) -> Self {
        StateVector {
            num_modes,
            amplitudes,
        }
    }

    pub(crate) fn into_map(self) -> BTreeMap<Occupation, Complex64> {
        self.amplitudes
    }
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let overlap = a.inner(b)?;
    Ok((overlap.norm_sqr() / (na * nb)).min(1.0))
}

/// Input for the signal mode.
#[derive(Debug, Clone, PartialEq)]
pub enum SingleModeInput {
    Fock(u32),
    /// Coherent state truncated at `cutoff` (inclusive). `None` picks
    /// [`default_cutoff`].
    Coherent {
        alpha: Complex64,
        cutoff: Option<u32>,
    },
    /// Explicit `γ_0 … γ_m`.
    Custom(Vec<Complex64>),
}

/// `max(20, ⌈|α|² + 6|α| + 10⌉)`.
pub fn default_cutoff(alpha: Complex64) -> u32 {
    let a = alpha.norm();
    (a * a + 6.0 * a + 10.0).ceil().max(20.0) as u32
}

impl SingleModeInput {
    pub fn coherent(alpha: f64) -> Self {
        SingleModeInput::Coherent {
            alpha: Complex64::new(alpha, 0.0),
            cutoff: None,
        }
    }

    pub fn cutoff(&self) -> u32 {
        match self {
            SingleModeInput::Fock(k) => *k,
            SingleModeInput::Coherent { alpha, cutoff } => {
                cutoff.unwrap_or_else(|| default_cutoff(*alpha))
            }
            SingleModeInput::Custom(c) => c.len().saturating_sub(1) as u32,
        }
    }

    /// `γ_0 … γ_cutoff`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        match self {
            SingleModeInput::Fock(k) => {
                let mut v = vec![Complex64::default(); *k as usize + 1];
                v[*k as usize] = Complex64::new(1.0, 0.0);
                v
            }
            SingleModeInput::Coherent { alpha, .. } => {
                let cutoff = self.cutoff();
                let mut v = Vec::with_capacity(cutoff as usize + 1);
                let mut term = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
                for n in 0..=cutoff {
                    if n > 0 {
                        term = term * alpha / f64::from(n).sqrt();
                    }
                    v.push(term);
                }
                v
            }
            SingleModeInput::Custom(c) => c.clone(),
        }
    }

    /// Probability mass beyond the cutoff. Zero except for coherent inputs.
    pub fn tail_mass(&self) -> f64 {
        let SingleModeInput::Coherent { alpha, .. } = self else {
            return 0.0;
        };
        let x = alpha.norm_sqr();
        let cutoff = self.cutoff();
        // e^{-x} x^n / n! for n = cutoff + 1, summed until negligible
        let mut log_term = -x;
        for n in 1..=cutoff + 1 {
            log_term += x.ln() - f64::from(n).ln();
        }
        if x == 0.0 {
            return 0.0;
        }
        let mut term = log_term.exp();
        let mut sum = 0.0;
        let mut n = cutoff + 1;
        while term > sum * 1e-17 && n < cutoff + 10_000 {
            sum += term;
            n += 1;
            term *= x / f64::from(n);
        }
        sum
    }
}

/// Product state with `signal` on `signal_mode` and the `ancilla` Fock
/// counts on the remaining modes in order.
pub fn make_input(
    signal: &SingleModeInput,
    ancilla: &Occupation,
    signal_mode: usize,
) -> Result<StateVector> {
    let num_modes = ancilla.num_modes() + 1;
    if signal_mode >= num_modes {
        return Err(Error::ModeOutOfRange {
            index: signal_mode,
            num_modes,
        });
    }
    let coeffs = signal.coefficients();
    if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::EmptySignal);
    }
    let mut state = StateVector::new(num_modes);
    for (n, &g) in coeffs.iter().enumerate() {
        if g.norm_sqr() == 0.0 {
            continue;
        }
        let mut counts = ancilla.counts().to_vec();
        counts.insert(signal_mode, n as u32);
        state.add(Occupation(counts), g);
    }
    Ok(state)
}

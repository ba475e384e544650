//! Fock-space evolution through a circuit.
//!
//! Two independent routes compute the same amplitudes:
//!
//! - [`evolve`] applies elements one at a time. A phase shifter multiplies
//!   each term by `e^{ikξ}` for `k` photons in its mode; a beam splitter on
//!   `(p, q)` substitutes `a_p† → t a_p† − r a_q†`, `a_q† → r a_p† + t a_q†`
//!   (the columns of its scattering block) and re-expands binomially.
//! - [`matrix_element`] evaluates `⟨m|U|n⟩ = perm(S[m|n]) / √(Π m_i! Π n_j!)`
//!   where `S[m|n]` repeats row `i` of `S` `m_i` times and column `j` `n_j`
//!   times.
//!
//! The sequential route is the production path; the permanent route is the
//! oracle and is also what truncation profiles are computed from.

use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Element, ScatteringMatrix};
use crate::fock::{enumerate_basis, factorial, Occupation, StateVector};
use crate::{Error, Result};

/// Apply a single element to a state.
pub fn apply_element(state: &StateVector, element: &Element) -> Result<StateVector> {
    element.validate(state.num_modes())?;
    let num_modes = state.num_modes();
    match *element {
        Element::PhaseShifter { mode, xi } => {
            let mut out = BTreeMap::new();
            for (occ, amp) in state.iter() {
                let k = occ.get(mode);
                let phase = Complex64::from_polar(1.0, f64::from(k) * xi);
                out.insert(occ.clone(), amp * phase);
            }
            Ok(StateVector::from_map(num_modes, out))
        }
        Element::BeamSplitter { modes: (p, q), t2 } => {
            let (t, r) = Element::amplitudes(t2);
            let mut tables: HashMap<(u32, u32), Vec<f64>> = HashMap::new();
            let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
            for (occ, amp) in state.iter() {
                let a = occ.get(p);
                let b = occ.get(q);
                let table = tables
                    .entry((a, b))
                    .or_insert_with(|| beam_splitter_table(a, b, t, r));
                for (k, &w) in table.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let k = k as u32;
                    let target = occ.with(p, k).with(q, a + b - k);
                    *out.entry(target).or_default() += amp * w;
                }
            }
            Ok(StateVector::from_map(num_modes, out))
        }
    }
}

/// Amplitude of `|k, a+b−k⟩` produced from `|a, b⟩` on the coupled pair.
fn beam_splitter_table(a: u32, b: u32, t: f64, r: f64) -> Vec<f64> {
    let total = a + b;
    let mut w = vec![0.0; total as usize + 1];
    // (t x − r y)^a (r x + t y)^b, x = a_p†, y = a_q†
    for i in 0..=a {
        let from_a = binomial(a, i) * t.powi(i as i32) * (-r).powi((a - i) as i32);
        if from_a == 0.0 {
            continue;
        }
        for j in 0..=b {
            let from_b = binomial(b, j) * r.powi(j as i32) * t.powi((b - j) as i32);
            w[(i + j) as usize] += from_a * from_b;
        }
    }
    let norm_in = (factorial(a) * factorial(b)).sqrt();
    for (k, wk) in w.iter_mut().enumerate() {
        let k = k as u32;
        *wk *= (factorial(k) * factorial(total - k)).sqrt() / norm_in;
    }
    w
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Evolve a state through every element of `circuit` in order.
///
/// Photon-number sectors never mix, so each sector is evolved independently
/// (concurrently when the input spans several).
pub fn evolve(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    if state.num_modes() != circuit.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: circuit.num_modes(),
            actual: state.num_modes(),
        });
    }
    let run = |mut s: StateVector| -> Result<StateVector> {
        for e in circuit.elements() {
            s = apply_element(&s, e)?;
        }
        Ok(s)
    };
    let sectors = state.sectors();
    if sectors.len() <= 1 {
        return run(state.clone());
    }
    let parts = sectors
        .par_iter()
        .map(|&nu| run(state.sector(nu)))
        .collect::<Result<Vec<_>>>()?;
    let mut merged = BTreeMap::new();
    for part in parts {
        merged.extend(part.into_map());
    }
    Ok(StateVector::from_map(state.num_modes(), merged))
}

/// Permanent by Ryser's formula, visiting column subsets in Gray-code order.
pub fn permanent(m: &Array2<Complex64>) -> Result<Complex64> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    let n = rows;
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");
    let mut row_sums = vec![Complex64::default(); n];
    let mut total = Complex64::default();
    let mut gray: u64 = 0;
    for k in 1u64..(1 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[[i, j]];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[[i, j]];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

/// `S` with row `i` repeated `m_i` times and column `j` repeated `n_j` times.
#[derive(Debug, Clone)]
pub struct RepeatedIndexMatrix<'a> {
    pub base: &'a ScatteringMatrix,
    pub row_multiplicities: &'a Occupation,
    pub col_multiplicities: &'a Occupation,
}

impl RepeatedIndexMatrix<'_> {
    pub fn materialize(&self) -> Array2<Complex64> {
        let expand = |occ: &Occupation| -> Vec<usize> {
            occ.counts()
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
                .collect()
        };
        let rows = expand(self.row_multiplicities);
        let cols = expand(self.col_multiplicities);
        Array2::from_shape_fn((rows.len(), cols.len()), |(a, b)| {
            self.base.get(rows[a], cols[b])
        })
    }
}

/// `⟨out|U|in⟩` for the unitary whose mode transformation is `s`.
pub fn matrix_element(
    s: &ScatteringMatrix,
    out_occ: &Occupation,
    in_occ: &Occupation,
) -> Result<Complex64> {
    for occ in [out_occ, in_occ] {
        if occ.num_modes() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                actual: occ.num_modes(),
            });
        }
    }
    if out_occ.total() != in_occ.total() {
        return Ok(Complex64::default());
    }
    let m = RepeatedIndexMatrix {
        base: s,
        row_multiplicities: out_occ,
        col_multiplicities: in_occ,
    }
    .materialize();
    let norm = (out_occ.factorial_product() * in_occ.factorial_product()).sqrt();
    Ok(permanent(&m)? / norm)
}

/// `⟨m|U|n⟩` over the full `ν`-photon sector, rows and columns in
/// [`enumerate_basis`] order.
pub fn sector_matrix(s: &ScatteringMatrix, total_photons: u32) -> Result<Array2<Complex64>> {
    let basis = enumerate_basis(s.dim(), total_photons);
    let mut out = Array2::zeros((basis.len(), basis.len()));
    for (i, m) in basis.iter().enumerate() {
        for (j, n) in basis.iter().enumerate() {
            out[[i, j]] = matrix_element(s, m, n)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Preset;
    use itertools::Itertools;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn naive_permanent(m: &Array2<Complex64>) -> Complex64 {
        let n = m.nrows();
        (0..n)
            .permutations(n)
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(i, &j)| m[[i, j]])
                    .product::<Complex64>()
            })
            .sum()
    }

    #[test]
    fn phase_on_vacuum_is_identity() {
        let s = StateVector::basis(Occupation::from([0]));
        let out = apply_element(&s, &Element::phase_shifter(0, 1.234)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn single_photon_splits_evenly() {
        let s = StateVector::basis(Occupation::from([1, 0]));
        let out = apply_element(&s, &Element::beam_splitter(0, 1, 0.5)).unwrap();
        let a10 = out.amplitude(&Occupation::from([1, 0]));
        let a01 = out.amplitude(&Occupation::from([0, 1]));
        assert!((a10 - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a01.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        // [t, r; -r, t] sends a_1† to t a_1† − r a_2†
        assert!(a01.re < 0.0);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let s = StateVector::basis(Occupation::from([1, 1]));
        let bs = Element::beam_splitter(0, 1, 0.5);
        let out = apply_element(&s, &bs).unwrap();
        assert!(out.amplitude(&Occupation::from([1, 1])).norm() < 1e-15);
        assert!((out.amplitude(&Occupation::from([2, 0])).norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&Occupation::from([0, 2])).norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        let sm = Circuit::from_elements(2, vec![bs])
            .unwrap()
            .compile()
            .unwrap();
        for occ in enumerate_basis(2, 2) {
            let oracle = matrix_element(&sm, &occ, &Occupation::from([1, 1])).unwrap();
            assert!((oracle - out.amplitude(&occ)).norm() < 1e-15);
        }
    }

    #[test]
    fn evolve_rejects_mode_mismatch() {
        let s = StateVector::basis(Occupation::from([1, 0]));
        assert!(matches!(
            evolve(&s, &Circuit::new(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            apply_element(&s, &Element::phase_shifter(4, 0.0)),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn evolve_identity() {
        let mut s = StateVector::new(3);
        s.add(Occupation::from([1, 0, 2]), c(0.6, 0.0));
        s.add(Occupation::from([0, 1, 0]), c(0.0, 0.8));
        assert_eq!(evolve(&s, &Circuit::new(3)).unwrap(), s);
    }

    #[test]
    fn evolve_stays_in_sector() {
        let circuit = Preset::Qsd6.build(&[0.5, 0.5], &[0.0, PI]).unwrap();
        let out = evolve(&StateVector::basis(Occupation::from([1, 0, 0])), &circuit).unwrap();
        assert!(out.iter().all(|(o, _)| o.total() == 1));
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permanent_small_cases() {
        let empty = Array2::<Complex64>::zeros((0, 0));
        assert_eq!(permanent(&empty).unwrap(), c(1.0, 0.0));
        let one = Array2::from_elem((1, 1), c(0.3, -2.0));
        assert_eq!(permanent(&one).unwrap(), c(0.3, -2.0));
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.1), c(3.0, 0.0), c(0.0, 1.0));
        let two = Array2::from_shape_vec((2, 2), vec![a, b, cc, d]).unwrap();
        assert!((permanent(&two).unwrap() - (a * d + b * cc)).norm() < 1e-14);
        assert!(matches!(
            permanent(&Array2::<Complex64>::zeros((2, 3))),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn permanent_identity_and_zero_row() {
        for n in 1..7 {
            assert_eq!(permanent(&Array2::eye(n)).unwrap(), c(1.0, 0.0));
            let mut m = Array2::from_shape_fn((n, n), |(i, j)| c(i as f64 + 1.0, j as f64 - 0.5));
            m.row_mut(n / 2).fill(c(0.0, 0.0));
            assert_eq!(permanent(&m).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn permanent_matches_naive_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in 1..=6 {
            for _ in 0..5 {
                let m = Array2::from_shape_fn((n, n), |_| {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                let fast = permanent(&m).unwrap();
                let slow = naive_permanent(&m);
                assert!((fast - slow).norm() < 1e-12, "n={n}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn matrix_element_conservation_and_vacuum() {
        let s = Preset::Qsd6
            .build(&[0.3, 0.6], &[1.0, 2.0])
            .unwrap()
            .compile()
            .unwrap();
        let vac = Occupation::vacuum(3);
        assert_eq!(matrix_element(&s, &vac, &vac).unwrap(), c(1.0, 0.0));
        let z = matrix_element(
            &s,
            &Occupation::from([1, 0, 0]),
            &Occupation::from([1, 1, 0]),
        )
        .unwrap();
        assert_eq!(z, c(0.0, 0.0));
        assert!(matches!(
            matrix_element(&s, &Occupation::from([1, 0]), &Occupation::from([1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scissors_d2_flat_ratio() {
        let s = Preset::Qsd6
            .build(&[0.5, 0.5], &[0.0, PI])
            .unwrap()
            .compile()
            .unwrap();
        let c0 = matrix_element(
            &s,
            &Occupation::from([0, 1, 0]),
            &Occupation::from([1, 0, 0]),
        )
        .unwrap();
        let c1 = matrix_element(
            &s,
            &Occupation::from([1, 1, 0]),
            &Occupation::from([1, 0, 1]),
        )
        .unwrap();
        assert!(((c1 / c0).norm() - 1.0).abs() < 1e-12);
        // cross-check with the sequential engine
        let circuit = Preset::Qsd6.build(&[0.5, 0.5], &[0.0, PI]).unwrap();
        let out = evolve(&StateVector::basis(Occupation::from([1, 0, 1])), &circuit).unwrap();
        assert!((out.amplitude(&Occupation::from([1, 1, 0])) - c1).norm() < 1e-12);
    }

    #[test]
    fn beam_splitter_table_is_unitary_column() {
        for a in 0..4 {
            for b in 0..4 {
                let w = beam_splitter_table(a, b, 0.6f64.sqrt(), 0.4f64.sqrt());
                let norm: f64 = w.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-13);
            }
        }
    }

    fn arb_circuit() -> impl proptest::strategy::Strategy<Value = Circuit> {
        use proptest::prelude::*;
        (2usize..=4).prop_flat_map(|n| {
            let element = (0..n, 1..n, 0.0f64..=1.0, 0.0f64..(2.0 * PI), any::<bool>()).prop_map(
                move |(a, off, t2, xi, is_bs)| {
                    if is_bs {
                        Element::beam_splitter(a, (a + off) % n, t2)
                    } else {
                        Element::phase_shifter(a, xi)
                    }
                },
            );
            proptest::collection::vec(element, 1..=8)
                .prop_map(move |els| Circuit::from_elements(n, els).unwrap())
        })
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(200))]

        #[test]
        fn sector_matrix_is_unitary_and_matches_evolution(circuit in arb_circuit(), nu in 0u32..=3) {
            let s = circuit.compile().unwrap();
            let u = sector_matrix(&s, nu).unwrap();
            let gram = u.t().mapv(|z| z.conj()).dot(&u);
            for ((i, j), z) in gram.indexed_iter() {
                let expect = if i == j { 1.0 } else { 0.0 };
                proptest::prop_assert!((z - c(expect, 0.0)).norm() < 1e-10);
            }
            let basis = enumerate_basis(s.dim(), nu);
            for (j, n) in basis.iter().enumerate() {
                let out = evolve(&StateVector::basis(n.clone()), &circuit).unwrap();
                for (i, m) in basis.iter().enumerate() {
                    proptest::prop_assert!((out.amplitude(m) - u[[i, j]]).norm() < 1e-12);
                }
            }
        }
    }
}

//! Re-evaluation of the published solutions on candidate wirings.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{catalog, CatalogEntry, Family, Preset};
use crate::conditioning::{profile_fidelity, success_probability, truncation_profile};
use crate::fock::SingleModeInput;
use crate::{Error, Result};

pub const REPRODUCED_TOL: f64 = 1e-9;
pub const PARTIAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ReproStatus {
    Reproduced,
    Partial,
    Not,
}

impl ReproStatus {
    pub fn from_fidelity(f: f64) -> Self {
        if f >= 1.0 - REPRODUCED_TOL {
            ReproStatus::Reproduced
        } else if f >= 1.0 - PARTIAL_TOL {
            ReproStatus::Partial
        } else {
            ReproStatus::Not
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ReproStatus::Reproduced => "REPRODUCED",
            ReproStatus::Partial => "PARTIAL",
            ReproStatus::Not => "NOT",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogRow {
    pub entry: String,
    pub family: String,
    pub preset: String,
    pub fidelity: f64,
    /// Heralding probability for a coherent α = 1 signal.
    pub probability: f64,
    pub profile: Vec<[f64; 2]>,
    pub status: ReproStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogReport {
    pub rows: Vec<CatalogRow>,
    /// Entry name → presets that reproduce it.
    pub reconciliation: BTreeMap<String, Vec<String>>,
}

impl CatalogReport {
    /// Best status reached by an entry on any evaluated preset.
    pub fn best_status(&self, entry: &str) -> Option<ReproStatus> {
        self.rows
            .iter()
            .filter(|r| r.entry == entry)
            .map(|r| r.status)
            .min()
    }

    /// Every six-port entry in the report is reproduced somewhere. Vacuously
    /// true for a report without six-port rows.
    pub fn six_port_reproduced(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.family == "six-port")
            .all(|r| self.best_status(&r.entry) == Some(ReproStatus::Reproduced))
    }

    /// Recompute every row from the catalog; returns the largest deviation
    /// in fidelity or probability.
    pub fn recheck(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let entry = crate::circuit::find_entry(&row.entry)
                .ok_or_else(|| Error::UnknownPreset(row.entry.clone()))?;
            let preset: Preset = row.preset.parse()?;
            let fresh = evaluate(&entry, preset)?;
            worst = worst
                .max((fresh.fidelity - row.fidelity).abs())
                .max((fresh.probability - row.probability).abs());
            if fresh.status != row.status {
                worst = f64::INFINITY;
            }
        }
        Ok(worst)
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::SixPort => "six-port",
        Family::EightPort => "eight-port",
    }
}

fn evaluate(entry: &CatalogEntry, preset: Preset) -> Result<CatalogRow> {
    let circuit = entry.circuit(preset)?;
    let profile = truncation_profile(&circuit, &entry.ancilla, &entry.detection)?;
    let fidelity = match profile_fidelity(&profile, &entry.target) {
        Ok(f) => f,
        Err(Error::ZeroNorm) => 0.0,
        Err(e) => return Err(e),
    };
    let signal = SingleModeInput::Coherent {
        alpha: Complex64::new(1.0, 0.0),
        cutoff: None,
    };
    Ok(CatalogRow {
        entry: entry.name.to_string(),
        family: family_name(entry.family).to_string(),
        preset: preset.name(),
        fidelity,
        probability: success_probability(&profile, &signal)?,
        profile: profile
            .coefficients()
            .iter()
            .map(|c| [c.re, c.im])
            .collect(),
        status: ReproStatus::from_fidelity(fidelity),
    })
}

/// Evaluate every catalog entry. Six-port entries always run on `qsd6`;
/// eight-port entries run on each eight-port preset in `presets`.
pub fn verify_catalog(presets: &[Preset]) -> Result<CatalogReport> {
    verify_list(&catalog(), presets)
}

/// As [`verify_catalog`], restricted to the named entries.
pub fn verify_entries(names: &[&str], presets: &[Preset]) -> Result<CatalogReport> {
    let all = catalog();
    let mut chosen = Vec::new();
    for name in names {
        let e = all
            .iter()
            .find(|e| e.name == *name)
            .ok_or_else(|| Error::InvalidTarget(format!("unknown catalog entry `{name}`")))?;
        chosen.push(e.clone());
    }
    verify_list(&chosen, presets)
}

fn verify_list(entries: &[CatalogEntry], presets: &[Preset]) -> Result<CatalogReport> {
    let mut rows = Vec::new();
    for entry in entries {
        let applicable: Vec<Preset> = match entry.family {
            Family::SixPort => vec![Preset::Qsd6],
            Family::EightPort => presets
                .iter()
                .copied()
                .filter(|p| matches!(p, Preset::Qsd8(_)))
                .collect(),
        };
        for preset in applicable {
            rows.push(evaluate(entry, preset)?);
        }
    }
    let mut reconciliation: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for entry in entries {
        reconciliation.insert(entry.name.to_string(), Vec::new());
    }
    for row in &rows {
        if row.status == ReproStatus::Reproduced {
            reconciliation
                .get_mut(&row.entry)
                .expect("entry listed")
                .push(row.preset.clone());
        }
    }
    Ok(CatalogReport {
        rows,
        reconciliation,
    })
}

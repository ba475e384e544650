//! Published device settings for truncation, punching and Fock synthesis.

use super::{Circuit, Preset, Wiring};
use crate::conditioning::{DetectionPattern, TargetPattern};
use crate::{expr, Occupation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SixPort,
    EightPort,
}

impl Family {
    /// Presets an entry of this family can be evaluated on.
    pub fn presets(&self) -> Vec<Preset> {
        match self {
            Family::SixPort => vec![Preset::Qsd6],
            Family::EightPort => Wiring::all().into_iter().map(Preset::Qsd8).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub family: Family,
    /// Closed-form literals as published.
    pub t2_literals: Vec<&'static str>,
    pub xi_literals: Vec<&'static str>,
    pub t2: Vec<f64>,
    pub xi: Vec<f64>,
    pub ancilla: Occupation,
    pub detection: DetectionPattern,
    pub target: TargetPattern,
    pub citation: &'static str,
}

impl CatalogEntry {
    pub fn circuit(&self, preset: Preset) -> Result<Circuit> {
        preset.build(&self.t2, &self.xi)
    }
}

struct Raw {
    name: &'static str,
    family: Family,
    t2: &'static [&'static str],
    xi: &'static [&'static str],
    counts: &'static [u32],
    target: Tgt,
    citation: &'static str,
}

#[derive(Clone, Copy)]
enum Tgt {
    Trunc(usize),
    Punch(usize, &'static [usize]),
    Fock(usize, usize),
}

impl Tgt {
    fn build(self) -> TargetPattern {
        match self {
            Tgt::Trunc(d) => TargetPattern::truncation(d),
            Tgt::Punch(d, holes) => TargetPattern::punch(d, holes),
            Tgt::Fock(d, k) => TargetPattern::fock(d, k),
        }
        .expect("catalog target is valid")
    }
}

const ZERO5: &[&str] = &["0", "0", "0", "0", "0"];
const ONES3: &[u32] = &[1, 1, 1];

fn raw_entries() -> Vec<Raw> {
    use Family::*;
    vec![
        Raw {
            name: "d2-ppb",
            family: SixPort,
            t2: &["1/2", "1/2"],
            xi: &["0", "pi"],
            counts: &[1, 0],
            target: Tgt::Trunc(2),
            citation: "six-port scissors, d=2, highest-probability solution",
        },
        Raw {
            name: "d3-sol1",
            family: SixPort,
            t2: &["(3-sqrt(3))/6", "(3-sqrt(3))/6"],
            xi: &["0", "0"],
            counts: &[1, 1],
            target: Tgt::Trunc(3),
            citation: "six-port scissors, d=3, solution T1",
        },
        Raw {
            name: "d3-sol2",
            family: SixPort,
            t2: &["(3+sqrt(3))/6", "(3+sqrt(3))/6"],
            xi: &["0", "0"],
            counts: &[1, 1],
            target: Tgt::Trunc(3),
            citation: "six-port scissors, d=3, solution T2",
        },
        Raw {
            name: "d3-sol3",
            family: SixPort,
            t2: &["(3-sqrt(3))/6", "(3+sqrt(3))/6"],
            xi: &["0", "pi"],
            counts: &[1, 1],
            target: Tgt::Trunc(3),
            citation: "six-port scissors, d=3, solution T3",
        },
        Raw {
            name: "d3-sol4",
            family: SixPort,
            t2: &["(3+sqrt(3))/6", "(3-sqrt(3))/6"],
            xi: &["0", "pi"],
            counts: &[1, 1],
            target: Tgt::Trunc(3),
            citation: "six-port scissors, d=3, solution T4",
        },
        Raw {
            name: "d4-simple",
            family: EightPort,
            t2: &["1/3", "1/4", "1", "1/3", "1/2"],
            xi: &["0", "0", "0", "0", "pi/2"],
            counts: ONES3,
            target: Tgt::Trunc(4),
            citation: "eight-port scissors, d=4, simple solution",
        },
        Raw {
            name: "d5-numeric",
            family: EightPort,
            t2: &["0.305", "0.388", "1", "0.817", "0.184"],
            xi: &["0", "0", "0", "pi", "0"],
            counts: &[1, 2, 1],
            target: Tgt::Trunc(5),
            citation: "eight-port scissors, d=5, numerical solution (3 digits)",
        },
        Raw {
            name: "punch-01x3",
            family: EightPort,
            t2: &["(7+sqrt(21))/14", "1/3", "1", "1/2", "(5-sqrt(5))/10"],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Punch(4, &[2]),
            citation: "eight-port punching, |2> removed",
        },
        Raw {
            name: "punch-x123",
            family: EightPort,
            t2: &["(7+sqrt(21))/14", "1/3", "1", "1/2", "(2-sqrt(2))/4"],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Punch(4, &[0]),
            citation: "eight-port punching, |0> removed",
        },
        Raw {
            name: "punch-0x2x",
            family: EightPort,
            t2: &["1", "1/2", "1", "1", "1/2"],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Punch(4, &[1, 3]),
            citation: "eight-port punching, two-state superposition of |0>, |2>",
        },
        Raw {
            name: "punch-x1x3",
            family: EightPort,
            t2: &["1/2", "(3-sqrt(3))/3", "1", "(3-sqrt(3))/3", "1/2"],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Punch(4, &[0, 2]),
            citation: "eight-port punching, two-state superposition of |1>, |3>",
        },
        Raw {
            name: "punch-0xx3",
            family: EightPort,
            t2: &[
                "(1-sqrt(5/133))/2",
                "1/2",
                "1",
                "1/6",
                "(1+3*sqrt(3/155))/2",
            ],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Punch(4, &[1, 2]),
            citation: "eight-port punching, two-state superposition of |0>, |3>",
        },
        Raw {
            name: "fock-2",
            family: EightPort,
            t2: &["1", "1/2", "1/3", "1/2", "1"],
            xi: ZERO5,
            counts: ONES3,
            target: Tgt::Fock(4, 2),
            citation: "eight-port Fock synthesis, |2>",
        },
        Raw {
            name: "fock-3",
            family: EightPort,
            t2: &["1/2", "1/2", "1", "1/2", "1/2"],
            xi: &["0", "0", "0", "0", "pi/2"],
            counts: ONES3,
            target: Tgt::Fock(4, 3),
            citation: "eight-port Fock synthesis, |3>",
        },
    ]
}

/// Every published solution, closed forms evaluated in double precision.
pub fn catalog() -> Vec<CatalogEntry> {
    raw_entries()
        .into_iter()
        .map(|r| {
            let eval = |lits: &[&str]| -> Vec<f64> {
                lits.iter()
                    .map(|s| expr::eval(s).expect("catalog literal parses"))
                    .collect()
            };
            let counts = Occupation::new(r.counts.to_vec());
            CatalogEntry {
                name: r.name,
                family: r.family,
                t2_literals: r.t2.to_vec(),
                xi_literals: r.xi.to_vec(),
                t2: eval(r.t2),
                xi: eval(r.xi),
                ancilla: counts.clone(),
                detection: DetectionPattern::standard(counts),
                target: r.target.build(),
                citation: r.citation,
            }
        })
        .collect()
}

pub fn find_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

use std::fmt;
use std::str::FromStr;

use super::{Circuit, Element};
use crate::{Error, Result};

/// Which mode pairs the eight-port beam splitters couple and which mode each
/// phase shifter acts on.
///
/// All wirings keep output mode 1 reachable only through `B1` and `B2`,
/// which act before the signal mode 4 is mixed with anything, so `S[1,4] = 0`
/// for every parameter choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wiring {
    /// `B1(1,2) B2(1,3) B3(2,3) B4(2,4) B5(3,4)`, each `P_i` on the higher
    /// mode of its pair, immediately before `B_i`.
    L0,
    /// 1: as L0 but `P4` on mode 2.
    /// 2: as L0 but every `P_i` on the lower mode.
    /// 3: `B3(3,4)` and `B5(2,3)` swapped, phases on the higher mode.
    /// 4: as 3 with phases on the lower mode.
    Alt(u8),
}

pub const ALT_WIRINGS: u8 = 4;

impl Wiring {
    pub fn all() -> Vec<Wiring> {
        std::iter::once(Wiring::L0)
            .chain((1..=ALT_WIRINGS).map(Wiring::Alt))
            .collect()
    }

    /// `(pair, phased mode)` per stage, 0-based.
    fn stages(self) -> [((usize, usize), usize); 5] {
        let hi = |(a, b): (usize, usize)| ((a, b), b);
        let lo = |(a, b): (usize, usize)| ((a, b), a);
        let standard = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)];
        let swapped = [(0, 1), (0, 2), (2, 3), (1, 3), (1, 2)];
        match self {
            Wiring::L0 => standard.map(hi),
            Wiring::Alt(1) => {
                let mut s = standard.map(hi);
                s[3].1 = 1;
                s
            }
            Wiring::Alt(2) => standard.map(lo),
            Wiring::Alt(3) => swapped.map(hi),
            Wiring::Alt(4) => swapped.map(lo),
            Wiring::Alt(k) => unreachable!("no alternate wiring {k}"),
        }
    }
}

/// Named device layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    /// Six-port device on modes (1, 2, 4) of the eight-port layout, relabelled
    /// 1, 2, 3: `P1(2) B1(1,2) P4(3) B4(2,3)`. Parameters are `[t1², t4²]`
    /// and `[ξ1, ξ4]`.
    Qsd6,
    /// Eight-port device, parameters `[t1² … t5²]` and `[ξ1 … ξ5]`.
    Qsd8(Wiring),
}

impl Preset {
    pub fn all() -> Vec<Preset> {
        std::iter::once(Preset::Qsd6)
            .chain(Wiring::all().into_iter().map(Preset::Qsd8))
            .collect()
    }

    pub fn name(&self) -> String {
        match self {
            Preset::Qsd6 => "qsd6".into(),
            Preset::Qsd8(Wiring::L0) => "qsd8".into(),
            Preset::Qsd8(Wiring::Alt(k)) => format!("qsd8-alt-{k}"),
        }
    }

    pub fn num_modes(&self) -> usize {
        match self {
            Preset::Qsd6 => 3,
            Preset::Qsd8(_) => 4,
        }
    }

    /// Number of beam splitters (and phase shifters).
    pub fn arity(&self) -> usize {
        match self {
            Preset::Qsd6 => 2,
            Preset::Qsd8(_) => 5,
        }
    }

    /// Paper-style element indices, e.g. `[1, 4]` for the six-port device.
    pub fn element_numbers(&self) -> Vec<usize> {
        match self {
            Preset::Qsd6 => vec![1, 4],
            Preset::Qsd8(_) => (1..=5).collect(),
        }
    }

    /// Position of `T<k>` / `XI<k>` in the parameter lists.
    pub fn parameter_index(&self, element_number: usize) -> Option<usize> {
        self.element_numbers()
            .iter()
            .position(|&k| k == element_number)
    }

    pub fn build(&self, t2: &[f64], xi: &[f64]) -> Result<Circuit> {
        let arity = self.arity();
        for (what, len) in [("t2", t2.len()), ("xi", xi.len())] {
            if len != arity {
                return Err(Error::Arity {
                    preset: self.name(),
                    what,
                    expected: arity,
                    actual: len,
                });
            }
        }
        let stages: Vec<((usize, usize), usize)> = match self {
            Preset::Qsd6 => vec![((0, 1), 1), ((1, 2), 2)],
            Preset::Qsd8(w) => w.stages().to_vec(),
        };
        let mut c = Circuit::new(self.num_modes());
        for (((pair, phased), k), (&t, &x)) in stages
            .into_iter()
            .zip(self.element_numbers())
            .zip(t2.iter().zip(xi))
        {
            c.push(Element::phase_shifter(phased, x), Some(format!("P{k}")))?;
            c.push(
                Element::beam_splitter(pair.0, pair.1, t),
                Some(format!("B{k}")),
            )?;
        }
        Ok(c)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qsd6" => Ok(Preset::Qsd6),
            "qsd8" | "qsd8-l0" => Ok(Preset::Qsd8(Wiring::L0)),
            _ => s
                .strip_prefix("qsd8-alt-")
                .and_then(|k| k.parse::<u8>().ok())
                .filter(|k| (1..=ALT_WIRINGS).contains(k))
                .map(|k| Preset::Qsd8(Wiring::Alt(k)))
                .ok_or_else(|| Error::UnknownPreset(s.to_string())),
        }
    }
}

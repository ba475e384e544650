use std::fmt::Write as _;

use qtruncate_core::circuit::Wiring;
use qtruncate_core::conditioning::{
    profile_fidelity, project, success_probability, truncation_profile,
};
use qtruncate_core::evolution::evolve;
use qtruncate_core::fock::{fidelity, make_input};
use qtruncate_core::optimizer::{
    optimize, verify_catalog, verify_entries, CatalogReport, OptimizationProblem, OptimizerConfig,
    Param, Parameters,
};
use qtruncate_core::{
    Circuit, DetectionPattern, Error, Occupation, Preset, SingleModeInput, StateVector,
    TargetPattern, TruncationProfile,
};
use serde::Serialize;

use crate::output::{self, matrix, pairs};
use crate::parse::{self, SweptParam};
use crate::{
    CliError, DeviceArgs, Format, HeraldArgs, OptimizeArgs, SimulateArgs, SweepArgs, VerifyArgs,
};

/// Rendered command output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub body: String,
    /// Human-readable text for stderr.
    pub notes: String,
    pub code: i32,
}

fn config(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn preset(name: &str) -> Result<Preset, CliError> {
    name.parse()
        .map_err(|e: Error| config("--preset", e.to_string()))
}

fn json_only(format: Option<Format>, command: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(config("--format", format!("{command} emits JSON only"))),
        _ => Ok(()),
    }
}

impl DeviceArgs {
    fn circuit(&self) -> Result<Circuit, CliError> {
        if let Some(path) = &self.circuit {
            return Circuit::from_json_file(path)
                .map_err(|e| config(&format!("--circuit {}", path.display()), e.to_string()));
        }
        let name = self
            .preset
            .as_deref()
            .ok_or_else(|| config("--circuit/--preset", "one of them is required"))?;
        let p = preset(name)?;
        let t2 = parse::real_list("--t2", required(&self.t2, "--t2")?)?;
        let xi = parse::real_list("--xi", required(&self.xi, "--xi")?)?;
        p.build(&t2, &xi)
            .map_err(|e| config("--preset", e.to_string()))
    }
}

fn required<'a>(v: &'a Option<String>, field: &str) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| config(field, "required with --preset"))
}

/// Validated ancilla, detection and target for a device with `num_modes`.
struct Herald {
    ancilla: Occupation,
    detection: DetectionPattern,
    target: TargetPattern,
}

impl HeraldArgs {
    fn resolve(&self, num_modes: usize) -> Result<Herald, CliError> {
        let ancilla = match &self.ancilla {
            Some(s) => parse::count_list("--ancilla", s)?,
            None => Occupation::vacuum(num_modes - 1),
        };
        if ancilla.num_modes() + 1 != num_modes {
            return Err(config(
                "--ancilla",
                format!(
                    "{} counts given, the device needs {}",
                    ancilla.num_modes(),
                    num_modes - 1
                ),
            ));
        }
        let counts = match &self.detect {
            Some(s) => parse::count_list("--detect", s)?,
            None => ancilla.clone(),
        };
        if counts.num_modes() != ancilla.num_modes() {
            return Err(config(
                "--detect",
                format!(
                    "{} counts given, the device has {} detectors",
                    counts.num_modes(),
                    ancilla.num_modes()
                ),
            ));
        }
        if counts.total() != ancilla.total() {
            return Err(config(
                "--detect",
                format!(
                    "{} photons detected but {} ancilla photons injected; the totals must match",
                    counts.total(),
                    ancilla.total()
                ),
            ));
        }
        let d = ancilla.total() as usize + 1;
        let target = match &self.target {
            Some(s) => parse::target(s)?,
            None => TargetPattern::truncation(d)?,
        };
        if target.d() != d {
            return Err(config(
                "--target",
                format!("dimension {} but the ancilla fixes d = {d}", target.d()),
            ));
        }
        Ok(Herald {
            ancilla,
            detection: DetectionPattern::standard(counts),
            target,
        })
    }
}

/// Fidelity of a profile; a vanishing profile scores zero.
fn fidelity_or_zero(profile: &TruncationProfile, target: &TargetPattern) -> Result<f64, CliError> {
    match profile_fidelity(profile, target) {
        Ok(f) => Ok(f),
        Err(Error::ZeroNorm) => Ok(0.0),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct SimulateReport {
    num_modes: usize,
    ancilla: Vec<u32>,
    detection: Vec<u32>,
    target_kept: Vec<usize>,
    scattering_matrix: Vec<Vec<[f64; 2]>>,
    unitarity_error: f64,
    profile: Vec<[f64; 2]>,
    profile_fidelity: f64,
    probability: f64,
    /// Normalized heralded state `|0⟩ … |n_max⟩`; absent when the pattern
    /// cannot herald.
    output_state: Option<Vec<[f64; 2]>>,
    ideal_fidelity: Option<f64>,
    signal_cutoff: u32,
    tail_mass: f64,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Report, CliError> {
    json_only(args.output.format, "simulate")?;
    let circuit = args.device.circuit()?;
    let n = circuit.num_modes();
    if n < 2 {
        return Err(config("--circuit", "at least two modes required"));
    }
    let herald = args.herald.resolve(n)?;
    let signal = parse::signal(&args.signal)?;

    let s = circuit.compile()?;
    let profile = truncation_profile(&circuit, &herald.ancilla, &herald.detection)?;
    let profile_fid = fidelity_or_zero(&profile, &herald.target)?;

    let input = make_input(&signal, &herald.ancilla, n - 1)?;
    let evolved = evolve(&input, &circuit)?;
    let (reduced, probability) = project(&evolved, &herald.detection)?;

    let (output_state, ideal_fidelity) = if reduced.norm_sqr() == 0.0 {
        (None, None)
    } else {
        let normalized = reduced.normalized()?;
        let top = normalized
            .iter()
            .map(|(occ, _)| occ.get(0))
            .max()
            .unwrap_or(0);
        let dense: Vec<_> = (0..=top)
            .map(|k| normalized.amplitude(&Occupation::new(vec![k])))
            .collect();
        let mut ideal = StateVector::new(1);
        for (k, g) in signal.coefficients().into_iter().enumerate() {
            if herald.target.kept().contains(&k) && g.norm_sqr() != 0.0 {
                ideal.add(Occupation::new(vec![k as u32]), g);
            }
        }
        let f = if ideal.norm_sqr() == 0.0 {
            0.0
        } else {
            fidelity(&normalized, &ideal)?
        };
        (Some(pairs(&dense)), Some(f))
    };

    let report = SimulateReport {
        num_modes: n,
        ancilla: herald.ancilla.counts().to_vec(),
        detection: herald.detection.counts().counts().to_vec(),
        target_kept: herald.target.kept().iter().copied().collect(),
        scattering_matrix: matrix(&s),
        unitarity_error: s.unitarity_error(),
        profile: pairs(profile.coefficients()),
        profile_fidelity: profile_fid,
        probability,
        output_state,
        ideal_fidelity,
        signal_cutoff: signal.cutoff(),
        tail_mass: signal.tail_mass(),
    };
    Ok(Report {
        body: output::json(&report),
        notes: String::new(),
        code: 0,
    })
}

fn wirings(spec: &str) -> Result<Vec<Preset>, CliError> {
    if spec.trim() == "all" {
        return Ok(Wiring::all().into_iter().map(Preset::Qsd8).collect());
    }
    spec.split(',')
        .map(|w| {
            let w = w.trim().to_ascii_lowercase();
            let name = if w == "l0" {
                "qsd8".to_string()
            } else {
                format!("qsd8-{w}")
            };
            name.parse()
                .map_err(|_| config("--wiring", format!("unknown wiring `{w}`")))
        })
        .collect()
}

fn verify_table(report: &CatalogReport) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<12} {:<12} {:>16} {:>14}  status",
        "entry", "preset", "fidelity", "probability"
    );
    for r in &report.rows {
        let _ = writeln!(
            t,
            "{:<12} {:<12} {:>16.12} {:>14.10}  {}",
            r.entry,
            r.preset,
            r.fidelity,
            r.probability,
            r.status.as_str()
        );
    }
    t
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    report: &'a CatalogReport,
    six_port_reproduced: bool,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let presets = wirings(&args.wiring)?;
    let report = if args.entry.is_empty() {
        verify_catalog(&presets)?
    } else {
        let names: Vec<&str> = args.entry.iter().map(|s| s.trim()).collect();
        verify_entries(&names, &presets).map_err(|e| config("--entry", e.to_string()))?
    };
    let ok = report.six_port_reproduced();
    let body = match args.output.format {
        Some(Format::Csv) => {
            let mut s = String::from("entry,family,preset,fidelity,probability,status\n");
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.entry,
                    r.family,
                    r.preset,
                    output::num(r.fidelity),
                    output::num(r.probability),
                    r.status.as_str()
                );
            }
            s
        }
        _ => output::json(&VerifyReport {
            report: &report,
            six_port_reproduced: ok,
        }),
    };
    Ok(Report {
        body,
        notes: verify_table(&report),
        code: if ok { 0 } else { 2 },
    })
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    preset: String,
    status: qtruncate_core::optimizer::Status,
    params: &'a Parameters,
    fidelity: f64,
    probability: f64,
    seed: u64,
    starts: usize,
    feasible_starts: usize,
    clusters: &'a [qtruncate_core::optimizer::Cluster],
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<Report, CliError> {
    json_only(args.output.format, "optimize")?;
    let p = preset(&args.preset)?;
    let params = |field: &str, v: &Option<String>| match v {
        Some(s) => parse::param_list(field, s),
        None => Ok(vec![Param::Free; p.arity()]),
    };
    let t2 = params("--t2", &args.t2)?;
    let xi = params("--xi", &args.xi)?;
    let herald = args.herald.resolve(p.num_modes())?;
    let problem = OptimizationProblem::new(p, herald.ancilla, herald.detection, herald.target)?
        .with_params(t2, xi)
        .map_err(|e| config("--t2/--xi", e.to_string()))?;
    let cfg = OptimizerConfig {
        starts: args.starts,
        seed: args.seed,
        ..OptimizerConfig::default()
    };
    if cfg.starts == 0 {
        return Err(config("--starts", "at least one start required"));
    }
    let sol = optimize(&problem, &cfg)?;
    let report = OptimizeReport {
        preset: p.name(),
        status: sol.status,
        params: &sol.params,
        fidelity: sol.fidelity,
        probability: sol.probability,
        seed: sol.seed,
        starts: sol.starts.len(),
        feasible_starts: sol.starts.iter().filter(|s| s.feasible).count(),
        clusters: &sol.clusters,
    };
    Ok(Report {
        body: output::json(&report),
        notes: String::new(),
        code: if sol.is_feasible() { 0 } else { 2 },
    })
}

#[derive(Serialize)]
struct SweepRow {
    param: f64,
    fidelity: f64,
    probability: f64,
    profile: Vec<[f64; 2]>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Report, CliError> {
    let p = preset(&args.preset)?;
    let swept = parse::swept_params(&args.param)?;
    let mut t2 = parse::param_list("--t2", &args.t2)?;
    let mut xi = parse::param_list("--xi", &args.xi)?;
    for (field, list) in [("--t2", &t2), ("--xi", &xi)] {
        if list.len() != p.arity() {
            return Err(config(
                field,
                format!(
                    "{} entries given, {} takes {}",
                    list.len(),
                    p.name(),
                    p.arity()
                ),
            ));
        }
    }
    let mut slots = Vec::new();
    for sp in &swept {
        let (k, is_t) = match *sp {
            SweptParam::Transmittance(k) => (k, true),
            SweptParam::Phase(k) => (k, false),
        };
        let idx = p.parameter_index(k).ok_or_else(|| {
            config(
                "--param",
                format!(
                    "{} has no element {k}; elements are {:?}",
                    p.name(),
                    p.element_numbers()
                ),
            )
        })?;
        let list = if is_t { &mut t2 } else { &mut xi };
        list[idx] = Param::Fixed(0.0);
        slots.push((is_t, idx));
    }
    if t2.iter().chain(&xi).any(|q| q.is_free()) {
        return Err(config(
            "--t2/--xi",
            "`?` is only allowed for the swept parameter",
        ));
    }
    let fixed = |l: &[Param]| -> Vec<f64> {
        l.iter()
            .map(|q| match q {
                Param::Fixed(v) => *v,
                Param::Free => unreachable!("checked above"),
            })
            .collect()
    };
    let (base_t2, base_xi) = (fixed(&t2), fixed(&xi));
    let grid = parse::range(&args.range)?;
    let herald = args.herald.resolve(p.num_modes())?;
    let signal: SingleModeInput = parse::signal(&args.signal)?;

    let mut rows = Vec::with_capacity(grid.len());
    for &v in &grid {
        let (mut t, mut x) = (base_t2.clone(), base_xi.clone());
        for &(is_t, idx) in &slots {
            if is_t {
                t[idx] = v;
            } else {
                x[idx] = v;
            }
        }
        let circuit = p
            .build(&t, &x)
            .map_err(|e| config("--range", format!("at {v}: {e}")))?;
        let profile = truncation_profile(&circuit, &herald.ancilla, &herald.detection)?;
        rows.push(SweepRow {
            param: v,
            fidelity: fidelity_or_zero(&profile, &herald.target)?,
            probability: success_probability(&profile, &signal)?,
            profile: pairs(profile.coefficients()),
        });
    }

    let body = match args.output.format {
        Some(Format::Json) => output::json(&rows),
        _ => {
            let d = herald.ancilla.total() as usize + 1;
            let mut s = String::from("param,fidelity,probability");
            for k in 0..d {
                let _ = write!(s, ",c{k}_re,c{k}_im");
            }
            s.push('\n');
            for r in &rows {
                let _ = write!(
                    s,
                    "{},{},{}",
                    output::num(r.param),
                    output::num(r.fidelity),
                    output::num(r.probability)
                );
                for [re, im] in &r.profile {
                    let _ = write!(s, ",{},{}", output::num(*re), output::num(*im));
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Report {
        body,
        notes: String::new(),
        code: 0,
    })
}

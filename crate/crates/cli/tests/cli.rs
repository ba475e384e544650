use std::process::Command;

use qtruncate_cli::{run, Outcome};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("qtruncate").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn csv_rows(o: &Outcome) -> Vec<Vec<f64>> {
    o.stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

const D2: [&str; 9] = [
    "simulate",
    "--preset",
    "qsd6",
    "--t2",
    "1/2,1/2",
    "--xi",
    "0,pi",
    "--ancilla",
    "1,0",
];

#[test]
fn simulate_d2_scissors() {
    let o = cli(&D2);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    let c0 = &v["profile"][0];
    let c1 = &v["profile"][1];
    let norm = |c: &Value| c[0].as_f64().unwrap().hypot(c[1].as_f64().unwrap());
    assert!((norm(c0) - norm(c1)).abs() < 1e-12);
    let p = v["probability"].as_f64().unwrap();
    // |γ0|² + |γ1|² = 2/e for α = 1, times |c|² = 1/4
    assert!((p - (-1f64).exp() / 2.0).abs() < 1e-11, "{p}");
    assert_eq!(v["profile_fidelity"], 1.0);
    assert_eq!(v["ideal_fidelity"], 1.0);
    assert_eq!(v["scattering_matrix"].as_array().unwrap().len(), 3);
    assert!(v["tail_mass"].as_f64().unwrap() < 1e-15);
}

#[test]
fn simulate_transparent_qsd8() {
    // every photon stays in its mode: the detectors see the ancillas of modes
    // 3, 4 and the signal itself, so only |γ_1|² heralds
    let o = cli(&[
        "simulate",
        "--preset",
        "qsd8",
        "--t2",
        "1,1,1,1,1",
        "--xi",
        "0,0,0,0,0",
        "--ancilla",
        "1,1,1",
        "--signal",
        "coherent:0.7",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    let s = v["scattering_matrix"].as_array().unwrap();
    for (i, row) in s.iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(e[0].as_f64().unwrap(), expect);
        }
    }
    let a2: f64 = 0.49;
    let cutoff = v["signal_cutoff"].as_u64().unwrap() as i32;
    let weights: Vec<f64> = (0..=cutoff)
        .scan(1.0, |w, n| {
            if n > 0 {
                *w *= a2 / f64::from(n);
            }
            Some(*w)
        })
        .collect();
    let expect = weights[1] / weights.iter().sum::<f64>();
    assert!((v["probability"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert_eq!(
        v["output_state"],
        serde_json::json!([[0.0, 0.0], [1.0, 0.0]])
    );
}

#[test]
fn simulate_impossible_pattern_reports_zero() {
    // B1 transparent and B2 fully reflecting keep the ancilla of mode 1 out
    // of mode 3, so detecting it there never happens
    let o = cli(&[
        "simulate",
        "--preset",
        "qsd8",
        "--t2",
        "1,0,1,1,1",
        "--xi",
        "0,0,0,0,0",
        "--ancilla",
        "1,0,0",
        "--detect",
        "0,0,1",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["probability"], 0.0);
    assert_eq!(v["output_state"], Value::Null);
    assert_eq!(v["profile_fidelity"], 0.0);
}

#[test]
fn simulate_from_circuit_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d2.json");
    std::fs::write(
        &path,
        r#"{"preset": "qsd6", "t2": ["1/2", 0.5], "xi": [0, "pi"]}"#,
    )
    .unwrap();
    let from_file = cli(&[
        "simulate",
        "--circuit",
        path.to_str().unwrap(),
        "--ancilla",
        "1,0",
    ]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    assert_eq!(from_file.stdout, cli(&D2).stdout);

    let out = dir.path().join("report.json");
    let mut args = D2.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    let o = cli(&args);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), cli(&D2).stdout);
}

#[test]
fn config_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"modes\": 3,\n \"elements\": [ {\"type\": \"bs\", \"modes\": [1]} ]}",
    )
    .unwrap();
    let o = cli(&["simulate", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);

    for args in [
        &["simulate", "--preset", "qsd7", "--t2", "1", "--xi", "0"][..],
        &["simulate", "--preset", "qsd6", "--t2", "1/2", "--xi", "0,0"],
        &[
            "simulate", "--preset", "qsd6", "--t2", "1/2,2", "--xi", "0,0",
        ],
        &D2[..5],
        &[&D2[..], &["--detect", "0,0"]].concat(),
        &[&D2[..], &["--target", "trunc:3"]].concat(),
        &[&D2[..], &["--signal", "thermal:1"]].concat(),
        &[&D2[..], &["--format", "csv"]].concat(),
        &["verify", "--entry", "d9-none"],
        &["verify", "--wiring", "alt-9"],
        &[
            "sweep", "--preset", "qsd6", "--t2", "1/2,?", "--xi", "0,pi", "--param", "T4",
            "--range", "0:1:0",
        ],
        &[
            "sweep", "--preset", "qsd6", "--t2", "1/2,?", "--xi", "0,pi", "--param", "T4",
            "--range", "0:2:3",
        ],
        &[
            "sweep", "--preset", "qsd6", "--t2", "1/2,?", "--xi", "0,pi", "--param", "T3",
            "--range", "0:1:3",
        ],
        &[
            "optimize",
            "--preset",
            "qsd6",
            "--ancilla",
            "1,0",
            "--starts",
            "0",
        ],
        &["frobnicate"],
        &[],
    ] {
        let o = cli(args);
        assert_eq!(o.code, 1, "{args:?}: {}", o.stderr);
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli(&["--help"]).code, 0);
    assert_eq!(cli(&["simulate", "--help"]).code, 0);
    assert_eq!(cli(&["--version"]).code, 0);
}

#[test]
fn verify_default_and_filtered() {
    let o = cli(&["verify"]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.contains("REPRODUCED"));
    let v = json(&o);
    assert_eq!(v["six_port_reproduced"], true);
    for name in ["d2-ppb", "d3-sol1", "d3-sol2", "d3-sol3", "d3-sol4"] {
        assert_eq!(v["reconciliation"][name], serde_json::json!(["qsd6"]));
    }

    let o = cli(&[
        "verify",
        "--wiring",
        "l0",
        "--entry",
        "punch-0x2x,d5-numeric",
    ]);
    assert_eq!(o.code, 0);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["preset"] == "qsd8"));

    let o = cli(&[
        "verify",
        "--wiring",
        "alt-1,alt-2",
        "--entry",
        "d5-numeric",
        "--format",
        "csv",
    ]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "entry,family,preset,fidelity,probability,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.ends_with(",PARTIAL")));
}

#[test]
fn optimize_exit_codes() {
    // d = 1 needs no ancilla and every setting is ideal
    let o = cli(&["optimize", "--preset", "qsd6", "--starts", "2"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(json(&o)["status"], "feasible");

    // frozen transparent device cannot truncate
    let o = cli(&[
        "optimize",
        "--preset",
        "qsd6",
        "--t2",
        "1,1",
        "--xi",
        "0,0",
        "--ancilla",
        "1,0",
    ]);
    assert_eq!(o.code, 2);
    let v = json(&o);
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["starts"], 1);

    // frozen at the published setting is feasible
    let o = cli(&[
        "optimize",
        "--preset",
        "qsd6",
        "--t2",
        "1/2,1/2",
        "--xi",
        "0,pi",
        "--ancilla",
        "1,0",
    ]);
    assert_eq!(o.code, 0);
}

#[test]
fn optimize_d4_flat() {
    let o = cli(&[
        "optimize",
        "--preset",
        "qsd8",
        "--ancilla",
        "1,1,1",
        "--target",
        "trunc:4",
        "--starts",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-6);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["params"]["t2"].as_array().unwrap().len(), 5);
    assert!(!v["clusters"].as_array().unwrap().is_empty());
}

#[test]
fn optimize_partially_frozen() {
    let o = cli(&[
        "optimize",
        "--preset",
        "qsd6",
        "--t2",
        "?,?",
        "--xi",
        "0,?",
        "--ancilla",
        "1,1",
        "--starts",
        "10",
        "--seed",
        "2",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["params"]["xi"][0], 0.0);
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn sweep_d2_peaks_at_half() {
    let o = cli(&[
        "sweep",
        "--preset",
        "qsd6",
        "--t2",
        "1/2,?",
        "--xi",
        "0,pi",
        "--param",
        "T4",
        "--range",
        "0:1:101",
        "--ancilla",
        "1,0",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(
        o.stdout.lines().next().unwrap(),
        "param,fidelity,probability,c0_re,c0_im,c1_re,c1_im"
    );
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 101);
    let best = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert_eq!(best[0], 0.5);
    assert_eq!(best[1], 1.0);
    assert_eq!(rows[100][0], 1.0);
}

#[test]
fn sweep_single_step_and_json() {
    let base = [
        "sweep",
        "--preset",
        "qsd6",
        "--t2",
        "1/2,?",
        "--xi",
        "0,pi",
        "--param",
        "T4",
        "--ancilla",
        "1,0",
        "--range",
    ];
    let o = cli(&[&base[..], &["0.3:0.9:1"]].concat());
    assert_eq!(o.code, 0);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.3);

    let o = cli(&[&base[..], &["0:1:3", "--format", "json"]].concat());
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[1]["param"], 0.5);
}

#[test]
fn sweep_phase_parameter() {
    let o = cli(&[
        "sweep",
        "--preset",
        "qsd6",
        "--t2",
        "1/2,1/2",
        "--xi",
        "0,?",
        "--param",
        "XI4",
        "--range",
        "0:2*pi:5",
        "--ancilla",
        "1,0",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = csv_rows(&o);
    // ξ4 = π is the ideal setting; ξ4 = 0 and 2π make c0 and c1 opposite
    assert_eq!(rows[2][1], 1.0);
    assert!(rows[0][1] < 1e-12 && rows[4][1] < 1e-12);
}

#[test]
fn tied_sweep_of_x1x3_punch() {
    let o = cli(&[
        "sweep",
        "--preset",
        "qsd8",
        "--t2",
        "1/2,?,1,?,1/2",
        "--xi",
        "0,0,0,0,0",
        "--param",
        "T2,T4",
        "--range",
        "0:1:201",
        "--ancilla",
        "1,1,1",
        "--target",
        "punch:4:0,2",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = csv_rows(&o);
    let t = (3.0 - 3f64.sqrt()) / 3.0;
    let ideal: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1] >= 1.0 - 1e-9).collect();
    // the ideal point is isolated, so the grid only brackets it
    assert!(ideal.is_empty());
    let best = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((best[0] - t).abs() <= 0.005, "{}", best[0]);

    let at_t = cli(&[
        "sweep",
        "--preset",
        "qsd8",
        "--t2",
        "1/2,?,1,?,1/2",
        "--xi",
        "0,0,0,0,0",
        "--param",
        "T2,T4",
        "--range",
        "(3-sqrt(3))/3:1:1",
        "--ancilla",
        "1,1,1",
        "--target",
        "punch:4:0,2",
    ]);
    assert_eq!(csv_rows(&at_t)[0][1], 1.0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qtruncate");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&D2);
    assert_eq!(ok.status.code(), Some(0));
    assert!(!ok.stdout.is_empty());
    assert_eq!(
        status(&["verify", "--entry", "nope"]).status.code(),
        Some(1)
    );
    assert_eq!(
        status(&[
            "optimize",
            "--preset",
            "qsd6",
            "--t2",
            "1,1",
            "--xi",
            "0,0",
            "--ancilla",
            "1,0"
        ])
        .status
        .code(),
        Some(2)
    );
    let bad_threads = Command::new(bin)
        .args(D2)
        .env(qtruncate_cli::THREADS_ENV, "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(1));
}

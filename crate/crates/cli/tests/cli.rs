//! End-to-end tests of the `cavmag` binary: exit codes, report content,
//! strict config handling, CSV schema and round-trip fidelity.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cavmag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavmag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("cavmag-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn point_defaults_are_stable_and_entangled() {
    let out = cavmag(&["point"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("stability: stable"), "{text}");
    assert!(text.contains("E_a1m = 0.08"), "{text}");
}

#[test]
fn point_json_zero_drive_has_no_entanglement() {
    let out = cavmag(&["point", "--gain", "0", "--temperature", "0", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ent = &v["steady"]["entanglement"];
    for key in ["e_a1m", "e_a2m", "e_a1a2", "r_tau_min"] {
        let x = ent[key].as_f64().unwrap();
        assert!(x.abs() <= 1e-9, "{key} = {x}");
    }
}

#[test]
fn point_rejects_malformed_value() {
    let out = cavmag(&["point", "--delta1", "10GHz_in_kappaM_overflow"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn point_reports_unstable_with_exit_3() {
    let out = cavmag(&["point", "--g1", "0", "--g2", "0", "--delta1", "0", "--gain", "3"]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    assert!(text.contains("UNSTABLE"), "{text}");
    assert!(text.contains("eigenvalues"), "{text}");
    assert!(text.contains("mean fields"), "{text}");
    assert!(text.contains("masked"), "{text}");
}

#[test]
fn point_rejects_invalid_physical_params() {
    let out = cavmag(&["point", "--kappa1", "-5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_layering_and_strictness() {
    let path = tmp_path("config.txt");
    std::fs::write(
        &path,
        "# working point\n\
         delta1 = -20\n\
         gain = 0\n\
         temperature = 0\n",
    )
    .unwrap();
    // flag wins over the file: gain 2.5 restores entanglement
    let out = cavmag(&[
        "point",
        "--config",
        path.to_str().unwrap(),
        "--gain",
        "2.5",
        "--temperature",
        "10",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["steady"]["entanglement"]["e_a1m"].as_f64().unwrap() > 0.01);

    let bad = tmp_path("bad-key.txt");
    std::fs::write(&bad, "delta_one = -20\n").unwrap();
    let out = cavmag(&["point", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));

    let dup = tmp_path("dup-key.txt");
    std::fs::write(&dup, "gain = 1\ngain = 2\n").unwrap();
    let out = cavmag(&["point", "--config", dup.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate key"));

    for p in [path, bad, dup] {
        let _ = std::fs::remove_file(p);
    }
}

const CSV_HEADER: &str = "axis1,axis2,stable,N1,N2,Nm,E_a1m,E_a2m,E_a1a2,R_tau_min,\
var_X1,var_Y1,var_X2,var_Y2,var_x,var_y,sq_x_dB,sq_y_dB,sq_Y2_dB,low_exc_ratio";

#[test]
fn sweep_writes_schema_exact_csv_and_summary() {
    let csv = tmp_path("grid.csv");
    let json = tmp_path("grid.json");
    let out = cavmag(&[
        "sweep",
        "--axis1",
        "delta1:-20:20:2",
        "--axis2",
        "deltaM:0:10:2",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 4, "header plus 4 data rows");
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 20);
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["summary"]["total"], 4);
    assert!(summary["summary"]["e_a1m"]["value"].as_f64().is_some());

    let _ = std::fs::remove_file(csv);
    let _ = std::fs::remove_file(json);
}

/// Parsing an emitted CSV reproduces the in-memory numerics bit-for-bit.
#[test]
fn csv_round_trips_at_full_precision() {
    let csv = tmp_path("roundtrip.csv");
    let json = tmp_path("roundtrip.json");
    let out = cavmag(&[
        "sweep",
        "--axis1",
        "gain:0:4:3",
        "--axis2",
        "g2_over_g1:0:2:3",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // independent reference computation through the library
    let mut base = cavmag::model::SystemParams::paper_defaults();
    base.delta1 = -20.0 * base.kappa_m;
    let spec = cavmag::sweep::GridSpec {
        base,
        axis1: cavmag::sweep::Axis::linear(cavmag::sweep::AxisParam::Gain, 0.0, 4.0, 3),
        axis2: Some(cavmag::sweep::Axis::linear(
            cavmag::sweep::AxisParam::G2OverG1,
            0.0,
            2.0,
            3,
        )),
    };
    let grid = cavmag::sweep::run_grid(&spec).unwrap();

    let text = std::fs::read_to_string(&csv).unwrap();
    for (row, line) in text.lines().skip(1).enumerate() {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>().expect("numeric cell"))
            .collect();
        let pt = &grid.points[row];
        let mf = pt.mean_fields.as_ref().unwrap();
        assert_eq!(cells[3].to_bits(), mf.n1.to_bits(), "N1 row {row}");
        assert_eq!(cells[5].to_bits(), mf.nm.to_bits(), "Nm row {row}");
        if let Some(st) = &pt.steady {
            assert_eq!(cells[6].to_bits(), st.entanglement.e_a1m.to_bits());
            assert_eq!(cells[14].to_bits(), st.variances[4].to_bits());
            assert_eq!(cells[16].to_bits(), st.squeezing_db[4].to_bits());
        } else {
            assert!(cells[6].is_nan());
        }
    }

    let _ = std::fs::remove_file(csv);
    let _ = std::fs::remove_file(json);
}

#[test]
fn sweep_preset_fig5c_is_one_dimensional() {
    let csv = tmp_path("fig5c.csv");
    let json = tmp_path("fig5c.json");
    let out = cavmag(&[
        "sweep",
        "--preset",
        "fig5c",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 200);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[1], "nan", "axis2 of a 1-D sweep is nan");
    assert_eq!(first[2], "1");

    let _ = std::fs::remove_file(csv);
    let _ = std::fs::remove_file(json);
}

#[test]
fn sweep_requires_axes_or_preset() {
    let out = cavmag(&["sweep"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_rejects_unknown_preset_and_bad_axis() {
    assert_eq!(code(&cavmag(&["sweep", "--preset", "fig99"])), 2);
    assert_eq!(code(&cavmag(&["sweep", "--axis1", "delta9:0:1:5"])), 2);
    assert_eq!(code(&cavmag(&["sweep", "--axis1", "gain:0:1:1"])), 2);
}

#[test]
fn sweep_unwritable_output_exits_4() {
    let out = cavmag(&[
        "sweep",
        "--axis1",
        "gain:0:1:2",
        "--out-csv",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(code(&out), 4);
}

/// Worker count must not change a single byte of the output, and sweeps
/// crossing the instability threshold still exit 0 with masked rows.
#[test]
fn sweep_output_is_worker_count_independent() {
    let mut csvs = Vec::new();
    for workers in ["1", "2"] {
        let csv = tmp_path(&format!("workers-{workers}.csv"));
        let json = tmp_path(&format!("workers-{workers}.json"));
        let out = cavmag(&[
            "sweep",
            "--axis1",
            "gain:0.5:10:6",
            "--axis2",
            "g2_over_g1:0:2:5",
            "--workers",
            workers,
            "--out-csv",
            csv.to_str().unwrap(),
            "--out-json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "masked points must not change the exit code");
        csvs.push(std::fs::read_to_string(&csv).unwrap());
        let _ = std::fs::remove_file(csv);
        let _ = std::fs::remove_file(json);
    }
    assert_eq!(csvs[0], csvs[1]);

    let masked: Vec<&str> = csvs[0]
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(2) == Some("0"))
        .collect();
    assert!(!masked.is_empty(), "grid should cross the threshold");
    for row in masked {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[6], "nan", "masked E_a1m must be nan");
        assert_eq!(cells[14], "nan", "masked var_x must be nan");
    }
}

#[test]
fn validate_passes_and_fails_by_tolerance() {
    let out = cavmag(&[
        "validate",
        "--mean-field-draws",
        "25",
        "--lyapunov-draws",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 6, "{text}");

    let out = cavmag(&[
        "validate",
        "--tol",
        "1e-30",
        "--mean-field-draws",
        "5",
        "--lyapunov-draws",
        "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

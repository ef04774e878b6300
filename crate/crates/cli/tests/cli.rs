use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flatscreen::inverse::JACCARD_FLOOR;
use flatscreen_cli::EXIT_VALIDATION;
use serde_json::Value;
use tempfile::TempDir;

const SINE_INCIDENT: &str = r#"
[incident]
kind = "superposition"

[[incident.waves]]
kind = "plane"
direction = [0.0, 0.0, 1.0]
amplitude = [0.0, -0.5]

[[incident.waves]]
kind = "plane"
direction = [0.0, 0.0, -1.0]
amplitude = [0.0, 0.5]
"#;

fn disk_config(k: f64, h: f64) -> String {
    format!(
        "wavenumber = {k:?}\n\n[shape]\nkind = \"disk\"\nradius = 1.0\n\n[mesh]\ntarget_h = {h:?}\ngrading = 0.5\n"
    )
}

struct Run {
    dir: TempDir,
    config: PathBuf,
}

impl Run {
    fn new(config: &str) -> Self {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("experiment.toml");
        fs::write(&path, config).unwrap();
        Run { dir, config: path }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_flatscreen"))
            .args(args)
            .arg("--config")
            .arg(&self.config)
            .arg("--out")
            .arg(self.out())
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> Output {
        let out = self.exec(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out().join(name)).unwrap()).unwrap()
    }

    fn csv(&self, name: &str) -> Vec<String> {
        fs::read_to_string(self.out().join(name))
            .unwrap()
            .lines()
            .map(String::from)
            .collect()
    }
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn solve_writes_one_row_per_panel() {
    let run = Run::new(&disk_config(6.0, 0.3));
    run.ok(&["solve"]);
    let report = run.json("solve_report.json");
    let panels = report["panels"].as_u64().unwrap() as usize;
    let rows = run.csv("density.csv");
    assert_eq!(rows[0], "triangle,c1,c2,re,im");
    assert_eq!(rows.len() - 1, panels);
    assert!(report["solver"]["residual"].as_f64().unwrap() <= 1e-10);
    assert!(report.get("warning").is_none());
}

#[test]
fn antisymmetric_wave_warns_and_gives_zero_density() {
    let run = Run::new(&(disk_config(6.0, 0.3) + SINE_INCIDENT));
    let out = run.ok(&["solve"]);
    assert!(stderr(&out).contains("degenerate incident wave"));
    let report = run.json("solve_report.json");
    assert!(report["density_norm"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["symmetry"]["verdict"], "antisymmetric");
}

#[test]
fn invalid_wavenumber_is_a_validation_error() {
    let run = Run::new(&disk_config(0.0, 0.3));
    let out = run.exec(&["solve"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(stderr(&out).contains("wavenumber"));
}

#[test]
fn unknown_keys_and_missing_config_are_rejected() {
    let run = Run::new(
        &(disk_config(6.0, 0.3)
            + "\n[grid]\nkind = \"hemisphere\"\nn_theta = 4\nn_phi = 8\ncolour = 1\n"),
    );
    assert_eq!(run.exec(&["solve"]).status.code(), Some(EXIT_VALIDATION));
    let out = Command::new(env!("CARGO_BIN_EXE_flatscreen"))
        .arg("solve")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(stderr(&out).contains("--config"));
}

#[test]
fn farfield_of_zero_density_file_is_zero() {
    let run = Run::new(&disk_config(4.0, 0.3));
    run.ok(&["solve"]);
    // Zero every coefficient of the exported density.
    let rows = run.csv("density.csv");
    let mut zeroed = vec![rows[0].clone()];
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        zeroed.push(format!("{},{},{},0,0", f[0], f[1], f[2]));
    }
    let density = run.dir.path().join("zero.csv");
    fs::write(&density, zeroed.join("\n") + "\n").unwrap();
    let config = disk_config(4.0, 0.3)
        + &format!("\n[farfield]\ndensity = {:?}\n", density.to_str().unwrap());
    let run2 = Run::new(&config);
    run2.ok(&["farfield"]);
    let ff = run2.csv("farfield.csv");
    assert_eq!(ff[0], "theta,phi,x1,x2,x3,re,im");
    assert_eq!(ff.len() - 1, 32 * 64);
    for row in &ff[1..] {
        let f: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!((f[5], f[6]), (0.0, 0.0));
    }
}

#[test]
fn farfield_asymptotics_decay_like_one_over_r() {
    let run = Run::new(&disk_config(4.0, 0.3));
    run.ok(&["farfield", "--verify-asymptotics"]);
    let report = run.json("farfield_report.json");
    let slope = report["asymptotics"]["slope"].as_f64().unwrap();
    assert!((-1.3..=-0.7).contains(&slope), "slope {slope}");
    assert_eq!(run.csv("asymptotics.csv")[0], "r,error,scaled_error");
}

#[test]
fn invert_recovers_the_disk() {
    let run = Run::new(&disk_config(8.0, 0.25));
    run.ok(&["farfield"]);
    run.ok(&["invert"]);
    let metrics = run.json("invert_metrics.json");
    assert_eq!(metrics["verdict"], "support_recovered");
    let jaccard = metrics["metrics"]["jaccard"].as_f64().unwrap();
    assert!(jaccard >= JACCARD_FLOOR, "jaccard {jaccard}");
    assert_eq!(run.csv("support.csv")[0], "x1,x2,amplitude,indicator");
    assert_eq!(run.csv("spectrum.csv")[0], "xi1,xi2,re,im");
}

#[test]
fn invert_of_zero_farfield_is_degenerate() {
    let run = Run::new(&(disk_config(6.0, 0.3) + SINE_INCIDENT));
    run.ok(&["farfield"]);
    run.ok(&["invert"]);
    let metrics = run.json("invert_metrics.json");
    assert_eq!(metrics["verdict"], "degenerate_zero_farfield");
    assert_eq!(metrics["metrics"]["zero_field"], true);
    assert_eq!(metrics["metrics"]["estimated_area"].as_f64(), Some(0.0));
    let support = run.csv("support.csv");
    assert!(support[1..].iter().all(|r| r.ends_with(",0")));
}

#[test]
fn invert_names_a_missing_input_file() {
    let run =
        Run::new(&(disk_config(6.0, 0.3) + "\n[invert]\nfarfield = \"no/such/farfield.csv\"\n"));
    let out = run.exec(&["invert"]);
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(stderr(&out).contains("no/such/farfield.csv"));
}

fn uniqueness_config(shape_b: &str, extra: &str) -> String {
    format!(
        "{}\n[shape_b]\n{shape_b}\n\n[grid]\nkind = \"hemisphere\"\nn_theta = 16\nn_phi = 32\n\n[inverse]\nspectrum_n = 24\nlattice_n = 64\n{extra}",
        disk_config(4.0, 0.3)
    )
}

#[test]
fn uniqueness_of_identical_shapes_is_at_the_noise_floor() {
    let run = Run::new(&uniqueness_config("kind = \"disk\"\nradius = 1.0", ""));
    run.ok(&["uniqueness"]);
    let report = run.json("uniqueness_report.json");
    assert_eq!(report["verdict"], "indistinguishable");
    let distance = report["farfield_distance"].as_f64().unwrap();
    let noise = report["noise_floor"].as_f64().unwrap();
    assert!(distance <= noise, "{distance} vs {noise}");
}

#[test]
fn uniqueness_separates_distinct_shapes() {
    let run = Run::new(&uniqueness_config(
        "kind = \"ellipse\"\na = 1.3\nb = 0.8",
        "",
    ));
    run.ok(&["uniqueness"]);
    let report = run.json("uniqueness_report.json");
    assert_eq!(report["verdict"], "distinguishable");
    assert!(report["distance_over_noise"].as_f64().unwrap() > 10.0);
    assert!(report["support_a"]["jaccard"].as_f64().is_some());
}

#[test]
fn uniqueness_with_antisymmetric_wave_is_degenerate() {
    let run = Run::new(&uniqueness_config(
        "kind = \"ellipse\"\na = 1.3\nb = 0.8",
        SINE_INCIDENT,
    ));
    run.ok(&["uniqueness"]);
    let report = run.json("uniqueness_report.json");
    assert_eq!(report["verdict"], "degenerate_incident_wave");
    assert!(report["farfield_sup_a"].as_f64().unwrap() <= 1e-8);
    assert!(report["farfield_sup_b"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn verify_runs_the_property_suite() {
    let run = Run::new(&disk_config(3.0, 0.3));
    let out = run.ok(&["verify", "--seed", "3", "--threads", "1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("PASS")).count(),
        10,
        "{text}"
    );
    let report = run.json("verify_report.json");
    assert_eq!(report["params"]["seed"], 3);
}

#[test]
fn identical_runs_give_identical_exports() {
    let config =
        disk_config(5.0, 0.3) + "\n[grid]\nkind = \"hemisphere\"\nn_theta = 8\nn_phi = 16\n";
    let (a, b) = (Run::new(&config), Run::new(&config));
    for run in [&a, &b] {
        run.ok(&["solve", "--seed", "9"]);
        run.ok(&["farfield"]);
    }
    for name in ["density.csv", "farfield.csv", "solve_report.json"] {
        assert_eq!(read(&a.out(), name), read(&b.out(), name), "{name}");
    }
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cv-triparty");

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn cv-triparty")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap().to_string();
    full.extend(["--out", &out_str]);
    let o = run(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn outputs_match_goldens() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("symmetric.csv", &["symmetric", "--r-max", "2", "--steps", "9"]),
        (
            "asym_tw_literal.csv",
            &["asym-tw", "--coefficients", "paper-literal", "--zt-max", "1.5", "--steps", "7", "--find-window"],
        ),
        ("asym_tw_canonical.csv", &["asym-tw", "--zt-max", "3", "--steps", "7", "--find-window"]),
        ("cavity_omega.csv", &["cavity", "--steps", "13"]),
        ("cavity_sweep.csv", &["cavity", "--sweep-pump", "0.2:0.9:8", "--steps", "121"]),
    ];
    for (name, args) in cases {
        let got = run_to_file(dir.path(), name, args);
        let want = std::fs::read_to_string(golden(name)).unwrap();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["symmetric", "--steps", "5"];
    let file = run_to_file(dir.path(), "s.csv", &args);
    let o = run(&args);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), file);
}

#[test]
fn header_and_format() {
    let o = run(&["asym-tw", "--steps", "2", "--zt-max", "1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "# cv-triparty v1, subcommand=asym-tw, params=kappa_ratio=0.6;zt_min=0;zt_max=1;steps=2;coefficients=canonical;find_window=false"
    );
    assert_eq!(lines.next().unwrap(), "zt,ds_minus_13,v_123,v_312,v_13,reid_1_3,reid_3_1,key_1_3,key_3_1");
    assert_eq!(lines.next().unwrap(), "0,4,4,4,4,1,1,-0.442695041,-0.442695041");
    assert!(!text.contains('\r'));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["symmetric", "--steps", "1"]), 2);
    assert_eq!(code(&["symmetric", "--r-min", "2", "--r-max", "1"]), 2);
    assert_eq!(code(&["symmetric", "--r-min", "-1"]), 2);
    assert_eq!(code(&["asym-tw", "--coefficients", "exact"]), 2);
    assert_eq!(code(&["asym-tw", "--kappa-ratio", "1.5"]), 2);
    assert_eq!(code(&["cavity", "--sweep-pump", "0.1:0.5"]), 2);
    assert_eq!(code(&["cavity", "--eps-frac", "1.0"]), 3);
    assert_eq!(code(&["cavity", "--eps-frac", "1.3"]), 3);
    assert_eq!(code(&["cavity", "--sweep-pump", "0.5:1.2:4"]), 3);
    assert_eq!(code(&["cavity", "--kappa-ratio", "2"]), 3);
    assert_eq!(code(&["asym-tw", "--coefficients", "paper-literal", "--zt-max", "0.2", "--find-window"]), 3);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[symmetric]\nr-max = 1.0\nsteps = 3\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let from_file = String::from_utf8(run(&["--config", cfg_s, "symmetric"]).stdout).unwrap();
    assert!(from_file.contains("params=r_min=0;r_max=1;steps=3;"));
    assert_eq!(from_file.lines().count(), 5);
    let overridden = String::from_utf8(run(&["symmetric", "--config", cfg_s, "--steps", "4"]).stdout).unwrap();
    assert!(overridden.contains("r_max=1;steps=4;"));

    std::fs::write(&cfg, "[symmetric]\nrmax = 1.0\n").unwrap();
    let o = run(&["--config", cfg_s, "symmetric"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rmax"));
    assert_eq!(run(&["--config", "/nonexistent/run.toml", "symmetric"]).status.code(), Some(2));
}

#[test]
fn plot_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fig.svg");
    let o = run(&[
        "plot",
        golden("asym_tw_canonical.csv").to_str().unwrap(),
        "--columns",
        "key_1_3,key_3_1",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<path").count(), 2);
    assert_eq!(text.matches(r#"class="guide""#).count(), 1);

    let missing = run(&["plot", golden("symmetric.csv").to_str().unwrap(), "--columns", "nope"]);
    assert_eq!(missing.status.code(), Some(2));
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = run(&["plot", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let header_only = dir.path().join("header.csv");
    std::fs::write(&header_only, "# cv-triparty v1, subcommand=symmetric, params=\nr,reid\n").unwrap();
    assert_eq!(run(&["plot", header_only.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn run_with_plot_flag_writes_both() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let o = run(&[
        "symmetric",
        "--steps",
        "11",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(csv.exists());
    let text = std::fs::read_to_string(svg).unwrap();
    // ds/v at 4, reid/wang at 1
    assert_eq!(text.matches(r#"class="guide""#).count(), 2);
}

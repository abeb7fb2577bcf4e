use std::path::Path;
use std::process::{Command, Output};

fn fks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fks"))
        .args(args)
        .output()
        .expect("failed to launch fks")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn small_sod1d_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fields.csv");
    let report = dir.path().join("report.csv");
    let ledger = dir.path().join("ledger.csv");
    let o = fks(&[
        "--preset",
        "sod1d",
        "--nx",
        "60",
        "--nv",
        "24",
        "--tfinal",
        "0.01",
        "--ref",
        "riemann",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--ledger",
        ledger.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Ncycle"));
    assert!(stdout.contains("density error"));

    let fields = std::fs::read_to_string(&out).unwrap();
    assert_eq!(fields.lines().count(), 61);
    assert_eq!(fields.lines().next().unwrap(), "x,rho,ux,theta,pressure");

    let rep = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = rep.lines().collect();
    assert_eq!(
        lines[0],
        "preset,nx,nv,ncycle,T,Tcycle,Tcell,transport_pct,relax_pct,mass_drift,mom_drift,energy_drift,min_f,min_E"
    );
    assert!(lines[1].starts_with("sod1d,60,24,"));

    let ncycle: usize = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(
        std::fs::read_to_string(&ledger).unwrap().lines().count(),
        ncycle + 2
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("f.csv");
    std::fs::write(
        &cfg,
        format!(
            "# coarse smooth run\npreset = smooth-periodic\nnx = 16\nnv = 12\ntfinal = 0.02\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = fks(&["--config", cfg.to_str().unwrap(), "--nx", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 21);
}

#[test]
fn vtk_output_for_3d() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.vtk");
    let o = fks(&[
        "--preset",
        "sod3d",
        "--nx",
        "6",
        "--nv",
        "12",
        "--vmin",
        "-10",
        "--vmax",
        "10",
        "--tfinal",
        "0.02",
        "--format",
        "vtk",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(text.contains("DIMENSIONS 6 6 6\n"));
    assert!(text.contains("POINT_DATA 216\n"));
}

#[test]
fn invalid_inputs_fail_with_the_key_named() {
    let o = fks(&["--preset", "sod1d", "--cfl", "1.5"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cfl"));

    let o = fks(&["--preset", "sod9d"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("preset"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "preset = sod1d\nwidth = 3\n").unwrap();
    let o = fks(&["--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("width"));

    let o = fks(&["--preset", "sod1d", "--format", "vtk"]);
    assert!(!o.status.success());

    let missing = Path::new("/nonexistent/dir/f.csv");
    let o = fks(&[
        "--preset",
        "sod1d",
        "--nx",
        "10",
        "--nv",
        "8",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
}

use std::path::Path;
use std::process::{Command, Output};

fn vqhull(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vqhull"));
    cmd.args(args);
    for var in ["VQHULL_WORKERS", "VQHULL_LANES", "VQHULL_BLOCK"] {
        cmd.env_remove(var);
    }
    cmd.envs(env.iter().copied());
    cmd.output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_hull_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (d, h) = (path(dir.path(), "d.bin"), path(dir.path(), "h.txt"));
    let out = vqhull(
        &[
            "gen",
            "--dataset",
            "disk",
            "--n",
            "1000",
            "--seed",
            "7",
            "--out",
            &d,
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let meta = std::fs::read_to_string(format!("{d}.json")).unwrap();
    assert!(meta.contains("\"seed\": 7"));
    assert_eq!(
        vqhull(&["hull", "--in", &d, "--out", &h], &[])
            .status
            .code(),
        Some(0)
    );
    let out = vqhull(&["verify", "--in", &d, "--hull", &h], &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS"));
}

#[test]
fn broken_hull_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (d, h) = (path(dir.path(), "sq.txt"), path(dir.path(), "h.txt"));
    std::fs::write(&d, "pbbs_sequencePoint2d\n0 0\n2 0\n2 2\n0 2\n1 1\n").unwrap();
    std::fs::write(&h, "pbbs_sequencePoint2d\n0 0\n0 2\n2 2\n1 1\n2 0\n").unwrap();
    let out = vqhull(&["verify", "--in", &d, "--hull", &h], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("vertex 3 (1, 1)"));
    assert_eq!(vqhull(&["verify", "--in", &d], &[]).status.code(), Some(0));
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(vqhull(&["hull", "--bogus"], &[]).status.code(), Some(2));
    assert_eq!(vqhull(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(vqhull(&[], &[]).status.code(), Some(2));
    assert_eq!(
        vqhull(
            &["hull", "--dataset", "disk", "--n", "10", "--lanes", "3"],
            &[]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        vqhull(&["hull", "--dataset", "disk"], &[]).status.code(),
        Some(2)
    );
    let out = vqhull(&["verify", "--in", "/nonexistent/points.bin"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/points.bin"));
    assert_eq!(vqhull(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn bench_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = path(dir.path(), "runs.csv");
    let base = [
        "bench",
        "--dataset",
        "kuzmin",
        "--n",
        "20000",
        "--reps",
        "3",
        "--no-baseline",
        "--csv",
        &csv_path,
    ];
    for workers in ["1", "2"] {
        let mut args = base.to_vec();
        args.extend(["--workers", workers]);
        assert_eq!(vqhull(&args, &[]).status.code(), Some(0));
    }
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "energy_j"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    assert_eq!(&rows[0][col("workers")], "1");
    assert_eq!(&rows[1][col("workers")], "2");
    assert_eq!(rows[0][col("hull_vertices")], rows[1][col("hull_vertices")]);
    assert_eq!(&rows[0][col("energy_j")], "");
    let bytes: f64 = rows[0][col("bytes")].parse().unwrap();
    let mean: f64 = rows[0][col("mean_s")].parse().unwrap();
    let bw: f64 = rows[0][col("bandwidth_gbs")].parse().unwrap();
    assert!((bw - bytes / mean / 1e9).abs() <= 1e-9 * bw);

    // Environment supplies defaults; flags win.
    let json = |args: &[&str], env: &[(&str, &str)]| {
        let out = vqhull(args, env);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap()
    };
    let args = [
        "bench",
        "--dataset",
        "disk",
        "--n",
        "5000",
        "--reps",
        "2",
        "--no-baseline",
        "--json",
    ];
    let env = [
        ("VQHULL_WORKERS", "3"),
        ("VQHULL_LANES", "4"),
        ("VQHULL_BLOCK", "64"),
    ];
    let from_env = json(&args, &env);
    assert!(from_env.contains("\"workers\": 3"));
    assert!(from_env.contains("\"lanes\": 4"));
    assert!(from_env.contains("\"block\": 64"));
    assert!(from_env.contains("\"reps\": 2"));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--workers", "2"]);
    assert!(json(&with_flag, &env).contains("\"workers\": 2"));
}

#[test]
fn dataset_file_is_not_modified_by_bench() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path(), "c.bin");
    assert_eq!(
        vqhull(
            &["gen", "--dataset", "circle", "--n", "3000", "--out", &d],
            &[]
        )
        .status
        .code(),
        Some(0)
    );
    let before = std::fs::read(&d).unwrap();
    let out = vqhull(&["bench", "--in", &d, "--reps", "2", "--no-baseline"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&d).unwrap(), before);
}

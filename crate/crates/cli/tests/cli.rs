use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use chhard_core::io::{encode_tensor, write_tensor};
use chhard_core::synth::gen_iid_gaussian;
use chhard_core::{build_planar, ChannelTensor, Complex64, Dims, TensorMeta};

fn chhard(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chhard"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn synth_is_deterministic_and_sized() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = [
        "synth", "--model", "gaussian", "--seed", "7", "--M", "16", "--N", "30", "--F", "5",
    ];
    assert!(chhard(&args, &a).status.success());
    assert!(chhard(&args, &b).status.success());
    let bytes = std::fs::read(a.join("tensor.mcht")).unwrap();
    assert_eq!(bytes, std::fs::read(b.join("tensor.mcht")).unwrap());
    let t = chhard_core::io::read_tensor(&a.join("tensor.mcht")).unwrap();
    assert_eq!(t.dims(), Dims::new(1, 30, 5, 16));
    let manifest = json(&a.join("manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(
        manifest["config_hash"],
        json(&b.join("manifest.json"))["config_hash"]
    );
}

#[test]
fn gscm_default_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = chhard(
        &["synth", "--model", "gscm", "--seed", "3", "--K", "1"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = chhard_core::io::read_tensor(&dir.path().join("tensor.mcht")).unwrap();
    assert_eq!(t.dims(), Dims::new(1, 300, 129, 128));
    let echoed = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
    assert_eq!(
        chhard_core::GscmConfig::from_toml_str(&echoed)
            .unwrap()
            .seed,
        3
    );
}

#[test]
fn shipped_config_matches_builtin_preset() {
    let path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/indoor_closely_spaced_2_6ghz.toml");
    let shipped = chhard_core::io::load_gscm_config(&path).unwrap();
    assert_eq!(shipped, chhard_core::GscmConfig::default());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing_seed = chhard(&["synth", "--model", "gaussian"], dir.path());
    assert_eq!(missing_seed.status.code(), Some(2));
    assert_eq!(
        chhard(&["theory", "--bogus"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        chhard(&["reproduce", "fig99"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        chhard(&["theory", "--paths", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analyze_gaussian_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen_iid_gaussian(1, 300, 129, 128, 11).unwrap();
    let path = dir.path().join("g.mcht");
    write_tensor(&t, &path).unwrap();
    let out = chhard(
        &[
            "analyze",
            "--tensor",
            path.to_str().unwrap(),
            "--outputs",
            "curve,cdf,map,spread",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = json(&dir.path().join("summary.json"));
    let h = summary["hardening_db"].as_f64().unwrap();
    assert!((h + 10.5).abs() < 0.5, "{h}");
    let curve = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(curve.starts_with("m,std_db\n1,"));
    assert_eq!(curve.lines().count(), 129);
    for name in [
        "cdf.csv",
        "cdf_m1.csv",
        "map.csv",
        "spread.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn constant_tensor_serializes_null_curve() {
    let dir = tempfile::tempdir().unwrap();
    let t = ChannelTensor::from_fn(
        Dims::new(1, 4, 3, 5),
        TensorMeta::default(),
        |_, _, _, m| Complex64::new(1.0 + m as f64, 0.0),
    )
    .unwrap();
    let path = dir.path().join("c.mcht");
    write_tensor(&t, &path).unwrap();
    let out = chhard(
        &[
            "--format",
            "json",
            "analyze",
            "--tensor",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let curve = json(&dir.path().join("curve.json"));
    assert!(curve["std_db"]
        .as_array()
        .unwrap()
        .iter()
        .all(Value::is_null));
    assert_eq!(
        json(&dir.path().join("summary.json"))["start_db"],
        Value::Null
    );
    let csv_dir = dir.path().join("csv");
    assert!(
        chhard(&["analyze", "--tensor", path.to_str().unwrap()], &csv_dir)
            .status
            .success()
    );
    let csv = std::fs::read_to_string(csv_dir.join("curve.csv")).unwrap();
    assert_eq!(csv, "m,std_db\n1,\n2,\n3,\n4,\n5,\n");
}

#[test]
fn polstats_on_planar_array() {
    let dir = tempfile::tempdir().unwrap();
    let g = build_planar();
    let mut t = gen_iid_gaussian(1, 40, 8, g.len(), 12).unwrap();
    t.meta_mut().array_id = g.id.clone();
    let path = dir.path().join("p.mcht");
    write_tensor(&t, &path).unwrap();
    let out = chhard(
        &[
            "analyze",
            "--tensor",
            path.to_str().unwrap(),
            "--order",
            "both_alternating",
            "--outputs",
            "curve,polstats",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stats = &json(&dir.path().join("summary.json"))["polstats"];
    assert_eq!(stats["samples"], 40 * 8 * g.pol_pairs.len());
    assert!((stats["std_db"].as_f64().unwrap() - 7.88).abs() < 0.5);
}

#[test]
fn data_and_invariant_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mcht");
    std::fs::write(&bad, b"NOPE0000000000000000000000000000").unwrap();
    let out = chhard(&["analyze", "--tensor", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad_magic"));

    let mut bytes = encode_tensor(&gen_iid_gaussian(1, 2, 2, 2, 1).unwrap());
    bytes[6..10].copy_from_slice(&0u32.to_le_bytes());
    let zero_k = dir.path().join("zero.mcht");
    std::fs::write(&zero_k, bytes).unwrap();
    let out = chhard(
        &["analyze", "--tensor", zero_k.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));

    let silent = ChannelTensor::from_fn(
        Dims::new(1, 3, 2, 2),
        TensorMeta::default(),
        |_, _, _, _| Complex64::new(0.0, 0.0),
    )
    .unwrap();
    let path = dir.path().join("silent.mcht");
    write_tensor(&silent, &path).unwrap();
    let out = chhard(&["analyze", "--tensor", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4));

    let out = chhard(
        &[
            "analyze",
            "--tensor",
            path.to_str().unwrap(),
            "--order",
            "vertical_only",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reproduce_fig5_and_fig8() {
    let dir = tempfile::tempdir().unwrap();
    let fig5 = dir.path().join("fig5");
    assert!(chhard(&["reproduce", "fig5"], &fig5).status.success());
    let surface = std::fs::read_to_string(fig5.join("surface.csv")).unwrap();
    assert!(surface.starts_with("m,P=1,P=3,P=10,P=30,P=100,P=inf\n1,0,0,0,0,0,0\n"));

    let fig8 = dir.path().join("fig8");
    let out = chhard(&["--seed", "5", "reproduce", "fig8"], &fig8);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = json(&fig8.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 4);
    let v = std::fs::read_to_string(fig8.join("vertical_only.csv")).unwrap();
    assert_eq!(v.lines().count(), 65);
}

#[test]
fn reproduce_small_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(
        &config,
        "users = 1\nfreqs = 9\n[trajectory]\nsnapshots = 40\n",
    )
    .unwrap();
    let out = chhard(
        &[
            "--seed",
            "9",
            "reproduce",
            "fig15",
            "--runs",
            "2",
            "--config",
            config.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["run_seeds"].as_array().unwrap().len(), 2);
    let delta = std::fs::read_to_string(dir.path().join("omni_delta.csv")).unwrap();
    assert!(delta.starts_with("m,delta_db\n2,"));
    assert_eq!(delta.lines().count(), 128);
}

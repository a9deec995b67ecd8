use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn sss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sss-delta")).args(args).output().expect("spawn sss-delta")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sss-delta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn empty_scene_finds_path() {
    let out = sss(&["--scene", &fixture("empty.scene.json"), "--config", &fixture("empty.config.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "PATH");
    assert!(v["path"].as_array().unwrap().len() >= 2);
}

#[test]
fn gap_writes_outputs() {
    let (res, dump, obj) = (scratch("gap.json"), scratch("gap.jsonl"), scratch("gap.obj"));
    let out = sss(&[
        "--scene",
        &fixture("wall_gap_0.1.scene.json"),
        "--config",
        &fixture("wall_0.1.config.json"),
        "--strategy",
        "gbf",
        "--audit",
        "--out",
        res.to_str().unwrap(),
        "--dump-subdivision",
        dump.to_str().unwrap(),
        "--export-obj",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    assert_eq!(v["verdict"], "PATH");
    let lines = std::fs::read_to_string(&dump).unwrap();
    assert!(lines.lines().count() > 1);
    for l in lines.lines() {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }
    assert!(std::fs::read_to_string(&obj).unwrap().lines().any(|l| l.starts_with("v ")));
}

#[test]
fn sealed_wall_exits_two() {
    let out = sss(&[
        "--scene",
        &fixture("wall_sealed_0.1.scene.json"),
        "--config",
        &fixture("wall_0.1.config.json"),
        "--max-rot-depth",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "NO-PATH");
    assert!(String::from_utf8_lossy(&out.stderr).contains("NO-PATH"));
}

#[test]
fn missing_file_exits_one() {
    let out = sss(&["--scene", &fixture("no_such.scene.json"), "--config", &fixture("empty.config.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such.scene.json"));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(sss(&["--scene"]).status.code(), Some(1));
    let out = sss(&[
        "--scene",
        &fixture("empty.scene.json"),
        "--config",
        &fixture("empty.config.json"),
        "--epsilon",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

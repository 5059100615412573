use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_langinduct");

const SMALL: &str = "\
# small enough for a test run
steps = 200
chains = 2
top_n = 5
n_sim = 128
eval_n_sim = 256
schedule = 1,3
";

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.conf");
    std::fs::write(&config, SMALL).unwrap();
    let config = config.to_str().unwrap();
    for cmd in [
        &["induce"][..],
        &["curve", "--set", "language=abn"],
        &["experiment", "infinite"],
    ] {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{}-{rep}", cmd[0]));
            let mut args = vec!["--config", config, "--seed", "5", "--out", out.to_str().unwrap()];
            args.extend_from_slice(cmd);
            let o = run(&args);
            assert!(o.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
            outputs.push(files(&out));
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{cmd:?}");
    }
}

#[test]
fn seed_changes_output_and_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let mut stores = Vec::new();
    for seed in ["1", "2"] {
        let out = tmp.path().join(seed);
        let o = run(&[
            "induce",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
            "-s",
            "steps=100",
            "-s",
            "chains=1",
        ]);
        assert!(o.status.success());
        let text = std::fs::read_to_string(out.join("an-n10.store")).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(&format!("seed={seed}")));
        stores.push(text);
    }
    assert_ne!(stores[0], stores[1]);
}

#[test]
fn inspect_prints_ranked_hypotheses() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert!(run(&[
        "induce",
        "--out",
        out.to_str().unwrap(),
        "-s",
        "steps=100",
        "-s",
        "chains=1"
    ])
    .status
    .success());
    let o = run(&["inspect", out.join("an-n10.store").to_str().unwrap(), "--top", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("rank"));
    assert!(text.contains("   1 "));
    assert!(text.contains("F="));
}

#[test]
fn bad_input_fails_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    for args in [
        vec!["induce", "-s", "schedule=3,2"],
        vec!["induce", "-s", "language=gomez:99"],
        vec!["induce", "-s", "nonsense"],
        vec!["curve", "--config", "/definitely/missing.conf"],
        vec!["inspect", "/definitely/missing.store"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", out.to_str().unwrap()]);
        let o = run(&a);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn profile_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("p.conf");
    std::fs::write(&config, "profile = paper\nsteps = 50\nchains = 1\n").unwrap();
    let out = tmp.path().join("o");
    let o = run(&[
        "induce",
        "--config",
        config.to_str().unwrap(),
        "--profile",
        "desk",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out.join("an-n10.summary")).unwrap();
    assert!(summary.contains(" profile=desk "));
    assert!(summary.contains("store_entries = "));
}

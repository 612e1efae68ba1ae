use std::process::{Command, Output};

fn pwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwlab"))
        .args(args)
        .env_remove("PWLAB_TOL")
        .output()
        .expect("spawn pwlab")
}

fn stdout(args: &[&str]) -> String {
    let out = pwlab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn args_line(csv: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix("#args="))
        .expect("args metadata")
        .to_string()
}

#[test]
fn metadata_reproduces_table() {
    for args in [
        vec![
            "spectrum",
            "--wave",
            "s",
            "--sweep",
            "as-inv:-2:2:5",
            "--window",
            "-3:5",
        ],
        vec![
            "spectrum-edp",
            "--sweep",
            "depth:-2000:-1900:3",
            "--threads",
            "2",
        ],
        vec!["q2d", "--energy", "0.6,1.2", "--sweep", "apvol:0.5:8:4:log"],
    ] {
        let first = stdout(&args);
        let replay: Vec<String> = args_line(&first).split(' ').map(String::from).collect();
        let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
        assert_eq!(stdout(&replay), first, "{args:?}");
    }
}

#[test]
fn tolerance_from_env_and_flag() {
    let base = ["spectrum", "--sweep", "apvol-inv:1:1:1", "--window", "-2:3"];
    let env = Command::new(env!("CARGO_BIN_EXE_pwlab"))
        .args(base)
        .env("PWLAB_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&env.stdout).contains("#tol=1e-6"));

    let both = Command::new(env!("CARGO_BIN_EXE_pwlab"))
        .args(base)
        .args(["--tol", "1e-12"])
        .env("PWLAB_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&both.stdout).contains("#tol=1e-12"));
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("pwlab-out-{}.json", std::process::id()));
    let args = ["resonance", "--json"];
    let direct = stdout(&args);
    let p = path.to_str().unwrap();
    stdout(&["resonance", "--json", "--out", p]);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, direct);
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["columns"][0], "energy");
}

#[test]
fn exit_codes() {
    let usage = [
        vec!["spectrum", "--sweep", "apvol-inv:1:0:3"],
        vec!["spectrum", "--sweep", "depth:-10:-1:3"],
        vec![
            "spectrum",
            "--wave",
            "s",
            "--n",
            "5",
            "--sweep",
            "as-inv:0:1:2",
        ],
        vec![
            "spectrum",
            "--sweep",
            "apvol-inv:0:1:2",
            "--window",
            "-4:6",
            "--n",
            "10",
        ],
        vec!["spectrum-edp", "--sweep", "depth:5:10:2"],
        vec!["q2d", "--energy", "1.7", "--sweep", "apvol:1:2:2"],
        vec!["spectrum", "--sweep", "apvol-inv:0:1:2", "--tol", "-1"],
        vec!["no-such-command"],
    ];
    for args in usage {
        assert_eq!(pwlab(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(pwlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn threshold_depth_skips_fixed_rows() {
    let u = -pwlab_core::freescatter::bound_state_threshold(1, 0.05, 1).unwrap();
    let sweep = format!("depth:{u}:{u}:1");
    let out = stdout(&["spectrum-edp", "--sweep", &sweep, "--window", "-2:4"]);
    assert!(out.contains("#fixed_skipped_at_threshold="), "{out}");
    assert!(out.lines().any(|l| l.contains(",edp,")));
    assert!(!out.lines().any(|l| l.contains(",fixed,")));
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn pancake_sweep_at_unitarity_matches_library() {
    use pwlab_core::trapspec::solve_spectrum;
    use pwlab_core::{Channel, InteractionStrength, TrapGeometry};
    let out = stdout(&[
        "spectrum",
        "--wave",
        "p",
        "--n",
        "10",
        "--m",
        "1",
        "--sweep",
        "apvol-inv:-30:30:121",
        "--window",
        "-4:6",
    ]);
    let at_zero: Vec<f64> = rows(&out)
        .iter()
        .filter(|r| num(&r[0]) == 0.0)
        .map(|r| num(&r[2]))
        .collect();
    let want = solve_spectrum(
        &TrapGeometry::pancake(10).unwrap(),
        &InteractionStrength::FixedP {
            inverse_volume: 0.0,
        },
        Channel::P1,
        (-4.0, 6.0),
        20,
    )
    .unwrap()
    .energies();
    assert_eq!(at_zero.len(), want.len());
    for (g, w) in at_zero.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10, "{g} vs {w}");
    }
}

#[test]
fn weak_interaction_gives_oscillator_levels() {
    let out = stdout(&[
        "spectrum",
        "--wave",
        "p",
        "--n",
        "1",
        "--m",
        "0",
        "--sweep",
        "apvol-inv:1e9:1e9:1",
        "--window",
        "2:10",
    ]);
    let e: Vec<f64> = rows(&out).iter().map(|r| num(&r[2])).collect();
    assert_eq!(e.len(), 4);
    for (j, v) in e.iter().enumerate() {
        assert!((v - (2.5 + 2.0 * j as f64)).abs() < 1e-6, "{e:?}");
    }
}

#[test]
fn zero_depth_all_methods_agree() {
    let out = stdout(&["spectrum-edp", "--sweep", "depth:0:0:1", "--window", "-4:5"]);
    for method in ["edp", "fixed", "oracle"] {
        let e: Vec<f64> = rows(&out)
            .iter()
            .filter(|r| r[1] == method)
            .map(|r| num(&r[3]))
            .collect();
        assert_eq!(e.len(), 2, "{method}: {out}");
        assert!(
            (e[0] - 2.5).abs() < 1e-5 && (e[1] - 4.5).abs() < 1e-5,
            "{method}: {e:?}"
        );
    }
}

#[test]
fn forward_peak_near_threshold() {
    let out = stdout(&["q2d", "--energy", "0.5001", "--sweep", "apvol:1:12:1101"]);
    let peak = rows(&out)
        .iter()
        .max_by(|a, b| num(&a[3]).total_cmp(&num(&b[3])))
        .map(|r| num(&r[1]))
        .unwrap();
    assert!((peak - 5.4).abs() <= 0.1, "peak at {peak}");
}

#[test]
fn inset_flags_disappearance() {
    let out = stdout(&["q2d", "--inset", "--sweep", "energy:0.5001:0.524:50"]);
    assert!(out.contains("#divergence_crossed=true"), "{out}");
    let e_star = out
        .lines()
        .find_map(|l| l.strip_prefix("#disappearance_energy="))
        .map(num)
        .unwrap();
    assert!((e_star - 0.525).abs() < 0.02);
    // V_c grows without bound on the way to the disappearance energy
    let vc: Vec<f64> = rows(&out)
        .iter()
        .filter(|r| num(&r[0]) < e_star)
        .map(|r| num(&r[1]))
        .collect();
    assert!(
        vc.windows(2).all(|p| p[1] > p[0]) && vc.last().unwrap() > &100.0,
        "{vc:?}"
    );
}

#[test]
fn critical_volume_zeroes_cot() {
    let vc = pwlab_core::q2d::critical_volume(0.6).unwrap();
    let sweep = format!("apvol:{vc}:{vc}:1");
    let out = stdout(&["q2d", "--energy", "0.6", "--sweep", &sweep]);
    assert!(num(&rows(&out)[0][2]).abs() < 1e-8);
}

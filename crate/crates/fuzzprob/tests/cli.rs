//! End-to-end checks of the command-line surface: exit codes, seed
//! resolution, output routing, and the emitted CSV/SVG artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn fuzzprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzprob"))
        .args(args)
        .env_remove("FUZZPROB_SEED")
        .output()
        .expect("spawn fuzzprob")
}

fn fuzzprob_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fuzzprob"));
    cmd.args(args).env_remove("FUZZPROB_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn fuzzprob")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(fuzzprob(&["--help"]).status.code(), Some(0));
    assert_eq!(fuzzprob(&["--version"]).status.code(), Some(0));
    assert_eq!(fuzzprob(&["infer", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    // no subcommand
    assert_eq!(fuzzprob(&[]).status.code(), Some(1));
    // unknown flag
    assert_eq!(
        fuzzprob(&["infer", "--crisp", "1", "--bogus"])
            .status
            .code(),
        Some(1)
    );
    // missing required value
    assert_eq!(fuzzprob(&["compose"]).status.code(), Some(1));
    // unparsable enum value
    assert_eq!(
        fuzzprob(&["infer", "--crisp", "1", "--backend", "quantum"])
            .status
            .code(),
        Some(1)
    );
    // malformed instance spec is a usage error
    assert_eq!(
        fuzzprob(&["bench-convergence", "--instance", "garbage"])
            .status
            .code(),
        Some(1)
    );
    // bad seed in the environment
    let out = fuzzprob_with_env(
        &["infer", "--crisp", "1"],
        &[("FUZZPROB_SEED", "not-a-number")],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn data_errors_exit_two() {
    // nonexistent rules file
    assert_eq!(
        fuzzprob(&["infer", "--crisp", "1", "--rules", "/no/such/file.rules"])
            .status
            .code(),
        Some(2)
    );
    // malformed rules file (semantic error with a line number on stderr)
    let bad = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/malformed/08_rule_with_undeclared_set.rules");
    let out = fuzzprob(&["infer", "--crisp", "1", "--rules", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 5"), "stderr: {stderr}");
    assert!(stderr.contains("Foo"), "stderr: {stderr}");
    // wrong vector length for the input universe
    assert_eq!(
        fuzzprob(&["compose", "--x", "0.5,0.5"]).status.code(),
        Some(2)
    );
    // grade outside [0, 1]
    assert_eq!(
        fuzzprob(&["compose", "--x", "0,0,0,0,0,1.5,0,0,0,0,0"])
            .status
            .code(),
        Some(2)
    );
    // unstable plant discretization
    assert_eq!(
        fuzzprob(&["simulate", "--a", "1", "--dt", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_precedence_flag_then_env_then_zero() {
    let args = ["infer", "--crisp", "1.0"];
    let default = fuzzprob(&args);
    assert!(stdout_str(&default).starts_with("# seed=0\n"));

    let env = fuzzprob_with_env(&args, &[("FUZZPROB_SEED", "99")]);
    assert!(stdout_str(&env).starts_with("# seed=99\n"));

    let flag = fuzzprob_with_env(
        &["infer", "--crisp", "1.0", "--seed", "5"],
        &[("FUZZPROB_SEED", "99")],
    );
    assert!(stdout_str(&flag).starts_with("# seed=5\n"));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let args = [
        "simulate",
        "--steps",
        "10",
        "--backend",
        "stochastic",
        "--slots",
        "128",
        "--seed",
        "7",
    ];
    let streamed = fuzzprob(&args);
    assert_eq!(streamed.status.code(), Some(0));
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend_from_slice(&["--out", path.to_str().unwrap()]);
    assert_eq!(fuzzprob(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), streamed.stdout);
}

#[test]
fn exact_backends_ignore_the_seed_value() {
    let a = fuzzprob(&["infer", "--crisp", "1.3", "--seed", "1"]);
    let b = fuzzprob(&["infer", "--crisp", "1.3", "--seed", "2"]);
    // headers differ, payload does not
    let tail = |o: &Output| stdout_str(o).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(tail(&a), tail(&b));
}

#[test]
fn semantics_flag_switches_the_composition() {
    let mm = fuzzprob(&["compose", "--x", "0,0,0,0,0.5,0.8,0,0,0,0,0"]);
    let mp = fuzzprob(&[
        "compose",
        "--x",
        "0,0,0,0,0.5,0.8,0,0,0,0,0",
        "--semantics",
        "maxproduct",
    ]);
    assert_eq!(mm.status.code(), Some(0));
    assert_eq!(mp.status.code(), Some(0));
    assert_ne!(stdout_str(&mm), stdout_str(&mp));
}

#[test]
fn trace_csv_parses_back_with_identical_values() {
    let out = fuzzprob(&["simulate", "--steps", "25", "--seed", "3"]);
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# seed=3"));
    assert_eq!(
        lines.next(),
        Some("step,plant_state,error_input,control_output,backend_latency_samples")
    );
    let mut prev: Option<(f64, f64)> = None;
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0].parse::<usize>().unwrap(), k);
        let state: f64 = fields[1].parse().unwrap();
        let error: f64 = fields[2].parse().unwrap();
        let control: f64 = fields[3].parse().unwrap();
        assert_eq!(fields[4].parse::<usize>().unwrap(), 0);
        // re-render and compare: the 17-significant-digit format is lossless
        assert_eq!(format!("{state:.16e}"), fields[1]);
        assert!((error - (2.0 - state)).abs() < 1e-12);
        assert!((-5.0..=5.0).contains(&control));
        // the trace satisfies the plant recurrence (a = b = 1, dt = 0.1)
        if let Some((ps, pu)) = prev {
            let expected = ps + 0.1 * (-ps + pu);
            assert!((state - expected).abs() < 1e-12);
        }
        prev = Some((state, control));
    }
}

/// Minimal well-formedness scan: every opened tag closes in order.
fn assert_well_formed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        let end = rest.find('>').expect("unterminated tag");
        let tag = &rest[..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack
                .pop()
                .unwrap_or_else(|| panic!("stray closing tag {name}"));
            assert_eq!(open, name, "mismatched tags");
        } else if !tag.ends_with('/') {
            let name: String = tag.split_whitespace().next().unwrap().to_string();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

#[test]
fn bench_convergence_emits_parsable_csv_and_well_formed_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("plot.svg");
    let out = fuzzprob(&[
        "bench-convergence",
        "--n-grid",
        "256,1024,4096,16384",
        "--seeds-per-point",
        "31",
        "--seed",
        "11",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // CSV: parse rows back and check the stochastic series' log-log slope
    let text = stdout_str(&out);
    let mut rows: Vec<(String, usize, f64)> = Vec::new();
    for line in text.lines().skip(2) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "reference");
        rows.push((
            fields[1].to_string(),
            fields[2].parse().unwrap(),
            fields[4].parse().unwrap(),
        ));
    }
    assert_eq!(rows.len(), 2 * 4 * 31);
    let median = |backend: &str, n: usize| -> f64 {
        let mut errs: Vec<f64> = rows
            .iter()
            .filter(|(b, rn, _)| b == backend && *rn == n)
            .map(|(_, _, e)| *e)
            .collect();
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        errs[errs.len() / 2]
    };
    let ns = [256usize, 1024, 4096, 16384];
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| ((n as f64).ln(), median("stochastic-compose", n).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum::<f64>();
    assert!(
        (-0.65..=-0.35).contains(&slope),
        "stochastic series slope {slope}"
    );

    // SVG: well-formed, one polyline and one legend entry per backend
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_well_formed_xml(&svg);
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("data-backend=\"stochastic-compose\""));
    assert!(svg.contains("data-backend=\"mc-marginal\""));
    assert!(svg.contains("N (samples)"));
    assert!(svg.contains("L&#8734; error"));
}

#[test]
fn timing_flag_populates_wall_time() {
    let out = fuzzprob(&[
        "bench-convergence",
        "--n-grid",
        "256",
        "--seeds-per-point",
        "3",
        "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let any_nonzero = text
        .lines()
        .skip(2)
        .any(|l| l.split(',').nth(5).unwrap().parse::<u64>().unwrap() > 0);
    assert!(any_nonzero, "expected some nonzero wall_time_ns:\n{text}");
}

#[test]
fn random_instance_spec_is_honored() {
    let out = fuzzprob(&[
        "bench-convergence",
        "--instance",
        "random:4x6:9",
        "--backends",
        "mc-marginal",
        "--n-grid",
        "64",
        "--seeds-per-point",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("random-4x6-s9,mc-marginal,64,"), "{text}");
}

#[test]
fn rules_file_on_disk_matches_the_builtin_reference() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/reference.rules");
    let from_file = fuzzprob(&["infer", "--crisp", "0.7", "--rules", path.to_str().unwrap()]);
    let builtin = fuzzprob(&["infer", "--crisp", "0.7"]);
    assert_eq!(stdout_str(&from_file), stdout_str(&builtin));
}

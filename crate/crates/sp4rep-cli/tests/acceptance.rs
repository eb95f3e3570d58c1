//! Acceptance criteria 1-7, one PASS/FAIL line each.
//!
//! A criterion prints FAIL when any of its checks fails, including documented known deviations;
//! the process fails only on checks that are not known deviations or on a blown time budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use sp4rep::verify::{run_suite, Suite, SuiteReport, VerifyConfig};

struct Outcome {
    strict: bool,
    acceptable: bool,
    line: String,
}

fn suites_criterion(n: u32, what: &str, suites: &[Suite], budget: Duration) -> Outcome {
    let cfg = VerifyConfig::default();
    let t0 = Instant::now();
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, &cfg)).collect();
    let took = t0.elapsed();
    let checks: Vec<_> = reports.iter().flat_map(|r| r.checks.iter().map(move |c| (r.suite, c))).collect();
    let in_time = took <= budget;
    let strict = in_time && checks.iter().all(|(_, c)| c.passed);
    let acceptable = in_time && checks.iter().all(|(_, c)| c.acceptable());
    let mut line = format!(
        "criterion {n} [{what}]: {} ({} checks, {:.2?} of {:?} budget)",
        if strict { "PASS" } else { "FAIL" },
        checks.len(),
        took,
        budget
    );
    for (s, c) in checks.iter().filter(|(_, c)| !c.passed) {
        line.push_str(&format!(
            "\n    {}::{} residual {:e} > {:e}{}{}",
            s,
            c.name,
            c.residual,
            c.threshold,
            if c.known_deviation { " [known deviation]" } else { "" },
            c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
        ));
    }
    Outcome { strict, acceptable, line }
}

fn run_bin(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_sp4rep")).args(args).output().expect("run sp4rep");
    (out.status.code(), out.stdout)
}

fn cli_criterion() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["--element", "boost:0.1", "element", "--in", "0,0,0", "--out", "2,1,0"],
        &["--spin-x2", "1", "--element", "random:11:0.2", "block", "--l-in", "1", "--l-out", "2"],
        &["--element", "random:5:0.15", "--format", "csv", "block", "--l-in", "2", "--l-out", "2"],
        &["--element", "diag:0.8775825618903728,0.479425538604203/0.8775825618903728,-0.479425538604203", "--abel-t", "0.5", "--lmax", "30", "character"],
        &["verify", "all"],
    ];
    let mut problems = Vec::new();
    let mut verify_code = None;
    for args in runs {
        let (c1, o1) = run_bin(args);
        let (c2, o2) = run_bin(args);
        if o1 != o2 || c1 != c2 {
            problems.push(format!("output differs between runs of `{}`", args.join(" ")));
        }
        if o1.is_empty() {
            problems.push(format!("no output from `{}`", args.join(" ")));
        }
        if args[0] == "verify" {
            verify_code = c1;
        } else if c1 != Some(0) {
            problems.push(format!("`{}` exited with {c1:?}", args.join(" ")));
        }
    }
    if verify_code != Some(0) {
        problems.push(format!("`verify all` exited with {verify_code:?}"));
    }
    let ok = problems.is_empty();
    let mut line = format!("criterion 7 [cli determinism, verify all exits 0]: {}", if ok { "PASS" } else { "FAIL" });
    for p in problems {
        line.push_str(&format!("\n    {p}"));
    }
    Outcome { strict: ok, acceptable: ok, line }
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let outcomes = [
        suites_criterion(1, "quaternion and group algebra", &[Suite::Cquat, Suite::Sp4], s(5)),
        suites_criterion(2, "wigner, 3j and harmonics", &[Suite::Wigner, Suite::Harmonics], s(30)),
        suites_criterion(3, "gegenbauer determinant powers", &[Suite::Gegenbauer], s(20)),
        suites_criterion(4, "basis, kernel and monte carlo", &[Suite::Fockbasis], s(180)),
        suites_criterion(5, "matrix-element oracles", &[Suite::Elements], s(600)),
        suites_criterion(6, "characters", &[Suite::Characters], s(120)),
        cli_criterion(),
    ];
    for o in &outcomes {
        println!("{}", o.line);
    }
    let strict = outcomes.iter().filter(|o| o.strict).count();
    println!("acceptance: {strict}/{} criteria fully green", outcomes.len());
    if outcomes.iter().all(|o| o.acceptable) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! `sp4rep` command-line front end.
//!
//! Exit codes: 0 ok, 1 a verification check failed, 2 usage or config error, 3 non-convergence.

mod config;
mod error;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sp4rep::characters::{character, CharacterRequest};
use sp4rep::fockbasis::spin_level;
use sp4rep::matrix_elements::{is_b0, matrix_block, spin_element_with, Engine, Route};
use sp4rep::sp4::EigenQuadruple;
use sp4rep::verify::{run_suite, Suite, VerifyConfig};

use config::{parse_index, CliConfig, ElementSpec, Format, Overrides};
use error::CliError;
use output::{CharacterRecord, CheckRecord, ElementRecord, IndexRecord, Sink, CHARACTER_COLUMNS, ELEMENT_COLUMNS, VERIFY_COLUMNS};

#[derive(Debug, Parser)]
#[command(name = "sp4rep", version, about = "Matrix elements and characters of Sp(4,R) discrete-series representations")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    varsigma: Option<f64>,
    /// Twice the spin s.
    #[arg(long = "spin-x2", global = true)]
    spin_x2: Option<i32>,
    #[arg(long, global = true)]
    lmax: Option<i32>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long = "abel-t", global = true)]
    abel_t: Option<f64>,
    #[arg(long = "mc-samples", global = true)]
    mc_samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// identity | boost:T | random:SEED:TMAX | kak:PHI,W,X,Y,Z/T/PHI,W,X,Y,Z | diag:MU_RE,MU_IM/NU_RE,NU_IM | explicit:A/B
    #[arg(long, global = true, allow_hyphen_values = true)]
    element: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One matrix element <out| U(g) |in>.
    Element {
        /// l,k,m (s = 0) or l,k,J_x2,M_x2
        #[arg(long = "in")]
        in_idx: String,
        #[arg(long = "out")]
        out_idx: String,
    },
    /// Every element from degree l_in to degree l_out, one record per element.
    Block {
        #[arg(long = "l-in")]
        l_in: i32,
        #[arg(long = "l-out")]
        l_out: i32,
    },
    /// Abel-regularized partial sums of the character at the element's eigenvalues.
    Character,
    /// Run a verification suite: cquat, sp4, wigner, harmonics, gegenbauer, fockbasis, elements,
    /// characters or all.
    Verify { suite: String },
}

fn effective_config(g: &GlobalArgs) -> Result<CliConfig, CliError> {
    let mut cfg = CliConfig::default();
    if let Some(p) = &g.config {
        cfg.apply_file(p)?;
    }
    cfg.apply_overrides(&Overrides {
        varsigma: g.varsigma,
        s_x2: g.spin_x2,
        l_max: g.lmax,
        series_tol: g.tol,
        abel_t: g.abel_t,
        mc_samples: g.mc_samples,
        seed: g.seed,
        element: g.element.clone(),
        format: g.format,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_element<W: Write>(cfg: &CliConfig, in_s: &str, out_s: &str, out: W) -> Result<u8, CliError> {
    let rep = cfg.rep()?;
    let trunc = cfg.truncation()?;
    let g = ElementSpec::parse(&cfg.element)?.build()?;
    let i = parse_index(in_s, &rep)?;
    let o = parse_index(out_s, &rep)?;
    if !is_b0(&g) && o.l > trunc.l_max {
        return Err(CliError::Config(format!("output degree {} exceeds l_max = {}", o.l, trunc.l_max)));
    }
    let engine = Engine::new(&g, o.l.max(0))?;
    let v = spin_element_with(&engine, &rep, &i, &o)?;
    let mut sink = Sink::new(cfg.format, out, &ELEMENT_COLUMNS)?;
    sink.element(&ElementRecord {
        command: "element",
        in_idx: IndexRecord::from(&i),
        out_idx: IndexRecord::from(&o),
        value_re: v.value.re,
        value_im: v.value.im,
        value: v.value.into(),
        tail_estimate: v.tail_estimate,
        l_max_used: v.l_max_used,
        route: v.route.as_str(),
        config: cfg,
    })?;
    sink.finish()?;
    Ok(if v.tail_estimate <= trunc.series_tol { 0 } else { 3 })
}

fn cmd_block<W: Write>(cfg: &CliConfig, l_in: i32, l_out: i32, out: W) -> Result<u8, CliError> {
    let rep = cfg.rep()?;
    let trunc = cfg.truncation()?;
    let g = ElementSpec::parse(&cfg.element)?.build()?;
    let m = matrix_block(&rep, &g, l_in, l_out, &trunc)?;
    let route = if is_b0(&g) { Route::B0 } else { Route::Series };
    // both routes are exact finite sums up to the output degree
    let l_max_used = l_out;
    let ins = spin_level(rep.spin, l_in);
    let outs = spin_level(rep.spin, l_out);
    let mut sink = Sink::new(cfg.format, out, &ELEMENT_COLUMNS)?;
    // column-major: all outputs for the first input, then the next
    for (c, i) in ins.iter().enumerate() {
        for (r, o) in outs.iter().enumerate() {
            let v = m[(r, c)];
            sink.element(&ElementRecord {
                command: "block",
                in_idx: i.into(),
                out_idx: o.into(),
                value_re: v.re,
                value_im: v.im,
                value: v.into(),
                tail_estimate: 0.0,
                l_max_used,
                route: route.as_str(),
                config: cfg,
            })?;
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_character<W: Write>(cfg: &CliConfig, out: W) -> Result<u8, CliError> {
    let rep = cfg.rep()?;
    let trunc = cfg.truncation()?;
    let spec = ElementSpec::parse(&cfg.element)?;
    let eig = match spec {
        // the defining pair, not a reordering of it
        ElementSpec::Diag { mu, nu } => EigenQuadruple::new(mu, nu),
        _ => spec.build()?.eigenvalues(),
    };
    let res = character(&CharacterRequest::new(rep, eig, trunc)?);
    let mut sink = Sink::new(cfg.format, out, &CHARACTER_COLUMNS)?;
    sink.character(&CharacterRecord {
        command: "character",
        mu: eig.mu.into(),
        nu: eig.nu.into(),
        partial_sums: res.partial_sums.iter().map(|&z| z.into()).collect(),
        level_traces: res.level_traces.iter().map(|&z| z.into()).collect(),
        tail_estimate: res.tail_estimate,
        l_max_used: trunc.l_max,
        abel_t: trunc.abel_t,
        route: "diagonal",
        verdict: res.verdict.as_str(),
        config: cfg,
    })?;
    sink.finish()?;
    Ok(if res.verdict == sp4rep::characters::Verdict::Converged { 0 } else { 3 })
}

fn cmd_verify<W: Write>(cfg: &CliConfig, suite: &str, out: W) -> Result<u8, CliError> {
    let suites = Suite::parse_selection(suite)?;
    let vc = VerifyConfig { seed: cfg.seed, mc_samples: cfg.mc_samples };
    let mut sink = Sink::new(cfg.format, out, &VERIFY_COLUMNS)?;
    let mut ok = true;
    for s in suites {
        let rep = run_suite(s, &vc);
        for c in &rep.checks {
            sink.check(&CheckRecord {
                command: "verify",
                suite: s.name().into(),
                check: c.name.clone(),
                residual: c.residual,
                threshold: c.threshold,
                passed: c.passed,
                known_deviation: c.known_deviation,
                detail: c.detail.clone(),
                config: cfg,
            })?;
        }
        let failed = rep.checks.iter().filter(|c| !c.acceptable()).count();
        sink.check(&CheckRecord {
            command: "verify",
            suite: s.name().into(),
            check: "summary".into(),
            residual: failed as f64,
            threshold: 0.0,
            passed: rep.passed(),
            known_deviation: false,
            detail: Some(format!("{} checks, {failed} failed", rep.checks.len())),
            config: cfg,
        })?;
        ok &= rep.passed();
    }
    sink.finish()?;
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = effective_config(&cli.global)?;
    let out = io::stdout().lock();
    match &cli.command {
        Command::Element { in_idx, out_idx } => cmd_element(&cfg, in_idx, out_idx, out),
        Command::Block { l_in, l_out } => cmd_block(&cfg, *l_in, *l_out, out),
        Command::Character => cmd_character(&cfg, out),
        Command::Verify { suite } => cmd_verify(&cfg, suite, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

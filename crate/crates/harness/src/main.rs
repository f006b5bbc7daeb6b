use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cz_core::czrf::cz_decompose;
use cz_core::maximal::{hl_maximal, lr_maximal, power_maximal, sharp_maximal, sharp_power};
use cz_core::orlicz::{luxemburg_norm, orlicz_maximal, DEFAULT_NORM_TOL};
use cz_core::singular::{hilbert, make_symbol, multilinear_commutator, SymbolKind};
use cz_core::weights::{make_weight, reverse_holder_check, WeightKind, CALIBRATED_TAU};
use cz_core::{GridFunction, IntervalMode, UniformGrid1D, YoungSpec};
use cz_harness::lemmas::{sample_lemma, ScalarLemma};
use cz_harness::{sweep, verify, Axis, ExperimentConfig, HarnessError, Result, Theorem};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cz", about = "Weighted Calderón–Zygmund workbench", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Phi,
    Psi,
    X,
    Xtilde,
    Power,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AllIntervals,
    Dyadic,
}

impl From<ModeArg> for IntervalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AllIntervals => IntervalMode::AllIntervals,
            ModeArg::Dyadic => IntervalMode::Dyadic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MaximalOp {
    Hl,
    Power,
    Sharp,
    Lr,
    Orlicz,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApplyOp {
    Hilbert,
    Commutator,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Constant,
    Step,
    Power,
    Loglike,
    RandomAinf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a Young function at t.
    Eval {
        #[arg(long, value_enum)]
        family: Family,
        /// ρ for phi, x and xtilde
        #[arg(long)]
        rho: Option<f64>,
        /// s for psi
        #[arg(long)]
        s: Option<f64>,
        /// r for power
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: f64,
    },
    /// Sample a scalar composition bound and print pass/fail counts.
    Check {
        #[arg(value_enum)]
        lemma: ScalarLemma,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Luxemburg norm of a CSV function over an interval.
    Norm {
        /// rho=ρ, s=s, x=ρ, xtilde=ρ, power=r or identity
        #[arg(long)]
        phi: String,
        #[arg(long)]
        input: PathBuf,
        /// lo,hi in domain coordinates
        #[arg(long, value_parser = parse_pair)]
        interval: (f64, f64),
    },
    /// Apply a maximal operator to a CSV function.
    Maximal {
        #[arg(long, value_enum)]
        op: MaximalOp,
        /// δ for sharp (omit for the plain sharp function)
        #[arg(long)]
        delta: Option<f64>,
        /// ε for power
        #[arg(long)]
        eps: Option<f64>,
        /// r for lr
        #[arg(long)]
        r: Option<f64>,
        /// Young function for orlicz, same syntax as `norm --phi`
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weight constants of a generated weight.
    Weights {
        #[arg(long, value_enum)]
        kind: WeightArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        /// a,b domain
        #[arg(long, value_parser = parse_pair, default_value = "-2,2")]
        domain: (f64, f64),
        #[arg(long, default_value_t = 9)]
        levels: u32,
        /// exponents for A_p
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        p: Vec<f64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply the Hilbert transform or a commutator to a CSV function.
    Apply {
        #[arg(long, value_enum)]
        op: ApplyOp,
        /// log, step-bmo, constant=c, abslog-power=s or random-bmo=seed; repeat for several symbols
        #[arg(long)]
        symbol: Vec<String>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Calderón–Zygmund decomposition of a CSV function at height λ.
    Decompose {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "cz_")]
        out_prefix: String,
    },
    /// Evaluate both sides of an inequality for a configuration.
    Verify {
        #[arg(long)]
        theorem: Option<Theorem>,
        #[arg(long)]
        config: PathBuf,
        /// report JSON; the CSV goes beside it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter axis of a configuration.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_young(s: &str) -> Result<YoungSpec> {
    if s == "identity" {
        return Ok(YoungSpec::identity());
    }
    let (name, v) = s.split_once('=').ok_or_else(|| HarnessError::Config(format!("bad Young function {s:?}")))?;
    let v: f64 = v.trim().parse().map_err(|e| HarnessError::Config(format!("bad parameter in {s:?}: {e}")))?;
    Ok(match name.trim() {
        "rho" => YoungSpec::phi(v)?,
        "s" => YoungSpec::psi(v)?,
        "x" => YoungSpec::x_rho(v)?,
        "xtilde" => YoungSpec::x_tilde(v)?,
        "power" => YoungSpec::power(v)?,
        other => return Err(HarnessError::Config(format!("unknown Young family {other:?}"))),
    })
}

fn parse_symbol(s: &str) -> Result<SymbolKind> {
    let bad = |e: String| HarnessError::Config(format!("bad symbol {s:?}: {e}"));
    let (name, v) = match s.split_once('=') {
        Some((n, v)) => (n, Some(v)),
        None => (s, None),
    };
    let num = || -> Result<f64> {
        v.ok_or_else(|| bad("missing parameter".into()))?.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))
    };
    Ok(match name {
        "log" => SymbolKind::Log,
        "step-bmo" => SymbolKind::StepBmo,
        "constant" => SymbolKind::Constant { value: num()? },
        "abslog-power" => SymbolKind::AbslogPower { s: num()? },
        "random-bmo" => SymbolKind::RandomBmo { seed: num()? as u64 },
        other => return Err(bad(format!("unknown kind {other:?}"))),
    })
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| HarnessError::Config(format!("--{name} is required")))
}

fn read_input(path: &Path) -> Result<GridFunction> {
    let file = File::open(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(GridFunction::read_csv(file)?)
}

fn write_output(f: &GridFunction, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(f.write_csv(file)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

/// `Ok(true)` when every contract held.
fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Eval { family, rho, s, r, t } => {
            let spec = match family {
                Family::Phi => YoungSpec::phi(need(rho, "rho")?)?,
                Family::Psi => YoungSpec::psi(need(s, "s")?)?,
                Family::X => YoungSpec::x_rho(need(rho, "rho")?)?,
                Family::Xtilde => YoungSpec::x_tilde(need(rho, "rho")?)?,
                Family::Power => YoungSpec::power(need(r, "r")?)?,
                Family::Identity => YoungSpec::identity(),
            };
            println!("{}", spec.evaluate(t)?);
            Ok(true)
        }
        Cmd::Check { lemma, samples, seed } => {
            let tally = sample_lemma(lemma, samples, seed)?;
            println!("samples {} pass {} fail {}", tally.samples, tally.pass, tally.fail);
            for (t, rho) in &tally.failures {
                println!("  failure at t = {t}, rho = {rho}");
            }
            Ok(tally.fail == 0)
        }
        Cmd::Norm { phi, input, interval } => {
            let spec = parse_young(&phi)?;
            let f = read_input(&input)?;
            let q = f.grid().cells_in(interval.0, interval.1);
            if q.is_empty() {
                return Err(HarnessError::Config(format!("interval {interval:?} contains no cell")));
            }
            println!("{}", luxemburg_norm(&f, q, &spec, DEFAULT_NORM_TOL)?);
            Ok(true)
        }
        Cmd::Maximal { op, delta, eps, r, phi, mode, input, out } => {
            let f = read_input(&input)?;
            let mode = mode.map(IntervalMode::from).unwrap_or_else(|| IntervalMode::default_for(f.len()));
            let g = match op {
                MaximalOp::Hl => hl_maximal(&f, mode),
                MaximalOp::Power => power_maximal(&f, need(eps, "eps")?, mode)?,
                MaximalOp::Sharp => match delta {
                    Some(d) => sharp_power(&f, d, mode)?,
                    None => sharp_maximal(&f, mode),
                },
                MaximalOp::Lr => lr_maximal(&f, need(r, "r")?, mode)?,
                MaximalOp::Orlicz => {
                    let spec = parse_young(phi.as_deref().ok_or_else(|| HarnessError::Config("--phi is required".into()))?)?;
                    orlicz_maximal(&f, &spec, mode)?
                }
            };
            write_output(&g, &out)?;
            Ok(true)
        }
        Cmd::Weights { kind, alpha, seed, bound, domain, levels, p, mode, report } => {
            let kind = match kind {
                WeightArg::Constant => WeightKind::Constant,
                WeightArg::Step => WeightKind::Step,
                WeightArg::Power => WeightKind::Power { alpha: need(alpha, "alpha")? },
                WeightArg::Loglike => WeightKind::Loglike,
                WeightArg::RandomAinf => WeightKind::RandomAinf { seed, bound },
            };
            let grid = UniformGrid1D::with_levels(domain.0, domain.1, levels)?;
            let mode = mode.map(IntervalMode::from).unwrap_or_else(|| IntervalMode::default_for(grid.len()));
            let w = make_weight(&kind, grid)?;
            let ap = p.iter().map(|p| Ok((p.to_string(), json!(w.ap(*p)?)))).collect::<Result<serde_json::Map<_, _>>>()?;
            let rh = reverse_holder_check(&w, CALIBRATED_TAU, mode)?;
            let doc = json!({
                "kind": kind.label(),
                "n": grid.len(),
                "mode": mode.label(),
                "a1": w.a1(),
                "ap": ap,
                "fujii": rh.fujii,
                "r_w": rh.r_w,
                "reverse_holder_ratio": rh.worst_ratio,
            });
            let text = serde_json::to_string_pretty(&doc)? + "\n";
            match report {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Apply { op, symbol, input, out } => {
            let f = read_input(&input)?;
            let g = match op {
                ApplyOp::Hilbert => hilbert(&f),
                ApplyOp::Commutator => {
                    if symbol.is_empty() {
                        return Err(HarnessError::Config("commutator needs at least one --symbol".into()));
                    }
                    let bs = symbol.iter().map(|s| Ok(make_symbol(&parse_symbol(s)?, *f.grid())?)).collect::<Result<Vec<_>>>()?;
                    multilinear_commutator(&bs.iter().collect::<Vec<_>>(), &f)?
                }
            };
            write_output(&g, &out)?;
            Ok(true)
        }
        Cmd::Decompose { lambda, input, out_prefix } => {
            let f = read_input(&input)?;
            let cz = cz_decompose(&f, lambda)?;
            let grid = *f.grid();
            let abs = f.abs();
            let cubes: Vec<serde_json::Value> = cz
                .cubes
                .iter()
                .map(|q| {
                    let cells = q.cells(&grid).expect("cube lies in the grid");
                    let (lo, hi) = q.bounds(&grid);
                    json!({
                        "gen": q.gen,
                        "idx": q.idx,
                        "cells": [cells.start, cells.end],
                        "bounds": [lo, hi],
                        "average": abs.average_over(cells),
                    })
                })
                .collect();
            let doc = json!({ "lambda": lambda, "cubes": cubes });
            write_text(Path::new(&format!("{out_prefix}cubes.json")), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            write_output(&cz.good, Path::new(&format!("{out_prefix}good.csv")))?;
            for (j, b) in cz.bad.iter().enumerate() {
                write_output(&b.to_grid_function(grid), Path::new(&format!("{out_prefix}bad_{j}.csv")))?;
            }
            println!("{} cubes", cz.cubes.len());
            Ok(true)
        }
        Cmd::Verify { theorem, config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(t) = theorem {
                cfg.theorem = t;
            }
            let report = verify(&cfg)?;
            let out = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
            match out {
                Some(path) => {
                    write_text(&path, &report.to_json())?;
                    let csv_path = path.with_extension("csv");
                    let file = File::create(&csv_path).map_err(|e| HarnessError::Io(format!("{}: {e}", csv_path.display())))?;
                    report.write_csv(file)?;
                }
                None => print!("{}", report.to_json()),
            }
            for c in &report.contracts {
                eprintln!("{} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            eprintln!("max implied constant {}", report.aggregate.max_implied_constant);
            Ok(report.all_hold)
        }
        Cmd::Sweep { axis, config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = sweep(&cfg, axis)?;
            result.save(&out)?;
            for s in &result.slopes {
                eprintln!("slope {:.4} over {} points: {}", s.slope, s.points, s.label);
            }
            if let Some(d) = result.drift {
                eprintln!("resolution drift {d:.4}");
            }
            Ok(result.all_hold)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line dispatch behind the `noetherq` binary.
//!
//! Exit codes: 0 when every checked equivalence is consistent, 2 when a
//! verdict is inconsistent, 1 on input errors.

pub mod format;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::channels::{positivity_profile, stinespring_dilation, KPositivity, Picture};
use crate::classical::{
    classical_noether_continuous, classical_noether_discrete, counterexample_search_classical, embed_diagonal, validate_chain, ChainKind,
    Embedding, CONTINUOUS_CORRESPONDENCE, DISCRETE_CORRESPONDENCE,
};
use crate::fixed::{constants_scale, fixed_point_space, noether_discrete, noether_measurement, propagation_check};
use crate::linalg::{matrix_unit, OperatorExt};
use crate::semigroup::{
    conditional_expectation_check, constants_of_motion, ergodic_projection, evolve, growth_bound, noether_continuous, ErgodicInput,
    ErgodicMethod, ErgodicMode, ErgodicProjection, SemigroupSpec,
};
use crate::tol::DEFAULT_SEED;
use crate::{AnalysisOptions, Error, NoetherVerdict, Result, SuperOperator, Tolerances};
use format::{load_json, matrix_json, parse_chain, parse_channel, parse_classical_observable, parse_observable, parse_semigroup};
use report::{num, subspace_json, verdict_json, ReportDocument};

#[derive(Debug, Parser)]
#[command(name = "noetherq", version, about = "Fixed points, constants of motion and Noether-type equivalences for quantum and classical Markov dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Relative singular-value cutoff for kernels
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    /// Equality tolerance, scaled by max(1, norm)
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_eq: f64,
    /// Allowed negative eigenvalue for PSD checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_psd: f64,
    /// Seed for every sampled check
    #[arg(long, global = true, env = "NOETHERQ_SEED")]
    pub seed: Option<u64>,
    /// Emit canonical JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Comma-separated sample times
    #[arg(long, global = true, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Largest k for sampled k-positivity
    #[arg(long, global = true, default_value_t = 2)]
    pub kmax: usize,
    /// Random samples per sampled check
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Positivity profile, fixed-point structure and ergodic projection of a channel
    AnalyzeChannel {
        #[arg(long, alias = "channel")]
        file: PathBuf,
        /// Include subspace bases in the report
        #[arg(long)]
        bases: bool,
    },
    /// Discrete Noether verdicts for a channel and an observable
    Noether {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        observable: PathBuf,
    },
    /// Constants of motion of a Lindblad generator (or of a channel minus the identity)
    LindbladConstants {
        #[arg(long)]
        file: PathBuf,
        /// Also run the continuous Noether verdict for this observable
        #[arg(long)]
        observable: Option<PathBuf>,
        #[arg(long)]
        bases: bool,
    },
    /// Ergodic projection and conditional-expectation check
    Ergodic {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Discrete)]
        mode: ModeArg,
    },
    /// Classical Markov-chain Noether verdicts, or a counterexample search
    Classical {
        #[arg(long, required_unless_present = "search")]
        matrix: Option<PathBuf>,
        #[arg(long, required_unless_present = "search")]
        observable: Option<PathBuf>,
        /// Search for a chain with O conserved but not O², up to this many states
        #[arg(long, conflicts_with_all = ["matrix", "observable"])]
        search: Option<usize>,
    },
    /// Stinespring dilation of a Kraus channel
    Dilate {
        #[arg(long, alias = "channel")]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    pub command: Command,
    pub options: AnalysisOptions,
    pub format: OutputFormat,
}

impl AnalysisRequest {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let g = cli.global;
        let tol = Tolerances { rank_tol: g.tol_rank, eq_tol: g.tol_eq, psd_tol: g.tol_psd, ..Tolerances::default() };
        tol.validate()?;
        let mut options = AnalysisOptions { tol, seed: g.seed.unwrap_or(DEFAULT_SEED), samples: g.samples, k_max: g.kmax, ..Default::default() };
        if let Some(times) = g.times {
            if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::Input("--times must be a non-empty list of nonnegative numbers".into()));
            }
            options.times = times;
        }
        let format = if g.json { OutputFormat::Json } else { OutputFormat::Text };
        Ok(Self { command: cli.command, options, format })
    }

    fn echo(&self) -> Value {
        let o = &self.options;
        let files: Value = match &self.command {
            Command::AnalyzeChannel { file, .. } | Command::Dilate { file } => json!({"file": file.display().to_string()}),
            Command::Noether { channel, observable } => {
                json!({"channel": channel.display().to_string(), "observable": observable.display().to_string()})
            }
            Command::LindbladConstants { file, observable, .. } => {
                json!({"file": file.display().to_string(), "observable": observable.as_ref().map(|p| p.display().to_string())})
            }
            Command::Ergodic { file, mode } => json!({"file": file.display().to_string(), "mode": mode_name(*mode)}),
            Command::Classical { matrix, observable, search } => json!({
                "matrix": matrix.as_ref().map(|p| p.display().to_string()),
                "observable": observable.as_ref().map(|p| p.display().to_string()),
                "search": search,
            }),
        };
        json!({
            "inputs": files,
            "tolerances": {"rank_tol": num(o.tol.rank_tol), "eq_tol": num(o.tol.eq_tol), "psd_tol": num(o.tol.psd_tol)},
            "seed": o.seed,
            "samples": o.samples,
            "kmax": o.k_max,
            "times": o.times.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        })
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Discrete => "discrete",
        ModeArg::Continuous => "continuous",
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::AnalyzeChannel { .. } => "analyze-channel",
        Command::Noether { .. } => "noether",
        Command::LindbladConstants { .. } => "lindblad-constants",
        Command::Ergodic { .. } => "ergodic",
        Command::Classical { .. } => "classical",
        Command::Dilate { .. } => "dilate",
    }
}

fn path_label(p: &Path) -> String {
    p.display().to_string()
}

/// Runs a request; `Err` is an input error (exit code 1).
pub fn run(req: &AnalysisRequest) -> Result<ReportDocument> {
    let mut warnings = Vec::new();
    let (results, consistent) = match &req.command {
        Command::AnalyzeChannel { file, bases } => analyze_channel(file, *bases, &req.options, &mut warnings)?,
        Command::Noether { channel, observable } => noether(channel, observable, &req.options)?,
        Command::LindbladConstants { file, observable, bases } => lindblad_constants(file, observable.as_deref(), *bases, &req.options, &mut warnings)?,
        Command::Ergodic { file, mode } => ergodic(file, *mode, &req.options, &mut warnings)?,
        Command::Classical { matrix, observable, search } => classical(matrix.as_deref(), observable.as_deref(), *search, &req.options)?,
        Command::Dilate { file } => dilate(file, &req.options)?,
    };
    Ok(ReportDocument { command: command_name(&req.command).into(), request: req.echo(), results, warnings, consistent })
}

fn flags_json(s: &SuperOperator, tol: &Tolerances) -> Value {
    json!({
        "trace_preserving": s.is_trace_preserving(tol),
        "trace_preserving_residual": num(s.trace_preserving_residual()),
        "unital": s.is_unital(tol),
        "unital_residual": num(s.unital_residual()),
        "hermiticity_preserving": s.is_hermiticity_preserving(tol),
        "completely_positive": s.is_completely_positive(tol),
        "choi_min_eigenvalue": num(s.choi_min_eigenvalue()),
    })
}

fn kpos_json(p: &KPositivity) -> Value {
    match p {
        KPositivity::Violated { k, min_eigenvalue, canonical, .. } => {
            json!({"k": k, "violated": true, "min_eigenvalue": num(*min_eigenvalue), "canonical_witness": canonical})
        }
        KPositivity::NoViolationFound { k, samples, min_eigenvalue_seen } => {
            json!({"k": k, "violated": false, "samples": samples, "min_eigenvalue_seen": num(*min_eigenvalue_seen)})
        }
    }
}

fn ergodic_json(p: &ErgodicProjection, tol: &Tolerances) -> Value {
    let m = p.projection.matrix();
    let method = match p.method {
        ErgodicMethod::Squaring { squarings } => json!({"kind": "squaring", "squarings": squarings}),
        ErgodicMethod::Cesaro { terms } => json!({"kind": "cesaro", "terms": terms}),
        ErgodicMethod::Spectral => json!({"kind": "spectral"}),
    };
    json!({
        "method": method,
        "spectral_gap": num(p.spectral_gap),
        "idempotency_residual": num((m * m - m).norm()),
        "unital_residual": num(p.projection.unital_residual()),
        "choi_min_eigenvalue": num(p.projection.choi_min_eigenvalue()),
        "range_dim": fixed_point_space(&p.projection, tol).len(),
        "time_average_residual": p.time_average_residual.map(num),
    })
}

fn analyze_channel(file: &Path, bases: bool, opts: &AnalysisOptions, warnings: &mut Vec<String>) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    let ch = parse_channel(&load_json(file)?, &path_label(file), tol)?;
    let s = &ch.superop;
    let profile = positivity_profile(s, opts.k_max, opts.samples, tol, opts.seed);
    let mut results = json!({
        "dim": ch.dim,
        "picture": ch.picture.as_str(),
        "flags": flags_json(s, tol),
        "k_positivity": profile.k_positivity.iter().map(kpos_json).collect::<Vec<_>>(),
    });
    let mut consistent = true;
    if !profile.completely_positive {
        let fix = fixed_point_space(s, tol);
        results["fixed_points"] = subspace_json(&fix, bases);
        results["structure"] = Value::Null;
        warnings.push("map is not completely positive: fixed-point structure theorems do not apply; only the fixed-point space is reported".into());
        if profile.positive_on_samples() {
            warnings.push(format!("positivity is inconclusive: no violation in {} samples per k", opts.samples));
        }
        return Ok((results, consistent));
    }
    let heis = ch.in_picture(Picture::Heisenberg, tol)?;
    let rep = constants_scale(&heis, tol)?;
    for w in rep.fix.warnings().into_iter().chain(rep.mult_domain.warnings()) {
        warnings.push(w);
    }
    let erg = ergodic_projection(ErgodicInput::Channel(&heis), ErgodicMode::Discrete, tol)?;
    let ce = conditional_expectation_check(&erg.projection, tol)?;
    let structure_ok = rep.consistent();
    let ce_ok = ce.passes == rep.fix_is_algebra;
    consistent &= structure_ok && ce_ok;
    results["structure"] = json!({
        "fix": subspace_json(&rep.fix, bases),
        "mult_domain": subspace_json(&rep.mult_domain, bases),
        "bimodule": subspace_json(&rep.bimodule, bases),
        "constants2": subspace_json(&rep.constants2, bases),
        "fix_is_algebra": rep.fix_is_algebra,
        "witnesses": rep.witnesses.iter().map(|w| json!({
            "a": matrix_json(w),
            "a_squared": matrix_json(&(w * w)),
            "phi_of_a_squared": matrix_json(&heis.apply(&(w * w)).expect("dims agree")),
        })).collect::<Vec<_>>(),
        "constants2_bimodule_distance": num(rep.constants2_bimodule_distance),
        "constants2_closure_residual": num(rep.constants2_closure_residual),
        "identities_hold": structure_ok,
    });
    results["ergodic"] = ergodic_json(&erg, tol);
    results["conditional_expectation"] = json!({
        "passes": ce.passes,
        "max_residual": num(ce.max_residual),
        "range_is_algebra": ce.range_is_algebra,
        "witness": ce.witness.as_ref().map(matrix_json),
        "agrees_with_fixed_space": ce_ok,
    });
    if let Some(k) = &ch.kraus {
        match stinespring_dilation(k, tol) {
            Ok(st) => {
                results["stinespring"] = json!({
                    "environment_dim": st.dims.1,
                    "reconstruction_error": num(st.reconstruction_error(k)),
                    "contraction_margin": num(st.contraction_margin()),
                });
            }
            Err(e) => warnings.push(format!("no Stinespring dilation: {e}")),
        }
    }
    Ok((results, consistent))
}

fn noether(channel: &Path, observable: &Path, opts: &AnalysisOptions) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    let ch = parse_channel(&load_json(channel)?, &path_label(channel), tol)?;
    let a = parse_observable(&load_json(observable)?, &path_label(observable))?;
    crate::linalg::ensure_dim(&a, ch.dim)?;
    let schr = ch.in_picture(Picture::Schrodinger, tol)?;
    let discrete = noether_discrete(&schr, &a, opts)?;
    let mut consistent = discrete.consistent;
    let mut results = json!({"dim": ch.dim, "discrete": verdict_json(&discrete)});
    if a.is_psd(tol.eq_tol, tol.psd_tol) {
        let m = noether_measurement(&schr, &a, opts)?;
        consistent &= m.consistent;
        results["measurement"] = verdict_json(&m);
    } else {
        results["measurement"] = Value::Null;
    }
    if schr.cp(tol) {
        let heis = ch.in_picture(Picture::Heisenberg, tol)?;
        let p = propagation_check(&heis, &a, tol)?;
        consistent &= p.consistent;
        results["propagation"] = verdict_json(&p);
    } else {
        results["propagation"] = Value::Null;
    }
    Ok((results, consistent))
}

fn lindblad_constants(file: &Path, observable: Option<&Path>, bases: bool, opts: &AnalysisOptions, warnings: &mut Vec<String>) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    let spec = parse_semigroup(&load_json(file)?, &path_label(file), tol)?.with_times(opts.times.clone());
    let com = constants_of_motion(&spec, opts)?;
    warnings.extend(com.subspace.warnings());
    let schr_spec: SemigroupSpec = if spec.picture() == Picture::Schrodinger { spec.clone() } else { spec.dual(tol)? };
    let mut evolution = Vec::new();
    let mut evolution_ok = true;
    for &t in &opts.times {
        let e = evolve(&schr_spec, t)?;
        let tp = e.trace_preserving_residual();
        let choi = e.choi_min_eigenvalue();
        let cptp = tp <= 10.0 * tol.eq_tol && choi >= -10.0 * tol.psd_tol;
        if spec.is_cp(tol) {
            evolution_ok &= cptp;
        }
        evolution.push(json!({"t": num(t), "trace_preserving_residual": num(tp), "choi_min_eigenvalue": num(choi), "cptp": cptp}));
    }
    let kernel_ok = com.time_checks.iter().all(|&(_, d)| d <= 1e-8) && com.stationarity_residual <= 10.0 * tol.rank_tol.max(tol.eq_tol);
    let mut consistent = kernel_ok && evolution_ok;
    let mut results = json!({
        "dim": spec.dim(),
        "picture": spec.picture().as_str(),
        "generator": match spec.generator { crate::semigroup::Generator::Lindblad(_) => "lindblad", _ => "channel_minus_id" },
        "growth_bound": num(growth_bound(&spec)?),
        "constants": subspace_json(&com.subspace, bases),
        "stationarity_residual": num(com.stationarity_residual),
        "fixed_space_distance": com.time_checks.iter().map(|&(t, d)| json!({"t": num(t), "distance": num(d)})).collect::<Vec<_>>(),
        "evolution": evolution,
        "constants_is_algebra": com.subspace.is_algebra(),
    });
    if let Some(path) = observable {
        let a = parse_observable(&load_json(path)?, &path_label(path))?;
        crate::linalg::ensure_dim(&a, spec.dim())?;
        let v = noether_continuous(&spec, &a, opts)?;
        consistent &= v.consistent;
        results["noether"] = verdict_json(&v);
    }
    Ok((results, consistent))
}

fn ergodic(file: &Path, mode: ModeArg, opts: &AnalysisOptions, warnings: &mut Vec<String>) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    let v = load_json(file)?;
    let label = path_label(file);
    let is_channel = v.get("kraus").is_some() || v.get("luders").is_some() || v.get("mixture").is_some();
    let mode = if mode == ModeArg::Discrete { ErgodicMode::Discrete } else { ErgodicMode::Continuous };
    let (erg, joint_fix, cp) = if is_channel {
        let heis = parse_channel(&v, &label, tol)?.in_picture(Picture::Heisenberg, tol)?;
        let fix = fixed_point_space(&heis, tol);
        let cp = heis.is_completely_positive(tol);
        (ergodic_projection(ErgodicInput::Channel(&heis), mode, tol)?, fix, cp)
    } else {
        let spec = parse_semigroup(&v, &label, tol)?;
        let com = constants_of_motion(&spec, opts)?;
        (ergodic_projection(ErgodicInput::Semigroup(&spec), mode, tol)?, com.subspace, spec.is_cp(tol))
    };
    if !cp {
        warnings.push("map is not completely positive: the projection's Choi positivity and the conditional-expectation equivalence are reported but not checked".into());
    }
    let ce = conditional_expectation_check(&erg.projection, tol)?;
    let range = &ce.range;
    let range_distance = range.distance(&joint_fix);
    let m = erg.projection.matrix();
    let checks_ok = (m * m - m).norm() <= 1e-8
        && erg.projection.unital_residual() <= 1e-8
        && (!cp || erg.projection.choi_min_eigenvalue() >= -1e-8)
        && range_distance <= 1e-8;
    let ce_ok = !cp || ce.passes == joint_fix.is_algebra();
    let results = json!({
        "projection": ergodic_json(&erg, tol),
        "range_fixed_space_distance": num(range_distance),
        "fixed_space_is_algebra": joint_fix.is_algebra(),
        "conditional_expectation": {
            "passes": ce.passes,
            "max_residual": num(ce.max_residual),
            "witness": ce.witness.as_ref().map(matrix_json),
        },
        "projection_checks_pass": checks_ok,
        "completely_positive": cp,
    });
    Ok((results, checks_ok && ce_ok))
}

fn agreement(classical: &NoetherVerdict, quantum: &NoetherVerdict, pairs: &[(&str, &str)]) -> (Value, bool) {
    let mut all = true;
    let rows: Vec<Value> = pairs
        .iter()
        .map(|(cn, qn)| {
            let (c, q) = (classical.holds(cn), quantum.holds(qn));
            all &= c == q;
            json!({"classical": cn, "quantum": qn, "classical_holds": c, "quantum_holds": q})
        })
        .collect();
    (json!({"pairs": rows, "agree": all}), all)
}

fn classical(matrix: Option<&Path>, observable: Option<&Path>, search: Option<usize>, opts: &AnalysisOptions) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    if let Some(n_max) = search {
        let ce = counterexample_search_classical(n_max, opts.seed, tol);
        let v = classical_noether_discrete(&ce.chain, &ce.observable, opts)?;
        let ok = v.consistent && v.holds("O conserved") && !v.holds("O^2 conserved");
        let results = json!({
            "search": {
                "n_max": n_max,
                "found_by_search": ce.found_by_search,
                "chain": format::chain_json(&ce.chain),
                "observable": ce.observable.values,
                "first_moment_residual": num(ce.first_moment_residual),
                "second_moment_residual": num(ce.second_moment_residual),
                "notes": ce.notes,
            },
            "verdict": verdict_json(&v),
        });
        return Ok((results, ok));
    }
    let (mp, op) = (matrix.expect("clap requires --matrix"), observable.expect("clap requires --observable"));
    let chain = parse_chain(&load_json(mp)?, &path_label(mp))?;
    let o = parse_classical_observable(&load_json(op)?, &path_label(op))?;
    if o.len() != chain.n_states() {
        return Err(Error::DimensionMismatch { expected: chain.n_states(), found: o.len() });
    }
    let report = validate_chain(&chain, tol)?;
    let a = o.to_operator();
    let (verdict, quantum, pairs): (NoetherVerdict, NoetherVerdict, &[(&str, &str)]) = match (chain.kind, embed_diagonal(&chain, tol)?) {
        (ChainKind::StochasticMatrix, Embedding::Channel(k)) => {
            (classical_noether_discrete(&chain, &o, opts)?, noether_discrete(&k.to_super(), &a, opts)?, &DISCRETE_CORRESPONDENCE)
        }
        (ChainKind::RateMatrix, Embedding::Semigroup(spec)) => {
            let spec = spec.with_times(opts.times.clone());
            (classical_noether_continuous(&chain, &o, opts)?, noether_continuous(&spec, &a, opts)?, &CONTINUOUS_CORRESPONDENCE)
        }
        _ => unreachable!("embedding kind follows chain kind"),
    };
    let (agree, agree_ok) = agreement(&verdict, &quantum, pairs);
    let results = json!({
        "chain": {
            "kind": report.kind.as_str(),
            "states": report.n_states,
            "max_column_sum_error": num(report.max_column_sum_error),
            "min_entry": num(report.min_entry),
        },
        "verdict": verdict_json(&verdict),
        "embedding_agreement": agree,
    });
    Ok((results, verdict.consistent && quantum.consistent && agree_ok))
}

fn dilate(file: &Path, opts: &AnalysisOptions) -> Result<(Value, bool)> {
    let tol = &opts.tol;
    let ch = parse_channel(&load_json(file)?, &path_label(file), tol)?;
    let k = ch.kraus.ok_or_else(|| Error::Input(format!("{}: dilation needs a Kraus or Lüders channel", file.display())))?;
    let st = stinespring_dilation(&k, tol)?;
    let err = st.reconstruction_error(&k);
    let margin = st.contraction_margin();
    let d = k.dim();
    let mut basis_errors = Vec::new();
    let heis = if k.picture() == Picture::Heisenberg { k.clone() } else { k.dual() };
    for i in 0..d {
        for j in 0..d {
            let e = matrix_unit(d, i, j);
            basis_errors.push(num((st.reconstruct(&e) - heis.apply(&e)?).norm()));
        }
    }
    let ok = err <= 1e-9 && margin >= -tol.psd_tol;
    let results = json!({
        "dim": d,
        "environment_dim": st.dims.1,
        "v": matrix_json(&st.v),
        "reconstruction_error": num(err),
        "basis_errors": basis_errors,
        "contraction_margin": num(margin),
        "co_contraction_margin": num(st.co_contraction_margin()),
        "isometry": k.normalization_residual() <= tol.eq_tol,
    });
    Ok((results, ok))
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let json_out = cli.global.json;
    let outcome = AnalysisRequest::from_cli(cli).and_then(|req| run(&req).map(|doc| (req, doc)));
    match outcome {
        Ok((req, doc)) => {
            let text = match req.format {
                OutputFormat::Json => doc.to_json_string() + "\n",
                OutputFormat::Text => doc.to_text(),
            };
            // a closed pipe is not an analysis failure
            let _ = std::io::stdout().write_all(text.as_bytes());
            doc.exit_code()
        }
        Err(e) => {
            if json_out {
                let doc = report::to_canonical_string(&json!({"error": e.to_string(), "exit_code": 1}));
                let _ = writeln!(std::io::stdout(), "{doc}");
            }
            eprintln!("error: {e}");
            1
        }
    }
}

//! Subcommand implementations. Each returns the text destined for standard
//! output, notes for standard error, and an exit code.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Map;

use polarforge::codec::{CodeConfig, CrcSpec, Pretransform};
use polarforge::construction::{
    compare_sets, construct, staircase_sweep, DegreeCap, DesignSpec, IndexCost, InformationSet,
    Strategy, SweepFamily,
};
use polarforge::monomial::{IndexSet, Monomial};
use polarforge::oracle::{run_oracle_checks_with, EnumerationBudget, OracleReport, OracleSuite};
use polarforge::reliability::{ChannelModel, GaVariant, TieBreak};
use polarforge::simulator::{run_bler, DecoderKind, SimConfig};
use polarforge::weight::{lambda_size, ml_negligibility_ratio, WeightReport};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::manifest::{
    load_config, resolve, resolve_seed, write_json, RunManifest, SCHEMA_VERSION,
};

/// What a subcommand produced.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: Cli) -> CliResult<Output> {
    match cli.command {
        Command::Construct(c) => cmd_construct(params(&c.args, c.config.as_deref(), "construct")?),
        Command::Analyze(c) => cmd_analyze(params(&c.args, c.config.as_deref(), "analyze")?),
        Command::Sweep(c) => cmd_sweep(params(&c.args, c.config.as_deref(), "sweep")?),
        Command::Simulate(c) => cmd_simulate(
            params(&c.args, c.config.as_deref(), "simulate")?,
            c.args.seed,
        ),
        Command::OracleCheck(c) => cmd_oracle_check(
            params(&c.args, c.config.as_deref(), "oracle-check")?,
            c.args.seed,
        ),
        Command::Compare(c) => cmd_compare(params(&c.args, c.config.as_deref(), "compare")?),
    }
}

fn params<T: Serialize + for<'de> Deserialize<'de>>(
    flags: &T,
    config: Option<&Path>,
    name: &str,
) -> CliResult<T> {
    let base = match config {
        Some(path) => load_config(path, name)?,
        None => Map::new(),
    };
    resolve(flags, base)
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| CliError::Usage(format!("missing required parameter `{name}`")))
}

fn ga_variant(kind: GaKind) -> GaVariant {
    match kind {
        GaKind::Exponential => GaVariant::Exponential,
        GaKind::Saturating => GaVariant::Saturating {
            cap: GaVariant::TABLE_CAP,
        },
        GaKind::TwoSegment => GaVariant::TwoSegment,
    }
}

fn channel_model(
    kind: ChannelKind,
    snr_db: Option<f64>,
    epsilon: Option<f64>,
    rate: f64,
) -> CliResult<ChannelModel> {
    Ok(match kind {
        ChannelKind::Awgn => ChannelModel::bi_awgn(required(&snr_db, "snr_db")?, rate)?,
        ChannelKind::Bec => ChannelModel::bec(required(&epsilon, "epsilon")?)?,
    })
}

fn log2_exact(n: usize) -> CliResult<u32> {
    if n < 2 || !n.is_power_of_two() {
        return Err(CliError::Usage(format!(
            "n = {n} is not a power of two ≥ 2"
        )));
    }
    Ok(n.trailing_zeros())
}

/// Summary figures stored with a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub wmin: usize,
    /// Decimal string; the count can exceed 64 bits.
    pub awmin: String,
    pub sc_sum: f64,
    pub ub_wmin: f64,
}

/// Contents of `design.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub schema_version: u32,
    pub n: usize,
    pub k: usize,
    pub spec: DesignSpec,
    /// Degree the per-index costs were evaluated with.
    pub r: u32,
    pub f_k: f64,
    pub decreasing: bool,
    pub indices: Vec<usize>,
    pub per_index: Vec<IndexCost>,
    pub summary: DesignSummary,
    pub manifest: Option<RunManifest>,
}

impl DesignFile {
    pub fn load(path: &Path) -> CliResult<(DesignFile, InformationSet)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        let file: DesignFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Data(format!(
                "unsupported schema_version {}",
                file.schema_version
            )));
        }
        if file.indices.is_empty() {
            return Err(CliError::Data(format!(
                "{}: empty information set",
                path.display()
            )));
        }
        if file.n != 1usize.checked_shl(file.spec.m).unwrap_or(0)
            || file.k != file.indices.len()
            || file.k != file.spec.k
        {
            return Err(CliError::Data(format!(
                "{}: n, k and indices disagree",
                path.display()
            )));
        }
        if file.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Data(format!(
                "{}: indices must be strictly ascending",
                path.display()
            )));
        }
        let set = IndexSet::new(file.n, file.indices.iter().copied())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let info = InformationSet::restore(&file.spec, set)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok((file, info))
    }
}

struct Evaluation {
    report: WeightReport,
    ratios: Option<BTreeMap<u32, f64>>,
    notes: String,
}

fn evaluate(info: &InformationSet, spec: &DesignSpec) -> CliResult<Evaluation> {
    let space = info.space();
    let profile = spec.profile()?;
    let mut notes = String::new();
    let report = match WeightReport::new(&info.set, space, &profile) {
        Ok(r) => r,
        Err(polarforge::Error::NotDecreasing { violations, .. }) => {
            let _ = writeln!(
                notes,
                "warning: set is not decreasing ({violations} violations); w_min and A_wmin are formula values"
            );
            WeightReport::formula(&info.set, space, &profile)?
        }
        Err(e) => return Err(e.into()),
    };
    if report.r == space.m() {
        let _ = writeln!(
            notes,
            "warning: maximum degree r = m, so w_min = 1 and the weight analysis is trivial"
        );
    }
    let ratios = ml_negligibility_ratio(&info.set, space, &spec.channel).ok();
    Ok(Evaluation {
        report,
        ratios,
        notes,
    })
}

fn summary_line(n: usize, k: usize, report: &WeightReport) -> String {
    format!(
        "n={n} k={k} wmin={} awmin={} sc_sum={:.6e} ub_wmin={:.6e}\n",
        report.wmin, report.awmin, report.sc_sum, report.ub_wmin
    )
}

pub fn cmd_construct(args: ConstructArgs) -> CliResult<Output> {
    let args = args.with_defaults();
    let n = required(&args.n, "n")?;
    let k = required(&args.k, "k")?;
    let m = log2_exact(n)?;
    if k == 0 || k > n {
        return Err(CliError::Usage(format!("k = {k} not in 1..={n}")));
    }
    let channel = channel_model(
        args.channel.expect("default"),
        args.snr_db,
        args.epsilon,
        k as f64 / n as f64,
    )?;
    let strategy = match args.strategy.expect("default") {
        StrategyKind::Reliability => Strategy::Reliability,
        StrategyKind::Mixed => Strategy::Mixed,
    };
    let cap_text = args.cap.clone().expect("default");
    let cap =
        match cap_text.as_str() {
            "auto" => DegreeCap::Auto,
            s => DegreeCap::Explicit(s.parse().map_err(|_| {
                CliError::Usage(format!("cap {s:?} is neither `auto` nor an integer"))
            })?),
        };
    let tie = match args.tie.expect("default") {
        TieKind::Larger => TieBreak::LargerIndex,
        TieKind::Smaller => TieBreak::SmallerIndex,
    };
    let spec = DesignSpec::new(m, k, channel, strategy)?
        .with_alpha(args.alpha.expect("default"))
        .with_degree_cap(cap)
        .with_ga_variant(ga_variant(args.ga.expect("default")))
        .with_tie_break(tie);
    let info = construct(&spec)?;
    let eval = evaluate(&info, &spec)?;
    let output = args.output.clone().expect("default");
    let design = DesignFile {
        schema_version: SCHEMA_VERSION,
        n,
        k,
        spec,
        r: info.r,
        f_k: info.f_k,
        decreasing: info.decreasing,
        indices: info.indices().to_vec(),
        per_index: info.costs.clone(),
        summary: DesignSummary {
            wmin: eval.report.wmin,
            awmin: eval.report.awmin.to_string(),
            sc_sum: eval.report.sc_sum,
            ub_wmin: eval.report.ub_wmin,
        },
        manifest: Some(RunManifest::new("construct", &args, None)?),
    };
    write_json(&output, &design)?;
    Ok(Output {
        stdout: summary_line(n, k, &eval.report),
        stderr: eval.notes,
        code: 0,
    })
}

fn override_channel(
    spec: &DesignSpec,
    kind: Option<ChannelKind>,
    snr_db: Option<f64>,
    epsilon: Option<f64>,
) -> CliResult<DesignSpec> {
    let mut spec = spec.clone();
    let n = 1usize << spec.m;
    let kind = match (kind, snr_db, epsilon) {
        (Some(k), _, _) => Some(k),
        (None, Some(_), None) => Some(ChannelKind::Awgn),
        (None, None, Some(_)) => Some(ChannelKind::Bec),
        (None, None, None) => None,
        (None, Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give --channel with both --snr-db and --epsilon".into(),
            ))
        }
    };
    if let Some(kind) = kind {
        spec.channel = channel_model(kind, snr_db, epsilon, spec.k as f64 / n as f64)?;
    }
    Ok(spec)
}

fn write_or_return(output: Option<&Path>, text: String) -> CliResult<String> {
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(path.display().to_string(), e))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Invariant(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invariant(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Invariant(format!("csv: {e}")))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[derive(Serialize)]
struct AnalysisReport {
    schema_version: u32,
    n: usize,
    k: usize,
    channel: ChannelModel,
    r: u32,
    wmin: usize,
    awmin: String,
    sc_sum: f64,
    ub_wmin: f64,
    decreasing: bool,
    negligibility_ratios: Option<BTreeMap<u32, f64>>,
    manifest: RunManifest,
}

pub fn cmd_analyze(args: AnalyzeArgs) -> CliResult<Output> {
    let path = required(&args.design, "design")?;
    let (file, info) = DesignFile::load(&path)?;
    let spec = override_channel(&file.spec, args.channel, args.snr_db, args.epsilon)?;
    let eval = evaluate(&info, &spec)?;
    let snr = match spec.channel {
        ChannelModel::BiAwgn { ebn0_db, .. } => ebn0_db.to_string(),
        ChannelModel::Bec { .. } => String::new(),
    };
    let strategy = match file.spec.strategy {
        Strategy::Reliability => "reliability",
        Strategy::Mixed => "mixed",
    };
    let rep = &eval.report;
    let csv = csv_text(
        &strings(&[
            "n", "k", "strategy", "snr_db", "wmin", "awmin", "sc_sum", "ub_wmin",
        ]),
        &[vec![
            file.n.to_string(),
            file.k.to_string(),
            strategy.into(),
            snr,
            rep.wmin.to_string(),
            rep.awmin.to_string(),
            format!("{:.6e}", rep.sc_sum),
            format!("{:.6e}", rep.ub_wmin),
        ]],
    )?;
    let manifest = RunManifest::new("analyze", &args, None)?;
    if let Some(out) = &args.output {
        write_json(&manifest_path(out), &manifest)?;
    }
    if let Some(report_path) = &args.report {
        let report = AnalysisReport {
            schema_version: SCHEMA_VERSION,
            n: file.n,
            k: file.k,
            channel: spec.channel,
            r: rep.r,
            wmin: rep.wmin,
            awmin: rep.awmin.to_string(),
            sc_sum: rep.sc_sum,
            ub_wmin: rep.ub_wmin,
            decreasing: rep.decreasing,
            negligibility_ratios: eval.ratios.clone(),
            manifest,
        };
        write_json(report_path, &report)?;
    }
    let mut stderr = eval.notes;
    if let Some(ratios) = &eval.ratios {
        let parts: Vec<String> = ratios
            .iter()
            .map(|(d, r)| format!("deg {d}: {r:.3e}"))
            .collect();
        let _ = writeln!(stderr, "negligibility ratios: {}", parts.join(", "));
    }
    Ok(Output {
        stdout: write_or_return(args.output.as_deref(), csv)?,
        stderr,
        code: 0,
    })
}

pub fn cmd_sweep(args: SweepArgs) -> CliResult<Output> {
    let args = args.with_defaults();
    let m = required(&args.m, "m")?;
    let k = required(&args.k, "k")?;
    let grid: Vec<f64> = match &args.rho {
        Some(list) => list.clone(),
        None => {
            let (lo, hi, pts) = (
                args.rho_min.expect("default"),
                args.rho_max.expect("default"),
                args.points.expect("default"),
            );
            match pts {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..pts)
                    .map(|t| lo + (hi - lo) * t as f64 / (pts - 1) as f64)
                    .collect(),
            }
        }
    };
    if grid.is_empty() {
        return Err(CliError::Usage("empty design-parameter grid".into()));
    }
    let family = match args.family.expect("default") {
        ChannelKind::Bec => SweepFamily::Bec,
        ChannelKind::Awgn => SweepFamily::BiAwgn {
            variant: ga_variant(args.ga.expect("default")),
        },
    };
    let stair = staircase_sweep(m, k, family, &grid)?;
    let weights: Vec<usize> = (0..=m).map(|e| 1usize << e).collect();
    let mut header = strings(&["rho", "wmin"]);
    header.extend(weights.iter().map(|d| format!("n_{d}")));
    header.extend(strings(&["jump", "at_plateau"]));
    let rows: Vec<Vec<String>> = stair
        .points
        .iter()
        .map(|p| {
            let mut row = vec![p.rho.to_string(), p.wmin.to_string()];
            row.extend(
                weights
                    .iter()
                    .map(|d| p.histogram.get(d).copied().unwrap_or(0).to_string()),
            );
            row.push(p.jump.to_string());
            row.push((p.wmin == stair.plateau_wmin).to_string());
            row
        })
        .collect();
    let csv = csv_text(&header, &rows)?;
    if let Some(out) = &args.output {
        write_json(
            &manifest_path(out),
            &RunManifest::new("sweep", &args, None)?,
        )?;
    }
    let mut stderr = format!(
        "r*={} plateau_wmin={} final_wmin={} monotone={}\n",
        stair.r_star,
        stair.plateau_wmin,
        stair.final_wmin(),
        stair.is_monotone()
    );
    if !stair.is_monotone() {
        stderr.push_str("warning: w_min decreased along the grid\n");
    }
    Ok(Output {
        stdout: write_or_return(args.output.as_deref(), csv)?,
        stderr,
        code: 0,
    })
}

/// `flag_seed` is the seed given on the command line, which outranks
/// the environment.
pub fn cmd_simulate(args: SimulateArgs, flag_seed: Option<u64>) -> CliResult<Output> {
    let mut args = args.with_defaults();
    let config_seed = if flag_seed.is_some() { None } else { args.seed };
    let seed = resolve_seed(flag_seed, config_seed)?;
    args.seed = Some(seed);
    let path = required(&args.design, "design")?;
    let (_, info) = DesignFile::load(&path)?;
    let pre = match args.pretransform.expect("default") {
        PretransformKind::None => Pretransform::None,
        PretransformKind::Crc => Pretransform::Crc(CrcSpec::CRC12),
        PretransformKind::Pac => Pretransform::pac_default(),
    };
    let config = CodeConfig::new(info.set.clone(), pre)?;
    let kind = match (args.decoder.expect("default"), args.list) {
        (DecoderChoice::Sc, None) => DecoderKind::Sc,
        (DecoderChoice::Sc, Some(_)) => {
            return Err(CliError::Usage(
                "--list applies to the SCL decoder only".into(),
            ))
        }
        (DecoderChoice::Scl, Some(0)) | (DecoderChoice::Scl, None) => {
            return Err(CliError::Usage("SCL list size must be at least 1".into()))
        }
        (DecoderChoice::Scl, Some(list)) => DecoderKind::Scl { list },
    };
    let sim = SimConfig {
        ebn0_db: required(&args.snr_db, "snr_db")?,
        max_blocks: args.max_blocks.expect("default"),
        target_errors: args.target_errors.expect("default"),
        seed,
        workers: args.workers.expect("default"),
        arithmetic: match args.arithmetic.expect("default") {
            ArithmeticKind::MinSum => polarforge::codec::Arithmetic::MinSum,
            ArithmeticKind::Exact => polarforge::codec::Arithmetic::Exact,
        },
        noiseless: args.noiseless,
    };
    let result = run_bler(&config, kind, &sim)?;
    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|p| {
            vec![
                p.ebn0_db.to_string(),
                p.blocks.to_string(),
                p.block_errors.to_string(),
                format!("{:.6e}", p.bler),
                format!("{:.6e}", p.bler_lo),
                format!("{:.6e}", p.bler_hi),
                p.prune.to_string(),
                p.ml_like.to_string(),
            ]
        })
        .collect();
    let csv = csv_text(
        &strings(&[
            "ebn0_db", "blocks", "blk_errs", "bler", "bler_lo", "bler_hi", "prune", "ml_like",
        ]),
        &rows,
    )?;
    if let Some(out) = &args.output {
        write_json(
            &manifest_path(out),
            &RunManifest::new("simulate", &args, Some(seed))?,
        )?;
    }
    let mut stderr = String::new();
    for p in &result.points {
        if p.prune + p.ml_like != p.block_errors {
            return Err(CliError::Invariant(format!(
                "at {} dB prune + ml_like = {} but {} block errors",
                p.ebn0_db,
                p.prune + p.ml_like,
                p.block_errors
            )));
        }
        if p.block_errors < sim.target_errors {
            let _ = writeln!(
                stderr,
                "note: {} dB stopped at max_blocks with {} errors",
                p.ebn0_db, p.block_errors
            );
        }
    }
    Ok(Output {
        stdout: write_or_return(args.output.as_deref(), csv)?,
        stderr,
        code: 0,
    })
}

#[derive(Serialize)]
struct OracleOutput {
    schema_version: u32,
    passed: bool,
    #[serde(flatten)]
    report: OracleReport,
    manifest: RunManifest,
}

/// `oracle-check` with an injectable `|λ|`, for fault-injection tests.
pub fn oracle_check_with(
    args: OracleArgs,
    flag_seed: Option<u64>,
    lambda: &dyn Fn(Monomial) -> polarforge::Result<u32>,
) -> CliResult<Output> {
    let mut args = args.with_defaults();
    let config_seed = if flag_seed.is_some() { None } else { args.seed };
    let seed = resolve_seed(flag_seed, config_seed)?;
    args.seed = Some(seed);
    let suite = OracleSuite {
        budget: EnumerationBudget {
            max_k: args.max_k.expect("default"),
            max_lta_m: args.max_lta_m.expect("default"),
        },
        exhaustive_m: args.exhaustive_m.expect("default"),
        sampled_m: args.sampled_m.expect("default"),
        samples: args.samples.expect("default"),
        seed,
    };
    if suite.samples > 0 && !(1..=5).contains(&suite.sampled_m) {
        return Err(CliError::Usage(format!(
            "sampled_m = {} not in 1..=5",
            suite.sampled_m
        )));
    }
    let report = run_oracle_checks_with(&suite, lambda)?;
    let passed = report.passed();
    let out = OracleOutput {
        schema_version: SCHEMA_VERSION,
        passed,
        report,
        manifest: RunManifest::new("oracle-check", &args, Some(seed))?,
    };
    let mut text =
        serde_json::to_string_pretty(&out).map_err(|e| CliError::Invariant(e.to_string()))?;
    text.push('\n');
    let stderr = format!(
        "{}: {} sets, {} bit-wise checks, {} orbits, {} failures\n",
        if passed { "PASS" } else { "FAIL" },
        out.report.sets_checked,
        out.report.bitwise_checked,
        out.report.orbits_checked,
        out.report.failures.len()
    );
    Ok(Output {
        stdout: write_or_return(args.output.as_deref(), text)?,
        stderr,
        code: if passed { 0 } else { 4 },
    })
}

pub fn cmd_oracle_check(args: OracleArgs, flag_seed: Option<u64>) -> CliResult<Output> {
    oracle_check_with(args, flag_seed, &lambda_size)
}

#[derive(Serialize)]
struct CompareOutput {
    schema_version: u32,
    channel: ChannelModel,
    symmetric_difference: Vec<usize>,
    difference_size: usize,
    sum_a: f64,
    sum_b: f64,
    delta_sum: f64,
    wmin_a: usize,
    wmin_b: usize,
    delta_wmin: i64,
    awmin_a: String,
    awmin_b: String,
    delta_awmin: String,
    ub_a: f64,
    ub_b: f64,
    delta_ub: f64,
    both_decreasing: bool,
    manifest: RunManifest,
}

pub fn cmd_compare(args: CompareArgs) -> CliResult<Output> {
    let (_, a) = DesignFile::load(&required(&args.a, "a")?)?;
    let (_, b) = DesignFile::load(&required(&args.b, "b")?)?;
    let spec = override_channel(&a.spec, args.channel, args.snr_db, args.epsilon)?;
    let cmp = compare_sets(&a, &b, &spec.channel)?;
    let out = CompareOutput {
        schema_version: SCHEMA_VERSION,
        channel: spec.channel,
        difference_size: cmp.symmetric_difference.len(),
        symmetric_difference: cmp.symmetric_difference,
        sum_a: cmp.sum_a,
        sum_b: cmp.sum_b,
        delta_sum: cmp.delta_sum,
        wmin_a: cmp.wmin_a,
        wmin_b: cmp.wmin_b,
        delta_wmin: cmp.wmin_b as i64 - cmp.wmin_a as i64,
        awmin_a: cmp.awmin_a.to_string(),
        awmin_b: cmp.awmin_b.to_string(),
        delta_awmin: cmp.delta_awmin.to_string(),
        ub_a: cmp.ub_a,
        ub_b: cmp.ub_b,
        delta_ub: cmp.delta_ub,
        both_decreasing: cmp.both_decreasing,
        manifest: RunManifest::new("compare", &args, None)?,
    };
    let mut text =
        serde_json::to_string_pretty(&out).map_err(|e| CliError::Invariant(e.to_string()))?;
    text.push('\n');
    let stderr = if out.both_decreasing {
        String::new()
    } else {
        "warning: a set is not decreasing; weight figures are formula values\n".to_string()
    };
    Ok(Output {
        stdout: write_or_return(args.output.as_deref(), text)?,
        stderr,
        code: 0,
    })
}

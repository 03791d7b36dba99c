//! Acceptance run: one PASS/FAIL line per criterion, exit status nonzero
//! if any criterion fails. Built without the libtest harness so that every
//! line reaches the test log.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use polarforge::codec::{Arithmetic, CodeConfig};
use polarforge::construction::{
    compare_sets, construct_mixed, construct_reliability, rm_rstar, staircase_sweep, DesignSpec,
    InformationSet, Strategy, SweepFamily,
};
use polarforge::monomial::reed_muller_set;
use polarforge::oracle::{run_oracle_checks, OracleSuite};
use polarforge::reliability::{channel_bhattacharyya, ChannelModel, GaVariant, TieBreak};
use polarforge::simulator::{run_bler, DecoderKind, SimConfig, SimPoint};
use polarforge::weight::{ub_min_weight, union_term, WeightReport};

struct Row {
    m: u32,
    k: usize,
    db: f64,
    rel_wmin: usize,
    rel_a: u64,
    rel_sum: f64,
    rel_ub: f64,
    mix_wmin: usize,
    mix_a: u64,
    mix_ub: f64,
}

const TABLE: [Row; 4] = [
    Row {
        m: 7,
        k: 64,
        db: 4.0,
        rel_wmin: 8,
        rel_a: 304,
        rel_sum: 2.29e-3,
        rel_ub: 1.3e-2,
        mix_wmin: 16,
        mix_a: 94_488,
        mix_ub: 1.8e-4,
    },
    Row {
        m: 9,
        k: 256,
        db: 5.0,
        rel_wmin: 16,
        rel_a: 18_528,
        rel_sum: 1.42e-7,
        rel_ub: 1.9e-7,
        mix_wmin: 16,
        mix_a: 3_680,
        mix_ub: 3.8e-8,
    },
    Row {
        m: 10,
        k: 512,
        db: 3.0,
        rel_wmin: 16,
        rel_a: 2_752,
        rel_sum: 2.69e-6,
        rel_ub: 1.8e-3,
        mix_wmin: 32,
        mix_a: 12_673_632,
        mix_ub: 1.9e-7,
    },
    Row {
        m: 15,
        k: 16_384,
        db: 5.0,
        rel_wmin: 32,
        rel_a: 560_988_160,
        rel_sum: 3.35e-9,
        rel_ub: 6.0e-14,
        mix_wmin: 32,
        mix_a: 154_140_672,
        mix_ub: 1.6e-14,
    },
];

/// Index of the reliability UB entry that the criteria flag rather than match.
const FLAGGED_UB_ROW: usize = 2;

fn table_spec(m: u32, k: usize, db: f64, strategy: Strategy) -> DesignSpec {
    DesignSpec::awgn(m, k, db, strategy)
        .expect("valid spec")
        .with_ga_variant(GaVariant::Saturating {
            cap: GaVariant::TABLE_CAP,
        })
        .with_tie_break(TieBreak::SmallerIndex)
}

fn report(info: &InformationSet) -> WeightReport {
    let profile = info.spec.profile().expect("profile");
    WeightReport::formula(&info.set, info.space(), &profile).expect("report")
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

struct Verdicts {
    failed: Vec<u32>,
}

impl Verdicts {
    fn line(&mut self, id: u32, pass: bool, detail: impl AsRef<str>) {
        println!(
            "criterion {id:>2}: {} | {}",
            if pass { "PASS" } else { "FAIL" },
            detail.as_ref()
        );
        if !pass {
            self.failed.push(id);
        }
    }

    fn note(&self, text: impl AsRef<str>) {
        println!("              note: {}", text.as_ref());
    }
}

fn criterion_1(v: &mut Verdicts) {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for row in &TABLE {
        let info = construct_reliability(&table_spec(row.m, row.k, row.db, Strategy::Reliability))
            .expect("design");
        let rep = report(&info);
        let ok = rep.wmin == row.rel_wmin && rep.awmin == BigUint::from(row.rel_a);
        pass &= ok;
        parts.push(format!(
            "({},{})@{}dB wmin={} A={}{}",
            1 << row.m,
            row.k,
            row.db,
            rep.wmin,
            rep.awmin,
            if ok { "" } else { " MISMATCH" }
        ));
        if !rep.decreasing {
            v.note(format!(
                "(N={}) reliability set is not decreasing; A is the formula value",
                1 << row.m
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    v.line(1, pass, format!("{}; {secs:.2}s", parts.join("; ")));
    let alt =
        construct_reliability(&table_spec(10, 512, 4.0, Strategy::Reliability)).expect("design");
    let rep = report(&alt);
    v.note(format!(
        "(1024,512) designed at 4 dB instead: wmin={} A={} sum P={:.3e}",
        rep.wmin, rep.awmin, rep.sc_sum
    ));
}

fn criterion_2(v: &mut Verdicts) {
    let spec = table_spec(7, 64, 4.0, Strategy::Mixed).with_alpha(100.0);
    let mix = construct_mixed(&spec).expect("design");
    let rel = construct_reliability(&spec).expect("design");
    let rm = reed_muller_set(spec.space().expect("space"), 3);
    let rep = report(&mix);
    let delta = compare_sets(&rel, &mix, &spec.channel)
        .expect("compare")
        .symmetric_difference
        .len();
    let pinned =
        mix.set == rm && rep.wmin == 16 && rep.awmin == BigUint::from(94_488u32) && delta == 10;
    let mut pass = pinned;
    let mut parts = vec![format!(
        "(128,64) RM(3,7)={} wmin={} A={} |delta|={delta}",
        mix.set == rm,
        rep.wmin,
        rep.awmin
    )];
    for row in &TABLE[1..] {
        let spec = table_spec(row.m, row.k, row.db, Strategy::Mixed);
        let mix = construct_mixed(&spec).expect("design");
        let rel = construct_reliability(&spec).expect("design");
        let rep = report(&mix);
        let delta = compare_sets(&rel, &mix, &spec.channel)
            .expect("compare")
            .symmetric_difference
            .len();
        let ok = rep.wmin == row.mix_wmin;
        pass &= ok;
        parts.push(format!(
            "({},{}) wmin={} (table {}) A={} (table {}) |delta|={delta}{}",
            1 << row.m,
            row.k,
            rep.wmin,
            row.mix_wmin,
            rep.awmin,
            row.mix_a,
            if ok { "" } else { " MISMATCH" }
        ));
    }
    v.line(2, pass, parts.join("; "));
}

fn criterion_3(v: &mut Verdicts) {
    let mut within = 0;
    let mut parts = Vec::new();
    let mut flagged = None;
    for (r, row) in TABLE.iter().enumerate() {
        let rate = row.k as f64 / (1u64 << row.m) as f64;
        let z = channel_bhattacharyya(&ChannelModel::bi_awgn(row.db, rate).expect("channel"));
        for (label, a, w, tabulated) in [
            ("rel", row.rel_a, row.rel_wmin, row.rel_ub),
            ("mix", row.mix_a, row.mix_wmin, row.mix_ub),
        ] {
            let ub = union_term(&BigUint::from(a), w, z);
            let err = rel_err(ub, tabulated);
            if r == FLAGGED_UB_ROW && label == "rel" {
                flagged = Some(ub);
                parts.push(format!(
                    "N={} {label} {ub:.2e} vs {tabulated:.1e} FLAGGED",
                    1 << row.m
                ));
                continue;
            }
            within += usize::from(err <= 0.15);
            parts.push(format!(
                "N={} {label} {ub:.2e} vs {tabulated:.1e} ({:.0}%)",
                1 << row.m,
                err * 100.0
            ));
        }
    }
    let flag_ok = flagged.is_some_and(|ub| rel_err(ub, 3.2e-4) < 0.1);
    v.line(
        3,
        within >= 7 && flag_ok,
        format!("{within}/7 within 15%; {}", parts.join("; ")),
    );
    v.note(format!(
        "flagged: the tabulated A=2752, wmin=16 at 3 dB give {:.2e}, inconsistent with the tabulated 1.8e-3",
        flagged.unwrap_or(f64::NAN)
    ));
    let mut ours = Vec::new();
    for row in &TABLE {
        let model =
            ChannelModel::bi_awgn(row.db, row.k as f64 / (1u64 << row.m) as f64).expect("channel");
        for strategy in [Strategy::Reliability, Strategy::Mixed] {
            let spec = table_spec(row.m, row.k, row.db, strategy);
            let info = polarforge::construction::construct(&spec).expect("design");
            let space = info.space();
            let mult =
                polarforge::weight::orbit_multiplicity(&info.set, space).expect("multiplicity");
            let ub = union_term(
                &mult.total,
                1 << (row.m - mult.r),
                channel_bhattacharyya(&model),
            );
            ours.push(format!("N={} {:?} {ub:.2e}", 1 << row.m, strategy));
        }
    }
    v.note(format!("UB of the sets built here: {}", ours.join("; ")));
}

fn criterion_4(v: &mut Verdicts) {
    let mut factor2 = true;
    let mut within25 = 0;
    let mut parts = Vec::new();
    for row in &TABLE {
        let info = construct_reliability(&table_spec(row.m, row.k, row.db, Strategy::Reliability))
            .expect("design");
        let sum = info.sc_sum();
        let ratio = sum / row.rel_sum;
        factor2 &= (0.5..=2.0).contains(&ratio);
        within25 += usize::from(rel_err(sum, row.rel_sum) <= 0.25);
        parts.push(format!(
            "N={} {sum:.3e} vs {:.2e} (x{ratio:.3})",
            1 << row.m,
            row.rel_sum
        ));
    }
    v.line(
        4,
        factor2 && within25 >= 2,
        format!("{}; {within25}/4 within 25%", parts.join("; ")),
    );
    let alt =
        construct_reliability(&table_spec(10, 512, 4.0, Strategy::Reliability)).expect("design");
    v.note(format!(
        "(1024,512) designed at 4 dB: sum P = {:.3e} vs 2.69e-6",
        alt.sc_sum()
    ));
}

fn criterion_5(v: &mut Verdicts) {
    let start = Instant::now();
    let suite = OracleSuite::default();
    let rep = run_oracle_checks(&suite).expect("oracle suite");
    let secs = start.elapsed().as_secs_f64();
    v.line(
        5,
        rep.passed() && rep.sets_checked >= 200 && secs < 300.0,
        format!(
            "{} sets ({} sampled at m=5), {} bit-wise, {} orbits, {} failures, {secs:.1}s",
            rep.sets_checked,
            suite.samples,
            rep.bitwise_checked,
            rep.orbits_checked,
            rep.failures.len()
        ),
    );
    for f in rep.failures.iter().take(5) {
        v.note(format!("{}: {}", f.check, f.detail));
    }
}

fn criterion_6(v: &mut Verdicts) {
    let grid: Vec<f64> = (0..50)
        .map(|t| -(0.5f64.ln() + (1e-6f64.ln() - 0.5f64.ln()) * t as f64 / 49.0))
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in 4..=8u32 {
        for k in [1usize << (m - 1), 1 << (m - 2)] {
            let stair = staircase_sweep(m, k, SweepFamily::Bec, &grid).expect("sweep");
            let target = 1usize << (m - rm_rstar(m, k).expect("r*"));
            let ok = stair.is_monotone() && stair.final_wmin() == target;
            pass &= ok;
            parts.push(format!(
                "m={m} K={k}: {}->{} (2^(m-r*)={target}){}",
                stair.points[0].wmin,
                stair.final_wmin(),
                if ok { "" } else { " FAIL" }
            ));
        }
    }
    v.line(6, pass, parts.join("; "));
}

fn simulate(config: &CodeConfig, kind: DecoderKind, sim: &SimConfig) -> SimPoint {
    run_bler(config, kind, sim)
        .expect("simulation")
        .points
        .remove(0)
}

fn criterion_7(v: &mut Verdicts) {
    let start = Instant::now();
    let info =
        construct_reliability(&table_spec(7, 64, 4.0, Strategy::Reliability)).expect("design");
    let config = CodeConfig::plain(info.set).expect("config");
    let sim = SimConfig {
        ebn0_db: vec![2.5],
        target_errors: 200,
        max_blocks: 10_000_000,
        seed: 7,
        arithmetic: Arithmetic::Exact,
        ..Default::default()
    };
    let p = simulate(&config, DecoderKind::Scl { list: 8 }, &sim);
    let pass = p.block_errors >= 200
        && p.prune + p.ml_like == p.block_errors
        && p.ml_like_metric_violations == 0;
    v.line(
        7,
        pass,
        format!(
            "(128,64) SCL(8) 2.5 dB exact: {} blocks, {} errors = {} prune + {} ml_like, {} ml_like blocks with a worse winner, {:.1}s",
            p.blocks,
            p.block_errors,
            p.prune,
            p.ml_like,
            p.ml_like_metric_violations,
            start.elapsed().as_secs_f64()
        ),
    );
}

fn criterion_8(v: &mut Verdicts) {
    let mut rows = Vec::new();
    for m in 6..=10u32 {
        let spec = table_spec(m, 1 << (m - 1), 4.0, Strategy::Mixed);
        let rel = construct_reliability(&spec).expect("design");
        let mix = construct_mixed(&spec).expect("design");
        let cmp = compare_sets(&rel, &mix, &spec.channel).expect("compare");
        rows.push((
            m,
            cmp.delta_sum.abs(),
            cmp.delta_ub.abs(),
            cmp.symmetric_difference.len(),
        ));
    }
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    let pass = last.1 < first.1 && last.2 < first.2;
    let parts: Vec<String> = rows
        .iter()
        .map(|(m, ds, du, d)| format!("m={m} |dSum|={ds:.2e} |dUB|={du:.2e} |delta|={d}"))
        .collect();
    let tail = &rows[1..];
    let trend = tail.last().unwrap().1 < tail[0].1 && tail.last().unwrap().2 < tail[0].2;
    v.note(format!(
        "m=7 to m=10 differences shrink: {trend}; at m=6 the two designs coincide"
    ));
    v.line(8, pass, parts.join("; "));
}

fn criterion_9(v: &mut Verdicts) {
    let start = Instant::now();
    let (m, k, design_db) = (8u32, 64usize, 2.0);
    let spec = DesignSpec::awgn(m, k, design_db, Strategy::Mixed).expect("spec");
    let rel = construct_reliability(&spec).expect("design");
    let mix = construct_mixed(&spec).expect("design");
    let space = spec.space().expect("space");
    let rate = k as f64 / space.n() as f64;
    let ub_ratio = |db: f64| {
        let model = ChannelModel::bi_awgn(db, rate).expect("channel");
        ub_min_weight(&rel.set, space, &model).expect("ub")
            / ub_min_weight(&mix.set, space, &model).expect("ub")
    };
    let Some(op_db) = (0..=40)
        .map(|t| t as f64 * 0.25)
        .find(|&db| ub_ratio(db) >= 10.0)
    else {
        v.line(
            9,
            false,
            "no Eb/N0 in 0..10 dB where the UB values differ by 10x",
        );
        return;
    };
    let (rr, rm) = (report(&rel), report(&mix));
    v.note(format!(
        "(256,64) designed at {design_db} dB: rel wmin={} A={}, mix wmin={} A={}; UB ratio {:.1} at {op_db} dB",
        rr.wmin,
        rr.awmin,
        rm.wmin,
        rm.awmin,
        ub_ratio(op_db)
    ));
    let sim = SimConfig {
        ebn0_db: vec![op_db],
        target_errors: 100,
        max_blocks: 50_000_000,
        seed: 9,
        ..Default::default()
    };
    let pr = simulate(
        &CodeConfig::plain(rel.set.clone()).expect("config"),
        DecoderKind::Scl { list: 8 },
        &sim,
    );
    let pm = simulate(
        &CodeConfig::plain(mix.set.clone()).expect("config"),
        DecoderKind::Scl { list: 8 },
        &sim,
    );
    let secs = start.elapsed().as_secs_f64();
    let pass = pr.block_errors >= 100
        && pm.block_errors >= 100
        && pm.bler < pr.bler
        && pm.bler_hi < pr.bler_lo
        && secs < 1800.0;
    v.line(
        9,
        pass,
        format!(
            "SCL(8) at {op_db} dB: rel BLER {:.3e} [{:.3e}, {:.3e}] ({} errs / {} blocks), mix BLER {:.3e} [{:.3e}, {:.3e}] ({} errs / {} blocks), {secs:.0}s",
            pr.bler, pr.bler_lo, pr.bler_hi, pr.block_errors, pr.blocks, pm.bler, pm.bler_lo, pm.bler_hi, pm.block_errors, pm.blocks
        ),
    );
}

fn criterion_10(v: &mut Verdicts) {
    let dir = tempfile::tempdir().expect("tempdir");
    let bin = env!("CARGO_BIN_EXE_polarforge");
    let design = dir.path().join("d.json");
    let status = Command::new(bin)
        .args([
            "construct",
            "--n",
            "128",
            "--k",
            "64",
            "--snr-db",
            "3",
            "--strategy",
            "mixed",
            "--output",
        ])
        .arg(&design)
        .env_remove("POLARFORGE_SEED")
        .output()
        .expect("construct runs");
    assert!(status.status.success());
    let mut bodies = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let status = Command::new(bin)
            .args(["simulate", "--design"])
            .arg(&design)
            .args([
                "--snr-db",
                "1.5,2.5",
                "--list",
                "4",
                "--pretransform",
                "crc",
                "--target-errors",
                "60",
                "--seed",
                "11",
            ])
            .args(["--workers", workers, "--output"])
            .arg(&out)
            .status()
            .expect("simulate runs");
        assert!(status.success());
        bodies.push(std::fs::read(&out).expect("csv"));
    }
    let same = bodies[0] == bodies[1];
    v.line(
        10,
        same,
        format!(
            "simulate CSV with 1 and 8 workers: {} bytes each, identical = {same}",
            bodies[0].len()
        ),
    );
}

fn main() {
    let mut v = Verdicts { failed: Vec::new() };
    let start = Instant::now();
    criterion_1(&mut v);
    criterion_2(&mut v);
    criterion_3(&mut v);
    criterion_4(&mut v);
    criterion_5(&mut v);
    criterion_6(&mut v);
    criterion_7(&mut v);
    criterion_8(&mut v);
    criterion_9(&mut v);
    criterion_10(&mut v);
    println!(
        "acceptance: {} of 10 criteria pass ({:.0}s)",
        10 - v.failed.len(),
        start.elapsed().as_secs_f64()
    );
    if !v.failed.is_empty() {
        println!("acceptance: failing criteria {:?}", v.failed);
        std::process::exit(1);
    }
}

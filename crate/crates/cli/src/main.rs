//! Command-line driver: realizability checks, constructive realization,
//! verification, exact counting, batch sweeps, and a self-test.
//!
//! Exit codes: 0 affirmative, 1 negative (not realizable, invalid, or a
//! cross-check defect), 2 usage or input error, 3 budget exhausted.

use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use hurwitz_core::{
    belyi_datum, count_tuples, decide_realizable, enumerate_special_data, frobenius_disconnected,
    genus_of, realize_with_budget, search_realize, split_full_cycle, total_branch_number,
    verify_constellation, Constellation, CountError, CyclePartition, GeneralDatum, RealizeOutcome,
    SearchBudget, SearchOutcome, SpecialDatum,
};

const STACK_BYTES: usize = 64 * 1024 * 1024;

#[derive(Parser)]
#[command(
    name = "hurwitz",
    version,
    about = "Realizability, construction, and counting for branched covers of the sphere"
)]
struct Cli {
    /// Worker threads for sweeps; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a special branch datum is realizable.
    Check(DatumInput),
    /// Construct a verified constellation for a special branch datum.
    Realize(RealizeArgs),
    /// Check a constellation against a special branch datum.
    Verify(VerifyArgs),
    /// Count tuples, conjugation classes, and the weighted total for a datum.
    Count(CountArgs),
    /// Run one mode over every special datum in a degree and genus window.
    Sweep(SweepArgs),
    /// Recompute the built-in example table; any mismatch fails.
    Selftest,
}

#[derive(Args)]
struct DatumInput {
    /// Datum JSON such as '{"d":3,"A":[3],"B":[3],"M":[2]}'; omitted means
    /// standard input.
    datum: Option<String>,
    /// Read the datum from this file instead.
    #[arg(long, conflicts_with = "datum")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct RealizeArgs {
    #[command(flatten)]
    input: DatumInput,
    /// Node budget for the genus-zero search.
    #[arg(long, default_value_t = 10_000_000)]
    search_budget: u64,
    /// Output format for the constellation.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One JSON object with the degree and the one-line images.
    Json,
    /// Space-separated cycle notation, one factor after another.
    Cycles,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: DatumInput,
    /// Constellation JSON such as '{"d":3,"perms":[[2,3,1],...]}'; omitted
    /// means standard input.
    constellation: Option<String>,
    /// Read the constellation from this file instead.
    #[arg(long, conflicts_with = "constellation")]
    constellation_file: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    input: DatumInput,
    /// Largest degree the enumeration will attempt.
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
    /// Factor-placement budget for the enumeration.
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u64,
    /// Cross-check the tuple count against the character class-sum.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Degree to sweep.
    #[arg(long)]
    d: usize,
    /// Smallest genus included.
    #[arg(long, default_value_t = 0)]
    genus_min: usize,
    /// Largest genus included.
    #[arg(long, default_value_t = 2)]
    genus_max: usize,
    /// What to run on each datum.
    #[arg(long, value_enum)]
    mode: Mode,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Realizability verdicts, with a search cross-check at genus zero.
    Check,
    /// Construct and verify a constellation per datum.
    Realize,
    /// Exact counts per datum; degree at most eight.
    Count,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(input) => cmd_check(&input),
        Command::Realize(args) => cmd_realize(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Count(args) => cmd_count(&args),
        Command::Sweep(args) => cmd_sweep(&args, cli.threads),
        Command::Selftest => cmd_selftest(),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(payload: &Value) {
    println!("{payload}");
}

fn read_source(inline: &Option<String>, file: &Option<PathBuf>) -> Result<String, String> {
    if let Some(path) = file {
        return fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()));
    }
    if let Some(text) = inline {
        return Ok(text.clone());
    }
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| format!("cannot read standard input: {e}"))?;
    Ok(text)
}

fn parse_special(input: &DatumInput) -> Result<SpecialDatum, String> {
    let text = read_source(&input.datum, &input.file)?;
    serde_json::from_str(&text).map_err(|e| format!("invalid datum: {e}"))
}

/// Accepts either the special shape `{"d","A","B","M"}` or the general
/// shape `{"d","partitions"}`, normalizing to the latter.
fn parse_any_datum(input: &DatumInput) -> Result<GeneralDatum, String> {
    let text = read_source(&input.datum, &input.file)?;
    if let Ok(special) = serde_json::from_str::<SpecialDatum>(&text) {
        return Ok(special.to_general());
    }
    serde_json::from_str(&text)
        .map_err(|e| format!("datum is neither special-shape nor general-shape JSON: {e}"))
}

fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(f)
        .expect("worker thread")
        .join()
        .expect("worker thread panicked")
}

fn fraction(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn big_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=n {
        acc *= i;
    }
    acc
}

// ---------------------------------------------------------------------------
// check

fn check_payload(datum: &SpecialDatum) -> (Value, bool) {
    let verdict = decide_realizable(datum);
    let mut map = Map::new();
    map.insert("verdict".into(), Value::Bool(verdict.realizable));
    map.insert(
        "reason".into(),
        serde_json::to_value(verdict.reason).expect("reason serializes"),
    );
    if let Some(g) = verdict.genus {
        map.insert("genus".into(), Value::from(g));
    }
    map.insert("v".into(), Value::from(datum.total_branch_number()));
    map.insert(
        "belyi_datum".into(),
        serde_json::to_value(belyi_datum(datum)).expect("datum serializes"),
    );
    (Value::Object(map), verdict.realizable)
}

fn cmd_check(input: &DatumInput) -> ExitCode {
    let datum = match parse_special(input) {
        Ok(d) => d,
        Err(e) => return usage_error(&e),
    };
    let (payload, realizable) = check_payload(&datum);
    emit(&payload);
    ExitCode::from(if realizable { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// realize

fn cmd_realize(args: &RealizeArgs) -> ExitCode {
    let datum = match parse_special(&args.input) {
        Ok(d) => d,
        Err(e) => return usage_error(&e),
    };
    let budget = SearchBudget {
        max_nodes: args.search_budget,
        ..SearchBudget::default()
    };
    let worker = datum.clone();
    let outcome = with_big_stack(move || realize_with_budget(&worker, &budget));
    match outcome {
        RealizeOutcome::Realized(c) => {
            if let Err(f) = verify_constellation(&datum, &c) {
                eprintln!("DEFECT: produced constellation fails verification: {f}");
                emit(&json!({"valid": false, "failed": f.to_string()}));
                return ExitCode::from(1);
            }
            match args.format {
                Format::Json => emit(&serde_json::to_value(&c).expect("constellation serializes")),
                Format::Cycles => println!("{}", c.cycles_text()),
            }
            ExitCode::from(0)
        }
        RealizeOutcome::NotRealizable(v) => {
            emit(&json!({
                "realizable": false,
                "reason": serde_json::to_value(v.reason).expect("reason serializes"),
            }));
            ExitCode::from(1)
        }
        RealizeOutcome::SearchExhausted => {
            eprintln!("search budget exhausted before the genus-zero question settled");
            emit(&json!({"exhausted": true}));
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let datum_inline = args.input.datum.is_some() || args.input.file.is_some();
    let constellation_inline =
        args.constellation.is_some() || args.constellation_file.is_some();
    if !datum_inline && !constellation_inline {
        return usage_error("datum and constellation cannot both come from standard input");
    }
    let datum = match parse_special(&args.input) {
        Ok(d) => d,
        Err(e) => return usage_error(&e),
    };
    let text = match read_source(&args.constellation, &args.constellation_file) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let constellation: Constellation = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return usage_error(&format!("invalid constellation: {e}")),
    };
    match verify_constellation(&datum, &constellation) {
        Ok(()) => {
            emit(&json!({"valid": true}));
            ExitCode::from(0)
        }
        Err(f) => {
            emit(&json!({"valid": false, "failed": f.to_string()}));
            ExitCode::from(1)
        }
    }
}

// ---------------------------------------------------------------------------
// count

fn cmd_count(args: &CountArgs) -> ExitCode {
    let datum = match parse_any_datum(&args.input) {
        Ok(d) => d,
        Err(e) => return usage_error(&e),
    };
    let budget = SearchBudget {
        max_degree: args.max_degree,
        max_nodes: args.max_nodes,
    };
    let report = match count_tuples(&datum, &budget) {
        Ok(r) => r,
        Err(e @ (CountError::DegreeExceeded { .. } | CountError::BudgetExhausted { .. })) => {
            eprintln!("{e}");
            emit(&json!({"error": e.to_string()}));
            return ExitCode::from(3);
        }
    };
    let mut payload = serde_json::to_value(&report)
        .expect("report serializes")
        .as_object()
        .cloned()
        .expect("report is an object");
    let mut code = 0u8;
    if args.oracle {
        let predicted = frobenius_disconnected(&datum);
        let counted = BigRational::new(
            BigInt::from(report.tuple_count),
            big_factorial(datum.degree()),
        );
        let agreement = predicted == counted;
        payload.insert("oracle_total".into(), Value::from(fraction(&predicted)));
        payload.insert("agreement".into(), Value::Bool(agreement));
        if !agreement {
            eprintln!(
                "DEFECT: enumeration gives {} but the character class-sum gives {}",
                fraction(&counted),
                fraction(&predicted)
            );
            code = 1;
        }
    }
    emit(&Value::Object(payload));
    ExitCode::from(code)
}

// ---------------------------------------------------------------------------
// sweep

struct SweepLine {
    payload: Value,
    defect: bool,
    exhausted: bool,
}

fn cmd_sweep(args: &SweepArgs, threads: Option<usize>) -> ExitCode {
    let bound = match args.mode {
        Mode::Check => 16,
        Mode::Realize => 12,
        Mode::Count => 8,
    };
    if args.d > bound {
        return usage_error(&format!(
            "degree {} is beyond this mode's bound {bound}",
            args.d
        ));
    }
    let data = enumerate_special_data(args.d, args.genus_min, args.genus_max);
    let mut builder = rayon::ThreadPoolBuilder::new().stack_size(STACK_BYTES);
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return usage_error(&format!("cannot build thread pool: {e}")),
    };
    let mode = args.mode;
    let lines: Vec<SweepLine> = pool.install(|| {
        use rayon::prelude::*;
        data.par_iter()
            .map(|datum| match mode {
                Mode::Check => sweep_check(datum),
                Mode::Realize => sweep_realize(datum),
                Mode::Count => sweep_count(datum),
            })
            .collect()
    });
    let mut defects = 0usize;
    let mut exhausted = 0usize;
    for line in &lines {
        emit(&line.payload);
        defects += line.defect as usize;
        exhausted += line.exhausted as usize;
    }
    emit(&json!({
        "swept": lines.len(),
        "defects": defects,
        "exhausted": exhausted,
    }));
    ExitCode::from(if defects == 0 { 0 } else { 1 })
}

fn sweep_check(datum: &SpecialDatum) -> SweepLine {
    let (mut payload, _) = check_payload(datum);
    let map = payload.as_object_mut().expect("object payload");
    map.insert(
        "datum".into(),
        serde_json::to_value(datum).expect("datum serializes"),
    );
    let mut defect = false;
    let mut exhausted = false;
    let verdict = decide_realizable(datum);
    if datum.total_branch_number() == 2 * datum.degree() - 2 {
        match search_realize(&datum.to_general(), &SearchBudget::default()) {
            SearchOutcome::Found(_) => {
                let agrees = verdict.realizable;
                map.insert("search_agrees".into(), Value::Bool(agrees));
                defect = !agrees;
            }
            SearchOutcome::NotFound => {
                let agrees = !verdict.realizable;
                map.insert("search_agrees".into(), Value::Bool(agrees));
                defect = !agrees;
            }
            SearchOutcome::Exhausted => {
                map.insert("search_agrees".into(), Value::Null);
                exhausted = true;
            }
        }
    }
    SweepLine {
        payload,
        defect,
        exhausted,
    }
}

fn sweep_realize(datum: &SpecialDatum) -> SweepLine {
    let mut map = Map::new();
    map.insert(
        "datum".into(),
        serde_json::to_value(datum).expect("datum serializes"),
    );
    let mut defect = false;
    let mut exhausted = false;
    match realize_with_budget(datum, &SearchBudget::default()) {
        RealizeOutcome::Realized(c) => {
            let valid = verify_constellation(datum, &c).is_ok();
            map.insert("outcome".into(), Value::from("realized"));
            map.insert("valid".into(), Value::Bool(valid));
            defect = !valid;
        }
        RealizeOutcome::NotRealizable(v) => {
            map.insert("outcome".into(), Value::from("not_realizable"));
            map.insert(
                "reason".into(),
                serde_json::to_value(v.reason).expect("reason serializes"),
            );
        }
        RealizeOutcome::SearchExhausted => {
            map.insert("outcome".into(), Value::from("search_exhausted"));
            exhausted = true;
        }
    }
    SweepLine {
        payload: Value::Object(map),
        defect,
        exhausted,
    }
}

fn sweep_count(datum: &SpecialDatum) -> SweepLine {
    let mut map = Map::new();
    map.insert(
        "datum".into(),
        serde_json::to_value(datum).expect("datum serializes"),
    );
    let mut exhausted = false;
    match count_tuples(&datum.to_general(), &SearchBudget::default()) {
        Ok(report) => {
            map.insert(
                "count".into(),
                serde_json::to_value(&report).expect("report serializes"),
            );
        }
        Err(e) => {
            map.insert("error".into(), Value::from(e.to_string()));
            exhausted = true;
        }
    }
    SweepLine {
        payload: Value::Object(map),
        defect: false,
        exhausted,
    }
}

// ---------------------------------------------------------------------------
// selftest

fn cmd_selftest() -> ExitCode {
    let mut failures = 0usize;
    let mut run = |name: &str, result: Result<(), String>| match result {
        Ok(()) => println!("ok   {name}"),
        Err(why) => {
            failures += 1;
            println!("FAIL {name}: {why}");
        }
    };

    run("checker accepts the smallest torus datum", {
        let datum = special(3, &[3], &[3], &[2]);
        let v = decide_realizable(&datum);
        expect(v.realizable && v.genus == Some(1), &format!("{v:?}"))
    });
    run("checker reports the divisibility obstruction", {
        let datum = special(4, &[2, 2], &[2, 2], &[2]);
        let v = decide_realizable(&datum);
        expect(
            !v.realizable && format!("{:?}", v.reason) == "GcdObstruction",
            &format!("{v:?}"),
        )
    });
    run("checker rejects odd total branching", {
        let datum = special(2, &[2], &[2], &[1]);
        let v = decide_realizable(&datum);
        expect(!v.realizable, &format!("{v:?}"))
    });
    run("total branch numbers", {
        let part = |parts: &[u32]| CyclePartition::new(parts.to_vec()).expect("valid parts");
        let got = (
            total_branch_number(3, &part(&[3]), &part(&[3]), &[2]),
            total_branch_number(2, &part(&[2]), &part(&[2]), &[1]),
            total_branch_number(2, &part(&[1, 1]), &part(&[1, 1]), &[1]),
        );
        expect(got == (6, 3, 1), &format!("{got:?}"))
    });
    run("genus values", {
        let g1 = genus_of(&special(3, &[3], &[3], &[2]));
        let g0 = genus_of(&special(3, &[2, 1], &[2, 1], &[2]));
        let bad = genus_of(&special(2, &[2], &[2], &[1]));
        expect(
            g1 == Ok(1) && g0 == Ok(0) && bad.is_err(),
            &format!("{g1:?} {g0:?} {bad:?}"),
        )
    });
    run("two-cycle split of the standard five-cycle", {
        match split_full_cycle(3, 3, 5) {
            Ok((s1, s2)) => {
                let got = format!("{s1} {s2}");
                expect(got == "(1,4,5) (1,2,3)", &got)
            }
            Err(e) => Err(e.to_string()),
        }
    });
    run("realize the smallest torus datum byte-exactly", {
        match realize_with_budget(&special(3, &[3], &[3], &[2]), &SearchBudget::default()) {
            RealizeOutcome::Realized(c) => {
                let got = c.cycles_text();
                expect(got == "(1,2,3) (1,2,3) (1,2,3)", &got)
            }
            other => Err(format!("{other:?}")),
        }
    });
    run("realize the pinned six-point datum", {
        match realize_with_budget(&special(6, &[3, 3], &[3, 3], &[4]), &SearchBudget::default()) {
            RealizeOutcome::Realized(c) => {
                let got = c.cycles_text();
                expect(got == "(1,5,6)(2,3,4) (1,2,3)(4,6,5) (1,4,2,5,3)", &got)
            }
            other => Err(format!("{other:?}")),
        }
    });
    run("count the three-cycle triple", {
        let datum = general(3, &[&[3], &[3], &[3]]);
        match count_tuples(&datum, &SearchBudget::default()) {
            Ok(r) => expect(
                r.transitive_count == 2
                    && r.class_count == 1
                    && fraction(&r.weighted_count) == "1/3"
                    && r.per_class_aut == vec![3],
                &format!("{r:?}"),
            ),
            Err(e) => Err(e.to_string()),
        }
    });
    run("character class-sums on the smallest data", {
        let two = frobenius_disconnected(&general(2, &[&[2], &[2]]));
        let three = frobenius_disconnected(&general(3, &[&[3], &[3], &[3]]));
        expect(
            fraction(&two) == "1/2" && fraction(&three) == "1/3",
            &format!("{} {}", fraction(&two), fraction(&three)),
        )
    });
    run("verifier accepts the torus triple", {
        let datum = special(3, &[3], &[3], &[2]);
        let c = constellation(3, &[&[2, 3, 1], &[2, 3, 1], &[2, 3, 1]]);
        expect(
            verify_constellation(&datum, &c).is_ok(),
            "rejected a valid triple",
        )
    });
    run("verifier rejects a broken product", {
        let datum = special(3, &[3], &[3], &[2]);
        let c = constellation(3, &[&[2, 3, 1], &[3, 1, 2], &[2, 3, 1]]);
        expect(
            verify_constellation(&datum, &c).is_err(),
            "accepted a non-identity product",
        )
    });
    run("verifier rejects an intransitive tuple", {
        let datum = special(4, &[2, 2], &[2, 2], &[1, 1]);
        let c = constellation(
            4,
            &[&[2, 1, 4, 3], &[2, 1, 4, 3], &[2, 1, 3, 4], &[2, 1, 3, 4]],
        );
        expect(
            verify_constellation(&datum, &c).is_err(),
            "accepted an intransitive tuple",
        )
    });
    run("degree-multiplying datum transform", {
        let one = belyi_datum(&special(3, &[3], &[3], &[2]));
        let two = belyi_datum(&special(2, &[2], &[2], &[1, 1]));
        let one_want = general(3, &[&[3], &[3], &[3]]);
        let two_want = general(4, &[&[4], &[4], &[2, 2]]);
        expect(
            one == one_want && two == two_want,
            &format!("{one:?} {two:?}"),
        )
    });

    if failures == 0 {
        println!("selftest: all checks passed");
        ExitCode::from(0)
    } else {
        println!("selftest: {failures} checks failed");
        ExitCode::from(1)
    }
}

fn expect(ok: bool, detail: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        let mut msg = String::new();
        let _ = write!(msg, "got {detail}");
        Err(msg)
    }
}

fn special(d: usize, a: &[u32], b: &[u32], m: &[u32]) -> SpecialDatum {
    SpecialDatum::try_new(
        d,
        CyclePartition::new(a.to_vec()).expect("valid parts"),
        CyclePartition::new(b.to_vec()).expect("valid parts"),
        m.to_vec(),
    )
    .expect("valid datum")
}

fn general(d: usize, types: &[&[u32]]) -> GeneralDatum {
    GeneralDatum::try_new(
        d,
        types
            .iter()
            .map(|t| CyclePartition::new(t.to_vec()).expect("valid parts"))
            .collect(),
    )
    .expect("valid datum")
}

fn constellation(d: usize, images: &[&[u32]]) -> Constellation {
    Constellation::new(
        d,
        images
            .iter()
            .map(|im| hurwitz_core::Permutation::from_images(im.to_vec()).expect("valid images"))
            .collect(),
    )
    .expect("valid constellation")
}

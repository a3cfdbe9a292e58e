//! One line per acceptance criterion, with its tolerance and timing.
//! Runs without the libtest harness so the lines always show.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use valstrat::chains::{check_valuative_mostowski, classify_valchain, minimal_third_constant, Classification};
use valstrat::field::ExtendedValuation::Finite;
use valstrat::strat::load_catalog;
use valstrat::suites::{self, SuiteReport};

struct Outcome {
    ok: bool,
    detail: String,
}

fn suite(r: SuiteReport) -> Outcome {
    Outcome {
        ok: r.passed(),
        detail: r.verdict().to_string(),
    }
}

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_valstrat")).args(args).output().expect("binary runs");
    (String::from_utf8(out.stdout).expect("utf-8"), out.status.code().unwrap_or(-1))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn cone_vm2() -> Outcome {
    let (out, code) = run(&["demo", "cone"]);
    let e = load_catalog("cone").unwrap();
    let c = e.chain("augmented").unwrap();
    let classified = match classify_valchain(&c.points, &c.dims, &e.strat) {
        Ok(Classification::Chain(ch)) => {
            ch.kind.is_augmented()
                && ch.lambdas == [Finite(1), Finite(0)]
                && check_valuative_mostowski(&ch, &e.strat).map(|v| v.lhs == Finite(0) && v.required == Finite(1)) == Ok(true)
        }
        _ => false,
    };
    Outcome {
        ok: code == 0 && classified && out.contains("vm2: FAILS lhs=0 required=1"),
        detail: format!("augmented, lambdas (1, 0), vm2 lhs 0 vs required 1: {classified}; demo exit {code}"),
    }
}

fn third_constant() -> Outcome {
    let e = load_catalog("cone").unwrap();
    let c = e.chain("augmented").unwrap();
    let got = minimal_third_constant(&c.points, &c.dims, &e.strat);
    Outcome {
        ok: matches!(&got, Ok((_, Finite(-2)))),
        detail: match got {
            Ok((k, v)) => format!("C'''^2 = {k}, valuation {v} (want -2)"),
            Err(e) => e.to_string(),
        },
    }
}

fn catalog_rectify_and_gap() -> Outcome {
    suite(suites::rectify_suite(8, 50, 100))
}

fn golden_files() -> Outcome {
    let mut problems = Vec::new();
    let cases: [(&str, &[&str]); 4] = [
        ("demo_cone.txt", &["demo", "cone"]),
        ("demo_parabola.txt", &["demo", "parabola"]),
        ("demo_flat-line.txt", &["demo", "flat-line"]),
        ("selftest.txt", &["selftest"]),
    ];
    for (file, args) in cases {
        let (a, _) = run(args);
        let (b, _) = run(args);
        if a != b {
            problems.push(format!("{file}: differs between runs"));
        }
        match fs::read_to_string(golden(file)) {
            Ok(want) if want == a => {}
            Ok(_) => problems.push(format!("{file}: differs from the golden file")),
            Err(e) => problems.push(format!("{file}: {e}")),
        }
    }
    let rt = suites::element_roundtrip_suite(10, 100);
    if !rt.passed() {
        problems.push(rt.verdict().to_string());
    }
    Outcome {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            "4 golden outputs byte-stable, 100 elements round trip".into()
        } else {
            problems.join("; ")
        },
    }
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Option<Duration>, Check); 10] = [
        ("cone counterexample vm2 FAILS 0 < 1 (exact)", Some(Duration::from_secs(1)), cone_vm2),
        ("minimal third constant has valuation -2 (exact)", Some(Duration::from_secs(1)), third_constant),
        ("flags lemma on 200 seeded families (zero failures)", Some(Duration::from_secs(60)), || {
            suite(suites::flags_suite(7, 200))
        }),
        ("vvM on 500 products and 200 GL(O) pairs (zero failures)", Some(Duration::from_secs(30)), || {
            suite(suites::vvm_suite(11, 500, 200))
        }),
        ("projection algebra on 200 bases (zero failures)", None, || suite(suites::projection_suite(12, 200, 5))),
        ("delta invariance on 100 pairs (zero failures)", None, || {
            suite(suites::delta_invariance_suite(13, 100, 5))
        }),
        ("chain/flag round trip on the catalog", None, || suite(suites::catalog_flags_suite())),
        ("rectilinearization GL(O), isometry, inverse", None, catalog_rectify_and_gap),
        ("key lemma gap 2 >= 1 (exact)", None, || suite(suites::key_lemma_suite())),
        ("CLI golden files and element round trip", None, golden_files),
    ];
    let mut all = true;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took < l);
        let ok = out.ok && in_time;
        all &= ok;
        let budget = limit.map_or(String::new(), |l| format!(" budget {}s", l.as_secs()));
        println!(
            "criterion {:>2}: {} {name} [{:.2}s{budget}] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use omd::base::{build_2k, build_4k, build_6k};
use omd::cli::{admissible, sweep};
use omd::compose::{construct, Construction};
use omd::room::build_room;
use omd::search::SearchConfig;
use omd::verify::{brute_force_exists, BruteForce};
use omd::{verify, verify_hole, verify_transversal, DesignArray, Error, HostGraph, Point};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { passed: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { passed: false, detail: detail.into() }
}

fn within(limit: Duration, start: Instant, o: Outcome) -> Outcome {
    let t = start.elapsed();
    let detail = format!("{}; {:.2?} (limit {:?})", o.detail, t, limit);
    Outcome { passed: o.passed && t <= limit, detail }
}

fn complete_over(a: &DesignArray, n: usize) -> bool {
    *a.host() == HostGraph::complete(n) && verify(a).passed
}

fn base_constructions() -> Outcome {
    let start = Instant::now();
    for k in 1..=10 {
        let Ok((a, t, h)) = build_2k(k) else { return fail(format!("build_2k({k}) errored")) };
        if !complete_over(&a, 2 * k) {
            return fail(format!("build_2k({k}) does not verify"));
        }
        if !verify_transversal(&a, &t).passed || !verify_hole(&a, &h).passed || h.size() != k - 1 {
            return fail(format!("build_2k({k}) certificates rejected"));
        }
    }
    for k in 2..=8 {
        match (build_4k(k), build_6k(k)) {
            (Ok(a), Ok(b)) if complete_over(&a, 4 * k) && complete_over(&b, 6 * k) => {}
            _ => return fail(format!("build_4k/build_6k({k}) does not verify")),
        }
    }
    within(
        Duration::from_secs(5),
        start,
        pass("build_2k k<=10 with transversal and hole; build_4k, build_6k for 2<=k<=8"),
    )
}

fn room_engine() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::default();
    for n in [2, 8, 10, 12, 14, 16] {
        match build_room(n, &cfg) {
            Ok((sq, _)) if complete_over(&sq.array, n) && verify_transversal(&sq.array, &sq.transversal).passed => {}
            Ok(_) => return fail(format!("Room square of order {n} rejected")),
            Err(e) => return fail(format!("build_room({n}): {e}")),
        }
    }
    for n in [4, 6] {
        if !matches!(build_room(n, &cfg), Err(Error::NonExistent { .. })) {
            return fail(format!("build_room({n}) did not report nonexistence"));
        }
        let b = brute_force_exists(n, 1, u64::MAX);
        if b != BruteForce::NotExists {
            return fail(format!("exhaustive search for OMD({n},1) gave {b:?}"));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        pass("orders 2,8,10,12,14,16 built with transversals; 4 and 6 refused and exhaustively absent"),
    )
}

fn sweep_and_counting() -> (Outcome, Outcome) {
    let start = Instant::now();
    let rows = sweep(60, 6, &SearchConfig::default());
    let elapsed = start.elapsed();

    let mut paths = BTreeSet::new();
    let mut verified = 0;
    let mut problems = Vec::new();
    let mut counting = Vec::new();
    for row in &rows {
        let (n, k) = (row.n, row.k);
        match &row.outcome {
            Ok(c) if c.report.passed => {
                verified += 1;
                paths.insert(match c.construction {
                    Construction::Room { .. } => "room",
                    Construction::Diagonal2k => "2k",
                    Construction::Circulant4k => "4k",
                    Construction::Seeded6k => "6k",
                    Construction::Composed { .. } => "composed",
                });
                let counts = &c.report.counts;
                let per_line = n / (2 * k);
                if counts.non_empty != n * (n - 1) / (2 * k)
                    || c.design.occupied_count() != counts.non_empty
                    || counts.per_row.iter().chain(&counts.per_col).any(|&x| x != per_line)
                {
                    counting.push(format!("({n},{k})"));
                }
            }
            Ok(_) => problems.push(format!("({n},{k}) failed verification")),
            Err(Error::NonExistent { .. }) if !admissible(n, k) => {}
            Err(e) => problems.push(format!("({n},{k}): {e}")),
        }
    }
    for (n, k) in [(16, 2), (24, 2), (32, 2), (24, 3)] {
        let composed = rows.iter().any(|r| {
            r.n == n && r.k == k && matches!(&r.outcome, Ok(c) if matches!(c.construction, Construction::Composed { .. }))
        });
        if !composed {
            problems.push(format!("({n},{k}) did not use composition"));
        }
    }
    if paths.len() != 5 {
        problems.push(format!("only paths {paths:?} exercised"));
    }
    let admissible_count = rows.iter().filter(|r| admissible(r.n, r.k)).count();
    let sweep = if problems.is_empty() && verified == admissible_count && elapsed <= Duration::from_secs(300) {
        pass(format!(
            "{verified}/{admissible_count} admissible cases verified, paths {paths:?}; {elapsed:.2?} (limit 300s)"
        ))
    } else {
        fail(format!("{}; {elapsed:.2?}", problems.join(", ")))
    };
    let counting = if counting.is_empty() && verified > 0 {
        pass(format!("n(n-1)/2k cells and n/2k per line in all {verified} designs"))
    } else {
        fail(format!("counting law broken for {}", counting.join(", ")))
    };
    (sweep, counting)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::default();
    let mut checked = 0;
    for n in 2..=8 {
        for k in 1..=4 {
            let oracle = brute_force_exists(n, k, u64::MAX);
            let built = construct(n, k, &cfg);
            let agree = match (&oracle, &built) {
                (BruteForce::Exists(a), Ok(c)) => verify(a).passed && c.report.passed,
                (BruteForce::NotExists, Err(Error::NonExistent { .. })) => true,
                _ => false,
            };
            if !agree {
                let b = built.map(|c| c.construction.to_string());
                return fail(format!("OMD({n},{k}): oracle {oracle:?}, construct {b:?}"));
            }
            checked += 1;
        }
    }
    within(
        Duration::from_secs(120),
        start,
        pass(format!("exhaustive search and construct agree on all {checked} (n,k) with n<=8, k<=4")),
    )
}

/// Two blocks with equal point sets can trade places without breaking any
/// row or column, so such swaps are kept out of the sample and checked to be
/// accepted instead.
fn mutation_sensitivity() -> Outcome {
    let cfg = SearchConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut deletions, mut swaps, mut equivalent) = (0, 0, 0);
    for k in 1..=8 {
        for n in (2 * k..=16).step_by(2 * k).filter(|&n| admissible(n, k)) {
            let a = construct(n, k, &cfg).expect("admissible").design;
            let cells: Vec<(usize, usize)> = a.occupied().map(|(r, c, _)| (r, c)).collect();
            for &(r, c) in &cells {
                let mut b = a.clone();
                b.clear(r, c);
                if verify(&b).passed {
                    return fail(format!("OMD({n},{k}): deleting ({r},{c}) went unnoticed"));
                }
                deletions += 1;
            }
            let points = |p: (usize, usize)| -> BTreeSet<Point> { a.get(p.0, p.1).unwrap().points().collect() };
            let mut pairs: Vec<_> = (0..cells.len())
                .flat_map(|i| (i + 1..cells.len()).map(move |j| (i, j)))
                .collect();
            pairs.shuffle(&mut rng);
            let mut sampled = 0;
            for (i, j) in pairs {
                let mut b = a.clone();
                b.swap_cells(cells[i], cells[j]).unwrap();
                let accepted = verify(&b).passed;
                if points(cells[i]) == points(cells[j]) {
                    if !accepted {
                        return fail(format!("OMD({n},{k}): equivalent swap rejected"));
                    }
                    equivalent += 1;
                    continue;
                }
                if accepted {
                    return fail(format!("OMD({n},{k}): swapping {:?} and {:?} went unnoticed", cells[i], cells[j]));
                }
                sampled += 1;
                swaps += 1;
                if sampled == 100 {
                    break;
                }
            }
        }
    }
    pass(format!(
        "all {deletions} deletions and {swaps} sampled swaps rejected; {equivalent} equal-point-set swaps accepted as expected"
    ))
}

fn reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_omd");
    let cases: [&[&str]; 5] = [
        &["generate", "--n", "10", "--k", "1"],
        &["generate", "--n", "10", "--k", "1", "--seed", "12345"],
        &["generate", "--n", "12", "--k", "2"],
        &["generate", "--n", "24", "--k", "3", "--seed", "9"],
        &["generate", "--n", "40", "--k", "2", "--seed", "2"],
    ];
    for args in cases {
        let run = || Command::new(bin).args(args).output().expect("binary runs");
        let (a, b) = (run(), run());
        if !a.status.success() || a.stdout.is_empty() || a.stdout != b.stdout {
            return fail(format!("`omd {}` differs between runs", args.join(" ")));
        }
    }
    pass(format!("{} generate invocations byte-identical across two processes", cases.len()))
}

fn main() -> ExitCode {
    let (c3, c4) = sweep_and_counting();
    let results = [
        ("base constructions", base_constructions()),
        ("room engine", room_engine()),
        ("sweep n<=60, k<=6", c3),
        ("counting law", c4),
        ("oracle equivalence", oracle_equivalence()),
        ("mutation sensitivity", mutation_sensitivity()),
        ("reproducibility", reproducibility()),
    ];
    let mut ok = true;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {}: {} [{name}] {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        ok &= o.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

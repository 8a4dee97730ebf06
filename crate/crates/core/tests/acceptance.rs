//! Acceptance run: one PASS/FAIL line per criterion, each against its time
//! limit. Runs without the libtest harness so the lines always print.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use taxicab_core::fit::residual;
use taxicab_core::partition::two_power_representations;
use taxicab_core::{
    brute_force, count_row, five_square_tail_threshold, fit, is_sum_of_j_squares, series_counts,
    BoundPolicy, Budget, Certification, CountMode, CountTable, ExactCounter, FitFamily, MiSequence,
    PartitionQuery, Provenance, Solver, Status, TailKind,
};

type Check = Result<String, String>;

fn expect(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn found(s: &Solver, k: u32, j: u64, m: u64, bound: u64) -> u64 {
    s.taxicab(k, j, m, bound)
        .map(|o| o.status.found().unwrap_or(0))
        .unwrap_or(0)
}

fn published_tables() -> Check {
    let s = Solver::default();
    let two: Vec<u64> = (2..=10).map(|j| found(&s, 2, j, 2, 10_000)).collect();
    let three: Vec<u64> = (2..=9).map(|j| found(&s, 2, j, 3, 10_000)).collect();
    expect(
        two == [50, 27, 31, 20, 21, 22, 23, 24, 25] && three == [325, 54, 28, 29, 30, 31, 35, 49],
        format!("m=2: {two:?}; m=3: {three:?}"),
    )
}

fn ten_squares_three_ways() -> Check {
    let s = Solver::default();
    let mut detail = String::new();
    let mut ok = true;
    for (j, bound) in [(10, 2916), (11, 3364), (12, 3844)] {
        let o = s.decide_squares(j, 3).map_err(|e| e.to_string())?;
        ok &= o.status == Status::ProvedAbsent { bound };
        detail += &format!("j={j}: {}; ", o.status.label());
    }
    match s.certify_tail_nonexistence(3, 10).map_err(|e| e.to_string())? {
        Certification::Issued(c) => {
            if let TailKind::Nonexistence { j_final, threshold, .. } = c.kind {
                ok &= j_final == 12 && threshold == 50 && c.is_consistent();
                detail += &format!("J''={j_final}, t={threshold}");
            } else {
                ok = false;
            }
        }
        Certification::Refused(r) => {
            ok = false;
            detail += &format!("refused: {r:?}");
        }
    }
    expect(ok, detail)
}

fn decided(j: u64, m: u64, bound: u64) -> Check {
    let o = Solver::default().decide_squares(j, m).map_err(|e| e.to_string())?;
    expect(o.status == Status::ProvedAbsent { bound }, o.to_string())
}

fn five_squares_188() -> Check {
    let limit = 1_000_000;
    let t: CountTable<u8> = count_row(2, 5, limit, CountMode::Saturating { cap: 190 }, &Budget::default())
        .map_err(|e| e.to_string())?;
    let hit = t.row(5).iter().position(|&c| c == 188);
    let tail = five_square_tail_threshold().map_err(|e| e.to_string())?;
    expect(
        hit.is_none() && tail.threshold == 921_681 && tail.guaranteed_ways == 189,
        format!(
            "hit below 10^6: {hit:?}; threshold {} guarantees {}",
            tail.threshold, tail.guaranteed_ways
        ),
    )
}

fn complement_prefix(seq: &MiSequence) -> Check {
    expect(
        seq.complement == [3, 11, 17, 23, 32, 34, 35, 36, 38, 41, 43, 45, 46, 47, 49]
            && seq.undetermined.is_empty()
            && seq.columns.iter().all(|c| c.provenance == Provenance::Certified),
        format!("complement {:?}, undetermined {:?}", seq.complement, seq.undetermined),
    )
}

fn four_squares_prefix() -> Check {
    let s = Solver::default();
    let got: Vec<u64> = (1..=14).map(|m| found(&s, 2, 4, m, 1000)).collect();
    expect(
        got == [4, 31, 28, 52, 82, 90, 135, 130, 162, 198, 202, 252, 234, 210],
        format!("{got:?}"),
    )
}

fn oracle_equivalence() -> Check {
    let (n_max, j_max) = (60usize, 8usize);
    let mut cells = 0;
    for k in 1..=3u32 {
        let budget = Budget::default();
        let dp: CountTable<u64> = count_row(k, j_max, n_max, CountMode::Exact, &budget).map_err(|e| e.to_string())?;
        let series: CountTable<u64> = series_counts(k, n_max, j_max, &budget).map_err(|e| e.to_string())?;
        let mut memo = ExactCounter::new(k, CountMode::Exact).map_err(|e| e.to_string())?;
        for n in 0..=n_max {
            for j in 0..=j_max {
                let q = PartitionQuery::new(k, n as u64, j as u64);
                let brute = brute_force(&q, u64::MAX).map_err(|e| e.to_string())?.len() as u64;
                let rec = memo.count(&q).map_err(|e| e.to_string())?.value;
                let (a, b) = (dp.cell(n, j), series.cell(n, j));
                if a != brute || b != brute || rec != brute {
                    return Err(format!("k={k} n={n} j={j}: dp {a}, series {b}, memo {rec}, brute {brute}"));
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells agree across four methods"))
}

fn shift_property() -> Check {
    let mut violations = 0;
    let mut compared = 0;
    for k in [2u32, 3] {
        let t: CountTable<u64> = count_row(k, 13, 401, CountMode::Exact, &Budget::default()).map_err(|e| e.to_string())?;
        for n in 0..=400usize {
            for j in 2..=12usize {
                let (a, b) = (t.cell(n, j), t.cell(n + 1, j + 1));
                let equal_region = (n as u64) < (1u64 << k) * j as u64;
                if a > b || (equal_region && a != b) {
                    violations += 1;
                }
                compared += 1;
            }
        }
    }
    expect(violations == 0, format!("{compared} pairs, {violations} violations"))
}

fn closed_form_audit() -> Check {
    let t: CountTable<u8> =
        count_row(2, 12, 2000, CountMode::Saturating { cap: 1 }, &Budget::default()).map_err(|e| e.to_string())?;
    let mut disagreements = Vec::new();
    for j in 4..=12usize {
        for n in 1..=2000usize {
            if is_sum_of_j_squares(n as u64, j as u64) != (t.cell(n, j) > 0) {
                disagreements.push((n, j));
            }
        }
    }
    let nine: Vec<usize> = (1..=2000).filter(|&n| t.cell(n, 9) == 0).collect();
    let want = [1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 13, 14, 16, 19, 22];
    expect(
        disagreements.is_empty() && nine == want,
        format!("disagreements {disagreements:?}; nine-square failures {nine:?}"),
    )
}

fn cube_spot_checks() -> Check {
    let s = Solver::default();
    let a = found(&s, 3, 2, 2, 2000);
    let b = found(&s, 3, 2, 3, 100_000_000);
    let reps = two_power_representations(87_539_319, 3);
    expect(
        a == 1729 && b == 87_539_319 && reps == [(167, 436), (228, 423), (255, 414)],
        format!("Taxicab(3,2,2)={a}, Taxicab(3,2,3)={b}, representations {reps:?}"),
    )
}

fn fit_exactness(seq: &MiSequence) -> Check {
    let root: Vec<(f64, f64)> = (1..=50).map(|x| (x as f64, 2.0 * (x as f64).powf(0.125) - 1.0)).collect();
    let r = fit(&root, FitFamily::RootAffine { root: 8.0 }).map_err(|e| e.to_string())?;
    let exp: Vec<(f64, f64)> = (0..30).map(|i| (i as f64 * 0.2, 3.0 * (0.1 * i as f64).exp())).collect();
    let e = fit(&exp, FitFamily::Exponential).map_err(|e| e.to_string())?;
    let synthetic = (r.a - 2.0).abs() < 1e-9
        && (r.b + 1.0).abs() < 1e-9
        && (e.a - 3.0).abs() < 1e-9
        && (e.b - 0.5).abs() < 1e-9;

    let boundary: Vec<(f64, f64)> = seq
        .columns
        .iter()
        .filter_map(|c| c.onset().map(|j| (c.m as f64, j as f64)))
        .collect();
    let family = FitFamily::RootAffine { root: 8.0 };
    let ours = fit(&boundary, family).map_err(|e| e.to_string())?;
    let printed = residual(&boundary, family, 45.06, -44.7873);
    expect(
        synthetic && ours.residual <= printed,
        format!(
            "synthetic ({:.12}, {:.12}), ({:.12}, {:.12}); boundary fit ({:.4}, {:.4}) residual {:.3} vs printed {:.3}",
            r.a, r.b, e.a, e.b, ours.a, ours.b, ours.residual, printed
        ),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, limit: Duration, run: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (verdict, detail) = match result {
            Ok(d) if took <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d} (took {took:.1?}, limit {limit:?})")),
            Err(d) => ("FAIL", d),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("{verdict} {id:>2} {name} [{took:.2?}]: {detail}");
    };
    let secs = Duration::from_secs;

    report(1, "published square tables", secs(5), &mut published_tables);
    report(2, "ten or more squares in three ways", secs(10), &mut ten_squares_three_ways);
    report(3, "six squares in 36 ways", secs(60), &mut || decided(6, 36, 55_696));
    report(4, "seven squares in 44 ways", secs(300), &mut || decided(7, 44, 108_241));
    report(5, "five squares in 188 ways (desk)", secs(600), &mut five_squares_188);

    let mut shared: Option<MiSequence> = None;
    report(6, "complement prefix for m <= 50", secs(900), &mut || {
        let seq = Solver::default()
            .mi_sequence(2, 50, 40, BoundPolicy::Certified)
            .map_err(|e| e.to_string())?;
        let verdict = complement_prefix(&seq);
        shared = Some(seq);
        verdict
    });
    report(7, "four-square Taxicab prefix", secs(30), &mut four_squares_prefix);
    report(8, "oracle equivalence", secs(60), &mut oracle_equivalence);
    report(9, "shift inequality and equality region", secs(30), &mut shift_property);
    report(10, "closed-form square representability", secs(30), &mut closed_form_audit);
    report(11, "cube spot checks", secs(120), &mut cube_spot_checks);
    report(12, "fit exactness and boundary residual", secs(60), &mut || match &shared {
        Some(seq) => fit_exactness(seq),
        None => Err("classification for criterion 6 unavailable".into()),
    });

    if failures == 0 {
        println!("acceptance: all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 12 criteria failed");
        ExitCode::FAILURE
    }
}

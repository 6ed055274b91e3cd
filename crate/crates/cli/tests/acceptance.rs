//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use hdsfft::*;
use hdsfft_cli::bench::log_log_slope;
use hdsfft_cli::{demo_tilt, run_bench, summarize, BenchRow, Settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn mean_by_k(rows: &[BenchRow], d: usize, f: impl Fn(&BenchRow) -> f64) -> Vec<(f64, f64)> {
    summarize(rows)
        .iter()
        .filter(|s| s.d == d)
        .map(|s| {
            let group: Vec<f64> = rows
                .iter()
                .filter(|r| r.d == d && r.k == s.k)
                .map(&f)
                .collect();
            (s.k as f64, group.iter().sum::<f64>() / group.len() as f64)
        })
        .collect()
}

fn exact_sweep(rows: &[BenchRow], elapsed: Duration, limit: Duration) -> Verdict {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !(r.ok() && r.exact_support && r.l2_error < 1e-9))
        .map(|r| {
            format!(
                "k={} trial={} {} err={:e}",
                r.k, r.trial, r.status, r.l2_error
            )
        })
        .collect();
    let worst = rows.iter().map(|r| r.l2_error).fold(0.0, f64::max);
    verdict(
        bad.is_empty() && elapsed < limit,
        format!(
            "{} / {} trials exact, max l2 error {worst:.2e}, {:.1}s{}",
            rows.len() - bad.len(),
            rows.len(),
            elapsed.as_secs_f64(),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", bad.join(", "))
            }
        ),
    )
}

fn sweep(dims: usize, ks: Vec<usize>, trials: usize) -> (Vec<BenchRow>, Duration) {
    let s = Settings {
        dims: vec![dims],
        bandwidth: 20,
        subdim: Some(5),
        sparsity: Some(ks),
        trials,
        c: 5,
        epsilon: Some(1.0 / (2.0 * 20f64.powi(5))),
        seed: 2024,
        ..Settings::default()
    };
    let start = Instant::now();
    let rows = run_bench(&s).expect("sweep runs");
    (rows, start.elapsed())
}

fn scaling(rows100: &[BenchRow], rows1000: &[BenchRow]) -> (Verdict, Verdict) {
    let in_range = |pts: Vec<(f64, f64)>| {
        pts.into_iter()
            .filter(|p| p.0 >= 4.0 && p.0 <= 64.0)
            .collect::<Vec<_>>()
    };
    let samples = in_range(mean_by_k(rows100, 100, |r| r.samples as f64));
    let s_slope = log_log_slope(&samples);
    let s100 = mean_by_k(rows100, 100, |r| r.samples as f64);
    let s1000 = mean_by_k(rows1000, 1000, |r| r.samples as f64);
    let dim_growth: Vec<(f64, f64, f64)> = s1000
        .iter()
        .filter_map(|&(k, m1000)| {
            s100.iter()
                .find(|p| p.0 == k)
                .map(|&(_, m100)| (k, m100, m1000))
        })
        .collect();
    let grows = !dim_growth.is_empty() && dim_growth.iter().all(|&(_, a, b)| b > a);
    let growth: Vec<String> = dim_growth
        .iter()
        .map(|(k, a, b)| format!("k={k}: {a:.0}->{b:.0}"))
        .collect();
    let c3 = verdict(
        (0.8..=1.3).contains(&s_slope) && grows,
        format!(
            "samples slope {s_slope:.3} in [0.8, 1.3]; d=100 -> d=1000 mean samples {}",
            growth.join(", ")
        ),
    );
    let ticks = in_range(mean_by_k(rows100, 100, |r| r.ticks_ns as f64));
    let t_slope = log_log_slope(&ticks);
    let c4 = verdict(
        (0.7..=1.6).contains(&t_slope),
        format!("ticks slope {t_slope:.3} in [0.7, 1.6]"),
    );
    (c3, c4)
}

fn criterion5() -> Verdict {
    let start = Instant::now();
    let demo = demo_tilt(20).expect("demo runs");
    let elapsed = start.elapsed();
    verdict(
        demo.stalled() && demo.stall_iterations.unwrap_or(0) >= 2 && demo.exact() && elapsed < Duration::from_secs(1),
        format!(
            "parallel projection stalled after {:?} iterations with {} modes; tilt (3,4,5) recovered {} of 4 exactly={} in {:.3}s",
            demo.stall_iterations,
            demo.stall_recovered,
            demo.tilted.len(),
            demo.exact(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Brute-force transform on the full grid, keeping coefficients above 1e-6.
fn dense_peaks(oracle: &SignalOracle, n: u64) -> Vec<(Vec<i64>, Complex64)> {
    let ni = n as i64;
    let grid: Vec<Complex64> = (0..ni * ni)
        .map(|j| {
            oracle
                .evaluate(&[(j / ni) as f64 / n as f64, (j % ni) as f64 / n as f64])
                .unwrap()
        })
        .collect();
    let mut out = Vec::new();
    for w1 in -ni / 2..ni / 2 {
        for w2 in -ni / 2..ni / 2 {
            let acc: Complex64 = (0..ni * ni)
                .map(|j| {
                    let turns = (w1 * (j / ni) + w2 * (j % ni)).rem_euclid(ni) as f64 / n as f64;
                    grid[j as usize] * Complex64::from_polar(1.0, -TAU * turns)
                })
                .sum::<Complex64>()
                / (n * n) as f64;
            if acc.norm() > 1e-6 {
                out.push((vec![w1, w2], acc));
            }
        }
    }
    out
}

fn criterion6() -> Verdict {
    let part = Partition::trivial(2, 8).unwrap();
    let mut mismatches = Vec::new();
    let mut worst: f64 = 0.0;
    let mut fallbacks = 0;
    for i in 0..200u64 {
        let k = 1 + (i % 6) as usize;
        let truth = random_instance(2, 8, k, 6000 + i).unwrap();
        let oracle = SignalOracle::from_spectrum(&truth);
        let dense = dense_peaks(&oracle, 8);
        let got = match multi_phaseshift(&oracle, &part, &SolverConfig::new(k, 8)) {
            Ok(r) => {
                fallbacks += r.fallback_used as usize;
                r.recovered
            }
            Err(e) => {
                mismatches.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let want: BTreeSet<Vec<i64>> = dense.iter().map(|(w, _)| w.clone()).collect();
        let have: BTreeSet<Vec<i64>> = got.frequencies().map(|w| w.components().to_vec()).collect();
        if want != have {
            mismatches.push(format!("instance {i}: support differs"));
            continue;
        }
        for (w, a) in &dense {
            worst = worst.max((got.get(&FrequencyVector::new(w.clone())).unwrap() - a).norm());
        }
    }
    verdict(
        mismatches.is_empty() && worst < 1e-10,
        format!(
            "200 instances, {} mismatches, max coefficient deviation {worst:.2e}, {fallbacks} needed a tilt{}",
            mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(": {}", mismatches.join("; ")) }
        ),
    )
}

fn check(name: &str, ok: bool, notes: &mut Vec<String>) -> bool {
    if !ok {
        notes.push(format!("{name} failed"));
    }
    ok
}

fn criterion7() -> Verdict {
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ok = true;

    // unwrap/wrap: exhaustive for N = 4, d = 4 over several partitions.
    for blocks in [
        vec![4],
        vec![2, 2],
        vec![1, 3],
        vec![1, 1, 1, 1],
        vec![3, 1],
    ] {
        let part = Partition::new(blocks, 4).unwrap();
        let mut images = BTreeSet::new();
        let mut round = true;
        for idx in 0..256i64 {
            let w = FrequencyVector::new((0..4).map(|i| (idx >> (2 * i) & 3) - 2).collect());
            let u = unwrap_freq(&w, &part).unwrap();
            round &= wrap_freq(&u, &part).unwrap() == w;
            images.insert(u);
        }
        ok &= check(
            "exhaustive unwrap/wrap",
            round && images.len() == 256,
            &mut notes,
        );
    }
    let part = Partition::uniform(100, 5, 20).unwrap().reshuffled(5);
    let mut round = true;
    for _ in 0..2000 {
        let w = FrequencyVector::new((0..100).map(|_| rng.gen_range(-10..10)).collect());
        round &= wrap_freq(&unwrap_freq(&w, &part).unwrap(), &part).unwrap() == w;
    }
    ok &= check("random unwrap/wrap", round, &mut notes);

    // Aliasing identity against the direct sum.
    let mut alias_err: f64 = 0.0;
    for seed in 0..20 {
        let part = Partition::uniform(6, 2, 8).unwrap();
        let truth = random_instance(6, 8, 12, seed).unwrap();
        let oracle = SignalOracle::from_spectrum(&truth);
        let p = [13usize, 17, 29, 31][seed as usize % 4];
        let m = seed as usize % 3;
        let line = sample_line(&oracle, &part, m, None, p, part.default_epsilon()).unwrap();
        let fast = dft(&line);
        let direct = dft_direct(&line.values);
        let mut expect = vec![Complex64::new(0.0, 0.0); p];
        for (w, a) in truth.iter() {
            let u = unwrap_freq(w, &part).unwrap();
            expect[u[m].rem_euclid(p as i64) as usize] += a * p as f64;
        }
        let scale = expect.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for h in 0..p {
            alias_err = alias_err.max((fast.bins[h] - expect[h]).norm() / scale);
            alias_err = alias_err.max((direct[h] - expect[h]).norm() / scale);
        }
    }
    ok &= check("aliasing identity", alias_err < 1e-9, &mut notes);

    // Single-mode decoding and two-mode collisions on 1-D lines.
    let n = 64u64;
    let line_part = Partition::trivial(1, n).unwrap();
    let eps = line_part.default_epsilon();
    let mut decode_err: f64 = 0.0;
    for _ in 0..500 {
        let w = rng.gen_range(-32i64..32);
        let a = Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..TAU));
        let oracle = SignalOracle::from_spectrum(
            &SparseSpectrum::from_modes(1, n, [Mode::new(vec![w], a)]).unwrap(),
        );
        let p = [7usize, 11, 13, 37][rng.gen_range(0..4)];
        let u = dft(&sample_line(&oracle, &line_part, 0, None, p, eps).unwrap());
        let s = dft(&sample_line(&oracle, &line_part, 0, Some(0), p, eps).unwrap());
        let h = w.rem_euclid(p as i64) as usize;
        decode_err = decode_err.max((decode_frequency(&u, &s, h, eps).unwrap() - w as f64).abs());
        decode_err = decode_err.max((decode_coefficient(&u, h, p) - a).norm());
    }
    ok &= check("single-mode decoding", decode_err < 1e-9, &mut notes);

    let trials = 2000;
    let mut false_pass = 0;
    for _ in 0..trials {
        let p = [5usize, 7, 11][rng.gen_range(0..3)];
        let w1 = rng.gen_range(-32i64..32);
        let mut w2 = w1;
        while w2 == w1 || !(-32..32).contains(&w2) {
            w2 = w1 + p as i64 * rng.gen_range(-12i64..12);
        }
        let modes = [w1, w2].map(|w| {
            Mode::new(
                vec![w],
                Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(0.0..TAU)),
            )
        });
        let oracle = SignalOracle::from_spectrum(&SparseSpectrum::from_modes(1, n, modes).unwrap());
        let u = dft(&sample_line(&oracle, &line_part, 0, None, p, eps).unwrap());
        let s = dft(&sample_line(&oracle, &line_part, 0, Some(0), p, eps).unwrap());
        let h = w1.rem_euclid(p as i64) as usize;
        if collision_test(&u, &s, h, 1e-6, 0.0).unwrap_or(false) {
            false_pass += 1;
        }
    }
    let false_rate = false_pass as f64 / trials as f64;
    ok &= check("collision detection", false_rate < 0.01, &mut notes);

    // Duality identities.
    let mut dual: f64 = 0.0;
    for _ in 0..2000 {
        let blocks = [vec![2, 2], vec![1, 3], vec![4]][rng.gen_range(0..3)].clone();
        let part = Partition::new(blocks, 8).unwrap();
        let w = FrequencyVector::new((0..4).map(|_| rng.gen_range(-4..4)).collect());
        let u = unwrap_freq(&w, &part).unwrap();
        let t: Vec<f64> = (0..part.reduced_dim())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let full = unwrap_time(&t, &part).unwrap();
        let lhs: f64 = u.iter().zip(&t).map(|(&a, &b)| a as f64 * b).sum();
        dual = dual.max((lhs - w.dot(&full)).abs());

        let tp = TiltParams::ENUMERATION[rng.gen_range(0..4)];
        let v = [rng.gen_range(-10..10), rng.gen_range(-10..10)];
        let tt = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let tv = tilt_freq(v, &tp);
        let st = tilt_time(tt, &tp);
        let lhs = tv[0] as f64 * tt[0] + tv[1] as f64 * tt[1];
        dual = dual.max((lhs - (v[0] as f64 * st[0] + v[1] as f64 * st[1])).abs());
    }
    ok &= check("duality", dual < 1e-12, &mut notes);

    // Worst-case bound.
    let bound = |n: u64, d: usize, sub: usize, k: usize| {
        worst_case_bound(&CollisionBoundInput::new(
            Partition::uniform(d, sub, n).unwrap(),
            k,
        ))
    };
    ok &= check(
        "bound at k=1",
        bound(20, 100, 5, 1) == 0.0 && bound(4, 2, 1, 1) == 0.0,
        &mut notes,
    );
    let mono = (0..10).all(|e| bound(20, 100, 5, 1 << e) <= bound(20, 100, 5, 1 << (e + 1)))
        && (1..40).all(|k| bound(8, 4, 2, k) <= bound(8, 4, 2, k + 1));
    ok &= check("bound monotone in k", mono, &mut notes);
    let mut mc_worst = f64::NEG_INFINITY;
    for (i, (n, d, sub, k)) in [
        (8u64, 2usize, 1usize, 4usize),
        (8, 2, 1, 8),
        (4, 2, 1, 4),
        (16, 4, 2, 12),
        (6, 4, 2, 16),
        (20, 100, 5, 64),
        (20, 100, 5, 1024),
    ]
    .into_iter()
    .enumerate()
    {
        let inp = CollisionBoundInput::new(Partition::uniform(d, sub, n).unwrap(), k);
        let est = monte_carlo_collision_rate(&inp, 1000, 900 + i as u64).unwrap();
        mc_worst = mc_worst.max(est.rate - worst_case_bound(&inp) - 3.0 * est.stderr);
    }
    ok &= check("Monte-Carlo under bound", mc_worst <= 0.0, &mut notes);

    verdict(
        ok,
        format!(
            "bijection, aliasing {alias_err:.1e}, decode {decode_err:.1e}, collision false-pass {false_pass}/{trials} ({:.2}%), duality {dual:.1e}, MC excess {mc_worst:.3}{}",
            100.0 * false_rate,
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join(", ")) }
        ),
    )
}

fn drop_ticks(csv: &str) -> Option<String> {
    let header: Vec<&str> = csv.lines().next()?.split(',').collect();
    let col = header.iter().position(|&h| h == "ticks_ns")?;
    Some(
        csv.lines()
            .map(|l| {
                l.split(',')
                    .enumerate()
                    .filter(|&(i, _)| i != col)
                    .map(|(_, f)| f)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n"),
    )
}

fn criterion8() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_hdsfft"))
            .args([
                "--mode",
                "bench",
                "--dims",
                "20,40",
                "--sparsity",
                "1,2,4,8",
                "--trials",
                "4",
                "--seed",
                "31",
            ])
            .arg("--out")
            .arg(&out)
            .output()
            .expect("binary runs");
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read_to_string(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let rows = a.lines().count() - 1;
    match (drop_ticks(&a), drop_ticks(&b)) {
        (Some(x), Some(y)) => verdict(
            x == y && rows == 32,
            format!("{rows} rows, identical without ticks_ns: {}", x == y),
        ),
        _ => verdict(false, "ticks_ns column missing"),
    }
}

fn main() {
    let mut verdicts = Vec::new();

    let (rows100, t100) = sweep(100, vec![1, 2, 4, 8, 16, 32, 64], 20);
    verdicts.push((
        "1",
        "exact recovery, d=100",
        exact_sweep(&rows100, t100, Duration::from_secs(600)),
    ));
    let (rows1000, t1000) = sweep(1000, vec![1, 4, 16], 5);
    verdicts.push((
        "2",
        "exact recovery, d=1000",
        exact_sweep(&rows1000, t1000, Duration::from_secs(600)),
    ));
    let (c3, c4) = scaling(&rows100, &rows1000);
    verdicts.push(("3", "sampling scales linearly in k", c3));
    verdicts.push(("4", "runtime scales linearly in k", c4));
    verdicts.push(("5", "rectangle worst case needs the tilt", criterion5()));
    verdicts.push(("6", "agrees with dense 2-D transform", criterion6()));
    verdicts.push(("7", "property suites", criterion7()));
    verdicts.push(("8", "bench CSV is deterministic", criterion8()));

    let mut failed = 0;
    for (id, name, v) in &verdicts {
        println!(
            "criterion {id} {} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += !v.pass as usize;
    }
    println!(
        "{} of {} criteria passed",
        verdicts.len() - failed,
        verdicts.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

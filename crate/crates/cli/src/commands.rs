use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use cooc::oracle::{
    oracle_gap, oracle_nonoverlap, oracle_occurrences, oracle_topk, oracle_topk_far,
};
use cooc::{ConsecutivePair, FullIndex, Mode, PairOrder, RecursiveIndex, Text};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{
    BenchArgs, BenchStructure, BuildArgs, FamilyArgs, OracleArgs, PatternArg, QueryArgs,
    StatsArgs, Structure, StoreMode, VerifyArgs,
};
use crate::error::CliError;
use crate::format::{self, LoadedIndex};

/// Write to stdout, exiting quietly when the reader has gone away: output
/// piped into a pager that quits early is not an error.
fn emit(text: &str) {
    use std::io::Write;
    if std::io::stdout().lock().write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
}

fn emitln(line: std::fmt::Arguments) {
    emit(&format!("{line}\n"));
}

fn read_raw(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<Text, CliError> {
    Text::new(read_raw(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_index(path: &Path) -> Result<LoadedIndex, CliError> {
    format::deserialize(&read_raw(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_pattern(arg: &PatternArg) -> Result<Vec<u8>, CliError> {
    match (&arg.pattern, &arg.pattern_file) {
        (Some(p), None) => Ok(p.as_bytes().to_vec()),
        (None, Some(f)) => read_raw(f),
        _ => Err(CliError::Usage("give exactly one of --pattern, --pattern-file".into())),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Accepts "1", "0.5", "0.25", or "num/den"; the recursive structure needs
/// 0 < eps <= 1 with a reduced denominator of at most 4.
pub fn parse_epsilon(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Usage(format!("cannot parse epsilon {s:?}; use \"1\", \"0.5\", or \"num/den\""));
    let (num, den): (u64, u64) = if let Some((a, b)) = s.split_once('/') {
        (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    } else if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let scale = 10u64.pow(frac.len() as u32);
        let frac: u64 = frac.parse().map_err(|_| bad())?;
        (whole * scale + frac, scale)
    } else {
        (s.trim().parse().map_err(|_| bad())?, 1)
    };
    if num == 0 || den == 0 {
        return Err(CliError::Usage("epsilon must be positive".into()));
    }
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    if num > den {
        return Err(CliError::Usage(format!(
            "epsilon must be at most 1, got {num}/{den}"
        )));
    }
    if den > 4 {
        return Err(CliError::Usage(format!(
            "epsilon {num}/{den} is not representable; reduced denominators up to 4 are supported (1, 0.75, 2/3, 0.5, 1/3, 0.25)"
        )));
    }
    Ok((num as u32, den as u32))
}

fn store_name(m: StoreMode) -> &'static str {
    match m {
        StoreMode::Topk => "topk",
        StoreMode::Far => "far",
        StoreMode::GapAlpha => "gap-alpha",
        StoreMode::GapBeta => "gap-beta",
        StoreMode::Nonoverlap => "nonoverlap",
    }
}

fn collect_recursive_modes(
    stores: &[StoreMode],
    alpha: Option<u64>,
    beta: Option<u64>,
    n: u64,
) -> Result<Vec<Mode>, CliError> {
    let has = |m: StoreMode| stores.contains(&m);
    let mut modes = Vec::new();
    if has(StoreMode::Topk) {
        modes.push(Mode::Closest);
    }
    if has(StoreMode::Far) {
        modes.push(Mode::Farthest);
    }
    match (has(StoreMode::GapAlpha), alpha) {
        (true, Some(a)) if a >= 1 => modes.push(Mode::ClosestMinGap(a)),
        (true, Some(_)) => return Err(CliError::Usage("--alpha must be at least 1".into())),
        (true, None) => {
            return Err(CliError::Usage("--modes gap-alpha requires --alpha".into()))
        }
        (false, Some(_)) => {
            return Err(CliError::Usage("--alpha only applies to --modes gap-alpha".into()))
        }
        (false, None) => {}
    }
    match (has(StoreMode::GapBeta), beta) {
        (true, Some(b)) if b >= 1 => modes.push(Mode::FarthestMaxGap(b)),
        (true, Some(_)) => return Err(CliError::Usage("--beta must be at least 1".into())),
        (true, None) => return Err(CliError::Usage("--modes gap-beta requires --beta".into())),
        (false, Some(_)) => {
            return Err(CliError::Usage("--beta only applies to --modes gap-beta".into()))
        }
        (false, None) => {}
    }
    if has(StoreMode::Nonoverlap) && !modes.contains(&Mode::FarthestMaxGap(n)) {
        modes.push(Mode::FarthestMaxGap(n));
    }
    if modes.is_empty() {
        return Err(CliError::Usage("--modes must name at least one store".into()));
    }
    Ok(modes)
}

fn mode_label(m: Mode, n: u64) -> String {
    match m {
        Mode::Closest => "topk".into(),
        Mode::Farthest => "far".into(),
        Mode::ClosestMinGap(a) => format!("gap-alpha={a}"),
        Mode::FarthestMaxGap(b) if b == n => "nonoverlap".into(),
        Mode::FarthestMaxGap(b) => format!("gap-beta={b}"),
    }
}

fn full_report(index: &FullIndex, file_bytes: usize) -> String {
    let s = index.stats();
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} {v}");
    };
    kv("kind", "full".into());
    kv("n", s.n.to_string());
    kv("modes", if index.has_far() { "topk,far".into() } else { "topk".to_string() });
    kv("node_count", s.node_count.to_string());
    kv("path_count", s.path_count.to_string());
    kv("longest_path", s.longest_path.to_string());
    kv("segments", s.segments.to_string());
    kv("cells", s.cells.to_string());
    if let (Some(fs), Some(fc)) = (s.far_segments, s.far_cells) {
        kv("far_segments", fs.to_string());
        kv("far_cells", fc.to_string());
    }
    kv("stored_bits", s.stored_bits.to_string());
    kv("file_bytes", file_bytes.to_string());
    out
}

fn recursive_report(index: &RecursiveIndex, file_bytes: usize) -> String {
    let s = index.stats();
    let n = s.n as u64;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} {v}");
    };
    kv("kind", "recursive".into());
    kv("n", s.n.to_string());
    let labels: Vec<String> =
        index.modes().iter().map(|&m| mode_label(m, n)).collect();
    kv("modes", labels.join(","));
    kv("node_count", s.node_count.to_string());
    kv("epsilon", format!("{}/{}", s.epsilon.0, s.epsilon.1));
    let schedule: Vec<String> = std::iter::once(s.n)
        .chain(index.taus().iter().copied())
        .map(|t| t.to_string())
        .collect();
    kv("tau_schedule", schedule.join(","));
    kv("terminal_bound", s.terminal_bound.to_string());
    kv("levels", s.levels.len().to_string());
    for lv in &s.levels {
        let p = format!("level.{}", lv.level);
        kv(&format!("{p}.tau"), lv.tau.to_string());
        kv(&format!("{p}.trees"), lv.trees.to_string());
        kv(&format!("{p}.tree_nodes"), lv.tree_nodes.to_string());
        kv(&format!("{p}.clusters"), lv.clusters.to_string());
        kv(&format!("{p}.spine_nodes"), lv.spine_nodes.to_string());
        kv(&format!("{p}.segments"), lv.segments.to_string());
        kv(&format!("{p}.cells"), lv.cells.to_string());
        kv(&format!("{p}.stored_bits"), lv.stored_bits.to_string());
        kv(&format!("{p}.max_spine_segments"), lv.max_spine_segments.to_string());
    }
    kv("file_bytes", file_bytes.to_string());
    out
}

pub fn run_build(args: &BuildArgs) -> Result<(), CliError> {
    let text = read_text(&args.text)?;
    let n = text.as_bytes().len() as u64;
    let started = Instant::now();
    let (bytes, report) = match args.structure {
        Structure::Full => {
            if let Some(bad) = args
                .modes
                .iter()
                .find(|m| !matches!(m, StoreMode::Topk | StoreMode::Far))
            {
                return Err(CliError::Usage(format!(
                    "store {} needs --structure recursive",
                    store_name(*bad)
                )));
            }
            if args.alpha.is_some() || args.beta.is_some() {
                return Err(CliError::Usage(
                    "--alpha/--beta configure recursive gap stores".into(),
                ));
            }
            let index = FullIndex::build(text, args.modes.contains(&StoreMode::Far));
            let bytes = format::serialize_full(&index);
            let report = full_report(&index, bytes.len());
            (bytes, report)
        }
        Structure::Recursive => {
            let eps = parse_epsilon(&args.epsilon)?;
            let modes = collect_recursive_modes(&args.modes, args.alpha, args.beta, n)?;
            let index = RecursiveIndex::build(text, eps, &modes)?;
            let bytes = format::serialize_recursive(&index);
            let report = recursive_report(&index, bytes.len());
            (bytes, report)
        }
    };
    let millis = started.elapsed().as_millis();
    fs::write(&args.out, &bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", args.out.display())))?;
    emitln(format_args!("wrote {}", args.out.display()));
    emit(&report);
    emitln(format_args!("build_millis {millis}"));
    Ok(())
}

fn answer(
    loaded: &LoadedIndex,
    pattern: &[u8],
    fam: &FamilyArgs,
) -> Result<Vec<ConsecutivePair>, CliError> {
    match loaded {
        LoadedIndex::Full(ix) => {
            if let Some(k) = fam.topk {
                Ok(ix.query_topk(pattern, k))
            } else if let Some(k) = fam.topk_far {
                Ok(ix.query_topk_far(pattern, k)?)
            } else {
                Err(CliError::Data(
                    "band and non-overlap queries need a recursive-structure index; \
                     rebuild with --structure recursive"
                        .into(),
                ))
            }
        }
        LoadedIndex::Recursive(ix) => {
            if let Some(k) = fam.topk {
                Ok(ix.query_topk(pattern, k)?)
            } else if let Some(k) = fam.topk_far {
                Ok(ix.query_topk_far(pattern, k)?)
            } else if let Some(b) = fam.gap_beta {
                Ok(ix.query_gap_with_beta(pattern, b)?)
            } else if let Some(a) = fam.gap_alpha {
                Ok(ix.query_gap_with_alpha(pattern, a)?)
            } else {
                Ok(ix.query_nonoverlapping(pattern)?)
            }
        }
    }
}

fn print_pairs(pairs: &[ConsecutivePair]) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for p in pairs {
        if writeln!(out, "{} {} {}", p.left, p.right, p.distance()).is_err() {
            std::process::exit(0);
        }
    }
}

pub fn run_query(args: &QueryArgs) -> Result<(), CliError> {
    let loaded = load_index(&args.index)?;
    let pattern = read_pattern(&args.pattern)?;
    let pairs = answer(&loaded, &pattern, &args.family)?;
    print_pairs(&pairs);
    Ok(())
}

pub fn run_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let text = read_raw(&args.text)?;
    let pattern = read_pattern(&args.pattern)?;
    let fam = &args.family;
    if args.alpha.is_some() && fam.gap_beta.is_none() {
        return Err(CliError::Usage("--alpha accompanies --gap-beta here".into()));
    }
    if args.beta.is_some() && fam.gap_alpha.is_none() {
        return Err(CliError::Usage("--beta accompanies --gap-alpha here".into()));
    }
    let pairs = if let Some(k) = fam.topk {
        oracle_topk(&text, &pattern, k)
    } else if let Some(k) = fam.topk_far {
        oracle_topk_far(&text, &pattern, k)
    } else if let Some(b) = fam.gap_beta {
        let a = args
            .alpha
            .ok_or_else(|| CliError::Usage("--gap-beta needs --alpha (the fixed bound)".into()))?;
        if b < a {
            return Err(CliError::Data(format!(
                "gap band requires alpha <= beta, got alpha={a}, beta={b}"
            )));
        }
        oracle_gap(&text, &pattern, a as usize, b as usize)
    } else if let Some(a) = fam.gap_alpha {
        let b = args
            .beta
            .ok_or_else(|| CliError::Usage("--gap-alpha needs --beta (the fixed bound)".into()))?;
        if a > b {
            return Err(CliError::Data(format!(
                "gap band requires alpha <= beta, got alpha={a}, beta={b}"
            )));
        }
        let mut v = oracle_gap(&text, &pattern, a as usize, b as usize);
        v.sort_unstable_by(|x, y| PairOrder::FarFirst.cmp(x, y));
        v
    } else {
        oracle_nonoverlap(&text, &pattern)
    };
    print_pairs(&pairs);
    Ok(())
}

pub fn run_stats(args: &StatsArgs) -> Result<(), CliError> {
    let raw = read_raw(&args.index)?;
    let loaded = format::deserialize(&raw)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.index.display())))?;
    let report = match &loaded {
        LoadedIndex::Full(ix) => full_report(ix, raw.len()),
        LoadedIndex::Recursive(ix) => recursive_report(ix, raw.len()),
    };
    emit(&report);
    Ok(())
}

fn show_pattern(pattern: &[u8]) -> String {
    format!("{:?}", String::from_utf8_lossy(pattern))
}

fn show_pairs(pairs: &[ConsecutivePair]) -> String {
    let items: Vec<String> =
        pairs.iter().map(|p| format!("({},{})", p.left, p.right)).collect();
    format!("[{}]", items.join(" "))
}

struct TrialOutcome {
    comparisons: u64,
}

fn verify_trial(
    loaded: &LoadedIndex,
    text: &[u8],
    rng: &mut ChaCha8Rng,
    trial: u64,
) -> Result<TrialOutcome, CliError> {
    let pattern: Vec<u8> = if rng.gen_bool(0.1) {
        (0..1 + rng.gen_range(0..3)).map(|_| rng.gen_range(b'!'..=b'~')).collect()
    } else {
        let a = rng.gen_range(0..text.len());
        let b = (a + 1 + rng.gen_range(0..7)).min(text.len());
        text[a..b].to_vec()
    };
    let occ = oracle_occurrences(text, &pattern).len();
    let ks = [0, 1, 2, 5, occ.saturating_sub(1), occ + 3];
    let mut comparisons = 0u64;
    let mismatch = |family: &str, detail: String| {
        CliError::Mismatch(format!(
            "mismatch family={family} trial={trial} pattern={} {detail}",
            show_pattern(&pattern)
        ))
    };
    let check = |family: &str,
                 detail: String,
                 got: &[ConsecutivePair],
                 want: &[ConsecutivePair],
                 comparisons: &mut u64|
     -> Result<(), CliError> {
        if got != want {
            return Err(mismatch(
                family,
                format!("{detail} got={} want={}", show_pairs(got), show_pairs(want)),
            ));
        }
        *comparisons += 1;
        Ok(())
    };

    match loaded {
        LoadedIndex::Full(ix) => {
            for k in ks {
                let got = ix.query_topk(&pattern, k);
                let want = oracle_topk(text, &pattern, k);
                check("topk", format!("k={k}"), &got, &want, &mut comparisons)?;
                if ix.has_far() {
                    let got = ix.query_topk_far(&pattern, k)?;
                    let want = oracle_topk_far(text, &pattern, k);
                    check("topk-far", format!("k={k}"), &got, &want, &mut comparisons)?;
                }
            }
        }
        LoadedIndex::Recursive(ix) => {
            let n = text.len() as u64;
            let min_beta = ix
                .modes()
                .iter()
                .filter_map(|m| match m {
                    Mode::FarthestMaxGap(b) => Some(*b),
                    _ => None,
                })
                .min();
            for &mode in ix.modes() {
                match mode {
                    Mode::Closest => {
                        for k in ks {
                            let got = ix.query_topk(&pattern, k)?;
                            let want = oracle_topk(text, &pattern, k);
                            check("topk", format!("k={k}"), &got, &want, &mut comparisons)?;
                        }
                    }
                    Mode::Farthest => {
                        for k in ks {
                            let got = ix.query_topk_far(&pattern, k)?;
                            let want = oracle_topk_far(text, &pattern, k);
                            check("topk-far", format!("k={k}"), &got, &want, &mut comparisons)?;
                        }
                    }
                    Mode::ClosestMinGap(a) => {
                        let qb = a + rng.gen_range(0..10);
                        let got = ix.query_gap_with_beta(&pattern, qb)?;
                        let want = oracle_gap(text, &pattern, a as usize, qb as usize);
                        check(
                            "gap-beta",
                            format!("band=[{a},{qb}]"),
                            &got,
                            &want,
                            &mut comparisons,
                        )?;
                    }
                    Mode::FarthestMaxGap(b) => {
                        if b == n {
                            let got = ix.query_nonoverlapping(&pattern)?;
                            let want = oracle_nonoverlap(text, &pattern);
                            check("nonoverlap", String::new(), &got, &want, &mut comparisons)?;
                        }
                        if Some(b) == min_beta {
                            let qa = 1 + rng.gen_range(0..b);
                            let got = ix.query_gap_with_alpha(&pattern, qa)?;
                            let mut want =
                                oracle_gap(text, &pattern, qa as usize, b as usize);
                            want.sort_unstable_by(|x, y| PairOrder::FarFirst.cmp(x, y));
                            check(
                                "gap-alpha",
                                format!("band=[{qa},{b}]"),
                                &got,
                                &want,
                                &mut comparisons,
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(TrialOutcome { comparisons })
}

pub fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.trials < 1 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let raw = read_raw(&args.text)?;
    if raw.is_empty() {
        return Err(CliError::Data(format!("{}: text is empty", args.text.display())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut comparisons = 0u64;
    let structures: Vec<LoadedIndex> = match &args.index {
        Some(path) => {
            let loaded = load_index(path)?;
            let stored = match &loaded {
                LoadedIndex::Full(ix) => ix.text_index().text().as_bytes(),
                LoadedIndex::Recursive(ix) => ix.text_index().text().as_bytes(),
            };
            if stored != raw.as_slice() {
                return Err(CliError::Mismatch(format!(
                    "index {} stores a different text than {}",
                    path.display(),
                    args.text.display()
                )));
            }
            vec![loaded]
        }
        None => {
            let eps = parse_epsilon(&args.epsilon)?;
            let n = raw.len() as u64;
            let alpha = 1 + rng.gen_range(0..4);
            let beta = alpha + rng.gen_range(0..8);
            let full = FullIndex::build(Text::new(raw.clone()).expect("checked above"), true);
            let rec = RecursiveIndex::build(
                Text::new(raw.clone()).expect("checked above"),
                eps,
                &[
                    Mode::Closest,
                    Mode::Farthest,
                    Mode::ClosestMinGap(alpha),
                    Mode::FarthestMaxGap(beta),
                    Mode::FarthestMaxGap(n),
                ],
            )?;
            vec![LoadedIndex::Full(full), LoadedIndex::Recursive(rec)]
        }
    };
    for trial in 0..args.trials {
        for loaded in &structures {
            comparisons += verify_trial(loaded, &raw, &mut rng, trial)?.comparisons;
        }
    }
    emitln(format_args!(
        "verified: {comparisons} comparisons across {} trials, all families agree with brute force",
        args.trials
    ));
    Ok(())
}

pub fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.patterns == 0 || args.ks.is_empty() || args.sizes.is_empty() {
        return Err(CliError::Usage("--patterns, --sizes, and --ks must be non-empty".into()));
    }
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let raw = read_raw(&args.text)?;
    if raw.is_empty() {
        return Err(CliError::Data(format!("{}: text is empty", args.text.display())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for &size in &args.sizes {
        let n = if size == 0 { raw.len() } else { size.min(raw.len()) };
        let slice = &raw[..n];
        let patterns: Vec<Vec<u8>> = (0..args.patterns)
            .map(|_| {
                let a = rng.gen_range(0..n);
                let b = (a + 1 + rng.gen_range(0..8)).min(n);
                slice[a..b].to_vec()
            })
            .collect();

        if matches!(args.structure, BenchStructure::Full | BenchStructure::Both) {
            let t0 = Instant::now();
            let index = FullIndex::build(
                Text::new(slice.to_vec()).map_err(|e| CliError::Data(e.to_string()))?,
                true,
            );
            emitln(format_args!(
                "structure=full n={n} build_ms={} stored_bits={}",
                t0.elapsed().as_millis(),
                index.stats().stored_bits
            ));
            bench_queries("full", n, &patterns, &args.ks, args.threads, |p, k| {
                index.query_topk(p, k).len()
            });
        }
        if matches!(args.structure, BenchStructure::Recursive | BenchStructure::Both) {
            let eps = parse_epsilon(&args.epsilon)?;
            let t0 = Instant::now();
            let index = RecursiveIndex::build(
                Text::new(slice.to_vec()).map_err(|e| CliError::Data(e.to_string()))?,
                eps,
                &[Mode::Closest, Mode::Farthest],
            )?;
            let stored: u64 = index.stats().levels.iter().map(|l| l.stored_bits).sum();
            emitln(format_args!(
                "structure=recursive n={n} build_ms={} stored_bits={stored}",
                t0.elapsed().as_millis()
            ));
            bench_queries("recursive", n, &patterns, &args.ks, args.threads, |p, k| {
                index.query_topk(p, k).expect("closest store present").len()
            });
        }
    }
    Ok(())
}

fn bench_queries(
    label: &str,
    n: usize,
    patterns: &[Vec<u8>],
    ks: &[usize],
    threads: usize,
    run: impl Fn(&[u8], usize) -> usize + Sync,
) {
    let run = &run;
    let mut warmup = 0usize;
    for p in patterns {
        warmup += run(p, 1);
    }
    emitln(format_args!("structure={label} n={n} warmup_pairs={warmup}"));
    for &k in ks {
        let t0 = Instant::now();
        let pairs: usize = if threads <= 1 {
            patterns.iter().map(|p| run(p, k)).sum()
        } else {
            std::thread::scope(|scope| {
                let chunk = patterns.len().div_ceil(threads);
                let handles: Vec<_> = patterns
                    .chunks(chunk)
                    .map(|part| scope.spawn(move || part.iter().map(|p| run(p, k)).sum::<usize>()))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("bench worker")).sum()
            })
        };
        let elapsed = t0.elapsed();
        emitln(format_args!(
            "structure={label} n={n} k={k} queries={} threads={threads} pairs={pairs} avg_ns={} total_us={}",
            patterns.len(),
            elapsed.as_nanos() as u64 / patterns.len().max(1) as u64,
            elapsed.as_micros()
        ));
    }
}

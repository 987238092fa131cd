use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{RunConfig, CORPUS_ENV};
use super::{Command, CorpusArgs, Options, EXIT_INPUT, EXIT_OK};
use crate::classifier::segment;
use crate::corpus::{read_audio, serialize_phn, write_wav, Corpus, PhoneClassMap};
use crate::error::{Error, Result};
use crate::eval::{
    boundary_errors, class_histograms, collect_levels, frame_accuracy, overlap_mass,
    run_noise_experiment, threshold_grid, threshold_sweep, ClassPools, CorpusPools, FileFailure,
    FrameCounts, Histogram, NoiseLevel, SplitPools, GRID_MAX,
};
use crate::lpc::sfdi_contour_with;
use crate::synth::synth_corpus;

pub(super) fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Analyze { audio, opts } => analyze(&audio, &opts),
        Command::Segment { audio, opts } => segment_file(&audio, &opts),
        Command::Evaluate {
            corpus,
            calibrate,
            opts,
        } => evaluate(&corpus, calibrate, &opts),
        Command::Sweep { corpus, opts } => sweep(&corpus, &opts),
        Command::Histogram { corpus, opts } => histogram(&corpus, &opts),
        Command::Noise { corpus, opts } => noise(&corpus, &opts),
        Command::Synth {
            count,
            rate,
            seed,
            out_dir,
        } => synth(count, rate, seed, &out_dir),
    }
}

fn resolve(opts: &Options) -> Result<RunConfig> {
    let cfg = opts.resolve()?;
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::from(e).in_file(&cfg.out_dir))?;
    Ok(cfg)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::from(e).in_file(path))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_out(dir, name, &text)
}

fn metadata(
    command: &str,
    cfg: &RunConfig,
    input: serde_json::Value,
    results: impl Serialize,
) -> serde_json::Value {
    json!({
        "tool": "sfdi",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "seed": cfg.seed,
        "input": input,
        "results": results,
    })
}

fn analyze(audio: &Path, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    let buffer = read_audio(audio)?;
    let contour = sfdi_contour_with(&buffer, &cfg.frame, cfg.lpc).map_err(|e| e.in_file(audio))?;
    let mut csv = String::from("frame_index,time_ms,a_one,t_one,energy,degenerate_flag\n");
    for f in &contour.frames {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            f.index, f.center_start_ms, f.a_one, f.t_one, f.energy, f.degenerate as u8
        );
    }
    write_out(&cfg.out_dir, "contour.csv", &csv)?;
    let degenerate = contour.frames.iter().filter(|f| f.degenerate).count();
    write_json(
        &cfg.out_dir,
        "analyze.json",
        &metadata(
            "analyze",
            &cfg,
            json!({ "audio": audio, "sample_rate_hz": buffer.sample_rate_hz(), "samples": buffer.len() }),
            json!({ "frames": contour.len(), "degenerate_frames": degenerate, "hop_ms": contour.hop_ms }),
        ),
    )?;
    println!("frames={} degenerate={degenerate}", contour.len());
    Ok(EXIT_OK)
}

fn segment_file(audio: &Path, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    let buffer = read_audio(audio)?;
    let contour = sfdi_contour_with(&buffer, &cfg.frame, cfg.lpc).map_err(|e| e.in_file(audio))?;
    let trace = segment(&contour, &cfg.classifier);
    let mut csv = String::from("frame_index,time_ms,t_one,level\n");
    for (f, level) in contour.frames.iter().zip(&trace.levels) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            f.index, f.center_start_ms, f.t_one, level
        );
    }
    write_out(&cfg.out_dir, "trace.csv", &csv)?;
    let mut seg = String::from("class,start_ms,end_ms\n");
    for s in &trace.segments {
        let _ = writeln!(seg, "{},{},{}", s.class.name(), s.start_ms, s.end_ms);
    }
    write_out(&cfg.out_dir, "segments.csv", &seg)?;
    write_json(
        &cfg.out_dir,
        "segment.json",
        &metadata(
            "segment",
            &cfg,
            json!({ "audio": audio, "sample_rate_hz": buffer.sample_rate_hz(), "samples": buffer.len() }),
            json!({ "frames": trace.levels.len(), "origin_ms": trace.origin_ms, "hop_ms": trace.hop_ms, "segments": trace.segments }),
        ),
    )?;
    println!(
        "frames={} segments={}",
        trace.levels.len(),
        trace.segments.len()
    );
    Ok(EXIT_OK)
}

fn load_corpus(args: &CorpusArgs, cfg: &RunConfig) -> Result<(Corpus, String)> {
    let manifest = args.manifest.clone().or_else(|| cfg.manifest.clone());
    let corpus = if let Some(m) = &manifest {
        (Corpus::from_manifest(m)?, m.display().to_string())
    } else {
        let root = args
            .corpus
            .clone()
            .or_else(|| cfg.corpus_root.clone())
            .or_else(|| std::env::var_os(CORPUS_ENV).map(PathBuf::from))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "no corpus given (pass a root, --manifest or set {CORPUS_ENV})"
                ))
            })?;
        (Corpus::discover(&root)?, root.display().to_string())
    };
    if corpus.0.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(corpus)
}

fn load_map(cfg: &RunConfig) -> Result<PhoneClassMap> {
    match &cfg.phone_map {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::from(e).in_file(p))?;
            PhoneClassMap::parse(&text).map_err(|e| e.in_file(p))
        }
        None => Ok(PhoneClassMap::default()),
    }
}

fn corpus_input(corpus: &Corpus, source: &str) -> serde_json::Value {
    json!({
        "source": source,
        "entries": corpus.len(),
        "has_dev_split": corpus.has_dev_split(),
        "digest": corpus.digest(),
    })
}

/// Writes the failure sidecar; the run succeeds when at least 90% of files processed.
fn finish(cfg: &RunConfig, processed: usize, failures: &[FileFailure]) -> Result<i32> {
    let mut text = String::new();
    for f in failures {
        let _ = writeln!(text, "{}\t{}", f.key, f.message.replace(['\n', '\t'], " "));
    }
    write_out(&cfg.out_dir, "errors.tsv", &text)?;
    let attempted = processed + failures.len();
    if !failures.is_empty() {
        eprintln!(
            "{} of {attempted} files failed; see errors.tsv",
            failures.len()
        );
    }
    if processed * 10 < attempted * 9 {
        eprintln!("too many failures: {processed} of {attempted} files processed");
        return Ok(EXIT_INPUT);
    }
    Ok(EXIT_OK)
}

fn run_levels(corpus: &Corpus, cfg: &RunConfig, levels: &[NoiseLevel]) -> Result<CorpusPools> {
    let map = load_map(cfg)?;
    collect_levels(corpus, &map, &cfg.eval_config(), levels, cfg.seed)
}

fn pick_split<'a>(pools: &'a SplitPools, split: &str, has_dev: bool) -> Result<&'a ClassPools> {
    match split {
        "full" => Ok(&pools.full),
        "dev" if has_dev => Ok(&pools.dev),
        "dev" => Err(Error::InvalidConfig("corpus has no dev split".into())),
        other => Err(Error::InvalidConfig(format!("unknown split {other:?}"))),
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn evaluate(args: &CorpusArgs, calibrate: bool, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    let (corpus, source) = load_corpus(args, &cfg)?;
    let run = run_levels(&corpus, &cfg, &[NoiseLevel::Clean])?;
    let pools = &run.levels[0].1;
    let calibration = if run.has_dev { &pools.dev } else { &pools.full };
    let crossover = threshold_sweep(calibration, &threshold_grid(cfg.grid_step, GRID_MAX)).ok();
    let threshold = if calibrate {
        crossover
            .as_ref()
            .map(|s| s.crossover_threshold)
            .ok_or(Error::UndefinedSweep("sonorant or fricative"))?
    } else {
        cfg.classifier.threshold_t
    };
    let full_acc = frame_accuracy(&pools.full, threshold);
    let dev_acc = run.has_dev.then(|| frame_accuracy(&pools.dev, threshold));
    let (near, total_err) = boundary_errors(&pools.full, threshold);
    let full_counts = FrameCounts::from(&pools.full);

    let mut csv = String::from(
        "noise_level,threshold,dev_accuracy_pct,full_accuracy_pct,sonorant_frames,fricative_frames\n",
    );
    let _ = writeln!(
        csv,
        "clean,{threshold},{},{},{},{}",
        dev_acc.map_or("NA".into(), pct),
        pct(full_acc),
        full_counts.sonorant,
        full_counts.fricative
    );
    write_out(&cfg.out_dir, "evaluate.csv", &csv)?;
    write_json(
        &cfg.out_dir,
        "evaluate.json",
        &metadata(
            "evaluate",
            &cfg,
            corpus_input(&corpus, &source),
            json!({
                "threshold": threshold,
                "calibrated": calibrate,
                "calibration_split": if run.has_dev { "dev" } else { "full" },
                "crossover_threshold": crossover.as_ref().map(|s| s.crossover_threshold),
                "crossover_error": crossover.as_ref().map(|s| s.crossover_error),
                "full_accuracy": full_acc,
                "dev_accuracy": dev_acc,
                "full_frames": full_counts,
                "dev_frames": FrameCounts::from(&pools.dev),
                "boundary_errors": near,
                "total_errors": total_err,
                "files_processed": run.processed,
                "files_failed": run.failures.len(),
            }),
        ),
    )?;
    println!(
        "accuracy={} threshold={threshold:.3} frames={}",
        pct(full_acc),
        pools.full.total()
    );
    finish(&cfg, run.processed, &run.failures)
}

fn sweep(args: &CorpusArgs, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    let (corpus, source) = load_corpus(args, &cfg)?;
    let run = run_levels(&corpus, &cfg, &[NoiseLevel::Clean])?;
    let pools = pick_split(&run.levels[0].1, &args.split, run.has_dev)?;
    let result = threshold_sweep(pools, &threshold_grid(cfg.grid_step, GRID_MAX))?;
    let mut csv = String::from("threshold,sonorant_error,fricative_error\n");
    for ((t, s), f) in result
        .thresholds
        .iter()
        .zip(&result.sonorant_error_rate)
        .zip(&result.fricative_error_rate)
    {
        let _ = writeln!(csv, "{t},{s},{f}");
    }
    write_out(&cfg.out_dir, "sweep.csv", &csv)?;
    let acc = frame_accuracy(pools, result.crossover_threshold);
    write_json(
        &cfg.out_dir,
        "sweep.json",
        &metadata(
            "sweep",
            &cfg,
            corpus_input(&corpus, &source),
            json!({
                "split": args.split,
                "crossover_threshold": result.crossover_threshold,
                "crossover_error": result.crossover_error,
                "accuracy_at_crossover": acc,
                "sonorant_frames": result.sonorant_frames,
                "fricative_frames": result.fricative_frames,
                "files_processed": run.processed,
                "files_failed": run.failures.len(),
            }),
        ),
    )?;
    println!(
        "accuracy={} threshold={:.3} frames={}",
        pct(acc),
        result.crossover_threshold,
        pools.total()
    );
    finish(&cfg, run.processed, &run.failures)
}

fn histogram_csv(h: &Histogram) -> String {
    let mut csv = String::from("bin_left,count,normalized\n");
    for (i, (c, n)) in h.counts.iter().zip(&h.normalized_counts).enumerate() {
        let _ = writeln!(csv, "{},{c},{n}", h.bin_left(i));
    }
    csv
}

fn histogram(args: &CorpusArgs, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    let (corpus, source) = load_corpus(args, &cfg)?;
    let run = run_levels(&corpus, &cfg, &[NoiseLevel::Clean])?;
    let pools = pick_split(&run.levels[0].1, &args.split, run.has_dev)?;
    let (son, fri) = class_histograms(pools, cfg.bin_width)?;
    write_out(&cfg.out_dir, "histogram_sonorant.csv", &histogram_csv(&son))?;
    write_out(
        &cfg.out_dir,
        "histogram_fricative.csv",
        &histogram_csv(&fri),
    )?;
    let overlap = overlap_mass(&son, &fri);
    let threshold = cfg.classifier.threshold_t;
    let acc = frame_accuracy(pools, threshold);
    write_json(
        &cfg.out_dir,
        "histogram.json",
        &metadata(
            "histogram",
            &cfg,
            corpus_input(&corpus, &source),
            json!({
                "split": args.split,
                "bin_width": cfg.bin_width,
                "overlap_mass": overlap,
                "sonorant_frames": son.total(),
                "fricative_frames": fri.total(),
                "accuracy_at_threshold": acc,
                "files_processed": run.processed,
                "files_failed": run.failures.len(),
            }),
        ),
    )?;
    println!(
        "accuracy={} threshold={threshold:.3} frames={} overlap={overlap:.4}",
        pct(acc),
        pools.total()
    );
    finish(&cfg, run.processed, &run.failures)
}

fn noise(args: &CorpusArgs, opts: &Options) -> Result<i32> {
    let cfg = resolve(opts)?;
    if cfg.snr_list.is_empty() {
        return Err(Error::InvalidConfig("empty SNR list".into()));
    }
    let (corpus, source) = load_corpus(args, &cfg)?;
    let map = load_map(&cfg)?;
    let report = run_noise_experiment(&corpus, &map, &cfg.eval_config(), &cfg.snr_list, cfg.seed)?;
    let mut csv = String::from(
        "noise_level,threshold,dev_accuracy_pct,full_accuracy_pct,crossover_error_pct,sonorant_frames,fricative_frames\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{:.2},{},{},{}",
            r.level,
            r.threshold,
            r.dev_accuracy_pct
                .map_or("NA".into(), |a| format!("{a:.2}")),
            r.full_accuracy_pct,
            r.crossover_error_pct,
            r.full_frames.sonorant,
            r.full_frames.fricative
        );
    }
    write_out(&cfg.out_dir, "noise_report.csv", &csv)?;
    write_json(
        &cfg.out_dir,
        "noise_report.json",
        &metadata("noise", &cfg, corpus_input(&corpus, &source), &report),
    )?;
    for r in &report.rows {
        println!(
            "level={} accuracy={:.2} threshold={:.3} frames={}",
            r.level,
            r.full_accuracy_pct,
            r.threshold,
            r.full_frames.sonorant + r.full_frames.fricative
        );
    }
    finish(&cfg, report.files_processed, &report.failures)
}

fn synth(count: usize, rate: u32, seed: u64, out_dir: &Path) -> Result<i32> {
    let corpus = synth_corpus(count, rate, seed);
    let mut manifest = String::new();
    for utt in &corpus {
        let audio = out_dir.join(&utt.key);
        let labels = audio.with_extension("phn");
        if let Some(dir) = audio.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
        }
        write_wav(&audio, &utt.audio)?;
        fs::write(&labels, serialize_phn(&utt.labels))
            .map_err(|e| Error::from(e).in_file(&labels))?;
        let phn_key = Path::new(&utt.key).with_extension("phn");
        let _ = writeln!(
            manifest,
            "{}\t{}\t{}",
            utt.key,
            phn_key.display(),
            utt.split
        );
    }
    write_out(out_dir, "manifest.tsv", &manifest)?;
    println!("wrote {} utterances to {}", corpus.len(), out_dir.display());
    Ok(EXIT_OK)
}

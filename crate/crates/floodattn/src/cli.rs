//! Command-line surface: `train`, `gen-pattern`, and `analyze`, plus the
//! PGM heatmap writer and matrix-file loaders they share.

use std::fs;
use std::path::{Path, PathBuf};

use crate::analyzer;
use crate::config::{RunConfig, OUT_DIR_ENV};
use crate::data;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::pattern::{generate_pattern_stages, PatternConfig};
use crate::rng::Rng;
use crate::sparse::CsrMatrix;
use crate::tensor::DenseMatrix;
use crate::trainer::{metrics_to_csv, Trainer};

/// How matrix values map to 8-bit pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmMode {
    /// [min, max] stretches to [0, 255]; a constant matrix maps to 0.
    MinMax,
    /// Zero maps to 0, anything else to 255.
    Binary,
}

/// Render a matrix as a binary (P5) PGM image, row-major, maxval 255.
pub fn pgm_bytes(m: &DenseMatrix, mode: PgmMode) -> Result<Vec<u8>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Parameter("cannot render an empty matrix".into()));
    }
    let mut out = format!("P5\n{} {}\n255\n", m.cols(), m.rows()).into_bytes();
    match mode {
        PgmMode::MinMax => {
            let (mut lo, mut hi) = (f32::INFINITY, f32::NEG_INFINITY);
            for &v in m.data() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let range = (hi - lo) as f64;
            for &v in m.data() {
                let px = if range > 0.0 {
                    ((v - lo) as f64 / range * 255.0).round() as u8
                } else {
                    0
                };
                out.push(px);
            }
        }
        PgmMode::Binary => {
            for &v in m.data() {
                out.push(if v == 0.0 { 0 } else { 255 });
            }
        }
    }
    Ok(out)
}

/// Write a matrix heatmap to disk.
pub fn write_pgm(m: &DenseMatrix, path: &Path, mode: PgmMode) -> Result<()> {
    Ok(fs::write(path, pgm_bytes(m, mode)?)?)
}

/// Parse a matrix from comma-separated text rows.
pub fn matrix_from_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f32>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f32 = field.trim().parse().map_err(|_| {
                Error::Data(format!("line {}: invalid number {:?}", i + 1, field.trim()))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("matrix file has no rows".into()));
    }
    DenseMatrix::from_rows(&rows)
}

/// Load a matrix file: `.csv` as text rows, anything else as the binary
/// matrix format.
pub fn read_matrix_file(path: &Path) -> Result<DenseMatrix> {
    if path.extension().is_some_and(|e| e == "csv") {
        matrix_from_csv(&fs::read_to_string(path)?)
    } else {
        DenseMatrix::read_file(path)
    }
}

fn parse_flag_args(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let name = args[i].strip_prefix("--").ok_or_else(|| {
            Error::Parse(format!("unexpected argument {:?}; flags look like --key value", args[i]))
        })?;
        if let Some((k, v)) = name.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            i += 1;
        } else {
            let v = args
                .get(i + 1)
                .ok_or_else(|| Error::Parse(format!("flag --{name} needs a value")))?;
            out.push((name.to_string(), v.clone()));
            i += 2;
        }
    }
    Ok(out)
}

fn take_flag(flags: &mut Vec<(String, String)>, key: &str) -> Option<String> {
    let pos = flags.iter().position(|(k, _)| k == key)?;
    Some(flags.remove(pos).1)
}

/// Train per the merged configuration and write every artifact into the
/// output directory: metrics.csv, checkpoint.bin, and — once the
/// transition fires — per-layer pattern files, heatmaps, and op reports.
pub fn cmd_train(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;

    // Independent streams: dataset, weight init, and the training loop get
    // distinct seeds so none replays another's draws.
    let mut data_rng = Rng::new(cfg.seed);
    let dataset = match cfg.task.as_str() {
        "synthetic-majority" => {
            data::synthetic_majority(cfg.samples, cfg.l, cfg.classes, &mut data_rng)?
        }
        "synthetic-listops" => data::synthetic_listops(cfg.samples, cfg.l, &mut data_rng)?,
        "csv" => data::load_csv(
            cfg.data.as_ref().expect("validated for the csv task"),
            cfg.vocab,
            cfg.classes,
        )?,
        other => return Err(Error::Parameter(format!("unknown task {other:?}"))),
    };
    let vocab = if cfg.vocab > 0 {
        if cfg.vocab < dataset.vocab {
            return Err(Error::Parameter(format!(
                "vocab {} is below the dataset's {}",
                cfg.vocab, dataset.vocab
            )));
        }
        cfg.vocab
    } else {
        dataset.vocab
    };
    let classes = dataset.classes.max(cfg.classes);

    let model_config = cfg.model_config(vocab, classes)?;
    let mut init_rng = Rng::new(cfg.seed.wrapping_add(1));
    let model = Model::new(model_config, &mut init_rng)?;
    let mut trainer_cfg = cfg.trainer_config();
    trainer_cfg.seed = cfg.seed.wrapping_add(2);
    let mut trainer = Trainer::new(model, trainer_cfg)?;

    println!(
        "task {} | {} samples | L={} D={} H={} N={} | {} epochs",
        cfg.task,
        dataset.samples.len(),
        cfg.l,
        cfg.d,
        cfg.h,
        cfg.n,
        cfg.epochs
    );
    for _ in 0..cfg.epochs {
        let m = trainer.train_epoch(&dataset)?;
        println!(
            "epoch {:>3} [{:>6}] loss {:.4} accuracy {:.4}",
            m.epoch, m.phase, m.loss, m.accuracy
        );
    }

    fs::write(
        cfg.out_dir.join("metrics.csv"),
        metrics_to_csv(trainer.metrics(), cfg.n),
    )?;
    trainer
        .model()
        .write_checkpoint(&cfg.out_dir.join("checkpoint.bin"), trainer.rng_state())?;

    if let Some(patterns) = trainer.patterns() {
        let snapshots = trainer
            .transition_snapshots()
            .expect("snapshots accompany patterns");
        let head_dim = (cfg.d / cfg.h) as u64;
        let mut reports = Vec::with_capacity(patterns.len());
        for (k, p) in patterns.iter().enumerate() {
            p.write_file(&cfg.out_dir.join(format!("layer{k}.pattern.csr")))?;
            write_pgm(
                &p.to_dense(),
                &cfg.out_dir.join(format!("layer{k}.pattern.pgm")),
                PgmMode::Binary,
            )?;
            write_pgm(
                &snapshots[k],
                &cfg.out_dir.join(format!("layer{k}.scores.pgm")),
                PgmMode::MinMax,
            )?;
            reports.push(analyzer::op_report(cfg.l as u64, head_dim, p.nnz() as u64)?);
        }
        fs::write(cfg.out_dir.join("report.txt"), analyzer::report_text(&reports))?;
        fs::write(cfg.out_dir.join("report.csv"), analyzer::report_csv(&reports))?;
        println!(
            "transition at epoch {}; patterns frozen",
            trainer.transition_epoch().expect("fired")
        );
    } else {
        println!("no transition; attention stayed dense");
    }
    println!("artifacts in {}", cfg.out_dir.display());
    Ok(())
}

/// Run the extraction pipeline on a saved score matrix and write every
/// stage: input/conv/pool heatmaps, flood and pattern masks, and the CSR
/// pattern itself.
pub fn cmd_gen_pattern(input: &Path, cfg: &PatternConfig, out_dir: &Path) -> Result<()> {
    let a = read_matrix_file(input)?;
    if a.rows() != a.cols() {
        return Err(Error::Data(format!(
            "input matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    cfg.validate(a.rows())?;
    let stages = generate_pattern_stages(&a, cfg)?;
    fs::create_dir_all(out_dir)?;
    write_pgm(&a, &out_dir.join("input.pgm"), PgmMode::MinMax)?;
    write_pgm(&stages.conv, &out_dir.join("conv.pgm"), PgmMode::MinMax)?;
    write_pgm(&stages.pool, &out_dir.join("pool.pgm"), PgmMode::MinMax)?;
    write_pgm(
        &stages.flood_marks.to_dense(),
        &out_dir.join("flood.pgm"),
        PgmMode::Binary,
    )?;
    write_pgm(
        &stages.pattern.to_dense(),
        &out_dir.join("pattern.pgm"),
        PgmMode::Binary,
    )?;
    stages.pattern.write_file(&out_dir.join("pattern.csr"))?;
    println!(
        "threshold {:.6} | {} of {} blocks | density {:.4}",
        stages.threshold,
        stages.mask.count(),
        stages.mask.side() * stages.mask.side(),
        stages.pattern.density()
    );
    println!("artifacts in {}", out_dir.display());
    Ok(())
}

/// Build the analyze command's report text.
pub fn analyze_report(l: u64, d: u64, c: u64) -> Result<String> {
    Ok(analyzer::op_report(l, d, c)?.to_string())
}

fn cmd_train_args(args: &[String]) -> Result<()> {
    let mut flags = parse_flag_args(args)?;
    let file_text = match take_flag(&mut flags, "config") {
        Some(path) => Some(fs::read_to_string(&path).map_err(|e| {
            Error::Parameter(format!("cannot read config file {path:?}: {e}"))
        })?),
        None => None,
    };
    let env_out = std::env::var(OUT_DIR_ENV).ok();
    let cfg = RunConfig::load(file_text.as_deref(), env_out.as_deref(), &flags)?;
    cmd_train(&cfg)
}

fn cmd_gen_pattern_args(args: &[String]) -> Result<()> {
    let mut flags = parse_flag_args(args)?;
    let input = take_flag(&mut flags, "input")
        .ok_or_else(|| Error::Parameter("gen-pattern needs --input <matrix file>".into()))?;
    let out_dir = take_flag(&mut flags, "out_dir")
        .or_else(|| std::env::var(OUT_DIR_ENV).ok())
        .unwrap_or_else(|| "out".into());
    let mut b = 32usize;
    let mut f = 31usize;
    let mut alpha = 96.0f64;
    if let Some(v) = take_flag(&mut flags, "b") {
        b = v.parse().map_err(|_| Error::Parse(format!("key b: invalid value {v:?}")))?;
    }
    if let Some(v) = take_flag(&mut flags, "f") {
        f = v.parse().map_err(|_| Error::Parse(format!("key f: invalid value {v:?}")))?;
    }
    if let Some(v) = take_flag(&mut flags, "quantile_alpha") {
        alpha = v
            .parse()
            .map_err(|_| Error::Parse(format!("key quantile_alpha: invalid value {v:?}")))?;
    }
    if let Some((k, _)) = flags.first() {
        return Err(Error::Parameter(format!("unknown gen-pattern flag --{k}")));
    }
    let input = PathBuf::from(input);
    let a = read_matrix_file(&input)?;
    let cfg = PatternConfig {
        filter_size: crate::config::effective_filter(f, a.rows()),
        block_size: b,
        quantile_alpha: alpha,
    };
    cmd_gen_pattern(&input, &cfg, Path::new(&out_dir))
}

fn cmd_analyze_args(args: &[String]) -> Result<()> {
    let mut flags = parse_flag_args(args)?;
    let pattern = take_flag(&mut flags, "pattern");
    let parse_num = |o: Option<String>, key: &str| -> Result<Option<u64>> {
        match o {
            None => Ok(None),
            Some(v) => Ok(Some(v.parse().map_err(|_| {
                Error::Parse(format!("key {key}: invalid value {v:?}"))
            })?)),
        }
    };
    let l = parse_num(take_flag(&mut flags, "l"), "l")?;
    let d = parse_num(take_flag(&mut flags, "d"), "d")?
        .ok_or_else(|| Error::Parameter("analyze needs --d <per-head width>".into()))?;
    let c = parse_num(take_flag(&mut flags, "c"), "c")?;
    if let Some((k, _)) = flags.first() {
        return Err(Error::Parameter(format!("unknown analyze flag --{k}")));
    }
    let (l, c) = match pattern {
        Some(path) => {
            let p = CsrMatrix::read_file(Path::new(&path))?;
            if p.rows() != p.cols() {
                return Err(Error::Data(format!(
                    "pattern must be square, got {}x{}",
                    p.rows(),
                    p.cols()
                )));
            }
            (p.rows() as u64, p.nnz() as u64)
        }
        None => (
            l.ok_or_else(|| Error::Parameter("analyze needs --l or --pattern".into()))?,
            c.ok_or_else(|| Error::Parameter("analyze needs --c or --pattern".into()))?,
        ),
    };
    println!("{}", analyze_report(l, d, c)?);
    Ok(())
}

const USAGE: &str = "\
usage: floodattn <command> [flags]

commands:
  train            train a classifier, detecting layer-wise attention sparsity
                   and switching to sparse kernels once attention stabilizes
    --config <path>     flat key=value file; # starts a comment
    --<key> <value>     any config key; flags override the file
    keys: task data l d h n b f quantile_alpha transition_tolerance epochs
          lr seed batch_size samples classes vocab dropout ffn_dim
          min_dense_epochs out_dir

  gen-pattern      extract a sparsity pattern from a saved score matrix
    --input <path>      square matrix, .csv text or the binary matrix format
    --b <n> --f <n> --quantile_alpha <pct> --out_dir <path>

  analyze          operation-count report for one attention layer
    --l <n> --d <n> --c <n>     explicit sizes (d is the per-head width)
    --pattern <path> --d <n>    sizes taken from a CSR pattern file

FLOODATTN_OUT_DIR overrides the output directory; flags still win.
";

/// Entry point: dispatch a subcommand, print errors, return the exit code
/// (0 success, 1 execution error, 2 usage error).
pub fn run(args: &[String]) -> i32 {
    match args.first().map(String::as_str) {
        None => {
            eprint!("{USAGE}");
            2
        }
        Some("--help" | "-h" | "help") => {
            print!("{USAGE}");
            0
        }
        Some("train") => exit_code(cmd_train_args(&args[1..])),
        Some("gen-pattern") => exit_code(cmd_gen_pattern_args(&args[1..])),
        Some("analyze") => exit_code(cmd_analyze_args(&args[1..])),
        Some(other) => {
            eprintln!("unknown command {other:?}\n");
            eprint!("{USAGE}");
            2
        }
    }
}

fn exit_code(r: Result<()>) -> i32 {
    match r {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pgm_fixtures() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let bytes = pgm_bytes(&m, PgmMode::Binary).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 255, 255, 0]);

        let zeros = DenseMatrix::zeros(2, 2);
        let bytes = pgm_bytes(&zeros, PgmMode::MinMax).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 0, 0, 0]);

        let ramp = DenseMatrix::from_rows(&[vec![-1.0, 0.0], vec![1.0, 3.0]]).unwrap();
        let bytes = pgm_bytes(&ramp, PgmMode::MinMax).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 64, 128, 255]);

        // Header declares width=cols, height=rows.
        let wide = DenseMatrix::zeros(2, 3);
        let bytes = pgm_bytes(&wide, PgmMode::Binary).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(bytes.len(), b"P5\n3 2\n255\n".len() + 6);
    }

    #[test]
    fn matrix_csv_parses_and_rejects() {
        let m = matrix_from_csv("1, 2.5\n-3 , 4e-1\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.at(1, 1), 0.4);
        let err = matrix_from_csv("1,2\n3,oops\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(matrix_from_csv("1,2\n3\n").is_err(), "ragged rows");
        assert!(matrix_from_csv("\n\n").is_err(), "empty");
    }

    #[test]
    fn flag_parsing_accepts_both_spellings() {
        let flags = parse_flag_args(&strs(&["--l", "8", "--seed=9"])).unwrap();
        assert_eq!(flags, vec![("l".into(), "8".into()), ("seed".into(), "9".into())]);
        assert!(parse_flag_args(&strs(&["stray"])).is_err());
        assert!(parse_flag_args(&strs(&["--l"])).is_err(), "missing value");
    }

    #[test]
    fn analyze_reproduces_reference_counts() {
        let report = analyze_report(4096, 64, 1_677_721).unwrap();
        assert!(report.contains("4328255488"), "{report}");
        assert!(report.contains("432585778"), "{report}");
        let code = run(&strs(&["analyze", "--l", "4096", "--d", "64", "--c", "1677721"]));
        assert_eq!(code, 0);
        // C beyond L² must fail loudly.
        let code = run(&strs(&["analyze", "--l", "4", "--d", "2", "--c", "17"]));
        assert_eq!(code, 1);
    }

    #[test]
    fn analyze_accepts_a_pattern_file() {
        let dir = tempfile::tempdir().unwrap();
        let mask =
            DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let p = crate::sparse::mask_to_csr(&mask).unwrap();
        let path = dir.path().join("p.csr");
        p.write_file(&path).unwrap();
        let code = run(&strs(&["analyze", "--pattern", path.to_str().unwrap(), "--d", "4"]));
        assert_eq!(code, 0);
        // nnz = 3, l = 2, d = 4: 2·3·9 − 2·5 = 44.
        let r = analyzer::op_report(2, 4, 3).unwrap();
        assert_eq!(r.sparse_ops, 44);
    }

    #[test]
    fn usage_paths_and_unknown_commands() {
        assert_eq!(run(&[]), 2);
        assert_eq!(run(&strs(&["--help"])), 0);
        assert_eq!(run(&strs(&["frobnicate"])), 2);
        assert_eq!(run(&strs(&["analyze", "--l", "4"])), 1, "missing flags");
        assert_eq!(run(&strs(&["train", "--bogus", "1"])), 1, "unknown key");
    }

    fn tiny_run_config(out_dir: &Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        for (k, v) in [
            ("l", "16"),
            ("d", "8"),
            ("h", "2"),
            ("n", "2"),
            ("b", "4"),
            ("f", "3"),
            ("quantile_alpha", "75"),
            ("transition_tolerance", "inf"),
            ("epochs", "4"),
            ("samples", "24"),
            ("classes", "3"),
            ("ffn_dim", "16"),
        ] {
            cfg.set(k, v).unwrap();
        }
        cfg.out_dir = out_dir.to_path_buf();
        cfg
    }

    #[test]
    fn train_writes_every_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_run_config(dir.path());
        cmd_train(&cfg).unwrap();

        let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert!(metrics.starts_with("epoch,phase,loss,accuracy,"));
        assert_eq!(metrics.lines().count(), 5, "header + 4 epochs");
        assert!(metrics.contains("3,sparse,"));

        let (model, _) = Model::read_checkpoint(&dir.path().join("checkpoint.bin")).unwrap();
        assert_eq!(model.config.seq_len, 16);

        for k in 0..2 {
            let p = CsrMatrix::read_file(&dir.path().join(format!("layer{k}.pattern.csr")))
                .unwrap();
            assert_eq!((p.rows(), p.cols()), (16, 16));
            for name in [format!("layer{k}.pattern.pgm"), format!("layer{k}.scores.pgm")] {
                let bytes = fs::read(dir.path().join(name)).unwrap();
                assert!(bytes.starts_with(b"P5\n16 16\n255\n"));
            }
        }
        let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(report.contains("layer 1"));
        assert!(dir.path().join("report.csv").exists());
    }

    #[test]
    fn zero_epochs_exits_cleanly_with_header_only_metrics() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = tiny_run_config(dir.path());
        cfg.epochs = 0;
        cmd_train(&cfg).unwrap();
        let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(
            metrics,
            "epoch,phase,loss,accuracy,dist_l0,dist_l1,density_l0,density_l1\n"
        );
        assert!(dir.path().join("checkpoint.bin").exists());
        assert!(!dir.path().join("layer0.pattern.csr").exists());
    }

    #[test]
    fn train_fails_on_unwritable_output_dir() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let mut cfg = tiny_run_config(&blocker.join("sub"));
        cfg.epochs = 1;
        assert!(cmd_train(&cfg).is_err());
    }

    #[test]
    fn gen_pattern_emits_every_stage() {
        let dir = tempfile::tempdir().unwrap();
        // Banded 16×16 score matrix as CSV.
        let mut text = String::new();
        for i in 0..16 {
            let row: Vec<String> = (0..16)
                .map(|j| {
                    if (i as i64 - j as i64).abs() <= 1 {
                        "0.9".to_string()
                    } else {
                        "0.01".to_string()
                    }
                })
                .collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let input = dir.path().join("scores.csv");
        fs::write(&input, text).unwrap();
        let out = dir.path().join("stages");
        let code = run(&strs(&[
            "gen-pattern",
            "--input",
            input.to_str().unwrap(),
            "--b",
            "4",
            "--f",
            "3",
            "--quantile_alpha",
            "75",
            "--out_dir",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        for name in ["input.pgm", "conv.pgm", "pool.pgm", "flood.pgm", "pattern.pgm"] {
            assert!(out.join(name).exists(), "{name}");
        }
        let p = CsrMatrix::read_file(&out.join("pattern.csr")).unwrap();
        assert_eq!((p.rows(), p.cols()), (16, 16));
        let d = p.to_dense();
        for i in 0..16 {
            assert_eq!(d.at(i, i), 1.0, "diagonal forced");
        }
    }

    #[test]
    fn gen_pattern_rejects_nonsquare_and_bad_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("rect.csv");
        fs::write(&input, "1,2,3\n4,5,6\n").unwrap();
        let code = run(&strs(&["gen-pattern", "--input", input.to_str().unwrap()]));
        assert_eq!(code, 1);

        // 5×5 with block size 2: 2 does not divide 5.
        let input = dir.path().join("five.csv");
        let row = "1,1,1,1,1\n".repeat(5);
        fs::write(&input, row).unwrap();
        let code = run(&strs(&[
            "gen-pattern",
            "--input",
            input.to_str().unwrap(),
            "--b",
            "2",
            "--f",
            "3",
        ]));
        assert_eq!(code, 1);
    }

    #[test]
    fn binary_matrix_files_round_trip_through_gen_pattern_reader() {
        let dir = tempfile::tempdir().unwrap();
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let path = dir.path().join("m.mat");
        m.write_file(&path).unwrap();
        let back = read_matrix_file(&path).unwrap();
        assert_eq!(back.data(), m.data());
    }
}

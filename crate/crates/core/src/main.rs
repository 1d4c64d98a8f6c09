use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use hhdl::complexity::{display_speedup, speedup_table, TABLE_M};
use hhdl::formats::{load_dictionary, save_dictionary};
use hhdl::imaging::{
    concat_patches, corrupt, depatchify, image_errors, inpaint, load_pgm, metrics_csv_header, patchify, rmse,
    save_pgm, MetricsRow,
};
use hhdl::learning::{
    build_z_orthogonal, sparse_step, spectrum_report, train, Dictionary, Init, TrainConfig, UpdateOrder, Variant,
};
use hhdl::{Error, Result};

#[derive(Parser)]
#[command(name = "hhdl", version, about = "Householder-reflector dictionary learning for image patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a dictionary from the 8×8 patches of one or more images.
    Train(TrainArgs),
    /// Sparse-code an image with a dictionary and report reconstruction errors.
    Encode(EncodeArgs),
    /// Normalized spectrum of XYᵀ + YXᵀ for a dictionary's codes.
    Spectrum(SpectrumArgs),
    /// Speed-up of reflector dictionaries over dense and fast-cosine transforms.
    Speedups(SpeedupArgs),
    /// Blank random pixels and reconstruct them from a dictionary.
    Inpaint(InpaintArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Qdla,
    Hm,
    Qhm,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrderArg {
    Seq,
    Rand,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InitArg {
    Svd,
    Random,
}

#[derive(clap::Args, Serialize)]
struct TrainArgs {
    /// Training images (P5 PGM); patches are concatenated.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Number of reflectors (hm, qhm).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 4)]
    s: usize,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reflector visiting order (hm).
    #[arg(long, value_enum, default_value_t = OrderArg::Seq)]
    update_order: OrderArg,
    #[arg(long, value_enum, default_value_t = InitArg::Svd)]
    init: InitArg,
    /// Run all iterations even when the objective stalls.
    #[arg(long)]
    no_early_stop: bool,
    /// Dictionary output file.
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration objective CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Final normalized spectrum CSV (hm, qhm).
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
struct EncodeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Dictionary file, or `dct`.
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, default_value_t = 4)]
    s: usize,
    #[arg(long)]
    metrics: PathBuf,
    /// Reconstructed image output.
    #[arg(long)]
    recon: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
struct SpectrumArgs {
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, default_value_t = 4)]
    s: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args, Serialize)]
struct SpeedupArgs {
    #[arg(long, default_value_t = 64)]
    n: u64,
    #[arg(long, num_args = 1..)]
    m_list: Option<Vec<u64>>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
struct InpaintArgs {
    #[arg(long)]
    input: PathBuf,
    /// Fraction of pixels to blank, in [0, 1).
    #[arg(long)]
    missing: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, default_value_t = 6)]
    s: usize,
    /// Reconstructed image.
    #[arg(long)]
    out: PathBuf,
    /// Corrupted image; defaults to `<out>.corrupted.pgm`.
    #[arg(long)]
    corrupted: Option<PathBuf>,
    #[arg(long)]
    metrics: PathBuf,
}

#[derive(Serialize)]
struct InputHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    command: &'static str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<InputHash>,
    outputs: Vec<String>,
    version: &'static str,
}

fn usage_error(message: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, message).exit()
}

fn hash_file(path: &Path) -> Result<InputHash> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
    })
}

fn hash_inputs(paths: &[&Path]) -> Result<Vec<InputHash>> {
    paths
        .iter()
        .filter(|p| p.as_os_str() != "dct")
        .map(|p| hash_file(p))
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_manifest(primary: &Path, manifest: &RunManifest) -> Result<()> {
    let mut path = primary.as_os_str().to_owned();
    path.push(".manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    write_text(Path::new(&path), &text)
}

fn manifest(command: &'static str, config: serde_json::Value, seed: Option<u64>, inputs: Vec<InputHash>, outputs: &[&Path]) -> RunManifest {
    RunManifest {
        command_line: std::env::args().collect(),
        command,
        config,
        seed,
        inputs,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn image_label(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let variant = match args.variant {
        VariantArg::Qdla => Variant::Qdla,
        VariantArg::Hm => Variant::Hm,
        VariantArg::Qhm => Variant::Qhm,
    };
    let m = match (variant, args.m) {
        (Variant::Qdla, Some(m)) => {
            log::warn!("--m {m} is ignored for qdla");
            0
        }
        (Variant::Qdla, None) => 0,
        (_, Some(m)) => m,
        (_, None) => usage_error(format!("--m is required for --variant {variant}")),
    };
    if matches!(args.update_order, OrderArg::Rand) && variant != Variant::Hm {
        log::warn!("--update-order only affects hm");
    }
    let images = args.input.iter().map(load_pgm).collect::<Result<Vec<_>>>()?;
    let y = concat_patches(&images)?;
    let cfg = TrainConfig {
        variant,
        m,
        s: args.s,
        iterations: args.iters,
        seed: args.seed,
        update_order: match args.update_order {
            OrderArg::Seq => UpdateOrder::Sequential,
            OrderArg::Rand => UpdateOrder::Random,
        },
        init: match args.init {
            InitArg::Svd => Init::Svd,
            InitArg::Random => Init::Random,
        },
        early_stop: !args.no_early_stop,
        record_spectra: false,
    };
    let outcome = train(&y, &cfg)?;
    let report = &outcome.report;
    log::info!(
        "{variant}: {} iterations, relative error {:.6e}, effective m {:?}, {:.2?}",
        report.iterations_run,
        report.final_relative_error(),
        report.effective_m.last(),
        report.wall_time
    );
    save_dictionary(&outcome.learned.dictionary, &args.out)?;
    let mut outputs: Vec<&Path> = vec![&args.out];
    if let Some(path) = &args.report {
        write_text(path, &report.to_csv())?;
        outputs.push(path);
    }
    if let Some(path) = &args.spectrum {
        match report.eigen_snapshots.last() {
            Some(spectrum) => {
                write_text(path, &spectrum.to_csv())?;
                outputs.push(path);
            }
            None => log::warn!("no spectrum is recorded for qdla; {} not written", path.display()),
        }
    }
    let inputs: Vec<&Path> = args.input.iter().map(PathBuf::as_path).collect();
    let config = json!({
        "args": args,
        "iterations_run": report.iterations_run,
        "final_objective": report.final_objective(),
    });
    write_manifest(&args.out, &manifest("train", config, Some(args.seed), hash_inputs(&inputs)?, &outputs))
}

fn encode_image(path: &Path, d: &Dictionary, s: usize) -> Result<(hhdl::imaging::GrayImage, hhdl::imaging::GrayImage, f64)> {
    let image = load_pgm(path)?;
    let ds = patchify(&image)?;
    let x = sparse_step(&ds.y, d, s)?;
    let err = rmse(&ds.y, d, &x)?;
    let recon = depatchify(&ds, &d.apply_sparse(&x)?)?;
    Ok((image, recon, err))
}

fn cmd_encode(args: &EncodeArgs) -> Result<()> {
    let d = load_dictionary(&args.dict)?;
    let (image, recon, err) = encode_image(&args.input, &d, args.s)?;
    let errors = image_errors(&image, &recon)?;
    let row = MetricsRow {
        image: image_label(&args.input),
        method: d.kind().to_string(),
        m: d.reflector_count(),
        s: args.s,
        rmse: Some(err),
        mae: errors.mae,
        mse: errors.mse,
    };
    log::info!("rmse {err:.6e}, mae {:.6e}, mse {:.6e}", errors.mae, errors.mse);
    write_text(&args.metrics, &format!("{}\n{}\n", metrics_csv_header(), row.to_csv()))?;
    let mut outputs: Vec<&Path> = vec![&args.metrics];
    if let Some(path) = &args.recon {
        save_pgm(&recon, path)?;
        outputs.push(path);
    }
    let inputs = hash_inputs(&[&args.input, &args.dict])?;
    write_manifest(&args.metrics, &manifest("encode", json!({ "args": args }), None, inputs, &outputs))
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let d = load_dictionary(&args.dict)?;
    let images = args.input.iter().map(load_pgm).collect::<Result<Vec<_>>>()?;
    let y = concat_patches(&images)?;
    let x = sparse_step(&y, &d, args.s)?;
    let spectrum = spectrum_report(&build_z_orthogonal(&y, &x)?)?;
    if spectrum.zero_matrix {
        log::warn!("XYᵀ + YXᵀ is the zero matrix; spectrum is not normalized");
    }
    log::info!("{} normalized eigenvalues below -0.01", spectrum.count_below(0.01));
    write_text(&args.out, &spectrum.to_csv())?;
    let mut inputs: Vec<&Path> = args.input.iter().map(PathBuf::as_path).collect();
    inputs.push(&args.dict);
    let config = json!({ "args": args, "zero_matrix": spectrum.zero_matrix });
    write_manifest(&args.out, &manifest("spectrum", config, None, hash_inputs(&inputs)?, &[&args.out]))
}

fn cmd_speedups(args: &SpeedupArgs) -> Result<()> {
    let ms = args.m_list.clone().unwrap_or_else(|| TABLE_M.to_vec());
    let rows = speedup_table(args.n, &ms)?;
    let mut csv = String::from("m,speedup_qdla,speedup_fct,display_qdla,display_fct\n");
    for r in &rows {
        let short = |v: f64| display_speedup(v).trim_end_matches('x').to_string();
        csv.push_str(&format!(
            "{},{:.17e},{:.17e},{},{}\n",
            r.m,
            r.qdla,
            r.fct,
            short(r.qdla),
            short(r.fct)
        ));
    }
    match &args.out {
        Some(path) => {
            write_text(path, &csv)?;
            write_manifest(path, &manifest("speedups", json!({ "args": args }), None, Vec::new(), &[path]))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_inpaint(args: &InpaintArgs) -> Result<()> {
    let d = load_dictionary(&args.dict)?;
    let image = load_pgm(&args.input)?;
    let (corrupted, mask) = corrupt(&image, args.missing, args.seed)?;
    let result = inpaint(&corrupted, &mask, &d, args.s)?;
    if result.fallback_patches > 0 {
        log::warn!("{} patches had fewer than {} observed pixels and were mean-filled", result.fallback_patches, args.s);
    }
    if result.breakdown_patches > 0 {
        log::info!("{} patches stopped early on a singular restricted Gram matrix", result.breakdown_patches);
    }
    let errors = image_errors(&image, &result.image)?;
    log::info!("mae {:.6e}, mse {:.6e}", errors.mae, errors.mse);
    let corrupted_path = args.corrupted.clone().unwrap_or_else(|| {
        let mut p = args.out.as_os_str().to_owned();
        p.push(".corrupted.pgm");
        PathBuf::from(p)
    });
    save_pgm(&result.image, &args.out)?;
    save_pgm(&corrupted, &corrupted_path)?;
    let row = MetricsRow {
        image: image_label(&args.input),
        method: format!("inpaint-{}", d.kind()),
        m: d.reflector_count(),
        s: args.s,
        rmse: None,
        mae: errors.mae,
        mse: errors.mse,
    };
    write_text(&args.metrics, &format!("{}\n{}\n", metrics_csv_header(), row.to_csv()))?;
    let config = json!({
        "args": args,
        "missing_pixels": mask.missing().iter().filter(|&&m| m).count(),
        "fallback_patches": result.fallback_patches,
        "breakdown_patches": result.breakdown_patches,
    });
    let inputs = hash_inputs(&[&args.input, &args.dict])?;
    write_manifest(
        &args.out,
        &manifest("inpaint", config, Some(args.seed), inputs, &[&args.out, &corrupted_path, &args.metrics]),
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Speedups(a) => cmd_speedups(a),
        Command::Inpaint(a) => cmd_inpaint(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

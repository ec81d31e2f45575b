//! Batch front end for the `ro3` toolkit. Every subcommand reads files,
//! calls one library pipeline and writes files (or stdout).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ro3::catalyst::{self, CodecId, CodecRegistry, Ro3Container};
use ro3::deblur::deblur;
use ro3::image::{add_gaussian_noise, load_image, save_image};
use ro3::metrics::{histogram, histogram_image, MetricsReport};
use ro3::ro3::{superresolve_once, superresolve_twice, DEFAULT_AP};
use ro3::threshold::{denoise_threshold, ThresholdMode};
use ro3::{DetailGain, Error, Ro3Params, WaveletBasis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ro3",
    version,
    about = "Wavelet Rule-of-Three superresolution, compression catalyst and denoising"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upscale an image ×2 or ×4 by Rule-of-Three detail estimation
    Sr(SrArgs),
    /// Compress an image into an .ro3 container
    Encode(EncodeArgs),
    /// Reconstruct an image from an .ro3 container
    Decode(DecodeArgs),
    /// Remove noise by wavelet thresholding or an Ro3 round trip
    Denoise(DenoiseArgs),
    /// Apply the fixed 7x7 sharpening mask
    Deblur(IoArgs),
    /// Compare two images (MSE, PSNR, MAE and optionally CR/PSS) as JSON
    Metrics(MetricsArgs),
    /// Print a 256-bin histogram as CSV
    Histogram(HistogramArgs),
    /// Add seeded Gaussian noise (std on the [0, 1] scale)
    Noise(NoiseArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Haar,
    Db4,
}

impl From<BasisArg> for WaveletBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Haar => WaveletBasis::Haar,
            BasisArg::Db4 => WaveletBasis::Daub4,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GainArg {
    Faithful,
    Corrected,
}

impl From<GainArg> for DetailGain {
    fn from(g: GainArg) -> Self {
        match g {
            GainArg::Faithful => DetailGain::Faithful,
            GainArg::Corrected => DetailGain::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CodecArg {
    Store,
    Jpeg,
    Png,
    Jp2,
}

impl From<CodecArg> for CodecId {
    fn from(c: CodecArg) -> Self {
        match c {
            CodecArg::Store => CodecId::Store,
            CodecArg::Jpeg => CodecId::Jpeg,
            CodecArg::Png => CodecId::Png,
            CodecArg::Jp2 => CodecId::Jpeg2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorArg {
    #[value(name = "2")]
    Two,
    #[value(name = "4")]
    Four,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Soft,
    Hard,
    Ro3,
}

#[derive(Debug, Args)]
pub struct SrArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Upscaling factor per axis
    #[arg(long, value_enum, default_value = "2")]
    pub factor: FactorArg,
    #[arg(long, value_enum, default_value = "haar")]
    pub basis: BasisArg,
    /// Anchoring parameter added to both sides of the Rule-of-Three ratio
    #[arg(long, default_value_t = DEFAULT_AP)]
    pub ap: f64,
    #[arg(long, value_enum, default_value = "faithful")]
    pub detail_gain: GainArg,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value = "haar")]
    pub basis: BasisArg,
    #[arg(long, value_enum, default_value = "jpeg")]
    pub codec: CodecArg,
    /// Back-end codec quality (ignored by lossless codecs)
    #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
    pub quality: u8,
    /// Anchoring parameter recorded in the container
    #[arg(long, default_value_t = DEFAULT_AP)]
    pub ap: f64,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value = "faithful")]
    pub detail_gain: GainArg,
    /// Override the anchoring parameter stored in the container
    #[arg(long)]
    pub ap: Option<f64>,
    /// Sharpen the reconstruction with the deblurring mask
    #[arg(long)]
    pub deblur: bool,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value = "soft")]
    pub method: MethodArg,
    /// Wavelet basis (defaults to db4 for soft/hard, haar for ro3)
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Decomposition levels for soft/hard thresholding
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub levels: u32,
    #[arg(long, default_value_t = DEFAULT_AP)]
    pub ap: f64,
    #[arg(long, value_enum, default_value = "faithful")]
    pub detail_gain: GainArg,
    /// Sharpen the result with the deblurring mask
    #[arg(long)]
    pub deblur: bool,
    /// Soft thresholding shrinks only positive coefficients
    #[arg(long)]
    pub soft_positive_only: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Reference (original) image
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Test (reconstructed) image
    #[arg(long)]
    pub test: PathBuf,
    /// Compressed file whose size is used for CR and PSS
    #[arg(long)]
    pub compressed: Option<PathBuf>,
    /// Peak sample value for PSNR
    #[arg(long = "max", default_value_t = 255.0)]
    pub max_value: f64,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Write the CSV here instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Histogram of a single channel (default: all channels pooled)
    #[arg(long)]
    pub channel: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mean: f64,
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Format(_)
            | Error::UnsupportedFormat(_)
            | Error::Container(_)
            | Error::UnknownCodec(_)
            | Error::Codec(_) => EXIT_FORMAT,
            Error::Dimension(_) | Error::InvalidParameter(_) | Error::Domain(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Error::Io(e).into()
}

fn check_ap(ap: f64) -> Result<(), Failure> {
    if ap > 0.0 && ap.is_finite() {
        Ok(())
    } else {
        Err(usage(format!(
            "--ap must be a positive finite number, got {ap}"
        )))
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Sr(a) => {
            check_ap(a.ap)?;
            let params = Ro3Params {
                ap: a.ap,
                basis: a.basis.into(),
                detail_gain: a.detail_gain.into(),
            };
            let img = load_image(&a.io.input)?;
            let up = if a.factor == FactorArg::Four {
                superresolve_twice(&img, &params)?
            } else {
                superresolve_once(&img, &params)?
            };
            save_image(&up, &a.io.output)?;
        }
        Command::Encode(a) => {
            check_ap(a.ap)?;
            let registry = CodecRegistry::default();
            let codec = registry
                .get(a.codec.into())
                .map_err(|e| usage(e.to_string()))?;
            let img = load_image(&a.io.input)?;
            let container = catalyst::encode(&img, a.basis.into(), codec, a.quality, a.ap)?;
            fs::write(&a.io.output, container.to_bytes()).map_err(io_failure)?;
        }
        Command::Decode(a) => {
            if let Some(ap) = a.ap {
                check_ap(ap)?;
            }
            let bytes = fs::read(&a.io.input).map_err(io_failure)?;
            let container = Ro3Container::from_bytes(&bytes)?;
            let mut params = catalyst::params_for(&container);
            params.detail_gain = a.detail_gain.into();
            if let Some(ap) = a.ap {
                params.ap = ap;
            }
            let img = catalyst::decode(&container, &CodecRegistry::default(), &params, a.deblur)?;
            save_image(&img, &a.io.output)?;
        }
        Command::Denoise(a) => {
            check_ap(a.ap)?;
            let img = load_image(&a.io.input)?;
            let denoised = match a.method {
                MethodArg::Ro3 => {
                    let params = Ro3Params {
                        ap: a.ap,
                        basis: a.basis.map_or(WaveletBasis::Haar, Into::into),
                        detail_gain: a.detail_gain.into(),
                    };
                    catalyst::denoise_ro3(&img, &params)?
                }
                MethodArg::Soft | MethodArg::Hard => {
                    let mode = match (a.method, a.soft_positive_only) {
                        (MethodArg::Hard, _) => ThresholdMode::Hard,
                        (_, true) => ThresholdMode::SoftPositiveOnly,
                        _ => ThresholdMode::Soft,
                    };
                    let basis = a.basis.map_or(WaveletBasis::Daub4, Into::into);
                    denoise_threshold(&img, basis, a.levels as usize, mode)?
                }
            };
            let denoised = if a.deblur {
                deblur(&denoised)?
            } else {
                denoised
            };
            save_image(&denoised, &a.io.output)?;
        }
        Command::Deblur(a) => {
            let img = load_image(&a.input)?;
            save_image(&deblur(&img)?, &a.output)?;
        }
        Command::Metrics(a) => {
            if !a.max_value.is_finite() || a.max_value <= 0.0 {
                return Err(usage(format!(
                    "--max must be positive, got {}",
                    a.max_value
                )));
            }
            let reference = load_image(&a.reference)?;
            let test = load_image(&a.test)?;
            let mut report = MetricsReport::compare_with_max(&reference, &test, a.max_value)?;
            if let Some(path) = &a.compressed {
                let compressed = fs::metadata(path).map_err(io_failure)?.len();
                let raw = (reference.width() * reference.height() * reference.channels()) as u64;
                report = report.with_sizes(raw, compressed)?;
            }
            writeln!(out, "{}", metrics_json(&report)).map_err(io_failure)?;
        }
        Command::Histogram(a) => {
            let img = load_image(&a.input)?;
            let h = match a.channel {
                Some(ch) if ch >= img.channels() => {
                    return Err(usage(format!(
                        "channel {ch} requested from a {}-channel image",
                        img.channels()
                    )))
                }
                Some(ch) => histogram(&img.planes()[ch]),
                None => histogram_image(&img),
            };
            let mut csv = String::from("bin,count\n");
            for (bin, count) in h.bins.iter().enumerate() {
                csv.push_str(&format!("{bin},{count}\n"));
            }
            match &a.output {
                Some(path) => fs::write(path, csv).map_err(io_failure)?,
                None => out.write_all(csv.as_bytes()).map_err(io_failure)?,
            }
        }
        Command::Noise(a) => {
            if !a.std.is_finite() || a.std < 0.0 || !a.mean.is_finite() {
                return Err(usage(format!(
                    "--std must be finite and >= 0 and --mean finite (got {}, {})",
                    a.std, a.mean
                )));
            }
            let img = load_image(&a.io.input)?;
            save_image(
                &add_gaussian_noise(&img, a.mean, a.std, a.seed)?,
                &a.io.output,
            )?;
        }
    }
    Ok(())
}

fn number(v: f64) -> Value {
    if v.is_infinite() && v > 0.0 {
        Value::String("inf".into())
    } else {
        json!(v)
    }
}

/// One-line JSON; an infinite PSNR is written as the string `"inf"`.
pub fn metrics_json(r: &MetricsReport) -> String {
    let mut m = Map::new();
    m.insert("mse".into(), number(r.mse));
    m.insert("psnr_db".into(), number(r.psnr_db));
    m.insert("mae".into(), number(r.mae));
    if let Some(cr) = r.cr {
        m.insert("cr".into(), number(cr));
    }
    if let Some(pss) = r.pss_percent {
        m.insert("pss_percent".into(), number(pss));
    }
    Value::Object(m).to_string()
}

//! `ekm` — train, probe, and evaluate eigenface recognition models.
//!
//! Exit codes: 0 on success (including a `Known` verdict), 2 when a probe
//! is rejected as `Unknown`, 1 for any error (usage errors included).
//! Errors go to standard error only.

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use ekm_core::dataset;
use ekm_core::evaluation::{
    self, report_render, Cs1Row, Cs2Row, CS1_DEFAULT_ROWS, CS2_DEFAULT_ROWS, CS2_PERSONS,
};
use ekm_core::image::{encode_pgm, load_pgm, rescale_to_gray, vectorize, PgmFormat};
use ekm_core::recognizer::Verdict;
use ekm_core::trainer::TrainerConfig;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ekm", version, about = "Eigenface face recognition toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from an ORL-style directory tree (root/<person>/<n>.pgm)
    Train {
        /// Dataset root; defaults to $EKM_DATA_DIR
        #[arg(long, env = "EKM_DATA_DIR")]
        data: PathBuf,
        /// Where to write the model file
        #[arg(long)]
        out: PathBuf,
        /// Keep at most this many eigenfaces (default: all that survive)
        #[arg(long)]
        eigenfaces: Option<usize>,
        /// Relative eigenvalue cutoff for discarding near-zero directions
        #[arg(long, default_value_t = 1e-10)]
        cutoff: f64,
        /// Relative convergence tolerance of the eigensolver
        #[arg(long, default_value_t = 1e-12)]
        jacobi_tol: f64,
    },
    /// Identify a probe image against a trained model
    Recognize {
        #[arg(long)]
        model: PathBuf,
        /// Probe image (PGM, same frame size as the training data)
        #[arg(long)]
        image: PathBuf,
        /// Reject probes whose minimal mean shift exceeds this value
        /// (default: no rejection, closed-set identification)
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Run a case-study protocol over seeded splits and print the table
    Evaluate {
        /// Dataset root; defaults to $EKM_DATA_DIR
        #[arg(long, env = "EKM_DATA_DIR")]
        data: PathBuf,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Number of seeded splits to average over
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        /// Sample this many probes per cell instead of the full remainder
        #[arg(long)]
        nii: Option<usize>,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write each eigenface as a PGM image for inspection
    ExportEigenfaces {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    /// One training image per person
    Cs1,
    /// 2..=6 training images per person over 32 persons
    Cs2,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Train {
            data,
            out,
            eigenfaces,
            cutoff,
            jacobi_tol,
        } => {
            let manifest = dataset::scan(&data)?;
            let memory = manifest.load_all()?;
            let set = memory.to_training_set()?;
            let cfg = TrainerConfig {
                requested_eigenfaces: eigenfaces,
                positive_cutoff: cutoff,
                jacobi_tol,
            };
            let start = Instant::now();
            let model = ekm_core::train(&set, &cfg)?;
            let secs = start.elapsed().as_secs_f64();
            ekm_core::save_model(&model, &out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "classes={} images={} dim={} eigenfaces={} train_s={secs:.3}",
                model.num_classes(),
                model.num_images(),
                model.dim(),
                model.num_eigenfaces()
            );
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Recognize {
            model,
            image,
            threshold,
        } => {
            let model = ekm_core::load_model(&model)?;
            let bytes =
                fs::read(&image).with_context(|| format!("reading {}", image.display()))?;
            let probe = vectorize(&load_pgm(&bytes)?);
            let threshold = threshold.unwrap_or(f64::INFINITY);
            let result = ekm_core::recognize(&model, &probe, threshold)?;
            println!(
                "class={} dmin={} verdict={}",
                result.best_class, result.d_min, result.verdict
            );
            Ok(match result.verdict {
                Verdict::Known => ExitCode::SUCCESS,
                Verdict::Unknown => ExitCode::from(2),
            })
        }
        Command::Evaluate {
            data,
            protocol,
            seeds,
            nii,
            out,
        } => {
            let manifest = dataset::scan(&data)?;
            let memory = manifest.load_all()?;
            let seeds = evaluation::default_seeds(seeds);
            let cfg = TrainerConfig::default();
            let report = match protocol {
                ProtocolArg::Cs1 => {
                    let rows: Vec<Cs1Row> = CS1_DEFAULT_ROWS
                        .iter()
                        .map(|&(num_persons, _)| Cs1Row { num_persons, nii })
                        .collect();
                    evaluation::run_case_study_1(&memory, &rows, &seeds, &cfg)
                }
                ProtocolArg::Cs2 => {
                    let rows: Vec<Cs2Row> = CS2_DEFAULT_ROWS
                        .iter()
                        .map(|&(images_per_person, _)| Cs2Row {
                            images_per_person,
                            nii,
                        })
                        .collect();
                    evaluation::run_case_study_2(&memory, CS2_PERSONS, &rows, &seeds, &cfg)
                }
            };
            let text = report_render(&report);
            print!("{text}");
            if let Some(path) = out {
                fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportEigenfaces { model, out_dir } => {
            let model = ekm_core::load_model(&model)?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            for j in 0..model.num_eigenfaces() {
                let column = model.eigenfaces.column(j);
                let (img, lo, hi) = rescale_to_gray(&column, model.width, model.height)?;
                // The filename records the linear rescale applied: input
                // range [lo, hi] was mapped onto [0, 255].
                let name = format!("eigenface_{j:03}_lo{lo:+.3e}_hi{hi:+.3e}.pgm");
                fs::write(out_dir.join(&name), encode_pgm(&img, PgmFormat::Binary))
                    .with_context(|| format!("writing {name}"))?;
            }
            println!(
                "wrote {} eigenfaces to {}",
                model.num_eigenfaces(),
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

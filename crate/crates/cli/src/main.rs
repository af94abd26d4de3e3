//! `ergo`: generate synthetic event corpora, score dense representations
//! against raw event streams with an entropic Gromov-Wasserstein
//! discrepancy, run the sweep studies, and search the categorical
//! representation family.

mod manifest;
mod svg;

use clap::{Args, Parser, Subcommand};
use ergo_core::event_model::{ScenePattern, Sample, SyntheticSceneConfig};
use ergo_core::gw_metric::{gwd_batch, SolverConfig};
use ergo_core::report::{
    default_demo_corpus, invariance_report, load_corpus, sweep_blur, sweep_channels,
    sweep_samples, CorpusRecipe, SampleSweepReport, SweepFamily, SweepReport,
};
use ergo_core::repr_search::{stagewise_search, CandidateSpace, ProposalStrategy};
use ergo_core::representations::{PresetName, ReprBuilder};
use ergo_core::{Error, Result};
use manifest::ManifestBuilder;
use serde::Serialize;
use std::path::{Path, PathBuf};
use svg::{line_plot, Baseline, Series};

#[derive(Parser)]
#[command(
    name = "ergo",
    version,
    about = "Event-representation quality measurement via Gromov-Wasserstein discrepancy"
)]
struct Cli {
    /// Corpus directory (written by `ergo gen`).
    #[arg(long, global = true, default_value = "corpus")]
    corpus: PathBuf,
    /// Output directory for reports, plots, and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 1 forces fully serial execution.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for event subsampling and fixture generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Entropic regularization weight.
    #[arg(long, global = true, default_value_t = 5e-3)]
    epsilon: f64,
    /// Max events per sample window; larger windows are subsampled.
    #[arg(long, global = true, default_value_t = 2000)]
    event_cap: usize,
    /// Batch size N for GWD_N averages (default: the whole corpus).
    #[arg(long, global = true)]
    n: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

/// Solver accuracy knobs shared by the scoring subcommands.
#[derive(Args, Clone, Serialize)]
struct SolverOpts {
    /// Relative objective change declaring outer-loop convergence.
    #[arg(long)]
    tol: Option<f64>,
    /// Max outer iterations.
    #[arg(long)]
    outer_max: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic event corpus (the bundled demo recipe unless a
    /// pattern is given).
    Gen {
        /// translating-edge | translating-bar | two-speed-bars
        #[arg(long)]
        pattern: Option<ScenePattern>,
        #[arg(long, default_value_t = 64)]
        width: u32,
        #[arg(long, default_value_t = 48)]
        height: u32,
        /// Stream duration in seconds (default: 0.1 s per sample window).
        #[arg(long)]
        duration: Option<f64>,
        /// Edge speed in pixels per second.
        #[arg(long, default_value_t = 32.0)]
        speed: f64,
        /// Number of equal sample windows.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Contrast threshold C.
        #[arg(long, default_value_t = 1.0)]
        contrast: f64,
        /// Spurious events per pixel per second.
        #[arg(long, default_value_t = 0.0)]
        noise_rate: f64,
    },
    /// Batched GWD of one representation over the corpus.
    Gwd {
        /// Preset name or representation spec JSON file.
        #[arg(long)]
        repr: String,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// GWD_N per channel count for a representation family.
    SweepChannels {
        /// voxel | mdes
        #[arg(long)]
        family: SweepFamily,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,12")]
        channels: Vec<usize>,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// GWD_N of one representation under increasing Gaussian blur.
    SweepBlur {
        #[arg(long)]
        repr: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4")]
        sigmas: Vec<f64>,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// GWD_N curves over batch sizes plus ranking agreement vs. the
    /// largest N.
    SweepSamples {
        #[arg(long, value_delimiter = ',', required = true)]
        reprs: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Stage-wise categorical search over the 196-candidate channel family.
    Search {
        /// exhaustive | random-k | surrogate
        #[arg(long, default_value = "exhaustive")]
        strategy: String,
        /// Candidates scored per stage for the sampled strategies.
        #[arg(long, default_value_t = 100)]
        k: usize,
        /// Channels to fill.
        #[arg(long, default_value_t = 12)]
        channels: usize,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Similarity-invariance suites on seeded random point sets.
    Invariance {
        /// Number of random point sets.
        #[arg(long, default_value_t = 10)]
        point_sets: usize,
        /// Override: check a single affine scale instead of the default grid.
        #[arg(long)]
        affine_a: Option<f64>,
        /// Offset paired with --affine-a (default 0).
        #[arg(long)]
        affine_b: Option<f64>,
    },
}

fn main() {
    let filter = std::env::var("ERGO_LOG").unwrap_or_else(|_| "warn".into());
    env_logger::Builder::new().parse_filters(&filter).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            std::process::exit(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("worker pool initializes once");
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn solver_config(cli: &Cli, opts: Option<&SolverOpts>) -> SolverConfig {
    let mut cfg = SolverConfig {
        epsilon: cli.epsilon,
        event_cap: cli.event_cap,
        seed: cli.seed,
        ..SolverConfig::default()
    };
    if let Some(o) = opts {
        if let Some(tol) = o.tol {
            cfg.tol = tol;
        }
        if let Some(outer) = o.outer_max {
            cfg.outer_max = outer;
        }
    }
    cfg
}

fn load(cli: &Cli) -> Result<Vec<Sample>> {
    let (_, samples) = load_corpus(&cli.corpus)?;
    Ok(samples)
}

fn batch_n(cli: &Cli, corpus_len: usize) -> usize {
    cli.n.unwrap_or(corpus_len)
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn sweep_series(report: &SweepReport) -> Series {
    Series {
        label: report.representation.clone(),
        points: report.points.iter().map(|p| (p.value, p.mean)).collect(),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Cmd::Gen { pattern, width, height, duration, speed, samples, contrast, noise_rate } => {
            let recipe = match pattern {
                None => default_demo_corpus(*samples, cli.seed),
                Some(p) => CorpusRecipe {
                    scene: SyntheticSceneConfig {
                        width: *width,
                        height: *height,
                        duration: duration.unwrap_or(0.1 * *samples as f64),
                        pattern: *p,
                        speed: *speed,
                        contrast_threshold: *contrast,
                        noise_rate: *noise_rate,
                        seed: cli.seed,
                    },
                    samples: *samples,
                },
            };
            let mb = ManifestBuilder::start("gen", &recipe, vec![recipe.scene.seed]);
            recipe.write_to(&cli.out)?;
            mb.finish().write(&cli.out)?;
            log::info!("wrote corpus with {} windows to {}", recipe.samples, cli.out.display());
        }
        Cmd::Gwd { repr, solver } => {
            let samples = load(cli)?;
            let builder = ReprBuilder::resolve(repr)?;
            let cfg = solver_config(cli, Some(solver));
            let n = batch_n(cli, samples.len());
            let mb = ManifestBuilder::start("gwd", &(&builder, &cfg, n), vec![cfg.seed]);
            let report = gwd_batch(&samples, &builder, &cfg, n)?;

            #[derive(Serialize)]
            struct GwdDocument<'a> {
                representation: String,
                solver: &'a SolverConfig,
                report: ergo_core::gw_metric::BatchReport,
            }
            let doc =
                GwdDocument { representation: builder.label(), solver: &cfg, report };
            write_json(&cli.out, "gwd.json", &doc)?;
            mb.finish().write(&cli.out)?;
            println!("GWD_{} ({}) = {:.6}", doc.report.n, doc.representation, doc.report.mean);
        }
        Cmd::SweepChannels { family, channels, solver } => {
            let samples = load(cli)?;
            let cfg = solver_config(cli, Some(solver));
            let n = batch_n(cli, samples.len());
            let mb =
                ManifestBuilder::start("sweep-channels", &(family, channels, &cfg, n), vec![cfg.seed]);
            let report = sweep_channels(&samples, *family, channels, &cfg, n)?;
            let stem = format!("sweep_channels_{}", report.representation);
            write_json(&cli.out, &format!("{stem}.json"), &report)?;
            let plot = line_plot(
                &format!("GWD_{n} vs. channel count"),
                "channels",
                "mean GWD",
                &[sweep_series(&report)],
                &[],
            );
            write_text(&cli.out, &format!("{stem}.svg"), &plot)?;
            mb.finish().write(&cli.out)?;
        }
        Cmd::SweepBlur { repr, sigmas, solver } => {
            let samples = load(cli)?;
            let builder = ReprBuilder::resolve(repr)?;
            let cfg = solver_config(cli, Some(solver));
            let n = batch_n(cli, samples.len());
            let mb =
                ManifestBuilder::start("sweep-blur", &(&builder, sigmas, &cfg, n), vec![cfg.seed]);
            let report = sweep_blur(&samples, &builder, sigmas, &cfg, n)?;
            write_json(&cli.out, "sweep_blur.json", &report)?;
            let plot = line_plot(
                &format!("GWD_{n} vs. blur sigma"),
                "blur sigma (px)",
                "mean GWD",
                &[sweep_series(&report)],
                &[],
            );
            write_text(&cli.out, "sweep_blur.svg", &plot)?;
            mb.finish().write(&cli.out)?;
        }
        Cmd::SweepSamples { reprs, ns, solver } => {
            let samples = load(cli)?;
            let builders =
                reprs.iter().map(|r| ReprBuilder::resolve(r)).collect::<Result<Vec<_>>>()?;
            let cfg = solver_config(cli, Some(solver));
            let mb =
                ManifestBuilder::start("sweep-samples", &(&builders, ns, &cfg), vec![cfg.seed]);
            let report = sweep_samples(&samples, &builders, ns, &cfg)?;
            write_json(&cli.out, "sweep_samples.json", &report)?;
            let series: Vec<Series> = report
                .curves
                .iter()
                .map(|c| Series {
                    label: c.representation.clone(),
                    points: c.points.iter().map(|p| (p.value, p.mean)).collect(),
                })
                .collect();
            let plot = line_plot("GWD_N vs. N", "N", "mean GWD", &series, &[]);
            write_text(&cli.out, "sweep_samples.svg", &plot)?;
            write_text(&cli.out, "sample_ranking.txt", &ranking_table(&report))?;
            mb.finish().write(&cli.out)?;
        }
        Cmd::Search { strategy, k, channels, solver } => {
            let samples = load(cli)?;
            let cfg = solver_config(cli, Some(solver));
            let n = batch_n(cli, samples.len());
            let strat = match strategy.as_str() {
                "exhaustive" => ProposalStrategy::Exhaustive,
                "random-k" => ProposalStrategy::RandomK { k: *k, seed: cli.seed },
                "surrogate" => ProposalStrategy::Surrogate { k: *k, seed: cli.seed },
                other => {
                    return Err(Error::validation(format!("unknown strategy '{other}'")))
                }
            };
            let space = CandidateSpace::default();
            let mb = ManifestBuilder::start(
                "search",
                &(strategy, k, channels, &cfg, n),
                vec![cfg.seed],
            );
            let (spec, state) = stagewise_search(&samples, &space, &strat, &cfg, *channels, n)?;
            write_json(&cli.out, "searched_representation.json", &spec)?;
            write_json(&cli.out, "search_log.json", &state)?;

            // Preset baselines under the same corpus and solver config.
            let mut baselines = Vec::new();
            for preset in PresetName::ALL {
                let report = gwd_batch(&samples, &ReprBuilder::preset(preset), &cfg, n)?;
                baselines.push(Baseline { label: preset.to_string(), y: report.mean });
            }
            let descent = Series {
                label: "search".into(),
                points: state
                    .stage_scores
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| ((i + 1) as f64, s))
                    .collect(),
            };
            let plot = line_plot(
                &format!("Stage-wise search descent (GWD_{n})"),
                "channels filled",
                "best mean GWD",
                &[descent],
                &baselines,
            );
            write_text(&cli.out, "search_descent.svg", &plot)?;
            mb.finish().write(&cli.out)?;
            println!(
                "final GWD_{n} = {:.6} after {} channels",
                state.stage_scores.last().copied().unwrap_or(f64::NAN),
                state.chosen.len()
            );
        }
        Cmd::Invariance { point_sets, affine_a, affine_b } => {
            let affine = match (affine_a, affine_b) {
                (Some(a), b) => Some((*a, b.unwrap_or(0.0))),
                (None, Some(_)) => {
                    return Err(Error::validation("--affine-b requires --affine-a"))
                }
                (None, None) => None,
            };
            let cfg = solver_config(cli, None);
            let mb =
                ManifestBuilder::start("invariance", &(point_sets, affine, &cfg), vec![cli.seed]);
            let report = invariance_report(cli.seed, *point_sets, affine, &cfg)?;
            write_json(&cli.out, "invariance.json", &report)?;
            mb.finish().write(&cli.out)?;
            for suite in &report.suites {
                println!(
                    "{}: max similarity deviation {:.3e}, max GWD deviation {:.3e} -> {}",
                    suite.name,
                    suite.max_deviation,
                    suite.max_gwd_deviation,
                    if suite.pass { "pass" } else { "FAIL" }
                );
            }
            if !report.pass {
                return Err(Error::Numerical {
                    iterations: 0,
                    msg: "invariance suites exceeded tolerance".into(),
                });
            }
        }
    }
    Ok(())
}

/// Plain-text ranking table: representation order at each N plus the
/// Kendall tau of that ranking against the largest N.
fn ranking_table(report: &SampleSweepReport) -> String {
    let mut out = String::from("N    tau_vs_max    ranking (best to worst)\n");
    for (idx, &n) in report.ns.iter().enumerate() {
        let mut ranked: Vec<(&str, f64)> = report
            .curves
            .iter()
            .map(|c| (c.representation.as_str(), c.points[idx].mean))
            .collect();
        ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let tau = report
            .kendall_vs_max
            .iter()
            .find(|(kn, _)| *kn == n)
            .map(|(_, t)| *t)
            .unwrap_or(f64::NAN);
        let names: Vec<String> =
            ranked.iter().map(|(name, mean)| format!("{name} ({mean:.5})")).collect();
        out.push_str(&format!("{n:<4} {tau:<13.4} {}\n", names.join(" < ")));
    }
    out
}

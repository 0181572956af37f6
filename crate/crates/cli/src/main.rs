//! Command-line surface for the crossing-metric toolkit: instance
//! generation, the four MST paths, comparison harnesses, embedding export,
//! SVG rendering, and a scaling benchmark.
//!
//! Machine-readable JSON goes to stdout; diagnostics and timings to stderr.
//! Everything is deterministic under a fixed `--seed` (default from
//! `CROSSMETRIC_SEED`, then 0).

use std::io::Read;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crossmetric_core::ann_mst::{mst_via_embedding, AnnConfig};
use crossmetric_core::arrangement::build_arrangement;
use crossmetric_core::embedding::{embed_points, plan_embedding, EmbeddingConfig};
use crossmetric_core::mst_approx::{approx_mst, SamplingConfig};
use crossmetric_core::mst_exact::{mst_bruteforce, mst_wavefront};
use crossmetric_core::seed::derive_key;
use crossmetric_core::svg::render;
use crossmetric_core::{generate_instance, Instance, SpanningForest};

#[derive(Parser)]
#[command(name = "crossmetric", about = "MSTs under the line-crossing metric", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn default_seed() -> u64 {
    std::env::var("CROSSMETRIC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExactAlgo {
    Bruteforce,
    Wavefront,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CompareAlgo {
    Wavefront,
    Approx,
    Ann,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ForestChoice {
    None,
    Bruteforce,
    Wavefront,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and print its JSON.
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        lines: usize,
        #[arg(long, default_value_t = 1_000_000)]
        range: i64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
    },
    /// Exact MST (oracle or wavefront) of an instance.
    ExactMst {
        #[arg(long, value_enum, default_value = "wavefront")]
        algo: ExactAlgo,
        #[arg(long)]
        file: Option<String>,
    },
    /// Staged-sampling (1+eps)-approximate MST.
    ApproxMst {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        c_samp: f64,
        #[arg(long, default_value_t = 4.0)]
        c_prop: f64,
        #[arg(long, default_value_t = 1.0)]
        c_short: f64,
        #[arg(long, default_value_t = 2.0)]
        c_est: f64,
        /// Also run the brute-force oracle and report the weight ratio.
        #[arg(long)]
        ratio_vs_oracle: bool,
        /// Emit stage events as JSON lines on stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        file: Option<String>,
    },
    /// Hamming embedding of all points at one distance threshold.
    Embed {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[arg(long)]
        file: Option<String>,
    },
    /// Approximate MST through the embedding and LSH nearest neighbors.
    AnnMst {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        #[arg(long)]
        ratio_vs_oracle: bool,
        /// Emit round events as JSON lines on stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        file: Option<String>,
    },
    /// Run algorithms over seeded trials and report ratios vs the oracle.
    Compare {
        /// Comma-separated algorithms: wavefront, approx, ann.
        #[arg(long, value_delimiter = ',', default_values = ["wavefront", "approx", "ann"])]
        algos: Vec<CompareAlgo>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1.5)]
        ratio_bound: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
        /// Worker threads for independent trials.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        file: Option<String>,
    },
    /// Render an instance (and optional MST overlay) as SVG.
    Render {
        #[arg(long, value_enum, default_value = "none")]
        forest: ForestChoice,
        #[arg(long)]
        file: Option<String>,
    },
    /// Measure wall-clock scaling of the MST paths; documentation only.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![25usize, 50, 100])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = default_seed())]
        seed: u64,
    },
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn read_instance(file: &Option<String>) -> Result<Instance, String> {
    let text = match file {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("stdin: {e}"))?;
            buf
        }
    };
    Instance::from_json(&text).map_err(|e| e.to_string())
}

fn digest(inst: &Instance) -> String {
    format!("{:016x}", fnv1a64(inst.to_json().as_bytes()))
}

fn edges_json(forest: &SpanningForest) -> serde_json::Value {
    json!(forest.edge_triples())
}

#[derive(Serialize)]
struct AlgoSummary {
    ratios: Vec<f64>,
    success_fraction: f64,
    median_ratio: f64,
}

fn median(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    }
}

fn run() -> Result<(), String> {
    match Cli::parse().command {
        Command::Gen { dim, points, lines, range, seed } => {
            let inst = generate_instance(dim, points, lines, range, seed)
                .map_err(|e| e.to_string())?;
            println!("{}", inst.to_json());
            Ok(())
        }

        Command::ExactMst { algo, file } => {
            let inst = read_instance(&file)?;
            let forest = match algo {
                ExactAlgo::Bruteforce => mst_bruteforce(&inst),
                ExactAlgo::Wavefront => mst_wavefront(&inst, None),
            }
            .map_err(|e| e.to_string())?;
            let report = json!({
                "weight": forest.total_weight(),
                "edges": edges_json(&forest),
            });
            println!("{report}");
            Ok(())
        }

        Command::ApproxMst {
            epsilon,
            seed,
            c_samp,
            c_prop,
            c_short,
            c_est,
            ratio_vs_oracle,
            trace,
            file,
        } => {
            let inst = read_instance(&file)?;
            let mut cfg = SamplingConfig::new(epsilon, seed);
            cfg.c_samp = c_samp;
            cfg.c_prop = c_prop;
            cfg.c_short = c_short;
            cfg.c_est = c_est;
            let started = Instant::now();
            let result = approx_mst(&inst, &cfg).map_err(|e| e.to_string())?;
            eprintln!("approx-mst: {} ms", started.elapsed().as_millis());
            if trace {
                for stage in &result.stages {
                    eprintln!("{}", serde_json::to_string(stage).unwrap());
                }
            }
            let mut report = json!({
                "instance_digest": digest(&inst),
                "seed": seed,
                "weight": result.weight(),
                "rough_estimate": result.rough_estimate,
                "l0": result.l0,
                "stages": result.stages,
                "edges": edges_json(&result.forest),
            });
            if ratio_vs_oracle {
                let oracle = mst_bruteforce(&inst).map_err(|e| e.to_string())?.total_weight();
                report["oracle_weight"] = json!(oracle);
                report["ratio_vs_oracle"] = json!(ratio(result.weight(), oracle));
            }
            println!("{report}");
            Ok(())
        }

        Command::Embed { r, epsilon, seed, file } => {
            let inst = read_instance(&file)?;
            let cfg = EmbeddingConfig::new(seed);
            let spec = plan_embedding(&inst, r, epsilon, &cfg).map_err(|e| e.to_string())?;
            let embedded = embed_points(&inst, &spec).map_err(|e| e.to_string())?;
            let mut label_bytes = Vec::with_capacity(embedded.labels.len() * spec.mu * 8);
            for row in &embedded.labels {
                for &v in row {
                    label_bytes.extend_from_slice(&v.to_le_bytes());
                }
            }
            let mut code_bytes = Vec::new();
            for code in &embedded.binary {
                let mut byte = 0u8;
                for i in 0..code.len() {
                    if code.get(i) {
                        byte |= 1 << (i % 8);
                    }
                    if i % 8 == 7 || i + 1 == code.len() {
                        code_bytes.push(byte);
                        byte = 0;
                    }
                }
            }
            use base64::Engine;
            let b64 = base64::engine::general_purpose::STANDARD;
            let report = json!({
                "instance_digest": digest(&inst),
                "spec": spec,
                "labels": b64.encode(&label_bytes),
                "binary": b64.encode(&code_bytes),
            });
            println!("{report}");
            Ok(())
        }

        Command::AnnMst { epsilon, seed, ratio_vs_oracle, trace, file } => {
            let inst = read_instance(&file)?;
            let cfg = AnnConfig::new(epsilon, seed);
            let started = Instant::now();
            let result = mst_via_embedding(&inst, &cfg).map_err(|e| e.to_string())?;
            eprintln!("ann-mst: {} ms", started.elapsed().as_millis());
            if trace {
                for rung in &result.ladder {
                    eprintln!("{}", serde_json::to_string(rung).unwrap());
                }
                for round in &result.round_trace {
                    eprintln!("{}", serde_json::to_string(round).unwrap());
                }
            }
            let mut report = json!({
                "instance_digest": digest(&inst),
                "seed": seed,
                "weight": result.weight(),
                "ladder": result.ladder,
                "rounds": result.rounds,
                "fallback_edges": result.fallback_edges,
                "edges": edges_json(&result.forest),
            });
            if ratio_vs_oracle {
                let oracle = mst_bruteforce(&inst).map_err(|e| e.to_string())?.total_weight();
                report["oracle_weight"] = json!(oracle);
                report["ratio_vs_oracle"] = json!(ratio(result.weight(), oracle));
            }
            println!("{report}");
            Ok(())
        }

        Command::Compare { algos, trials, ratio_bound, epsilon, seed, jobs, file } => {
            let inst = read_instance(&file)?;
            let started = Instant::now();
            let oracle = mst_bruteforce(&inst).map_err(|e| e.to_string())?.total_weight();
            let mut results = serde_json::Map::new();
            for &algo in &algos {
                let name = match algo {
                    CompareAlgo::Wavefront => "wavefront",
                    CompareAlgo::Approx => "approx",
                    CompareAlgo::Ann => "ann",
                };
                let ratios = run_trials(&inst, algo, trials, epsilon, seed, jobs)?;
                let mut sorted = ratios.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let successes = ratios.iter().filter(|&&r| r <= ratio_bound).count();
                let summary = AlgoSummary {
                    success_fraction: successes as f64 / trials.max(1) as f64,
                    median_ratio: median(&sorted),
                    ratios,
                };
                results.insert(name.into(), serde_json::to_value(summary).unwrap());
            }
            eprintln!("compare: {} ms", started.elapsed().as_millis());
            let report = json!({
                "command": "compare",
                "instance_digest": digest(&inst),
                "seed": seed,
                "parameters": {
                    "trials": trials,
                    "ratio_bound": ratio_bound,
                    "epsilon": epsilon,
                },
                "oracle_weight": oracle,
                "results": results,
            });
            println!("{report}");
            Ok(())
        }

        Command::Render { forest, file } => {
            let inst = read_instance(&file)?;
            let arr = if inst.dim == 2 {
                let all: Vec<u32> = (0..inst.n_hyperplanes() as u32).collect();
                Some(build_arrangement(&inst, &all, None).map_err(|e| e.to_string())?)
            } else {
                None
            };
            let tree = match forest {
                ForestChoice::None => None,
                ForestChoice::Bruteforce => Some(mst_bruteforce(&inst).map_err(|e| e.to_string())?),
                ForestChoice::Wavefront => {
                    Some(mst_wavefront(&inst, None).map_err(|e| e.to_string())?)
                }
            };
            let svg = render(&inst, arr.as_ref(), tree.as_ref()).map_err(|e| e.to_string())?;
            print!("{svg}");
            Ok(())
        }

        Command::Bench { sizes, seed } => {
            let mut rows = Vec::new();
            for &n in &sizes {
                let inst = generate_instance(2, n, n, 1_000_000, derive_key(seed, "bench", n as u64))
                    .map_err(|e| e.to_string())?;
                let time = |f: &dyn Fn() -> Result<u64, String>| -> Result<(u64, f64), String> {
                    let t = Instant::now();
                    let w = f()?;
                    Ok((w, t.elapsed().as_secs_f64() * 1e3))
                };
                let (w_oracle, t_oracle) =
                    time(&|| Ok(mst_bruteforce(&inst).map_err(|e| e.to_string())?.total_weight()))?;
                let (w_wave, t_wave) =
                    time(&|| Ok(mst_wavefront(&inst, None).map_err(|e| e.to_string())?.total_weight()))?;
                let (w_approx, t_approx) = time(&|| {
                    Ok(approx_mst(&inst, &SamplingConfig::new(0.5, seed))
                        .map_err(|e| e.to_string())?
                        .weight())
                })?;
                let (w_ann, t_ann) = time(&|| {
                    Ok(mst_via_embedding(&inst, &AnnConfig::new(0.5, seed))
                        .map_err(|e| e.to_string())?
                        .weight())
                })?;
                rows.push(json!({
                    "n": n,
                    "m": n,
                    "oracle": {"weight": w_oracle, "ms": t_oracle},
                    "wavefront": {"weight": w_wave, "ms": t_wave},
                    "approx": {"weight": w_approx, "ms": t_approx},
                    "ann": {"weight": w_ann, "ms": t_ann},
                }));
            }
            println!("{}", json!({"command": "bench", "seed": seed, "rows": rows}));
            Ok(())
        }
    }
}

fn ratio(weight: u64, oracle: u64) -> f64 {
    if oracle == 0 {
        if weight == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        weight as f64 / oracle as f64
    }
}

/// Runs `trials` independently seeded executions of one algorithm, spread
/// over up to `jobs` threads. Per-trial seeds are derived by index, so the
/// result is identical regardless of the thread count.
fn run_trials(
    inst: &Instance,
    algo: CompareAlgo,
    trials: usize,
    epsilon: f64,
    seed: u64,
    jobs: usize,
) -> Result<Vec<f64>, String> {
    let oracle = mst_bruteforce(inst).map_err(|e| e.to_string())?.total_weight();
    let one = |t: usize| -> Result<f64, String> {
        let trial_seed = derive_key(seed, "compare-trial", t as u64);
        let weight = match algo {
            CompareAlgo::Wavefront => mst_wavefront(inst, None)
                .map_err(|e| e.to_string())?
                .total_weight(),
            CompareAlgo::Approx => approx_mst(inst, &SamplingConfig::new(epsilon, trial_seed))
                .map_err(|e| e.to_string())?
                .weight(),
            CompareAlgo::Ann => mst_via_embedding(inst, &AnnConfig::new(epsilon, trial_seed))
                .map_err(|e| e.to_string())?
                .weight(),
        };
        Ok(ratio(weight, oracle))
    };
    if jobs <= 1 {
        return (0..trials).map(one).collect();
    }
    let mut out = vec![0.0; trials];
    let chunk = trials.div_ceil(jobs);
    std::thread::scope(|scope| -> Result<(), String> {
        let mut handles = Vec::new();
        for (c, slot) in out.chunks_mut(chunk).enumerate() {
            let handle = scope.spawn(move || -> Result<(), String> {
                for (i, v) in slot.iter_mut().enumerate() {
                    *v = one(c * chunk + i)?;
                }
                Ok(())
            });
            handles.push(handle);
        }
        for h in handles {
            h.join().map_err(|_| "worker panicked".to_string())??;
        }
        Ok(())
    })?;
    Ok(out)
}

fn main() {
    if let Err(msg) = run() {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
}

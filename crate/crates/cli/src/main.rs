//! Command-line front end for the labeling schemes.
//!
//! Exit codes: 0 for success or "adjacent", 1 for "not-adjacent" or a failed
//! verification, 2 for usage and input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use flatlabel::flat::{flat_encode_with, FlatOptions};
use flatlabel::gen::{gen_adversarial, AdversarialKind, GenSpec, Instance, Shape};
use flatlabel::io;
use flatlabel::product_label::product_encode;
use flatlabel::treewidth::{decompose, TreeDecomposition};
use flatlabel::tw_label::tw_encode;
use flatlabel::verify::verify_archive;
use flatlabel::{Graph, LabelArchive, ProductEmbedding, VertexSet};

#[derive(Parser)]
#[command(
    name = "flatlabel",
    version,
    about = "Adjacency labels for subgraphs of H x P"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Tw,
    Product,
    Flat,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a graph into a label archive.
    Encode {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long)]
        graph: PathBuf,
        /// Embedding into H x P (product and flat schemes).
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Decomposition of the graph (tw) or of the host H (product, flat).
        /// Computed heuristically when absent.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Vertices that get short labels (tw and product schemes).
        #[arg(long)]
        q_file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Tagged path coordinates (product scheme; flat uses them by default).
        #[arg(long)]
        compress_endpoints: bool,
        /// Flat scheme without either length saving.
        #[arg(long)]
        baseline: bool,
        /// Upper bound on the width of a computed decomposition.
        #[arg(long)]
        width_hint: Option<usize>,
    },
    /// Decide adjacency of two vertices from their labels.
    Query {
        archive: PathBuf,
        u: usize,
        v: usize,
    },
    /// Compare an archive against its source graph.
    Verify {
        archive: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Seed for the sampled pairs of large graphs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Label-length and timing table over generated instances, as CSV.
    Stats {
        /// `LO:HI` (powers of two from LO to HI) or a comma-separated list.
        #[arg(long)]
        sweep: String,
        #[arg(long, value_enum, default_value = "flat")]
        scheme: Scheme,
        #[arg(long, default_value_t = 3)]
        w: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "product-subgraph")]
        shape: String,
        #[arg(long, default_value_t = 0.8)]
        keep: f64,
        #[arg(long)]
        baseline: bool,
    },
    /// Write a generated instance as `<out>.graph`, `<out>.embedding.json`
    /// and `<out>.decomposition.json`.
    Gen {
        #[arg(long, default_value = "product-subgraph")]
        shape: String,
        /// Adversarial family instead of a shape.
        #[arg(long)]
        adversarial: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        w: usize,
        /// Path length.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.8)]
        keep: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Encode {
            scheme,
            graph,
            embedding,
            decomposition,
            q_file,
            out,
            compress_endpoints,
            baseline,
            width_hint,
        } => {
            let g =
                io::read_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let inputs = EncodeInputs {
                scheme,
                embedding: embedding.as_deref(),
                decomposition: decomposition.as_deref(),
                q_file: q_file.as_deref(),
                compress_endpoints,
                baseline,
                width_hint,
            };
            let start = Instant::now();
            let archive = encode(&g, &inputs)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            archive
                .write_file(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "scheme={} n={} w={} max_bits={} mean_bits={:.2} encode_ms={ms:.1} out={}",
                archive.kind.name(),
                archive.n,
                archive.w,
                archive.max_label_bits(),
                archive.mean_label_bits(),
                out.display()
            );
            Ok(0)
        }
        Command::Query { archive, u, v } => {
            let a = read_archive(&archive)?;
            if u == v {
                return Err(usage("u and v must differ"));
            }
            if u >= a.n || v >= a.n {
                return Err(usage(format!("vertices must be below n = {}", a.n)));
            }
            let adjacent = a.adjacent(&a.decoder()?, u, v)?;
            println!("{}", if adjacent { "adjacent" } else { "not-adjacent" });
            Ok(u8::from(!adjacent))
        }
        Command::Verify {
            archive,
            graph,
            seed,
        } => {
            let a = read_archive(&archive)?;
            let g =
                io::read_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            if g.n() != a.n {
                return Err(usage(format!(
                    "archive has {} vertices, graph has {}",
                    a.n,
                    g.n()
                )));
            }
            let report = verify_archive(&a, &g, seed)?;
            println!(
                "pairs={} sampled={} mismatches={} errors={}",
                report.pairs_checked, report.sampled, report.mismatch_count, report.error_count
            );
            for m in &report.mismatches {
                println!("mismatch {} {} expected={}", m.u, m.v, m.expected);
            }
            for (u, v, e) in &report.errors {
                println!("error {u} {v}: {e}");
            }
            Ok(u8::from(!report.is_ok()))
        }
        Command::Stats {
            sweep,
            scheme,
            w,
            seed,
            shape,
            keep,
            baseline,
        } => {
            let ns = parse_sweep(&sweep)?;
            let shape: Shape = shape.parse().map_err(|e| usage(format!("{e}")))?;
            stats(&ns, scheme, w, seed, shape, keep, baseline)?;
            Ok(0)
        }
        Command::Gen {
            shape,
            adversarial,
            n,
            w,
            d,
            keep,
            seed,
            out,
        } => {
            let inst = match adversarial {
                Some(kind) => {
                    let kind: AdversarialKind = kind.parse().map_err(|e| usage(format!("{e}")))?;
                    gen_adversarial(kind, seed, n, w)?
                }
                None => GenSpec {
                    seed,
                    n,
                    w,
                    d,
                    keep,
                    shape: shape.parse().map_err(|e| usage(format!("{e}")))?,
                }
                .generate()?,
            };
            write_instance(&inst, &out)?;
            println!(
                "n={} m={} host_n={} d={} width={}",
                inst.graph.n(),
                inst.graph.m(),
                inst.embedding.host.n(),
                inst.embedding.path_len,
                inst.host_decomposition.width()
            );
            Ok(0)
        }
    }
}

struct EncodeInputs<'a> {
    scheme: Scheme,
    embedding: Option<&'a Path>,
    decomposition: Option<&'a Path>,
    q_file: Option<&'a Path>,
    compress_endpoints: bool,
    baseline: bool,
    width_hint: Option<usize>,
}

fn read_archive(path: &Path) -> Result<LabelArchive> {
    LabelArchive::read_file(path).with_context(|| format!("reading archive {}", path.display()))
}

fn decomposition_for(
    g: &Graph,
    path: Option<&Path>,
    hint: Option<usize>,
) -> Result<TreeDecomposition> {
    Ok(match path {
        Some(p) => io::read_decomposition(p).with_context(|| format!("reading {}", p.display()))?,
        None => decompose(g, hint)?,
    })
}

fn encode(g: &Graph, inp: &EncodeInputs<'_>) -> Result<LabelArchive> {
    if inp.scheme != Scheme::Flat && inp.baseline {
        return Err(usage("--baseline applies to the flat scheme only"));
    }
    if inp.scheme == Scheme::Flat && inp.q_file.is_some() {
        return Err(usage("--q-file applies to the tw and product schemes"));
    }
    if inp.scheme == Scheme::Tw && inp.compress_endpoints {
        return Err(usage(
            "--compress-endpoints applies to the product and flat schemes",
        ));
    }
    let q = match inp.q_file {
        Some(p) => {
            io::read_vertex_set(p, g.n()).with_context(|| format!("reading {}", p.display()))?
        }
        None => VertexSet::empty(),
    };
    let embedding = |name: &str| -> Result<ProductEmbedding> {
        let p = inp
            .embedding
            .ok_or_else(|| usage(format!("the {name} scheme needs --embedding")))?;
        io::read_embedding(p).with_context(|| format!("reading {}", p.display()))
    };
    match inp.scheme {
        Scheme::Tw => {
            let td = decomposition_for(g, inp.decomposition, inp.width_hint)?;
            let (meta, labels) = tw_encode(g, &td, &q)?;
            Ok(LabelArchive::from_tw(&meta, labels))
        }
        Scheme::Product => {
            let e = embedding("product")?;
            let td = decomposition_for(&e.host, inp.decomposition, inp.width_hint)?;
            let p = product_encode(g, &e, &td, &q, inp.compress_endpoints)?;
            Ok(LabelArchive::from_product(&p.meta, p.labels))
        }
        Scheme::Flat => {
            let e = embedding("flat")?;
            let td = decomposition_for(&e.host, inp.decomposition, inp.width_hint)?;
            let opts = if inp.baseline {
                FlatOptions::baseline()
            } else {
                FlatOptions::default()
            };
            Ok(flat_encode_with(g, &e, &td, opts)?.archive)
        }
    }
}

fn parse_sweep(s: &str) -> Result<Vec<usize>> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("bad sweep value {t:?}")))
    };
    let ns = if let Some((lo, hi)) = s.split_once(':') {
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo == 0 || lo > hi {
            return Err(usage("sweep range must satisfy 0 < LO <= HI"));
        }
        std::iter::successors(Some(lo), |&n| n.checked_mul(2))
            .take_while(|&n| n <= hi)
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(usage("sweep needs positive sizes"));
    }
    Ok(ns)
}

fn stats(
    ns: &[usize],
    scheme: Scheme,
    w: usize,
    seed: u64,
    shape: Shape,
    keep: f64,
    baseline: bool,
) -> Result<()> {
    println!("n,scheme,w,max_bits,mean_bits,bits_per_log2n,encode_ms,time_ratio");
    let mut prev: Option<(usize, f64)> = None;
    for &n in ns {
        let inst = GenSpec {
            seed,
            n,
            w,
            d: None,
            keep,
            shape,
        }
        .generate()?;
        let start = Instant::now();
        let archive = match scheme {
            Scheme::Tw => {
                let td = if shape == Shape::Ktree {
                    inst.host_decomposition.clone()
                } else {
                    decompose(&inst.graph, None)?
                };
                let (meta, labels) = tw_encode(&inst.graph, &td, &VertexSet::empty())?;
                LabelArchive::from_tw(&meta, labels)
            }
            Scheme::Product => {
                let p = product_encode(
                    &inst.graph,
                    &inst.embedding,
                    &inst.host_decomposition,
                    &VertexSet::empty(),
                    !baseline,
                )?;
                LabelArchive::from_product(&p.meta, p.labels)
            }
            Scheme::Flat => {
                let opts = if baseline {
                    FlatOptions::baseline()
                } else {
                    FlatOptions::default()
                };
                flat_encode_with(&inst.graph, &inst.embedding, &inst.host_decomposition, opts)?
                    .archive
            }
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let max = archive.max_label_bits();
        let log_n = (n as f64).log2();
        let per_log = if n > 1 {
            format!("{:.4}", max as f64 / log_n)
        } else {
            String::new()
        };
        // Time ratio only between consecutive doublings.
        let ratio = match prev {
            Some((pn, pms)) if pn * 2 == n && pms > 0.0 => format!("{:.3}", ms / pms),
            _ => String::new(),
        };
        println!(
            "{n},{},{w},{max},{:.3},{per_log},{ms:.3},{ratio}",
            archive.kind.name(),
            archive.mean_label_bits()
        );
        prev = Some((n, ms));
    }
    Ok(())
}

fn write_instance(inst: &Instance, out: &Path) -> Result<()> {
    let with_suffix = |suffix: &str| {
        let mut s = out.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let files = [
        (with_suffix(".graph"), io::graph_to_text(&inst.graph)),
        (
            with_suffix(".embedding.json"),
            io::embedding_to_json(&inst.embedding),
        ),
        (
            with_suffix(".decomposition.json"),
            io::decomposition_to_json(&inst.host_decomposition),
        ),
    ];
    for (path, body) in files {
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

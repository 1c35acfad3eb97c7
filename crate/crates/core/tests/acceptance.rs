//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p flatlabel --test acceptance`. Extra arguments
//! that do not start with `-` select criteria by id (`c5`, `c10`).
//! Every tolerance is a constant below.

use std::hint::black_box;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::Rng;

use flatlabel::bidecomposition::{
    build_bidecomposition, tree_balanced_separator, tw_balanced_separator, two_weight_partition,
    WeightFn,
};
use flatlabel::codec::BitString;
use flatlabel::flat::{block_width, flat_encode, flat_encode_with, FlatOptions};
use flatlabel::gen::{
    gen_partial_ktree, gen_product_instance, rng, GenSpec, Instance, ProductParams, Shape,
};
use flatlabel::product_label::{coord_diff, product_encode, CoordDiff, CoordField};
use flatlabel::treewidth::chordal_orientation;
use flatlabel::tw_label::{tw_adjacent, tw_encode};
use flatlabel::verify::verify_archive;
use flatlabel::{Decoder, Graph, LabelArchive, VertexSet};

/// Label-length constants, fixed before any sweep. A label holds at most
/// `3(w+1)` neighbor entries over its two components, each at most about
/// `2 log log n` bits; `C0` covers tags, case bit and length prefixes.
const C: f64 = 6.0;
const C0: f64 = 32.0;

const C1_INSTANCES: usize = 200;
const C1_TIME_LIMIT: Duration = Duration::from_secs(300);
const C2_INSTANCES: usize = 200;
const C3_TREE_CASES: usize = 400;
const C3_TW_CASES: usize = 300;
const C3_PARTITION_CASES: usize = 300;
const C4_SEEDS: u64 = 5;
const DEPTH_SLACK: f64 = 8.0;
const C5_W: usize = 3;
const C5_RATIO_LIMIT: f64 = 1.60;
const C6_N: usize = 1 << 14;
const C6_Q: usize = 32;
const C6_GAP: usize = 6;
const C8_RATIO_LIMIT: f64 = 2.6;
const C8_RUNS: usize = 7;
const C9_QUERIES: usize = 100_000;
const C9_RUNS: usize = 7;
const C9_RATIO_LIMIT: f64 = 3.0;
const C10_INSTANCES: u64 = 20;
/// Relative slack for floating-point sums in separator checks.
const FLOAT_TOL: f64 = 1e-9;

type Criterion = fn() -> Vec<Outcome>;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Adjacency matrix built from the edge list.
struct Matrix {
    n: usize,
    bits: Vec<u64>,
}

impl Matrix {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut bits = vec![0u64; (n * n).div_ceil(64)];
        for (u, v) in g.edges() {
            for p in [u * n + v, v * n + u] {
                bits[p / 64] |= 1 << (p % 64);
            }
        }
        Self { n, bits }
    }

    fn get(&self, u: usize, v: usize) -> bool {
        let p = u * self.n + v;
        self.bits[p / 64] >> (p % 64) & 1 == 1
    }
}

/// Mismatches and decode errors over all unordered pairs, both argument orders.
fn all_pairs(
    labels: &[BitString],
    m: &Matrix,
    adjacent: impl Fn(&BitString, &BitString) -> Option<bool>,
) -> usize {
    let n = labels.len();
    let mut bad = 0;
    for u in 0..n {
        for v in u + 1..n {
            let expected = Some(m.get(u, v));
            bad += usize::from(adjacent(&labels[u], &labels[v]) != expected);
            bad += usize::from(adjacent(&labels[v], &labels[u]) != expected);
        }
    }
    bad
}

fn log_uniform(r: &mut impl Rng, lo: usize, hi: usize) -> usize {
    let x = r.gen_range((lo as f64).ln()..=(hi as f64).ln());
    (x.exp().round() as usize).clamp(lo, hi)
}

fn c1_flat_soundness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xc1);
    let mut bad = 0;
    let mut pairs = 0u64;
    let (mut n_min, mut n_max) = (usize::MAX, 0);
    for i in 0..C1_INSTANCES {
        let n = log_uniform(&mut r, 16, 4000);
        let w = r.gen_range(1..=4);
        let d = r.gen_range(3..=3 * block_width(n));
        let fill = r.gen_range(0.3..0.9);
        let keep = r.gen_range(0.5..=1.0);
        let host_n = ((n as f64 / fill / (d + 1) as f64).ceil() as usize).max(w + 1);
        let params = ProductParams {
            host_n,
            k: w,
            d,
            keep,
            n,
        };
        let inst = gen_product_instance(1000 + i as u64, &params).expect("generator");
        let arch =
            flat_encode(&inst.graph, &inst.embedding, &inst.host_decomposition).expect("encoder");
        let dec = arch.decoder().expect("decoder");
        let m = Matrix::new(&inst.graph);
        bad += all_pairs(&arch.labels, &m, |a, b| dec.adjacent(a, b).ok());
        pairs += (n * (n - 1) / 2) as u64;
        n_min = n_min.min(n);
        n_max = n_max.max(n);
    }
    let elapsed = start.elapsed();
    outcome(
        "C1 flat decoder soundness",
        bad == 0 && elapsed < C1_TIME_LIMIT,
        format!(
            "{C1_INSTANCES} instances, n in [{n_min}, {n_max}], {pairs} pairs x 2 orders, {bad} mismatches, {:.1}s (limit {}s)",
            elapsed.as_secs_f64(),
            C1_TIME_LIMIT.as_secs()
        ),
    )
}

fn c2_tw_soundness() -> Outcome {
    let mut r = rng(0xc2);
    let mut bad = 0;
    let mut fill_pairs = 0;
    let mut fill_bad = 0;
    for i in 0..C2_INSTANCES {
        let k = r.gen_range(1..=5);
        let n = log_uniform(&mut r, k + 1, 2000).max(k + 1);
        let keep = r.gen_range(0.4..0.95);
        let (g, td) = gen_partial_ktree(2000 + i as u64, n, k, keep).expect("generator");
        let q = if i % 2 == 0 {
            VertexSet::empty()
        } else {
            let size = r.gen_range(1..=n);
            VertexSet::new(sample(&mut r, n, size).into_vec(), n).expect("vertex set")
        };
        let (meta, labels) = tw_encode(&g, &td, &q).expect("encoder");
        let m = Matrix::new(&g);
        bad += all_pairs(&labels, &m, |a, b| tw_adjacent(a, b, &meta).ok());
        let plus = chordal_orientation(&g, &td).completion();
        for (u, v) in plus.edges() {
            if !m.get(u, v) {
                fill_pairs += 1;
                fill_bad += usize::from(tw_adjacent(&labels[u], &labels[v], &meta) != Ok(false));
            }
        }
    }
    outcome(
        "C2 tw decoder soundness",
        bad == 0 && fill_bad == 0 && fill_pairs > 0,
        format!(
            "{C2_INSTANCES} partial k-trees, {bad} mismatches, {fill_pairs} fill pairs with {fill_bad} decoded adjacent"
        ),
    )
}

/// Component weights after deleting `removed`, by DFS.
fn component_weights(adj: &[Vec<usize>], removed: &[bool], w: &[f64]) -> Vec<f64> {
    let mut seen = removed.to_vec();
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut total = 0.0;
        while let Some(v) = stack.pop() {
            total += w[v];
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        out.push(total);
    }
    out
}

fn random_weights(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if r.gen_bool(0.2) {
                0.0
            } else {
                f64::from(r.gen_range(1u32..100))
            }
        })
        .collect()
}

fn c3_separators() -> Outcome {
    let mut r = rng(0xc3);
    let mut violations = 0;
    for _ in 0..C3_TREE_CASES {
        let n = r.gen_range(1..400);
        let parent: Vec<Option<usize>> = (0..n)
            .map(|i| (i > 0 && !r.gen_bool(0.05)).then(|| r.gen_range(0..i)))
            .collect();
        let weights = random_weights(&mut r, n);
        let eps = r.gen_range(0.01..0.9);
        let s = tree_balanced_separator(&parent, &WeightFn::new(weights.clone()).unwrap(), eps)
            .unwrap();
        let total: f64 = weights.iter().sum();
        let mut adj = vec![Vec::new(); n];
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[x].push(p);
                adj[p].push(x);
            }
        }
        let mut removed = vec![false; n];
        s.iter().for_each(|&x| removed[x] = true);
        let heavy = component_weights(&adj, &removed, &weights)
            .into_iter()
            .filter(|&c| c > eps * total * (1.0 + FLOAT_TOL))
            .count();
        violations += usize::from(s.len() as f64 > 1.0 / eps) + heavy;
    }
    for i in 0..C3_TW_CASES {
        let k = r.gen_range(1..=5);
        let n = r.gen_range(k + 1..400);
        let (g, td) = gen_partial_ktree(3000 + i as u64, n, k, r.gen_range(0.3..1.0)).unwrap();
        let weights = random_weights(&mut r, n);
        let eps = r.gen_range(0.01..0.9);
        let z =
            tw_balanced_separator(&g, &td, &WeightFn::new(weights.clone()).unwrap(), eps).unwrap();
        let total: f64 = weights.iter().sum();
        let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
        let mut removed = vec![false; n];
        z.iter().for_each(|&v| removed[v] = true);
        let heavy = component_weights(&adj, &removed, &weights)
            .into_iter()
            .filter(|&c| c > eps * total * (1.0 + FLOAT_TOL))
            .count();
        violations += usize::from(z.len() > (1.0 / eps).ceil() as usize * (k + 1)) + heavy;
    }
    for _ in 0..C3_PARTITION_CASES {
        let m = r.gen_range(1..300);
        let w1 = random_weights(&mut r, m);
        let w2 = random_weights(&mut r, m);
        let (t1, t2): (f64, f64) = (w1.iter().sum(), w2.iter().sum());
        let share = |x: f64, t: f64| if t > 0.0 { x / t } else { 0.0 };
        let heaviest = (0..m)
            .map(|i| share(w1[i], t1).max(share(w2[i], t2)))
            .fold(0.0, f64::max);
        let eps = (heaviest + r.gen_range(0.0..0.2)).clamp(1e-3, 1.0);
        let p = two_weight_partition(
            &WeightFn::new(w1.clone()).unwrap(),
            &WeightFn::new(w2.clone()).unwrap(),
            eps,
        )
        .unwrap();
        for (w, t) in [(&w1, t1), (&w2, t2)] {
            for side in [&p.y, &p.z] {
                let s: f64 = side.iter().map(|&i| w[i]).sum();
                violations += usize::from(s > (0.5 + 3.0 * eps) * t * (1.0 + FLOAT_TOL));
            }
        }
        if t1 > 0.0 && t2 > 0.0 {
            let mut prefix = 0.0;
            for &i in &p.order {
                prefix += w1[i] / t1 - w2[i] / t2;
                violations += usize::from(prefix.abs() > 2.0 * eps + FLOAT_TOL);
            }
        }
        let mut all: Vec<usize> = p.y.iter().chain(&p.z).copied().collect();
        all.sort_unstable();
        violations += usize::from(all != (0..m).collect::<Vec<_>>());
    }
    let cases = C3_TREE_CASES + C3_TW_CASES + C3_PARTITION_CASES;
    outcome(
        "C3 separator bounds",
        violations == 0,
        format!("{cases} cases, {violations} violations"),
    )
}

fn c4_bidecomposition() -> Outcome {
    let k = 3;
    let mut violations = 0;
    let mut worst = String::new();
    for e in 6..=12 {
        let n = 1usize << e;
        for seed in 0..C4_SEEDS {
            let (g, td) = gen_partial_ktree(4000 + seed, n, k, 0.8).unwrap();
            let s_len = (n as f64).powf(2.0 / 3.0).ceil() as usize;
            let s = VertexSet::new(sample(&mut rng(seed), n, s_len).into_vec(), n).unwrap();
            let plus = chordal_orientation(&g, &td).completion();
            let bd = build_bidecomposition(&plus, &td, &s).unwrap();
            let part_cap = 6 * (k + 1) * log2(n).ceil() as usize;
            let s_depth = s
                .iter()
                .map(|v| bd.nodes[bd.alpha[v]].depth)
                .max()
                .unwrap_or(0);
            let ok_depth = bd.depth() as f64 <= log2(n) + DEPTH_SLACK;
            let ok_s = s_depth as f64 <= log2(s_len) + DEPTH_SLACK;
            let ok_part = bd.max_part_size() <= part_cap;
            let ok_valid = bd.validate(&plus).is_ok();
            violations += [ok_depth, ok_s, ok_part, ok_valid]
                .iter()
                .filter(|&&b| !b)
                .count();
            if seed == 0 && e == 12 {
                worst = format!(
                    "n=4096: depth {} (cap {:.1}), S depth {} (cap {:.1}), max part {} (cap {part_cap})",
                    bd.depth(),
                    log2(n) + DEPTH_SLACK,
                    s_depth,
                    log2(s_len) + DEPTH_SLACK,
                    bd.max_part_size()
                );
            }
        }
    }
    outcome(
        "C4 bidecomposition bounds",
        violations == 0,
        format!("{violations} violations; {worst}"),
    )
}

/// Sparse instance: half as many host vertices as graph vertices and a
/// path four blocks long, so the border set is small against the host.
fn sparse_instance(n: usize, w: usize, seed: u64) -> Instance {
    gen_product_instance(
        seed,
        &ProductParams {
            host_n: n / 2,
            k: w,
            d: 4 * block_width(n),
            keep: 1.0,
            n,
        },
    )
    .expect("generator")
}

fn length_bound(n: usize, w: usize) -> f64 {
    4.0 / 3.0 * log2(n) + C * (w + 1) as f64 * log2(n).log2() + C0
}

fn c5_label_lengths() -> Vec<Outcome> {
    let mut rows = Vec::new();
    let mut over = 0;
    let mut last = (0.0, 0.0);
    for e in 8..=16 {
        let n = 1usize << e;
        let inst = sparse_instance(n, C5_W, 0);
        let enc = |opts| {
            flat_encode_with(&inst.graph, &inst.embedding, &inst.host_decomposition, opts)
                .expect("encoder")
                .archive
                .max_label_bits()
        };
        let (main, base) = (enc(FlatOptions::default()), enc(FlatOptions::baseline()));
        let bound = length_bound(n, C5_W);
        over += usize::from(main as f64 > bound);
        rows.push(format!("2^{e}: {main}/{base} (bound {bound:.1})"));
        last = (main as f64 / e as f64, base as f64 / e as f64);
    }
    let (main_ratio, base_ratio) = last;
    vec![
        outcome(
            "C5a label length bound",
            over == 0,
            format!(
                "C={C}, C0={C0}, w={C5_W}; max bits main/baseline: {}",
                rows.join(", ")
            ),
        ),
        outcome(
            "C5b ratio below baseline at 2^16",
            main_ratio < base_ratio,
            format!("main {main_ratio:.3} vs baseline {base_ratio:.3}"),
        ),
        outcome(
            "C5c ratio at 2^16",
            main_ratio <= C5_RATIO_LIMIT,
            format!("max bits / log2 n = {main_ratio:.3} (limit {C5_RATIO_LIMIT})"),
        ),
    ]
}

fn c6_q_saving() -> Outcome {
    let k = 3;
    let n = C6_N;
    let (g, td) = gen_partial_ktree(6, n, k, 0.8).unwrap();
    let q = VertexSet::new(sample(&mut rng(6), n, C6_Q).into_vec(), n).unwrap();
    let (_, labels) = tw_encode(&g, &td, &q).unwrap();
    let q_max = q.iter().map(|v| labels[v].len()).max().unwrap();
    let other_max = (0..n)
        .filter(|&v| !q.contains(v))
        .map(|v| labels[v].len())
        .max()
        .unwrap();
    let bound = log2(C6_Q) + C * (k + 1) as f64 * log2(n).log2() + C0;
    outcome(
        "C6 Q-saving",
        q_max as f64 <= bound && q_max + C6_GAP <= other_max,
        format!("|Q|={C6_Q}: Q max {q_max} bits (bound {bound:.1}), generic max {other_max} (gap >= {C6_GAP})"),
    )
}

fn c7_coordinate_compression() -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for d in 4..=64u64 {
        for i in 0..=d {
            for j in 0..=d {
                let plain = match i as i64 - j as i64 {
                    -1 => CoordDiff::Minus1,
                    0 => CoordDiff::Zero,
                    1 => CoordDiff::Plus1,
                    _ => CoordDiff::Far,
                };
                checked += 1;
                mismatches += usize::from(
                    coord_diff(CoordField::compress(i, d), CoordField::compress(j, d)) != plain,
                );
            }
        }
    }
    outcome(
        "C7 coordinate compression",
        mismatches == 0,
        format!("{checked} pairs over d = 4..64, {mismatches} mismatches"),
    )
}

fn timing_instance(n: usize) -> Instance {
    GenSpec {
        seed: 8,
        n,
        w: 3,
        d: None,
        keep: 0.8,
        shape: Shape::ProductSubgraph,
    }
    .generate()
    .expect("generator")
}

fn c8_encoder_scaling() -> Outcome {
    let mut times = Vec::new();
    for e in 12..=16 {
        let inst = timing_instance(1 << e);
        let runs = (0..C8_RUNS)
            .map(|_| {
                let t = Instant::now();
                black_box(
                    flat_encode(&inst.graph, &inst.embedding, &inst.host_decomposition).unwrap(),
                );
                t.elapsed().as_secs_f64()
            })
            .collect();
        times.push(median(runs));
    }
    let ratios: Vec<f64> = times.windows(2).map(|p| p[1] / p[0]).collect();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    outcome(
        "C8 encoder scaling",
        worst <= C8_RATIO_LIMIT,
        format!(
            "median ms {:?}, doubling ratios {:?} (limit {C8_RATIO_LIMIT})",
            times
                .iter()
                .map(|t| (t * 1e4).round() / 10.0)
                .collect::<Vec<_>>(),
            ratios
                .iter()
                .map(|r| (r * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        ),
    )
}

fn per_query_ns(arch: &LabelArchive, dec: &Decoder, seed: u64) -> f64 {
    let n = arch.n;
    let mut r = rng(seed);
    let queries: Vec<(usize, usize)> = (0..C9_QUERIES)
        .map(|_| {
            let u = r.gen_range(0..n);
            let v = r.gen_range(0..n - 1);
            (u, if v >= u { v + 1 } else { v })
        })
        .collect();
    let runs = (0..C9_RUNS)
        .map(|_| {
            let t = Instant::now();
            let mut hits = 0usize;
            for &(u, v) in &queries {
                hits += usize::from(dec.adjacent(&arch.labels[u], &arch.labels[v]).unwrap());
            }
            black_box(hits);
            t.elapsed().as_secs_f64() * 1e9 / C9_QUERIES as f64
        })
        .collect();
    median(runs)
}

fn c9_decoder_time() -> Outcome {
    let mut ns = Vec::new();
    for n in [1 << 10, 1 << 16] {
        let inst = timing_instance(n);
        let arch = flat_encode(&inst.graph, &inst.embedding, &inst.host_decomposition).unwrap();
        ns.push(per_query_ns(&arch, &arch.decoder().unwrap(), 9));
    }
    let ratio = ns[1] / ns[0];
    outcome(
        "C9 decoder time",
        ratio <= C9_RATIO_LIMIT,
        format!(
            "median per query {:.0} ns at 2^10, {:.0} ns at 2^16, ratio {ratio:.2} (limit {C9_RATIO_LIMIT})",
            ns[0], ns[1]
        ),
    )
}

fn c10_persistence() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let mut failures = Vec::new();
    let mut r = rng(0xc10);
    for seed in 0..C10_INSTANCES {
        let n = log_uniform(&mut r, 20, 3000);
        let inst = GenSpec {
            seed,
            n,
            w: r.gen_range(1..=4),
            d: None,
            keep: 0.8,
            shape: Shape::ProductSubgraph,
        }
        .generate()
        .unwrap();
        let arch = match seed % 3 {
            0 => flat_encode(&inst.graph, &inst.embedding, &inst.host_decomposition).unwrap(),
            1 => {
                let p = product_encode(
                    &inst.graph,
                    &inst.embedding,
                    &inst.host_decomposition,
                    &VertexSet::empty(),
                    true,
                )
                .unwrap();
                LabelArchive::from_product(&p.meta, p.labels)
            }
            _ => {
                let (g, td) = gen_partial_ktree(seed, n, 3, 0.8).unwrap();
                let (meta, labels) = tw_encode(&g, &td, &VertexSet::empty()).unwrap();
                let arch = LabelArchive::from_tw(&meta, labels);
                check_persisted(&arch, &g, dir, seed, &mut failures);
                continue;
            }
        };
        check_persisted(&arch, &inst.graph, dir, seed, &mut failures);
    }
    outcome(
        "C10 bit-exact persistence",
        failures.is_empty(),
        format!("{C10_INSTANCES} archives, failures: {failures:?}"),
    )
}

fn check_persisted(
    arch: &LabelArchive,
    g: &Graph,
    dir: &std::path::Path,
    seed: u64,
    failures: &mut Vec<String>,
) {
    let path = dir.join(format!("acceptance-{seed}.flbl"));
    let bytes = arch.to_bytes().unwrap();
    arch.write_file(&path).unwrap();
    let back = LabelArchive::read_file(&path).unwrap();
    if back != *arch || back.to_bytes().unwrap() != bytes {
        failures.push(format!("seed {seed}: round trip differs"));
    }
    let report = verify_archive(&back, g, seed).unwrap();
    if !report.is_ok() {
        failures.push(format!(
            "seed {seed}: {} mismatches, {} errors",
            report.mismatch_count, report.error_count
        ));
    }
    let _ = std::fs::remove_file(path);
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.to_lowercase())
        .collect();
    let selected =
        |id: &str| filters.is_empty() || filters.iter().any(|f| id.eq_ignore_ascii_case(f));
    let criteria: [(&str, Criterion); 10] = [
        ("c1", || vec![c1_flat_soundness()]),
        ("c2", || vec![c2_tw_soundness()]),
        ("c3", || vec![c3_separators()]),
        ("c4", || vec![c4_bidecomposition()]),
        ("c5", c5_label_lengths),
        ("c6", || vec![c6_q_saving()]),
        ("c7", || vec![c7_coordinate_compression()]),
        ("c8", || vec![c8_encoder_scaling()]),
        ("c9", || vec![c9_decoder_time()]),
        ("c10", || vec![c10_persistence()]),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        if !selected(id) {
            continue;
        }
        for o in run() {
            println!(
                "{} {}: {}",
                if o.pass { "PASS" } else { "FAIL" },
                o.id,
                o.detail
            );
            failed += usize::from(!o.pass);
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

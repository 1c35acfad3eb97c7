use std::collections::HashSet;

use proptest::prelude::*;

use flatlabel::archive::FLAG_FALLBACK;
use flatlabel::codec::BitString;
use flatlabel::flat::{
    block_width, border_decomposition, border_sizes, choose_block_offset, flat_encode, split_graph,
    strip_decomposition, strip_embedding,
};
use flatlabel::gen::{gen_product_instance, GenSpec, ProductParams, Shape};
use flatlabel::graph::validate_embedding;
use flatlabel::product_label::{coord_diff, CoordDiff, CoordField};
use flatlabel::treewidth::validate_decomposition;
use flatlabel::{LabelArchive, SchemeKind};

fn instance(seed: u64, n: usize, w: usize, keep: f64) -> flatlabel::gen::Instance {
    let d = 2 * block_width(n) + 3;
    gen_product_instance(
        seed,
        &ProductParams {
            host_n: (2 * n).div_ceil(d + 1).max(w + 1),
            k: w,
            d,
            keep,
            n,
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn offset_and_split_properties(
        seed in any::<u64>(),
        n in 9usize..600,
        w in 1usize..4,
        keep in 0.3f64..1.0,
    ) {
        let inst = instance(seed, n, w, keep);
        let (g, e) = (&inst.graph, &inst.embedding);
        let d = block_width(n);
        let a = choose_block_offset(e, d);
        let sizes = border_sizes(e, d);
        // Averaging bound, checked against a direct count.
        let direct = e.map.iter().filter(|&&(_, i)| i % d == a || i % d == (a + 1) % d).count();
        prop_assert_eq!(sizes[a], direct);
        prop_assert!(direct * d <= 2 * n);
        prop_assert!(sizes.iter().all(|&s| s >= direct));

        let sp = split_graph(g, e, a, d);
        let mut seen = HashSet::new();
        for (x, y) in sp.g1.edges() {
            let (u, v) = (sp.border[x], sp.border[y]);
            let (iu, iv) = (e.map[u].1 % d, e.map[v].1 % d);
            prop_assert!(iu != iv && [iu, iv].iter().all(|&r| r == a || r == (a + 1) % d));
            prop_assert!(seen.insert((u.min(v), u.max(v))));
        }
        for (u, v) in sp.g2.edges() {
            prop_assert!(seen.insert((u, v)));
        }
        let all: HashSet<_> = g.edges().collect();
        prop_assert_eq!(seen, all);

        let td1 = border_decomposition(e, &inst.host_decomposition, &sp.border, a, d);
        let r = validate_decomposition(&sp.g1, &td1);
        prop_assert!(r.is_ok());
        prop_assert!(r.width <= 2 * inst.host_decomposition.width() + 1);

        let strip = strip_embedding(e, a, d);
        prop_assert!(validate_embedding(&sp.g2, &strip.embedding).is_ok());
        prop_assert_eq!(strip.embedding.path_len, d - 1);
        // Every interior edge stays within one copy.
        for (u, v) in sp.g2.edges() {
            let (cu, cv) = (strip.embedding.map[u].0, strip.embedding.map[v].0);
            prop_assert_eq!(strip.hosts[cu].0, strip.hosts[cv].0);
        }
        let td2 = strip_decomposition(&inst.host_decomposition, &strip, e.host.n());
        let r2 = validate_decomposition(&strip.embedding.host, &td2);
        prop_assert!(r2.is_ok());
        prop_assert!(r2.width <= inst.host_decomposition.width());
    }
}

/// Plain rule: the integer difference, clipped to `Far`.
fn plain_diff(i: u64, j: u64) -> CoordDiff {
    match i as i64 - j as i64 {
        -1 => CoordDiff::Minus1,
        0 => CoordDiff::Zero,
        1 => CoordDiff::Plus1,
        _ => CoordDiff::Far,
    }
}

#[test]
fn coord_diff_matches_plain_rule_exhaustively() {
    for d in 4..=64u64 {
        for i in 0..=d {
            for j in 0..=d {
                let expected = plain_diff(i, j);
                let tagged = coord_diff(CoordField::compress(i, d), CoordField::compress(j, d));
                assert_eq!(tagged, expected, "d={d} i={i} j={j}");
                assert_eq!(
                    coord_diff(CoordField::Plain(i), CoordField::Plain(j)),
                    expected
                );
            }
        }
    }
}

#[test]
fn endpoints_cost_no_value_bits() {
    for d in 4..=64u64 {
        for i in [0, d] {
            match CoordField::compress(i, d) {
                CoordField::Tagged { value, .. } => assert!(value.is_none()),
                CoordField::Plain(_) => panic!("compress returned a plain field"),
            }
        }
    }
}

fn archive_for(seed: u64, n: usize) -> (LabelArchive, flatlabel::Graph) {
    let inst = GenSpec {
        seed,
        n,
        w: 2,
        d: None,
        keep: 0.8,
        shape: Shape::ProductSubgraph,
    }
    .generate()
    .unwrap();
    let arch = flat_encode(&inst.graph, &inst.embedding, &inst.host_decomposition).unwrap();
    (arch, inst.graph)
}

#[test]
fn archive_round_trip_is_byte_identical() {
    for seed in 0..6 {
        let (arch, g) = archive_for(seed, 50 + 40 * seed as usize);
        let bytes = arch.to_bytes().unwrap();
        let back = LabelArchive::from_bytes(&bytes).unwrap();
        assert_eq!(back, arch);
        assert_eq!(back.to_bytes().unwrap(), bytes);
        let dec = back.decoder().unwrap();
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u != v {
                    assert_eq!(back.adjacent(&dec, u, v).unwrap(), g.has_edge(u, v));
                }
            }
        }
    }
}

#[test]
fn fallback_flag_only_on_flat_archives() {
    let (arch, _) = archive_for(3, 6);
    assert_eq!(arch.kind, SchemeKind::Flat);
    assert_eq!(arch.flags, FLAG_FALLBACK);
    let mut bytes = arch.to_bytes().unwrap();
    bytes[6] = SchemeKind::Product as u8;
    assert!(LabelArchive::from_bytes(&bytes).is_err());
}

/// Every single-bit flip of the header is either rejected or changes the
/// parsed archive; flips inside labels never panic the decoder.
#[test]
fn bit_flips_are_detected_or_harmless() {
    let (arch, g) = archive_for(11, 120);
    let bytes = arch.to_bytes().unwrap();
    let header = 4 + 2 + 2 + 4 * 4 + 4 * arch.meta.len();
    for bit in 0..header * 8 {
        let mut bad = bytes.clone();
        bad[bit / 8] ^= 0x80 >> (bit % 8);
        if let Ok(parsed) = LabelArchive::from_bytes(&bad) {
            assert_ne!(parsed, arch);
        }
    }
    let dec = arch.decoder().unwrap();
    for u in (0..g.n()).step_by(7) {
        let mut label: BitString = arch.labels[u].clone();
        for bit in 0..label.len() {
            label.flip(bit);
            for v in (0..g.n()).step_by(5) {
                // Only requirement: no panic, result or error.
                let _ = dec.adjacent(&label, &arch.labels[v]);
                let _ = dec.adjacent(&arch.labels[v], &label);
            }
            label.flip(bit);
        }
    }
}

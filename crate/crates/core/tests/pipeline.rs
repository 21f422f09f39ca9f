mod common;

use std::io::Cursor;

use proptest::prelude::*;
use ptcluster::consensus::{ClSemantics, Linkage, Method};
use ptcluster::eac::eac_baseline;
use ptcluster::ensemble::Ensemble;
use ptcluster::graph::SparseSimGraph;
use ptcluster::io::{parse_ensemble, read_ensemble, write_ensemble};
use ptcluster::metrics::nmi;
use ptcluster::pipeline::{ConsensusOptions, ParamSpec, Pipeline};
use ptcluster::pool::build_pool;
use ptcluster::trajectory::{read_pts, write_pts};

#[test]
fn planted_partition_is_recovered_by_every_method() {
    let mut r = common::rng(17);
    let e = common::planted_ensemble(&mut r, 300, 12, 4, 0.15);
    let truth: Vec<usize> = (0..300).map(|i| i % 4).collect();
    let p = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Auto).unwrap();
    let opts = ConsensusOptions::default();
    for method in [Method::PtaAl, Method::PtaCl, Method::Ptgp, Method::EacAl] {
        let result = p.consensus(method, 4, &opts).unwrap();
        let score = nmi(result.labels(), &truth).unwrap();
        assert!(score > 0.9, "{method}: {score}");
    }
}

#[test]
fn pipeline_eac_matches_standalone_baseline() {
    let mut r = common::rng(4);
    let e = common::random_ensemble(&mut r, 80, 6, 5);
    let p = Pipeline::prepare(e.clone(), ParamSpec::Fixed(3), ParamSpec::Fixed(2)).unwrap();
    for (method, linkage) in [(Method::EacAl, Linkage::Average), (Method::EacSl, Linkage::Single)] {
        let via_pipeline = p.consensus(method, 5, &ConsensusOptions::default()).unwrap();
        let direct = eac_baseline(&e, 5, linkage, ClSemantics::PaperSum).unwrap();
        assert_eq!(via_pipeline.labels(), direct.labels());
    }
    assert!(p.pts_if_computed().is_none());
}

#[test]
fn generated_pool_feeds_the_pipeline() {
    let data = common::three_blobs(240, 9);
    let pool = build_pool(&data, 20, 9).unwrap();
    let (e, _) = pool.draw_ensemble(10, 10).unwrap();
    let p = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Auto).unwrap();
    let result = p.consensus(Method::Ptgp, 3, &ConsensusOptions::default()).unwrap();
    assert_eq!(result.labels().len(), 240);
    assert!(nmi(result.labels(), data.truth().unwrap()).unwrap() > 0.5);
}

#[test]
fn ensemble_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.tsv");
    std::fs::write(&path, "a\tb\n7\t-1\n7\t3\n9\t3\n").unwrap();
    let e = read_ensemble(&path).unwrap();
    assert_eq!((e.n_objects(), e.n_clusterings()), (3, 2));
    let mut out = Vec::new();
    write_ensemble(&e, &mut out).unwrap();
    assert_eq!(String::from_utf8(out.clone()).unwrap(), "7,-1\n7,3\n9,3\n");
    assert_eq!(parse_ensemble(Cursor::new(out)).unwrap(), e);
}

#[test]
fn dumps_round_trip() {
    let mut r = common::rng(8);
    let e = common::random_ensemble(&mut r, 60, 5, 4);
    let p = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Fixed(4)).unwrap();

    let mut buf = Vec::new();
    write_pts(p.pts().unwrap(), p.k_elite(), &mut buf).unwrap();
    let (pts, header) = read_pts(Cursor::new(&buf)).unwrap();
    assert_eq!((header.n, header.steps, header.k_elite), (p.microclusters().len(), 4, p.k_elite()));
    assert_eq!(&pts, p.pts().unwrap());
    assert!(read_pts(Cursor::new(&buf[..buf.len() - 3])).is_err());

    let mut edges = Vec::new();
    p.keng().write_edge_list(&mut edges).unwrap();
    let back = SparseSimGraph::read_edge_list(Cursor::new(edges)).unwrap();
    assert_eq!(back.n_links(), p.keng().n_links());
    for edge in p.keng().edges() {
        assert_eq!(back.weight(edge.u, edge.v), Some(edge.weight));
    }
}

#[test]
fn cached_pts_gives_identical_consensus() {
    let mut r = common::rng(12);
    let e = common::planted_ensemble(&mut r, 150, 8, 3, 0.3);
    let fresh = Pipeline::prepare(e.clone(), ParamSpec::Auto, ParamSpec::Auto).unwrap();
    let opts = ConsensusOptions::default();
    let expected = fresh.consensus(Method::PtaAl, 3, &opts).unwrap();

    let reused = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Auto).unwrap();
    reused.set_pts(fresh.pts().unwrap().clone()).unwrap();
    assert_eq!(reused.consensus(Method::PtaAl, 3, &opts).unwrap().labels(), expected.labels());
}

fn small_ensemble() -> impl Strategy<Value = Ensemble> {
    (4usize..40, 1usize..6, any::<u64>()).prop_map(|(n, m, seed)| {
        let mut r = common::rng(seed);
        common::random_ensemble(&mut r, n, m, 5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn consensus_labels_cover_k_regions(e in small_ensemble(), k_raw in 1usize..6, t in 1usize..5) {
        let p = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Fixed(t)).unwrap();
        let n = p.microclusters().len();
        let k = 1 + (k_raw - 1) % n;
        let opts = ConsensusOptions::default();
        for method in [Method::PtaAl, Method::PtaCl, Method::PtaSl, Method::EacAl] {
            let result = p.consensus(method, k, &opts).unwrap();
            prop_assert_eq!(result.labels().len(), p.ensemble().n_objects());
            prop_assert_eq!(result.n_clusters(), k);
            // Objects of one microcluster always share a label.
            for (obj, &mc) in p.microclusters().assignment().iter().enumerate() {
                let first = p.microclusters().assignment().iter().position(|&x| x == mc).unwrap();
                prop_assert_eq!(result.labels()[obj], result.labels()[first]);
            }
        }
    }

    #[test]
    fn pts_is_a_bounded_symmetric_similarity(e in small_ensemble(), t in 1usize..6) {
        let p = Pipeline::prepare(e, ParamSpec::Auto, ParamSpec::Fixed(t)).unwrap();
        let pts = p.pts().unwrap();
        for i in 0..pts.n() {
            prop_assert_eq!(pts.get(i, i), 1.0);
            for j in 0..pts.n() {
                let v = pts.get(i, j);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert_eq!(v, pts.get(j, i));
            }
        }
    }
}

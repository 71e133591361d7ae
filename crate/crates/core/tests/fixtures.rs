//! Recorded working graph of a 16-cell Pegasus-style device.

use std::fs::File;
use std::io::BufReader;

use qals_core::{embed_naive, QuboProblem, Topology};

fn load() -> Topology {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/pegasus_p16_working.topo"
    );
    Topology::read_from(BufReader::new(File::open(path).unwrap())).unwrap()
}

#[test]
fn working_graph_has_5436_nodes() {
    let t = load();
    assert_eq!(t.node_count(), 5436);
    assert!(t.edge_count() > 30_000);
    assert!(t.nodes().iter().all(|&u| t.degree(u) <= 15));
}

#[test]
fn working_graph_round_trips() {
    let t = load();
    let mut buf = Vec::new();
    t.write_to(&mut buf).unwrap();
    assert_eq!(Topology::read_from(buf.as_slice()).unwrap(), t);
}

#[test]
fn large_problem_embeds_on_available_nodes() {
    let t = load();
    let q = QuboProblem::new(5436).unwrap();
    let emb = embed_naive(&q, &t).unwrap();
    assert_eq!(emb.weights.len(), 5436);
    assert!(embed_naive(&QuboProblem::new(5437).unwrap(), &t).is_err());
}

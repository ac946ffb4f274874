mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use evofuzz_core::fitness::score;
use evofuzz_core::pyast::build_dataflow;
use support::straightline::{brute_force, generate};

#[test]
fn score_matches_brute_force_on_generated_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = Vec::new();
    let mut nonzero_depth = 0;
    let mut with_repeats = 0;
    for i in 0..50 {
        let g = generate(&mut rng, 12);
        assert!(g.statements <= 12);
        let expected = brute_force(&g);
        let got = score(&g.source, &["torch"]).unwrap();
        let graph = build_dataflow(&g.source, &["torch"]).unwrap();
        assert_eq!(graph.nodes, g.nodes.len(), "program {i}:\n{}", g.source);
        assert_eq!(graph.edges, g.edges, "program {i}:\n{}", g.source);
        if (got.depth(), got.unique_calls(), got.repeats()) != expected {
            mismatches.push((i, g.source.clone(), expected, got));
        }
        nonzero_depth += usize::from(expected.0 > 0);
        with_repeats += usize::from(expected.2 > 0);
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
    assert!(nonzero_depth >= 10 && with_repeats >= 5, "generator too weak: {nonzero_depth} {with_repeats}");
}

#[test]
fn worked_fixtures() {
    let chain = score("a = torch.rand(3)\nb = torch.log(a)\nc = torch.matrix_exp(b)", &["torch"]).unwrap();
    assert_eq!((chain.depth(), chain.unique_calls(), chain.repeats(), chain.total()), (2, 3, 0, 5));
    let dup = score("x = torch.rand(3)\ny = torch.abs(x)\nz = torch.abs(x)", &["torch"]).unwrap();
    assert_eq!((dup.depth(), dup.unique_calls(), dup.repeats(), dup.total()), (1, 2, 1, 2));
    let spaced = score("x = torch.rand(3)\ny = torch.rand( 3 )\nz = torch.abs(x)", &["torch"]).unwrap();
    assert_eq!(spaced.repeats(), 1);
    assert_eq!(spaced.total(), 2);
}

mod common;

use std::collections::HashSet;

use camomap::celllib::CellLibrary;
use camomap::merge::MergedSpec;
use camomap::netlist::Wire;
use camomap::sboxes::Suite;
use camomap::synth::synthesize;
use camomap::techmap::{map_circuit_with, split_into_trees, tree_cover, DummyPolicy, Mapping, SelectInfo};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("f{i}")).collect()
}

fn configured(m: &Mapping, lib: &CellLibrary, code: usize) -> Vec<u16> {
    m.netlist
        .instances
        .iter()
        .zip(&m.manifest.certificates[code].config)
        .map(|(inst, &c)| lib.cell(lib.find(&inst.cell).unwrap()).plausible_bits(c))
        .collect()
}

#[test]
fn tree_cover_matches_brute_force() {
    let lib = CellLibrary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..150 {
        let ns = rng.gen_range(0..=2);
        let codes = if ns == 0 { 1 } else { rng.gen_range((1 << (ns - 1)) + 1..=1 << ns) };
        let net = common::random_tree(&mut rng, 4, ns, 8);
        let forest = split_into_trees(&net);
        let root_tree = forest.last().unwrap();
        assert_eq!(forest.len(), 1, "{}", net.emit());
        let sel = SelectInfo::new(&net, codes).unwrap();
        let dp = tree_cover(&net, root_tree, &lib, &sel).unwrap();
        let brute = common::brute_force_tree_cost(&net, &lib, codes).unwrap();
        assert_eq!(dp.cost, brute, "{}", net.emit());
    }
}

#[test]
fn random_netlists_map_and_realize_every_code() {
    let lib = CellLibrary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let nd = rng.gen_range(1..=5);
        let ns = rng.gen_range(0..=3);
        let codes = if ns == 0 { 1 } else { rng.gen_range((1 << (ns - 1)) + 1..=1 << ns) };
        let gates = rng.gen_range(1..=25);
        let net = common::random_netlist(&mut rng, nd, ns, gates);
        let m = map_circuit_with(&net, &lib, codes, names(codes), DummyPolicy::default()).unwrap();
        assert!(m.netlist.emit().lines().all(|l| !l.starts_with(".selects")));
        for code in 0..codes {
            let got = m.netlist.evaluate(&configured(&m, &lib, code));
            assert_eq!(got, net.table_for_select(code as u64), "code {code}\n{}", net.emit());
        }
    }
}

#[test]
fn dummy_policy_does_not_change_outputs() {
    let lib = CellLibrary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let nd = rng.gen_range(2..=4);
        let net = common::random_netlist(&mut rng, nd, 2, 15);
        let a = map_circuit_with(&net, &lib, 4, names(4), DummyPolicy::FirstActive).unwrap();
        let b = map_circuit_with(&net, &lib, 4, names(4), DummyPolicy::Input(nd - 1)).unwrap();
        assert_eq!(a.manifest.certificates, b.manifest.certificates);
        for code in 0..4 {
            assert_eq!(
                a.netlist.evaluate(&configured(&a, &lib, code)),
                b.netlist.evaluate(&configured(&b, &lib, code))
            );
        }
    }
}

#[test]
fn forest_partitions_merged_present4() {
    let lib = CellLibrary::default();
    let spec = MergedSpec::identity(Suite::ALL[1].functions()).unwrap();
    let (net, _) = synthesize(&spec, &lib);
    let forest = split_into_trees(&net);
    let mut seen = HashSet::new();
    for t in &forest {
        for &g in &t.gates {
            assert!(seen.insert(g), "gate {g} in two trees");
        }
        assert_eq!(*t.gates.last().unwrap(), t.root);
    }
    assert_eq!(seen.len(), net.gates().len());
    // leaf trees come first
    let position = |g: usize| forest.iter().position(|t| t.root == g);
    for (i, t) in forest.iter().enumerate() {
        for &w in &t.leaves {
            if let Wire::Gate(g) = w {
                assert!(position(g).unwrap() < i);
            }
        }
    }
}

#[test]
fn configured_functions_are_plausible() {
    let lib = CellLibrary::default();
    let spec = MergedSpec::identity(Suite::ALL[2].functions()).unwrap();
    let (net, _) = synthesize(&spec, &lib);
    let m = map_circuit_with(&net, &lib, 8, names(8), DummyPolicy::default()).unwrap();
    for cert in &m.manifest.certificates {
        for (inst, &c) in m.netlist.instances.iter().zip(&cert.config) {
            let cell = lib.cell(lib.find(&inst.cell).unwrap());
            assert!(c < cell.plausible().len());
        }
    }
    assert!(m.area <= camomap::synth::SynthReport::new(&net, &lib, Vec::new()).area);
}

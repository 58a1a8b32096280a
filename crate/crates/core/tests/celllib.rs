mod common;

use std::sync::OnceLock;

use camomap::celllib::{lift_to_pins, CellLibrary};
use proptest::prelude::*;

fn as_rows(f: u16, k: usize) -> Vec<bool> {
    (0..1usize << k).map(|r| (f >> r) & 1 == 1).collect()
}

#[test]
fn closures_match_search() {
    let lib = CellLibrary::default();
    for cell in lib.cells() {
        let mut want = common::closure_bits(cell.plausible_bits(0), cell.arity());
        let mut got: Vec<u16> = (0..cell.plausible().len()).map(|i| cell.plausible_bits(i)).collect();
        want.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, want, "{}", cell.name());
    }
    let nand2 = lib.cell(lib.find("NAND2").unwrap());
    assert_eq!(nand2.plausible().len(), 5);
}

#[test]
fn cell_matched_against_its_own_closure_is_itself() {
    let lib = CellLibrary::default();
    for (i, cell) in lib.cells().iter().enumerate() {
        let all: Vec<u16> = (0..cell.plausible().len()).map(|j| cell.plausible_bits(j)).collect();
        let m = lib.match_bits(cell.arity(), &all).unwrap();
        assert_eq!(m.cell, i, "{}", cell.name());
    }
}

/// Functions over `k` variables that some single cell can realize.
fn realizable(k: usize) -> &'static [u16] {
    static POOLS: OnceLock<Vec<Vec<u16>>> = OnceLock::new();
    &POOLS.get_or_init(|| {
        let lib = CellLibrary::default();
        (0..=4)
            .map(|k| {
                (0..1u32 << (1 << k))
                    .map(|f| f as u16)
                    .filter(|&f| lib.match_bits(k, &[f]).is_some())
                    .collect()
            })
            .collect()
    })[k]
}

fn check_match(k: usize, funcs: &[u16]) -> Result<(), TestCaseError> {
    let lib = CellLibrary::default();
    let got = lib.match_bits(k, funcs);
    let oracle = common::cheapest_cell(&lib, k, &funcs.iter().map(|&f| as_rows(f, k)).collect::<Vec<_>>());
    prop_assert_eq!(got.as_ref().map(|m| lib.cell(m.cell).area()), oracle);
    if let Some(m) = got {
        let cell = lib.cell(m.cell);
        prop_assert_eq!(m.pin_map.len(), k);
        for &f in funcs {
            prop_assert!(cell.plausible_index(lift_to_pins(f, &m.pin_map, cell.arity())).is_some());
        }
        prop_assert_eq!(lib.match_bits(k, funcs), Some(m));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn match_is_sound_and_cheapest(k in 0usize..=4, raw in prop::collection::vec(any::<u16>(), 1..4)) {
        let rows = 1usize << k;
        let mask = if rows == 16 { 0xFFFF } else { (1u16 << rows) - 1 };
        let funcs: Vec<u16> = raw.iter().map(|f| f & mask).collect();
        check_match(k, &funcs)?;
    }

    #[test]
    fn match_of_realizable_functions(k in 0usize..=4, picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let pool = realizable(k);
        let funcs: Vec<u16> = picks.iter().map(|i| pool[i.index(pool.len())]).collect();
        check_match(k, &funcs)?;
    }

    #[test]
    fn subsets_of_a_match_still_match(k in 1usize..=4, raw in prop::collection::vec(any::<u16>(), 2..4)) {
        let lib = CellLibrary::default();
        let rows = 1usize << k;
        let mask = if rows == 16 { 0xFFFF } else { (1u16 << rows) - 1 };
        let funcs: Vec<u16> = raw.iter().map(|f| f & mask).collect();
        if let Some(m) = lib.match_bits(k, &funcs) {
            let sub = lib.match_bits(k, &funcs[..1]).unwrap();
            prop_assert!(lib.cell(sub.cell).area() <= lib.cell(m.cell).area());
        }
    }
}

//! S-box text files and the bundled benchmark suites.
//!
//! One record per line: `NAME HEXSTRING NUM_IN NUM_OUT`. `#` starts a
//! comment; hex digits are case-insensitive.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::boolfunc::{BoolFuncError, TruthTable};

pub const PRESENT_SBOXES: &str = include_str!("../data/present.sbox");
pub const DES_SBOXES: &str = include_str!("../data/des.sbox");

#[derive(Debug, Error)]
pub enum SboxError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Table { line: usize, source: BoolFuncError },
    #[error("duplicate S-box name {0}")]
    Duplicate(String),
    #[error("unknown S-box {0}")]
    Unknown(String),
    #[error("unknown suite {0:?} (expected one of present2, present4, present8, present16, des2, des4, des8)")]
    UnknownSuite(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sbox {
    pub name: String,
    pub table: TruthTable,
}

pub fn parse_sboxes(text: &str) -> Result<Vec<Sbox>, SboxError> {
    let mut out: Vec<Sbox> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [name, hex, ni, no] = fields[..] else {
            return Err(SboxError::Syntax {
                line,
                msg: "expected NAME HEXSTRING NUM_IN NUM_OUT".into(),
            });
        };
        let parse_count = |s: &str| {
            s.parse::<usize>().map_err(|_| SboxError::Syntax {
                line,
                msg: format!("bad count {s:?}"),
            })
        };
        let table = TruthTable::from_hex(hex, parse_count(ni)?, parse_count(no)?)
            .map_err(|source| SboxError::Table { line, source })?;
        if out.iter().any(|s| s.name == name) {
            return Err(SboxError::Duplicate(name.to_string()));
        }
        out.push(Sbox {
            name: name.to_string(),
            table,
        });
    }
    Ok(out)
}

pub fn write_sboxes(sboxes: &[Sbox]) -> String {
    sboxes
        .iter()
        .map(|s| {
            format!(
                "{} {} {} {}\n",
                s.name,
                s.table.to_hex(),
                s.table.num_inputs(),
                s.table.num_outputs()
            )
        })
        .collect()
}

/// Picks S-boxes by name, in the order given.
pub fn select(sboxes: &[Sbox], names: &[String]) -> Result<Vec<Sbox>, SboxError> {
    names
        .iter()
        .map(|n| {
            sboxes
                .iter()
                .find(|s| &s.name == n)
                .cloned()
                .ok_or_else(|| SboxError::Unknown(n.clone()))
        })
        .collect()
}

/// The PRESENT cipher S-box.
pub fn present() -> Sbox {
    bundled_present().into_iter().next().unwrap()
}

/// PRESENT followed by the 16 Leander-Poschmann class representatives G0..G15.
pub fn bundled_present() -> Vec<Sbox> {
    parse_sboxes(PRESENT_SBOXES).expect("bundled data parses")
}

/// DES S1..S8.
pub fn bundled_des() -> Vec<Sbox> {
    parse_sboxes(DES_SBOXES).expect("bundled data parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Present,
    Des,
}

/// A benchmark: the first `count` S-boxes of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Suite {
    pub family: Family,
    pub count: usize,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite { family: Family::Present, count: 2 },
        Suite { family: Family::Present, count: 4 },
        Suite { family: Family::Present, count: 8 },
        Suite { family: Family::Present, count: 16 },
        Suite { family: Family::Des, count: 2 },
        Suite { family: Family::Des, count: 4 },
        Suite { family: Family::Des, count: 8 },
    ];

    /// The member S-boxes. PRESENT suites draw from G0..G15 in order.
    pub fn sboxes(&self) -> Vec<Sbox> {
        match self.family {
            Family::Present => bundled_present()
                .into_iter()
                .filter(|s| s.name.starts_with('G'))
                .take(self.count)
                .collect(),
            Family::Des => bundled_des().into_iter().take(self.count).collect(),
        }
    }

    pub fn functions(&self) -> Vec<TruthTable> {
        self.sboxes().into_iter().map(|s| s.table).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Present => "present",
            Family::Des => "des",
        };
        write!(f, "{fam}{}", self.count)
    }
}

impl FromStr for Suite {
    type Err = SboxError;

    fn from_str(s: &str) -> Result<Suite, SboxError> {
        Suite::ALL
            .iter()
            .find(|suite| suite.to_string() == s.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| SboxError::UnknownSuite(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn differential_uniformity(t: &TruthTable) -> usize {
        let n = t.num_rows();
        (1..n)
            .flat_map(|a| (0..16u64).map(move |b| (a, b)))
            .map(|(a, b)| (0..n).filter(|&x| t.eval(x) ^ t.eval(x ^ a) == b).count())
            .max()
            .unwrap()
    }

    fn linearity(t: &TruthTable) -> i32 {
        let n = t.num_rows();
        let mut best = 0;
        for a in 0..n {
            for b in 1..16u64 {
                let s: i32 = (0..n)
                    .map(|x| {
                        let parity = ((a & x).count_ones() + (b & t.eval(x)).count_ones()) % 2;
                        if parity == 0 { 1 } else { -1 }
                    })
                    .sum();
                best = best.max(s.abs());
            }
        }
        best
    }

    #[test]
    fn present_sbox_first_entry() {
        let p = present();
        assert_eq!(p.name, "PRESENT");
        assert_eq!(p.table.eval(0), 0xC);
    }

    #[test]
    fn leander_poschmann_boxes_are_optimal_bijections() {
        let all = bundled_present();
        assert_eq!(all.len(), 17);
        for s in &all {
            let mut seen: Vec<u64> = (0..16).map(|r| s.table.eval(r)).collect();
            seen.sort();
            assert_eq!(seen, (0..16).collect::<Vec<_>>(), "{}", s.name);
            assert_eq!(differential_uniformity(&s.table), 4, "{}", s.name);
            assert_eq!(linearity(&s.table), 8, "{}", s.name);
        }
    }

    #[test]
    fn des_boxes_satisfy_design_criteria() {
        let des = bundled_des();
        assert_eq!(des.len(), 8);
        // S1 row 0 of the published table
        let s1 = &des[0].table;
        let row0: Vec<u64> = (0..16).map(|c| s1.eval(c << 1)).collect();
        assert_eq!(row0, vec![14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7]);
        for s in &des {
            let t = &s.table;
            for row in 0..4usize {
                let mut vals: Vec<u64> = (0..16usize)
                    .map(|c| t.eval((row >> 1) << 5 | c << 1 | (row & 1)))
                    .collect();
                vals.sort();
                assert_eq!(vals, (0..16).collect::<Vec<_>>(), "{} row {row}", s.name);
            }
            for x in 0..64usize {
                for b in 0..6 {
                    assert!((t.eval(x) ^ t.eval(x ^ (1 << b))).count_ones() >= 2);
                }
                assert!((t.eval(x) ^ t.eval(x ^ 0b001100)).count_ones() >= 2);
                for ef in 0..4usize {
                    let mask = 0b110000 | (ef & 2) << 2 | (ef & 1) << 2;
                    assert_ne!(t.eval(x), t.eval(x ^ mask), "{}", s.name);
                }
            }
        }
    }

    #[test]
    fn bundled_records_checksum() {
        use sha2::{Digest, Sha256};
        let mut all = bundled_present();
        all.extend(bundled_des());
        let digest = Sha256::digest(write_sboxes(&all).as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(
            hex,
            "5e5d1561ebba8f80d0a04e66a19b29b293e9b70596c7aa32f978f83e176711e3"
        );
    }

    #[test]
    fn suites() {
        assert_eq!("present8".parse::<Suite>().unwrap().sboxes().len(), 8);
        assert_eq!("des4".parse::<Suite>().unwrap().sboxes()[3].name, "S4");
        assert_eq!("present2".parse::<Suite>().unwrap().sboxes()[1].name, "G1");
        assert!("des16".parse::<Suite>().is_err());
    }

    #[test]
    fn parse_errors_and_round_trip() {
        assert!(matches!(parse_sboxes("A 0123 2"), Err(SboxError::Syntax { line: 1, .. })));
        assert!(matches!(parse_sboxes("\nA 012 2 2"), Err(SboxError::Table { line: 2, .. })));
        assert!(matches!(parse_sboxes("A 0 0 1\nA 1 0 1"), Err(SboxError::Duplicate(_))));
        let des = bundled_des();
        assert_eq!(parse_sboxes(&write_sboxes(&des)).unwrap(), des);
    }
}

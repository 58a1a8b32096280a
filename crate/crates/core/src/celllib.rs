//! Camouflaged standard cells and containment matching.
//!
//! Every cell's plausible set is the cofactor closure of its nominal
//! function. A group of required functions can be placed on a cell when,
//! under some injective assignment of variables to pins, all of them are
//! members of that set.

use std::collections::HashMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use thiserror::Error;

use crate::boolfunc::{BoolFuncError, TruthTable};

pub const MAX_CELL_ARITY: usize = 4;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate cell name {0}")]
    DuplicateCell(String),
    #[error("cell {name}: arity {arity} outside 1..={MAX_CELL_ARITY}")]
    BadArity { name: String, arity: usize },
    #[error("cell {0}: area must be positive")]
    BadArea(String),
    #[error(transparent)]
    Function(#[from] BoolFuncError),
}

/// Area in hundredths of a gate equivalent (NAND2 = 100).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Area(pub u32);

impl Area {
    pub const ZERO: Area = Area(0);

    pub fn from_ge(ge: f64) -> Area {
        Area((ge * 100.0).round() as u32)
    }

    pub fn ge(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl Add for Area {
    type Output = Area;
    fn add(self, rhs: Area) -> Area {
        Area(self.0 + rhs.0)
    }
}

impl AddAssign for Area {
    fn add_assign(&mut self, rhs: Area) {
        self.0 += rhs.0;
    }
}

impl Sum for Area {
    fn sum<I: Iterator<Item = Area>>(iter: I) -> Area {
        iter.fold(Area::ZERO, Add::add)
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl FromStr for Area {
    type Err = String;

    /// Accepts decimal GE values with at most two fractional digits.
    fn from_str(s: &str) -> Result<Area, String> {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 2 || (int.is_empty() && frac.is_empty()) {
            return Err(format!("bad area {s:?}"));
        }
        let int: u32 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| format!("bad area {s:?}"))?
        };
        let frac_val: u32 = if frac.is_empty() {
            0
        } else {
            let v: u32 = frac.parse().map_err(|_| format!("bad area {s:?}"))?;
            if frac.len() == 1 {
                v * 10
            } else {
                v
            }
        };
        Ok(Area(int * 100 + frac_val))
    }
}

/// A look-alike cell: one layout, several doping configurations.
#[derive(Clone, Debug)]
pub struct CamoCell {
    name: String,
    arity: usize,
    nominal: TruthTable,
    area: Area,
    plausible: Vec<TruthTable>,
    plausible_bits: Vec<u16>,
    index_of: HashMap<u16, usize>,
}

impl CamoCell {
    pub fn new(name: &str, nominal: TruthTable, area: Area) -> Result<CamoCell, LibraryError> {
        let arity = nominal.num_inputs();
        if !(1..=MAX_CELL_ARITY).contains(&arity) || nominal.num_outputs() != 1 {
            return Err(LibraryError::BadArity {
                name: name.to_string(),
                arity,
            });
        }
        if area == Area::ZERO {
            return Err(LibraryError::BadArea(name.to_string()));
        }
        let plausible = nominal.cofactor_closure();
        let plausible_bits: Vec<u16> = plausible.iter().map(|t| t.as_u64() as u16).collect();
        let index_of = plausible_bits
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, i))
            .collect();
        Ok(CamoCell {
            name: name.to_string(),
            arity,
            nominal,
            area,
            plausible,
            plausible_bits,
            index_of,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nominal(&self) -> &TruthTable {
        &self.nominal
    }

    pub fn area(&self) -> Area {
        self.area
    }

    /// Plausible functions; index 0 is the nominal function.
    pub fn plausible(&self) -> &[TruthTable] {
        &self.plausible
    }

    /// Truth table of plausible function `index` packed into 16 bits.
    pub fn plausible_bits(&self, index: usize) -> u16 {
        self.plausible_bits[index]
    }

    /// Index of a packed pin-level function in the plausible list.
    pub fn plausible_index(&self, bits: u16) -> Option<usize> {
        self.index_of.get(&(bits & mask(self.arity))).copied()
    }
}

fn mask(arity: usize) -> u16 {
    if arity >= 4 {
        0xFFFF
    } else {
        ((1u32 << (1 << arity)) - 1) as u16
    }
}

/// Re-expresses a function over `k` variables as a function over the pins
/// of an `arity`-input cell, variable `i` wired to pin `pin_map[i]`.
pub fn lift_to_pins(func: u16, pin_map: &[usize], arity: usize) -> u16 {
    let mut out = 0u16;
    for row in 0..(1usize << arity) {
        let mut var_row = 0usize;
        for (i, &p) in pin_map.iter().enumerate() {
            var_row |= ((row >> p) & 1) << i;
        }
        if (func >> var_row) & 1 == 1 {
            out |= 1 << row;
        }
    }
    out
}

/// A successful containment match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMatch {
    /// Index into [`CellLibrary::cells`].
    pub cell: usize,
    /// Variable `i` connects to pin `pin_map[i]`.
    pub pin_map: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CellLibrary {
    cells: Vec<CamoCell>,
    /// Cell indices ordered by (area, arity, name).
    order: Vec<usize>,
    /// Injections of k variables into n pins, lexicographic, indexed [k][n].
    injections: Vec<Vec<Vec<Vec<usize>>>>,
}

const DEFAULT_CELLS: &[(&str, usize, &str, &str)] = &[
    ("INV", 1, "1", "0.67"),
    ("BUF", 1, "2", "0.67"),
    ("NAND2", 2, "7", "1.0"),
    ("NOR2", 2, "1", "1.0"),
    ("AND2", 2, "8", "1.33"),
    ("OR2", 2, "E", "1.33"),
    ("NAND3", 3, "7F", "1.33"),
    ("NOR3", 3, "01", "1.33"),
    ("AND3", 3, "80", "1.67"),
    ("OR3", 3, "FE", "1.67"),
    ("NAND4", 4, "7FFF", "1.67"),
    ("NOR4", 4, "0001", "1.67"),
    ("AND4", 4, "8000", "2.0"),
    ("OR4", 4, "FFFE", "2.0"),
];

impl CellLibrary {
    pub fn new(cells: Vec<CamoCell>) -> Result<CellLibrary, LibraryError> {
        let mut names = std::collections::HashSet::new();
        for c in &cells {
            if !names.insert(c.name.clone()) {
                return Err(LibraryError::DuplicateCell(c.name.clone()));
            }
        }
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&cells[a], &cells[b]);
            (ca.area, ca.arity, &ca.name).cmp(&(cb.area, cb.arity, &cb.name))
        });
        let injections = (0..=MAX_CELL_ARITY)
            .map(|k| (0..=MAX_CELL_ARITY).map(|n| injections(k, n)).collect())
            .collect();
        Ok(CellLibrary {
            cells,
            order,
            injections,
        })
    }

    /// The 14-cell library: INV, BUF and NAND/NOR/AND/OR at arities 2..=4.
    pub fn default_library() -> CellLibrary {
        let cells = DEFAULT_CELLS
            .iter()
            .map(|&(name, arity, hex, area)| {
                let nominal = hex_nominal(hex, arity).expect("built-in cell table");
                CamoCell::new(name, nominal, area.parse().unwrap()).unwrap()
            })
            .collect();
        CellLibrary::new(cells).unwrap()
    }

    /// Parses `NAME ARITY HEX_NOMINAL AREA_GE` lines. The hex nominal is
    /// written most-significant row first, e.g. `7` for NAND2.
    pub fn from_text(text: &str) -> Result<CellLibrary, LibraryError> {
        let mut cells = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| LibraryError::Syntax {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(syntax("expected NAME ARITY HEX_NOMINAL AREA_GE"));
            }
            let arity: usize = fields[1].parse().map_err(|_| syntax("bad arity"))?;
            if !(1..=MAX_CELL_ARITY).contains(&arity) {
                return Err(LibraryError::BadArity {
                    name: fields[0].to_string(),
                    arity,
                });
            }
            let nominal = hex_nominal(fields[2], arity).ok_or_else(|| syntax("bad nominal hex"))?;
            let area: Area = fields[3].parse().map_err(|e: String| syntax(&e))?;
            cells.push(CamoCell::new(fields[0], nominal, area)?);
        }
        CellLibrary::new(cells)
    }

    pub fn cells(&self) -> &[CamoCell] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &CamoCell {
        &self.cells[index]
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.name == name)
    }

    /// Minimum-area cell (ties by arity, then name) whose plausible set
    /// contains every required function under one pin map.
    pub fn match_cell(&self, required: &[TruthTable]) -> Option<CellMatch> {
        let k = required.first().map_or(0, |t| t.num_inputs());
        if k > MAX_CELL_ARITY
            || required
                .iter()
                .any(|t| t.num_inputs() != k || t.num_outputs() != 1)
        {
            return None;
        }
        let bits: Vec<u16> = required.iter().map(|t| t.as_u64() as u16).collect();
        self.match_bits(k, &bits)
    }

    /// [`CellLibrary::match_cell`] on packed `k`-variable functions.
    pub fn match_bits(&self, k: usize, required: &[u16]) -> Option<CellMatch> {
        if k > MAX_CELL_ARITY {
            return None;
        }
        for &ci in &self.order {
            let cell = &self.cells[ci];
            if cell.arity < k {
                continue;
            }
            for pin_map in &self.injections[k][cell.arity] {
                let fits = required.iter().all(|&f| {
                    cell.index_of
                        .contains_key(&lift_to_pins(f, pin_map, cell.arity))
                });
                if fits {
                    return Some(CellMatch {
                        cell: ci,
                        pin_map: pin_map.clone(),
                    });
                }
            }
        }
        None
    }
}

impl Default for CellLibrary {
    fn default() -> Self {
        CellLibrary::default_library()
    }
}

/// Nominal hex is written most-significant row first (as a number).
fn hex_nominal(hex: &str, arity: usize) -> Option<TruthTable> {
    let value = u64::from_str_radix(hex, 16).ok()?;
    let rows = 1u32 << arity;
    if rows < 64 && value >> rows != 0 {
        return None;
    }
    TruthTable::from_u64(arity, value).ok()
}

/// All injective maps from `k` variables to `n` pins, lexicographic.
fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                rec(k, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(k, n, &mut Vec::new(), &mut out);
    }
    out
}

//! Spin-flipper device configurations and their 4×4 scattering matrices.
//!
//! A spinless barrier scatters each spin sector independently. Placing a
//! spin-flipper element on the left and/or right of the barrier couples the
//! sectors. Three flipper kinds exist:
//!
//! - `F0` flips the spin of both reflected and transmitted waves,
//! - `F1` flips transmitted waves only,
//! - `F2` flips reflected waves only,
//!
//! and each side independently carries one of {none, F0, F1, F2}, giving 16
//! device configurations that fall into 10 distinct rows (mirror-related
//! configs share a row) and three structural cases.
//!
//! The matrix is assembled by a placement recipe over the uncoupled
//! template, not by propagating waves through a physical flipper model (a
//! wave reflecting off the barrier would physically traverse a left-side
//! flipper twice; the recipe deliberately ignores such double traversals
//! because the resulting templates are the testable ground truth).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::scattering::Amplitudes;

/// One spin-flipper element.
///
/// The behavioral contract (who gets flipped) is realized in
/// [`build_smatrix`]'s entry placement, not in a standalone operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SFKind {
    /// Flips both reflected and transmitted spins.
    F0,
    /// Flips transmitted spins only.
    F1,
    /// Flips reflected spins only.
    F2,
}

impl SFKind {
    fn digit(self) -> char {
        match self {
            SFKind::F0 => '0',
            SFKind::F1 => '1',
            SFKind::F2 => '2',
        }
    }

    fn from_digit(c: char) -> Option<Self> {
        match c {
            '0' => Some(SFKind::F0),
            '1' => Some(SFKind::F1),
            '2' => Some(SFKind::F2),
            _ => None,
        }
    }
}

/// A barrier with optional flippers on each side. 16 distinct values exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DeviceConfig {
    /// Flipper to the left of the barrier, if any.
    pub left: Option<SFKind>,
    /// Flipper to the right of the barrier, if any.
    pub right: Option<SFKind>,
}

impl DeviceConfig {
    pub fn new(left: Option<SFKind>, right: Option<SFKind>) -> Self {
        Self { left, right }
    }

    /// The bare barrier, no flippers.
    pub const BARE: Self = Self {
        left: None,
        right: None,
    };

    /// Whether the left-reflection entries sit in the opposite spin sector.
    pub(crate) fn shifts_r_left(&self) -> bool {
        matches!(self.left, Some(SFKind::F0) | Some(SFKind::F2))
    }

    /// Whether the right-reflection entries sit in the opposite spin sector.
    pub(crate) fn shifts_r_right(&self) -> bool {
        matches!(self.right, Some(SFKind::F0) | Some(SFKind::F2))
    }

    /// Whether the transmission entries sit in the opposite spin sector:
    /// true iff the count of F0-plus-F1 components is odd.
    pub(crate) fn shifts_t(&self) -> bool {
        let flips = |k: Option<SFKind>| matches!(k, Some(SFKind::F0) | Some(SFKind::F1)) as u32;
        (flips(self.left) + flips(self.right)) % 2 == 1
    }
}

impl fmt::Display for DeviceConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.left {
            write!(f, "L{}", k.digit())?;
        }
        write!(f, "M")?;
        if let Some(k) = self.right {
            write!(f, "R{}", k.digit())?;
        }
        Ok(())
    }
}

impl FromStr for DeviceConfig {
    type Err = Error;

    /// Parses the naming grammar `^(L[012])?M(R[012])?$`, case-insensitive.
    fn from_str(s: &str) -> Result<Self, Error> {
        let err = || Error::Grammar {
            input: s.to_string(),
        };
        let up = s.trim().to_ascii_uppercase();
        let mut chars = up.chars().peekable();
        let mut left = None;
        if chars.peek() == Some(&'L') {
            chars.next();
            let d = chars.next().and_then(SFKind::from_digit).ok_or_else(err)?;
            left = Some(d);
        }
        if chars.next() != Some('M') {
            return Err(err());
        }
        let mut right = None;
        if chars.peek() == Some(&'R') {
            chars.next();
            let d = chars.next().and_then(SFKind::from_digit).ok_or_else(err)?;
            right = Some(d);
        }
        if chars.next().is_some() {
            return Err(err());
        }
        Ok(DeviceConfig { left, right })
    }
}

/// One row of the configuration table: mirror-related configs sharing a case
/// label and a phase-mix flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Row {
    /// The configs in this row (1 or 2).
    pub configs: Vec<DeviceConfig>,
    /// Structural case label, 1..=3.
    pub case_label: u8,
    /// Whether this row exhibits phase mixing (symmetric and broken
    /// eigenvalue pairs coexisting) — true exactly for the case-3 rows.
    pub mixes: bool,
}

impl Table1Row {
    /// Canonical row label, e.g. "L0M or MR0".
    pub fn label(&self) -> String {
        self.configs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" or ")
    }
}

fn cfg(s: &str) -> DeviceConfig {
    s.parse().expect("row table entries are valid config names")
}

/// All 16 device configurations grouped into the 10 table rows, each
/// annotated with its case label and phase-mix flag as printed.
pub fn enumerate_configs() -> Vec<Table1Row> {
    let row = |names: &[&str], case_label: u8, mixes: bool| Table1Row {
        configs: names.iter().map(|s| cfg(s)).collect(),
        case_label,
        mixes,
    };
    vec![
        row(&["M"], 1, false),
        row(&["L0MR0"], 2, false),
        row(&["L0M", "MR0"], 3, true),
        row(&["L1MR1"], 2, false),
        row(&["L2MR2"], 2, false),
        row(&["L1M", "MR1"], 2, false),
        row(&["L2M", "MR2"], 3, true),
        row(&["L0MR1", "L1MR0"], 3, true),
        row(&["L0MR2", "L2MR0"], 2, false),
        row(&["L1MR2", "L2MR1"], 3, true),
    ]
}

/// The 16 configurations flattened in table-row order.
pub fn all_configs() -> Vec<DeviceConfig> {
    enumerate_configs()
        .into_iter()
        .flat_map(|r| r.configs)
        .collect()
}

/// Structural case label for a configuration.
///
/// Case 1 iff no flipper is present; otherwise case 3 iff exactly one of
/// {r_L shifted, r_R shifted} holds (the XOR rule), else case 2. The rule is
/// validated against all 16 table rows rather than hard-coding the table.
pub fn classify_case(cfg: DeviceConfig) -> u8 {
    if cfg.left.is_none() && cfg.right.is_none() {
        1
    } else if cfg.shifts_r_left() != cfg.shifts_r_right() {
        3
    } else {
        2
    }
}

/// 4×4 scattering matrix over the channel basis [L↑, R↑, L↓, R↓] (same
/// ordering for input and output vectors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix4 {
    entries: [[Complex64; 4]; 4],
}

impl SMatrix4 {
    pub const ZERO: Self = Self {
        entries: [[Complex64::new(0.0, 0.0); 4]; 4],
    };

    pub fn from_entries(entries: [[Complex64; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row][col] = v;
    }

    /// Largest count of nonzero entries in any row or column. The recipe
    /// never produces more than 2.
    pub fn max_nonzeros_per_line(&self) -> usize {
        let mut worst = 0;
        for i in 0..4 {
            let row = (0..4).filter(|&j| self.entries[i][j].norm() != 0.0).count();
            let col = (0..4).filter(|&j| self.entries[j][i].norm() != 0.0).count();
            worst = worst.max(row).max(col);
        }
        worst
    }

    /// Whether the up block {L↑, R↑} and down block {L↓, R↓} are exactly
    /// uncoupled (all cross-sector entries are exactly zero).
    pub fn spin_sectors_decoupled(&self) -> bool {
        let cross = |i: usize, j: usize| (i < 2) != (j < 2);
        (0..4).all(|i| {
            (0..4).all(|j| !cross(i, j) || self.entries[i][j] == Complex64::new(0.0, 0.0))
        })
    }

    /// Whether the graph on the 4 channels with an edge per nonzero entry is
    /// connected (no relabeling splits the matrix into two 2×2 blocks).
    pub fn coupling_graph_connected(&self) -> bool {
        let mut parent: [usize; 4] = [0, 1, 2, 3];
        fn find(parent: &mut [usize; 4], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..4 {
            for j in 0..4 {
                if self.entries[i][j].norm() != 0.0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, 0);
        (1..4).all(|i| find(&mut parent, i) == root)
    }
}

/// Assemble the 4×4 scattering matrix for a configuration from the barrier
/// amplitudes.
///
/// The uncoupled template places, per spin sector, r_R on the left-incidence
/// diagonal entries (0,0)/(2,2), r_L on the right-incidence entries
/// (1,1)/(3,3), and t on the four off-diagonal entries. That role assignment
/// — r_R multiplying the left-incident channel — is kept verbatim from the
/// source templates and documented rather than swapped to the more common
/// convention; swapping it would mirror the case-3 spectra (negating one
/// eigenvalue pair) and change nothing at the magnitude level.
///
/// Flippers move entries to the opposite spin sector (row index XOR 2):
/// transmission entries move iff the count of F0-plus-F1 components is odd;
/// r_R entries move iff the right component ∈ {F0, F2}; r_L entries move iff
/// the left component ∈ {F0, F2}.
pub fn build_smatrix(cfg: DeviceConfig, a: &Amplitudes) -> SMatrix4 {
    let mut s = SMatrix4::ZERO;
    let place = |s: &mut SMatrix4, value: Complex64, positions: &[(usize, usize)], shift: bool| {
        for &(i, j) in positions {
            let row = if shift { i ^ 2 } else { i };
            s.set(row, j, value);
        }
    };
    place(&mut s, a.r_right, &[(0, 0), (2, 2)], cfg.shifts_r_right());
    place(&mut s, a.r_left, &[(1, 1), (3, 3)], cfg.shifts_r_left());
    place(
        &mut s,
        a.t,
        &[(0, 1), (1, 0), (2, 3), (3, 2)],
        cfg.shifts_t(),
    );
    s
}

//! Recomputation of the printed case tables for `(17,4)` and `(23,5)`,
//! diffed cell by cell against the printed values.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exactnum::{int, isqrt, rat, Rational};
use crate::hzero::{bn_radicand, path_length, GaussPoint};
use crate::mukai::Surface;
use crate::plane::RatPoint;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Match,
    /// Printed and recomputed values differ.
    Mismatch,
    /// Recomputed column with no printed counterpart.
    Unlisted,
    /// Printed column that is not an admissible point.
    Inadmissible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub column: String,
    pub row: &'static str,
    pub computed: Option<String>,
    pub printed: Option<String>,
    pub status: CellStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub number: u8,
    pub title: &'static str,
    pub rows: Vec<&'static str>,
    pub columns: Vec<String>,
    pub cells: Vec<Cell>,
}

impl Table {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.status == CellStatus::Match)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.status != CellStatus::Match)
    }

    pub fn cell(&self, column: &str, row: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.column == column && c.row == row)
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = |col: &str, row: &str| {
            self.cell(col, row)
                .map(|c| {
                    let v = c.computed.clone().unwrap_or_else(|| "-".into());
                    match c.status {
                        CellStatus::Match => v,
                        _ => format!("{v}[{}]", c.printed.as_deref().unwrap_or("absent")),
                    }
                })
                .unwrap_or_default()
        };
        let widths: Vec<usize> = self
            .columns
            .iter()
            .map(|col| {
                self.rows
                    .iter()
                    .map(|row| shown(col, row).chars().count())
                    .chain([col.chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        writeln!(f, "Table {}: {}", self.number, self.title)?;
        write!(f, "{:>6}", "")?;
        for (col, w) in self.columns.iter().zip(&widths) {
            write!(f, " {col:>w$}")?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{row:>6}")?;
            for (col, w) in self.columns.iter().zip(&widths) {
                write!(f, " {:>w$}", shown(col, row))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One printed column of a `q` table: the point as printed and its cells.
struct Printed {
    q: (i64, i64),
    cells: &'static [&'static str],
}

const fn col(a: i64, b: i64, cells: &'static [&'static str]) -> Printed {
    Printed { q: (a, b), cells }
}

const T1: &[Printed] = &[
    col(11, 5, &["6", "131/6+6i", "78"]),
    col(23, 6, &["13", "133/4+7i", "71"]),
    col(57, 9, &["35", "135/2+10i", "49"]),
    col(79, 11, &["48", "271/3+12i", "36"]),
    col(89, 12, &["55", "407/4+13i", "29"]),
];

const T2: &[Printed] = &[
    col(12, 5, &["7", "131/6+6i", "77"]),
    col(22, 6, &["13", "133/4+7i", "71"]),
    col(34, 7, &["21", "134/3+8i", "63"]),
    col(46, 8, &["28", "673/12+9i", "56"]),
    col(68, 10, &["42", "947/12+11i", "42"]),
    col(102, 12, &["63", "679/6+14i", "21"]),
    col(136, 16, &["84", "--", "0"]),
];

const T3_X1: &[&str] = &[
    "19.1", "36.3", "53.4", "70.6", "87.7", "104.9", "122.05", "139.2", "156.3", "173.5", "190.6",
    "207.8", "224.9", "242.1", "259.2", "276.4", "293.5", "310.7", "327.8",
];
const T3_X2: &[&str] = &[
    "20.1", "37.2", "54.3", "71.4", "88.5", "105.6", "122.7", "139.8", "156.9", "174", "191.1",
    "208.2", "225.3", "242.4", "259.5", "276.6", "293.7", "310.8", "327.9",
];
const T3_X3: &[&str] = &[
    "21.05", "38.1", "55.1", "72.2", "89.2", "106.3", "123.3", "140.4", "157.4", "174.5", "191.5",
    "208.6", "225.6", "242.7", "259.7", "276.8", "293.8", "310.9", "327.9",
];

const T4: &[Printed] = &[
    col(21, 6, &["10", "186"]),
    col(37, 7, &["19", "177"]),
    col(55, 8, &["29", "167"]),
    col(71, 9, &["39", "157"]),
    col(89, 10, &["49", "147"]),
    col(105, 11, &["58", "138"]),
    col(123, 12, &["69", "127"]),
    col(157, 14, &["88", "108"]),
    col(191, 16, &["108", "88"]),
    col(225, 18, &["128", "69*"]),
];

const T5: &[Printed] = &[
    col(20, 6, &["9", "187"]),
    col(38, 7, &["19", "177"]),
    col(54, 8, &["28", "168"]),
    col(72, 9, &["39", "157"]),
    col(88, 10, &["48", "148"]),
    col(106, 11, &["58", "138"]),
    col(140, 13, &["78", "118"]),
    col(174, 15, &["98", "99*"]),
    col(208, 17, &["117", "79"]),
];

const T6: &[Printed] = &[
    col(37, 7, &["19", "177"]),
    col(71, 9, &["39", "157"]),
    col(105, 11, &["58", "138"]),
    col(191, 16, &["108", "88"]),
    col(225, 18, &["127", "69"]),
];

const T7: &[Printed] = &[
    col(20, 6, &["10", "187"]),
    col(54, 8, &["29", "168"]),
    col(88, 10, &["49", "148"]),
    col(174, 15, &["99*", "99*"]),
    col(208, 17, &["118", "79"]),
];

/// Recomputes every printed table for the surface: Tables 1–2 for
/// `(17,4)`, Tables 3–7 for `(23,5)`.
pub fn reproduce_tables(x: &Surface) -> Result<Vec<Table>> {
    match (x.p(), x.m()) {
        (17, 4) => Ok(vec![
            seventeen_table(x, 1, "points q with odd real part", true, T1),
            seventeen_table(x, 2, "points q with even real part", false, T2),
        ]),
        (23, 5) => Ok(vec![
            abscissa_table(x),
            step_table(x, 4, "q has odd real part, after q4", (4, 5), true, T4),
            step_table(x, 5, "q has even real part, after q4", (4, 5), false, T5),
            step_table(x, 6, "q has odd real part, after q3", (3, 5), true, T6),
            step_table(x, 7, "q has even real part, after q3", (3, 5), false, T7),
        ]),
        (p, m) => Err(Error::UnsupportedPair(p, m)),
    }
}

fn z1(x: &Surface) -> RatPoint {
    let m = x.m();
    RatPoint::new(int(m * m - x.p()), int(m))
}

fn z2(x: &Surface) -> RatPoint {
    let (p, m) = (x.p(), x.m());
    RatPoint::new(int(m * m * p - 2 * p * m), int(m * m))
}

/// Abscissa of the line through `a` and `b` at height `k`.
fn abscissa(a: &RatPoint, b: &RatPoint, k: i64) -> Rational {
    &a.x + (&b.x - &a.x) * (int(k) - &a.y) / (&b.y - &a.y)
}

fn gp(a: i64, b: i64) -> RatPoint {
    RatPoint::new(int(a), int(b))
}

fn floor_half(path: &[RatPoint], plus_one: bool, x: &Surface) -> i64 {
    let mut len = path_length(path, x);
    if plus_one {
        len = &len + &crate::exactnum::RadicalSum::from_rational(int(1));
    }
    let half = len.scale(&rat(1, 2));
    half.floor().to_i64().expect("table entry fits in i64")
}

/// Admissible `q` between `z1 z2` and `start z2`, at heights
/// `start.b < b ≤ top`, with the requested parity of the real part.
fn admissible(x: &Surface, start: (i64, i64), top: i64, odd: bool) -> Vec<(i64, i64)> {
    let (z1, z2) = (z1(x), z2(x));
    let s = gp(start.0, start.1);
    let mut out = Vec::new();
    for b in start.1 + 1..=top {
        let lo = abscissa(&z1, &z2, b).ceil().to_integer();
        let hi = abscissa(&s, &z2, b).floor().to_integer();
        let (lo, hi) = (lo.to_i64().unwrap(), hi.to_i64().unwrap());
        out.extend((lo..=hi).filter(|a| a.is_odd() == odd).map(|a| (a, b)));
    }
    out
}

fn label(q: (i64, i64)) -> String {
    format!("{}+{}i", q.0, q.1)
}

fn rat_label(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Diffs computed columns against printed ones keyed by `q`.
fn q_table(
    number: u8,
    title: &'static str,
    rows: Vec<&'static str>,
    computed: Vec<((i64, i64), Vec<String>)>,
    printed: &[Printed],
) -> Table {
    let mut keys: Vec<(i64, i64)> = computed.iter().map(|(q, _)| *q).collect();
    keys.extend(printed.iter().map(|c| c.q));
    keys.sort_by_key(|&(a, b)| (b, a));
    keys.dedup();
    let mut cells = Vec::new();
    for q in &keys {
        let ours = computed.iter().find(|(k, _)| k == q).map(|(_, v)| v);
        let theirs = printed.iter().find(|c| c.q == *q);
        for (i, row) in rows.iter().enumerate() {
            let c = ours.map(|v| v[i].clone());
            let t = theirs.map(|pc| pc.cells[i].to_string());
            let status = match (&c, &t) {
                (Some(c), Some(t)) if same_entry(c, t) => CellStatus::Match,
                (Some(_), Some(_)) => CellStatus::Mismatch,
                (Some(_), None) => CellStatus::Unlisted,
                _ => CellStatus::Inadmissible,
            };
            cells.push(Cell {
                column: label(*q),
                row,
                computed: c,
                printed: t,
                status,
            });
        }
    }
    Table {
        number,
        title,
        rows,
        columns: keys.into_iter().map(label).collect(),
        cells,
    }
}

/// Printed entries may carry a trailing `*` marking a special case.
fn same_entry(computed: &str, printed: &str) -> bool {
    computed == printed.trim_end_matches('*')
}

fn seventeen_table(
    x: &Surface,
    number: u8,
    title: &'static str,
    odd: bool,
    printed: &'static [Printed],
) -> Table {
    let (z1, z2) = (z1(x), z2(x));
    let top = z2.y.to_integer().to_i64().unwrap();
    let start = (1, 4);
    let computed = admissible(x, start, top, odd)
        .into_iter()
        .map(|(a, b)| {
            // The odd-displacement piece carries the parity `+1`: the
            // remainder for odd q, the first piece for even q.
            let e = GaussPoint::new(a - start.0, b - start.1);
            let l1: BigInt = (isqrt(&BigInt::from(bn_radicand(&e, x))) + i64::from(!odd)) / 2;
            let q = gp(a, b);
            let (qp, l2) = if b == top {
                ("--".to_string(), floor_half(&[q, z2.clone()], odd, x))
            } else {
                let qp = RatPoint::new(abscissa(&z1, &z2, b + 1), int(b + 1));
                let l2 = floor_half(&[q, qp.clone(), z2.clone()], odd, x);
                (format!("{}+{}i", rat_label(&qp.x), b + 1), l2)
            };
            ((a, b), vec![l1.to_string(), qp, l2.to_string()])
        })
        .collect();
    q_table(number, title, vec!["l1", "q'", "l2"], computed, printed)
}

fn step_table(
    x: &Surface,
    number: u8,
    title: &'static str,
    start: (i64, i64),
    odd: bool,
    printed: &'static [Printed],
) -> Table {
    let (z1, z2) = (z1(x), z2(x));
    let top = z2.y.to_integer().to_i64().unwrap() - 1;
    // After q4 the first piece is rounded up for odd q; after q3 the rest is.
    let after_q4 = start == (4, 5);
    let first_plus = after_q4 == odd;
    let computed = admissible(x, start, top, odd)
        .into_iter()
        .map(|(a, b)| {
            let q = gp(a, b);
            let s = gp(start.0, start.1);
            let first = floor_half(&[s, q.clone()], first_plus, x);
            let qp = RatPoint::new(abscissa(&z1, &z2, b + 1), int(b + 1));
            let second = floor_half(&[q, qp, z2.clone()], !odd, x);
            ((a, b), vec![first.to_string(), second.to_string()])
        })
        .collect();
    q_table(number, title, vec!["first", "rest"], computed, printed)
}

fn abscissa_table(x: &Surface) -> Table {
    let (z1, z2) = (z1(x), z2(x));
    let lines = [
        ("x'", z1.clone(), T3_X1),
        ("x''", gp(3, 5), T3_X2),
        ("x'''", gp(4, 5), T3_X3),
    ];
    let ks: Vec<i64> = (6..25).collect();
    let mut cells = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        for (row, from, printed) in &lines {
            let v = abscissa(from, &z2, k);
            let status = if decimal_matches(&v, printed[i]) {
                CellStatus::Match
            } else {
                CellStatus::Mismatch
            };
            cells.push(Cell {
                column: k.to_string(),
                row,
                computed: Some(exact_decimal(&v)),
                printed: Some(printed[i].to_string()),
                status,
            });
        }
    }
    Table {
        number: 3,
        title: "abscissae on z1z2, q3z2, q4z2 at height k",
        rows: lines.iter().map(|l| l.0).collect(),
        columns: ks.iter().map(|k| k.to_string()).collect(),
        cells,
    }
}

/// Exact decimal expansion when it terminates within six digits, else a
/// fraction.
pub fn exact_decimal(v: &Rational) -> String {
    for digits in 0..=6u32 {
        let scaled = v * int(10i64.pow(digits));
        if scaled.is_integer() {
            return format_scaled(&scaled.to_integer(), digits);
        }
    }
    rat_label(v)
}

fn format_scaled(n: &BigInt, digits: u32) -> String {
    if digits == 0 {
        return n.to_string();
    }
    let s = n.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (ip, fp) = s.split_at(s.len() - digits as usize);
    let sign = if n.is_negative() { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

/// Truncates `v` toward zero to `digits` decimals.
pub fn truncated_decimal(v: &Rational, digits: u32) -> String {
    let scale = int(10i64.pow(digits));
    let t = (v * &scale).trunc().to_integer();
    format_scaled(&t, digits)
}

/// A printed decimal matches when it is the exact value or its truncation
/// to the printed number of decimals.
pub fn decimal_matches(v: &Rational, printed: &str) -> bool {
    let digits = printed.split_once('.').map_or(0, |(_, f)| f.len() as u32);
    let Ok(parsed) = parse_decimal(printed) else {
        return false;
    };
    parsed == *v || truncated_decimal(v, digits) == format_scaled(
        &(parsed * int(10i64.pow(digits))).to_integer(),
        digits,
    )
}

fn parse_decimal(s: &str) -> std::result::Result<Rational, ()> {
    let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
    let digits: String = format!("{ip}{fp}");
    let n: BigInt = digits.parse().map_err(|_| ())?;
    let den = BigInt::from(10).pow(fp.len() as u32);
    if den.is_zero() {
        return Err(());
    }
    Ok(Rational::new(n, den))
}

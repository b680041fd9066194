//! Symmetric distance matrices over point ids, their validation, comparison
//! and the `DMX1`/CSV file formats.

use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{ExtReal, EXACT_TOL};

const MAGIC: &[u8; 4] = b"DMX1";

/// Matrices up to this size get an exhaustive triangle check.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 512;

/// Symmetric `n × n` matrix of extended reals with zero diagonal, stored as
/// the strict upper triangle in row-major order. `f64::INFINITY` means
/// "no chain".
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    upper: Vec<f64>,
}

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // rows 0..i contribute (n-1) + (n-2) + ... + (n-i) entries
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl DistanceMatrix {
    /// All off-diagonal entries infinite.
    pub fn infinite(n: usize) -> Self {
        Self {
            n,
            upper: vec![f64::INFINITY; n * n.saturating_sub(1) / 2],
        }
    }

    /// Builds from a symmetric distance function evaluated for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                check_entry(v, i, j)?;
                upper.push(v + 0.0);
            }
        }
        Ok(Self { n, upper })
    }

    /// Builds from full rows; rejects asymmetric input and nonzero diagonals.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
        }
        Self::from_fn(n, |i, j| rows[i][j]).and_then(|m| {
            for i in 0..n {
                for j in i + 1..n {
                    if rows[i][j] != rows[j][i] && !(rows[i][j].is_nan() && rows[j][i].is_nan()) {
                        return Err(Error::InvalidMatrix(format!("asymmetric entry ({i}, {j})")));
                    }
                }
            }
            Ok(m)
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[tri_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.upper[tri_index(self.n, j, i)],
        }
    }

    pub fn ext(&self, i: usize, j: usize) -> ExtReal {
        ExtReal::from_f64_unchecked(self.get(i, j))
    }

    /// Sets the symmetric pair `(i, j)`; `i != j`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal is fixed at zero");
        assert!(v >= 0.0, "distance must be nonnegative, got {v}");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.upper[tri_index(self.n, a, b)] = v + 0.0;
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    /// Largest finite entry (0 for matrices without finite off-diagonal entries).
    pub fn max_finite(&self) -> f64 {
        self.upper
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Restriction to the listed ids, in that order.
    pub fn restrict(&self, ids: &[usize]) -> Self {
        let k = ids.len();
        let mut upper = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for a in 0..k {
            for b in a + 1..k {
                upper.push(self.get(ids[a], ids[b]));
            }
        }
        Self { n: k, upper }
    }

    /// Writes the binary `DMX1` format: magic, `n` as u64 LE, then the strict
    /// upper triangle row-major as f64 LE.
    pub fn write_dmx<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.upper {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_dmx<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("missing DMX1 magic".into()));
        }
        let mut nb = [0u8; 8];
        r.read_exact(&mut nb)?;
        let n = usize::try_from(u64::from_le_bytes(nb))
            .map_err(|_| Error::Format("n too large".into()))?;
        let len = n
            .checked_mul(n.saturating_sub(1))
            .map(|x| x / 2)
            .ok_or_else(|| Error::Format("n too large".into()))?;
        let mut upper = Vec::with_capacity(len);
        let mut buf = [0u8; 8];
        for k in 0..len {
            r.read_exact(&mut buf)?;
            let v = f64::from_le_bytes(buf);
            if v.is_nan() || v < 0.0 {
                return Err(Error::Format(format!(
                    "bad entry {v} at triangle offset {k}"
                )));
            }
            upper.push(v);
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Format("trailing bytes after matrix".into()));
        }
        Ok(Self { n, upper })
    }

    /// Full symmetric CSV with `inf` for infinite entries.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n {
            let line: Vec<String> = (0..self.n)
                .map(|j| crate::ext::format_f64(self.get(i, j)))
                .collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| match t.trim() {
                    "inf" | "Infinity" => Ok(f64::INFINITY),
                    s => s
                        .parse::<f64>()
                        .map_err(|e| Error::Format(format!("`{s}`: {e}"))),
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }
}

fn check_entry(v: f64, i: usize, j: usize) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        Err(Error::InvalidMatrix(format!("entry ({i}, {j}) = {v}")))
    } else {
        Ok(())
    }
}

/// Outcome of [`validate_metric`]. Violations are content, not errors.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    /// Symmetry and zero diagonal hold by construction of the storage.
    pub symmetric: bool,
    pub zero_diagonal: bool,
    /// Distinct ids at distance zero (first few).
    pub zero_pairs: Vec<(usize, usize)>,
    /// Triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)` (first few).
    pub triangle_violations: Vec<(usize, usize, usize)>,
    pub triangle_violation_count: u64,
    pub exhaustive: bool,
    pub triples_checked: u64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric
            && self.zero_diagonal
            && self.zero_pairs.is_empty()
            && self.triangle_violation_count == 0
    }
}

const MAX_LISTED: usize = 64;

#[inline]
fn violates(m: &DistanceMatrix, i: usize, j: usize, k: usize) -> bool {
    let direct = m.get(i, k);
    let two_hop = m.get(i, j) + m.get(j, k);
    direct > two_hop + EXACT_TOL * two_hop.max(1.0)
}

/// Checks metric axioms. The triangle inequality is checked on all triples
/// for `n ≤ 512`, otherwise on `sample_budget` seeded random triples.
pub fn validate_metric(m: &DistanceMatrix, sample_budget: u64) -> ValidationReport {
    let n = m.len();
    let mut report = ValidationReport {
        n,
        symmetric: true,
        zero_diagonal: true,
        ..Default::default()
    };
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) == 0.0 && report.zero_pairs.len() < MAX_LISTED {
                report.zero_pairs.push((i, j));
            }
        }
    }
    let record = |i, j, k, report: &mut ValidationReport| {
        report.triangle_violation_count += 1;
        if report.triangle_violations.len() < MAX_LISTED {
            report.triangle_violations.push((i, j, k));
        }
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        report.exhaustive = true;
        for i in 0..n {
            for k in i + 1..n {
                for j in 0..n {
                    if j != i && j != k && violates(m, i, j, k) {
                        record(i, j, k, &mut report);
                    }
                }
            }
        }
        report.triples_checked = (n * n.saturating_sub(1) / 2 * n.saturating_sub(2)) as u64;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d157);
        for _ in 0..sample_budget {
            let (i, j, k) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            if violates(m, i, j, k) {
                record(i, j, k, &mut report);
            }
        }
        report.triples_checked = sample_budget;
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    LeqStrict,
    Leq,
    /// `m2 ≤ m1` with a strict pair; reported so callers need not swap.
    GeqStrict,
    Incomparable,
}

/// Result of [`compare_metrics`].
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub relation: Relation,
    /// A pair with `m1 < m2`, if any.
    pub strict_witness: Option<(usize, usize)>,
    /// A pair with `m1 > m2`, if any.
    pub reverse_witness: Option<(usize, usize)>,
}

/// Entrywise comparison of two metrics on the same ids (∞-aware). Entries
/// within the global exactness tolerance count as equal; `Leq` means they
/// all agree up to tolerance but not bit for bit.
pub fn compare_metrics(m1: &DistanceMatrix, m2: &DistanceMatrix) -> Result<Comparison> {
    if m1.len() != m2.len() {
        return Err(Error::DimensionMismatch {
            left: m1.len(),
            right: m2.len(),
        });
    }
    let n = m1.len();
    let (mut strict, mut reverse) = (None, None);
    let mut exact_equal = true;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (m1.ext(i, j), m2.ext(i, j));
            if a != b {
                exact_equal = false;
            }
            if a.approx_eq(b, EXACT_TOL) {
                continue;
            }
            if a < b {
                strict.get_or_insert((i, j));
            } else {
                reverse.get_or_insert((i, j));
            }
            if strict.is_some() && reverse.is_some() {
                break 'outer;
            }
        }
    }
    let relation = match (strict, reverse) {
        (None, None) if exact_equal => Relation::Equal,
        (None, None) => Relation::Leq,
        (Some(_), None) => Relation::LeqStrict,
        (None, Some(_)) => Relation::GeqStrict,
        (Some(_), Some(_)) => Relation::Incomparable,
    };
    Ok(Comparison {
        relation,
        strict_witness: strict,
        reverse_witness: reverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn triangle_indexing_covers_every_pair_once() {
        let n = 7;
        let mut seen = vec![false; n * (n - 1) / 2];
        for i in 0..n {
            for j in i + 1..n {
                let k = tri_index(n, i, j);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn one_point_matrix_is_valid() {
        let m = DistanceMatrix::infinite(1);
        assert!(validate_metric(&m, 0).is_valid());
    }

    #[test]
    fn inflated_entry_is_reported() {
        let mut m = line(&[0.0, 1.0, 2.0, 3.0]);
        m.set(0, 2, 2.5);
        let r = validate_metric(&m, 0);
        assert!(!r.is_valid());
        assert!(
            r.triangle_violations.contains(&(0, 1, 2)),
            "{:?}",
            r.triangle_violations
        );
    }

    #[test]
    fn zero_off_diagonal_is_reported() {
        let m = line(&[0.0, 0.0, 1.0]);
        assert_eq!(validate_metric(&m, 0).zero_pairs, vec![(0, 1)]);
    }

    #[test]
    fn sampled_check_above_limit() {
        let xs: Vec<f64> = (0..600).map(|i| i as f64).collect();
        let r = validate_metric(&line(&xs), 1000);
        assert!(!r.exhaustive);
        assert!(r.is_valid());
    }

    #[test]
    fn compare_relations() {
        let m = line(&[0.0, 1.0, 3.0]);
        assert_eq!(compare_metrics(&m, &m).unwrap().relation, Relation::Equal);

        let mut bigger = m.clone();
        bigger.set(0, 2, f64::INFINITY);
        let c = compare_metrics(&m, &bigger).unwrap();
        assert_eq!(c.relation, Relation::LeqStrict);
        assert_eq!(c.strict_witness, Some((0, 2)));

        let mut mixed = m.clone();
        mixed.set(0, 1, 0.5);
        mixed.set(1, 2, 2.5);
        let c = compare_metrics(&m, &mixed).unwrap();
        assert_eq!(c.relation, Relation::Incomparable);
        assert_eq!(c.strict_witness, Some((1, 2)));
        assert_eq!(c.reverse_witness, Some((0, 1)));

        assert!(compare_metrics(&m, &line(&[0.0])).is_err());
    }

    #[test]
    fn dmx_and_csv_round_trip() {
        let mut m = line(&[0.0, 0.1, 1.0 / 3.0]);
        m.set(0, 2, f64::INFINITY);
        let mut buf = Vec::new();
        m.write_dmx(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"DMX1");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 3);
        assert_eq!(buf.len(), 12 + 3 * 8);
        assert_eq!(DistanceMatrix::read_dmx(&buf[..]).unwrap(), m);

        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv.clone()).unwrap();
        assert!(text.lines().next().unwrap().ends_with(",inf"));
        assert_eq!(DistanceMatrix::read_csv(&csv[..]).unwrap(), m);
    }

    #[test]
    fn asymmetric_csv_rejected() {
        let text = "0,1\n2,0\n";
        assert!(DistanceMatrix::read_csv(text.as_bytes()).is_err());
    }
}

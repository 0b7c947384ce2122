//! Correctness matrices and paired accuracy sets.
//!
//! A correctness matrix records, for one evaluation distribution, whether each
//! model classified each example correctly. The on-disk format is CSV with a
//! header line `example_id,<model_1>,...,<model_h>` followed by one line per
//! example whose cells are `0` or `1`. Accuracies are computed from exact
//! integer popcounts; division by the example count is the only floating step.

use std::collections::BTreeSet;
use std::path::Path;

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Per-model correctness indicators for one distribution, stored as packed
/// bit rows (one row per model, one bit per example).
#[derive(Clone, Debug)]
pub struct CorrectnessMatrix {
    label: String,
    model_names: Vec<String>,
    n_examples: usize,
    rows: Vec<BitRow>,
}

impl CorrectnessMatrix {
    /// Builds a matrix from per-model indicator rows.
    pub fn from_rows(label: &str, model_names: Vec<String>, rows: Vec<BitRow>) -> Result<Self> {
        if model_names.is_empty() {
            return Err(Error::EmptyMatrix("models"));
        }
        if model_names.len() != rows.len() {
            return Err(Error::InvalidInput(format!(
                "{} model names but {} rows",
                model_names.len(),
                rows.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &model_names {
            if name.trim().is_empty() {
                return Err(Error::MalformedHeader("empty model name".into()));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateModel(name.clone()));
            }
        }
        let n_examples = rows[0].len();
        if n_examples == 0 {
            return Err(Error::EmptyMatrix("examples"));
        }
        if rows.iter().any(|r| r.len() != n_examples) {
            return Err(Error::InvalidInput("rows differ in length".into()));
        }
        Ok(CorrectnessMatrix {
            label: label.to_string(),
            model_names,
            n_examples,
            rows,
        })
    }

    /// Parses the CSV matrix format from a string. Blank lines are tolerated;
    /// cell whitespace is trimmed; CRLF line endings are accepted.
    pub fn parse(text: &str, label: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());

        let (_, header) = lines.next().ok_or(Error::EmptyMatrix("lines"))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.first() != Some(&"example_id") {
            return Err(Error::MalformedHeader(format!(
                "first header field must be \"example_id\", found {:?}",
                fields.first().copied().unwrap_or("")
            )));
        }
        let model_names: Vec<String> = fields[1..].iter().map(|s| s.to_string()).collect();
        if model_names.is_empty() {
            return Err(Error::EmptyMatrix("models"));
        }
        let h = model_names.len();

        let mut rows = vec![BitRow::from_bits(std::iter::empty()); h];
        let mut n_examples = 0usize;
        for (line_no, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != h + 1 {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: h + 1,
                    found: cells.len(),
                });
            }
            for (m, cell) in cells[1..].iter().enumerate() {
                let bit = match *cell {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(Error::CellParse {
                            line: line_no,
                            column: m + 2,
                            model: model_names[m].clone(),
                            value: other.to_string(),
                        })
                    }
                };
                rows[m].push(bit);
            }
            n_examples += 1;
        }
        if n_examples == 0 {
            return Err(Error::EmptyMatrix("examples"));
        }
        Self::from_rows(label, model_names, rows)
    }

    /// Loads a matrix from disk; the label defaults to the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::parse(&text, &label)
    }

    /// Renders the matrix in the CSV format accepted by [`Self::parse`].
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity((self.n_models() + 8) * (self.n_examples() + 1));
        out.push_str("example_id");
        for name in &self.model_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for e in 0..self.n_examples() {
            out.push_str(&format!("e{}", e + 1));
            for row in &self.rows {
                out.push(',');
                out.push(if row.get(e) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Replaces the distribution label.
    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn model_names(&self) -> &[String] {
        &self.model_names
    }

    pub fn n_models(&self) -> usize {
        self.model_names.len()
    }

    pub fn n_examples(&self) -> usize {
        self.n_examples
    }

    /// Indicator row for one model.
    pub fn row(&self, index: usize) -> Result<&BitRow> {
        self.rows.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.rows.len(),
        })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.model_names.iter().position(|n| n == name)
    }

    /// Fraction of examples the model got right.
    pub fn accuracy(&self, index: usize) -> Result<f64> {
        let row = self.row(index)?;
        Ok(row.count_ones() as f64 / self.n_examples as f64)
    }

    /// Accuracies for every model, in model order.
    pub fn accuracies(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.count_ones() as f64 / self.n_examples as f64)
            .collect()
    }

    /// New matrix containing exactly the named models, in the given order.
    pub fn subset(&self, names: &[String]) -> Result<Self> {
        let mut rows = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownModel(name.clone()))?;
            rows.push(self.rows[idx].clone());
        }
        Self::from_rows(&self.label, names.to_vec(), rows)
    }
}

/// Paired accuracies for models present in both distributions, sorted by
/// first-distribution accuracy (ties broken by model name).
#[derive(Clone, Debug, serde::Serialize)]
pub struct AccuracyPairSet {
    model_names: Vec<String>,
    mu_p: Vec<f64>,
    mu_q: Vec<f64>,
}

impl AccuracyPairSet {
    /// Validates and sorts the pair set.
    pub fn new(model_names: Vec<String>, mu_p: Vec<f64>, mu_q: Vec<f64>) -> Result<Self> {
        if model_names.is_empty() {
            return Err(Error::EmptyMatrix("models"));
        }
        if model_names.len() != mu_p.len() || mu_p.len() != mu_q.len() {
            return Err(Error::InvalidInput("pair set fields differ in length".into()));
        }
        for (&p, &q) in mu_p.iter().zip(&mu_q) {
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidInput("accuracies must lie in [0, 1]".into()));
            }
        }
        let mut order: Vec<usize> = (0..model_names.len()).collect();
        order.sort_by(|&a, &b| {
            mu_p[a]
                .total_cmp(&mu_p[b])
                .then_with(|| model_names[a].cmp(&model_names[b]))
        });
        Ok(AccuracyPairSet {
            model_names: order.iter().map(|&i| model_names[i].clone()).collect(),
            mu_p: order.iter().map(|&i| mu_p[i]).collect(),
            mu_q: order.iter().map(|&i| mu_q[i]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.model_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model_names.is_empty()
    }

    pub fn model_names(&self) -> &[String] {
        &self.model_names
    }

    /// First-distribution accuracies, nondecreasing.
    pub fn mu_p(&self) -> &[f64] {
        &self.mu_p
    }

    pub fn mu_q(&self) -> &[f64] {
        &self.mu_q
    }

    /// `(name, mu_p, mu_q)` for one model.
    pub fn get(&self, index: usize) -> Result<(&str, f64, f64)> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok((&self.model_names[index], self.mu_p[index], self.mu_q[index]))
    }

    /// Iterates `(name, mu_p, mu_q)` in nondecreasing `mu_p` order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64, f64)> + '_ {
        self.model_names
            .iter()
            .zip(self.mu_p.iter().zip(self.mu_q.iter()))
            .map(|(n, (&p, &q))| (n.as_str(), p, q))
    }
}

/// Result of aligning two matrices on their shared model names.
#[derive(Clone, Debug)]
pub struct Alignment {
    /// Accuracy pairs for the shared models.
    pub pairs: AccuracyPairSet,
    /// Models present only in the first matrix (sorted).
    pub only_in_p: Vec<String>,
    /// Models present only in the second matrix (sorted).
    pub only_in_q: Vec<String>,
}

/// Matches models by name across two matrices and pairs their accuracies.
/// Models missing from either side are reported in the result and logged.
pub fn align(mp: &CorrectnessMatrix, mq: &CorrectnessMatrix) -> Result<Alignment> {
    let q_names: BTreeSet<&str> = mq.model_names().iter().map(String::as_str).collect();
    let p_names: BTreeSet<&str> = mp.model_names().iter().map(String::as_str).collect();

    let common: Vec<String> = mp
        .model_names()
        .iter()
        .filter(|n| q_names.contains(n.as_str()))
        .cloned()
        .collect();
    if common.is_empty() {
        return Err(Error::EmptyModelIntersection);
    }
    let mut only_in_p: Vec<String> = p_names
        .iter()
        .filter(|n| !q_names.contains(**n))
        .map(|n| n.to_string())
        .collect();
    let mut only_in_q: Vec<String> = q_names
        .iter()
        .filter(|n| !p_names.contains(**n))
        .map(|n| n.to_string())
        .collect();
    only_in_p.sort();
    only_in_q.sort();
    if !only_in_p.is_empty() || !only_in_q.is_empty() {
        log::warn!(
            "dropping models without a counterpart: only in {}: {:?}; only in {}: {:?}",
            mp.label(),
            only_in_p,
            mq.label(),
            only_in_q
        );
    }

    let mut mu_p = Vec::with_capacity(common.len());
    let mut mu_q = Vec::with_capacity(common.len());
    for name in &common {
        let ip = mp.index_of(name).expect("name came from mp");
        let iq = mq.index_of(name).ok_or_else(|| Error::UnknownModel(name.clone()))?;
        mu_p.push(mp.accuracy(ip)?);
        mu_q.push(mq.accuracy(iq)?);
    }
    Ok(Alignment {
        pairs: AccuracyPairSet::new(common, mu_p, mu_q)?,
        only_in_p,
        only_in_q,
    })
}

/// Restricts both matrices to their shared models, in a common (sorted by
/// name) order, so that model indices agree between the two.
pub fn align_matrices(
    mp: &CorrectnessMatrix,
    mq: &CorrectnessMatrix,
) -> Result<(CorrectnessMatrix, CorrectnessMatrix)> {
    let q_names: BTreeSet<&str> = mq.model_names().iter().map(String::as_str).collect();
    let mut common: Vec<String> = mp
        .model_names()
        .iter()
        .filter(|n| q_names.contains(n.as_str()))
        .cloned()
        .collect();
    common.sort();
    if common.is_empty() {
        return Err(Error::EmptyModelIntersection);
    }
    if common.len() < mp.n_models() || common.len() < mq.n_models() {
        log::warn!(
            "restricting to {} shared models (of {} in {}, {} in {})",
            common.len(),
            mp.n_models(),
            mp.label(),
            mq.n_models(),
            mq.label()
        );
    }
    Ok((mp.subset(&common)?, mq.subset(&common)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "example_id,a,b\ne1,1,0\ne2,1,1\ne3,0,1\ne4,0,1\n";

    #[test]
    fn csv_round_trip_preserves_the_matrix() {
        let m = CorrectnessMatrix::parse(SMALL, "small").unwrap();
        assert_eq!(m.to_csv(), SMALL);
        let back = CorrectnessMatrix::parse(&m.to_csv(), "small").unwrap();
        assert_eq!(back.model_names(), m.model_names());
        assert_eq!(back.accuracies(), m.accuracies());
    }

    #[test]
    fn parses_and_counts() {
        let m = CorrectnessMatrix::parse(SMALL, "t").unwrap();
        assert_eq!(m.n_models(), 2);
        assert_eq!(m.n_examples(), 4);
        assert_eq!(m.accuracy(0).unwrap(), 0.5);
        assert_eq!(m.accuracy(1).unwrap(), 0.75);
    }

    #[test]
    fn tolerates_crlf_and_blank_lines() {
        let text = "example_id,a\r\ne1,1\r\n\r\ne2,0\r\n\n";
        let m = CorrectnessMatrix::parse(text, "t").unwrap();
        assert_eq!(m.n_examples(), 2);
        assert_eq!(m.accuracy(0).unwrap(), 0.5);
    }

    #[test]
    fn rejects_bad_cell_with_position() {
        let text = "example_id,a,b\ne1,1,2\n";
        match CorrectnessMatrix::parse(text, "t") {
            Err(Error::CellParse {
                line,
                column,
                model,
                value,
            }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 3);
                assert_eq!(model, "b");
                assert_eq!(value, "2");
            }
            other => panic!("expected CellParse, got {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_row() {
        let text = "example_id,a,b\ne1,1\n";
        assert!(matches!(
            CorrectnessMatrix::parse(text, "t"),
            Err(Error::RaggedRow {
                line: 2,
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn rejects_duplicate_model() {
        let text = "example_id,a,a\ne1,1,1\n";
        assert!(matches!(
            CorrectnessMatrix::parse(text, "t"),
            Err(Error::DuplicateModel(_))
        ));
    }

    #[test]
    fn rejects_missing_header() {
        let text = "id,a\ne1,1\n";
        assert!(matches!(
            CorrectnessMatrix::parse(text, "t"),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn align_drops_unmatched_models() {
        let p = CorrectnessMatrix::parse("example_id,a,b,c\ne1,1,1,0\ne2,0,1,1\n", "p").unwrap();
        let q = CorrectnessMatrix::parse("example_id,b,c,d\ne1,1,0,1\ne2,1,1,1\ne3,0,1,1\n", "q")
            .unwrap();
        let alignment = align(&p, &q).unwrap();
        assert_eq!(alignment.pairs.model_names(), ["c", "b"]);
        assert_eq!(alignment.only_in_p, ["a"]);
        assert_eq!(alignment.only_in_q, ["d"]);
        // Sorted by mu_p: c has 0.5, b has 1.0.
        assert_eq!(alignment.pairs.mu_p(), [0.5, 1.0]);
        assert_eq!(alignment.pairs.mu_q()[1], 2.0 / 3.0);
    }

    #[test]
    fn align_requires_overlap() {
        let p = CorrectnessMatrix::parse("example_id,a\ne1,1\n", "p").unwrap();
        let q = CorrectnessMatrix::parse("example_id,b\ne1,1\n", "q").unwrap();
        assert!(matches!(align(&p, &q), Err(Error::EmptyModelIntersection)));
    }

    #[test]
    fn load_reads_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("demo.csv");
        std::fs::write(&path, SMALL).unwrap();
        let m = CorrectnessMatrix::load(&path).unwrap();
        assert_eq!(m.label(), "demo");
        assert_eq!(m.n_examples(), 4);
    }

    #[test]
    fn load_missing_file_is_io_error() {
        assert!(matches!(
            CorrectnessMatrix::load(Path::new("/no/such/file.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn pair_set_sorts_by_mu_p_then_name() {
        let s = AccuracyPairSet::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![0.7, 0.3, 0.7],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        assert_eq!(s.model_names(), ["y", "x", "z"]);
        assert_eq!(s.mu_p(), [0.3, 0.7, 0.7]);
    }
}

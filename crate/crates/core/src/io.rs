//! CSV ingestion.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::DataMatrix;

/// Read a rectangular numeric CSV (rows = observations). A first row with
/// any non-numeric field is taken as a header. Row and column numbers in
/// errors are 1-based file positions.
pub fn ingest_csv(path: &Path) -> Result<DataMatrix> {
    let file = std::fs::File::open(path)?;
    ingest_csv_reader(file)
}

pub fn ingest_csv_reader<R: Read>(reader: R) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected: Option<usize> = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::CorruptFile(e.to_string()))?;
        let line = i + 1;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = rec
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            expected = Some(rec.len());
            continue;
        }
        let want = *expected.get_or_insert(rec.len());
        if rec.len() != want {
            return Err(Error::RaggedRows {
                row: line,
                found: rec.len(),
                expected: want,
            });
        }
        let mut row = Vec::with_capacity(want);
        for (j, v) in parsed.into_iter().enumerate() {
            row.push(v.ok_or(Error::NonNumericCell { row: line, col: j + 1 })?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    DataMatrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<DataMatrix> {
        ingest_csv_reader(s.as_bytes())
    }

    #[test]
    fn numeric_and_header() {
        let m = read("1,2\n3,4\n5,6\n").unwrap();
        assert_eq!((m.n(), m.p()), (3, 2));
        assert_eq!(m.get(2, 1), 6.0);
        let h = read("a,b\n1,2\n3,4.5\n").unwrap();
        assert_eq!((h.n(), h.p()), (2, 2));
        assert_eq!(h.get(1, 1), 4.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            read("1,2\n3,4,5\n6,7\n"),
            Err(Error::RaggedRows { row: 2, found: 3, expected: 2 })
        ));
        assert!(matches!(
            read("1,2\n3,x\n"),
            Err(Error::NonNumericCell { row: 2, col: 2 })
        ));
        assert!(matches!(read(""), Err(Error::EmptyFile)));
        assert!(matches!(read("a,b\n"), Err(Error::EmptyFile)));
        assert!(matches!(read("1,2\nnan,3\n"), Err(Error::NonNumericCell { .. })));
    }

    #[test]
    fn from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "x,y,z\n1,2,3\n4,5,6\n").unwrap();
        let m = ingest_csv(&path).unwrap();
        assert_eq!((m.n(), m.p()), (2, 3));
    }
}

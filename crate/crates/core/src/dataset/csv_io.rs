//! CSV exchange format.
//!
//! Layout: UTF-8, comma separated, first row is the header with exactly one
//! `grade` column (written last; accepted anywhere on read). An optional
//! second row tags each feature column with its category; it is recognized by
//! containing no numeric and no missing cells. Data cells are numeric; an
//! empty cell or the literal `NA` marks a missing value and drops the row.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{FeatureCategory, ScoreDataset};

/// A loaded dataset plus how many incomplete rows were dropped.
#[derive(Debug, Clone)]
pub struct CsvLoad {
    pub dataset: ScoreDataset,
    pub dropped_rows: usize,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

fn file_err(path: &Path, source: std::io::Error) -> Error {
    Error::File {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<CsvLoad> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| file_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut records = reader.records();
    let header = match records.next() {
        Some(record) => record.map_err(|e| Error::Schema(format!("bad header row: {e}")))?,
        None => return Err(Error::Schema("file has no header row".into())),
    };
    let columns: Vec<String> = header.iter().map(str::to_string).collect();
    let grade_cols: Vec<usize> = columns
        .iter()
        .enumerate()
        .filter(|(_, name)| name.as_str() == "grade")
        .map(|(i, _)| i)
        .collect();
    let grade_col = match grade_cols.as_slice() {
        [only] => *only,
        [] => return Err(Error::Schema("no `grade` column in header".into())),
        _ => return Err(Error::Schema("multiple `grade` columns in header".into())),
    };
    let feature_cols: Vec<usize> = (0..columns.len()).filter(|&i| i != grade_col).collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| columns[i].clone()).collect();

    let mut categories = vec![FeatureCategory::Unknown; feature_cols.len()];
    let mut pending: Option<csv::StringRecord> = None;
    if let Some(record) = records.next() {
        let record = record.map_err(|e| Error::Schema(format!("bad row 2: {e}")))?;
        let is_category_row = !record.is_empty()
            && record
                .iter()
                .all(|cell| !is_missing(cell) && cell.parse::<f64>().is_err());
        if is_category_row {
            if record.len() != columns.len() {
                return Err(Error::Schema(format!(
                    "category row has {} cells, header has {}",
                    record.len(),
                    columns.len()
                )));
            }
            for (slot, &col) in categories.iter_mut().zip(&feature_cols) {
                *slot = FeatureCategory::parse(&record[col]);
            }
        } else {
            pending = Some(record);
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut grades: Vec<f64> = Vec::new();
    let mut dropped_rows = 0usize;
    let mut line = 1usize; // header consumed
    let mut handle = |record: csv::StringRecord, line: usize| -> Result<()> {
        if record.len() != columns.len() {
            return Err(Error::Schema(format!(
                "row {line} has {} cells, header has {}",
                record.len(),
                columns.len()
            )));
        }
        if record.iter().any(is_missing) {
            dropped_rows += 1;
            return Ok(());
        }
        let parse = |col: usize| -> Result<f64> {
            record[col].parse::<f64>().map_err(|_| {
                Error::Schema(format!(
                    "non-numeric cell `{}` at row {line}, column `{}`",
                    &record[col], columns[col]
                ))
            })
        };
        let mut row = Vec::with_capacity(feature_cols.len());
        for &col in &feature_cols {
            row.push(parse(col)?);
        }
        grades.push(parse(grade_col)?);
        rows.push(row);
        Ok(())
    };
    if let Some(record) = pending {
        line += 1;
        handle(record, line)?;
    }
    for record in records {
        line += 1;
        let record = record.map_err(|e| Error::Schema(format!("bad row {line}: {e}")))?;
        handle(record, line)?;
    }

    if grades.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let features = Matrix::from_rows(&rows);
    let dataset = ScoreDataset::new(features, grades, feature_names, categories)?;
    Ok(CsvLoad {
        dataset,
        dropped_rows,
    })
}

/// Write the dataset back out: header, optional category row, then data rows
/// with the grade last. Floats use the shortest round-tripping form, so a
/// write/load cycle reproduces values exactly.
pub fn write_csv(ds: &ScoreDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut writer = csv::Writer::from_writer(file);

    let mut header: Vec<String> = ds.feature_names().to_vec();
    header.push("grade".into());
    writer
        .write_record(&header)
        .map_err(|e| Error::Schema(format!("csv write failed: {e}")))?;

    if ds
        .categories()
        .iter()
        .any(|&c| c != FeatureCategory::Unknown)
    {
        let mut tags: Vec<String> = ds
            .categories()
            .iter()
            .map(|c| c.as_str().to_string())
            .collect();
        tags.push("Grade".into());
        writer
            .write_record(&tags)
            .map_err(|e| Error::Schema(format!("csv write failed: {e}")))?;
    }

    for r in 0..ds.n_rows() {
        let mut record: Vec<String> = ds.features().row(r).iter().map(f64::to_string).collect();
        record.push(ds.grades()[r].to_string());
        writer
            .write_record(&record)
            .map_err(|e| Error::Schema(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| file_err(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Level;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_and_drops_missing_rows() {
        let f = write_tmp(
            "a,b,grade\n1,2,65\n3,,75\n4,5,85\n6,7,91\nNA,8,94\n9,10,99\n",
        );
        let load = load_csv(f.path()).unwrap();
        assert_eq!(load.dropped_rows, 2);
        assert_eq!(load.dataset.n_rows(), 4);
        assert_eq!(
            load.dataset.levels(),
            &[Level::L1, Level::L3, Level::L4, Level::L6]
        );
    }

    #[test]
    fn grade_column_levels() {
        let f = write_tmp("x,grade\n0,65\n0,75\n0,85\n0,91\n0,94\n0,99\n");
        let ds = load_csv(f.path()).unwrap().dataset;
        assert_eq!(
            ds.levels(),
            &[Level::L1, Level::L2, Level::L3, Level::L4, Level::L5, Level::L6]
        );
    }

    #[test]
    fn missing_grade_column_is_schema_error() {
        let f = write_tmp("a,b\n1,2\n");
        assert!(matches!(load_csv(f.path()), Err(Error::Schema(_))));
    }

    #[test]
    fn stray_text_cell_is_schema_error() {
        let f = write_tmp("a,grade\noops,65\n");
        assert!(matches!(load_csv(f.path()), Err(Error::Schema(_))));
    }

    #[test]
    fn all_rows_dropped_is_empty_dataset() {
        let f = write_tmp("a,grade\n,65\nNA,70\n");
        assert!(matches!(load_csv(f.path()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn missing_file_is_file_error() {
        assert!(matches!(
            load_csv("/nonexistent/nope.csv"),
            Err(Error::File { .. })
        ));
    }

    #[test]
    fn category_row_parses() {
        let f = write_tmp(
            "a,b,grade\nAudioVideo,Discussion,Grade\n1.5,2,65\n3,4,99\n",
        );
        let ds = load_csv(f.path()).unwrap().dataset;
        assert_eq!(
            ds.categories(),
            &[FeatureCategory::AudioVideo, FeatureCategory::Discussion]
        );
        assert_eq!(ds.n_rows(), 2);
        assert_eq!(ds.features().get(0, 0), 1.5);
    }

    #[test]
    fn round_trip_is_exact() {
        let f = write_tmp(
            "a,b,grade\nAudioVideo,ChapterTest,Grade\n1.25,33.125,65.5\n99.875,0.0625,97.75\n",
        );
        let original = load_csv(f.path()).unwrap().dataset;
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&original, out.path()).unwrap();
        let reloaded = load_csv(out.path()).unwrap().dataset;
        assert_eq!(original, reloaded);
    }
}

//! CSV survey data: a header row (`id` then model names in spec order) and
//! one integer stage per model in every following row.

use std::path::Path;

use adoption_index::{shift_stages, validate_dataset, AdoptionDataset, Error, RawRow};

use crate::config::{read_text, LoadedSpec};
use crate::error::{CliError, Result};

pub fn parse_data(text: &str, path: &Path, loaded: &LoadedSpec) -> Result<AdoptionDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_error = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut records = reader.records();
    let mut rows = Vec::new();
    if let Some(header) = records.next() {
        let header = header.map_err(|e| csv_error(path, e))?;
        let names: Vec<&str> = header.iter().skip(1).collect();
        let expected: Vec<&str> = loaded.spec.models().iter().map(|m| m.name()).collect();
        if names != expected {
            return Err(CliError::in_file(
                path,
                Error::SpecMismatch(format!(
                    "header columns {names:?} do not match spec models {expected:?}"
                )),
            ));
        }
        for record in records {
            let record = record.map_err(|e| csv_error(path, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let mut fields = record.iter();
            let id = fields.next().unwrap_or_default().to_string();
            let values = fields
                .enumerate()
                .map(|(j, cell)| {
                    cell.parse::<i64>().map_err(|_| {
                        let model = expected.get(j).copied().unwrap_or("?");
                        parse_error(
                            line,
                            format!("`{cell}` is not an integer stage for model `{model}`"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(RawRow::new(id, values));
        }
    }
    let rows = shift_stages(rows, &loaded.shift);
    validate_dataset(rows, &loaded.spec).map_err(|e| CliError::in_file(path, e))
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map_or(0, |p| p.line());
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: err.to_string(),
    }
}

pub fn load_data(path: &Path, loaded: &LoadedSpec) -> Result<AdoptionDataset> {
    parse_data(&read_text(path)?, path, loaded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_spec;

    fn two_models(shift: bool) -> LoadedSpec {
        let text = format!(
            "[[model]]\nname = \"TAM\"\nm = 5\nadd_no_adoption_stage = {shift}\n[[model]]\nname = \"CMM\"\nm = 5\n"
        );
        parse_spec(&text, Path::new("spec.toml")).unwrap()
    }

    fn parse(text: &str, loaded: &LoadedSpec) -> Result<AdoptionDataset> {
        parse_data(text, Path::new("data.csv"), loaded)
    }

    #[test]
    fn reads_rows_in_order() {
        let ds = parse("id,TAM,CMM\na, 1,2\nb,3 ,4\nc,5,0\n", &two_models(false)).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.row_ids(), ["a", "b", "c"]);
        assert_eq!(ds.row(1), [3, 4]);
    }

    #[test]
    fn empty_file_is_too_few_rows() {
        let err = parse("", &two_models(false)).unwrap_err();
        assert!(matches!(err.core(), Some(Error::TooFewRows { n: 0, .. })));
        assert_eq!(err.exit_code(), 2);
        let err = parse("id,TAM,CMM\n", &two_models(false)).unwrap_err();
        assert!(matches!(err.core(), Some(Error::TooFewRows { n: 0, .. })));
    }

    #[test]
    fn out_of_range_names_the_row() {
        let mut text = String::from("id,TAM,CMM\n");
        for i in 1..=6 {
            text.push_str(&format!("r{i},1,1\n"));
        }
        text.push_str("r7,6,1\n");
        let err = parse(&text, &two_models(false)).unwrap_err();
        assert!(matches!(
            err.core(),
            Some(Error::OutOfRangeStage { row: 7, .. })
        ));
        let message = err.to_string();
        assert!(
            message.contains("data.csv") && message.contains("row 7"),
            "{message}"
        );
    }

    #[test]
    fn non_integer_cell_reports_line() {
        let err = parse("id,TAM,CMM\na,1,2\nb,x,2\n", &two_models(false)).unwrap_err();
        match err {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("TAM"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_must_match_spec() {
        let err = parse("id,CMM,TAM\na,1,2\nb,1,2\nc,1,2\n", &two_models(false)).unwrap_err();
        assert!(matches!(err.core(), Some(Error::SpecMismatch(_))));
    }

    #[test]
    fn arity_and_shift() {
        let err = parse("id,TAM,CMM\na,1\n", &two_models(false)).unwrap_err();
        assert!(matches!(
            err.core(),
            Some(Error::RowArityMismatch { row: 1, .. })
        ));

        let ds = parse("id,TAM,CMM\na,0,2\nb,4,4\nc,1,1\n", &two_models(true)).unwrap();
        assert_eq!(ds.row(0), [1, 2]);
        let err = parse("id,TAM,CMM\na,5,2\nb,4,4\nc,1,1\n", &two_models(true)).unwrap_err();
        assert!(matches!(
            err.core(),
            Some(Error::OutOfRangeStage { value: 6, .. })
        ));
    }
}

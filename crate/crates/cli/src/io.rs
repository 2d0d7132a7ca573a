//! File formats: numeric CSV (one series per column, optional header row),
//! symbol files (one sequence per line), and token files.

use std::fmt;
use std::fs;
use std::path::Path;

use abba_core::{Alphabet, SymbolSequence};

/// An error carrying the process exit code it should terminate with.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    pub fn parse(path: &Path, line: u64, col: usize, message: impl fmt::Display) -> Self {
        CliError::new(2, format!("{}:{line}:{col}: {message}", path.display()))
    }
}

impl From<abba_core::Error> for CliError {
    fn from(err: abba_core::Error) -> Self {
        let code = match &err {
            abba_core::Error::AlphabetExhausted { .. } => 3,
            abba_core::Error::UnknownSymbol { .. } => 4,
            _ => 1,
        };
        CliError::new(code, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::new(1, err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// A rectangular numeric CSV, transposed into columns. An optional single
/// header row is detected and skipped.
pub struct SeriesFile {
    pub columns: Vec<Vec<f64>>,
}

pub fn read_series_csv(path: &Path) -> Result<SeriesFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::new(2, format!("{}: {e}", path.display())))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or(row_idx as u64 + 1);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if row_idx == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            // A first row with any non-numeric cell is a header.
            continue;
        }
        if columns.is_empty() {
            width = record.len();
            columns = vec![Vec::new(); width];
        } else if record.len() != width {
            return Err(CliError::parse(
                path,
                line,
                record.len().min(width) + 1,
                format!("expected {width} columns, found {}", record.len()),
            ));
        }
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                CliError::parse(path, line, col + 1, format!("cannot parse {field:?} as a number"))
            })?;
            if !value.is_finite() {
                return Err(CliError::parse(
                    path,
                    line,
                    col + 1,
                    format!("non-finite value {field:?}"),
                ));
            }
            columns[col].push(value);
        }
    }
    if columns.is_empty() || columns[0].is_empty() {
        return Err(CliError::new(
            2,
            format!("{}: no numeric rows", path.display()),
        ));
    }
    Ok(SeriesFile { columns })
}

/// Writes columns to CSV; shorter columns are padded with empty cells.
pub fn write_series_csv(path: &Path, columns: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for row in 0..rows {
        let record: Vec<String> = columns
            .iter()
            .map(|col| col.get(row).map(|v| v.to_string()).unwrap_or_default())
            .collect();
        writer
            .write_record(&record)
            .map_err(|e| CliError::new(1, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::new(1, e.to_string()))?;
    Ok(())
}

/// One sequence per line: single-character alphabets concatenate, any other
/// alphabet separates symbols with single spaces.
pub fn format_symbols(sequence: &SymbolSequence, alphabet: &Alphabet) -> String {
    if alphabet.is_single_char() {
        sequence.iter().collect()
    } else {
        sequence.symbols().join(" ")
    }
}

pub fn write_symbols(
    path: &Path,
    sequences: &[SymbolSequence],
    alphabet: &Alphabet,
) -> Result<()> {
    let mut out = String::new();
    for seq in sequences {
        out.push_str(&format_symbols(seq, alphabet));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn split_line(line: &str, single_char: bool) -> SymbolSequence {
    let symbols: Vec<String> = if single_char {
        line.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_string())
            .collect()
    } else {
        line.split_whitespace().map(str::to_string).collect()
    };
    SymbolSequence::new(symbols)
}

/// Reads sequences tokenized for `alphabet`.
pub fn read_symbols(path: &Path, alphabet: &Alphabet) -> Result<Vec<SymbolSequence>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    let single = alphabet.is_single_char();
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| split_line(l, single))
        .collect())
}

/// Reads sequences without a model: lines containing whitespace are split on
/// it, anything else is treated as concatenated single-character symbols.
pub fn read_symbols_heuristic(path: &Path) -> Result<Vec<SymbolSequence>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| split_line(l, !l.trim().contains(char::is_whitespace)))
        .collect())
}

/// One token per line, order preserved; duplicate or empty tokens are
/// rejected with their line numbers.
pub fn read_token_file(path: &Path) -> Result<Alphabet> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    Alphabet::from_tokens(text.lines().map(str::to_string)).map_err(CliError::from)
}

/// Per-column z-normalization with population deviation; a constant column
/// keeps its values centered only.
pub fn znorm(columns: &mut [Vec<f64>]) {
    for col in columns {
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sigma = if var == 0.0 { 1.0 } else { var.sqrt() };
        for v in col.iter_mut() {
            *v = (*v - mean) / sigma;
        }
    }
}

//! Line-oriented helpers shared by the text formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::{Error, Result};

/// A text file held in memory, iterated as numbered non-blank lines.
pub struct TextFile {
    pub path: PathBuf,
    content: String,
}

impl TextFile {
    pub fn read(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(TextFile {
            path: path.to_path_buf(),
            content,
        })
    }

    /// `(line number, trimmed text)` for every line that is not blank.
    pub fn lines(&self) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.content
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
    }

    pub fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::format(&self.path, Some(line), msg)
    }

    /// Parse one value per non-blank line.
    pub fn values<T: FromStr>(&self, what: &str) -> Result<Vec<(usize, T)>> {
        self.lines()
            .map(|(n, l)| parse_token(l, what).map(|v| (n, v)).map_err(|m| self.err(n, m)))
            .collect()
    }
}

pub fn parse_token<T: FromStr>(tok: &str, what: &str) -> std::result::Result<T, String> {
    tok.trim()
        .parse()
        .map_err(|_| format!("cannot parse {what} from `{}`", tok.trim()))
}

/// Split on commas and/or whitespace.
pub fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

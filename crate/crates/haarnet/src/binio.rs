//! Little-endian primitives for the binary containers.

use std::path::{Path, PathBuf};

use haarnet_core::dense::Matrix;
use haarnet_core::sparse::CscMatrix;

use crate::{Error, Result};

#[derive(Default)]
pub struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }

    pub fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn usizes(&mut self, v: &[usize]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.usize(x));
    }

    pub fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.f64(x));
    }

    pub fn matrix(&mut self, m: &Matrix) {
        self.usize(m.rows());
        self.usize(m.cols());
        m.as_slice().iter().for_each(|&x| self.f64(x));
    }

    pub fn csc(&mut self, m: &CscMatrix) {
        self.usize(m.rows());
        self.usize(m.cols());
        self.usizes(m.col_ptr());
        self.usizes(m.row_indices());
        self.f64s(m.values());
    }

    /// A tagged, length-prefixed section.
    pub fn section(&mut self, tag: &[u8; 4], body: Writer) {
        self.buf.extend_from_slice(tag);
        self.usize(body.buf.len());
        self.buf.extend_from_slice(&body.buf);
    }
}

pub struct Reader<'b> {
    buf: &'b [u8],
    pos: usize,
    path: PathBuf,
}

impl<'b> Reader<'b> {
    pub fn new(buf: &'b [u8], path: &Path) -> Self {
        Reader {
            buf,
            pos: 0,
            path: path.to_path_buf(),
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::format(&self.path, None, format!("byte {}: {}", self.pos, msg.into()))
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.buf.len()
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'b [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated: wanted {n} more bytes")));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.err(format!("count {v} does not fit in memory")))
    }

    /// A count of items that each take at least `item_bytes`, checked
    /// against the remaining input before anything is allocated.
    pub fn count(&mut self, item_bytes: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(item_bytes.max(1)) > self.buf.len() - self.pos {
            return Err(self.err(format!("count {n} exceeds the remaining input")));
        }
        Ok(n)
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(self.err(format!("invalid boolean {v}"))),
        }
    }

    pub fn str(&mut self) -> Result<String> {
        let n = self.count(1)?;
        let b = self.bytes(n)?;
        String::from_utf8(b.to_vec()).map_err(|_| self.err("invalid UTF-8"))
    }

    pub fn usizes(&mut self) -> Result<Vec<usize>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.usize()).collect()
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn matrix(&mut self) -> Result<Matrix> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let len = rows.checked_mul(cols).ok_or_else(|| self.err("matrix size overflows"))?;
        if len.saturating_mul(8) > self.buf.len() - self.pos {
            return Err(self.err(format!("{rows}x{cols} matrix exceeds the remaining input")));
        }
        let data = (0..len).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        Matrix::from_vec(rows, cols, data).map_err(|e| self.err(e.to_string()))
    }

    pub fn csc(&mut self) -> Result<CscMatrix> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let col_ptr = self.usizes()?;
        let row_idx = self.usizes()?;
        let values = self.f64s()?;
        CscMatrix::from_raw(rows, cols, col_ptr, row_idx, values).map_err(|e| self.err(e.to_string()))
    }

    pub fn expect_tag(&mut self, tag: &[u8; 4]) -> Result<Reader<'b>> {
        let found = self.bytes(4)?;
        if found != tag {
            return Err(self.err(format!(
                "expected section {}, found {}",
                String::from_utf8_lossy(tag),
                String::from_utf8_lossy(found)
            )));
        }
        let len = self.usize()?;
        let body = self.bytes(len)?;
        Ok(Reader::new(body, &self.path))
    }

    pub fn finish(&self) -> Result<()> {
        if !self.is_empty() {
            return Err(self.err(format!("{} unexpected trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

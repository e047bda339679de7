//! Minimal RFC 4180 reader and writer.
//!
//! The reader accepts LF or CRLF record terminators, quoted fields with
//! embedded delimiters, doubled quotes and line breaks, and skips blank
//! lines. It reports the record number (header = row 1) and the source line
//! where each record starts, plus the byte offset just past it so callers
//! can trim a torn tail off an append-only file.
//!
//! The writer quotes a field only when it contains a comma, a quote, CR or
//! LF, and terminates every record with CRLF.

use std::io::{self, Write};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    /// 1-based record number, blank lines excluded.
    pub row: usize,
    /// 1-based line on which the record starts.
    pub line: usize,
    pub fields: Vec<String>,
    /// Byte offset just past the record terminator (or end of input).
    pub end: usize,
    /// True when the record ran into end of input without a line break.
    pub unterminated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("row {row} (line {line}): unterminated quoted field")]
    UnterminatedQuote { row: usize, line: usize },
    #[error("row {row} (line {line}): unexpected character after closing quote")]
    TextAfterQuote { row: usize, line: usize },
}

impl SyntaxError {
    pub fn row(&self) -> usize {
        match self {
            SyntaxError::UnterminatedQuote { row, .. }
            | SyntaxError::TextAfterQuote { row, .. } => *row,
        }
    }
}

pub struct Reader<'a> {
    input: &'a [u8],
    pos: usize,
    row: usize,
    line: usize,
    done: bool,
}

impl<'a> Reader<'a> {
    pub fn new(input: &'a str) -> Self {
        Reader {
            input: input.as_bytes(),
            pos: 0,
            row: 0,
            line: 1,
            done: false,
        }
    }

    /// Byte offset of the next unread input.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Consumes one line terminator at `pos`, if present.
    fn eat_newline(&mut self) -> bool {
        match self.input.get(self.pos) {
            Some(b'\n') => {
                self.pos += 1;
                self.line += 1;
                true
            }
            Some(b'\r') if self.input.get(self.pos + 1) == Some(&b'\n') => {
                self.pos += 2;
                self.line += 1;
                true
            }
            _ => false,
        }
    }

    /// Skips to just past the next raw line break. Used after a syntax error.
    fn resync(&mut self) {
        while self.pos < self.input.len() {
            if self.eat_newline() {
                return;
            }
            self.pos += 1;
        }
    }

    fn read_record(&mut self) -> Option<Result<Record, SyntaxError>> {
        loop {
            if self.pos >= self.input.len() {
                return None;
            }
            // Blank line.
            if self.eat_newline() {
                continue;
            }
            break;
        }
        self.row += 1;
        let row = self.row;
        let start_line = self.line;
        let mut fields = Vec::new();
        let mut field: Vec<u8> = Vec::new();
        loop {
            if self.input.get(self.pos) == Some(&b'"') {
                self.pos += 1;
                loop {
                    match self.input.get(self.pos) {
                        None => {
                            self.done = true;
                            return Some(Err(SyntaxError::UnterminatedQuote {
                                row,
                                line: start_line,
                            }));
                        }
                        Some(b'"') if self.input.get(self.pos + 1) == Some(&b'"') => {
                            field.push(b'"');
                            self.pos += 2;
                        }
                        Some(b'"') => {
                            self.pos += 1;
                            break;
                        }
                        Some(&c) => {
                            if c == b'\n' {
                                self.line += 1;
                            }
                            field.push(c);
                            self.pos += 1;
                        }
                    }
                }
                match self.input.get(self.pos) {
                    None | Some(b',') | Some(b'\n') => {}
                    Some(b'\r') if self.input.get(self.pos + 1) == Some(&b'\n') => {}
                    Some(_) => {
                        self.resync();
                        return Some(Err(SyntaxError::TextAfterQuote {
                            row,
                            line: start_line,
                        }));
                    }
                }
            } else {
                while let Some(&c) = self.input.get(self.pos) {
                    if c == b',' || c == b'\n' {
                        break;
                    }
                    if c == b'\r' && self.input.get(self.pos + 1) == Some(&b'\n') {
                        break;
                    }
                    field.push(c);
                    self.pos += 1;
                }
            }
            // Delimiters are ASCII, so every split point is a char boundary.
            fields.push(String::from_utf8(std::mem::take(&mut field)).expect("utf-8 input"));
            if self.input.get(self.pos) == Some(&b',') {
                self.pos += 1;
                continue;
            }
            let terminated = self.eat_newline();
            return Some(Ok(Record {
                row,
                line: start_line,
                fields,
                end: self.pos,
                unterminated: !terminated,
            }));
        }
    }
}

impl Iterator for Reader<'_> {
    type Item = Result<Record, SyntaxError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.read_record()
    }
}

fn needs_quotes(field: &str) -> bool {
    field
        .bytes()
        .any(|b| matches!(b, b',' | b'"' | b'\r' | b'\n'))
}

/// Writes one record followed by CRLF.
pub fn write_record<W, I, S>(out: &mut W, fields: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = Vec::new();
    for (i, field) in fields.into_iter().enumerate() {
        if i > 0 {
            line.push(b',');
        }
        let field = field.as_ref();
        if needs_quotes(field) {
            line.push(b'"');
            for b in field.bytes() {
                if b == b'"' {
                    line.push(b'"');
                }
                line.push(b);
            }
            line.push(b'"');
        } else {
            line.extend_from_slice(field.as_bytes());
        }
    }
    line.extend_from_slice(b"\r\n");
    out.write_all(&line)
}

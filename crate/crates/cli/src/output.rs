use crate::Format;
use serde::Serialize;
use sqap::schema::Record;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: "UsageError",
            message: message.into(),
        }
    }
}

pub struct Out {
    w: Box<dyn Write>,
    pub format: Format,
    csv_header: bool,
}

impl Out {
    pub fn open(path: Option<&Path>, format: Format) -> io::Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Out {
            w,
            format,
            csv_header: false,
        })
    }

    pub fn record<T: Serialize>(&mut self, name: &str, body: T) -> Result<(), CliError> {
        let line = Record::new(name, body).to_json_line();
        writeln!(self.w, "{line}").map_err(io_err)
    }

    /// Emit the header once, then the row.
    pub fn csv(&mut self, header: &str, row: &str) -> Result<(), CliError> {
        if !self.csv_header {
            writeln!(self.w, "{header}").map_err(io_err)?;
            self.csv_header = true;
        }
        writeln!(self.w, "{row}").map_err(io_err)
    }

    pub fn error(&mut self, e: &CliError) -> io::Result<()> {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: &'a str,
        }
        let line = Record::new(
            "error",
            Body {
                kind: e.kind,
                message: &e.message,
            },
        )
        .to_json_line();
        writeln!(self.w, "{line}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError {
        kind: "IoError",
        message: e.to_string(),
    }
}

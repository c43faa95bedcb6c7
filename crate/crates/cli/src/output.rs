use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Row sink that writes either CSV with a header or one JSON object per line.
pub enum RowWriter {
    Csv(Box<csv::Writer<Box<dyn Write>>>),
    Jsonl(Box<dyn Write>),
}

impl RowWriter {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        match format {
            Format::Csv => RowWriter::Csv(Box::new(csv::Writer::from_writer(out))),
            Format::Jsonl => RowWriter::Jsonl(out),
        }
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> anyhow::Result<()> {
        match self {
            RowWriter::Csv(w) => w.serialize(row)?,
            RowWriter::Jsonl(w) => {
                serde_json::to_writer(&mut *w, row)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match self {
            RowWriter::Csv(mut w) => w.flush()?,
            RowWriter::Jsonl(mut w) => w.flush()?,
        }
        Ok(())
    }
}

/// CA indices given as `8,9,13` or an inclusive range `8..42`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

pub fn parse_indices(s: &str) -> Result<IndexList, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let out = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err("indices start at 1".into());
    }
    Ok(IndexList(out))
}

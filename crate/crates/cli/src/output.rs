use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use threshold_alloc::format::{KeyValues, Table};

use crate::{Cli, Format};

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn table_text(cli: &Cli, t: &Table) -> String {
    match cli.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}

pub fn kv_text(cli: &Cli, kv: &KeyValues) -> String {
    match cli.format {
        Format::Csv => kv.to_text(),
        Format::Json => kv.to_json(),
    }
}

pub fn emit_table(cli: &Cli, t: &Table) -> Result<()> {
    write_to(cli.out.as_deref(), &table_text(cli, t))
}

pub fn emit_kv(cli: &Cli, kv: &KeyValues) -> Result<()> {
    write_to(cli.out.as_deref(), &kv_text(cli, kv))
}

/// Secondary output: a file when given, otherwise standard error.
pub fn emit_side(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stderr().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

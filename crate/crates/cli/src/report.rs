//! Report envelope shared by all subcommands: schema tag, toolkit version,
//! the full run configuration, and the fixture polynomial in canonical
//! text form. Reports carry no timestamps, so identical configurations
//! produce byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub const SCHEMA: &str = "hardy-forge/1";

#[derive(Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub polynomial: String,
    pub nvars: usize,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(
        command: &'static str,
        config: C,
        polynomial: String,
        nvars: usize,
        result: R,
    ) -> Self {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            polynomial,
            nvars,
            result,
        }
    }

    pub fn write(&self, out: Option<&Path>) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        match out {
            Some(path) => {
                let mut file = std::fs::File::create(path)?;
                file.write_all(json.as_bytes())?;
                file.write_all(b"\n")?;
            }
            None => println!("{json}"),
        }
        Ok(())
    }
}

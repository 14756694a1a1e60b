//! CSV emission with a `#` metadata header.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Real number with 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub struct CsvOut {
    w: Box<dyn Write>,
}

impl CsvOut {
    /// Opens `path`, or stdout when `None`.
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { w })
    }

    /// Writes the metadata block: tool version, subcommand, resolved config
    /// and any extra `key = value` lines.
    pub fn header(
        &mut self,
        command: &str,
        cfg: &RunConfig,
        extra: &[(&str, String)],
    ) -> io::Result<()> {
        writeln!(self.w, "# magicforge {VERSION}")?;
        writeln!(self.w, "# command = \"{command}\"")?;
        for (k, v) in extra {
            writeln!(self.w, "# {k} = {v}")?;
        }
        for line in cfg.to_toml().lines() {
            writeln!(self.w, "# {line}")?;
        }
        Ok(())
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        let mut first = true;
        for f in fields {
            if !first {
                self.w.write_all(b",")?;
            }
            self.w.write_all(f.as_ref().as_bytes())?;
            first = false;
        }
        self.w.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 0.8273268353144376, 1e-300, -2.5e10] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(opt_real(None), "");
    }
}

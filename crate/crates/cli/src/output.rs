use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::{Failure, Result, INPUT};

/// Whether sequence files carry a provenance comment.
#[derive(Clone, Copy, Debug)]
pub struct Stamp(pub bool);

impl Stamp {
    pub fn comment(self) -> Option<String> {
        self.0.then(|| {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            format!("gcs {} unix={secs}", env!("CARGO_PKG_VERSION"))
        })
    }
}

/// Writes to `path` atomically, or to standard output.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Failure::new(INPUT, format!("write failed: {e}"));
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(io)
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(p).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes `text` to `out` atomically (temp file in the same directory, then
/// rename), or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

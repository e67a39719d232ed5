//! Shared helpers for the operator-editable TSV table files.

use std::fs;
use std::io;
use std::path::Path;

/// Iterate data rows of a TSV document: yields (1-based line number, trimmed
/// line) for every line that is neither blank nor a `#` comment.
pub(crate) fn rows(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Read a whole table file, mapping any I/O failure through `unreadable`.
pub(crate) fn read<E>(
    path: &Path,
    unreadable: impl FnOnce(String, io::Error) -> E,
) -> Result<String, E> {
    fs::read_to_string(path).map_err(|e| unreadable(path.display().to_string(), e))
}

/// Short content hash used as a table version stamp.
pub(crate) fn content_version(parts: &[&str]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

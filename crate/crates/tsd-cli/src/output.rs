//! Report emission: atomic file writes, 17-significant-digit number
//! formatting for CSV, and output-path resolution.

use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable that overrides the directory for relative output
/// paths.
pub const OUTPUT_DIR_ENV: &str = "TSD_OUTPUT_DIR";

/// Resolve an output path: relative paths are joined onto the directory
/// named by `TSD_OUTPUT_DIR` when that variable is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

/// Write `content` to `path` atomically: the bytes go to a temporary file
/// in the destination directory, which is then renamed over the target.
pub fn atomic_write(path: &Path, content: &str) -> std::io::Result<()> {
    let path = resolve_out(path);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, &path)
}

/// Emit to the given path (atomically) or to stdout when no path is set.
pub fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(p) => atomic_write(p, content),
        None => {
            print!("{content}");
            std::io::stdout().flush()
        }
    }
}

/// A float with 17 significant digits: lossless for f64 round-trips.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Build a CSV document: header row, comma separators, LF line endings,
/// numbers at 17 significant digits.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for &v in &[std::f64::consts::PI, 1.0 / 3.0, 1e-300, -2.5e17] {
            let back: f64 = fmt17(v).parse().unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn csv_shape() {
        let doc = csv(&["x", "y"], &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let lines: Vec<&str> = doc.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x,y");
        assert!(!doc.contains('\r'));
    }
}

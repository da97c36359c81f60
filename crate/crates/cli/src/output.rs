use std::io::Write;
use std::path::{Path, PathBuf};

use halfline_core::potential::fmt_f64;
use serde_json::{Map, Number, Value};

use crate::commands::{Artifact, Table};

pub fn csv_string(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn number(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Summary fields plus one array of flat row objects per table.
pub fn json_string(command: &str, artifact: &Artifact) -> String {
    let mut obj = Map::new();
    obj.insert("command".into(), Value::String(command.into()));
    obj.extend(artifact.summary.clone());
    for table in artifact.tables.iter().filter(|t| t.in_json) {
        let rows = table
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, &x)| (c.to_string(), number(x)))
                        .collect(),
                )
            })
            .collect();
        obj.insert(table.name.into(), Value::Array(rows));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// `dir/<stem>_<suffix>.<ext>` next to `path`.
pub fn companion_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Artifact {
        Artifact {
            summary: Map::from_iter([("n".to_string(), Value::from(2))]),
            tables: vec![Table {
                name: "t",
                columns: vec!["x", "y"],
                rows: vec![vec![0.1, -2.5], vec![f64::NAN, 1e300]],
                in_json: true,
            }],
            passed: true,
        }
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let s = csv_string(&sample().tables[0]);
        assert_eq!(
            s,
            "x,y\n1.0000000000000001e-1,-2.5000000000000000e0\nNaN,1.0000000000000001e300\n"
        );
        let back: f64 = s.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_rows_are_flat() {
        let v: Value = serde_json::from_str(&json_string("demo", &sample())).unwrap();
        assert_eq!(v["command"], "demo");
        assert_eq!(v["n"], 2);
        assert_eq!(v["t"][0]["y"], -2.5);
        assert!(v["t"][1]["x"].is_null());
    }

    #[test]
    fn companion_names() {
        assert_eq!(
            companion_path(Path::new("out/fig1.csv"), "line"),
            Path::new("out/fig1_line.csv")
        );
        assert_eq!(companion_path(Path::new("fig"), "line"), Path::new("fig_line"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

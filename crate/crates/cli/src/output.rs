use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use complex_germ::oracle::WavefunctionGrid;
use serde::Serialize;

use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level layout of every JSON summary.
#[derive(Debug, Serialize)]
pub struct Summary<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a C,
    pub results: R,
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv<I>(&self, name: &str, header: &[&str], rows: I) -> CliResult<PathBuf>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let mut first = true;
            for v in row {
                if !first {
                    text.push(',');
                }
                first = false;
                write!(text, "{v:e}").unwrap();
            }
            text.push('\n');
        }
        let path = self.path(name);
        fs::write(&path, text)?;
        Ok(path)
    }

    /// Grid snapshot with columns x, re_psi, im_psi.
    pub fn write_snapshot(&self, name: &str, psi: &WavefunctionGrid) -> CliResult<PathBuf> {
        let rows = psi.grid.points().into_iter().zip(&psi.values).map(|(x, v)| vec![x, v.re, v.im]);
        self.write_csv(name, &["x", "re_psi", "im_psi"], rows)
    }

    pub fn write_summary<C: Serialize, R: Serialize>(&self, command: &str, config: &C, results: R) -> CliResult<PathBuf> {
        let summary = Summary { schema_version: SCHEMA_VERSION, command, config, results };
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        let path = self.path(&format!("{command}_summary.json"));
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Run `f` on every item on its own thread and return the results in input order.
pub fn parallel_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.iter().map(|item| scope.spawn(|| f(item))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    })
}

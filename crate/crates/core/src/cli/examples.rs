//! Input files for the bundled worked examples.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const INTERVAL: &str = "# unit interval\nvertex x\nvertex y\nedge e x y 1\n";
const CIRCLE: &str = "# circle of length 4 with antipodal vertices\nvertex x\nvertex xp\nedge p1 x xp 2\nedge p2 x xp 2\n";
const THETA: &str = "# three unit edges between two vertices\nvertex u\nvertex v\nedge a u v 1\nedge b u v 1\nedge c u v 1\n";
const K4: &str = "# complete graph on four vertices, unit lengths\nvertex a\nvertex b\nvertex c\nvertex d\n\
edge ab a b 1\nedge ac a c 1\nedge ad a d 1\nedge bc b c 1\nedge bd b d 1\nedge cd c d 1\n";

/// `(relative path, contents)` of every bundled file.
pub fn files() -> Vec<(&'static str, &'static str)> {
    vec![
        ("interval/graph.txt", INTERVAL),
        ("interval/endpoint.div", "chip v:x 1\n"),
        ("interval/double_midpoint.div", "chip e:e@1/2 2\n"),
        ("interval/aut.group", "auto\n"),
        ("circle/graph.txt", CIRCLE),
        ("circle/antipodal.div", "chip v:x 1\nchip v:xp 1\n"),
        ("circle/rotation.group", "rotate 2\n"),
        ("circle/reflection.group", "reflect v:x v:xp\n"),
        ("circle/dihedral.group", "rotate 2\nreflect v:x v:xp\n"),
        ("theta/graph.txt", THETA),
        ("k4/graph.txt", K4),
    ]
}

/// Writes every bundled file below `dir` and returns the written paths.
pub fn write_examples(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for (rel, text) in files() {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
        }
        fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        out.push(path);
    }
    Ok(out)
}

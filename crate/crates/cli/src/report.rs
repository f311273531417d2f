//! Plain-text result documents with bit-exact number formatting.
//!
//! Every real prints as `{:.16e}` (17 significant digits), so identical runs
//! give byte-identical files. Timing and host data go to a separate metadata
//! file.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use scmfkit::matrix::CMat;

pub fn num(x: f64) -> String {
    // Normalize negative zero so that sign noise cannot break byte equality.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

#[derive(Debug, Default)]
pub struct Document {
    text: String,
}

impl Document {
    pub fn new(command: &str) -> Self {
        let mut d = Self { text: String::from("# scmfkit result\n") };
        d.section("command");
        d.str("name", command);
        d
    }

    pub fn section(&mut self, name: &str) {
        let _ = write!(self.text, "\n[{name}]\n");
    }

    pub fn str(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn real(&mut self, key: &str, value: f64) {
        let _ = writeln!(self.text, "{key} = {}", num(value));
    }

    pub fn int(&mut self, key: &str, value: usize) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn reals(&mut self, key: &str, values: &[f64]) {
        let v: Vec<String> = values.iter().map(|&x| num(x)).collect();
        let _ = writeln!(self.text, "{key} = [{}]", v.join(", "));
    }

    /// Dense complex matrix as real and imaginary row-major blocks.
    pub fn matrix(&mut self, key: &str, m: &CMat) {
        for (part, pick) in [("re", 0), ("im", 1)] {
            let _ = writeln!(self.text, "{key}.{part} = {}x{}", m.nrows(), m.ncols());
            for i in 0..m.nrows() {
                let row: Vec<String> =
                    (0..m.ncols()).map(|j| num(if pick == 0 { m[(i, j)].re } else { m[(i, j)].im })).collect();
                let _ = writeln!(self.text, "  {}", row.join(" "));
            }
        }
    }

    /// Raw block, e.g. the echoed TOML config.
    pub fn raw(&mut self, block: &str) {
        self.text.push_str(block);
        if !block.ends_with('\n') {
            self.text.push('\n');
        }
    }

    pub fn warnings<T: ToString>(&mut self, warnings: &[T]) {
        self.section("warnings");
        if warnings.is_empty() {
            self.str("count", "0");
        }
        for w in warnings {
            let _ = writeln!(self.text, "- {}", w.to_string());
        }
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Writes `<dir>/<stem>.txt` and `<dir>/<stem>.meta.toml`.
    pub fn write(&self, dir: &Path, stem: &str, elapsed: f64) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{stem}.txt"));
        std::fs::write(&path, &self.text)?;
        let unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = format!(
            "created_unix = {unix}\nelapsed_seconds = {elapsed}\nversion = \"{}\"\nresult = \"{stem}.txt\"\n",
            env!("CARGO_PKG_VERSION")
        );
        std::fs::write(dir.join(format!("{stem}.meta.toml")), meta)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scmfkit::matrix::c64;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-0.0), "0.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn matrix_layout() {
        let mut d = Document::new("x");
        let mut m = CMat::zeros(1, 2);
        m[(0, 1)] = c64(1.0, -2.0);
        d.matrix("rho", &m);
        assert!(d.as_str().contains("rho.re = 1x2\n  0.0000000000000000e0 1.0000000000000000e0\n"));
        assert!(d.as_str().contains("rho.im = 1x2\n  0.0000000000000000e0 -2.0000000000000000e0\n"));
    }
}

//! CSV artifacts. Each file starts with `#`-prefixed metadata lines that
//! embed the command, the seed, and the fully resolved scenario, so the
//! artifact documents its own provenance; nothing time- or host-dependent
//! goes in, which keeps reruns byte-identical. Content is composed fully in
//! memory and written in one step after every computation has succeeded, so
//! a failed run leaves no partial files behind.

use crate::Failure;

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(command: &str, seed: u64, trials: Option<usize>, resolved_config: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(&format!("# ris-channel {command}\n"));
        buf.push_str(&format!("# seed = {seed}\n"));
        if let Some(n) = trials {
            buf.push_str(&format!("# trials = {n}\n"));
        }
        buf.push_str("# config:\n");
        for line in resolved_config.trim_end().lines() {
            if line.is_empty() {
                buf.push_str("#\n");
            } else {
                buf.push_str("# ");
                buf.push_str(line);
                buf.push('\n');
            }
        }
        Csv { buf }
    }

    pub fn columns<S: AsRef<str>>(&mut self, names: &[S]) {
        let joined: Vec<&str> = names.iter().map(|n| n.as_ref()).collect();
        self.buf.push_str(&joined.join(","));
        self.buf.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn write(&self, path: &str) -> Result<(), Failure> {
        std::fs::write(path, self.buf.as_bytes())
            .map_err(|e| Failure::Io(format!("{path}: {e}")))
    }
}

/// Serializes a config back to TOML for the artifact header.
pub fn resolved<T: serde::Serialize>(config: &T) -> String {
    toml::to_string(config).expect("scenario structs serialize to TOML")
}

/// Locale-independent number formatting: plain shortest-round-trip decimals
/// in the range people read, exponent notation outside it.
pub fn fnum(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs();
    if (1e-4..1e15).contains(&magnitude) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fint(x: usize) -> String {
    x.to_string()
}

/// Writes a gnuplot sidecar next to a CSV. The scripts are deliberately
/// minimal: set up the separator, label the axes, draw the obvious view.
pub fn plot_script(path: &str, csv_name: &str, body: &str) -> Result<(), Failure> {
    let script = format!(
        "set datafile separator \",\"\nset grid\ncsv = \"{csv_name}\"\n{body}\n",
    );
    std::fs::write(path, script.as_bytes()).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

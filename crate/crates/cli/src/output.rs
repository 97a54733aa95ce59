//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use kglab::experiments::{
    ConjectureResult, ConvergenceResult, DecayOutcome, GrowthResult, LinearResult, SimulateResult,
};

pub const CONVERGENCE_HEADER: &str = "study,d,p,s,h,t,error_hs,fitted_order_at_t";
pub const LINEAR_HEADER: &str = "d,s,h,t,err_kdot,err_k";
pub const GROWTH_HEADER: &str = "d,p,t,h2h1_norm,hk1hk_norm,k,E,E1,E2,envelope_gamma,envelope_ratio";
pub const DECAY_HEADER: &str = "model,d,h,t_min,t_max,fitted_exponent,ci_halfwidth,paper_exponent,band_lo,band_hi,pass";
pub const DECAY_SERIES_HEADER: &str = "model,d,h,t,sup_norm";
pub const CONJECTURE_HEADER: &str = "d,h,tau_min,tau_max,fitted_exponent,ci_halfwidth,argmax_on_boundary";
pub const CONJECTURE_SERIES_HEADER: &str = "d,h,tau,sup_value";
pub const ENERGY_HEADER: &str = "t,E,E1,relative_drift";

/// Header line plus one line per row; floats use the shortest round-trip form.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self { text: format!("{header}\n") }
    }

    pub fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            write!(self.text, "{f}").expect("writing to a String");
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn convergence_csv(results: &[ConvergenceResult]) -> String {
    let mut t = Table::new(CONVERGENCE_HEADER);
    for r in results {
        for row in &r.rows {
            t.row(&[&r.label, &r.dim, &r.p, &r.s, &row.h, &row.t, &row.error, &row.order_at_t]);
        }
    }
    t.into_string()
}

pub fn linear_csv(results: &[LinearResult]) -> String {
    let mut t = Table::new(LINEAR_HEADER);
    for r in results {
        for row in &r.rows {
            t.row(&[&r.dim, &r.s, &row.h, &row.t, &row.err_kdot, &row.err_k]);
        }
    }
    t.into_string()
}

pub fn growth_csv(results: &[GrowthResult]) -> String {
    let mut t = Table::new(GROWTH_HEADER);
    for r in results {
        for row in &r.rows {
            t.row(&[
                &r.dim,
                &r.p,
                &row.t,
                &row.h2h1_norm,
                &row.hk1hk_norm,
                &row.k,
                &row.energy,
                &row.e1,
                &row.e2,
                &row.gamma,
                &row.ratio,
            ]);
        }
    }
    t.into_string()
}

pub fn decay_csv(results: &[DecayOutcome]) -> (String, String) {
    let mut t = Table::new(DECAY_HEADER);
    let mut s = Table::new(DECAY_SERIES_HEADER);
    for o in results {
        t.row(&[
            &o.model,
            &o.dim,
            &o.h,
            &o.t_min,
            &o.t_max,
            &o.fit.slope,
            &o.fit.half_width,
            &o.reference_exponent,
            &o.band.0,
            &o.band.1,
            &o.passed(),
        ]);
        for (time, value) in &o.series {
            s.row(&[&o.model, &o.dim, &o.h, time, value]);
        }
    }
    (t.into_string(), s.into_string())
}

pub fn conjecture_csv(results: &[ConjectureResult]) -> (String, String) {
    let mut t = Table::new(CONJECTURE_HEADER);
    let mut s = Table::new(CONJECTURE_SERIES_HEADER);
    for r in results {
        for row in &r.rows {
            t.row(&[
                &r.dim,
                &row.h,
                &row.tau_min,
                &row.tau_max,
                &row.fit.slope,
                &row.fit.half_width,
                &row.argmax_on_boundary,
            ]);
            for (tau, value) in &row.series {
                s.row(&[&r.dim, &row.h, tau, value]);
            }
        }
    }
    (t.into_string(), s.into_string())
}

pub fn energy_csv(results: &[SimulateResult]) -> String {
    let mut t = Table::new(ENERGY_HEADER);
    for r in results {
        for row in &r.rows {
            t.row(&[&row.t, &row.energy, &row.e1, &row.relative_drift]);
        }
    }
    t.into_string()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files written during a run, with checksums.
#[derive(Default)]
pub struct Written {
    pub files: Vec<(PathBuf, String, usize)>,
}

impl Written {
    pub fn write(&mut self, dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        self.files.push((PathBuf::from(name), sha256_hex(contents.as_bytes()), contents.len()));
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.files
                .iter()
                .map(|(p, h, n)| json!({ "path": p.display().to_string(), "sha256": h, "bytes": n }))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip_floats() {
        let mut t = Table::new("a,b,c");
        t.row(&[&0.1f64, &1e-20f64, &true]);
        let s = t.into_string();
        let line = s.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], "0.1");
        assert_eq!(fields[1].parse::<f64>().unwrap(), 1e-20);
        assert_eq!(fields[2], "true");
    }

    #[test]
    fn sha256_known_value() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

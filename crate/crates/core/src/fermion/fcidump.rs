//! Reader for the FCIDUMP integral format.
//!
//! The header is a Fortran namelist (`&FCI NORB=..., NELEC=..., MS2=..., &END`
//! or terminated by `/`). Each following line is `value i j k l` with 1-based
//! spatial indices in chemist notation `(ij|kl)`; `k = l = 0` marks a
//! one-electron integral `h_ij` and `i = j = k = l = 0` the core energy.
//! Only the symmetry-unique entries need to be present: the 8-fold
//! permutational symmetry of real orbitals is applied on read.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Fcidump {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
    /// `h[i * norb + j]`
    pub one_body: Vec<f64>,
    /// `(ij|kl)` at `((i * norb + j) * norb + k) * norb + l`
    pub two_body: Vec<f64>,
    pub core_energy: f64,
}

impl Fcidump {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.as_ref().display()),
            ))
        })?;
        text.parse()
    }

    pub fn h1(&self, i: usize, j: usize) -> f64 {
        self.one_body[i * self.norb + j]
    }

    pub fn eri(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.norb;
        self.two_body[((i * n + j) * n + k) * n + l]
    }
}

fn header_value(header: &str, key: &str) -> Option<String> {
    let mut norm = header.to_ascii_uppercase().replace(',', " ");
    while norm.contains("= ") || norm.contains(" =") {
        norm = norm.replace("= ", "=").replace(" =", "=");
    }
    norm.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key)?.strip_prefix('=').map(str::to_string))
}

impl std::str::FromStr for Fcidump {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut header = String::new();
        let mut header_done = false;
        for (_, line) in lines.by_ref() {
            header.push_str(line);
            header.push(' ');
            let t = line.trim().to_ascii_uppercase();
            if t.contains("&END") || t == "/" || t.ends_with('/') {
                header_done = true;
                break;
            }
        }
        if !header_done {
            return Err(Error::Fcidump {
                line: 1,
                reason: "missing header terminator (&END or /)".into(),
            });
        }
        let int_field = |key: &str| -> Result<i64> {
            let v = header_value(&header, key).ok_or_else(|| Error::Fcidump {
                line: 1,
                reason: format!("header lacks {key}"),
            })?;
            v.parse().map_err(|_| Error::Fcidump {
                line: 1,
                reason: format!("{key} is not an integer: {v:?}"),
            })
        };
        let norb = int_field("NORB")?;
        let nelec = int_field("NELEC")?;
        let ms2 = header_value(&header, "MS2")
            .map(|v| v.parse::<i64>())
            .transpose()
            .map_err(|_| Error::Fcidump {
                line: 1,
                reason: "MS2 is not an integer".into(),
            })?
            .unwrap_or(0);
        if norb <= 0 || nelec < 0 {
            return Err(Error::Fcidump {
                line: 1,
                reason: format!("invalid NORB={norb} or NELEC={nelec}"),
            });
        }
        let n = norb as usize;
        let mut one_body = vec![0.0; n * n];
        let mut two_body = vec![0.0; n * n * n * n];
        let mut core_energy = 0.0;

        for (idx, line) in lines {
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::Fcidump {
                    line: lineno,
                    reason: format!("expected 5 fields, found {}", fields.len()),
                });
            }
            let value: f64 = fields[0].replace(['D', 'd'], "E").parse().map_err(|_| Error::Fcidump {
                line: lineno,
                reason: format!("bad value {:?}", fields[0]),
            })?;
            let mut idx4 = [0usize; 4];
            for (slot, f) in idx4.iter_mut().zip(&fields[1..]) {
                let v: usize = f.parse().map_err(|_| Error::Fcidump {
                    line: lineno,
                    reason: format!("bad index {f:?}"),
                })?;
                if v > n {
                    return Err(Error::Fcidump {
                        line: lineno,
                        reason: format!("index {v} exceeds NORB={n}"),
                    });
                }
                *slot = v;
            }
            match idx4 {
                [0, 0, 0, 0] => core_energy = value,
                [i, j, 0, 0] if i > 0 && j > 0 => {
                    let (i, j) = (i - 1, j - 1);
                    one_body[i * n + j] = value;
                    one_body[j * n + i] = value;
                }
                [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                    let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                    for (a, b, c, d) in [
                        (i, j, k, l),
                        (j, i, k, l),
                        (i, j, l, k),
                        (j, i, l, k),
                        (k, l, i, j),
                        (l, k, i, j),
                        (k, l, j, i),
                        (l, k, j, i),
                    ] {
                        two_body[((a * n + b) * n + c) * n + d] = value;
                    }
                }
                // orbital energies (i 0 0 0) carry no Hamiltonian information
                [_, 0, 0, 0] => {}
                _ => {
                    return Err(Error::Fcidump {
                        line: lineno,
                        reason: format!("unrecognized index pattern {idx4:?}"),
                    })
                }
            }
        }

        Ok(Fcidump {
            norb: n,
            nelec: nelec as usize,
            ms2,
            one_body,
            two_body,
            core_energy,
        })
    }
}

//! On-disk zero lists keyed by modulus, character index, height and
//! tolerance version.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gzlab_core::format::fmt_num;
use gzlab_core::lfunc::{find_zeros, Zero, ZeroList, ZERO_TOLERANCE_VERSION};
use gzlab_core::{Character, Result};

/// `|L(ρ)|` must be below this at every listed zero.
pub const ZERO_TOL: f64 = 1e-8;

pub struct ZeroCache {
    dir: PathBuf,
}

/// A zero list together with the exact CSV bytes that represent it.
pub struct CachedZeros {
    pub list: ZeroList,
    pub csv: String,
    pub from_cache: bool,
}

impl ZeroCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, chi: &Character, height: f64) -> PathBuf {
        let idx: Vec<String> = chi.index().iter().map(|v| v.to_string()).collect();
        self.dir.join(format!(
            "zeros_q{}_idx{}_T{}_v{}.csv",
            chi.modulus(),
            idx.join("-"),
            fmt_num(height),
            ZERO_TOLERANCE_VERSION
        ))
    }

    /// Serves the cached list when it parses; otherwise recomputes and
    /// rewrites the file.
    pub fn zeros(&self, chi: &Character, height: f64) -> Result<CachedZeros> {
        let path = self.path_for(chi, height);
        if let Ok(text) = fs::read_to_string(&path) {
            match ZeroList::zeros_from_csv(&text, &chi.id()) {
                Ok(zeros) => {
                    return Ok(CachedZeros {
                        list: rebuild(chi, height, zeros),
                        csv: text,
                        from_cache: true,
                    })
                }
                Err(e) => eprintln!(
                    "warning: corrupt zero cache {} ({e}); regenerating",
                    path.display()
                ),
            }
        }
        let list = find_zeros(chi, height, ZERO_TOL)?;
        let csv = list.to_csv();
        if let Err(e) = write_atomic(&path, &csv) {
            eprintln!("warning: cannot write zero cache {}: {e}", path.display());
        }
        Ok(CachedZeros {
            list,
            csv,
            from_cache: false,
        })
    }
}

/// Only verified lists are ever written, so a parsed file is verified.
fn rebuild(chi: &Character, height: f64, zeros: Vec<Zero>) -> ZeroList {
    let real = chi.is_real();
    let argument_count = if real {
        zeros
            .iter()
            .map(|z| if z.gamma > 0.0 { 2 } else { 1 })
            .sum()
    } else {
        zeros.len() as i64
    };
    ZeroList {
        chi_id: chi.id(),
        height,
        zeros,
        count_verified: true,
        argument_count,
        real_character: real,
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    fs::rename(tmp, path)
}

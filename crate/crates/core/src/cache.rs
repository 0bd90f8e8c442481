//! On-disk JSON cache of structure-group data.
//!
//! One file per `(group, n, convention_version)`. Files are written to a
//! temporary name and renamed into place, so a reader never sees a partial
//! entry.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num::Complex;
use serde::{Deserialize, Serialize};

use crate::clifford::Spinor;
use crate::error::Result;
use crate::exterior::Form;
use crate::groups::{self, GStructureSpec, GroupId, InvariantForms};

/// Bumped whenever a sign or ordering convention changes.
pub const CONVENTION_VERSION: u32 = 1;

/// Environment variable that overrides the cache directory.
pub const CACHE_DIR_ENV: &str = "VECSTRUCT_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub group: GroupId,
    pub n: usize,
    pub convention_version: u32,
}

impl CacheKey {
    pub fn new(group: GroupId, n: usize) -> Self {
        CacheKey {
            group,
            n,
            convention_version: CONVENTION_VERSION,
        }
    }

    fn file_name(&self) -> String {
        format!("{}_n{}_v{}.json", self.group, self.n, self.convention_version)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachedSpinor {
    pub n: usize,
    /// `[re, im]` pairs.
    pub components: Vec<[f64; 2]>,
}

impl CachedSpinor {
    pub fn from_spinor(s: &Spinor) -> Self {
        CachedSpinor {
            n: s.n(),
            components: s.components.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_spinor(&self) -> Result<Spinor> {
        let v = DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| Complex::new(c[0], c[1])),
        );
        Spinor::new(self.n, v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CachedGroup {
    pub key: CacheKey,
    pub g_basis: Vec<Form<f64>>,
    pub m_basis: Vec<Form<f64>>,
    pub invariant_forms: BTreeMap<usize, InvariantForms>,
    pub invariant_spinor: Option<CachedSpinor>,
}

impl CachedGroup {
    pub fn from_spec(spec: &GStructureSpec) -> Self {
        CachedGroup {
            key: CacheKey::new(spec.basis.group.clone(), spec.basis.n),
            g_basis: spec.basis.g_basis.clone(),
            m_basis: spec.basis.m_basis.clone(),
            invariant_forms: spec.invariant_forms.clone(),
            invariant_spinor: spec.invariant_spinor.as_ref().map(CachedSpinor::from_spinor),
        }
    }

    /// Computes the entry from scratch.
    pub fn build(group: &GroupId, n: usize, degrees: &[usize]) -> Result<Self> {
        let basis = groups::subalgebra(group, n)?;
        let spec = GStructureSpec::build(basis, degrees)?;
        Ok(Self::from_spec(&spec))
    }

    /// Largest entrywise difference between two entries with the same key
    /// and shapes; `None` when the shapes differ.
    pub fn max_difference(&self, other: &CachedGroup) -> Option<f64> {
        if self.key != other.key
            || self.g_basis.len() != other.g_basis.len()
            || self.m_basis.len() != other.m_basis.len()
            || self.invariant_forms.keys().ne(other.invariant_forms.keys())
        {
            return None;
        }
        let forms = |a: &[Form<f64>], b: &[Form<f64>]| -> Option<f64> {
            if a.len() != b.len() {
                return None;
            }
            let mut worst: f64 = 0.0;
            for (x, y) in a.iter().zip(b) {
                worst = worst.max(x.try_sub(y).ok()?.max_abs());
            }
            Some(worst)
        };
        let mut worst = forms(&self.g_basis, &other.g_basis)?.max(forms(&self.m_basis, &other.m_basis)?);
        for (k, a) in &self.invariant_forms {
            let b = &other.invariant_forms[k];
            if a.dim() != b.dim() {
                return None;
            }
            worst = worst.max(forms(a.basis(), b.basis())?);
        }
        match (&self.invariant_spinor, &other.invariant_spinor) {
            (None, None) => {}
            (Some(a), Some(b)) if a.components.len() == b.components.len() => {
                for (x, y) in a.components.iter().zip(&b.components) {
                    worst = worst.max((x[0] - y[0]).abs()).max((x[1] - y[1]).abs());
                }
            }
            _ => return None,
        }
        Some(worst)
    }
}

/// Directory holding cached group entries.
#[derive(Clone, Debug)]
pub struct GroupCache {
    dir: PathBuf,
}

impl GroupCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GroupCache { dir: dir.into() }
    }

    /// `$VECSTRUCT_CACHE_DIR`, falling back to a directory under the system
    /// temp dir.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::new(d),
            _ => Self::new(std::env::temp_dir().join("vecstruct-cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Reads an entry. Missing files, stale convention versions and
    /// mismatched keys all read as `None`.
    pub fn load(&self, key: &CacheKey) -> Result<Option<CachedGroup>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CachedGroup = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(_) => return Ok(None),
        };
        Ok((entry.key == *key).then_some(entry))
    }

    pub fn store(&self, entry: &CachedGroup) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(&entry.key);
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let text = serde_json::to_string_pretty(entry)?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Cached entry if present and covering `degrees`, otherwise a fresh
    /// build that is then stored.
    pub fn get_or_build(&self, group: &GroupId, n: usize, degrees: &[usize]) -> Result<CachedGroup> {
        let key = CacheKey::new(group.clone(), n);
        if let Some(entry) = self.load(&key)? {
            if degrees.iter().all(|k| entry.invariant_forms.contains_key(k)) {
                return Ok(entry);
            }
        }
        let entry = CachedGroup::build(group, n, degrees)?;
        self.store(&entry)?;
        Ok(entry)
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{DecodeError, SchemaLookup};
use crate::compat::{
    build_transforms, classify, diff_with_history, ClassifyOptions, DiffHistory,
    MigrationTransform, Verdict,
};
use crate::idl::{parse, render};
use crate::model::{resolve, semantic_fields, QualifierValue, ResolvedSchema, SemanticTypeId, TypeDef};

/// Identity of a telemetry asset: the fully qualified name of its root
/// struct, e.g. `observability.RequestCounter`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssetId(pub String);

impl AssetId {
    pub fn new(fqn: impl Into<String>) -> Result<Self, RegistryError> {
        let fqn = fqn.into();
        let valid = fqn.contains('.')
            && fqn.split('.').all(|seg| {
                !seg.is_empty()
                    && seg.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            });
        if !valid {
            return Err(RegistryError::InvalidDocument {
                message: format!("'{fqn}' is not a dotted identifier path"),
            });
        }
        Ok(Self(fqn))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("invalid document: {message}")]
    InvalidDocument { message: String },
    #[error("breaking change rejected by the actualization gate")]
    BreakingRejected { verdict: Verdict },
    #[error("concurrent modification: expected parent {expected:?}, latest is {actual}")]
    ConcurrentModification { expected: Option<u32>, actual: u32 },
    #[error("not found: {0}")]
    NotFound(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt store file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

/// One published schema version. Version files are append-only: once
/// written, a `v<N>.json` is never touched again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionEntry {
    pub asset: AssetId,
    pub version: u32,
    /// Canonical pretty-printed IDL of the published document.
    pub document_text: String,
    /// Canonical JSON of the resolved schema; fingerprints recompute from
    /// this exact string.
    pub resolved_json: String,
    pub fingerprint_structural: String,
    pub fingerprint_semantic: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transform_from_previous: Option<MigrationTransform>,
    pub created_at: DateTime<Utc>,
    pub author: String,
}

impl VersionEntry {
    pub fn schema(&self) -> Result<ResolvedSchema, RegistryError> {
        ResolvedSchema::from_canonical_json(&self.resolved_json).map_err(|e| {
            RegistryError::Corrupt {
                path: PathBuf::from(format!("{}/v{}.json", self.asset, self.version)),
                message: e.to_string(),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintRecord {
    pub version: u32,
    pub structural: String,
    pub semantic: String,
}

/// Per-asset summary kept in `index.json`: the latest version number and
/// the fingerprint history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetIndex {
    pub latest: u32,
    pub fingerprints: Vec<FingerprintRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetSummary {
    pub asset: AssetId,
    pub latest_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub display_name: Option<String>,
}

/// One field hit from a semantic-type search across the registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticHit {
    pub asset: AssetId,
    pub path: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub qualifiers: Vec<QualifierValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rich_type: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VersionSelector {
    Version(u32),
    Latest,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ActualizeOptions {
    /// Accept field removals. The default gate treats removals as breaking
    /// because existing consumers may depend on them.
    pub allow_removals: bool,
}

/// File-backed schema store. Cheap to open; all state lives on disk, so
/// reopening a directory reproduces the store exactly. Writes are
/// serialized per asset; reads never lock.
pub struct Store {
    root: PathBuf,
    write_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    /// Version files are immutable, so parsed schemas cache forever.
    schema_cache: RwLock<HashMap<(String, u32), Arc<ResolvedSchema>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let root = root.into();
        std::fs::create_dir_all(root.join("assets"))?;
        Ok(Self {
            root,
            write_locks: Mutex::new(HashMap::new()),
            schema_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn asset_dir(&self, asset: &AssetId) -> PathBuf {
        self.root.join("assets").join(asset.as_str())
    }

    fn version_path(&self, asset: &AssetId, version: u32) -> PathBuf {
        self.asset_dir(asset).join(format!("v{version}.json"))
    }

    fn asset_lock(&self, asset: &AssetId) -> Arc<Mutex<()>> {
        let mut locks = self.write_locks.lock().expect("lock map poisoned");
        locks.entry(asset.0.clone()).or_default().clone()
    }

    /// The highest version present on disk, from the version files
    /// themselves rather than the index summary.
    fn latest_version(&self, asset: &AssetId) -> Result<Option<u32>, RegistryError> {
        let dir = self.asset_dir(asset);
        if !dir.exists() {
            return Ok(None);
        }
        let mut latest = None;
        for entry in std::fs::read_dir(&dir)? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(version) = name.strip_prefix('v').and_then(|r| r.strip_suffix(".json")) {
                if let Ok(version) = version.parse::<u32>() {
                    latest = latest.max(Some(version));
                }
            }
        }
        Ok(latest)
    }

    /// Validates, gates, and publishes one document as the asset's next
    /// version.
    ///
    /// First publication creates version 1 with an empty change set.
    /// Republishing a document identical to the latest version is a no-op
    /// that returns the current version. A breaking diff rejects the call
    /// and leaves the store untouched.
    pub fn actualize(
        &self,
        asset: &AssetId,
        document: &str,
        author: &str,
        expected_parent: Option<u32>,
        options: ActualizeOptions,
    ) -> Result<(u32, Verdict), RegistryError> {
        let ast = parse(document, asset.as_str())
            .map_err(|e| RegistryError::InvalidDocument { message: e.to_string() })?;
        if !ast.includes.is_empty() {
            return Err(RegistryError::InvalidDocument {
                message: "published documents must be self-contained (no includes)".into(),
            });
        }
        let schema = resolve(std::slice::from_ref(&ast), asset.as_str())
            .map_err(|e| RegistryError::InvalidDocument { message: e.to_string() })?;
        let canonical_text = render(&ast);

        let lock = self.asset_lock(asset);
        let _guard = lock.lock().expect("asset lock poisoned");

        let latest = self.latest_version(asset)?;
        match (expected_parent, latest) {
            (Some(expected), Some(actual)) if expected != actual => {
                return Err(RegistryError::ConcurrentModification {
                    expected: Some(expected),
                    actual,
                })
            }
            (Some(expected), None) if expected != 0 => {
                return Err(RegistryError::ConcurrentModification {
                    expected: Some(expected),
                    actual: 0,
                })
            }
            _ => {}
        }

        let Some(latest) = latest else {
            let verdict = Verdict::compatible_empty();
            self.write_version(asset, 1, &canonical_text, &schema, None, author)?;
            return Ok((1, verdict));
        };

        let previous = self.get(asset, VersionSelector::Version(latest))?;
        if previous.document_text == canonical_text {
            return Ok((latest, Verdict::compatible_empty()));
        }
        let old_schema = previous.schema()?;

        let history = self.retired_ids(asset, latest, &old_schema)?;
        let changes = diff_with_history(&old_schema, &schema, &history).map_err(|e| {
            RegistryError::InvalidDocument { message: e.to_string() }
        })?;
        let verdict =
            classify(&changes, ClassifyOptions { allow_removals: options.allow_removals });
        if verdict.is_breaking() {
            return Err(RegistryError::BreakingRejected { verdict });
        }

        let next = latest + 1;
        let transform = build_transforms(&verdict, latest, next)
            .expect("compatible verdicts always yield a transform");
        self.write_version(asset, next, &canonical_text, &schema, Some(transform), author)?;
        Ok((next, verdict))
    }

    /// Field ids used by any historical version but absent from the current

    /// schema, per composite.
    fn retired_ids(
        &self,
        asset: &AssetId,
        latest: u32,
        current: &ResolvedSchema,
    ) -> Result<DiffHistory, RegistryError> {
        let mut ever: BTreeMap<String, BTreeSet<i32>> = BTreeMap::new();
        for version in 1..=latest {
            let schema = self.schema(asset, version)?;
            for def in schema.types.values() {
                if let TypeDef::Composite(c) = def {
                    let set = ever.entry(c.fqn.clone()).or_default();
                    set.extend(c.fields.iter().map(|f| f.id));
                }
            }
        }
        let mut retired = DiffHistory::default();
        for (fqn, ids) in ever {
            let live: BTreeSet<i32> = current
                .composite(&fqn)
                .map(|c| c.fields.iter().map(|f| f.id).collect())
                .unwrap_or_default();
            let gone: BTreeSet<i32> = ids.difference(&live).copied().collect();
            if !gone.is_empty() {
                retired.retired_ids.insert(fqn, gone);
            }
        }
        Ok(retired)
    }

    fn write_version(
        &self,
        asset: &AssetId,
        version: u32,
        document_text: &str,
        schema: &ResolvedSchema,
        transform: Option<MigrationTransform>,
        author: &str,
    ) -> Result<(), RegistryError> {
        let entry = VersionEntry {
            asset: asset.clone(),
            version,
            document_text: document_text.to_string(),
            resolved_json: schema.canonical_json(),
            fingerprint_structural: format!("{:016x}", schema.fingerprint_structural),
            fingerprint_semantic: format!("{:016x}", schema.fingerprint_semantic),
            transform_from_previous: transform,
            created_at: Utc::now(),
            author: author.to_string(),
        };
        let dir = self.asset_dir(asset);
        std::fs::create_dir_all(&dir)?;
        write_atomic(&self.version_path(asset, version), &serde_json::to_vec_pretty(&entry)?)?;

        let mut fingerprints = match self.read_index(asset)? {
            Some(index) => index.fingerprints,
            None => Vec::new(),
        };
        fingerprints.push(FingerprintRecord {
            version,
            structural: entry.fingerprint_structural.clone(),
            semantic: entry.fingerprint_semantic.clone(),
        });
        let index = AssetIndex { latest: version, fingerprints };
        write_atomic(&dir.join("index.json"), &serde_json::to_vec_pretty(&index)?)?;
        Ok(())
    }

    pub fn read_index(&self, asset: &AssetId) -> Result<Option<AssetIndex>, RegistryError> {
        let path = self.asset_dir(asset).join("index.json");
        if !path.exists() {
            return Ok(None);
        }
        let bytes = std::fs::read(&path)?;
        serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| RegistryError::Corrupt { path, message: e.to_string() })
    }

    pub fn get(
        &self,
        asset: &AssetId,
        selector: VersionSelector,
    ) -> Result<VersionEntry, RegistryError> {
        let version = match selector {
            VersionSelector::Version(v) => v,
            VersionSelector::Latest => self
                .latest_version(asset)?
                .ok_or_else(|| RegistryError::NotFound(format!("asset '{asset}'")))?,
        };
        let path = self.version_path(asset, version);
        if !path.exists() {
            return Err(RegistryError::NotFound(format!("asset '{asset}' version {version}")));
        }
        let bytes = std::fs::read(&path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| RegistryError::Corrupt { path, message: e.to_string() })
    }

    /// Parsed schema for (asset, version), cached: version files never
    /// change once written.
    pub fn schema(&self, asset: &AssetId, version: u32) -> Result<Arc<ResolvedSchema>, RegistryError> {
        let key = (asset.0.clone(), version);
        if let Some(hit) = self.schema_cache.read().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let schema = Arc::new(self.get(asset, VersionSelector::Version(version))?.schema()?);
        self.schema_cache.write().expect("cache poisoned").insert(key, schema.clone());
        Ok(schema)
    }

    pub fn assets(&self) -> Result<Vec<AssetId>, RegistryError> {
        let dir = self.root.join("assets");
        let mut out = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            if entry.file_type()?.is_dir() {
                out.push(AssetId(entry.file_name().to_string_lossy().into_owned()));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Lists registered assets sorted by fqn, optionally filtered by a name
    /// substring and/or by carrying at least one field of a semantic type.
    pub fn list_assets(
        &self,
        name_filter: Option<&str>,
        semantic_type: Option<&SemanticTypeId>,
    ) -> Result<Vec<AssetSummary>, RegistryError> {
        let mut out = Vec::new();
        for asset in self.assets()? {
            if let Some(filter) = name_filter {
                if !asset.as_str().contains(filter) {
                    continue;
                }
            }
            let Some(latest) = self.latest_version(&asset)? else { continue };
            let schema = self.schema(&asset, latest)?;
            if let Some(semid) = semantic_type {
                let has = semantic_fields(&schema).iter().any(|e| &e.semantic_type == semid);
                if !has {
                    continue;
                }
            }
            let display_name = schema.root_composite().display_name.clone();
            out.push(AssetSummary { asset, latest_version: latest, display_name });
        }
        Ok(out)
    }

    /// Every field across all assets' latest versions that carries the
    /// semantic type.
    pub fn search_semantic(
        &self,
        semid: &SemanticTypeId,
    ) -> Result<Vec<SemanticHit>, RegistryError> {
        let mut out = Vec::new();
        for asset in self.assets()? {
            let Some(latest) = self.latest_version(&asset)? else { continue };
            let schema = self.schema(&asset, latest)?;
            for entry in semantic_fields(&schema) {
                if &entry.semantic_type == semid {
                    out.push(SemanticHit {
                        asset: asset.clone(),
                        path: entry.path,
                        qualifiers: entry.qualifiers,
                        rich_type: entry.rich_type,
                    });
                }
            }
        }
        Ok(out)
    }

    /// The per-step transforms between two versions, in ascending order.
    /// `migrate_record` applies them forward or inverted depending on the
    /// requested direction.
    pub fn transform_chain(
        &self,
        asset: &AssetId,
        from: u32,
        to: u32,
    ) -> Result<Vec<MigrationTransform>, RegistryError> {
        let (lo, hi) = (from.min(to), from.max(to));
        for v in [from, to] {
            if !self.version_path(asset, v).exists() {
                return Err(RegistryError::NotFound(format!("asset '{asset}' version {v}")));
            }
        }
        let mut out = Vec::new();
        for v in (lo + 1)..=hi {
            let entry = self.get(asset, VersionSelector::Version(v))?;
            let transform = entry.transform_from_previous.unwrap_or_else(|| {
                MigrationTransform::identity(v - 1, v)
            });
            out.push(transform);
        }
        Ok(out)
    }
}

impl SchemaLookup for Store {
    fn schema_for(&self, asset: &str, version: u32) -> Result<Arc<ResolvedSchema>, DecodeError> {
        let asset_id = AssetId(asset.to_string());
        if self.latest_version(&asset_id).ok().flatten().is_none() {
            return Err(DecodeError::UnknownAsset(asset.to_string()));
        }
        self.schema(&asset_id, version).map_err(|_| DecodeError::UnknownVersion {
            asset: asset.to_string(),
            version,
        })
    }
}

/// Write-to-temp then rename, so readers never observe a partial file and a
/// crash leaves the previous state intact.
fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().expect("store paths have parents");
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().expect("file name").to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

impl From<serde_json::Error> for RegistryError {
    fn from(e: serde_json::Error) -> Self {
        RegistryError::InvalidDocument { message: e.to_string() }
    }
}

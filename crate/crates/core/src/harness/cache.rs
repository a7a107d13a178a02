use std::fs;
use std::path::{Path, PathBuf};

use super::{verify, Execution, VerificationReport};
use crate::class_labels::{CycleType, FormKind};
use crate::error::Result;

/// Directory of persisted [`VerificationReport`]s keyed by
/// `(form, n, cycle type, crate version)`.
#[derive(Clone, Debug)]
pub struct ReportCache {
    dir: PathBuf,
}

impl ReportCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReportCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, ct: &CycleType, form: FormKind) -> PathBuf {
        let cycles: Vec<String> = ct.cycles().parts().iter().map(u32::to_string).collect();
        self.dir.join(format!("report-v{}-{}-n{}-c{}.json", env!("CARGO_PKG_VERSION"), form, ct.n(), cycles.join("_")))
    }

    /// A cached report, if one exists and parses.
    pub fn load(&self, ct: &CycleType, form: FormKind) -> Option<VerificationReport> {
        let text = fs::read_to_string(self.path_for(ct, form)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, report: &VerificationReport) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&report.report.cycle_type, report.report.form);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(report)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn get_or_verify(&self, ct: &CycleType, form: FormKind, exec: Execution) -> Result<VerificationReport> {
        if let Some(hit) = self.load(ct, form) {
            return Ok(hit);
        }
        let report = verify(ct, form, exec)?;
        self.store(&report)?;
        Ok(report)
    }
}

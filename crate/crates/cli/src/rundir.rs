//! Run-directory layout shared by `train`, `evaluate`, `compare` and `emit-plots`.
//!
//! ```text
//! run-dir/
//!   run.json          kind and policy label
//!   profile.json      copy of the profile the run used
//!   config.json       training or evaluation settings
//!   summary.csv       one metric row for the run's policy
//!   episodes.jsonl    evaluation episodes, one line per epoch
//!   report.json       train only: evaluation curve and probe traces
//!   store.json        train only: learned value store
//!   metrics.csv       train only: convergence curve
//!   value_trace.csv   train only: probe value traces
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use triage_core::domain::ScenarioProfile;
use triage_core::environment::{read_jsonl, write_jsonl, EpisodeLog};
use triage_core::trainer::TrainReport;

pub const RUN: &str = "run.json";
pub const PROFILE: &str = "profile.json";
pub const CONFIG: &str = "config.json";
pub const SUMMARY: &str = "summary.csv";
pub const EPISODES: &str = "episodes.jsonl";
pub const REPORT: &str = "report.json";
pub const STORE: &str = "store.json";
pub const METRICS: &str = "metrics.csv";
pub const VALUE_TRACE: &str = "value_trace.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Train,
    Evaluate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunInfo {
    pub kind: RunKind,
    pub label: String,
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating run directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn open(root: &Path) -> Result<Self> {
        let dir = Self {
            root: root.to_path_buf(),
        };
        if !dir.path(RUN).is_file() {
            return Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} is not a run directory (no {RUN})", root.display()),
            )
            .into());
        }
        Ok(dir)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn has(&self, name: &str) -> bool {
        self.path(name).is_file()
    }

    pub fn writer(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.writer(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read_json<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Result<T> {
        let path = self.path(name);
        let file = File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("parsing {}", path.display()))
    }

    pub fn info(&self) -> Result<RunInfo> {
        self.read_json(RUN)
    }

    pub fn profile(&self) -> Result<ScenarioProfile> {
        let path = self.path(PROFILE);
        triage_core::scenario::load(&path).with_context(|| format!("loading {}", path.display()))
    }

    pub fn report(&self) -> Result<Option<TrainReport>> {
        if self.has(REPORT) {
            Ok(Some(self.read_json(REPORT)?))
        } else {
            Ok(None)
        }
    }

    pub fn write_episodes(&self, logs: &[EpisodeLog]) -> Result<()> {
        let mut w = self.writer(EPISODES)?;
        write_jsonl(&mut w, logs)?;
        w.flush()?;
        Ok(())
    }

    pub fn episodes(&self) -> Result<Vec<EpisodeLog>> {
        let path = self.path(EPISODES);
        let file = File::open(&path).with_context(|| format!("reading {}", path.display()))?;
        read_jsonl(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
    }
}

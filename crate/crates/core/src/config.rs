//! Flat `key = value` run configuration.
//!
//! Keys follow the simulation notation (`z`, `n_t`, `trsh`, `p_page`,
//! `tests_p`, `price_p`, `judg_n`, `papers_n`, `in_prop`, `fp_cost`,
//! `fn_cost`) plus a handful of extras documented on [`RunConfig`]. Blank
//! lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::analytic::Mode;
use crate::error::{Error, Result};
use crate::model::{PageLayout, ScreeningProblem, TaskParameters, WorkerPopulation};
use crate::optimizer::SearchSpace;
use crate::simulator::{QuizRegime, SimulationConfig};

const REQUIRED: [&str; 8] = [
    "z", "n_t", "judg_n", "papers_n", "in_prop", "fp_cost", "fn_cost", "price_p",
];

const KNOWN: [&str; 36] = [
    "z",
    "n_t",
    "trsh",
    "p_page",
    "tests_p",
    "price_p",
    "judg_n",
    "papers_n",
    "in_prop",
    "fp_cost",
    "fn_cost",
    "j_t",
    "n_l",
    "mode",
    "seed",
    "replications",
    "budget",
    "budgets",
    "baseline_fraction",
    "rounds",
    "n_t_min",
    "n_t_max",
    "j_min",
    "j_max",
    "dataset",
    "smart_share",
    "smart_acc",
    "honest_low",
    "honest_high",
    "easy_delta",
    "easy_fraction",
    "quiz_regime",
    "max_workers",
    "quiz_samples",
    "validation_papers",
    "validation_replications",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Cheater fraction.
    pub z: f64,
    pub n_t: u32,
    pub trsh: f64,
    pub p_page: u32,
    pub tests_p: u32,
    /// Price per label.
    pub price_p: f64,
    /// Trusted judgments per paper.
    pub judg_n: u32,
    pub papers_n: usize,
    pub in_prop: f64,
    /// Cost of a false inclusion.
    pub fp_cost: f64,
    /// Cost of a false exclusion.
    pub fn_cost: f64,
    /// Exclusion threshold; defaults to a strict majority of `judg_n`.
    pub j_t: u32,
    pub n_l: u32,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub replications: u32,
    pub budget: Option<f64>,
    pub budgets: Vec<f64>,
    pub baseline_fraction: f64,
    pub rounds: u32,
    pub n_t_min: u32,
    pub n_t_max: u32,
    pub j_min: u32,
    pub j_max: u32,
    pub dataset: Option<PathBuf>,
    pub smart_share: f64,
    pub smart_acc: f64,
    pub honest_low: f64,
    pub honest_high: f64,
    pub easy_delta: f64,
    pub easy_fraction: f64,
    pub quiz_regime: QuizRegime,
    pub max_workers: u64,
    pub quiz_samples: u64,
    pub validation_papers: usize,
    /// Replications behind the end-to-end loss check of `validate`.
    pub validation_replications: u32,
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| Error::Config {
                line: *line,
                key: key.to_string(),
                message: format!("cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

impl RunConfig {
    /// Reads and parses a configuration file.
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN.contains(&key) {
                return Err(Error::Config {
                    line,
                    key: key.to_string(),
                    message: "unknown key".into(),
                });
            }
            if map
                .insert(key.to_string(), (line, value.to_string()))
                .is_some()
            {
                return Err(Error::Config {
                    line,
                    key: key.to_string(),
                    message: "key given twice".into(),
                });
            }
        }
        let e = Entries { map };
        for key in REQUIRED {
            if e.raw(key).is_none() {
                return Err(Error::MissingKey(key.to_string()));
            }
        }
        let judg_n: u32 = e.require("judg_n")?;
        let budgets = match e.raw("budgets") {
            None => Vec::new(),
            Some((line, v)) => parse_list(v).map_err(|m| Error::Config {
                line: *line,
                key: "budgets".into(),
                message: m,
            })?,
        };
        let cfg = RunConfig {
            z: e.require("z")?,
            n_t: e.require("n_t")?,
            trsh: e.or("trsh", 0.5)?,
            p_page: e.or("p_page", 5)?,
            tests_p: e.or("tests_p", 0)?,
            price_p: e.require("price_p")?,
            judg_n,
            papers_n: e.require("papers_n")?,
            in_prop: e.require("in_prop")?,
            fp_cost: e.require("fp_cost")?,
            fn_cost: e.require("fn_cost")?,
            j_t: e.or("j_t", judg_n / 2 + 1)?,
            n_l: e.or("n_l", TaskParameters::DEFAULT_LABELS_PER_WORKER)?,
            mode: e.or("mode", Mode::Exact)?,
            seed: e.get("seed")?,
            replications: e.or("replications", 1)?,
            budget: e.get("budget")?,
            budgets,
            baseline_fraction: e.or("baseline_fraction", 0.1)?,
            rounds: e.or("rounds", 2)?,
            n_t_min: e.or("n_t_min", 0)?,
            n_t_max: e.or("n_t_max", 10)?,
            j_min: e.or("j_min", 1)?,
            j_max: e.or("j_max", 9)?,
            dataset: e.get::<String>("dataset")?.map(PathBuf::from),
            smart_share: e.or("smart_share", 0.0)?,
            smart_acc: e.or("smart_acc", 0.6)?,
            honest_low: e.or("honest_low", 0.5)?,
            honest_high: e.or("honest_high", 1.0)?,
            easy_delta: e.or("easy_delta", 0.0)?,
            easy_fraction: e.or("easy_fraction", 0.5)?,
            quiz_regime: e.or("quiz_regime", QuizRegime::AllCorrect)?,
            max_workers: e.or("max_workers", SimulationConfig::DEFAULT_MAX_WORKERS)?,
            quiz_samples: e.or("quiz_samples", 100_000)?,
            validation_papers: e.or("validation_papers", 1000)?,
            validation_replications: e.or("validation_replications", 50)?,
        };
        cfg.validate(&e)?;
        Ok(cfg)
    }

    fn validate(&self, e: &Entries) -> Result<()> {
        let at = |key: &str, err: Error| match err {
            Error::InvalidParameter { value, reason, .. } => Error::Config {
                line: e.raw(key).map_or(0, |r| r.0),
                key: key.to_string(),
                message: format!("{value}: {reason}"),
            },
            other => other,
        };
        self.population().map_err(|err| at("z", err))?;
        self.problem().map_err(|err| at("papers_n", err))?;
        self.task_params().map_err(|err| at("j_t", err))?;
        self.search_space()
            .validate()
            .map_err(|err| at("j_max", err))?;
        if !(self.fp_cost > 0.0 && self.fn_cost > 0.0) {
            return Err(Error::Config {
                line: e.raw("fp_cost").map_or(0, |r| r.0),
                key: "fp_cost".into(),
                message: "fp_cost and fn_cost must be positive".into(),
            });
        }
        for (key, n) in [
            ("replications", self.replications),
            ("validation_replications", self.validation_replications),
        ] {
            if n == 0 {
                return Err(Error::Config {
                    line: e.raw(key).map_or(0, |r| r.0),
                    key: key.into(),
                    message: "must be at least 1".into(),
                });
            }
        }
        Ok(())
    }

    /// False-exclusion cost in units of false-inclusion cost.
    pub fn cost_ratio(&self) -> f64 {
        self.fn_cost / self.fp_cost
    }

    pub fn population(&self) -> Result<WorkerPopulation> {
        let p = WorkerPopulation {
            cheater_fraction: self.z,
            smart_cheater_share: self.smart_share,
            smart_cheater_accuracy: self.smart_acc,
            honest_accuracy_low: self.honest_low,
            honest_accuracy_high: self.honest_high,
            easy_delta: self.easy_delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn problem(&self) -> Result<ScreeningProblem> {
        ScreeningProblem::new(self.papers_n, self.in_prop, self.cost_ratio(), self.price_p)
    }

    pub fn layout(&self) -> PageLayout {
        PageLayout {
            papers_per_page: self.p_page,
            tests_per_page: self.tests_p,
            trust_threshold: self.trsh,
        }
    }

    pub fn task_params(&self) -> Result<TaskParameters> {
        let p = TaskParameters {
            n_tests: self.n_t,
            judgments_per_paper: self.judg_n,
            exclusion_threshold: self.j_t,
            labels_per_worker: self.n_l,
            ..TaskParameters::from_layout(self.layout())
        };
        p.validate()?;
        Ok(p)
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace {
            n_tests: self.n_t_min..=self.n_t_max,
            judgments: self.j_min..=self.j_max,
            mode: self.mode,
            labels_per_worker: self.n_l,
            layout: self.layout(),
        }
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::MissingKey("seed".into()))
    }

    pub fn require_budget(&self) -> Result<f64> {
        self.budget
            .ok_or_else(|| Error::MissingKey("budget".into()))
    }

    /// Serializes every key, one per line, in a fixed order.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("z", self.z.to_string());
        put("n_t", self.n_t.to_string());
        put("trsh", self.trsh.to_string());
        put("p_page", self.p_page.to_string());
        put("tests_p", self.tests_p.to_string());
        put("price_p", self.price_p.to_string());
        put("judg_n", self.judg_n.to_string());
        put("papers_n", self.papers_n.to_string());
        put("in_prop", self.in_prop.to_string());
        put("fp_cost", self.fp_cost.to_string());
        put("fn_cost", self.fn_cost.to_string());
        put("j_t", self.j_t.to_string());
        put("n_l", self.n_l.to_string());
        put("mode", self.mode.to_string());
        if let Some(seed) = self.seed {
            put("seed", seed.to_string());
        }
        put("replications", self.replications.to_string());
        if let Some(b) = self.budget {
            put("budget", b.to_string());
        }
        if !self.budgets.is_empty() {
            let list: Vec<String> = self.budgets.iter().map(f64::to_string).collect();
            put("budgets", list.join(","));
        }
        put("baseline_fraction", self.baseline_fraction.to_string());
        put("rounds", self.rounds.to_string());
        put("n_t_min", self.n_t_min.to_string());
        put("n_t_max", self.n_t_max.to_string());
        put("j_min", self.j_min.to_string());
        put("j_max", self.j_max.to_string());
        if let Some(d) = &self.dataset {
            put("dataset", d.display().to_string());
        }
        put("smart_share", self.smart_share.to_string());
        put("smart_acc", self.smart_acc.to_string());
        put("honest_low", self.honest_low.to_string());
        put("honest_high", self.honest_high.to_string());
        put("easy_delta", self.easy_delta.to_string());
        put("easy_fraction", self.easy_fraction.to_string());
        put("quiz_regime", self.quiz_regime.to_string());
        put("max_workers", self.max_workers.to_string());
        put("quiz_samples", self.quiz_samples.to_string());
        put("validation_papers", self.validation_papers.to_string());
        put(
            "validation_replications",
            self.validation_replications.to_string(),
        );
        s
    }
}

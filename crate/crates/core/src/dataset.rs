//! Paper datasets and CSV reports.
//!
//! Formats (UTF-8, comma separated, header required):
//!
//! ```text
//! dataset:  id,gold_label,difficulty,title,abstract
//! outcome:  paper_id,decision,gold_label,correct
//! curve:    budget,n_tests,judgments,exclusion_threshold,expected_loss,expected_price,feasible
//! ```
//!
//! `title` and `abstract` are optional columns and may be empty. Infeasible
//! curve rows leave the parameter, loss and price cells empty.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result, RowIssue};
use crate::model::{Decisions, Difficulty, Label, PaperItem, TaskParameters};
use crate::optimizer::{Choice, TradeoffPoint};
use crate::simulator::stream_rng;

pub const DATASET_HEADER: [&str; 5] = ["id", "gold_label", "difficulty", "title", "abstract"];
pub const OUTCOME_HEADER: [&str; 4] = ["paper_id", "decision", "gold_label", "correct"];
pub const CURVE_HEADER: [&str; 7] = [
    "budget",
    "n_tests",
    "judgments",
    "exclusion_threshold",
    "expected_loss",
    "expected_price",
    "feasible",
];

/// Replication key for dataset synthesis streams.
const DATASET_STREAM_KEY: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperDataset {
    pub items: Vec<PaperItem>,
    pub source: String,
    /// Share of items whose gold label is include.
    pub theta_empirical: f64,
}

impl PaperDataset {
    pub fn new(items: Vec<PaperItem>, source: impl Into<String>) -> Self {
        let included = items
            .iter()
            .filter(|p| p.gold_label == Label::Include)
            .count();
        let theta_empirical = if items.is_empty() {
            0.0
        } else {
            included as f64 / items.len() as f64
        };
        PaperDataset {
            items,
            source: source.into(),
            theta_empirical,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn gold(&self) -> BTreeMap<String, Label> {
        crate::model::gold_labels(&self.items)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads and validates a dataset CSV, reporting every bad row at once.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<PaperDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    let column: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let missing: Vec<&str> = DATASET_HEADER[..3]
        .iter()
        .copied()
        .filter(|h| !column.contains_key(h))
        .collect();
    if !missing.is_empty() {
        return Err(Error::InvalidRows {
            path: path.to_path_buf(),
            issues: vec![RowIssue {
                line: 1,
                message: format!("header lacks column(s): {}", missing.join(", ")),
            }],
        });
    }

    let mut items = Vec::new();
    let mut issues = Vec::new();
    let mut first_line: HashMap<String, u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |name: &str| column.get(name).and_then(|&i| record.get(i)).unwrap_or("");
        let id = field("id");
        if id.is_empty() {
            issues.push(RowIssue {
                line,
                message: "empty id".into(),
            });
            continue;
        }
        let gold = field("gold_label").parse::<Label>();
        let difficulty = field("difficulty").parse::<Difficulty>();
        let (gold, difficulty) = match (gold, difficulty) {
            (Ok(g), Ok(d)) => (g, d),
            (g, d) => {
                let message = [g.err(), d.err()]
                    .into_iter()
                    .flatten()
                    .collect::<Vec<_>>()
                    .join("; ");
                issues.push(RowIssue { line, message });
                continue;
            }
        };
        if let Some(&first) = first_line.get(id) {
            issues.push(RowIssue {
                line,
                message: format!(
                    "duplicate id `{id}` (first on line {first}, again on line {line})"
                ),
            });
            continue;
        }
        first_line.insert(id.to_string(), line);
        let optional = |name: &str| {
            Some(field(name))
                .filter(|s| !s.is_empty())
                .map(String::from)
        };
        items.push(PaperItem {
            id: id.to_string(),
            gold_label: gold,
            difficulty,
            title: optional("title"),
            abstract_text: optional("abstract"),
        });
    }
    if !issues.is_empty() {
        return Err(Error::InvalidRows {
            path: path.to_path_buf(),
            issues,
        });
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset(path.to_path_buf()));
    }
    Ok(PaperDataset::new(items, path.display().to_string()))
}

pub fn write_dataset(dataset: &PaperDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(DATASET_HEADER).map_err(csv_err(path))?;
    for p in &dataset.items {
        w.write_record([
            p.id.as_str(),
            p.gold_label.as_str(),
            p.difficulty.as_str(),
            p.title.as_deref().unwrap_or(""),
            p.abstract_text.as_deref().unwrap_or(""),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Synthetic dataset: labels include with probability `in_prop`, items
/// easy with probability `easy_fraction`.
pub fn synthesize_dataset(
    papers_n: usize,
    in_prop: f64,
    easy_fraction: f64,
    seed: u64,
) -> Result<PaperDataset> {
    if papers_n == 0 {
        return Err(invalid("papers_n", 0, "must be at least 1"));
    }
    check_probability("in_prop", in_prop)?;
    check_probability("easy_fraction", easy_fraction)?;
    let mut rng = stream_rng(seed, DATASET_STREAM_KEY, 0);
    let items = (0..papers_n)
        .map(|i| {
            let gold = if rng.gen::<f64>() < in_prop {
                Label::Include
            } else {
                Label::Exclude
            };
            let difficulty = if rng.gen::<f64>() < easy_fraction {
                Difficulty::Easy
            } else {
                Difficulty::Average
            };
            PaperItem::new(format!("p{i}"), gold, difficulty)
        })
        .collect();
    Ok(PaperDataset::new(items, format!("synthetic(seed={seed})")))
}

/// Writes one row per decided paper, in id order.
pub fn write_outcome(
    decisions: &Decisions,
    gold: &BTreeMap<String, Label>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(OUTCOME_HEADER).map_err(csv_err(path))?;
    for (id, decision) in decisions {
        let truth = gold.get(id).ok_or_else(|| Error::MissingGold(id.clone()))?;
        w.write_record([
            id.as_str(),
            decision.as_str(),
            truth.as_str(),
            if decision == truth { "true" } else { "false" },
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_curve(points: &[TradeoffPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(CURVE_HEADER).map_err(csv_err(path))?;
    for p in points {
        let row = match p.choice {
            Some(c) => [
                p.budget.to_string(),
                c.params.n_tests.to_string(),
                c.params.judgments_per_paper.to_string(),
                c.params.exclusion_threshold.to_string(),
                c.expected_loss_per_paper.to_string(),
                c.expected_price_per_paper.to_string(),
                "true".to_string(),
            ],
            None => [
                p.budget.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "false".to_string(),
            ],
        };
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a curve CSV. Only the searched triple is stored in the file, so
/// the other task parameters come from `template`.
pub fn read_curve(path: impl AsRef<Path>, template: &TaskParameters) -> Result<Vec<TradeoffPoint>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::InvalidRows {
            path: path.to_path_buf(),
            issues: vec![RowIssue { line, message }],
        };
        let get = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            get(i)
                .parse::<f64>()
                .map_err(|e| bad(format!("column {}: {e}", CURVE_HEADER[i])))
        };
        let int = |i: usize| -> Result<u32> {
            get(i)
                .parse::<u32>()
                .map_err(|e| bad(format!("column {}: {e}", CURVE_HEADER[i])))
        };
        let budget = num(0)?;
        let choice = match get(6) {
            "true" => Some(Choice {
                params: TaskParameters {
                    n_tests: int(1)?,
                    judgments_per_paper: int(2)?,
                    exclusion_threshold: int(3)?,
                    ..*template
                },
                expected_loss_per_paper: num(4)?,
                expected_price_per_paper: num(5)?,
            }),
            "false" => None,
            other => return Err(bad(format!("feasible must be true|false, got `{other}`"))),
        };
        points.push(TradeoffPoint { budget, choice });
    }
    Ok(points)
}

/// Writes arbitrary rows under a header.
pub fn write_rows<I, R>(path: impl AsRef<Path>, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

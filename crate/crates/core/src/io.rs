//! Reading rating files and writing fitted parameters and reports.
//!
//! Matrices are stored as plain text: a `# rows cols` header followed by one
//! whitespace-separated line per row. Floats use Rust's shortest round-trip
//! formatting, so reading a file back reproduces the in-memory values exactly.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, Array3};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Bm2Error, Result};
use crate::model::{BlockArray, Rating, RatingDataset, RatingScale};
use crate::predict::{EvalReport, MembershipEstimates};

/// A rating file with dense indices and the original identifiers.
#[derive(Debug, Clone)]
pub struct LoadedRatings {
    pub data: RatingDataset,
    /// `user_ids[i]` is the raw identifier of dense user `i`.
    pub user_ids: Vec<u64>,
    pub item_ids: Vec<u64>,
    /// Number of lines that repeated an earlier (user, item) pair.
    pub duplicates: usize,
}

/// Load a MovieLens `u.data` style file: `user item rating [timestamp]`,
/// separated by tabs or spaces.
///
/// Identifiers are mapped to dense indices in increasing raw-id order and the
/// rating scale is the sorted set of distinct rating values. A repeated
/// (user, item) pair keeps the last rating.
pub fn load_movielens(path: impl AsRef<Path>) -> Result<LoadedRatings> {
    let path = path.as_ref();
    let raw = read_raw_file(path)?;
    let (mut sets, user_ids, item_ids) = index_raw(&[&raw])?;
    Ok(LoadedRatings { data: sets.remove(0), user_ids, item_ids, duplicates: raw.duplicates })
}

pub fn parse_movielens(reader: impl BufRead, path: &Path) -> Result<LoadedRatings> {
    let raw = read_raw(reader, path)?;
    let (mut sets, user_ids, item_ids) = index_raw(&[&raw])?;
    Ok(LoadedRatings { data: sets.remove(0), user_ids, item_ids, duplicates: raw.duplicates })
}

/// Load a training file and a test file over one shared index space and
/// rating scale. The returned ids cover the union of both files.
pub fn load_movielens_pair(train: impl AsRef<Path>, test: impl AsRef<Path>) -> Result<(LoadedRatings, RatingDataset)> {
    let train_raw = read_raw_file(train.as_ref())?;
    let test_raw = read_raw_file(test.as_ref())?;
    let (mut sets, user_ids, item_ids) = index_raw(&[&train_raw, &test_raw])?;
    let test = sets.pop().expect("two sets");
    let data = sets.pop().expect("two sets");
    Ok((LoadedRatings { data, user_ids, item_ids, duplicates: train_raw.duplicates }, test))
}

struct RawRatings {
    path: PathBuf,
    rows: Vec<(u64, u64, f64)>,
    duplicates: usize,
}

fn read_raw_file(path: &Path) -> Result<RawRatings> {
    let file = File::open(path).map_err(|e| Bm2Error::io(path, e))?;
    read_raw(BufReader::new(file), path)
}

fn read_raw(reader: impl BufRead, path: &Path) -> Result<RawRatings> {
    let err = |line: usize, message: String| Bm2Error::Parse { path: path.to_path_buf(), line, message };
    let mut rows: Vec<(u64, u64, f64)> = Vec::new();
    let mut position: HashMap<(u64, u64), usize> = HashMap::new();
    let mut duplicates = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Bm2Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(lineno, format!("expected 4 fields (user, item, rating, timestamp), found {}", fields.len())));
        }
        let user: u64 = fields[0].parse().map_err(|_| err(lineno, format!("bad user id {:?}", fields[0])))?;
        let item: u64 = fields[1].parse().map_err(|_| err(lineno, format!("bad item id {:?}", fields[1])))?;
        let rating: f64 = fields[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(lineno, format!("bad rating {:?}", fields[2])))?;
        if let Some(&p) = position.get(&(user, item)) {
            log::warn!("{}:{lineno}: duplicate rating for user {user}, item {item}; keeping the last", path.display());
            duplicates += 1;
            rows[p].2 = rating;
        } else {
            position.insert((user, item), rows.len());
            rows.push((user, item, rating));
        }
    }
    if rows.is_empty() {
        return Err(Bm2Error::InvalidDataset(format!("{}: no ratings", path.display())));
    }
    Ok(RawRatings { path: path.to_path_buf(), rows, duplicates })
}

fn index_raw(sets: &[&RawRatings]) -> Result<(Vec<RatingDataset>, Vec<u64>, Vec<u64>)> {
    let all = || sets.iter().flat_map(|s| s.rows.iter());
    let user_ids: Vec<u64> = all().map(|r| r.0).collect::<BTreeSet<_>>().into_iter().collect();
    let item_ids: Vec<u64> = all().map(|r| r.1).collect::<BTreeSet<_>>().into_iter().collect();
    let mut values: Vec<f64> = all().map(|r| r.2).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let scale = RatingScale::new(values).map_err(|e| match sets {
        [one] => Bm2Error::InvalidDataset(format!("{}: {e}", one.path.display())),
        _ => e,
    })?;
    let user_index: HashMap<u64, usize> = user_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let item_index: HashMap<u64, usize> = item_ids.iter().enumerate().map(|(j, &id)| (id, j)).collect();
    let datasets = sets
        .iter()
        .map(|set| {
            let ratings = set
                .rows
                .iter()
                .map(|&(u, i, v)| {
                    Rating::new(user_index[&u], item_index[&i], scale.level_of(v).expect("value is in the scale"))
                })
                .collect();
            RatingDataset::new(user_ids.len(), item_ids.len(), scale.clone(), ratings)
        })
        .collect::<Result<_>>()?;
    Ok((datasets, user_ids, item_ids))
}

/// Write ratings in the same tab-separated layout, with a zero timestamp.
pub fn write_ratings(path: impl AsRef<Path>, data: &RatingDataset, user_ids: Option<&[u64]>, item_ids: Option<&[u64]>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Bm2Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Bm2Error::io(path, e);
    for r in data.ratings() {
        let u = user_ids.map_or(r.user as u64 + 1, |ids| ids[r.user]);
        let i = item_ids.map_or(r.item as u64 + 1, |ids| ids[r.item]);
        writeln!(w, "{u}\t{i}\t{}\t0", data.value_of(r)).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Write the dense-index to raw-id mapping as `index,id` CSV.
pub fn write_id_map(path: impl AsRef<Path>, ids: &[u64]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let wrap = |e: csv::Error| csv_error(path, e);
    w.write_record(["index", "id"]).map_err(wrap)?;
    for (i, id) in ids.iter().enumerate() {
        w.write_record([i.to_string(), id.to_string()]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Bm2Error::io(path, e))
}

pub fn read_id_map(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut ids = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let line = n + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let parse = |col: usize| record.get(col).and_then(|v| v.trim().parse::<u64>().ok());
        match (parse(0), parse(1)) {
            (Some(idx), Some(id)) if idx as usize == ids.len() => ids.push(id),
            _ => {
                return Err(Bm2Error::Parse { path: path.to_path_buf(), line, message: "expected `index,id` in order".into() })
            }
        }
    }
    Ok(ids)
}

/// Random exact-count split: `round(train_fraction * len)` ratings go to the
/// training set, the rest are hidden.
pub fn split_train_hidden(data: &RatingDataset, train_fraction: f64, seed: u64) -> Result<(RatingDataset, RatingDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Bm2Error::InvalidConfig(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    let n = data.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; n];
    for idx in index::sample(&mut rng, n, n_train) {
        in_train[idx] = true;
    }
    let (train, hidden): (Vec<usize>, Vec<usize>) = (0..n).partition(|&idx| in_train[idx]);
    Ok((data.subset(&train), data.subset(&hidden)))
}

fn format_matrix(m: &Array2<f64>) -> String {
    let mut out = format!("# {} {}\n", m.nrows(), m.ncols());
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Array2<f64>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix(m)).map_err(|e| Bm2Error::io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Bm2Error::io(path, e))?;
    let mut blocks = parse_blocks(&text, path)?;
    if blocks.len() != 1 {
        return Err(Bm2Error::Parse { path: path.to_path_buf(), line: 1, message: "expected one matrix".into() });
    }
    Ok(blocks.remove(0))
}

/// μ as one `# K L` matrix per rating level, in level order.
pub fn write_block_array(path: impl AsRef<Path>, mu: &BlockArray) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for s in 0..mu.levels() {
        let _ = writeln!(out, "# level {}", s + 1);
        let slice = mu.as_array().index_axis(ndarray::Axis(2), s).to_owned();
        out.push_str(&format_matrix(&slice));
    }
    std::fs::write(path, out).map_err(|e| Bm2Error::io(path, e))
}

pub fn read_block_array(path: impl AsRef<Path>) -> Result<BlockArray> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Bm2Error::io(path, e))?;
    let blocks = parse_blocks(&text, path)?;
    let Some(first) = blocks.first() else {
        return Err(Bm2Error::Parse { path: path.to_path_buf(), line: 1, message: "no matrices".into() });
    };
    let (k, l) = first.dim();
    if blocks.iter().any(|b| b.dim() != (k, l)) {
        return Err(Bm2Error::Parse { path: path.to_path_buf(), line: 1, message: "level matrices differ in shape".into() });
    }
    BlockArray::new(Array3::from_shape_fn((k, l, blocks.len()), |(a, b, s)| blocks[s][[a, b]]))
}

/// Split text into matrices introduced by `# rows cols` headers; other
/// comment lines are ignored.
fn parse_blocks(text: &str, path: &Path) -> Result<Vec<Array2<f64>>> {
    let err = |line: usize, message: String| Bm2Error::Parse { path: path.to_path_buf(), line, message };
    let mut blocks = Vec::new();
    let mut current: Option<(usize, usize, Vec<f64>, usize)> = None;
    let finish = |cur: Option<(usize, usize, Vec<f64>, usize)>, blocks: &mut Vec<Array2<f64>>| -> Result<()> {
        if let Some((r, c, vals, header)) = cur {
            if vals.len() != r * c {
                return Err(err(header, format!("matrix declared {r} x {c} but has {} values", vals.len())));
            }
            blocks.push(Array2::from_shape_vec((r, c), vals).expect("length checked"));
        }
        Ok(())
    };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let dims: Vec<&str> = rest.split_whitespace().collect();
            if let [r, c] = dims[..] {
                if let (Ok(r), Ok(c)) = (r.parse(), c.parse()) {
                    finish(current.take(), &mut blocks)?;
                    current = Some((r, c, Vec::with_capacity(r * c), lineno));
                }
            }
            continue;
        }
        let Some((_, c, vals, _)) = current.as_mut() else {
            return Err(err(lineno, "data before a '# rows cols' header".into()));
        };
        let before = vals.len();
        for tok in line.split_whitespace() {
            vals.push(tok.parse().map_err(|_| err(lineno, format!("not a number: {tok:?}")))?);
        }
        if vals.len() - before != *c {
            return Err(err(lineno, format!("expected {c} values, found {}", vals.len() - before)));
        }
    }
    finish(current, &mut blocks)?;
    Ok(blocks)
}

pub fn write_memberships(dir: impl AsRef<Path>, est: &MembershipEstimates) -> Result<()> {
    let dir = dir.as_ref();
    write_matrix(dir.join("pi_users.txt"), &est.pi_u)?;
    write_matrix(dir.join("pi_items.txt"), &est.pi_i)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Bm2Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Bm2Error::io(path, io),
        other => Bm2Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_elbo_trace(path: impl AsRef<Path>, trace: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let wrap = |e: csv::Error| csv_error(path, e);
    w.write_record(["iteration", "elbo"]).map_err(wrap)?;
    for (t, v) in trace.iter().enumerate() {
        w.write_record([t.to_string(), v.to_string()]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Bm2Error::io(path, e))
}

/// One row of a metrics report. `ar` is absent for methods whose predictions
/// are not on the rating scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub method: String,
    pub report: EvalReport,
    pub ar_applicable: bool,
}

impl MetricsRow {
    pub fn new(method: impl Into<String>, report: EvalReport) -> Self {
        MetricsRow { method: method.into(), report, ar_applicable: true }
    }

    pub fn without_ar(mut self) -> Self {
        self.ar_applicable = false;
        self
    }
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricsRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let wrap = |e: csv::Error| csv_error(path, e);
    w.write_record(["method", "mae", "mse", "ar", "n"]).map_err(wrap)?;
    for row in rows {
        let r = &row.report;
        let ar = if row.ar_applicable { r.ar.to_string() } else { String::new() };
        w.write_record([row.method.clone(), r.mae.to_string(), r.mse.to_string(), ar, r.n_evaluated.to_string()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| Bm2Error::io(path, e))
}

/// Render rows as a fixed-width text table.
pub fn format_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let parts: Vec<String> =
            cells.zip(&widths).enumerate().map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") }).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied(), &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        line(&mut row.iter().map(String::as_str), &mut out);
    }
    out
}

pub fn format_metrics_table(rows: &[MetricsRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let r = &row.report;
            vec![
                row.method.clone(),
                format!("{:.4}", r.mae),
                format!("{:.4}", r.mse),
                if row.ar_applicable { format!("{:.4}", r.ar) } else { "-".into() },
                r.n_evaluated.to_string(),
            ]
        })
        .collect();
    format_table(&["method", "MAE", "MSE", "AR", "n"], &cells)
}

/// Size and mean observed rating of one hard cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub cluster: usize,
    pub size: usize,
    /// Mean value of the ratings given (users) or received (items) by the
    /// members; `NaN` for a cluster whose members have no ratings.
    pub avg_rating: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    pub users: Vec<ClusterStats>,
    pub items: Vec<ClusterStats>,
}

/// Hard-assign every user and item to its largest membership component and
/// summarise each cluster over the ratings in `data`.
pub fn cluster_summary(est: &MembershipEstimates, data: &RatingDataset) -> ClusterSummary {
    let user_of = est.hard_user_clusters();
    let item_of = est.hard_item_clusters();
    let tally = |n_clusters: usize, labels: &[usize], key: fn(&Rating) -> usize| {
        let mut size = vec![0usize; n_clusters];
        let mut sum = vec![0.0; n_clusters];
        let mut count = vec![0usize; n_clusters];
        for &c in labels {
            size[c] += 1;
        }
        for r in data.ratings() {
            let c = labels[key(r)];
            sum[c] += data.value_of(r);
            count[c] += 1;
        }
        (0..n_clusters)
            .map(|c| ClusterStats {
                cluster: c,
                size: size[c],
                avg_rating: if count[c] > 0 { sum[c] / count[c] as f64 } else { f64::NAN },
            })
            .collect()
    };
    ClusterSummary {
        users: tally(est.pi_u.ncols(), &user_of, |r| r.user),
        items: tally(est.pi_i.ncols(), &item_of, |r| r.item),
    }
}

impl ClusterSummary {
    pub fn to_table(&self) -> String {
        let rows = self.users.len().max(self.items.len());
        let cell = |stats: &[ClusterStats], idx: usize| -> [String; 3] {
            match stats.get(idx) {
                Some(s) => [(s.cluster + 1).to_string(), s.size.to_string(), format!("{:.2}", s.avg_rating)],
                None => Default::default(),
            }
        };
        let cells: Vec<Vec<String>> = (0..rows)
            .map(|idx| {
                let mut row = cell(&self.users, idx).to_vec();
                row.extend(cell(&self.items, idx));
                row
            })
            .collect();
        format_table(&["user cluster", "size", "avg rating", "item cluster", "size", "avg rating"], &cells)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv_writer(path)?;
        let wrap = |e: csv::Error| csv_error(path, e);
        w.write_record(["side", "cluster", "size", "avg_rating"]).map_err(wrap)?;
        for (side, stats) in [("user", &self.users), ("item", &self.items)] {
            for s in stats {
                w.write_record([side.to_string(), (s.cluster + 1).to_string(), s.size.to_string(), s.avg_rating.to_string()])
                    .map_err(wrap)?;
            }
        }
        w.flush().map_err(|e| Bm2Error::io(path, e))
    }
}

/// Bipartite edge list `source,target,rating` with nodes named `u<id>` and
/// `i<id>`, using raw identifiers when given.
pub fn write_edge_list(
    path: impl AsRef<Path>,
    data: &RatingDataset,
    user_ids: Option<&[u64]>,
    item_ids: Option<&[u64]>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Bm2Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Bm2Error::io(path, e);
    writeln!(w, "source,target,rating").map_err(io)?;
    for r in data.ratings() {
        let u = user_ids.map_or(r.user as u64, |ids| ids[r.user]);
        let i = item_ids.map_or(r.item as u64, |ids| ids[r.item]);
        writeln!(w, "u{u},i{i},{}", data.value_of(r)).map_err(io)?;
    }
    w.flush().map_err(io)
}

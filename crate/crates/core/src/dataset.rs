//! Rating data: loading, validation, filtering and the experiment split.
//!
//! Three input formats are accepted:
//!
//! * `movielens_csv`: header `userId,movieId,rating,timestamp`, one rating per
//!   row, as in the MovieLens releases.
//! * `tsv`: `user<TAB>item<TAB>rating<TAB>timestamp` without a header
//!   (a leading `userId` header line is tolerated).
//! * `jsonl`: one object per line,
//!   `{"user": "u1", "item": 42, "rating": 4.5, "timestamp": 1112486027}`;
//!   ids may be strings or integers.
//!
//! Genre metadata uses the MovieLens `movies.csv` layout:
//! `movieId,title,genres` with `|`-separated labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{Interner, ItemId, UserId};
use crate::profile::Profile;
use crate::scalar::Scalar;
use crate::seeding::{self, stream};

const STEP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale<T> {
    pub min: T,
    pub max: T,
    /// Rating granularity; zero means continuous.
    pub step: T,
}

impl<T: Scalar> Scale<T> {
    pub fn new(min: T, max: T, step: T) -> Result<Self> {
        if min >= max || step < T::zero() || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rating scale ({min}, {max}, {step}) must satisfy min < max and step >= 0"
            )));
        }
        Ok(Self { min, max, step })
    }

    /// MovieLens scale: 0.5 to 5.0 in half stars.
    pub fn movielens() -> Self {
        Self {
            min: T::of(0.5),
            max: T::of(5.0),
            step: T::of(0.5),
        }
    }

    pub fn contains(&self, value: T) -> bool {
        let (v, lo, hi) = (value.as_f64(), self.min.as_f64(), self.max.as_f64());
        if !(v >= lo - STEP_TOLERANCE && v <= hi + STEP_TOLERANCE) {
            return false;
        }
        let step = self.step.as_f64();
        if step == 0.0 {
            return true;
        }
        let k = (v - lo) / step;
        (k - k.round()).abs() < STEP_TOLERANCE
    }

    pub fn clamp(&self, value: T) -> T {
        value.max(self.min).min(self.max)
    }

    /// Rounds onto the step grid (no-op for continuous scales), then clamps.
    pub fn quantize(&self, value: T) -> T {
        if self.step > T::zero() {
            let k = ((value - self.min) / self.step).round();
            self.clamp(self.min + k * self.step)
        } else {
            self.clamp(value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rating<T> {
    pub user: UserId,
    pub item: ItemId,
    pub value: T,
    pub timestamp: i64,
}

pub type GenreMap = BTreeMap<ItemId, BTreeSet<String>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    MovielensCsv,
    Tsv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "movielens_csv" | "csv" => Ok(Format::MovielensCsv),
            "tsv" => Ok(Format::Tsv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(Error::InvalidParameter(format!(
                "unknown dataset format `{other}` (expected movielens_csv, tsv or jsonl)"
            ))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::MovielensCsv => "movielens_csv",
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        })
    }
}

/// Counts gathered while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub rows: usize,
    /// Rows discarded because a later rating for the same (user, item) won.
    pub duplicates: usize,
}

/// An immutable rating collection. Ratings are sorted by (user, item) and
/// every (user, item) pair occurs once.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsDataset<T> {
    ratings: Vec<Rating<T>>,
    scale: Scale<T>,
    users: Interner,
    items: Interner,
    genres: Option<GenreMap>,
}

struct RawRow {
    user: String,
    item: String,
    value: f64,
    timestamp: i64,
    line: usize,
}

impl<T: Scalar> RatingsDataset<T> {
    /// Builds a dataset from raw rows, resolving duplicate pairs by keeping
    /// the latest timestamp (the later row on equal timestamps).
    pub fn from_raw<I, U, V>(rows: I, scale: Scale<T>) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (U, V, T, i64)>,
        U: Into<String>,
        V: Into<String>,
    {
        let rows: Vec<RawRow> = rows
            .into_iter()
            .enumerate()
            .map(|(line, (u, i, v, ts))| RawRow {
                user: u.into(),
                item: i.into(),
                value: v.as_f64(),
                timestamp: ts,
                line: line + 1,
            })
            .collect();
        for row in &rows {
            if !scale.contains(T::of(row.value)) {
                return Err(Error::InvalidParameter(format!(
                    "rating {} of row {} is outside the scale [{}, {}] step {}",
                    row.value, row.line, scale.min, scale.max, scale.step
                )));
            }
        }
        Self::assemble(rows, scale)
    }

    fn assemble(rows: Vec<RawRow>, scale: Scale<T>) -> Result<(Self, LoadReport)> {
        if rows.is_empty() {
            return Err(Error::Empty("rating input".into()));
        }
        let users = Interner::from_names(rows.iter().map(|r| r.user.as_str()));
        let items = Interner::from_names(rows.iter().map(|r| r.item.as_str()));
        let mut keyed: Vec<(Rating<T>, usize)> = rows
            .iter()
            .map(|r| {
                (
                    Rating {
                        user: UserId(users.get(&r.user).expect("interned")),
                        item: ItemId(items.get(&r.item).expect("interned")),
                        value: T::of(r.value),
                        timestamp: r.timestamp,
                    },
                    r.line,
                )
            })
            .collect();
        // newest first within a pair, so dedup keeps it
        keyed.sort_by(|(a, la), (b, lb)| {
            (a.user, a.item)
                .cmp(&(b.user, b.item))
                .then(b.timestamp.cmp(&a.timestamp))
                .then(lb.cmp(la))
        });
        let total = keyed.len();
        keyed.dedup_by_key(|(r, _)| (r.user, r.item));
        let report = LoadReport {
            rows: total,
            duplicates: total - keyed.len(),
        };
        let ratings = keyed.into_iter().map(|(r, _)| r).collect();
        Ok((
            Self {
                ratings,
                scale,
                users,
                items,
                genres: None,
            },
            report,
        ))
    }

    pub fn ratings(&self) -> &[Rating<T>] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn scale(&self) -> Scale<T> {
        self.scale
    }

    pub fn user_names(&self) -> &Interner {
        &self.users
    }

    pub fn item_names(&self) -> &Interner {
        &self.items
    }

    pub fn user_name(&self, user: UserId) -> &str {
        self.users.name(user.0)
    }

    pub fn item_name(&self, item: ItemId) -> &str {
        self.items.name(item.0)
    }

    pub fn genres(&self) -> Option<&GenreMap> {
        self.genres.as_ref()
    }

    /// Per-user rating slices in user order.
    pub fn user_profiles(&self) -> impl Iterator<Item = (UserId, &[Rating<T>])> {
        self.ratings
            .chunk_by(|a, b| a.user == b.user)
            .map(|chunk| (chunk[0].user, chunk))
    }

    /// Distinct users present, ascending.
    pub fn users(&self) -> Vec<UserId> {
        self.user_profiles().map(|(u, _)| u).collect()
    }

    pub fn num_users(&self) -> usize {
        self.user_profiles().count()
    }

    pub fn num_items(&self) -> usize {
        let items: BTreeSet<ItemId> = self.ratings.iter().map(|r| r.item).collect();
        items.len()
    }

    pub fn profile(&self, user: UserId) -> Profile<T> {
        let start = self.ratings.partition_point(|r| r.user < user);
        let end = self.ratings.partition_point(|r| r.user <= user);
        Profile::from_ratings(&self.ratings[start..end])
    }

    /// Attaches genre labels. Keys for items that do not occur in the ratings
    /// are dropped; the number dropped is returned.
    pub fn with_genres(mut self, raw: BTreeMap<String, BTreeSet<String>>) -> (Self, usize) {
        let present: BTreeSet<ItemId> = self.ratings.iter().map(|r| r.item).collect();
        let mut dropped = 0;
        let mut genres = GenreMap::new();
        for (name, labels) in raw {
            match self.items.get(&name).map(ItemId) {
                Some(item) if present.contains(&item) => {
                    genres.insert(item, labels);
                }
                _ => dropped += 1,
            }
        }
        self.genres = Some(genres);
        (self, dropped)
    }

    fn retain_users<F: Fn(UserId, usize) -> bool>(&self, keep: F) -> Self {
        let mut ratings = Vec::new();
        for (user, chunk) in self.user_profiles() {
            if keep(user, chunk.len()) {
                ratings.extend_from_slice(chunk);
            }
        }
        let genres = self.genres.as_ref().map(|g| {
            let present: BTreeSet<ItemId> = ratings.iter().map(|r| r.item).collect();
            g.iter()
                .filter(|(item, _)| present.contains(item))
                .map(|(k, v)| (*k, v.clone()))
                .collect()
        });
        Self {
            ratings,
            scale: self.scale,
            users: self.users.clone(),
            items: self.items.clone(),
            genres,
        }
    }

    /// Keeps users with at least `min_ratings` ratings, with all their ratings.
    pub fn filter_min_profile(&self, min_ratings: usize) -> Result<Self> {
        if min_ratings == 0 {
            return Err(Error::InvalidParameter(
                "min_ratings must be at least 1".into(),
            ));
        }
        let out = self.retain_users(|_, n| n >= min_ratings);
        if out.is_empty() {
            return Err(Error::EmptyAfterFilter { min_ratings });
        }
        Ok(out)
    }

    /// Keeps a seeded random sample of at most `max_users` users.
    pub fn subsample_users(&self, max_users: usize, seed: u64) -> Result<Self> {
        if max_users == 0 {
            return Err(Error::InvalidParameter(
                "max_users must be at least 1".into(),
            ));
        }
        let mut users = self.users();
        if users.len() <= max_users {
            return Ok(self.clone());
        }
        users.shuffle(&mut seeding::rng(seed, stream::SUBSAMPLE, 0));
        let keep: BTreeSet<UserId> = users.into_iter().take(max_users).collect();
        Ok(self.retain_users(|u, _| keep.contains(&u)))
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format) -> Result<()> {
        let io = |e| Error::io("<output>", e);
        match format {
            Format::MovielensCsv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["userId", "movieId", "rating", "timestamp"])?;
                for r in &self.ratings {
                    w.write_record([
                        self.user_name(r.user),
                        self.item_name(r.item),
                        &r.value.to_string(),
                        &r.timestamp.to_string(),
                    ])?;
                }
                w.flush().map_err(io)?;
            }
            Format::Tsv => {
                for r in &self.ratings {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}",
                        self.user_name(r.user),
                        self.item_name(r.item),
                        r.value,
                        r.timestamp
                    )
                    .map_err(io)?;
                }
            }
            Format::Jsonl => {
                for r in &self.ratings {
                    let obj = serde_json::json!({
                        "user": self.user_name(r.user),
                        "item": self.item_name(r.item),
                        "rating": r.value.as_f64(),
                        "timestamp": r.timestamp,
                    });
                    writeln!(out, "{obj}").map_err(io)?;
                }
            }
        }
        Ok(())
    }

    pub fn write_path(&self, path: &Path, format: Format) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(file), format)
    }
}

/// Reads ratings from a file.
pub fn load_ratings<T: Scalar>(
    path: &Path,
    format: Format,
    scale: Scale<T>,
) -> Result<(RatingsDataset<T>, LoadReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_ratings(BufReader::new(file), format, scale, path)
}

pub fn read_ratings<T: Scalar, R: Read>(
    reader: R,
    format: Format,
    scale: Scale<T>,
    source: &Path,
) -> Result<(RatingsDataset<T>, LoadReport)> {
    let rows = match format {
        Format::MovielensCsv => parse_csv(reader, source)?,
        Format::Tsv => parse_tsv(reader, source)?,
        Format::Jsonl => parse_jsonl(reader, source)?,
    };
    if rows.is_empty() {
        return Err(Error::Empty(source.display().to_string()));
    }
    for row in &rows {
        if !scale.contains(T::of(row.value)) {
            return Err(parse_error(
                source,
                row.line,
                format!(
                    "rating {} outside scale [{}, {}] step {}",
                    row.value, scale.min, scale.max, scale.step
                ),
            ));
        }
    }
    RatingsDataset::assemble(rows, scale)
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_fields(
    source: &Path,
    line: usize,
    user: &str,
    item: &str,
    rating: &str,
    timestamp: &str,
) -> Result<RawRow> {
    let value: f64 = rating
        .trim()
        .parse()
        .map_err(|_| parse_error(source, line, format!("rating `{rating}` is not a number")))?;
    if !value.is_finite() {
        return Err(parse_error(source, line, "rating is not finite"));
    }
    let timestamp: i64 = timestamp.trim().parse().map_err(|_| {
        parse_error(
            source,
            line,
            format!("timestamp `{timestamp}` is not an integer"),
        )
    })?;
    let (user, item) = (user.trim(), item.trim());
    if user.is_empty() || item.is_empty() {
        return Err(parse_error(source, line, "empty user or item id"));
    }
    Ok(RawRow {
        user: user.to_string(),
        item: item.to_string(),
        value,
        timestamp,
        line,
    })
}

fn parse_csv<R: Read>(reader: R, source: &Path) -> Result<Vec<RawRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| parse_error(source, line, e.to_string()))?;
        if idx == 0 {
            let header: Vec<&str> = record.iter().map(str::trim).collect();
            if header != ["userId", "movieId", "rating", "timestamp"] {
                return Err(parse_error(
                    source,
                    line,
                    "expected header `userId,movieId,rating,timestamp`",
                ));
            }
            continue;
        }
        if record.len() != 4 {
            return Err(parse_error(
                source,
                line,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        rows.push(parse_fields(
            source, line, &record[0], &record[1], &record[2], &record[3],
        )?);
    }
    Ok(rows)
}

fn parse_tsv<R: Read>(reader: R, source: &Path) -> Result<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() || (idx == 0 && line.starts_with("userId")) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_error(
                source,
                line_no,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        rows.push(parse_fields(
            source, line_no, fields[0], fields[1], fields[2], fields[3],
        )?);
    }
    Ok(rows)
}

fn json_id(value: Option<&serde_json::Value>) -> Option<String> {
    match value? {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_jsonl<R: Read>(reader: R, source: &Path) -> Result<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let obj: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| parse_error(source, line_no, e.to_string()))?;
        let user = json_id(obj.get("user"))
            .ok_or_else(|| parse_error(source, line_no, "missing `user`"))?;
        let item = json_id(obj.get("item"))
            .ok_or_else(|| parse_error(source, line_no, "missing `item`"))?;
        let rating = obj
            .get("rating")
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| parse_error(source, line_no, "missing numeric `rating`"))?;
        let timestamp = obj
            .get("timestamp")
            .and_then(serde_json::Value::as_i64)
            .ok_or_else(|| parse_error(source, line_no, "missing integer `timestamp`"))?;
        rows.push(parse_fields(
            source,
            line_no,
            &user,
            &item,
            &rating.to_string(),
            &timestamp.to_string(),
        )?);
    }
    Ok(rows)
}

/// Reads a `movieId,title,genres` file. `(no genres listed)` maps to an
/// empty label set.
pub fn load_genres(path: &Path) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_genres(BufReader::new(file), path)
}

pub fn read_genres<R: Read>(
    reader: R,
    source: &Path,
) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut out = BTreeMap::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| parse_error(source, line, e.to_string()))?;
        if idx == 0 {
            let header: Vec<&str> = record.iter().map(str::trim).collect();
            if header != ["movieId", "title", "genres"] {
                return Err(parse_error(
                    source,
                    line,
                    "expected header `movieId,title,genres`",
                ));
            }
            continue;
        }
        if record.len() != 3 {
            return Err(parse_error(
                source,
                line,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let labels: BTreeSet<String> = record[2]
            .split('|')
            .map(str::trim)
            .filter(|g| !g.is_empty() && *g != "(no genres listed)")
            .map(String::from)
            .collect();
        out.insert(record[0].trim().to_string(), labels);
    }
    Ok(out)
}

/// `floor(fraction * count)`, clamped so both sides keep at least one element.
pub fn split_size(count: usize, fraction: f64) -> usize {
    let raw = (fraction * count as f64 + 1e-9).floor() as usize;
    raw.clamp(1, count.saturating_sub(1).max(1))
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie strictly between 0 and 1, got {f}"
        )))
    }
}

/// Assignment of users to the system group and the minimizing group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserAssignment {
    pub system: Vec<UserId>,
    pub minimizing: Vec<UserId>,
}

/// Shuffles the sorted user list with the seeded stream and takes the first
/// `split_size(|users|, system_fraction)` users as system users.
pub fn split_users<T: Scalar>(
    ds: &RatingsDataset<T>,
    system_fraction: f64,
    seed: u64,
) -> Result<UserAssignment> {
    check_fraction("system_fraction", system_fraction)?;
    let mut users = ds.users();
    if users.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 users to split, found {}",
            users.len()
        )));
    }
    let m = split_size(users.len(), system_fraction);
    users.shuffle(&mut seeding::rng(seed, stream::USER_SPLIT, 0));
    let mut system = users[..m].to_vec();
    let mut minimizing = users[m..].to_vec();
    system.sort();
    minimizing.sort();
    Ok(UserAssignment { system, minimizing })
}

/// One minimizing user's ratings, divided into the pool strategies select
/// from and the held-out pool used for scoring. Both sorted by item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserPools<T> {
    pub candidate: Vec<Rating<T>>,
    pub test: Vec<Rating<T>>,
}

impl<T: Scalar> UserPools<T> {
    pub fn full_profile(&self) -> Vec<Rating<T>> {
        let mut all: Vec<Rating<T>> = self.candidate.iter().chain(&self.test).copied().collect();
        all.sort_by_key(|r| r.item);
        all
    }
}

/// Splits one user's profile into candidate and test pools. The permutation
/// is drawn from a stream keyed by (seed, user id) over the item-sorted
/// profile.
pub fn split_candidate_test<T: Scalar>(
    profile: &[Rating<T>],
    candidate_fraction: f64,
    seed: u64,
) -> Result<UserPools<T>> {
    check_fraction("candidate_fraction", candidate_fraction)?;
    if profile.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a profile with {} rating(s) cannot form both a candidate and a test pool",
            profile.len()
        )));
    }
    let mut sorted = profile.to_vec();
    sorted.sort_by_key(|r| r.item);
    let user = sorted[0].user;
    let m = split_size(sorted.len(), candidate_fraction);
    sorted.shuffle(&mut seeding::rng(seed, stream::POOL_SPLIT, user.0 as u64));
    let mut candidate = sorted[..m].to_vec();
    let mut test = sorted[m..].to_vec();
    candidate.sort_by_key(|r| r.item);
    test.sort_by_key(|r| r.item);
    Ok(UserPools { candidate, test })
}

/// System users with full profiles, and minimizing users with their pools.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSplit<T> {
    pub system_users: BTreeMap<UserId, Vec<Rating<T>>>,
    pub minimizing_users: BTreeMap<UserId, UserPools<T>>,
    pub seed: u64,
    pub system_fraction: f64,
    pub candidate_fraction: f64,
    pub scale: Scale<T>,
}

impl<T: Scalar> ExperimentSplit<T> {
    pub fn new(
        ds: &RatingsDataset<T>,
        system_fraction: f64,
        candidate_fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        let assignment = split_users(ds, system_fraction, seed)?;
        let profiles: HashMap<UserId, &[Rating<T>]> = ds.user_profiles().collect();
        let system_users = assignment
            .system
            .iter()
            .map(|u| (*u, profiles[u].to_vec()))
            .collect();
        let minimizing_users = assignment
            .minimizing
            .iter()
            .map(|u| {
                Ok((
                    *u,
                    split_candidate_test(profiles[u], candidate_fraction, seed)?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            system_users,
            minimizing_users,
            seed,
            system_fraction,
            candidate_fraction,
            scale: ds.scale(),
        })
    }

    /// All system ratings sorted by (user, item).
    pub fn system_ratings(&self) -> Vec<Rating<T>> {
        self.system_users.values().flatten().copied().collect()
    }

    pub fn system_profiles(&self) -> BTreeMap<UserId, Profile<T>> {
        self.system_users
            .iter()
            .map(|(u, r)| (*u, Profile::from_ratings(r)))
            .collect()
    }
}

//! Portable text persistence for subgoal databases.
//!
//! Line-oriented, versioned, and bound to the exact space the database was
//! built on via a content hash, so a database file loaded against a
//! different (or edited) space is rejected as stale.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use rtsearch::subgoal::{DlrtaDatabase, HcdpsDatabase, KnnDatabase, KnnRecord};
use rtsearch::{Cost, Error, Result, SearchSpace, StateId};

const MAGIC: &str = "rtsearch-db";
const VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub enum AnyDatabase {
    Dlrta(DlrtaDatabase),
    Knn(KnnDatabase),
    Hcdps(HcdpsDatabase),
}

impl AnyDatabase {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyDatabase::Dlrta(_) => "dlrta",
            AnyDatabase::Knn(_) => "knn",
            AnyDatabase::Hcdps(_) => "hcdps",
        }
    }
}

/// Content hash of a space: heuristic kind and scale, coordinates, and the
/// full undirected edge list. Databases only load against an equal hash.
pub fn space_hash(space: &SearchSpace<Cost>) -> String {
    let mut h = Sha256::new();
    h.update([match space.heuristic_kind() {
        rtsearch::HeuristicKind::Octile => 0u8,
        rtsearch::HeuristicKind::Euclidean => 1u8,
    }]);
    h.update(space.h_scale().to_le_bytes());
    h.update((space.num_states() as u64).to_le_bytes());
    for s in space.states() {
        let (x, y) = space.coord(s);
        h.update(x.to_le_bytes());
        h.update(y.to_le_bytes());
    }
    for a in space.states() {
        for &(b, w) in space.neighbor_row(a) {
            if a.0 < b.0 {
                h.update(a.0.to_le_bytes());
                h.update(b.0.to_le_bytes());
                h.update(w.to_le_bytes());
            }
        }
    }
    let digest = h.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

pub fn save(path: &Path, space: &SearchSpace<Cost>, db: &AnyDatabase) -> Result<()> {
    fs::write(path, render(space, db)).map_err(|e| {
        Error::Build(format!("cannot write database {}: {e}", path.display()))
    })
}

pub fn render(space: &SearchSpace<Cost>, db: &AnyDatabase) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "kind {}", db.kind());
    let _ = writeln!(out, "space {}", space_hash(space));
    match db {
        AnyDatabase::Knn(db) => {
            let _ = writeln!(out, "param hc_bound {}", db.hc_bound);
            for r in &db.records {
                let _ = write!(out, "rec {} {}", r.start.0, r.goal.0);
                for s in &r.chain {
                    let _ = write!(out, " {}", s.0);
                }
                out.push('\n');
            }
        }
        AnyDatabase::Dlrta(db) => {
            let _ = writeln!(out, "param levels {}", db.levels);
            let _ = write!(out, "partition_of");
            for &p in &db.partition_of {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
            let _ = write!(out, "representatives");
            for r in &db.representatives {
                let _ = write!(out, " {}", r.0);
            }
            out.push('\n');
            let mut pairs: Vec<_> = db.subgoals.iter().collect();
            pairs.sort();
            for (&(a, b), s) in pairs {
                let _ = writeln!(out, "subgoal {a} {b} {}", s.0);
            }
        }
        AnyDatabase::Hcdps(db) => {
            let _ = writeln!(out, "param hc_bound {}", db.hc_bound);
            let _ = writeln!(out, "param link_radius {}", db.link_radius);
            let _ = write!(out, "region_of");
            for &r in &db.region_of {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
            let _ = write!(out, "seeds");
            for s in &db.seeds {
                let _ = write!(out, " {}", s.0);
            }
            out.push('\n');
            for (rid, row) in db.adjacency.iter().enumerate() {
                let _ = write!(out, "adjacency {rid}");
                for n in row {
                    let _ = write!(out, " {n}");
                }
                out.push('\n');
            }
            let mut pairs: Vec<_> = db.records.iter().collect();
            pairs.sort_by_key(|(k, _)| **k);
            for (&(a, b), chain) in pairs {
                let _ = write!(out, "record {a} {b}");
                for s in chain {
                    let _ = write!(out, " {}", s.0);
                }
                out.push('\n');
            }
        }
    }
    out
}

pub fn load(path: &Path, space: &SearchSpace<Cost>) -> Result<AnyDatabase> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read database {}: {e}", path.display()),
    })?;
    parse(&text, space)
}

pub fn parse(text: &str, space: &SearchSpace<Cost>) -> Result<AnyDatabase> {
    let fail = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line, header) = lines.next().ok_or_else(|| fail(1, "empty database file".into()))?;
    let mut head = header.split_whitespace();
    if head.next() != Some(MAGIC) {
        return Err(fail(line, format!("not a {MAGIC} file")));
    }
    let version: u32 = head
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| fail(line, "missing format version".into()))?;
    if version != VERSION {
        return Err(fail(line, format!("unsupported format version {version}")));
    }

    let (line, kind_line) = lines.next().ok_or_else(|| fail(2, "missing kind line".into()))?;
    let kind = kind_line
        .strip_prefix("kind ")
        .ok_or_else(|| fail(line, "expected `kind <dlrta|knn|hcdps>`".into()))?
        .trim()
        .to_string();

    let (line, space_line) = lines.next().ok_or_else(|| fail(3, "missing space line".into()))?;
    let stored = space_line
        .strip_prefix("space ")
        .ok_or_else(|| fail(line, "expected `space <hash>`".into()))?
        .trim();
    if stored != space_hash(space) {
        return Err(fail(
            line,
            "stale database: it was built for a different space than the one provided".into(),
        ));
    }

    let n = space.num_states();
    let body: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    match kind.as_str() {
        "knn" => parse_knn(&body, n),
        "dlrta" => parse_dlrta(&body, n),
        "hcdps" => parse_hcdps(&body, n),
        other => Err(fail(2, format!("unknown database kind `{other}`"))),
    }
}

fn ids(line: usize, tokens: &[&str], n: usize) -> Result<Vec<StateId>> {
    tokens
        .iter()
        .map(|t| {
            let v: u32 = t
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("`{t}` is not a state id") })?;
            if (v as usize) < n {
                Ok(StateId(v))
            } else {
                Err(Error::Parse { line, msg: format!("state id {v} out of range (< {n})") })
            }
        })
        .collect()
}

fn param<T: std::str::FromStr>(line: usize, name: &str, rest: &[&str]) -> Result<T> {
    match rest {
        [key, value] if *key == name => value.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("param {name}: bad value `{value}`"),
        }),
        _ => Err(Error::Parse { line, msg: format!("expected `param {name} <value>`") }),
    }
}

fn parse_knn(body: &[(usize, &str)], n: usize) -> Result<AnyDatabase> {
    let mut rows = body.iter();
    let (line, first) = rows
        .next()
        .ok_or_else(|| Error::Parse { line: 4, msg: "missing hc_bound param".into() })?;
    let toks: Vec<&str> = first.split_whitespace().collect();
    let hc_bound: usize = match toks.split_first() {
        Some((&"param", rest)) => param(*line, "hc_bound", rest)?,
        _ => return Err(Error::Parse { line: *line, msg: "expected a param line".into() }),
    };
    let mut records = Vec::new();
    for (line, row) in rows {
        let toks: Vec<&str> = row.split_whitespace().collect();
        match toks.split_first() {
            Some((&"rec", rest)) if rest.len() >= 3 => {
                let all = ids(*line, rest, n)?;
                records.push(KnnRecord {
                    start: all[0],
                    goal: all[1],
                    chain: all[2..].to_vec(),
                });
            }
            _ => {
                return Err(Error::Parse {
                    line: *line,
                    msg: "expected `rec <start> <goal> <chain...>`".into(),
                })
            }
        }
    }
    Ok(AnyDatabase::Knn(KnnDatabase { records, hc_bound }))
}

fn parse_dlrta(body: &[(usize, &str)], n: usize) -> Result<AnyDatabase> {
    let mut levels = None;
    let mut partition_of: Option<Vec<u32>> = None;
    let mut representatives: Option<Vec<StateId>> = None;
    let mut subgoals = std::collections::HashMap::new();
    for (line, row) in body {
        let toks: Vec<&str> = row.split_whitespace().collect();
        match toks.split_first() {
            Some((&"param", rest)) => levels = Some(param(*line, "levels", rest)?),
            Some((&"partition_of", rest)) => {
                let vals: Result<Vec<u32>> = rest
                    .iter()
                    .map(|t| {
                        t.parse().map_err(|_| Error::Parse {
                            line: *line,
                            msg: format!("`{t}` is not a partition id"),
                        })
                    })
                    .collect();
                partition_of = Some(vals?);
            }
            Some((&"representatives", rest)) => representatives = Some(ids(*line, rest, n)?),
            Some((&"subgoal", rest)) if rest.len() == 3 => {
                let a: u32 = rest[0].parse().map_err(|_| Error::Parse {
                    line: *line,
                    msg: "bad partition id".into(),
                })?;
                let b: u32 = rest[1].parse().map_err(|_| Error::Parse {
                    line: *line,
                    msg: "bad partition id".into(),
                })?;
                let s = ids(*line, &rest[2..], n)?[0];
                subgoals.insert((a, b), s);
            }
            _ => {
                return Err(Error::Parse { line: *line, msg: format!("unexpected line `{row}`") })
            }
        }
    }
    let partition_of = partition_of
        .ok_or_else(|| Error::Parse { line: 0, msg: "missing partition_of line".into() })?;
    let representatives = representatives
        .ok_or_else(|| Error::Parse { line: 0, msg: "missing representatives line".into() })?;
    if partition_of.len() != n {
        return Err(Error::Parse {
            line: 0,
            msg: format!("partition map covers {} states, space has {n}", partition_of.len()),
        });
    }
    let num_partitions = representatives.len() as u32;
    if partition_of.iter().any(|&p| p >= num_partitions) {
        return Err(Error::Parse { line: 0, msg: "partition id out of range".into() });
    }
    Ok(AnyDatabase::Dlrta(DlrtaDatabase {
        levels: levels.ok_or_else(|| Error::Parse { line: 0, msg: "missing levels".into() })?,
        partition_of,
        num_partitions,
        representatives,
        subgoals,
    }))
}

fn parse_hcdps(body: &[(usize, &str)], n: usize) -> Result<AnyDatabase> {
    let mut hc_bound = None;
    let mut link_radius = None;
    let mut region_of: Option<Vec<u32>> = None;
    let mut seeds: Option<Vec<StateId>> = None;
    let mut adjacency: Vec<(u32, Vec<u32>)> = Vec::new();
    let mut records = std::collections::HashMap::new();
    for (line, row) in body {
        let bad = |msg: String| Error::Parse { line: *line, msg };
        let toks: Vec<&str> = row.split_whitespace().collect();
        let parse_u32s = |rest: &[&str]| -> Result<Vec<u32>> {
            rest.iter()
                .map(|t| t.parse().map_err(|_| bad(format!("`{t}` is not an id"))))
                .collect()
        };
        match toks.split_first() {
            Some((&"param", rest)) if rest.first() == Some(&"hc_bound") => {
                hc_bound = Some(param(*line, "hc_bound", rest)?);
            }
            Some((&"param", rest)) => link_radius = Some(param(*line, "link_radius", rest)?),
            Some((&"region_of", rest)) => region_of = Some(parse_u32s(rest)?),
            Some((&"seeds", rest)) => seeds = Some(ids(*line, rest, n)?),
            Some((&"adjacency", rest)) if !rest.is_empty() => {
                let vals = parse_u32s(rest)?;
                adjacency.push((vals[0], vals[1..].to_vec()));
            }
            Some((&"record", rest)) if rest.len() >= 3 => {
                let a: u32 = rest[0].parse().map_err(|_| bad("bad region id".into()))?;
                let b: u32 = rest[1].parse().map_err(|_| bad("bad region id".into()))?;
                records.insert((a, b), ids(*line, &rest[2..], n)?);
            }
            _ => return Err(bad(format!("unexpected line `{row}`"))),
        }
    }
    let region_of =
        region_of.ok_or_else(|| Error::Parse { line: 0, msg: "missing region_of".into() })?;
    let seeds = seeds.ok_or_else(|| Error::Parse { line: 0, msg: "missing seeds".into() })?;
    if region_of.len() != n {
        return Err(Error::Parse {
            line: 0,
            msg: format!("region map covers {} states, space has {n}", region_of.len()),
        });
    }
    let p = seeds.len();
    let mut adj = vec![Vec::new(); p];
    for (rid, row) in adjacency {
        if rid as usize >= p {
            return Err(Error::Parse { line: 0, msg: format!("region id {rid} out of range") });
        }
        adj[rid as usize] = row;
    }
    Ok(AnyDatabase::Hcdps(HcdpsDatabase {
        region_of,
        seeds,
        adjacency: adj,
        records,
        link_radius: link_radius
            .ok_or_else(|| Error::Parse { line: 0, msg: "missing link_radius".into() })?,
        hc_bound: hc_bound
            .ok_or_else(|| Error::Parse { line: 0, msg: "missing hc_bound".into() })?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rtsearch::ingest::GridMap;
    use rtsearch::subgoal::{build_dlrta_db, build_hcdps_db, build_knn_db, HcdpsParams};

    fn trap_space() -> SearchSpace<Cost> {
        let text = ".....\n.@@..\n..@..\n.@@..\n.....";
        let open: Vec<bool> = text.lines().flat_map(|l| l.chars().map(|c| c == '.')).collect();
        GridMap::from_cells(5, 5, open).unwrap().to_space()
    }

    #[test]
    fn knn_round_trips() {
        let space = trap_space();
        let db = build_knn_db(&space, 6, 250, 3).unwrap();
        let text = render(&space, &AnyDatabase::Knn(db.clone()));
        match parse(&text, &space).unwrap() {
            AnyDatabase::Knn(loaded) => {
                assert_eq!(loaded.records, db.records);
                assert_eq!(loaded.hc_bound, db.hc_bound);
            }
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn dlrta_round_trips() {
        let space = trap_space();
        let db = build_dlrta_db(&space, 2, 5);
        let text = render(&space, &AnyDatabase::Dlrta(db.clone()));
        match parse(&text, &space).unwrap() {
            AnyDatabase::Dlrta(loaded) => {
                assert_eq!(loaded.levels, db.levels);
                assert_eq!(loaded.partition_of, db.partition_of);
                assert_eq!(loaded.num_partitions, db.num_partitions);
                assert_eq!(loaded.representatives, db.representatives);
                assert_eq!(loaded.subgoals, db.subgoals);
            }
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn hcdps_round_trips() {
        let space = trap_space();
        let db = build_hcdps_db(
            &space,
            &HcdpsParams { hc_bound: 250, link_radius: 1, max_regions: 100, seed: 1 },
        )
        .unwrap();
        let text = render(&space, &AnyDatabase::Hcdps(db.clone()));
        match parse(&text, &space).unwrap() {
            AnyDatabase::Hcdps(loaded) => {
                assert_eq!(loaded.region_of, db.region_of);
                assert_eq!(loaded.seeds, db.seeds);
                assert_eq!(loaded.adjacency, db.adjacency);
                assert_eq!(loaded.records, db.records);
                assert_eq!((loaded.hc_bound, loaded.link_radius), (db.hc_bound, db.link_radius));
            }
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn stale_and_corrupt_files_are_rejected() {
        let space = trap_space();
        let other = GridMap::from_cells(5, 5, vec![true; 25]).unwrap().to_space::<Cost>();
        let db = AnyDatabase::Knn(build_knn_db(&space, 3, 250, 3).unwrap());
        let text = render(&space, &db);

        let err = parse(&text, &other).unwrap_err();
        assert!(err.to_string().contains("stale"), "{err}");

        let bumped = text.replacen("rtsearch-db 1", "rtsearch-db 9", 1);
        assert!(parse(&bumped, &space).is_err());

        let mangled = text.replace("rec ", "wreck ");
        let err = parse(&mangled, &space).unwrap_err();
        assert!(matches!(err, Error::Parse { line, .. } if line >= 5), "{err}");

        // out-of-range state ids are caught even with a matching hash
        let huge = format!("{}rec 0 1 999\n", text);
        assert!(parse(&huge, &space).is_err());
    }

    #[test]
    fn hashes_see_heuristic_and_geometry() {
        let a = GridMap::from_cells(4, 4, vec![true; 16]).unwrap().to_space::<Cost>();
        let b = GridMap::from_cells(4, 4, vec![true; 16]).unwrap().to_space::<Cost>();
        assert_eq!(space_hash(&a), space_hash(&b));
        let mut open = vec![true; 16];
        open[5] = false;
        let c = GridMap::from_cells(4, 4, open).unwrap().to_space::<Cost>();
        assert_ne!(space_hash(&a), space_hash(&c));
    }
}

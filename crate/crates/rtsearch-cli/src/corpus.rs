//! Corpus entries: the base spaces experiments draw sub-spaces from.
//!
//! An entry is written as a compact spec string, e.g. `open:64x64`,
//! `rooms:91x91:room=8:doors=2:seed=3`, `maze:181x181:corridor=1:seed=13`,
//! `map:path/to/arena.map`, or `roads:ny.gr,ny.co`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rtsearch::ingest::{generate_maze, parse_dimacs, GridMap};
use rtsearch::{Cost, Error, Result, SearchSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusEntry {
    Open { width: usize, height: usize },
    Rooms { width: usize, height: usize, room: usize, doors: usize, seed: u64 },
    Maze { width: usize, height: usize, corridor: usize, seed: u64 },
    MapFile(PathBuf),
    Roads { gr: PathBuf, co: PathBuf },
}

impl CorpusEntry {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::Usage(format!("corpus spec `{spec}`: {msg}"));
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "open" => {
                let (w, h) = parse_dims(rest).map_err(bad)?;
                Ok(CorpusEntry::Open { width: w, height: h })
            }
            "rooms" => {
                let mut parts = rest.split(':');
                let (w, h) = parse_dims(parts.next().unwrap_or("")).map_err(bad)?;
                let mut room = 8;
                let mut doors = 1;
                let mut seed = 0;
                for part in parts {
                    match part.split_once('=') {
                        Some(("room", v)) => room = parse_num(v).map_err(bad)?,
                        Some(("doors", v)) => doors = parse_num(v).map_err(bad)?,
                        Some(("seed", v)) => seed = parse_num(v).map_err(bad)?,
                        _ => return Err(bad(format!("unknown option `{part}`"))),
                    }
                }
                Ok(CorpusEntry::Rooms { width: w, height: h, room, doors, seed })
            }
            "maze" => {
                let mut parts = rest.split(':');
                let (w, h) = parse_dims(parts.next().unwrap_or("")).map_err(bad)?;
                let mut corridor = 1;
                let mut seed = 0;
                for part in parts {
                    match part.split_once('=') {
                        Some(("corridor", v)) => corridor = parse_num(v).map_err(bad)?,
                        Some(("seed", v)) => seed = parse_num(v).map_err(bad)?,
                        _ => return Err(bad(format!("unknown option `{part}`"))),
                    }
                }
                Ok(CorpusEntry::Maze { width: w, height: h, corridor, seed })
            }
            "map" if !rest.is_empty() => Ok(CorpusEntry::MapFile(PathBuf::from(rest))),
            "roads" => match rest.split_once(',') {
                Some((gr, co)) if !gr.is_empty() && !co.is_empty() => Ok(CorpusEntry::Roads {
                    gr: PathBuf::from(gr),
                    co: PathBuf::from(co),
                }),
                _ => Err(bad("expected roads:GRAPH.gr,COORDS.co".into())),
            },
            _ => Err(bad("kind must be open, rooms, maze, map, or roads".into())),
        }
    }

    /// Short unique-ish name used in space ids and file names.
    pub fn label(&self) -> String {
        match self {
            CorpusEntry::Open { width, height } => format!("open{width}x{height}"),
            CorpusEntry::Rooms { width, height, room, doors, seed } => {
                // single-door maps keep their historical label
                if *doors == 1 {
                    format!("rooms{width}x{height}r{room}s{seed}")
                } else {
                    format!("rooms{width}x{height}r{room}d{doors}s{seed}")
                }
            }
            CorpusEntry::Maze { width, height, corridor, seed } => {
                format!("maze{width}x{height}c{corridor}s{seed}")
            }
            CorpusEntry::MapFile(p) => format!("map-{}", file_stem(p)),
            CorpusEntry::Roads { gr, .. } => format!("roads-{}", file_stem(gr)),
        }
    }

    /// The grid form of the entry, if it has one (roads do not).
    pub fn grid(&self) -> Result<Option<GridMap>> {
        match self {
            CorpusEntry::Open { width, height } => {
                Ok(Some(GridMap::from_cells(*width, *height, vec![true; width * height])?))
            }
            CorpusEntry::Rooms { width, height, room, doors, seed } => {
                Ok(Some(generate_rooms(*width, *height, *room, *doors, *seed)?))
            }
            CorpusEntry::Maze { width, height, corridor, seed } => {
                Ok(Some(generate_maze(*width, *height, *corridor, *seed)?))
            }
            CorpusEntry::MapFile(p) => Ok(Some(GridMap::parse(&read(p)?)?)),
            CorpusEntry::Roads { .. } => Ok(None),
        }
    }

    pub fn load(&self) -> Result<SearchSpace<Cost>> {
        match self {
            CorpusEntry::Roads { gr, co } => {
                Ok(parse_dimacs(&read(gr)?, &read(co)?)?.to_space())
            }
            _ => Ok(self.grid()?.expect("grid kinds produce a grid").to_space()),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into())
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("`{s}` is not WxH"))?;
    Ok((parse_num(w)?, parse_num(h)?))
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a valid number"))
}

/// Grid of square rooms separated by single-cell walls, each pair of
/// adjacent rooms joined by `doors` seeded-random doors (capped by the wall
/// length). Room interiors are `room` cells across; wall lines sit on every
/// coordinate congruent to `room` modulo `room + 1`. Door density is the
/// knob between corridor-like single-door worlds and nearly open ones.
pub fn generate_rooms(
    width: usize,
    height: usize,
    room: usize,
    doors: usize,
    seed: u64,
) -> Result<GridMap> {
    if room < 2 {
        return Err(Error::Usage(format!("room size {room} too small: need at least 2")));
    }
    if doors < 1 {
        return Err(Error::Usage("rooms need at least one door per wall".into()));
    }
    if width < 2 || height < 2 {
        return Err(Error::Usage(format!("room map {width}x{height} too small")));
    }
    let p = room + 1;
    let mut open: Vec<bool> = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            x % p != room && y % p != room
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // doors per shared wall segment; vertical walls first, top to bottom,
    // then horizontal ones, so the draw order is a pure function of the size
    for xw in (room..width).step_by(p) {
        if xw + 1 >= width {
            continue; // edge wall with no room to its right
        }
        for y0 in (0..height).step_by(p) {
            let y1 = (y0 + room).min(height);
            if y1 > y0 {
                for d in rand::seq::index::sample(&mut rng, y1 - y0, doors.min(y1 - y0)) {
                    open[(y0 + d) * width + xw] = true;
                }
            }
        }
    }
    for yw in (room..height).step_by(p) {
        if yw + 1 >= height {
            continue;
        }
        for x0 in (0..width).step_by(p) {
            let x1 = (x0 + room).min(width);
            if x1 > x0 {
                for d in rand::seq::index::sample(&mut rng, x1 - x0, doors.min(x1 - x0)) {
                    open[yw * width + (x0 + d)] = true;
                }
            }
        }
    }
    GridMap::from_cells(width, height, open)
}

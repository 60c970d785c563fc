use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{HeuristicKind, SearchSpace, StateId};

/// Eight-connected cell map in the common `type/height/width/map` text
/// format. Open cells get dense state ids in row-major order.
#[derive(Clone, Debug)]
pub struct GridMap {
    width: usize,
    height: usize,
    open: Vec<bool>,
    state_of: Vec<Option<StateId>>,
    cell_of: Vec<(u32, u32)>,
}

impl GridMap {
    /// Build from a row-major open-cell mask.
    pub fn from_cells(width: usize, height: usize, open: Vec<bool>) -> Result<Self> {
        if open.len() != width * height {
            return Err(Error::Usage(format!(
                "cell mask has {} entries for a {width}x{height} grid",
                open.len()
            )));
        }
        let mut state_of = vec![None; open.len()];
        let mut cell_of = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if open[y * width + x] {
                    state_of[y * width + x] = Some(StateId(cell_of.len() as u32));
                    cell_of.push((x as u32, y as u32));
                }
            }
        }
        Ok(GridMap { width, height, open, state_of, cell_of })
    }

    /// Parse the standard text format. Header lines must appear in order
    /// (`type`, `height`, `width`, `map`); `.` and `G` are open, `@ O T S W`
    /// are blocked, anything else is an error with its line number.
    pub fn parse(text: &str) -> Result<GridMap> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let mut expect = |prefix: &str| -> Result<(usize, String)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing `{prefix}` header line")))?;
            let rest = line
                .strip_prefix(prefix)
                .ok_or_else(|| Error::parse(no, format!("expected `{prefix} ...`, got `{line}`")))?;
            Ok((no, rest.trim().to_string()))
        };
        expect("type")?;
        let (hno, hval) = expect("height")?;
        let height: usize = hval
            .parse()
            .map_err(|_| Error::parse(hno, format!("bad height `{hval}`")))?;
        let (wno, wval) = expect("width")?;
        let width: usize = wval
            .parse()
            .map_err(|_| Error::parse(wno, format!("bad width `{wval}`")))?;
        if width == 0 || height == 0 {
            return Err(Error::parse(hno, "grid dimensions must be positive".to_string()));
        }
        let (mno, mline) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing `map` line".to_string()))?;
        if mline != "map" {
            return Err(Error::parse(mno, format!("expected `map`, got `{mline}`")));
        }

        let mut open = vec![false; width * height];
        let mut rows = 0usize;
        for (no, line) in lines {
            if rows == height {
                if line.is_empty() {
                    continue; // tolerate trailing blank lines
                }
                return Err(Error::parse(no, format!("unexpected extra row `{line}`")));
            }
            if line.chars().count() != width {
                return Err(Error::parse(
                    no,
                    format!("row has {} cells, expected {width}", line.chars().count()),
                ));
            }
            for (x, ch) in line.chars().enumerate() {
                open[rows * width + x] = match ch {
                    '.' | 'G' => true,
                    '@' | 'O' | 'T' | 'S' | 'W' => false,
                    other => {
                        return Err(Error::parse(no, format!("unknown cell code `{other}`")))
                    }
                };
            }
            rows += 1;
        }
        if rows != height {
            return Err(Error::parse(0, format!("got {rows} rows, expected {height}")));
        }
        GridMap::from_cells(width, height, open)
    }

    /// Canonical text form: `.` for open, `@` for blocked. `parse ∘ emit`
    /// is the identity on the cell mask.
    pub fn emit(&self) -> String {
        let mut out = String::with_capacity(self.width * self.height + 64);
        out.push_str(&format!("type octile\nheight {}\nwidth {}\nmap\n", self.height, self.width));
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.open[y * self.width + x] { '.' } else { '@' });
            }
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_open(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.open[y * self.width + x]
    }

    pub fn num_open(&self) -> usize {
        self.cell_of.len()
    }

    /// State id of the open cell at `(x, y)`.
    pub fn state_at(&self, x: usize, y: usize) -> Option<StateId> {
        if x < self.width && y < self.height {
            self.state_of[y * self.width + x]
        } else {
            None
        }
    }

    /// Cell coordinates of a state.
    pub fn cell(&self, s: StateId) -> (u32, u32) {
        self.cell_of[s.index()]
    }

    /// Eight-connected search space over the open cells: cardinal moves cost
    /// 1, diagonal moves cost 1.4 and require both adjacent cardinal cells
    /// open (no corner cutting).
    pub fn to_space<S: Scalar>(&self) -> SearchSpace<S> {
        let mut edges: Vec<(u32, u32, S)> = Vec::new();
        let card = S::of(1.0);
        let diag = S::of(1.4);
        for (id, &(x, y)) in self.cell_of.iter().enumerate() {
            let (x, y) = (x as usize, y as usize);
            // only emit each undirected edge once: toward larger row-major cells
            let east = self.is_open(x + 1, y);
            let south = y + 1 < self.height && self.is_open(x, y + 1);
            let west = x > 0 && self.is_open(x - 1, y);
            if east {
                edges.push((id as u32, self.state_of[y * self.width + x + 1].unwrap().0, card));
            }
            if south {
                edges.push((id as u32, self.state_of[(y + 1) * self.width + x].unwrap().0, card));
            }
            if south && east && self.is_open(x + 1, y + 1) {
                edges.push((
                    id as u32,
                    self.state_of[(y + 1) * self.width + x + 1].unwrap().0,
                    diag,
                ));
            }
            if south && west && self.is_open(x - 1, y + 1) {
                edges.push((
                    id as u32,
                    self.state_of[(y + 1) * self.width + x - 1].unwrap().0,
                    diag,
                ));
            }
        }
        let coords = self.cell_of.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
        SearchSpace::from_edges(coords, &edges, HeuristicKind::Octile)
            .expect("grid adjacency is well-formed")
    }
}

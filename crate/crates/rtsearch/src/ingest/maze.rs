use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::GridMap;

/// Corridor widths the maze rasterizer supports.
pub const MAZE_CORRIDOR_WIDTHS: [usize; 4] = [1, 2, 4, 8];

/// Generate a perfect maze (exactly one corridor path between any two
/// lattice cells) rendered onto a cell grid with `corridor`-wide passages
/// and 1-wide walls.
///
/// The carving is a seeded depth-first backtracker over a lattice of
/// `(width - 1) / (corridor + 1)` by `(height - 1) / (corridor + 1)` cells,
/// so `width` and `height` must satisfy that divisibility with at least a
/// 2x2 lattice. Same seed, same maze.
pub fn generate_maze(width: usize, height: usize, corridor: usize, seed: u64) -> Result<GridMap> {
    if !MAZE_CORRIDOR_WIDTHS.contains(&corridor) {
        return Err(Error::Usage(format!(
            "corridor width {corridor} unsupported (choose one of {MAZE_CORRIDOR_WIDTHS:?})"
        )));
    }
    let pitch = corridor + 1;
    let lattice = |dim: usize, name: &str| -> Result<usize> {
        if dim < 1 + 2 * pitch || (dim - 1) % pitch != 0 {
            return Err(Error::Usage(format!(
                "{name} {dim} incompatible with corridor {corridor}: need 1 + k*{pitch} with k >= 2"
            )));
        }
        Ok((dim - 1) / pitch)
    };
    let cols = lattice(width, "width")?;
    let rows = lattice(height, "height")?;

    // Depth-first spanning tree over the lattice.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = vec![false; cols * rows];
    let mut carved_east = vec![false; cols * rows];
    let mut carved_south = vec![false; cols * rows];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    while let Some(&(cx, cy)) = stack.last() {
        let mut options: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        // Fisher-Yates over the four directions
        for i in (1..4).rev() {
            options.swap(i, rng.gen_range(0..=i));
        }
        let mut advanced = false;
        for (dx, dy) in options {
            let nx = cx as isize + dx;
            let ny = cy as isize + dy;
            if nx < 0 || ny < 0 || nx as usize >= cols || ny as usize >= rows {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if visited[ny * cols + nx] {
                continue;
            }
            if dx == 1 {
                carved_east[cy * cols + cx] = true;
            } else if dx == -1 {
                carved_east[cy * cols + nx] = true;
            } else if dy == 1 {
                carved_south[cy * cols + cx] = true;
            } else {
                carved_south[ny * cols + cx] = true;
            }
            visited[ny * cols + nx] = true;
            stack.push((nx, ny));
            advanced = true;
            break;
        }
        if !advanced {
            stack.pop();
        }
    }

    // Rasterize: each lattice cell becomes a corridor x corridor open block
    // at a 1-cell wall pitch; carved walls open a corridor-wide strip.
    let mut open = vec![false; width * height];
    let mut open_rect = |x0: usize, y0: usize, w: usize, h: usize| {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                open[y * width + x] = true;
            }
        }
    };
    for cy in 0..rows {
        for cx in 0..cols {
            let bx = 1 + cx * pitch;
            let by = 1 + cy * pitch;
            open_rect(bx, by, corridor, corridor);
            if carved_east[cy * cols + cx] {
                open_rect(bx + corridor, by, 1, corridor);
            }
            if carved_south[cy * cols + cx] {
                open_rect(bx, by + corridor, corridor, 1);
            }
        }
    }
    GridMap::from_cells(width, height, open)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realtime::dijkstra_from;
    use crate::space::{SearchSpace, StateId};

    #[test]
    fn unit_corridor_maze_is_a_tree() {
        let g = generate_maze(33, 33, 1, 7).unwrap();
        let sp: SearchSpace<f64> = g.to_space();
        // width-1 corridors admit no diagonal moves, so a perfect maze's
        // open cells form a tree: connected with |V| - 1 edges.
        assert_eq!(sp.num_edges(), sp.num_states() - 1);
        let dist = dijkstra_from(&sp, StateId(0));
        assert!(dist.iter().all(|d| d.is_some()));
    }

    #[test]
    fn corridor_blocks_scale() {
        let w = 2;
        let g = generate_maze(34, 34, w, 7).unwrap();
        // every lattice cell expands to a fully open w x w block
        let pitch = w + 1;
        for cy in 0..11 {
            for cx in 0..11 {
                for dy in 0..w {
                    for dx in 0..w {
                        assert!(g.is_open(1 + cx * pitch + dx, 1 + cy * pitch + dy));
                    }
                }
            }
        }
        let sp: SearchSpace<f64> = g.to_space();
        let dist = dijkstra_from(&sp, StateId(0));
        assert!(dist.iter().all(|d| d.is_some()), "wide maze stays connected");
    }

    #[test]
    fn wide_corridors_supported() {
        for w in [4usize, 8] {
            let dim = 1 + (w + 1) * 4;
            let g = generate_maze(dim, dim, w, 3).unwrap();
            let sp: SearchSpace<f64> = g.to_space();
            assert!(sp.num_states() > 0);
            let dist = dijkstra_from(&sp, StateId(0));
            assert!(dist.iter().all(|d| d.is_some()));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_maze(33, 33, 1, 42).unwrap().emit();
        let b = generate_maze(33, 33, 1, 42).unwrap().emit();
        let c = generate_maze(33, 33, 1, 43).unwrap().emit();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_maze(33, 33, 3, 0).is_err()); // unsupported width
        assert!(generate_maze(34, 33, 1, 0).is_err()); // off-pitch dimension
        assert!(generate_maze(3, 3, 1, 0).is_err()); // lattice too small
    }
}

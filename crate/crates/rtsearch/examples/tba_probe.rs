use rtsearch::ingest::GridMap;
use rtsearch::realtime::{astar, tba_star, TbaConfig};
use rtsearch::{Problem, StateId};

fn main() {
    let cells = vec![true; 50 * 50];
    let g = GridMap::from_cells(50, 50, cells).unwrap();
    let sp = g.to_space::<f64>();
    let start = g.state_at(3, 4).unwrap();
    let goal = g.state_at(44, 39).unwrap();
    let p = Problem::new(start, goal).unwrap();
    let (opt, _) = astar(&sp, p);
    let sol = tba_star(&sp, p, TbaConfig::new(5, 100000));
    println!("opt  {} ({} states)", opt.cost, opt.path.len());
    println!("tba  {} ({} states)", sol.cost, sol.path.len());
    let cell = |s: StateId| g.cell(s);
    for (i, w) in sol.path.windows(2).enumerate() {
        let (ax, ay) = cell(w[0]);
        let (bx, by) = cell(w[1]);
        let dx = bx as i64 - ax as i64;
        let dy = by as i64 - ay as i64;
        if !(dx >= 0 && dy >= 0) {
            println!("move {i}: ({ax},{ay}) -> ({bx},{by})  NON-MONOTONE");
        }
    }
    println!("first 12 tba states: {:?}", sol.path.iter().take(12).map(|&s| cell(s)).collect::<Vec<_>>());
    println!("first 12 opt states: {:?}", opt.path.iter().take(12).map(|&s| cell(s)).collect::<Vec<_>>());
    println!("last 12 tba states: {:?}", sol.path.iter().rev().take(12).map(|&s| cell(s)).collect::<Vec<_>>());
}

use crate::scalar::Scalar;
use crate::space::SearchSpace;

/// Partition states by repeatedly merging cliques of up to four mutually
/// adjacent nodes, `levels` rounds deep.
///
/// Each round scans the current level's nodes in ascending id, greedily
/// growing a clique from each unassigned node (pairs and singletons when
/// nothing bigger exists); merged nodes inherit the union of their
/// members' adjacencies. The returned vector maps each ground state to its
/// level-`levels` group, numbered densely in creation order.
pub fn clique_abstraction<S: Scalar>(space: &SearchSpace<S>, levels: usize) -> Vec<u32> {
    assert!(levels >= 1, "at least one abstraction round is required");
    let n = space.num_states();
    let mut partition: Vec<u32> = (0..n as u32).collect();
    let mut adj: Vec<Vec<u32>> = space
        .states()
        .map(|s| space.neighbor_row(s).iter().map(|&(t, _)| t.0).collect())
        .collect();
    for _ in 0..levels {
        let (group_of, next_adj) = merge_round(&adj);
        for p in partition.iter_mut() {
            *p = group_of[*p as usize];
        }
        adj = next_adj;
    }
    partition
}

/// One merge round over an abstract graph given as sorted adjacency lists.
fn merge_round(adj: &[Vec<u32>]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let n = adj.len();
    let mut group_of = vec![u32::MAX; n];
    let mut groups: Vec<Vec<u32>> = Vec::new();
    for u in 0..n as u32 {
        if group_of[u as usize] != u32::MAX {
            continue;
        }
        let mut members = vec![u];
        for &c in &adj[u as usize] {
            if members.len() == 4 {
                break;
            }
            if group_of[c as usize] != u32::MAX {
                continue;
            }
            // c must be adjacent to every member to keep a true clique
            if members.iter().all(|&m| m == u || adj[c as usize].binary_search(&m).is_ok()) {
                members.push(c);
            }
        }
        let gid = groups.len() as u32;
        for &m in &members {
            group_of[m as usize] = gid;
        }
        groups.push(members);
    }
    // union adjacency between groups
    let mut next_adj: Vec<Vec<u32>> = vec![Vec::new(); groups.len()];
    for (gid, members) in groups.iter().enumerate() {
        let mut out: Vec<u32> = members
            .iter()
            .flat_map(|&m| adj[m as usize].iter().map(|&v| group_of[v as usize]))
            .filter(|&g| g != gid as u32)
            .collect();
        out.sort_unstable();
        out.dedup();
        next_adj[gid] = out;
    }
    (group_of, next_adj)
}

pub(crate) fn num_partitions(partition: &[u32]) -> u32 {
    partition.iter().copied().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::GridMap;
    use crate::space::HeuristicKind;

    fn chain(n: usize) -> SearchSpace<f64> {
        let coords: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
        let edges: Vec<(u32, u32, f64)> = (1..n as u32).map(|i| (i - 1, i, 1.0)).collect();
        SearchSpace::from_edges(coords, &edges, HeuristicKind::Euclidean).unwrap()
    }

    #[test]
    fn four_clique_merges_whole_grid() {
        let g = GridMap::from_cells(2, 2, vec![true; 4]).unwrap();
        let sp: SearchSpace<f64> = g.to_space();
        let p = clique_abstraction(&sp, 1);
        assert_eq!(p, vec![0, 0, 0, 0]);
    }

    #[test]
    fn chain_merges_into_pairs() {
        let p = clique_abstraction(&chain(4), 1);
        assert_eq!(p, vec![0, 0, 1, 1]);
    }

    #[test]
    fn odd_chain_leaves_a_singleton() {
        let p = clique_abstraction(&chain(3), 1);
        assert_eq!(p, vec![0, 0, 1]);
    }

    #[test]
    fn deep_merging_reaches_one_group_per_component() {
        let p = clique_abstraction(&chain(9), 5);
        assert!(p.iter().all(|&g| g == 0), "{p:?}");
        // two components stay apart forever
        let coords = vec![(0.0, 0.0), (1.0, 0.0), (5.0, 0.0), (6.0, 0.0)];
        let edges = vec![(0u32, 1u32, 1.0f64), (2, 3, 1.0)];
        let sp = SearchSpace::from_edges(coords, &edges, HeuristicKind::Euclidean).unwrap();
        let p = clique_abstraction(&sp, 8);
        assert_eq!(num_partitions(&p), 2);
        assert_eq!(p[0], p[1]);
        assert_eq!(p[2], p[3]);
        assert_ne!(p[0], p[2]);
    }

    #[test]
    fn partition_blocks_are_connected_on_grids() {
        let g = GridMap::from_cells(6, 6, vec![true; 36]).unwrap();
        let sp: SearchSpace<f64> = g.to_space();
        for levels in 1..=3 {
            let p = clique_abstraction(&sp, levels);
            assert_eq!(p.len(), 36);
            // ids are dense
            let parts = num_partitions(&p);
            for g in 0..parts {
                assert!(p.iter().any(|&x| x == g));
            }
        }
    }
}

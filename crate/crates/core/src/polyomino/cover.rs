use std::collections::HashMap;

use super::exact_cover::ExactCover;
use super::shape::{Cell, CellSet, Transform};

/// Finds up to `limit` tilings of `region` by copies of `shape`.
///
/// Each solution lists the placed transforms sorted by translation (row
/// major) then orientation code, so equal tilings compare equal. Candidate
/// placements are enumerated in orientation-code order, then row-major
/// translation order; the search itself branches on the cell with the fewest
/// candidate placements.
pub fn solve_exact_cover(region: &[Cell], shape: &CellSet, limit: usize) -> Vec<Vec<Transform>> {
    if region.is_empty() || shape.is_empty() || !region.len().is_multiple_of(shape.len()) {
        return Vec::new();
    }
    let index: HashMap<Cell, usize> = region.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    if index.len() != region.len() {
        return Vec::new();
    }
    let min_x = region.iter().map(|c| c.0).min().unwrap();
    let max_x = region.iter().map(|c| c.0).max().unwrap();
    let min_y = region.iter().map(|c| c.1).min().unwrap();
    let max_y = region.iter().map(|c| c.1).max().unwrap();

    let mut solver = ExactCover::new(region.len());
    let mut placements = Vec::new();
    for orientation in shape.distinct_orientations() {
        let oriented = shape.oriented(orientation);
        let (w, h) = oriented.extent();
        for ty in min_y..=max_y - h + 1 {
            for tx in min_x..=max_x - w + 1 {
                let items: Option<Vec<usize>> = oriented
                    .cells()
                    .iter()
                    .map(|&(x, y)| index.get(&(x + tx, y + ty)).copied())
                    .collect();
                if let Some(items) = items {
                    solver.add_option(&items);
                    placements.push(Transform {
                        orientation,
                        translation: (tx, ty),
                    });
                }
            }
        }
    }
    solver
        .solve(limit)
        .into_iter()
        .map(|sol| {
            let mut ts: Vec<Transform> = sol.into_iter().map(|o| placements[o]).collect();
            ts.sort_by_key(|t| (t.translation.1, t.translation.0, t.orientation));
            ts
        })
        .collect()
}

/// Cells of a `width` x `height` rectangle anchored at the origin.
pub fn rectangle_cells(width: u32, height: u32) -> Vec<Cell> {
    (0..height as i32)
        .flat_map(|y| (0..width as i32).map(move |x| (x, y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomino_cover_is_unique() {
        let sols = solve_exact_cover(&rectangle_cells(2, 3), &CellSet::monomino(), usize::MAX);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].len(), 6);
    }

    #[test]
    fn indivisible_area_is_empty() {
        let domino = CellSet::rectangle(2, 1).unwrap();
        assert!(solve_exact_cover(&rectangle_cells(3, 1), &domino, 10).is_empty());
    }

    #[test]
    fn domino_tilings_of_2x3() {
        // Fibonacci: the 2xn strip has F(n+1) domino tilings.
        let domino = CellSet::rectangle(2, 1).unwrap();
        assert_eq!(
            solve_exact_cover(&rectangle_cells(3, 2), &domino, usize::MAX).len(),
            3
        );
        assert_eq!(
            solve_exact_cover(&rectangle_cells(4, 2), &domino, usize::MAX).len(),
            5
        );
    }

    #[test]
    fn solutions_cover_region_exactly() {
        let tromino = CellSet::new([(0, 0), (0, 1), (1, 1)]).unwrap();
        let region = rectangle_cells(3, 2);
        for sol in solve_exact_cover(&region, &tromino, usize::MAX) {
            let mut cells: Vec<Cell> = sol.iter().flat_map(|t| t.place(&tromino)).collect();
            cells.sort_by_key(|c| (c.1, c.0));
            assert_eq!(cells, region);
        }
    }
}

//! Dancing-links exact cover solver.
//!
//! Items are numbered `0..item_count`; each option is a list of item
//! indices. A solution is a set of options covering every item exactly once.
//! The search always branches on the uncovered item with the fewest remaining
//! options (ties broken by lowest item index) and tries that item's options in
//! insertion order, so results are fully deterministic.

/// Index of the list header node.
const ROOT: usize = 0;

#[derive(Debug, Clone)]
pub struct ExactCover {
    item_count: usize,
    // Horizontal links between headers (0 = root, 1..=item_count = items).
    left: Vec<usize>,
    right: Vec<usize>,
    // Vertical links over all nodes: headers first, then option nodes.
    up: Vec<usize>,
    down: Vec<usize>,
    // For option nodes, the item header they belong to.
    top: Vec<usize>,
    // For option nodes, the index of the option they belong to.
    option_of: Vec<usize>,
    // First node of each option (options are stored contiguously).
    option_start: Vec<usize>,
    option_len: Vec<usize>,
    len: Vec<usize>,
}

impl ExactCover {
    pub fn new(item_count: usize) -> Self {
        let n = item_count + 1;
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            left.push(if i == 0 { item_count } else { i - 1 });
            right.push(if i == item_count { 0 } else { i + 1 });
        }
        let up: Vec<usize> = (0..n).collect();
        let down: Vec<usize> = (0..n).collect();
        ExactCover {
            item_count,
            left,
            right,
            up,
            down,
            top: vec![usize::MAX; n],
            option_of: vec![usize::MAX; n],
            option_start: Vec::new(),
            option_len: Vec::new(),
            len: vec![0; n],
        }
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn option_count(&self) -> usize {
        self.option_start.len()
    }

    /// Adds an option covering the given items and returns its index.
    ///
    /// Duplicate or out-of-range items make the option unusable; such
    /// options are still counted but never linked.
    pub fn add_option(&mut self, items: &[usize]) -> usize {
        let id = self.option_start.len();
        let valid = !items.is_empty() && items.iter().all(|&i| i < self.item_count) && {
            let mut sorted = items.to_vec();
            sorted.sort_unstable();
            sorted.windows(2).all(|w| w[0] != w[1])
        };
        let start = self.up.len();
        self.option_start.push(start);
        if !valid {
            self.option_len.push(0);
            return id;
        }
        self.option_len.push(items.len());
        for &item in items {
            let header = item + 1;
            let node = self.up.len();
            let last = self.up[header];
            self.up.push(last);
            self.down.push(header);
            self.down[last] = node;
            self.up[header] = node;
            self.top.push(header);
            self.option_of.push(id);
            self.len[header] += 1;
        }
        id
    }

    fn cover(&mut self, header: usize) {
        let (l, r) = (self.left[header], self.right[header]);
        self.right[l] = r;
        self.left[r] = l;
        let mut row = self.down[header];
        while row != header {
            let opt = self.option_of[row];
            let start = self.option_start[opt];
            let end = start + self.option_len[opt];
            for node in start..end {
                if node == row {
                    continue;
                }
                let (u, d) = (self.up[node], self.down[node]);
                self.down[u] = d;
                self.up[d] = u;
                self.len[self.top[node]] -= 1;
            }
            row = self.down[row];
        }
    }

    fn uncover(&mut self, header: usize) {
        let mut row = self.up[header];
        while row != header {
            let opt = self.option_of[row];
            let start = self.option_start[opt];
            let end = start + self.option_len[opt];
            for node in (start..end).rev() {
                if node == row {
                    continue;
                }
                let (u, d) = (self.up[node], self.down[node]);
                self.down[u] = node;
                self.up[d] = node;
                self.len[self.top[node]] += 1;
            }
            row = self.up[row];
        }
        let (l, r) = (self.left[header], self.right[header]);
        self.right[l] = header;
        self.left[r] = header;
    }

    fn cover_option_rest(&mut self, row: usize) {
        let opt = self.option_of[row];
        let start = self.option_start[opt];
        let end = start + self.option_len[opt];
        for node in start..end {
            if node != row {
                self.cover(self.top[node]);
            }
        }
    }

    fn uncover_option_rest(&mut self, row: usize) {
        let opt = self.option_of[row];
        let start = self.option_start[opt];
        let end = start + self.option_len[opt];
        for node in (start..end).rev() {
            if node != row {
                self.uncover(self.top[node]);
            }
        }
    }

    fn choose_item(&self) -> Option<usize> {
        let mut best = None;
        let mut best_len = usize::MAX;
        let mut h = self.right[ROOT];
        while h != ROOT {
            if self.len[h] < best_len {
                best_len = self.len[h];
                best = Some(h);
                if best_len == 0 {
                    break;
                }
            }
            h = self.right[h];
        }
        best
    }

    /// Enumerates up to `limit` solutions, each a list of option indices in
    /// the order they were chosen.
    pub fn solve(&mut self, limit: usize) -> Vec<Vec<usize>> {
        let mut solutions = Vec::new();
        if limit == 0 {
            return solutions;
        }
        // Each frame: (item header, current row in that item's column).
        let mut stack: Vec<(usize, usize)> = Vec::new();
        'search: loop {
            // Descend.
            if self.right[ROOT] == ROOT {
                solutions.push(stack.iter().map(|&(_, row)| self.option_of[row]).collect());
                if solutions.len() >= limit {
                    break 'search;
                }
            } else {
                let header = self.choose_item().expect("non-empty header list");
                self.cover(header);
                let row = self.down[header];
                if row != header {
                    self.cover_option_rest(row);
                    stack.push((header, row));
                    continue 'search;
                }
                self.uncover(header);
            }
            // Backtrack to the next untried option.
            loop {
                let Some((header, row)) = stack.pop() else {
                    break 'search;
                };
                self.uncover_option_rest(row);
                let next = self.down[row];
                if next != header {
                    self.cover_option_rest(next);
                    stack.push((header, next));
                    continue 'search;
                }
                self.uncover(header);
            }
        }
        // Restore the structure so the solver can be reused.
        while let Some((header, row)) = stack.pop() {
            self.uncover_option_rest(row);
            self.uncover(header);
        }
        solutions
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example_has_unique_solution() {
        // Items a..g, the classic small DLX example.
        let mut ec = ExactCover::new(7);
        ec.add_option(&[2, 4]);
        ec.add_option(&[0, 3, 6]);
        ec.add_option(&[1, 2, 5]);
        ec.add_option(&[0, 3, 5]);
        ec.add_option(&[1, 6]);
        ec.add_option(&[3, 4, 6]);
        let mut sols = ec.solve(usize::MAX);
        assert_eq!(sols.len(), 1);
        sols[0].sort_unstable();
        assert_eq!(sols[0], vec![0, 3, 4]);
    }

    #[test]
    fn enumerates_all_and_is_reusable() {
        // Two items, each coverable alone or together.
        let mut ec = ExactCover::new(2);
        ec.add_option(&[0]);
        ec.add_option(&[1]);
        ec.add_option(&[0, 1]);
        assert_eq!(ec.solve(usize::MAX).len(), 2);
        assert_eq!(ec.solve(1).len(), 1);
        assert_eq!(ec.solve(usize::MAX).len(), 2);
    }

    #[test]
    fn unsatisfiable_returns_empty() {
        let mut ec = ExactCover::new(3);
        ec.add_option(&[0, 1]);
        ec.add_option(&[1, 2]);
        assert!(ec.solve(10).is_empty());
    }

    #[test]
    fn invalid_options_are_ignored() {
        let mut ec = ExactCover::new(2);
        ec.add_option(&[0, 0]);
        ec.add_option(&[5]);
        ec.add_option(&[0, 1]);
        let sols = ec.solve(usize::MAX);
        assert_eq!(sols, vec![vec![2]]);
    }
}

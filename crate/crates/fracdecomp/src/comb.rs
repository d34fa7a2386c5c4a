//! Lexicographic combination scans used by the clique and audit machinery.

/// Visits every size-`m` subset of `items` in lexicographic order, passing
/// each as a sorted slice. Visits the empty subset once when `m == 0`.
pub fn for_each_combination<T: Copy>(items: &[T], m: usize, mut visit: impl FnMut(&[T])) {
    if m > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        visit(&buf);
        // Advance the rightmost index that can still move.
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + (m - pos) < items.len() {
                idx[pos] += 1;
                for p in pos + 1..m {
                    idx[p] = idx[p - 1] + 1;
                }
                for p in pos..m {
                    buf[p] = items[idx[p]];
                }
                break;
            }
        }
    }
}

/// Collects every size-`m` subset of `items` in lexicographic order.
#[must_use]
pub fn combinations<T: Copy>(items: &[T], m: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for_each_combination(items, m, |c| out.push(c.to_vec()));
    out
}

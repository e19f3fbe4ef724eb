//! Linear-space Myers difference algorithm.
//!
//! The result is a pair of masks over the two inputs: `removed[i]` is set for
//! every old unit that is deleted and `added[j]` for every new unit that is
//! inserted. Unmarked units form a longest common subsequence, in order.

pub(crate) struct Marks {
    pub removed: Vec<bool>,
    pub added: Vec<bool>,
}

pub(crate) fn edit_marks(old: &[u32], new: &[u32]) -> Marks {
    let mut ctx = Ctx {
        old,
        new,
        marks: Marks {
            removed: vec![false; old.len()],
            added: vec![false; new.len()],
        },
    };
    ctx.compare(0, old.len(), 0, new.len());
    ctx.marks
}

struct Ctx<'a> {
    old: &'a [u32],
    new: &'a [u32],
    marks: Marks,
}

impl Ctx<'_> {
    fn compare(&mut self, mut a_lo: usize, mut a_hi: usize, mut b_lo: usize, mut b_hi: usize) {
        while a_lo < a_hi && b_lo < b_hi && self.old[a_lo] == self.new[b_lo] {
            a_lo += 1;
            b_lo += 1;
        }
        while a_lo < a_hi && b_lo < b_hi && self.old[a_hi - 1] == self.new[b_hi - 1] {
            a_hi -= 1;
            b_hi -= 1;
        }
        if a_lo == a_hi {
            self.marks.added[b_lo..b_hi].fill(true);
            return;
        }
        if b_lo == b_hi {
            self.marks.removed[a_lo..a_hi].fill(true);
            return;
        }
        match bisect(&self.old[a_lo..a_hi], &self.new[b_lo..b_hi]) {
            Some((x, y)) => {
                self.compare(a_lo, a_lo + x, b_lo, b_lo + y);
                self.compare(a_lo + x, a_hi, b_lo + y, b_hi);
            }
            None => {
                // No common unit at all.
                self.marks.removed[a_lo..a_hi].fill(true);
                self.marks.added[b_lo..b_hi].fill(true);
            }
        }
    }
}

/// Finds a point `(x, y)` on an optimal edit path by advancing furthest
/// reaching paths from both corners until they overlap. Returns `None` when
/// the inputs share no unit.
fn bisect(a: &[u32], b: &[u32]) -> Option<(usize, usize)> {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let max_d = (n + m + 1) / 2;
    let v_off = max_d;
    let v_len = 2 * max_d + 2;
    let mut v1 = vec![-1isize; v_len as usize];
    let mut v2 = vec![-1isize; v_len as usize];
    v1[(v_off + 1) as usize] = 0;
    v2[(v_off + 1) as usize] = 0;
    let delta = n - m;
    // With an odd delta the forward path is the one that meets the reverse path.
    let front = delta % 2 != 0;
    let (mut k1start, mut k1end, mut k2start, mut k2end) = (0isize, 0isize, 0isize, 0isize);

    for d in 0..max_d {
        let mut k1 = -d + k1start;
        while k1 < d + 1 - k1end {
            let k1_off = (v_off + k1) as usize;
            let mut x1 = if k1 == -d || (k1 != d && v1[k1_off - 1] < v1[k1_off + 1]) {
                v1[k1_off + 1]
            } else {
                v1[k1_off - 1] + 1
            };
            let mut y1 = x1 - k1;
            while x1 < n && y1 < m && a[x1 as usize] == b[y1 as usize] {
                x1 += 1;
                y1 += 1;
            }
            v1[k1_off] = x1;
            if x1 > n {
                k1end += 2;
            } else if y1 > m {
                k1start += 2;
            } else if front {
                let k2_off = v_off + delta - k1;
                if k2_off >= 0 && k2_off < v_len && v2[k2_off as usize] != -1 {
                    let x2 = n - v2[k2_off as usize];
                    if x1 >= x2 {
                        return Some((x1 as usize, y1 as usize));
                    }
                }
            }
            k1 += 2;
        }

        let mut k2 = -d + k2start;
        while k2 < d + 1 - k2end {
            let k2_off = (v_off + k2) as usize;
            let mut x2 = if k2 == -d || (k2 != d && v2[k2_off - 1] < v2[k2_off + 1]) {
                v2[k2_off + 1]
            } else {
                v2[k2_off - 1] + 1
            };
            let mut y2 = x2 - k2;
            while x2 < n && y2 < m && a[(n - x2 - 1) as usize] == b[(m - y2 - 1) as usize] {
                x2 += 1;
                y2 += 1;
            }
            v2[k2_off] = x2;
            if x2 > n {
                k2end += 2;
            } else if y2 > m {
                k2start += 2;
            } else if !front {
                let k1_off = v_off + delta - k2;
                if k1_off >= 0 && k1_off < v_len && v1[k1_off as usize] != -1 {
                    let x1 = v1[k1_off as usize];
                    let y1 = v_off + x1 - k1_off;
                    if x1 >= n - x2 {
                        return Some((x1 as usize, y1 as usize));
                    }
                }
            }
            k2 += 2;
        }
    }
    None
}

//! Closed 1D intervals on a pipe parameter or arc length.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn centered(center: f64, len: f64) -> Self {
        Interval::new(center - len / 2.0, center + len / 2.0)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn clamp(&self, lo: f64, hi: f64) -> Option<Interval> {
        let c = Interval {
            lo: self.lo.max(lo),
            hi: self.hi.min(hi),
        };
        (c.hi > c.lo).then_some(c)
    }
}

/// Sorts and merges overlapping or touching intervals.
pub fn merge(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.retain(|i| !i.is_empty());
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for i in parts {
        match out.last_mut() {
            Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
            _ => out.push(i),
        }
    }
    out
}

/// The parts of `[lo, hi]` not covered by `masks`.
pub fn subtract(lo: f64, hi: f64, masks: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut at = lo;
    for m in merge(masks.to_vec()) {
        if m.hi <= at {
            continue;
        }
        if m.lo >= hi {
            break;
        }
        if m.lo > at {
            out.push(Interval::new(at, m.lo));
        }
        at = at.max(m.hi);
    }
    if at < hi {
        out.push(Interval::new(at, hi));
    }
    out
}

/// Whether `masks` cover `[lo, hi]` up to `eps`.
pub fn covers(lo: f64, hi: f64, masks: &[Interval], eps: f64) -> bool {
    subtract(lo, hi, masks).iter().all(|i| i.len() <= eps)
}

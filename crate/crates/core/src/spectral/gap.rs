use super::measure::SpectralMeasure;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Axis-aligned box `[lo, hi]` in the dual space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GapRegion {
    pub fn sides(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
    }
}

/// Default half-width of the searched window.
pub fn default_window(s: &SpectralMeasure) -> f64 {
    if s.domain.is_discrete() {
        PI
    } else {
        match s.dim() {
            1 => 50.0,
            2 => 10.0,
            _ => 5.0,
        }
    }
}

/// Largest box in the default window on which the density stays below `floor` and no atom lies.
pub fn spectral_gap_search(s: &SpectralMeasure, resolution: f64, floor: f64) -> Option<GapRegion> {
    spectral_gap_search_in(s, resolution, floor, default_window(s))
}

pub fn spectral_gap_search_in(s: &SpectralMeasure, resolution: f64, floor: f64, window: f64) -> Option<GapRegion> {
    assert!(resolution > 0.0, "resolution must be positive");
    let d = s.dim();
    let max_cells = match d {
        1 => 2_000_000,
        2 => 1500,
        3 => 40,
        _ => 16,
    };
    let n = ((2.0 * window / resolution).ceil() as usize).min(max_cells).max(1);
    let h = 2.0 * window / n as f64;
    if h > resolution * (1.0 + 1e-12) && d == 1 {
        return None;
    }
    let node = |i: usize| -window + h * i as f64;
    let low = |u: &[f64]| s.density_at(u) < floor;
    let total: usize = n.pow(d as u32);
    let mut good = vec![true; total];
    // atoms kill the closed cells that contain them
    for a in &s.atoms {
        if a.1 == 0.0 {
            continue;
        }
        let mut ranges = Vec::with_capacity(d);
        for &x in &a.0 {
            let t = (x + window) / h;
            if t < -1e-12 || t > n as f64 + 1e-12 {
                ranges.clear();
                break;
            }
            let lo = (t - 1e-9).floor().max(0.0) as usize;
            let hi = ((t + 1e-9).floor() as usize).min(n - 1);
            ranges.push((lo.min(n - 1), hi));
        }
        if ranges.len() != d {
            continue;
        }
        for_each_index(&ranges, |idx| good[flat(idx, n)] = false);
    }
    match d {
        1 => {
            let vals: Vec<bool> = (0..=2 * n).map(|i| low(&[-window + 0.5 * h * i as f64])).collect();
            for i in 0..n {
                good[i] = good[i] && vals[2 * i] && vals[2 * i + 1] && vals[2 * i + 2];
            }
            let (mut best, mut best_end, mut run) = (0usize, 0usize, 0usize);
            for (i, g) in good.iter().enumerate() {
                run = if *g { run + 1 } else { 0 };
                if run > best {
                    best = run;
                    best_end = i + 1;
                }
            }
            (best > 0).then(|| GapRegion { lo: vec![node(best_end - best)], hi: vec![node(best_end)] })
        }
        2 => {
            let m = 2 * n + 1;
            let mut vals = vec![false; m * m];
            for i in 0..m {
                for j in 0..m {
                    vals[i * m + j] = low(&[-window + 0.5 * h * i as f64, -window + 0.5 * h * j as f64]);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let mut ok = good[i * n + j];
                    for a in 0..3 {
                        for b in 0..3 {
                            ok &= vals[(2 * i + a) * m + 2 * j + b];
                        }
                    }
                    good[i * n + j] = ok;
                }
            }
            largest_rectangle(&good, n).map(|(i0, i1, j0, j1)| GapRegion {
                lo: vec![node(i0), node(j0)],
                hi: vec![node(i1), node(j1)],
            })
        }
        _ => {
            let all = vec![(0usize, n - 1); d];
            for_each_index(&all, |idx| {
                let f = flat(idx, n);
                if !good[f] {
                    return;
                }
                let center: Vec<f64> = idx.iter().map(|&i| node(i) + 0.5 * h).collect();
                let mut ok = low(&center);
                let corners = vec![(0usize, 1usize); d];
                for_each_index(&corners, |c| {
                    let p: Vec<f64> = idx.iter().zip(c).map(|(&i, &o)| node(i + o)).collect();
                    ok &= low(&p);
                });
                good[f] = ok;
            });
            // largest all-good cube via the max-square recursion
            let mut size = vec![0u32; total];
            let mut best = (0u32, vec![0usize; d]);
            for_each_index(&all, |idx| {
                let f = flat(idx, n);
                if !good[f] {
                    return;
                }
                let mut m = u32::MAX;
                if idx.iter().any(|&i| i == 0) {
                    m = 0;
                } else {
                    let back = vec![(0usize, 1usize); d];
                    for_each_index(&back, |c| {
                        if c.iter().all(|&o| o == 0) {
                            return;
                        }
                        let p: Vec<usize> = idx.iter().zip(c).map(|(&i, &o)| i - o).collect();
                        m = m.min(size[flat(&p, n)]);
                    });
                }
                size[f] = m + 1;
                if size[f] > best.0 {
                    best = (size[f], idx.to_vec());
                }
            });
            (best.0 > 0).then(|| {
                let k = best.0 as usize;
                GapRegion {
                    lo: best.1.iter().map(|&i| node(i + 1 - k)).collect(),
                    hi: best.1.iter().map(|&i| node(i + 1)).collect(),
                }
            })
        }
    }
}

fn flat(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

fn for_each_index(ranges: &[(usize, usize)], mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return;
    }
    loop {
        f(&idx);
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
        }
    }
}

/// Maximal-area all-true rectangle of an `n × n` row-major grid: `(row0, row1, col0, col1)` in node units.
fn largest_rectangle(good: &[bool], n: usize) -> Option<(usize, usize, usize, usize)> {
    let mut heights = vec![0usize; n];
    let mut best: Option<(usize, (usize, usize, usize, usize))> = None;
    for i in 0..n {
        for j in 0..n {
            heights[j] = if good[i * n + j] { heights[j] + 1 } else { 0 };
        }
        let mut stack: Vec<usize> = Vec::new();
        for j in 0..=n {
            let h = if j < n { heights[j] } else { 0 };
            while let Some(&top) = stack.last() {
                if heights[top] <= h {
                    break;
                }
                stack.pop();
                let height = heights[top];
                let left = stack.last().map_or(0, |&l| l + 1);
                let area = height * (j - left);
                if best.map_or(true, |(a, _)| area > a) {
                    best = Some((area, (i + 1 - height, i + 1, left, j)));
                }
            }
            stack.push(j);
        }
    }
    best.filter(|(a, _)| *a > 0).map(|(_, r)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Atom, Density, DomainTag};

    #[test]
    fn triangle_has_no_gap() {
        let s = crate::models::TriangleModel::canonical(1).spectral_measure();
        assert!(spectral_gap_search(&s, 0.01, 1e-12).is_none());
    }

    #[test]
    fn ball_gap_in_two_dimensions() {
        let s = SpectralMeasure::new(DomainTag::continuous(2), Density::GapIndicator { radius: 1.0, value: 1.0 }, vec![]);
        let g = spectral_gap_search_in(&s, 0.02, 0.5, 2.0).unwrap();
        let side = 2f64.sqrt();
        for x in g.sides() {
            assert!((x - side).abs() < 0.06, "{:?}", g);
        }
        assert!(g.contains(&[0.0, 0.0]));
        // inside the disc
        for c in [[g.lo[0], g.lo[1]], [g.hi[0], g.hi[1]]] {
            assert!((c[0] * c[0] + c[1] * c[1]).sqrt() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn interval_gap_in_one_dimension() {
        let s = SpectralMeasure::new(DomainTag::continuous(1), Density::GapIndicator { radius: 0.5, value: 1.0 }, vec![]);
        let g = spectral_gap_search(&s, 0.01, 1e-12).unwrap();
        assert!((g.lo[0] + 0.5).abs() < 0.011 && (g.hi[0] - 0.5).abs() < 0.011);
    }

    #[test]
    fn atoms_split_gaps() {
        // Λ* = 2πℤ without the origin, inside [-10, 10]
        let atoms: Vec<Atom> = (-3..=3).filter(|k| *k != 0).map(|k| Atom(vec![2.0 * PI * k as f64], 1.0)).collect();
        let s = SpectralMeasure::atomic(DomainTag::continuous(1), atoms);
        let g = spectral_gap_search_in(&s, 0.01, 1e-12, 10.0).unwrap();
        // the missing origin atom leaves the widest gap (-2π, 2π)
        assert!((g.lo[0] + 2.0 * PI).abs() < 0.02 && (g.hi[0] - 2.0 * PI).abs() < 0.02, "{g:?}");
        for a in &s.atoms {
            assert!(!(g.lo[0] < a.0[0] && a.0[0] < g.hi[0]));
        }
    }

    #[test]
    fn cube_gap_in_three_dimensions() {
        let s = SpectralMeasure::new(DomainTag::continuous(3), Density::GapIndicator { radius: 1.0, value: 1.0 }, vec![]);
        let g = spectral_gap_search_in(&s, 0.05, 0.5, 1.5).unwrap();
        let side = 2.0 / 3f64.sqrt();
        assert!(g.sides()[0] <= side + 1e-9 && g.sides()[0] > side - 0.2, "{g:?}");
    }
}

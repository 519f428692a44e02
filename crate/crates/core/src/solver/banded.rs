use crate::error::{Error, Result};

/// Symmetric banded matrix storing the lower band row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn new(n: usize, bandwidth: usize) -> Self {
        let bw = bandwidth.min(n.saturating_sub(1));
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw + j - i
    }

    /// Adds to entry `(i, j)` with `j <= i`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.index(i, j)]
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.data[self.index(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.data[self.index(i, i)] * x[i];
        }
        y
    }
}

/// Pivot signs of an LDL^T factorization (Sylvester's law of inertia).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// `A = L D L^T` without pivoting.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    l: BandedMatrix,
    d: Vec<f64>,
    pub inertia: Inertia,
}

/// Pivots below this fraction of the original diagonal count as zero.
pub const ZERO_PIVOT: f64 = 1e-11;

impl LdlFactor {
    pub fn new(a: &BandedMatrix) -> Result<Self> {
        let n = a.n;
        let bw = a.bw;
        let mut l = a.clone();
        let mut d = vec![0.0; n];
        let mut inertia = Inertia::default();
        let mut v = vec![0.0; bw + 1];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * (bw + 1) + bw - i;
            // v[j - lo] = L[i][j] d[j]
            for j in lo..i {
                let jlo = lo.max(j.saturating_sub(bw));
                let jrow = j * (bw + 1) + bw - j;
                let mut s = l.data[row + j];
                for k in jlo..j {
                    s -= v[k - lo] * l.data[jrow + k];
                }
                v[j - lo] = s;
                l.data[row + j] = s / d[j];
            }
            let mut dii = l.data[row + i];
            for j in lo..i {
                dii -= v[j - lo] * l.data[row + j];
            }
            let scale = a.data[row + i].abs();
            if !dii.is_finite() {
                return Err(Error::Solver(format!("non-finite pivot at equation {i}")));
            }
            if dii.abs() <= ZERO_PIVOT * scale || dii == 0.0 {
                // keep factoring so the remaining pivots are still counted
                inertia.zero += 1;
                dii = scale.max(1.0);
            } else if dii < 0.0 {
                inertia.negative += 1;
            } else {
                inertia.positive += 1;
            }
            d[i] = dii;
            l.data[row + i] = 1.0;
        }
        Ok(Self { l, d, inertia })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.inertia.zero > 0 {
            return Err(Error::Solver(format!("matrix is singular ({} zero pivots)", self.inertia.zero)));
        }
        let n = self.d.len();
        let bw = self.l.bw;
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * (bw + 1) + bw - i;
            let mut s = x[i];
            for j in lo..i {
                s -= self.l.data[row + j] * x[j];
            }
            x[i] = s;
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let row = i * (bw + 1) + bw - i;
            let xi = x[i];
            for j in lo..i {
                x[j] -= self.l.data[row + j] * xi;
            }
        }
        Ok(x)
    }
}

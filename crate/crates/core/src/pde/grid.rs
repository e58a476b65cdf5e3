use serde::{Deserialize, Serialize};

/// Uniform cell-centred grid on [0, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub cells: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(cells: usize, length: f64) -> Self {
        Grid { cells, length }
    }

    pub fn h(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    /// Face j sits at x = j h, j = 0..=N.
    pub fn face(&self, j: usize) -> f64 {
        if j == self.cells {
            self.length
        } else {
            j as f64 * self.h()
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    pub fn faces(&self) -> Vec<f64> {
        (0..=self.cells).map(|j| self.face(j)).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub rejected: usize,
    pub min_u: f64,
    pub max_u: f64,
}

/// Snapshots of cell averages at the requested output times. For coupled
/// runs `v` holds the chemoattractant at the faces (N + 1 values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSolution {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Option<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}

impl GridSolution {
    pub(crate) fn new(grid: Grid, coupled: bool) -> Self {
        GridSolution {
            grid,
            times: Vec::new(),
            u: Vec::new(),
            v: coupled.then(Vec::new),
            diagnostics: Diagnostics {
                min_u: f64::INFINITY,
                max_u: f64::NEG_INFINITY,
                ..Default::default()
            },
        }
    }

    /// Builds a solution from externally computed snapshots (one `u` per time).
    pub fn from_snapshots(grid: Grid, times: Vec<f64>, u: Vec<Vec<f64>>) -> Self {
        let mut s = GridSolution::new(grid, false);
        for (t, u) in times.iter().zip(&u) {
            s.record(*t, u, None);
        }
        s
    }

    pub(crate) fn record(&mut self, t: f64, u: &[f64], v: Option<&[f64]>) {
        for &x in u {
            self.diagnostics.min_u = self.diagnostics.min_u.min(x);
            self.diagnostics.max_u = self.diagnostics.max_u.max(x);
        }
        self.times.push(t);
        self.u.push(u.to_vec());
        if let (Some(vs), Some(v)) = (self.v.as_mut(), v) {
            vs.push(v.to_vec());
        }
    }

    /// Index of the snapshot closest to `t`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
    }

    pub fn mass(&self, k: usize) -> f64 {
        self.u[k].iter().sum::<f64>() * self.grid.h()
    }

    /// Piecewise-linear interpolation through the cell centres of snapshot k.
    pub fn sample(&self, k: usize, x: f64) -> f64 {
        let u = &self.u[k];
        let h = self.grid.h();
        let p = x / h - 0.5;
        if p <= 0.0 {
            return u[0];
        }
        let i = p.floor() as usize;
        if i + 1 >= u.len() {
            return u[u.len() - 1];
        }
        let w = p - i as f64;
        u[i] * (1.0 - w) + u[i + 1] * w
    }

    /// First position, scanning right from x = 0, where snapshot k crosses
    /// `threshold` upwards (linear interpolation between cell centres).
    /// Returns 0 when the first cell is already above the threshold.
    pub fn first_crossing(&self, k: usize, threshold: f64) -> Option<f64> {
        let u = &self.u[k];
        if u[0] >= threshold {
            return Some(0.0);
        }
        for i in 1..u.len() {
            if u[i] >= threshold {
                let w = (threshold - u[i - 1]) / (u[i] - u[i - 1]);
                return Some(self.grid.center(i - 1) + w * self.grid.h());
            }
        }
        None
    }

    /// Half-plateau front, with the plateau read off at `plateau_at`.
    pub fn front_at(&self, k: usize, plateau_at: f64) -> Option<f64> {
        let plateau = self.sample(k, plateau_at.clamp(0.0, self.grid.length));
        if plateau <= 0.0 {
            return None;
        }
        self.first_crossing(k, 0.5 * plateau)
    }

    /// Half-plateau front without an analytic hint: the plateau is read a
    /// distance `offset` to the right of the steepest ascent.
    pub fn front_standalone(&self, k: usize, offset: f64) -> Option<f64> {
        let u = &self.u[k];
        let (i, _) = u
            .windows(2)
            .enumerate()
            .max_by(|a, b| (a.1[1] - a.1[0]).total_cmp(&(b.1[1] - b.1[0])))?;
        let x = self.grid.face(i + 1) + offset;
        self.front_at(k, x)
    }

    /// Face values of v interpolated to cell centres.
    pub fn v_at_centers(&self, k: usize) -> Option<Vec<f64>> {
        let v = &self.v.as_ref()?[k];
        Some(v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
    }

    /// Long-format CSV `t,x,u[,v]` at cell centres.
    pub fn to_csv(&self) -> String {
        let coupled = self.v.is_some();
        let mut s = String::from(if coupled { "t,x,u,v\n" } else { "t,x,u\n" });
        for (k, t) in self.times.iter().enumerate() {
            let vc = self.v_at_centers(k);
            for (i, u) in self.u[k].iter().enumerate() {
                let x = self.grid.center(i);
                match &vc {
                    Some(v) => s.push_str(&format!("{t},{x},{u},{}\n", v[i])),
                    None => s.push_str(&format!("{t},{x},{u}\n")),
                }
            }
        }
        s
    }
}

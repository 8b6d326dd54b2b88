use std::io::{Read, Write};

use crate::model::{Dim, ModelParams};
use crate::{Error, Result, Scalar, Vector};

/// Realised memory-truncation error of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport<T> {
    /// Time span of the memory window.
    pub horizon: T,
    /// Largest `|H|` observed at the far end of the window.
    pub h_sup_observed: T,
    /// `h_sup_observed * int_horizon^inf K`.
    pub bound: T,
    /// Same with `sup |H|` over all displacements.
    pub certified_bound: T,
}

/// Provenance of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta<T> {
    pub seed: u64,
    pub stream: u64,
    /// Integration step.
    pub dt: T,
    pub params: Option<ModelParams<T>>,
    pub truncation: Option<TruncationReport<T>>,
}

/// Path sampled on a uniform output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub dim: Dim,
    pub times: Vec<T>,
    pub positions: Vec<Vector<T>>,
    pub velocities: Vec<Vector<T>>,
    pub meta: TrajectoryMeta<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn with_capacity(dim: Dim, n: usize, meta: TrajectoryMeta<T>) -> Self {
        Self {
            dim,
            times: Vec::with_capacity(n),
            positions: Vec::with_capacity(n),
            velocities: Vec::with_capacity(n),
            meta,
        }
    }

    pub fn push(&mut self, t: T, x: Vector<T>, v: Vector<T>) {
        self.times.push(t);
        self.positions.push(x);
        self.velocities.push(v);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Spacing of the output grid.
    pub fn sample_spacing(&self) -> Option<T> {
        match self.times.as_slice() {
            [a, b, ..] => Some(*b - *a),
            _ => None,
        }
    }

    pub fn span(&self) -> T {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => *b - *a,
            _ => T::zero(),
        }
    }

    pub fn header(&self) -> &'static str {
        match self.dim {
            Dim::One => "t,x,vx",
            Dim::Two => "t,x,y,vx,vy",
        }
    }

    /// CSV with shortest round-trip number formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "{}", self.header())?;
        for ((t, x), v) in self.times.iter().zip(&self.positions).zip(&self.velocities) {
            match self.dim {
                Dim::One => writeln!(out, "{t},{},{}", x.x, v.x)?,
                Dim::Two => writeln!(out, "{t},{},{},{},{}", x.x, x.y, v.x, v.y)?,
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the format produced by [`Trajectory::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let dim = match headers.join(",").as_str() {
            "t,x,vx" => Dim::One,
            "t,x,y,vx,vy" => Dim::Two,
            other => return Err(Error::Parse(format!("unexpected trajectory header `{other}`"))),
        };
        let meta = TrajectoryMeta {
            seed: 0,
            stream: 0,
            dt: T::zero(),
            params: None,
            truncation: None,
        };
        let mut traj = Self::with_capacity(dim, 0, meta);
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let cols = record
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map(T::lit)
                        .map_err(|e| Error::Parse(format!("row {}: `{f}`: {e}", line + 2)))
                })
                .collect::<Result<Vec<T>>>()?;
            match (dim, cols.as_slice()) {
                (Dim::One, [t, x, vx]) => traj.push(*t, Vector::scalar(*x), Vector::scalar(*vx)),
                (Dim::Two, [t, x, y, vx, vy]) => {
                    traj.push(*t, Vector::new(*x, *y), Vector::new(*vx, *vy))
                }
                _ => return Err(Error::Parse(format!("row {}: wrong column count", line + 2))),
            }
        }
        if let Some(h) = traj.sample_spacing() {
            traj.meta.dt = h;
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta() -> TrajectoryMeta<f64> {
        TrajectoryMeta {
            seed: 1,
            stream: 0,
            dt: 0.5,
            params: None,
            truncation: None,
        }
    }

    #[test]
    fn one_dimensional_header_omits_y() {
        let mut t = Trajectory::with_capacity(Dim::One, 1, meta());
        t.push(0.0, Vector::scalar(1.5), Vector::scalar(-0.25));
        assert_eq!(t.to_csv_string(), "t,x,vx\n0,1.5,-0.25\n");
    }

    #[test]
    fn rejects_unknown_header() {
        assert!(Trajectory::<f64>::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(Trajectory::<f64>::read_csv("t,x,vx\n1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in proptest::collection::vec(proptest::array::uniform5(-1e6f64..1e6), 1..20)) {
            let mut t = Trajectory::with_capacity(Dim::Two, rows.len(), meta());
            for r in &rows {
                t.push(r[0], Vector::new(r[1], r[2]), Vector::new(r[3], r[4]));
            }
            let back = Trajectory::<f64>::read_csv(t.to_csv_string().as_bytes()).unwrap();
            prop_assert_eq!(back.times, t.times);
            prop_assert_eq!(back.positions, t.positions);
            prop_assert_eq!(back.velocities, t.velocities);
        }
    }
}

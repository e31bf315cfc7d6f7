//! Method-of-lines solver for i q_t + q_xx + 2 q² conj(q(−x)) = 0 on [−L, L] with
//! q(−L) = 0 and q(L) = A.
//!
//! Fourth-order centred differences in x, classical RK4 in t. The grid has an odd number
//! of nodes placed symmetrically about 0, so x ↦ −x is the index map j ↦ N−1−j.

use crate::profiles::{check_symmetric, sample_profile, symmetric_grid, InitialProfile};
use crate::{Error, Result, C64, I};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// dt ≤ C_STAB·h². RK4 on the imaginary axis is stable up to 2√2 and the fourth-order
/// Laplacian has spectral radius 16/(3h²), giving a hard limit of about 0.53 h².
pub const C_STAB: f64 = 0.5;
/// Abort when max|q| exceeds this multiple of A.
pub const BLOW_UP_FACTOR: f64 = 1e3;
/// Abort when the field next to either boundary departs from the pinned value by more.
pub const DRIFT_ABORT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub grid: Vec<f64>,
    pub t: f64,
    pub q: Vec<C64>,
}

impl FieldSnapshot {
    pub fn new(grid: Vec<f64>, t: f64, q: Vec<C64>) -> Result<Self> {
        if grid.len() != q.len() || grid.len() < 5 || grid.len() % 2 == 0 {
            return Err(Error::Invalid(format!("snapshot needs an odd grid of >= 5 nodes matching q ({} vs {})", grid.len(), q.len())));
        }
        check_symmetric(&grid)?;
        Ok(Self { grid, t, q })
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn half_width(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    /// Four-point Lagrange interpolation of q at x.
    pub fn sample(&self, x: f64) -> Result<C64> {
        let n = self.grid.len();
        let l = self.half_width();
        if !(x.abs() <= l) {
            return Err(Error::Domain(format!("x = {x} outside the computational domain [-{l}, {l}]")));
        }
        let h = self.spacing();
        let j = (((x + l) / h).floor() as usize).clamp(1, n - 3);
        let xs = &self.grid[j - 1..j + 3];
        let mut v = C64::new(0.0, 0.0);
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (x - xs[b]) / (xs[a] - xs[b]);
                }
            }
            v += self.q[j - 1 + a] * w;
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveParams {
    pub half_width: f64,
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    /// Emit a snapshot every `stride` steps (0: only requested times and the final time).
    #[serde(default)]
    pub stride: usize,
    /// Additional output times, hit exactly.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl EvolveParams {
    /// Grid with spacing close to h (rounded to an odd node count) and dt = C_STAB·h².
    pub fn with_spacing(half_width: f64, h: f64, t_final: f64) -> Self {
        let mut n = (2.0 * half_width / h).round() as usize + 1;
        if n % 2 == 0 {
            n += 1;
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        Self { half_width, n, dt: C_STAB * h * h, t_final, stride: 0, snapshot_times: Vec::new() }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 || self.n % 2 == 0 {
            return Err(Error::Invalid(format!("grid size must be odd and >= 5, got {}", self.n)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::Invalid(format!("half width must be positive, got {}", self.half_width)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Invalid(format!("final time must be nonnegative, got {}", self.t_final)));
        }
        let h = self.spacing();
        if !(self.dt > 0.0) || self.dt > C_STAB * h * h * (1.0 + 1e-12) {
            return Err(Error::Invalid(format!("dt = {} violates dt <= {C_STAB}·h² = {}", self.dt, C_STAB * h * h)));
        }
        if self.snapshot_times.iter().any(|&t| !(t > 0.0 && t <= self.t_final)) {
            return Err(Error::Invalid("snapshot times must lie in (0, T]".into()));
        }
        Ok(())
    }
}

/// N[q]_j = 2 q_j² conj(q_{N−1−j}).
pub fn mirror_nonlinearity(snap: &FieldSnapshot) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); snap.q.len()];
    nonlinearity_into(&snap.q, &mut out);
    out
}

fn nonlinearity_into(q: &[C64], out: &mut [C64]) {
    let n = q.len();
    for j in 0..n {
        out[j] = 2.0 * q[j] * q[j] * q[n - 1 - j].conj();
    }
}

/// ∫ q(x)·conj(q(−x)) dx by the trapezoid rule.
pub fn conserved_probe(snap: &FieldSnapshot) -> C64 {
    let n = snap.q.len();
    let h = snap.spacing();
    let f = |j: usize| snap.q[j] * snap.q[n - 1 - j].conj();
    let inner: C64 = (1..n - 1).map(f).sum();
    h * (inner + 0.5 * (f(0) + f(n - 1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveRun {
    pub snapshots: Vec<FieldSnapshot>,
    /// Conserved-density probe at each snapshot.
    pub probes: Vec<C64>,
    /// Largest departure of the near-boundary field from the pinned values.
    pub max_boundary_drift: f64,
    /// Set when the run stopped early (blow-up or boundary drift); snapshots up to then are kept.
    pub aborted: Option<Error>,
    pub steps: usize,
}

impl EvolveRun {
    pub fn last(&self) -> &FieldSnapshot {
        self.snapshots.last().expect("a run always holds the initial snapshot")
    }

    /// Snapshot whose time is within 1e-9 of t.
    pub fn at_time(&self, t: f64) -> Option<&FieldSnapshot> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-9 * t.max(1.0))
    }
}

struct Stepper {
    h2: f64,
    left: C64,
    right: C64,
    nl: Vec<C64>,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl Stepper {
    fn new(n: usize, h: f64, amplitude: f64) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            h2: h * h,
            left: C64::new(0.0, 0.0),
            right: C64::new(amplitude, 0.0),
            nl: z.clone(),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    /// out = i(q_xx + N[q]) on interior nodes, 0 on the pinned ends. Values beyond the
    /// ends are taken equal to the boundary values.
    fn rhs(h2: f64, left: C64, right: C64, q: &[C64], nl: &mut [C64], out: &mut [C64]) {
        let n = q.len();
        nonlinearity_into(q, nl);
        let at = |j: isize| -> C64 {
            if j < 0 {
                left
            } else if j as usize >= n {
                right
            } else {
                q[j as usize]
            }
        };
        out[0] = C64::new(0.0, 0.0);
        out[n - 1] = C64::new(0.0, 0.0);
        for j in 1..n - 1 {
            let lap = if j >= 2 && j + 2 < n {
                (-q[j - 2] + 16.0 * q[j - 1] - 30.0 * q[j] + 16.0 * q[j + 1] - q[j + 2]) / (12.0 * h2)
            } else {
                let ji = j as isize;
                (-at(ji - 2) + 16.0 * at(ji - 1) - 30.0 * q[j] + 16.0 * at(ji + 1) - at(ji + 2)) / (12.0 * h2)
            };
            out[j] = I * (lap + nl[j]);
        }
    }

    fn step(&mut self, q: &mut [C64], dt: f64) {
        let (h2, l, r) = (self.h2, self.left, self.right);
        let n = q.len();
        let [k1, k2, k3, k4] = &mut self.k;
        Self::rhs(h2, l, r, q, &mut self.nl, k1);
        for j in 0..n {
            self.tmp[j] = q[j] + 0.5 * dt * k1[j];
        }
        Self::rhs(h2, l, r, &self.tmp, &mut self.nl, k2);
        for j in 0..n {
            self.tmp[j] = q[j] + 0.5 * dt * k2[j];
        }
        Self::rhs(h2, l, r, &self.tmp, &mut self.nl, k3);
        for j in 0..n {
            self.tmp[j] = q[j] + dt * k3[j];
        }
        Self::rhs(h2, l, r, &self.tmp, &mut self.nl, k4);
        for j in 0..n {
            q[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        q[0] = l;
        q[n - 1] = r;
    }
}

/// Integrate from q₀ = profile to T, returning the snapshot sequence (t = 0 included).
pub fn evolve(p: &InitialProfile, ep: &EvolveParams) -> Result<EvolveRun> {
    ep.validate()?;
    let grid = symmetric_grid(ep.half_width, ep.n);
    let q0 = sample_profile(p, &grid)?;
    evolve_from(FieldSnapshot::new(grid, 0.0, q0)?, p.amplitude, ep)
}

/// Integrate from an arbitrary initial snapshot with pinned values 0 and `amplitude`.
pub fn evolve_from(initial: FieldSnapshot, amplitude: f64, ep: &EvolveParams) -> Result<EvolveRun> {
    ep.validate()?;
    if initial.q.len() != ep.n {
        return Err(Error::Invalid(format!("snapshot has {} nodes, parameters {}", initial.q.len(), ep.n)));
    }
    let n = ep.n;
    let h = initial.spacing();
    let mut stepper = Stepper::new(n, h, amplitude);
    let mut q = initial.q.clone();
    q[0] = stepper.left;
    q[n - 1] = stepper.right;

    let mut stops: Vec<f64> = ep.snapshot_times.clone();
    stops.push(ep.t_final);
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let t0 = initial.t;
    let grid = initial.grid.clone();
    let mut run = EvolveRun {
        probes: vec![conserved_probe(&initial)],
        snapshots: vec![initial],
        max_boundary_drift: 0.0,
        aborted: None,
        steps: 0,
    };
    let limit = BLOW_UP_FACTOR * amplitude.max(f64::MIN_POSITIVE);
    let mut t_prev = 0.0;
    for &stop in &stops {
        if stop <= t_prev {
            continue;
        }
        let span = stop - t_prev;
        let m = (span / ep.dt).ceil().max(1.0) as usize;
        let dt = span / m as f64;
        for i in 1..=m {
            stepper.step(&mut q, dt);
            run.steps += 1;
            let t = t0 + t_prev + i as f64 * dt;
            let drift = (q[1] - stepper.left).norm().max((q[n - 2] - stepper.right).norm());
            run.max_boundary_drift = run.max_boundary_drift.max(drift);
            let max = q.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let failure = if !max.is_finite() || max > limit {
                Some(Error::BlowUp { t, max })
            } else if drift > DRIFT_ABORT {
                Some(Error::BoundaryDrift { t, drift })
            } else {
                None
            };
            if let Some(e) = failure {
                run.aborted = Some(e);
                return Ok(run);
            }
            let on_stride = ep.stride > 0 && run.steps % ep.stride == 0 && i < m;
            if on_stride || i == m {
                let snap = FieldSnapshot { grid: grid.clone(), t, q: q.clone() };
                run.probes.push(conserved_probe(&snap));
                run.snapshots.push(snap);
            }
        }
        t_prev = stop;
    }
    Ok(run)
}

/// Write snapshots as CSV rows `t,x,re,im` after `# key=value` metadata lines.
pub fn write_snapshots_csv<W: Write>(mut w: W, snaps: &[FieldSnapshot], meta: &[(&str, String)]) -> std::io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "t,x,re_q,im_q")?;
    for s in snaps {
        for (x, q) in s.grid.iter().zip(&s.q) {
            writeln!(w, "{:?},{:?},{:?},{:?}", s.t, x, q.re, q.im)?;
        }
    }
    Ok(())
}

/// Binary snapshot cache: u64 node count, u64 snapshot count, the grid, then per snapshot
/// t followed by re/im interleaved values. All little-endian.
pub fn write_snapshots_binary<W: Write>(mut w: W, snaps: &[FieldSnapshot]) -> std::io::Result<()> {
    let n = snaps.first().map_or(0, |s| s.grid.len());
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&(snaps.len() as u64).to_le_bytes())?;
    if let Some(s) = snaps.first() {
        for x in &s.grid {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    for s in snaps {
        w.write_all(&s.t.to_le_bytes())?;
        for q in &s.q {
            w.write_all(&q.re.to_le_bytes())?;
            w.write_all(&q.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_snapshots_binary<R: Read>(mut r: R) -> Result<Vec<FieldSnapshot>> {
    let io = |e: std::io::Error| Error::Invalid(format!("snapshot cache: {e}"));
    let mut b8 = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut b8).map_err(io)?;
        Ok(u64::from_le_bytes(b8))
    };
    let n = next_u64(&mut r)? as usize;
    let m = next_u64(&mut r)? as usize;
    let f = |r: &mut R| -> Result<f64> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(io)?;
        Ok(f64::from_le_bytes(b))
    };
    let grid = (0..n).map(|_| f(&mut r)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let t = f(&mut r)?;
        let q = (0..n).map(|_| Ok(C64::new(f(&mut r)?, f(&mut r)?))).collect::<Result<Vec<_>>>()?;
        out.push(FieldSnapshot::new(grid.clone(), t, q)?);
    }
    Ok(out)
}

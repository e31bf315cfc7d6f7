use crate::config::ExperimentConfig;
use crate::records::{case_label, write_csv, ComparisonRecord, GroupSummary, COMPARISON_SCHEMA, SUMMARY_SCHEMA};
use anyhow::{bail, Context, Result};
use nnls_core::pde::{evolve, write_snapshots_binary, write_snapshots_csv, EvolveRun};
use nnls_core::scattering::{CaseTag, SpectralData};
use nnls_core::wedge::{amplitude_q, fit_slope, gen_as_predict, matching_check, predict_q, psi, wedge_point, MatchingReport};
use rayon::prelude::*;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Compute the spectral data and write the JSON cache.
pub fn cmd_scatter(cfg: &ExperimentConfig, out: &Path) -> Result<(SpectralData, PathBuf)> {
    let sd = SpectralData::compute(&cfg.profile, &cfg.kgrid, &cfg.scatter_options()).context("computing spectral data")?;
    fs::create_dir_all(out)?;
    let path = cfg.cache_path(out);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&path, sd.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    Ok((sd, path))
}

/// Load the cache if it was built from this profile and k-grid, otherwise run `scatter`.
pub fn load_or_scatter(cfg: &ExperimentConfig, out: &Path) -> Result<SpectralData> {
    let path = cfg.cache_path(out);
    if let Ok(text) = fs::read_to_string(&path) {
        let sd = SpectralData::from_json(&text).with_context(|| format!("reading cache {}", path.display()))?;
        if sd.fingerprint == cfg.profile.fingerprint() && sd.samples.k == cfg.kgrid.nodes() {
            return Ok(sd);
        }
    }
    Ok(cmd_scatter(cfg, out)?.0)
}

fn group_key(r: &ComparisonRecord) -> (String, u64, u64) {
    (r.side.clone(), r.alpha.to_bits(), r.s.to_bits())
}

fn groups(records: &[ComparisonRecord]) -> Vec<Vec<usize>> {
    let mut keys: Vec<(String, u64, u64)> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let k = group_key(r);
        match keys.iter().position(|x| *x == k) {
            Some(j) => out[j].push(i),
            None => {
                keys.push(k);
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Least squares y ≈ c₂x² + c₁x + c₀; returns (c₂, c₁, c₀).
fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    if xs.len() < 3 {
        return None;
    }
    let mut m = [[0.0f64; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = [x * x, x, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * y;
        }
    }
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        m.swap(c, p);
        if m[c][c].abs() < 1e-300 {
            return None;
        }
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]))
}

fn log_slope(ts: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ts.iter().zip(ys).filter(|(_, y)| **y > 0.0).map(|(t, y)| (t.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Some(fit_slope(&xs, &ys))
}

/// Fill ledger-fit residuals and build per-group summaries.
pub fn summarize(records: &mut [ComparisonRecord], case: CaseTag) -> Vec<GroupSummary> {
    let mut out = Vec::new();
    for idx in groups(records) {
        let first = &records[idx[0]];
        let (side, alpha, s, branch) = (first.side.clone(), first.alpha, first.s, first.branch.clone());
        let ts: Vec<f64> = idx.iter().map(|&i| records[i].t).collect();
        let mut fitted_psi = None;
        if side == "+x" {
            let ls: Vec<f64> = idx.iter().map(|&i| (4.0 * records[i].s * records[i].t).ln()).collect();
            let ph: Vec<f64> = idx.iter().map(|&i| records[i].phase).collect();
            if let Some((c2, c1, c0)) = quadratic_fit(&ls, &ph) {
                fitted_psi = Some(-c2);
                for (k, &i) in idx.iter().enumerate() {
                    records[i].ledger_fit_residual = Some((ph[k] - (c2 * ls[k] * ls[k] + c1 * ls[k] + c0)).abs());
                }
            }
        }
        let gen: Vec<f64> = idx.iter().map(|&i| records[i].gen_gap_abs).collect();
        let ord: Vec<f64> = idx.iter().map(|&i| records[i].err_magnitude).collect();
        let pde: Vec<Option<f64>> = idx.iter().map(|&i| records[i].pde_gap_abs).collect();
        let modg: Vec<Option<f64>> = idx.iter().map(|&i| records[i].modulus_gap).collect();
        let present = |v: &[Option<f64>]| -> Option<(Vec<f64>, Vec<f64>)> {
            let pairs: Vec<(f64, f64)> = ts.iter().zip(v).filter_map(|(t, g)| g.map(|g| (*t, g))).collect();
            if pairs.is_empty() {
                None
            } else {
                Some(pairs.into_iter().unzip())
            }
        };
        let pde_fit = present(&pde).and_then(|(t, g)| log_slope(&t, &g));
        let mod_pts = present(&modg);
        out.push(GroupSummary {
            case: case_label(case).to_string(),
            side,
            alpha,
            s,
            branch,
            points: idx.len(),
            fitted_psi,
            expected_psi: (case == CaseTag::CaseI && fitted_psi.is_some()).then(|| psi(alpha)),
            gen_gap_exponent: log_slope(&ts, &gen),
            order_exponent: log_slope(&ts, &ord),
            pde_gap_exponent: pde_fit,
            modulus_gap_exponent: mod_pts.as_ref().and_then(|(t, g)| log_slope(t, g)),
            modulus_gap_decreasing: mod_pts.as_ref().map(|(_, g)| g.windows(2).all(|w| w[1] < w[0])),
        });
    }
    out
}

pub struct PredictOutput {
    pub records: Vec<ComparisonRecord>,
    pub summary: Vec<GroupSummary>,
}

fn predict_records(cfg: &ExperimentConfig, sd: &SpectralData) -> Result<Vec<ComparisonRecord>> {
    if !sd.assumption2_ok(cfg.tolerances.assumption2) {
        bail!(
            "arg(1 + r1 r2) -> {:.3e} as k -> 0-, above the assumption2 tolerance {:.1e}; the asymptotic formulas do not apply",
            sd.assumption2,
            cfg.tolerances.assumption2
        );
    }
    let mut points = Vec::new();
    for &side in &cfg.wedge.sides {
        for (alpha, s, t) in cfg.wedge_triples() {
            points.push(wedge_point(alpha, s, t, side)?);
        }
    }
    let a = sd.amplitude;
    points
        .par_iter()
        .map(|wp| {
            let p = predict_q(sd, wp)?;
            let g = gen_as_predict(sd, wp)?;
            Ok(ComparisonRecord::new(&p, &g, a))
        })
        .collect::<nnls_core::Result<Vec<_>>>()
        .context("evaluating wedge predictions")
}

fn notes(cfg: &ExperimentConfig, sd: &SpectralData) -> Vec<String> {
    vec![
        format!("profile={}", sd.fingerprint),
        format!("case={} amplitude={:?} k1={:?} assumption2={:?}", case_label(sd.case), sd.amplitude, sd.k1, sd.assumption2),
        format!("tolerances={:?}", cfg.tolerances),
    ]
}

fn write_outputs(
    out: &Path,
    stem: &str,
    notes: &[String],
    records: &[ComparisonRecord],
    summary: &[GroupSummary],
) -> Result<()> {
    fs::create_dir_all(out)?;
    let f = BufWriter::new(File::create(out.join(format!("{stem}.csv")))?);
    write_csv(f, COMPARISON_SCHEMA, notes, records)?;
    let f = BufWriter::new(File::create(out.join(format!("{stem}_summary.csv")))?);
    write_csv(f, SUMMARY_SCHEMA, notes, summary)?;
    Ok(())
}

/// Closed-form and intermediate-formula predictions on the wedge grid: `predict.csv` and
/// `predict_summary.csv`.
pub fn cmd_predict(cfg: &ExperimentConfig, sd: &SpectralData, out: &Path) -> Result<PredictOutput> {
    let mut records = predict_records(cfg, sd)?;
    let summary = summarize(&mut records, sd.case);
    write_outputs(out, "predict", &notes(cfg, sd), &records, &summary)?;
    Ok(PredictOutput { records, summary })
}

pub struct CompareOutput {
    pub records: Vec<ComparisonRecord>,
    pub summary: Vec<GroupSummary>,
    pub run: Option<EvolveRun>,
    /// Message when the direct solver stopped early; rows past that time have no PDE value.
    pub aborted: Option<String>,
}

/// Predictions joined with the direct solver: `compare.csv` and `compare_summary.csv`.
pub fn cmd_compare(cfg: &ExperimentConfig, sd: &SpectralData, out: &Path) -> Result<CompareOutput> {
    let mut records = predict_records(cfg, sd)?;
    let mut notes = notes(cfg, sd);
    let mut run = None;
    let mut aborted = None;
    if let Some(ep) = cfg.evolve_params()? {
        if !records.is_empty() {
            let r = evolve(&cfg.profile, &ep).context("direct solver")?;
            let q_amp = amplitude_q(sd)?;
            for rec in records.iter_mut() {
                if let Some(snap) = r.at_time(rec.t) {
                    let x = if rec.side == "+x" { rec.x } else { -rec.x };
                    rec.set_pde(snap.sample(x)?, sd.amplitude, q_amp);
                }
            }
            notes.push(format!(
                "pde L={:?} n={} dt={:?} steps={} max_boundary_drift={:.3e}",
                ep.half_width, ep.n, ep.dt, r.steps, r.max_boundary_drift
            ));
            if let Some(e) = &r.aborted {
                let msg = format!("pde aborted: {e}; rows past that time carry no solver value");
                notes.push(msg.clone());
                aborted = Some(msg);
            }
            if cfg.output.snapshots {
                fs::create_dir_all(out)?;
                let meta = [
                    ("profile", sd.fingerprint.clone()),
                    ("half_width", format!("{:?}", ep.half_width)),
                    ("n", ep.n.to_string()),
                    ("dt", format!("{:?}", ep.dt)),
                ];
                write_snapshots_csv(BufWriter::new(File::create(out.join("snapshots.csv"))?), &r.snapshots, &meta)?;
                write_snapshots_binary(BufWriter::new(File::create(out.join("snapshots.bin"))?), &r.snapshots)?;
            }
            run = Some(r);
        }
    } else {
        notes.push("pde skipped".into());
    }
    let summary = summarize(&mut records, sd.case);
    write_outputs(out, "compare", &notes, &records, &summary)?;
    Ok(CompareOutput { records, summary, run, aborted })
}

/// α → 1 consistency checks, one report per s: `match.txt`.
pub fn cmd_match(cfg: &ExperimentConfig, sd: &SpectralData, out: &Path) -> Result<Vec<MatchingReport>> {
    let m = &cfg.matching;
    let reports = cfg
        .wedge
        .s_values
        .iter()
        .map(|&s| matching_check(sd, s, &m.alphas, &m.log_ts, m.scale))
        .collect::<nnls_core::Result<Vec<_>>>()?;
    fs::create_dir_all(out)?;
    let mut w = BufWriter::new(File::create(out.join("match.txt"))?);
    writeln!(w, "# schema=nnls-wedge/match/1")?;
    writeln!(w, "# case={} (1-alpha)*ln t = {:?}", case_label(sd.case), m.scale)?;
    for r in &reports {
        writeln!(w, "[s = {:?}]", r.s)?;
        writeln!(w, "phase: alpha, ln t, Psi, 2 arg delta(0,s) expansion, residual, residual at own xi")?;
        for row in &r.phase_rows {
            writeln!(
                w,
                "  {:?}, {:?}, {:.12}, {:.12}, {:.6e}, {:.3e}",
                row.alpha, row.log_t, row.psi_value, row.target, row.residual, row.residual_at_xi
            )?;
        }
        writeln!(w, "phase residual decreasing: {}", r.phase_residual_decreasing)?;
        writeln!(w, "phi0(1,s) - 4 s^2 = {:?}", r.phi0_residual)?;
        if let Some(e) = r.minus_side_exponent {
            let ok = (e + 0.5).abs() <= cfg.tolerances.match_exponent;
            writeln!(w, "x<0 magnitude: ln t, ln|q|")?;
            for (lt, lq) in &r.minus_side_samples {
                writeln!(w, "  {lt:?}, {lq:.9}")?;
            }
            writeln!(w, "x<0 fitted t-exponent: {e:.6} (target -0.5 +/- {:?}: {})", cfg.tolerances.match_exponent, if ok { "ok" } else { "off" })?;
        }
        if let Some(nu) = r.nu_zero {
            writeln!(w, "nu(0) = {nu:.12}")?;
        }
        if let (Some(a), Some(b)) = (r.alpha_hat, r.alpha_hat_limit) {
            let ratio = a / b;
            writeln!(w, "alpha_hat = {:.12} {:+.12}i; limit of x<0 term = {:.12} {:+.12}i; ratio = {:.12} {:+.12}i", a.re, a.im, b.re, b.im, ratio.re, ratio.im)?;
        }
    }
    w.flush()?;
    Ok(reports)
}

/// Short human-readable digest of a summary table.
pub fn describe(summary: &[GroupSummary]) -> String {
    let mut s = String::new();
    for g in summary {
        s.push_str(&format!("{} {} alpha={} s={} [{}]", g.case, g.side, g.alpha, g.s, g.branch));
        if let (Some(f), Some(e)) = (g.fitted_psi, g.expected_psi) {
            s.push_str(&format!(" psi fit {f:.6} (expected {e:.6})"));
        }
        if let (Some(a), Some(b)) = (g.gen_gap_exponent, g.order_exponent) {
            s.push_str(&format!(" gap slope {a:.3} vs order {b:.3}"));
        }
        if let Some(p) = g.pde_gap_exponent {
            s.push_str(&format!(" pde gap slope {p:.3}"));
        }
        s.push('\n');
    }
    s
}

use anyhow::Result;
use nnls_core::scattering::CaseTag;
use nnls_core::wedge::{AsymptoticPrediction, Side};
use nnls_core::C64;
use serde::Serialize;
use std::io::Write;

pub const COMPARISON_SCHEMA: &str = "nnls-wedge/comparison/1";
pub const SUMMARY_SCHEMA: &str = "nnls-wedge/summary/1";

/// One row of `predict.csv` / `compare.csv`. Columns are described in docs/config.md.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub branch: String,
    pub case: String,
    pub side: String,
    pub alpha: f64,
    pub s: f64,
    pub t: f64,
    pub x: f64,
    pub xi: f64,
    pub out_of_band: bool,
    pub bound_only: bool,
    pub pred_re: f64,
    pub pred_im: f64,
    pub rasc_re: f64,
    pub rasc_im: f64,
    pub correction_re: f64,
    pub correction_im: f64,
    pub err_t_exponent: f64,
    pub err_log_power: f64,
    pub err_magnitude: f64,
    pub phase: f64,
    pub phase_power: f64,
    pub phase_log_sq: f64,
    pub phase_log_loglog: f64,
    pub phase_log: f64,
    pub phase_loglog: f64,
    pub phase_const: f64,
    pub ledger_fit_residual: Option<f64>,
    pub gen_re: f64,
    pub gen_im: f64,
    pub gen_gap_abs: f64,
    pub gen_gap_rel: f64,
    pub pde_re: Option<f64>,
    pub pde_im: Option<f64>,
    pub pde_gap_abs: Option<f64>,
    pub pde_gap_rel: Option<f64>,
    pub modulus_gap: Option<f64>,
}

pub fn case_label(c: CaseTag) -> &'static str {
    match c {
        CaseTag::CaseI => "I",
        CaseTag::CaseII => "II",
    }
}

pub fn side_label(s: Side) -> &'static str {
    match s {
        Side::PlusX => "+x",
        Side::MinusX => "-x",
    }
}

impl ComparisonRecord {
    pub fn new(pred: &AsymptoticPrediction, gen: &AsymptoticPrediction, amplitude: f64) -> Self {
        let wp = pred.point;
        let v = pred.value();
        let g = gen.value();
        let l = (4.0 * wp.s * wp.t).ln();
        let led = pred.ledger;
        let gap = (v - g).norm();
        Self {
            branch: pred.regime.code().to_string(),
            case: case_label(pred.case).to_string(),
            side: side_label(wp.side).to_string(),
            alpha: wp.alpha,
            s: wp.s,
            t: wp.t,
            x: wp.x,
            xi: wp.xi,
            out_of_band: pred.out_of_band,
            bound_only: pred.bound_only,
            pred_re: v.re,
            pred_im: v.im,
            rasc_re: pred.leading.re,
            rasc_im: pred.leading.im,
            correction_re: pred.correction.re,
            correction_im: pred.correction.im,
            err_t_exponent: pred.error_order.t_exponent,
            err_log_power: pred.error_order.log_power,
            err_magnitude: pred.error_order.magnitude(wp.t),
            phase: led.evaluate(wp.alpha, wp.s, l),
            phase_power: led.power,
            phase_log_sq: led.log_sq,
            phase_log_loglog: led.log_loglog,
            phase_log: led.log,
            phase_loglog: led.loglog,
            phase_const: led.constant,
            ledger_fit_residual: None,
            gen_re: g.re,
            gen_im: g.im,
            gen_gap_abs: gap,
            gen_gap_rel: gap / amplitude,
            pde_re: None,
            pde_im: None,
            pde_gap_abs: None,
            pde_gap_rel: None,
            modulus_gap: None,
        }
    }

    pub fn prediction(&self) -> C64 {
        C64::new(self.pred_re, self.pred_im)
    }

    /// Attach the direct-solver value q(±x,t); `q_amp` is the plateau amplitude Q.
    pub fn set_pde(&mut self, q: C64, amplitude: f64, q_amp: f64) {
        let gap = (q - self.prediction()).norm();
        self.pde_re = Some(q.re);
        self.pde_im = Some(q.im);
        self.pde_gap_abs = Some(gap);
        self.pde_gap_rel = Some(gap / amplitude);
        if self.side == "+x" {
            self.modulus_gap = Some((q.norm() - q_amp).abs());
        }
    }
}

/// Per (α, s, side) summary line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub case: String,
    pub side: String,
    pub alpha: f64,
    pub s: f64,
    pub branch: String,
    pub points: usize,
    /// −(fitted ℓ² coefficient of the phase column).
    pub fitted_psi: Option<f64>,
    pub expected_psi: Option<f64>,
    /// Least-squares slope of ln(gen gap) against ln t.
    pub gen_gap_exponent: Option<f64>,
    /// Same slope for the printed error order over the same ladder.
    pub order_exponent: Option<f64>,
    pub pde_gap_exponent: Option<f64>,
    pub modulus_gap_exponent: Option<f64>,
    pub modulus_gap_decreasing: Option<bool>,
}

/// CSV with a leading `# schema=...` comment line.
pub fn write_csv<W: Write, T: Serialize>(mut w: W, schema: &str, notes: &[String], rows: &[T]) -> Result<()> {
    writeln!(w, "# schema={schema}")?;
    for n in notes {
        writeln!(w, "# {n}")?;
    }
    let mut cw = csv::Writer::from_writer(w);
    for r in rows {
        cw.serialize(r)?;
    }
    cw.flush()?;
    Ok(())
}

//! CSV writers for trajectories, isotherms, envelopes and master-equation
//! comparisons. Floating-point fields carry 17 significant digits.

use std::io::Write;

use crate::error::Result;
use crate::isotherm::IsothermPoint;
use crate::transient::{EnvelopeSeries, MasterModel, MasterSample};
use crate::walker::TrajectoryRow;

pub const TRAJECTORY_HEADER: &str = "t,p_left,p_right,re_q,im_q,norm";
pub const TRAJECTORY_DENSITY_HEADER: &str = ",lambda_plus,lambda_minus,entropy_bits";
pub const ISOTHERM_HEADER: &str = "t_ratio_or_T,branch_id,x,y";
pub const ENVELOPE_HEADER: &str = "branch,t,value";
pub const MASTER_HEADER: &str = "t,lambda_plus_numeric,lambda_plus_closed,abs_err";

/// Decimal rendering with 17 significant digits, which round-trips any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    rows: &[TrajectoryRow],
    with_density: bool,
) -> Result<()> {
    write!(w, "{TRAJECTORY_HEADER}")?;
    if with_density {
        write!(w, "{TRAJECTORY_DENSITY_HEADER}")?;
    }
    writeln!(w)?;
    for row in rows {
        let s = &row.summary;
        write!(
            w,
            "{},{},{},{},{},{}",
            s.time,
            fmt_f64(s.p_left),
            fmt_f64(s.p_right),
            fmt_f64(s.q.re),
            fmt_f64(s.q.im),
            fmt_f64(s.norm())
        )?;
        if with_density {
            let (lp, lm, sb) = row.eigen.map_or((f64::NAN, f64::NAN, f64::NAN), |e| {
                (e.lambda_plus, e.lambda_minus, e.entropy_bits)
            });
            write!(w, ",{},{},{}", fmt_f64(lp), fmt_f64(lm), fmt_f64(sb))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_isotherm_csv<W: Write>(mut w: W, points: &[IsothermPoint]) -> Result<()> {
    writeln!(w, "{ISOTHERM_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(p.level),
            p.branch,
            fmt_f64(p.x),
            fmt_f64(p.y)
        )?;
    }
    Ok(())
}

pub fn write_envelope_csv<W: Write>(mut w: W, branches: &[&EnvelopeSeries]) -> Result<()> {
    writeln!(w, "{ENVELOPE_HEADER}")?;
    for env in branches {
        for &(t, v) in &env.peaks {
            writeln!(w, "{},{},{}", env.branch.name(), t, fmt_f64(v))?;
        }
    }
    Ok(())
}

pub fn write_master_csv<W: Write>(
    mut w: W,
    model: &MasterModel,
    samples: &[MasterSample],
) -> Result<()> {
    writeln!(w, "{MASTER_HEADER}")?;
    for s in samples {
        let closed = model.closed_form_solution(s.t).lambda_plus;
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.lambda_plus),
            fmt_f64(closed),
            fmt_f64((s.lambda_plus - closed).abs())
        )?;
    }
    Ok(())
}

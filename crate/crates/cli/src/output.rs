//! Text renderings of results. Every float is written as `{:.16e}`
//! (17 significant digits), so output is reproducible byte for byte.

use std::fmt::Write;

use keycap::sdpi::SdpiResult;
use keycap::RateCurve64;

use crate::RateUnit;

pub fn float(x: f64) -> String {
    // Avoid emitting "-0".
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn scale(unit: RateUnit) -> f64 {
    match unit {
        RateUnit::Bits => 1.0,
        RateUnit::Nats => std::f64::consts::LN_2,
    }
}

/// `mu,r,R,r_1..r_n`, one row per point.
pub fn curve_csv(curve: &RateCurve64, unit: RateUnit) -> String {
    let k = scale(unit);
    let n = curve.points().first().map_or(0, |p| p.allocations.len());
    let mut out = String::from("mu,r,R");
    for i in 1..=n {
        let _ = write!(out, ",r_{i}");
    }
    out.push('\n');
    for p in curve.points() {
        let _ = write!(out, "{},{},{}", float(p.mu), float(p.r * k), float(p.key * k));
        for &a in &p.allocations {
            let _ = write!(out, ",{}", float(a * k));
        }
        out.push('\n');
    }
    out
}

/// `mu,r,R` rows for a process frontier.
pub fn process_csv(rows: &[(f64, f64, f64)], unit: RateUnit) -> String {
    let k = scale(unit);
    let mut out = String::from("mu,r,R\n");
    for &(mu, r, key) in rows {
        let _ = writeln!(out, "{},{},{}", float(mu), float(r * k), float(key * k));
    }
    out
}

/// Discrete-mode summary. `lower_bound` is present for sources with an
/// eavesdropper.
pub struct DiscreteRecord<'a> {
    pub constant: &'a SdpiResult<f64>,
    pub rho2_m: f64,
    pub efficiency: Option<f64>,
    pub lower_bound: Option<&'a SdpiResult<f64>>,
}

pub fn discrete_json(rec: &DiscreteRecord<'_>) -> String {
    let c = rec.constant;
    let list = |v: &[f64]| v.iter().map(|&x| float(x)).collect::<Vec<_>>().join(", ");
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"s_star\": {},", float(c.value));
    let _ = writeln!(out, "  \"rho2_m\": {},", float(rec.rho2_m));
    let _ = writeln!(out, "  \"efficiency\": {},", rec.efficiency.map_or("null".to_string(), float));
    let _ = writeln!(out, "  \"method\": \"{}\",", c.method);
    let _ = writeln!(out, "  \"evaluations\": {},", c.evaluations);
    if let Some(lb) = rec.lower_bound {
        let _ = writeln!(out, "  \"degradedness_warning\": {},", c.degradedness_warning);
        let _ = writeln!(out, "  \"lower_bound\": {},", float(lb.value));
        let _ = writeln!(out, "  \"lower_bound_evaluations\": {},", lb.evaluations);
    }
    let _ = writeln!(out, "  \"argmax_qx\": [{}]", list(&c.argmax_qx));
    out.push_str("}\n");
    out
}

//! Bit-stable report serialization: fixed field order, reals rendered with
//! seventeen significant digits (enough to round-trip `f64` exactly).

use crate::essnorm::EssNormReport;

/// Canonical real formatting for every emitted artifact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    format!("[{}]", items.join(","))
}

/// Full analysis report. Field order is stable:
/// `map_spec, radii, counting, integral, carleson?, essnorm_sq_estimate,
/// beta_proxy, verdict, gap, tolerances, flags?, runtime_seconds`.
pub fn report_to_json(r: &EssNormReport) -> String {
    let mut out = String::from("{");
    out.push_str(&format!("\"map_spec\":{},", json_string(&r.map_spec)));
    out.push_str(&format!("\"radii\":{},", json_array(&r.radii)));
    out.push_str(&format!("\"counting\":{},", json_array(&r.counting)));
    out.push_str(&format!("\"integral\":{},", json_array(&r.integral)));
    if let Some(c) = &r.carleson {
        out.push_str(&format!(
            "\"carleson\":{{\"h\":{},\"ratio\":{}}},",
            json_array(&c.h),
            json_array(&c.ratio)
        ));
    }
    out.push_str(&format!(
        "\"essnorm_sq_estimate\":{},",
        fmt_f64(r.essnorm_sq_estimate)
    ));
    out.push_str(&format!("\"beta_proxy\":{},", fmt_f64(r.beta_proxy)));
    out.push_str(&format!("\"verdict\":{},", json_string(&r.verdict.to_string())));
    out.push_str(&format!("\"gap\":{},", fmt_f64(r.gap)));
    out.push_str(&format!(
        "\"tolerances\":{{\"abs_tol\":{},\"rel_tol\":{},\"compact_threshold\":{},\"noncompact_threshold\":{}}},",
        fmt_f64(r.tolerances.abs_tol),
        fmt_f64(r.tolerances.rel_tol),
        fmt_f64(r.tolerances.compact_threshold),
        fmt_f64(r.tolerances.noncompact_threshold)
    ));
    if !r.flags.is_empty() {
        let flags: Vec<String> = r.flags.iter().map(|f| json_string(f)).collect();
        out.push_str(&format!("\"flags\":[{}],", flags.join(",")));
    }
    out.push_str(&format!(
        "\"runtime_seconds\":{}",
        fmt_f64(r.runtime_seconds)
    ));
    out.push('}');
    out.push('\n');
    out
}

/// One row per radius: `radius,counting,integral,gap`.
pub fn report_to_csv(r: &EssNormReport) -> String {
    let mut out = String::from("radius,counting,integral,gap\n");
    for i in 0..r.radii.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(r.radii[i]),
            fmt_f64(r.counting[i]),
            fmt_f64(r.integral[i]),
            fmt_f64((r.counting[i] - r.integral[i]).abs())
        ));
    }
    out
}

/// Single-profile artifact (`counting` / `integral` subcommands).
pub fn profile_to_json(
    map_spec: &str,
    kind: &str,
    radii: &[f64],
    values: &[f64],
    flags: &[String],
    runtime_seconds: f64,
) -> String {
    format!(
        "{{\"map_spec\":{},\"radii\":{},{}:{},{}\"runtime_seconds\":{}}}\n",
        json_string(map_spec),
        json_array(radii),
        json_string(kind),
        json_array(values),
        flags_field(flags),
        fmt_f64(runtime_seconds)
    )
}

fn flags_field(flags: &[String]) -> String {
    if flags.is_empty() {
        String::new()
    } else {
        let items: Vec<String> = flags.iter().map(|f| json_string(f)).collect();
        format!("\"flags\":[{}],", items.join(","))
    }
}

pub fn profile_to_csv(kind: &str, radii: &[f64], values: &[f64]) -> String {
    let mut out = format!("radius,{kind}\n");
    for (r, v) in radii.iter().zip(values) {
        out.push_str(&format!("{},{}\n", fmt_f64(*r), fmt_f64(*v)));
    }
    out
}

/// Carleson-profile artifact.
pub fn carleson_to_json(map_spec: &str, h: &[f64], ratio: &[f64], runtime_seconds: f64) -> String {
    format!(
        "{{\"map_spec\":{},\"carleson\":{{\"h\":{},\"ratio\":{}}},\"runtime_seconds\":{}}}\n",
        json_string(map_spec),
        json_array(h),
        json_array(ratio),
        fmt_f64(runtime_seconds)
    )
}

pub fn carleson_to_csv(h: &[f64], ratio: &[f64]) -> String {
    let mut out = String::from("h,ratio\n");
    for (hh, rr) in h.iter().zip(ratio) {
        out.push_str(&format!("{},{}\n", fmt_f64(*hh), fmt_f64(*rr)));
    }
    out
}

/// Identity-check artifact at a single radius.
pub fn identity_to_json(
    map_spec: &str,
    radius: f64,
    counting: f64,
    integral: f64,
    gap: f64,
    flags: &[String],
) -> String {
    format!(
        "{{\"map_spec\":{},\"radius\":{},\"counting\":{},\"integral\":{},\"gap\":{},{}\"runtime_seconds\":{}}}\n",
        json_string(map_spec),
        fmt_f64(radius),
        fmt_f64(counting),
        fmt_f64(integral),
        fmt_f64(gap),
        flags_field(flags),
        fmt_f64(0.0),
    )
}

pub fn identity_to_csv(radius: f64, counting: f64, integral: f64, gap: f64) -> String {
    format!(
        "radius,counting,integral,gap\n{},{},{},{}\n",
        fmt_f64(radius),
        fmt_f64(counting),
        fmt_f64(integral),
        fmt_f64(gap)
    )
}

/// Validation artifact.
pub fn validation_to_json(map_spec: &str, max_modulus: f64, n_samples: usize, accepted: bool) -> String {
    format!(
        "{{\"map_spec\":{},\"max_modulus\":{},\"n_samples\":{},\"accepted\":{}}}\n",
        json_string(map_spec),
        fmt_f64(max_modulus),
        n_samples,
        accepted
    )
}

/// Catalog listing with known verdicts.
pub fn catalog_to_json() -> String {
    let entries: Vec<String> = crate::mapspec::catalog()
        .iter()
        .map(|e| {
            let ess = match e.known_essnorm_sq {
                Some(v) => fmt_f64(v),
                None => "null".into(),
            };
            format!(
                "{{\"spec\":{},\"known_verdict\":{},\"known_essnorm_sq\":{}}}",
                json_string(e.spec),
                json_string(if e.known_compact { "compact" } else { "non-compact" }),
                ess
            )
        })
        .collect();
    format!("[{}]\n", entries.join(","))
}

pub fn catalog_to_csv() -> String {
    let mut out = String::from("spec,known_verdict,known_essnorm_sq\n");
    for e in crate::mapspec::catalog() {
        out.push_str(&format!(
            "\"{}\",{},{}\n",
            e.spec,
            if e.known_compact { "compact" } else { "non-compact" },
            e.known_essnorm_sq.map(fmt_f64).unwrap_or_default()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips_f64() {
        for &x in &[
            0.0,
            1.0,
            -1.0 / 3.0,
            1.0050335853501441,
            2.0020026706730776e0,
            1e-300,
            -0.2463632515,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_escaping() {
        assert_eq!(json_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}

//! Text format for printed results, shared bit-for-bit with the standalone
//! runtime: ints in decimal, reals as C's `%.17g`, arrays as an
//! `array <rows> <cols>` header followed by one line per row.

use crate::interp::Value;

/// Formats `v` exactly like C's `printf("%.17g", v)`, except that every NaN
/// prints as `nan`.
pub fn fmt_real(v: f64) -> String {
    const PRECISION: i32 = 17;
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Printed form of one value, newline terminated.
pub fn format_value(v: &Value) -> String {
    fn rows<T: Copy + Default>(
        a: &crate::array::NumArray<T>,
        f: impl Fn(T) -> String,
    ) -> String {
        let mut out = format!("array {} {}\n", a.rows(), a.cols());
        for row in a.to_rows() {
            let cells: Vec<String> = row.into_iter().map(&f).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
    match v {
        Value::Int(i) => format!("{i}\n"),
        Value::Real(r) => format!("{}\n", fmt_real(*r)),
        Value::Float(f) => format!("{}\n", fmt_real(f64::from(*f))),
        Value::IntArray(a) => rows(a, |x| x.to_string()),
        Value::RealArray(a) => rows(a, fmt_real),
    }
}

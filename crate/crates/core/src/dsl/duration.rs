//! ISO 8601 durations restricted to days, hours, minutes and (fractional)
//! seconds, at millisecond resolution.

const SECOND: i64 = 1_000;
const MINUTE: i64 = 60 * SECOND;
const HOUR: i64 = 60 * MINUTE;
const DAY: i64 = 24 * HOUR;

/// Parses `[-]P[nD][T[nH][nM][n[.fff]S]]` into milliseconds.
pub fn parse_duration(text: &str) -> Result<i64, String> {
    match text.strip_prefix('-') {
        Some(rest) => parse_unsigned(rest)
            .map(|ms| -ms)
            .map_err(|_| format!("invalid duration `{text}`, expected e.g. PT1H or PT30M")),
        None => parse_unsigned(text),
    }
}

fn parse_unsigned(text: &str) -> Result<i64, String> {
    let err = || format!("invalid duration `{text}`, expected e.g. PT1H or PT30M");
    let rest = text.strip_prefix('P').ok_or_else(err)?;
    let (date, time) = match rest.split_once('T') {
        Some((d, t)) if !t.is_empty() => (d, Some(t)),
        Some(_) => return Err(err()),
        None => (rest, None),
    };
    let mut total: i64 = 0;
    let mut components = 0;
    let mut add = |amount: i64, unit: i64| -> Result<(), String> {
        components += 1;
        total = amount
            .checked_mul(unit)
            .and_then(|v| total.checked_add(v))
            .ok_or_else(|| format!("duration `{text}` is out of range"))?;
        Ok(())
    };
    if !date.is_empty() {
        let days = date.strip_suffix('D').ok_or_else(err)?;
        add(parse_digits(days).ok_or_else(err)?, DAY)?;
    }
    if let Some(mut t) = time {
        for (designator, unit) in [('H', HOUR), ('M', MINUTE)] {
            if let Some(i) = t.find(designator) {
                add(parse_digits(&t[..i]).ok_or_else(err)?, unit)?;
                t = &t[i + 1..];
            }
        }
        if !t.is_empty() {
            let secs = t.strip_suffix('S').ok_or_else(err)?;
            let (whole, frac) = secs.split_once('.').unwrap_or((secs, ""));
            if frac.len() > 3 || (secs.contains('.') && frac.is_empty()) {
                return Err(err());
            }
            let whole = parse_digits(whole).ok_or_else(err)?;
            let millis = if frac.is_empty() {
                0
            } else {
                let padded = format!("{frac:0<3}");
                parse_digits(&padded).ok_or_else(err)?
            };
            add(whole, SECOND)?;
            add(millis, 1)?;
        }
    }
    if components == 0 {
        return Err(err());
    }
    Ok(total)
}

fn parse_digits(s: &str) -> Option<i64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical form: hours, minutes and seconds only, zero components
/// omitted, `PT0S` for zero.
pub fn format_duration(ms: i64) -> String {
    if ms == 0 {
        return "PT0S".into();
    }
    if ms < 0 {
        // i64::MIN has no positive counterpart; clamp by one millisecond.
        return format!("-{}", format_duration(ms.checked_neg().unwrap_or(i64::MAX)));
    }
    let (h, rem) = (ms / HOUR, ms % HOUR);
    let (m, rem) = (rem / MINUTE, rem % MINUTE);
    let (s, frac) = (rem / SECOND, rem % SECOND);
    let mut out = String::from("PT");
    if h > 0 {
        out.push_str(&format!("{h}H"));
    }
    if m > 0 {
        out.push_str(&format!("{m}M"));
    }
    if s > 0 || frac > 0 {
        out.push_str(&s.to_string());
        if frac > 0 {
            let digits = format!("{frac:03}");
            out.push('.');
            out.push_str(digits.trim_end_matches('0'));
        }
        out.push('S');
    }
    out
}
